// Two-round XP outage evaluated four independent ways.

use xpharq::exact::{outage_k2_exact, outage_k2_from_phi, phi_foxh, FoxHParams11};
use xpharq::montecarlo::{estimate_outage, SimConfig};
use xpharq::quadrature::{xp_outage_quadrature, Tolerance};
use xpharq::{PowerProfile, RateSchedule, Scheme};

fn main() -> xpharq::Result<()> {
    let rates = RateSchedule::new(vec![1.0, 1.0])?;
    println!("{:>6} {:>14} {:>14} {:>14} {:>14} {:>10}", "dB", "quadrature", "mellin-barnes", "oracle", "mc", "mc 95%");
    for db in [0.0, 10.0, 20.0] {
        let powers = PowerProfile::from_db(&[db, db])?;
        let g = powers.snr_bar(1);
        let exact = outage_k2_exact(&rates, &powers, 1e-12)?;
        let phi = phi_foxh(1.0, 1.0, g, g, &FoxHParams11::default())?;
        let mb = outage_k2_from_phi(&rates, &powers, phi)?;
        let oracle = xp_outage_quadrature(&rates, &powers, Tolerance::new(1e-14, 1e-10))?;
        let mc = estimate_outage(&SimConfig::new(Scheme::Xp, rates.clone(), powers, 200_000, 7, 4)?)?;
        println!(
            "{db:>6} {:>14.8e} {mb:>14.8e} {:>14.8e} {:>14.8e} {:>10.2e}",
            exact.value,
            oracle.value,
            mc.value,
            mc.uncertainty.value()
        );
    }
    Ok(())
}
