// Lower bound, nested-quadrature oracle and HARQ-IR upper bound for three rounds.

use xpharq::bounds::{outage_lower, outage_upper_ir, UpperMethod};
use xpharq::quadrature::{xp_outage_quadrature, Tolerance};
use xpharq::{PowerProfile, RateSchedule};

fn main() -> xpharq::Result<()> {
    for r in [[1.0, 1.0, 1.0], [1.0, 0.5, 0.5]] {
        let rates = RateSchedule::new(r.to_vec())?;
        println!("R = {r:?}");
        println!("{:>5} {:>12} {:>12} {:>12} {:>8}", "dB", "lower", "oracle", "upper", "gap");
        for db in (0..=40).step_by(10) {
            let powers = PowerProfile::from_db(&[db as f64; 3])?;
            let lo = outage_lower(&rates, &powers)?;
            let xp = xp_outage_quadrature(&rates, &powers, Tolerance::new(1e-16, 1e-8))?.value;
            let up = outage_upper_ir(&rates, &powers, UpperMethod::default())?.value;
            println!("{db:>5} {lo:>12.5e} {xp:>12.5e} {up:>12.5e} {:>8.3}", (up - lo) / up);
        }
    }
    Ok(())
}
