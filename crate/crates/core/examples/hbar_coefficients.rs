// High-SNR coefficient table and how fast the asymptote takes over.

use xpharq::asymptotic::{build_hbar_table, hbar_eval, outage_asymptotic_general};
use xpharq::quadrature::{hbar_quadrature, xp_outage_quadrature, Tolerance};
use xpharq::{PowerProfile, RateSchedule};

fn main() -> xpharq::Result<()> {
    let rates = RateSchedule::new(vec![1.0, 1.0, 1.0])?;
    let table = build_hbar_table(&rates)?;
    for k in 1..=table.rounds() {
        println!("c_{k},* = {:?}", table.row(k));
    }
    let h = hbar_eval(&table, 1, 1.0)?;
    let direct = hbar_quadrature(&rates, 1, 1.0, Tolerance::new(1e-14, 1e-12))?;
    println!("hbar(1) = {h:.12} (direct integral {:.12})", direct.value);

    println!("{:>4} {:>12} {:>12} {:>7}", "dB", "oracle", "asymptote", "ratio");
    for db in [10.0, 20.0, 30.0, 40.0] {
        let powers = PowerProfile::from_db(&[db; 3])?;
        let exact = xp_outage_quadrature(&rates, &powers, Tolerance::new(1e-300, 1e-9))?.value;
        let asym = outage_asymptotic_general(&rates, &powers)?;
        println!("{db:>4} {exact:>12.5e} {asym:>12.5e} {:>7.4}", asym / exact);
    }
    Ok(())
}
