// Log-log slope of the outage probability at high SNR.

use xpharq::asymptotic::{default_fit_window_db, diversity_order_fit};
use xpharq::exact::outage_k2_exact;
use xpharq::quadrature::{xp_outage_quadrature, Tolerance};
use xpharq::{db_to_linear, PowerProfile, RateSchedule};

fn main() -> xpharq::Result<()> {
    let window = default_fit_window_db();
    for k in 2..=3 {
        let rates = RateSchedule::new(vec![1.0; k])?;
        let mut pts = Vec::new();
        for db in &window {
            let powers = PowerProfile::from_db(&vec![*db; k])?;
            let p = if k == 2 {
                outage_k2_exact(&rates, &powers, 1e-30)?.value
            } else {
                xp_outage_quadrature(&rates, &powers, Tolerance::new(1e-300, 1e-9))?.value
            };
            pts.push((db_to_linear(*db), p));
        }
        let fit = diversity_order_fit(&pts)?;
        println!("K = {k}: diversity order {:.4}", fit.diversity_order());
    }
    Ok(())
}
