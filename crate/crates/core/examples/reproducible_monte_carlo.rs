// Same seed, different thread counts, identical counts.

use xpharq::montecarlo::{outage_summary, SimConfig};
use xpharq::{PowerProfile, RateSchedule, Scheme};

fn main() -> xpharq::Result<()> {
    let rates = RateSchedule::new(vec![1.0, 1.0, 1.0])?;
    let powers = PowerProfile::from_db(&[5.0; 3])?;
    for workers in [1, 2, 8] {
        for scheme in [Scheme::Xp, Scheme::Inr] {
            let cfg = SimConfig::new(scheme, rates.clone(), powers.clone(), 300_000, 42, workers)?;
            let s = outage_summary(&cfg)?;
            println!(
                "workers={workers} {scheme}: outages {} successes by round {:?}",
                s.outage_count, s.success_at_round
            );
        }
    }
    Ok(())
}
