// XP against HARQ-IR throughput as the first-round rate varies.

use xpharq::montecarlo::{analytical_throughput, estimate_throughput, SimConfig};
use xpharq::{PowerProfile, RateSchedule, Scheme};

fn main() -> xpharq::Result<()> {
    let powers = PowerProfile::from_db(&[20.0; 3])?;
    println!("{:>4} {:>9} {:>9} {:>9} {:>9}", "R1", "xp", "inr", "xp mc", "ci");
    for i in 1..=8 {
        let r1 = 0.5 * i as f64;
        let rates = RateSchedule::new(vec![r1, 2.0, 2.0])?;
        let xp = analytical_throughput(Scheme::Xp, &rates, &powers)?;
        let inr = analytical_throughput(Scheme::Inr, &rates, &powers)?;
        let mc = estimate_throughput(&SimConfig::new(Scheme::Xp, rates, powers.clone(), 100_000, 3, 4)?)?;
        println!("{r1:>4} {xp:>9.5} {inr:>9.5} {:>9.5} {:>9.5}", mc.value, mc.ci_half_width);
    }
    Ok(())
}
