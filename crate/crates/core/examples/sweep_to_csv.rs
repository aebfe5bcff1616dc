// Runs a small sweep from an inline configuration and prints the CSV.

use xpharq::sweep::{run_sweep, SweepConfig};

const CONFIG: &str = "
# three rounds, bounds against simulation
quantity = outage
axis = snr_db
start = 0
stop = 20
step = 10
rates = 1, 0.5, 0.5
methods = lower, oracle, upper, mc
schemes = xp
seed = 11
trials = 20000
";

fn main() -> xpharq::Result<()> {
    let cfg = SweepConfig::parse(CONFIG)?;
    run_sweep(&cfg, 4, std::io::stdout().lock())
}
