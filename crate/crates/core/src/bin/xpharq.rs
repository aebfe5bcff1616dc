//! Command-line front end. SNR arguments are in dB.

use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use xpharq::asymptotic::{build_hbar_table, hbar_eval};
use xpharq::bounds::{outage_lower, outage_upper_ir, UpperMethod};
use xpharq::exact::{outage_k2_exact, outage_k2_from_phi, phi_foxh, FoxHParams11};
use xpharq::montecarlo::{inr_outage_chain, xp_outage_chain, RARE_EVENT_THRESHOLD};
use xpharq::quadrature::{hbar_quadrature, xp_outage_quadrature, Tolerance};
use xpharq::special::{bessel_k1, upper_incomplete_gamma};
use xpharq::sweep::{gnuplot_script, outage_point, run_sweep, throughput_point, PointOptions, SweepConfig};
use xpharq::{db_to_linear, Error, Method, PowerProfile, RateSchedule, Scheme};

#[derive(Parser)]
#[command(name = "xpharq", version, about = "Outage and throughput of XP-HARQ and HARQ-IR over Rayleigh fading")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Per-round rates in bits/channel use, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    rates: Vec<f64>,
    /// Average SNR in dB: one value for every round or one per round.
    #[arg(long = "snr-db", value_delimiter = ',', required = true, allow_negative_numbers = true)]
    snr_db: Vec<f64>,
    #[arg(long, env = "XPHARQ_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// Absolute quadrature tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Outage probability at one operating point.
    Outage {
        #[arg(long, default_value = "xp")]
        scheme: Scheme,
        #[arg(long, default_value = "exact")]
        method: Method,
        #[command(flatten)]
        common: Common,
    },
    /// Batch sweep from a key=value configuration file, written as CSV.
    Sweep {
        /// Configuration file.
        config: String,
        /// Output CSV (stdout if absent).
        #[arg(long, short)]
        out: Option<String>,
        /// Also write a gnuplot script for the CSV.
        #[arg(long)]
        gnuplot: Option<String>,
        /// Overrides the configuration seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Long-run throughput at one operating point.
    Throughput {
        /// xp, inr or both.
        #[arg(long, default_value = "both")]
        scheme: String,
        #[arg(long, default_value = "analytical")]
        method: Method,
        #[command(flatten)]
        common: Common,
    },
    /// Coefficient table of the high-SNR log-polynomials.
    Hbar {
        #[arg(long, value_delimiter = ',', required = true)]
        rates: Vec<f64>,
    },
    /// Cross-checks between independent evaluation paths.
    Selftest,
}

fn model(common: &Common) -> xpharq::Result<(RateSchedule, PowerProfile)> {
    let rates = RateSchedule::new(common.rates.clone())?;
    let db = match common.snr_db.len() {
        1 => vec![common.snr_db[0]; rates.rounds()],
        n if n == rates.rounds() => common.snr_db.clone(),
        n => {
            return Err(Error::Contract(format!(
                "--snr-db needs 1 or {} values, got {n}",
                rates.rounds()
            )))
        }
    };
    Ok((rates, PowerProfile::from_db(&db)?))
}

fn options(common: &Common) -> PointOptions {
    PointOptions {
        seed: common.seed,
        trials: common.trials,
        tol: common.tol,
        workers: common.workers,
    }
}

fn cmd_outage(scheme: Scheme, method: Method, common: &Common) -> xpharq::Result<()> {
    let (rates, powers) = model(common)?;
    let opts = options(common);
    let t0 = Instant::now();
    let est = outage_point(scheme, method, &rates, &powers, &opts)?;
    let wall = t0.elapsed().as_secs_f64();
    println!(
        "scheme={scheme} method={} K={} value={:.8e} uncertainty={:.8e} wall_s={wall:.3}",
        est.method,
        rates.rounds(),
        est.value,
        est.uncertainty.value()
    );
    if est.method == Method::MonteCarlo {
        let events = (est.value * opts.trials as f64).round() as u64;
        if events < RARE_EVENT_THRESHOLD {
            eprintln!(
                "warning: only {events} outage events in {} trials; the estimate is unreliable",
                opts.trials
            );
        }
    }
    if scheme == Scheme::Xp && matches!(method, Method::Lower | Method::Upper) {
        let lower = outage_lower(&rates, &powers)?;
        let upper = outage_point(Scheme::Xp, Method::Upper, &rates, &powers, &opts)?.value;
        println!("bound_gap={:.8e}", (upper - lower) / upper);
    }
    Ok(())
}

fn cmd_sweep(
    path: &str,
    out: Option<&str>,
    gnuplot: Option<&str>,
    seed: Option<u64>,
    workers: usize,
) -> xpharq::Result<()> {
    let text = fs::read_to_string(path)?;
    let mut defaults = SweepConfig::default();
    if let Ok(s) = std::env::var("XPHARQ_SEED") {
        defaults.seed = s
            .trim()
            .parse()
            .map_err(|e| Error::Contract(format!("XPHARQ_SEED `{s}`: {e}")))?;
    }
    let mut cfg = SweepConfig::parse_with(&text, defaults)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    match out {
        Some(p) => run_sweep(&cfg, workers, fs::File::create(p)?)?,
        None => run_sweep(&cfg, workers, io::stdout().lock())?,
    }
    if let Some(g) = gnuplot {
        fs::write(g, gnuplot_script(&cfg, out.unwrap_or("sweep.csv")))?;
    }
    Ok(())
}

fn cmd_throughput(scheme: &str, method: Method, common: &Common) -> xpharq::Result<()> {
    let schemes = match scheme {
        "both" => vec![Scheme::Xp, Scheme::Inr],
        s => vec![s.parse::<Scheme>()?],
    };
    let (rates, powers) = model(common)?;
    let opts = options(common);
    for s in schemes {
        let (value, unc) = throughput_point(s, method, &rates, &powers, &opts)?;
        println!(
            "scheme={s} method={method} K={} throughput={value:.8e} uncertainty={:.8e}",
            rates.rounds(),
            unc.value()
        );
        if method == Method::Analytical {
            let chain = match s {
                Scheme::Xp => xp_outage_chain(&rates, &powers)?,
                Scheme::Inr => inr_outage_chain(&rates, &powers)?,
            };
            let source = match s {
                Scheme::Xp => "k=1 closed form, k=2 exact quadrature, k>=3 nested oracle",
                Scheme::Inr => "convolution quadrature of the accumulated information at R_1",
            };
            let chain: Vec<String> = chain.iter().map(|p| format!("{p:.8e}")).collect();
            println!("  outage chain [{}] from {source}", chain.join(", "));
        }
    }
    Ok(())
}

fn cmd_hbar(rates: &[f64]) -> xpharq::Result<()> {
    let rates = RateSchedule::new(rates.to_vec())?;
    let table = build_hbar_table(&rates)?;
    let k = table.rounds();
    println!("# c_(k,i) for K = {k}; row k lists i = 0..K-k");
    for row in 1..=k {
        let c: Vec<String> = table.row(row).iter().map(|c| format!("{c:.15e}")).collect();
        println!("k={row} {}", c.join(" "));
    }
    println!("hbar_(K,1)(1) = {:.15e}", hbar_eval(&table, 1, 1.0)?);
    Ok(())
}

fn check(name: &str, ok: bool, detail: String) -> bool {
    println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn cmd_selftest() -> xpharq::Result<bool> {
    let mut all = true;
    let tpl = FoxHParams11::default();
    for (r, db) in [([1.0, 1.0], 10.0), ([1.0, 2.0], 0.0), ([2.0, 1.0], 20.0)] {
        let rates = RateSchedule::new(r.to_vec())?;
        let powers = PowerProfile::from_db(&[db, db])?;
        let g = db_to_linear(db);
        let exact = outage_k2_exact(&rates, &powers, 1e-13)?.value;
        let foxh = outage_k2_from_phi(&rates, &powers, phi_foxh(r[0], r[1], g, g, &tpl)?)?;
        let oracle = xp_outage_quadrature(&rates, &powers, Tolerance::new(1e-15, 1e-11))?.value;
        let rel = ((exact - foxh).abs().max((exact - oracle).abs())) / exact;
        all &= check(
            &format!("K=2 paths R={r:?} {db} dB"),
            rel < 1e-6,
            format!("exact {exact:.9e}, Mellin-Barnes {foxh:.9e}, oracle {oracle:.9e}"),
        );
    }
    let rates = RateSchedule::new(vec![1.0; 3])?;
    let ln2 = std::f64::consts::LN_2;
    let table = build_hbar_table(&rates)?;
    let h = hbar_eval(&table, 1, 1.0)?;
    let closed = 12.0 * ln2 * ln2 - 4.0 * ln2 + 1.0;
    let quad = hbar_quadrature(&rates, 1, 1.0, Tolerance::new(1e-14, 1e-12))?.value;
    all &= check(
        "hbar K=3 unit rates",
        (h - closed).abs() < 1e-9 && (h - quad).abs() < 1e-8 * h,
        format!("table {h:.12}, closed form {closed:.12}, quadrature {quad:.12}"),
    );
    let powers = PowerProfile::uniform(10.0, 3)?;
    let lower = outage_lower(&rates, &powers)?;
    let oracle = xp_outage_quadrature(&rates, &powers, Tolerance::new(1e-15, 1e-10))?.value;
    let upper = outage_upper_ir(&rates, &powers, UpperMethod::default())?.value;
    all &= check(
        "bound ordering K=3 10 dB",
        lower <= oracle && oracle <= upper,
        format!("{lower:.6e} <= {oracle:.6e} <= {upper:.6e}"),
    );
    let g1 = upper_incomplete_gamma(num_complex::Complex64::new(1.0, 0.0), 3.0)?.re;
    all &= check(
        "Gamma(1, 3) = exp(-3)",
        (g1 - (-3.0f64).exp()).abs() < 1e-12,
        format!("{g1:.15e}"),
    );
    let p = FoxHParams11::new(1.0, 0.0);
    let h0 = xpharq::exact::foxh_upper_incomplete_11(&p)?;
    let k1 = 2.0 * bessel_k1(2.0)?;
    all &= check("Fox H at b = 0", (h0 - k1).abs() < 1e-6, format!("{h0:.12} vs 2 K1(2) = {k1:.12}"));
    Ok(all)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Outage { scheme, method, common } => cmd_outage(*scheme, *method, common).map(|_| true),
        Command::Sweep {
            config,
            out,
            gnuplot,
            seed,
            workers,
        } => cmd_sweep(config, out.as_deref(), gnuplot.as_deref(), *seed, *workers).map(|_| true),
        Command::Throughput { scheme, method, common } => cmd_throughput(scheme, *method, common).map(|_| true),
        Command::Hbar { rates } => cmd_hbar(rates).map(|_| true),
        Command::Selftest => cmd_selftest(),
    };
    let _ = io::stdout().flush();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e @ (Error::Unsupported(_) | Error::Contract(_) | Error::Domain(_))) => {
            eprintln!("usage error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
