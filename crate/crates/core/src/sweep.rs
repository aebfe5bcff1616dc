//! Batch sweeps: the key=value configuration, single-point evaluation shared
//! with the CLI, and the CSV writer.
//!
//! A configuration file is UTF-8 text, one `key = value` per line, `#`
//! starting a comment and lists separated by commas:
//!
//! ```text
//! # two-round outage against SNR
//! quantity = outage
//! axis = snr_db
//! start = 0
//! stop = 40
//! step = 5
//! rates = 1, 1
//! methods = exact, asymptotic, mc
//! schemes = xp
//! seed = 1
//! trials = 100000
//! ```
//!
//! On the `r1` axis the first rate is replaced by the axis value and
//! `snr_db` (one value, or one per round) fixes the channel.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::asymptotic::{outage_asymptotic_general, outage_k2_asymptotic};
use crate::bounds::{ir_sum_cdf, outage_lower, outage_upper_ir, UpperMethod, MAX_QUADRATURE_ROUNDS};
use crate::error::{Error, Result};
use crate::exact::{outage_k1, outage_k2_exact};
use crate::model::{db_to_linear, Method, OutageEstimate, PowerProfile, RateSchedule, Scheme, Uncertainty};
use crate::montecarlo::{analytical_throughput, estimate_outage, estimate_throughput, SimConfig};
use crate::quadrature::{xp_outage_quadrature, Tolerance};

/// CSV header of every sweep file.
pub const CSV_HEADER: [&str; 8] = ["snr_db", "K", "R_csv", "scheme", "method", "value", "uncertainty", "seed"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    SnrDb,
    R1,
}

impl Axis {
    fn as_str(self) -> &'static str {
        match self {
            Axis::SnrDb => "snr_db",
            Axis::R1 => "r1",
        }
    }
}

impl FromStr for Axis {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "snr_db" => Ok(Axis::SnrDb),
            "r1" | "R1" => Ok(Axis::R1),
            _ => Err(format!("unknown axis `{s}` (expected snr_db or r1)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Outage,
    Throughput,
}

impl Quantity {
    fn as_str(self) -> &'static str {
        match self {
            Quantity::Outage => "outage",
            Quantity::Throughput => "throughput",
        }
    }
}

impl FromStr for Quantity {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "outage" => Ok(Quantity::Outage),
            "throughput" => Ok(Quantity::Throughput),
            _ => Err(format!("unknown quantity `{s}` (expected outage or throughput)")),
        }
    }
}

/// Numerical options for one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointOptions {
    pub seed: u64,
    pub trials: u64,
    /// Absolute quadrature tolerance.
    pub tol: f64,
    pub workers: usize,
}

impl Default for PointOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            trials: 100_000,
            tol: 1e-10,
            workers: 1,
        }
    }
}

fn unsupported(msg: String) -> Error {
    Error::Unsupported(msg)
}

/// Outage probability of `scheme` by `method`.
///
/// XP accepts every method; `exact` covers `K <= 2` and `oracle` `K <= 4`.
/// INR accepts `exact` (convolution quadrature, `K <= 4`) and `mc`.
pub fn outage_point(
    scheme: Scheme,
    method: Method,
    rates: &RateSchedule,
    powers: &PowerProfile,
    opts: &PointOptions,
) -> Result<OutageEstimate> {
    powers.check_matches(rates)?;
    let k = rates.rounds();
    let tol = Tolerance::new(opts.tol, 1e-10);
    let mc = || SimConfig::new(scheme, rates.clone(), powers.clone(), opts.trials, opts.seed, opts.workers);
    match (scheme, method) {
        (Scheme::Xp, Method::Exact) => match k {
            1 => Ok(OutageEstimate::closed_form(outage_k1(rates.rate(1), powers.snr_bar(1))?, Method::Exact)),
            2 => outage_k2_exact(rates, powers, opts.tol),
            _ => Err(unsupported(format!(
                "exact outage is available for K <= 2 only (K = {k}); use oracle for K <= 4"
            ))),
        },
        (Scheme::Xp, Method::Asymptotic) => {
            let value = match k {
                1 => (rates.rate(1).exp2() - 1.0) / powers.snr_bar(1),
                2 => outage_k2_asymptotic(rates, powers)?,
                _ => outage_asymptotic_general(rates, powers)?,
            };
            Ok(OutageEstimate::closed_form(value, Method::Asymptotic))
        }
        (Scheme::Xp, Method::Lower) => Ok(OutageEstimate::closed_form(outage_lower(rates, powers)?, Method::Lower)),
        (Scheme::Xp, Method::Upper) => {
            if k > MAX_QUADRATURE_ROUNDS {
                outage_upper_ir(
                    rates,
                    powers,
                    UpperMethod::MonteCarlo {
                        trials: opts.trials,
                        seed: opts.seed,
                        workers: opts.workers,
                    },
                )
            } else {
                outage_upper_ir(rates, powers, UpperMethod::Quadrature { tol })
            }
        }
        (Scheme::Xp, Method::Oracle) => {
            if k > 4 {
                return Err(unsupported(format!("oracle outage is available for K <= 4 only (K = {k})")));
            }
            xp_outage_quadrature(rates, powers, tol)
        }
        (_, Method::MonteCarlo) => estimate_outage(&mc()?),
        (Scheme::Inr, Method::Exact) => {
            if k > MAX_QUADRATURE_ROUNDS {
                return Err(unsupported(format!(
                    "INR outage quadrature is available for K <= {MAX_QUADRATURE_ROUNDS} only (K = {k})"
                )));
            }
            let (value, err) = ir_sum_cdf(powers, rates.total(), tol)?;
            Ok(OutageEstimate {
                value: value.clamp(0.0, 1.0),
                method: Method::Exact,
                uncertainty: Uncertainty::Quadrature(err),
            })
        }
        (Scheme::Inr, m) => Err(unsupported(format!(
            "method {m} describes XP outage; INR outage supports exact and mc"
        ))),
        (Scheme::Xp, Method::Analytical) => Err(unsupported("analytical is a throughput method".into())),
    }
}

/// Throughput in bits per channel use with its uncertainty (`mc` or `analytical`).
pub fn throughput_point(
    scheme: Scheme,
    method: Method,
    rates: &RateSchedule,
    powers: &PowerProfile,
    opts: &PointOptions,
) -> Result<(f64, Uncertainty)> {
    match method {
        Method::MonteCarlo => {
            let cfg = SimConfig::new(scheme, rates.clone(), powers.clone(), opts.trials, opts.seed, opts.workers)?;
            let est = estimate_throughput(&cfg)?;
            Ok((est.value, Uncertainty::Confidence95(est.ci_half_width)))
        }
        Method::Analytical => Ok((analytical_throughput(scheme, rates, powers)?, Uncertainty::None)),
        m => Err(unsupported(format!("throughput supports mc and analytical, not {m}"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub quantity: Quantity,
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub rates: Vec<f64>,
    /// Fixed SNR for the `r1` axis: one value for all rounds or one per round.
    pub snr_db: Vec<f64>,
    pub methods: Vec<Method>,
    pub schemes: Vec<Scheme>,
    pub seed: u64,
    pub trials: u64,
    pub tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            quantity: Quantity::Outage,
            axis: Axis::SnrDb,
            start: 0.0,
            stop: 40.0,
            step: 5.0,
            rates: vec![1.0, 1.0],
            snr_db: vec![20.0],
            methods: vec![Method::Exact],
            schemes: vec![Scheme::Xp],
            seed: 1,
            trials: 100_000,
            tol: 1e-10,
        }
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_list<T: FromStr>(value: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(|x| x.trim().parse::<T>().map_err(|e| format!("`{}`: {e}", x.trim())))
        .collect()
}

const KEYS: [&str; 12] = [
    "quantity", "axis", "start", "stop", "step", "rates", "snr_db", "methods", "schemes", "seed", "trials", "tol",
];

impl SweepConfig {
    /// Parses a configuration; keys that are absent keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with(text, Self::default())
    }

    /// Like [`SweepConfig::parse`], with absent keys taken from `defaults`.
    pub fn parse_with(text: &str, defaults: Self) -> Result<Self> {
        let mut cfg = defaults;
        let mut seen: Vec<&str> = Vec::new();
        let mut last_line = 0;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            last_line = line_no;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: line_no, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let Some(key) = KEYS.iter().find(|k| **k == key).copied() else {
                return Err(err(format!("unknown key `{key}`")));
            };
            if seen.contains(&key) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            seen.push(key);
            let num = |v: &str| v.parse::<f64>().map_err(|e| err(format!("{key}: `{v}`: {e}")));
            let int = |v: &str| v.parse::<u64>().map_err(|e| err(format!("{key}: `{v}`: {e}")));
            match key {
                "quantity" => cfg.quantity = value.parse().map_err(err)?,
                "axis" => cfg.axis = value.parse().map_err(err)?,
                "start" => cfg.start = num(value)?,
                "stop" => cfg.stop = num(value)?,
                "step" => cfg.step = num(value)?,
                "rates" => cfg.rates = parse_list(value).map_err(|e| err(format!("rates: {e}")))?,
                "snr_db" => cfg.snr_db = parse_list(value).map_err(|e| err(format!("snr_db: {e}")))?,
                "methods" => cfg.methods = parse_list(value).map_err(|e| err(format!("methods: {e}")))?,
                "schemes" => cfg.schemes = parse_list(value).map_err(|e| err(format!("schemes: {e}")))?,
                "seed" => cfg.seed = int(value)?,
                "trials" => cfg.trials = int(value)?,
                "tol" => cfg.tol = num(value)?,
                _ => unreachable!(),
            }
        }
        cfg.validate().map_err(|message| Error::Parse {
            line: last_line,
            message,
        })?;
        Ok(cfg)
    }

    /// Renders the configuration so that [`SweepConfig::parse`] returns it unchanged.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        put("quantity", self.quantity.as_str().into());
        put("axis", self.axis.as_str().into());
        put("start", self.start.to_string());
        put("stop", self.stop.to_string());
        put("step", self.step.to_string());
        put("rates", join(&self.rates));
        put("snr_db", join(&self.snr_db));
        put("methods", join(&self.methods));
        put("schemes", join(&self.schemes));
        put("seed", self.seed.to_string());
        put("trials", self.trials.to_string());
        put("tol", self.tol.to_string());
        out
    }

    fn validate(&self) -> std::result::Result<(), String> {
        let finite = [self.start, self.stop, self.step, self.tol].iter().all(|v| v.is_finite());
        if !finite {
            return Err("start, stop, step and tol must be finite".into());
        }
        if !(self.step > 0.0) || self.stop < self.start {
            return Err(format!(
                "need step > 0 and stop >= start (start {}, stop {}, step {})",
                self.start, self.stop, self.step
            ));
        }
        if self.points().len() > 100_000 {
            return Err("more than 100000 axis points".into());
        }
        if self.rates.is_empty() {
            return Err("rates must not be empty".into());
        }
        if self.axis == Axis::R1 && self.snr_db.len() != 1 && self.snr_db.len() != self.rates.len() {
            return Err(format!(
                "snr_db needs 1 or {} values, got {}",
                self.rates.len(),
                self.snr_db.len()
            ));
        }
        if self.methods.is_empty() || self.schemes.is_empty() {
            return Err("methods and schemes must not be empty".into());
        }
        if !(self.tol > 0.0) || self.trials == 0 {
            return Err("tol and trials must be positive".into());
        }
        Ok(())
    }

    /// Axis values `start, start + step, ..., <= stop`.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.start + i as f64 * self.step).collect()
    }

    /// Rate schedule and per-round SNR in dB at axis value `x`.
    fn point_model(&self, x: f64) -> (Vec<f64>, Vec<f64>) {
        let k = self.rates.len();
        match self.axis {
            Axis::SnrDb => (self.rates.clone(), vec![x; k]),
            Axis::R1 => {
                let mut rates = self.rates.clone();
                rates[0] = x;
                let snr = if self.snr_db.len() == 1 {
                    vec![self.snr_db[0]; k]
                } else {
                    self.snr_db.clone()
                };
                (rates, snr)
            }
        }
    }
}

/// One CSV record.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// SNR of the first round in dB.
    pub snr_db: f64,
    pub rates: Vec<f64>,
    pub scheme: Scheme,
    pub method: Method,
    pub value: f64,
    pub uncertainty: f64,
    pub seed: u64,
}

/// Nine significant digits in scientific notation.
pub fn format_sig9(x: f64) -> String {
    format!("{x:.8e}")
}

impl SweepRow {
    /// Fields in [`CSV_HEADER`] order. Rates are joined with `;` so the
    /// record never needs quoting.
    pub fn record(&self) -> [String; 8] {
        [
            format_sig9(self.snr_db),
            self.rates.len().to_string(),
            self.rates.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(";"),
            self.scheme.to_string(),
            self.method.to_string(),
            format_sig9(self.value),
            format_sig9(self.uncertainty),
            self.seed.to_string(),
        ]
    }
}

/// Evaluates every (axis point, scheme, method) job, in axis-major order.
///
/// Jobs run on `workers` threads; Monte Carlo inside a job is single
/// threaded, so the rows do not depend on `workers`.
pub fn sweep_rows(cfg: &SweepConfig, workers: usize) -> Result<Vec<SweepRow>> {
    cfg.validate().map_err(Error::Contract)?;
    if workers == 0 {
        return Err(Error::domain("need at least one worker"));
    }
    let jobs: Vec<(f64, Scheme, Method)> = cfg
        .points()
        .into_iter()
        .flat_map(|x| {
            cfg.schemes
                .iter()
                .flat_map(move |s| cfg.methods.iter().map(move |m| (x, *s, *m)))
        })
        .collect();
    let opts = PointOptions {
        seed: cfg.seed,
        trials: cfg.trials,
        tol: cfg.tol,
        workers: 1,
    };
    let run = |(x, scheme, method): (f64, Scheme, Method)| -> Result<SweepRow> {
        let (rates, snr_db) = cfg.point_model(x);
        let r = RateSchedule::new(rates.clone())?;
        let g = PowerProfile::new(snr_db.iter().map(|d| db_to_linear(*d)).collect())?;
        let (value, unc) = match cfg.quantity {
            Quantity::Outage => {
                let e = outage_point(scheme, method, &r, &g, &opts)?;
                (e.value, e.uncertainty)
            }
            Quantity::Throughput => throughput_point(scheme, method, &r, &g, &opts)?,
        };
        Ok(SweepRow {
            snr_db: snr_db[0],
            rates,
            scheme,
            method,
            value,
            uncertainty: unc.value(),
            seed: cfg.seed,
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Unsupported(format!("cannot start worker pool: {e}")))?;
    pool.install(|| jobs.into_par_iter().map(run).collect())
}

/// Runs the sweep and writes the CSV to `out`.
pub fn run_sweep<W: Write>(cfg: &SweepConfig, workers: usize, out: W) -> Result<()> {
    let rows = sweep_rows(cfg, workers)?;
    write_csv(&rows, out)
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}

/// A gnuplot script plotting every (scheme, method) curve of `csv_path`.
pub fn gnuplot_script(cfg: &SweepConfig, csv_path: &str) -> String {
    let (xlabel, xcol) = match cfg.axis {
        Axis::SnrDb => ("average SNR (dB)", "$1"),
        Axis::R1 => ("R_1 (bits/channel use)", "r[1]"),
    };
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str(&format!("set xlabel '{xlabel}'\n"));
    match cfg.quantity {
        Quantity::Outage => s.push_str("set ylabel 'outage probability'\nset logscale y\nset format y '10^{%L}'\n"),
        Quantity::Throughput => s.push_str("set ylabel 'throughput (bits/channel use)'\n"),
    }
    s.push_str("set key bottom left\nset grid\n");
    let curves: Vec<String> = cfg
        .schemes
        .iter()
        .flat_map(|sc| cfg.methods.iter().map(move |m| (sc, m)))
        .map(|(sc, m)| {
            format!(
                "  \"< awk -F, 'NR > 1 && $4 == \\\"{sc}\\\" && $5 == \\\"{m}\\\" {{ split($3, r, \\\";\\\"); print {xcol} \\\",\\\" $6 }}' {csv_path}\" using 1:2 with linespoints title '{sc} {m}'"
            )
        })
        .collect();
    s.push_str("plot \\\n");
    s.push_str(&curves.join(", \\\n"));
    s.push('\n');
    s
}
