//! Monte Carlo simulation of HARQ cycles and the renewal-reward throughput.
//!
//! Every trial draws its channel from its own ChaCha8 stream, selected by
//! the trial index under the configured seed. Trials are grouped in fixed
//! chunks that are farmed out to a thread pool and merged by adding integer
//! counters, so results depend on `(seed, trials, scheme, rates, powers)`
//! only and never on the worker count or scheduling order.
//!
//! Throughput follows the renewal-reward argument: a cycle that decodes in
//! round `k` earns its reward and occupies `k` slots, a failed cycle earns
//! nothing and occupies `K` slots. XP-HARQ earns `R_k^sum` when it decodes
//! in round `k`; HARQ-IR carries a single message of rate `R_1`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::bounds::{ir_sum_cdf_chain, MAX_QUADRATURE_ROUNDS};
use crate::error::{Error, Result};
use crate::exact::{outage_k1, outage_k2_exact};
use crate::model::{
    ir_success_round_unchecked, xp_success_round_unchecked, Method, OutageEstimate, PowerProfile, RateSchedule,
    Scheme, Uncertainty,
};
use crate::quadrature::{xp_outage_quadrature, Tolerance};

/// Trials per work item. Part of the reproducibility contract: changing it
/// does not change results (streams are per trial) but keeps the merge
/// order fixed.
const CHUNK: u64 = 8192;

/// z-score of a two-sided 95% interval.
pub const Z95: f64 = 1.96;

/// Below this many observed failures the outage estimate is flagged as
/// unreliable.
pub const RARE_EVENT_THRESHOLD: u64 = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub scheme: Scheme,
    pub rates: RateSchedule,
    pub powers: PowerProfile,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
}

impl SimConfig {
    pub fn new(
        scheme: Scheme,
        rates: RateSchedule,
        powers: PowerProfile,
        trials: u64,
        seed: u64,
        workers: usize,
    ) -> Result<Self> {
        powers.check_matches(&rates)?;
        if trials == 0 {
            return Err(Error::domain("need at least one trial"));
        }
        if workers == 0 {
            return Err(Error::domain("need at least one worker"));
        }
        Ok(Self {
            scheme,
            rates,
            powers,
            trials,
            seed,
            workers,
        })
    }
}

/// Decoding rule applied to each simulated cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecodeRule {
    /// Decode in round `k` once accumulated information reaches `R_k^sum`.
    CrossPacket,
    /// Decode once accumulated information reaches a fixed `target`.
    IncrementalRedundancy { target: f64 },
}

/// Sufficient statistics of a batch of simulated cycles.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSummary {
    pub trials: u64,
    pub outage_count: u64,
    /// `success_at_round[k - 1]` counts cycles decoded in round `k`.
    pub success_at_round: Vec<u64>,
    /// Sum of rewards over all cycles (bits/channel-use per slot, summed).
    pub delivered_rate_total: f64,
    pub slots_total: u64,
}

impl SimSummary {
    fn empty(rounds: usize) -> Self {
        Self {
            trials: 0,
            outage_count: 0,
            success_at_round: vec![0; rounds],
            delivered_rate_total: 0.0,
            slots_total: 0,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.trials += other.trials;
        self.outage_count += other.outage_count;
        for (a, b) in self.success_at_round.iter_mut().zip(&other.success_at_round) {
            *a += b;
        }
        self.slots_total += other.slots_total;
        self
    }

    pub fn outage_fraction(&self) -> f64 {
        self.outage_count as f64 / self.trials as f64
    }

    /// Fewer than [`RARE_EVENT_THRESHOLD`] failures were observed.
    pub fn is_rare_event(&self) -> bool {
        self.outage_count < RARE_EVENT_THRESHOLD
    }
}

/// Exponential SNR draw with mean `snr_bar`.
pub fn sample_snr<R: Rng + ?Sized>(snr_bar: f64, rng: &mut R) -> f64 {
    let e: f64 = rng.sample(Exp1);
    e * snr_bar
}

/// Random stream of trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Simulates `cfg.trials` cycles under `rule`.
///
/// Rewards for [`SimSummary::delivered_rate_total`] follow `cfg.scheme`.
pub fn simulate(cfg: &SimConfig, rule: DecodeRule) -> Result<SimSummary> {
    let k = cfg.rates.rounds();
    let chunks = cfg.trials.div_ceil(CHUNK);
    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    let job = |c: u64| {
        let start = c * CHUNK;
        let end = (start + CHUNK).min(cfg.trials);
        run_chunk(cfg, rule, &base, start..end)
    };
    let mut summary = if cfg.workers == 1 {
        (0..chunks).map(job).fold(SimSummary::empty(k), SimSummary::merge)
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::Unsupported(format!("cannot start worker pool: {e}")))?;
        pool.install(|| {
            (0..chunks)
                .into_par_iter()
                .map(job)
                .reduce(|| SimSummary::empty(k), SimSummary::merge)
        })
    };
    summary.delivered_rate_total = summary
        .success_at_round
        .iter()
        .enumerate()
        .map(|(i, n)| *n as f64 * reward(cfg, i + 1))
        .sum();
    Ok(summary)
}

fn reward(cfg: &SimConfig, round: usize) -> f64 {
    match cfg.scheme {
        Scheme::Xp => cfg.rates.cumulative(round),
        Scheme::Inr => cfg.rates.rate(1),
    }
}

fn run_chunk(cfg: &SimConfig, rule: DecodeRule, base: &ChaCha8Rng, trials: std::ops::Range<u64>) -> SimSummary {
    let k = cfg.rates.rounds();
    let mut out = SimSummary::empty(k);
    let mut snrs = vec![0.0; k];
    for t in trials {
        let mut rng = base.clone();
        rng.set_stream(t);
        for (s, g) in snrs.iter_mut().zip(cfg.powers.snr_bars()) {
            *s = sample_snr(*g, &mut rng);
        }
        let round = match rule {
            DecodeRule::CrossPacket => xp_success_round_unchecked(&cfg.rates, &snrs),
            DecodeRule::IncrementalRedundancy { target } => ir_success_round_unchecked(target, &snrs),
        };
        out.trials += 1;
        match round {
            Some(r) => {
                out.success_at_round[r - 1] += 1;
                out.slots_total += r as u64;
            }
            None => {
                out.outage_count += 1;
                out.slots_total += k as u64;
            }
        }
    }
    out
}

fn binomial_estimate(summary: &SimSummary) -> OutageEstimate {
    let n = summary.trials as f64;
    let p = summary.outage_fraction();
    OutageEstimate {
        value: p,
        method: Method::MonteCarlo,
        uncertainty: Uncertainty::Confidence95(Z95 * (p * (1.0 - p) / n).sqrt()),
    }
}

/// Outage probability estimate with a 95% binomial interval.
///
/// XP counts cycles that never decode. INR counts the HARQ-IR outage event
/// `I_1 + ... + I_K < R_K^sum`, the quantity that upper-bounds XP outage.
/// With a seed shared between the two schemes the draws are coupled, so
/// the XP count never exceeds the INR count.
pub fn estimate_outage(cfg: &SimConfig) -> Result<OutageEstimate> {
    Ok(binomial_estimate(&outage_summary(cfg)?))
}

/// Summary behind [`estimate_outage`].
pub fn outage_summary(cfg: &SimConfig) -> Result<SimSummary> {
    let rule = match cfg.scheme {
        Scheme::Xp => DecodeRule::CrossPacket,
        Scheme::Inr => DecodeRule::IncrementalRedundancy {
            target: cfg.rates.total(),
        },
    };
    simulate(cfg, rule)
}

/// Long-run throughput with a 95% interval (delta method on the ratio estimator).
#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputEstimate {
    /// Bits per channel use.
    pub value: f64,
    pub ci_half_width: f64,
    pub summary: SimSummary,
}

/// Renewal-reward throughput by simulation.
///
/// INR cycles carry one message of rate `R_1` and decode once the
/// accumulated information reaches `R_1`.
pub fn estimate_throughput(cfg: &SimConfig) -> Result<ThroughputEstimate> {
    let rule = match cfg.scheme {
        Scheme::Xp => DecodeRule::CrossPacket,
        Scheme::Inr => DecodeRule::IncrementalRedundancy {
            target: cfg.rates.rate(1),
        },
    };
    let summary = simulate(cfg, rule)?;
    let n = summary.trials as f64;
    let eta = summary.delivered_rate_total / summary.slots_total as f64;
    let k = cfg.rates.rounds() as f64;
    let mut sq = summary.outage_count as f64 * (eta * k).powi(2);
    for (i, count) in summary.success_at_round.iter().enumerate() {
        let d = reward(cfg, i + 1) - eta * (i + 1) as f64;
        sq += *count as f64 * d * d;
    }
    let mean_len = summary.slots_total as f64 / n;
    let se = (sq / n).sqrt() / (n.sqrt() * mean_len);
    Ok(ThroughputEstimate {
        value: eta,
        ci_half_width: Z95 * se,
        summary,
    })
}

/// Throughput from a chain of outage probabilities `P_out,1 .. P_out,K`.
///
/// XP: `sum_k R_k^sum (P_{k-1} - P_k) / sum_{k<K} P_k`;
/// INR: `R_1 (1 - P_K) / sum_{k<K} P_k`, with `P_0 = 1`.
pub fn throughput_analytical(scheme: Scheme, rates: &RateSchedule, chain: &[f64]) -> Result<f64> {
    let k = rates.rounds();
    if chain.len() != k {
        return Err(Error::contract(format!(
            "outage chain has {} entries for {k} rounds",
            chain.len()
        )));
    }
    if let Some(p) = chain.iter().find(|p| !(**p >= 0.0 && **p <= 1.0)) {
        return Err(Error::domain(format!("outage probabilities must lie in [0, 1], got {p}")));
    }
    // Allow for quadrature noise in chains that are flat to rounding.
    let slack = 1e-12;
    let mut prev = 1.0;
    for p in chain {
        if *p > prev + slack {
            return Err(Error::contract(format!(
                "outage chain must be nonincreasing, found {p} after {prev}"
            )));
        }
        prev = *p;
    }
    let with_zero: Vec<f64> = std::iter::once(1.0).chain(chain.iter().copied()).collect();
    let expected_slots: f64 = with_zero[..k].iter().sum();
    let reward = match scheme {
        Scheme::Xp => (1..=k)
            .map(|i| rates.cumulative(i) * (with_zero[i - 1] - with_zero[i]))
            .sum::<f64>(),
        Scheme::Inr => rates.rate(1) * (1.0 - chain[k - 1]),
    };
    Ok(reward / expected_slots)
}

/// XP outage after each round, `[P_out,1, ..., P_out,K]`, from the exact
/// paths (closed form, two-round quadrature, nested oracle). At most four
/// rounds.
pub fn xp_outage_chain(rates: &RateSchedule, powers: &PowerProfile) -> Result<Vec<f64>> {
    powers.check_matches(rates)?;
    let k = rates.rounds();
    if k > 4 {
        return Err(Error::Unsupported(format!(
            "analytical XP outage chain supports at most 4 rounds, got {k}"
        )));
    }
    (1..=k)
        .map(|i| match i {
            1 => outage_k1(rates.rate(1), powers.snr_bar(1)),
            2 => Ok(outage_k2_exact(&rates.prefix(2)?, &powers.prefix(2)?, 1e-14)?.value),
            _ => Ok(xp_outage_quadrature(&rates.prefix(i)?, &powers.prefix(i)?, Tolerance::new(1e-14, 1e-10))?.value),
        })
        .collect()
}

/// HARQ-IR outage after each round for a single message of rate `R_1`.
pub fn inr_outage_chain(rates: &RateSchedule, powers: &PowerProfile) -> Result<Vec<f64>> {
    powers.check_matches(rates)?;
    if rates.rounds() > MAX_QUADRATURE_ROUNDS {
        return Err(Error::Unsupported(format!(
            "analytical INR outage chain supports at most {MAX_QUADRATURE_ROUNDS} rounds"
        )));
    }
    Ok(ir_sum_cdf_chain(powers, rates.rate(1), Tolerance::new(1e-14, 1e-10))?
        .into_iter()
        .map(|(p, _)| p)
        .collect())
}

/// Analytical throughput for `scheme`, building the outage chain from the
/// model.
pub fn analytical_throughput(scheme: Scheme, rates: &RateSchedule, powers: &PowerProfile) -> Result<f64> {
    let chain = match scheme {
        Scheme::Xp => xp_outage_chain(rates, powers)?,
        Scheme::Inr => inr_outage_chain(rates, powers)?,
    };
    throughput_analytical(scheme, rates, &chain)
}
