//! Domain types and the per-realization protocol semantics.
//!
//! A HARQ cycle spans at most `K` rounds. In round `k` the receiver has
//! accumulated `I_1 + ... + I_k` bits/channel-use of mutual information,
//! where `I_l = log2(1 + snr_l)`. XP-HARQ decodes in round `k` once that sum
//! reaches the cumulative rate `R_1 + ... + R_k`; a cycle is in outage when
//! the sum stays strictly below the cumulative rate in every round.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Converts an SNR in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Per-round incremental rates `R_1..R_K` in bits/channel-use.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSchedule {
    rates: Vec<f64>,
    cumulative: Vec<f64>,
}

impl RateSchedule {
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::domain("rate schedule needs at least one round"));
        }
        if let Some(r) = rates.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return Err(Error::domain(format!("rates must be positive and finite, got {r}")));
        }
        let cumulative = rates
            .iter()
            .scan(0.0, |acc, r| {
                *acc += r;
                Some(*acc)
            })
            .collect();
        Ok(Self { rates, cumulative })
    }

    /// Number of rounds `K`.
    pub fn rounds(&self) -> usize {
        self.rates.len()
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    /// Incremental rate of round `k` (1-based).
    pub fn rate(&self, k: usize) -> f64 {
        self.rates[k - 1]
    }

    /// Cumulative rate `R_1 + ... + R_k` (1-based `k`); `cumulative(0) == 0`.
    pub fn cumulative(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// Cumulative rate after the last round.
    pub fn total(&self) -> f64 {
        self.cumulative[self.cumulative.len() - 1]
    }

    /// Schedule truncated to its first `k` rounds.
    pub fn prefix(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.rounds() {
            return Err(Error::contract(format!(
                "prefix length {k} outside 1..={}",
                self.rounds()
            )));
        }
        Self::new(self.rates[..k].to_vec())
    }

    /// Same schedule with the first-round rate replaced.
    pub fn with_first_rate(&self, r1: f64) -> Result<Self> {
        let mut rates = self.rates.clone();
        rates[0] = r1;
        Self::new(rates)
    }
}

/// Average received SNR per round, linear scale (`P_k / sigma^2`).
#[derive(Debug, Clone, PartialEq)]
pub struct PowerProfile {
    snr_bars: Vec<f64>,
}

impl PowerProfile {
    pub fn new(snr_bars: Vec<f64>) -> Result<Self> {
        if snr_bars.is_empty() {
            return Err(Error::domain("power profile needs at least one round"));
        }
        if let Some(g) = snr_bars.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
            return Err(Error::domain(format!("average SNRs must be positive and finite, got {g}")));
        }
        Ok(Self { snr_bars })
    }

    /// The same average SNR in each of `rounds` rounds.
    pub fn uniform(snr_bar: f64, rounds: usize) -> Result<Self> {
        Self::new(vec![snr_bar; rounds])
    }

    /// Builds a profile from per-round values in dB.
    pub fn from_db(db: &[f64]) -> Result<Self> {
        Self::new(db.iter().map(|d| db_to_linear(*d)).collect())
    }

    pub fn rounds(&self) -> usize {
        self.snr_bars.len()
    }

    pub fn snr_bars(&self) -> &[f64] {
        &self.snr_bars
    }

    /// Average SNR of round `k` (1-based).
    pub fn snr_bar(&self, k: usize) -> f64 {
        self.snr_bars[k - 1]
    }

    pub fn prefix(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.rounds() {
            return Err(Error::contract(format!(
                "prefix length {k} outside 1..={}",
                self.rounds()
            )));
        }
        Self::new(self.snr_bars[..k].to_vec())
    }

    pub(crate) fn check_matches(&self, rates: &RateSchedule) -> Result<()> {
        if self.rounds() != rates.rounds() {
            return Err(Error::contract(format!(
                "rate schedule has {} rounds but power profile has {}",
                rates.rounds(),
                self.rounds()
            )));
        }
        Ok(())
    }
}

/// One channel realization: instantaneous received SNR per round.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrRealization {
    snrs: Vec<f64>,
}

impl SnrRealization {
    pub fn new(snrs: Vec<f64>) -> Result<Self> {
        if let Some(g) = snrs.iter().find(|g| !(**g >= 0.0)) {
            return Err(Error::domain(format!("instantaneous SNR must be nonnegative, got {g}")));
        }
        Ok(Self { snrs })
    }

    pub fn snrs(&self) -> &[f64] {
        &self.snrs
    }

    pub fn rounds(&self) -> usize {
        self.snrs.len()
    }

    fn check_matches(&self, rates: &RateSchedule) -> Result<()> {
        if self.rounds() != rates.rounds() {
            return Err(Error::contract(format!(
                "rate schedule has {} rounds but realization has {}",
                rates.rounds(),
                self.rounds()
            )));
        }
        Ok(())
    }
}

/// `log2(1 + snr)` in bits/channel-use.
pub fn mutual_information(snr: f64) -> Result<f64> {
    if !(snr >= 0.0) {
        return Err(Error::domain(format!("SNR must be nonnegative, got {snr}")));
    }
    Ok(snr.ln_1p() / std::f64::consts::LN_2)
}

/// First round in which XP-HARQ decodes, or `None` for an outage.
///
/// Equality of accumulated information and accumulated rate counts as a
/// success; outage is the strict `<` event in every round.
pub fn xp_success_round(rates: &RateSchedule, real: &SnrRealization) -> Result<Option<usize>> {
    real.check_matches(rates)?;
    Ok(xp_success_round_unchecked(rates, real.snrs()))
}

pub(crate) fn xp_success_round_unchecked(rates: &RateSchedule, snrs: &[f64]) -> Option<usize> {
    let mut info = 0.0;
    for (k, g) in snrs.iter().enumerate() {
        info += g.ln_1p() / std::f64::consts::LN_2;
        if info >= rates.cumulative(k + 1) {
            return Some(k + 1);
        }
    }
    None
}

/// First round in which the accumulated mutual information reaches `target`
/// (HARQ-IR decoding a single message of rate `target`).
pub(crate) fn ir_success_round_unchecked(target: f64, snrs: &[f64]) -> Option<usize> {
    let mut info = 0.0;
    for (k, g) in snrs.iter().enumerate() {
        info += g.ln_1p() / std::f64::consts::LN_2;
        if info >= target {
            return Some(k + 1);
        }
    }
    None
}

/// HARQ-IR outage after all rounds: total mutual information strictly below
/// the total rate.
pub fn ir_outage_event(rates: &RateSchedule, real: &SnrRealization) -> Result<bool> {
    real.check_matches(rates)?;
    let info: f64 = real
        .snrs()
        .iter()
        .map(|g| g.ln_1p() / std::f64::consts::LN_2)
        .sum();
    Ok(info < rates.total())
}

/// HARQ flavour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Cross-packet HARQ: each retransmission adds a new message.
    Xp,
    /// Incremental-redundancy HARQ.
    Inr,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Xp => "xp",
            Scheme::Inr => "inr",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "xp" => Ok(Scheme::Xp),
            "inr" | "ir" => Ok(Scheme::Inr),
            other => Err(Error::domain(format!("unknown scheme '{other}' (expected xp or inr)"))),
        }
    }
}

/// How an outage value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    Asymptotic,
    Lower,
    Upper,
    MonteCarlo,
    Oracle,
    Analytical,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Exact,
        Method::Asymptotic,
        Method::Lower,
        Method::Upper,
        Method::MonteCarlo,
        Method::Oracle,
        Method::Analytical,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Asymptotic => "asymptotic",
            Method::Lower => "lower",
            Method::Upper => "upper",
            Method::MonteCarlo => "mc",
            Method::Oracle => "oracle",
            Method::Analytical => "analytical",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::domain(format!("unknown method '{s}'")))
    }
}

/// Uncertainty attached to an [`OutageEstimate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Uncertainty {
    /// Absolute error estimate of a deterministic quadrature.
    Quadrature(f64),
    /// Half-width of a 95% confidence interval.
    Confidence95(f64),
    /// Closed form; exact up to rounding, or an asymptotic expression with
    /// no error model.
    None,
}

impl Uncertainty {
    pub fn value(self) -> f64 {
        match self {
            Uncertainty::Quadrature(e) | Uncertainty::Confidence95(e) => e,
            Uncertainty::None => 0.0,
        }
    }
}

/// A probability together with where it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub value: f64,
    pub method: Method,
    pub uncertainty: Uncertainty,
}

impl OutageEstimate {
    pub fn closed_form(value: f64, method: Method) -> Self {
        Self {
            value,
            method,
            uncertainty: Uncertainty::None,
        }
    }
}

/// Applies the clamp-vs-error rule to an assembled probability.
pub(crate) fn clamp_probability(value: f64, tol: f64) -> Result<f64> {
    if value.is_nan() || value < -tol || value > 1.0 + tol {
        return Err(Error::Consistency { value, tol });
    }
    Ok(value.clamp(0.0, 1.0))
}
