//! High-SNR behaviour of the XP outage probability.
//!
//! For `K` rounds the dominant term is
//! `P_out,K ~ hbar_{K,1}(1) / (snr_bar_1 ... snr_bar_K)`, where the family
//!
//! ```text
//! hbar_{K,K}(x) = 2^{R_K^sum} - x
//! hbar_{K,k}(x) = int_x^{2^{R_k^sum}} t^{-1} hbar_{K,k+1}(t) dt
//!               = (-1)^{K-k+1} x + sum_{i=0}^{K-k} c_{k,i} (ln x)^i
//! ```
//!
//! is tabulated by [`HbarTable`]. The coefficient recursion is
//! `c_{k,i} = -c_{k+1,i-1} / i` for `i >= 1`, which follows from
//! `int t^{-1} (ln t)^{i-1} dt = (ln t)^i / i`.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::model::{PowerProfile, RateSchedule};

fn check_inputs(r1: f64, r2: f64, g1: f64, g2: f64) -> Result<()> {
    for (name, v) in [("R1", r1), ("R2", r2), ("snr_bar1", g1), ("snr_bar2", g2)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::domain(format!("{name} must be positive and finite, got {v}")));
        }
    }
    Ok(())
}

/// High-SNR approximation of `phi(R_1, R_2)`, accurate to `o(1/(snr_bar_1 snr_bar_2))`.
pub fn phi_asymptotic(r1: f64, r2: f64, snr_bar1: f64, snr_bar2: f64) -> Result<f64> {
    check_inputs(r1, r2, snr_bar1, snr_bar2)?;
    let (g1, g2) = (snr_bar1, snr_bar2);
    let top = (r1 + r2).exp2();
    let bracket = (-(r2.exp2() - 1.0) / g2).exp() - (-(top - 1.0) / g2).exp();
    Ok((1.0 / g1).exp() * bracket - (1.0 / g1 + 1.0 / g2).exp() * top * r1 * LN_2 / (g1 * g2))
}

/// Leading-order two-round outage `(2^{R_1+R_2} R_1 ln 2 - (2^{R_1} - 1)) / (snr_bar_1 snr_bar_2)`.
pub fn outage_k2_asymptotic(rates: &RateSchedule, powers: &PowerProfile) -> Result<f64> {
    powers.check_matches(rates)?;
    if rates.rounds() != 2 {
        return Err(Error::Unsupported(format!(
            "two-round asymptote needs K = 2, got K = {}",
            rates.rounds()
        )));
    }
    let (r1, r2) = (rates.rate(1), rates.rate(2));
    let coefficient = (r1 + r2).exp2() * r1 * LN_2 - (r1.exp2() - 1.0);
    Ok(coefficient / (powers.snr_bar(1) * powers.snr_bar(2)))
}

/// Coefficients `c_{k,i}` of the log-polynomials `hbar_{K,k}`.
///
/// Row `k` (1-based) holds `c_{k,0} .. c_{k,K-k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HbarTable {
    rounds: usize,
    coeffs: Vec<Vec<f64>>,
    rates: RateSchedule,
}

impl HbarTable {
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn rates(&self) -> &RateSchedule {
        &self.rates
    }

    /// `c_{k,i}`; panics when out of range.
    pub fn coeff(&self, k: usize, i: usize) -> f64 {
        self.coeffs[k - 1][i]
    }

    /// Row `k` of the table, `c_{k,0} .. c_{k,K-k}`.
    pub fn row(&self, k: usize) -> &[f64] {
        &self.coeffs[k - 1]
    }
}

/// Fills the coefficient table from `c_{K,0} = 2^{R_K^sum}` downwards.
pub fn build_hbar_table(rates: &RateSchedule) -> Result<HbarTable> {
    let big_k = rates.rounds();
    if big_k < 2 {
        return Err(Error::contract(format!("coefficient table needs K >= 2, got K = {big_k}")));
    }
    let mut coeffs: Vec<Vec<f64>> = vec![Vec::new(); big_k];
    coeffs[big_k - 1] = vec![rates.total().exp2()];
    for k in (1..big_k).rev() {
        let next = &coeffs[k];
        let upper = rates.cumulative(k).exp2();
        let log_upper = rates.cumulative(k) * LN_2;
        let sign = if (big_k - k) % 2 == 0 { 1.0 } else { -1.0 };
        let mut row = vec![0.0; big_k - k + 1];
        let mut power = log_upper;
        let mut c0 = sign * upper;
        for (i, c) in next.iter().enumerate() {
            c0 += c * power / (i + 1) as f64;
            power *= log_upper;
        }
        row[0] = c0;
        for i in 1..=big_k - k {
            row[i] = -next[i - 1] / i as f64;
        }
        coeffs[k - 1] = row;
    }
    Ok(HbarTable {
        rounds: big_k,
        coeffs,
        rates: rates.clone(),
    })
}

/// Evaluates `hbar_{K,k}(x)` from the table (Horner in `ln x`).
pub fn hbar_eval(table: &HbarTable, k: usize, x: f64) -> Result<f64> {
    let big_k = table.rounds;
    if k == 0 || k > big_k {
        return Err(Error::contract(format!("index k = {k} outside 1..={big_k}")));
    }
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::domain(format!("hbar is defined for x > 0, got {x}")));
    }
    let sign = if (big_k - k + 1) % 2 == 0 { 1.0 } else { -1.0 };
    let lx = x.ln();
    let poly = table.row(k).iter().rev().fold(0.0, |acc, c| acc * lx + c);
    Ok(sign * x + poly)
}

/// Dominant-term outage `hbar_{K,1}(1) / prod_k snr_bar_k` for `K >= 2`.
pub fn outage_asymptotic_general(rates: &RateSchedule, powers: &PowerProfile) -> Result<f64> {
    powers.check_matches(rates)?;
    let table = build_hbar_table(rates)?;
    let scale: f64 = powers.snr_bars().iter().map(|g| 1.0 / g).product();
    Ok(scale * hbar_eval(&table, 1, 1.0)?)
}

/// Least-squares line through `(log10 snr_bar, log10 outage)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    /// `(snr_bar_dB, outage)` pairs used for the fit.
    pub points: Vec<(f64, f64)>,
    /// Slope in decades of outage per decade of SNR.
    pub slope: f64,
    pub intercept: f64,
}

impl SlopeFit {
    /// Diversity order, `-slope`.
    pub fn diversity_order(&self) -> f64 {
        -self.slope
    }
}

/// Fits the log-log slope of outage against linear average SNR.
pub fn diversity_order_fit(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(Error::contract(format!("slope fit needs at least 3 points, got {}", points.len())));
    }
    if let Some((g, p)) = points.iter().find(|(g, p)| !(*g > 0.0 && *p > 0.0)) {
        return Err(Error::domain(format!(
            "log-log fit needs positive SNR and outage, got ({g}, {p})"
        )));
    }
    if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::contract("SNR values must be strictly increasing"));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(g, _)| g.log10()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, p)| p.log10()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok(SlopeFit {
        points: points.iter().map(|(g, p)| (10.0 * g.log10(), *p)).collect(),
        slope,
        intercept: my - slope * mx,
    })
}

/// The default high-SNR fitting window: 50 to 70 dB in 5 dB steps.
pub fn default_fit_window_db() -> Vec<f64> {
    vec![50.0, 55.0, 60.0, 65.0, 70.0]
}
