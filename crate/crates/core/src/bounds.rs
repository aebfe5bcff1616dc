//! Lower and upper bounds on the XP outage probability.
//!
//! XP outage requires `I_1 + ... + I_k < R_1 + ... + R_k` in every round, so
//! it is sandwiched between the per-round event `I_k < R_k for all k` (a
//! product of single-round outages) and the final-round event
//! `I_1 + ... + I_K < R_K^sum`, which is the HARQ-IR outage probability.
//!
//! The upper bound is computed numerically: the CDF of the accumulated
//! mutual information is built round by round as a convolution,
//! `F_k(r) = int_0^r f_{I_k}(t) F_{k-1}(r - t) dt`, with each intermediate
//! `F_{k-1}` tabulated on Chebyshev points of `[0, r]` and interpolated
//! barycentrically.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::exact::outage_k1;
use crate::model::{Method, OutageEstimate, PowerProfile, RateSchedule, Scheme, Uncertainty};
use crate::montecarlo::{estimate_outage, SimConfig};
use crate::quadrature::{try_integrate, Tolerance};

/// Product lower bound `prod_k (1 - exp(-(2^{R_k} - 1) / snr_bar_k))`.
pub fn outage_lower(rates: &RateSchedule, powers: &PowerProfile) -> Result<f64> {
    powers.check_matches(rates)?;
    rates
        .rates()
        .iter()
        .zip(powers.snr_bars())
        .try_fold(1.0, |acc, (r, g)| Ok(acc * outage_k1(*r, *g)?))
}

/// How to evaluate the HARQ-IR upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpperMethod {
    /// Recursive convolution quadrature; at most four rounds.
    Quadrature { tol: Tolerance },
    /// Simulation of the IR outage event.
    MonteCarlo { trials: u64, seed: u64, workers: usize },
}

impl Default for UpperMethod {
    fn default() -> Self {
        UpperMethod::Quadrature {
            tol: Tolerance::relative(1e-9),
        }
    }
}

/// Largest round count accepted by the convolution quadrature.
pub const MAX_QUADRATURE_ROUNDS: usize = 4;

/// HARQ-IR outage `Pr(I_1 + ... + I_K < R_K^sum)`, the upper bound on XP outage.
pub fn outage_upper_ir(rates: &RateSchedule, powers: &PowerProfile, method: UpperMethod) -> Result<OutageEstimate> {
    powers.check_matches(rates)?;
    match method {
        UpperMethod::Quadrature { tol } => {
            let (value, err) = ir_sum_cdf(powers, rates.total(), tol)?;
            let uncertainty = if rates.rounds() == 1 {
                Uncertainty::None
            } else {
                Uncertainty::Quadrature(err)
            };
            Ok(OutageEstimate {
                value: value.clamp(0.0, 1.0),
                method: Method::Upper,
                uncertainty,
            })
        }
        UpperMethod::MonteCarlo { trials, seed, workers } => {
            let cfg = SimConfig::new(Scheme::Inr, rates.clone(), powers.clone(), trials, seed, workers)?;
            let est = estimate_outage(&cfg)?;
            Ok(OutageEstimate {
                method: Method::Upper,
                ..est
            })
        }
    }
}

/// `Pr(I_1 + ... + I_K < r)` for the rounds of `powers`, with the error
/// estimate of the last convolution.
pub fn ir_sum_cdf(powers: &PowerProfile, r: f64, tol: Tolerance) -> Result<(f64, f64)> {
    let chain = ir_sum_cdf_chain(powers, r, tol)?;
    Ok(*chain.last().expect("chain has one entry per round"))
}

/// `[Pr(I_1 < r), Pr(I_1 + I_2 < r), ..., Pr(I_1 + ... + I_K < r)]`, each
/// with its quadrature error estimate (zero for the closed-form first entry).
pub fn ir_sum_cdf_chain(powers: &PowerProfile, r: f64, tol: Tolerance) -> Result<Vec<(f64, f64)>> {
    let k = powers.rounds();
    if k > MAX_QUADRATURE_ROUNDS {
        return Err(Error::Unsupported(format!(
            "convolution quadrature supports at most {MAX_QUADRATURE_ROUNDS} rounds, got {k}"
        )));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::domain(format!("rate threshold must be positive, got {r}")));
    }
    let mut chain = Vec::with_capacity(k);
    let first = IrCdf::First(powers.snr_bar(1));
    chain.push((first.eval(r), 0.0));
    let mut prev = first;
    // Nodes are tabulated two orders of magnitude tighter than the target.
    let node_tol = Tolerance::new(0.0, (tol.rel / 100.0).max(1e-13));
    for round in 2..=k {
        let g = powers.snr_bar(round);
        let res = convolve_at(&prev, g, r, tol)?;
        chain.push((res.0, res.1));
        if round < k {
            let cheb = Chebyshev::build(0.0, r, |x| Ok(convolve_at(&prev, g, x, node_tol)?.0))?;
            prev = IrCdf::Interpolated(cheb);
        }
    }
    Ok(chain)
}

/// Density of `I = log2(1 + snr)` for exponential `snr` with mean `g`.
fn info_density(t: f64, g: f64) -> f64 {
    let p = t.exp2();
    LN_2 * p * (-(p - 1.0) / g).exp() / g
}

fn convolve_at(prev: &IrCdf, g: f64, r: f64, tol: Tolerance) -> Result<(f64, f64)> {
    if r <= 0.0 {
        return Ok((0.0, 0.0));
    }
    let res = try_integrate(|t| Ok(info_density(t, g) * prev.eval(r - t)), 0.0, r, tol)?;
    Ok((res.value, res.abs_error_estimate))
}

enum IrCdf {
    /// `Pr(I_1 < r)` in closed form.
    First(f64),
    Interpolated(Chebyshev),
}

impl IrCdf {
    fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        match self {
            IrCdf::First(g) => -(-(r.exp2() - 1.0) / g).exp_m1(),
            IrCdf::Interpolated(c) => c.eval(r).max(0.0),
        }
    }
}

/// Barycentric interpolant on Chebyshev points of the second kind.
struct Chebyshev {
    a: f64,
    b: f64,
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl Chebyshev {
    const START: usize = 16;
    const MAX: usize = 1024;
    const REL_TOL: f64 = 1e-13;

    fn point(a: f64, b: f64, j: usize, n: usize) -> f64 {
        a + 0.5 * (b - a) * (1.0 - (PI * j as f64 / n as f64).cos())
    }

    /// Doubles the node count until the interpolant predicts the new nodes.
    fn build<F>(a: f64, b: f64, mut f: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let mut n = Self::START;
        let nodes: Vec<f64> = (0..=n).map(|j| Self::point(a, b, j, n)).collect();
        let values = nodes.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
        let mut cheb = Chebyshev { a, b, nodes, values };
        loop {
            let m = 2 * n;
            let fresh: Vec<(f64, f64)> = (1..m)
                .step_by(2)
                .map(|j| {
                    let x = Self::point(a, b, j, m);
                    f(x).map(|v| (x, v))
                })
                .collect::<Result<_>>()?;
            let scale = cheb
                .values
                .iter()
                .chain(fresh.iter().map(|(_, v)| v))
                .fold(0.0f64, |acc, v| acc.max(v.abs()));
            let worst = fresh
                .iter()
                .map(|(x, v)| (cheb.eval(*x) - v).abs())
                .fold(0.0f64, f64::max);
            // Interleave to keep nodes in Chebyshev order for the weights.
            let mut nodes = Vec::with_capacity(m + 1);
            let mut values = Vec::with_capacity(m + 1);
            for j in 0..=n {
                nodes.push(cheb.nodes[j]);
                values.push(cheb.values[j]);
                if j < n {
                    nodes.push(fresh[j].0);
                    values.push(fresh[j].1);
                }
            }
            cheb = Chebyshev { a, b, nodes, values };
            n = m;
            if worst <= Self::REL_TOL * scale || scale == 0.0 {
                return Ok(cheb);
            }
            if n >= Self::MAX {
                return Err(Error::Convergence {
                    what: "Chebyshev tabulation of the IR sum CDF",
                    estimate: scale,
                    error: worst,
                });
            }
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.nodes.len() - 1;
        let x = x.clamp(self.a, self.b);
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, (&xj, &fj)) in self.nodes.iter().zip(&self.values).enumerate() {
            let d = x - xj;
            if d == 0.0 {
                return fj;
            }
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n {
                w *= 0.5;
            }
            let w = w / d;
            num += w * fj;
            den += w;
        }
        num / den
    }
}
