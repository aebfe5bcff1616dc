//! Exact outage probabilities for one and two rounds.
//!
//! With `a_k = (2^{R_k} - 1) / snr_bar_k` and `S = R_1 + R_2`, the two-round
//! outage probability is
//!
//! ```text
//! P = (1 - e^{-a_1})(1 - e^{-a_2}) + e^{-a_2} - e^{-(2^S - 1)/snr_bar_2} - phi(R_1, R_2)
//! phi = e^{1/snr_bar_1 + 1/snr_bar_2} / snr_bar_2
//!       * int_{2^{R_2}}^{2^S} exp(-2^S / (z snr_bar_1) - z / snr_bar_2) dz
//! ```
//!
//! `phi` is also available through its Mellin-Barnes representation as a
//! difference of two upper incomplete Fox H functions `H^{1,1}_{1,1}`, see
//! [`phi_foxh`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{clamp_probability, Method, OutageEstimate, PowerProfile, RateSchedule, Uncertainty};
use crate::quadrature::{integrate_adaptive, IntegrationResult, Tolerance};
use crate::special::{gamma, upper_incomplete_gamma};

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::domain(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

/// Single-round outage `1 - exp(-(2^R - 1) / snr_bar)`.
pub fn outage_k1(rate: f64, snr_bar: f64) -> Result<f64> {
    check_positive("rate", rate)?;
    check_positive("average SNR", snr_bar)?;
    Ok(-(-(rate.exp2() - 1.0) / snr_bar).exp_m1())
}

/// `phi(R_1, R_2)` by adaptive quadrature of its defining integral.
///
/// `tol` is an absolute tolerance in `(0, 1e-3]`.
pub fn phi_quadrature(r1: f64, r2: f64, snr_bar1: f64, snr_bar2: f64, tol: f64) -> Result<IntegrationResult> {
    check_positive("R1", r1)?;
    check_positive("R2", r2)?;
    check_positive("snr_bar1", snr_bar1)?;
    check_positive("snr_bar2", snr_bar2)?;
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(Error::domain(format!("tolerance must lie in (0, 1e-3], got {tol}")));
    }
    let top = (r1 + r2).exp2();
    let lo = r2.exp2();
    let shift = 1.0 / snr_bar1 + 1.0 / snr_bar2;
    // Fold the prefactor into the exponent to avoid overflow at low SNR.
    let res = integrate_adaptive(
        |z| (shift - top / (z * snr_bar1) - z / snr_bar2).exp() / snr_bar2,
        lo,
        top,
        Tolerance::new(tol, 1e-13),
    )?;
    Ok(res)
}

/// Two-round exact XP outage probability.
///
/// The last three terms of the closed form nearly cancel at high SNR (each
/// is `O(1/snr)` while the outage is `O(1/snr^2)`), so they are combined
/// analytically into one nonnegative integral
///
/// ```text
/// e^{-a_2} - e^{-(2^S-1)/snr_bar_2} - phi
///   = int_{2^{R_2}}^{2^S} e^{-(z-1)/snr_bar_2} (1 - e^{-(2^S/z - 1)/snr_bar_1}) dz / snr_bar_2
/// ```
///
/// before integrating. `tol` is an absolute tolerance; a relative
/// tolerance of `1e-12` applies as well so that deep-tail values keep their
/// significant digits.
pub fn outage_k2_exact(rates: &RateSchedule, powers: &PowerProfile, tol: f64) -> Result<OutageEstimate> {
    powers.check_matches(rates)?;
    if rates.rounds() != 2 {
        return Err(Error::Unsupported(format!(
            "exact outage is available for K = 2 only, got K = {}",
            rates.rounds()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    let (r1, r2) = (rates.rate(1), rates.rate(2));
    let (g1, g2) = (powers.snr_bar(1), powers.snr_bar(2));
    let first = outage_k1(r1, g1)? * outage_k1(r2, g2)?;
    let top = (r1 + r2).exp2();
    let deficit = integrate_adaptive(
        |z| {
            let second = -(-(top / z - 1.0) / g1).exp_m1();
            (-(z - 1.0) / g2).exp() * second / g2
        },
        r2.exp2(),
        top,
        Tolerance::new(tol, 1e-12),
    )?;
    let value = clamp_probability(first + deficit.value, tol)?;
    Ok(OutageEstimate {
        value,
        method: Method::Exact,
        uncertainty: Uncertainty::Quadrature(deficit.abs_error_estimate),
    })
}

/// Contour parameters for one upper incomplete Fox H evaluation
/// `H^{1,1}_{1,1}[z | (0,-1,b); (0,1,0)] = (1/2 pi i) int Gamma(s) Gamma(s+1, b) z^{-s} ds`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoxHParams11 {
    pub z: f64,
    pub b: f64,
    /// Real part of the vertical contour.
    pub contour_c: f64,
    /// The contour is truncated to `|Im s| <= contour_halfspan`.
    pub contour_halfspan: f64,
    /// Initial number of nodes on the truncated contour.
    pub nodes: usize,
}

impl Default for FoxHParams11 {
    /// Default contour (`c = 0.5`, half-span 60, 64 initial nodes) at `z = 1`, `b = 0`.
    fn default() -> Self {
        Self::new(1.0, 0.0)
    }
}

impl FoxHParams11 {
    pub fn new(z: f64, b: f64) -> Self {
        Self {
            z,
            b,
            contour_c: 0.5,
            contour_halfspan: 60.0,
            nodes: 64,
        }
    }

    fn validate(&self) -> Result<()> {
        check_positive("Fox H argument z", self.z)?;
        if !(self.b >= 0.0 && self.b.is_finite()) {
            return Err(Error::domain(format!("Fox H shift b must be >= 0, got {}", self.b)));
        }
        check_positive("contour abscissa c", self.contour_c)?;
        check_positive("contour half-span", self.contour_halfspan)?;
        if self.nodes < 64 {
            return Err(Error::domain(format!("need at least 64 contour nodes, got {}", self.nodes)));
        }
        Ok(())
    }
}

/// Relative agreement required between two successive contour refinements.
const CONTOUR_AGREEMENT: f64 = 1e-8;
const CONTOUR_MAX_DOUBLINGS: usize = 8;

/// Upper incomplete Fox H function `H^{1,1}_{1,1}` by numerical
/// Mellin-Barnes integration along `Re(s) = c`.
///
/// The integrand is conjugate-symmetric in `Im(s)`, so only the upper half
/// of the line is sampled. The trapezoidal rule is used on the truncated
/// line (the integrand decays like `exp(-pi |t| / 2)`), doubling the node
/// count until two successive refinements agree.
pub fn foxh_upper_incomplete_11(params: &FoxHParams11) -> Result<f64> {
    params.validate()?;
    let FoxHParams11 {
        z,
        b,
        contour_c: c,
        contour_halfspan: span,
        nodes,
    } = *params;
    let ln_z = z.ln();
    let integrand = |t: f64| -> Result<f64> {
        let s = Complex64::new(c, t);
        let inc = upper_incomplete_gamma(s + 1.0, b)?;
        let zs = (-s * ln_z).exp();
        Ok((gamma(s) * inc * zs).re)
    };
    // Half-line [0, span] with `n` intervals; f(0) counts once in the
    // symmetric sum, f(t>0) twice.
    let mut n = nodes;
    let mut h = span / n as f64;
    let mut sum = 0.5 * integrand(0.0)? + 0.5 * integrand(span)?;
    for i in 1..n {
        sum += integrand(i as f64 * h)?;
    }
    let mut prev = sum * h / PI;
    let mut best_diff = f64::INFINITY;
    for _ in 0..CONTOUR_MAX_DOUBLINGS {
        let mut mid = 0.0;
        for i in 0..n {
            mid += integrand((i as f64 + 0.5) * h)?;
        }
        sum += mid;
        n *= 2;
        h *= 0.5;
        let cur = sum * h / PI;
        let diff = (cur - prev).abs();
        // Absolute floor for values that are zero to double precision.
        if diff <= CONTOUR_AGREEMENT * cur.abs() || diff <= 1e-16 {
            return Ok(cur);
        }
        best_diff = diff;
        prev = cur;
    }
    Err(Error::Convergence {
        what: "Mellin-Barnes contour integral",
        estimate: prev,
        error: best_diff,
    })
}

/// `phi(R_1, R_2)` as `e^{1/snr_bar_1 + 1/snr_bar_2}` times the difference of
/// two incomplete Fox H functions sharing `z = 2^{R_1+R_2} / (snr_bar_1 snr_bar_2)`
/// with shifts `2^{R_2}/snr_bar_2` and `2^{R_1+R_2}/snr_bar_2`.
///
/// `template` supplies the contour settings; its `z` and `b` are ignored.
pub fn phi_foxh(r1: f64, r2: f64, snr_bar1: f64, snr_bar2: f64, template: &FoxHParams11) -> Result<f64> {
    check_positive("R1", r1)?;
    check_positive("R2", r2)?;
    check_positive("snr_bar1", snr_bar1)?;
    check_positive("snr_bar2", snr_bar2)?;
    let top = (r1 + r2).exp2();
    let z = top / (snr_bar1 * snr_bar2);
    let near = FoxHParams11 {
        z,
        b: r2.exp2() / snr_bar2,
        ..*template
    };
    let far = FoxHParams11 {
        b: top / snr_bar2,
        ..near
    };
    let h_near = foxh_upper_incomplete_11(&near)?;
    let h_far = foxh_upper_incomplete_11(&far)?;
    Ok((1.0 / snr_bar1 + 1.0 / snr_bar2).exp() * (h_near - h_far))
}

/// Closed-form assembly of the two-round outage from a supplied `phi`.
pub fn outage_k2_from_phi(rates: &RateSchedule, powers: &PowerProfile, phi: f64) -> Result<f64> {
    powers.check_matches(rates)?;
    if rates.rounds() != 2 {
        return Err(Error::Unsupported("two-round assembly needs K = 2".into()));
    }
    let (r1, r2) = (rates.rate(1), rates.rate(2));
    let (g1, g2) = (powers.snr_bar(1), powers.snr_bar(2));
    let e2 = (-(r2.exp2() - 1.0) / g2).exp();
    let es = (-((r1 + r2).exp2() - 1.0) / g2).exp();
    Ok(outage_k1(r1, g1)? * outage_k1(r2, g2)? + e2 - es - phi)
}
