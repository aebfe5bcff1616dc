//! Adaptive quadrature and the nested exact-outage oracle.
//!
//! The 1-D integrator is a globally adaptive 7/15-point Gauss-Kronrod rule
//! with the QUADPACK error heuristic. Everything numerical in the crate that
//! is not a closed form ends up here.
//!
//! The oracle evaluates the XP outage probability in the product variables
//! `x_k = (1 + snr_1) ... (1 + snr_k)`, for which the outage region is the
//! simplex-like set `x_{k-1} < x_k < 2^{R_k^sum}` with `x_0 = 1`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::model::{Method, OutageEstimate, PowerProfile, RateSchedule, Uncertainty};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Default cap on the number of subintervals.
pub const MAX_SUBINTERVALS: usize = 2000;

/// Stopping rule: the error estimate must fall below `max(abs, rel * |I|)`.
///
/// A pure absolute tolerance is useless for deep-tail probabilities (values
/// around 1e-15 and below), so most callers in this crate pass a relative
/// component as well.
const REL_FLOOR: f64 = 100.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    pub fn absolute(abs: f64) -> Self {
        Self { abs, rel: 0.0 }
    }

    pub fn relative(rel: f64) -> Self {
        Self { abs: 0.0, rel }
    }

    /// Tightened by `factor` in both components.
    pub fn tightened(self, factor: f64) -> Self {
        Self {
            abs: self.abs / factor,
            rel: self.rel / factor,
        }
    }

    /// Relative requests are capped at 100 machine epsilons, twice the
    /// roundoff floor built into the Kronrod error estimate.
    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel.max(REL_FLOOR) * value.abs())
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs >= 0.0 && self.rel >= 0.0) || (self.abs == 0.0 && self.rel == 0.0) {
            return Err(Error::domain(format!(
                "tolerance must be nonnegative and not both zero, got abs={} rel={}",
                self.abs, self.rel
            )));
        }
        Ok(())
    }
}

impl From<f64> for Tolerance {
    fn from(abs: f64) -> Self {
        Tolerance::absolute(abs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = (fc * WGK[7]).abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (1.0f64).min((200.0 * err / res_asc).powf(1.5));
    }
    let round_off = 50.0 * f64::EPSILON * res_abs;
    if round_off > f64::MIN_POSITIVE {
        err = err.max(round_off);
    }
    if !value.is_finite() {
        return Err(Error::domain("integrand is not finite on the integration interval"));
    }
    Ok((value, err))
}

/// Fallible adaptive integration; the integrand may abort with an error.
pub fn try_integrate<F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<IntegrationResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    try_integrate_with_limit(&mut f, a, b, tol, MAX_SUBINTERVALS)
}

pub(crate) fn try_integrate_with_limit<F>(
    f: &mut F,
    a: f64,
    b: f64,
    tol: Tolerance,
    limit: usize,
) -> Result<IntegrationResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    tol.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integration limits must be finite"));
    }
    if a > b {
        return Err(Error::domain(format!("integration limits out of order: {a} > {b}")));
    }
    if a == b {
        return Ok(IntegrationResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let (value, error) = gk15(f, a, b)?;
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    while total_err > tol.target(total) {
        if heap.len() >= limit {
            return Err(Error::Convergence {
                what: "adaptive quadrature",
                estimate: total,
                error: total_err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in floating point.
            return Err(Error::Convergence {
                what: "adaptive quadrature",
                estimate: total,
                error: total_err,
            });
        }
        let (v1, e1) = gk15(f, worst.a, mid)?;
        let (v2, e2) = gk15(f, mid, worst.b)?;
        evaluations += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
        // Re-sum occasionally to stop drift in the running totals.
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let abs_error_estimate: f64 = heap.iter().map(|s| s.error).sum();
    Ok(IntegrationResult {
        value,
        abs_error_estimate,
        evaluations,
    })
}

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// Fails with [`Error::Convergence`] (carrying the best estimate) when the
/// subdivision budget runs out before the tolerance is met.
pub fn integrate_adaptive<F>(mut f: F, a: f64, b: f64, tol: impl Into<Tolerance>) -> Result<IntegrationResult>
where
    F: FnMut(f64) -> f64,
{
    try_integrate(|x| Ok(f(x)), a, b, tol.into())
}

/// Joint density of the product variables `x_k = prod_{l<=k} (1 + snr_l)`.
///
/// Zero outside the support `1 <= x_1 <= x_2 <= ...`.
pub fn joint_density_x(x: &[f64], powers: &PowerProfile) -> Result<f64> {
    if x.len() != powers.rounds() {
        return Err(Error::contract(format!(
            "point has {} coordinates but power profile has {} rounds",
            x.len(),
            powers.rounds()
        )));
    }
    let mut density = 1.0;
    let mut prev = 1.0;
    for (k, &xk) in x.iter().enumerate() {
        if !(xk >= prev) {
            return Ok(0.0);
        }
        let g = powers.snr_bar(k + 1);
        // Jacobian factor 1 / x_{k-1}; x_0 = 1 contributes nothing.
        density *= (-(xk / prev - 1.0) / g).exp() / (g * prev);
        prev = xk;
    }
    Ok(density)
}

/// Exact XP outage probability by nested quadrature over the product
/// variables. Supports up to four rounds.
///
/// The last variable is integrated in closed form; each remaining level is
/// mapped to `[0, 1]` and integrated adaptively with a tolerance ten times
/// tighter than the level above it.
pub fn xp_outage_quadrature(
    rates: &RateSchedule,
    powers: &PowerProfile,
    tol: impl Into<Tolerance>,
) -> Result<OutageEstimate> {
    let tol = tol.into();
    tol.validate()?;
    powers.check_matches(rates)?;
    let k = rates.rounds();
    if k > 4 {
        return Err(Error::Unsupported(format!(
            "nested quadrature oracle supports at most 4 rounds, got {k}"
        )));
    }
    let upper: Vec<f64> = (1..=k).map(|i| rates.cumulative(i).exp2()).collect();
    let snr: Vec<f64> = powers.snr_bars().to_vec();
    let res = xp_level(0, 1.0, &upper, &snr, tol)?;
    Ok(OutageEstimate {
        value: res.value.clamp(0.0, 1.0),
        method: Method::Oracle,
        uncertainty: Uncertainty::Quadrature(res.abs_error_estimate),
    })
}

/// Probability that rounds `level+1..K` all stay in outage given `x_level = prev`.
fn xp_level(
    level: usize,
    prev: f64,
    upper: &[f64],
    snr: &[f64],
    tol: Tolerance,
) -> Result<IntegrationResult> {
    let k = upper.len();
    let hi = upper[level];
    let g = snr[level];
    if level + 1 == k {
        // Conditional CDF of x_K given x_{K-1}: 1 - exp(-(hi/prev - 1)/g).
        let value = if hi > prev {
            -(-(hi / prev - 1.0) / g).exp_m1()
        } else {
            0.0
        };
        return Ok(IntegrationResult {
            value,
            abs_error_estimate: 0.0,
            evaluations: 1,
        });
    }
    if hi <= prev {
        return Ok(IntegrationResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let width = hi - prev;
    let inner_tol = tol.tightened(10.0);
    try_integrate(
        |u| {
            let x = prev + u * width;
            let cond = (-(x / prev - 1.0) / g).exp() / (g * prev);
            let inner = xp_level(level + 1, x, upper, snr, inner_tol)?;
            Ok(width * cond * inner.value)
        },
        0.0,
        1.0,
        tol,
    )
}

/// Dominant high-SNR outage coefficient computed directly from its defining
/// nested integral (no recursion), i.e.
/// `int_{x_{k-1}}^{2^{R_k^sum}} x_k^{-1} ... (2^{R_K^sum} - x_{K-1}) dx`,
/// evaluated for the chain starting at round `k` (1-based) from `x`.
///
/// This is the independent reference for the recursive coefficient table.
pub fn hbar_quadrature(rates: &RateSchedule, k: usize, x: f64, tol: impl Into<Tolerance>) -> Result<IntegrationResult> {
    let tol = tol.into();
    tol.validate()?;
    let big_k = rates.rounds();
    if big_k < 2 || k == 0 || k > big_k {
        return Err(Error::contract(format!(
            "need 2 <= K and 1 <= k <= K, got K={big_k}, k={k}"
        )));
    }
    let upper: Vec<f64> = (1..=big_k).map(|i| rates.cumulative(i).exp2()).collect();
    hbar_level(k, x, &upper, tol)
}

fn hbar_level(k: usize, x: f64, upper: &[f64], tol: Tolerance) -> Result<IntegrationResult> {
    let big_k = upper.len();
    let exact = |value: f64| IntegrationResult {
        value,
        abs_error_estimate: 0.0,
        evaluations: 1,
    };
    if k == big_k {
        return Ok(exact(upper[big_k - 1] - x));
    }
    let hi = upper[k - 1];
    if k + 1 == big_k {
        // int_x^hi t^{-1} (U_K - t) dt
        return Ok(exact(upper[big_k - 1] * (hi / x).ln() - (hi - x)));
    }
    let inner_tol = tol.tightened(10.0);
    try_integrate(
        |t| Ok(hbar_level(k + 1, t, upper, inner_tol)?.value / t),
        x,
        hi,
        tol,
    )
}
