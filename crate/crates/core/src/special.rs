//! Special functions on the Mellin-Barnes contour.
//!
//! The upper incomplete gamma function of complex order is evaluated by
//! integrating along the real ray from `b` to infinity after the
//! substitution `t = b + e^v`, which turns the integrand into a doubly
//! decaying function of `v` that the trapezoidal rule integrates with
//! geometric convergence. Continued fractions lose accuracy for the small
//! `|a|` that occur near the real axis of the contour, this route does not.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_431;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for complex argument (principal
/// branch is not guaranteed, only `exp(ln_gamma(z)) == gamma(z)`).
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Reflection: Gamma(z) Gamma(1 - z) = pi / sin(pi z).
        let s = (z * PI).sin();
        return Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// Complete gamma function for complex argument.
pub fn gamma(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Complex64::new(f64::NAN, f64::NAN);
    }
    ln_gamma(z).exp()
}

/// Upper incomplete gamma function `Gamma(a, b) = int_b^inf t^{a-1} e^{-t} dt`
/// for complex order `a` and real `b >= 0`.
///
/// For `b = 0` this is the complete gamma function and requires `Re(a) > 0`.
pub fn upper_incomplete_gamma(a: Complex64, b: f64) -> Result<Complex64> {
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::domain(format!("incomplete gamma needs finite b >= 0, got {b}")));
    }
    if !(a.re.is_finite() && a.im.is_finite()) {
        return Err(Error::domain("incomplete gamma order must be finite"));
    }
    if b == 0.0 {
        if a.re <= 0.0 {
            return Err(Error::domain(format!(
                "Gamma(a, 0) diverges for Re(a) <= 0 (a = {a})"
            )));
        }
        return Ok(gamma(a));
    }
    let (value, _) = incomplete_gamma_ray(a, b)?;
    Ok(value * (-b).exp())
}

/// `int_0^inf (b + u)^{a-1} e^{-u} du` by the trapezoidal rule in `v = ln u`,
/// returning the value and the L1 norm of the integrand.
fn incomplete_gamma_ray(a: Complex64, b: f64) -> Result<(Complex64, f64)> {
    const MAX_LEVELS: usize = 12;
    const REL_TOL: f64 = 1e-14;

    let am1 = a - 1.0;
    let v_min = b.ln() - 38.0;
    let u_max = 48.0 + 4.0 * a.re.max(0.0) + 2.0 * b.ln().max(0.0);
    let v_max = u_max.ln();
    let integrand = |v: f64| -> Complex64 {
        let u = v.exp();
        let l = (b + u).ln();
        let re = am1.re * l - u + v;
        let im = am1.im * l;
        Complex64::from_polar(re.exp(), im)
    };

    let mut n: usize = ((v_max - v_min) / 0.25).ceil() as usize;
    let mut h = (v_max - v_min) / n as f64;
    let mut sum = (integrand(v_min) + integrand(v_max)) * 0.5;
    let mut l1 = sum.norm();
    for i in 1..n {
        let f = integrand(v_min + i as f64 * h);
        sum += f;
        l1 += f.norm();
    }
    let mut prev = sum * h;
    for _ in 0..MAX_LEVELS {
        // Add midpoints of the current grid.
        let mut mid = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let f = integrand(v_min + (i as f64 + 0.5) * h);
            mid += f;
            l1 += f.norm();
        }
        sum += mid;
        n *= 2;
        h *= 0.5;
        let cur = sum * h;
        let scale = (l1 * h).max(cur.norm());
        if (cur - prev).norm() <= REL_TOL * scale {
            return Ok((cur, l1 * h));
        }
        prev = cur;
    }
    Err(Error::Convergence {
        what: "complex incomplete gamma",
        estimate: prev.norm(),
        error: f64::NAN,
    })
}

/// Modified Bessel function of the second kind, order one, by its
/// ascending series. Accurate for `0 < x <= 8`.
pub fn bessel_k1(x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 8.0) {
        return Err(Error::domain(format!("series K1 is used for 0 < x <= 8, got {x}")));
    }
    let q = 0.25 * x * x;
    let mut term = 1.0; // (x^2/4)^k / (k! (k+1)!)
    let mut i1 = 0.0;
    let mut tail = 0.0;
    let mut harmonic = 0.0; // H_k
    for k in 0..200 {
        let kf = k as f64;
        if k > 0 {
            term *= q / (kf * (kf + 1.0));
            harmonic += 1.0 / kf;
        }
        // psi(k+1) + psi(k+2) = 2 H_k + 1/(k+1) - 2 gamma
        let psi_sum = 2.0 * harmonic + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA;
        i1 += term;
        tail += psi_sum * term;
        if term < 1e-18 * i1 && k > 2 {
            break;
        }
    }
    let i1 = 0.5 * x * i1;
    Ok(1.0 / x + (0.5 * x).ln() * i1 - 0.25 * x * tail)
}

/// Exponential integral `E1(x) = Gamma(0, x)` by its convergent series,
/// for `0 < x <= 2`.
pub fn exponential_integral_e1(x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 2.0) {
        return Err(Error::domain(format!("series E1 is used for 0 < x <= 2, got {x}")));
    }
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -x / kf;
        let add = term / kf;
        sum += add;
        if add.abs() < 1e-18 {
            break;
        }
    }
    Ok(-EULER_GAMMA - x.ln() - sum)
}
