//! Scalar numerics shared by the geometry modules: winding numbers and
//! argument-principle zero counts on sampled closed curves, periodic contour
//! quadrature, bracketed 1D root finding, complex weighted least squares, and
//! Gauss-Legendre rules for non-periodic directions.
//!
//! Conventions: a closed curve is sampled uniformly over one parameter period
//! `2*pi`, sample `k` at parameter `2*pi*k/n`, and the curve wraps after the
//! last sample. Winding numbers are sums of principal-branch phase increments
//! of consecutive sample ratios; the sum telescopes to an exact multiple of
//! `2*pi` up to roundoff whenever the sampling resolves the curve.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const TWO_PI: f64 = 2.0 * PI;

/// Tolerance bundle threaded through every numeric check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Below this magnitude a complex value counts as zero.
    pub zero_tol: f64,
    /// Maximum accepted distance from an integer for winding totals.
    pub int_tol: f64,
    /// Pass threshold for residual-style checks.
    pub residual_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            zero_tol: 1e-9,
            int_tol: 1e-6,
            residual_tol: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn new(zero_tol: f64, int_tol: f64, residual_tol: f64) -> Result<Self, NumericsError> {
        let t = Tolerances {
            zero_tol,
            int_tol,
            residual_tol,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), NumericsError> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if ok(self.zero_tol) && ok(self.int_tol) && ok(self.residual_tol) {
            Ok(())
        } else {
            Err(NumericsError::InvalidTolerance)
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericsError {
    #[error("closed curve needs at least 16 samples, got {got}")]
    TooFewSamples { got: usize },
    #[error("tolerances must be finite and strictly positive")]
    InvalidTolerance,
    #[error("contour passes through zero (min |value| = {min_abs:e})")]
    ContourThroughZero { min_abs: f64 },
    #[error("under-resolved contour: a phase step reached {max_step} >= pi; resample denser")]
    UnderResolved { max_step: f64 },
    #[error("winding total {value} turns is not within tolerance of an integer")]
    NonIntegerWinding { value: f64 },
    #[error("argument-principle count is negative (winding {winding}); not a boundary image of an inner-holomorphic function")]
    NegativeCount { winding: i64 },
    #[error("sample count mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("no sign change on bracket [{a}, {b}]")]
    NoSignChange { a: f64, b: f64 },
    #[error("root iteration failed to converge (last x = {last_x})")]
    IterationLimit { last_x: f64 },
    #[error("basis is numerically rank deficient (R diagonal range {min_diag:e} .. {max_diag:e})")]
    RankDeficient { min_diag: f64, max_diag: f64 },
    #[error("weights must be finite and non-negative")]
    BadWeights,
}

/// Uniform samples of a closed curve over one period of its parameter.
#[derive(Debug, Clone)]
pub struct ClosedCurveSamples {
    values: Vec<Complex64>,
}

impl ClosedCurveSamples {
    pub fn new(values: Vec<Complex64>) -> Result<Self, NumericsError> {
        if values.len() < 16 {
            return Err(NumericsError::TooFewSamples { got: values.len() });
        }
        Ok(ClosedCurveSamples { values })
    }

    /// Sample `f` at the `n` uniform parameters `2*pi*k/n`.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self, NumericsError> {
        Self::new((0..n).map(|k| f(TWO_PI * k as f64 / n as f64)).collect())
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Winding number of the sampled curve about the origin.
///
/// Sums principal-branch phase increments of consecutive sample ratios. The
/// samples must resolve the curve: any increment of magnitude >= pi aborts
/// with `UnderResolved` (increments that alias past pi are undetectable from
/// samples alone, which is why the function-backed variant refines instead).
pub fn winding_number(curve: &ClosedCurveSamples, tol: &Tolerances) -> Result<i64, NumericsError> {
    tol.validate()?;
    let (turns, max_step, min_abs) = phase_turns(curve.values());
    if min_abs <= tol.zero_tol {
        return Err(NumericsError::ContourThroughZero { min_abs });
    }
    if max_step >= PI {
        return Err(NumericsError::UnderResolved { max_step });
    }
    round_turns(turns, tol)
}

/// Winding number of `t -> f(t)` over one period, with dyadic refinement.
///
/// Starts from `initial` samples (at least 16) and doubles the sampling until
/// every phase increment has magnitude below pi/2. Returns the integer
/// winding and the pre-rounding total in turns.
pub fn winding_number_fn(
    f: impl Fn(f64) -> Complex64,
    initial: usize,
    tol: &Tolerances,
) -> Result<(i64, f64), NumericsError> {
    tol.validate()?;
    let mut n = initial.max(16);
    loop {
        let values: Vec<Complex64> = (0..n).map(|k| f(TWO_PI * k as f64 / n as f64)).collect();
        let (turns, max_step, min_abs) = phase_turns(&values);
        if min_abs <= tol.zero_tol {
            return Err(NumericsError::ContourThroughZero { min_abs });
        }
        if max_step < PI / 2.0 {
            let w = round_turns(turns, tol)?;
            return Ok((w, turns));
        }
        if n >= (1 << 22) {
            return Err(NumericsError::UnderResolved { max_step });
        }
        n *= 2;
    }
}

fn phase_turns(values: &[Complex64]) -> (f64, f64, f64) {
    let n = values.len();
    let mut total = 0.0;
    let mut max_step = 0.0_f64;
    let mut min_abs = f64::INFINITY;
    for k in 0..n {
        min_abs = min_abs.min(values[k].norm());
        let step = (values[(k + 1) % n] / values[k]).arg();
        if !step.is_finite() {
            return (f64::NAN, PI, 0.0);
        }
        max_step = max_step.max(step.abs());
        total += step;
    }
    (total / TWO_PI, max_step, min_abs)
}

fn round_turns(turns: f64, tol: &Tolerances) -> Result<i64, NumericsError> {
    let rounded = turns.round();
    if !turns.is_finite() || (turns - rounded).abs() > tol.int_tol {
        return Err(NumericsError::NonIntegerWinding { value: turns });
    }
    Ok(rounded as i64)
}

/// Trapezoidal contour integral `∮ g dz` with dz from centered differences
/// of the curve samples. Second-order accurate; prefer
/// [`contour_integral_param`] with analytic derivatives when available.
pub fn contour_integral(
    curve: &ClosedCurveSamples,
    integrand: &[Complex64],
) -> Result<Complex64, NumericsError> {
    let v = curve.values();
    let n = v.len();
    if integrand.len() != n {
        return Err(NumericsError::LengthMismatch {
            left: integrand.len(),
            right: n,
        });
    }
    // g_k * (z_{k+1} - z_{k-1})/(2h) * h telescopes the h away.
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let dz = (v[(k + 1) % n] - v[(k + n - 1) % n]) / 2.0;
        sum += integrand[k] * dz;
    }
    Ok(sum)
}

/// Trapezoidal contour integral with caller-supplied derivative samples:
/// `∮ g dz = ∫ g(z(s)) z'(s) ds` over one period. Spectrally accurate for
/// analytic periodic data.
pub fn contour_integral_param(
    integrand: &[Complex64],
    dcurve: &[Complex64],
) -> Result<Complex64, NumericsError> {
    let n = integrand.len();
    if dcurve.len() != n {
        return Err(NumericsError::LengthMismatch {
            left: n,
            right: dcurve.len(),
        });
    }
    if n == 0 {
        return Err(NumericsError::TooFewSamples { got: 0 });
    }
    let h = TWO_PI / n as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..n {
        sum += integrand[k] * dcurve[k];
    }
    Ok(sum * h)
}

/// Number of zeros (with multiplicity) enclosed by a contour, from the
/// winding of the sampled boundary image of a function holomorphic inside.
pub fn zero_count(
    boundary_image: &ClosedCurveSamples,
    tol: &Tolerances,
) -> Result<u32, NumericsError> {
    let w = winding_number(boundary_image, tol)?;
    if w < 0 {
        return Err(NumericsError::NegativeCount { winding: w });
    }
    Ok(w as u32)
}

/// Function-backed zero count with dyadic refinement; see [`winding_number_fn`].
pub fn zero_count_fn(
    f: impl Fn(f64) -> Complex64,
    initial: usize,
    tol: &Tolerances,
) -> Result<(u32, f64), NumericsError> {
    let (w, turns) = winding_number_fn(f, initial, tol)?;
    if w < 0 {
        return Err(NumericsError::NegativeCount { winding: w });
    }
    Ok((w as u32, turns))
}

/// Bracketed hybrid root finder (inverse quadratic / secant steps with a
/// bisection safeguard). The bracket must straddle a sign change. Converges
/// when the bracket width or |f| drops below `tol`.
pub fn find_root_1d(
    f: impl Fn(f64) -> f64,
    bracket: (f64, f64),
    tol: f64,
) -> Result<f64, NumericsError> {
    let (mut a, mut b) = bracket;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(NumericsError::NoSignChange { a, b });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 || fb.abs() <= tol {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Attempt inverse quadratic interpolation / secant.
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let q0 = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * q0 * (q0 - r) - (b - a) * (r - 1.0)),
                    (q0 - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 {
            d
        } else {
            tol1.copysign(xm)
        };
        fb = f(b);
    }
    Err(NumericsError::IterationLimit { last_x: b })
}

/// Weighted complex least squares via Householder QR: minimizes
/// `sum_i w_i |target_i - sum_j c_j basis_j_i|^2` and returns the
/// coefficients with the weighted residual norm. No normal equations are
/// formed; rank deficiency at working precision is reported, not regularized.
pub fn least_squares_fit(
    basis: &[Vec<Complex64>],
    target: &[Complex64],
    weights: &[f64],
) -> Result<(Vec<Complex64>, f64), NumericsError> {
    let m = target.len();
    let n = basis.len();
    if n == 0 || m == 0 {
        return Err(NumericsError::LengthMismatch { left: n, right: m });
    }
    for col in basis {
        if col.len() != m {
            return Err(NumericsError::LengthMismatch {
                left: col.len(),
                right: m,
            });
        }
    }
    if weights.len() != m {
        return Err(NumericsError::LengthMismatch {
            left: weights.len(),
            right: m,
        });
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(NumericsError::BadWeights);
    }
    if m < n {
        // Fewer samples than basis functions: the Gram matrix is singular.
        return Err(NumericsError::RankDeficient {
            min_diag: 0.0,
            max_diag: 0.0,
        });
    }
    let sw: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let a = DMatrix::from_fn(m, n, |i, j| basis[j][i] * sw[i]);
    let b = DVector::from_fn(m, |i, _| target[i] * sw[i]);
    let qr = a.clone().qr();
    let r = qr.r();
    let mut min_diag = f64::INFINITY;
    let mut max_diag = 0.0_f64;
    for i in 0..n {
        let d = r[(i, i)].norm();
        min_diag = min_diag.min(d);
        max_diag = max_diag.max(d);
    }
    let rank_floor = max_diag * f64::EPSILON * 4.0 * (m.max(n) as f64);
    if !(max_diag > 0.0) || min_diag <= rank_floor {
        return Err(NumericsError::RankDeficient { min_diag, max_diag });
    }
    let qtb = qr.q().ad_mul(&b);
    let coeffs = r
        .solve_upper_triangular(&qtb)
        .ok_or(NumericsError::RankDeficient { min_diag, max_diag })?;
    let residual = (&a * &coeffs - &b).norm();
    Ok((coeffs.iter().copied().collect(), residual))
}

/// Gauss-Legendre nodes and weights on [-1, 1]. Exact for polynomials of
/// degree 2n-1; spectrally accurate on analytic integrands.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0_f64;
            let mut p1 = 0.0_f64;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j as f64 + 1.0);
            }
            deriv = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / deriv;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * deriv * deriv);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss-Legendre rule mapped onto [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|wi| wi * half).collect(),
    )
}
