//! Closed parametric curves in C and root finding against them.
//!
//! Everything downstream (fiber membership, double-point detection, the
//! critical-value curve of a fibering map) reduces to two questions about a
//! smooth map c: [a, b] -> C: where does c(s) = t hold, and where does the
//! curve cross itself. Both are answered by dense tabulation followed by a
//! Newton polish, which is robust for the analytic, low-frequency curves that
//! show up here.

use num_complex::Complex64;

/// A parametric curve in the complex plane with an analytic derivative.
///
/// `is_closed` declares that c(a) = c(b); the hit and double-point searches
/// use it to identify the endpoints of the parameter interval.
pub trait PlaneCurve {
    fn eval(&self, s: f64) -> Complex64;
    fn deriv(&self, s: f64) -> Complex64;
    fn domain(&self) -> (f64, f64);
    fn is_closed(&self) -> bool;
}

/// A curve given by closures, for tests and ad hoc constructions.
pub struct FnCurve<F, G> {
    pub f: F,
    pub df: G,
    pub domain: (f64, f64),
    pub closed: bool,
}

impl<F: Fn(f64) -> Complex64, G: Fn(f64) -> Complex64> PlaneCurve for FnCurve<F, G> {
    fn eval(&self, s: f64) -> Complex64 {
        (self.f)(s)
    }
    fn deriv(&self, s: f64) -> Complex64 {
        (self.df)(s)
    }
    fn domain(&self) -> (f64, f64) {
        self.domain
    }
    fn is_closed(&self) -> bool {
        self.closed
    }
}

/// One solution of c(s) = t.
#[derive(Debug, Clone, Copy)]
pub struct CurveHit {
    pub s: f64,
    pub value: Complex64,
    pub residual: f64,
}

/// All parameters s with c(s) = t, to within `accept_tol` in value.
///
/// Tabulates |c(s) - t| on a uniform grid of `resolution` points, takes every
/// local minimum below a coarse gate, runs a damped Gauss-Newton iteration on
/// s from each, then dedupes in parameter space. The gate is generous (ten
/// grid spacings times a Lipschitz estimate) so shallow minima are polished
/// rather than discarded.
pub fn curve_hits<C: PlaneCurve + ?Sized>(
    curve: &C,
    t: Complex64,
    resolution: usize,
    accept_tol: f64,
) -> Vec<CurveHit> {
    let n = resolution.max(64);
    let (a, b) = curve.domain();
    let h = (b - a) / n as f64;
    let wrap = curve.is_closed();
    // Sample on a grid; closed curves drop the duplicate endpoint.
    let m = if wrap { n } else { n + 1 };
    let dist: Vec<f64> = (0..m)
        .map(|k| (curve.eval(a + k as f64 * h) - t).norm())
        .collect();
    let speed_max = (0..m)
        .map(|k| curve.deriv(a + k as f64 * h).norm())
        .fold(0.0_f64, f64::max);
    let gate = 10.0 * h * speed_max.max(1.0);

    let mut seeds: Vec<f64> = Vec::new();
    for k in 0..m {
        let prev = if k == 0 {
            if wrap {
                dist[m - 1]
            } else {
                f64::INFINITY
            }
        } else {
            dist[k - 1]
        };
        let next = if k + 1 == m {
            if wrap {
                dist[0]
            } else {
                f64::INFINITY
            }
        } else {
            dist[k + 1]
        };
        if dist[k] <= prev && dist[k] <= next && dist[k] < gate {
            seeds.push(a + k as f64 * h);
        }
    }

    let mut hits: Vec<CurveHit> = Vec::new();
    for &s0 in &seeds {
        if let Some(hit) = polish_hit(curve, t, s0, accept_tol) {
            hits.push(hit);
        }
    }
    hits.sort_by(|p, q| p.s.total_cmp(&q.s));
    dedupe_params(&mut hits, h, wrap, b - a);
    hits
}

/// Gauss-Newton on s |-> |c(s) - t|^2, the 1D normal equation of the
/// overdetermined system Re/Im(c(s) - t) = 0.
fn polish_hit<C: PlaneCurve + ?Sized>(
    curve: &C,
    t: Complex64,
    mut s: f64,
    accept_tol: f64,
) -> Option<CurveHit> {
    let (a, b) = curve.domain();
    let period = b - a;
    for _ in 0..60 {
        let r = curve.eval(s) - t;
        if r.norm() <= accept_tol {
            break;
        }
        let d = curve.deriv(s);
        let denom = d.norm_sqr();
        if denom == 0.0 {
            return None;
        }
        let step = (d.conj() * r).re / denom;
        s -= step;
        if curve.is_closed() {
            s = a + (s - a).rem_euclid(period);
        } else {
            s = s.clamp(a, b);
        }
        if step.abs() < 1e-16 * period.abs().max(1.0) {
            break;
        }
    }
    let value = curve.eval(s);
    let residual = (value - t).norm();
    (residual <= accept_tol).then_some(CurveHit { s, value, residual })
}

fn dedupe_params(hits: &mut Vec<CurveHit>, h: f64, wrap: bool, period: f64) {
    let tol = 0.5 * h;
    let mut out: Vec<CurveHit> = Vec::new();
    for hit in hits.iter() {
        let dup = out.iter().any(|p| {
            let mut d = (p.s - hit.s).abs();
            if wrap {
                d = d.min(period - d);
            }
            d < tol
        });
        if !dup {
            out.push(*hit);
        }
    }
    *hits = out;
}

/// A self-intersection of a plane curve: two distinct parameters with the
/// same value.
#[derive(Debug, Clone, Copy)]
pub struct DoublePoint {
    pub s1: f64,
    pub s2: f64,
    pub value: Complex64,
    pub residual: f64,
}

/// Self-intersections of c on its domain, found by scanning the (s1, s2)
/// grid above the diagonal and polishing near-coincidences with a 2x2 real
/// Newton iteration on c(s1) - c(s2) = 0.
///
/// `min_sep` excludes the trivial diagonal (and, for closed curves, the
/// wrap-around identification of the endpoints).
pub fn double_points<C: PlaneCurve + ?Sized>(
    curve: &C,
    resolution: usize,
    accept_tol: f64,
) -> Vec<DoublePoint> {
    let n = resolution.max(64);
    let (a, b) = curve.domain();
    let period = b - a;
    let h = period / n as f64;
    let wrap = curve.is_closed();
    let pts: Vec<Complex64> = (0..=n).map(|k| curve.eval(a + k as f64 * h)).collect();
    let speed_max = (0..=n)
        .map(|k| curve.deriv(a + k as f64 * h).norm())
        .fold(0.0_f64, f64::max);
    let gate = 4.0 * h * speed_max.max(1.0);
    let min_sep = 4.0 * h;

    let mut found: Vec<DoublePoint> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let s1 = a + i as f64 * h;
            let s2 = a + j as f64 * h;
            let mut sep = s2 - s1;
            if wrap {
                sep = sep.min(period - sep);
            }
            if sep < min_sep {
                continue;
            }
            if (pts[i] - pts[j]).norm() < gate {
                if let Some(dp) = polish_double_point(curve, s1, s2, accept_tol, min_sep) {
                    let dup = found.iter().any(|q| {
                        param_close(q.s1, dp.s1, 2.0 * h, wrap, period)
                            && param_close(q.s2, dp.s2, 2.0 * h, wrap, period)
                    });
                    if !dup {
                        found.push(dp);
                    }
                }
            }
        }
    }
    found.sort_by(|p, q| p.s1.total_cmp(&q.s1));
    found
}

fn param_close(x: f64, y: f64, tol: f64, wrap: bool, period: f64) -> bool {
    let mut d = (x - y).abs();
    if wrap {
        d = d.min(period - d);
    }
    d < tol
}

fn polish_double_point<C: PlaneCurve + ?Sized>(
    curve: &C,
    mut s1: f64,
    mut s2: f64,
    accept_tol: f64,
    min_sep: f64,
) -> Option<DoublePoint> {
    let (a, b) = curve.domain();
    let period = b - a;
    let wrap = curve.is_closed();
    for _ in 0..60 {
        let r = curve.eval(s1) - curve.eval(s2);
        if r.norm() <= accept_tol {
            break;
        }
        let d1 = curve.deriv(s1);
        let d2 = curve.deriv(s2);
        // Solve the 2x2 real system [Re d1, -Re d2; Im d1, -Im d2] * dx = -r.
        let det = -d1.re * d2.im + d1.im * d2.re;
        if det.abs() < 1e-14 {
            return None;
        }
        let ds1 = (-d2.im * (-r.re) + d2.re * (-r.im)) / det;
        let ds2 = (-d1.im * (-r.re) + d1.re * (-r.im)) / det;
        s1 += ds1;
        s2 += ds2;
        if wrap {
            s1 = a + (s1 - a).rem_euclid(period);
            s2 = a + (s2 - a).rem_euclid(period);
        } else {
            s1 = s1.clamp(a, b);
            s2 = s2.clamp(a, b);
        }
    }
    let mut sep = (s2 - s1).abs();
    if wrap {
        sep = sep.min(period - sep);
    }
    if sep < min_sep {
        return None;
    }
    let value = curve.eval(s1);
    let residual = (curve.eval(s1) - curve.eval(s2)).norm();
    if residual > accept_tol {
        return None;
    }
    let (lo, hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
    Some(DoublePoint {
        s1: lo,
        s2: hi,
        value,
        residual,
    })
}

/// Minimum distance between curve points whose parameters are at least
/// `min_sep` apart (in the wrapped metric for closed curves). Zero means the
/// curve fails to be embedded at this resolution.
pub fn min_self_distance<C: PlaneCurve + ?Sized>(
    curve: &C,
    resolution: usize,
    min_sep: f64,
) -> f64 {
    let n = resolution.max(64);
    let (a, b) = curve.domain();
    let period = b - a;
    let h = period / n as f64;
    let wrap = curve.is_closed();
    let m = if wrap { n } else { n + 1 };
    let pts: Vec<Complex64> = (0..m).map(|k| curve.eval(a + k as f64 * h)).collect();
    let mut best = f64::INFINITY;
    for i in 0..m {
        for j in (i + 1)..m {
            let mut sep = (j - i) as f64 * h;
            if wrap {
                sep = sep.min(period - sep);
            }
            if sep < min_sep {
                continue;
            }
            best = best.min((pts[i] - pts[j]).norm());
        }
    }
    best
}
