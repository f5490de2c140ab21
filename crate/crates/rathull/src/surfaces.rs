//! The surface gallery: a Klein bottle and its mirror image, Hopf-fibered
//! tori over a spherical profile curve, tori spun from a plane curve, and a
//! totally real disc, all parametrized by two real variables.
//!
//! Every family exposes an evaluator, analytic tangent frames with a
//! finite-difference fallback, and a validator that locates the constants the
//! fiber analysis needs (double points, annulus radii, profile margins).

use crate::curve::{double_points, FnCurve};
use crate::numerics::TWO_PI;
use crate::types::Point2C;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SurfaceError {
    #[error("invalid surface parameters: {0}")]
    InvalidParams(String),
    #[error("point is off the unit sphere of C^2 by {defect:.3e}")]
    NotOnSphere { defect: f64 },
    #[error("degenerate tangent frame at ({u:.6}, {v:.6}): partial norm {norm:.3e}")]
    DegeneratePoint { u: f64, v: f64, norm: f64 },
    #[error("family validation failed: {0}")]
    ValidationFailed(String),
}

/// Real trigonometric polynomial c0 + sum_k (cos_k cos(ks) + sin_k sin(ks)).
/// Coefficient index 0 corresponds to frequency 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    pub c0: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl TrigPoly {
    pub fn constant(c0: f64) -> Self {
        TrigPoly {
            c0,
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    pub fn new(c0: f64, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        TrigPoly { c0, cos, sin }
    }

    pub fn eval(&self, s: f64) -> f64 {
        let mut v = self.c0;
        for (k, c) in self.cos.iter().enumerate() {
            v += c * ((k + 1) as f64 * s).cos();
        }
        for (k, c) in self.sin.iter().enumerate() {
            v += c * ((k + 1) as f64 * s).sin();
        }
        v
    }

    pub fn deriv(&self, s: f64) -> f64 {
        let mut v = 0.0;
        for (k, c) in self.cos.iter().enumerate() {
            let k = (k + 1) as f64;
            v -= c * k * (k * s).sin();
        }
        for (k, c) in self.sin.iter().enumerate() {
            let k = (k + 1) as f64;
            v += c * k * (k * s).cos();
        }
        v
    }
}

/// Complex-valued trigonometric polynomial, stored as two real ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexTrigPoly {
    pub re: TrigPoly,
    pub im: TrigPoly,
}

impl ComplexTrigPoly {
    pub fn eval(&self, s: f64) -> Complex64 {
        Complex64::new(self.re.eval(s), self.im.eval(s))
    }

    pub fn deriv(&self, s: f64) -> Complex64 {
        Complex64::new(self.re.deriv(s), self.im.deriv(s))
    }
}

/// Klein bottle parameters: the profile radius is g(phi) = a + b cos(phi),
/// which must stay positive, hence 0 < b < a.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KleinParams {
    pub a: f64,
    pub b: f64,
}

impl KleinParams {
    pub fn new(a: f64, b: f64) -> Result<Self, SurfaceError> {
        let p = KleinParams { a, b };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), SurfaceError> {
        if !self.a.is_finite() || !self.b.is_finite() {
            return Err(SurfaceError::InvalidParams("parameters must be finite".into()));
        }
        if !(self.b > 0.0 && self.b < self.a) {
            return Err(SurfaceError::InvalidParams(format!(
                "need 0 < b < a, got a = {}, b = {}",
                self.a, self.b
            )));
        }
        Ok(())
    }

    pub fn g(&self, phi: f64) -> f64 {
        self.a + self.b * phi.cos()
    }

    pub fn g_deriv(&self, phi: f64) -> f64 {
        -self.b * phi.sin()
    }

    /// Inner radius (a-b)^2 of the annulus {w = 0} cut out by the surface.
    pub fn inner_radius(&self) -> f64 {
        (self.a - self.b).powi(2)
    }

    /// Outer radius (a+b)^2 of that annulus.
    pub fn outer_radius(&self) -> f64 {
        (self.a + self.b).powi(2)
    }
}

impl Default for KleinParams {
    fn default() -> Self {
        KleinParams { a: 2.0, b: 1.0 }
    }
}

/// The height profile h(phi) = sin(phi) + i sin(2phi) shared by both Klein
/// surfaces; odd in phi, vanishing exactly at multiples of pi.
pub fn klein_h(phi: f64) -> Complex64 {
    Complex64::new(phi.sin(), (2.0 * phi).sin())
}

pub fn klein_h_deriv(phi: f64) -> Complex64 {
    Complex64::new(phi.cos(), 2.0 * (2.0 * phi).cos())
}

/// Torus swept by Hopf circles over a closed profile curve on the unit
/// sphere, given in spherical angles (theta(s), phi(s)).
///
/// The default phase profile mixes first harmonics only. A profile with even
/// harmonics alone would satisfy zeta(s + pi) = zeta(s) for the projected
/// curve zeta = sin(theta) e^{i phi}, retracing itself at half period and
/// collapsing the single-double-point structure the fiber analysis expects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopfTorusParams {
    pub theta_profile: TrigPoly,
    pub phi_profile: TrigPoly,
}

impl Default for HopfTorusParams {
    fn default() -> Self {
        HopfTorusParams {
            theta_profile: TrigPoly::new(PI / 2.0, vec![0.7], vec![]),
            phi_profile: TrigPoly::new(0.9, vec![0.3], vec![0.5]),
        }
    }
}

impl HopfTorusParams {
    /// Equatorial projection zeta(s) = sin(theta(s)) e^{i phi(s)}, which is
    /// also the value of the fibering map 2zw along the surface.
    pub fn projection(&self, s: f64) -> Complex64 {
        let theta = self.theta_profile.eval(s);
        Complex64::from_polar(theta.sin(), self.phi_profile.eval(s))
    }

    pub fn projection_deriv(&self, s: f64) -> Complex64 {
        let theta = self.theta_profile.eval(s);
        let dtheta = self.theta_profile.deriv(s);
        let dphi = self.phi_profile.deriv(s);
        Complex64::new(dtheta * theta.cos(), dphi * theta.sin())
            * Complex64::from_polar(1.0, self.phi_profile.eval(s))
    }

    /// The profile curve on S^2 in Cartesian coordinates.
    pub fn sphere_point(&self, s: f64) -> [f64; 3] {
        let theta = self.theta_profile.eval(s);
        let phi = self.phi_profile.eval(s);
        [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
    }
}

/// Torus obtained by spinning a circle of radius r(theta) in the w-plane
/// along a closed curve z(theta) in the z-plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinTorusParams {
    pub z_profile: ComplexTrigPoly,
    pub r_profile: TrigPoly,
}

impl Default for SpinTorusParams {
    fn default() -> Self {
        SpinTorusParams {
            // Figure eight sin(2t) + i sin(t): one transversal double point
            // at the origin, reached at t = 0 and t = pi.
            z_profile: ComplexTrigPoly {
                re: TrigPoly::new(0.0, vec![], vec![0.0, 1.0]),
                im: TrigPoly::new(0.0, vec![], vec![1.0]),
            },
            r_profile: TrigPoly::new(1.5, vec![0.4], vec![]),
        }
    }
}

/// Totally real disc {(z, conj(z) f(|z|^2)) : |z| <= 1} with profile
/// f(t) = amp(t) e^{i omega t}, amp a real polynomial in t (ascending
/// coefficients).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscParams {
    pub amp: Vec<f64>,
    pub omega: f64,
}

impl Default for DiscParams {
    fn default() -> Self {
        // amp(t) = 1.1 - t is unimodal for t(1.1 - t), so each full turn of
        // the phase e^{i omega t} pairs up exactly one modulus match; omega=8
        // fits one such pair inside [0, 1].
        DiscParams {
            amp: vec![1.1, -1.0],
            omega: 8.0,
        }
    }
}

impl DiscParams {
    pub fn amp_eval(&self, t: f64) -> f64 {
        self.amp.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn amp_deriv(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (k, c) in self.amp.iter().enumerate().skip(1) {
            acc += c * k as f64 * t.powi(k as i32 - 1);
        }
        acc
    }

    pub fn profile(&self, t: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.omega * t) * self.amp_eval(t)
    }

    pub fn profile_deriv(&self, t: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.omega * t)
            * Complex64::new(self.amp_deriv(t), self.omega * self.amp_eval(t))
    }

    /// The plane curve gamma(t) = t f(t) traced by the fiber value zw as the
    /// radius grows; its double point is where the attached annulus lives.
    pub fn gamma(&self, t: f64) -> Complex64 {
        self.profile(t) * t
    }

    pub fn gamma_deriv(&self, t: f64) -> Complex64 {
        self.profile(t) + self.profile_deriv(t) * t
    }
}

/// A member of the surface gallery. Parameters are (theta, phi) angles for
/// the tori and Klein surfaces, and (t, beta) = (|z|^2, arg z) for the disc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum SurfaceFamily {
    Klein(KleinParams),
    KleinStar(KleinParams),
    HopfTorus(HopfTorusParams),
    SpinTorus(SpinTorusParams),
    Disc(DiscParams),
}

impl SurfaceFamily {
    pub fn name(&self) -> &'static str {
        match self {
            SurfaceFamily::Klein(_) => "klein",
            SurfaceFamily::KleinStar(_) => "klein-star",
            SurfaceFamily::HopfTorus(_) => "hopf-torus",
            SurfaceFamily::SpinTorus(_) => "spin-torus",
            SurfaceFamily::Disc(_) => "disc",
        }
    }

    /// Parameter rectangle as ((u_min, u_max), (v_min, v_max)).
    pub fn domain(&self) -> ((f64, f64), (f64, f64)) {
        match self {
            SurfaceFamily::Klein(_) | SurfaceFamily::KleinStar(_) => {
                ((-PI, PI), (-PI, PI))
            }
            SurfaceFamily::HopfTorus(_) | SurfaceFamily::SpinTorus(_) => {
                ((0.0, TWO_PI), (0.0, TWO_PI))
            }
            SurfaceFamily::Disc(_) => ((0.0, 1.0), (0.0, TWO_PI)),
        }
    }

    /// Which parameter directions are periodic.
    pub fn periodic(&self) -> (bool, bool) {
        match self {
            SurfaceFamily::Disc(_) => (false, true),
            _ => (true, true),
        }
    }

    /// Cheap structural validation of the parameters themselves; the heavier
    /// geometric checks live in validate_family.
    pub fn check_params(&self) -> Result<(), SurfaceError> {
        match self {
            SurfaceFamily::Klein(p) | SurfaceFamily::KleinStar(p) => p.validate(),
            SurfaceFamily::Disc(p) => {
                if p.amp.is_empty() {
                    return Err(SurfaceError::InvalidParams(
                        "disc amplitude polynomial has no coefficients".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, u: f64, v: f64) -> Point2C {
        match self {
            SurfaceFamily::Klein(p) => {
                let (theta, phi) = (u, v);
                let g = p.g(phi);
                let h = klein_h(phi);
                Point2C::new(
                    Complex64::from_polar(g * g, 2.0 * theta),
                    Complex64::from_polar(1.0, theta) * g * h,
                )
            }
            SurfaceFamily::KleinStar(p) => {
                let (theta, phi) = (u, v);
                let g = p.g(phi);
                let h = klein_h(phi);
                Point2C::new(
                    Complex64::from_polar(g * g, 2.0 * theta),
                    Complex64::from_polar(1.0, -theta) * (h / g),
                )
            }
            SurfaceFamily::HopfTorus(p) => {
                let (s, psi) = (u, v);
                let theta = p.theta_profile.eval(s);
                let phi = p.phi_profile.eval(s);
                Point2C::new(
                    Complex64::from_polar((theta / 2.0).cos(), phi / 2.0 + psi),
                    Complex64::from_polar((theta / 2.0).sin(), phi / 2.0 - psi),
                )
            }
            SurfaceFamily::SpinTorus(p) => {
                let (theta, phi) = (u, v);
                Point2C::new(
                    p.z_profile.eval(theta),
                    Complex64::from_polar(p.r_profile.eval(theta), phi),
                )
            }
            SurfaceFamily::Disc(p) => {
                let (t, beta) = (u, v);
                let rho = t.max(0.0).sqrt();
                let z = Complex64::from_polar(rho, beta);
                Point2C::new(z, z.conj() * p.profile(t))
            }
        }
    }

    /// Analytic partial derivatives (d/du, d/dv) of the evaluator.
    ///
    /// The disc chart is polar in t = |z|^2, so its u-partial blows up as
    /// t -> 0; callers stay on cell-centered grids in t.
    pub fn tangent_frame(&self, u: f64, v: f64) -> Result<(Point2C, Point2C), SurfaceError> {
        let (du, dv) = match self {
            SurfaceFamily::Klein(p) => {
                let (theta, phi) = (u, v);
                let g = p.g(phi);
                let dg = p.g_deriv(phi);
                let h = klein_h(phi);
                let dh = klein_h_deriv(phi);
                let e1 = Complex64::from_polar(1.0, theta);
                let e2 = Complex64::from_polar(1.0, 2.0 * theta);
                let i = Complex64::i();
                (
                    Point2C::new(2.0 * i * e2 * g * g, i * e1 * g * h),
                    Point2C::new(e2 * 2.0 * g * dg, e1 * (dg * h + g * dh)),
                )
            }
            SurfaceFamily::KleinStar(p) => {
                let (theta, phi) = (u, v);
                let g = p.g(phi);
                let dg = p.g_deriv(phi);
                let h = klein_h(phi);
                let dh = klein_h_deriv(phi);
                let e2 = Complex64::from_polar(1.0, 2.0 * theta);
                let em1 = Complex64::from_polar(1.0, -theta);
                let i = Complex64::i();
                (
                    Point2C::new(2.0 * i * e2 * g * g, -i * em1 * (h / g)),
                    Point2C::new(e2 * 2.0 * g * dg, em1 * (dh * g - h * dg) / (g * g)),
                )
            }
            SurfaceFamily::HopfTorus(p) => {
                let (s, psi) = (u, v);
                let theta = p.theta_profile.eval(s);
                let dtheta = p.theta_profile.deriv(s);
                let phi = p.phi_profile.eval(s);
                let dphi = p.phi_profile.deriv(s);
                let ez = Complex64::from_polar(1.0, phi / 2.0 + psi);
                let ew = Complex64::from_polar(1.0, phi / 2.0 - psi);
                let (half_sin, half_cos) = ((theta / 2.0).sin(), (theta / 2.0).cos());
                let i = Complex64::i();
                let pt = self.eval(u, v);
                (
                    Point2C::new(
                        ez * Complex64::new(-dtheta / 2.0 * half_sin, dphi / 2.0 * half_cos),
                        ew * Complex64::new(dtheta / 2.0 * half_cos, dphi / 2.0 * half_sin),
                    ),
                    Point2C::new(i * pt.z, -i * pt.w),
                )
            }
            SurfaceFamily::SpinTorus(p) => {
                let (theta, phi) = (u, v);
                let e = Complex64::from_polar(1.0, phi);
                (
                    Point2C::new(p.z_profile.deriv(theta), e * p.r_profile.deriv(theta)),
                    Point2C::new(
                        Complex64::new(0.0, 0.0),
                        Complex64::i() * e * p.r_profile.eval(theta),
                    ),
                )
            }
            SurfaceFamily::Disc(p) => {
                let (t, beta) = (u, v);
                if t <= 0.0 {
                    return Err(SurfaceError::DegeneratePoint {
                        u,
                        v,
                        norm: f64::INFINITY,
                    });
                }
                let rho = t.sqrt();
                let eb = Complex64::from_polar(1.0, beta);
                let ebc = eb.conj();
                let f = p.profile(t);
                let df = p.profile_deriv(t);
                let i = Complex64::i();
                (
                    Point2C::new(eb / (2.0 * rho), ebc * (f / (2.0 * rho) + rho * df)),
                    Point2C::new(i * eb * rho, -i * ebc * rho * f),
                )
            }
        };
        let floor = 1e-12;
        for p in [&du, &dv] {
            let n = p.norm();
            if !(n > floor) {
                return Err(SurfaceError::DegeneratePoint { u, v, norm: n });
            }
        }
        Ok((du, dv))
    }

    /// Central-difference frame with step 1e-5, the fallback for profiles
    /// without closed-form derivatives and the oracle for the analytic ones.
    pub fn tangent_frame_fd(&self, u: f64, v: f64) -> (Point2C, Point2C) {
        let h = 1e-5;
        let diff = |a: Point2C, b: Point2C| {
            Point2C::new((a.z - b.z) / (2.0 * h), (a.w - b.w) / (2.0 * h))
        };
        (
            diff(self.eval(u + h, v), self.eval(u - h, v)),
            diff(self.eval(u, v + h), self.eval(u, v - h)),
        )
    }
}

/// Complex determinant of the 2x2 matrix with the two tangent vectors as
/// columns; the tangent plane contains a complex line exactly when this
/// vanishes.
pub fn tangent_det(du: &Point2C, dv: &Point2C) -> Complex64 {
    du.z * dv.w - du.w * dv.z
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TotalRealityReport {
    pub family: String,
    pub grid: usize,
    pub min_abs_det: f64,
    pub argmin: (f64, f64),
    pub pass: bool,
}

/// Scans |det[dU | dV]| over an n x n parameter grid; the surface is totally
/// real at working resolution iff the minimum stays positive. Periodic
/// directions are sampled without the duplicate endpoint, the disc's radial
/// direction on cell centers (its t = 0 edge is a chart singularity, not a
/// surface point failure).
pub fn total_reality_scan(
    family: &SurfaceFamily,
    n: usize,
) -> Result<TotalRealityReport, SurfaceError> {
    if n < 64 {
        return Err(SurfaceError::InvalidParams(format!(
            "total reality scan needs a grid of at least 64, got {n}"
        )));
    }
    family.check_params()?;
    let ((u0, u1), (v0, v1)) = family.domain();
    let (per_u, per_v) = family.periodic();
    let coord = |lo: f64, hi: f64, periodic: bool, k: usize| {
        if periodic {
            lo + (hi - lo) * k as f64 / n as f64
        } else {
            lo + (hi - lo) * (k as f64 + 0.5) / n as f64
        }
    };
    let mut min_abs = f64::INFINITY;
    let mut argmin = (u0, v0);
    for i in 0..n {
        let u = coord(u0, u1, per_u, i);
        for j in 0..n {
            let v = coord(v0, v1, per_v, j);
            let (du, dv) = family.tangent_frame(u, v)?;
            let d = tangent_det(&du, &dv).norm();
            if d < min_abs {
                min_abs = d;
                argmin = (u, v);
            }
        }
    }
    Ok(TotalRealityReport {
        family: family.name().to_string(),
        grid: n,
        min_abs_det: min_abs,
        argmin,
        pass: min_abs > 0.0,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KleinIdentificationReport {
    pub grid: usize,
    pub max_identification_defect: f64,
    pub min_nonequivalent_distance: f64,
}

/// Checks the gluing relation Phi(theta + pi, -phi) = Phi(theta, phi) on a
/// grid and gathers injectivity evidence: the minimum distance between
/// images of distinct points of the fundamental domain theta in [-pi, 0).
pub fn klein_identification_check(
    params: &KleinParams,
    n: usize,
) -> Result<KleinIdentificationReport, SurfaceError> {
    params.validate()?;
    let family = SurfaceFamily::Klein(*params);
    let mut max_defect = 0.0_f64;
    for i in 0..n {
        let theta = -PI + TWO_PI * i as f64 / n as f64;
        for j in 0..n {
            let phi = -PI + TWO_PI * j as f64 / n as f64;
            let p = family.eval(theta, phi);
            let q = family.eval(theta + PI, -phi);
            max_defect = max_defect.max(p.dist(&q));
        }
    }

    // Fundamental domain: theta in [-pi, 0) meets each equivalence class
    // exactly once, so distinct grid points are never identified.
    let half = n / 2;
    let mut images: Vec<Point2C> = Vec::with_capacity(half * n);
    for i in 0..half {
        let theta = -PI + PI * i as f64 / half as f64;
        for j in 0..n {
            let phi = -PI + TWO_PI * j as f64 / n as f64;
            images.push(family.eval(theta, phi));
        }
    }
    let mut min_dist = f64::INFINITY;
    for i in 0..images.len() {
        for j in (i + 1)..images.len() {
            let d2 = (images[i].z - images[j].z).norm_sqr()
                + (images[i].w - images[j].w).norm_sqr();
            if d2 < min_dist {
                min_dist = d2;
            }
        }
    }
    Ok(KleinIdentificationReport {
        grid: n,
        max_identification_defect: max_defect,
        min_nonequivalent_distance: min_dist.sqrt(),
    })
}

/// The conjugate Hopf fibration S^3 -> S^2, (z, w) -> (2zw, |z|^2 - |w|^2).
/// Its fibers are the circles (e^{i psi} z, e^{-i psi} w).
pub fn hopf_map(z: Complex64, w: Complex64) -> Result<(Complex64, f64), SurfaceError> {
    let defect = (z.norm_sqr() + w.norm_sqr() - 1.0).abs();
    if defect > 1e-9 {
        return Err(SurfaceError::NotOnSphere { defect });
    }
    Ok((2.0 * z * w, z.norm_sqr() - w.norm_sqr()))
}

const VALIDATE_GRID: usize = 2048;
const VALIDATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KleinFacts {
    pub inner_radius: f64,
    pub outer_radius: f64,
    /// Profile parameters worth sampling exactly: the two zeros of h (the
    /// annulus fiber) and the midpoint phi = -pi/2 where h^2 = 1.
    pub special_params: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HopfFacts {
    /// The single self-intersection value of the projected profile.
    pub a: Complex64,
    pub s1: f64,
    pub s2: f64,
    /// Heights cos(theta) of the two profile strands over the crossing.
    pub latitudes: (f64, f64),
    pub min_abs_projection: f64,
    pub min_projection_speed: f64,
    pub min_sphere_self_distance: f64,
    pub special_params: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpinFacts {
    pub z0: Complex64,
    pub theta1: f64,
    pub theta2: f64,
    pub r1: f64,
    pub r2: f64,
    pub min_r: f64,
    pub min_profile_speed: f64,
    pub special_params: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscFacts {
    pub t1: f64,
    pub t2: f64,
    pub alpha: Complex64,
    /// Chart radii sqrt(t1), sqrt(t2) of the two fiber circles over alpha.
    pub chart_radii: (f64, f64),
    pub min_gamma_speed: f64,
    pub special_params: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum FamilyFacts {
    Klein(KleinFacts),
    Hopf(HopfFacts),
    Spin(SpinFacts),
    Disc(DiscFacts),
}

impl FamilyFacts {
    /// Profile parameters that must be included among fiber representatives
    /// (double-point branches and degenerate-fiber parameters).
    pub fn special_params(&self) -> &[f64] {
        match self {
            FamilyFacts::Klein(f) => &f.special_params,
            FamilyFacts::Hopf(f) => &f.special_params,
            FamilyFacts::Spin(f) => &f.special_params,
            FamilyFacts::Disc(f) => &f.special_params,
        }
    }
}

/// Runs the geometric invariant checks of a family and returns the located
/// constants (double points, annulus data, margins) for the fiber analysis.
pub fn validate_family(family: &SurfaceFamily) -> Result<FamilyFacts, SurfaceError> {
    family.check_params()?;
    match family {
        SurfaceFamily::Klein(p) | SurfaceFamily::KleinStar(p) => Ok(FamilyFacts::Klein(KleinFacts {
            inner_radius: p.inner_radius(),
            outer_radius: p.outer_radius(),
            special_params: vec![-PI, -PI / 2.0, 0.0],
        })),
        SurfaceFamily::HopfTorus(p) => validate_hopf(p),
        SurfaceFamily::SpinTorus(p) => validate_spin(p),
        SurfaceFamily::Disc(p) => validate_disc(p),
    }
}

fn validate_hopf(p: &HopfTorusParams) -> Result<FamilyFacts, SurfaceError> {
    let n = VALIDATE_GRID;
    let mut min_abs = f64::INFINITY;
    let mut min_speed = f64::INFINITY;
    for k in 0..n {
        let s = TWO_PI * k as f64 / n as f64;
        min_abs = min_abs.min(p.projection(s).norm());
        min_speed = min_speed.min(p.projection_deriv(s).norm());
    }
    if min_abs <= VALIDATE_TOL {
        return Err(SurfaceError::ValidationFailed(format!(
            "projected profile passes through 0 (min modulus {min_abs:.3e}); \
             the profile must stay off the poles of the sphere"
        )));
    }
    if min_speed <= VALIDATE_TOL {
        return Err(SurfaceError::ValidationFailed(format!(
            "projected profile is not immersed (min speed {min_speed:.3e})"
        )));
    }
    let proj = FnCurve {
        f: |s: f64| p.projection(s),
        df: |s: f64| p.projection_deriv(s),
        domain: (0.0, TWO_PI),
        closed: true,
    };
    let dps = double_points(&proj, n, VALIDATE_TOL);
    if dps.len() != 1 {
        return Err(SurfaceError::ValidationFailed(format!(
            "projected profile must have exactly one self-intersection, found {}",
            dps.len()
        )));
    }
    let dp = dps[0];
    // Embeddedness on the sphere: the two strands over the projected crossing
    // sit at different heights, so the 3D curve should stay apart.
    let mut min_sphere = f64::INFINITY;
    let pts: Vec<[f64; 3]> = (0..n)
        .map(|k| p.sphere_point(TWO_PI * k as f64 / n as f64))
        .collect();
    let min_sep = 8.0 * TWO_PI / n as f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let sep = ((j - i) as f64 * TWO_PI / n as f64).min(((n + i - j) as f64) * TWO_PI / n as f64);
            if sep < min_sep {
                continue;
            }
            let d2 = (0..3).map(|c| (pts[i][c] - pts[j][c]).powi(2)).sum::<f64>();
            min_sphere = min_sphere.min(d2);
        }
    }
    let min_sphere = min_sphere.sqrt();
    if !(min_sphere > VALIDATE_TOL) {
        return Err(SurfaceError::ValidationFailed(format!(
            "profile curve is not embedded on the sphere (min self distance {min_sphere:.3e})"
        )));
    }
    let lat = |s: f64| p.theta_profile.eval(s).cos();
    Ok(FamilyFacts::Hopf(HopfFacts {
        a: dp.value,
        s1: dp.s1,
        s2: dp.s2,
        latitudes: (lat(dp.s1), lat(dp.s2)),
        min_abs_projection: min_abs,
        min_projection_speed: min_speed,
        min_sphere_self_distance: min_sphere,
        special_params: vec![dp.s1, dp.s2],
    }))
}

fn validate_spin(p: &SpinTorusParams) -> Result<FamilyFacts, SurfaceError> {
    let n = VALIDATE_GRID;
    let mut min_r = f64::INFINITY;
    let mut min_speed = f64::INFINITY;
    for k in 0..n {
        let s = TWO_PI * k as f64 / n as f64;
        min_r = min_r.min(p.r_profile.eval(s));
        min_speed = min_speed.min(p.z_profile.deriv(s).norm());
    }
    if !(min_r > VALIDATE_TOL) {
        return Err(SurfaceError::ValidationFailed(format!(
            "spin radius must stay positive (min {min_r:.3e})"
        )));
    }
    if min_speed <= VALIDATE_TOL {
        return Err(SurfaceError::ValidationFailed(format!(
            "z-profile is not immersed (min speed {min_speed:.3e})"
        )));
    }
    let curve = FnCurve {
        f: |s: f64| p.z_profile.eval(s),
        df: |s: f64| p.z_profile.deriv(s),
        domain: (0.0, TWO_PI),
        closed: true,
    };
    let dps = double_points(&curve, n, VALIDATE_TOL);
    if dps.len() != 1 {
        return Err(SurfaceError::ValidationFailed(format!(
            "z-profile must have exactly one self-intersection, found {}",
            dps.len()
        )));
    }
    let dp = dps[0];
    let r1 = p.r_profile.eval(dp.s1);
    let r2 = p.r_profile.eval(dp.s2);
    if (r1 - r2).abs() <= VALIDATE_TOL {
        return Err(SurfaceError::ValidationFailed(format!(
            "spin radii over the double point coincide (r = {r1}); \
             the fiber over z0 would not bound an annulus"
        )));
    }
    Ok(FamilyFacts::Spin(SpinFacts {
        z0: dp.value,
        theta1: dp.s1,
        theta2: dp.s2,
        r1,
        r2,
        min_r,
        min_profile_speed: min_speed,
        special_params: vec![dp.s1, dp.s2],
    }))
}

fn validate_disc(p: &DiscParams) -> Result<FamilyFacts, SurfaceError> {
    let n = VALIDATE_GRID;
    let mut min_speed = f64::INFINITY;
    for k in 0..=n {
        let t = k as f64 / n as f64;
        min_speed = min_speed.min(p.gamma_deriv(t).norm());
    }
    if min_speed <= VALIDATE_TOL {
        return Err(SurfaceError::ValidationFailed(format!(
            "t -> t f(t) is not an immersion (min speed {min_speed:.3e})"
        )));
    }
    let curve = FnCurve {
        f: |t: f64| p.gamma(t),
        df: |t: f64| p.gamma_deriv(t),
        domain: (0.0, 1.0),
        closed: false,
    };
    let dps = double_points(&curve, n, VALIDATE_TOL);
    if dps.len() != 1 {
        return Err(SurfaceError::ValidationFailed(format!(
            "t -> t f(t) must have exactly one double point, found {}",
            dps.len()
        )));
    }
    let dp = dps[0];
    if dp.value.norm() <= VALIDATE_TOL {
        return Err(SurfaceError::ValidationFailed(
            "the double point value must be nonzero".into(),
        ));
    }
    Ok(FamilyFacts::Disc(DiscFacts {
        t1: dp.s1,
        t2: dp.s2,
        alpha: dp.value,
        chart_radii: (dp.s1.sqrt(), dp.s2.sqrt()),
        min_gamma_speed: min_speed,
        special_params: vec![dp.s1, dp.s2],
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn klein_spot_values() {
        let k = SurfaceFamily::Klein(KleinParams::default());
        let p = k.eval(0.0, 0.0);
        assert_abs_diff_eq!(p.z.re, 9.0, epsilon = 1e-14);
        assert!(p.z.im.abs() < 1e-14 && p.w.norm() < 1e-14);
        let p = k.eval(0.0, -PI);
        assert_abs_diff_eq!(p.z.re, 1.0, epsilon = 1e-14);
        assert!(p.w.norm() < 1e-14);
        let p = k.eval(PI / 2.0, PI / 2.0);
        assert!((p.z - c(-4.0, 0.0)).norm() < 1e-13, "{:?}", p.z);
        assert!((p.w - c(0.0, 2.0)).norm() < 1e-13, "{:?}", p.w);
    }

    #[test]
    fn klein_param_validation() {
        assert!(KleinParams::new(2.0, 1.0).is_ok());
        assert!(matches!(
            KleinParams::new(1.0, 1.0),
            Err(SurfaceError::InvalidParams(_))
        ));
        assert!(KleinParams::new(1.0, 2.0).is_err());
        assert!(KleinParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn klein_identification_holds_and_images_stay_apart() {
        let params = KleinParams::default();
        let report = klein_identification_check(&params, 64).unwrap();
        assert!(
            report.max_identification_defect <= 1e-12,
            "defect {}",
            report.max_identification_defect
        );
        assert!(report.min_nonequivalent_distance > 0.0);
    }

    #[test]
    fn klein_tangent_frame_spot() {
        let k = SurfaceFamily::Klein(KleinParams::default());
        let (dt, dp) = k.tangent_frame(0.0, 0.0).unwrap();
        assert!((dt.z - c(0.0, 18.0)).norm() < 1e-13);
        assert!(dt.w.norm() < 1e-13);
        assert!(dp.z.norm() < 1e-13);
        assert!((dp.w - c(3.0, 6.0)).norm() < 1e-13);
        let det = tangent_det(&dt, &dp);
        assert_abs_diff_eq!(det.norm(), 54.0 * 5.0_f64.sqrt(), epsilon = 1e-9);
    }

    #[test]
    fn analytic_frames_match_finite_differences() {
        let families = [
            SurfaceFamily::Klein(KleinParams::default()),
            SurfaceFamily::KleinStar(KleinParams::default()),
            SurfaceFamily::HopfTorus(HopfTorusParams::default()),
            SurfaceFamily::SpinTorus(SpinTorusParams::default()),
            SurfaceFamily::Disc(DiscParams::default()),
        ];
        let samples = [(0.37, 1.21), (2.4, -0.9), (0.81, 4.33)];
        for fam in &families {
            for &(mut u, v) in &samples {
                if let SurfaceFamily::Disc(_) = fam {
                    u = 0.3 + 0.2 * u.sin().abs();
                }
                let (du, dv) = fam.tangent_frame(u, v).unwrap();
                let (fu, fv) = fam.tangent_frame_fd(u, v);
                assert!(du.dist(&fu) < 1e-8, "{} d/du at ({u}, {v})", fam.name());
                assert!(dv.dist(&fv) < 1e-8, "{} d/dv at ({u}, {v})", fam.name());
            }
        }
    }

    #[test]
    fn determinants_match_closed_forms() {
        // Klein: |det| = 2 g^3 |h'|; its mirror: 2 g |h'|; Hopf: |zeta'| / 2;
        // spin: r |z'|; disc: |gamma'|.
        let kp = KleinParams::default();
        let probe = |fam: &SurfaceFamily, u: f64, v: f64| {
            let (du, dv) = fam.tangent_frame(u, v).unwrap();
            tangent_det(&du, &dv).norm()
        };
        for &(u, v) in &[(0.3, 0.7), (-1.2, 2.9), (2.2, -2.5)] {
            let g = kp.g(v);
            let dh = klein_h_deriv(v).norm();
            assert_abs_diff_eq!(
                probe(&SurfaceFamily::Klein(kp), u, v),
                2.0 * g.powi(3) * dh,
                epsilon = 1e-10
            );
            assert_abs_diff_eq!(
                probe(&SurfaceFamily::KleinStar(kp), u, v),
                2.0 * g * dh,
                epsilon = 1e-10
            );
        }
        let hopf = HopfTorusParams::default();
        assert_abs_diff_eq!(
            probe(&SurfaceFamily::HopfTorus(hopf.clone()), 1.3, 0.4),
            hopf.projection_deriv(1.3).norm() / 2.0,
            epsilon = 1e-12
        );
        let spin = SpinTorusParams::default();
        assert_abs_diff_eq!(
            probe(&SurfaceFamily::SpinTorus(spin.clone()), 2.1, 5.0),
            spin.r_profile.eval(2.1) * spin.z_profile.deriv(2.1).norm(),
            epsilon = 1e-12
        );
        let disc = DiscParams::default();
        assert_abs_diff_eq!(
            probe(&SurfaceFamily::Disc(disc.clone()), 0.42, 1.0),
            disc.gamma_deriv(0.42).norm(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn total_reality_passes_on_defaults() {
        for fam in [
            SurfaceFamily::Klein(KleinParams::default()),
            SurfaceFamily::KleinStar(KleinParams::default()),
            SurfaceFamily::HopfTorus(HopfTorusParams::default()),
            SurfaceFamily::SpinTorus(SpinTorusParams::default()),
            SurfaceFamily::Disc(DiscParams::default()),
        ] {
            let report = total_reality_scan(&fam, 64).unwrap();
            assert!(report.pass, "{} min {}", report.family, report.min_abs_det);
            assert!(report.min_abs_det > 1e-3, "{}", report.family);
        }
        assert!(total_reality_scan(&SurfaceFamily::Klein(KleinParams::default()), 32).is_err());
    }

    #[test]
    fn hopf_map_basics() {
        let (e, h) = hopf_map(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!(e.norm() < 1e-15 && (h - 1.0).abs() < 1e-15);
        let r = 1.0 / 2.0_f64.sqrt();
        let (e, h) = hopf_map(c(r, 0.0), c(r, 0.0)).unwrap();
        assert!((e - c(1.0, 0.0)).norm() < 1e-12 && h.abs() < 1e-12);
        assert!(matches!(
            hopf_map(c(1.0, 0.0), c(1.0, 0.0)),
            Err(SurfaceError::NotOnSphere { .. })
        ));
        // Output lands on the unit sphere of C x R.
        for k in 0..32 {
            let t = 0.2 + 0.05 * k as f64;
            let z = Complex64::from_polar((0.3 + 0.02 * k as f64).cos(), t);
            let w = Complex64::from_polar((1.0 - z.norm_sqr()).sqrt(), -2.0 * t);
            let (e, h) = hopf_map(z, w).unwrap();
            assert!((e.norm_sqr() + h * h - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn hopf_fiber_value_is_projection() {
        // 2zw along the surface equals the projected profile, independent of
        // the circle angle.
        let p = HopfTorusParams::default();
        let fam = SurfaceFamily::HopfTorus(p.clone());
        for &(s, psi) in &[(0.0, 0.0), (1.1, 2.0), (4.0, -0.3)] {
            let pt = fam.eval(s, psi);
            assert!((2.0 * pt.z * pt.w - p.projection(s)).norm() < 1e-14);
            assert!((pt.z.norm_sqr() + pt.w.norm_sqr() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn validate_hopf_default_facts() {
        let facts = validate_family(&SurfaceFamily::HopfTorus(HopfTorusParams::default())).unwrap();
        let FamilyFacts::Hopf(f) = facts else {
            panic!("wrong facts variant")
        };
        // The crossing parameters solve tan(s) = -0.3/0.5, half a period
        // apart; the value has modulus cos(0.7 cos s*) and phase exactly 0.9.
        let s_star = (-0.3_f64).atan2(0.5);
        assert_abs_diff_eq!(f.s1, s_star + PI, epsilon = 1e-8);
        assert_abs_diff_eq!(f.s2, s_star + TWO_PI, epsilon = 1e-8);
        assert_abs_diff_eq!(f.a.norm(), 0.8251972256228391, epsilon = 1e-9);
        assert_abs_diff_eq!(f.a.arg(), 0.9, epsilon = 1e-9);
        let lat = (1.0 - f.a.norm_sqr()).sqrt();
        assert_abs_diff_eq!(f.latitudes.0.abs(), lat, epsilon = 1e-9);
        assert_abs_diff_eq!(f.latitudes.1.abs(), lat, epsilon = 1e-9);
        assert!(f.latitudes.0 * f.latitudes.1 < 0.0);
        assert!(f.min_sphere_self_distance > 0.1);
    }

    #[test]
    fn hopf_retracing_profile_is_rejected() {
        // A phase profile with only even harmonics makes the projection
        // retrace itself at half period: no isolated double point exists.
        let bad = HopfTorusParams {
            theta_profile: TrigPoly::new(PI / 2.0, vec![0.7], vec![]),
            phi_profile: TrigPoly::new(0.9, vec![], vec![0.0, 0.5]),
        };
        assert!(matches!(
            validate_family(&SurfaceFamily::HopfTorus(bad)),
            Err(SurfaceError::ValidationFailed(_))
        ));
    }

    #[test]
    fn validate_spin_default_facts() {
        let facts = validate_family(&SurfaceFamily::SpinTorus(SpinTorusParams::default())).unwrap();
        let FamilyFacts::Spin(f) = facts else {
            panic!("wrong facts variant")
        };
        assert!(f.z0.norm() < 1e-9);
        assert!(f.theta1.abs() < 1e-8 || (f.theta1 - TWO_PI).abs() < 1e-8);
        assert_abs_diff_eq!(f.theta2, PI, epsilon = 1e-8);
        assert_abs_diff_eq!(f.r1, 1.9, epsilon = 1e-9);
        assert_abs_diff_eq!(f.r2, 1.1, epsilon = 1e-9);
        assert_abs_diff_eq!(f.min_r, 1.1, epsilon = 1e-6);
    }

    #[test]
    fn embedded_spin_profile_is_rejected() {
        let bad = SpinTorusParams {
            z_profile: ComplexTrigPoly {
                re: TrigPoly::new(0.0, vec![1.0], vec![]),
                im: TrigPoly::new(0.0, vec![], vec![1.0]),
            },
            r_profile: TrigPoly::constant(1.5),
        };
        assert!(matches!(
            validate_family(&SurfaceFamily::SpinTorus(bad)),
            Err(SurfaceError::ValidationFailed(_))
        ));
    }

    #[test]
    fn validate_disc_default_facts() {
        let facts = validate_family(&SurfaceFamily::Disc(DiscParams::default())).unwrap();
        let FamilyFacts::Disc(f) = facts else {
            panic!("wrong facts variant")
        };
        // Moduli match symmetrically about the peak of t(1.1 - t) and the
        // phases differ by one full turn: t2 - t1 = 2 pi / omega.
        let t1 = (1.1 - TWO_PI / 8.0) / 2.0;
        assert_abs_diff_eq!(f.t1, t1, epsilon = 1e-9);
        assert_abs_diff_eq!(f.t2, 1.1 - t1, epsilon = 1e-9);
        let p = DiscParams::default();
        assert!((f.alpha - p.gamma(f.t1)).norm() < 1e-10);
        assert!((p.gamma(f.t1) - p.gamma(f.t2)).norm() < 1e-9);
        assert!(f.alpha.norm() > 0.1);
        assert_abs_diff_eq!(f.chart_radii.0, t1.sqrt(), epsilon = 1e-9);
    }

    #[test]
    fn disc_tangent_frame_rejects_the_polar_singularity() {
        let fam = SurfaceFamily::Disc(DiscParams::default());
        assert!(matches!(
            fam.tangent_frame(0.0, 1.0),
            Err(SurfaceError::DegeneratePoint { .. })
        ));
    }

    #[test]
    fn fiber_value_on_klein_is_theta_free() {
        let fam = SurfaceFamily::Klein(KleinParams::default());
        for &(theta, phi) in &[(0.4, -1.0), (2.0, -2.2), (-2.7, -0.4)] {
            let p = fam.eval(theta, phi);
            let f = p.w * p.w / p.z;
            let h = klein_h(phi);
            assert!((f - h * h).norm() < 1e-13);
        }
    }

    #[test]
    fn family_serde_round_trip() {
        let fams = [
            SurfaceFamily::Klein(KleinParams::default()),
            SurfaceFamily::HopfTorus(HopfTorusParams::default()),
            SurfaceFamily::Disc(DiscParams::default()),
        ];
        for fam in &fams {
            let json = serde_json::to_string(fam).unwrap();
            let back: SurfaceFamily = serde_json::from_str(&json).unwrap();
            assert_eq!(&back, fam);
        }
        let json = serde_json::to_string(&SurfaceFamily::Klein(KleinParams::default())).unwrap();
        assert!(json.contains("\"family\":\"klein\""), "{json}");
    }
}
