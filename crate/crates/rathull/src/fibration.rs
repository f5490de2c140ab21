//! The fiber-decomposition engine. A rational map f = p/q with the
//! convention f^{-1}(t) = {p = t q} slices each gallery surface into circle
//! fibers over an image curve; every fiber variety is a rational curve with
//! a one-coordinate chart in which the surface circles are concentric. The
//! candidate hull is the surface together with the bounded chart components
//! that dodge a fixed avoidance curve V.

use crate::curve::{curve_hits, min_self_distance, PlaneCurve};
use crate::numerics::{Tolerances, TWO_PI};
use crate::poly::BivariatePoly;
use crate::surfaces::{validate_family, FamilyFacts, SurfaceError, SurfaceFamily};
use crate::surfaces::{klein_h, klein_h_deriv, DiscParams, HopfTorusParams, SpinTorusParams};
use crate::types::Point2C;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FibrationError {
    #[error("no fiber decomposition is defined for the {0} family")]
    UnsupportedFamily(String),
    #[error("fibering map has a pole on the surface (min |q| = {min_abs_q:.3e})")]
    PoleOnSurface { min_abs_q: f64 },
    #[error("avoidance curve touches the surface (min |F| = {min_abs:.3e})")]
    AvoidanceTouchesSurface { min_abs: f64 },
    #[error("t = {t} is not on the image curve (distance {distance:.3e})")]
    NotOnGamma { t: Complex64, distance: f64 },
    #[error("fiber over t = {t} is singular; no circle chart exists")]
    SingularFiber { t: Complex64 },
    #[error("root finding failed: {0}")]
    RootFindFailure(String),
    #[error("fiber circle is not concentric in the chart (radius spread {spread:.3e})")]
    ChartMismatch { spread: f64 },
    #[error("solved circle leaves the variety (max |p - t q| = {residual:.3e})")]
    OffVariety { residual: f64 },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// Rational map f = p/q on C^2. Fibers follow the cleared-denominator
/// convention f^{-1}(t) = {p = t q}, which keeps t = 0 fibers meaningful.
#[derive(Debug, Clone)]
pub struct RationalMap {
    pub p: BivariatePoly,
    pub q: BivariatePoly,
    pub name: String,
}

impl RationalMap {
    pub fn new(p: BivariatePoly, q: BivariatePoly, name: impl Into<String>) -> Self {
        RationalMap {
            p,
            q,
            name: name.into(),
        }
    }

    /// The fibering map each family is analyzed with.
    pub fn for_family(family: &SurfaceFamily) -> Result<Self, FibrationError> {
        let z = BivariatePoly::z();
        let w = BivariatePoly::w();
        let one = BivariatePoly::constant(Complex64::new(1.0, 0.0));
        match family {
            SurfaceFamily::Klein(_) => Ok(RationalMap::new(&w * &w, z, "w^2/z")),
            SurfaceFamily::HopfTorus(_) => Ok(RationalMap::new(
                (&z * &w).scale(Complex64::new(2.0, 0.0)),
                one,
                "2zw",
            )),
            SurfaceFamily::SpinTorus(_) => Ok(RationalMap::new(z, one, "z")),
            SurfaceFamily::Disc(_) => Ok(RationalMap::new(&z * &w, one, "zw")),
            SurfaceFamily::KleinStar(_) => {
                Err(FibrationError::UnsupportedFamily(family.name().to_string()))
            }
        }
    }

    pub fn eval(&self, pt: &Point2C) -> Complex64 {
        self.p.eval(pt.z, pt.w) / self.q.eval(pt.z, pt.w)
    }

    /// |p - t q| at a point, the cleared-denominator fiber residual.
    pub fn fiber_residual(&self, pt: &Point2C, t: Complex64) -> f64 {
        (self.p.eval(pt.z, pt.w) - t * self.q.eval(pt.z, pt.w)).norm()
    }

    /// Minimum of |q| over a surface parameter grid.
    pub fn min_abs_q_on(&self, family: &SurfaceFamily, n: usize) -> f64 {
        min_abs_on_surface(family, n, |pt| self.q.eval(pt.z, pt.w).norm())
    }
}

/// The curve V = {F = 0} that attached components must avoid. The hull can
/// never meet V: 1/F is defined near the surface, so its modulus on the hull
/// is controlled by its maximum on the surface.
#[derive(Debug, Clone)]
pub struct AvoidanceCurve {
    pub f: BivariatePoly,
    pub name: String,
}

impl AvoidanceCurve {
    pub fn new(f: BivariatePoly, name: impl Into<String>) -> Self {
        AvoidanceCurve {
            f,
            name: name.into(),
        }
    }

    /// The avoidance curve paired with each family's fibering map: {z = 0}
    /// for the Klein bottle and the Hopf torus, {w = 0} for the spin torus,
    /// {z = 2} for the disc.
    pub fn for_family(family: &SurfaceFamily) -> Result<Self, FibrationError> {
        let z = BivariatePoly::z();
        match family {
            SurfaceFamily::Klein(_) | SurfaceFamily::HopfTorus(_) => {
                Ok(AvoidanceCurve::new(z, "z = 0"))
            }
            SurfaceFamily::SpinTorus(_) => Ok(AvoidanceCurve::new(BivariatePoly::w(), "w = 0")),
            SurfaceFamily::Disc(_) => Ok(AvoidanceCurve::new(
                &z - &BivariatePoly::constant(Complex64::new(2.0, 0.0)),
                "z = 2",
            )),
            SurfaceFamily::KleinStar(_) => {
                Err(FibrationError::UnsupportedFamily(family.name().to_string()))
            }
        }
    }

    pub fn min_abs_on(&self, family: &SurfaceFamily, n: usize) -> f64 {
        min_abs_on_surface(family, n, |pt| self.f.eval(pt.z, pt.w).norm())
    }
}

fn min_abs_on_surface(
    family: &SurfaceFamily,
    n: usize,
    value: impl Fn(&Point2C) -> f64,
) -> f64 {
    let ((u0, u1), (v0, v1)) = family.domain();
    let (per_u, per_v) = family.periodic();
    let coord = |lo: f64, hi: f64, periodic: bool, k: usize| {
        if periodic {
            lo + (hi - lo) * k as f64 / n as f64
        } else {
            lo + (hi - lo) * (k as f64 + 0.5) / n as f64
        }
    };
    let mut min = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            let pt = family.eval(coord(u0, u1, per_u, i), coord(v0, v1, per_v, j));
            min = min.min(value(&pt));
        }
    }
    min
}

/// The image curve of the fibering map, parametrized by the profile
/// coordinate of the family: h(phi)^2 on [-pi, 0] for the Klein bottle
/// (closed through 0), the projected profile for the Hopf torus, the
/// z-profile for the spin torus, and t f(t) on [0, 1] for the disc.
#[derive(Debug, Clone)]
pub enum GammaCurve {
    Klein,
    Hopf(HopfTorusParams),
    Spin(SpinTorusParams),
    Disc(DiscParams),
}

impl GammaCurve {
    pub fn of(family: &SurfaceFamily) -> Result<Self, FibrationError> {
        match family {
            SurfaceFamily::Klein(_) => Ok(GammaCurve::Klein),
            SurfaceFamily::HopfTorus(p) => Ok(GammaCurve::Hopf(p.clone())),
            SurfaceFamily::SpinTorus(p) => Ok(GammaCurve::Spin(p.clone())),
            SurfaceFamily::Disc(p) => Ok(GammaCurve::Disc(p.clone())),
            SurfaceFamily::KleinStar(_) => {
                Err(FibrationError::UnsupportedFamily(family.name().to_string()))
            }
        }
    }
}

impl PlaneCurve for GammaCurve {
    fn eval(&self, s: f64) -> Complex64 {
        match self {
            GammaCurve::Klein => {
                let h = klein_h(s);
                h * h
            }
            GammaCurve::Hopf(p) => p.projection(s),
            GammaCurve::Spin(p) => p.z_profile.eval(s),
            GammaCurve::Disc(p) => p.gamma(s),
        }
    }

    fn deriv(&self, s: f64) -> Complex64 {
        match self {
            GammaCurve::Klein => 2.0 * klein_h(s) * klein_h_deriv(s),
            GammaCurve::Hopf(p) => p.projection_deriv(s),
            GammaCurve::Spin(p) => p.z_profile.deriv(s),
            GammaCurve::Disc(p) => p.gamma_deriv(s),
        }
    }

    fn domain(&self) -> (f64, f64) {
        match self {
            GammaCurve::Klein => (-PI, 0.0),
            GammaCurve::Hopf(_) | GammaCurve::Spin(_) => (0.0, TWO_PI),
            GammaCurve::Disc(_) => (0.0, 1.0),
        }
    }

    fn is_closed(&self) -> bool {
        !matches!(self, GammaCurve::Disc(_))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DoublePointSummary {
    pub s1: f64,
    pub s2: f64,
    pub value: Complex64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GammaReport {
    pub family: String,
    pub map: String,
    pub params: Vec<f64>,
    pub values: Vec<Complex64>,
    pub closed: bool,
    pub max_abs: f64,
    pub min_abs_q_on_surface: f64,
    /// Minimum distance between parameter-separated samples; positive means
    /// the curve shows no self-contact at this resolution. Reported for the
    /// Klein curve, whose loop is expected simple.
    pub min_self_distance: Option<f64>,
    /// Self-intersections for the families whose image curve is expected to
    /// cross itself exactly once.
    pub double_points: Vec<DoublePointSummary>,
}

/// Samples the image curve and checks its regularity. The fibering map is
/// evaluated on the surface at a few spot angles to confirm it only depends
/// on the profile parameter.
pub fn gamma_curve(
    family: &SurfaceFamily,
    f: &RationalMap,
    m: usize,
) -> Result<GammaReport, FibrationError> {
    family.check_params()?;
    let min_abs_q = f.min_abs_q_on(family, 128);
    if !(min_abs_q > 1e-9) {
        return Err(FibrationError::PoleOnSurface {
            min_abs_q,
        });
    }
    let curve = GammaCurve::of(family)?;
    let (a, b) = curve.domain();
    let closed = curve.is_closed();
    let count = m.max(256);
    let params: Vec<f64> = if closed {
        (0..count)
            .map(|k| a + (b - a) * k as f64 / count as f64)
            .collect()
    } else {
        (0..=count)
            .map(|k| a + (b - a) * k as f64 / count as f64)
            .collect()
    };
    let values: Vec<Complex64> = params.iter().map(|&s| curve.eval(s)).collect();
    let max_abs = values.iter().map(|v| v.norm()).fold(0.0, f64::max);

    // The curve must really be the fiber value: compare against f on the
    // surface at spot checks around the fiber circles.
    for &s in params.iter().step_by((count / 16).max(1)) {
        for ang in [0.0, 1.1, 4.4] {
            let pt = fiber_circle_point(family, s, ang);
            let expect = curve.eval(s);
            if (f.eval(&pt) - expect).norm() > 1e-9 * (1.0 + expect.norm()) {
                return Err(FibrationError::RootFindFailure(format!(
                    "fiber value at parameter {s} disagrees with the image curve"
                )));
            }
        }
    }

    let closure_gap = (curve.eval(a) - curve.eval(b)).norm();
    let closed_ok = !closed || closure_gap < 1e-12;

    let (min_self, dps) = match &curve {
        GammaCurve::Klein => {
            let step = (b - a) / count as f64;
            let d = min_self_distance(&curve, count, 8.0 * step);
            (Some(d), Vec::new())
        }
        _ => {
            let dps = crate::curve::double_points(&curve, count.max(1024), 1e-9);
            (
                None,
                dps.iter()
                    .map(|dp| DoublePointSummary {
                        s1: dp.s1,
                        s2: dp.s2,
                        value: dp.value,
                    })
                    .collect(),
            )
        }
    };

    Ok(GammaReport {
        family: family.name().to_string(),
        map: f.name.clone(),
        params,
        values,
        closed: closed_ok,
        max_abs,
        min_abs_q_on_surface: min_abs_q,
        min_self_distance: min_self,
        double_points: dps,
    })
}

/// A point of the circle fiber over profile parameter `param` at the given
/// circle angle. The Klein fiber circles run along the first surface
/// parameter, all others along the second.
pub fn fiber_circle_point(family: &SurfaceFamily, param: f64, angle: f64) -> Point2C {
    match family {
        SurfaceFamily::Klein(_) | SurfaceFamily::KleinStar(_) => family.eval(angle, param),
        _ => family.eval(param, angle),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChartKind {
    /// u = w on {w^2 = t z}, t != 0; the origin of C^2 is an interior point.
    KleinW,
    /// u = z on the t = 0 Klein fiber, the plane {w = 0} carried with
    /// multiplicity two by the cleared equation {w^2 = 0}.
    KleinZeroZ,
    /// u = z on {2zw = t}, t != 0; u -> 0 forces w -> infinity, so the chart
    /// origin is a puncture with an unbounded end.
    HopfZ,
    /// u = w on the line {z = t}.
    SpinW,
    /// u = z on {zw = t}, t != 0; punctured at the origin like the Hopf case.
    DiscZ,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OriginStatus {
    InteriorPoint,
    Puncture,
    Absent,
}

/// One-coordinate chart of a fiber variety, with the locus where the chart
/// meets the avoidance curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanarChart {
    pub kind: ChartKind,
    pub t: Complex64,
    pub origin: OriginStatus,
    pub v_locus: Vec<Complex64>,
    /// Scheme multiplicity of the fiber equation along the chart; 2 for the
    /// Klein t = 0 plane, 1 everywhere else.
    pub multiplicity: u32,
}

impl PlanarChart {
    /// Embeds a chart value into C^2 on the fiber variety.
    pub fn ambient(&self, u: Complex64) -> Point2C {
        match self.kind {
            ChartKind::KleinW => Point2C::new(u * u / self.t, u),
            ChartKind::KleinZeroZ => Point2C::new(u, Complex64::new(0.0, 0.0)),
            ChartKind::HopfZ => Point2C::new(u, self.t / (2.0 * u)),
            ChartKind::SpinW => Point2C::new(self.t, u),
            ChartKind::DiscZ => Point2C::new(u, self.t / u),
        }
    }

    /// The chart circle |u| = radius as an ambient circle, where that loop
    /// is a round circle of the (e^{i beta}, e^{-i beta}) kind. The Klein
    /// w-chart loop winds twice in z per w turn, so it has no such form.
    pub fn boundary_circle(&self, radius: f64) -> Option<CircleInC2> {
        let zero = Complex64::new(0.0, 0.0);
        let r = Complex64::new(radius, 0.0);
        match self.kind {
            ChartKind::KleinW => None,
            ChartKind::KleinZeroZ => Some(CircleInC2 {
                z_center: zero,
                w_center: zero,
                z_coeff: r,
                w_coeff: zero,
            }),
            ChartKind::HopfZ => Some(CircleInC2 {
                z_center: zero,
                w_center: zero,
                z_coeff: r,
                w_coeff: self.t / (2.0 * radius),
            }),
            ChartKind::SpinW => Some(CircleInC2 {
                z_center: self.t,
                w_center: zero,
                z_coeff: zero,
                w_coeff: r,
            }),
            ChartKind::DiscZ => Some(CircleInC2 {
                z_center: zero,
                w_center: zero,
                z_coeff: r,
                w_coeff: self.t / radius,
            }),
        }
    }
}

/// Round circle in C^2 of the form
/// beta -> (z_center + z_coeff e^{i beta}, w_center + w_coeff e^{-i beta}).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CircleInC2 {
    pub z_center: Complex64,
    pub w_center: Complex64,
    pub z_coeff: Complex64,
    pub w_coeff: Complex64,
}

impl CircleInC2 {
    pub fn point(&self, beta: f64) -> Point2C {
        let e = Complex64::from_polar(1.0, beta);
        Point2C::new(
            self.z_center + self.z_coeff * e,
            self.w_center + self.w_coeff * e.conj(),
        )
    }

    /// Exact distance from a point to the circle: the beta-dependence of the
    /// squared distance is a single harmonic, minimized in closed form.
    pub fn distance(&self, p: &Point2C) -> f64 {
        let dz = p.z - self.z_center;
        let dw = p.w - self.w_center;
        let a = dz.conj() * self.z_coeff;
        let b = dw.conj() * self.w_coeff;
        let d0 = dz.norm_sqr() + dw.norm_sqr() + self.z_coeff.norm_sqr() + self.w_coeff.norm_sqr();
        (d0 - 2.0 * (a + b.conj()).norm()).max(0.0).sqrt()
    }

    /// Symmetric Hausdorff distance between two circles, sampled on one and
    /// measured exactly against the other.
    pub fn hausdorff(&self, other: &CircleInC2, samples: usize) -> f64 {
        let one_way = |from: &CircleInC2, to: &CircleInC2| {
            (0..samples)
                .map(|k| to.distance(&from.point(TWO_PI * k as f64 / samples as f64)))
                .fold(0.0, f64::max)
        };
        one_way(self, other).max(one_way(other, self))
    }
}

/// Builds the planar chart of the fiber variety {p = t q} for the family's
/// fibering map.
pub fn variety_chart(
    family: &SurfaceFamily,
    t: Complex64,
    tol: &Tolerances,
) -> Result<PlanarChart, FibrationError> {
    let small = t.norm() <= tol.zero_tol;
    match family {
        SurfaceFamily::Klein(_) => {
            if small {
                Ok(PlanarChart {
                    kind: ChartKind::KleinZeroZ,
                    t: Complex64::new(0.0, 0.0),
                    origin: OriginStatus::InteriorPoint,
                    // V = {z = 0} meets the plane {w = 0} at the origin.
                    v_locus: vec![Complex64::new(0.0, 0.0)],
                    multiplicity: 2,
                })
            } else {
                Ok(PlanarChart {
                    kind: ChartKind::KleinW,
                    t,
                    origin: OriginStatus::InteriorPoint,
                    // z = u^2 / t vanishes only at the chart origin.
                    v_locus: vec![Complex64::new(0.0, 0.0)],
                    multiplicity: 1,
                })
            }
        }
        SurfaceFamily::HopfTorus(_) => {
            if small {
                return Err(FibrationError::SingularFiber { t });
            }
            Ok(PlanarChart {
                kind: ChartKind::HopfZ,
                t,
                origin: OriginStatus::Puncture,
                // {z = 0} cannot meet {2zw = t} for t != 0.
                v_locus: vec![],
                multiplicity: 1,
            })
        }
        SurfaceFamily::SpinTorus(_) => Ok(PlanarChart {
            kind: ChartKind::SpinW,
            t,
            origin: OriginStatus::InteriorPoint,
            // V = {w = 0} meets the line {z = t} at w = 0.
            v_locus: vec![Complex64::new(0.0, 0.0)],
            multiplicity: 1,
        }),
        SurfaceFamily::Disc(_) => {
            if small {
                return Err(FibrationError::SingularFiber { t });
            }
            Ok(PlanarChart {
                kind: ChartKind::DiscZ,
                t,
                origin: OriginStatus::Puncture,
                // V = {z = 2} meets {zw = t} at the single chart point u = 2.
                v_locus: vec![Complex64::new(2.0, 0.0)],
                multiplicity: 1,
            })
        }
        SurfaceFamily::KleinStar(_) => {
            Err(FibrationError::UnsupportedFamily(family.name().to_string()))
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiberCircle {
    /// Profile parameter of the circle (phi, s, theta, or t by family).
    pub param: f64,
    /// Chart radius |u| of the circle.
    pub radius: f64,
    /// Max |p - t q| over the validation samples.
    pub variety_residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiberSolution {
    pub t: Complex64,
    pub chart: PlanarChart,
    pub circles: Vec<FiberCircle>,
}

const FIBER_SCAN: usize = 2048;
const CIRCLE_SAMPLES: usize = 64;

/// All circles of the surface lying on the fiber {p = t q}. An empty circle
/// list for t off the image curve is a valid answer, not an error.
pub fn fiber_solve(
    family: &SurfaceFamily,
    f: &RationalMap,
    t: Complex64,
    tol: &Tolerances,
) -> Result<FiberSolution, FibrationError> {
    family.check_params()?;
    let chart = variety_chart(family, t, tol)?;

    // The Klein t = 0 fiber needs no search: the profile height vanishes
    // exactly at the ends of the profile interval.
    let params: Vec<f64> = if matches!(chart.kind, ChartKind::KleinZeroZ) {
        vec![-PI, 0.0]
    } else {
        let curve = GammaCurve::of(family)?;
        // Hits are polished well below zero_tol so the cleared-denominator
        // residual |p - t q| stays under 1e-9 after multiplying by |q|.
        curve_hits(&curve, t, FIBER_SCAN, (tol.zero_tol * 1e-3).min(1e-12))
            .into_iter()
            .map(|h| h.s)
            .collect()
    };

    let mut circles = Vec::with_capacity(params.len());
    for param in params {
        let radius = chart_radius(family, &chart, param);
        let mut max_resid = 0.0_f64;
        let mut max_spread = 0.0_f64;
        for k in 0..CIRCLE_SAMPLES {
            let ang = TWO_PI * k as f64 / CIRCLE_SAMPLES as f64;
            let pt = fiber_circle_point(family, param, ang);
            max_resid = max_resid.max(f.fiber_residual(&pt, t));
            let u = match chart_coord(&chart) {
                ChartAxis::Z => pt.z,
                ChartAxis::W => pt.w,
            };
            max_spread = max_spread.max((u.norm() - radius).abs());
        }
        if max_resid > 1e-9 {
            return Err(FibrationError::OffVariety {
                residual: max_resid,
            });
        }
        if max_spread > 1e-9 {
            return Err(FibrationError::ChartMismatch { spread: max_spread });
        }
        circles.push(FiberCircle {
            param,
            radius,
            variety_residual: max_resid,
        });
    }
    circles.sort_by(|a, b| a.radius.total_cmp(&b.radius));
    Ok(FiberSolution { t, chart, circles })
}

/// Strict variant: t must lie on the image curve.
pub fn fiber_solve_on_gamma(
    family: &SurfaceFamily,
    f: &RationalMap,
    t: Complex64,
    tol: &Tolerances,
) -> Result<FiberSolution, FibrationError> {
    let solution = fiber_solve(family, f, t, tol)?;
    if solution.circles.is_empty() {
        let curve = GammaCurve::of(family)?;
        let (a, b) = curve.domain();
        let distance = (0..FIBER_SCAN)
            .map(|k| {
                let s = a + (b - a) * k as f64 / FIBER_SCAN as f64;
                (curve.eval(s) - t).norm()
            })
            .fold(f64::INFINITY, f64::min);
        if distance > 1e-6 {
            return Err(FibrationError::NotOnGamma { t, distance });
        }
        return Err(FibrationError::RootFindFailure(format!(
            "t = {t} lies on the image curve (distance {distance:.3e}) but no circle was solved"
        )));
    }
    Ok(solution)
}

enum ChartAxis {
    Z,
    W,
}

fn chart_coord(chart: &PlanarChart) -> ChartAxis {
    match chart.kind {
        ChartKind::KleinW | ChartKind::SpinW => ChartAxis::W,
        ChartKind::KleinZeroZ | ChartKind::HopfZ | ChartKind::DiscZ => ChartAxis::Z,
    }
}

fn chart_radius(family: &SurfaceFamily, chart: &PlanarChart, param: f64) -> f64 {
    match (family, chart.kind) {
        (SurfaceFamily::Klein(p), ChartKind::KleinZeroZ) => p.g(param).powi(2),
        (SurfaceFamily::Klein(p), ChartKind::KleinW) => p.g(param) * klein_h(param).norm(),
        (SurfaceFamily::HopfTorus(p), ChartKind::HopfZ) => {
            (p.theta_profile.eval(param) / 2.0).cos()
        }
        (SurfaceFamily::SpinTorus(p), ChartKind::SpinW) => p.r_profile.eval(param),
        (SurfaceFamily::Disc(_), ChartKind::DiscZ) => param.max(0.0).sqrt(),
        _ => unreachable!("chart kind always matches the family that built it"),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiberComponent {
    /// None marks the disc about the chart origin.
    pub inner_radius: Option<f64>,
    pub outer_radius: f64,
    pub contains_v: bool,
    /// Bounded in C^2 and disjoint from the avoidance curve.
    pub attached: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentInventory {
    pub merged_radii: Vec<f64>,
    pub components: Vec<FiberComponent>,
}

/// Bounded components of (fiber variety) minus (fiber circles), read off the
/// concentric-circle chart. The region inside the smallest circle is bounded
/// only when the chart origin is a genuine point of the variety; the outer
/// region is always unbounded and never listed.
pub fn bounded_components(chart: &PlanarChart, radii: &[f64]) -> ComponentInventory {
    let mut merged: Vec<f64> = Vec::new();
    let mut sorted = radii.to_vec();
    sorted.sort_by(f64::total_cmp);
    for r in sorted {
        if merged.last().map_or(true, |last| r - last > 1e-9) {
            merged.push(r);
        }
    }
    let mut components = Vec::new();
    if merged.is_empty() {
        return ComponentInventory {
            merged_radii: merged,
            components,
        };
    }
    if matches!(chart.origin, OriginStatus::InteriorPoint) {
        let r = merged[0];
        let contains_v = chart.v_locus.iter().any(|v| v.norm() < r);
        components.push(FiberComponent {
            inner_radius: None,
            outer_radius: r,
            contains_v,
            attached: !contains_v,
        });
    }
    for pair in merged.windows(2) {
        let (r1, r2) = (pair[0], pair[1]);
        let contains_v = chart
            .v_locus
            .iter()
            .any(|v| v.norm() > r1 && v.norm() < r2);
        components.push(FiberComponent {
            inner_radius: Some(r1),
            outer_radius: r2,
            contains_v,
            attached: !contains_v,
        });
    }
    ComponentInventory {
        merged_radii: merged,
        components,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttachedComponent {
    pub t: Complex64,
    pub chart: PlanarChart,
    /// None for a disc component; the gallery only ever attaches annuli.
    pub inner_radius: Option<f64>,
    pub outer_radius: f64,
    /// Profile parameters whose fibers produced this component.
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepFiberSummary {
    pub param: f64,
    pub t: Complex64,
    pub circles: usize,
    pub bounded: usize,
    pub attached: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HullDecomposition {
    pub family: String,
    pub map: String,
    pub avoidance: String,
    /// Function-theoretic hypothesis the decomposition relies on but does
    /// not check.
    pub hypothesis_note: String,
    pub min_abs_avoidance_on_surface: f64,
    pub gamma: GammaReport,
    pub reps: Vec<RepFiberSummary>,
    pub attached: Vec<AttachedComponent>,
    pub tolerances: Tolerances,
}

pub const DENSITY_HYPOTHESIS_NOTE: &str = "assumes rational functions are uniformly dense in \
the continuous functions on the image curve of the fibering map; recorded as a hypothesis, \
not verified numerically";

/// Decomposes the candidate hull: surface plus every bounded V-avoiding
/// fiber component over the image curve, merged across representatives.
///
/// Representatives are profile parameters (`resolution` uniform values plus
/// the family's special parameters), so fibers are never solved by inverting
/// the image curve near its critical values.
pub fn hull_decompose(
    family: &SurfaceFamily,
    f: &RationalMap,
    v: &AvoidanceCurve,
    resolution: usize,
    tol: &Tolerances,
) -> Result<HullDecomposition, FibrationError> {
    family.check_params()?;
    let facts = validate_family(family)?;
    let min_abs_v = v.min_abs_on(family, 128);
    if !(min_abs_v > tol.zero_tol) {
        return Err(FibrationError::AvoidanceTouchesSurface { min_abs: min_abs_v });
    }
    let gamma = gamma_curve(family, f, resolution)?;
    let curve = GammaCurve::of(family)?;
    let (a, b) = curve.domain();

    let mut params: Vec<f64> = if curve.is_closed() {
        (0..resolution)
            .map(|k| a + (b - a) * k as f64 / resolution as f64)
            .collect()
    } else {
        (0..=resolution)
            .map(|k| a + (b - a) * k as f64 / resolution as f64)
            .collect()
    };
    params.extend_from_slice(facts.special_params());

    let mut reps = Vec::with_capacity(params.len());
    let mut attached: Vec<AttachedComponent> = Vec::new();
    for &param in &params {
        let t = curve.eval(param);
        let solution = match fiber_solve(family, f, t, tol) {
            Ok(s) => s,
            // A collapsed fiber carries no bounded components; for the disc
            // this is the arc endpoint t = 0, where the fiber degenerates to
            // the origin.
            Err(FibrationError::SingularFiber { .. }) => {
                reps.push(RepFiberSummary {
                    param,
                    t,
                    circles: 0,
                    bounded: 0,
                    attached: 0,
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let radii: Vec<f64> = solution.circles.iter().map(|c| c.radius).collect();
        let inventory = bounded_components(&solution.chart, &radii);
        let n_attached = inventory.components.iter().filter(|c| c.attached).count();
        reps.push(RepFiberSummary {
            param,
            t,
            circles: solution.circles.len(),
            bounded: inventory.components.len(),
            attached: n_attached,
        });
        for comp in inventory.components.iter().filter(|c| c.attached) {
            merge_attached(&mut attached, &solution, comp, param);
        }
    }

    Ok(HullDecomposition {
        family: family.name().to_string(),
        map: f.name.clone(),
        avoidance: v.name.clone(),
        hypothesis_note: DENSITY_HYPOTHESIS_NOTE.to_string(),
        min_abs_avoidance_on_surface: min_abs_v,
        gamma,
        reps,
        attached,
        tolerances: *tol,
    })
}

fn merge_attached(
    attached: &mut Vec<AttachedComponent>,
    solution: &FiberSolution,
    comp: &FiberComponent,
    param: f64,
) {
    let same = attached.iter_mut().find(|existing| {
        (existing.t - solution.t).norm() <= 1e-9
            && (existing.outer_radius - comp.outer_radius).abs() <= 1e-9
            && match (existing.inner_radius, comp.inner_radius) {
                (None, None) => true,
                (Some(x), Some(y)) => (x - y).abs() <= 1e-9,
                _ => false,
            }
    });
    match same {
        Some(existing) => {
            if !existing
                .params
                .iter()
                .any(|&p| (p - param).abs() <= 1e-9)
            {
                existing.params.push(param);
            }
        }
        None => attached.push(AttachedComponent {
            t: solution.t,
            chart: solution.chart.clone(),
            inner_radius: comp.inner_radius,
            outer_radius: comp.outer_radius,
            params: vec![param],
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::KleinParams;
    use approx::assert_abs_diff_eq;

    fn klein() -> SurfaceFamily {
        SurfaceFamily::Klein(KleinParams::default())
    }

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn fibering_on_klein_is_profile_only() {
        let fam = klein();
        let f = RationalMap::for_family(&fam).unwrap();
        for &(theta, phi) in &[(0.3, -0.8), (1.9, -2.9), (-2.0, -1.3)] {
            let pt = fam.eval(theta, phi);
            let h = klein_h(phi);
            assert!((f.eval(&pt) - h * h).norm() < 1e-12);
        }
        assert!(f.min_abs_q_on(&fam, 64) > 0.99);
    }

    #[test]
    fn klein_zero_fiber_has_exact_annulus_radii() {
        let fam = klein();
        let f = RationalMap::for_family(&fam).unwrap();
        let sol = fiber_solve(&fam, &f, Complex64::new(0.0, 0.0), &tols()).unwrap();
        assert_eq!(sol.circles.len(), 2);
        assert_eq!(sol.circles[0].radius, 1.0);
        assert_eq!(sol.circles[1].radius, 9.0);
        assert_eq!(sol.chart.multiplicity, 2);
        assert!(matches!(sol.chart.kind, ChartKind::KleinZeroZ));
    }

    #[test]
    fn klein_unit_fiber_is_one_circle() {
        let fam = klein();
        let f = RationalMap::for_family(&fam).unwrap();
        let sol = fiber_solve(&fam, &f, Complex64::new(1.0, 0.0), &tols()).unwrap();
        assert_eq!(sol.circles.len(), 1);
        let c = &sol.circles[0];
        assert_abs_diff_eq!(c.param, -PI / 2.0, epsilon = 1e-10);
        // |w| = g(-pi/2) |h(-pi/2)| = 2.
        assert_abs_diff_eq!(c.radius, 2.0, epsilon = 1e-12);
        let p = fiber_circle_point(&fam, c.param, 0.0);
        assert!((p.z - Complex64::new(4.0, 0.0)).norm() < 1e-10);
        assert!((p.w - Complex64::new(-2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn off_curve_fiber_is_empty_and_strict_mode_objects() {
        let fam = klein();
        let f = RationalMap::for_family(&fam).unwrap();
        let t = Complex64::new(5.0, 5.0);
        let sol = fiber_solve(&fam, &f, t, &tols()).unwrap();
        assert!(sol.circles.is_empty());
        assert!(matches!(
            fiber_solve_on_gamma(&fam, &f, t, &tols()),
            Err(FibrationError::NotOnGamma { .. })
        ));
    }

    #[test]
    fn fiber_circles_sit_on_the_variety() {
        let fam = klein();
        let f = RationalMap::for_family(&fam).unwrap();
        let curve = GammaCurve::of(&fam).unwrap();
        for &phi in &[-0.3, -1.2, -2.0, -2.9] {
            let t = curve.eval(phi);
            let sol = fiber_solve_on_gamma(&fam, &f, t, &tols()).unwrap();
            for c in &sol.circles {
                assert!(c.variety_residual < 1e-9, "residual {}", c.variety_residual);
            }
        }
    }

    #[test]
    fn gamma_report_klein() {
        let fam = klein();
        let f = RationalMap::for_family(&fam).unwrap();
        let report = gamma_curve(&fam, &f, 2048).unwrap();
        assert!(report.closed);
        assert!(report.min_self_distance.unwrap() > 0.0);
        assert!(report.double_points.is_empty());
        // Image of phi = -pi/2 is exactly 1, and the loop tops out at 25/16.
        let curve = GammaCurve::Klein;
        assert!((curve.eval(-PI / 2.0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert_abs_diff_eq!(report.max_abs, 25.0 / 16.0, epsilon = 1e-4);
    }

    #[test]
    fn charts_by_family() {
        let tol = tols();
        let t1 = Complex64::new(1.0, 0.0);
        let chart = variety_chart(&klein(), t1, &tol).unwrap();
        assert!(matches!(chart.kind, ChartKind::KleinW));
        assert!(matches!(chart.origin, OriginStatus::InteriorPoint));
        assert_eq!(chart.v_locus.len(), 1);

        let hopf = SurfaceFamily::HopfTorus(Default::default());
        let chart = variety_chart(&hopf, t1, &tol).unwrap();
        assert!(matches!(chart.origin, OriginStatus::Puncture));
        assert!(chart.v_locus.is_empty());
        assert!(matches!(
            variety_chart(&hopf, Complex64::new(0.0, 0.0), &tol),
            Err(FibrationError::SingularFiber { .. })
        ));

        let disc = SurfaceFamily::Disc(Default::default());
        let chart = variety_chart(&disc, t1, &tol).unwrap();
        assert_eq!(chart.v_locus, vec![Complex64::new(2.0, 0.0)]);
        assert!(matches!(
            variety_chart(&disc, Complex64::new(0.0, 0.0), &tol),
            Err(FibrationError::SingularFiber { .. })
        ));

        let spin = SurfaceFamily::SpinTorus(Default::default());
        let chart = variety_chart(&spin, Complex64::new(0.0, 0.0), &tol).unwrap();
        assert!(matches!(chart.kind, ChartKind::SpinW));
        assert!(matches!(chart.origin, OriginStatus::InteriorPoint));
    }

    #[test]
    fn component_inventories() {
        let tol = tols();
        // Klein t = 0: disc swallows V, annulus 1 < |u| < 9 is attached.
        let chart = variety_chart(&klein(), Complex64::new(0.0, 0.0), &tol).unwrap();
        let inv = bounded_components(&chart, &[1.0, 9.0]);
        assert_eq!(inv.components.len(), 2);
        assert!(inv.components[0].contains_v && !inv.components[0].attached);
        assert!(!inv.components[1].contains_v && inv.components[1].attached);

        // Single circle: only the excluded disc.
        let chart = variety_chart(&klein(), Complex64::new(1.0, 0.0), &tol).unwrap();
        let inv = bounded_components(&chart, &[2.0]);
        assert_eq!(inv.components.len(), 1);
        assert!(!inv.components[0].attached);

        // Punctured chart: a single circle bounds nothing.
        let hopf = SurfaceFamily::HopfTorus(Default::default());
        let chart = variety_chart(&hopf, Complex64::new(0.5, 0.0), &tol).unwrap();
        let inv = bounded_components(&chart, &[0.7]);
        assert!(inv.components.is_empty());
        // Two circles bound an attached annulus even through the puncture.
        let inv = bounded_components(&chart, &[0.4, 0.7]);
        assert_eq!(inv.components.len(), 1);
        assert!(inv.components[0].attached);

        // Nearly equal radii merge.
        let inv = bounded_components(&chart, &[0.7, 0.7 + 1e-12]);
        assert_eq!(inv.merged_radii.len(), 1);
        assert!(inv.components.is_empty());
    }

    #[test]
    fn klein_hull_is_surface_plus_one_annulus() {
        let fam = klein();
        let f = RationalMap::for_family(&fam).unwrap();
        let v = AvoidanceCurve::for_family(&fam).unwrap();
        let hull = hull_decompose(&fam, &f, &v, 256, &tols()).unwrap();
        assert_eq!(hull.attached.len(), 1, "{:?}", hull.attached);
        let ann = &hull.attached[0];
        assert_eq!(ann.inner_radius, Some(1.0));
        assert_eq!(ann.outer_radius, 9.0);
        assert!(ann.t.norm() < 1e-12);
        // The annulus is found from both profile ends and nowhere else.
        for rep in &hull.reps {
            let expects = rep.t.norm() <= 1e-9;
            assert_eq!(rep.attached > 0, expects, "param {}", rep.param);
        }
        assert!(hull.min_abs_avoidance_on_surface > 0.99);
        assert!(!hull.hypothesis_note.is_empty());
    }

    #[test]
    fn spin_hull_annulus_matches_profile_radii() {
        let fam = SurfaceFamily::SpinTorus(Default::default());
        let f = RationalMap::for_family(&fam).unwrap();
        let v = AvoidanceCurve::for_family(&fam).unwrap();
        let hull = hull_decompose(&fam, &f, &v, 256, &tols()).unwrap();
        assert_eq!(hull.attached.len(), 1);
        let ann = &hull.attached[0];
        assert!(ann.t.norm() < 1e-9);
        assert_abs_diff_eq!(ann.inner_radius.unwrap(), 1.1, epsilon = 1e-9);
        assert_abs_diff_eq!(ann.outer_radius, 1.9, epsilon = 1e-9);
    }

    #[test]
    fn hopf_hull_annulus_sits_between_mirror_latitudes() {
        let fam = SurfaceFamily::HopfTorus(Default::default());
        let f = RationalMap::for_family(&fam).unwrap();
        let v = AvoidanceCurve::for_family(&fam).unwrap();
        let hull = hull_decompose(&fam, &f, &v, 256, &tols()).unwrap();
        assert_eq!(hull.attached.len(), 1);
        let ann = &hull.attached[0];
        let facts = validate_family(&fam).unwrap();
        let FamilyFacts::Hopf(facts) = facts else {
            panic!()
        };
        assert!((ann.t - facts.a).norm() < 1e-9);
        // Chart radii are |z| on the two strands; heights at the annulus rim
        // are +-sqrt(1 - |a|^2).
        let lat = |r: f64| r * r - ann.t.norm_sqr() / (4.0 * r * r);
        let expect = (1.0 - facts.a.norm_sqr()).sqrt();
        let l1 = lat(ann.inner_radius.unwrap());
        let l2 = lat(ann.outer_radius);
        assert_abs_diff_eq!(l1.abs(), expect, epsilon = 1e-9);
        assert_abs_diff_eq!(l2.abs(), expect, epsilon = 1e-9);
        assert!(l1 * l2 < 0.0);
    }

    #[test]
    fn disc_hull_annulus_radii_are_double_point_radii() {
        let fam = SurfaceFamily::Disc(Default::default());
        let f = RationalMap::for_family(&fam).unwrap();
        let v = AvoidanceCurve::for_family(&fam).unwrap();
        let hull = hull_decompose(&fam, &f, &v, 256, &tols()).unwrap();
        assert_eq!(hull.attached.len(), 1);
        let ann = &hull.attached[0];
        let FamilyFacts::Disc(facts) = validate_family(&fam).unwrap() else {
            panic!()
        };
        assert!((ann.t - facts.alpha).norm() < 1e-9);
        assert_abs_diff_eq!(ann.inner_radius.unwrap(), facts.t1.sqrt(), epsilon = 1e-9);
        assert_abs_diff_eq!(ann.outer_radius, facts.t2.sqrt(), epsilon = 1e-9);
    }

    #[test]
    fn klein_star_has_no_decomposition() {
        let fam = SurfaceFamily::KleinStar(KleinParams::default());
        assert!(matches!(
            RationalMap::for_family(&fam),
            Err(FibrationError::UnsupportedFamily(_))
        ));
        assert!(matches!(
            GammaCurve::of(&fam),
            Err(FibrationError::UnsupportedFamily(_))
        ));
    }

    #[test]
    fn circle_distance_is_exact() {
        let circle = CircleInC2 {
            z_center: Complex64::new(0.0, 0.0),
            w_center: Complex64::new(0.0, 0.0),
            z_coeff: Complex64::new(2.0, 0.0),
            w_coeff: Complex64::new(0.5, 0.0),
        };
        // Points of the circle itself are at distance zero.
        for k in 0..16 {
            let p = circle.point(0.3 + k as f64);
            assert!(circle.distance(&p) < 1e-12);
        }
        // A point on the z-axis at radius 3: nearest circle point has
        // distance sqrt((3-2)^2 + 0.25) along the same phase.
        let p = Point2C::new(Complex64::new(3.0, 0.0), Complex64::new(0.0, 0.0));
        assert_abs_diff_eq!(circle.distance(&p), 1.25_f64.sqrt(), epsilon = 1e-12);
        assert!(circle.hausdorff(&circle, 64) < 1e-12);
    }
}
