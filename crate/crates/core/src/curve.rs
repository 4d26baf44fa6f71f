//! Geometry of the desired orbit.
//!
//! Curves are centred at the origin with axes along the world frame. A
//! point on the curve is addressed by the parametric angle t of
//! (a cos t, b sin t). Headings map to t through the point whose
//! counterclockwise tangent points along the heading.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::AgentState;
use crate::specfun::{e_incomplete_unchecked, ellint_e_complete, EllipticParam, SigmaInterpolant};

const TWO_PI: f64 = 2.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveKind {
    Circle { r: f64 },
    Ellipse { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerimeterMode {
    #[default]
    Exact,
    Ramanujan,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSpec {
    pub kind: CurveKind,
    pub perimeter_mode: PerimeterMode,
}

fn check_length(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::Config(format!("curve.{name} must be > 0, got {v}")));
    }
    Ok(())
}

impl CurveSpec {
    pub fn circle(r: f64) -> Result<Self> {
        check_length("r", r)?;
        Ok(CurveSpec {
            kind: CurveKind::Circle { r },
            perimeter_mode: PerimeterMode::Exact,
        })
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        check_length("a", a)?;
        check_length("b", b)?;
        Ok(CurveSpec {
            kind: CurveKind::Ellipse { a, b },
            perimeter_mode: PerimeterMode::Exact,
        })
    }

    pub fn with_perimeter_mode(mut self, mode: PerimeterMode) -> Self {
        self.perimeter_mode = mode;
        self
    }

    /// Semi-axes (a, b); a circle reports (r, r).
    pub fn axes(&self) -> (f64, f64) {
        match self.kind {
            CurveKind::Circle { r } => (r, r),
            CurveKind::Ellipse { a, b } => (a, b),
        }
    }

    pub fn is_circle(&self) -> bool {
        matches!(self.kind, CurveKind::Circle { .. })
    }

    /// Smallest radius of curvature along the curve.
    pub fn min_curvature_radius(&self) -> f64 {
        let (a, b) = self.axes();
        (b * b / a).min(a * a / b)
    }
}

/// Curve quantities at the point selected by a heading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveFrame {
    pub t_param: f64,
    pub point: (f64, f64),
    /// √(a² sin²θ + b² cos²θ); reported only, not used by the control.
    pub radial: f64,
    pub kappa: f64,
    pub sigma: f64,
    pub psi: f64,
}

/// Parametric angle t ∈ (−π, π] whose counterclockwise tangent is
/// aligned with heading θ. Satisfies tan t = −(b/a) cot θ.
pub fn project(curve: &CurveSpec, theta: f64) -> f64 {
    let (a, b) = curve.axes();
    let (s, c) = theta.sin_cos();
    let t = (-b * c).atan2(a * s);
    if t == -PI {
        PI
    } else {
        t
    }
}

pub fn point_on_curve(curve: &CurveSpec, t: f64) -> (f64, f64) {
    let (a, b) = curve.axes();
    let (s, c) = t.sin_cos();
    (a * c, b * s)
}

/// Heading of the counterclockwise tangent at parameter t.
pub fn tangent_heading(curve: &CurveSpec, t: f64) -> f64 {
    let (a, b) = curve.axes();
    let (s, c) = t.sin_cos();
    (b * c).atan2(-a * s)
}

pub fn radial_distance(curve: &CurveSpec, theta: f64) -> f64 {
    match curve.kind {
        CurveKind::Circle { r } => r,
        CurveKind::Ellipse { a, b } => {
            let (s, c) = theta.sin_cos();
            (a * a * s * s + b * b * c * c).sqrt()
        }
    }
}

/// Curvature at the point selected by heading θ.
pub fn curvature(curve: &CurveSpec, theta: f64) -> f64 {
    match curve.kind {
        CurveKind::Circle { r } => 1.0 / r,
        CurveKind::Ellipse { a, b } => {
            let (s, c) = theta.sin_cos();
            let q = a * a * s * s + b * b * c * c;
            q * q.sqrt() / (a * a * b * b)
        }
    }
}

/// Curvature ab / (a² sin²t + b² cos²t)^{3/2} at parameter t.
pub fn parametric_curvature(curve: &CurveSpec, t: f64) -> f64 {
    let (a, b) = curve.axes();
    let v = speed_at(curve, t);
    a * b / (v * v * v)
}

/// |dρ/dt| at parameter t.
pub fn speed_at(curve: &CurveSpec, t: f64) -> f64 {
    let (a, b) = curve.axes();
    let (s, c) = t.sin_cos();
    (a * a * s * s + b * b * c * c).sqrt()
}

/// d|dρ/dt|/dt at parameter t.
pub fn speed_rate_at(curve: &CurveSpec, t: f64) -> f64 {
    let (a, b) = curve.axes();
    let (s, c) = t.sin_cos();
    (a * a - b * b) * s * c / speed_at(curve, t)
}

/// Signed arc length from the point (0, b) to parameter t ∈ (−π, π],
/// σ(t) = b·[E(t | 1 − (a/b)²) − E(π/2 | 1 − (a/b)²)].
pub fn arc_length_at(curve: &CurveSpec, t: f64) -> f64 {
    match curve.kind {
        CurveKind::Circle { r } => r * (t - FRAC_PI_2),
        CurveKind::Ellipse { a, b } => {
            let m = EllipticParam::from_axes(a, b).expect("a/b > 0 gives m < 1");
            b * (e_incomplete_unchecked(t, m) - ellint_e_complete(m))
        }
    }
}

/// Arc length of the heading-projected point (direct Carlson evaluation).
pub fn arc_length(curve: &CurveSpec, theta: f64) -> f64 {
    arc_length_at(curve, project(curve, theta))
}

fn exact_perimeter(a: f64, b: f64) -> f64 {
    let m = EllipticParam::from_axes(a, b).expect("a/b > 0 gives m < 1");
    4.0 * b * ellint_e_complete(m)
}

fn ramanujan_perimeter(a: f64, b: f64) -> f64 {
    PI * (3.0 * (a + b) - ((3.0 * a + b) * (a + 3.0 * b)).sqrt())
}

pub fn perimeter(curve: &CurveSpec) -> f64 {
    match (curve.kind, curve.perimeter_mode) {
        (CurveKind::Circle { r }, _) => TWO_PI * r,
        (CurveKind::Ellipse { a, b }, PerimeterMode::Exact) => exact_perimeter(a, b),
        (CurveKind::Ellipse { a, b }, PerimeterMode::Ramanujan) => ramanujan_perimeter(a, b),
    }
}

pub(crate) fn wrap_phase(x: f64) -> f64 {
    let w = x.rem_euclid(TWO_PI);
    if w >= TWO_PI {
        0.0
    } else {
        w
    }
}

/// ψ = (2π/Γ)σ wrapped to [0, 2π).
pub fn curve_phase(curve: &CurveSpec, theta: f64) -> f64 {
    Orbit::new(*curve).phase(theta)
}

pub fn position_error(curve: &CurveSpec, state: &AgentState) -> (f64, f64) {
    let (px, py) = point_on_curve(curve, project(curve, state.theta));
    (state.x - px, state.y - py)
}

pub fn frame(curve: &CurveSpec, theta: f64) -> CurveFrame {
    Orbit::new(*curve).frame(theta)
}

/// Outward and inward parallel curves at normal distance δ.
#[derive(Debug, Clone, PartialEq)]
pub struct OffsetBoundary {
    pub t: Vec<f64>,
    pub outer: Vec<(f64, f64)>,
    pub inner: Vec<(f64, f64)>,
    /// Set when δ reaches the smallest radius of curvature, so the inner
    /// offset has cusps or self-intersections.
    pub warning: Option<String>,
}

pub fn offset_boundary(curve: &CurveSpec, delta: f64, n: usize) -> Result<OffsetBoundary> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::Config(format!("delta must be > 0, got {delta}")));
    }
    if n < 16 {
        return Err(Error::Config(format!("boundary needs at least 16 samples, got {n}")));
    }
    let (a, b) = curve.axes();
    let rmin = curve.min_curvature_radius();
    let warning = (delta >= rmin).then(|| {
        format!("inner offset at delta = {delta} self-intersects (min radius of curvature {rmin})")
    });
    let mut out = OffsetBoundary {
        t: Vec::with_capacity(n),
        outer: Vec::with_capacity(n),
        inner: Vec::with_capacity(n),
        warning,
    };
    for i in 0..n {
        let t = -PI + TWO_PI * i as f64 / n as f64;
        let (s, c) = t.sin_cos();
        let (nx, ny) = (b * c, a * s);
        let norm = nx.hypot(ny);
        let (nx, ny) = (nx / norm, ny / norm);
        let (px, py) = (a * c, b * s);
        out.t.push(t);
        out.outer.push((px + delta * nx, py + delta * ny));
        out.inner.push((px - delta * nx, py - delta * ny));
    }
    Ok(out)
}

/// A curve with its perimeter resolved once and, optionally, a shared
/// arc-length interpolant. Cheap to clone.
#[derive(Debug, Clone)]
pub struct Orbit {
    spec: CurveSpec,
    param: Option<EllipticParam>,
    quarter: f64,
    perimeter: f64,
    interp: Option<Arc<SigmaInterpolant>>,
}

impl Orbit {
    pub fn new(spec: CurveSpec) -> Self {
        let (param, quarter) = match spec.kind {
            CurveKind::Circle { r } => (None, FRAC_PI_2 * r),
            CurveKind::Ellipse { a, b } => {
                let m = EllipticParam::from_axes(a, b).expect("a/b > 0 gives m < 1");
                (Some(m), b * ellint_e_complete(m))
            }
        };
        Orbit {
            spec,
            param,
            quarter,
            perimeter: perimeter(&spec),
            interp: None,
        }
    }

    /// Builds and certifies an interpolant; circles keep the closed form.
    pub fn with_interpolant(spec: CurveSpec, grid_size: usize) -> Result<Self> {
        let mut orbit = Orbit::new(spec);
        if !spec.is_circle() {
            orbit.interp = Some(Arc::new(SigmaInterpolant::build(&spec, grid_size)?));
        }
        Ok(orbit)
    }

    pub fn spec(&self) -> &CurveSpec {
        &self.spec
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn interpolant(&self) -> Option<&SigmaInterpolant> {
        self.interp.as_deref()
    }

    /// σ(t) through the Carlson path.
    #[inline]
    pub fn sigma_direct(&self, t: f64) -> f64 {
        match (self.spec.kind, self.param) {
            (CurveKind::Ellipse { b, .. }, Some(m)) => {
                b * e_incomplete_unchecked(t, m) - self.quarter
            }
            (CurveKind::Circle { r }, _) => r * t - self.quarter,
            _ => unreachable!("ellipse orbits always carry a parameter"),
        }
    }

    /// σ(t), through the interpolant when one is attached.
    #[inline]
    pub fn sigma_at(&self, t: f64) -> f64 {
        match &self.interp {
            Some(i) => i.eval(t),
            None => self.sigma_direct(t),
        }
    }

    pub fn phase(&self, theta: f64) -> f64 {
        let t = project(&self.spec, theta);
        wrap_phase(TWO_PI * self.sigma_at(t) / self.perimeter)
    }

    pub fn frame(&self, theta: f64) -> CurveFrame {
        let t = project(&self.spec, theta);
        let sigma = self.sigma_at(t);
        CurveFrame {
            t_param: t,
            point: point_on_curve(&self.spec, t),
            radial: radial_distance(&self.spec, theta),
            kappa: curvature(&self.spec, theta),
            sigma,
            psi: wrap_phase(TWO_PI * sigma / self.perimeter),
        }
    }
}

impl From<CurveSpec> for Orbit {
    fn from(spec: CurveSpec) -> Self {
        Orbit::new(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::quadrature::adaptive_simpson;

    fn circle(r: f64) -> CurveSpec {
        CurveSpec::circle(r).unwrap()
    }

    fn ellipse(a: f64, b: f64) -> CurveSpec {
        CurveSpec::ellipse(a, b).unwrap()
    }

    #[test]
    fn project_examples() {
        assert!((project(&circle(1.0), 0.0) + FRAC_PI_2).abs() < 1e-15);
        assert!((project(&ellipse(1.25, 1.0), PI) - FRAC_PI_2).abs() < 1e-15);

        let t = project(&ellipse(2.0, 1.0), PI / 4.0);
        assert!((t.tan() + 0.5).abs() < 1e-12);
        // Tangent at t must point along the heading, not against it.
        assert!((tangent_heading(&ellipse(2.0, 1.0), t) - PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn point_examples() {
        assert_eq!(point_on_curve(&ellipse(2.0, 1.0), 0.0), (2.0, 0.0));
        let (x, y) = point_on_curve(&circle(1.0), FRAC_PI_2);
        assert!(x.abs() < 1e-16 && (y - 1.0).abs() < 1e-16);
        let (x, y) = point_on_curve(&ellipse(1.25, 1.0), FRAC_PI_2);
        assert!(x.abs() < 1e-15 && (y - 1.0).abs() < 1e-16);
    }

    #[test]
    fn radial_and_curvature_examples() {
        assert_eq!(radial_distance(&circle(2.0), 0.3), 2.0);
        assert!((radial_distance(&ellipse(2.0, 1.0), FRAC_PI_2) - 2.0).abs() < 1e-15);
        assert!((radial_distance(&ellipse(2.0, 1.0), 0.0) - 1.0).abs() < 1e-15);

        assert_eq!(curvature(&circle(1.0), 1.0), 1.0);
        assert!((curvature(&ellipse(2.0, 1.0), FRAC_PI_2) - 2.0).abs() < 1e-14);
        assert!((curvature(&ellipse(2.0, 1.0), 0.0) - 0.25).abs() < 1e-15);
        assert!((parametric_curvature(&ellipse(2.0, 1.0), 0.0) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn arc_length_examples() {
        let c = circle(1.0);
        assert!(arc_length(&c, PI).abs() < 1e-15);
        let (t1, t2) = (0.4, 1.9);
        assert!(((arc_length(&c, t2) - arc_length(&c, t1)) - (t2 - t1)).abs() < 1e-14);
    }

    #[test]
    fn arc_length_matches_quadrature_of_speed() {
        let e = ellipse(2.0, 1.0);
        for &t in &[-3.0, -1.2, 0.0, 0.7, 2.5, PI] {
            let oracle = adaptive_simpson(|s| speed_at(&e, s), FRAC_PI_2, t, 1e-12).unwrap();
            assert!((arc_length_at(&e, t) - oracle).abs() < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn lap_accumulates_perimeter() {
        let e = ellipse(2.0, 1.0);
        let lap = arc_length_at(&e, PI) - arc_length_at(&e, -PI);
        let oracle = adaptive_simpson(|s| speed_at(&e, s), -PI, PI, 1e-12).unwrap();
        assert!((lap - oracle).abs() < 1e-10);
        assert!((lap - perimeter(&e)).abs() < 1e-12);
    }

    #[test]
    fn perimeter_examples() {
        let c = circle(1.0).with_perimeter_mode(PerimeterMode::Ramanujan);
        assert!((perimeter(&c) - TWO_PI).abs() < 1e-15);
        let r = ellipse(2.0, 1.0).with_perimeter_mode(PerimeterMode::Ramanujan);
        assert!((perimeter(&r) - PI * (9.0 - 35f64.sqrt())).abs() < 1e-13);
        assert!((perimeter(&ellipse(2.0, 1.0)) - 9.688_448_220_547_676).abs() < 1e-12);
        // Same value from the major-axis form 4·a·E(π/2 | 1 − b²/a²).
        let alt = 4.0 * 2.0 * ellint_e_complete(EllipticParam::new(0.75).unwrap());
        let d = perimeter(&ellipse(2.0, 1.0)) - alt;
        assert!(d.abs() < 1e-12, "{d:e}");
        // Ramanujan formula is exact for a circle written as an ellipse.
        let circ = ellipse(1.5, 1.5).with_perimeter_mode(PerimeterMode::Ramanujan);
        assert!((perimeter(&circ) - 3.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn circle_phase_tracks_heading() {
        let c = circle(1.0);
        for &(t1, t2) in &[(0.1, 2.0), (-3.0, 3.0), (1.0, 7.5)] {
            let d = wrap_phase(curve_phase(&c, t2) - curve_phase(&c, t1));
            let want = wrap_phase(t2 - t1);
            let diff = (d - want).abs();
            assert!(diff < 1e-12 || (diff - TWO_PI).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_wraps_into_range() {
        let e = ellipse(2.0, 1.0);
        for i in 0..1000 {
            let th = -20.0 + 0.04 * i as f64;
            let psi = curve_phase(&e, th);
            assert!((0.0..TWO_PI).contains(&psi));
        }
        assert_eq!(wrap_phase(-1e-20), 0.0);
    }

    #[test]
    fn position_error_examples() {
        let (ex, ey) = position_error(&circle(1.0), &AgentState::new(1.5, 0.0, FRAC_PI_2));
        assert!((ex - 0.5).abs() < 1e-15 && ey.abs() < 1e-15);
        let (ex, ey) = position_error(&ellipse(1.25, 1.0), &AgentState::new(1.75, 0.0, FRAC_PI_2));
        assert!((ex - 0.5).abs() < 1e-15 && ey.abs() < 1e-15);

        let e = ellipse(2.0, 1.0);
        let t0 = 2.2;
        let (x, y) = point_on_curve(&e, t0);
        let (ex, ey) = position_error(&e, &AgentState::new(x, y, tangent_heading(&e, t0)));
        assert!(ex.hypot(ey) < 1e-12);
    }

    #[test]
    fn offset_boundary_examples() {
        let ob = offset_boundary(&circle(1.0), 1.0, 64).unwrap();
        assert!(ob.outer.iter().all(|p| (p.0.hypot(p.1) - 2.0).abs() < 1e-14));
        assert!(ob.warning.is_some());

        let ob = offset_boundary(&circle(2.0), 0.5, 32).unwrap();
        assert!(ob.outer.iter().all(|p| (p.0.hypot(p.1) - 2.5).abs() < 1e-14));
        assert!(ob.inner.iter().all(|p| (p.0.hypot(p.1) - 1.5).abs() < 1e-14));
        assert!(ob.warning.is_none());

        let ob = offset_boundary(&ellipse(1.25, 1.0), 1.0, 64).unwrap();
        assert!(ob.warning.is_some());
        assert!((ellipse(1.25, 1.0).min_curvature_radius() - 0.8).abs() < 1e-15);

        assert!(offset_boundary(&circle(1.0), 0.0, 64).is_err());
        assert!(offset_boundary(&circle(1.0), 1.0, 8).is_err());
    }

    #[test]
    fn frame_point_lies_on_ellipse() {
        let e = ellipse(1.25, 1.0);
        for i in 0..200 {
            let f = frame(&e, -7.0 + 0.07 * i as f64);
            let (x, y) = f.point;
            assert!(((x / 1.25).powi(2) + y * y - 1.0).abs() < 1e-12);
            assert!(f.kappa > 0.0);
        }
    }

    #[test]
    fn rejects_bad_axes() {
        assert!(CurveSpec::circle(0.0).is_err());
        assert!(CurveSpec::ellipse(1.0, -1.0).is_err());
        assert!(CurveSpec::ellipse(f64::NAN, 1.0).is_err());
    }
}
