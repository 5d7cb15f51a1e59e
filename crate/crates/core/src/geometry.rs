//! Ray-space geodesics, the total/dynamical/geometric phase functionals, and
//! the geometric phase of geodesic polygons through the Bargmann invariant.
//!
//! # Sign convention
//!
//! The geometric phase of the closed polygon `ρ₁ → ρ₂ → ⋯ → ρₙ → ρ₁` is
//!
//! ```text
//! β = −arg(⟨ψ₁|ψ₂⟩⟨ψ₂|ψ₃⟩⋯⟨ψₙ|ψ₁⟩) = −arg Tr(ρ₁ρ₂⋯ρₙ)
//! ```
//!
//! which is the same number as `arg⟨ψ₁|ψ₁'⟩` for the horizontal lift that
//! returns to `ψ₁' = e^{iβ}ψ₁`. For the three-vertex interferometry cycle
//! this reduces to `arg(cos s₁⁰ cos s₂⁰ − e^{iθ} sin s₁⁰ sin s₂⁰ cos φ)`,
//! with no extra sign (see [`crate::evolution::beta_predicted`]).

use nalgebra::{DMatrix, DVector};

use crate::angle;
use crate::error::{Error, Result};
use crate::quadrature::{self, Integral, QuadratureConfig};
use crate::statespace::{overlap, projector, Ray, StateVec, C64};

/// Overlaps below this magnitude count as orthogonal.
pub const ORTHOGONAL_TOL: f64 = 1e-10;

/// Arcs shorter than this are degenerate (coincident endpoint rays).
pub const DEGENERATE_ARC_TOL: f64 = 1e-12;

/// A parametrized curve `s ↦ ψ(s)` in the state space.
///
/// `point` must stay evaluable a little outside `domain()` so that curves
/// without an analytic tangent can be differentiated by central differences
/// at the endpoints.
pub trait Curve {
    fn domain(&self) -> (f64, f64);

    fn point(&self, s: f64) -> StateVec;

    /// `∂ψ/∂s`, when known in closed form.
    fn tangent(&self, _s: f64) -> Option<DVector<C64>> {
        None
    }
}

/// A curve given by a closure, differentiated numerically.
pub struct FnCurve<F> {
    f: F,
    start: f64,
    end: f64,
}

impl<F> FnCurve<F>
where
    F: Fn(f64) -> StateVec,
{
    pub fn new(f: F, start: f64, end: f64) -> Self {
        Self { f, start, end }
    }
}

impl<F> Curve for FnCurve<F>
where
    F: Fn(f64) -> StateVec,
{
    fn domain(&self) -> (f64, f64) {
        (self.start, self.end)
    }

    fn point(&self, s: f64) -> StateVec {
        (self.f)(s)
    }
}

/// The horizontal lift of the ray-space geodesic between two states:
///
/// ```text
/// ψ(s) = ψₖ cos s + (ψₖ₊₁ − ψₖ⟨ψₖ|ψₖ₊₁⟩)/√(1 − ⟨ψₖ|ψₖ₊₁⟩²) · sin s,   0 ≤ s ≤ s⁰
/// ```
///
/// with `ψₖ₊₁` re-phased so the overlap is real positive.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicArc {
    start: StateVec,
    end_aligned: StateVec,
    direction: DVector<C64>,
    s_max: f64,
}

impl GeodesicArc {
    pub fn start(&self) -> &StateVec {
        &self.start
    }

    /// The end point re-phased so `⟨start|end_aligned⟩` is real positive.
    pub fn end_aligned(&self) -> &StateVec {
        &self.end_aligned
    }

    /// Unit vector orthogonal to `start` along which the arc leaves it.
    /// Zero for a degenerate arc.
    pub fn direction(&self) -> &DVector<C64> {
        &self.direction
    }

    /// Arc length `arccos⟨start|end_aligned⟩`.
    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    /// True when both endpoints are the same ray.
    pub fn is_degenerate(&self) -> bool {
        self.s_max < DEGENERATE_ARC_TOL
    }

    fn eval(&self, s: f64) -> DVector<C64> {
        let (sn, cs) = s.sin_cos();
        self.start.as_vector().scale(cs) + self.direction.scale(sn)
    }
}

impl Curve for GeodesicArc {
    fn domain(&self) -> (f64, f64) {
        (0.0, self.s_max)
    }

    fn point(&self, s: f64) -> StateVec {
        StateVec::from_vector_unchecked(self.eval(s))
    }

    fn tangent(&self, s: f64) -> Option<DVector<C64>> {
        let (sn, cs) = s.sin_cos();
        Some(self.direction.scale(cs) - self.start.as_vector().scale(sn))
    }
}

pub fn make_geodesic(psi_k: &StateVec, psi_k1: &StateVec) -> Result<GeodesicArc> {
    let o = overlap(psi_k, psi_k1)?;
    let magnitude = o.norm();
    if magnitude < ORTHOGONAL_TOL {
        return Err(Error::OrthogonalEndpoints(magnitude));
    }
    let end_aligned = psi_k1.with_phase(-o.arg());
    let c = magnitude.min(1.0);
    let residual = end_aligned.as_vector() - psi_k.as_vector().scale(c);
    let r = residual.norm();
    // atan2 keeps the arc length accurate near both ends of (0, π/2]
    let mut s_max = r.atan2(c);
    let direction = if s_max < DEGENERATE_ARC_TOL {
        s_max = 0.0;
        DVector::zeros(psi_k.dim())
    } else {
        residual.unscale(r)
    };
    Ok(GeodesicArc {
        start: psi_k.clone(),
        end_aligned,
        direction,
        s_max,
    })
}

pub fn arc_point(arc: &GeodesicArc, s: f64) -> Result<StateVec> {
    if !(0.0..=arc.s_max).contains(&s) {
        return Err(Error::ArcParameterOutOfRange {
            s,
            s_max: arc.s_max,
        });
    }
    if s == 0.0 {
        return Ok(arc.start.clone());
    }
    Ok(arc.point(s))
}

/// Phases of an open curve; every field lies in `(-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseReport {
    pub total: f64,
    pub dynamical: f64,
    pub geometric: f64,
}

impl PhaseReport {
    pub fn from_parts(total: f64, dynamical: f64) -> Self {
        Self {
            total: angle::wrap(total),
            dynamical: angle::wrap(dynamical),
            geometric: angle::wrap(total - dynamical),
        }
    }
}

/// `arg⟨v|w⟩`.
pub fn total_phase(v: &StateVec, w: &StateVec) -> Result<f64> {
    let o = overlap(v, w)?;
    if o.norm() < ORTHOGONAL_TOL {
        return Err(Error::TotalPhaseUndefined(o.norm()));
    }
    Ok(angle::wrap(o.arg()))
}

/// `γ_d = −∫ ⟨ψ| i ∂ₛ |ψ⟩ ds = ∫ Im⟨ψ|∂ₛψ⟩ ds` over the curve's domain.
///
/// The returned value is the raw integral, not reduced modulo 2π.
pub fn dynamical_phase<C: Curve + ?Sized>(curve: &C, quad: &QuadratureConfig) -> Result<Integral> {
    let (s1, s2) = curve.domain();
    if !(s1 <= s2) {
        return Err(Error::BadDomain(s1, s2));
    }
    let integrand = |s: f64| {
        let psi = curve.point(s);
        let dpsi = curve.tangent(s).unwrap_or_else(|| {
            quadrature::derivative_vector(|t| curve.point(t).as_vector().clone(), s, quad)
        });
        psi.as_vector().dotc(&dpsi).im
    };
    quadrature::integrate(integrand, s1, s2, quad)
}

/// `β = φ_tot − γ_d` for an open curve.
pub fn geometric_phase<C: Curve + ?Sized>(
    curve: &C,
    quad: &QuadratureConfig,
) -> Result<PhaseReport> {
    let (s1, s2) = curve.domain();
    let total = total_phase(&curve.point(s1), &curve.point(s2))?;
    let dynamical = dynamical_phase(curve, quad)?.value;
    Ok(PhaseReport::from_parts(total, dynamical))
}

fn check_cycle(vectors: &[StateVec]) -> Result<Vec<C64>> {
    let n = vectors.len();
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    (0..n)
        .map(|k| {
            let next = (k + 1) % n;
            let o = overlap(&vectors[k], &vectors[next])?;
            if o.norm() < ORTHOGONAL_TOL {
                return Err(Error::DegeneratePolygon {
                    index: k,
                    next,
                    magnitude: o.norm(),
                });
            }
            Ok(o)
        })
        .collect()
}

/// `⟨ψ₁|ψ₂⟩⟨ψ₂|ψ₃⟩⋯⟨ψₙ|ψ₁⟩`.
pub fn bargmann_invariant(vectors: &[StateVec]) -> Result<C64> {
    Ok(check_cycle(vectors)?.into_iter().product())
}

/// `Tr(ρ₁ρ₂⋯ρₙ)`, computed from the projectors.
pub fn bargmann_trace(rays: &[Ray]) -> C64 {
    let dim = rays.first().map_or(0, Ray::dim);
    rays.iter()
        .fold(DMatrix::identity(dim, dim), |acc, r| acc * r.matrix())
        .trace()
}

/// Geometric phase of the geodesic polygon through the given vertices,
/// `−arg` of the Bargmann invariant.
pub fn bargmann_gp(vectors: &[StateVec]) -> Result<f64> {
    Ok(angle::wrap(-bargmann_invariant(vectors)?.arg()))
}

/// Same as [`bargmann_gp`] but evaluated through `Tr(ρ₁⋯ρₙ)`.
pub fn bargmann_gp_trace(vectors: &[StateVec]) -> Result<f64> {
    check_cycle(vectors)?;
    let rays: Vec<Ray> = vectors.iter().map(projector).collect();
    Ok(angle::wrap(-bargmann_trace(&rays).arg()))
}

/// A closed polygon in ray space whose sides are geodesic arcs, together
/// with the horizontal lift that traverses it.
#[derive(Debug, Clone)]
pub struct PolygonPath {
    vertices: Vec<Ray>,
    arcs: Vec<GeodesicArc>,
}

impl PolygonPath {
    /// Joins the vertices cyclically. Consecutive vertices (including last
    /// and first) must be neither orthogonal nor the same ray.
    pub fn new(vectors: &[StateVec]) -> Result<Self> {
        check_cycle(vectors)?;
        let n = vectors.len();
        let mut arcs = Vec::with_capacity(n);
        let mut current = vectors[0].clone();
        for k in 0..n {
            let next = (k + 1) % n;
            let arc = make_geodesic(&current, &vectors[next])?;
            if arc.is_degenerate() {
                return Err(Error::DegeneratePolygon {
                    index: k,
                    next,
                    magnitude: 1.0,
                });
            }
            current = arc.end_aligned().clone();
            arcs.push(arc);
        }
        Ok(Self {
            vertices: vectors.iter().map(projector).collect(),
            arcs,
        })
    }

    pub fn vertices(&self) -> &[Ray] {
        &self.vertices
    }

    pub fn arcs(&self) -> &[GeodesicArc] {
        &self.arcs
    }

    /// The lift's end point, `e^{iβ}ψ₁`.
    pub fn lift_end(&self) -> &StateVec {
        self.arcs.last().expect("polygon has arcs").end_aligned()
    }

    /// Geometric phase from the phase functionals: total phase between the
    /// lift's end points minus the dynamical phase integrated along every
    /// arc.
    pub fn geometric_phase(&self, quad: &QuadratureConfig) -> Result<PhaseReport> {
        let total = total_phase(self.arcs[0].start(), self.lift_end())?;
        let dynamical = self
            .arcs
            .iter()
            .map(|arc| dynamical_phase(arc, quad).map(|i| i.value))
            .sum::<Result<f64>>()?;
        Ok(PhaseReport::from_parts(total, dynamical))
    }
}
