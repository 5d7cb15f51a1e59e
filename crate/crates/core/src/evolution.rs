//! The three-leg cycle `ψ₁ → ψ₂ → ψ₃ → e^{iβ}ψ₁` on the three-level
//! subspace `{|00⟩, |10⟩, |11⟩}` of two qubits.
//!
//! Each leg is `U(s) = A R(±s) A†` for a fixed conjugator `A`, where `R`
//! mixes `|00⟩` and `|10⟩` and the conjugators live in the SU(2) acting on
//! `|10⟩, |11⟩`. None of them touch the reference state `|01⟩`, so
//! preparing `(|00⟩ + |01⟩)/√2` and running the cycle produces the phase
//! `β` as a relative phase between the two branches.
//!
//! # Conjugator arguments
//!
//! The SU(2) element is built by [`rot_r23`]`(mix, ph1, ph2)`, whose block on
//! `|10⟩, |11⟩` is `[[e^{i·ph1} cos mix, e^{−i·ph2} sin mix],
//! [−e^{i·ph2} sin mix, e^{−i·ph1} cos mix]]`. The legs need the element that
//! sends `|10⟩ ↦ e^{ia} cos b |10⟩ + e^{ic} sin b |11⟩`, which is
//! `rot_r23(−b, a, c)`; [`leg_conjugator`] packages that binding. With it,
//! the second leg uses `(a, b, c) = (θ, φ, 0)` and the third
//! `(χ, τ, −ξ)`, and the cycle closes on `e^{iξ}|00⟩` with `ξ` equal to the
//! predicted phase.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DVector, Matrix4, Vector4};

use crate::angle;
use crate::error::{Error, Result};
use crate::geometry::{self, Curve, PhaseReport, ORTHOGONAL_TOL};
use crate::quadrature::{Integral, QuadratureConfig};
use crate::statespace::{StateVec, C64, REFERENCE_INDEX};

/// Largest deviation tolerated when checking that the cycle closes.
pub const CLOSURE_TOL: f64 = 1e-8;

/// Tolerance on the phase and sign of the `|11⟩` amplitude accepted by
/// [`reparametrize`], and on `|01⟩` leakage.
pub const REPARAM_TOL: f64 = 1e-10;

const ZERO_AMPLITUDE: f64 = 1e-14;

/// A 4×4 unitary on the two-qubit space, basis `|00⟩, |01⟩, |10⟩, |11⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary4(Matrix4<C64>);

impl Unitary4 {
    /// Wraps a matrix without checking unitarity.
    pub fn from_matrix(m: Matrix4<C64>) -> Self {
        Self(m)
    }

    pub fn identity() -> Self {
        Self(Matrix4::identity())
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn then(&self, next: &Unitary4) -> Self {
        Self(next.0 * self.0)
    }

    pub fn apply(&self, v: &StateVec) -> Result<StateVec> {
        if v.dim() != 4 {
            return Err(Error::DimensionMismatch(v.dim(), 4));
        }
        Ok(StateVec::from_vector_unchecked(
            self.apply_raw(v.as_vector()),
        ))
    }

    pub(crate) fn apply_raw(&self, v: &DVector<C64>) -> DVector<C64> {
        let w = self.0 * Vector4::from_column_slice(v.as_slice());
        DVector::from_column_slice(w.as_slice())
    }

    /// Largest entry of `U†U − I`.
    pub fn unitarity_defect(&self) -> f64 {
        max_abs4(&(self.0.adjoint() * self.0 - Matrix4::identity()))
    }

    /// Largest deviation of row and column `|01⟩` from those of the
    /// identity.
    pub fn reference_defect(&self) -> f64 {
        (0..4)
            .map(|k| {
                let want = if k == REFERENCE_INDEX {
                    C64::from(1.0)
                } else {
                    C64::from(0.0)
                };
                (self.0[(k, REFERENCE_INDEX)] - want)
                    .norm()
                    .max((self.0[(REFERENCE_INDEX, k)] - want).norm())
            })
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Unitary4) -> f64 {
        max_abs4(&(self.0 - other.0))
    }
}

impl std::ops::Mul for Unitary4 {
    type Output = Unitary4;

    fn mul(self, rhs: Unitary4) -> Unitary4 {
        Unitary4(self.0 * rhs.0)
    }
}

pub(crate) fn max_abs4(m: &Matrix4<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn real(x: f64) -> C64 {
    C64::from(x)
}

/// Rotation by `s` in the `|00⟩, |10⟩` plane; `|01⟩` and `|11⟩` are fixed.
#[rustfmt::skip]
pub fn rot_r(s: f64) -> Unitary4 {
    let (sn, cs) = s.sin_cos();
    let (o, l) = (real(0.0), real(1.0));
    Unitary4(Matrix4::new(
        real(cs), o, real(-sn), o,
        o, l, o, o,
        real(sn), o, real(cs), o,
        o, o, o, l,
    ))
}

/// `d/ds rot_r(s)`.
#[rustfmt::skip]
fn rot_r_derivative(s: f64) -> Matrix4<C64> {
    let (sn, cs) = s.sin_cos();
    let o = real(0.0);
    Matrix4::new(
        real(-sn), o, real(-cs), o,
        o, o, o, o,
        real(cs), o, real(-sn), o,
        o, o, o, o,
    )
}

/// SU(2) element on `|10⟩, |11⟩`:
/// `[[e^{i·ph1} cos mix, e^{−i·ph2} sin mix], [−e^{i·ph2} sin mix, e^{−i·ph1} cos mix]]`.
#[rustfmt::skip]
pub fn rot_r23(mix: f64, ph1: f64, ph2: f64) -> Unitary4 {
    let (sn, cs) = mix.sin_cos();
    let (o, l) = (real(0.0), real(1.0));
    Unitary4(Matrix4::new(
        l, o, o, o,
        o, l, o, o,
        o, o, C64::from_polar(cs, ph1), C64::from_polar(sn, -ph2),
        o, o, -C64::from_polar(sn, ph2), C64::from_polar(cs, -ph1),
    ))
}

/// The SU(2) element sending `|10⟩ ↦ e^{i·phase} cos(mixing) |10⟩ +
/// e^{i·tail_phase} sin(mixing) |11⟩`, i.e. `rot_r23(−mixing, phase,
/// tail_phase)`.
pub fn leg_conjugator(phase: f64, mixing: f64, tail_phase: f64) -> Unitary4 {
    rot_r23(-mixing, phase, tail_phase)
}

/// Parameters of the cycle. `theta` is the relative phase introduced on the
/// second leg (unrelated to the chart angle of
/// [`crate::statespace::ParamPoint`]) and `varphi` its mixing into `|11⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleParams {
    pub s1_0: f64,
    pub s2_0: f64,
    pub theta: f64,
    pub varphi: f64,
}

impl CycleParams {
    /// Checks the ranges and that `ψ₃` is not orthogonal to `ψ₁`, so the
    /// closing geodesic exists.
    pub fn new(s1_0: f64, s2_0: f64, theta: f64, varphi: f64) -> Result<Self> {
        for (name, value) in [("s1_0", s1_0), ("s2_0", s2_0), ("varphi", varphi)] {
            if !(0.0..=FRAC_PI_2).contains(&value) {
                return Err(Error::ParameterOutOfRange { name, value });
            }
        }
        if !theta.is_finite() {
            return Err(Error::ParameterOutOfRange {
                name: "theta",
                value: theta,
            });
        }
        let c = Self {
            s1_0,
            s2_0,
            theta,
            varphi,
        };
        let closing = c.closing_amplitude();
        if closing.norm() < ORTHOGONAL_TOL {
            return Err(Error::BetaUndefined(closing.norm()));
        }
        Ok(c)
    }

    /// `⟨ψ₁|ψ₃⟩ = cos s₁⁰ cos s₂⁰ − e^{iθ} sin s₁⁰ sin s₂⁰ cos φ`.
    fn closing_amplitude(&self) -> C64 {
        let (s1, c1) = self.s1_0.sin_cos();
        let (s2, c2) = self.s2_0.sin_cos();
        real(c1 * c2) - C64::from_polar(s1 * s2 * self.varphi.cos(), self.theta)
    }

    /// `ψ₁, ψ₂, ψ₃` as four-component states.
    pub fn vertices(&self) -> [StateVec; 3] {
        [psi1(), psi2(self), psi3(self)]
    }
}

/// `|00⟩`.
pub fn psi1() -> StateVec {
    StateVec::basis(4, 0).expect("dimension 4 is valid")
}

/// `cos s₁⁰ |00⟩ + sin s₁⁰ |10⟩`.
pub fn psi2(c: &CycleParams) -> StateVec {
    let (s1, c1) = c.s1_0.sin_cos();
    StateVec::from_vector_unchecked(DVector::from_vec(vec![
        real(c1),
        real(0.0),
        real(s1),
        real(0.0),
    ]))
}

/// `(c₁c₂ − e^{iθ}s₁s₂cos φ)|00⟩ + (s₁c₂ + e^{iθ}c₁s₂cos φ)|10⟩ + sin φ s₂|11⟩`.
pub fn psi3(c: &CycleParams) -> StateVec {
    let (s1, c1) = c.s1_0.sin_cos();
    let (s2, c2) = c.s2_0.sin_cos();
    let (sp, cp) = c.varphi.sin_cos();
    let phase = C64::from_polar(1.0, c.theta);
    StateVec::from_vector_unchecked(DVector::from_vec(vec![
        real(c1 * c2) - phase * (s1 * s2 * cp),
        real(0.0),
        real(s1 * c2) + phase * (c1 * s2 * cp),
        real(sp * s2),
    ]))
}

/// `ψ₃ = e^{iξ} cos s₃⁰ |00⟩ + e^{i(ξ+χ)} sin s₃⁰ cos τ |10⟩ + sin s₃⁰ sin τ |11⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reparam {
    pub xi: f64,
    pub chi: f64,
    pub tau: f64,
    pub s3_0: f64,
}

impl Reparam {
    pub fn reconstruct(&self) -> StateVec {
        let (s3, c3) = self.s3_0.sin_cos();
        let (st, ct) = self.tau.sin_cos();
        StateVec::from_vector_unchecked(DVector::from_vec(vec![
            C64::from_polar(c3, self.xi),
            real(0.0),
            C64::from_polar(s3 * ct, self.xi + self.chi),
            real(s3 * st),
        ]))
    }
}

/// Solves for `(ξ, χ, τ, s₃⁰)`. Undetermined angles are fixed as
/// `cos s₃⁰ = 0 ⇒ ξ = 0`, `cos τ = 0 ⇒ χ = 0`, `s₃⁰ = 0 ⇒ χ = τ = 0`.
pub fn reparametrize(v: &StateVec) -> Result<Reparam> {
    if v.dim() != 4 {
        return Err(Error::DimensionMismatch(v.dim(), 4));
    }
    let leak = v.amp(REFERENCE_INDEX).norm();
    if leak > REPARAM_TOL {
        return Err(Error::Leakage(leak));
    }
    let (a, b, tail) = (v.amp(0), v.amp(2), v.amp(3));
    if tail.im.abs() > REPARAM_TOL || tail.re < -REPARAM_TOL {
        return Err(Error::NonRealTail {
            re: tail.re,
            im: tail.im,
        });
    }
    let t = tail.re.max(0.0);
    let (ma, mb) = (a.norm(), b.norm());
    let s3_0 = mb.hypot(t).atan2(ma);
    let xi = if ma > ZERO_AMPLITUDE { a.arg() } else { 0.0 };
    let (tau, chi) = if mb.hypot(t) <= ZERO_AMPLITUDE {
        (0.0, 0.0)
    } else {
        let tau = t.atan2(mb);
        let chi = if mb > ZERO_AMPLITUDE {
            angle::wrap(b.arg() - xi)
        } else {
            0.0
        };
        (tau, chi)
    };
    Ok(Reparam { xi, chi, tau, s3_0 })
}

/// `arg(cos s₁⁰ cos s₂⁰ − e^{iθ} sin s₁⁰ sin s₂⁰ cos φ)`.
pub fn beta_predicted(c: &CycleParams) -> Result<f64> {
    let z = c.closing_amplitude();
    if z.norm() < ORTHOGONAL_TOL {
        return Err(Error::BetaUndefined(z.norm()));
    }
    Ok(angle::wrap(z.arg()))
}

/// One leg `s ↦ A R(σs) A† ψ_start` of the cycle, `σ = ±1`.
#[derive(Debug, Clone)]
pub struct CycleLeg {
    conjugator: Unitary4,
    sign: f64,
    start: StateVec,
    length: f64,
}

impl CycleLeg {
    pub fn unitary(&self, s: f64) -> Unitary4 {
        self.conjugator * rot_r(self.sign * s) * self.conjugator.adjoint()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn start(&self) -> &StateVec {
        &self.start
    }

    pub fn end(&self) -> StateVec {
        self.point(self.length)
    }
}

impl Curve for CycleLeg {
    fn domain(&self) -> (f64, f64) {
        (0.0, self.length)
    }

    fn point(&self, s: f64) -> StateVec {
        StateVec::from_vector_unchecked(self.unitary(s).apply_raw(self.start.as_vector()))
    }

    fn tangent(&self, s: f64) -> Option<DVector<C64>> {
        let a = self.conjugator.matrix();
        let d = a * rot_r_derivative(self.sign * s) * a.adjoint() * real(self.sign);
        Some(Unitary4(d).apply_raw(self.start.as_vector()))
    }
}

/// The three one-parameter families `U₁(s₁), U₂(s₂), U₃(s₃)` of a cycle.
#[derive(Debug, Clone)]
pub struct CycleUnitaries {
    pub params: CycleParams,
    pub reparam: Reparam,
    pub beta: f64,
    legs: [CycleLeg; 3],
}

impl CycleUnitaries {
    pub fn u1(&self, s: f64) -> Unitary4 {
        self.legs[0].unitary(s)
    }

    pub fn u2(&self, s: f64) -> Unitary4 {
        self.legs[1].unitary(s)
    }

    pub fn u3(&self, s: f64) -> Unitary4 {
        self.legs[2].unitary(s)
    }

    /// Conjugator of the second leg, `leg_conjugator(θ, φ, 0)`.
    pub fn second_conjugator(&self) -> Unitary4 {
        self.legs[1].conjugator
    }

    /// Conjugator of the third leg, `leg_conjugator(χ, τ, −ξ)`.
    pub fn third_conjugator(&self) -> Unitary4 {
        self.legs[2].conjugator
    }

    pub fn legs(&self) -> &[CycleLeg; 3] {
        &self.legs
    }

    /// `U₃(s₃⁰) U₂(s₂⁰) U₁(s₁⁰)`.
    pub fn cycle(&self) -> Unitary4 {
        let c = &self.params;
        self.u3(self.reparam.s3_0) * self.u2(c.s2_0) * self.u1(c.s1_0)
    }
}

pub fn cycle_unitaries(c: &CycleParams) -> Result<CycleUnitaries> {
    let [v1, v2, v3] = c.vertices();
    let reparam = reparametrize(&v3)?;
    let beta = beta_predicted(c)?;

    let leg1 = CycleLeg {
        conjugator: Unitary4::identity(),
        sign: 1.0,
        start: v1.clone(),
        length: c.s1_0,
    };
    let leg2 = CycleLeg {
        conjugator: rot_r(c.s1_0) * leg_conjugator(c.theta, c.varphi, 0.0),
        sign: 1.0,
        start: v2.clone(),
        length: c.s2_0,
    };
    let leg3 = CycleLeg {
        conjugator: leg_conjugator(reparam.chi, reparam.tau, -reparam.xi),
        sign: -1.0,
        start: v3.clone(),
        length: reparam.s3_0,
    };

    let checks = [
        ("U1 leg", leg1.end(), v2),
        ("U2 leg", leg2.end(), v3),
        ("U3 leg", leg3.end(), v1.with_phase(beta)),
    ];
    for (stage, got, want) in checks {
        let deviation = got.max_abs_diff(&want);
        if deviation > CLOSURE_TOL {
            return Err(Error::ConventionMismatch { stage, deviation });
        }
    }
    Ok(CycleUnitaries {
        params: *c,
        reparam,
        beta,
        legs: [leg1, leg2, leg3],
    })
}

/// Phases of a full cycle plus the per-leg dynamical-phase integrals.
#[derive(Debug, Clone)]
pub struct CycleRun {
    pub phases: PhaseReport,
    pub legs: [Integral; 3],
    pub closure: StateVec,
}

pub fn run_cycle_detailed(c: &CycleParams, quad: &QuadratureConfig) -> Result<CycleRun> {
    let cu = cycle_unitaries(c)?;
    let start = psi1();
    let closure = cu.cycle().apply(&start)?;
    let total = geometry::total_phase(&start, &closure)?;
    let legs = [
        geometry::dynamical_phase(&cu.legs[0], quad)?,
        geometry::dynamical_phase(&cu.legs[1], quad)?,
        geometry::dynamical_phase(&cu.legs[2], quad)?,
    ];
    let dynamical = legs.iter().map(|i| i.value).sum();
    Ok(CycleRun {
        phases: PhaseReport::from_parts(total, dynamical),
        legs,
        closure,
    })
}

/// Runs the cycle on `|00⟩` and returns the closure's total phase, the
/// quadrature dynamical phase along the three legs, and their difference.
pub fn run_cycle(c: &CycleParams, quad: &QuadratureConfig) -> Result<PhaseReport> {
    Ok(run_cycle_detailed(c, quad)?.phases)
}
