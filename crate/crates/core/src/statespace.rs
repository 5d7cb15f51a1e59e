//! Three-level states, their embedding into the two-qubit space, and the
//! octant-plus-torus coordinate chart.
//!
//! A three-level state is written as
//!
//! ```text
//! ψ = e^{iη} (e^{iχ₁} cos θ, e^{iχ₂} sin θ cos φ, sin θ sin φ)
//! ```
//!
//! with `θ, φ ∈ [0, π/2]` locating a point in the positive octant of the
//! sphere and `(χ₁, χ₂)` a point on a torus. The global phase `η` is pure
//! gauge and is returned separately by [`state_to_param`].

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::angle;
use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance on `‖ψ‖ = 1` accepted by [`StateVec::new`].
pub const NORM_TOL: f64 = 1e-12;

/// Largest `|01⟩` amplitude [`extract`] tolerates.
pub const LEAKAGE_TOL: f64 = 1e-10;

/// Amplitudes below this magnitude are treated as zero when resolving chart
/// degeneracies.
pub const AMPLITUDE_ZERO_TOL: f64 = 1e-12;

/// Two-qubit index of each three-level basis state: `|00⟩, |10⟩, |11⟩`.
pub const EMBED_INDICES: [usize; 3] = [0, 2, 3];

/// Two-qubit index of the reference state `|01⟩`.
pub const REFERENCE_INDEX: usize = 1;

/// A normalized amplitude vector of dimension 3 (`|00⟩, |10⟩, |11⟩`) or
/// 4 (`|00⟩, |01⟩, |10⟩, |11⟩`).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVec {
    amps: DVector<C64>,
}

impl StateVec {
    /// Builds a state from amplitudes that are already normalized.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        check_dim(amps.len())?;
        let v = DVector::from_vec(amps);
        let norm = v.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amps: v })
    }

    /// Builds a state by normalizing arbitrary (nonzero) amplitudes.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        check_dim(amps.len())?;
        let v = DVector::from_vec(amps);
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            amps: v / C64::from(norm),
        })
    }

    /// Real amplitudes, normalized.
    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::normalized(amps.iter().map(|&a| C64::from(a)).collect())
    }

    /// Basis vector `index` of the given dimension.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        let mut v = DVector::zeros(dim);
        v[index] = C64::from(1.0);
        Ok(Self { amps: v })
    }

    pub(crate) fn from_vector_unchecked(amps: DVector<C64>) -> Self {
        debug_assert!(amps.len() == 3 || amps.len() == 4);
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.amps.as_slice()
    }

    pub fn amp(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn as_vector(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// `e^{iα} ψ`.
    pub fn with_phase(&self, alpha: f64) -> Self {
        Self {
            amps: &self.amps * C64::from_polar(1.0, alpha),
        }
    }

    /// Largest componentwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &StateVec) -> f64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 3 || dim == 4 {
        Ok(())
    } else {
        Err(Error::BadDimension(dim))
    }
}

/// Coordinates `(θ, φ, χ₁, χ₂)` of the chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamPoint {
    pub theta: f64,
    pub phi: f64,
    pub chi1: f64,
    pub chi2: f64,
}

impl ParamPoint {
    /// Validates the ranges `θ, φ ∈ [0, π/2]`; the torus angles are reduced
    /// to `[0, 2π)`.
    pub fn new(theta: f64, phi: f64, chi1: f64, chi2: f64) -> Result<Self> {
        for (name, value) in [("theta", theta), ("phi", phi)] {
            if !(0.0..=FRAC_PI_2).contains(&value) {
                return Err(Error::ParameterOutOfRange { name, value });
            }
        }
        Ok(Self {
            theta,
            phi,
            chi1: angle::wrap_positive(chi1),
            chi2: angle::wrap_positive(chi2),
        })
    }
}

/// Maps chart coordinates to the state with `η = 0`.
pub fn param_to_state(p: ParamPoint) -> StateVec {
    let (st, ct) = p.theta.sin_cos();
    let (sp, cp) = p.phi.sin_cos();
    StateVec::from_vector_unchecked(DVector::from_vec(vec![
        C64::from_polar(ct, p.chi1),
        C64::from_polar(st * cp, p.chi2),
        C64::from(st * sp),
    ]))
}

/// Inverse chart. Returns the coordinates and the global phase `η` such that
/// `e^{iη} · param_to_state(p)` reproduces `v`.
///
/// Where the chart degenerates, `η` makes the last nonzero amplitude (checked
/// in the order index 2, 1, 0) real positive and every undetermined torus
/// angle is set to 0.
pub fn state_to_param(v: &StateVec) -> Result<(ParamPoint, f64)> {
    if v.dim() != 3 {
        return Err(Error::DimensionMismatch(v.dim(), 3));
    }
    let (a, b, c) = (v.amp(0), v.amp(1), v.amp(2));
    let (ma, mb, mc) = (a.norm(), b.norm(), c.norm());
    let theta = (mb.hypot(mc)).atan2(ma);
    let phi = mc.atan2(mb);

    let eta = if mc > AMPLITUDE_ZERO_TOL {
        c.arg()
    } else if mb > AMPLITUDE_ZERO_TOL {
        b.arg()
    } else {
        a.arg()
    };
    let relative = |z: C64, m: f64| {
        if m > AMPLITUDE_ZERO_TOL {
            angle::wrap_positive(z.arg() - eta)
        } else {
            0.0
        }
    };
    // a leading amplitude that fixed η has relative phase 0 already
    let chi1 = relative(a, ma);
    let chi2 = relative(b, mb);
    Ok((
        ParamPoint {
            theta,
            phi,
            chi1,
            chi2,
        },
        angle::wrap(eta),
    ))
}

/// Rank-one projector `ρ = |ψ⟩⟨ψ|`, the gauge-free image of a state in ray
/// space.
#[derive(Debug, Clone, PartialEq)]
pub struct Ray {
    matrix: DMatrix<C64>,
}

impl Ray {
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Largest entry of `ρ - ρ†`.
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    /// Largest entry of `ρ² - ρ`.
    pub fn idempotency_defect(&self) -> f64 {
        max_abs(&(&self.matrix * &self.matrix - &self.matrix))
    }

    /// Largest entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Ray) -> f64 {
        max_abs(&(&self.matrix - &other.matrix))
    }
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn projector(v: &StateVec) -> Ray {
    Ray {
        matrix: v.as_vector() * v.as_vector().adjoint(),
    }
}

/// Places a three-level state on `|00⟩, |10⟩, |11⟩`, leaving `|01⟩` empty.
pub fn embed(v: &StateVec) -> Result<StateVec> {
    if v.dim() != 3 {
        return Err(Error::DimensionMismatch(v.dim(), 3));
    }
    let mut w = DVector::zeros(4);
    for (k, &idx) in EMBED_INDICES.iter().enumerate() {
        w[idx] = v.amp(k);
    }
    Ok(StateVec::from_vector_unchecked(w))
}

/// Inverse of [`embed`]; fails when the `|01⟩` amplitude exceeds
/// [`LEAKAGE_TOL`].
pub fn extract(w: &StateVec) -> Result<StateVec> {
    if w.dim() != 4 {
        return Err(Error::DimensionMismatch(w.dim(), 4));
    }
    let leak = w.amp(REFERENCE_INDEX).norm();
    if leak > LEAKAGE_TOL {
        return Err(Error::Leakage(leak));
    }
    Ok(StateVec::from_vector_unchecked(DVector::from_iterator(
        3,
        EMBED_INDICES.iter().map(|&i| w.amp(i)),
    )))
}

/// `⟨v|w⟩`, conjugate-linear in `v`.
pub fn overlap(v: &StateVec, w: &StateVec) -> Result<C64> {
    if v.dim() != w.dim() {
        return Err(Error::DimensionMismatch(v.dim(), w.dim()));
    }
    Ok(v.as_vector().dotc(w.as_vector()))
}
