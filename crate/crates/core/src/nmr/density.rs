use nalgebra::{Matrix4, Vector4};

use crate::error::{Error, Result};
use crate::evolution::{max_abs4, Unitary4};
use crate::nmr::spin::{spin_operator, Axis, Spin};
use crate::statespace::{StateVec, C64, REFERENCE_INDEX};

/// Coherences below this magnitude carry no readable phase.
pub const SIGNAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityKind {
    /// Unit trace.
    Normalized,
    /// Traceless deviation from the identity, as seen by an NMR experiment.
    Deviation,
}

/// A 4×4 Hermitian density (or deviation density) matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    matrix: Matrix4<C64>,
    kind: DensityKind,
}

impl DensityMatrix {
    pub fn pure(v: &StateVec) -> Result<Self> {
        if v.dim() != 4 {
            return Err(Error::DimensionMismatch(v.dim(), 4));
        }
        let w = Vector4::from_column_slice(v.amplitudes());
        Ok(Self {
            matrix: w * w.adjoint(),
            kind: DensityKind::Normalized,
        })
    }

    /// `|00⟩⟨00|`.
    pub fn ground() -> Self {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = C64::from(1.0);
        Self {
            matrix: m,
            kind: DensityKind::Normalized,
        }
    }

    /// Thermal-like deviation `p_a I_z^a + p_b I_z^b`.
    pub fn deviation(p_a: f64, p_b: f64) -> Self {
        Self {
            matrix: spin_operator(Spin::A, Axis::Z) * C64::from(p_a)
                + spin_operator(Spin::B, Axis::Z) * C64::from(p_b),
            kind: DensityKind::Deviation,
        }
    }

    pub fn from_matrix(matrix: Matrix4<C64>, kind: DensityKind) -> Self {
        Self { matrix, kind }
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.matrix
    }

    pub fn kind(&self) -> DensityKind {
        self.kind
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_abs4(&(self.matrix - self.matrix.adjoint()))
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, u: &Unitary4) -> Self {
        Self {
            matrix: u.matrix() * self.matrix * u.matrix().adjoint(),
            kind: self.kind,
        }
    }

    /// Keeps the diagonal only.
    pub fn dephase(&self) -> Self {
        Self {
            matrix: Matrix4::from_diagonal(&self.matrix.diagonal()),
            kind: self.kind,
        }
    }

    /// Largest off-diagonal modulus.
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..4 {
            for c in 0..4 {
                if r != c {
                    worst = worst.max(self.matrix[(r, c)].norm());
                }
            }
        }
        worst
    }

    /// `⟨00|ρ|01⟩`, the single-quantum coherence of spin b with spin a in
    /// `|0⟩`.
    pub fn readout_coherence(&self) -> C64 {
        self.matrix[(0, REFERENCE_INDEX)]
    }

    /// Traceless part `ρ − Tr(ρ)/4`.
    pub fn traceless(&self) -> Matrix4<C64> {
        self.matrix - Matrix4::identity() * (self.trace() / C64::from(4.0))
    }

    /// Normalized Hilbert–Schmidt correlation of the traceless parts, the
    /// usual figure of merit for pseudopure preparation. 1 means `self` is
    /// a positive multiple of `target` up to identity.
    pub fn correlation(&self, target: &DensityMatrix) -> f64 {
        let (a, b) = (self.traceless(), target.traceless());
        let (na, nb) = (a.norm(), b.norm());
        if na == 0.0 || nb == 0.0 {
            return 0.0;
        }
        (a.adjoint() * b).trace().re / (na * nb)
    }
}

/// Phase-sensitive readout of spin b: `arg⟨00|ρ|01⟩`.
pub fn read_phase(rho: &DensityMatrix) -> Result<f64> {
    let coherence = rho.readout_coherence();
    if coherence.norm() < SIGNAL_TOL {
        return Err(Error::NoSignal(coherence.norm()));
    }
    Ok(crate::angle::wrap(coherence.arg()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn readout_state(beta: f64) -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = StateVec::new(vec![
            C64::from_polar(h, beta),
            C64::from(h),
            C64::from(0.0),
            C64::from(0.0),
        ])
        .unwrap();
        DensityMatrix::pure(&v).unwrap()
    }

    #[test]
    fn read_phase_examples() {
        assert_eq!(read_phase(&readout_state(0.0)).unwrap(), 0.0);
        assert!(matches!(
            read_phase(&DensityMatrix::ground()),
            Err(Error::NoSignal(_))
        ));
    }

    #[test]
    fn deviation_is_traceless() {
        let d = DensityMatrix::deviation(1.0, 1.0);
        assert_eq!(d.kind(), DensityKind::Deviation);
        assert!(d.trace().norm() < 1e-15);
        assert!((d.matrix()[(0, 0)] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn correlation_of_pseudopure() {
        let g = DensityMatrix::ground();
        assert!((g.correlation(&g) - 1.0).abs() < 1e-15);
        // I_z^a + I_z^b + 2 I_z^a I_z^b is twice the traceless part of |00⟩⟨00|
        let zz = spin_operator(Spin::A, Axis::Z) * spin_operator(Spin::B, Axis::Z);
        let m = DensityMatrix::deviation(1.0, 1.0).matrix() + zz * C64::from(2.0);
        let d = DensityMatrix::from_matrix(m, DensityKind::Deviation);
        assert!((d.correlation(&g) - 1.0).abs() < 1e-15);
        assert!(DensityMatrix::deviation(1.0, 1.0).correlation(&g) < 0.9);
    }

    #[test]
    fn dephase_is_idempotent() {
        let rho = readout_state(0.4);
        let once = rho.dephase();
        assert_eq!(once.dephase(), once);
        assert_eq!(once.off_diagonal_norm(), 0.0);
    }

    proptest! {
        #[test]
        fn read_phase_round_trip(beta in -PI..PI) {
            let got = read_phase(&readout_state(beta)).unwrap();
            prop_assert!(crate::angle::circular_distance(got, beta) < 1e-12);
        }
    }
}
