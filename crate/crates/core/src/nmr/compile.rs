//! Compilation of the cycle's controlled gates into RF pulses and coupling
//! delays.
//!
//! Free evolution for `t` seconds rotates spin a about z by `±πJt`, the
//! sign set by spin b (and vice versa). Sandwiching a delay between pulses
//! that tilt z onto another axis turns it into a rotation whose sense
//! depends on the control spin; a final unconditional rotation then cancels
//! one branch and doubles the other.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::evolution::{rot_r23, Unitary4};
use crate::nmr::pulse::{PulseOp, PulseSequence};
use crate::nmr::spin::{Axis, Spin, SpinSystem};
use crate::statespace::C64;

/// Minimum fidelity a compiled gate must reach.
pub const COMPILE_FIDELITY: f64 = 1.0 - 1e-8;

/// Controlled rotation `rot_r(s)`: spin a turns by `2s` about y when spin b
/// is `|0⟩`.
///
/// For `s ≥ 0` this is `R_x^a(π/2) → s/(πJ) → R_x^a(−π/2) → R_y^a(s)`;
/// negative angles swap the signs of the two x pulses so that the delay
/// stays non-negative.
pub fn compile_controlled_r(s: f64, sys: &SpinSystem) -> PulseSequence {
    let tilt = if s >= 0.0 { FRAC_PI_2 } else { -FRAC_PI_2 };
    PulseSequence::new(vec![
        PulseOp::rf(Spin::A, Axis::X, tilt),
        PulseOp::delay(s.abs() / (PI * sys.j)),
        PulseOp::rf(Spin::A, Axis::X, -tilt),
        PulseOp::rf(Spin::A, Axis::Y, s),
    ])
}

/// Rotation of a single spin by `angle` about the unit vector with polar
/// angle `polar` and azimuth `azimuth`, as z/y pulses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisAngle {
    pub angle: f64,
    pub polar: f64,
    pub azimuth: f64,
}

impl AxisAngle {
    /// Decomposes the SU(2) matrix `[[a, b], [−b̄, ā]]` as
    /// `cos(α/2) − i sin(α/2) n·σ` with `α ∈ [0, 2π]`.
    pub fn from_su2(a: C64, b: C64) -> Self {
        // a = cos(α/2) − i n_z sin(α/2),  b = −sin(α/2) (n_y + i n_x)
        let (nx, ny, nz) = (-b.im, -b.re, -a.im);
        let sin_half = (nx * nx + ny * ny + nz * nz).sqrt();
        let angle = 2.0 * sin_half.atan2(a.re);
        if sin_half < 1e-15 {
            return Self {
                angle,
                polar: 0.0,
                azimuth: 0.0,
            };
        }
        Self {
            angle,
            polar: (nz / sin_half).clamp(-1.0, 1.0).acos(),
            azimuth: ny.atan2(nx),
        }
    }

    /// `R_z(−φ) → R_y(−β) → R_z(angle) → R_y(β) → R_z(φ)` on `spin`.
    pub fn pulses(&self, spin: Spin) -> Vec<PulseOp> {
        vec![
            PulseOp::rf(spin, Axis::Z, -self.azimuth),
            PulseOp::rf(spin, Axis::Y, -self.polar),
            PulseOp::rf(spin, Axis::Z, self.angle),
            PulseOp::rf(spin, Axis::Y, self.polar),
            PulseOp::rf(spin, Axis::Z, self.azimuth),
        ]
    }
}

/// Controlled `rot_r23(mix, ph1, ph2)`: spin b undergoes the SU(2) block
/// when spin a is `|1⟩`.
///
/// The block is written as a rotation by `α` about `n(β, φ)`; the sequence
/// is `R_z^b(−φ) → R_y^b(−π−β) → α/(2πJ) → R_y^b(π+β) → R_z^b(φ)` followed
/// by an unconditional rotation by `α/2` about `n`. The tilt maps z onto
/// `−n`, so the delay rotates by `−α/2` about `n` when a is `|0⟩` and by
/// `+α/2` when a is `|1⟩`.
pub fn compile_controlled_r23(
    mix: f64,
    ph1: f64,
    ph2: f64,
    sys: &SpinSystem,
) -> Result<PulseSequence> {
    let target = rot_r23(mix, ph1, ph2);
    let m = target.matrix();
    let rot = AxisAngle::from_su2(m[(2, 2)], m[(2, 3)]);

    let mut ops = vec![
        PulseOp::rf(Spin::B, Axis::Z, -rot.azimuth),
        PulseOp::rf(Spin::B, Axis::Y, -PI - rot.polar),
        PulseOp::delay(rot.angle / (2.0 * PI * sys.j)),
        PulseOp::rf(Spin::B, Axis::Y, PI + rot.polar),
        PulseOp::rf(Spin::B, Axis::Z, rot.azimuth),
    ];
    ops.extend(
        AxisAngle {
            angle: 0.5 * rot.angle,
            ..rot
        }
        .pulses(Spin::B),
    );
    let seq = PulseSequence::new(ops);

    let net = seq.unitary(sys).expect("no gradients in a compiled gate");
    let fidelity = fidelity_up_to_diagonal(&net, &target);
    if fidelity < COMPILE_FIDELITY {
        return Err(Error::DecompositionInvalid(fidelity));
    }
    Ok(seq)
}

/// Hadamard on spin b as an ideal gate.
pub fn hadamard_b_ideal() -> PulseSequence {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let m = nalgebra::Matrix4::from_fn(|r, c| {
        if r / 2 != c / 2 {
            C64::from(0.0)
        } else if r % 2 == 1 && c % 2 == 1 {
            C64::from(-h)
        } else {
            C64::from(h)
        }
    });
    PulseSequence::new(vec![PulseOp::gate(Unitary4::from_matrix(m))])
}

/// Hadamard on spin b as `R_y^b(π/2) → R_x^b(π)`, equal to the ideal gate
/// times `−i`.
pub fn hadamard_b_pulses() -> PulseSequence {
    PulseSequence::new(vec![
        PulseOp::rf(Spin::B, Axis::Y, FRAC_PI_2),
        PulseOp::rf(Spin::B, Axis::X, PI),
    ])
}

/// `(1/4) Σₖ |(U T†)ₖₖ|`: equals 1 iff `U = D T` for a diagonal phase
/// matrix `D`.
pub fn fidelity_up_to_diagonal(u: &Unitary4, target: &Unitary4) -> f64 {
    let p = u.matrix() * target.matrix().adjoint();
    (0..4).map(|k| p[(k, k)].norm()).sum::<f64>() / 4.0
}

/// `|Tr(T†U)| / 4`: equals 1 iff `U` and `T` agree up to a global phase.
pub fn fidelity_global(u: &Unitary4, target: &Unitary4) -> f64 {
    (target.matrix().adjoint() * u.matrix()).trace().norm() / 4.0
}

/// Phase difference that `U` imprints between `|00⟩` and `|01⟩` relative to
/// `T`, i.e. `arg (U T†)₀₀ − arg (U T†)₁₁`.
pub fn readout_phase_leak(u: &Unitary4, target: &Unitary4) -> f64 {
    let p = u.matrix() * target.matrix().adjoint();
    crate::angle::wrap(p[(0, 0)].arg() - p[(1, 1)].arg())
}
