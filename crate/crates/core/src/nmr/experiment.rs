//! End-to-end interferometry: pseudopure preparation, Hadamard on spin b,
//! the three-leg cycle, and phase-sensitive readout.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

use crate::error::Result;
use crate::evolution::{cycle_unitaries, CycleParams, CycleUnitaries};
use crate::nmr::compile::{
    compile_controlled_r, compile_controlled_r23, hadamard_b_ideal, hadamard_b_pulses,
};
use crate::nmr::density::{read_phase, DensityMatrix};
use crate::nmr::pulse::{run_sequence, PulseOp, PulseSequence};
use crate::nmr::spin::{Axis, Spin, SpinSystem};

/// How gates are realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Each cycle leg is one exact unitary.
    Ideal,
    /// Each controlled gate is compiled into RF pulses and coupling delays.
    Pulse,
}

impl std::str::FromStr for Mode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(Mode::Ideal),
            "pulse" => Ok(Mode::Pulse),
            other => Err(crate::Error::Config(format!(
                "unknown mode {other:?} (expected ideal or pulse)"
            ))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Ideal => "ideal",
            Mode::Pulse => "pulse",
        })
    }
}

/// Initial longitudinal polarizations for sequence-mode preparation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polarization {
    pub p_a: f64,
    pub p_b: f64,
}

impl Default for Polarization {
    fn default() -> Self {
        Self { p_a: 1.0, p_b: 1.0 }
    }
}

impl Polarization {
    /// ¹H : ¹³C gyromagnetic ratio, roughly 4 : 1.
    pub fn heteronuclear() -> Self {
        Self { p_a: 4.0, p_b: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preparation {
    /// The exact projector `|00⟩⟨00|`.
    Ideal,
    /// The gradient-based preparation sequence acting on a deviation matrix.
    Sequence(Polarization),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prepared {
    pub state: DensityMatrix,
    /// Correlation of the traceless part with that of `|00⟩⟨00|`.
    pub fidelity: f64,
    pub duration: f64,
}

/// `R_x^b(π/3) → G_z → R_x^b(π/4) → 1/(2J) → R_y^b(π/4) → G_z`.
pub fn preparation_sequence(sys: &SpinSystem) -> PulseSequence {
    PulseSequence::new(vec![
        PulseOp::rf(Spin::B, Axis::X, FRAC_PI_3),
        PulseOp::GradientZ,
        PulseOp::rf(Spin::B, Axis::X, FRAC_PI_4),
        PulseOp::delay(1.0 / (2.0 * sys.j)),
        PulseOp::rf(Spin::B, Axis::Y, FRAC_PI_4),
        PulseOp::GradientZ,
    ])
}

pub fn prepare_pseudopure(prep: Preparation, sys: &SpinSystem) -> Prepared {
    match prep {
        Preparation::Ideal => Prepared {
            state: DensityMatrix::ground(),
            fidelity: 1.0,
            duration: 0.0,
        },
        Preparation::Sequence(p) => {
            let initial = DensityMatrix::deviation(p.p_a, p.p_b);
            let (state, duration) = run_sequence(&preparation_sequence(sys), &initial, sys);
            Prepared {
                fidelity: state.correlation(&DensityMatrix::ground()),
                state,
                duration,
            }
        }
    }
}

/// The Hadamard on spin b followed by the compiled cycle.
pub fn cycle_sequence(cu: &CycleUnitaries, mode: Mode, sys: &SpinSystem) -> Result<PulseSequence> {
    let mut seq = match mode {
        Mode::Ideal => hadamard_b_ideal(),
        Mode::Pulse => hadamard_b_pulses(),
    };
    seq.extend(cycle_body(cu, mode, sys)?);
    Ok(seq)
}

/// `U₃U₂U₁` alone, as three gates or as compiled pulses and delays.
pub fn cycle_body(cu: &CycleUnitaries, mode: Mode, sys: &SpinSystem) -> Result<PulseSequence> {
    let c = &cu.params;
    let r = &cu.reparam;
    let mut seq = PulseSequence::default();
    match mode {
        Mode::Ideal => {
            seq.push(PulseOp::gate(cu.u1(c.s1_0)));
            seq.push(PulseOp::gate(cu.u2(c.s2_0)));
            seq.push(PulseOp::gate(cu.u3(r.s3_0)));
        }
        Mode::Pulse => {
            // U₁ = R(s₁⁰)
            seq.extend(compile_controlled_r(c.s1_0, sys));
            // U₂ = R(s₁⁰) W R(s₂⁰) W† R(−s₁⁰), W = leg_conjugator(θ, φ, 0)
            let (mix, ph1, ph2) = (-c.varphi, c.theta, 0.0);
            seq.extend(compile_controlled_r(-c.s1_0, sys));
            seq.extend(compile_controlled_r23(-mix, -ph1, ph2, sys)?);
            seq.extend(compile_controlled_r(c.s2_0, sys));
            seq.extend(compile_controlled_r23(mix, ph1, ph2, sys)?);
            seq.extend(compile_controlled_r(c.s1_0, sys));
            // U₃ = V R(−s₃⁰) V†, V = leg_conjugator(χ, τ, −ξ)
            let (mix, ph1, ph2) = (-r.tau, r.chi, -r.xi);
            seq.extend(compile_controlled_r23(-mix, -ph1, ph2, sys)?);
            seq.extend(compile_controlled_r(-r.s3_0, sys));
            seq.extend(compile_controlled_r23(mix, ph1, ph2, sys)?);
        }
    }
    Ok(seq)
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub beta: f64,
    /// Duration of the Hadamard plus cycle, in seconds.
    pub duration: f64,
    pub final_state: DensityMatrix,
    pub sequence: PulseSequence,
}

/// Ideal pseudopure preparation, Hadamard on b, the cycle, readout.
pub fn full_experiment(c: &CycleParams, mode: Mode, sys: &SpinSystem) -> Result<ExperimentResult> {
    full_experiment_with(c, mode, Preparation::Ideal, sys)
}

pub fn full_experiment_with(
    c: &CycleParams,
    mode: Mode,
    prep: Preparation,
    sys: &SpinSystem,
) -> Result<ExperimentResult> {
    let cu = cycle_unitaries(c)?;
    let prepared = prepare_pseudopure(prep, sys);
    let sequence = cycle_sequence(&cu, mode, sys)?;
    let (final_state, duration) = run_sequence(&sequence, &prepared.state, sys);
    Ok(ExperimentResult {
        beta: read_phase(&final_state)?,
        duration,
        final_state,
        sequence,
    })
}
