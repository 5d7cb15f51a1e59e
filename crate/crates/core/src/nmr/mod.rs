//! Idealized pulse-level simulation of the two-spin interferometry
//! experiment.
//!
//! Everything happens in the doubly rotating frame with both carriers on
//! resonance, so only the scalar coupling survives between pulses. Pulses
//! are instantaneous, gradients are modelled as perfect dephasing, and
//! there is no relaxation.

pub mod compile;
pub mod density;
pub mod experiment;
pub mod pulse;
pub mod spin;

pub use compile::{
    compile_controlled_r, compile_controlled_r23, fidelity_global, fidelity_up_to_diagonal,
    hadamard_b_ideal, hadamard_b_pulses,
};
pub use density::{read_phase, DensityKind, DensityMatrix};
pub use experiment::{
    cycle_body, cycle_sequence, full_experiment, full_experiment_with, prepare_pseudopure, Mode,
    Polarization, Preparation,
};
pub use pulse::{apply, run_sequence, PulseOp, PulseSequence};
pub use spin::{Axis, Spin, SpinSystem};
