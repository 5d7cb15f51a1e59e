//! Geometric phases of three-level quantum systems.
//!
//! The crate covers three layers:
//!
//! * [`statespace`], [`geometry`]: states, rays, geodesic lifts, the phase
//!   functionals and the Bargmann-invariant formula for geodesic polygons.
//! * [`evolution`]: the explicit three-leg cycle on `{|00⟩, |10⟩, |11⟩}`
//!   that keeps `|01⟩` as an interferometric reference, and its predicted
//!   phase.
//! * [`nmr`]: an idealized pulse-level simulation of the two-spin
//!   experiment, from pseudopure preparation to phase-sensitive readout.
//!
//! [`sweep`] drives parameter sweeps over the cycle and cross-checks every
//! route to the phase; the `geophase` binary exposes it on the command line.

pub mod angle;
pub mod error;
pub mod evolution;
pub mod geometry;
pub mod nmr;
pub mod quadrature;
pub mod statespace;
pub mod sweep;

pub use error::{Error, Result};
pub use evolution::{beta_predicted, run_cycle, CycleParams};
pub use geometry::{bargmann_gp, PhaseReport};
pub use quadrature::QuadratureConfig;
pub use statespace::{StateVec, C64};

// Compiles every snippet of the guide as a doctest.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/state-space.md")]
    mod state_space {}
    #[doc = include_str!("../../../book/src/geodesics.md")]
    mod geodesics {}
    #[doc = include_str!("../../../book/src/cycle.md")]
    mod cycle {}
    #[doc = include_str!("../../../book/src/nmr.md")]
    mod nmr {}
    #[doc = include_str!("../../../book/src/sweeps.md")]
    mod sweeps {}
}
