//! Spin-½ operators and propagators for the two-spin system.
//!
//! Basis order is `|d_a d_b⟩ = |00⟩, |01⟩, |10⟩, |11⟩` with `|0⟩` the
//! spin-up (`m = +½`) state, so the two-qubit index is `2·d_a + d_b`.
//! Rotations are `R(angle) = exp(−i·angle·I_axis)` with `I = σ/2`, and free
//! evolution in the doubly rotating frame is `exp(−i·2πJ·t·I_z^a I_z^b)`.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix4};

use crate::error::{Error, Result};
use crate::evolution::Unitary4;
use crate::statespace::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    /// First qubit, the proton.
    A,
    /// Second qubit, the carbon; read out by the detector.
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spin::A => "a",
            Spin::B => "b",
        })
    }
}

impl FromStr for Spin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(Spin::A),
            "b" => Ok(Spin::B),
            other => Err(Error::Config(format!("unknown spin {other:?}"))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(Error::Config(format!("unknown axis {other:?}"))),
        }
    }
}

/// Two coupled spins in the rotating frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinSystem {
    /// Larmor angular frequency of spin a (rad/s). Removed by the rotating
    /// frame; kept for reference.
    pub omega_a: f64,
    /// Larmor angular frequency of spin b (rad/s).
    pub omega_b: f64,
    /// Scalar coupling in Hz.
    pub j: f64,
}

impl Default for SpinSystem {
    /// ¹³C-labelled chloroform at 400 MHz.
    fn default() -> Self {
        Self {
            omega_a: TAU * 400e6,
            omega_b: TAU * 100e6,
            j: 214.5,
        }
    }
}

impl SpinSystem {
    pub fn with_coupling(j: f64) -> Result<Self> {
        if !(j > 0.0 && j.is_finite()) {
            return Err(Error::ParameterOutOfRange {
                name: "J",
                value: j,
            });
        }
        Ok(Self {
            j,
            ..Self::default()
        })
    }
}

fn pauli(axis: Axis) -> Matrix2<C64> {
    let (o, l, i) = (C64::from(0.0), C64::from(1.0), C64::i());
    match axis {
        Axis::X => Matrix2::new(o, l, l, o),
        Axis::Y => Matrix2::new(o, -i, i, o),
        Axis::Z => Matrix2::new(l, o, o, -l),
    }
}

fn kron(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

fn on_spin(spin: Spin, m: &Matrix2<C64>) -> Matrix4<C64> {
    match spin {
        Spin::A => kron(m, &Matrix2::identity()),
        Spin::B => kron(&Matrix2::identity(), m),
    }
}

/// `I_axis` acting on one spin.
pub fn spin_operator(spin: Spin, axis: Axis) -> Matrix4<C64> {
    on_spin(spin, &(pauli(axis) * C64::from(0.5)))
}

/// `exp(−i·angle·I_axis)` on a 2×2 space.
pub fn single_spin_rotation(axis: Axis, angle: f64) -> Matrix2<C64> {
    let (s, c) = (0.5 * angle).sin_cos();
    Matrix2::identity() * C64::from(c) - pauli(axis) * C64::new(0.0, s)
}

/// RF pulse `R^spin_axis(angle)`.
pub fn rotation(spin: Spin, axis: Axis, angle: f64) -> Unitary4 {
    Unitary4::from_matrix(on_spin(spin, &single_spin_rotation(axis, angle)))
}

/// Free evolution for `t` seconds under `2πJ I_z^a I_z^b`.
pub fn coupling_propagator(j: f64, t: f64) -> Unitary4 {
    let phase = std::f64::consts::PI * j * t / 2.0;
    let (minus, plus) = (C64::from_polar(1.0, -phase), C64::from_polar(1.0, phase));
    Unitary4::from_matrix(Matrix4::from_diagonal(&nalgebra::Vector4::new(
        minus, plus, plus, minus,
    )))
}
