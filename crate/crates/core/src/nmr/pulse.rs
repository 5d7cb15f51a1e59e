//! Pulse operations, sequences, their action on density matrices, and the
//! line-oriented text form used for golden files.
//!
//! One operation per line, whitespace separated:
//!
//! ```text
//! rf    <spin> <axis> <angle> <duration>
//! delay -      -      -       <duration>
//! gradz -      -      -       0
//! gate  -      -      -       0  <32 numbers: re, im of U row by row>
//! ```
//!
//! Numbers are written in Rust's shortest round-trip form, so writing and
//! re-reading a sequence is bit-exact. Blank lines and lines starting with
//! `#` are ignored.

use std::fmt::{self, Write as _};

use nalgebra::Matrix4;

use crate::error::{Error, Result};
use crate::evolution::Unitary4;
use crate::nmr::density::DensityMatrix;
use crate::nmr::spin::{coupling_propagator, rotation, Axis, Spin, SpinSystem};
use crate::statespace::C64;

#[derive(Debug, Clone, PartialEq)]
pub enum PulseOp {
    /// Hard RF pulse `exp(−i·angle·I_axis)` on one spin.
    Rf {
        spin: Spin,
        axis: Axis,
        angle: f64,
        duration: f64,
    },
    /// Free precession under the coupling.
    Delay { duration: f64 },
    /// Crusher gradient: destroys every coherence.
    GradientZ,
    /// An arbitrary unitary applied instantaneously.
    IdealGate { unitary: Unitary4 },
}

impl PulseOp {
    pub fn rf(spin: Spin, axis: Axis, angle: f64) -> Self {
        PulseOp::Rf {
            spin,
            axis,
            angle,
            duration: 0.0,
        }
    }

    pub fn delay(duration: f64) -> Self {
        PulseOp::Delay { duration }
    }

    pub fn gate(unitary: Unitary4) -> Self {
        PulseOp::IdealGate { unitary }
    }

    pub fn duration(&self) -> f64 {
        match self {
            PulseOp::Rf { duration, .. } | PulseOp::Delay { duration } => *duration,
            PulseOp::GradientZ | PulseOp::IdealGate { .. } => 0.0,
        }
    }

    /// The propagator of this operation, if it is unitary.
    pub fn unitary(&self, sys: &SpinSystem) -> Option<Unitary4> {
        match self {
            PulseOp::Rf {
                spin, axis, angle, ..
            } => Some(rotation(*spin, *axis, *angle)),
            PulseOp::Delay { duration } => Some(coupling_propagator(sys.j, *duration)),
            PulseOp::GradientZ => None,
            PulseOp::IdealGate { unitary } => Some(*unitary),
        }
    }
}

/// An ordered list of operations, applied first to last.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PulseSequence {
    ops: Vec<PulseOp>,
}

impl PulseSequence {
    pub fn new(ops: Vec<PulseOp>) -> Self {
        Self { ops }
    }

    pub fn ops(&self) -> &[PulseOp] {
        &self.ops
    }

    pub fn push(&mut self, op: PulseOp) {
        self.ops.push(op);
    }

    pub fn extend(&mut self, other: PulseSequence) {
        self.ops.extend(other.ops);
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Sum of the member durations, in seconds.
    pub fn total_duration(&self) -> f64 {
        self.ops.iter().map(PulseOp::duration).sum()
    }

    /// Net propagator, or `None` if the sequence contains a gradient.
    pub fn unitary(&self, sys: &SpinSystem) -> Option<Unitary4> {
        self.ops.iter().try_fold(Unitary4::identity(), |acc, op| {
            Some(acc.then(&op.unitary(sys)?))
        })
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut ops = Vec::new();
        for (index, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            ops.push(parse_line(line).map_err(|message| Error::SequenceParse {
                line: index + 1,
                message,
            })?);
        }
        Ok(Self { ops })
    }
}

impl FromIterator<PulseOp> for PulseSequence {
    fn from_iter<I: IntoIterator<Item = PulseOp>>(iter: I) -> Self {
        Self {
            ops: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for PulseSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.ops {
            match op {
                PulseOp::Rf {
                    spin,
                    axis,
                    angle,
                    duration,
                } => writeln!(f, "rf {spin} {axis} {angle} {duration}")?,
                PulseOp::Delay { duration } => writeln!(f, "delay - - - {duration}")?,
                PulseOp::GradientZ => writeln!(f, "gradz - - - 0")?,
                PulseOp::IdealGate { unitary } => {
                    let mut line = String::from("gate - - - 0");
                    let m = unitary.matrix();
                    for r in 0..4 {
                        for c in 0..4 {
                            let z = m[(r, c)];
                            write!(line, " {} {}", z.re, z.im)?;
                        }
                    }
                    writeln!(f, "{line}")?;
                }
            }
        }
        Ok(())
    }
}

fn number(field: &str, what: &str) -> std::result::Result<f64, String> {
    let x: f64 = field.parse().map_err(|_| format!("bad {what} {field:?}"))?;
    if !x.is_finite() {
        return Err(format!("{what} must be finite"));
    }
    Ok(x)
}

fn duration(field: &str) -> std::result::Result<f64, String> {
    let d = number(field, "duration")?;
    if d < 0.0 {
        return Err(format!("negative duration {d}"));
    }
    Ok(d)
}

fn parse_line(line: &str) -> std::result::Result<PulseOp, String> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() < 5 {
        return Err(format!("expected at least 5 fields, got {}", fields.len()));
    }
    let placeholders = |range: std::ops::Range<usize>| {
        if fields[range].iter().all(|f| *f == "-") {
            Ok(())
        } else {
            Err("expected '-' placeholders".to_string())
        }
    };
    let exact = |n: usize| {
        if fields.len() == n {
            Ok(())
        } else {
            Err(format!("expected {n} fields, got {}", fields.len()))
        }
    };
    match fields[0] {
        "rf" => {
            exact(5)?;
            Ok(PulseOp::Rf {
                spin: fields[1].parse().map_err(|e: Error| e.to_string())?,
                axis: fields[2].parse().map_err(|e: Error| e.to_string())?,
                angle: number(fields[3], "angle")?,
                duration: duration(fields[4])?,
            })
        }
        "delay" => {
            exact(5)?;
            placeholders(1..4)?;
            Ok(PulseOp::Delay {
                duration: duration(fields[4])?,
            })
        }
        "gradz" => {
            exact(5)?;
            placeholders(1..4)?;
            if duration(fields[4])? != 0.0 {
                return Err("gradient duration must be 0".into());
            }
            Ok(PulseOp::GradientZ)
        }
        "gate" => {
            exact(5 + 32)?;
            placeholders(1..4)?;
            if duration(fields[4])? != 0.0 {
                return Err("gate duration must be 0".into());
            }
            let values = fields[5..]
                .iter()
                .map(|f| number(f, "matrix entry"))
                .collect::<std::result::Result<Vec<f64>, String>>()?;
            let m = Matrix4::from_fn(|r, c| {
                let k = 2 * (4 * r + c);
                C64::new(values[k], values[k + 1])
            });
            Ok(PulseOp::IdealGate {
                unitary: Unitary4::from_matrix(m),
            })
        }
        other => Err(format!("unknown operation {other:?}")),
    }
}

/// Applies one operation to a density matrix.
pub fn apply(op: &PulseOp, rho: &DensityMatrix, sys: &SpinSystem) -> DensityMatrix {
    match op.unitary(sys) {
        Some(u) => rho.conjugate(&u),
        None => rho.dephase(),
    }
}

/// Applies the sequence left to right; returns the final state and the
/// sequence duration in seconds.
pub fn run_sequence(
    seq: &PulseSequence,
    rho0: &DensityMatrix,
    sys: &SpinSystem,
) -> (DensityMatrix, f64) {
    let rho = seq.ops().iter().fold(*rho0, |rho, op| apply(op, &rho, sys));
    (rho, seq.total_duration())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statespace::StateVec;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn sample_sequence() -> PulseSequence {
        PulseSequence::new(vec![
            PulseOp::rf(Spin::B, Axis::X, PI / 3.0),
            PulseOp::GradientZ,
            PulseOp::delay(1.0 / (2.0 * 214.5)),
            PulseOp::Rf {
                spin: Spin::A,
                axis: Axis::Y,
                angle: -0.0,
                duration: 1e-6,
            },
            PulseOp::gate(crate::evolution::rot_r23(0.3, -1.2, 2.5)),
        ])
    }

    #[test]
    fn delay_phase_on_coherence() {
        let sys = SpinSystem::default();
        let v = StateVec::from_real(&[1.0, 0.0, 1.0, 0.0]).unwrap();
        let rho = DensityMatrix::pure(&v).unwrap();
        let out = apply(&PulseOp::delay(1.0 / (2.0 * sys.j)), &rho, &sys);
        // |00⟩ picks up e^{−iπ/4}, |10⟩ picks up e^{+iπ/4}
        let want = C64::from_polar(0.5, -FRAC_PI_2);
        assert!((out.matrix()[(0, 2)] - want).norm() < 1e-15);
    }

    #[test]
    fn gradient_keeps_diagonal() {
        let sys = SpinSystem::default();
        let v = StateVec::normalized(vec![
            C64::new(0.3, 0.1),
            C64::new(-0.2, 0.5),
            C64::new(0.7, 0.0),
            C64::new(0.1, -0.4),
        ])
        .unwrap();
        let rho = DensityMatrix::pure(&v).unwrap();
        let out = apply(&PulseOp::GradientZ, &rho, &sys);
        assert_eq!(out.off_diagonal_norm(), 0.0);
        for k in 0..4 {
            assert_eq!(out.matrix()[(k, k)], rho.matrix()[(k, k)]);
        }
        assert_eq!(apply(&PulseOp::GradientZ, &out, &sys), out);
    }

    #[test]
    fn spin_flip() {
        let sys = SpinSystem::default();
        let out = apply(
            &PulseOp::rf(Spin::B, Axis::X, PI),
            &DensityMatrix::ground(),
            &sys,
        );
        assert!((out.matrix()[(1, 1)] - 1.0).norm() < 1e-15);
        assert!(out.matrix()[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn empty_sequence() {
        let sys = SpinSystem::default();
        let rho = DensityMatrix::deviation(1.0, 1.0);
        let (out, t) = run_sequence(&PulseSequence::default(), &rho, &sys);
        assert_eq!(out, rho);
        assert_eq!(t, 0.0);
    }

    #[test]
    fn durations_add() {
        let a = sample_sequence();
        let mut b = PulseSequence::new(vec![PulseOp::delay(0.25e-3), PulseOp::delay(1e-3)]);
        let (ta, tb) = (a.total_duration(), b.total_duration());
        b.extend(a);
        assert_eq!(b.total_duration(), ta + tb);
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let seq = sample_sequence();
        let text = seq.to_text();
        let back = PulseSequence::parse(&text).unwrap();
        assert_eq!(back, seq);
        assert_eq!(back.to_text(), text);
        if let PulseOp::Rf { angle, .. } = back.ops()[3] {
            assert!(angle.is_sign_negative());
        }
    }

    #[test]
    fn text_format_golden() {
        let seq = PulseSequence::new(vec![
            PulseOp::rf(Spin::B, Axis::X, 0.5),
            PulseOp::GradientZ,
            PulseOp::delay(0.0025),
        ]);
        assert_eq!(
            seq.to_text(),
            "rf b x 0.5 0\ngradz - - - 0\ndelay - - - 0.0025\n"
        );
        let parsed =
            PulseSequence::parse("# comment\n\nrf b x 0.5 0\ngradz - - - 0\ndelay - - - 0.0025\n")
                .unwrap();
        assert_eq!(parsed, seq);
    }

    #[test]
    fn text_parse_errors() {
        for bad in [
            "rf c x 1 0",
            "rf a w 1 0",
            "rf a x nan 0",
            "delay - - - -1",
            "delay a - - 1",
            "gradz - - - 1",
            "pulse - - - 0",
            "rf a x 1",
            "gate - - - 0 1 0",
        ] {
            let err = PulseSequence::parse(&format!("delay - - - 0\n{bad}\n")).unwrap_err();
            assert!(
                matches!(err, Error::SequenceParse { line: 2, .. }),
                "{bad}: {err:?}"
            );
        }
    }

    fn op_strategy() -> impl Strategy<Value = PulseOp> {
        let spin = prop_oneof![Just(Spin::A), Just(Spin::B)];
        let axis = prop_oneof![Just(Axis::X), Just(Axis::Y), Just(Axis::Z)];
        prop_oneof![
            (spin, axis, -10.0f64..10.0, 0.0f64..1e-3).prop_map(|(spin, axis, angle, duration)| {
                PulseOp::Rf {
                    spin,
                    axis,
                    angle,
                    duration,
                }
            }),
            (0.0f64..0.05).prop_map(PulseOp::delay),
            Just(PulseOp::GradientZ),
            (-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0)
                .prop_map(|(m, p, q)| PulseOp::gate(crate::evolution::rot_r23(m, p, q))),
        ]
    }

    proptest! {
        #[test]
        fn random_sequences_round_trip(ops in prop::collection::vec(op_strategy(), 0..12)) {
            let seq = PulseSequence::new(ops);
            prop_assert_eq!(PulseSequence::parse(&seq.to_text()).unwrap(), seq);
        }

        #[test]
        fn apply_preserves_hermiticity_and_trace(ops in prop::collection::vec(op_strategy(), 1..12)) {
            let sys = SpinSystem::default();
            let v = StateVec::normalized(vec![
                C64::new(0.3, 0.1), C64::new(-0.2, 0.5), C64::new(0.7, 0.0), C64::new(0.1, -0.4),
            ]).unwrap();
            let mut rho = DensityMatrix::pure(&v).unwrap();
            for op in &ops {
                let next = apply(op, &rho, &sys);
                prop_assert!(next.hermiticity_defect() < 1e-12);
                prop_assert!((next.trace() - rho.trace()).norm() < 1e-12);
                rho = next;
            }
        }
    }
}
