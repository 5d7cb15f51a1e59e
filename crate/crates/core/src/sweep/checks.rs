//! The cross-validation suite run by `geophase check`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::angle::circular_distance;
use crate::error::{Error, Result};
use crate::evolution::{
    beta_predicted, cycle_unitaries, rot_r, rot_r23, run_cycle_detailed, CycleParams,
};
use crate::geometry::{
    bargmann_gp, bargmann_invariant, bargmann_trace, dynamical_phase, make_geodesic,
};
use crate::nmr::compile::{compile_controlled_r, compile_controlled_r23, fidelity_up_to_diagonal};
use crate::nmr::{
    cycle_body, full_experiment, prepare_pseudopure, Mode, Polarization, Preparation, SpinSystem,
};
use crate::quadrature::QuadratureConfig;
use crate::statespace::{projector, Ray, StateVec, C64, REFERENCE_INDEX};
use crate::sweep::{run_sweep, Summary, SweepConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{mark}  {:<28} {}", self.name, self.detail)
    }
}

/// Sizes and tolerances of the suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckSuite {
    /// Points per axis of the `(s₁⁰, s₂⁰)` grid.
    pub grid: usize,
    /// Random draws for the arc, gate and polygon checks.
    pub draws: usize,
    pub seed: u64,
    /// Pairwise agreement required of the three phase routes (rad).
    pub agreement: f64,
}

impl Default for CheckSuite {
    fn default() -> Self {
        Self {
            grid: 9,
            draws: 100,
            seed: 0x6765_6f70,
            agreement: 1e-7,
        }
    }
}

pub const THETAS: [f64; 3] = [0.0, FRAC_PI_4, FRAC_PI_2];
pub const VARPHIS: [f64; 3] = [0.0, FRAC_PI_4, FRAC_PI_2 - 0.01];

/// Every `(s₁⁰, s₂⁰, θ, φ)` of the validation grid.
pub fn grid_points(n: usize) -> Vec<(f64, f64, f64, f64)> {
    let axis: Vec<f64> = (0..n)
        .map(|k| FRAC_PI_2 * k as f64 / (n - 1) as f64)
        .collect();
    let mut out = Vec::with_capacity(n * n * 9);
    for &theta in &THETAS {
        for &varphi in &VARPHIS {
            for &s1 in &axis {
                for &s2 in &axis {
                    out.push((s1, s2, theta, varphi));
                }
            }
        }
    }
    out
}

/// Uniform components in the unit square, normalized.
pub fn random_state<R: Rng>(rng: &mut R, dim: usize) -> StateVec {
    loop {
        let amps: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        if let Ok(v) = StateVec::normalized(amps) {
            return v;
        }
    }
}

fn outcome(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome {
        name,
        passed,
        detail,
    }
}

struct GridPoint {
    dev: Option<f64>,
    undefined: bool,
    degenerate: bool,
    max_leg: f64,
    ref_defect: f64,
}

fn evaluate_point(
    &(s1, s2, theta, varphi): &(f64, f64, f64, f64),
    quad: &QuadratureConfig,
) -> Result<GridPoint> {
    let c = match CycleParams::new(s1, s2, theta, varphi) {
        Ok(c) => c,
        Err(Error::BetaUndefined(_)) => {
            return Ok(GridPoint {
                dev: None,
                undefined: true,
                degenerate: false,
                max_leg: 0.0,
                ref_defect: 0.0,
            })
        }
        Err(e) => return Err(e),
    };
    let formula = beta_predicted(&c)?;
    let run = run_cycle_detailed(&c, quad)?;
    let mut betas = vec![formula, run.phases.geometric];
    let degenerate = match bargmann_gp(&c.vertices()) {
        Ok(b) => {
            betas.push(b);
            false
        }
        Err(Error::DegeneratePolygon { .. }) => true,
        Err(e) => return Err(e),
    };
    let dev = super::record::max_pairwise_deviation(&betas);
    let max_leg = run.legs.iter().map(|i| i.value.abs()).fold(0.0, f64::max);
    let cu = cycle_unitaries(&c)?;
    let ref_defect = [cu.u1(c.s1_0), cu.u2(c.s2_0), cu.u3(cu.reparam.s3_0)]
        .iter()
        .map(|u| u.reference_defect())
        .fold(0.0, f64::max);
    Ok(GridPoint {
        dev: Some(dev),
        undefined: false,
        degenerate,
        max_leg,
        ref_defect,
    })
}

/// Three-way agreement, vanishing dynamical phase on every leg, and exact
/// reference invariance of the ideal gates over the validation grid.
pub fn grid_checks(suite: &CheckSuite) -> Vec<CheckOutcome> {
    let quad = QuadratureConfig::default();
    let points = grid_points(suite.grid);
    let t0 = Instant::now();
    let results: Vec<Result<GridPoint>> = points
        .par_iter()
        .map(|p| evaluate_point(p, &quad))
        .collect();
    let elapsed = t0.elapsed().as_secs_f64();
    let failures = results.iter().filter(|r| r.is_err()).count();
    let ok: Vec<&GridPoint> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
    let worst = ok.iter().filter_map(|g| g.dev).fold(0.0, f64::max);
    let undefined = ok.iter().filter(|g| g.undefined).count();
    let degenerate = ok.iter().filter(|g| g.degenerate).count();
    let max_leg = ok.iter().map(|g| g.max_leg).fold(0.0, f64::max);
    let ref_defect = ok.iter().map(|g| g.ref_defect).fold(0.0, f64::max);
    vec![
        outcome(
            "three-way agreement",
            failures == 0 && worst < suite.agreement,
            format!(
                "{} points, max dev {worst:.2e} rad, {undefined} undefined, {degenerate} degenerate, {failures} errors, {elapsed:.1} s",
                points.len()
            ),
        ),
        outcome(
            "cycle legs horizontal",
            failures == 0 && max_leg < 1e-9,
            format!("max |gamma_d| per leg {max_leg:.2e} rad"),
        ),
        outcome(
            "reference invariance (ideal)",
            failures == 0 && ref_defect == 0.0,
            format!("max defect {ref_defect:.2e}"),
        ),
    ]
}

/// Dynamical phase along random geodesic arcs in `C³`.
pub fn random_arcs(suite: &CheckSuite) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(suite.seed);
    let quad = QuadratureConfig::default();
    let mut worst = 0.0f64;
    let mut errors = 0;
    for _ in 0..suite.draws.max(200) {
        let (v, w) = (random_state(&mut rng, 3), random_state(&mut rng, 3));
        match make_geodesic(&v, &w).and_then(|arc| dynamical_phase(&arc, &quad)) {
            Ok(i) => worst = worst.max(i.value.abs()),
            Err(_) => errors += 1,
        }
    }
    outcome(
        "random arcs horizontal",
        errors == 0 && worst < 1e-9,
        format!(
            "{} arcs, max |gamma_d| {worst:.2e} rad, {errors} errors",
            suite.draws.max(200)
        ),
    )
}

/// The two reference sweeps in ideal mode, the `−3π/8` spot value and the
/// pulse-mode durations.
pub fn demo_checks() -> Vec<CheckOutcome> {
    let sys = SpinSystem::default();
    let mut rms: f64 = 0.0;
    let mut zero_start: f64 = 0.0;
    let mut flagged = 0;
    let (mut shortest, mut longest) = (f64::INFINITY, 0.0f64);
    for cfg in SweepConfig::demo() {
        match run_sweep(&cfg) {
            Ok(records) => {
                let s = Summary::of(&records, cfg.threshold);
                rms = rms.max(s.rms_sim_deg);
                flagged += s.flagged;
                zero_start = records[0].betas().map(f64::abs).fold(zero_start, f64::max);
            }
            Err(_) => flagged += 1,
        }
        for x in cfg.grid() {
            let (s1, s2) = cfg.point(x);
            let d = CycleParams::new(s1, s2, cfg.theta, cfg.varphi)
                .and_then(|c| full_experiment(&c, Mode::Pulse, &sys));
            match d {
                Ok(r) => {
                    shortest = shortest.min(r.duration * 1e3);
                    longest = longest.max(r.duration * 1e3);
                }
                Err(_) => flagged += 1,
            }
        }
    }
    let spot = CycleParams::new(FRAC_PI_4, FRAC_PI_4, FRAC_PI_4, 0.0)
        .and_then(|c| full_experiment(&c, Mode::Ideal, &sys))
        .map(|r| circular_distance(r.beta, -3.0 * PI / 8.0));
    let spot_ok = matches!(spot, Ok(d) if d < 1e-10);
    vec![
        outcome(
            "reference sweeps",
            flagged == 0 && rms < 1e-6 && zero_start < 1e-12 && spot_ok,
            format!(
                "rms(beta_sim-beta_formula) {rms:.2e} deg, |beta| at s1_0=0 {zero_start:.1e}, spot -3pi/8 dev {}",
                spot.map_or_else(|e| e.to_string(), |d| format!("{d:.1e}"))
            ),
        ),
        outcome(
            "pulse durations",
            flagged == 0 && shortest >= 5.0 && longest <= 25.0,
            format!("{shortest:.2} to {longest:.2} ms"),
        ),
    ]
}

/// Row and column `|01⟩` of the simulated final state agree between ideal
/// and pulse mode, and the compiled cycle fixes `|01⟩` up to a global phase.
pub fn pulse_reference(suite: &CheckSuite) -> CheckOutcome {
    let sys = SpinSystem::default();
    let points = grid_points(suite.grid.min(5));
    let worst: Result<f64> = points
        .par_iter()
        .map(|&(s1, s2, theta, varphi)| -> Result<f64> {
            let c = match CycleParams::new(s1, s2, theta, varphi) {
                Ok(c) => c,
                Err(Error::BetaUndefined(_)) => return Ok(0.0),
                Err(e) => return Err(e),
            };
            let ideal = full_experiment(&c, Mode::Ideal, &sys)?.final_state;
            let pulse = full_experiment(&c, Mode::Pulse, &sys)?.final_state;
            let (a, b) = (ideal.matrix(), pulse.matrix());
            let rho = (0..4)
                .map(|k| {
                    (a[(k, REFERENCE_INDEX)] - b[(k, REFERENCE_INDEX)])
                        .norm()
                        .max((a[(REFERENCE_INDEX, k)] - b[(REFERENCE_INDEX, k)]).norm())
                })
                .fold(0.0, f64::max);
            let u = cycle_body(&cycle_unitaries(&c)?, Mode::Pulse, &sys)?
                .unitary(&sys)
                .ok_or(Error::DecompositionInvalid(0.0))?;
            let phase = u.matrix()[(REFERENCE_INDEX, REFERENCE_INDEX)];
            let unphased =
                crate::evolution::Unitary4::from_matrix(u.matrix() / (phase / phase.norm()));
            Ok(rho.max(unphased.reference_defect()))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)));
    outcome(
        "reference invariance (pulse)",
        matches!(worst, Ok(w) if w < 1e-10),
        match worst {
            Ok(w) => format!("{} points, max defect {w:.2e}", points.len()),
            Err(e) => e.to_string(),
        },
    )
}

/// Compiled controlled-R and controlled-R₂₃ against their targets.
pub fn gate_fidelity(suite: &CheckSuite) -> CheckOutcome {
    let sys = SpinSystem::default();
    let mut rng = ChaCha8Rng::seed_from_u64(suite.seed ^ 0x5a5a);
    let mut worst_r = 1.0f64;
    let mut worst_r23 = 1.0f64;
    for _ in 0..suite.draws {
        let s = rng.gen_range(-PI..PI);
        let u = compile_controlled_r(s, &sys)
            .unitary(&sys)
            .expect("no gradients");
        worst_r = worst_r.min(fidelity_up_to_diagonal(&u, &rot_r(s)));
        let (mix, ph1, ph2) = (
            rng.gen_range(-PI..PI),
            rng.gen_range(-PI..PI),
            rng.gen_range(-PI..PI),
        );
        let f = compile_controlled_r23(mix, ph1, ph2, &sys)
            .map(|seq| {
                fidelity_up_to_diagonal(
                    &seq.unitary(&sys).expect("no gradients"),
                    &rot_r23(mix, ph1, ph2),
                )
            })
            .unwrap_or(0.0);
        worst_r23 = worst_r23.min(f);
    }
    let floor = 1.0 - 1e-8;
    outcome(
        "compiled gate fidelity",
        worst_r >= floor && worst_r23 >= floor,
        format!(
            "{} draws each, min 1-F: R {:.1e}, R23 {:.1e}",
            suite.draws,
            1.0 - worst_r,
            1.0 - worst_r23
        ),
    )
}

/// Gauge and cyclic invariance, reversal and trace equivalence of the
/// Bargmann invariant for random polygons with 3 to 6 vertices.
pub fn bargmann_properties(suite: &CheckSuite) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(suite.seed ^ 0xb0b0);
    let mut gauge = 0.0f64;
    let mut cyclic = 0.0f64;
    let mut reversal = 0.0f64;
    let mut trace = 0.0f64;
    for n in 3..=6 {
        for _ in 0..suite.draws {
            let vs: Vec<StateVec> = (0..n).map(|_| random_state(&mut rng, 3)).collect();
            let Ok(b) = bargmann_invariant(&vs) else {
                continue;
            };
            let phased: Vec<StateVec> = vs
                .iter()
                .map(|v| v.with_phase(rng.gen_range(-PI..PI)))
                .collect();
            gauge = gauge.max((bargmann_invariant(&phased).expect("same rays") - b).norm());
            let mut rotated = vs.clone();
            rotated.rotate_left(rng.gen_range(1..n));
            cyclic = cyclic.max((bargmann_invariant(&rotated).expect("same rays") - b).norm());
            let reversed: Vec<StateVec> = vs.iter().rev().cloned().collect();
            let gp = bargmann_gp(&vs).expect("checked above");
            reversal = reversal.max(circular_distance(
                bargmann_gp(&reversed).expect("same rays"),
                -gp,
            ));
            let rays: Vec<Ray> = vs.iter().map(projector).collect();
            trace = trace.max((bargmann_trace(&rays) - b).norm());
        }
    }
    let worst = gauge.max(cyclic).max(reversal).max(trace);
    outcome(
        "Bargmann properties",
        worst < 1e-12,
        format!(
            "gauge {gauge:.1e}, cyclic {cyclic:.1e}, reversal {reversal:.1e}, trace {trace:.1e}"
        ),
    )
}

/// Sequence preparation yields a diagonal state and a fidelity number;
/// ideal preparation is exact.
pub fn preparation_report() -> CheckOutcome {
    let sys = SpinSystem::default();
    let ideal = prepare_pseudopure(Preparation::Ideal, &sys);
    let equal = prepare_pseudopure(Preparation::Sequence(Polarization::default()), &sys);
    let hetero = prepare_pseudopure(Preparation::Sequence(Polarization::heteronuclear()), &sys);
    let diagonal =
        equal.state.off_diagonal_norm() < 1e-12 && hetero.state.off_diagonal_norm() < 1e-12;
    outcome(
        "preparation report",
        diagonal && ideal.fidelity == 1.0,
        format!(
            "sequence fidelity {:.3} (1:1), {:.3} (4:1), {:.2} ms; ideal exact",
            equal.fidelity,
            hetero.fidelity,
            equal.duration * 1e3
        ),
    )
}

pub fn run_all(suite: &CheckSuite) -> Vec<CheckOutcome> {
    let mut out = grid_checks(suite);
    out.push(random_arcs(suite));
    out.extend(demo_checks());
    out.push(pulse_reference(suite));
    out.push(gate_fidelity(suite));
    out.push(bargmann_properties(suite));
    out.push(preparation_report());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let suite = CheckSuite {
            grid: 3,
            draws: 10,
            ..CheckSuite::default()
        };
        for o in run_all(&suite) {
            assert!(o.passed, "{o}");
        }
    }

    #[test]
    fn grid_has_all_combinations() {
        let g = grid_points(9);
        assert_eq!(g.len(), 729);
        assert_eq!(g[0], (0.0, 0.0, 0.0, 0.0));
        assert_eq!(g[728], (FRAC_PI_2, FRAC_PI_2, FRAC_PI_2, FRAC_PI_2 - 0.01));
    }
}
