//! Parameter sweeps over the cycle and cross-validation of the four routes
//! to its geometric phase: the closed formula, the Bargmann invariant,
//! quadrature of the phase functionals, and the NMR simulation.

pub mod checks;
pub mod config;
pub mod record;

use rayon::prelude::*;

use crate::error::Result;
use crate::nmr::SpinSystem;
use crate::quadrature::QuadratureConfig;

pub use config::{OutputFormat, SweepConfig, SweepVar};
pub use record::{compute_record, emit, read_records, render, SweepRecord};

/// Aggregate statistics of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub records: usize,
    pub flagged: usize,
    /// Largest `max_pairwise_dev` over the sweep (rad).
    pub max_pairwise_dev: f64,
    /// RMS of `beta_sim − beta_formula` (degrees).
    pub rms_sim_deg: f64,
    pub threshold: f64,
}

impl Summary {
    pub fn of(records: &[SweepRecord], threshold: f64) -> Self {
        let max_pairwise_dev = records
            .iter()
            .filter_map(|r| r.max_pairwise_dev)
            .fold(0.0, f64::max);
        let diffs: Vec<f64> = records
            .iter()
            .filter_map(|r| Some(crate::angle::wrap(r.beta_sim? - r.beta_formula?)))
            .collect();
        let rms = if diffs.is_empty() {
            0.0
        } else {
            (diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64).sqrt()
        };
        Self {
            records: records.len(),
            flagged: records.iter().filter(|r| r.flagged()).count(),
            max_pairwise_dev,
            rms_sim_deg: rms.to_degrees(),
            threshold,
        }
    }

    /// No flagged record and every deviation below the threshold.
    pub fn passed(&self) -> bool {
        self.flagged == 0 && self.max_pairwise_dev < self.threshold
    }
}

impl std::fmt::Display for Summary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "records={} flagged={} max_pairwise_dev={:.3e} rad rms(beta_sim-beta_formula)={:.3e} deg threshold={:.1e} {}",
            self.records,
            self.flagged,
            self.max_pairwise_dev,
            self.rms_sim_deg,
            self.threshold,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

/// Evaluates every grid point (in parallel) and returns the records in grid
/// order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    let quad = QuadratureConfig::with_tolerance(cfg.quad_tolerance);
    let sys = SpinSystem::with_coupling(cfg.j)?;
    Ok(cfg
        .grid()
        .par_iter()
        .map(|&x| {
            let (s1, s2) = cfg.point(x);
            compute_record(s1, s2, cfg.theta, cfg.varphi, cfg.mode, &quad, &sys)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nmr::Mode;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn seventeen_point_sweep_agrees() {
        let cfg = SweepConfig::demo()[0].clone();
        let records = run_sweep(&cfg).unwrap();
        assert_eq!(records.len(), 17);
        for r in &records {
            assert!(r.max_pairwise_dev.unwrap() < 1e-8, "{r:?}");
            assert_eq!(r.s2_0, PI / 3.0);
        }
        assert!(records[0].betas().all(|b| b.abs() < 1e-12));
        let summary = Summary::of(&records, cfg.threshold);
        assert!(summary.passed(), "{summary}");
    }

    #[test]
    fn varphi_changes_the_curve() {
        let [a, b] = SweepConfig::demo();
        let ra = run_sweep(&a).unwrap();
        let rb = run_sweep(&b).unwrap();
        let gap = ra
            .iter()
            .zip(&rb)
            .map(|(x, y)| {
                crate::angle::circular_distance(x.beta_formula.unwrap(), y.beta_formula.unwrap())
            })
            .fold(0.0, f64::max);
        assert!(gap > 0.1);
    }

    #[test]
    fn output_is_deterministic() {
        let cfg = SweepConfig {
            mode: Mode::Pulse,
            count: 5,
            ..SweepConfig::demo()[1].clone()
        };
        let a = render(&run_sweep(&cfg).unwrap(), OutputFormat::Json).unwrap();
        let b = render(&run_sweep(&cfg).unwrap(), OutputFormat::Json).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn flagged_records_fail_summary() {
        // θ = φ = 0 with s₂⁰ = π/4 hits an orthogonal closure at s₁⁰ = π/4
        let cfg = SweepConfig {
            theta: 0.0,
            varphi: 0.0,
            fixed: FRAC_PI_4,
            count: 3,
            stop: 0.5 * std::f64::consts::FRAC_PI_2,
            ..SweepConfig::demo()[0].clone()
        };
        let records = run_sweep(&cfg).unwrap();
        let summary = Summary::of(&records, cfg.threshold);
        assert_eq!(summary.flagged, 1);
        assert!(!summary.passed());
    }
}
