//! Adaptive composite Simpson quadrature and a Richardson-extrapolated
//! central difference, used to evaluate dynamical phases along curves.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Settings for [`integrate`] and [`derivative`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Absolute tolerance on the integral's estimated error.
    pub tolerance: f64,
    /// Upper bound on the number of Simpson panels.
    pub max_panels: usize,
    /// Base step of the central difference.
    pub fd_step: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_panels: 1 << 16,
            fd_step: 1e-5,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self {
            tolerance,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

// uniform panels laid down before adaptivity kicks in
const INITIAL_PANELS: usize = 8;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Integrates `f` over `[a, b]` with adaptive Simpson refinement.
///
/// Each panel is accepted once its two halves agree with the whole to
/// `15 · tol_panel`; the returned error estimate is the sum of the accepted
/// `|Δ|/15` terms. When the panel budget runs out the remaining panels are
/// accepted as-is and the call fails if the total estimate exceeds the
/// tolerance.
pub fn integrate<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(Error::BadDomain(a, b));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error_estimate: 0.0,
            panels: 0,
        });
    }

    let h = (b - a) / INITIAL_PANELS as f64;
    let mut stack: Vec<Panel> = (0..INITIAL_PANELS)
        .rev()
        .map(|k| {
            let pa = a + k as f64 * h;
            let pb = if k + 1 == INITIAL_PANELS { b } else { pa + h };
            let (fa, fm, fb) = (f(pa), f(0.5 * (pa + pb)), f(pb));
            Panel {
                a: pa,
                b: pb,
                fa,
                fm,
                fb,
                whole: simpson(pa, pb, fa, fm, fb),
                tol: cfg.tolerance / INITIAL_PANELS as f64,
            }
        })
        .collect();

    let mut value = 0.0;
    let mut error = 0.0;
    let mut panels = INITIAL_PANELS;

    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let (lm, rm) = (0.5 * (p.a + m), 0.5 * (m + p.b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let delta = left + right - p.whole;

        if delta.abs() <= 15.0 * p.tol || panels >= cfg.max_panels {
            value += left + right + delta / 15.0;
            error += delta.abs() / 15.0;
            continue;
        }
        panels += 1;
        stack.push(Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
            tol: 0.5 * p.tol,
        });
        stack.push(Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
            tol: 0.5 * p.tol,
        });
    }

    if !value.is_finite() || error > cfg.tolerance {
        return Err(Error::QuadratureNotConverged {
            achieved: error,
            tolerance: cfg.tolerance,
        });
    }
    Ok(Integral {
        value,
        error_estimate: error,
        panels,
    })
}

/// Central difference at step `h` and `h/2`, combined by one Richardson
/// level to cancel the `h²` term.
pub fn derivative<F>(f: F, s: f64, cfg: &QuadratureConfig) -> f64
where
    F: Fn(f64) -> f64,
{
    let h = cfg.fd_step;
    let coarse = (f(s + h) - f(s - h)) / (2.0 * h);
    let fine = (f(s + 0.5 * h) - f(s - 0.5 * h)) / h;
    // (4 D(h/2) - D(h)) / 3
    (4.0 * fine - coarse) / 3.0
}

/// [`derivative`] applied componentwise to a complex vector-valued function.
pub fn derivative_vector<F>(f: F, s: f64, cfg: &QuadratureConfig) -> DVector<Complex64>
where
    F: Fn(f64) -> DVector<Complex64>,
{
    let h = cfg.fd_step;
    let coarse = (f(s + h) - f(s - h)).unscale(2.0 * h);
    let fine = (f(s + 0.5 * h) - f(s - 0.5 * h)).unscale(h);
    (fine.scale(4.0) - coarse).unscale(3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn integrates_polynomials_exactly() {
        let cfg = QuadratureConfig::default();
        let r = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, &cfg).unwrap();
        assert!((r.value - 0.0).abs() < 1e-13);
        let r = integrate(|x| x * x, -1.0, 2.0, &cfg).unwrap();
        assert!((r.value - 3.0).abs() < 1e-13);
    }

    #[test]
    fn integrates_trigonometric() {
        let cfg = QuadratureConfig::default();
        let r = integrate(f64::sin, 0.0, PI, &cfg).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10);
        assert!(r.error_estimate <= cfg.tolerance);
        let r = integrate(|x| (10.0 * x).cos().powi(2), 0.0, 1.0, &cfg).unwrap();
        let exact = 0.5 + (20.0f64).sin() / 40.0;
        assert!((r.value - exact).abs() < 1e-10);
    }

    #[test]
    fn degenerate_and_bad_domains() {
        let cfg = QuadratureConfig::default();
        assert_eq!(integrate(|x| x, 1.0, 1.0, &cfg).unwrap().value, 0.0);
        assert!(matches!(
            integrate(|x| x, 2.0, 1.0, &cfg),
            Err(Error::BadDomain(..))
        ));
        assert!(integrate(|x| x, 0.0, f64::INFINITY, &cfg).is_err());
    }

    #[test]
    fn reports_failure_when_budget_exhausted() {
        let cfg = QuadratureConfig {
            tolerance: 1e-14,
            max_panels: 16,
            ..QuadratureConfig::default()
        };
        let err = integrate(|x| (50.0 * x).sin().abs().sqrt(), 0.0, 3.0, &cfg).unwrap_err();
        match err {
            Error::QuadratureNotConverged {
                achieved,
                tolerance,
            } => {
                assert!(achieved > tolerance);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn richardson_derivative() {
        let cfg = QuadratureConfig::default();
        let d = derivative(f64::sin, 0.7, &cfg);
        assert!((d - 0.7f64.cos()).abs() < 1e-9);
        let d = derivative(f64::exp, 1.3, &cfg);
        assert!((d - 1.3f64.exp()).abs() < 1e-8);
        let v = derivative_vector(
            |x| DVector::from_vec(vec![Complex64::from_polar(1.0, 2.0 * x)]),
            0.4,
            &cfg,
        );
        let want = Complex64::new(0.0, 2.0) * Complex64::from_polar(1.0, 0.8);
        assert!((v[0] - want).norm() < 1e-9);
    }
}
