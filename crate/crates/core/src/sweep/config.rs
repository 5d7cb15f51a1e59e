use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::path::PathBuf;

use crate::angle::parse_angle;
use crate::error::{Error, Result};
use crate::nmr::Mode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    S1,
    S2,
}

impl SweepVar {
    pub fn key(&self) -> &'static str {
        match self {
            SweepVar::S1 => "s1_0",
            SweepVar::S2 => "s2_0",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!(
                "unknown format {other:?} (expected csv or json)"
            ))),
        }
    }
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// One sweep of `s1_0` or `s2_0` with the other cycle parameters fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub theta: f64,
    pub varphi: f64,
    /// Value of whichever of `s1_0`/`s2_0` is not swept.
    pub fixed: f64,
    pub sweep_var: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub mode: Mode,
    pub quad_tolerance: f64,
    /// Largest acceptable `max_pairwise_dev`.
    pub threshold: f64,
    /// Coupling constant in Hz.
    pub j: f64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

pub const DEFAULT_COUNT: usize = 17;
pub const DEFAULT_THRESHOLD: f64 = 1e-6;

impl SweepConfig {
    /// The two reference sweeps: `θ = π/4`, `s₂⁰ = π/3`, `s₁⁰` over
    /// `[0, π/2]`, with `φ = 0` and `φ = π/4` respectively.
    pub fn demo() -> [SweepConfig; 2] {
        let base = SweepConfig {
            theta: FRAC_PI_4,
            varphi: 0.0,
            fixed: PI / 3.0, // bit-identical to a parsed "pi/3"
            sweep_var: SweepVar::S1,
            start: 0.0,
            stop: FRAC_PI_2,
            count: DEFAULT_COUNT,
            mode: Mode::Ideal,
            quad_tolerance: 1e-10,
            threshold: DEFAULT_THRESHOLD,
            j: 214.5,
            out: None,
            format: OutputFormat::Csv,
        };
        [
            base.clone(),
            SweepConfig {
                varphi: FRAC_PI_4,
                ..base
            },
        ]
    }

    /// Parses flat `key = value` TOML. Angles may be numbers (radians) or
    /// strings such as `"0.25pi"` or `"pi/3"`.
    pub fn parse(text: &str) -> Result<Self> {
        let table: BTreeMap<String, toml::Value> =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut keys = Fields { table };

        let sweep_var = match keys.take_str("sweep")?.as_deref() {
            Some("s1_0") | None => SweepVar::S1,
            Some("s2_0") => SweepVar::S2,
            Some(other) => {
                return Err(Error::Config(format!(
                    "sweep must be s1_0 or s2_0, got {other:?}"
                )))
            }
        };
        let (fixed_key, swept_key) = match sweep_var {
            SweepVar::S1 => ("s2_0", "s1_0"),
            SweepVar::S2 => ("s1_0", "s2_0"),
        };
        if keys.table.contains_key(swept_key) {
            return Err(Error::Config(format!(
                "{swept_key} is swept and must not be given a fixed value"
            )));
        }
        let fixed = keys
            .take_angle(fixed_key)?
            .ok_or_else(|| Error::Config(format!("missing {fixed_key}")))?;

        let cfg = SweepConfig {
            theta: keys
                .take_angle("theta")?
                .ok_or_else(|| Error::Config("missing theta".into()))?,
            varphi: keys
                .take_angle("varphi")?
                .ok_or_else(|| Error::Config("missing varphi".into()))?,
            fixed,
            sweep_var,
            start: keys.take_angle("start")?.unwrap_or(0.0),
            stop: keys.take_angle("stop")?.unwrap_or(FRAC_PI_2),
            count: keys.take_count("count")?.unwrap_or(DEFAULT_COUNT),
            mode: keys
                .take_str("mode")?
                .map(|m| m.parse())
                .transpose()?
                .unwrap_or(Mode::Ideal),
            quad_tolerance: keys.take_number("quad_tolerance")?.unwrap_or(1e-10),
            threshold: keys.take_number("threshold")?.unwrap_or(DEFAULT_THRESHOLD),
            j: keys.take_number("j")?.unwrap_or(214.5),
            out: keys.take_str("out")?.map(PathBuf::from),
            format: keys
                .take_str("format")?
                .map(|f| f.parse())
                .transpose()?
                .unwrap_or(OutputFormat::Csv),
        };
        if let Some(unknown) = keys.table.keys().next() {
            return Err(Error::Config(format!("unknown key {unknown:?}")));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let in_quadrant = |x: f64| (0.0..=FRAC_PI_2).contains(&x);
        if !in_quadrant(self.start) || !in_quadrant(self.stop) {
            return Err(Error::Config(format!(
                "grid [{}, {}] must lie within [0, π/2]",
                self.start, self.stop
            )));
        }
        if !in_quadrant(self.fixed) {
            return Err(Error::Config(format!(
                "fixed value {} outside [0, π/2]",
                self.fixed
            )));
        }
        if !in_quadrant(self.varphi) {
            return Err(Error::Config(format!(
                "varphi {} outside [0, π/2]",
                self.varphi
            )));
        }
        if !self.theta.is_finite() {
            return Err(Error::Config("theta must be finite".into()));
        }
        if self.count < 2 {
            return Err(Error::Config(format!(
                "count must be at least 2, got {}",
                self.count
            )));
        }
        for (name, value) in [
            ("quad_tolerance", self.quad_tolerance),
            ("threshold", self.threshold),
            ("j", self.j),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Config(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// Grid values of the swept parameter; the last point is exactly `stop`.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|k| {
                if k + 1 == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * k as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    /// `(s1_0, s2_0)` at grid value `x`.
    pub fn point(&self, x: f64) -> (f64, f64) {
        match self.sweep_var {
            SweepVar::S1 => (x, self.fixed),
            SweepVar::S2 => (self.fixed, x),
        }
    }
}

struct Fields {
    table: BTreeMap<String, toml::Value>,
}

impl Fields {
    fn take_angle(&mut self, key: &str) -> Result<Option<f64>> {
        match self.table.remove(key) {
            None => Ok(None),
            Some(toml::Value::String(s)) => parse_angle(&s).map(Some),
            Some(v) => number(key, v).map(Some),
        }
    }

    fn take_number(&mut self, key: &str) -> Result<Option<f64>> {
        self.table.remove(key).map(|v| number(key, v)).transpose()
    }

    fn take_count(&mut self, key: &str) -> Result<Option<usize>> {
        match self.table.remove(key) {
            None => Ok(None),
            Some(toml::Value::Integer(i)) if i >= 0 => Ok(Some(i as usize)),
            Some(v) => Err(Error::Config(format!(
                "{key} must be a non-negative integer, got {v}"
            ))),
        }
    }

    fn take_str(&mut self, key: &str) -> Result<Option<String>> {
        match self.table.remove(key) {
            None => Ok(None),
            Some(toml::Value::String(s)) => Ok(Some(s)),
            Some(v) => Err(Error::Config(format!("{key} must be a string, got {v}"))),
        }
    }
}

fn number(key: &str, v: toml::Value) -> Result<f64> {
    match v {
        toml::Value::Float(f) => Ok(f),
        toml::Value::Integer(i) => Ok(i as f64),
        other => Err(Error::Config(format!(
            "{key} must be a number, got {other}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE: &str = r#"
theta = "0.25pi"
varphi = 0
s2_0 = "pi/3"
sweep = "s1_0"
start = 0
stop = "0.5pi"
count = 17
mode = "ideal"
format = "json"
out = "sweep_phi0.json"
"#;

    #[test]
    fn parses_full_config() {
        let cfg = SweepConfig::parse(REFERENCE).unwrap();
        assert_eq!(
            cfg,
            SweepConfig {
                out: Some(PathBuf::from("sweep_phi0.json")),
                format: OutputFormat::Json,
                ..SweepConfig::demo()[0].clone()
            }
        );
    }

    #[test]
    fn defaults_fill_in() {
        let cfg = SweepConfig::parse("theta = 0.7\nvarphi = 0.1\nsweep = \"s2_0\"\ns1_0 = 0.3\n")
            .unwrap();
        assert_eq!(cfg.sweep_var, SweepVar::S2);
        assert_eq!(cfg.count, DEFAULT_COUNT);
        assert_eq!(cfg.point(0.9), (0.3, 0.9));
        assert_eq!(cfg.format, OutputFormat::Csv);
        assert_eq!(cfg.threshold, DEFAULT_THRESHOLD);
    }

    #[test]
    fn grid_ends_exactly_at_stop() {
        let cfg = SweepConfig::demo()[0].clone();
        let g = cfg.grid();
        assert_eq!(g.len(), 17);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[16], FRAC_PI_2);
        assert!((g[8] - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_configs() {
        for bad in [
            "theta = 0\n",
            "varphi = 0\ns2_0 = 1\n",
            "theta = 0\nvarphi = 0\ns2_0 = 1\ncount = 1\n",
            "theta = 0\nvarphi = 0\ns2_0 = 1\nstop = 2\n",
            "theta = 0\nvarphi = 0\ns2_0 = 1\nbogus = 1\n",
            "theta = 0\nvarphi = 0\ns2_0 = 1\ns1_0 = 1\n",
            "theta = 0\nvarphi = 0\ns2_0 = 1\nmode = \"fast\"\n",
            "theta = 0\nvarphi = 0\ns2_0 = 1\nformat = \"xml\"\n",
            "theta = \"half\"\nvarphi = 0\ns2_0 = 1\n",
            "theta = 0\nvarphi = 0\ns2_0 = 1\nsweep = \"theta\"\n",
            "theta = 0\nvarphi = 0\ns2_0 = 1\ncount = -3\n",
            "not toml at all ===",
        ] {
            assert!(
                matches!(SweepConfig::parse(bad), Err(Error::Config(_))),
                "{bad}"
            );
        }
    }
}
