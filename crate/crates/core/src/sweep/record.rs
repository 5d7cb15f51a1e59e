use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::angle::circular_distance;
use crate::error::{Error, Result};
use crate::evolution::{beta_predicted, run_cycle, CycleParams};
use crate::geometry::bargmann_gp;
use crate::nmr::{full_experiment, Mode, SpinSystem};
use crate::quadrature::QuadratureConfig;
use crate::sweep::config::OutputFormat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    /// Two consecutive vertices are orthogonal, so the Bargmann route has
    /// no value; the cycle itself still closes.
    DegeneratePolygon,
    /// The cycle could not be built or run.
    Failed,
}

/// One grid point of a sweep. Field order is the output column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub s1_0: f64,
    pub s2_0: f64,
    pub theta: f64,
    pub varphi: f64,
    pub beta_formula: Option<f64>,
    pub beta_bargmann: Option<f64>,
    pub beta_quadrature: Option<f64>,
    pub beta_sim: Option<f64>,
    /// Pulse mode only; ideal gates take no time.
    pub duration_ms: Option<f64>,
    pub max_pairwise_dev: Option<f64>,
    pub status: Status,
    pub note: String,
}

impl SweepRecord {
    pub fn flagged(&self) -> bool {
        self.status == Status::Failed
    }

    pub fn betas(&self) -> impl Iterator<Item = f64> + '_ {
        [
            self.beta_formula,
            self.beta_bargmann,
            self.beta_quadrature,
            self.beta_sim,
        ]
        .into_iter()
        .flatten()
    }

    /// Same record with every number rounded to 12 significant digits.
    pub fn rounded(&self) -> Self {
        let r = |x: f64| round_sig(x, 12);
        let o = |x: Option<f64>| x.map(r);
        Self {
            s1_0: r(self.s1_0),
            s2_0: r(self.s2_0),
            theta: r(self.theta),
            varphi: r(self.varphi),
            beta_formula: o(self.beta_formula),
            beta_bargmann: o(self.beta_bargmann),
            beta_quadrature: o(self.beta_quadrature),
            beta_sim: o(self.beta_sim),
            duration_ms: o(self.duration_ms),
            max_pairwise_dev: o(self.max_pairwise_dev),
            status: self.status,
            note: self.note.clone(),
        }
    }
}

pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

/// Largest shortest-arc distance between any two of the values.
pub fn max_pairwise_deviation(values: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for (i, &a) in values.iter().enumerate() {
        for &b in &values[i + 1..] {
            worst = worst.max(circular_distance(a, b));
        }
    }
    worst
}

/// Evaluates the four routes to the geometric phase at one parameter point.
pub fn compute_record(
    s1_0: f64,
    s2_0: f64,
    theta: f64,
    varphi: f64,
    mode: Mode,
    quad: &QuadratureConfig,
    sys: &SpinSystem,
) -> SweepRecord {
    let mut record = SweepRecord {
        s1_0,
        s2_0,
        theta,
        varphi,
        beta_formula: None,
        beta_bargmann: None,
        beta_quadrature: None,
        beta_sim: None,
        duration_ms: None,
        max_pairwise_dev: None,
        status: Status::Ok,
        note: String::new(),
    };
    let outcome = (|| -> Result<()> {
        let params = CycleParams::new(s1_0, s2_0, theta, varphi)?;
        record.beta_formula = Some(beta_predicted(&params)?);
        match bargmann_gp(&params.vertices()) {
            Ok(b) => record.beta_bargmann = Some(b),
            Err(e @ Error::DegeneratePolygon { .. }) => {
                record.status = Status::DegeneratePolygon;
                record.note = e.to_string();
            }
            Err(e) => return Err(e),
        }
        record.beta_quadrature = Some(run_cycle(&params, quad)?.geometric);
        let sim = full_experiment(&params, mode, sys)?;
        record.beta_sim = Some(sim.beta);
        if mode == Mode::Pulse {
            record.duration_ms = Some(sim.duration * 1e3);
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        record.status = Status::Failed;
        record.note = e.to_string();
    }
    let betas: Vec<f64> = record.betas().collect();
    if !betas.is_empty() {
        record.max_pairwise_dev = Some(max_pairwise_deviation(&betas));
    }
    record
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Serializes records (rounded to 12 significant digits) to bytes.
pub fn render(records: &[SweepRecord], format: OutputFormat) -> Result<Vec<u8>> {
    if records.is_empty() {
        return Err(Error::Config("no records to emit".into()));
    }
    let rounded: Vec<SweepRecord> = records.iter().map(SweepRecord::rounded).collect();
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rounded {
                w.serialize(r).map_err(|e| Error::Config(e.to_string()))?;
            }
            w.into_inner().map_err(|e| Error::Config(e.to_string()))
        }
        OutputFormat::Json => {
            let mut bytes =
                serde_json::to_vec_pretty(&rounded).map_err(|e| Error::Config(e.to_string()))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

pub fn emit(records: &[SweepRecord], format: OutputFormat, path: &Path) -> Result<()> {
    let bytes = render(records, format)?;
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&bytes).map_err(|e| io_error(path, e))?;
    w.flush().map_err(|e| io_error(path, e))
}

pub fn read_records(path: &Path, format: OutputFormat) -> Result<Vec<SweepRecord>> {
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    match format {
        OutputFormat::Csv => csv::Reader::from_reader(BufReader::new(file))
            .deserialize()
            .collect::<std::result::Result<Vec<SweepRecord>, _>>()
            .map_err(|e| io_error(path, e)),
        OutputFormat::Json => {
            serde_json::from_reader(BufReader::new(file)).map_err(|e| io_error(path, e))
        }
    }
}
