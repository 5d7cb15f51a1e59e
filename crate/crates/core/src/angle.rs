//! Angle helpers shared by every module.
//!
//! All phases returned by the library are principal values in `(-π, π]`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Reduces an angle to `(-π, π]`.
pub fn wrap(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Reduces an angle to `[0, 2π)`.
pub fn wrap_positive(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    // rem_euclid can return TAU itself for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Shortest-arc distance between two angles, in `[0, π]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    wrap(a - b).abs()
}

/// Parses an angle written either as raw radians (`"0.785"`) or as a multiple
/// of π (`"0.25pi"`, `"-pi"`, `"pi/4"`, `"3pi/8"`).
pub fn parse_angle(text: &str) -> Result<f64> {
    let t = text.trim().to_ascii_lowercase();
    let bad = || Error::Config(format!("cannot parse angle {text:?}"));
    if let Some(pos) = t.find("pi") {
        let (coef, rest) = t.split_at(pos);
        let rest = &rest[2..];
        let coef = match coef.trim() {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
        };
        let denom = match rest.trim() {
            "" => 1.0,
            r => r
                .strip_prefix('/')
                .ok_or_else(bad)?
                .trim()
                .parse::<f64>()
                .map_err(|_| bad())?,
        };
        if denom == 0.0 {
            return Err(bad());
        }
        Ok(coef * PI / denom)
    } else {
        t.parse::<f64>().map_err(|_| bad())
    }
}
