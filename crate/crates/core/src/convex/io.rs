//! Text formats for support profiles.
//!
//! CSV: optional `# key=value` comment lines, a `psi,S` header, then one row
//! per cell. JSON: `{schema_version, axis, N, t, alpha, values}`. Floats are
//! written with 17 significant digits so both formats round-trip exactly.

use serde::{Deserialize, Serialize};

use super::profile::{Axis, SupportProfile};
use crate::error::{GcfError, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Profile plus the run context it was taken from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub schema_version: u32,
    pub axis: Axis,
    #[serde(rename = "N")]
    pub n: usize,
    pub t: Option<f64>,
    pub alpha: Option<f64>,
    pub values: Vec<f64>,
}

impl ProfileRecord {
    pub fn new(profile: &SupportProfile, t: Option<f64>, alpha: Option<f64>) -> Self {
        ProfileRecord {
            schema_version: SCHEMA_VERSION,
            axis: profile.axis(),
            n: profile.len(),
            t,
            alpha,
            values: profile.values().to_vec(),
        }
    }

    pub fn profile(&self) -> Result<SupportProfile> {
        if self.values.len() != self.n {
            return Err(GcfError::Parse(format!("N = {} but {} values", self.n, self.values.len())));
        }
        SupportProfile::new(self.axis, self.values.clone())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile record serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| GcfError::Parse(e.to_string()))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# schema_version={}\n", self.schema_version));
        out.push_str(&format!("# axis={}\n", self.axis.as_str()));
        if let Some(t) = self.t {
            out.push_str(&format!("# t={}\n", fmt_f64(t)));
        }
        if let Some(a) = self.alpha {
            out.push_str(&format!("# alpha={}\n", fmt_f64(a)));
        }
        out.push_str("psi,S\n");
        let n = self.values.len();
        for (k, v) in self.values.iter().enumerate() {
            let psi = super::profile::cell_angle(k, n);
            out.push_str(&format!("{},{}\n", fmt_f64(psi), fmt_f64(*v)));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut axis = Axis::E1;
        let mut t = None;
        let mut alpha = None;
        let mut values = Vec::new();
        let mut header_seen = false;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                if let Some((key, value)) = meta.trim().split_once('=') {
                    match key.trim() {
                        "axis" => axis = value.parse()?,
                        "t" => t = Some(parse_f64(value, lineno)?),
                        "alpha" => alpha = Some(parse_f64(value, lineno)?),
                        _ => {}
                    }
                }
                continue;
            }
            if !header_seen {
                if line != "psi,S" {
                    return Err(GcfError::Parse(format!("line {}: expected header psi,S", lineno + 1)));
                }
                header_seen = true;
                continue;
            }
            let (_, s) = line
                .split_once(',')
                .ok_or_else(|| GcfError::Parse(format!("line {}: expected two columns", lineno + 1)))?;
            values.push(parse_f64(s, lineno)?);
        }
        Ok(ProfileRecord { schema_version: SCHEMA_VERSION, axis, n: values.len(), t, alpha, values })
    }
}

pub(crate) fn parse_f64(s: &str, lineno: usize) -> Result<f64> {
    s.trim().parse().map_err(|_| GcfError::Parse(format!("line {}: bad number {:?}", lineno + 1, s.trim())))
}
