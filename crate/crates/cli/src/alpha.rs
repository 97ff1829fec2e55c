//! α values from command-line decimals.

use anyon_core::anyon_model::AnyonParams;
use clap::Args;
use serde::Serialize;

use crate::CliError;

pub const GRID_START: &str = "2.001";
pub const GRID_END: &str = "2.999";
pub const GRID_STEP: &str = "0.001";

/// A single α, either on the 1/1000 grid or free.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Alpha {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub milli: Option<u32>,
}

impl Alpha {
    pub fn from_milli(k: u32) -> Self {
        Alpha {
            value: f64::from(k) / 1000.0,
            milli: Some(k),
        }
    }

    pub fn params(&self) -> Result<AnyonParams, CliError> {
        let p = match self.milli {
            Some(k) => AnyonParams::from_milli(k),
            None => AnyonParams::new(self.value),
        };
        p.map_err(|e| CliError::Usage(e.to_string()))
    }
}

fn parse_decimal(flag: &str, s: &str) -> Result<f64, CliError> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("{flag}: '{s}' is not a number")))?;
    if !x.is_finite() {
        return Err(CliError::Usage(format!("{flag}: '{s}' is not finite")));
    }
    Ok(x)
}

fn as_milli(x: f64) -> Option<u32> {
    let m = (x * 1000.0).round();
    ((x * 1000.0 - m).abs() < 1e-6 && m >= 0.0).then_some(m as u32)
}

fn point(x: f64, snap: bool) -> Alpha {
    match as_milli(x) {
        Some(k) => Alpha::from_milli(k),
        None if snap => Alpha::from_milli((x * 1000.0).round().max(0.0) as u32),
        None => Alpha {
            value: x,
            milli: None,
        },
    }
}

#[derive(Args, Debug, Clone, Default, Serialize)]
pub struct AlphaArgs {
    /// Single α value
    #[arg(long, conflicts_with_all = ["alpha_start", "alpha_end", "alpha_step"])]
    pub alpha: Option<String>,
    /// First α of a range
    #[arg(long)]
    pub alpha_start: Option<String>,
    /// Last α of a range (inclusive)
    #[arg(long)]
    pub alpha_end: Option<String>,
    /// Range increment
    #[arg(long)]
    pub alpha_step: Option<String>,
    /// Snap every α to the nearest multiple of 0.001
    #[arg(long)]
    pub grid: bool,
}

impl AlphaArgs {
    fn is_range(&self) -> bool {
        self.alpha_start.is_some() || self.alpha_end.is_some() || self.alpha_step.is_some()
    }

    /// All requested α values; with no flags, the full 2.001..2.999 grid.
    pub fn resolve(&self) -> Result<Vec<Alpha>, CliError> {
        if let Some(a) = &self.alpha {
            return Ok(vec![point(parse_decimal("--alpha", a)?, self.grid)]);
        }
        let start = parse_decimal(
            "--alpha-start",
            self.alpha_start.as_deref().unwrap_or(GRID_START),
        )?;
        let end = parse_decimal("--alpha-end", self.alpha_end.as_deref().unwrap_or(GRID_END))?;
        let step = parse_decimal(
            "--alpha-step",
            self.alpha_step.as_deref().unwrap_or(GRID_STEP),
        )?;
        if step <= 0.0 {
            return Err(CliError::Usage("--alpha-step must be positive".into()));
        }
        if end < start {
            return Err(CliError::Usage("--alpha-end is below --alpha-start".into()));
        }
        let out = match (as_milli(start), as_milli(end), as_milli(step)) {
            (Some(s), Some(e), Some(d)) if d > 0 => (s..=e)
                .step_by(d as usize)
                .map(Alpha::from_milli)
                .collect(),
            _ => {
                let n = ((end - start) / step + 1e-9).floor() as usize;
                (0..=n)
                    .map(|k| point(start + k as f64 * step, self.grid))
                    .collect()
            }
        };
        Ok(out)
    }

    /// Exactly one α: `--alpha`, or a range that contains one point.
    pub fn single(&self) -> Result<Alpha, CliError> {
        if self.alpha.is_none() && !self.is_range() {
            return Err(CliError::Usage("--alpha is required".into()));
        }
        let v = self.resolve()?;
        match v.as_slice() {
            [a] => Ok(*a),
            _ => Err(CliError::Usage("expected a single α value".into())),
        }
    }
}
