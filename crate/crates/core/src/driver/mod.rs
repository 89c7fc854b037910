//! Per-discriminant pipeline, range scans with a resumable journal, summary
//! tables and golden checks.

mod field;
mod golden;
mod journal;
mod tables;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annihilator::Orientation;

pub use field::{compute_field, compute_field_traced, Certification, FieldResult, Outcome, UpperRecord};
pub use field::{LowerRecord, Timings, TraceEvent};
pub use golden::{golden_check, parse_golden, parse_poly, GoldenEntry, GoldenReport, GoldenVerdict};
pub use journal::{read_journal, scan_range, write_header, Journal, ScanSummary};
pub use tables::{aggregate_tables, ClassTable, Tables};

#[derive(Debug, Error)]
pub enum DriverError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("journal line {line}: {msg}")]
    Journal { line: usize, msg: String },
    #[error("resume: journal header does not match the configuration")]
    HeaderMismatch,
    #[error("golden line {line}: {msg}")]
    Golden { line: usize, msg: String },
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowerMode {
    /// Gras verification, falling back to the trivial lower bound.
    Auto,
    Gras,
    /// Only the trivial lower bound `#C_0 ≥ 1`.
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrientationChoice {
    /// `γ^{-1}` first, `γ` if that leaves the field unresolved.
    Auto,
    Gamma,
    GammaInv,
}

impl OrientationChoice {
    pub fn candidates(self) -> &'static [Orientation] {
        match self {
            OrientationChoice::Auto => &[Orientation::GammaInv, Orientation::Gamma],
            OrientationChoice::Gamma => &[Orientation::Gamma],
            OrientationChoice::GammaInv => &[Orientation::GammaInv],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub f_min: u64,
    pub f_max: u64,
    /// Largest level of stabilization searched for; the loop computes upper
    /// bounds one level higher.
    pub level_max: u32,
    pub exp_start: u32,
    pub exp_max: u32,
    pub primes: usize,
    pub window: usize,
    /// Retries with a doubled window after a refuted upper bound.
    pub retries: u32,
    /// Starting precision for the real embeddings; raised as needed.
    pub bits: usize,
    pub max_bits: usize,
    pub lower_level_cap: u32,
    pub jobs: usize,
    pub out: Option<PathBuf>,
    pub resume: bool,
    pub verify_lower: LowerMode,
    pub orientation: OrientationChoice,
    /// Record wall-clock timings (makes journals non-reproducible).
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            f_min: 0,
            f_max: 0,
            level_max: 7,
            exp_start: 2,
            exp_max: 16,
            primes: 64,
            window: 5,
            retries: 4,
            bits: 512,
            max_bits: 1 << 18,
            lower_level_cap: 2,
            jobs: 1,
            out: None,
            resume: false,
            verify_lower: LowerMode::Auto,
            orientation: OrientationChoice::GammaInv,
            timings: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), DriverError> {
        let bad = |m: &str| Err(DriverError::Config(m.to_string()));
        if self.f_min > self.f_max {
            return bad("f_min above f_max");
        }
        if self.level_max == 0 || self.exp_start == 0 || self.exp_max < self.exp_start {
            return bad("level and exponent bounds must be positive and ordered");
        }
        if self.primes == 0 || self.window == 0 || self.bits == 0 || self.jobs == 0 {
            return bad("prime budget, window, bits and jobs must be positive");
        }
        if self.max_bits < self.bits {
            return bad("max_bits below bits");
        }
        Ok(())
    }

    /// The fields that change what a journal contains, for comparing a
    /// resumed run against the header it extends.
    pub fn normalized(&self) -> RunConfig {
        RunConfig {
            jobs: 1,
            out: None,
            resume: false,
            ..self.clone()
        }
    }
}
