//! The real quadratic field `Q(√f)`: discriminants, class groups via
//! indefinite binary quadratic forms, fundamental units.

mod forms;
mod unit;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{is_squarefree, pow3};

pub use forms::{class_group_3part, ClassGroup, Form};
pub use unit::{fundamental_unit, padic_log3_valuation, QuadraticUnit, QuadraticUnitData};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuadError {
    #[error("{0} is not a fundamental discriminant of a real quadratic field")]
    NotFundamental(i64),
    #[error("3 does not split in Q(sqrt {0})")]
    NotSplit(u64),
    #[error("3-adic precision 3^{0} is insufficient")]
    PrecisionInsufficient(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FundamentalDiscriminant {
    pub f: u64,
    pub residue3: u8,
    pub fprime: u64,
}

impl FundamentalDiscriminant {
    /// `3^{n+1} f'`, the conductor of the level-`n` cyclotomic field containing `F_n`.
    pub fn cyclotomic_conductor(&self, n: u32) -> u64 {
        pow3(n + 1) * self.fprime
    }
}

pub fn is_fundamental(f: i64) -> bool {
    if f <= 1 {
        return false;
    }
    let f = f as u64;
    match f % 4 {
        1 => is_squarefree(f),
        0 => {
            let d = f / 4;
            (d % 4 == 2 || d % 4 == 3) && is_squarefree(d)
        }
        _ => false,
    }
}

pub fn validate_discriminant(f: i64) -> Result<FundamentalDiscriminant, QuadError> {
    if !is_fundamental(f) {
        return Err(QuadError::NotFundamental(f));
    }
    let f = f as u64;
    let residue3 = (f % 3) as u8;
    let fprime = if residue3 == 0 { f / 3 } else { f };
    Ok(FundamentalDiscriminant { f, residue3, fprime })
}

/// Fundamental discriminants in `[lo, hi)`, ascending.
pub fn discriminants_in(lo: u64, hi: u64) -> impl Iterator<Item = FundamentalDiscriminant> {
    (lo.max(2)..hi).filter_map(|f| validate_discriminant(f as i64).ok())
}
