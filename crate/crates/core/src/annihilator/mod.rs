//! Upper bounds for `J + (ω_n)` from images of cyclotomic units at auxiliary
//! primes.

mod accumulate;
mod eta;
mod primes;

use thiserror::Error;

pub use accumulate::{accumulate_ideal, upper_bound, SaturationReport, UpperBound, UpperBoundConfig};
pub use eta::{
    eta_characters, eta_image, group_ring_to_t_basis, AnnihilatorElement, ClassLabels, Orientation,
};
pub use primes::{chi, chi_of_torsion, find_aux_primes, AuxiliaryPrime, PrimeStream};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnnihilatorError {
    #[error("no auxiliary prime 1 mod {modulus} below multiplier {horizon}")]
    HorizonExceeded { modulus: u64, horizon: u64 },
    #[error("exponent {exponent} too small for level {level}")]
    ExponentTooSmall { exponent: u32, level: u32 },
    #[error("exponent schedule exhausted at 3^{exponent} for level {level}")]
    ScheduleExhausted { exponent: u32, level: u32 },
}
