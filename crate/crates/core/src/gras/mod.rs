//! Lower bounds for `C_n`: certify that cyclotomic units predicted to be
//! `3^v`-th powers really are, from high-precision real embeddings.

mod float;
mod power;
mod sheet;
mod verify;

use thiserror::Error;

pub use power::{is_power, PowerCertificate, Verdict, DENOMINATOR_LOG3_BOUND, SAFETY_BITS};
pub use sheet::{embed_eta, eta_logs_f64, RealEmbeddingSheet};
pub use verify::{predicted_relations, verify_ideal, GrasConfig, LowerBound};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrasError {
    #[error("precision of {0} bits is too low")]
    PrecisionTooLow(usize),
}
