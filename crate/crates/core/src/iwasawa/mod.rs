//! Truncations of the Iwasawa algebra `Λ = Z_3[[T]]`.

mod howell;
mod ideal;
mod lemma;
mod poly;

use thiserror::Error;

pub use howell::Lattice;
pub use ideal::{invert_generator, stabilization_check, TruncatedLambdaIdeal};
pub use lemma::{finiteness_lemma, FinitenessWitness};
pub use poly::{format_poly, omega, Context, TruncatedPolynomial, Variant};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IwasawaError {
    #[error("context mismatch: {0:?} vs {1:?}")]
    ContextMismatch(Context, Context),
    #[error("cannot reduce from level {from} up to level {to}")]
    LevelNotLower { from: u32, to: u32 },
    #[error("quotient not finite within level {level}, exponent {exponent}")]
    ContextExhausted { level: u32, exponent: u32 },
}
