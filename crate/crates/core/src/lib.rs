//! Computation of the cyclic Iwasawa modules `C(f) = Λ/J` attached to real
//! quadratic fields `Q(√f)` at `p = 3`.

pub mod annihilator;
pub mod arith;
pub mod driver;
pub mod gras;
pub mod iwasawa;
pub mod quadfield;
