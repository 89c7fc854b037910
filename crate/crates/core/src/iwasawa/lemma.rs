use serde::{Deserialize, Serialize};

/// Orders `3^a` of `M/ω_m M` (a lower bound) and `3^b` of `M/ω_n M` (an
/// upper bound) for a finitely generated torsion `Λ`-module `M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinitenessWitness {
    pub m: u32,
    pub n: u32,
    pub a: u32,
    pub b: u32,
}

impl FinitenessWitness {
    pub fn new(m: u32, n: u32, a: u32, b: u32) -> Option<Self> {
        (n >= m && b >= a).then_some(FinitenessWitness { m, n, a, b })
    }
}

/// `b - a < n - m`, which forces `ω_n M = 0`: the chain
/// `ω_m M ⊇ ω_{m+1} M ⊇ … ⊇ ω_n M` has fewer than `n - m` strict steps, so two
/// consecutive terms agree, and Nakayama kills the smaller one.
pub fn finiteness_lemma(w: &FinitenessWitness) -> bool {
    (w.b - w.a) < (w.n - w.m)
}
