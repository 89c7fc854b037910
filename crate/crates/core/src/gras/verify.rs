use serde::{Deserialize, Serialize};

use super::power::{basis_conditioning, bits_needed, is_power, taylor_shift, PowerCertificate, Verdict};
use super::sheet::{embed_eta, eta_logs_f64};
use crate::annihilator::{ClassLabels, Orientation};
use crate::arith::{pow3, v3};
use crate::iwasawa::TruncatedLambdaIdeal;
use crate::quadfield::FundamentalDiscriminant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrasConfig {
    /// Highest level at which a lower bound is attempted.
    pub level_cap: u32,
    /// Floor for the starting precision.
    pub min_bits: usize,
    pub max_bits: usize,
}

impl Default for GrasConfig {
    fn default() -> Self {
        GrasConfig {
            level_cap: 2,
            min_bits: 128,
            max_bits: 1 << 18,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LowerBound {
    /// `#C_n ≥ 3^log3_order`, and with the upper bound, `C_n = Λ/U`.
    Verified { level: u32, log3_order: u64 },
    /// A generator of `Ann(U)` whose predicted power relation fails.
    Refuted { level: u32, witness: PowerCertificate },
    Inconclusive { level: u32, reason: String },
}

impl LowerBound {
    pub fn is_verified(&self) -> bool {
        matches!(self, LowerBound::Verified { .. })
    }
}

/// The power relations predicted by `U`: for each generator `3^s h` of
/// `Ann(U)`, `η^h` should be a `3^{e-s}`-th power. Returned as exponents of
/// `γ^k η_n` and `v = e - s`.
pub fn predicted_relations(u: &TruncatedLambdaIdeal, orientation: Orientation) -> Vec<(Vec<i64>, u32)> {
    let ctx = u.context();
    let e = ctx.exponent;
    let d = pow3(ctx.level) as usize;
    let mut out = Vec::new();
    for g in u.annihilator().generators() {
        let c = g.coeffs();
        let s = c.iter().filter(|&&x| x != 0).map(|&x| v3(x)).min().unwrap_or(e).min(e);
        if s >= e {
            continue;
        }
        let v = e - s;
        let q = pow3(v) as i128;
        let h: Vec<i64> = c.iter().map(|&x| (x / pow3(s)) as i64).collect();
        let shifted = taylor_shift(&h, d, q);
        let mut t = vec![0i64; d];
        for (k, &ck) in shifted.iter().enumerate() {
            let idx = match orientation {
                Orientation::Gamma => k,
                Orientation::GammaInv => (d - k) % d,
            };
            t[idx] = ck;
        }
        out.push((t, v));
    }
    out
}

/// Lower bound for `#C_n` by certifying the power relations predicted by `U`.
pub fn verify_ideal(
    fd: &FundamentalDiscriminant,
    u: &TruncatedLambdaIdeal,
    orientation: Orientation,
    cfg: &GrasConfig,
) -> LowerBound {
    let n = u.context().level;
    let verified = LowerBound::Verified {
        level: n,
        log3_order: u.log3_index(),
    };
    if u.is_unit() {
        return verified;
    }
    if n > cfg.level_cap {
        return LowerBound::Inconclusive {
            level: n,
            reason: format!("level {n} above cap {}", cfg.level_cap),
        };
    }
    let relations = predicted_relations(u, orientation);
    let logs = eta_logs_f64(&ClassLabels::new(fd, n));
    let cond = basis_conditioning(fd.f, n);
    let mut bits = relations
        .iter()
        .map(|(g, v)| bits_needed(&logs, g, *v, cond))
        .max()
        .unwrap_or(64)
        .max(cfg.min_bits);
    loop {
        if bits > cfg.max_bits {
            return LowerBound::Inconclusive {
                level: n,
                reason: format!("needs {bits} bits, cap {}", cfg.max_bits),
            };
        }
        let sheet = match embed_eta(fd, n, bits) {
            Ok(s) => s,
            Err(e) => {
                return LowerBound::Inconclusive {
                    level: n,
                    reason: e.to_string(),
                }
            }
        };
        let certs: Vec<PowerCertificate> =
            relations.iter().map(|(g, v)| is_power(&sheet, g, *v)).collect();
        if let Some(c) = certs.iter().find(|c| c.verdict == Verdict::CertifiedNo) {
            return LowerBound::Refuted {
                level: n,
                witness: c.clone(),
            };
        }
        if certs.iter().all(|c| c.verdict == Verdict::CertifiedYes) {
            return verified;
        }
        bits *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annihilator::{upper_bound, UpperBoundConfig};
    use crate::gras::{embed_eta, is_power};
    use crate::iwasawa::{Context, Variant};
    use crate::quadfield::validate_discriminant;

    fn fd(f: u64) -> FundamentalDiscriminant {
        validate_discriminant(f as i64).unwrap()
    }

    #[test]
    fn level_zero_cubes() {
        // h(257) = 3: η_0 is a cube; h(8) = 1: it is not
        let sheet = embed_eta(&fd(257), 0, 256).unwrap();
        assert_eq!(is_power(&sheet, &[1], 1).verdict, Verdict::CertifiedYes);
        assert_eq!(is_power(&sheet, &[1], 2).verdict, Verdict::CertifiedNo);
        let sheet = embed_eta(&fd(8), 0, 256).unwrap();
        assert_eq!(is_power(&sheet, &[1], 1).verdict, Verdict::CertifiedNo);
        assert_eq!(is_power(&sheet, &[3], 1).verdict, Verdict::CertifiedYes);
        assert_eq!(is_power(&sheet, &[-6], 1).verdict, Verdict::CertifiedYes);
    }

    #[test]
    fn manifest_cubes_at_level_two() {
        let sheet = embed_eta(&fd(229), 2, 2048).unwrap();
        let g = [3, -6, 0, 3, 9, 0, 0, 3, -3];
        let c = is_power(&sheet, &g, 1);
        assert_eq!(c.verdict, Verdict::CertifiedYes, "{c:?}");
        // cubing the root keeps a YES one level up
        let g3: Vec<i64> = g.iter().map(|x| 3 * x).collect();
        assert_eq!(is_power(&sheet, &g3, 2).verdict, Verdict::CertifiedYes);
    }

    #[test]
    fn golden_small_level() {
        let f = fd(61629);
        let cfg = UpperBoundConfig {
            orientation: Orientation::GammaInv,
            ..Default::default()
        };
        let u = upper_bound(&f, 1, &cfg).unwrap().ideal;
        assert_eq!(u.to_string(), "(T^3, 3)");
        let lb = verify_ideal(&f, &u, Orientation::GammaInv, &GrasConfig::default());
        assert_eq!(lb, LowerBound::Verified { level: 1, log3_order: 3 });
    }

    #[test]
    fn over_shrunk_ideal_is_refuted() {
        let f = fd(61629);
        // the zero ideal predicts that η_1 itself is a 9th power
        let zero = TruncatedLambdaIdeal::zero(Context::new(2, 1, Variant::Omega));
        let lb = verify_ideal(&f, &zero, Orientation::GammaInv, &GrasConfig::default());
        assert!(matches!(lb, LowerBound::Refuted { .. }), "{lb:?}");
        // (T^3, 9) is strictly inside the true (T^3, 3)
        let fake = TruncatedLambdaIdeal::from_int_polys(&[vec![0, 0, 0, 1]], Context::new(2, 1, Variant::Omega));
        let lb = verify_ideal(&f, &fake, Orientation::GammaInv, &GrasConfig::default());
        assert!(matches!(lb, LowerBound::Refuted { .. }), "{lb:?}");
    }

    #[test]
    fn split_case_level_one() {
        for f in [229u64, 316, 469, 1129] {
            let f = fd(f);
            assert_eq!(f.residue3, 1);
            let u = upper_bound(&f, 1, &UpperBoundConfig::default()).unwrap().ideal;
            let lb = verify_ideal(&f, &u, Orientation::Gamma, &GrasConfig::default());
            assert!(lb.is_verified(), "f = {}: {u} {lb:?}", f.f);
        }
    }

    #[test]
    fn precision_doubling_keeps_verdicts() {
        for (f, g, v) in [(257u64, vec![1i64], 1u32), (8, vec![1], 1), (8, vec![2], 2)] {
            let a = is_power(&embed_eta(&fd(f), 0, 256).unwrap(), &g, v).verdict;
            let b = is_power(&embed_eta(&fd(f), 0, 512).unwrap(), &g, v).verdict;
            assert!(a == b || a == Verdict::Inconclusive, "f = {f}");
        }
    }
}
