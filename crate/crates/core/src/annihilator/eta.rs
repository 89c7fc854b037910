use serde::{Deserialize, Serialize};

use super::primes::{chi, AuxiliaryPrime};
use crate::arith::{kronecker, pow3, Montgomery};
use crate::iwasawa::{Context, TruncatedPolynomial, Variant};
use crate::quadfield::FundamentalDiscriminant;

/// Which topological generator `γ = 1 + T` is used: the Galois element acting
/// on 3-power roots of unity by `4`, or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    Gamma,
    GammaInv,
}

impl std::fmt::Display for Orientation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Orientation::Gamma => "gamma",
            Orientation::GammaInv => "gamma-inv",
        })
    }
}

/// The cyclotomic conductor `m` of level `n` and, for every `t ∈ (Z/m)^×`,
/// the coset of `Gal(Q(ζ_m)/F_n)` it lies in: the pair
/// `(χ_f(t), j)` with `±t ≡ 4^j (mod 3^{n+1})`.
#[derive(Clone, Debug)]
pub struct ClassLabels {
    pub f: u64,
    pub level: u32,
    pub m: u64,
    pub degree: usize,
    pub variant: Variant,
    kron: Vec<i8>,
    jtab: Vec<i32>,
    three: u64,
}

impl ClassLabels {
    pub fn new(fd: &FundamentalDiscriminant, level: u32) -> Self {
        let f = fd.f;
        let three = pow3(level + 1);
        let m = match fd.residue3 {
            1 => three * f,
            _ => fd.cyclotomic_conductor(level),
        };
        let kron: Vec<i8> = (0..f).map(|t| kronecker(f as i64, t) as i8).collect();
        let mut jtab = vec![-1i32; three as usize];
        let mut x = 1u64;
        let d = pow3(level) as usize;
        for j in 0..d {
            jtab[x as usize] = j as i32;
            jtab[(three - x) as usize] = j as i32;
            x = x * 4 % three;
        }
        ClassLabels {
            f,
            level,
            m,
            degree: d,
            variant: if fd.residue3 == 1 {
                Variant::OmegaPrime
            } else {
                Variant::Omega
            },
            kron,
            jtab,
            three,
        }
    }

    /// `(sign index, j)`; sign index 0 for `χ_f(t) = 1`, 1 for `-1`. `None`
    /// when `gcd(t, m) > 1`.
    pub fn class_of(&self, t: u64) -> Option<(usize, usize)> {
        let k = self.kron[(t % self.f) as usize];
        let j = self.jtab[(t % self.three) as usize];
        if k == 0 || j < 0 {
            return None;
        }
        Some((usize::from(k < 0), j as usize))
    }

    /// `P(s, j) = ∏ (1 - w^t)` over `t` in each class, for a primitive `m`-th
    /// root of unity `w` modulo `r`. Index `s * d + j`.
    pub fn class_products(&self, r: u64, w: u64) -> Vec<u64> {
        let mont = Montgomery::new(r);
        let d = self.degree;
        let one = mont.one();
        let mut acc = vec![one; 2 * d];
        let wm = mont.to_mont(w);
        let mut wt = one;
        let (mut tf, mut t3) = (0u64, 0u64);
        for _ in 1..self.m {
            wt = mont.mul(wt, wm);
            tf += 1;
            if tf == self.f {
                tf = 0;
            }
            t3 += 1;
            if t3 == self.three {
                t3 = 0;
            }
            let k = self.kron[tf as usize];
            let j = self.jtab[t3 as usize];
            if k == 0 || j < 0 {
                continue;
            }
            let idx = usize::from(k < 0) * d + j as usize;
            acc[idx] = mont.mul(acc[idx], mont.sub(one, wt));
        }
        acc.into_iter().map(|x| mont.from_mont(x)).collect()
    }
}

/// `α_r` together with where it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnihilatorElement {
    pub alpha: TruncatedPolynomial,
    pub source_prime: u64,
    pub level: u32,
    pub residue3: u8,
}

/// `chi(u_j)` for `j = 0..3^n`, where `u_j` is the image of `c^j η_n` at the
/// prime above `r` singled out by `ζ_m ↦ g^{(r-1)/m}`.
pub fn eta_characters(labels: &ClassLabels, p: &AuxiliaryPrime) -> Vec<u64> {
    let w = p.root_of_unity(labels.m);
    let prods = labels.class_products(p.r, w);
    let d = labels.degree;
    let q = pow3(p.exponent);
    (0..d)
        .map(|j| (chi(prods[d + j], p) + q - chi(prods[j], p)) % q)
        .collect()
}

/// `Σ_j c_j γ^{∓j}` in `(Z/3^e)[T]/(ω_n)`: since every exponent is below
/// `3^n = deg ω_n`, `(1+T)^k` needs no reduction.
pub fn group_ring_to_t_basis(c: &[u64], e: u32, orientation: Orientation) -> Vec<u64> {
    let d = c.len();
    let q = pow3(e);
    // a_k: coefficient of (1+T)^k
    let mut a = vec![0u64; d];
    for (j, &cj) in c.iter().enumerate() {
        let k = match orientation {
            Orientation::Gamma => (d - j) % d,
            Orientation::GammaInv => j,
        };
        a[k] = (a[k] + cj) % q;
    }
    // Horner in (1+T)
    let mut out = vec![0u64; d];
    for k in (0..d).rev() {
        // out ← out·(1+T) + a_k
        for i in (1..d).rev() {
            out[i] = (out[i] + out[i - 1]) % q;
        }
        out[0] = (out[0] + a[k]) % q;
    }
    out
}

/// The annihilator element attached to one auxiliary prime.
///
/// For `f ≡ 1 (mod 3)` the group-ring element has augmentation `chi(N η_n) = 0`,
/// hence is `T` times an element well defined modulo `ω'_n`; that quotient
/// is returned.
pub fn eta_image(
    labels: &ClassLabels,
    p: &AuxiliaryPrime,
    orientation: Orientation,
) -> AnnihilatorElement {
    let e = p.exponent;
    let c = eta_characters(labels, p);
    let coeffs = group_ring_to_t_basis(&c, e, orientation);
    let ctx = Context::new(e, labels.level, labels.variant);
    let alpha = match labels.variant {
        Variant::Omega => TruncatedPolynomial::from_coords(coeffs, ctx),
        Variant::OmegaPrime => {
            assert_eq!(coeffs[0], 0, "norm of η_n must vanish");
            TruncatedPolynomial::from_wide(coeffs[1..].to_vec(), ctx)
        }
    };
    AnnihilatorElement {
        alpha,
        source_prime: p.r,
        level: labels.level,
        residue3: (labels.f % 3) as u8,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annihilator::primes::PrimeStream;
    use crate::arith::{gcd, inv_mod, mul_mod, pow_mod};
    use crate::quadfield::validate_discriminant;

    /// `u_j = ∏_{a∈H} (1 - w^{abc^j}) / ∏_{a∈H} (1 - w^{ac^j})` computed from
    /// explicit lifts `b` of `σ` and `c` of `γ`.
    fn u_direct(f: u64, n: u32, p: &AuxiliaryPrime) -> Vec<u64> {
        let fd = validate_discriminant(f as i64).unwrap();
        let three = pow3(n + 1);
        let m = if fd.residue3 == 1 { three * f } else { three * fd.fprime };
        let r = p.r;
        let w = p.root_of_unity(m);
        let units: Vec<u64> = (1..m).filter(|&a| gcd(a, m) == 1).collect();
        let chi = |a: u64| kronecker(f as i64, a);
        let h: Vec<u64> = units
            .iter()
            .copied()
            .filter(|&a| chi(a) == 1 && (a % three == 1 || a % three == three - 1))
            .collect();
        let b = *units.iter().find(|&&a| chi(a) == -1 && a % three == 1).unwrap();
        let c = *units.iter().find(|&&a| chi(a) == 1 && a % three == 4 % three).unwrap();
        let d = pow3(n);
        (0..d)
            .map(|j| {
                let cj = pow_mod(c, j, m);
                let mut num = 1u64;
                let mut den = 1u64;
                for &a in &h {
                    let x = mul_mod(mul_mod(a, b, m), cj, m);
                    num = mul_mod(num, (1 + r - pow_mod(w, x, r)) % r, r);
                    let y = mul_mod(a, cj, m);
                    den = mul_mod(den, (1 + r - pow_mod(w, y, r)) % r, r);
                }
                mul_mod(num, inv_mod(den, r).unwrap(), r)
            })
            .collect()
    }

    #[test]
    fn sweep_matches_coset_formula() {
        for (f, n) in [(5u64, 0u32), (5, 1), (12, 1), (13, 1), (229, 1), (24, 2), (40, 1), (61, 2)] {
            let fd = validate_discriminant(f as i64).unwrap();
            let labels = ClassLabels::new(&fd, n);
            let e = n + 2;
            for p in PrimeStream::new(&fd, e, 1 << 30, 0).take(3) {
                let p = p.unwrap();
                let direct = u_direct(f, n, &p);
                let prods = labels.class_products(p.r, p.root_of_unity(labels.m));
                let d = labels.degree;
                for j in 0..d {
                    let u = mul_mod(prods[d + j], inv_mod(prods[j], p.r).unwrap(), p.r);
                    assert_eq!(u, direct[j], "f={f} n={n} j={j}");
                }
            }
        }
    }

    #[test]
    fn norm_compatibility_of_augmentation() {
        // the augmentation of α at level 1 is chi(N η_1) = chi(η_0), computed at level 0
        for f in [5u64, 8, 12, 29, 44, 257] {
            let fd = validate_discriminant(f as i64).unwrap();
            let l1 = ClassLabels::new(&fd, 1);
            let l0 = ClassLabels::new(&fd, 0);
            for p in PrimeStream::new(&fd, 3, 1 << 30, 0).take(4) {
                let p = p.unwrap();
                let c1 = eta_characters(&l1, &p);
                let c0 = eta_characters(&l0, &p);
                let q = pow3(3);
                assert_eq!(c1.iter().sum::<u64>() % q, c0[0], "f={f}");
                let alpha = eta_image(&l1, &p, Orientation::Gamma).alpha;
                assert_eq!(alpha.coeffs()[0], c0[0]);
            }
        }
    }

    #[test]
    fn split_case_norm_vanishes() {
        for f in [13u64, 28, 40, 61, 76, 229] {
            let fd = validate_discriminant(f as i64).unwrap();
            assert_eq!(fd.residue3, 1);
            for n in 1..=2 {
                let labels = ClassLabels::new(&fd, n);
                for p in PrimeStream::new(&fd, n + 2, 1 << 30, 0).take(3) {
                    let c = eta_characters(&labels, &p.unwrap());
                    assert_eq!(c.iter().sum::<u64>() % pow3(n + 2), 0);
                }
            }
        }
    }

    #[test]
    fn t_basis_conversion() {
        // γ^{-1} = (1+T)^2 modulo ω_1
        assert_eq!(group_ring_to_t_basis(&[0, 1, 0], 2, Orientation::Gamma), vec![1, 2, 1]);
        assert_eq!(group_ring_to_t_basis(&[0, 1, 0], 2, Orientation::GammaInv), vec![1, 1, 0]);
        assert_eq!(group_ring_to_t_basis(&[1, 1, 1], 2, Orientation::Gamma), vec![3, 3, 1]);
    }
}
