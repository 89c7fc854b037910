use serde::{Deserialize, Serialize};

use super::AnnihilatorError;
use crate::arith::{factor, is_prime, pow3, pow_mod, primitive_root_with};
use crate::quadfield::FundamentalDiscriminant;

/// A prime `r ≡ 1 (mod 3^e f')` with the data needed to read `3^e`-th power
/// residue symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxiliaryPrime {
    pub r: u64,
    pub modulus: u64,
    pub exponent: u32,
    pub g: u64,
    pub chi_base: u64,
}

impl AuxiliaryPrime {
    pub fn new(r: u64, exponent: u32, modulus: u64) -> Self {
        let qs: Vec<u64> = factor(r - 1).into_iter().map(|(q, _)| q).collect();
        let g = primitive_root_with(r, &qs);
        Self::with_root(r, exponent, modulus, g)
    }

    /// Same prime with a different primitive root.
    pub fn with_root(r: u64, exponent: u32, modulus: u64, g: u64) -> Self {
        assert_eq!((r - 1) % modulus, 0);
        let chi_base = pow_mod(g, (r - 1) / pow3(exponent), r);
        AuxiliaryPrime {
            r,
            modulus,
            exponent,
            g,
            chi_base,
        }
    }

    /// A primitive `m`-th root of unity, `g^{(r-1)/m}`.
    pub fn root_of_unity(&self, m: u64) -> u64 {
        assert_eq!((self.r - 1) % m, 0, "{m} does not divide r - 1");
        pow_mod(self.g, (self.r - 1) / m, self.r)
    }
}

/// Ascending primes `r ≡ 1 (mod 3^e f')`, starting above `after`.
pub struct PrimeStream {
    modulus: u64,
    exponent: u32,
    k: u64,
    k_max: u64,
}

impl PrimeStream {
    pub fn new(fd: &FundamentalDiscriminant, e: u32, horizon: u64, after: u64) -> Self {
        let modulus = pow3(e) * fd.fprime;
        PrimeStream {
            modulus,
            exponent: e,
            k: after / modulus + 1,
            k_max: horizon,
        }
    }
}

impl Iterator for PrimeStream {
    type Item = Result<AuxiliaryPrime, AnnihilatorError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.k > self.k_max {
                return Some(Err(AnnihilatorError::HorizonExceeded {
                    modulus: self.modulus,
                    horizon: self.k_max,
                }));
            }
            let r = match self.k.checked_mul(self.modulus).and_then(|x| x.checked_add(1)) {
                Some(r) if r < 1 << 62 => r,
                _ => {
                    return Some(Err(AnnihilatorError::HorizonExceeded {
                        modulus: self.modulus,
                        horizon: self.k,
                    }))
                }
            };
            self.k += 1;
            if is_prime(r) {
                return Some(Ok(AuxiliaryPrime::new(r, self.exponent, self.modulus)));
            }
        }
    }
}

/// The first `count` primes `r ≡ 1 (mod 3^e f')`.
pub fn find_aux_primes(
    fd: &FundamentalDiscriminant,
    e: u32,
    n: u32,
    count: usize,
    horizon: u64,
) -> Result<Vec<AuxiliaryPrime>, AnnihilatorError> {
    if e < n + 1 {
        return Err(AnnihilatorError::ExponentTooSmall { exponent: e, level: n });
    }
    PrimeStream::new(fd, e, horizon, 0).take(count).collect()
}

/// `chi(x)`: the exponent `k ∈ Z/3^e` with `x^{(r-1)/3^e} = chi_base^k`,
/// found one ternary digit at a time.
pub fn chi(x: u64, p: &AuxiliaryPrime) -> u64 {
    let r = p.r;
    let e = p.exponent;
    let h = pow_mod(x % r, (r - 1) / pow3(e), r);
    chi_of_torsion(h, p)
}

/// Discrete log base `chi_base` of an element of the `3^e`-torsion.
pub fn chi_of_torsion(h: u64, p: &AuxiliaryPrime) -> u64 {
    let r = p.r;
    let e = p.exponent;
    let zeta = pow_mod(p.chi_base, pow3(e - 1), r);
    let zeta2 = crate::arith::mul_mod(zeta, zeta, r);
    let inv_base = pow_mod(p.chi_base, pow3(e) - 1, r);
    let mut k = 0u64;
    // cur = h * chi_base^{-k}
    let mut cur = h;
    for i in 0..e {
        let probe = pow_mod(cur, pow3(e - 1 - i), r);
        let digit = if probe == 1 {
            0
        } else if probe == zeta {
            1
        } else {
            assert_eq!(probe, zeta2, "not in the 3^e-torsion");
            2
        };
        if digit > 0 {
            k += digit * pow3(i);
            cur = crate::arith::mul_mod(cur, pow_mod(inv_base, digit * pow3(i), r), r);
        }
    }
    debug_assert_eq!(cur, 1);
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::mul_mod;
    use crate::quadfield::validate_discriminant;
    use proptest::prelude::*;

    fn fd(f: i64) -> FundamentalDiscriminant {
        validate_discriminant(f).unwrap()
    }

    #[test]
    fn first_primes() {
        let p = find_aux_primes(&fd(5), 2, 1, 3, 1 << 20).unwrap();
        assert_eq!(p[0].r, 181);
        // oracle: sieve 45k + 1
        let sieve: Vec<u64> = (1..100u64)
            .map(|k| 45 * k + 1)
            .filter(|&r| (2..r).take_while(|d| d * d <= r).all(|d| r % d != 0))
            .take(3)
            .collect();
        assert_eq!(p.iter().map(|p| p.r).collect::<Vec<_>>(), sieve);
        assert_eq!(find_aux_primes(&fd(12), 2, 1, 1, 1 << 20).unwrap()[0].r, 37);
        for q in find_aux_primes(&fd(229), 3, 2, 10, 1 << 20).unwrap() {
            assert_eq!(q.r % (27 * 229), 1);
        }
        assert!(find_aux_primes(&fd(5), 1, 1, 1, 1 << 20).is_err());
        assert!(matches!(
            find_aux_primes(&fd(5), 2, 1, 100, 10),
            Err(AnnihilatorError::HorizonExceeded { .. })
        ));
    }

    #[test]
    fn chi_basics() {
        let p = AuxiliaryPrime::new(181, 2, 45);
        assert_eq!(chi(1, &p), 0);
        assert_eq!(chi(p.g, &p) % 3 != 0, true);
        assert_eq!(chi(p.g, &p), 1);
        for y in 2..50u64 {
            assert_eq!(chi(pow_mod(y, 9, 181), &p), 0);
        }
        assert_eq!(chi(180, &p), 0);
    }

    proptest! {
        #[test]
        fn chi_is_a_homomorphism(k in 1u64..2000, x in 1u64..1_000_000, y in 1u64..1_000_000) {
            let fd = fd(229);
            let p = PrimeStream::new(&fd, 4, 1 << 30, 0).nth((k % 20) as usize).unwrap().unwrap();
            let (x, y) = (x % (p.r - 1) + 1, y % (p.r - 1) + 1);
            let q = pow3(4);
            prop_assert_eq!(chi(mul_mod(x, y, p.r), &p), (chi(x, &p) + chi(y, &p)) % q);
            // surjective: the primitive root maps to a unit
            prop_assert!(chi(p.g, &p) % 3 != 0);
        }
    }
}
