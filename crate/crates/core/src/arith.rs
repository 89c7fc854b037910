//! Word-size modular arithmetic: Montgomery multiplication, primality,
//! factoring of small integers, primitive roots and the Kronecker symbol.

use num_prime::nt_funcs::{factorize64, is_prime64};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Deterministic for every `u64`.
pub fn is_prime(n: u64) -> bool {
    is_prime64(n)
}

/// Prime factorisation as `(p, multiplicity)`, ascending in `p`.
pub fn factor(n: u64) -> Vec<(u64, u32)> {
    if n <= 1 {
        return Vec::new();
    }
    let mut v: Vec<(u64, u32)> = factorize64(n).into_iter().map(|(p, k)| (p, k as u32)).collect();
    v.sort_unstable();
    v
}

pub fn is_squarefree(n: u64) -> bool {
    factor(n).iter().all(|&(_, k)| k == 1)
}

pub fn euler_phi(n: u64) -> u64 {
    factor(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Smallest primitive root modulo the prime `p`, given the distinct primes
/// dividing `p - 1`.
pub fn primitive_root_with(p: u64, order_primes: &[u64]) -> u64 {
    if p == 2 {
        return 1;
    }
    (2..p)
        .find(|&g| order_primes.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("a prime has a primitive root")
}

pub fn primitive_root(p: u64) -> u64 {
    let qs: Vec<u64> = factor(p - 1).into_iter().map(|(q, _)| q).collect();
    primitive_root_with(p, &qs)
}

/// Kronecker symbol `(a / n)` for `n > 0`.
pub fn kronecker(a: i64, n: u64) -> i32 {
    if n == 0 {
        return i32::from(a == 1 || a == -1);
    }
    let mut n = n;
    let mut a = a as i128;
    let mut t = 1i32;
    let tz = n.trailing_zeros();
    if tz > 0 {
        if a % 2 == 0 {
            return 0;
        }
        // (a/2) = +1 if a = ±1 mod 8, -1 if a = ±3 mod 8
        if tz % 2 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        n >>= tz;
    }
    // Jacobi symbol (a / n), n odd
    let mut n = n as i128;
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Exponent of 3 in a nonzero integer.
pub fn v3(mut n: u64) -> u32 {
    assert!(n != 0, "v3(0) is infinite");
    let mut k = 0;
    while n % 3 == 0 {
        n /= 3;
        k += 1;
    }
    k
}

pub fn pow3(e: u32) -> u64 {
    3u64.pow(e)
}

/// Montgomery form arithmetic for an odd modulus below 2^63.
#[derive(Clone, Copy, Debug)]
pub struct Montgomery {
    pub modulus: u64,
    inv: u64,
    r2: u64,
}

impl Montgomery {
    pub fn new(modulus: u64) -> Self {
        assert!(modulus % 2 == 1 && modulus < (1 << 63));
        // Newton iteration for -modulus^{-1} mod 2^64
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(modulus.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % modulus as u128) as u64;
        let r2 = mul_mod(r, r, modulus);
        Montgomery {
            modulus,
            inv: inv.wrapping_neg(),
            r2,
        }
    }

    #[inline]
    fn reduce(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.inv);
        let u = ((t + m as u128 * self.modulus as u128) >> 64) as u64;
        if u >= self.modulus {
            u - self.modulus
        } else {
            u
        }
    }

    #[inline]
    pub fn to_mont(&self, a: u64) -> u64 {
        self.reduce(a as u128 * self.r2 as u128)
    }

    #[inline]
    pub fn from_mont(&self, a: u64) -> u64 {
        self.reduce(a as u128)
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 * b as u128)
    }

    #[inline]
    pub fn one(&self) -> u64 {
        self.to_mont(1)
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }
}
