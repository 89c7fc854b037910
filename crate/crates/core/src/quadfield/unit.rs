use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{FundamentalDiscriminant, QuadError};
use crate::arith::{inv_mod, mul_mod, pow3};

/// The unit `(x + y√f)/2` of `Q(√f)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticUnit {
    pub f: u64,
    #[serde(with = "bigint_string")]
    pub x: BigInt,
    #[serde(with = "bigint_string")]
    pub y: BigInt,
    pub norm: i32,
}

mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl QuadraticUnit {
    pub fn one(f: u64) -> Self {
        QuadraticUnit {
            f,
            x: BigInt::from(2),
            y: BigInt::zero(),
            norm: 1,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.f, other.f);
        let f = BigInt::from(self.f);
        let x = (&self.x * &other.x + &f * &self.y * &other.y) / 2;
        let y = (&self.x * &other.y + &other.x * &self.y) / 2;
        QuadraticUnit {
            f: self.f,
            x,
            y,
            norm: self.norm * other.norm,
        }
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut acc = Self::one(self.f);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// `x^2 - f y^2 = ±4` with the recorded sign.
    pub fn satisfies_pell(&self) -> bool {
        let lhs = &self.x * &self.x - BigInt::from(self.f) * &self.y * &self.y;
        lhs == BigInt::from(4 * self.norm)
    }

    /// `log` of the unit under `√f ↦ +√f`, for units larger than 1.
    pub fn log_real(&self) -> f64 {
        let (lx, sx) = log_abs(&self.x);
        let (ly, sy) = log_abs(&self.y);
        let ly = ly + 0.5 * (self.f as f64).ln();
        // log((x + y√f)/2) from log|x| and log|y√f|
        let (hi, lo, same) = if lx >= ly { (lx, ly, sx == sy) } else { (ly, lx, sx == sy) };
        let r = (lo - hi).exp();
        let inner = if same { 1.0 + r } else { 1.0 - r };
        hi + inner.ln() - std::f64::consts::LN_2
    }
}

/// `(log|v|, sign)`, robust for huge integers.
fn log_abs(v: &BigInt) -> (f64, bool) {
    if v.is_zero() {
        return (f64::NEG_INFINITY, true);
    }
    let bits = v.bits();
    let shift = bits.saturating_sub(60);
    let top = (v.abs() >> shift).to_f64().unwrap();
    (top.ln() + shift as f64 * std::f64::consts::LN_2, !v.is_negative())
}

/// The fundamental unit `ε_0 > 1`, as the product of the complete quotients
/// over one period of the continued fraction of `(f mod 2 + √f)/2`.
pub fn fundamental_unit(fd: &FundamentalDiscriminant) -> QuadraticUnit {
    let f = fd.f as i128;
    let root = num_integer::sqrt(fd.f) as i128;
    let floor_quot = |p: i128, q: i128| {
        // ⌊(p + √f)/q⌋ for q of either sign
        if q > 0 {
            Integer::div_floor(&(p + root), &q)
        } else {
            Integer::div_floor(&(p + root + 1), &q)
        }
    };
    let (p0, q0) = ((f % 2), 2i128);
    let a0 = floor_quot(p0, q0);
    let p1 = a0 * q0 - p0;
    let q1 = (f - p1 * p1) / q0;
    let (mut p, mut q) = (p1, q1);
    let bf = BigInt::from(fd.f);
    // running product (x + y√f)/den; partial products need not be integral
    let mut x = BigInt::from(1);
    let mut y = BigInt::zero();
    let mut den = BigInt::from(1);
    let mut steps = 0u64;
    loop {
        let bp = BigInt::from(p);
        let nx = &x * &bp + &y * &bf;
        let ny = &x + &y * &bp;
        den *= BigInt::from(q);
        let g = nx.gcd(&ny).gcd(&den);
        x = nx / &g;
        y = ny / &g;
        den /= g;
        steps += 1;
        let a = floor_quot(p, q);
        let pn = a * q - p;
        let qn = (f - pn * pn) / q;
        p = pn;
        q = qn;
        if p == p1 && q == q1 {
            break;
        }
    }
    if den.is_negative() {
        den = -den;
        x = -x;
        y = -y;
    }
    // normalize to denominator 2
    assert!(den == BigInt::from(1) || den == BigInt::from(2));
    if den == BigInt::from(1) {
        x *= 2;
        y *= 2;
    }
    let norm = if steps % 2 == 0 { 1 } else { -1 };
    let mut u = QuadraticUnit {
        f: fd.f,
        x,
        y,
        norm,
    };
    if u.y.is_negative() {
        u.y = -u.y;
        u.x = -u.x;
    }
    debug_assert!(u.satisfies_pell());
    u
}

/// Data attached to `Q(√f)` at level 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticUnitData {
    pub epsilon0: QuadraticUnit,
    pub h: u64,
    pub h3: u32,
    pub eta0_log3_valuation: Option<u32>,
    pub epsilon0_log3_valuation: Option<u32>,
}

/// A square root of `f` in `Z/3^e`, the one congruent to 1 mod 3.
fn sqrt_mod_3e(f: u64, e: u32) -> u64 {
    let mut s = 1u64;
    let mut modulus = 3u64;
    for _ in 1..e {
        modulus *= 3;
        // s ← s - (s^2 - f)/(2s)
        let fm = f % modulus;
        let diff = (mul_mod(s, s, modulus) + modulus - fm) % modulus;
        let inv = inv_mod(2 * s % modulus, modulus).expect("s is a unit");
        s = (s + modulus - mul_mod(diff, inv, modulus)) % modulus;
    }
    s
}

/// `v_3(log_3 u)` in the completion at the prime above 3 where `√f ≡ 1 (mod 3)`.
///
/// For `f ≡ 1 (mod 3)` the prime 3 splits; the two completions give the same
/// answer for units of norm `±1`. `None` means the logarithm vanishes
/// (`u = ±1`).
pub fn padic_log3_valuation(u: &QuadraticUnit, e: u32) -> Result<Option<u32>, QuadError> {
    if u.f % 3 != 1 {
        return Err(QuadError::NotSplit(u.f));
    }
    if u.y.is_zero() && u.x.abs() == BigInt::from(2) {
        return Ok(None);
    }
    let modulus = pow3(e);
    let s = sqrt_mod_3e(u.f, e);
    let bm = BigInt::from(modulus);
    let red = |v: &BigInt| v.mod_floor(&bm).to_u64().unwrap();
    let half = inv_mod(2, modulus).unwrap();
    let val = mul_mod((red(&u.x) + mul_mod(red(&u.y), s, modulus)) % modulus, half, modulus);
    // log is an isometry on 1 + 3Z_3, and u^2 ≡ 1 mod 3
    let z = (mul_mod(val, val, modulus) + modulus - 1) % modulus;
    if z.is_zero() {
        return Err(QuadError::PrecisionInsufficient(e));
    }
    Ok(Some(crate::arith::v3(z)))
}

impl QuadraticUnitData {
    pub fn compute(fd: &FundamentalDiscriminant, e: u32) -> Self {
        let epsilon0 = fundamental_unit(fd);
        let cg = super::class_group_3part(fd);
        let epsilon0_log3_valuation = if fd.residue3 == 1 {
            padic_log3_valuation(&epsilon0, e).ok().flatten()
        } else {
            None
        };
        QuadraticUnitData {
            epsilon0,
            h: cg.h,
            h3: cg.h3,
            eta0_log3_valuation: None,
            epsilon0_log3_valuation,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::{discriminants_in, validate_discriminant};
    use num_bigint::BigInt;

    fn unit(f: u64) -> QuadraticUnit {
        fundamental_unit(&validate_discriminant(f as i64).unwrap())
    }

    /// Smallest `y ≥ 1` with `f y^2 ± 4` a square; `x` minimal for that `y`.
    fn pell_search(f: u64, limit: u64) -> Option<(u64, u64, i32)> {
        for y in 1..limit {
            for (sign, norm) in [(-4i64, -1), (4, 1)] {
                let t = (f as i128) * (y as i128) * (y as i128) + sign as i128;
                if t <= 0 {
                    continue;
                }
                let x = num_integer::sqrt(t);
                if x * x == t {
                    return Some((x as u64, y, norm));
                }
            }
        }
        None
    }

    #[test]
    fn known_units() {
        let u = unit(5);
        assert_eq!((u.x.clone(), u.y.clone(), u.norm), (BigInt::from(1), BigInt::from(1), -1));
        let u = unit(8);
        assert_eq!((u.x.clone(), u.y.clone()), (BigInt::from(2), BigInt::from(1)));
        let u = unit(229);
        assert_eq!((u.x.clone(), u.y.clone(), u.norm), (BigInt::from(15), BigInt::from(1), -1));
        assert!((unit(5).log_real() - ((1.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn agrees_with_pell_search() {
        let mut checked = 0;
        for fd in discriminants_in(5, 400) {
            let u = fundamental_unit(&fd);
            assert!(u.satisfies_pell());
            if let Some((x, y, norm)) = pell_search(fd.f, 200_000) {
                assert_eq!(u.x, BigInt::from(x), "f = {}", fd.f);
                assert_eq!(u.y, BigInt::from(y), "f = {}", fd.f);
                assert_eq!(u.norm, norm);
                checked += 1;
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn huge_units_stay_exact() {
        for fd in discriminants_in(99_000, 99_200) {
            let u = fundamental_unit(&fd);
            assert!(u.satisfies_pell());
            assert!(u.log_real() > 0.0);
        }
    }

    /// `v_3` of `log(1+z) = Σ (-1)^{k+1} z^k / k`, `1+z = u^2`, summed with
    /// ten guard digits. Valid when the answer is below `e - 4`.
    fn series_valuation(u: &QuadraticUnit, e: u32) -> u32 {
        let guard = 10;
        let big = pow3(e + guard);
        let s = sqrt_mod_3e(u.f, e + guard);
        let bm = BigInt::from(big);
        let red = |v: &BigInt| v.mod_floor(&bm).to_u64().unwrap();
        let val = mul_mod((red(&u.x) + mul_mod(red(&u.y), s, big)) % big, inv_mod(2, big).unwrap(), big);
        let z = (mul_mod(val, val, big) + big - 1) % big;
        let mut total = 0u64;
        let mut zk = 1u64;
        for k in 1..120u64 {
            zk = mul_mod(zk, z, big);
            let v = crate::arith::v3(k);
            let unit_inv = inv_mod(k / 3u64.pow(v), big).unwrap();
            let scaled = (zk as u128 * 3u128.pow(guard) / 3u128.pow(v)) % big as u128;
            let term = mul_mod(scaled as u64, unit_inv, big);
            total = if k % 2 == 1 { (total + term) % big } else { (total + big - term) % big };
        }
        crate::arith::v3(total) - guard
    }

    #[test]
    fn padic_valuation() {
        assert_eq!(padic_log3_valuation(&QuadraticUnit::one(13), 12), Ok(None));
        let u = unit(13);
        let v = padic_log3_valuation(&u, 12).unwrap().unwrap();
        assert!(v >= 1);
        assert_eq!(v, series_valuation(&u, v + 5));
        for fd in discriminants_in(5, 3000).filter(|fd| fd.residue3 == 1) {
            let u = fundamental_unit(&fd);
            let v = padic_log3_valuation(&u, 20).unwrap().unwrap();
            let v3 = padic_log3_valuation(&u.pow(3), 20).unwrap().unwrap();
            assert_eq!(v3, v + 1, "f = {}", fd.f);
            assert_eq!(v, series_valuation(&u, v + 5));
        }
        assert_eq!(padic_log3_valuation(&unit(5), 4), Err(QuadError::NotSplit(5)));
    }
}
