use astro_float::{BigFloat, Consts, RoundingMode, Sign, Word};
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

pub(crate) const RM: RoundingMode = RoundingMode::ToEven;

/// Working precision plus the constants cache astro-float wants threaded
/// through transcendental calls.
pub(crate) struct Fp {
    pub p: usize,
    pub cc: Consts,
}

impl Fp {
    pub fn new(p: usize) -> Self {
        Fp {
            p,
            cc: Consts::new().expect("constants cache"),
        }
    }

    pub fn int(&self, x: i64) -> BigFloat {
        BigFloat::from_i64(x, self.p)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.p, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.p, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.p, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.p, RM)
    }

    pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(self.p, RM, &mut self.cc)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.p, RM, &mut self.cc)
    }

    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.p, RM)
    }

    pub fn sin_cos(&mut self, a: &BigFloat) -> (BigFloat, BigFloat) {
        (a.sin(self.p, RM, &mut self.cc), a.cos(self.p, RM, &mut self.cc))
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.p, RM)
    }
}

pub(crate) fn from_bigint(x: &BigInt, p: usize) -> BigFloat {
    if x.is_zero() {
        return BigFloat::from_word(0, p);
    }
    let digits: Vec<Word> = x.magnitude().to_u64_digits();
    let sign = if x.sign() == num_bigint::Sign::Minus {
        Sign::Neg
    } else {
        Sign::Pos
    };
    let mut out = BigFloat::from_words(&digits, sign, (64 * digits.len()) as i32);
    out.set_precision(p.max(64 * digits.len()), RM)
        .expect("precision");
    out
}

/// Nearest integer.
pub(crate) fn round_to_bigint(x: &BigFloat) -> BigInt {
    let r = x.round(0, RM);
    if r.is_zero() {
        return BigInt::zero();
    }
    let (words, _, sign, e, _) = r.as_raw_parts().expect("finite value");
    let mag = BigUint::from_slice(
        &words
            .iter()
            .flat_map(|w| [*w as u32, (*w >> 32) as u32])
            .collect::<Vec<_>>(),
    );
    let shift = 64 * words.len() as i64 - e as i64;
    let mag = if shift >= 0 {
        mag >> shift as usize
    } else {
        mag << (-shift) as usize
    };
    let v = BigInt::from(mag);
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

/// `log_2 |x|`, or `-inf` at zero. Accurate to f64 precision.
pub(crate) fn log2_abs(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (words, _, _, e, _) = x.as_raw_parts().expect("finite value");
    let top = *words.last().unwrap() as f64 / 2f64.powi(64);
    top.log2() + e as f64
}

pub(crate) fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let l = log2_abs(x);
    let v = l.exp2();
    if x.is_negative() {
        -v
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_round_trips() {
        for s in ["0", "3", "-7", "123456789012345678901234567890", "-18446744073709551616"] {
            let x: BigInt = s.parse().unwrap();
            let f = from_bigint(&x, 256);
            assert_eq!(round_to_bigint(&f), x, "{s}");
        }
        let fp = Fp::new(128);
        let x = fp.div(&fp.int(7), &fp.int(2));
        assert_eq!(round_to_bigint(&x), BigInt::from(4));
        assert!((to_f64(&fp.int(-5)) + 5.0).abs() < 1e-12);
        assert!((log2_abs(&fp.int(1024)) - 10.0).abs() < 1e-12);
    }
}
