use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::IwasawaError;

/// Which polynomial cuts out the finite layer: `ω_n = (1+T)^{3^n} - 1`, or
/// `ω'_n = ω_n / T` for discriminants `f ≡ 1 (mod 3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Omega,
    OmegaPrime,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Omega => f.write_str("omega"),
            Variant::OmegaPrime => f.write_str("omega-prime"),
        }
    }
}

/// The ring `(Z/3^e)[T]/(ω)` an ideal or polynomial lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Context {
    pub exponent: u32,
    pub level: u32,
    pub variant: Variant,
}

impl Context {
    pub fn new(exponent: u32, level: u32, variant: Variant) -> Self {
        assert!(exponent >= 1, "exponent must be positive");
        Context {
            exponent,
            level,
            variant,
        }
    }

    pub fn modulus(&self) -> u64 {
        3u64.pow(self.exponent)
    }

    pub fn degree(&self) -> usize {
        let d = 3usize.pow(self.level);
        match self.variant {
            Variant::Omega => d,
            Variant::OmegaPrime => d - 1,
        }
    }

    /// Same exponent and variant, another level.
    pub fn at_level(&self, level: u32) -> Self {
        Context { level, ..*self }
    }

    pub fn with_exponent(&self, exponent: u32) -> Self {
        Context { exponent, ..*self }
    }

    /// Coefficients `c_0..c_{d-1}` of the monic modulus, reduced mod `3^e`
    /// (the leading 1 is implicit). Memoized per context.
    pub fn modulus_poly(&self) -> Arc<Vec<u64>> {
        static CACHE: OnceLock<Mutex<HashMap<Context, Arc<Vec<u64>>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(v) = cache.lock().unwrap().get(self) {
            return v.clone();
        }
        let q = BigInt::from(self.modulus());
        let w = omega(self.level, self.variant);
        let low: Arc<Vec<u64>> = Arc::new(
            w[..self.degree()]
                .iter()
                .map(|c| c.mod_floor(&q).to_u64().unwrap())
                .collect(),
        );
        cache.lock().unwrap().insert(*self, low.clone());
        low
    }
}

/// Binomial coefficients `C(n, 0..=n)`.
fn binomial_row(n: u64) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigUint::one();
    row.push(c.clone());
    for i in 0..n {
        c = c * (n - i) / (i + 1);
        row.push(c.clone());
    }
    row
}

/// `ω_n` (or `ω'_n`) as an exact integer polynomial, lowest degree first.
pub fn omega(level: u32, variant: Variant) -> Vec<BigInt> {
    let n = 3u64.pow(level);
    let mut c: Vec<BigInt> = binomial_row(n).into_iter().map(BigInt::from).collect();
    c[0] -= 1;
    match variant {
        Variant::Omega => c,
        Variant::OmegaPrime => {
            debug_assert!(c[0].is_zero());
            c.remove(0);
            c
        }
    }
}

/// An element of `(Z/3^e)[T]/(ω)`, coefficients in `[0, 3^e)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedPolynomial {
    coeffs: Vec<u64>,
    ctx: Context,
}

impl TruncatedPolynomial {
    pub fn zero(ctx: Context) -> Self {
        TruncatedPolynomial {
            coeffs: vec![0; ctx.degree()],
            ctx,
        }
    }

    pub fn one(ctx: Context) -> Self {
        Self::from_i64(&[1], ctx)
    }

    pub fn context(&self) -> Context {
        self.ctx
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Builds from already reduced coordinates.
    pub fn from_coords(coeffs: Vec<u64>, ctx: Context) -> Self {
        assert_eq!(coeffs.len(), ctx.degree());
        let q = ctx.modulus();
        TruncatedPolynomial {
            coeffs: coeffs.into_iter().map(|c| c % q).collect(),
            ctx,
        }
    }

    /// Reduces an arbitrary integer polynomial into the ring.
    pub fn from_bigint(poly: &[BigInt], ctx: Context) -> Self {
        let q = BigInt::from(ctx.modulus());
        let wide: Vec<u64> = poly
            .iter()
            .map(|c| c.mod_floor(&q).to_u64().unwrap())
            .collect();
        Self::from_wide(wide, ctx)
    }

    pub fn from_i64(poly: &[i64], ctx: Context) -> Self {
        let q = ctx.modulus() as i64;
        let wide: Vec<u64> = poly.iter().map(|c| c.rem_euclid(q) as u64).collect();
        Self::from_wide(wide, ctx)
    }

    /// Reduces residues of arbitrary length modulo the ring's monic modulus.
    pub fn from_wide(mut wide: Vec<u64>, ctx: Context) -> Self {
        let d = ctx.degree();
        let q = ctx.modulus();
        if wide.len() > d {
            let m = ctx.modulus_poly();
            reduce_by_monic(&mut wide, &m, q);
        }
        wide.resize(d, 0);
        TruncatedPolynomial { coeffs: wide, ctx }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check(&self, other: &Self) -> Result<(), IwasawaError> {
        if self.ctx != other.ctx {
            return Err(IwasawaError::ContextMismatch(self.ctx, other.ctx));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, IwasawaError> {
        self.check(other)?;
        let q = self.ctx.modulus();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a + b) % q)
            .collect();
        Ok(TruncatedPolynomial {
            coeffs,
            ctx: self.ctx,
        })
    }

    pub fn scale(&self, c: u64) -> Self {
        let q = self.ctx.modulus();
        let c = c % q;
        TruncatedPolynomial {
            coeffs: self
                .coeffs
                .iter()
                .map(|&a| ((a as u128 * c as u128) % q as u128) as u64)
                .collect(),
            ctx: self.ctx,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, IwasawaError> {
        self.check(other)?;
        let q = self.ctx.modulus() as u128;
        let d = self.ctx.degree();
        if d == 0 {
            return Ok(self.clone());
        }
        let mut wide = vec![0u128; 2 * d - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                wide[i + j] = (wide[i + j] + a as u128 * b as u128) % q;
            }
        }
        Ok(Self::from_wide(
            wide.into_iter().map(|x| x as u64).collect(),
            self.ctx,
        ))
    }

    /// Multiplication by `T`.
    pub fn mul_t(&self) -> Self {
        TruncatedPolynomial {
            coeffs: mul_t_coords(&self.coeffs, &self.ctx.modulus_poly(), self.ctx.modulus()),
            ctx: self.ctx,
        }
    }

    /// Coefficients as integers in the symmetric range `(-3^e/2, 3^e/2]`.
    pub fn to_symmetric(&self) -> Vec<i64> {
        let q = self.ctx.modulus() as i64;
        self.coeffs
            .iter()
            .map(|&c| {
                let c = c as i64;
                if c > q / 2 {
                    c - q
                } else {
                    c
                }
            })
            .collect()
    }

    /// Image in the ring at a lower level (reduction modulo `ω_m`, `m ≤ n`).
    pub fn reduce_to_level(&self, level: u32) -> Result<Self, IwasawaError> {
        if level > self.ctx.level {
            return Err(IwasawaError::LevelNotLower {
                from: self.ctx.level,
                to: level,
            });
        }
        Ok(Self::from_wide(self.coeffs.clone(), self.ctx.at_level(level)))
    }
}

/// `T * v` in coordinates, given the non-leading coefficients of the modulus.
pub(crate) fn mul_t_coords(v: &[u64], modulus_low: &[u64], q: u64) -> Vec<u64> {
    let d = v.len();
    if d == 0 {
        return Vec::new();
    }
    let top = v[d - 1];
    let mut out = vec![0u64; d];
    for i in (1..d).rev() {
        out[i] = v[i - 1];
    }
    if top != 0 {
        for i in 0..d {
            let t = ((top as u128 * modulus_low[i] as u128) % q as u128) as u64;
            out[i] = if out[i] >= t { out[i] - t } else { out[i] + q - t };
        }
    }
    out
}

/// In-place remainder of `wide` modulo the monic polynomial with low
/// coefficients `m`; afterwards only the first `m.len()` entries matter.
fn reduce_by_monic(wide: &mut Vec<u64>, m: &[u64], q: u64) {
    let d = m.len();
    for top in (d..wide.len()).rev() {
        let c = wide[top] % q;
        if c == 0 {
            continue;
        }
        wide[top] = 0;
        let shift = top - d;
        for (i, &mi) in m.iter().enumerate() {
            if mi == 0 {
                continue;
            }
            let t = ((c as u128 * mi as u128) % q as u128) as u64;
            let x = wide[shift + i] % q;
            wide[shift + i] = if x >= t { x - t } else { x + q - t };
        }
    }
    wide.truncate(d);
}

/// Formats an integer polynomial as `T^3+3T-9`.
pub fn format_poly(coeffs: &[BigInt]) -> String {
    let mut out = String::new();
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push(if neg { '-' } else { '+' });
        }
        let show_coeff = i == 0 || !a.is_one();
        if show_coeff {
            out.push_str(&a.to_string());
        }
        match i {
            0 => {}
            1 => out.push('T'),
            _ => {
                out.push_str("T^");
                out.push_str(&i.to_string());
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
