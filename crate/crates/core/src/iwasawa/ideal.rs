use std::fmt;

use num_bigint::BigInt;

use super::howell::Lattice;
use super::poly::{format_poly, omega, Context, TruncatedPolynomial, Variant};
use super::IwasawaError;
use crate::arith::inv_mod;

/// One element of a strong basis: leading term `3^s T^deg`, stored densely
/// (lowest degree first, leading coefficient exactly `3^s`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Gen {
    s: u32,
    coeffs: Vec<u64>,
}

impl Gen {
    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// An ideal of `(Z/3^e)[T]/(ω)`, i.e. the image of an ideal of `Λ`
/// containing `3^e` and `ω`.
///
/// Stored as the reduced strong Gröbner basis of the corresponding ideal of
/// `(Z/3^e)[T]`: elements `3^{s_0} h_0, 3^{s_1} h_1, …` with `h_j` monic,
/// `0 = s_0 < s_1 < …` and strictly decreasing degrees, every lower
/// coefficient reduced into `[0, 3^{k_i})` where `3^{k_i}` is the pivot at
/// that degree. This carries the same data as the Howell form of the ideal
/// viewed as a lattice, and two ideals are equal iff their bases are.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedLambdaIdeal {
    ctx: Context,
    basis: Vec<Gen>,
}

/// `3`-adic valuation and unit part of a nonzero residue.
fn split3(x: u64) -> (u32, u64) {
    let mut v = 0;
    let mut u = x;
    while u % 3 == 0 {
        u /= 3;
        v += 1;
    }
    (v, u)
}

fn top(p: &[u64]) -> Option<usize> {
    p.iter().rposition(|&c| c != 0)
}

/// `p -= c * T^shift * g` modulo `q`.
fn sub_shifted(p: &mut Vec<u64>, c: u64, shift: usize, g: &[u64], q: u64) {
    if c == 0 {
        return;
    }
    if p.len() < g.len() + shift {
        p.resize(g.len() + shift, 0);
    }
    for (i, &gi) in g.iter().enumerate() {
        if gi != 0 {
            let t = ((c as u128 * gi as u128) % q as u128) as u64;
            let x = &mut p[i + shift];
            *x = if *x >= t { *x - t } else { *x + q - t };
        }
    }
}

fn scale(p: &[u64], c: u64, q: u64) -> Vec<u64> {
    p.iter()
        .map(|&a| ((a as u128 * c as u128) % q as u128) as u64)
        .collect()
}

/// Index of the basis element reducing degree `i`: the one of largest degree
/// not exceeding `i`, which is also the one with the smallest `s`.
fn reducer_in(leads: &[(u32, usize)], i: usize) -> Option<usize> {
    leads.iter().position(|&(_, d)| d <= i)
}

impl TruncatedLambdaIdeal {
    /// The zero ideal of the ring, i.e. `(3^e, ω)` in `Λ`.
    pub fn zero(ctx: Context) -> Self {
        let mut m = ctx.modulus_poly().as_ref().clone();
        m.push(1);
        TruncatedLambdaIdeal {
            ctx,
            basis: vec![Gen { s: 0, coeffs: m }],
        }
    }

    pub fn unit(ctx: Context) -> Self {
        TruncatedLambdaIdeal {
            ctx,
            basis: vec![Gen {
                s: 0,
                coeffs: vec![1],
            }],
        }
    }

    /// Canonical form of the ideal generated by `gens` (together with `3^e`
    /// and `ω`).
    pub fn from_generators(
        gens: &[TruncatedPolynomial],
        ctx: Context,
    ) -> Result<Self, IwasawaError> {
        let mut ideal = Self::zero(ctx);
        for g in gens {
            if g.context() != ctx {
                return Err(IwasawaError::ContextMismatch(ctx, g.context()));
            }
            ideal.insert_raw(g.coeffs().to_vec());
        }
        ideal.finish();
        Ok(ideal)
    }

    /// Generators given as integer polynomials of any degree.
    pub fn from_int_polys(gens: &[Vec<i64>], ctx: Context) -> Self {
        let q = ctx.modulus() as i64;
        let mut ideal = Self::zero(ctx);
        for g in gens {
            ideal.insert_raw(g.iter().map(|c| c.rem_euclid(q) as u64).collect());
        }
        ideal.finish();
        ideal
    }

    pub fn from_bigint_polys(gens: &[Vec<BigInt>], ctx: Context) -> Self {
        let gens: Vec<TruncatedPolynomial> = gens
            .iter()
            .map(|g| TruncatedPolynomial::from_bigint(g, ctx))
            .collect();
        Self::from_generators(&gens, ctx).expect("same context")
    }

    /// Adds `g` to the ideal. Returns whether the ideal grew.
    pub fn absorb(&mut self, g: &TruncatedPolynomial) -> Result<bool, IwasawaError> {
        if g.context() != self.ctx {
            return Err(IwasawaError::ContextMismatch(self.ctx, g.context()));
        }
        let grew = self.insert_raw(g.coeffs().to_vec());
        if grew {
            self.finish();
        }
        Ok(grew)
    }

    pub fn context(&self) -> Context {
        self.ctx
    }

    fn q(&self) -> u64 {
        self.ctx.modulus()
    }

    fn leads(&self) -> Vec<(u32, usize)> {
        self.basis.iter().map(|g| (g.s, g.degree())).collect()
    }

    fn reducer(&self, i: usize) -> Option<usize> {
        self.basis.iter().position(|g| g.degree() <= i)
    }

    /// Top-reduction: a nonzero remainder whose leading term is not divisible
    /// by any basis leading term, or `None` if `p` reduces to zero.
    fn reduce_top(&self, mut p: Vec<u64>) -> Option<Vec<u64>> {
        let q = self.q();
        loop {
            let i = top(&p)?;
            let c = p[i];
            let irreducible = match self.reducer(i) {
                None => true,
                Some(j) => {
                    let g = &self.basis[j];
                    if split3(c).0 < g.s {
                        true
                    } else {
                        sub_shifted(&mut p, c / 3u64.pow(g.s), i - g.degree(), &g.coeffs, q);
                        false
                    }
                }
            };
            if irreducible {
                p.truncate(i + 1);
                return Some(p);
            }
        }
    }

    /// Inserts `p` and completes the basis; tails are left unreduced.
    fn insert_raw(&mut self, p: Vec<u64>) -> bool {
        let q = self.q();
        let e = self.ctx.exponent;
        let mut grew = false;
        let mut queue = vec![p];
        while let Some(p) = queue.pop() {
            let Some(r) = self.reduce_top(p) else {
                continue;
            };
            grew = true;
            let i = r.len() - 1;
            let (v, unit) = split3(r[i]);
            let r = scale(&r, inv_mod(unit, q).expect("unit"), q);
            let mut kept = Vec::with_capacity(self.basis.len() + 1);
            for g in self.basis.drain(..) {
                if g.s >= v && g.degree() >= i {
                    queue.push(g.coeffs);
                } else {
                    kept.push(g);
                }
            }
            self.basis = kept;
            if v > 0 {
                queue.push(scale(&r, 3u64.pow(e - v), q));
            }
            for g in &self.basis {
                let spoly = if g.s < v {
                    let mut s = scale(&g.coeffs, 3u64.pow(v - g.s), q);
                    sub_shifted(&mut s, 1, g.degree() - i, &r, q);
                    s
                } else {
                    let mut s = scale(&r, 3u64.pow(g.s - v), q);
                    sub_shifted(&mut s, 1, i - g.degree(), &g.coeffs, q);
                    s
                };
                queue.push(spoly);
            }
            let pos = self.basis.partition_point(|g| g.s < v);
            self.basis.insert(pos, Gen { s: v, coeffs: r });
        }
        grew
    }

    /// Reduces every tail coefficient into `[0, 3^{k_i})`.
    fn finish(&mut self) {
        let q = self.q();
        let leads = self.leads();
        for j in 0..self.basis.len() {
            let mut p = std::mem::take(&mut self.basis[j].coeffs);
            let d = p.len() - 1;
            for i in (0..d).rev() {
                let Some(l) = reducer_in(&leads, i) else { break };
                let pk = 3u64.pow(leads[l].0);
                if p[i] >= pk {
                    let g = &self.basis[l];
                    let mult = p[i] / pk;
                    sub_shifted(&mut p, mult, i - leads[l].1, &g.coeffs, q);
                }
            }
            self.basis[j].coeffs = p;
        }
    }

    /// Remainder of `p` with every coefficient in `[0, 3^{k_i})`; zero iff
    /// `p` is a member.
    pub fn normal_form(&self, p: &TruncatedPolynomial) -> Vec<u64> {
        let q = self.q();
        let mut v = p.coeffs().to_vec();
        for i in (0..v.len()).rev() {
            let Some(l) = self.reducer(i) else { break };
            let g = &self.basis[l];
            let pk = 3u64.pow(g.s);
            if v[i] >= pk {
                let mult = v[i] / pk;
                sub_shifted(&mut v, mult, i - g.degree(), &g.coeffs, q);
            }
        }
        v
    }

    pub fn contains(&self, p: &TruncatedPolynomial) -> bool {
        p.context() == self.ctx && self.reduce_top(p.coeffs().to_vec()).is_none()
    }

    pub fn is_unit(&self) -> bool {
        self.basis[0].degree() == 0
    }

    /// `log_3 #(R / I)`.
    pub fn log3_index(&self) -> u64 {
        let e = self.ctx.exponent as u64;
        let mut total = 0u64;
        let mut upper = self.basis[0].degree();
        for g in &self.basis[1..] {
            total += g.s as u64 * (upper - g.degree()) as u64;
            upper = g.degree();
        }
        total + e * upper as u64
    }

    /// Smallest `s` with `3^s ∈ I`, capped at `e`.
    pub fn exponent_log3(&self) -> u32 {
        self.reducer(0)
            .map(|j| self.basis[j].s)
            .unwrap_or(self.ctx.exponent)
    }

    /// Whether truncating at `3^e` loses nothing: the quotient is killed by
    /// `3^{e-1}`.
    pub fn exponent_sufficient(&self) -> bool {
        self.exponent_log3() < self.ctx.exponent
    }

    /// Basis elements other than the modulus itself.
    fn visible(&self) -> impl Iterator<Item = &Gen> + '_ {
        let d = self.ctx.degree();
        let m = self.ctx.modulus_poly();
        self.basis
            .iter()
            .filter(move |g| g.degree() < d || g.coeffs[..d] != m[..])
    }

    /// The basis elements as ring elements, highest degree first. The monic
    /// element is dropped when it is the modulus itself.
    pub fn generators(&self) -> Vec<TruncatedPolynomial> {
        self.visible()
            .map(|g| TruncatedPolynomial::from_wide(g.coeffs.clone(), self.ctx))
            .collect()
    }

    /// Generators as integer polynomials, highest degree first, each lower
    /// coefficient moved into the symmetric range around zero (so `T-996`
    /// rather than `T+1191`).
    pub fn generator_polys(&self) -> Vec<Vec<i64>> {
        let q = self.q();
        let mut out = Vec::new();
        for g in self.visible() {
            let mut p = g.coeffs.clone();
            let deg = g.degree();
            let mut signed = vec![0i64; deg + 1];
            signed[deg] = 3i64.pow(g.s);
            for i in (0..deg).rev() {
                let c = p[i] as i64;
                signed[i] = match self.reducer(i) {
                    Some(l) => {
                        let pk = 3i64.pow(self.basis[l].s);
                        if c > pk / 2 {
                            let h = &self.basis[l];
                            sub_shifted(&mut p, 1, i - h.degree(), &h.coeffs, q);
                            c - pk
                        } else {
                            c
                        }
                    }
                    None if c > q as i64 / 2 => c - q as i64,
                    None => c,
                };
            }
            out.push(signed);
        }
        out
    }

    /// The smallest `k` with `T^k ∈ I + (3)`.
    pub fn tk_invariant(&self) -> usize {
        let d = self.ctx.degree();
        self.basis
            .iter()
            .filter_map(|g| g.coeffs.iter().position(|&c| c % 3 != 0))
            .min()
            .unwrap_or(d)
            .min(d)
    }

    fn first_level_containing(&self, variant: Variant) -> Result<u32, IwasawaError> {
        for n in 0..self.ctx.level {
            let w = TruncatedPolynomial::from_bigint(&omega(n, variant), self.ctx);
            if self.contains(&w) {
                return Ok(n);
            }
        }
        Err(IwasawaError::ContextExhausted {
            level: self.ctx.level,
            exponent: self.ctx.exponent,
        })
    }

    /// Smallest `n` below the context level with `ω_n ∈ I` (`ω'_n` for the
    /// primed variant).
    pub fn stabilization_level(&self) -> Result<u32, IwasawaError> {
        self.first_level_containing(self.ctx.variant)
    }

    /// `n` such that `1+T` has multiplicative order `3^n` modulo `I`.
    pub fn order_of_one_plus_t(&self) -> Result<u32, IwasawaError> {
        self.first_level_containing(Variant::Omega)
    }

    /// Image under reduction modulo `ω_m` (or `ω'_m`), `m ≤ n`.
    pub fn reduce_to_level(&self, level: u32) -> Result<Self, IwasawaError> {
        if level > self.ctx.level {
            return Err(IwasawaError::LevelNotLower {
                from: self.ctx.level,
                to: level,
            });
        }
        let mut out = Self::zero(self.ctx.at_level(level));
        for g in &self.basis {
            out.insert_raw(g.coeffs.clone());
        }
        out.finish();
        Ok(out)
    }

    /// Image in the ring with a smaller exponent.
    pub fn reduce_exponent(&self, exponent: u32) -> Self {
        assert!(exponent <= self.ctx.exponent);
        let target = self.ctx.with_exponent(exponent);
        let q = target.modulus();
        let mut out = Self::zero(target);
        for g in &self.basis {
            out.insert_raw(g.coeffs.iter().map(|&c| c % q).collect());
        }
        out.finish();
        out
    }

    pub fn sum(&self, other: &Self) -> Result<Self, IwasawaError> {
        if self.ctx != other.ctx {
            return Err(IwasawaError::ContextMismatch(self.ctx, other.ctx));
        }
        let mut out = self.clone();
        for g in &other.basis {
            out.insert_raw(g.coeffs.clone());
        }
        out.finish();
        Ok(out)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.ctx == other.ctx
            && self
                .basis
                .iter()
                .all(|g| other.reduce_top(g.coeffs.clone()).is_none())
    }

    /// The ideal as a Howell lattice in `(Z/3^e)^deg`, one row per degree.
    pub fn lattice(&self) -> Lattice {
        let d = self.ctx.degree();
        let mut lat = Lattice::new(self.ctx.exponent, d);
        for i in 0..d {
            if let Some(l) = self.reducer(i) {
                let g = &self.basis[l];
                let mut row = vec![0u64; d];
                row[i - g.degree()..=i].copy_from_slice(&g.coeffs);
                lat.insert(&row);
            }
        }
        lat.canonicalize();
        lat
    }

    /// `Ann(I) = { y : y·I = 0 }` inside the ring. Dense linear algebra over
    /// `(Z/3^e)^{deg·(1+#gens)}`, meant for small levels.
    pub fn annihilator(&self) -> Self {
        let ctx = self.ctx;
        let d = ctx.degree();
        let gens = self.generators();
        if d == 0 || gens.is_empty() {
            return Self::unit(ctx);
        }
        let k = gens.len();
        // rows [ T^i | T^i g_1 | ... | T^i g_k ] with pivots taken from the
        // high end: the kernel is spanned by the rows supported on the first block
        let width = d + k * d;
        let mut lat = Lattice::new(ctx.exponent, width);
        let mut shifted: Vec<TruncatedPolynomial> = gens;
        for i in 0..d {
            let mut row = vec![0u64; width];
            row[i] = 1;
            for (j, g) in shifted.iter().enumerate() {
                row[d + j * d..d + (j + 1) * d].copy_from_slice(g.coeffs());
            }
            lat.insert(&row);
            shifted = shifted.iter().map(|g| g.mul_t()).collect();
        }
        let kernel: Vec<TruncatedPolynomial> = lat
            .rows()
            .filter(|(i, _)| *i < d)
            .map(|(_, r)| TruncatedPolynomial::from_coords(r[..d].to_vec(), ctx))
            .collect();
        Self::from_generators(&kernel, ctx).expect("same context")
    }
}

impl fmt::Display for TruncatedLambdaIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens = self.generator_polys();
        if gens.is_empty() {
            return write!(f, "(0)");
        }
        let parts: Vec<String> = gens
            .iter()
            .map(|g| format_poly(&g.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>()))
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Whether the ideals at two consecutive levels agree: the upper one reduces
/// onto the lower one and both quotients have the same order.
pub fn stabilization_check(
    lower: &TruncatedLambdaIdeal,
    upper: &TruncatedLambdaIdeal,
) -> Result<bool, IwasawaError> {
    let (a, b) = (lower.context(), upper.context());
    if a.exponent != b.exponent || a.variant != b.variant || b.level != a.level + 1 {
        return Err(IwasawaError::ContextMismatch(a, b));
    }
    Ok(upper.reduce_to_level(a.level)? == *lower && upper.log3_index() == lower.log3_index())
}

/// Applies `T ↦ (1+T)^{-1} - 1`, i.e. `γ ↦ γ^{-1}`, to every element.
pub fn invert_generator(ideal: &TruncatedLambdaIdeal) -> TruncatedLambdaIdeal {
    let ctx = ideal.context();
    if ctx.degree() == 0 {
        return ideal.clone();
    }
    // (1+T)^{-1} = (1+T)^{3^n - 1} modulo ω_n, hence also modulo ω'_n
    let full = Context::new(ctx.exponent, ctx.level, Variant::Omega);
    let mut inv = TruncatedPolynomial::one(full);
    let mut base = TruncatedPolynomial::from_i64(&[1, 1], full);
    let mut k = 3usize.pow(ctx.level) - 1;
    while k > 0 {
        if k & 1 == 1 {
            inv = inv.mul(&base).expect("same context");
        }
        base = base.mul(&base).expect("same context");
        k >>= 1;
    }
    let minus_one = TruncatedPolynomial::from_i64(&[-1], full);
    let image = inv.add(&minus_one).expect("same context");
    let image = TruncatedPolynomial::from_wide(image.coeffs().to_vec(), ctx);
    let one = TruncatedPolynomial::one(ctx);
    let gens: Vec<TruncatedPolynomial> = ideal
        .generators()
        .iter()
        .map(|g| {
            let mut acc = TruncatedPolynomial::zero(ctx);
            for &c in g.coeffs().iter().rev() {
                acc = acc.mul(&image).expect("same context");
                acc = acc.add(&one.scale(c)).expect("same context");
            }
            acc
        })
        .collect();
    TruncatedLambdaIdeal::from_generators(&gens, ctx).expect("same context")
}
