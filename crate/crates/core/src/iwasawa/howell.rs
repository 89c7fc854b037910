//! Howell normal form for submodules of `(Z/3^e)^len`.
//!
//! Rows are indexed by pivot position, where the pivot of a vector is its
//! highest nonzero coordinate. The pivot entry of every stored row is a power
//! of three, and entries below each pivot are reduced modulo the pivot of the
//! row owning that coordinate. With the saturation step in [`Lattice::insert`]
//! this form is unique for a given module.

use crate::arith::inv_mod;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    exponent: u32,
    modulus: u64,
    rows: Vec<Option<Vec<u64>>>,
    pivot_exp: Vec<u32>,
    reduced: bool,
}

/// 3-adic valuation of a residue in `[1, 3^e)`, together with the unit part.
fn split3(x: u64) -> (u32, u64) {
    let mut s = 0;
    let mut u = x;
    while u % 3 == 0 {
        u /= 3;
        s += 1;
    }
    (s, u)
}

impl Lattice {
    pub fn new(exponent: u32, len: usize) -> Self {
        assert!(exponent >= 1 && exponent <= 38, "exponent out of range");
        Lattice {
            exponent,
            modulus: 3u64.pow(exponent),
            rows: vec![None; len],
            pivot_exp: vec![exponent; len],
            reduced: true,
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `k_i` such that the coordinate-`i` pivot ideal is `3^{k_i}`; `e` if empty.
    pub fn pivot_exponents(&self) -> &[u32] {
        &self.pivot_exp
    }

    /// `log_3` of the index of the module in `(Z/3^e)^len`.
    pub fn log3_index(&self) -> u64 {
        self.pivot_exp.iter().map(|&k| k as u64).sum()
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &Vec<u64>)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.as_ref().map(|r| (i, r)))
    }

    #[inline]
    fn mulm(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    fn axpy(&self, v: &mut [u64], c: u64, row: &[u64], upto: usize) {
        // v -= c * row on coordinates 0..=upto
        if c == 0 {
            return;
        }
        let q = self.modulus;
        for j in 0..=upto {
            if row[j] != 0 {
                let t = self.mulm(c, row[j]);
                v[j] = if v[j] >= t { v[j] - t } else { v[j] + q - t };
            }
        }
    }

    fn scale(&self, v: &mut [u64], c: u64) {
        for x in v.iter_mut() {
            *x = self.mulm(*x, c);
        }
    }

    /// Reduces `v` against the current rows. Returns the remainder; it is zero
    /// iff `v` lies in the module.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let mut v: Vec<u64> = v.iter().map(|&x| x % self.modulus).collect();
        let mut top = v.len();
        while top > 0 {
            let i = top - 1;
            if v[i] == 0 {
                top -= 1;
                continue;
            }
            match &self.rows[i] {
                Some(row) => {
                    let p = 3u64.pow(self.pivot_exp[i]);
                    if v[i] % p != 0 {
                        return v;
                    }
                    let c = v[i] / p;
                    self.axpy(&mut v, c, row, i);
                    debug_assert_eq!(v[i], 0);
                    top -= 1;
                }
                None => return v,
            }
        }
        v
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds `v` to the module. Returns whether the module grew.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        assert_eq!(v.len(), self.len());
        let mut grew = false;
        let mut work: Vec<Vec<u64>> = vec![v.iter().map(|&x| x % self.modulus).collect()];
        while let Some(mut v) = work.pop() {
            let mut top = v.len();
            while top > 0 {
                let i = top - 1;
                if v[i] == 0 {
                    top -= 1;
                    continue;
                }
                let (s, unit) = split3(v[i]);
                let k = self.pivot_exp[i];
                if k <= s && self.rows[i].is_some() {
                    let c = v[i] / 3u64.pow(k);
                    let row = self.rows[i].as_ref().unwrap();
                    self.axpy(&mut v, c, row, i);
                    top -= 1;
                    continue;
                }
                // v becomes the new row at pivot i
                let uinv = inv_mod(unit, self.modulus).expect("unit");
                self.scale(&mut v, uinv);
                let sat_factor = 3u64.pow(self.exponent - s);
                let mut sat = v.clone();
                self.scale(&mut sat, sat_factor);
                if sat.iter().any(|&x| x != 0) {
                    work.push(sat);
                }
                let old = self.rows[i].replace(v);
                self.pivot_exp[i] = s;
                grew = true;
                self.reduced = false;
                match old {
                    Some(old_row) => {
                        // the displaced row is now reducible by the new one
                        v = old_row;
                    }
                    None => break,
                }
            }
        }
        grew
    }

    /// Brings the rows into the unique reduced form: every entry below a pivot
    /// is reduced modulo the pivot of the row owning that coordinate. Needed
    /// only before comparing or displaying rows; membership tests work either way.
    pub fn canonicalize(&mut self) {
        if self.reduced {
            return;
        }
        let n = self.len();
        for i in 0..n {
            let Some(mut row) = self.rows[i].take() else { continue };
            for j in (0..i).rev() {
                if row[j] == 0 {
                    continue;
                }
                if let Some(rj) = &self.rows[j] {
                    let p = 3u64.pow(self.pivot_exp[j]);
                    let c = row[j] / p;
                    if c != 0 {
                        let q = self.modulus;
                        for t in 0..=j {
                            if rj[t] != 0 {
                                let s = ((c as u128 * rj[t] as u128) % q as u128) as u64;
                                row[t] = if row[t] >= s { row[t] - s } else { row[t] + q - s };
                            }
                        }
                    }
                }
            }
            self.rows[i] = Some(row);
        }
        self.reduced = true;
    }

    pub fn is_canonical(&self) -> bool {
        self.reduced
    }

    /// Enumerates the module (only for tiny instances; used by tests).
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![0u64; self.len()]];
        for (i, row) in self.rows() {
            let order = 3u64.pow(self.exponent - self.pivot_exp[i]);
            let mut next = Vec::with_capacity(out.len() * order as usize);
            for base in &out {
                for c in 0..order {
                    let mut w = base.clone();
                    for j in 0..w.len() {
                        w[j] = (w[j] + self.mulm(c, row[j])) % self.modulus;
                    }
                    next.push(w);
                }
            }
            out = next;
        }
        out
    }
}
