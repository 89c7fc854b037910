use std::collections::HashMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::FundamentalDiscriminant;

/// The binary quadratic form `a x^2 + b x y + c y^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

/// Reduction data for a fixed positive nonsquare discriminant.
struct Disc {
    d: i64,
    root: i64,
}

impl Disc {
    fn new(d: i64) -> Self {
        let root = num_integer::sqrt(d);
        debug_assert!(root * root != d);
        Disc { d, root }
    }

    /// `|√D - 2|a|| < b < √D`.
    fn is_reduced(&self, f: &Form) -> bool {
        let a2 = 2 * f.a.abs();
        f.b > 0 && f.b <= self.root && a2 + f.b > self.root && a2 - f.b <= self.root
    }

    /// The representative of `b` modulo `2|a|` used by the reduction operator.
    fn normalize_b(&self, b: i64, a: i64) -> i64 {
        let m = 2 * a.abs();
        if a.abs() > self.root {
            let r = b.rem_euclid(m);
            if r > a.abs() {
                r - m
            } else {
                r
            }
        } else {
            self.root - (self.root - b).rem_euclid(m)
        }
    }

    /// `ρ(a, b, c) = (c, r, (r^2 - D)/4c)` with `r ≡ -b (mod 2c)` normalized.
    fn rho(&self, f: &Form) -> Form {
        let r = self.normalize_b(-f.b, f.c);
        let num = r as i128 * r as i128 - self.d as i128;
        let den = 4 * f.c as i128;
        debug_assert_eq!(num % den, 0);
        Form {
            a: f.c,
            b: r,
            c: (num / den) as i64,
        }
    }

    fn reduce(&self, mut f: Form) -> Form {
        while !self.is_reduced(&f) {
            f = self.rho(&f);
        }
        f
    }

    /// All reduced forms of discriminant `D`.
    fn reduced_forms(&self) -> Vec<Form> {
        let mut out = Vec::new();
        let mut b = if self.d % 2 == 0 { 2 } else { 1 };
        while b <= self.root {
            let n = (self.d - b * b) / 4;
            for a in 1..=(self.root + b) / 2 {
                if n % a != 0 {
                    continue;
                }
                for sa in [a, -a] {
                    let f = Form { a: sa, b, c: -n / sa };
                    if self.is_reduced(&f) {
                        out.push(f);
                    }
                }
            }
            b += 2;
        }
        out
    }

    /// Gauss composition of two forms with positive first coefficient, reduced.
    fn compose(&self, f1: &Form, f2: &Form) -> Form {
        let (mut f1, mut f2) = (*f1, *f2);
        if f1.a > f2.a {
            std::mem::swap(&mut f1, &mut f2);
        }
        let (a1, b1) = (f1.a as i128, f1.b as i128);
        let (a2, b2, c2) = (f2.a as i128, f2.b as i128, f2.c as i128);
        let s = (b1 + b2) / 2;
        let n = b2 - s;
        let (y1, d) = if a2 % a1 == 0 {
            (0, a1)
        } else {
            let g = a2.extended_gcd(&a1);
            (g.x, g.gcd)
        };
        let (x2, y2, d1) = if s % d == 0 {
            (0, -1, d)
        } else {
            let g = s.extended_gcd(&d);
            (g.x, -g.y, g.gcd)
        };
        let v1 = a1 / d1;
        let v2 = a2 / d1;
        let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
        let b3 = b2 + 2 * v2 * r;
        let a3 = v1 * v2;
        let num = b3 * b3 - self.d as i128;
        debug_assert_eq!(num % (4 * a3), 0);
        let c3 = num / (4 * a3);
        self.reduce(Form {
            a: a3 as i64,
            b: b3 as i64,
            c: c3 as i64,
        })
    }
}

/// The form class group of discriminant `f` (the narrow class group) and the
/// ordinary class group derived from it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroup {
    /// Narrow class number: number of cycles of reduced forms.
    pub h_plus: u64,
    /// Ordinary class number.
    pub h: u64,
    /// Exponent of 3 in `h`.
    pub h3: u32,
    /// 3-Sylow subgroup as `Z/3^{k_1} × Z/3^{k_2} × …`, `k_1 ≥ k_2 ≥ …`.
    pub sylow3: Vec<u32>,
    /// Whether the fundamental unit has norm `-1`.
    pub norm_minus_one: bool,
}

/// The cycle structure of reduced forms together with a composition table
/// on cycle indices.
struct Classes {
    disc: Disc,
    index: HashMap<Form, usize>,
    reps: Vec<Form>,
}

impl Classes {
    fn new(d: i64) -> Self {
        let disc = Disc::new(d);
        let mut index = HashMap::new();
        let mut reps = Vec::new();
        for f in disc.reduced_forms() {
            if index.contains_key(&f) {
                continue;
            }
            let id = reps.len();
            let mut g = f;
            let mut rep = None;
            loop {
                index.insert(g, id);
                if g.a > 0 && rep.is_none() {
                    rep = Some(g);
                }
                g = disc.rho(&g);
                if g == f {
                    break;
                }
            }
            reps.push(rep.expect("cycles alternate in sign"));
        }
        Classes { disc, index, reps }
    }

    fn principal(&self) -> Form {
        let d = self.disc.d;
        let b = self.disc.root - (self.disc.root - d).rem_euclid(2);
        Form {
            a: 1,
            b,
            c: (b * b - d) / 4,
        }
    }

    fn id(&self, f: &Form) -> usize {
        self.index[&self.disc.reduce(*f)]
    }

    fn mul(&self, x: usize, y: usize) -> usize {
        let f = self.disc.compose(&self.reps[x], &self.reps[y]);
        self.index[&f]
    }

    fn pow(&self, x: usize, mut k: u64) -> usize {
        let mut acc = self.id(&self.principal());
        let mut base = x;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }
}

/// Class number and 3-Sylow structure of `Q(√f)` from the cycles of reduced
/// indefinite forms.
pub fn class_group_3part(fd: &FundamentalDiscriminant) -> ClassGroup {
    let cls = Classes::new(fd.f as i64);
    let h_plus = cls.reps.len() as u64;
    let one = cls.id(&cls.principal());
    let p = cls.principal();
    let minus = Form {
        a: -p.a,
        b: p.b,
        c: -p.c,
    };
    let norm_minus_one = cls.id(&minus) == one;
    let h = if norm_minus_one { h_plus } else { h_plus / 2 };
    let h3 = crate::arith::v3(h);
    // the narrow and the ordinary group share their 3-Sylow subgroup
    let cofactor = h_plus / 3u64.pow(h3);
    let mut sylow: Vec<usize> = (0..cls.reps.len()).map(|x| cls.pow(x, cofactor)).collect();
    sylow.sort_unstable();
    sylow.dedup();
    debug_assert_eq!(sylow.len() as u64, 3u64.pow(h3));
    // n_j = log_3 #{x : x^{3^j} = 1}; the number of factors of order ≥ 3^j is n_j - n_{j-1}
    let mut killed = vec![0u32];
    let mut j = 1;
    while *killed.last().unwrap() < h3 {
        let count = sylow.iter().filter(|&&x| cls.pow(x, 3u64.pow(j)) == one).count() as u64;
        killed.push(crate::arith::v3(count));
        j += 1;
    }
    let steps: Vec<u32> = killed.windows(2).map(|w| w[1] - w[0]).collect();
    let rank = steps.first().copied().unwrap_or(0);
    let sylow3: Vec<u32> = (0..rank)
        .map(|i| steps.iter().filter(|&&s| s > i).count() as u32)
        .collect();
    ClassGroup {
        h_plus,
        h,
        h3,
        sylow3,
        norm_minus_one,
    }
}
