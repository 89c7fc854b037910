use astro_float::BigFloat;
use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::float::{from_bigint, log2_abs, round_to_bigint, to_f64, Fp};
use super::sheet::RealEmbeddingSheet;

/// Largest `k` such that the rounded coordinates may carry the denominator
/// `3^k` with respect to the natural order `Z[w] ⊗ Z[ζ + ζ^{-1}]`.
pub const DENOMINATOR_LOG3_BOUND: u32 = 3;

/// A numerical margin counts as decisive when it clears the error estimate by
/// this many bits.
pub const SAFETY_BITS: f64 = 16.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    CertifiedYes,
    CertifiedNo,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerCertificate {
    /// Exponents of `γ^k η_n`.
    pub exponents: Vec<i64>,
    pub power_log3: u32,
    pub verdict: Verdict,
    /// For a YES: `log_2` of the bound on `|N(d^{3^v}(y^{3^v}/x - 1))|`, which
    /// must be negative. For a NO: bits by which the rounding distance clears
    /// the error estimate. Otherwise the best such figure found.
    pub margin_bits: f64,
    /// `k` with the root's coordinates in `3^{-k}` times the natural order.
    pub denominator_log3: Option<u32>,
    /// Precision needed for a decisive answer, when the sheet fell short.
    pub bits_needed: Option<usize>,
}

/// Conjugates of the natural integral basis `w^a (ζ + ζ^{-1})^j` of `F_n`,
/// `w = (f mod 2 + √f)/2`, rows indexed like the sheet.
struct NaturalBasis {
    /// `rows[τ][i]`
    rows: Vec<Vec<BigFloat>>,
    inverse: Vec<Vec<BigFloat>>,
    inverse_norm_log2: f64,
    entry_log2: f64,
}

impl NaturalBasis {
    fn new(f: u64, level: u32, fp: &mut Fp) -> Self {
        let d = 3usize.pow(level);
        let q = 3i64.pow(level + 1);
        let sqrt_f = fp.sqrt(&fp.int(f as i64));
        let two = fp.int(2);
        let pi = fp.pi();
        let two_pi = fp.mul(&pi, &two);
        let mut rows = Vec::with_capacity(2 * d);
        for s in 0..2 {
            for k in 0..d {
                let root = if s == 0 { sqrt_f.clone() } else { sqrt_f.neg() };
                let w = fp.div(&fp.add(&fp.int((f % 2) as i64), &root), &two);
                let a = crate::arith::pow_mod(4, k as u64, q as u64) as i64;
                let angle = fp.div(&fp.mul(&two_pi, &fp.int(a)), &fp.int(q));
                let cos = fp.sin_cos(&angle).1;
                let c = fp.mul(&cos, &two);
                let mut powers = vec![fp.int(1)];
                for j in 1..d {
                    let next = fp.mul(&powers[j - 1], &c);
                    powers.push(next);
                }
                let mut row = powers.clone();
                row.extend(powers.iter().map(|x| fp.mul(x, &w)));
                rows.push(row);
            }
        }
        let inverse = invert(&rows, fp);
        let inverse_norm_log2 = inverse
            .iter()
            .map(|r| r.iter().map(|x| to_f64(x).abs()).sum::<f64>())
            .fold(0.0, f64::max)
            .log2();
        let entry_log2 = rows
            .iter()
            .flatten()
            .map(log2_abs)
            .fold(0.0, f64::max);
        NaturalBasis {
            rows,
            inverse,
            inverse_norm_log2,
            entry_log2,
        }
    }
}

/// Gauss-Jordan with partial pivoting.
fn invert(a: &[Vec<BigFloat>], fp: &Fp) -> Vec<Vec<BigFloat>> {
    let n = a.len();
    let mut m: Vec<Vec<BigFloat>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| fp.int(i64::from(i == j))));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| log2_abs(&m[x][col]).total_cmp(&log2_abs(&m[y][col])))
            .unwrap();
        m.swap(col, piv);
        let inv = fp.div(&fp.int(1), &m[col][col]);
        for j in 0..2 * n {
            m[col][j] = fp.mul(&m[col][j], &inv);
        }
        for i in 0..n {
            if i == col || m[i][col].is_zero() {
                continue;
            }
            let factor = m[i][col].clone();
            for j in 0..2 * n {
                let t = fp.mul(&factor, &m[col][j]);
                m[i][j] = fp.sub(&m[i][j], &t);
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// `log τ(η^g)` in double precision, for planning.
pub(crate) fn power_logs_f64(logs: &[f64], g: &[i64]) -> Vec<f64> {
    let d = logs.len() / 2;
    (0..2 * d)
        .map(|i| {
            let (s, j) = (i / d, i % d);
            g.iter()
                .enumerate()
                .map(|(k, &c)| c as f64 * logs[s * d + (j + k) % d])
                .sum()
        })
        .collect()
}

/// `log_2` of the row-sum norm of the inverse conjugate matrix of the natural
/// basis.
pub(crate) fn basis_conditioning(f: u64, level: u32) -> f64 {
    NaturalBasis::new(f, level, &mut Fp::new(256)).inverse_norm_log2
}

/// Working precision for testing whether `η^g` is a `3^v`-th power.
pub(crate) fn bits_needed(logs: &[f64], g: &[i64], v: u32, conditioning: f64) -> usize {
    let lam = power_logs_f64(logs, g);
    let pv = 3f64.powi(v as i32);
    let ln2 = std::f64::consts::LN_2;
    let ymax = lam.iter().fold(0f64, |a, &x| a.max(x / pv)) / ln2;
    let ymin = lam.iter().fold(0f64, |a, &x| a.min(x / pv)) / ln2;
    let d = logs.len() as f64;
    // coordinates ~ |M^{-1}| max y; recomputing the smallest conjugate from
    // them loses (size of coordinates) - log2 min y bits
    let coord = ymax + conditioning.max(0.0) + d.log2();
    let denom = DENOMINATOR_LOG3_BOUND as f64 * pv * 3f64.log2();
    (coord - ymin + denom + pv.log2() + 2.0 * SAFETY_BITS + 96.0).ceil() as usize
}

/// Decides whether `η^g = y^{3^v}` for a unit `y` of `F_n`.
///
/// `y` is forced to be the totally positive root `exp(log τ(η^g) / 3^v)`; its
/// coordinates on the natural basis are rounded (after scaling by `3^k`), and
/// the rounded `y` is accepted when `z = y^{3^v}/η^g` is provably 1: the
/// algebraic integer `3^{k 3^v}(z - 1)` has all conjugates so small that its
/// norm, an integer, is 0.
pub fn is_power(sheet: &RealEmbeddingSheet, g: &[i64], v: u32) -> PowerCertificate {
    let d2 = sheet.degree();
    let d = d2 / 2;
    assert_eq!(g.len(), d, "one exponent per power of γ");
    let mut cert = PowerCertificate {
        exponents: g.to_vec(),
        power_log3: v,
        verdict: Verdict::Inconclusive,
        margin_bits: f64::NEG_INFINITY,
        denominator_log3: None,
        bits_needed: None,
    };
    if g.iter().all(|&c| c == 0) {
        cert.verdict = Verdict::CertifiedYes;
        cert.margin_bits = f64::INFINITY;
        cert.denominator_log3 = Some(0);
        return cert;
    }
    let need = bits_needed(&sheet.logs_f64(), g, v, basis_conditioning(sheet.f, sheet.level));
    if need > sheet.bits {
        cert.bits_needed = Some(need);
        return cert;
    }
    let mut fp = Fp::new(sheet.bits + 64);
    let basis = NaturalBasis::new(sheet.f, sheet.level, &mut fp);
    let pv = 3i64.pow(v);
    let pv_f = fp.int(pv);
    // λ_τ = log τ(x)
    let lam: Vec<BigFloat> = (0..d2)
        .map(|i| {
            let (s, j) = (i / d, i % d);
            g.iter().enumerate().fold(fp.int(0), |acc, (k, &c)| {
                let t = fp.mul(&fp.int(c), &sheet.logs[s * d + (j + k) % d]);
                fp.add(&acc, &t)
            })
        })
        .collect();
    let abs_g: f64 = g.iter().map(|&c| (c as f64).abs()).sum();
    let lam_err = sheet.error_log2 + abs_g.log2();
    let y: Vec<BigFloat> = lam.iter().map(|l| fp.exp(&fp.div(l, &pv_f))).collect();
    let ymax = y.iter().map(log2_abs).fold(f64::NEG_INFINITY, f64::max);
    // absolute error of the coordinates
    let y_rel_err = lam_err.max(-(fp.p as f64) + 4.0);
    let coord_err = basis.inverse_norm_log2 + ymax + y_rel_err + 4.0;
    let coords: Vec<BigFloat> = (0..d2)
        .map(|i| {
            (0..d2).fold(fp.int(0), |acc, t| fp.add(&acc, &fp.mul(&basis.inverse[i][t], &y[t])))
        })
        .collect();
    let ln3 = fp.ln(&fp.int(3));
    let mut best_distance = f64::INFINITY;
    for k in 0..=DENOMINATOR_LOG3_BOUND {
        let scale = fp.int(3i64.pow(k));
        let scaled: Vec<BigFloat> = coords.iter().map(|c| fp.mul(c, &scale)).collect();
        let ints: Vec<BigInt> = scaled.iter().map(round_to_bigint).collect();
        let distance = scaled
            .iter()
            .zip(&ints)
            .map(|(c, a)| log2_abs(&fp.sub(c, &from_bigint(a, fp.p))))
            .fold(f64::NEG_INFINITY, f64::max);
        best_distance = best_distance.min(distance);
        let slack = coord_err + (3f64.powi(k as i32)).log2();
        if distance > slack + SAFETY_BITS {
            continue;
        }
        // exact coordinates: recompute conjugates of 3^k y and compare
        let amax = ints.iter().map(|a| a.bits()).max().unwrap_or(0) as f64;
        let mut norm_log2 = 0.0;
        let mut ok = true;
        for t in 0..d2 {
            let yk = (0..d2).fold(fp.int(0), |acc, i| {
                if ints[i].is_zero() {
                    return acc;
                }
                fp.add(&acc, &fp.mul(&from_bigint(&ints[i], fp.p), &basis.rows[t][i]))
            });
            if !yk.is_positive() {
                ok = false;
                break;
            }
            // log z_τ = 3^v (log(3^k y_τ) - k log 3) - λ_τ
            let lnyk = fp.ln(&yk);
            let ly = fp.sub(&lnyk, &fp.mul(&fp.int(k as i64), &ln3));
            let lz = fp.sub(&fp.mul(&pv_f, &ly), &lam[t]);
            let yk_rel = amax + basis.entry_log2 + (d2 as f64).log2() - log2_abs(&yk) - fp.p as f64;
            let err = (pv as f64).log2() + yk_rel.max(-(fp.p as f64)) ;
            let err = err.max(lam_err) + 2.0;
            let z1 = log2_abs(&lz).max(err) + 1.0;
            if z1 > -1.0 {
                ok = false;
                break;
            }
            norm_log2 += z1 + (k as f64) * (pv as f64) * 3f64.log2();
        }
        if ok && norm_log2 < 0.0 {
            cert.verdict = Verdict::CertifiedYes;
            cert.margin_bits = norm_log2;
            cert.denominator_log3 = Some(k);
            return cert;
        }
    }
    // no denominator within the bound gives integral coordinates
    let slack = coord_err + (3f64.powi(DENOMINATOR_LOG3_BOUND as i32)).log2();
    cert.margin_bits = best_distance - slack;
    if best_distance - slack >= SAFETY_BITS && best_distance > -8.0 {
        cert.verdict = Verdict::CertifiedNo;
    }
    cert
}

/// Integer symmetric representative of `x mod 3^v`.
pub(crate) fn symmetric_mod(x: i128, q: i128) -> i64 {
    let r = x.rem_euclid(q);
    (if r > q / 2 { r - q } else { r }) as i64
}

/// `Σ_k c_k g^k = Σ_i h_i (g - 1)^i`: the group ring element with `T = g - 1`.
pub(crate) fn taylor_shift(h: &[i64], d: usize, q: i128) -> Vec<i64> {
    let mut out = vec![0i128; d];
    // Horner: out ← out·(g - 1) + h_i
    for &hi in h.iter().rev() {
        let mut next = vec![0i128; d];
        for k in 0..d {
            // multiplication by g shifts cyclically (g^d = 1)
            next[(k + 1) % d] += out[k];
            next[k] -= out[k];
        }
        next[0] += hi as i128;
        out = next.into_iter().map(|x| x.rem_euclid(q)).collect();
    }
    out.into_iter().map(|x| symmetric_mod(x, q)).collect()
}
