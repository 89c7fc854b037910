use astro_float::BigFloat;

use super::float::{to_f64, Fp};
use super::GrasError;
use crate::annihilator::ClassLabels;
use crate::quadfield::FundamentalDiscriminant;

/// `log τ(η_n)` for the `2·3^n` real embeddings `τ` of `F_n`, indexed
/// `s·3^n + k` for the embedding class `(s, k)` of `ClassLabels`.
///
/// `η_n` is totally positive: every conjugate is a product of squares
/// `4 sin^2(π t/m)` over `±`-pairs.
#[derive(Clone, Debug)]
pub struct RealEmbeddingSheet {
    pub f: u64,
    pub level: u32,
    pub m: u64,
    pub bits: usize,
    pub logs: Vec<BigFloat>,
    /// `log_2` of a bound on the absolute error of each entry.
    pub error_log2: f64,
}

impl RealEmbeddingSheet {
    pub fn degree(&self) -> usize {
        self.logs.len()
    }

    pub fn logs_f64(&self) -> Vec<f64> {
        self.logs.iter().map(to_f64).collect()
    }

    /// The sheet of `γ^j η_n`: embedding `(s, k)` reads `(s, k + j)`.
    pub fn shifted(&self, j: usize) -> RealEmbeddingSheet {
        let d = self.logs.len() / 2;
        let logs = (0..2 * d)
            .map(|i| self.logs[(i / d) * d + (i % d + j) % d].clone())
            .collect();
        RealEmbeddingSheet {
            logs,
            ..self.clone()
        }
    }
}

/// Class sums `Σ log(2 sin(π t/m))` in double precision; `ℓ_k` as in
/// [`embed_eta`].
pub fn eta_logs_f64(labels: &ClassLabels) -> Vec<f64> {
    let d = labels.degree;
    let mut acc = vec![0f64; 2 * d];
    for t in 1..=(labels.m - 1) / 2 {
        if let Some((s, j)) = labels.class_of(t) {
            let x = std::f64::consts::PI * t as f64 / labels.m as f64;
            acc[s * d + j] += 2.0 * (2.0 * x.sin()).ln();
        }
    }
    let ell: Vec<f64> = (0..d).map(|j| acc[d + j] - acc[j]).collect();
    ell.iter().copied().chain(ell.iter().map(|x| -x)).collect()
}

/// High-precision conjugates of `η_n` from the sine-product formula.
pub fn embed_eta(
    fd: &FundamentalDiscriminant,
    n: u32,
    bits: usize,
) -> Result<RealEmbeddingSheet, GrasError> {
    if bits < 64 {
        return Err(GrasError::PrecisionTooLow(bits));
    }
    let labels = ClassLabels::new(fd, n);
    let m = labels.m;
    let d = labels.degree;
    let guard = 64 - (m.leading_zeros() as usize) + 32;
    let mut fp = Fp::new(bits + guard);
    // e^{iπ t/m} = big[t / K] · small[t % K]
    let k_step = ((m / 2) as f64).sqrt().ceil().max(1.0) as u64;
    let pi = fp.pi();
    let theta = fp.div(&pi, &fp.int(m as i64));
    let (s1, c1) = fp.sin_cos(&theta);
    let cmul = |fp: &Fp, a: &(BigFloat, BigFloat), b: &(BigFloat, BigFloat)| {
        (
            fp.sub(&fp.mul(&a.0, &b.0), &fp.mul(&a.1, &b.1)),
            fp.add(&fp.mul(&a.0, &b.1), &fp.mul(&a.1, &b.0)),
        )
    };
    // (cos, sin) pairs
    let mut small = Vec::with_capacity(k_step as usize + 1);
    small.push((fp.int(1), fp.int(0)));
    for r in 1..=k_step as usize {
        let next = cmul(&fp, &small[r - 1], &(c1.clone(), s1.clone()));
        small.push(next);
    }
    let nbig = (m / 2) / k_step + 1;
    let mut big = Vec::with_capacity(nbig as usize + 1);
    big.push((fp.int(1), fp.int(0)));
    for q in 1..=nbig as usize {
        let next = cmul(&fp, &big[q - 1], &small[k_step as usize]);
        big.push(next);
    }
    let mut prod = vec![fp.int(1); 2 * d];
    let mut count = vec![0i64; 2 * d];
    for t in 1..=(m - 1) / 2 {
        let Some((s, j)) = labels.class_of(t) else {
            continue;
        };
        let (b, a) = (&big[(t / k_step) as usize], &small[(t % k_step) as usize]);
        let sin = fp.add(&fp.mul(&b.1, &a.0), &fp.mul(&b.0, &a.1));
        let i = s * d + j;
        prod[i] = fp.mul(&prod[i], &sin);
        count[i] += 1;
    }
    let ln2 = fp.ln(&fp.int(2));
    let mut sums = Vec::with_capacity(2 * d);
    for i in 0..2 * d {
        if prod[i].is_zero() || !prod[i].is_positive() {
            return Err(GrasError::PrecisionTooLow(bits));
        }
        let l = fp.ln(&prod[i]);
        let l = fp.add(&l, &fp.mul(&fp.int(count[i]), &ln2));
        sums.push(fp.add(&l, &l));
    }
    let ell: Vec<BigFloat> = (0..d).map(|j| fp.sub(&sums[d + j], &sums[j])).collect();
    let mut logs: Vec<BigFloat> = ell.clone();
    logs.extend(ell.iter().map(|x| x.neg()));
    let ops = (m as f64).log2() + 8.0;
    let scale = logs.iter().map(|x| to_f64(x).abs()).fold(1.0, f64::max).log2();
    Ok(RealEmbeddingSheet {
        f: fd.f,
        level: n,
        m,
        bits,
        logs,
        error_log2: -((bits + guard) as f64) + ops + scale.max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::{class_group_3part, discriminants_in, fundamental_unit, validate_discriminant};

    #[test]
    fn unit_norm() {
        for (f, n) in [(5u64, 0u32), (8, 1), (229, 1), (12, 2), (257, 2)] {
            let fd = validate_discriminant(f as i64).unwrap();
            let sheet = embed_eta(&fd, n, 256).unwrap();
            assert_eq!(sheet.degree(), 2 * 3usize.pow(n));
            let fp = Fp::new(300);
            let total = sheet.logs.iter().fold(fp.int(0), |a, x| fp.add(&a, x));
            assert!(total.is_zero() || super::super::float::log2_abs(&total) < -200.0, "f = {f}");
            // f ≡ 1 (mod 3): η_n has norm 1 down to F_0 as well
            if fd.residue3 == 1 {
                let half = sheet.logs[..sheet.degree() / 2].iter().fold(fp.int(0), |a, x| fp.add(&a, x));
                assert!(super::super::float::log2_abs(&half) < -200.0, "f = {f}");
            }
        }
    }

    #[test]
    fn agrees_with_double_precision() {
        for (f, n) in [(5u64, 1u32), (44, 1), (1129, 2), (61629, 1)] {
            let fd = validate_discriminant(f as i64).unwrap();
            let sheet = embed_eta(&fd, n, 128).unwrap();
            let lo = eta_logs_f64(&ClassLabels::new(&fd, n));
            for (a, b) in sheet.logs_f64().iter().zip(&lo) {
                assert!((a - b).abs() < 1e-7 * (1.0 + b.abs()), "f = {f}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn level_zero_is_a_power_of_the_fundamental_unit() {
        // log η_0 / log ε_0 is an integer whose 3-adic valuation is v_3(h)
        for fd in discriminants_in(5, 2000).filter(|fd| fd.residue3 != 1) {
            let ell = eta_logs_f64(&ClassLabels::new(&fd, 0))[0];
            let q = ell / fundamental_unit(&fd).log_real();
            let k = q.round();
            assert!((q - k).abs() < 1e-6, "f = {}: {q}", fd.f);
            let v = crate::arith::v3(k.abs() as u64);
            assert_eq!(v, class_group_3part(&fd).h3, "f = {}", fd.f);
        }
        let fd = validate_discriminant(5).unwrap();
        let sheet = embed_eta(&fd, 0, 200).unwrap();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((sheet.logs_f64()[0].abs() - 4.0 * golden.ln()).abs() < 1e-12);
    }

    #[test]
    fn galois_shift_matches_recomputation() {
        // γ^j η evaluated at (s, k) is η evaluated at a·c^j; recompute with
        // the class of t·4^j directly
        let fd = validate_discriminant(229).unwrap();
        let labels = ClassLabels::new(&fd, 2);
        let sheet = embed_eta(&fd, 2, 128).unwrap();
        let d = labels.degree;
        let three = 27u64;
        for j in 0..d {
            let shifted = sheet.shifted(j).logs_f64();
            let c = (0..labels.m)
                .find(|&c| c % three == crate::arith::pow_mod(4, j as u64, three) && labels.class_of(c) == Some((0, j)))
                .unwrap();
            let mut acc = vec![0f64; 2 * d];
            for t in 1..labels.m {
                if let Some((s, k)) = labels.class_of(t) {
                    let tc = crate::arith::mul_mod(t, c, labels.m);
                    let x = std::f64::consts::PI * tc as f64 / labels.m as f64;
                    acc[s * d + k] += (2.0 * x.sin()).abs().ln();
                }
            }
            for k in 0..d {
                let want = acc[d + k] - acc[k];
                assert!((shifted[k] - want).abs() < 1e-6 * (1.0 + want.abs()), "j={j} k={k}");
            }
        }
    }
}
