use serde::Serialize;

use super::field::FieldResult;
use super::DriverError;
use crate::annihilator::Orientation;
use crate::iwasawa::{invert_generator, TruncatedLambdaIdeal};

/// One expectation: `f; gen1, gen2, ...; n; k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoldenEntry {
    pub f: u64,
    /// Lowest degree first.
    pub generators: Vec<Vec<i64>>,
    pub n: u32,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GoldenVerdict {
    Pass { orientation: Orientation },
    Fail { reason: String },
    Missing,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoldenReport {
    pub entries: Vec<(GoldenEntry, GoldenVerdict)>,
}

impl GoldenReport {
    pub fn all_pass(&self) -> bool {
        self.entries
            .iter()
            .all(|(_, v)| matches!(v, GoldenVerdict::Pass { .. }))
    }
}

/// Parses `T^3+3`, `3T^2-9`, `-T+12`, `27`: integer coefficients, variable
/// `T`, powers with `^`. Returns coefficients lowest degree first.
pub fn parse_poly(s: &str) -> Result<Vec<i64>, String> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty polynomial".to_string());
    }
    let mut coeffs: Vec<i64> = Vec::new();
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let mut sign = 1i64;
        if bytes[i] == b'+' || bytes[i] == b'-' {
            if bytes[i] == b'-' {
                sign = -1;
            }
            i += 1;
        } else if i > 0 {
            return Err(format!("expected sign at {i} in {s:?}"));
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let coeff = if i > start {
            s[start..i].parse::<i64>().map_err(|e| e.to_string())?
        } else {
            1
        };
        let mut deg = 0usize;
        if i < bytes.len() && bytes[i] == b'T' {
            i += 1;
            deg = 1;
            if i < bytes.len() && bytes[i] == b'^' {
                i += 1;
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                deg = s[start..i]
                    .parse()
                    .map_err(|_| format!("bad exponent in {s:?}"))?;
            }
        } else if i == start {
            return Err(format!("dangling sign in {s:?}"));
        }
        if coeffs.len() <= deg {
            coeffs.resize(deg + 1, 0);
        }
        coeffs[deg] += sign * coeff;
    }
    while coeffs.len() > 1 && coeffs.last() == Some(&0) {
        coeffs.pop();
    }
    Ok(coeffs)
}

fn parse_k(s: &str) -> Result<usize, String> {
    let s = s.trim();
    match s {
        "T" => Ok(1),
        _ => s
            .strip_prefix("T^")
            .unwrap_or(s)
            .parse()
            .map_err(|_| format!("bad T^k column {s:?}")),
    }
}

/// Reads an expectations file. Blank lines and lines starting with `#` are
/// skipped.
pub fn parse_golden(text: &str) -> Result<Vec<GoldenEntry>, DriverError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| DriverError::Golden { line: i + 1, msg };
        let parts: Vec<&str> = line.split(';').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(err(format!("expected 4 fields, found {}", parts.len())));
        }
        let f = parts[0].parse().map_err(|_| err(format!("bad f {:?}", parts[0])))?;
        let gens = parts[1]
            .trim_start_matches('(')
            .trim_end_matches(')')
            .split(',')
            .map(parse_poly)
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let n = parts[2].parse().map_err(|_| err(format!("bad n {:?}", parts[2])))?;
        let k = parse_k(parts[3]).map_err(err)?;
        out.push(GoldenEntry {
            f,
            generators: gens,
            n,
            k,
        });
    }
    Ok(out)
}

fn other(o: Orientation) -> Orientation {
    match o {
        Orientation::Gamma => Orientation::GammaInv,
        Orientation::GammaInv => Orientation::Gamma,
    }
}

fn check_one(r: &FieldResult, e: &GoldenEntry) -> GoldenVerdict {
    let fail = |reason: String| GoldenVerdict::Fail { reason };
    if !r.is_certified() {
        return fail(format!("unresolved: {}", r.reason.as_deref().unwrap_or("")));
    }
    let (Some(ideal), Some(ctx), Some(orientation)) = (r.ideal(), r.context(), r.orientation) else {
        return fail("record has no ideal".to_string());
    };
    if r.n_stab != Some(e.n) {
        return fail(format!("n_stab {:?}, expected {}", r.n_stab, e.n));
    }
    if r.tk != Some(e.k) {
        return fail(format!("T^k column {:?}, expected {}", r.tk, e.k));
    }
    let expected = TruncatedLambdaIdeal::from_int_polys(&e.generators, ctx);
    if ideal == expected {
        GoldenVerdict::Pass { orientation }
    } else if invert_generator(&ideal) == expected {
        GoldenVerdict::Pass {
            orientation: other(orientation),
        }
    } else {
        fail(format!("ideal {} differs from {}", ideal, expected))
    }
}

/// Compares each expectation with the result for the same `f`: ideal
/// equality of canonical forms under either generator orientation, `n_stab`
/// and the `T^k` column.
pub fn golden_check(results: &[FieldResult], expectations: &[GoldenEntry]) -> GoldenReport {
    let entries = expectations
        .iter()
        .map(|e| {
            let verdict = match results.iter().find(|r| r.f == e.f) {
                None => GoldenVerdict::Missing,
                Some(r) => check_one(r, e),
            };
            (e.clone(), verdict)
        })
        .collect();
    GoldenReport { entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::{compute_field, RunConfig};
    use crate::quadfield::validate_discriminant;
    use proptest::prelude::*;

    #[test]
    fn polynomial_syntax() {
        assert_eq!(parse_poly("T^3+3").unwrap(), vec![3, 0, 0, 1]);
        assert_eq!(parse_poly("3T^2 + 18").unwrap(), vec![18, 0, 3]);
        assert_eq!(parse_poly("T-996").unwrap(), vec![-996, 1]);
        assert_eq!(parse_poly("-T^2+T").unwrap(), vec![0, 1, -1]);
        assert_eq!(parse_poly("2187").unwrap(), vec![2187]);
        assert!(parse_poly("3T^").is_err());
        assert!(parse_poly("T+").is_err());
        assert!(parse_poly("").is_err());
        assert!(parse_poly("3x").is_err());
    }

    proptest! {
        #[test]
        fn format_then_parse(c in proptest::collection::vec(-50i64..50, 1..8)) {
            let big: Vec<_> = c.iter().map(|&x| x.into()).collect();
            let text = crate::iwasawa::format_poly(&big);
            let mut expect = c.clone();
            while expect.len() > 1 && expect.last() == Some(&0) {
                expect.pop();
            }
            prop_assert_eq!(parse_poly(&text).unwrap(), expect);
        }
    }

    #[test]
    fn file_format() {
        let text = "# exotic\n31989; T-996, 2187; 6; T\n\n47633; (T^2-9, 3T-90, 243); 4; T^2\n";
        let g = parse_golden(text).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g[0].generators, vec![vec![-996, 1], vec![2187]]);
        assert_eq!((g[1].n, g[1].k), (4, 2));
        assert!(parse_golden("5; T; 0").is_err());
    }

    #[test]
    fn either_orientation_is_accepted() {
        let fd = validate_discriminant(60513).unwrap();
        let r = compute_field(&fd, &RunConfig::default());
        let inv = parse_golden("60513; T^3+3, 3T, 9; 2; T^3").unwrap();
        let fwd = parse_golden("60513; T^3-3, 3T, 9; 2; T^3").unwrap();
        let wrong = parse_golden("60513; T^3+3, 3T, 9; 1; T^3").unwrap();
        let pass = |g: &[GoldenEntry]| golden_check(std::slice::from_ref(&r), g).entries[0].1.clone();
        assert_eq!(pass(&inv), GoldenVerdict::Pass { orientation: Orientation::GammaInv });
        assert_eq!(pass(&fwd), GoldenVerdict::Pass { orientation: Orientation::Gamma });
        assert!(matches!(pass(&wrong), GoldenVerdict::Fail { .. }));
        let missing = parse_golden("61629; T^3, 3; 1; T^3").unwrap();
        assert_eq!(pass(&missing), GoldenVerdict::Missing);
    }
}
