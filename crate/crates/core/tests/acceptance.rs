//! One line per acceptance criterion. The full-range count check (7) only
//! runs when `GREENBERG_LONG_RUN` is set, or reads a finished journal from
//! `GREENBERG_LONG_RUN_JOURNAL`.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use greenberg::driver::{
    aggregate_tables, compute_field, golden_check, parse_golden, read_journal, scan_range, FieldResult,
    GoldenVerdict, LowerRecord, RunConfig,
};
use greenberg::iwasawa::{
    finiteness_lemma, Context, FinitenessWitness, TruncatedLambdaIdeal, TruncatedPolynomial, Variant,
};
use greenberg::quadfield::{class_group_3part, validate_discriminant};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const CRITERION_ONE: &str = "\
61629; T^3, 3; 1; T^3
71049; T^3, 3; 1; T^3
60513; T^3+3, 3T, 9; 2; T^3
76584; T^3+3, 3T, 9; 2; T^3
98105; T^4+3, 3T, 9; 2; T^4
15217; T^4+3, 3T, 9; 2; T^4
80056; T^5+9T+9, 3T^2+18, 27; 3; T^5
";

struct Line {
    id: u8,
    pass: bool,
    detail: String,
}

/// Written to the process stderr directly so the lines survive output
/// capture.
fn emit(text: &str) {
    use std::io::Write;
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{text}");
}

fn report(l: &Line) {
    emit(&format!(
        "criterion {}: {} {}",
        l.id,
        if l.pass { "PASS" } else { "FAIL" },
        l.detail
    ));
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn below_ten_thousand() -> &'static Vec<FieldResult> {
    static CELL: OnceLock<Vec<FieldResult>> = OnceLock::new();
    CELL.get_or_init(|| {
        let cfg = RunConfig {
            f_min: 0,
            f_max: 10_000,
            jobs: jobs(),
            ..RunConfig::default()
        };
        let mut out = Vec::new();
        scan_range(&cfg, &mut |r| out.push(r.clone())).unwrap();
        out
    })
}

fn golden_results() -> &'static Vec<FieldResult> {
    static CELL: OnceLock<Vec<FieldResult>> = OnceLock::new();
    CELL.get_or_init(|| {
        let cfg = RunConfig::default();
        parse_golden(CRITERION_ONE)
            .unwrap()
            .iter()
            .map(|e| compute_field(&validate_discriminant(e.f as i64).unwrap(), &cfg))
            .collect()
    })
}

fn criterion_one() -> Line {
    let expectations = parse_golden(CRITERION_ONE).unwrap();
    let report = golden_check(golden_results(), &expectations);
    let failures: Vec<String> = report
        .entries
        .iter()
        .filter(|(_, v)| !matches!(v, GoldenVerdict::Pass { .. }))
        .map(|(e, v)| format!("{}: {v:?}", e.f))
        .collect();
    Line {
        id: 1,
        pass: report.all_pass() && report.entries.len() == 7,
        detail: format!(
            "{}/{} golden ideals equal{}",
            report.entries.len() - failures.len(),
            report.entries.len(),
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    }
}

fn criterion_two() -> Line {
    let mut checked = 0;
    let mut bad = Vec::new();
    for r in below_ten_thousand().iter().filter(|r| r.residue3 != 1) {
        checked += 1;
        let h3 = class_group_3part(&validate_discriminant(r.f as i64).unwrap()).h3 as u64;
        let level0 = r.level_orders.iter().find(|o| o.0 == 0).map(|o| o.1);
        if !r.is_certified() || level0 != Some(h3) {
            bad.push(format!("f={} C_0={level0:?} h3={h3}", r.f));
        }
    }
    Line {
        id: 2,
        pass: bad.is_empty() && checked > 0,
        detail: format!("{} of {checked} fields f < 10000, f != 1 mod 3 with #C_0 = 3-part of h {}", checked - bad.len(), bad.join(", ")),
    }
}

fn criterion_three() -> Line {
    let mut checked = 0;
    let mut bad = Vec::new();
    for r in below_ten_thousand().iter().filter(|r| r.residue3 == 1) {
        checked += 1;
        let ok = r.ideal().and_then(|j| j.reduce_to_level(1).ok()).is_some_and(|c1| {
            let ctx = c1.context();
            // T is a uniformizer with residue field F_3, so the length is k
            let k = c1.log3_index() as usize;
            let tk = TruncatedPolynomial::from_wide((0..=k).map(|i| u64::from(i == k)).collect(), ctx);
            TruncatedLambdaIdeal::from_generators(&[tk], ctx).unwrap() == c1
        });
        if !ok {
            bad.push(r.f.to_string());
        }
    }
    Line {
        id: 3,
        pass: bad.is_empty() && checked > 0,
        detail: format!(
            "{} of {checked} fields f < 10000, f = 1 mod 3 with C_1 = L/(T^2+3T+3, T^k) {}",
            checked - bad.len(),
            bad.join(", ")
        ),
    }
}

fn v3(x: i64) -> u32 {
    let mut x = x.unsigned_abs();
    let mut v = 0;
    while x % 3 == 0 {
        x /= 3;
        v += 1;
    }
    v
}

fn criterion_four() -> Line {
    let mut checked = 0;
    let mut skipped_a_zero = 0;
    let mut bad = Vec::new();
    for r in below_ten_thousand().iter().chain(golden_results()) {
        let (Some((a, b)), Some(n)) = (r.linear_form(), r.n_stab) else { continue };
        let expected = if r.residue3 == 1 {
            v3(b)
        } else if a == 0 {
            skipped_a_zero += 1;
            continue;
        } else {
            v3(b) - v3(a)
        };
        checked += 1;
        if n != expected {
            bad.push(format!("f={} (T-{a},{b}) n={n}", r.f));
        }
    }
    Line {
        id: 4,
        pass: bad.is_empty() && checked > 0,
        detail: format!(
            "{} of {checked} ideals (T-a,b) obey the stabilization law ({skipped_a_zero} with a = 0 have n = 0) {}",
            checked - bad.len(),
            bad.join(", ")
        ),
    }
}

/// `log_3 #M/ω_n M` for `M = Λ/(3^e, g)`.
fn quotient_log3(g: &[i64], e: u32, n: u32) -> u64 {
    TruncatedLambdaIdeal::from_int_polys(&[g.to_vec()], Context::new(e, n, Variant::Omega)).log3_index()
}

/// `ω_n M = 0`, i.e. `ω_n ∈ (3^e, g) + (ω_{n+1})`.
fn killed_by_omega(g: &[i64], e: u32, n: u32) -> bool {
    let ideal = TruncatedLambdaIdeal::from_int_polys(&[g.to_vec()], Context::new(e, n + 1, Variant::Omega));
    ideal.order_of_one_plus_t().is_ok_and(|k| k <= n)
}

fn criterion_five() -> Line {
    let mut rng = StdRng::seed_from_u64(0x3_1989);
    let (mut cases, mut premise, mut violations) = (0, 0, Vec::new());
    for _ in 0..400 {
        let e = rng.gen_range(1..=2u32);
        let deg = rng.gen_range(0..=9usize);
        let q = 3i64.pow(e);
        let mut g: Vec<i64> = (0..=deg).map(|_| rng.gen_range(0..q)).collect();
        if g.iter().all(|c| c % 3 == 0) {
            g[rng.gen_range(0..=deg)] += 1;
        }
        let orders: Vec<u64> = (0..=3).map(|n| quotient_log3(&g, e, n)).collect();
        for m in 0..=3u32 {
            for n in m..=3u32 {
                let w = FinitenessWitness::new(m, n, orders[m as usize] as u32, orders[n as usize] as u32)
                    .expect("quotient orders grow with the level");
                cases += 1;
                if finiteness_lemma(&w) {
                    premise += 1;
                    if !killed_by_omega(&g, e, n) {
                        violations.push(format!("g={g:?} e={e} {w:?}"));
                    }
                }
            }
        }
    }
    Line {
        id: 5,
        pass: violations.is_empty() && premise > 0,
        detail: format!(
            "{cases} witnesses on L/(3^e, g), premise held in {premise}, all with w_n M = 0 {}",
            violations.join(", ")
        ),
    }
}

fn criterion_six() -> Line {
    let mut by_route: BTreeMap<&str, usize> = BTreeMap::new();
    let mut bad = Vec::new();
    for r in golden_results().iter().chain(below_ten_thousand()) {
        let Some(c) = &r.certification else {
            bad.push(r.f);
            continue;
        };
        let verified = matches!(c.lower, LowerRecord::Verified { level, .. } if level <= 2);
        let lemma = c.lemma.is_some_and(|w| finiteness_lemma(&w));
        let route = match (verified, lemma) {
            (true, true) => "verified+lemma",
            (true, false) => "verified",
            (false, true) => "lemma",
            (false, false) => {
                bad.push(r.f);
                "upper-only"
            }
        };
        *by_route.entry(route).or_insert(0) += 1;
    }
    Line {
        id: 6,
        pass: bad.is_empty(),
        detail: format!("certification routes {by_route:?}; uncertified {bad:?}"),
    }
}

fn criterion_seven() -> Option<Line> {
    let results: Vec<FieldResult> = if let Ok(path) = std::env::var("GREENBERG_LONG_RUN_JOURNAL") {
        read_journal(path.as_ref()).unwrap().results
    } else if std::env::var_os("GREENBERG_LONG_RUN").is_some() {
        let cfg = RunConfig {
            f_min: 0,
            f_max: 100_000,
            jobs: jobs(),
            ..RunConfig::default()
        };
        let mut out = Vec::new();
        scan_range(&cfg, &mut |r| out.push(r.clone())).unwrap();
        out
    } else {
        return None;
    };
    let t = aggregate_tables(&results);
    let fields: u64 = t.classes.iter().map(|c| c.fields).sum();
    let nonzero: u64 = t.classes.iter().map(|c| c.nonzero()).sum();
    let maximal: u64 = t.classes.iter().map(|c| c.maximal).sum();
    let unresolved: u64 = t.classes.iter().map(|c| c.unresolved).sum();
    let per_class: Vec<(u64, u64)> = [0u8, 2, 1]
        .iter()
        .map(|&r| (t.class(r).nonzero(), t.class(r).maximal))
        .collect();
    let pass = (fields, nonzero, maximal, unresolved) == (30394, 3359, 2118, 0)
        && per_class == [(769, 513), (1250, 781), (1340, 824)];
    Some(Line {
        id: 7,
        pass,
        detail: format!(
            "fields {fields}, nonzero {nonzero}, J = (3,T) {maximal}, unresolved {unresolved}, per class (0,2,1) {per_class:?}"
        ),
    })
}

#[test]
fn acceptance() {
    let lines = [
        criterion_one(),
        criterion_two(),
        criterion_three(),
        criterion_four(),
        criterion_five(),
        criterion_six(),
    ];
    for l in &lines {
        report(l);
    }
    let seven = criterion_seven();
    match &seven {
        Some(l) => report(l),
        None => emit(
            "criterion 7: SKIPPED full range f < 100000 is opt-in (GREENBERG_LONG_RUN=1 or GREENBERG_LONG_RUN_JOURNAL=path); desk substitute is criteria 1 to 4",
        ),
    }
    let failed: Vec<u8> = lines.iter().chain(&seven).filter(|l| !l.pass).map(|l| l.id).collect();
    assert!(failed.is_empty(), "failed criteria {failed:?}");
}
