use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{LowerMode, RunConfig};
use crate::annihilator::{upper_bound, AnnihilatorError, Orientation, UpperBound, UpperBoundConfig};
use crate::gras::{verify_ideal, GrasConfig, LowerBound};
use crate::iwasawa::{
    finiteness_lemma, stabilization_check, Context, FinitenessWitness, TruncatedLambdaIdeal,
    Variant,
};
use crate::quadfield::FundamentalDiscriminant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Certified,
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpperRecord {
    pub primes_used: usize,
    pub window: usize,
    pub window_met: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LowerRecord {
    Verified { level: u32, log3_order: u64 },
    Assumed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certification {
    pub upper: UpperRecord,
    pub lower: LowerRecord,
    /// `None` when the lemma was not needed or could not be applied.
    pub lemma: Option<FinitenessWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timings {
    pub upper_ms: u64,
    pub lower_ms: u64,
}

/// One journal record. `generators` is the reduced basis of `J` in the ring
/// `(Z/3^exponent)[T]/(ω_{n_stab+1})` (`ω'` for the primed variant), lowest
/// degree first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldResult {
    pub f: u64,
    pub residue3: u8,
    pub variant: Variant,
    pub outcome: Outcome,
    pub orientation: Option<Orientation>,
    pub exponent: Option<u32>,
    pub generators: Option<Vec<Vec<i64>>>,
    pub n_stab: Option<u32>,
    pub tk: Option<usize>,
    pub order_log3: Option<u64>,
    /// `(n, log_3 #C_n)` for every level up to `n_stab`.
    pub level_orders: Vec<(u32, u64)>,
    pub certification: Option<Certification>,
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl FieldResult {
    fn unresolved(fd: &FundamentalDiscriminant, reason: String) -> Self {
        FieldResult {
            f: fd.f,
            residue3: fd.residue3,
            variant: variant_of(fd),
            outcome: Outcome::Unresolved,
            orientation: None,
            exponent: None,
            generators: None,
            n_stab: None,
            tk: None,
            order_log3: None,
            level_orders: Vec::new(),
            certification: None,
            reason: Some(reason),
            timings: None,
        }
    }

    pub fn is_certified(&self) -> bool {
        self.outcome == Outcome::Certified
    }

    /// The ring the generators live in.
    pub fn context(&self) -> Option<Context> {
        Some(Context::new(self.exponent?, self.n_stab? + 1, self.variant))
    }

    pub fn ideal(&self) -> Option<TruncatedLambdaIdeal> {
        Some(TruncatedLambdaIdeal::from_int_polys(self.generators.as_ref()?, self.context()?))
    }

    /// `C(f) = 0`.
    pub fn is_trivial(&self) -> bool {
        self.order_log3 == Some(0)
    }

    /// `J = (3, T)`.
    pub fn is_maximal(&self) -> bool {
        self.order_log3 == Some(1) && self.tk == Some(1)
    }

    /// `(a, b)` when `J = (T - a, b)`.
    pub fn linear_form(&self) -> Option<(i64, i64)> {
        let gens = self.generators.as_ref()?;
        if gens.len() != 2 {
            return None;
        }
        let lin = gens.iter().find(|g| g.len() == 2 && g[1] == 1)?;
        let cst = gens.iter().find(|g| g.len() == 1)?;
        Some((-lin[0], cst[0]))
    }

    pub fn generators_display(&self) -> String {
        self.ideal().map_or_else(|| "-".to_string(), |j| j.to_string())
    }
}

/// Progress of the pipeline, for verbose single-field runs.
#[derive(Clone, Debug)]
pub enum TraceEvent {
    Upper {
        level: u32,
        exponent: u32,
        primes_used: usize,
        ideal: String,
    },
    Stabilized {
        level: u32,
    },
    Lower {
        level: u32,
        result: LowerBound,
    },
    Lemma {
        witness: FinitenessWitness,
        holds: bool,
    },
    Retry {
        orientation: Orientation,
        window: usize,
        reason: String,
    },
}

pub fn variant_of(fd: &FundamentalDiscriminant) -> Variant {
    if fd.residue3 == 1 {
        Variant::OmegaPrime
    } else {
        Variant::Omega
    }
}

pub fn compute_field(fd: &FundamentalDiscriminant, cfg: &RunConfig) -> FieldResult {
    compute_field_traced(fd, cfg, &mut |_| {})
}

/// Runs the level loop until `J + (ω_n) = J + (ω_{n+1})`, then certifies
/// the result by a verified lower bound and the finiteness lemma. A refuted
/// lower bound means too few auxiliary primes were used; the loop is rerun
/// with a doubled window.
pub fn compute_field_traced(
    fd: &FundamentalDiscriminant,
    cfg: &RunConfig,
    trace: &mut dyn FnMut(TraceEvent),
) -> FieldResult {
    let mut last = None;
    for &orientation in cfg.orientation.candidates() {
        let mut window = cfg.window;
        let mut budget = cfg.primes;
        for attempt in 0..=cfg.retries {
            let started = Instant::now();
            let attempt_result = Attempt {
                fd,
                cfg,
                orientation,
                ub: UpperBoundConfig {
                    exponent_start: cfg.exp_start,
                    exponent_max: cfg.exp_max,
                    window,
                    budget,
                    orientation,
                    ..UpperBoundConfig::default()
                },
                started,
            }
            .run(trace);
            match attempt_result {
                Ok(r) => return r,
                Err(Failure::Refuted(reason)) if attempt < cfg.retries => {
                    window *= 2;
                    budget *= 2;
                    trace(TraceEvent::Retry {
                        orientation,
                        window,
                        reason,
                    });
                }
                Err(f) => {
                    last = Some(f.reason());
                    break;
                }
            }
        }
    }
    FieldResult::unresolved(fd, last.unwrap_or_else(|| "no orientation tried".to_string()))
}

enum Failure {
    Refuted(String),
    Other(String),
}

impl Failure {
    fn reason(self) -> String {
        match self {
            Failure::Refuted(s) => format!("upper bound refuted after all retries: {s}"),
            Failure::Other(s) => s,
        }
    }
}

impl From<AnnihilatorError> for Failure {
    fn from(e: AnnihilatorError) -> Self {
        Failure::Other(e.to_string())
    }
}

struct Attempt<'a> {
    fd: &'a FundamentalDiscriminant,
    cfg: &'a RunConfig,
    orientation: Orientation,
    ub: UpperBoundConfig,
    started: Instant,
}

impl Attempt<'_> {
    fn bound(&self, n: u32, e_min: u32, trace: &mut dyn FnMut(TraceEvent)) -> Result<UpperBound, Failure> {
        let cfg = UpperBoundConfig {
            exponent_start: self.ub.exponent_start.max(e_min),
            ..self.ub
        };
        let u = upper_bound(self.fd, n, &cfg)?;
        trace(TraceEvent::Upper {
            level: n,
            exponent: u.exponent(),
            primes_used: u.report.primes_used,
            ideal: u.ideal.to_string(),
        });
        Ok(u)
    }

    fn run(&self, trace: &mut dyn FnMut(TraceEvent)) -> Result<FieldResult, Failure> {
        let start = u32::from(self.fd.residue3 == 1);
        let mut n = start;
        let mut lower = self.bound(n, 0, trace)?;
        let upper = loop {
            if n > self.cfg.level_max {
                return Err(Failure::Other(format!(
                    "no stabilization up to level {}",
                    self.cfg.level_max
                )));
            }
            let mut upper = self.bound(n + 1, lower.exponent(), trace)?;
            while upper.exponent() != lower.exponent() {
                let e = upper.exponent().max(lower.exponent());
                if lower.exponent() < e {
                    lower = self.bound(n, e, trace)?;
                }
                if upper.exponent() < e {
                    upper = self.bound(n + 1, e, trace)?;
                }
            }
            let stable = stabilization_check(&lower.ideal, &upper.ideal)
                .map_err(|e| Failure::Other(e.to_string()))?;
            if stable {
                break upper;
            }
            n += 1;
            lower = upper;
        };
        trace(TraceEvent::Stabilized { level: n });
        let upper_ms = self.started.elapsed().as_millis() as u64;
        let j = &upper.ideal;
        let b = j.log3_index();
        let orders: Vec<(u32, u64)> = (start..=n)
            .map(|k| Ok((k, j.reduce_to_level(k)?.log3_index())))
            .collect::<Result<_, crate::iwasawa::IwasawaError>>()
            .map_err(|e| Failure::Other(e.to_string()))?;

        let lower_started = Instant::now();
        let (lower_rec, lemma) = self.certify(n, j, b, trace)?;
        let lower_ms = lower_started.elapsed().as_millis() as u64;
        if !matches!(lower_rec, LowerRecord::Verified { .. }) && lemma.is_none() {
            return Err(Failure::Other("no lower bound route certifies finiteness".to_string()));
        }
        Ok(FieldResult {
            f: self.fd.f,
            residue3: self.fd.residue3,
            variant: variant_of(self.fd),
            outcome: Outcome::Certified,
            orientation: Some(self.orientation),
            exponent: Some(j.context().exponent),
            generators: Some(j.generator_polys()),
            n_stab: Some(n),
            tk: Some(j.tk_invariant()),
            order_log3: Some(b),
            level_orders: orders,
            certification: Some(Certification {
                upper: UpperRecord {
                    primes_used: upper.report.primes_used,
                    window: self.ub.window,
                    window_met: upper.report.saturated && lower.report.saturated,
                },
                lower: lower_rec,
                lemma,
            }),
            reason: None,
            timings: self.cfg.timings.then_some(Timings { upper_ms, lower_ms }),
        })
    }

    /// A lower bound at some level `m ≤ n` and, where possible, a lemma
    /// witness pairing it with an upper bound at a level `N > m`.
    fn certify(
        &self,
        n: u32,
        j: &TruncatedLambdaIdeal,
        b: u64,
        trace: &mut dyn FnMut(TraceEvent),
    ) -> Result<(LowerRecord, Option<FinitenessWitness>), Failure> {
        let start = u32::from(self.fd.residue3 == 1);
        let gras = GrasConfig {
            level_cap: self.cfg.lower_level_cap,
            min_bits: self.cfg.bits,
            max_bits: self.cfg.max_bits,
        };
        let mut verified = None;
        if self.cfg.verify_lower != LowerMode::None {
            let top = n.min(self.cfg.lower_level_cap).max(start);
            for m in (start..=top).rev() {
                let um = j.reduce_to_level(m).map_err(|e| Failure::Other(e.to_string()))?;
                let lb = verify_ideal(self.fd, &um, self.orientation, &gras);
                trace(TraceEvent::Lower {
                    level: m,
                    result: lb.clone(),
                });
                match lb {
                    LowerBound::Verified { level, log3_order } => {
                        verified = Some((level, log3_order));
                        break;
                    }
                    LowerBound::Refuted { witness, .. } => {
                        return Err(Failure::Refuted(format!(
                            "level {m}: {:?} is not a 3^{}-th power",
                            witness.exponents, witness.power_log3
                        )));
                    }
                    LowerBound::Inconclusive { .. } => {}
                }
            }
        }
        let (m, a) = match verified {
            Some(v) => v,
            None if self.cfg.verify_lower == LowerMode::Gras => {
                return Err(Failure::Other("gras verification inconclusive at every level".to_string()))
            }
            // C_0 ≥ 1, and for the primed variant C_0 = 0 outright
            None => (0, 0),
        };
        let lower = match verified {
            Some(_) => LowerRecord::Verified { level: m, log3_order: a },
            None => LowerRecord::Assumed,
        };
        let lemma = self.lemma_witness(m, a, n, b, trace)?;
        Ok((lower, lemma))
    }

    fn lemma_witness(
        &self,
        m: u32,
        a: u64,
        n: u32,
        b: u64,
        trace: &mut dyn FnMut(TraceEvent),
    ) -> Result<Option<FinitenessWitness>, Failure> {
        let cap = self.cfg.level_max + 2;
        let (mut level, mut order) = (n + 1, b);
        loop {
            let w = FinitenessWitness::new(m, level, a as u32, order as u32);
            let Some(w) = w else { return Ok(None) };
            let holds = finiteness_lemma(&w);
            trace(TraceEvent::Lemma { witness: w, holds });
            if holds {
                return Ok(Some(w));
            }
            let next = m + (order - a) as u32 + 1;
            if next <= level || next > cap {
                return Ok(None);
            }
            let u = self.bound(next, 0, trace)?;
            level = next;
            order = u.ideal.log3_index();
        }
    }
}
