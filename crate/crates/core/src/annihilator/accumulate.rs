use serde::{Deserialize, Serialize};

use super::eta::{eta_image, AnnihilatorElement, ClassLabels, Orientation};
use super::primes::PrimeStream;
use super::AnnihilatorError;
use crate::iwasawa::{Context, IwasawaError, TruncatedLambdaIdeal};
use crate::quadfield::FundamentalDiscriminant;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaturationReport {
    pub primes_used: usize,
    pub stable_count: usize,
    pub saturated: bool,
    pub last_prime: u64,
}

/// Folds elements into `(3^e, ω) + (α_1, α_2, …)` until `window` consecutive
/// elements leave the ideal unchanged, or the ideal becomes the unit ideal.
/// At most `budget` elements are consumed.
pub fn accumulate_ideal<I>(
    ctx: Context,
    elements: I,
    window: usize,
    budget: usize,
) -> Result<(TruncatedLambdaIdeal, SaturationReport), AnnihilatorError>
where
    I: IntoIterator<Item = Result<AnnihilatorElement, AnnihilatorError>>,
{
    accumulate_from(TruncatedLambdaIdeal::zero(ctx), elements, window, budget)
}

fn accumulate_from<I>(
    mut ideal: TruncatedLambdaIdeal,
    elements: I,
    window: usize,
    budget: usize,
) -> Result<(TruncatedLambdaIdeal, SaturationReport), AnnihilatorError>
where
    I: IntoIterator<Item = Result<AnnihilatorElement, AnnihilatorError>>,
{
    let mut report = SaturationReport {
        primes_used: 0,
        stable_count: 0,
        saturated: false,
        last_prime: 0,
    };
    if ideal.is_unit() {
        report.saturated = true;
        return Ok((ideal, report));
    }
    for el in elements.into_iter().take(budget) {
        let el = el?;
        report.primes_used += 1;
        report.last_prime = el.source_prime;
        let grew = ideal
            .absorb(&el.alpha)
            .unwrap_or_else(|e: IwasawaError| panic!("{e}"));
        report.stable_count = if grew { 0 } else { report.stable_count + 1 };
        if ideal.is_unit() || report.stable_count >= window {
            report.saturated = true;
            break;
        }
    }
    Ok((ideal, report))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpperBoundConfig {
    pub exponent_start: u32,
    pub exponent_max: u32,
    pub window: usize,
    pub budget: usize,
    /// Largest multiplier `k` tried in `r = k·3^e f' + 1`.
    pub horizon: u64,
    pub orientation: Orientation,
}

impl Default for UpperBoundConfig {
    fn default() -> Self {
        UpperBoundConfig {
            exponent_start: 2,
            exponent_max: 16,
            window: 5,
            budget: 64,
            horizon: 1 << 40,
            orientation: Orientation::Gamma,
        }
    }
}

/// A resumable accumulation at one level and exponent, fed by the ascending
/// auxiliary primes of that exponent.
pub struct UpperBound {
    pub ideal: TruncatedLambdaIdeal,
    pub report: SaturationReport,
    pub orientation: Orientation,
    labels: ClassLabels,
    stream: PrimeStream,
}

impl UpperBound {
    fn start(
        fd: &FundamentalDiscriminant,
        labels: ClassLabels,
        e: u32,
        cfg: &UpperBoundConfig,
    ) -> Self {
        let ctx = Context::new(e, labels.level, labels.variant);
        UpperBound {
            ideal: TruncatedLambdaIdeal::zero(ctx),
            report: SaturationReport {
                primes_used: 0,
                stable_count: 0,
                saturated: false,
                last_prime: 0,
            },
            orientation: cfg.orientation,
            stream: PrimeStream::new(fd, e, cfg.horizon, 0),
            labels,
        }
    }

    /// Consumes further primes until `window` consecutive ones leave the
    /// ideal unchanged (counted afresh), or `budget` more have been used.
    pub fn extend(&mut self, window: usize, budget: usize) -> Result<(), AnnihilatorError> {
        let (labels, orientation) = (&self.labels, self.orientation);
        let elements = (&mut self.stream).map(|p| p.map(|p| eta_image(labels, &p, orientation)));
        let (ideal, rep) = accumulate_from(self.ideal.clone(), elements, window, budget)?;
        self.ideal = ideal;
        self.report.primes_used += rep.primes_used;
        self.report.stable_count = rep.stable_count;
        self.report.saturated = rep.saturated;
        if rep.last_prime != 0 {
            self.report.last_prime = rep.last_prime;
        }
        Ok(())
    }

    pub fn exponent(&self) -> u32 {
        self.ideal.context().exponent
    }
}

impl std::fmt::Debug for UpperBound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UpperBound")
            .field("ideal", &self.ideal.to_string())
            .field("report", &self.report)
            .finish()
    }
}

/// A subset of `J + (3^e, ω_n)` (`ω'_n` when `f ≡ 1 mod 3`), with `e` raised
/// until `3^{e-1}` already lies in the computed ideal.
pub fn upper_bound(
    fd: &FundamentalDiscriminant,
    n: u32,
    cfg: &UpperBoundConfig,
) -> Result<UpperBound, AnnihilatorError> {
    let mut e = cfg.exponent_start.max(n + 1).max(2);
    while e <= cfg.exponent_max {
        let mut ub = UpperBound::start(fd, ClassLabels::new(fd, n), e, cfg);
        ub.extend(cfg.window, cfg.budget)?;
        if ub.ideal.exponent_sufficient() {
            return Ok(ub);
        }
        e += 1;
    }
    Err(AnnihilatorError::ScheduleExhausted {
        exponent: cfg.exponent_max,
        level: n,
    })
}
