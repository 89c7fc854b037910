use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use greenberg::driver::{
    aggregate_tables, compute_field_traced, golden_check, parse_golden, read_journal, scan_range, DriverError,
    FieldResult, GoldenVerdict, LowerMode, OrientationChoice, RunConfig, TraceEvent,
};
use greenberg::quadfield::validate_discriminant;

#[derive(Parser)]
#[command(name = "greenberg", version, about = "Iwasawa modules C(f) of real quadratic fields at p = 3")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute every fundamental discriminant in [min, max) into a journal.
    Scan {
        #[arg(long)]
        min: u64,
        #[arg(long)]
        max: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        resume: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        opts: Opts,
    },
    /// Aggregate a journal into tables by level of stabilization and T^k.
    Table {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Compare a journal with an expectations file `f; gens; n; k`.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        golden: PathBuf,
    },
    /// One discriminant with a trace of every step.
    Field {
        #[arg(long)]
        f: i64,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Lower {
    Auto,
    Gras,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum Orient {
    Auto,
    Gamma,
    GammaInv,
}

#[derive(Args)]
struct Opts {
    #[arg(long, default_value_t = 7)]
    level_max: u32,
    #[arg(long, default_value_t = 2)]
    exp_start: u32,
    #[arg(long, default_value_t = 16)]
    exp_max: u32,
    #[arg(long, default_value_t = 64)]
    primes: usize,
    #[arg(long, default_value_t = 5)]
    stable_window: usize,
    #[arg(long, default_value_t = 4)]
    retries: u32,
    #[arg(long, default_value_t = 512)]
    bits: usize,
    #[arg(long, default_value_t = 1 << 18)]
    max_bits: usize,
    /// Highest level at which lower bounds are attempted.
    #[arg(long, default_value_t = 2)]
    lower_level_cap: u32,
    #[arg(long, value_enum, default_value_t = Lower::Auto)]
    verify_lower: Lower,
    #[arg(long, value_enum, default_value_t = Orient::GammaInv)]
    orientation: Orient,
    /// Record wall-clock timings in each record.
    #[arg(long)]
    timings: bool,
}

impl Opts {
    fn config(&self) -> RunConfig {
        RunConfig {
            level_max: self.level_max,
            exp_start: self.exp_start,
            exp_max: self.exp_max,
            primes: self.primes,
            window: self.stable_window,
            retries: self.retries,
            bits: self.bits,
            max_bits: self.max_bits,
            lower_level_cap: self.lower_level_cap,
            verify_lower: match self.verify_lower {
                Lower::Auto => LowerMode::Auto,
                Lower::Gras => LowerMode::Gras,
                Lower::None => LowerMode::None,
            },
            orientation: match self.orientation {
                Orient::Auto => OrientationChoice::Auto,
                Orient::Gamma => OrientationChoice::Gamma,
                Orient::GammaInv => OrientationChoice::GammaInv,
            },
            timings: self.timings,
            ..RunConfig::default()
        }
    }
}

fn summary_line(r: &FieldResult) -> String {
    match (r.is_certified(), r.n_stab, r.tk) {
        (true, Some(n), Some(k)) => format!(
            "{:>6}  {}  n={n}  {}  #C=3^{}",
            r.f,
            r.generators_display(),
            if k == 1 { "T".to_string() } else { format!("T^{k}") },
            r.order_log3.unwrap_or(0)
        ),
        _ => format!("{:>6}  UNRESOLVED  {}", r.f, r.reason.as_deref().unwrap_or("")),
    }
}

fn run(cli: Cli) -> Result<ExitCode, DriverError> {
    let status = |unresolved: bool| if unresolved { ExitCode::from(2) } else { ExitCode::SUCCESS };
    match cli.command {
        Command::Scan {
            min,
            max,
            out,
            resume,
            jobs,
            opts,
        } => {
            let cfg = RunConfig {
                f_min: min,
                f_max: max,
                out,
                resume,
                jobs,
                ..opts.config()
            };
            let summary = scan_range(&cfg, &mut |r| {
                if !r.is_trivial() {
                    println!("{}", summary_line(r));
                }
            })?;
            eprintln!(
                "fields {}, certified {}, unresolved {}, resumed {}",
                summary.fields, summary.certified, summary.unresolved, summary.resumed
            );
            Ok(status(summary.unresolved > 0))
        }
        Command::Table { input } => {
            let journal = read_journal(&input)?;
            let tables = aggregate_tables(&journal.results);
            print!("{}", tables.render());
            Ok(status(tables.classes.iter().any(|c| c.unresolved > 0)))
        }
        Command::Check { input, golden } => {
            let journal = read_journal(&input)?;
            let expectations = parse_golden(&std::fs::read_to_string(golden)?)?;
            let report = golden_check(&journal.results, &expectations);
            for (e, v) in &report.entries {
                match v {
                    GoldenVerdict::Pass { orientation } => println!("{:>6}  PASS  ({orientation})", e.f),
                    GoldenVerdict::Fail { reason } => println!("{:>6}  FAIL  {reason}", e.f),
                    GoldenVerdict::Missing => println!("{:>6}  MISSING", e.f),
                }
            }
            Ok(status(!report.all_pass()))
        }
        Command::Field { f, opts } => {
            let fd = validate_discriminant(f).map_err(|e| DriverError::Config(e.to_string()))?;
            let cfg = opts.config();
            cfg.validate()?;
            let r = compute_field_traced(&fd, &cfg, &mut |e| match e {
                TraceEvent::Upper {
                    level,
                    exponent,
                    primes_used,
                    ideal,
                } => println!("upper  n={level} e={exponent} primes={primes_used}  {ideal}"),
                TraceEvent::Stabilized { level } => println!("stable n={level}"),
                TraceEvent::Lower { level, result } => println!("lower  m={level}  {result:?}"),
                TraceEvent::Lemma { witness, holds } => println!("lemma  {witness:?} holds={holds}"),
                TraceEvent::Retry {
                    orientation,
                    window,
                    reason,
                } => println!("retry  {orientation} window={window}  {reason}"),
            });
            println!("{}", summary_line(&r));
            println!("{}", serde_json::to_string_pretty(&r).expect("record serializes"));
            Ok(status(!r.is_certified()))
        }
    }
}

fn main() -> ExitCode {
    // exit quietly when the reader of stdout goes away
    std::panic::set_hook(Box::new(|info| {
        let msg = info.to_string();
        if msg.contains("Broken pipe") {
            std::process::exit(0);
        }
        eprintln!("{msg}");
    }));
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
