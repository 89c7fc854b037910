use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{compute_field, FieldResult};
use super::{DriverError, RunConfig};
use crate::quadfield::{discriminants_in, FundamentalDiscriminant};

const HEADER_PREFIX: &str = "#cfg ";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Header {
    version: String,
    config: RunConfig,
}

/// A parsed journal: the configuration from its header and every complete
/// record.
#[derive(Clone, Debug)]
pub struct Journal {
    pub version: String,
    pub config: RunConfig,
    pub results: Vec<FieldResult>,
    /// Byte length of the valid prefix (header and complete records).
    pub valid_len: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ScanSummary {
    pub fields: usize,
    pub resumed: usize,
    pub certified: usize,
    pub unresolved: usize,
}

pub fn write_header(w: &mut dyn Write, cfg: &RunConfig) -> Result<(), DriverError> {
    let header = Header {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
    };
    let json = serde_json::to_string(&header).expect("config serializes");
    writeln!(w, "{HEADER_PREFIX}{json}")?;
    Ok(())
}

/// Reads a journal. A final line without a newline is a torn write and is
/// ignored; any other malformed line is an error.
pub fn read_journal(path: &Path) -> Result<Journal, DriverError> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut header: Option<Header> = None;
    let mut results = Vec::new();
    let mut valid_len = 0u64;
    let mut line = String::new();
    let mut lineno = 0;
    loop {
        line.clear();
        let read = reader.read_line(&mut line)?;
        if read == 0 || !line.ends_with('\n') {
            break;
        }
        lineno += 1;
        let err = |msg: String| DriverError::Journal { line: lineno, msg };
        let text = line.trim_end();
        if let Some(rest) = text.strip_prefix(HEADER_PREFIX) {
            if header.is_some() {
                return Err(err("second header".to_string()));
            }
            header = Some(serde_json::from_str(rest).map_err(|e| err(e.to_string()))?);
        } else if !text.is_empty() {
            if header.is_none() {
                return Err(err("record before header".to_string()));
            }
            results.push(serde_json::from_str(text).map_err(|e| err(e.to_string()))?);
        }
        valid_len += read as u64;
    }
    let header = header.ok_or(DriverError::Journal {
        line: 0,
        msg: "missing header".to_string(),
    })?;
    Ok(Journal {
        version: header.version,
        config: header.config,
        results,
        valid_len,
    })
}

fn record_line(r: &FieldResult) -> String {
    let mut s = serde_json::to_string(r).expect("record serializes");
    s.push('\n');
    s
}

/// Processes every fundamental discriminant in `[f_min, f_max)` in ascending
/// order, appending one journal line per field. Results are handed to `sink`
/// in the same order, whatever the parallel schedule.
pub fn scan_range(
    cfg: &RunConfig,
    sink: &mut dyn FnMut(&FieldResult),
) -> Result<ScanSummary, DriverError> {
    cfg.validate()?;
    let mut summary = ScanSummary::default();
    let mut out: Option<File> = None;
    let mut done_below = cfg.f_min;
    if let Some(path) = &cfg.out {
        if cfg.resume && path.exists() {
            let journal = read_journal(path)?;
            if journal.config.normalized() != cfg.normalized() {
                return Err(DriverError::HeaderMismatch);
            }
            let mut file = OpenOptions::new().read(true).write(true).open(path)?;
            file.set_len(journal.valid_len)?;
            file.seek(SeekFrom::End(0))?;
            for r in &journal.results {
                tally(&mut summary, r);
                sink(r);
                done_below = done_below.max(r.f + 1);
            }
            summary.resumed = journal.results.len();
            out = Some(file);
        } else {
            let mut file = File::create(path)?;
            write_header(&mut file, cfg)?;
            file.flush()?;
            out = Some(file);
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| DriverError::Config(e.to_string()))?;
    let fields: Vec<FundamentalDiscriminant> = discriminants_in(done_below, cfg.f_max).collect();
    for chunk in fields.chunks(4 * cfg.jobs) {
        let results: Vec<FieldResult> =
            pool.install(|| chunk.par_iter().map(|fd| compute_field(fd, cfg)).collect());
        for r in &results {
            if let Some(file) = out.as_mut() {
                file.write_all(record_line(r).as_bytes())?;
                file.flush()?;
            }
            tally(&mut summary, r);
            sink(r);
        }
    }
    Ok(summary)
}

fn tally(summary: &mut ScanSummary, r: &FieldResult) {
    summary.fields += 1;
    if r.is_certified() {
        summary.certified += 1;
    } else {
        summary.unresolved += 1;
    }
}
