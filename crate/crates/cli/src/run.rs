//! Grid runner: thresholds, error estimation and CSV rows.

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::Path;
use std::time::Instant;

use geocomm::detection::{estimate_errors, planted_mean, Calibration, TestKind, TestSpec};
use geocomm::stats::{ScanMode, EXHAUSTIVE_SUBSET_LIMIT};
use geocomm::{ModelParams, Seed};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, ScanSearch};
use crate::{version, CliError};

/// Column order of the results CSV.
pub const CSV_COLUMNS: [&str; 15] = [
    "n",
    "p",
    "d",
    "k",
    "test",
    "threshold",
    "type1",
    "type1_hw",
    "type2",
    "type2_hw",
    "excluded",
    "trials",
    "seed",
    "version",
    "wall_ms",
];

/// One line of the results CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub n: usize,
    pub p: f64,
    pub d: usize,
    pub k: f64,
    pub test: String,
    pub threshold: f64,
    pub type1: f64,
    pub type1_hw: f64,
    pub type2: f64,
    pub type2_hw: f64,
    pub excluded: usize,
    pub trials: usize,
    pub seed: u64,
    pub version: String,
    pub wall_ms: u64,
}

impl ResultRow {
    /// Identifies the grid point and test; used by `--resume`.
    pub fn key(&self) -> RowKey {
        RowKey { n: self.n, p: self.p.to_bits(), d: self.d, k: self.k.to_bits(), test: self.test.clone() }
    }

    /// Every column except `wall_ms`.
    pub fn values(&self) -> (RowKey, [u64; 5], usize, usize, u64, &str) {
        (
            self.key(),
            [self.threshold, self.type1, self.type1_hw, self.type2, self.type2_hw].map(f64::to_bits),
            self.excluded,
            self.trials,
            self.seed,
            &self.version,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RowKey {
    n: usize,
    p: u64,
    d: usize,
    k: u64,
    test: String,
}

fn key_of(params: &ModelParams, kind: TestKind) -> RowKey {
    RowKey { n: params.n, p: params.p.to_bits(), d: params.d, k: params.k.to_bits(), test: kind.to_string() }
}

/// Run-wide switches.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Treat a truncated series as a numerical failure.
    pub strict: bool,
    /// Skip grid points already present in the output file.
    pub resume: bool,
}

/// Builds the test spec for one grid point.
pub fn build_spec(
    cfg: &ExperimentConfig,
    params: &ModelParams,
    kind: TestKind,
    calibration: &dyn Fn() -> Result<f64, CliError>,
    strict: bool,
) -> Result<TestSpec, CliError> {
    let (_, series) = planted_mean(kind, params)?;
    if series.truncation_failed() {
        let msg = format!(
            "series for (ell={}, p={}, d={}) hit the order cap {} with tail {:.3e}",
            series.ell, series.p, series.d, series.truncation_m, series.tail_bound
        );
        if strict {
            return Err(CliError::Numerical(msg));
        }
        eprintln!("warning: {msg}");
    }
    let constant = match kind {
        TestKind::ConstrainedScan => match cfg.constrained_scan.cycle_constant {
            Some(c) => c,
            None => calibration()?,
        },
        _ => 1.0,
    };
    let mut spec = TestSpec::with_fraction(kind, *params, constant, cfg.threshold_fraction)?;
    let (search, restarts) = match kind {
        TestKind::ConstrainedScan => (cfg.constrained_scan.search, cfg.constrained_scan.restarts),
        _ => (cfg.scan.search, cfg.scan.restarts),
    };
    let fits = geocomm::special::binomial_exact(params.n as u64, params.k_minus() as u64)
        .is_some_and(|c| c <= EXHAUSTIVE_SUBSET_LIMIT);
    spec.scan_mode = match search {
        ScanSearch::Exhaustive if !fits => {
            return Err(CliError::Config(format!(
                "exhaustive scan at n = {}, k- = {} exceeds {EXHAUSTIVE_SUBSET_LIMIT} subsets",
                params.n,
                params.k_minus()
            )))
        }
        ScanSearch::Exhaustive => ScanMode::Exhaustive,
        ScanSearch::Auto if fits => ScanMode::Exhaustive,
        _ => ScanMode::LocalSearch { restarts: restarts.max(1), seed: cfg.seed },
    };
    Ok(spec)
}

/// Runs one grid point and test. Failures that are not fatal are reported
/// as a row of NaNs.
pub fn run_point(
    cfg: &ExperimentConfig,
    params: &ModelParams,
    kind: TestKind,
    calibration: &dyn Fn() -> Result<f64, CliError>,
    opts: &RunOptions,
) -> Result<ResultRow, CliError> {
    let start = Instant::now();
    let outcome = build_spec(cfg, params, kind, calibration, opts.strict)
        .and_then(|spec| Ok((spec.threshold, estimate_errors(&spec, cfg.trials, Seed(cfg.seed))?)));
    let mut row = ResultRow {
        n: params.n,
        p: params.p,
        d: params.d,
        k: params.k,
        test: kind.to_string(),
        threshold: f64::NAN,
        type1: f64::NAN,
        type1_hw: f64::NAN,
        type2: f64::NAN,
        type2_hw: f64::NAN,
        excluded: 0,
        trials: cfg.trials,
        seed: cfg.seed,
        version: version().to_string(),
        wall_ms: 0,
    };
    match outcome {
        Ok((threshold, e)) => {
            row.threshold = threshold;
            row.type1 = e.type1;
            row.type1_hw = e.type1_hw;
            row.type2 = e.type2;
            row.type2_hw = e.type2_hw;
            row.excluded = e.excluded;
        }
        Err(err) if opts.strict || err.is_fatal() => return Err(err),
        Err(err) => {
            eprintln!("error at (n={}, p={}, d={}, k={}, {kind}): {err}", params.n, params.p, params.d, params.k)
        }
    }
    row.wall_ms = start.elapsed().as_millis() as u64;
    Ok(row)
}

/// Reads the rows already written to `path`, cutting off a trailing partial
/// record. Returns the completed keys.
fn recover(path: &Path) -> Result<HashSet<RowKey>, CliError> {
    let mut file = OpenOptions::new().read(true).write(true).open(path)?;
    let mut text = String::new();
    file.read_to_string(&mut text)?;
    let mut done = HashSet::new();
    let mut good_end = 0u64;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?.clone();
    if headers.iter().ne(CSV_COLUMNS.iter().copied()) {
        return Err(CliError::Config(format!("{} does not have the expected header", path.display())));
    }
    good_end = good_end.max(reader.position().byte());
    let mut record = csv::StringRecord::new();
    loop {
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => match record.deserialize::<ResultRow>(Some(&headers)) {
                Ok(row) if text.as_bytes().get(reader.position().byte() as usize - 1) == Some(&b'\n') => {
                    done.insert(row.key());
                    good_end = reader.position().byte();
                }
                _ => break,
            },
            Err(_) => break,
        }
    }
    file.set_len(good_end)?;
    file.seek(SeekFrom::End(0))?;
    Ok(done)
}

/// Writes rows one at a time, flushing after each so an interrupted run
/// leaves a valid prefix.
pub struct RowSink {
    writer: csv::Writer<Box<dyn Write>>,
}

impl RowSink {
    pub fn new(out: Box<dyn Write>, header: bool) -> Result<Self, CliError> {
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        if header {
            writer.write_record(CSV_COLUMNS)?;
            writer.flush()?;
        }
        Ok(Self { writer })
    }

    pub fn push(&mut self, row: &ResultRow) -> Result<(), CliError> {
        self.writer.serialize(row)?;
        self.writer.flush()?;
        Ok(())
    }
}

/// Opens the sink for `path`, or stdout when absent. With `resume`, returns
/// the keys already present.
pub fn open_sink(path: Option<&Path>, resume: bool) -> Result<(RowSink, HashSet<RowKey>), CliError> {
    let Some(path) = path else {
        if resume {
            return Err(CliError::Config("--resume needs an output file".into()));
        }
        return Ok((RowSink::new(Box::new(std::io::stdout()), true)?, HashSet::new()));
    };
    if resume && path.exists() && std::fs::metadata(path)?.len() > 0 {
        let done = recover(path)?;
        let file = OpenOptions::new().append(true).open(path)?;
        return Ok((RowSink::new(Box::new(file), false)?, done));
    }
    let file = File::create(path)?;
    Ok((RowSink::new(Box::new(file), true)?, HashSet::new()))
}

/// What a grid run produced.
#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub rows: Vec<ResultRow>,
    pub skipped: usize,
}

/// Runs every grid point and test kind in order, writing rows as they
/// complete. Trials run on `workers` threads.
pub fn run_grid(
    cfg: &ExperimentConfig,
    grid: &[ModelParams],
    opts: &RunOptions,
    sink: &mut RowSink,
    done: &HashSet<RowKey>,
) -> Result<RunSummary, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.unwrap_or(1))
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let calibrated = std::sync::OnceLock::<f64>::new();
    let calibration = || -> Result<f64, CliError> {
        if let Some(&c) = calibrated.get() {
            return Ok(c);
        }
        let c: Calibration = geocomm::detection::default_calibration()?;
        Ok(*calibrated.get_or_init(|| c.constant))
    };
    let mut summary = RunSummary::default();
    for params in grid {
        for &kind in &cfg.tests {
            if done.contains(&key_of(params, kind)) {
                summary.skipped += 1;
                continue;
            }
            let row = pool.install(|| run_point(cfg, params, kind, &calibration, opts))?;
            sink.push(&row)?;
            summary.rows.push(row);
        }
    }
    Ok(summary)
}
