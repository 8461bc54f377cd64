//! Benchmark runner: loads datasets in ascending size order, runs the
//! full pipeline per dataset under a cooperative timeout, compares counts
//! against an expected-values manifest, and renders CSV/JSON reports.
//!
//! Timeout enforcement is cooperative: the deadline is checked between
//! phases, every 64k parsed triples, and between materialization waves.
//! A dataset that exceeds its deadline is flagged and the run continues.
//! Peak memory is an estimate sampled from the process's own accounting
//! at phase boundaries, not an external profiler.

use crate::abox::load_abox;
use crate::error::{Error, Result};
use crate::materialize::{
    materialize, materialize_streaming, AssertionSinks, MaterializeOptions,
};
use crate::rdf;
use crate::tbox::build_tbox;
use crate::term::TermStore;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_TIMEOUT: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

/// Reads a `Vm*` line from `/proc/self/status`, in MiB. Returns 0 when
/// the accounting is unavailable (non-Linux).
fn proc_status_mb(key: &str) -> u64 {
    let Ok(text) = std::fs::read_to_string("/proc/self/status") else {
        return 0;
    };
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix(key) {
            let kb: u64 = rest
                .trim_start_matches(':')
                .trim()
                .trim_end_matches("kB")
                .trim()
                .parse()
                .unwrap_or(0);
            return kb / 1024;
        }
    }
    0
}

/// Resident set size right now, MiB.
pub fn current_rss_mb() -> u64 {
    proc_status_mb("VmRSS")
}

/// Process-lifetime peak resident set size, MiB.
pub fn peak_rss_mb() -> u64 {
    proc_status_mb("VmHWM")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub dataset_paths: Vec<PathBuf>,
    pub timeout: Duration,
    pub threads: usize,
    pub manifest_path: Option<PathBuf>,
    pub streaming: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            dataset_paths: Vec::new(),
            // 72h, the ceiling used for uncapped comparison runs
            timeout: Duration::from_secs(72 * 3600),
            threads: 1,
            manifest_path: None,
            streaming: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    Mismatch,
    Timeout,
    Oom,
    Error,
}

impl std::fmt::Display for RowStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RowStatus::Ok => "ok",
            RowStatus::Mismatch => "mismatch",
            RowStatus::Timeout => "timeout",
            RowStatus::Oom => "oom",
            RowStatus::Error => "error",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetRow {
    pub dataset: String,
    pub triples: u64,
    pub classes: u64,
    pub restrictions: u64,
    pub instances: u64,
    pub inf_types: u64,
    pub inf_individuals: u64,
    pub inf_literals: u64,
    pub t_parse_s: f64,
    pub t_tbox_s: f64,
    pub t_mat_s: f64,
    pub peak_mem_mb: u64,
    pub status: RowStatus,
}

impl DatasetRow {
    fn failed(dataset: String, status: RowStatus) -> Self {
        DatasetRow {
            dataset,
            triples: 0,
            classes: 0,
            restrictions: 0,
            instances: 0,
            inf_types: 0,
            inf_individuals: 0,
            inf_literals: 0,
            t_parse_s: 0.0,
            t_tbox_s: 0.0,
            t_mat_s: 0.0,
            peak_mem_mb: 0,
            status,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub dataset: String,
    pub column: &'static str,
    pub expected: u64,
    pub actual: u64,
}

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: {} expected {} got {}",
            self.dataset, self.column, self.expected, self.actual
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestRow {
    pub name: String,
    pub triples: u64,
    pub classes: u64,
    pub restrictions: u64,
    pub instances: u64,
    pub inf_types: u64,
    pub inf_individuals: u64,
    pub inf_literals: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub datasets: Vec<ManifestRow>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Manifest> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::from_io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Manifest {
            path: path.display().to_string(),
            msg: e.to_string(),
        })
    }

    pub fn get(&self, name: &str) -> Option<&ManifestRow> {
        self.datasets.iter().find(|r| r.name == name)
    }
}

#[derive(Debug, Default)]
pub struct BenchReport {
    pub rows: Vec<DatasetRow>,
    pub mismatches: Vec<Mismatch>,
}

pub const CSV_HEADER: &str = "dataset,triples,classes,restrictions,instances,inf_types,inf_individuals,inf_literals,t_parse_s,t_tbox_s,t_mat_s,peak_mem_mb,status";

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{:.3},{:.3},{:.3},{},{}\n",
                r.dataset,
                r.triples,
                r.classes,
                r.restrictions,
                r.instances,
                r.inf_types,
                r.inf_individuals,
                r.inf_literals,
                r.t_parse_s,
                r.t_tbox_s,
                r.t_mat_s,
                r.peak_mem_mb,
                r.status
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.rows).expect("rows serialize")
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Json => self.to_json(),
        }
    }

    /// 0 only when every dataset parsed, materialized, and verified.
    pub fn exit_code(&self) -> i32 {
        if self.rows.iter().any(|r| r.status == RowStatus::Error) {
            EXIT_INPUT
        } else if self
            .rows
            .iter()
            .any(|r| matches!(r.status, RowStatus::Timeout | RowStatus::Oom))
        {
            EXIT_TIMEOUT
        } else if self.rows.iter().any(|r| r.status == RowStatus::Mismatch) {
            EXIT_MISMATCH
        } else {
            EXIT_OK
        }
    }
}

/// One Mismatch per differing cell. Datasets missing from the manifest
/// produce a warning, not a mismatch; so do manifest rows that were
/// never run.
pub fn verify_counts(report: &BenchReport, manifest: &Manifest) -> Vec<Mismatch> {
    let mut out = Vec::new();
    for row in &report.rows {
        if !matches!(row.status, RowStatus::Ok | RowStatus::Mismatch) {
            continue;
        }
        let Some(expected) = manifest.get(&row.dataset) else {
            log::warn!("dataset {} missing from manifest; not verified", row.dataset);
            continue;
        };
        let cells: [(&'static str, u64, u64); 7] = [
            ("triples", expected.triples, row.triples),
            ("classes", expected.classes, row.classes),
            ("restrictions", expected.restrictions, row.restrictions),
            ("instances", expected.instances, row.instances),
            ("inf_types", expected.inf_types, row.inf_types),
            ("inf_individuals", expected.inf_individuals, row.inf_individuals),
            ("inf_literals", expected.inf_literals, row.inf_literals),
        ];
        for (column, exp, act) in cells {
            if exp != act {
                out.push(Mismatch {
                    dataset: row.dataset.clone(),
                    column,
                    expected: exp,
                    actual: act,
                });
            }
        }
    }
    for m in &manifest.datasets {
        if !report.rows.iter().any(|r| r.dataset == m.name) {
            log::warn!("manifest row {} has no report row", m.name);
        }
    }
    out
}

struct Deadline {
    at: Instant,
    timeout_s: u64,
}

impl Deadline {
    fn new(timeout: Duration) -> Self {
        Deadline {
            at: Instant::now() + timeout,
            timeout_s: timeout.as_secs(),
        }
    }

    fn check(&self, phase: &'static str) -> Result<()> {
        if Instant::now() >= self.at {
            Err(Error::Timeout {
                phase,
                timeout_s: self.timeout_s,
            })
        } else {
            Ok(())
        }
    }
}

/// Full pipeline for one dataset: parse, index, load, materialize.
fn process_dataset(
    path: &Path,
    name: &str,
    pool: &rayon::ThreadPool,
    deadline: &Deadline,
    streaming: bool,
) -> Result<DatasetRow> {
    let mut peak = current_rss_mb();
    let mut store = TermStore::new();

    let parse_start = Instant::now();
    let mut parser = rdf::parser_for_path(path, 0)?;
    let mut triples = Vec::new();
    while let Some(t) = parser.next_triple(&mut store)? {
        triples.push(t);
        if triples.len() % 65536 == 0 {
            deadline.check("parse")?;
        }
    }
    drop(parser);
    let t_parse_s = parse_start.elapsed().as_secs_f64();
    peak = peak.max(current_rss_mb());
    deadline.check("tbox")?;

    let tbox_start = Instant::now();
    let index = build_tbox(&triples, &mut store)?;
    let t_tbox_s = tbox_start.elapsed().as_secs_f64();
    peak = peak.max(current_rss_mb());
    deadline.check("abox")?;

    let load_start = Instant::now();
    let abox = load_abox(&triples, &index, &store)?;
    let t_load_s = load_start.elapsed().as_secs_f64();
    peak = peak.max(current_rss_mb());
    deadline.check("materialize")?;

    let options = MaterializeOptions {
        deadline: Some(deadline.at),
        ..Default::default()
    };
    let stats = pool.install(|| -> Result<crate::materialize::MaterializationStats> {
        if streaming {
            materialize_streaming(
                &abox,
                &index,
                &options,
                &store,
                AssertionSinks {
                    types: &mut std::io::sink(),
                    relations: &mut std::io::sink(),
                    literals: &mut std::io::sink(),
                },
            )
        } else {
            let result = materialize(&abox, &index, &options);
            Ok(result.stats)
        }
    })?;
    deadline.check("finish")?;
    peak = peak.max(current_rss_mb());

    Ok(DatasetRow {
        dataset: name.to_owned(),
        triples: triples.len() as u64,
        classes: index.n_classes() as u64,
        restrictions: index.n_restrictions() as u64,
        instances: abox.n_instances() as u64,
        inf_types: stats.n_transitive_types,
        inf_individuals: stats.n_individual_assertions,
        inf_literals: stats.n_literal_assertions,
        t_parse_s,
        t_tbox_s,
        // load and rule application reported as one materialization time
        t_mat_s: t_load_s + stats.t_materialize_s,
        peak_mem_mb: peak,
        status: RowStatus::Ok,
    })
}

/// Dataset census without materialization (the left report columns).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Census {
    pub triples: u64,
    pub classes: u64,
    pub restrictions: u64,
    pub instances: u64,
}

pub fn dataset_census(path: &Path) -> Result<Census> {
    let mut store = TermStore::new();
    let (triples, _) = rdf::parse_path(path, &mut store, 0)?;
    let index = build_tbox(&triples, &mut store)?;
    let abox = load_abox(&triples, &index, &store)?;
    Ok(Census {
        triples: triples.len() as u64,
        classes: index.n_classes() as u64,
        restrictions: index.n_restrictions() as u64,
        instances: abox.n_instances() as u64,
    })
}

/// Runs every configured dataset in ascending file-size order; failures
/// flag their row and the run continues. Errors only on unusable
/// configuration (bad manifest, no thread pool).
pub fn run_benchmark(config: &BenchConfig) -> Result<BenchReport> {
    let manifest = match &config.manifest_path {
        Some(p) => Some(Manifest::load(p)?),
        None => None,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads.max(1))
        .build()
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;

    let mut paths = config.dataset_paths.clone();
    paths.sort_by_key(|p| std::fs::metadata(p).map(|m| m.len()).unwrap_or(u64::MAX));

    let mut report = BenchReport::default();
    for path in &paths {
        let name = rdf::dataset_name(path);
        let deadline = Deadline::new(config.timeout);
        let row = match process_dataset(path, &name, &pool, &deadline, config.streaming) {
            Ok(row) => row,
            Err(Error::Timeout { phase, .. }) => {
                log::warn!(
                    "{name}: timed out in {phase} after {} s",
                    config.timeout.as_secs()
                );
                DatasetRow::failed(name, RowStatus::Timeout)
            }
            Err(e) => {
                log::error!("{name}: {e}");
                DatasetRow::failed(name, RowStatus::Error)
            }
        };
        report.rows.push(row);
    }

    if let Some(manifest) = &manifest {
        report.mismatches = verify_counts(&report, manifest);
        for m in &report.mismatches {
            let row = report
                .rows
                .iter_mut()
                .find(|r| r.dataset == m.dataset)
                .expect("mismatch rows come from the report");
            if row.status == RowStatus::Ok {
                row.status = RowStatus::Mismatch;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sandbox_path() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/clg_10.ttl")
    }

    fn manifest_path() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/expected_counts.json")
    }

    #[test]
    fn sandbox_bench_row_matches_manifest() {
        let config = BenchConfig {
            dataset_paths: vec![sandbox_path()],
            manifest_path: Some(manifest_path()),
            threads: 2,
            ..Default::default()
        };
        let report = run_benchmark(&config).unwrap();
        assert_eq!(report.rows.len(), 1);
        let row = &report.rows[0];
        assert_eq!(row.dataset, "clg_10");
        assert_eq!(
            (row.triples, row.classes, row.restrictions, row.instances),
            (35, 9, 2, 3)
        );
        assert_eq!(
            (row.inf_types, row.inf_individuals, row.inf_literals),
            (10, 1, 1)
        );
        assert_eq!(row.status, RowStatus::Ok);
        assert!(report.mismatches.is_empty());
        assert_eq!(report.exit_code(), EXIT_OK);
    }

    #[test]
    fn streaming_bench_reports_same_counts() {
        let config = BenchConfig {
            dataset_paths: vec![sandbox_path()],
            streaming: true,
            ..Default::default()
        };
        let report = run_benchmark(&config).unwrap();
        let row = &report.rows[0];
        assert_eq!(
            (row.inf_types, row.inf_individuals, row.inf_literals),
            (10, 1, 1)
        );
    }

    #[test]
    fn off_by_one_manifest_is_one_mismatch() {
        let manifest = Manifest {
            datasets: vec![ManifestRow {
                name: "clg_10".into(),
                triples: 35,
                classes: 9,
                restrictions: 2,
                instances: 3,
                inf_types: 11, // wrong on purpose
                inf_individuals: 1,
                inf_literals: 1,
            }],
        };
        let config = BenchConfig {
            dataset_paths: vec![sandbox_path()],
            ..Default::default()
        };
        let mut report = run_benchmark(&config).unwrap();
        let mismatches = verify_counts(&report, &manifest);
        assert_eq!(mismatches.len(), 1);
        assert_eq!(mismatches[0].column, "inf_types");
        assert_eq!(mismatches[0].expected, 11);
        assert_eq!(mismatches[0].actual, 10);

        report.mismatches = mismatches;
        report.rows[0].status = RowStatus::Mismatch;
        assert_eq!(report.exit_code(), EXIT_MISMATCH);
    }

    #[test]
    fn manifest_extras_and_missing_rows_are_warnings_only() {
        let manifest = Manifest {
            datasets: vec![ManifestRow {
                name: "clg_ghost".into(),
                triples: 1,
                classes: 1,
                restrictions: 0,
                instances: 0,
                inf_types: 0,
                inf_individuals: 0,
                inf_literals: 0,
            }],
        };
        let config = BenchConfig {
            dataset_paths: vec![sandbox_path()],
            ..Default::default()
        };
        let report = run_benchmark(&config).unwrap();
        assert!(verify_counts(&report, &manifest).is_empty());
    }

    #[test]
    fn unreadable_file_flags_row_and_continues() {
        let config = BenchConfig {
            dataset_paths: vec![PathBuf::from("/no/such/file.nt"), sandbox_path()],
            ..Default::default()
        };
        let report = run_benchmark(&config).unwrap();
        assert_eq!(report.rows.len(), 2);
        // missing file sorts last (no metadata)
        assert_eq!(report.rows[0].status, RowStatus::Ok);
        assert_eq!(report.rows[1].status, RowStatus::Error);
        assert_eq!(report.exit_code(), EXIT_INPUT);
    }

    #[test]
    fn tiny_timeout_flags_timeout_and_continues() {
        let dir = tempfile::tempdir().unwrap();
        let big = dir.path().join("big.nt");
        let profile = crate::synth::ScaledProfile {
            n_classes: 2_000,
            n_restrictions: 100,
            n_instances: 60_000,
            n_properties: 20,
            seed: 5,
        };
        crate::synth::write_scaled_dataset_file(&big, &profile).unwrap();

        let config = BenchConfig {
            dataset_paths: vec![big, sandbox_path()],
            timeout: Duration::from_nanos(1),
            ..Default::default()
        };
        let report = run_benchmark(&config).unwrap();
        assert_eq!(report.rows.len(), 2);
        assert!(report.rows.iter().all(|r| r.status == RowStatus::Timeout));
        assert_eq!(report.exit_code(), EXIT_TIMEOUT);
    }

    #[test]
    fn csv_header_is_stable() {
        let report = BenchReport::default();
        assert!(report.to_csv().starts_with(
            "dataset,triples,classes,restrictions,instances,inf_types,inf_individuals,inf_literals,t_parse_s,t_tbox_s,t_mat_s,peak_mem_mb,status\n"
        ));
    }

    #[test]
    fn memory_accounting_reads_something() {
        // VmRSS should be nonzero on Linux; elsewhere the estimate is 0
        let rss = current_rss_mb();
        if cfg!(target_os = "linux") {
            assert!(rss > 0);
            assert!(peak_rss_mb() >= rss);
        }
    }
}
