//! Benchmark sweeps: generate every (width, depth, density) cell of a grid,
//! compile it at each sub-circuit count, and write one CSV row per run.
//!
//! The CSV is appended to as rows finish, so an interrupted sweep can be
//! resumed; on completion it is rewritten in grid order.

use std::collections::{HashSet, VecDeque};
use std::fs::OpenOptions;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use qsplit_core::{generate_with_density, profile_run, serialize_qasm, CorpusGrid, DensitySpec, ProfileOptions, RouterMode};
use serde::{Deserialize, Serialize};

use crate::commands::{coupling_map, write_file};
use crate::error::CliError;

pub const CONFIG_VERSION: u32 = 1;
pub const CSV_NAME: &str = "sweep.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: u32,
    pub stop: u32,
    pub step: u32,
}

impl Range {
    pub fn values(&self) -> Vec<u32> {
        (self.start..=self.stop).step_by(self.step.max(1) as usize).collect()
    }
}

fn default_window() -> usize {
    qsplit_core::router::DEFAULT_LOOKAHEAD_WINDOW
}

fn default_fraction() -> f64 {
    0.5
}

fn default_topology() -> String {
    "grid".into()
}

/// Sweep description, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub version: u32,
    /// Relative paths resolve against the config file's directory.
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed_base: u64,
    pub widths: Range,
    pub depths: Range,
    pub densities: Vec<f64>,
    pub n_sc: Vec<usize>,
    pub router: String,
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default = "default_topology")]
    pub topology: String,
    #[serde(default = "default_fraction")]
    pub two_qubit_fraction: f64,
    /// Keep compiled QASM files next to the CSV.
    #[serde(default)]
    pub keep_outputs: bool,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: SweepConfig = toml::from_str(text).map_err(|e| CliError::Invalid(format!("sweep config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        if cfg.output_dir.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.output_dir = dir.join(&cfg.output_dir);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Invalid(format!("sweep config: {msg}")));
        if self.version != CONFIG_VERSION {
            return bad(format!("unsupported version {} (expected {CONFIG_VERSION})", self.version));
        }
        for (name, r) in [("widths", self.widths), ("depths", self.depths)] {
            if r.step == 0 || r.start > r.stop || r.start == 0 {
                return bad(format!("{name} range is empty or invalid: {r:?}"));
            }
        }
        if self.widths.start < 2 {
            return bad("widths must start at 2 or more".into());
        }
        if self.densities.is_empty() || self.n_sc.is_empty() {
            return bad("densities and n_sc must be nonempty".into());
        }
        let floor = 1.0 / self.widths.start as f64;
        if let Some(d) = self.densities.iter().find(|&&d| !(d >= floor - 1e-12 && d <= 1.0)) {
            return bad(format!("density {d} outside [1/{}, 1]", self.widths.start));
        }
        if self.n_sc.contains(&0) {
            return bad("n_sc values must be at least 1".into());
        }
        self.router_mode()?;
        Ok(())
    }

    pub fn router_mode(&self) -> Result<RouterMode, CliError> {
        match self.router.parse::<RouterMode>().map_err(CliError::Invalid)? {
            RouterMode::Lookahead { .. } => Ok(RouterMode::Lookahead { window: self.window }),
            m => Ok(m),
        }
    }

    /// Circuits of the sweep, in grid order.
    pub fn specs(&self) -> Vec<DensitySpec> {
        let grid = CorpusGrid {
            widths: self.widths.values(),
            depths: self.depths.values(),
            densities: self.densities.clone(),
            seed_base: self.seed_base,
        };
        grid.specs()
            .into_iter()
            .map(|s| DensitySpec {
                two_qubit_fraction: self.two_qubit_fraction,
                ..s
            })
            .collect()
    }
}

/// One CSV row. Times are seconds, memory is bytes (0 where the platform
/// cannot measure it), overheads are fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub width: u32,
    pub depth: u32,
    pub density: f64,
    pub seed: u64,
    pub n_sc: usize,
    pub router: String,
    pub topology: String,
    pub input_gates: u64,
    pub wall_time_sequential: f64,
    pub wall_time_parallel: f64,
    pub speedup: f64,
    pub gates_monolithic: u64,
    pub gates_parallel: u64,
    pub swaps_monolithic: u64,
    pub swaps_parallel: u64,
    pub depth_monolithic: u64,
    pub depth_parallel: u64,
    pub overhead_gate: f64,
    pub overhead_swap: f64,
    pub overhead_depth: f64,
    pub permutation_swaps: u64,
    pub routing_swap_delta: i64,
    pub peak_decomposition_bytes: u64,
    pub peak_compile_bytes: u64,
    pub peak_concatenation_bytes: u64,
    pub peak_monolithic_bytes: u64,
    pub error: String,
}

/// Columns that do not depend on timing or the machine.
pub const DETERMINISTIC_COLUMNS: &[&str] = &[
    "width",
    "depth",
    "density",
    "seed",
    "n_sc",
    "router",
    "topology",
    "input_gates",
    "gates_monolithic",
    "gates_parallel",
    "swaps_monolithic",
    "swaps_parallel",
    "depth_monolithic",
    "depth_parallel",
    "overhead_gate",
    "overhead_swap",
    "overhead_depth",
    "permutation_swaps",
    "routing_swap_delta",
    "error",
];

type RowKey = (u32, u32, String, usize, String, String);

impl SweepRow {
    fn key(&self) -> RowKey {
        (
            self.width,
            self.depth,
            self.density.to_string(),
            self.n_sc,
            self.router.clone(),
            self.topology.clone(),
        )
    }

    fn failed(spec: &DensitySpec, n_sc: usize, cfg: &SweepConfig, error: String) -> Self {
        SweepRow {
            width: spec.width,
            depth: spec.depth,
            density: spec.density,
            seed: spec.seed,
            n_sc,
            router: cfg.router.clone(),
            topology: cfg.topology.clone(),
            input_gates: 0,
            wall_time_sequential: 0.0,
            wall_time_parallel: 0.0,
            speedup: 0.0,
            gates_monolithic: 0,
            gates_parallel: 0,
            swaps_monolithic: 0,
            swaps_parallel: 0,
            depth_monolithic: 0,
            depth_parallel: 0,
            overhead_gate: 0.0,
            overhead_swap: 0.0,
            overhead_depth: 0.0,
            permutation_swaps: 0,
            routing_swap_delta: 0,
            peak_decomposition_bytes: 0,
            peak_compile_bytes: 0,
            peak_concatenation_bytes: 0,
            peak_monolithic_bytes: 0,
            error,
        }
    }
}

pub fn read_rows(path: &Path) -> Result<Vec<SweepRow>, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    reader
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn write_rows(path: &Path, rows: &[SweepRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Invalid(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

struct Appender {
    path: PathBuf,
    writer: csv::Writer<std::fs::File>,
}

impl Appender {
    fn open(path: &Path) -> Result<Self, CliError> {
        let exists = std::fs::metadata(path).map(|m| m.len() > 0).unwrap_or(false);
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| CliError::io(path, e))?;
        let writer = csv::WriterBuilder::new().has_headers(!exists).from_writer(file);
        Ok(Appender {
            path: path.to_path_buf(),
            writer,
        })
    }

    fn push(&mut self, row: &SweepRow) -> Result<(), CliError> {
        self.writer.serialize(row).map_err(|e| CliError::Invalid(e.to_string()))?;
        self.writer.flush().map_err(|e| CliError::io(&self.path, e))
    }
}

fn run_cell(cfg: &SweepConfig, spec: &DensitySpec, n_scs: &[usize], workers: Option<usize>) -> Vec<SweepRow> {
    let circuit = match generate_with_density(spec) {
        Ok(c) => c,
        Err(e) => return n_scs.iter().map(|&n| SweepRow::failed(spec, n, cfg, e.to_string())).collect(),
    };
    let stem = format!("w{}_d{}_p{}_s{}", spec.width, spec.depth, spec.density, spec.seed);
    let circuits = cfg.output_dir.join("circuits");
    let input = circuits.join(format!("{stem}.qasm"));
    let setup = (|| {
        write_file(&input, &serialize_qasm(&circuit))?;
        let map = coupling_map(&cfg.topology, spec.width)?;
        Ok::<_, CliError>((map, cfg.router_mode()?))
    })();
    let (map, router) = match setup {
        Ok(x) => x,
        Err(e) => return n_scs.iter().map(|&n| SweepRow::failed(spec, n, cfg, e.to_string())).collect(),
    };
    drop(circuit);

    let mut rows = Vec::new();
    for &n_sc in n_scs {
        let out = cfg.output_dir.join("compiled").join(format!("{stem}_nsc{n_sc}.qasm"));
        let opts = ProfileOptions {
            n_sc,
            router,
            workers,
            parallel_output: out.clone(),
            monolithic_output: None,
        };
        let row = match std::fs::create_dir_all(cfg.output_dir.join("compiled"))
            .map_err(|e| e.to_string())
            .and_then(|_| profile_run(&input, &map, &opts).map_err(|e| e.to_string()))
        {
            Ok(o) => {
                let r = o.report;
                let mem = |m: qsplit_core::pipeline::PhaseMemory| m.peak_bytes.unwrap_or(0);
                SweepRow {
                    input_gates: r.input_gates,
                    wall_time_sequential: r.wall_time_sequential,
                    wall_time_parallel: r.wall_time_parallel,
                    speedup: r.speedup,
                    gates_monolithic: r.monolithic.gate_count,
                    gates_parallel: r.parallel.gate_count,
                    swaps_monolithic: r.monolithic.swap_count,
                    swaps_parallel: r.parallel.swap_count,
                    depth_monolithic: r.monolithic.depth,
                    depth_parallel: r.parallel.depth,
                    overhead_gate: r.overhead_gate,
                    overhead_swap: r.overhead_swap,
                    overhead_depth: r.overhead_depth,
                    permutation_swaps: r.accounting.permutation_swaps,
                    routing_swap_delta: r.accounting.routing_swap_delta,
                    peak_decomposition_bytes: mem(r.peak_memory.decomposition),
                    peak_compile_bytes: mem(r.peak_memory.compile),
                    peak_concatenation_bytes: mem(r.peak_memory.concatenation),
                    peak_monolithic_bytes: mem(r.peak_memory.monolithic),
                    error: String::new(),
                    ..SweepRow::failed(spec, n_sc, cfg, String::new())
                }
            }
            Err(e) => SweepRow::failed(spec, n_sc, cfg, e),
        };
        if !cfg.keep_outputs {
            let _ = std::fs::remove_file(&out);
        }
        rows.push(row);
    }
    if !cfg.keep_outputs {
        let _ = std::fs::remove_file(&input);
    }
    rows
}

/// Runs the sweep and returns the path of the finished CSV.
pub fn run(cfg: &SweepConfig, resume: bool, jobs: usize, workers: Option<usize>) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| CliError::io(&cfg.output_dir, e))?;
    let csv_path = cfg.output_dir.join(CSV_NAME);

    let mut done: HashSet<RowKey> = HashSet::new();
    if resume && csv_path.exists() {
        let kept: Vec<SweepRow> = read_rows(&csv_path)?.into_iter().filter(|r| r.error.is_empty()).collect();
        done.extend(kept.iter().map(SweepRow::key));
        write_rows(&csv_path, &kept)?;
    } else if csv_path.exists() {
        std::fs::remove_file(&csv_path).map_err(|e| CliError::io(&csv_path, e))?;
    }

    let mut queue = VecDeque::new();
    for spec in cfg.specs() {
        let pending: Vec<usize> = cfg
            .n_sc
            .iter()
            .copied()
            .filter(|&n| {
                let probe = SweepRow::failed(&spec, n, cfg, String::new());
                !done.contains(&probe.key())
            })
            .collect();
        if !pending.is_empty() {
            queue.push_back((spec, pending));
        }
    }
    if jobs > 1 {
        log::warn!("running {jobs} cells at once; timing columns are not comparable across cells");
    }

    let appender = Mutex::new(Appender::open(&csv_path)?);
    let queue = Mutex::new(queue);
    let failure = Mutex::new(None);
    std::thread::scope(|s| {
        for _ in 0..jobs.max(1) {
            s.spawn(|| loop {
                let Some((spec, n_scs)) = queue.lock().unwrap().pop_front() else { break };
                log::info!("sweep cell w={} d={} p={}", spec.width, spec.depth, spec.density);
                for row in run_cell(cfg, &spec, &n_scs, workers) {
                    if !row.error.is_empty() {
                        log::warn!("w={} d={} n_sc={}: {}", row.width, row.depth, row.n_sc, row.error);
                    }
                    if let Err(e) = appender.lock().unwrap().push(&row) {
                        failure.lock().unwrap().get_or_insert(e);
                        queue.lock().unwrap().clear();
                        return;
                    }
                }
            });
        }
    });
    drop(appender);
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }

    // Grid order, one row per key.
    let order: Vec<RowKey> = cfg
        .specs()
        .iter()
        .flat_map(|spec| cfg.n_sc.iter().map(|&n| SweepRow::failed(spec, n, cfg, String::new()).key()))
        .collect();
    let mut rows = read_rows(&csv_path)?;
    rows.sort_by_key(|r| order.iter().position(|k| *k == r.key()).unwrap_or(usize::MAX));
    rows.dedup_by(|a, b| a.key() == b.key());
    write_rows(&csv_path, &rows)?;
    Ok(csv_path)
}
