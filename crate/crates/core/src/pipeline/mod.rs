//! Parallel compilation: split the instruction list, route every chunk on
//! its own worker from the trivial layout, append a permutation circuit to
//! every chunk but the last, and concatenate the results in order.

pub mod memory;
mod partition;
mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::circuit::Circuit;
use crate::metrics::{compute_metrics, MetricsError};
use crate::permuter::{build_permutation, permutation_instructions, PermuteError};
use crate::qasm::{parse_qasm, serialize_qasm_with_layout, QasmError};
use crate::router::{Layout, RouteError, RoutedCircuit, RouterMode};
use crate::topology::CouplingMap;

pub use memory::PhaseMemory;
pub use partition::{chunk_sizes, partition, PartitionError, PartitionPlan};
pub use report::{
    relative_overhead, ChunkReport, CompileReport, OutputStats, PeakMemory, PhaseTimes, SwapAccounting,
    REPORT_SCHEMA_VERSION,
};

#[derive(Debug, Error)]
pub enum ChunkError {
    #[error(transparent)]
    Route(#[from] RouteError),
    #[error(transparent)]
    Permute(#[from] PermuteError),
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("sub-circuit {index} failed: {source}")]
    Chunk { index: usize, source: ChunkError },
    #[error(transparent)]
    Route(#[from] RouteError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{source}", path.display())]
    Qasm { path: PathBuf, source: QasmError },
    #[error("cannot build worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone)]
pub struct ParallelCompilation {
    pub circuit: Circuit,
    /// Layout after the final sub-circuit, for measurement remapping.
    pub final_layout: Layout,
    pub plan: PartitionPlan,
    pub chunks: Vec<ChunkReport>,
    pub decomposition_seconds: f64,
    pub compile_seconds: f64,
    pub concatenation_seconds: f64,
    pub compile_memory: PhaseMemory,
}

impl ParallelCompilation {
    pub fn routing_swaps(&self) -> u64 {
        self.chunks.iter().map(|c| c.routing_swaps).sum()
    }

    pub fn permutation_swaps(&self) -> u64 {
        self.chunks.iter().map(|c| c.permutation_swaps).sum()
    }
}

struct ChunkOutput {
    routed: RoutedCircuit,
    report: ChunkReport,
}

fn compile_chunk(
    index: usize,
    sub: &Circuit,
    map: &CouplingMap,
    router: RouterMode,
    is_last: bool,
) -> Result<ChunkOutput, ChunkError> {
    let t = Instant::now();
    let mut routed = router.route(sub, map)?;
    let route_seconds = t.elapsed().as_secs_f64();
    let routing_swaps = routed.inserted_swaps;
    let t = Instant::now();
    let mut permutation_swaps = 0;
    if !is_last {
        let plan = build_permutation(&routed.final_layout, map)?;
        permutation_swaps = plan.swaps.len() as u64;
        routed.circuit.instructions.extend(permutation_instructions(&plan));
        routed.final_layout = plan.apply();
    }
    let permute_seconds = t.elapsed().as_secs_f64();
    let ends_trivial = routed.final_layout.is_trivial();
    Ok(ChunkOutput {
        report: ChunkReport {
            index,
            gates: sub.gate_count(),
            routing_swaps,
            permutation_swaps,
            route_seconds,
            permute_seconds,
            ends_trivial,
        },
        routed,
    })
}

fn worker_pool(workers: usize) -> Result<rayon::ThreadPool, PipelineError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .thread_name(|i| format!("qsplit-worker-{i}"))
        .build()
        .map_err(|e| PipelineError::Pool(e.to_string()))
}

/// Compiles `circuit` as `n_sc` sub-circuits on `workers` threads
/// (default: one per sub-circuit).
///
/// The output does not depend on the worker count or scheduling: workers
/// share nothing and results are assembled by chunk index.
pub fn compile_parallel(
    circuit: &Circuit,
    map: &CouplingMap,
    n_sc: usize,
    router: RouterMode,
    workers: Option<usize>,
) -> Result<ParallelCompilation, PipelineError> {
    let pool = worker_pool(workers.unwrap_or(n_sc))?;

    let t = Instant::now();
    let plan = partition(circuit, n_sc)?;
    let subs = plan.sub_circuits(circuit);
    let decomposition_seconds = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let (results, compile_memory) = memory::measure_phase(|| {
        pool.install(|| {
            subs.par_iter()
                .enumerate()
                .map(|(k, sub)| compile_chunk(k, sub, map, router, k + 1 == n_sc))
                .collect::<Vec<_>>()
        })
    });
    let compile_seconds = t.elapsed().as_secs_f64();
    drop(subs);

    let t = Instant::now();
    let mut outputs = Vec::with_capacity(n_sc);
    for (index, r) in results.into_iter().enumerate() {
        outputs.push(r.map_err(|source| PipelineError::Chunk { index, source })?);
    }
    let total: usize = outputs.iter().map(|o| o.routed.circuit.instructions.len()).sum();
    let mut instructions = Vec::with_capacity(total);
    let mut chunks = Vec::with_capacity(n_sc);
    let mut final_layout = Layout::trivial(map.n_phys());
    for out in outputs {
        instructions.extend(out.routed.circuit.instructions);
        final_layout = out.routed.final_layout;
        chunks.push(out.report);
    }
    let concatenation_seconds = t.elapsed().as_secs_f64();

    Ok(ParallelCompilation {
        circuit: Circuit {
            name: circuit.name.clone(),
            width: map.n_phys(),
            instructions,
        },
        final_layout,
        plan,
        chunks,
        decomposition_seconds,
        compile_seconds,
        concatenation_seconds,
        compile_memory,
    })
}

fn read_qasm(path: &Path) -> Result<Circuit, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut c = parse_qasm(&text).map_err(|source| PipelineError::Qasm {
        path: path.to_path_buf(),
        source,
    })?;
    if c.name == "circuit" {
        if let Some(stem) = path.file_stem() {
            c.name = stem.to_string_lossy().into_owned();
        }
    }
    Ok(c)
}

/// Serialises and, given a path, writes. Serialisation always happens so
/// that both timing windows contain it.
fn write_qasm(path: Option<&Path>, circuit: &Circuit, layout: &Layout) -> Result<(), PipelineError> {
    let text = serialize_qasm_with_layout(circuit, layout.phys_to_logical());
    match path {
        Some(path) => std::fs::write(path, text).map_err(|source| PipelineError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            std::hint::black_box(text);
            Ok(())
        }
    }
}

/// Options for [`profile_run`].
#[derive(Debug, Clone)]
pub struct ProfileOptions {
    pub n_sc: usize,
    pub router: RouterMode,
    pub workers: Option<usize>,
    pub parallel_output: PathBuf,
    /// Where the baseline output goes; `None` serialises it without writing.
    pub monolithic_output: Option<PathBuf>,
}

/// Everything measured by one monolithic-vs-parallel comparison.
#[derive(Debug, Clone)]
pub struct ProfileOutcome {
    pub report: CompileReport,
    pub parallel_circuit: Circuit,
    pub monolithic_circuit: Circuit,
    pub monolithic_layout: Layout,
}

/// Compiles the QASM file at `input` monolithically and in parallel under
/// the same router, timing each from file read to file write.
pub fn profile_run(input: &Path, map: &CouplingMap, opts: &ProfileOptions) -> Result<ProfileOutcome, PipelineError> {
    // Monolithic baseline.
    let ((mono, t_seq), mono_mem) = memory::measure_phase(|| -> Result<_, PipelineError> {
        let t = Instant::now();
        let circuit = read_qasm(input)?;
        let routed = opts.router.route(&circuit, map)?;
        write_qasm(opts.monolithic_output.as_deref(), &routed.circuit, &routed.final_layout)?;
        Ok((routed, t.elapsed().as_secs_f64()))
    })
    .transpose_phase()?;

    // Parallel run.
    let t_start = Instant::now();
    let (circuit, decomp_mem) = memory::measure_phase(|| read_qasm(input)).transpose_phase()?;
    let read_seconds = t_start.elapsed().as_secs_f64();
    let mut par = compile_parallel(&circuit, map, opts.n_sc, opts.router, opts.workers)?;
    let (_, concat_mem) = memory::measure_phase(|| write_qasm(Some(&opts.parallel_output), &par.circuit, &par.final_layout))
        .transpose_phase()?;
    let t_par = t_start.elapsed().as_secs_f64();
    let write_seconds = t_par - read_seconds - par.decomposition_seconds - par.compile_seconds - par.concatenation_seconds;
    par.decomposition_seconds += read_seconds;
    par.concatenation_seconds += write_seconds.max(0.0);

    let par_metrics = compute_metrics(&par.circuit)?;
    let mono_metrics = compute_metrics(&mono.circuit)?;
    let parallel = OutputStats::from(&par_metrics);
    let monolithic = OutputStats::from(&mono_metrics);
    let parallel_routing_swaps = par.routing_swaps();
    let accounting = SwapAccounting {
        monolithic_routing_swaps: mono.inserted_swaps,
        parallel_routing_swaps,
        permutation_swaps: par.permutation_swaps(),
        routing_swap_delta: parallel_routing_swaps as i64 - mono.inserted_swaps as i64,
    };

    let report = CompileReport {
        schema_version: REPORT_SCHEMA_VERSION,
        circuit: circuit.name.clone(),
        width: circuit.width,
        input_gates: circuit.gate_count() as u64,
        topology: map.kind().to_string(),
        n_phys: map.n_phys(),
        router: opts.router,
        n_sc: opts.n_sc,
        workers: opts.workers.unwrap_or(opts.n_sc),
        wall_time_sequential: t_seq,
        wall_time_parallel: t_par,
        speedup: t_seq / t_par,
        phase_times: PhaseTimes {
            decomposition: par.decomposition_seconds,
            compile: par.compile_seconds,
            concatenation: par.concatenation_seconds,
        },
        peak_memory: PeakMemory {
            decomposition: decomp_mem,
            compile: par.compile_memory,
            concatenation: concat_mem,
            monolithic: mono_mem,
            aggregate_compile_bytes: par.compile_memory.peak_bytes,
        },
        parallel,
        monolithic,
        overhead_gate: relative_overhead(parallel.gate_count, monolithic.gate_count),
        overhead_swap: relative_overhead(parallel.swap_count, monolithic.swap_count),
        overhead_depth: relative_overhead(parallel.depth, monolithic.depth),
        accounting,
        chunks: par.chunks.clone(),
        final_layout: par.final_layout.phys_to_logical().to_vec(),
    };

    Ok(ProfileOutcome {
        report,
        parallel_circuit: par.circuit,
        monolithic_circuit: mono.circuit,
        monolithic_layout: mono.final_layout,
    })
}

trait TransposePhase<T, E> {
    fn transpose_phase(self) -> Result<(T, PhaseMemory), E>;
}

impl<T, E> TransposePhase<T, E> for (Result<T, E>, PhaseMemory) {
    fn transpose_phase(self) -> Result<(T, PhaseMemory), E> {
        let (r, m) = self;
        r.map(|v| (v, m))
    }
}
