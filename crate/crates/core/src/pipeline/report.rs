use serde::{Deserialize, Serialize};

use crate::metrics::CircuitMetrics;
use crate::router::RouterMode;

use super::memory::PhaseMemory;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimes {
    /// Read, parse, and split into sub-circuits.
    pub decomposition: f64,
    /// Routing plus permutation synthesis in every worker.
    pub compile: f64,
    /// Ordered concatenation, serialisation, and write.
    pub concatenation: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PeakMemory {
    pub decomposition: PhaseMemory,
    pub compile: PhaseMemory,
    pub concatenation: PhaseMemory,
    pub monolithic: PhaseMemory,
    /// Concurrent footprint of the compile phase. Workers are threads of one
    /// process, so the measured compile peak already covers all of them.
    pub aggregate_compile_bytes: Option<u64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputStats {
    pub gate_count: u64,
    pub swap_count: u64,
    pub depth: u64,
}

impl From<&CircuitMetrics> for OutputStats {
    fn from(m: &CircuitMetrics) -> Self {
        OutputStats {
            gate_count: m.gate_count(),
            swap_count: m.swap_count,
            depth: m.depth,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChunkReport {
    pub index: usize,
    pub gates: usize,
    pub routing_swaps: u64,
    pub permutation_swaps: u64,
    pub route_seconds: f64,
    pub permute_seconds: f64,
    /// The chunk (with its permutation, if any) ends at the trivial layout.
    pub ends_trivial: bool,
}

/// Where the parallel output's extra gates come from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapAccounting {
    pub monolithic_routing_swaps: u64,
    pub parallel_routing_swaps: u64,
    pub permutation_swaps: u64,
    /// `parallel_routing_swaps - monolithic_routing_swaps`.
    pub routing_swap_delta: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompileReport {
    pub schema_version: u32,
    pub circuit: String,
    pub width: u32,
    pub input_gates: u64,
    pub topology: String,
    pub n_phys: u32,
    pub router: RouterMode,
    pub n_sc: usize,
    pub workers: usize,
    pub wall_time_sequential: f64,
    pub wall_time_parallel: f64,
    pub speedup: f64,
    pub phase_times: PhaseTimes,
    pub peak_memory: PeakMemory,
    pub parallel: OutputStats,
    pub monolithic: OutputStats,
    /// Relative overheads `(parallel - monolithic) / monolithic` as fractions.
    pub overhead_gate: f64,
    pub overhead_swap: f64,
    pub overhead_depth: f64,
    pub accounting: SwapAccounting,
    pub chunks: Vec<ChunkReport>,
    pub final_layout: Vec<u32>,
}

/// `(parallel - monolithic) / monolithic`, with a zero baseline treated as 1
/// so the value stays finite.
pub fn relative_overhead(parallel: u64, monolithic: u64) -> f64 {
    (parallel as f64 - monolithic as f64) / monolithic.max(1) as f64
}

impl CompileReport {
    /// Checks that the gate-count difference is fully explained by the
    /// permutation SWAPs and the change in routing SWAPs.
    pub fn reconciles(&self) -> bool {
        let diff = self.parallel.gate_count as i64 - self.monolithic.gate_count as i64;
        let a = &self.accounting;
        let chunk_routing: u64 = self.chunks.iter().map(|c| c.routing_swaps).sum();
        let chunk_perm: u64 = self.chunks.iter().map(|c| c.permutation_swaps).sum();
        diff == a.permutation_swaps as i64 + a.routing_swap_delta
            && a.routing_swap_delta == a.parallel_routing_swaps as i64 - a.monolithic_routing_swaps as i64
            && chunk_routing == a.parallel_routing_swaps
            && chunk_perm == a.permutation_swaps
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}
