//! Parallel compilation of long quantum circuits for nearest-neighbour
//! hardware.
//!
//! A circuit is cut into contiguous sub-circuits, each is routed on its own
//! worker from the trivial layout, every sub-circuit except the last is
//! followed by a SWAP network that restores the trivial layout, and the
//! pieces are concatenated in order. The crate also carries the supporting
//! pieces: an OpenQASM 2.0 reader and writer, circuit metrics, coupling maps
//! with A* search, a density-controlled random circuit generator, two
//! routers, and a small statevector simulator for equivalence checks.

pub mod circuit;
pub mod densitygen;
pub mod metrics;
pub mod permuter;
pub mod pipeline;
pub mod qasm;
pub mod router;
pub mod topology;
pub mod verifier;

use thiserror::Error;

pub use circuit::{Circuit, CircuitError, GateKind, Instruction};
pub use densitygen::{generate_with_density, CorpusGrid, DensitySpec, GenError};
pub use metrics::{compute_metrics, CircuitMetrics, MetricsError};
pub use permuter::{build_permutation, PermutationPlan, PermuteError};
pub use pipeline::{compile_parallel, profile_run, CompileReport, ParallelCompilation, PipelineError, ProfileOptions};
pub use qasm::{parse_qasm, serialize_qasm, QasmError};
pub use router::{Layout, RouteError, RoutedCircuit, RouterMode};
pub use topology::{CouplingMap, TopologyError, TopologyKind};
pub use verifier::{check_nna, fidelity_under_layout, simulate, SimError, Statevector};

/// Any failure surfaced by the library, for callers that only need to
/// classify errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Qasm(#[from] QasmError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Route(#[from] RouteError),
    #[error(transparent)]
    Permute(#[from] PermuteError),
    #[error(transparent)]
    Generate(#[from] GenError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Sim(#[from] SimError),
}
