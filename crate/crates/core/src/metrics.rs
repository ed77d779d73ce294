//! Structural circuit metrics: depth, gate counts and gate density.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, GateKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("circuit has no gates; density is undefined at depth 0")]
    EmptyCircuit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitMetrics {
    pub depth: u64,
    pub width: u32,
    pub n_q1: u64,
    pub n_q2: u64,
    pub swap_count: u64,
    pub density: f64,
}

impl CircuitMetrics {
    /// Qubit-slots occupied by gates, `n_q1 + 2 * n_q2`.
    pub fn occupied_slots(&self) -> u64 {
        self.n_q1 + 2 * self.n_q2
    }

    pub fn gate_count(&self) -> u64 {
        self.n_q1 + self.n_q2
    }
}

/// Critical-path length. Each gate advances the frontier of its operands to
/// one past their current maximum; barriers are transparent.
pub fn depth(circuit: &Circuit) -> u64 {
    let mut frontier = vec![0u64; circuit.width as usize];
    let mut depth = 0;
    for inst in &circuit.instructions {
        if inst.is_barrier() {
            continue;
        }
        let level = inst
            .qubits
            .iter()
            .map(|&q| frontier[q as usize])
            .max()
            .unwrap_or(0)
            + 1;
        for &q in &inst.qubits {
            frontier[q as usize] = level;
        }
        depth = depth.max(level);
    }
    depth
}

pub fn compute_metrics(circuit: &Circuit) -> Result<CircuitMetrics, MetricsError> {
    let mut n_q1 = 0;
    let mut n_q2 = 0;
    let mut swap_count = 0;
    for inst in &circuit.instructions {
        match inst.kind.arity() {
            Some(1) => n_q1 += 1,
            Some(2) => {
                n_q2 += 1;
                if inst.kind == GateKind::Swap {
                    swap_count += 1;
                }
            }
            _ => {}
        }
    }
    let depth = depth(circuit);
    if depth == 0 {
        return Err(MetricsError::EmptyCircuit);
    }
    let density = (n_q1 + 2 * n_q2) as f64 / (depth as f64 * circuit.width as f64);
    Ok(CircuitMetrics {
        depth,
        width: circuit.width,
        n_q1,
        n_q2,
        swap_count,
        density,
    })
}
