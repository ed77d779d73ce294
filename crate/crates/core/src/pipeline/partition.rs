use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::Circuit;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("need at least one sub-circuit")]
    NoChunks,
    #[error("cannot split {n_g} gates into {n_sc} sub-circuits")]
    TooManyChunks { n_g: usize, n_sc: usize },
}

/// Split of an instruction list into `n_sc` contiguous sub-circuits.
///
/// Every chunk gets `g_sc = floor(n_g / n_sc)` gates and the final chunk also
/// takes the `n_g mod n_sc` remainder. Counts exclude barriers; a barrier
/// travels with the chunk that contains the next gate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionPlan {
    pub n_g: usize,
    pub n_sc: usize,
    pub g_sc: usize,
    /// Instruction index range of each chunk.
    pub ranges: Vec<Range<usize>>,
    /// Gate count of each chunk.
    pub gate_counts: Vec<usize>,
}

pub fn chunk_sizes(n_g: usize, n_sc: usize) -> Result<Vec<usize>, PartitionError> {
    if n_sc == 0 {
        return Err(PartitionError::NoChunks);
    }
    if n_sc > n_g {
        return Err(PartitionError::TooManyChunks { n_g, n_sc });
    }
    let g_sc = n_g / n_sc;
    let mut sizes = vec![g_sc; n_sc];
    sizes[n_sc - 1] += n_g % n_sc;
    Ok(sizes)
}

pub fn partition(circuit: &Circuit, n_sc: usize) -> Result<PartitionPlan, PartitionError> {
    let n_g = circuit.gate_count();
    let gate_counts = chunk_sizes(n_g, n_sc)?;
    let mut ranges = Vec::with_capacity(n_sc);
    let mut start = 0;
    let mut idx = 0;
    for &size in &gate_counts[..n_sc - 1] {
        let mut seen = 0;
        while seen < size {
            if !circuit.instructions[idx].is_barrier() {
                seen += 1;
            }
            idx += 1;
        }
        ranges.push(start..idx);
        start = idx;
    }
    ranges.push(start..circuit.instructions.len());
    Ok(PartitionPlan {
        n_g,
        n_sc,
        g_sc: n_g / n_sc,
        ranges,
        gate_counts,
    })
}

impl PartitionPlan {
    /// The chunks as standalone circuits on the original register.
    pub fn sub_circuits(&self, circuit: &Circuit) -> Vec<Circuit> {
        self.ranges
            .iter()
            .enumerate()
            .map(|(k, r)| Circuit {
                name: format!("{}_sc{k}", circuit.name),
                width: circuit.width,
                instructions: circuit.instructions[r.clone()].to_vec(),
            })
            .collect()
    }
}
