//! Permutation circuits that return a routed sub-circuit to the trivial
//! layout, so the next sub-circuit can be appended unchanged.
//!
//! The plan is built greedily: among all displaced logical qubits, take the
//! one closest to its home position (ties to the lowest logical index), walk
//! it home along its A* path one SWAP per hop, then re-measure every
//! distance. This repeats until each qubit's home-to-current path is a single
//! node.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Instruction};
use crate::router::{Layout, LayoutError, RoutedCircuit};
use crate::topology::{CouplingMap, TopologyError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermuteError {
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("permutation did not converge within {0} iterations")]
    Stalled(usize),
    #[error("plan was built for a different layout than the sub-circuit's final layout")]
    PlanMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationPlan {
    /// Physical pairs to swap, in order.
    pub swaps: Vec<(u32, u32)>,
    pub source_layout: Layout,
    /// Summed home distance (in edges) before each outer iteration; the last
    /// entry is always 0.
    pub displacement_history: Vec<u64>,
}

impl PermutationPlan {
    pub fn len(&self) -> usize {
        self.swaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.swaps.is_empty()
    }

    /// Replays the swaps onto the source layout.
    pub fn apply(&self) -> Layout {
        let mut l = self.source_layout.clone();
        for &(a, b) in &self.swaps {
            l.swap_physical(a, b);
        }
        l
    }
}

pub fn build_permutation(final_layout: &Layout, map: &CouplingMap) -> Result<PermutationPlan, PermuteError> {
    let n = map.n_phys();
    if final_layout.len() != n as usize {
        return Err(LayoutError::SizeMismatch {
            expected: n as usize,
            got: final_layout.len(),
        }
        .into());
    }
    let mut layout = final_layout.clone();
    let mut swaps = Vec::new();
    let mut history = Vec::new();
    let max_iterations = (n as usize).pow(2) + 1;

    loop {
        let mut total = 0u64;
        let mut closest: Option<(u32, u32)> = None;
        for q in 0..n {
            let d = map.distance(q, layout.physical_of(q));
            total += d as u64;
            if d > 0 && closest.is_none_or(|(_, best)| d < best) {
                closest = Some((q, d));
            }
        }
        history.push(total);
        let Some((q, _)) = closest else { break };
        if history.len() > max_iterations {
            return Err(PermuteError::Stalled(max_iterations));
        }
        let path = map.astar_path(q, layout.physical_of(q))?;
        for k in (1..path.len()).rev() {
            let (a, b) = (path[k], path[k - 1]);
            layout.swap_physical(a, b);
            swaps.push((a.min(b), a.max(b)));
        }
    }

    Ok(PermutationPlan {
        swaps,
        source_layout: final_layout.clone(),
        displacement_history: history,
    })
}

/// Validates a raw `phys_to_logical` vector and builds its plan.
pub fn build_permutation_from_slice(phys_to_logical: &[u32], map: &CouplingMap) -> Result<PermutationPlan, PermuteError> {
    let layout = Layout::from_phys_to_logical(phys_to_logical.to_vec())?;
    build_permutation(&layout, map)
}

/// The permutation wrapped in full-width barriers, as instructions.
pub fn permutation_instructions(plan: &PermutationPlan) -> Vec<Instruction> {
    let n = plan.source_layout.len() as u32;
    let mut out = Vec::with_capacity(plan.swaps.len() + 2);
    out.push(Instruction::barrier(0..n));
    out.extend(plan.swaps.iter().map(|&(a, b)| Instruction::swap(a, b)));
    out.push(Instruction::barrier(0..n));
    out
}

/// `sub.circuit`, a barrier, the plan's SWAPs, and a closing barrier.
pub fn append_permutation(sub: &RoutedCircuit, plan: &PermutationPlan) -> Result<Circuit, PermuteError> {
    if plan.source_layout != sub.final_layout {
        return Err(PermuteError::PlanMismatch);
    }
    let mut c = sub.circuit.clone();
    c.instructions.extend(permutation_instructions(plan));
    Ok(c)
}
