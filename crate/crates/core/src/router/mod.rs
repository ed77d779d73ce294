//! SWAP-inserting qubit routers.
//!
//! Both routers start from the trivial layout and return a physical-index
//! circuit in which every two-qubit gate acts on a coupled pair, plus the
//! layout reached after the last inserted SWAP.

mod basic;
mod layout;
mod lookahead;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Instruction};
use crate::topology::{CouplingMap, TopologyError};

pub use basic::route_basic;
pub use layout::{Layout, LayoutError};
pub use lookahead::route_lookahead;

pub const DEFAULT_LOOKAHEAD_WINDOW: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RouteError {
    #[error("circuit width {width} exceeds the {n_phys} physical qubits of the map")]
    WidthExceedsMap { width: u32, n_phys: u32 },
    #[error("lookahead window must be at least 1")]
    EmptyWindow,
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoutedCircuit {
    pub circuit: Circuit,
    pub final_layout: Layout,
    pub inserted_swaps: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum RouterMode {
    Basic,
    Lookahead { window: usize },
}

impl Default for RouterMode {
    fn default() -> Self {
        RouterMode::Lookahead {
            window: DEFAULT_LOOKAHEAD_WINDOW,
        }
    }
}

impl RouterMode {
    pub fn route(&self, circuit: &Circuit, map: &CouplingMap) -> Result<RoutedCircuit, RouteError> {
        match *self {
            RouterMode::Basic => route_basic(circuit, map),
            RouterMode::Lookahead { window } => route_lookahead(circuit, map, window),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RouterMode::Basic => "basic",
            RouterMode::Lookahead { .. } => "lookahead",
        }
    }
}

impl fmt::Display for RouterMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RouterMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "basic" => Ok(RouterMode::Basic),
            "lookahead" => Ok(RouterMode::default()),
            other => Err(format!("unknown router `{other}` (expected basic or lookahead)")),
        }
    }
}

fn check_width(circuit: &Circuit, map: &CouplingMap) -> Result<(), RouteError> {
    if circuit.width > map.n_phys() {
        return Err(RouteError::WidthExceedsMap {
            width: circuit.width,
            n_phys: map.n_phys(),
        });
    }
    Ok(())
}

/// Memoised A* paths for one routing call.
struct PathCache<'a> {
    map: &'a CouplingMap,
    paths: HashMap<(u32, u32), Vec<u32>>,
}

impl<'a> PathCache<'a> {
    fn new(map: &'a CouplingMap) -> Self {
        PathCache {
            map,
            paths: HashMap::new(),
        }
    }

    fn path(&mut self, src: u32, dst: u32) -> Result<&[u32], TopologyError> {
        if !self.paths.contains_key(&(src, dst)) {
            let p = self.map.astar_path(src, dst)?;
            self.paths.insert((src, dst), p);
        }
        Ok(&self.paths[&(src, dst)])
    }
}

/// Moves the logical qubit at physical `from` next to physical `to` along
/// the A* path, emitting every hop but the last as a SWAP.
fn bring_adjacent(
    paths: &mut PathCache<'_>,
    from: u32,
    to: u32,
    layout: &mut Layout,
    out: &mut Vec<Instruction>,
) -> Result<u64, TopologyError> {
    let path = paths.path(from, to)?;
    let hops = path.len().saturating_sub(2);
    for w in path[..hops + 1].windows(2) {
        layout.swap_physical(w[0], w[1]);
        out.push(Instruction::swap(w[0], w[1]));
    }
    Ok(hops as u64)
}

fn to_physical(inst: &Instruction, layout: &Layout) -> Instruction {
    Instruction {
        kind: inst.kind,
        params: inst.params.clone(),
        qubits: inst.qubits.iter().map(|&q| layout.physical_of(q)).collect(),
    }
}
