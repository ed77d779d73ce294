//! Processor connectivity graphs and shortest-path search.
//!
//! Grid maps are `2 x m` ladders with `m = ceil(width / 2)`, numbered row
//! major: `0..m` is the top row and `m..2m` the bottom row. Linear maps are
//! simple chains. Custom maps are read from JSON.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TopologyError {
    #[error("a coupling map needs at least 2 qubits, got {0}")]
    TooSmall(u32),
    #[error("edge ({0}, {1}) is a self-loop")]
    SelfLoop(u32, u32),
    #[error("edge ({a}, {b}) references a qubit outside 0..{n}")]
    EdgeOutOfRange { a: u32, b: u32, n: u32 },
    #[error("coupling map is not connected")]
    Disconnected,
    #[error("no path from {src} to {dst}")]
    Unreachable { src: u32, dst: u32 },
    #[error("physical qubit {0} is not on the map")]
    NodeOutOfRange(u32),
    #[error("invalid coupling map file: {0}")]
    File(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum TopologyKind {
    Grid { cols: u32 },
    Linear,
    Custom,
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyKind::Grid { cols } => write!(f, "grid(2x{cols})"),
            TopologyKind::Linear => f.write_str("linear"),
            TopologyKind::Custom => f.write_str("custom"),
        }
    }
}

/// On-disk form of a custom coupling map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CouplingMapFile {
    pub n_phys: u32,
    pub edges: Vec<[u32; 2]>,
}

/// Undirected, connected physical connectivity graph.
#[derive(Debug, Clone)]
pub struct CouplingMap {
    n_phys: u32,
    kind: TopologyKind,
    edges: Vec<(u32, u32)>,
    adjacency: Vec<Vec<u32>>,
    coupled: Vec<bool>,
    dist: Vec<u32>,
}

impl CouplingMap {
    pub fn grid(width: u32) -> Result<Self, TopologyError> {
        if width < 2 {
            return Err(TopologyError::TooSmall(width));
        }
        let m = width.div_ceil(2);
        let mut edges = Vec::with_capacity(3 * m as usize);
        for row in 0..2 {
            for c in 0..m - 1 {
                edges.push((row * m + c, row * m + c + 1));
            }
        }
        for c in 0..m {
            edges.push((c, c + m));
        }
        Self::build(2 * m, edges, TopologyKind::Grid { cols: m })
    }

    pub fn linear(width: u32) -> Result<Self, TopologyError> {
        if width < 2 {
            return Err(TopologyError::TooSmall(width));
        }
        Self::build(width, (0..width - 1).map(|i| (i, i + 1)).collect(), TopologyKind::Linear)
    }

    pub fn custom(n_phys: u32, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self, TopologyError> {
        if n_phys < 2 {
            return Err(TopologyError::TooSmall(n_phys));
        }
        Self::build(n_phys, edges.into_iter().collect(), TopologyKind::Custom)
    }

    pub fn from_json(text: &str) -> Result<Self, TopologyError> {
        let file: CouplingMapFile = serde_json::from_str(text).map_err(|e| TopologyError::File(e.to_string()))?;
        Self::custom(file.n_phys, file.edges.iter().map(|e| (e[0], e[1])))
    }

    pub fn from_json_file(path: &Path) -> Result<Self, TopologyError> {
        let text = std::fs::read_to_string(path).map_err(|e| TopologyError::File(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_file(&self) -> CouplingMapFile {
        CouplingMapFile {
            n_phys: self.n_phys,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }

    fn build(n_phys: u32, raw: Vec<(u32, u32)>, kind: TopologyKind) -> Result<Self, TopologyError> {
        let n = n_phys as usize;
        let mut edges = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            if a == b {
                return Err(TopologyError::SelfLoop(a, b));
            }
            if a >= n_phys || b >= n_phys {
                return Err(TopologyError::EdgeOutOfRange { a, b, n: n_phys });
            }
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        edges.dedup();

        let mut adjacency = vec![Vec::new(); n];
        let mut coupled = vec![false; n * n];
        for &(a, b) in &edges {
            adjacency[a as usize].push(b);
            adjacency[b as usize].push(a);
            coupled[a as usize * n + b as usize] = true;
            coupled[b as usize * n + a as usize] = true;
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }

        let mut dist = vec![u32::MAX; n * n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            let row = &mut dist[s * n..(s + 1) * n];
            row[s] = 0;
            queue.push_back(s as u32);
            while let Some(u) = queue.pop_front() {
                let du = row[u as usize];
                for &v in &adjacency[u as usize] {
                    if row[v as usize] == u32::MAX {
                        row[v as usize] = du + 1;
                        queue.push_back(v);
                    }
                }
            }
        }
        if dist.contains(&u32::MAX) {
            return Err(TopologyError::Disconnected);
        }

        Ok(CouplingMap {
            n_phys,
            kind,
            edges,
            adjacency,
            coupled,
            dist,
        })
    }

    pub fn n_phys(&self) -> u32 {
        self.n_phys
    }

    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    /// Normalised `(low, high)` pairs in ascending order.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, p: u32) -> &[u32] {
        &self.adjacency[p as usize]
    }

    pub fn is_coupled(&self, a: u32, b: u32) -> bool {
        let n = self.n_phys as usize;
        (a as usize) < n && (b as usize) < n && self.coupled[a as usize * n + b as usize]
    }

    /// Edge count of the shortest path between two physical qubits.
    pub fn distance(&self, a: u32, b: u32) -> u32 {
        self.dist[a as usize * self.n_phys as usize + b as usize]
    }

    fn heuristic(&self, a: u32, b: u32) -> u32 {
        match self.kind {
            TopologyKind::Grid { cols } => {
                let (ra, ca) = (a / cols, a % cols);
                let (rb, cb) = (b / cols, b % cols);
                ra.abs_diff(rb) + ca.abs_diff(cb)
            }
            TopologyKind::Linear => a.abs_diff(b),
            TopologyKind::Custom => 0,
        }
    }

    /// A* shortest path from `src` to `dst`, both endpoints included.
    ///
    /// Grid and linear maps use the Manhattan heuristic; custom maps use a
    /// zero heuristic. Frontier ties on `f` go to the lowest node index, so
    /// the result is fully deterministic.
    pub fn astar_path(&self, src: u32, dst: u32) -> Result<Vec<u32>, TopologyError> {
        for p in [src, dst] {
            if p >= self.n_phys {
                return Err(TopologyError::NodeOutOfRange(p));
            }
        }
        let n = self.n_phys as usize;
        let mut g = vec![u32::MAX; n];
        let mut parent = vec![u32::MAX; n];
        let mut closed = vec![false; n];
        let mut open = BinaryHeap::new();
        g[src as usize] = 0;
        open.push(Reverse((self.heuristic(src, dst), src)));
        while let Some(Reverse((_, u))) = open.pop() {
            if closed[u as usize] {
                continue;
            }
            if u == dst {
                let mut path = vec![dst];
                let mut cur = dst;
                while cur != src {
                    cur = parent[cur as usize];
                    path.push(cur);
                }
                path.reverse();
                return Ok(path);
            }
            closed[u as usize] = true;
            let gu = g[u as usize] + 1;
            for &v in &self.adjacency[u as usize] {
                if !closed[v as usize] && gu < g[v as usize] {
                    g[v as usize] = gu;
                    parent[v as usize] = u;
                    open.push(Reverse((gu + self.heuristic(v, dst), v)));
                }
            }
        }
        Err(TopologyError::Unreachable { src, dst })
    }
}
