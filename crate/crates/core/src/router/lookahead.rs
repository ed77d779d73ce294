use std::cmp::Reverse;
use std::collections::BinaryHeap;

use smallvec::SmallVec;

use crate::circuit::{Circuit, Instruction};
use crate::topology::CouplingMap;

use super::{bring_adjacent, check_width, to_physical, Layout, PathCache, RouteError, RoutedCircuit};

const NONE: u32 = u32::MAX;

/// Per-qubit dependency chains of a circuit.
struct Dependencies {
    pending: Vec<u32>,
    successors: Vec<SmallVec<[u32; 2]>>,
}

impl Dependencies {
    fn new(circuit: &Circuit) -> Self {
        let n = circuit.instructions.len();
        let mut pending = vec![0u32; n];
        let mut successors = vec![SmallVec::new(); n];
        let mut last = vec![NONE; circuit.width as usize];
        for (i, inst) in circuit.instructions.iter().enumerate() {
            for &q in &inst.qubits {
                let prev = last[q as usize];
                if prev != NONE {
                    successors[prev as usize].push(i as u32);
                    pending[i] += 1;
                }
                last[q as usize] = i as u32;
            }
        }
        Dependencies { pending, successors }
    }
}

struct State<'a> {
    circuit: &'a Circuit,
    map: &'a CouplingMap,
    deps: Dependencies,
    layout: Layout,
    out: Vec<Instruction>,
    ready: BinaryHeap<Reverse<u32>>,
    front: Vec<u32>,
    done: Vec<bool>,
    two_qubit: Vec<u32>,
    head: usize,
}

impl<'a> State<'a> {
    fn executable(&self, inst: &Instruction) -> bool {
        !inst.is_two_qubit()
            || self.map.is_coupled(
                self.layout.physical_of(inst.qubits[0]),
                self.layout.physical_of(inst.qubits[1]),
            )
    }

    fn execute(&mut self, i: u32) {
        let inst = &self.circuit.instructions[i as usize];
        self.out.push(to_physical(inst, &self.layout));
        self.done[i as usize] = true;
        for k in 0..self.deps.successors[i as usize].len() {
            let s = self.deps.successors[i as usize][k];
            self.deps.pending[s as usize] -= 1;
            if self.deps.pending[s as usize] == 0 {
                self.ready.push(Reverse(s));
            }
        }
    }

    /// Emits everything executable; returns how many gates ran.
    fn drain(&mut self) -> usize {
        let mut ran = 0;
        loop {
            let mut progressed = false;
            let mut k = 0;
            while k < self.front.len() {
                let g = self.front[k];
                if self.executable(&self.circuit.instructions[g as usize]) {
                    self.front.remove(k);
                    self.execute(g);
                    ran += 1;
                    progressed = true;
                } else {
                    k += 1;
                }
            }
            while let Some(Reverse(i)) = self.ready.pop() {
                if self.executable(&self.circuit.instructions[i as usize]) {
                    self.execute(i);
                    ran += 1;
                    progressed = true;
                } else {
                    let pos = self.front.partition_point(|&g| g < i);
                    self.front.insert(pos, i);
                }
            }
            if !progressed {
                return ran;
            }
        }
    }

    /// Unresolved two-qubit gates in program order, at most `window` of them.
    fn window(&mut self, window: usize) -> SmallVec<[(u32, u32); 32]> {
        while self.head < self.two_qubit.len() && self.done[self.two_qubit[self.head] as usize] {
            self.head += 1;
        }
        self.two_qubit[self.head..]
            .iter()
            .filter(|&&g| !self.done[g as usize])
            .take(window)
            .map(|&g| {
                let q = &self.circuit.instructions[g as usize].qubits;
                (q[0], q[1])
            })
            .collect()
    }

    fn candidates(&self) -> Vec<(u32, u32)> {
        let mut cands = Vec::new();
        for &g in &self.front {
            for &q in &self.circuit.instructions[g as usize].qubits {
                let p = self.layout.physical_of(q);
                for &n in self.map.neighbors(p) {
                    cands.push((p.min(n), p.max(n)));
                }
            }
        }
        cands.sort_unstable();
        cands.dedup();
        cands
    }

    fn score(&self, gates: &[(u32, u32)], swap: (u32, u32)) -> u64 {
        let moved = |p: u32| {
            if p == swap.0 {
                swap.1
            } else if p == swap.1 {
                swap.0
            } else {
                p
            }
        };
        gates
            .iter()
            .map(|&(a, b)| {
                let pa = moved(self.layout.physical_of(a));
                let pb = moved(self.layout.physical_of(b));
                self.map.distance(pa, pb) as u64
            })
            .sum()
    }

    fn apply_swap(&mut self, a: u32, b: u32) {
        self.layout.swap_physical(a, b);
        self.out.push(Instruction::swap(a, b));
    }
}

/// Front-layer router with a fixed lookahead window.
///
/// Gates whose dependencies are met and whose operands are coupled run
/// immediately. When the whole front is blocked, every SWAP on an edge
/// touching a blocked gate is scored by the summed distance of the blocked
/// gates, then by the summed distance of the next `lookahead_window`
/// unresolved two-qubit gates; the lowest score wins, and remaining ties go
/// to the lowest `(low, high)` edge. Undoing the previous SWAP is
/// never a candidate. If the front stalls for more than `2 * n_phys` SWAPs,
/// the earliest blocked gate is routed along its shortest path instead.
pub fn route_lookahead(
    circuit: &Circuit,
    map: &CouplingMap,
    lookahead_window: usize,
) -> Result<RoutedCircuit, RouteError> {
    check_width(circuit, map)?;
    if lookahead_window == 0 {
        return Err(RouteError::EmptyWindow);
    }
    let n = circuit.instructions.len();
    let deps = Dependencies::new(circuit);
    let mut state = State {
        circuit,
        map,
        ready: (0..n as u32)
            .filter(|&i| deps.pending[i as usize] == 0)
            .map(Reverse)
            .collect(),
        deps,
        layout: Layout::trivial(map.n_phys()),
        out: Vec::with_capacity(n + n / 2),
        front: Vec::new(),
        done: vec![false; n],
        two_qubit: (0..n as u32)
            .filter(|&i| circuit.instructions[i as usize].is_two_qubit())
            .collect(),
        head: 0,
    };
    let mut paths = PathCache::new(map);
    let stall_limit = 2 * map.n_phys() as usize;
    let mut inserted = 0u64;
    let mut stalled = 0usize;
    let mut last_swap = None;

    loop {
        if state.drain() > 0 {
            stalled = 0;
        }
        if state.front.is_empty() {
            break;
        }
        if stalled >= stall_limit {
            let g = state.front[0] as usize;
            let q = &circuit.instructions[g].qubits;
            let (a, b) = (state.layout.physical_of(q[0]), state.layout.physical_of(q[1]));
            inserted += bring_adjacent(&mut paths, a, b, &mut state.layout, &mut state.out)?;
            last_swap = None;
            stalled = 0;
            continue;
        }
        let gates = state.window(lookahead_window);
        let front: SmallVec<[(u32, u32); 32]> = state
            .front
            .iter()
            .map(|&g| {
                let q = &circuit.instructions[g as usize].qubits;
                (q[0], q[1])
            })
            .collect();
        let mut best: Option<((u32, u32), (u64, u64))> = None;
        for cand in state.candidates() {
            if Some(cand) == last_swap {
                continue;
            }
            let s = (state.score(&front, cand), state.score(&gates, cand));
            if best.is_none_or(|(_, b)| s < b) {
                best = Some((cand, s));
            }
        }
        let ((a, b), _) = best.expect("a blocked gate always has a neighbouring edge");
        state.apply_swap(a, b);
        last_swap = Some((a, b));
        inserted += 1;
        stalled += 1;
    }

    Ok(RoutedCircuit {
        circuit: Circuit {
            name: circuit.name.clone(),
            width: map.n_phys(),
            instructions: state.out,
        },
        final_layout: state.layout,
        inserted_swaps: inserted,
    })
}
