//! Correctness oracles for small circuits: a dense statevector simulator,
//! layout-aware fidelity, and a nearest-neighbour compliance check.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, GateKind, Instruction};
use crate::router::Layout;
use crate::topology::CouplingMap;

/// Largest register [`simulate`] accepts (2^14 amplitudes).
pub const MAX_SIM_QUBITS: u32 = 14;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("cannot simulate {0} qubits (limit {MAX_SIM_QUBITS})")]
    TooWide(u32),
    #[error("width mismatch: original {original} qubits, compiled {compiled}, layout {layout}")]
    WidthMismatch {
        original: u32,
        compiled: u32,
        layout: usize,
    },
}

/// Amplitudes over `2^width` basis states; qubit `k` is bit `k` of the index.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    pub width: u32,
    pub amplitudes: Vec<Complex64>,
}

impl Statevector {
    pub fn zero(width: u32) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << width];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Statevector { width, amplitudes }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn apply_1q(&mut self, q: u32, m: [[Complex64; 2]; 2]) {
        let bit = 1usize << q;
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let (a, b) = (self.amplitudes[i], self.amplitudes[i | bit]);
                self.amplitudes[i] = m[0][0] * a + m[0][1] * b;
                self.amplitudes[i | bit] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    fn apply(&mut self, inst: &Instruction) {
        match inst.kind {
            GateKind::Barrier => {}
            GateKind::Cx => {
                let (c, t) = (1usize << inst.qubits[0], 1usize << inst.qubits[1]);
                for i in 0..self.amplitudes.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amplitudes.swap(i, i | t);
                    }
                }
            }
            GateKind::Cz => {
                let mask = (1usize << inst.qubits[0]) | (1usize << inst.qubits[1]);
                for (i, a) in self.amplitudes.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a = -*a;
                    }
                }
            }
            GateKind::Swap => {
                let (a, b) = (1usize << inst.qubits[0], 1usize << inst.qubits[1]);
                for i in 0..self.amplitudes.len() {
                    if i & a != 0 && i & b == 0 {
                        self.amplitudes.swap(i, i ^ a ^ b);
                    }
                }
            }
            kind => self.apply_1q(inst.qubits[0], single_qubit_matrix(kind, &inst.params)),
        }
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Statevector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm_sqr()
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// 2x2 unitary of a one-qubit canonical gate.
pub fn single_qubit_matrix(kind: GateKind, params: &[f64]) -> [[Complex64; 2]; 2] {
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    let half = |i: usize| params[i] / 2.0;
    match kind {
        GateKind::H => {
            let r = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            [[r, r], [r, -r]]
        }
        GateKind::X => [[o, l], [l, o]],
        GateKind::Y => [[o, c(0.0, -1.0)], [c(0.0, 1.0), o]],
        GateKind::Z => [[l, o], [o, -l]],
        GateKind::S => [[l, o], [o, c(0.0, 1.0)]],
        GateKind::T => [[l, o], [o, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]],
        GateKind::Rx => {
            let (s, co) = half(0).sin_cos();
            [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
        }
        GateKind::Ry => {
            let (s, co) = half(0).sin_cos();
            [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
        }
        GateKind::Rz => [
            [Complex64::from_polar(1.0, -half(0)), o],
            [o, Complex64::from_polar(1.0, half(0))],
        ],
        GateKind::U => {
            let (theta, phi, lambda) = (params[0], params[1], params[2]);
            let (s, co) = (theta / 2.0).sin_cos();
            [
                [c(co, 0.0), -Complex64::from_polar(s, lambda)],
                [Complex64::from_polar(s, phi), Complex64::from_polar(co, phi + lambda)],
            ]
        }
        GateKind::Cx | GateKind::Cz | GateKind::Swap | GateKind::Barrier => {
            panic!("{kind} is not a one-qubit gate")
        }
    }
}

/// Applies the circuit to `|0...0>`, skipping barriers.
pub fn simulate(circuit: &Circuit) -> Result<Statevector, SimError> {
    if circuit.width > MAX_SIM_QUBITS {
        return Err(SimError::TooWide(circuit.width));
    }
    let mut sv = Statevector::zero(circuit.width);
    for inst in &circuit.instructions {
        sv.apply(inst);
    }
    Ok(sv)
}

/// Fidelity between `original` and a physical-index `compiled` circuit whose
/// physical position `p` ends up holding logical qubit `final_layout[p]`.
///
/// The compiled state is relabelled into logical order before the overlap is
/// taken. Logical qubits at or above `original.width` are spare qubits that
/// must remain in `|0>`.
pub fn fidelity_under_layout(original: &Circuit, compiled: &Circuit, final_layout: &Layout) -> Result<f64, SimError> {
    if final_layout.len() != compiled.width as usize || original.width > compiled.width {
        return Err(SimError::WidthMismatch {
            original: original.width,
            compiled: compiled.width,
            layout: final_layout.len(),
        });
    }
    let psi_orig = simulate(original)?;
    let psi_comp = simulate(compiled)?;
    let map = final_layout.phys_to_logical();
    let mut overlap = Complex64::new(0.0, 0.0);
    for (x, amp) in psi_comp.amplitudes.iter().enumerate() {
        let mut y = 0usize;
        for (p, &l) in map.iter().enumerate() {
            if x >> p & 1 == 1 {
                y |= 1 << l;
            }
        }
        if let Some(o) = psi_orig.amplitudes.get(y) {
            overlap += o.conj() * amp;
        }
    }
    Ok(overlap.norm_sqr())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NnaViolation {
    pub index: usize,
    pub qubits: (u32, u32),
}

/// Every two-qubit gate acting on an uncoupled physical pair.
pub fn check_nna(circuit: &Circuit, map: &CouplingMap) -> Vec<NnaViolation> {
    circuit
        .instructions
        .iter()
        .enumerate()
        .filter(|(_, inst)| inst.is_two_qubit() && !map.is_coupled(inst.qubits[0], inst.qubits[1]))
        .map(|(index, inst)| NnaViolation {
            index,
            qubits: (inst.qubits[0], inst.qubits[1]),
        })
        .collect()
}
