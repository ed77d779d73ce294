//! Circuit intermediate representation.
//!
//! A [`Circuit`] is a flat, ordered list of [`Instruction`]s over a single
//! qubit register. The list order is the total temporal order used when
//! splitting and concatenating circuits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

/// Gate identifiers of the canonical gate set, plus `Barrier`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    T,
    Rx,
    Ry,
    Rz,
    U,
    Cx,
    Cz,
    Swap,
    Barrier,
}

impl GateKind {
    pub const ONE_QUBIT: [GateKind; 10] = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::T,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::U,
    ];
    pub const TWO_QUBIT: [GateKind; 3] = [GateKind::Cx, GateKind::Cz, GateKind::Swap];

    /// Number of qubit operands, `None` for barriers (any number).
    pub fn arity(self) -> Option<usize> {
        match self {
            GateKind::Cx | GateKind::Cz | GateKind::Swap => Some(2),
            GateKind::Barrier => None,
            _ => Some(1),
        }
    }

    pub fn num_params(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz => 1,
            GateKind::U => 3,
            _ => 0,
        }
    }

    pub fn is_barrier(self) -> bool {
        self == GateKind::Barrier
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::T => "t",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::U => "u",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Swap => "swap",
            GateKind::Barrier => "barrier",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = ();

    /// Accepts canonical names and the common OpenQASM 2.0 aliases
    /// (`U`, `u3`, `CX`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "h" => GateKind::H,
            "x" => GateKind::X,
            "y" => GateKind::Y,
            "z" => GateKind::Z,
            "s" => GateKind::S,
            "t" => GateKind::T,
            "rx" => GateKind::Rx,
            "ry" => GateKind::Ry,
            "rz" => GateKind::Rz,
            "u" | "u3" | "U" => GateKind::U,
            "cx" | "CX" => GateKind::Cx,
            "cz" => GateKind::Cz,
            "swap" => GateKind::Swap,
            "barrier" => GateKind::Barrier,
            _ => return Err(()),
        })
    }
}

pub type Qubits = SmallVec<[u32; 2]>;
pub type Params = SmallVec<[f64; 3]>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instruction {
    pub kind: GateKind,
    pub params: Params,
    pub qubits: Qubits,
}

impl Instruction {
    pub fn new(kind: GateKind, params: &[f64], qubits: &[u32]) -> Self {
        Instruction {
            kind,
            params: Params::from_slice(params),
            qubits: Qubits::from_slice(qubits),
        }
    }

    pub fn one(kind: GateKind, q: u32) -> Self {
        Self::new(kind, &[], &[q])
    }

    pub fn two(kind: GateKind, a: u32, b: u32) -> Self {
        Self::new(kind, &[], &[a, b])
    }

    pub fn swap(a: u32, b: u32) -> Self {
        Self::two(GateKind::Swap, a, b)
    }

    pub fn barrier(qubits: impl IntoIterator<Item = u32>) -> Self {
        Instruction {
            kind: GateKind::Barrier,
            params: Params::new(),
            qubits: qubits.into_iter().collect(),
        }
    }

    pub fn is_barrier(&self) -> bool {
        self.kind.is_barrier()
    }

    pub fn is_two_qubit(&self) -> bool {
        self.kind.arity() == Some(2)
    }

    pub fn acts_on(&self, q: u32) -> bool {
        self.qubits.contains(&q)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CircuitError {
    #[error("instruction {index}: qubit {qubit} out of range for width {width}")]
    QubitOutOfRange { index: usize, qubit: u32, width: u32 },
    #[error("instruction {index}: {kind} expects {expected} qubit(s), got {got}")]
    Arity {
        index: usize,
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("instruction {index}: {kind} expects {expected} parameter(s), got {got}")]
    Params {
        index: usize,
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("instruction {index}: repeated qubit {qubit}")]
    RepeatedQubit { index: usize, qubit: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub name: String,
    pub width: u32,
    pub instructions: Vec<Instruction>,
}

impl Circuit {
    pub fn new(name: impl Into<String>, width: u32) -> Self {
        Circuit {
            name: name.into(),
            width,
            instructions: Vec::new(),
        }
    }

    /// Builds a circuit and checks every instruction invariant.
    pub fn from_instructions(
        name: impl Into<String>,
        width: u32,
        instructions: Vec<Instruction>,
    ) -> Result<Self, CircuitError> {
        let c = Circuit {
            name: name.into(),
            width,
            instructions,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        for (index, inst) in self.instructions.iter().enumerate() {
            validate_instruction(index, inst, self.width)?;
        }
        Ok(())
    }

    pub fn push(&mut self, inst: Instruction) {
        self.instructions.push(inst);
    }

    /// Number of non-barrier instructions.
    pub fn gate_count(&self) -> usize {
        self.instructions.iter().filter(|i| !i.is_barrier()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }
}

pub(crate) fn validate_instruction(
    index: usize,
    inst: &Instruction,
    width: u32,
) -> Result<(), CircuitError> {
    if let Some(expected) = inst.kind.arity() {
        if inst.qubits.len() != expected {
            return Err(CircuitError::Arity {
                index,
                kind: inst.kind,
                expected,
                got: inst.qubits.len(),
            });
        }
    }
    if inst.params.len() != inst.kind.num_params() {
        return Err(CircuitError::Params {
            index,
            kind: inst.kind,
            expected: inst.kind.num_params(),
            got: inst.params.len(),
        });
    }
    for (k, &q) in inst.qubits.iter().enumerate() {
        if q >= width {
            return Err(CircuitError::QubitOutOfRange {
                index,
                qubit: q,
                width,
            });
        }
        if inst.qubits[..k].contains(&q) {
            return Err(CircuitError::RepeatedQubit { index, qubit: q });
        }
    }
    Ok(())
}
