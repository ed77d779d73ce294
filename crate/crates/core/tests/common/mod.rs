#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use qsplit_core::{Circuit, GateKind, Instruction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> String {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn six_qubit_example() -> Circuit {
    qsplit_core::parse_qasm(&fixture("six_qubit_example.qasm")).unwrap()
}

/// Uniform random gates over the whole canonical set, any qubit pair.
pub fn random_circuit(width: u32, gates: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(format!("rand_{seed}"), width);
    for _ in 0..gates {
        if width >= 2 && rng.gen_bool(0.4) {
            let a = rng.gen_range(0..width);
            let mut b = rng.gen_range(0..width - 1);
            if b >= a {
                b += 1;
            }
            let kind = GateKind::TWO_QUBIT[rng.gen_range(0..3)];
            c.push(Instruction::two(kind, a, b));
        } else {
            let kind = GateKind::ONE_QUBIT[rng.gen_range(0..GateKind::ONE_QUBIT.len())];
            let params: Vec<f64> = (0..kind.num_params()).map(|_| rng.gen_range(-PI..PI)).collect();
            c.push(Instruction::new(kind, &params, &[rng.gen_range(0..width)]));
        }
    }
    c
}

/// Like [`random_circuit`] with barriers sprinkled in.
pub fn random_circuit_with_barriers(width: u32, gates: usize, seed: u64) -> Circuit {
    let mut c = random_circuit(width, gates, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut out = Vec::new();
    for inst in c.instructions.drain(..) {
        if rng.gen_bool(0.05) {
            let lo = rng.gen_range(0..width);
            out.push(Instruction::barrier(lo..width));
        }
        out.push(inst);
    }
    c.instructions = out;
    c
}

/// Depth by explicit layering: a gate's layer is one past the deepest
/// earlier gate sharing a qubit with it. Quadratic, no frontier array.
pub fn layer_oracle(c: &Circuit) -> (u64, u64, u64) {
    let gates: Vec<&Instruction> = c.instructions.iter().filter(|i| !i.is_barrier()).collect();
    let mut layer = vec![0u64; gates.len()];
    for j in 0..gates.len() {
        let mut l = 1;
        for i in 0..j {
            if gates[i].qubits.iter().any(|q| gates[j].qubits.contains(q)) {
                l = l.max(layer[i] + 1);
            }
        }
        layer[j] = l;
    }
    let depth = layer.iter().copied().max().unwrap_or(0);
    let n_q2 = gates.iter().filter(|g| g.qubits.len() == 2).count() as u64;
    (depth, gates.len() as u64 - n_q2, n_q2)
}

type Matrix = Vec<Vec<Complex64>>;

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { cx(1.0, 0.0) } else { cx(0.0, 0.0) }).collect())
        .collect()
}

fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![cx(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![cx(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == cx(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

fn scale(a: &Matrix, s: Complex64) -> Matrix {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

fn pauli(c: char) -> Matrix {
    let (o, l, i) = (cx(0.0, 0.0), cx(1.0, 0.0), cx(0.0, 1.0));
    match c {
        'x' => vec![vec![o, l], vec![l, o]],
        'y' => vec![vec![o, -i], vec![i, o]],
        'z' => vec![vec![l, o], vec![o, -l]],
        _ => identity(2),
    }
}

/// exp(-i theta/2 P) = cos(theta/2) I - i sin(theta/2) P.
fn rotation(axis: char, theta: f64) -> Matrix {
    add(
        &scale(&identity(2), cx((theta / 2.0).cos(), 0.0)),
        &scale(&pauli(axis), cx(0.0, -(theta / 2.0).sin())),
    )
}

fn phase(lambda: f64) -> Matrix {
    let mut m = identity(2);
    m[1][1] = Complex64::from_polar(1.0, lambda);
    m
}

fn one_qubit(kind: GateKind, p: &[f64]) -> Matrix {
    let r = 1.0 / 2f64.sqrt();
    match kind {
        GateKind::H => scale(&add(&pauli('x'), &pauli('z')), cx(r, 0.0)),
        GateKind::X => pauli('x'),
        GateKind::Y => pauli('y'),
        GateKind::Z => pauli('z'),
        GateKind::S => phase(PI / 2.0),
        GateKind::T => phase(PI / 4.0),
        GateKind::Rx => rotation('x', p[0]),
        GateKind::Ry => rotation('y', p[0]),
        // rz equals the phase gate up to global phase e^{-i lambda/2}.
        GateKind::Rz => scale(&phase(p[0]), Complex64::from_polar(1.0, -p[0] / 2.0)),
        // u(theta, phi, lambda) = e^{i(phi+lambda)/2} Rz(phi) Ry(theta) Rz(lambda).
        GateKind::U => scale(
            &matmul(&matmul(&rotation('z', p[1]), &rotation('y', p[0])), &rotation('z', p[2])),
            Complex64::from_polar(1.0, (p[1] + p[2]) / 2.0),
        ),
        k => panic!("{k} is not one-qubit"),
    }
}

/// Full-register operator with `m` on `q`: kron over qubits from the most
/// significant (width-1) down to 0.
fn embed_one(width: u32, q: u32, m: &Matrix) -> Matrix {
    let mut out = vec![vec![cx(1.0, 0.0)]];
    for k in (0..width).rev() {
        out = kron(&out, &if k == q { m.clone() } else { identity(2) });
    }
    out
}

fn projector(bit: usize) -> Matrix {
    let mut m = vec![vec![cx(0.0, 0.0); 2]; 2];
    m[bit][bit] = cx(1.0, 0.0);
    m
}

fn embed_many(width: u32, parts: &[(u32, Matrix)]) -> Matrix {
    let mut out = vec![vec![cx(1.0, 0.0)]];
    for k in (0..width).rev() {
        let f = parts.iter().find(|(q, _)| *q == k).map(|(_, m)| m.clone()).unwrap_or_else(|| identity(2));
        out = kron(&out, &f);
    }
    out
}

fn two_qubit(width: u32, kind: GateKind, a: u32, b: u32) -> Matrix {
    match kind {
        // |0><0|_a (x) I + |1><1|_a (x) U_b
        GateKind::Cx | GateKind::Cz => {
            let u = if kind == GateKind::Cx { pauli('x') } else { pauli('z') };
            add(
                &embed_many(width, &[(a, projector(0))]),
                &embed_many(width, &[(a, projector(1)), (b, u)]),
            )
        }
        // SWAP = (I + XX + YY + ZZ) / 2
        GateKind::Swap => {
            let mut s = identity(1 << width);
            for p in ['x', 'y', 'z'] {
                s = add(&s, &embed_many(width, &[(a, pauli(p)), (b, pauli(p))]));
            }
            scale(&s, cx(0.5, 0.0))
        }
        k => panic!("{k} is not two-qubit"),
    }
}

/// Full unitary of the circuit as a product of per-gate operators.
pub fn dense_unitary(c: &Circuit) -> Matrix {
    let mut u = identity(1 << c.width);
    for inst in &c.instructions {
        let g = match inst.qubits.len() {
            _ if inst.is_barrier() => continue,
            1 => embed_one(c.width, inst.qubits[0], &one_qubit(inst.kind, &inst.params)),
            _ => two_qubit(c.width, inst.kind, inst.qubits[0], inst.qubits[1]),
        };
        u = matmul(&g, &u);
    }
    u
}

/// First column of the circuit unitary, i.e. U|0...0>.
pub fn dense_state(c: &Circuit) -> Vec<Complex64> {
    dense_unitary(c).iter().map(|row| row[0]).collect()
}
