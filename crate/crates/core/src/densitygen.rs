//! Random circuits with exact width, depth and gate density.
//!
//! Generation starts from a fully occupied layered circuit and then removes
//! gates until the requested density is reached. One randomly chosen *safe
//! qubit* keeps a gate in every layer, which pins the depth.
//!
//! All randomness comes from [`ChaCha8Rng`] seeded with `seed_from_u64`, so a
//! spec and seed reproduce the same circuit on every platform.

use std::f64::consts::TAU;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, GateKind, Instruction, Params, Qubits};

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("width must be at least 2, got {0}")]
    Width(u32),
    #[error("depth must be at least 1")]
    Depth,
    #[error("density {density} is outside [1/width, 1] = [{floor}, 1]")]
    Density { density: f64, floor: f64 },
    #[error("two-qubit fraction {0} is outside [0, 1]")]
    TwoQubitFraction(f64),
    #[error(
        "cannot remove {to_remove} slots: {removable_q1} one-qubit and {removable_q2} two-qubit gates off the safe qubit, {anchored} anchored on it"
    )]
    InfeasibleQuota {
        to_remove: u64,
        removable_q1: u64,
        removable_q2: u64,
        anchored: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensitySpec {
    pub width: u32,
    pub depth: u32,
    pub density: f64,
    pub seed: u64,
    #[serde(default = "default_two_qubit_fraction")]
    pub two_qubit_fraction: f64,
}

fn default_two_qubit_fraction() -> f64 {
    0.5
}

impl DensitySpec {
    pub fn new(width: u32, depth: u32, density: f64, seed: u64) -> Self {
        DensitySpec {
            width,
            depth,
            density,
            seed,
            two_qubit_fraction: default_two_qubit_fraction(),
        }
    }

    pub fn max_ops(&self) -> u64 {
        self.width as u64 * self.depth as u64
    }

    /// Occupied slots the generated circuit will have.
    pub fn target_ops(&self) -> u64 {
        target_occupancy(self.max_ops(), self.density)
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.width < 2 {
            return Err(GenError::Width(self.width));
        }
        if self.depth < 1 {
            return Err(GenError::Depth);
        }
        if !(0.0..=1.0).contains(&self.two_qubit_fraction) {
            return Err(GenError::TwoQubitFraction(self.two_qubit_fraction));
        }
        let floor = 1.0 / self.width as f64;
        let ok = self.density.is_finite()
            && self.density <= 1.0
            && self.density * self.width as f64 >= 1.0 - 1e-9;
        if !ok {
            return Err(GenError::Density {
                density: self.density,
                floor,
            });
        }
        Ok(())
    }
}

/// `ceil(max_ops * density)`, snapping products that are integral up to
/// floating-point noise (so `0.07 * 100` yields 7, not 8).
pub fn target_occupancy(max_ops: u64, density: f64) -> u64 {
    let product = max_ops as f64 * density;
    let nearest = product.round();
    if (product - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as u64
    } else {
        product.ceil() as u64
    }
}

/// Bookkeeping of a density reduction run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovalStats {
    pub safe_qubit: u32,
    pub ops_to_remove: u64,
    pub ops_removed: u64,
    pub q1_removed: u64,
    pub q2_removed: u64,
    /// Two-qubit gates on the safe qubit reduced to a one-qubit gate on it.
    pub anchored_demoted: u64,
}

fn random_one_qubit(rng: &mut ChaCha8Rng, q: u32) -> Instruction {
    let kind = GateKind::ONE_QUBIT[rng.gen_range(0..GateKind::ONE_QUBIT.len())];
    let params: Params = (0..kind.num_params()).map(|_| rng.gen_range(0.0..TAU)).collect();
    Instruction {
        kind,
        params,
        qubits: Qubits::from_slice(&[q]),
    }
}

fn random_two_qubit(rng: &mut ChaCha8Rng, a: u32, b: u32) -> Instruction {
    let kind = GateKind::TWO_QUBIT[rng.gen_range(0..GateKind::TWO_QUBIT.len())];
    Instruction::two(kind, a, b)
}

fn dense_with_rng(spec: &DensitySpec, rng: &mut ChaCha8Rng) -> Circuit {
    let w = spec.width as usize;
    let mut order: Vec<u32> = (0..spec.width).collect();
    let mut c = Circuit::new(
        format!("random_w{}_d{}_s{}", spec.width, spec.depth, spec.seed),
        spec.width,
    );
    c.instructions.reserve(spec.max_ops() as usize);
    for _ in 0..spec.depth {
        order.shuffle(rng);
        let mut i = 0;
        while i < w {
            if i + 1 < w && rng.gen_bool(spec.two_qubit_fraction) {
                c.push(random_two_qubit(rng, order[i], order[i + 1]));
                i += 2;
            } else {
                c.push(random_one_qubit(rng, order[i]));
                i += 1;
            }
        }
    }
    c
}

/// A circuit of exactly `spec.depth` fully occupied layers (density 1).
///
/// Each layer shuffles the qubits and walks the shuffled order, pairing the
/// next two qubits into a two-qubit gate with probability
/// `two_qubit_fraction` and otherwise placing a one-qubit gate. Gate kinds
/// and angles are uniform over the canonical set and `[0, 2pi)`.
pub fn generate_dense(spec: &DensitySpec) -> Result<Circuit, GenError> {
    let probe = DensitySpec { density: 1.0, ..*spec };
    probe.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok(dense_with_rng(spec, &mut rng))
}

pub fn generate_with_density(spec: &DensitySpec) -> Result<Circuit, GenError> {
    generate_with_stats(spec).map(|(c, _)| c)
}

/// Pick `(anchored, n_q1, n_q2)` with `anchored + n_q1 + 2 * n_q2 == to_remove`.
///
/// `n_q1` must share the parity of the remainder so the two-qubit quota is
/// integral; anchored demotions are only used when the gates off the safe
/// qubit cannot cover the quota on their own.
fn sample_quota(
    rng: &mut ChaCha8Rng,
    to_remove: u64,
    r1: u64,
    r2: u64,
    anchored: u64,
) -> Option<(u64, u64, u64)> {
    let min_demote = to_remove.saturating_sub(r1 + 2 * r2);
    for demote in min_demote..=anchored.min(to_remove) {
        let rest = to_remove - demote;
        let mut lo = rest.saturating_sub(2 * r2);
        let mut hi = r1.min(rest);
        if lo % 2 != rest % 2 {
            lo += 1;
        }
        if hi % 2 != rest % 2 {
            if hi == 0 {
                continue;
            }
            hi -= 1;
        }
        if lo > hi {
            continue;
        }
        let n_q1 = lo + 2 * rng.gen_range(0..=(hi - lo) / 2);
        return Some((demote, n_q1, (rest - n_q1) / 2));
    }
    None
}

/// [`generate_with_density`] plus the removal bookkeeping.
pub fn generate_with_stats(spec: &DensitySpec) -> Result<(Circuit, RemovalStats), GenError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut circuit = dense_with_rng(spec, &mut rng);
    let to_remove = spec.max_ops() - spec.target_ops();
    if to_remove == 0 {
        return Ok((circuit, RemovalStats::default()));
    }

    // Bounded safe-qubit re-picks: every qubit is tried once, in random order.
    let mut candidates: Vec<u32> = (0..spec.width).collect();
    candidates.shuffle(&mut rng);
    let mut last = (0, 0, 0);
    let mut chosen = None;
    for &safe in &candidates {
        let (mut r1, mut r2, mut anchored) = (0u64, 0u64, 0u64);
        for inst in &circuit.instructions {
            match (inst.is_two_qubit(), inst.acts_on(safe)) {
                (false, false) => r1 += 1,
                (true, false) => r2 += 1,
                (true, true) => anchored += 1,
                (false, true) => {}
            }
        }
        last = (r1, r2, anchored);
        if let Some(quota) = sample_quota(&mut rng, to_remove, r1, r2, anchored) {
            chosen = Some((safe, quota));
            break;
        }
    }
    let Some((safe, (demote, mut n_q1, mut n_q2))) = chosen else {
        return Err(GenError::InfeasibleQuota {
            to_remove,
            removable_q1: last.0,
            removable_q2: last.1,
            anchored: last.2,
        });
    };

    let mut pool1 = Vec::new();
    let mut pool2 = Vec::new();
    let mut pool_anchored = Vec::new();
    for (i, inst) in circuit.instructions.iter().enumerate() {
        match (inst.is_two_qubit(), inst.acts_on(safe)) {
            (false, false) => pool1.push(i),
            (true, false) => pool2.push(i),
            (true, true) => pool_anchored.push(i),
            (false, true) => {}
        }
    }

    let mut stats = RemovalStats {
        safe_qubit: safe,
        ops_to_remove: to_remove,
        ..Default::default()
    };

    let (demoted, _) = pool_anchored.partial_shuffle(&mut rng, demote as usize);
    for &i in demoted.iter() {
        circuit.instructions[i] = random_one_qubit(&mut rng, safe);
        stats.anchored_demoted += 1;
        stats.ops_removed += 1;
    }

    // Uniform choice among gates whose class still has quota, i.e. the
    // rejection loop over the safe-stripped list without the rejections.
    let mut removed = vec![false; circuit.instructions.len()];
    while n_q1 > 0 || n_q2 > 0 {
        let live1 = if n_q1 > 0 { pool1.len() } else { 0 };
        let live2 = if n_q2 > 0 { pool2.len() } else { 0 };
        let pick = rng.gen_range(0..live1 + live2);
        if pick < live1 {
            removed[pool1.swap_remove(pick)] = true;
            n_q1 -= 1;
            stats.q1_removed += 1;
            stats.ops_removed += 1;
        } else {
            removed[pool2.swap_remove(pick - live1)] = true;
            n_q2 -= 1;
            stats.q2_removed += 1;
            stats.ops_removed += 2;
        }
    }
    assert_eq!(stats.ops_removed, stats.ops_to_remove, "removal accounting drifted");

    let mut k = 0;
    circuit.instructions.retain(|_| {
        k += 1;
        !removed[k - 1]
    });
    circuit.name = format!(
        "random_w{}_d{}_p{}_s{}",
        spec.width, spec.depth, spec.density, spec.seed
    );
    Ok((circuit, stats))
}

/// Width/depth/density grid of a benchmark corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusGrid {
    pub widths: Vec<u32>,
    pub depths: Vec<u32>,
    pub densities: Vec<f64>,
    pub seed_base: u64,
}

impl CorpusGrid {
    /// Widths 20..=200 step 20, depths 10k..=100k step 10k, densities
    /// {1.0, 0.7, 0.5, 0.2}.
    pub fn reference(seed_base: u64) -> Self {
        CorpusGrid {
            widths: (20..=200).step_by(20).collect(),
            depths: (10_000..=100_000).step_by(10_000).collect(),
            densities: vec![1.0, 0.7, 0.5, 0.2],
            seed_base,
        }
    }

    /// One spec per grid cell; seeds are `seed_base + cell index`.
    pub fn specs(&self) -> Vec<DensitySpec> {
        let mut out = Vec::new();
        for &w in &self.widths {
            for &d in &self.depths {
                for &p in &self.densities {
                    let seed = self.seed_base + out.len() as u64;
                    out.push(DensitySpec::new(w, d, p, seed));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::compute_metrics;

    #[test]
    fn dense_circuit_has_unit_density() {
        let c = generate_dense(&DensitySpec::new(6, 6, 1.0, 1)).unwrap();
        let m = compute_metrics(&c).unwrap();
        assert_eq!(m.depth, 6);
        assert_eq!(m.density, 1.0);
    }

    #[test]
    fn full_density_is_identical_to_dense() {
        let spec = DensitySpec::new(6, 6, 1.0, 99);
        let dense = generate_dense(&spec).unwrap();
        let (c, stats) = generate_with_stats(&spec).unwrap();
        assert_eq!(stats.ops_removed, 0);
        assert_eq!(c.instructions, dense.instructions);
    }

    #[test]
    fn validation() {
        assert_eq!(
            DensitySpec::new(1, 5, 1.0, 0).validate(),
            Err(GenError::Width(1))
        );
        assert_eq!(DensitySpec::new(4, 0, 1.0, 0).validate(), Err(GenError::Depth));
        assert!(matches!(
            DensitySpec::new(20, 5, 0.01, 0).validate(),
            Err(GenError::Density { .. })
        ));
        assert!(matches!(
            DensitySpec::new(20, 5, 1.5, 0).validate(),
            Err(GenError::Density { .. })
        ));
        assert!(DensitySpec::new(3, 5, 1.0 / 3.0, 0).validate().is_ok());
        let mut spec = DensitySpec::new(4, 4, 1.0, 0);
        spec.two_qubit_fraction = -0.1;
        assert_eq!(spec.validate(), Err(GenError::TwoQubitFraction(-0.1)));
    }

    #[test]
    fn occupancy_snaps_float_noise() {
        assert_eq!(target_occupancy(100, 0.07), 7);
        assert_eq!(target_occupancy(100, 0.071), 8);
        assert_eq!(target_occupancy(100_000, 0.7), 70_000);
        assert_eq!(target_occupancy(36, 1.0 / 6.0), 6);
    }

    #[test]
    fn quota_respects_parity_and_pools() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let (d, n1, n2) = sample_quota(&mut rng, 7, 3, 10, 4).unwrap();
            assert_eq!(d + n1 + 2 * n2, 7);
            assert!(n1 <= 3 && n2 <= 10 && d == 0);
        }
        // Only two-qubit gates and an odd target: one demotion is forced.
        assert_eq!(sample_quota(&mut rng, 5, 0, 10, 1), Some((1, 0, 2)));
        assert_eq!(sample_quota(&mut rng, 5, 0, 10, 0), None);
        assert_eq!(sample_quota(&mut rng, 8, 1, 2, 3), Some((3, 1, 2)));
        assert_eq!(sample_quota(&mut rng, 9, 1, 2, 3), None);
    }

    #[test]
    fn reference_corpus_has_400_cells() {
        let specs = CorpusGrid::reference(0).specs();
        assert_eq!(specs.len(), 400);
        assert!(specs.iter().all(|s| s.validate().is_ok()));
    }
}
