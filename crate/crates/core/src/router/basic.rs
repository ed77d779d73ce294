use crate::circuit::Circuit;
use crate::topology::CouplingMap;

use super::{bring_adjacent, check_width, to_physical, Layout, PathCache, RouteError, RoutedCircuit};

/// Streaming shortest-path router.
///
/// Gates are emitted in source order. When a two-qubit gate lands on an
/// uncoupled pair, its first operand is walked along the A* path toward the
/// second until they are neighbours.
pub fn route_basic(circuit: &Circuit, map: &CouplingMap) -> Result<RoutedCircuit, RouteError> {
    check_width(circuit, map)?;
    let mut layout = Layout::trivial(map.n_phys());
    let mut paths = PathCache::new(map);
    let mut out = Vec::with_capacity(circuit.instructions.len() + circuit.instructions.len() / 2);
    let mut inserted = 0;
    for inst in &circuit.instructions {
        if inst.is_two_qubit() {
            let a = layout.physical_of(inst.qubits[0]);
            let b = layout.physical_of(inst.qubits[1]);
            if !map.is_coupled(a, b) {
                inserted += bring_adjacent(&mut paths, a, b, &mut layout, &mut out)?;
            }
        }
        out.push(to_physical(inst, &layout));
    }
    Ok(RoutedCircuit {
        circuit: Circuit {
            name: circuit.name.clone(),
            width: map.n_phys(),
            instructions: out,
        },
        final_layout: layout,
        inserted_swaps: inserted,
    })
}
