use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LayoutError {
    #[error("layout is not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("layout has {got} positions, map has {expected}")]
    SizeMismatch { expected: usize, got: usize },
}

/// Which logical qubit sits at each physical position.
///
/// Kept as a permutation of `0..n_phys` together with its inverse. Logical
/// ids at or above the circuit width are idle spare qubits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Layout {
    phys_to_logical: Vec<u32>,
    logical_to_phys: Vec<u32>,
}

impl Layout {
    pub fn trivial(n: u32) -> Self {
        let id: Vec<u32> = (0..n).collect();
        Layout {
            phys_to_logical: id.clone(),
            logical_to_phys: id,
        }
    }

    pub fn from_phys_to_logical(phys_to_logical: Vec<u32>) -> Result<Self, LayoutError> {
        let n = phys_to_logical.len();
        let mut logical_to_phys = vec![u32::MAX; n];
        for (p, &l) in phys_to_logical.iter().enumerate() {
            if l as usize >= n || logical_to_phys[l as usize] != u32::MAX {
                return Err(LayoutError::NotAPermutation(n));
            }
            logical_to_phys[l as usize] = p as u32;
        }
        Ok(Layout {
            phys_to_logical,
            logical_to_phys,
        })
    }

    pub fn len(&self) -> usize {
        self.phys_to_logical.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phys_to_logical.is_empty()
    }

    pub fn logical_at(&self, physical: u32) -> u32 {
        self.phys_to_logical[physical as usize]
    }

    pub fn physical_of(&self, logical: u32) -> u32 {
        self.logical_to_phys[logical as usize]
    }

    pub fn phys_to_logical(&self) -> &[u32] {
        &self.phys_to_logical
    }

    pub fn logical_to_phys(&self) -> &[u32] {
        &self.logical_to_phys
    }

    /// Exchange the logical qubits held by two physical positions.
    pub fn swap_physical(&mut self, a: u32, b: u32) {
        let (la, lb) = (self.phys_to_logical[a as usize], self.phys_to_logical[b as usize]);
        self.phys_to_logical.swap(a as usize, b as usize);
        self.logical_to_phys[la as usize] = b;
        self.logical_to_phys[lb as usize] = a;
    }

    pub fn is_trivial(&self) -> bool {
        self.phys_to_logical.iter().enumerate().all(|(p, &l)| p as u32 == l)
    }
}

impl TryFrom<Vec<u32>> for Layout {
    type Error = LayoutError;

    fn try_from(v: Vec<u32>) -> Result<Self, Self::Error> {
        Layout::from_phys_to_logical(v)
    }
}

impl From<Layout> for Vec<u32> {
    fn from(l: Layout) -> Self {
        l.phys_to_logical
    }
}
