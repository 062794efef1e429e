use std::collections::HashMap;

use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Largest dimension for which dense matrix functions are formed.
pub const MAX_DIM: usize = 5000;

/// Occupation basis of `F^{≤N}` over `M` modes: all `(n₁..n_M)` with
/// `Σn ≤ N_cap`, ordered by total and then lexicographically.
#[derive(Debug, Clone, Serialize)]
pub struct FockSpace {
    pub modes: usize,
    pub n_cap: usize,
    #[serde(skip)]
    basis: Vec<Vec<u8>>,
    #[serde(skip)]
    index: HashMap<Vec<u8>, usize>,
}

/// `C(n, k)`
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn compositions(total: usize, modes: usize, out: &mut Vec<Vec<u8>>) {
    fn rec(rest: usize, slot: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if slot + 1 == cur.len() {
            cur[slot] = rest as u8;
            out.push(cur.clone());
            return;
        }
        for k in (0..=rest).rev() {
            cur[slot] = k as u8;
            rec(rest - k, slot + 1, cur, out);
        }
    }
    let mut cur = vec![0u8; modes];
    rec(total, 0, &mut cur, out);
}

impl FockSpace {
    pub fn new(modes: usize, n_cap: usize) -> Result<Self> {
        if modes == 0 || n_cap == 0 {
            return Err(invalid("Fock space needs M ≥ 1 and N_cap ≥ 1"));
        }
        if n_cap > 255 {
            return Err(invalid("N_cap above 255 is not supported"));
        }
        let dim = binomial(modes + n_cap, modes);
        if dim > MAX_DIM {
            return Err(Error::ResourceLimit(format!(
                "Fock dimension {dim} exceeds {MAX_DIM}"
            )));
        }
        let mut basis = Vec::with_capacity(dim);
        for t in 0..=n_cap {
            compositions(t, modes, &mut basis);
        }
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, b)| (b.clone(), i))
            .collect();
        Ok(FockSpace {
            modes,
            n_cap,
            basis,
            index,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn state(&self, i: usize) -> &[u8] {
        &self.basis[i]
    }

    pub fn index_of(&self, occ: &[u8]) -> Option<usize> {
        self.index.get(occ).copied()
    }

    pub fn total(&self, i: usize) -> usize {
        self.basis[i].iter().map(|&n| n as usize).sum()
    }

    /// Indices of basis states with the given total occupation.
    pub fn sector(&self, total: usize) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.total(i) == total)
            .collect()
    }
}
