//! Cost functions shared by both solvers.
//!
//! Energies follow `E(s) = -cut(s)`, so every eigenvalue of the problem
//! Hamiltonian is `<= 0` and the ground states are the maximum cuts. The
//! Ising form used by the annealer couples each edge with `J = +1` on spins
//! `z = 1 - 2 * bit`, giving `E_ising(s) = |E| - 2 cut(s)`.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::bits::Bitstring;
use crate::error::{Error, Result};
use crate::graphs::GraphInstance;

/// Default qubit limit for dense statevector work.
pub const DEFAULT_STATEVECTOR_LIMIT: usize = 20;

pub fn cut_size(g: &GraphInstance, s: &Bitstring) -> Result<u64> {
    g.cut_size(s)
}

/// Cut size of the basis state `index`.
#[inline]
pub fn cut_of_index(edges: &[(usize, usize)], index: u64) -> u32 {
    edges
        .iter()
        .filter(|&&(a, b)| ((index >> a) ^ (index >> b)) & 1 == 1)
        .count() as u32
}

/// Cut size of every computational-basis state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalCostTable {
    num_qubits: usize,
    cut_sizes: Vec<u32>,
}

impl DiagonalCostTable {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn cut_sizes(&self) -> &[u32] {
        &self.cut_sizes
    }

    pub fn cut(&self, index: usize) -> u32 {
        self.cut_sizes[index]
    }

    pub fn energy(&self, index: usize) -> f64 {
        -(self.cut_sizes[index] as f64)
    }

    pub fn max_cut(&self) -> u32 {
        self.cut_sizes.iter().copied().max().unwrap_or(0)
    }

    /// Number of basis states with each cut size, indexed by cut size.
    pub fn cut_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.max_cut() as usize + 1];
        for &c in &self.cut_sizes {
            counts[c as usize] += 1;
        }
        counts
    }

    /// `<psi| C |psi>` for a probability vector over basis states.
    pub fn expected_cut(&self, probabilities: &[f64]) -> f64 {
        probabilities
            .iter()
            .zip(&self.cut_sizes)
            .map(|(p, &c)| p * c as f64)
            .sum()
    }
}

pub fn diagonal_cost_table(g: &GraphInstance, limit: usize) -> Result<DiagonalCostTable> {
    let n = g.num_nodes();
    if n > limit || n > 40 {
        return Err(Error::ResourceLimit {
            what: "diagonal cost table",
            requested: n,
            limit,
        });
    }
    let edges = g.edges();
    let cut_sizes = (0..1u64 << n).map(|s| cut_of_index(edges, s)).collect();
    Ok(DiagonalCostTable {
        num_qubits: n,
        cut_sizes,
    })
}

/// Ising model `sum_i h_i z_i + sum_{i<j} J_ij z_i z_j` with `z = 1 - 2 * bit`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingEncoding {
    pub h: Vec<f64>,
    pub couplings: BTreeMap<(usize, usize), f64>,
}

/// `h = 0` and an antiferromagnetic unit coupling on every edge, so that
/// anti-aligned spins across an edge (a cut edge) lower the energy.
pub fn ising_encoding(g: &GraphInstance) -> IsingEncoding {
    IsingEncoding {
        h: vec![0.0; g.num_nodes()],
        couplings: g.edges().iter().map(|&e| (e, 1.0)).collect(),
    }
}

impl IsingEncoding {
    pub fn num_spins(&self) -> usize {
        self.h.len()
    }

    pub fn energy(&self, s: &Bitstring) -> f64 {
        let spin = |i: usize| if s.get(i) { -1.0 } else { 1.0 };
        let field: f64 = self.h.iter().enumerate().map(|(i, h)| h * spin(i)).sum();
        let coupling: f64 = self.couplings.iter().map(|(&(i, j), jij)| jij * spin(i) * spin(j)).sum();
        field + coupling
    }

    /// Dense symmetric coupling matrix.
    pub fn j_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.num_spins();
        let mut m = vec![vec![0.0; n]; n];
        for (&(i, j), &v) in &self.couplings {
            m[i][j] = v;
            m[j][i] = v;
        }
        m
    }

    pub fn j_matrix_csv(&self) -> String {
        let mut out = String::new();
        for row in self.j_matrix() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }
}
