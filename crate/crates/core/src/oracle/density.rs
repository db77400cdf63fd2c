use num_complex::Complex64;

use super::Amplitudes;
use crate::circuit::QubitId;

/// Reduced density matrix over a qubit subset, row-major. `subset[0]` is the
/// most significant bit of the row and column index.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensity {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl ReducedDensity {
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_distance(&self, other: &ReducedDensity) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim)
            .all(|r| (0..self.dim).all(|c| (self.get(r, c) - self.get(c, r).conj()).norm() <= tol))
    }

    /// Smallest eigenvalue. Assumes the matrix is Hermitian.
    pub fn min_eigenvalue(&self) -> f64 {
        let m = nalgebra::DMatrix::from_row_slice(self.dim, self.dim, &self.data);
        m.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Partial trace of `|psi⟩⟨psi|` onto `subset`.
pub fn reduced_density(psi: &Amplitudes, subset: &[QubitId]) -> ReducedDensity {
    let k = subset.len();
    let dim = 1usize << k;
    let sub_mask: usize = subset.iter().fold(0, |m, q| m | 1 << q.0);
    let local = |x: usize| -> usize { subset.iter().fold(0, |acc, q| acc << 1 | (x >> q.0 & 1)) };
    // group amplitudes by the traced-out part of the index
    let mut groups: std::collections::HashMap<usize, Vec<(usize, Complex64)>> =
        std::collections::HashMap::new();
    for (x, a) in psi.0.iter().enumerate() {
        if a.norm_sqr() != 0.0 {
            groups
                .entry(x & !sub_mask)
                .or_default()
                .push((local(x), *a));
        }
    }
    let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
    for entries in groups.values() {
        for &(r, ar) in entries {
            for &(c, ac) in entries {
                data[r * dim + c] += ar * ac.conj();
            }
        }
    }
    ReducedDensity { dim, data }
}
