//! Small dense complex linear algebra on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Relative cutoff for numerical rank.
pub const RANK_TOL: f64 = 1e-9;

/// Largest singular value; 0 for empty matrices.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Number of singular values above `RANK_TOL * max(1, sigma_max)`.
pub fn rank(m: &CMatrix) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    let cutoff = RANK_TOL * top.max(1.0);
    sv.iter().filter(|&&s| s > cutoff).count()
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_hermitian_eigenvalue(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let hermitian = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    hermitian
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Largest entrywise modulus of `a - b`. Shapes must agree.
pub fn max_entry_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "matrix shapes differ");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Block-diagonal matrix from square blocks.
pub fn block_diagonal(blocks: &[CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(n, n);
    let mut offset = 0;
    for b in blocks {
        out.view_mut((offset, offset), b.shape()).copy_from(b);
        offset += b.nrows();
    }
    out
}

/// An orthonormal basis grown one vector at a time (modified Gram-Schmidt,
/// applied twice for stability).
#[derive(Clone, Debug, Default)]
pub struct SpanBuilder {
    basis: Vec<Vec<Complex64>>,
}

impl SpanBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Adds `v` if it is not already in the span; returns whether it was added.
    pub fn insert(&mut self, v: &[Complex64]) -> bool {
        let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return false;
        }
        let mut w: Vec<Complex64> = v.iter().map(|z| z / scale).collect();
        for _ in 0..2 {
            for b in &self.basis {
                let c: Complex64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= RANK_TOL {
            return false;
        }
        self.basis.push(w.into_iter().map(|z| z / norm).collect());
        true
    }

    pub fn contains(&self, v: &[Complex64]) -> bool {
        let mut probe = self.clone();
        !probe.insert(v)
    }

    pub fn basis(&self) -> &[Vec<Complex64>] {
        &self.basis
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn spectral_norm_of_swap_plus_identity() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(1.0), c(1.0)]);
        assert!((spectral_norm(&m) - 2.0).abs() < 1e-12);
        assert_eq!(rank(&m), 1);
    }

    #[test]
    fn hermitian_eigenvalues() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        assert!((min_hermitian_eigenvalue(&m) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn span_builder_detects_dependence() {
        let mut s = SpanBuilder::new();
        assert!(s.insert(&[c(1.0), c(0.0)]));
        assert!(!s.insert(&[c(2.0), c(0.0)]));
        assert!(s.insert(&[c(1.0), c(1.0)]));
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&[c(3.0), c(-4.0)]));
    }
}
