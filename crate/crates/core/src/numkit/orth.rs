use super::matrix::{dot, vec_norm, ComplexMatrix, C64};

/// Default relative rejection threshold for [`GramSchmidt`].
pub const DEFAULT_REJECTION_TOL: f64 = 1e-10;

/// Incremental Gram–Schmidt with one re-orthogonalisation pass.
///
/// Each accepted vector is normalised and its phase fixed so that its first
/// coordinate of modulus above the rejection tolerance is real and positive.
#[derive(Debug, Clone)]
pub struct GramSchmidt {
    dim: usize,
    tolerance: f64,
    basis: Vec<Vec<C64>>,
    accepted: Vec<usize>,
    offered: usize,
}

impl GramSchmidt {
    pub fn new(dim: usize, tolerance: f64) -> Self {
        Self {
            dim,
            tolerance,
            basis: Vec::new(),
            accepted: Vec::new(),
            offered: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.basis.len() == self.dim
    }

    pub fn basis(&self) -> &[Vec<C64>] {
        &self.basis
    }

    /// Positions (in offer order) of vectors that produced a basis column.
    pub fn accepted(&self) -> &[usize] {
        &self.accepted
    }

    fn project_out(&self, v: &mut [C64]) {
        for b in &self.basis {
            let c = dot(b, v);
            for (x, &y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
    }

    /// Offers a vector; returns `true` if it extended the basis.
    pub fn push(&mut self, v: &[C64]) -> bool {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        let index = self.offered;
        self.offered += 1;
        if self.is_complete() {
            return false;
        }
        let original = vec_norm(v);
        let mut w = v.to_vec();
        self.project_out(&mut w);
        self.project_out(&mut w);
        let residual = vec_norm(&w);
        if residual <= self.tolerance * (1.0 + original) {
            return false;
        }
        for x in &mut w {
            *x /= residual;
        }
        if let Some(lead) = w.iter().find(|z| z.norm() > self.tolerance).copied() {
            let phase = lead.conj() / lead.norm();
            for x in &mut w {
                *x *= phase;
            }
        }
        self.basis.push(w);
        self.accepted.push(index);
        true
    }

    /// Basis vectors as the columns of a `dim x len` matrix.
    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim, self.basis.len(), |i, j| self.basis[j][i])
    }
}

/// Orthonormalises `vectors` in order, skipping numerically dependent ones.
///
/// Returns the basis as matrix columns and the input positions that were
/// accepted.
pub fn gram_schmidt(vectors: &[Vec<C64>], tolerance: f64) -> (ComplexMatrix, Vec<usize>) {
    let dim = vectors.first().map_or(0, Vec::len);
    let mut gs = GramSchmidt::new(dim, tolerance);
    for v in vectors {
        gs.push(v);
    }
    (gs.to_matrix(), gs.accepted().to_vec())
}
