//! Jacobi-type decompositions: cyclic two-sided Jacobi for Hermitian
//! eigenproblems and one-sided (Hestenes) Jacobi for singular values.

use crate::error::{domain_err, Error, Result};

use super::matrix::{ComplexMatrix, C64};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in non-increasing order with orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V diag(values) V*`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        let scaled = ComplexMatrix::from_fn(n, n, |i, j| self.vectors[(i, j)] * self.values[j]);
        &scaled * &self.vectors.adjoint()
    }
}

/// Unitary 2x2 rotation `[[c, s], [-s·ph, c·ph]]` diagonalising the Hermitian
/// block `[[a, z], [conj(z), b]]` by congruence `J* M J`.
#[derive(Clone, Copy)]
struct Rotation {
    pp: C64,
    pq: C64,
    qp: C64,
    qq: C64,
}

impl Rotation {
    fn annihilating(a: f64, b: f64, z: C64) -> Self {
        let r = z.norm();
        // Phase that makes the off-diagonal entry real and non-negative.
        let ph = z.conj() / r;
        let theta = (b - a) / (2.0 * r);
        let t = if theta.abs() > 1e150 {
            0.5 / theta
        } else {
            theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
        };
        let t = if theta == 0.0 { 1.0 } else { t };
        let c = 1.0 / (t * t + 1.0).sqrt();
        let s = t * c;
        Self {
            pp: C64::new(c, 0.0),
            pq: C64::new(s, 0.0),
            qp: ph * -s,
            qq: ph * c,
        }
    }

    /// `M ← M J` on columns `p`, `q`.
    fn apply_right(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        for k in 0..m.rows() {
            let (mp, mq) = (m[(k, p)], m[(k, q)]);
            m[(k, p)] = mp * self.pp + mq * self.qp;
            m[(k, q)] = mp * self.pq + mq * self.qq;
        }
    }

    /// `M ← J* M` on rows `p`, `q`.
    fn apply_left_adjoint(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        for k in 0..m.cols() {
            let (mp, mq) = (m[(p, k)], m[(q, k)]);
            m[(p, k)] = self.pp.conj() * mp + self.qp.conj() * mq;
            m[(q, k)] = self.pq.conj() * mp + self.qq.conj() * mq;
        }
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are returned in non-increasing order; ties keep the order in
/// which the Jacobi sweeps left them on the diagonal.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(Error::Shape(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let fro = a.norm_fro();
    let defect = a.hermitian_defect();
    if defect > 1e-9 * (1.0 + fro) {
        return domain_err(format!("matrix is not Hermitian (‖A − A*‖_F = {defect:.3e})"));
    }
    let n = a.rows();
    let mut work = a.hermitian_part();
    let mut vectors = ComplexMatrix::identity(n);

    let target = 1e-14 * fro;
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&work);
        if off <= target || fro == 0.0 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NonConvergence {
                routine: "hermitian_eigen",
                iterations: sweeps,
                residual: off,
            });
        }
        for p in 0..n {
            for q in p + 1..n {
                let z = work[(p, q)];
                if z.norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                let rot = Rotation::annihilating(work[(p, p)].re, work[(q, q)].re, z);
                rot.apply_right(&mut work, p, q);
                rot.apply_left_adjoint(&mut work, p, q);
                work[(p, q)] = C64::new(0.0, 0.0);
                work[(q, p)] = C64::new(0.0, 0.0);
                work[(p, p)] = C64::new(work[(p, p)].re, 0.0);
                work[(q, q)] = C64::new(work[(q, q)].re, 0.0);
                rot.apply_right(&mut vectors, p, q);
            }
        }
        sweeps += 1;
    }

    let raw: Vec<f64> = (0..n).map(|i| work[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable: equal values keep their diagonal order.
    order.sort_by(|&i, &j| raw[j].total_cmp(&raw[i]));
    let values = order.iter().map(|&i| raw[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    Ok(EigenDecomposition { values, vectors })
}

/// Singular values in non-increasing order, by one-sided Jacobi
/// orthogonalisation of the columns.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    // Fewer columns means fewer pair rotations.
    let mut work = if a.cols() > a.rows() { a.adjoint() } else { a.clone() };
    let n = work.cols();
    let m = work.rows();
    if work.norm_fro() == 0.0 {
        return Ok(vec![0.0; n]);
    }

    let col_dot = |w: &ComplexMatrix, p: usize, q: usize| -> C64 { (0..m).map(|k| w[(k, p)].conj() * w[(k, q)]).sum() };
    let col_norm2 = |w: &ComplexMatrix, p: usize| -> f64 { (0..m).map(|k| w[(k, p)].norm_sqr()).sum() };

    let mut sweeps = 0;
    loop {
        let mut worst: f64 = 0.0;
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = col_norm2(&work, p);
                let beta = col_norm2(&work, q);
                let gamma = col_dot(&work, p, q);
                let scale = (alpha * beta).sqrt();
                if scale == 0.0 {
                    continue;
                }
                let rel = gamma.norm() / scale;
                worst = worst.max(rel);
                if rel <= 1e-15 {
                    continue;
                }
                rotated = true;
                Rotation::annihilating(alpha, beta, gamma).apply_right(&mut work, p, q);
            }
        }
        sweeps += 1;
        if !rotated {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NonConvergence {
                routine: "singular_values",
                iterations: sweeps,
                residual: worst,
            });
        }
    }
    let mut values: Vec<f64> = (0..n).map(|p| col_norm2(&work, p).sqrt()).collect();
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}
