//! Simultaneous staircase forms.
//!
//! A unitary `U` with `Ue₁ = e₁` is grown by Gram–Schmidt over the stream
//! `e₁, A₁b₁, A₁*b₁, …, A_Nb₁, A_N*b₁, e₂, A₁b₂, …` where `b_k` is the
//! `k`-th accepted basis vector. After `n` rounds at most `n(2N+1)` vectors
//! have been accepted, so row and column `n` of every `U*AᵢU` vanish beyond
//! index `n(2N+1)`; for Hermitian inputs the adjoint images are redundant
//! and the bound drops to `n(N+1)`.

use crate::error::{domain_err, shape_err, Result};
use crate::numkit::{basis_vector, ComplexMatrix, GramSchmidt, DEFAULT_REJECTION_TOL};

#[derive(Debug, Clone)]
pub struct StaircaseResult {
    pub unitary: ComplexMatrix,
    /// `U* Aᵢ U` in input order.
    pub transformed: Vec<ComplexMatrix>,
    /// For each transformed operator and each row, the 1-based index of the
    /// last entry above the tolerance (0 for an empty row).
    pub band_profile: Vec<Vec<usize>>,
}

/// Per-row band limit: `n(2N+1)`, or `n(N+1)` for self-adjoint collections.
pub fn band_bound(row: usize, op_count: usize, selfadjoint: bool) -> usize {
    if selfadjoint {
        row * (op_count + 1)
    } else {
        row * (2 * op_count + 1)
    }
}

fn row_profile(m: &ComplexMatrix, tolerance: f64) -> Vec<usize> {
    (0..m.rows())
        .map(|i| m.row(i).iter().rposition(|z| z.norm() > tolerance).map_or(0, |j| j + 1))
        .collect()
}

/// Computes the staircase unitary for `ops`; `tolerance` is the Gram–Schmidt
/// rejection threshold and the cutoff for the band profile.
pub fn staircase_form(ops: &[ComplexMatrix], selfadjoint_hint: bool, tolerance: f64) -> Result<StaircaseResult> {
    let Some(first) = ops.first() else {
        return domain_err("staircase form needs at least one operator");
    };
    let d = first.rows();
    for (i, a) in ops.iter().enumerate() {
        if !a.is_square() || a.rows() != d {
            return shape_err(format!("operator {i} has shape {:?}, expected ({d}, {d})", a.shape()));
        }
        if selfadjoint_hint {
            let defect = a.hermitian_defect();
            if defect > 1e-9 * (1.0 + a.norm_fro()) {
                return domain_err(format!("operator {i} is not Hermitian (defect {defect:.3e})"));
            }
        }
    }
    let adjoints: Vec<ComplexMatrix> = if selfadjoint_hint {
        Vec::new()
    } else {
        ops.iter().map(ComplexMatrix::adjoint).collect()
    };

    let mut gs = GramSchmidt::new(d, tolerance);
    let mut k = 0;
    while !gs.is_complete() {
        if k < d {
            gs.push(&basis_vector(d, k));
        }
        if k < gs.len() {
            let b = gs.basis()[k].clone();
            for (i, a) in ops.iter().enumerate() {
                gs.push(&a.matvec(&b));
                if let Some(adj) = adjoints.get(i) {
                    gs.push(&adj.matvec(&b));
                }
            }
        } else if k >= d {
            return domain_err(format!(
                "generating stream exhausted with {} of {d} basis vectors (rejection tolerance too coarse)",
                gs.len()
            ));
        }
        k += 1;
    }

    let unitary = gs.to_matrix();
    let ua = unitary.adjoint();
    let transformed: Vec<ComplexMatrix> = ops.iter().map(|a| &(&ua * a) * &unitary).collect();
    let band_profile = transformed.iter().map(|t| row_profile(t, tolerance)).collect();
    Ok(StaircaseResult {
        unitary,
        transformed,
        band_profile,
    })
}

pub fn staircase_form_default(ops: &[ComplexMatrix], selfadjoint_hint: bool) -> Result<StaircaseResult> {
    staircase_form(ops, selfadjoint_hint, DEFAULT_REJECTION_TOL)
}

/// Largest entry modulus outside the staircase band of `m`.
pub fn band_excess(m: &ComplexMatrix, op_count: usize, selfadjoint: bool) -> f64 {
    let d = m.rows().min(m.cols());
    let mut worst: f64 = 0.0;
    for n in 1..=d {
        let bound = band_bound(n, op_count, selfadjoint);
        for j in bound..m.cols() {
            worst = worst.max(m[(n - 1, j)].norm());
        }
        for j in bound..m.rows() {
            worst = worst.max(m[(j, n - 1)].norm());
        }
    }
    worst
}

/// `true` iff every row and column `n` of every transformed operator is
/// confined (above `tolerance`) to its first `band_bound(n)` entries.
pub fn verify_band(result: &StaircaseResult, op_count: usize, selfadjoint: bool, tolerance: f64) -> bool {
    result
        .transformed
        .iter()
        .all(|t| band_excess(t, op_count, selfadjoint) <= tolerance)
}

/// `‖U*DU − D‖_F ≤ tolerance`.
pub fn diagonal_invariance_check(d: &ComplexMatrix, u: &ComplexMatrix, tolerance: f64) -> bool {
    if !d.is_square() || d.shape() != u.shape() {
        return false;
    }
    (&(&(&u.adjoint() * d) * u) - d).norm_fro() <= tolerance
}
