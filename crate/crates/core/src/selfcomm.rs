//! Self-commutator equations `[Y*, Y] = T` for Hermitian `T`.
//!
//! Type (A): any traceless Hermitian matrix. Diagonalise, sort the eigenvalues
//! descending, and put the square roots of the (non-negative) partial sums on
//! the subdiagonal of a shift.
//!
//! Type (C): `T` in the symplectic algebra of an anti-conjugation `J̃`. The
//! spectrum pairs as `±λₙ`; in an eigenbasis `bₙ, b₋ₙ = −J̃bₙ` the solution is
//! `Σ √λₙ E₋ₙ,ₙ`.

use crate::error::{domain_err, shape_err, Error, Result};
use crate::numkit::{dot, hermitian_eigen, self_commutator, vec_norm, ComplexMatrix, C64, I, ONE};
use crate::report::{Check, SolveReport};

const MEMBERSHIP_TOL: f64 = 1e-9;

fn ensure_square(t: &ComplexMatrix, what: &str) -> Result<()> {
    if t.is_square() {
        Ok(())
    } else {
        shape_err(format!("{what} must be square, got {}x{}", t.rows(), t.cols()))
    }
}

fn ensure_hermitian(t: &ComplexMatrix) -> Result<()> {
    let defect = t.hermitian_defect();
    if defect > MEMBERSHIP_TOL * (1.0 + t.norm_fro()) {
        return domain_err(format!("target is not Hermitian (‖T − T*‖_F = {defect:.3e})"));
    }
    Ok(())
}

fn ensure_traceless(t: &ComplexMatrix) -> Result<()> {
    let tr = t.trace().norm();
    if tr > MEMBERSHIP_TOL * (1.0 + t.norm_fro()) {
        return domain_err(format!("trace-zero required (|Tr T| = {tr:.3e})"));
    }
    Ok(())
}

/// Sorts `c` descending and returns the running sums.
///
/// For a list summing to zero every running sum of the descending order is
/// non-negative.
pub fn partial_sums_sorted(c: &[f64]) -> Result<Vec<f64>> {
    let total: f64 = c.iter().sum();
    let scale = c.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
    if total.abs() > 1e-9 * scale {
        return domain_err(format!("trace-zero required (sum = {total:.3e})"));
    }
    let mut sorted = c.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    Ok(sorted
        .iter()
        .scan(0.0, |s, &x| {
            *s += x;
            Some(*s)
        })
        .collect())
}

/// The `(r+1) x (r+1)` shift with `√aⱼ` at position `(j+1, j)`.
///
/// Its self-commutator is `diag(a₁, a₂ − a₁, …, −a_r)`.
pub fn weighted_shift(partial_sums: &[f64]) -> ComplexMatrix {
    let n = partial_sums.len() + 1;
    let mut y = ComplexMatrix::zeros(n, n);
    for (j, &a) in partial_sums.iter().enumerate() {
        y[(j + 1, j)] = C64::new(a.max(0.0).sqrt(), 0.0);
    }
    y
}

#[derive(Debug, Clone)]
pub struct TypeASolution {
    /// For each eigenvector column, the coordinate where it is largest; for a
    /// diagonal target this is the permutation sorting its diagonal.
    pub permutation: Vec<usize>,
    /// Eigenvalues of `T`, descending.
    pub eigenvalues: Vec<f64>,
    /// `a₁ … a_{r+1}`; the last is the trace and should be ~0.
    pub partial_sums: Vec<f64>,
    /// Diagonalising unitary `V` with `T = V diag V*`.
    pub basis: ComplexMatrix,
    pub solution: ComplexMatrix,
    /// `‖[Y*,Y] − T‖_F`.
    pub residual: f64,
    pub target_norm: f64,
}

impl TypeASolution {
    pub fn report(&self) -> SolveReport {
        let mut r = SolveReport::new("solve-selfcomm --type A");
        r.push(Check::at_most(
            "residual",
            self.residual,
            1e-9 * (1.0 + self.target_norm),
        ));
        let min_sum = self.partial_sums.iter().copied().fold(f64::INFINITY, f64::min);
        r.push(Check::at_least(
            "min_partial_sum",
            min_sum,
            -1e-12 * (1.0 + self.target_norm),
        ));
        r.push(Check::info("hs_norm_Y", self.solution.norm_fro()));
        r
    }
}

pub fn solve_type_a(t: &ComplexMatrix) -> Result<TypeASolution> {
    ensure_square(t, "target")?;
    ensure_hermitian(t)?;
    ensure_traceless(t)?;
    let n = t.rows();
    let eig = hermitian_eigen(t)?;
    let partial_sums: Vec<f64> = eig
        .values
        .iter()
        .scan(0.0, |s, &x| {
            *s += x;
            Some(*s)
        })
        .collect();
    let shift = weighted_shift(&partial_sums[..n.saturating_sub(1)]);
    let v = &eig.vectors;
    let solution = &(v * &shift) * &v.adjoint();
    let residual = (&self_commutator(&solution)? - t).norm_fro();
    let permutation = (0..n)
        .map(|j| {
            (0..n)
                .max_by(|&a, &b| v[(a, j)].norm().total_cmp(&v[(b, j)].norm()))
                .unwrap_or(0)
        })
        .collect();
    Ok(TypeASolution {
        permutation,
        eigenvalues: eig.values.clone(),
        partial_sums,
        basis: eig.vectors,
        solution,
        residual,
        target_norm: t.norm_fro(),
    })
}

/// Greedy ordering of a finite signed list keeping running sums non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct Rearrangement {
    pub order: Vec<usize>,
    pub prefix_sums: Vec<f64>,
    /// Final running sum; zero for balanced lists.
    pub defect: f64,
}

/// Takes the largest-magnitude unused non-positive term whenever the running
/// sum can absorb it, otherwise the largest unused positive term. Once the
/// positives run out the remaining terms follow in descending order.
pub fn rearrange_type_a(lambda: &[f64]) -> Rearrangement {
    let slack = 1e-12 * lambda.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
    let mut pos: Vec<usize> = (0..lambda.len()).filter(|&i| lambda[i] > 0.0).collect();
    let mut neg: Vec<usize> = (0..lambda.len()).filter(|&i| lambda[i] <= 0.0).collect();
    pos.sort_by(|&a, &b| lambda[b].total_cmp(&lambda[a]));
    neg.sort_by(|&a, &b| lambda[a].total_cmp(&lambda[b]));
    let (mut pi, mut ni) = (0, 0);

    let mut order = Vec::with_capacity(lambda.len());
    let mut s = 0.0;
    while order.len() < lambda.len() {
        let take_neg = ni < neg.len() && (s + lambda[neg[ni]] >= -slack || pi == pos.len());
        let idx = if take_neg {
            if pi == pos.len() && s + lambda[neg[ni]] < -slack {
                // Unbalanced tail: descending order, closest to zero first.
                let rest = neg[ni..].iter().rev().copied();
                order.extend(rest);
                break;
            }
            ni += 1;
            neg[ni - 1]
        } else {
            pi += 1;
            pos[pi - 1]
        };
        s += lambda[idx];
        order.push(idx);
    }
    let prefix_sums: Vec<f64> = order
        .iter()
        .scan(0.0, |acc, &i| {
            *acc += lambda[i];
            Some(*acc)
        })
        .collect();
    let defect = prefix_sums.last().copied().unwrap_or(0.0);
    Rearrangement {
        order,
        prefix_sums,
        defect,
    }
}

/// Conjugate-linear isometry `J̃v = K v̄` with `J̃² = −1`, stored through the
/// unitary `K` (so `K K̄ = −I`).
#[derive(Debug, Clone)]
pub struct AntiConjugation {
    matrix: ComplexMatrix,
}

/// Conjugate-linear isometry `Jv = K v̄` with `J² = 1` (`K K̄ = I`).
#[derive(Debug, Clone)]
pub struct Conjugation {
    matrix: ComplexMatrix,
}

/// `J M J⁻¹` for `Jv = K v̄`, which is the linear map `K M̄ K⁻¹`.
fn conjugate_through(k: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
    // K is unitary: K⁻¹ = K*.
    &(k * &m.conj()) * &k.adjoint()
}

impl AntiConjugation {
    /// Standard pairing on `ℂ^{2m}` with basis labels `1…m, −1…−m` stored at
    /// positions `0…m−1, m…2m−1`: `J̃bₙ = −b₋ₙ`, `J̃b₋ₙ = bₙ`.
    pub fn standard(m: usize) -> Result<Self> {
        if m == 0 {
            return domain_err("anti-conjugation needs m ≥ 1");
        }
        let mut k = ComplexMatrix::zeros(2 * m, 2 * m);
        for i in 0..m {
            k[(m + i, i)] = -ONE;
            k[(i, m + i)] = ONE;
        }
        Ok(Self { matrix: k })
    }

    /// Wraps `K`, checking unitarity and `K K̄ = −I`.
    pub fn from_matrix(k: ComplexMatrix) -> Result<Self> {
        ensure_square(&k, "anti-conjugation matrix")?;
        let n = k.rows();
        let id = ComplexMatrix::identity(n);
        if (&(&k.adjoint() * &k) - &id).norm_fro() > 1e-10 * n as f64 {
            return domain_err("anti-conjugation matrix is not unitary");
        }
        if (&(&k * &k.conj()) + &id).norm_fro() > 1e-10 * n as f64 {
            return domain_err("anti-conjugation must square to −1");
        }
        Ok(Self { matrix: k })
    }

    /// `V J̃ V*`.
    pub fn conjugated_by(&self, v: &ComplexMatrix) -> Result<Self> {
        Self::from_matrix(&(v * &self.matrix) * &v.transpose())
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let vbar: Vec<C64> = v.iter().map(|z| z.conj()).collect();
        self.matrix.matvec(&vbar)
    }

    /// `J̃ M J̃⁻¹`.
    pub fn conjugate(&self, m: &ComplexMatrix) -> ComplexMatrix {
        conjugate_through(&self.matrix, m)
    }

    /// The real-linear action on `ℝ^{2d}` (real parts stacked over imaginary parts).
    pub fn as_real_matrix(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        let k = &self.matrix;
        let mut r = vec![vec![0.0; 2 * d]; 2 * d];
        for i in 0..d {
            for j in 0..d {
                let z = k[(i, j)];
                r[i][j] = z.re;
                r[i][d + j] = z.im;
                r[d + i][j] = z.im;
                r[d + i][d + j] = -z.re;
            }
        }
        r
    }
}

impl Conjugation {
    /// Entrywise complex conjugation in the standard basis.
    pub fn standard(n: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn conjugate(&self, m: &ComplexMatrix) -> ComplexMatrix {
        conjugate_through(&self.matrix, m)
    }
}

pub fn make_anticonjugation(m: usize) -> Result<AntiConjugation> {
    AntiConjugation::standard(m)
}

fn ensure_dim(x: &ComplexMatrix, dim: usize) -> Result<()> {
    if !x.is_square() || x.rows() != dim {
        return shape_err(format!("expected a {dim}x{dim} matrix, got {}x{}", x.rows(), x.cols()));
    }
    Ok(())
}

/// `‖X + J̃X*J̃⁻¹‖_F`.
pub fn sp_defect(x: &ComplexMatrix, j: &AntiConjugation) -> Result<f64> {
    ensure_dim(x, j.dim())?;
    Ok((x + &j.conjugate(&x.adjoint())).norm_fro())
}

pub fn in_sp(x: &ComplexMatrix, j: &AntiConjugation, tolerance: f64) -> Result<bool> {
    Ok(sp_defect(x, j)? <= tolerance)
}

/// Membership in the orthogonal algebra `X = −JX*J⁻¹` of a conjugation.
pub fn in_o(x: &ComplexMatrix, j: &Conjugation, tolerance: f64) -> Result<bool> {
    ensure_dim(x, j.dim())?;
    Ok((x + &j.conjugate(&x.adjoint())).norm_fro() <= tolerance)
}

/// Averaging projection `(X − J̃X*J̃⁻¹)/2` onto the symplectic algebra.
pub fn project_to_sp(x: &ComplexMatrix, j: &AntiConjugation) -> Result<ComplexMatrix> {
    ensure_dim(x, j.dim())?;
    Ok((x - &j.conjugate(&x.adjoint())).scale_real(0.5))
}

#[derive(Debug, Clone)]
pub struct SpectralPairing {
    /// `λ₁ ≥ λ₂ ≥ … ≥ 0`, one per pair.
    pub lambdas: Vec<f64>,
    /// Columns `b₁…b_m, b₋₁…b₋ₘ` with `b₋ₙ = −J̃bₙ` and `T bₙ ≈ λₙ bₙ`.
    pub basis: ComplexMatrix,
    /// Full spectrum, descending.
    pub eigenvalues: Vec<f64>,
    pub kernel_dim: usize,
    /// `max |cᵢ + c_{d−1−i}|` over the descending spectrum.
    pub pairing_defect: f64,
}

/// Orthonormal accumulator for `J̃`-invariant pairs `{b, −J̃b}`.
struct PairedBasis<'a> {
    j: &'a AntiConjugation,
    plus: Vec<Vec<C64>>,
    minus: Vec<Vec<C64>>,
}

impl PairedBasis<'_> {
    fn residual(&self, v: &[C64]) -> Vec<C64> {
        let mut w = v.to_vec();
        for _ in 0..2 {
            for b in self.plus.iter().chain(&self.minus) {
                let c = dot(b, &w);
                for (x, &y) in w.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        w
    }

    fn accept(&mut self, mut w: Vec<C64>) {
        let n = vec_norm(&w);
        for x in &mut w {
            *x /= n;
        }
        let partner: Vec<C64> = self.j.apply(&w).into_iter().map(|z| -z).collect();
        self.plus.push(w);
        self.minus.push(partner);
    }
}

pub fn spectral_pairing(t: &ComplexMatrix, j: &AntiConjugation) -> Result<SpectralPairing> {
    ensure_dim(t, j.dim())?;
    ensure_hermitian(t)?;
    let norm = t.norm_fro();
    let defect = sp_defect(t, j)?;
    if defect > MEMBERSHIP_TOL * (1.0 + norm) {
        return domain_err(format!("not in sp up to tolerance (defect {defect:.3e})"));
    }
    let d = t.rows();
    let m = d / 2;
    let eig = hermitian_eigen(t)?;
    let c = &eig.values;
    let pairing_defect = (0..d).map(|i| (c[i] + c[d - 1 - i]).abs()).fold(0.0, f64::max);
    if pairing_defect > 1e-8 * norm.max(1.0) {
        return domain_err(format!(
            "not in sp up to tolerance (eigenvalues fail ± pairing by {pairing_defect:.3e})"
        ));
    }
    let zero_tol = 1e-9 * norm;
    let positive: Vec<usize> = (0..d).filter(|&i| c[i] > zero_tol).collect();
    let kernel: Vec<usize> = (0..d).filter(|&i| c[i].abs() <= zero_tol).collect();
    let kernel_dim = kernel.len();
    if !kernel_dim.is_multiple_of(2) || positive.len() * 2 + kernel_dim != d {
        return domain_err(format!(
            "not in sp up to tolerance ({} positive eigenvalues, kernel dimension {kernel_dim})",
            positive.len()
        ));
    }

    let mut paired = PairedBasis {
        j,
        plus: Vec::with_capacity(m),
        minus: Vec::with_capacity(m),
    };
    let mut lambdas = Vec::with_capacity(m);
    for &i in &positive {
        let w = paired.residual(&eig.vectors.column(i));
        if vec_norm(&w) < 0.5 {
            return Err(Error::Domain(format!(
                "eigenvector for λ = {:.6e} is not separated from its ± partner",
                c[i]
            )));
        }
        paired.accept(w);
        lambdas.push(c[i]);
    }
    // Kernel: repeatedly take the candidate with the largest residual.
    let candidates: Vec<Vec<C64>> = kernel.iter().map(|&i| eig.vectors.column(i)).collect();
    while paired.plus.len() < m {
        let best = candidates
            .iter()
            .map(|v| paired.residual(v))
            .max_by(|a, b| vec_norm(a).total_cmp(&vec_norm(b)))
            .expect("kernel has room for another pair");
        paired.accept(best);
        lambdas.push(0.0);
    }

    let columns: Vec<Vec<C64>> = paired.plus.into_iter().chain(paired.minus).collect();
    let basis = ComplexMatrix::from_columns(d, &columns)?;
    Ok(SpectralPairing {
        lambdas,
        basis,
        eigenvalues: eig.values,
        kernel_dim,
        pairing_defect,
    })
}

#[derive(Debug, Clone)]
pub struct TypeCSolution {
    pub pairing: SpectralPairing,
    pub solution: ComplexMatrix,
    pub residual: f64,
    pub sp_defect: f64,
    pub target_norm: f64,
}

impl TypeCSolution {
    pub fn report(&self) -> SolveReport {
        let mut r = SolveReport::new("solve-selfcomm --type C");
        r.push(Check::at_most(
            "residual",
            self.residual,
            1e-8 * (1.0 + self.target_norm),
        ));
        r.push(Check::at_most(
            "sp_defect",
            self.sp_defect,
            1e-8 * (1.0 + self.solution.norm_fro()),
        ));
        r.push(Check::at_most(
            "pairing_defect",
            self.pairing.pairing_defect,
            1e-8 * self.target_norm.max(1.0),
        ));
        r.push(Check::flag(
            "kernel_dim_even",
            self.pairing.kernel_dim.is_multiple_of(2),
        ));
        r.push(Check::info("hs_norm_Y", self.solution.norm_fro()));
        r
    }
}

pub fn solve_type_c(t: &ComplexMatrix, j: &AntiConjugation) -> Result<TypeCSolution> {
    let pairing = spectral_pairing(t, j)?;
    let d = t.rows();
    let m = d / 2;
    let mut shift = ComplexMatrix::zeros(d, d);
    for (n, &lambda) in pairing.lambdas.iter().enumerate() {
        shift[(m + n, n)] = C64::new(lambda.max(0.0).sqrt(), 0.0);
    }
    let w = &pairing.basis;
    let solution = &(w * &shift) * &w.adjoint();
    let residual = (&self_commutator(&solution)? - t).norm_fro();
    let sp_defect = sp_defect(&solution, j)?;
    Ok(TypeCSolution {
        pairing,
        solution,
        residual,
        sp_defect,
        target_norm: t.norm_fro(),
    })
}

#[derive(Debug, Clone)]
pub struct TypeCSplit {
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
    /// `‖[X*,X] + i[Y*,Y] − T‖_F`.
    pub residual: f64,
}

/// `T = [X*,X] + i[Y*,Y]` with `X`, `Y` in sp.
pub fn split_type_c(t: &ComplexMatrix, j: &AntiConjugation) -> Result<TypeCSplit> {
    let norm = t.norm_fro();
    let defect = sp_defect(t, j)?;
    if defect > MEMBERSHIP_TOL * (1.0 + norm) {
        return domain_err(format!("not in sp up to tolerance (defect {defect:.3e})"));
    }
    let ts = t.adjoint();
    let t1 = (t + &ts).scale_real(0.5);
    let t2 = (t - &ts).scale(C64::new(0.0, -0.5));
    for (name, part) in [("Hermitian", &t1), ("skew-Hermitian", &t2)] {
        let pd = sp_defect(part, j)?;
        if pd > MEMBERSHIP_TOL * (1.0 + norm) {
            return domain_err(format!(
                "internal consistency: {name} part left sp (defect {pd:.3e}); target is badly conditioned"
            ));
        }
    }
    let x = solve_type_c(&t1, j)?.solution;
    let y = solve_type_c(&t2, j)?.solution;
    let rebuilt = &self_commutator(&x)? + &self_commutator(&y)?.scale(I);
    let residual = (&rebuilt - t).norm_fro();
    Ok(TypeCSplit { x, y, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::random::{random_hermitian, random_matrix, random_traceless_hermitian, rng};

    fn paper_target() -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, -1.0])
    }

    #[test]
    fn partial_sums_of_the_recurring_target() {
        let a = partial_sums_sorted(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, -1.0]).unwrap();
        let want = [1.0 / 3.0, 2.0 / 3.0, 1.0, 0.0];
        for (x, y) in a.iter().zip(want) {
            assert!((x - y).abs() < 1e-15);
        }
        assert_eq!(partial_sums_sorted(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert!(partial_sums_sorted(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn shift_commutator_is_the_target() {
        let y = weighted_shift(&[1.0 / 3.0, 2.0 / 3.0, 1.0]);
        let s = self_commutator(&y).unwrap();
        assert!((&s - &paper_target()).max_abs() < 1e-15);
        // Weights on the superdiagonal produce the negated target.
        let s = self_commutator(&y.transpose()).unwrap();
        assert!((&s + &paper_target()).max_abs() < 1e-15);
    }

    #[test]
    fn type_a_on_recurring_target() {
        let sol = solve_type_a(&paper_target()).unwrap();
        assert!((sol.solution.norm_fro() - 2f64.sqrt()).abs() < 1e-12);
        assert!(sol.residual < 1e-14);
        assert_eq!(sol.permutation, vec![0, 1, 2, 3]);
    }

    #[test]
    fn type_a_permutation_of_diagonal() {
        let t = ComplexMatrix::from_real_diag(&[-1.0, 0.5, 0.25, 0.25]);
        let sol = solve_type_a(&t).unwrap();
        assert_eq!(sol.permutation, vec![1, 2, 3, 0]);
        assert!(sol.residual < 1e-14);
    }

    #[test]
    fn type_a_zero_and_errors() {
        let sol = solve_type_a(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(sol.solution.max_abs(), 0.0);
        assert!(matches!(
            solve_type_a(&ComplexMatrix::identity(2)),
            Err(Error::Domain(_))
        ));
        let nh = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(solve_type_a(&nh), Err(Error::Domain(_))));
    }

    #[test]
    fn type_a_random_10() {
        let mut r = rng(10);
        let t = random_traceless_hermitian(&mut r, 10);
        let sol = solve_type_a(&t).unwrap();
        assert!(sol.residual <= 1e-9 * (1.0 + t.norm_fro()));
        assert!(sol.report().passed());
    }

    #[test]
    fn rearrangement_examples() {
        let r = rearrange_type_a(&[1.0, -1.0, 0.5, -0.5]);
        assert_eq!(r.order, vec![0, 1, 2, 3]);
        assert_eq!(r.prefix_sums, vec![1.0, 0.0, 0.5, 0.0]);
        let r = rearrange_type_a(&[0.0; 5]);
        assert_eq!(r.order, vec![0, 1, 2, 3, 4]);
        let r = rearrange_type_a(&[1.0, -2.0, -0.5]);
        assert_eq!(r.order, vec![0, 2, 1]);
        assert!((r.defect + 1.5).abs() < 1e-15);
    }

    #[test]
    fn standard_anticonjugation_m1() {
        let j = make_anticonjugation(1).unwrap();
        let v = [C64::new(1.0, 2.0), C64::new(-3.0, 0.5)];
        let w = j.apply(&v);
        assert_eq!(w, vec![v[1].conj(), -v[0].conj()]);
        let ww = j.apply(&w);
        assert_eq!(ww, vec![-v[0], -v[1]]);
        assert!(make_anticonjugation(0).is_err());
    }

    #[test]
    fn sp_membership_examples() {
        let j = make_anticonjugation(1).unwrap();
        assert!(in_sp(&ComplexMatrix::zeros(2, 2), &j, 1e-12).unwrap());
        // E_{−1,1}: row of label −1 (position 1), column of label 1 (position 0).
        assert!(in_sp(&ComplexMatrix::unit(2, 2, 1, 0), &j, 1e-12).unwrap());
        assert!(!in_sp(&ComplexMatrix::identity(2), &j, 1e-12).unwrap());
        assert!(in_sp(&ComplexMatrix::identity(3), &j, 1e-12).is_err());
    }

    #[test]
    fn o_membership_examples() {
        let j = Conjugation::standard(3);
        assert!(in_o(&ComplexMatrix::zeros(3, 3), &j, 1e-12).unwrap());
        let x = ComplexMatrix::from_real(3, 3, &[0.0, 1.0, -2.0, -1.0, 0.0, 3.0, 2.0, -3.0, 0.0]).unwrap();
        assert!(in_o(&x, &j, 1e-12).unwrap());
        assert!(!in_o(&ComplexMatrix::identity(3), &j, 1e-12).unwrap());
    }

    #[test]
    fn pairing_of_small_targets() {
        let j = make_anticonjugation(1).unwrap();
        let p = spectral_pairing(&ComplexMatrix::from_real_diag(&[1.0, -1.0]), &j).unwrap();
        assert_eq!(p.lambdas, vec![1.0]);
        let j2 = make_anticonjugation(2).unwrap();
        let p = spectral_pairing(&ComplexMatrix::zeros(4, 4), &j2).unwrap();
        assert_eq!(p.lambdas, vec![0.0, 0.0]);
        assert_eq!(p.kernel_dim, 4);
    }

    #[test]
    fn pairing_rejects_non_members() {
        let j = make_anticonjugation(1).unwrap();
        let t = ComplexMatrix::from_real_diag(&[1.0, -2.0]);
        assert!(matches!(spectral_pairing(&t, &j), Err(Error::Domain(_))));
    }

    #[test]
    fn type_c_two_entry_solution() {
        let j = make_anticonjugation(2).unwrap();
        let t = ComplexMatrix::from_real_diag(&[1.0, 0.5, -1.0, -0.5]);
        let sol = solve_type_c(&t, &j).unwrap();
        let nonzero: Vec<C64> = sol
            .solution
            .data()
            .iter()
            .copied()
            .filter(|z| z.norm() > 1e-14)
            .collect();
        assert_eq!(nonzero.len(), 2);
        let mut mags: Vec<f64> = nonzero.iter().map(|z| z.norm()).collect();
        mags.sort_by(f64::total_cmp);
        assert!((mags[0] - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((mags[1] - 1.0).abs() < 1e-15);
        assert!(sol.residual <= 1e-10);
        assert!(sol.report().passed());
    }

    #[test]
    fn type_c_zero_target() {
        let j = make_anticonjugation(3).unwrap();
        let sol = solve_type_c(&ComplexMatrix::zeros(6, 6), &j).unwrap();
        assert_eq!(sol.solution.max_abs(), 0.0);
    }

    #[test]
    fn type_c_with_kernel() {
        // Rank-deficient member of sp: project a random Hermitian matrix
        // supported on the first pair of labels.
        let mut r = rng(21);
        let j = make_anticonjugation(4).unwrap();
        let mut h = ComplexMatrix::zeros(8, 8);
        let small = random_hermitian(&mut r, 2);
        let pos = [0, 4];
        for a in 0..2 {
            for b in 0..2 {
                h[(pos[a], pos[b])] = small[(a, b)];
            }
        }
        let t = project_to_sp(&h, &j).unwrap().hermitian_part();
        let sol = solve_type_c(&t, &j).unwrap();
        assert_eq!(sol.pairing.kernel_dim, 6);
        assert!(sol.report().passed(), "{:?}", sol.report());
    }

    #[test]
    fn split_branches() {
        let mut r = rng(4);
        let j = make_anticonjugation(2).unwrap();
        let herm = project_to_sp(&random_hermitian(&mut r, 4), &j)
            .unwrap()
            .hermitian_part();
        let s = split_type_c(&herm, &j).unwrap();
        assert!(s.y.max_abs() < 1e-12);
        assert!(s.residual < 1e-10);

        let skew = herm.scale(I);
        let s = split_type_c(&skew, &j).unwrap();
        assert!(s.x.max_abs() < 1e-12);
        assert!(s.residual < 1e-10);

        let general = project_to_sp(&random_matrix(&mut r, 4, 4), &j).unwrap();
        let s = split_type_c(&general, &j).unwrap();
        assert!(s.residual <= 1e-8 * (1.0 + general.norm_fro()));
    }
}
