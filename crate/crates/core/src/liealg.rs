//! Killing form, semisimplicity, and the root-space solver on sl(r+1, ℂ).

use crate::error::{domain_err, shape_err, Error, Result};
use crate::numkit::{commutator, singular_values, solve, ComplexMatrix, C64, I};
use crate::report::{Check, SolveReport};
use crate::selfcomm::{solve_type_a, TypeASolution};

/// Least-squares residual allowed for span and bracket-closure tests.
pub const SPAN_TOL: f64 = 1e-8;

/// Matrix units and the simple-root data of sl(r+1).
#[derive(Debug, Clone)]
pub struct SlRootData {
    pub r: usize,
    /// `E_{jk}`, `j ≠ k`, keyed 1-based.
    pub basis_e: Vec<((usize, usize), ComplexMatrix)>,
    /// `Hⱼ = E_{jj} − E_{j+1,j+1}`.
    pub basis_h: Vec<ComplexMatrix>,
    /// Defining matrices `E_{jj} − E_{j+1,j+1}` of the simple roots `α_{j,j+1}`.
    pub simple_roots: Vec<ComplexMatrix>,
}

impl SlRootData {
    pub fn new(r: usize) -> Result<Self> {
        if r == 0 {
            return domain_err("sl(r+1) needs r ≥ 1");
        }
        let n = r + 1;
        let mut basis_e = Vec::with_capacity(n * r);
        for j in 1..=n {
            for k in 1..=n {
                if j != k {
                    basis_e.push(((j, k), ComplexMatrix::unit(n, n, j - 1, k - 1)));
                }
            }
        }
        let basis_h: Vec<ComplexMatrix> = (1..=r)
            .map(|j| &ComplexMatrix::unit(n, n, j - 1, j - 1) - &ComplexMatrix::unit(n, n, j, j))
            .collect();
        let data = Self {
            r,
            basis_e,
            simple_roots: basis_h.clone(),
            basis_h,
        };
        data.check_relations()?;
        Ok(data)
    }

    pub fn n(&self) -> usize {
        self.r + 1
    }

    /// `E_{jk}` (1-based).
    pub fn e(&self, j: usize, k: usize) -> ComplexMatrix {
        ComplexMatrix::unit(self.n(), self.n(), j - 1, k - 1)
    }

    /// `X_{αⱼ} = E_{j,j+1}`.
    pub fn positive_root_vector(&self, j: usize) -> ComplexMatrix {
        self.e(j, j + 1)
    }

    /// `X_{−αⱼ} = E_{j+1,j}`.
    pub fn negative_root_vector(&self, j: usize) -> ComplexMatrix {
        self.e(j + 1, j)
    }

    /// Root vectors followed by the `Hⱼ`: a basis of sl(r+1).
    pub fn basis(&self) -> Vec<ComplexMatrix> {
        self.basis_e
            .iter()
            .map(|(_, m)| m.clone())
            .chain(self.basis_h.iter().cloned())
            .collect()
    }

    fn check_relations(&self) -> Result<()> {
        for ((j, k), a) in &self.basis_e {
            for ((q, l), b) in &self.basis_e {
                let want = if k == q {
                    if j == l {
                        ComplexMatrix::unit(self.n(), self.n(), j - 1, j - 1)
                    } else {
                        self.e(*j, *l)
                    }
                } else {
                    ComplexMatrix::zeros(self.n(), self.n())
                };
                if a * b != want {
                    return Err(Error::Construction {
                        identity: format!("E_{{{j}{k}}} E_{{{q}{l}}}"),
                        n: self.n(),
                        residual: (&(a * b) - &want).max_abs(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Coordinates with respect to a linearly independent family of matrices.
#[derive(Debug, Clone)]
pub struct SpanBasis {
    basis: Vec<ComplexMatrix>,
    gram_inverse: ComplexMatrix,
}

fn frob_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    a.data().iter().zip(b.data()).map(|(x, y)| x.conj() * y).sum()
}

impl SpanBasis {
    pub fn new(basis: &[ComplexMatrix]) -> Result<Self> {
        let Some(first) = basis.first() else {
            return domain_err("empty basis");
        };
        if basis.iter().any(|b| b.shape() != first.shape()) {
            return shape_err("basis matrices differ in shape");
        }
        let k = basis.len();
        let gram = ComplexMatrix::from_fn(k, k, |i, j| frob_inner(&basis[i], &basis[j]));
        let sv = singular_values(&gram)?;
        let (hi, lo) = (sv[0], sv[k - 1]);
        if hi == 0.0 || lo < 1e-12 * hi {
            return domain_err("basis is not linearly independent");
        }
        let gram_inverse = solve(&gram, &ComplexMatrix::identity(k))?;
        Ok(Self {
            basis: basis.to_vec(),
            gram_inverse,
        })
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Least-squares coordinates and the residual `‖x − Σ cₘ bₘ‖_F`.
    pub fn expand(&self, x: &ComplexMatrix) -> Result<(Vec<C64>, f64)> {
        if x.shape() != self.basis[0].shape() {
            return shape_err(format!(
                "expected shape {:?}, got {:?}",
                self.basis[0].shape(),
                x.shape()
            ));
        }
        let rhs: Vec<C64> = self.basis.iter().map(|b| frob_inner(b, x)).collect();
        let coords = self.gram_inverse.matvec(&rhs);
        let mut rebuilt = ComplexMatrix::zeros(x.rows(), x.cols());
        for (c, b) in coords.iter().zip(&self.basis) {
            rebuilt += &b.scale(*c);
        }
        Ok((coords, (&rebuilt - x).norm_fro()))
    }

    /// Coordinates, failing when `x` is outside the span.
    pub fn coordinates(&self, x: &ComplexMatrix) -> Result<Vec<C64>> {
        let (coords, residual) = self.expand(x)?;
        if residual > SPAN_TOL * (1.0 + x.norm_fro()) {
            return domain_err(format!("matrix lies outside the span (residual {residual:.3e})"));
        }
        Ok(coords)
    }

    /// `ad X` in this basis: column `m` holds the coordinates of `[X, bₘ]`.
    pub fn ad(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.coordinates(x)?;
        let cols = self
            .basis
            .iter()
            .map(|b| self.coordinates(&commutator(x, b)?))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| match e {
                Error::Domain(_) => Error::Domain("basis is not closed under the bracket".into()),
                other => other,
            })?;
        ComplexMatrix::from_columns(self.len(), &cols)
    }
}

/// `B(X, W) = Tr(ad X · ad W)` in the algebra spanned by `algebra_basis`.
pub fn killing_form(x: &ComplexMatrix, w: &ComplexMatrix, algebra_basis: &[ComplexMatrix]) -> Result<C64> {
    let span = SpanBasis::new(algebra_basis)?;
    killing_form_in(&span, x, w)
}

pub fn killing_form_in(span: &SpanBasis, x: &ComplexMatrix, w: &ComplexMatrix) -> Result<C64> {
    Ok((&span.ad(x)? * &span.ad(w)?).trace())
}

/// Nondegeneracy of the Killing form on a bracket-closed basis.
pub fn is_semisimple(algebra_basis: &[ComplexMatrix]) -> Result<bool> {
    let span = SpanBasis::new(algebra_basis)?;
    let ads = algebra_basis.iter().map(|b| span.ad(b)).collect::<Result<Vec<_>>>()?;
    let k = ads.len();
    let gram = ComplexMatrix::from_fn(k, k, |i, j| (&ads[i] * &ads[j]).trace());
    let sv = singular_values(&gram)?;
    let largest = sv[0];
    Ok(largest > 0.0 && sv[k - 1] >= 1e-8 * largest)
}

#[derive(Debug, Clone)]
pub struct SlSolution {
    /// `aⱼ`: coefficient of `Hⱼ` once `A` is diagonalised with descending eigenvalues.
    pub coefficients: Vec<f64>,
    /// `Y = V (Σ √aⱼ X_{−αⱼ}) V*`; identical to the type (A) solver output.
    pub inner: TypeASolution,
}

impl SlSolution {
    pub fn solution(&self) -> &ComplexMatrix {
        &self.inner.solution
    }

    pub fn report(&self) -> SolveReport {
        let mut r = SolveReport::new("lie solve-sl");
        r.push(Check::at_most(
            "residual",
            self.inner.residual,
            1e-9 * (1.0 + self.inner.target_norm),
        ));
        let min = self.coefficients.iter().copied().fold(f64::INFINITY, f64::min);
        r.push(Check::at_least(
            "min_coefficient",
            if min.is_finite() { min } else { 0.0 },
            -1e-12,
        ));
        for (j, a) in self.coefficients.iter().enumerate() {
            r.push(Check::info(format!("a_{}", j + 1), *a));
        }
        r.push(Check::info("hs_norm_Y", self.inner.solution.norm_fro()));
        r
    }
}

pub fn solve_sl(a: &ComplexMatrix) -> Result<SlSolution> {
    let inner = solve_type_a(a)?;
    let r = a.rows().saturating_sub(1);
    let coefficients = inner.partial_sums[..r].to_vec();
    Ok(SlSolution { coefficients, inner })
}

#[derive(Debug, Clone)]
pub struct OberwolfachSplit {
    pub x1: ComplexMatrix,
    pub x2: ComplexMatrix,
    pub y1: ComplexMatrix,
    pub y2: ComplexMatrix,
    /// `‖[X₁,X₂] + [Y₁,Y₂] − A‖_F`.
    pub residual: f64,
}

/// `A = [X₁,X₂] + [Y₁,Y₂]` for traceless `A`.
pub fn oberwolfach_split(a: &ComplexMatrix) -> Result<OberwolfachSplit> {
    if !a.is_square() {
        return shape_err(format!("expected a square matrix, got {}x{}", a.rows(), a.cols()));
    }
    let tr = a.trace().norm();
    if tr > 1e-9 * (1.0 + a.norm_fro()) {
        return domain_err(format!("trace-zero required (|Tr A| = {tr:.3e})"));
    }
    let adj = a.adjoint();
    let a1 = (a + &adj).scale_real(0.5);
    let a2 = (a - &adj).scale(C64::new(0.0, -0.5));
    let w1 = solve_sl(&a1)?.inner.solution;
    let w2 = solve_sl(&a2)?.inner.solution;
    let (x1, x2) = (w1.adjoint(), w1);
    let (y1, y2) = (w2.adjoint().scale(I), w2);
    let rebuilt = &commutator(&x1, &x2)? + &commutator(&y1, &y2)?;
    let residual = (&rebuilt - a).norm_fro();
    Ok(OberwolfachSplit {
        x1,
        x2,
        y1,
        y2,
        residual,
    })
}

/// All diagonal matrices of size `n`: an abelian algebra.
pub fn diagonal_algebra(n: usize) -> Vec<ComplexMatrix> {
    (0..n).map(|i| ComplexMatrix::unit(n, n, i, i)).collect()
}
