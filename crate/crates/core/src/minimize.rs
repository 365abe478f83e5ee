//! Minimum Hilbert–Schmidt norm of `A` subject to `AB − BA = T`, `‖A‖ = ‖B‖`.
//!
//! Each restart runs gradient descent on the penalty
//! `‖A‖² + ‖B‖² + μ‖[A,B] − T‖²` with an increasing `μ`, then finishes on the
//! constraint set itself: tangent-projected gradient steps retracted by
//! Gauss–Newton. Minimising `‖A‖² + ‖B‖²` over the (scale-invariant) feasible
//! set is the same as minimising `‖A‖‖B‖`, which equals `‖A‖²` after the
//! final rescaling.

use rand::SeedableRng;
use rayon::prelude::*;

use crate::error::{domain_err, shape_err, Error, Result};
use crate::numkit::random::{random_matrix, TrialRng};
use crate::numkit::{commutator, hermitian_eigen, trace_norm, ComplexMatrix, EigenDecomposition, C64};
use crate::report::{Check, SolveReport};
use crate::staircase::{diagonal_invariance_check, staircase_form_default};

/// Feasibility below which a restart counts as a solution.
pub const FEASIBLE: f64 = 1e-6;
const TIE: f64 = 1e-12;
/// Starting at `μ = 1` lets the norm term pull most restarts onto reducible
/// pairs whose residual cannot be driven to zero.
const INITIAL_MU: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    Fixed,
    Backtracking,
}

#[derive(Debug, Clone)]
pub struct MinimizeConfig {
    pub dimension: usize,
    pub target: ComplexMatrix,
    pub restarts: usize,
    /// Iteration cap for each of the penalty and constrained phases.
    pub max_iters: usize,
    /// Multiplier applied to `μ` when the penalty phase stalls.
    pub penalty_weight: f64,
    pub step_rule: StepRule,
    pub seed: u64,
}

impl MinimizeConfig {
    pub fn new(target: ComplexMatrix) -> Self {
        Self {
            dimension: target.rows(),
            target,
            restarts: 50,
            max_iters: 2000,
            penalty_weight: 10.0,
            step_rule: StepRule::Backtracking,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        let t = &self.target;
        if !t.is_square() || t.rows() != self.dimension {
            return shape_err(format!(
                "target is {}x{}, dimension is {}",
                t.rows(),
                t.cols(),
                self.dimension
            ));
        }
        let tr = t.trace().norm();
        if tr > 1e-9 * (1.0 + t.norm_fro()) {
            return domain_err(format!("trace-zero required (|Tr T| = {tr:.3e})"));
        }
        if self.restarts == 0 {
            return domain_err("at least one restart is required");
        }
        if self.penalty_weight.partial_cmp(&1.0) != Some(std::cmp::Ordering::Greater) {
            return domain_err("penalty_weight must exceed 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartRecord {
    pub restart: usize,
    pub iters: usize,
    pub feasibility: f64,
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub best_a: ComplexMatrix,
    pub best_b: ComplexMatrix,
    /// `‖A‖_F` after rescaling to `‖A‖_F = ‖B‖_F`.
    pub objective: f64,
    /// `‖[A,B] − T‖_F`.
    pub feasibility: f64,
    pub lower_bound: f64,
    /// `false` when no restart reached [`FEASIBLE`]; the least infeasible run is returned.
    pub feasible: bool,
    pub best_restart: usize,
    pub trace: Vec<RestartRecord>,
}

impl MinimizeResult {
    pub fn report(&self) -> SolveReport {
        let mut r = SolveReport::new("minimize");
        r.push(Check::at_most("feasibility", self.feasibility, FEASIBLE));
        r.push(Check::at_least(
            "objective_vs_lower_bound",
            self.objective,
            self.lower_bound - 1e-6,
        ));
        r.push(Check::info("objective", self.objective));
        r.push(Check::info("lower_bound", self.lower_bound));
        r
    }
}

/// `√(‖T‖_{C₁}/2)`: no pair with `‖A‖ = ‖B‖` does better, since
/// `‖T‖_{C₁} ≤ 2‖A‖‖B‖`.
pub fn lower_bound_certificate(target: &ComplexMatrix) -> Result<f64> {
    Ok((trace_norm(target)? / 2.0).sqrt())
}

fn sq(m: &ComplexMatrix) -> f64 {
    m.data().iter().map(|z| z.norm_sqr()).sum()
}

/// Value and gradient of `‖A‖² + ‖B‖² + μ‖R‖²`, `R = [A,B] − T`, with respect
/// to the real inner product `Re Tr(X*Y)`.
pub fn penalty_gradient(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    target: &ComplexMatrix,
    mu: f64,
) -> Result<(ComplexMatrix, ComplexMatrix, f64)> {
    if a.shape() != b.shape() || a.shape() != target.shape() {
        return shape_err("A, B and the target must share one square shape");
    }
    let r = &commutator(a, b)? - target;
    let value = sq(a) + sq(b) + mu * sq(&r);
    let (la, lb) = lin_adjoint(a, b, &r);
    let ga = &a.scale_real(2.0) + &la.scale_real(2.0 * mu);
    let gb = &b.scale_real(2.0) + &lb.scale_real(2.0 * mu);
    Ok((ga, gb, value))
}

/// Linearisation of `(A, B) ↦ [A,B]` at `(a, b)`.
fn lin(a: &ComplexMatrix, b: &ComplexMatrix, da: &ComplexMatrix, db: &ComplexMatrix) -> ComplexMatrix {
    let mut out = da * b;
    out -= &(b * da);
    out += &(a * db);
    out -= &(db * a);
    out
}

/// Adjoint of [`lin`]: `R ↦ (RB* − B*R, A*R − RA*)`.
fn lin_adjoint(a: &ComplexMatrix, b: &ComplexMatrix, r: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let (as_, bs) = (a.adjoint(), b.adjoint());
    (&(r * &bs) - &(&bs * r), &(&as_ * r) - &(r * &as_))
}

/// Pseudo-inverse of `L L*` on `n x n` matrices.
struct NormalPinv {
    n: usize,
    eig: EigenDecomposition,
    cutoff: f64,
}

impl NormalPinv {
    fn new(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Self> {
        let n = a.rows();
        let nn = n * n;
        let mut g = ComplexMatrix::zeros(nn, nn);
        for k in 0..nn {
            let e = ComplexMatrix::unit(n, n, k / n, k % n);
            let (da, db) = lin_adjoint(a, b, &e);
            let col = lin(a, b, &da, &db);
            for (i, z) in col.data().iter().enumerate() {
                g[(i, k)] = *z;
            }
        }
        let eig = hermitian_eigen(&g.hermitian_part())?;
        let cutoff = 1e-12 * eig.values.first().copied().unwrap_or(0.0).max(0.0);
        Ok(Self { n, eig, cutoff })
    }

    fn apply(&self, r: &ComplexMatrix) -> ComplexMatrix {
        let mut y = self.eig.vectors.adjoint_matvec(r.data());
        for (yi, &l) in y.iter_mut().zip(&self.eig.values) {
            *yi = if l > self.cutoff { *yi / l } else { C64::new(0.0, 0.0) };
        }
        let v = self.eig.vectors.matvec(&y);
        ComplexMatrix::new(self.n, self.n, v).expect("shape preserved")
    }
}

/// Gauss–Newton onto `[A,B] = T` (minimum-norm corrections); returns the
/// most feasible iterate.
fn project_feasible(
    a: ComplexMatrix,
    b: ComplexMatrix,
    target: &ComplexMatrix,
) -> Result<(ComplexMatrix, ComplexMatrix, f64)> {
    let stop = 1e-14 * (1.0 + target.norm_fro());
    let mut r = &commutator(&a, &b)? - target;
    let mut best = (a, b, r.norm_fro());
    for _ in 0..30 {
        if best.2 <= stop {
            break;
        }
        let (a, b, _) = &best;
        let pinv = NormalPinv::new(a, b)?;
        let (da, db) = lin_adjoint(a, b, &pinv.apply(&r));
        let (na, nb) = (a - &da, b - &db);
        let nr = &commutator(&na, &nb)? - target;
        let nf = nr.norm_fro();
        if nf >= best.2 {
            break;
        }
        best = (na, nb, nf);
        r = nr;
    }
    Ok(best)
}

struct RunOutcome {
    a: ComplexMatrix,
    b: ComplexMatrix,
    iters: usize,
    feasibility: f64,
}

fn penalty_phase(
    cfg: &MinimizeConfig,
    mut a: ComplexMatrix,
    mut b: ComplexMatrix,
) -> Result<(ComplexMatrix, ComplexMatrix, usize)> {
    let t = &cfg.target;
    let scale = 1.0 + t.norm_fro();
    let mut mu = INITIAL_MU;
    let mut iters = 0;
    let mut step: f64 = 0.1;
    let mut last_feas = f64::INFINITY;
    let mut stalled = 0;
    while iters < cfg.max_iters {
        let mut prev = f64::INFINITY;
        let stage_start = iters;
        loop {
            let (ga, gb, value) = penalty_gradient(&a, &b, t, mu)?;
            let gnorm2 = sq(&ga) + sq(&gb);
            iters += 1;
            if gnorm2.sqrt() <= 1e-8 || iters >= cfg.max_iters {
                break;
            }
            // Stall: less than 1e-6 relative progress.
            if iters - stage_start > 10 && prev - value <= 1e-6 * value {
                break;
            }
            prev = value;
            match cfg.step_rule {
                StepRule::Backtracking => {
                    step = (step * 2.0).min(1.0);
                    loop {
                        let na = &a - &ga.scale_real(step);
                        let nb = &b - &gb.scale_real(step);
                        let r = &commutator(&na, &nb)? - t;
                        let nv = sq(&na) + sq(&nb) + mu * sq(&r);
                        if nv <= value - 1e-4 * step * gnorm2 || step < 1e-16 {
                            a = na;
                            b = nb;
                            break;
                        }
                        step *= 0.5;
                    }
                }
                StepRule::Fixed => {
                    let lip = 2.0 + 8.0 * mu * (sq(&a) + sq(&b) + sq(t).sqrt());
                    let s = 1.0 / lip;
                    a -= &ga.scale_real(s);
                    b -= &gb.scale_real(s);
                }
            }
        }
        let feas = (&commutator(&a, &b)? - t).norm_fro();
        if feas <= 1e-3 * scale || mu >= 1e8 {
            break;
        }
        // Two stages without halving the residual: a stationary point of
        // ‖[A,B] − T‖ that a larger μ will not escape.
        stalled = if feas > 0.5 * last_feas { stalled + 1 } else { 0 };
        if stalled >= 2 {
            break;
        }
        last_feas = feas;
        mu *= cfg.penalty_weight;
    }
    Ok((a, b, iters))
}

fn constrained_phase(cfg: &MinimizeConfig, a: ComplexMatrix, b: ComplexMatrix) -> Result<RunOutcome> {
    let t = &cfg.target;
    let (mut a, mut b, mut feas) = project_feasible(a, b, t)?;
    let mut iters = 0;
    if feas > FEASIBLE {
        return Ok(RunOutcome {
            a,
            b,
            iters,
            feasibility: feas,
        });
    }
    let mut step: f64 = 0.25;
    while iters < cfg.max_iters {
        iters += 1;
        let pinv = NormalPinv::new(&a, &b)?;
        let (ga, gb) = (a.scale_real(2.0), b.scale_real(2.0));
        let (ca, cb) = lin_adjoint(&a, &b, &pinv.apply(&lin(&a, &b, &ga, &gb)));
        let (ga, gb) = (&ga - &ca, &gb - &cb);
        let gnorm2 = sq(&ga) + sq(&gb);
        if gnorm2.sqrt() <= 1e-8 && feas <= 1e-8 {
            break;
        }
        let f = sq(&a) + sq(&b);
        step = (step * 2.0).min(1.0);
        let mut accepted = false;
        // Below this the requested decrease is lost to rounding in f.
        while step * gnorm2 > f64::EPSILON * f {
            let (na, nb, nfeas) = project_feasible(&a - &ga.scale_real(step), &b - &gb.scale_real(step), t)?;
            if nfeas <= feas.max(1e-12 * (1.0 + t.norm_fro())) && sq(&na) + sq(&nb) <= f - 1e-4 * step * gnorm2 {
                a = na;
                b = nb;
                feas = nfeas;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(RunOutcome {
        a,
        b,
        iters,
        feasibility: feas,
    })
}

/// `(cA, B/c)` with `c = √(‖B‖/‖A‖)`.
pub fn normalize_pair(a: &ComplexMatrix, b: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let (na, nb) = (a.norm_fro(), b.norm_fro());
    if na == 0.0 || nb == 0.0 {
        return (a.clone(), b.clone());
    }
    let c = (nb / na).sqrt();
    (a.scale_real(c), b.scale_real(1.0 / c))
}

fn run_restart(cfg: &MinimizeConfig, restart: usize, lower_bound: f64) -> Result<(RunOutcome, RestartRecord)> {
    let mut rng = TrialRng::seed_from_u64(cfg.seed);
    rng.set_stream(restart as u64);
    let n = cfg.dimension;
    let init = |m: ComplexMatrix| {
        let s = m.norm_fro();
        if s > 0.0 {
            m.scale_real(lower_bound / s)
        } else {
            m
        }
    };
    let a0 = init(random_matrix(&mut rng, n, n));
    let b0 = init(random_matrix(&mut rng, n, n));
    let (a, b, pen_iters) = penalty_phase(cfg, a0, b0)?;
    let mut out = constrained_phase(cfg, a, b)?;
    let (a, b) = normalize_pair(&out.a, &out.b);
    out.a = a;
    out.b = b;
    out.iters += pen_iters;
    let record = RestartRecord {
        restart,
        iters: out.iters,
        feasibility: out.feasibility,
        objective: out.a.norm_fro(),
    };
    Ok((out, record))
}

pub fn minimize_commutator(cfg: &MinimizeConfig) -> Result<MinimizeResult> {
    cfg.validate()?;
    let lower_bound = lower_bound_certificate(&cfg.target)?;
    let runs = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| run_restart(cfg, k, lower_bound))
        .collect::<Result<Vec<_>>>()?;

    // Lowest objective among feasible runs; ties go to the lowest index.
    let feasible: Vec<usize> = (0..runs.len()).filter(|&k| runs[k].1.feasibility <= FEASIBLE).collect();
    let pick = |pool: &[usize], key: &dyn Fn(&RestartRecord) -> f64| {
        pool.iter().copied().fold(None, |best: Option<usize>, k| match best {
            Some(j) if key(&runs[k].1) >= key(&runs[j].1) - TIE => Some(j),
            _ => Some(k),
        })
    };
    let (best, is_feasible) = match pick(&feasible, &|r| r.objective) {
        Some(k) => (k, true),
        None => {
            let all: Vec<usize> = (0..runs.len()).collect();
            (
                pick(&all, &|r| r.feasibility).ok_or_else(|| Error::Domain("no restarts".into()))?,
                false,
            )
        }
    };
    let trace = runs.iter().map(|(_, r)| r.clone()).collect();
    let (out, rec) = &runs[best];
    Ok(MinimizeResult {
        best_a: out.a.clone(),
        best_b: out.b.clone(),
        objective: rec.objective,
        feasibility: rec.feasibility,
        lower_bound,
        feasible: is_feasible,
        best_restart: best,
        trace,
    })
}

/// The optimal pair for `diag(−1, 1/3, 1/3, 1/3)`.
pub fn optimal_pair() -> (ComplexMatrix, ComplexMatrix) {
    let s = 1.0 / 3f64.sqrt();
    let r2 = 2f64.sqrt() * s;
    #[rustfmt::skip]
    let a = ComplexMatrix::from_real(4, 4, &[
        0.0, 0.0, 0.0, -s,
        r2,  0.0, 0.0, 0.0,
        0.0, s,   0.0, 0.0,
        0.0, 0.0, 0.0, 0.0,
    ]).expect("4x4");
    #[rustfmt::skip]
    let b = ComplexMatrix::from_real(4, 4, &[
        0.0, r2,  0.0, 0.0,
        0.0, 0.0, s,   0.0,
        0.0, 0.0, 0.0, 0.0,
        s,   0.0, 0.0, 0.0,
    ]).expect("4x4");
    (a, b)
}

/// Checks the hard-coded optimal pair: commutator, norms, and the staircase
/// zeros of `U*AU` at positions (1,4), (3,1), (4,1).
pub fn verify_optimal_pair() -> Result<SolveReport> {
    let (a, b) = optimal_pair();
    let target = ComplexMatrix::from_real_diag(&[-1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]);
    let want = (4.0f64 / 3.0).sqrt();
    let mut r = SolveReport::new("verify-optimal-pair");
    r.push(Check::at_most(
        "commutator_error",
        (&commutator(&a, &b)? - &target).max_abs(),
        1e-15,
    ));
    r.push(Check::close_to("hs_norm_A", a.norm_fro(), want, 1e-15));
    r.push(Check::close_to("hs_norm_B", b.norm_fro(), want, 1e-15));
    let stair = staircase_form_default(&[a], false)?;
    let ua = &stair.transformed[0];
    let zeros = [(0, 3), (2, 0), (3, 0)]
        .iter()
        .map(|&(i, j)| ua[(i, j)].norm())
        .fold(0.0, f64::max);
    r.push(Check::at_most("staircase_zeros", zeros, 1e-15));
    r.push(Check::flag(
        "diagonal_invariant",
        diagonal_invariance_check(&target, &stair.unitary, 1e-15),
    ));
    if let Some(bad) = r.first_failure() {
        return Err(Error::Verification {
            block: 0,
            detail: format!("optimal pair check `{}` measured {:.3e}", bad.name, bad.measured),
        });
    }
    Ok(r)
}

/// Diagonal of `[A,B]` from the entrywise expansion `Σₖ a_{ik}b_{ki} − b_{ik}a_{ki}`.
pub fn diagonal_equations(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Vec<C64>> {
    if !a.is_square() || a.shape() != b.shape() {
        return shape_err("A and B must be square of equal size");
    }
    let n = a.rows();
    Ok((0..n)
        .map(|i| (0..n).map(|k| a[(i, k)] * b[(k, i)] - b[(i, k)] * a[(k, i)]).sum())
        .collect())
}
