//! Block tri-diagonal operators `C`, `Z` whose commutator is the rank-one
//! projection `e₁e₁*`, and the √dₙ-weighted variant whose commutator is a
//! positive diagonal with telescoping entries `(dₙ − dₙ₋₁)/n`.
//!
//! Blocks are indexed from 1 as in the formulas: block `n` of `C` above the
//! diagonal is the `n x (n+1)` matrix `Aₙ`, below it the `(n+1) x n` matrix
//! `Bₙ`; `Z` uses `Xₙ` and `Yₙ` in the same positions. Block row `k` of the
//! assembled matrix has size `k`.

use crate::error::{domain_err, shape_err, Error, Result};
use crate::numkit::{commutator, ComplexMatrix, C64};
use crate::report::{Check, SolveReport};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
const IDENTITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum WeightFamily {
    /// `dₙ = scale · n^power · log(n+1)^log_power`.
    PowerLog {
        scale: f64,
        power: f64,
        log_power: f64,
    },
    Explicit,
}

/// A weight sequence `d₁, d₂, …` with a materialised finite prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    pub family: WeightFamily,
    prefix: Vec<f64>,
}

impl WeightSequence {
    pub fn power_log(scale: f64, power: f64, log_power: f64, len: usize) -> Result<Self> {
        let prefix: Vec<f64> = (1..=len)
            .map(|n| {
                let n = n as f64;
                scale * n.powf(power) * (n + 1.0).ln().powf(log_power)
            })
            .collect();
        if prefix.iter().any(|d| !d.is_finite()) {
            return domain_err("power-log weights overflow");
        }
        Ok(Self {
            family: WeightFamily::PowerLog {
                scale,
                power,
                log_power,
            },
            prefix,
        })
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        if let Some(k) = values.iter().position(|d| !d.is_finite()) {
            return domain_err(format!("weight d_{} is not finite", k + 1));
        }
        Ok(Self {
            family: WeightFamily::Explicit,
            prefix: values,
        })
    }

    pub fn constant(value: f64, len: usize) -> Result<Self> {
        Self::explicit(vec![value; len])
    }

    pub fn len(&self) -> usize {
        self.prefix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefix.is_empty()
    }

    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    /// `dₙ`, 1-based.
    pub fn get(&self, n: usize) -> Option<f64> {
        n.checked_sub(1).and_then(|i| self.prefix.get(i).copied())
    }

    /// Non-negative and non-decreasing over the prefix.
    pub fn is_monotone(&self) -> bool {
        self.prefix.first().is_none_or(|&d| d >= 0.0) && self.prefix.windows(2).all(|w| w[0] <= w[1])
    }

    /// Every weight multiplied by `t`.
    pub fn scaled(&self, t: f64) -> Self {
        let family = match self.family {
            WeightFamily::PowerLog {
                scale,
                power,
                log_power,
            } => WeightFamily::PowerLog {
                scale: scale * t,
                power,
                log_power,
            },
            WeightFamily::Explicit => WeightFamily::Explicit,
        };
        Self {
            family,
            prefix: self.prefix.iter().map(|d| d * t).collect(),
        }
    }
}

/// The four generator blocks for index `n`.
#[derive(Debug, Clone)]
pub struct AndersonBlocks {
    pub n: usize,
    /// `n x (n+1)`, entries `√(n−i)/n` on the diagonal.
    pub a: ComplexMatrix,
    /// `(n+1) x n`, entries `−√i/(n+1)` on the subdiagonal.
    pub b: ComplexMatrix,
    /// `n x (n+1)`, entries `√i/n` on the superdiagonal.
    pub x: ComplexMatrix,
    /// `(n+1) x n`, entries `√(n−i)/(n+1)` on the diagonal.
    pub y: ComplexMatrix,
}

pub fn make_blocks(n: usize) -> Result<AndersonBlocks> {
    if n == 0 {
        return domain_err("block index starts at 1");
    }
    let nf = n as f64;
    let mut a = ComplexMatrix::zeros(n, n + 1);
    let mut x = ComplexMatrix::zeros(n, n + 1);
    let mut b = ComplexMatrix::zeros(n + 1, n);
    let mut y = ComplexMatrix::zeros(n + 1, n);
    for i in 0..n {
        a[(i, i)] = C64::new(((n - i) as f64).sqrt() / nf, 0.0);
        x[(i, i + 1)] = C64::new(((i + 1) as f64).sqrt() / nf, 0.0);
        b[(i + 1, i)] = C64::new(-((i + 1) as f64).sqrt() / (nf + 1.0), 0.0);
        y[(i, i)] = C64::new(((n - i) as f64).sqrt() / (nf + 1.0), 0.0);
    }
    Ok(AndersonBlocks { n, a, b, x, y })
}

#[derive(Debug, Clone)]
pub struct IdentityResidual {
    pub identity: &'static str,
    pub n: usize,
    pub residual: f64,
}

/// Residuals of the block relations behind the telescoping diagonal, for
/// unscaled blocks with index `n`:
///
/// * `AₙYₙ − XₙBₙ = Iₙ/n`
/// * `BₙXₙ − YₙAₙ = −Iₙ₊₁/(n+1)`
/// * `Aₙ₊₁Yₙ₊₁ − Xₙ₊₁Bₙ₊₁ = Iₙ₊₁/(n+1)`
/// * `Bₙ₊₁Yₙ − Yₙ₊₁Bₙ = 0` (lower block of `[C,Z]`)
/// * `AₙXₙ₊₁ − XₙAₙ₊₁ = 0` (upper block of `[C,Z]`)
pub fn identity_checks(n: usize) -> Result<Vec<IdentityResidual>> {
    let cur = make_blocks(n)?;
    let next = make_blocks(n + 1)?;
    let scaled_identity = |size: usize, s: f64| ComplexMatrix::identity(size).scale_real(s);
    let nf = n as f64;

    let relations: [(&'static str, ComplexMatrix, ComplexMatrix); 5] = [
        (
            "A_n Y_n - X_n B_n = I_n/n",
            &(&cur.a * &cur.y) - &(&cur.x * &cur.b),
            scaled_identity(n, 1.0 / nf),
        ),
        (
            "B_n X_n - Y_n A_n = -I_{n+1}/(n+1)",
            &(&cur.b * &cur.x) - &(&cur.y * &cur.a),
            scaled_identity(n + 1, -1.0 / (nf + 1.0)),
        ),
        (
            "A_{n+1} Y_{n+1} - X_{n+1} B_{n+1} = I_{n+1}/(n+1)",
            &(&next.a * &next.y) - &(&next.x * &next.b),
            scaled_identity(n + 1, 1.0 / (nf + 1.0)),
        ),
        (
            "B_{n+1} Y_n - Y_{n+1} B_n = 0",
            &(&next.b * &cur.y) - &(&next.y * &cur.b),
            ComplexMatrix::zeros(n + 2, n),
        ),
        (
            "A_n X_{n+1} - X_n A_{n+1} = 0",
            &(&cur.a * &next.x) - &(&cur.x * &next.a),
            ComplexMatrix::zeros(n, n + 2),
        ),
    ];

    let mut out = Vec::with_capacity(relations.len());
    for (identity, lhs, rhs) in relations {
        let residual = (&lhs - &rhs).max_abs();
        if residual > IDENTITY_TOLERANCE {
            return Err(Error::Construction {
                identity: identity.to_string(),
                n,
                residual,
            });
        }
        out.push(IdentityResidual { identity, n, residual });
    }
    Ok(out)
}

/// Block tri-diagonal operator with zero diagonal blocks in the Anderson
/// layout: `super_blocks[k-1]` sits at block `(k, k+1)` and has shape
/// `k x (k+1)`; `sub_blocks[k-1]` sits at `(k+1, k)` with shape `(k+1) x k`.
#[derive(Debug, Clone)]
pub struct BlockTriDiagonalOperator {
    pub diag_blocks: Vec<ComplexMatrix>,
    pub super_blocks: Vec<ComplexMatrix>,
    pub sub_blocks: Vec<ComplexMatrix>,
}

impl BlockTriDiagonalOperator {
    pub fn block_count(&self) -> usize {
        self.super_blocks.len()
    }

    /// `1 + 2 + … + (block_count + 1)`.
    pub fn dimension(&self) -> usize {
        let k = self.block_count();
        (k + 1) * (k + 2) / 2
    }
}

/// Offset of 1-based block row `k` in the assembled matrix.
fn block_offset(k: usize) -> usize {
    k * (k - 1) / 2
}

/// Anderson operators with every block scaled by `√dₙ`.
pub fn build_modified(
    weights: &WeightSequence,
    block_count: usize,
) -> Result<(BlockTriDiagonalOperator, BlockTriDiagonalOperator)> {
    if weights.len() < block_count {
        return domain_err(format!("need {block_count} weights, the prefix has {}", weights.len()));
    }
    let mut c = BlockTriDiagonalOperator {
        diag_blocks: (1..=block_count + 1).map(|k| ComplexMatrix::zeros(k, k)).collect(),
        super_blocks: Vec::with_capacity(block_count),
        sub_blocks: Vec::with_capacity(block_count),
    };
    let mut z = c.clone();
    for n in 1..=block_count {
        let d = weights.get(n).expect("checked length");
        if d < 0.0 {
            return domain_err(format!("weight d_{n} = {d} is negative"));
        }
        let s = d.sqrt();
        let blocks = make_blocks(n)?;
        c.super_blocks.push(blocks.a.scale_real(s));
        c.sub_blocks.push(blocks.b.scale_real(s));
        z.super_blocks.push(blocks.x.scale_real(s));
        z.sub_blocks.push(blocks.y.scale_real(s));
    }
    Ok((c, z))
}

/// Dense form of a block tri-diagonal operator.
pub fn assemble(op: &BlockTriDiagonalOperator) -> Result<ComplexMatrix> {
    let k = op.block_count();
    if op.sub_blocks.len() != k {
        return shape_err(format!("{k} super blocks but {} sub blocks", op.sub_blocks.len()));
    }
    if !op.diag_blocks.is_empty() && op.diag_blocks.len() != k + 1 {
        return shape_err(format!(
            "expected {} diagonal blocks, got {}",
            k + 1,
            op.diag_blocks.len()
        ));
    }
    let mut m = ComplexMatrix::zeros(op.dimension(), op.dimension());
    for (i, d) in op.diag_blocks.iter().enumerate() {
        let n = i + 1;
        if d.shape() != (n, n) {
            return shape_err(format!("diagonal block {n} has shape {:?}", d.shape()));
        }
        m.set_block(block_offset(n), block_offset(n), d)?;
    }
    for n in 1..=k {
        let up = &op.super_blocks[n - 1];
        let low = &op.sub_blocks[n - 1];
        if up.shape() != (n, n + 1) {
            return shape_err(format!(
                "super block {n} has shape {:?}, expected ({n}, {})",
                up.shape(),
                n + 1
            ));
        }
        if low.shape() != (n + 1, n) {
            return shape_err(format!(
                "sub block {n} has shape {:?}, expected ({}, {n})",
                low.shape(),
                n + 1
            ));
        }
        m.set_block(block_offset(n), block_offset(n + 1), up)?;
        m.set_block(block_offset(n + 1), block_offset(n), low)?;
    }
    Ok(m)
}

/// Measured diagonal block of `[C,Z]`.
#[derive(Debug, Clone)]
pub struct DiagonalBlock {
    /// 1-based block row.
    pub block: usize,
    /// Mean of the block's diagonal entries.
    pub value: f64,
    /// Largest deviation of any entry of the block from `value · I`.
    pub spread: f64,
    /// Telescoping prediction: `d₁` for block 1, `(d_k − d_{k−1})/k` after.
    pub expected: f64,
    /// `|value − expected|`, or the spread if that is larger.
    pub residual: f64,
    pub interior: bool,
}

#[derive(Debug, Clone)]
pub struct CommutatorVerification {
    pub block_count: usize,
    pub dimension: usize,
    pub blocks: Vec<DiagonalBlock>,
    /// Frobenius mass of `[C,Z]` outside the diagonal and second off-diagonal blocks.
    pub off_band_mass: f64,
    /// Frobenius mass of the interior second off-diagonal (L/U) blocks.
    pub interior_lu_mass: f64,
    /// Largest residual over the last two block rows (reported, not asserted).
    pub boundary_residual: f64,
    pub report: SolveReport,
}

impl CommutatorVerification {
    pub fn interior(&self) -> impl Iterator<Item = &DiagonalBlock> {
        self.blocks.iter().filter(|b| b.interior)
    }

    /// Smallest interior diagonal value.
    pub fn interior_min(&self) -> f64 {
        self.interior().map(|b| b.value).fold(f64::INFINITY, f64::min)
    }
}

fn telescoping_value(weights: &WeightSequence, k: usize) -> Option<f64> {
    if k == 1 {
        weights.get(1)
    } else {
        Some((weights.get(k)? - weights.get(k - 1)?) / k as f64)
    }
}

/// Assembles the truncated weighted `C`, `Z` and checks that `[C,Z]` is
/// block diagonal with scalar blocks matching the telescoping profile,
/// except in the last two block rows where truncation breaks it.
pub fn verify_positive_commutator(
    weights: &WeightSequence,
    block_count: usize,
    tolerance: f64,
) -> Result<CommutatorVerification> {
    if block_count < 3 {
        return domain_err("verification needs at least 3 blocks");
    }
    if weights.len() < block_count + 1 {
        return domain_err(format!(
            "need {} weights, the prefix has {}",
            block_count + 1,
            weights.len()
        ));
    }
    let (c, z) = build_modified(weights, block_count)?;
    let cm = assemble(&c)?;
    let zm = assemble(&z)?;
    let comm = commutator(&cm, &zm)?;
    let last = block_count + 1;
    let is_interior = |k: usize| k + 2 <= last;

    let mut off_band = 0.0;
    let mut interior_lu = 0.0;
    let mut boundary_lu: f64 = 0.0;
    for bi in 1..=last {
        for bj in 1..=last {
            let gap = bi.abs_diff(bj);
            if gap == 0 {
                continue;
            }
            let block = comm.block(block_offset(bi), block_offset(bj), bi, bj);
            let mass = block.norm_fro().powi(2);
            if gap == 2 {
                if is_interior(bi) && is_interior(bj) {
                    interior_lu += mass;
                } else {
                    boundary_lu = boundary_lu.max(block.max_abs());
                }
            } else {
                off_band += mass;
            }
        }
    }
    let off_band_mass = f64::sqrt(off_band);
    let interior_lu_mass = f64::sqrt(interior_lu);

    let mut report = SolveReport::new("anderson-verify");
    report.push(Check::at_most("off_band_mass", off_band_mass, tolerance));
    report.push(Check::at_most("interior_lu_mass", interior_lu_mass, tolerance));
    if off_band_mass > tolerance {
        return Err(Error::Verification {
            block: 0,
            detail: format!("mass {off_band_mass:.3e} outside the block band"),
        });
    }
    if interior_lu_mass > tolerance {
        return Err(Error::Verification {
            block: 0,
            detail: format!("interior L/U block mass {interior_lu_mass:.3e}"),
        });
    }

    let mut blocks = Vec::with_capacity(last);
    let mut boundary_residual = boundary_lu;
    for k in 1..=last {
        let off = block_offset(k);
        let d = comm.block(off, off, k, k);
        let diag = d.diagonal();
        let value = diag.iter().map(|z| z.re).sum::<f64>() / k as f64;
        let spread = (&d - &ComplexMatrix::identity(k).scale_real(value)).max_abs();
        let expected = telescoping_value(weights, k).expect("prefix covers block_count + 1");
        let residual = (value - expected).abs().max(spread);
        let interior = is_interior(k);
        if interior {
            report.push(Check::at_most(format!("diag_block_{k}"), residual, tolerance));
            if residual > tolerance {
                return Err(Error::Verification {
                    block: k,
                    detail: format!(
                        "diagonal block value {value:.6e} (spread {spread:.3e}) differs from telescoping value {expected:.6e}"
                    ),
                });
            }
        } else {
            boundary_residual = boundary_residual.max(residual);
        }
        blocks.push(DiagonalBlock {
            block: k,
            value,
            spread,
            expected,
            residual,
            interior,
        });
    }
    report.push(Check::info("boundary_residual", boundary_residual));

    Ok(CommutatorVerification {
        block_count,
        dimension: cm.rows(),
        blocks,
        off_band_mass,
        interior_lu_mass,
        boundary_residual,
        report,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Admissibility {
    /// Decided `dₙ/n → 0` for closed-form families; `None` for explicit lists.
    pub analytic: Option<bool>,
    /// `max dₙ/n` over the second half of the horizon covered by the prefix.
    pub tail_max: f64,
}

pub fn admissible(weights: &WeightSequence, horizon: usize) -> Admissibility {
    let analytic = match weights.family {
        WeightFamily::PowerLog {
            scale,
            power,
            log_power,
        } => Some(scale == 0.0 || power < 1.0 || (power == 1.0 && log_power < 0.0)),
        WeightFamily::Explicit => None,
    };
    let end = horizon.min(weights.len());
    let start = (end / 2).max(1);
    let tail_max = (start..=end)
        .filter_map(|n| weights.get(n).map(|d| d / n as f64))
        .fold(f64::NEG_INFINITY, f64::max);
    Admissibility { analytic, tail_max }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parameterization {
    /// `(d₁, (d₂−d₁)/2 ×2, (d₃−d₂)/3 ×3, …)`.
    Differences,
    /// `(d₁, d₂/2 ×2, d₃/3 ×3, …)`.
    CesaroForm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueProfile {
    pub values: Vec<f64>,
    /// For the Cesàro form: whether `(1/n) Σ dⱼ → 0`, decided for closed-form families.
    pub cesaro_mean_vanishes: Option<bool>,
}

/// Eigenvalue list with multiplicity `n` for the `n`-th group, truncated to `terms`.
pub fn eigenvalue_profile(
    weights: &WeightSequence,
    parameterization: Parameterization,
    terms: usize,
) -> Result<EigenvalueProfile> {
    let mut values = Vec::with_capacity(terms);
    let mut n = 0;
    while values.len() < terms {
        n += 1;
        let Some(d) = weights.get(n) else {
            return domain_err(format!(
                "{terms} profile terms need more than the {} available weights",
                weights.len()
            ));
        };
        let value = match (parameterization, n) {
            (_, 1) => d,
            (Parameterization::Differences, _) => (d - weights.get(n - 1).expect("n > 1")) / n as f64,
            (Parameterization::CesaroForm, _) => d / n as f64,
        };
        values.extend(std::iter::repeat_n(value, n.min(terms - values.len())));
    }
    let cesaro_mean_vanishes = match (parameterization, &weights.family) {
        (
            Parameterization::CesaroForm,
            &WeightFamily::PowerLog {
                scale,
                power,
                log_power,
            },
        ) => Some(scale == 0.0 || power < 0.0 || (power == 0.0 && log_power < 0.0)),
        _ => None,
    };
    Ok(EigenvalueProfile {
        values,
        cesaro_mean_vanishes,
    })
}
