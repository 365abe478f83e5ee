//! Sequence-level tests: trace class and `Σ dₙ log n < ∞` for power-log
//! families, type (A) balance of signed lists, and arithmetic-mean sequences.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain_err, Error, Result};
use crate::report::{Check, SolveReport};

#[derive(Debug, Clone, PartialEq)]
pub enum SequenceKind {
    /// `dₙ = C n^{−p} log(n+1)^{−q}`.
    PowerLog {
        c: f64,
        p: f64,
        q: f64,
    },
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceFamily {
    pub kind: SequenceKind,
    /// Optional `±1` pattern turning the family into a signed sequence.
    pub sign_profile: Option<Vec<f64>>,
}

impl SequenceFamily {
    pub fn power_log(c: f64, p: f64, q: f64) -> Result<Self> {
        if !(c.is_finite() && p.is_finite() && q.is_finite()) {
            return domain_err("power-log parameters must be finite");
        }
        if c < 0.0 {
            return domain_err("power-log family needs C ≥ 0");
        }
        Ok(Self {
            kind: SequenceKind::PowerLog { c, p, q },
            sign_profile: None,
        })
    }

    pub fn explicit(values: Vec<f64>) -> Self {
        Self {
            kind: SequenceKind::Explicit(values),
            sign_profile: None,
        }
    }

    pub fn with_signs(mut self, signs: Vec<f64>) -> Self {
        self.sign_profile = Some(signs);
        self
    }

    /// `dₙ`, 1-based; `None` past the end of an explicit list.
    pub fn term(&self, n: usize) -> Option<f64> {
        match &self.kind {
            SequenceKind::PowerLog { c, p, q } => {
                let x = n as f64;
                Some(c * x.powf(-p) * (x + 1.0).ln().powf(-q))
            }
            SequenceKind::Explicit(v) => v.get(n.checked_sub(1)?).copied(),
        }
    }

    pub fn prefix(&self, len: usize) -> Vec<f64> {
        (1..=len).map_while(|n| self.term(n)).collect()
    }

    /// Prefix with the sign profile applied cyclically.
    pub fn signed_prefix(&self, len: usize) -> Vec<f64> {
        let base = self.prefix(len);
        match &self.sign_profile {
            Some(s) if !s.is_empty() => base.iter().enumerate().map(|(i, x)| x * s[i % s.len()]).collect(),
            _ => base,
        }
    }
}

impl FromStr for SequenceFamily {
    type Err = Error;

    /// `powerlog:C,p,q` or `explicit:x1,x2,…`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Domain(format!("expected `kind:values`, got `{s}`")))?;
        let nums = rest
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Domain(format!("bad number `{}` in `{s}`", t.trim())))
            })
            .collect::<Result<Vec<f64>>>()?;
        match kind.trim() {
            "powerlog" => match nums[..] {
                [c, p, q] => Self::power_log(c, p, q),
                _ => domain_err(format!("powerlog takes three values C,p,q, got {}", nums.len())),
            },
            "explicit" => Ok(Self::explicit(nums)),
            other => domain_err(format!("unknown family kind `{other}`")),
        }
    }
}

impl fmt::Display for SequenceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SequenceKind::PowerLog { c, p, q } => write!(f, "powerlog:{c},{p},{q}"),
            SequenceKind::Explicit(v) => {
                let parts: Vec<String> = v.iter().map(f64::to_string).collect();
                write!(f, "explicit:{}", parts.join(","))
            }
        }
    }
}

/// Least-squares fit `S_k ≈ α + β g(k)` over the second half of a prefix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit {
    pub slope: f64,
    pub rms_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialSumDiagnostics {
    pub terms: usize,
    /// `Σ dₙ` over the prefix.
    pub sum: f64,
    /// `Σ dₙ log n` over the prefix.
    pub log_weighted_sum: f64,
    pub sum_vs_log: GrowthFit,
    pub sum_vs_log2: GrowthFit,
    pub log_weighted_vs_log: GrowthFit,
    pub log_weighted_vs_log2: GrowthFit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HsiiClass {
    /// `Σ dₙ < ∞`; `None` when undecidable from the data.
    pub in_trace_class: Option<bool>,
    /// `Σ dₙ log n < ∞`.
    pub in_commutator_class: Option<bool>,
    /// Reported for explicit lists only; never used to decide.
    pub diagnostics: Option<PartialSumDiagnostics>,
}

fn fit(xs: &[f64], ys: &[f64]) -> GrowthFit {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return GrowthFit {
            slope: 0.0,
            rms_residual: 0.0,
        };
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    GrowthFit {
        slope,
        rms_residual: (rss / n).sqrt(),
    }
}

pub fn partial_sum_diagnostics(d: &[f64]) -> PartialSumDiagnostics {
    let mut sums = Vec::with_capacity(d.len());
    let mut weighted = Vec::with_capacity(d.len());
    let (mut s, mut w) = (0.0, 0.0);
    for (i, x) in d.iter().enumerate() {
        s += x;
        w += x * ((i + 1) as f64).ln();
        sums.push(s);
        weighted.push(w);
    }
    let start = d.len() / 2;
    let logs: Vec<f64> = (start..d.len()).map(|i| ((i + 1) as f64).ln()).collect();
    let logs2: Vec<f64> = logs.iter().map(|l| l * l).collect();
    PartialSumDiagnostics {
        terms: d.len(),
        sum: s,
        log_weighted_sum: w,
        sum_vs_log: fit(&logs, &sums[start..]),
        sum_vs_log2: fit(&logs2, &sums[start..]),
        log_weighted_vs_log: fit(&logs, &weighted[start..]),
        log_weighted_vs_log2: fit(&logs2, &weighted[start..]),
    }
}

/// Integral-test decision for power-log families; explicit lists are
/// indeterminate and only carry diagnostics.
pub fn classify_hsii(family: &SequenceFamily) -> HsiiClass {
    match family.kind {
        SequenceKind::PowerLog { c, p, q } => {
            if c == 0.0 {
                return HsiiClass {
                    in_trace_class: Some(true),
                    in_commutator_class: Some(true),
                    diagnostics: None,
                };
            }
            HsiiClass {
                in_trace_class: Some(p > 1.0 || (p == 1.0 && q > 1.0)),
                in_commutator_class: Some(p > 1.0 || (p == 1.0 && q > 2.0)),
                diagnostics: None,
            }
        }
        SequenceKind::Explicit(ref v) => HsiiClass {
            in_trace_class: None,
            in_commutator_class: None,
            diagnostics: Some(partial_sum_diagnostics(v)),
        },
    }
}

/// Balance of positive and negative parts over a finite signed prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeAPrefixReport {
    pub positive_sum: f64,
    pub negative_sum: f64,
    /// `|Σλ⁺ − Σλ⁻|`.
    pub defect: f64,
    pub last_term: f64,
    pub tail_tolerance: f64,
    /// Finite-list criterion: `Σλ = 0` up to rounding.
    pub balanced: bool,
}

impl TypeAPrefixReport {
    pub fn report(&self) -> SolveReport {
        let mut r = SolveReport::new("seq type-a");
        r.push(Check::flag("balanced", self.balanced));
        r.push(Check::info("defect", self.defect));
        r.push(Check::at_most("last_term", self.last_term, self.tail_tolerance));
        r
    }
}

pub fn is_type_a_prefix(lambda: &[f64], tail_tolerance: f64) -> TypeAPrefixReport {
    let positive_sum: f64 = lambda.iter().map(|x| (x.abs() + x) / 2.0).sum();
    let negative_sum: f64 = lambda.iter().map(|x| (x.abs() - x) / 2.0).sum();
    let defect = (positive_sum - negative_sum).abs();
    let scale = positive_sum + negative_sum;
    TypeAPrefixReport {
        positive_sum,
        negative_sum,
        defect,
        last_term: lambda.last().map_or(0.0, |x| x.abs()),
        tail_tolerance,
        balanced: defect <= 1e-12 * scale.max(1.0),
    }
}

/// Running means of `λ` after a stable sort by decreasing modulus.
pub fn arithmetic_mean_sequence(lambda: &[f64]) -> Vec<f64> {
    let mut sorted = lambda.to_vec();
    sorted.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    // Neumaier-compensated running sum.
    let (mut s, mut comp) = (0.0f64, 0.0f64);
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let t = s + x;
            comp += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
            s = t;
            (s + comp) / (i + 1) as f64
        })
        .collect()
}
