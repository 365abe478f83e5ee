//! Acceptance suite: one test per criterion, each printing a single
//! `[PASS]`/`[FAIL]` line and enforcing its wall-clock budget.
//!
//! Tests share one lock so the timing budgets are measured without
//! contention from the other criteria.

use std::io::Write;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use commlab::anderson::{
    assemble, build_modified, eigenvalue_profile, identity_checks, make_blocks, verify_positive_commutator,
    Parameterization, WeightSequence,
};
use commlab::idealseq::{classify_hsii, SequenceFamily};
use commlab::liealg::{diagonal_algebra, is_semisimple, killing_form_in, oberwolfach_split, SlRootData, SpanBasis};
use commlab::minimize::{minimize_commutator, penalty_gradient, verify_optimal_pair, MinimizeConfig};
use commlab::numkit::random::{random_hermitian, random_matrix, random_traceless_hermitian, random_vector, rng};
use commlab::numkit::{commutator, hermitian_eigen, is_unitary, self_commutator, ComplexMatrix, C64};
use commlab::selfcomm::{make_anticonjugation, project_to_sp, solve_type_a, solve_type_c};
use commlab::staircase::{band_excess, staircase_form};

static SERIAL: Mutex<()> = Mutex::new(());

struct Outcome {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }
}

/// Runs `body` under the lock, prints the verdict line, and panics on failure.
fn criterion(id: u32, title: &str, budget: Duration, body: impl FnOnce(&mut Outcome)) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let mut out = Outcome::new();
    let start = Instant::now();
    body(&mut out);
    let elapsed = start.elapsed();
    out.require(
        elapsed < budget,
        format!("runtime {elapsed:?} exceeds budget {budget:?}"),
    );
    let status = if out.failures.is_empty() { "PASS" } else { "FAIL" };
    let mut line = format!("[{status}] criterion {id}: {title} ({elapsed:.2?})");
    for n in &out.notes {
        line.push_str(&format!("\n         {n}"));
    }
    for f in &out.failures {
        line.push_str(&format!("\n         failure: {f}"));
    }
    // Written straight to stderr so the line survives output capture.
    let _ = writeln!(std::io::stderr(), "{line}");
    assert!(out.failures.is_empty(), "criterion {id} failed: {:?}", out.failures);
}

fn target_43() -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[-1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0])
}

#[test]
fn criterion_01_exact_optimal_pair() {
    criterion(
        1,
        "exact optimal pair for diag(-1,1/3,1/3,1/3)",
        Duration::from_millis(1),
        |out| match verify_optimal_pair() {
            Ok(report) => {
                for c in &report.checks {
                    out.require(c.pass, format!("{} measured {:.3e}", c.name, c.measured));
                }
            }
            Err(e) => out.require(false, e.to_string()),
        },
    );
}

#[test]
fn criterion_02_numerical_minimum() {
    criterion(
        2,
        "penalty search recovers the 4/3 minimum",
        Duration::from_secs(30),
        |out| {
            let cases = [
                (target_43(), (4.0f64 / 3.0).sqrt()),
                (ComplexMatrix::from_real_diag(&[-1.0, 0.5, 0.5]), 1.0),
            ];
            for (target, want) in cases {
                let mut cfg = MinimizeConfig::new(target);
                cfg.restarts = 50;
                cfg.seed = 20240611;
                match minimize_commutator(&cfg) {
                    Ok(r) => {
                        out.note(format!(
                            "n = {}: objective {:.12} (expected {:.12}), feasibility {:.2e}",
                            cfg.dimension, r.objective, want, r.feasibility
                        ));
                        out.require(r.feasible, format!("n = {}: no feasible restart", cfg.dimension));
                        out.require(
                            r.objective >= want - 1e-3 && r.objective <= want + 1e-2,
                            format!("n = {}: objective {} outside window", cfg.dimension, r.objective),
                        );
                    }
                    Err(e) => out.require(false, e.to_string()),
                }
            }
        },
    );
}

#[test]
fn criterion_03_modified_anderson() {
    criterion(
        3,
        "modified Anderson construction, 10 blocks",
        Duration::from_secs(1),
        |out| {
            let k = 10;
            let families = [
                ("sqrt(n)", WeightSequence::power_log(1.0, 0.5, 0.0, k + 1).unwrap()),
                ("log(n+1)", WeightSequence::power_log(1.0, 0.0, 1.0, k + 1).unwrap()),
            ];
            for (name, w) in &families {
                match verify_positive_commutator(w, k, 1e-10) {
                    Ok(v) => {
                        out.require(v.dimension == 66, format!("{name}: dimension {}", v.dimension));
                        out.require(
                            v.off_band_mass <= 1e-10,
                            format!("{name}: off-band mass {:.3e}", v.off_band_mass),
                        );
                        out.require(
                            v.interior_lu_mass <= 1e-10,
                            format!("{name}: interior L/U mass {:.3e}", v.interior_lu_mass),
                        );
                        let min_entry = v.interior().map(|b| b.value - b.spread).fold(f64::INFINITY, f64::min);
                        out.require(
                            min_entry > 0.0,
                            format!("{name}: interior diagonal minimum {min_entry:.3e}"),
                        );
                        // Measured block values against the stated eigenvalue list.
                        let profile = eigenvalue_profile(w, Parameterization::Differences, 55).unwrap();
                        let mut pos = 0;
                        let mut gap: f64 = 0.0;
                        for b in v.interior() {
                            for _ in 0..b.block {
                                gap = gap.max((profile.values[pos] - b.value).abs());
                                pos += 1;
                            }
                        }
                        out.require(
                            gap <= 1e-10,
                            format!("{name}: measured diagonal vs eigenvalue list {gap:.3e}"),
                        );
                        out.note(format!(
                        "{name}: interior min {:.4e}; block k carries (d_k - d_(k-1))/k with multiplicity k (max gap {gap:.1e}); boundary residual {:.2e}",
                        v.interior_min(),
                        v.boundary_residual
                    ));
                    }
                    Err(e) => out.require(false, format!("{name}: {e}")),
                }
            }

            // Unscaled: [C,Z] restricted to the interior is e₁e₁*, checked on the
            // raw commutator.
            let ones = WeightSequence::constant(1.0, k + 1).unwrap();
            let (c, z) = build_modified(&ones, k).unwrap();
            let comm = commutator(&assemble(&c).unwrap(), &assemble(&z).unwrap()).unwrap();
            let interior_dim = (k - 1) * k / 2; // blocks 1..=k-1
            let mut err: f64 = 0.0;
            for i in 0..interior_dim {
                for j in 0..interior_dim {
                    let want = if i == 0 && j == 0 { 1.0 } else { 0.0 };
                    err = err.max((comm[(i, j)] - C64::new(want, 0.0)).norm());
                }
            }
            out.require(
                err <= 1e-10,
                format!("unscaled interior differs from e1e1* by {err:.3e}"),
            );
            out.note(format!("unscaled interior vs e1e1*: {err:.1e}"));
        },
    );
}

/// Blocks from the closed-form entries, independent of the library.
fn oracle_blocks(n: usize) -> [ComplexMatrix; 4] {
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
    [a, b, x, y]
}

#[test]
fn criterion_04_block_identities() {
    criterion(4, "block identities for n <= 12", Duration::from_secs(1), |out| {
        let mut worst: f64 = 0.0;
        for n in 1..=12 {
            let lib = make_blocks(n).unwrap();
            let [a, b, x, y] = oracle_blocks(n);
            for (name, l, o) in [
                ("A", &lib.a, &a),
                ("B", &lib.b, &b),
                ("X", &lib.x, &x),
                ("Y", &lib.y, &y),
            ] {
                let d = (l - o).max_abs();
                out.require(d <= 1e-15, format!("{name}_{n} differs from closed form by {d:.3e}"));
            }
            let [a1, b1, x1, y1] = oracle_blocks(n + 1);
            let id = |k: usize, s: f64| ComplexMatrix::identity(k).scale_real(s);
            let nf = n as f64;
            let residuals = [
                (&(&(&a * &y) - &(&x * &b)) - &id(n, 1.0 / nf)).max_abs(),
                (&(&(&b * &x) - &(&y * &a)) - &id(n + 1, -1.0 / (nf + 1.0))).max_abs(),
                (&(&(&a1 * &y1) - &(&x1 * &b1)) - &id(n + 1, 1.0 / (nf + 1.0))).max_abs(),
                (&(&b1 * &y) - &(&y1 * &b)).max_abs(),
                (&(&a * &x1) - &(&x * &a1)).max_abs(),
            ];
            for (i, r) in residuals.iter().enumerate() {
                out.require(*r <= 1e-12, format!("oracle identity {} at n = {n}: {r:.3e}", i + 1));
                worst = worst.max(*r);
            }
            match identity_checks(n) {
                Ok(list) => {
                    out.require(list.len() == 5, format!("n = {n}: {} identities", list.len()));
                    for r in list {
                        out.require(
                            r.residual <= 1e-12,
                            format!("{} at n = {n}: {:.3e}", r.identity, r.residual),
                        );
                    }
                }
                Err(e) => out.require(false, e.to_string()),
            }
        }
        out.note(format!("largest identity residual {worst:.1e}"));
    });
}

#[test]
fn criterion_05_type_a_solver() {
    criterion(5, "type (A) self-commutator solver", Duration::from_secs(10), |out| {
        let mut r = rng(5005);
        let mut worst: f64 = 0.0;
        for trial in 0..500 {
            let d = 2 + trial % 15;
            let t = random_traceless_hermitian(&mut r, d);
            match solve_type_a(&t) {
                Ok(sol) => {
                    // Independent residual from the raw products.
                    let y = &sol.solution;
                    let ys = y.adjoint();
                    let res = (&(&(&ys * y) - &(y * &ys)) - &t).norm_fro();
                    let rel = res / (1.0 + t.norm_fro());
                    worst = worst.max(rel);
                    out.require(
                        rel <= 1e-9,
                        format!("trial {trial} (d = {d}): relative residual {rel:.3e}"),
                    );
                }
                Err(e) => out.require(false, format!("trial {trial}: {e}")),
            }
        }
        let t = ComplexMatrix::from_real_diag(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, -1.0]);
        let hs = solve_type_a(&t).map(|s| s.solution.norm_fro()).unwrap_or(f64::NAN);
        out.require(
            (hs - 2f64.sqrt()).abs() <= 1e-12,
            format!("r = 3 example: ||Y|| = {hs}"),
        );
        out.note(format!(
            "worst relative residual {worst:.1e}; r = 3 example ||Y|| = {hs:.15}"
        ));
    });
}

#[test]
fn criterion_06_type_c_solver() {
    criterion(6, "type (C) self-commutator solver", Duration::from_secs(10), |out| {
        let mut r = rng(6006);
        let mut worst_sp: f64 = 0.0;
        let mut worst_res: f64 = 0.0;
        let mut kernels = 0;
        for trial in 0..200 {
            let m = 1 + trial % 8;
            let j = make_anticonjugation(m).unwrap();
            // Every fourth instance starts from a rank-two matrix, so the
            // projected target has a large kernel.
            let raw = if trial % 4 == 3 {
                let (v, w) = (random_vector(&mut r, 2 * m), random_vector(&mut r, 2 * m));
                ComplexMatrix::from_fn(2 * m, 2 * m, |a, b| v[a] * v[b].conj() - w[a] * w[b].conj())
            } else {
                random_hermitian(&mut r, 2 * m)
            };
            let t = project_to_sp(&raw, &j).unwrap().hermitian_part();
            match solve_type_c(&t, &j) {
                Ok(sol) => {
                    let y = &sol.solution;
                    let sp = (y + &j.conjugate(&y.adjoint())).norm_fro();
                    let res = (&self_commutator(y).unwrap() - &t).norm_fro() / (1.0 + t.norm_fro());
                    worst_sp = worst_sp.max(sp);
                    worst_res = worst_res.max(res);
                    out.require(sp <= 1e-8, format!("trial {trial}: sp defect {sp:.3e}"));
                    out.require(res <= 1e-8, format!("trial {trial}: relative residual {res:.3e}"));
                    // Pairing checked on an independent eigen-solve of T.
                    let c = hermitian_eigen(&t).unwrap().values;
                    let pair = (0..c.len())
                        .map(|i| (c[i] + c[c.len() - 1 - i]).abs())
                        .fold(0.0, f64::max);
                    out.require(pair <= 1e-8, format!("trial {trial}: +/- pairing defect {pair:.3e}"));
                    let kd = sol.pairing.kernel_dim;
                    out.require(kd % 2 == 0, format!("trial {trial}: odd kernel dimension {kd}"));
                    if kd > 0 {
                        kernels += 1;
                    }
                }
                Err(e) => out.require(false, format!("trial {trial} (m = {m}): {e}")),
            }
        }
        out.note(format!(
            "worst sp defect {worst_sp:.1e}, worst relative residual {worst_res:.1e}, {kernels} instances with nontrivial kernel"
        ));
    });
}

#[test]
fn criterion_07_staircase_bounds() {
    criterion(7, "staircase band bounds", Duration::from_secs(60), |out| {
        let mut r = rng(7007);
        let mut worst: f64 = 0.0;
        let mut runs = 0;
        for n_ops in 1..=3 {
            for d in [8, 16, 32, 64] {
                for trial in 0..100 {
                    for selfadjoint in [false, true] {
                        let ops: Vec<ComplexMatrix> = (0..n_ops)
                            .map(|_| {
                                if selfadjoint {
                                    random_hermitian(&mut r, d)
                                } else {
                                    random_matrix(&mut r, d, d)
                                }
                            })
                            .collect();
                        let tag = format!("N = {n_ops}, d = {d}, trial {trial}, hermitian = {selfadjoint}");
                        let s = match staircase_form(&ops, selfadjoint, 1e-10) {
                            Ok(s) => s,
                            Err(e) => {
                                out.require(false, format!("{tag}: {e}"));
                                continue;
                            }
                        };
                        runs += 1;
                        let u = &s.unitary;
                        out.require(is_unitary(u, 1e-9), format!("{tag}: U not unitary"));
                        let e1 = (0..d)
                            .map(|i| (u[(i, 0)] - C64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0)).norm())
                            .fold(0.0, f64::max);
                        out.require(e1 <= 1e-9, format!("{tag}: Ue1 != e1 ({e1:.3e})"));
                        for (i, a) in ops.iter().enumerate() {
                            // Recompute U*AU rather than trusting the returned copy.
                            let t = &(&u.adjoint() * a) * u;
                            let ex = band_excess(&t, n_ops, selfadjoint);
                            worst = worst.max(ex);
                            out.require(ex <= 1e-9, format!("{tag}: operator {i} band excess {ex:.3e}"));
                        }
                    }
                }
            }
        }
        out.note(format!(
            "{runs} staircase runs; largest entry outside the band {worst:.1e}"
        ));
    });
}

fn random_traceless(r: &mut commlab::numkit::random::TrialRng, n: usize) -> ComplexMatrix {
    let mut x = random_matrix(r, n, n);
    let t = x.trace() / n as f64;
    for i in 0..n {
        x[(i, i)] -= t;
    }
    x
}

#[test]
fn criterion_08_lie_algebra_suite() {
    criterion(
        8,
        "Killing form, semisimplicity, two-commutator split",
        Duration::from_secs(10),
        |out| {
            let mut r = rng(8008);
            let mut worst: f64 = 0.0;
            for n in 2..=5 {
                let data = SlRootData::new(n - 1).unwrap();
                let basis = data.basis();
                let span = SpanBasis::new(&basis).unwrap();
                for _ in 0..20 {
                    let (x, w) = (random_traceless(&mut r, n), random_traceless(&mut r, n));
                    let closed = (&x * &w).trace() * (2.0 * n as f64);
                    match killing_form_in(&span, &x, &w) {
                        Ok(b) => {
                            let rel = (b - closed).norm() / closed.norm().max(1.0);
                            worst = worst.max(rel);
                            out.require(rel <= 1e-9, format!("sl({n}): Killing form off by {rel:.3e}"));
                        }
                        Err(e) => out.require(false, format!("sl({n}): {e}")),
                    }
                }
                out.require(
                    is_semisimple(&basis).unwrap_or(false),
                    format!("sl({n}) not semisimple"),
                );
                out.require(
                    !is_semisimple(&diagonal_algebra(n)).unwrap_or(true),
                    format!("diagonal algebra of size {n} reported semisimple"),
                );
            }
            let mut worst_split: f64 = 0.0;
            for trial in 0..100 {
                let a = random_traceless(&mut r, 6);
                match oberwolfach_split(&a) {
                    Ok(s) => {
                        let rebuilt = &commutator(&s.x1, &s.x2).unwrap() + &commutator(&s.y1, &s.y2).unwrap();
                        let rel = (&rebuilt - &a).norm_fro() / (1.0 + a.norm_fro());
                        worst_split = worst_split.max(rel);
                        out.require(rel <= 1e-8, format!("split trial {trial}: {rel:.3e}"));
                    }
                    Err(e) => out.require(false, format!("split trial {trial}: {e}")),
                }
            }
            out.note(format!(
                "Killing form worst relative error {worst:.1e}; split worst {worst_split:.1e}"
            ));
        },
    );
}

#[test]
fn criterion_09_sequence_classifier() {
    criterion(
        9,
        "trace class vs commutator class classifier",
        Duration::from_secs(1),
        |out| {
            let gap = classify_hsii(&SequenceFamily::power_log(1.0, 1.0, 2.0).unwrap());
            out.require(
                gap.in_trace_class == Some(true) && gap.in_commutator_class == Some(false),
                format!("1/(n log^2(n+1)) classified as {gap:?}"),
            );
            let ps = [0.5, 1.0, 1.5];
            let qs = [0.0, 1.0, 2.0, 3.0];
            let class = |p: f64, q: f64| {
                let c = classify_hsii(&SequenceFamily::power_log(1.0, p, q).unwrap());
                (c.in_trace_class.unwrap(), c.in_commutator_class.unwrap())
            };
            for &p in &ps {
                for &q in &qs {
                    let (tc, cc) = class(p, q);
                    out.require(
                        !cc || tc,
                        format!("(p, q) = ({p}, {q}): commutator class without trace class"),
                    );
                    // Families with smaller exponents dominate eventually; divergence
                    // must propagate to them.
                    for &p2 in ps.iter().filter(|&&x| x <= p) {
                        for &q2 in qs.iter().filter(|&&x| x <= q) {
                            let (tc2, cc2) = class(p2, q2);
                            out.require(
                                tc || !tc2,
                                format!("trace class not monotone: ({p},{q}) vs ({p2},{q2})"),
                            );
                            out.require(
                                cc || !cc2,
                                format!("commutator class not monotone: ({p},{q}) vs ({p2},{q2})"),
                            );
                        }
                    }
                }
            }
        },
    );
}

fn fd_gradient(a: &ComplexMatrix, b: &ComplexMatrix, t: &ComplexMatrix, mu: f64) -> (ComplexMatrix, ComplexMatrix) {
    let h = 1e-6;
    let value = |a: &ComplexMatrix, b: &ComplexMatrix| penalty_gradient(a, b, t, mu).unwrap().2;
    let n = a.rows();
    let mut ga = ComplexMatrix::zeros(n, n);
    let mut gb = ComplexMatrix::zeros(n, n);
    for which in 0..2 {
        for i in 0..n {
            for j in 0..n {
                for dir in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                    let (mut ap, mut am, mut bp, mut bm) = (a.clone(), a.clone(), b.clone(), b.clone());
                    if which == 0 {
                        ap[(i, j)] += dir * h;
                        am[(i, j)] -= dir * h;
                    } else {
                        bp[(i, j)] += dir * h;
                        bm[(i, j)] -= dir * h;
                    }
                    let d = (value(&ap, &bp) - value(&am, &bm)) / (2.0 * h);
                    let g = if which == 0 { &mut ga } else { &mut gb };
                    g[(i, j)] += dir * d;
                }
            }
        }
    }
    (ga, gb)
}

#[test]
fn criterion_10_gradient_check() {
    criterion(
        10,
        "penalty gradient vs central differences",
        Duration::from_secs(5),
        |out| {
            let mut r = rng(1010);
            let mut worst: f64 = 0.0;
            for trial in 0..100 {
                let n = 2 + trial % 4;
                let a = random_matrix(&mut r, n, n);
                let b = random_matrix(&mut r, n, n);
                let t = random_traceless(&mut r, n);
                let mu = [0.1, 1.0, 10.0][trial % 3];
                let (ga, gb, _) = penalty_gradient(&a, &b, &t, mu).unwrap();
                let (fa, fb) = fd_gradient(&a, &b, &t, mu);
                let diff = ((&ga - &fa).norm_fro().powi(2) + (&gb - &fb).norm_fro().powi(2)).sqrt();
                let scale = (ga.norm_fro().powi(2) + gb.norm_fro().powi(2)).sqrt();
                let rel = diff / scale;
                worst = worst.max(rel);
                out.require(
                    rel <= 1e-5,
                    format!("trial {trial} (n = {n}, mu = {mu}): relative error {rel:.3e}"),
                );
            }
            out.note(format!("worst relative gradient error {worst:.1e}"));
        },
    );
}
