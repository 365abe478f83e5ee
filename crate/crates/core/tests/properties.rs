use proptest::prelude::*;

use commlab::anderson::{assemble, build_modified, WeightSequence};
use commlab::idealseq::arithmetic_mean_sequence;
use commlab::minimize::{lower_bound_certificate, minimize_commutator, MinimizeConfig};
use commlab::numkit::random::{
    random_hermitian, random_matrix, random_traceless_hermitian, random_unitary, random_vector, rng, TrialRng,
};
use commlab::numkit::{
    commutator, dot, gram_schmidt, hermitian_eigen, hs_norm, self_commutator, trace_norm, vec_norm, ComplexMatrix, C64,
    DEFAULT_REJECTION_TOL,
};
use commlab::selfcomm::{
    make_anticonjugation, partial_sums_sorted, project_to_sp, rearrange_type_a, solve_type_a, solve_type_c, sp_defect,
    AntiConjugation,
};
use commlab::staircase::staircase_form;

fn sp_member(r: &mut TrialRng, j: &AntiConjugation) -> ComplexMatrix {
    project_to_sp(&random_matrix(r, j.dim(), j.dim()), j).unwrap()
}

fn gram_defect(b: &ComplexMatrix) -> f64 {
    (&(&b.adjoint() * b) - &ComplexMatrix::identity(b.cols())).norm_fro()
}

fn centered(mut v: Vec<f64>) -> Vec<f64> {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn commutator_is_traceless(seed in any::<u64>(), n in 1usize..12) {
        let mut r = rng(seed);
        let (a, b) = (random_matrix(&mut r, n, n), random_matrix(&mut r, n, n));
        let c = commutator(&a, &b).unwrap();
        prop_assert!(c.trace().norm() <= 1e-10 * (1.0 + a.norm_fro() * b.norm_fro()));
    }

    #[test]
    fn hilbert_schmidt_bounds_trace_norm(seed in any::<u64>(), n in 1usize..9) {
        let mut r = rng(seed);
        let (a, b) = (random_matrix(&mut r, n, n), random_matrix(&mut r, n, n));
        let tn = trace_norm(&commutator(&a, &b).unwrap()).unwrap();
        prop_assert!(hs_norm(&a) * hs_norm(&b) >= tn / 2.0 - 1e-9);
    }

    #[test]
    fn eigen_reconstructs(seed in any::<u64>(), n in 1usize..=64) {
        let a = random_hermitian(&mut rng(seed), n);
        let e = hermitian_eigen(&a).unwrap();
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(gram_defect(&e.vectors) <= 1e-10 * n as f64);
        prop_assert!((&e.reconstruct() - &a).norm_fro() <= 1e-9 * (1.0 + a.norm_fro()));
    }

    #[test]
    fn gram_schmidt_is_orthonormal(seed in any::<u64>(), dim in 1usize..20, count in 1usize..30) {
        let mut r = rng(seed);
        let vs: Vec<Vec<C64>> = (0..count).map(|_| random_vector(&mut r, dim)).collect();
        let (b, accepted) = gram_schmidt(&vs, DEFAULT_REJECTION_TOL);
        prop_assert_eq!(accepted.len(), count.min(dim));
        prop_assert!(gram_defect(&b) <= 1e-10 * b.cols() as f64);
    }

    #[test]
    fn staircase_preserves_spectrum(seed in any::<u64>(), d in 2usize..24) {
        let a = random_hermitian(&mut rng(seed), d);
        let s = staircase_form(std::slice::from_ref(&a), true, 1e-10).unwrap();
        let before = hermitian_eigen(&a).unwrap().values;
        let after = hermitian_eigen(&s.transformed[0].hermitian_part()).unwrap().values;
        for (x, y) in before.iter().zip(&after) {
            prop_assert!((x - y).abs() <= 1e-8);
        }
    }

    #[test]
    fn greedy_rearrangement_stays_nonnegative(v in prop::collection::vec(-10.0f64..10.0, 1..40)) {
        let lambda = centered(v);
        let re = rearrange_type_a(&lambda);
        let mut sorted = re.order.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..lambda.len()).collect::<Vec<_>>());
        let scale = lambda.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
        prop_assert!(re.prefix_sums.iter().all(|&s| s >= -1e-11 * scale));
        prop_assert!(re.defect.abs() <= 1e-11 * scale);
    }

    #[test]
    fn anticonjugation_axioms(seed in any::<u64>(), m in 1usize..8) {
        let mut r = rng(seed);
        let j = make_anticonjugation(m).unwrap();
        let v = random_vector(&mut r, 2 * m);
        let jv = j.apply(&v);
        prop_assert!(dot(&v, &jv).norm() <= 1e-12 * vec_norm(&v).powi(2));
        prop_assert!((vec_norm(&jv) - vec_norm(&v)).abs() <= 1e-12 * vec_norm(&v));
        let jjv = j.apply(&jv);
        prop_assert!(v.iter().zip(&jjv).all(|(a, b)| (a + b).norm() <= 1e-12));
        // Real-linear form squares to −1.
        let k = j.as_real_matrix();
        let d = k.len();
        for a in 0..d {
            for b in 0..d {
                let s: f64 = (0..d).map(|c| k[a][c] * k[c][b]).sum();
                let want = if a == b { -1.0 } else { 0.0 };
                prop_assert!((s - want).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn sp_closed_under_bracket(seed in any::<u64>(), m in 1usize..6) {
        let mut r = rng(seed);
        let j = make_anticonjugation(m).unwrap();
        let (x, w) = (sp_member(&mut r, &j), sp_member(&mut r, &j));
        let c = commutator(&x, &w).unwrap();
        prop_assert!(sp_defect(&c, &j).unwrap() <= 1e-10 * (1.0 + c.norm_fro()));
        // −J̃[X,W]*J̃⁻¹ is the bracket again.
        let back = j.conjugate(&c.adjoint()).scale_real(-1.0);
        prop_assert!((&back - &c).norm_fro() <= 1e-10 * (1.0 + c.norm_fro()));
    }

    #[test]
    fn anticonjugations_are_unitarily_equivalent(seed in any::<u64>(), m in 1usize..6) {
        let mut r = rng(seed);
        let j = make_anticonjugation(m).unwrap();
        let v = random_unitary(&mut r, 2 * m);
        let j2 = j.conjugated_by(&v).unwrap();
        let x = sp_member(&mut r, &j);
        let moved = &(&v * &x) * &v.adjoint();
        prop_assert!(sp_defect(&moved, &j2).unwrap() <= 1e-9 * (1.0 + x.norm_fro()));
    }

    #[test]
    fn type_c_preserves_spectrum(seed in any::<u64>(), m in 1usize..8) {
        let mut r = rng(seed);
        let j = make_anticonjugation(m).unwrap();
        let t = project_to_sp(&random_hermitian(&mut r, 2 * m), &j).unwrap().hermitian_part();
        let sol = solve_type_c(&t, &j).unwrap();
        let got = hermitian_eigen(&self_commutator(&sol.solution).unwrap().hermitian_part()).unwrap().values;
        let want = hermitian_eigen(&t).unwrap().values;
        for (x, y) in got.iter().zip(&want) {
            prop_assert!((x - y).abs() <= 1e-7);
        }
    }

    #[test]
    fn type_a_solution_is_nilpotent(seed in any::<u64>(), d in 2usize..=16) {
        // Unit norm keeps the intermediate powers O(1); nilpotency is scale free.
        let t = random_traceless_hermitian(&mut rng(seed), d);
        let t = t.scale_real(1.0 / t.norm_fro());
        let sol = solve_type_a(&t).unwrap();
        let v = &sol.basis;
        let hat = &(&v.adjoint() * &sol.solution) * v;
        for i in 0..d {
            for j in i..d {
                prop_assert!(hat[(i, j)].norm() <= 1e-12);
            }
        }
        let mut p = hat.clone();
        for _ in 1..d {
            p = &p * &hat;
        }
        prop_assert!(p.max_abs() <= 1e-9);
    }

    #[test]
    fn anderson_diagonal_scales_linearly(p in 0.0f64..1.0, q in 0.0f64..2.0) {
        let k = 8;
        let base = WeightSequence::power_log(1.0, p, q, k + 1).unwrap();
        let interior = (k - 1) * k / 2;
        let diag = |w: &WeightSequence| {
            let (c, z) = build_modified(w, k).unwrap();
            let m = commutator(&assemble(&c).unwrap(), &assemble(&z).unwrap()).unwrap();
            (0..interior).map(|i| m[(i, i)].re).collect::<Vec<_>>()
        };
        let d1 = diag(&base);
        for t in [0.0, 2.0, 10.0] {
            let dt = diag(&base.scaled(t));
            for (a, b) in d1.iter().zip(&dt) {
                prop_assert!((b - t * a).abs() <= 1e-10 * (t * a.abs()).max(1.0));
            }
        }
    }

    #[test]
    fn dyadic_mean_sequence_ends_in_zero(v in prop::collection::vec(-1024i64..1024, 1..40), shift in 0u32..20) {
        let scale = 2f64.powi(-(shift as i32));
        let mut lambda: Vec<f64> = v.iter().map(|&k| k as f64 * scale).collect();
        let total: i64 = v.iter().sum();
        lambda.push(-(total as f64) * scale);
        let means = arithmetic_mean_sequence(&lambda);
        prop_assert_eq!(*means.last().unwrap(), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn sorted_prefix_sums_are_nonnegative(v in prop::collection::vec(-1000i64..1000, 0..50), shift in 0u32..12) {
        // Dyadic entries balanced by the last one, so the list sums to zero exactly.
        let scale = 2f64.powi(-(shift as i32));
        let mut lambda: Vec<f64> = v.iter().map(|&k| k as f64 * scale).collect();
        lambda.push(-(v.iter().sum::<i64>() as f64) * scale);
        let sums = partial_sums_sorted(&lambda).unwrap();
        prop_assert!(sums.iter().all(|&s| s >= -1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn minimizer_respects_lower_bound(seed in any::<u64>(), n in 2usize..=4) {
        let t = random_traceless_hermitian(&mut rng(seed), n);
        let mut cfg = MinimizeConfig::new(t.clone());
        cfg.restarts = 4;
        cfg.seed = seed;
        let res = minimize_commutator(&cfg).unwrap();
        let again = minimize_commutator(&cfg).unwrap();
        prop_assert_eq!(res.objective.to_bits(), again.objective.to_bits());
        if res.feasibility <= 1e-6 {
            prop_assert!(res.objective >= lower_bound_certificate(&t).unwrap() - 1e-6);
        }
    }
}
