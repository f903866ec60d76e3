use l1lab_core::empirical::instance::gaussian_matrix;
use l1lab_core::empirical::*;
use l1lab_core::general::weak_alpha_of_beta;
use l1lab_core::nonneg::weak_nonneg_alpha_of_beta;
use l1lab_core::{threshold_bisect, Error, Kind, Method};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[test]
fn instances_are_reproducible() {
    let a = generate_instance(10, 5, 2, false, 7).unwrap();
    let b = generate_instance(10, 5, 2, false, 7).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, generate_instance(10, 5, 2, false, 8).unwrap());
}

#[test]
fn instance_shape_and_consistency() {
    let inst = generate_instance(50, 20, 6, false, 3).unwrap();
    assert_eq!(inst.support.len(), 6);
    assert!(inst.support.windows(2).all(|w| w[0] < w[1]));
    for (j, &i) in inst.support.iter().enumerate() {
        assert!(inst.x_true[i].abs() >= 0.5);
        assert_eq!(inst.x_true[i].signum(), inst.signs[j]);
    }
    assert_eq!(inst.x_true.iter().filter(|v| **v != 0.0).count(), 6);
    let r = (&inst.a * &inst.x_true - &inst.y).amax();
    assert!(r <= 1e-12);

    let pos = generate_instance(50, 20, 6, true, 3).unwrap();
    assert!(pos.signs.iter().all(|&s| s == 1.0));
    assert!(pos.x_true.iter().all(|&v| v >= 0.0));
}

#[test]
fn gaussian_columns_have_unit_variance() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = gaussian_matrix(1000, 1000, &mut rng);
    let vars: Vec<f64> = a.column_iter().map(|c| c.variance()).collect();
    let mean = vars.iter().sum::<f64>() / vars.len() as f64;
    assert!((0.9..=1.1).contains(&mean), "mean column variance {mean}");
    assert!(vars.iter().all(|v| (0.75..=1.25).contains(v)));
}

#[test]
fn bad_dimensions_are_rejected() {
    assert!(matches!(generate_instance(10, 10, 2, false, 0), Err(Error::Dimension(_))));
    assert!(matches!(generate_instance(10, 4, 5, false, 0), Err(Error::Dimension(_))));
    assert!(matches!(generate_instance(10, 0, 0, false, 0), Err(Error::Dimension(_))));
}

#[test]
fn zero_instance_gives_zero() {
    let inst = generate_instance(20, 10, 0, false, 1).unwrap();
    let (rep, x) = solve_basis_pursuit_with(&inst, false, &BpConfig::default()).unwrap();
    assert!(rep.recovered);
    assert_eq!(x.amax(), 0.0);
}

#[test]
fn easy_instances_are_recovered() {
    for seed in 0..10 {
        let inst = generate_instance(40, 30, 3, false, seed).unwrap();
        let rep = solve_basis_pursuit(&inst, false, 1e-9).unwrap();
        assert!(rep.recovered, "seed {seed}: {rep:?}");
        assert!(rep.residual <= 1e-9 * inst.y.norm());
    }
}

#[test]
fn overloaded_instances_fail() {
    let failed = (0..10)
        .filter(|&seed| {
            let inst = generate_instance(40, 10, 9, false, seed).unwrap();
            !solve_basis_pursuit(&inst, false, 1e-9).unwrap().recovered
        })
        .count();
    assert!(failed >= 8, "only {failed}/10 failed");
}

#[test]
fn rank_deficient_matrix_is_reported() {
    let mut a = DMatrix::from_fn(3, 6, |i, j| ((i + 2 * j) % 5) as f64);
    let row = a.row(0).clone_owned();
    a.set_row(2, &row);
    let y = DVector::from_vec(vec![1.0, 2.0, 1.0]);
    assert!(matches!(basis_pursuit(&a, &y, false, &BpConfig::default()), Err(Error::RankDeficient)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn admm_matches_simplex(seed in 0u64..1_000_000, n in 12usize..=30, mfrac in 0.3f64..0.8, kfrac in 0.0f64..1.0, nonneg: bool) {
        let m = ((n as f64 * mfrac) as usize).clamp(2, n - 1);
        let k = ((m as f64 * kfrac) as usize).min(m);
        let inst = generate_instance(n, m, k, nonneg, seed).unwrap();
        let sol = basis_pursuit(&inst.a, &inst.y, nonneg, &BpConfig::default()).unwrap();
        let (_, obj) = basis_pursuit_lp(&inst.a, &inst.y, nonneg).unwrap();
        prop_assert!((sol.objective - obj).abs() <= 1e-7 * obj.max(1.0), "admm {} lp {}", sol.objective, obj);
        prop_assert!(sol.residual <= 1e-9 * inst.y.norm().max(1e-300) || inst.y.norm() == 0.0);
        if nonneg {
            prop_assert!(sol.x.iter().all(|&v| v >= 0.0));
        }
    }
}

#[test]
fn deep_recovery_regime() {
    let rate = weak_recovery_rate(0.99, 0.01, 200, 50, false, 5).unwrap();
    assert!(rate >= 0.98, "rate {rate}");
}

fn weak_beta(alpha: f64) -> f64 {
    threshold_bisect(alpha, Kind::Weak, Method::Direct, 1e-5).unwrap().beta
}

#[test]
fn below_and_above_the_weak_curve() {
    let bw = weak_beta(0.3);
    assert!((weak_alpha_of_beta(bw).unwrap() - 0.3).abs() < 1e-6);
    let below = weak_recovery_rate(0.3, 0.5 * bw, 200, 100, false, 21).unwrap();
    assert!(below >= 0.9, "rate {below} at beta {}", 0.5 * bw);
    let above = weak_recovery_rate(0.3, 1.5 * bw, 200, 100, false, 21).unwrap();
    assert!(above <= 0.1, "rate {above} at beta {}", 1.5 * bw);
}

#[test]
fn recovery_rate_is_deterministic() {
    let a = weak_recovery(0.5, 0.15, 60, 12, false, 99).unwrap();
    let b = weak_recovery(0.5, 0.15, 60, 12, false, 99).unwrap();
    assert_eq!(a, b);
}

#[test]
fn recovery_rate_input_checks() {
    assert!(weak_recovery_rate(0.5, 0.001, 100, 10, false, 0).is_err());
    assert!(weak_recovery_rate(1.2, 0.1, 100, 10, false, 0).is_err());
    assert!(weak_recovery_rate(0.3, 0.4, 100, 10, false, 0).is_err());
    assert!(weak_recovery_rate(0.5, 0.1, 100, 0, false, 0).is_err());
}

#[test]
fn empirical_weak_transition_near_theory() {
    let beta = 0.1;
    let emp = empirical_transition_alpha(beta, 200, 60, false, 3, 0.02).unwrap();
    let theory = weak_alpha_of_beta(beta).unwrap();
    assert!((emp - theory).abs() <= 0.05, "empirical {emp} theory {theory}");
    let emp = empirical_transition_alpha(beta, 200, 60, true, 3, 0.02).unwrap();
    let theory = weak_nonneg_alpha_of_beta(beta).unwrap();
    assert!((emp - theory).abs() <= 0.05, "nonneg empirical {emp} theory {theory}");
}

#[test]
fn nullspace_basis_is_orthonormal_and_annihilated() {
    let inst = generate_instance(16, 10, 0, false, 4).unwrap();
    let n = nullspace_basis(&inst.a).unwrap();
    assert_eq!(n.shape(), (16, 6));
    assert!((&inst.a * &n).amax() < 1e-12);
    assert!((n.transpose() * &n - DMatrix::identity(6, 6)).amax() < 1e-12);
}

#[test]
fn one_dimensional_nullspace_is_a_direct_comparison() {
    for seed in 0..20 {
        let inst = generate_instance(10, 9, 0, false, seed).unwrap();
        let w = nullspace_basis(&inst.a).unwrap().column(0).clone_owned();
        for support in k_subsets(10, 3).into_iter().step_by(7) {
            let on: f64 = support.iter().map(|&i| w[i].abs()).sum();
            let expected = on < w.abs().sum() - on;
            assert_eq!(sectional_nullspace_holds(&inst.a, &support).unwrap(), expected, "seed {seed} {support:?}");
        }
    }
}

#[test]
fn sampling_never_contradicts_the_lp() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut seen = [false; 2];
    for seed in 0..6 {
        let inst = generate_instance(16, 12, 2, false, seed).unwrap();
        let basis = nullspace_basis(&inst.a).unwrap();
        let lp = sectional_nullspace_holds(&inst.a, &inst.support).unwrap();
        seen[lp as usize] = true;
        let violated = (0..100_000).any(|_| {
            let z = DVector::from_fn(4, |_, _| StandardNormal.sample(&mut rng));
            let w = &basis * z;
            let on: f64 = inst.support.iter().map(|&i| w[i].abs()).sum();
            on >= w.abs().sum() - on
        });
        if violated {
            assert!(!lp, "sampler found a violating direction, LP claims the property holds (seed {seed})");
        }
    }
    assert!(seen[1]);
}

#[test]
fn empty_support_and_zero_k() {
    let inst = generate_instance(12, 8, 0, false, 2).unwrap();
    assert!(sectional_nullspace_holds(&inst.a, &[]).unwrap());
    assert!(strong_nullspace_holds(&inst.a, 0, false).unwrap());
    assert!(strong_nullspace_holds(&inst.a, 0, true).unwrap());
}

#[test]
fn exhaustive_caps() {
    let big = generate_instance(30, 20, 0, false, 1).unwrap();
    assert!(matches!(sectional_nullspace_holds(&big.a, &[0, 1]), Err(Error::Dimension(_))));
    let mid = generate_instance(20, 15, 0, false, 1).unwrap();
    assert!(matches!(strong_nullspace_holds(&mid.a, 2, false), Err(Error::Dimension(_))));
    let small = generate_instance(16, 12, 0, false, 1).unwrap();
    assert!(matches!(strong_nullspace_holds(&small.a, 5, false), Err(Error::Dimension(_))));
    assert!(matches!(sectional_nullspace_holds(&small.a, &[0, 0]), Err(Error::Dimension(_))));
}

#[test]
fn k_subsets_enumerates_binomially() {
    assert_eq!(k_subsets(16, 2).len(), 120);
    assert_eq!(k_subsets(18, 4).len(), 3060);
    assert_eq!(k_subsets(5, 0), vec![Vec::<usize>::new()]);
    assert_eq!(k_subsets(5, 5), vec![vec![0, 1, 2, 3, 4]]);
}

#[test]
fn strong_implies_sectional_implies_recovery() {
    let mut strong_seen = 0;
    for seed in 0..8 {
        let inst = generate_instance(12, 9, 0, false, seed).unwrap();
        let k = 2;
        let strong = strong_nullspace_holds(&inst.a, k, false).unwrap();
        if strong {
            strong_seen += 1;
            assert!(strong_nullspace_holds(&inst.a, k, true).unwrap());
            for support in k_subsets(12, k) {
                assert!(sectional_nullspace_holds(&inst.a, &support).unwrap());
            }
            for t in 0..20 {
                let placed = place_on(&inst.a, k, false, derive_seed(seed, t)).unwrap();
                assert!(solve_basis_pursuit(&placed, false, 1e-9).unwrap().recovered);
            }
        }
    }
    assert!(strong_seen > 0);
}

#[test]
fn strong_fraction_drops_with_k() {
    let one = nullspace_survey(Dims { n: 16, m: 12, k: 1 }, 50, false, false, 8);
    let two = nullspace_survey(Dims { n: 16, m: 12, k: 2 }, 50, false, false, 8);
    let count = |v: &[MatrixVerdict]| v.iter().filter(|x| x.holds == Some(true)).count();
    assert!(count(&one) > count(&two), "{} vs {}", count(&one), count(&two));
}
