mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sfm_core::brute::{brute_force_prox, brute_force_sfm, check_base_point, cone_enumeration_prox, is_submodular};
use sfm_core::prox::{constrained_tv, distinct_levels, divide_and_conquer, restrict_contract};
use sfm_core::{EpsilonBox, SetFunctionOracle, Subset};

use common::{dyadic, random_cut};

#[test]
fn matches_grid_oracle_on_small_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for k in 0..120 {
        let n = 1 + k % 3;
        let f = random_cut(&mut rng, n);
        let t: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let eps = [0.05, 0.25, 1.0][k % 3];
        let bx = EpsilonBox::new(eps).unwrap();
        let r = constrained_tv(&f, &t, &bx).unwrap();
        let grid = brute_force_prox(&f, &t, &bx, 1e-3).unwrap();
        for j in 0..n {
            assert!((r.w[j] - grid[j]).abs() <= 2e-3 * (n as f64).sqrt(), "instance {k}: {:?} vs {:?}", r.w, grid);
        }
        assert!((r.primal_value - r.dual_value).abs() <= 1e-7);
        assert!(r.w.iter().all(|x| x.abs() <= eps + 1e-12));
    }
}

#[test]
fn unconstrained_prox_matches_cone_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let n = rng.gen_range(1..=5);
        let f = random_cut(&mut rng, n);
        let t: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let r = divide_and_conquer(&f, &t).unwrap();
        let exact = cone_enumeration_prox(&f, &t, &EpsilonBox::infinite()).unwrap();
        for (a, b) in r.w.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(check_base_point(&f, &r.s.s, 1e-9).passed());
        assert!(r.sfmd_calls <= 2 * distinct_levels(&r.w));
    }
}

#[test]
fn suplevel_sets_solve_the_shifted_problems() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..60 {
        let n = rng.gen_range(2..=8);
        let f = random_cut(&mut rng, n);
        let t: Vec<f64> = (0..n).map(|_| dyadic(&mut rng, -3.0, 3.0)).collect();
        let eps = 0.5;
        let r = constrained_tv(&f, &t, &EpsilonBox::new(eps).unwrap()).unwrap();
        let mut levels: Vec<f64> = r.w.iter().copied().filter(|x| x.abs() < eps - 1e-9).collect();
        levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for alpha in levels {
            let set = Subset::from_members(r.w.iter().map(|&x| x >= alpha - 1e-12).collect());
            let u: Vec<f64> = t.iter().map(|&x| x - alpha).collect();
            let (_, best) = brute_force_sfm(&f, &u).unwrap();
            let here = f.eval(&set) - u.iter().zip(set.members()).filter(|(_, &m)| m).map(|(x, _)| x).sum::<f64>();
            assert!(here <= best + 1e-9, "level {alpha}: {here} > {best}");
        }
    }
}

#[test]
fn call_count_ceiling_and_small_box_limit() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..80 {
        let n = rng.gen_range(2..=10);
        let f = random_cut(&mut rng, n);
        let t: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        for eps in [2.0, 0.3, 0.01] {
            let r = constrained_tv(&f, &t, &EpsilonBox::new(eps).unwrap()).unwrap();
            let interior: Vec<f64> = r.a_minus.difference(&r.a_plus).iter().map(|j| r.w[j]).collect();
            assert!(r.sfmd_calls <= 2 + 2 * distinct_levels(&interior));
            assert!(r.a_plus.is_subset_of(&r.a_minus));
            assert!(check_base_point(&f, &r.s.s, 1e-9).passed());
        }
    }
    let chain2 = sfm_core::CutFunction::chain(&[1.0]);
    for eps in [0.25, 0.1, 1e-3] {
        let r = constrained_tv(&chain2, &[2.0, -2.0], &EpsilonBox::new(eps).unwrap()).unwrap();
        assert_eq!(r.sfmd_calls, 2);
    }
}

#[test]
fn parametric_minimizers_are_nested() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let n = rng.gen_range(2..=9);
        let f = random_cut(&mut rng, n);
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let mut prev: Option<Subset> = None;
        for eps in [0.0, 0.1, 0.4, 1.0, 3.0] {
            let shifted: Vec<f64> = u.iter().map(|x| x - eps).collect();
            let a = f.minimize(&shifted).unwrap().set;
            if let Some(p) = prev {
                assert!(a.is_subset_of(&p));
            }
            prev = Some(a);
        }
    }
}

#[test]
fn restricted_functions_stay_submodular() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..40 {
        let n = rng.gen_range(3..=8);
        let f = random_cut(&mut rng, n);
        let a_plus = Subset::from_members((0..n).map(|_| rng.gen_bool(0.3)).collect());
        let a_minus = a_plus.union(&Subset::from_members((0..n).map(|_| rng.gen_bool(0.5)).collect()));
        let g = restrict_contract(&f, &a_plus, &a_minus).unwrap();
        assert!(is_submodular(&g, 1e-12).unwrap());
        for mask in 0..1u64 << g.ground_size() {
            let local = Subset::from_mask(g.ground_size(), mask);
            let parent = g.lift(&local).union(&a_plus);
            assert!((g.eval(&local) - (f.eval(&parent) - f.eval(&a_plus))).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oracle_matches_enumeration(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_cut(&mut rng, n);
        let u: Vec<f64> = (0..n).map(|_| dyadic(&mut rng, -3.0, 3.0)).collect();
        let sol = f.minimize(&u).unwrap();
        let (set, value) = brute_force_sfm(&f, &u).unwrap();
        prop_assert_eq!(sol.value, value);
        // the inclusion-minimal minimizer is also the smallest one
        prop_assert_eq!(sol.set, set);
        prop_assert!(check_base_point(&f, &sol.certificate.s, 1e-9).passed());
        let dual: f64 = sol.certificate.s.iter().zip(&u).map(|(s, u)| (s - u).min(0.0)).sum();
        prop_assert!((dual - value).abs() < 1e-9);
    }

    #[test]
    fn prox_is_optimal_pair(seed in any::<u64>(), n in 1usize..7, eps in 0.01f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_cut(&mut rng, n);
        let t: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let bx = EpsilonBox::new(eps).unwrap();
        let r = constrained_tv(&f, &t, &bx).unwrap();
        let exact = cone_enumeration_prox(&f, &t, &bx).unwrap();
        for (a, b) in r.w.iter().zip(&exact) {
            prop_assert!((a - b).abs() < 1e-8);
        }
        prop_assert!((r.primal_value - r.dual_value).abs() < 1e-7);
    }
}
