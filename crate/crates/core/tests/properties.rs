mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use swvar::dependence::{dependence_factor, op_norm, spectral_radius, LinearProcessSpec};
use swvar::experiments::{calibrate_constant, concentration_t_grid};
use swvar::model::build_design;
use swvar::penalties::{lambda_theory, PenaltySpec};
use swvar::pipeline::fit_design;
use swvar::simulate::{gen_sparse_transition, simulate_var_recorded, NoiseSpec, SimOptions, TransitionGenSpec};
use swvar::solvers::{fista_fit, lowrank_sparse_fit, ols_fit, GramProblem, SolverConfig};
use swvar::{Matrix, VarModel};

fn vec_of(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, d)
}

/// One penalty of each vector variant on dimension `d`.
fn penalties(d: usize) -> Vec<PenaltySpec> {
    let w: Vec<f64> = (0..d).map(|i| 2.0 - i as f64 / d as f64).collect();
    vec![
        PenaltySpec::L1,
        PenaltySpec::GroupL21 {
            groups: vec![(0..d / 2).collect(), (d / 2..d).collect()],
            weights: vec![1.0, 1.7],
        },
        PenaltySpec::Owl { weights: w },
        PenaltySpec::KSupport { k: (d / 2).max(1) },
        PenaltySpec::Nuclear { rows: 2, cols: d / 2 },
    ]
}

fn objective(spec: &PenaltySpec, u: &[f64], tau: f64, x: &[f64]) -> f64 {
    let fit: f64 = x.iter().zip(u).map(|(a, b)| (a - b).powi(2)).sum();
    0.5 * fit + tau * spec.value(x).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_axioms(v in vec_of(6), u in vec_of(6), c in -3.0..3.0f64) {
        for spec in penalties(6) {
            let rv = spec.value(&v).unwrap();
            let ru = spec.value(&u).unwrap();
            prop_assert!(rv >= 0.0);
            let scaled: Vec<f64> = v.iter().map(|x| c * x).collect();
            prop_assert!((spec.value(&scaled).unwrap() - c.abs() * rv).abs() <= 1e-9 * (1.0 + rv));
            let sum: Vec<f64> = v.iter().zip(&u).map(|(a, b)| a + b).collect();
            prop_assert!(spec.value(&sum).unwrap() <= rv + ru + 1e-9);
        }
    }

    #[test]
    fn generalized_cauchy_schwarz(v in vec_of(6), u in vec_of(6)) {
        for spec in penalties(6) {
            let inner: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
            prop_assert!(inner.abs() <= spec.value(&v).unwrap() * spec.dual(&u).unwrap() + 1e-9);
        }
    }

    #[test]
    fn prox_beats_random_perturbations(u in vec_of(6), tau in 0.05..2.0f64, seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        for spec in penalties(6) {
            let x = spec.prox(&u, tau).unwrap();
            let best = objective(&spec, &u, tau, &x);
            for _ in 0..1000 {
                let y: Vec<f64> = x.iter().zip(gaussian_vec(6, &mut r)).map(|(a, g)| a + 1e-3 * g).collect();
                prop_assert!(best <= objective(&spec, &u, tau, &y) + 1e-12, "{spec:?}");
            }
        }
    }

    #[test]
    fn moreau_decomposition(u in vec_of(6), tau in 0.05..2.0f64) {
        for spec in penalties(6).into_iter().take(2) {
            let x = spec.prox(&u, tau).unwrap();
            let scaled: Vec<f64> = u.iter().map(|v| v / tau).collect();
            let z = spec.project_dual_ball(&scaled).unwrap();
            for i in 0..6 {
                prop_assert!((u[i] - x[i] - tau * z[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn dual_ball_attains_norm(v in vec_of(6)) {
        // R(v) = max over the dual unit ball of ⟨v, z⟩, attained by the
        // dual-ball projection of a large multiple of v.
        for spec in penalties(6).into_iter().take(2) {
            let big: Vec<f64> = v.iter().map(|x| 1e8 * x).collect();
            let z = spec.project_dual_ball(&big).unwrap();
            let inner: f64 = v.iter().zip(&z).map(|(a, b)| a * b).sum();
            prop_assert!(spec.dual(&z).unwrap() <= 1.0 + 1e-12);
            prop_assert!((inner - spec.value(&v).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn equal_weight_owl_is_scaled_l1(u in vec_of(5), tau in 0.05..2.0f64, c in 0.1..3.0f64) {
        let owl = PenaltySpec::Owl { weights: vec![c; 5] }.prox(&u, tau).unwrap();
        let l1 = PenaltySpec::L1.prox(&u, tau * c).unwrap();
        prop_assert!(max_diff(&owl, &l1) < 1e-12);
    }

    #[test]
    fn spectral_radius_below_op_norm(seed in any::<u64>(), n in 1usize..7) {
        let a = gaussian(n, n, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(spectral_radius(&a).unwrap() <= op_norm(&a) * (1.0 + 1e-10));
    }

    #[test]
    fn dependence_factor_at_least_one(seed in any::<u64>(), n in 1usize..5, norm in 0.0..0.9f64) {
        let a = with_op_norm(gaussian(n, n, &mut ChaCha8Rng::seed_from_u64(seed)), norm);
        let c = dependence_factor(&LinearProcessSpec::var1(a, Matrix::identity(n, n)).unwrap()).unwrap().c_factor;
        prop_assert!(c >= 1.0);
        if norm == 0.0 {
            prop_assert_eq!(c, 1.0);
        } else {
            prop_assert!(c > 1.0);
        }
    }

    #[test]
    fn design_residual_is_recorded_noise(seed in any::<u64>(), p in 1usize..5, d in 1usize..4) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..d).map(|_| with_op_norm(gaussian(p, p, &mut r), 0.3 / d as f64)).collect();
        let model = VarModel::new(coeffs).unwrap();
        let path = simulate_var_recorded(&model, &NoiseSpec::new(1.0, 1.0, p).unwrap(), 40, &SimOptions { burn_in: 20, allow_unstable: false }, &mut r).unwrap();
        let data = build_design(&path.trajectory, d).unwrap();
        let resid = &data.y - &data.x * model.stacked();
        let recorded = path.noise.rows(d, data.n());
        prop_assert!((resid - recorded).amax() < 1e-12);
    }

    #[test]
    fn rescaling_keeps_support(seed in any::<u64>(), p in 2usize..8, rho in 0.1..0.95f64) {
        let spec = TransitionGenSpec::sparse(p, p + 1, rho);
        let b = gen_sparse_transition(&spec, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        // The same stream drawn unscaled has the same nonzero pattern.
        let raw = gen_sparse_transition(&TransitionGenSpec::sparse(p, p + 1, 0.5), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(b.iter().filter(|v| **v != 0.0).count(), p + 1);
        for (x, y) in b.iter().zip(raw.iter()) {
            prop_assert_eq!(*x == 0.0, *y == 0.0);
        }
        prop_assert!((spectral_radius(&b).unwrap() - rho).abs() < 1e-8);
    }

    #[test]
    fn lowrank_box_is_exact(seed in any::<u64>(), alpha in 1.0..4.0f64) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let x = gaussian(30, 4, &mut r);
        let y = gaussian(30, 4, &mut r) * 5.0;
        let fit = lowrank_sparse_fit(&x, &y, 0.1, 0.1, alpha, &SolverConfig::default()).unwrap();
        prop_assert!(fit.lowrank.unwrap().low_rank.amax() <= alpha / 4.0 + 1e-10);
    }

    #[test]
    fn lasso_objective_dominance(seed in any::<u64>(), lambda in 0.01..0.5f64) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let x = gaussian(40, 5, &mut r);
        let y = gaussian(40, 2, &mut r);
        let obj = |b: &Matrix| (&y - &x * b).norm_squared() / 40.0 + lambda * b.iter().map(|v| v.abs()).sum::<f64>();
        let fit = fista_fit(&x, &y, &PenaltySpec::L1, lambda, &SolverConfig::default()).unwrap();
        let f = obj(&fit.coeffs);
        prop_assert!(f <= obj(&Matrix::zeros(5, 2)) + 1e-12);
        prop_assert!(f <= obj(&ols_fit(&x, &y).unwrap().coeffs) + 1e-12);
        for w in fit.objective_trace.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0));
        }
    }

    #[test]
    fn columnwise_fits_are_order_independent(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let x = gaussian(30, 6, &mut r);
        let y = gaussian(30, 4, &mut r);
        let problem = GramProblem::new(&x, &y).unwrap();
        let cfg = SolverConfig::default();
        let joint = fit_design(&problem, &PenaltySpec::L1, 0.1, &cfg, None).unwrap().coeffs;
        for j in (0..4).rev() {
            let col = problem.fit_column(j, &PenaltySpec::L1, 0.1, &cfg, None).unwrap().coeffs;
            let want: Vec<f64> = joint.column(j).iter().copied().collect();
            prop_assert_eq!(col.as_slice(), want.as_slice());
        }
    }

    #[test]
    fn lambda_theory_homogeneity(w in 0.1..10.0f64, n in 1usize..10_000, k in 0.1..5.0f64, c in 1.0..20.0f64) {
        let l = lambda_theory(w, n, k, c, 1.0, 1.0).unwrap();
        prop_assert!((lambda_theory(w, 2 * n, k, c, 1.0, 1.0).unwrap() * 2f64.sqrt() - l).abs() < 1e-12 * l);
        prop_assert!((lambda_theory(w, n, k, 2.0 * c, 1.0, 1.0).unwrap() - 2.0 * l).abs() < 1e-12 * l);
    }

    #[test]
    fn calibrated_bound_majorizes(rates in prop::collection::vec(0.5..200.0f64, 1..4), gamma in 0.3..2.0f64, n in 50usize..1000) {
        let t = concentration_t_grid();
        let tails: Vec<f64> = t.iter().map(|&x| rates.iter().map(|r| (-(r * x)).exp()).sum::<f64>() / rates.len() as f64).collect();
        if let Some(c) = calibrate_constant(&t, &tails, n, gamma, 6.0) {
            for (ti, e) in t.iter().zip(&tails) {
                let nt = n as f64 * ti;
                prop_assert!(6.0 * (-c * nt.powf(gamma / 2.0).min(nt * ti)).exp() >= *e);
            }
        }
    }
}
