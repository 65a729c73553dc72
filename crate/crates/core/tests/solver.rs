//! Solver properties checked against independently computed references.

mod common;

use common::*;
use ndarray::{Array1, Array2};
use rand::Rng;
use sgl::regression::recover_original_coefficients;
use sgl::*;

fn gaussian_cfg(lambda: f64) -> RegressionConfig64 {
    RegressionConfig64 {
        kernel: KernelSpec::gaussian(Bandwidth::MedianHalf),
        ..RegressionConfig64::new(lambda)
    }
}

#[test]
fn regression_gradient_matches_finite_differences() {
    for seed in 0..10 {
        let data = regression_data(7, 4, seed);
        let cfg = if seed % 2 == 0 {
            RegressionConfig64::new(0.0)
        } else {
            gaussian_cfg(0.0)
        };
        let prob = RegressionProblem64::new(&data, &cfg).unwrap();
        let c = uniform(&mut rng(100 + seed), 4, 7, -1.0, 1.0);
        let g = prob.grad_smooth(c.view()).unwrap();
        let fd = fd_matrix(&c, |m| prob.smooth_objective(m).unwrap());
        let err = rel_err(g.view(), fd.view());
        assert!(err <= 1e-5, "seed {seed}: relative error {err:e}");
    }
}

#[test]
fn classification_gradients_match_finite_differences() {
    for seed in 0..10 {
        let data = classification_data(8, 3, seed);
        let cfg = ClassificationConfig64::new(0.1, 0.0);
        let prob = ClassificationProblem64::new(&data, &cfg).unwrap();
        let mut r = rng(200 + seed);
        let alpha = Array1::from_shape_fn(8, |_| r.random_range(-1.0..1.0));
        let c = uniform(&mut r, 3, 8, -1.0, 1.0);
        let (ga, gc) = prob.gradients(alpha.view(), c.view(), 0.1).unwrap();

        let fd_c = fd_matrix(&c, |m| prob.smooth_objective(alpha.view(), m, 0.1).unwrap());
        let err_c = rel_err(gc.view(), fd_c.view());
        assert!(err_c <= 1e-5, "seed {seed}: C̃ block error {err_c:e}");

        let a2 = alpha.clone().insert_axis(ndarray::Axis(0));
        let fd_a = fd_matrix(&a2, |m| {
            prob.smooth_objective(m.row(0), c.view(), 0.1).unwrap()
        });
        let ga2 = ga.insert_axis(ndarray::Axis(0));
        let err_a = rel_err(ga2.view(), fd_a.view());
        assert!(err_a <= 1e-5, "seed {seed}: α block error {err_a:e}");
    }
}

#[test]
fn objective_trace_never_increases() {
    for seed in 0..5 {
        let data = regression_data(15, 6, seed);
        let prob = RegressionProblem64::new(&data, &RegressionConfig64::new(0.0)).unwrap();
        let cfg = RegressionConfig64::new(0.05 * prob.lambda_max());
        let (_, rep) = prob.fit(&cfg).unwrap();
        for w in rep.objective_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "seed {seed}: {} -> {}", w[0], w[1]);
        }
        if rep.converged {
            assert!(rep.fixed_point_residual <= 10.0 * cfg.tol);
        }

        let cdata = classification_data(12, 4, seed);
        let ccfg = ClassificationConfig64 {
            max_iter: 3000,
            ..ClassificationConfig64::new(1e-2, 0.0)
        };
        let cprob = ClassificationProblem64::new(&cdata, &ccfg).unwrap();
        let ccfg = ccfg.with_lambdas(1e-2, 0.2 * cprob.lambda2_max_heuristic());
        let (_, crep) = cprob.fit(&ccfg).unwrap();
        for w in crep.report.objective_trace.windows(2) {
            assert!(
                w[1] <= w[0] + 1e-12,
                "classification seed {seed}: {} -> {}",
                w[0],
                w[1]
            );
        }
        if crep.report.converged {
            assert!(crep.report.fixed_point_residual <= 10.0 * ccfg.tol);
        }
    }
}

#[test]
fn reduced_and_full_routes_agree_per_iteration() {
    for (n, p, seed) in [(6, 12, 1), (8, 30, 2), (10, 50, 3), (9, 9, 4)] {
        let data = regression_data(n, p, seed);
        let full_cfg = RegressionConfig64 {
            reduction: Reduction::Off,
            ..gaussian_cfg(0.0)
        };
        let red_cfg = RegressionConfig64 {
            reduction: Reduction::On,
            ..gaussian_cfg(0.0)
        };
        let full = RegressionProblem64::new(&data, &full_cfg).unwrap();
        let red = RegressionProblem64::new(&data, &red_cfg).unwrap();
        assert!(!full.precomputed().is_reduced() && red.precomputed().is_reduced());
        let delta = full.resolve_step(StepSize::Auto).unwrap();
        let lambda = 0.1 * full.lambda_max();
        let (mut a, mut b) = (Array2::zeros((p, n)), Array2::zeros((p, n)));
        for it in 0..200 {
            a = full.forward_backward_step(a.view(), lambda, delta).unwrap();
            b = red.forward_backward_step(b.view(), lambda, delta).unwrap();
            let diff = frob((&a - &b).view());
            assert!(diff <= 1e-10, "n={n} p={p} iteration {it}: {diff:e}");
        }
    }
}

#[test]
fn random_initializations_reach_the_same_objective() {
    let data = regression_data(12, 5, 7);
    let base = RegressionConfig64 {
        tol: 1e-11,
        max_iter: 200_000,
        ..RegressionConfig64::new(0.0)
    };
    let prob = RegressionProblem64::new(&data, &base).unwrap();
    let cfg = base.with_lambda(0.1 * prob.lambda_max());
    let mut objs = Vec::new();
    for seed in 0..3 {
        let init = uniform(&mut rng(seed), 5, 12, -2.0, 2.0);
        let (_, rep) = prob.fit_from(init, &cfg).unwrap();
        assert!(rep.converged);
        objs.push(rep.final_objective);
    }
    let (_, rep0) = prob.fit(&cfg).unwrap();
    objs.push(rep0.final_objective);
    for o in &objs {
        assert!((o - objs[0]).abs() <= 1e-6, "{objs:?}");
    }
}

#[test]
fn classification_random_initializations_agree() {
    let data = classification_data(10, 3, 3);
    let base = ClassificationConfig64 {
        tol: 1e-11,
        max_iter: 400_000,
        ..ClassificationConfig64::new(0.1, 0.0)
    };
    let prob = ClassificationProblem64::new(&data, &base).unwrap();
    let cfg = base.with_lambdas(0.1, 0.1 * prob.lambda2_max_heuristic());
    let mut objs = Vec::new();
    for seed in 0..2 {
        let mut r = rng(seed);
        let a0 = Array1::from_shape_fn(10, |_| r.random_range(-1.0..1.0));
        let c0 = uniform(&mut r, 3, 10, -1.0, 1.0);
        let (_, rep) = prob.fit_from(a0, c0, &cfg).unwrap();
        objs.push(rep.report.final_objective);
    }
    assert!((objs[0] - objs[1]).abs() <= 1e-6, "{objs:?}");
}

#[test]
fn permuting_variables_and_samples_permutes_the_solution() {
    let data = regression_data(10, 5, 11);
    let base = RegressionConfig64 {
        tol: 1e-12,
        max_iter: 200_000,
        ..gaussian_cfg(0.0)
    };
    let prob = RegressionProblem64::new(&data, &base).unwrap();
    let cfg = base.with_lambda(0.2 * prob.lambda_max());
    let (c, _) = prob.fit(&cfg).unwrap();

    let vperm = [3, 0, 4, 2, 1];
    let pdata = data.permute_vars(&vperm).unwrap();
    let (cv, _) = RegressionProblem64::new(&pdata, &cfg)
        .unwrap()
        .fit(&cfg)
        .unwrap();
    let expect = c.0.select(ndarray::Axis(0), &vperm);
    assert!(rel_err(cv.view(), expect.view()) <= 1e-6);

    let sperm = [9, 2, 5, 0, 7, 1, 8, 3, 6, 4];
    let sdata = data.select_samples(&sperm).unwrap();
    let (cs, _) = RegressionProblem64::new(&sdata, &cfg)
        .unwrap()
        .fit(&cfg)
        .unwrap();
    let expect = c.0.select(ndarray::Axis(1), &sperm);
    assert!(rel_err(cs.view(), expect.view()) <= 1e-6);
    assert_eq!(select(cs.view()).selected, select(c.view()).selected);
}

#[test]
fn label_flip_negates_classifier() {
    let data = classification_data(10, 3, 5);
    let (x, y, _) = data.clone().into_parts();
    let flipped = Dataset64::classification(x, -y).unwrap();
    let cfg = ClassificationConfig64 {
        max_iter: 2000,
        ..ClassificationConfig64::new(0.05, 1e-3)
    };
    let (m1, _) = fit_classification(&data, &cfg).unwrap();
    let (m2, _) = fit_classification(&flipped, &cfg).unwrap();
    let da = (&m1.alpha + &m2.alpha).mapv(f64::abs).sum();
    let dc = frob((&m1.c_tilde.0 + &m2.c_tilde.0).view());
    assert!(da <= 1e-10 && dc <= 1e-10, "{da:e} {dc:e}");
}

#[test]
fn prox_matches_generic_minimizer() {
    let mut r = rng(42);
    for k in 0..100 {
        let m = 1 + k % 8;
        let d = Array1::from_shape_fn(m, |_| r.random_range(-3.0f64..3.0));
        let norm = d.dot(&d).sqrt();
        let t = r.random_range(0.0..2.0) * norm;
        let ours = prox_group(d.view().insert_axis(ndarray::Axis(0)), t).unwrap();
        let reference = generic_row_minimizer(d.view(), t);
        let diff = (&ours.row(0) - &reference)
            .mapv(f64::abs)
            .fold(0.0f64, |a, &b| a.max(b));
        assert!(diff <= 1e-8, "row {k}: {diff:e} (‖d‖={norm}, t={t})");
    }
}

#[test]
fn lipschitz_estimate_matches_dense_hessian() {
    for (n, p, seed, reduction) in [
        (6, 3, 1, Reduction::Off),
        (7, 4, 2, Reduction::Off),
        (5, 9, 3, Reduction::On),
    ] {
        let data = regression_data(n, p, seed);
        let cfg = RegressionConfig64 {
            reduction,
            ..gaussian_cfg(0.0)
        };
        let prob = RegressionProblem64::new(&data, &cfg).unwrap();
        let hess = dense_operator(p * n, |v| {
            let c = v.view().into_shape_with_order((p, n)).unwrap();
            Array1::from_iter(prob.hessian_apply(c).iter().copied())
        });
        let top = na_eigenvalues(hess.view())[0];
        let l = prob.lipschitz().unwrap();
        assert!((l - top).abs() <= 0.02 * top, "L = {l}, ‖∇²Ψ₂‖ = {top}");
    }
}

#[test]
fn classification_lipschitz_bounds_the_hessian() {
    let (n, p) = (6, 3);
    let data = classification_data(n, p, 9);
    let lambda1 = 0.05;
    let prob =
        ClassificationProblem64::new(&data, &ClassificationConfig64::new(lambda1, 0.0)).unwrap();
    let bound = prob.lipschitz(lambda1).unwrap();
    let grad = |z: &Array1<f64>| -> Array1<f64> {
        let a = z.slice(ndarray::s![..n]);
        let c = z
            .slice(ndarray::s![n..])
            .into_shape_with_order((p, n))
            .unwrap();
        let (ga, gc) = prob.gradients(a, c, lambda1).unwrap();
        ga.iter().chain(gc.iter()).copied().collect()
    };
    for seed in 0..3 {
        let mut r = rng(seed);
        let z0 = Array1::from_shape_fn(n + p * n, |_| r.random_range(-0.5..0.5));
        let h = 1e-5;
        let mut hess = dense_operator(n + p * n, |e| {
            (grad(&(&z0 + &(e * h))) - grad(&(&z0 - &(e * h)))) / (2.0 * h)
        });
        let sym = (&hess + &hess.t()) / 2.0;
        hess.assign(&sym);
        let top = na_eigenvalues(hess.view())[0];
        assert!(
            top <= bound * (1.0 + 1e-6),
            "Hessian norm {top} above L̂ = {bound}"
        );
    }
}

#[test]
fn recovered_coefficients_reproduce_gradient_values() {
    let data = regression_data(9, 4, 13);
    let cfg = gaussian_cfg(0.0);
    let prob = RegressionProblem64::new(&data, &cfg).unwrap();
    let (c_tilde, _) = prob.fit(&cfg.with_lambda(0.1 * prob.lambda_max())).unwrap();
    let pre = prob.precomputed();
    let c = recover_original_coefficients(c_tilde.view(), pre.k_half_pinv()).unwrap();
    // f^j(x_i) = Σ_l c_jl K(x_l, x_i)
    let direct = c.dot(&pre.k());
    let via_tilde = pre.gradients_at_samples(c_tilde.view());
    assert!(rel_err(direct.view(), via_tilde.view()) <= 1e-8);
    assert!(rel_err(c.dot(&pre.k_half()).view(), c_tilde.view()) <= 1e-8);
}

#[test]
fn single_precision_agrees_with_double() {
    let data = regression_data(20, 5, 21);
    let cfg = RegressionConfig64::new(0.0);
    let prob = RegressionProblem64::new(&data, &cfg).unwrap();
    let lambda = 0.2 * prob.lambda_max();
    let (c64, _) = prob.fit(&cfg.with_lambda(lambda)).unwrap();

    let data32: Dataset32 = data.cast();
    let cfg32 = RegressionConfig32 {
        tol: 1e-5,
        ..RegressionConfig32::new(lambda as f32)
    };
    let (c32, _) = RegressionProblem32::new(&data32, &cfg32)
        .unwrap()
        .fit(&cfg32)
        .unwrap();
    let back = c32.0.mapv(f64::from);
    assert_eq!(select(c32.view()).selected, select(c64.view()).selected);
    assert!(rel_err(back.view(), c64.view()) <= 1e-3);
}
