//! Cross-module integration: the full solve pipeline on generated instances,
//! serialized-instance replay, concurrent composite queries, and the convex
//! path objective sanity check.

use latsel_core::constrained::{
    solve_regularization_path, threshold_chain, BudgetSpec, PathInstance,
};
use latsel_core::inner::support;
use latsel_core::lattice::lovasz_extension;
use latsel_core::models::{denoising_instance, gen_regression_instance};
use latsel_core::robust::{gen_multidomain, robust_solve};
use latsel_core::sfm::{min_norm_point, min_norm_point_full, minimize_bruteforce};
use latsel_core::{CompositeFunction, InstanceSpec, SetFunction, Subset};

fn composite(inst: &InstanceSpec) -> CompositeFunction {
    CompositeFunction::new(inst.fspec.clone(), inst.g()).unwrap()
}

#[test]
fn denoising_pipeline_matches_bruteforce() {
    // Signed (free-mode) inner solves through the whole reduction.
    let y = [0.9, 0.85, -0.1, 0.02, 0.0, 0.45];
    let inst = denoising_instance(&y, 0.8, 0.05).unwrap();
    let comp = composite(&inst);
    let exact = minimize_bruteforce(&comp).unwrap();
    let mn = min_norm_point(&comp, 1e-9, 200).unwrap();
    assert_eq!(mn.minimizer, exact.minimizer);
    assert!((mn.value - exact.value).abs() < 1e-8);

    let primal = comp.recover_primal(&mn.minimizer).unwrap();
    let objective = inst.fspec.eval(&primal.x) + comp.g().eval(&support(6, &primal.x)).unwrap();
    assert!((objective - exact.value).abs() < 1e-8);
}

#[test]
fn serialized_instances_replay_identically() {
    let inst = gen_regression_instance(7, 5, 0.05).unwrap();
    let json = serde_json::to_string(&inst).unwrap();
    let replayed: InstanceSpec = serde_json::from_str(&json).unwrap();

    let a = min_norm_point(&composite(&inst), 1e-9, 200).unwrap();
    let b = min_norm_point(&composite(&replayed), 1e-9, 200).unwrap();
    assert_eq!(a.minimizer, b.minimizer);
    assert_eq!(a.value.to_bits(), b.value.to_bits());
}

#[test]
fn composite_supports_concurrent_queries() {
    let inst = gen_regression_instance(10, 1, 0.05).unwrap();
    let comp = composite(&inst);
    let reference: Vec<f64> = (0..1u64 << 10)
        .map(|m| comp.eval(&Subset::from_mask(10, m)).unwrap())
        .collect();

    let fresh = composite(&inst);
    std::thread::scope(|scope| {
        for t in 0..4u64 {
            let fresh = &fresh;
            let reference = &reference;
            scope.spawn(move || {
                // Interleaved strides so threads race on the same subsets.
                let mut m = t % 4;
                while m < 1 << 10 {
                    let v = fresh.eval(&Subset::from_mask(10, m)).unwrap();
                    assert_eq!(v.to_bits(), reference[m as usize].to_bits());
                    m += 1;
                }
            });
        }
    });
}

#[test]
fn path_objective_is_minimized_at_u_star() {
    // The convex path objective at u* never exceeds its value at scaled
    // indicator vectors.
    let inst = gen_regression_instance(6, 4, 0.05).unwrap();
    let comp = composite(&inst);
    let w = vec![0.8, 1.2, 1.0, 0.6, 1.4, 0.9];
    let budget = BudgetSpec::knapsack(w.clone(), f64::INFINITY).unwrap();
    let chain =
        solve_regularization_path(&PathInstance::Knapsack(&comp), &budget, 0.0, 1e-6).unwrap();

    let objective = |u: &[f64]| -> f64 {
        let quad: f64 = u.iter().zip(&w).map(|(ui, wi)| 0.5 * wi * ui * ui).sum();
        lovasz_extension(&comp, u).unwrap() + quad
    };
    let at_star = objective(&chain.u_star);
    for mask in 0..(1u64 << 6) {
        let set = Subset::from_mask(6, mask);
        for step in 1..6 {
            let mu = 0.6 * step as f64;
            let scaled: Vec<f64> = (0..6)
                .map(|i| if set.contains(i) { mu } else { 0.0 })
                .collect();
            assert!(
                at_star <= objective(&scaled) + 1e-7,
                "path objective beaten by a scaled indicator of {set} at {mu}"
            );
        }
    }
}

#[test]
fn path_thresholds_track_interval_penalty_instances() {
    // The path machinery on a non-modular penalty (interval) cross-checked
    // against direct solves.
    let inst = gen_regression_instance(6, 11, 0.05).unwrap();
    let g = latsel_core::models::interval_penalty_g(6, 0.05).unwrap();
    let comp = CompositeFunction::new(inst.fspec.clone(), g).unwrap();
    let w = vec![1.0; 6];
    let budget = BudgetSpec::knapsack(w.clone(), f64::INFINITY).unwrap();
    let chain =
        solve_regularization_path(&PathInstance::Knapsack(&comp), &budget, 0.0, 1e-6).unwrap();

    struct Shifted<'a> {
        comp: &'a CompositeFunction,
        mu: f64,
    }
    impl latsel_core::SetFunction for Shifted<'_> {
        fn ground_size(&self) -> usize {
            self.comp.n()
        }
        fn eval(&self, s: &Subset) -> latsel_core::Result<f64> {
            Ok(self.comp.eval(s)? + self.mu * s.cardinality() as f64)
        }
    }

    for step in 0..12 {
        let mu = 0.35 * step as f64;
        let direct = minimize_bruteforce(&Shifted { comp: &comp, mu }).unwrap();
        assert_eq!(
            threshold_chain(&chain, mu).unwrap(),
            direct.minimizer,
            "mu = {mu}"
        );
    }
}

#[test]
fn min_norm_flags_exhausted_iteration_budget() {
    let inst = gen_regression_instance(12, 2, 0.05).unwrap();
    let comp = composite(&inst);
    let solve = min_norm_point_full(&comp, 1e-12, 2).unwrap();
    assert!(!solve.result.converged);
    assert!(solve.result.gap_certificate > 1e-12);
    // The flagged result still reports a genuine upper bound.
    let exact = minimize_bruteforce(&comp).unwrap();
    assert!(solve.result.value + 1e-12 >= exact.value);
    assert!(solve.result.value - exact.value <= solve.result.gap_certificate + 1e-12);
}

#[test]
fn robust_trace_averages_its_iterates() {
    let spec = gen_multidomain(4, 6);
    let trace = robust_solve(&spec, 50).unwrap();
    assert_eq!(trace.iterates.len(), 50);
    let mean: f64 = trace.iterates.iter().map(|it| it.x[0]).sum::<f64>() / 50.0;
    assert!((mean - trace.averaged_x[0]).abs() < 1e-12);
    let best = trace.best_value();
    assert!(trace.iterates.iter().any(|it| it.q_value == best));
}
