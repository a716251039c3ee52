//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line. Run with
//! `cargo test -p latsel-cli --test acceptance -- --nocapture`.

use latsel_cli::config::{ExperimentConfig, ExperimentKind, SolverKind};
use latsel_cli::experiments::run_experiment;
use latsel_core::baselines::{discretized_fw_minimize, pgd_lovasz_minimize, DiscretizationGrid};
use latsel_core::constrained::{
    solve_regularization_path, threshold_chain, BudgetSpec, PathInstance, ScalarFn, ScalarProfile,
};
use latsel_core::inner::{solve_restricted_qp, support};
use latsel_core::lattice::{check_hessian_offdiag, check_submodular_bruteforce, lovasz_extension};
use latsel_core::linalg::{chol_solve, cholesky, Matrix};
use latsel_core::models::{
    cardinality_penalty_g, gen_regression_instance, interval_penalty_g, lift_least_squares,
    range_penalty_g,
};
use latsel_core::robust::{eval_q, gen_multidomain, robust_solve};
use latsel_core::sfm::{min_norm_point, minimize_bruteforce, semigradient_prune};
use latsel_core::{CompositeFunction, Result, SetFunction, SetFunctionHandle, Subset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PENALTY_LAMBDA: f64 = 0.05;

fn penalty_for(seed: u64, n: usize) -> SetFunctionHandle {
    match seed % 3 {
        0 => cardinality_penalty_g(n, PENALTY_LAMBDA).unwrap(),
        1 => range_penalty_g(n, PENALTY_LAMBDA).unwrap(),
        _ => interval_penalty_g(n, PENALTY_LAMBDA).unwrap(),
    }
}

fn seeded_composite(n: usize, seed: u64) -> CompositeFunction {
    let inst = gen_regression_instance(n, seed, PENALTY_LAMBDA).unwrap();
    CompositeFunction::new(inst.fspec.clone(), penalty_for(seed, n)).unwrap()
}

/// Adds a modular term to a set function (the mu-regularized problems).
struct Shifted<'a, F: SetFunction + ?Sized> {
    base: &'a F,
    costs: Vec<f64>,
}

impl<F: SetFunction + ?Sized> SetFunction for Shifted<'_, F> {
    fn ground_size(&self) -> usize {
        self.base.ground_size()
    }
    fn eval(&self, s: &Subset) -> Result<f64> {
        Ok(self.base.eval(s)? + s.iter().map(|i| self.costs[i]).sum::<f64>())
    }
}

/// Original-problem objective of the recovered primal point.
fn pipeline_objective(comp: &CompositeFunction, minimizer: &Subset) -> f64 {
    let primal = comp.recover_primal(minimizer).unwrap();
    let supp = support(comp.n(), &primal.x);
    comp.fspec().eval(&primal.x) + comp.g().eval(&supp).unwrap()
}

#[test]
fn acceptance_01_pipeline_matches_support_enumeration() {
    for n in [4usize, 8, 10] {
        for seed in 0..50u64 {
            let comp = seeded_composite(n, seed);
            let res = min_norm_point(&comp, 1e-9, 400).unwrap();
            let pipeline = pipeline_objective(&comp, &res.minimizer);

            // Exhaustive oracle: every support, one inner solve each.
            let mut exhaustive = f64::INFINITY;
            for mask in 0..(1u64 << n) {
                let a = Subset::from_mask(n, mask);
                let value = comp.g().eval(&a).unwrap() + comp.eval_h(&a).unwrap();
                exhaustive = exhaustive.min(value);
            }
            assert!(
                (pipeline - exhaustive).abs() <= 1e-6,
                "n={n} seed={seed}: pipeline {pipeline} vs exhaustive {exhaustive}"
            );
        }
    }
    println!("acceptance 01 pipeline-matches-support-enumeration: PASS");
}

#[test]
fn acceptance_02_composite_is_submodular() {
    for seed in 0..100u64 {
        let comp = seeded_composite(6, seed);
        assert!(
            check_submodular_bruteforce(&comp, 1e-8).unwrap(),
            "composite failed the submodular inequality at seed {seed}"
        );
    }
    println!("acceptance 02 composite-submodularity: PASS");
}

#[test]
fn acceptance_03_min_norm_matches_bruteforce_and_pruning_brackets() {
    for n in [4usize, 8, 12] {
        for seed in 0..50u64 {
            let comp = seeded_composite(n, seed);
            let exact = minimize_bruteforce(&comp).unwrap();
            let mn = min_norm_point(&comp, 1e-9, 400).unwrap();
            assert!(
                (mn.value - exact.value).abs() <= 1e-6,
                "n={n} seed={seed}: value {} vs {}",
                mn.value,
                exact.value
            );
            assert_eq!(
                mn.minimizer, exact.minimizer,
                "n={n} seed={seed}: sets differ"
            );

            let (lower, upper) = semigradient_prune(&comp).unwrap();
            assert!(
                lower.is_subset_of(&exact.minimizer) && exact.minimizer.is_subset_of(&upper),
                "n={n} seed={seed}: bracket [{lower}, {upper}] misses {}",
                exact.minimizer
            );
        }
    }
    println!("acceptance 03 sfm-oracle-equivalence-and-pruning: PASS");
}

#[test]
fn acceptance_04_projected_subgradient_agrees_at_n100() {
    for seed in 0..5u64 {
        let inst = gen_regression_instance(100, seed, PENALTY_LAMBDA).unwrap();
        let g = range_penalty_g(100, PENALTY_LAMBDA).unwrap();
        let comp = CompositeFunction::new(inst.fspec.clone(), g).unwrap();
        let mn = min_norm_point(&comp, 1e-6, 400).unwrap();
        let mn_primal = comp.recover_primal(&mn.minimizer).unwrap();
        let mn_supp = support(100, &mn_primal.x);
        let mn_obj = pipeline_objective(&comp, &mn.minimizer);

        let g2 = range_penalty_g(100, PENALTY_LAMBDA).unwrap();
        let comp2 = CompositeFunction::new(inst.fspec.clone(), g2).unwrap();
        let (pgd, _) = pgd_lovasz_minimize(&comp2, 2000, 1e-6).unwrap();
        let pgd_primal = comp2.recover_primal(&pgd.minimizer).unwrap();
        let pgd_supp = support(100, &pgd_primal.x);
        let pgd_obj = pipeline_objective(&comp2, &pgd.minimizer);

        assert!(
            (mn_obj - pgd_obj).abs() <= 1e-4,
            "seed {seed}: objectives {mn_obj} vs {pgd_obj}"
        );
        assert_eq!(mn_supp, pgd_supp, "seed {seed}: supports differ");
    }
    println!("acceptance 04 baseline-agreement-n100: PASS");
}

#[test]
fn acceptance_05_discretization_gap_shrinks_with_resolution() {
    let n = 20;
    for seed in 0..3u64 {
        let inst = gen_regression_instance(n, seed, PENALTY_LAMBDA).unwrap();
        let g = range_penalty_g(n, PENALTY_LAMBDA).unwrap();
        let comp = CompositeFunction::new(inst.fspec.clone(), g).unwrap();
        let exact = min_norm_point(&comp, 1e-9, 400).unwrap();
        let exact_obj = pipeline_objective(&comp, &exact.minimizer);

        let mut previous = f64::INFINITY;
        for k in [50usize, 100, 200, 400] {
            let g_k = range_penalty_g(n, PENALTY_LAMBDA).unwrap();
            let grid = DiscretizationGrid::unit(n, k).unwrap();
            let (_, value, _) = discretized_fw_minimize(&inst.fspec, &g_k, &grid, 400).unwrap();
            let gap = value - exact_obj;
            assert!(gap >= 0.0, "seed {seed} k={k}: negative gap {gap}");
            assert!(
                gap <= previous + 1e-12,
                "seed {seed} k={k}: gap {gap} above previous {previous}"
            );
            previous = gap;
        }
    }
    println!("acceptance 05 discretization-gap-monotone: PASS");
}

#[test]
fn acceptance_06_regularization_path_thresholds_exactly() {
    let n = 8;
    for seed in 0..20u64 {
        let comp = seeded_composite(n, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(101));
        let w: Vec<f64> = (0..n).map(|_| 0.5 + rng.gen::<f64>()).collect();
        let budget = BudgetSpec::knapsack(w.clone(), f64::INFINITY).unwrap();
        let chain =
            solve_regularization_path(&PathInstance::Knapsack(&comp), &budget, 0.0, 1e-6).unwrap();

        let mu_max = chain.u_star.iter().cloned().fold(0.0f64, f64::max) * 1.1 + 0.1;
        let mut previous: Option<Subset> = None;
        for idx in 0..20 {
            let mu = mu_max * idx as f64 / 19.0;
            let thresholded = threshold_chain(&chain, mu).unwrap();
            let costs: Vec<f64> = w.iter().map(|wi| mu * wi).collect();
            let direct = minimize_bruteforce(&Shifted { base: &comp, costs }).unwrap();
            assert_eq!(
                thresholded, direct.minimizer,
                "seed {seed} mu={mu}: thresholded set is not the minimal minimizer"
            );
            if let Some(prev) = previous {
                assert!(
                    thresholded.is_subset_of(&prev),
                    "seed {seed}: nesting broken"
                );
            }
            previous = Some(thresholded);
        }
    }

    // Scalar profiles: monotone, nonpositive, and exactly zero past the
    // zero point, on a 100-point grid.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let profile = ScalarProfile::new(
            ScalarFn::Quadratic {
                a: 0.2 + rng.gen::<f64>(),
                b: -2.0 * rng.gen::<f64>() - 0.1,
            },
            ScalarFn::Linear {
                c: 0.2 + rng.gen::<f64>(),
            },
            10.0,
        )
        .unwrap();
        let hi = profile.zero_point * 2.0 + 1.0;
        let mut prev = f64::NEG_INFINITY;
        for idx in 0..=100 {
            let mu = hi * idx as f64 / 100.0;
            let h = profile.value(mu).unwrap();
            assert!(
                h <= 0.0 && h >= prev - 1e-9,
                "profile not monotone nonpositive"
            );
            if mu >= profile.zero_point {
                assert!(h.abs() <= 1e-9, "profile tail not zero at mu={mu}");
            }
            prev = h;
        }
    }
    println!("acceptance 06 regularization-path-thresholding: PASS");
}

#[test]
fn acceptance_07_lovasz_extension_vertex_consistency() {
    for n in 1..=10usize {
        let penalties = [
            cardinality_penalty_g(n, PENALTY_LAMBDA).unwrap(),
            range_penalty_g(n, PENALTY_LAMBDA).unwrap(),
            interval_penalty_g(n, PENALTY_LAMBDA).unwrap(),
        ];
        for g in &penalties {
            for mask in 0..(1u64 << n) {
                let a = Subset::from_mask(n, mask);
                let indicator: Vec<f64> = (0..n)
                    .map(|i| if a.contains(i) { 1.0 } else { 0.0 })
                    .collect();
                let ext = lovasz_extension(g, &indicator).unwrap();
                let direct = g.eval(&a).unwrap();
                assert!(
                    (ext - direct).abs() <= 1e-10,
                    "n={n} mask={mask:#x}: extension {ext} vs set value {direct}"
                );
            }
        }
    }
    println!("acceptance 07 lovasz-vertex-consistency: PASS");
}

#[test]
fn acceptance_08_robust_inner_exactness_and_convergence() {
    // Inner solve against an independent support-enumeration oracle.
    for k in [4usize, 7, 10] {
        for seed in 0..5u64 {
            let spec = gen_multidomain(k, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(500));
            for _ in 0..8 {
                let x0 = [2.0 * rng.gen::<f64>()];
                let q = eval_q(&spec, &x0).unwrap();
                let losses: Vec<f64> = spec.domain_losses.iter().map(|l| l.eval(&x0)).collect();
                let mut oracle = f64::NEG_INFINITY;
                for mask in 0..(1u64 << k) {
                    let a = Subset::from_mask(k, mask);
                    let penalty = spec.g.eval(&a).unwrap();
                    // Vertices of the capped simplex face: the origin and
                    // each unit spike inside the support.
                    let mut best_vertex = 0.0f64;
                    for i in a.iter() {
                        best_vertex = best_vertex.max(losses[i]);
                    }
                    oracle = oracle.max(best_vertex - penalty);
                }
                assert!(
                    (q.value - oracle).abs() <= 1e-8,
                    "k={k} seed={seed}: inner value {} vs oracle {oracle}",
                    q.value
                );
            }
        }
    }

    // Subgradient inequality of the convex outer function.
    for seed in 0..3u64 {
        let spec = gen_multidomain(6, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(900));
        for _ in 0..100 {
            let x0 = [2.0 * rng.gen::<f64>()];
            let x1 = [2.0 * rng.gen::<f64>()];
            let q0 = eval_q(&spec, &x0).unwrap();
            let q1 = eval_q(&spec, &x1).unwrap();
            assert!(
                q1.value >= q0.value + q0.subgrad[0] * (x1[0] - x0[0]) - 1e-6,
                "seed {seed}: subgradient inequality violated"
            );
        }
    }

    // Convergence trend on the seeded five-domain instance.
    let spec = gen_multidomain(5, 2);
    let mut q_star = f64::INFINITY;
    for i in 0..=100_000 {
        let w = 2.0 * i as f64 / 100_000.0;
        q_star = q_star.min(eval_q(&spec, &[w]).unwrap().value);
    }
    let mut points = Vec::new();
    for t in [100usize, 400, 1600, 6400] {
        let trace = robust_solve(&spec, t).unwrap();
        let sub = (trace.best_value() - q_star).max(1e-14);
        points.push(((t as f64).ln(), sub.ln()));
    }
    let m = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    assert!(slope <= -0.4, "suboptimality slope {slope} is above -0.4");
    println!("acceptance 08 robust-solver: PASS");
}

#[test]
fn acceptance_09_least_squares_lifting() {
    // Orthogonal designs (scaled coordinate permutations) pass the
    // off-diagonal Hessian check.
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    for _ in 0..5 {
        let mut a = Matrix::zeros(3, 3);
        let mut cols = [0usize, 1, 2];
        for i in (1..3).rev() {
            let j = rng.gen_range(0..=i);
            cols.swap(i, j);
        }
        for (r, c) in cols.iter().enumerate() {
            a[(r, *c)] = 0.5 + rng.gen::<f64>();
        }
        let b = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
        let (inst, passes) = lift_least_squares(&a, &b).unwrap();
        assert!(passes, "orthogonal design failed the off-diagonal check");
        assert!(check_hessian_offdiag(inst.fspec.q()).unwrap());
    }

    // Lifted solve without a penalty reproduces the normal-equations optimum.
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(60));
        let mut a = Matrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                a[(i, j)] = 2.0 * rng.gen::<f64>() - 1.0;
            }
        }
        let b: Vec<f64> = (0..3).map(|_| 2.0 * rng.gen::<f64>() - 1.0).collect();
        let (inst, _) = lift_least_squares(&a, &b).unwrap();
        let sol = solve_restricted_qp(&inst.fspec, &Subset::full(6), 1e-10).unwrap();
        let lifted_x: Vec<f64> = (0..3).map(|i| sol.x[i] - sol.x[i + 3]).collect();

        // Independent oracle: solve the normal equations directly.
        let gram = a.gram();
        let atb = a.tr_matvec(&b);
        let l = cholesky(&gram).expect("random design should be full rank");
        let direct = chol_solve(&l, &atb);
        for (xi, di) in lifted_x.iter().zip(&direct) {
            assert!(
                (xi - di).abs() <= 1e-6,
                "seed {seed}: {lifted_x:?} vs {direct:?}"
            );
        }
        let residual: f64 = {
            let ax = a.matvec(&direct);
            ax.iter().zip(&b).map(|(r, bi)| (r - bi) * (r - bi)).sum()
        };
        assert!((sol.value - residual).abs() <= 1e-6);
    }
    println!("acceptance 09 least-squares-lifting: PASS");
}

#[test]
fn acceptance_10_cli_runs_are_deterministic() {
    let configs = [
        (
            ExperimentKind::SparseRegression,
            14,
            vec![SolverKind::MinNorm, SolverKind::Pgd],
        ),
        (ExperimentKind::KnapsackPath, 8, vec![SolverKind::MinNorm]),
        (ExperimentKind::Robust, 6, vec![SolverKind::MinNorm]),
    ];
    for (experiment, n, solvers) in configs {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let dir = tempfile::tempdir().unwrap();
            let cfg = ExperimentConfig {
                experiment,
                n,
                seed: 3,
                repeats: 1,
                max_iter: 60,
                solvers: solvers.clone(),
                output_dir: dir.path().to_path_buf(),
                ..ExperimentConfig::default()
            };
            let outcome = run_experiment(&cfg).unwrap();
            let text = std::fs::read_to_string(outcome.results_path).unwrap();
            // Strip the wall_seconds column (index 6).
            let normalized: Vec<String> = text
                .lines()
                .map(|line| {
                    let mut fields: Vec<&str> = line.split(',').collect();
                    if fields.len() == 9 && fields[6] != "wall_seconds" {
                        fields[6] = "-";
                    }
                    fields.join(",")
                })
                .collect();
            outputs.push(normalized.join("\n"));
            let _ = run;
        }
        assert_eq!(
            outputs[0], outputs[1],
            "{experiment:?}: results.csv differs between identical runs"
        );
    }
    println!("acceptance 10 cli-determinism: PASS");
}
