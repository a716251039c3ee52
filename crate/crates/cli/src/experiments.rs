//! The experiment runners behind `latsel run`: instance construction,
//! timed solver execution, and report assembly.

use crate::config::{ExperimentConfig, ExperimentKind, SolverKind};
use crate::report::{self, PathRow, ReportRow};
use crate::CliError;
use latsel_core::baselines::{
    discretized_fw_minimize, pgd_lovasz_minimize, DiscretizationGrid, TraceRow,
};
use latsel_core::constrained::{
    select_under_budget, solve_regularization_path, threshold_chain, BudgetSpec, PathInstance,
};
use latsel_core::inner::support;
use latsel_core::models::{
    bump_signal, denoising_instance, gen_regression_instance, standard_normal,
};
use latsel_core::robust::{gen_multidomain, robust_solve};
use latsel_core::sfm::min_norm_point_full;
use latsel_core::{CompositeFunction, InstanceSpec, SetFunction};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::time::Instant;

pub struct RunOutcome {
    pub results_path: PathBuf,
    pub rows: Vec<ReportRow>,
    pub all_converged: bool,
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutcome, CliError> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    let (rows, all_converged) = match cfg.experiment {
        ExperimentKind::SparseRegression | ExperimentKind::Denoising => run_solver_suite(cfg)?,
        ExperimentKind::DiscretizationSweep => run_sweep(cfg)?,
        ExperimentKind::KnapsackPath => run_knapsack_path(cfg)?,
        ExperimentKind::Robust => run_robust(cfg)?,
    };
    let results_path = cfg.output_dir.join("results.csv");
    report::write_results(&results_path, &rows)?;
    report::write_manifest(&cfg.output_dir.join("manifest.json"), cfg)?;
    Ok(RunOutcome {
        results_path,
        rows,
        all_converged,
    })
}

/// Runs `f` the configured number of times and reports the mean wall time.
/// Instance generation happens outside; only the solve is timed.
fn timed<T>(
    repeats: usize,
    mut f: impl FnMut() -> Result<T, CliError>,
) -> Result<(T, f64), CliError> {
    let mut total = 0.0;
    let mut last = None;
    for _ in 0..repeats {
        let start = Instant::now();
        let value = f()?;
        total += start.elapsed().as_secs_f64();
        last = Some(value);
    }
    Ok((last.expect("repeats >= 1"), total / repeats as f64))
}

struct SolveProduct {
    objective: f64,
    support: String,
    iterations: usize,
    converged: bool,
    trace: Vec<TraceRow>,
    solution: Vec<f64>,
}

fn build_instance(cfg: &ExperimentConfig) -> Result<InstanceSpec, CliError> {
    match cfg.experiment {
        ExperimentKind::Denoising => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let noise_std = 0.1f64.sqrt();
            let y: Vec<f64> = bump_signal(cfg.n)
                .into_iter()
                .map(|v| v + noise_std * standard_normal(&mut rng))
                .collect();
            Ok(denoising_instance(&y, cfg.mu_smooth, cfg.lambda)?)
        }
        _ => Ok(gen_regression_instance(cfg.n, cfg.seed, cfg.lambda)?),
    }
}

fn solver_grid(cfg: &ExperimentConfig, k: usize) -> Result<DiscretizationGrid, CliError> {
    let grid = match cfg.experiment {
        ExperimentKind::Denoising => DiscretizationGrid::symmetric(cfg.n, k)?,
        _ => DiscretizationGrid::unit(cfg.n, k)?,
    };
    Ok(grid)
}

fn composite_objective(comp: &CompositeFunction, x: &[f64]) -> Result<(f64, String), CliError> {
    let supp = support(comp.n(), x);
    let objective = comp.fspec().eval(x) + comp.g().eval(&supp)?;
    Ok((objective, supp.to_hex()))
}

fn run_one_solver(
    cfg: &ExperimentConfig,
    inst: &InstanceSpec,
    solver: SolverKind,
    k: usize,
) -> Result<SolveProduct, CliError> {
    match solver {
        SolverKind::MinNorm => {
            let comp = CompositeFunction::new(inst.fspec.clone(), inst.g())?;
            let solve = min_norm_point_full(&comp, cfg.tol, cfg.max_iter)?;
            let primal = comp.recover_primal(&solve.result.minimizer)?;
            let (objective, support) = composite_objective(&comp, &primal.x)?;
            let trace = solve
                .trace
                .iter()
                .map(|(it, obj, secs)| TraceRow {
                    iteration: *it,
                    objective: *obj,
                    elapsed: *secs,
                })
                .collect();
            Ok(SolveProduct {
                objective,
                support,
                iterations: solve.result.iterations,
                converged: solve.result.converged,
                trace,
                solution: primal.x,
            })
        }
        SolverKind::Pgd => {
            let comp = CompositeFunction::new(inst.fspec.clone(), inst.g())?;
            let (res, trace) = pgd_lovasz_minimize(&comp, cfg.max_iter, cfg.tol)?;
            let primal = comp.recover_primal(&res.minimizer)?;
            let (objective, support) = composite_objective(&comp, &primal.x)?;
            Ok(SolveProduct {
                objective,
                support,
                iterations: res.iterations,
                converged: res.converged,
                trace,
                solution: primal.x,
            })
        }
        SolverKind::Discretized => {
            let g = inst.g();
            let grid = solver_grid(cfg, k)?;
            let (x, value, trace) = discretized_fw_minimize(&inst.fspec, &g, &grid, cfg.max_iter)?;
            let supp = support(cfg.n, &x);
            Ok(SolveProduct {
                objective: value,
                support: supp.to_hex(),
                iterations: trace.len(),
                converged: true,
                trace,
                solution: x,
            })
        }
    }
}

/// sparse_regression / denoising: every configured solver on one instance.
fn run_solver_suite(cfg: &ExperimentConfig) -> Result<(Vec<ReportRow>, bool), CliError> {
    let inst = build_instance(cfg)?;
    let k = cfg.effective_k_list()[0];
    let mut rows = Vec::new();
    let mut all_converged = true;
    for &solver in &cfg.solvers {
        let (product, wall) = timed(cfg.repeats, || run_one_solver(cfg, &inst, solver, k))?;
        report::write_trace(
            &cfg.output_dir.join(format!("trace_{}.csv", solver.name())),
            &product.trace,
        )?;
        report::write_solution(
            &cfg.output_dir
                .join(format!("solution_{}.csv", solver.name())),
            &product.solution,
        )?;
        all_converged &= product.converged;
        rows.push(ReportRow {
            experiment: cfg.experiment.name().into(),
            solver: solver.name().into(),
            n: cfg.n,
            k: (solver == SolverKind::Discretized).then_some(k),
            seed: cfg.seed,
            objective: product.objective,
            wall_seconds: wall,
            iterations: product.iterations,
            support: product.support,
        });
    }
    Ok((rows, all_converged))
}

/// discretization_sweep: one exact reference solve plus one discretized
/// solve per level in `k_list`; the gap column is their difference.
fn run_sweep(cfg: &ExperimentConfig) -> Result<(Vec<ReportRow>, bool), CliError> {
    let inst = build_instance(cfg)?;
    let mut rows = Vec::new();

    let (exact, exact_wall) = timed(cfg.repeats, || {
        run_one_solver(cfg, &inst, SolverKind::MinNorm, 2)
    })?;
    report::write_trace(&cfg.output_dir.join("trace_minnorm.csv"), &exact.trace)?;
    report::write_solution(
        &cfg.output_dir.join("solution_minnorm.csv"),
        &exact.solution,
    )?;
    rows.push(ReportRow {
        experiment: cfg.experiment.name().into(),
        solver: SolverKind::MinNorm.name().into(),
        n: cfg.n,
        k: None,
        seed: cfg.seed,
        objective: exact.objective,
        wall_seconds: exact_wall,
        iterations: exact.iterations,
        support: exact.support.clone(),
    });

    let mut gaps = Vec::new();
    for &k in &cfg.effective_k_list() {
        let (product, wall) = timed(cfg.repeats, || {
            run_one_solver(cfg, &inst, SolverKind::Discretized, k)
        })?;
        report::write_trace(
            &cfg.output_dir.join(format!("trace_discretized_k{k}.csv")),
            &product.trace,
        )?;
        gaps.push((k, product.objective - exact.objective));
        rows.push(ReportRow {
            experiment: cfg.experiment.name().into(),
            solver: SolverKind::Discretized.name().into(),
            n: cfg.n,
            k: Some(k),
            seed: cfg.seed,
            objective: product.objective,
            wall_seconds: wall,
            iterations: product.iterations,
            support: product.support,
        });
    }
    report::write_sweep_gaps(&cfg.output_dir.join("sweep_gaps.csv"), &gaps)?;
    Ok((rows, exact.converged))
}

/// knapsack_path: solve the path problem once, export the thresholded sets
/// over a grid of regularization strengths, and select under the budget.
fn run_knapsack_path(cfg: &ExperimentConfig) -> Result<(Vec<ReportRow>, bool), CliError> {
    let inst = build_instance(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x9E37_79B9_7F4A_7C15));
    let weights: Vec<f64> = (0..cfg.n)
        .map(|_| 0.5 + rand::Rng::gen::<f64>(&mut rng))
        .collect();
    let budget_value = 0.5 * weights.iter().sum::<f64>();
    let budget = BudgetSpec::knapsack(weights, budget_value)?;

    let ((comp, chain), wall) = timed(cfg.repeats, || {
        let comp = CompositeFunction::new(inst.fspec.clone(), inst.g())?;
        let chain =
            solve_regularization_path(&PathInstance::Knapsack(&comp), &budget, 0.0, cfg.tol)?;
        Ok((comp, chain))
    })?;

    let mu_max = chain.u_star.iter().cloned().fold(0.0f64, f64::max) * 1.05 + 0.1;
    let grid: Vec<f64> = (0..20).map(|i| mu_max * i as f64 / 19.0).collect();

    let mut path_rows = Vec::with_capacity(grid.len());
    for &mu in &grid {
        let set = threshold_chain(&chain, mu)?;
        let sol = comp.recover_primal(&set)?;
        let (objective, _) = composite_objective(&comp, &sol.x)?;
        path_rows.push(PathRow {
            mu,
            support: set.to_hex(),
            w_value: budget.usage(&sol.x),
            objective,
        });
    }
    report::write_path(&cfg.output_dir.join("path.csv"), &path_rows)?;

    let (_, selected) = select_under_budget(&chain, &comp, &budget, &grid)?;
    let (objective, support_hex) = composite_objective(&comp, &selected.x)?;
    report::write_solution(&cfg.output_dir.join("solution_path.csv"), &selected.x)?;

    let rows = vec![ReportRow {
        experiment: cfg.experiment.name().into(),
        solver: "path".into(),
        n: cfg.n,
        k: None,
        seed: cfg.seed,
        objective,
        wall_seconds: wall,
        iterations: grid.len(),
        support: support_hex,
    }];
    Ok((rows, true))
}

/// robust: the multiple-domain instance with `n` domains, solved by `max_iter`
/// projected subgradient steps.
fn run_robust(cfg: &ExperimentConfig) -> Result<(Vec<ReportRow>, bool), CliError> {
    let (trace, wall) = timed(cfg.repeats, || {
        let spec = gen_multidomain(cfg.n, cfg.seed);
        Ok(robust_solve(&spec, cfg.max_iter)?)
    })?;
    let best = trace
        .iterates
        .iter()
        .min_by(|a, b| a.q_value.partial_cmp(&b.q_value).unwrap())
        .expect("at least one iterate");
    report::write_robust_trace(&cfg.output_dir.join("trace_robust.csv"), &trace)?;
    report::write_solution(
        &cfg.output_dir.join("solution_robust.csv"),
        &trace.averaged_x,
    )?;
    let rows = vec![ReportRow {
        experiment: cfg.experiment.name().into(),
        solver: "robust".into(),
        n: cfg.n,
        k: None,
        seed: cfg.seed,
        objective: best.q_value,
        wall_seconds: wall,
        iterations: trace.t,
        support: best.inner_support.to_hex(),
    }];
    Ok((rows, true))
}
