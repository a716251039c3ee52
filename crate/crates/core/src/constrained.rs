//! Budget-constrained variants: scalar profiles of the inner minimization,
//! the single convex problem whose minimizer encodes the entire
//! regularization path, thresholding into nested sets, and budget-feasible
//! selection along the path.

use crate::error::{Error, Result};
use crate::inner::{support, CompositeFunction, InnerSolution};
use crate::lattice::{descending_order, greedy_base_vertex, SetFunction, SetFunctionHandle};
use crate::linalg;
use crate::sfm::{min_norm_point, minimize_bruteforce, BRUTE_MIN_CAP};
use crate::subset::Subset;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Scalar function descriptors with value zero at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ScalarFn {
    /// `a z² + b z`
    Quadratic { a: f64, b: f64 },
    /// `c z`
    Linear { c: f64 },
}

impl ScalarFn {
    pub fn eval(&self, z: f64) -> f64 {
        match self {
            ScalarFn::Quadratic { a, b } => a * z * z + b * z,
            ScalarFn::Linear { c } => c * z,
        }
    }

    fn coeffs(&self) -> (f64, f64) {
        match self {
            ScalarFn::Quadratic { a, b } => (*a, *b),
            ScalarFn::Linear { c } => (0.0, *c),
        }
    }

    fn is_convex(&self) -> bool {
        self.coeffs().0 >= 0.0
    }

    /// Strictly increasing on `[0, cap]` with value 0 at 0.
    fn is_strictly_increasing(&self) -> bool {
        let (a, b) = self.coeffs();
        a >= 0.0 && b >= 0.0 && a + b > 0.0
    }
}

/// `min { f(z) + mu * w(z) : z in [0, z_cap] }`, which is nonpositive since
/// `z = 0` is feasible and both functions vanish there.
pub fn scalar_h(f: &ScalarFn, w: &ScalarFn, mu: f64, z_cap: f64) -> Result<f64> {
    Ok(scalar_h_argmin(f, w, mu, z_cap)?.0)
}

/// Same as [`scalar_h`] but also returns the minimizing `z`.
pub fn scalar_h_argmin(f: &ScalarFn, w: &ScalarFn, mu: f64, z_cap: f64) -> Result<(f64, f64)> {
    if !z_cap.is_finite() || z_cap <= 0.0 {
        return Err(Error::InvalidParameter("z_cap must be positive".into()));
    }
    if mu < 0.0 {
        return Err(Error::InvalidParameter("mu must be nonnegative".into()));
    }
    let (fa, fb) = f.coeffs();
    let (wa, wb) = w.coeffs();
    let a = fa + mu * wa;
    let b = fb + mu * wb;
    let eval = |z: f64| a * z * z + b * z;
    let z = if a > 0.0 {
        (-b / (2.0 * a)).clamp(0.0, z_cap)
    } else if a == 0.0 {
        if b >= 0.0 {
            0.0
        } else {
            z_cap
        }
    } else if eval(z_cap) < 0.0 {
        z_cap
    } else {
        0.0
    };
    Ok((eval(z).min(0.0), z))
}

/// The map `mu -> H_i(mu)` for one coordinate, with the smallest `mu` at
/// which the profile reaches (and stays at) zero.
#[derive(Clone, Debug)]
pub struct ScalarProfile {
    pub f_i: ScalarFn,
    pub w_i: ScalarFn,
    pub z_cap: f64,
    /// Smallest `c >= 0` with `H_i(c) = 0`; infinite when the profile stays
    /// strictly negative.
    pub zero_point: f64,
}

impl ScalarProfile {
    pub fn new(f_i: ScalarFn, w_i: ScalarFn, z_cap: f64) -> Result<Self> {
        if !z_cap.is_finite() || z_cap <= 0.0 {
            return Err(Error::InvalidParameter("z_cap must be positive".into()));
        }
        if !f_i.is_convex() {
            return Err(Error::InvalidParameter("f_i must be convex".into()));
        }
        if !w_i.is_strictly_increasing() {
            return Err(Error::InvalidParameter(
                "w_i must be strictly increasing".into(),
            ));
        }
        let (_, fb) = f_i.coeffs();
        let (_, wb) = w_i.coeffs();
        // With convex f and increasing w, H(mu) < 0 iff the combined slope at
        // the origin is negative.
        let zero_point = if fb >= 0.0 {
            0.0
        } else if wb > 0.0 {
            -fb / wb
        } else {
            f64::INFINITY
        };
        Ok(ScalarProfile {
            f_i,
            w_i,
            z_cap,
            zero_point,
        })
    }

    pub fn value(&self, mu: f64) -> Result<f64> {
        scalar_h(&self.f_i, &self.w_i, mu, self.z_cap)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetKind {
    SupportKnapsack,
    ContinuousSeparable,
}

/// Budget description: a per-index knapsack charge on the support, or a
/// separable strictly increasing charge on the values.
#[derive(Clone, Debug)]
pub struct BudgetSpec {
    pub kind: BudgetKind,
    pub w: Vec<f64>,
    pub scalar_f: Vec<ScalarFn>,
    pub scalar_w: Vec<ScalarFn>,
    pub budget: f64,
    pub z_cap: f64,
}

impl BudgetSpec {
    pub fn knapsack(w: Vec<f64>, budget: f64) -> Result<Self> {
        if w.iter().any(|v| v.is_nan() || *v <= 0.0) {
            return Err(Error::InvalidParameter(
                "knapsack weights must be strictly positive".into(),
            ));
        }
        Ok(BudgetSpec {
            kind: BudgetKind::SupportKnapsack,
            w,
            scalar_f: Vec::new(),
            scalar_w: Vec::new(),
            budget,
            z_cap: f64::INFINITY,
        })
    }

    pub fn continuous(
        scalar_f: Vec<ScalarFn>,
        scalar_w: Vec<ScalarFn>,
        budget: f64,
        z_cap: f64,
    ) -> Result<Self> {
        if scalar_f.len() != scalar_w.len() {
            return Err(Error::DimensionMismatch {
                expected: scalar_f.len(),
                got: scalar_w.len(),
            });
        }
        for f in &scalar_f {
            if !f.is_convex() {
                return Err(Error::InvalidParameter(
                    "scalar_f entries must be convex".into(),
                ));
            }
        }
        for w in &scalar_w {
            if !w.is_strictly_increasing() {
                return Err(Error::InvalidParameter(
                    "scalar_W entries must be strictly increasing".into(),
                ));
            }
        }
        if !z_cap.is_finite() || z_cap <= 0.0 {
            return Err(Error::InvalidParameter("z_cap must be positive".into()));
        }
        Ok(BudgetSpec {
            kind: BudgetKind::ContinuousSeparable,
            w: Vec::new(),
            scalar_f,
            scalar_w,
            budget,
            z_cap,
        })
    }

    /// Budget used by `x`: knapsack charges the support, the continuous kind
    /// charges `Σ W_i(x_i)`.
    pub fn usage(&self, x: &[f64]) -> f64 {
        match self.kind {
            BudgetKind::SupportKnapsack => x
                .iter()
                .zip(&self.w)
                .filter(|(xi, _)| **xi != 0.0)
                .map(|(_, wi)| wi)
                .sum(),
            BudgetKind::ContinuousSeparable => x
                .iter()
                .zip(&self.scalar_w)
                .map(|(xi, wi)| wi.eval(*xi))
                .sum(),
        }
    }
}

/// The full regularization path, encoded by the minimizer of the single
/// convex problem: thresholding `u_star` above `mu` yields the minimal
/// minimizer of the `mu`-regularized discrete problem.
#[derive(Clone, Debug)]
pub struct ThresholdChain {
    pub u_star: Vec<f64>,
    pub epsilon: f64,
}

/// What the path is solved over: a composite `g + H` with a support
/// knapsack, or a plain penalty `g` with separable scalar profiles.
pub enum PathInstance<'a> {
    Knapsack(&'a CompositeFunction),
    Continuous(&'a SetFunctionHandle),
}

/// Number of subgradient iterations used to localize the breakpoints before
/// they are bisected to full precision.
const LOCALIZE_ITERS: usize = 150;

pub fn solve_regularization_path(
    inst: &PathInstance<'_>,
    budget: &BudgetSpec,
    epsilon: f64,
    tol: f64,
) -> Result<ThresholdChain> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    match (inst, budget.kind) {
        (PathInstance::Knapsack(comp), BudgetKind::SupportKnapsack) => {
            if epsilon < 0.0 {
                return Err(Error::InvalidParameter(
                    "epsilon must be nonnegative".into(),
                ));
            }
            if budget.w.len() != comp.n() {
                return Err(Error::DimensionMismatch {
                    expected: comp.n(),
                    got: budget.w.len(),
                });
            }
            let costs =
                |mu: f64| -> Result<Vec<f64>> { Ok(budget.w.iter().map(|wi| mu * wi).collect()) };
            solve_path_generic(*comp, &costs, Some(&budget.w), epsilon, tol)
        }
        (PathInstance::Continuous(g), BudgetKind::ContinuousSeparable) => {
            if epsilon.is_nan() || epsilon <= 0.0 {
                return Err(Error::InvalidParameter(
                    "continuous budgets need a strictly positive epsilon".into(),
                ));
            }
            if budget.scalar_f.len() != g.ground_size() {
                return Err(Error::DimensionMismatch {
                    expected: g.ground_size(),
                    got: budget.scalar_f.len(),
                });
            }
            let profiles: Vec<ScalarProfile> = budget
                .scalar_f
                .iter()
                .zip(&budget.scalar_w)
                .map(|(f, w)| ScalarProfile::new(*f, *w, budget.z_cap))
                .collect::<Result<_>>()?;
            let costs =
                |mu: f64| -> Result<Vec<f64>> { profiles.iter().map(|p| p.value(mu)).collect() };
            solve_path_generic(*g, &costs, None, epsilon, tol)
        }
        _ => Err(Error::InvalidParameter(
            "budget kind does not match the path instance".into(),
        )),
    }
}

/// Shared path machinery over `F_mu(A) = base(A) + Σ_{i∈A} costs(mu)_i`.
///
/// A projected-subgradient pass with averaging localizes the breakpoints of
/// the convex path objective; each coordinate's breakpoint is then pinned by
/// bisection on the (nested) minimal minimizers of the `mu`-regularized
/// problems.
fn solve_path_generic<F: SetFunction + ?Sized>(
    base: &F,
    costs: &dyn Fn(f64) -> Result<Vec<f64>>,
    knapsack_w: Option<&[f64]>,
    epsilon: f64,
    tol: f64,
) -> Result<ThresholdChain> {
    let n = base.ground_size();
    if n == 0 {
        return Ok(ThresholdChain {
            u_star: Vec::new(),
            epsilon,
        });
    }

    let mut minimizer_cache: HashMap<u64, Subset> = HashMap::new();
    let mut minimal_minimizer = |mu: f64| -> Result<Subset> {
        if let Some(s) = minimizer_cache.get(&mu.to_bits()) {
            return Ok(*s);
        }
        let shifted = ModularShift {
            base,
            costs: costs(mu)?,
        };
        let res = if n <= BRUTE_MIN_CAP {
            minimize_bruteforce(&shifted)?
        } else {
            min_norm_point(&shifted, (tol * 1e-3).min(1e-9), 100 + 4 * n)?
        };
        minimizer_cache.insert(mu.to_bits(), res.minimizer);
        Ok(res.minimizer)
    };

    // Upper limit above which the path is empty.
    let upper = path_upper_bound(base, costs, knapsack_w, epsilon)?;

    // Localization: projected subgradient with averaging on the convex path
    // objective, over the box [0, upper]^n.
    let localized = localize_breakpoints(base, costs, knapsack_w, epsilon, upper)?;

    // Exact breakpoints by bisection on nested minimal minimizers.
    let mut u_star = vec![0.0; n];
    let radius = 0.1 * upper.max(1.0);
    for i in 0..n {
        let guess = localized[i];
        let floor = epsilon;
        if !minimal_minimizer(floor)?.contains(i) {
            u_star[i] = 0.0;
            continue;
        }
        // Invariant: member at lo, not a member at hi.
        let mut lo = (guess - radius).max(floor);
        if !minimal_minimizer(lo)?.contains(i) {
            lo = floor;
        }
        let mut hi = (guess + radius).max(lo + radius);
        let mut guard = 0;
        while minimal_minimizer(hi)?.contains(i) {
            hi = hi * 2.0 + 1.0;
            guard += 1;
            if guard > 60 || hi > 1e13 {
                return Err(Error::PathUnbounded(i));
            }
        }
        while hi - lo > 1e-12 * hi.abs().max(1.0) {
            let mid = 0.5 * (lo + hi);
            if minimal_minimizer(mid)?.contains(i) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // Report the largest confirmed-member value: the strict threshold
        // then classifies exact-tie grid points consistently with the
        // minimal-minimizer convention.
        u_star[i] = lo;
    }
    Ok(ThresholdChain { u_star, epsilon })
}

/// A value of `mu` beyond which the regularized minimizer is empty.
fn path_upper_bound<F: SetFunction + ?Sized>(
    base: &F,
    costs: &dyn Fn(f64) -> Result<Vec<f64>>,
    knapsack_w: Option<&[f64]>,
    epsilon: f64,
) -> Result<f64> {
    let n = base.ground_size();
    match knapsack_w {
        Some(w) => {
            // Any base-polytope point lower-bounds min F'; past that bound the
            // knapsack term keeps every nonempty set above the empty one.
            let identity: Vec<usize> = (0..n).collect();
            let vertex = greedy_base_vertex(base, &identity)?;
            let lower: f64 = vertex.weights.iter().map(|v| v.min(0.0)).sum();
            let w_min = w.iter().cloned().fold(f64::INFINITY, f64::min);
            Ok(((-lower) / w_min).max(epsilon) + 1.0)
        }
        None => {
            // Profiles hit zero at their zero points and stay there; past the
            // largest finite zero point no element can help. Infinite zero
            // points are probed during bisection expansion instead.
            let c = costs(epsilon)?;
            let mut upper = epsilon + 1.0;
            for (i, ci) in c.iter().enumerate() {
                if *ci < 0.0 {
                    // Doubling probe for the exit of coordinate i.
                    let mut mu = epsilon.max(1.0);
                    let mut guard = 0;
                    while costs(mu)?[i] < 0.0 {
                        mu *= 2.0;
                        guard += 1;
                        if guard > 60 {
                            return Err(Error::PathUnbounded(i));
                        }
                    }
                    upper = upper.max(mu);
                }
            }
            Ok(upper)
        }
    }
}

/// Projected subgradient descent with iterate averaging on the convex path
/// objective; returns the averaged iterate (a coarse breakpoint estimate).
fn localize_breakpoints<F: SetFunction + ?Sized>(
    base: &F,
    costs: &dyn Fn(f64) -> Result<Vec<f64>>,
    knapsack_w: Option<&[f64]>,
    epsilon: f64,
    upper: f64,
) -> Result<Vec<f64>> {
    let n = base.ground_size();
    let mut u = vec![0.5 * upper; n];
    let mut avg = vec![0.0; n];
    let mut averaged = 0usize;
    let strong = knapsack_w.map(|w| w.iter().cloned().fold(f64::INFINITY, f64::min));
    for it in 0..LOCALIZE_ITERS {
        let order = descending_order(&u);
        let vertex = greedy_base_vertex(base, &order)?;
        let mut sub = vertex.weights;
        match knapsack_w {
            Some(w) => {
                for i in 0..n {
                    sub[i] += w[i] * u[i];
                }
            }
            None => {
                for i in 0..n {
                    sub[i] += costs(epsilon + u[i])?[i];
                }
            }
        }
        let step = match strong {
            Some(sigma) => 2.0 / (sigma * (it as f64 + 2.0)),
            None => {
                let norm = linalg::norm_sq(&sub).sqrt().max(1e-12);
                upper / (norm * (it as f64 + 1.0).sqrt())
            }
        };
        for i in 0..n {
            u[i] = (u[i] - step * sub[i]).clamp(0.0, upper);
        }
        if it >= LOCALIZE_ITERS / 2 {
            for i in 0..n {
                avg[i] += u[i];
            }
            averaged += 1;
        }
    }
    for v in &mut avg {
        *v /= averaged.max(1) as f64;
    }
    Ok(avg)
}

/// Adds a modular cost vector to a base set function.
struct ModularShift<'a, F: SetFunction + ?Sized> {
    base: &'a F,
    costs: Vec<f64>,
}

impl<F: SetFunction + ?Sized> SetFunction for ModularShift<'_, F> {
    fn ground_size(&self) -> usize {
        self.base.ground_size()
    }

    fn eval(&self, s: &Subset) -> Result<f64> {
        let modular: f64 = s.iter().map(|i| self.costs[i]).sum();
        Ok(self.base.eval(s)? + modular)
    }
}

/// The thresholded set `{ i : u*_i > mu }`, the minimal minimizer of the
/// `mu`-regularized problem for every `mu` on the path.
pub fn threshold_chain(chain: &ThresholdChain, mu: f64) -> Result<Subset> {
    if mu < chain.epsilon {
        return Err(Error::InvalidParameter(format!(
            "mu = {mu} is below the path floor epsilon = {}",
            chain.epsilon
        )));
    }
    let n = chain.u_star.len();
    Ok(Subset::from_indices(
        n,
        (0..n).filter(|&i| chain.u_star[i] > mu),
    ))
}

/// Scans the grid of regularization strengths and returns the budget-feasible
/// recovered solution with the best original objective, breaking ties toward
/// larger `mu` (smaller supports).
pub fn select_under_budget(
    chain: &ThresholdChain,
    comp: &CompositeFunction,
    budget: &BudgetSpec,
    grid: &[f64],
) -> Result<(Subset, InnerSolution)> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("mu grid is empty".into()));
    }
    if grid.iter().any(|mu| *mu < chain.epsilon) {
        return Err(Error::InvalidParameter(
            "grid values must be at or above epsilon".into(),
        ));
    }
    let n = comp.n();
    let mut best: Option<(f64, f64, Subset, InnerSolution)> = None;
    let mut least_violation: Option<(f64, Subset)> = None;
    for &mu in grid {
        let set = threshold_chain(chain, mu)?;
        let sol = comp.recover_primal(&set)?;
        let usage = budget.usage(&sol.x);
        if usage <= budget.budget {
            let objective = comp.fspec().eval(&sol.x) + comp.g().eval(&support(n, &sol.x))?;
            let better = match &best {
                None => true,
                Some((bo, bmu, _, _)) => objective < *bo || (objective == *bo && mu > *bmu),
            };
            if better {
                best = Some((objective, mu, set, sol));
            }
        } else {
            let excess = usage - budget.budget;
            if least_violation.as_ref().is_none_or(|(e, _)| excess < *e) {
                least_violation = Some((excess, set));
            }
        }
    }
    match best {
        Some((_, _, set, sol)) => Ok((set, sol)),
        None => {
            let (violation, candidate) = least_violation.unwrap();
            Err(Error::NoFeasibleBudget {
                candidate: candidate.to_string(),
                violation,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::{QuadraticSpec, SignMode};
    use crate::linalg::Matrix;

    fn two_target_composite() -> CompositeFunction {
        let spec = QuadraticSpec::new(
            Matrix::identity(2),
            vec![-2.0, -4.0],
            5.0,
            SignMode::Nonnegative,
        )
        .unwrap();
        CompositeFunction::new(spec, SetFunctionHandle::new(2, |s| s.cardinality() as f64)).unwrap()
    }

    #[test]
    fn scalar_h_closed_forms() {
        let f = ScalarFn::Quadratic { a: 1.0, b: -2.0 };
        let w = ScalarFn::Linear { c: 1.0 };
        assert!((scalar_h(&f, &w, 0.0, 10.0).unwrap() + 1.0).abs() < 1e-12);
        assert!((scalar_h(&f, &w, 1.0, 10.0).unwrap() + 0.25).abs() < 1e-12);
        assert_eq!(scalar_h(&f, &w, 2.0, 10.0).unwrap(), 0.0);
        assert!(scalar_h(&f, &w, 1.0, 0.0).is_err());
    }

    #[test]
    fn scalar_h_matches_grid_oracle() {
        let f = ScalarFn::Quadratic { a: 1.0, b: -2.0 };
        let w = ScalarFn::Linear { c: 1.0 };
        for mu in [0.0, 0.5, 1.0, 1.7, 2.0, 3.5] {
            let exact = scalar_h(&f, &w, mu, 10.0).unwrap();
            let mut grid_min = f64::INFINITY;
            for k in 0..=10_000 {
                let z = 10.0 * k as f64 / 10_000.0;
                grid_min = grid_min.min(f.eval(z) + mu * w.eval(z));
            }
            assert!((exact - grid_min.min(0.0)).abs() < 1e-6, "mu = {mu}");
        }
    }

    #[test]
    fn profile_is_monotone_with_zero_tail() {
        let profile = ScalarProfile::new(
            ScalarFn::Quadratic { a: 1.0, b: -2.0 },
            ScalarFn::Linear { c: 1.0 },
            10.0,
        )
        .unwrap();
        assert!((profile.zero_point - 2.0).abs() < 1e-12);
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=100 {
            let mu = 4.0 * k as f64 / 100.0;
            let h = profile.value(mu).unwrap();
            assert!(h <= 0.0);
            assert!(h >= prev - 1e-12);
            if mu >= profile.zero_point {
                assert!(h.abs() <= 1e-9);
            }
            prev = h;
        }
    }

    #[test]
    fn threshold_chain_examples() {
        let chain = ThresholdChain {
            u_star: vec![0.7, 0.2, 0.9],
            epsilon: 0.0,
        };
        assert_eq!(
            threshold_chain(&chain, 0.5).unwrap(),
            Subset::from_indices(3, [0, 2])
        );
        assert_eq!(threshold_chain(&chain, 1.0).unwrap(), Subset::empty(3));
        assert_eq!(
            threshold_chain(&chain, 0.0).unwrap(),
            Subset::from_indices(3, [0, 1, 2])
        );
        let floored = ThresholdChain {
            u_star: vec![0.7],
            epsilon: 0.5,
        };
        assert!(threshold_chain(&floored, 0.2).is_err());
    }

    #[test]
    fn knapsack_path_matches_direct_solves() {
        let comp = two_target_composite();
        let budget = BudgetSpec::knapsack(vec![1.0, 1.0], f64::INFINITY).unwrap();
        let chain =
            solve_regularization_path(&PathInstance::Knapsack(&comp), &budget, 0.0, 1e-6).unwrap();
        assert!(chain.u_star.iter().all(|u| *u >= 0.0));
        for k in 0..20 {
            let mu = 3.0 * k as f64 / 19.0;
            let direct = minimize_bruteforce(&ModularShift {
                base: &comp,
                costs: vec![mu, mu],
            })
            .unwrap();
            let thresholded = threshold_chain(&chain, mu).unwrap();
            assert_eq!(thresholded, direct.minimizer, "mu = {mu}");
        }
    }

    #[test]
    fn knapsack_path_sets_are_nested() {
        let comp = two_target_composite();
        let budget = BudgetSpec::knapsack(vec![0.7, 1.3], f64::INFINITY).unwrap();
        let chain =
            solve_regularization_path(&PathInstance::Knapsack(&comp), &budget, 0.0, 1e-6).unwrap();
        let mut prev = threshold_chain(&chain, 0.0).unwrap();
        for k in 1..25 {
            let mu = 4.0 * k as f64 / 24.0;
            let cur = threshold_chain(&chain, mu).unwrap();
            assert!(cur.is_subset_of(&prev), "nesting broken at mu = {mu}");
            prev = cur;
        }
    }

    #[test]
    fn continuous_path_thresholds_match_direct_solves() {
        // Separable f over 3 coordinates with distinct exit points.
        let g = SetFunctionHandle::new(3, |s| 0.4 * s.cardinality() as f64);
        let scalar_f = vec![
            ScalarFn::Quadratic { a: 1.0, b: -2.0 },
            ScalarFn::Quadratic { a: 1.0, b: -3.0 },
            ScalarFn::Quadratic { a: 1.0, b: -1.0 },
        ];
        let scalar_w = vec![ScalarFn::Linear { c: 1.0 }; 3];
        let budget = BudgetSpec::continuous(scalar_f.clone(), scalar_w.clone(), 1.0, 10.0).unwrap();
        let chain =
            solve_regularization_path(&PathInstance::Continuous(&g), &budget, 1e-6, 1e-6).unwrap();
        for k in 0..15 {
            let mu = 1e-6 + 3.0 * k as f64 / 14.0;
            let costs: Vec<f64> = scalar_f
                .iter()
                .zip(&scalar_w)
                .map(|(f, w)| scalar_h(f, w, mu, 10.0).unwrap())
                .collect();
            let direct = minimize_bruteforce(&ModularShift { base: &g, costs }).unwrap();
            let thresholded = threshold_chain(&chain, mu).unwrap();
            assert_eq!(thresholded, direct.minimizer, "mu = {mu}");
        }
    }

    #[test]
    fn continuous_path_requires_positive_epsilon() {
        let g = SetFunctionHandle::zero(2);
        let budget = BudgetSpec::continuous(
            vec![ScalarFn::Linear { c: -1.0 }; 2],
            vec![ScalarFn::Linear { c: 1.0 }; 2],
            1.0,
            1.0,
        )
        .unwrap();
        assert!(
            solve_regularization_path(&PathInstance::Continuous(&g), &budget, 0.0, 1e-6).is_err()
        );
    }

    #[test]
    fn mismatched_budget_kind_is_rejected() {
        let comp = two_target_composite();
        let budget = BudgetSpec::continuous(
            vec![ScalarFn::Linear { c: -1.0 }; 2],
            vec![ScalarFn::Linear { c: 1.0 }; 2],
            1.0,
            1.0,
        )
        .unwrap();
        assert!(
            solve_regularization_path(&PathInstance::Knapsack(&comp), &budget, 0.0, 1e-6).is_err()
        );
    }

    #[test]
    fn select_with_infinite_budget_takes_best_objective() {
        let comp = two_target_composite();
        let budget = BudgetSpec::knapsack(vec![1.0, 1.0], f64::INFINITY).unwrap();
        let chain =
            solve_regularization_path(&PathInstance::Knapsack(&comp), &budget, 0.0, 1e-6).unwrap();
        let grid: Vec<f64> = (0..10).map(|k| 3.0 * k as f64 / 9.0).collect();
        let (set, sol) = select_under_budget(&chain, &comp, &budget, &grid).unwrap();
        // Unconstrained optimum puts x2 = 2 with support {1}.
        assert_eq!(set, Subset::singleton(2, 1));
        assert!((sol.x[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn select_with_zero_budget_returns_origin() {
        let comp = two_target_composite();
        let budget = BudgetSpec::knapsack(vec![1.0, 1.0], 0.0).unwrap();
        let chain =
            solve_regularization_path(&PathInstance::Knapsack(&comp), &budget, 0.0, 1e-6).unwrap();
        let grid: Vec<f64> = (0..12).map(|k| 4.0 * k as f64 / 11.0).collect();
        let (_, sol) = select_under_budget(&chain, &comp, &budget, &grid).unwrap();
        assert!(sol.x.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn select_reports_least_violation_when_infeasible() {
        let comp = two_target_composite();
        let budget = BudgetSpec::knapsack(vec![1.0, 1.0], 0.5).unwrap();
        let chain =
            solve_regularization_path(&PathInstance::Knapsack(&comp), &budget, 0.0, 1e-6).unwrap();
        // Grid only over small mu, where supports are nonempty.
        let grid = vec![0.0, 0.1];
        match select_under_budget(&chain, &comp, &budget, &grid) {
            Err(Error::NoFeasibleBudget { violation, .. }) => assert!(violation > 0.0),
            other => panic!("expected infeasible-budget error, got {other:?}"),
        }
    }
}
