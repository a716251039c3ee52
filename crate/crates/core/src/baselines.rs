//! The two comparison algorithms: projected subgradient descent on the
//! Lovász extension over the unit cube, and discretized minimization on a
//! product lattice driven by pairwise Frank-Wolfe.

use crate::error::{Error, Result};
use crate::inner::QuadraticSpec;
use crate::lattice::{descending_order, SetFunction, SetFunctionHandle};
use crate::linalg;
use crate::sfm::SfmResult;
use crate::subset::Subset;
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;

/// Uniform grid over a per-dimension box.
#[derive(Clone, Debug)]
pub struct DiscretizationGrid {
    pub k: usize,
    pub box_lo: Vec<f64>,
    pub box_hi: Vec<f64>,
}

/// Refuse grids with more than this many slots (`n * (k - 1)`).
pub const GRID_SLOT_CAP: usize = 4_000_000;

impl DiscretizationGrid {
    pub fn new(k: usize, box_lo: Vec<f64>, box_hi: Vec<f64>) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(
                "grid needs at least two points per dimension".into(),
            ));
        }
        if box_lo.len() != box_hi.len() {
            return Err(Error::DimensionMismatch {
                expected: box_lo.len(),
                got: box_hi.len(),
            });
        }
        if box_lo
            .iter()
            .zip(&box_hi)
            .any(|(lo, hi)| lo.is_nan() || hi.is_nan() || lo >= hi)
        {
            return Err(Error::InvalidParameter(
                "box_lo must be elementwise below box_hi".into(),
            ));
        }
        Ok(DiscretizationGrid { k, box_lo, box_hi })
    }

    /// Uniform grid on `[0, 1]^n`.
    pub fn unit(n: usize, k: usize) -> Result<Self> {
        DiscretizationGrid::new(k, vec![0.0; n], vec![1.0; n])
    }

    /// Uniform grid on `[-1, 1]^n`.
    pub fn symmetric(n: usize, k: usize) -> Result<Self> {
        DiscretizationGrid::new(k, vec![-1.0; n], vec![1.0; n])
    }

    fn n(&self) -> usize {
        self.box_lo.len()
    }

    fn step(&self, i: usize) -> f64 {
        (self.box_hi[i] - self.box_lo[i]) / (self.k - 1) as f64
    }

    fn value(&self, i: usize, level: usize) -> f64 {
        self.box_lo[i] + level as f64 * self.step(i)
    }

    /// Grid level whose value is (numerically) zero, if one exists.
    fn zero_level(&self, i: usize) -> Option<usize> {
        let step = self.step(i);
        if self.box_lo[i] > 1e-12 || self.box_hi[i] < -1e-12 {
            return None;
        }
        let level = (-self.box_lo[i] / step).round() as usize;
        let level = level.min(self.k - 1);
        (self.value(i, level).abs() <= 1e-9 * step.abs().max(1.0)).then_some(level)
    }
}

/// One solver progress sample.
#[derive(Clone, Debug)]
pub struct TraceRow {
    pub iteration: usize,
    pub objective: f64,
    pub elapsed: f64,
}

/// Projected subgradient descent on the Lovász extension over `[0, 1]^n`,
/// with Polyak steps targeting the best value seen so far (minus a vanishing
/// margin). The reported set is the best level set of any iterate.
pub fn pgd_lovasz_minimize<F: SetFunction + ?Sized>(
    f: &F,
    max_iter: usize,
    tol: f64,
) -> Result<(SfmResult, Vec<TraceRow>)> {
    if max_iter == 0 {
        return Err(Error::InvalidParameter("max_iter must be positive".into()));
    }
    let n = f.ground_size();
    let start = Instant::now();
    let mut evals: u64 = 0;
    let mut eval = |s: &Subset| -> Result<f64> {
        evals += 1;
        let v = f.eval(s)?;
        if !v.is_finite() {
            return Err(Error::NonFiniteValue(s.to_string()));
        }
        Ok(v)
    };

    let f_empty = eval(&Subset::empty(n))?;
    if n == 0 {
        let result = SfmResult {
            minimizer: Subset::empty(0),
            value: f_empty,
            gap_certificate: 0.0,
            evaluations: evals,
            iterations: 0,
            converged: true,
        };
        return Ok((result, Vec::new()));
    }

    let mut u = vec![0.5; n];
    let mut best_phi = f64::INFINITY;
    let mut best: Option<(Subset, f64)> = None;
    let mut best_lower = f64::NEG_INFINITY;
    let mut trace = Vec::with_capacity(max_iter);
    let mut iterations = 0;

    for it in 0..max_iter {
        iterations = it + 1;

        // One prefix-chain pass yields the extension value, a subgradient,
        // and the level-set rounding candidates.
        let order = descending_order(&u);
        let mut subgrad = vec![0.0; n];
        let mut prefix = Subset::empty(n);
        let mut prev = f_empty;
        let mut phi = f_empty;
        let mut round_best = (Subset::empty(n), f_empty);
        for &i in &order {
            prefix.insert(i);
            let cur = eval(&prefix)?;
            subgrad[i] = cur - prev;
            phi += u[i] * (cur - prev);
            prev = cur;
            if cur < round_best.1
                || (cur == round_best.1 && prefix.cardinality() < round_best.0.cardinality())
            {
                round_best = (prefix, cur);
            }
        }
        update_candidate(&mut best, round_best.0, round_best.1);
        best_phi = best_phi.min(phi);
        let lower: f64 = subgrad.iter().map(|v| v.min(0.0)).sum();
        best_lower = best_lower.max(lower);

        trace.push(TraceRow {
            iteration: it,
            objective: round_best.1,
            elapsed: start.elapsed().as_secs_f64(),
        });

        let norm_sq = linalg::norm_sq(&subgrad);
        if norm_sq == 0.0 {
            break;
        }
        let margin = 1.0 / (it as f64 + 1.0);
        let step = (phi - (best_phi - margin)) / norm_sq;
        for (ui, si) in u.iter_mut().zip(&subgrad) {
            *ui = (*ui - step * si).clamp(0.0, 1.0);
        }
    }

    let (minimizer, _) = best.expect("at least one rounding candidate");
    let value = eval(&minimizer)?;
    let gap = ((value - f_empty) - best_lower).max(0.0);
    let result = SfmResult {
        minimizer,
        value,
        gap_certificate: gap,
        evaluations: evals,
        iterations,
        converged: gap <= tol || iterations == max_iter,
    };
    Ok((result, trace))
}

fn update_candidate(best: &mut Option<(Subset, f64)>, s: Subset, v: f64) {
    let replace = match best {
        None => true,
        Some((bs, bv)) => {
            v < *bv
                || (v == *bv
                    && (s.cardinality() < bs.cardinality()
                        || (s.cardinality() == bs.cardinality() && s < *bs)))
        }
    };
    if replace {
        *best = Some((s, v));
    }
}

/// Minimizes the discretized objective `f(x) + g(supp(x))` over the grid via
/// pairwise Frank-Wolfe on the minimum-norm problem of the product-lattice
/// base polytope. Grid functions are kept coordinate-wise; the `k^n` lattice
/// is never materialized.
///
/// Returns the best grid point found, its objective value, and the trace.
pub fn discretized_fw_minimize(
    fspec: &QuadraticSpec,
    g: &SetFunctionHandle,
    grid: &DiscretizationGrid,
    max_iter: usize,
) -> Result<(Vec<f64>, f64, Vec<TraceRow>)> {
    let n = fspec.n();
    if grid.n() != n || g.ground_size() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: grid.n(),
        });
    }
    let per_dim = grid.k - 1;
    let slots = n * per_dim;
    if slots > GRID_SLOT_CAP {
        return Err(Error::InvalidParameter(format!(
            "grid with {slots} slots exceeds the cap of {GRID_SLOT_CAP}"
        )));
    }
    let start = Instant::now();
    let zero_levels: Vec<Option<usize>> = (0..n).map(|i| grid.zero_level(i)).collect();

    let chain = ChainEvaluator {
        fspec,
        g,
        grid,
        zero_levels: &zero_levels,
    };

    // First vertex: all slot costs tied at zero.
    let mut best = ChainBest::empty(n);
    let zeros = vec![0.0; slots];
    let v0 = chain.greedy_vertex(&zeros, &mut best)?;
    let mut point = v0.clone();
    let mut active: Vec<(Vec<f64>, f64)> = vec![(v0, 1.0)];
    let mut trace = Vec::new();

    for it in 0..max_iter {
        let s = chain.greedy_vertex(&point, &mut best)?;
        let fw_gap = linalg::norm_sq(&point) - linalg::dot(&point, &s);

        // Away vertex: active atom most aligned with the current point.
        let away_idx = (0..active.len())
            .max_by(|&a, &b| {
                linalg::dot(&point, &active[a].0)
                    .partial_cmp(&linalg::dot(&point, &active[b].0))
                    .unwrap()
                    .then(b.cmp(&a))
            })
            .unwrap();

        let dir: Vec<f64> = s
            .iter()
            .zip(&active[away_idx].0)
            .map(|(si, ai)| si - ai)
            .collect();
        let denom = linalg::norm_sq(&dir);
        let mass = active[away_idx].1;
        let gamma = if denom > 0.0 {
            (-linalg::dot(&point, &dir) / denom).clamp(0.0, mass)
        } else {
            0.0
        };

        if gamma > 0.0 {
            for (pi, di) in point.iter_mut().zip(&dir) {
                *pi += gamma * di;
            }
            active[away_idx].1 -= gamma;
            match active
                .iter_mut()
                .find(|(v, _)| max_abs_diff(v, &s) <= 1e-12)
            {
                Some((_, wgt)) => *wgt += gamma,
                None => active.push((s, gamma)),
            }
            active.retain(|(_, wgt)| *wgt > 1e-12);
        }

        // Rounding candidate: per-coordinate count of negative slot weights.
        let levels: Vec<usize> = (0..n)
            .map(|i| {
                (0..per_dim)
                    .filter(|&j| point[i * per_dim + j] < 0.0)
                    .count()
            })
            .collect();
        let value = chain.eval_levels(&levels)?;
        best.offer(&levels, value);

        trace.push(TraceRow {
            iteration: it,
            objective: value,
            elapsed: start.elapsed().as_secs_f64(),
        });

        let scale = linalg::norm_sq(&point).max(1.0);
        if fw_gap <= 1e-10 * scale || gamma == 0.0 {
            break;
        }
    }

    chain.polish(&mut best)?;
    let x = best
        .levels
        .iter()
        .enumerate()
        .map(|(i, &l)| grid.value(i, l))
        .collect();
    Ok((x, best.value, trace))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Best grid point seen so far, by objective value.
struct ChainBest {
    levels: Vec<usize>,
    value: f64,
}

impl ChainBest {
    fn empty(n: usize) -> Self {
        ChainBest {
            levels: vec![0; n],
            value: f64::INFINITY,
        }
    }

    fn offer(&mut self, levels: &[usize], value: f64) {
        if value < self.value {
            self.levels = levels.to_vec();
            self.value = value;
        }
    }
}

/// Incremental evaluation of the discretized objective along greedy chains.
struct ChainEvaluator<'a> {
    fspec: &'a QuadraticSpec,
    g: &'a SetFunctionHandle,
    grid: &'a DiscretizationGrid,
    zero_levels: &'a [Option<usize>],
}

impl ChainEvaluator<'_> {
    fn support(&self, levels: &[usize]) -> Subset {
        let n = levels.len();
        Subset::from_indices(
            n,
            (0..n).filter(|&i| self.zero_levels[i].is_none_or(|z| levels[i] != z)),
        )
    }

    fn eval_levels(&self, levels: &[usize]) -> Result<f64> {
        let x: Vec<f64> = levels
            .iter()
            .enumerate()
            .map(|(i, &l)| self.grid.value(i, l))
            .collect();
        Ok(self.fspec.eval(&x) + self.g.eval(&self.support(levels))?)
    }

    /// Greedy vertex of the product-lattice base polytope for slot costs `c`:
    /// raises slots in ascending cost order subject to each coordinate being
    /// raised level by level, and records the objective marginals.
    ///
    /// Within a coordinate a cheaper slot cannot be reached before a more
    /// expensive lower one, so the costs are first replaced by their isotonic
    /// (pool-adjacent-violators) regression along each chain; pooled blocks
    /// are then raised contiguously.
    ///
    /// The `f` part of each marginal is updated in O(n) via the running
    /// gradient; `g` is re-evaluated only when the support changes.
    fn greedy_vertex(&self, c: &[f64], best: &mut ChainBest) -> Result<Vec<f64>> {
        let n = self.grid.n();
        let per_dim = self.grid.k - 1;
        let mut levels = vec![0usize; n];
        let mut x: Vec<f64> = (0..n).map(|i| self.grid.value(i, 0)).collect();
        let mut qx = self.fspec.q().matvec(&x);
        let mut supp = self.support(&levels);
        let mut g_val = self.g.eval(&supp)?;
        let mut total = self.fspec.eval(&x) + g_val;
        best.offer(&levels, total);

        let pooled = pooled_costs(c, n, per_dim);
        let mut w = vec![0.0; n * per_dim];
        let mut heap: BinaryHeap<Reverse<(u64, usize)>> = BinaryHeap::new();
        for i in 0..n {
            if per_dim > 0 {
                heap.push(Reverse((total_order_key(pooled[i * per_dim]), i * per_dim)));
            }
        }
        while let Some(Reverse((_, slot))) = heap.pop() {
            let i = slot / per_dim;
            let j = slot % per_dim;
            debug_assert_eq!(levels[i], j);
            let a = self.grid.value(i, j);
            let b = self.grid.value(i, j + 1);
            let d = b - a;
            // f marginal of raising coordinate i from a to b.
            let df = 2.0 * d * qx[i] + d * d * self.fspec.q()[(i, i)] + self.fspec.p()[i] * d;
            for (q_i, row) in qx.iter_mut().zip(0..) {
                *q_i += d * self.fspec.q()[(row, i)];
            }
            x[i] = b;
            levels[i] = j + 1;
            let mut dg = 0.0;
            let in_supp_now = self.zero_levels[i].is_none_or(|z| levels[i] != z);
            if in_supp_now != supp.contains(i) {
                let new_supp = if in_supp_now {
                    supp.with(i)
                } else {
                    supp.without(i)
                };
                let new_g = self.g.eval(&new_supp)?;
                dg = new_g - g_val;
                g_val = new_g;
                supp = new_supp;
            }
            w[slot] = df + dg;
            total += df + dg;
            if !total.is_finite() {
                return Err(Error::NonFiniteValue(format!(
                    "grid point at levels {levels:?}"
                )));
            }
            best.offer(&levels, total);
            if j + 1 < per_dim {
                heap.push(Reverse((total_order_key(pooled[slot + 1]), slot + 1)));
            }
        }
        Ok(w)
    }

    /// Candidate levels for one coordinate holding the others fixed: its
    /// neighbors, the zero level, and the grid levels bracketing the
    /// unconstrained scalar minimizer of `f` along that coordinate.
    fn candidate_levels(&self, i: usize, levels: &[usize], qx: &[f64]) -> Vec<usize> {
        let per_dim = self.grid.k - 1;
        let cur = levels[i];
        let mut cands = Vec::with_capacity(6);
        if cur > 0 {
            cands.push(cur - 1);
        }
        if cur < per_dim {
            cands.push(cur + 1);
        }
        if let Some(z) = self.zero_levels[i] {
            cands.push(z);
        }
        let qii = self.fspec.q()[(i, i)];
        if qii > 0.0 {
            // Stationary point of f in coordinate i given the rest.
            let xi = self.grid.value(i, cur);
            let rest = qx[i] - qii * xi;
            let t = -(self.fspec.p()[i] / 2.0 + rest) / qii;
            let step = self.grid.step(i);
            let frac = (t - self.grid.box_lo[i]) / step;
            if frac.is_finite() {
                let lo = frac.floor().clamp(0.0, (self.grid.k - 1) as f64) as usize;
                cands.push(lo);
                cands.push((lo + 1).min(self.grid.k - 1));
            }
        }
        cands.sort_unstable();
        cands.dedup();
        cands.retain(|&l| l != cur);
        cands
    }

    /// Greedy coordinate moves over the grid until no candidate improves the
    /// objective: polishes the rounded Frank-Wolfe point to a grid-local
    /// minimum.
    fn polish(&self, best: &mut ChainBest) -> Result<()> {
        let n = self.grid.n();
        if !best.value.is_finite() {
            return Ok(());
        }
        let mut levels = best.levels.clone();
        let mut x: Vec<f64> = (0..n).map(|i| self.grid.value(i, levels[i])).collect();
        let mut qx = self.fspec.q().matvec(&x);
        let mut value = best.value;
        for _ in 0..200 {
            let mut improved = false;
            for i in 0..n {
                for cand in self.candidate_levels(i, &levels, &qx) {
                    let old = levels[i];
                    levels[i] = cand;
                    let trial = {
                        let old_xi = x[i];
                        x[i] = self.grid.value(i, cand);
                        let v = self.fspec.eval(&x) + self.g.eval(&self.support(&levels))?;
                        x[i] = old_xi;
                        v
                    };
                    if trial < value - 1e-15 * value.abs().max(1.0) {
                        let new_xi = self.grid.value(i, cand);
                        let d = new_xi - x[i];
                        for (q_i, row) in qx.iter_mut().zip(0..) {
                            *q_i += d * self.fspec.q()[(row, i)];
                        }
                        x[i] = new_xi;
                        value = trial;
                        improved = true;
                    } else {
                        levels[i] = old;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        best.offer(&levels, value);
        Ok(())
    }
}

/// Isotonic (nondecreasing) regression of the costs along each coordinate's
/// chain of slots, by pool-adjacent-violators.
fn pooled_costs(c: &[f64], n: usize, per_dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; c.len()];
    // (block mean, block length) stack per coordinate.
    let mut stack: Vec<(f64, usize)> = Vec::with_capacity(per_dim);
    for i in 0..n {
        stack.clear();
        for j in 0..per_dim {
            let mut mean = c[i * per_dim + j];
            let mut len = 1usize;
            while let Some(&(prev_mean, prev_len)) = stack.last() {
                if prev_mean > mean {
                    stack.pop();
                    mean =
                        (prev_mean * prev_len as f64 + mean * len as f64) / (prev_len + len) as f64;
                    len += prev_len;
                } else {
                    break;
                }
            }
            stack.push((mean, len));
        }
        let mut j = 0;
        for &(mean, len) in &stack {
            for _ in 0..len {
                out[i * per_dim + j] = mean;
                j += 1;
            }
        }
    }
    out
}

/// Order-preserving map from finite `f64` to `u64` for heap keys.
fn total_order_key(v: f64) -> u64 {
    let bits = v.to_bits();
    if v >= 0.0 {
        bits ^ 0x8000_0000_0000_0000
    } else {
        !bits
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::{CompositeFunction, SignMode};
    use crate::linalg::Matrix;
    use crate::models::{gen_regression_instance, range_penalty_g};
    use crate::sfm::{min_norm_point, minimize_bruteforce};

    #[test]
    fn pgd_on_modular_function() {
        let f = SetFunctionHandle::modular(vec![-1.0, 2.0, -3.0]);
        let (res, trace) = pgd_lovasz_minimize(&f, 50, 1e-6).unwrap();
        assert_eq!(res.minimizer, Subset::from_indices(3, [0, 2]));
        assert!((res.value + 4.0).abs() < 1e-12);
        assert!(!trace.is_empty());
    }

    #[test]
    fn pgd_matches_bruteforce_on_composite() {
        let spec = crate::inner::QuadraticSpec::new(
            Matrix::identity(2),
            vec![-2.0, -4.0],
            5.0,
            SignMode::Nonnegative,
        )
        .unwrap();
        let comp =
            CompositeFunction::new(spec, SetFunctionHandle::new(2, |s| s.cardinality() as f64))
                .unwrap();
        let (res, _) = pgd_lovasz_minimize(&comp, 100, 1e-6).unwrap();
        let exact = minimize_bruteforce(&comp).unwrap();
        assert_eq!(res.minimizer, exact.minimizer);
        assert!((res.value - exact.value).abs() < 1e-9);
    }

    #[test]
    fn pgd_rejects_zero_iterations() {
        let f = SetFunctionHandle::zero(2);
        assert!(pgd_lovasz_minimize(&f, 0, 1e-4).is_err());
    }

    #[test]
    fn pgd_agrees_with_min_norm_on_seeded_instances() {
        for seed in 0..3 {
            let inst = gen_regression_instance(8, seed, 0.05).unwrap();
            let g = range_penalty_g(8, 0.05).unwrap();
            let comp = CompositeFunction::new(inst.fspec.clone(), g).unwrap();
            let (pgd, _) = pgd_lovasz_minimize(&comp, 300, 1e-6).unwrap();
            let mn = min_norm_point(&comp, 1e-9, 200).unwrap();
            assert!((pgd.value - mn.value).abs() < 1e-4, "seed {seed}");
            assert!(
                pgd.value >= mn.value - 1e-9,
                "pgd cannot beat the exact solver"
            );
        }
    }

    #[test]
    fn pgd_trace_best_so_far_is_nonincreasing() {
        let inst = gen_regression_instance(6, 1, 0.05).unwrap();
        let comp = CompositeFunction::new(inst.fspec.clone(), inst.g()).unwrap();
        let (_, trace) = pgd_lovasz_minimize(&comp, 60, 1e-6).unwrap();
        let mut best = f64::INFINITY;
        let mut prev_elapsed = 0.0;
        for row in &trace {
            let new_best = best.min(row.objective);
            assert!(new_best <= best);
            best = new_best;
            assert!(row.elapsed >= prev_elapsed);
            prev_elapsed = row.elapsed;
        }
    }

    #[test]
    fn grid_validation() {
        assert!(DiscretizationGrid::new(1, vec![0.0], vec![1.0]).is_err());
        assert!(DiscretizationGrid::new(5, vec![0.0], vec![0.0]).is_err());
        assert!(DiscretizationGrid::unit(3, 11).is_ok());
    }

    #[test]
    fn discretized_recovers_separable_grid_optimum() {
        // f separable with minimizer exactly on a grid node, no penalty.
        let n = 3;
        let q = Matrix::identity(n);
        let targets = [0.3, 0.7, 0.0];
        let p: Vec<f64> = targets.iter().map(|t| -2.0 * t).collect();
        let offset: f64 = targets.iter().map(|t| t * t).sum();
        let fspec = crate::inner::QuadraticSpec::new(q, p, offset, SignMode::Nonnegative).unwrap();
        let g = SetFunctionHandle::zero(n);
        let grid = DiscretizationGrid::unit(n, 11).unwrap();
        let (x, value, _) = discretized_fw_minimize(&fspec, &g, &grid, 100).unwrap();
        for (xi, ti) in x.iter().zip(&targets) {
            assert!((xi - ti).abs() < 1e-12, "{x:?}");
        }
        assert!(value.abs() < 1e-12);
    }

    #[test]
    fn discretized_constant_zero_function() {
        let n = 2;
        let fspec = crate::inner::QuadraticSpec::new(
            Matrix::zeros(n, n),
            vec![0.0; n],
            0.0,
            SignMode::Nonnegative,
        )
        .unwrap();
        let g = SetFunctionHandle::zero(n);
        let grid = DiscretizationGrid::unit(n, 5).unwrap();
        let (_, value, _) = discretized_fw_minimize(&fspec, &g, &grid, 10).unwrap();
        assert_eq!(value, 0.0);
    }

    #[test]
    fn discretized_gap_is_nonnegative() {
        for seed in 0..3 {
            let inst = gen_regression_instance(5, seed, 0.05).unwrap();
            let g = range_penalty_g(5, 0.05).unwrap();
            let comp = CompositeFunction::new(inst.fspec.clone(), g).unwrap();
            let exact = minimize_bruteforce(&comp).unwrap();
            let x_exact = comp.recover_primal(&exact.minimizer).unwrap();
            let best_obj = inst.fspec.eval(&x_exact.x)
                + comp
                    .g()
                    .eval(&crate::inner::support(5, &x_exact.x))
                    .unwrap();

            let g2 = range_penalty_g(5, 0.05).unwrap();
            let grid = DiscretizationGrid::unit(5, 31).unwrap();
            let (_, value, trace) = discretized_fw_minimize(&inst.fspec, &g2, &grid, 200).unwrap();
            assert!(
                value >= best_obj - 1e-9,
                "seed {seed}: {value} < {best_obj}"
            );
            let mut best_so_far = f64::INFINITY;
            let mut prev_elapsed = 0.0;
            for row in &trace {
                assert!(row.objective.is_finite());
                best_so_far = best_so_far.min(row.objective);
                assert!(row.elapsed >= prev_elapsed);
                prev_elapsed = row.elapsed;
            }
            assert!(best_so_far >= best_obj - 1e-9);
        }
    }

    #[test]
    fn discretized_refuses_oversized_grids() {
        let fspec = crate::inner::QuadraticSpec::new(
            Matrix::zeros(1, 1),
            vec![0.0],
            0.0,
            SignMode::Nonnegative,
        )
        .unwrap();
        let g = SetFunctionHandle::zero(1);
        let grid = DiscretizationGrid::unit(1, GRID_SLOT_CAP + 2).unwrap();
        assert!(discretized_fw_minimize(&fspec, &g, &grid, 10).is_err());
    }
}
