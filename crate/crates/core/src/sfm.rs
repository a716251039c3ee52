//! Exact submodular set-function minimization: a brute-force oracle, the
//! Fujishige–Wolfe minimum-norm point algorithm on the base polytope, and
//! semigradient lattice pruning.

use crate::error::{Error, Result};
use crate::lattice::{descending_order, SetFunction};
use crate::linalg::{self, Matrix};
use crate::subset::Subset;
use std::time::Instant;

/// Brute-force cap for [`minimize_bruteforce`] (cost `2^n` evaluations).
pub const BRUTE_MIN_CAP: usize = 16;

/// Numerical-rank tolerance for the affine minimization over the corral, and
/// the threshold below which corral weights are dropped.
const CORRAL_TOL: f64 = 1e-12;

/// Relative width of the zero band when thresholding the min-norm point:
/// coordinates within the band are treated as zero, which keeps
/// exactly-tied coordinates out of the reported minimizer.
const ZERO_BAND: f64 = 1e-9;

/// Result of an exact minimization.
#[derive(Clone, Debug)]
pub struct SfmResult {
    /// The reported minimizer (minimal minimizer under exact convergence).
    pub minimizer: Subset,
    /// `F(minimizer)`, re-evaluated at return.
    pub value: f64,
    /// Upper bound on `F(minimizer) - min F`; zero for exact oracles.
    pub gap_certificate: f64,
    /// Number of set-function evaluations requested by the solver.
    pub evaluations: u64,
    /// Major cycles (min-norm) or total subsets visited (brute force).
    pub iterations: usize,
    /// Whether the requested tolerance was certified.
    pub converged: bool,
}

/// Working state of the min-norm point solver.
#[derive(Clone, Debug, Default)]
pub struct MinNormState {
    /// Base-polytope vertices currently spanning the iterate.
    pub corral: Vec<Vec<f64>>,
    /// Convex weights over the corral (nonnegative, summing to one).
    pub convex_weights: Vec<f64>,
    /// The iterate `current_point = Σ convex_weights · corral`.
    pub current_point: Vec<f64>,
}

/// Full solver output: result, final state, and per-major-cycle diagnostics.
pub struct MinNormSolve {
    pub result: SfmResult,
    pub state: MinNormState,
    /// Squared norm of the iterate after each major cycle (nonincreasing).
    pub norm_history: Vec<f64>,
    /// Best-so-far objective and elapsed seconds per major cycle.
    pub trace: Vec<(usize, f64, f64)>,
}

/// Exhaustive minimizer over all `2^n` subsets. Ties break toward smaller
/// cardinality, then the lexicographically smallest bitmask (the minimal
/// minimizer for submodular inputs).
pub fn minimize_bruteforce<F: SetFunction + ?Sized>(f: &F) -> Result<SfmResult> {
    let n = f.ground_size();
    if n > BRUTE_MIN_CAP {
        return Err(Error::GroundSetTooLarge {
            n,
            cap: BRUTE_MIN_CAP,
        });
    }
    let mut best_mask = 0u64;
    let mut best_value = f.eval(&Subset::empty(n))?;
    let mut best_card = 0usize;
    let size = 1u64 << n;
    for mask in 1..size {
        let s = Subset::from_mask(n, mask);
        let v = f.eval(&s)?;
        let card = mask.count_ones() as usize;
        if v < best_value || (v == best_value && card < best_card) {
            best_mask = mask;
            best_value = v;
            best_card = card;
        }
    }
    let minimizer = Subset::from_mask(n, best_mask);
    let value = f.eval(&minimizer)?;
    Ok(SfmResult {
        minimizer,
        value,
        gap_certificate: 0.0,
        evaluations: size,
        iterations: size as usize,
        converged: true,
    })
}

/// Minimum-norm point algorithm: Wolfe's method on the base polytope, with
/// the minimizer recovered as the negative-coordinate set of the final point.
///
/// Exactness requires `f` submodular; this is the caller's contract and is
/// not checked at runtime (use [`crate::lattice::check_submodular_bruteforce`]
/// at small sizes). `tol` bounds the certified suboptimality at which the
/// solver stops (the certificate pairs the current set with the
/// base-polytope lower bound `Σ min(y_i, 0)`). Exhausting `max_iter`
/// returns the best set seen with `converged = false`.
pub fn min_norm_point<F: SetFunction + ?Sized>(
    f: &F,
    tol: f64,
    max_iter: usize,
) -> Result<SfmResult> {
    Ok(min_norm_point_full(f, tol, max_iter)?.result)
}

pub fn min_norm_point_full<F: SetFunction + ?Sized>(
    f: &F,
    tol: f64,
    max_iter: usize,
) -> Result<MinNormSolve> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter("tol must be positive".into()));
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
        return Ok(MinNormSolve {
            result,
            state: MinNormState::default(),
            norm_history: Vec::new(),
            trace: Vec::new(),
        });
    }

    // Normalized greedy vertex for a visiting order.
    let vertex =
        |order: &[usize], eval: &mut dyn FnMut(&Subset) -> Result<f64>| -> Result<Vec<f64>> {
            let mut w = vec![0.0; n];
            let mut prefix = Subset::empty(n);
            let mut prev = f_empty;
            for &i in order {
                prefix.insert(i);
                let cur = eval(&prefix)?;
                w[i] = cur - prev;
                prev = cur;
            }
            Ok(w)
        };

    let identity: Vec<usize> = (0..n).collect();
    let first = vertex(&identity, &mut eval)?;
    let mut corral: Vec<Vec<f64>> = vec![first.clone()];
    let mut weights: Vec<f64> = vec![1.0];
    let mut point = first;
    // Gram matrix of the corral, grown and shrunk alongside it.
    let mut gram = Matrix::from_vec(1, 1, vec![linalg::norm_sq(&point)]);

    let mut best: Option<(Subset, f64)> = None;
    let mut best_lower = f64::NEG_INFINITY;
    let mut norm_history = Vec::new();
    let mut trace = Vec::new();
    let mut converged = false;
    let mut majors = 0;
    let mut stalls = 0;

    for major in 0..max_iter {
        majors = major + 1;

        // Candidate set from the current point and the matching lower bound.
        let band = ZERO_BAND * linalg::norm_inf(&point).max(1.0);
        let candidate = Subset::from_indices(n, (0..n).filter(|&i| point[i] < -band));
        let cand_value = eval(&candidate)?;
        update_best(&mut best, candidate, cand_value);
        let lower: f64 = point.iter().map(|v| v.min(0.0)).sum();
        best_lower = best_lower.max(lower);

        let best_value = best.as_ref().map(|(_, v)| *v).unwrap();
        trace.push((major, best_value, start.elapsed().as_secs_f64()));
        if (best_value - f_empty) - best_lower <= tol {
            converged = true;
            norm_history.push(linalg::norm_sq(&point));
            break;
        }

        // Linear minimization over the base polytope: greedy on ascending order.
        let mut asc = descending_order(&point);
        asc.reverse();
        let q = vertex(&asc, &mut eval)?;

        let wolfe_gap = linalg::norm_sq(&point) - linalg::dot(&point, &q);
        let scale = linalg::norm_sq(&point).max(1.0);
        if wolfe_gap <= 1e-14 * scale {
            converged = true;
            norm_history.push(linalg::norm_sq(&point));
            break;
        }
        if corral.iter().any(|v| max_abs_diff(v, &q) <= 1e-12) {
            // The oracle returned a vertex already spanning the iterate.
            converged = true;
            norm_history.push(linalg::norm_sq(&point));
            break;
        }

        push_vertex(&mut corral, &mut weights, &mut gram, q);

        // Minor cycles: affine minimization over the corral until the
        // minimum-norm point of its affine hull is a convex combination.
        loop {
            let affine = affine_minimizer(&gram)?;
            if affine.iter().all(|&a| a >= -CORRAL_TOL) {
                weights = affine.iter().map(|&a| a.max(0.0)).collect();
                renormalize(&mut weights);
                point = combine(&corral, &weights, n);
                break;
            }
            // Step toward the affine solution until the first weight hits zero.
            let mut theta = 1.0f64;
            for (w, a) in weights.iter().zip(&affine) {
                if a < w {
                    let t = w / (w - a);
                    if t < theta {
                        theta = t;
                    }
                }
            }
            for (w, a) in weights.iter_mut().zip(&affine) {
                *w = (1.0 - theta) * *w + theta * a;
            }
            let mut k = 0;
            while k < weights.len() {
                if weights[k] <= CORRAL_TOL {
                    drop_vertex(&mut corral, &mut weights, &mut gram, k);
                } else {
                    k += 1;
                }
            }
            renormalize(&mut weights);
        }
        let norm = linalg::norm_sq(&point);
        if let Some(prev) = norm_history.last() {
            if norm >= prev - 1e-15 * scale {
                stalls += 1;
            } else {
                stalls = 0;
            }
        }
        norm_history.push(norm);
        if stalls >= 3 {
            break;
        }
    }

    if !converged {
        // Final candidate from the last iterate before reporting best-so-far.
        let band = ZERO_BAND * linalg::norm_inf(&point).max(1.0);
        let candidate = Subset::from_indices(n, (0..n).filter(|&i| point[i] < -band));
        let cand_value = eval(&candidate)?;
        update_best(&mut best, candidate, cand_value);
        let lower: f64 = point.iter().map(|v| v.min(0.0)).sum();
        best_lower = best_lower.max(lower);
    }

    let (minimizer, _) = best.expect("at least one candidate evaluated");
    let value = eval(&minimizer)?;
    let gap = ((value - f_empty) - best_lower).max(0.0);
    let result = SfmResult {
        minimizer,
        value,
        gap_certificate: gap,
        evaluations: evals,
        iterations: majors,
        converged: converged || gap <= tol,
    };
    Ok(MinNormSolve {
        result,
        state: MinNormState {
            corral,
            convex_weights: weights,
            current_point: point,
        },
        norm_history,
        trace,
    })
}

fn update_best(best: &mut Option<(Subset, f64)>, s: Subset, v: f64) {
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

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn combine(corral: &[Vec<f64>], weights: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (v, w) in corral.iter().zip(weights) {
        for (o, x) in out.iter_mut().zip(v) {
            *o += w * x;
        }
    }
    out
}

fn renormalize(weights: &mut [f64]) {
    let total: f64 = weights.iter().sum();
    if total > 0.0 {
        for w in weights.iter_mut() {
            *w /= total;
        }
    }
}

fn push_vertex(corral: &mut Vec<Vec<f64>>, weights: &mut Vec<f64>, gram: &mut Matrix, q: Vec<f64>) {
    let m = corral.len();
    let mut grown = Matrix::zeros(m + 1, m + 1);
    for i in 0..m {
        for j in 0..m {
            grown[(i, j)] = gram[(i, j)];
        }
    }
    for (i, v) in corral.iter().enumerate() {
        let d = linalg::dot(v, &q);
        grown[(i, m)] = d;
        grown[(m, i)] = d;
    }
    grown[(m, m)] = linalg::norm_sq(&q);
    *gram = grown;
    corral.push(q);
    weights.push(0.0);
}

fn drop_vertex(corral: &mut Vec<Vec<f64>>, weights: &mut Vec<f64>, gram: &mut Matrix, k: usize) {
    let m = corral.len();
    let mut shrunk = Matrix::zeros(m - 1, m - 1);
    let keep: Vec<usize> = (0..m).filter(|&i| i != k).collect();
    for (r, &i) in keep.iter().enumerate() {
        for (c, &j) in keep.iter().enumerate() {
            shrunk[(r, c)] = gram[(i, j)];
        }
    }
    *gram = shrunk;
    corral.remove(k);
    weights.remove(k);
}

/// Minimizes `||Σ a_i v_i||²` over affine weights (`Σ a_i = 1`) given the
/// corral Gram matrix, via the bordered system `(G + 11ᵀ) a ∝ 1` with a ridge
/// fallback at the numerical-rank tolerance.
fn affine_minimizer(gram: &Matrix) -> Result<Vec<f64>> {
    let m = gram.rows();
    let mut sys = gram.clone();
    for i in 0..m {
        for j in 0..m {
            sys[(i, j)] += 1.0;
        }
    }
    let ones = vec![1.0; m];
    let raw = match linalg::solve_spd(&sys, &ones, CORRAL_TOL) {
        Ok(linalg::SpdSolve::Definite(x)) | Ok(linalg::SpdSolve::Regularized(x, _)) => x,
        Err(_) => {
            return Err(Error::SolverStalled(
                "affine minimization over the corral failed".into(),
            ))
        }
    };
    let total: f64 = raw.iter().sum();
    if total.abs() < CORRAL_TOL {
        return Err(Error::SolverStalled(
            "degenerate corral in affine minimization".into(),
        ));
    }
    Ok(raw.iter().map(|v| v / total).collect())
}

/// Shrinks the search lattice around the minimal minimizer using marginal
/// tests iterated to a fixpoint: an element joins the lower set when adding
/// it to the lower set strictly helps everywhere, and leaves the upper set
/// when adding it on top of the rest of the upper set never helps.
pub fn semigradient_prune<F: SetFunction + ?Sized>(f: &F) -> Result<(Subset, Subset)> {
    let n = f.ground_size();
    let mut lower = Subset::empty(n);
    let mut upper = Subset::full(n);
    if n == 0 {
        return Ok((lower, upper));
    }
    loop {
        let mut changed = false;
        for i in 0..n {
            if !upper.contains(i) || lower.contains(i) {
                continue;
            }
            // Marginal of i on top of the rest of the upper set.
            let with_upper = f.eval(&upper)? - f.eval(&upper.without(i))?;
            if with_upper >= 0.0 {
                upper.remove(i);
                changed = true;
                continue;
            }
            // Marginal of i added to the lower set.
            let at_lower = f.eval(&lower.with(i))? - f.eval(&lower)?;
            if at_lower < 0.0 {
                lower.insert(i);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok((lower, upper))
}
