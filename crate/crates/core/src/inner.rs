//! Evaluation of the inner continuous problem: the best objective value of a
//! convex quadratic restricted to supports inside a given subset, together
//! with the memoizing composite set function `A -> g(A) + H(A)`.

use crate::error::{Error, Result};
use crate::lattice::{check_hessian_offdiag, SetFunction, SetFunctionHandle};
use crate::linalg::{self, Matrix, SpdSolve};
use crate::subset::Subset;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Mutex, RwLock};

/// Default KKT residual tolerance for the restricted solves.
pub const DEFAULT_QP_TOL: f64 = 1e-10;

/// How many recently solved subsets are scanned for a warm start.
const WARM_WINDOW: usize = 64;

/// Whether the quadratic is minimized over the nonnegative orthant or over
/// all of `R^n` (used by signed problems such as denoising).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignMode {
    Nonnegative,
    Free,
}

/// The quadratic `f(x) = xᵀ Q x + pᵀ x + offset` with symmetric `Q`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuadraticSpec {
    q: Matrix,
    p: Vec<f64>,
    offset: f64,
    sign_mode: SignMode,
}

impl QuadraticSpec {
    /// Builds a quadratic, enforcing in nonnegative mode that the Hessian has
    /// nonpositive off-diagonal entries (the property that makes `g + H`
    /// exactly minimizable). Use [`QuadraticSpec::new_unchecked`] to bypass.
    pub fn new(q: Matrix, p: Vec<f64>, offset: f64, sign_mode: SignMode) -> Result<Self> {
        if q.rows() != p.len() {
            return Err(Error::DimensionMismatch {
                expected: q.rows(),
                got: p.len(),
            });
        }
        if !q.is_symmetric(1e-12) {
            return Err(Error::AsymmetricMatrix);
        }
        if sign_mode == SignMode::Nonnegative && !check_hessian_offdiag(&q)? {
            return Err(Error::InvalidParameter(
                "Hessian has positive off-diagonal entries; construct with new_unchecked to override".into(),
            ));
        }
        Ok(QuadraticSpec {
            q,
            p,
            offset,
            sign_mode,
        })
    }

    /// Same as [`QuadraticSpec::new`] but skips the off-diagonal sign check.
    pub fn new_unchecked(q: Matrix, p: Vec<f64>, offset: f64, sign_mode: SignMode) -> Result<Self> {
        if q.rows() != p.len() {
            return Err(Error::DimensionMismatch {
                expected: q.rows(),
                got: p.len(),
            });
        }
        if !q.is_symmetric(1e-12) {
            return Err(Error::AsymmetricMatrix);
        }
        Ok(QuadraticSpec {
            q,
            p,
            offset,
            sign_mode,
        })
    }

    /// Least-squares objective `||D x - b||²` in quadratic form:
    /// `Q = DᵀD`, `p = -2 Dᵀ b`, `offset = bᵀb`.
    pub fn least_squares(d: &Matrix, b: &[f64], sign_mode: SignMode) -> Result<Self> {
        if d.rows() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: d.rows(),
                got: b.len(),
            });
        }
        let q = d.gram();
        let mut p = d.tr_matvec(b);
        for v in &mut p {
            *v *= -2.0;
        }
        let offset = linalg::dot(b, b);
        QuadraticSpec::new_unchecked(q, p, offset, sign_mode)
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn sign_mode(&self) -> SignMode {
        self.sign_mode
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let qx = self.q.matvec(x);
        linalg::dot(x, &qx) + linalg::dot(&self.p, x) + self.offset
    }

    /// Gradient `2 Q x + p`.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.q.matvec(x);
        for (gi, pi) in g.iter_mut().zip(&self.p) {
            *gi = 2.0 * *gi + pi;
        }
        g
    }
}

/// Primal solution of a restricted solve.
#[derive(Clone, Debug)]
pub struct InnerSolution {
    /// Full-length primal point; coordinates outside the queried support are 0.
    pub x: Vec<f64>,
    /// Objective value `f(x)` re-evaluated at return.
    pub value: f64,
    /// Coordinates of the queried support clamped at zero by the bound.
    pub active_set: Subset,
}

/// Support of a vector as a subset (strictly nonzero coordinates).
pub fn support(n: usize, x: &[f64]) -> Subset {
    Subset::from_indices(n, (0..n).filter(|&i| x[i] != 0.0))
}

/// Minimizes `f` over `{x : supp(x) ⊆ a}` (and `x >= 0` in nonnegative mode).
pub fn solve_restricted_qp(fspec: &QuadraticSpec, a: &Subset, tol: f64) -> Result<InnerSolution> {
    solve_restricted_qp_warm(fspec, a, tol, None)
}

/// Warm-started variant; `warm` is a feasible point from a previous solve
/// (typically on a slightly smaller support).
pub fn solve_restricted_qp_warm(
    fspec: &QuadraticSpec,
    a: &Subset,
    tol: f64,
    warm: Option<&[f64]>,
) -> Result<InnerSolution> {
    let n = fspec.n();
    if a.ground_size() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.ground_size(),
        });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    let support_idx: Vec<usize> = a.iter().collect();
    if support_idx.is_empty() {
        return Ok(InnerSolution {
            x: vec![0.0; n],
            value: fspec.offset,
            active_set: Subset::empty(n),
        });
    }
    match fspec.sign_mode {
        SignMode::Free => solve_equality_restricted(fspec, a, &support_idx),
        SignMode::Nonnegative => solve_bound_restricted(fspec, a, &support_idx, tol, warm),
    }
}

/// Stationarity solve `2 Q_AA x_A = -p_A` with no sign constraint.
fn solve_equality_restricted(
    fspec: &QuadraticSpec,
    a: &Subset,
    idx: &[usize],
) -> Result<InnerSolution> {
    let xa = solve_working_set(fspec, idx).map_err(|e| name_coords(e, idx))?;
    let mut x = vec![0.0; fspec.n()];
    for (k, &i) in idx.iter().enumerate() {
        x[i] = xa[k];
    }
    let value = fspec.eval(&x);
    let active = Subset::from_indices(fspec.n(), idx.iter().copied().filter(|&i| x[i] == 0.0));
    let _ = a;
    Ok(InnerSolution {
        x,
        value,
        active_set: active,
    })
}

/// Primal active-set iteration for the nonnegativity-bounded restriction.
fn solve_bound_restricted(
    fspec: &QuadraticSpec,
    a: &Subset,
    idx: &[usize],
    tol: f64,
    warm: Option<&[f64]>,
) -> Result<InnerSolution> {
    let n = fspec.n();
    let mut x = vec![0.0; n];
    if let Some(w) = warm {
        for &i in idx {
            x[i] = w[i].max(0.0);
        }
    }
    let mut working: Vec<usize> = idx.iter().copied().filter(|&i| x[i] > 0.0).collect();
    let max_rounds = 8 * idx.len() + 32;
    for _ in 0..max_rounds {
        // Equality solve on the working coordinates.
        let xw = if working.is_empty() {
            Vec::new()
        } else {
            solve_working_set(fspec, &working).map_err(|e| name_coords(e, &working))?
        };

        let lowest = xw.iter().cloned().fold(f64::INFINITY, f64::min);
        if working.is_empty() || lowest >= 0.0 {
            // Accept the equality solution and check dual feasibility.
            for v in x.iter_mut() {
                *v = 0.0;
            }
            for (k, &i) in working.iter().enumerate() {
                x[i] = xw[k];
            }
            let grad = gradient(fspec, &x);
            let mut entering: Option<usize> = None;
            let mut most_negative = -tol;
            for &i in idx {
                if !working.contains(&i) && grad[i] < most_negative {
                    most_negative = grad[i];
                    entering = Some(i);
                }
            }
            match entering {
                None => {
                    let value = fspec.eval(&x);
                    let active =
                        Subset::from_indices(n, idx.iter().copied().filter(|&i| x[i] == 0.0));
                    return Ok(InnerSolution {
                        x,
                        value,
                        active_set: active,
                    });
                }
                Some(i) => {
                    working.push(i);
                    working.sort_unstable();
                }
            }
        } else {
            // Step from the current point toward the equality solution until a
            // bound blocks, then drop the blocking coordinate.
            let mut alpha = 1.0;
            let mut blocking = None;
            for (k, &i) in working.iter().enumerate() {
                let d = xw[k] - x[i];
                if d < 0.0 && xw[k] < 0.0 {
                    let step = -x[i] / d;
                    if step < alpha {
                        alpha = step;
                        blocking = Some(i);
                    }
                }
            }
            for (k, &i) in working.iter().enumerate() {
                x[i] += alpha * (xw[k] - x[i]);
                if x[i] < 0.0 {
                    x[i] = 0.0;
                }
            }
            if let Some(b) = blocking {
                x[b] = 0.0;
                working.retain(|&i| i != b);
            } else {
                // No blocking bound: the equality solution was feasible after all.
                continue;
            }
        }
    }
    Err(Error::SolverStalled(format!(
        "active-set iteration did not settle on support {a}"
    )))
}

/// Solves the stationarity system on the listed coordinates.
fn solve_working_set(fspec: &QuadraticSpec, idx: &[usize]) -> Result<Vec<f64>> {
    let m = idx.len();
    let mut q = Matrix::zeros(m, m);
    let mut rhs = vec![0.0; m];
    for (r, &i) in idx.iter().enumerate() {
        for (c, &j) in idx.iter().enumerate() {
            q[(r, c)] = fspec.q[(i, j)];
        }
        rhs[r] = -0.5 * fspec.p[i];
    }
    match linalg::solve_spd(&q, &rhs, 1e-10)? {
        SpdSolve::Definite(x) => Ok(x),
        SpdSolve::Regularized(x, _) => Ok(x),
    }
}

/// Maps the pivot index of an indefiniteness report back to problem coordinates.
fn name_coords(e: Error, idx: &[usize]) -> Error {
    match e {
        Error::IndefiniteRestriction { coords } => Error::IndefiniteRestriction {
            coords: coords
                .into_iter()
                .map(|k| idx.get(k).copied().unwrap_or(k))
                .collect(),
        },
        other => other,
    }
}

fn gradient(fspec: &QuadraticSpec, x: &[f64]) -> Vec<f64> {
    fspec.gradient(x)
}

/// The composite set function `A -> g(A) + H(A)` with
/// `H(A) = min { f(x) : supp(x) ⊆ A }`.
///
/// `H` values and their primal witnesses are memoized; the submodular
/// minimizers re-query heavily overlapping subsets, and nested queries warm
/// start from the most recently solved subset contained in the new one.
pub struct CompositeFunction {
    g: SetFunctionHandle,
    fspec: QuadraticSpec,
    h_memo: RwLock<HashMap<Subset, InnerSolution>>,
    recent: Mutex<Vec<Subset>>,
    qp_tol: f64,
}

impl CompositeFunction {
    pub fn new(fspec: QuadraticSpec, g: SetFunctionHandle) -> Result<Self> {
        if g.ground_size() != fspec.n() {
            return Err(Error::DimensionMismatch {
                expected: fspec.n(),
                got: g.ground_size(),
            });
        }
        Ok(CompositeFunction {
            g,
            fspec,
            h_memo: RwLock::new(HashMap::new()),
            recent: Mutex::new(Vec::new()),
            qp_tol: DEFAULT_QP_TOL,
        })
    }

    pub fn g(&self) -> &SetFunctionHandle {
        &self.g
    }

    pub fn fspec(&self) -> &QuadraticSpec {
        &self.fspec
    }

    pub fn n(&self) -> usize {
        self.fspec.n()
    }

    /// Memoized `H(A)`; solves and caches the primal witness on a miss.
    pub fn eval_h(&self, a: &Subset) -> Result<f64> {
        Ok(self.solution(a)?.value)
    }

    /// The cached (or freshly computed) primal witness achieving `H(A)`.
    pub fn recover_primal(&self, a: &Subset) -> Result<InnerSolution> {
        self.solution(a)
    }

    fn solution(&self, a: &Subset) -> Result<InnerSolution> {
        if a.ground_size() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: a.ground_size(),
            });
        }
        if let Some(sol) = self.h_memo.read().unwrap().get(a) {
            return Ok(sol.clone());
        }
        let warm = self.warm_start(a);
        let sol = solve_restricted_qp_warm(&self.fspec, a, self.qp_tol, warm.as_deref())?;
        self.h_memo.write().unwrap().insert(*a, sol.clone());
        let mut recent = self.recent.lock().unwrap();
        recent.push(*a);
        Ok(sol)
    }

    /// Largest recently solved subset of `a`, scanned newest-first. Greedy
    /// prefix chains hit the immediately preceding subset this way.
    fn warm_start(&self, a: &Subset) -> Option<Vec<f64>> {
        let recent = self.recent.lock().unwrap();
        let memo = self.h_memo.read().unwrap();
        let mut best: Option<&Subset> = None;
        for s in recent.iter().rev().take(WARM_WINDOW) {
            if s.is_subset_of(a) && best.is_none_or(|b| s.cardinality() > b.cardinality()) {
                best = Some(s);
            }
        }
        best.and_then(|s| memo.get(s)).map(|sol| sol.x.clone())
    }

    pub fn h_cache_len(&self) -> usize {
        self.h_memo.read().unwrap().len()
    }
}

impl SetFunction for CompositeFunction {
    fn ground_size(&self) -> usize {
        self.n()
    }

    fn eval(&self, s: &Subset) -> Result<f64> {
        Ok(self.g.eval(s)? + self.eval_h(s)?)
    }
}
