//! Set functions over a finite ground set, their Lovász extension, greedy
//! base-polytope vertices, and the brute-force structural verifiers used as
//! test oracles throughout the crate.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::subset::Subset;
use std::collections::HashMap;
use std::sync::RwLock;

/// Brute-force cap for the pairwise structural checks (cost grows as `4^n`).
pub const BRUTE_CHECK_CAP: usize = 12;

/// Tolerance used by structural checks on matrices.
pub const STRUCTURAL_TOL: f64 = 1e-8;

/// An evaluatable set function `F : 2^{[n]} -> R`.
///
/// Evaluation is fallible: composite functions evaluate `F(A)` by solving a
/// constrained optimization problem that can reject pathological inputs.
pub trait SetFunction: Send + Sync {
    fn ground_size(&self) -> usize;
    fn eval(&self, s: &Subset) -> Result<f64>;
}

impl<T: SetFunction + ?Sized> SetFunction for &T {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn eval(&self, s: &Subset) -> Result<f64> {
        (**self).eval(s)
    }
}

/// A memoizing wrapper around a pure evaluator.
///
/// Repeated evaluations of the same subset return bit-identical values. The
/// memo tolerates concurrent readers; insertion is last-write-wins, which is
/// harmless because the evaluator is pure.
pub struct SetFunctionHandle {
    n: usize,
    evaluator: Box<dyn Fn(&Subset) -> f64 + Send + Sync>,
    memo: RwLock<HashMap<Subset, f64>>,
}

impl SetFunctionHandle {
    pub fn new<F>(n: usize, evaluator: F) -> Self
    where
        F: Fn(&Subset) -> f64 + Send + Sync + 'static,
    {
        SetFunctionHandle {
            n,
            evaluator: Box::new(evaluator),
            memo: RwLock::new(HashMap::new()),
        }
    }

    /// Modular function `A -> sum of weights over A`.
    pub fn modular(weights: Vec<f64>) -> Self {
        let n = weights.len();
        SetFunctionHandle::new(n, move |s| s.iter().map(|i| weights[i]).sum())
    }

    /// The zero function.
    pub fn zero(n: usize) -> Self {
        SetFunctionHandle::new(n, |_| 0.0)
    }

    pub fn memo_len(&self) -> usize {
        self.memo.read().unwrap().len()
    }
}

impl SetFunction for SetFunctionHandle {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn eval(&self, s: &Subset) -> Result<f64> {
        if s.ground_size() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: s.ground_size(),
            });
        }
        if let Some(v) = self.memo.read().unwrap().get(s) {
            return Ok(*v);
        }
        let v = (self.evaluator)(s);
        self.memo.write().unwrap().insert(*s, v);
        Ok(v)
    }
}

/// A vertex of the base polytope produced by the greedy rule: walking the
/// prefix chain of `ordering` and assigning each element its marginal value.
#[derive(Clone, Debug)]
pub struct BaseVertex {
    pub weights: Vec<f64>,
    pub ordering: Vec<usize>,
}

/// Lovász extension of `f` at `u`, including the `f(∅)` offset so that
/// non-normalized functions extend correctly.
///
/// Sorts `u` nonincreasingly (ties broken by ascending index) and accumulates
/// prefix marginals; at an indicator vector the result equals the set value.
pub fn lovasz_extension<F: SetFunction + ?Sized>(f: &F, u: &[f64]) -> Result<f64> {
    let n = f.ground_size();
    if u.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: u.len(),
        });
    }
    let order = descending_order(u);
    let mut prefix = Subset::empty(n);
    let mut prev = f.eval(&prefix)?;
    let mut total = prev;
    for &i in &order {
        prefix.insert(i);
        let cur = f.eval(&prefix)?;
        total += u[i] * (cur - prev);
        prev = cur;
    }
    Ok(total)
}

/// Indices of `u` sorted by nonincreasing value, ties by ascending index.
pub fn descending_order(u: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..u.len()).collect();
    order.sort_by(|&a, &b| {
        u[b].partial_cmp(&u[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// Greedy base-polytope vertex for the given visiting order.
pub fn greedy_base_vertex<F: SetFunction + ?Sized>(
    f: &F,
    ordering: &[usize],
) -> Result<BaseVertex> {
    let n = f.ground_size();
    if ordering.len() != n {
        return Err(Error::NotAPermutation);
    }
    let mut seen = Subset::empty(n);
    for &i in ordering {
        if i >= n || seen.contains(i) {
            return Err(Error::NotAPermutation);
        }
        seen.insert(i);
    }
    let mut weights = vec![0.0; n];
    let mut prefix = Subset::empty(n);
    let mut prev = f.eval(&prefix)?;
    for &i in ordering {
        prefix.insert(i);
        let cur = f.eval(&prefix)?;
        weights[i] = cur - prev;
        prev = cur;
    }
    Ok(BaseVertex {
        weights,
        ordering: ordering.to_vec(),
    })
}

/// Evaluates `f` on every subset of a ground set with `n <= cap`, returning a
/// dense table indexed by bitmask.
fn dense_table<F: SetFunction + ?Sized>(f: &F, cap: usize) -> Result<Vec<f64>> {
    let n = f.ground_size();
    if n > cap {
        return Err(Error::GroundSetTooLarge { n, cap });
    }
    let mut table = Vec::with_capacity(1usize << n);
    for mask in 0..(1u64 << n) {
        table.push(f.eval(&Subset::from_mask(n, mask))?);
    }
    Ok(table)
}

/// Exhaustively verifies `F(A) + F(B) >= F(A∪B) + F(A∩B) - tol` over all pairs.
pub fn check_submodular_bruteforce<F: SetFunction + ?Sized>(f: &F, tol: f64) -> Result<bool> {
    let n = f.ground_size();
    let table = dense_table(f, BRUTE_CHECK_CAP)?;
    let size = 1usize << n;
    for a in 0..size {
        for b in a..size {
            if table[a] + table[b] - table[a | b] - table[a & b] < -tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Exhaustively verifies `A ⊆ B ⇒ F(A) <= F(B) + tol` over all nested pairs.
pub fn check_monotone_bruteforce<F: SetFunction + ?Sized>(f: &F, tol: f64) -> Result<bool> {
    let n = f.ground_size();
    let table = dense_table(f, BRUTE_CHECK_CAP)?;
    let size = 1usize << n;
    for b in 0..size {
        // Enumerate all submasks of b.
        let mut a = b;
        loop {
            if table[a] > table[b] + tol {
                return Ok(false);
            }
            if a == 0 {
                break;
            }
            a = (a - 1) & b;
        }
    }
    Ok(true)
}

/// True iff every off-diagonal entry of the symmetric matrix is nonpositive
/// (up to the structural tolerance), the second-derivative test for
/// submodularity of a twice-differentiable function.
pub fn check_hessian_offdiag(q: &Matrix) -> Result<bool> {
    if !q.is_square() {
        return Err(Error::NotSquare {
            rows: q.rows(),
            cols: q.cols(),
        });
    }
    if !q.is_symmetric(1e-12) {
        return Err(Error::AsymmetricMatrix);
    }
    for i in 0..q.rows() {
        for j in 0..q.cols() {
            if i != j && q[(i, j)] > STRUCTURAL_TOL {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
