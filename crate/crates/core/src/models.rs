//! Problem instance construction: random submodular-convex quadratics for
//! sparse regression, the range and interval support penalties, the signal
//! denoising objective, and the least-squares lifting / coherence diagnostics.

use crate::error::{Error, Result};
use crate::inner::{QuadraticSpec, SignMode};
use crate::lattice::SetFunctionHandle;
use crate::linalg::{self, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Families of support penalties used by the generated instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PenaltyKind {
    Zero,
    Cardinality { lambda: f64 },
    Range { lambda: f64 },
    Interval { lambda: f64 },
    WeightedCardinality { weights: Vec<f64> },
}

impl PenaltyKind {
    pub fn build(&self, n: usize) -> SetFunctionHandle {
        match self {
            PenaltyKind::Zero => SetFunctionHandle::zero(n),
            PenaltyKind::Cardinality { lambda } => {
                cardinality_penalty_g(n, *lambda).expect("lambda validated at construction")
            }
            PenaltyKind::Range { lambda } => {
                range_penalty_g(n, *lambda).expect("lambda validated at construction")
            }
            PenaltyKind::Interval { lambda } => {
                interval_penalty_g(n, *lambda).expect("lambda validated at construction")
            }
            PenaltyKind::WeightedCardinality { weights } => {
                SetFunctionHandle::modular(weights.clone())
            }
        }
    }
}

/// A fully specified problem instance: quadratic data-fit plus support penalty.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub fspec: QuadraticSpec,
    pub penalty: PenaltyKind,
    pub n: usize,
    pub seed: u64,
    pub lambda: f64,
    pub mu_smooth: f64,
    pub b_target: Vec<f64>,
    /// Cholesky-style factor witnessing positive definiteness, when one exists.
    pub d_factor: Option<Matrix>,
}

impl InstanceSpec {
    pub fn g(&self) -> SetFunctionHandle {
        self.penalty.build(self.n)
    }
}

/// Cardinality penalty `g(A) = λ |A|`.
pub fn cardinality_penalty_g(n: usize, lambda: f64) -> Result<SetFunctionHandle> {
    if lambda < 0.0 {
        return Err(Error::InvalidParameter(
            "penalty strength must be nonnegative".into(),
        ));
    }
    Ok(SetFunctionHandle::new(n, move |s| {
        lambda * s.cardinality() as f64
    }))
}

/// Range penalty: zero on the empty set, otherwise
/// `λ [(n-1) + max(A) - min(A) + |A|]`, favoring small index-contiguous sets.
pub fn range_penalty_g(n: usize, lambda: f64) -> Result<SetFunctionHandle> {
    if lambda < 0.0 {
        return Err(Error::InvalidParameter(
            "penalty strength must be nonnegative".into(),
        ));
    }
    Ok(SetFunctionHandle::new(n, move |s| {
        if s.is_empty() {
            0.0
        } else {
            let span = (s.max_index().unwrap() - s.min_index().unwrap()) as f64;
            lambda * ((n as f64 - 1.0) + span + s.cardinality() as f64)
        }
    }))
}

/// Interval penalty `g(A) = λ (|A| + #int(A))` where `#int` counts maximal
/// runs of consecutive indices; favors few contiguous windows.
pub fn interval_penalty_g(n: usize, lambda: f64) -> Result<SetFunctionHandle> {
    if lambda < 0.0 {
        return Err(Error::InvalidParameter(
            "penalty strength must be nonnegative".into(),
        ));
    }
    Ok(SetFunctionHandle::new(n, move |s| {
        let mut runs = 0usize;
        let mut prev: Option<usize> = None;
        for i in s.iter() {
            if prev.is_none_or(|p| i != p + 1) {
                runs += 1;
            }
            prev = Some(i);
        }
        lambda * (s.cardinality() + runs) as f64
    }))
}

/// Deterministic piecewise-smooth test signal: two raised-cosine bumps on an
/// otherwise flat baseline, sampled at `n` equispaced points in `[0, 1]`.
pub fn bump_signal(n: usize) -> Vec<f64> {
    let bump = |t: f64, center: f64, width: f64| -> f64 {
        let d = (t - center) / width;
        if d.abs() <= 1.0 {
            let c = (std::f64::consts::FRAC_PI_2 * d).cos();
            c * c
        } else {
            0.0
        }
    };
    (0..n)
        .map(|i| {
            let t = if n <= 1 {
                0.5
            } else {
                i as f64 / (n - 1) as f64
            };
            bump(t, 0.25, 0.15) + 0.6 * bump(t, 0.7, 0.2)
        })
        .collect()
}

const GEN_ATTEMPTS: usize = 100;

/// Random sparse-regression instance: `f(x) = ||D x - b||²` with
/// `DᵀD = C + Cᵀ + nI`, `C_ij ~ unif(-1, 0)`, resampled until the Cholesky
/// factorization succeeds; `g` is the range penalty at strength `lambda`.
pub fn gen_regression_instance(n: usize, seed: u64, lambda: f64) -> Result<InstanceSpec> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..GEN_ATTEMPTS {
        let mut c = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                c[(i, j)] = rng.gen::<f64>() - 1.0;
            }
        }
        match regression_from_correlation(&c, seed, lambda) {
            Ok(inst) => return Ok(inst),
            Err(Error::GenerationFailed(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::GenerationFailed(GEN_ATTEMPTS))
}

/// Deterministic core of the regression generator, exposed so the arithmetic
/// can be pinned in tests: `Q = C + Cᵀ + nI`, `D = chol(Q)ᵀ`, `b` the bump
/// signal, `p = -2 Dᵀ b`, `offset = bᵀb`.
pub fn regression_from_correlation(c: &Matrix, seed: u64, lambda: f64) -> Result<InstanceSpec> {
    let n = c.rows();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = c[(i, j)] + c[(j, i)];
        }
        m[(i, i)] += n as f64;
    }
    let l = cholesky_or_fail(&m)?;
    let d = l.transpose();
    let b = bump_signal(n);
    let mut p = d.tr_matvec(&b);
    for v in &mut p {
        *v *= -2.0;
    }
    // Store the exact symmetric form for Q rather than the rounded DᵀD.
    let fspec = QuadraticSpec::new(m, p, linalg::dot(&b, &b), SignMode::Nonnegative)?;
    Ok(InstanceSpec {
        fspec,
        penalty: PenaltyKind::Range { lambda },
        n,
        seed,
        lambda,
        mu_smooth: 0.0,
        b_target: b,
        d_factor: Some(d),
    })
}

fn cholesky_or_fail(m: &Matrix) -> Result<Matrix> {
    linalg::cholesky(m).ok_or(Error::GenerationFailed(1))
}

/// Signal denoising objective `f(x) = ½||x - y||² + μ Σ (x_i - x_{i+1})²`
/// over signed `x`, with the interval penalty on the support.
///
/// On signed domains the support penalty does not compose submodularly in
/// general, so the exact-minimization guarantee is an empirical matter on a
/// given instance (verify with the brute-force check at small sizes).
pub fn denoising_instance(y: &[f64], mu_smooth: f64, lambda: f64) -> Result<InstanceSpec> {
    if mu_smooth < 0.0 {
        return Err(Error::InvalidParameter(
            "smoothness weight must be nonnegative".into(),
        ));
    }
    let n = y.len();
    // Quadratic form: Q = ½ I + μ L with L the path Laplacian.
    let mut q = Matrix::zeros(n, n);
    for i in 0..n {
        q[(i, i)] = 0.5;
    }
    for i in 0..n.saturating_sub(1) {
        q[(i, i)] += mu_smooth;
        q[(i + 1, i + 1)] += mu_smooth;
        q[(i, i + 1)] -= mu_smooth;
        q[(i + 1, i)] -= mu_smooth;
    }
    let p: Vec<f64> = y.iter().map(|v| -v).collect();
    let offset = 0.5 * linalg::dot(y, y);
    let fspec = QuadraticSpec::new_unchecked(q, p, offset, SignMode::Free)?;
    Ok(InstanceSpec {
        fspec,
        penalty: PenaltyKind::Interval { lambda },
        n,
        seed: 0,
        lambda,
        mu_smooth,
        b_target: y.to_vec(),
        d_factor: None,
    })
}

/// Lifts `min ||A x - b||² + |supp(x)|` over signed `x` to a nonnegative
/// problem in `(x⁺, x⁻)` with block Hessian `[[G, -G], [-G, G]]`, `G = AᵀA`.
///
/// Returns the lifted instance and whether it passes the off-diagonal
/// Hessian check (true exactly when `G` is diagonal).
pub fn lift_least_squares(amat: &Matrix, b: &[f64]) -> Result<(InstanceSpec, bool)> {
    if amat.rows() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: amat.rows(),
            got: b.len(),
        });
    }
    let n = amat.cols();
    let g = amat.gram();
    let mut q = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            q[(i, j)] = g[(i, j)];
            q[(i + n, j + n)] = g[(i, j)];
            q[(i, j + n)] = -g[(i, j)];
            q[(i + n, j)] = -g[(i, j)];
        }
    }
    let atb = amat.tr_matvec(b);
    let mut p = vec![0.0; 2 * n];
    for i in 0..n {
        p[i] = -2.0 * atb[i];
        p[i + n] = 2.0 * atb[i];
    }
    let offset = linalg::dot(b, b);
    let passes = crate::lattice::check_hessian_offdiag(&q)?;
    let fspec = QuadraticSpec::new_unchecked(q, p, offset, SignMode::Nonnegative)?;
    let inst = InstanceSpec {
        fspec,
        penalty: PenaltyKind::Cardinality { lambda: 1.0 },
        n: 2 * n,
        seed: 0,
        lambda: 1.0,
        mu_smooth: 0.0,
        b_target: b.to_vec(),
        d_factor: None,
    };
    Ok((inst, passes))
}

/// Coherence of a design matrix: the largest off-diagonal Gram entry after
/// normalizing columns to unit norm (signed by convention; see
/// [`coherence_abs`] for the absolute-value variant).
pub fn coherence(amat: &Matrix) -> Result<f64> {
    coherence_impl(amat, false)
}

/// Absolute-value coherence `max_{i≠j} |(AᵀA)_ij|` with normalized columns.
pub fn coherence_abs(amat: &Matrix) -> Result<f64> {
    coherence_impl(amat, true)
}

fn coherence_impl(amat: &Matrix, absolute: bool) -> Result<f64> {
    let (m, n) = (amat.rows(), amat.cols());
    let mut normalized = Matrix::zeros(m, n);
    for j in 0..n {
        let mut norm = 0.0;
        for i in 0..m {
            norm += amat[(i, j)] * amat[(i, j)];
        }
        let norm = norm.sqrt();
        if norm <= 1e-300 {
            return Err(Error::ZeroColumn(j));
        }
        for i in 0..m {
            normalized[(i, j)] = amat[(i, j)] / norm;
        }
    }
    let g = normalized.gram();
    let mut best = 0.0f64;
    let mut seen = false;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let v = if absolute { g[(i, j)].abs() } else { g[(i, j)] };
                best = if seen { best.max(v) } else { v };
                seen = true;
            }
        }
    }
    Ok(if seen { best } else { 0.0 })
}

/// Standard normal sample via Box-Muller; deterministic given the generator
/// state and stable across platforms.
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u1: f64 = rng.gen();
        if u1 > 1e-300 {
            let u2: f64 = rng.gen();
            return (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        }
    }
}
