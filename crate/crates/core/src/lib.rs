//! Exact solvers for regularized model selection problems of the form
//!
//! ```text
//!     minimize  f(x) + g(supp(x))    over x >= 0
//! ```
//!
//! with convex quadratic `f` and monotone submodular `g`. The continuous and
//! discrete decisions are coupled by reducing to a single submodular
//! set-function minimization: the set function `A -> g(A) + H(A)`, where
//! `H(A)` is the best value of `f` over supports inside `A`, is submodular
//! whenever the Hessian of `f` has nonpositive off-diagonal entries, so the
//! reduction is solved exactly by the minimum-norm point algorithm with
//! memoized convex inner solves.
//!
//! The crate also covers budget-constrained variants (the whole
//! regularization path from one convex problem, recovered by thresholding),
//! max-min robust problems driven by exact inner solves, the two literature
//! baselines (projected subgradient on the Lovász extension and discretized
//! minimization via pairwise Frank-Wolfe), and brute-force oracles for
//! everything at small sizes.

pub mod baselines;
pub mod constrained;
pub mod error;
pub mod inner;
pub mod lattice;
pub mod linalg;
pub mod models;
pub mod robust;
pub mod sfm;
pub mod subset;

pub use error::{Error, Result};
pub use inner::{CompositeFunction, InnerSolution, QuadraticSpec, SignMode};
pub use lattice::{BaseVertex, SetFunction, SetFunctionHandle};
pub use models::{InstanceSpec, PenaltyKind};
pub use sfm::{MinNormState, SfmResult};
pub use subset::Subset;
