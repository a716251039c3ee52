//! Shared instance builders for the solver benchmarks.

use latsel_core::models::{gen_regression_instance, range_penalty_g};
use latsel_core::CompositeFunction;

/// Seeded sparse-regression composite at the given size.
pub fn regression_composite(n: usize, seed: u64) -> CompositeFunction {
    let inst = gen_regression_instance(n, seed, 0.05).expect("instance generation");
    let g = range_penalty_g(n, 0.05).expect("penalty");
    CompositeFunction::new(inst.fspec.clone(), g).expect("composite")
}
