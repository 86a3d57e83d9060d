//! Seeded generators for benchmark and test instances.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::io::DimacsProblem;

/// A uniform random k-CNF: each clause picks `width` distinct variables and
/// independent random signs.
pub fn random_kcnf(num_vars: usize, num_clauses: usize, width: usize, seed: u64) -> DimacsProblem {
    assert!(width <= num_vars, "clause width exceeds the variable count");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clauses = (0..num_clauses)
        .map(|_| {
            let mut vs: Vec<usize> = index::sample(&mut rng, num_vars, width).into_vec();
            vs.sort_unstable();
            vs.into_iter()
                .map(|v| {
                    let lit = v as i32 + 1;
                    if rng.gen() {
                        lit
                    } else {
                        -lit
                    }
                })
                .collect()
        })
        .collect();
    DimacsProblem { num_vars, clauses }
}

/// A seeded permutation of `items`.
pub fn shuffled<T: Clone>(items: &[T], seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = items.to_vec();
    out.shuffle(&mut rng);
    out
}
