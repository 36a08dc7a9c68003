//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use concordia_core::synth::generate_pair;
use concordia_core::Schema;

/// Synthetic schema pairs by size, smallest first.
pub const SIZES: &[(usize, usize)] = &[(100, 80), (400, 250), (1378, 784)];

pub fn pair(left: usize, right: usize) -> (Arc<Schema>, Arc<Schema>) {
    let (l, r) = generate_pair(42, left, right);
    (Arc::new(l), Arc::new(r))
}
