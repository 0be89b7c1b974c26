//! Criterion benchmarks for operator construction and Stokeslet sums.
