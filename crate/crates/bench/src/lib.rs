//! Criterion benchmarks for dissipaq-core; see `benches/`.
