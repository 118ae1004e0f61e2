//! Criterion benchmarks for xlingua live in `benches/`.
