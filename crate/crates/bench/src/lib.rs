//! Criterion benchmarks for hoplab; see `benches/`.
