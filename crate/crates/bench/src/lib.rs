//! Criterion benchmarks for the composition and combination hot paths; see `benches/`.
