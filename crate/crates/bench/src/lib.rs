//! Criterion benchmarks for the eigensolvers and path enumeration live in `benches/`.
