//! Criterion benchmarks for the eigensolver and the quench pipeline; see
//! `benches/`.
