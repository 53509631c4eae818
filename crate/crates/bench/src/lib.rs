//! Criterion benchmarks for `extbeam-core`; see `benches/`.
