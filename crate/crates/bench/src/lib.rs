//! Criterion benchmarks for `maxent-core`; see `benches/`.
