//! Criterion benchmarks for `isetlab-core`; see `benches/`.
