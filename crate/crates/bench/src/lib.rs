//! Criterion benchmarks for clustercc-core; the code lives in `benches/`.
