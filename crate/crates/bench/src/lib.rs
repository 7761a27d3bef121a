//! Criterion benchmarks for `nsa-core`; the benchmarks live under `benches/`.
