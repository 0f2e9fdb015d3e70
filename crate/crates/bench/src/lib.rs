//! Criterion benchmarks for `ciequil-core`; see `benches/`.
