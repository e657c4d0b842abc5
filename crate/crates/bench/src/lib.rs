//! Criterion benchmarks of the numerical kernels; see `benches/`.

pub use omegachan;
