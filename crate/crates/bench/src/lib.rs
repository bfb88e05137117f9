//! Benchmark-only crate; see `benches/scattering.rs`.
