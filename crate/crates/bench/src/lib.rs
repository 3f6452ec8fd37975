//! Benchmark-only crate; see `benches/criteria.rs`.
