//! Benchmarks for the pricing library; see `benches/pricing.rs`.
