//! Criterion benchmarks live in `benches/`; the acceptance suite is `tests/acceptance.rs`.
