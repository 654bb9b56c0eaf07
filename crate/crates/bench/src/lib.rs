//! Benchmarks for the quadrature-heavy routines live in `benches/`.
