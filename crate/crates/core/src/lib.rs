//! Exact symbolic kernel for tame inertial types of `GL_n` over a p-adic
//! field: Hecke algebra presentations, partial Frobenius families and the
//! evaluation maps of the mod-p Satake dictionary, with brute-force oracles.

pub mod bk_frobenius;
pub mod coset_oracle;
pub mod galois_points;
pub mod hecke;
pub mod laurent;
pub mod matrix;
pub mod ring;
pub mod root_data;
pub mod scalars;
pub mod suites;
pub mod tame_types;
