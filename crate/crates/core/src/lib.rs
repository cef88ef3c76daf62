//! Rank-metric codes for faulty networks and stacked quantum memories.
//!
//! The crate is organized bottom-up:
//!
//! - [`f2field`]: GF(2^n) arithmetic, trace, self-dual normal bases and bit-packed
//!   F2 linear algebra.
//! - [`linpoly`]: linearized polynomials `Σ a_i X^{2^i}`.
//! - [`gabidulin`]: Gabidulin codes, rank weight, duality and decoders.
//! - [`netcode`]: DAG networks computing `x ↦ Ax`, faulty edges and the coded
//!   transmission protocol.
//! - [`pauli`]: symplectic Pauli/Clifford machinery and the stacked circuit
//!   noise model.
//! - [`qgab`]: quantum Gabidulin (CSS) codes and end-to-end correction of
//!   stacked circuit faults.

pub mod f2field;
pub mod gabidulin;
pub mod linpoly;
pub mod netcode;
pub mod pauli;
pub mod qgab;
pub mod seed;
