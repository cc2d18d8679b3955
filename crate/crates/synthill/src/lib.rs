//! Synthesis of diagonal CNOT+T circuits and synthillation protocols.
//!
//! The toolkit works on weighted polynomials `F: Z2^k → Z8` describing
//! diagonal gates built from T, S, Z, CS, CZ and CCZ. It finds gate-synthesis
//! matrices with few T gates, compiles them into distillation matrices `G`
//! that suppress T-state noise quadratically, and computes exact success and
//! error polynomials for the resulting protocols.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod gf2;
pub mod polys;
pub mod synthesis;
pub mod synthillation;

pub use error::{Error, Result};
pub use gf2::BitMatrix;
pub use polys::{CircuitDescription, Gate, GateKind, PhasePolynomial, WeightedPolynomial};
