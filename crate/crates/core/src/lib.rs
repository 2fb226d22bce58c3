//! Fault-tolerant fusion networks: Pauli algebra, small state-vector checks,
//! fusion-network construction, syndrome lattices, matching decoding and
//! Monte Carlo threshold estimation.

pub mod decoder;
mod gf2;
pub mod lattice;
pub mod montecarlo;
pub mod network;
pub mod pauli;
pub mod statevec;
pub mod verify;
