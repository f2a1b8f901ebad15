//! Simulation suite for hybrid quantum-automaton circuits with composite
//! measurements: a shared circuit representation, four cross-validating
//! engines (stabilizer tableau, automaton Monte Carlo, classical bit-string /
//! bond-percolation dynamics, dense statevector oracle), and a statistics and
//! fitting layer with a reproducible experiment runner on top.

pub mod analysis;
pub mod bits;
pub mod circuit;
pub mod classical;
pub mod error;
pub mod gf2;
pub mod mc;
pub mod oracle;
pub mod phase;
pub mod rng;
pub mod runner;
pub mod stabilizer;

pub use error::{Error, Result};
