//! Optimal stopping on a random vertex reveal.
//!
//! The vertices of a known graph arrive in uniformly random order and a
//! player stops at some step `t`, collecting the number of connected
//! components among the vertices seen so far. This crate provides
//!
//! * lattice generators and occupancy pattern counts ([`graph`]),
//! * union-find simulation of reveal trajectories and site percolation
//!   ([`reveal`]),
//! * Monte Carlo estimation of the blind value curve and empirical checks of
//!   the coupling and concentration inequalities ([`estimator`]),
//! * exact small-graph game values by subset enumeration ([`oracle`]),
//! * the lattice bound polynomials and their certified maxima ([`bounds`]),
//! * graph JSON files ([`io`]) and the command-line front end ([`cli`]).

pub mod bounds;
pub mod cli;
pub mod error;
pub mod estimator;
pub mod exec;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod poly;
pub mod reveal;

pub use error::{Error, Result};
pub use exec::Exec;
pub use graph::{gen_lattice, CellList, Graph, LatticeKind, LatticeSpec, Occupancy};
