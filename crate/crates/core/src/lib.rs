//! Bounded model checking for networks of timed automata with bounded
//! integer variables and channel synchronization.
//!
//! The pipeline is: [`model`] text → [`ta::Network`] → [`encoder`] builds a
//! [`term::Script`] over BitVectors and reals → [`solver`] runs an external
//! SMT-LIB2 solver → [`trace`] decodes the model into a lasso-shaped run and
//! replays it against the executable semantics in [`ta::semantics`].

pub mod bench;
pub mod check;
pub mod cli;
pub mod encoder;
pub mod model;
pub mod property;
pub mod solver;
pub mod span;
pub mod ta;
pub mod term;
pub mod trace;
