//! Graph Ramsey games: exact solving, adaptive play, reduction gadgets and
//! isomorph counting.

pub mod counting;
pub mod error;
pub mod exec;
pub mod game;
pub mod graph;
pub mod player;
pub mod reductions;
pub mod solver;

pub use error::{Error, Result};
