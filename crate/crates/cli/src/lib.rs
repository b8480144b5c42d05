//! Command line and HTTP service for graph Ramsey games.

pub mod commands;
pub mod service;
pub mod store;
