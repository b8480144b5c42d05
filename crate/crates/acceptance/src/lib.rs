//! Holds the workspace acceptance test (`cargo test -p ramsey-validation`).
//! The crate has no library code.
