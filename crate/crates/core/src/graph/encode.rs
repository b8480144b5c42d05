use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::{Cell, Graph, Position};
use crate::error::{Error, Result};

/// Base-3 code of a position: `sum colors[i] * 3^i` over edge indices.
pub fn encode_position(p: &Position) -> BigUint {
    let mut code = BigUint::zero();
    for &c in p.cells().iter().rev() {
        code *= 3u32;
        code += c.digit() as u32;
    }
    code
}

/// The same code as a `u64`, for boards with at most 40 edges.
pub fn encode_u64(p: &Position) -> Option<u64> {
    if p.cells().len() > 40 {
        return None;
    }
    Some(p.cells().iter().rev().fold(0u64, |acc, c| acc * 3 + c.digit() as u64))
}

/// Inverse of [`encode_position`].
pub fn decode_position(code: &BigUint, board: Arc<Graph>) -> Result<Position> {
    let edges = board.edge_count();
    let limit = BigUint::from(3u32).pow(edges as u32);
    if code >= &limit {
        return Err(Error::CodeOutOfRange { code: code.to_string(), edges });
    }
    let mut rest = code.clone();
    let three = BigUint::from(3u32);
    let mut cells = Vec::with_capacity(edges);
    for _ in 0..edges {
        let digit = (&rest % &three).to_u8().expect("digit below 3");
        cells.push(Cell::from_digit(digit).expect("digit below 3"));
        rest /= &three;
    }
    Position::from_cells(board, cells)
}
