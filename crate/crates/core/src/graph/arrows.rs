use super::subgraph::{contains_mono, enumerate_copies_in};
use super::{refine, Cell, Color, Graph, Position};
use crate::error::{Error, Result};

/// Default limit on uncolored edges for [`arrows`].
pub const DEFAULT_ARROWS_CAP: usize = 28;

/// Targets with more automorphisms than this are compiled by testing subsets
/// of free edges instead of enumerating embeddings.
const EMBEDDING_AUT_LIMIT: u64 = 5_000;

/// Largest free-edge count for subset-based compilation.
const SUBSET_MAX_FREE: usize = 22;

/// For each color, the minimal sets of currently uncolored edges whose
/// coloring would complete a copy of that color's target, as bitmasks over
/// the free edges. A mask of 0 means the copy is already present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreatSet {
    free: Vec<usize>,
    bit: Vec<Option<u8>>,
    red: Vec<u64>,
    green: Vec<u64>,
}

fn minimal(mut masks: Vec<u64>) -> Vec<u64> {
    masks.sort_unstable_by_key(|m| (m.count_ones(), *m));
    masks.dedup();
    let mut kept: Vec<u64> = Vec::new();
    for m in masks {
        if !kept.iter().any(|&k| k & m == k) {
            kept.push(m);
        }
    }
    kept
}

impl ThreatSet {
    /// Compiles threats of `p` against `red_target` (for red) and
    /// `green_target` (for green). At most 64 uncolored edges are supported.
    pub fn compile(p: &Position, red_target: &Graph, green_target: &Graph) -> Result<Self> {
        let free = p.uncolored_edges();
        if free.len() > 64 {
            return Err(Error::BoardTooLarge(format!("{} uncolored edges, at most 64 supported", free.len())));
        }
        let mut bit = vec![None; p.cells().len()];
        for (i, &e) in free.iter().enumerate() {
            bit[e] = Some(i as u8);
        }
        let mut ts = ThreatSet { free, bit, red: Vec::new(), green: Vec::new() };
        ts.red = ts.compile_color(p, Color::Red, red_target)?;
        ts.green = ts.compile_color(p, Color::Green, green_target)?;
        Ok(ts)
    }

    fn compile_color(&self, p: &Position, color: Color, target: &Graph) -> Result<Vec<u64>> {
        let cell = color.cell();
        let board = p.board();
        let open: Vec<usize> = (0..board.edge_count())
            .filter(|&e| p.cell(e) == cell || p.cell(e) == Cell::Uncolored)
            .collect();
        let mut optimistic = p.clone();
        for &e in &self.free {
            optimistic.set(e, cell);
        }
        if !contains_mono(&optimistic, color, target) {
            return Ok(Vec::new());
        }
        if contains_mono(p, color, target) {
            return Ok(vec![0]);
        }
        let use_embeddings = target.is_clique() || {
            let shape = Position::empty(std::sync::Arc::new(target.clone()));
            refine::automorphism_count(&shape, refine::DEFAULT_NODE_BUDGET)
                .map(|a| a <= EMBEDDING_AUT_LIMIT.into())
                .unwrap_or(false)
        };
        if use_embeddings {
            let mut masks = Vec::new();
            enumerate_copies_in(board, &open, target, &mut |edges| {
                masks.push(self.mask_of(edges));
            });
            return Ok(minimal(masks));
        }
        let f = self.free.len();
        if f > SUBSET_MAX_FREE {
            return Err(Error::CapExceeded { needed: f, cap: SUBSET_MAX_FREE });
        }
        let mut by_size: Vec<u64> = (0..1u64 << f).collect();
        by_size.sort_unstable_by_key(|m| (m.count_ones(), *m));
        let mut kept: Vec<u64> = Vec::new();
        let mut trial = p.clone();
        for m in by_size {
            if kept.iter().any(|&k| k & m == k) {
                continue;
            }
            for (i, &e) in self.free.iter().enumerate() {
                trial.set(e, if m >> i & 1 == 1 { cell } else { Cell::Uncolored });
            }
            if contains_mono(&trial, color, target) {
                kept.push(m);
            }
        }
        Ok(kept)
    }

    fn mask_of(&self, edges: &[usize]) -> u64 {
        edges.iter().filter_map(|&e| self.bit[e]).fold(0, |m, b| m | 1 << b)
    }

    /// Board edge indices of the free edges; bit `i` of a mask is `free_edges()[i]`.
    pub fn free_edges(&self) -> &[usize] {
        &self.free
    }

    pub fn bit_of(&self, edge: usize) -> Option<u32> {
        self.bit.get(edge).copied().flatten().map(u32::from)
    }

    pub fn masks(&self, color: Color) -> &[u64] {
        match color {
            Color::Red => &self.red,
            Color::Green => &self.green,
        }
    }

    /// True iff coloring exactly the free edges in `set` with `color` (on top
    /// of the compiled position) yields a copy of that color's target.
    #[inline]
    pub fn completes(&self, color: Color, set: u64) -> bool {
        self.masks(color).iter().any(|&m| m & set == m)
    }

    /// Whether some threat of `color` is still completable when the other
    /// color holds `blocked`.
    pub fn alive(&self, color: Color, blocked: u64) -> bool {
        self.masks(color).iter().any(|&m| m & blocked == 0)
    }
}

pub fn arrows(p: &Position, target: &Graph) -> Result<bool> {
    arrows_with_cap(p, target, DEFAULT_ARROWS_CAP)
}

/// Whether every red/green completion of `p` contains a monochromatic `target`.
pub fn arrows_with_cap(p: &Position, target: &Graph, cap: usize) -> Result<bool> {
    let f = p.count(Cell::Uncolored);
    if f > cap.min(64) {
        return Err(Error::CapExceeded { needed: f, cap: cap.min(64) });
    }
    let ts = ThreatSet::compile(p, target, target)?;
    Ok(every_completion_hits(&ts, 0, f, 0, 0))
}

fn every_completion_hits(ts: &ThreatSet, i: usize, f: usize, red: u64, green: u64) -> bool {
    if ts.completes(Color::Red, red) || ts.completes(Color::Green, green) {
        return true;
    }
    if i == f || (!ts.alive(Color::Red, green) && !ts.alive(Color::Green, red)) {
        return false;
    }
    every_completion_hits(ts, i + 1, f, red | 1 << i, green) && every_completion_hits(ts, i + 1, f, red, green | 1 << i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn brute(p: &Position, target: &Graph) -> bool {
        let free = p.uncolored_edges();
        (0..1u64 << free.len()).all(|m| {
            let mut q = p.clone();
            for (i, &e) in free.iter().enumerate() {
                q.set(e, if m >> i & 1 == 1 { Cell::Red } else { Cell::Green });
            }
            contains_mono(&q, Color::Red, target) || contains_mono(&q, Color::Green, target)
        })
    }

    #[test]
    fn classic_arrowing() {
        let k3 = Graph::complete(3);
        assert!(arrows(&Position::empty(Arc::new(Graph::complete(6))), &k3).unwrap());
        assert!(!arrows(&Position::empty(Arc::new(Graph::complete(5))), &k3).unwrap());
        let k3_board = Arc::new(Graph::complete(3));
        let p = Position::with_colors(k3_board, &[0], &[]).unwrap();
        assert!(arrows(&p, &Graph::complete(2)).unwrap());
    }

    #[test]
    fn cap_is_enforced() {
        let p = Position::empty(Arc::new(Graph::complete(6)));
        assert!(matches!(arrows_with_cap(&p, &Graph::complete(3), 10), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn agrees_with_brute_force_on_small_boards() {
        let k3 = Graph::complete(3);
        let board = Arc::new(Graph::complete(5));
        for red in [vec![], vec![0], vec![0, 4], vec![0, 1, 9]] {
            for green in [vec![], vec![2], vec![5, 6]] {
                if red.iter().any(|e| green.contains(e)) {
                    continue;
                }
                let p = Position::with_colors(board.clone(), &red, &green).unwrap();
                assert_eq!(arrows(&p, &k3).unwrap(), brute(&p, &k3));
            }
        }
    }

    #[test]
    fn threat_masks_of_sim_start() {
        let p = Position::empty(Arc::new(Graph::complete(6)));
        let k3 = Graph::complete(3);
        let ts = ThreatSet::compile(&p, &k3, &k3).unwrap();
        assert_eq!(ts.masks(Color::Red).len(), 20);
        assert!(ts.masks(Color::Green).iter().all(|m| m.count_ones() == 3));
    }

    #[test]
    fn symmetric_targets_use_subset_compilation() {
        // Both missing edges are needed to finish the only copy.
        let topus = Graph::topus(2);
        let board = Arc::new(Graph::topus(2));
        let mut red: Vec<usize> = (0..board.edge_count()).collect();
        let free = [red.pop().unwrap(), red.remove(3)];
        let p = Position::with_colors(board, &red, &[]).unwrap();
        let ts = ThreatSet::compile(&p, &topus, &topus).unwrap();
        assert_eq!(ts.masks(Color::Red), &[0b11]);
        assert!(ts.masks(Color::Green).is_empty());
        assert_eq!(ts.free_edges().len(), free.len());
    }
}
