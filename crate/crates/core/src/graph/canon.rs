use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::One;

use super::refine::{self, DEFAULT_NODE_BUDGET};
use super::{encode_position, Cell, Color, Graph, Position};
use crate::error::{Error, Result};

/// Largest complete board canonicalized by trying every vertex permutation.
pub const BRUTE_FORCE_MAX_N: usize = 8;

/// Boards up to this size get per-permutation byte lookup tables.
const TABLE_MAX_N: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CanonOptions {
    /// Also identify a position with its red/green swap.
    pub swap_quotient: bool,
    /// Search-tree node budget for boards above [`BRUTE_FORCE_MAX_N`].
    pub node_budget: usize,
}

impl Default for CanonOptions {
    fn default() -> Self {
        CanonOptions { swap_quotient: false, node_budget: DEFAULT_NODE_BUDGET }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    pub code: BigUint,
    pub side_to_move: Option<Color>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canonical {
    pub key: CanonicalKey,
    pub representative: Position,
    /// Number of labeled positions isomorphic to the input.
    pub orbit_size: BigUint,
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

pub fn canonicalize(p: &Position) -> Result<Canonical> {
    canonicalize_with(p, &CanonOptions::default())
}

/// Canonical form of a position on a complete board.
///
/// Up to [`BRUTE_FORCE_MAX_N`] vertices the key is the minimum code over all
/// vertex permutations. Above that it is the minimum leaf code of an
/// individualization-refinement tree, which is still a complete invariant.
pub fn canonicalize_with(p: &Position, opts: &CanonOptions) -> Result<Canonical> {
    let board = p.board();
    if !board.is_complete() {
        return Err(Error::InvalidGraph("canonical forms are defined for complete boards only".into()));
    }
    let n = board.vertex_count();
    if n <= BRUTE_FORCE_MAX_N {
        let kc = KnCanonizer::shared(n)?;
        let (red, green) = kc.masks(p);
        let (mut code, stab) = kc.code_and_stabilizer(red, green);
        if opts.swap_quotient {
            code = code.min(kc.code(green, red));
        }
        let representative = kc.position(code, board.clone());
        return Ok(Canonical {
            key: CanonicalKey { code: BigUint::from(code), side_to_move: None },
            representative,
            orbit_size: factorial(n) / BigUint::from(stab),
        });
    }
    let (mut representative, aut) = refine::refined_canonical_form(p, opts.node_budget)?;
    let mut code = encode_position(&representative);
    if opts.swap_quotient {
        let (other, _) = refine::refined_canonical_form(&p.swapped(), opts.node_budget)?;
        let other_code = encode_position(&other);
        if other_code < code {
            code = other_code;
            representative = other;
        }
    }
    Ok(Canonical {
        key: CanonicalKey { code, side_to_move: None },
        representative,
        orbit_size: factorial(n) / aut,
    })
}

/// `n! / |Aut(p)|` for a position on a complete board.
pub fn orbit_size(p: &Position) -> Result<BigUint> {
    let n = p.board().vertex_count();
    if !p.board().is_complete() {
        return Err(Error::InvalidGraph("orbit sizes are defined for complete boards only".into()));
    }
    if n <= BRUTE_FORCE_MAX_N {
        let kc = KnCanonizer::shared(n)?;
        let (red, green) = kc.masks(p);
        let (_, stab) = kc.code_and_stabilizer(red, green);
        return Ok(factorial(n) / BigUint::from(stab));
    }
    Ok(factorial(n) / refine::automorphism_count(p, DEFAULT_NODE_BUDGET)?)
}

/// Brute-force canonizer for `K_n`, `n <= 8`, working on red/green bitmasks
/// over edge indices.
pub struct KnCanonizer {
    n: usize,
    edges: usize,
    perm_count: usize,
    /// `edge_image[k * edges + e]` is where permutation `k` sends edge `e`.
    edge_image: Vec<u8>,
    pow3: Vec<u64>,
    chunks: usize,
    /// `table[(k * chunks + c) * 256 + b]`: code contribution of byte `b` of
    /// a digit-1 mask in chunk `c` under permutation `k`.
    table: Vec<u64>,
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn kn_edge_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl KnCanonizer {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > BRUTE_FORCE_MAX_N {
            return Err(Error::BoardTooLarge(format!(
                "brute-force canonizer handles 1..={BRUTE_FORCE_MAX_N} vertices, got {n}"
            )));
        }
        let edges = n * (n - 1) / 2;
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut edge_image = Vec::new();
        let mut perm_count = 0;
        loop {
            for &(i, j) in &pairs {
                edge_image.push(kn_edge_index(n, perm[i], perm[j]) as u8);
            }
            perm_count += 1;
            if !next_permutation(&mut perm) {
                break;
            }
        }
        let pow3: Vec<u64> = (0..edges.max(1)).map(|e| 3u64.pow(e as u32)).collect();
        let (chunks, table) = if n <= TABLE_MAX_N {
            let chunks = edges.div_ceil(8).max(1);
            let mut table = vec![0u64; perm_count * chunks * 256];
            for k in 0..perm_count {
                for c in 0..chunks {
                    let slot = &mut table[(k * chunks + c) * 256..(k * chunks + c + 1) * 256];
                    for b in 1..256usize {
                        let low = b.trailing_zeros() as usize;
                        let e = 8 * c + low;
                        let add = if e < edges { pow3[edge_image[k * edges + e] as usize] } else { 0 };
                        slot[b] = slot[b & (b - 1)] + add;
                    }
                }
            }
            (chunks, table)
        } else {
            (0, Vec::new())
        };
        Ok(KnCanonizer { n, edges, perm_count, edge_image, pow3, chunks, table })
    }

    /// Process-wide cached canonizer for `K_n`.
    pub fn shared(n: usize) -> Result<Arc<KnCanonizer>> {
        static CACHE: [OnceLock<Arc<KnCanonizer>>; BRUTE_FORCE_MAX_N + 1] =
            [const { OnceLock::new() }; BRUTE_FORCE_MAX_N + 1];
        if n == 0 || n > BRUTE_FORCE_MAX_N {
            return Err(Error::BoardTooLarge(format!("no brute-force canonizer for n={n}")));
        }
        if let Some(kc) = CACHE[n].get() {
            return Ok(kc.clone());
        }
        let kc = Arc::new(KnCanonizer::new(n)?);
        Ok(CACHE[n].get_or_init(|| kc).clone())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn permutation_count(&self) -> usize {
        self.perm_count
    }

    /// Red and green edge bitmasks of a position on `K_n`.
    pub fn masks(&self, p: &Position) -> (u64, u64) {
        let mut red = 0u64;
        let mut green = 0u64;
        for (e, &c) in p.cells().iter().enumerate() {
            match c {
                Cell::Red => red |= 1 << e,
                Cell::Green => green |= 1 << e,
                Cell::Uncolored => {}
            }
        }
        (red, green)
    }

    #[inline]
    fn permuted_code(&self, k: usize, red: u64, green: u64) -> u64 {
        if self.chunks > 0 {
            let base = k * self.chunks * 256;
            let mut code = 0;
            for c in 0..self.chunks {
                let t = &self.table[base + c * 256..base + (c + 1) * 256];
                code += t[((red >> (8 * c)) & 255) as usize] + 2 * t[((green >> (8 * c)) & 255) as usize];
            }
            code
        } else {
            let img = &self.edge_image[k * self.edges..(k + 1) * self.edges];
            let mut code = 0;
            let mut m = red;
            while m != 0 {
                code += self.pow3[img[m.trailing_zeros() as usize] as usize];
                m &= m - 1;
            }
            let mut m = green;
            while m != 0 {
                code += 2 * self.pow3[img[m.trailing_zeros() as usize] as usize];
                m &= m - 1;
            }
            code
        }
    }

    /// Minimum code over all vertex permutations.
    pub fn code(&self, red: u64, green: u64) -> u64 {
        (0..self.perm_count).map(|k| self.permuted_code(k, red, green)).min().unwrap_or(0)
    }

    /// Minimum code and the number of permutations attaining it, which is the
    /// order of the position's automorphism group.
    pub fn code_and_stabilizer(&self, red: u64, green: u64) -> (u64, usize) {
        let mut best = u64::MAX;
        let mut hits = 0;
        for k in 0..self.perm_count {
            let c = self.permuted_code(k, red, green);
            if c < best {
                best = c;
                hits = 1;
            } else if c == best {
                hits += 1;
            }
        }
        (best, hits)
    }

    /// Decodes a `u64` code into red/green masks.
    pub fn code_masks(&self, mut code: u64) -> (u64, u64) {
        let mut red = 0;
        let mut green = 0;
        for e in 0..self.edges {
            match code % 3 {
                1 => red |= 1 << e,
                2 => green |= 1 << e,
                _ => {}
            }
            code /= 3;
        }
        (red, green)
    }

    pub fn position(&self, code: u64, board: Arc<Graph>) -> Position {
        let (red, green) = self.code_masks(code);
        let cells = (0..self.edges)
            .map(|e| {
                if red >> e & 1 == 1 {
                    Cell::Red
                } else if green >> e & 1 == 1 {
                    Cell::Green
                } else {
                    Cell::Uncolored
                }
            })
            .collect();
        Position::from_cells(board, cells).expect("edge count matches")
    }
}
