//! Individualization-refinement for colored complete boards too large for
//! brute force. Automorphism group orders come from a stabilizer chain along
//! the first path of the search tree; every automorphism used is verified.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use num_bigint::BigUint;
use num_traits::One;

use super::Position;
use crate::error::{Error, Result};

pub const DEFAULT_NODE_BUDGET: usize = 2_000_000;

/// Non-edges get digit 3 and the diagonal digit 4, so the same code handles
/// arbitrary boards.
const COLORS: usize = 5;

struct Matrix {
    n: usize,
    m: Vec<u8>,
}

impl Matrix {
    fn of(p: &Position) -> Self {
        let n = p.board().vertex_count();
        let mut m = vec![3u8; n * n];
        for v in 0..n {
            m[v * n + v] = 4;
        }
        for (e, &(i, j)) in p.board().edges().iter().enumerate() {
            let d = p.cell(e).digit();
            m[i as usize * n + j as usize] = d;
            m[j as usize * n + i as usize] = d;
        }
        Matrix { n, m }
    }

    #[inline]
    fn at(&self, u: u32, v: u32) -> u8 {
        self.m[u as usize * self.n + v as usize]
    }
}

type Cells = Vec<Vec<u32>>;

struct Node {
    cells: Cells,
    trace: u64,
}

struct Budget(usize);

impl Budget {
    fn tick(&mut self) -> Result<()> {
        if self.0 == 0 {
            return Err(Error::OrbitTimeout);
        }
        self.0 -= 1;
        Ok(())
    }
}

/// Splits cells by neighbour-color counts into every cell until stable.
fn refine(mx: &Matrix, mut cells: Cells) -> Node {
    let n = mx.n;
    let mut trace = DefaultHasher::new();
    let mut cell_of = vec![0usize; n];
    loop {
        for (k, cell) in cells.iter().enumerate() {
            for &v in cell {
                cell_of[v as usize] = k;
            }
        }
        let width = cells.len() * COLORS;
        let mut out: Cells = Vec::with_capacity(n);
        let mut split = false;
        for cell in &cells {
            if cell.len() == 1 {
                out.push(cell.clone());
                continue;
            }
            let mut keyed: Vec<(Vec<u16>, u32)> = cell
                .iter()
                .map(|&v| {
                    let mut sig = vec![0u16; width];
                    for u in 0..n as u32 {
                        sig[cell_of[u as usize] * COLORS + mx.at(v, u) as usize] += 1;
                    }
                    (sig, v)
                })
                .collect();
            keyed.sort_unstable();
            let mut start = 0;
            for i in 1..=keyed.len() {
                if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                    keyed[start].0.hash(&mut trace);
                    (i - start).hash(&mut trace);
                    out.push(keyed[start..i].iter().map(|x| x.1).collect());
                    if i - start != keyed.len() {
                        split = true;
                    }
                    start = i;
                }
            }
        }
        cells = out;
        if !split {
            break;
        }
    }
    Node { cells, trace: trace.finish() }
}

fn target_cell(cells: &Cells) -> Option<usize> {
    cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.len() > 1)
        .min_by_key(|(i, c)| (c.len(), *i))
        .map(|(i, _)| i)
}

fn individualize(cells: &Cells, t: usize, x: u32) -> Cells {
    let mut out = Vec::with_capacity(cells.len() + 1);
    out.extend(cells[..t].iter().cloned());
    out.push(vec![x]);
    out.push(cells[t].iter().copied().filter(|&v| v != x).collect());
    out.extend(cells[t + 1..].iter().cloned());
    out
}

fn shapes_match(a: &Node, b: &Node) -> bool {
    a.trace == b.trace
        && a.cells.len() == b.cells.len()
        && a.cells.iter().zip(&b.cells).all(|(x, y)| x.len() == y.len())
}

/// Searches for an automorphism mapping node `a` onto node `b`.
fn find_iso(mx: &Matrix, a: &Node, b: &Node, budget: &mut Budget) -> Result<Option<Vec<u32>>> {
    budget.tick()?;
    let Some(t) = target_cell(&a.cells) else {
        let mut perm = vec![0u32; mx.n];
        for (x, y) in a.cells.iter().zip(&b.cells) {
            perm[x[0] as usize] = y[0];
        }
        let n = mx.n as u32;
        let ok = (0..n).all(|u| (u + 1..n).all(|v| mx.at(u, v) == mx.at(perm[u as usize], perm[v as usize])));
        return Ok(ok.then_some(perm));
    };
    let x = a.cells[t][0];
    let a2 = refine(mx, individualize(&a.cells, t, x));
    for &y in &b.cells[t] {
        let b2 = refine(mx, individualize(&b.cells, t, y));
        if shapes_match(&a2, &b2) {
            if let Some(perm) = find_iso(mx, &a2, &b2, budget)? {
                return Ok(Some(perm));
            }
        }
    }
    Ok(None)
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n as u32).collect())
    }

    fn find(&mut self, x: u32) -> u32 {
        let mut r = x;
        while self.0[r as usize] != r {
            r = self.0[r as usize];
        }
        let mut x = x;
        while self.0[x as usize] != r {
            let next = self.0[x as usize];
            self.0[x as usize] = r;
            x = next;
        }
        r
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb) as usize] = ra.min(rb);
        }
    }

    fn absorb(&mut self, perm: &[u32]) {
        for (x, &y) in perm.iter().enumerate() {
            self.union(x as u32, y);
        }
    }
}

fn fixes(perm: &[u32], prefix: &[u32]) -> bool {
    prefix.iter().all(|&v| perm[v as usize] == v)
}

struct Group {
    order: BigUint,
    generators: Vec<Vec<u32>>,
}

fn automorphisms(mx: &Matrix, budget: &mut Budget) -> Result<Group> {
    let n = mx.n;
    let mut path = vec![refine(mx, vec![(0..n as u32).collect()])];
    let mut choices = Vec::new();
    while let Some(t) = target_cell(&path.last().unwrap().cells) {
        budget.tick()?;
        let v = path.last().unwrap().cells[t][0];
        choices.push((t, v));
        let next = refine(mx, individualize(&path.last().unwrap().cells, t, v));
        path.push(next);
    }
    let mut order = BigUint::one();
    let mut generators: Vec<Vec<u32>> = Vec::new();
    for level in (0..choices.len()).rev() {
        let (t, v) = choices[level];
        let prefix: Vec<u32> = choices[..level].iter().map(|c| c.1).collect();
        let mut uf = UnionFind::new(n);
        for g in generators.iter().filter(|g| fixes(g, &prefix)) {
            uf.absorb(g);
        }
        let mut failed: Vec<u32> = Vec::new();
        for &w in &path[level].cells[t] {
            if w == v || uf.find(w) == uf.find(v) || failed.iter().any(|&f| uf.find(f) == uf.find(w)) {
                continue;
            }
            let b = refine(mx, individualize(&path[level].cells, t, w));
            let found = if shapes_match(&path[level + 1], &b) {
                find_iso(mx, &path[level + 1], &b, budget)?
            } else {
                None
            };
            match found {
                Some(g) => {
                    uf.absorb(&g);
                    generators.push(g);
                }
                None => failed.push(w),
            }
        }
        let root = uf.find(v);
        let orbit = path[level].cells[t].iter().filter(|&&w| uf.find(w) == root).count();
        order *= orbit as u64;
    }
    Ok(Group { order, generators })
}

/// Leaf code digits listed from the highest edge index down, so plain
/// lexicographic comparison orders leaves by code.
fn leaf_key(mx: &Matrix, cells: &Cells) -> Vec<u8> {
    let n = mx.n;
    let mut key = Vec::with_capacity(n * (n - 1) / 2);
    for i in (0..n).rev() {
        for j in (i + 1..n).rev() {
            key.push(mx.at(cells[i][0], cells[j][0]));
        }
    }
    key
}

fn min_leaf(
    mx: &Matrix,
    node: &Node,
    prefix: &mut Vec<u32>,
    generators: &[Vec<u32>],
    best: &mut Option<(Vec<u8>, Cells)>,
    budget: &mut Budget,
) -> Result<()> {
    budget.tick()?;
    let Some(t) = target_cell(&node.cells) else {
        let key = leaf_key(mx, &node.cells);
        if best.as_ref().is_none_or(|(b, _)| key < *b) {
            *best = Some((key, node.cells.clone()));
        }
        return Ok(());
    };
    let mut uf = UnionFind::new(mx.n);
    for g in generators.iter().filter(|g| fixes(g, prefix)) {
        uf.absorb(g);
    }
    let mut seen = Vec::new();
    for &w in &node.cells[t] {
        let r = uf.find(w);
        if seen.contains(&r) {
            continue;
        }
        seen.push(r);
        let child = refine(mx, individualize(&node.cells, t, w));
        prefix.push(w);
        min_leaf(mx, &child, prefix, generators, best, budget)?;
        prefix.pop();
    }
    Ok(())
}

/// Order of the group of vertex permutations preserving the board and the
/// coloring.
pub fn automorphism_count(p: &Position, node_budget: usize) -> Result<BigUint> {
    let mx = Matrix::of(p);
    Ok(automorphisms(&mx, &mut Budget(node_budget))?.order)
}

/// Canonical representative (minimum leaf of the refinement tree, pruned by
/// automorphisms) together with the automorphism group order.
pub fn refined_canonical_form(p: &Position, node_budget: usize) -> Result<(Position, BigUint)> {
    if !p.board().is_complete() {
        return Err(Error::InvalidGraph("canonical forms are defined for complete boards only".into()));
    }
    let mx = Matrix::of(p);
    let mut budget = Budget(node_budget);
    let group = automorphisms(&mx, &mut budget)?;
    let root = refine(&mx, vec![(0..mx.n as u32).collect()]);
    let mut best = None;
    min_leaf(&mx, &root, &mut Vec::new(), &group.generators, &mut best, &mut budget)?;
    let (_, cells) = best.expect("the tree has at least one leaf");
    let mut label = vec![0usize; mx.n];
    for (i, c) in cells.iter().enumerate() {
        label[c[0] as usize] = i;
    }
    Ok((p.permuted(&label)?, group.order))
}
