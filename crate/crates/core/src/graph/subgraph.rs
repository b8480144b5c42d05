use std::collections::HashSet;

use super::{Color, Graph, Position};
use crate::error::{Error, Result};

/// One color class of a position as a host graph for embedding searches.
struct Host {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    adj: Vec<Vec<u32>>,
}

impl Host {
    fn new(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Self {
        let words = n.div_ceil(64).max(1);
        let mut h = Host { n, words, rows: vec![0; n * words], adj: vec![Vec::new(); n] };
        for (a, b) in edges {
            h.rows[a * words + b / 64] |= 1 << (b % 64);
            h.rows[b * words + a / 64] |= 1 << (a % 64);
            h.adj[a].push(b as u32);
            h.adj[b].push(a as u32);
        }
        h
    }

    fn of_color(p: &Position, color: Color, extra: Option<usize>) -> Self {
        let cell = color.cell();
        let board = p.board();
        let edges = (0..board.edge_count())
            .filter(|&e| p.cell(e) == cell || Some(e) == extra)
            .map(|e| board.edge(e));
        Host::new(board.vertex_count(), edges)
    }

    #[inline]
    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.rows[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }
}

/// Order pattern vertices so each one has as many already-placed neighbours
/// as possible. `pinned` vertices come first, in the given order.
fn search_order(pattern: &Graph, pinned: &[usize]) -> Vec<usize> {
    let k = pattern.vertex_count();
    let deg = pattern.degrees();
    let mut order: Vec<usize> = pinned.to_vec();
    let mut placed = vec![false; k];
    for &v in pinned {
        placed[v] = true;
    }
    while order.len() < k {
        let next = (0..k)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let back = order.iter().filter(|&&u| pattern.has_edge(u, v)).count();
                (back, deg[v], std::cmp::Reverse(v))
            })
            .unwrap();
        placed[next] = true;
        order.push(next);
    }
    order
}

struct Matcher<'a> {
    host: &'a Host,
    host_deg: Vec<usize>,
    order: Vec<usize>,
    pat_deg: Vec<usize>,
    /// For each position in `order`, the earlier positions adjacent to it.
    back: Vec<Vec<usize>>,
    image: Vec<usize>,
    used: Vec<bool>,
}

impl<'a> Matcher<'a> {
    fn new(host: &'a Host, pattern: &Graph, pinned: &[usize]) -> Self {
        let order = search_order(pattern, pinned);
        let deg = pattern.degrees();
        let back = (0..order.len())
            .map(|i| (0..i).filter(|&j| pattern.has_edge(order[i], order[j])).collect())
            .collect();
        Matcher {
            host,
            host_deg: host.adj.iter().map(Vec::len).collect(),
            pat_deg: order.iter().map(|&v| deg[v]).collect(),
            order,
            back,
            image: Vec::new(),
            used: vec![false; host.n],
        }
    }

    fn fits(&self, depth: usize, x: usize) -> bool {
        !self.used[x]
            && self.host_deg[x] >= self.pat_deg[depth]
            && self.back[depth].iter().all(|&j| self.host.adjacent(self.image[j], x))
    }

    /// Extends the current partial embedding; `visit` returns true to stop.
    fn extend(&mut self, visit: &mut dyn FnMut(&[usize], &[usize]) -> bool) -> bool {
        let depth = self.image.len();
        if depth == self.order.len() {
            return visit(&self.order, &self.image);
        }
        let candidates: Vec<usize> = match self.back[depth].first() {
            Some(&j) => self.host.adj[self.image[j]].iter().map(|&x| x as usize).collect(),
            None => (0..self.host.n).collect(),
        };
        for x in candidates {
            if self.fits(depth, x) {
                self.used[x] = true;
                self.image.push(x);
                let stop = self.extend(visit);
                self.image.pop();
                self.used[x] = false;
                if stop {
                    return true;
                }
            }
        }
        false
    }

    fn place(&mut self, x: usize) -> bool {
        let depth = self.image.len();
        if !self.fits(depth, x) {
            return false;
        }
        self.used[x] = true;
        self.image.push(x);
        true
    }
}

fn has_clique(host: &Host, k: usize, cand: Vec<u64>) -> bool {
    if k == 0 {
        return true;
    }
    for w in 0..host.words {
        let mut bits = cand[w];
        while bits != 0 {
            let v = w * 64 + bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if k == 1 {
                return true;
            }
            // Restrict to later vertices so each clique is tried once.
            let mut next = vec![0u64; host.words];
            for (i, slot) in next.iter_mut().enumerate() {
                let later = match i.cmp(&w) {
                    std::cmp::Ordering::Less => 0,
                    std::cmp::Ordering::Equal => bits,
                    std::cmp::Ordering::Greater => cand[i],
                };
                *slot = later & host.row(v)[i];
            }
            if next.iter().map(|b| b.count_ones() as usize).sum::<usize>() + 1 >= k && has_clique(host, k - 1, next) {
                return true;
            }
        }
    }
    false
}

fn all_vertices(n: usize, words: usize) -> Vec<u64> {
    let mut v = vec![0u64; words];
    for i in 0..n {
        v[i / 64] |= 1 << (i % 64);
    }
    v
}

fn contains_in(host: &Host, target: &Graph) -> bool {
    if target.vertex_count() > host.n {
        return false;
    }
    if target.is_clique() {
        return has_clique(host, target.vertex_count(), all_vertices(host.n, host.words));
    }
    let mut m = Matcher::new(host, target, &[]);
    m.extend(&mut |_, _| true)
}

/// True iff the `color` part of `p` contains a subgraph isomorphic to `target`.
pub fn contains_mono(p: &Position, color: Color, target: &Graph) -> bool {
    contains_in(&Host::of_color(p, color, None), target)
}

/// Whether coloring `edge` with `color` creates a copy of `target` in that
/// color. Only copies through the new edge are examined.
pub fn move_completes(p: &Position, edge: usize, color: Color, target: &Graph) -> Result<bool> {
    if edge >= p.cells().len() {
        return Err(Error::EdgeOutOfRange(edge));
    }
    if p.cell(edge).color().is_some() {
        return Err(Error::EdgeColored(edge));
    }
    let host = Host::of_color(p, color, Some(edge));
    let (x, y) = p.board().edge(edge);
    if target.vertex_count() > host.n {
        return Ok(false);
    }
    if target.is_clique() {
        let k = target.vertex_count();
        let cand: Vec<u64> = host.row(x).iter().zip(host.row(y)).map(|(a, b)| a & b).collect();
        return Ok(has_clique(&host, k - 2, cand));
    }
    for &(a, b) in target.edges() {
        let (a, b) = (a as usize, b as usize);
        for (u, v) in [(a, b), (b, a)] {
            let mut m = Matcher::new(&host, target, &[u, v]);
            if m.place(x) && m.place(y) && m.extend(&mut |_, _| true) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Every copy of `target` in `board`, as a sorted list of board edge indices.
/// Copies are distinct edge sets; the order is deterministic.
pub fn enumerate_copies(board: &Graph, target: &Graph) -> Vec<Vec<usize>> {
    let all: Vec<usize> = (0..board.edge_count()).collect();
    let mut seen = HashSet::new();
    enumerate_copies_in(board, &all, target, &mut |edges| {
        seen.insert(edges.to_vec());
    });
    let mut copies: Vec<_> = seen.into_iter().collect();
    copies.sort();
    copies
}

/// Calls `visit` with the sorted edge set of every embedding of `target` into
/// the subgraph of `board` formed by `allowed` edges. A copy is reported once
/// per automorphism of `target`.
pub(crate) fn enumerate_copies_in(board: &Graph, allowed: &[usize], target: &Graph, visit: &mut dyn FnMut(&[usize])) {
    let host = Host::new(board.vertex_count(), allowed.iter().map(|&e| board.edge(e)));
    if target.vertex_count() > host.n {
        return;
    }
    let mut m = Matcher::new(&host, target, &[]);
    let mut edges = Vec::with_capacity(target.edge_count());
    let mut map = vec![0usize; target.vertex_count()];
    m.extend(&mut |order, image| {
        for (&pv, &hv) in order.iter().zip(image) {
            map[pv] = hv;
        }
        edges.clear();
        edges.extend(
            target
                .edges()
                .iter()
                .map(|&(a, b)| board.edge_index(map[a as usize], map[b as usize]).expect("embedded edge")),
        );
        edges.sort_unstable();
        visit(&edges);
        false
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn k6() -> Arc<Graph> {
        Arc::new(Graph::complete(6))
    }

    /// Pentagon red, pentagram green.
    fn fig2_k5() -> Position {
        let b = Arc::new(Graph::complete(5));
        let red: Vec<usize> = [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]
            .iter()
            .map(|&(i, j)| b.edge_index(i, j).unwrap())
            .collect();
        let green: Vec<usize> = (0..10).filter(|e| !red.contains(e)).collect();
        Position::with_colors(b, &red, &green).unwrap()
    }

    #[test]
    fn explicit_triangle() {
        let b = k6();
        let red = [b.edge_index(0, 1).unwrap(), b.edge_index(1, 2).unwrap(), b.edge_index(0, 2).unwrap()];
        let p = Position::with_colors(b, &red, &[]).unwrap();
        let k3 = Graph::complete(3);
        assert!(contains_mono(&p, Color::Red, &k3));
        assert!(!contains_mono(&p, Color::Green, &k3));
        assert!(!contains_mono(&Position::empty(k6()), Color::Red, &k3));
    }

    #[test]
    fn pentagon_pentagram_has_no_mono_triangle() {
        let p = fig2_k5();
        let k3 = Graph::complete(3);
        assert!(!contains_mono(&p, Color::Red, &k3));
        assert!(!contains_mono(&p, Color::Green, &k3));
        // The generic matcher agrees with the clique path.
        let path3 = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert!(contains_mono(&p, Color::Red, &path3));
    }

    #[test]
    fn move_completion() {
        let b = k6();
        let red = [b.edge_index(0, 1).unwrap(), b.edge_index(1, 2).unwrap()];
        let p = Position::with_colors(b.clone(), &red, &[]).unwrap();
        let k3 = Graph::complete(3);
        assert!(move_completes(&p, b.edge_index(0, 2).unwrap(), Color::Red, &k3).unwrap());
        assert!(!move_completes(&p, b.edge_index(3, 4).unwrap(), Color::Red, &k3).unwrap());
        assert!(move_completes(&p, red[0], Color::Red, &k3).is_err());
        let bow = Graph::bowtie();
        assert!(!move_completes(&p, b.edge_index(0, 2).unwrap(), Color::Red, &bow).unwrap());
    }

    #[test]
    fn copy_counts() {
        assert_eq!(enumerate_copies(&Graph::complete(6), &Graph::complete(3)).len(), 20);
        assert_eq!(enumerate_copies(&Graph::complete(5), &Graph::bowtie()).len(), 15);
        assert_eq!(enumerate_copies(&Graph::complete(4), &Graph::new(3, [(0, 1), (1, 2)]).unwrap()).len(), 12);
    }
}
