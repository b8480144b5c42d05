use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::GameSpec;
use crate::graph::{contains_mono, Cell, Color, Graph, Position, ThreatSet};

/// The bundled coloring of `K_17`: `{i, j}` is red iff `i - j` is a nonzero
/// square mod 17.
pub const K17_WITNESS: &str = include_str!("../../data/k17-witness.txt");

pub fn bundled_k17_witness() -> Position {
    parse_witness(K17_WITNESS).expect("bundled witness parses")
}

/// Reads the witness format: the vertex count on the first line, then one
/// `i j c` line per colored edge with `c` in `{r, g}`.
pub fn parse_witness(text: &str) -> Result<Position> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let n: usize = lines
        .next()
        .and_then(|l| l.parse().ok())
        .ok_or_else(|| Error::Parse("expected the vertex count".into()))?;
    let board = Arc::new(Graph::complete(n));
    let mut p = Position::empty(board.clone());
    for line in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [i, j, c] = parts[..] else {
            return Err(Error::Parse(format!("bad witness line `{line}`")));
        };
        let num = |s: &str| s.parse::<usize>().map_err(|e| Error::Parse(format!("`{s}`: {e}")));
        let (i, j) = (num(i)?, num(j)?);
        let e = board.edge_index(i, j).ok_or_else(|| Error::Parse(format!("no edge {i}-{j} on K_{n}")))?;
        let cell = match c {
            "r" => Cell::Red,
            "g" => Cell::Green,
            _ => return Err(Error::Parse(format!("bad color `{c}`"))),
        };
        if p.cell(e) != Cell::Uncolored {
            return Err(Error::Parse(format!("edge {i}-{j} listed twice")));
        }
        p.set(e, cell);
    }
    Ok(p)
}

pub fn write_witness(p: &Position) -> String {
    let board = p.board();
    let mut out = format!("{}\n", board.vertex_count());
    for e in 0..board.edge_count() {
        let (i, j) = board.edge(e);
        match p.cell(e) {
            Cell::Red => writeln!(out, "{i} {j} r").unwrap(),
            Cell::Green => writeln!(out, "{i} {j} g").unwrap(),
            Cell::Uncolored => {}
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub n: usize,
    pub k: usize,
    pub red_edges: usize,
    pub green_edges: usize,
    pub mono_free: bool,
    pub red_degrees: Vec<usize>,
    pub green_degrees: Vec<usize>,
    /// The common red and green degree when both color classes are regular.
    pub regular: Option<(usize, usize)>,
}

impl WitnessReport {
    pub fn passes(&self) -> bool {
        self.mono_free
    }
}

fn degrees(p: &Position, cell: Cell) -> Vec<usize> {
    let board = p.board();
    let mut d = vec![0; board.vertex_count()];
    for e in p.edges_of(cell) {
        let (a, b) = board.edge(e);
        d[a] += 1;
        d[b] += 1;
    }
    d
}

/// Checks a full coloring of a complete board for monochromatic `K_k` and
/// reports the degree of every vertex in each color.
pub fn verify_witness(p: &Position, k: usize) -> Result<WitnessReport> {
    if !p.board().is_complete() || !p.is_full() {
        return Err(Error::InvalidPosition("a witness is a full coloring of a complete board".into()));
    }
    let kk = Graph::complete(k);
    let red_degrees = degrees(p, Cell::Red);
    let green_degrees = degrees(p, Cell::Green);
    let uniform = |d: &[usize]| d.iter().all(|&x| x == d[0]).then(|| d[0]);
    let regular = match (uniform(&red_degrees), uniform(&green_degrees)) {
        (Some(r), Some(g)) => Some((r, g)),
        _ => None,
    };
    Ok(WitnessReport {
        n: p.board().vertex_count(),
        k,
        red_edges: p.red_count(),
        green_edges: p.green_count(),
        mono_free: !contains_mono(p, Color::Red, &kk) && !contains_mono(p, Color::Green, &kk),
        red_degrees,
        green_degrees,
        regular,
    })
}

/// Adds a twin `u = n` of vertex `v`: `{x, u}` gets the color of `{x, v}`
/// and `{u, v}` stays uncolored.
pub fn extend_by_duplicate(p: &Position, v: usize) -> Result<Position> {
    let n = p.board().vertex_count();
    if !p.board().is_complete() || !p.is_full() {
        return Err(Error::InvalidPosition("duplication needs a full coloring of a complete board".into()));
    }
    if v >= n {
        return Err(Error::InvalidPosition(format!("vertex {v} is not on K_{n}")));
    }
    let board = Arc::new(Graph::complete(n + 1));
    let mut out = Position::empty(board.clone());
    for e in 0..p.board().edge_count() {
        let (a, b) = p.board().edge(e);
        out.set(board.edge_index(a, b).expect("old edge"), p.cell(e));
    }
    for x in (0..n).filter(|&x| x != v) {
        let old = p.cell_at(x, v).expect("complete board");
        out.set(board.edge_index(x, n).expect("new edge"), old);
    }
    Ok(out)
}

/// Largest uncolored-edge count [`arrowing_threshold_c`] enumerates.
pub const ARROWING_MAX_FREE: usize = 20;

/// Smallest `t` such that every way of adding `ceil(t/2)` red and
/// `floor(t/2)` green edges to the spec's precoloring creates a
/// monochromatic target. `None` when even the full board does not force one.
pub fn arrowing_threshold_c(spec: &GameSpec) -> Result<Option<usize>> {
    let start = spec.initial_position();
    let ts = ThreatSet::compile(&start, spec.target(Color::Red), spec.target(Color::Green))?;
    let f = ts.free_edges().len();
    if f > ARROWING_MAX_FREE {
        return Err(Error::CapExceeded { needed: f, cap: ARROWING_MAX_FREE });
    }
    let forced = |red: u64, green: u64| ts.completes(Color::Red, red) || ts.completes(Color::Green, green);
    for t in 0..=f {
        let (r, g) = (t.div_ceil(2), t / 2);
        if every_split_forces(f, r, g, &forced) {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

fn every_split_forces(f: usize, r: usize, g: usize, forced: &dyn Fn(u64, u64) -> bool) -> bool {
    let mut all_ok = true;
    subsets(f, 0, r, &mut |red| {
        let rest: Vec<usize> = (0..f).filter(|&i| red >> i & 1 == 0).collect();
        subsets(rest.len(), 0, g, &mut |gm| {
            let green = rest.iter().enumerate().filter(|(i, _)| gm >> i & 1 == 1).fold(0u64, |m, (_, &e)| m | 1 << e);
            all_ok = forced(red, green);
            all_ok
        });
        all_ok
    });
    all_ok
}

/// Calls `visit` on every `size`-subset of `0..f` as a mask; stops when
/// `visit` returns false.
fn subsets(f: usize, start: usize, size: usize, visit: &mut dyn FnMut(u64) -> bool) -> bool {
    fn rec(f: usize, start: usize, size: usize, acc: u64, visit: &mut dyn FnMut(u64) -> bool) -> bool {
        if size == 0 {
            return visit(acc);
        }
        for i in start..=f.saturating_sub(size) {
            if f < size {
                break;
            }
            if !rec(f, i + 1, size - 1, acc | 1 << i, visit) {
                return false;
            }
        }
        true
    }
    rec(f, start, size, 0, visit)
}
