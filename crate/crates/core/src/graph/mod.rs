//! Boards, partial red/green edge colorings and everything that inspects them.
//!
//! Edge indices follow the lexicographic order of the `(i, j)` pairs with
//! `i < j`. That order is load-bearing: position codes, canonical keys and all
//! file formats are defined in terms of it.

mod arrows;
mod canon;
mod encode;
mod refine;
mod subgraph;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub use arrows::{arrows, arrows_with_cap, ThreatSet, DEFAULT_ARROWS_CAP};
pub use canon::{
    canonicalize, canonicalize_with, factorial, orbit_size, CanonOptions, Canonical,
    CanonicalKey, KnCanonizer, BRUTE_FORCE_MAX_N,
};
pub use encode::{decode_position, encode_position, encode_u64};
pub use refine::{automorphism_count, refined_canonical_form, DEFAULT_NODE_BUDGET};
pub use subgraph::{contains_mono, enumerate_copies, move_completes};

/// One of the two players, and the color that player paints with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Green,
}

impl Color {
    pub fn other(self) -> Color {
        match self {
            Color::Red => Color::Green,
            Color::Green => Color::Red,
        }
    }

    pub fn cell(self) -> Cell {
        match self {
            Color::Red => Cell::Red,
            Color::Green => Cell::Green,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::Red => "red",
            Color::Green => "green",
        })
    }
}

/// State of one edge. The discriminants are the base-3 digits of position codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[repr(u8)]
pub enum Cell {
    #[default]
    Uncolored = 0,
    Red = 1,
    Green = 2,
}

impl Cell {
    pub fn digit(self) -> u8 {
        self as u8
    }

    pub fn from_digit(d: u8) -> Option<Cell> {
        match d {
            0 => Some(Cell::Uncolored),
            1 => Some(Cell::Red),
            2 => Some(Cell::Green),
            _ => None,
        }
    }

    pub fn color(self) -> Option<Color> {
        match self {
            Cell::Uncolored => None,
            Cell::Red => Some(Color::Red),
            Cell::Green => Some(Color::Green),
        }
    }

    pub fn swapped(self) -> Cell {
        match self {
            Cell::Uncolored => Cell::Uncolored,
            Cell::Red => Cell::Green,
            Cell::Green => Cell::Red,
        }
    }
}

const NO_EDGE: u32 = u32::MAX;

/// A simple undirected graph with edges in lexicographic order.
///
/// Used both for game boards and for target graphs.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(u32, u32)>,
    complete: bool,
    index: Vec<u32>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("vertex_count", &self.vertex_count)
            .field("edges", &self.edges)
            .finish()
    }
}

impl Graph {
    /// Builds a graph from an edge list in any order. Pairs are normalized to
    /// `i < j` and sorted; duplicates and loops are rejected.
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidGraph("a graph needs at least one vertex".into()));
        }
        if vertex_count > u32::MAX as usize / 2 {
            return Err(Error::InvalidGraph("too many vertices".into()));
        }
        let mut list = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("loop at vertex {a}")));
            }
            if a >= vertex_count || b >= vertex_count {
                return Err(Error::InvalidGraph(format!(
                    "edge {a}-{b} has an endpoint outside 0..{vertex_count}"
                )));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            list.push((i as u32, j as u32));
        }
        list.sort_unstable();
        if list.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph("duplicate edge".into()));
        }
        let mut index = vec![NO_EDGE; vertex_count * vertex_count];
        for (k, &(i, j)) in list.iter().enumerate() {
            index[i as usize * vertex_count + j as usize] = k as u32;
            index[j as usize * vertex_count + i as usize] = k as u32;
        }
        let complete = list.len() == vertex_count * (vertex_count - 1) / 2;
        Ok(Graph { vertex_count, edges: list, complete, index })
    }

    /// The complete graph `K_n`.
    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        Graph::new(n, edges).expect("complete graph is well formed")
    }

    /// Two triangles sharing exactly one vertex: `{0,1,2}` and `{2,3,4}`.
    pub fn bowtie() -> Self {
        Graph::new(5, [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)]).unwrap()
    }

    /// A `K4` hub `a0..a3` with `legs` triangle-tipped legs. Leg `i` has a
    /// knee joined to `a0` and `a1` and a triangle knee/foot/foot; the
    /// foot-foot edge is the leg's "feet edge".
    pub fn topus(legs: usize) -> Self {
        let mut edges = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for i in 0..legs {
            let knee = 4 + 3 * i;
            edges.extend([(0, knee), (1, knee), (knee, knee + 1), (knee, knee + 2), (knee + 1, knee + 2)]);
        }
        Graph::new(4 + 3 * legs, edges).unwrap()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> (usize, usize) {
        let (i, j) = self.edges[index];
        (i as usize, j as usize)
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Index of edge `{a, b}`, if present.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        if a >= self.vertex_count || b >= self.vertex_count {
            return None;
        }
        match self.index[a * self.vertex_count + b] {
            NO_EDGE => None,
            k => Some(k as usize),
        }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edge_index(a, b).is_some()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for &(i, j) in &self.edges {
            deg[i as usize] += 1;
            deg[j as usize] += 1;
        }
        deg
    }

    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(i, j) in &self.edges {
            adj[i as usize].push(j);
            adj[j as usize].push(i);
        }
        adj
    }

    /// True when this graph is `K_k` for its own vertex count.
    pub fn is_clique(&self) -> bool {
        self.complete
    }
}

/// A graph that must be avoided or achieved. Always has at least one edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetGraph(Graph);

impl TargetGraph {
    pub fn new(graph: Graph) -> Result<Self> {
        if graph.edge_count() == 0 {
            return Err(Error::InvalidGraph("target graph needs at least one edge".into()));
        }
        Ok(TargetGraph(graph))
    }

    pub fn clique(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidGraph(format!("K{k} has no edges")));
        }
        Ok(TargetGraph(Graph::complete(k)))
    }

    pub fn graph(&self) -> &Graph {
        &self.0
    }
}

impl std::ops::Deref for TargetGraph {
    type Target = Graph;
    fn deref(&self) -> &Graph {
        &self.0
    }
}

/// A partial red/green coloring of a board's edges.
#[derive(Clone, PartialEq, Eq)]
pub struct Position {
    board: Arc<Graph>,
    cells: Vec<Cell>,
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Position({})", self.to_text())
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Position {
    pub fn empty(board: Arc<Graph>) -> Self {
        let cells = vec![Cell::Uncolored; board.edge_count()];
        Position { board, cells }
    }

    pub fn from_cells(board: Arc<Graph>, cells: Vec<Cell>) -> Result<Self> {
        if cells.len() != board.edge_count() {
            return Err(Error::InvalidPosition(format!(
                "{} cells for a board with {} edges",
                cells.len(),
                board.edge_count()
            )));
        }
        Ok(Position { board, cells })
    }

    /// Builds a position from explicit red and green edge-index sets.
    pub fn with_colors(board: Arc<Graph>, red: &[usize], green: &[usize]) -> Result<Self> {
        let mut p = Position::empty(board);
        for (set, cell) in [(red, Cell::Red), (green, Cell::Green)] {
            for &e in set {
                if e >= p.cells.len() {
                    return Err(Error::EdgeOutOfRange(e));
                }
                if p.cells[e] != Cell::Uncolored {
                    return Err(Error::InvalidPosition(format!("edge {e} colored twice")));
                }
                p.cells[e] = cell;
            }
        }
        Ok(p)
    }

    pub fn board(&self) -> &Arc<Graph> {
        &self.board
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, edge: usize) -> Cell {
        self.cells[edge]
    }

    pub fn cell_at(&self, a: usize, b: usize) -> Option<Cell> {
        self.board.edge_index(a, b).map(|e| self.cells[e])
    }

    pub fn set(&mut self, edge: usize, cell: Cell) {
        self.cells[edge] = cell;
    }

    pub fn count(&self, cell: Cell) -> usize {
        self.cells.iter().filter(|&&c| c == cell).count()
    }

    pub fn red_count(&self) -> usize {
        self.count(Cell::Red)
    }

    pub fn green_count(&self) -> usize {
        self.count(Cell::Green)
    }

    pub fn uncolored_edges(&self) -> Vec<usize> {
        (0..self.cells.len()).filter(|&e| self.cells[e] == Cell::Uncolored).collect()
    }

    pub fn edges_of(&self, cell: Cell) -> Vec<usize> {
        (0..self.cells.len()).filter(|&e| self.cells[e] == cell).collect()
    }

    pub fn is_full(&self) -> bool {
        self.cells.iter().all(|&c| c != Cell::Uncolored)
    }

    /// Returns a copy with `edge` painted `color`.
    pub fn with_edge(&self, edge: usize, color: Color) -> Result<Position> {
        if edge >= self.cells.len() {
            return Err(Error::EdgeOutOfRange(edge));
        }
        if self.cells[edge] != Cell::Uncolored {
            return Err(Error::EdgeColored(edge));
        }
        let mut p = self.clone();
        p.cells[edge] = color.cell();
        Ok(p)
    }

    /// Red and green swapped.
    pub fn swapped(&self) -> Position {
        Position {
            board: self.board.clone(),
            cells: self.cells.iter().map(|c| c.swapped()).collect(),
        }
    }

    /// Applies a vertex permutation: the color of `{i, j}` moves to
    /// `{perm[i], perm[j]}`. The board must be mapped onto itself.
    pub fn permuted(&self, perm: &[usize]) -> Result<Position> {
        let n = self.board.vertex_count();
        if perm.len() != n {
            return Err(Error::InvalidPosition(format!("permutation of length {} for {n} vertices", perm.len())));
        }
        let mut seen = vec![false; n];
        for &v in perm {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidPosition("not a permutation".into()));
            }
        }
        let mut cells = vec![Cell::Uncolored; self.cells.len()];
        for (e, &(i, j)) in self.board.edges().iter().enumerate() {
            let target = self
                .board
                .edge_index(perm[i as usize], perm[j as usize])
                .ok_or_else(|| Error::InvalidPosition("permutation does not preserve the board".into()))?;
            cells[target] = self.cells[e];
        }
        Ok(Position { board: self.board.clone(), cells })
    }

    /// One-line text form `n=<int>;edges=<i-j:c,...>` listing every board edge.
    pub fn to_text(&self) -> String {
        let mut s = format!("n={};edges=", self.board.vertex_count());
        for (k, (&(i, j), &c)) in self.board.edges().iter().zip(&self.cells).enumerate() {
            if k > 0 {
                s.push(',');
            }
            let ch = match c {
                Cell::Uncolored => 'u',
                Cell::Red => 'r',
                Cell::Green => 'g',
            };
            s.push_str(&format!("{i}-{j}:{ch}"));
        }
        s
    }

    /// Parses the one-line text form. The board consists of exactly the
    /// listed edges.
    pub fn parse_text(text: &str) -> Result<Position> {
        let text = text.trim();
        let (n_part, edges_part) = text
            .split_once(';')
            .ok_or_else(|| Error::Parse("expected `n=<int>;edges=...`".into()))?;
        let n: usize = n_part
            .trim()
            .strip_prefix("n=")
            .ok_or_else(|| Error::Parse("missing `n=`".into()))?
            .trim()
            .parse()
            .map_err(|_| Error::Parse("bad vertex count".into()))?;
        let list = edges_part
            .trim()
            .strip_prefix("edges=")
            .ok_or_else(|| Error::Parse("missing `edges=`".into()))?;
        let mut pairs = Vec::new();
        let mut colors = Vec::new();
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (pair, c) = item
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("bad edge item `{item}`")))?;
            let (a, b) = pair
                .split_once('-')
                .ok_or_else(|| Error::Parse(format!("bad edge `{pair}`")))?;
            let a: usize = a.trim().parse().map_err(|_| Error::Parse(format!("bad vertex `{a}`")))?;
            let b: usize = b.trim().parse().map_err(|_| Error::Parse(format!("bad vertex `{b}`")))?;
            let cell = match c.trim() {
                "u" => Cell::Uncolored,
                "r" => Cell::Red,
                "g" => Cell::Green,
                other => return Err(Error::Parse(format!("bad color `{other}`"))),
            };
            pairs.push((a, b));
            colors.push(((a.min(b), a.max(b)), cell));
        }
        let board = Arc::new(Graph::new(n, pairs)?);
        let mut p = Position::empty(board.clone());
        for ((a, b), cell) in colors {
            let e = board.edge_index(a, b).expect("edge was just inserted");
            p.cells[e] = cell;
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_edge_order_is_lexicographic() {
        let k4 = Graph::complete(4);
        assert_eq!(k4.edges(), &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert!(k4.is_complete());
        assert_eq!(k4.edge_index(3, 1), Some(4));
    }

    #[test]
    fn rejects_duplicates_and_bad_endpoints() {
        assert!(Graph::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(3, [(0, 3)]).is_err());
        assert!(Graph::new(3, [(1, 1)]).is_err());
        assert!(TargetGraph::new(Graph::new(3, []).unwrap()).is_err());
    }

    #[test]
    fn topus_shape() {
        let t = Graph::topus(3);
        assert_eq!(t.vertex_count(), 13);
        assert_eq!(t.edge_count(), 6 + 15);
        let b = Graph::bowtie();
        assert_eq!((b.vertex_count(), b.edge_count()), (5, 6));
    }

    #[test]
    fn text_format_round_trip() {
        let board = Arc::new(Graph::complete(4));
        let p = Position::with_colors(board, &[0, 5], &[2]).unwrap();
        let text = p.to_text();
        assert_eq!(text, "n=4;edges=0-1:r,0-2:u,0-3:g,1-2:u,1-3:u,2-3:r");
        let q = Position::parse_text(&text).unwrap();
        assert_eq!(p, q);
        assert!(q.board().is_complete());
    }

    #[test]
    fn text_format_rejects_garbage() {
        assert!(Position::parse_text("n=3").is_err());
        assert!(Position::parse_text("n=3;edges=0-1:x").is_err());
        assert!(Position::parse_text("n=3;edges=0-5:r").is_err());
    }

    #[test]
    fn permutation_moves_colors() {
        let board = Arc::new(Graph::complete(3));
        let p = Position::with_colors(board, &[0], &[]).unwrap(); // 0-1 red
        let q = p.permuted(&[2, 1, 0]).unwrap(); // 0-1 -> 2-1
        assert_eq!(q.cell_at(1, 2), Some(Cell::Red));
        assert_eq!(q.red_count(), 1);
    }
}
