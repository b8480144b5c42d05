//! Formula games and their reductions to graph Ramsey games.
//!
//! Each transducer builds a board from named vertices. Vertices are numbered
//! in declaration order, which follows the gadget order of the construction,
//! so the same formula always yields the same board.

mod formula;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use formula::{
    solve_formula_game, solve_poscnf_game, solve_posdnf_game, FormulaKind, FormulaPlayer, PositiveFormula,
    FORMULA_GAME_MAX_VARIABLES,
};

use crate::error::{Error, Result};
use crate::game::{GameSpec, SpecDocument, Variant};
use crate::graph::{Color, Graph, TargetGraph};
use crate::solver::{self, Value};

/// A reduced game with the names of its vertices and of its gadget edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionOutput {
    spec: GameSpec,
    vertex_names: Vec<String>,
    gadgets: BTreeMap<String, Vec<usize>>,
}

impl ReductionOutput {
    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.vertex_names.iter().position(|n| n == name)
    }

    /// Named edge sets: `r_0`, `r_i`, `y_i`, `g_i`, `d_j` for the avoidance
    /// reduction, `X_i` and `S_i` for the achievement ones.
    pub fn gadgets(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.gadgets
    }

    /// The single edge of a one-edge gadget.
    pub fn gadget_edge(&self, name: &str) -> Option<usize> {
        match self.gadgets.get(name).map(Vec::as_slice) {
            Some(&[e]) => Some(e),
            _ => None,
        }
    }

    pub fn uncolored_edge_count(&self) -> usize {
        let b = self.spec.board();
        b.edge_count() - self.spec.precolor(Color::Red).len() - self.spec.precolor(Color::Green).len()
    }

    pub fn to_document(&self) -> SpecDocument {
        let board = self.spec.board();
        let mut doc = self.spec.to_document();
        doc.vertex_names = Some(self.vertex_names.clone());
        doc.gadgets = Some(
            self.gadgets
                .iter()
                .map(|(k, es)| {
                    let pairs = es.iter().map(|&e| {
                        let (a, b) = board.edge(e);
                        [a, b]
                    });
                    (k.clone(), pairs.collect())
                })
                .collect(),
        );
        doc
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("serializable")
    }
}

#[derive(Default)]
struct Builder {
    names: Vec<String>,
    ids: HashMap<String, usize>,
    edges: BTreeSet<(usize, usize)>,
    red: BTreeSet<(usize, usize)>,
    green: BTreeSet<(usize, usize)>,
    gadgets: BTreeMap<String, Vec<(usize, usize)>>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Paint {
    Red,
    Green,
    Open,
}

fn pair(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Builder {
    fn v(&mut self, name: String) -> usize {
        if let Some(&id) = self.ids.get(&name) {
            return id;
        }
        let id = self.names.len();
        self.ids.insert(name.clone(), id);
        self.names.push(name);
        id
    }

    /// The top and bottom vertices `{s}_{i,t}`, `{s}_{i,b}`.
    fn pair_of(&mut self, s: &str, i: usize) -> (usize, usize) {
        (self.v(format!("{s}_{{{i},t}}")), self.v(format!("{s}_{{{i},b}}")))
    }

    fn edge(&mut self, a: usize, b: usize, paint: Paint) {
        let e = pair(a, b);
        self.edges.insert(e);
        match paint {
            Paint::Red => self.red.insert(e),
            Paint::Green => self.green.insert(e),
            Paint::Open => false,
        };
    }

    fn tri(&mut self, a: usize, b: usize, c: usize, paint: Paint) {
        self.edge(a, b, paint);
        self.edge(a, c, paint);
        self.edge(b, c, paint);
    }

    /// The two edges from `apex` to the ends of a top/bottom pair.
    fn spokes(&mut self, apex: usize, (t, b): (usize, usize), paint: Paint) {
        self.edge(apex, t, paint);
        self.edge(apex, b, paint);
    }

    fn gadget(&mut self, name: String, (a, b): (usize, usize), paint: Paint) {
        self.edge(a, b, paint);
        self.gadgets.entry(name).or_default().push(pair(a, b));
    }

    fn finish(self, variant: Variant, target: Graph) -> Result<ReductionOutput> {
        let board = Arc::new(Graph::new(self.names.len(), self.edges.iter().copied())?);
        let index = |set: &BTreeSet<(usize, usize)>| -> Vec<usize> {
            set.iter().map(|&(a, b)| board.edge_index(a, b).expect("declared edge")).collect()
        };
        let red = index(&self.red);
        let green = index(&self.green);
        let gadgets = self
            .gadgets
            .iter()
            .map(|(k, es)| (k.clone(), es.iter().map(|&(a, b)| board.edge_index(a, b).expect("declared edge")).collect()))
            .collect();
        let target = TargetGraph::new(target)?;
        let spec = GameSpec::new(variant, board.clone(), target.clone(), target, red, green)?;
        Ok(ReductionOutput { spec, vertex_names: self.names, gadgets })
    }
}

fn expect_kind(f: &PositiveFormula, kind: FormulaKind) -> Result<()> {
    if f.kind() != kind {
        return Err(Error::InvalidFormula(format!("expected a {kind:?} formula")));
    }
    Ok(())
}

/// Positive CNF to an Avoid game on a bow-tie. Uncolored edges: `r_0`, one
/// `d_j` per clause and `r_i`, `y_i`, `g_i` per variable.
pub fn reduce_cnf_to_avoid(f: &PositiveFormula) -> Result<ReductionOutput> {
    expect_kind(f, FormulaKind::Cnf)?;
    let n = f.variables();
    let clauses = f.clauses();
    let mut b = Builder::default();

    let u0: Vec<usize> = (0..3).map(|k| b.v(format!("u_{{0,{k}}}"))).collect();
    let r0 = b.pair_of("r", 0);
    let mut u = vec![Vec::new()];
    let mut d = vec![(0, 0)];
    let mut w = vec![Vec::new()];
    let mut fv = vec![Vec::new()];
    for (j, clause) in clauses.iter().enumerate().map(|(j, c)| (j + 1, c)) {
        u.push((0..3).map(|k| b.v(format!("u_{{{j},{k}}}"))).collect());
        d.push(b.pair_of("d", j));
        w.push((1..j).map(|p| b.v(format!("w_{{{j},{p}}}"))).collect::<Vec<_>>());
        fv.push((1..=clause.len()).map(|k| b.v(format!("f_{{{j},{k}}}"))).collect::<Vec<_>>());
    }
    struct Var {
        v: Vec<usize>,
        r: (usize, usize),
        y: (usize, usize),
        g: (usize, usize),
    }
    let mut vars = vec![];
    for i in 1..=n {
        let mut vs: Vec<usize> = (0..3).map(|k| b.v(format!("v_{{{i},{k}}}"))).collect();
        let r = b.pair_of("r", i);
        vs.push(b.v(format!("v_{{{i},3}}")));
        let y = b.pair_of("y", i);
        vs.push(b.v(format!("v_{{{i},4}}")));
        let g = b.pair_of("g", i);
        vs.extend((5..8).map(|k| b.v(format!("v_{{{i},{k}}}"))));
        vars.push(Var { v: vs, r, y, g });
    }

    b.tri(u0[0], u0[1], u0[2], Paint::Green);
    b.spokes(u0[2], r0, Paint::Green);
    b.gadget("r_0".into(), r0, Paint::Open);
    for (j, clause) in clauses.iter().enumerate().map(|(j, c)| (j + 1, c)) {
        b.tri(u[j][0], u[j][1], u[j][2], Paint::Red);
        b.spokes(u[j][2], d[j], Paint::Red);
        b.gadget(format!("d_{j}"), d[j], Paint::Open);
        for (p, &wv) in w[j].iter().enumerate().map(|(p, x)| (p + 1, x)) {
            b.spokes(wv, d[p], Paint::Green);
            b.spokes(wv, d[j], Paint::Green);
        }
        for (&fk, &h) in fv[j].iter().zip(clause) {
            b.spokes(fk, d[j], Paint::Green);
            b.spokes(fk, vars[h - 1].g, Paint::Green);
        }
    }
    for (i, x) in vars.iter().enumerate().map(|(i, x)| (i + 1, x)) {
        let v = &x.v;
        b.tri(v[0], v[1], v[2], Paint::Green);
        b.spokes(v[2], x.r, Paint::Green);
        b.gadget(format!("r_{i}"), x.r, Paint::Open);
        b.spokes(v[3], x.r, Paint::Red);
        b.spokes(v[3], x.y, Paint::Red);
        b.gadget(format!("y_{i}"), x.y, Paint::Open);
        b.spokes(v[4], x.y, Paint::Green);
        b.spokes(v[4], x.g, Paint::Green);
        b.gadget(format!("g_{i}"), x.g, Paint::Open);
        b.spokes(v[5], x.g, Paint::Red);
        b.tri(v[5], v[6], v[7], Paint::Red);
    }
    b.finish(Variant::Avoid, Graph::bowtie())
}

/// One red-precolored topus per disjunct, all sharing the variable edges
/// `X_i` as feet. With `legs` equal to the longest disjunct this is the
/// weak achievement reduction.
fn dnf_core(f: &PositiveFormula, legs: usize, b: &mut Builder) {
    let n = f.variables();
    let shortest = f.clauses().iter().map(Vec::len).min().expect("nonempty");
    let p = legs - shortest;
    let pads: Vec<(usize, usize)> =
        (1..=p).map(|k| b.pair_of("r", k)).collect();
    let mut hubs = Vec::new();
    for (j, clause) in f.clauses().iter().enumerate().map(|(j, c)| (j + 1, c)) {
        let hub: Vec<usize> = (0..4).map(|k| b.v(format!("u_{{{j},{k}}}"))).collect();
        let knees: Vec<usize> = clause.iter().map(|&i| b.v(format!("v_{{{i},{j}}}"))).collect();
        let pad_knees: Vec<usize> = (1..=legs - clause.len()).map(|k| b.v(format!("v'_{{{k},{j}}}"))).collect();
        hubs.push((hub, knees, pad_knees));
    }
    let x: Vec<(usize, usize)> = (1..=n).map(|i| b.pair_of("x", i)).collect();

    for &r in &pads {
        b.edge(r.0, r.1, Paint::Red);
    }
    for ((hub, knees, pad_knees), clause) in hubs.iter().zip(f.clauses()) {
        for a in 0..4 {
            for c in a + 1..4 {
                b.edge(hub[a], hub[c], Paint::Red);
            }
        }
        for (&knee, &i) in knees.iter().zip(clause) {
            b.edge(hub[0], knee, Paint::Red);
            b.edge(hub[1], knee, Paint::Red);
            b.spokes(knee, x[i - 1], Paint::Red);
        }
        for (&knee, &r) in pad_knees.iter().zip(&pads) {
            b.edge(hub[0], knee, Paint::Red);
            b.edge(hub[1], knee, Paint::Red);
            b.spokes(knee, r, Paint::Red);
        }
    }
    for (i, &e) in x.iter().enumerate() {
        b.gadget(format!("X_{}", i + 1), e, Paint::Open);
    }
}

/// Positive DNF to a weak achievement game: Red must complete an `m`-topus,
/// `m` the longest disjunct. Only the `n` variable edges are uncolored.
pub fn reduce_dnf_to_achieve_weak(f: &PositiveFormula) -> Result<ReductionOutput> {
    expect_kind(f, FormulaKind::Dnf)?;
    let m = f.clauses().iter().map(Vec::len).max().expect("nonempty");
    let mut b = Builder::default();
    dnf_core(f, m, &mut b);
    b.finish(Variant::AchieveWeak, Graph::topus(m))
}

/// Positive DNF to an achievement game on an `n`-topus. Adds a green
/// `3n`-topus whose feet `S_i` are uncolored, so `4n` edges are open.
pub fn reduce_dnf_to_achieve(f: &PositiveFormula) -> Result<ReductionOutput> {
    expect_kind(f, FormulaKind::Dnf)?;
    let n = f.variables();
    let mut b = Builder::default();
    dnf_core(f, n, &mut b);
    let h: Vec<usize> = (0..4).map(|k| b.v(format!("h_{k}"))).collect();
    let legs: Vec<[usize; 3]> =
        (1..=3 * n).map(|i| [0, 1, 2].map(|k| b.v(format!("s_{{{i},{k}}}")))).collect();
    for a in 0..4 {
        for c in a + 1..4 {
            b.edge(h[a], h[c], Paint::Green);
        }
    }
    for (i, s) in legs.iter().enumerate() {
        b.edge(h[0], s[0], Paint::Green);
        b.edge(h[1], s[0], Paint::Green);
        b.spokes(s[0], (s[1], s[2]), Paint::Green);
        b.gadget(format!("S_{}", i + 1), (s[1], s[2]), Paint::Open);
    }
    b.finish(Variant::Achieve, Graph::topus(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transducer {
    Avoid,
    AchieveWeak,
    Achieve,
}

impl Transducer {
    pub fn formula_kind(self) -> FormulaKind {
        match self {
            Transducer::Avoid => FormulaKind::Cnf,
            Transducer::AchieveWeak | Transducer::Achieve => FormulaKind::Dnf,
        }
    }

    pub fn apply(self, f: &PositiveFormula) -> Result<ReductionOutput> {
        match self {
            Transducer::Avoid => reduce_cnf_to_avoid(f),
            Transducer::AchieveWeak => reduce_dnf_to_achieve_weak(f),
            Transducer::Achieve => reduce_dnf_to_achieve(f),
        }
    }

    pub fn parse(s: &str) -> Result<Transducer> {
        match s {
            "avoid" => Ok(Transducer::Avoid),
            "achieve-weak" => Ok(Transducer::AchieveWeak),
            "achieve" => Ok(Transducer::Achieve),
            _ => Err(Error::Parse(format!("unknown reduction `{s}`"))),
        }
    }
}

impl fmt::Display for Transducer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Transducer::Avoid => "avoid",
            Transducer::AchieveWeak => "achieve-weak",
            Transducer::Achieve => "achieve",
        })
    }
}

/// Both sides of one reduction check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionCheck {
    pub formula_winner: FormulaPlayer,
    pub graph_value: Value,
}

impl ReductionCheck {
    /// Player I must map to a Red win and player II to a Green win.
    pub fn holds(&self) -> bool {
        let expected = match self.formula_winner {
            FormulaPlayer::I => Color::Red,
            FormulaPlayer::II => Color::Green,
        };
        self.graph_value.winner() == Some(expected)
    }
}

/// Solves the formula game and the reduced graph game. A solver budget
/// overrun is an error, never a failed check.
pub fn check_reduction(f: &PositiveFormula, transducer: Transducer, budget: usize) -> Result<ReductionCheck> {
    let formula_winner = solve_formula_game(f)?;
    let out = transducer.apply(f)?;
    let graph_value = solver::root_value(out.spec(), budget)?;
    Ok(ReductionCheck { formula_winner, graph_value })
}

pub fn verify_reduction(f: &PositiveFormula, transducer: Transducer, budget: usize) -> Result<bool> {
    check_reduction(f, transducer, budget).map(|c| c.holds())
}

/// Every positive formula of the given kind on exactly `n` variables with
/// at most `max_clauses` distinct clauses, each listed once.
pub fn enumerate_formulas(kind: FormulaKind, n: usize, max_clauses: usize) -> Vec<PositiveFormula> {
    let all = (1u32 << n) - 1;
    let subsets: Vec<u32> = (1..=all).collect();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    fn rec(
        subsets: &[u32],
        start: usize,
        left: usize,
        chosen: &mut Vec<u32>,
        all: u32,
        n: usize,
        kind: FormulaKind,
        out: &mut Vec<PositiveFormula>,
    ) {
        if !chosen.is_empty() && chosen.iter().fold(0, |a, &c| a | c) == all {
            let clauses = chosen.iter().map(|&c| (1..=n).filter(|&v| c >> (v - 1) & 1 == 1).collect()).collect();
            out.push(PositiveFormula::new(kind, n, clauses).expect("covers every variable"));
        }
        if left == 0 {
            return;
        }
        for i in start..subsets.len() {
            chosen.push(subsets[i]);
            rec(subsets, i + 1, left - 1, chosen, all, n, kind, out);
            chosen.pop();
        }
    }
    rec(&subsets, 0, max_clauses, &mut chosen, all, n, kind, &mut out);
    out
}
