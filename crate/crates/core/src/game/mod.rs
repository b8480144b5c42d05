//! Rules of the avoidance and achievement games: legal moves, move
//! application and terminal status.

mod spec;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{arrows_with_cap, contains_mono, move_completes, Color, Graph, Position, ThreatSet, DEFAULT_ARROWS_CAP};

pub use spec::{GameSpec, SpecDocument, TargetDocument};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Coloring a monochromatic target is forbidden; a player with no legal
    /// move loses.
    Avoid,
    /// Completing a monochromatic target loses at once; a full board is a tie.
    AvoidMisere,
    /// As `Avoid`, but a move colors any nonempty set of uncolored edges.
    AvoidPlus,
    /// The first player to complete a monochromatic target wins.
    Achieve,
    /// As `Achieve`, with a tie counted as a win for Green.
    AchievePrime,
    /// Only Red can win, by completing a red target; otherwise Green wins.
    AchieveWeak,
    /// As `Avoid` with separate red and green targets.
    AsymmetricAvoid,
}

impl Variant {
    pub const ALL: [Variant; 7] = [
        Variant::Avoid,
        Variant::AvoidMisere,
        Variant::AvoidPlus,
        Variant::Achieve,
        Variant::AchievePrime,
        Variant::AchieveWeak,
        Variant::AsymmetricAvoid,
    ];

    /// Identifier used in strategy and learning table headers.
    pub fn id(self) -> u8 {
        match self {
            Variant::Avoid => 0,
            Variant::AvoidMisere => 1,
            Variant::AvoidPlus => 2,
            Variant::Achieve => 3,
            Variant::AchievePrime => 4,
            Variant::AchieveWeak => 5,
            Variant::AsymmetricAvoid => 6,
        }
    }

    pub fn from_id(id: u8) -> Option<Variant> {
        Variant::ALL.get(id as usize).copied()
    }

    /// Variants in which moves creating the mover's target are illegal.
    pub fn forbids_target(self) -> bool {
        matches!(self, Variant::Avoid | Variant::AvoidPlus | Variant::AsymmetricAvoid)
    }

    pub fn is_achievement(self) -> bool {
        matches!(self, Variant::Achieve | Variant::AchievePrime | Variant::AchieveWeak)
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Avoid => "avoid",
            Variant::AvoidMisere => "avoid_misere",
            Variant::AvoidPlus => "avoid_plus",
            Variant::Achieve => "achieve",
            Variant::AchievePrime => "achieve_prime",
            Variant::AchieveWeak => "achieve_weak",
            Variant::AsymmetricAvoid => "asymmetric_avoid",
        }
    }

    pub fn parse(s: &str) -> Result<Variant> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == norm)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown variant `{s}`")))
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "winner", rename_all = "snake_case")]
pub enum Status {
    Ongoing,
    Win(Color),
    Tie,
}

/// One move: the edges colored by the player to move. A singleton except in
/// `AvoidPlus`. Edges are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    edges: Vec<usize>,
}

impl Move {
    pub fn single(edge: usize) -> Move {
        Move { edges: vec![edge] }
    }

    pub fn new(mut edges: Vec<usize>) -> Result<Move> {
        if edges.is_empty() {
            return Err(Error::IllegalMove("a move colors at least one edge".into()));
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::IllegalMove("edge listed twice".into()));
        }
        Ok(Move { edges })
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameState {
    pub position: Position,
    pub to_move: Color,
    pub status: Status,
    pub moves_made: usize,
}

impl GameState {
    pub fn is_over(&self) -> bool {
        self.status != Status::Ongoing
    }
}

/// Whether `color` has at least one legal single-edge move. In the
/// avoidance variants every legal multi-edge move contains a legal single
/// edge, so this also decides `AvoidPlus`.
fn can_move(spec: &GameSpec, p: &Position, color: Color) -> bool {
    let target = spec.target(color);
    p.uncolored_edges().into_iter().any(|e| {
        !spec.variant().forbids_target() || !move_completes(p, e, color, target).expect("edge is uncolored")
    })
}

/// Status after `mover` produced `p` (or of the start when `mover` is None).
fn status_after(spec: &GameSpec, p: &Position, mover: Option<Color>, completed: bool) -> Status {
    let next = mover.map_or(Color::Red, Color::other);
    match spec.variant() {
        Variant::Avoid | Variant::AvoidPlus | Variant::AsymmetricAvoid => {
            if can_move(spec, p, next) {
                Status::Ongoing
            } else {
                Status::Win(next.other())
            }
        }
        Variant::AvoidMisere => match mover {
            Some(m) if completed => Status::Win(m.other()),
            _ if p.is_full() => Status::Tie,
            _ => Status::Ongoing,
        },
        Variant::Achieve | Variant::AchievePrime | Variant::AchieveWeak => {
            let winner_by_build = match (spec.variant(), mover) {
                (Variant::AchieveWeak, Some(Color::Green)) => None,
                (_, Some(m)) if completed => Some(m),
                _ => None,
            };
            if let Some(w) = winner_by_build {
                Status::Win(w)
            } else if p.is_full() {
                match spec.variant() {
                    Variant::Achieve => Status::Tie,
                    _ => Status::Win(Color::Green),
                }
            } else {
                Status::Ongoing
            }
        }
    }
}

impl GameSpec {
    /// The starting state: precoloring applied, Red to move.
    pub fn initial_state(&self) -> Result<GameState> {
        let position = self.initial_position();
        for color in [Color::Red, Color::Green] {
            if contains_mono(&position, color, self.target(color)) {
                return Err(Error::InvalidSpec(format!("the {color} precoloring already contains its target")));
            }
        }
        let status = status_after(self, &position, None, false);
        Ok(GameState { position, to_move: Color::Red, status, moves_made: 0 })
    }
}

/// Legal moves of a state, produced lazily.
pub enum Moves {
    Singles(std::vec::IntoIter<usize>),
    Subsets { threats: ThreatSet, mover: Color, next: u64, end: u64 },
}

impl Iterator for Moves {
    type Item = Move;

    fn next(&mut self) -> Option<Move> {
        match self {
            Moves::Singles(it) => it.next().map(Move::single),
            Moves::Subsets { threats, mover, next, end } => {
                while *next < *end {
                    let m = *next;
                    *next += 1;
                    if !threats.completes(*mover, m) {
                        let free = threats.free_edges();
                        let edges = (0..free.len()).filter(|&i| m >> i & 1 == 1).map(|i| free[i]).collect();
                        return Some(Move { edges });
                    }
                }
                None
            }
        }
    }
}

/// All legal moves for the player to move. In the avoidance variants a
/// finished game is exactly one where the mover is stuck, so the empty
/// collection is returned there instead of an error.
pub fn legal_moves(spec: &GameSpec, state: &GameState) -> Result<Moves> {
    if state.is_over() {
        if spec.variant().forbids_target() {
            return Ok(Moves::Singles(Vec::new().into_iter()));
        }
        return Err(Error::GameOver);
    }
    let p = &state.position;
    let mover = state.to_move;
    if spec.variant() == Variant::AvoidPlus {
        let free = p.uncolored_edges().len();
        if free > 63 {
            return Err(Error::BoardTooLarge(format!("{free} uncolored edges; subset moves support at most 63")));
        }
        let threats = ThreatSet::compile(p, spec.target(Color::Red), spec.target(Color::Green))?;
        return Ok(Moves::Subsets { threats, mover, next: 1, end: 1u64 << free });
    }
    let mut edges = p.uncolored_edges();
    if spec.variant().forbids_target() {
        let target = spec.target(mover);
        edges.retain(|&e| !move_completes(p, e, mover, target).expect("edge is uncolored"));
    }
    Ok(Moves::Singles(edges.into_iter()))
}

/// Applies a move by the player to move.
pub fn apply_move(spec: &GameSpec, state: &GameState, mv: &Move) -> Result<GameState> {
    if state.is_over() {
        return Err(Error::GameOver);
    }
    if mv.edges.len() != 1 && spec.variant() != Variant::AvoidPlus {
        return Err(Error::IllegalMove(format!("{} moves color exactly one edge", spec.variant())));
    }
    let mover = state.to_move;
    let target = spec.target(mover);
    let mut p = state.position.clone();
    for &e in &mv.edges {
        if e >= p.cells().len() {
            return Err(Error::EdgeOutOfRange(e));
        }
        if p.cell(e).color().is_some() {
            return Err(Error::EdgeColored(e));
        }
    }
    let completed = if mv.edges.len() == 1 {
        move_completes(&p, mv.edges[0], mover, target)?
    } else {
        for &e in &mv.edges {
            p.set(e, mover.cell());
        }
        contains_mono(&p, mover, target)
    };
    if completed && spec.variant().forbids_target() {
        return Err(Error::IllegalMove(format!("move completes a {mover} copy of the target")));
    }
    if mv.edges.len() == 1 {
        p.set(mv.edges[0], mover.cell());
    }
    let status = status_after(spec, &p, Some(mover), completed);
    Ok(GameState { position: p, to_move: mover.other(), status, moves_made: state.moves_made + 1 })
}

/// Whether the precolored board arrows the target, in which case the
/// avoidance game and its misère variant have the same winner.
pub fn misere_equiv_check(spec: &GameSpec) -> Result<bool> {
    if spec.target(Color::Red) != spec.target(Color::Green) {
        return Err(Error::InvalidSpec("misère equivalence needs a single target".into()));
    }
    arrows_with_cap(&spec.initial_position(), spec.target(Color::Red), DEFAULT_ARROWS_CAP)
}

/// Builds a state directly from a position, deriving the side to move from
/// the color counts. Meant for positions reached by alternating play.
pub fn state_from_position(spec: &GameSpec, position: Position) -> Result<GameState> {
    if !Arc::ptr_eq(position.board(), spec.board()) && position.board().as_ref() != spec.board().as_ref() {
        return Err(Error::InvalidPosition("position is on a different board".into()));
    }
    let base = spec.initial_position();
    let added_red = position.red_count() as isize - base.red_count() as isize;
    let added_green = position.green_count() as isize - base.green_count() as isize;
    let (to_move, mover) = match added_red - added_green {
        0 => (Color::Red, if added_red == 0 { None } else { Some(Color::Green) }),
        1 => (Color::Green, Some(Color::Red)),
        _ => return Err(Error::InvalidPosition("color counts do not come from alternating play".into())),
    };
    let completed = mover.is_some_and(|m| contains_mono(&position, m, spec.target(m)));
    let status = status_after(spec, &position, mover, completed);
    let moves_made = (added_red + added_green) as usize;
    Ok(GameState { position, to_move, status, moves_made })
}

/// Convenience for tests and the CLI: `Graph::complete(n)` wrapped for boards.
pub fn complete_board(n: usize) -> Arc<Graph> {
    Arc::new(Graph::complete(n))
}
