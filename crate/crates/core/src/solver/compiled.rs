use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::game::{GameSpec, GameState, Move, Status, Variant};
use crate::graph::{encode_position, Cell, Color, KnCanonizer, Position, ThreatSet, BRUTE_FORCE_MAX_N};

/// A search node over the spec's free edges: bit `i` is `free[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Node {
    pub red: u64,
    pub green: u64,
    pub to_move: Color,
    pub status: Status,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Child {
    pub node: Node,
    /// Free-edge bits colored by the move.
    pub mv: u64,
    pub key: u128,
}

/// A game compiled to bitmask form: precomputed threat masks for both
/// colors and, on complete boards of up to eight vertices, a canonizer for
/// memo keys.
pub(crate) struct CompiledGame {
    pub spec: GameSpec,
    threats: ThreatSet,
    free: Vec<usize>,
    full: u64,
    canon: Option<Arc<KnCanonizer>>,
    pre_red: u64,
    pre_green: u64,
    identity_free: bool,
    pub side_in_key: bool,
}

impl CompiledGame {
    pub fn new(spec: &GameSpec) -> Result<Self> {
        let start = spec.initial_state()?;
        let threats = ThreatSet::compile(&start.position, spec.target(Color::Red), spec.target(Color::Green))?;
        let free = threats.free_edges().to_vec();
        if free.len() > 63 {
            return Err(Error::BoardTooLarge(format!("{} uncolored edges; the solver supports 63", free.len())));
        }
        let board = spec.board();
        let canon = if board.is_complete() && board.vertex_count() <= BRUTE_FORCE_MAX_N {
            Some(KnCanonizer::shared(board.vertex_count())?)
        } else {
            None
        };
        let to_mask = |set: &[usize]| set.iter().fold(0u64, |m, &e| m | 1 << e);
        let (pre_red, pre_green) = if canon.is_some() {
            (to_mask(spec.precolor(Color::Red)), to_mask(spec.precolor(Color::Green)))
        } else {
            (0, 0)
        };
        let identity_free = free.iter().enumerate().all(|(i, &e)| i == e);
        Ok(CompiledGame {
            spec: spec.clone(),
            threats,
            full: if free.is_empty() { 0 } else { u64::MAX >> (64 - free.len()) },
            free,
            canon,
            pre_red,
            pre_green,
            identity_free,
            side_in_key: spec.variant() == Variant::AvoidPlus,
        })
    }

    pub fn is_canonical(&self) -> bool {
        self.canon.is_some()
    }

    pub fn free_edges(&self) -> &[usize] {
        &self.free
    }

    pub fn root(&self) -> Node {
        let status = self.spec.initial_state().expect("validated in new").status;
        Node { red: 0, green: 0, to_move: Color::Red, status }
    }

    fn expand(&self, bits: u64) -> u64 {
        if self.identity_free {
            return bits;
        }
        let mut out = 0;
        let mut m = bits;
        while m != 0 {
            out |= 1 << self.free[m.trailing_zeros() as usize];
            m &= m - 1;
        }
        out
    }

    /// Memo key: canonical code (or raw bits on other boards), shifted left
    /// once; the low bit is the side to move when it is part of the key.
    pub fn key(&self, red: u64, green: u64, to_move: Color) -> u128 {
        let side = u128::from(self.side_in_key && to_move == Color::Green);
        let code = match &self.canon {
            Some(kc) => kc.code(self.pre_red | self.expand(red), self.pre_green | self.expand(green)) as u128,
            None => red as u128 | (green as u128) << 63,
        };
        code << 1 | side
    }

    pub fn node_key(&self, n: &Node) -> u128 {
        self.key(n.red, n.green, n.to_move)
    }

    fn set_of(n: &Node, c: Color) -> u64 {
        match c {
            Color::Red => n.red,
            Color::Green => n.green,
        }
    }

    fn has_single_move(&self, red: u64, green: u64, color: Color) -> bool {
        let own = if color == Color::Red { red } else { green };
        let mut open = self.full & !(red | green);
        while open != 0 {
            let b = open & open.wrapping_neg();
            if !self.threats.completes(color, own | b) {
                return true;
            }
            open &= open - 1;
        }
        false
    }

    fn status_after(&self, red: u64, green: u64, mover: Color, completed: bool) -> Status {
        let full = (red | green) == self.full;
        match self.spec.variant() {
            Variant::Avoid | Variant::AvoidPlus | Variant::AsymmetricAvoid => {
                if self.has_single_move(red, green, mover.other()) {
                    Status::Ongoing
                } else {
                    Status::Win(mover)
                }
            }
            Variant::AvoidMisere => {
                if completed {
                    Status::Win(mover.other())
                } else if full {
                    Status::Tie
                } else {
                    Status::Ongoing
                }
            }
            v @ (Variant::Achieve | Variant::AchievePrime | Variant::AchieveWeak) => {
                if completed && !(v == Variant::AchieveWeak && mover == Color::Green) {
                    Status::Win(mover)
                } else if full {
                    if v == Variant::Achieve {
                        Status::Tie
                    } else {
                        Status::Win(Color::Green)
                    }
                } else {
                    Status::Ongoing
                }
            }
        }
    }

    fn child(&self, n: &Node, mv: u64) -> Child {
        let mover = n.to_move;
        let own = Self::set_of(n, mover) | mv;
        let (red, green) = match mover {
            Color::Red => (own, n.green),
            Color::Green => (n.red, own),
        };
        let completed = self.threats.completes(mover, own);
        let status = self.status_after(red, green, mover, completed);
        let node = Node { red, green, to_move: mover.other(), status };
        Child { node, mv, key: self.key(red, green, node.to_move) }
    }

    /// All children of an ongoing node. In `AvoidPlus` children with equal
    /// keys are merged, keeping the first move found.
    pub fn children(&self, n: &Node, out: &mut Vec<Child>) {
        out.clear();
        if self.spec.variant() == Variant::AvoidPlus {
            let own = Self::set_of(n, n.to_move);
            let open = self.full & !(n.red | n.green);
            let bits: Vec<u64> = (0..64).map(|i| 1u64 << i).filter(|b| open & b != 0).collect();
            let mut seen = HashSet::new();
            self.subsets(n, own, &bits, 0, 0, &mut seen, out);
            return;
        }
        self.push_singles(n, out);
    }

    /// The single-edge moves of a node (all moves except in `AvoidPlus`).
    pub fn single_moves(&self, n: &Node, out: &mut Vec<Child>) {
        out.clear();
        self.push_singles(n, out);
    }

    fn push_singles(&self, n: &Node, out: &mut Vec<Child>) {
        let mover = n.to_move;
        let own = Self::set_of(n, mover);
        let forbids = self.spec.variant().forbids_target();
        let mut m = self.full & !(n.red | n.green);
        while m != 0 {
            let b = m & m.wrapping_neg();
            m &= m - 1;
            if forbids && self.threats.completes(mover, own | b) {
                continue;
            }
            out.push(self.child(n, b));
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn subsets(
        &self,
        n: &Node,
        own: u64,
        bits: &[u64],
        from: usize,
        chosen: u64,
        seen: &mut HashSet<u128>,
        out: &mut Vec<Child>,
    ) {
        for i in from..bits.len() {
            let s = chosen | bits[i];
            if self.threats.completes(n.to_move, own | s) {
                continue;
            }
            let c = self.child(n, s);
            if seen.insert(c.key) {
                out.push(c);
            }
            self.subsets(n, own, bits, i + 1, s, seen, out);
        }
    }

    /// Every legal move of a node without merging, as free-edge bitmasks.
    pub fn all_moves(&self, n: &Node) -> Vec<Child> {
        if self.spec.variant() != Variant::AvoidPlus {
            let mut out = Vec::new();
            self.children(n, &mut out);
            return out;
        }
        let own = Self::set_of(n, n.to_move);
        let open = self.full & !(n.red | n.green);
        let bits: Vec<u64> = (0..64).map(|i| 1u64 << i).filter(|b| open & b != 0).collect();
        let mut out = Vec::new();
        let mut stack = vec![(0usize, 0u64)];
        while let Some((from, chosen)) = stack.pop() {
            for i in from..bits.len() {
                let s = chosen | bits[i];
                if !self.threats.completes(n.to_move, own | s) {
                    out.push(self.child(n, s));
                    stack.push((i + 1, s));
                }
            }
        }
        out
    }

    /// Converts a game state on this spec's board into a search node.
    pub fn node_of(&self, state: &GameState) -> Result<Node> {
        let p = &state.position;
        if p.board().as_ref() != self.spec.board().as_ref() {
            return Err(Error::InvalidPosition("state is on a different board".into()));
        }
        let initial = self.spec.initial_position();
        let mut red = 0;
        let mut green = 0;
        for (e, (&now, &then)) in p.cells().iter().zip(initial.cells()).enumerate() {
            if now == then {
                continue;
            }
            if then != Cell::Uncolored {
                return Err(Error::InvalidPosition(format!("precolored edge {e} was changed")));
            }
            let bit = 1u64 << self.threats.bit_of(e).expect("initially uncolored");
            match now {
                Cell::Red => red |= bit,
                Cell::Green => green |= bit,
                Cell::Uncolored => unreachable!(),
            }
        }
        Ok(Node { red, green, to_move: state.to_move, status: state.status })
    }

    pub fn move_of(&self, mv: u64) -> Move {
        Move::new((0..self.free.len()).filter(|&i| mv >> i & 1 == 1).map(|i| self.free[i]).collect())
            .expect("moves are nonempty")
    }

    /// Base-3 code of the position behind a memo key (its canonical
    /// representative on canonical boards).
    pub fn key_code(&self, key: u128) -> BigUint {
        let body = key >> 1;
        match &self.canon {
            Some(_) => BigUint::from(body as u64),
            None => {
                let red = (body as u64) & (u64::MAX >> 1);
                let green = (body >> 63) as u64;
                encode_position(&self.position_of(red, green))
            }
        }
    }

    /// Inverse of [`CompiledGame::key_code`] for a given side bit.
    pub fn key_from_code(&self, code: &BigUint, side: bool) -> Result<u128> {
        let body = match &self.canon {
            Some(_) => u64::try_from(code).map_err(|_| Error::Format("key code too large".into()))? as u128,
            None => {
                let p = crate::graph::decode_position(code, self.spec.board().clone())?;
                let mut red = 0u64;
                let mut green = 0u64;
                let initial = self.spec.initial_position();
                for (e, (&now, &then)) in p.cells().iter().zip(initial.cells()).enumerate() {
                    if now == then {
                        continue;
                    }
                    let bit = self
                        .threats
                        .bit_of(e)
                        .filter(|_| then == Cell::Uncolored)
                        .ok_or_else(|| Error::Format("key disagrees with the precoloring".into()))?;
                    match now {
                        Cell::Red => red |= 1 << bit,
                        Cell::Green => green |= 1 << bit,
                        Cell::Uncolored => return Err(Error::Format("key uncolors a precolored edge".into())),
                    }
                }
                red as u128 | (green as u128) << 63
            }
        };
        Ok(body << 1 | u128::from(side))
    }

    pub fn position_of(&self, red: u64, green: u64) -> Position {
        let mut p = self.spec.initial_position();
        for (i, &e) in self.free.iter().enumerate() {
            if red >> i & 1 == 1 {
                p.set(e, Cell::Red);
            } else if green >> i & 1 == 1 {
                p.set(e, Cell::Green);
            }
        }
        p
    }
}
