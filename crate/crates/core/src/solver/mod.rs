//! Exact game values by memoized minimax over canonical positions.

mod compiled;
mod io;

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{GameSpec, GameState, Move, Status};
use crate::graph::{Color, KnCanonizer};

pub(crate) use compiled::{Child, CompiledGame, Node};
pub use io::{read_table, write_table, TABLE_MAGIC};

/// Game value from Red's point of view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Value {
    RWin,
    RLoss,
    Tie,
}

impl Value {
    pub fn byte(self) -> u8 {
        match self {
            Value::RWin => 0,
            Value::RLoss => 1,
            Value::Tie => 2,
        }
    }

    pub fn from_byte(b: u8) -> Option<Value> {
        match b {
            0 => Some(Value::RWin),
            1 => Some(Value::RLoss),
            2 => Some(Value::Tie),
            _ => None,
        }
    }

    pub fn win_for(c: Color) -> Value {
        match c {
            Color::Red => Value::RWin,
            Color::Green => Value::RLoss,
        }
    }

    fn of_status(s: Status) -> Option<Value> {
        match s {
            Status::Ongoing => None,
            Status::Win(c) => Some(Value::win_for(c)),
            Status::Tie => Some(Value::Tie),
        }
    }

    /// Rank for `mover`: higher is better.
    fn rank(self, mover: Color) -> u8 {
        match (self, mover) {
            (Value::Tie, _) => 1,
            (Value::RWin, Color::Red) | (Value::RLoss, Color::Green) => 2,
            _ => 0,
        }
    }

    pub fn winner(self) -> Option<Color> {
        match self {
            Value::RWin => Some(Color::Red),
            Value::RLoss => Some(Color::Green),
            Value::Tie => None,
        }
    }

    pub fn game_value(self) -> GameValue {
        match self {
            Value::RWin => GameValue::FirstWin,
            Value::RLoss => GameValue::SecondWin,
            Value::Tie => GameValue::Tie,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Value::RWin => "R-WIN",
            Value::RLoss => "R-LOSS",
            Value::Tie => "TIE",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GameValue {
    FirstWin,
    SecondWin,
    Tie,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    /// Distinct reachable positions, terminal ones included.
    pub nonisomorphic_legal_with_terminal: u64,
    /// Distinct reachable positions where the game is still running.
    pub nonisomorphic_stored: u64,
    /// The same two counts when red/green swaps are identified too (complete
    /// boards only).
    pub swap_classes_with_terminal: Option<u64>,
    pub swap_classes_stored: Option<u64>,
    pub earliest_forced_win: Option<u64>,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Visit every reachable position. Without it the search stops at the
    /// first winning move, which still gives exact values for everything
    /// stored but skips positions irrelevant to the root value.
    pub exhaustive: bool,
    /// Maximum number of memo entries.
    pub budget: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { exhaustive: true, budget: 50_000_000 }
    }
}

const TERMINAL: u8 = 4;

/// Values of every reachable position of one spec.
pub struct StrategyTable {
    game: CompiledGame,
    fingerprint: String,
    entries: HashMap<u128, u8>,
    root_key: u128,
}

impl fmt::Debug for StrategyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StrategyTable")
            .field("fingerprint", &self.fingerprint)
            .field("entries", &self.entries.len())
            .finish()
    }
}

impl StrategyTable {
    pub fn spec(&self) -> &GameSpec {
        &self.game.spec
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn side_in_key(&self) -> bool {
        self.game.side_in_key
    }

    pub fn root_value(&self) -> Value {
        self.value_of_key(self.root_key).expect("root is always stored")
    }

    pub(crate) fn value_of_key(&self, key: u128) -> Option<Value> {
        self.entries.get(&key).map(|&v| Value::from_byte(v & 3).expect("valid value"))
    }

    /// Value of a state of this spec.
    pub fn value(&self, state: &GameState) -> Result<Value> {
        let node = self.game.node_of(state)?;
        self.value_of_key(self.game.node_key(&node)).ok_or(Error::MissingState)
    }

    /// The key a state is filed under in table files.
    pub fn state_key(&self, state: &GameState) -> Result<u64> {
        let node = self.game.node_of(state)?;
        self.external_key(self.game.node_key(&node))
    }

    pub(crate) fn external_key(&self, key: u128) -> Result<u64> {
        u64::try_from(&io::file_key(self, key)).map_err(|_| Error::Format("key exceeds 64 bits".into()))
    }

    /// Sorted `(key, value, terminal)` triples.
    pub(crate) fn sorted_entries(&self) -> Vec<(u128, Value, bool)> {
        let mut v: Vec<_> = self
            .entries
            .iter()
            .map(|(&k, &b)| (k, Value::from_byte(b & 3).unwrap(), b & TERMINAL != 0))
            .collect();
        v.sort_unstable_by_key(|e| e.0);
        v
    }

    pub(crate) fn compiled(&self) -> &CompiledGame {
        &self.game
    }

    pub fn stats(&self) -> SolveStats {
        let with_terminal = self.entries.len() as u64;
        let stored = self.entries.values().filter(|&&b| b & TERMINAL == 0).count() as u64;
        let (swap_all, swap_stored) = match self.swap_census() {
            Some((a, s)) => (Some(a), Some(s)),
            None => (None, None),
        };
        SolveStats {
            nonisomorphic_legal_with_terminal: with_terminal,
            nonisomorphic_stored: stored,
            swap_classes_with_terminal: swap_all,
            swap_classes_stored: swap_stored,
            earliest_forced_win: earliest_forced_win(self).ok(),
        }
    }

    fn swap_census(&self) -> Option<(u64, u64)> {
        if !self.game.is_canonical() {
            return None;
        }
        let kc = KnCanonizer::shared(self.spec().board().vertex_count()).ok()?;
        let mut all = HashSet::new();
        let mut stored = HashSet::new();
        for (&key, &b) in &self.entries {
            let code = (key >> 1) as u64;
            let (r, g) = kc.code_masks(code);
            let side = key & 1;
            let mirror = (kc.code(g, r), if self.side_in_key() { side ^ 1 } else { side });
            let class = (code, side).min(mirror);
            all.insert(class);
            if b & TERMINAL == 0 {
                stored.insert(class);
            }
        }
        Some((all.len() as u64, stored.len() as u64))
    }

    /// Rebuilds a table from stored entries, e.g. after reading a file.
    /// Terminal flags are not stored in files; they are recovered by walking
    /// the reachable positions, which also checks that the table is complete.
    pub(crate) fn from_entries(spec: &GameSpec, mut entries: HashMap<u128, u8>) -> Result<Self> {
        let game = CompiledGame::new(spec)?;
        let root = game.root();
        let root_key = game.node_key(&root);
        let mut seen = HashSet::from([root_key]);
        let mut stack = vec![(root, root_key)];
        let mut children = Vec::new();
        while let Some((node, key)) = stack.pop() {
            let slot = entries.get_mut(&key).ok_or(Error::MissingState)?;
            if node.status != Status::Ongoing {
                *slot |= TERMINAL;
                continue;
            }
            game.children(&node, &mut children);
            for c in &children {
                if seen.insert(c.key) {
                    stack.push((c.node, c.key));
                }
            }
        }
        if seen.len() != entries.len() {
            return Err(Error::Format("table holds positions the game cannot reach".into()));
        }
        Ok(StrategyTable { fingerprint: spec.fingerprint(), game, entries, root_key })
    }
}

struct Search<'a> {
    game: &'a CompiledGame,
    memo: HashMap<u128, u8>,
    opts: SolveOptions,
}

impl Search<'_> {
    fn value(&mut self, node: &Node, key: u128) -> Result<Value> {
        if let Some(&b) = self.memo.get(&key) {
            return Ok(Value::from_byte(b & 3).unwrap());
        }
        if let Some(v) = Value::of_status(node.status) {
            self.memo.insert(key, v.byte() | TERMINAL);
            return Ok(v);
        }
        if self.memo.len() >= self.opts.budget {
            return Err(Error::BudgetExceeded(self.memo.len()));
        }
        let mover = node.to_move;
        let mut children = Vec::new();
        self.game.children(node, &mut children);
        let mut best: Option<Value> = None;
        for c in &children {
            let v = self.value(&c.node, c.key)?;
            if best.is_none_or(|b| v.rank(mover) > b.rank(mover)) {
                best = Some(v);
            }
            if v.rank(mover) == 2 && !self.opts.exhaustive {
                break;
            }
        }
        let v = best.ok_or_else(|| Error::Invariant("ongoing position without moves".into()))?;
        self.memo.insert(key, v.byte());
        Ok(v)
    }
}

pub fn solve(spec: &GameSpec) -> Result<StrategyTable> {
    solve_with(spec, SolveOptions::default())
}

pub fn solve_with(spec: &GameSpec, opts: SolveOptions) -> Result<StrategyTable> {
    let game = CompiledGame::new(spec)?;
    let root = game.root();
    let root_key = game.node_key(&root);
    let mut search = Search { game: &game, memo: HashMap::new(), opts };
    search.value(&root, root_key)?;
    let entries = search.memo;
    Ok(StrategyTable { fingerprint: spec.fingerprint(), game, entries, root_key })
}

/// Root value only, searching with cutoffs.
pub fn root_value(spec: &GameSpec, budget: usize) -> Result<Value> {
    Ok(solve_with(spec, SolveOptions { exhaustive: false, budget })?.root_value())
}

pub fn stats(spec: &GameSpec) -> Result<SolveStats> {
    Ok(solve(spec)?.stats())
}

fn lookup(table: &StrategyTable, child_key: u128) -> Result<Value> {
    table.value_of_key(child_key).ok_or(Error::MissingState)
}

/// Every legal move whose resulting position keeps the state's value for
/// the mover.
pub fn best_moves(table: &StrategyTable, state: &GameState) -> Result<Vec<Move>> {
    let game = &table.game;
    let node = game.node_of(state)?;
    if node.status != Status::Ongoing {
        return Err(Error::GameOver);
    }
    let own = table.value_of_key(game.node_key(&node)).ok_or(Error::MissingState)?;
    let mut out = Vec::new();
    for c in game.all_moves(&node) {
        if lookup(table, c.key)? == own {
            out.push(game.move_of(c.mv));
        }
    }
    Ok(out)
}

/// As [`best_moves`], keeping one move per resulting position class.
pub fn canonical_best_moves(table: &StrategyTable, state: &GameState) -> Result<Vec<Move>> {
    let game = &table.game;
    let node = game.node_of(state)?;
    if node.status != Status::Ongoing {
        return Err(Error::GameOver);
    }
    let own = table.value_of_key(game.node_key(&node)).ok_or(Error::MissingState)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for c in game.all_moves(&node) {
        if lookup(table, c.key)? == own && seen.insert(c.key) {
            out.push(game.move_of(c.mv));
        }
    }
    Ok(out)
}

/// Values of all children of a state, one per legal move.
pub fn move_values(table: &StrategyTable, state: &GameState) -> Result<Vec<(Move, Value)>> {
    Ok(move_children(table, state)?.into_iter().map(|(m, _, v)| (m, v)).collect())
}

/// Every legal move with the memo key and value of the position it leads to.
pub(crate) fn move_children(table: &StrategyTable, state: &GameState) -> Result<Vec<(Move, u128, Value)>> {
    let game = &table.game;
    let node = game.node_of(state)?;
    game.all_moves(&node).into_iter().map(|c| Ok((game.move_of(c.mv), c.key, lookup(table, c.key)?))).collect()
}

/// The ply at which the winner can seal the win when the loser drags the
/// game out as long as possible. A game ends at the ply of the move that
/// decides it; a player left without a move while edges remain uncolored
/// loses at the following ply.
pub fn earliest_forced_win(table: &StrategyTable) -> Result<u64> {
    let winner = table.root_value().winner().ok_or(Error::RootTie)?;
    let game = &table.game;
    let mut memo: HashMap<u128, u64> = HashMap::new();
    let root = game.root();
    remaining_plies(table, game, &root, game.node_key(&root), winner, &mut memo)
}

fn remaining_plies(
    table: &StrategyTable,
    game: &CompiledGame,
    node: &Node,
    key: u128,
    winner: Color,
    memo: &mut HashMap<u128, u64>,
) -> Result<u64> {
    if let Some(&r) = memo.get(&key) {
        return Ok(r);
    }
    let r = if node.status != Status::Ongoing {
        let stuck = game.spec.variant().forbids_target() && (node.red | node.green).count_ones() < game.free_edges().len() as u32;
        u64::from(stuck)
    } else {
        let mut children = Vec::new();
        game.children(node, &mut children);
        let mut best: Option<u64> = None;
        for c in &children {
            if node.to_move == winner && lookup(table, c.key)? != Value::win_for(winner) {
                continue;
            }
            let r = remaining_plies(table, game, &c.node, c.key, winner, memo)?;
            best = Some(match best {
                None => r,
                Some(b) if node.to_move == winner => b.min(r),
                Some(b) => b.max(r),
            });
        }
        1 + best.ok_or_else(|| Error::Invariant("winning side has no winning move".into()))?
    };
    memo.insert(key, r);
    Ok(r)
}

/// Recomputes every stored non-terminal value from its children. Returns
/// the number of positions checked.
pub fn audit(table: &StrategyTable) -> Result<usize> {
    let game = &table.game;
    let mut seen = HashSet::new();
    let root = game.root();
    let mut stack = vec![(root, game.node_key(&root))];
    seen.insert(stack[0].1);
    let mut checked = 0;
    let mut children = Vec::new();
    while let Some((node, key)) = stack.pop() {
        let stored = lookup(table, key)?;
        if node.status != Status::Ongoing {
            if Value::of_status(node.status) != Some(stored) {
                return Err(Error::Invariant("terminal value disagrees with status".into()));
            }
            continue;
        }
        game.children(&node, &mut children);
        let mut best: Option<Value> = None;
        for c in &children {
            let v = lookup(table, c.key)?;
            if best.is_none_or(|b| v.rank(node.to_move) > b.rank(node.to_move)) {
                best = Some(v);
            }
            if seen.insert(c.key) {
                stack.push((c.node, c.key));
            }
        }
        if best != Some(stored) {
            return Err(Error::Invariant(format!("stored value {stored} does not follow from its children")));
        }
        checked += 1;
    }
    Ok(checked)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bound {
    FirstWin,
    Tie,
    Unknown,
}

/// Classical sufficient conditions for the clique achievement game on `K_n`:
/// a first-player win when `k <= log2(n) / 2`, a tie when
/// `2^(C(k,2) - 1) > C(n, k)`.
pub fn bounds_predicate(n: u64, k: u64) -> Result<Bound> {
    if k < 2 || n < k {
        return Err(Error::InvalidSpec(format!("need n >= k >= 2, got n={n}, k={k}")));
    }
    // k <= log2(n)/2  <=>  2^(2k) <= n
    let first = 2 * k < 64 && (1u64 << (2 * k)) <= n;
    let l = k * (k - 1) / 2 - 1;
    let binom = (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1));
    let tie = BigUint::one() << l.to_usize().expect("small exponent") > binom;
    match (first, tie) {
        (true, true) => Err(Error::ContradictoryBounds { n, k }),
        (true, false) => Ok(Bound::FirstWin),
        (false, true) => Ok(Bound::Tie),
        (false, false) => Ok(Bound::Unknown),
    }
}
