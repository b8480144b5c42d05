//! The adaptive opponent: perfect play where the strategy table grants a
//! win, otherwise a trap-setting heuristic combined with learned values.

mod io;

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{apply_move, GameSpec, GameState, Move, Status, Variant};
use crate::graph::{Color, Graph};
use crate::solver::{Child, StrategyTable, Value};

pub use io::{read_learning, write_learning, LEARNING_MAGIC};

/// Value every learned entry starts from.
pub const INITIAL_LEARNED: i8 = 1;

/// Adds `delta` to a learned value, clamping to the byte range. A result of
/// zero moves one more unit in the direction of the update.
pub fn step(value: i8, delta: i32) -> i8 {
    let mut v = (i32::from(value) + delta).clamp(-128, 127);
    if v == 0 {
        v = delta.signum();
    }
    v as i8
}

/// Learned desirability of positions where the engine cannot force a win.
/// Keys are strategy-table file keys; missing keys read as
/// [`INITIAL_LEARNED`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LearningTable {
    fingerprint: String,
    vertex_count: u16,
    variant: Variant,
    side_in_key: bool,
    entries: BTreeMap<u64, i8>,
}

impl LearningTable {
    pub fn new(spec: &GameSpec) -> Result<Self> {
        Ok(LearningTable {
            fingerprint: spec.fingerprint(),
            vertex_count: u16::try_from(spec.board().vertex_count())
                .map_err(|_| Error::InvalidSpec("board too large for learning tables".into()))?,
            variant: spec.variant(),
            side_in_key: spec.variant() == Variant::AvoidPlus,
            entries: BTreeMap::new(),
        })
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn vertex_count(&self) -> u16 {
        self.vertex_count
    }

    pub fn side_in_key(&self) -> bool {
        self.side_in_key
    }

    pub fn get(&self, key: u64) -> i8 {
        self.entries.get(&key).copied().unwrap_or(INITIAL_LEARNED)
    }

    pub fn set(&mut self, key: u64, value: i8) -> Result<()> {
        if value == 0 {
            return Err(Error::Invariant("learned values are never zero".into()));
        }
        self.entries.insert(key, value);
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = (u64, i8)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Per-edge weights used to favour traps on edges a human is likely to pick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SalienceWeights(Vec<f64>);

impl SalienceWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidSpec("salience weights must be finite and nonnegative".into()));
        }
        Ok(SalienceWeights(weights))
    }

    pub fn uniform(edges: usize) -> Self {
        SalienceWeights(vec![1.0; edges])
    }

    /// `K6` drawn as a hexagon with vertices 0..5 in order around it: the
    /// six edges of the central square on 0, 1, 3, 4 weigh 2, the four
    /// remaining hexagon sides 1.5, the long diagonals 1.
    pub fn hexagon() -> Self {
        let g = Graph::complete(6);
        let square = [0, 1, 3, 4];
        let weights = g
            .edges()
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (a as usize, b as usize);
                if square.contains(&a) && square.contains(&b) {
                    2.0
                } else if b - a == 1 || (a, b) == (0, 5) {
                    1.5
                } else {
                    1.0
                }
            })
            .collect();
        SalienceWeights(weights)
    }

    /// The hexagon weights on `K6`, uniform weights elsewhere.
    pub fn for_board(board: &Graph) -> Self {
        if board.is_complete() && board.vertex_count() == 6 {
            SalienceWeights::hexagon()
        } else {
            SalienceWeights::uniform(board.edge_count())
        }
    }

    pub fn weight(&self, edge: usize) -> f64 {
        self.0.get(edge).copied().unwrap_or(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub epsilon: f64,
}

impl Default for ScoreWeights {
    fn default() -> Self {
        ScoreWeights { alpha: 1.0, beta: 0.25, gamma: 1.0, epsilon: 0.05 }
    }
}

pub const DEFAULT_LEARNING_FACTOR: u8 = 4;

/// One candidate move with the parts of its score.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub mv: Move,
    pub value: Value,
    /// Table key of the position after the move.
    pub key: u64,
    /// Opponent replies that hand the engine a won position.
    pub blunders: usize,
    pub blunder_salience: f64,
    pub learned: i8,
    pub score: f64,
}

/// Moves keeping the state's optimal value, scored. When that value is a
/// win for the mover every score is 1. In `AvoidPlus` only single-edge
/// replies are counted as blunders.
pub fn score_moves(
    table: &StrategyTable,
    state: &GameState,
    learn: &LearningTable,
    salience: &SalienceWeights,
    weights: &ScoreWeights,
) -> Result<Vec<Candidate>> {
    if state.is_over() {
        return Err(Error::GameOver);
    }
    if learn.fingerprint() != table.fingerprint() {
        return Err(Error::FingerprintMismatch);
    }
    let game = table.compiled();
    let node = game.node_of(state)?;
    let mover = state.to_move;
    let children = game.all_moves(&node);
    if children.is_empty() {
        return Err(Error::IllegalMove("no legal moves".into()));
    }
    let valued: Vec<(Child, Value)> = children
        .into_iter()
        .map(|c| Ok((c, table.value_of_key(c.key).ok_or(Error::MissingState)?)))
        .collect::<Result<_>>()?;
    let best = valued.iter().map(|(_, v)| *v).max_by_key(|v| rank(*v, mover)).expect("nonempty");
    let winning = best == Value::win_for(mover);
    let mut out = Vec::new();
    let mut replies = Vec::new();
    for (c, v) in valued.into_iter().filter(|(_, v)| *v == best) {
        let key = table.external_key(c.key)?;
        let mut blunders = 0;
        let mut blunder_salience = 0.0;
        if !winning && c.node.status == Status::Ongoing {
            game.single_moves(&c.node, &mut replies);
            for r in &replies {
                if table.value_of_key(r.key) == Some(Value::win_for(mover)) {
                    blunders += 1;
                    blunder_salience += game.move_of(r.mv).edges().iter().map(|&e| salience.weight(e)).sum::<f64>();
                }
            }
        }
        let learned = learn.get(key);
        let score = if winning {
            1.0
        } else {
            weights.alpha * blunders as f64
                + weights.beta * blunder_salience
                + weights.gamma * f64::from(learned).max(weights.epsilon)
        };
        out.push(Candidate { mv: game.move_of(c.mv), value: v, key, blunders, blunder_salience, learned, score });
    }
    Ok(out)
}

fn rank(v: Value, mover: Color) -> u8 {
    match v.winner() {
        Some(c) if c == mover => 2,
        None => 1,
        _ => 0,
    }
}

/// Picks a move: uniformly among winning moves when one exists, otherwise
/// among the value-preserving moves with probability proportional to score.
pub fn choose_move<R: Rng + ?Sized>(
    table: &StrategyTable,
    state: &GameState,
    learn: &LearningTable,
    salience: &SalienceWeights,
    weights: &ScoreWeights,
    rng: &mut R,
) -> Result<Move> {
    let candidates = score_moves(table, state, learn, salience, weights)?;
    let total: f64 = candidates.iter().map(|c| c.score).sum();
    if !(total > 0.0) {
        return Ok(candidates.choose(rng).expect("nonempty").mv.clone());
    }
    let mut x = rng.gen::<f64>() * total;
    for c in &candidates {
        if x < c.score {
            return Ok(c.mv.clone());
        }
        x -= c.score;
    }
    Ok(candidates.last().expect("nonempty").mv.clone())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordedMove {
    /// Table key of the state before the move.
    pub state_key: u64,
    pub edges: Vec<usize>,
    pub mover: Color,
}

/// A finished game as seen by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameRecord {
    pub engine: Color,
    pub moves: Vec<RecordedMove>,
    pub outcome: Status,
    /// The loser ran out of moves rather than completing a target.
    pub forced: bool,
}

impl GameRecord {
    pub fn new(engine: Color) -> Self {
        GameRecord { engine, moves: Vec::new(), outcome: Status::Ongoing, forced: false }
    }

    pub fn push(&mut self, table: &StrategyTable, state: &GameState, mv: &Move) -> Result<()> {
        self.moves.push(RecordedMove { state_key: table.state_key(state)?, edges: mv.edges().to_vec(), mover: state.to_move });
        Ok(())
    }

    pub fn finish(&mut self, spec: &GameSpec, last: &GameState) {
        self.outcome = last.status;
        self.forced = ended_by_force(spec, last);
    }

    /// Replays the record, returning every state from the start to the end.
    pub fn replay(&self, table: &StrategyTable) -> Result<Vec<GameState>> {
        let spec = table.spec();
        let corrupt = |why: &str| Error::CorruptRecord(why.to_string());
        let mut s = spec.initial_state()?;
        let mut trail = vec![s.clone()];
        for m in &self.moves {
            if m.mover != s.to_move {
                return Err(corrupt("mover out of turn"));
            }
            if table.state_key(&s)? != m.state_key {
                return Err(corrupt("state key does not match the replay"));
            }
            let mv = Move::new(m.edges.clone()).map_err(|_| corrupt("empty move"))?;
            s = apply_move(spec, &s, &mv).map_err(|e| Error::CorruptRecord(e.to_string()))?;
            trail.push(s.clone());
        }
        if s.status != self.outcome || s.status == Status::Ongoing {
            return Err(corrupt("outcome does not match the replay"));
        }
        if ended_by_force(spec, &s) != self.forced {
            return Err(corrupt("forced flag does not match the replay"));
        }
        Ok(trail)
    }
}

/// Whether a finished game ended without the loser completing a target.
fn ended_by_force(spec: &GameSpec, last: &GameState) -> bool {
    match last.status {
        Status::Win(_) => spec.variant() != Variant::AvoidMisere,
        _ => false,
    }
}

/// Reinforces the positions the engine chose without a forced win: up by
/// `factor` after a win where the opponent was forced, down after a loss.
pub fn update_after_game(
    learn: &LearningTable,
    table: &StrategyTable,
    record: &GameRecord,
    factor: u8,
) -> Result<LearningTable> {
    if learn.fingerprint() != table.fingerprint() {
        return Err(Error::FingerprintMismatch);
    }
    let trail = record.replay(table)?;
    let delta = match record.outcome {
        Status::Win(c) if c == record.engine && record.forced => i32::from(factor),
        Status::Win(c) if c != record.engine => -i32::from(factor),
        _ => return Ok(learn.clone()),
    };
    let mut out = learn.clone();
    for (i, m) in record.moves.iter().enumerate() {
        if m.mover != record.engine {
            continue;
        }
        let after = &trail[i + 1];
        if table.value(after)? == Value::win_for(record.engine) {
            continue;
        }
        let key = table.state_key(after)?;
        out.set(key, step(out.get(key), delta))?;
    }
    Ok(out)
}

/// Applies a random vertex permutation to a state on a complete board.
pub fn shake<R: Rng + ?Sized>(state: &GameState, rng: &mut R) -> Result<(Vec<usize>, GameState)> {
    let board = state.position.board();
    if !board.is_complete() {
        return Err(Error::InvalidSpec("shaking needs a complete board".into()));
    }
    let mut perm: Vec<usize> = (0..board.vertex_count()).collect();
    perm.shuffle(rng);
    let shaken = permute_state(state, &perm)?;
    Ok((perm, shaken))
}

pub fn permute_state(state: &GameState, perm: &[usize]) -> Result<GameState> {
    Ok(GameState { position: state.position.permuted(perm)?, ..state.clone() })
}

/// Adds the deviations of `delta` from the initial value to `base`.
/// Commutative and associative as long as no entry hits a clamp.
pub fn merge_experience(base: &LearningTable, delta: &LearningTable) -> Result<LearningTable> {
    if base.fingerprint != delta.fingerprint {
        return Err(Error::FingerprintMismatch);
    }
    let mut out = base.clone();
    for (k, v) in delta.entries() {
        let d = i32::from(v) - i32::from(INITIAL_LEARNED);
        if d != 0 {
            out.set(k, step(out.get(k), d))?;
        }
    }
    Ok(out)
}
