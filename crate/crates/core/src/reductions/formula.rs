use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FormulaKind {
    Cnf,
    Dnf,
}

impl FormulaKind {
    fn header(self) -> &'static str {
        match self {
            FormulaKind::Cnf => "POSCNF v1",
            FormulaKind::Dnf => "POSDNF v1",
        }
    }
}

/// A formula without negations. Variables are numbered from 1. Clauses are
/// the conjuncts of a CNF or the disjuncts of a DNF.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PositiveFormula {
    kind: FormulaKind,
    variables: usize,
    clauses: Vec<Vec<usize>>,
}

impl PositiveFormula {
    /// Validates and normalizes: literals sorted and deduplicated inside
    /// each clause, clauses sorted.
    pub fn new(kind: FormulaKind, variables: usize, clauses: Vec<Vec<usize>>) -> Result<Self> {
        if variables == 0 {
            return Err(Error::InvalidFormula("no variables".into()));
        }
        if clauses.is_empty() {
            return Err(Error::InvalidFormula("no clauses".into()));
        }
        let mut seen = vec![false; variables + 1];
        let mut clauses: Vec<Vec<usize>> = clauses
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c.dedup();
                c
            })
            .collect();
        for c in &clauses {
            if c.is_empty() {
                return Err(Error::InvalidFormula("empty clause".into()));
            }
            for &v in c {
                if v == 0 || v > variables {
                    return Err(Error::InvalidFormula(format!("variable {v} outside 1..={variables}")));
                }
                seen[v] = true;
            }
        }
        if let Some(v) = (1..=variables).find(|&v| !seen[v]) {
            return Err(Error::InvalidFormula(format!("variable {v} does not occur")));
        }
        clauses.sort();
        Ok(PositiveFormula { kind, variables, clauses })
    }

    pub fn cnf(variables: usize, clauses: Vec<Vec<usize>>) -> Result<Self> {
        PositiveFormula::new(FormulaKind::Cnf, variables, clauses)
    }

    pub fn dnf(variables: usize, clauses: Vec<Vec<usize>>) -> Result<Self> {
        PositiveFormula::new(FormulaKind::Dnf, variables, clauses)
    }

    pub fn kind(&self) -> FormulaKind {
        self.kind
    }

    pub fn variables(&self) -> usize {
        self.variables
    }

    pub fn clauses(&self) -> &[Vec<usize>] {
        &self.clauses
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let kind = match lines.next() {
            Some("POSCNF v1") => FormulaKind::Cnf,
            Some("POSDNF v1") => FormulaKind::Dnf,
            other => return Err(Error::Parse(format!("bad formula header {other:?}"))),
        };
        let n = lines
            .next()
            .and_then(|l| l.strip_prefix("n "))
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Parse("expected `n <int>`".into()))?;
        let clauses = lines
            .map(|l| {
                l.split_whitespace()
                    .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("literal `{t}`: {e}"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        PositiveFormula::new(kind, n, clauses)
    }

    pub fn eval(&self, chosen_by_first: u32) -> bool {
        let holds = |c: &Vec<usize>| c.iter().any(|&v| chosen_by_first >> (v - 1) & 1 == 1);
        match self.kind {
            FormulaKind::Cnf => self.clauses.iter().all(holds),
            FormulaKind::Dnf => self.clauses.iter().any(|c| c.iter().all(|&v| chosen_by_first >> (v - 1) & 1 == 1)),
        }
    }
}

impl fmt::Display for PositiveFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.kind.header())?;
        writeln!(f, "n {}", self.variables)?;
        for c in &self.clauses {
            let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", parts.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FormulaPlayer {
    I,
    II,
}

/// Largest variable count the formula games are solved for.
pub const FORMULA_GAME_MAX_VARIABLES: usize = 20;

/// Winner of the variable-choosing game, player I moving first. Player I
/// wins a CNF game by owning a variable in every clause and a DNF game by
/// owning every variable of some clause.
pub fn solve_formula_game(f: &PositiveFormula) -> Result<FormulaPlayer> {
    let n = f.variables();
    if n > FORMULA_GAME_MAX_VARIABLES {
        return Err(Error::CapExceeded { needed: n, cap: FORMULA_GAME_MAX_VARIABLES });
    }
    let masks: Vec<u32> = f.clauses().iter().map(|c| c.iter().fold(0, |m, &v| m | 1 << (v - 1))).collect();
    let mut memo = HashMap::new();
    let first_wins = first_wins(f.kind(), &masks, (1u32 << n) - 1, 0, 0, &mut memo);
    Ok(if first_wins { FormulaPlayer::I } else { FormulaPlayer::II })
}

/// Whether player I wins from the given split, with the player to move
/// implied by the counts.
fn first_wins(kind: FormulaKind, masks: &[u32], all: u32, one: u32, two: u32, memo: &mut HashMap<(u32, u32), bool>) -> bool {
    // Decided as soon as every clause is settled one way.
    let decided = match kind {
        FormulaKind::Cnf => {
            if masks.iter().any(|&m| m & !two == 0) {
                Some(false)
            } else if masks.iter().all(|&m| m & one != 0) {
                Some(true)
            } else {
                None
            }
        }
        FormulaKind::Dnf => {
            if masks.iter().any(|&m| m & !one == 0) {
                Some(true)
            } else if masks.iter().all(|&m| m & two != 0) {
                Some(false)
            } else {
                None
            }
        }
    };
    if let Some(d) = decided {
        return d;
    }
    if let Some(&v) = memo.get(&(one, two)) {
        return v;
    }
    let free = all & !(one | two);
    let first_to_move = one.count_ones() == two.count_ones();
    let mut m = free;
    let mut result = !first_to_move;
    while m != 0 {
        let b = m & m.wrapping_neg();
        m &= m - 1;
        let w = if first_to_move {
            first_wins(kind, masks, all, one | b, two, memo)
        } else {
            first_wins(kind, masks, all, one, two | b, memo)
        };
        if w == first_to_move {
            result = w;
            break;
        }
    }
    memo.insert((one, two), result);
    result
}

pub fn solve_poscnf_game(f: &PositiveFormula) -> Result<FormulaPlayer> {
    if f.kind() != FormulaKind::Cnf {
        return Err(Error::InvalidFormula("expected a CNF formula".into()));
    }
    solve_formula_game(f)
}

pub fn solve_posdnf_game(f: &PositiveFormula) -> Result<FormulaPlayer> {
    if f.kind() != FormulaKind::Dnf {
        return Err(Error::InvalidFormula("expected a DNF formula".into()));
    }
    solve_formula_game(f)
}
