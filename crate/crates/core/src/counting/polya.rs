use std::collections::HashMap;
use std::ops::AddAssign;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use ruint::aliases::U256;

use crate::error::{Error, Result};
use crate::graph::factorial;

/// A cycle type of `S_n`: `multiplicities()[i - 1]` cycles of length `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    m: Vec<usize>,
}

impl Partition {
    pub fn multiplicities(&self) -> &[usize] {
        &self.m
    }

    pub fn n(&self) -> usize {
        self.m.iter().enumerate().map(|(i, &c)| (i + 1) * c).sum()
    }

    /// `prod k^{m_k} m_k!`, the centralizer order of the cycle type.
    pub fn centralizer_order(&self) -> BigUint {
        self.m
            .iter()
            .enumerate()
            .fold(BigUint::one(), |acc, (i, &c)| acc * BigUint::from(i + 1).pow(c as u32) * factorial(c))
    }
}

/// All partitions of `n`, largest parts first, in decreasing lexicographic
/// order of the part lists.
pub fn partitions(n: usize) -> Vec<Partition> {
    fn rec(left: usize, max: usize, m: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if left == 0 {
            out.push(Partition { m: m.clone() });
            return;
        }
        for part in (1..=max.min(left)).rev() {
            m[part - 1] += 1;
            rec(left - part, part, m, out);
            m[part - 1] -= 1;
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, n, &mut vec![0; n], &mut out);
    }
    out
}

/// One term of the cycle index of `S_n` acting on the pairs of `[n]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleIndexMonomial {
    pub coefficient: BigRational,
    /// `exponents[i - 1]` is the power of `p_i`.
    pub exponents: Vec<u64>,
}

impl CycleIndexMonomial {
    /// `sum i * e_i`, which equals the number of pairs.
    pub fn weight(&self) -> u64 {
        self.exponents.iter().enumerate().map(|(i, &e)| (i as u64 + 1) * e).sum()
    }

    pub fn evaluate(&self, p: impl Fn(usize) -> BigRational) -> BigRational {
        let mut acc = self.coefficient.clone();
        for (i, &e) in self.exponents.iter().enumerate() {
            if e > 0 {
                acc *= num_traits::pow(p(i + 1), e as usize);
            }
        }
        acc
    }
}

fn pair_cycle_exponents(part: &Partition) -> Vec<u64> {
    let m = part.multiplicities();
    let mut e: HashMap<usize, u64> = HashMap::new();
    let mut add = |len: usize, count: u64| {
        if count > 0 {
            *e.entry(len).or_default() += count;
        }
    };
    for (idx, &mk) in m.iter().enumerate() {
        let k = idx + 1;
        let mk = mk as u64;
        if mk == 0 {
            continue;
        }
        // Pairs inside one cycle.
        if k % 2 == 1 {
            add(k, (k as u64 - 1) / 2 * mk);
        } else {
            add(k / 2, mk);
            add(k, (k as u64 / 2 - 1) * mk);
        }
        // Pairs across two cycles of the same length.
        add(k, k as u64 * mk * (mk - 1) / 2);
        for (jdx, &mj) in m.iter().enumerate().skip(idx + 1) {
            let j = jdx + 1;
            add(k.lcm(&j), k.gcd(&j) as u64 * mk * mj as u64);
        }
    }
    let mut out = vec![0; e.keys().copied().max().unwrap_or(1)];
    for (len, c) in e {
        out[len - 1] = c;
    }
    out
}

/// The cycle index of the pair group, one monomial per partition of `n`.
pub fn cycle_index_pair_group(n: usize) -> Result<Vec<CycleIndexMonomial>> {
    if n == 0 {
        return Err(Error::InvalidGraph("the pair group needs n >= 1".into()));
    }
    Ok(partitions(n)
        .into_iter()
        .map(|p| CycleIndexMonomial {
            coefficient: BigRational::new(1.into(), p.centralizer_order().into()),
            exponents: pair_cycle_exponents(&p),
        })
        .collect())
}

/// Coefficients of the cycle index after `p_i -> 1 + x^i + y^i`: the
/// number of colorings of `K_n` with `r` red and `g` green edges up to
/// isomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    n: usize,
    edges: usize,
    cells: Vec<BigUint>,
}

impl CountTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn get(&self, r: usize, g: usize) -> Option<&BigUint> {
        (r + g <= self.edges).then(|| &self.cells[r * (self.edges + 1) + g])
    }

    /// Sum over `r = g` or `r = g + 1`.
    pub fn legal_total(&self) -> BigUint {
        legal_strata(self.edges).map(|(r, g)| self.get(r, g).expect("in range")).sum()
    }
}

/// The `(r, g)` pairs a game can reach: `r = g` or `r = g + 1`.
pub fn legal_strata(edges: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=edges).map(|t| (t.div_ceil(2), t / 2))
}

/// Counts colorings of the pair cycles of one permutation: cell `(r, g)`
/// is the number of ways to paint whole cycles red, green or not at all
/// so that `r` pairs are red and `g` green.
fn cycle_colorings<T>(exponents: &[u64], edges: usize, zero: T, one: T) -> Vec<T>
where
    T: Clone + for<'a> AddAssign<&'a T>,
{
    let w = edges + 1;
    let mut cells = vec![zero; w * w];
    cells[0] = one;
    let mut reach = 0;
    for (idx, &e) in exponents.iter().enumerate() {
        let len = idx + 1;
        for _ in 0..e {
            reach = (reach + len).min(edges);
            for r in (0..=reach).rev() {
                for g in (0..=(reach - r)).rev() {
                    if r >= len {
                        let add = cells[(r - len) * w + g].clone();
                        cells[r * w + g] += &add;
                    }
                    if g >= len {
                        let add = cells[r * w + g - len].clone();
                        cells[r * w + g] += &add;
                    }
                }
            }
        }
    }
    cells
}

fn u256_to_big(x: &U256) -> BigUint {
    BigUint::from_bytes_le(&x.to_le_bytes::<32>())
}

fn compute_table(n: usize) -> Result<CountTable> {
    let edges = n * (n - 1) / 2;
    let w = edges + 1;
    let mut acc = vec![BigUint::zero(); w * w];
    let n_fact = factorial(n);
    // 3^edges bounds every cell, so 256 bits suffice up to 161 pairs.
    let narrow = edges <= 161;
    for part in partitions(n) {
        let class = &n_fact / part.centralizer_order();
        let exps = pair_cycle_exponents(&part);
        let mut fold = |cells: Vec<BigUint>| {
            for (a, c) in acc.iter_mut().zip(cells) {
                if !c.is_zero() {
                    *a += &class * c;
                }
            }
        };
        if narrow {
            let cells = cycle_colorings(&exps, edges, U256::ZERO, U256::from(1u8));
            fold(cells.iter().map(u256_to_big).collect());
        } else {
            fold(cycle_colorings(&exps, edges, BigUint::zero(), BigUint::one()));
        }
    }
    let mut cells = Vec::with_capacity(acc.len());
    for a in acc {
        let (q, rem) = a.div_rem(&n_fact);
        if !rem.is_zero() {
            return Err(Error::Invariant(format!("orbit count for n={n} is not an integer")));
        }
        cells.push(q);
    }
    Ok(CountTable { n, edges, cells })
}

/// The full `(r, g)` table for `K_n`, computed once per process.
pub fn count_table(n: usize) -> Result<Arc<CountTable>> {
    if n == 0 {
        return Err(Error::InvalidGraph("counting needs n >= 1".into()));
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<CountTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().expect("cache lock").get(&n) {
        return Ok(t.clone());
    }
    let table = Arc::new(compute_table(n)?);
    cache.lock().expect("cache lock").insert(n, table.clone());
    Ok(table)
}

/// Non-isomorphic colorings of `K_n` with exactly `r` red and `g` green edges.
pub fn count_colorings(n: usize, r: usize, g: usize) -> Result<BigUint> {
    let table = count_table(n)?;
    table
        .get(r, g)
        .cloned()
        .ok_or_else(|| Error::InvalidPosition(format!("{r} + {g} edges exceed the {} of K_{n}", table.edge_count())))
}

/// Non-isomorphic positions with as many red edges as green, or one more.
pub fn total_legal_positions(n: usize) -> Result<BigUint> {
    Ok(count_table(n)?.legal_total())
}
