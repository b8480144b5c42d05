use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::polya::{count_table, legal_strata};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{contains_mono, orbit_size, Color, Graph, Position};

/// Two-sided 0.99 normal quantile.
pub const Z_99: f64 = 2.576;

/// Uniform over labeled colorings of `K_n` with exactly `r` red and `g`
/// green edges: a random `r`-subset is red, then a random `g`-subset of the
/// rest is green.
pub fn sample_coloring<R: Rng + ?Sized>(board: &Arc<Graph>, r: usize, g: usize, rng: &mut R) -> Result<Position> {
    let e = board.edge_count();
    if r + g > e {
        return Err(Error::InvalidPosition(format!("{r} + {g} colored edges on a board with {e}")));
    }
    let picked = index::sample(rng, e, r + g).into_vec();
    Position::with_colors(board.clone(), &picked[..r], &picked[r..])
}

/// 1 if neither color contains `K_k`, else 0.
pub fn mono_free(p: &Position, k: usize) -> u8 {
    let kk = Graph::complete(k);
    u8::from(!contains_mono(p, Color::Red, &kk) && !contains_mono(p, Color::Green, &kk))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    L1,
    L2,
}

/// Sample sizes of the second estimator per stratum `t = r + g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Schedule {
    /// 100 below `t = 40`, then rising linearly to 50,000 at the full board.
    Default,
    Constant(usize),
}

impl Schedule {
    pub fn samples(self, t: usize, edges: usize) -> usize {
        match self {
            Schedule::Constant(m) => m,
            Schedule::Default => {
                if t < 40 || edges <= 40 {
                    100
                } else {
                    100 + (49_900 * (t - 40)).div_ceil(edges - 40)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumReport {
    pub r: usize,
    pub g: usize,
    pub samples: usize,
    /// Samples with no monochromatic `K_k`.
    pub hits: usize,
    pub mean: f64,
    /// Estimated variance of `mean`.
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub method: Method,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: usize,
    pub strata: Vec<StratumReport>,
}

impl EstimateReport {
    fn from_strata(method: Method, n: usize, k: usize, seed: u64, strata: Vec<StratumReport>) -> Self {
        let estimate: f64 = strata.iter().map(|s| s.mean).sum();
        let sd = strata.iter().map(|s| s.variance).sum::<f64>().sqrt();
        EstimateReport {
            method,
            n,
            k,
            seed,
            estimate,
            ci_low: (estimate - Z_99 * sd).max(0.0),
            ci_high: estimate + Z_99 * sd,
            samples: strata.iter().map(|s| s.samples).sum(),
            strata,
        }
    }

    pub fn covers(&self, x: f64) -> bool {
        self.ci_low <= x && x <= self.ci_high
    }
}

fn big_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

fn labeled_count(edges: usize, r: usize, g: usize) -> BigUint {
    binomial(edges, r) * binomial(edges - r, g)
}

fn binomial(n: usize, k: usize) -> BigUint {
    (0..k).fold(BigUint::from(1u8), |acc, i| acc * BigUint::from(n - i) / BigUint::from(i + 1))
}

/// The stream for stratum `t`, independent of scheduling order.
fn stratum_rng(seed: u64, t: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t as u64);
    rng
}

fn mean_and_variance(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, ss / (m - 1.0) / m)
}

/// Sum over legal strata of the mean of `labeled / orbit_size * T` over `m`
/// uniform samples each.
pub fn estimate_l1(n: usize, k: usize, m: usize, seed: u64, exec: Execution) -> Result<EstimateReport> {
    if n < 2 || m == 0 {
        return Err(Error::InvalidPosition("estimation needs n >= 2 and at least one sample".into()));
    }
    let board = Arc::new(Graph::complete(n));
    let edges = board.edge_count();
    let strata: Vec<(usize, usize, usize)> = legal_strata(edges).enumerate().map(|(t, (r, g))| (t, r, g)).collect();
    let results = exec.map(strata, |(t, r, g)| -> Result<StratumReport> {
        let mut rng = stratum_rng(seed, t);
        let labeled = labeled_count(edges, r, g);
        let mut values = Vec::with_capacity(m);
        let mut hits = 0;
        for _ in 0..m {
            let p = sample_coloring(&board, r, g, &mut rng)?;
            if mono_free(&p, k) == 1 {
                hits += 1;
                let orbit = orbit_size(&p).map_err(|_| Error::OrbitTimeout)?;
                values.push(big_f64(&labeled) / big_f64(&orbit));
            } else {
                values.push(0.0);
            }
        }
        let (mean, variance) = mean_and_variance(&values);
        Ok(StratumReport { r, g, samples: m, hits, mean, variance })
    });
    let strata = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(EstimateReport::from_strata(Method::L1, n, k, seed, strata))
}

/// Sum over legal strata of the mono-free fraction of the samples times
/// the exact number of classes in the stratum.
pub fn estimate_l2(n: usize, k: usize, schedule: Schedule, seed: u64, exec: Execution) -> Result<EstimateReport> {
    if n < 2 {
        return Err(Error::InvalidPosition("estimation needs n >= 2".into()));
    }
    let table = count_table(n)?;
    let board = Arc::new(Graph::complete(n));
    let edges = board.edge_count();
    let strata: Vec<(usize, usize, usize)> = legal_strata(edges).enumerate().map(|(t, (r, g))| (t, r, g)).collect();
    let results = exec.map(strata, |(t, r, g)| -> Result<StratumReport> {
        let m = schedule.samples(t, edges).max(1);
        let mut rng = stratum_rng(seed, t);
        let mut hits = 0;
        for _ in 0..m {
            hits += mono_free(&sample_coloring(&board, r, g, &mut rng)?, k) as usize;
        }
        let classes = big_f64(table.get(r, g).expect("legal stratum"));
        let p = hits as f64 / m as f64;
        let variance = if m > 1 { p * (1.0 - p) / (m as f64 - 1.0) * classes * classes } else { 0.0 };
        Ok(StratumReport { r, g, samples: m, hits, mean: p * classes, variance })
    });
    let strata = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(EstimateReport::from_strata(Method::L2, n, k, seed, strata))
}
