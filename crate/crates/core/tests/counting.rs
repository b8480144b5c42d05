mod support;

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ramsey_core::counting::*;
use ramsey_core::exec::Execution;
use ramsey_core::game::{GameSpec, Variant};
use ramsey_core::graph::{orbit_size, Cell, Color, Graph, Position, TargetGraph};

fn binom(n: u64, k: u64) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn partition_counts_match_sorted_compositions() {
    // Oracle: every composition of n as a bit pattern of cut points, sorted.
    fn distinct_sorted_compositions(n: usize) -> usize {
        let mut seen = BTreeSet::new();
        for cuts in 0u32..1 << (n - 1) {
            let mut parts = Vec::new();
            let mut len = 1;
            for i in 0..n - 1 {
                if cuts >> i & 1 == 1 {
                    parts.push(len);
                    len = 1;
                } else {
                    len += 1;
                }
            }
            parts.push(len);
            parts.sort_unstable();
            seen.insert(parts);
        }
        seen.len()
    }
    assert_eq!(partitions(1).len(), 1);
    for n in [5usize, 10, 18] {
        assert_eq!(partitions(n).len(), distinct_sorted_compositions(n), "n={n}");
    }
    assert_eq!(partitions(5).len(), 7);
    assert_eq!(partitions(18).len(), 385);
    for p in partitions(12) {
        assert_eq!(p.n(), 12);
    }
    let distinct: BTreeSet<Vec<usize>> = partitions(12).iter().map(|p| p.multiplicities().to_vec()).collect();
    assert_eq!(distinct.len(), partitions(12).len());
}

#[test]
fn cycle_index_normalization_and_weight() {
    for n in 1..=12 {
        let z = cycle_index_pair_group(n).unwrap();
        let sum: BigRational = z.iter().map(|m| m.evaluate(|_| BigRational::one())).sum();
        assert_eq!(sum, BigRational::one(), "n={n}");
        for m in &z {
            assert_eq!(m.weight(), (n * (n - 1) / 2) as u64);
        }
    }
}

/// Orbits of `colors`-colorings of the edges of `K_n` by brute force.
fn brute_orbits(n: usize, colors: usize) -> usize {
    let es = support::edges(n);
    let e = es.len();
    let perms = permutations(n);
    let mut reps = BTreeSet::new();
    for code in 0..colors.pow(e as u32) {
        let digits: Vec<usize> = (0..e).map(|k| code / colors.pow(k as u32) % colors).collect();
        let best = perms
            .iter()
            .map(|p| {
                let mut img = vec![0; e];
                for (k, &(a, b)) in es.iter().enumerate() {
                    let (x, y) = (p[a].min(p[b]), p[a].max(p[b]));
                    img[es.iter().position(|&q| q == (x, y)).unwrap()] = digits[k];
                }
                img
            })
            .min()
            .unwrap();
        reps.insert(best);
    }
    reps.len()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn cycle_index_substitutions_count_orbits() {
    for (n, colors) in [(3, 2), (3, 3), (4, 2), (4, 3)] {
        let z = cycle_index_pair_group(n).unwrap();
        let v: BigRational = z.iter().map(|m| m.evaluate(|_| BigRational::from_integer(colors.into()))).sum();
        assert_eq!(v, BigRational::from_integer(brute_orbits(n, colors).into()), "n={n} colors={colors}");
    }
    let z3 = cycle_index_pair_group(3).unwrap();
    let at = |c: i64| z3.iter().map(|m| m.evaluate(|_| BigRational::from_integer(c.into()))).sum::<BigRational>();
    assert_eq!(at(2), BigRational::from_integer(4.into()));
    assert_eq!(at(3), BigRational::from_integer(10.into()));
}

#[test]
fn small_counts() {
    assert_eq!(count_colorings(3, 1, 1).unwrap(), BigUint::from(1u8));
    assert_eq!(total_legal_positions(2).unwrap(), BigUint::from(2u8));
    assert!(total_legal_positions(6).unwrap() >= BigUint::from(3728u32));
    assert!(count_colorings(3, 2, 2).is_err());
    assert_eq!(count_colorings(1, 0, 0).unwrap(), BigUint::from(1u8));
    assert!(count_colorings(0, 0, 0).is_err());
}

#[test]
fn counts_are_symmetric_in_red_and_green() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let n = rng.gen_range(2..=12);
        let e = n * (n - 1) / 2;
        let r = rng.gen_range(0..=e);
        let g = rng.gen_range(0..=e - r);
        assert_eq!(count_colorings(n, r, g).unwrap(), count_colorings(n, g, r).unwrap());
    }
}

#[test]
fn polya_matches_orbit_enumeration() {
    for n in 1..=6 {
        let mut by_stratum: HashMap<(usize, usize), u64> = HashMap::new();
        for o in support::orbits(n) {
            *by_stratum.entry((o.red, o.green)).or_default() += 1;
        }
        let e = n * (n - 1) / 2;
        for r in 0..=e {
            for g in 0..=e - r {
                let want = by_stratum.get(&(r, g)).copied().unwrap_or(0);
                assert_eq!(count_colorings(n, r, g).unwrap(), BigUint::from(want), "n={n} r={r} g={g}");
            }
        }
    }
}

#[test]
fn orbit_sizes_sum_to_labeled_counts() {
    for n in 2..=6 {
        let board = Arc::new(Graph::complete(n));
        let e = board.edge_count() as u64;
        let mut sums: HashMap<(usize, usize), BigUint> = HashMap::new();
        for o in support::orbits(n) {
            let cells = o.digits.iter().map(|&d| [Cell::Uncolored, Cell::Red, Cell::Green][d as usize]).collect();
            let p = Position::from_cells(board.clone(), cells).unwrap();
            let size = orbit_size(&p).unwrap();
            assert_eq!(size, BigUint::from(o.size));
            *sums.entry((o.red, o.green)).or_default() += size;
        }
        for ((r, g), s) in sums {
            assert_eq!(s, binom(e, r as u64) * binom(e - r as u64, g as u64), "n={n} r={r} g={g}");
        }
    }
}

#[test]
fn known_counts_for_k18() {
    assert_eq!(
        total_legal_positions(18).unwrap().to_string(),
        "122817954504260150325481627994395745196940238595512818831"
    );
    assert_eq!(count_colorings(18, 77, 76).unwrap().to_string(), "114722035311851620271616102401");
}

#[test]
fn samples_have_exact_counts_and_uniform_marginals() {
    let board = Arc::new(Graph::complete(6));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let empty = sample_coloring(&board, 0, 0, &mut rng).unwrap();
    assert_eq!(empty, Position::empty(board.clone()));
    assert!(sample_coloring(&board, 10, 6, &mut rng).is_err());
    let draws = 100_000;
    let (r, g) = (3, 2);
    let mut red = [0u64; 15];
    let mut green = [0u64; 15];
    for _ in 0..draws {
        let p = sample_coloring(&board, r, g, &mut rng).unwrap();
        assert_eq!((p.red_count(), p.green_count()), (r, g));
        for e in p.edges_of(Cell::Red) {
            red[e] += 1;
        }
        for e in p.edges_of(Cell::Green) {
            green[e] += 1;
        }
    }
    // 14 degrees of freedom; 36.12 is the 0.999 quantile.
    for (counts, k) in [(red, r), (green, g)] {
        let expect = draws as f64 * k as f64 / 15.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
        assert!(chi2 < 36.12, "chi2 = {chi2}");
    }
}

#[test]
fn mono_free_agrees_with_brute_force_on_k18() {
    let board = Arc::new(Graph::complete(18));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    assert_eq!(mono_free(&Position::empty(board.clone()), 4), 1);
    let k4: Vec<usize> = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
        .iter()
        .map(|&(a, b)| board.edge_index(a, b).unwrap())
        .collect();
    assert_eq!(mono_free(&Position::with_colors(board.clone(), &k4, &[]).unwrap(), 4), 0);
    let mut zeros = 0;
    for i in 0..10_000usize {
        let t = 40 + i % 80;
        let p = sample_coloring(&board, t.div_ceil(2), t / 2, &mut rng).unwrap();
        let digits: Vec<u8> = p.cells().iter().map(|c| c.digit()).collect();
        let want = !support::has_mono_clique(18, &digits, 1, 4) && !support::has_mono_clique(18, &digits, 2, 4);
        assert_eq!(mono_free(&p, 4) == 1, want);
        zeros += usize::from(!want);
    }
    assert!(zeros > 0 && zeros < 10_000);
}

#[test]
fn estimators_are_exact_when_no_clique_fits() {
    let total = total_legal_positions(5).unwrap().to_string().parse::<f64>().unwrap();
    let l2 = estimate_l2(5, 6, Schedule::Constant(20), 1, Execution::default()).unwrap();
    assert!((l2.estimate - total).abs() <= 1e-9 * total);
    assert_eq!(l2.ci_low, l2.ci_high);
    let narrow = estimate_l1(5, 6, 800, 1, Execution::default()).unwrap();
    let wide = estimate_l1(5, 6, 50, 1, Execution::default()).unwrap();
    assert!(narrow.ci_high - narrow.ci_low < wide.ci_high - wide.ci_low);
    assert!(narrow.covers(total));
}

#[test]
fn estimates_do_not_depend_on_execution_mode() {
    let a = estimate_l1(6, 3, 30, 9, Execution::Sequential).unwrap();
    let b = estimate_l1(6, 3, 30, 9, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    let a = estimate_l2(6, 3, Schedule::Constant(30), 9, Execution::Sequential).unwrap();
    let b = estimate_l2(6, 3, Schedule::Constant(30), 9, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    assert!(a.ci_low <= a.estimate && a.estimate <= a.ci_high);
}

#[test]
fn estimator_means_are_within_one_percent() {
    let exact = support::legal_mono_free_classes(6, 3) as f64;
    let runs = 1000;
    let mean = |f: &dyn Fn(u64) -> f64| (0..runs).map(f).sum::<f64>() / runs as f64;
    let l1 = mean(&|s| estimate_l1(6, 3, 50, s, Execution::default()).unwrap().estimate);
    assert!((l1 - exact).abs() <= 0.01 * exact, "L1 mean {l1} vs {exact}");
    // L2 weights each class by its labeled frequency, so it converges to
    // its own expectation rather than the class count.
    let expect = support::l2_expectation(6, 3);
    let l2 = mean(&|s| estimate_l2(6, 3, Schedule::Constant(50), s, Execution::default()).unwrap().estimate);
    assert!((l2 - expect).abs() <= 0.01 * expect, "L2 mean {l2} vs {expect}");
}

#[test]
fn schedule_shape() {
    assert_eq!(Schedule::Default.samples(0, 153), 100);
    assert_eq!(Schedule::Default.samples(39, 153), 100);
    assert_eq!(Schedule::Default.samples(153, 153), 50_000);
    assert!(Schedule::Default.samples(100, 153) > 100);
    assert_eq!(Schedule::Default.samples(15, 15), 100);
}

fn all_k4_free(p: &Position) -> bool {
    let n = p.board().vertex_count();
    let digits: Vec<u8> = p.cells().iter().map(|c| c.digit()).collect();
    !support::has_mono_clique(n, &digits, 1, 4) && !support::has_mono_clique(n, &digits, 2, 4)
}

#[test]
fn bundled_witness_is_a_ramsey_coloring() {
    let w = bundled_k17_witness();
    assert!(all_k4_free(&w));
    let report = verify_witness(&w, 4).unwrap();
    assert!(report.passes());
    assert_eq!(report.regular, Some((8, 8)));
    assert_eq!((report.red_edges, report.green_edges), (68, 68));
    assert_eq!(parse_witness(&write_witness(&w)).unwrap(), w);
}

#[test]
fn witness_failures_and_fig2() {
    let k5 = Arc::new(Graph::complete(5));
    let all: Vec<usize> = (0..10).collect();
    let red = Position::with_colors(k5.clone(), &all, &[]).unwrap();
    assert!(!verify_witness(&red, 4).unwrap().passes());
    let pentagon: Vec<usize> =
        [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)].iter().map(|&(a, b)| k5.edge_index(a, b).unwrap()).collect();
    let rest: Vec<usize> = all.iter().copied().filter(|e| !pentagon.contains(e)).collect();
    let fig2 = Position::with_colors(k5.clone(), &pentagon, &rest).unwrap();
    let report = verify_witness(&fig2, 3).unwrap();
    assert!(report.passes());
    assert_eq!(report.regular, Some((2, 2)));
    assert!(verify_witness(&Position::empty(k5), 3).is_err());
    assert!(parse_witness("3\n0 1 r\n0 1 g\n").is_err());
    assert!(parse_witness("3\n0 3 r\n").is_err());
}

#[test]
fn duplicating_a_witness_vertex() {
    let w = bundled_k17_witness();
    let d = extend_by_duplicate(&w, 0).unwrap();
    assert_eq!(d.board().vertex_count(), 18);
    assert_eq!((d.red_count(), d.green_count()), (76, 76));
    assert_eq!(d.uncolored_edges(), vec![d.board().edge_index(0, 17).unwrap()]);
    assert!(all_k4_free(&d));
    assert_eq!(mono_free(&d, 4), 1);

    let k3 = Arc::new(Graph::complete(3));
    let red = Position::with_colors(k3, &[0, 1, 2], &[]).unwrap();
    let d = extend_by_duplicate(&red, 1).unwrap();
    assert_eq!((d.red_count(), d.green_count()), (5, 0));
    assert_eq!(d.uncolored_edges(), vec![d.board().edge_index(1, 3).unwrap()]);

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let n = rng.gen_range(2..9);
        let board = Arc::new(Graph::complete(n));
        let e = board.edge_count();
        let r = rng.gen_range(0..=e);
        let p = sample_coloring(&board, r, e - r, &mut rng).unwrap();
        let v = rng.gen_range(0..n);
        let deg = |c: Cell| (0..n).filter(|&x| x != v && p.cell_at(x, v) == Some(c)).count();
        let d = extend_by_duplicate(&p, v).unwrap();
        assert_eq!(d.red_count(), p.red_count() + deg(Cell::Red));
        assert_eq!(d.green_count(), p.green_count() + deg(Cell::Green));
    }
}

#[test]
fn arrowing_thresholds() {
    assert_eq!(arrowing_threshold_c(&GameSpec::sim()).unwrap(), Some(15));
    assert_eq!(arrowing_threshold_c(&GameSpec::complete(Variant::Avoid, 5, 3).unwrap()).unwrap(), None);
    let k4 = Arc::new(Graph::complete(4));
    let tri: Vec<usize> = [(0, 1), (0, 2), (1, 2)].iter().map(|&(a, b)| k4.edge_index(a, b).unwrap()).collect();
    let t = TargetGraph::clique(3).unwrap();
    let spec = GameSpec::new(Variant::Avoid, k4, t.clone(), t, tri, vec![]).unwrap();
    assert_eq!(arrowing_threshold_c(&spec).unwrap(), Some(0));
    let big = GameSpec::complete(Variant::Avoid, 8, 3).unwrap();
    assert!(arrowing_threshold_c(&big).is_err());
    let _ = Color::Red;
}

