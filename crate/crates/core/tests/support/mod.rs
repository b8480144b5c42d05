//! Oracles shared by the integration tests. Nothing here calls the library's
//! counting or canonical-form code.

#![allow(dead_code)]

use std::collections::HashMap;

/// One orbit of full 3-colorings (uncolored, red, green) of the edges of `K_n`.
#[derive(Debug, Clone)]
pub struct Orbit {
    /// Base-3 digits per edge in lexicographic edge order: 0 none, 1 red, 2 green.
    pub digits: Vec<u8>,
    pub red: usize,
    pub green: usize,
    pub size: u64,
}

pub fn edges(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

fn edge_perm(n: usize, vperm: &[usize]) -> Vec<usize> {
    let es = edges(n);
    let index: HashMap<(usize, usize), usize> = es.iter().enumerate().map(|(k, &e)| (e, k)).collect();
    es.iter()
        .map(|&(a, b)| {
            let (x, y) = (vperm[a], vperm[b]);
            index[&(x.min(y), x.max(y))]
        })
        .collect()
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[parent[x as usize] as usize];
        parent[x as usize] = p;
        x = p;
    }
    x
}

/// Every orbit of `S_n` on edge 3-colorings of `K_n`, by union-find over the
/// images of each coloring under a transposition and an `n`-cycle.
pub fn orbits(n: usize) -> Vec<Orbit> {
    let e = n * (n - 1) / 2;
    let total = 3usize.pow(e as u32);
    let mut parent: Vec<u32> = (0..total as u32).collect();
    let mut gens = Vec::new();
    if n >= 2 {
        let mut t: Vec<usize> = (0..n).collect();
        t.swap(0, 1);
        gens.push(edge_perm(n, &t));
        gens.push(edge_perm(n, &(0..n).map(|i| (i + 1) % n).collect::<Vec<_>>()));
    }
    let pow3: Vec<usize> = (0..e).map(|k| 3usize.pow(k as u32)).collect();
    let mut digits = vec![0u8; e];
    for code in 0..total {
        let mut c = code;
        for d in digits.iter_mut() {
            *d = (c % 3) as u8;
            c /= 3;
        }
        for g in &gens {
            let image: usize = (0..e).map(|k| digits[k] as usize * pow3[g[k]]).sum();
            let (a, b) = (find(&mut parent, code as u32), find(&mut parent, image as u32));
            if a != b {
                parent[a.max(b) as usize] = a.min(b);
            }
        }
    }
    let mut sizes: HashMap<u32, u64> = HashMap::new();
    for code in 0..total as u32 {
        *sizes.entry(find(&mut parent, code)).or_default() += 1;
    }
    let mut out: Vec<Orbit> = sizes
        .into_iter()
        .map(|(root, size)| {
            let mut c = root as usize;
            let digits: Vec<u8> = (0..e)
                .map(|_| {
                    let d = (c % 3) as u8;
                    c /= 3;
                    d
                })
                .collect();
            let red = digits.iter().filter(|&&d| d == 1).count();
            let green = digits.iter().filter(|&&d| d == 2).count();
            Orbit { digits, red, green, size }
        })
        .collect();
    out.sort_by(|a, b| a.digits.cmp(&b.digits));
    out
}

/// Whether some `k`-set of vertices spans only edges of digit `color`.
pub fn has_mono_clique(n: usize, digits: &[u8], color: u8, k: usize) -> bool {
    let index: HashMap<(usize, usize), usize> = edges(n).into_iter().enumerate().map(|(i, e)| (e, i)).collect();
    fn rec(n: usize, k: usize, start: usize, chosen: &mut Vec<usize>, ok: &dyn Fn(usize, usize) -> bool) -> bool {
        if chosen.len() == k {
            return true;
        }
        for v in start..n {
            if chosen.iter().all(|&u| ok(u, v)) {
                chosen.push(v);
                if rec(n, k, v + 1, chosen, ok) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let ok = |u: usize, v: usize| digits[index[&(u.min(v), u.max(v))]] == color;
    rec(n, k, 0, &mut Vec::new(), &ok)
}

/// Orbits of mono-`K_k`-free colorings with `r = g` or `r = g + 1`.
pub fn legal_mono_free_classes(n: usize, k: usize) -> u64 {
    orbits(n)
        .iter()
        .filter(|o| o.red == o.green || o.red == o.green + 1)
        .filter(|o| !has_mono_clique(n, &o.digits, 1, k) && !has_mono_clique(n, &o.digits, 2, k))
        .count() as u64
}

fn binom(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Expected value of the hit-fraction estimator: per legal stratum, the
/// labeled mono-free fraction times the number of classes.
pub fn l2_expectation(n: usize, k: usize) -> f64 {
    let e = (n * (n - 1) / 2) as u64;
    let mut classes: HashMap<(usize, usize), u64> = HashMap::new();
    let mut labeled_free: HashMap<(usize, usize), u64> = HashMap::new();
    for o in orbits(n) {
        *classes.entry((o.red, o.green)).or_default() += 1;
        if !has_mono_clique(n, &o.digits, 1, k) && !has_mono_clique(n, &o.digits, 2, k) {
            *labeled_free.entry((o.red, o.green)).or_default() += o.size;
        }
    }
    (0..=e as usize)
        .map(|t| (t.div_ceil(2), t / 2))
        .map(|(r, g)| {
            let labeled = binom(e, r as u64) * binom(e - r as u64, g as u64);
            let free = labeled_free.get(&(r, g)).copied().unwrap_or(0) as f64;
            free / labeled * classes[&(r, g)] as f64
        })
        .sum()
}
