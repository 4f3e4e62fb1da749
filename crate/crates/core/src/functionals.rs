//! Deterministic tree functionals: vertical and horizontal total path
//! length, the Wiener index by two independent routes, the structural
//! comparison cost, and harmonic numbers (exact and floating point).

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::harris::HarrisTree;
use crate::rng::Stream;
use crate::words::Word;

/// Exact rational with 128-bit components; enough for every enumeration and
/// closed form in this crate.
pub type Rat = Ratio<i128>;

/// One sampled tree, reduced to its functional values.
/// `comparisons` is the structural build cost and always equals `tpl + hpl`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionalRecord {
    pub n: u64,
    pub tpl: u64,
    pub hpl: u64,
    pub wiener: u64,
    pub comparisons: u64,
}

impl FunctionalRecord {
    pub fn of_tree(x: &HarrisTree) -> Self {
        let tpl = tpl(x);
        let hpl = hpl(x);
        FunctionalRecord {
            n: x.len(),
            tpl,
            hpl,
            wiener: wiener_subtree(x),
            comparisons: tpl + hpl,
        }
    }

    pub fn csv_header() -> &'static str {
        "n,tpl,hpl,wiener,comparisons"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.n, self.tpl, self.hpl, self.wiener, self.comparisons
        )
    }
}

/// Total (vertical) path length: sum of node depths.
pub fn tpl(x: &HarrisTree) -> u64 {
    x.words().map(|u| u.depth() as u64).sum()
}

/// Horizontal total path length: sum of `weight - depth` over nodes.
pub fn hpl(x: &HarrisTree) -> u64 {
    x.words().map(Word::horizontal).sum()
}

/// Wiener index summed over unordered pairs via meet depths. Quadratic;
/// kept as the independent cross-check and gated to small trees.
pub fn wiener_pairwise(x: &HarrisTree) -> u64 {
    let n = x.len();
    assert!(n <= 2000, "pairwise Wiener index is gated to 2000 nodes");
    let words: Vec<&Word> = x.words().collect();
    let mut total = 0u64;
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            let meet = words[i].meet(words[j]);
            total += (words[i].depth() + words[j].depth() - 2 * meet.depth()) as u64;
        }
    }
    total
}

/// Wiener index in linear time from subtree sizes:
/// `n * TPL + n^2 - sum of squared subtree sizes`.
pub fn wiener_subtree(x: &HarrisTree) -> u64 {
    let n = x.len();
    let squares: u64 = x.words().map(|u| x.subtree_size(u).pow(2)).sum();
    n * tpl(x) + n * n - squares
}

/// Sum of squared subtree sizes, used by the conditional projections.
pub fn sum_subtree_squares(x: &HarrisTree) -> u64 {
    x.words().map(|u| x.subtree_size(u).pow(2)).sum()
}

/// H_n as an exact rational. H(0) = 0 by convention here; the closed forms
/// in this crate only ever evaluate H at arguments >= 1. Exact up to n = 64.
pub fn harmonic_exact(n: u64) -> Rat {
    assert!(n <= 64, "exact harmonic numbers are provided up to n = 64");
    let mut h = Rat::new(0.into(), 1.into());
    for k in 1..=n {
        h += Rat::new(1, k as i128);
    }
    h
}

/// H_n as a float, summed smallest term first.
pub fn harmonic(n: u64) -> f64 {
    (1..=n).rev().map(|k| 1.0 / k as f64).sum()
}

/// Sample the functional record of a uniform-attachment tree without
/// materialising words: parents are picked by index exactly as in
/// `harris::grow_chain`, so the two samplers agree path-by-path for a shared
/// stream.
pub fn sample_record(n: u64, stream: &mut Stream) -> FunctionalRecord {
    assert!(n >= 1);
    let size = n as usize;
    let mut parent = vec![0u32; size];
    let mut children = vec![0u32; size];
    let mut depth = vec![0u32; size];
    let mut horiz = vec![0u64; size];
    let mut tpl = 0u64;
    let mut hpl = 0u64;
    for v in 1..size {
        let p = stream.next_index(v as u64) as usize;
        children[p] += 1;
        parent[v] = p as u32;
        depth[v] = depth[p] + 1;
        horiz[v] = horiz[p] + (children[p] - 1) as u64;
        tpl += depth[v] as u64;
        hpl += horiz[v];
    }
    // Children are born after parents, so a reverse sweep accumulates sizes.
    let mut subtree = vec![1u64; size];
    let mut squares = 0u64;
    for v in (1..size).rev() {
        squares += subtree[v] * subtree[v];
        subtree[parent[v] as usize] += subtree[v];
    }
    squares += subtree[0] * subtree[0];
    FunctionalRecord {
        n,
        tpl,
        hpl,
        wiener: n * tpl + n * n - squares,
        comparisons: tpl + hpl,
    }
}
