//! Exact ground truth for small trees by brute force: every tree of size n
//! arises from one of the (n-1)! ancestor encodings, so pushing the uniform
//! encoding law forward yields exact functional distributions, joint tables
//! and decomposition laws with rational weights. Enumeration streams; shards
//! merge associatively, so sharded runs reproduce the sequential counts.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use thiserror::Error;

use crate::exec::{run_indexed, Parallelism};
use crate::functionals::{self, Rat};
use crate::harris::{psi, Encoding, HarrisTree};

pub const MIN_SIZE: u64 = 2;
pub const MAX_SIZE: u64 = 9;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle size {0} outside supported range {MIN_SIZE}..={MAX_SIZE}")]
    SizeOutOfRange(u64),
}

/// Functionals whose exact laws the oracle can produce. `Comparisons` is the
/// structural build cost, the sum of the two path lengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Functional {
    Tpl,
    Hpl,
    Wiener,
    Comparisons,
}

impl Functional {
    pub fn evaluate(self, x: &HarrisTree) -> u64 {
        match self {
            Functional::Tpl => functionals::tpl(x),
            Functional::Hpl => functionals::hpl(x),
            Functional::Wiener => functionals::wiener_subtree(x),
            Functional::Comparisons => functionals::tpl(x) + functionals::hpl(x),
        }
    }
}

fn check_size(n: u64) -> Result<(), OracleError> {
    if (MIN_SIZE..=MAX_SIZE).contains(&n) {
        Ok(())
    } else {
        Err(OracleError::SizeOutOfRange(n))
    }
}

pub fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// Iterator over all encodings of trees with `n` nodes, in mixed-radix
/// order. An optional fixed last coordinate supports sharded enumeration.
struct Encodings {
    digits: Vec<u32>,
    fixed_last: Option<u32>,
    done: bool,
}

impl Encodings {
    fn new(n: u64, fixed_last: Option<u32>) -> Self {
        Encodings {
            digits: vec![1; (n - 1) as usize],
            fixed_last,
            done: false,
        }
    }
}

impl Iterator for Encodings {
    type Item = Encoding;

    fn next(&mut self) -> Option<Encoding> {
        if self.done {
            return None;
        }
        let mut out = self.digits.clone();
        if let Some(last) = self.fixed_last {
            *out.last_mut().expect("nonempty encoding") = last;
        }
        // Increment, skipping the last digit when it is pinned to a shard.
        let free = self.digits.len() - usize::from(self.fixed_last.is_some());
        let mut pos = free;
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            if self.digits[pos] < (pos + 1) as u32 {
                self.digits[pos] += 1;
                for d in &mut self.digits[pos + 1..free] {
                    *d = 1;
                }
                break;
            }
        }
        Some(Encoding::new(out).expect("enumerated encoding is valid"))
    }
}

/// All `(n-1)!` encodings, exactly once each.
pub fn enumerate_encodings(n: u64) -> Result<impl Iterator<Item = Encoding>, OracleError> {
    check_size(n)?;
    Ok(Encodings::new(n, None))
}

/// Stream every encoding through `key`, counting occurrences. Shards by the
/// last ancestor choice under `Parallelism::Rayon`.
pub fn count_by<K, F>(
    n: u64,
    parallelism: Parallelism,
    key: F,
) -> Result<BTreeMap<K, u64>, OracleError>
where
    K: Ord + Send,
    F: Fn(&Encoding, &HarrisTree) -> K + Sync,
{
    check_size(n)?;
    let count_shard = |shard: Option<u32>| {
        let mut counts: BTreeMap<K, u64> = BTreeMap::new();
        for encoding in Encodings::new(n, shard) {
            let tree = psi(&encoding);
            *counts.entry(key(&encoding, &tree)).or_insert(0) += 1;
        }
        counts
    };
    let shards = (n - 1) as u32;
    let merged = match parallelism {
        Parallelism::Sequential => count_shard(None),
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => run_indexed(u64::from(shards), parallelism, |s| {
            count_shard(Some(s as u32 + 1))
        })
        .into_iter()
        .fold(BTreeMap::new(), |mut acc, part| {
            for (k, c) in part {
                *acc.entry(k).or_insert(0) += c;
            }
            acc
        }),
    };
    Ok(merged)
}

/// Exact distribution of an integer functional with rational weights on a
/// common denominator `(n-1)!`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDist {
    pub n: u64,
    support: BTreeMap<i64, Rat>,
}

impl ExactDist {
    fn from_counts(n: u64, counts: BTreeMap<i64, u64>) -> Self {
        let total = factorial(n - 1) as i128;
        let support = counts
            .into_iter()
            .map(|(v, c)| (v, Rat::new(c as i128, total)))
            .collect();
        ExactDist { n, support }
    }

    pub fn support(&self) -> &BTreeMap<i64, Rat> {
        &self.support
    }

    pub fn total_weight(&self) -> Rat {
        self.support.values().fold(Rat::zero(), |a, b| a + b)
    }

    pub fn mean(&self) -> Rat {
        self.support.iter().fold(Rat::zero(), |acc, (&v, w)| {
            acc + Rat::from_integer(v as i128) * w
        })
    }

    /// The law of `value + delta`.
    pub fn shifted(&self, delta: i64) -> ExactDist {
        ExactDist {
            n: self.n,
            support: self.support.iter().map(|(&v, w)| (v + delta, *w)).collect(),
        }
    }
}

/// Exact law of a functional of the size-n tree.
pub fn exact_dist(
    functional: Functional,
    n: u64,
    parallelism: Parallelism,
) -> Result<ExactDist, OracleError> {
    let counts = count_by(n, parallelism, |_, tree| functional.evaluate(tree) as i64)?;
    Ok(ExactDist::from_counts(n, counts))
}

/// Joint counts of (tpl, hpl) over all encodings; total is `(n-1)!`.
pub fn joint_table(
    n: u64,
    parallelism: Parallelism,
) -> Result<BTreeMap<(u64, u64), u64>, OracleError> {
    count_by(n, parallelism, |_, tree| {
        (functionals::tpl(tree), functionals::hpl(tree))
    })
}

/// Exact law of the size-n tree itself (the uniform encoding law pushed
/// through the planar embedding). Weights are counts over `(n-1)!`.
pub fn chain_law(
    n: u64,
    parallelism: Parallelism,
) -> Result<BTreeMap<HarrisTree, u64>, OracleError> {
    if n == 1 {
        return Ok(BTreeMap::from([(HarrisTree::trivial(), 1)]));
    }
    count_by(n, parallelism, |_, tree| tree.clone())
}

/// The set of all Harris trees with n nodes.
pub fn all_trees(n: u64) -> Result<BTreeSet<HarrisTree>, OracleError> {
    Ok(chain_law(n, Parallelism::Sequential)?.into_keys().collect())
}

/// Canonical class label for a tree in joint-law tables.
pub fn tree_class(x: &HarrisTree) -> String {
    x.word_strings().join(" ")
}

/// Exact joint law of `(K, flat class, raised class)` from the size split.
pub fn decomposition_law(
    n: u64,
    parallelism: Parallelism,
) -> Result<BTreeMap<(u64, String, String), u64>, OracleError> {
    check_size(n)?;
    count_by(n, parallelism, |_, tree| {
        let (k, flat, sharp) = tree.decompose().expect("n >= 2");
        (k, tree_class(&flat), tree_class(&sharp))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::harmonic_exact;
    use crate::words::Word;

    const PAR: Parallelism = Parallelism::Sequential;

    #[test]
    fn encoding_counts() {
        assert_eq!(enumerate_encodings(2).unwrap().count(), 1);
        assert_eq!(enumerate_encodings(4).unwrap().count(), 6);
        assert_eq!(enumerate_encodings(7).unwrap().count(), 720);
        assert!(enumerate_encodings(1).is_err());
        assert!(enumerate_encodings(10).is_err());
    }

    #[test]
    fn encodings_are_distinct_and_valid() {
        let all: BTreeSet<Vec<u32>> = enumerate_encodings(5)
            .unwrap()
            .map(|e| e.ancestors().to_vec())
            .collect();
        assert_eq!(all.len(), 24);
    }

    #[test]
    fn sharded_counts_match_sequential() {
        #[cfg(feature = "parallel")]
        {
            let seq = joint_table(6, Parallelism::Sequential).unwrap();
            let par = joint_table(6, Parallelism::Rayon).unwrap();
            assert_eq!(seq, par);
        }
    }

    #[test]
    fn tpl_law_small_cases() {
        let d2 = exact_dist(Functional::Tpl, 2, PAR).unwrap();
        assert_eq!(d2.support().len(), 1);
        assert_eq!(d2.support()[&1], Rat::new(1, 1));

        let d3 = exact_dist(Functional::Tpl, 3, PAR).unwrap();
        assert_eq!(d3.support()[&2], Rat::new(1, 2));
        assert_eq!(d3.support()[&3], Rat::new(1, 2));
        assert_eq!(d3.total_weight(), Rat::new(1, 1));
    }

    #[test]
    fn exact_means_match_closed_forms_small() {
        for n in 2..=6u64 {
            let h = harmonic_exact(n);
            let nn = Rat::from_integer(n as i128);
            let tpl_mean = exact_dist(Functional::Tpl, n, PAR).unwrap().mean();
            assert_eq!(tpl_mean, nn * h - nn, "tpl mean at n = {n}");
            let hpl_mean = exact_dist(Functional::Hpl, n, PAR).unwrap().mean();
            assert_eq!(
                hpl_mean,
                nn * h - Rat::from_integer(2) * nn + Rat::from_integer(1),
                "hpl mean at n = {n}"
            );
            let wi_mean = exact_dist(Functional::Wiener, n, PAR).unwrap().mean();
            assert_eq!(
                wi_mean,
                nn * (nn + Rat::from_integer(1)) * h - Rat::from_integer(2) * nn * nn,
                "wiener mean at n = {n}"
            );
        }
    }

    #[test]
    fn tpl_shifted_equals_hpl_law() {
        for n in 2..=8u64 {
            let tpl = exact_dist(Functional::Tpl, n, PAR).unwrap();
            let hpl = exact_dist(Functional::Hpl, n, PAR).unwrap();
            assert_eq!(
                tpl.shifted(-((n - 1) as i64)),
                hpl,
                "shift identity at n = {n}"
            );
        }
    }

    #[test]
    fn joint_table_small() {
        let t2 = joint_table(2, PAR).unwrap();
        assert_eq!(t2, BTreeMap::from([((1, 0), 1)]));
        let t7 = joint_table(7, PAR).unwrap();
        assert_eq!(t7.values().sum::<u64>(), 720);
    }

    #[test]
    fn chain_law_four_nodes() {
        let law = chain_law(4, PAR).unwrap();
        assert_eq!(law.len(), 5);
        assert_eq!(law.values().sum::<u64>(), 6);
        let doubled = HarrisTree::from_words([
            Word::root(),
            Word::from_slice(&[1]),
            Word::from_slice(&[2]),
            Word::from_slice(&[1, 1]),
        ])
        .unwrap();
        assert_eq!(law[&doubled], 2);
        let mut weights: Vec<u64> = law.values().copied().collect();
        weights.sort_unstable();
        assert_eq!(weights, vec![1, 1, 1, 1, 2]);
    }

    #[test]
    fn chain_law_is_dual_invariant() {
        for n in 2..=7u64 {
            let law = chain_law(n, PAR).unwrap();
            let pushed: BTreeMap<HarrisTree, u64> =
                law.iter().map(|(x, &c)| (x.dual(), c)).collect();
            assert_eq!(law, pushed, "dual invariance at n = {n}");
        }
    }

    #[test]
    fn pushforward_image_is_all_trees() {
        // Surjectivity: the encoding image equals the successor closure.
        for n in 2..=7u64 {
            let image = all_trees(n).unwrap();
            let mut closure = BTreeSet::from([HarrisTree::trivial()]);
            for _ in 1..n {
                closure = closure.iter().flat_map(|t| t.successors()).collect();
            }
            assert_eq!(image, closure, "image at n = {n}");
        }
    }

    #[test]
    fn decomposition_k_uniform() {
        let law = decomposition_law(4, PAR).unwrap();
        let mut k_margin: BTreeMap<u64, u64> = BTreeMap::new();
        for ((k, _, _), c) in &law {
            *k_margin.entry(*k).or_insert(0) += c;
        }
        assert_eq!(k_margin, BTreeMap::from([(1, 2), (2, 2), (3, 2)]));

        let law2 = decomposition_law(2, PAR).unwrap();
        assert_eq!(law2.len(), 1);
        assert!(law2.keys().all(|(k, _, _)| *k == 1));
    }

    #[test]
    fn comparisons_law_is_sum_of_path_lengths() {
        let d = exact_dist(Functional::Comparisons, 4, PAR).unwrap();
        // Exact mean of tpl + hpl at n = 4: 2nH_n - 3n + 1 = 2*4*(25/12) - 11.
        assert_eq!(d.mean(), Rat::new(50, 3) - Rat::from_integer(11));
    }
}
