//! Sequential tree construction from a stream of distinct reals in (0,1):
//! each value becomes a new node attached below the node carrying the
//! largest smaller label. The trace records, per node, the insertion time
//! `tau`, the rank `kappa` of its label among the inputs seen so far, and
//! the gap to the next larger label at insertion time — which is exactly
//! the node's eventual share of the boundary mass.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::functionals::Rat;
use crate::harris::HarrisTree;
use crate::rng::Stream;
use crate::words::Word;

#[derive(Debug, Error, PartialEq)]
pub enum RtError {
    #[error("input {value} at position {index} is outside the open interval (0,1)")]
    OutOfRange { index: usize, value: f64 },
    #[error("tied inputs at positions {first} and {second}")]
    Tie { first: usize, second: usize },
    #[error("need {needed} input values, got {got}")]
    NotEnoughInput { needed: usize, got: usize },
    #[error("node {0} was never inserted")]
    NodeNotInserted(Word),
}

/// Insertion bookkeeping for one non-root node.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NodeRecord {
    /// Insertion time: the node enters the tree of size `tau + 1`.
    pub tau: u64,
    /// Rank of the node's label among the first `tau` inputs.
    pub kappa: u64,
    pub label: f64,
    /// Next larger label present at insertion time (1 if none): the right
    /// end of the node's interval. `upper - label` is the limit mass.
    pub upper: f64,
}

#[derive(Debug, Clone)]
pub struct RtTrace {
    tree: HarrisTree,
    records: BTreeMap<Word, NodeRecord>,
    inputs: Vec<f64>,
    order_stats: Vec<f64>,
    comparisons_structural: u64,
    comparisons_search: u64,
}

impl RtTrace {
    pub fn tree(&self) -> &HarrisTree {
        &self.tree
    }

    pub fn records(&self) -> &BTreeMap<Word, NodeRecord> {
        &self.records
    }

    /// Inputs consumed so far, in arrival order.
    pub fn inputs(&self) -> &[f64] {
        &self.inputs
    }

    /// Augmented order statistic of the consumed inputs: index 0 gives 0,
    /// index `len + 1` gives 1.
    pub fn order_statistic(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else if i > self.order_stats.len() {
            1.0
        } else {
            self.order_stats[i - 1]
        }
    }

    /// Structural build cost: sum over nodes of depth plus horizontal
    /// displacement, i.e. the two path lengths of the current tree.
    pub fn comparisons_structural(&self) -> u64 {
        self.comparisons_structural
    }

    /// Probe count of the binary insertion into the sorted label array;
    /// depends on the search structure, reported for interest only.
    pub fn comparisons_search(&self) -> u64 {
        self.comparisons_search
    }

    /// Almost-sure limit of the subtree share of `word`, read off the input:
    /// the length of the interval claimed at insertion. 1 at the root.
    pub fn limit_mass(&self, word: &Word) -> Result<f64, RtError> {
        if word.is_root() {
            return Ok(1.0);
        }
        self.records
            .get(word)
            .map(|r| r.upper - r.label)
            .ok_or_else(|| RtError::NodeNotInserted(word.clone()))
    }

    /// Part of `word`'s interval not yet claimed by its children: the gap
    /// from its label to the next larger label currently present.
    pub fn current_gap(&self, word: &Word) -> Result<f64, RtError> {
        let label = if word.is_root() {
            0.0
        } else {
            self.records
                .get(word)
                .ok_or_else(|| RtError::NodeNotInserted(word.clone()))?
                .label
        };
        let next = self
            .order_stats
            .iter()
            .find(|&&v| v > label)
            .copied()
            .unwrap_or(1.0);
        Ok(next - label)
    }

    /// JSON export: word string -> {tau, kappa, label}.
    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .records
            .iter()
            .map(|(w, r)| {
                (
                    w.to_string(),
                    serde_json::json!({ "tau": r.tau, "kappa": r.kappa, "label": r.label }),
                )
            })
            .collect();
        serde_json::Value::Object(map)
    }
}

fn check_value(index: usize, value: f64) -> Result<(), RtError> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(RtError::OutOfRange { index, value })
    }
}

/// Run the construction on the first `n - 1` values of `values`.
pub fn rt_build(values: &[f64], n: u64) -> Result<RtTrace, RtError> {
    let needed = (n - 1) as usize;
    if values.len() < needed {
        return Err(RtError::NotEnoughInput {
            needed,
            got: values.len(),
        });
    }

    // label bits -> (word, arrival index); f64 bit patterns of values in
    // [0,1) order like the values themselves.
    let mut by_label: BTreeMap<u64, (Word, usize)> = BTreeMap::new();
    by_label.insert(0u64, (Word::root(), 0));
    let mut child_counts: BTreeMap<Word, u32> = BTreeMap::new();
    let mut words: Vec<Word> = vec![Word::root()];
    let mut records = BTreeMap::new();
    let mut order_stats: Vec<f64> = Vec::with_capacity(needed);
    let mut comparisons_structural = 0u64;
    let mut comparisons_search = 0u64;

    for (idx, &value) in values[..needed].iter().enumerate() {
        check_value(idx, value)?;
        let bits = value.to_bits();
        if let Some((_, first)) = by_label.get(&bits) {
            return Err(RtError::Tie {
                first: *first,
                second: idx + 1,
            });
        }
        let (parent, _) = by_label
            .range(..bits)
            .next_back()
            .map(|(_, v)| v.clone())
            .expect("the root label 0 is always below");

        let count = child_counts.entry(parent.clone()).or_insert(0);
        *count += 1;
        let word = parent.child(*count);

        // binary insertion into the sorted inputs, counting probes
        let mut lo = 0usize;
        let mut hi = order_stats.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            comparisons_search += 1;
            if order_stats[mid] < value {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        order_stats.insert(lo, value);
        let upper = order_stats.get(lo + 1).copied().unwrap_or(1.0);

        comparisons_structural += word.weight();
        records.insert(
            word.clone(),
            NodeRecord {
                tau: (idx + 1) as u64,
                kappa: (lo + 1) as u64,
                label: value,
                upper,
            },
        );
        by_label.insert(bits, (word.clone(), idx + 1));
        words.push(word);
    }

    Ok(RtTrace {
        tree: HarrisTree::from_words(words).expect("construction preserves closure"),
        records,
        inputs: values[..needed].to_vec(),
        order_stats,
        comparisons_structural,
        comparisons_search,
    })
}

/// Exact finite-tree share `#x_n(word) / n` after `n - 1` inputs.
pub fn empirical_mass(values: &[f64], word: &Word, n: u64) -> Result<Rat, RtError> {
    let trace = rt_build(values, n)?;
    let size = trace.tree().subtree_size(word);
    if size == 0 && !word.is_root() {
        return Err(RtError::NodeNotInserted(word.clone()));
    }
    Ok(Rat::new(size as i128, n as i128))
}

/// Split an input sequence at its first value: values above `t_1` rescale to
/// `(t - t_1) / (1 - t_1)` (they drive the subtree at (1)), values below to
/// `t / t_1` (they drive the rest). Orders are preserved.
pub fn split_input(values: &[f64]) -> Result<(f64, Vec<f64>, Vec<f64>), RtError> {
    for (idx, &v) in values.iter().enumerate() {
        check_value(idx, v)?;
        if let Some(first) = values[..idx].iter().position(|&w| w == v) {
            return Err(RtError::Tie {
                first: first + 1,
                second: idx + 1,
            });
        }
    }
    let Some((&eta1, rest)) = values.split_first() else {
        return Err(RtError::NotEnoughInput { needed: 1, got: 0 });
    };
    let mut flat = Vec::new();
    let mut sharp = Vec::new();
    for &v in rest {
        if v > eta1 {
            flat.push((v - eta1) / (1.0 - eta1));
        } else {
            sharp.push(v / eta1);
        }
    }
    Ok((eta1, flat, sharp))
}

/// Fresh uniform inputs from a seeded stream.
pub fn uniform_inputs(count: usize, stream: &mut Stream) -> Vec<f64> {
    (0..count).map(|_| stream.next_unit()).collect()
}
