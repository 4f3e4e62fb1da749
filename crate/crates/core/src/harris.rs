//! Finite Harris (Ulam-Harris) trees: prefix-closed, sibling-closed word sets
//! with cached subtree sizes, the encoding pushforward, the flat/raised
//! decomposition, Markov successors, and uniform-attachment growth.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rng::Stream;
use crate::words::Word;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HarrisError {
    #[error("prefix closure violated at {0} (missing parent)")]
    PrefixViolation(Word),
    #[error("sibling closure violated at {0} (missing elder sibling)")]
    SiblingViolation(Word),
    #[error("node {0} is not in the tree")]
    NodeAbsent(Word),
    #[error("tree with {0} nodes cannot be decomposed (need at least 2)")]
    TooSmallToDecompose(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct NodeMeta {
    children: u32,
    subtree: u64,
}

/// An immutable Harris tree. Values are cheap to clone relative to their
/// size and safe to share across threads; mutation always returns a new tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HarrisTree {
    nodes: BTreeMap<Word, NodeMeta>,
}

impl HarrisTree {
    /// The one-node tree {root}.
    pub fn trivial() -> Self {
        let mut nodes = BTreeMap::new();
        nodes.insert(
            Word::root(),
            NodeMeta {
                children: 0,
                subtree: 1,
            },
        );
        HarrisTree { nodes }
    }

    /// Build from a set of words, checking both closure properties. The
    /// error names the first offending node in canonical word order.
    pub fn from_words<I>(words: I) -> Result<Self, HarrisError>
    where
        I: IntoIterator<Item = Word>,
    {
        let mut nodes: BTreeMap<Word, NodeMeta> = words
            .into_iter()
            .map(|w| {
                (
                    w,
                    NodeMeta {
                        children: 0,
                        subtree: 1,
                    },
                )
            })
            .collect();
        for word in nodes.keys() {
            if let Some(parent) = word.parent() {
                if !nodes.contains_key(&parent) {
                    return Err(HarrisError::PrefixViolation(word.clone()));
                }
                let last = word.last_letter().unwrap();
                if last > 1 {
                    let mut sib = word.letters().to_vec();
                    *sib.last_mut().unwrap() = last - 1;
                    if !nodes.contains_key(&Word::new(sib).unwrap()) {
                        return Err(HarrisError::SiblingViolation(word.clone()));
                    }
                }
            }
        }
        // Children counts, then subtree sizes bottom-up. The canonical word
        // order is by length first, so a reverse scan sees children before
        // parents.
        let words: Vec<Word> = nodes.keys().cloned().collect();
        for word in words.iter().rev() {
            if let Some(parent) = word.parent() {
                let subtree = nodes[word].subtree;
                let meta = nodes.get_mut(&parent).unwrap();
                meta.children += 1;
                meta.subtree += subtree;
            }
        }
        Ok(HarrisTree { nodes })
    }

    pub fn len(&self) -> u64 {
        self.nodes.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, word: &Word) -> bool {
        self.nodes.contains_key(word)
    }

    /// Words in canonical order (length, then lexicographic).
    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.nodes.keys()
    }

    /// Number of children of `word` present in the tree; 0 if absent.
    pub fn child_count(&self, word: &Word) -> u32 {
        self.nodes.get(word).map_or(0, |m| m.children)
    }

    /// Size of the subtree rooted at `word`; 0 if absent, `len` at the root.
    pub fn subtree_size(&self, word: &Word) -> u64 {
        self.nodes.get(word).map_or(0, |m| m.subtree)
    }

    /// Child subtree sizes `(#x(u1), ..., #x(uk))` with `k` the largest
    /// occupied child index; empty if `word` has no children in the tree.
    pub fn child_sizes(&self, word: &Word) -> Vec<u32> {
        let k = self.child_count(word);
        (1..=k)
            .map(|i| self.subtree_size(&word.child(i)) as u32)
            .collect()
    }

    /// Attach a new last child below `word`, returning the grown tree.
    pub fn insert_child(&self, word: &Word) -> Result<HarrisTree, HarrisError> {
        let meta = self
            .nodes
            .get(word)
            .ok_or_else(|| HarrisError::NodeAbsent(word.clone()))?;
        let new_word = word.child(meta.children + 1);
        let mut nodes = self.nodes.clone();
        nodes.insert(
            new_word,
            NodeMeta {
                children: 0,
                subtree: 1,
            },
        );
        nodes.get_mut(word).unwrap().children += 1;
        let mut cur = word.clone();
        loop {
            nodes.get_mut(&cur).unwrap().subtree += 1;
            match cur.parent() {
                Some(p) => cur = p,
                None => break,
            }
        }
        Ok(HarrisTree { nodes })
    }

    /// All trees reachable in one growth step; exactly `len` of them.
    pub fn successors(&self) -> Vec<HarrisTree> {
        self.nodes
            .keys()
            .map(|w| self.insert_child(w).expect("member node"))
            .collect()
    }

    /// Split off the subtree rooted at (1) (re-rooted, the "flat" part) and
    /// the remainder with first letters shifted down (the "raised" part).
    /// Returns `(K, flat, raised)` where `K` is the flat part's size.
    pub fn decompose(&self) -> Result<(u64, HarrisTree, HarrisTree), HarrisError> {
        if self.len() < 2 {
            return Err(HarrisError::TooSmallToDecompose(self.len()));
        }
        let mut flat = Vec::new();
        let mut sharp = vec![Word::root()];
        for word in self.nodes.keys() {
            match word.letters().first() {
                None => {}
                Some(1) => flat.push(Word::new(word.letters()[1..].to_vec()).unwrap()),
                Some(&f) => {
                    let mut letters = word.letters().to_vec();
                    letters[0] = f - 1;
                    sharp.push(Word::new(letters).unwrap());
                }
            }
        }
        let k = flat.len() as u64;
        let flat = HarrisTree::from_words(flat).expect("flat part inherits closure");
        let sharp = HarrisTree::from_words(sharp).expect("raised part inherits closure");
        Ok((k, flat, sharp))
    }

    /// Node-wise image under the word involution [`Word::dual`]; a size-
    /// preserving bijection of Harris trees.
    pub fn dual(&self) -> HarrisTree {
        HarrisTree::from_words(self.nodes.keys().map(Word::dual))
            .expect("dual image is a Harris tree")
    }

    /// Canonical list of word strings in canonical order.
    pub fn word_strings(&self) -> Vec<String> {
        self.nodes.keys().map(Word::to_string).collect()
    }
}

impl fmt::Display for HarrisTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, w) in self.nodes.keys().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for HarrisTree {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.nodes.keys())
    }
}

impl<'de> Deserialize<'de> for HarrisTree {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let words = Vec::<Word>::deserialize(deserializer)?;
        HarrisTree::from_words(words).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Ancestor sequence `(j_1, ..., j_{n-1})` with `j_k` in `1..=k`; node `k+1`
/// of a recursive tree attaches below node `j_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Encoding(Vec<u32>);

#[derive(Debug, Error, PartialEq, Eq)]
#[error("encoding entry {value} at position {position} is outside 1..={bound}")]
pub struct EncodingError {
    pub position: usize,
    pub value: u32,
    pub bound: u32,
}

impl Encoding {
    pub fn new(ancestors: Vec<u32>) -> Result<Self, EncodingError> {
        for (idx, &j) in ancestors.iter().enumerate() {
            let bound = (idx + 1) as u32;
            if j == 0 || j > bound {
                return Err(EncodingError {
                    position: idx,
                    value: j,
                    bound,
                });
            }
        }
        Ok(Encoding(ancestors))
    }

    pub fn ancestors(&self) -> &[u32] {
        &self.0
    }

    pub fn tree_size(&self) -> u64 {
        self.0.len() as u64 + 1
    }
}

/// Pushforward of an encoding to its Harris tree: new nodes become the next
/// child of their ancestor's image, i.e. siblings are ordered by birth.
pub fn psi(encoding: &Encoding) -> HarrisTree {
    let n = encoding.tree_size() as usize;
    let mut words: Vec<Word> = Vec::with_capacity(n);
    let mut child_counts: Vec<u32> = vec![0; n];
    words.push(Word::root());
    for &j in encoding.ancestors() {
        let parent = (j - 1) as usize;
        child_counts[parent] += 1;
        words.push(words[parent].child(child_counts[parent]));
    }
    HarrisTree::from_words(words).expect("pushforward is a Harris tree")
}

/// Grow a uniform-attachment tree of `n` nodes: each step picks the parent
/// uniformly among current nodes (one index draw per step, in insertion
/// order — part of the deterministic replay contract).
pub fn grow_chain(n: u64, stream: &mut Stream) -> HarrisTree {
    grow_words(n, stream, |_| {})
}

/// As [`grow_chain`], also returning every intermediate tree.
pub fn grow_path(n: u64, stream: &mut Stream) -> Vec<HarrisTree> {
    let mut path = Vec::with_capacity(n as usize);
    let last = grow_words(n, stream, |words| {
        path.push(HarrisTree::from_words(words.iter().cloned()).expect("grown prefix"))
    });
    path.push(last);
    path
}

fn grow_words<F: FnMut(&[Word])>(n: u64, stream: &mut Stream, mut visit: F) -> HarrisTree {
    assert!(n >= 1, "tree size must be positive");
    let mut words = vec![Word::root()];
    let mut counts = vec![0u32; n as usize];
    for _ in 1..n {
        visit(&words);
        let p = stream.next_index(words.len() as u64) as usize;
        counts[p] += 1;
        words.push(words[p].child(counts[p]));
    }
    HarrisTree::from_words(words).expect("grown tree")
}
