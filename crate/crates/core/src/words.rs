//! Ulam-Harris words: finite sequences of positive integers naming the nodes
//! of the infinite rooted plane tree. The empty word is the root.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("word letters must be positive, got 0 at position {0}")]
    ZeroLetter(usize),
    #[error("the root word has no predecessor")]
    RootHasNoPredecessor,
    #[error("cannot parse {0:?} as a word")]
    Parse(String),
}

/// A node of the Ulam-Harris universe. Immutable after construction; every
/// letter is at least 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<u32>,
}

/// One step of the walk that spells a word: `Down` appends a first child,
/// `Right` moves to the next sibling (increments the last letter).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Down,
    Right,
}

impl Word {
    pub fn root() -> Self {
        Word {
            letters: Vec::new(),
        }
    }

    pub fn new(letters: Vec<u32>) -> Result<Self, WordError> {
        if let Some(pos) = letters.iter().position(|&l| l == 0) {
            return Err(WordError::ZeroLetter(pos));
        }
        Ok(Word { letters })
    }

    /// Panics on a zero letter; for literals in code and tests.
    pub fn from_slice(letters: &[u32]) -> Self {
        Word::new(letters.to_vec()).expect("valid word literal")
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn is_root(&self) -> bool {
        self.letters.is_empty()
    }

    /// Number of letters.
    pub fn depth(&self) -> usize {
        self.letters.len()
    }

    /// Sum of letters; 0 for the root.
    pub fn weight(&self) -> u64 {
        self.letters.iter().map(|&l| u64::from(l)).sum()
    }

    /// Horizontal position: weight minus depth.
    pub fn horizontal(&self) -> u64 {
        self.weight() - self.depth() as u64
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.letters.starts_with(&self.letters)
    }

    /// Longest common prefix.
    pub fn meet(&self, other: &Word) -> Word {
        let common = self
            .letters
            .iter()
            .zip(&other.letters)
            .take_while(|(a, b)| a == b)
            .count();
        Word {
            letters: self.letters[..common].to_vec(),
        }
    }

    /// Append a child index.
    pub fn child(&self, index: u32) -> Word {
        assert!(index >= 1, "child index must be positive");
        let mut letters = self.letters.clone();
        letters.push(index);
        Word { letters }
    }

    /// Drop the last letter; `None` at the root.
    pub fn parent(&self) -> Option<Word> {
        if self.is_root() {
            return None;
        }
        Word {
            letters: self.letters[..self.letters.len() - 1].to_vec(),
        }
        .into()
    }

    pub fn last_letter(&self) -> Option<u32> {
        self.letters.last().copied()
    }

    /// Flat version: prepend a 1.
    pub fn flat(&self) -> Word {
        let mut letters = Vec::with_capacity(self.letters.len() + 1);
        letters.push(1);
        letters.extend_from_slice(&self.letters);
        Word { letters }
    }

    /// Raised version: increment the first letter; identity on the root.
    pub fn sharp(&self) -> Word {
        let mut letters = self.letters.clone();
        if let Some(first) = letters.first_mut() {
            *first += 1;
        }
        Word { letters }
    }

    /// Direct predecessor: drop a trailing 1, otherwise decrement the last
    /// letter. Iterating reaches the root in exactly `weight` steps.
    pub fn pred(&self) -> Result<Word, WordError> {
        match self.letters.last() {
            None => Err(WordError::RootHasNoPredecessor),
            Some(1) => Ok(Word {
                letters: self.letters[..self.letters.len() - 1].to_vec(),
            }),
            Some(&l) => {
                let mut letters = self.letters.clone();
                *letters.last_mut().unwrap() = l - 1;
                Ok(Word { letters })
            }
        }
    }

    /// The walk from the root to this word: one `Down` per letter, each
    /// followed by `letter - 1` `Right`s.
    pub fn moves(&self) -> Vec<Move> {
        let mut out = Vec::with_capacity(self.weight() as usize);
        for &l in &self.letters {
            out.push(Move::Down);
            for _ in 1..l {
                out.push(Move::Right);
            }
        }
        out
    }

    fn apply(letters: &mut Vec<u32>, m: Move) {
        match m {
            Move::Down => letters.push(1),
            Move::Right => *letters.last_mut().expect("Right move below the root") += 1,
        }
    }

    /// The involution that swaps `Down` and `Right` in the spelling walk,
    /// keeping the obligatory first `Down`. Fixes the root and (1); for any
    /// other word it exchanges depth and horizontal position up to a shift:
    /// `dual(u).horizontal() == u.depth() - 1`.
    pub fn dual(&self) -> Word {
        let mut letters: Vec<u32> = Vec::new();
        for (i, m) in self.moves().into_iter().enumerate() {
            let m = if i == 0 {
                m
            } else {
                match m {
                    Move::Down => Move::Right,
                    Move::Right => Move::Down,
                }
            };
            Word::apply(&mut letters, m);
        }
        Word { letters }
    }
}

// Canonical order for map keys: by length, then lexicographically.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim();
        let inner = inner.strip_prefix('(').unwrap_or(inner);
        let inner = inner.strip_suffix(')').unwrap_or(inner);
        if inner.trim().is_empty() {
            return Ok(Word::root());
        }
        let letters = inner
            .split(',')
            .map(|part| part.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| WordError::Parse(s.to_string()))?;
        Word::new(letters).map_err(|_| WordError::Parse(s.to_string()))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse()
            .map_err(|e: WordError| D::Error::custom(e.to_string()))
    }
}

/// All words of weight at most `max_weight`, in breadth-first order by
/// weight. There are 2^k of them (one root plus 2^(k-1) per weight level).
pub fn words_up_to_weight(max_weight: u64) -> Vec<Word> {
    let mut out = vec![Word::root()];
    let mut level = vec![Word::root().child(1)];
    let mut w = 1;
    while w <= max_weight {
        out.extend(level.iter().cloned());
        let mut next = Vec::with_capacity(level.len() * 2);
        for word in &level {
            next.push(word.child(1));
            let mut bumped = word.letters.clone();
            *bumped.last_mut().unwrap() += 1;
            next.push(Word { letters: bumped });
        }
        level = next;
        w += 1;
    }
    out
}
