//! Counter-based splittable random streams.
//!
//! Every random quantity in this crate is addressed by a *path*: master seed,
//! replication index, then whatever coordinates the consumer needs (word
//! letters, stick index, ...). A [`StreamKey`] names such a path and produces
//! values by counter, so results do not depend on the order in which they are
//! first requested, nor on the number of worker threads.

/// SplitMix64 finalizer; full-avalanche mix of a 64-bit word.
#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Weyl increment of the SplitMix64 sequence.
const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
const ROOT_TAG: u64 = 0x5851_f42d_4c95_7f2d;
const CHILD_TAG: u64 = 0xd1b5_4a32_d192_ed03;

/// A keyed position in the stream tree. Copy-cheap; all derivation is pure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey(u64);

impl StreamKey {
    pub fn root(seed: u64) -> Self {
        StreamKey(mix(seed ^ ROOT_TAG))
    }

    /// Derive the `index`-th child stream. Splitting is deterministic and
    /// independent of any values already drawn from `self`.
    #[inline]
    pub fn child(self, index: u64) -> Self {
        StreamKey(mix(
            (self.0 ^ CHILD_TAG).wrapping_add(index.wrapping_mul(GOLDEN))
        ))
    }

    /// The `counter`-th raw value of this stream: the canonical SplitMix64
    /// output at state `key + counter * GOLDEN`.
    #[inline]
    pub fn value(self, counter: u64) -> u64 {
        mix(self.0.wrapping_add(counter.wrapping_mul(GOLDEN)))
    }

    /// The `counter`-th uniform in the *open* interval (0,1).
    #[inline]
    pub fn unit(self, counter: u64) -> f64 {
        ((self.value(counter) >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Stream for replication `rep` under a master seed.
    pub fn replication(seed: u64, rep: u64) -> Self {
        StreamKey::root(seed).child(rep)
    }

    /// Sequential view of this stream.
    pub fn stream(self) -> Stream {
        Stream {
            key: self,
            counter: 0,
        }
    }
}

/// A stateful cursor over one keyed stream, for inherently sequential
/// consumers (tree growth, input sequences).
#[derive(Debug, Clone)]
pub struct Stream {
    key: StreamKey,
    counter: u64,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        StreamKey::root(seed).stream()
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let v = self.key.value(self.counter);
        self.counter += 1;
        v
    }

    /// Uniform in the open interval (0,1).
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `0..bound` (Lemire reduction; bias < 2^-64 * bound).
    #[inline]
    pub fn next_index(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }

    /// Split off an independent child stream without disturbing the cursor.
    pub fn substream(&self, index: u64) -> Stream {
        self.key.child(index).stream()
    }
}
