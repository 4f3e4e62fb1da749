//! Simulation and verification laboratory for random recursive trees.
//!
//! The crate grows uniform-attachment trees, manipulates their Ulam-Harris
//! encodings, evaluates path-length and Wiener-index functionals, samples
//! the stick-breaking limit objects those trees converge to, and checks the
//! closed forms connecting all of the above — exactly for small sizes by
//! brute-force enumeration, statistically for large sizes by seeded,
//! thread-count-independent Monte Carlo.

pub mod exec;
pub mod functionals;
pub mod gem;
pub mod harris;
pub mod limits;
pub mod oracle;
pub mod rng;
pub mod rt;
pub mod stats;
pub mod verify;
pub mod words;

pub use functionals::{FunctionalRecord, Rat};
pub use harris::{Encoding, HarrisTree};
pub use words::Word;
