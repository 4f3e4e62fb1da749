//! Boundary objects: a lazily materialised random measure on the infinite
//! word tree, exposing cylinder masses and the toll series that capture the
//! limits of path lengths and the Wiener index.
//!
//! Three modes share one machinery:
//!   * `Unconditional` — every node splits by an independent standard GEM.
//!   * `Conditional`   — node splits follow GEM(a) with `a` the child
//!     subtree sizes of a fixed finite tree (its own split law elsewhere).
//!   * `FromInput`     — splits are read off an explicit input prefix of
//!     distinct reals, exactly as the sequential construction in [`crate::rt`]
//!     would consume them, and continue with seeded uniforms beyond the data.
//!
//! Every random quantity is keyed by (replication key, word path, stick
//! index), so masses are identical no matter the order in which they are
//! queried, and series evaluations agree with point queries.

use std::collections::HashMap;

use crate::functionals::{self, harmonic};
use crate::gem::{sample_beta_int_keyed, xlogx, GemParams, SimplexVec};
use crate::harris::HarrisTree;
use crate::rng::StreamKey;
use crate::rt::RtError;
use crate::words::Word;

/// Substream of a node key holding its stick draws (children use 1-based
/// letters as indices, so 0 is free).
const STICK_AREA: u64 = 0;

/// Truncation policy for series evaluation.
///
/// `weight_cut` bounds the word weight as in the defining partial sums;
/// `mass_floor` additionally prunes subtrees whose cylinder mass cannot
/// matter (dropped toll terms have conditional mean zero, so the estimator
/// stays unbiased for the Y and Z series; the W series acquires a positive
/// bias of at most `2 * mass_floor`). The root is never pruned.
#[derive(Debug, Clone, Copy)]
pub struct SeriesConfig {
    pub weight_cut: u64,
    pub mass_floor: f64,
    /// Relative residual at which a node's toll is considered converged.
    pub toll_residual: f64,
    pub max_sticks: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig {
            weight_cut: 24,
            mass_floor: 1e-6,
            toll_residual: 1e-9,
            max_sticks: 4096,
        }
    }
}

impl SeriesConfig {
    pub fn with_weight_cut(mut self, cut: u64) -> Self {
        self.weight_cut = cut;
        self
    }

    pub fn with_mass_floor(mut self, floor: f64) -> Self {
        self.mass_floor = floor;
        self
    }

    pub fn with_toll_residual(mut self, residual: f64) -> Self {
        self.toll_residual = residual;
        self
    }
}

/// One evaluation of the three series under a shared set of splits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSample {
    /// sum of mass * C(split) — the total path length limit.
    pub y: f64,
    /// sum of mass * D(split) — with `y`, the horizontal limit `y + z`.
    pub z: f64,
    /// sum of squared masses — the Wiener correction term.
    pub w: f64,
}

#[derive(Debug, Clone)]
enum Mode {
    Unconditional,
    Conditional(HarrisTree),
    FromInput(Vec<f64>),
}

/// Bookkeeping for one materialised node in input mode.
#[derive(Debug, Clone)]
struct InputNode {
    lo: f64,
    hi: f64,
    values: Vec<f64>,
}

/// Plan of one input-mode node: descending child breakpoints and the values
/// routed into each child interval, in arrival order.
struct InputPlan {
    breaks: Vec<f64>,
    lists: Vec<Vec<f64>>,
}

/// Next breakpoint strictly inside `[lo, prev]`. Once the interval is below
/// one ulp the subtraction can round past its ends, so clamp; a collapsed
/// interval yields zero-width sticks from then on.
fn next_break(lo: f64, prev: f64, zeta: f64) -> f64 {
    let d = prev - lo;
    if d <= 0.0 {
        return prev;
    }
    (prev - zeta * d).clamp(lo, prev)
}

/// Stick fraction of the step from `prev` down to `m` within `(lo, prev)`.
fn interval_stick(lo: f64, prev: f64, m: f64) -> f64 {
    let d = prev - lo;
    if d <= 0.0 {
        0.0
    } else {
        ((prev - m) / d).clamp(0.0, 1.0)
    }
}

fn plan_input(values: &[f64]) -> InputPlan {
    let mut breaks: Vec<f64> = Vec::new();
    let mut lists: Vec<Vec<f64>> = Vec::new();
    for &v in values {
        if breaks.last().is_none_or(|&m| v < m) {
            breaks.push(v);
            lists.push(Vec::new());
        } else {
            // breaks is descending; v sits in (breaks[j], breaks[j-1])
            let j = breaks.partition_point(|&m| m > v);
            lists[j].push(v);
        }
    }
    InputPlan { breaks, lists }
}

pub struct LimitTree {
    mode: Mode,
    key: StreamKey,
    stick_cut: usize,
    store: HashMap<Word, SimplexVec>,
    pending: HashMap<Word, InputNode>,
}

impl LimitTree {
    pub fn unconditional(key: StreamKey) -> Self {
        LimitTree::new(Mode::Unconditional, key)
    }

    /// Splits conditioned on observing the finite tree `x`.
    pub fn conditional(x: HarrisTree, key: StreamKey) -> Self {
        assert!(!x.is_empty(), "conditioning tree must be nonempty");
        LimitTree::new(Mode::Conditional(x), key)
    }

    /// Splits driven by an explicit input prefix (distinct values in (0,1)),
    /// continued with seeded uniforms once the data is exhausted.
    pub fn from_input(prefix: Vec<f64>, key: StreamKey) -> Result<Self, RtError> {
        for (idx, &v) in prefix.iter().enumerate() {
            if !(v > 0.0 && v < 1.0) {
                return Err(RtError::OutOfRange {
                    index: idx,
                    value: v,
                });
            }
            if let Some(first) = prefix[..idx].iter().position(|&w| w == v) {
                return Err(RtError::Tie {
                    first: first + 1,
                    second: idx + 1,
                });
            }
        }
        Ok(LimitTree::new(Mode::FromInput(prefix), key))
    }

    fn new(mode: Mode, key: StreamKey) -> Self {
        let mut pending = HashMap::new();
        if let Mode::FromInput(prefix) = &mode {
            pending.insert(
                Word::root(),
                InputNode {
                    lo: 0.0,
                    hi: 1.0,
                    values: prefix.clone(),
                },
            );
        }
        LimitTree {
            mode,
            key,
            stick_cut: crate::gem::DEFAULT_STICKS,
            store: HashMap::new(),
            pending,
        }
    }

    pub fn with_stick_cut(mut self, cut: usize) -> Self {
        self.stick_cut = cut;
        self
    }

    fn word_key(&self, word: &Word) -> StreamKey {
        word.letters()
            .iter()
            .fold(self.key, |k, &l| k.child(u64::from(l)))
    }

    fn stick(key: StreamKey, i: usize, params: &GemParams) -> f64 {
        let (p, q) = params.stick_params(i);
        sample_beta_int_keyed(p, q, key.child(STICK_AREA).child(i as u64))
    }

    /// The split vector at `word`, materialising it (and in input mode its
    /// ancestors) on first use. Replay-stable: repeated queries never change.
    pub fn rho(&mut self, word: &Word) -> &SimplexVec {
        if !self.store.contains_key(word) {
            let vec = self.materialise(word);
            self.store.insert(word.clone(), vec);
        }
        &self.store[word]
    }

    fn materialise(&mut self, word: &Word) -> SimplexVec {
        let key = self.word_key(word);
        let cut = self.stick_cut;
        match &self.mode {
            Mode::Unconditional => {
                let params = GemParams::standard();
                SimplexVec::from_sticks((0..cut).map(|i| Self::stick(key, i, &params)))
            }
            Mode::Conditional(x) => {
                let params = GemParams::conditional(x, word);
                let sticks = cut.max(params.k());
                SimplexVec::from_sticks((0..sticks).map(|i| Self::stick(key, i, &params)))
            }
            Mode::FromInput(_) => {
                if !self.pending.contains_key(word) {
                    let parent = word.parent().expect("root is pre-seeded");
                    self.rho(&parent);
                }
                let node = self
                    .pending
                    .get(word)
                    .cloned()
                    .expect("letters beyond the stick cut carry no mass");
                let plan = plan_input(&node.values);
                let uniform = GemParams::standard();
                let mut sticks = Vec::with_capacity(cut.max(plan.breaks.len()));
                let mut prev = node.hi;
                for i in 0..cut.max(plan.breaks.len()) {
                    let (m, values) = match plan.breaks.get(i) {
                        Some(&m) => (m, plan.lists[i].clone()),
                        None => {
                            let zeta = Self::stick(key, i, &uniform);
                            (next_break(node.lo, prev, zeta), Vec::new())
                        }
                    };
                    sticks.push(interval_stick(node.lo, prev, m));
                    self.pending.insert(
                        word.child(i as u32 + 1),
                        InputNode {
                            lo: m,
                            hi: prev,
                            values,
                        },
                    );
                    prev = m;
                }
                SimplexVec::from_sticks(sticks)
            }
        }
    }

    /// Cylinder mass of `word`: the product of split entries along the path.
    /// 1 at the root; words with a letter beyond the materialised sticks of
    /// their parent carry mass 0 (the truncation policy).
    pub fn mass(&mut self, word: &Word) -> f64 {
        let letters = word.letters().to_vec();
        let mut mass = 1.0;
        let mut prefix = Word::root();
        for &l in &letters {
            let rho = self.rho(&prefix);
            if l as usize > rho.len() {
                return 0.0;
            }
            mass *= rho.mass(l as usize - 1);
            prefix = prefix.child(l);
        }
        mass
    }

    /// Evaluate the three toll series in one pass over the word tree,
    /// truncated by `config`. Deterministic given the construction key.
    pub fn series(&self, config: &SeriesConfig) -> SeriesSample {
        let mut acc = SeriesSample {
            y: 0.0,
            z: 0.0,
            w: 0.0,
        };
        match &self.mode {
            Mode::Unconditional => self.walk_plain(self.key, Ctx::Plain, 1.0, 0, config, &mut acc),
            Mode::Conditional(x) => self.walk_plain(
                self.key,
                Ctx::Cond {
                    tree: x,
                    word: Word::root(),
                },
                1.0,
                0,
                config,
                &mut acc,
            ),
            Mode::FromInput(prefix) => self.walk_input(
                self.key,
                InputNode {
                    lo: 0.0,
                    hi: 1.0,
                    values: prefix.clone(),
                },
                1.0,
                0,
                config,
                &mut acc,
            ),
        }
        acc
    }

    /// Partial sum of `mass * C(split)` over words of weight <= `weight_cut`.
    pub fn y_series(&self, weight_cut: u64) -> f64 {
        self.series(&SeriesConfig::default().with_weight_cut(weight_cut))
            .y
    }

    /// Partial sum of `mass * D(split)`.
    pub fn z_series(&self, weight_cut: u64) -> f64 {
        self.series(&SeriesConfig::default().with_weight_cut(weight_cut))
            .z
    }

    /// Partial sum of squared masses.
    pub fn w_series(&self, weight_cut: u64) -> f64 {
        self.series(&SeriesConfig::default().with_weight_cut(weight_cut))
            .w
    }

    fn walk_plain(
        &self,
        key: StreamKey,
        ctx: Ctx<'_>,
        mass: f64,
        weight: u64,
        cfg: &SeriesConfig,
        acc: &mut SeriesSample,
    ) {
        let params = match &ctx {
            Ctx::Plain => GemParams::standard(),
            Ctx::Cond { tree, word } => GemParams::conditional(tree, word),
        };
        acc.w += mass * mass;
        let mut c = 1.0;
        let mut d = -2.0;
        let mut remaining = 1.0f64;
        let mut i = 0usize;
        loop {
            let zeta = Self::stick(key, i, &params);
            let xi = remaining * zeta;
            c += xlogx(xi);
            d += (i as f64 + 1.0) * xi;
            let letter = i as u64 + 1;
            let child_mass = mass * xi;
            if child_mass > cfg.mass_floor && weight + letter <= cfg.weight_cut {
                let child_ctx = match &ctx {
                    Ctx::Plain => Ctx::Plain,
                    Ctx::Cond { tree, word } => Ctx::Cond {
                        tree,
                        word: word.child(letter as u32),
                    },
                };
                self.walk_plain(
                    key.child(letter),
                    child_ctx,
                    child_mass,
                    weight + letter,
                    cfg,
                    acc,
                );
            }
            remaining *= 1.0 - zeta;
            i += 1;
            let more_children =
                mass * remaining > cfg.mass_floor && weight + i as u64 + 1 <= cfg.weight_cut;
            if (!more_children && remaining <= cfg.toll_residual) || i >= cfg.max_sticks {
                break;
            }
        }
        acc.y += mass * c;
        acc.z += mass * d;
    }

    fn walk_input(
        &self,
        key: StreamKey,
        node: InputNode,
        mass: f64,
        weight: u64,
        cfg: &SeriesConfig,
        acc: &mut SeriesSample,
    ) {
        acc.w += mass * mass;
        let plan = plan_input(&node.values);
        let uniform = GemParams::standard();
        let mut c = 1.0;
        let mut d = -2.0;
        let mut remaining = 1.0f64;
        let mut prev = node.hi;
        let mut i = 0usize;
        loop {
            let (m, values) = match plan.breaks.get(i) {
                Some(&m) => (m, plan.lists[i].clone()),
                None => {
                    let zeta = Self::stick(key, i, &uniform);
                    (next_break(node.lo, prev, zeta), Vec::new())
                }
            };
            let zeta = interval_stick(node.lo, prev, m);
            let xi = remaining * zeta;
            c += xlogx(xi);
            d += (i as f64 + 1.0) * xi;
            let letter = i as u64 + 1;
            let child_mass = mass * xi;
            if child_mass > cfg.mass_floor && weight + letter <= cfg.weight_cut {
                self.walk_input(
                    key.child(letter),
                    InputNode {
                        lo: m,
                        hi: prev,
                        values,
                    },
                    child_mass,
                    weight + letter,
                    cfg,
                    acc,
                );
            }
            remaining *= 1.0 - zeta;
            prev = m;
            i += 1;
            let data_left = i < plan.breaks.len();
            let more_children =
                mass * remaining > cfg.mass_floor && weight + i as u64 + 1 <= cfg.weight_cut;
            if (!data_left && !more_children && remaining <= cfg.toll_residual)
                || i >= cfg.max_sticks
            {
                break;
            }
        }
        acc.y += mass * c;
        acc.z += mass * d;
    }
}

enum Ctx<'a> {
    Plain,
    Cond { tree: &'a HarrisTree, word: Word },
}

/// Conditional expectation of the Y series given the finite tree:
/// `tpl/n + 1 - H(n)`.
pub fn y_projection(x: &HarrisTree) -> f64 {
    let n = x.len();
    functionals::tpl(x) as f64 / n as f64 + 1.0 - harmonic(n)
}

/// Conditional expectation of the Z series: `-tpl/n + hpl/n + (n-1)/n`.
pub fn z_projection(x: &HarrisTree) -> f64 {
    let n = x.len() as f64;
    (functionals::hpl(x) as f64 - functionals::tpl(x) as f64) / n + (n - 1.0) / n
}

/// Conditional expectation of the W series:
/// `(n + tpl + sum of squared subtree sizes) / (n (n + 1)) + 2 / (n + 1)`.
/// The external-node term is `2/(n+1)`: each of the `n` external nodes
/// contributes `2/(n(n+1))`. Averaging over the tree law gives exactly 2 at
/// every size, consistent with the unconditional mean of the series.
pub fn w_projection(x: &HarrisTree) -> f64 {
    let n = x.len() as f64;
    (n + functionals::tpl(x) as f64 + functionals::sum_subtree_squares(x) as f64) / (n * (n + 1.0))
        + 2.0 / (n + 1.0)
}

/// Right-hand side of the two-way fixed-point equation:
/// `u y1 + (1-u) y2 + G(u)`.
pub fn fixed_point_rhs(y1: f64, y2: f64, u: f64) -> f64 {
    u * y1 + (1.0 - u) * y2 + crate::gem::g_toll(u)
}
