//! Stick-breaking (GEM) distributions on the infinite simplex, with an
//! integer parameter word. The standard case breaks sticks with uniform
//! fractions; under a parameter word `a = (a_1, ..., a_k)` the i-th fraction
//! is Beta(a_i, 1 + a_{i+1} + ... + a_k) for i <= k and uniform afterwards.
//!
//! Beta variables with integer parameters are drawn exactly as order
//! statistics of uniforms: Beta(p, q) is the p-th smallest of p + q - 1
//! independent uniforms. No special-function code is involved.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::functionals::{harmonic_exact, Rat};
use crate::harris::HarrisTree;
use crate::rng::{Stream, StreamKey};
use crate::words::Word;

/// Default number of materialised sticks. The residual after 64 uniform
/// sticks has mean 2^-64, far below every tolerance used here.
pub const DEFAULT_STICKS: usize = 64;

/// Toll evaluations refuse simplex points with more residual mass than this.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum GemError {
    #[error("residual mass {residual:e} exceeds the toll tolerance {tolerance:e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },
    #[error("stick inversion hit a vanishing remainder at index {index}")]
    VanishingRemainder { index: usize },
}

/// Parameter word of a GEM distribution; empty means the standard GEM.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GemParams(Word);

impl GemParams {
    pub fn standard() -> Self {
        GemParams(Word::root())
    }

    pub fn new(a: Word) -> Self {
        GemParams(a)
    }

    pub fn from_slice(entries: &[u32]) -> Self {
        GemParams(Word::from_slice(entries))
    }

    /// Parameter word of the conditional split law at `word` given the tree:
    /// the child subtree sizes, empty when `word` has no children in `x`.
    pub fn conditional(x: &HarrisTree, word: &Word) -> Self {
        GemParams(Word::new(x.child_sizes(word)).expect("subtree sizes are positive"))
    }

    pub fn entries(&self) -> &[u32] {
        self.0.letters()
    }

    /// Number of constrained sticks.
    pub fn k(&self) -> usize {
        self.0.depth()
    }

    /// Total parameter mass `b`.
    pub fn b(&self) -> u64 {
        self.0.weight()
    }

    pub fn is_standard(&self) -> bool {
        self.0.is_root()
    }

    /// Beta parameters of the i-th stick fraction (0-based).
    pub fn stick_params(&self, i: usize) -> (u32, u32) {
        let a = self.entries();
        if i < a.len() {
            let rest: u32 = a[i + 1..].iter().sum();
            (a[i], 1 + rest)
        } else {
            (1, 1)
        }
    }
}

/// A truncated simplex point: finitely many masses plus the leftover tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexVec {
    masses: Vec<f64>,
    residual: f64,
}

impl SimplexVec {
    /// Build from explicit masses; the residual is implied.
    pub fn from_masses(masses: Vec<f64>) -> Self {
        let sum: f64 = masses.iter().sum();
        let v = SimplexVec {
            masses,
            residual: (1.0 - sum).max(0.0),
        };
        v.debug_check();
        v
    }

    /// Build from stick fractions in (0,1].
    pub fn from_sticks<I: IntoIterator<Item = f64>>(sticks: I) -> Self {
        let mut remaining = 1.0;
        let mut masses = Vec::new();
        for zeta in sticks {
            masses.push(remaining * zeta);
            remaining *= 1.0 - zeta;
        }
        let v = SimplexVec {
            masses,
            residual: remaining,
        };
        v.debug_check();
        v
    }

    fn debug_check(&self) {
        debug_assert!(
            (self.masses.iter().sum::<f64>() + self.residual - 1.0).abs() < 1e-12,
            "simplex masses must sum to one"
        );
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Mass at 0-based index; 0 beyond the materialised prefix.
    pub fn mass(&self, i: usize) -> f64 {
        self.masses.get(i).copied().unwrap_or(0.0)
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Split off the first coordinate: returns `(s_1, tail / (1 - s_1))`.
    /// The rescaled tail of a GEM point is again GEM distributed.
    pub fn split_first(&self) -> (f64, SimplexVec) {
        assert!(
            !self.masses.is_empty(),
            "cannot split an empty simplex point"
        );
        let first = self.masses[0];
        let scale = 1.0 - first;
        let tail: Vec<f64> = self.masses[1..].iter().map(|m| m / scale).collect();
        (
            first,
            SimplexVec {
                masses: tail,
                residual: self.residual / scale,
            },
        )
    }
}

/// Beta(alpha, beta) with positive integer parameters, drawn as the alpha-th
/// smallest of alpha + beta - 1 uniforms.
pub fn sample_beta_int(alpha: u32, beta: u32, stream: &mut Stream) -> f64 {
    beta_order_statistic(alpha, beta, |_| stream.next_unit())
}

/// As [`sample_beta_int`], reading uniforms from a keyed stream by counter.
pub fn sample_beta_int_keyed(alpha: u32, beta: u32, key: StreamKey) -> f64 {
    beta_order_statistic(alpha, beta, |i| key.unit(i))
}

fn beta_order_statistic(alpha: u32, beta: u32, mut unit: impl FnMut(u64) -> f64) -> f64 {
    assert!(
        alpha >= 1 && beta >= 1,
        "integer beta parameters must be positive"
    );
    let count = (alpha + beta - 1) as usize;
    if count == 1 {
        return unit(0);
    }
    let mut draws: Vec<f64> = (0..count as u64).map(&mut unit).collect();
    let (_, picked, _) =
        draws.select_nth_unstable_by((alpha - 1) as usize, |a, b| a.partial_cmp(b).unwrap());
    *picked
}

/// Draw the first `sticks` masses of a GEM(a) point.
pub fn sample_gem(a: &GemParams, sticks: usize, stream: &mut Stream) -> SimplexVec {
    assert!(sticks >= a.k(), "truncation must cover the parameter word");
    SimplexVec::from_sticks((0..sticks).map(|i| {
        let (p, q) = a.stick_params(i);
        sample_beta_int(p, q, stream)
    }))
}

#[inline]
pub(crate) fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

fn check_residual(s: &SimplexVec) -> Result<(), GemError> {
    if s.residual() > RESIDUAL_TOLERANCE {
        Err(GemError::ResidualTooLarge {
            residual: s.residual(),
            tolerance: RESIDUAL_TOLERANCE,
        })
    } else {
        Ok(())
    }
}

/// Entropy-like toll `C(s) = 1 + sum s_i log s_i`.
pub fn toll_c(s: &SimplexVec) -> Result<f64, GemError> {
    check_residual(s)?;
    Ok(1.0 + s.masses().iter().copied().map(xlogx).sum::<f64>())
}

/// Heuristic bound on the truncated tail of `toll_c`.
pub fn c_tail_bound(s: &SimplexVec) -> f64 {
    let r = s.residual();
    if r <= 0.0 {
        return 0.0;
    }
    r * (r / s.len().max(1) as f64).ln().abs()
}

/// Index toll `D(s) = -2 + sum i * s_i` (1-based index).
pub fn toll_d(s: &SimplexVec) -> Result<f64, GemError> {
    check_residual(s)?;
    Ok(-2.0
        + s.masses()
            .iter()
            .enumerate()
            .map(|(i, &m)| (i + 1) as f64 * m)
            .sum::<f64>())
}

/// Closed form for the mean of `toll_c` under GEM(a):
/// `1 + sum a_i H(a_i) / (1 + b) - H(1 + b)`; zero for the standard GEM.
pub fn expected_c_exact(a: &GemParams) -> Rat {
    let b = a.b();
    let weighted: Rat = a.entries().iter().fold(Rat::zero(), |acc, &ai| {
        acc + Rat::from_integer(ai as i128) * harmonic_exact(ai as u64)
    });
    Rat::from_integer(1) + weighted / Rat::from_integer((1 + b) as i128) - harmonic_exact(1 + b)
}

pub fn expected_c(a: &GemParams) -> f64 {
    rat_to_f64(expected_c_exact(a))
}

/// Closed form for the mean of `toll_d` under GEM(a):
/// `-2 + (sum i a_i + k + 2) / (1 + b)`; zero for the standard GEM.
pub fn expected_d_exact(a: &GemParams) -> Rat {
    if a.is_standard() {
        return Rat::zero();
    }
    let b = a.b() as i128;
    let k = a.k() as i128;
    let weighted: i128 = a
        .entries()
        .iter()
        .enumerate()
        .map(|(i, &ai)| (i as i128 + 1) * ai as i128)
        .sum();
    Rat::from_integer(-2) + Rat::new(weighted + k + 2, 1 + b)
}

pub fn expected_d(a: &GemParams) -> f64 {
    rat_to_f64(expected_d_exact(a))
}

/// `E[zeta log zeta]` for `zeta ~ Beta(i, j)`: `i/(i+j) (H_i - H_{i+j})`.
pub fn beta_log_moment_exact(i: u32, j: u32) -> Rat {
    Rat::new(i as i128, (i + j) as i128)
        * (harmonic_exact(i as u64) - harmonic_exact((i + j) as u64))
}

pub fn beta_log_moment(i: u32, j: u32) -> f64 {
    rat_to_f64(beta_log_moment_exact(i, j))
}

pub fn rat_to_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Local kernel density of GEM(a) with respect to the standard GEM at `s`:
/// `(b)! / prod (a_i - 1)! * prod s_i^(a_i - 1) * prod_{i<k} (1 - s_1 - ... - s_i)`.
pub fn martin_kernel(a: &GemParams, s: &SimplexVec) -> f64 {
    let entries = a.entries();
    let k = entries.len();
    assert!(
        s.len() >= k,
        "simplex point too short for the parameter word"
    );
    let mut value = 1.0f64;
    // (sum a_i)! / prod (a_i - 1)!
    for f in 2..=a.b() {
        value *= f as f64;
    }
    for &ai in entries {
        for f in 2..ai as u64 {
            value /= f as f64;
        }
    }
    for (i, &ai) in entries.iter().enumerate() {
        value *= s.mass(i).powi(ai as i32 - 1);
    }
    let mut partial = 0.0;
    for i in 0..k.saturating_sub(1) {
        partial += s.mass(i);
        value *= 1.0 - partial;
    }
    value
}

/// Recover stick fractions from masses: `t_i = s_i / (1 - s_1 - ... - s_{i-1})`.
/// The remainder is tracked multiplicatively, mirroring the forward map, so
/// the round trip is accurate to a few ulps even for long stick sequences.
pub fn inverse_stick(s: &SimplexVec) -> Result<Vec<f64>, GemError> {
    let mut remaining = 1.0f64;
    let mut sticks = Vec::with_capacity(s.len());
    for (index, &m) in s.masses().iter().enumerate() {
        if remaining <= 0.0 {
            return Err(GemError::VanishingRemainder { index });
        }
        let t = m / remaining;
        sticks.push(t);
        remaining *= 1.0 - t;
    }
    Ok(sticks)
}

/// Toll of the two-way split: `G(u) = u + u log u + (1-u) log(1-u)`.
pub fn g_toll(u: f64) -> f64 {
    assert!(u > 0.0 && u < 1.0, "g_toll needs an interior point");
    u + xlogx(u) + xlogx(1.0 - u)
}

/// Mirrored split toll: `G~(u) = 1 - u + u log u + (1-u) log(1-u) = G(1-u)`.
pub fn g_tilde(u: f64) -> f64 {
    assert!(u > 0.0 && u < 1.0, "g_tilde needs an interior point");
    1.0 - u + xlogx(u) + xlogx(1.0 - u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_and_se(values: &[f64]) -> (f64, f64) {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    fn assert_within_3se(values: &[f64], target: f64, what: &str) {
        let (mean, se) = mean_and_se(values);
        assert!(
            (mean - target).abs() <= 3.0 * se.max(1e-12),
            "{what}: mean {mean} vs target {target} (se {se})"
        );
    }

    #[test]
    fn beta_moments_match_closed_forms() {
        let mut s = Stream::new(100);
        for (alpha, beta, mean, second) in [
            (1u32, 1u32, 0.5, 1.0 / 3.0),
            (2, 1, 2.0 / 3.0, 0.5),
            (1, 3, 0.25, 0.1),
        ] {
            let draws: Vec<f64> = (0..20_000)
                .map(|_| sample_beta_int(alpha, beta, &mut s))
                .collect();
            assert_within_3se(&draws, mean, &format!("Beta({alpha},{beta}) mean"));
            let squares: Vec<f64> = draws.iter().map(|x| x * x).collect();
            assert_within_3se(
                &squares,
                second,
                &format!("Beta({alpha},{beta}) second moment"),
            );
        }
    }

    #[test]
    fn standard_gem_marginal_means() {
        let mut s = Stream::new(101);
        let a = GemParams::standard();
        let reps = 20_000;
        for i in 0..4usize {
            let draws: Vec<f64> = (0..reps)
                .map(|_| sample_gem(&a, 16, &mut s).mass(i))
                .collect();
            assert_within_3se(
                &draws,
                0.5f64.powi(i as i32 + 1),
                &format!("E xi_{}", i + 1),
            );
        }
    }

    #[test]
    fn parametrised_gem_marginals_and_residual() {
        let mut s = Stream::new(102);
        let reps = 20_000;
        for entries in [&[1u32][..], &[2], &[1, 1], &[3, 1, 2]] {
            let a = GemParams::from_slice(entries);
            let b = a.b() as f64;
            let a1 = entries[0] as f64;
            let mut firsts = Vec::new();
            let mut first_sq = Vec::new();
            let mut k_resid = Vec::new();
            for _ in 0..reps {
                let v = sample_gem(&a, 16, &mut s);
                firsts.push(v.mass(0));
                first_sq.push(v.mass(0) * v.mass(0));
                k_resid.push(1.0 - (0..a.k()).map(|i| v.mass(i)).sum::<f64>());
            }
            // xi_1 ~ Beta(a_1, 1 + b - a_1)
            assert_within_3se(
                &firsts,
                a1 / (1.0 + b),
                &format!("GEM({entries:?}) first marginal"),
            );
            assert_within_3se(
                &first_sq,
                (a1 * (a1 + 1.0)) / ((1.0 + b) * (2.0 + b)),
                &format!("GEM({entries:?}) second moment"),
            );
            // leftover after the k constrained sticks ~ Beta(1, b)
            assert_within_3se(
                &k_resid,
                1.0 / (1.0 + b),
                &format!("GEM({entries:?}) residual"),
            );
        }
    }

    #[test]
    fn toll_values_on_fixed_points() {
        let point = SimplexVec::from_masses(vec![1.0, 0.0]);
        assert_eq!(toll_c(&point).unwrap(), 1.0);
        assert_eq!(toll_d(&point).unwrap(), -1.0);
        let half = SimplexVec::from_masses(vec![0.5, 0.5]);
        assert!((toll_c(&half).unwrap() - (1.0 - 2.0f64.ln())).abs() < 1e-15);
        let second = SimplexVec::from_masses(vec![0.0, 1.0]);
        assert_eq!(toll_d(&second).unwrap(), 0.0);
    }

    #[test]
    fn tolls_reject_fat_residuals() {
        let bad = SimplexVec::from_masses(vec![0.5]);
        assert!(matches!(
            toll_c(&bad),
            Err(GemError::ResidualTooLarge { .. })
        ));
        assert!(matches!(
            toll_d(&bad),
            Err(GemError::ResidualTooLarge { .. })
        ));
    }

    #[test]
    fn toll_means_vanish_under_standard_gem() {
        let mut s = Stream::new(103);
        let a = GemParams::standard();
        let reps = 20_000;
        let mut cs = Vec::new();
        let mut ds = Vec::new();
        for _ in 0..reps {
            let v = sample_gem(&a, DEFAULT_STICKS, &mut s);
            cs.push(toll_c(&v).unwrap());
            ds.push(toll_d(&v).unwrap());
        }
        assert_within_3se(&cs, 0.0, "E C under GEM");
        assert_within_3se(&ds, 0.0, "E D under GEM");
    }

    #[test]
    fn expected_c_closed_form() {
        assert_eq!(expected_c_exact(&GemParams::standard()), Rat::new(0, 1));
        assert_eq!(
            expected_c_exact(&GemParams::from_slice(&[1])),
            Rat::new(0, 1)
        );
        assert_eq!(
            expected_c_exact(&GemParams::from_slice(&[2])),
            Rat::new(1, 6)
        );
    }

    #[test]
    fn expected_d_closed_form() {
        assert_eq!(expected_d_exact(&GemParams::standard()), Rat::new(0, 1));
        assert_eq!(
            expected_d_exact(&GemParams::from_slice(&[1])),
            Rat::new(0, 1)
        );
        assert_eq!(
            expected_d_exact(&GemParams::from_slice(&[1, 1])),
            Rat::new(1, 3)
        );
    }

    #[test]
    fn beta_log_moment_values() {
        assert_eq!(beta_log_moment_exact(1, 1), Rat::new(-1, 4));
        assert_eq!(beta_log_moment_exact(2, 1), Rat::new(-2, 9));
        // quadrature cross-check of the (1,1) case: integral of t log t
        let quad: f64 = {
            let n = 200_000;
            (0..n)
                .map(|i| {
                    let t = (i as f64 + 0.5) / n as f64;
                    xlogx(t) / n as f64
                })
                .sum()
        };
        assert!((quad - beta_log_moment(1, 1)).abs() < 1e-6);
    }

    #[test]
    fn beta_log_moment_matches_sampling() {
        let mut s = Stream::new(104);
        for (i, j) in [(1u32, 1u32), (2, 1), (3, 2)] {
            let draws: Vec<f64> = (0..20_000)
                .map(|_| {
                    let z = sample_beta_int(i, j, &mut s);
                    z * z.ln()
                })
                .collect();
            assert_within_3se(
                &draws,
                beta_log_moment(i, j),
                &format!("E z log z Beta({i},{j})"),
            );
        }
    }

    #[test]
    fn kernel_fixed_forms() {
        let s = SimplexVec::from_masses(vec![0.3, 0.2, 0.4]);
        assert!((martin_kernel(&GemParams::from_slice(&[1]), &s) - 1.0).abs() < 1e-15);
        assert!((martin_kernel(&GemParams::from_slice(&[2]), &s) - 0.6).abs() < 1e-15);
        assert!((martin_kernel(&GemParams::from_slice(&[1, 1]), &s) - 2.0 * 0.7).abs() < 1e-15);
        assert!((martin_kernel(&GemParams::standard(), &s) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kernel_is_a_density_and_reweights() {
        let mut s = Stream::new(105);
        let std = GemParams::standard();
        for entries in [&[2u32][..], &[1, 1], &[2, 1]] {
            let a = GemParams::from_slice(entries);
            let b = a.b() as f64;
            let mut ks = Vec::new();
            let mut weighted_first = Vec::new();
            for _ in 0..20_000 {
                let xi = sample_gem(&std, 16, &mut s);
                let k = martin_kernel(&a, &xi);
                ks.push(k);
                weighted_first.push(xi.mass(0) * k);
            }
            assert_within_3se(&ks, 1.0, &format!("kernel normalisation a={entries:?}"));
            assert_within_3se(
                &weighted_first,
                entries[0] as f64 / (1.0 + b),
                &format!("kernel reweighting a={entries:?}"),
            );
        }
    }

    #[test]
    fn inverse_stick_geometric_and_round_trip() {
        let geo = SimplexVec::from_masses(vec![0.5, 0.25, 0.125, 0.0625]);
        let sticks = inverse_stick(&geo).unwrap();
        for t in sticks {
            assert!((t - 0.5).abs() < 1e-12);
        }

        let mut s = Stream::new(106);
        for _ in 0..200 {
            let v = sample_gem(&GemParams::from_slice(&[2, 3]), 24, &mut s);
            let sticks = inverse_stick(&v).unwrap();
            let back = SimplexVec::from_sticks(sticks);
            for i in 0..v.len() {
                assert!((back.mass(i) - v.mass(i)).abs() < 1e-12);
            }
            assert!((back.residual() - v.residual()).abs() < 1e-12);
        }

        let degenerate = SimplexVec::from_masses(vec![1.0, 0.0]);
        assert_eq!(
            inverse_stick(&degenerate),
            Err(GemError::VanishingRemainder { index: 1 })
        );
    }

    #[test]
    fn g_toll_values_and_identity() {
        assert!((g_toll(0.5) - (0.5 - 2.0f64.ln())).abs() < 1e-15);
        for i in 1..20 {
            let u = i as f64 / 20.0;
            assert!((g_tilde(u) - g_toll(u) - (1.0 - 2.0 * u)).abs() < 1e-12);
            assert!((g_tilde(u) - g_toll(1.0 - u)).abs() < 1e-12);
        }
    }

    #[test]
    fn g_toll_mean_matches_quadrature() {
        // Independent oracle: midpoint quadrature of G over (0,1). The
        // integral evaluates to 1/2 - 1/4 - 1/4 = 0; the sampled mean must
        // agree with the quadrature value within 3 standard errors.
        let n = 400_000;
        let quad: f64 = (0..n)
            .map(|i| {
                let u = (i as f64 + 0.5) / n as f64;
                g_toll(u) / n as f64
            })
            .sum();
        assert!(quad.abs() < 1e-6, "quadrature oracle gives {quad}");

        let mut s = Stream::new(107);
        let draws: Vec<f64> = (0..20_000).map(|_| g_toll(s.next_unit())).collect();
        assert_within_3se(&draws, quad, "E G(U)");
    }

    #[test]
    fn shift_identities_hold_pointwise() {
        let mut s = Stream::new(108);
        for _ in 0..200 {
            let xi = sample_gem(&GemParams::standard(), DEFAULT_STICKS, &mut s);
            let (zeta1, tail) = xi.split_first();
            let c_err =
                toll_c(&xi).unwrap() - (1.0 - zeta1) * toll_c(&tail).unwrap() - g_toll(zeta1);
            assert!(c_err.abs() < 1e-9, "C shift identity error {c_err}");
            let d_err =
                toll_d(&xi).unwrap() - (1.0 - zeta1) * toll_d(&tail).unwrap() - (1.0 - 2.0 * zeta1);
            assert!(d_err.abs() < 1e-9, "D shift identity error {d_err}");
        }
    }
}
