//! Exact reference results in rational arithmetic.
//!
//! Everything here enumerates the 3^n outcome vectors directly and sums
//! exact per-outcome probabilities. No code is shared with the
//! floating-point convolution in [`crate::distribution`], so agreement
//! between the two is evidence, not tautology.
//!
//! Enumeration is capped at n = 12 and ordering search at n = 7; beyond
//! that the calls return [`OracleError::SizeExceeded`] rather than stalling.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::distribution::TrinomialModel;
use crate::par;

/// Largest n for which full 3^n enumeration is attempted.
pub const ENUMERATION_CAP: usize = 12;

/// Largest n for which all n! lineups are enumerated exactly.
pub const ORDERING_CAP: usize = 7;

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    SizeExceeded { n: usize, cap: usize },
    InvalidTrial { index: usize, detail: String },
    InvalidInstance { detail: String },
    Empty,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::SizeExceeded { n, cap } => {
                write!(f, "n = {n} exceeds the exact enumeration cap {cap}")
            }
            OracleError::InvalidTrial { index, detail } => {
                write!(f, "trials[{index}]: {detail}")
            }
            OracleError::InvalidInstance { detail } => write!(f, "instance: {detail}"),
            OracleError::Empty => write!(f, "model must contain at least one trial"),
        }
    }
}

impl std::error::Error for OracleError {}

/// One trial with exact rational outcome probabilities summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalTrial {
    tie: BigRational,
    win: BigRational,
    loss: BigRational,
}

impl RationalTrial {
    /// `loss` is derived as `1 - tie - win` so the triple is exactly on the
    /// simplex.
    pub fn new(tie: BigRational, win: BigRational) -> Result<Self, String> {
        if tie.is_negative() {
            return Err(format!("t = {tie} is negative"));
        }
        if win.is_negative() {
            return Err(format!("w = {win} is negative"));
        }
        let sum = &tie + &win;
        if sum > BigRational::one() {
            return Err(format!("t + w = {sum} exceeds 1"));
        }
        let loss = BigRational::one() - sum;
        Ok(Self { tie, win, loss })
    }

    pub fn tie(&self) -> &BigRational {
        &self.tie
    }

    pub fn win(&self) -> &BigRational {
        &self.win
    }

    pub fn loss(&self) -> &BigRational {
        &self.loss
    }
}

/// Exact mirror of a model. Probabilities are exact rationals and every
/// derived quantity is computed without rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalModel {
    trials: Vec<RationalTrial>,
}

impl RationalModel {
    pub fn new(trials: Vec<RationalTrial>) -> Result<Self, OracleError> {
        if trials.is_empty() {
            return Err(OracleError::Empty);
        }
        Ok(Self { trials })
    }

    /// Exact mirror of the stored floats of `model`. Each f64 converts to a
    /// dyadic rational without re-rounding; `win` is reduced onto the simplex
    /// in the rare case the float pair overshoots it by an ulp.
    pub fn from_model(model: &TrinomialModel) -> Self {
        let trials = model
            .trials()
            .iter()
            .map(|t| {
                let tie = BigRational::from_float(t.tie()).expect("finite by construction");
                let mut win = BigRational::from_float(t.win()).expect("finite by construction");
                let headroom = BigRational::one() - &tie;
                if win > headroom {
                    win = headroom;
                }
                RationalTrial::new(tie, win).expect("validated model stays on the simplex")
            })
            .collect();
        Self { trials }
    }

    /// Builds a model from `(tie_num, win_num, denom)` integer triples, the
    /// native form of generated grid parameters.
    pub fn from_grid(trials: &[(u32, u32, u32)]) -> Result<Self, OracleError> {
        let trials = trials
            .iter()
            .enumerate()
            .map(|(index, &(t, w, d))| {
                if d == 0 {
                    return Err(OracleError::InvalidTrial {
                        index,
                        detail: "denominator is 0".into(),
                    });
                }
                let tie = BigRational::new(BigInt::from(t), BigInt::from(d));
                let win = BigRational::new(BigInt::from(w), BigInt::from(d));
                RationalTrial::new(tie, win)
                    .map_err(|detail| OracleError::InvalidTrial { index, detail })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(trials)
    }

    pub fn n(&self) -> usize {
        self.trials.len()
    }

    pub fn trials(&self) -> &[RationalTrial] {
        &self.trials
    }

    /// Exact pmf of 2X by summation over all 3^n outcome vectors.
    pub fn enumerate_pmf(&self) -> Result<ExactPmf, OracleError> {
        let n = self.n();
        if n > ENUMERATION_CAP {
            return Err(OracleError::SizeExceeded {
                n,
                cap: ENUMERATION_CAP,
            });
        }
        Ok(self.enumerate_unchecked())
    }

    fn enumerate_unchecked(&self) -> ExactPmf {
        // Per trial, scale (loss, tie, win) to integers over one denominator.
        let mut nums: Vec<[BigInt; 3]> = Vec::with_capacity(self.n());
        let mut denom = BigInt::one();
        let mut bit_budget = 0u64;
        for t in &self.trials {
            let d = t
                .loss
                .denom()
                .lcm(t.tie.denom())
                .lcm(t.win.denom());
            let scale = |r: &BigRational| (r * BigRational::from_integer(d.clone())).to_integer();
            nums.push([scale(&t.loss), scale(&t.tie), scale(&t.win)]);
            bit_budget += d.bits();
            denom *= d;
        }
        // The bucket sums total exactly prod(d_i), so u128 accumulation is
        // overflow-safe whenever the denominator product stays under 2^126.
        let buckets: Vec<BigInt> = if bit_budget <= 126 {
            let small: Vec<[u128; 3]> = nums
                .iter()
                .map(|row| {
                    [
                        row[0].to_u128().expect("bounded by bit budget"),
                        row[1].to_u128().expect("bounded by bit budget"),
                        row[2].to_u128().expect("bounded by bit budget"),
                    ]
                })
                .collect();
            enumerate_buckets(&small).into_iter().map(BigInt::from).collect()
        } else {
            enumerate_buckets(&nums)
        };
        let probs = buckets
            .into_iter()
            .map(|num| BigRational::new(num, denom.clone()))
            .collect();
        ExactPmf { probs }
    }

    /// Exact mean: sum of (win + tie/2).
    pub fn mean(&self) -> BigRational {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        self.trials
            .iter()
            .map(|t| &t.win + &t.tie * &half)
            .fold(BigRational::zero(), |acc, x| acc + x)
    }

    /// Exact alternating moment a = prod(1 - 2 tie).
    pub fn alternating_a(&self) -> BigRational {
        let two = BigRational::from_integer(BigInt::from(2));
        self.trials
            .iter()
            .map(|t| BigRational::one() - &two * &t.tie)
            .fold(BigRational::one(), |acc, x| acc * x)
    }

    /// Exact alternating moment b = sum (win_i - tie_i/2) prod_{j!=i}(1 - 2 tie_j).
    pub fn alternating_b(&self) -> BigRational {
        let two = BigRational::from_integer(BigInt::from(2));
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let factors: Vec<BigRational> = self
            .trials
            .iter()
            .map(|t| BigRational::one() - &two * &t.tie)
            .collect();
        let mut b = BigRational::zero();
        for (i, t) in self.trials.iter().enumerate() {
            let mut rest = BigRational::one();
            for (j, f) in factors.iter().enumerate() {
                if j != i {
                    rest *= f;
                }
            }
            b += (&t.win - &t.tie * &half) * rest;
        }
        b
    }

    /// Exact conditional means by enumeration; subject to the same cap.
    pub fn conditional_means(&self) -> Result<ExactMeans, OracleError> {
        Ok(self.enumerate_pmf()?.conditional_means())
    }

    /// Exact P(2X >= k2) by enumeration; `k2` may be `2n + 1` (empty tail).
    pub fn tail(&self, k2: usize) -> Result<BigRational, OracleError> {
        if k2 > 2 * self.n() + 1 {
            return Err(OracleError::InvalidInstance {
                detail: format!("k2 = {k2} is outside 0..={}", 2 * self.n() + 1),
            });
        }
        Ok(self.enumerate_pmf()?.tail_from_doubled(k2))
    }

    #[cfg(test)]
    pub(crate) fn enumerate_pmf_bigint_path(&self) -> ExactPmf {
        let mut nums: Vec<[BigInt; 3]> = Vec::with_capacity(self.n());
        let mut denom = BigInt::one();
        for t in &self.trials {
            let d = t.loss.denom().lcm(t.tie.denom()).lcm(t.win.denom());
            let scale = |r: &BigRational| (r * BigRational::from_integer(d.clone())).to_integer();
            nums.push([scale(&t.loss), scale(&t.tie), scale(&t.win)]);
            denom *= d;
        }
        let probs = enumerate_buckets(&nums)
            .into_iter()
            .map(|num| BigRational::new(num, denom.clone()))
            .collect();
        ExactPmf { probs }
    }
}

/// Exact pmf of 2X.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactPmf {
    probs: Vec<BigRational>,
}

impl ExactPmf {
    pub fn n(&self) -> usize {
        (self.probs.len() - 1) / 2
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.probs
    }

    pub fn to_f64s(&self) -> Vec<f64> {
        self.probs.iter().map(|p| rational_to_f64(p)).collect()
    }

    /// Largest |floats[h] - exact[h]|, with the differences taken exactly
    /// before one final rounding.
    pub fn max_abs_diff(&self, floats: &[f64]) -> f64 {
        assert_eq!(floats.len(), self.probs.len(), "lattice sizes differ");
        let mut worst = BigRational::zero();
        for (f, exact) in floats.iter().zip(&self.probs) {
            let approx = BigRational::from_float(*f).expect("pmf entries are finite");
            let diff = (approx - exact).abs();
            if diff > worst {
                worst = diff;
            }
        }
        rational_to_f64(&worst)
    }

    pub fn mean(&self) -> BigRational {
        let mut num = BigRational::zero();
        for (h, p) in self.probs.iter().enumerate() {
            num += BigRational::from_integer(BigInt::from(h)) * p;
        }
        num / BigRational::from_integer(BigInt::from(2))
    }

    pub fn mass_even(&self) -> BigRational {
        self.parity_mass(0)
    }

    pub fn mass_odd(&self) -> BigRational {
        self.parity_mass(1)
    }

    fn parity_mass(&self, rem: usize) -> BigRational {
        let mut s = BigRational::zero();
        for (h, p) in self.probs.iter().enumerate() {
            if h % 2 == rem {
                s += p;
            }
        }
        s
    }

    /// P(2X >= k2).
    pub fn tail_from_doubled(&self, k2: usize) -> BigRational {
        let mut s = BigRational::zero();
        for p in self.probs.iter().skip(k2) {
            s += p;
        }
        s
    }

    /// Mean and parity-conditional means. A conditional mean is `None` only
    /// when its parity class has exactly zero mass.
    pub fn conditional_means(&self) -> ExactMeans {
        let mu = self.mean();
        let mass_even = self.mass_even();
        let mass_odd = self.mass_odd();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let conditional = |rem: usize, mass: &BigRational| {
            if mass.is_zero() {
                return None;
            }
            let mut num = BigRational::zero();
            for (h, p) in self.probs.iter().enumerate() {
                if h % 2 == rem {
                    num += BigRational::from_integer(BigInt::from(h)) * &half * p;
                }
            }
            Some(num / mass)
        };
        ExactMeans {
            mu_even: conditional(0, &mass_even),
            mu_odd: conditional(1, &mass_odd),
            mu,
            mass_even,
            mass_odd,
        }
    }
}

/// Exact first-moment summary of an enumerated pmf.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMeans {
    pub mu: BigRational,
    pub mass_even: BigRational,
    pub mass_odd: BigRational,
    pub mu_even: Option<BigRational>,
    pub mu_odd: Option<BigRational>,
}

/// Converts a rational to f64 through a 53-bit-safe division.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

trait ExactWeight: Clone + Send + Sync {
    fn unit() -> Self;
    fn nil() -> Self;
    fn times(&self, other: &Self) -> Self;
    fn accumulate(&mut self, other: &Self);
}

impl ExactWeight for u128 {
    fn unit() -> Self {
        1
    }
    fn nil() -> Self {
        0
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn accumulate(&mut self, other: &Self) {
        *self += other;
    }
}

impl ExactWeight for BigInt {
    fn unit() -> Self {
        One::one()
    }
    fn nil() -> Self {
        Zero::zero()
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn accumulate(&mut self, other: &Self) {
        *self += other;
    }
}

/// Walks all 3^n outcome vectors, summing each path's probability numerator
/// into the bucket of its doubled score. The top of the tree is expanded
/// into independent prefixes so subtrees can run on separate workers; the
/// reduction is an exact elementwise sum, so scheduling cannot change it.
fn enumerate_buckets<W: ExactWeight>(nums: &[[W; 3]]) -> Vec<W> {
    let n = nums.len();
    let split = n.saturating_sub(6);
    let mut prefixes: Vec<(usize, W)> = vec![(0, W::unit())];
    for row in nums.iter().take(split) {
        let mut next = Vec::with_capacity(prefixes.len() * 3);
        for (h, weight) in &prefixes {
            for (outcome, num) in row.iter().enumerate() {
                next.push((h + outcome, weight.times(num)));
            }
        }
        prefixes = next;
    }
    let partials = par::map_indexed(&prefixes, |_, (h0, w0)| {
        let mut buckets = vec![W::nil(); 2 * n + 1];
        descend(&mut buckets, nums, split, *h0, w0.clone());
        buckets
    });
    let mut total = vec![W::nil(); 2 * n + 1];
    for part in partials {
        for (acc, v) in total.iter_mut().zip(&part) {
            acc.accumulate(v);
        }
    }
    total
}

fn descend<W: ExactWeight>(buckets: &mut [W], nums: &[[W; 3]], depth: usize, h: usize, weight: W) {
    if depth == nums.len() {
        buckets[h].accumulate(&weight);
        return;
    }
    for (outcome, num) in nums[depth].iter().enumerate() {
        descend(buckets, nums, depth + 1, h + outcome, weight.times(num));
    }
}

/// Exact mirror of a match-play instance: trial probabilities affine in the
/// strength differential, all arithmetic rational.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMatchup {
    alpha: BigRational,
    beta: BigRational,
    team_a: Vec<BigRational>,
    team_b: Vec<BigRational>,
}

/// All exactly-optimal lineups for one threshold, in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingOptimum {
    pub best_orderings: Vec<Vec<usize>>,
    pub tail: BigRational,
}

impl RationalMatchup {
    pub fn new(
        alpha: BigRational,
        beta: BigRational,
        team_a: Vec<BigRational>,
        team_b: Vec<BigRational>,
    ) -> Result<Self, OracleError> {
        if !alpha.is_positive() {
            return Err(OracleError::InvalidInstance {
                detail: format!("alpha = {alpha} must be positive"),
            });
        }
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        if !beta.is_positive() || beta > half {
            return Err(OracleError::InvalidInstance {
                detail: format!("beta = {beta} must lie in (0, 1/2]"),
            });
        }
        if team_a.is_empty() || team_a.len() != team_b.len() {
            return Err(OracleError::InvalidInstance {
                detail: "teams must be non-empty and the same size".into(),
            });
        }
        for (name, team) in [("team_a", &team_a), ("team_b", &team_b)] {
            if team.windows(2).any(|w| w[0] < w[1]) {
                return Err(OracleError::InvalidInstance {
                    detail: format!("{name} must be sorted non-increasing"),
                });
            }
        }
        let instance = Self {
            alpha,
            beta,
            team_a,
            team_b,
        };
        // Any lineup may pair any two players, so all n^2 differentials must
        // produce valid trials.
        for i in 0..instance.team_a.len() {
            for j in 0..instance.team_b.len() {
                instance.trial(i, j)?;
            }
        }
        Ok(instance)
    }

    pub fn n(&self) -> usize {
        self.team_a.len()
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    pub fn beta(&self) -> &BigRational {
        &self.beta
    }

    pub fn team_a(&self) -> &[BigRational] {
        &self.team_a
    }

    pub fn team_b(&self) -> &[BigRational] {
        &self.team_b
    }

    /// Exact trial for A's player `a_idx` against B's player `b_idx`:
    /// win = alpha (b - a) + beta, loss = beta - alpha (b - a), tie = 1 - 2 beta.
    pub fn trial(&self, a_idx: usize, b_idx: usize) -> Result<RationalTrial, OracleError> {
        let s = &self.team_b[b_idx] - &self.team_a[a_idx];
        let win = &self.alpha * &s + &self.beta;
        let loss = &self.beta - &self.alpha * &s;
        if win.is_negative() || win > BigRational::one() || loss.is_negative() {
            return Err(OracleError::InvalidInstance {
                detail: format!(
                    "strength pair (a = {}, b = {}) leaves the model domain: w = {win}, l = {loss}",
                    self.team_a[a_idx], self.team_b[b_idx]
                ),
            });
        }
        let tie = BigRational::one() - BigRational::from_integer(BigInt::from(2)) * &self.beta;
        RationalTrial::new(tie, win).map_err(|detail| OracleError::InvalidInstance { detail })
    }

    /// Model of the match under lineup `sigma` (0-based: A's player i faces
    /// B's player sigma[i]).
    pub fn lineup_model(&self, sigma: &[usize]) -> Result<RationalModel, OracleError> {
        if !is_permutation(sigma, self.n()) {
            return Err(OracleError::InvalidInstance {
                detail: format!("sigma {sigma:?} is not a permutation of 0..{}", self.n()),
            });
        }
        let trials = (0..self.n())
            .map(|i| self.trial(i, sigma[i]))
            .collect::<Result<Vec<_>, _>>()?;
        RationalModel::new(trials)
    }

    /// Exact E[X]: n/2 + alpha (sum of b - sum of a), independent of lineup.
    pub fn expected_score(&self) -> BigRational {
        let n = BigRational::new(BigInt::from(self.n()), BigInt::from(2));
        let sum_a = self
            .team_a
            .iter()
            .fold(BigRational::zero(), |acc, x| acc + x);
        let sum_b = self
            .team_b
            .iter()
            .fold(BigRational::zero(), |acc, x| acc + x);
        n + &self.alpha * (sum_b - sum_a)
    }

    /// Exact pmf per lineup, enumerated over all n! lineups in lexicographic
    /// order. The per-lineup work runs in parallel; the output order is the
    /// enumeration order.
    pub fn ordering_pmfs(&self) -> Result<Vec<(Vec<usize>, ExactPmf)>, OracleError> {
        let n = self.n();
        if n > ORDERING_CAP {
            return Err(OracleError::SizeExceeded { n, cap: ORDERING_CAP });
        }
        let perms = permutations_lex(n);
        for sigma in &perms {
            // Domain already validated pairwise in the constructor.
            debug_assert!(is_permutation(sigma, n));
        }
        let pmfs = par::map_indexed(&perms, |_, sigma| {
            self.lineup_model(sigma)
                .expect("validated instance")
                .enumerate_unchecked()
        });
        Ok(perms.into_iter().zip(pmfs).collect())
    }

    /// All lineups whose exact P(2X >= k2) is maximal.
    pub fn ordering_optimum(&self, k2: usize) -> Result<OrderingOptimum, OracleError> {
        if k2 > 2 * self.n() + 1 {
            return Err(OracleError::InvalidInstance {
                detail: format!("k2 = {k2} is outside 0..={}", 2 * self.n() + 1),
            });
        }
        let table = self.ordering_pmfs()?;
        let tails: Vec<(Vec<usize>, BigRational)> = table
            .into_iter()
            .map(|(sigma, pmf)| {
                let tail = pmf.tail_from_doubled(k2);
                (sigma, tail)
            })
            .collect();
        let best = tails
            .iter()
            .map(|(_, t)| t)
            .max()
            .expect("at least one lineup")
            .clone();
        let best_orderings = tails
            .into_iter()
            .filter(|(_, t)| *t == best)
            .map(|(sigma, _)| sigma)
            .collect();
        Ok(OrderingOptimum {
            best_orderings,
            tail: best,
        })
    }
}

fn is_permutation(sigma: &[usize], n: usize) -> bool {
    if sigma.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &s in sigma {
        if s >= n || seen[s] {
            return false;
        }
        seen[s] = true;
    }
    true
}

/// All permutations of 0..n in lexicographic order.
pub(crate) fn permutations_lex(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = (0..n).collect::<Vec<_>>();
    loop {
        out.push(cur.clone());
        // next_permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}
