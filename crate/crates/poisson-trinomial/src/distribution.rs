//! Core model and pmf for sums of independent {0, 1/2, 1}-valued trials.
//!
//! Trial `i` scores 1 with probability `win`, 1/2 with probability `tie`, and
//! 0 with probability `loss = 1 - tie - win`. The sum `X` of `n` trials is
//! carried on the doubled lattice `h = 2X`, so a pmf has `2n + 1` entries and
//! no rounding is spent on representing half-integers.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Inputs may miss the probability simplex by at most this much before they
/// are rejected instead of clamped.
pub const SIMPLEX_SLACK: f64 = 1e-12;

/// Relative window for reporting tied modes.
pub const MODE_TIE_RELATIVE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// A trial parameter failed validation; `index` names the trial.
    InvalidTrial { index: usize, reason: TrialError },
    /// A model must contain at least one trial.
    Empty,
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::InvalidTrial { index, reason } => {
                write!(f, "trials[{index}]: {reason}")
            }
            ModelError::Empty => write!(f, "model must contain at least one trial"),
        }
    }
}

impl std::error::Error for ModelError {}

#[derive(Debug, Clone, PartialEq)]
pub enum TrialError {
    NotFinite { field: &'static str, value: f64 },
    Negative { field: &'static str, value: f64 },
    MassExceedsOne { sum: f64 },
}

impl fmt::Display for TrialError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrialError::NotFinite { field, value } => {
                write!(f, "{field} = {value} is not finite")
            }
            TrialError::Negative { field, value } => {
                write!(f, "{field} = {value:e} is below 0 by more than {SIMPLEX_SLACK:e}")
            }
            TrialError::MassExceedsOne { sum } => {
                write!(
                    f,
                    "tie + win = {sum:.17} exceeds 1 by more than {SIMPLEX_SLACK:e}"
                )
            }
        }
    }
}

impl std::error::Error for TrialError {}

/// Outcome probabilities of a single trial.
///
/// `loss` is always computed as `1 - tie - win`; it is never supplied
/// independently, so the triple sits on the simplex by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialParams {
    tie: f64,
    win: f64,
    loss: f64,
}

impl TrialParams {
    /// Validates and clamps `(tie, win)`.
    ///
    /// Values within [`SIMPLEX_SLACK`] of the simplex are clamped exactly onto
    /// it; anything farther out is an error.
    pub fn new(tie: f64, win: f64) -> Result<Self, TrialError> {
        for (field, value) in [("t", tie), ("w", win)] {
            if !value.is_finite() {
                return Err(TrialError::NotFinite { field, value });
            }
            if value < -SIMPLEX_SLACK {
                return Err(TrialError::Negative { field, value });
            }
        }
        let tie = tie.clamp(0.0, 1.0);
        let win = win.max(0.0);
        if tie + win > 1.0 + SIMPLEX_SLACK {
            return Err(TrialError::MassExceedsOne { sum: tie + win });
        }
        let win = win.min(1.0 - tie);
        let loss = 1.0 - tie - win;
        Ok(Self { tie, win, loss })
    }

    pub fn tie(&self) -> f64 {
        self.tie
    }

    pub fn win(&self) -> f64 {
        self.win
    }

    pub fn loss(&self) -> f64 {
        self.loss
    }

    /// True when the tie probability is exactly 0 or exactly 1. The check is
    /// structural on purpose: thresholding would misclassify tiny-tie trials.
    pub fn is_tie_degenerate(&self) -> bool {
        self.tie == 0.0 || self.tie == 1.0
    }
}

/// A sequence of independent trials; the law of their summed score.
#[derive(Debug, Clone, PartialEq)]
pub struct TrinomialModel {
    trials: Vec<TrialParams>,
}

impl TrinomialModel {
    pub fn new(trials: Vec<TrialParams>) -> Result<Self, ModelError> {
        if trials.is_empty() {
            return Err(ModelError::Empty);
        }
        Ok(Self { trials })
    }

    /// Builds a model from `(tie, win)` pairs, naming the offending trial on
    /// failure.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self, ModelError> {
        let trials = pairs
            .iter()
            .enumerate()
            .map(|(index, &(t, w))| {
                TrialParams::new(t, w).map_err(|reason| ModelError::InvalidTrial { index, reason })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(trials)
    }

    pub fn n(&self) -> usize {
        self.trials.len()
    }

    pub fn trials(&self) -> &[TrialParams] {
        &self.trials
    }

    /// Exact-support pmf of `2X` via left-to-right convolution.
    ///
    /// The iteration order and the order of the three additions per entry are
    /// fixed so repeated runs are bit-identical.
    pub fn pmf(&self) -> HalfLatticePMF {
        HalfLatticePMF {
            n: self.trials.len(),
            probs: convolve_trials(&self.trials),
        }
    }

    /// mu = sum of (win + tie/2).
    pub fn mean(&self) -> f64 {
        let mut mu = 0.0;
        for t in &self.trials {
            mu += t.win + t.tie / 2.0;
        }
        mu
    }

    /// a = product of (1 - 2 tie); equals E[(-1)^(2X)].
    pub fn alternating_a(&self) -> f64 {
        let mut a = 1.0;
        for t in &self.trials {
            a *= 1.0 - 2.0 * t.tie;
        }
        a
    }

    /// b = sum over i of (win_i - tie_i/2) * prod_{j != i} (1 - 2 tie_j);
    /// equals E[X (-1)^(2X)].
    pub fn alternating_b(&self) -> f64 {
        let loo = leave_one_out_products(&self.alternating_factors());
        let mut b = 0.0;
        for (t, rest) in self.trials.iter().zip(&loo) {
            b += (t.win - t.tie / 2.0) * rest;
        }
        b
    }

    /// The quantity `b - a*mu` in its two algebraically equal forms. The
    /// direct form subtracts the two moments; the product form is
    /// sum of tie_i (win_i - loss_i) prod_{j != i} (1 - 2 tie_j),
    /// which is numerically stable when `b` and `a*mu` nearly cancel.
    pub fn b_minus_a_mu(&self) -> BMinusAMu {
        let direct = self.alternating_b() - self.alternating_a() * self.mean();
        let loo = leave_one_out_products(&self.alternating_factors());
        let mut product_form = 0.0;
        for (t, rest) in self.trials.iter().zip(&loo) {
            product_form += t.tie * (t.win - t.loss) * rest;
        }
        BMinusAMu {
            direct,
            product_form,
        }
    }

    /// First-moment summary: mean, the alternating moments, parity masses,
    /// and the conditional means where the conditioning event has positive
    /// probability.
    ///
    /// Presence of `mu_even` / `mu_odd` is decided structurally (see
    /// [`TrinomialModel::detect_degenerate`]), never by thresholding the
    /// floating-point masses.
    pub fn moment_report(&self) -> MomentReport {
        let mu = self.mean();
        let a = self.alternating_a();
        let b = self.alternating_b();
        let (even_occupied, odd_occupied) = match self.detect_degenerate() {
            None => (true, true),
            Some(form) => {
                let ties = self.n() - form.k;
                (ties % 2 == 0, ties % 2 == 1)
            }
        };
        MomentReport {
            mu,
            a,
            b,
            b_minus_a_mu: b - a * mu,
            mass_even: (1.0 + a) / 2.0,
            mass_odd: (1.0 - a) / 2.0,
            mu_even: even_occupied.then(|| (mu + b) / (1.0 + a)),
            mu_odd: odd_occupied.then(|| (mu - b) / (1.0 - a)),
        }
    }

    /// True when every tie probability is exactly 0 or exactly 1, i.e. the
    /// score is supported on a single parity class.
    pub fn is_degenerate(&self) -> bool {
        self.trials.iter().all(TrialParams::is_tie_degenerate)
    }

    /// When the model is degenerate, returns its Bernoulli reduction: the
    /// certain ties contribute a fixed shift of (n - k)/2 and the k tie-free
    /// trials form an ordinary Poisson binomial with success probabilities
    /// `bernoulli_probs`.
    pub fn detect_degenerate(&self) -> Option<DegenerateForm> {
        if !self.is_degenerate() {
            return None;
        }
        let bernoulli_probs: Vec<f64> = self
            .trials
            .iter()
            .filter(|t| t.tie == 0.0)
            .map(|t| t.win)
            .collect();
        let k = bernoulli_probs.len();
        Some(DegenerateForm {
            k,
            shift: (self.n() - k) as f64 / 2.0,
            bernoulli_probs,
        })
    }

    fn alternating_factors(&self) -> Vec<f64> {
        self.trials.iter().map(|t| 1.0 - 2.0 * t.tie).collect()
    }
}

/// Convolves trial laws left to right on the doubled lattice. An empty slice
/// yields the point mass at 0.
pub(crate) fn convolve_trials(trials: &[TrialParams]) -> Vec<f64> {
    let mut cur = vec![0.0; 2 * trials.len() + 1];
    let mut next = cur.clone();
    cur[0] = 1.0;
    let mut len = 1usize;
    for t in trials {
        let (l, ti, w) = (t.loss, t.tie, t.win);
        for h in 0..len + 2 {
            let mut p = if h < len { l * cur[h] } else { 0.0 };
            if h >= 1 && h - 1 < len {
                p += ti * cur[h - 1];
            }
            if h >= 2 && h - 2 < len {
                p += w * cur[h - 2];
            }
            next[h] = p;
        }
        len += 2;
        std::mem::swap(&mut cur, &mut next);
    }
    cur.truncate(len);
    cur
}

/// Products over all indices but one, formed from prefix and suffix products
/// so each entry uses a fixed multiplication order.
fn leave_one_out_products(factors: &[f64]) -> Vec<f64> {
    let n = factors.len();
    let mut prefix = vec![1.0; n + 1];
    for (i, &f) in factors.iter().enumerate() {
        prefix[i + 1] = prefix[i] * f;
    }
    let mut suffix = vec![1.0; n + 1];
    for (i, &f) in factors.iter().enumerate().rev() {
        suffix[i] = f * suffix[i + 1];
    }
    (0..n).map(|i| prefix[i] * suffix[i + 1]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BMinusAMu {
    /// b - a*mu evaluated by subtraction.
    pub direct: f64,
    /// The cancellation-free product form of the same quantity.
    pub product_form: f64,
}

/// Probability mass function of `2X` on `{0, 1, ..., 2n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfLatticePMF {
    n: usize,
    probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PmfError {
    LengthMismatch { n: usize, len: usize },
    NegativeEntry { index: usize, value: f64 },
    MassNotOne { sum: f64 },
}

impl fmt::Display for PmfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PmfError::LengthMismatch { n, len } => {
                write!(f, "probs: expected 2n+1 = {} entries, got {len}", 2 * n + 1)
            }
            PmfError::NegativeEntry { index, value } => {
                write!(f, "probs[{index}] = {value:e} is negative")
            }
            PmfError::MassNotOne { sum } => {
                write!(f, "probs sum to {sum:.17}, not 1 within {SIMPLEX_SLACK:e}")
            }
        }
    }
}

impl std::error::Error for PmfError {}

impl HalfLatticePMF {
    /// Validating constructor for externally supplied pmfs.
    pub fn from_parts(n: usize, probs: Vec<f64>) -> Result<Self, PmfError> {
        if probs.len() != 2 * n + 1 {
            return Err(PmfError::LengthMismatch {
                n,
                len: probs.len(),
            });
        }
        for (index, &value) in probs.iter().enumerate() {
            if !(value >= 0.0) {
                return Err(PmfError::NegativeEntry { index, value });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_SLACK {
            return Err(PmfError::MassNotOne { sum });
        }
        Ok(Self { n, probs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `probs()[h]` is P(2X = h).
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// P(2X = h), with 0 outside the lattice. Accepts signed indices so
    /// shifted lookups need no bounds arithmetic at the call site.
    pub fn prob_at_doubled(&self, h: i64) -> f64 {
        if h < 0 || h as usize >= self.probs.len() {
            0.0
        } else {
            self.probs[h as usize]
        }
    }

    /// P(2X >= k2), summed from the top of the lattice down.
    pub fn tail_from_doubled(&self, k2: usize) -> f64 {
        let mut s = 0.0;
        for h in (k2..self.probs.len()).rev() {
            s += self.probs[h];
        }
        s
    }

    /// Mean of X recomputed from the lattice, sum of (h/2) * probs[h].
    pub fn lattice_mean(&self) -> f64 {
        let mut s = 0.0;
        for (h, &p) in self.probs.iter().enumerate() {
            s += (h as f64 / 2.0) * p;
        }
        s
    }

    /// E[(-1)^(2X)] recomputed from the lattice.
    pub fn lattice_alternating_a(&self) -> f64 {
        let mut s = 0.0;
        for (h, &p) in self.probs.iter().enumerate() {
            s += if h % 2 == 0 { p } else { -p };
        }
        s
    }

    /// E[X (-1)^(2X)] recomputed from the lattice.
    pub fn lattice_alternating_b(&self) -> f64 {
        let mut s = 0.0;
        for (h, &p) in self.probs.iter().enumerate() {
            let signed = if h % 2 == 0 { p } else { -p };
            s += (h as f64 / 2.0) * signed;
        }
        s
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// First and alternating moments plus conditional means given score parity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub b_minus_a_mu: f64,
    pub mass_even: f64,
    pub mass_odd: f64,
    /// Mean of X given X integer; absent when that event has probability 0.
    pub mu_even: Option<f64>,
    /// Mean of X given X half-integer; absent when that event has
    /// probability 0.
    pub mu_odd: Option<f64>,
}

/// Bernoulli reduction of a model whose ties are all certain or impossible.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegenerateForm {
    /// Number of trials with tie probability exactly 0.
    pub k: usize,
    /// Deterministic contribution (n - k)/2 of the certain ties.
    pub shift: f64,
    /// Win probabilities of the k tie-free trials.
    pub bernoulli_probs: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(pairs: &[(f64, f64)]) -> TrinomialModel {
        TrinomialModel::from_pairs(pairs).unwrap()
    }

    #[test]
    fn symmetric_trial_pmf() {
        let pmf = model(&[(0.5, 0.25)]).pmf();
        assert_eq!(pmf.probs(), &[0.25, 0.5, 0.25]);
    }

    #[test]
    fn two_symmetric_trials_pmf() {
        let pmf = model(&[(0.5, 0.25), (0.5, 0.25)]).pmf();
        assert_eq!(pmf.probs(), &[0.0625, 0.25, 0.375, 0.25, 0.0625]);
    }

    #[test]
    fn no_tie_trials_leave_odd_lattice_empty() {
        let pmf = model(&[(0.0, 0.5), (0.0, 0.5)]).pmf();
        assert_eq!(pmf.probs(), &[0.25, 0.0, 0.5, 0.0, 0.25]);
    }

    #[test]
    fn pmf_of_empty_trial_slice_is_point_mass() {
        assert_eq!(convolve_trials(&[]), vec![1.0]);
    }

    #[test]
    fn mean_adds_win_and_half_tie() {
        assert_eq!(model(&[(0.5, 0.25)]).mean(), 0.5);
        let m = model(&[(0.2, 0.5), (0.0, 0.0)]);
        assert!((m.mean() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn alternating_a_is_product_of_tie_factors() {
        let m = model(&[(0.2, 0.5), (0.0, 0.0)]);
        assert!((m.alternating_a() - 0.6).abs() < 1e-15);
        let all_ties = model(&[(1.0, 0.0), (1.0, 0.0), (1.0, 0.0)]);
        assert_eq!(all_ties.alternating_a(), -1.0);
    }

    #[test]
    fn alternating_b_weights_each_trial_by_the_others() {
        let m = model(&[(0.2, 0.5), (0.0, 0.0)]);
        assert!((m.alternating_b() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn b_minus_a_mu_forms_agree() {
        let m = model(&[(0.2, 0.5)]);
        let v = m.b_minus_a_mu();
        assert!((v.direct - 0.04).abs() < 1e-15);
        assert!((v.product_form - 0.04).abs() < 1e-15);
        assert!((v.direct - v.product_form).abs() <= 1e-12);
    }

    #[test]
    fn moment_report_single_trial() {
        let r = model(&[(0.2, 0.5)]).moment_report();
        assert!((r.mu - 0.6).abs() < 1e-15);
        assert!((r.mass_even - 0.8).abs() < 1e-15);
        assert!((r.mass_odd - 0.2).abs() < 1e-15);
        assert!((r.mu_even.unwrap() - 0.625).abs() < 1e-15);
        assert!((r.mu_odd.unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn moment_report_omits_empty_parity() {
        let r = model(&[(1.0, 0.0)]).moment_report();
        assert_eq!(r.mass_odd, 1.0);
        assert_eq!(r.mu_even, None);
        assert_eq!(r.mu_odd, Some(0.5));

        let r = model(&[(0.0, 0.3)]).moment_report();
        assert_eq!(r.mass_even, 1.0);
        assert_eq!(r.mu_odd, None);
        assert!((r.mu_even.unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn tiny_tie_is_not_degenerate() {
        let m = model(&[(1e-8, 0.4)]);
        assert!(!m.is_degenerate());
        let r = m.moment_report();
        assert!(r.mu_even.is_some());
        assert!(r.mu_odd.is_some());
        assert!(r.mu_odd.unwrap().is_finite());
    }

    #[test]
    fn detect_degenerate_splits_shift_and_bernoulli_part() {
        let form = model(&[(0.0, 0.5), (0.0, 0.3), (1.0, 0.0)])
            .detect_degenerate()
            .unwrap();
        assert_eq!(form.k, 2);
        assert_eq!(form.shift, 0.5);
        assert_eq!(form.bernoulli_probs, vec![0.5, 0.3]);
    }

    #[test]
    fn all_ties_is_a_point_mass() {
        let m = model(&[(1.0, 0.0), (1.0, 0.0)]);
        let form = m.detect_degenerate().unwrap();
        assert_eq!(form.k, 0);
        assert_eq!(form.shift, 1.0);
        assert_eq!(m.pmf().probs(), &[0.0, 0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn half_tie_model_is_not_degenerate() {
        assert_eq!(model(&[(0.5, 0.25)]).detect_degenerate(), None);
    }

    #[test]
    fn clamps_within_slack_and_rejects_beyond() {
        let t = TrialParams::new(-5e-13, 0.5).unwrap();
        assert_eq!(t.tie(), 0.0);
        assert_eq!(t.win(), 0.5);
        assert_eq!(t.loss(), 0.5);

        let t = TrialParams::new(0.4, 0.6 + 5e-13).unwrap();
        assert_eq!(t.tie() + t.win() + t.loss(), 1.0);
        assert_eq!(t.loss(), 0.0);

        match TrinomialModel::from_pairs(&[(0.5, 0.25), (0.6, 0.6)]) {
            Err(ModelError::InvalidTrial { index: 1, reason }) => {
                assert!(matches!(reason, TrialError::MassExceedsOne { .. }));
            }
            other => panic!("expected trial 1 rejection, got {other:?}"),
        }

        match TrinomialModel::from_pairs(&[(-1e-9, 0.2)]) {
            Err(ModelError::InvalidTrial { index: 0, reason }) => {
                assert!(matches!(reason, TrialError::Negative { field: "t", .. }));
            }
            other => panic!("expected trial 0 rejection, got {other:?}"),
        }
    }

    #[test]
    fn empty_model_is_rejected() {
        assert_eq!(TrinomialModel::from_pairs(&[]), Err(ModelError::Empty));
    }

    #[test]
    fn nan_input_is_rejected() {
        match TrinomialModel::from_pairs(&[(f64::NAN, 0.2)]) {
            Err(ModelError::InvalidTrial { index: 0, reason }) => {
                assert!(matches!(reason, TrialError::NotFinite { field: "t", .. }));
            }
            other => panic!("expected NaN rejection, got {other:?}"),
        }
    }

    #[test]
    fn loss_follows_construction_rule() {
        let t = TrialParams::new(0.2, 0.5).unwrap();
        assert_eq!(t.loss(), 1.0 - t.tie() - t.win());
    }

    #[test]
    fn pmf_from_parts_validates() {
        assert!(HalfLatticePMF::from_parts(1, vec![0.25, 0.5, 0.25]).is_ok());
        assert!(matches!(
            HalfLatticePMF::from_parts(1, vec![0.5, 0.5]),
            Err(PmfError::LengthMismatch { .. })
        ));
        assert!(matches!(
            HalfLatticePMF::from_parts(1, vec![0.5, 0.6, -0.1]),
            Err(PmfError::NegativeEntry { index: 2, .. })
        ));
        assert!(matches!(
            HalfLatticePMF::from_parts(1, vec![0.5, 0.5, 0.5]),
            Err(PmfError::MassNotOne { .. })
        ));
    }

    #[test]
    fn tail_and_point_lookups() {
        let pmf = model(&[(0.5, 0.25), (0.5, 0.25)]).pmf();
        assert_eq!(pmf.tail_from_doubled(0), pmf.total_mass());
        assert!((pmf.tail_from_doubled(3) - 0.3125).abs() < 1e-15);
        assert_eq!(pmf.prob_at_doubled(-1), 0.0);
        assert_eq!(pmf.prob_at_doubled(5), 0.0);
        assert_eq!(pmf.prob_at_doubled(2), pmf.probs()[2]);
    }

    mod properties {
        use super::*;
        use crate::testutil::grid_model_strategy;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(256))]

            #[test]
            fn pmf_is_a_distribution(case in grid_model_strategy(1..=10)) {
                let pmf = case.model.pmf();
                prop_assert!(pmf.probs().iter().all(|&p| p >= 0.0));
                prop_assert!((pmf.total_mass() - 1.0).abs() <= 1e-12);
            }

            #[test]
            fn moments_match_lattice_sums(case in grid_model_strategy(1..=12)) {
                let m = &case.model;
                let pmf = m.pmf();
                prop_assert!((m.mean() - pmf.lattice_mean()).abs() <= 1e-10);
                prop_assert!((m.alternating_a() - pmf.lattice_alternating_a()).abs() <= 1e-10);
                prop_assert!((m.alternating_b() - pmf.lattice_alternating_b()).abs() <= 1e-10);
            }

            #[test]
            fn b_minus_a_mu_is_small_and_consistent(case in grid_model_strategy(1..=12)) {
                let m = &case.model;
                let v = m.b_minus_a_mu();
                let a = m.alternating_a();
                prop_assert!((v.direct - v.product_form).abs() <= 1e-12);
                prop_assert!(v.product_form.abs() <= (1.0 - a.abs()) / 2.0 + 1e-12);
            }

            #[test]
            fn conditional_means_stay_near_mean(case in grid_model_strategy(1..=12)) {
                let r = case.model.moment_report();
                if let Some(mu_even) = r.mu_even {
                    prop_assert!((mu_even - r.mu).abs() <= 0.5 + 1e-9);
                }
                if let Some(mu_odd) = r.mu_odd {
                    prop_assert!((mu_odd - r.mu).abs() <= 0.5 + 1e-9);
                }
                if let (Some(e), Some(o)) = (r.mu_even, r.mu_odd) {
                    prop_assert!((e - o).abs() <= 1.0 + 1e-9);
                }
            }
        }
    }
}
