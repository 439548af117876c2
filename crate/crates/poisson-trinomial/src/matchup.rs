//! Lineup optimization for team match play.
//!
//! Each of n matches pits A's player i against B's player sigma(i) and is
//! scored 1 / 1/2 / 0 for a win / tie / loss. Win probability is affine in
//! the strength differential: W = alpha (b - a) + beta, L = beta - alpha
//! (b - a), T = 1 - 2 beta. Team A picks sigma to maximize P(X >= k).
//!
//! The mean score does not depend on sigma, so the choice is a pure tail
//! effect. Swapping two opponents changes the tail by
//! -alpha^2 (a_i - a_j)(b_sigma(i) - b_sigma(j)) times a residual statistic
//! of the remaining matches; summing swap effects yields threshold regimes
//! in which strongest-vs-strongest (or strongest-vs-weakest) is exactly
//! optimal. Between the thresholds the optimum genuinely depends on the
//! instance, and only search settles it.

use serde::Serialize;
use std::fmt;

use crate::distribution::{convolve_trials, TrialParams, TrinomialModel};
use crate::par;

/// Largest n optimize_search will enumerate all n! lineups for.
pub const EXHAUSTIVE_CAP: usize = 9;

/// Tail probabilities within this absolute window of the maximum are
/// reported as tied optima.
pub const TAIL_TIE_ABSOLUTE: f64 = 1e-12;

/// Theorem thresholds closer to k than this are flagged as borderline.
pub const BOUNDARY_WINDOW: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum MatchupError {
    BadAlpha { value: f64 },
    BadBeta { value: f64 },
    EmptyTeam,
    BadStrength { index: usize, value: f64 },
    /// strengths[index] < strengths[index + 1]; teams are listed strongest
    /// first.
    UnsortedTeam { index: usize },
    SizeMismatch { team_a: usize, team_b: usize },
    /// Some pairing's win or loss probability leaves [0, 1].
    DomainViolation {
        a_strength: f64,
        b_strength: f64,
        win: f64,
        loss: f64,
    },
    NotAPermutation { lineup: Vec<usize> },
    LineupSize { expected: usize, got: usize },
    MatchIndex { index: usize, n: usize },
    /// k2 must lie in {0, 1, ..., 2n}.
    ThresholdOutOfRange { k2: i64, max: i64 },
    SizeExceeded { n: usize, cap: usize },
}

impl fmt::Display for MatchupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatchupError::BadAlpha { value } => {
                write!(f, "alpha = {value} must be a finite positive number")
            }
            MatchupError::BadBeta { value } => {
                write!(f, "beta = {value} must lie in (0, 0.5]")
            }
            MatchupError::EmptyTeam => write!(f, "teams must have at least one player"),
            MatchupError::BadStrength { index, value } => {
                write!(f, "strengths[{index}] = {value} is not finite")
            }
            MatchupError::UnsortedTeam { index } => write!(
                f,
                "strengths[{index}] is weaker than strengths[{}]; list players strongest first",
                index + 1
            ),
            MatchupError::SizeMismatch { team_a, team_b } => {
                write!(f, "team sizes differ: {team_a} vs {team_b}")
            }
            MatchupError::DomainViolation {
                a_strength,
                b_strength,
                win,
                loss,
            } => write!(
                f,
                "strength pair (a = {a_strength}, b = {b_strength}) leaves the model domain: \
                 w = {win}, l = {loss}"
            ),
            MatchupError::NotAPermutation { lineup } => {
                write!(f, "lineup {lineup:?} is not a permutation of 0..{}", lineup.len())
            }
            MatchupError::LineupSize { expected, got } => {
                write!(f, "lineup has {got} entries, instance has {expected} matches")
            }
            MatchupError::MatchIndex { index, n } => {
                write!(f, "match index {index} is outside 0..{n}")
            }
            MatchupError::ThresholdOutOfRange { k2, max } => {
                write!(f, "k2 = {k2} is outside the half-integer grid 0..={max}")
            }
            MatchupError::SizeExceeded { n, cap } => {
                write!(f, "exhaustive search over {n}! lineups exceeds the cap n <= {cap}")
            }
        }
    }
}

impl std::error::Error for MatchupError {}

/// The affine win/loss model. alpha is the strength sensitivity, beta the
/// win probability between equal players; ties occur with 1 - 2 beta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearModel {
    alpha: f64,
    beta: f64,
}

impl LinearModel {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, MatchupError> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(MatchupError::BadAlpha { value: alpha });
        }
        if !beta.is_finite() || beta <= 0.0 || beta > 0.5 {
            return Err(MatchupError::BadBeta { value: beta });
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Tie probability shared by every pairing.
    pub fn tie(&self) -> f64 {
        1.0 - 2.0 * self.beta
    }

    /// Trial for A's player of strength `a` against B's player of strength
    /// `b`. Both the win and the loss probability must stay in [0, 1].
    pub fn trial_from_strengths(&self, a: f64, b: f64) -> Result<TrialParams, MatchupError> {
        let d = b - a;
        let win = self.alpha * d + self.beta;
        let loss = self.beta - self.alpha * d;
        if !(win >= 0.0) || win > 1.0 || !(loss >= 0.0) {
            return Err(MatchupError::DomainViolation {
                a_strength: a,
                b_strength: b,
                win,
                loss,
            });
        }
        Ok(TrialParams::new(self.tie(), win).expect("within simplex slack by construction"))
    }
}

/// Player strengths, strongest first.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Team {
    strengths: Vec<f64>,
}

impl Team {
    pub fn new(strengths: Vec<f64>) -> Result<Self, MatchupError> {
        if strengths.is_empty() {
            return Err(MatchupError::EmptyTeam);
        }
        for (index, &value) in strengths.iter().enumerate() {
            if !value.is_finite() {
                return Err(MatchupError::BadStrength { index, value });
            }
        }
        if let Some(index) = (0..strengths.len() - 1).find(|&i| strengths[i] < strengths[i + 1]) {
            return Err(MatchupError::UnsortedTeam { index });
        }
        Ok(Self { strengths })
    }

    pub fn len(&self) -> usize {
        self.strengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strengths.is_empty()
    }

    pub fn strengths(&self) -> &[f64] {
        &self.strengths
    }
}

/// An assignment of opponents: A's player i faces B's player `0-based
/// sigma[i]`. Always a permutation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Lineup(Vec<usize>);

impl Lineup {
    pub fn new(sigma: Vec<usize>) -> Result<Self, MatchupError> {
        let n = sigma.len();
        let mut seen = vec![false; n];
        for &s in &sigma {
            if s >= n || seen[s] {
                return Err(MatchupError::NotAPermutation { lineup: sigma });
            }
            seen[s] = true;
        }
        Ok(Self(sigma))
    }

    /// Strongest vs strongest: sigma(i) = i.
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Strongest vs weakest: sigma(i) = n - 1 - i.
    pub fn reversed(n: usize) -> Self {
        Self((0..n).rev().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// The lineup with opponents of matches i and j exchanged.
    pub fn swapped(&self, i: usize, j: usize) -> Self {
        let mut sigma = self.0.clone();
        sigma.swap(i, j);
        Self(sigma)
    }
}

/// Theorem verdict for one instance and threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Decision {
    /// k clears the upper threshold: the identity lineup is optimal.
    StrongVsStrong,
    /// k is below the lower threshold: the reversed lineup is optimal.
    StrongVsWeak,
    /// k falls strictly between the thresholds; the theorem is silent and
    /// either lineup (or neither) may win.
    IndeterminateBand { lo: f64, hi: f64 },
}

impl Decision {
    /// The lineup the decision asserts optimal, if it asserts one.
    pub fn predicted_lineup(&self, n: usize) -> Option<Lineup> {
        match self {
            Decision::StrongVsStrong => Some(Lineup::identity(n)),
            Decision::StrongVsWeak => Some(Lineup::reversed(n)),
            Decision::IndeterminateBand { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremVerdict {
    /// Mean score, identical for every lineup.
    pub mu: f64,
    /// Threshold on the score lattice, k2 / 2.
    pub k: f64,
    pub decision: Decision,
    /// True when k sits within [`BOUNDARY_WINDOW`] of a threshold, where
    /// float rounding could flip the regime.
    pub near_boundary: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchStrategy {
    /// Evaluate every lineup (n <= [`EXHAUSTIVE_CAP`]); report all tails
    /// within [`TAIL_TIE_ABSOLUTE`] of the maximum.
    Exhaustive,
    /// Directed inversion sort over adjacent opponent swaps from `start`
    /// (identity when absent). The sign of the residual statistic picks the
    /// target order (descending opposing strengths toward identity,
    /// ascending toward reversal); each step applies the directed swap with
    /// the largest non-negative closed-form tail change, taking the lowest
    /// index on ties, until none remains. Reports the reached lineup only.
    LocalSearch { start: Option<Lineup> },
}

/// Result of a lineup search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome {
    /// Optimal lineups in lexicographic order. Exhaustive search lists every
    /// tie; local search lists the single lineup it stopped at.
    pub best: Vec<Lineup>,
    /// P(X >= k) at the optimum.
    pub tail: f64,
    /// Number of tail evaluations performed.
    pub evaluations: usize,
}

/// One instance of the lineup problem: model, both teams, and the doubled
/// threshold k2 = 2k.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchupInstance {
    model: LinearModel,
    team_a: Team,
    team_b: Team,
    k2: i64,
}

impl MatchupInstance {
    /// Validates sizes and that all n^2 possible pairings stay inside the
    /// model domain, so every lineup yields a valid trial sequence.
    pub fn new(
        model: LinearModel,
        team_a: Team,
        team_b: Team,
        k2: i64,
    ) -> Result<Self, MatchupError> {
        if team_a.len() != team_b.len() {
            return Err(MatchupError::SizeMismatch {
                team_a: team_a.len(),
                team_b: team_b.len(),
            });
        }
        let max = 2 * team_a.len() as i64;
        if k2 < 0 || k2 > max {
            return Err(MatchupError::ThresholdOutOfRange { k2, max });
        }
        for &a in team_a.strengths() {
            for &b in team_b.strengths() {
                model.trial_from_strengths(a, b)?;
            }
        }
        Ok(Self {
            model,
            team_a,
            team_b,
            k2,
        })
    }

    /// The same instance with a different threshold.
    pub fn with_threshold(&self, k2: i64) -> Result<Self, MatchupError> {
        let max = 2 * self.n() as i64;
        if k2 < 0 || k2 > max {
            return Err(MatchupError::ThresholdOutOfRange { k2, max });
        }
        Ok(Self { k2, ..self.clone() })
    }

    pub fn n(&self) -> usize {
        self.team_a.len()
    }

    pub fn model(&self) -> &LinearModel {
        &self.model
    }

    pub fn team_a(&self) -> &Team {
        &self.team_a
    }

    pub fn team_b(&self) -> &Team {
        &self.team_b
    }

    pub fn k2(&self) -> i64 {
        self.k2
    }

    /// Threshold on the score lattice.
    pub fn k(&self) -> f64 {
        self.k2 as f64 / 2.0
    }

    fn check_lineup(&self, lineup: &Lineup) -> Result<(), MatchupError> {
        if lineup.len() != self.n() {
            return Err(MatchupError::LineupSize {
                expected: self.n(),
                got: lineup.len(),
            });
        }
        Ok(())
    }

    fn trials(&self, lineup: &Lineup) -> Vec<TrialParams> {
        lineup
            .as_slice()
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                self.model
                    .trial_from_strengths(self.team_a.strengths()[i], self.team_b.strengths()[s])
                    .expect("instance domain validated pairwise")
            })
            .collect()
    }

    /// Score distribution under `lineup`.
    pub fn lineup_model(&self, lineup: &Lineup) -> Result<TrinomialModel, MatchupError> {
        self.check_lineup(lineup)?;
        Ok(TrinomialModel::new(self.trials(lineup)).expect("teams are non-empty"))
    }

    /// E[X] = n/2 + alpha (sum of b strengths - sum of a strengths); no
    /// lineup enters.
    pub fn expected_score(&self) -> f64 {
        let sum_a: f64 = self.team_a.strengths().iter().sum();
        let sum_b: f64 = self.team_b.strengths().iter().sum();
        self.n() as f64 / 2.0 + self.model.alpha * (sum_b - sum_a)
    }

    /// P(X >= k) under `lineup`.
    pub fn tail_probability(&self, lineup: &Lineup) -> Result<f64, MatchupError> {
        self.check_lineup(lineup)?;
        let pmf = convolve_trials(&self.trials(lineup));
        Ok(tail_at(&pmf, self.k2))
    }

    /// -alpha^2 (a_i - a_j)(b_sigma(i) - b_sigma(j)): the factor by which a
    /// swap of the opponents in matches i and j moves the tail.
    pub fn swap_delta(&self, lineup: &Lineup, i: usize, j: usize) -> Result<f64, MatchupError> {
        self.check_lineup(lineup)?;
        let n = self.n();
        for index in [i, j] {
            if index >= n {
                return Err(MatchupError::MatchIndex { index, n });
            }
        }
        let a = self.team_a.strengths();
        let b = self.team_b.strengths();
        let sigma = lineup.as_slice();
        Ok(-self.model.alpha * self.model.alpha * (a[i] - a[j]) * (b[sigma[i]] - b[sigma[j]]))
    }

    /// The tail-difference statistic of the residual score Y (matches i and
    /// j removed):
    ///
    /// (P(Y = k-2) - P(Y = k-1)) + (P(Y = k-3/2) - P(Y = k-1/2)).
    ///
    /// Exchanging the opponents of matches i and j changes P(X >= k) by
    /// exactly swap_delta times this value.
    pub fn residual_statistic(
        &self,
        lineup: &Lineup,
        i: usize,
        j: usize,
    ) -> Result<f64, MatchupError> {
        self.check_lineup(lineup)?;
        let n = self.n();
        for index in [i, j] {
            if index >= n {
                return Err(MatchupError::MatchIndex { index, n });
            }
        }
        let trials: Vec<TrialParams> = self
            .trials(lineup)
            .into_iter()
            .enumerate()
            .filter(|&(m, _)| m != i && m != j)
            .map(|(_, t)| t)
            .collect();
        let y = convolve_trials(&trials);
        let at = |h: i64| {
            if h < 0 || h as usize >= y.len() {
                0.0
            } else {
                y[h as usize]
            }
        };
        let k2 = self.k2;
        Ok((at(k2 - 4) - at(k2 - 2)) + (at(k2 - 3) - at(k2 - 1)))
    }

    /// Applies the threshold theorem. For beta < 1/2 the identity lineup is
    /// optimal once k >= mu + 5/2 and the reversed lineup once k <= mu - 2;
    /// for beta = 1/2 the thresholds tighten to mu + 2 and mu - 1. Between
    /// them the verdict is an indeterminate band.
    pub fn optimize_by_theorem(&self) -> TheoremVerdict {
        let mu = self.expected_score();
        let k = self.k();
        let (lo, hi) = if self.model.beta == 0.5 {
            (mu - 1.0, mu + 2.0)
        } else {
            (mu - 2.0, mu + 2.5)
        };
        let decision = if k >= hi {
            Decision::StrongVsStrong
        } else if k <= lo {
            Decision::StrongVsWeak
        } else {
            Decision::IndeterminateBand { lo, hi }
        };
        let near_boundary = (k - hi).abs() <= BOUNDARY_WINDOW || (k - lo).abs() <= BOUNDARY_WINDOW;
        TheoremVerdict {
            mu,
            k,
            decision,
            near_boundary,
        }
    }

    /// Searches for tail-optimal lineups.
    pub fn optimize_search(&self, strategy: &SearchStrategy) -> Result<SearchOutcome, MatchupError> {
        match strategy {
            SearchStrategy::Exhaustive => self.search_exhaustive(),
            SearchStrategy::LocalSearch { start } => {
                let start = match start {
                    Some(lineup) => {
                        self.check_lineup(lineup)?;
                        lineup.clone()
                    }
                    None => Lineup::identity(self.n()),
                };
                self.search_local(start)
            }
        }
    }

    fn search_exhaustive(&self) -> Result<SearchOutcome, MatchupError> {
        let n = self.n();
        if n > EXHAUSTIVE_CAP {
            return Err(MatchupError::SizeExceeded {
                n,
                cap: EXHAUSTIVE_CAP,
            });
        }
        let perms = crate::oracle::permutations_lex(n);
        let tails = par::map_indexed(&perms, |_, sigma| {
            let lineup = Lineup(sigma.clone());
            tail_at(&convolve_trials(&self.trials(&lineup)), self.k2)
        });
        let max = tails.iter().fold(f64::NEG_INFINITY, |m, &t| m.max(t));
        let best: Vec<Lineup> = perms
            .into_iter()
            .zip(&tails)
            .filter(|&(_, &t)| t >= max - TAIL_TIE_ABSOLUTE)
            .map(|(sigma, _)| Lineup(sigma))
            .collect();
        Ok(SearchOutcome {
            best,
            tail: max,
            evaluations: tails.len(),
        })
    }

    /// Directed inversion sort. The direction (sort the opposing strengths
    /// descending toward the identity pairing, or ascending toward the
    /// reversal) is fixed up front by the sign of the residual statistic
    /// summed over adjacent pairs. Each round applies the best non-losing
    /// adjacent swap in that direction, judged by the closed-form
    /// swap_delta * residual product: the product is exactly zero when the
    /// swap exchanges equal strengths on either side, so such walls are
    /// crossed instead of trapping the search. Every accepted swap moves the
    /// inversion count one step toward the target order, so the search
    /// terminates within n(n-1)/2 swaps.
    fn search_local(&self, start: Lineup) -> Result<SearchOutcome, MatchupError> {
        let n = self.n();
        let b = self.team_b.strengths();
        let mut current = start;
        let mut evaluations = 0usize;
        let mut aggregate = 0.0;
        for p in 0..n.saturating_sub(1) {
            aggregate += self.residual_statistic(&current, p, p + 1)?;
            evaluations += 1;
        }
        let toward_identity = aggregate >= 0.0;
        loop {
            let mut best_move: Option<(usize, f64)> = None;
            for p in 0..n.saturating_sub(1) {
                let (x, y) = (b[current.0[p]], b[current.0[p + 1]]);
                let directed = if toward_identity { x < y } else { x > y };
                if !directed {
                    continue;
                }
                let delta = self.swap_delta(&current, p, p + 1)?
                    * self.residual_statistic(&current, p, p + 1)?;
                evaluations += 1;
                // Lowest index wins ties, so only strictly better displaces.
                if delta >= 0.0 && best_move.map_or(true, |(_, best)| delta > best) {
                    best_move = Some((p, delta));
                }
            }
            match best_move {
                Some((p, _)) => current.0.swap(p, p + 1),
                None => break,
            }
        }
        let tail = self.tail_probability(&current)?;
        Ok(SearchOutcome {
            best: vec![current],
            tail,
            evaluations: evaluations + 1,
        })
    }
}

/// P(2X >= k2) on a raw doubled-lattice pmf; thresholds below the lattice
/// give the full mass, above it zero.
fn tail_at(pmf: &[f64], k2: i64) -> f64 {
    let lo = k2.max(0) as usize;
    let mut s = 0.0;
    for h in (lo..pmf.len()).rev() {
        s += pmf[h];
    }
    s
}
