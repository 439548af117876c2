//! Parity structure of the score distribution.
//!
//! Writing the pgf of 2X as G(w) = p(w^2) + w q(w^2) splits the law into its
//! integer-score part `p` and half-integer part `q`. Both parts are, after
//! normalization, Poisson binomial laws: their coefficient polynomials have
//! only real nonpositive roots, which this module extracts to exhibit the
//! Bernoulli success probabilities. Log-concavity and the mode structure of
//! both parts follow.

use serde::Serialize;
use std::fmt;

use crate::distribution::{
    DegenerateForm, HalfLatticePMF, MomentReport, TrialParams, TrinomialModel, MODE_TIE_RELATIVE,
};
use crate::realroots::{self, RootError};

/// Reconstruction residual allowed before a factorization is rejected.
pub const FACTOR_RESIDUAL_CAP: f64 = 1e-8;

/// Entries below this are treated as exact zeros when checking support
/// contiguity.
pub const SUPPORT_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Offset of the parity class on the X lattice.
    pub fn offset(self) -> f64 {
        match self {
            Parity::Even => 0.0,
            Parity::Odd => 0.5,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParityError {
    /// The requested parity class carries no probability mass.
    EmptyParity { parity: Parity },
    /// Coefficients fail the nonnegative / finite / not-all-zero contract.
    InvalidCoefficients { detail: String },
    /// No nonpositive-real-rooted factorization reconstructs the input;
    /// the coefficients did not come from a parity part.
    NotRealRooted { best_residual: f64 },
    /// hurwitz_check requires strictly positive loss, tie, and win.
    HypothesisNotMet { field: &'static str, value: f64 },
}

impl fmt::Display for ParityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParityError::EmptyParity { parity } => {
                write!(f, "the {parity} parity class has zero mass")
            }
            ParityError::InvalidCoefficients { detail } => write!(f, "{detail}"),
            ParityError::NotRealRooted { best_residual } => write!(
                f,
                "no real-rooted factorization found (best residual {best_residual:e})"
            ),
            ParityError::HypothesisNotMet { field, value } => {
                write!(f, "{field} = {value} must be strictly positive")
            }
        }
    }
}

impl std::error::Error for ParityError {}

/// Coefficients of p and q: `p_coeffs[k] = P(2X = 2k)`,
/// `q_coeffs[k] = P(2X = 2k + 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParityDecomposition {
    pub p_coeffs: Vec<f64>,
    pub q_coeffs: Vec<f64>,
    pub p_norm: f64,
    pub q_norm: f64,
}

/// Splits a pmf on the doubled lattice by index parity. p gets n+1
/// coefficients, q gets n.
pub fn split_parity(pmf: &HalfLatticePMF) -> ParityDecomposition {
    let probs = pmf.probs();
    let p_coeffs: Vec<f64> = probs.iter().copied().step_by(2).collect();
    let q_coeffs: Vec<f64> = probs.iter().copied().skip(1).step_by(2).collect();
    let p_norm = p_coeffs.iter().sum();
    let q_norm = q_coeffs.iter().sum();
    ParityDecomposition {
        p_coeffs,
        q_coeffs,
        p_norm,
        q_norm,
    }
}

/// A parity class renormalized to a probability distribution, reported on
/// the X lattice: entry k has score `k + offset`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalDistribution {
    pub parity: Parity,
    pub offset: f64,
    pub probs: Vec<f64>,
    /// Scores whose probability is within 1e-12 (relative to the peak) of
    /// the maximum.
    pub modes: Vec<f64>,
    pub mean: f64,
}

/// Normalizes one parity class of `decomp`.
pub fn conditional_pmf(
    decomp: &ParityDecomposition,
    parity: Parity,
) -> Result<ConditionalDistribution, ParityError> {
    let (coeffs, norm) = match parity {
        Parity::Even => (&decomp.p_coeffs, decomp.p_norm),
        Parity::Odd => (&decomp.q_coeffs, decomp.q_norm),
    };
    if norm == 0.0 {
        return Err(ParityError::EmptyParity { parity });
    }
    let probs: Vec<f64> = coeffs.iter().map(|c| c / norm).collect();
    let offset = parity.offset();
    let modes = modes_of(&probs, offset);
    let mut mean = 0.0;
    for (k, &p) in probs.iter().enumerate() {
        mean += k as f64 * p;
    }
    mean += offset;
    Ok(ConditionalDistribution {
        parity,
        offset,
        probs,
        modes,
        mean,
    })
}

fn modes_of(probs: &[f64], offset: f64) -> Vec<f64> {
    let peak = probs.iter().fold(0.0_f64, |m, &p| m.max(p));
    let window = MODE_TIE_RELATIVE * peak;
    probs
        .iter()
        .enumerate()
        .filter(|&(_, &p)| p >= peak - window)
        .map(|(k, _)| k as f64 + offset)
        .collect()
}

/// Outcome of a log-concavity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogConcavity {
    Holds,
    /// `index` is the first k whose triple (k-1, k, k+1) violates
    /// probs[k]^2 >= probs[k-1] probs[k+1] (up to tolerance), or the first
    /// interior zero splitting the support.
    ViolatedAt { index: usize },
}

impl LogConcavity {
    pub fn holds(self) -> bool {
        self == LogConcavity::Holds
    }
}

/// Checks probs[k]^2 >= probs[k-1] probs[k+1] - tol * peak^2 on the interior
/// and that the support (entries above [`SUPPORT_FLOOR`]) is contiguous.
pub fn is_log_concave(probs: &[f64], tol: f64) -> LogConcavity {
    let live = |p: f64| p > SUPPORT_FLOOR;
    let first = probs.iter().position(|&p| live(p));
    let last = probs.iter().rposition(|&p| live(p));
    if let (Some(first), Some(last)) = (first, last) {
        for k in first..=last {
            if !live(probs[k]) {
                return LogConcavity::ViolatedAt { index: k };
            }
        }
    }
    let peak = probs.iter().fold(0.0_f64, |m, &p| m.max(p));
    let slack = tol * peak * peak;
    for k in 1..probs.len().saturating_sub(1) {
        if probs[k] * probs[k] < probs[k - 1] * probs[k + 1] - slack {
            return LogConcavity::ViolatedAt { index: k };
        }
    }
    LogConcavity::Holds
}

/// A parity part exhibited as a Poisson binomial law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoissonBinomialFactorization {
    /// Bernoulli success probabilities, descending; length is the nominal
    /// degree (input length - 1). Roots at 0 appear as 1, missing top
    /// degrees as 0.
    pub success_probs: Vec<f64>,
    /// max |reconstruction - input| / max input.
    pub residual: f64,
}

/// Factors a nonnegative coefficient sequence into Bernoulli factors.
///
/// The input must have a positive sum. On success the product of
/// ((1 - q) + q z) over the reported probabilities, scaled by the input's
/// sum, reproduces the input within [`FACTOR_RESIDUAL_CAP`].
pub fn factor_poisson_binomial(
    coeffs: &[f64],
) -> Result<PoissonBinomialFactorization, ParityError> {
    match realroots::factor_nonnegative_real_rooted(coeffs, FACTOR_RESIDUAL_CAP) {
        Ok(f) => Ok(PoissonBinomialFactorization {
            success_probs: f.success_probs,
            residual: f.residual,
        }),
        Err(RootError::Invalid(detail)) => Err(ParityError::InvalidCoefficients { detail }),
        Err(RootError::NotRealRooted { best_residual }) => {
            Err(ParityError::NotRealRooted { best_residual })
        }
    }
}

/// For a trial with strictly positive loss, tie, and win probabilities,
/// reports whether both roots of win w^2 + tie w + loss lie strictly in the
/// open left half-plane. (They always do under the hypothesis; the check
/// computes the roots rather than assuming it.)
pub fn hurwitz_check(trial: &TrialParams) -> Result<bool, ParityError> {
    for (field, value) in [
        ("loss", trial.loss()),
        ("tie", trial.tie()),
        ("win", trial.win()),
    ] {
        if value <= 0.0 {
            return Err(ParityError::HypothesisNotMet { field, value });
        }
    }
    let (l, t, w) = (trial.loss(), trial.tie(), trial.win());
    let disc = t * t - 4.0 * l * w;
    if disc <= 0.0 {
        // Complex pair with real part -t / (2w).
        Ok(-t / (2.0 * w) < 0.0)
    } else {
        let root_hi = (-t + disc.sqrt()) / (2.0 * w);
        let root_lo = (-t - disc.sqrt()) / (2.0 * w);
        Ok(root_hi < 0.0 && root_lo < 0.0)
    }
}

/// Distances from the structure theory, reported per model. Absent entries
/// correspond to an empty parity class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureGaps {
    /// |mu_even - mu|.
    pub mu_even_gap: Option<f64>,
    /// |mu_odd - mu|.
    pub mu_odd_gap: Option<f64>,
    /// |m - mu| per even mode m.
    pub even_mode_mu_gaps: Vec<f64>,
    /// |m - mu| per odd mode m.
    pub odd_mode_mu_gaps: Vec<f64>,
    /// |m - mu_even| per even mode m.
    pub even_mode_cond_gaps: Vec<f64>,
    /// |m - mu_odd| per odd mode m.
    pub odd_mode_cond_gaps: Vec<f64>,
    /// max |m_even - m_odd| over mode pairs.
    pub max_mode_pair_gap: Option<f64>,
}

/// Everything known about the parity structure of one model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    #[serde(flatten)]
    pub moments: MomentReport,
    pub even: Option<ConditionalDistribution>,
    pub odd: Option<ConditionalDistribution>,
    pub degenerate: Option<DegenerateForm>,
    pub gaps: StructureGaps,
}

/// Computes the full parity structure of `model`. A parity side is present
/// exactly when its class has positive mass, decided structurally.
pub fn structure_report(model: &TrinomialModel) -> StructureReport {
    let moments = model.moment_report();
    let degenerate = model.detect_degenerate();
    let decomp = split_parity(&model.pmf());
    let even = moments
        .mu_even
        .is_some()
        .then(|| conditional_pmf(&decomp, Parity::Even).ok())
        .flatten();
    let odd = moments
        .mu_odd
        .is_some()
        .then(|| conditional_pmf(&decomp, Parity::Odd).ok())
        .flatten();
    let mu = moments.mu;
    let mode_gaps = |side: &Option<ConditionalDistribution>, center: f64| -> Vec<f64> {
        side.as_ref()
            .map(|c| c.modes.iter().map(|m| (m - center).abs()).collect())
            .unwrap_or_default()
    };
    let max_mode_pair_gap = match (&even, &odd) {
        (Some(e), Some(o)) => e
            .modes
            .iter()
            .flat_map(|me| o.modes.iter().map(move |mo| (me - mo).abs()))
            .fold(None, |acc: Option<f64>, g| Some(acc.map_or(g, |a| a.max(g)))),
        _ => None,
    };
    let gaps = StructureGaps {
        mu_even_gap: moments.mu_even.map(|m| (m - mu).abs()),
        mu_odd_gap: moments.mu_odd.map(|m| (m - mu).abs()),
        even_mode_mu_gaps: mode_gaps(&even, mu),
        odd_mode_mu_gaps: mode_gaps(&odd, mu),
        even_mode_cond_gaps: moments
            .mu_even
            .map(|c| mode_gaps(&even, c))
            .unwrap_or_default(),
        odd_mode_cond_gaps: moments
            .mu_odd
            .map(|c| mode_gaps(&odd, c))
            .unwrap_or_default(),
        max_mode_pair_gap,
    };
    StructureReport {
        moments,
        even,
        odd,
        degenerate,
        gaps,
    }
}
