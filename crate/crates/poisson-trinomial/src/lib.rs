//! Distributions of sums of independent trials scored in {0, 1/2, 1}.
//!
//! A trial ends in a win (1 point), a tie (1/2 point), or a loss (0 points).
//! The total score of `n` independent, not identically distributed trials
//! lives on the half-integer lattice {0, 1/2, ..., n}. This crate computes
//! that distribution exactly on the doubled lattice, splits it by integer
//! versus half-integer support, and exposes the structure of both halves:
//! conditional means, modes, log-concavity, and a factorization of each half
//! into an ordinary Poisson binomial law.
//!
//! On top of the distribution layer sits a match-play model where trial
//! probabilities are affine in the strength gap between paired players, with
//! closed-form swap calculus and ordering optimization for tail objectives.
//!
//! ```
//! use poisson_trinomial::TrinomialModel;
//!
//! let model = TrinomialModel::from_pairs(&[(0.5, 0.25), (0.5, 0.25)]).unwrap();
//! let pmf = model.pmf();
//! assert_eq!(pmf.probs(), &[0.0625, 0.25, 0.375, 0.25, 0.0625]);
//! assert_eq!(model.mean(), 1.0);
//! ```
//!
//! Exact reference results come from the [`oracle`] module, which enumerates
//! all 3^n outcomes in rational arithmetic and never shares code with the
//! floating-point convolution path.

pub mod distribution;
pub mod io;
pub mod matchup;
pub mod oracle;
pub mod parity;
pub mod verify;

mod par;
mod realroots;

#[cfg(test)]
pub(crate) mod testutil;

pub use distribution::{
    DegenerateForm, HalfLatticePMF, MomentReport, ModelError, TrialParams, TrinomialModel,
};
pub use matchup::{Decision, LinearModel, Lineup, MatchupInstance, SearchStrategy, Team};
pub use oracle::{ExactPmf, RationalModel};
pub use parity::{
    ConditionalDistribution, Parity, ParityDecomposition, PoissonBinomialFactorization,
    StructureReport,
};
