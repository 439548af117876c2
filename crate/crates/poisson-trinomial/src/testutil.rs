//! Shared proptest strategies for grid-valued models. Trial parameters are
//! drawn as integer numerators over one denominator per trial, so every case
//! carries an exact rational mirror alongside the float model.

use std::ops::RangeInclusive;

use proptest::prelude::*;

use crate::distribution::TrinomialModel;
use crate::oracle::RationalModel;

#[derive(Debug, Clone)]
pub(crate) struct GridCase {
    pub trials: Vec<(u32, u32, u32)>,
    pub model: TrinomialModel,
    pub exact: RationalModel,
}

impl GridCase {
    pub(crate) fn from_trials(trials: Vec<(u32, u32, u32)>) -> Self {
        let pairs: Vec<(f64, f64)> = trials
            .iter()
            .map(|&(t, w, d)| (f64::from(t) / f64::from(d), f64::from(w) / f64::from(d)))
            .collect();
        let model = TrinomialModel::from_pairs(&pairs).expect("grid values are on the simplex");
        let exact = RationalModel::from_grid(&trials).expect("grid values are on the simplex");
        Self {
            trials,
            model,
            exact,
        }
    }
}

/// One trial as (tie_num, win_num, denom) with denom <= 64.
pub(crate) fn grid_trial_strategy() -> impl Strategy<Value = (u32, u32, u32)> {
    (1u32..=64).prop_flat_map(|d| {
        (0..=d).prop_flat_map(move |t| (0..=(d - t)).prop_map(move |w| (t, w, d)))
    })
}

pub(crate) fn grid_model_strategy(
    trials: RangeInclusive<usize>,
) -> impl Strategy<Value = GridCase> {
    prop::collection::vec(grid_trial_strategy(), trials).prop_map(GridCase::from_trials)
}

/// Grid trial with tie probability at least 1/2.
pub(crate) fn tie_heavy_trial_strategy() -> impl Strategy<Value = (u32, u32, u32)> {
    (1u32..=64).prop_flat_map(|d| {
        (d.div_ceil(2)..=d).prop_flat_map(move |t| (0..=(d - t)).prop_map(move |w| (t, w, d)))
    })
}

pub(crate) fn tie_heavy_model_strategy(
    trials: RangeInclusive<usize>,
) -> impl Strategy<Value = GridCase> {
    prop::collection::vec(tie_heavy_trial_strategy(), trials).prop_map(GridCase::from_trials)
}
