//! Seeded randomized verification suites.
//!
//! Every case is drawn on a rational grid so an exact-arithmetic referee can
//! mirror it, then the float implementation is checked against the referee
//! and against the structural invariants it is supposed to satisfy. Failures
//! are data, not panics: a suite run returns a [`SuiteReport`] whose
//! `failures` list carries the offending case in exact JSON form so it can be
//! replayed.
//!
//! Generation is driven by ChaCha8 seeded from [`GeneratorConfig::seed`] and
//! consumes randomness in a fixed order, so a `(seed, count, n-range,
//! family)` tuple always produces the same cases and the same report bytes.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::distribution::{TrialParams, TrinomialModel};
use crate::io;
use crate::matchup::{
    Decision, LinearModel, Lineup, MatchupInstance, SearchStrategy, Team, TAIL_TIE_ABSOLUTE,
};
use crate::oracle::{rational_to_f64, RationalMatchup, RationalModel};
use crate::par;
use crate::parity::{
    factor_poisson_binomial, is_log_concave, split_parity, structure_report, Parity,
    ParityDecomposition,
};

/// Largest n the structure generator accepts.
pub const STRUCTURE_N_CAP: usize = 15;

/// Matchup instances need two players and stay within the exact ordering
/// oracle's reach.
pub const MATCHUP_N_MIN: usize = 2;
pub const MATCHUP_N_CAP: usize = 7;

/// Cases at or below this n get a full exact-enumeration mirror.
pub const ORACLE_N_CAP: usize = 10;

/// Tolerance for quantities that are exact identities up to rounding.
pub const TOL_EXACT: f64 = 1e-12;

/// Tolerance for lattice-vs-closed-form moment agreement, which accumulates
/// one rounding per lattice site.
pub const TOL_LATTICE: f64 = 1e-10;

/// Slack added to unit-scale theorem bounds (1/2, 1, 3/2, 5/2).
pub const TOL_BOUND: f64 = 1e-9;

/// Residual cap for root-finding-based factorizations.
pub const TOL_FACTOR: f64 = 1e-8;

/// Probes drawn per matchup instance.
pub const MEAN_PROBES_PER_INSTANCE: usize = 50;
pub const SWAP_PROBES_PER_INSTANCE: usize = 5;
pub const SEARCH_STARTS_PER_INSTANCE: usize = 3;

/// Tie-rate cycle for matchup instances: beta runs over 3/10, 2/5, 9/20, 1/2
/// by case index, covering both theorem regimes (beta < 1/2 and beta = 1/2).
pub const BETA_CYCLE: [(i64, i64); 4] = [(3, 10), (2, 5), (9, 20), (1, 2)];

/// Check identifiers. Each names one invariant; the suite reports evaluated
/// and failed counts per identifier so coverage is visible in the output.
pub mod check {
    pub const PMF_ORACLE_EQUIVALENCE: &str = "pmf-oracle-equivalence";
    pub const LATTICE_CONSISTENCY: &str = "lattice-consistency";
    pub const LEMMA_KEY_BOUND: &str = "lemma-key-bound";
    pub const LEMMA_TWO_FORMS: &str = "lemma-two-forms";
    pub const MEAN_BOUNDS: &str = "mean-bounds";
    pub const PARITY_MASS_CONSISTENCY: &str = "parity-mass-consistency";
    pub const LOG_CONCAVITY: &str = "log-concavity";
    pub const MODE_STRUCTURE: &str = "mode-structure";
    pub const DARROCH_BOUND: &str = "darroch-bound";
    pub const MODE_MEAN_GAPS: &str = "mode-mean-gaps";
    pub const REAL_ROOTED_FACTORIZATION: &str = "real-rooted-factorization";
    pub const POISSON_BINOMIAL_ROUNDTRIP: &str = "poisson-binomial-roundtrip";
    pub const DEGENERATE_DICHOTOMY: &str = "degenerate-dichotomy";
    pub const EXACT_MEAN_IDENTITIES: &str = "exact-mean-identities";
    pub const ORACLE_TAIL_TOTAL: &str = "oracle-tail-total";

    pub const LIN_E_INVARIANCE: &str = "lin-e-invariance";
    pub const SWAP_IDENTITY: &str = "swap-identity";
    pub const TAIL_MONOTONICITY: &str = "tail-monotonicity";
    pub const THEOREM_CONFORMANCE: &str = "theorem-conformance";
    pub const FLOAT_THEOREM_DECISION: &str = "float-theorem-decision";
    pub const LOCAL_SEARCH_SOUNDNESS: &str = "local-search-soundness";
}

/// Structure-suite checks in report order.
pub const STRUCTURE_CHECKS: [&str; 15] = [
    check::PMF_ORACLE_EQUIVALENCE,
    check::LATTICE_CONSISTENCY,
    check::LEMMA_KEY_BOUND,
    check::LEMMA_TWO_FORMS,
    check::MEAN_BOUNDS,
    check::PARITY_MASS_CONSISTENCY,
    check::LOG_CONCAVITY,
    check::MODE_STRUCTURE,
    check::DARROCH_BOUND,
    check::MODE_MEAN_GAPS,
    check::REAL_ROOTED_FACTORIZATION,
    check::POISSON_BINOMIAL_ROUNDTRIP,
    check::DEGENERATE_DICHOTOMY,
    check::EXACT_MEAN_IDENTITIES,
    check::ORACLE_TAIL_TOTAL,
];

/// Matchup-suite checks in report order.
pub const MATCHUP_CHECKS: [&str; 6] = [
    check::LIN_E_INVARIANCE,
    check::SWAP_IDENTITY,
    check::TAIL_MONOTONICITY,
    check::THEOREM_CONFORMANCE,
    check::FLOAT_THEOREM_DECISION,
    check::LOCAL_SEARCH_SOUNDNESS,
];

/// Trial-parameter family a generated model is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Uniform grid draws, redrawn until not fully degenerate.
    General,
    /// Every tie probability is 0.
    NoTie,
    /// Every tie probability is at least 1/2.
    TieHeavy,
    /// The first trial has tie probability exactly 0 or 1; the rest are
    /// unconstrained.
    Boundary,
    /// Every tie probability is exactly 0 or 1.
    Degenerate,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::General => "general",
            Family::NoTie => "no-tie",
            Family::TieHeavy => "tie-heavy",
            Family::Boundary => "boundary",
            Family::Degenerate => "degenerate",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "general" => Ok(Family::General),
            "no-tie" => Ok(Family::NoTie),
            "tie-heavy" => Ok(Family::TieHeavy),
            "boundary" => Ok(Family::Boundary),
            "degenerate" => Ok(Family::Degenerate),
            other => Err(ConfigError::BadFamily {
                input: other.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    BadCount,
    BadRange {
        n_min: usize,
        n_max: usize,
        lo: usize,
        hi: usize,
    },
    BadFamily {
        input: String,
    },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::BadCount => write!(f, "count must be at least 1"),
            ConfigError::BadRange {
                n_min,
                n_max,
                lo,
                hi,
            } => write!(
                f,
                "n range [{n_min}, {n_max}] must satisfy {lo} <= n_min <= n_max <= {hi}"
            ),
            ConfigError::BadFamily { input } => write!(
                f,
                "unknown family {input:?}; expected one of general, no-tie, tie-heavy, \
                 boundary, degenerate"
            ),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Suite inputs: everything that determines the generated cases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub count: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub family: Family,
}

impl GeneratorConfig {
    fn validate(&self, lo: usize, hi: usize) -> Result<(), ConfigError> {
        if self.count == 0 {
            return Err(ConfigError::BadCount);
        }
        if self.n_min < lo || self.n_min > self.n_max || self.n_max > hi {
            return Err(ConfigError::BadRange {
                n_min: self.n_min,
                n_max: self.n_max,
                lo,
                hi,
            });
        }
        Ok(())
    }
}

/// One generated model with its exact mirror. The grid integers `(t, w, d)`
/// meaning tie = t/d, win = w/d are the ground truth; the float model is
/// their rounding.
#[derive(Debug, Clone)]
pub struct GeneratedModel {
    pub grid: Vec<(u32, u32, u32)>,
    pub model: TrinomialModel,
    pub exact: RationalModel,
}

/// Draws `config.count` models. Denominators stay at or below 64 so every
/// case has an exact mirror with a small bit budget.
pub fn generate_models(config: &GeneratorConfig) -> Result<Vec<GeneratedModel>, ConfigError> {
    config.validate(1, STRUCTURE_N_CAP)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    Ok((0..config.count)
        .map(|_| generate_model(&mut rng, config))
        .collect())
}

fn grid_trial(rng: &mut ChaCha8Rng, family: Family, force_boundary: bool) -> (u32, u32, u32) {
    let d = rng.gen_range(1..=64u32);
    let t = match family {
        Family::NoTie => 0,
        Family::TieHeavy => rng.gen_range(d.div_ceil(2)..=d),
        Family::Degenerate => {
            if rng.gen_bool(0.5) {
                d
            } else {
                0
            }
        }
        Family::Boundary if force_boundary => {
            if rng.gen_bool(0.5) {
                d
            } else {
                0
            }
        }
        Family::General | Family::Boundary => rng.gen_range(0..=d),
    };
    let w = rng.gen_range(0..=d - t);
    (t, w, d)
}

fn generate_model(rng: &mut ChaCha8Rng, config: &GeneratorConfig) -> GeneratedModel {
    let n = rng.gen_range(config.n_min..=config.n_max);
    loop {
        let grid: Vec<(u32, u32, u32)> = (0..n)
            .map(|i| grid_trial(rng, config.family, i == 0))
            .collect();
        // The general family feeds the two-sided mean-gap bounds, so fully
        // boundary draws (all ties certain or impossible) are redrawn.
        let all_boundary = grid.iter().all(|&(t, _, d)| t == 0 || t == d);
        if config.family == Family::General && all_boundary {
            continue;
        }
        let exact = RationalModel::from_grid(&grid).expect("grid denominators are positive");
        let trials: Vec<TrialParams> = grid
            .iter()
            .map(|&(t, w, d)| {
                TrialParams::new(t as f64 / d as f64, w as f64 / d as f64)
                    .expect("grid ratios lie in the simplex")
            })
            .collect();
        let model = TrinomialModel::new(trials).expect("n >= 1");
        return GeneratedModel { grid, model, exact };
    }
}

/// A swap-identity probe: a lineup, two match indices, and a threshold.
#[derive(Debug, Clone)]
pub struct SwapProbe {
    pub sigma: Lineup,
    pub i: usize,
    pub j: usize,
    pub k2: i64,
}

/// One generated matchup instance with its exact mirror and probe material.
#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub instance: MatchupInstance,
    pub exact: RationalMatchup,
    pub mean_probes: Vec<Lineup>,
    pub swap_probes: Vec<SwapProbe>,
    pub search_starts: Vec<Lineup>,
}

/// Draws `config.count` instances. Strengths live on the quarter-integer
/// grid in [0, 4], alpha on {1..4}/64, and beta cycles through
/// [`BETA_CYCLE`], which keeps every possible pairing inside the model
/// domain and every denominator at or below 64.
pub fn generate_instances(
    config: &GeneratorConfig,
) -> Result<Vec<GeneratedInstance>, ConfigError> {
    config.validate(MATCHUP_N_MIN, MATCHUP_N_CAP)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    Ok((0..config.count)
        .map(|idx| generate_instance(&mut rng, config, idx))
        .collect())
}

fn random_lineup(rng: &mut ChaCha8Rng, n: usize) -> Lineup {
    let mut sigma: Vec<usize> = (0..n).collect();
    sigma.shuffle(rng);
    Lineup::new(sigma).expect("shuffled identity is a permutation")
}

fn generate_instance(
    rng: &mut ChaCha8Rng,
    config: &GeneratorConfig,
    idx: usize,
) -> GeneratedInstance {
    let n = rng.gen_range(config.n_min..=config.n_max);
    let (beta_num, beta_den) = BETA_CYCLE[idx % BETA_CYCLE.len()];
    let beta_exact = BigRational::new(BigInt::from(beta_num), BigInt::from(beta_den));
    let alpha_num = rng.gen_range(1..=4i64);
    let alpha_exact = BigRational::new(BigInt::from(alpha_num), BigInt::from(64));
    let draw_team = |rng: &mut ChaCha8Rng| -> Vec<u32> {
        let mut quarters: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=16u32)).collect();
        quarters.sort_unstable_by(|x, y| y.cmp(x));
        quarters
    };
    let quarters_a = draw_team(rng);
    let quarters_b = draw_team(rng);
    let k2 = rng.gen_range(0..=(2 * n) as i64);

    let floats = |q: &[u32]| -> Vec<f64> { q.iter().map(|&v| v as f64 / 4.0).collect() };
    let rationals = |q: &[u32]| -> Vec<BigRational> {
        q.iter()
            .map(|&v| BigRational::new(BigInt::from(v), BigInt::from(4)))
            .collect()
    };
    let alpha = alpha_num as f64 / 64.0;
    let beta = rational_to_f64(&beta_exact);
    // |alpha (b - a)| <= 4/64 * 4 = 1/4 < 3/10 <= beta, so the domain check
    // cannot fail for any pairing.
    let instance = MatchupInstance::new(
        LinearModel::new(alpha, beta).expect("beta in (0, 1/2]"),
        Team::new(floats(&quarters_a)).expect("sorted non-increasing"),
        Team::new(floats(&quarters_b)).expect("sorted non-increasing"),
        k2,
    )
    .expect("alpha caps keep every pairing in the domain");
    let exact = RationalMatchup::new(
        alpha_exact,
        beta_exact,
        rationals(&quarters_a),
        rationals(&quarters_b),
    )
    .expect("exact mirror of a valid instance");

    let mean_probes = (0..MEAN_PROBES_PER_INSTANCE)
        .map(|_| random_lineup(rng, n))
        .collect();
    let swap_probes = (0..SWAP_PROBES_PER_INSTANCE)
        .map(|_| {
            let sigma = random_lineup(rng, n);
            let i = rng.gen_range(0..n - 1);
            let j = rng.gen_range(i + 1..n);
            let k2 = rng.gen_range(0..=(2 * n) as i64);
            SwapProbe { sigma, i, j, k2 }
        })
        .collect();
    let search_starts = (0..SEARCH_STARTS_PER_INSTANCE)
        .map(|_| random_lineup(rng, n))
        .collect();

    GeneratedInstance {
        instance,
        exact,
        mean_probes,
        swap_probes,
        search_starts,
    }
}

/// Evaluated/failed case counts for one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckStat {
    pub id: String,
    /// Cases whose preconditions admitted the check.
    pub evaluated: usize,
    /// Cases with at least one failure of this check.
    pub failed: usize,
}

/// One violated invariant, with the case in replayable exact form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub case: usize,
    pub check: String,
    pub model: serde_json::Value,
    pub detail: String,
}

/// Largest observed gaps, for comparing against the sharp theoretical
/// constants (1/2 for conditional means, 3/2 for mode vs mean, 5/2 for mode
/// pairs). `None` when no case produced the quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalGaps {
    pub max_mu_even_gap: Option<f64>,
    pub max_mu_odd_gap: Option<f64>,
    pub max_mode_mean_gap: Option<f64>,
    pub max_mode_pair_gap: Option<f64>,
}

/// Outcome of one suite run. Serialization is deterministic: case order is
/// generation order and check order is the declared matrix order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub config: GeneratorConfig,
    pub cases_run: usize,
    pub checks: Vec<CheckStat>,
    pub failures: Vec<Failure>,
    pub extremal: ExtremalGaps,
}

#[derive(Debug, Clone, Copy, Default)]
struct GapObservation {
    mu_even: Option<f64>,
    mu_odd: Option<f64>,
    mode_mean: Option<f64>,
    mode_pair: Option<f64>,
}

#[derive(Debug, Clone, Default)]
struct CaseOutcome {
    evaluated: Vec<&'static str>,
    failures: Vec<(&'static str, String)>,
    gaps: GapObservation,
}

impl CaseOutcome {
    fn eval(&mut self, id: &'static str) {
        self.evaluated.push(id);
    }

    fn fail(&mut self, id: &'static str, detail: String) {
        self.failures.push((id, detail));
    }
}

fn max_opt(acc: Option<f64>, x: Option<f64>) -> Option<f64> {
    match (acc, x) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, None) => a,
        (None, b) => b,
    }
}

fn assemble_report(
    suite: &str,
    config: &GeneratorConfig,
    matrix: &[&'static str],
    outcomes: Vec<CaseOutcome>,
    case_json: impl Fn(usize) -> serde_json::Value,
) -> SuiteReport {
    let mut checks: Vec<CheckStat> = matrix
        .iter()
        .map(|id| CheckStat {
            id: id.to_string(),
            evaluated: 0,
            failed: 0,
        })
        .collect();
    let index_of = |id: &str| matrix.iter().position(|m| *m == id).expect("known check");
    let mut failures = Vec::new();
    let mut extremal = ExtremalGaps {
        max_mu_even_gap: None,
        max_mu_odd_gap: None,
        max_mode_mean_gap: None,
        max_mode_pair_gap: None,
    };
    for (case, outcome) in outcomes.iter().enumerate() {
        for id in &outcome.evaluated {
            checks[index_of(id)].evaluated += 1;
        }
        let mut seen: Vec<&'static str> = Vec::new();
        for (id, detail) in &outcome.failures {
            if !seen.contains(id) {
                seen.push(id);
                checks[index_of(id)].failed += 1;
            }
            failures.push(Failure {
                case,
                check: id.to_string(),
                model: case_json(case),
                detail: detail.clone(),
            });
        }
        extremal.max_mu_even_gap = max_opt(extremal.max_mu_even_gap, outcome.gaps.mu_even);
        extremal.max_mu_odd_gap = max_opt(extremal.max_mu_odd_gap, outcome.gaps.mu_odd);
        extremal.max_mode_mean_gap = max_opt(extremal.max_mode_mean_gap, outcome.gaps.mode_mean);
        extremal.max_mode_pair_gap = max_opt(extremal.max_mode_pair_gap, outcome.gaps.mode_pair);
    }
    SuiteReport {
        suite: suite.to_string(),
        config: *config,
        cases_run: outcomes.len(),
        checks,
        failures,
        extremal,
    }
}

/// Expands Bernoulli success probabilities into the pmf of their sum.
fn bernoulli_sum_pmf(probs: &[f64]) -> Vec<f64> {
    let mut cur = vec![1.0];
    for &q in probs {
        let mut next = vec![0.0; cur.len() + 1];
        for (k, &c) in cur.iter().enumerate() {
            next[k] += (1.0 - q) * c;
            next[k + 1] += q * c;
        }
        cur = next;
    }
    cur
}

/// Runs the structure suite: per-model invariants of the pmf, moments,
/// parity decomposition, and degenerate dichotomy, refereed by exact
/// enumeration where the cap allows.
pub fn run_structure_suite(config: &GeneratorConfig) -> Result<SuiteReport, ConfigError> {
    let cases = generate_models(config)?;
    let outcomes = par::map_indexed(&cases, |_, case| structure_case(case));
    Ok(assemble_report("structure", config, &STRUCTURE_CHECKS, outcomes, |case| {
        io::model_json_exact(&cases[case].exact)
    }))
}

fn structure_case(gm: &GeneratedModel) -> CaseOutcome {
    let mut out = CaseOutcome::default();
    let model = &gm.model;
    let n = model.n();
    let pmf = model.pmf();
    let report = structure_report(model);
    let m = &report.moments;

    out.eval(check::LATTICE_CONSISTENCY);
    for (what, closed, lattice) in [
        ("mean", m.mu, pmf.lattice_mean()),
        ("a", m.a, pmf.lattice_alternating_a()),
        ("b", m.b, pmf.lattice_alternating_b()),
        ("mass", 1.0, pmf.total_mass()),
    ] {
        if (closed - lattice).abs() > TOL_LATTICE {
            out.fail(
                check::LATTICE_CONSISTENCY,
                format!("{what}: closed form {closed:e} vs lattice {lattice:e}"),
            );
        }
    }

    out.eval(check::LEMMA_TWO_FORMS);
    let bam = model.b_minus_a_mu();
    if (bam.direct - bam.product_form).abs() > TOL_EXACT {
        out.fail(
            check::LEMMA_TWO_FORMS,
            format!(
                "b - a mu: direct {:e} vs product form {:e}",
                bam.direct, bam.product_form
            ),
        );
    }

    out.eval(check::LEMMA_KEY_BOUND);
    let key_bound = (1.0 - m.a.abs()) / 2.0;
    if bam.direct.abs() > key_bound + TOL_EXACT {
        out.fail(
            check::LEMMA_KEY_BOUND,
            format!("|b - a mu| = {:e} exceeds (1 - |a|)/2 = {key_bound:e}", bam.direct.abs()),
        );
    }

    out.eval(check::MEAN_BOUNDS);
    if let Some(gap) = report.gaps.mu_even_gap {
        if gap > 0.5 + TOL_BOUND {
            out.fail(check::MEAN_BOUNDS, format!("|mu_even - mu| = {gap:e} > 1/2"));
        }
    }
    if let Some(gap) = report.gaps.mu_odd_gap {
        if gap > 0.5 + TOL_BOUND {
            out.fail(check::MEAN_BOUNDS, format!("|mu_odd - mu| = {gap:e} > 1/2"));
        }
    }
    if let (Some(me), Some(mo)) = (m.mu_even, m.mu_odd) {
        if (me - mo).abs() > 1.0 + TOL_BOUND {
            out.fail(
                check::MEAN_BOUNDS,
                format!("|mu_even - mu_odd| = {:e} > 1", (me - mo).abs()),
            );
        }
    }
    out.gaps.mu_even = report.gaps.mu_even_gap;
    out.gaps.mu_odd = report.gaps.mu_odd_gap;

    out.eval(check::PARITY_MASS_CONSISTENCY);
    let decomp = split_parity(&pmf);
    for (what, lhs, rhs) in [
        ("p_norm + q_norm", decomp.p_norm + decomp.q_norm, 1.0),
        ("p_norm vs even mass", decomp.p_norm, m.mass_even),
        ("q_norm vs odd mass", decomp.q_norm, m.mass_odd),
    ] {
        if (lhs - rhs).abs() > TOL_EXACT {
            out.fail(
                check::PARITY_MASS_CONSISTENCY,
                format!("{what}: {lhs:e} vs {rhs:e}"),
            );
        }
    }

    out.eval(check::LOG_CONCAVITY);
    out.eval(check::MODE_STRUCTURE);
    out.eval(check::DARROCH_BOUND);
    out.eval(check::MODE_MEAN_GAPS);
    for side in [&report.even, &report.odd].into_iter().flatten() {
        let lc = is_log_concave(&side.probs, TOL_EXACT);
        if !lc.holds() {
            out.fail(
                check::LOG_CONCAVITY,
                format!("{} part violates log-concavity: {lc:?}", side.parity),
            );
        }
        if side.modes.is_empty() || side.modes.len() > 2 {
            out.fail(
                check::MODE_STRUCTURE,
                format!("{} part has modes {:?}", side.parity, side.modes),
            );
        }
        if side.modes.len() == 2 && ((side.modes[1] - side.modes[0]) - 1.0).abs() > TOL_EXACT {
            out.fail(
                check::MODE_STRUCTURE,
                format!("{} part has non-adjacent modes {:?}", side.parity, side.modes),
            );
        }
        for &mode in &side.modes {
            if (mode - side.mean).abs() > 1.0 + TOL_BOUND {
                out.fail(
                    check::DARROCH_BOUND,
                    format!(
                        "{} mode {mode} sits {:e} from its conditional mean {}",
                        side.parity,
                        (mode - side.mean).abs(),
                        side.mean
                    ),
                );
            }
            if (mode - m.mu).abs() > 1.5 + TOL_BOUND {
                out.fail(
                    check::MODE_MEAN_GAPS,
                    format!(
                        "{} mode {mode} sits {:e} from the mean {}",
                        side.parity,
                        (mode - m.mu).abs(),
                        m.mu
                    ),
                );
            }
        }
    }
    let mode_mean_gap = report
        .gaps
        .even_mode_mu_gaps
        .iter()
        .chain(&report.gaps.odd_mode_mu_gaps)
        .fold(None, |acc: Option<f64>, &g| Some(acc.map_or(g, |a| a.max(g))));
    out.gaps.mode_mean = mode_mean_gap;
    out.gaps.mode_pair = report.gaps.max_mode_pair_gap;
    if let Some(gap) = report.gaps.max_mode_pair_gap {
        if gap > 2.5 + TOL_BOUND {
            out.fail(
                check::MODE_MEAN_GAPS,
                format!("mode pair gap {gap:e} > 5/2"),
            );
        }
    }

    if model.trials().iter().all(|t| t.loss() > 0.0) {
        out.eval(check::REAL_ROOTED_FACTORIZATION);
        out.eval(check::POISSON_BINOMIAL_ROUNDTRIP);
        factorization_checks(&mut out, &decomp);
    }

    out.eval(check::DEGENERATE_DICHOTOMY);
    degenerate_checks(&mut out, gm, n, &pmf, m);

    if n <= ORACLE_N_CAP {
        let exact_pmf = gm.exact.enumerate_pmf().expect("n at or below the oracle cap");

        out.eval(check::PMF_ORACLE_EQUIVALENCE);
        let diff = exact_pmf.max_abs_diff(pmf.probs());
        if diff > TOL_EXACT {
            out.fail(
                check::PMF_ORACLE_EQUIVALENCE,
                format!("max |pmf - exact| = {diff:e}"),
            );
        }

        out.eval(check::EXACT_MEAN_IDENTITIES);
        let em = exact_pmf.conditional_means();
        let a = gm.exact.alternating_a();
        let b = gm.exact.alternating_b();
        let mu = gm.exact.mean();
        if em.mu != mu {
            out.fail(
                check::EXACT_MEAN_IDENTITIES,
                format!("enumerated mean {} differs from closed form {mu}", em.mu),
            );
        }
        let two = BigRational::from_integer(BigInt::from(2));
        if &em.mass_even * &two != BigRational::one() + &a {
            out.fail(
                check::EXACT_MEAN_IDENTITIES,
                format!("even mass {} differs from (1 + a)/2", em.mass_even),
            );
        }
        if &em.mass_odd * &two != BigRational::one() - &a {
            out.fail(
                check::EXACT_MEAN_IDENTITIES,
                format!("odd mass {} differs from (1 - a)/2", em.mass_odd),
            );
        }
        if let Some(me) = &em.mu_even {
            if me * (BigRational::one() + &a) != &mu + &b {
                out.fail(
                    check::EXACT_MEAN_IDENTITIES,
                    format!("mu_even {me} violates mu_even (1 + a) = mu + b"),
                );
            }
        }
        if let Some(mo) = &em.mu_odd {
            if mo * (BigRational::one() - &a) != &mu - &b {
                out.fail(
                    check::EXACT_MEAN_IDENTITIES,
                    format!("mu_odd {mo} violates mu_odd (1 - a) = mu - b"),
                );
            }
        }

        out.eval(check::ORACLE_TAIL_TOTAL);
        if exact_pmf.tail_from_doubled(0) != BigRational::one() {
            out.fail(check::ORACLE_TAIL_TOTAL, "tail at 0 is not 1".to_string());
        }
        if exact_pmf.tail_from_doubled(2 * n + 1) != BigRational::from_integer(BigInt::from(0)) {
            out.fail(
                check::ORACLE_TAIL_TOTAL,
                "tail beyond the lattice is not 0".to_string(),
            );
        }
    }

    out
}

fn factorization_checks(out: &mut CaseOutcome, decomp: &ParityDecomposition) {
    for (parity, coeffs, norm) in [
        (Parity::Even, &decomp.p_coeffs, decomp.p_norm),
        (Parity::Odd, &decomp.q_coeffs, decomp.q_norm),
    ] {
        if norm <= 0.0 {
            continue;
        }
        match factor_poisson_binomial(coeffs) {
            Ok(f) => {
                if f.residual > TOL_FACTOR {
                    out.fail(
                        check::REAL_ROOTED_FACTORIZATION,
                        format!("{parity} residual {:e} exceeds {TOL_FACTOR:e}", f.residual),
                    );
                }
                let rebuilt = bernoulli_sum_pmf(&f.success_probs);
                if rebuilt.len() != coeffs.len() {
                    out.fail(
                        check::POISSON_BINOMIAL_ROUNDTRIP,
                        format!(
                            "{parity} rebuild has {} entries, expected {}",
                            rebuilt.len(),
                            coeffs.len()
                        ),
                    );
                    continue;
                }
                let worst = rebuilt
                    .iter()
                    .zip(coeffs)
                    .map(|(r, c)| (r - c / norm).abs())
                    .fold(0.0_f64, f64::max);
                if worst > TOL_FACTOR {
                    out.fail(
                        check::POISSON_BINOMIAL_ROUNDTRIP,
                        format!("{parity} rebuild is off by {worst:e}"),
                    );
                }
            }
            Err(e) => out.fail(
                check::REAL_ROOTED_FACTORIZATION,
                format!("{parity} factorization failed: {e}"),
            ),
        }
    }
}

fn degenerate_checks(
    out: &mut CaseOutcome,
    gm: &GeneratedModel,
    n: usize,
    pmf: &crate::distribution::HalfLatticePMF,
    m: &crate::distribution::MomentReport,
) {
    let structural = gm.grid.iter().all(|&(t, _, d)| t == 0 || t == d);
    match gm.model.detect_degenerate() {
        Some(form) => {
            if !structural {
                out.fail(
                    check::DEGENERATE_DICHOTOMY,
                    "detected degenerate but some grid tie is interior".to_string(),
                );
                return;
            }
            let offset_h = n - form.k;
            let bernoulli = bernoulli_sum_pmf(&form.bernoulli_probs);
            let mut expected = vec![0.0; 2 * n + 1];
            for (j, &p) in bernoulli.iter().enumerate() {
                expected[2 * j + offset_h] = p;
            }
            let worst = expected
                .iter()
                .zip(pmf.probs())
                .map(|(e, p)| (e - p).abs())
                .fold(0.0_f64, f64::max);
            if worst > TOL_EXACT {
                out.fail(
                    check::DEGENERATE_DICHOTOMY,
                    format!("shifted Bernoulli reconstruction is off by {worst:e}"),
                );
            }
            if (form.shift - (n - form.k) as f64 / 2.0).abs() > 0.0 {
                out.fail(
                    check::DEGENERATE_DICHOTOMY,
                    format!("shift {} is not (n - k)/2", form.shift),
                );
            }
            if m.mu_even.is_some() == m.mu_odd.is_some() {
                out.fail(
                    check::DEGENERATE_DICHOTOMY,
                    "degenerate model must occupy exactly one parity class".to_string(),
                );
            }
        }
        None => {
            if structural {
                out.fail(
                    check::DEGENERATE_DICHOTOMY,
                    "all grid ties are boundary but detection returned none".to_string(),
                );
            }
        }
    }
}

/// Runs the matchup suite: lineup-mean invariance, the swap identity, tail
/// monotonicity, and theorem conformance against the exact ordering oracle
/// over the full threshold grid.
pub fn run_matchup_suite(config: &GeneratorConfig) -> Result<SuiteReport, ConfigError> {
    let cases = generate_instances(config)?;
    let outcomes = par::map_indexed(&cases, |_, case| matchup_case(case));
    Ok(assemble_report("matchup", config, &MATCHUP_CHECKS, outcomes, |case| {
        io::instance_json_exact(&cases[case].exact, cases[case].instance.k2())
    }))
}

fn matchup_case(gi: &GeneratedInstance) -> CaseOutcome {
    let mut out = CaseOutcome::default();
    let inst = &gi.instance;
    let n = inst.n();

    out.eval(check::LIN_E_INVARIANCE);
    let mu = inst.expected_score();
    for lineup in &gi.mean_probes {
        let mean = inst
            .lineup_model(lineup)
            .expect("probe lineups are permutations")
            .mean();
        if (mean - mu).abs() > TOL_EXACT {
            out.fail(
                check::LIN_E_INVARIANCE,
                format!("lineup {lineup:?} has mean {mean:e}, expected {mu:e}"),
            );
        }
    }

    out.eval(check::SWAP_IDENTITY);
    for probe in &gi.swap_probes {
        let at = inst.with_threshold(probe.k2).expect("probe k2 in range");
        let swapped = probe.sigma.swapped(probe.i, probe.j);
        let lhs = at.tail_probability(&swapped).expect("valid lineup")
            - at.tail_probability(&probe.sigma).expect("valid lineup");
        let rhs = at
            .swap_delta(&probe.sigma, probe.i, probe.j)
            .expect("indices in range")
            * at.residual_statistic(&probe.sigma, probe.i, probe.j)
                .expect("indices in range");
        if (lhs - rhs).abs() > TOL_EXACT {
            out.fail(
                check::SWAP_IDENTITY,
                format!(
                    "k2 = {}, sigma = {:?}, i = {}, j = {}: tail difference {lhs:e} vs \
                     delta times residual {rhs:e}",
                    probe.k2, probe.sigma, probe.i, probe.j
                ),
            );
        }
    }

    out.eval(check::TAIL_MONOTONICITY);
    let identity = Lineup::identity(n);
    let id_pmf = inst.lineup_model(&identity).expect("identity lineup").pmf();
    let mut prev = id_pmf.tail_from_doubled(0);
    for k2 in 1..=2 * n {
        let tail = id_pmf.tail_from_doubled(k2);
        // Top-down summation makes nested tails monotone with no tolerance.
        if tail > prev {
            out.fail(
                check::TAIL_MONOTONICITY,
                format!("tail({k2}) = {tail:e} exceeds tail({}) = {prev:e}", k2 - 1),
            );
        }
        prev = tail;
    }

    let table = gi.exact.ordering_pmfs().expect("n at or below the ordering cap");
    let mu_exact = gi.exact.expected_score();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let (lo, hi) = if *gi.exact.beta() == half {
        (
            &mu_exact - BigRational::one(),
            &mu_exact + BigRational::from_integer(BigInt::from(2)),
        )
    } else {
        (
            &mu_exact - BigRational::from_integer(BigInt::from(2)),
            &mu_exact + BigRational::new(BigInt::from(5), BigInt::from(2)),
        )
    };

    out.eval(check::THEOREM_CONFORMANCE);
    out.eval(check::FLOAT_THEOREM_DECISION);
    out.eval(check::LOCAL_SEARCH_SOUNDNESS);
    for k2 in 0..=2 * n {
        let tails: Vec<BigRational> = table
            .iter()
            .map(|(_, pmf)| pmf.tail_from_doubled(k2))
            .collect();
        let best = tails.iter().max().expect("at least one lineup").clone();
        let k_exact = BigRational::new(BigInt::from(k2), BigInt::from(2));
        // Lexicographic enumeration puts the identity first and the
        // reversal last.
        let identity_optimal = tails[0] == best;
        let reversal_optimal = tails[tails.len() - 1] == best;

        if k_exact >= hi && !identity_optimal {
            out.fail(
                check::THEOREM_CONFORMANCE,
                format!("k2 = {k2}: k clears the upper threshold but the identity is not optimal"),
            );
        }
        if k_exact <= lo && !reversal_optimal {
            out.fail(
                check::THEOREM_CONFORMANCE,
                format!("k2 = {k2}: k clears the lower threshold but the reversal is not optimal"),
            );
        }

        let at = inst.with_threshold(k2 as i64).expect("grid k2");
        let verdict = at.optimize_by_theorem();
        if !verdict.near_boundary {
            match verdict.decision {
                Decision::StrongVsStrong if !identity_optimal => {
                    out.fail(
                        check::FLOAT_THEOREM_DECISION,
                        format!("k2 = {k2}: float verdict asserts the identity, which is not optimal"),
                    );
                }
                Decision::StrongVsWeak if !reversal_optimal => {
                    out.fail(
                        check::FLOAT_THEOREM_DECISION,
                        format!("k2 = {k2}: float verdict asserts the reversal, which is not optimal"),
                    );
                }
                _ => {}
            }
        }

        let decisive = k_exact >= hi || k_exact <= lo;
        if decisive {
            let predicted = if k_exact >= hi {
                Lineup::identity(n)
            } else {
                Lineup::reversed(n)
            };
            let target = at.tail_probability(&predicted).expect("valid lineup");
            let mut starts: Vec<Option<Lineup>> = vec![None, Some(Lineup::reversed(n))];
            starts.extend(gi.search_starts.iter().cloned().map(Some));
            for start in starts {
                let reached = at
                    .optimize_search(&SearchStrategy::LocalSearch { start })
                    .expect("valid start");
                if target - reached.tail > TAIL_TIE_ABSOLUTE {
                    out.fail(
                        check::LOCAL_SEARCH_SOUNDNESS,
                        format!(
                            "k2 = {k2}: local search stopped at tail {:e}, predicted optimum has {target:e}",
                            reached.tail
                        ),
                    );
                }
            }
        }
    }

    out
}
