//! Acceptance gate: ten end-to-end criteria over seeded populations, one
//! [PASS]/[FAIL] line each. Every tolerance and time budget is pinned here
//! and cross-checked against the constants the verify suites publish, so a
//! drift in either place fails loudly.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use poisson_trinomial::io::to_json_string_17;
use poisson_trinomial::verify::{
    self, check, CheckStat, Family, GeneratorConfig, SuiteReport, BETA_CYCLE,
    MEAN_PROBES_PER_INSTANCE, SWAP_PROBES_PER_INSTANCE, TOL_BOUND, TOL_EXACT, TOL_FACTOR,
};

const EXACT: f64 = 1e-12;
const BOUND: f64 = 1e-9;
const FACTOR: f64 = 1e-8;
const ORACLE_BUDGET: Duration = Duration::from_secs(60);
const MEAN_BUDGET: Duration = Duration::from_secs(60);
const MATCHUP_BUDGET: Duration = Duration::from_secs(300);

fn stat(report: &SuiteReport, id: &str) -> CheckStat {
    report
        .checks
        .iter()
        .find(|c| c.id == id)
        .unwrap_or_else(|| panic!("check {id} missing from the {} report", report.suite))
        .clone()
}

fn clean(report: &SuiteReport, id: &str, expected_evaluated: usize) -> bool {
    let s = stat(report, id);
    s.evaluated == expected_evaluated && s.failed == 0
}

fn criterion(number: usize, ok: bool, detail: &str) {
    println!("[{}] criterion {number}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {number}: {detail}");
}

/// The shared 10,000-model population for criteria 2 through 5: one run,
/// four criteria read the same report.
fn general_population() -> &'static (SuiteReport, Duration) {
    static RUN: OnceLock<(SuiteReport, Duration)> = OnceLock::new();
    RUN.get_or_init(|| {
        let config = GeneratorConfig {
            seed: 929,
            count: 10_000,
            n_min: 1,
            n_max: 15,
            family: Family::General,
        };
        let start = Instant::now();
        let report = verify::run_structure_suite(&config).expect("config within caps");
        (report, start.elapsed())
    })
}

/// The shared 200-instance matchup population for criteria 7 through 9.
fn matchup_population() -> &'static (SuiteReport, Duration) {
    static RUN: OnceLock<(SuiteReport, Duration)> = OnceLock::new();
    RUN.get_or_init(|| {
        let config = GeneratorConfig {
            seed: 707,
            count: 200,
            n_min: 2,
            n_max: 6,
            family: Family::General,
        };
        let start = Instant::now();
        let report = verify::run_matchup_suite(&config).expect("config within caps");
        (report, start.elapsed())
    })
}

#[test]
fn c01_pmf_matches_exact_enumeration_on_500_seeded_models() {
    assert_eq!(TOL_EXACT, EXACT);
    let config = GeneratorConfig {
        seed: 101,
        count: 500,
        n_min: 1,
        n_max: 10,
        family: Family::General,
    };
    let start = Instant::now();
    let report = verify::run_structure_suite(&config).expect("config within caps");
    let elapsed = start.elapsed();
    let ok = clean(&report, check::PMF_ORACLE_EQUIVALENCE, 500) && elapsed < ORACLE_BUDGET;
    criterion(
        1,
        ok,
        &format!(
            "500/500 models (n in [1,10]) match the 3^n enumeration within 1e-12 in {:.2?} (< 60s)",
            elapsed
        ),
    );
}

#[test]
fn c02_conditional_means_stay_within_half_of_the_mean() {
    assert_eq!(TOL_BOUND, BOUND);
    let config = GeneratorConfig {
        seed: 929,
        count: 10_000,
        n_min: 1,
        n_max: 15,
        family: Family::General,
    };
    let models = verify::generate_models(&config).expect("config within caps");
    let degenerate = models.iter().filter(|m| m.model.is_degenerate()).count();
    let (report, elapsed) = general_population();
    let ok = degenerate == 0 && clean(report, check::MEAN_BOUNDS, 10_000) && *elapsed < MEAN_BUDGET;
    criterion(
        2,
        ok,
        &format!(
            "10,000/10,000 non-degenerate models (n in [1,15]) keep |mu_even - mu| and \
             |mu_odd - mu| <= 0.5+1e-9 and |mu_even - mu_odd| <= 1+1e-9 in {:.2?} (< 60s)",
            elapsed
        ),
    );
}

#[test]
fn c03_key_bound_and_two_forms_hold_on_the_same_population() {
    assert_eq!(TOL_EXACT, EXACT);
    let (report, _) = general_population();
    let ok = clean(report, check::LEMMA_KEY_BOUND, 10_000)
        && clean(report, check::LEMMA_TWO_FORMS, 10_000);
    criterion(
        3,
        ok,
        "10,000/10,000 models keep |b - a mu| <= (1-|a|)/2 and both forms of b - a mu \
         agree within 1e-12",
    );
}

#[test]
fn c04_conditional_laws_are_log_concave_with_adjacent_modes() {
    assert_eq!(TOL_EXACT, EXACT);
    assert_eq!(TOL_BOUND, BOUND);
    let (report, _) = general_population();
    let ok = clean(report, check::LOG_CONCAVITY, 10_000)
        && clean(report, check::MODE_STRUCTURE, 10_000)
        && clean(report, check::DARROCH_BOUND, 10_000)
        && clean(report, check::MODE_MEAN_GAPS, 10_000);
    criterion(
        4,
        ok,
        "10,000/10,000 models: conditional pmfs log-concave (tol 1e-12), 1-2 adjacent modes, \
         modes within 1+1e-9 of their conditional mean, 1.5+1e-9 of mu, pairs within 2.5+1e-9",
    );
}

#[test]
fn c05_positive_loss_models_factor_into_poisson_binomials() {
    assert_eq!(TOL_FACTOR, FACTOR);
    let (report, _) = general_population();
    let factored = stat(report, check::REAL_ROOTED_FACTORIZATION);
    let roundtrip = stat(report, check::POISSON_BINOMIAL_ROUNDTRIP);
    let ok = factored.evaluated > 1_000
        && factored.failed == 0
        && roundtrip.evaluated == factored.evaluated
        && roundtrip.failed == 0;
    criterion(
        5,
        ok,
        &format!(
            "{}/{} all-losses-possible models factor with residual <= 1e-8 and rebuild their \
             conditional pmfs within 1e-8",
            factored.evaluated - factored.failed,
            factored.evaluated
        ),
    );
}

#[test]
fn c06_degenerate_models_collapse_to_a_shifted_poisson_binomial() {
    assert_eq!(TOL_EXACT, EXACT);
    assert_eq!(TOL_BOUND, BOUND);
    let config = GeneratorConfig {
        seed: 606,
        count: 200,
        n_min: 1,
        n_max: 15,
        family: Family::Degenerate,
    };
    let report = verify::run_structure_suite(&config).expect("config within caps");
    // A degenerate pmf lives on one parity, so its conditional mean is mu
    // itself and the Darroch check pins every mode within 1+1e-9 of mu.
    let ok = clean(&report, check::DEGENERATE_DICHOTOMY, 200)
        && clean(&report, check::DARROCH_BOUND, 200)
        && clean(&report, check::MODE_STRUCTURE, 200);
    criterion(
        6,
        ok,
        "200/200 degenerate models rebuild as shift + Poisson binomial within 1e-12 with \
         every mode within 1+1e-9 of mu",
    );
}

#[test]
fn c07_decisive_thresholds_put_the_predicted_lineup_in_the_exact_argmax() {
    assert_eq!(BETA_CYCLE, [(3, 10), (2, 5), (9, 20), (1, 2)]);
    let (report, elapsed) = matchup_population();
    let ok = clean(report, check::THEOREM_CONFORMANCE, 200)
        && clean(report, check::FLOAT_THEOREM_DECISION, 200)
        && *elapsed < MATCHUP_BUDGET;
    criterion(
        7,
        ok,
        &format!(
            "200/200 instances (n in [2,6], beta in {{0.3, 0.4, 0.45, 0.5}}): at every \
             half-grid threshold past the decisive bands the identity (upper) or reversal \
             (lower) lies in the exact-rational argmax in {:.2?} (< 5min)",
            elapsed
        ),
    );
}

#[test]
fn c08_swap_identity_is_exact_on_1000_probes() {
    assert_eq!(TOL_EXACT, EXACT);
    assert_eq!(SWAP_PROBES_PER_INSTANCE, 5);
    let (report, _) = matchup_population();
    let ok = clean(report, check::SWAP_IDENTITY, 200);
    criterion(
        8,
        ok,
        "1,000/1,000 (sigma, i, j, k) probes: tail(swapped) - tail(sigma) equals \
         delta times the residual statistic within 1e-12",
    );
}

#[test]
fn c09_expected_score_ignores_the_ordering() {
    assert_eq!(TOL_EXACT, EXACT);
    assert_eq!(MEAN_PROBES_PER_INSTANCE, 50);
    let (report, _) = matchup_population();
    let ok = clean(report, check::LIN_E_INVARIANCE, 200);
    criterion(
        9,
        ok,
        "200 instances x 50 random orderings: every mean equals n/2 + alpha (sum b - sum a) \
         within 1e-12",
    );
}

#[test]
fn c10_suite_reports_are_byte_identical_for_a_fixed_seed() {
    let structure = GeneratorConfig {
        seed: 4242,
        count: 250,
        n_min: 1,
        n_max: 12,
        family: Family::General,
    };
    let matchup = GeneratorConfig {
        seed: 4242,
        count: 24,
        n_min: 2,
        n_max: 6,
        family: Family::General,
    };
    let structure_runs: Vec<String> = (0..2)
        .map(|_| {
            to_json_string_17(&verify::run_structure_suite(&structure).expect("config within caps"))
        })
        .collect();
    let matchup_runs: Vec<String> = (0..2)
        .map(|_| to_json_string_17(&verify::run_matchup_suite(&matchup).expect("config within caps")))
        .collect();
    let ok = structure_runs[0] == structure_runs[1] && matchup_runs[0] == matchup_runs[1];
    criterion(
        10,
        ok,
        "rerunning both suites with the same seed reproduces the reports byte for byte",
    );
}
