//! Shared JSON and CSV formats.
//!
//! Probabilities and strengths arrive as JSON numbers or as strings holding
//! either a plain decimal or an explicit rational "p/q". Every input is
//! converted to an exact rational without re-rounding: a JSON number is read
//! as the dyadic rational its f64 bits denote, a decimal string "0.2" as
//! 2/10. Each parse yields both the float working model and its exact
//! mirror, so oracle comparisons are never polluted by parse rounding.
//!
//! Emitted JSON prints every float with 17 significant digits, which round
//! trips f64 losslessly. CSV uses comma separators, a header row, and LF
//! line endings.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::distribution::{HalfLatticePMF, TrinomialModel};
use crate::matchup::{LinearModel, Lineup, MatchupInstance, Team};
use crate::oracle::{self, rational_to_f64, RationalMatchup, RationalModel, RationalTrial};
use crate::parity::ParityDecomposition;

/// Largest n for which the per-ordering tail CSV (n! rows) is emitted.
pub const ORDERING_CSV_CAP: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub enum IoError {
    /// The text is not the expected JSON shape.
    Json { detail: String },
    /// A specific field failed validation.
    Field { field: String, detail: String },
}

impl fmt::Display for IoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IoError::Json { detail } => write!(f, "invalid JSON: {detail}"),
            IoError::Field { field, detail } => write!(f, "{field}: {detail}"),
        }
    }
}

impl std::error::Error for IoError {}

fn field_error(field: impl Into<String>, detail: impl fmt::Display) -> IoError {
    IoError::Field {
        field: field.into(),
        detail: detail.to_string(),
    }
}

/// A JSON value that may be a number or a numeric string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawNumber {
    Number(f64),
    Text(String),
}

/// Exact interpretation of "p/q", a plain decimal like "-1.25", or a bare
/// integer. None when the text fits no such form.
fn parse_rational_text(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q <= BigInt::from(0) {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (negative, rest) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match rest.split_once('.') {
        Some((i, f)) => (i, f),
        None => (rest, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac_part) {
        return None;
    }
    let digits: BigInt = format!("0{int_part}{frac_part}").parse().ok()?;
    let numer = if negative { -digits } else { digits };
    let denom = (0..frac_part.len()).fold(BigInt::from(1), |acc, _| acc * 10);
    Some(BigRational::new(numer, denom))
}

fn rational_from_raw(raw: &RawNumber, field: &str) -> Result<BigRational, IoError> {
    match raw {
        RawNumber::Number(x) => {
            BigRational::from_float(*x).ok_or_else(|| field_error(field, "must be finite"))
        }
        RawNumber::Text(s) => parse_rational_text(s).ok_or_else(|| {
            field_error(
                field,
                format!("cannot read {s:?} as a decimal or \"p/q\" rational"),
            )
        }),
    }
}

#[derive(Deserialize)]
struct RawTrial {
    t: RawNumber,
    w: RawNumber,
}

#[derive(Deserialize)]
struct RawModel {
    trials: Vec<RawTrial>,
}

/// Parses the shared model JSON {"trials": [{"t": ..., "w": ...}, ...]}
/// into the float model and its exact mirror.
pub fn parse_model(text: &str) -> Result<(TrinomialModel, RationalModel), IoError> {
    let raw: RawModel =
        serde_json::from_str(text).map_err(|e| IoError::Json { detail: e.to_string() })?;
    model_from_raw(raw)
}

fn model_from_raw(raw: RawModel) -> Result<(TrinomialModel, RationalModel), IoError> {
    let mut exact_trials = Vec::with_capacity(raw.trials.len());
    let mut float_pairs = Vec::with_capacity(raw.trials.len());
    for (i, trial) in raw.trials.iter().enumerate() {
        let t = rational_from_raw(&trial.t, &format!("trials[{i}].t"))?;
        let w = rational_from_raw(&trial.w, &format!("trials[{i}].w"))?;
        float_pairs.push((rational_to_f64(&t), rational_to_f64(&w)));
        exact_trials
            .push(RationalTrial::new(t, w).map_err(|d| field_error(format!("trials[{i}]"), d))?);
    }
    let exact = RationalModel::new(exact_trials).map_err(|e| field_error("trials", e))?;
    let model = TrinomialModel::from_pairs(&float_pairs).map_err(|e| field_error("trials", e))?;
    Ok((model, exact))
}

#[derive(Deserialize)]
struct RawPmf {
    n: usize,
    probs: Vec<f64>,
}

/// Parses and validates the shared pmf JSON {"n": ..., "probs": [...]}.
pub fn parse_pmf(text: &str) -> Result<HalfLatticePMF, IoError> {
    let raw: RawPmf =
        serde_json::from_str(text).map_err(|e| IoError::Json { detail: e.to_string() })?;
    HalfLatticePMF::from_parts(raw.n, raw.probs).map_err(|e| field_error("probs", e))
}

pub enum ModelOrPmf {
    Model(TrinomialModel, RationalModel),
    Pmf(HalfLatticePMF),
}

/// Accepts either of the two shared formats, keyed on which fields are
/// present.
pub fn parse_model_or_pmf(text: &str) -> Result<ModelOrPmf, IoError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| IoError::Json { detail: e.to_string() })?;
    if value.get("trials").is_some() {
        let raw: RawModel = serde_json::from_value(value)
            .map_err(|e| IoError::Json { detail: e.to_string() })?;
        let (model, exact) = model_from_raw(raw)?;
        Ok(ModelOrPmf::Model(model, exact))
    } else if value.get("probs").is_some() {
        let raw: RawPmf = serde_json::from_value(value)
            .map_err(|e| IoError::Json { detail: e.to_string() })?;
        let pmf =
            HalfLatticePMF::from_parts(raw.n, raw.probs).map_err(|e| field_error("probs", e))?;
        Ok(ModelOrPmf::Pmf(pmf))
    } else {
        Err(IoError::Json {
            detail: "expected a model ({\"trials\": ...}) or a pmf ({\"n\": ..., \"probs\": ...})"
                .into(),
        })
    }
}

#[derive(Deserialize)]
struct RawInstance {
    alpha: RawNumber,
    beta: RawNumber,
    team_a: Vec<RawNumber>,
    team_b: Vec<RawNumber>,
    k: RawNumber,
}

/// Parses the instance JSON {"alpha", "beta", "team_a", "team_b", "k"} into
/// the float instance and its exact mirror. k must lie on the half-integer
/// grid; it is carried internally as the doubled integer k2.
pub fn parse_instance(text: &str) -> Result<(MatchupInstance, RationalMatchup), IoError> {
    let raw: RawInstance =
        serde_json::from_str(text).map_err(|e| IoError::Json { detail: e.to_string() })?;
    let alpha = rational_from_raw(&raw.alpha, "alpha")?;
    let beta = rational_from_raw(&raw.beta, "beta")?;
    let team = |name: &str, raws: &[RawNumber]| -> Result<Vec<BigRational>, IoError> {
        raws.iter()
            .enumerate()
            .map(|(i, r)| rational_from_raw(r, &format!("{name}[{i}]")))
            .collect()
    };
    let team_a = team("team_a", &raw.team_a)?;
    let team_b = team("team_b", &raw.team_b)?;
    let k = rational_from_raw(&raw.k, "k")?;
    let k2_exact = &k * BigRational::from_integer(BigInt::from(2));
    if !k2_exact.is_integer() {
        return Err(field_error(
            "k",
            format!("{k} is not on the half-integer grid"),
        ));
    }
    let k2 = k2_exact
        .to_integer()
        .to_i64()
        .ok_or_else(|| field_error("k", "out of representable range"))?;

    // The exact mirror validates first; the float side then cannot fail
    // except by rounding onto a boundary, which its own validation reports.
    let exact = RationalMatchup::new(
        alpha.clone(),
        beta.clone(),
        team_a.clone(),
        team_b.clone(),
    )
    .map_err(|e| match e {
        oracle::OracleError::InvalidInstance { detail } => field_error("instance", detail),
        other => field_error("instance", other),
    })?;

    let to_floats = |xs: &[BigRational]| xs.iter().map(rational_to_f64).collect::<Vec<_>>();
    let model = LinearModel::new(rational_to_f64(&alpha), rational_to_f64(&beta)).map_err(|e| {
        match &e {
            crate::matchup::MatchupError::BadAlpha { .. } => field_error("alpha", e),
            _ => field_error("beta", e),
        }
    })?;
    let float_a = Team::new(to_floats(&team_a)).map_err(|e| field_error("team_a", e))?;
    let float_b = Team::new(to_floats(&team_b)).map_err(|e| field_error("team_b", e))?;
    let instance = MatchupInstance::new(model, float_a, float_b, k2).map_err(|e| match &e {
        crate::matchup::MatchupError::ThresholdOutOfRange { .. } => field_error("k", e),
        _ => field_error("instance", e),
    })?;
    Ok((instance, exact))
}

/// Parses a bare threshold token ("3", "2.5", "5/2") onto the doubled grid.
pub fn parse_threshold(text: &str) -> Result<i64, IoError> {
    let k = rational_from_raw(&RawNumber::Text(text.to_string()), "k")?;
    let k2_exact = &k * BigRational::from_integer(BigInt::from(2));
    if !k2_exact.is_integer() {
        return Err(field_error(
            "k",
            format!("{k} is not on the half-integer grid"),
        ));
    }
    k2_exact
        .to_integer()
        .to_i64()
        .ok_or_else(|| field_error("k", "out of representable range"))
}

/// The shared model JSON of an exact model, probabilities as rational
/// strings.
pub fn model_json_exact(model: &RationalModel) -> serde_json::Value {
    let trials: Vec<serde_json::Value> = model
        .trials()
        .iter()
        .map(|t| {
            serde_json::json!({
                "t": t.tie().to_string(),
                "w": t.win().to_string(),
            })
        })
        .collect();
    serde_json::json!({ "trials": trials })
}

/// The instance JSON of an exact matchup, parameters as rational strings
/// and k as a decimal on the half-integer grid.
pub fn instance_json_exact(matchup: &RationalMatchup, k2: i64) -> serde_json::Value {
    let team = |xs: &[BigRational]| -> Vec<String> { xs.iter().map(|x| x.to_string()).collect() };
    let k = if k2 % 2 == 0 {
        format!("{}", k2 / 2)
    } else {
        format!("{}.5", k2 / 2)
    };
    serde_json::json!({
        "alpha": matchup.alpha().to_string(),
        "beta": matchup.beta().to_string(),
        "team_a": team(matchup.team_a()),
        "team_b": team(matchup.team_b()),
        "k": k,
    })
}

struct Formatter17;

impl serde_json::ser::Formatter for Formatter17 {
    fn write_f64<W: std::io::Write + ?Sized>(
        &mut self,
        writer: &mut W,
        value: f64,
    ) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes to JSON with every float carrying 17 significant digits
/// (lossless f64 round trip).
pub fn to_json_string_17<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Formatter17);
    value
        .serialize(&mut ser)
        .expect("in-memory serialization cannot fail");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

/// Plot-ready coefficient table: index, p_k, q_k. q has one fewer entry
/// than p; its last cell is empty.
pub fn coefficients_csv(decomp: &ParityDecomposition) -> String {
    let mut out = String::from("index,p_k,q_k\n");
    for (k, &p) in decomp.p_coeffs.iter().enumerate() {
        let q = decomp
            .q_coeffs
            .get(k)
            .map(|&q| format!("{q:.16e}"))
            .unwrap_or_default();
        out.push_str(&format!("{k},{p:.16e},{q}\n"));
    }
    out
}

/// Per-ordering tail table over all n! lineups in lexicographic order.
/// Orderings are printed 1-based and space-separated.
pub fn ordering_tails_csv(instance: &MatchupInstance) -> Result<String, IoError> {
    let n = instance.n();
    if n > ORDERING_CSV_CAP {
        return Err(field_error(
            "instance",
            format!("per-ordering CSV requires n <= {ORDERING_CSV_CAP}, got n = {n}"),
        ));
    }
    let mut out = String::from("ordering,tail\n");
    for sigma in oracle::permutations_lex(n) {
        let label = ordering_label(&sigma);
        let lineup = Lineup::new(sigma).expect("generated permutations are valid");
        let tail = instance
            .tail_probability(&lineup)
            .expect("lineup length matches the instance");
        out.push_str(&format!("{label},{tail:.16e}\n"));
    }
    Ok(out)
}

/// 1-based, space-separated rendering of a lineup.
pub fn ordering_label(sigma: &[usize]) -> String {
    sigma
        .iter()
        .map(|s| (s + 1).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// 1-based copies of a list of lineups, for JSON output.
pub fn orderings_one_based(lineups: &[Lineup]) -> Vec<Vec<usize>> {
    lineups
        .iter()
        .map(|l| l.as_slice().iter().map(|s| s + 1).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn ratio(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn rational_strings_parse_exactly() {
        assert_eq!(parse_rational_text("1/3"), Some(ratio(1, 3)));
        assert_eq!(parse_rational_text(" 2 / 6 "), Some(ratio(1, 3)));
        assert_eq!(parse_rational_text("0.25"), Some(ratio(1, 4)));
        assert_eq!(parse_rational_text("0.1"), Some(ratio(1, 10)));
        assert_eq!(parse_rational_text("-1.5"), Some(ratio(-3, 2)));
        assert_eq!(parse_rational_text("3"), Some(ratio(3, 1)));
        assert_eq!(parse_rational_text(".5"), Some(ratio(1, 2)));
        assert_eq!(parse_rational_text("2."), Some(ratio(2, 1)));
        assert_eq!(parse_rational_text(BigRational::zero().to_string().as_str()), Some(ratio(0, 1)));
        for bad in ["", ".", "x", "1e-3", "1/0", "1/-2", "1.2.3", "--1"] {
            assert_eq!(parse_rational_text(bad), None, "{bad:?} must not parse");
        }
    }

    #[test]
    fn number_and_string_inputs_differ_when_the_decimal_is_not_dyadic() {
        let from_number = rational_from_raw(&RawNumber::Number(0.1), "x").unwrap();
        let from_text = rational_from_raw(&RawNumber::Text("0.1".into()), "x").unwrap();
        assert_eq!(from_text, ratio(1, 10));
        assert_ne!(from_number, from_text);
        assert_eq!(rational_to_f64(&from_number), 0.1);
    }

    #[test]
    fn model_parse_builds_both_mirrors() {
        let (model, exact) =
            parse_model(r#"{"trials": [{"t": "1/3", "w": "1/3"}, {"t": 0.25, "w": 0.5}]}"#)
                .unwrap();
        assert_eq!(model.n(), 2);
        assert_eq!(exact.trials()[0].tie(), &ratio(1, 3));
        assert_eq!(exact.trials()[0].loss(), &ratio(1, 3));
        assert_eq!(exact.trials()[1].win(), &ratio(1, 2));
        assert!((model.trials()[0].tie() - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(model.trials()[1].tie(), 0.25);
    }

    #[test]
    fn model_parse_errors_name_the_field() {
        let err = parse_model(r#"{"trials": [{"t": "x", "w": 0}]}"#).unwrap_err();
        assert!(matches!(err, IoError::Field { ref field, .. } if field == "trials[0].t"));
        let err = parse_model(r#"{"trials": [{"t": "2/3", "w": "1/2"}]}"#).unwrap_err();
        assert!(matches!(err, IoError::Field { ref field, .. } if field == "trials[0]"));
        let err = parse_model("{").unwrap_err();
        assert!(matches!(err, IoError::Json { .. }));
    }

    #[test]
    fn pmf_parse_validates() {
        let pmf = parse_pmf(r#"{"n": 1, "probs": [0.25, 0.5, 0.25]}"#).unwrap();
        assert_eq!(pmf.probs(), &[0.25, 0.5, 0.25]);
        assert!(parse_pmf(r#"{"n": 1, "probs": [0.5, 0.5]}"#).is_err());
        assert!(parse_pmf(r#"{"n": 1, "probs": [0.5, 0.4, 0.2]}"#).is_err());
    }

    #[test]
    fn model_or_pmf_sniffs_the_format() {
        assert!(matches!(
            parse_model_or_pmf(r#"{"trials": [{"t": 0.5, "w": 0.25}]}"#),
            Ok(ModelOrPmf::Model(..))
        ));
        assert!(matches!(
            parse_model_or_pmf(r#"{"n": 1, "probs": [0.25, 0.5, 0.25]}"#),
            Ok(ModelOrPmf::Pmf(..))
        ));
        assert!(parse_model_or_pmf(r#"{"x": 1}"#).is_err());
    }

    #[test]
    fn instance_parse_builds_both_mirrors() {
        let text = r#"{
            "alpha": "1/10", "beta": "2/5",
            "team_a": [2, 1], "team_b": ["3/2", 0.5],
            "k": "1.5"
        }"#;
        let (instance, exact) = parse_instance(text).unwrap();
        assert_eq!(instance.k2(), 3);
        assert_eq!(instance.n(), 2);
        assert!((instance.model().alpha() - 0.1).abs() < 1e-16);
        assert_eq!(exact.alpha(), &ratio(1, 10));
        assert_eq!(exact.team_b()[0], ratio(3, 2));
    }

    #[test]
    fn instance_parse_rejects_off_grid_k() {
        let text = r#"{"alpha": 0.1, "beta": 0.4, "team_a": [1], "team_b": [1], "k": "0.3"}"#;
        let err = parse_instance(text).unwrap_err();
        assert!(matches!(err, IoError::Field { ref field, .. } if field == "k"));
    }

    #[test]
    fn instance_parse_rejects_domain_violations_exactly() {
        let text = r#"{"alpha": 0.1, "beta": 0.4, "team_a": [5, 0], "team_b": [5, 0], "k": 1}"#;
        let err = parse_instance(text).unwrap_err();
        assert!(matches!(err, IoError::Field { ref field, .. } if field == "instance"));
    }

    #[test]
    fn seventeen_digit_floats_round_trip() {
        #[derive(Serialize)]
        struct S {
            x: f64,
            k: u64,
        }
        let s = to_json_string_17(&S { x: 0.1, k: 3 });
        assert_eq!(s, r#"{"x":1.0000000000000001e-1,"k":3}"#);
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
    }

    #[test]
    fn coefficient_csv_leaves_the_last_q_cell_empty() {
        let model = TrinomialModel::from_pairs(&[(0.5, 0.25), (0.5, 0.25)]).unwrap();
        let decomp = crate::parity::split_parity(&model.pmf());
        let csv = coefficients_csv(&decomp);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "index,p_k,q_k");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,6.2500000000000000e-2,2.5000000000000000e-1"));
        assert!(lines[3].ends_with(","));
        assert!(csv.ends_with('\n'));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn ordering_csv_is_one_based_and_capped() {
        let (instance, _) = parse_instance(
            r#"{"alpha": 0.1, "beta": 0.5, "team_a": [1, 0], "team_b": [1, 0], "k": 1}"#,
        )
        .unwrap();
        let csv = ordering_tails_csv(&instance).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "ordering,tail");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("1 2,"));
        assert!(lines[2].starts_with("2 1,"));

        let big = format!(
            r#"{{"alpha": "1/64", "beta": 0.5, "team_a": {0}, "team_b": {0}, "k": 2}}"#,
            "[6, 5, 4, 3, 2, 1, 0]"
        );
        let (instance, _) = parse_instance(&big).unwrap();
        assert!(ordering_tails_csv(&instance).is_err());
    }

    #[test]
    fn exact_json_emitters_use_rational_strings() {
        let exact = RationalModel::from_grid(&[(1, 1, 3)]).unwrap();
        let value = model_json_exact(&exact);
        assert_eq!(value["trials"][0]["t"], "1/3");
        assert_eq!(value["trials"][0]["w"], "1/3");

        let matchup = RationalMatchup::new(
            ratio(1, 10),
            ratio(2, 5),
            vec![ratio(1, 1)],
            vec![ratio(1, 2)],
        )
        .unwrap();
        let value = instance_json_exact(&matchup, 1);
        assert_eq!(value["alpha"], "1/10");
        assert_eq!(value["k"], "0.5");
        let value = instance_json_exact(&matchup, 2);
        assert_eq!(value["k"], "1");
    }
}
