//! Registry of generating-function identities with symbolic and
//! random-point verification, plus exhaustive enumeration oracles that
//! check closed forms against brute-force weighted counts.
//!
//! Verification always builds both sides independently: left sides from
//! explicit polynomial families, right sides from exponential and
//! negative-binomial series. A report records per-degree agreement and the
//! first few mismatching coefficients, so a failing run says where the two
//! sides part ways.

pub mod builders;

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::budget::EnumerationBudget;
use crate::charlier::{charlier_c, factorial};
use crate::configs::{enumerate_configs, enumerate_h, multilinear_params};
use crate::error::{Error, Result};
use crate::polyring::{random_rational, Monomial, ParamSet, Polynomial, Rat};
use crate::series::TruncatedSeries;

pub use builders::{d_poly, Side};

/// Canonical keys accepted by [`Identity::lookup`], in registry order.
pub const IDENTITY_KEYS: &[&str] = &[
    "multilinear",
    "bilinear",
    "trilinear",
    "carlitz",
    "egf",
    "bilinear-general",
    "derangement-bilinear",
    "derangement-trilinear",
    "derangement-bilinear-general",
];

/// One registered identity; `Multilinear` carries the number of
/// configurations it is instantiated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    Multilinear { k: usize },
    Bilinear,
    Trilinear,
    Carlitz,
    Egf,
    BilinearGeneral,
    DerangementBilinear,
    DerangementTrilinear,
    DerangementBilinearGeneral,
}

impl Identity {
    /// Resolves a key from [`IDENTITY_KEYS`]; `k` only matters for
    /// `multilinear` (default 2).
    pub fn lookup(key: &str, k: Option<usize>) -> Result<Identity> {
        match key {
            "multilinear" => Ok(Identity::Multilinear { k: k.unwrap_or(2) }),
            "bilinear" => Ok(Identity::Bilinear),
            "trilinear" => Ok(Identity::Trilinear),
            "carlitz" => Ok(Identity::Carlitz),
            "egf" => Ok(Identity::Egf),
            "bilinear-general" => Ok(Identity::BilinearGeneral),
            "derangement-bilinear" => Ok(Identity::DerangementBilinear),
            "derangement-trilinear" => Ok(Identity::DerangementTrilinear),
            "derangement-bilinear-general" => Ok(Identity::DerangementBilinearGeneral),
            _ => Err(Error::UnknownIdentity(format!(
                "{key} (known: {})",
                IDENTITY_KEYS.join(", ")
            ))),
        }
    }

    pub fn key(&self) -> &'static str {
        match self {
            Identity::Multilinear { .. } => "multilinear",
            Identity::Bilinear => "bilinear",
            Identity::Trilinear => "trilinear",
            Identity::Carlitz => "carlitz",
            Identity::Egf => "egf",
            Identity::BilinearGeneral => "bilinear-general",
            Identity::DerangementBilinear => "derangement-bilinear",
            Identity::DerangementTrilinear => "derangement-trilinear",
            Identity::DerangementBilinearGeneral => "derangement-bilinear-general",
        }
    }

    /// Builds one side of the identity as a truncated series.
    pub fn build_side(&self, side: Side, order: u32) -> Result<TruncatedSeries> {
        match self {
            Identity::Multilinear { k } => builders::build_multilinear_side(side, *k, order),
            Identity::Bilinear => builders::build_bilinear_side(side, order),
            Identity::Trilinear => builders::build_trilinear_side(side, order),
            Identity::Carlitz => builders::build_carlitz_side(side, order),
            Identity::Egf => builders::build_egf_side(side, order),
            Identity::BilinearGeneral => builders::build_bilinear_general_side(side, order),
            Identity::DerangementBilinear => builders::build_derangement_side(side, order),
            Identity::DerangementTrilinear => {
                builders::build_derangement_trilinear_side(side, order)
            }
            Identity::DerangementBilinearGeneral => {
                builders::build_derangement_bilinear_general_side(side, order)
            }
        }
    }

    /// The right side with its exponential prefactor deliberately dropped.
    /// Comparing this against the left side must fail; the sensitivity
    /// tests use it to prove the verifier can reject.
    pub fn build_rhs_without_prefactor(&self, order: u32) -> Result<TruncatedSeries> {
        let (_prefactor, body) = match self {
            Identity::Multilinear { k } => builders::multilinear_rhs_parts(*k, order)?,
            Identity::Bilinear => builders::bilinear_rhs_parts(order)?,
            Identity::Trilinear => builders::trilinear_rhs_parts(order)?,
            Identity::Carlitz => builders::carlitz_rhs_parts(order)?,
            Identity::Egf => builders::egf_rhs_parts(order)?,
            Identity::BilinearGeneral => builders::bilinear_general_rhs_parts(order)?,
            Identity::DerangementBilinear => builders::derangement_rhs_parts(order)?,
            Identity::DerangementTrilinear => {
                builders::derangement_trilinear_rhs_parts(order)?
            }
            Identity::DerangementBilinearGeneral => {
                builders::derangement_bilinear_general_rhs_parts(order)?
            }
        };
        Ok(body)
    }
}

/// How to compare the two sides once both series are built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Exact coefficient-by-coefficient equality.
    Symbolic,
    /// Evaluate every coefficient at `points` seeded random rational
    /// parameter assignments and compare values.
    Random { points: u32, seed: u64 },
}

impl VerifyMode {
    fn label(&self) -> &'static str {
        match self {
            VerifyMode::Symbolic => "symbolic",
            VerifyMode::Random { .. } => "random",
        }
    }
}

/// One coefficient where the two sides disagree.
#[derive(Debug, Clone, Serialize)]
pub struct Mismatch {
    pub degree: u32,
    pub detail: String,
    pub lhs: String,
    pub rhs: String,
}

/// Outcome of a verification or oracle run.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub identity: String,
    pub mode: String,
    pub order: u32,
    pub verified: bool,
    /// One flag per total degree `0..=order`; `true` means every checked
    /// coefficient of that degree agreed.
    pub degree_flags: Vec<bool>,
    pub mismatches: Vec<Mismatch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<u32>,
    /// Wall-clock time; stripped before serialization when reproducible
    /// byte-for-byte output matters more than timing.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
}

impl VerificationReport {
    pub fn first_failing_degree(&self) -> Option<u32> {
        self.degree_flags.iter().position(|&ok| !ok).map(|d| d as u32)
    }

    /// Stable line-oriented rendering for terminals.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("identity: {}\n", self.identity));
        out.push_str(&format!("mode: {}\n", self.mode));
        out.push_str(&format!("order: {}\n", self.order));
        if let Some(seed) = self.seed {
            out.push_str(&format!("seed: {seed}\n"));
        }
        if let Some(points) = self.points {
            out.push_str(&format!("points: {points}\n"));
        }
        out.push_str(&format!("verified: {}\n", self.verified));
        match self.first_failing_degree() {
            Some(d) => out.push_str(&format!("first failing degree: {d}\n")),
            None => out.push_str("first failing degree: none\n"),
        }
        out.push_str(&format!("mismatches: {}\n", self.mismatches.len()));
        for m in &self.mismatches {
            out.push_str(&format!(
                "  degree {} {}: lhs = {}, rhs = {}\n",
                m.degree, m.detail, m.lhs, m.rhs
            ));
        }
        if let Some(ms) = self.elapsed_ms {
            out.push_str(&format!("elapsed ms: {ms}\n"));
        }
        out
    }
}

const MISMATCH_LIMIT: usize = 8;

fn monomial_label(names: &[String], mono: &Monomial) -> String {
    let mut parts = Vec::new();
    for (name, &exp) in names.iter().zip(mono.exponents()) {
        match exp {
            0 => {}
            1 => parts.push(name.clone()),
            e => parts.push(format!("{name}^{e}")),
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// Verifies one identity at the given truncation order.
pub fn verify(
    id: Identity,
    order: u32,
    mode: VerifyMode,
    budget: &EnumerationBudget,
) -> Result<VerificationReport> {
    budget.check_order(order)?;
    let start = Instant::now();
    let lhs = id.build_side(Side::Lhs, order)?;
    let rhs = id.build_side(Side::Rhs, order)?;
    finish_report(id.key(), order, mode, &lhs, &rhs, start)
}

/// Same comparison, but against the right side with its exponential
/// prefactor dropped; a functioning verifier reports failure here.
pub fn verify_without_prefactor(
    id: Identity,
    order: u32,
    budget: &EnumerationBudget,
) -> Result<VerificationReport> {
    budget.check_order(order)?;
    let start = Instant::now();
    let lhs = id.build_side(Side::Lhs, order)?;
    let rhs = id.build_rhs_without_prefactor(order)?;
    finish_report(id.key(), order, VerifyMode::Symbolic, &lhs, &rhs, start)
}

fn finish_report(
    key: &str,
    order: u32,
    mode: VerifyMode,
    lhs: &TruncatedSeries,
    rhs: &TruncatedSeries,
    start: Instant,
) -> Result<VerificationReport> {
    let (degree_flags, mismatches) = match mode {
        VerifyMode::Symbolic => compare_symbolic(lhs, rhs, order),
        VerifyMode::Random { points, seed } => compare_random(lhs, rhs, order, points, seed)?,
    };
    let verified = degree_flags.iter().all(|&ok| ok);
    let (seed, points) = match mode {
        VerifyMode::Symbolic => (None, None),
        VerifyMode::Random { points, seed } => (Some(seed), Some(points)),
    };
    Ok(VerificationReport {
        identity: key.to_string(),
        mode: mode.label().to_string(),
        order,
        verified,
        degree_flags,
        mismatches,
        seed,
        points,
        elapsed_ms: Some(start.elapsed().as_millis()),
    })
}

fn union_keys(lhs: &TruncatedSeries, rhs: &TruncatedSeries) -> BTreeSet<Monomial> {
    lhs.terms()
        .map(|(m, _)| m.clone())
        .chain(rhs.terms().map(|(m, _)| m.clone()))
        .collect()
}

fn compare_symbolic(
    lhs: &TruncatedSeries,
    rhs: &TruncatedSeries,
    order: u32,
) -> (Vec<bool>, Vec<Mismatch>) {
    let names = lhs.vars().names();
    let mut flags = vec![true; order as usize + 1];
    let mut mismatches = Vec::new();
    for mono in union_keys(lhs, rhs) {
        let cl = lhs
            .coefficient(mono.exponents())
            .expect("stored keys respect the order");
        let cr = rhs
            .coefficient(mono.exponents())
            .expect("stored keys respect the order");
        if cl != cr {
            let degree = mono.total_degree();
            flags[degree as usize] = false;
            if mismatches.len() < MISMATCH_LIMIT {
                mismatches.push(Mismatch {
                    degree,
                    detail: format!("coefficient of {}", monomial_label(names, &mono)),
                    lhs: cl.to_string(),
                    rhs: cr.to_string(),
                });
            }
        }
    }
    (flags, mismatches)
}

fn compare_random(
    lhs: &TruncatedSeries,
    rhs: &TruncatedSeries,
    order: u32,
    points: u32,
    seed: u64,
) -> Result<(Vec<bool>, Vec<Mismatch>)> {
    let names = lhs.vars().names();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let assignments: Vec<BTreeMap<String, Rat>> = (0..points)
        .map(|_| {
            lhs.params()
                .names()
                .iter()
                .map(|n| (n.clone(), random_rational(&mut rng)))
                .collect()
        })
        .collect();
    let keys = union_keys(lhs, rhs);
    let mut flags = vec![true; order as usize + 1];
    let mut mismatches = Vec::new();
    for mono in &keys {
        let cl = lhs
            .coefficient(mono.exponents())
            .expect("stored keys respect the order");
        let cr = rhs
            .coefficient(mono.exponents())
            .expect("stored keys respect the order");
        if cl == cr {
            continue;
        }
        for (idx, point) in assignments.iter().enumerate() {
            let vl = cl.eval(point)?;
            let vr = cr.eval(point)?;
            if vl != vr {
                let degree = mono.total_degree();
                flags[degree as usize] = false;
                if mismatches.len() < MISMATCH_LIMIT {
                    mismatches.push(Mismatch {
                        degree,
                        detail: format!(
                            "coefficient of {} at point {idx}",
                            monomial_label(names, mono)
                        ),
                        lhs: vl.to_string(),
                        rhs: vr.to_string(),
                    });
                }
            }
        }
    }
    Ok((flags, mismatches))
}

/// Which exhaustive oracle to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    /// Weighted count of all configurations on `[n]` against the
    /// closed-form polynomial.
    Config,
    /// Weighted count of all `k`-tuples on `[n]` against `n!` times the
    /// matching series coefficient of the multilinear identity.
    H,
}

/// Runs one oracle: enumerate everything, sum the weights, compare with
/// the closed form. The result reuses the report shape with a single
/// pass/fail flag and mode `"exhaustive"`.
pub fn oracle_compare(
    kind: OracleKind,
    k: usize,
    n: u32,
    budget: &EnumerationBudget,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let (identity, params, sum, expected) = match kind {
        OracleKind::Config => {
            let params = ParamSet::new(["a", "r"]);
            let labels: Vec<u32> = (1..=n).collect();
            let mut sum = Polynomial::zero(&params);
            for config in enumerate_configs(&labels, budget)? {
                sum = sum.add(&config.weight(&params, "a", "r"))?;
            }
            let expected = charlier_c(n, &params, "a", "r");
            ("oracle-config", params, sum, expected)
        }
        OracleKind::H => {
            let params = multilinear_params(k);
            let mut sum = Polynomial::zero(&params);
            for tuple in enumerate_h(k, n, budget)? {
                sum = sum.add(&tuple.weight(&params))?;
            }
            let series = builders::build_multilinear_side(Side::Lhs, k, n)?;
            let expected = series
                .coefficient(&[n])?
                .scale(&Rat::from_integer(factorial(n)));
            ("oracle-H", params, sum, expected)
        }
    };

    let mut mismatches = Vec::new();
    let keys: BTreeSet<Monomial> = sum
        .terms()
        .map(|(m, _)| m.clone())
        .chain(expected.terms().map(|(m, _)| m.clone()))
        .collect();
    for mono in keys {
        let cl = sum.coefficient(&mono);
        let cr = expected.coefficient(&mono);
        if cl != cr && mismatches.len() < MISMATCH_LIMIT {
            mismatches.push(Mismatch {
                degree: mono.total_degree(),
                detail: format!("coefficient of {}", monomial_label(params.names(), &mono)),
                lhs: cl.to_string(),
                rhs: cr.to_string(),
            });
        }
    }
    let verified = sum == expected;
    Ok(VerificationReport {
        identity: identity.to_string(),
        mode: "exhaustive".to_string(),
        order: n,
        verified,
        degree_flags: vec![verified],
        mismatches,
        seed: None,
        points: None,
        elapsed_ms: Some(start.elapsed().as_millis()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charlier::derangement_poly;
    use crate::polyring::rat;
    use num::One;

    fn budget() -> EnumerationBudget {
        EnumerationBudget::default()
    }

    fn check_symbolic(key: &str, k: Option<usize>, order: u32) -> VerificationReport {
        let id = Identity::lookup(key, k).unwrap();
        verify(id, order, VerifyMode::Symbolic, &budget()).unwrap()
    }

    #[test]
    fn every_identity_verifies_at_small_order() {
        for key in IDENTITY_KEYS {
            let report = check_symbolic(key, None, 3);
            assert!(report.verified, "{key} failed:\n{}", report.render_text());
            assert_eq!(report.degree_flags, vec![true; 4]);
            assert!(report.mismatches.is_empty());
        }
    }

    #[test]
    fn multilinear_verifies_for_three_configurations() {
        let report = check_symbolic("multilinear", Some(3), 3);
        assert!(report.verified, "{}", report.render_text());
    }

    #[test]
    fn egf_sides_match_known_coefficients() {
        let lhs = builders::build_egf_side(Side::Lhs, 4).unwrap();
        let rhs = builders::build_egf_side(Side::Rhs, 4).unwrap();
        let params = lhs.params();
        // [x^1] = C_1 = r + a, [x^2] = C_2/2 = (r^2 + 2ar + a^2 + a)/2
        let c1 = Polynomial::var(params, "r").add(&Polynomial::var(params, "a")).unwrap();
        assert_eq!(lhs.coefficient(&[1]).unwrap(), c1);
        assert_eq!(rhs.coefficient(&[1]).unwrap(), c1);
        let c2 = charlier_c(2, params, "a", "r").scale(&rat(1, 2));
        assert_eq!(rhs.coefficient(&[2]).unwrap(), c2);
    }

    #[test]
    fn bilinear_first_coefficient_is_a_product_of_linear_factors() {
        let lhs = builders::build_bilinear_side(Side::Lhs, 2).unwrap();
        let params = lhs.params();
        let expected = charlier_c(1, params, "a", "r")
            .mul(&charlier_c(1, params, "b", "s"))
            .unwrap();
        assert_eq!(lhs.coefficient(&[1]).unwrap(), expected);
    }

    #[test]
    fn carlitz_matches_the_zeroed_trilinear_slice() {
        let order = 3;
        for side in [Side::Lhs, Side::Rhs] {
            let tri = builders::build_trilinear_side(side, order)
                .unwrap()
                .set_var_zero("x")
                .unwrap();
            let car = builders::build_carlitz_side(side, order).unwrap();
            assert_eq!(tri, car);
        }
    }

    #[test]
    fn multilinear_with_two_configurations_linear_coefficient() {
        let lhs = builders::build_multilinear_side(Side::Lhs, 2, 2).unwrap();
        let params = lhs.params();
        // [z^1] = x12 * C_1(a1, r1) * C_1(a2, r2)
        let expected = Polynomial::term(params, Rat::one(), &[("x12", 1)])
            .mul(&charlier_c(1, params, "a1", "r1"))
            .unwrap()
            .mul(&charlier_c(1, params, "a2", "r2"))
            .unwrap();
        assert_eq!(lhs.coefficient(&[1]).unwrap(), expected);
    }

    #[test]
    fn derangement_closed_form_agrees_with_brute_force() {
        let params = ParamSet::new(["alpha"]);
        for n in 0..=6 {
            let brute = derangement_poly(n, &params, "alpha", &budget()).unwrap();
            assert_eq!(d_poly(n, &params, "alpha"), brute, "n = {n}");
        }
    }

    #[test]
    fn derangement_series_starts_with_the_right_terms()  {
        let lhs = builders::build_derangement_side(Side::Lhs, 3).unwrap();
        let params = lhs.params();
        // D_1 = 0 kills [x^1]; [x^2] = D_2(alpha) D_2(beta) / 2 = alpha*beta/2
        assert!(lhs.coefficient(&[1]).unwrap().is_zero());
        let expected = Polynomial::term(params, rat(1, 2), &[("alpha", 1), ("beta", 1)]);
        assert_eq!(lhs.coefficient(&[2]).unwrap(), expected);
    }

    #[test]
    fn random_mode_agrees_with_symbolic_on_a_true_identity() {
        let id = Identity::lookup("bilinear", None).unwrap();
        let report = verify(
            id,
            4,
            VerifyMode::Random { points: 5, seed: 0 },
            &budget(),
        )
        .unwrap();
        assert!(report.verified, "{}", report.render_text());
        assert_eq!(report.seed, Some(0));
        assert_eq!(report.points, Some(5));
    }

    #[test]
    fn dropping_the_prefactor_fails_at_degree_one() {
        for key in ["egf", "bilinear"] {
            let id = Identity::lookup(key, None).unwrap();
            let report = verify_without_prefactor(id, 3, &budget()).unwrap();
            assert!(!report.verified, "{key} should fail without its prefactor");
            assert_eq!(report.first_failing_degree(), Some(1), "{key}");
            assert!(!report.mismatches.is_empty());
        }
    }

    #[test]
    fn unknown_keys_and_bad_arity_are_rejected() {
        assert!(matches!(
            Identity::lookup("nosuch", None),
            Err(Error::UnknownIdentity(_))
        ));
        let id = Identity::lookup("multilinear", Some(1)).unwrap();
        assert!(id.build_side(Side::Lhs, 2).is_err());
    }

    #[test]
    fn order_cap_applies_unless_forced() {
        let id = Identity::lookup("egf", None).unwrap();
        assert!(matches!(
            verify(id, 13, VerifyMode::Symbolic, &budget()),
            Err(Error::BudgetExceeded(_))
        ));
        let report = verify(id, 13, VerifyMode::Symbolic, &EnumerationBudget::forced()).unwrap();
        assert!(report.verified);
    }

    #[test]
    fn config_oracle_matches_the_closed_form() {
        for n in 0..=4 {
            let report = oracle_compare(OracleKind::Config, 2, n, &budget()).unwrap();
            assert!(report.verified, "n = {n}:\n{}", report.render_text());
            assert_eq!(report.mode, "exhaustive");
        }
    }

    #[test]
    fn tuple_oracle_matches_the_series_coefficient() {
        for n in 0..=3 {
            let report = oracle_compare(OracleKind::H, 2, n, &budget()).unwrap();
            assert!(report.verified, "k = 2, n = {n}:\n{}", report.render_text());
        }
        let report = oracle_compare(OracleKind::H, 3, 2, &budget()).unwrap();
        assert!(report.verified, "k = 3, n = 2:\n{}", report.render_text());
    }

    #[test]
    fn report_renders_stable_text_and_json() {
        let id = Identity::lookup("egf", None).unwrap();
        let mut report = verify(id, 2, VerifyMode::Symbolic, &budget()).unwrap();
        report.elapsed_ms = None;
        let text = report.render_text();
        assert!(text.starts_with("identity: egf\nmode: symbolic\norder: 2\nverified: true\n"));
        let json = serde_json::to_string_pretty(&report).unwrap();
        assert!(!json.contains("elapsed_ms"));
        assert!(!json.contains("\"seed\""));
        assert!(json.contains("\"degree_flags\""));
        assert_eq!(json, serde_json::to_string_pretty(&report).unwrap());
    }
}
