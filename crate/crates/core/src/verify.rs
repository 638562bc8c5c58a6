//! Built-in identity suites run by `porosity verify`.
//!
//! A check that errors is recorded as failed with the error text, so one
//! broken computation does not hide the rest of a suite.

use serde::{Deserialize, Serialize};

use crate::constructions::{default_split_pair, named_construction};
use crate::error::{Error, Result};
use crate::gap_analysis::{default_epsilon, default_tol, porosity_plus};
use crate::porosity_metrics::{c_e_estimate, c_tau, classify_csp, Verdict};
use crate::pretangent::sample_r_star;
use crate::rational::{rat, ExactRational, Extended};
use crate::sequence::TruncatedSequence;
use crate::set_model::{make_set, rescale, ExponentRule, PorousSet, SetSpec};

pub const SUITE_NAMES: &[&str] = &["csp-identities", "scale-invariance", "geometric", "self-similarity"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub depth: usize,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: impl Into<String>, outcome: Result<(bool, String)>) -> Check {
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

fn w() -> SetSpec {
    SetSpec::super_geometric(ExponentRule::square())
}

/// Runs one suite, or every suite for `"all"`.
pub fn run_suite(name: &str, depth: usize) -> Result<Vec<SuiteReport>> {
    let names: Vec<&str> = match name {
        "all" => SUITE_NAMES.to_vec(),
        n if SUITE_NAMES.contains(&n) => vec![n],
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown suite {other}; expected all or one of {}",
                SUITE_NAMES.join(", ")
            )))
        }
    };
    Ok(names
        .into_iter()
        .map(|n| {
            let checks = match n {
                "csp-identities" => csp_identities(depth),
                "scale-invariance" => scale_invariance(depth),
                "geometric" => geometric(depth),
                _ => self_similarity(depth),
            };
            SuiteReport {
                suite: n.to_string(),
                depth,
                checks,
            }
        })
        .collect())
}

fn csp_identities(depth: usize) -> Vec<Check> {
    let eps = default_epsilon();
    let mut out = Vec::new();
    for (name, factor, m) in [
        ("super-geometric", None, rat(1, 1)),
        ("factorial", None, rat(1, 1)),
        ("doubled", Some(rat(2, 1)), rat(2, 1)),
        ("doubled", Some(rat(3, 1)), rat(3, 1)),
        ("split-pair-e1-star", None, rat(1, 1)),
    ] {
        let label = match &factor {
            Some(f) => format!("{name} {f}"),
            None => name.to_string(),
        };
        out.push(check(
            format!("{label}: csp with M = C_E = {m}"),
            (|| {
                let c = named_construction(name, factor.clone())?;
                let cert = classify_csp(&c.set, depth, &eps)?;
                let got_m = cert.m_value.map(|v| v.value);
                let ce = c_e_estimate(&c.set, depth, &eps, 4)?.value;
                Ok((
                    cert.verdict == Verdict::Csp && got_m.as_ref() == Some(&m) && ce == Extended::Finite(m.clone()),
                    format!(
                        "verdict {}, M {:?}, C_E {ce}",
                        cert.verdict,
                        got_m.map(|v| v.to_string())
                    ),
                ))
            })(),
        ));
    }
    out.push(check(
        "split-pair-union: not csp",
        (|| {
            let u = make_set(default_split_pair().union_spec())?;
            let cert = classify_csp(&u, depth, &eps)?;
            Ok((cert.verdict == Verdict::NotCsp, format!("verdict {}", cert.verdict)))
        })(),
    ));
    out
}

/// Everything that should not change under `x ↦ t·x`.
#[derive(Debug, PartialEq, Eq)]
struct Invariants {
    p_plus: Option<ExactRational>,
    verdict: Verdict,
    m: Option<ExactRational>,
    c_e: Extended,
}

fn invariants(set: &PorousSet, depth: usize) -> Result<Invariants> {
    let eps = default_epsilon();
    let cert = classify_csp(set, depth, &eps)?;
    Ok(Invariants {
        p_plus: porosity_plus(set, depth).ok().map(|p| p.estimate),
        verdict: cert.verdict,
        m: cert.m_value.map(|m| m.value),
        c_e: c_e_estimate(set, depth, &eps, 4)?.value,
    })
}

fn scale_invariance(depth: usize) -> Vec<Check> {
    let specs = [
        ("geometric 1/2", SetSpec::geometric(rat(1, 2))),
        ("super-geometric", w()),
        ("doubled 2", SetSpec::doubled(w(), rat(2, 1))),
        ("split-pair-union", default_split_pair().union_spec()),
    ];
    let mut out = Vec::new();
    for (label, spec) in specs {
        for t in [rat(2, 1), rat(1, 3), rat(7, 5)] {
            out.push(check(
                format!("{label} scaled by {t}"),
                (|| {
                    let set = make_set(spec.clone())?;
                    let base = invariants(&set, depth)?;
                    let scaled = invariants(&rescale(&set, &t)?, depth)?;
                    Ok((base == scaled, format!("{base:?} vs {scaled:?}")))
                })(),
            ));
        }
    }
    out
}

fn geometric(depth: usize) -> Vec<Check> {
    let eps = default_epsilon();
    let mut out = Vec::new();
    for q in [rat(1, 2), rat(1, 3), rat(9, 10)] {
        out.push(check(
            format!("geometric {q}: p+ = 1 - q, not csp, C(enumeration) infinite"),
            (|| {
                let set = make_set(SetSpec::geometric(q.clone()))?;
                let p = porosity_plus(&set, depth)?;
                let expected = ExactRational::one().checked_sub(&q).expect("q < 1");
                let verdict = classify_csp(&set, depth, &eps)?.verdict;
                let tau = TruncatedSequence::from_set(&set, depth)?;
                let ct = c_tau(&set, &tau, depth, &eps)?.value;
                Ok((
                    p.estimate == expected && p.converged && verdict == Verdict::NotCsp && ct == Extended::Infinite,
                    format!(
                        "p+ {} (converged {}), verdict {verdict}, C(tau) {ct}",
                        p.estimate, p.converged
                    ),
                ))
            })(),
        ));
    }
    out
}

fn self_similarity(depth: usize) -> Vec<Check> {
    let tol = default_tol();
    let mut out = Vec::new();
    for (label, spec, m) in [
        ("super-geometric", w(), rat(1, 1)),
        ("doubled 2", SetSpec::doubled(w(), rat(2, 1)), rat(2, 1)),
        ("doubled 3", SetSpec::doubled(w(), rat(3, 1)), rat(3, 1)),
    ] {
        out.push(check(
            format!("{label}: R* = C_E = {m}, R* R_low = 1"),
            (|| {
                let set = make_set(spec.clone())?;
                let s = sample_r_star(&set, depth, 4, &tol)?;
                let low_ok = s.r_low == Extended::Finite(m.recip());
                let unit = s.spaces.iter().any(|sp| sp.has_unit_sphere);
                Ok((
                    s.r_star == m && s.c_e == Extended::Finite(m.clone()) && low_ok && unit,
                    format!(
                        "R* {}, R_low {}, C_E {}, unit sphere seen {unit}",
                        s.r_star, s.r_low, s.c_e
                    ),
                ))
            })(),
        ));
    }
    out
}
