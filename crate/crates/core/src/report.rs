//! JSON report assembled by the command-line driver.
//!
//! Every estimate travels with a flag saying whether it converged or how it
//! was obtained. Reports contain no wall-clock data unless timings are
//! requested, so identical invocations produce identical bytes.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gap_analysis::{consecutive_gaps, porosity_plus_with_tol, Gap, ProfilePoint};
use crate::porosity_metrics::{c_e_estimate, classify_csp, PorosityCertificate, Verdict};
use crate::pretangent::{sample_r_star, RStarSample};
use crate::rational::{ExactRational, Extended};
use crate::sequence::TruncatedSequence;
use crate::set_model::{PorousSet, SetSpec, TriState};

/// Number of enumeration shifts used when sampling C_E and R*.
pub const DEFAULT_TRIALS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameters {
    pub depth: usize,
    pub epsilon: ExactRational,
    pub tol: ExactRational,
    pub bit_budget: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PorositySection {
    pub p_plus: ExactRational,
    pub converged: bool,
    pub partial: bool,
    pub profile: Vec<ProfilePoint>,
}

/// A reported number with how far it can be trusted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: Extended,
    pub converged: bool,
    pub provenance: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quantities {
    #[serde(rename = "M")]
    pub m: Option<Quantity>,
    #[serde(rename = "C_E")]
    pub c_e: Option<Quantity>,
    #[serde(rename = "R_star")]
    pub r_star: Option<Quantity>,
    #[serde(rename = "R_low")]
    pub r_low: Option<Quantity>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witnesses {
    pub gaps: Vec<Gap>,
    pub achieving_tau: Option<TruncatedSequence>,
    pub sampling: Option<RStarSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub command: String,
    pub set_spec: SetSpec,
    pub parameters: Parameters,
    pub zero_isolated: TriState,
    pub porosity: Option<PorositySection>,
    pub csp: Option<PorosityCertificate>,
    pub quantities: Quantities,
    pub witnesses: Witnesses,
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Tab-separated `h`, `λ(E,0,h)/h` (exact), then both as decimals.
    pub fn plot_tsv(&self) -> String {
        let mut out = String::from("h\tlambda_over_h\th_approx\tlambda_over_h_approx\n");
        if let Some(p) = &self.porosity {
            for pt in &p.profile {
                out.push_str(&format!(
                    "{}\t{}\t{:e}\t{}\n",
                    pt.h,
                    pt.ratio,
                    pt.h.to_f64(),
                    pt.ratio.to_f64()
                ));
            }
        }
        out
    }
}

/// Which sections a command fills in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stages {
    Analyze,
    Classify,
    Simulate,
}

struct Clock {
    enabled: bool,
    marks: BTreeMap<String, f64>,
}

impl Clock {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.enabled {
            self.marks.insert(stage.to_string(), start.elapsed().as_secs_f64());
        }
        out
    }
}

/// Runs the requested analyses on `set`.
pub fn build_report(
    command: &str,
    stages: Stages,
    set: &PorousSet,
    params: Parameters,
    timings: bool,
) -> Result<AnalysisReport> {
    let mut clock = Clock {
        enabled: timings,
        marks: BTreeMap::new(),
    };
    let depth = params.depth;
    let zero_isolated = set.zero_isolated();
    let mut notes = Vec::new();
    let mut witnesses = Witnesses::default();
    let mut quantities = Quantities::default();
    let mut porosity = None;

    if stages == Stages::Analyze {
        let listing = clock.time("enumerate", || set.enumerate_available(depth))?;
        witnesses.gaps = consecutive_gaps(&listing.points);
        if listing.complete {
            notes.push(format!("finite set with {} points", listing.points.len()));
        }
        match clock.time("porosity", || porosity_plus_with_tol(set, depth, &params.tol)) {
            Ok(p) => {
                porosity = Some(PorositySection {
                    p_plus: p.estimate,
                    converged: p.converged,
                    partial: p.partial,
                    profile: p.profile,
                })
            }
            Err(Error::ZeroIsolated) => notes.push("0 is isolated; porosity at 0 is not defined".into()),
            Err(e) => return Err(e),
        }
    }

    let csp = clock.time("classify", || classify_csp(set, depth, &params.epsilon))?;
    if let Some(m) = &csp.m_value {
        quantities.m = Some(Quantity {
            value: Extended::Finite(m.value.clone()),
            converged: m.converged,
            provenance: format!("universal chain at epsilon {}", params.epsilon),
        });
    }

    if stages != Stages::Classify && zero_isolated != TriState::Yes {
        let ce = clock.time("c_e", || c_e_estimate(set, depth, &params.epsilon, DEFAULT_TRIALS))?;
        let pinned = csp.verdict == Verdict::Csp
            && csp
                .m_value
                .as_ref()
                .is_some_and(|m| Extended::Finite(m.value.clone()) == ce.value);
        quantities.c_e = Some(Quantity {
            value: ce.value.clone(),
            converged: pinned,
            provenance: if pinned {
                "sampled maximum, equal to M".into()
            } else {
                format!("sampled lower bound over {} sequences", ce.samples)
            },
        });
        witnesses.achieving_tau = Some(ce.achieving_tau);

        let sample = clock.time("r_star", || sample_r_star(set, depth, DEFAULT_TRIALS, &params.tol))?;
        let attains = Extended::Finite(sample.r_star.clone()) == ce.value;
        let product_one = match &sample.r_low {
            Extended::Finite(low) => &sample.r_star * low == ExactRational::one(),
            Extended::Infinite => false,
        };
        quantities.r_star = Some(Quantity {
            value: Extended::Finite(sample.r_star.clone()),
            converged: attains,
            provenance: format!(
                "maximum over {} sampled spaces",
                sample.spaces.len() + sample.witness.is_some() as usize
            ),
        });
        quantities.r_low = Some(Quantity {
            value: sample.r_low.clone(),
            converged: product_one,
            provenance: "minimum over the same spaces".into(),
        });
        if stages == Stages::Simulate {
            witnesses.sampling = Some(sample);
        }
    }

    Ok(AnalysisReport {
        command: command.to_string(),
        set_spec: set.spec().clone(),
        parameters: params,
        zero_isolated,
        porosity,
        csp: Some(csp),
        quantities,
        witnesses,
        notes,
        timings: timings.then_some(clock.marks),
    })
}
