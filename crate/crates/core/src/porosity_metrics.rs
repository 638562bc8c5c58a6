//! Quantitative porosity at 0: the ≍ test, the k/K interval criterion for
//! τ-strong porosity, C(τ), C_E, M of a universal chain, and the CSP
//! classifier with certificates.
//!
//! Indices in results are 1-based, matching the sequence index `n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gap_analysis::{
    admissible_chains, consecutive_gaps, deep_start, default_tol, universal_chain, Gap, GapChain,
};
use crate::rational::{ExactRational, Extended};
use crate::sequence::{SequenceSource, TruncatedSequence};
use crate::set_model::{PorousSet, TriState};

/// Exponents `j` with `k = 2^j` tried by the not-csp search.
pub const K_EXPONENTS: std::ops::RangeInclusive<u32> = 1..=10;
/// Exponents `j` with `K = k·2^j` tried for each `k`.
pub const WIDTH_EXPONENTS: std::ops::RangeInclusive<u32> = 1..=10;

/// Smallest point of a descending list strictly above `x`.
pub(crate) fn next_point_above<'a>(points: &'a [ExactRational], x: &ExactRational) -> Option<&'a ExactRational> {
    let above = points.partition_point(|p| p > x);
    above.checked_sub(1).map(|i| &points[i])
}

pub(crate) fn contains_desc(points: &[ExactRational], x: &ExactRational) -> bool {
    points.binary_search_by(|p| x.cmp(p)).is_ok()
}

fn check_membership(points: &[ExactRational], tau: &TruncatedSequence) -> Result<()> {
    if tau.source() == SequenceSource::External {
        return Ok(());
    }
    match tau.values().iter().position(|t| !contains_desc(points, t)) {
        Some(i) => Err(Error::TauNotInSet { index: i + 1 }),
        None => Ok(()),
    }
}

fn check_deep_decreasing(tau: &TruncatedSequence) -> Result<()> {
    match tau.last_increase() {
        Some(i) if i > deep_start(tau.len()) => Err(Error::NotAlmostDecreasing { index: i }),
        _ => Ok(()),
    }
}

/// Outcome of testing `a ≍ γ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsympResult {
    pub equivalent: TriState,
    /// Power-of-two brackets with `c1·a_n < γ_n < c2·a_n` on the deep half.
    pub c1: ExactRational,
    pub c2: ExactRational,
}

fn lower_bracket(x: &ExactRational) -> ExactRational {
    let k = x.floor_log2();
    let p = ExactRational::pow2(k);
    if p == *x {
        x * &ExactRational::one().checked_sub(&default_tol()).unwrap()
    } else {
        p
    }
}

fn upper_bracket(x: &ExactRational) -> ExactRational {
    let k = x.floor_log2();
    if ExactRational::pow2(k) == *x {
        x * &(&ExactRational::one() + &default_tol())
    } else {
        ExactRational::pow2(k + 1)
    }
}

fn ratio_bracket(a: &[ExactRational], g: &[ExactRational]) -> (ExactRational, ExactRational) {
    let start = deep_start(a.len());
    let ratios: Vec<ExactRational> = a[start..].iter().zip(&g[start..]).map(|(x, y)| y / x).collect();
    let lo = ratios.iter().min().expect("nonempty");
    let hi = ratios.iter().max().expect("nonempty");
    (lower_bracket(lo), upper_bracket(hi))
}

/// Tests `c1·a_n < γ_n < c2·a_n` by comparing power-of-two brackets of the
/// deep-half ratio at `depth` and `depth/2`.
pub fn is_asymp(a: &TruncatedSequence, g: &TruncatedSequence, depth: usize) -> Result<AsympResult> {
    if a.len() != g.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: g.len(),
        });
    }
    if depth < 8 || depth > a.len() {
        return Err(Error::InvalidParameter(format!(
            "depth must lie in [8, {}], got {depth}",
            a.len()
        )));
    }
    let (av, gv) = (&a.values()[..depth], &g.values()[..depth]);
    let full = ratio_bracket(av, gv);
    let half = ratio_bracket(&av[..depth / 2], &gv[..depth / 2]);
    let equivalent = if full == half {
        TriState::Yes
    } else {
        let ratios: Vec<ExactRational> = av[depth / 4..]
            .iter()
            .zip(&gv[depth / 4..])
            .map(|(x, y)| y / x)
            .collect();
        let falling = ratios.windows(2).all(|w| w[1] < w[0]);
        let rising = ratios.windows(2).all(|w| w[1] > w[0]);
        if falling || rising {
            TriState::No
        } else {
            TriState::Unknown
        }
    };
    Ok(AsympResult {
        equivalent,
        c1: full.0,
        c2: full.1,
    })
}

/// A set point inside `(k·τ_n, K·τ_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Violation {
    pub index: usize,
    pub point: ExactRational,
    pub k: ExactRational,
    #[serde(rename = "K")]
    pub big_k: ExactRational,
}

impl Violation {
    /// Re-checks that `point` is in the set prefix and strictly inside the
    /// interval around `tau[index]`.
    pub fn verify(&self, points: &[ExactRational], tau: &TruncatedSequence) -> bool {
        let t = match tau.values().get(self.index.wrapping_sub(1)) {
            Some(t) => t,
            None => return false,
        };
        contains_desc(points, &self.point) && self.point > &self.k * t && self.point < &self.big_k * t
    }
}

/// Outcome of the k/K interval test for one pair `(k, K)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauPorosityResult {
    pub holds_eventually: TriState,
    /// Smallest `n` after which no violation was seen.
    pub first_good_index: Option<usize>,
    pub violations: Vec<Violation>,
}

/// Violations of `(kτ_n, Kτ_n) ∩ E = ∅` for every `n`, in index order.
fn interval_violations(
    points: &[ExactRational],
    tau: &[ExactRational],
    k: &ExactRational,
    big_k: &ExactRational,
) -> Vec<Violation> {
    tau.iter()
        .enumerate()
        .filter_map(|(i, t)| {
            let low = k * t;
            let p = next_point_above(points, &low)?;
            (*p < big_k * t).then(|| Violation {
                index: i + 1,
                point: p.clone(),
                k: k.clone(),
                big_k: big_k.clone(),
            })
        })
        .collect()
}

/// Checks whether `(kτ_n, Kτ_n)` misses the set for all large `n`.
///
/// `No` when a violation occurs in the deep half of `τ`. `Yes` when there is
/// none and the gap above `kτ_n`, relative to `τ_n`, does not shrink there.
pub fn tau_porosity_test(
    set: &PorousSet,
    tau: &TruncatedSequence,
    k: &ExactRational,
    big_k: &ExactRational,
    depth: usize,
) -> Result<TauPorosityResult> {
    if *k <= ExactRational::one() || big_k <= k {
        return Err(Error::InvalidParameter(format!(
            "need 1 < k < K, got k = {k}, K = {big_k}"
        )));
    }
    let points = set.enumerate_available(depth)?.points;
    check_membership(&points, tau)?;
    let violations = interval_violations(&points, tau.values(), k, big_k);
    let start = deep_start(tau.len());
    let first_good_index = match violations.last() {
        None => Some(1),
        Some(v) if v.index < tau.len() => Some(v.index + 1),
        Some(_) => None,
    };
    let holds_eventually = if violations.iter().any(|v| v.index > start) {
        TriState::No
    } else {
        let reach: Vec<Extended> = tau.values()[start..]
            .iter()
            .map(|t| match next_point_above(&points, &(k * t)) {
                Some(p) => Extended::Finite(p / t),
                None => Extended::Infinite,
            })
            .collect();
        if reach.windows(2).all(|w| w[1] >= w[0]) {
            TriState::Yes
        } else {
            TriState::Unknown
        }
    };
    Ok(TauPorosityResult {
        holds_eventually,
        first_good_index,
        violations,
    })
}

/// C(τ) at finite depth with the chain realizing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CTauResult {
    pub value: Extended,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<GapChain>,
}

fn admissible_from_points(points: &[ExactRational], epsilon: &ExactRational) -> Vec<Gap> {
    consecutive_gaps(points)
        .into_iter()
        .filter(|g| g.is_admissible(epsilon))
        .collect()
}

/// For each deep-half `τ_n`, the admissible gap with the smallest left
/// endpoint `a_n >= τ_n`; the value is the largest `a_n/τ_n`.
fn c_tau_on(
    points: &[ExactRational],
    admissible: &[Gap],
    tau: &[ExactRational],
    epsilon: &ExactRational,
) -> CTauResult {
    let mut value = Extended::Finite(ExactRational::zero());
    let mut used: Vec<&Gap> = Vec::new();
    for t in &tau[deep_start(tau.len())..] {
        let reaching = admissible.partition_point(|g| g.left >= *t);
        match reaching.checked_sub(1) {
            None => {
                return CTauResult {
                    value: Extended::Infinite,
                    chain: None,
                }
            }
            Some(i) => {
                let g = &admissible[i];
                let r = Extended::Finite(&g.left / t);
                if r > value {
                    value = r;
                }
                if used.last().is_none_or(|u| *u != g) {
                    used.push(g);
                }
            }
        }
    }
    let chain = GapChain::new(used.into_iter().cloned().collect(), epsilon.clone(), points.len())
        .expect("admissible gaps in order");
    CTauResult {
        value,
        chain: Some(chain),
    }
}

/// Finite-depth C(τ): infimum over admissible chains dominating `τ` of the
/// deep-half maximum of `a_n/τ_n`. Infinite when no admissible gap lies above
/// some deep `τ_n`.
pub fn c_tau(set: &PorousSet, tau: &TruncatedSequence, depth: usize, epsilon: &ExactRational) -> Result<CTauResult> {
    validate_epsilon(epsilon)?;
    check_deep_decreasing(tau)?;
    let points = set.enumerate_available(depth)?.points;
    check_membership(&points, tau)?;
    let admissible = admissible_from_points(&points, epsilon);
    Ok(c_tau_on(&points, &admissible, tau.values(), epsilon))
}

fn validate_epsilon(epsilon: &ExactRational) -> Result<()> {
    if !epsilon.is_positive() || *epsilon >= ExactRational::one() {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    Ok(())
}

/// Sequences in the set used as test inputs for C_E and the not-csp search:
/// enumeration suffixes, stride-2 and stride-3 decimations, left endpoints of
/// admissible chains, and right endpoints of admissible gaps.
pub fn tau_samples(points: &[ExactRational], epsilon: &ExactRational, suffixes: usize) -> Vec<TruncatedSequence> {
    const MIN_LEN: usize = 4;
    let mut out: Vec<TruncatedSequence> = Vec::new();
    let mut push = |values: Vec<ExactRational>, source: SequenceSource, rule: String| {
        if values.len() < MIN_LEN || out.iter().any(|s| s.values() == values.as_slice()) {
            return;
        }
        out.push(
            TruncatedSequence::new(values, source)
                .expect("set points are positive")
                .with_rule(rule),
        );
    };
    for j in 0..suffixes.max(1) {
        if j < points.len() {
            push(
                points[j..].to_vec(),
                SequenceSource::FromSetEnumeration,
                format!("enumeration from n = {}", j + 1),
            );
        }
    }
    for stride in [2usize, 3] {
        for offset in 0..stride {
            let values: Vec<ExactRational> = points.iter().skip(offset).step_by(stride).cloned().collect();
            push(
                values,
                SequenceSource::FromSetEnumeration,
                format!("every {stride}th point from n = {}", offset + 1),
            );
        }
    }
    let admissible = admissible_from_points(points, epsilon);
    let mut runs: Vec<Vec<Gap>> = Vec::new();
    let mut last_right: Option<&ExactRational> = None;
    for g in &admissible {
        match (runs.last_mut(), last_right) {
            (Some(run), Some(prev_left)) if g.right == *prev_left => run.push(g.clone()),
            _ => runs.push(vec![g.clone()]),
        }
        last_right = Some(&g.left);
    }
    for (i, run) in runs.iter().enumerate() {
        push(
            run.iter().map(|g| g.left.clone()).collect(),
            SequenceSource::DerivedChainEndpoints,
            format!("left endpoints of admissible run {}", i + 1),
        );
    }
    push(
        admissible.iter().map(|g| g.left.clone()).collect(),
        SequenceSource::DerivedChainEndpoints,
        "left endpoints of all admissible gaps".into(),
    );
    push(
        admissible.iter().map(|g| g.right.clone()).collect(),
        SequenceSource::DerivedChainEndpoints,
        "right endpoints of all admissible gaps".into(),
    );
    out
}

/// Sampled estimate of `C_E = sup_τ C(τ)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CeEstimate {
    pub value: Extended,
    pub achieving_tau: TruncatedSequence,
    pub chain: Option<GapChain>,
    /// Number of sampled sequences.
    pub samples: usize,
}

/// Maximum of C(τ) over [`tau_samples`]. The first sample attaining the
/// maximum is reported.
pub fn c_e_estimate(set: &PorousSet, depth: usize, epsilon: &ExactRational, suffixes: usize) -> Result<CeEstimate> {
    validate_epsilon(epsilon)?;
    if set.zero_isolated() == TriState::Yes {
        return Err(Error::ZeroIsolated);
    }
    let points = set.enumerate(depth)?;
    let admissible = admissible_from_points(&points, epsilon);
    let samples = tau_samples(&points, epsilon, suffixes);
    let mut best: Option<(CTauResult, &TruncatedSequence)> = None;
    for tau in &samples {
        let r = c_tau_on(&points, &admissible, tau.values(), epsilon);
        if best.as_ref().is_none_or(|(b, _)| r.value > b.value) {
            best = Some((r, tau));
        }
    }
    let (best, tau) = best.ok_or_else(|| Error::InvalidParameter("depth too small for sampling".into()))?;
    Ok(CeEstimate {
        value: best.value,
        achieving_tau: tau.clone(),
        chain: best.chain,
        samples: samples.len(),
    })
}

/// `M(L) = limsup l_n / m_{n+1}` over the deep half of a chain of gaps
/// `(l_n, m_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MValue {
    pub value: ExactRational,
    /// Agreement with the value on the first half of the chain.
    pub converged: bool,
}

pub const MIN_CHAIN_LEN: usize = 4;

fn m_deep_max(gaps: &[Gap]) -> ExactRational {
    let ratios: Vec<ExactRational> = gaps.windows(2).map(|w| &w[0].left / &w[1].right).collect();
    ratios[deep_start(ratios.len())..]
        .iter()
        .max()
        .expect("nonempty")
        .clone()
}

pub fn m_of(chain: &GapChain) -> Result<MValue> {
    if chain.len() < MIN_CHAIN_LEN {
        return Err(Error::ChainTooShort {
            len: chain.len(),
            min: MIN_CHAIN_LEN,
        });
    }
    let value = m_deep_max(&chain.gaps);
    let half = m_deep_max(&chain.gaps[..chain.len().div_ceil(2)]);
    let converged = value.abs_diff(&half) < default_tol();
    Ok(MValue { value, converged })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Csp,
    NotCsp,
    Indeterminate,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Csp => "csp",
            Verdict::NotCsp => "not-csp",
            Verdict::Indeterminate => "indeterminate",
        })
    }
}

/// Evidence that no `k` keeps `(kτ_n, Kτ_n)` free of the set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotCspWitness {
    pub tau: TruncatedSequence,
    /// Largest `k = 2^j` such that every `2^i <= k` is defeated by some `K`.
    pub k: ExactRational,
    /// The same frontier on the first half of `τ`.
    pub half_depth_k: Option<ExactRational>,
    /// Every deep-half violation, sorted by `(k, K, index)`.
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PorosityCertificate {
    pub verdict: Verdict,
    /// 0 is isolated, so the set is CSP without further evidence.
    pub trivial: bool,
    pub universal_chain: Option<GapChain>,
    #[serde(rename = "M")]
    pub m_value: Option<MValue>,
    pub witness: Option<NotCspWitness>,
    pub epsilon: ExactRational,
    pub depth: usize,
    /// Why an indeterminate verdict could not be settled.
    pub reason: Option<String>,
}

/// Number of consecutive powers `2, 4, …` defeated for `τ` and the
/// violations found along the way.
fn defeat_frontier(points: &[ExactRational], tau: &[ExactRational]) -> (u32, Vec<Violation>) {
    let start = deep_start(tau.len());
    let mut frontier = 0;
    let mut found = Vec::new();
    let mut contiguous = true;
    for j in K_EXPONENTS {
        let k = ExactRational::pow2(j as i64);
        let mut defeated = false;
        for w in WIDTH_EXPONENTS {
            let big_k = ExactRational::pow2((j + w) as i64);
            let deep: Vec<Violation> = interval_violations(points, tau, &k, &big_k)
                .into_iter()
                .filter(|v| v.index > start)
                .collect();
            defeated |= !deep.is_empty();
            found.extend(deep);
        }
        if defeated && contiguous {
            frontier = j;
        } else {
            contiguous = false;
        }
    }
    (frontier, found)
}

fn deficit_decays(chain: &GapChain) -> bool {
    let deficits: Vec<ExactRational> = chain.gaps.iter().map(|g| &g.left / &g.right).collect();
    let mid = deep_start(deficits.len());
    match (deficits[..mid].iter().max(), deficits[mid..].iter().max()) {
        (Some(shallow), Some(deep)) => deep < shallow,
        _ => false,
    }
}

/// Why the csp branch did not conclude, or the certificate when it did.
fn try_csp(set: &PorousSet, depth: usize, epsilon: &ExactRational) -> std::result::Result<(GapChain, MValue), String> {
    let chain = universal_chain(set, depth, epsilon).map_err(|e| e.to_string())?;
    let m = m_of(&chain).map_err(|e| e.to_string())?;
    if !m.converged {
        return Err(format!("M did not converge at depth {depth}"));
    }
    if !deficit_decays(&chain) {
        return Err("relative gap lengths do not approach 1 along the chain".into());
    }
    let halved = epsilon * &ExactRational::new(1, 2);
    let tight = universal_chain(set, depth, &halved).map_err(|e| format!("at epsilon {halved}: {e}"))?;
    let tight_m = m_of(&tight).map_err(|e| format!("at epsilon {halved}: {e}"))?;
    if !tight_m.converged || tight_m.value != m.value {
        return Err(format!(
            "M changes from {} to {} when epsilon is halved",
            m.value, tight_m.value
        ));
    }
    let chains = admissible_chains(set, depth, epsilon).map_err(|e| e.to_string())?;
    if !chains.iter().all(|c| c.embeds_into(&chain)) {
        return Err("an admissible chain does not embed into the universal chain".into());
    }
    Ok((chain, m))
}

/// Classifies a set as completely strongly porous at 0 or not, at the given
/// depth and admissibility threshold.
///
/// The csp branch needs a universal chain whose M value converges and is
/// unchanged when `epsilon` is halved. The not-csp branch needs a sampled
/// `τ` for which every `k = 2, 4, …, 1024` is defeated by some `K = k·2^j`,
/// or for which the defeated range grows between `depth/2` and `depth`.
pub fn classify_csp(set: &PorousSet, depth: usize, epsilon: &ExactRational) -> Result<PorosityCertificate> {
    validate_epsilon(epsilon)?;
    let base = PorosityCertificate {
        verdict: Verdict::Indeterminate,
        trivial: false,
        universal_chain: None,
        m_value: None,
        witness: None,
        epsilon: epsilon.clone(),
        depth,
        reason: None,
    };
    if set.zero_isolated() == TriState::Yes {
        return Ok(PorosityCertificate {
            verdict: Verdict::Csp,
            trivial: true,
            ..base
        });
    }
    let csp_failure = match try_csp(set, depth, epsilon) {
        Ok((chain, m)) => {
            return Ok(PorosityCertificate {
                verdict: Verdict::Csp,
                universal_chain: Some(chain),
                m_value: Some(m),
                ..base
            })
        }
        Err(reason) => reason,
    };
    let points = set.enumerate(depth)?;
    let max_j = *K_EXPONENTS.end();
    let mut stalled = 0;
    for tau in tau_samples(&points, epsilon, 1) {
        let (frontier, mut violations) = defeat_frontier(&points, tau.values());
        let half_tau = &tau.values()[..tau.len() / 2];
        let half = (half_tau.len() >= 4).then(|| defeat_frontier(&points, half_tau).0);
        let escalates = frontier == max_j || half.is_some_and(|h| frontier > h);
        if escalates && !violations.is_empty() {
            violations.sort_by(|a, b| (&a.k, &a.big_k, a.index).cmp(&(&b.k, &b.big_k, b.index)));
            violations.dedup();
            return Ok(PorosityCertificate {
                verdict: Verdict::NotCsp,
                witness: Some(NotCspWitness {
                    tau,
                    k: ExactRational::pow2(frontier as i64),
                    half_depth_k: half.map(|h| ExactRational::pow2(h as i64)),
                    violations,
                }),
                ..base
            });
        }
        stalled = stalled.max(frontier);
    }
    Ok(PorosityCertificate {
        reason: Some(format!(
            "{csp_failure}; interval test defeated k up to {} without growth from depth {} to {depth}",
            ExactRational::pow2(stalled as i64),
            depth / 2
        )),
        ..base
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gap_analysis::default_epsilon;
    use crate::rational::rat;
    use crate::set_model::{make_set, union, ExponentRule, SetSpec, SplitMember};

    fn w() -> PorousSet {
        make_set(SetSpec::super_geometric(ExponentRule::square())).unwrap()
    }

    fn doubled(c: u64) -> PorousSet {
        make_set(SetSpec::doubled(
            SetSpec::super_geometric(ExponentRule::square()),
            rat(c, 1),
        ))
        .unwrap()
    }

    fn ext(values: Vec<ExactRational>) -> TruncatedSequence {
        TruncatedSequence::new(values, SequenceSource::External).unwrap()
    }

    #[test]
    fn asymp_examples() {
        let a = ext((1..=16).map(|n| ExactRational::pow2(-n)).collect());
        let g = ext((1..=16).map(|n| &rat(3, 4) * &ExactRational::pow2(-n)).collect());
        let r = is_asymp(&a, &g, 16).unwrap();
        assert_eq!(r.equivalent, TriState::Yes);
        assert_eq!((r.c1, r.c2), (rat(1, 2), rat(1, 1)));

        let same = is_asymp(&a, &a, 16).unwrap();
        assert_eq!(same.equivalent, TriState::Yes);
        assert!(same.c1 < rat(1, 1) && same.c2 > rat(1, 1));

        let fast = ext((1..=16).map(|n| ExactRational::pow2(-n * n)).collect());
        assert_eq!(is_asymp(&a, &fast, 16).unwrap().equivalent, TriState::No);

        assert!(matches!(
            is_asymp(&a, &a.prefix(10), 8),
            Err(Error::LengthMismatch { left: 16, right: 10 })
        ));
    }

    #[test]
    fn interval_test_on_w() {
        let tau = TruncatedSequence::from_set(&w(), 16).unwrap();
        let r = tau_porosity_test(&w(), &tau, &rat(2, 1), &rat(1024, 1), 16).unwrap();
        assert_eq!(r.holds_eventually, TriState::Yes);
        assert_eq!(r.first_good_index, Some(6));
        assert!(r.violations.iter().all(|v| v.index < 6));
        assert!(matches!(
            tau_porosity_test(&w(), &tau, &rat(2, 1), &rat(2, 1), 16),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn interval_test_rejects_foreign_tau() {
        let tau = TruncatedSequence::new(vec![rat(1, 3), rat(1, 9)], SequenceSource::UserSupplied).unwrap();
        assert!(matches!(
            tau_porosity_test(&w(), &tau, &rat(2, 1), &rat(4, 1), 8),
            Err(Error::TauNotInSet { index: 1 })
        ));
    }

    #[test]
    fn interval_test_on_union_star_points() {
        let u = make_set(SetSpec::split_pair(SplitMember::Union)).unwrap();
        let pts = u.enumerate(24).unwrap();
        let star: Vec<ExactRational> = pts.iter().skip(1).step_by(2).cloned().collect();
        let tau = TruncatedSequence::new(star, SequenceSource::FromSetEnumeration).unwrap();
        let r = tau_porosity_test(&u, &tau, &rat(2, 1), &rat(8, 1), 24).unwrap();
        assert_eq!(r.holds_eventually, TriState::No);
        for v in &r.violations {
            assert_eq!(crate::set_model::PartitionRule::TwoAdic.class_of(v.index as u64), 2);
            assert!(v.verify(&pts, &tau));
        }
    }

    #[test]
    fn c_tau_examples() {
        let eps = default_epsilon();
        let tau = TruncatedSequence::from_set(&w(), 16).unwrap();
        assert_eq!(c_tau(&w(), &tau, 16, &eps).unwrap().value, Extended::Finite(rat(1, 1)));

        let g = make_set(SetSpec::geometric(rat(1, 2))).unwrap();
        let gt = TruncatedSequence::from_set(&g, 16).unwrap();
        assert_eq!(c_tau(&g, &gt, 16, &eps).unwrap().value, Extended::Infinite);

        let d = doubled(2);
        let base: Vec<ExactRational> = w().enumerate(12).unwrap();
        let dt = TruncatedSequence::new(base, SequenceSource::UserSupplied).unwrap();
        let r = c_tau(&d, &dt, 24, &eps).unwrap();
        assert_eq!(r.value, Extended::Finite(rat(2, 1)));
    }

    #[test]
    fn c_tau_requires_deep_decrease() {
        let tau = TruncatedSequence::new(
            vec![rat(1, 2), rat(1, 16), rat(1, 512), rat(1, 16)],
            SequenceSource::UserSupplied,
        )
        .unwrap();
        assert!(matches!(
            c_tau(&w(), &tau, 8, &default_epsilon()),
            Err(Error::NotAlmostDecreasing { index: 4 })
        ));
    }

    #[test]
    fn c_e_examples() {
        let eps = default_epsilon();
        assert_eq!(
            c_e_estimate(&w(), 24, &eps, 4).unwrap().value,
            Extended::Finite(rat(1, 1))
        );
        assert_eq!(
            c_e_estimate(&doubled(2), 24, &eps, 4).unwrap().value,
            Extended::Finite(rat(2, 1))
        );
        let g = make_set(SetSpec::geometric(rat(1, 2))).unwrap();
        assert_eq!(c_e_estimate(&g, 24, &eps, 4).unwrap().value, Extended::Infinite);
    }

    #[test]
    fn m_examples() {
        let eps = default_epsilon();
        let m = m_of(&universal_chain(&w(), 24, &eps).unwrap()).unwrap();
        assert_eq!(
            m,
            MValue {
                value: rat(1, 1),
                converged: true
            }
        );
        let m2 = m_of(&universal_chain(&doubled(2), 24, &eps).unwrap()).unwrap();
        assert_eq!(m2.value, rat(2, 1));
        let short = universal_chain(&w(), 3, &eps).unwrap();
        assert!(matches!(m_of(&short), Err(Error::ChainTooShort { len: 2, min: 4 })));
    }

    #[test]
    fn classify_examples() {
        let eps = default_epsilon();
        let one = make_set(SetSpec::explicit(vec![rat(1, 1)])).unwrap();
        let c = classify_csp(&one, 8, &eps).unwrap();
        assert_eq!((c.verdict, c.trivial), (Verdict::Csp, true));

        let c = classify_csp(&w(), 24, &eps).unwrap();
        assert_eq!(c.verdict, Verdict::Csp);
        assert_eq!(c.m_value.unwrap().value, rat(1, 1));

        for c in [2, 3] {
            let cert = classify_csp(&doubled(c), 24, &eps).unwrap();
            assert_eq!(cert.verdict, Verdict::Csp);
            assert_eq!(cert.m_value.unwrap().value, rat(c, 1));
        }

        let fact = make_set(SetSpec::factorial()).unwrap();
        assert_eq!(classify_csp(&fact, 24, &eps).unwrap().verdict, Verdict::Csp);

        for q in [rat(1, 2), rat(1, 3), rat(9, 10)] {
            let g = make_set(SetSpec::geometric(q)).unwrap();
            assert_eq!(classify_csp(&g, 24, &eps).unwrap().verdict, Verdict::NotCsp);
        }
    }

    #[test]
    fn classify_union_construction() {
        let eps = default_epsilon();
        let e1 = make_set(SetSpec::split_pair(SplitMember::E1)).unwrap();
        let star = make_set(SetSpec::split_pair(SplitMember::E1Star)).unwrap();
        assert_eq!(classify_csp(&star, 24, &eps).unwrap().verdict, Verdict::Csp);
        let u = union(&e1, &star).unwrap();
        let cert = classify_csp(&u, 24, &eps).unwrap();
        assert_eq!(cert.verdict, Verdict::NotCsp);
        let witness = cert.witness.unwrap();
        let pts = u.enumerate(24).unwrap();
        assert!(witness.violations.iter().all(|v| v.verify(&pts, &witness.tau)));
        let two_pairs: std::collections::BTreeSet<_> = witness
            .violations
            .iter()
            .filter(|v| v.k == rat(2, 1))
            .map(|v| v.big_k.clone())
            .collect();
        assert!(two_pairs.len() >= 3);
    }
}
