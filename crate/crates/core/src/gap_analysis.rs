//! Complementary intervals of a set near 0: gaps, λ(E,0,h), the right-hand
//! porosity estimate p⁺(E,0), and chains of gaps whose relative length is
//! close to 1.
//!
//! All suprema are taken over the enumerated prefix. The unexplored interval
//! `(0, x_depth)` is never counted as a gap; results touching it carry a
//! `partial` flag.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::ExactRational;
use crate::set_model::{PorousSet, TriState};

/// Default admissibility threshold: gaps need relative length `>= 3/4`.
pub fn default_epsilon() -> ExactRational {
    ExactRational::new(1, 4)
}

/// Default agreement tolerance for depth-doubling convergence checks.
pub fn default_tol() -> ExactRational {
    ExactRational::pow2(-16)
}

/// First index of the deep half of a list of length `len`.
pub(crate) fn deep_start(len: usize) -> usize {
    len / 2
}

/// Open interval `(left, right)` disjoint from the set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gap {
    pub left: ExactRational,
    pub right: ExactRational,
}

impl Gap {
    pub fn new(left: ExactRational, right: ExactRational) -> Self {
        assert!(left < right, "gap endpoints out of order");
        Gap { left, right }
    }

    pub fn length(&self) -> ExactRational {
        self.right.abs_diff(&self.left)
    }

    /// `(right - left) / right`.
    pub fn relative_length(&self) -> ExactRational {
        &self.length() / &self.right
    }

    /// Relative length `>= 1 - epsilon`, i.e. `left <= epsilon * right`.
    pub fn is_admissible(&self, epsilon: &ExactRational) -> bool {
        self.left <= epsilon * &self.right
    }

    pub fn rescaled(&self, t: &ExactRational) -> Gap {
        Gap::new(&self.left * t, &self.right * t)
    }
}

/// Decreasing list of gaps, each with relative length `>= 1 - epsilon`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapChain {
    pub gaps: Vec<Gap>,
    pub epsilon: ExactRational,
    pub depth: usize,
}

impl GapChain {
    /// Checks ordering and admissibility.
    pub fn new(gaps: Vec<Gap>, epsilon: ExactRational, depth: usize) -> Result<Self> {
        for (i, w) in gaps.windows(2).enumerate() {
            if w[1].right > w[0].left {
                return Err(Error::InvalidParameter(format!(
                    "gaps {i} and {} overlap or are out of order",
                    i + 1
                )));
            }
        }
        if let Some(i) = gaps.iter().position(|g| !g.is_admissible(&epsilon)) {
            return Err(Error::InvalidParameter(format!(
                "gap {i} has relative length below 1 - {epsilon}"
            )));
        }
        Ok(GapChain { gaps, epsilon, depth })
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    pub fn left_endpoints(&self) -> Vec<ExactRational> {
        self.gaps.iter().map(|g| g.left.clone()).collect()
    }

    /// Every gap of `self` is a gap of `other`.
    pub fn embeds_into(&self, other: &GapChain) -> bool {
        let mut j = 0;
        for g in &self.gaps {
            while j < other.gaps.len() && other.gaps[j].left > g.left {
                j += 1;
            }
            if j == other.gaps.len() || other.gaps[j] != *g {
                return false;
            }
        }
        true
    }
}

/// Consecutive-point gaps `(x_{n+1}, x_n)` for `n < depth`.
pub fn gaps(set: &PorousSet, depth: usize) -> Result<Vec<Gap>> {
    if depth < 2 {
        return Err(Error::InvalidParameter("gaps need depth >= 2".into()));
    }
    let points = set.enumerate(depth)?;
    Ok(consecutive_gaps(&points))
}

pub(crate) fn consecutive_gaps(points: &[ExactRational]) -> Vec<Gap> {
    points
        .windows(2)
        .map(|w| Gap::new(w[1].clone(), w[0].clone()))
        .collect()
}

/// Value of λ(E,0,h) with the interval attaining it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LargestGap {
    pub value: ExactRational,
    pub gap: Gap,
    /// The unexplored tail below the last enumerated point could hold a
    /// longer gap.
    pub partial: bool,
}

/// Length of the longest open interval inside `(0, h)` missing the set.
pub fn largest_gap_length(set: &PorousSet, h: &ExactRational, depth: usize) -> Result<LargestGap> {
    if !h.is_positive() {
        return Err(Error::InvalidParameter("h must be positive".into()));
    }
    if depth == 0 {
        return Err(Error::InvalidParameter("depth must be >= 1".into()));
    }
    let listing = set.enumerate_available(depth)?;
    let smallest = listing.points.last().cloned();
    if !listing.complete {
        let smallest = smallest.clone().expect("nonempty prefix");
        if *h <= smallest {
            return Err(Error::WindowNotCovered {
                h: Box::new(h.clone()),
                smallest: Box::new(smallest),
            });
        }
    }
    let below: Vec<&ExactRational> = listing.points.iter().filter(|p| *p < h).collect();
    let mut candidates = Vec::with_capacity(below.len() + 1);
    match below.first() {
        Some(top) => candidates.push(Gap::new((*top).clone(), h.clone())),
        None => candidates.push(Gap::new(ExactRational::zero(), h.clone())),
    }
    for w in below.windows(2) {
        candidates.push(Gap::new(w[1].clone(), w[0].clone()));
    }
    if listing.complete {
        if let Some(bottom) = below.last() {
            candidates.push(Gap::new(ExactRational::zero(), (*bottom).clone()));
        }
    }
    let best = best_gap(candidates);
    let partial = !listing.complete && smallest.is_some_and(|s| s > best.length());
    Ok(LargestGap {
        value: best.length(),
        gap: best,
        partial,
    })
}

/// Longest gap; ties go to the larger left endpoint.
fn best_gap(candidates: Vec<Gap>) -> Gap {
    candidates
        .into_iter()
        .max_by(|a, b| a.length().cmp(&b.length()).then(a.left.cmp(&b.left)))
        .expect("at least one candidate")
}

/// One sample of `λ(E,0,h)/h`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub h: ExactRational,
    pub ratio: ExactRational,
    pub partial: bool,
}

/// Finite-depth estimate of p⁺(E,0).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PorosityEstimate {
    pub estimate: ExactRational,
    /// Agreement with the half-depth estimate within the tolerance.
    pub converged: bool,
    /// The maximizing sample was `partial`.
    pub partial: bool,
    /// `λ(x_n)/x_n` at every enumerated point with a known gap below it.
    pub profile: Vec<ProfilePoint>,
}

/// `λ(x_n)/x_n` for `n = 1..depth-1`, computed from suffix maxima of the
/// consecutive gaps.
pub fn porosity_profile(points: &[ExactRational]) -> Vec<ProfilePoint> {
    let gaps = consecutive_gaps(points);
    let smallest = match points.last() {
        Some(s) => s,
        None => return Vec::new(),
    };
    let mut out = vec![None; gaps.len()];
    let mut best: Option<ExactRational> = None;
    for i in (0..gaps.len()).rev() {
        let len = gaps[i].length();
        if best.as_ref().is_none_or(|b| len > *b) {
            best = Some(len);
        }
        let lambda = best.clone().unwrap();
        let partial = *smallest > lambda;
        out[i] = Some(ProfilePoint {
            ratio: &lambda / &points[i],
            h: points[i].clone(),
            partial,
        });
    }
    out.into_iter().map(Option::unwrap).collect()
}

fn deep_half_max(profile: &[ProfilePoint]) -> Option<&ProfilePoint> {
    profile[deep_start(profile.len() + 1).min(profile.len())..]
        .iter()
        .fold(None, |acc: Option<&ProfilePoint>, p| match acc {
            Some(a) if a.ratio >= p.ratio => Some(a),
            _ => Some(p),
        })
}

/// Estimate of `limsup λ(E,0,h)/h` as the deep-half maximum of the profile.
pub fn porosity_plus(set: &PorousSet, depth: usize) -> Result<PorosityEstimate> {
    porosity_plus_with_tol(set, depth, &default_tol())
}

pub fn porosity_plus_with_tol(set: &PorousSet, depth: usize, tol: &ExactRational) -> Result<PorosityEstimate> {
    if set.zero_isolated() == TriState::Yes {
        return Err(Error::ZeroIsolated);
    }
    if depth < 4 {
        return Err(Error::InvalidParameter("porosity estimate needs depth >= 4".into()));
    }
    let points = set.enumerate(depth)?;
    let profile = porosity_profile(&points);
    let top = deep_half_max(&profile).expect("depth >= 4").clone();
    let half = porosity_profile(&points[..depth / 2]);
    let half_top = deep_half_max(&half).expect("depth >= 4");
    let converged = top.ratio.abs_diff(&half_top.ratio) < *tol;
    Ok(PorosityEstimate {
        estimate: top.ratio,
        converged,
        partial: top.partial,
        profile,
    })
}

fn validate_epsilon(epsilon: &ExactRational) -> Result<()> {
    if !epsilon.is_positive() || *epsilon >= ExactRational::one() {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    Ok(())
}

/// Admissible consecutive gaps among the first `depth` points.
pub fn admissible_gaps(set: &PorousSet, depth: usize, epsilon: &ExactRational) -> Result<Vec<Gap>> {
    validate_epsilon(epsilon)?;
    Ok(gaps(set, depth)?
        .into_iter()
        .filter(|g| g.is_admissible(epsilon))
        .collect())
}

/// Maximal runs of index-consecutive admissible gaps, followed by the chain
/// of all admissible gaps when there is more than one run.
pub fn admissible_chains(set: &PorousSet, depth: usize, epsilon: &ExactRational) -> Result<Vec<GapChain>> {
    validate_epsilon(epsilon)?;
    let all = gaps(set, depth)?;
    let mut runs: Vec<Vec<Gap>> = Vec::new();
    let mut current: Vec<Gap> = Vec::new();
    for g in all {
        if g.is_admissible(epsilon) {
            current.push(g);
        } else if !current.is_empty() {
            runs.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        runs.push(current);
    }
    if runs.is_empty() {
        return Err(Error::NoAdmissibleGaps {
            epsilon: epsilon.clone(),
        });
    }
    let mut chains = Vec::with_capacity(runs.len() + 1);
    if runs.len() > 1 {
        let full: Vec<Gap> = runs.iter().flatten().cloned().collect();
        chains.extend(runs.into_iter().map(|r| GapChain::new(r, epsilon.clone(), depth)));
        chains.push(GapChain::new(full, epsilon.clone(), depth));
    } else {
        chains.push(GapChain::new(runs.pop().unwrap(), epsilon.clone(), depth));
    }
    chains.into_iter().collect()
}

/// Chain of all admissible gaps; every admissible chain embeds into it.
pub fn universal_chain(set: &PorousSet, depth: usize, epsilon: &ExactRational) -> Result<GapChain> {
    let chains = admissible_chains(set, depth, epsilon)?;
    let universal = chains.last().expect("nonempty").clone();
    debug_assert!(chains.iter().all(|c| c.embeds_into(&universal)));
    Ok(universal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::set_model::{make_set, ExponentRule, SetSpec};

    fn geo(q: ExactRational) -> PorousSet {
        make_set(SetSpec::geometric(q)).unwrap()
    }

    fn w() -> PorousSet {
        make_set(SetSpec::super_geometric(ExponentRule::square())).unwrap()
    }

    fn doubled() -> PorousSet {
        make_set(SetSpec::doubled(
            SetSpec::super_geometric(ExponentRule::square()),
            rat(2, 1),
        ))
        .unwrap()
    }

    #[test]
    fn geometric_gaps() {
        let g = gaps(&geo(rat(1, 2)), 3).unwrap();
        assert_eq!(g, vec![Gap::new(rat(1, 4), rat(1, 2)), Gap::new(rat(1, 8), rat(1, 4))]);
    }

    #[test]
    fn doubled_gaps_alternate() {
        let g = gaps(&doubled(), 4).unwrap();
        assert_eq!(g[0].relative_length(), rat(1, 2));
        assert_eq!(g[1], Gap::new(rat(1, 8), rat(1, 2)));
        assert_eq!(g[2].relative_length(), rat(1, 2));
    }

    #[test]
    fn gaps_of_small_finite_set() {
        let one = make_set(SetSpec::explicit(vec![rat(1, 1)])).unwrap();
        assert!(matches!(gaps(&one, 2), Err(Error::DepthExceedsFiniteSet { .. })));
    }

    #[test]
    fn largest_gap_examples() {
        let g = geo(rat(1, 2));
        let at_one = largest_gap_length(&g, &rat(1, 1), 10).unwrap();
        assert_eq!(at_one.value, rat(1, 2));
        assert_eq!(at_one.gap, Gap::new(rat(1, 2), rat(1, 1)));
        assert!(!at_one.partial);

        let one = make_set(SetSpec::explicit(vec![rat(1, 1)])).unwrap();
        let empty = largest_gap_length(&one, &rat(1, 2), 4).unwrap();
        assert_eq!(empty.value, rat(1, 2));
        assert!(!empty.partial);

        let mid = largest_gap_length(&g, &rat(3, 8), 10).unwrap();
        assert_eq!(mid.value, rat(1, 8));
        assert_eq!(mid.gap, Gap::new(rat(1, 4), rat(3, 8)));
    }

    #[test]
    fn largest_gap_needs_coverage() {
        let g = geo(rat(1, 2));
        assert!(matches!(
            largest_gap_length(&g, &rat(1, 64), 4),
            Err(Error::WindowNotCovered { .. })
        ));
        let full = largest_gap_length(&g, &rat(1, 4), 4).unwrap();
        assert_eq!(full.value, rat(1, 8));
        assert!(!full.partial);
        let partial = largest_gap_length(&g, &rat(3, 10), 2).unwrap();
        assert_eq!(partial.value, rat(1, 20));
        assert!(partial.partial);
    }

    #[test]
    fn geometric_porosity_is_one_minus_q() {
        for (n, d) in [(1, 2), (1, 3), (9, 10)] {
            let p = porosity_plus(&geo(rat(n, d)), 16).unwrap();
            assert_eq!(p.estimate, rat(d - n, d));
            assert!(p.converged);
        }
    }

    #[test]
    fn super_geometric_porosity_tends_to_one() {
        let p = porosity_plus(&w(), 24).unwrap();
        assert!(p.converged);
        let expected = ExactRational::one().checked_sub(&ExactRational::pow2(-47)).unwrap();
        assert_eq!(p.estimate, expected);
        assert!(!porosity_plus(&w(), 16).unwrap().converged);
        assert!(porosity_plus(&w(), 18).unwrap().converged);
    }

    #[test]
    fn isolated_zero_has_no_porosity() {
        let one = make_set(SetSpec::explicit(vec![rat(1, 1)])).unwrap();
        assert!(matches!(porosity_plus(&one, 8), Err(Error::ZeroIsolated)));
    }

    #[test]
    fn chains() {
        let eps = default_epsilon();
        assert!(matches!(
            admissible_chains(&geo(rat(1, 2)), 8, &eps),
            Err(Error::NoAdmissibleGaps { .. })
        ));
        let w_chains = admissible_chains(&w(), 6, &eps).unwrap();
        assert_eq!(w_chains.len(), 1);
        assert_eq!(w_chains[0].len(), 5);

        let d = universal_chain(&doubled(), 10, &eps).unwrap();
        let pts = doubled().enumerate(10).unwrap();
        assert_eq!(d.len(), 4);
        for (k, g) in d.gaps.iter().enumerate() {
            assert_eq!(g.right, pts[2 * k + 1]);
            assert_eq!(g.left, pts[2 * k + 2]);
        }
    }
}
