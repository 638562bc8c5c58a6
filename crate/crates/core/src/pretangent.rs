//! Finite-depth pretangent spaces of a distance set `E` at 0.
//!
//! Points of the underlying space are sequences `(x_n)` with `x_n ∈ E ∪ {0}`
//! tending to 0. Two sequences are mutually stable with respect to a scaling
//! `(r_n)` when `|x_n - y_n| / r_n` converges; a self-stable family, after
//! identifying members at distance 0, is a pretangent space. Everything here
//! works on a common prefix of length `depth`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gap_analysis::{admissible_gaps, deep_start, default_epsilon, universal_chain};
use crate::porosity_metrics::{c_e_estimate, contains_desc};
use crate::rational::{ExactRational, Extended};
use crate::sequence::{SequenceSource, TruncatedSequence};
use crate::set_model::{PorousSet, TriState};

/// Minimum number of indices an extracted subsequence must keep.
const MIN_EXTRACTED: usize = 8;

/// Nonnegative sequence, e.g. a candidate point of a pretangent space. May be
/// identically 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSequence {
    pub label: String,
    pub values: Vec<ExactRational>,
}

impl PointSequence {
    pub fn new(label: impl Into<String>, values: Vec<ExactRational>) -> Self {
        PointSequence {
            label: label.into(),
            values,
        }
    }

    /// The constant sequence `0̃`.
    pub fn zero(len: usize) -> Self {
        Self::new("zero", vec![ExactRational::zero(); len])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn select(&self, indices: &[usize]) -> Self {
        Self::new(
            self.label.clone(),
            indices.iter().map(|&i| self.values[i].clone()).collect(),
        )
    }
}

impl From<&TruncatedSequence> for PointSequence {
    fn from(s: &TruncatedSequence) -> Self {
        PointSequence::new(s.rule().unwrap_or("sequence"), s.values().to_vec())
    }
}

/// Positive null sequence `(r_n)` used to normalize distances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalingSequence {
    pub values: TruncatedSequence,
    /// A set-valued sequence `s_n` with `s_n / r_n → 1`, when one is known.
    pub normal_certificate: Option<TruncatedSequence>,
}

impl ScalingSequence {
    pub fn new(values: TruncatedSequence) -> Self {
        ScalingSequence {
            values,
            normal_certificate: None,
        }
    }

    /// A scaling that takes values in the set is its own normality witness.
    pub fn from_set_values(values: TruncatedSequence) -> Self {
        ScalingSequence {
            normal_certificate: Some(values.clone()),
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> &ExactRational {
        &self.values.values()[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityStatus {
    Stable,
    Unstable,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityResult {
    pub status: StabilityStatus,
    /// Deep-half midpoint of the ratio, or 0 when that midpoint is below the
    /// tolerance.
    pub limit: Option<ExactRational>,
    /// Deep-half maximum minus minimum of the ratio.
    pub oscillation: ExactRational,
}

fn spread(values: &[ExactRational]) -> (ExactRational, ExactRational) {
    let lo = values.iter().min().expect("nonempty").clone();
    let hi = values.iter().max().expect("nonempty").clone();
    (lo, hi)
}

fn stability_of(ratios: &[ExactRational], tol: &ExactRational) -> StabilityResult {
    let (lo, hi) = spread(&ratios[deep_start(ratios.len())..]);
    let oscillation = hi.abs_diff(&lo);
    if oscillation < *tol {
        let mid = lo.midpoint(&hi);
        let limit = if mid < *tol { ExactRational::zero() } else { mid };
        return StabilityResult {
            status: StabilityStatus::Stable,
            limit: Some(limit),
            oscillation,
        };
    }
    let (qlo, qhi) = spread(&ratios[ratios.len() - ratios.len().div_ceil(4)..]);
    let status = if qhi.abs_diff(&qlo) >= *tol {
        StabilityStatus::Unstable
    } else {
        StabilityStatus::Indeterminate
    };
    StabilityResult {
        status,
        limit: None,
        oscillation,
    }
}

fn ratios_on(x: &PointSequence, y: &PointSequence, r: &ScalingSequence, indices: &[usize]) -> Vec<ExactRational> {
    indices
        .iter()
        .map(|&i| &x.values[i].abs_diff(&y.values[i]) / r.get(i))
        .collect()
}

/// Stability of `|x_n - y_n| / r_n`.
///
/// Stable when the deep-half oscillation is below `tol`; unstable when the
/// oscillation is at least `tol` on the deep half and on the last quarter;
/// indeterminate otherwise.
pub fn limit_ratio(
    x: &PointSequence,
    y: &PointSequence,
    r: &ScalingSequence,
    tol: &ExactRational,
) -> Result<StabilityResult> {
    for len in [y.len(), r.len()] {
        if len != x.len() {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: len,
            });
        }
    }
    if x.is_empty() {
        return Err(Error::InvalidParameter("empty sequences".into()));
    }
    if !tol.is_positive() {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let all: Vec<usize> = (0..x.len()).collect();
    Ok(stability_of(&ratios_on(x, y, r, &all), tol))
}

/// `(y_{m(n)})` with `y_{m(n)} = min_{i <= n} y_i`: the running minimum.
pub fn monotone_envelope(y: &TruncatedSequence) -> TruncatedSequence {
    let mut current: Option<ExactRational> = None;
    let values = y
        .values()
        .iter()
        .map(|v| {
            let next = match &current {
                Some(c) if c <= v => c.clone(),
                _ => v.clone(),
            };
            current = Some(next.clone());
            next
        })
        .collect();
    let out = TruncatedSequence::new(values, y.source()).expect("positive input");
    match y.rule() {
        Some(rule) => out.with_rule(format!("running minimum of {rule}")),
        None => out,
    }
}

/// Outcome of the normality search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalScaling {
    pub normal: TriState,
    /// Per-index nearest set point, when every index was covered.
    pub witness: Option<TruncatedSequence>,
    /// Largest `|s_n / r_n - 1|` over the deep half.
    pub deviation: Option<ExactRational>,
}

/// Set point nearest `r` in ratio, or `None` when the enumerated prefix
/// cannot decide. Ties go to the larger point.
fn nearest_in_ratio(points: &[ExactRational], r: &ExactRational) -> Option<ExactRational> {
    let above = points.partition_point(|p| p >= r);
    let upper = above.checked_sub(1).map(|i| &points[i]);
    let lower = points.get(above);
    let distance = |s: &ExactRational| if s >= r { s / r } else { r / s };
    match (upper, lower) {
        (Some(u), _) if u == r => Some(u.clone()),
        (_, None) => None,
        (None, Some(l)) => Some(l.clone()),
        (Some(u), Some(l)) => Some(if distance(u) <= distance(l) {
            u.clone()
        } else {
            l.clone()
        }),
    }
}

/// Looks for `s_n ∈ E` with `s_n / r_n → 1`, choosing the nearest set point
/// in ratio at each index.
pub fn is_normal_scaling(
    set: &PorousSet,
    r: &ScalingSequence,
    depth: usize,
    tol: &ExactRational,
) -> Result<NormalScaling> {
    if set.zero_isolated() == TriState::Yes {
        return Err(Error::ZeroIsolated);
    }
    let points = set.enumerate(depth)?;
    let nearest: Option<Vec<ExactRational>> = r.values.values().iter().map(|v| nearest_in_ratio(&points, v)).collect();
    let nearest = match nearest {
        Some(n) => n,
        None => {
            return Ok(NormalScaling {
                normal: TriState::Unknown,
                witness: None,
                deviation: None,
            })
        }
    };
    let deviations: Vec<ExactRational> = nearest
        .iter()
        .zip(r.values.values())
        .map(|(s, v)| (s / v).abs_diff(&ExactRational::one()))
        .collect();
    let len = deviations.len();
    let deep = deviations[deep_start(len)..].iter().max().expect("nonempty").clone();
    let last_quarter = deviations[len - len.div_ceil(4)..].iter().max().expect("nonempty");
    let witness =
        TruncatedSequence::new(nearest, SequenceSource::FromSetEnumeration)?.with_rule("nearest set point in ratio");
    let decreasing = witness.is_decreasing_from(deep_start(len) + 1);
    let normal = if deep < *tol && decreasing {
        TriState::Yes
    } else if last_quarter >= tol {
        TriState::No
    } else {
        TriState::Unknown
    };
    Ok(NormalScaling {
        normal,
        witness: Some(witness),
        deviation: Some(deep),
    })
}

/// A member of a pretangent space and the class it was identified into.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Member {
    pub sequence: PointSequence,
    pub class: usize,
}

/// Metric identification of a self-stable family at finite depth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PretangentApprox {
    pub scaling: ScalingSequence,
    /// Accepted members; the first is `0̃`.
    pub members: Vec<Member>,
    /// Retained 0-based indices after subsequence extraction.
    pub indices: Vec<usize>,
    /// Class-to-class distances: `|x_n - y_n| / r_n` at the last retained
    /// index for the class representatives.
    pub distances: Vec<Vec<ExactRational>>,
    /// Deep-half oscillation of each class-to-class ratio.
    pub oscillations: Vec<Vec<ExactRational>>,
    /// Class of `0̃`.
    pub marked_index: usize,
    /// Labels of candidates rejected as unstable against an accepted member.
    pub rejected: Vec<String>,
    pub tol: ExactRational,
}

impl PretangentApprox {
    pub fn class_count(&self) -> usize {
        self.distances.len()
    }

    /// Exact check of `d(a, c) <= d(a, b) + d(b, c)` for all classes.
    pub fn satisfies_triangle_inequality(&self) -> bool {
        let n = self.class_count();
        (0..n).all(|a| {
            (0..n).all(|b| (0..n).all(|c| self.distances[a][c] <= &self.distances[a][b] + &self.distances[b][c]))
        })
    }

    /// Representative member of each class.
    pub fn representatives(&self) -> Vec<&PointSequence> {
        (0..self.class_count())
            .map(|c| {
                &self
                    .members
                    .iter()
                    .find(|m| m.class == c)
                    .expect("every class has a member")
                    .sequence
            })
            .collect()
    }
}

/// `limsup x_n / r_n < ∞` as judged by the deep half: the last quarter may
/// not exceed twice the maximum over the quarter before it.
fn is_bounded(x: &PointSequence, r: &ScalingSequence) -> bool {
    let len = x.len();
    let ratio = |i: usize| &x.values[i] / r.get(i);
    let q = len - len.div_ceil(4);
    let mid: Option<ExactRational> = (deep_start(len)..q).map(ratio).max();
    let tail: Option<ExactRational> = (q..len).map(ratio).max();
    match (mid, tail) {
        (Some(m), Some(t)) => t <= &m * &ExactRational::from_integer(2),
        _ => true,
    }
}

enum Extraction {
    Found(Vec<usize>),
    Unstable,
    Exhausted,
}

fn pairwise_status(
    family: &[&PointSequence],
    r: &ScalingSequence,
    indices: &[usize],
    tol: &ExactRational,
) -> StabilityStatus {
    let mut status = StabilityStatus::Stable;
    for (i, x) in family.iter().enumerate() {
        for y in &family[i + 1..] {
            match stability_of(&ratios_on(x, y, r, indices), tol).status {
                StabilityStatus::Unstable => return StabilityStatus::Unstable,
                StabilityStatus::Indeterminate => status = StabilityStatus::Indeterminate,
                StabilityStatus::Stable => {}
            }
        }
    }
    status
}

/// Depth-first search over even/odd halvings of `indices` for a subsequence
/// on which the whole family is pairwise stable.
fn extract(
    family: &[&PointSequence],
    r: &ScalingSequence,
    indices: &[usize],
    tol: &ExactRational,
    rounds: u32,
) -> Extraction {
    if rounds == 0 {
        return Extraction::Exhausted;
    }
    let mut exhausted = false;
    for parity in 0..2 {
        let half: Vec<usize> = indices.iter().skip(parity).step_by(2).copied().collect();
        if half.len() < MIN_EXTRACTED {
            exhausted = true;
            continue;
        }
        match pairwise_status(family, r, &half, tol) {
            StabilityStatus::Stable => return Extraction::Found(half),
            StabilityStatus::Unstable => {}
            StabilityStatus::Indeterminate => match extract(family, r, &half, tol, rounds - 1) {
                Extraction::Found(sub) => return Extraction::Found(sub),
                Extraction::Exhausted => exhausted = true,
                Extraction::Unstable => {}
            },
        }
    }
    if exhausted {
        Extraction::Exhausted
    } else {
        Extraction::Unstable
    }
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut root = i;
    while parent[root] != root {
        root = parent[root];
    }
    parent[i] = root;
    root
}

/// Greedy self-stable family over `candidates` in input order, starting from
/// `0̃`, followed by metric identification.
///
/// A candidate is accepted when it is stable against every accepted member,
/// rejected when unstable against one, and otherwise retried on even/odd
/// index halvings for at most `log2(depth)` rounds.
pub fn build_self_stable(
    r: &ScalingSequence,
    candidates: &[PointSequence],
    tol: &ExactRational,
) -> Result<PretangentApprox> {
    let len = r.len();
    if len < MIN_EXTRACTED {
        return Err(Error::InvalidParameter(format!("need depth >= {MIN_EXTRACTED}")));
    }
    if !tol.is_positive() {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    for (i, c) in candidates.iter().enumerate() {
        if c.len() != len {
            return Err(Error::LengthMismatch {
                left: len,
                right: c.len(),
            });
        }
        if !is_bounded(c, r) {
            return Err(Error::UnboundedCandidate { index: i + 1 });
        }
    }
    let zero = PointSequence::zero(len);
    let mut accepted: Vec<&PointSequence> = vec![&zero];
    let mut rejected = Vec::new();
    let mut indices: Vec<usize> = (0..len).collect();
    let rounds = usize::BITS - 1 - len.leading_zeros();
    for c in candidates {
        let mut family = accepted.clone();
        family.push(c);
        match pairwise_status(&family, r, &indices, tol) {
            StabilityStatus::Stable => accepted.push(c),
            StabilityStatus::Unstable => rejected.push(c.label.clone()),
            StabilityStatus::Indeterminate => match extract(&family, r, &indices, tol, rounds) {
                Extraction::Found(sub) => {
                    indices = sub;
                    accepted.push(c);
                }
                Extraction::Unstable => rejected.push(c.label.clone()),
                Extraction::Exhausted => return Err(Error::NoStableSubsequenceAtDepth),
            },
        }
    }

    let n = accepted.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            let s = stability_of(&ratios_on(accepted[i], accepted[j], r, &indices), tol);
            if s.limit.as_ref().is_some_and(|l| l.is_zero()) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut class_of_root: Vec<Option<usize>> = vec![None; n];
    let mut reps: Vec<usize> = Vec::new();
    let mut members = Vec::with_capacity(n);
    for (i, seq) in accepted.iter().enumerate() {
        let root = find(&mut parent, i);
        let class = *class_of_root[root].get_or_insert_with(|| {
            reps.push(root);
            reps.len() - 1
        });
        members.push(Member {
            sequence: (*seq).clone(),
            class,
        });
    }
    let last = *indices.last().expect("nonempty");
    let k = reps.len();
    let mut distances = vec![vec![ExactRational::zero(); k]; k];
    let mut oscillations = vec![vec![ExactRational::zero(); k]; k];
    for a in 0..k {
        for b in a + 1..k {
            let (x, y) = (accepted[reps[a]], accepted[reps[b]]);
            let d = &x.values[last].abs_diff(&y.values[last]) / r.get(last);
            let osc = stability_of(&ratios_on(x, y, r, &indices), tol).oscillation;
            distances[a][b] = d.clone();
            distances[b][a] = d;
            oscillations[a][b] = osc.clone();
            oscillations[b][a] = osc;
        }
    }
    Ok(PretangentApprox {
        scaling: r.clone(),
        members,
        indices,
        distances,
        oscillations,
        marked_index: 0,
        rejected,
        tol: tol.clone(),
    })
}

/// Radius and smallest nonzero radius of a pointed space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceExtremes {
    pub rho_star: ExactRational,
    pub rho_low: Extended,
}

pub fn space_extremes(omega: &PretangentApprox) -> SpaceExtremes {
    let row = &omega.distances[omega.marked_index];
    let rho_star = row.iter().max().cloned().unwrap_or_else(ExactRational::zero);
    let rho_low = row
        .iter()
        .filter(|d| d.is_positive())
        .min()
        .cloned()
        .map_or(Extended::Infinite, Extended::Finite);
    SpaceExtremes { rho_star, rho_low }
}

/// Summary of one sampled pretangent space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceSummary {
    pub scaling: String,
    pub pool_size: usize,
    pub classes: usize,
    pub rho_star: ExactRational,
    pub rho_low: Extended,
    /// Some class lies at distance exactly 1 from the marked point.
    pub has_unit_sphere: bool,
}

fn summarize(scaling: &str, pool_size: usize, omega: &PretangentApprox) -> SpaceSummary {
    let ext = space_extremes(omega);
    SpaceSummary {
        scaling: scaling.to_string(),
        pool_size,
        classes: omega.class_count(),
        has_unit_sphere: omega.distances[omega.marked_index].contains(&ExactRational::one()),
        rho_star: ext.rho_star,
        rho_low: ext.rho_low,
    }
}

/// Sampled `R*` and `R₊` over pretangent spaces with set-valued scalings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RStarSample {
    pub r_star: ExactRational,
    pub r_low: Extended,
    /// The sampled C_E whose maximizing sequence drives the witness space.
    pub c_e: Extended,
    pub witness: Option<SpaceSummary>,
    pub spaces: Vec<SpaceSummary>,
    /// Scalings skipped because extraction ran out of indices.
    pub skipped: usize,
}

/// Index maps into the enumeration used as scalings: shifts of the whole
/// enumeration, stride-2 decimations, and endpoints of the universal chain.
fn scaling_index_maps(points: &[ExactRational], trials: usize) -> Vec<(String, Vec<usize>)> {
    let depth = points.len();
    let mut maps: Vec<(String, Vec<usize>)> = Vec::new();
    for s in 0..trials.max(1) {
        if s + MIN_EXTRACTED + 2 <= depth {
            maps.push((format!("enumeration from n = {}", s + 1), (s..depth - 2).collect()));
        }
    }
    for offset in 0..2 {
        let idx: Vec<usize> = (offset..depth.saturating_sub(2)).step_by(2).collect();
        if idx.len() >= MIN_EXTRACTED {
            maps.push((format!("every 2nd point from n = {}", offset + 1), idx));
        }
    }
    maps
}

fn index_of(points: &[ExactRational], x: &ExactRational) -> Option<usize> {
    points.binary_search_by(|p| x.cmp(p)).ok()
}

/// Candidate pool for a scaling given by enumeration indices: the set-valued
/// sequences `x_{i_n + j}` for `j = -2..=2`, kept when bounded against the
/// scaling and not too slow to settle against `0̃` at this depth.
fn shifted_pool(
    points: &[ExactRational],
    idx: &[usize],
    r: &ScalingSequence,
    tol: &ExactRational,
) -> Vec<PointSequence> {
    let mut pool = Vec::new();
    for j in -2i64..=2 {
        let shifted: Option<Vec<ExactRational>> = idx
            .iter()
            .map(|&i| points.get(usize::try_from(i as i64 + j).ok()?).cloned())
            .collect();
        if let Some(values) = shifted {
            let seq = PointSequence::new(format!("shift {j:+}"), values);
            let zero = PointSequence::zero(seq.len());
            let settles = limit_ratio(&seq, &zero, r, tol).is_ok_and(|s| s.status != StabilityStatus::Indeterminate);
            if settles && is_bounded(&seq, r) {
                pool.push(seq);
            }
        }
    }
    pool
}

/// Samples pretangent spaces over set-valued scalings and reports the largest
/// radius and the smallest nonzero radius seen.
///
/// Besides the sampled scalings, the witness space uses the sampled
/// sequence `τ` attaining C_E, restricted to the indices where `a_n / τ_n`
/// equals C_E, with the chain's left endpoints `a_n` as the only candidate.
pub fn sample_r_star(set: &PorousSet, depth: usize, trials: usize, tol: &ExactRational) -> Result<RStarSample> {
    if set.zero_isolated() == TriState::Yes {
        return Err(Error::ZeroIsolated);
    }
    let points = set.enumerate(depth)?;
    let epsilon = default_epsilon();
    let mut maps = scaling_index_maps(&points, trials);
    if let Ok(chain) = universal_chain(set, depth, &epsilon) {
        for (name, ends) in [
            ("left endpoints of the universal chain", chain.left_endpoints()),
            (
                "right endpoints of the universal chain",
                chain.gaps.iter().map(|g| g.right.clone()).collect(),
            ),
        ] {
            let idx: Option<Vec<usize>> = ends.iter().map(|e| index_of(&points, e)).collect();
            if let Some(idx) = idx.filter(|i| i.len() >= MIN_EXTRACTED) {
                maps.push((name.to_string(), idx));
            }
        }
    }

    let mut spaces = Vec::new();
    let mut skipped = 0;
    for (name, idx) in &maps {
        let values: Vec<ExactRational> = idx.iter().map(|&i| points[i].clone()).collect();
        let r = ScalingSequence::from_set_values(
            TruncatedSequence::new(values, SequenceSource::FromSetEnumeration)?.with_rule(name.clone()),
        );
        let pool = shifted_pool(&points, idx, &r, tol);
        match build_self_stable(&r, &pool, tol) {
            Ok(omega) => spaces.push(summarize(name, pool.len(), &omega)),
            Err(Error::NoStableSubsequenceAtDepth) => skipped += 1,
            Err(e) => return Err(e),
        }
    }

    let ce = c_e_estimate(set, depth, &epsilon, trials.max(1))?;
    let witness = match &ce.value {
        Extended::Finite(c) => {
            let tau = ce.achieving_tau.values();
            let lefts: Vec<ExactRational> = admissible_gaps(set, depth, &epsilon)?
                .into_iter()
                .map(|g| g.left)
                .collect();
            let mut r_vals = Vec::new();
            let mut t_vals = Vec::new();
            for t in tau {
                // Smallest admissible left endpoint above t, as in C(τ).
                let above = lefts.partition_point(|a| a >= t);
                if let Some(a) = above.checked_sub(1).map(|i| &lefts[i]) {
                    if &(a / t) == c && contains_desc(&points, a) {
                        r_vals.push(t.clone());
                        t_vals.push(a.clone());
                    }
                }
            }
            if r_vals.len() >= MIN_EXTRACTED {
                let r = ScalingSequence::from_set_values(
                    TruncatedSequence::new(r_vals, SequenceSource::FromSetEnumeration)?
                        .with_rule("C_E-attaining indices of the maximizing sequence"),
                );
                let t = PointSequence::new("left endpoints of the C_E chain", t_vals);
                match build_self_stable(&r, &[t], tol) {
                    Ok(omega) => Some(summarize("proof witness", 1, &omega)),
                    Err(Error::NoStableSubsequenceAtDepth) => None,
                    Err(e) => return Err(e),
                }
            } else {
                None
            }
        }
        Extended::Infinite => None,
    };

    let all = spaces.iter().chain(witness.iter());
    let r_star = all
        .clone()
        .map(|s| s.rho_star.clone())
        .max()
        .unwrap_or_else(ExactRational::zero);
    let r_low = all.map(|s| s.rho_low.clone()).min().unwrap_or(Extended::Infinite);
    Ok(RStarSample {
        r_star,
        r_low,
        c_e: ce.value,
        witness,
        spaces,
        skipped,
    })
}

/// Summary of a finite family of pointed spaces given by distance sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyQ {
    /// Largest `ρ* / ρ₊` over the family; one-point spaces contribute 0.
    #[serde(rename = "Q")]
    pub q: ExactRational,
    pub weakly_self_similar: bool,
    /// Every space contains the distance 1.
    pub spheres_nonempty: bool,
    pub r_star: ExactRational,
    pub r_low: Extended,
}

/// Q, weak self-similarity and sphere checks for distance-set models of
/// pointed spaces. Each space must contain 0, the marked point.
pub fn family_q(spaces: &[Vec<ExactRational>]) -> Result<FamilyQ> {
    if spaces.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let normalized: Vec<Vec<ExactRational>> = spaces
        .iter()
        .map(|s| {
            let mut v = s.clone();
            v.sort();
            v.dedup();
            v
        })
        .collect();
    if let Some(i) = normalized.iter().position(|s| s.first().is_none_or(|f| !f.is_zero())) {
        return Err(Error::InvalidParameter(format!("space {} does not contain 0", i + 1)));
    }
    let mut q = ExactRational::zero();
    let mut r_star = ExactRational::zero();
    let mut r_low = Extended::Infinite;
    for s in &normalized {
        let top = s.last().expect("nonempty").clone();
        if let Some(low) = s.get(1) {
            let ratio = &top / low;
            if ratio > q {
                q = ratio;
            }
            if Extended::Finite(low.clone()) < r_low {
                r_low = Extended::Finite(low.clone());
            }
        }
        if top > r_star {
            r_star = top;
        }
    }
    let weakly_self_similar = normalized.iter().all(|s| {
        s[1..].iter().all(|t| {
            let scaled: Vec<ExactRational> = s.iter().map(|x| x / t).collect();
            normalized.contains(&scaled)
        })
    });
    let spheres_nonempty = normalized.iter().all(|s| s.contains(&ExactRational::one()));
    Ok(FamilyQ {
        q,
        weakly_self_similar,
        spheres_nonempty,
        r_star,
        r_low,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gap_analysis::default_tol;
    use crate::rational::rat;
    use crate::set_model::{make_set, ExponentRule, SetSpec};

    fn pow2_neg_sq(n: i64) -> ExactRational {
        ExactRational::pow2(-n * n)
    }

    fn scaling(values: Vec<ExactRational>) -> ScalingSequence {
        ScalingSequence::new(TruncatedSequence::new(values, SequenceSource::External).unwrap())
    }

    fn w_seq(len: i64) -> Vec<ExactRational> {
        (1..=len).map(pow2_neg_sq).collect()
    }

    #[test]
    fn limit_ratio_examples() {
        let tol = default_tol();
        let r = scaling(w_seq(16));
        let zero = PointSequence::zero(16);
        let x = PointSequence::new("x", w_seq(16));
        let s = limit_ratio(&x, &zero, &r, &tol).unwrap();
        assert_eq!((s.status, s.limit), (StabilityStatus::Stable, Some(rat(1, 1))));

        let two = PointSequence::new("2x", w_seq(16).iter().map(|v| v * &rat(2, 1)).collect());
        assert_eq!(limit_ratio(&two, &zero, &r, &tol).unwrap().limit, Some(rat(2, 1)));

        let geo: Vec<ExactRational> = (1..=16).map(|n| ExactRational::pow2(-n)).collect();
        let alt: Vec<ExactRational> = (1..=16)
            .map(|n| {
                if n % 2 == 0 {
                    ExactRational::pow2(-n)
                } else {
                    ExactRational::pow2(1 - n)
                }
            })
            .collect();
        let s = limit_ratio(&PointSequence::new("alt", alt), &zero, &scaling(geo), &tol).unwrap();
        assert_eq!(s.status, StabilityStatus::Unstable);
        assert_eq!(s.oscillation, rat(1, 1));

        assert!(matches!(
            limit_ratio(&x, &PointSequence::zero(8), &r, &tol),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn envelope() {
        let s = |v: Vec<ExactRational>| TruncatedSequence::new(v, SequenceSource::External).unwrap();
        let e = monotone_envelope(&s(vec![rat(3, 1), rat(1, 1), rat(2, 1), rat(1, 2)]));
        assert_eq!(e.values(), &[rat(3, 1), rat(1, 1), rat(1, 1), rat(1, 2)]);
        let e = monotone_envelope(&s(vec![rat(1, 1), rat(2, 1), rat(3, 1)]));
        assert_eq!(e.values(), &[rat(1, 1), rat(1, 1), rat(1, 1)]);
        let dec = s(vec![rat(3, 1), rat(2, 1), rat(1, 1)]);
        assert_eq!(monotone_envelope(&dec).values(), dec.values());
    }

    #[test]
    fn normality_examples() {
        let tol = default_tol();
        let w = make_set(SetSpec::super_geometric(ExponentRule::square())).unwrap();
        let r = scaling(w_seq(12));
        let n = is_normal_scaling(&w, &r, 16, &tol).unwrap();
        assert_eq!(n.normal, TriState::Yes);
        assert_eq!(n.witness.unwrap().values(), r.values.values());

        let harmonic = scaling((1..=12).map(|k| rat(1, k)).collect());
        assert_eq!(is_normal_scaling(&w, &harmonic, 16, &tol).unwrap().normal, TriState::No);

        let g = make_set(SetSpec::geometric(rat(1, 2))).unwrap();
        let off = scaling((1..=12).map(|k| &rat(3, 1) * &ExactRational::pow2(-k - 1)).collect());
        let n = is_normal_scaling(&g, &off, 20, &tol).unwrap();
        assert_eq!(n.normal, TriState::No);
        assert_eq!(n.deviation, Some(rat(1, 3)));

        let one = make_set(SetSpec::explicit(vec![rat(1, 1)])).unwrap();
        assert!(matches!(is_normal_scaling(&one, &r, 4, &tol), Err(Error::ZeroIsolated)));
    }

    #[test]
    fn three_class_space() {
        let tol = default_tol();
        let r = scaling(w_seq(16));
        let x = PointSequence::new("x", w_seq(16));
        let t = PointSequence::new("2x", w_seq(16).iter().map(|v| v * &rat(2, 1)).collect());
        let omega = build_self_stable(&r, &[PointSequence::zero(16), x, t], &tol).unwrap();
        assert_eq!(omega.class_count(), 3);
        assert_eq!(omega.distances[0][1], rat(1, 1));
        assert_eq!(omega.distances[0][2], rat(2, 1));
        assert_eq!(omega.distances[1][2], rat(1, 1));
        assert!(omega.satisfies_triangle_inequality());
        let ext = space_extremes(&omega);
        assert_eq!(ext.rho_star, rat(2, 1));
        assert_eq!(ext.rho_low, Extended::Finite(rat(1, 1)));
    }

    #[test]
    fn zero_distance_members_merge() {
        let tol = default_tol();
        let len = 48;
        let base: Vec<ExactRational> = (1..=len).map(|n| ExactRational::pow2(-n)).collect();
        let r = scaling(base.clone());
        let x = PointSequence::new("x", base.clone());
        let y = PointSequence::new(
            "x(1+2^-n)",
            base.iter()
                .zip(1..)
                .map(|(v, n)| v * &(&rat(1, 1) + &ExactRational::pow2(-n)))
                .collect(),
        );
        let omega = build_self_stable(&r, &[x, y], &tol).unwrap();
        assert_eq!(omega.class_count(), 2);
        assert_eq!(omega.members[1].class, omega.members[2].class);
    }

    #[test]
    fn one_point_space() {
        let omega = build_self_stable(&scaling(w_seq(12)), &[PointSequence::zero(12)], &default_tol()).unwrap();
        assert_eq!(omega.class_count(), 1);
        let ext = space_extremes(&omega);
        assert_eq!(ext.rho_star, rat(0, 1));
        assert_eq!(ext.rho_low, Extended::Infinite);
    }

    #[test]
    fn unstable_candidate_is_rejected() {
        let tol = default_tol();
        let geo: Vec<ExactRational> = (1..=32).map(|n| ExactRational::pow2(-n)).collect();
        let alt: Vec<ExactRational> = (1..=32i64)
            .map(|n| {
                let bump = if n % 2 == 0 { ExactRational::pow2(-n) } else { rat(0, 1) };
                &ExactRational::pow2(-n) + &bump
            })
            .collect();
        let omega = build_self_stable(&scaling(geo), &[PointSequence::new("alt", alt)], &tol).unwrap();
        assert_eq!(omega.rejected, vec!["alt".to_string()]);
        assert_eq!(omega.class_count(), 1);
    }

    #[test]
    fn extraction_keeps_the_settled_parity() {
        let tol = default_tol();
        let geo: Vec<ExactRational> = (0..24).map(|n| ExactRational::pow2(-n - 1)).collect();
        // Ratio 1 at even positions, 1 + 2^-n at odd ones: too slow to settle
        // on the deep half, constant on the even positions.
        let slow: Vec<ExactRational> = geo
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if i % 2 == 0 {
                    v.clone()
                } else {
                    v * &(&rat(1, 1) + &ExactRational::pow2(-(i as i64)))
                }
            })
            .collect();
        let omega = build_self_stable(&scaling(geo), &[PointSequence::new("slow", slow)], &tol).unwrap();
        assert!(omega.indices.iter().all(|i| i % 2 == 0));
        assert_eq!(omega.indices.len(), 12);
        assert_eq!(omega.distances[0][1], rat(1, 1));
    }

    #[test]
    fn unbounded_candidates_are_refused() {
        let r = scaling(w_seq(16));
        let big = PointSequence::new("up", (0..16).map(pow2_neg_sq).collect());
        assert!(matches!(
            build_self_stable(&r, &[big], &default_tol()),
            Err(Error::UnboundedCandidate { index: 1 })
        ));
    }

    #[test]
    fn r_star_examples() {
        let tol = default_tol();
        let w = make_set(SetSpec::super_geometric(ExponentRule::square())).unwrap();
        let s = sample_r_star(&w, 24, 4, &tol).unwrap();
        assert_eq!(s.r_star, rat(1, 1));
        assert_eq!(s.r_low, Extended::Finite(rat(1, 1)));

        let d = make_set(SetSpec::doubled(
            SetSpec::super_geometric(ExponentRule::square()),
            rat(2, 1),
        ))
        .unwrap();
        let s = sample_r_star(&d, 24, 4, &tol).unwrap();
        assert_eq!(s.r_star, rat(2, 1));
        assert_eq!(s.r_low, Extended::Finite(rat(1, 2)));
        assert_eq!(s.c_e, Extended::Finite(rat(2, 1)));
        assert_eq!(s.witness.unwrap().rho_star, rat(2, 1));

        let one = make_set(SetSpec::explicit(vec![rat(1, 1)])).unwrap();
        assert!(matches!(sample_r_star(&one, 8, 2, &tol), Err(Error::ZeroIsolated)));
    }

    #[test]
    fn family_q_examples() {
        let f = |v: &[(u64, u64)]| v.iter().map(|&(a, b)| rat(a, b)).collect::<Vec<_>>();
        let single = family_q(&[f(&[(0, 1), (1, 1), (2, 1)])]).unwrap();
        assert_eq!(single.q, rat(2, 1));
        assert!(single.spheres_nonempty);
        assert!(!single.weakly_self_similar);

        let pair = family_q(&[f(&[(0, 1), (1, 1), (2, 1)]), f(&[(0, 1), (1, 2), (1, 1)])]).unwrap();
        assert!(pair.weakly_self_similar);
        assert_eq!(pair.q, rat(2, 1));
        assert_eq!(pair.r_low, Extended::Finite(rat(1, 2)));

        let unit = family_q(&[f(&[(0, 1), (1, 1)])]).unwrap();
        assert_eq!(unit.q, rat(1, 1));
        assert!(unit.weakly_self_similar);

        assert!(matches!(family_q(&[]), Err(Error::EmptyFamily)));
    }
}
