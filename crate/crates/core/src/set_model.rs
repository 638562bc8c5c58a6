//! Subsets of the half-line near 0, described declaratively and enumerated
//! lazily in strictly decreasing order.
//!
//! A [`SetSpec`] names a kind of set and its parameters; [`make_set`]
//! validates it and returns a [`PorousSet`], whose enumeration is restartable
//! and deterministic. Every built-in kind either is finite (0 isolated) or
//! carries a closed-form rule that certifies accumulation at 0, so callers
//! never have to infer asymptotics from a numeric prefix.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::ExactRational;

/// Default cap on numerator and denominator size for enumerated points.
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 20;

/// Number of leading points checked for strict decrease at construction.
const PROBE_DEPTH: usize = 16;

/// Three-valued answer used wherever a finite prefix cannot settle a question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TriState {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for TriState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriState::Yes => "yes",
            TriState::No => "no",
            TriState::Unknown => "unknown",
        })
    }
}

/// Polynomial exponent rule `n ↦ c0 + c1 n + c2 n² + …` with nonnegative
/// integer coefficients, serialized as the coefficient array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentRule(pub Vec<u64>);

impl ExponentRule {
    pub fn monomial(degree: usize) -> Self {
        let mut coeffs = vec![0; degree + 1];
        coeffs[degree] = 1;
        ExponentRule(coeffs)
    }

    /// `n ↦ n²`.
    pub fn square() -> Self {
        Self::monomial(2)
    }

    /// `n ↦ n³`.
    pub fn cube() -> Self {
        Self::monomial(3)
    }

    /// Degree ignoring trailing zero coefficients; `None` for the zero rule.
    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|&c| c != 0)
    }

    pub fn eval(&self, n: u64) -> Option<u64> {
        self.0
            .iter()
            .rev()
            .try_fold(0u64, |acc, &c| acc.checked_mul(n)?.checked_add(c))
    }

    fn as_i128(&self) -> Vec<i128> {
        let mut v: Vec<i128> = self.0.iter().map(|&c| c as i128).collect();
        while v.len() > 1 && *v.last().unwrap() == 0 {
            v.pop();
        }
        v
    }

    /// Certifies `e(n+1) - e(n) >= n²` for every `n >= 1` by checking that the
    /// polynomial `p(m) = e(m+2) - e(m+1) - (m+1)²` has nonnegative
    /// coefficients.
    pub fn certifies_super_square_gap(&self) -> bool {
        let e = self.as_i128();
        let shifted = taylor_shift_one(&e);
        let mut p: Vec<i128> = shifted
            .iter()
            .zip(e.iter().chain(std::iter::repeat(&0)))
            .map(|(a, b)| a - b)
            .collect();
        if p.len() < 3 {
            p.resize(3, 0);
        }
        p[2] -= 1;
        taylor_shift_one(&p).iter().all(|&c| c >= 0)
    }
}

impl fmt::Display for ExponentRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (k, &c) in self.0.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let term = match (k, c) {
                (0, c) => c.to_string(),
                (1, 1) => "n".to_string(),
                (1, c) => format!("{c}n"),
                (k, 1) => format!("n^{k}"),
                (k, c) => format!("{c}n^{k}"),
            };
            terms.push(term);
        }
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + "))
        }
    }
}

/// Coefficients of `c(x + 1)` given those of `c(x)`.
fn taylor_shift_one(c: &[i128]) -> Vec<i128> {
    let mut out = c.to_vec();
    let n = out.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            out[j] += out[j + 1];
        }
    }
    out
}

/// Rule assigning each index `n` its class `m(n)` of an infinite partition
/// of the positive integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionRule {
    /// `m(n) = 1 + v₂(n)`; class `k` starts at `2^(k-1)`.
    #[default]
    TwoAdic,
    /// Reads `n - 1 = j(j+1)/2 + i` with `0 <= i <= j` and sets `m(n) = i + 1`.
    Diagonal,
    /// Every index in one class. Not a partition into infinitely many classes.
    Constant(u32),
}

impl PartitionRule {
    pub fn class_of(&self, n: u64) -> u64 {
        assert!(n >= 1, "indices start at 1");
        match self {
            PartitionRule::TwoAdic => 1 + n.trailing_zeros() as u64,
            PartitionRule::Diagonal => {
                let mut rest = n - 1;
                let mut j = 0;
                while rest > j {
                    j += 1;
                    rest -= j;
                }
                rest + 1
            }
            PartitionRule::Constant(k) => *k as u64,
        }
    }

    /// Whether the rule is an infinite partition with every class infinite
    /// and strictly increasing class minima.
    pub fn is_infinite_partition(&self) -> bool {
        !matches!(self, PartitionRule::Constant(_))
    }

    /// Smallest member of class `k`, when the rule has a closed form for it.
    pub fn class_min(&self, k: u64) -> Option<u64> {
        match self {
            PartitionRule::TwoAdic => 1u64.checked_shl((k - 1) as u32),
            PartitionRule::Diagonal => Some((k - 1) * k / 2 + k),
            PartitionRule::Constant(c) if k == *c as u64 => Some(1),
            PartitionRule::Constant(_) => None,
        }
    }
}

/// Which piece of the union construction a split-pair spec refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitMember {
    /// `{τₙ}`.
    E1,
    /// `{2^(-m(n)) τₙ}`.
    E1Star,
    /// Both.
    Union,
}

fn default_tau() -> ExponentRule {
    ExponentRule::cube()
}

fn default_base() -> u64 {
    2
}

/// Declarative description of a subset of `(0, ∞)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum SetSpec {
    /// Finite list of points, optionally extended by a rule-defined tail.
    Explicit {
        points: Vec<ExactRational>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail: Option<Box<SetSpec>>,
    },
    /// `{n^(-p) : n >= 1}`.
    PowerDecay {
        exponent: u32,
    },
    /// `{base^(-e(n)) : n >= 1}`.
    SuperGeometric {
        #[serde(default = "default_base")]
        base: u64,
        exponent: ExponentRule,
    },
    /// `{1/n! : n >= 1}`.
    FactorialDecay {},
    /// `{qⁿ : n >= 1}` with `0 < q < 1`.
    Geometric {
        ratio: ExactRational,
    },
    /// `{xₙ} ∪ {c·xₙ}` for a base set `{xₙ}` and `c > 1`.
    Doubled {
        base: Box<SetSpec>,
        factor: ExactRational,
    },
    Union {
        members: Vec<SetSpec>,
    },
    /// `{t·x : x ∈ base}`.
    Rescaled {
        base: Box<SetSpec>,
        factor: ExactRational,
    },
    /// Members of the union counterexample `{τₙ} ∪ {2^(-m(n)) τₙ}` with
    /// `τₙ = 2^(-e(n))`.
    #[serde(rename = "prop28")]
    SplitPair {
        member: SplitMember,
        #[serde(default = "default_tau")]
        tau: ExponentRule,
        #[serde(default)]
        partition: PartitionRule,
    },
}

impl SetSpec {
    pub fn geometric(ratio: ExactRational) -> Self {
        SetSpec::Geometric { ratio }
    }

    pub fn super_geometric(exponent: ExponentRule) -> Self {
        SetSpec::SuperGeometric { base: 2, exponent }
    }

    pub fn factorial() -> Self {
        SetSpec::FactorialDecay {}
    }

    pub fn explicit(points: Vec<ExactRational>) -> Self {
        SetSpec::Explicit { points, tail: None }
    }

    pub fn explicit_with_tail(points: Vec<ExactRational>, tail: SetSpec) -> Self {
        SetSpec::Explicit {
            points,
            tail: Some(Box::new(tail)),
        }
    }

    pub fn doubled(base: SetSpec, factor: ExactRational) -> Self {
        SetSpec::Doubled {
            base: Box::new(base),
            factor,
        }
    }

    pub fn union(members: Vec<SetSpec>) -> Self {
        SetSpec::Union { members }
    }

    pub fn rescaled(base: SetSpec, factor: ExactRational) -> Self {
        SetSpec::Rescaled {
            base: Box::new(base),
            factor,
        }
    }

    pub fn split_pair(member: SplitMember) -> Self {
        SetSpec::SplitPair {
            member,
            tau: default_tau(),
            partition: PartitionRule::default(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SetSpec::Explicit { .. } => "explicit",
            SetSpec::PowerDecay { .. } => "power-decay",
            SetSpec::SuperGeometric { .. } => "super-geometric",
            SetSpec::FactorialDecay {} => "factorial-decay",
            SetSpec::Geometric { .. } => "geometric",
            SetSpec::Doubled { .. } => "doubled",
            SetSpec::Union { .. } => "union",
            SetSpec::Rescaled { .. } => "rescaled",
            SetSpec::SplitPair { .. } => "prop28",
        }
    }
}

/// Facts each kind certifies about its enumeration `x₁ > x₂ > …`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetTraits {
    /// The set is finite, so 0 is isolated.
    pub finite: bool,
    /// `x_{n+1}/xₙ → 0`.
    pub ratio_vanishing: bool,
    /// `x_{n+1}/xₙ` is nonincreasing in `n`.
    pub ratio_nonincreasing: bool,
}

/// A validated set with a lazy, restartable, strictly decreasing enumeration.
#[derive(Clone)]
pub struct PorousSet {
    spec: Arc<SetSpec>,
    traits: SetTraits,
    zero_isolated: TriState,
    bit_budget: u64,
}

impl fmt::Debug for PorousSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PorousSet")
            .field("kind", &self.spec.kind_name())
            .field("zero_isolated", &self.zero_isolated)
            .finish()
    }
}

/// Prefix of an enumeration; `complete` when a finite set was exhausted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub points: Vec<ExactRational>,
    pub complete: bool,
}

type PointStream = Box<dyn Iterator<Item = Result<ExactRational>> + Send>;

/// Validates `spec` and builds the set with the default bit budget.
pub fn make_set(spec: SetSpec) -> Result<PorousSet> {
    make_set_with_budget(spec, DEFAULT_BIT_BUDGET)
}

pub fn make_set_with_budget(spec: SetSpec, bit_budget: u64) -> Result<PorousSet> {
    if bit_budget == 0 {
        return Err(Error::InvalidParameter("bit budget must be positive".into()));
    }
    let traits = validate(&spec)?;
    let set = PorousSet {
        zero_isolated: if traits.finite { TriState::Yes } else { TriState::No },
        spec: Arc::new(spec),
        traits,
        bit_budget,
    };
    set.probe()?;
    Ok(set)
}

fn validate(spec: &SetSpec) -> Result<SetTraits> {
    let infinite = |ratio_vanishing, ratio_nonincreasing| SetTraits {
        finite: false,
        ratio_vanishing,
        ratio_nonincreasing,
    };
    match spec {
        SetSpec::Explicit { points, tail } => {
            if points.iter().any(|p| !p.is_positive()) {
                return Err(Error::InvalidSpec("explicit points must be positive".into()));
            }
            match tail {
                None => {
                    if points.is_empty() {
                        return Err(Error::InvalidSpec("explicit set is empty".into()));
                    }
                    Ok(SetTraits {
                        finite: true,
                        ratio_vanishing: false,
                        ratio_nonincreasing: false,
                    })
                }
                Some(tail) => {
                    let t = validate(tail)?;
                    Ok(SetTraits {
                        finite: t.finite,
                        ratio_vanishing: false,
                        ratio_nonincreasing: false,
                    })
                }
            }
        }
        SetSpec::PowerDecay { exponent } => {
            if *exponent == 0 {
                return Err(Error::InvalidSpec("power-decay exponent must be >= 1".into()));
            }
            Ok(infinite(false, false))
        }
        SetSpec::SuperGeometric { base, exponent } => {
            if *base < 2 {
                return Err(Error::InvalidSpec("super-geometric base must be >= 2".into()));
            }
            match exponent.degree() {
                Some(d) if d >= 1 => Ok(infinite(d >= 2, true)),
                _ => Err(Error::InvalidSpec(format!(
                    "exponent rule {exponent} is not strictly increasing"
                ))),
            }
        }
        SetSpec::FactorialDecay {} => Ok(infinite(true, true)),
        SetSpec::Geometric { ratio } => {
            if !ratio.is_positive() || *ratio >= ExactRational::one() {
                return Err(Error::InvalidSpec(format!(
                    "geometric ratio must lie in (0, 1), got {ratio}"
                )));
            }
            Ok(infinite(false, true))
        }
        SetSpec::Doubled { base, factor } => {
            if *factor <= ExactRational::one() {
                return Err(Error::InvalidSpec(format!(
                    "doubling factor must exceed 1, got {factor}"
                )));
            }
            let b = validate(base)?;
            if b.finite || !b.ratio_nonincreasing {
                return Err(Error::InvalidSpec(
                    "doubled base must be an infinite rule with certified nonincreasing ratio".into(),
                ));
            }
            // With x_{n+1}/x_n nonincreasing, c·x_2 < x_1 implies c·x_{n+1} < x_n for all n.
            let head: Vec<ExactRational> = stream(base).take(2).collect::<Result<_>>()?;
            if factor * &head[1] >= head[0] {
                return Err(Error::FactorTooLarge {
                    factor: factor.clone(),
                    index: 1,
                });
            }
            Ok(infinite(false, false))
        }
        SetSpec::Union { members } => {
            if members.is_empty() {
                return Err(Error::InvalidSpec("union needs at least one member".into()));
            }
            let mut finite = true;
            for m in members {
                finite &= validate(m)?.finite;
            }
            Ok(SetTraits {
                finite,
                ratio_vanishing: false,
                ratio_nonincreasing: false,
            })
        }
        SetSpec::Rescaled { base, factor } => {
            if !factor.is_positive() {
                return Err(Error::InvalidSpec("rescale factor must be positive".into()));
            }
            validate(base)
        }
        SetSpec::SplitPair { member, tau, partition } => {
            if !tau.certifies_super_square_gap() {
                return Err(Error::InvalidTauRule(format!(
                    "cannot certify e(n+1) - e(n) >= n^2 for e(n) = {tau}"
                )));
            }
            for n in 1..=256u64 {
                if partition.class_of(n) > n || partition.class_of(n) == 0 {
                    return Err(Error::InvalidPartition(format!(
                        "m({n}) = {} is outside [1, n]",
                        partition.class_of(n)
                    )));
                }
            }
            Ok(match member {
                SplitMember::E1 => infinite(true, true),
                SplitMember::E1Star => infinite(true, false),
                SplitMember::Union => infinite(false, false),
            })
        }
    }
}

fn closed_form<F>(f: F) -> PointStream
where
    F: Fn(u64) -> Result<ExactRational> + Send + 'static,
{
    Box::new((1u64..).map(f))
}

/// Size above which a power is rejected before it is materialized. The real
/// budget check happens in [`PorousSet::points`].
const MATERIALIZE_CAP_BITS: u64 = 1 << 28;

fn power_of(base: u64, exponent: Option<u64>) -> Result<ExactRational> {
    let log2_base = 63 - base.leading_zeros() as u64;
    let bits = exponent.and_then(|e| e.checked_mul(log2_base)).unwrap_or(u64::MAX);
    if bits > MATERIALIZE_CAP_BITS {
        return Err(Error::BitBudgetExceeded { bits, budget: 0 });
    }
    Ok(ExactRational::int_pow(base, -(exponent.unwrap() as i64)))
}

/// Raw enumeration of a validated spec, without the budget check.
fn stream(spec: &SetSpec) -> PointStream {
    match spec {
        SetSpec::Explicit { points, tail } => {
            let mut sorted = points.clone();
            sorted.sort_by(|a, b| b.cmp(a));
            sorted.dedup();
            let head: PointStream = Box::new(sorted.into_iter().map(Ok));
            match tail {
                None => head,
                Some(tail) => Box::new(MergeDesc::new(vec![head, stream(tail)])),
            }
        }
        SetSpec::PowerDecay { exponent } => {
            let p = *exponent as usize;
            closed_form(move |n| {
                let d = num_traits::pow(num_bigint::BigUint::from(n), p);
                Ok(ExactRational::from_biguints(1u32.into(), d))
            })
        }
        SetSpec::SuperGeometric { base, exponent } => {
            let (base, exponent) = (*base, exponent.clone());
            closed_form(move |n| power_of(base, exponent.eval(n)))
        }
        SetSpec::FactorialDecay {} => {
            let mut fact = num_bigint::BigUint::from(1u32);
            Box::new((1u64..).map(move |n| {
                fact *= n;
                Ok(ExactRational::from_biguints(1u32.into(), fact.clone()))
            }))
        }
        SetSpec::Geometric { ratio } => {
            let q = ratio.clone();
            let mut current = ExactRational::one();
            Box::new(std::iter::repeat_with(move || {
                current = &current * &q;
                Ok(current.clone())
            }))
        }
        SetSpec::Doubled { base, factor } => {
            let c = factor.clone();
            let scaled: PointStream = Box::new(stream(base).map(move |p| p.map(|x| &x * &c)));
            Box::new(MergeDesc::new(vec![stream(base), scaled]))
        }
        SetSpec::Union { members } => Box::new(MergeDesc::new(members.iter().map(stream).collect())),
        SetSpec::Rescaled { base, factor } => {
            let t = factor.clone();
            Box::new(stream(base).map(move |p| p.map(|x| &x * &t)))
        }
        SetSpec::SplitPair { member, tau, partition } => {
            let (tau, partition) = (tau.clone(), *partition);
            let tau_star = {
                let tau = tau.clone();
                closed_form(move |n| {
                    let e = tau.eval(n).and_then(|e| e.checked_add(partition.class_of(n)));
                    power_of(2, e)
                })
            };
            let tau_plain = closed_form(move |n| power_of(2, tau.eval(n)));
            match member {
                SplitMember::E1 => tau_plain,
                SplitMember::E1Star => tau_star,
                SplitMember::Union => Box::new(MergeDesc::new(vec![tau_plain, tau_star])),
            }
        }
    }
}

/// k-way merge of strictly decreasing streams with duplicate elimination.
struct MergeDesc {
    heads: Vec<Option<Result<ExactRational>>>,
    streams: Vec<PointStream>,
}

impl MergeDesc {
    fn new(mut streams: Vec<PointStream>) -> Self {
        let heads = streams.iter_mut().map(|s| s.next()).collect();
        MergeDesc { heads, streams }
    }
}

impl Iterator for MergeDesc {
    type Item = Result<ExactRational>;

    fn next(&mut self) -> Option<Self::Item> {
        let mut best: Option<usize> = None;
        for (i, head) in self.heads.iter().enumerate() {
            match head {
                None => {}
                Some(Err(_)) => {
                    let err = self.heads[i].take().unwrap();
                    return Some(err);
                }
                Some(Ok(v)) => {
                    let better = match best {
                        None => true,
                        Some(b) => match &self.heads[b] {
                            Some(Ok(bv)) => v > bv,
                            _ => true,
                        },
                    };
                    if better {
                        best = Some(i);
                    }
                }
            }
        }
        let b = best?;
        let value = match self.heads[b].take() {
            Some(Ok(v)) => v,
            _ => unreachable!(),
        };
        self.heads[b] = self.streams[b].next();
        for i in 0..self.heads.len() {
            if matches!(&self.heads[i], Some(Ok(v)) if *v == value) {
                self.heads[i] = self.streams[i].next();
            }
        }
        Some(Ok(value))
    }
}

impl PorousSet {
    pub fn spec(&self) -> &SetSpec {
        &self.spec
    }

    pub fn traits(&self) -> SetTraits {
        self.traits
    }

    pub fn zero_isolated(&self) -> TriState {
        self.zero_isolated
    }

    pub fn is_finite(&self) -> bool {
        self.traits.finite
    }

    pub fn bit_budget(&self) -> u64 {
        self.bit_budget
    }

    /// Same set with a different bit budget.
    pub fn with_bit_budget(&self, bit_budget: u64) -> Self {
        PorousSet {
            bit_budget,
            ..self.clone()
        }
    }

    /// Fresh lazy enumeration, checked against the bit budget.
    pub fn points(&self) -> impl Iterator<Item = Result<ExactRational>> + Send {
        let budget = self.bit_budget;
        stream(&self.spec).map(move |p| {
            let p = p.map_err(|e| match e {
                Error::BitBudgetExceeded { bits, .. } => Error::BitBudgetExceeded { bits, budget },
                other => other,
            })?;
            if p.bits() > budget {
                return Err(Error::BitBudgetExceeded { bits: p.bits(), budget });
            }
            Ok(p)
        })
    }

    /// First `depth` points, or every point when the set is finite and smaller.
    pub fn enumerate_available(&self, depth: usize) -> Result<Enumeration> {
        let points: Vec<ExactRational> = self.points().take(depth).collect::<Result<_>>()?;
        let complete = points.len() < depth;
        Ok(Enumeration { points, complete })
    }

    /// First `depth` points in strictly decreasing order.
    pub fn enumerate(&self, depth: usize) -> Result<Vec<ExactRational>> {
        if depth == 0 {
            return Err(Error::InvalidParameter("depth must be >= 1".into()));
        }
        let e = self.enumerate_available(depth)?;
        if e.complete {
            return Err(Error::DepthExceedsFiniteSet {
                requested: depth,
                available: e.points,
            });
        }
        Ok(e.points)
    }

    /// Whether `x` is among the first `depth` points.
    pub fn contains_within(&self, x: &ExactRational, depth: usize) -> Result<bool> {
        for p in self.points().take(depth) {
            let p = p?;
            if p == *x {
                return Ok(true);
            }
            if p < *x {
                return Ok(false);
            }
        }
        Ok(false)
    }

    fn probe(&self) -> Result<()> {
        let mut head = Vec::new();
        for p in self.points().take(PROBE_DEPTH) {
            match p {
                Ok(p) => head.push(p),
                // Deep points beyond the budget are reported when requested.
                Err(Error::BitBudgetExceeded { .. }) => break,
                Err(e) => return Err(e),
            }
        }
        for (i, w) in head.windows(2).enumerate() {
            if w[1] >= w[0] {
                return Err(Error::InvalidSpec(format!(
                    "enumeration is not strictly decreasing at index {}",
                    i + 1
                )));
            }
        }
        if head.iter().any(|p| !p.is_positive()) {
            return Err(Error::InvalidSpec("enumeration produced a nonpositive point".into()));
        }
        Ok(())
    }
}

/// Pointwise scaled set `t·E`.
pub fn rescale(set: &PorousSet, t: &ExactRational) -> Result<PorousSet> {
    if !t.is_positive() {
        return Err(Error::InvalidParameter("rescale factor must be positive".into()));
    }
    make_set_with_budget(SetSpec::rescaled(set.spec().clone(), t.clone()), set.bit_budget)
}

/// Set union `E ∪ F` as a sorted merge.
pub fn union(a: &PorousSet, b: &PorousSet) -> Result<PorousSet> {
    make_set_with_budget(
        SetSpec::union(vec![a.spec().clone(), b.spec().clone()]),
        a.bit_budget.max(b.bit_budget),
    )
}

/// Whether 0 is an accumulation point, as far as the spec certifies.
///
/// Rule-defined kinds are always decided. A bare explicit list answers `No`
/// once `depth` covers the whole list and `Unknown` before that.
pub fn accumulates_at_zero(set: &PorousSet, depth: usize) -> TriState {
    fn go(spec: &SetSpec, depth: usize) -> TriState {
        let combine = |parts: Vec<TriState>| {
            if parts.contains(&TriState::Yes) {
                TriState::Yes
            } else if parts.iter().all(|&p| p == TriState::No) {
                TriState::No
            } else {
                TriState::Unknown
            }
        };
        match spec {
            SetSpec::Explicit { points, tail } => {
                let head = if depth >= points.len() {
                    TriState::No
                } else {
                    TriState::Unknown
                };
                match tail {
                    None => head,
                    Some(t) => combine(vec![head, go(t, depth)]),
                }
            }
            SetSpec::Union { members } => combine(members.iter().map(|m| go(m, depth)).collect()),
            SetSpec::Doubled { base, .. } | SetSpec::Rescaled { base, .. } => go(base, depth),
            _ => TriState::Yes,
        }
    }
    go(set.spec(), depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn w() -> PorousSet {
        make_set(SetSpec::super_geometric(ExponentRule::square())).unwrap()
    }

    fn geo_half() -> PorousSet {
        make_set(SetSpec::geometric(rat(1, 2))).unwrap()
    }

    #[test]
    fn geometric_enumeration() {
        assert_eq!(geo_half().enumerate(3).unwrap(), vec![rat(1, 2), rat(1, 4), rat(1, 8)]);
    }

    #[test]
    fn super_geometric_enumeration() {
        assert_eq!(w().enumerate(2).unwrap(), vec![rat(1, 2), rat(1, 16)]);
        assert_eq!(w().enumerate(3).unwrap()[2], ExactRational::pow2(-9));
    }

    #[test]
    fn explicit_single_point_is_finite() {
        let e = make_set(SetSpec::explicit(vec![rat(1, 1)])).unwrap();
        assert_eq!(e.zero_isolated(), TriState::Yes);
        match e.enumerate(2) {
            Err(Error::DepthExceedsFiniteSet { requested, available }) => {
                assert_eq!(requested, 2);
                assert_eq!(available, vec![rat(1, 1)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn union_with_explicit_merges() {
        let u = union(&geo_half(), &make_set(SetSpec::explicit(vec![rat(3, 4)])).unwrap()).unwrap();
        assert_eq!(u.enumerate(3).unwrap(), vec![rat(3, 4), rat(1, 2), rat(1, 4)]);
        assert_eq!(u.zero_isolated(), TriState::No);

        let with_one = union(&geo_half(), &make_set(SetSpec::explicit(vec![rat(1, 1)])).unwrap()).unwrap();
        assert_eq!(with_one.enumerate(3).unwrap(), vec![rat(1, 1), rat(1, 2), rat(1, 4)]);
    }

    #[test]
    fn union_is_idempotent() {
        let u = union(&w(), &w()).unwrap();
        assert_eq!(u.enumerate(10).unwrap(), w().enumerate(10).unwrap());
    }

    #[test]
    fn rescale_examples() {
        let g2 = rescale(&geo_half(), &rat(2, 1)).unwrap();
        assert_eq!(g2.enumerate(3).unwrap(), vec![rat(1, 1), rat(1, 2), rat(1, 4)]);
        let w2 = rescale(&w(), &rat(2, 1)).unwrap();
        assert_eq!(
            w2.enumerate(3).unwrap(),
            vec![rat(1, 1), ExactRational::pow2(-3), ExactRational::pow2(-8)]
        );
        let same = rescale(&w(), &rat(1, 1)).unwrap();
        assert_eq!(same.enumerate(6).unwrap(), w().enumerate(6).unwrap());
    }

    #[test]
    fn accumulation_tri_state() {
        assert_eq!(accumulates_at_zero(&geo_half(), 4), TriState::Yes);
        let two = make_set(SetSpec::explicit(vec![rat(1, 1), rat(1, 2)])).unwrap();
        assert_eq!(accumulates_at_zero(&two, 8), TriState::No);
        let long: Vec<ExactRational> = (1..=1000).map(|n| rat(1, n)).collect();
        let long = make_set(SetSpec::explicit(long)).unwrap();
        assert_eq!(accumulates_at_zero(&long, 10), TriState::Unknown);
        assert_eq!(accumulates_at_zero(&long, 1000), TriState::No);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(matches!(
            make_set(SetSpec::geometric(rat(1, 1))),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            make_set(SetSpec::super_geometric(ExponentRule(vec![3]))),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            make_set(SetSpec::explicit(vec![rat(0, 1)])),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            make_set(SetSpec::doubled(SetSpec::geometric(rat(1, 2)), rat(2, 1))),
            Err(Error::FactorTooLarge { .. })
        ));
    }

    #[test]
    fn bit_budget_is_enforced() {
        let e = make_set_with_budget(SetSpec::super_geometric(ExponentRule::square()), 64).unwrap();
        match e.enumerate(10) {
            Err(Error::BitBudgetExceeded { budget, .. }) => assert_eq!(budget, 64),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn doubled_interleaves() {
        let d = make_set(SetSpec::doubled(
            SetSpec::super_geometric(ExponentRule::square()),
            rat(2, 1),
        ))
        .unwrap();
        assert_eq!(
            d.enumerate(4).unwrap(),
            vec![rat(1, 1), rat(1, 2), rat(1, 8), rat(1, 16)]
        );
    }

    #[test]
    fn split_pair_default_star_terms() {
        let star = make_set(SetSpec::split_pair(SplitMember::E1Star)).unwrap();
        let pts = star.enumerate(2).unwrap();
        assert_eq!(pts[0], ExactRational::pow2(-2));
        assert_eq!(pts[1], ExactRational::pow2(-10));
    }

    #[test]
    fn partition_rules() {
        let two: Vec<u64> = (1..=8).map(|n| PartitionRule::TwoAdic.class_of(n)).collect();
        assert_eq!(two, vec![1, 2, 1, 3, 1, 2, 1, 4]);
        let diag: Vec<u64> = (1..=10).map(|n| PartitionRule::Diagonal.class_of(n)).collect();
        assert_eq!(diag, vec![1, 1, 2, 1, 2, 3, 1, 2, 3, 4]);
        assert_eq!(PartitionRule::Diagonal.class_min(3), Some(6));
        assert_eq!(PartitionRule::TwoAdic.class_min(4), Some(8));
    }

    #[test]
    fn tau_certificate() {
        assert!(ExponentRule::cube().certifies_super_square_gap());
        assert!(!ExponentRule::square().certifies_super_square_gap());
        assert!(ExponentRule(vec![0, 0, 1, 1]).certifies_super_square_gap());
        assert!(!ExponentRule(vec![0, 5]).certifies_super_square_gap());
    }

    #[test]
    fn spec_json_shape() {
        let spec = SetSpec::geometric(rat(1, 2));
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"kind":"geometric","params":{"ratio":"1/2"}}"#);
        let f: SetSpec = serde_json::from_str(r#"{"kind":"factorial-decay","params":{}}"#).unwrap();
        assert_eq!(f, SetSpec::factorial());
        let p: SetSpec = serde_json::from_str(r#"{"kind":"prop28","params":{"member":"union"}}"#).unwrap();
        assert_eq!(p, SetSpec::split_pair(SplitMember::Union));
    }
}
