//! Named example sets with known porosity behaviour, and sets engineered to
//! have a prescribed M value.
//!
//! Each builder records what the classifiers are expected to find. Nothing
//! here is trusted by the tests; the expectations are re-derived by
//! [`crate::porosity_metrics::classify_csp`] and friends.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gap_analysis::deep_start;
use crate::porosity_metrics::Verdict;
use crate::rational::ExactRational;
use crate::set_model::{make_set, union, ExponentRule, PartitionRule, PorousSet, SetSpec, SplitMember};

/// A built set with the values the classifiers should reproduce.
#[derive(Debug, Clone)]
pub struct Construction {
    pub name: String,
    pub set: PorousSet,
    pub expected_verdict: Verdict,
    pub expected_m: Option<ExactRational>,
    pub expected_r_low: Option<ExactRational>,
}

/// Serializable summary of a [`Construction`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionRecord {
    pub name: String,
    pub spec: SetSpec,
    pub expected_verdict: Verdict,
    #[serde(rename = "expected_M")]
    pub expected_m: Option<ExactRational>,
    #[serde(rename = "expected_R_low")]
    pub expected_r_low: Option<ExactRational>,
}

impl Construction {
    pub fn record(&self) -> ConstructionRecord {
        ConstructionRecord {
            name: self.name.clone(),
            spec: self.set.spec().clone(),
            expected_verdict: self.expected_verdict,
            expected_m: self.expected_m.clone(),
            expected_r_low: self.expected_r_low.clone(),
        }
    }
}

/// Range `{x_n}` of a strictly decreasing rule with `x_{n+1}/x_n → 0`. Such a
/// set is CSP and its consecutive gaps form a universal chain with `M = 1`.
pub fn example_ratio_vanishing(rule: SetSpec) -> Result<Construction> {
    let set = make_set(rule)?;
    if !set.traits().ratio_vanishing {
        return Err(Error::RatioNotVanishing(format!(
            "{} rule has no certified vanishing ratio",
            set.spec().kind_name()
        )));
    }
    Ok(Construction {
        name: format!("ratio-vanishing {}", set.spec().kind_name()),
        set,
        expected_verdict: Verdict::Csp,
        expected_m: Some(ExactRational::one()),
        expected_r_low: Some(ExactRational::one()),
    })
}

/// `{x_n} ∪ {c·x_n}` for a rule with vanishing ratio. The large gaps
/// `(c·x_{n+1}, x_n)` form the universal chain and `M = c`.
pub fn doubled_gap_set(base_rule: SetSpec, factor: ExactRational) -> Result<Construction> {
    if factor <= ExactRational::one() {
        return Err(Error::InvalidParameter(format!("factor must exceed 1, got {factor}")));
    }
    let base = make_set(base_rule.clone())?;
    let set = make_set(SetSpec::doubled(base_rule, factor.clone()))?;
    if !base.traits().ratio_vanishing {
        return Err(Error::RatioNotVanishing(format!(
            "{} base rule has no certified vanishing ratio",
            base.spec().kind_name()
        )));
    }
    Ok(Construction {
        name: format!("doubled factor {factor}"),
        set,
        expected_verdict: Verdict::Csp,
        expected_r_low: Some(factor.recip()),
        expected_m: Some(factor),
    })
}

/// The pair `E1 = {τ_n}`, `E1* = {2^(-m(n)) τ_n}` whose union is strongly
/// porous but not CSP although `E1*` alone is CSP.
#[derive(Debug, Clone)]
pub struct SplitPairFamily {
    pub tau_rule: ExponentRule,
    pub partition_rule: PartitionRule,
    pub e1: PorousSet,
    pub e1_star: PorousSet,
}

/// Indices probed for `m(n) <= n` and for increasing class minima.
const PARTITION_PROBE: u64 = 12;

impl SplitPairFamily {
    fn build(tau_rule: ExponentRule, partition_rule: PartitionRule) -> Result<Self> {
        let spec = |member| SetSpec::SplitPair {
            member,
            tau: tau_rule.clone(),
            partition: partition_rule,
        };
        Ok(SplitPairFamily {
            e1: make_set(spec(SplitMember::E1))?,
            e1_star: make_set(spec(SplitMember::E1Star))?,
            tau_rule,
            partition_rule,
        })
    }

    /// Same construction without requiring `m` to be an infinite partition,
    /// e.g. the constant rule `m ≡ 1`.
    pub fn relaxed(tau_rule: ExponentRule, partition_rule: PartitionRule) -> Result<Self> {
        Self::build(tau_rule, partition_rule)
    }

    pub fn union(&self) -> Result<PorousSet> {
        union(&self.e1, &self.e1_star)
    }

    pub fn union_spec(&self) -> SetSpec {
        SetSpec::SplitPair {
            member: SplitMember::Union,
            tau: self.tau_rule.clone(),
            partition: self.partition_rule,
        }
    }
}

/// Validated family with `τ_n = 2^(-e(n))`, `e(n+1) - e(n) >= n²`, and `m` an
/// infinite partition with increasing class minima.
pub fn split_pair_family(tau_rule: ExponentRule, partition_rule: PartitionRule) -> Result<SplitPairFamily> {
    if !tau_rule.certifies_super_square_gap() {
        return Err(Error::InvalidTauRule(format!(
            "cannot certify e(n+1) - e(n) >= n^2 for e(n) = {tau_rule}"
        )));
    }
    if !partition_rule.is_infinite_partition() {
        return Err(Error::InvalidPartition(format!(
            "{partition_rule:?} has finitely many classes"
        )));
    }
    let minima: Vec<u64> = (1..=PARTITION_PROBE)
        .map(|k| partition_rule.class_min(k))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::InvalidPartition("class minima are not available".into()))?;
    if minima.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidPartition("class minima are not increasing".into()));
    }
    SplitPairFamily::build(tau_rule, partition_rule)
}

/// Default family: `τ_n = 2^(-n³)` and the 2-adic partition.
pub fn default_split_pair() -> SplitPairFamily {
    split_pair_family(ExponentRule::cube(), PartitionRule::TwoAdic).expect("default rules are valid")
}

/// Smallest `τ*_n / τ*_{n+1}` over the deep half of the first `depth` points.
pub fn ratio_growth_check(family: &SplitPairFamily, depth: usize) -> Result<ExactRational> {
    if depth < 4 {
        return Err(Error::InvalidParameter("ratio growth needs depth >= 4".into()));
    }
    let pts = family.e1_star.enumerate(depth)?;
    let ratios: Vec<ExactRational> = pts.windows(2).map(|w| &w[0] / &w[1]).collect();
    Ok(ratios[deep_start(ratios.len())..]
        .iter()
        .min()
        .expect("nonempty")
        .clone())
}

/// Names accepted by [`named_construction`].
pub const CONSTRUCTION_NAMES: &[&str] = &[
    "super-geometric",
    "factorial",
    "doubled",
    "split-pair-e1",
    "split-pair-e1-star",
    "split-pair-union",
];

/// Builds a construction by name. `factor` is the doubling factor for
/// `doubled` (default 2) and is rejected elsewhere.
pub fn named_construction(name: &str, factor: Option<ExactRational>) -> Result<Construction> {
    if factor.is_some() && name != "doubled" {
        return Err(Error::InvalidParameter(format!("construction {name} takes no factor")));
    }
    let square = || SetSpec::super_geometric(ExponentRule::square());
    let split_pair = |member, verdict| -> Result<Construction> {
        let family = default_split_pair();
        let set = match member {
            SplitMember::E1 => family.e1,
            SplitMember::E1Star => family.e1_star,
            SplitMember::Union => make_set(family.union_spec())?,
        };
        let csp = verdict == Verdict::Csp;
        Ok(Construction {
            name: name.to_string(),
            set,
            expected_verdict: verdict,
            expected_m: csp.then(ExactRational::one),
            expected_r_low: csp.then(ExactRational::one),
        })
    };
    let mut built = match name {
        "super-geometric" => example_ratio_vanishing(square())?,
        "factorial" => example_ratio_vanishing(SetSpec::factorial())?,
        "doubled" => doubled_gap_set(square(), factor.unwrap_or_else(|| ExactRational::from_integer(2)))?,
        "split-pair-e1" => split_pair(SplitMember::E1, Verdict::Csp)?,
        "split-pair-e1-star" => split_pair(SplitMember::E1Star, Verdict::Csp)?,
        "split-pair-union" => split_pair(SplitMember::Union, Verdict::NotCsp)?,
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown construction {other}; expected one of {}",
                CONSTRUCTION_NAMES.join(", ")
            )))
        }
    };
    built.name = name.to_string();
    Ok(built)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn ratio_vanishing_rules() {
        let w = example_ratio_vanishing(SetSpec::super_geometric(ExponentRule::square())).unwrap();
        assert_eq!(w.expected_m, Some(rat(1, 1)));
        assert!(example_ratio_vanishing(SetSpec::factorial()).is_ok());
        assert!(matches!(
            example_ratio_vanishing(SetSpec::geometric(rat(1, 2))),
            Err(Error::RatioNotVanishing(_))
        ));
    }

    #[test]
    fn doubled_sets() {
        let square = || SetSpec::super_geometric(ExponentRule::square());
        let d2 = doubled_gap_set(square(), rat(2, 1)).unwrap();
        assert_eq!(d2.expected_m, Some(rat(2, 1)));
        assert_eq!(d2.expected_r_low, Some(rat(1, 2)));
        assert_eq!(
            doubled_gap_set(square(), rat(3, 1)).unwrap().expected_m,
            Some(rat(3, 1))
        );
        assert!(matches!(
            doubled_gap_set(SetSpec::geometric(rat(1, 2)), rat(2, 1)),
            Err(Error::FactorTooLarge { .. })
        ));
        assert!(matches!(
            doubled_gap_set(SetSpec::geometric(rat(1, 4)), rat(2, 1)),
            Err(Error::RatioNotVanishing(_))
        ));
        assert!(matches!(
            doubled_gap_set(square(), rat(1, 1)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn default_family_terms() {
        let f = default_split_pair();
        let star = f.e1_star.enumerate(2).unwrap();
        assert_eq!(star, vec![ExactRational::pow2(-2), ExactRational::pow2(-10)]);
        let u = f.union().unwrap().enumerate(4).unwrap();
        assert_eq!(
            u,
            vec![
                ExactRational::pow2(-1),
                ExactRational::pow2(-2),
                ExactRational::pow2(-8),
                ExactRational::pow2(-10)
            ]
        );
    }

    #[test]
    fn family_validation() {
        assert!(matches!(
            split_pair_family(ExponentRule::square(), PartitionRule::TwoAdic),
            Err(Error::InvalidTauRule(_))
        ));
        assert!(matches!(
            split_pair_family(ExponentRule::cube(), PartitionRule::Constant(1)),
            Err(Error::InvalidPartition(_))
        ));
        assert!(split_pair_family(ExponentRule::cube(), PartitionRule::Diagonal).is_ok());
    }

    #[test]
    fn ratio_growth() {
        let f = default_split_pair();
        let r8 = ratio_growth_check(&f, 8).unwrap();
        assert!(r8 >= ExactRational::pow2(12));
        assert!(ratio_growth_check(&f, 16).unwrap() > r8);

        let trivial = SplitPairFamily::relaxed(ExponentRule::cube(), PartitionRule::Constant(1)).unwrap();
        let t8 = ratio_growth_check(&trivial, 8).unwrap();
        let plain = trivial.e1.enumerate(8).unwrap();
        let plain_min = plain.windows(2).skip(3).map(|w| &w[0] / &w[1]).min().unwrap();
        assert_eq!(t8, plain_min);
        assert!(ratio_growth_check(&trivial, 16).unwrap() > t8);
    }

    #[test]
    fn names_resolve() {
        for name in CONSTRUCTION_NAMES {
            let c = named_construction(name, None).unwrap();
            assert_eq!(c.name, *name);
        }
        assert!(named_construction("nope", None).is_err());
        assert!(named_construction("factorial", Some(rat(2, 1))).is_err());
    }
}
