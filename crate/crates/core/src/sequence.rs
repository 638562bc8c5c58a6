//! Finite prefixes of positive null sequences.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::ExactRational;
use crate::set_model::PorousSet;

/// Where a sequence's values came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceSource {
    /// Values taken from a set's enumeration, possibly decimated.
    FromSetEnumeration,
    UserSupplied,
    /// Endpoints of gaps in a chain.
    DerivedChainEndpoints,
    /// Not required to lie in any particular set, e.g. scaling sequences.
    External,
}

/// Prefix `(s_1, …, s_L)` of a positive sequence, with provenance and the
/// last index (1-based) at which it increases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedSequence {
    values: Vec<ExactRational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rule: Option<String>,
    source: SequenceSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    last_increase: Option<usize>,
}

impl TruncatedSequence {
    /// Rejects empty input and nonpositive entries.
    pub fn new(values: Vec<ExactRational>, source: SequenceSource) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("sequence is empty".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_positive()) {
            return Err(Error::InvalidParameter(format!(
                "sequence entry {} is not positive",
                i + 1
            )));
        }
        let last_increase = values.windows(2).rposition(|w| w[1] > w[0]).map(|i| i + 2);
        Ok(TruncatedSequence {
            values,
            rule: None,
            source,
            last_increase,
        })
    }

    pub fn with_rule(mut self, rule: impl Into<String>) -> Self {
        self.rule = Some(rule.into());
        self
    }

    /// First `depth` points of the set.
    pub fn from_set(set: &PorousSet, depth: usize) -> Result<Self> {
        let values = set.enumerate(depth)?;
        Ok(Self::new(values, SequenceSource::FromSetEnumeration)?
            .with_rule(format!("enumeration of {}", set.spec().kind_name())))
    }

    pub fn values(&self) -> &[ExactRational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn rule(&self) -> Option<&str> {
        self.rule.as_deref()
    }

    pub fn source(&self) -> SequenceSource {
        self.source
    }

    /// 1-based index `n` of the last increase `s_n > s_{n-1}`.
    pub fn last_increase(&self) -> Option<usize> {
        self.last_increase
    }

    /// Nonincreasing from 1-based index `from` on.
    pub fn is_decreasing_from(&self, from: usize) -> bool {
        self.last_increase.is_none_or(|i| i <= from)
    }

    pub fn prefix(&self, len: usize) -> Self {
        let mut out =
            Self::new(self.values[..len.min(self.len())].to_vec(), self.source).expect("prefix of a valid sequence");
        out.rule = self.rule.clone();
        out
    }

    /// Entries at the given 0-based positions.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let values = indices
            .iter()
            .map(|&i| {
                self.values.get(i).cloned().ok_or_else(|| {
                    Error::InvalidParameter(format!("index {i} outside sequence of length {}", self.len()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut out = Self::new(values, self.source)?;
        out.rule = self.rule.clone();
        Ok(out)
    }

    /// `(t·s_n)`.
    pub fn scaled(&self, t: &ExactRational) -> Result<Self> {
        let mut out = Self::new(self.values.iter().map(|v| v * t).collect(), self.source)?;
        out.rule = self.rule.clone();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn tracks_last_increase() {
        let s = TruncatedSequence::new(
            vec![rat(1, 2), rat(3, 4), rat(1, 4), rat(1, 8)],
            SequenceSource::UserSupplied,
        )
        .unwrap();
        assert_eq!(s.last_increase(), Some(2));
        assert!(s.is_decreasing_from(2));
        assert!(!s.is_decreasing_from(1));
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(TruncatedSequence::new(vec![rat(0, 1)], SequenceSource::External).is_err());
        assert!(TruncatedSequence::new(vec![], SequenceSource::External).is_err());
    }

    #[test]
    fn select_and_scale() {
        let s = TruncatedSequence::new(vec![rat(1, 2), rat(1, 4), rat(1, 8)], SequenceSource::External).unwrap();
        assert_eq!(s.select(&[0, 2]).unwrap().values(), &[rat(1, 2), rat(1, 8)]);
        assert_eq!(s.scaled(&rat(2, 1)).unwrap().values()[2], rat(1, 4));
        assert!(s.select(&[3]).is_err());
    }
}
