use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GscoError, Result};

/// A sorted, duplicate-free set of node indices.
///
/// Ordering is graded lexicographic: smaller sets first, then lexicographic
/// on the sorted indices. Enumeration and tie-breaking both use this order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SupportSet(Vec<usize>);

impl SupportSet {
    pub fn empty() -> Self {
        SupportSet(Vec::new())
    }

    /// Builds a support from arbitrary indices, sorting and removing duplicates.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        SupportSet(v)
    }

    /// Builds a support from indices that must already be strictly increasing.
    pub fn from_sorted(indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GscoError::Config(
                "support indices must be strictly increasing".into(),
            ));
        }
        Ok(SupportSet(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    /// Fails with a range error if any index is `>= dim`.
    pub fn check_range(&self, dim: usize) -> Result<()> {
        match self.0.last() {
            Some(&last) if last >= dim => Err(GscoError::Range { index: last, dim }),
            _ => Ok(()),
        }
    }

    /// Support of a dense vector (indices of nonzero entries).
    pub fn of_vector(x: &[f64]) -> Self {
        SupportSet(
            x.iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, _)| i)
                .collect(),
        )
    }

    /// `‖z_S‖₂`, summed in ascending index order.
    pub fn restricted_norm(&self, z: &[f64]) -> f64 {
        self.restricted_norm_sq(z).sqrt()
    }

    pub fn restricted_norm_sq(&self, z: &[f64]) -> f64 {
        self.0.iter().map(|&i| z[i] * z[i]).sum()
    }
}

impl PartialOrd for SupportSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SupportSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for SupportSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}
