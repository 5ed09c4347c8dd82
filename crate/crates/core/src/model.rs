//! Feasible region: a ball radius plus a family of admissible supports.

use std::collections::VecDeque;
use std::sync::Arc;

use rand::seq::index;
use rand::Rng;

use crate::error::{GscoError, Result};
use crate::graph::Graph;
use crate::support::SupportSet;

/// Largest dimension `enumerate_supports` accepts unless overridden.
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub enum ModelVariant {
    /// Supports of at most `s` nodes spanning at most `g` connected components.
    GSubgraph { graph: Arc<Graph>, s: usize, g: usize },
    /// Supports of at most `s` indices.
    CardinalityOnly { d: usize, s: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintModel {
    variant: ModelVariant,
    radius: f64,
}

impl ConstraintModel {
    pub fn g_subgraph(graph: Arc<Graph>, s: usize, g: usize, radius: f64) -> Result<Self> {
        let d = graph.node_count();
        if !(1 <= g && g <= s && s <= d) {
            return Err(GscoError::Config(format!(
                "g-subgraph model needs 1 <= g <= s <= d, got g={g}, s={s}, d={d}"
            )));
        }
        check_radius(radius)?;
        Ok(ConstraintModel {
            variant: ModelVariant::GSubgraph { graph, s, g },
            radius,
        })
    }

    pub fn cardinality(d: usize, s: usize, radius: f64) -> Result<Self> {
        if !(1 <= s && s <= d) {
            return Err(GscoError::Config(format!(
                "cardinality model needs 1 <= s <= d, got s={s}, d={d}"
            )));
        }
        check_radius(radius)?;
        Ok(ConstraintModel {
            variant: ModelVariant::CardinalityOnly { d, s },
            radius,
        })
    }

    pub fn variant(&self) -> &ModelVariant {
        &self.variant
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        match &self.variant {
            ModelVariant::GSubgraph { graph, .. } => graph.node_count(),
            ModelVariant::CardinalityOnly { d, .. } => *d,
        }
    }

    pub fn sparsity(&self) -> usize {
        match &self.variant {
            ModelVariant::GSubgraph { s, .. } | ModelVariant::CardinalityOnly { s, .. } => *s,
        }
    }

    /// Component budget; `None` for the cardinality model.
    pub fn component_budget(&self) -> Option<usize> {
        match &self.variant {
            ModelVariant::GSubgraph { g, .. } => Some(*g),
            ModelVariant::CardinalityOnly { .. } => None,
        }
    }

    pub fn graph(&self) -> Option<&Arc<Graph>> {
        match &self.variant {
            ModelVariant::GSubgraph { graph, .. } => Some(graph),
            ModelVariant::CardinalityOnly { .. } => None,
        }
    }

    pub fn is_member(&self, support: &SupportSet) -> Result<bool> {
        support.check_range(self.dim())?;
        if support.len() > self.sparsity() {
            return Ok(false);
        }
        match &self.variant {
            ModelVariant::GSubgraph { graph, g, .. } => {
                Ok(graph.connected_component_count(support)? <= *g)
            }
            ModelVariant::CardinalityOnly { .. } => Ok(true),
        }
    }

    /// All nonempty feasible supports, smallest first and lexicographic
    /// within a size. Refuses when `d` exceeds [`DEFAULT_ENUMERATION_CAP`].
    pub fn enumerate_supports(&self) -> Result<SupportEnumeration<'_>> {
        self.enumerate_supports_with_cap(DEFAULT_ENUMERATION_CAP)
    }

    pub fn enumerate_supports_with_cap(&self, cap: usize) -> Result<SupportEnumeration<'_>> {
        let dim = self.dim();
        if dim > cap {
            return Err(GscoError::CapExceeded { dim, cap });
        }
        Ok(SupportEnumeration {
            model: self,
            combo: Vec::new(),
            size: 0,
        })
    }

    /// Draws a feasible support at random.
    ///
    /// Cardinality model: `s` distinct uniform indices. G-subgraph model:
    /// `g` distinct uniform seeds grown breadth-first in round robin until
    /// `s` nodes are claimed or every frontier is exhausted.
    pub fn random_support<R: Rng + ?Sized>(&self, rng: &mut R) -> SupportSet {
        match &self.variant {
            ModelVariant::CardinalityOnly { d, s } => {
                SupportSet::from_indices(index::sample(rng, *d, *s))
            }
            ModelVariant::GSubgraph { graph, s, g } => grow_regions(graph, *s, *g, rng),
        }
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if radius.is_finite() && radius > 0.0 {
        Ok(())
    } else {
        Err(GscoError::Config(format!("radius must be positive, got {radius}")))
    }
}

/// Grows `g` breadth-first regions from distinct random seeds, taking one
/// new node per region per round, until `s` nodes are claimed.
pub fn grow_regions<R: Rng + ?Sized>(graph: &Graph, s: usize, g: usize, rng: &mut R) -> SupportSet {
    let d = graph.node_count();
    let seeds = index::sample(rng, d, g.min(d)).into_vec();
    let mut claimed = vec![false; d];
    let mut members = Vec::with_capacity(s);
    let mut frontiers: Vec<VecDeque<usize>> = Vec::with_capacity(seeds.len());
    for &seed in &seeds {
        claimed[seed] = true;
        members.push(seed);
        frontiers.push(graph.neighbors(seed).iter().copied().collect());
    }
    while members.len() < s {
        let mut grew = false;
        for frontier in frontiers.iter_mut() {
            if members.len() >= s {
                break;
            }
            while let Some(u) = frontier.pop_front() {
                if !claimed[u] {
                    claimed[u] = true;
                    members.push(u);
                    frontier.extend(graph.neighbors(u).iter().copied().filter(|&w| !claimed[w]));
                    grew = true;
                    break;
                }
            }
        }
        if !grew {
            break;
        }
    }
    SupportSet::from_indices(members)
}

/// Iterator over feasible supports; see [`ConstraintModel::enumerate_supports`].
pub struct SupportEnumeration<'a> {
    model: &'a ConstraintModel,
    combo: Vec<usize>,
    size: usize,
}

impl SupportEnumeration<'_> {
    fn advance(&mut self) -> bool {
        let d = self.model.dim();
        let k = self.size;
        if k > 0 {
            // next k-combination in lexicographic order
            let mut i = k;
            while i > 0 {
                i -= 1;
                if self.combo[i] < d - k + i {
                    self.combo[i] += 1;
                    for j in i + 1..k {
                        self.combo[j] = self.combo[j - 1] + 1;
                    }
                    return true;
                }
            }
        }
        if k < self.model.sparsity() {
            self.size = k + 1;
            self.combo = (0..self.size).collect();
            return true;
        }
        false
    }
}

impl Iterator for SupportEnumeration<'_> {
    type Item = SupportSet;

    fn next(&mut self) -> Option<SupportSet> {
        while self.advance() {
            let candidate = SupportSet::from_indices(self.combo.iter().copied());
            if self.model.is_member(&candidate).unwrap_or(false) {
                return Some(candidate);
            }
        }
        None
    }
}

/// Euclidean projection onto `{z : supp(z) ⊆ S, ‖z‖₂ ≤ radius}`.
pub fn project_to_support_ball(x: &[f64], support: &SupportSet, radius: f64) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    let norm = support.restricted_norm(x);
    if norm == 0.0 {
        return out;
    }
    let scale = if norm > radius { radius / norm } else { 1.0 };
    for i in support.iter() {
        out[i] = x[i] * scale;
    }
    out
}
