//! Dual maximization oracles: given a dual vector `z`, find a feasible
//! support capturing as much of `‖z_S‖₂` as possible.
//!
//! * [`exact_lmo_support`]: the true maximizer (top-`s` for the cardinality
//!   model, enumeration for small g-subgraph models).
//! * [`top_g_plus_visit`]: seed with the `g` largest magnitudes and grow
//!   along the stored edge order until `s` nodes are held.
//! * [`top_g_plus_optimal_visit`]: same seeding, but grow along randomly
//!   drawn edges, restart after every completed support, and keep the best.

use std::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GscoError, Result};
use crate::graph::Graph;
use crate::model::{ConstraintModel, ModelVariant};
use crate::rng::{stream_rng, StreamRng, STREAM_DMO};
use crate::support::SupportSet;

/// Expected number of candidate supports when none is configured.
pub const DEFAULT_THETA: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DmoParams {
    pub g: usize,
    pub s: usize,
    pub theta: usize,
    pub seed: u64,
}

impl DmoParams {
    pub fn new(s: usize, g: usize) -> Self {
        DmoParams {
            g,
            s,
            theta: DEFAULT_THETA,
            seed: 0,
        }
    }

    fn validate(&self, d: usize) -> Result<()> {
        if self.g == 0 || self.g > d {
            return Err(GscoError::Config(format!(
                "component budget g={} must be in 1..={d}",
                self.g
            )));
        }
        if self.g > self.s || self.s > d {
            return Err(GscoError::Config(format!(
                "need g <= s <= d, got g={}, s={}, d={d}",
                self.g, self.s
            )));
        }
        if self.theta == 0 {
            return Err(GscoError::Config("theta must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DmoResult {
    pub support: SupportSet,
    /// `‖z_S‖₂` for the returned support.
    pub captured_norm: f64,
    pub candidates_examined: usize,
    /// Edges used to grow the returned support.
    pub grown_edges: Vec<(usize, usize)>,
}

/// Approximation factor `√(1/⌈s/g⌉)` of the Top-g+ oracles.
pub fn guarantee(s: usize, g: usize) -> f64 {
    (1.0 / s.div_ceil(g) as f64).sqrt()
}

fn check_len(z: &[f64], d: usize) -> Result<()> {
    if z.len() != d {
        return Err(GscoError::Dimension {
            expected: d,
            got: z.len(),
        });
    }
    Ok(())
}

/// Magnitude order: larger `|z_i|` first, ties by ascending index.
fn by_magnitude(z: &[f64]) -> impl Fn(&usize, &usize) -> Ordering + '_ {
    move |&a, &b| z[b].abs().total_cmp(&z[a].abs()).then(a.cmp(&b))
}

/// Indices of the `k` largest magnitudes, in magnitude order.
fn top_k(z: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..z.len()).collect();
    let cmp = by_magnitude(z);
    if k < idx.len() {
        idx.select_nth_unstable_by(k, &cmp);
        idx.truncate(k);
    }
    idx.sort_unstable_by(&cmp);
    idx
}

/// Exact maximizer of `‖z_S‖₂` over the model's supports.
///
/// Ties go to the smallest support in graded lexicographic order, so an
/// all-zero `z` yields `{0}`.
pub fn exact_lmo_support(model: &ConstraintModel, z: &[f64]) -> Result<SupportSet> {
    check_len(z, model.dim())?;
    match model.variant() {
        ModelVariant::CardinalityOnly { s, .. } => {
            let chosen: Vec<usize> = top_k(z, *s).into_iter().filter(|&i| z[i] != 0.0).collect();
            if chosen.is_empty() {
                Ok(SupportSet::from_indices([0]))
            } else {
                Ok(SupportSet::from_indices(chosen))
            }
        }
        ModelVariant::GSubgraph { .. } => {
            let mut best: Option<(f64, SupportSet)> = None;
            for cand in model.enumerate_supports()? {
                let val = cand.restricted_norm_sq(z);
                if best.as_ref().is_none_or(|(b, _)| val > *b) {
                    best = Some((val, cand));
                }
            }
            // enumeration always yields every singleton
            Ok(best.expect("nonempty enumeration").1)
        }
    }
}

/// Seeds the top-`g` magnitudes with component ids `1..=g`.
fn seed_components(z: &[f64], g: usize) -> (Vec<usize>, Vec<u32>) {
    let seeds = top_k(z, g);
    let mut labels = vec![0u32; z.len()];
    for (k, &v) in seeds.iter().enumerate() {
        labels[v] = k as u32 + 1;
    }
    (seeds, labels)
}

/// One edge of the growth rule: attach whichever endpoint is unlabeled when
/// the other is labeled. Both branches are tried, in order; `on_full` runs
/// after each branch whenever `members` has reached `s`.
fn grow_along(
    (u, v): (usize, usize),
    labels: &mut [u32],
    members: &mut Vec<usize>,
    kept: &mut Vec<(usize, usize)>,
    s: usize,
    mut on_full: impl FnMut(&mut Vec<usize>, &mut [u32], &mut Vec<(usize, usize)>) -> bool,
) -> bool {
    if labels[u] == 0 && labels[v] != 0 {
        members.push(u);
        kept.push((u, v));
        labels[u] = labels[v];
    }
    if members.len() == s && on_full(members, labels, kept) {
        return true;
    }
    if labels[u] != 0 && labels[v] == 0 {
        members.push(v);
        kept.push((u, v));
        labels[v] = labels[u];
    }
    members.len() == s && on_full(members, labels, kept)
}

fn finish(z: &[f64], members: &[usize], kept: Vec<(usize, usize)>, examined: usize) -> DmoResult {
    let support = SupportSet::from_indices(members.iter().copied());
    DmoResult {
        captured_norm: support.restricted_norm(z),
        support,
        candidates_examined: examined,
        grown_edges: kept,
    }
}

/// Top-g+ visiting: a single pass over the stored edge order.
///
/// Returns a partial support (`|S| < s`) if the pass ends before `s` nodes
/// are reached.
pub fn top_g_plus_visit(graph: &Graph, params: &DmoParams, z: &[f64]) -> Result<DmoResult> {
    let d = graph.node_count();
    params.validate(d)?;
    check_len(z, d)?;
    let s = params.s;
    let (mut members, mut labels) = seed_components(z, params.g);
    let mut kept = Vec::new();
    if members.len() == s {
        return Ok(finish(z, &members, kept, 1));
    }
    for &edge in graph.edges() {
        if grow_along(edge, &mut labels, &mut members, &mut kept, s, |_, _, _| true) {
            break;
        }
    }
    Ok(finish(z, &members, kept, 1))
}

/// Top-g+ optimal visiting.
///
/// Draws `(s − g)·θ + 1` edges uniformly with replacement. Every time the
/// support reaches `s` nodes it is recorded and the state (support, labels,
/// kept edges) is reset to the seeds. Returns the recorded support with the
/// largest captured norm (first one on ties), or the Top-g+ visiting result
/// if nothing completed.
pub fn top_g_plus_optimal_visit<R: Rng + ?Sized>(
    graph: &Graph,
    params: &DmoParams,
    z: &[f64],
    rng: &mut R,
) -> Result<DmoResult> {
    optimal_visit(graph, params, z, rng, None)
}

/// Like [`top_g_plus_optimal_visit`], also returning every completed
/// candidate in the order it was recorded.
pub fn top_g_plus_optimal_visit_traced<R: Rng + ?Sized>(
    graph: &Graph,
    params: &DmoParams,
    z: &[f64],
    rng: &mut R,
) -> Result<(DmoResult, Vec<DmoResult>)> {
    let mut candidates = Vec::new();
    let res = optimal_visit(graph, params, z, rng, Some(&mut candidates))?;
    Ok((res, candidates))
}

fn optimal_visit<R: Rng + ?Sized>(
    graph: &Graph,
    params: &DmoParams,
    z: &[f64],
    rng: &mut R,
    mut record: Option<&mut Vec<DmoResult>>,
) -> Result<DmoResult> {
    let d = graph.node_count();
    params.validate(d)?;
    check_len(z, d)?;
    let s = params.s;
    let (seeds, seed_labels) = seed_components(z, params.g);
    if seeds.len() == s {
        return Ok(finish(z, &seeds, Vec::new(), 1));
    }

    let edges = graph.edges();
    let draws = (s - params.g) * params.theta;
    let mut members = seeds.clone();
    let mut labels = seed_labels.clone();
    let mut kept = Vec::new();
    let mut best: Option<DmoResult> = None;
    let mut completed = 0usize;
    if !edges.is_empty() {
        for _ in 0..=draws {
            let edge = edges[rng.random_range(0..edges.len())];
            grow_along(edge, &mut labels, &mut members, &mut kept, s, |m, l, k| {
                let cand = finish(z, m, std::mem::take(k), 1);
                completed += 1;
                if let Some(rec) = record.as_deref_mut() {
                    rec.push(cand.clone());
                }
                if best.as_ref().is_none_or(|b| cand.captured_norm > b.captured_norm) {
                    best = Some(cand);
                }
                m.clone_from(&seeds);
                l.copy_from_slice(&seed_labels);
                false
            });
        }
    }
    match best {
        Some(mut res) => {
            res.candidates_examined = completed;
            Ok(res)
        }
        None => top_g_plus_visit(graph, params, z),
    }
}

/// `C · z_S / ‖z_S‖₂`, zero off `S`.
pub fn support_to_direction(z: &[f64], support: &SupportSet, radius: f64) -> Result<Vec<f64>> {
    support.check_range(z.len())?;
    let norm = support.restricted_norm(z);
    if norm == 0.0 || !norm.is_finite() {
        return Err(GscoError::DegenerateDirection);
    }
    let mut v = vec![0.0; z.len()];
    for i in support.iter() {
        v[i] = radius * z[i] / norm;
    }
    Ok(v)
}

/// `‖z_S‖₂ / max_{S'∈M} ‖z_{S'}‖₂`; defined as 1 when the maximum is 0.
pub fn support_ratio(model: &ConstraintModel, z: &[f64], support: &SupportSet) -> Result<f64> {
    let best = exact_lmo_support(model, z)?.restricted_norm(z);
    if best == 0.0 {
        return Ok(1.0);
    }
    Ok(support.restricted_norm(z) / best)
}

/// Approximation ratio achieved by Top-g+ visiting on `z`.
pub fn dmo_ratio(graph: &Graph, params: &DmoParams, z: &[f64], model: &ConstraintModel) -> Result<f64> {
    let res = top_g_plus_visit(graph, params, z)?;
    support_ratio(model, z, &res.support)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DmoVariant {
    #[serde(rename = "topg")]
    TopG,
    #[serde(rename = "topg_optimal")]
    TopGOptimal,
    Exact,
}

impl std::str::FromStr for DmoVariant {
    type Err = GscoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "topg" => Ok(DmoVariant::TopG),
            "topg_optimal" => Ok(DmoVariant::TopGOptimal),
            "exact" => Ok(DmoVariant::Exact),
            other => Err(GscoError::Config(format!("unknown dmo variant `{other}`"))),
        }
    }
}

/// Which oracle a solver uses, with the knobs of the randomized variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DmoSelection {
    pub variant: DmoVariant,
    pub theta: usize,
    pub seed: u64,
}

impl DmoSelection {
    pub fn new(variant: DmoVariant) -> Self {
        DmoSelection {
            variant,
            theta: DEFAULT_THETA,
            seed: 0,
        }
    }

    /// The approximation factor this oracle guarantees on `model`.
    pub fn guarantee_for(&self, model: &ConstraintModel) -> f64 {
        match (self.variant, model.component_budget()) {
            (DmoVariant::Exact, _) | (_, None) => 1.0,
            (_, Some(g)) => guarantee(model.sparsity(), g),
        }
    }
}

/// A DMO bound to one model; owns its random stream.
#[derive(Debug, Clone)]
pub struct Oracle<'m> {
    model: &'m ConstraintModel,
    selection: DmoSelection,
    rng: StreamRng,
}

impl<'m> Oracle<'m> {
    pub fn new(model: &'m ConstraintModel, selection: DmoSelection) -> Result<Self> {
        if selection.variant != DmoVariant::Exact && model.graph().is_none() {
            return Err(GscoError::Config(
                "top-g oracles need a g-subgraph model".into(),
            ));
        }
        if selection.theta == 0 {
            return Err(GscoError::Config("theta must be at least 1".into()));
        }
        Ok(Oracle {
            model,
            selection,
            rng: stream_rng(selection.seed, STREAM_DMO),
        })
    }

    pub fn select(&mut self, z: &[f64]) -> Result<DmoResult> {
        let model = self.model;
        match (self.selection.variant, model.variant()) {
            (DmoVariant::Exact, _) => {
                let support = exact_lmo_support(model, z)?;
                Ok(DmoResult {
                    captured_norm: support.restricted_norm(z),
                    support,
                    candidates_examined: 1,
                    grown_edges: Vec::new(),
                })
            }
            (DmoVariant::TopG, ModelVariant::GSubgraph { graph, s, g }) => {
                top_g_plus_visit(graph, &self.params(*s, *g), z)
            }
            (DmoVariant::TopGOptimal, ModelVariant::GSubgraph { graph, s, g }) => {
                let params = self.params(*s, *g);
                top_g_plus_optimal_visit(graph, &params, z, &mut self.rng)
            }
            (_, ModelVariant::CardinalityOnly { .. }) => unreachable!("checked in Oracle::new"),
        }
    }

    fn params(&self, s: usize, g: usize) -> DmoParams {
        DmoParams {
            g,
            s,
            theta: self.selection.theta,
            seed: self.selection.seed,
        }
    }
}
