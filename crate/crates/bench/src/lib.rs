//! Shared fixtures for the criterion benches.

use std::sync::Arc;

use gsco_core::graph::watts_strogatz;
use gsco_core::objective::{generate_instance, Instance, InstanceSpec};
use gsco_core::ConstraintModel;

/// Small-world instance with `d` nodes, `edges` edges and a g-subgraph model.
pub fn fixture(d: usize, edges: usize, n: usize, s: usize, g: usize, seed: u64) -> (Instance, ConstraintModel) {
    let graph = Arc::new(watts_strogatz(d, edges, 0.1, seed).expect("graph"));
    let model = ConstraintModel::g_subgraph(graph, s, g, 1.0).expect("model");
    let inst = generate_instance(&InstanceSpec { d, n, sigma: 0.01, model: model.clone(), seed })
        .expect("instance");
    (inst, model)
}
