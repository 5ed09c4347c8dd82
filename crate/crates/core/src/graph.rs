//! Undirected graphs with a stable edge order, plus the edge-list text format.
//!
//! Format: a header line `nodes N`, then one `u v` pair per line with 0-based
//! ids. Blank lines and lines starting with `#` are ignored. Edges are stored
//! as `(min, max)` in first-occurrence order; later duplicates are dropped.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;

use rand::Rng;

use crate::error::{GscoError, Result};
use crate::rng::{stream_rng, STREAM_GRAPH};
use crate::support::SupportSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an edge sequence, canonicalising and deduplicating.
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if node_count == 0 {
            return Err(GscoError::Config("graph must have at least one node".into()));
        }
        let mut builder = Builder::new(node_count);
        for (k, (u, v)) in edges.into_iter().enumerate() {
            builder.push(u, v, k + 1)?;
        }
        Ok(builder.finish())
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, in ingestion order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    /// Parses the edge-list text format.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut builder: Option<Builder> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let first = parts.next().unwrap_or_default();
            let second = parts.next();
            if parts.next().is_some() {
                return Err(parse_err(line_no, "expected two fields"));
            }
            let Some(second) = second else {
                return Err(parse_err(line_no, "expected two fields"));
            };
            match builder.as_mut() {
                None => {
                    if first != "nodes" {
                        return Err(parse_err(line_no, "missing `nodes N` header"));
                    }
                    let n: i64 = second
                        .parse()
                        .map_err(|_| parse_err(line_no, "node count is not an integer"))?;
                    if n <= 0 {
                        return Err(GscoError::Config(format!(
                            "node count must be positive, got {n}"
                        )));
                    }
                    builder = Some(Builder::new(n as usize));
                }
                Some(b) => {
                    let u = parse_id(first, line_no)?;
                    let v = parse_id(second, line_no)?;
                    b.push(u, v, line_no)?;
                }
            }
        }
        builder
            .map(Builder::finish)
            .ok_or_else(|| parse_err(0, "empty edge list"))
    }

    /// Serialises to the edge-list text format; `from_edge_list` inverts it.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(16 + self.edges.len() * 12);
        let _ = writeln!(out, "nodes {}", self.node_count);
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// Number of connected components of the subgraph induced by `nodes`.
    pub fn connected_component_count(&self, nodes: &SupportSet) -> Result<usize> {
        nodes.check_range(self.node_count)?;
        let mut member = vec![false; self.node_count];
        for i in nodes.iter() {
            member[i] = true;
        }
        let mut seen = vec![false; self.node_count];
        let mut queue = VecDeque::new();
        let mut components = 0;
        for start in nodes.iter() {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adjacency[u] {
                    if member[w] && !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        Ok(components)
    }
}

fn parse_err(line: usize, msg: &str) -> GscoError {
    GscoError::Parse {
        line,
        msg: msg.to_string(),
    }
}

fn parse_id(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(line, &format!("invalid node id `{tok}`")))
}

struct Builder {
    node_count: usize,
    seen: HashSet<(usize, usize)>,
    edges: Vec<(usize, usize)>,
}

impl Builder {
    fn new(node_count: usize) -> Self {
        Builder {
            node_count,
            seen: HashSet::new(),
            edges: Vec::new(),
        }
    }

    fn push(&mut self, u: usize, v: usize, line: usize) -> Result<()> {
        for id in [u, v] {
            if id >= self.node_count {
                return Err(GscoError::Range {
                    index: id,
                    dim: self.node_count,
                });
            }
        }
        if u == v {
            return Err(GscoError::SelfLoop { node: u, line });
        }
        let e = (u.min(v), u.max(v));
        if self.seen.insert(e) {
            self.edges.push(e);
        }
        Ok(())
    }

    fn finish(self) -> Graph {
        let mut adjacency = vec![Vec::new(); self.node_count];
        for &(u, v) in &self.edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        Graph {
            node_count: self.node_count,
            edges: self.edges,
            adjacency,
        }
    }
}

/// Path `0-1-...-(d-1)`.
pub fn path(d: usize) -> Result<Graph> {
    Graph::new(d, (1..d).map(|i| (i - 1, i)))
}

/// Star with center 0 and spokes `1..d`, spokes in ascending order.
pub fn star(d: usize) -> Result<Graph> {
    Graph::new(d, (1..d).map(|i| (0, i)))
}

pub fn complete(d: usize) -> Result<Graph> {
    Graph::new(d, (0..d).flat_map(|u| (u + 1..d).map(move |v| (u, v))))
}

/// Watts-Strogatz-style small-world graph with exactly `edge_count` edges.
///
/// Starts from a ring lattice where node `i` links to `i+1..=i+k`
/// (`k = edge_count / d`), then links the first `edge_count % d` nodes to
/// `i+k+1`. Each lattice edge is then rewired with probability `rewire`
/// to a uniformly chosen new endpoint that creates no duplicate.
pub fn watts_strogatz(d: usize, edge_count: usize, rewire: f64, seed: u64) -> Result<Graph> {
    if d < 3 {
        return Err(GscoError::Config("watts-strogatz needs at least 3 nodes".into()));
    }
    if !(0.0..=1.0).contains(&rewire) {
        return Err(GscoError::Config(format!("rewire probability {rewire} not in [0,1]")));
    }
    let k = edge_count / d;
    let extra = edge_count % d;
    let reach = if extra > 0 { k + 1 } else { k };
    if 2 * reach >= d {
        return Err(GscoError::Config(format!(
            "{edge_count} edges are too dense for a ring lattice on {d} nodes"
        )));
    }
    let mut rng = stream_rng(seed, STREAM_GRAPH);
    let mut lattice = Vec::with_capacity(edge_count);
    for i in 0..d {
        for j in 1..=k {
            lattice.push((i, (i + j) % d));
        }
    }
    for i in 0..extra {
        lattice.push((i, (i + k + 1) % d));
    }
    let canon = |u: usize, v: usize| (u.min(v), u.max(v));
    let mut present: HashSet<(usize, usize)> = lattice.iter().map(|&(u, v)| canon(u, v)).collect();
    let mut edges = Vec::with_capacity(edge_count);
    for (u, v) in lattice {
        let mut e = canon(u, v);
        if rng.random::<f64>() < rewire {
            // bounded retries; a saturated node keeps its lattice edge
            for _ in 0..32 {
                let w = rng.random_range(0..d);
                let cand = canon(u, w);
                if w != u && !present.contains(&cand) {
                    present.remove(&e);
                    present.insert(cand);
                    e = cand;
                    break;
                }
            }
        }
        edges.push(e);
    }
    Graph::new(d, edges)
}

/// Connected random graph: a random recursive spanning tree plus up to
/// `extra_edges` uniformly drawn additional edges.
pub fn random_connected<R: Rng + ?Sized>(d: usize, extra_edges: usize, rng: &mut R) -> Result<Graph> {
    let mut edges = Vec::new();
    for i in 1..d {
        let j = rng.random_range(0..i);
        edges.push((j, i));
    }
    if d >= 2 {
        for _ in 0..extra_edges {
            let u = rng.random_range(0..d);
            let v = rng.random_range(0..d);
            if u != v {
                edges.push((u, v));
            }
        }
    }
    Graph::new(d, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn loads_simple_list() {
        let g = Graph::from_edge_list("nodes 3\n0 1\n1 2").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn rejects_self_loop() {
        let err = Graph::from_edge_list("nodes 2\n0 0").unwrap_err();
        assert_eq!(err, GscoError::SelfLoop { node: 0, line: 2 });
    }

    #[test]
    fn dedups_in_canonical_order() {
        let g = Graph::from_edge_list("nodes 4\n1 0\n0 1\n2 3").unwrap();
        assert_eq!(g.edges(), &[(0, 1), (2, 3)]);
    }

    #[test]
    fn comments_and_blank_lines() {
        let g = Graph::from_edge_list("# fixture\n\nnodes 3\n# edge\n2 1\n").unwrap();
        assert_eq!(g.edges(), &[(1, 2)]);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        match Graph::from_edge_list("nodes 3\n0 1\n1 x\n") {
            Err(GscoError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match Graph::from_edge_list("nodes 3\n0 1 2\n") {
            Err(GscoError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn out_of_range_and_bad_header() {
        assert!(matches!(
            Graph::from_edge_list("nodes 2\n0 2"),
            Err(GscoError::Range { index: 2, dim: 2 })
        ));
        assert!(matches!(Graph::from_edge_list("nodes 0"), Err(GscoError::Config(_))));
        assert!(matches!(Graph::from_edge_list("nodes -3"), Err(GscoError::Config(_))));
        assert!(matches!(Graph::from_edge_list("0 1"), Err(GscoError::Parse { line: 1, .. })));
    }

    #[test]
    fn component_counts() {
        let g = path(3).unwrap();
        assert_eq!(g.connected_component_count(&SupportSet::from_indices([0, 2])).unwrap(), 2);
        assert_eq!(g.connected_component_count(&SupportSet::from_indices([0, 1, 2])).unwrap(), 1);
        assert_eq!(g.connected_component_count(&SupportSet::empty()).unwrap(), 0);
        assert!(g.connected_component_count(&SupportSet::from_indices([3])).is_err());
    }

    #[test]
    fn watts_strogatz_exact_edge_count() {
        let g = watts_strogatz(50, 137, 0.2, 3).unwrap();
        assert_eq!(g.edge_count(), 137);
        let again = watts_strogatz(50, 137, 0.2, 3).unwrap();
        assert_eq!(g, again);
        assert!(watts_strogatz(10, 60, 0.1, 0).is_err());
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (2usize..12).prop_flat_map(|d| {
            prop::collection::vec((0..d, 0..d), 0..30).prop_map(move |pairs| {
                Graph::new(d, pairs.into_iter().filter(|(u, v)| u != v)).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn edge_list_round_trip(g in arb_graph()) {
            let back = Graph::from_edge_list(&g.to_edge_list()).unwrap();
            prop_assert_eq!(back, g);
        }

        #[test]
        fn adjacency_symmetric(g in arb_graph()) {
            for u in 0..g.node_count() {
                for &v in g.neighbors(u) {
                    prop_assert!(g.neighbors(v).contains(&u));
                }
            }
        }

        #[test]
        fn components_bounded_by_size(g in arb_graph(), mask in any::<u16>()) {
            let s = SupportSet::from_indices((0..g.node_count()).filter(|i| mask >> i & 1 == 1));
            let cc = g.connected_component_count(&s).unwrap();
            prop_assert!(cc <= s.len());
            let internal = g.edges().iter().any(|&(u, v)| s.contains(u) && s.contains(v));
            prop_assert_eq!(cc == s.len(), !internal);
        }
    }
}
