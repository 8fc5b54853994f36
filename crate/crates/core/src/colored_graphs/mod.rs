//! Edge-colored graphs: the average-degree core, cut-robust vertex sets and
//! the greedy color cover, each with an independently checked output.

mod cover;
mod cuts;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

pub use cover::{check_cover, greedy_color_cover, prop1, ContractViolation, CoverError, CoverResult, GreedyCover, Prop1Error};
pub use cuts::{
    cut_stats, find_weak_cut, is_weak, min_degree_core, robust_core, robust_core_on, verify_no_weak_cut, Cut,
    CutSearch, CutStep, RobustCore, RobustCoreError, DEFAULT_EXHAUSTIVE_CAP,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("edge {{{0},{1}}} is a loop or leaves the vertex range")]
    BadEdge(usize, usize),
    #[error("edge {{{0},{1}}} is repeated")]
    Repeated(usize, usize),
    #[error("malformed graph JSON: {0}")]
    Malformed(String),
}

/// Simple undirected graph on `0..n` with one color id per edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct EdgeColoredGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    colors: Vec<usize>,
    adj: Vec<Vec<(usize, usize)>>,
}

/// JSON form, vertices numbered from 1 like the decorated graphs.
#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<[usize; 2]>,
    color: BTreeMap<String, usize>,
}

impl EdgeColoredGraph {
    pub fn new(n: usize, mut colored: Vec<((usize, usize), usize)>) -> Result<Self, GraphError> {
        for e in colored.iter_mut() {
            let (a, b) = e.0;
            if a == b || a >= n || b >= n {
                return Err(GraphError::BadEdge(a, b));
            }
            e.0 = (a.min(b), a.max(b));
        }
        colored.sort();
        if let Some(w) = colored.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(GraphError::Repeated(w[0].0 .0, w[0].0 .1));
        }
        let mut adj = vec![Vec::new(); n];
        for (i, &((a, b), _)) in colored.iter().enumerate() {
            adj[a].push((b, i));
            adj[b].push((a, i));
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
        }
        Ok(EdgeColoredGraph {
            n,
            edges: colored.iter().map(|e| e.0).collect(),
            colors: colored.iter().map(|e| e.1).collect(),
            adj,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// `(neighbour, edge index)` pairs sorted by neighbour.
    pub fn adjacency(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn color_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adj[a]
            .binary_search_by_key(&b, |&(u, _)| u)
            .ok()
            .map(|pos| self.colors[self.adj[a][pos].1])
    }

    pub fn membership(&self, w: &[usize]) -> Vec<bool> {
        let mut inside = vec![false; self.n];
        for &v in w {
            inside[v] = true;
        }
        inside
    }

    /// Indices of the edges of `G[W]`.
    pub fn induced_edges(&self, w: &[usize]) -> Vec<usize> {
        let inside = self.membership(w);
        (0..self.edges.len())
            .filter(|&i| inside[self.edges[i].0] && inside[self.edges[i].1])
            .collect()
    }

    pub fn colors_on(&self, w: &[usize]) -> BTreeSet<usize> {
        self.induced_edges(w).into_iter().map(|i| self.colors[i]).collect()
    }

    /// No two edges of `G[W]` sharing a vertex have the same color.
    pub fn is_proper_on(&self, w: &[usize]) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.induced_edges(w).into_iter().all(|i| {
            let (a, b) = self.edges[i];
            seen.insert((a, self.colors[i])) && seen.insert((b, self.colors[i]))
        })
    }

    pub fn is_proper(&self) -> bool {
        self.is_proper_on(&(0..self.n).collect::<Vec<_>>())
    }

    pub fn min_degree_on(&self, w: &[usize]) -> usize {
        let inside = self.membership(w);
        w.iter()
            .map(|&v| self.adj[v].iter().filter(|&&(u, _)| inside[u]).count())
            .min()
            .unwrap_or(0)
    }
}

impl From<EdgeColoredGraph> for GraphRepr {
    fn from(g: EdgeColoredGraph) -> Self {
        let color = g
            .edges
            .iter()
            .zip(&g.colors)
            .map(|(&(a, b), &c)| (crate::udg::edge_key(a + 1, b + 1), c))
            .collect();
        GraphRepr { n: g.n, edges: g.edges.iter().map(|&(a, b)| [a + 1, b + 1]).collect(), color }
    }
}

impl TryFrom<GraphRepr> for EdgeColoredGraph {
    type Error = GraphError;
    fn try_from(r: GraphRepr) -> Result<Self, Self::Error> {
        if r.color.len() != r.edges.len() {
            return Err(GraphError::Malformed("color map does not match the edge list".into()));
        }
        let mut colored = Vec::with_capacity(r.edges.len());
        for [a, b] in r.edges {
            if a == 0 || b == 0 {
                return Err(GraphError::Malformed("vertices are numbered from 1".into()));
            }
            let key = crate::udg::edge_key(a.min(b), a.max(b));
            let c = *r.color.get(&key).ok_or_else(|| GraphError::Malformed(format!("no color for {key}")))?;
            colored.push(((a - 1, b - 1), c));
        }
        EdgeColoredGraph::new(r.n, colored)
    }
}

/// Union-find over `0..n` with path halving.
#[derive(Clone)]
pub(crate) struct Dsu {
    parent: Vec<usize>,
    sets: usize,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect(), sets: n }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
            self.sets -= 1;
        }
    }

    pub(crate) fn sets(&self) -> usize {
        self.sets
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_and_json() {
        let g = EdgeColoredGraph::new(3, vec![((1, 0), 2), ((1, 2), 1)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(g.color_between(2, 1), Some(1));
        let js = serde_json::to_string(&g).unwrap();
        assert_eq!(js, r#"{"n":3,"edges":[[1,2],[2,3]],"color":{"1-2":2,"2-3":1}}"#);
        assert_eq!(serde_json::from_str::<EdgeColoredGraph>(&js).unwrap(), g);
        assert!(EdgeColoredGraph::new(2, vec![((0, 0), 1)]).is_err());
        assert!(EdgeColoredGraph::new(2, vec![((0, 1), 1), ((1, 0), 2)]).is_err());
    }

    #[test]
    fn properness() {
        let g = EdgeColoredGraph::new(3, vec![((0, 1), 1), ((1, 2), 1)]).unwrap();
        assert!(!g.is_proper());
        assert!(g.is_proper_on(&[0, 1]));
    }
}
