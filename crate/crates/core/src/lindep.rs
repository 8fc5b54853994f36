//! Integer linear dependences that every realization's unit directions must
//! satisfy, read off from paths in a color cover.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::colored_graphs::{prop1, CoverResult, CutSearch, Prop1Error};
use crate::constructions::PointSeq;
use crate::exec::Execution;
use crate::linalg::{Rational, Vec2};
use crate::norms::{NormOracle, SymmetricPolygon};
use crate::udg::{build_udg_with, prune_to_proper, traversal_sign, verify_realization_with, DecoratedUdg, UdgError};

/// `u_{i(l+j)} = sum_s coeffs[j][s] · u_{i(s)}` for `j = 1..=l+1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SystemRepr", into = "SystemRepr")]
pub struct DependenceSystem {
    l: usize,
    indices: Vec<usize>,
    coeffs: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct SystemRepr {
    l: usize,
    indices: Vec<usize>,
    coeffs: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LindepError {
    #[error("invalid dependence system: {0}")]
    InvalidSystem(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("need at least 4 vertices, got {0}")]
    TooFewVertices(usize),
    #[error(transparent)]
    Udg(#[from] UdgError),
    #[error("color cover failed: {0}")]
    Cover(Prop1Error),
    #[error("G~[W] carries {found} colors, need 2|I|+1 = {needed}")]
    TooFewColors { found: usize, needed: usize, cover: Box<CoverResult> },
    #[error("the point sequence does not realize the graph")]
    NotARealization,
}

impl DependenceSystem {
    pub fn new(l: usize, indices: Vec<usize>, coeffs: Vec<Vec<i64>>) -> Result<Self, LindepError> {
        let bad = |s: &str| Err(LindepError::InvalidSystem(s.to_string()));
        if l == 0 {
            return bad("l must be at least 1");
        }
        if indices.len() != 2 * l + 1 {
            return bad("need 2l+1 indices");
        }
        if indices.iter().collect::<BTreeSet<_>>().len() != indices.len() {
            return bad("indices must be distinct");
        }
        if coeffs.len() != l + 1 || coeffs.iter().any(|row| row.len() != l) {
            return bad("coefficient grid must be (l+1) x l");
        }
        if coeffs.iter().any(|row| row.iter().all(|&c| c == 0)) {
            return bad("a coefficient row is zero");
        }
        Ok(DependenceSystem { l, indices, coeffs })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn coeffs(&self) -> &[Vec<i64>] {
        &self.coeffs
    }

    /// Every row holds exactly for `dir(color)`; `None` when a color has no
    /// direction.
    pub fn holds_for(&self, dir: impl Fn(usize) -> Option<Vec2>) -> Option<bool> {
        let base: Vec<Vec2> = self.indices[..self.l].iter().map(|&c| dir(c)).collect::<Option<_>>()?;
        for (j, row) in self.coeffs.iter().enumerate() {
            let lhs = dir(self.indices[self.l + j])?;
            let mut rhs = Vec2::zero();
            for (c, u) in row.iter().zip(&base) {
                rhs = rhs + u.scale(&Rational::from_int(*c));
            }
            if lhs != rhs {
                return Some(false);
            }
        }
        Some(true)
    }

    /// Copy with `coeffs[row][col]` changed by `by`.
    pub fn perturbed(&self, row: usize, col: usize, by: i64) -> DependenceSystem {
        let mut s = self.clone();
        s.coeffs[row][col] += by;
        s
    }
}

impl From<DependenceSystem> for SystemRepr {
    fn from(s: DependenceSystem) -> Self {
        SystemRepr { l: s.l, indices: s.indices, coeffs: s.coeffs }
    }
}

impl TryFrom<SystemRepr> for DependenceSystem {
    type Error = LindepError;
    fn try_from(r: SystemRepr) -> Result<Self, Self::Error> {
        DependenceSystem::new(r.l, r.indices, r.coeffs)
    }
}

/// Coefficients, per color, expressing `u_{c(target)}` as a signed sum of
/// the directions along `path`.
///
/// Walking edge `{x, y}` from `x` to `y` adds `+u` when `σ = +1` and `x < y`
/// or `σ = -1` and `x > y`, else `-u`. The walk runs from the smaller
/// endpoint `a` of the target to `b`, so the total is `p_b - p_a =
/// σ(target)·u_{c(target)}`.
pub fn signed_path_sum(
    g: &DecoratedUdg,
    path: &[usize],
    target: (usize, usize),
) -> Result<BTreeMap<usize, i64>, LindepError> {
    let (a, b) = (target.0.min(target.1), target.0.max(target.1));
    let t_idx = g
        .edge_index(a, b)
        .ok_or_else(|| LindepError::InvalidPath(format!("target {{{a},{b}}} is not an edge")))?;
    let mut walk: Vec<usize> = path.to_vec();
    if walk.first() == Some(&b) && walk.last() == Some(&a) {
        walk.reverse();
    }
    if walk.len() < 2 || walk[0] != a || walk[walk.len() - 1] != b {
        return Err(LindepError::InvalidPath(format!("path does not join {a} and {b}")));
    }
    let target_color = g.colors()[t_idx];
    let mut sum: BTreeMap<usize, i64> = BTreeMap::new();
    for step in walk.windows(2) {
        let (x, y) = (step[0], step[1]);
        let e = g
            .edge_index(x, y)
            .ok_or_else(|| LindepError::InvalidPath(format!("{{{x},{y}}} is not an edge")))?;
        let c = g.colors()[e];
        if c == target_color {
            return Err(LindepError::InvalidPath(format!("path uses the target color {c}")));
        }
        *sum.entry(c).or_default() += traversal_sign(g, x, y).expect("edge exists");
    }
    let sigma = g.signs()[t_idx] as i64;
    Ok(sum.into_iter().filter(|&(_, v)| v != 0).map(|(c, v)| (c, sigma * v)).collect())
}

/// Parameters of [`extract_dependences`].
#[derive(Debug, Clone)]
pub struct DependenceConfig {
    pub q: Rational,
    pub c: Rational,
    /// Density constant of `f(n) = C0 n log n log log n`; reported only.
    pub c0: Rational,
    pub search: CutSearch,
}

impl Default for DependenceConfig {
    fn default() -> Self {
        DependenceConfig {
            q: Rational::new(2001, 1000),
            c: Rational::one(),
            c0: Rational::one(),
            search: CutSearch::default(),
        }
    }
}

/// System plus the intermediate objects, for audit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependenceReport {
    pub system: DependenceSystem,
    pub cover: CoverResult,
    pub pruned_edges: usize,
    pub original_edges: usize,
    /// 1-based vertex paths, one per row.
    pub paths: Vec<Vec<usize>>,
    pub above_density_threshold: bool,
}

/// Prune to a proper coloring, take a color cover `(W, I)`, and express each
/// of the `|I| + 1` smallest remaining colors of `G~[W]` through a shortest
/// path in `G~[I, W]`.
pub fn extract_dependences(g: &DecoratedUdg, cfg: &DependenceConfig) -> Result<DependenceReport, LindepError> {
    if g.n() < 4 {
        return Err(LindepError::TooFewVertices(g.n()));
    }
    let pruned = prune_to_proper(g)?;
    let cg = pruned.to_colored_graph();
    let cover = prop1(&cg, &cfg.q, &cfg.c, &cfg.search).map_err(LindepError::Cover)?;
    let w1: Vec<usize> = cover.w.iter().map(|&v| v + 1).collect();
    let in_w: BTreeSet<usize> = w1.iter().copied().collect();
    let cover_colors: BTreeSet<usize> = cover.colors.iter().copied().collect();
    let l = cover_colors.len();
    let mut present = BTreeSet::new();
    let mut first_edge: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for (&(a, b), &c) in pruned.edges().iter().zip(pruned.colors()) {
        if in_w.contains(&a) && in_w.contains(&b) {
            present.insert(c);
            first_edge.entry(c).or_insert((a, b));
        }
    }
    if present.len() < 2 * l + 1 {
        return Err(LindepError::TooFewColors { found: present.len(), needed: 2 * l + 1, cover: Box::new(cover) });
    }
    let chosen: Vec<usize> = present.difference(&cover_colors).copied().take(l + 1).collect();
    let base: Vec<usize> = cover_colors.iter().copied().collect();
    let rows = cfg.search.exec.map_slice(&chosen, |&j| {
        let (a, b) = first_edge[&j];
        let path = shortest_path(&pruned, &in_w, &cover_colors, a, b).expect("G~[I, W] is connected");
        let sum = signed_path_sum(&pruned, &path, (a, b)).expect("cover path is valid");
        let row: Vec<i64> = base.iter().map(|c| sum.get(c).copied().unwrap_or(0)).collect();
        (row, path)
    });
    let n = g.n() as f64;
    let density = cfg.c0.to_f64() * n * n.log2() * n.log2().log2();
    let mut indices = base;
    indices.extend(&chosen);
    let (coeffs, paths): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let system = DependenceSystem::new(l, indices, coeffs)?;
    Ok(DependenceReport {
        system,
        cover,
        pruned_edges: pruned.edge_count(),
        original_edges: g.edge_count(),
        paths,
        above_density_threshold: g.edge_count() as f64 >= density,
    })
}

/// Lexicographically smallest shortest path from `a` to `b` using vertices
/// of `w` and edges with colors in `allowed`.
fn shortest_path(
    g: &DecoratedUdg,
    w: &BTreeSet<usize>,
    allowed: &BTreeSet<usize>,
    a: usize,
    b: usize,
) -> Option<Vec<usize>> {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (&(x, y), c) in g.edges().iter().zip(g.colors()) {
        if w.contains(&x) && w.contains(&y) && allowed.contains(c) {
            adj.entry(x).or_default().push(y);
            adj.entry(y).or_default().push(x);
        }
    }
    for list in adj.values_mut() {
        list.sort_unstable();
    }
    let mut dist: BTreeMap<usize, usize> = BTreeMap::from([(b, 0)]);
    let mut queue = VecDeque::from([b]);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        for &u in adj.get(&v).into_iter().flatten() {
            if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(u) {
                e.insert(d + 1);
                queue.push_back(u);
            }
        }
    }
    let mut at = a;
    let mut path = vec![a];
    let mut d = *dist.get(&a)?;
    while d > 0 {
        at = *adj[&at].iter().find(|u| dist.get(u) == Some(&(d - 1)))?;
        path.push(at);
        d -= 1;
    }
    Some(path)
}

/// Every row of `s` holds exactly on the directions of the realization.
pub fn verify_on_realization(
    s: &DependenceSystem,
    g: &DecoratedUdg,
    points: &PointSeq,
    b: &SymmetricPolygon,
) -> Result<bool, LindepError> {
    verify_on_realization_with(s, g, points, &NormOracle::polygon(b.clone()))
}

pub fn verify_on_realization_with(
    s: &DependenceSystem,
    g: &DecoratedUdg,
    points: &PointSeq,
    norm: &NormOracle,
) -> Result<bool, LindepError> {
    if !verify_realization_with(g, points, norm) {
        return Err(LindepError::NotARealization);
    }
    let built = build_udg_with(points, norm, Execution::default());
    let dirs = built.directions().expect("built graphs carry directions");
    Ok(s.holds_for(|c| c.checked_sub(1).and_then(|i| dirs.get(i)).cloned()).unwrap_or(false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Execution;
    use crate::linalg::{rat, v2};

    /// The six-vertex path of the signed-sum figure: target {1,6} of color 1.
    fn figure_graph() -> DecoratedUdg {
        DecoratedUdg::new(
            6,
            4,
            vec![
                ((1, 6), 1, -1),
                ((1, 2), 2, 1),
                ((2, 3), 2, 1),
                ((3, 4), 3, -1),
                ((4, 5), 4, 1),
                ((5, 6), 2, 1),
            ],
            None,
        )
        .unwrap()
    }

    #[test]
    fn figure_signed_sum() {
        let sum = signed_path_sum(&figure_graph(), &[1, 2, 3, 4, 5, 6], (1, 6)).unwrap();
        assert_eq!(sum, BTreeMap::from([(2, -3), (3, 1), (4, -1)]));
        // same answer when the path is given from the other end
        let back = signed_path_sum(&figure_graph(), &[6, 5, 4, 3, 2, 1], (6, 1)).unwrap();
        assert_eq!(back, sum);
    }

    #[test]
    fn one_step_sums() {
        let g = DecoratedUdg::new(2, 2, vec![((1, 2), 1, 1)], None).unwrap();
        assert!(signed_path_sum(&g, &[1, 2], (1, 2)).is_err());
        let g = DecoratedUdg::new(3, 3, vec![((1, 2), 1, 1), ((1, 3), 2, 1), ((2, 3), 3, 1)], None).unwrap();
        assert!(matches!(signed_path_sum(&g, &[1, 3], (1, 2)), Err(LindepError::InvalidPath(_))));
        assert!(matches!(signed_path_sum(&g, &[1, 3, 1, 2], (1, 2)), Err(LindepError::InvalidPath(_))));
        assert!(signed_path_sum(&g, &[1, 3, 2], (2, 3)).is_err());
    }

    #[test]
    fn orientation_flip() {
        // target {1,2} color 1; path 1 -> 3 -> 2 with {1,3}: +u2 and {2,3}
        // walked downwards with sign +1: -u3
        let g = DecoratedUdg::new(3, 3, vec![((1, 2), 1, 1), ((1, 3), 2, 1), ((2, 3), 3, 1)], None).unwrap();
        let sum = signed_path_sum(&g, &[1, 3, 2], (1, 2)).unwrap();
        assert_eq!(sum, BTreeMap::from([(2, 1), (3, -1)]));
    }

    fn rainbow(n: usize) -> DecoratedUdg {
        let mut edges = Vec::new();
        for a in 1..=n {
            for b in (a + 1)..=n {
                edges.push(((a, b), edges.len() + 1, 1));
            }
        }
        let k = edges.len();
        DecoratedUdg::new(n, k, edges, None).unwrap()
    }

    fn cfg() -> DependenceConfig {
        DependenceConfig {
            c: rat(1, 4),
            search: CutSearch { exec: Execution::Sequential, ..CutSearch::default() },
            ..DependenceConfig::default()
        }
    }

    #[test]
    fn rainbow_k5_rows_follow_tree_paths() {
        let g = rainbow(5);
        let rep = extract_dependences(&g, &cfg()).unwrap();
        let s = &rep.system;
        assert_eq!(s.l(), 4);
        assert_eq!(s.coeffs().len(), 5);
        for (row, path) in s.coeffs().iter().zip(&rep.paths) {
            assert!(row.iter().map(|c| c.unsigned_abs()).sum::<u64>() <= (path.len() - 1) as u64);
        }
    }

    #[test]
    fn rainbow_k4_has_too_few_colors() {
        // 6 colors cannot cover 2.001 * 3; with q = 3/2 the cover exists
        // but 2|I|+1 = 7 colors are still missing
        assert!(matches!(extract_dependences(&rainbow(4), &cfg()), Err(LindepError::Cover(_))));
        let loose = DependenceConfig { q: rat(3, 2), ..cfg() };
        assert!(matches!(
            extract_dependences(&rainbow(4), &loose),
            Err(LindepError::TooFewColors { found: 6, needed: 7, .. })
        ));
    }

    #[test]
    fn system_validation() {
        assert!(DependenceSystem::new(0, vec![1], vec![vec![]]).is_err());
        assert!(DependenceSystem::new(1, vec![1, 2, 2], vec![vec![1], vec![1]]).is_err());
        assert!(DependenceSystem::new(1, vec![1, 2, 3], vec![vec![0], vec![1]]).is_err());
        let s = DependenceSystem::new(1, vec![1, 2, 3], vec![vec![2], vec![-1]]).unwrap();
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(js, r#"{"l":1,"indices":[1,2,3],"coeffs":[[2],[-1]]}"#);
        let u = |c: usize| Some(v2(c as i64 % 2, 1).scale(&rat(if c == 3 { -1 } else { c as i64 }, 1)));
        assert_eq!(s.holds_for(u), Some(false));
    }
}
