use std::cmp::Reverse;
use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EdgeColoredGraph;
use crate::exec::Execution;
use crate::linalg::Rational;

pub const DEFAULT_EXHAUSTIVE_CAP: usize = 18;

/// Largest `|W|` searched exhaustively; the bitmask search needs it below 31.
const HARD_CAP: usize = 30;

/// How [`find_weak_cut`] searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutSearch {
    pub exhaustive_cap: usize,
    pub seed: u64,
    pub exec: Execution,
    pub local_search_starts: usize,
}

impl Default for CutSearch {
    /// Cap from `UDNORM_EXHAUSTIVE_CAP` when set, else 18.
    fn default() -> Self {
        let exhaustive_cap = std::env::var("UDNORM_EXHAUSTIVE_CAP")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(DEFAULT_EXHAUSTIVE_CAP);
        CutSearch { exhaustive_cap, seed: 0, exec: Execution::default(), local_search_starts: 4 }
    }
}

impl CutSearch {
    fn cap(&self) -> usize {
        self.exhaustive_cap.min(HARD_CAP)
    }
}

/// A partition `(A, B)` of a vertex set; `A` holds the smallest vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cut {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    /// Most neighbours any vertex has on the other side.
    pub delta: usize,
}

impl Cut {
    pub fn imbalance(&self) -> Rational {
        let total = (self.a.len() + self.b.len()) as i64;
        Rational::new(total, self.a.len().min(self.b.len()) as i64)
    }

    /// `B` when it is strictly smaller, else `A`.
    pub fn smaller_side(&self) -> &[usize] {
        if self.b.len() < self.a.len() {
            &self.b
        } else {
            &self.a
        }
    }
}

/// `Δ(A, B)` computed directly from the edge list.
pub fn cut_stats(g: &EdgeColoredGraph, a: &[usize], b: &[usize]) -> usize {
    let mut side = vec![0u8; g.n()];
    for &v in a {
        side[v] = 1;
    }
    for &v in b {
        side[v] = 2;
    }
    let mut cross = vec![0usize; g.n()];
    for &(x, y) in g.edges() {
        if side[x] != 0 && side[y] != 0 && side[x] != side[y] {
            cross[x] += 1;
            cross[y] += 1;
        }
    }
    cross.into_iter().max().unwrap_or(0)
}

/// Exact test of `Δ < r·log2(imb)`, evaluated as `2^(Δ/r) < imb`.
pub fn is_weak(delta: usize, imb: &Rational, r: &Rational) -> bool {
    (Rational::from_int(delta as i64) / r).pow2_lt(imb)
}

/// For a vertex set of fixed size, the largest weak `Δ` per smaller-side size.
struct WeakTable {
    max_weak: Vec<usize>,
}

impl WeakTable {
    fn new(total: usize, r: &Rational) -> Self {
        let rf = r.to_f64();
        let mut max_weak = vec![0; total / 2 + 1];
        for (s, slot) in max_weak.iter_mut().enumerate().skip(1) {
            let imb = Rational::new(total as i64, s as i64);
            // Δ = 0 is always weak because imb >= 2
            let mut d = (rf * (total as f64 / s as f64).log2()).floor().max(0.0) as usize;
            while d > 0 && !is_weak(d, &imb, r) {
                d -= 1;
            }
            while is_weak(d + 1, &imb, r) {
                d += 1;
            }
            *slot = d;
        }
        WeakTable { max_weak }
    }

    fn weak(&self, delta: usize, smaller: usize) -> bool {
        delta <= self.max_weak[smaller]
    }
}

/// Vertices left after repeatedly deleting any vertex of degree below `δ/2`,
/// `δ` the average degree of the original graph (`deg·n < |E|`).
pub fn min_degree_core(g: &EdgeColoredGraph) -> Vec<usize> {
    let n = g.n();
    let e = g.edge_count();
    assert!(e > 0, "min_degree_core needs at least one edge");
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut alive = vec![true; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| deg[v] * n < e).collect();
    while let Some(v) = queue.pop_front() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &(u, _) in g.adjacency(v) {
            if alive[u] {
                deg[u] -= 1;
                if deg[u] * n < e {
                    queue.push_back(u);
                }
            }
        }
    }
    let core: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    assert!(!core.is_empty(), "averaging argument guarantees a nonempty core");
    core
}

/// Preference among weak cuts: smallest `Δ`, then the most balanced.
type CutKey = (usize, Reverse<usize>);

/// A cut `(A, B)` of `G[W]` with `Δ(A, B) < r·log2 imb(A, B)`, if the search
/// finds one. Exhaustive when `|W| <= exhaustive_cap`.
pub fn find_weak_cut(g: &EdgeColoredGraph, w: &[usize], r: &Rational, search: &CutSearch) -> Option<Cut> {
    assert!(w.len() >= 2, "a cut needs at least two vertices");
    assert!(r.is_positive(), "cut threshold must be positive");
    let mut w = w.to_vec();
    w.sort_unstable();
    let table = WeakTable::new(w.len(), r);
    if w.len() <= search.cap() {
        exhaustive(g, &w, &table, search.exec)
    } else {
        heuristic(g, &w, r, &table, search)
    }
}

fn local_adjacency(g: &EdgeColoredGraph, w: &[usize]) -> Vec<u32> {
    let mut local = vec![usize::MAX; g.n()];
    for (i, &v) in w.iter().enumerate() {
        local[v] = i;
    }
    w.iter()
        .map(|&v| {
            g.adjacency(v)
                .iter()
                .filter(|&&(u, _)| local[u] != usize::MAX)
                .fold(0u32, |m, &(u, _)| m | 1 << local[u])
        })
        .collect()
}

/// Scans masks `1 .. 2^(|W|-1)`; bit `j` puts `W[j+1]` into `B`, so `W[0]`
/// always sits in `A`. Ties go to the smallest mask.
fn exhaustive(g: &EdgeColoredGraph, w: &[usize], table: &WeakTable, exec: Execution) -> Option<Cut> {
    let k = w.len();
    let adj = local_adjacency(g, w);
    let full: u32 = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
    let best = exec.min_by_key_range(1, 1u64 << (k - 1), |mask| {
        let b = (mask as u32) << 1;
        let a = full ^ b;
        let nb = b.count_ones() as usize;
        let smaller = nb.min(k - nb);
        let mut delta = 0;
        for (i, &nbrs) in adj.iter().enumerate() {
            let other = if b >> i & 1 == 1 { a } else { b };
            delta = delta.max((nbrs & other).count_ones() as usize);
        }
        table.weak(delta, smaller).then_some(((delta, Reverse(smaller)), ()))
    });
    best.map(|(key, mask, ())| {
        let b_mask = (mask as u32) << 1;
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for (i, &v) in w.iter().enumerate() {
            if b_mask >> i & 1 == 1 {
                b.push(v);
            } else {
                a.push(v);
            }
        }
        Cut { a, b, delta: key.0 }
    })
}

/// Cross-neighbour counts for a side assignment over local indices.
struct SideState<'a> {
    nbrs: &'a [Vec<usize>],
    in_b: Vec<bool>,
    cross: Vec<usize>,
    b_size: usize,
}

impl<'a> SideState<'a> {
    fn new(nbrs: &'a [Vec<usize>], in_b: Vec<bool>) -> Self {
        let cross = (0..nbrs.len())
            .map(|v| nbrs[v].iter().filter(|&&u| in_b[u] != in_b[v]).count())
            .collect();
        let b_size = in_b.iter().filter(|&&x| x).count();
        SideState { nbrs, in_b, cross, b_size }
    }

    fn flip(&mut self, v: usize) {
        let deg = self.nbrs[v].len();
        self.cross[v] = deg - self.cross[v];
        for &u in &self.nbrs[v] {
            if self.in_b[u] == self.in_b[v] {
                self.cross[u] += 1;
            } else {
                self.cross[u] -= 1;
            }
        }
        self.in_b[v] = !self.in_b[v];
        if self.in_b[v] {
            self.b_size += 1;
        } else {
            self.b_size -= 1;
        }
    }

    fn delta(&self) -> usize {
        self.cross.iter().copied().max().unwrap_or(0)
    }

    fn smaller(&self) -> usize {
        self.b_size.min(self.in_b.len() - self.b_size)
    }

    /// `Δ - r·log2 imb` in floating point, for steering only.
    fn score(&self, rf: f64) -> f64 {
        let s = self.smaller();
        if s == 0 {
            return f64::INFINITY;
        }
        self.delta() as f64 - rf * (self.in_b.len() as f64 / s as f64).log2()
    }
}

fn heuristic(g: &EdgeColoredGraph, w: &[usize], r: &Rational, table: &WeakTable, search: &CutSearch) -> Option<Cut> {
    let k = w.len();
    let mut local = vec![usize::MAX; g.n()];
    for (i, &v) in w.iter().enumerate() {
        local[v] = i;
    }
    let nbrs: Vec<Vec<usize>> = w
        .iter()
        .map(|&v| g.adjacency(v).iter().map(|&(u, _)| local[u]).filter(|&u| u != usize::MAX).collect())
        .collect();
    let mut candidates: Vec<Vec<bool>> = Vec::new();
    for v in 0..k {
        let mut side = vec![false; k];
        side[v] = true;
        candidates.push(side);
    }
    // BFS balls around every vertex at every radius
    let balls: Vec<Vec<Vec<bool>>> = search.exec.map_range(k, |s| {
        let mut dist = vec![usize::MAX; k];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        let mut order = Vec::with_capacity(k);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &u in &nbrs[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        let mut out = Vec::new();
        let mut side = vec![false; k];
        let mut idx = 0;
        while idx < order.len() {
            let radius = dist[order[idx]];
            while idx < order.len() && dist[order[idx]] == radius {
                side[order[idx]] = true;
                idx += 1;
            }
            if idx < k {
                out.push(side.clone());
            }
        }
        out
    });
    candidates.extend(balls.into_iter().flatten());
    let rf = r.to_f64();
    let starts: Vec<Vec<bool>> = {
        let mut rng = ChaCha8Rng::seed_from_u64(search.seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        (0..search.local_search_starts)
            .map(|_| {
                let mut order: Vec<usize> = (0..k).collect();
                order.shuffle(&mut rng);
                let take = rng.gen_range(1..=k / 2);
                let mut side = vec![false; k];
                for &v in &order[..take] {
                    side[v] = true;
                }
                side
            })
            .collect()
    };
    let improved = search.exec.map_slice(&starts, |start| local_search(&nbrs, start.clone(), rf));
    candidates.extend(improved);

    let keyed = search.exec.map_slice(&candidates, |side| {
        let st = SideState::new(&nbrs, side.clone());
        let smaller = st.smaller();
        if smaller == 0 {
            return None;
        }
        let delta = st.delta();
        table.weak(delta, smaller).then_some((delta, Reverse(smaller)))
    });
    let best = keyed
        .iter()
        .enumerate()
        .filter_map(|(i, key)| key.map(|kk: CutKey| (kk, i)))
        .min()?;
    let side = &candidates[best.1];
    let flip = side[0];
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (i, &v) in w.iter().enumerate() {
        if side[i] != flip {
            b.push(v);
        } else {
            a.push(v);
        }
    }
    Some(Cut { a, b, delta: best.0 .0 })
}

/// Greedy single-vertex moves while they lower the steering score.
fn local_search(nbrs: &[Vec<usize>], start: Vec<bool>, rf: f64) -> Vec<bool> {
    let k = nbrs.len();
    let mut st = SideState::new(nbrs, start);
    let mut best = st.score(rf);
    for _ in 0..(4 * k) {
        let mut pick = None;
        for v in 0..k {
            st.flip(v);
            let s = st.score(rf);
            st.flip(v);
            if s < best - 1e-12 {
                best = s;
                pick = Some(v);
            }
        }
        match pick {
            Some(v) => st.flip(v),
            None => break,
        }
    }
    st.in_b
}

/// One descent step of [`robust_core`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutStep {
    pub a_size: usize,
    pub b_size: usize,
    pub delta: usize,
    pub imbalance: Rational,
    /// `|V_j|` was within the exhaustive cap.
    pub exhaustive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RobustCore {
    pub w: Vec<usize>,
    pub steps: Vec<CutStep>,
    /// Minimum degree was at least `r·log2 |V|` at the start.
    pub hypothesis_met: bool,
    /// Every search, including the final one, was exhaustive.
    pub exhaustive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RobustCoreError {
    #[error("descent reached a single vertex after {} cuts (hypothesis met: {hypothesis_met})", steps.len())]
    Collapsed { steps: Vec<CutStep>, hypothesis_met: bool },
    #[error("final set of {0} vertices failed exhaustive re-verification")]
    Unverified(usize),
}

/// [`robust_core_on`] over all vertices.
pub fn robust_core(g: &EdgeColoredGraph, r: &Rational, search: &CutSearch) -> Result<RobustCore, RobustCoreError> {
    robust_core_on(g, &(0..g.n()).collect::<Vec<_>>(), r, search)
}

/// Descend through weak cuts into the smaller side (ties to `A`) until no
/// weak cut is found.
pub fn robust_core_on(
    g: &EdgeColoredGraph,
    start: &[usize],
    r: &Rational,
    search: &CutSearch,
) -> Result<RobustCore, RobustCoreError> {
    let mut v: Vec<usize> = start.to_vec();
    v.sort_unstable();
    let min_deg = g.min_degree_on(&v);
    let hypothesis_met = !(Rational::from_int(min_deg as i64) / r)
        .pow2_lt(&Rational::from_int(v.len().max(1) as i64));
    let mut steps = Vec::new();
    let mut exhaustive_all = true;
    loop {
        if v.len() < 2 {
            return Err(RobustCoreError::Collapsed { steps, hypothesis_met });
        }
        let exhaustive = v.len() <= search.cap();
        exhaustive_all &= exhaustive;
        match find_weak_cut(g, &v, r, search) {
            Some(cut) => {
                steps.push(CutStep {
                    a_size: cut.a.len(),
                    b_size: cut.b.len(),
                    delta: cut.delta,
                    imbalance: cut.imbalance(),
                    exhaustive,
                });
                v = cut.smaller_side().to_vec();
            }
            None => break,
        }
    }
    if v.len() <= search.cap() && !verify_no_weak_cut(g, &v, r) {
        return Err(RobustCoreError::Unverified(v.len()));
    }
    Ok(RobustCore { w: v, steps, hypothesis_met, exhaustive: exhaustive_all })
}

/// Independent brute force: every cut of `G[W]` has `Δ >= r·log2 imb`.
/// Uses only edge lists and [`is_weak`], not the search code.
pub fn verify_no_weak_cut(g: &EdgeColoredGraph, w: &[usize], r: &Rational) -> bool {
    let k = w.len();
    assert!(k <= 30, "exhaustive verification is limited to 30 vertices");
    if k < 2 {
        return false;
    }
    let in_w = g.membership(w);
    let local: std::collections::HashMap<usize, usize> = w.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .filter(|&&(a, b)| in_w[a] && in_w[b])
        .map(|&(a, b)| (local[&a], local[&b]))
        .collect();
    let mut cross = vec![0usize; k];
    for mask in 1u64..(1u64 << (k - 1)) {
        let in_b = |i: usize| i > 0 && (mask >> (i - 1)) & 1 == 1;
        cross.iter_mut().for_each(|c| *c = 0);
        for &(a, b) in &edges {
            if in_b(a) != in_b(b) {
                cross[a] += 1;
                cross[b] += 1;
            }
        }
        let nb = mask.count_ones() as usize;
        let imb = Rational::new(k as i64, nb.min(k - nb) as i64);
        let delta = cross.iter().copied().max().unwrap_or(0);
        if is_weak(delta, &imb, r) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn graph(n: usize, edges: &[(usize, usize)]) -> EdgeColoredGraph {
        EdgeColoredGraph::new(n, edges.iter().enumerate().map(|(i, &e)| (e, i + 1)).collect()).unwrap()
    }

    fn k4() -> EdgeColoredGraph {
        graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    }

    fn two_triangles() -> EdgeColoredGraph {
        graph(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    }

    fn seq() -> CutSearch {
        CutSearch { exhaustive_cap: 18, seed: 0, exec: Execution::Sequential, local_search_starts: 4 }
    }

    #[test]
    fn core_examples() {
        assert_eq!(min_degree_core(&k4()), vec![0, 1, 2, 3]);
        let mut edges = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        edges.push((0, 4));
        assert_eq!(min_degree_core(&graph(5, &edges)), vec![0, 1, 2, 3]);
        assert_eq!(min_degree_core(&graph(2, &[(0, 1)])), vec![0, 1]);
    }

    #[test]
    fn weak_cut_examples() {
        let all4 = [0, 1, 2, 3];
        assert_eq!(find_weak_cut(&k4(), &all4, &rat(1, 1), &seq()), None);
        let star = graph(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]);
        let cut = find_weak_cut(&star, &[0, 1, 2, 3, 4, 5], &rat(1, 1), &seq()).unwrap();
        assert_eq!(cut.delta, 1);
        let cut = find_weak_cut(&two_triangles(), &[0, 1, 2, 3, 4, 5], &rat(1, 1), &seq()).unwrap();
        assert_eq!((cut.a, cut.b, cut.delta), (vec![0, 1, 2], vec![3, 4, 5], 0));
    }

    #[test]
    fn robust_core_examples() {
        let rc = robust_core(&k4(), &rat(1, 1), &seq()).unwrap();
        assert_eq!(rc.w, vec![0, 1, 2, 3]);
        assert!(rc.hypothesis_met && rc.steps.is_empty());
        let rc = robust_core(&two_triangles(), &rat(1, 1), &seq()).unwrap();
        assert_eq!(rc.w, vec![0, 1, 2]);
        assert_eq!(rc.steps.len(), 1);
        let rc = robust_core(&graph(2, &[(0, 1)]), &rat(1, 1), &seq()).unwrap();
        assert_eq!(rc.w, vec![0, 1]);
    }

    #[test]
    fn weak_threshold_is_exact() {
        // 2^(2/1) = 4 is not below imb 4: Δ = 2 is not weak at r = 1
        assert!(!is_weak(2, &rat(4, 1), &rat(1, 1)));
        assert!(is_weak(1, &rat(4, 1), &rat(1, 1)));
        let table = WeakTable::new(4, &rat(1, 1));
        assert_eq!(table.max_weak[1], 1);
        assert_eq!(table.max_weak[2], 0);
    }

    #[test]
    fn heuristic_finds_the_bridge() {
        // two 12-cliques joined by one edge; 24 vertices forces the heuristic
        let mut edges = Vec::new();
        for base in [0, 12] {
            for i in 0..12 {
                for j in (i + 1)..12 {
                    edges.push((base + i, base + j));
                }
            }
        }
        edges.push((11, 12));
        let g = graph(24, &edges);
        let w: Vec<usize> = (0..24).collect();
        let cut = find_weak_cut(&g, &w, &rat(2, 1), &seq()).unwrap();
        assert_eq!(cut.delta, 1);
        assert_eq!(cut.b.len(), 12);
    }
}
