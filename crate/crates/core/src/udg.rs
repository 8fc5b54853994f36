//! Decorated unit-distance graphs: edges at norm distance exactly 1, colored
//! by the canonical direction of `p_b - p_a` and signed by orientation.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::colored_graphs::EdgeColoredGraph;
use crate::constructions::PointSeq;
use crate::exec::Execution;
use crate::linalg::{Rational, Vec2};
use crate::norms::{NormOracle, SymmetricPolygon, UnitNorm};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UdgError {
    #[error("canonical direction of the zero vector")]
    ZeroVector,
    #[error("vertex {vertex} has {count} edges of color {color}")]
    ColorDegree { vertex: usize, color: usize, count: usize },
    #[error("malformed graph: {0}")]
    Malformed(String),
}

/// `(u, s)` with `u = s·v` in the closed upper half-plane minus the negative
/// x-axis.
pub fn canonical_direction(v: &Vec2) -> Result<(Vec2, i8), UdgError> {
    if v.is_zero() {
        return Err(UdgError::ZeroVector);
    }
    if v.y.is_positive() || (v.y.is_zero() && v.x.is_positive()) {
        Ok((v.clone(), 1))
    } else {
        Ok((-v, -1))
    }
}

/// A graph on vertices `1..=n` with per-edge color in `1..=k` and sign. The
/// abstract variant has `directions = None`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "UdgRepr", into = "UdgRepr")]
pub struct DecoratedUdg {
    n: usize,
    k: usize,
    /// Sorted pairs `(a, b)` with `1 <= a < b <= n`.
    edges: Vec<(usize, usize)>,
    colors: Vec<usize>,
    signs: Vec<i8>,
    directions: Option<Vec<Vec2>>,
}

#[derive(Serialize, Deserialize)]
struct UdgRepr {
    n: usize,
    k: usize,
    edges: Vec<[usize; 2]>,
    color: BTreeMap<String, usize>,
    sign: BTreeMap<String, i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    directions: Option<Vec<Vec2>>,
}

pub(crate) fn edge_key(a: usize, b: usize) -> String {
    format!("{a}-{b}")
}

impl DecoratedUdg {
    pub fn new(
        n: usize,
        k: usize,
        mut decorated: Vec<((usize, usize), usize, i8)>,
        directions: Option<Vec<Vec2>>,
    ) -> Result<Self, UdgError> {
        for e in decorated.iter_mut() {
            let (a, b) = e.0;
            if a == b || a == 0 || b == 0 || a > n || b > n {
                return Err(UdgError::Malformed(format!("edge {{{a},{b}}} on {n} vertices")));
            }
            e.0 = (a.min(b), a.max(b));
            if e.1 == 0 || e.1 > k {
                return Err(UdgError::Malformed(format!("color {} outside 1..={k}", e.1)));
            }
            if e.2 != 1 && e.2 != -1 {
                return Err(UdgError::Malformed(format!("sign {}", e.2)));
            }
        }
        decorated.sort();
        if decorated.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(UdgError::Malformed("repeated edge".into()));
        }
        if let Some(d) = &directions {
            if d.len() != k {
                return Err(UdgError::Malformed(format!("{} directions for {k} colors", d.len())));
            }
            if d.windows(2).any(|w| w[0] >= w[1]) {
                return Err(UdgError::Malformed("directions not strictly increasing".into()));
            }
            for u in d {
                if canonical_direction(u).map(|(_, s)| s) != Ok(1) {
                    return Err(UdgError::Malformed(format!("direction {u} not canonical")));
                }
            }
        }
        Ok(DecoratedUdg {
            n,
            k,
            edges: decorated.iter().map(|e| e.0).collect(),
            colors: decorated.iter().map(|e| e.1).collect(),
            signs: decorated.iter().map(|e| e.2).collect(),
            directions,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn directions(&self) -> Option<&[Vec2]> {
        self.directions.as_deref()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Index of edge `{a, b}` in [`Self::edges`].
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search(&(a.min(b), a.max(b))).ok()
    }

    pub fn color_of(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index(a, b).map(|i| self.colors[i])
    }

    pub fn sign_of(&self, a: usize, b: usize) -> Option<i8> {
        self.edge_index(a, b).map(|i| self.signs[i])
    }

    /// The same record without directions.
    pub fn to_abstract(&self) -> DecoratedUdg {
        DecoratedUdg { directions: None, ..self.clone() }
    }

    /// Copy with the sign of edge `idx` flipped.
    pub fn with_flipped_sign(&self, idx: usize) -> DecoratedUdg {
        let mut g = self.clone();
        g.signs[idx] = -g.signs[idx];
        g
    }

    /// Copy with colors `c1` and `c2` exchanged on every edge.
    pub fn with_colors_swapped(&self, c1: usize, c2: usize) -> DecoratedUdg {
        let mut g = self.clone();
        for c in g.colors.iter_mut() {
            if *c == c1 {
                *c = c2;
            } else if *c == c2 {
                *c = c1;
            }
        }
        g
    }

    /// Number of edges per color, indexed `1..=k` (entry 0 unused).
    pub fn color_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.k + 1];
        for &c in &self.colors {
            counts[c] += 1;
        }
        counts
    }

    /// Fails when some vertex meets three or more edges of one color, which
    /// no realization allows.
    pub fn check_color_degrees(&self) -> Result<(), UdgError> {
        let mut deg: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (&(a, b), &c) in self.edges.iter().zip(&self.colors) {
            *deg.entry((a, c)).or_default() += 1;
            *deg.entry((b, c)).or_default() += 1;
        }
        match deg.into_iter().find(|&(_, d)| d > 2) {
            Some(((vertex, color), count)) => Err(UdgError::ColorDegree { vertex, color, count }),
            None => Ok(()),
        }
    }

    pub fn is_proper(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.edges
            .iter()
            .zip(&self.colors)
            .all(|(&(a, b), &c)| seen.insert((a, c)) && seen.insert((b, c)))
    }

    /// 0-based colored graph on vertices `0..n` (vertex `v` becomes `v - 1`).
    pub fn to_colored_graph(&self) -> EdgeColoredGraph {
        let edges = self
            .edges
            .iter()
            .zip(&self.colors)
            .map(|(&(a, b), &c)| ((a - 1, b - 1), c))
            .collect();
        EdgeColoredGraph::new(self.n, edges).expect("decorated graph is simple")
    }

    fn decorated(&self) -> Vec<((usize, usize), usize, i8)> {
        self.edges
            .iter()
            .zip(&self.colors)
            .zip(&self.signs)
            .map(|((&e, &c), &s)| (e, c, s))
            .collect()
    }

    /// Subgraph keeping the edges whose index satisfies `keep`.
    fn filter_edges(&self, keep: impl Fn(usize) -> bool) -> DecoratedUdg {
        let kept = self.decorated().into_iter().enumerate().filter(|(i, _)| keep(*i)).map(|(_, e)| e).collect();
        DecoratedUdg::new(self.n, self.k, kept, self.directions.clone()).expect("subgraph stays valid")
    }
}

impl From<DecoratedUdg> for UdgRepr {
    fn from(g: DecoratedUdg) -> Self {
        let mut color = BTreeMap::new();
        let mut sign = BTreeMap::new();
        for ((&(a, b), &c), &s) in g.edges.iter().zip(&g.colors).zip(&g.signs) {
            color.insert(edge_key(a, b), c);
            sign.insert(edge_key(a, b), s);
        }
        UdgRepr {
            n: g.n,
            k: g.k,
            edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
            color,
            sign,
            directions: g.directions,
        }
    }
}

impl TryFrom<UdgRepr> for DecoratedUdg {
    type Error = UdgError;
    fn try_from(r: UdgRepr) -> Result<Self, Self::Error> {
        if r.color.len() != r.edges.len() || r.sign.len() != r.edges.len() {
            return Err(UdgError::Malformed("color/sign maps do not match the edge list".into()));
        }
        let mut decorated = Vec::with_capacity(r.edges.len());
        for [a, b] in r.edges {
            let key = edge_key(a.min(b), a.max(b));
            let c = *r.color.get(&key).ok_or_else(|| UdgError::Malformed(format!("no color for {key}")))?;
            let s = *r.sign.get(&key).ok_or_else(|| UdgError::Malformed(format!("no sign for {key}")))?;
            decorated.push(((a, b), c, s));
        }
        DecoratedUdg::new(r.n, r.k, decorated, r.directions)
    }
}

/// Exact unit-length test against a fixed point set, pre-scaled to a common
/// integer frame when the numbers fit in `i128`.
enum PairTester<'a> {
    /// Integer coordinates `Z = D·p`; side `i` is `|<N_i, Z>| <= K_i`.
    PolygonInt { pts: Vec<(i128, i128)>, sides: Vec<(i128, i128, i128)> },
    /// Integer coordinates; unit iff `|Z|^2 = D^2`.
    DiscInt { pts: Vec<(i128, i128)>, d_sq: i128 },
    Generic { pts: &'a [Vec2], norm: &'a dyn UnitNorm },
}

impl<'a> PairTester<'a> {
    fn new(points: &'a [Vec2], norm: &'a NormOracle) -> PairTester<'a> {
        let generic = PairTester::Generic { pts: points, norm };
        let Some((scale, pts)) = integer_frame(points) else {
            return generic;
        };
        let coord_max = pts.iter().map(|&(x, y)| x.unsigned_abs().max(y.unsigned_abs())).max().unwrap_or(0);
        match norm {
            NormOracle::Polygon { polygon } => {
                let mut sides = Vec::with_capacity(polygon.m());
                for (n, c) in polygon.normals().iter().zip(polygon.offsets()) {
                    let g = n.x.denom().lcm(n.y.denom()).lcm(c.denom());
                    let gr = Rational::from_int(g);
                    let nx = (&n.x * &gr).numer().to_i128();
                    let ny = (&n.y * &gr).numer().to_i128();
                    let k = (c * &gr * Rational::from_int(scale.clone())).numer().to_i128();
                    match (nx, ny, k) {
                        (Some(nx), Some(ny), Some(k)) => sides.push((nx, ny, k)),
                        _ => return generic,
                    }
                }
                let nmax = sides.iter().map(|s| s.0.unsigned_abs().max(s.1.unsigned_abs())).max().unwrap_or(0);
                // |<N, Z_b - Z_a>| <= 2 * 2 * nmax * coord_max must fit
                if nmax.checked_mul(coord_max).and_then(|v| v.checked_mul(8)).is_none_or(|v| v > i128::MAX as u128) {
                    return generic;
                }
                PairTester::PolygonInt { pts, sides }
            }
            NormOracle::Euclidean => {
                let Some(d) = scale.to_i128() else { return generic };
                let fits = coord_max.checked_mul(coord_max).and_then(|v| v.checked_mul(16));
                if fits.is_none_or(|v| v > i128::MAX as u128) {
                    return generic;
                }
                PairTester::DiscInt { pts, d_sq: d * d }
            }
            NormOracle::Pnorm { .. } => generic,
        }
    }

    fn is_unit(&self, a: usize, b: usize) -> bool {
        match self {
            PairTester::PolygonInt { pts, sides } => {
                let (dx, dy) = (pts[b].0 - pts[a].0, pts[b].1 - pts[a].1);
                let mut touches = false;
                for &(nx, ny, k) in sides {
                    let v = (nx * dx + ny * dy).abs();
                    if v > k {
                        return false;
                    }
                    touches |= v == k;
                }
                touches
            }
            PairTester::DiscInt { pts, d_sq } => {
                let (dx, dy) = (pts[b].0 - pts[a].0, pts[b].1 - pts[a].1);
                dx * dx + dy * dy == *d_sq
            }
            PairTester::Generic { pts, norm } => norm.is_unit(&(&pts[b] - &pts[a])),
        }
    }
}

/// Common denominator `D` and the integer points `D·p`, if they fit.
fn integer_frame(points: &[Vec2]) -> Option<(BigInt, Vec<(i128, i128)>)> {
    let mut d = BigInt::one();
    for p in points {
        d = d.lcm(p.x.denom()).lcm(p.y.denom());
        if d.bits() > 60 {
            return None;
        }
    }
    let dr = Rational::from_int(d.clone());
    let mut pts = Vec::with_capacity(points.len());
    for p in points {
        let x = (&p.x * &dr).numer().clone();
        let y = (&p.y * &dr).numer().clone();
        if x.abs().bits() > 56 || y.abs().bits() > 56 {
            return None;
        }
        pts.push((x.to_i128()?, y.to_i128()?));
    }
    if d.is_zero() {
        return None;
    }
    Some((d, pts))
}

/// All index pairs `a < b` (0-based) at unit distance, in lexicographic order.
pub fn unit_pairs(points: &PointSeq, norm: &NormOracle, exec: Execution) -> Vec<(usize, usize)> {
    let pts = points.points();
    let tester = PairTester::new(pts, norm);
    let n = pts.len();
    exec.map_range(n, |a| ((a + 1)..n).filter(|&b| tester.is_unit(a, b)).map(|b| (a, b)).collect::<Vec<_>>())
        .into_iter()
        .flatten()
        .collect()
}

/// Decorated unit-distance graph of `points` under `norm`.
///
/// Exact for polygons, the disc and integer `p`; other ℓ_p norms use the
/// tolerance [`crate::norms::PNORM_UNIT_TOLERANCE`].
pub fn build_udg_with(points: &PointSeq, norm: &NormOracle, exec: Execution) -> DecoratedUdg {
    let pts = points.points();
    let pairs = unit_pairs(points, norm, exec);
    let canon: Vec<(Vec2, i8)> = pairs
        .iter()
        .map(|&(a, b)| canonical_direction(&(&pts[b] - &pts[a])).expect("points are distinct"))
        .collect();
    let mut dirs: Vec<Vec2> = canon.iter().map(|(u, _)| u.clone()).collect();
    dirs.sort();
    dirs.dedup();
    let decorated = pairs
        .iter()
        .zip(&canon)
        .map(|(&(a, b), (u, s))| {
            let color = dirs.binary_search(u).expect("direction listed") + 1;
            ((a + 1, b + 1), color, *s)
        })
        .collect();
    DecoratedUdg::new(pts.len(), dirs.len(), decorated, Some(dirs)).expect("built graph is valid")
}

pub fn build_udg(points: &PointSeq, b: &SymmetricPolygon) -> DecoratedUdg {
    build_udg_with(points, &NormOracle::polygon(b.clone()), Execution::default())
}

pub fn count_unit_distances_with(points: &PointSeq, norm: &NormOracle, exec: Execution) -> u64 {
    let pts = points.points();
    let tester = PairTester::new(pts, norm);
    let n = pts.len();
    exec.sum_range(n, |a| ((a + 1)..n).filter(|&b| tester.is_unit(a, b)).count() as u64)
}

pub fn count_unit_distances(points: &PointSeq, b: &SymmetricPolygon) -> u64 {
    count_unit_distances_with(points, &NormOracle::polygon(b.clone()), Execution::default())
}

/// `P` realizes `G` under `B`: same edges, colors and signs, and the same
/// directions when `G` lists them.
pub fn verify_realization(g: &DecoratedUdg, points: &PointSeq, b: &SymmetricPolygon) -> bool {
    verify_realization_with(g, points, &NormOracle::polygon(b.clone()))
}

pub fn verify_realization_with(g: &DecoratedUdg, points: &PointSeq, norm: &NormOracle) -> bool {
    if points.len() != g.n() {
        return false;
    }
    let built = build_udg_with(points, norm, Execution::default());
    if built.edges != g.edges || built.colors != g.colors || built.signs != g.signs || built.k != g.k {
        return false;
    }
    match &g.directions {
        Some(d) => built.directions.as_ref() == Some(d),
        None => true,
    }
}

/// Keep an alternating matching inside every color class.
///
/// Each class is a disjoint union of paths and cycles. A path is walked from
/// its smaller endpoint and keeps edges 1, 3, 5, ... (`⌈e/2⌉` of `e`); a
/// cycle is walked from its smallest vertex towards the smaller neighbour
/// and keeps `⌊e/2⌋`.
pub fn prune_to_proper(g: &DecoratedUdg) -> Result<DecoratedUdg, UdgError> {
    g.check_color_degrees()?;
    let mut keep = vec![false; g.edge_count()];
    let mut by_color: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &c) in g.colors.iter().enumerate() {
        by_color.entry(c).or_default().push(i);
    }
    for class in by_color.values() {
        let mut adj: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for &i in class {
            let (a, b) = g.edges[i];
            adj.entry(a).or_default().push((b, i));
            adj.entry(b).or_default().push((a, i));
        }
        for list in adj.values_mut() {
            list.sort_unstable();
        }
        let mut used = vec![false; g.edge_count()];
        let walk = |start: usize, used: &mut Vec<bool>| -> Vec<usize> {
            let mut order = Vec::new();
            let mut at = start;
            while let Some(&(next, e)) = adj[&at].iter().find(|&&(_, e)| !used[e]) {
                used[e] = true;
                order.push(e);
                at = next;
            }
            order
        };
        // paths first: start at endpoints (degree 1), smaller endpoint first
        for (&v, list) in &adj {
            if list.len() == 1 && !used[list[0].1] {
                for (pos, e) in walk(v, &mut used).into_iter().enumerate() {
                    keep[e] = pos % 2 == 0;
                }
            }
        }
        for (&v, list) in &adj {
            if list.iter().any(|&(_, e)| !used[e]) {
                let order = walk(v, &mut used);
                let len = order.len();
                for (pos, e) in order.into_iter().enumerate() {
                    keep[e] = pos % 2 == 0 && pos + 1 < len;
                }
            }
        }
    }
    Ok(g.filter_edges(|i| keep[i]))
}

/// The `±1` with `p_y - p_x = ±u_{c(e)}` when edge `e = {x, y}` is walked
/// from `x` to `y`.
pub fn traversal_sign(g: &DecoratedUdg, x: usize, y: usize) -> Option<i64> {
    let s = g.sign_of(x, y)?;
    let ascending = x < y;
    Some(if (s == 1) == ascending { 1 } else { -1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, v2};
    use crate::norms::square;

    fn four_points() -> PointSeq {
        PointSeq::new(vec![v2(0, 0), v2(1, 0), v2(2, 0), v2(1, 1)]).unwrap()
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonical_direction(&v2(1, 0)).unwrap(), (v2(1, 0), 1));
        assert_eq!(canonical_direction(&v2(1, -1)).unwrap(), (v2(-1, 1), -1));
        assert_eq!(canonical_direction(&v2(-2, 0)).unwrap(), (v2(2, 0), -1));
        assert_eq!(canonical_direction(&v2(0, 0)), Err(UdgError::ZeroVector));
    }

    #[test]
    fn four_point_example() {
        let g = build_udg(&four_points(), &square());
        assert_eq!(g.edges(), &[(1, 2), (1, 4), (2, 3), (2, 4), (3, 4)]);
        assert_eq!(g.directions().unwrap(), &[v2(-1, 1), v2(0, 1), v2(1, 0), v2(1, 1)]);
        assert_eq!(g.color_of(3, 4), Some(1));
        assert_eq!(g.sign_of(3, 4), Some(1));
        assert_eq!(g.color_of(1, 2), Some(3));
        assert_eq!(g.color_of(2, 3), Some(3));
    }

    #[test]
    fn sign_convention_and_empty_graph() {
        let g = build_udg(&PointSeq::new(vec![v2(0, 0), v2(1, -1)]).unwrap(), &square());
        assert_eq!(g.directions().unwrap(), &[v2(-1, 1)]);
        assert_eq!(g.signs(), &[-1]);
        let far = build_udg(&PointSeq::new(vec![v2(0, 0), v2(2, 0)]).unwrap(), &square());
        assert_eq!((far.edge_count(), far.k()), (0, 0));
    }

    #[test]
    fn realization_is_equality() {
        let p = four_points();
        let g = build_udg(&p, &square());
        assert!(verify_realization(&g, &p, &square()));
        assert!(verify_realization(&g.to_abstract(), &p, &square()));
        assert!(!verify_realization(&g.with_flipped_sign(0), &p, &square()));
        assert!(!verify_realization(&g.with_colors_swapped(1, 3), &p, &square()));
    }

    #[test]
    fn integer_frame_matches_generic_path() {
        let p = PointSeq::new(vec![
            Vec2::new(rat(1, 3), rat(0, 1)),
            Vec2::new(rat(4, 3), rat(1, 7)),
            Vec2::new(rat(1, 3), rat(1, 1)),
            v2(5, 5),
        ])
        .unwrap();
        let norm = NormOracle::polygon(square());
        let fast = unit_pairs(&p, &norm, Execution::Sequential);
        let pts = p.points();
        let slow: Vec<_> = (0..4)
            .flat_map(|a| ((a + 1)..4).map(move |b| (a, b)))
            .filter(|&(a, b)| square().eval(&(&pts[b] - &pts[a])) == rat(1, 1))
            .collect();
        assert_eq!(fast, slow);
        assert_eq!(fast, vec![(0, 1), (0, 2), (1, 2)]);
    }

    fn mono(n: usize, edges: &[(usize, usize)]) -> DecoratedUdg {
        DecoratedUdg::new(n, 1, edges.iter().map(|&e| (e, 1, 1)).collect(), None).unwrap()
    }

    #[test]
    fn pruning_examples() {
        let tri = prune_to_proper(&mono(3, &[(1, 2), (2, 3), (1, 3)])).unwrap();
        assert_eq!(tri.edge_count(), 1);
        let path = prune_to_proper(&mono(6, &[(1, 2), (2, 3), (3, 4), (4, 5), (5, 6)])).unwrap();
        assert_eq!(path.edges(), &[(1, 2), (3, 4), (5, 6)]);
        let proper = DecoratedUdg::new(3, 2, vec![((1, 2), 1, 1), ((2, 3), 2, -1)], None).unwrap();
        assert_eq!(prune_to_proper(&proper).unwrap(), proper);
        let star = mono(4, &[(1, 2), (1, 3), (1, 4)]);
        assert!(matches!(prune_to_proper(&star), Err(UdgError::ColorDegree { vertex: 1, .. })));
    }

    #[test]
    fn json_round_trip() {
        let g = build_udg(&four_points(), &square());
        let js = serde_json::to_string(&g).unwrap();
        assert!(js.contains(r#""color":{"1-2":3"#));
        assert_eq!(serde_json::from_str::<DecoratedUdg>(&js).unwrap(), g);
        let abs = serde_json::to_string(&g.to_abstract()).unwrap();
        assert!(!abs.contains("directions"));
    }
}
