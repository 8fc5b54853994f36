//! Point sets realizing the classical lower bounds, plus small test corpora.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::linalg::{Rational, Vec2};
use crate::norms::SymmetricPolygon;

/// A sequence of pairwise distinct points `p_1 .. p_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PointSeqRepr", into = "PointSeqRepr")]
pub struct PointSeq {
    points: Vec<Vec2>,
}

#[derive(Serialize, Deserialize)]
struct PointSeqRepr {
    points: Vec<Vec2>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstructionError {
    #[error("a point sequence needs at least one point")]
    Empty,
    #[error("points {0} and {1} coincide")]
    Duplicate(usize, usize),
    #[error("subset sums of subsets {0:#b} and {1:#b} coincide")]
    SumCollision(u64, u64),
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("could not place generic unit vector {0}")]
    NoGenericVector(usize),
}

impl PointSeq {
    pub fn new(points: Vec<Vec2>) -> Result<Self, ConstructionError> {
        if points.is_empty() {
            return Err(ConstructionError::Empty);
        }
        let mut seen = std::collections::HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if let Some(j) = seen.insert(p, i) {
                return Err(ConstructionError::Duplicate(j, i));
            }
        }
        Ok(PointSeq { points })
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Every point shifted by `shift`.
    pub fn translate(&self, shift: &Vec2) -> PointSeq {
        PointSeq { points: self.points.iter().map(|p| p + shift).collect() }
    }

    /// Every point multiplied by a nonzero scalar.
    pub fn scale(&self, k: &Rational) -> PointSeq {
        assert!(!k.is_zero(), "scaling a point sequence by zero");
        PointSeq { points: self.points.iter().map(|p| p.scale(k)).collect() }
    }
}

impl From<PointSeq> for PointSeqRepr {
    fn from(p: PointSeq) -> Self {
        PointSeqRepr { points: p.points }
    }
}

impl TryFrom<PointSeqRepr> for PointSeq {
    type Error = ConstructionError;
    fn try_from(r: PointSeqRepr) -> Result<Self, Self::Error> {
        PointSeq::new(r.points)
    }
}

/// All `2^k` subset sums `sum_{i in S} v_i`, listed by the bitmask of `S`
/// (bit `i` selects `v_{i+1}`).
pub fn subset_sum_pointset(vectors: &[Vec2]) -> Result<PointSeq, ConstructionError> {
    let k = vectors.len();
    if k >= 32 {
        return Err(ConstructionError::BadParameter(format!("k = {k} is too large")));
    }
    let mut sums: Vec<Vec2> = Vec::with_capacity(1 << k);
    sums.push(Vec2::zero());
    for v in vectors {
        let grown: Vec<Vec2> = sums.iter().map(|s| s + v).collect();
        sums.extend(grown);
    }
    let mut seen = std::collections::HashMap::with_capacity(sums.len());
    for (mask, s) in sums.iter().enumerate() {
        if let Some(prev) = seen.insert(s, mask) {
            return Err(ConstructionError::SumCollision(prev as u64, mask as u64));
        }
    }
    Ok(PointSeq { points: sums })
}

/// `⌊n/2⌋` points `(j/n, 0)` and `⌈n/2⌉` points `(j/n, 1)`. Under the
/// coordinate-max norm every bottom-top pair is at distance exactly 1.
pub fn flat_side_quadratic(n: usize) -> Result<PointSeq, ConstructionError> {
    if n < 2 {
        return Err(ConstructionError::BadParameter(format!("n = {n} < 2")));
    }
    let bottom = n / 2;
    let top = n - bottom;
    let x = |j: usize| Rational::new(j as i64, n as i64);
    let mut points = Vec::with_capacity(n);
    points.extend((0..bottom).map(|j| Vec2::new(x(j), Rational::zero())));
    points.extend((0..top).map(|j| Vec2::new(x(j), Rational::one())));
    Ok(PointSeq { points })
}

/// `w × h` grid `(i·step, j·step)`, x varying fastest.
pub fn grid_pointset(w: usize, h: usize, step: &Rational) -> Result<PointSeq, ConstructionError> {
    if w == 0 || h == 0 || !step.is_positive() {
        return Err(ConstructionError::BadParameter(format!("grid {w}x{h} with step {step}")));
    }
    let points = (0..h)
        .flat_map(|j| (0..w).map(move |i| (i, j)))
        .map(|(i, j)| Vec2::new(step * &Rational::from_int(i as i64), step * &Rational::from_int(j as i64)))
        .collect();
    Ok(PointSeq { points })
}

/// `X = { j·step·(b - a) : j < n }` and `Y = X + (a + b)/2` for side `[a, b]`
/// of `poly`. Every `y_j - x_i` lies on that side, so `X × Y` is a complete
/// bipartite unit-distance graph whose colors are the differences `j - i`.
/// Needs `(n - 1)·step < 1/2`.
pub fn side_cluster_pointset(
    poly: &SymmetricPolygon,
    side: usize,
    n: usize,
    step: &Rational,
) -> Result<PointSeq, ConstructionError> {
    let reach = step * &Rational::from_int(n as i64 - 1);
    if n == 0 || side >= 2 * poly.m() || !step.is_positive() || reach >= Rational::new(1, 2) {
        return Err(ConstructionError::BadParameter(format!("side {side}, n = {n}, step {step}")));
    }
    let (a, b) = poly.side_endpoints(side);
    let d = (b - a).scale(step);
    let mid = a + &(b - a).scale(&Rational::new(1, 2));
    let xs: Vec<Vec2> = (0..n).map(|j| d.scale(&Rational::from_int(j as i64))).collect();
    let ys: Vec<Vec2> = xs.iter().map(|x| x + &mid).collect();
    PointSeq::new(xs.into_iter().chain(ys).collect())
}

/// Denominator of the side parameters used by [`generic_unit_vectors`].
const PARAM_DENOM: i64 = 128;

/// `k` unit vectors of `poly` in general position: every signed sum
/// `sum e_i v_i` with `e in {-1,0,1}^k` and at least two nonzero entries is
/// nonzero and not a unit vector. Each vector is a point `a + (j/128)(b - a)`
/// strictly inside a side `[a, b]`; the side and `j` follow a fixed schedule
/// and are bumped deterministically whenever the check fails.
///
/// Under such vectors the subset-sum set has exactly `k·2^(k-1)` unit pairs.
pub fn generic_unit_vectors(poly: &SymmetricPolygon, k: usize) -> Result<Vec<Vec2>, ConstructionError> {
    let sides = 2 * poly.m();
    let one = Rational::one();
    let mut chosen: Vec<Vec2> = Vec::with_capacity(k);
    // signed sums of the chosen vectors, all of {-1,0,1}^i
    let mut sums: Vec<Vec2> = vec![Vec2::zero()];
    let mut seen: HashSet<Vec2> = HashSet::new();
    for i in 0..k {
        let mut side = (3 * i + 1) % sides;
        let mut j = ((37 * i * (i + 3) + 17) % (PARAM_DENOM as usize - 1)) as i64 | 1;
        let mut placed = None;
        for attempt in 0..4 * PARAM_DENOM {
            let (a, b) = poly.side_endpoints(side);
            let v = a + &(b - a).scale(&Rational::new(j, PARAM_DENOM));
            let clash = sums.iter().any(|s| {
                let w = s + &v;
                !s.is_zero() && (w.is_zero() || poly.eval(&w) == one)
            });
            if !clash {
                placed = Some(v);
                break;
            }
            j += 2;
            if j >= PARAM_DENOM {
                j = 1 + (attempt % 2);
                side = (side + 1) % sides;
            }
        }
        let v = placed.ok_or(ConstructionError::NoGenericVector(i))?;
        let mut next = Vec::with_capacity(sums.len() * 3);
        for s in &sums {
            next.push(s - &v);
            next.push(s.clone());
            next.push(s + &v);
        }
        seen.clear();
        sums = next.into_iter().filter(|s| seen.insert(s.clone())).collect();
        chosen.push(v);
    }
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, v2};
    use crate::norms::{pythagorean_polygon, square};

    #[test]
    fn small_examples() {
        let p = subset_sum_pointset(&[v2(1, 0)]).unwrap();
        assert_eq!(p.points(), &[v2(0, 0), v2(1, 0)]);
        assert_eq!(flat_side_quadratic(4).unwrap().len(), 4);
        assert_eq!(grid_pointset(1, 1, &rat(1, 1)).unwrap().points(), &[v2(0, 0)]);
        assert_eq!(grid_pointset(3, 2, &rat(1, 2)).unwrap().points()[4], Vec2::new(rat(1, 2), rat(1, 2)));
    }

    #[test]
    fn side_cluster_is_complete_bipartite() {
        let sq = square();
        let p = side_cluster_pointset(&sq, 0, 4, &rat(1, 10)).unwrap();
        assert_eq!(p.len(), 8);
        let g = crate::udg::build_udg(&p, &sq);
        assert_eq!(g.edge_count(), 16);
        assert_eq!(g.k(), 7);
        assert!(side_cluster_pointset(&sq, 0, 6, &rat(1, 10)).is_err());
    }

    #[test]
    fn collisions_are_rejected() {
        let err = subset_sum_pointset(&[v2(1, 0), v2(0, 1), v2(1, 1)]).unwrap_err();
        assert_eq!(err, ConstructionError::SumCollision(0b011, 0b100));
        assert_eq!(PointSeq::new(vec![v2(0, 0), v2(0, 0)]), Err(ConstructionError::Duplicate(0, 1)));
        assert!(flat_side_quadratic(1).is_err());
    }

    #[test]
    fn generic_vectors_are_unit_and_prefix_stable() {
        let sq = square();
        for v in &generic_unit_vectors(&sq, 3).unwrap() {
            assert_eq!(sq.eval(v), rat(1, 1));
        }
        let p = pythagorean_polygon();
        let vs = generic_unit_vectors(&p, 6).unwrap();
        for v in &vs {
            assert_eq!(p.eval(v), rat(1, 1));
        }
        assert_eq!(generic_unit_vectors(&p, 4).unwrap(), vs[..4].to_vec());
    }

    #[test]
    fn json_validates_distinctness() {
        let js = r#"{"points":[["0","0"],["1/2","1"]]}"#;
        let p: PointSeq = serde_json::from_str(js).unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), js);
        assert!(serde_json::from_str::<PointSeq>(r#"{"points":[["0","0"],["0","0"]]}"#).is_err());
        assert!(serde_json::from_str::<PointSeq>(r#"{"points":[]}"#).is_err());
    }
}
