use serde::{Deserialize, Serialize};

use super::{AngleBound, ConvexPolygon};
use crate::linalg::{RatInterval, Rational, Vec2};

/// A 0-symmetric convex 2m-gon `{ z : |<n_i, z>| <= c_i }`.
///
/// Side `k` in `0..2m` is the line `<s_k n_{k mod m}, z> = c_{k mod m}` with
/// `s_k = +1` for `k < m` and `-1` otherwise, so side `k + m` is the mirror of
/// side `k`. Normals are listed in a strictly monotone angular order over a
/// half-turn (either orientation) and every side has positive length.
///
/// Vertex `k` is the intersection of sides `k` and `k + 1`; side `k` runs
/// from vertex `k - 1` to vertex `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PolygonRepr", into = "PolygonRepr")]
pub struct SymmetricPolygon {
    normals: Vec<Vec2>,
    offsets: Vec<Rational>,
    /// +1 when the normals turn counter-clockwise, -1 otherwise.
    orientation: i32,
    vertices: Vec<Vec2>,
}

#[derive(Serialize, Deserialize)]
struct PolygonRepr {
    m: usize,
    normals: Vec<Vec2>,
    offsets: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolygonError {
    #[error("a symmetric polygon needs at least 2 side pairs, got {0}")]
    TooFewSides(usize),
    #[error("declared m = {declared} but {normals} normals and {offsets} offsets given")]
    LengthMismatch { declared: usize, normals: usize, offsets: usize },
    #[error("offset {0} is not positive (0 must be interior)")]
    NonPositiveOffset(usize),
    #[error("normal {0} is zero")]
    ZeroNormal(usize),
    #[error("normals are not in strictly monotone angular order over a half-turn at index {0}")]
    NotAngularOrder(usize),
    #[error("side {0} is not facet-defining")]
    RedundantSide(usize),
    #[error("offset vector has length {got}, expected {expected}")]
    OffsetLength { expected: usize, got: usize },
    #[error("vertex list is not a 0-symmetric convex polygon")]
    NotSymmetric,
}

/// Per-side-pair offsets `t`, in the functional scale of `<n_i, .>`.
pub type OffsetVector = Vec<Rational>;

impl SymmetricPolygon {
    pub fn new(normals: Vec<Vec2>, offsets: Vec<Rational>) -> Result<Self, PolygonError> {
        let m = normals.len();
        if offsets.len() != m {
            return Err(PolygonError::LengthMismatch { declared: m, normals: m, offsets: offsets.len() });
        }
        if m < 2 {
            return Err(PolygonError::TooFewSides(m));
        }
        if let Some(i) = normals.iter().position(Vec2::is_zero) {
            return Err(PolygonError::ZeroNormal(i));
        }
        if let Some(i) = offsets.iter().position(|c| !c.is_positive()) {
            return Err(PolygonError::NonPositiveOffset(i));
        }
        let orientation = normals[0].cross(&normals[1]).signum();
        if orientation == 0 {
            return Err(PolygonError::NotAngularOrder(1));
        }
        for i in 1..m {
            let from_first = normals[0].cross(&normals[i]).signum();
            let step = normals[i - 1].cross(&normals[i]).signum();
            if from_first != orientation || step != orientation {
                return Err(PolygonError::NotAngularOrder(i));
            }
        }
        let vertices = compute_vertices(&normals, &offsets);
        let poly = SymmetricPolygon { normals, offsets, orientation, vertices };
        for k in 0..2 * m {
            let (a, b) = poly.side_endpoints(k);
            let along = poly.side_normal(k).perp().scale(&Rational::from_int(poly.orientation));
            if !(b - a).dot(&along).is_positive() {
                return Err(PolygonError::RedundantSide(k));
            }
        }
        Ok(poly)
    }

    /// Rebuild from a 0-symmetric convex vertex list (any order, duplicates
    /// and collinear points allowed). Offsets are normalized to 1.
    pub fn from_points(points: &[Vec2]) -> Result<Self, PolygonError> {
        let hull = ConvexPolygon::hull(points);
        let w = hull.vertices();
        let n = w.len();
        if n < 4 || !n.is_multiple_of(2) {
            return Err(PolygonError::NotSymmetric);
        }
        let m = n / 2;
        if (0..m).any(|k| w[k + m] != -&w[k]) {
            return Err(PolygonError::NotSymmetric);
        }
        let mut normals = Vec::with_capacity(m);
        let mut offsets = Vec::with_capacity(m);
        for k in 0..m {
            let d = &w[k + 1] - &w[k];
            let normal = Vec2::new(d.y.clone(), -&d.x);
            let c = normal.dot(&w[k]);
            if !c.is_positive() {
                return Err(PolygonError::NotSymmetric);
            }
            normals.push(normal.scale(&c.recip()));
            offsets.push(Rational::one());
        }
        SymmetricPolygon::new(normals, offsets)
    }

    pub fn m(&self) -> usize {
        self.normals.len()
    }

    pub fn normals(&self) -> &[Vec2] {
        &self.normals
    }

    pub fn offsets(&self) -> &[Rational] {
        &self.offsets
    }

    pub fn orientation(&self) -> i32 {
        self.orientation
    }

    /// The 2m vertices; vertex `k` joins sides `k` and `k + 1`.
    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    /// Outward normal of side `k in 0..2m`.
    pub fn side_normal(&self, k: usize) -> Vec2 {
        let m = self.m();
        if k < m {
            self.normals[k].clone()
        } else {
            -&self.normals[k - m]
        }
    }

    pub fn side_offset(&self, k: usize) -> &Rational {
        &self.offsets[k % self.m()]
    }

    /// `(start, end)` of side `k`.
    pub fn side_endpoints(&self, k: usize) -> (&Vec2, &Vec2) {
        let n = self.vertices.len();
        (&self.vertices[(k + n - 1) % n], &self.vertices[k])
    }

    /// Gauge functional `max_i |<n_i, z>| / c_i`.
    pub fn eval(&self, z: &Vec2) -> Rational {
        self.normals
            .iter()
            .zip(&self.offsets)
            .map(|(n, c)| n.dot(z).abs() / c)
            .max()
            .expect("polygon without sides")
    }

    pub fn contains(&self, z: &Vec2) -> bool {
        self.normals
            .iter()
            .zip(&self.offsets)
            .all(|(n, c)| &n.dot(z).abs() <= c)
    }

    pub fn support(&self, dir: &Vec2) -> Rational {
        self.vertices.iter().map(|v| v.dot(dir)).max().expect("empty polygon")
    }

    /// Polygon bounded by the side lines moved to offsets `c_i + t_i`.
    pub fn offset(&self, t: &[Rational]) -> Result<SymmetricPolygon, PolygonError> {
        if t.len() != self.m() {
            return Err(PolygonError::OffsetLength { expected: self.m(), got: t.len() });
        }
        let offsets = self.offsets.iter().zip(t).map(|(c, ti)| c + ti).collect();
        SymmetricPolygon::new(self.normals.clone(), offsets)
    }

    pub fn to_convex(&self) -> ConvexPolygon {
        let mut v = self.vertices.clone();
        if self.orientation < 0 {
            v.reverse();
        }
        ConvexPolygon::from_ccw_unchecked(v)
    }

    /// No two lines through 0 at angle ≥ η meet the same side, i.e. every
    /// side subtends an angle strictly below η.
    pub fn is_eta_short(&self, eta: &AngleBound) -> bool {
        (0..2 * self.m()).all(|k| {
            let (a, b) = self.side_endpoints(k);
            eta.ray_angle_below(a, b)
        })
    }

    /// A rational upper bound on `max_i ||n_i||_2`.
    pub fn max_normal_length_upper(&self) -> Rational {
        self.normals
            .iter()
            .map(|n| n.norm_sq().sqrt_upper(40))
            .max()
            .expect("empty polygon")
    }

    pub fn area2(&self) -> Rational {
        self.to_convex().area2()
    }
}

fn compute_vertices(normals: &[Vec2], offsets: &[Rational]) -> Vec<Vec2> {
    let m = normals.len();
    let line = |k: usize| {
        if k < m {
            (normals[k].clone(), offsets[k].clone())
        } else {
            (-&normals[k - m], offsets[k - m].clone())
        }
    };
    (0..2 * m)
        .map(|k| {
            let (a, alpha) = line(k);
            let (b, beta) = line((k + 1) % (2 * m));
            intersect_lines(&a, &alpha, &b, &beta)
        })
        .collect()
}

/// Intersection of `<a, z> = alpha` and `<b, z> = beta` (non-parallel).
pub(crate) fn intersect_lines(a: &Vec2, alpha: &Rational, b: &Vec2, beta: &Rational) -> Vec2 {
    let det = a.cross(b);
    assert!(!det.is_zero(), "parallel side lines");
    let x = (alpha * &b.y - beta * &a.y) / &det;
    let y = (&a.x * beta - &b.x * alpha) / &det;
    Vec2::new(x, y)
}

/// Standard two-sided Hausdorff distance under the Euclidean metric, as an
/// exact enclosing interval of width at most `2^-32`.
pub fn hausdorff(a: &SymmetricPolygon, b: &SymmetricPolygon) -> RatInterval {
    hausdorff_convex(&a.to_convex(), &b.to_convex())
}

pub fn hausdorff_convex(a: &ConvexPolygon, b: &ConvexPolygon) -> RatInterval {
    RatInterval::sqrt_of(&a.hausdorff_sq(b), 32)
}

impl From<SymmetricPolygon> for PolygonRepr {
    fn from(p: SymmetricPolygon) -> Self {
        PolygonRepr { m: p.m(), normals: p.normals, offsets: p.offsets }
    }
}

impl TryFrom<PolygonRepr> for SymmetricPolygon {
    type Error = PolygonError;
    fn try_from(r: PolygonRepr) -> Result<Self, Self::Error> {
        if r.normals.len() != r.m || r.offsets.len() != r.m {
            return Err(PolygonError::LengthMismatch {
                declared: r.m,
                normals: r.normals.len(),
                offsets: r.offsets.len(),
            });
        }
        SymmetricPolygon::new(r.normals, r.offsets)
    }
}

/// Coordinate-max unit ball `[-1, 1]^2`.
pub fn square() -> SymmetricPolygon {
    SymmetricPolygon::new(vec![Vec2::from_ints(1, 0), Vec2::from_ints(0, 1)], vec![Rational::one(); 2])
        .expect("square is valid")
}

/// Regular-ish polygon with `2m` vertices on rational points of the unit
/// circle (angles `k*pi/m`, rationalized through the half-angle tangent).
pub fn rational_regular(m: usize) -> SymmetricPolygon {
    let mut pts: Vec<Vec2> = (0..m)
        .map(|k| rational_unit_vector(std::f64::consts::PI * k as f64 / m as f64))
        .collect();
    let mirrored: Vec<Vec2> = pts.iter().map(|p| -p).collect();
    pts.extend(mirrored);
    SymmetricPolygon::from_points(&pts).expect("regular polygon is valid")
}

/// Octagon through `(1, 0)`, `(7/10, 7/10)`, `(0, 1)`, `(-7/10, 7/10)` and
/// the negatives.
pub fn small_octagon() -> SymmetricPolygon {
    from_half_points(&[(1, 1, 0, 1), (7, 10, 7, 10), (0, 1, 1, 1), (-7, 10, 7, 10)])
}

/// 12-gon through `(1, 0)`, `(7/8, 1/2)`, `(1/2, 7/8)`, `(0, 1)`,
/// `(-1/2, 7/8)`, `(-7/8, 1/2)` and the negatives.
pub fn small_dodecagon() -> SymmetricPolygon {
    from_half_points(&[(1, 1, 0, 1), (7, 8, 1, 2), (1, 2, 7, 8), (0, 1, 1, 1), (-1, 2, 7, 8), (-7, 8, 1, 2)])
}

fn from_half_points(half: &[(i64, i64, i64, i64)]) -> SymmetricPolygon {
    let mut pts: Vec<Vec2> = half.iter().map(|&(a, b, c, d)| Vec2::new(Rational::new(a, b), Rational::new(c, d))).collect();
    let neg: Vec<Vec2> = pts.iter().map(|p| -p).collect();
    pts.extend(neg);
    SymmetricPolygon::from_points(&pts).expect("listed points are in convex position")
}

/// The 20-gon through the Pythagorean points `(1,0), (12/13,5/13),
/// (4/5,3/5), (3/5,4/5), (5/13,12/13)`, their reflections in the diagonal
/// and the y-axis, and the negatives. Coordinates have denominator dividing 65.
pub fn pythagorean_polygon() -> SymmetricPolygon {
    let base = [(1, 1, 0, 1), (12, 13, 5, 13), (4, 5, 3, 5)];
    let mut pts = Vec::new();
    for &(a, b, c, d) in &base {
        let p = Vec2::new(Rational::new(a, b), Rational::new(c, d));
        let q = Vec2::new(p.y.clone(), p.x.clone());
        for v in [p, q] {
            let mirrored = Vec2::new(-&v.x, v.y.clone());
            pts.push(-&v);
            pts.push(-&mirrored);
            pts.push(mirrored);
            pts.push(v);
        }
    }
    SymmetricPolygon::from_points(&pts).expect("Pythagorean polygon is valid")
}

/// A rational point on the unit circle near angle `theta`.
pub fn rational_unit_vector(theta: f64) -> Vec2 {
    use std::f64::consts::PI;
    // Reduce to (-pi/2, pi/2] so the half-angle tangent stays in (-1, 1].
    let mut th = theta.rem_euclid(2.0 * PI);
    let mut flip = false;
    if th > PI / 2.0 && th <= 3.0 * PI / 2.0 {
        th -= PI;
        flip = true;
    } else if th > 3.0 * PI / 2.0 {
        th -= 2.0 * PI;
    }
    let s = Rational::from_f64_dyadic((th / 2.0).tan(), 20);
    let s2 = s.square();
    let den = Rational::one() + &s2;
    let v = Vec2::new((Rational::one() - &s2) / &den, Rational::from_int(2) * &s / &den);
    if flip {
        -v
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, v2};

    fn diamond() -> SymmetricPolygon {
        SymmetricPolygon::new(vec![v2(1, 1), v2(-1, 1)], vec![rat(1, 1), rat(1, 1)]).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(square().eval(&Vec2::new(rat(3, 1), rat(1, 2))), rat(3, 1));
        assert_eq!(square().eval(&Vec2::zero()), rat(0, 1));
        assert_eq!(diamond().eval(&v2(1, 1)), rat(2, 1));
    }

    #[test]
    fn square_vertices() {
        let s = square();
        assert_eq!(s.vertices(), &[v2(1, 1), v2(-1, 1), v2(-1, -1), v2(1, -1)]);
        assert_eq!(s.area2(), rat(8, 1));
        assert_eq!(s.side_endpoints(0), (&v2(1, -1), &v2(1, 1)));
    }

    #[test]
    fn clockwise_orientation_is_accepted() {
        let cw = SymmetricPolygon::new(vec![v2(0, 1), v2(1, 0)], vec![rat(1, 1), rat(1, 1)]).unwrap();
        assert_eq!(cw.orientation(), -1);
        assert_eq!(cw.area2(), rat(8, 1));
        assert_eq!(cw.eval(&v2(2, 1)), rat(2, 1));
    }

    #[test]
    fn validation_errors() {
        assert_eq!(
            SymmetricPolygon::new(vec![v2(1, 0)], vec![rat(1, 1)]),
            Err(PolygonError::TooFewSides(1))
        );
        assert_eq!(
            SymmetricPolygon::new(vec![v2(1, 0), v2(0, 1)], vec![rat(1, 1), rat(0, 1)]),
            Err(PolygonError::NonPositiveOffset(1))
        );
        assert_eq!(
            SymmetricPolygon::new(vec![v2(1, 0), v2(2, 0)], vec![rat(1, 1), rat(1, 1)]),
            Err(PolygonError::NotAngularOrder(1))
        );
        // (1,1) side with offset 5 never touches the unit square corners
        assert!(matches!(
            SymmetricPolygon::new(vec![v2(1, 0), v2(1, 1), v2(0, 1)], vec![rat(1, 1), rat(5, 1), rat(1, 1)]),
            Err(PolygonError::RedundantSide(_))
        ));
        // winding more than a half-turn
        assert!(matches!(
            SymmetricPolygon::new(
                vec![v2(1, 0), v2(-1, 1), v2(-1, -1), v2(1, 1)],
                vec![rat(1, 1); 4]
            ),
            Err(PolygonError::NotAngularOrder(_))
        ));
    }

    #[test]
    fn offsetting() {
        let s = square();
        assert_eq!(s.offset(&[rat(0, 1), rat(0, 1)]).unwrap(), s);
        let big = s.offset(&[rat(1, 10), rat(1, 10)]).unwrap();
        assert_eq!(big.vertices()[0], Vec2::new(rat(11, 10), rat(11, 10)));
        assert!(matches!(s.offset(&[rat(0, 1)]), Err(PolygonError::OffsetLength { .. })));
    }

    #[test]
    fn hausdorff_examples() {
        let a = square();
        assert_eq!(hausdorff(&a, &a), RatInterval::point(rat(0, 1)));
        let b = a.offset(&[rat(1, 1), rat(1, 1)]).unwrap();
        let d = hausdorff(&a, &b);
        assert!(d.contains(&rat(141_421, 100_000)) || d.lo > rat(141_421, 100_000));
        assert!(d.hi < rat(141_422, 100_000));
        // diamond vs square: corner (1,1) to (1/2,1/2)
        let dd = hausdorff(&diamond(), &a);
        assert!(dd.lo <= rat(70_711, 100_000) && dd.hi >= rat(70_710, 100_000));
        assert!(d.width() <= rat(1, 1_000_000_000));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let s = square();
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(js, r#"{"m":2,"normals":[["1","0"],["0","1"]],"offsets":["1","1"]}"#);
        assert_eq!(serde_json::from_str::<SymmetricPolygon>(&js).unwrap(), s);
        let bad = r#"{"m":3,"normals":[["1","0"],["0","1"]],"offsets":["1","1"]}"#;
        assert!(serde_json::from_str::<SymmetricPolygon>(bad).is_err());
    }

    #[test]
    fn pythagorean_polygon_has_ten_side_pairs() {
        let p = pythagorean_polygon();
        assert_eq!(p.m(), 10);
        assert_eq!(small_octagon().m(), 4);
        assert_eq!(small_dodecagon().m(), 6);
        assert!(p.vertices().iter().all(|v| v.norm_sq() == rat(1, 1)));
    }

    #[test]
    fn regular_polygons_are_valid_and_symmetric() {
        for m in [2, 3, 4, 6, 12] {
            let p = rational_regular(m);
            assert_eq!(p.m(), m);
            for v in p.vertices() {
                assert_eq!(p.eval(v), rat(1, 1));
                assert_eq!(v.norm_sq(), rat(1, 1));
            }
        }
    }
}
