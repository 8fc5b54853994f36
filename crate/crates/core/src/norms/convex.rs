use serde::{Deserialize, Serialize};

use crate::linalg::{Rational, Vec2};

/// Convex polygon in vertex form, counter-clockwise, no repeated or collinear
/// vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
}

impl ConvexPolygon {
    /// Convex hull of a point set (Andrew's monotone chain, exact).
    pub fn hull(points: &[Vec2]) -> ConvexPolygon {
        let mut pts: Vec<Vec2> = points.to_vec();
        pts.sort();
        pts.dedup();
        if pts.len() < 3 {
            return ConvexPolygon { vertices: pts };
        }
        let turn = |a: &Vec2, b: &Vec2, c: &Vec2| (b - a).cross(&(c - a));
        let mut lower: Vec<Vec2> = Vec::new();
        for p in &pts {
            while lower.len() >= 2
                && !turn(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive()
            {
                lower.pop();
            }
            lower.push(p.clone());
        }
        let mut upper: Vec<Vec2> = Vec::new();
        for p in pts.iter().rev() {
            while upper.len() >= 2
                && !turn(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive()
            {
                upper.pop();
            }
            upper.push(p.clone());
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        ConvexPolygon { vertices: lower }
    }

    /// Trusts the caller: vertices must already be convex and CCW.
    pub(crate) fn from_ccw_unchecked(vertices: Vec<Vec2>) -> ConvexPolygon {
        ConvexPolygon { vertices }
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Directed edges `(v_k, v_{k+1})`.
    pub fn edges(&self) -> impl Iterator<Item = (&Vec2, &Vec2)> {
        let n = self.vertices.len();
        (0..n).map(move |k| (&self.vertices[k], &self.vertices[(k + 1) % n]))
    }

    /// Closed containment.
    pub fn contains(&self, p: &Vec2) -> bool {
        if self.vertices.len() < 3 {
            return false;
        }
        self.edges().all(|(a, b)| !(b - a).cross(&(p - a)).is_negative())
    }

    /// Twice the signed area.
    pub fn area2(&self) -> Rational {
        self.edges().map(|(a, b)| a.cross(b)).sum()
    }

    /// `max_v <v, dir>`.
    pub fn support(&self, dir: &Vec2) -> Rational {
        self.vertices
            .iter()
            .map(|v| v.dot(dir))
            .max()
            .expect("support of an empty polygon")
    }

    /// Squared Euclidean distance from `p` to the polygon (zero inside).
    pub fn dist_sq(&self, p: &Vec2) -> Rational {
        if self.contains(p) {
            return Rational::zero();
        }
        self.edges()
            .map(|(a, b)| p.dist_sq_to_segment(a, b))
            .min()
            .expect("distance to an empty polygon")
    }

    /// Intersection with `{ z : <normal, z> <= offset }` (Sutherland-Hodgman
    /// against one half-plane).
    pub fn clip(&self, normal: &Vec2, offset: &Rational) -> ConvexPolygon {
        let n = self.vertices.len();
        let mut out: Vec<Vec2> = Vec::with_capacity(n + 1);
        for k in 0..n {
            let a = &self.vertices[k];
            let b = &self.vertices[(k + 1) % n];
            let fa = normal.dot(a) - offset;
            let fb = normal.dot(b) - offset;
            if !fa.is_positive() {
                out.push(a.clone());
            }
            if (fa.is_negative() && fb.is_positive()) || (fa.is_positive() && fb.is_negative()) {
                let s = &fa / &(&fa - &fb);
                out.push(a + &(b - a).scale(&s));
            }
        }
        ConvexPolygon::hull(&out)
    }

    /// Exact squared one-sided Hausdorff distance `sup_{a in self} d(a, other)^2`.
    /// For convex bodies the supremum is attained at a vertex.
    pub fn directed_hausdorff_sq(&self, other: &ConvexPolygon) -> Rational {
        self.vertices
            .iter()
            .map(|v| other.dist_sq(v))
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Exact squared Hausdorff distance.
    pub fn hausdorff_sq(&self, other: &ConvexPolygon) -> Rational {
        self.directed_hausdorff_sq(other)
            .max(other.directed_hausdorff_sq(self))
    }

    /// Every vertex of `inner` lies in `self`.
    pub fn contains_polygon(&self, inner: &ConvexPolygon) -> bool {
        inner.vertices.iter().all(|v| self.contains(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, v2};

    fn square(r: i64) -> ConvexPolygon {
        ConvexPolygon::hull(&[v2(r, r), v2(-r, r), v2(-r, -r), v2(r, -r)])
    }

    #[test]
    fn hull_drops_interior_and_collinear_points() {
        let h = ConvexPolygon::hull(&[v2(0, 0), v2(2, 0), v2(1, 0), v2(2, 2), v2(0, 2), v2(1, 1)]);
        assert_eq!(h.len(), 4);
        assert_eq!(h.area2(), rat(8, 1));
    }

    #[test]
    fn clip_square() {
        let c = square(1).clip(&v2(1, 1), &rat(1, 1));
        // cut off the corner (1,1)
        assert_eq!(c.len(), 5);
        assert!(!c.contains(&v2(1, 1)));
        assert!(c.contains(&v2(1, 0)));
    }

    #[test]
    fn nested_squares_distance() {
        let a = square(1);
        let b = square(2);
        assert_eq!(a.hausdorff_sq(&b), rat(2, 1));
        assert_eq!(a.directed_hausdorff_sq(&b), rat(0, 1));
        assert!(b.contains_polygon(&a));
    }
}
