use serde::{Deserialize, Serialize};

use crate::linalg::{Rational, Vec2};
use crate::norms::{ConvexPolygon, SymmetricPolygon};

/// The piece of `B_out \ B_in` over side `k`: inner side `k` plus outer
/// side `k`, joined through corresponding vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trapezoid {
    pub side: usize,
    /// `in(k-1), in(k), out(k), out(k-1)`.
    pub corners: [Vec2; 4],
}

impl Trapezoid {
    pub fn region(&self) -> ConvexPolygon {
        ConvexPolygon::hull(&self.corners)
    }

    pub fn area2(&self) -> Rational {
        self.region().area2()
    }

    pub fn contains(&self, u: &Vec2) -> bool {
        self.region().contains(u)
    }
}

pub fn trapezoids(inner: &SymmetricPolygon, outer: &SymmetricPolygon) -> Vec<Trapezoid> {
    assert_eq!(inner.m(), outer.m(), "polygons from different families");
    (0..2 * inner.m())
        .map(|k| {
            let (a, b) = inner.side_endpoints(k);
            let (c, d) = outer.side_endpoints(k);
            Trapezoid { side: k, corners: [a.clone(), b.clone(), d.clone(), c.clone()] }
        })
        .collect()
}

/// Smallest side index whose trapezoid contains `u`.
pub fn trapezoid_of(traps: &[Trapezoid], u: &Vec2) -> Option<usize> {
    traps.iter().position(|t| t.contains(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, v2};
    use crate::norms::square;

    #[test]
    fn square_frame_tiles() {
        let sq = square();
        let inner = sq.offset(&[rat(0, 1), rat(0, 1)]).unwrap();
        let outer = sq.offset(&[rat(1, 1), rat(1, 1)]).unwrap();
        let traps = trapezoids(&inner, &outer);
        let total: Rational = traps.iter().map(Trapezoid::area2).sum();
        assert_eq!(total, outer.area2() - inner.area2());
        // the corner (3/2, 3/2) is shared; ties go to the smaller side
        let k = trapezoid_of(&traps, &v2(3, 3).scale(&rat(1, 2))).unwrap();
        assert!(traps[k].contains(&Vec2::new(rat(3, 2), rat(3, 2))));
        assert_eq!(trapezoid_of(&traps, &v2(0, 0)), None);
    }
}
