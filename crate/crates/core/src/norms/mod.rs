//! Planar norms: exact symmetric polygons, the analytic ℓ_p family, offset
//! bodies `B1(t)` and Hausdorff distances.

mod angle;
mod approx;
mod convex;
mod oracle;
mod polygon;

pub use angle::{AngleBound, AngleBoundError};
pub use approx::{box_corners_ok, choose_delta0, polygon_approx, polygon_approx_capped, ApproxError, DEFAULT_MAX_SIDE_PAIRS};
pub use convex::ConvexPolygon;
pub use oracle::{DistanceBound, NormOracle, OracleError, UnitNorm, PNORM_UNIT_TOLERANCE};
pub(crate) use polygon::intersect_lines;
pub use polygon::{
    hausdorff, hausdorff_convex, pythagorean_polygon, rational_regular, rational_unit_vector, small_dodecagon, small_octagon, square, OffsetVector, PolygonError,
    SymmetricPolygon,
};

/// `B1(t)`: the polygon with every side pair moved to offset `c_i + t_i`.
pub fn offset_polygon(b1: &SymmetricPolygon, t: &[crate::linalg::Rational]) -> Result<SymmetricPolygon, PolygonError> {
    b1.offset(t)
}
