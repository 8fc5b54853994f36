//! Certificates that no norm near a witness polygon admits an η-separated
//! realization of a given dependence system.
//!
//! For each admissible placement `α` of the `2l+1` directions on sides of
//! `B1`, the constraints `u_i ∈ λ_{α(i)}(t)` form an overdetermined system
//! `A x = b(t)`. A left-null vector `y` of `A` turns it into the affine
//! functional `h(t) = yᵀ b(t)`; on a box where `h` has no zero the system is
//! unsolvable. The box is shrunk once per assignment.

mod check;
mod sample;
mod trapezoid;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::exec::Execution;
use crate::linalg::{Mat, RatInterval, Rational};
use crate::lindep::DependenceSystem;
use crate::norms::{box_corners_ok, AngleBound, NormOracle, OffsetVector, PolygonError, SymmetricPolygon};

pub use check::{check_certificate, CheckFailure, CheckReport};
pub use sample::{sample_verify, BoundaryCounterexample, LineCounterexample, SampleReport};
pub use trapezoid::{trapezoid_of, trapezoids, Trapezoid};

/// `α : [2l+1] → [2m]`, injective modulo `m`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AdmissibleAssignment(Vec<usize>);

impl AdmissibleAssignment {
    pub fn new(alpha: Vec<usize>, m: usize) -> Option<Self> {
        let mut classes = BTreeSet::new();
        let ok = alpha.iter().all(|&a| a < 2 * m && classes.insert(a % m));
        ok.then_some(AdmissibleAssignment(alpha))
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }
}

/// Number of admissible assignments: `m (m-1) ··· (m-2l) · 2^(2l+1)`.
pub fn admissible_count(l: usize, m: usize) -> u128 {
    let items = 2 * l + 1;
    if items > m {
        return 0;
    }
    let falling: u128 = (0..items).map(|i| (m - i) as u128).product();
    falling << items
}

/// All admissible assignments in lexicographic order.
pub fn enumerate_admissible(l: usize, m: usize) -> Vec<AdmissibleAssignment> {
    let items = 2 * l + 1;
    let mut out = Vec::new();
    if items > m {
        return out;
    }
    let mut current = Vec::with_capacity(items);
    let mut used = vec![false; m];
    fn rec(items: usize, m: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<AdmissibleAssignment>) {
        if current.len() == items {
            out.push(AdmissibleAssignment(current.clone()));
            return;
        }
        for side in 0..2 * m {
            if used[side % m] {
                continue;
            }
            used[side % m] = true;
            current.push(side);
            rec(items, m, current, used, out);
            current.pop();
            used[side % m] = false;
        }
    }
    rec(items, m, &mut current, &mut used, &mut out);
    out
}

/// A box `[lo, hi]` of offset vectors with nonempty interior.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BoxRepr", into = "BoxRepr")]
pub struct OffsetBox {
    lo: OffsetVector,
    hi: OffsetVector,
}

#[derive(Serialize, Deserialize)]
struct BoxRepr {
    lo: OffsetVector,
    hi: OffsetVector,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("box needs lo < hi in every coordinate")]
pub struct EmptyBox;

impl OffsetBox {
    pub fn new(lo: OffsetVector, hi: OffsetVector) -> Result<Self, EmptyBox> {
        if lo.len() != hi.len() || lo.is_empty() || lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return Err(EmptyBox);
        }
        Ok(OffsetBox { lo, hi })
    }

    /// `[-d, d]^m`.
    pub fn cube(m: usize, d: &Rational) -> Result<Self, EmptyBox> {
        OffsetBox::new(vec![-d; m], vec![d.clone(); m])
    }

    pub fn lo(&self) -> &[Rational] {
        &self.lo
    }

    pub fn hi(&self) -> &[Rational] {
        &self.hi
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn mid(&self) -> OffsetVector {
        self.lo.iter().zip(&self.hi).map(|(a, b)| a.midpoint(b)).collect()
    }

    pub fn interval(&self, k: usize) -> RatInterval {
        RatInterval::new(self.lo[k].clone(), self.hi[k].clone())
    }

    pub fn contains(&self, t: &[Rational]) -> bool {
        t.len() == self.dim() && t.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (a, b))| a <= x && x <= b)
    }

    pub fn is_within(&self, outer: &OffsetBox) -> bool {
        self.dim() == outer.dim() && outer.contains(&self.lo) && outer.contains(&self.hi)
    }

    /// Box grown by `pad` on both ends of every coordinate.
    pub fn widened(&self, pad: &Rational) -> OffsetBox {
        OffsetBox {
            lo: self.lo.iter().map(|v| v - pad).collect(),
            hi: self.hi.iter().map(|v| v + pad).collect(),
        }
    }
}

impl From<OffsetBox> for BoxRepr {
    fn from(b: OffsetBox) -> Self {
        BoxRepr { lo: b.lo, hi: b.hi }
    }
}

impl TryFrom<BoxRepr> for OffsetBox {
    type Error = EmptyBox;
    fn try_from(r: BoxRepr) -> Result<Self, Self::Error> {
        OffsetBox::new(r.lo, r.hi)
    }
}

/// `h(t) = constant + Σ coeffs[k] t_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineFunctional {
    pub constant: Rational,
    pub coeffs: Vec<Rational>,
}

impl AffineFunctional {
    pub fn eval(&self, t: &[Rational]) -> Rational {
        self.coeffs.iter().zip(t).fold(self.constant.clone(), |acc, (g, x)| acc + g * x)
    }

    /// Enclosure of `h` over the box.
    pub fn over(&self, b: &OffsetBox) -> RatInterval {
        (0..b.dim()).fold(RatInterval::point(self.constant.clone()), |acc, k| {
            acc.add(&b.interval(k).scale(&self.coeffs[k]))
        })
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }
}

/// `A x = b(t)` for one assignment; `b_i(t) = c_{k_i} + t_{k_i}` with
/// `k_i = α(i) mod m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentSystem {
    pub a: Mat,
    /// Offset coordinate feeding each row.
    pub coords: Vec<usize>,
    /// `c_{k_i}`.
    pub base: Vec<Rational>,
}

impl AssignmentSystem {
    pub fn rhs(&self, t: &[Rational]) -> Vec<Rational> {
        self.coords.iter().zip(&self.base).map(|(&k, c)| c + &t[k]).collect()
    }

    /// Coefficient matrix of `t ↦ b(t) - b(0)`, of shape `(2l+1) × m`.
    pub fn rhs_linear_part(&self, m: usize) -> Mat {
        let mut out = Mat::zeros(self.coords.len(), m);
        for (i, &k) in self.coords.iter().enumerate() {
            out.set(i, k, Rational::one());
        }
        out
    }

    /// `yᵀ b(t)` as an affine functional of `t ∈ R^m`.
    pub fn functional(&self, y: &[Rational], m: usize) -> AffineFunctional {
        let mut coeffs = vec![Rational::zero(); m];
        let mut constant = Rational::zero();
        for ((yi, &k), c) in y.iter().zip(&self.coords).zip(&self.base) {
            coeffs[k] += yi;
            constant += yi * c;
        }
        AffineFunctional { constant, coeffs }
    }
}

/// Unknowns `x = (u_1, ..., u_l)` flattened; row `i < l` says `u_{i+1}` lies
/// on line `λ_{α(i)}`, row `l + j` says `L_{j+1}(u)` does.
pub fn build_system(s: &DependenceSystem, b1: &SymmetricPolygon, alpha: &AdmissibleAssignment) -> AssignmentSystem {
    let l = s.l();
    let m = b1.m();
    let alpha = alpha.values();
    assert_eq!(alpha.len(), 2 * l + 1, "assignment length");
    let mut a = Mat::zeros(2 * l + 1, 2 * l);
    for (i, &side) in alpha.iter().enumerate() {
        let n = b1.side_normal(side);
        let weights: Vec<Rational> = if i < l {
            (0..l).map(|s| if s == i { Rational::one() } else { Rational::zero() }).collect()
        } else {
            s.coeffs()[i - l].iter().map(|&c| Rational::from_int(c)).collect()
        };
        for (col, w) in weights.iter().enumerate() {
            a.set(i, 2 * col, w * &n.x);
            a.set(i, 2 * col + 1, w * &n.y);
        }
    }
    AssignmentSystem {
        a,
        coords: alpha.iter().map(|&k| k % m).collect(),
        base: alpha.iter().map(|&k| b1.side_offset(k).clone()).collect(),
    }
}

/// One killed assignment: `yᵀ A = 0` and `h = yᵀ b` has constant sign on the
/// final box.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KillRecord {
    pub alpha: AdmissibleAssignment,
    pub y: Vec<Rational>,
    pub h: AffineFunctional,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertifyError {
    #[error("delta0 must be positive")]
    NonPositiveDelta,
    #[error("B1(t) is not a valid η-short polygon for every t in [-delta0, delta0]^m")]
    BoxTooLarge,
    #[error("B1 is not η-short")]
    NotShort,
    #[error("{count} admissible assignments exceed the cap {cap}")]
    TooManyAssignments { count: u128, cap: u128 },
    #[error("every left-null vector gives a constant zero functional for assignment {0:?}")]
    NoKill(Vec<usize>),
    #[error(transparent)]
    Polygon(#[from] PolygonError),
}

/// Shrink `bx` until `h` is sign-definite on it.
///
/// A nonconstant `h` whose enclosure meets 0 first has its coordinates
/// shrunk toward the center by 1/2, then 1/4. If that fails, each coordinate
/// `k` in the support of `h` is moved to the quarter-to-end piece
/// `[c + w/4, c + w]` (or its mirror) on the side where `h` grows toward the
/// sign of `h(center)`; `h` then stays at least `Σ |g_k| w_k / 4` away from 0.
pub fn shrink_for(h: &AffineFunctional, bx: &OffsetBox) -> Option<(OffsetBox, i8)> {
    if let Some(s) = h.over(bx).definite_sign() {
        return Some((bx.clone(), s as i8));
    }
    if h.is_constant() {
        return None;
    }
    let center = bx.mid();
    let hc = h.eval(&center);
    let support: Vec<usize> = (0..bx.dim()).filter(|&k| !h.coeffs[k].is_zero()).collect();
    if !hc.is_zero() {
        for factor in [Rational::new(1, 2), Rational::new(1, 4)] {
            let mut lo = bx.lo.clone();
            let mut hi = bx.hi.clone();
            for &k in &support {
                let half = (&bx.hi[k] - &bx.lo[k]) / Rational::from_int(2) * &factor;
                lo[k] = &center[k] - &half;
                hi[k] = &center[k] + &half;
            }
            let cand = OffsetBox { lo, hi };
            if let Some(s) = h.over(&cand).definite_sign() {
                return Some((cand, s as i8));
            }
        }
    }
    let toward = if hc.is_negative() { -1 } else { 1 };
    let mut lo = bx.lo.clone();
    let mut hi = bx.hi.clone();
    for &k in &support {
        let w = (&bx.hi[k] - &bx.lo[k]) / Rational::from_int(2);
        let quarter = &w / Rational::from_int(4);
        if h.coeffs[k].signum() == toward {
            lo[k] = &center[k] + &quarter;
            hi[k] = bx.hi[k].clone();
        } else {
            lo[k] = bx.lo[k].clone();
            hi[k] = &center[k] - &quarter;
        }
    }
    let cand = OffsetBox { lo, hi };
    let s = h.over(&cand).definite_sign().expect("center-shift leaves h sign-definite");
    Some((cand, s as i8))
}

/// Pick a left-null vector with a nonconstant or nonzero functional and
/// shrink the box for it.
pub fn kill_assignment(
    sys: &AssignmentSystem,
    bx: &OffsetBox,
) -> Option<(OffsetBox, Vec<Rational>, AffineFunctional, i8)> {
    assert!(sys.a.rows() > sys.a.cols(), "kill needs more rows than columns");
    let m = bx.dim();
    let basis = sys.a.left_null_basis();
    // prefer a functional already definite on the current box
    let candidates: Vec<(Vec<Rational>, AffineFunctional)> = basis
        .into_iter()
        .map(|y| {
            let h = sys.functional(&y, m);
            (y, h)
        })
        .filter(|(_, h)| !(h.is_constant() && h.constant.is_zero()))
        .collect();
    if let Some((y, h)) = candidates.iter().find(|(_, h)| h.over(bx).definite_sign().is_some()) {
        let s = h.over(bx).definite_sign().expect("checked") as i8;
        return Some((bx.clone(), y.clone(), h.clone(), s));
    }
    let (y, h) = candidates.into_iter().next()?;
    let (shrunk, s) = shrink_for(&h, bx)?;
    Some((shrunk, y, h, s))
}

/// `B_in`, `B`, `B_out` at `t_min`, `t_mid`, `t_max` and the margin `δ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub inner: SymmetricPolygon,
    pub mid: SymmetricPolygon,
    pub outer: SymmetricPolygon,
    pub delta: Rational,
}

/// Reference norm the witness must stay close to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseNorm {
    pub norm: NormOracle,
    pub eps: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormCertificate {
    pub polygon: SymmetricPolygon,
    pub eta: AngleBound,
    pub system: DependenceSystem,
    pub delta0: Rational,
    #[serde(rename = "box")]
    pub bx: OffsetBox,
    pub kills: Vec<KillRecord>,
    /// No admissible assignment exists (`2l+1 > m`).
    pub degenerate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<BaseNorm>,
}

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    pub max_assignments: u128,
    pub exec: Execution,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { max_assignments: 5_000_000, exec: Execution::default() }
    }
}

/// Systems are built in parallel in chunks of this many assignments; kills
/// run in order.
const BUILD_CHUNK: usize = 4096;

/// Kill every admissible assignment in lexicographic order starting from
/// `[-δ0, δ0]^m`.
pub fn certify_box(
    s: &DependenceSystem,
    b1: &SymmetricPolygon,
    delta0: &Rational,
    eta: &AngleBound,
    opts: &CertifyOptions,
) -> Result<NormCertificate, CertifyError> {
    if !delta0.is_positive() {
        return Err(CertifyError::NonPositiveDelta);
    }
    if !b1.is_eta_short(eta) {
        return Err(CertifyError::NotShort);
    }
    let m = b1.m();
    let t0 = OffsetBox::cube(m, delta0).expect("positive width");
    if !box_corners_ok(b1, t0.lo(), t0.hi(), eta, true, None) {
        return Err(CertifyError::BoxTooLarge);
    }
    certify_from(s, b1, delta0, eta, t0, opts)
}

/// Same fold starting from an arbitrary box inside `[-δ0, δ0]^m`.
pub fn certify_from(
    s: &DependenceSystem,
    b1: &SymmetricPolygon,
    delta0: &Rational,
    eta: &AngleBound,
    start: OffsetBox,
    opts: &CertifyOptions,
) -> Result<NormCertificate, CertifyError> {
    let m = b1.m();
    let count = admissible_count(s.l(), m);
    if count > opts.max_assignments {
        return Err(CertifyError::TooManyAssignments { count, cap: opts.max_assignments });
    }
    let assignments = enumerate_admissible(s.l(), m);
    let mut bx = start;
    let mut kills = Vec::with_capacity(assignments.len());
    for chunk in assignments.chunks(BUILD_CHUNK) {
        let systems = opts.exec.map_slice(chunk, |alpha| build_system(s, b1, alpha));
        for (alpha, sys) in chunk.iter().zip(systems) {
            let (next, y, h, sign) =
                kill_assignment(&sys, &bx).ok_or_else(|| CertifyError::NoKill(alpha.values().to_vec()))?;
            bx = next;
            kills.push(KillRecord { alpha: alpha.clone(), y, h, sign });
        }
    }
    // later shrinks keep earlier functionals definite, but the recorded sign
    // is re-read on the final box
    for k in &mut kills {
        k.sign = k.h.over(&bx).definite_sign().expect("sub-boxes keep the sign") as i8;
    }
    Ok(NormCertificate {
        polygon: b1.clone(),
        eta: eta.clone(),
        system: s.clone(),
        delta0: delta0.clone(),
        bx,
        degenerate: count == 0,
        kills,
        witness: None,
        base: None,
    })
}

/// Fill in `B_in ⊂ B ⊂ B_out` and `δ = min_i (hi_i - lo_i) / (2 U_i)` with
/// `U_i ≥ |n_i|`.
pub fn witness_norm(mut cert: NormCertificate) -> Result<NormCertificate, CertifyError> {
    let b1 = &cert.polygon;
    let inner = b1.offset(cert.bx.lo())?;
    let mid = b1.offset(&cert.bx.mid())?;
    let outer = b1.offset(cert.bx.hi())?;
    let delta = b1
        .normals()
        .iter()
        .enumerate()
        .map(|(k, n)| {
            let upper = RatInterval::sqrt_of(&n.norm_sq(), 40).hi;
            cert.bx.interval(k).width() / (Rational::from_int(2) * upper)
        })
        .min()
        .expect("nonempty polygon");
    cert.witness = Some(Witness { inner, mid, outer, delta });
    Ok(cert)
}

/// Attach the reference norm and tolerance checked by [`check_certificate`].
pub fn with_base(mut cert: NormCertificate, norm: NormOracle, eps: Rational) -> NormCertificate {
    cert.base = Some(BaseNorm { norm, eps });
    cert
}

/// Corrupted copy for mutation tests: the box grown uniformly to twice the
/// smallest pad at which some kill functional's enclosure reaches 0.
pub fn widened_past_a_kill(cert: &NormCertificate) -> NormCertificate {
    let mid = cert.bx.mid();
    let pad = cert
        .kills
        .iter()
        .filter_map(|k| {
            let mass: Rational = k.h.coeffs.iter().map(Rational::abs).sum();
            if mass.is_zero() {
                return None;
            }
            let spread: Rational = (0..cert.bx.dim())
                .map(|j| k.h.coeffs[j].abs() * cert.bx.interval(j).width() / Rational::from_int(2))
                .sum();
            Some((k.h.eval(&mid).abs() - spread) / mass)
        })
        .min()
        .unwrap_or_else(|| cert.delta0.clone());
    let mut out = cert.clone();
    out.bx = cert.bx.widened(&(pad * Rational::from_int(2)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, v2};
    use crate::norms::{small_octagon, square};

    fn brute_force(l: usize, m: usize) -> usize {
        let items = 2 * l + 1;
        let total = (2 * m).pow(items as u32);
        (0..total)
            .filter(|&code| {
                let mut c = code;
                let alpha: Vec<usize> = (0..items)
                    .map(|_| {
                        let v = c % (2 * m);
                        c /= 2 * m;
                        v
                    })
                    .collect();
                (0..items).all(|i| (0..i).all(|j| alpha[i] % m != alpha[j] % m))
            })
            .count()
    }

    #[test]
    fn admissible_counts() {
        for (l, m) in [(1, 2), (1, 3), (1, 4), (2, 5), (2, 6)] {
            let list = enumerate_admissible(l, m);
            assert_eq!(list.len(), brute_force(l, m), "l={l} m={m}");
            assert_eq!(list.len() as u128, admissible_count(l, m));
            assert!(list.windows(2).all(|w| w[0] < w[1]));
        }
        assert_eq!(enumerate_admissible(1, 3).len(), 48);
        assert_eq!(enumerate_admissible(2, 5).len(), 3840);
    }

    fn toy() -> DependenceSystem {
        DependenceSystem::new(1, vec![1, 2, 3], vec![vec![2], vec![-1]]).unwrap()
    }

    #[test]
    fn system_rows_match_lines() {
        let oct = small_octagon();
        let alpha = AdmissibleAssignment::new(vec![0, 1, 6], 4).unwrap();
        let sys = build_system(&toy(), &oct, &alpha);
        assert_eq!((sys.a.rows(), sys.a.cols()), (3, 2));
        let t = vec![rat(1, 7), rat(-1, 9), rat(1, 5), rat(2, 11)];
        let u1 = v2(3, -2);
        let x = vec![u1.x.clone(), u1.y.clone()];
        let lhs = sys.a.mul_vec(&x);
        // row 2: <-n_2, -u1> with offset coordinate 2
        let n = [oct.side_normal(0), oct.side_normal(1), oct.side_normal(6)];
        let us = [u1.clone(), u1.scale(&rat(2, 1)), u1.scale(&rat(-1, 1))];
        for i in 0..3 {
            assert_eq!(lhs[i], n[i].dot(&us[i]));
        }
        assert_eq!(sys.rhs(&t)[2], oct.side_offset(6) + &t[2]);
        assert_eq!(sys.rhs_linear_part(4).rank(), 3);
    }

    #[test]
    fn square_rows() {
        let s = DependenceSystem::new(1, vec![1, 2, 3], vec![vec![2], vec![1]]).unwrap();
        let sq = square();
        // not admissible on the square, but the rows are still defined
        let sys = build_system(&s, &sq, &AdmissibleAssignment(vec![0, 1, 2]));
        assert_eq!(sys.a.row(0), &[rat(1, 1), rat(0, 1)]);
        assert_eq!(sys.a.row(1), &[rat(0, 1), rat(2, 1)]);
        assert_eq!(sys.a.row(2), &[rat(-1, 1), rat(0, 1)]);
        assert_eq!(sys.rhs(&[rat(1, 3), rat(1, 5)]), vec![rat(4, 3), rat(6, 5), rat(4, 3)]);
    }

    #[test]
    fn shrink_rules() {
        let bx = OffsetBox::cube(2, &rat(1, 1)).unwrap();
        let constant = AffineFunctional { constant: rat(3, 1), coeffs: vec![rat(0, 1); 2] };
        assert_eq!(shrink_for(&constant, &bx), Some((bx.clone(), 1)));
        let t1 = AffineFunctional { constant: rat(0, 1), coeffs: vec![rat(1, 1), rat(0, 1)] };
        let (sub, sign) = shrink_for(&t1, &bx).unwrap();
        assert_eq!(sign, 1);
        assert_eq!(sub.lo(), &[rat(1, 4), rat(-1, 1)]);
        assert_eq!(sub.hi(), &[rat(1, 1), rat(1, 1)]);
        let off = AffineFunctional { constant: rat(1, 1), coeffs: vec![rat(2, 1), rat(0, 1)] };
        let (sub, _) = shrink_for(&off, &bx).unwrap();
        assert_eq!(sub.lo()[0], rat(-1, 4));
        let zero = AffineFunctional { constant: rat(0, 1), coeffs: vec![rat(0, 1); 2] };
        assert_eq!(shrink_for(&zero, &bx), None);
    }

    #[test]
    fn toy_certificate_on_octagon() {
        let oct = small_octagon();
        let eta = AngleBound::from_sin_sq(rat(3, 4)).unwrap();
        let cert = certify_box(&toy(), &oct, &rat(1, 100), &eta, &CertifyOptions::default()).unwrap();
        assert_eq!(cert.kills.len(), 192);
        assert!(!cert.degenerate);
        for k in &cert.kills {
            let sys = build_system(&toy(), &oct, &k.alpha);
            assert!(sys.a.left_mul(&k.y).iter().all(Rational::is_zero));
            assert_eq!(k.h.over(&cert.bx).definite_sign(), Some(k.sign as i32));
        }
        // a second pass over the final box changes nothing
        let again = certify_from(&toy(), &oct, &rat(1, 100), &eta, cert.bx.clone(), &CertifyOptions::default()).unwrap();
        assert_eq!(again.bx, cert.bx);
    }

    #[test]
    fn degenerate_when_too_few_sides() {
        let s = DependenceSystem::new(2, vec![1, 2, 3, 4, 5], vec![vec![1, 1], vec![1, -1], vec![2, 1]]).unwrap();
        let oct = small_octagon();
        let eta = AngleBound::from_sin_sq(rat(3, 4)).unwrap();
        let cert = certify_box(&s, &oct, &rat(1, 100), &eta, &CertifyOptions::default()).unwrap();
        assert!(cert.degenerate);
        assert!(cert.kills.is_empty());
        assert_eq!(cert.bx, OffsetBox::cube(4, &rat(1, 100)).unwrap());
    }

    #[test]
    fn square_witness() {
        let sq = square();
        let cert = NormCertificate {
            polygon: sq.clone(),
            eta: AngleBound::from_sin_sq(rat(1, 1)).unwrap(),
            system: toy(),
            delta0: rat(1, 4),
            bx: OffsetBox::new(vec![rat(1, 8); 2], vec![rat(1, 4); 2]).unwrap(),
            kills: vec![],
            degenerate: true,
            witness: None,
            base: None,
        };
        let w = witness_norm(cert).unwrap().witness.unwrap();
        assert_eq!(w.inner.offsets(), &[rat(9, 8), rat(9, 8)]);
        assert_eq!(w.outer.offsets(), &[rat(5, 4), rat(5, 4)]);
        assert_eq!(w.mid.offsets(), &[rat(19, 16), rat(19, 16)]);
        assert_eq!(w.delta, rat(1, 16));
    }

    #[test]
    fn check_and_sample_toy() {
        let oct = small_octagon();
        let eta = AngleBound::from_sin_sq(rat(3, 4)).unwrap();
        let cert = certify_box(&toy(), &oct, &rat(1, 100), &eta, &CertifyOptions::default()).unwrap();
        let cert = with_base(witness_norm(cert).unwrap(), NormOracle::Euclidean, rat(1, 5));
        let rep = check_certificate(&cert);
        assert!(rep.ok, "{:?}", rep.failures);
        let sample = sample_verify(&cert, 40, 0, Execution::Sequential);
        assert!(!sample.found_counterexample(), "{sample:?}");
        assert!(sample.boundary_systems > 0);

        let mut flipped = cert.clone();
        flipped.kills[5].sign *= -1;
        let rep = check_certificate(&flipped);
        assert_eq!(rep.failures, vec![CheckFailure::SignNotDefinite { alpha: cert.kills[5].alpha.values().to_vec() }]);

        let wide = widened_past_a_kill(&cert);
        assert!(!check_certificate(&wide).ok);
        assert!(sample_verify(&wide, 40, 0, Execution::Sequential).line_solutions > 0);
    }
}
