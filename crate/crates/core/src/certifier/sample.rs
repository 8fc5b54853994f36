//! Randomized refutation oracle for certificates.
//!
//! Two searches run per trial. The line search draws `t` in the box (half
//! of the trials on the zero set of a random kill functional, when that set
//! meets the box) and solves every `A_α x = b_α(t)` from scratch. The
//! boundary search draws a symmetric polygon `B'` with
//! `B_in ⊆ B' ⊆ B_out` and looks for directions on `∂B'` that satisfy the
//! system and are pairwise η-separated, trying every choice of sides of `B'`
//! for the `2l` vectors that pin down `x`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{build_system, enumerate_admissible, trapezoid_of, trapezoids, NormCertificate, Trapezoid};
use crate::exec::Execution;
use crate::linalg::{Mat, Rational, Vec2};
use crate::norms::SymmetricPolygon;

/// Counterexamples kept per report.
const MAX_KEPT: usize = 8;
/// Side choices tried per boundary polygon before the trial is skipped.
const BOUNDARY_BUDGET: u64 = 20_000;
/// Resolution of sampled rationals in `[lo, hi]`.
const GRID: i64 = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineCounterexample {
    pub trial: usize,
    pub alpha: Vec<usize>,
    pub t: Vec<Rational>,
    pub x: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryCounterexample {
    pub trial: usize,
    pub polygon: SymmetricPolygon,
    pub directions: Vec<Vec2>,
    /// Trapezoid of each direction (smallest side on ties).
    pub alpha: Vec<Option<usize>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleReport {
    pub trials: usize,
    pub assignments: usize,
    pub line_checks: u64,
    pub zero_set_trials: usize,
    pub line_solutions: u64,
    pub line_counterexamples: Vec<LineCounterexample>,
    pub boundary_polygons: usize,
    pub boundary_systems: u64,
    pub boundary_skipped: usize,
    pub boundary_solutions: u64,
    pub boundary_counterexamples: Vec<BoundaryCounterexample>,
    pub sweep_checks: u64,
    pub sweep_violations: u64,
}

impl SampleReport {
    pub fn found_counterexample(&self) -> bool {
        self.line_solutions > 0 || self.boundary_solutions > 0 || self.sweep_violations > 0
    }
}

#[derive(Default)]
struct Trial {
    line_checks: u64,
    zero_set: bool,
    line: Vec<LineCounterexample>,
    line_solutions: u64,
    boundary_systems: u64,
    boundary_skipped: bool,
    boundary: Vec<BoundaryCounterexample>,
    boundary_solutions: u64,
    sweep_checks: u64,
    sweep_violations: u64,
}

fn rational_between(rng: &mut ChaCha8Rng, lo: &Rational, hi: &Rational) -> Rational {
    let j = rng.gen_range(0..=GRID);
    lo + &((hi - lo) * Rational::new(j, GRID))
}

pub fn sample_verify(cert: &NormCertificate, trials: usize, seed: u64, exec: Execution) -> SampleReport {
    if trials == 0 {
        return SampleReport::default();
    }
    let b1 = &cert.polygon;
    let m = b1.m();
    // a corrupted box may leave the polygon family; the line search still runs
    let family = (|| {
        let inner = b1.offset(cert.bx.lo()).ok()?;
        let outer = b1.offset(cert.bx.hi()).ok()?;
        let mid = b1.offset(&cert.bx.mid()).ok()?;
        Some((inner, mid, outer))
    })();
    let traps = family.as_ref().map(|(inner, _, outer)| trapezoids(inner, outer));
    let assignments = enumerate_admissible(cert.system.l(), m);
    let systems = exec.map_slice(&assignments, |alpha| build_system(&cert.system, b1, alpha));
    let run = |trial: usize| -> Trial {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ trial as u64);
        let mut out = Trial::default();
        let t = line_point(cert, trial, &mut rng, &mut out.zero_set);
        for (alpha, sys) in assignments.iter().zip(&systems) {
            out.line_checks += 1;
            if let Some(x) = sys.a.solve(&sys.rhs(&t)) {
                out.line_solutions += 1;
                if out.line.len() < MAX_KEPT {
                    out.line.push(LineCounterexample { trial, alpha: alpha.values().to_vec(), t: t.clone(), x });
                }
            }
        }
        match (&family, &traps) {
            (Some((inner, mid, outer)), Some(traps)) => {
                match boundary_polygon(cert, mid, inner, outer, &mut rng) {
                    Some(bprime) => boundary_search(cert, &bprime, traps, trial, &mut out),
                    None => out.boundary_skipped = true,
                }
                sweep(cert, traps, &mut rng, &mut out);
            }
            _ => out.boundary_skipped = true,
        }
        out
    };
    let results = exec.map_range(trials, run);
    let mut rep = SampleReport { trials, assignments: assignments.len(), ..SampleReport::default() };
    for r in results {
        rep.line_checks += r.line_checks;
        rep.zero_set_trials += usize::from(r.zero_set);
        rep.line_solutions += r.line_solutions;
        rep.boundary_polygons += 1;
        rep.boundary_systems += r.boundary_systems;
        rep.boundary_skipped += usize::from(r.boundary_skipped);
        rep.boundary_solutions += r.boundary_solutions;
        rep.sweep_checks += r.sweep_checks;
        rep.sweep_violations += r.sweep_violations;
        let room = MAX_KEPT.saturating_sub(rep.line_counterexamples.len());
        rep.line_counterexamples.extend(r.line.into_iter().take(room));
        let room = MAX_KEPT.saturating_sub(rep.boundary_counterexamples.len());
        rep.boundary_counterexamples.extend(r.boundary.into_iter().take(room));
    }
    rep
}

/// Odd trials try the zero set of a kill functional, preferring those not
/// sign-definite on the box: one coordinate of a random `t` is moved so that
/// `h(t) = 0`, if that stays in the box.
fn line_point(cert: &NormCertificate, trial: usize, rng: &mut ChaCha8Rng, zero_set: &mut bool) -> Vec<Rational> {
    let bx = &cert.bx;
    let mut t: Vec<Rational> = (0..bx.dim()).map(|k| rational_between(rng, &bx.lo()[k], &bx.hi()[k])).collect();
    if trial.is_multiple_of(2) || cert.kills.is_empty() {
        return t;
    }
    let open: Vec<usize> =
        (0..cert.kills.len()).filter(|&i| cert.kills[i].h.over(bx).definite_sign().is_none()).collect();
    let pick = if open.is_empty() { rng.gen_range(0..cert.kills.len()) } else { open[rng.gen_range(0..open.len())] };
    let h = &cert.kills[pick].h;
    let value = h.eval(&t);
    for k in 0..bx.dim() {
        if h.coeffs[k].is_zero() {
            continue;
        }
        let moved = &t[k] - &(&value / &h.coeffs[k]);
        if bx.interval(k).contains(&moved) {
            t[k] = moved;
            *zero_set = true;
            break;
        }
    }
    t
}

/// Hull of `B1(t)` and one point per side of `B` pushed outward radially,
/// kept inside `B_out`.
fn boundary_polygon(
    cert: &NormCertificate,
    mid: &SymmetricPolygon,
    inner: &SymmetricPolygon,
    outer: &SymmetricPolygon,
    rng: &mut ChaCha8Rng,
) -> Option<SymmetricPolygon> {
    let bx = &cert.bx;
    let t: Vec<Rational> = (0..bx.dim()).map(|k| rational_between(rng, &bx.lo()[k], &bx.hi()[k])).collect();
    let base = cert.polygon.offset(&t).ok()?;
    let mut pts: Vec<Vec2> = base.vertices().to_vec();
    for k in 0..mid.m() {
        if rng.gen_bool(0.5) {
            continue;
        }
        let (a, b) = mid.side_endpoints(k);
        let p = a + &(b - a).scale(&Rational::new(rng.gen_range(1..GRID), GRID));
        let reach = outer.eval(&p).recip();
        let f = rational_between(rng, &Rational::one(), &reach);
        let q = p.scale(&f);
        pts.push(-&q);
        pts.push(q);
    }
    match SymmetricPolygon::from_points(&pts) {
        Ok(p) if sandwiched(inner, &p, outer) => Some(p),
        _ => Some(base),
    }
}

fn sandwiched(inner: &SymmetricPolygon, p: &SymmetricPolygon, outer: &SymmetricPolygon) -> bool {
    let one = Rational::one();
    inner.vertices().iter().all(|v| p.eval(v) <= one) && p.vertices().iter().all(|v| outer.eval(v) <= one)
}

fn boundary_search(cert: &NormCertificate, bp: &SymmetricPolygon, traps: &[Trapezoid], trial: usize, out: &mut Trial) {
    let s = &cert.system;
    let l = s.l();
    let sides = 2 * bp.m();
    let picks = 2 * l;
    let total = (sides as u64).checked_pow(picks as u32).unwrap_or(u64::MAX);
    if total > BOUNDARY_BUDGET {
        out.boundary_skipped = true;
        return;
    }
    // weights of vector i (0-based, 2l+1 of them) in terms of u_1..u_l
    let weights: Vec<Vec<Rational>> = (0..2 * l + 1)
        .map(|i| {
            if i < l {
                (0..l).map(|j| Rational::from_int(i64::from(i == j))).collect()
            } else {
                s.coeffs()[i - l].iter().map(|&c| Rational::from_int(c)).collect()
            }
        })
        .collect();
    let one = Rational::one();
    let mut choice = vec![0usize; picks];
    for code in 0..total {
        let mut c = code;
        for slot in choice.iter_mut() {
            *slot = (c % sides as u64) as usize;
            c /= sides as u64;
        }
        out.boundary_systems += 1;
        let mut a = Mat::zeros(picks, picks);
        let mut b = Vec::with_capacity(picks);
        for (i, &side) in choice.iter().enumerate() {
            let n = bp.side_normal(side);
            for (j, w) in weights[i].iter().enumerate() {
                a.set(i, 2 * j, w * &n.x);
                a.set(i, 2 * j + 1, w * &n.y);
            }
            b.push(bp.side_offset(side).clone());
        }
        if a.rank() < picks {
            continue;
        }
        let x = a.solve(&b).expect("full rank");
        let u: Vec<Vec2> = (0..l).map(|j| Vec2::new(x[2 * j].clone(), x[2 * j + 1].clone())).collect();
        let dirs: Vec<Vec2> = weights
            .iter()
            .map(|w| w.iter().zip(&u).fold(Vec2::zero(), |acc, (c, v)| acc + v.scale(c)))
            .collect();
        if dirs.iter().any(|d| d.is_zero() || bp.eval(d) != one) {
            continue;
        }
        let separated = (0..dirs.len()).all(|i| (0..i).all(|j| cert.eta.separated(&dirs[i], &dirs[j])));
        if !separated {
            continue;
        }
        out.boundary_solutions += 1;
        if out.boundary.len() < MAX_KEPT {
            let alpha = dirs.iter().map(|d| trapezoid_of(traps, d)).collect();
            out.boundary.push(BoundaryCounterexample { trial, polygon: bp.clone(), directions: dirs, alpha });
        }
    }
}

/// A random point of each trapezoid lies on `λ_k(t)` for a `t` in the box.
fn sweep(cert: &NormCertificate, traps: &[Trapezoid], rng: &mut ChaCha8Rng, out: &mut Trial) {
    let b1 = &cert.polygon;
    let m = b1.m();
    for tr in traps {
        let w: Vec<i64> = (0..4).map(|_| rng.gen_range(1..GRID)).collect();
        let total: i64 = w.iter().sum();
        let u = tr
            .corners
            .iter()
            .zip(&w)
            .fold(Vec2::zero(), |acc, (c, &wi)| acc + c.scale(&Rational::new(wi, total)));
        let t = b1.side_normal(tr.side).dot(&u) - b1.side_offset(tr.side);
        out.sweep_checks += 1;
        if !cert.bx.interval(tr.side % m).contains(&t) || !tr.contains(&u) {
            out.sweep_violations += 1;
        }
    }
}
