//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use udnorm_core::certifier::{
    admissible_count, certify_box, check_certificate, enumerate_admissible, sample_verify, widened_past_a_kill,
    with_base, witness_norm, CertifyOptions,
};
use udnorm_core::colored_graphs::{
    check_cover, prop1, robust_core, verify_no_weak_cut, CutSearch, EdgeColoredGraph,
    RobustCoreError,
};
use udnorm_core::constructions::{
    flat_side_quadratic, generic_unit_vectors, side_cluster_pointset, subset_sum_pointset, PointSeq,
};
use udnorm_core::exec::Execution;
use udnorm_core::linalg::{rat, Rational, Vec2};
use udnorm_core::lindep::{
    extract_dependences, signed_path_sum, verify_on_realization, DependenceConfig, DependenceSystem,
};
use udnorm_core::norms::{
    pythagorean_polygon, small_dodecagon, small_octagon, square, AngleBound, NormOracle, SymmetricPolygon,
};
use udnorm_core::pipeline::{run_pipeline, PipelineConfig};
use udnorm_core::udg::{build_udg, count_unit_distances, DecoratedUdg};

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn search() -> CutSearch {
    CutSearch { exec: Execution::default(), ..CutSearch::default() }
}

fn signed_sum_figure() -> Outcome {
    let g = DecoratedUdg::new(
        6,
        4,
        vec![((1, 6), 1, -1), ((1, 2), 2, 1), ((2, 3), 2, 1), ((3, 4), 3, -1), ((4, 5), 4, 1), ((5, 6), 2, 1)],
        None,
    )
    .map_err(|e| e.to_string())?;
    let sum = signed_path_sum(&g, &[1, 2, 3, 4, 5, 6], (1, 6)).map_err(|e| e.to_string())?;
    let want = BTreeMap::from([(2, -3), (3, 1), (4, -1)]);
    ensure(sum == want, || format!("got {sum:?}"))?;
    Ok("u1 = -3 u2 + u3 - u4".into())
}

/// Pairs `(i, j)` with `‖p_j - p_i‖ = 1`, straight from the norm.
fn naive_count(points: &PointSeq, b: &SymmetricPolygon) -> u64 {
    let p = points.points();
    let one = Rational::one();
    let mut count = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if b.eval(&(&p[j] - &p[i])) == one {
                count += 1;
            }
        }
    }
    count
}

fn subset_sums() -> Outcome {
    let poly = pythagorean_polygon();
    for k in 1..=12usize {
        let vs = generic_unit_vectors(&poly, k).map_err(|e| e.to_string())?;
        let pts = subset_sum_pointset(&vs).map_err(|e| e.to_string())?;
        let want = (k as u64) << (k - 1);
        let got = count_unit_distances(&pts, &poly);
        ensure(got == want, || format!("k = {k}: {got} pairs, want {want}"))?;
        if k <= 8 {
            let naive = naive_count(&pts, &poly);
            ensure(naive == want, || format!("k = {k}: direct count {naive}, want {want}"))?;
        }
    }
    Ok("k = 1..12 give k·2^(k-1) pairs".into())
}

fn flat_side() -> Outcome {
    let sq = square();
    for n in 2..=100usize {
        let pts = flat_side_quadratic(n).map_err(|e| e.to_string())?;
        let want = ((n / 2) * n.div_ceil(2)) as u64;
        let got = count_unit_distances(&pts, &sq);
        ensure(got == want, || format!("n = {n}: {got} pairs, want {want}"))?;
    }
    Ok("n = 2..100 give ⌊n/2⌋⌈n/2⌉ pairs".into())
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> EdgeColoredGraph {
    let mut pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|_| rng.gen_bool(p)).collect();
    pairs.shuffle(rng);
    // greedy proper coloring: smallest color free at both ends
    let mut used: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut colored = Vec::with_capacity(pairs.len());
    for (a, b) in pairs {
        let c = (1..).find(|c| !used[a].contains(c) && !used[b].contains(c)).unwrap();
        used[a].push(c);
        used[b].push(c);
        colored.push(((a, b), c));
    }
    EdgeColoredGraph::new(n, colored).expect("simple graph")
}

fn robust_core_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let scales = [rat(1, 2), rat(1, 1), rat(2, 1)];
    let (mut verified, mut collapsed) = (0, 0);
    for trial in 0..200 {
        let n = rng.gen_range(4..=14);
        let p = rng.gen_range(0.2..0.95);
        let g = random_graph(&mut rng, n, p);
        let r = &scales[rng.gen_range(0..3)];
        match robust_core(&g, r, &search()) {
            Ok(core) => {
                ensure(verify_no_weak_cut(&g, &core.w, r), || format!("trial {trial}: W = {:?} has a weak cut", core.w))?;
                verified += 1;
            }
            Err(RobustCoreError::Collapsed { hypothesis_met: false, .. }) => collapsed += 1,
            Err(e) => return Err(format!("trial {trial} (n = {n}, r = {r}): {e}")),
        }
    }
    Ok(format!("{verified} cores verified exhaustively, {collapsed} descents below the degree bound collapsed"))
}

fn rainbow(n: usize) -> EdgeColoredGraph {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    EdgeColoredGraph::new(n, pairs.into_iter().enumerate().map(|(i, e)| (e, i + 1)).collect()).unwrap()
}

fn prop1_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (q, c) = (rat(2001, 1000), rat(1, 4));
    let mut ok = 0;
    let check = |g: &EdgeColoredGraph, label: &str| -> Result<bool, String> {
        match prop1(g, &q, &c, &search()) {
            Ok(res) => {
                check_cover(g, &res.w, &res.colors, &q).map_err(|v| format!("{label}: false success, {v}"))?;
                Ok(true)
            }
            Err(_) => Ok(false),
        }
    };
    for trial in 0..100 {
        let n = rng.gen_range(8..=200);
        let p = rng.gen_range(0.5..0.9);
        let g = random_graph(&mut rng, n, p);
        ok += usize::from(check(&g, &format!("random graph {trial}"))?);
    }
    for n in 5..=16 {
        ensure(check(&rainbow(n), &format!("rainbow K{n}"))?, || format!("rainbow K{n} failed"))?;
    }
    // counter-instances: no cover can meet the contract
    let path = EdgeColoredGraph::new(4, vec![((0, 1), 1), ((1, 2), 2), ((2, 3), 1)]).unwrap();
    let apart = EdgeColoredGraph::new(4, vec![((0, 1), 1), ((2, 3), 2)]).unwrap();
    let improper = EdgeColoredGraph::new(4, vec![((0, 1), 1), ((1, 2), 1), ((2, 3), 2), ((0, 3), 3)]).unwrap();
    let two_colors = EdgeColoredGraph::new(4, vec![((0, 1), 1), ((1, 2), 2), ((2, 3), 1), ((0, 3), 2)]).unwrap();
    for (label, g) in [("path", &path), ("two components", &apart), ("improper", &improper), ("2-colored C4", &two_colors)] {
        ensure(prop1(g, &q, &c, &search()).is_err(), || format!("counter-instance {label} reported success"))?;
    }
    ensure(ok >= 50, || format!("only {ok} of 100 random graphs produced a cover"))?;
    Ok(format!("{ok}/100 random covers and 12 rainbow covers pass the contract; 4 counter-instances rejected"))
}

fn translate(points: Vec<Vec2>, by: &Vec2) -> Vec<Vec2> {
    points.into_iter().map(|p| &p + by).collect()
}

fn random_rational(rng: &mut ChaCha8Rng, span: i64, den: i64) -> Rational {
    rat(rng.gen_range(-span * den..=span * den), den)
}

fn dependence_soundness() -> Outcome {
    let polys = [square(), small_octagon(), small_dodecagon(), pythagorean_polygon()];
    let cfg = DependenceConfig { c: rat(1, 4), search: search(), ..DependenceConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut rows, mut systems, mut skipped) = (0, 0, 0);
    for trial in 0..200 {
        let poly = &polys[rng.gen_range(0..polys.len())];
        let sides = 2 * poly.m();
        let mut points = Vec::new();
        for cluster in 0..rng.gen_range(1..=2) {
            let n = rng.gen_range(3..=5);
            let step = rat(1, 2 * n as i64 + rng.gen_range(0..6));
            let side = rng.gen_range(0..sides);
            let shift = Vec2::new(random_rational(&mut rng, 3, 7) + rat(50 * cluster, 1), random_rational(&mut rng, 3, 11));
            let pts = side_cluster_pointset(poly, side, n, &step).map_err(|e| e.to_string())?;
            points.extend(translate(pts.points().to_vec(), &shift));
        }
        points.shuffle(&mut rng);
        let pts = PointSeq::new(points).map_err(|e| e.to_string())?;
        let g = build_udg(&pts, poly);
        match extract_dependences(&g, &cfg) {
            Ok(rep) => {
                let holds = verify_on_realization(&rep.system, &g, &pts, poly).map_err(|e| format!("trial {trial}: {e}"))?;
                ensure(holds, || format!("trial {trial}: a row fails on the realization"))?;
                systems += 1;
                rows += rep.system.coeffs().len();
            }
            Err(_) => skipped += 1,
        }
    }
    ensure(systems >= 100, || format!("only {systems} of 200 realizations gave a system"))?;
    Ok(format!("{rows} rows from {systems} systems hold exactly; {skipped} graphs had no cover"))
}

fn toy() -> DependenceSystem {
    DependenceSystem::new(1, vec![1, 2, 3], vec![vec![2], vec![-1]]).unwrap()
}

fn certificate_suite() -> Outcome {
    let cases = [
        ("octagon", small_octagon(), rat(3, 4), rat(1, 5)),
        ("12-gon", small_dodecagon(), rat(1, 2), rat(1, 5)),
    ];
    let width_cap = rat(1, 1_000_000);
    let mut notes = Vec::new();
    for (name, poly, sin_sq, eps) in cases {
        let eta = AngleBound::from_sin_sq(sin_sq).unwrap();
        let cert = certify_box(&toy(), &poly, &rat(1, 100), &eta, &CertifyOptions::default())
            .map_err(|e| format!("{name}: {e}"))?;
        let cert = with_base(witness_norm(cert).map_err(|e| format!("{name}: {e}"))?, NormOracle::Euclidean, eps);
        let rep = check_certificate(&cert);
        ensure(rep.ok, || format!("{name}: check failed {:?}", rep.failures))?;
        let w = cert.witness.as_ref().unwrap();
        for poly in [&w.inner, &w.outer] {
            let d = NormOracle::Euclidean.hausdorff_to(poly);
            ensure(d.interval.width() <= width_cap, || format!("{name}: Hausdorff width {}", d.interval.width()))?;
        }
        let sample = sample_verify(&cert, 1000, 11, Execution::default());
        ensure(!sample.found_counterexample(), || format!("{name}: sampling found {sample:?}"))?;
        let wide = widened_past_a_kill(&cert);
        let wide_check = check_certificate(&wide);
        ensure(!wide_check.ok, || format!("{name}: widened box passes the check"))?;
        let mutated = sample_verify(&wide, 100, 11, Execution::default());
        ensure(mutated.line_solutions > 0, || format!("{name}: widened box gave no counterexample"))?;
        notes.push(format!(
            "{name}: {} kills, {} line checks, {} boundary systems, mutation hit {}x",
            cert.kills.len(),
            sample.line_checks,
            sample.boundary_systems,
            mutated.line_solutions
        ));
    }
    Ok(notes.join("; "))
}

fn admissible_counts() -> Outcome {
    for ((l, m), want) in [((1usize, 2usize), 0usize), ((1, 3), 48), ((2, 5), 3840)] {
        let brute = (0..(2 * m).pow(2 * l as u32 + 1))
            .filter(|&code| {
                let digits: Vec<usize> = (0..2 * l + 1).map(|i| code / (2 * m).pow(i as u32) % (2 * m)).collect();
                (0..digits.len()).all(|i| (0..i).all(|j| digits[i] % m != digits[j] % m))
            })
            .count();
        let got = enumerate_admissible(l, m).len();
        ensure(got == want && brute == want && admissible_count(l, m) == want as u128, || {
            format!("(l, m) = ({l}, {m}): enumerated {got}, brute force {brute}, want {want}")
        })?;
    }
    Ok("(1,2) -> 0, (1,3) -> 48, (2,5) -> 3840".into())
}

fn pipeline_run() -> Outcome {
    let b = small_dodecagon();
    let pts = side_cluster_pointset(&b, 1, 3, &rat(1, 10)).map_err(|e| e.to_string())?;
    let cfg = PipelineConfig {
        eps: rat(1, 10),
        eta: AngleBound::from_sin_sq(rat(1, 2)).unwrap(),
        dependence: DependenceConfig { c: rat(1, 4), search: search(), ..DependenceConfig::default() },
        certify: CertifyOptions::default(),
        trials: 5,
        seed: 0,
        exec: Execution::default(),
    };
    let rep = run_pipeline(&pts, &NormOracle::polygon(b), &cfg).map_err(|e| e.to_string())?;
    ensure(rep.passed(), || format!("check {:?}, sample {:?}", rep.check.failures, rep.sample))?;
    Ok(format!(
        "{} points, {} edges, l = {}, {} kills checked",
        rep.n,
        rep.edges,
        rep.dependence.system.l(),
        rep.check.assignments_checked
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("signed path sum on the figure graph", 1, signed_sum_figure),
        ("subset-sum lower bound", 60, subset_sums),
        ("flat-side quadratic count", 10, flat_side),
        ("robust core has no weak cut", 120, robust_core_suite),
        ("color cover contract", 120, prop1_suite),
        ("dependence rows hold on realizations", 120, dependence_soundness),
        ("toy certificates", 300, certificate_suite),
        ("admissible assignment counts", 5, admissible_counts),
        ("end-to-end pipeline", 300, pipeline_run),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let slow = took > Duration::from_secs(budget);
        match &outcome {
            Ok(note) if !slow => println!("PASS  {name} ({took:.1?}): {note}"),
            Ok(note) => println!("FAIL  {name} ({took:.1?} > {budget}s): {note}"),
            Err(why) => println!("FAIL  {name} ({took:.1?}): {why}"),
        }
        failed += usize::from(outcome.is_err() || slow);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
