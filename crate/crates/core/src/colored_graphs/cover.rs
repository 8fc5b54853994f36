use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{min_degree_core, robust_core_on, CutSearch, CutStep, Dsu, EdgeColoredGraph, RobustCoreError};
use crate::linalg::Rational;

/// Greedy cover of `W`: chosen colors and the component counts `m_0, m_1, ...`
/// with `m_0 = |W|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyCover {
    pub colors: Vec<usize>,
    pub components: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoverError {
    #[error("G[W] stays disconnected: {components} components after colors {chosen:?}")]
    Disconnected { chosen: Vec<usize>, components: usize },
    #[error("the vertex set is empty")]
    EmptySet,
}

/// Add, one at a time, the color leaving `G[I ∪ {i}, W]` with the fewest
/// components (ties to the smallest color id) until it is connected.
pub fn greedy_color_cover(g: &EdgeColoredGraph, w: &[usize], search: &CutSearch) -> Result<GreedyCover, CoverError> {
    if w.is_empty() {
        return Err(CoverError::EmptySet);
    }
    let mut local = vec![usize::MAX; g.n()];
    for (i, &v) in w.iter().enumerate() {
        local[v] = i;
    }
    let mut by_color: std::collections::BTreeMap<usize, Vec<(usize, usize)>> = Default::default();
    for i in g.induced_edges(w) {
        let (a, b) = g.edges()[i];
        by_color.entry(g.colors()[i]).or_default().push((local[a], local[b]));
    }
    let palette: Vec<(usize, Vec<(usize, usize)>)> = by_color.into_iter().collect();
    let mut used = vec![false; palette.len()];
    let mut dsu = Dsu::new(w.len());
    let mut cover = GreedyCover { colors: Vec::new(), components: vec![w.len()] };
    while dsu.sets() > 1 {
        let best = search.exec.min_by_key_range(0, palette.len() as u64, |idx| {
            let idx = idx as usize;
            if used[idx] {
                return None;
            }
            let mut trial = dsu.clone();
            for &(a, b) in &palette[idx].1 {
                trial.union(a, b);
            }
            Some(((trial.sets(), palette[idx].0), ()))
        });
        match best {
            Some(((sets, color), idx, ())) if sets < dsu.sets() => {
                used[idx as usize] = true;
                for &(a, b) in &palette[idx as usize].1 {
                    dsu.union(a, b);
                }
                cover.colors.push(color);
                cover.components.push(sets);
            }
            _ => {
                return Err(CoverError::Disconnected { chosen: cover.colors, components: dsu.sets() });
            }
        }
    }
    Ok(cover)
}

/// Output of [`prop1`]: `G[I, W]` connected and at least `q·|I|` colors on
/// `G[W]`. Vertices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverResult {
    pub w: Vec<usize>,
    pub colors: Vec<usize>,
    /// `(i_j, m_j)` per greedy step; `m_0 = |W|` is implicit.
    pub trace: Vec<(usize, usize)>,
    pub colors_in_w: usize,
    pub r: Rational,
    pub core_size: usize,
    pub robust_steps: Vec<CutStep>,
    pub robust_hypothesis_met: bool,
    /// `|E| >= C q n log n log log n` (reported only).
    pub edge_hypothesis_met: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ContractViolation {
    #[error("W has {0} vertices")]
    TooSmall(usize),
    #[error("G[I, W] is not connected")]
    Disconnected,
    #[error("G[W] carries {found} colors, fewer than q·|I| = {needed}")]
    TooFewColors { found: usize, needed: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Prop1Error {
    #[error("need at least 4 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("graph has no edges")]
    NoEdges,
    #[error("edge coloring is not proper")]
    NotProper,
    #[error("q must exceed 1 and C must be positive")]
    BadParameters,
    #[error("robust core failed: {0}")]
    Robust(RobustCoreError),
    #[error("greedy cover failed: {0}")]
    Cover(CoverError),
    #[error("contract not met: {violation}")]
    Contract { violation: ContractViolation, result: Box<CoverResult> },
}

/// `r = C·q·log2 log2 n` rounded to a multiple of 1/64 (at least 1/64).
pub(crate) fn cut_scale(n: usize, q: &Rational, c: &Rational) -> Rational {
    let loglog = (n as f64).log2().log2();
    let r = Rational::from_f64_dyadic(c.to_f64() * q.to_f64() * loglog, 6);
    r.max(Rational::new(1, 64))
}

/// Core, robust core, greedy cover; returned only when the contract holds.
pub fn prop1(g: &EdgeColoredGraph, q: &Rational, c: &Rational, search: &CutSearch) -> Result<CoverResult, Prop1Error> {
    let n = g.n();
    if n < 4 {
        return Err(Prop1Error::TooFewVertices(n));
    }
    if g.edge_count() == 0 {
        return Err(Prop1Error::NoEdges);
    }
    if *q <= Rational::one() || !c.is_positive() {
        return Err(Prop1Error::BadParameters);
    }
    if !g.is_proper() {
        return Err(Prop1Error::NotProper);
    }
    let r = cut_scale(n, q, c);
    let nf = n as f64;
    let edge_hypothesis_met =
        g.edge_count() as f64 >= c.to_f64() * q.to_f64() * nf * nf.log2() * nf.log2().log2();
    let core = min_degree_core(g);
    let robust = robust_core_on(g, &core, &r, search).map_err(Prop1Error::Robust)?;
    let greedy = greedy_color_cover(g, &robust.w, search).map_err(Prop1Error::Cover)?;
    let result = CoverResult {
        w: robust.w.clone(),
        colors: greedy.colors.clone(),
        trace: greedy.colors.iter().copied().zip(greedy.components[1..].iter().copied()).collect(),
        colors_in_w: g.colors_on(&robust.w).len(),
        r,
        core_size: core.len(),
        robust_steps: robust.steps,
        robust_hypothesis_met: robust.hypothesis_met,
        edge_hypothesis_met,
    };
    match check_cover(g, &result.w, &result.colors, q) {
        Ok(_) => Ok(result),
        Err(violation) => Err(Prop1Error::Contract { violation, result: Box::new(result) }),
    }
}

/// Independent contract check: `|W| >= 2`, `G[I, W]` connected (BFS), and
/// at least `q·|I|` distinct colors on `G[W]`. Returns the color count.
pub fn check_cover(g: &EdgeColoredGraph, w: &[usize], colors: &[usize], q: &Rational) -> Result<usize, ContractViolation> {
    if w.len() < 2 {
        return Err(ContractViolation::TooSmall(w.len()));
    }
    let inside: BTreeSet<usize> = w.iter().copied().collect();
    let allowed: BTreeSet<usize> = colors.iter().copied().collect();
    let mut seen = BTreeSet::from([w[0]]);
    let mut queue = VecDeque::from([w[0]]);
    while let Some(v) = queue.pop_front() {
        for &(u, e) in g.adjacency(v) {
            if inside.contains(&u) && allowed.contains(&g.colors()[e]) && seen.insert(u) {
                queue.push_back(u);
            }
        }
    }
    if seen.len() != inside.len() {
        return Err(ContractViolation::Disconnected);
    }
    let mut present = BTreeSet::new();
    for (&(a, b), &c) in g.edges().iter().zip(g.colors()) {
        if inside.contains(&a) && inside.contains(&b) {
            present.insert(c);
        }
    }
    let needed = q * &Rational::from_int(allowed.len() as i64);
    if Rational::from_int(present.len() as i64) < needed {
        return Err(ContractViolation::TooFewColors { found: present.len(), needed });
    }
    Ok(present.len())
}
