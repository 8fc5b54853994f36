//! Points and a base norm in, checked certificate out.

use serde::{Deserialize, Serialize};

use crate::certifier::{
    certify_box, check_certificate, sample_verify, with_base, witness_norm, CertifyError, CertifyOptions, CheckReport,
    NormCertificate, SampleReport,
};
use crate::constructions::PointSeq;
use crate::exec::Execution;
use crate::linalg::Rational;
use crate::lindep::{extract_dependences, verify_on_realization_with, DependenceConfig, DependenceReport, LindepError};
use crate::norms::{choose_delta0, polygon_approx, AngleBound, ApproxError, NormOracle, SymmetricPolygon};
use crate::udg::build_udg_with;

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub eps: Rational,
    pub eta: AngleBound,
    pub dependence: DependenceConfig,
    pub certify: CertifyOptions,
    pub trials: usize,
    pub seed: u64,
    pub exec: Execution,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PipelineError {
    #[error("dependence extraction failed: {0}")]
    Lindep(#[from] LindepError),
    #[error("polygon approximation failed: {0}")]
    Approx(#[from] ApproxError),
    #[error("no admissible delta0 for this polygon and tolerance")]
    NoDelta,
    #[error("certification failed: {0}")]
    Certify(#[from] CertifyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub n: usize,
    pub edges: usize,
    pub colors: usize,
    pub dependence: DependenceReport,
    /// Every row holds on the input point set.
    pub rows_hold_on_input: bool,
    /// `B1` is the base polygon itself rather than an approximation.
    pub direct_polygon: bool,
    pub side_pairs: usize,
    pub certificate: NormCertificate,
    pub check: CheckReport,
    pub sample: SampleReport,
}

impl PipelineReport {
    pub fn passed(&self) -> bool {
        self.rows_hold_on_input && self.check.ok && !self.sample.found_counterexample()
    }
}

/// Use an η-short polygonal base directly, otherwise approximate it.
pub fn choose_polygon(b0: &NormOracle, eps: &Rational, eta: &AngleBound) -> Result<(SymmetricPolygon, bool), ApproxError> {
    match b0.as_polygon() {
        Some(p) if p.is_eta_short(eta) => Ok((p.clone(), true)),
        _ => polygon_approx(b0, eps, eta).map(|p| (p, false)),
    }
}

pub fn run_pipeline(points: &PointSeq, b0: &NormOracle, cfg: &PipelineConfig) -> Result<PipelineReport, PipelineError> {
    let g = build_udg_with(points, b0, cfg.exec);
    let dependence = extract_dependences(&g, &cfg.dependence)?;
    let rows_hold_on_input = verify_on_realization_with(&dependence.system, &g, points, b0)?;
    let (b1, direct_polygon) = choose_polygon(b0, &cfg.eps, &cfg.eta)?;
    let delta0 = choose_delta0(&b1, b0, &cfg.eps, &cfg.eta).ok_or(PipelineError::NoDelta)?;
    let cert = certify_box(&dependence.system, &b1, &delta0, &cfg.eta, &cfg.certify)?;
    let cert = with_base(witness_norm(cert)?, b0.clone(), cfg.eps.clone());
    let check = check_certificate(&cert);
    let sample = sample_verify(&cert, cfg.trials, cfg.seed, cfg.exec);
    Ok(PipelineReport {
        n: g.n(),
        edges: g.edge_count(),
        colors: g.k(),
        dependence,
        rows_hold_on_input,
        direct_polygon,
        side_pairs: b1.m(),
        certificate: cert,
        check,
        sample,
    })
}
