//! End-to-end analysis of a level: modular symbols, Hecke orbits, eigenvector
//! lattices, Jacobi-Perron units, class groups and the associated diagnostics.

mod cache;
mod jinv;
mod report;
mod theorem;

pub use cache::{cache_get, cache_path, cache_put};
pub use jinv::{j_invariants, j_invariants_from_unit, JInvariantError, JPair};
pub use report::*;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::contfrac::{hecke_unit, jp_expand, verify_perron_eigenvector, HeckeUnit, JPState, JpStatus};
use crate::exact::{IntMatrix, DEFAULT_DEGREE_CAP};
use crate::modsym::{
    eigen_orbits_with, eigenvector_lattice, flag_oldforms, genus_formula, new_dimension, p1, EigenOrbit,
    ModsymError, ModularSymbolSpace, DEFAULT_POSITIVITY_BOUNDS,
};
use crate::pseudolattice::{
    endomorphism_ring, hecke_project, project_pair, rm_quadratic_check, slope, tau_truncate, EndRing,
    PseudoLattice, RMCertificate,
};
use crate::quadorder::{
    class_group, field_diagnostics, fundamental_unit, is_unit_of, OrderError, NORMALITY_DEGREE_CAP,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("level must be a positive integer, got {0}")]
    InvalidLevel(i64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cache entry {path} is corrupt or does not match its key")]
    CacheCorrupt { path: PathBuf },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Clone, Debug)]
pub struct Config {
    pub max_jp_steps: usize,
    pub hecke_bound: i64,
    /// Class groups are enumerated only for discriminants up to this value.
    pub class_group_disc_cap: i64,
    pub cache_dir: Option<PathBuf>,
    pub jobs: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_jp_steps: crate::contfrac::DEFAULT_MAX_STEPS,
            hecke_bound: 20,
            class_group_disc_cap: 10_000_000,
            cache_dir: None,
            jobs: 1,
        }
    }
}

/// Everything that can change a report's content. Cache dir and job count cannot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigKey {
    pub max_jp_steps: usize,
    pub hecke_bound: i64,
    pub class_group_disc_cap: i64,
    pub positivity_bounds: Vec<i64>,
    pub degree_cap: usize,
    pub normality_degree_cap: usize,
}

impl Config {
    pub fn key(&self) -> ConfigKey {
        ConfigKey {
            max_jp_steps: self.max_jp_steps,
            hecke_bound: self.hecke_bound,
            class_group_disc_cap: self.class_group_disc_cap,
            positivity_bounds: DEFAULT_POSITIVITY_BOUNDS.to_vec(),
            degree_cap: DEFAULT_DEGREE_CAP,
            normality_degree_cap: NORMALITY_DEGREE_CAP,
        }
    }

    /// First 16 hex digits of the SHA-256 of the key's JSON.
    pub fn hash(&self) -> String {
        let body = serde_json::to_vec(&self.key()).expect("config key serializes");
        hex::encode(Sha256::digest(&body))[..16].to_string()
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.max_jp_steps == 0 {
            return Err(PipelineError::InvalidConfig("max-jp-steps must be positive".into()));
        }
        if self.hecke_bound < 2 {
            return Err(PipelineError::InvalidConfig("hecke-bound must be at least 2".into()));
        }
        if self.class_group_disc_cap < 1 {
            return Err(PipelineError::InvalidConfig("class-group discriminant cap must be positive".into()));
        }
        if self.jobs == 0 {
            return Err(PipelineError::InvalidConfig("jobs must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheOutcome {
    Hit,
    Miss,
    Disabled,
}

fn internal<E: std::fmt::Display>(e: E) -> PipelineError {
    PipelineError::Internal(e.to_string())
}

/// Analyze one level. Stage failures are recorded in the report; only invalid
/// input and broken invariants are errors.
pub fn analyze_level(level: i64, config: &Config) -> Result<LevelReport, PipelineError> {
    config.validate()?;
    if level < 1 {
        return Err(PipelineError::InvalidLevel(level));
    }
    let start = Instant::now();
    let space = ModularSymbolSpace::new(level).map_err(internal)?;
    let g = space.genus();
    let mut report = LevelReport {
        schema: SCHEMA_VERSION,
        version: env!("CARGO_PKG_VERSION").to_string(),
        level,
        genus: g,
        genus_formula: genus_formula(level),
        new_dimension: new_dimension(level),
        config: config.key(),
        status: LevelStatus::Analyzed,
        message: String::new(),
        separating_operator: None,
        hecke_charpolys: BTreeMap::new(),
        orbits: Vec::new(),
        trace_identity: None,
        anosov: Vec::new(),
        timing: Timing { total_ms: 0 },
    };
    if g as i64 != report.genus_formula {
        return Err(PipelineError::Internal(format!(
            "plus-subspace has dimension {g}, genus formula gives {}",
            report.genus_formula
        )));
    }
    if g == 0 {
        report.status = LevelStatus::NoCuspForms;
        report.message = "genus 0: no cusp forms".into();
        return Ok(finish(report, start));
    }

    let ops = space.hecke_operators(config.hecke_bound).map_err(internal)?;
    for (&n, t) in &ops {
        if is_prime(n) {
            report.hecke_charpolys.insert(n, t.charpoly());
        }
    }

    let mut orbits = match eigen_orbits_with(&space, &ops) {
        Ok((sep, orbits)) => {
            report.separating_operator = Some(sep.label.clone());
            orbits
        }
        Err(ModsymError::NonSeparating { tried }) => {
            report.status = LevelStatus::NonSeparating;
            report.message = format!(
                "no separating Hecke operator among {} candidates; old subspace has dimension {}",
                tried.len(),
                g as i64 - report.new_dimension
            );
            return Ok(finish(report, start));
        }
        Err(e) => {
            report.status = LevelStatus::Failed;
            report.message = format!("eigenform decomposition failed: {e}");
            return Ok(finish(report, start));
        }
    };
    if let Err(e) = flag_oldforms(level, &mut orbits, config.hecke_bound) {
        report.message = format!("old-form detection failed: {e}");
    }
    report.orbits = orbits.iter().map(EigenOrbit::summary).collect();
    report.trace_identity = Some(trace_identity(&orbits, &ops));

    let anosov: Vec<(usize, &EigenOrbit)> = orbits.iter().enumerate().filter(|(_, o)| o.is_anosov_hecke).collect();
    if anosov.is_empty() {
        let degrees: Vec<usize> = orbits.iter().map(EigenOrbit::degree).collect();
        report.status = LevelStatus::NoAnosovHecke;
        report.message = format!(
            "no Anosov-Hecke eigenform: {} Galois orbits of degrees {degrees:?} in genus {g}",
            orbits.len()
        );
        return Ok(finish(report, start));
    }
    if g == 1 {
        report.status = LevelStatus::DegenerateRank;
        report.message = "genus 1: the Hecke projection has rank 1, Jacobi-Perron skipped".into();
    }
    for (idx, orbit) in anosov {
        report.anosov.push(analyze_orbit(&space, &ops, idx, orbit, config)?);
    }
    Ok(finish(report, start))
}

fn finish(mut report: LevelReport, start: Instant) -> LevelReport {
    report.timing.total_ms = start.elapsed().as_millis() as u64;
    report
}

/// `sum over orbits and embeddings of a_p = Tr T_p` for every prime index computed.
fn trace_identity(orbits: &[EigenOrbit], ops: &BTreeMap<i64, IntMatrix>) -> bool {
    ops.iter().filter(|(&n, _)| is_prime(n)).all(|(&p, t)| {
        let total = orbits.iter().try_fold(BigRational::zero(), |acc, o| {
            o.eigenvalues.get(&p).map(|a| acc + a.trace())
        });
        total == Some(BigRational::from_integer(t.trace()))
    })
}

/// Per-embedding intermediate results kept for the orbit-level stages.
struct EmbeddingWork {
    report: EmbeddingReport,
    lattice: Option<PseudoLattice>,
    jacobian: Option<PseudoLattice>,
    unit: Option<HeckeUnit>,
}

fn analyze_orbit(
    space: &ModularSymbolSpace,
    ops: &BTreeMap<i64, IntMatrix>,
    index: usize,
    orbit: &EigenOrbit,
    config: &Config,
) -> Result<AnosovReport, PipelineError> {
    let g = space.genus();
    let work: Vec<EmbeddingWork> = (0..orbit.degree())
        .into_par_iter()
        .map(|e| analyze_embedding(space, ops, orbit, e, config))
        .collect::<Result<_, _>>()?;

    let degenerate = "genus 1: rank-1 projection";
    let pair_certificates = match &work[0].jacobian {
        Some(jac) if g > 2 => {
            let mut out = Vec::new();
            for i in 0..g {
                for j in i + 1..g {
                    let cert = project_pair(jac, i, j).and_then(|m| endomorphism_ring(&m));
                    out.push(PairCertificate { i, j, certificate: cert.into() });
                }
            }
            out
        }
        Some(_) => vec![PairCertificate {
            i: 0,
            j: 1,
            certificate: work[0].report.certificate.clone(),
        }],
        None => Vec::new(),
    };

    let certificate: Option<&RMCertificate> = match work[0].report.certificate.done() {
        Some(EndRing::RealMultiplication(c)) => Some(c),
        _ => None,
    };
    let mut class_group_stage: Stage<ClassGroupSummary> = if g == 1 {
        Stage::skipped(degenerate)
    } else {
        Stage::Skipped("projected lattice has no real multiplication".into())
    };
    let mut cg = None;
    if let Some(cert) = certificate {
        let order = cert.order();
        if order.d > BigInt::from(config.class_group_disc_cap) {
            class_group_stage = Stage::Skipped(format!(
                "discriminant {} exceeds the class-group cap {}",
                order.d, config.class_group_disc_cap
            ));
        } else {
            match class_group(&order).and_then(|c| fundamental_unit(&order).map(|u| (c, u))) {
                Ok((c, u)) => {
                    class_group_stage = Stage::Done(ClassGroupSummary {
                        d: order.d.clone(),
                        d_k: order.d_k.clone(),
                        f: order.f.clone(),
                        h: c.h,
                        h_plus: c.h_plus,
                        cycles: c.cycles.clone(),
                        unit: u.unit.clone(),
                        unit_norm: u.norm,
                    });
                    cg = Some(c);
                }
                Err(e) => class_group_stage = Stage::Failed(e.to_string()),
            }
        }
    }

    let lattices: Option<Vec<PseudoLattice>> = work.iter().map(|w| w.lattice.clone()).collect();
    let j_stage: Stage<Vec<JPair>> = match (&work[0].unit, &lattices) {
        (Some(unit), Some(ms)) => j_invariants_from_unit(unit, ms).into(),
        _ if g == 1 => Stage::skipped(degenerate),
        _ => Stage::Skipped("no periodic expansion in the first embedding".into()),
    };

    let theorem1 = theorem::diagnostics(theorem::Inputs {
        g,
        certificate,
        class_group: cg.as_ref(),
        class_group_stage: &class_group_stage,
        unit: work[0].unit.as_ref(),
        field: work[0].report.field_diagnostics.done(),
        lattices: lattices.as_deref(),
        j: j_stage.done().map(|v| v.as_slice()),
        jp_status: work[0].report.jp.done().map(|r| r.status),
        max_jp_steps: config.max_jp_steps,
    })?;

    Ok(AnosovReport {
        orbit: index,
        factor: orbit.factor.clone(),
        projection: "Z + Z lambda_2/lambda_1".into(),
        embeddings: work.into_iter().map(|w| w.report).collect(),
        pair_certificates,
        class_group: class_group_stage,
        j_invariants: j_stage,
        theorem1,
    })
}

fn analyze_embedding(
    space: &ModularSymbolSpace,
    ops: &BTreeMap<i64, IntMatrix>,
    orbit: &EigenOrbit,
    e: usize,
    config: &Config,
) -> Result<EmbeddingWork, PipelineError> {
    let mut report = EmbeddingReport {
        embedding: e,
        root: orbit.embeddings[e].interval().clone(),
        eigenvector: Stage::skipped("not reached"),
        theta: None,
        certificate: Stage::skipped("not reached"),
        jp: Stage::skipped("not reached"),
        unit: Stage::skipped("not reached"),
        tau: Vec::new(),
        field_diagnostics: Stage::skipped("not reached"),
    };
    let bare = |report| EmbeddingWork {
        report,
        lattice: None,
        jacobian: None,
        unit: None,
    };

    let ev = match eigenvector_lattice(space, orbit, e) {
        Ok(ev) => ev,
        Err(err) => {
            report.eigenvector = Stage::Failed(err.to_string());
            return Ok(bare(report));
        }
    };
    if !ev.verify(orbit, ops) {
        return Err(PipelineError::Internal(format!(
            "eigenvector in embedding {e} fails the Hecke equations"
        )));
    }
    report.eigenvector = Stage::Done(EigenReport {
        lambda: ev.lambda.clone(),
        change: ev.change.clone(),
        positivity_bound: ev.bound,
        verified: true,
    });
    if space.genus() == 1 {
        let why = "genus 1: rank-1 projection";
        report.certificate = Stage::skipped(why);
        report.jp = Stage::skipped(why);
        report.unit = Stage::skipped(why);
        report.field_diagnostics = Stage::skipped(why);
        return Ok(bare(report));
    }

    let jac = PseudoLattice::from_periods(&ev.lambda).map_err(internal)?;
    let m_h = match hecke_project(&jac) {
        Ok(m) => m,
        Err(err) => {
            report.certificate = Stage::Failed(err.to_string());
            return Ok(bare(report));
        }
    };
    let theta = slope(&m_h);
    report.certificate = endomorphism_ring(&m_h).into();
    report.theta = Some(theta.clone());
    let order = match report.certificate.done() {
        Some(EndRing::RealMultiplication(c)) => Some(c.order()),
        _ => None,
    };

    for (&n, t) in ops.iter().filter(|(&n, _)| is_prime(n)) {
        if let Ok(truncation) = tau_truncate(&ev.transform(t)) {
            let check = rm_quadratic_check(&theta, &truncation.tau);
            report.tau.push(TauReport { n, truncation, check });
        }
    }

    let mut unit_out = None;
    let state = JPState::from_vector(&ev.lambda).map_err(internal)?;
    match jp_expand(&state, config.max_jp_steps) {
        Err(err) => report.jp = Stage::Failed(err.to_string()),
        Ok(exp) => {
            let a = exp.period_matrix();
            report.jp = Stage::Done(JpReport {
                dimension: exp.dimension,
                status: exp.status,
                steps: exp.digits.len(),
                preperiod: exp.preperiod().to_vec(),
                period: exp.period().to_vec(),
                a: a.clone(),
                charpoly: a.as_ref().map(IntMatrix::charpoly),
            });
            match (a, exp.period_state.as_ref()) {
                (Some(a), Some(ps)) if exp.status == JpStatus::Periodic => match hecke_unit(&exp) {
                    Ok(unit) => {
                        report.unit = Stage::Done(unit_report(e, &a, ps, &unit, order.as_ref())?);
                        report.field_diagnostics = match &order {
                            Some(o) => match field_diagnostics(&unit, o) {
                                Ok(d) => Stage::Done(d),
                                Err(OrderError::DiagnosticSkipped(why)) => Stage::Skipped(why),
                                Err(err) => Stage::Failed(err.to_string()),
                            },
                            None => Stage::skipped("projected lattice has no real multiplication"),
                        };
                        unit_out = Some(unit);
                    }
                    Err(err) => report.unit = Stage::Failed(err.to_string()),
                },
                _ => {
                    let why = format!("expansion status {}", exp.status.as_str());
                    report.unit = Stage::Skipped(why.clone());
                    report.field_diagnostics = Stage::Skipped(why);
                }
            }
        }
    }
    Ok(EmbeddingWork {
        report,
        lattice: Some(m_h),
        jacobian: Some(jac),
        unit: unit_out,
    })
}

/// Unit certificate; a failure here is a broken invariant, not a stage outcome.
fn unit_report(
    e: usize,
    a: &IntMatrix,
    state: &JPState,
    unit: &HeckeUnit,
    order: Option<&crate::quadorder::QuadOrder>,
) -> Result<UnitReport, PipelineError> {
    let det_a = a.det();
    let constant_coefficient = a.charpoly().coeff(0);
    let norm_is_unit = unit.value.norm().abs().is_one();
    if !det_a.abs().is_one() || !constant_coefficient.abs().is_one() || !norm_is_unit {
        return Err(PipelineError::Internal(format!(
            "embedding {e}: period matrix is not unimodular or lambda_A is not a unit"
        )));
    }
    let perron = verify_perron_eigenvector(a, state, unit).map_err(internal)?;
    if !perron {
        return Err(PipelineError::Internal(format!(
            "embedding {e}: lambda_A has no Perron eigenvector matching the expansion"
        )));
    }
    Ok(UnitReport {
        unit: unit.clone(),
        det_a,
        constant_coefficient,
        norm_is_unit,
        perron_eigenvector: perron,
        unit_in_order: order.map(|o| is_unit_of(&unit.value, o)),
    })
}

fn is_prime(n: i64) -> bool {
    n > 1 && p1::prime_divisors(n) == [n]
}

/// Look the level up in the cache, computing and storing it on a miss.
pub fn analyze_level_cached(level: i64, config: &Config) -> Result<(LevelReport, CacheOutcome), PipelineError> {
    config.validate()?;
    if level < 1 {
        return Err(PipelineError::InvalidLevel(level));
    }
    let Some(dir) = &config.cache_dir else {
        return Ok((analyze_level(level, config)?, CacheOutcome::Disabled));
    };
    if let Some(r) = cache_get(dir, level, config)? {
        return Ok((r, CacheOutcome::Hit));
    }
    let r = analyze_level(level, config)?;
    cache_put(dir, &r, config)?;
    Ok((r, CacheOutcome::Miss))
}

/// Analyze several levels on a pool of `config.jobs` threads; output order follows input.
pub fn analyze_levels(levels: &[i64], config: &Config) -> Result<Vec<LevelReport>, PipelineError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(internal)?;
    pool.install(|| {
        levels
            .par_iter()
            .map(|&n| analyze_level_cached(n, config).map(|(r, _)| r))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> Config {
        Config::default()
    }

    #[test]
    fn level_eleven_is_degenerate() {
        let r = analyze_level(11, &cfg()).unwrap();
        assert_eq!(r.status, LevelStatus::DegenerateRank);
        assert_eq!(r.genus, 1);
        let e = &r.anosov[0].embeddings[0];
        assert!(e.eigenvector.is_done());
        assert!(matches!(e.jp, Stage::Skipped(_)));
    }

    #[test]
    fn level_twenty_three_full() {
        let r = analyze_level(23, &cfg()).unwrap();
        assert_eq!(r.status, LevelStatus::Analyzed);
        assert_eq!(r.genus, 2);
        assert_eq!(r.orbits.len(), 1);
        assert_eq!(r.trace_identity, Some(true));
        assert_eq!(r.anosov[0].embeddings.len(), 2);
    }

    #[test]
    fn level_thirty_seven_has_no_anosov_form() {
        let r = analyze_level(37, &cfg()).unwrap();
        assert_eq!(r.status, LevelStatus::NoAnosovHecke);
        assert!(r.message.contains("no Anosov-Hecke eigenform"));
        assert_eq!(r.orbits.len(), 2);
    }

    #[test]
    fn invalid_input() {
        assert!(matches!(analyze_level(0, &cfg()), Err(PipelineError::InvalidLevel(0))));
        let bad = Config { max_jp_steps: 0, ..cfg() };
        assert!(matches!(analyze_level(11, &bad), Err(PipelineError::InvalidConfig(_))));
    }

    #[test]
    fn genus_zero_and_config_hash() {
        assert_eq!(analyze_level(1, &cfg()).unwrap().status, LevelStatus::NoCuspForms);
        let other = Config { hecke_bound: 12, ..cfg() };
        assert_ne!(cfg().hash(), other.hash());
        let jobs = Config { jobs: 4, ..cfg() };
        assert_eq!(cfg().hash(), jobs.hash());
    }

    #[test]
    fn cache_round_trip_miss_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let config = Config { cache_dir: Some(dir.path().to_path_buf()), ..cfg() };
        let (r, o) = analyze_level_cached(11, &config).unwrap();
        assert_eq!(o, CacheOutcome::Miss);
        let (r2, o2) = analyze_level_cached(11, &config).unwrap();
        assert_eq!(o2, CacheOutcome::Hit);
        assert_eq!(r, r2);

        let changed = Config { hecke_bound: 12, ..config.clone() };
        assert!(cache_get(dir.path(), 11, &changed).unwrap().is_none());

        let path = cache_path(dir.path(), 11, &config);
        let body = std::fs::read(&path).unwrap();
        std::fs::write(&path, &body[..body.len() / 2]).unwrap();
        assert!(matches!(cache_get(dir.path(), 11, &config), Err(PipelineError::CacheCorrupt { .. })));
    }
}
