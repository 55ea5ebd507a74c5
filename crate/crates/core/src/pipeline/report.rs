//! Serializable level report.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::contfrac::{HeckeUnit, JpStatus};
use crate::exact::{AlgebraicReal, IntMatrix, IntPolynomial, Interval};
use crate::modsym::OrbitSummary;
use crate::pseudolattice::{EndRing, RmQuadraticCheck, TauTruncation};
use crate::quadorder::{FieldDiagnostics, GaloisAction, IndefiniteForm, UnitCheck};

use super::jinv::JPair;
use super::ConfigKey;

/// Outcome of one pipeline stage. Failures are recorded, never dropped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "snake_case")]
pub enum Stage<T> {
    Done(T),
    Skipped(String),
    Failed(String),
}

impl<T> Stage<T> {
    pub fn skipped(why: impl Into<String>) -> Self {
        Stage::Skipped(why.into())
    }

    pub fn done(&self) -> Option<&T> {
        match self {
            Stage::Done(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_done(&self) -> bool {
        matches!(self, Stage::Done(_))
    }
}

impl<T, E: std::fmt::Display> From<Result<T, E>> for Stage<T> {
    fn from(r: Result<T, E>) -> Self {
        match r {
            Ok(t) => Stage::Done(t),
            Err(e) => Stage::Failed(e.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelStatus {
    Analyzed,
    /// Genus 1: the projection has rank 1 and no slope exists.
    DegenerateRank,
    NoCuspForms,
    NonSeparating,
    NoAnosovHecke,
    Failed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Verified,
    Refuted,
    UndeterminedAtBound,
}

/// A compute-and-compare check with the inputs it used and where they came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub verdict: Verdict,
    pub detail: String,
    pub values: BTreeMap<String, String>,
    pub provenance: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenReport {
    pub lambda: Vec<AlgebraicReal>,
    /// Unimodular change from the plus-subspace basis to the positive basis.
    pub change: IntMatrix,
    pub positivity_bound: i64,
    /// `(U T_n U^-1 - a_n) lambda = 0` for every computed `n`.
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JpReport {
    pub dimension: usize,
    pub status: JpStatus,
    pub steps: usize,
    #[serde(with = "crate::exact::serde_int::big_rows")]
    pub preperiod: Vec<Vec<BigInt>>,
    #[serde(with = "crate::exact::serde_int::big_rows")]
    pub period: Vec<Vec<BigInt>>,
    #[serde(rename = "A")]
    pub a: Option<IntMatrix>,
    pub charpoly: Option<IntPolynomial>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitReport {
    #[serde(rename = "lambdaA")]
    pub unit: HeckeUnit,
    #[serde(rename = "detA")]
    #[serde(with = "crate::exact::serde_int::big")]
    pub det_a: BigInt,
    #[serde(with = "crate::exact::serde_int::big")]
    pub constant_coefficient: BigInt,
    /// `|Norm(lambda_A)| = 1`, rechecked when the report is assembled.
    pub norm_is_unit: bool,
    pub perron_eigenvector: bool,
    pub unit_in_order: Option<UnitCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauReport {
    pub n: i64,
    pub truncation: TauTruncation,
    pub check: RmQuadraticCheck,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub embedding: usize,
    /// Isolating interval of the separating eigenvalue in this embedding.
    pub root: Interval,
    pub eigenvector: Stage<EigenReport>,
    pub theta: Option<AlgebraicReal>,
    pub certificate: Stage<EndRing>,
    pub jp: Stage<JpReport>,
    pub unit: Stage<UnitReport>,
    pub tau: Vec<TauReport>,
    pub field_diagnostics: Stage<FieldDiagnostics>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCertificate {
    pub i: usize,
    pub j: usize,
    pub certificate: Stage<EndRing>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroupSummary {
    #[serde(rename = "D")]
    #[serde(with = "crate::exact::serde_int::big")]
    pub d: BigInt,
    #[serde(rename = "dK")]
    #[serde(with = "crate::exact::serde_int::big")]
    pub d_k: BigInt,
    #[serde(with = "crate::exact::serde_int::big")]
    pub f: BigInt,
    pub h: usize,
    #[serde(rename = "hPlus")]
    pub h_plus: usize,
    pub cycles: Vec<Vec<IndefiniteForm>>,
    pub unit: AlgebraicReal,
    #[serde(rename = "unitNorm")]
    pub unit_norm: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Eq31Report {
    pub action: GaloisAction,
    /// Set when a table was emitted.
    pub axioms_hold: Option<bool>,
    pub g: usize,
    pub provenance: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem1Diagnostics {
    pub h_r_equals_g: Diagnostic,
    pub ring_class_field: Diagnostic,
    pub lambda_in_order: Diagnostic,
    pub eq31: Stage<Eq31Report>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnosovReport {
    pub orbit: usize,
    pub factor: IntPolynomial,
    /// Which coordinates the rank-2 projection keeps.
    pub projection: String,
    pub embeddings: Vec<EmbeddingReport>,
    pub pair_certificates: Vec<PairCertificate>,
    pub class_group: Stage<ClassGroupSummary>,
    pub j_invariants: Stage<Vec<JPair>>,
    pub theorem1: Theorem1Diagnostics,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub total_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    pub schema: u32,
    pub version: String,
    pub level: i64,
    pub genus: usize,
    pub genus_formula: i64,
    pub new_dimension: i64,
    pub config: ConfigKey,
    pub status: LevelStatus,
    pub message: String,
    pub separating_operator: Option<String>,
    pub hecke_charpolys: BTreeMap<i64, IntPolynomial>,
    pub orbits: Vec<OrbitSummary>,
    /// Sum over orbits and embeddings of `a_p` equals `Tr T_p` for every prime `p` computed.
    pub trace_identity: Option<bool>,
    pub anosov: Vec<AnosovReport>,
    pub timing: Timing,
}

impl LevelReport {
    /// JSON with the timing block removed, for comparisons across runs.
    pub fn json_without_timing(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(o) = v.as_object_mut() {
            o.remove("timing");
        }
        serde_json::to_string_pretty(&v).expect("report serializes")
    }
}
