//! The two-step classification: null-congruence search, then phantom
//! detection on the computed invariants.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::chart::Metric;
use crate::criterion::{search_null_congruence, VectorField};
use crate::curvature::CurvatureBundle;
use crate::error::Result;
use crate::invariants::{detect_phantom_functions, evaluate_invariants, standard_invariant_set, InvariantReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// No candidate field, or candidates but every metric function shows
    /// up in some invariant of the truncated set.
    ScalarCharacterizable,
    /// Candidates exist and some metric functions appear in no invariant
    /// up to the truncation order.
    PhantomsDetected,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::ScalarCharacterizable => "SCALAR-CHARACTERIZABLE",
            Classification::PhantomsDetected => "PHANTOMS-DETECTED",
        })
    }
}

#[derive(Debug, Clone)]
pub struct ClassificationReport {
    pub order: usize,
    pub candidates: Vec<VectorField>,
    pub invariants: Option<InvariantReport>,
    pub phantoms: BTreeSet<String>,
    pub verdict: Classification,
}

pub fn classify_geometry(g: &Arc<Metric>, order: usize) -> Result<ClassificationReport> {
    let candidates = search_null_congruence(g)?;
    if candidates.is_empty() {
        return Ok(ClassificationReport {
            order,
            candidates,
            invariants: None,
            phantoms: BTreeSet::new(),
            verdict: Classification::ScalarCharacterizable,
        });
    }
    let bundle = CurvatureBundle::new(g.clone(), order)?;
    let report = evaluate_invariants(&standard_invariant_set(order, g.dim()), &bundle)?;
    let phantoms = detect_phantom_functions(g, &report);
    let verdict = if phantoms.is_empty() {
        Classification::ScalarCharacterizable
    } else {
        Classification::PhantomsDetected
    };
    Ok(ClassificationReport {
        order,
        candidates,
        invariants: Some(report),
        phantoms,
        verdict,
    })
}
