use serde::{Deserialize, Serialize};

use super::MareProblem;
use crate::error::{Error, Result};
use crate::mstruct::{
    classify_zm, is_irreducible, null_pair, regularity_witness, zero_eigen_structure,
    AssumptionReport, MClassification, MKind, NullPair, RegularityReport,
};

/// Drifts at most this far from zero count as critical.
pub const DRIFT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    NonsingularK,
    SingularNoncritical,
    Critical,
    AssumptionFails,
    NotRegular,
}

impl Regime {
    /// Regimes in which the doubling solver and the certificate checks are
    /// guaranteed to work.
    pub fn is_supported(self) -> bool {
        matches!(self, Regime::NonsingularK | Regime::SingularNoncritical)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProblemClass {
    pub k_class: MClassification,
    pub regular: RegularityReport,
    pub irreducible: bool,
    pub assumption1: AssumptionReport,
    pub nulls: Option<NullPair>,
    pub regime: Regime,
}

impl ProblemClass {
    pub fn drift(&self) -> Option<f64> {
        self.nulls.as_ref().map(|p| p.drift)
    }
}

pub fn classify_problem(p: &MareProblem) -> Result<ProblemClass> {
    let k = p.k();
    let k_class = classify_zm(&k)?;
    if k_class.kind == MKind::NotZ {
        return Err(Error::NotZMatrix(
            "K has a positive off-diagonal entry".into(),
        ));
    }
    let regular = regularity_witness(&k, &k_class)?;
    let irreducible = is_irreducible(&k);
    let assumption1 = zero_eigen_structure(&p.hmat())?;

    let singular = k_class.kind == MKind::SingularM;
    let nulls = if singular && assumption1.holds {
        match null_pair(&k, p.n()) {
            Ok(pair) => Some(pair),
            Err(
                Error::NotSingular | Error::AmbiguousKernel { .. } | Error::NotNonnegative { .. },
            ) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    let regime = match k_class.kind {
        MKind::NonsingularM => Regime::NonsingularK,
        MKind::NotZ | MKind::ZNotM => Regime::NotRegular,
        MKind::SingularM if !regular.regular => Regime::NotRegular,
        MKind::SingularM => match &nulls {
            None => Regime::AssumptionFails,
            Some(pair) if pair.drift.abs() <= DRIFT_TOL => Regime::Critical,
            Some(_) => Regime::SingularNoncritical,
        },
    };

    Ok(ProblemClass {
        k_class,
        regular,
        irreducible,
        assumption1,
        nulls,
        regime,
    })
}
