//! Mannheim pairs: the curvature test, partner construction and verification of
//! a constructed pair in E3 and E4.

mod lambda;
mod partner;
mod verify;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use lambda::{mannheim_lambda_3d, mannheim_lambda_4d, MannheimEstimate};
pub use partner::{construct_partner_3d, construct_partner_4d, Partner, MIN_PARTNER_SPEED};
pub use verify::{
    partner_ode_residual_3d, psi_prime_identity, verify_pair_3d, verify_pair_4d, OdeResidual, PairReport3, PairReport4,
    PairSample3, PairSample4, PsiIdentity, Verdicts3, Verdicts4, MIN_COVERAGE,
};

/// Pairs `(s, s*)` realizing the correspondence between a curve and its partner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct CorrespondenceMap {
    pairs: Vec<(f64, f64)>,
}

impl CorrespondenceMap {
    /// Both columns must be finite and strictly increasing.
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        for (row, p) in pairs.iter().enumerate() {
            if !p.0.is_finite() || !p.1.is_finite() {
                return Err(Error::NonMonotoneCorrespondence { row });
            }
            if row > 0 {
                let q = pairs[row - 1];
                if !(p.0 > q.0 && p.1 > q.1) {
                    return Err(Error::NonMonotoneCorrespondence { row });
                }
            }
        }
        Ok(Self { pairs })
    }

    pub fn identity(s: &[f64]) -> Result<Self> {
        Self::new(s.iter().map(|v| (*v, *v)).collect())
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn source(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn target(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.1).collect()
    }
}

impl TryFrom<Vec<(f64, f64)>> for CorrespondenceMap {
    type Error = Error;

    fn try_from(pairs: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(pairs)
    }
}

impl From<CorrespondenceMap> for Vec<(f64, f64)> {
    fn from(m: CorrespondenceMap) -> Self {
        m.pairs
    }
}

/// Summary of a sampled profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub count: usize,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(Self { count: values.len(), mean, std: var.sqrt(), min, max })
    }

    /// `std / |mean|`.
    pub fn relative_spread(&self) -> f64 {
        self.std / self.mean.abs()
    }
}

pub(crate) fn max_abs(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    values.into_iter().map(f64::abs).reduce(f64::max)
}
