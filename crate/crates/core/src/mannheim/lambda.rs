use serde::{Deserialize, Serialize};

use crate::curve::Dimension;
use crate::error::{Error, Result};
use crate::frenet::CurvatureProfile;

/// Pointwise fit of `first = λ (first² + second²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MannheimEstimate {
    /// Mean of `per_sample`.
    pub lambda: f64,
    pub residual_max: f64,
    pub residual_rms: f64,
    pub verdict: bool,
    pub tolerance: f64,
    pub per_sample: Vec<f64>,
    /// `|first_i - λ (first_i² + second_i²)|`.
    pub residuals: Vec<f64>,
}

fn estimate(first: &[f64], second: &[f64], tol: f64) -> Result<MannheimEstimate> {
    if first.is_empty() {
        return Err(Error::EmptyProfile);
    }
    let per_sample: Vec<f64> = first.iter().zip(second).map(|(k, r)| k / (k * k + r * r)).collect();
    let lambda = per_sample.iter().sum::<f64>() / per_sample.len() as f64;
    let residuals: Vec<f64> = first.iter().zip(second).map(|(k, r)| (k - lambda * (k * k + r * r)).abs()).collect();
    let residual_max = residuals.iter().copied().fold(0.0, f64::max);
    let residual_rms = (residuals.iter().map(|v| v * v).sum::<f64>() / residuals.len() as f64).sqrt();
    Ok(MannheimEstimate {
        lambda,
        residual_max,
        residual_rms,
        verdict: residual_max <= tol,
        tolerance: tol,
        per_sample,
        residuals,
    })
}

/// Tests `k = λ (k² + r²)` along an E3 profile.
pub fn mannheim_lambda_3d(profile: &CurvatureProfile, tol: f64) -> Result<MannheimEstimate> {
    profile.dimension.check(Dimension::Three)?;
    estimate(&profile.curvature, &profile.torsion, tol)
}

/// Tests `K = λ (K² + k²)` along an E4 profile; bitorsion does not enter.
pub fn mannheim_lambda_4d(profile: &CurvatureProfile, tol: f64) -> Result<MannheimEstimate> {
    profile.dimension.check(Dimension::Four)?;
    estimate(&profile.curvature, &profile.torsion, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(dimension: Dimension, k: Vec<f64>, r: Vec<f64>) -> CurvatureProfile {
        let n = k.len();
        CurvatureProfile {
            dimension,
            s: (0..n).map(|i| i as f64).collect(),
            index: (0..n).collect(),
            curvature: k,
            torsion: r,
            bitorsion: (dimension == Dimension::Four).then(|| vec![0.3; n]),
            gaps: vec![],
        }
    }

    #[test]
    fn helix_constants() {
        let e = mannheim_lambda_3d(&profile(Dimension::Three, vec![0.4; 5], vec![0.2; 5]), 1e-12).unwrap();
        assert!((e.lambda - 2.0).abs() < 1e-14);
        assert!(e.verdict);
    }

    #[test]
    fn plane_circle() {
        let e = mannheim_lambda_3d(&profile(Dimension::Three, vec![1.0 / 3.0; 5], vec![0.0; 5]), 1e-12).unwrap();
        assert!((e.lambda - 3.0).abs() < 1e-14);
    }

    #[test]
    fn symmetric_4d() {
        let e = mannheim_lambda_4d(&profile(Dimension::Four, vec![0.25; 3], vec![0.25; 3]), 1e-12).unwrap();
        assert!((e.lambda - 2.0).abs() < 1e-14);
    }

    #[test]
    fn varying_torsion_fails() {
        let r: Vec<f64> = (0..=40).map(|i| 0.1 + 0.01 * i as f64).collect();
        let e = mannheim_lambda_3d(&profile(Dimension::Three, vec![0.4; 41], r), 1e-3).unwrap();
        assert!(!e.verdict);
        assert!(e.residual_max > 0.1, "{}", e.residual_max);
    }

    #[test]
    fn empty_and_mismatch() {
        assert_eq!(mannheim_lambda_3d(&profile(Dimension::Three, vec![], vec![]), 1.0), Err(Error::EmptyProfile));
        assert!(matches!(
            mannheim_lambda_4d(&profile(Dimension::Three, vec![1.0], vec![1.0]), 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
