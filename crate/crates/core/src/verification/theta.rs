use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::estimators::{estimate_curve, EstimateRecord, SamplingOptions};
use crate::fractal::{FractalSpec, RotationMode};
use crate::rng::SeedSpec;
use crate::stats::z_score;

pub const THETA_Z_LIMIT: f64 = 3.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaPair {
    pub theta_a: f64,
    pub theta_b: f64,
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaInvarianceReport {
    pub k: u32,
    pub estimates: Vec<EstimateRecord>,
    pub pairs: Vec<ThetaPair>,
    pub max_abs_z: f64,
    pub pass: bool,
}

/// Pairwise z-tests of `Ê_k(θ)` across projection angles.
///
/// Every angle reuses the same sample words, so the estimates are
/// positively correlated and the independent-sample z is conservative.
/// Only the expectation is θ-invariant, so deterministic figures are
/// rejected.
pub fn verify_theta_invariance(
    spec: &FractalSpec,
    k: u32,
    thetas: &[f64],
    n_samples: u64,
    seed: SeedSpec,
    opts: SamplingOptions,
) -> Result<ThetaInvarianceReport> {
    if spec.mode() != RotationMode::SharedRotation {
        return Err(Error::UnsupportedMode {
            op: "verify_theta_invariance",
            mode: spec.mode(),
            hint: "θ-invariance holds for expectations over random words only",
        });
    }
    if thetas.len() < 2 {
        return Err(invalid("θ-invariance needs at least two angles"));
    }
    if k == 0 {
        return Err(invalid("level k must be at least 1"));
    }
    let level_spec = spec.with_generations(k);
    let estimates = thetas
        .iter()
        .map(|&theta| {
            let curve = estimate_curve(&level_spec, theta, n_samples, seed, opts)?;
            Ok(curve.records[k as usize - 1].clone())
        })
        .collect::<Result<Vec<_>>>()?;

    let mut pairs = Vec::new();
    for i in 0..estimates.len() {
        for j in i + 1..estimates.len() {
            let (a, b) = (&estimates[i], &estimates[j]);
            pairs.push(ThetaPair {
                theta_a: thetas[i],
                theta_b: thetas[j],
                z: z_score(a.mean, a.stderr, b.mean, b.stderr),
            });
        }
    }
    let max_abs_z = pairs.iter().map(|p| p.z.abs()).fold(0.0, f64::max);
    Ok(ThetaInvarianceReport {
        k,
        estimates,
        pass: max_abs_z <= THETA_Z_LIMIT,
        pairs,
        max_abs_z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SamplingOptions {
        SamplingOptions {
            workers: 1,
            max_intervals: 1_000_000,
        }
    }

    #[test]
    fn half_turn_pair_has_zero_z() {
        let spec = FractalSpec::new(4, 3, RotationMode::SharedRotation).unwrap();
        let r = verify_theta_invariance(
            &spec,
            3,
            &[0.3, 0.3 + std::f64::consts::PI],
            200,
            SeedSpec::new(5),
            opts(),
        )
        .unwrap();
        assert!(r.pairs[0].z.abs() < 1e-9);
        assert!(r.pass);
    }

    #[test]
    fn deterministic_is_refused() {
        let spec = FractalSpec::new(4, 3, RotationMode::Deterministic).unwrap();
        assert!(matches!(
            verify_theta_invariance(&spec, 2, &[0.0, 1.0], 10, SeedSpec::new(1), opts()),
            Err(Error::UnsupportedMode { .. })
        ));
    }

    #[test]
    fn needs_two_angles() {
        let spec = FractalSpec::new(4, 3, RotationMode::SharedRotation).unwrap();
        assert!(verify_theta_invariance(&spec, 2, &[0.0], 10, SeedSpec::new(1), opts()).is_err());
    }
}
