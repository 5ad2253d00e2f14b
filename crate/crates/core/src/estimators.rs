//! Monte Carlo estimates of the expected projection lengths `E_k`, the
//! exact level-one expectation `E_1`, and Favard lengths.
//!
//! Samples are indexed work units: sample `i` draws its word from the
//! counter-based stream at index `i`, and the per-sample results are
//! reduced in ascending index order with compensated summation. The
//! worker count only changes wall-clock time.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fractal::{enumerate_disks, FractalSpec, RotationMode, RotationWord};
use crate::interval::IntervalSet;
use crate::projection::{
    endpoint_crossings, project_disks, projection_measures_recursive, projection_set_recursive,
    Engine,
};
use crate::quadrature::{refine_by_doubling, simpson, simpson_with_breaks};
use crate::rng::{sample_word, SeedSpec};
use crate::stats::mean_stderr;

/// Tolerance between successive doublings in [`exact_e1`].
pub const E1_TOLERANCE: f64 = 1e-10;

/// Largest figure for which [`favard_length`] splits the θ range at the
/// endpoint crossings of the projected disks.
pub const FAVARD_BREAKPOINT_DISKS: u128 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplingOptions {
    pub workers: usize,
    pub max_intervals: usize,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        SamplingOptions {
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            max_intervals: crate::DEFAULT_MAX_INTERVALS,
        }
    }
}

impl SamplingOptions {
    pub fn with_workers(self, workers: usize) -> Self {
        SamplingOptions { workers, ..self }
    }
}

/// Monte Carlo statistics of one level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub k: u32,
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    /// Projection angle; `None` for θ-averaged (Favard) estimates.
    pub theta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveReport {
    pub spec: FractalSpec,
    pub seed: SeedSpec,
    pub engine: String,
    pub records: Vec<EstimateRecord>,
    #[serde(skip)]
    pub elapsed: Option<Duration>,
}

impl CurveReport {
    pub fn means(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.mean).collect()
    }

    pub fn stderrs(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.stderr).collect()
    }

    pub fn record(&self, k: u32) -> Option<&EstimateRecord> {
        self.records.iter().find(|r| r.k == k)
    }
}

/// Runs `work(i)` for `i in 0..n` on `workers` threads, results in index order.
pub fn run_indexed<R, F>(workers: usize, n: u64, work: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(u64) -> Result<R> + Sync + Send,
{
    if workers <= 1 {
        return (0..n).map(work).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()?;
    pool.install(|| (0..n).into_par_iter().map(&work).collect())
}

fn require_recursive(spec: &FractalSpec, op: &'static str) -> Result<()> {
    if spec.mode() == RotationMode::PerNode {
        return Err(Error::UnsupportedMode {
            op,
            mode: spec.mode(),
            hint: "per-node figures have no level recursion; use favard estimates instead",
        });
    }
    Ok(())
}

/// Estimates `E_1, …, E_n` at projection angle `theta`.
///
/// Every sample contributes one recursive pass, which yields all level
/// measures `L_1, …, L_n` of its word at unit scale.
pub fn estimate_curve(
    spec: &FractalSpec,
    theta: f64,
    n_samples: u64,
    seed: SeedSpec,
    opts: SamplingOptions,
) -> Result<CurveReport> {
    require_recursive(spec, "estimate_curve")?;
    if n_samples < 2 {
        return Err(invalid(
            "at least 2 samples are needed for a standard error",
        ));
    }
    if spec.generations() == 0 {
        return Err(invalid("a curve needs at least one generation"));
    }
    if !theta.is_finite() {
        return Err(invalid("projection angle must be finite"));
    }
    let started = Instant::now();
    let per_sample = run_indexed(opts.workers, n_samples, |i| {
        let word = sample_word(spec, seed, i)?;
        projection_measures_recursive(spec, &word, theta, opts.max_intervals)
    })?;

    let n = spec.generations() as usize;
    let mut column = vec![0.0; per_sample.len()];
    let records = (0..n)
        .map(|level| {
            for (slot, row) in column.iter_mut().zip(&per_sample) {
                *slot = row[level];
            }
            let (mean, stderr) = mean_stderr(&column).expect("n_samples >= 2");
            EstimateRecord {
                k: level as u32 + 1,
                mean,
                stderr,
                samples: n_samples,
                theta: Some(theta),
            }
        })
        .collect();
    Ok(CurveReport {
        spec: *spec,
        seed,
        engine: Engine::Recursive.name().to_string(),
        records,
        elapsed: Some(started.elapsed()),
    })
}

/// Union length of the `d` level-one intervals for outer angle `omega`.
fn level_one_length(degree: u32, omega: f64, theta: f64) -> f64 {
    let d = degree as f64;
    let amp = (d - 1.0) / d;
    let half = 1.0 / d;
    let raw = (0..degree).map(|j| {
        let c = amp * (std::f64::consts::TAU * j as f64 / d - omega - theta).cos();
        (c - half, c + half)
    });
    IntervalSet::from_raw(raw)
        .expect("finite offsets")
        .measure()
}

/// `E_1 = (d/2π) ∫_0^{2π/d} L_1(ω) dω` by composite Simpson.
///
/// The integrand is smooth between the angles where two projected
/// intervals start or stop overlapping, so the range is split there and
/// the panel count doubled from `quad_points` until successive values
/// agree to [`E1_TOLERANCE`].
pub fn exact_e1(spec: &FractalSpec, theta: f64, quad_points: usize) -> Result<f64> {
    if quad_points < 64 {
        return Err(invalid("exact_e1 needs at least 64 quadrature points"));
    }
    let d = spec.degree();
    let df = d as f64;
    let range = std::f64::consts::TAU / df;
    let amp = (df - 1.0) / df;
    // centre j is amp·cos(α_j - ω) = amp·cos α_j · cos ω + amp·sin α_j · sin ω
    let coeffs: Vec<(f64, f64)> = (0..d)
        .map(|j| {
            let alpha = std::f64::consts::TAU * j as f64 / df - theta;
            (amp * alpha.cos(), amp * alpha.sin())
        })
        .collect();
    let breaks = endpoint_crossings(&coeffs, 1.0 / df, 0.0, range);
    let mut f = |omega: f64| level_one_length(d, omega, theta);
    let refined = refine_by_doubling(
        |panels| simpson_with_breaks(&mut f, 0.0, range, &breaks, panels),
        quad_points,
        E1_TOLERANCE,
        1 << 24,
    );
    Ok(refined.value / range)
}

/// `(1/π) ∫_0^π |Proj_θ figure| dθ` by composite Simpson with `n_theta`
/// panels.
///
/// For figures of at most [`FAVARD_BREAKPOINT_DISKS`] disks the θ range is
/// split at the endpoint crossings of the projected disks, provided there
/// are few enough of them relative to `n_theta`.
pub fn favard_length(
    spec: &FractalSpec,
    word: &RotationWord<f64>,
    n_theta: usize,
    max_intervals: usize,
) -> Result<f64> {
    if n_theta < 8 || !n_theta.is_multiple_of(2) {
        return Err(invalid(format!(
            "n_theta must be even and at least 8, got {n_theta}"
        )));
    }
    let pi = std::f64::consts::PI;
    let small = spec
        .disks_at(spec.generations())
        .is_some_and(|c| c <= FAVARD_BREAKPOINT_DISKS);
    let engine = Engine::for_mode(spec.mode());

    let disks = if small || engine == Engine::Enumerated {
        Some(enumerate_disks(spec, word, max_intervals)?)
    } else {
        None
    };
    let breaks = match &disks {
        Some(disks) if small => {
            let coeffs: Vec<(f64, f64)> = disks.iter().map(|d| (d.cx, d.cy)).collect();
            let b = endpoint_crossings(&coeffs, disks[0].r, 0.0, pi);
            if b.len() <= n_theta / 4 {
                b
            } else {
                Vec::new()
            }
        }
        _ => Vec::new(),
    };

    let mut failure: Option<Error> = None;
    let mut f = |theta: f64| -> f64 {
        if failure.is_some() {
            return 0.0;
        }
        if let Some(disks) = &disks {
            return project_disks(disks, theta).measure();
        }
        match projection_set_recursive(spec, word, theta, max_intervals) {
            Ok(p) => p.set.measure(),
            Err(e) => {
                failure = Some(e);
                0.0
            }
        }
    };
    let integral = if breaks.is_empty() {
        simpson(&mut f, 0.0, pi, n_theta)
    } else {
        simpson_with_breaks(&mut f, 0.0, pi, &breaks, n_theta)
    };
    match failure {
        Some(e) => Err(e),
        None => Ok(integral / pi),
    }
}

/// Monte Carlo estimate of `E_ω[Fav(D_n(ω))]`.
pub fn estimate_expected_favard(
    spec: &FractalSpec,
    n_samples: u64,
    n_theta: usize,
    seed: SeedSpec,
    opts: SamplingOptions,
) -> Result<EstimateRecord> {
    if n_samples < 2 {
        return Err(invalid(
            "at least 2 samples are needed for a standard error",
        ));
    }
    let values = run_indexed(opts.workers, n_samples, |i| {
        let word = sample_word(spec, seed, i)?;
        favard_length(spec, &word, n_theta, opts.max_intervals)
    })?;
    let (mean, stderr) = mean_stderr(&values).expect("n_samples >= 2");
    Ok(EstimateRecord {
        k: spec.generations(),
        mean,
        stderr,
        samples: n_samples,
        theta: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn shared(d: u32, n: u32) -> FractalSpec {
        FractalSpec::new(d, n, RotationMode::SharedRotation).unwrap()
    }

    fn opts(workers: usize) -> SamplingOptions {
        SamplingOptions {
            workers,
            max_intervals: 1_000_000,
        }
    }

    #[test]
    fn level_one_integrand_values() {
        assert!((level_one_length(4, 0.0, 0.0) - 1.5).abs() < 1e-15);
        assert!((level_one_length(4, PI / 4.0, 0.0) - 1.0).abs() < 1e-15);
    }

    /// Plain midpoint rule with many points; independent of the break
    /// handling used by `exact_e1`.
    fn e1_brute_force(d: u32, theta: f64, points: usize) -> f64 {
        let range = std::f64::consts::TAU / d as f64;
        let h = range / points as f64;
        (0..points)
            .map(|i| level_one_length(d, (i as f64 + 0.5) * h, theta))
            .sum::<f64>()
            * h
            / range
    }

    #[test]
    fn exact_e1_quarter_model() {
        let s = shared(4, 1);
        let e1 = exact_e1(&s, 0.0, 64).unwrap();
        assert!(e1 > 1.0 && e1 < 2.0, "{e1}");
        let brute = e1_brute_force(4, 0.0, 2_000_000);
        assert!((e1 - brute).abs() < 1e-9, "{e1} vs {brute}");
    }

    #[test]
    fn exact_e1_period_shift() {
        for d in [3u32, 4, 5, 7] {
            let s = shared(d, 1);
            let a = exact_e1(&s, 0.37, 64).unwrap();
            let b = exact_e1(&s, 0.37 + std::f64::consts::TAU / d as f64, 64).unwrap();
            assert!((a - b).abs() < 1e-10, "d={d}: {a} {b}");
        }
    }

    #[test]
    fn exact_e1_rejects_coarse_grid() {
        assert!(exact_e1(&shared(4, 1), 0.0, 32).is_err());
    }

    #[test]
    fn curve_is_reproducible_and_bounded() {
        let s = shared(4, 5);
        let a = estimate_curve(&s, 0.0, 64, SeedSpec::new(3), opts(1)).unwrap();
        let b = estimate_curve(&s, 0.0, 64, SeedSpec::new(3), opts(4)).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.records.len(), 5);
        assert!(a
            .records
            .iter()
            .all(|r| r.mean > 0.0 && r.mean <= 2.0 && r.stderr >= 0.0));
        assert!(a.records.windows(2).all(|w| w[0].k + 1 == w[1].k));
    }

    #[test]
    fn curve_rejects_bad_inputs() {
        let s = shared(4, 3);
        assert!(estimate_curve(&s, 0.0, 1, SeedSpec::new(1), opts(1)).is_err());
        let pn = FractalSpec::new(4, 3, RotationMode::PerNode).unwrap();
        assert!(matches!(
            estimate_curve(&pn, 0.0, 10, SeedSpec::new(1), opts(1)),
            Err(Error::UnsupportedMode { .. })
        ));
    }

    #[test]
    fn favard_of_unit_disk() {
        let s = shared(4, 0);
        let w = RotationWord::zeros(&s).unwrap();
        let fav = favard_length(&s, &w, 8, 100).unwrap();
        assert!((fav - 2.0).abs() < 1e-9);
        assert!(favard_length(&s, &w, 7, 100).is_err());
        assert!(favard_length(&s, &w, 6, 100).is_err());
    }

    #[test]
    fn favard_of_first_generation_is_stable() {
        let s = FractalSpec::new(4, 1, RotationMode::Deterministic).unwrap();
        let w = RotationWord::zeros(&s).unwrap();
        let a = favard_length(&s, &w, 256, 100).unwrap();
        let b = favard_length(&s, &w, 512, 100).unwrap();
        assert!((a - b).abs() < 1e-6, "{a} {b}");
    }

    #[test]
    fn favard_engines_agree() {
        // shared word through both engines: recursion and enumeration
        let s = shared(3, 5);
        let w = RotationWord::new(&s, vec![0.1, 1.5, 0.9, 2.0, 0.3]).unwrap();
        let rec = favard_length(&s, &w, 64, 1_000_000).unwrap();
        let mut f = |t: f64| {
            crate::projection::projection_set_enumerated(&s, &w, t, 1_000_000)
                .unwrap()
                .measure()
        };
        let enumerated = simpson(&mut f, 0.0, PI, 64) / PI;
        assert!((rec - enumerated).abs() < 1e-12);
    }

    #[test]
    fn favard_per_node() {
        let s = FractalSpec::new(3, 3, RotationMode::PerNode).unwrap();
        let w = sample_word(&s, SeedSpec::new(5), 0).unwrap();
        let fav = favard_length(&s, &w, 64, 1000).unwrap();
        assert!(fav > 0.0 && fav < 2.0);
    }

    #[test]
    fn expected_favard_edge_cases() {
        let s = shared(4, 0);
        let r = estimate_expected_favard(&s, 4, 8, SeedSpec::new(1), opts(1)).unwrap();
        assert!((r.mean - 2.0).abs() < 1e-9);
        assert_eq!(r.stderr, 0.0);
        let s = shared(4, 6);
        let r = estimate_expected_favard(&s, 8, 32, SeedSpec::new(1), opts(1)).unwrap();
        assert!(r.mean > 0.0 && r.mean < 2.0);
    }

    #[test]
    fn half_turn_gives_same_curve() {
        let s = shared(4, 4);
        let a = estimate_curve(&s, 0.2, 50, SeedSpec::new(11), opts(1)).unwrap();
        let b = estimate_curve(&s, 0.2 + PI, 50, SeedSpec::new(11), opts(1)).unwrap();
        for (x, y) in a.records.iter().zip(&b.records) {
            assert!((x.mean - y.mean).abs() < 1e-12);
        }
    }

    #[test]
    fn expected_favard_matches_theta_average() {
        // Fubini: E[Fav] = (1/π)∫ E_n(θ) dθ
        let s = shared(4, 4);
        let fav = estimate_expected_favard(&s, 400, 64, SeedSpec::new(21), opts(1)).unwrap();
        let grid: Vec<(f64, f64)> = (0..16)
            .map(|i| {
                let theta = i as f64 * PI / 16.0;
                let c = estimate_curve(&s, theta, 400, SeedSpec::new(100 + i), opts(1)).unwrap();
                let r = c.record(4).unwrap();
                (r.mean, r.stderr)
            })
            .collect();
        let mean = grid.iter().map(|g| g.0).sum::<f64>() / 16.0;
        let se = (grid.iter().map(|g| g.1 * g.1).sum::<f64>()).sqrt() / 16.0;
        let z = (fav.mean - mean) / (fav.stderr.powi(2) + se * se).sqrt();
        assert!(z.abs() <= 3.0, "z = {z}");
    }
}
