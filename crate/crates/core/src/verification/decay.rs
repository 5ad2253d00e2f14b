use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::CurveReport;

/// Ordinary least squares `y ≈ intercept + slope·x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    /// Residual sum of squares.
    pub rss: f64,
}

impl LinearFit {
    pub fn fit(xs: &[f64], ys: &[f64]) -> Result<Self> {
        let n = xs.len();
        if n != ys.len() || n < 2 {
            return Err(Error::Data("least squares needs ≥ 2 paired points".into()));
        }
        let nf = n as f64;
        let mx = xs.iter().sum::<f64>() / nf;
        let my = ys.iter().sum::<f64>() / nf;
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        if sxx == 0.0 {
            return Err(Error::Data("least squares needs distinct abscissae".into()));
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let rss = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        Ok(LinearFit {
            intercept,
            slope,
            rss,
        })
    }
}

/// Fit of the pure `C/k` model: only the scale is free.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScaleFit {
    pub c: f64,
    pub rss: f64,
}

/// Least-squares fits of `log Ê_k` against three decay models.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    /// `log C - p·log k`
    pub power_c: f64,
    pub power_p: f64,
    pub power_rss: f64,
    /// `log C - log k`
    pub inverse: ScaleFit,
    /// `log C - c·√(log k)`
    pub sqrt_log_c: f64,
    pub sqrt_log_rate: f64,
    pub sqrt_log_rss: f64,
    /// `(k, k·Ê_k)`
    pub k_times_mean: Vec<(u32, f64)>,
}

pub fn fit_decay(curve: &CurveReport) -> Result<DecayFit> {
    let points: Vec<(u32, f64)> = curve.records.iter().map(|r| (r.k, r.mean)).collect();
    fit_decay_series(&points)
}

/// Fits `(k, Ê_k)` pairs; needs at least four levels with positive means.
pub fn fit_decay_series(points: &[(u32, f64)]) -> Result<DecayFit> {
    if points.len() < 4 {
        return Err(Error::Data(format!(
            "decay fit needs at least 4 levels, got {}",
            points.len()
        )));
    }
    if let Some((k, m)) = points
        .iter()
        .find(|(k, m)| !(*m > 0.0 && m.is_finite()) || *k == 0)
    {
        return Err(Error::Data(format!(
            "decay fit needs k ≥ 1 and positive finite means; level {k} has {m}"
        )));
    }
    let log_k: Vec<f64> = points.iter().map(|(k, _)| (*k as f64).ln()).collect();
    let log_e: Vec<f64> = points.iter().map(|(_, m)| m.ln()).collect();

    let power = LinearFit::fit(&log_k, &log_e)?;

    let nf = points.len() as f64;
    let log_c = log_e.iter().zip(&log_k).map(|(y, x)| y + x).sum::<f64>() / nf;
    let inverse_rss = log_e
        .iter()
        .zip(&log_k)
        .map(|(y, x)| (y - (log_c - x)).powi(2))
        .sum();

    let root_log: Vec<f64> = log_k.iter().map(|x| x.sqrt()).collect();
    let sqrt_log = LinearFit::fit(&root_log, &log_e)?;

    Ok(DecayFit {
        power_c: power.intercept.exp(),
        power_p: -power.slope,
        power_rss: power.rss,
        inverse: ScaleFit {
            c: log_c.exp(),
            rss: inverse_rss,
        },
        sqrt_log_c: sqrt_log.intercept.exp(),
        sqrt_log_rate: -sqrt_log.slope,
        sqrt_log_rss: sqrt_log.rss,
        k_times_mean: points.iter().map(|&(k, m)| (k, k as f64 * m)).collect(),
    })
}

/// Observational band for `n·value` over a series.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MattilaReport {
    /// `(n, n·value)`
    pub rows: Vec<(u32, f64)>,
    /// Minimum of `n·value` over `n ∈ [2, 5]`, divided by 4.
    pub r_min: f64,
    /// Maximum of `n·value` over `n ∈ [2, 5]`, times 4.
    pub r_max: f64,
    /// Every row with `n ≥ 2` lies in `[r_min, r_max]`.
    pub pass: bool,
}

/// Band derived from the reference window of levels `2..=5`.
pub const MATTILA_REFERENCE: (u32, u32) = (2, 5);
pub const MATTILA_FACTOR: f64 = 4.0;

/// Tabulates `n·value` and checks that it stays in a band set by the
/// series' own values on the reference window. This is an observation
/// about the data, not a test of a theorem.
pub fn mattila_ratio(points: &[(u32, f64)]) -> Result<MattilaReport> {
    let rows: Vec<(u32, f64)> = points.iter().map(|&(n, v)| (n, n as f64 * v)).collect();
    let (lo, hi) = MATTILA_REFERENCE;
    let window: Vec<f64> = rows
        .iter()
        .filter(|(n, _)| (lo..=hi).contains(n))
        .map(|&(_, r)| r)
        .collect();
    if window.is_empty() {
        return Err(Error::Data(format!(
            "series has no levels in the reference window {lo}..={hi}"
        )));
    }
    let r_min = window.iter().copied().fold(f64::INFINITY, f64::min) / MATTILA_FACTOR;
    let r_max = window.iter().copied().fold(f64::NEG_INFINITY, f64::max) * MATTILA_FACTOR;
    let pass = rows
        .iter()
        .filter(|(n, _)| *n >= lo)
        .all(|&(_, r)| r >= r_min && r <= r_max && r > 0.0);
    Ok(MattilaReport {
        rows,
        r_min,
        r_max,
        pass,
    })
}

/// `max/min` of `n·value` over levels in `[lo, hi]`; `None` if no level
/// falls in the range or a value is not positive.
pub fn spread(rows: &[(u32, f64)], lo: u32, hi: u32) -> Option<f64> {
    let vals: Vec<f64> = rows
        .iter()
        .filter(|(n, _)| (lo..=hi).contains(n))
        .map(|&(_, r)| r)
        .collect();
    if vals.is_empty() || vals.iter().any(|&v| v <= 0.0) {
        return None;
    }
    let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    Some(max / min)
}
