use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::CurveReport;

/// `√2/(24π)`: the overlap bound `(√2/48)·L²` for the quarter model,
/// integrated over the outer angle in `[0, π/2]`, times the uniform
/// density `2/π`.
pub const QUARTER_MODEL_CONSTANT: f64 = 0.018_756_589_919_939_712;

/// Largest degree for which the adjacent-pair bound of
/// [`pair_overlap_constant`] applies.
pub const PAIR_BOUND_MAX_DEGREE: u32 = 8;

/// Constant `c_d` for `E_k ≤ E_{k-1} - c_d·E_{k-1}²`.
///
/// Derivation. At level `k` the `d` copies of the level-`(k-1)` figure each
/// project to a translate of a set `I` with `|I| = L/d`, `I ⊆ [-a, a]`,
/// `a = 1/d`, and the union length is at most `L` minus the overlap of
/// any one pair. Applying the overlap estimate
/// `∫ |(I + 3a sin θ) ∩ (I + 3a cos θ)| dθ ≥ |I|²/(6√2 a)` with these
/// values gives `L²/(6√2 d)`; dividing by the angle range `2π/d` turns the
/// integral into an expectation:
///
/// ```text
/// c_d = (L²/(6√2 d)) / (2π/d) / L² = 1/(12√2 π) = √2/(24π)
/// ```
///
/// which is independent of `d` and equals [`QUARTER_MODEL_CONSTANT`].
///
/// For `d ≠ 4` the two adjacent copies do not move as `3a sin θ` and
/// `3a cos θ`; their offset is `g(ω) = 2((d-1)/d)·sin(π/d)·sin(π/d - ω)`.
/// Changing variables to `g` bounds the expected overlap below by
/// [`pair_overlap_constant`]`(d)·L²` whenever `g` sweeps `[-2/d, 2/d]`,
/// which holds for `3 ≤ d ≤ 8`. That bound exceeds `√2/(24π)` on the whole
/// range, so the constant returned here is valid there.
pub fn induction_constant(degree: u32) -> f64 {
    let d = degree as f64;
    let a = 1.0 / d;
    let level_to_set = 1.0 / d; // |I| = L/d
    let integral_per_l2 = level_to_set * level_to_set / (6.0 * 2f64.sqrt() * a);
    integral_per_l2 / (std::f64::consts::TAU / d)
}

/// `1/(4π(d-1)sin(π/d))`, the expected-overlap constant of one adjacent
/// pair, when the offset sweep covers the full overlap range.
pub fn pair_overlap_constant(degree: u32) -> Option<f64> {
    let d = degree as f64;
    let s = (std::f64::consts::PI / d).sin();
    if degree < 3 || (d - 1.0) * s * s < 1.0 {
        return None;
    }
    Some(1.0 / (4.0 * std::f64::consts::PI * (d - 1.0) * s))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InductionRow {
    pub k: u32,
    pub e_k: f64,
    pub e_prev: f64,
    pub stderr_k: f64,
    pub stderr_prev: f64,
    /// `Ê_{k-1} - c·Ê_{k-1}² - Ê_k`
    pub slack: f64,
    /// `3·(σ_k + σ_{k-1} + 2·Ê_{k-1}·σ_{k-1})`
    pub tolerance: f64,
    pub pass: bool,
}

/// Verdict with the constant taken without the `d/(2π)` density.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlternativeVerdict {
    pub c: f64,
    pub pass: bool,
    pub min_slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InductionReport {
    pub c: f64,
    pub rows: Vec<InductionRow>,
    pub pass: bool,
    pub alternative: Option<AlternativeVerdict>,
}

/// Checks `Ê_k ≤ Ê_{k-1} - c·Ê_{k-1}² + tolerance_k` for `k = 2, …, n`.
///
/// `means[i]` and `stderrs[i]` belong to level `i + 1`.
pub fn verify_induction_series(means: &[f64], stderrs: &[f64], c: f64) -> Result<InductionReport> {
    if means.len() != stderrs.len() {
        return Err(Error::Data(format!(
            "mismatched record lengths: {} means, {} standard errors",
            means.len(),
            stderrs.len()
        )));
    }
    if means.len() < 2 {
        return Err(Error::Data("induction needs at least two levels".into()));
    }
    let rows: Vec<InductionRow> = (1..means.len())
        .map(|i| {
            let (e_prev, e_k) = (means[i - 1], means[i]);
            let (s_prev, s_k) = (stderrs[i - 1], stderrs[i]);
            let slack = e_prev - c * e_prev * e_prev - e_k;
            let tolerance = 3.0 * (s_k + s_prev + 2.0 * e_prev * s_prev);
            InductionRow {
                k: i as u32 + 1,
                e_k,
                e_prev,
                stderr_k: s_k,
                stderr_prev: s_prev,
                slack,
                tolerance,
                pass: slack >= -tolerance,
            }
        })
        .collect();
    let pass = rows.iter().all(|r| r.pass);
    Ok(InductionReport {
        c,
        rows,
        pass,
        alternative: None,
    })
}

/// Induction check on a measured curve.
///
/// Also reports the verdict for `c·2π/d`, the constant obtained when the
/// angle integral is read as an expectation without the uniform density
/// (`√2/48` for `d = 4`).
pub fn verify_induction(curve: &CurveReport, c: f64) -> Result<InductionReport> {
    for (i, r) in curve.records.iter().enumerate() {
        if r.k != i as u32 + 1 {
            return Err(Error::Data(format!(
                "curve records must cover k = 1, 2, … in order; found k = {} at position {i}",
                r.k
            )));
        }
    }
    let means = curve.means();
    let stderrs = curve.stderrs();
    let mut report = verify_induction_series(&means, &stderrs, c)?;
    let alt_c = c * std::f64::consts::TAU / curve.spec.degree() as f64;
    let alt = verify_induction_series(&means, &stderrs, alt_c)?;
    report.alternative = Some(AlternativeVerdict {
        c: alt_c,
        pass: alt.pass,
        min_slack: alt
            .rows
            .iter()
            .map(|r| r.slack)
            .fold(f64::INFINITY, f64::min),
    });
    Ok(report)
}
