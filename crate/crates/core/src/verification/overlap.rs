use serde::Serialize;

use crate::error::{invalid, Result};
use crate::interval::IntervalSet;
use crate::quadrature::{midpoint_with_breaks, refine_by_doubling};
use crate::scalar::Real;

/// Minimum number of midpoint nodes for [`overlap_integral`].
pub const MIN_OVERLAP_POINTS: usize = 1 << 10;

const MAX_OVERLAP_POINTS: usize = 1 << 24;

/// Sets with more intervals than this are integrated without kink breaks.
const MAX_KINK_INTERVALS: usize = 64;

/// Angle at which the relative shift `3a(cos θ - sin θ)` equals `shift`.
fn angle_of_shift<T: Real>(shift: T, a: T) -> T {
    let ratio = (shift / (T::lit(3.0) * a * T::SQRT_2()))
        .max(-T::one())
        .min(T::one());
    T::FRAC_PI_4() - ratio.asin()
}

/// Integration range outside which the overlap vanishes, and the angles
/// inside it where `f` has kinks (endpoint differences of `I`).
///
/// The overlap is zero once the shift reaches the hull width of `I`, so
/// small sets are integrated over a correspondingly small window.
fn support_and_kinks<T: Real>(set: &IntervalSet<T>, a: T) -> (T, T, Vec<T>) {
    let (Some(first), Some(last)) = (set.first(), set.last()) else {
        return (T::zero(), T::FRAC_PI_2(), Vec::new());
    };
    let width = last - first;
    let lo = angle_of_shift(width, a).max(T::zero());
    let hi = angle_of_shift(-width, a).min(T::FRAC_PI_2());
    let mut breaks = Vec::new();
    if set.len() <= MAX_KINK_INTERVALS {
        let ends: Vec<T> = set.iter().flat_map(|iv| [iv.lo, iv.hi]).collect();
        for &x in &ends {
            for &y in &ends {
                let diff = x - y;
                if diff.abs() < width {
                    breaks.push(angle_of_shift(diff, a));
                }
            }
        }
        breaks.sort_by(|p, q| p.partial_cmp(q).unwrap_or(std::cmp::Ordering::Equal));
        breaks.dedup();
    }
    (lo, hi, breaks)
}

/// Angle `θ* ∈ [0, π/4]` at which `[-a, a] + 3a·sin θ` and
/// `[-a, a] + 3a·cos θ` start to overlap, i.e. `a + 3a sin θ = -a + 3a cos θ`.
///
/// Solved by bisection on the unscaled equation, so the result does not
/// depend on `a` for power-of-two ratios and only through rounding
/// otherwise. The closed form is `arccos(√2/3) - π/4`.
pub fn theta_star<T: Real>(a: T) -> T {
    let three = T::lit(3.0);
    let gap = |t: T| (-a + three * a * t.cos()) - (a + three * a * t.sin());
    let (mut lo, mut hi) = (T::zero(), T::FRAC_PI_4());
    let tol = T::lit(1e-14).max(T::epsilon());
    while hi - lo > tol {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / T::lit(2.0)
}

/// `∫_0^{π/2} |([-a,a] + 3a sin θ) ∩ ([-a,a] + 3a cos θ)| dθ` in closed
/// form: twice `∫_{θ*}^{π/4} (2a - 3a(cos θ - sin θ)) dθ`.
pub fn full_interval_closed_form<T: Real>(a: T) -> T {
    let ts = theta_star(a);
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    two * (two * a * (T::FRAC_PI_4() - ts) - three * a * (T::SQRT_2() - (ts.sin() + ts.cos())))
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct OverlapReport<T: Copy> {
    pub a: T,
    pub input: IntervalSet<T>,
    pub measure: T,
    pub integral: T,
    /// `|I|² / (6√2 a)`
    pub lower_bound: T,
    /// `|I|² / (3a)`, from the Jacobian bound `|∂(u,v)/∂(θ,x)| ≥ 3a`.
    pub upper_bound: T,
    pub theta_star: T,
    pub tolerance: T,
    pub points: usize,
    pub converged: bool,
    pub lower_ok: bool,
    pub upper_ok: bool,
    /// `f(θ) = 0` for `θ < θ* - 1e-9` and `θ > π/2 - θ* + 1e-9`.
    pub vanishes_outside: bool,
    /// `f(π/4)`, which should equal `|I|`.
    pub quarter_turn_value: T,
    pub coincides_at_quarter_turn: bool,
}

impl<T: Real> OverlapReport<T> {
    pub fn passed(&self) -> bool {
        self.converged
            && self.lower_ok
            && self.upper_ok
            && self.vanishes_outside
            && self.coincides_at_quarter_turn
    }
}

/// Integrates `f(θ) = |(I + 3a sin θ) ∩ (I + 3a cos θ)|` over `[0, π/2]`
/// and compares it with the two-sided bound `|I|²/(6√2 a) ≤ ∫ ≤ |I|²/(3a)`.
///
/// The composite midpoint rule is doubled from `quad_points` until two
/// successive values differ by less than `1e-9·max(1, |I|²/a)`. It runs
/// over the support of `f` only, split at the angles where endpoints of the
/// two translates cross (for sets of at most 64 intervals); `f` has kinks
/// there and is smooth in between.
pub fn overlap_integral<T: Real>(
    set: &IntervalSet<T>,
    a: T,
    quad_points: usize,
) -> Result<OverlapReport<T>> {
    if !(a > T::zero() && a.is_finite()) {
        return Err(invalid(format!("half-width must be positive, got {a}")));
    }
    if quad_points < MIN_OVERLAP_POINTS {
        return Err(invalid(format!(
            "overlap quadrature needs at least {MIN_OVERLAP_POINTS} points, got {quad_points}"
        )));
    }
    if !set.within(-a, a) {
        return Err(invalid(format!(
            "interval set is not contained in [-{a}, {a}]"
        )));
    }

    let three_a = T::lit(3.0) * a;
    // |(I + s) ∩ (I + c)| = |I ∩ (I + (c - s))|
    let f = |t: T| set.shifted_overlap_measure(three_a * (t.cos() - t.sin()));
    let measure = set.measure();
    let sq = measure * measure;
    let tolerance = T::lit(1e-9) * T::one().max(sq / a);
    let (lo, hi, breaks) = support_and_kinks(set, a);
    let refined = refine_by_doubling(
        |n| midpoint_with_breaks(&mut |t| f(t), lo, hi, &breaks, n),
        quad_points,
        tolerance,
        MAX_OVERLAP_POINTS,
    );

    let ts = theta_star(a);
    let margin = T::lit(1e-9);
    let probes = 512usize;
    let left_end = ts - margin;
    let right_start = T::FRAC_PI_2() - ts + margin;
    let vanishes_outside = (0..=probes).all(|i| {
        let frac = T::from_usize_lossy(i) / T::from_usize_lossy(probes);
        let left = left_end * frac;
        let right = right_start + (T::FRAC_PI_2() - right_start) * frac;
        f(left) == T::zero() && f(right) == T::zero()
    });
    let quarter_turn_value = f(T::FRAC_PI_4());

    let lower_bound = sq / (T::lit(6.0) * T::SQRT_2() * a);
    let upper_bound = sq / three_a;
    Ok(OverlapReport {
        a,
        input: set.clone(),
        measure,
        integral: refined.value,
        lower_bound,
        upper_bound,
        theta_star: ts,
        tolerance,
        points: refined.resolution,
        converged: refined.converged,
        lower_ok: refined.value + tolerance >= lower_bound,
        upper_ok: refined.value <= upper_bound + tolerance,
        vanishes_outside,
        quarter_turn_value,
        coincides_at_quarter_turn: (quarter_turn_value - measure).abs() <= T::lit(1e-12),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Root of cos θ - sin θ = 2/3 by Newton iteration, independent of the
    /// bisection above.
    fn newton_root() -> f64 {
        let mut t = 0.3f64;
        for _ in 0..50 {
            let g = t.cos() - t.sin() - 2.0 / 3.0;
            let dg = -t.sin() - t.cos();
            t -= g / dg;
        }
        t
    }

    #[test]
    fn theta_star_values() {
        let ts = theta_star(1.0f64);
        let closed = (2.0f64.sqrt() / 3.0).acos() - std::f64::consts::FRAC_PI_4;
        assert!((ts - closed).abs() < 1e-14);
        assert!((ts - newton_root()).abs() < 1e-14);
        assert!((ts - 0.2945).abs() < 1e-4);
        assert_eq!(theta_star(1.0f64), theta_star(0.25f64));
        assert!((ts.cos() - ts.sin() - 2.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn theta_star_f32() {
        let ts = theta_star(0.2f32);
        assert!((ts - 0.294_53).abs() < 1e-4);
    }

    #[test]
    fn empty_set_passes_trivially() {
        let r = overlap_integral(&IntervalSet::<f64>::empty(), 0.25, 1024).unwrap();
        assert_eq!(r.integral, 0.0);
        assert_eq!(r.lower_bound, 0.0);
        assert!(r.passed());
    }

    #[test]
    fn full_interval_matches_closed_form() {
        for a in [0.25f64, 0.2, 1.0 / 7.0, 1.0] {
            let set = IntervalSet::single(-a, a).unwrap();
            let r = overlap_integral(&set, a, 1024).unwrap();
            let exact = full_interval_closed_form(a);
            assert!(
                (r.integral - exact).abs() < 1e-8,
                "a={a}: {} vs {exact}",
                r.integral
            );
            assert!(r.integral > 4.0 * a * a / (6.0 * 2f64.sqrt() * a));
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn closed_form_by_brute_force() {
        // dense midpoint sum of the explicit piecewise formula
        let a = 0.25f64;
        let n = 4_000_000;
        let h = std::f64::consts::FRAC_PI_2 / n as f64;
        let sum: f64 = (0..n)
            .map(|i| {
                let t = (i as f64 + 0.5) * h;
                (2.0 * a - 3.0 * a * (t.cos() - t.sin()).abs()).max(0.0)
            })
            .sum::<f64>()
            * h;
        assert!((sum - full_interval_closed_form(a)).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_inputs() {
        let set = IntervalSet::single(-0.3, 0.1).unwrap();
        assert!(overlap_integral(&set, 0.25, 1024).is_err());
        assert!(overlap_integral(&set, 0.5, 512).is_err());
        assert!(overlap_integral(&set, -0.5, 1024).is_err());
    }

    #[test]
    fn scattered_set_respects_bounds() {
        let set = IntervalSet::from_raw([(-0.2, -0.15), (-0.05, 0.0), (0.1, 0.2)]).unwrap();
        let r = overlap_integral(&set, 0.2, 1024).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.lower_bound <= r.integral && r.integral <= r.upper_bound);
    }
}
