//! Composite quadrature rules for piecewise smooth integrands.

use crate::scalar::Real;
use crate::stats::NeumaierSum;

/// Composite Simpson on `[a, b]` with `panels` subintervals (rounded up to
/// an even count, at least 2).
pub fn simpson<T: Real>(f: &mut impl FnMut(T) -> T, a: T, b: T, panels: usize) -> T {
    let panels = (panels.max(2) + 1) & !1;
    let h = (b - a) / T::from_usize_lossy(panels);
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let mut acc = NeumaierSum::new();
    acc.add(f(a));
    acc.add(f(b));
    for i in 1..panels {
        let x = a + h * T::from_usize_lossy(i);
        let w = if i % 2 == 1 { four } else { two };
        acc.add(w * f(x));
    }
    acc.value() * h / T::lit(3.0)
}

/// Composite Simpson over `[a, b]` split at `breaks`.
///
/// Each smooth piece gets an even share of `panels` proportional to its
/// length (at least 2), so kinks of the integrand fall on panel edges.
pub fn simpson_with_breaks<T: Real>(
    f: &mut impl FnMut(T) -> T,
    a: T,
    b: T,
    breaks: &[T],
    panels: usize,
) -> T {
    let mut nodes = Vec::with_capacity(breaks.len() + 2);
    nodes.push(a);
    nodes.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    nodes.push(b);
    let total = b - a;
    let mut acc = NeumaierSum::new();
    for w in nodes.windows(2) {
        let share = ((w[1] - w[0]) / total * T::from_usize_lossy(panels))
            .ceil()
            .to_usize()
            .unwrap_or(2);
        acc.add(simpson(f, w[0], w[1], share));
    }
    acc.value()
}

/// Composite midpoint rule with `points` evaluation points.
pub fn midpoint<T: Real>(f: &mut impl FnMut(T) -> T, a: T, b: T, points: usize) -> T {
    let points = points.max(1);
    let h = (b - a) / T::from_usize_lossy(points);
    let half = T::lit(0.5);
    let mut acc = NeumaierSum::new();
    for i in 0..points {
        acc.add(f(a + h * (T::from_usize_lossy(i) + half)));
    }
    acc.value() * h
}

/// Composite midpoint over `[a, b]` split at `breaks`, each piece getting a
/// share of `points` proportional to its length (at least 1).
pub fn midpoint_with_breaks<T: Real>(
    f: &mut impl FnMut(T) -> T,
    a: T,
    b: T,
    breaks: &[T],
    points: usize,
) -> T {
    let mut nodes = Vec::with_capacity(breaks.len() + 2);
    nodes.push(a);
    nodes.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    nodes.push(b);
    let total = b - a;
    let mut acc = NeumaierSum::new();
    for w in nodes.windows(2) {
        let share = ((w[1] - w[0]) / total * T::from_usize_lossy(points))
            .ceil()
            .to_usize()
            .unwrap_or(1);
        acc.add(midpoint(f, w[0], w[1], share));
    }
    acc.value()
}

/// Result of a doubling refinement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Refined<T> {
    pub value: T,
    /// |last - previous| at termination.
    pub change: T,
    /// Resolution (panels or points) of the returned value.
    pub resolution: usize,
    pub converged: bool,
}

/// Doubles the resolution of `rule` from `start` until two successive
/// values differ by less than `tol` or `max_resolution` is reached.
pub fn refine_by_doubling<T: Real>(
    mut rule: impl FnMut(usize) -> T,
    start: usize,
    tol: T,
    max_resolution: usize,
) -> Refined<T> {
    let mut n = start.max(1);
    let mut prev = rule(n);
    loop {
        let next_n = n * 2;
        let value = rule(next_n);
        let change = (value - prev).abs();
        if change < tol || next_n >= max_resolution {
            return Refined {
                value,
                change,
                resolution: next_n,
                converged: change < tol,
            };
        }
        prev = value;
        n = next_n;
    }
}
