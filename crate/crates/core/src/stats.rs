//! Order-fixed summation and sample statistics.

use num_traits::Float;

/// Neumaier's compensated summation.
///
/// The result depends only on the order of the added terms, so a fixed
/// index order gives bit-identical sums regardless of how the terms were
/// produced.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum<T> {
    sum: T,
    compensation: T,
}

impl<T: Float> NeumaierSum<T> {
    pub fn new() -> Self {
        NeumaierSum {
            sum: T::zero(),
            compensation: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation = self.compensation + ((self.sum - t) + x);
        } else {
            self.compensation = self.compensation + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.compensation
    }
}

impl<T: Float> FromIterator<T> for NeumaierSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub fn compensated_sum<T: Float>(xs: impl IntoIterator<Item = T>) -> T {
    xs.into_iter().collect::<NeumaierSum<T>>().value()
}

/// Sample mean and standard error of the mean, summed in slice order.
///
/// Returns `None` for fewer than two values.
pub fn mean_stderr(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mean = compensated_sum(xs.iter().copied()) / n;
    let ss = compensated_sum(xs.iter().map(|&x| (x - mean) * (x - mean)));
    let var = ss / (n - 1.0);
    Some((mean, (var / n).sqrt()))
}

/// `z` statistic for the difference of two independent estimates.
pub fn z_score(mean_a: f64, se_a: f64, mean_b: f64, se_b: f64) -> f64 {
    let diff = mean_a - mean_b;
    let se = (se_a * se_a + se_b * se_b).sqrt();
    if se == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        }
    } else {
        diff / se
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(xs), 2.0);
        let naive: f64 = xs.iter().sum();
        assert_ne!(naive, 2.0);
    }

    #[test]
    fn mean_and_stderr() {
        let (m, se) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m, 2.5);
        // sample variance 5/3, stderr sqrt(5/12)
        assert!((se - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert!(mean_stderr(&[1.0]).is_none());
        assert_eq!(mean_stderr(&[2.0, 2.0]).unwrap(), (2.0, 0.0));
    }

    #[test]
    fn z_score_edge_cases() {
        assert_eq!(z_score(1.0, 0.0, 1.0, 0.0), 0.0);
        assert_eq!(z_score(1.0, 0.0, 0.5, 0.0), f64::INFINITY);
        assert_eq!(z_score(1.0, 0.3, 1.5, 0.4), -1.0);
    }
}
