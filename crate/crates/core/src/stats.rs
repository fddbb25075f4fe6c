//! Numeric kernels: streaming moments and rank correlation.
//!
//! Both are generic over the float type via `num-traits`; the crate root
//! fixes `f64` aliases for the aggregation pipeline.

use num_traits::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("input vectors have different lengths ({x} vs {y})")]
    LengthMismatch { x: usize, y: usize },
    #[error("need at least two observations, got {0}")]
    TooShort(usize),
    #[error("constant input has no rank ordering")]
    ConstantInput,
    #[error("input contains a non-finite value")]
    NonFinite,
}

/// Welford accumulator: count, running mean, and sum of squared deviations.
/// Merging two accumulators is associative and commutative up to float
/// rounding, so any parallel reduction tree agrees with a sequential pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunningStats<T> {
    pub count: u64,
    pub mean: T,
    pub m2: T,
}

impl<T: Float> Default for RunningStats<T> {
    fn default() -> Self {
        RunningStats {
            count: 0,
            mean: T::zero(),
            m2: T::zero(),
        }
    }
}

impl<T: Float> RunningStats<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: T) {
        self.count += 1;
        let n = T::from(self.count).expect("count fits in float");
        let delta = x - self.mean;
        self.mean = self.mean + delta / n;
        let delta2 = x - self.mean;
        self.m2 = self.m2 + delta * delta2;
    }

    pub fn merge(&self, other: &RunningStats<T>) -> RunningStats<T> {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let count = self.count + other.count;
        let na = T::from(self.count).expect("count fits");
        let nb = T::from(other.count).expect("count fits");
        let n = T::from(count).expect("count fits");
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * (nb / n);
        let m2 = self.m2 + other.m2 + delta * delta * (na * nb / n);
        RunningStats { count, mean, m2 }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> Option<T> {
        (self.count > 0).then_some(self.mean)
    }

    /// Population variance `M2 / count`.
    pub fn variance(&self) -> Option<T> {
        (self.count > 0).then(|| self.m2 / T::from(self.count).expect("count fits"))
    }

    /// Population standard deviation.
    pub fn std(&self) -> Option<T> {
        self.variance().map(|v| v.max(T::zero()).sqrt())
    }

    pub fn from_values<I: IntoIterator<Item = T>>(values: I) -> Self {
        let mut stats = Self::new();
        for v in values {
            stats.push(v);
        }
        stats
    }
}

/// Average ranks with ties mapped to the mean of their rank range
/// (midranks), 1-based.
pub fn average_ranks<T: Float>(values: &[T]) -> Vec<T> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![T::zero(); values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Positions i..=j share the midrank.
        let midrank = T::from(i + j + 2).expect("rank fits") / T::from(2).unwrap();
        for &idx in &order[i..=j] {
            ranks[idx] = midrank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation: the Pearson correlation of average ranks.
pub fn spearman<T: Float>(x: &[T], y: &[T]) -> Result<T, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch { x: x.len(), y: y.len() });
    }
    if x.len() < 2 {
        return Err(StatsError::TooShort(x.len()));
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let constant = |v: &[T]| v.iter().all(|&a| a == v[0]);
    if constant(x) || constant(y) {
        return Err(StatsError::ConstantInput);
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    Ok(pearson_of_ranks(&rx, &ry))
}

fn pearson_of_ranks<T: Float>(rx: &[T], ry: &[T]) -> T {
    let n = T::from(rx.len()).expect("length fits");
    let mean_x = rx.iter().fold(T::zero(), |a, &b| a + b) / n;
    let mean_y = ry.iter().fold(T::zero(), |a, &b| a + b) / n;
    let mut cov = T::zero();
    let mut var_x = T::zero();
    let mut var_y = T::zero();
    for (&a, &b) in rx.iter().zip(ry.iter()) {
        let da = a - mean_x;
        let db = b - mean_y;
        cov = cov + da * db;
        var_x = var_x + da * da;
        var_y = var_y + db * db;
    }
    cov / (var_x * var_y).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed_moments() {
        let s = RunningStats::from_values([1.0f64, 3.0]);
        assert_eq!(s.count(), 2);
        assert_eq!(s.mean(), Some(2.0));
        assert_eq!(s.std(), Some(1.0));
        assert_eq!(RunningStats::<f64>::new().mean(), None);
    }

    #[test]
    fn merge_matches_sequential() {
        let values: Vec<f64> = (0..100).map(|i| ((i * 37) % 11) as f64 / 3.0).collect();
        let whole = RunningStats::from_values(values.iter().copied());
        for split in [1usize, 13, 50, 99] {
            let left = RunningStats::from_values(values[..split].iter().copied());
            let right = RunningStats::from_values(values[split..].iter().copied());
            let merged = left.merge(&right);
            let flipped = right.merge(&left);
            assert_eq!(merged.count, whole.count);
            assert!((merged.mean - whole.mean).abs() < 1e-12);
            assert!((merged.m2 - whole.m2).abs() < 1e-9);
            assert!((merged.mean - flipped.mean).abs() < 1e-12);
        }
    }

    #[test]
    fn merge_with_empty_is_identity() {
        let s = RunningStats::from_values([2.0f64, 4.0, 9.0]);
        let e = RunningStats::new();
        assert_eq!(s.merge(&e), s);
        assert_eq!(e.merge(&s), s);
    }

    #[test]
    fn monotone_vectors_hit_the_extremes() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(), 1.0);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
    }

    #[test]
    fn ties_use_midranks() {
        let ranks = average_ranks(&[1.0f64, 2.0, 2.0, 4.0]);
        assert_eq!(ranks, vec![1.0, 2.5, 2.5, 4.0]);
    }

    #[test]
    fn constant_input_is_an_error() {
        assert_eq!(
            spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap_err(),
            StatsError::ConstantInput
        );
    }

    #[test]
    fn generic_over_f32() {
        let rho: f32 = spearman(&[1.0f32, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap();
        assert!((rho - 0.5).abs() < 1e-6);
    }

    #[test]
    fn symmetric_in_arguments() {
        let x = [1.0, 2.0, 2.0, 4.0, 0.5];
        let y = [1.0, 3.0, 2.0, 4.0, 4.0];
        assert_eq!(spearman(&x, &y).unwrap(), spearman(&y, &x).unwrap());
    }
}
