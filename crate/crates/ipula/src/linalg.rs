//! Small dense-vector helpers used throughout the crate.
//!
//! States are plain slices; nothing here allocates unless it returns a new
//! vector. Sums that feed reproducibility-sensitive aggregates use
//! compensated (Kahan) accumulation so results do not depend on how work was
//! chunked.

use crate::scalar::Scalar;

pub fn dot<F: Scalar>(a: &[F], b: &[F]) -> F {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = KahanSum::default();
    for (&x, &y) in a.iter().zip(b) {
        acc.add(x * y);
    }
    acc.value()
}

pub fn norm_squared<F: Scalar>(a: &[F]) -> F {
    dot(a, a)
}

pub fn norm<F: Scalar>(a: &[F]) -> F {
    norm_squared(a).sqrt()
}

pub fn distance_squared<F: Scalar>(a: &[F], b: &[F]) -> F {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = KahanSum::default();
    for (&x, &y) in a.iter().zip(b) {
        let d = x - y;
        acc.add(d * d);
    }
    acc.value()
}

pub fn distance<F: Scalar>(a: &[F], b: &[F]) -> F {
    distance_squared(a, b).sqrt()
}

pub fn all_finite<F: Scalar>(a: &[F]) -> bool {
    a.iter().all(|v| v.is_finite())
}

/// Compensated scalar accumulator (Kahan-Babuska).
#[derive(Clone, Copy, Debug)]
pub struct KahanSum<F: Scalar> {
    sum: F,
    compensation: F,
}

impl<F: Scalar> Default for KahanSum<F> {
    fn default() -> Self {
        KahanSum { sum: F::zero(), compensation: F::zero() }
    }
}

impl<F: Scalar> KahanSum<F> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: F) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.compensation += (self.sum - t) + v;
        } else {
            self.compensation += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> F {
        self.sum + self.compensation
    }
}

pub fn kahan_sum<F: Scalar>(values: impl IntoIterator<Item = F>) -> F {
    let mut acc = KahanSum::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_and_norms() {
        let a = [3.0f64, 4.0];
        assert_eq!(norm(&a), 5.0);
        assert_eq!(dot(&a, &[1.0, 2.0]), 11.0);
        assert_eq!(distance(&a, &[3.0, 0.0]), 4.0);
    }

    #[test]
    fn kahan_recovers_poorly_conditioned_sum() {
        // 1 followed by many tiny values that a naive f64 sum drops entirely.
        let tiny = 1e-16f64;
        let n = 10_000usize;
        let mut acc = KahanSum::default();
        acc.add(1.0);
        for _ in 0..n {
            acc.add(tiny);
        }
        let expected = 1.0 + tiny * n as f64;
        assert!((acc.value() - expected).abs() < 1e-18, "got {}", acc.value());
    }
}
