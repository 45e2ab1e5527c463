//! Per-objective return vectors and the accrued/future bookkeeping that
//! planning iterations carry around.

use std::fmt;
use std::ops::Index;

/// A vector of per-objective returns. Single-objective problems use length 1.
///
/// Episode returns are undiscounted sums of these vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct ReturnVector(Vec<f64>);

impl ReturnVector {
    pub fn new(values: Vec<f64>) -> Self {
        ReturnVector(values)
    }

    pub fn zeros(objectives: usize) -> Self {
        ReturnVector(vec![0.0; objectives])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Elementwise sum. Panics if the lengths differ; mixing returns from
    /// problems with different objective counts is a caller bug.
    pub fn add(&self, other: &ReturnVector) -> ReturnVector {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    /// In-place elementwise sum. Panics if the lengths differ.
    pub fn add_assign(&mut self, other: &ReturnVector) {
        assert_eq!(
            self.0.len(),
            other.0.len(),
            "return vectors have different objective counts"
        );
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }

    /// Componentwise match within an absolute tolerance. `tol = 0.0` demands
    /// exact equality (used for integer-valued reward schemes). NaN never
    /// matches anything.
    pub fn approx_eq(&self, other: &ReturnVector, tol: f64) -> bool {
        self.0.len() == other.0.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

impl Index<usize> for ReturnVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Display for ReturnVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// Splits an episode's returns into what execution has already banked
/// (accrued) and what the current planning iteration has simulated so far
/// (future). Utilities are only ever evaluated on [`ReturnLedger::cumulative`].
#[derive(Clone, Debug)]
pub struct ReturnLedger {
    accrued: ReturnVector,
    future: ReturnVector,
}

impl ReturnLedger {
    pub fn new(objectives: usize) -> Self {
        ReturnLedger {
            accrued: ReturnVector::zeros(objectives),
            future: ReturnVector::zeros(objectives),
        }
    }

    pub fn from_accrued(accrued: ReturnVector) -> Self {
        let future = ReturnVector::zeros(accrued.len());
        ReturnLedger { accrued, future }
    }

    pub fn accrued(&self) -> &ReturnVector {
        &self.accrued
    }

    pub fn future(&self) -> &ReturnVector {
        &self.future
    }

    pub fn add_accrued(&mut self, reward: &ReturnVector) {
        self.accrued.add_assign(reward);
    }

    pub fn add_future(&mut self, reward: &ReturnVector) {
        self.future.add_assign(reward);
    }

    /// Accrued plus future returns; the only quantity a utility sees.
    pub fn cumulative(&self) -> ReturnVector {
        self.accrued.add(&self.future)
    }

    /// Drops simulated returns at the start of a fresh planning iteration.
    pub fn clear_future(&mut self) {
        self.future = ReturnVector::zeros(self.accrued.len());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn add_is_elementwise() {
        let a = ReturnVector::new(vec![1.0, 2.0]);
        let b = ReturnVector::new(vec![3.0, 4.0]);
        assert_eq!(a.add(&b), ReturnVector::new(vec![4.0, 6.0]));
    }

    #[test]
    #[should_panic(expected = "different objective counts")]
    fn add_rejects_length_mismatch() {
        let a = ReturnVector::new(vec![1.0, 2.0]);
        let b = ReturnVector::new(vec![1.0]);
        a.add(&b);
    }

    #[test]
    fn approx_eq_uses_absolute_tolerance() {
        let a = ReturnVector::new(vec![1.0, 2.0]);
        let b = ReturnVector::new(vec![1.0 + 5e-10, 2.0]);
        assert!(a.approx_eq(&b, 1e-9));
        assert!(!a.approx_eq(&b, 1e-12));
        assert!(a.approx_eq(&a, 0.0));
        assert!(!a.approx_eq(&ReturnVector::new(vec![1.0]), 1.0));
    }

    #[test]
    fn nan_never_matches() {
        let a = ReturnVector::new(vec![f64::NAN]);
        assert!(!a.approx_eq(&a, 1e9));
    }

    #[test]
    fn ledger_tracks_both_sides() {
        let mut ledger = ReturnLedger::new(2);
        ledger.add_accrued(&ReturnVector::new(vec![1.0, 0.0]));
        ledger.add_future(&ReturnVector::new(vec![0.5, 2.0]));
        ledger.add_future(&ReturnVector::new(vec![0.5, 1.0]));
        assert_eq!(ledger.cumulative(), ReturnVector::new(vec![2.0, 3.0]));
        ledger.clear_future();
        assert_eq!(ledger.cumulative(), ReturnVector::new(vec![1.0, 0.0]));
    }

    proptest! {
        #[test]
        fn cumulative_is_accrued_plus_future(
            xs in proptest::collection::vec(-1e6f64..1e6, 1..6),
            ys in proptest::collection::vec(-1e6f64..1e6, 1..6),
        ) {
            let n = xs.len().min(ys.len());
            let accrued = ReturnVector::new(xs[..n].to_vec());
            let future = ReturnVector::new(ys[..n].to_vec());
            let mut ledger = ReturnLedger::from_accrued(accrued.clone());
            ledger.add_future(&future);
            prop_assert_eq!(ledger.cumulative(), accrued.add(&future));
        }

        #[test]
        fn add_commutes(
            xs in proptest::collection::vec(-1e6f64..1e6, 1..6),
            ys in proptest::collection::vec(-1e6f64..1e6, 1..6),
        ) {
            let n = xs.len().min(ys.len());
            let a = ReturnVector::new(xs[..n].to_vec());
            let b = ReturnVector::new(ys[..n].to_vec());
            prop_assert_eq!(a.add(&b), b.add(&a));
        }
    }
}
