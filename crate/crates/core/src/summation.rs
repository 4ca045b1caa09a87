//! Compensated summation for alternating sums.
//!
//! The weighted sums that appear throughout this crate mix large terms of
//! both signs. Positive and negative parts are accumulated separately, each
//! in increasing magnitude order with Neumaier compensation, and only
//! combined at the end.

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl std::iter::FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Result of a sign-separated sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedSum {
    pub value: f64,
    /// Largest absolute term, the natural scale for rounding error.
    pub max_term: f64,
    /// Sum of absolute terms.
    pub abs_sum: f64,
}

/// Sums `terms` with positives and negatives accumulated separately in
/// increasing magnitude.
pub fn signed_sum<I: IntoIterator<Item = f64>>(terms: I) -> SignedSum {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for t in terms {
        if t >= 0.0 {
            pos.push(t);
        } else {
            neg.push(-t);
        }
    }
    pos.sort_by(f64::total_cmp);
    neg.sort_by(f64::total_cmp);
    let max_term = pos
        .last()
        .copied()
        .unwrap_or(0.0)
        .max(neg.last().copied().unwrap_or(0.0));
    let p: NeumaierSum = pos.iter().copied().collect();
    let n: NeumaierSum = neg.iter().copied().collect();
    SignedSum {
        value: p.value() - n.value(),
        max_term,
        abs_sum: p.value() + n.value(),
    }
}
