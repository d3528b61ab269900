//! One verified instance of a rate bound.

/// `(n, value, reference, gap, bound, satisfied)` for one horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateReport {
    pub n: usize,
    pub value: f64,
    pub reference: f64,
    pub gap: f64,
    pub bound: f64,
    pub satisfied: bool,
}

impl RateReport {
    /// Satisfied iff `|value − reference| ≤ bound` exactly.
    pub fn two_sided(n: usize, value: f64, reference: f64, bound: f64) -> Self {
        let gap = (value - reference).abs();
        Self {
            n,
            value,
            reference,
            gap,
            bound,
            satisfied: gap <= bound,
        }
    }

    /// Like [`two_sided`](Self::two_sided) but allows a relative round-off
    /// slack `rel·max(1, bound)`, for bounds that hold with equality.
    pub fn two_sided_with_slack(
        n: usize,
        value: f64,
        reference: f64,
        bound: f64,
        rel: f64,
    ) -> Self {
        let mut r = Self::two_sided(n, value, reference, bound);
        r.satisfied = r.gap <= bound + rel * bound.abs().max(1.0);
        r
    }

    /// Satisfied iff `value ≤ bound`; gap is still `|value − reference|`.
    pub fn one_sided(n: usize, value: f64, reference: f64, bound: f64) -> Self {
        Self {
            n,
            value,
            reference,
            gap: (value - reference).abs(),
            bound,
            satisfied: value <= bound,
        }
    }

    /// `gap / bound`, the fraction of the bound used.
    pub fn tightness(&self) -> f64 {
        if self.bound > 0.0 {
            self.gap / self.bound
        } else if self.gap == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn satisfaction_rules() {
        assert!(RateReport::two_sided(1, 1.0, 0.0, 1.0).satisfied);
        assert!(!RateReport::two_sided(1, 1.0 + 1e-15, 0.0, 1.0).satisfied);
        assert!(RateReport::two_sided_with_slack(1, 1.0 + 1e-15, 0.0, 1.0, 1e-12).satisfied);
        let r = RateReport::one_sided(4, 0.5, 0.0, 0.25);
        assert!(!r.satisfied);
        assert_eq!(r.gap, 0.5);
        assert_eq!(r.tightness(), 2.0);
    }
}
