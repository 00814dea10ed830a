/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another partial sum into this one.
    pub fn merge(&mut self, other: CompensatedSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        iter.into_iter().for_each(|x| s.add(x));
        s
    }
}

/// `log2(n)` for a power of two, `None` otherwise.
pub fn exact_log2(n: usize) -> Option<u32> {
    (n.is_power_of_two()).then(|| n.trailing_zeros())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_terms() {
        let s: CompensatedSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn merge_matches_sequential() {
        let xs: Vec<f64> = (0..1000).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let all: CompensatedSum = xs.iter().copied().collect();
        let mut left: CompensatedSum = xs[..500].iter().copied().collect();
        let right: CompensatedSum = xs[500..].iter().copied().collect();
        left.merge(right);
        assert!((left.value() - all.value()).abs() < 1e-15);
    }

    #[test]
    fn log2_of_powers() {
        assert_eq!(exact_log2(1), Some(0));
        assert_eq!(exact_log2(1024), Some(10));
        assert_eq!(exact_log2(12), None);
        assert_eq!(exact_log2(0), None);
    }
}
