//! Neumaier compensated summation.
//!
//! Used wherever floating sums are merged across shards or quadrature cells;
//! merge order is always fixed by the caller so results do not depend on the
//! thread count.

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another accumulator in, keeping both compensation terms.
    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        for v in iter {
            s.add(v);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_terms() {
        let s: NeumaierSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (1..=10_000).map(|k| 1.0 / (k as f64).sqrt()).collect();
        let whole: NeumaierSum = xs.iter().copied().collect();
        let mut parts = NeumaierSum::new();
        for chunk in xs.chunks(333) {
            parts.merge(&chunk.iter().copied().collect());
        }
        let (a, b) = (whole.value(), parts.value());
        assert!((a - b).abs() <= a * 1e-15, "{a} vs {b}");
    }
}
