//! Compensated (Neumaier) summation for complex terms.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
    abs: f64,
}

#[inline]
fn two_sum(acc: f64, comp: &mut f64, x: f64) -> f64 {
    let t = acc + x;
    if acc.abs() >= x.abs() {
        *comp += (acc - t) + x;
    } else {
        *comp += (x - t) + acc;
    }
    t
}

impl CompensatedSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub(crate) fn add(&mut self, x: Complex64) {
        self.sum.re = two_sum(self.sum.re, &mut self.comp.re, x.re);
        self.sum.im = two_sum(self.sum.im, &mut self.comp.im, x.im);
        self.abs += x.norm();
    }

    pub(crate) fn merge(&mut self, other: &CompensatedSum) {
        let abs = self.abs + other.abs;
        self.add(other.sum);
        self.add(other.comp);
        self.abs = abs;
    }

    pub(crate) fn value(&self) -> Complex64 {
        self.sum + self.comp
    }

    /// Σ|term|, the scale for rounding error estimates.
    pub(crate) fn abs_sum(&self) -> f64 {
        self.abs
    }
}
