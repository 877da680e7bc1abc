//! Neumaier-compensated accumulation for complex sums.

use num_complex::Complex64;

/// Sums with more terms than this are accumulated with compensation.
pub const COMPENSATION_THRESHOLD: usize = 1024;

#[derive(Debug, Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    fn add(&mut self, v: f64) {
        let s = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - s) + v;
        } else {
            self.comp += (v - s) + self.sum;
        }
        self.sum = s;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated complex accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct ComplexNeumaier {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexNeumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: Complex64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    pub fn total(&self) -> Complex64 {
        Complex64::new(self.re.total(), self.im.total())
    }
}

/// Sums `count` terms produced by `term(j)` for `j` in `1..=count`, in index
/// order; compensated when `count` exceeds [`COMPENSATION_THRESHOLD`].
pub fn sum_terms<E, F>(count: usize, mut term: F) -> Result<Complex64, E>
where
    F: FnMut(usize) -> Result<Complex64, E>,
{
    if count > COMPENSATION_THRESHOLD {
        let mut acc = ComplexNeumaier::new();
        for j in 1..=count {
            acc.add(term(j)?);
        }
        Ok(acc.total())
    } else {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 1..=count {
            acc += term(j)?;
        }
        Ok(acc)
    }
}
