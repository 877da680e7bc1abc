//! Fourier machinery: trigonometric polynomials, discrete Fourier
//! coefficients of a smooth factor, spectral derivatives, and the mode-by-mode
//! reference value of the finite-part integral.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

use crate::domain::{PeriodicDomain, SmoothFactor};
use crate::error::{HfpError, Result};
use crate::kernel::{eigenvalue, unit_phase};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `p(x) = sum_{|m| <= M} c_m exp(i 2 m pi x / T)`.
///
/// The stored degree is the largest `|m|` with a nonzero coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    period: f64,
    degree: usize,
    // c_{-M}, ..., c_0, ..., c_M
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    /// Builds from coefficients `c_{-M..=M}` (length must be odd).
    pub fn new(period: f64, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(HfpError::InvalidArgument(
                "coefficient vector must have odd length 2M+1".into(),
            ));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(HfpError::InvalidArgument(format!("bad period {period}")));
        }
        if coeffs
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(HfpError::InvalidArgument("non-finite coefficient".into()));
        }
        let half = coeffs.len() / 2;
        let degree = (0..=half)
            .rev()
            .find(|&m| coeffs[half + m] != ZERO || coeffs[half - m] != ZERO)
            .unwrap_or(0);
        let coeffs = coeffs[half - degree..=half + degree].to_vec();
        Ok(Self {
            period,
            degree,
            coeffs,
        })
    }

    /// Builds `sum_{|m| <= degree} coeff(m) e_m`.
    pub fn from_fn(period: f64, degree: usize, coeff: impl Fn(i64) -> Complex64) -> Result<Self> {
        let d = degree as i64;
        Self::new(period, (-d..=d).map(coeff).collect())
    }

    pub fn constant(period: f64, value: Complex64) -> Self {
        Self {
            period,
            degree: 0,
            coeffs: vec![value],
        }
    }

    /// `cos(2 pi x / T)`.
    pub fn cosine(period: f64) -> Self {
        let half = Complex64::new(0.5, 0.0);
        Self {
            period,
            degree: 1,
            coeffs: vec![half, ZERO, half],
        }
    }

    /// Seeded random polynomial with coefficients uniform in `[0,1) x [0,1)i`.
    /// With `realify`, `c_{-m} = conj(c_m)` so the polynomial is real on the
    /// real axis.
    pub fn random(degree: usize, seed: u64, realify: bool, period: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || Complex64::new(rng.gen::<f64>(), rng.gen::<f64>());
        let mut coeffs = vec![ZERO; 2 * degree + 1];
        if realify {
            coeffs[degree] = Complex64::new(draw().re, 0.0);
            for m in 1..=degree {
                let c = draw();
                coeffs[degree + m] = c;
                coeffs[degree - m] = c.conj();
            }
        } else {
            for c in coeffs.iter_mut() {
                *c = draw();
            }
        }
        Self {
            period,
            degree,
            coeffs,
        }
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `c_m`, zero beyond the degree.
    pub fn coeff(&self, m: i64) -> Complex64 {
        if m.unsigned_abs() as usize > self.degree {
            ZERO
        } else {
            self.coeffs[(self.degree as i64 + m) as usize]
        }
    }

    /// `(m, c_m)` for `m = -M..=M`.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let d = self.degree as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i as i64 - d, c))
    }

    pub fn max_magnitude(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `max(|c_k|, |c_{-k}|)`.
    pub fn trailing_magnitude(&self, k: usize) -> f64 {
        let k = k as i64;
        self.coeff(k).norm().max(self.coeff(-k).norm())
    }

    /// `sum_m c_m (i 2 pi m / T)^order e_m(x)`; order 0 is plain evaluation.
    pub fn derivative(&self, x: f64, order: u32) -> Complex64 {
        let w = 2.0 * PI / self.period;
        self.modes()
            .filter(|(_, c)| *c != ZERO)
            .map(|(m, c)| {
                let factor = (I * (w * m as f64)).powu(order);
                c * factor * unit_phase(m as f64 * x / self.period)
            })
            .sum()
    }

    /// `sum_m c_m lambda_m e_m(t)`: the exact finite-part integral of `K p`.
    pub fn hfp_eigen_sum(&self, dom: &PeriodicDomain) -> Complex64 {
        let t = dom.t();
        self.modes()
            .filter(|(m, c)| *m != 0 && *c != ZERO)
            .map(|(m, c)| c * eigenvalue(m, dom.period()) * unit_phase(m as f64 * t / dom.period()))
            .sum()
    }

    /// `sum_m |c_m lambda_m|`.
    pub fn weighted_l1(&self) -> f64 {
        self.modes()
            .map(|(m, c)| (c * eigenvalue(m, self.period)).norm())
            .sum()
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        Self {
            period: self.period,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * alpha).collect(),
        }
    }
}

impl SmoothFactor for TrigPoly {
    fn eval(&self, x: f64) -> Complex64 {
        self.derivative(x, 0)
    }

    fn eval_complex(&self, z: Complex64) -> Option<Complex64> {
        let w = 2.0 * PI / self.period;
        Some(
            self.modes()
                .filter(|(_, c)| *c != ZERO)
                .map(|(m, c)| c * (I * w * m as f64 * z).exp())
                .sum(),
        )
    }

    fn derivatives_at(&self, x: f64) -> Option<[Complex64; 4]> {
        Some([
            self.derivative(x, 0),
            self.derivative(x, 1),
            self.derivative(x, 2),
            self.derivative(x, 3),
        ])
    }
}

/// Seeded random trigonometric polynomial; see [`TrigPoly::random`].
pub fn random_trig_poly(degree: usize, seed: u64, realify: bool, period: f64) -> TrigPoly {
    TrigPoly::random(degree, seed, realify, period)
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 8 || samples % 2 != 0 {
        return Err(HfpError::InvalidArgument(format!(
            "spectral sampling needs an even N >= 8, got {samples}"
        )));
    }
    Ok(())
}

/// Fourier coefficients of `u` (as a polynomial in `e_m(x)`) for
/// `|m| <= N/2 - 1`, from `N` samples on the grid `a + kT/N`. The Nyquist
/// mode is dropped.
pub fn fourier_coefficients(
    u: &dyn SmoothFactor,
    dom: &PeriodicDomain,
    samples: usize,
) -> Result<TrigPoly> {
    check_samples(samples)?;
    let n = samples;
    let (a, period) = (dom.a(), dom.period());
    let mut buf: Vec<Complex64> = (0..n)
        .map(|k| u.eval(a + k as f64 * period / n as f64))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let inv_n = 1.0 / n as f64;
    let half = (n / 2 - 1) as i64;
    TrigPoly::from_fn(period, half as usize, |m| {
        let idx = if m >= 0 {
            m as usize
        } else {
            (n as i64 + m) as usize
        };
        // shift the grid origin from a back to 0
        buf[idx] * inv_n * unit_phase(-(m as f64) * a / period)
    })
}

/// `d^order p / dx^order` at `t`, for `order` in `1..=3`.
pub fn differentiate_at(p: &TrigPoly, t: f64, order: u32) -> Result<Complex64> {
    if !(1..=3).contains(&order) {
        return Err(HfpError::InvalidArgument(format!(
            "derivative order must be 1, 2 or 3, got {order}"
        )));
    }
    Ok(p.derivative(t, order))
}

/// Reference value of the finite-part integral of `K u`, with the tail
/// indicator used to judge whether `N` resolved `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralReference {
    pub value: Complex64,
    /// `max(|c_{N/2-2}|, |c_{N/2-1}|) (N/2)^2`, over both signs of the index.
    pub tail: f64,
}

pub fn spectral_hfp_reference(
    u: &dyn SmoothFactor,
    dom: &PeriodicDomain,
    samples: usize,
) -> Result<SpectralReference> {
    let poly = fourier_coefficients(u, dom, samples)?;
    let half = samples / 2;
    let tail = poly
        .trailing_magnitude(half - 2)
        .max(poly.trailing_magnitude(half - 1))
        * (half * half) as f64;
    let limit = 1e-8 * poly.weighted_l1();
    if tail > limit {
        return Err(HfpError::SpectralResolutionTooLow { tail, limit });
    }
    Ok(SpectralReference {
        value: poly.hfp_eigen_sum(dom),
        tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{Constant, Eigenmode, Runge};
    use proptest::prelude::*;

    fn dom01(t: f64) -> PeriodicDomain {
        PeriodicDomain::new(0.0, 1.0, t).unwrap()
    }

    /// Textbook O(N^2) transform, anchored at `a`, with the same phase shift
    /// to the `e_m(x)` basis.
    fn direct_dft(u: &dyn SmoothFactor, dom: &PeriodicDomain, n: usize) -> Vec<(i64, Complex64)> {
        let (a, period) = (dom.a(), dom.period());
        let samples: Vec<Complex64> = (0..n)
            .map(|k| u.eval(a + k as f64 * period / n as f64))
            .collect();
        let half = n as i64 / 2 - 1;
        (-half..=half)
            .map(|m| {
                let s: Complex64 = samples
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        let ang =
                            -2.0 * PI * ((m * k as i64).rem_euclid(n as i64)) as f64 / n as f64;
                        v * Complex64::from_polar(1.0, ang)
                    })
                    .sum();
                let shift = Complex64::from_polar(1.0, -2.0 * PI * m as f64 * a / period);
                (m, s / n as f64 * shift)
            })
            .collect()
    }

    #[test]
    fn fft_agrees_with_direct_transform() {
        let dom = PeriodicDomain::new(-0.4, 1.1, 0.2).unwrap();
        let runge = Runge::new(1.3, dom.period()).unwrap();
        for n in [8usize, 16, 64, 100] {
            let fast = fourier_coefficients(&runge, &dom, n).unwrap();
            let max_u = 1.0 / 0.3;
            for (m, c) in direct_dft(&runge, &dom, n) {
                assert!(
                    (fast.coeff(m) - c).norm() <= 1e-12 * n as f64 * max_u,
                    "n={n} m={m}"
                );
            }
        }
    }

    #[test]
    fn cosine_coefficients() {
        let dom = dom01(0.3);
        let p = fourier_coefficients(&TrigPoly::cosine(1.0), &dom, 16).unwrap();
        for (m, c) in p.modes() {
            let want = if m.abs() == 1 { 0.5 } else { 0.0 };
            assert!((c - want).norm() <= 1e-14, "m={m}");
        }
        let one = fourier_coefficients(&Constant::new(1.0), &dom, 16).unwrap();
        assert!((one.coeff(0) - 1.0).norm() < 1e-15);
        assert!(one
            .modes()
            .filter(|(m, _)| *m != 0)
            .all(|(_, c)| c.norm() < 1e-15));
    }

    #[test]
    fn runge_coefficients_are_geometric() {
        let dom = dom01(0.3);
        let runge = Runge::new(1.25, 1.0).unwrap();
        let p = fourier_coefficients(&runge, &dom, 128).unwrap();
        assert!((p.coeff(2) - 1.0 / 3.0).norm() < 1e-14);
        for m in -20..=20i64 {
            let want = 0.5f64.powi(m.abs() as i32) / 0.75;
            assert!((p.coeff(m) - want).norm() < 1e-14, "m={m}");
        }
        // c_2 by an independent fine midpoint rule on u(x) cos(4 pi x)
        let k = 20000;
        let c2: f64 = (0..k)
            .map(|j| {
                let x = (j as f64 + 0.5) / k as f64;
                runge.eval(x).re * (4.0 * PI * x).cos()
            })
            .sum::<f64>()
            / k as f64;
        assert!((c2 - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn coefficients_follow_the_shifted_origin() {
        let dom = PeriodicDomain::new(2.3, 3.3, 2.9).unwrap();
        let e3 = Eigenmode::new(3, 1.0);
        let p = fourier_coefficients(&e3, &dom, 16).unwrap();
        assert!((p.coeff(3) - 1.0).norm() < 1e-13);
        assert!(p
            .modes()
            .filter(|(m, _)| *m != 3)
            .all(|(_, c)| c.norm() < 1e-13));
    }

    #[test]
    fn rejects_bad_sample_counts() {
        let dom = dom01(0.3);
        assert!(fourier_coefficients(&Constant::new(1.0), &dom, 6).is_err());
        assert!(fourier_coefficients(&Constant::new(1.0), &dom, 17).is_err());
    }

    #[test]
    fn differentiation_examples() {
        let e1 = TrigPoly::from_fn(2.0 * PI, 1, |m| {
            if m == 1 {
                Complex64::new(1.0, 0.0)
            } else {
                ZERO
            }
        })
        .unwrap();
        assert!((differentiate_at(&e1, 0.0, 1).unwrap() - I).norm() < 1e-15);
        assert!((differentiate_at(&e1, 0.0, 3).unwrap() + I).norm() < 1e-15);
        let c = TrigPoly::cosine(1.0);
        assert!(differentiate_at(&c, 0.25, 2).unwrap().norm() < 1e-12);
        let second = differentiate_at(&c, 0.0, 2).unwrap();
        assert!((second.re + 4.0 * PI * PI).abs() < 1e-12);
        assert!(differentiate_at(&c, 0.0, 4).is_err());
        assert!(differentiate_at(&c, 0.0, 0).is_err());
    }

    #[test]
    fn reference_examples() {
        let dom = dom01(0.3);
        let e1 = Eigenmode::new(1, 1.0);
        let r = spectral_hfp_reference(&e1, &dom, 16).unwrap();
        let want = eigenvalue(1, 1.0) * unit_phase(0.3);
        assert!((r.value - want).norm() < 1e-12);

        let runge = Runge::new(1.25, 1.0).unwrap();
        let r = spectral_hfp_reference(&runge, &dom, 256).unwrap();
        assert!(r.value.im.abs() <= 1e-10 * r.value.norm());

        let at_zero = PeriodicDomain::new(-0.5, 0.5, 0.0).unwrap();
        let r = spectral_hfp_reference(&runge, &at_zero, 256).unwrap();
        assert!(r.value.norm() < 1e-10);
    }

    #[test]
    fn reference_flags_undersampling() {
        let dom = dom01(0.3);
        let runge = Runge::new(1.25, 1.0).unwrap();
        assert!(matches!(
            spectral_hfp_reference(&runge, &dom, 32),
            Err(HfpError::SpectralResolutionTooLow { .. })
        ));
    }

    #[test]
    fn reference_matches_analytic_coefficients() {
        let dom = dom01(0.3);
        let runge = Runge::new(1.25, 1.0).unwrap();
        let exact = runge.trig_poly(1e-300).hfp_eigen_sum(&dom);
        let r = spectral_hfp_reference(&runge, &dom, 256).unwrap();
        assert!((r.value - exact).norm() < 1e-9 * exact.norm());
    }

    #[test]
    fn random_polys() {
        let p = random_trig_poly(0, 99, false, 1.0);
        assert_eq!(p.degree(), 0);
        assert_eq!(
            random_trig_poly(6, 5, true, 1.0),
            random_trig_poly(6, 5, true, 1.0)
        );
        assert_ne!(
            random_trig_poly(6, 5, true, 1.0),
            random_trig_poly(6, 6, true, 1.0)
        );
        let q = random_trig_poly(9, 17, true, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let vals: Vec<Complex64> = (0..100)
            .map(|_| q.eval(rand::Rng::gen::<f64>(&mut rng) * 3.0 - 1.0))
            .collect();
        let max = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(vals.iter().all(|v| v.im.abs() <= 1e-12 * max));
    }

    #[test]
    fn trim_drops_zero_tail() {
        let p = TrigPoly::new(1.0, vec![ZERO, ZERO, Complex64::new(2.0, 0.0), ZERO, ZERO]).unwrap();
        assert_eq!(p.degree(), 0);
        let z = TrigPoly::new(1.0, vec![ZERO; 7]).unwrap();
        assert_eq!(z.degree(), 0);
        assert!(TrigPoly::new(1.0, vec![ZERO; 4]).is_err());
    }

    proptest! {
        #[test]
        fn sampling_round_trip(degree in 0usize..12, seed in 0u64..1000, realify: bool) {
            let dom = PeriodicDomain::new(-0.3, 0.7, 0.1).unwrap();
            let p = random_trig_poly(degree, seed, realify, 1.0);
            let n = 2 * degree + 2;
            let n = if n < 8 { 8 } else { n };
            let q = fourier_coefficients(&p, &dom, n).unwrap();
            for m in -(degree as i64)..=degree as i64 {
                prop_assert!((p.coeff(m) - q.coeff(m)).norm() <= 1e-12);
            }
            // Parseval
            let energy: f64 = q.modes().map(|(_, c)| c.norm_sqr()).sum();
            let samples: f64 = (0..n)
                .map(|k| p.eval(dom.a() + k as f64 / n as f64).norm_sqr())
                .sum::<f64>() / n as f64;
            prop_assert!((energy - samples).abs() <= 1e-10 * samples.max(1e-300));
        }

        #[test]
        fn reference_is_linear(seed in 0u64..500, ar in -2.0f64..2.0, ai in -2.0f64..2.0) {
            let dom = PeriodicDomain::new(0.0, 1.0, 0.37).unwrap();
            let p = random_trig_poly(5, seed, false, 1.0);
            let q = random_trig_poly(7, seed + 1, true, 1.0);
            let alpha = Complex64::new(ar, ai);
            let beta = Complex64::new(0.5, -1.5);
            let combo = crate::functions::Sum::new(p.scale(alpha), q.scale(beta));
            let lhs = spectral_hfp_reference(&combo, &dom, 32).unwrap().value;
            let rhs = spectral_hfp_reference(&p, &dom, 32).unwrap().value * alpha
                + spectral_hfp_reference(&q, &dom, 32).unwrap().value * beta;
            prop_assert!((lhs - rhs).norm() <= 1e-11 * lhs.norm().max(1.0));
        }
    }
}
