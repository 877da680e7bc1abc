//! Built-in smooth factors `u` used by the harness and the tests.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::domain::SmoothFactor;
use crate::error::{HfpError, Result};
use crate::kernel::unit_phase;
use crate::spectral::TrigPoly;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `u(x) = c`.
#[derive(Debug, Clone, Copy)]
pub struct Constant(Complex64);

impl Constant {
    pub fn new(value: impl Into<Complex64>) -> Self {
        Self(value.into())
    }
}

impl SmoothFactor for Constant {
    fn eval(&self, _x: f64) -> Complex64 {
        self.0
    }

    fn eval_complex(&self, _z: Complex64) -> Option<Complex64> {
        Some(self.0)
    }

    fn derivatives_at(&self, _x: f64) -> Option<[Complex64; 4]> {
        let z = Complex64::new(0.0, 0.0);
        Some([self.0, z, z, z])
    }
}

/// The eigenfunction `e_m(x) = exp(i 2 m pi x / T)`.
#[derive(Debug, Clone, Copy)]
pub struct Eigenmode {
    pub m: i64,
    pub period: f64,
}

impl Eigenmode {
    pub fn new(m: i64, period: f64) -> Self {
        Self { m, period }
    }

    fn omega(&self) -> f64 {
        2.0 * PI * self.m as f64 / self.period
    }
}

impl SmoothFactor for Eigenmode {
    fn eval(&self, x: f64) -> Complex64 {
        unit_phase(self.m as f64 * x / self.period)
    }

    fn eval_complex(&self, z: Complex64) -> Option<Complex64> {
        Some((I * self.omega() * z).exp())
    }

    fn derivatives_at(&self, x: f64) -> Option<[Complex64; 4]> {
        let e = self.eval(x);
        let iw = I * self.omega();
        Some([e, iw * e, iw * iw * e, iw * iw * iw * e])
    }
}

/// `u(x) = 1 / (rho - cos(2 pi x / T))`, analytic in the strip
/// `|Im z| < (T / 2 pi) arccosh(rho)`.
#[derive(Debug, Clone, Copy)]
pub struct Runge {
    rho: f64,
    period: f64,
}

impl Runge {
    pub fn new(rho: f64, period: f64) -> Result<Self> {
        if !(rho > 1.0 && rho.is_finite()) {
            return Err(HfpError::DomainError(format!(
                "Runge-type factor needs rho > 1, got {rho}"
            )));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(HfpError::InvalidArgument(format!("bad period {period}")));
        }
        Ok(Self { rho, period })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Half-width of the strip of analyticity.
    pub fn sigma(&self) -> f64 {
        self.period / (2.0 * PI) * self.rho.acosh()
    }

    /// Exact Fourier coefficients `c_m = r^{|m|} / sqrt(rho^2 - 1)` with
    /// `r = rho - sqrt(rho^2 - 1)`, truncated once `r^m (m+1)^2` drops below
    /// `rel_tol`.
    pub fn trig_poly(&self, rel_tol: f64) -> TrigPoly {
        let s = (self.rho * self.rho - 1.0).sqrt();
        let r = self.rho - s;
        let mut degree = 0usize;
        while r.powi(degree as i32) * ((degree + 1) as f64).powi(2) >= rel_tol && degree < 100_000 {
            degree += 1;
        }
        TrigPoly::from_fn(self.period, degree, |m| {
            Complex64::new(r.powi(m.unsigned_abs() as i32) / s, 0.0)
        })
        .expect("finite geometric coefficients")
    }

    /// Mean value over one period, `1 / sqrt(rho^2 - 1)`.
    pub fn mean(&self) -> f64 {
        1.0 / (self.rho * self.rho - 1.0).sqrt()
    }
}

impl SmoothFactor for Runge {
    fn eval(&self, x: f64) -> Complex64 {
        let theta = 2.0 * PI * (x / self.period - (x / self.period).round());
        Complex64::new(1.0 / (self.rho - theta.cos()), 0.0)
    }

    fn eval_complex(&self, z: Complex64) -> Option<Complex64> {
        let w = 2.0 * PI / self.period;
        Some((self.rho - (z * w).cos()).inv())
    }

    fn derivatives_at(&self, x: f64) -> Option<[Complex64; 4]> {
        let w = 2.0 * PI / self.period;
        let theta = 2.0 * PI * (x / self.period - (x / self.period).round());
        let (s, c) = theta.sin_cos();
        // u = 1/D, D = rho - cos(w x)
        let d0 = self.rho - c;
        let d1 = w * s;
        let d2 = w * w * c;
        let d3 = -w * w * w * s;
        let u0 = 1.0 / d0;
        let u1 = -d1 / (d0 * d0);
        let u2 = -d2 / (d0 * d0) + 2.0 * d1 * d1 / (d0 * d0 * d0);
        let u3 = -d3 / (d0 * d0) + 6.0 * d1 * d2 / d0.powi(3) - 6.0 * d1.powi(3) / d0.powi(4);
        Some([u0, u1, u2, u3].map(|v| Complex64::new(v, 0.0)))
    }
}

/// Pointwise sum of two factors.
pub struct Sum<A, B> {
    a: A,
    b: B,
}

impl<A: SmoothFactor, B: SmoothFactor> Sum<A, B> {
    pub fn new(a: A, b: B) -> Self {
        Self { a, b }
    }
}

impl<A: SmoothFactor, B: SmoothFactor> SmoothFactor for Sum<A, B> {
    fn eval(&self, x: f64) -> Complex64 {
        self.a.eval(x) + self.b.eval(x)
    }

    fn eval_complex(&self, z: Complex64) -> Option<Complex64> {
        Some(self.a.eval_complex(z)? + self.b.eval_complex(z)?)
    }

    fn derivatives_at(&self, x: f64) -> Option<[Complex64; 4]> {
        let (p, q) = (self.a.derivatives_at(x)?, self.b.derivatives_at(x)?);
        Some([p[0] + q[0], p[1] + q[1], p[2] + q[2], p[3] + q[3]])
    }
}
