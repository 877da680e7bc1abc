//! Exponential error bounds for integrands analytic in a strip.
//!
//! The corrected rule `S0` applied to `K u` equals the plain trapezoidal rule
//! applied to the pole-free function
//!
//! ```text
//! F1(z) = K(z) [u(z) - u(t) - (T/pi) u'(t) tan(w) - (T^2/2pi^2) u''(t) sin^2(w)],  w = pi (z-t)/T
//! ```
//!
//! so Davis' strip bound for the trapezoidal rule transfers to `S0`, and
//! through the composition identities to `S1` and `S2`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::domain::{PeriodicDomain, Rule, SmoothFactor};
use crate::error::{HfpError, Result};
use crate::functions::Runge;

/// Radius (relative to `T`) around a real pole image inside which
/// [`f1_eval`] returns the limiting value `F1(t)`.
pub const F1_SWITCH_RADIUS: f64 = 1e-3;

/// Default number of samples per line for [`sample_m`].
pub const DEFAULT_LINE_SAMPLES: usize = 1024;

/// Half-width `sigma` of the strip of analyticity and the working line `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripSpec {
    sigma: f64,
    tau: f64,
}

impl StripSpec {
    pub fn new(sigma: f64, tau: f64) -> Result<Self> {
        if !(sigma > 0.0 && tau > 0.0 && tau < sigma) {
            return Err(HfpError::InvalidArgument(format!(
                "need 0 < tau < sigma, got tau={tau}, sigma={sigma}"
            )));
        }
        Ok(Self { sigma, tau })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub rule: Rule,
    pub n: usize,
    pub tau: f64,
    pub m_hat: f64,
    pub phi_n: f64,
    pub phi_2n: f64,
    pub phi_4n: f64,
    pub bound: f64,
}

/// `q / (1 - q)` with `q = exp(-2 n pi tau / T)`, evaluated as
/// `1 / expm1(2 n pi tau / T)`.
pub fn phi(n: usize, tau: f64, period: f64) -> f64 {
    let x = 2.0 * n as f64 * PI * tau / period;
    1.0 / x.exp_m1()
}

/// `F1(z)` in the pole-free form
/// `K u - u(t) K - (T/pi) u'(t) csc^2(w) - (T^2/2pi^2) u''(t) cot(w)`.
pub fn f1_eval(z: Complex64, u: &dyn SmoothFactor, dom: &PeriodicDomain) -> Result<Complex64> {
    let period = dom.period();
    let t = dom.t();
    let d = u.derivatives_at(t).ok_or(HfpError::MissingDerivatives(
        "F1 needs u(t), u'(t), u''(t), u'''(t)",
    ))?;

    let re_off = {
        let delta = z.re - t;
        delta - (delta / period).round() * period
    };
    if re_off.hypot(z.im) < F1_SWITCH_RADIUS * period {
        let c = period.powi(3) / (6.0 * PI.powi(3));
        return Ok((d[3] - d[1] * (2.0 * PI * PI / (period * period))) * c);
    }

    let uz = u.eval_complex(z).ok_or(HfpError::MissingComplexEval)?;
    let w = (Complex64::new(re_off, z.im)) * (PI / period);
    let s = w.sin();
    let c = w.cos();
    let s2 = s * s;
    let kernel = c / (s2 * s);
    let value = kernel * (uz - d[0])
        - d[1] * (period / PI) / s2
        - d[2] * (period * period / (2.0 * PI * PI)) * c / s;
    Ok(value)
}

fn line_max(
    samples: usize,
    dom: &PeriodicDomain,
    mut g: impl FnMut(Complex64) -> Result<f64>,
    tau: f64,
) -> Result<f64> {
    let (a, period) = (dom.a(), dom.period());
    let mut best = 0.0f64;
    for k in 0..samples {
        let x = a + k as f64 * period / samples as f64;
        best = best.max(g(Complex64::new(x, tau))?);
    }
    Ok(best)
}

fn check_line_args(tau: f64, samples: usize) -> Result<()> {
    if !(tau > 0.0) {
        return Err(HfpError::InvalidArgument(format!(
            "need tau > 0, got {tau}"
        )));
    }
    if samples < 64 {
        return Err(HfpError::InvalidArgument(format!(
            "need at least 64 samples per line, got {samples}"
        )));
    }
    Ok(())
}

/// Sampled `M(tau) = max |F1(x + i tau)| + max |F1(x - i tau)|`.
pub fn sample_m(
    u: &dyn SmoothFactor,
    dom: &PeriodicDomain,
    tau: f64,
    samples: usize,
) -> Result<f64> {
    check_line_args(tau, samples)?;
    let g = |z: Complex64| f1_eval(z, u, dom).map(|v| v.norm());
    Ok(line_max(samples, dom, g, tau)? + line_max(samples, dom, g, -tau)?)
}

/// Sampled `M(tau)` for a regular integrand `f` (no kernel).
pub fn sample_m_regular<F>(f: F, dom: &PeriodicDomain, tau: f64, samples: usize) -> Result<f64>
where
    F: Fn(Complex64) -> Option<Complex64>,
{
    check_line_args(tau, samples)?;
    let g = |z: Complex64| f(z).map(|v| v.norm()).ok_or(HfpError::MissingComplexEval);
    Ok(line_max(samples, dom, g, tau)? + line_max(samples, dom, g, -tau)?)
}

/// Error bound of rule `s` at `n` for the working line `tau`.
pub fn rule_bound(s: Rule, n: usize, tau: f64, m_hat: f64, period: f64) -> Result<f64> {
    let p = |k: usize| phi(k * n, tau, period);
    let factor = match s {
        Rule::S0 | Rule::Trap => p(1),
        Rule::S1 => p(1) + 2.0 * p(2),
        Rule::S2 => 2.0 * p(1) + 5.0 * p(2) + 2.0 * p(4),
    };
    Ok(period * m_hat * factor)
}

/// Davis' bound for the trapezoidal rule on a regular integrand.
pub fn davis_bound(n: usize, tau: f64, m_regular: f64, period: f64) -> f64 {
    period * m_regular * phi(n, tau, period)
}

/// Full report for one `(rule, n, tau)` point, sampling `M(tau)` with
/// `samples` points per line.
pub fn bound_report(
    s: Rule,
    u: &dyn SmoothFactor,
    dom: &PeriodicDomain,
    n: usize,
    tau: f64,
    samples: usize,
) -> Result<BoundReport> {
    let m_hat = sample_m(u, dom, tau, samples)?;
    let period = dom.period();
    Ok(BoundReport {
        rule: s,
        n,
        tau,
        m_hat,
        phi_n: phi(n, tau, period),
        phi_2n: phi(2 * n, tau, period),
        phi_4n: phi(4 * n, tau, period),
        bound: rule_bound(s, n, tau, m_hat, period)?,
    })
}

/// Built-in analytic test factors with a known strip of analyticity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuiltinKind {
    /// `1 / (rho - cos(2 pi x / T))`
    Runge(f64),
}

/// Half-width of the strip of analyticity of a built-in factor.
pub fn derive_sigma(kind: BuiltinKind, period: f64) -> Result<f64> {
    match kind {
        BuiltinKind::Runge(rho) => Ok(Runge::new(rho, period)?.sigma()),
    }
}
