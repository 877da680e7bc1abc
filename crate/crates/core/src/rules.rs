//! The three supersingular quadrature rules, the sums they are built from, the
//! classical trapezoidal rule, and closed-form predictions of each rule on the
//! kernel eigenfunctions.
//!
//! With `h = T/n` the rules are
//!
//! ```text
//! S0: h sum_{j=1}^{n-1} f(t+jh)        - (pi^2/3) g'(t)/h + g'''(t) h/6
//! S1: h sum_{j=1}^{n}   f(t+jh-h/2)    -  pi^2    g'(t)/h
//! S2: 2h sum_{j=1}^{n}  f(t+jh-h/2)    - (h/2) sum_{j=1}^{2n} f(t+jh/2-h/4)
//! ```
//!
//! where `g(x) = (x-t)^3 f(x)`. For `f = K u` the derivatives reduce to
//! `g^{(i)}(t) = (T/pi)^3 u^{(i)}(t)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::domain::{DerivSource, PeriodicDomain, QuadratureOutcome, Rule, SmoothFactor};
use crate::error::{HfpError, Result};
use crate::kernel::{self, b_closed, eigenfunction_eval, kernel_at_node};
use crate::spectral;
use crate::summation::sum_terms;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// How an integrand is evaluated.
#[derive(Clone, Copy)]
pub enum IntegrandKind<'a> {
    /// `f(x) = K(x) u(x)`.
    KernelTimes(&'a dyn SmoothFactor),
    /// A user-supplied `f` together with `g'(t)` and `g'''(t)`.
    Raw {
        f: &'a (dyn Fn(f64) -> Complex64 + Sync),
        g1: Complex64,
        g3: Complex64,
    },
}

/// A `T`-periodic integrand with a third-order pole at `t`.
#[derive(Clone, Copy)]
pub struct Integrand<'a> {
    pub dom: PeriodicDomain,
    pub kind: IntegrandKind<'a>,
}

impl<'a> Integrand<'a> {
    pub fn kernel_times(dom: PeriodicDomain, u: &'a dyn SmoothFactor) -> Self {
        Self {
            dom,
            kind: IntegrandKind::KernelTimes(u),
        }
    }

    pub fn raw(
        dom: PeriodicDomain,
        f: &'a (dyn Fn(f64) -> Complex64 + Sync),
        g1: Complex64,
        g3: Complex64,
    ) -> Self {
        Self {
            dom,
            kind: IntegrandKind::Raw { f, g1, g3 },
        }
    }

    /// `f(x)` at an arbitrary point away from the pole images.
    pub fn eval(&self, x: f64) -> Result<Complex64> {
        match self.kind {
            IntegrandKind::KernelTimes(u) => {
                let k = kernel::kernel_eval(x, &self.dom)?;
                Ok(u.eval(self.dom.reduce(x)) * k)
            }
            IntegrandKind::Raw { f, .. } => {
                let distance = self.dom.distance_to_singularity(x);
                let min_distance = kernel::MIN_POLE_DISTANCE * self.dom.period();
                if distance < min_distance {
                    return Err(HfpError::SingularityTooClose {
                        x,
                        distance,
                        min_distance,
                    });
                }
                Ok(f(self.dom.reduce(x)))
            }
        }
    }

    /// `f(t + k T / d) + f(t - k T / d)` for `0 < k < d/2`. For `K u` this is
    /// `K_k (u(t + kT/d) - u(t - kT/d))`, since the kernel phase is built from
    /// the integers `k`, `d` and is exactly antisymmetric.
    fn mirrored_pair(&self, k: i64, d: i64) -> Result<Complex64> {
        let period = self.dom.period();
        let offset = k as f64 * period / d as f64;
        let (plus, minus) = (self.dom.t() + offset, self.dom.t() - offset);
        match self.kind {
            IntegrandKind::KernelTimes(u) => {
                let du = u.eval(self.dom.reduce(plus)) - u.eval(self.dom.reduce(minus));
                Ok(du * kernel_at_node(k, d))
            }
            IntegrandKind::Raw { .. } => Ok(self.eval(plus)? + self.eval(minus)?),
        }
    }

    /// `f(t + T/2)`; the kernel vanishes there.
    fn half_period_node(&self) -> Result<Complex64> {
        match self.kind {
            IntegrandKind::KernelTimes(_) => Ok(Complex64::new(0.0, 0.0)),
            IntegrandKind::Raw { .. } => self.eval(self.dom.t() + 0.5 * self.dom.period()),
        }
    }

    /// Sum of `f(t + k T / d)` over `k = first, first + step, ...` in `(0, d)`,
    /// accumulated in mirrored pairs.
    fn node_sum(&self, d: i64, first: i64, step: i64) -> Result<Complex64> {
        let last = (d - 1) / 2;
        let pairs = if first > last {
            0
        } else {
            ((last - first) / step + 1) as usize
        };
        let mut total = sum_terms(pairs, |i| {
            self.mirrored_pair(first + (i as i64 - 1) * step, d)
        })?;
        if d % 2 == 0 && (d / 2 - first) % step == 0 {
            total += self.half_period_node()?;
        }
        Ok(total)
    }
}

/// `g'(t)` and `g'''(t)` for the corrected rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeBundle {
    pub g1: Complex64,
    pub g3: Complex64,
    pub source: DerivSource,
}

/// How [`resolve_derivatives`] obtains `u'(t)` and `u'''(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivStrategy {
    Exact,
    /// Spectral differentiation from `N` equispaced samples (`N` even, `>= 8`).
    Spectral(usize),
}

/// Midpoint sum step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refine {
    /// `h sum_{j=1}^{n} f(t + jh - h/2)`
    H,
    /// `(h/2) sum_{j=1}^{2n} f(t + jh/2 - h/4)`
    HOver2,
}

fn check_rule_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(HfpError::InvalidArgument(format!(
            "rules need n >= 2, got {n}"
        )));
    }
    Ok(())
}

/// `h sum_{j=1}^{n-1} f(t + jh)`.
pub fn ttilde(f: &Integrand, n: usize) -> Result<Complex64> {
    check_rule_n(n)?;
    let h = f.dom.period() / n as f64;
    Ok(f.node_sum(n as i64, 1, 1)? * h)
}

pub fn midpoint_sum(f: &Integrand, n: usize, refine: Refine) -> Result<Complex64> {
    if n < 1 {
        return Err(HfpError::InvalidArgument(
            "midpoint sums need n >= 1".into(),
        ));
    }
    let h = f.dom.period() / n as f64;
    // node j sits at offset (2j - 1) T / d
    let (d, weight) = match refine {
        Refine::H => (2 * n as i64, h),
        Refine::HOver2 => (4 * n as i64, 0.5 * h),
    };
    Ok(f.node_sum(d, 1, 2)? * weight)
}

pub fn rule_s0(f: &Integrand, d: &DerivativeBundle, n: usize) -> Result<QuadratureOutcome> {
    let h = f.dom.period() / n as f64;
    let value = ttilde(f, n)? - d.g1 * (PI * PI / 3.0 / h) + d.g3 * (h / 6.0);
    Ok(QuadratureOutcome {
        rule: Rule::S0,
        n,
        value,
        deriv_source: d.source,
    })
}

/// Uses only `g'(t)`.
pub fn rule_s1(f: &Integrand, d: &DerivativeBundle, n: usize) -> Result<QuadratureOutcome> {
    check_rule_n(n)?;
    let h = f.dom.period() / n as f64;
    let value = midpoint_sum(f, n, Refine::H)? - d.g1 * (PI * PI / h);
    Ok(QuadratureOutcome {
        rule: Rule::S1,
        n,
        value,
        deriv_source: d.source,
    })
}

/// The derivative-free rule.
pub fn rule_s2(f: &Integrand, n: usize) -> Result<QuadratureOutcome> {
    check_rule_n(n)?;
    let value = midpoint_sum(f, n, Refine::H)? * 2.0 - midpoint_sum(f, n, Refine::HOver2)?;
    Ok(QuadratureOutcome {
        rule: Rule::S2,
        n,
        value,
        deriv_source: DerivSource::None,
    })
}

/// Applies `rule`, resolving derivatives with `strategy` only when the rule
/// needs them.
pub fn apply_rule(
    rule: Rule,
    f: &Integrand,
    strategy: DerivStrategy,
    n: usize,
) -> Result<QuadratureOutcome> {
    match rule {
        Rule::S0 => rule_s0(f, &resolve_derivatives(f, strategy)?, n),
        Rule::S1 => rule_s1(f, &resolve_derivatives(f, strategy)?, n),
        Rule::S2 => rule_s2(f, n),
        Rule::Trap => Err(HfpError::InvalidArgument(
            "the trapezoidal rule does not apply to supersingular integrands".into(),
        )),
    }
}

/// Endpoint-weighted trapezoidal rule for a regular integrand on `[a, b]`.
pub fn trapezoid<F>(f_regular: F, dom: &PeriodicDomain, n: usize) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if n < 1 {
        return Err(HfpError::InvalidArgument("trapezoid needs n >= 1".into()));
    }
    let (a, b) = (dom.a(), dom.b());
    let h = (b - a) / n as f64;
    let interior =
        sum_terms::<HfpError, _>(n.saturating_sub(1), |j| Ok(f_regular(a + j as f64 * h)))?;
    Ok((interior + (f_regular(a) + f_regular(b)) * 0.5) * h)
}

/// `g'(t) = (T/pi)^3 u'(t)` and `g'''(t) = (T/pi)^3 u'''(t)`.
pub fn resolve_derivatives(f: &Integrand, strategy: DerivStrategy) -> Result<DerivativeBundle> {
    let u = match f.kind {
        IntegrandKind::Raw { g1, g3, .. } => {
            return Ok(DerivativeBundle {
                g1,
                g3,
                source: DerivSource::Exact,
            })
        }
        IntegrandKind::KernelTimes(u) => u,
    };
    let scale = (f.dom.period() / PI).powi(3);
    let t = f.dom.t();
    match strategy {
        DerivStrategy::Exact => {
            let d = u.derivatives_at(t).ok_or(HfpError::MissingDerivatives(
                "no exact derivatives for this factor",
            ))?;
            Ok(DerivativeBundle {
                g1: d[1] * scale,
                g3: d[3] * scale,
                source: DerivSource::Exact,
            })
        }
        DerivStrategy::Spectral(samples) => {
            let poly = spectral::fourier_coefficients(u, &f.dom, samples)?;
            let tail = poly.trailing_magnitude(samples / 2 - 1);
            let limit = 1e-8 * poly.max_magnitude();
            if tail > limit {
                return Err(HfpError::SpectralResolutionTooLow { tail, limit });
            }
            Ok(DerivativeBundle {
                g1: spectral::differentiate_at(&poly, t, 1)? * scale,
                g3: spectral::differentiate_at(&poly, t, 3)? * scale,
                source: DerivSource::Spectral,
            })
        }
    }
}

/// Closed-form value of rule `s` applied to `f_m = K e_m`.
pub fn predict_on_eigenfunction(
    s: Rule,
    m: i64,
    n: usize,
    dom: &PeriodicDomain,
) -> Result<Complex64> {
    check_rule_n(n)?;
    let mf = m as f64;
    let nf = n as f64;
    let bracket = match s {
        Rule::S0 => b_closed(m, n)? - (2.0 / 3.0) * mf * nf * nf - (4.0 / 3.0) * mf * mf * mf,
        Rule::S1 => (b_closed(m, 2 * n)? - b_closed(m, n)?) - 2.0 * mf * nf * nf,
        Rule::S2 => {
            2.0 * (b_closed(m, 2 * n)? - b_closed(m, n)?)
                - 0.5 * (b_closed(m, 4 * n)? - b_closed(m, 2 * n)?)
        }
        Rule::Trap => {
            return Err(HfpError::InvalidArgument(
                "no eigenfunction prediction for the trapezoidal rule".into(),
            ))
        }
    };
    Ok(I * (dom.period() / nf) * bracket * eigenfunction_eval(m, dom.t(), dom))
}
