//! Shared domain, integrand-factor and result types.
//!
//! Everything here is immutable after construction, so values can be shared
//! freely between the worker threads of the batch harness.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HfpError, Result};

/// Interval `[a, b]` of length one period `T = b - a`, with the singular point
/// `t` strictly inside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicDomain {
    a: f64,
    b: f64,
    t: f64,
    period: f64,
}

impl PeriodicDomain {
    pub fn new(a: f64, b: f64, t: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && t.is_finite()) {
            return Err(HfpError::InvalidDomain(format!(
                "non-finite endpoint or singular point (a={a}, b={b}, t={t})"
            )));
        }
        if b <= a {
            return Err(HfpError::InvalidDomain(format!(
                "need b > a, got a={a}, b={b}"
            )));
        }
        if !(a < t && t < b) {
            return Err(HfpError::InvalidDomain(format!(
                "singular point t={t} must lie strictly inside ({a}, {b})"
            )));
        }
        Ok(Self {
            a,
            b,
            t,
            period: b - a,
        })
    }

    /// Domain `[a, a + period]` with singular point `t`.
    pub fn with_period(a: f64, period: f64, t: f64) -> Result<Self> {
        Self::new(a, a + period, t)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// The singular point.
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Returns the representative of `x` modulo the period in `[a, b)`.
    pub fn reduce(&self, x: f64) -> f64 {
        reduce_to_period(x, self)
    }

    pub fn distance_to_singularity(&self, x: f64) -> f64 {
        distance_to_singularity(x, self)
    }
}

/// Maps `x` to the congruent point of `[a, b)`.
///
/// Points already in `[a, b)` are returned unchanged, which makes the map
/// idempotent bit-for-bit.
pub fn reduce_to_period(x: f64, dom: &PeriodicDomain) -> f64 {
    let (a, b, period) = (dom.a, dom.b, dom.period);
    if x >= a && x < b {
        return x;
    }
    let k = ((x - a) / period).floor();
    let mut r = x - k * period;
    // one-ulp fixups when the quotient rounded across an integer
    if r < a {
        r += period;
    }
    if r >= b || r < a {
        r = a;
    }
    r
}

/// Distance from `x` to the nearest point of the pole set `{t + kT}`.
pub fn distance_to_singularity(x: f64, dom: &PeriodicDomain) -> f64 {
    let period = dom.period;
    let delta = x - dom.t;
    let r = (delta - (delta / period).round() * period).abs();
    if r > 0.5 * period {
        (period - r).max(0.0)
    } else {
        r
    }
}

/// The smooth, `T`-periodic factor `u` of an integrand `K(x) u(x)`.
///
/// Only real-axis evaluation is mandatory. Complex evaluation is needed by the
/// error-bound machinery, and exact derivatives by the corrected rules when no
/// spectral fallback is wanted.
pub trait SmoothFactor: Send + Sync {
    fn eval(&self, x: f64) -> Complex64;

    fn eval_complex(&self, _z: Complex64) -> Option<Complex64> {
        None
    }

    /// `[u(x), u'(x), u''(x), u'''(x)]`, when known in closed form.
    fn derivatives_at(&self, _x: f64) -> Option<[Complex64; 4]> {
        None
    }
}

impl<S: SmoothFactor + ?Sized> SmoothFactor for &S {
    fn eval(&self, x: f64) -> Complex64 {
        (**self).eval(x)
    }

    fn eval_complex(&self, z: Complex64) -> Option<Complex64> {
        (**self).eval_complex(z)
    }

    fn derivatives_at(&self, x: f64) -> Option<[Complex64; 4]> {
        (**self).derivatives_at(x)
    }
}

impl<S: SmoothFactor + ?Sized> SmoothFactor for Box<S> {
    fn eval(&self, x: f64) -> Complex64 {
        (**self).eval(x)
    }

    fn eval_complex(&self, z: Complex64) -> Option<Complex64> {
        (**self).eval_complex(z)
    }

    fn derivatives_at(&self, x: f64) -> Option<[Complex64; 4]> {
        (**self).derivatives_at(x)
    }
}

/// Quadrature rule identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    S0,
    S1,
    S2,
    #[serde(rename = "TRAP")]
    Trap,
}

impl Rule {
    pub const SUPERSINGULAR: [Rule; 3] = [Rule::S0, Rule::S1, Rule::S2];
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::S0 => "S0",
            Rule::S1 => "S1",
            Rule::S2 => "S2",
            Rule::Trap => "TRAP",
        };
        f.write_str(s)
    }
}

impl FromStr for Rule {
    type Err = HfpError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "S0" => Ok(Rule::S0),
            "S1" => Ok(Rule::S1),
            "S2" => Ok(Rule::S2),
            "TRAP" => Ok(Rule::Trap),
            other => Err(HfpError::InvalidArgument(format!("unknown rule '{other}'"))),
        }
    }
}

/// Where the `g'(t)`, `g'''(t)` values fed to a rule came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DerivSource {
    Exact,
    Spectral,
    None,
}

impl fmt::Display for DerivSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DerivSource::Exact => "EXACT",
            DerivSource::Spectral => "SPECTRAL",
            DerivSource::None => "NONE",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOutcome {
    pub rule: Rule,
    pub n: usize,
    pub value: Complex64,
    pub deriv_source: DerivSource,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit() -> PeriodicDomain {
        PeriodicDomain::new(0.0, 1.0, 0.3).unwrap()
    }

    #[test]
    fn rejects_bad_domains() {
        assert!(PeriodicDomain::new(1.0, 1.0, 1.0).is_err());
        assert!(PeriodicDomain::new(0.0, 1.0, 0.0).is_err());
        assert!(PeriodicDomain::new(0.0, 1.0, 1.0).is_err());
        assert!(PeriodicDomain::new(0.0, f64::NAN, 0.5).is_err());
    }

    #[test]
    fn period_matches_endpoints() {
        let d = PeriodicDomain::new(-0.7, 2.1, 0.0).unwrap();
        assert_eq!(d.period(), 2.1 - (-0.7));
    }

    #[test]
    fn reduce_examples() {
        let d = unit();
        assert_eq!(reduce_to_period(0.0, &d), 0.0);
        assert_eq!(reduce_to_period(2.5, &d), 0.5);
        let r = reduce_to_period(-0.25, &d);
        assert_eq!(r, 0.75);
        // r - x must be an integer multiple of T
        let k = (r - (-0.25)) / d.period();
        assert_eq!(k, k.round());
    }

    #[test]
    fn reduce_stays_in_half_open_interval() {
        let d = unit();
        assert_eq!(reduce_to_period(1.0, &d), 0.0);
        let r = reduce_to_period(-1e-18, &d);
        assert!((0.0..1.0).contains(&r));
    }

    #[test]
    fn distance_examples() {
        let d = unit();
        assert_eq!(distance_to_singularity(0.3, &d), 0.0);
        assert!(distance_to_singularity(1.3, &d) < 1e-15);
        // brute force over a few periodic images
        let brute = (-3..=3)
            .map(|k| (0.9 - (0.3 + k as f64)).abs())
            .fold(f64::INFINITY, f64::min);
        assert!((distance_to_singularity(0.9, &d) - brute).abs() < 1e-15);
        assert!((brute - 0.4).abs() < 1e-15);
    }

    #[test]
    fn rule_parsing() {
        assert_eq!("s2".parse::<Rule>().unwrap(), Rule::S2);
        assert_eq!(Rule::Trap.to_string(), "TRAP");
        assert!("S3".parse::<Rule>().is_err());
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent(x in -1e4f64..1e4, a in -5.0f64..5.0, len in 0.1f64..7.0) {
            let d = PeriodicDomain::new(a, a + len, a + 0.5 * len).unwrap();
            let r = reduce_to_period(x, &d);
            prop_assert!(r >= d.a() && r < d.b());
            prop_assert_eq!(reduce_to_period(r, &d), r);
        }

        #[test]
        fn distance_is_periodic(x in -10.0f64..10.0, k in -10i32..=10, t in 0.01f64..0.99) {
            let d = PeriodicDomain::new(0.0, 1.0, t).unwrap();
            let base = distance_to_singularity(x, &d);
            let shifted = distance_to_singularity(x + k as f64 * d.period(), &d);
            prop_assert!((base - shifted).abs() <= 1e-12);
            prop_assert!((0.0..=0.5).contains(&base));
        }
    }
}
