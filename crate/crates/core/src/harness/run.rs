use num_complex::Complex64;
use rayon::prelude::*;

use super::config::{DerivChoice, FunctionSpec, Mode, RunConfig};
use super::fit::{fit_window, least_squares_slope, FitStatus, SlopeFit};
use super::output::{format_num, pass_cell, RunOutput};
use super::samples::load_samples;
use super::HarnessError;
use crate::bounds::{rule_bound, sample_m, DEFAULT_LINE_SAMPLES};
use crate::domain::{PeriodicDomain, Rule, SmoothFactor};
use crate::functions::{Eigenmode, Runge};
use crate::kernel::{
    b_closed, b_direct, b_recursion_residual, c_closed, c_sum, d_closed, d_sum, hfp_eigen_oracle,
    l_closed, l_sum,
};
use crate::rules::{apply_rule, midpoint_sum, ttilde, DerivStrategy, Integrand, Refine};
use crate::spectral::{random_trig_poly, spectral_hfp_reference};

const EXACTNESS_TOL: f64 = 1e-9;
const BOUND_SLACK: f64 = 1.1;
const SLOPE_TOL: f64 = 0.1;
const DEFAULT_TAU_FRACS: [f64; 4] = [0.2, 0.4, 0.6, 0.8];
/// Coefficients of the Runge factor are kept while `r^m (m+1)^2` exceeds this.
const RUNGE_SERIES_TOL: f64 = 1e-22;

/// Thread pool sized by `HFPQUAD_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool, HarnessError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("HFPQUAD_THREADS") {
        let threads: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| HarnessError::Config(format!("bad HFPQUAD_THREADS {v:?}")))?;
        builder = builder.num_threads(threads);
    }
    builder
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))
}

/// Runs the mode selected in `cfg`.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, HarnessError> {
    thread_pool()?.install(|| match cfg.mode {
        Mode::Exactness => run_exactness(cfg),
        Mode::Converge => run_converge(cfg),
        Mode::Bounds => run_bounds(cfg),
        Mode::Identities => run_identities(cfg),
    })
}

fn check_mode(cfg: &RunConfig, mode: Mode) -> Result<(), HarnessError> {
    if cfg.mode != mode {
        return Err(HarnessError::Config(format!(
            "configuration is for {}, not {mode}",
            cfg.mode
        )));
    }
    Ok(())
}

/// The smooth factor of a run with its reference integral.
struct Prepared {
    factor: Box<dyn SmoothFactor>,
    reference: Complex64,
    /// Strip half-width; infinite for trigonometric polynomials.
    sigma: f64,
    /// Degree when the factor is a trigonometric polynomial.
    degree: Option<usize>,
}

fn prepare(cfg: &RunConfig) -> Result<Prepared, HarnessError> {
    let dom = &cfg.domain;
    let period = dom.period();
    Ok(match &cfg.function {
        FunctionSpec::Eigen { m } => {
            let m = m.unwrap_or(1);
            Prepared {
                factor: Box::new(Eigenmode::new(m, period)),
                reference: hfp_eigen_oracle(m, dom),
                sigma: f64::INFINITY,
                degree: Some(m.unsigned_abs() as usize),
            }
        }
        FunctionSpec::TrigPoly {
            seed,
            degree,
            realify,
        } => {
            let p = random_trig_poly(*degree, *seed, *realify, period);
            let samples = cfg.n_spectral.max(2 * degree + 4);
            let reference = spectral_hfp_reference(&p, dom, samples)?.value;
            Prepared {
                factor: Box::new(p),
                reference,
                sigma: f64::INFINITY,
                degree: Some(*degree),
            }
        }
        FunctionSpec::Runge { rho } => {
            let r = Runge::new(*rho, period)?;
            Prepared {
                factor: Box::new(r),
                reference: r.trig_poly(RUNGE_SERIES_TOL).hfp_eigen_sum(dom),
                sigma: r.sigma(),
                degree: None,
            }
        }
        FunctionSpec::Samples { path } => {
            let p = load_samples(path, dom)?;
            Prepared {
                reference: p.hfp_eigen_sum(dom),
                degree: Some(p.degree()),
                factor: Box::new(p),
                sigma: f64::INFINITY,
            }
        }
    })
}

fn strategy(cfg: &RunConfig) -> DerivStrategy {
    match cfg.deriv {
        DerivChoice::Exact => DerivStrategy::Exact,
        DerivChoice::Spectral => DerivStrategy::Spectral(cfg.n_spectral),
    }
}

fn rule_value(
    rule: Rule,
    u: &dyn SmoothFactor,
    dom: &PeriodicDomain,
    strategy: DerivStrategy,
    n: usize,
) -> Result<Complex64, HarnessError> {
    let f = Integrand::kernel_times(*dom, u);
    Ok(apply_rule(rule, &f, strategy, n)?.value)
}

/// Relative deviation `|a - b| / max(|a|, |b|)`, zero when both vanish.
fn rel_dev(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// `|approx - exact| / |exact|`, or the absolute error when `exact` is zero.
fn rel_err(approx: Complex64, exact: Complex64) -> f64 {
    let abs = (approx - exact).norm();
    if exact.norm() == 0.0 {
        abs
    } else {
        abs / exact.norm()
    }
}

/// One row per rule, `n` and mode `|m| <= n - 1` for an eigenfunction sweep,
/// or one row per rule and `n` (with `m` set to the degree) for a fixed
/// trigonometric polynomial.
pub fn run_exactness(cfg: &RunConfig) -> Result<RunOutput, HarnessError> {
    check_mode(cfg, Mode::Exactness)?;
    let dom = cfg.domain;
    let strat = strategy(cfg);
    let n_min = cfg.n_list[0];

    let sweep = matches!(cfg.function, FunctionSpec::Eigen { m: None });
    let fixed = if sweep {
        None
    } else {
        let p = prepare(cfg)?;
        match p.degree {
            None => {
                return Err(HarnessError::Config(
                    "exactness runs need an eigenfunction or a trigonometric polynomial".into(),
                ))
            }
            Some(deg) if deg + 1 > n_min => {
                return Err(HarnessError::Config(format!(
                    "degree {deg} exceeds min(n) - 1 = {}",
                    n_min - 1
                )))
            }
            Some(deg) => Some((p, deg as i64)),
        }
    };

    let mut points = Vec::new();
    for &rule in &cfg.rules {
        for &n in &cfg.n_list {
            match &fixed {
                None => {
                    let top = n as i64 - 1;
                    points.extend((-top..=top).map(|m| (rule, n, m)));
                }
                Some((_, deg)) => points.push((rule, n, *deg)),
            }
        }
    }

    let rows: Vec<(Vec<String>, bool)> = points
        .par_iter()
        .map(|&(rule, n, m)| {
            let (approx, exact) = match &fixed {
                None => {
                    let u = Eigenmode::new(m, dom.period());
                    (
                        rule_value(rule, &u, &dom, strat, n)?,
                        hfp_eigen_oracle(m, &dom),
                    )
                }
                Some((p, _)) => (rule_value(rule, &*p.factor, &dom, strat, n)?, p.reference),
            };
            let abs_err = (approx - exact).norm();
            let rel = rel_err(approx, exact);
            let row = vec![
                rule.to_string(),
                n.to_string(),
                m.to_string(),
                format_num(approx.re),
                format_num(approx.im),
                format_num(exact.re),
                format_num(exact.im),
                format_num(abs_err),
                format_num(rel),
            ];
            Ok((row, rel <= EXACTNESS_TOL))
        })
        .collect::<Result<_, HarnessError>>()?;

    let passed = rows.iter().all(|r| r.1);
    Ok(RunOutput {
        header: &[
            "rule",
            "n",
            "m",
            "approx_re",
            "approx_im",
            "exact_re",
            "exact_im",
            "abs_err",
            "rel_err",
        ],
        rows: rows.into_iter().map(|r| r.0).collect(),
        passed,
        fits: Vec::new(),
    })
}

/// Error against the reference for each rule and `n`, with a slope fit of
/// `ln|error|` against `n` for factors of finite strip width.
pub fn run_converge(cfg: &RunConfig) -> Result<RunOutput, HarnessError> {
    check_mode(cfg, Mode::Converge)?;
    if matches!(cfg.function, FunctionSpec::Samples { .. }) {
        return Err(HarnessError::Config(
            "convergence runs need RUNGE, TRIGPOLY or EIGEN".into(),
        ));
    }
    let p = prepare(cfg)?;
    let dom = cfg.domain;
    let strat = strategy(cfg);

    let points: Vec<(Rule, usize)> = cfg
        .rules
        .iter()
        .flat_map(|&r| cfg.n_list.iter().map(move |&n| (r, n)))
        .collect();
    let errors: Vec<f64> = points
        .par_iter()
        .map(|&(rule, n)| Ok((rule_value(rule, &*p.factor, &dom, strat, n)? - p.reference).norm()))
        .collect::<Result<_, HarnessError>>()?;

    let mut fits = Vec::new();
    let mut passed = true;
    for &rule in &cfg.rules {
        let rows: Vec<(usize, f64)> = points
            .iter()
            .zip(&errors)
            .filter(|(pt, _)| pt.0 == rule)
            .map(|(pt, &e)| (pt.1, e))
            .collect();
        let fit = if p.sigma.is_finite() {
            let window = fit_window(&rows);
            if window.len() < 3 {
                return Err(HarnessError::InsufficientPoints {
                    rule,
                    points: window.len(),
                });
            }
            let slope = least_squares_slope(&window).expect("at least three points");
            let predicted = -2.0 * std::f64::consts::PI * p.sigma / dom.period();
            let ok = (slope - predicted).abs() <= SLOPE_TOL * predicted.abs();
            SlopeFit {
                rule,
                slope: Some(slope),
                predicted: Some(predicted),
                points: window.len(),
                status: if ok { FitStatus::Pass } else { FitStatus::Fail },
            }
        } else {
            let tol = EXACTNESS_TOL * (1.0 + p.reference.norm());
            let ok = rows.iter().all(|r| r.1 <= tol);
            SlopeFit {
                rule,
                slope: None,
                predicted: None,
                points: 0,
                status: if ok {
                    FitStatus::NotApplicable
                } else {
                    FitStatus::Fail
                },
            }
        };
        passed &= fit.status != FitStatus::Fail;
        fits.push(fit);
    }

    let rows = points
        .iter()
        .zip(&errors)
        .map(|(&(rule, n), &e)| vec![rule.to_string(), n.to_string(), format_num(e)])
        .collect();
    Ok(RunOutput {
        header: &["rule", "n", "abs_err"],
        rows,
        passed,
        fits,
    })
}

/// Working lines of a bounds run, checked against `1e-3 T < tau < sigma`.
fn bound_taus(cfg: &RunConfig, sigma: f64) -> Result<Vec<f64>, HarnessError> {
    let taus: Vec<f64> = if !cfg.tau_list.is_empty() {
        cfg.tau_list.clone()
    } else {
        let fracs: &[f64] = if cfg.tau_frac.is_empty() {
            &DEFAULT_TAU_FRACS
        } else {
            &cfg.tau_frac
        };
        if !sigma.is_finite() {
            return Err(HarnessError::Config(
                "an entire factor has no strip width; give absolute tau values".into(),
            ));
        }
        fracs.iter().map(|f| f * sigma).collect()
    };
    let lower = 1e-3 * cfg.domain.period();
    for &tau in &taus {
        if !(tau > lower && tau < sigma) {
            return Err(HarnessError::TauOutOfRange {
                tau,
                lower,
                upper: sigma,
            });
        }
    }
    Ok(taus)
}

/// Measured error against the rule bound on each working line.
pub fn run_bounds(cfg: &RunConfig) -> Result<RunOutput, HarnessError> {
    check_mode(cfg, Mode::Bounds)?;
    let p = prepare(cfg)?;
    let dom = cfg.domain;
    let strat = strategy(cfg);
    let taus = bound_taus(cfg, p.sigma)?;

    let m_hats: Vec<f64> = taus
        .par_iter()
        .map(|&tau| Ok(sample_m(&*p.factor, &dom, tau, DEFAULT_LINE_SAMPLES)?))
        .collect::<Result<_, HarnessError>>()?;

    let points: Vec<(Rule, usize)> = cfg
        .rules
        .iter()
        .flat_map(|&r| cfg.n_list.iter().map(move |&n| (r, n)))
        .collect();
    let errors: Vec<f64> = points
        .par_iter()
        .map(|&(rule, n)| Ok((rule_value(rule, &*p.factor, &dom, strat, n)? - p.reference).norm()))
        .collect::<Result<_, HarnessError>>()?;

    let mut rows = Vec::new();
    let mut passed = true;
    for (&(rule, n), &err) in points.iter().zip(&errors) {
        for (&tau, &m_hat) in taus.iter().zip(&m_hats) {
            let bound = rule_bound(rule, n, tau, m_hat, dom.period())?;
            let ratio = if bound > 0.0 {
                err / bound
            } else if err == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            let ok = ratio <= BOUND_SLACK;
            passed &= ok;
            rows.push(vec![
                rule.to_string(),
                n.to_string(),
                format_num(tau),
                format_num(m_hat),
                format_num(bound),
                format_num(err),
                format_num(ratio),
                pass_cell(ok),
            ]);
        }
    }
    Ok(RunOutput {
        header: &[
            "rule", "n", "tau", "m_hat", "bound", "abs_err", "ratio", "pass",
        ],
        rows,
        passed,
        fits: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Identity {
    BClosed,
    CClosed,
    DClosed,
    LClosed,
    BRecursion,
    MidpointSplit,
    S1Composition,
    S2Composition,
}

impl Identity {
    const ALL: [Identity; 8] = [
        Identity::BClosed,
        Identity::CClosed,
        Identity::DClosed,
        Identity::LClosed,
        Identity::BRecursion,
        Identity::MidpointSplit,
        Identity::S1Composition,
        Identity::S2Composition,
    ];

    fn name(self) -> &'static str {
        match self {
            Identity::BClosed => "B_closed_vs_direct",
            Identity::CClosed => "C_closed_vs_direct",
            Identity::DClosed => "D_closed_vs_direct",
            Identity::LClosed => "L_closed_vs_direct",
            Identity::BRecursion => "B_recursion",
            Identity::MidpointSplit => "midpoint_decomposition",
            Identity::S1Composition => "S1_composition",
            Identity::S2Composition => "S2_composition",
        }
    }
}

/// `(param2, deviation, tolerance)` for one identity at `n`.
fn check_identity(
    id: Identity,
    n: usize,
    u: &dyn SmoothFactor,
    dom: &PeriodicDomain,
    strat: DerivStrategy,
) -> Result<(i64, f64, f64), HarnessError> {
    let ni = n as i64;
    let nf = n as f64;
    let max_over = |ms: std::ops::RangeInclusive<i64>,
                    f: &dyn Fn(i64) -> Result<f64, HarnessError>|
     -> Result<f64, HarnessError> {
        ms.map(f).try_fold(0.0f64, |acc, d| Ok(acc.max(d?)))
    };
    Ok(match id {
        Identity::BClosed => {
            let dev = max_over(-3 * ni..=3 * ni, &|m| {
                Ok((b_closed(m, n)? - b_direct(m, n)?).abs())
            })?;
            (3 * ni, dev, 1e-10 * nf.powi(3) + 1e-12)
        }
        Identity::CClosed => {
            let dev = max_over(1..=ni - 1, &|m| Ok((c_sum(m, n)? - c_closed(m, n)?).abs()))?;
            (ni - 1, dev, 1e-10 * nf * nf)
        }
        Identity::DClosed => {
            let dev = max_over(1..=ni - 1, &|k| Ok((d_sum(k, n)? - d_closed(k, n)?).abs()))?;
            (ni - 1, dev, 1e-10 * nf * nf)
        }
        Identity::LClosed => (0, (l_sum(n)? - l_closed(n)?).abs(), 1e-10 * nf * nf),
        Identity::BRecursion => {
            let dev = max_over(1..=ni - 1, &|m| Ok(b_recursion_residual(m, n)?.abs()))?;
            (ni - 1, dev, 1e-9 * nf.powi(3))
        }
        Identity::MidpointSplit => {
            let f = Integrand::kernel_times(*dom, u);
            let mid = midpoint_sum(&f, n, Refine::H)?;
            let split = ttilde(&f, 2 * n)? * 2.0 - ttilde(&f, n)?;
            (0, rel_dev(mid, split), 1e-12)
        }
        Identity::S1Composition => {
            let s0 = |k| rule_value(Rule::S0, u, dom, strat, k);
            let lhs = rule_value(Rule::S1, u, dom, strat, n)?;
            (0, rel_dev(lhs, s0(2 * n)? * 2.0 - s0(n)?), 1e-11)
        }
        Identity::S2Composition => {
            let s0 = |k| rule_value(Rule::S0, u, dom, strat, k);
            let lhs = rule_value(Rule::S2, u, dom, strat, n)?;
            let rhs = s0(4 * n)? * -2.0 + s0(2 * n)? * 5.0 - s0(n)? * 2.0;
            (0, rel_dev(lhs, rhs), 1e-11)
        }
    })
}

/// Closed-form sums against direct summation, and the midpoint and rule
/// composition identities on the configured factor, for each `n`.
pub fn run_identities(cfg: &RunConfig) -> Result<RunOutput, HarnessError> {
    check_mode(cfg, Mode::Identities)?;
    let p = prepare(cfg)?;
    let dom = cfg.domain;
    let strat = strategy(cfg);
    let points: Vec<(Identity, usize)> = Identity::ALL
        .iter()
        .flat_map(|&id| cfg.n_list.iter().map(move |&n| (id, n)))
        .collect();
    let rows: Vec<(Vec<String>, bool)> = points
        .par_iter()
        .map(|&(id, n)| {
            let (param2, dev, tol) = check_identity(id, n, &*p.factor, &dom, strat)?;
            let ok = dev <= tol;
            Ok((
                vec![
                    id.name().to_string(),
                    n.to_string(),
                    param2.to_string(),
                    format_num(dev),
                    pass_cell(ok),
                ],
                ok,
            ))
        })
        .collect::<Result<_, HarnessError>>()?;
    let passed = rows.iter().all(|r| r.1);
    Ok(RunOutput {
        header: &["identity", "param1", "param2", "deviation", "pass"],
        rows: rows.into_iter().map(|r| r.0).collect(),
        passed,
        fits: Vec::new(),
    })
}
