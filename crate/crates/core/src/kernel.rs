//! The supersingular kernel `K(x) = cos(pi (x-t)/T) / sin^3(pi (x-t)/T)`, its
//! eigenfunctions `e_m(x) = exp(i 2 m pi x / T)`, and the trigonometric sums
//! that describe how the quadrature rules act on them.
//!
//! Every sum comes in two flavours: a closed form (the production path) and a
//! direct `O(n)` summation that only exists to check the closed form.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::domain::PeriodicDomain;
use crate::error::{HfpError, Result};

/// Relative (to `T`) minimum distance from a pole image at which the kernel
/// may be sampled.
pub const MIN_POLE_DISTANCE: f64 = 1e-13;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn sgn(m: i64) -> f64 {
    match m {
        0 => 0.0,
        m if m > 0 => 1.0,
        _ => -1.0,
    }
}

/// `cos(theta) / sin^3(theta)`.
#[inline]
pub(crate) fn kernel_at_phase(theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    c / (s * s * s)
}

/// `K(t + k T / d)`, with the phase `pi k / d` formed from integers after
/// folding `k` into `(-d/2, d/2]`, so that `K` at mirrored nodes is exactly
/// antisymmetric.
#[inline]
pub(crate) fn kernel_at_node(k: i64, d: i64) -> f64 {
    let k = fold_index(k, d);
    if 2 * k == d {
        return 0.0;
    }
    kernel_at_phase(PI * k as f64 / d as f64)
}

/// Representative of `k mod d` in `(-d/2, d/2]`.
#[inline]
pub(crate) fn fold_index(k: i64, d: i64) -> i64 {
    let r = k.rem_euclid(d);
    if 2 * r > d {
        r - d
    } else {
        r
    }
}

/// Offset `x - t` folded into `[-T/2, T/2]`.
fn signed_offset(x: f64, dom: &PeriodicDomain) -> f64 {
    let period = dom.period();
    let delta = x - dom.t();
    delta - (delta / period).round() * period
}

pub fn kernel_eval(x: f64, dom: &PeriodicDomain) -> Result<f64> {
    let offset = signed_offset(x, dom);
    let min_distance = MIN_POLE_DISTANCE * dom.period();
    if offset.abs() < min_distance {
        return Err(HfpError::SingularityTooClose {
            x,
            distance: offset.abs(),
            min_distance,
        });
    }
    Ok(kernel_at_phase(PI * offset / dom.period()))
}

/// `e_m(x) = exp(i 2 m pi x / T)`.
pub fn eigenfunction_eval(m: i64, x: f64, dom: &PeriodicDomain) -> Complex64 {
    unit_phase(m as f64 * x / dom.period())
}

/// `exp(i 2 pi cycles)`, reducing `cycles` to `[-1/2, 1/2]` first.
#[inline]
pub(crate) fn unit_phase(cycles: f64) -> Complex64 {
    let frac = cycles - cycles.round();
    let (s, c) = (2.0 * PI * frac).sin_cos();
    Complex64::new(c, s)
}

/// `lambda_m = -i sgn(m) 2 T m^2`.
pub fn eigenvalue(m: i64, period: f64) -> Complex64 {
    let mf = m as f64;
    -I * (sgn(m) * 2.0 * period * mf * mf)
}

/// Finite-part integral of `K e_m` over one period: `lambda_m e_m(t)`.
pub fn hfp_eigen_oracle(m: i64, dom: &PeriodicDomain) -> Complex64 {
    eigenvalue(m, dom.period()) * eigenfunction_eval(m, dom.t(), dom)
}

/// `A_m = -i sgn(m) 4 pi m^2`, the finite-part integral of
/// `cos(y/2)/sin^3(y/2) e^{imy}` over `(-pi, pi)`.
pub fn a_coefficient(m: i64) -> Complex64 {
    let mf = m as f64;
    -I * (sgn(m) * 4.0 * PI * mf * mf)
}

fn check_n(n: usize) -> Result<i64> {
    if n < 2 {
        return Err(HfpError::InvalidArgument(format!("need n >= 2, got {n}")));
    }
    Ok(n as i64)
}

/// Closed form of `B_{m,n}`: `sgn(m) (2/3) r (n-r)(n-2r)` with `r = |m| mod n`.
pub fn b_closed(m: i64, n: usize) -> Result<f64> {
    let n = check_n(n)? as i128;
    let r = (m.unsigned_abs() as i128) % n;
    let p = 2 * r * (n - r) * (n - 2 * r);
    Ok(sgn(m) * p as f64 / 3.0)
}

/// `B_{m,n} = sum_{j=1}^{n-1} cot-cube-kernel(j pi / n) sin(2 pi m j / n)` by
/// direct summation.
pub fn b_direct(m: i64, n: usize) -> Result<f64> {
    let nn = check_n(n)?;
    let ma = m.unsigned_abs() as i64;
    let sum: f64 = (1..nn)
        .map(|j| {
            let k = (ma % nn) * j % nn;
            kernel_at_phase(PI * j as f64 / nn as f64) * sin_2pi_frac(k, nn)
        })
        .sum();
    Ok(sgn(m) * sum)
}

/// `sin(2 pi k / d)` for integer `k`, folded to a small argument.
fn sin_2pi_frac(k: i64, d: i64) -> f64 {
    let k = fold_index(k, d);
    (2.0 * PI * k as f64 / d as f64).sin()
}

/// `C_{m,n} = sum_j cot(y_j/2) sin(m y_j)`, `y_j = 2 j pi / n`, by direct
/// summation (any integer `m`).
pub fn c_sum(m: i64, n: usize) -> Result<f64> {
    let nn = check_n(n)?;
    let ma = m.unsigned_abs() as i64;
    let sum: f64 = (1..nn)
        .map(|j| {
            let half = PI * j as f64 / nn as f64;
            let k = (ma % nn) * j % nn;
            sin_2pi_frac(k, nn) / half.tan()
        })
        .sum();
    Ok(sgn(m) * sum)
}

/// `D_{k,n} = sum_j sin(k y_j - y_j/2) / sin(y_j/2)` by direct summation.
pub fn d_sum(k: i64, n: usize) -> Result<f64> {
    let nn = check_n(n)?;
    let two_n = 2 * nn;
    let odd = 2 * k - 1;
    let sum: f64 = (1..nn)
        .map(|j| {
            // sin(pi (2k-1) j / n) = sin(2 pi (2k-1) j / (2n))
            let idx = (odd.rem_euclid(two_n) * j) % two_n;
            sin_2pi_frac(idx, two_n) / (PI * j as f64 / nn as f64).sin()
        })
        .sum();
    Ok(sum)
}

fn check_closed_range(m: i64, n: usize, name: &str) -> Result<()> {
    check_n(n)?;
    if m < 1 || m > n as i64 - 1 {
        return Err(HfpError::DomainError(format!(
            "{name} closed form holds for 1 <= m <= n-1, got m={m}, n={n}"
        )));
    }
    Ok(())
}

/// `C_{m,n} = n - 2m` for `1 <= m <= n-1`.
pub fn c_closed(m: i64, n: usize) -> Result<f64> {
    check_closed_range(m, n, "C")?;
    Ok((n as i64 - 2 * m) as f64)
}

/// `D_{k,n} = n - 2k + 1` for `1 <= k <= n-1`.
pub fn d_closed(k: i64, n: usize) -> Result<f64> {
    check_closed_range(k, n, "D")?;
    Ok((n as i64 - 2 * k + 1) as f64)
}

/// `L_n = sum_{j=1}^{n-1} 1/sin^2(j pi / n)` by direct summation.
pub fn l_sum(n: usize) -> Result<f64> {
    let nn = check_n(n)?;
    Ok((1..nn)
        .map(|j| {
            let s = (PI * j as f64 / nn as f64).sin();
            1.0 / (s * s)
        })
        .sum())
}

/// `L_n = (n^2 - 1) / 3`.
pub fn l_closed(n: usize) -> Result<f64> {
    let nn = check_n(n)? as f64;
    Ok((nn * nn - 1.0) / 3.0)
}

/// `B_{m+1,n} - 2 B_{m,n} + B_{m-1,n} - (8m - 4n)` from the closed form.
pub fn b_recursion_residual(m: i64, n: usize) -> Result<f64> {
    let lhs = b_closed(m + 1, n)? - 2.0 * b_closed(m, n)? + b_closed(m - 1, n)?;
    Ok(lhs - (8 * m - 4 * n as i64) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn c_close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn two_pi_domain(t: f64) -> PeriodicDomain {
        PeriodicDomain::new(-PI, PI, t).unwrap()
    }

    #[test]
    fn kernel_values() {
        let dom = two_pi_domain(0.0);
        assert!(kernel_eval(PI, &dom).unwrap().abs() < 1e-15);
        let expected = (PI / 4.0).cos() / (PI / 4.0).sin().powi(3);
        assert!(close(kernel_eval(PI / 2.0, &dom).unwrap(), expected, 1e-14));
        assert!(close(expected, 2.0, 1e-14));
        assert!(close(kernel_eval(-PI / 2.0, &dom).unwrap(), -2.0, 1e-14));
    }

    #[test]
    fn kernel_refuses_pole_images() {
        let dom = two_pi_domain(0.5);
        for x in [0.5, 0.5 + 2.0 * PI, 0.5 - 4.0 * PI] {
            assert!(matches!(
                kernel_eval(x, &dom),
                Err(HfpError::SingularityTooClose { .. })
            ));
        }
    }

    #[test]
    fn eigenfunction_values() {
        let dom = PeriodicDomain::new(0.0, 1.0, 0.5).unwrap();
        assert!(c_close(
            eigenfunction_eval(0, 0.37, &dom),
            Complex64::new(1.0, 0.0),
            0.0
        ));
        assert!(c_close(eigenfunction_eval(1, 0.25, &dom), I, 1e-15));
        let direct = Complex64::from_polar(1.0, -2.0 * 2.0 * PI / 8.0);
        assert!(c_close(eigenfunction_eval(-2, 0.125, &dom), direct, 1e-15));
        assert!(c_close(direct, -I, 1e-15));
    }

    #[test]
    fn eigenvalue_values() {
        assert_eq!(eigenvalue(0, 1.0), Complex64::new(0.0, 0.0));
        assert!(c_close(eigenvalue(1, 2.0 * PI), -4.0 * PI * I, 1e-13));
        assert!(c_close(eigenvalue(-3, 1.0), 18.0 * I, 1e-13));
    }

    #[test]
    fn eigen_oracle_values() {
        let dom = two_pi_domain(0.0);
        assert_eq!(hfp_eigen_oracle(0, &dom).norm(), 0.0);
        assert!(c_close(hfp_eigen_oracle(1, &dom), -4.0 * PI * I, 1e-13));
        let dom = PeriodicDomain::new(0.0, 1.0, 0.25).unwrap();
        assert!(c_close(hfp_eigen_oracle(2, &dom), 8.0 * I, 1e-13));
    }

    #[test]
    fn a_coefficient_values() {
        assert_eq!(a_coefficient(0).norm(), 0.0);
        assert!(c_close(a_coefficient(1), -4.0 * PI * I, 1e-13));
        assert!(c_close(a_coefficient(-2), 16.0 * PI * I, 1e-12));
    }

    #[test]
    fn a_recursion_and_scaling() {
        for m in 1..20 {
            let lhs = a_coefficient(m + 1) - 2.0 * a_coefficient(m) + a_coefficient(m - 1);
            assert!(c_close(
                lhs,
                -8.0 * PI * I,
                1e-12 * 8.0 * PI * (m * m) as f64
            ));
        }
        // I[f_m] = (T / 2 pi) A_m e_m(t)
        let dom = PeriodicDomain::new(0.0, 1.7, 0.4).unwrap();
        for m in -6..=6 {
            let via_a = a_coefficient(m)
                * (dom.period() / (2.0 * PI))
                * eigenfunction_eval(m, dom.t(), &dom);
            assert!(c_close(
                via_a,
                hfp_eigen_oracle(m, &dom),
                1e-12 * (1.0 + via_a.norm())
            ));
        }
    }

    /// Independent finite-part evaluation of `A_m`: the imaginary part of the
    /// integrand, `cos(y/2) sin(my) / sin^3(y/2)`, is even with leading term
    /// `8m / y^2`, whose finite part over `(-pi, pi)` is `-16m/pi`. The
    /// remainder is regular and integrated with composite Gauss-Legendre.
    fn a_by_subtraction(m: i64) -> Complex64 {
        let mf = m as f64;
        let g = |y: f64| {
            let s = (0.5 * y).sin();
            (0.5 * y).cos() * (mf * y).sin() / (s * s * s) - 8.0 * mf / (y * y)
        };
        let nodes = [-(0.6f64).sqrt(), 0.0, (0.6f64).sqrt()];
        let weights = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
        let panels = 4000;
        let w = PI / panels as f64;
        let mut regular = 0.0;
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * w;
            for (x, wt) in nodes.iter().zip(weights) {
                regular += wt * 0.5 * w * g(mid + 0.5 * w * x);
            }
        }
        I * (2.0 * regular - 16.0 * mf / PI)
    }

    #[test]
    fn a_coefficient_matches_subtraction_quadrature() {
        for m in -5..=5 {
            let oracle = a_by_subtraction(m);
            let a = a_coefficient(m);
            assert!(
                c_close(oracle, a, 1e-7 * (1.0 + a.norm())),
                "m={m}: oracle {oracle} vs closed {a}"
            );
        }
    }

    #[test]
    fn b_examples() {
        assert_eq!(b_closed(0, 8).unwrap(), 0.0);
        assert!(close(b_closed(1, 4).unwrap(), 4.0, 1e-14));
        assert!(close(b_closed(5, 4).unwrap(), 4.0, 1e-14));
        assert!(close(b_direct(5, 4).unwrap(), 4.0, 1e-12));
        assert!(b_direct(0, 16).unwrap().abs() <= 1e-10 * 16f64.powi(3));
        // hand sum 2 + 0 + 2
        assert!(close(b_direct(1, 4).unwrap(), 4.0, 1e-13));
        assert!(close(b_direct(-1, 4).unwrap(), -4.0, 1e-13));
        assert!(b_closed(1, 1).is_err());
    }

    #[test]
    fn b_closed_agrees_with_direct() {
        for n in 2..=64usize {
            let tol = 1e-10 * (n as f64).powi(3) + 1e-12;
            for m in -3 * n as i64..=3 * n as i64 {
                let c = b_closed(m, n).unwrap();
                let d = b_direct(m, n).unwrap();
                assert!(close(c, d, tol), "B({m},{n}): closed {c} direct {d}");
            }
        }
    }

    #[test]
    fn b_direct_symmetries() {
        for n in [2usize, 3, 7, 16, 33] {
            let nn = n as i64;
            for m in 0..=2 * nn {
                assert_eq!(b_direct(-m, n).unwrap(), -b_direct(m, n).unwrap());
                let tol = 1e-10 * (n as f64).powi(3);
                assert!(close(
                    b_direct(m + nn, n).unwrap(),
                    b_direct(m, n).unwrap(),
                    tol
                ));
            }
        }
    }

    #[test]
    fn b_recursion() {
        for n in 2..=64usize {
            for m in 1..=(n as i64 - 1) {
                let r = b_recursion_residual(m, n).unwrap();
                assert!(
                    r.abs() <= 1e-9 * (n as f64).powi(3),
                    "n={n} m={m} residual {r}"
                );
            }
        }
    }

    #[test]
    fn c_and_d_sums() {
        assert!(close(c_sum(1, 4).unwrap(), 2.0, 1e-13));
        assert!(close(c_sum(2, 4).unwrap(), 0.0, 1e-13));
        assert!(close(d_sum(1, 4).unwrap(), 3.0, 1e-13));
        for n in 2..=64usize {
            let tol = 1e-10 * (n * n) as f64;
            for m in 1..n as i64 {
                assert!(close(c_sum(m, n).unwrap(), c_closed(m, n).unwrap(), tol));
                assert!(close(d_sum(m, n).unwrap(), d_closed(m, n).unwrap(), tol));
            }
        }
    }

    #[test]
    fn closed_forms_reject_out_of_range() {
        assert!(matches!(c_closed(0, 4), Err(HfpError::DomainError(_))));
        assert!(matches!(c_closed(4, 4), Err(HfpError::DomainError(_))));
        assert!(matches!(d_closed(-1, 4), Err(HfpError::DomainError(_))));
    }

    #[test]
    fn l_sums() {
        assert!(close(l_sum(2).unwrap(), 1.0, 1e-14));
        assert!(close(l_sum(4).unwrap(), 5.0, 1e-13));
        assert!(close(l_sum(3).unwrap(), 8.0 / 3.0, 1e-14));
        for n in 2..=64usize {
            assert!(close(
                l_sum(n).unwrap(),
                l_closed(n).unwrap(),
                1e-10 * (n * n) as f64
            ));
        }
    }

    #[test]
    fn b1_from_l() {
        // B_{1,n} = 2 (L_n - n + 1)
        for n in 2..=40usize {
            let via_l = 2.0 * (l_closed(n).unwrap() - n as f64 + 1.0);
            assert!(close(b_closed(1, n).unwrap(), via_l, 1e-10));
        }
    }

    proptest! {
        #[test]
        fn kernel_is_odd_about_t(frac in 1e-3f64..0.499, t in 0.05f64..0.95, period in 0.5f64..8.0) {
            let dom = PeriodicDomain::with_period(0.0, period, t * period).unwrap();
            let delta = frac * period;
            let plus = kernel_eval(dom.t() + delta, &dom).unwrap();
            let minus = kernel_eval(dom.t() - delta, &dom).unwrap();
            prop_assert!((plus + minus).abs() <= 1e-12 * plus.abs().max(1.0));
        }
    }
}
