//! Numeric oracles: tanh-sinh quadrature, classical polylogarithms on the
//! real line and the AGM elliptic integral.
//!
//! These back the cross-checks of symbolic results.  They work with plain
//! MPFR floats and the usual doubling heuristic for the quadrature error,
//! in contrast to the certified ball evaluation of the symbolic side.

use crate::ball::ellip_k_param;
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

/// ζ(s) for small integer s ≥ 2, via the word evaluator's precision-safe
/// route would be circular here; use the alternating series with binomial
/// acceleration (precise and independent).
pub fn zeta_f(prec: u32, s: u32) -> Float {
    // η(s) = Σ (-1)^{n-1}/n^s accelerated; ζ(s) = η(s)/(1-2^{1-s})
    let n = (prec as f64 * 0.7).ceil() as u32 + 12;
    let mut d = Float::with_val(prec + 32, 1);
    let mut ds = vec![Float::with_val(prec + 32, 1)];
    // d_k of the Cohen–Villegas–Zagier acceleration
    let mut t = Float::with_val(prec + 32, 1);
    for k in 1..=n {
        t *= 2 * (n + k - 1) * (n - k + 1);
        t /= (2 * k - 1) * k;
        d += &t;
        ds.push(d.clone());
    }
    let mut acc = Float::with_val(prec + 32, 0);
    let mut sign = 1i32;
    for k in 0..n {
        let term = Float::with_val(prec + 32, &d - &ds[k as usize])
            / Float::with_val(prec + 32, k + 1).pow(s);
        if sign > 0 {
            acc += term;
        } else {
            acc -= term;
        }
        sign = -sign;
    }
    acc /= &d;
    let denom = Float::with_val(prec + 32, 1)
        - Float::with_val(prec + 32, 2).pow(1i32 - s as i32);
    Float::with_val(prec, acc / denom)
}

/// Bernoulli-free `Li_s` on `(-∞, 1]` for integer `s ≥ 1`.
///
/// |x| ≤ 1/2: direct series.  1/2 < x < 1: the log-series around 1.
/// x ≤ -1: inversion to `1/x` plus the even-η polynomial.
pub fn li_classical(prec: u32, s: u32, x: &Float) -> Float {
    let wp = prec + 24;
    assert!(s >= 1);
    let one = Float::with_val(wp, 1);
    if *x == 0 {
        return Float::with_val(prec, 0);
    }
    if s == 1 {
        let v = -(one - Float::with_val(wp, x)).ln();
        return Float::with_val(prec, v);
    }
    if *x == 1 {
        return zeta_f(prec, s);
    }
    if *x == -1 {
        // -η(s)
        let eta = zeta_f(wp, s)
            * (Float::with_val(wp, 1) - Float::with_val(wp, 2).pow(1i32 - s as i32));
        return Float::with_val(prec, -eta);
    }
    let ax = Float::with_val(wp, x.abs_ref());
    if ax <= 0.5 {
        return Float::with_val(prec, li_series(wp, s, x));
    }
    if *x > 0 {
        return Float::with_val(prec, li_log_series(wp, s, x));
    }
    // x < -1/2: use duplication to reach the small-argument region:
    // Li_s(x) = 2^{1-s} Li_s(x²) - Li_s(-x); x² may exceed 1/2 but -x > 0
    // lands in the (0,1) branches, and x² < 1 whenever |x| < 1.
    if ax < 1 {
        let x2 = Float::with_val(wp, x * x);
        let li_x2 = li_classical(wp, s, &x2);
        let li_mx = li_classical(wp, s, &Float::with_val(wp, -x.clone()));
        let v = Float::with_val(wp, 2).pow(1i32 - s as i32) * li_x2 - li_mx;
        return Float::with_val(prec, v);
    }
    // x ≤ -1: inversion
    // Li_s(-y) + (-1)^s Li_s(-1/y) = -2 Σ_{k=0}^{⌊s/2⌋} η(2k) (ln y)^{s-2k}/(s-2k)!
    let y = Float::with_val(wp, -x.clone());
    let ln_y = Float::with_val(wp, y.ln_ref());
    let inv = Float::with_val(wp, -1 / y);
    let li_inv = li_classical(wp, s, &inv);
    let mut rhs = Float::with_val(wp, 0);
    for k in 0..=(s / 2) {
        let eta = if k == 0 {
            Float::with_val(wp, 0.5)
        } else {
            let z = zeta_f(wp, 2 * k);
            z * (Float::with_val(wp, 1)
                - Float::with_val(wp, 2).pow(1i32 - 2 * k as i32))
        };
        let m = s - 2 * k;
        let mut fact = Float::with_val(wp, 1);
        for j in 2..=m {
            fact *= j;
        }
        rhs += eta * Float::with_val(wp, ln_y.clone().pow(m)) / fact;
    }
    let sgn = if s % 2 == 0 { 1 } else { -1 };
    let v = -2 * rhs - li_inv * sgn;
    Float::with_val(prec, v)
}

fn li_series(prec: u32, s: u32, x: &Float) -> Float {
    let mut acc = Float::with_val(prec, 0);
    let mut pw = Float::with_val(prec, 1);
    let n_max = (prec as f64 / 0.9) as u32 + 16;
    for n in 1..=n_max {
        pw *= x;
        acc += Float::with_val(prec, &pw / Float::with_val(prec, n).pow(s));
    }
    acc
}

/// `Li_s(x) = Σ_{k≥0, k≠s-1} ζ(s-k)(ln x)^k/k! + (ln x)^{s-1}/(s-1)!·(H_{s-1} - ln(-ln x))`
/// for `exp(-2π) < x < 1`.
fn li_log_series(prec: u32, s: u32, x: &Float) -> Float {
    let mu = Float::with_val(prec, x.ln_ref()); // negative
    let mut acc = Float::with_val(prec, 0);
    let n_max = prec / 2 + 32;
    let mut mu_pow = Float::with_val(prec, 1);
    let mut fact = Float::with_val(prec, 1);
    for k in 0..n_max {
        if k > 0 {
            mu_pow *= &mu;
            fact *= k;
        }
        if k == s - 1 {
            let mut h = Float::with_val(prec, 0);
            for j in 1..s {
                h += Float::with_val(prec, 1) / j;
            }
            let lnmu = Float::with_val(prec, (-mu.clone()).ln());
            acc += Float::with_val(prec, &mu_pow / &fact) * (h - lnmu);
            continue;
        }
        // ζ(s-k): trivial zeros at negative even integers
        let arg = s as i64 - k as i64;
        let z = if arg >= 2 {
            zeta_f(prec, arg as u32)
        } else if arg == 1 {
            unreachable!("handled above")
        } else if arg == 0 {
            Float::with_val(prec, -0.5)
        } else if arg % 2 == 0 {
            continue;
        } else {
            // ζ(-n) = -B_{n+1}/(n+1), n odd
            let n = (-arg) as usize;
            let b = bernoulli((n + 1) as u32, prec);
            -b / Float::with_val(prec, (n + 1) as u32)
        };
        acc += z * Float::with_val(prec, &mu_pow / &fact);
    }
    acc
}

/// Bernoulli number B_n as a float (small n only), via the exact
/// recurrence Σ_{k≤n} C(n+1,k) B_k = 0.
fn bernoulli(n: u32, prec: u32) -> Float {
    let mut b: Vec<rug::Rational> = vec![rug::Rational::from(1)];
    for m in 1..=n {
        let mut acc = rug::Rational::new();
        for (k, bk) in b.iter().enumerate() {
            acc += rug::Rational::from((crate::scalars::binomial(m + 1, k as u32), 1)) * bk;
        }
        b.push(-acc / rug::Rational::from(m + 1));
    }
    Float::with_val(prec, &b[n as usize])
}

/// `K` in the parameter convention of the elliptic-integral pairing.
pub fn ellip_k(prec: u32, m: &Float) -> Float {
    ellip_k_param(prec, m)
}

/// Tanh-sinh quadrature of `f` over `(0,1)`, doubling levels until two
/// consecutive estimates agree to `tol` (or the level cap is hit).
/// Handles endpoint singularities of log type.
pub fn tanh_sinh<F: Fn(&Float) -> Float>(prec: u32, tol: f64, f: F) -> (Float, f64) {
    let wp = prec + 24;
    let pi_half = Float::with_val(wp, Constant::Pi) / 2u32;
    let mut prev = Float::with_val(wp, 0);
    let mut best_err = f64::INFINITY;
    let mut result = Float::with_val(wp, 0);
    for level in 2..=12u32 {
        let h = Float::with_val(wp, 2f64.powi(-(level as i32)));
        let n_max = (2f64.powi(level as i32) * 4.2) as i64;
        let mut sum = Float::with_val(wp, 0);
        for k in -n_max..=n_max {
            let t = Float::with_val(wp, &h * Float::with_val(wp, k));
            let sinh_t = Float::with_val(wp, t.sinh_ref());
            let u = Float::with_val(wp, &pi_half * &sinh_t);
            let cosh_u = Float::with_val(wp, u.cosh_ref());
            // x = 1/2 + tanh(u)/2 ∈ (0,1); weight = (π/4)cosh t / cosh²u
            let tanh_u = Float::with_val(wp, u.tanh_ref());
            let x = Float::with_val(wp, 0.5) + Float::with_val(wp, &tanh_u / Float::with_val(wp, 2));
            if x <= 0 || x >= 1 {
                continue;
            }
            let cosh_t = Float::with_val(wp, t.cosh_ref());
            let w = Float::with_val(wp, &pi_half * &cosh_t)
                / Float::with_val(wp, &cosh_u * &cosh_u)
                / 2u32;
            let fx = f(&x);
            if !fx.is_finite() {
                continue;
            }
            sum += fx * w;
        }
        let estimate = Float::with_val(wp, &sum * &h);
        let err = Float::with_val(32, &estimate - &prev).abs().to_f64();
        if level > 2 {
            best_err = err.abs();
            result = estimate.clone();
            if best_err < tol {
                break;
            }
        }
        prev = estimate;
    }
    (Float::with_val(prec, result), best_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_values() {
        let z2 = zeta_f(128, 2);
        let pi = Float::with_val(160, Constant::Pi);
        let want = pi.clone().square() / 6u32;
        assert!(Float::with_val(64, &z2 - &want).abs().to_f64() < 1e-36);
        let z3 = zeta_f(128, 3);
        assert!((z3.to_f64() - 1.2020569031595942854).abs() < 1e-15);
    }

    #[test]
    fn li_values_and_identities() {
        let p = 128u32;
        // Li₂(1/2) = π²/12 − log²2/2
        let half = Float::with_val(p, 0.5);
        let v = li_classical(p, 2, &half);
        let pi = Float::with_val(p, Constant::Pi);
        let l2 = Float::with_val(p, Constant::Log2);
        let want = pi.clone().square() / 12u32 - l2.clone().square() / 2u32;
        assert!(Float::with_val(64, &v - &want).abs().to_f64() < 1e-30);
        // Li₂(0.9) against the defining series at crude precision
        let x = Float::with_val(p, 0.9);
        let v = li_classical(p, 2, &x);
        let mut s = 0f64;
        for n in 1..2000u32 {
            s += 0.9f64.powi(n as i32) / (n as f64).powi(2);
        }
        assert!((v.to_f64() - s).abs() < 1e-10);
        // Li₂(-1) = -π²/12
        let m1 = Float::with_val(p, -1);
        let v = li_classical(p, 2, &m1);
        assert!((v.to_f64() + pi.clone().square().to_f64() / 12.0).abs() < 1e-25);
        // Li₂(-3) by inversion vs direct numeric integral of -log(1-t)/t
        let m3 = Float::with_val(p, -3);
        let v = li_classical(p, 2, &m3);
        assert!((v.to_f64() + 1.9393754207667089531).abs() < 1e-12);
        // Li₄ at 0.35
        let x = Float::with_val(p, 0.35);
        let v = li_classical(p, 4, &x);
        let mut s = 0f64;
        for n in 1..200u32 {
            s += 0.35f64.powi(n as i32) / (n as f64).powi(4);
        }
        assert!((v.to_f64() - s).abs() < 1e-14);
    }

    #[test]
    fn quadrature_of_log_singular_integrand() {
        // ∫₀¹ log(x)log(1-x) dx = 2 - π²/6
        let (v, err) = tanh_sinh(96, 1e-25, |x| {
            let lx = Float::with_val(120, x.ln_ref());
            let one_minus = Float::with_val(120, 1) - Float::with_val(120, x);
            let l1x = Float::with_val(120, one_minus.ln_ref());
            lx * l1x
        });
        let pi = Float::with_val(120, Constant::Pi);
        let want = Float::with_val(120, 2) - pi.square() / 6u32;
        assert!(err < 1e-20, "err {err}");
        assert!(Float::with_val(64, &v - &want).abs().to_f64() < 1e-24);
    }
}
