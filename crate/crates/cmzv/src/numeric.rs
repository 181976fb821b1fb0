//! Certified numeric evaluation of iterated integrals
//! `∫ ω(c₁)…ω(c_n)` with `ω(c) = dx/(x-c)`.
//!
//! The unit-interval evaluator splits the path at `x = 1/2` using the
//! path-composition rule, so that both halves become power series with
//! ratio at most `1/2` — geometric convergence even when poles sit at the
//! endpoints (direct series evaluation at a root-of-unity argument would
//! only converge polynomially).  The reversed half is folded back to a
//! `0`-anchored series by `x ↦ 1-x`, which maps `ω(c) ↦ ω(1-c)`.
//!
//! All arithmetic is ball arithmetic; series truncation adds an explicit
//! tail bound `4(M+1)^L x₀^{M+1}` to the radius, valid because the
//! coefficients of a suffix of length `L` are bounded by `k^{L-1}` when
//! every pole has modulus ≥ 1 (each integration step divides the running
//! partial sums by `k`).
//!
//! A separate Taylor-transport evaluator moves the whole vector of suffix
//! integrals along an arbitrary polygonal path that avoids the poles; it
//! powers truncated integrals `∫_α^β` and the analytic continuation used
//! by exterior endpoint constants.

use crate::ball::ComplexBall;
use crate::reg::shuffle_regularize;
use crate::scalars::{BigRat, CycRat};
use crate::words::{Letter, Word, WordPoly};
use rug::Float;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericError {
    #[error("word is divergent: first pole at 1 or last pole at 0")]
    Divergent,
    #[error("pole too close to the expansion region (|c| = {0})")]
    PoleTooClose(f64),
    #[error("path passes too close to a pole")]
    PathNearPole,
    #[error("precision target unreachable: {0}")]
    Unreachable(String),
}

/// Number of series terms for a target precision at ratio `x0 ≤ 0.6`.
fn terms_for(prec: u32, word_len: usize, x0_log2: f64) -> usize {
    // need (M+1)*|log2 x0| - L*log2(M+1) - 2 >= prec + 10
    let l = word_len as f64;
    let mut m = ((prec as f64 + 24.0) / -x0_log2).ceil() as usize + 8 * (word_len + 1);
    for _ in 0..4 {
        let extra = (l * ((m + 1) as f64).log2() + 4.0) / -x0_log2;
        m = ((prec as f64 + 24.0) / -x0_log2 + extra).ceil() as usize + 8 * (word_len + 1);
    }
    m
}

/// Suffix values `∫₀^{x0} ω(c_{r+1})…ω(c_n)` for `r = n, n-1, …, 0`,
/// returned as `out[r]` (so `out[n] = 1`).
///
/// Requires `c_n ≠ 0`, all `|c_i| ≥ 1` (within a 1e-3 ball margin) and
/// `0 < |x0| ≤ 0.6`.
pub fn suffix_values(
    poles: &[CycRat],
    x0: &CycRat,
    prec: u32,
) -> Result<Vec<ComplexBall>, NumericError> {
    let n = poles.len();
    let mut out = vec![ComplexBall::exact_zero(prec); n + 1];
    out[n] = ComplexBall::from_f64(prec, 1.0);
    if n == 0 {
        return Ok(out);
    }
    if poles[n - 1].is_zero() {
        return Err(NumericError::Divergent);
    }
    let wp = prec + 32 + 4 * n as u32;
    let x0b = ComplexBall::from_cyc(wp, x0);
    let x0f = x0b.abs_upper().to_f64();
    assert!(x0f > 0.0 && x0f <= 0.6, "series anchor out of range");
    let m = terms_for(prec, n, (x0f * 1.002).log2());

    // coefficient vectors: g[k] = k-th Taylor coefficient at 0
    let mut g = vec![ComplexBall::exact_zero(wp); m + 1];
    g[0] = ComplexBall::from_f64(wp, 1.0);
    for (idx, c) in poles.iter().enumerate().rev() {
        let suffix_len = n - idx;
        if c.is_zero() {
            // ∫₀ˣ g(t)/t dt: shift down by one power of t, divide by k
            let mut f = vec![ComplexBall::exact_zero(wp); m + 1];
            for k in 1..=m {
                f[k] = g[k].mul_rat(&BigRat::from((1u32, k as u32)));
            }
            g = f;
        } else {
            let cb = ComplexBall::from_cyc(wp, c);
            if cb.abs_lower().to_f64() < 0.999 {
                return Err(NumericError::PoleTooClose(cb.abs_lower().to_f64()));
            }
            let cinv = cb.recip();
            // h_j = (h_{j-1} - g_j) / c, h_{-1} = 0; f_{k} = h_{k-1}/k
            let mut f = vec![ComplexBall::exact_zero(wp); m + 1];
            let mut h = ComplexBall::exact_zero(wp);
            for j in 0..m {
                h = h.sub(&g[j]).mul(&cinv);
                f[j + 1] = h.mul_rat(&BigRat::from((1u32, (j + 1) as u32)));
            }
            g = f;
        }
        // value at x0 by Horner, plus rigorous tail
        let mut v = ComplexBall::exact_zero(wp);
        for k in (1..=m).rev() {
            v = v.add(&g[k]).mul(&x0b);
        }
        let tail = tail_bound(m, suffix_len, x0f);
        out[idx] = v.inflate(&Float::with_val(32, tail)).set_prec(prec + 16);
    }
    Ok(out)
}

/// `4 (M+1)^L x_eff^{M+1}` with `x_eff = 1.002·x0`, rounded up crudely.
fn tail_bound(m: usize, word_len: usize, x0: f64) -> f64 {
    let x_eff: f64 = (x0 * 1.002).min(0.602);
    let log2_tail =
        2.0 + (word_len as f64) * ((m + 1) as f64).log2() + ((m + 1) as f64) * x_eff.log2();
    2f64.powf(log2_tail + 1.0)
}

/// `∫₀¹ ω(c₁)…ω(c_n)` for an admissible pole word (`c₁ ≠ 1`, `c_n ≠ 0`),
/// by composition at the midpoint.
pub fn iterint_01(poles: &[CycRat], prec: u32) -> Result<ComplexBall, NumericError> {
    let n = poles.len();
    if n == 0 {
        return Ok(ComplexBall::from_f64(prec, 1.0));
    }
    let level = poles[0].level();
    let one = CycRat::one(level);
    if poles[0] == one || poles[n - 1].is_zero() {
        return Err(NumericError::Divergent);
    }
    let half = CycRat::from_frac(level, 1, 2);
    let wp = prec + 24;
    let fwd = suffix_values(poles, &half, wp)?;
    // reflected-reversed word: outermost 1-c_n, …, innermost 1-c_1
    let refl: Vec<CycRat> = poles
        .iter()
        .rev()
        .map(|c| one.sub(c).expect("level"))
        .collect();
    let rev = suffix_values(&refl, &half, wp)?;
    let mut acc = ComplexBall::exact_zero(wp);
    for r in 0..=n {
        // (-1)^r ∫_{1/2}^1 ω(c_1..c_r) = ∫₀^{1/2} of reflected prefix
        let term = rev[n - r].mul(&fwd[r]);
        if r % 2 == 0 {
            acc = acc.add(&term);
        } else {
            acc = acc.sub(&term);
        }
    }
    Ok(acc.set_prec(prec))
}

/// Letter word → (sign, poles): `a ↦ ω(0)`, `b_i = dt/(μ^{-i}-t) ↦ -ω(μ^{-i})`.
pub fn word_to_poles(w: &Word) -> (i32, Vec<CycRat>) {
    let n = w.level();
    let mut sign = 1;
    let mut poles = Vec::with_capacity(w.weight());
    for l in w.letters() {
        match l {
            Letter::A => poles.push(CycRat::zero(n)),
            Letter::B(i) => {
                sign = -sign;
                poles.push(CycRat::root_of_unity(n, -(*i as i64)));
            }
        }
    }
    (sign, poles)
}

/// `∫₀¹ w` for an admissible letter word.
pub fn word_integral_01(w: &Word, prec: u32) -> Result<ComplexBall, NumericError> {
    let (sign, poles) = word_to_poles(w);
    let v = iterint_01(&poles, prec)?;
    Ok(if sign < 0 { v.neg() } else { v })
}

/// Numeric Ł of an arbitrary word polynomial: shuffle-regularize, then sum
/// certified word integrals.
pub fn eval_l(p: &WordPoly, prec: u32) -> Result<ComplexBall, NumericError> {
    let adm = shuffle_regularize(p);
    let wp = prec + 16;
    let mut acc = ComplexBall::exact_zero(wp);
    for (w, c) in adm.as_poly().terms() {
        let v = word_integral_01(w, wp)?;
        acc = acc.add(&v.mul(&ComplexBall::from_cyc(wp, c)));
    }
    Ok(acc.set_prec(prec))
}

// ---------------------------------------------------------------------------
// Taylor transport along a polygonal path.

/// Segment-local data: all chain integrals `∫_{[p→q]} ω_{i+1}…ω_j`
/// (anchored at `p`), indexed `[i][j]` with `i ≤ j`.
///
/// Taylor expansion around the segment midpoint.  With `d` the minimal
/// pole distance to the midpoint and `h` the half-length, coefficients of
/// every chain satisfy `|f_k| ≤ G·ρ^{-k}` for `ρ = (d+h)/2`: dividing by
/// `(t-c)` maps `G ↦ G/(d-ρ)` and integrating from `p` multiplies by at
/// most `ρ/(1-h/ρ)`.  The dropped tail of a value at `q` is then bounded
/// by `G (h/ρ)^{M+1} / (1-h/ρ)`.
fn segment_chain_integrals(
    poles: &[ComplexBall],
    p: &ComplexBall,
    q: &ComplexBall,
    prec: u32,
) -> Result<Vec<Vec<ComplexBall>>, NumericError> {
    let n = poles.len();
    let wp = prec + 32;
    let mid = p.add(q).mul_rat(&BigRat::from((1, 2)));
    let half_len = q.sub(p).mul_rat(&BigRat::from((1, 2))).abs_upper();
    let mut min_dist = Float::with_val(32, 1e300);
    for c in poles {
        let d = c.sub(&mid).abs_lower();
        if d < min_dist {
            min_dist = d;
        }
    }
    let h = half_len.to_f64() * 1.0001;
    let d = min_dist.to_f64() * 0.9999;
    if !(h < 0.55 * d) {
        return Err(NumericError::PathNearPole);
    }
    let rho = (d + h) / 2.0;
    let r_eff = h / rho; // ≤ 0.71 given h < 0.55 d
    let g_growth = ((d + h) / (d - h)).powi(2) * 1.001;
    let g_bits = (n as f64) * g_growth.log2() + 8.0;
    let m = terms_for(prec + g_bits as u32, n, r_eff.log2().min(-0.45));
    let pm = p.sub(&mid);
    let qm = q.sub(&mid);
    let mut values = vec![vec![ComplexBall::exact_zero(wp); n + 1]; n + 1];
    for (row, value) in values.iter_mut().enumerate() {
        value[row] = ComplexBall::from_f64(wp, 1.0);
    }
    for j in 1..=n {
        // chains ending at letter j: i = j-1 down to 0
        let mut coeffs = vec![ComplexBall::exact_zero(wp); m + 1];
        coeffs[0] = ComplexBall::from_f64(wp, 1.0);
        let mut g_bound = 1.0f64;
        for i in (0..j).rev() {
            // multiply by 1/(t-c_{i+1}) via h_k = (h_{k-1} - g_k)/(c-mid),
            // then integrate from p.
            let cm = poles[i].sub(&mid);
            let cm_inv = cm.recip();
            let mut f = vec![ComplexBall::exact_zero(wp); m + 1];
            let mut hk = ComplexBall::exact_zero(wp);
            for k in 0..m {
                hk = hk.sub(&coeffs[k]).mul(&cm_inv);
                f[k + 1] = hk.mul_rat(&BigRat::from((1u32, (k + 1) as u32)));
            }
            // anchor at p: f0 = -Σ_{k≥1} f_k (p-mid)^k
            let mut horner = ComplexBall::exact_zero(wp);
            for k in (1..=m).rev() {
                horner = horner.add(&f[k]).mul(&pm);
            }
            f[0] = horner.neg();
            g_bound = g_bound * g_growth;
            coeffs = f;
            // value at q with tail bound
            let mut v = ComplexBall::exact_zero(wp);
            for k in (0..=m).rev() {
                v = v.mul(&qm).add(&coeffs[k]);
            }
            let tail = 2.0 * g_bound * r_eff.powi(m as i32 + 1) / (1.0 - r_eff);
            values[i][j] = v.inflate(&Float::with_val(32, tail));
        }
    }
    Ok(values)
}

/// Transport the suffix-integral vector along `[p → q]`:
/// `T'_i = Σ_{r≥i} ∫_{[p→q]} ω_{i+1}…ω_r · T_r`.
///
/// Bisects the segment when it comes too close to a pole relative to its
/// length; fails only if an endpoint itself is (numerically) at a pole.
fn transport_segment(
    poles: &[ComplexBall],
    t: &[ComplexBall],
    p: &ComplexBall,
    q: &ComplexBall,
    prec: u32,
    depth: u32,
) -> Result<Vec<ComplexBall>, NumericError> {
    let n = poles.len();
    match segment_chain_integrals(poles, p, q, prec) {
        Ok(a) => {
            let mut out = vec![ComplexBall::exact_zero(prec + 32); n + 1];
            for (i, slot) in out.iter_mut().enumerate() {
                let mut acc = ComplexBall::exact_zero(prec + 32);
                for r in i..=n {
                    acc = acc.add(&a[i][r].mul(&t[r]));
                }
                *slot = acc;
            }
            Ok(out)
        }
        Err(NumericError::PathNearPole) if depth < 40 => {
            let mid = p.add(q).mul_rat(&BigRat::from((1, 2)));
            let t1 = transport_segment(poles, t, p, &mid, prec, depth + 1)?;
            transport_segment(poles, &t1, &mid, q, prec, depth + 1)
        }
        Err(e) => Err(e),
    }
}

/// Public transport step: move a suffix-integral vector along `[p → q]`.
pub fn transport_vector(
    poles: &[ComplexBall],
    t: &[ComplexBall],
    p: &ComplexBall,
    q: &ComplexBall,
    prec: u32,
) -> Result<Vec<ComplexBall>, NumericError> {
    transport_segment(poles, t, p, q, prec, 0)
}

/// All suffix integrals `∫_γ ω_{i+1}…ω_n` along the polygonal path through
/// `points` (complex balls, exact midpoints expected).
pub fn transport_path(
    poles: &[ComplexBall],
    points: &[ComplexBall],
    prec: u32,
) -> Result<Vec<ComplexBall>, NumericError> {
    let n = poles.len();
    let mut t = vec![ComplexBall::exact_zero(prec + 32); n + 1];
    t[n] = ComplexBall::from_f64(prec + 32, 1.0);
    for w in points.windows(2) {
        t = transport_segment(poles, &t, &w[0], &w[1], prec, 0)?;
    }
    Ok(t)
}

/// Truncated integral `∫_α^β ω(c₁)…ω(c_n)` over `(0,1)`, poles allowed at
/// the endpoints but not inside.  Uses dyadic segments that keep away from
/// both endpoints.
pub fn partial_integral(
    poles: &[CycRat],
    alpha: &BigRat,
    beta: &BigRat,
    prec: u32,
) -> Result<ComplexBall, NumericError> {
    assert!(alpha.to_f64() > 0.0 && beta.to_f64() < 1.0 && alpha < beta);
    let wp = prec + 32;
    let pole_balls: Vec<ComplexBall> = poles.iter().map(|c| ComplexBall::from_cyc(wp, c)).collect();
    // dyadic ladder: α, 2α, …, 1/2, …, 1-2(1-β), β
    let mut pts: Vec<BigRat> = vec![alpha.clone()];
    let mut x = alpha.clone();
    let half = BigRat::from((1, 2));
    while BigRat::from(&x * BigRat::from(2)) < half {
        x = BigRat::from(&x * BigRat::from(2));
        pts.push(x.clone());
    }
    pts.push(half.clone());
    let mut upper: Vec<BigRat> = vec![beta.clone()];
    let mut y = BigRat::from(BigRat::from(1) - beta);
    while BigRat::from(&y * BigRat::from(2)) < half {
        y = BigRat::from(&y * BigRat::from(2));
        upper.push(BigRat::from(BigRat::from(1) - &y));
    }
    for u in upper.into_iter().rev() {
        pts.push(u);
    }
    let points: Vec<ComplexBall> = pts.iter().map(|q| ComplexBall::from_rat(wp, q)).collect();
    let t = transport_path(&pole_balls, &points, prec)?;
    Ok(t[0].set_prec(prec))
}

/// `∫_α^β w` for a letter word (may be divergent at the endpoints as long
/// as `0 < α < β < 1`).
pub fn partial_word_integral(
    w: &Word,
    alpha: &BigRat,
    beta: &BigRat,
    prec: u32,
) -> Result<ComplexBall, NumericError> {
    let (sign, poles) = word_to_poles(w);
    let v = partial_integral(&poles, alpha, beta, prec)?;
    Ok(if sign < 0 { v.neg() } else { v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::parse_word;

    fn close(b: &ComplexBall, re: f64, tol: f64) {
        assert!(
            (b.re.to_f64() - re).abs() < tol && b.im.to_f64().abs() < tol,
            "got {:?}, want {re}",
            b.to_f64_pair()
        );
    }

    #[test]
    fn zeta2_from_word() {
        // Ł(a b0) = ζ(2)
        let w = parse_word("a b0", 1).unwrap();
        let v = word_integral_01(&w, 96).unwrap();
        close(&v, std::f64::consts::PI.powi(2) / 6.0, 1e-15);
        assert!(v.rad_f64() < 1e-24);
    }

    #[test]
    fn zeta3_and_li_minus_one() {
        let w = parse_word("a a b0", 1).unwrap();
        let v = word_integral_01(&w, 128).unwrap();
        close(&v, 1.2020569031595942853997, 1e-18);
        // Ł(a b1) at level 2 = Li_2(-1) = -π²/12
        let w = parse_word("a b1", 2).unwrap();
        let v = word_integral_01(&w, 96).unwrap();
        close(&v, -std::f64::consts::PI.powi(2) / 12.0, 1e-15);
    }

    #[test]
    fn level_4_value() {
        // Ł(a b1) at level 4 = Li_2(i); Im Li_2(i) = Catalan
        let w = parse_word("a b1", 4).unwrap();
        let v = word_integral_01(&w, 96).unwrap();
        assert!((v.re.to_f64() + std::f64::consts::PI.powi(2) / 48.0).abs() < 1e-15);
        assert!((v.im.to_f64() - 0.9159655941772190150546).abs() < 1e-15);
    }

    #[test]
    fn regularized_value_matches_truncated_limit_shape() {
        // Ł(b0 a b0) is finite; compare against ∫_α^β with the divergent
        // log(1-β) part removed by evaluating at two β and extrapolating.
        let p = WordPoly::from_word(parse_word("b0 a b0", 1).unwrap());
        let reg = eval_l(&p, 80).unwrap();
        // b0 a b0 = -2 a b0 b0  ⇒ value = -2 ζ(2,1) = -2 ζ(3)
        close(&reg, -2.0 * 1.2020569031595942854, 1e-12);
    }

    #[test]
    fn partial_integral_converges_to_full() {
        let w = parse_word("a b0", 1).unwrap();
        let a = BigRat::from((1, 1024));
        let b = BigRat::from((1023, 1024));
        let v = partial_word_integral(&w, &a, &b, 64).unwrap();
        let full = word_integral_01(&w, 64).unwrap();
        // ζ(2) integrand is integrable; truncation error is O(α log α)
        assert!((v.re.to_f64() - full.re.to_f64()).abs() < 0.02);
        // tighter truncation gets closer
        let a = BigRat::from((1, 1 << 20));
        let b = BigRat::from(((1 << 20) - 1, 1 << 20));
        let v2 = partial_word_integral(&w, &a, &b, 64).unwrap();
        assert!((v2.re.to_f64() - full.re.to_f64()).abs() < 3e-5);
    }
}
