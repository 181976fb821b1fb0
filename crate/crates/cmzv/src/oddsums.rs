//! Odd-denominator Euler sums `Σ_n (±1)ⁿ H_n^⋆(W) / (2n+1)` as level-4
//! iterated integrals.
//!
//! Writing `1/(2n+1) = ∫₀¹ x^{2n} dx` and summing the generating function
//! of the non-strict harmonic numbers gives
//! `Σ σⁿ H_n^⋆(W) x^{2n} = Λ_W(σx²)/(1-σx²)`, so the sum is `∫₀¹` of the
//! kernel `dx/(1-σx²)` followed by the `x ↦ σx²` pullback of the word of
//! `W` — all poles land on fourth roots of unity, one level up from the
//! level-2 input.  Divergent cases (`σ = +1` with non-vanishing `H^⋆`
//! limit) are produced as word polynomials whose shuffle-regularized value
//! is the scheme constant used throughout.

use crate::scalars::{BigRat, CycRat};
use crate::words::{star_to_strict, Letter, Word, WordPoly, ZWord};

fn letter_combo(level: u32, items: &[(Letter, CycRat)]) -> WordPoly {
    let mut p = WordPoly::zero(level);
    for (l, c) in items {
        p.add_term(Word::new(level, vec![*l]).unwrap(), c.clone());
    }
    p
}

fn concat_expand(factors: &[WordPoly]) -> WordPoly {
    let level = factors.first().map(|f| f.level()).unwrap_or(4);
    let mut acc = WordPoly::one(level);
    for f in factors.iter().rev() {
        let mut next = WordPoly::zero(level);
        for (wl, c1) in f.terms() {
            for (wa, c2) in acc.terms() {
                next.add_term(wl.concat(wa), c1.mul(c2).unwrap());
            }
        }
        acc = next;
    }
    acc
}

/// The level-4 word polynomial whose (regularized) Ł-value equals
/// `Σ_{n≥0} σⁿ H_n^⋆(w)/(2n+1)` for a level-2 word `w`.
pub fn odd_harmonic_sum_words(w: &ZWord, sigma_plus: bool) -> WordPoly {
    assert_eq!(w.level(), 2, "input lives in the level-2 algebra");
    let lv = 4u32;
    let one = CycRat::one(lv);
    let two = CycRat::from_int(lv, 2);
    let half = CycRat::from_frac(lv, 1, 2);
    let i_half = CycRat::i(lv).scale(&BigRat::from((1, 2)));
    // kernel dx/(1-σx²) and letter pullbacks under y = σx²
    let (kernel, map_a, map_b0, map_b1) = if sigma_plus {
        (
            letter_combo(lv, &[(Letter::B(0), half.clone()), (Letter::B(2), half.neg())]),
            letter_combo(lv, &[(Letter::A, two.clone())]),
            letter_combo(lv, &[(Letter::B(0), one.clone()), (Letter::B(2), one.clone())]),
            letter_combo(lv, &[(Letter::B(1), one.clone()), (Letter::B(3), one.clone())]),
        )
    } else {
        (
            letter_combo(lv, &[(Letter::B(3), i_half.clone()), (Letter::B(1), i_half.neg())]),
            letter_combo(lv, &[(Letter::A, two.clone())]),
            letter_combo(lv, &[(Letter::B(1), one.clone()), (Letter::B(3), one.clone())]),
            letter_combo(lv, &[(Letter::B(0), one.clone()), (Letter::B(2), one.clone())]),
        )
    };
    let mut total = WordPoly::zero(lv);
    for (coeff, strict) in star_to_strict(w) {
        let letters = strict.to_word();
        let mut factors = vec![kernel.clone()];
        for l in letters.letters() {
            factors.push(match l {
                Letter::A => map_a.clone(),
                Letter::B(0) => map_b0.clone(),
                Letter::B(1) => map_b1.clone(),
                Letter::B(_) => unreachable!("level-2 letters only"),
            });
        }
        total = total
            .add(&concat_expand(&factors).scale_rat(&coeff))
            .unwrap();
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::eval_l;

    #[test]
    fn empty_word_is_quarter_pi() {
        let p = odd_harmonic_sum_words(&ZWord::empty(2), false);
        let v = eval_l(&p, 96).unwrap();
        assert!((v.re.to_f64() - std::f64::consts::PI / 4.0).abs() < 1e-20);
        assert!(v.im.to_f64().abs() < 1e-20);
    }

    #[test]
    fn alternating_sums_match_partial_sums() {
        // Σ (-1)ⁿ H_n^⋆(w)/(2n+1) against incremental float partial sums
        let n_max = 200_000u64;
        // w = z(1,0): H_n
        let w = ZWord::new(2, vec![(1, 0)]).unwrap();
        let v = eval_l(&odd_harmonic_sum_words(&w, false), 96).unwrap();
        let mut h = 0.0f64;
        let mut s = 0.0f64;
        let mut prev = 0.0f64;
        let mut sg = 1.0f64;
        // n = 0 term vanishes (H_0 = 0); average consecutive partial sums
        // to kill the alternating truncation error
        for n in 1..n_max {
            h += 1.0 / n as f64;
            sg = -sg;
            prev = s;
            s += sg * h / (2 * n + 1) as f64;
        }
        let s = (s + prev) / 2.0;
        assert!((v.re.to_f64() - s).abs() < 1e-9, "{} vs {s}", v.re.to_f64());
        // w = z(2,1): Σ_{k≤n} (-1)^k/k²
        let w = ZWord::new(2, vec![(2, 1)]).unwrap();
        let v = eval_l(&odd_harmonic_sum_words(&w, false), 96).unwrap();
        let mut h = 0.0f64;
        let mut s = 0.0;
        let mut prev = 0.0;
        let mut sg = 1.0;
        let mut inner_sign = 1.0f64;
        for n in 1..n_max {
            inner_sign = -inner_sign;
            h += inner_sign / (n * n) as f64;
            sg = -sg;
            prev = s;
            s += sg * h / (2 * n + 1) as f64;
        }
        let s = (s + prev) / 2.0;
        assert!((v.re.to_f64() - s).abs() < 1e-9);
        // w = z(1,0)z(1,1): Σ_{n≥a≥b} (1/a)·(-1)^b/b with relative colors
        let w = ZWord::new(2, vec![(1, 0), (1, 1)]).unwrap();
        let v = eval_l(&odd_harmonic_sum_words(&w, false), 96).unwrap();
        let mut inner = 0.0f64; // Σ_{b≤a} (-1)^b / b
        let mut outer = 0.0f64; // H_n^⋆(w)
        let mut s = 0.0;
        let mut prev = 0.0;
        let mut sg = 1.0;
        let mut isg = 1.0f64;
        for n in 1..n_max {
            isg = -isg;
            inner += isg / n as f64;
            outer += inner / n as f64;
            sg = -sg;
            prev = s;
            s += sg * outer / (2 * n + 1) as f64;
        }
        let s = (s + prev) / 2.0;
        assert!((v.re.to_f64() - s).abs() < 1e-9, "{} vs {s}", v.re.to_f64());
    }

    #[test]
    fn plus_sum_regularized_combination() {
        // Σ [H_n^⋆(z_{2,1}) + π²/12]/(2n+1) converges; the regularized
        // values of the two divergent halves recombine to its value.
        let w = ZWord::new(2, vec![(2, 1)]).unwrap();
        let vp = eval_l(&odd_harmonic_sum_words(&w, true), 96).unwrap();
        let ve = eval_l(&odd_harmonic_sum_words(&ZWord::empty(2), true), 96).unwrap();
        let pi2_12 = std::f64::consts::PI.powi(2) / 12.0;
        let total = vp.re.to_f64() + pi2_12 * ve.re.to_f64();
        let mut h = 0.0f64;
        let mut s = pi2_12; // n = 0 term: H_0^⋆ = 0, 1/(2·0+1) = 1
        let mut isg = 1.0f64;
        for n in 1..400_000u64 {
            isg = -isg;
            h += isg / (n * n) as f64;
            s += (h + pi2_12) / (2 * n + 1) as f64;
        }
        // tail: h + π²/12 ≈ (-1)^n/(2n²), so the remainder is ~1e-12
        assert!((total - s).abs() < 1e-6, "{total} vs {s}");
    }
}
