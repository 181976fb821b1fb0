//! Regularization: extending the evaluation map Ł from admissible words to
//! all of `Q⟨X⟩`.
//!
//! Divergences of `∫₀¹ w` live at the two endpoints: a leading block of
//! `b₀` letters (pole at 1) and a trailing block of `a` letters (pole at
//! 0).  Shuffle regularization removes both blocks at the cost of
//! admissible words only, and is the unique linear extension with
//! `Ł(a) = Ł(b₀) = 0` compatible with the shuffle product; the value is
//! the constant term of the log-asymptotic expansion of the truncated
//! integral.
//!
//! For nested sums the analogous operation is the decomposition of `𝔄₁` as
//! a stuffle-polynomial ring over the admissible subalgebra generated by
//! `z_{1,0}`; the degree-zero coefficient is the constant term of `H_M` as
//! `M → ∞` after discarding powers of `log M + γ`.

use crate::scalars::{factorial, BigRat, CycRat};
use crate::words::{stuffle, Letter, Word, WordError, WordPoly, ZWord};
use std::collections::HashMap;
use std::sync::Mutex;

/// A word polynomial guaranteed to be supported on admissible words.
#[derive(Clone, Debug, PartialEq)]
pub struct RegWordPoly(WordPoly);

impl RegWordPoly {
    pub fn as_poly(&self) -> &WordPoly {
        &self.0
    }

    pub fn into_poly(self) -> WordPoly {
        self.0
    }

    /// Wrap a polynomial, checking admissibility of every word.
    pub fn new(p: WordPoly) -> Result<Self, WordError> {
        for (w, _) in p.terms() {
            if !w.is_admissible() {
                return Err(WordError::Parse(format!("word {w} is not admissible")));
            }
        }
        Ok(RegWordPoly(p))
    }
}

fn split_word(w: &Word) -> (usize, Vec<Letter>, usize) {
    let ls = w.letters();
    let m = ls.iter().take_while(|l| **l == Letter::B(0)).count();
    let n = ls[m..]
        .iter()
        .rev()
        .take_while(|l| **l == Letter::A)
        .count();
    let mid = ls[m..ls.len() - n].to_vec();
    (m, mid, n)
}

type Memo = HashMap<Word, WordPoly>;

static MEMO: once_cell::sync::Lazy<Mutex<Memo>> =
    once_cell::sync::Lazy::new(|| Mutex::new(HashMap::new()));

fn regularize_word(w: &Word) -> WordPoly {
    if w.is_admissible() {
        return WordPoly::from_word(w.clone());
    }
    if let Some(hit) = MEMO.lock().unwrap().get(w) {
        return hit.clone();
    }
    let level = w.level();
    let (m, mid, n) = split_word(w);
    let out = if mid.is_empty() && (m == 0 || n == 0) {
        // pure b₀^m or pure a^n: Ł = 0 (empty is admissible, handled above)
        WordPoly::zero(level)
    } else if m > 0 {
        // -1/m Σ_i Ł(b₀^{m-1} ξ₁…ξ_i b₀ ξ_{i+1}…ξ_q); the ξ-sequence
        // includes the trailing a-block.
        let mut xi = mid.clone();
        xi.extend(std::iter::repeat(Letter::A).take(n));
        let q = xi.len();
        let mut acc = WordPoly::zero(level);
        for i in 1..=q {
            let mut letters: Vec<Letter> = std::iter::repeat(Letter::B(0)).take(m - 1).collect();
            letters.extend_from_slice(&xi[..i]);
            letters.push(Letter::B(0));
            letters.extend_from_slice(&xi[i..]);
            let sub = regularize_word(&Word::new(level, letters).unwrap());
            acc = acc.add(&sub).unwrap();
        }
        acc.scale_rat(&BigRat::from((-1i64, m as i64)))
    } else {
        // m = 0, n > 0: -1/n Σ_i Ł(ξ₁…ξ_{i-1} a ξ_i…ξ_k a^{n-1})
        let k = mid.len();
        let mut acc = WordPoly::zero(level);
        for i in 1..=k {
            let mut letters: Vec<Letter> = mid[..i - 1].to_vec();
            letters.push(Letter::A);
            letters.extend_from_slice(&mid[i - 1..]);
            letters.extend(std::iter::repeat(Letter::A).take(n - 1));
            let sub = regularize_word(&Word::new(level, letters).unwrap());
            acc = acc.add(&sub).unwrap();
        }
        acc.scale_rat(&BigRat::from((-1i64, n as i64)))
    };
    MEMO.lock().unwrap().insert(w.clone(), out.clone());
    out
}

/// Shuffle regularization: linear extension of Ł with the divergent
/// generators sent to zero.  Agrees with the identity on admissible input.
pub fn shuffle_regularize(p: &WordPoly) -> RegWordPoly {
    let mut out = WordPoly::zero(p.level());
    for (w, c) in p.terms() {
        let r = regularize_word(w);
        out = out.add(&r.scale(c)).unwrap();
    }
    RegWordPoly(out)
}

/// Two-variable regularization polynomial: the unique shuffle homomorphism
/// `Ł_T: Q⟨X⟩ → (admissible combinations)[T₀, T₁]` with `Ł_T(a) = T₀` and
/// `Ł_T(b₀) = T₁`.  The `(0,0)` coefficient is [`shuffle_regularize`];
/// `T₀` stands for `log α` and `T₁` for `log(1-β)` in the asymptotic
/// expansion of `∫_α^β`.
pub fn shuffle_regularize_t(p: &WordPoly) -> std::collections::BTreeMap<(u32, u32), WordPoly> {
    let mut out: std::collections::BTreeMap<(u32, u32), WordPoly> = std::collections::BTreeMap::new();
    for (w, c) in p.terms() {
        for ((j, k), part) in regularize_word_t(w) {
            let scaled = part.scale(c);
            match out.entry((j, k)) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(scaled);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let s = e.get().add(&scaled).unwrap();
                    if s.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = s;
                    }
                }
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Trailing-side-only regularization polynomial: decompose with respect
/// to trailing `a`-blocks, leaving leading `b₀`s untouched (used for
/// integrals anchored at a point where only the `0`-endpoint diverges).
/// Returns coefficients of `T₀^j`.
pub fn regularize_trailing_t(p: &WordPoly) -> std::collections::BTreeMap<u32, WordPoly> {
    fn word_rec(w: &Word) -> Vec<(u32, WordPoly)> {
        let level = w.level();
        let letters = w.letters();
        let n = letters
            .iter()
            .rev()
            .take_while(|l| **l == Letter::A)
            .count();
        if n == 0 {
            return vec![(0, WordPoly::from_word(w.clone()))];
        }
        let mid = &letters[..letters.len() - n];
        let mut out: std::collections::BTreeMap<u32, WordPoly> = Default::default();
        let mut add = |k: u32, p: WordPoly| {
            let e = out
                .entry(k)
                .or_insert_with(|| WordPoly::zero(p.level()));
            *e = e.add(&p).unwrap();
        };
        if mid.is_empty() {
            // pure a^n: T₀^n/n!
            add(
                n as u32,
                WordPoly::one(level).scale_rat(&(BigRat::from(1) / factorial(n as u32))),
            );
        } else {
            // T₀·(mid a^{n-1}) = n·w + Σ_i inserted
            let mut shorter: Vec<Letter> = mid.to_vec();
            shorter.extend(std::iter::repeat(Letter::A).take(n - 1));
            let inv_n = BigRat::from((1i64, n as i64));
            for (j, p) in word_rec(&Word::new(level, shorter).unwrap()) {
                add(j + 1, p.scale_rat(&inv_n));
            }
            let minus_inv_n = BigRat::from((-1i64, n as i64));
            for i in 1..=mid.len() {
                let mut ls: Vec<Letter> = mid[..i - 1].to_vec();
                ls.push(Letter::A);
                ls.extend_from_slice(&mid[i - 1..]);
                ls.extend(std::iter::repeat(Letter::A).take(n - 1));
                for (j, p) in word_rec(&Word::new(level, ls).unwrap()) {
                    add(j, p.scale_rat(&minus_inv_n));
                }
            }
        }
        out.into_iter().collect()
    }
    let mut out: std::collections::BTreeMap<u32, WordPoly> = Default::default();
    for (w, c) in p.terms() {
        for (j, part) in word_rec(w) {
            let scaled = part.scale(c);
            match out.entry(j) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(scaled);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let s = e.get().add(&scaled).unwrap();
                    if s.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = s;
                    }
                }
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

type TPoly = std::collections::BTreeMap<(u32, u32), WordPoly>;

static MEMO_T: once_cell::sync::Lazy<Mutex<HashMap<Word, TPoly>>> =
    once_cell::sync::Lazy::new(|| Mutex::new(HashMap::new()));

fn tpoly_add(a: &mut TPoly, key: (u32, u32), p: &WordPoly, scale: &BigRat) {
    let scaled = p.scale_rat(scale);
    if scaled.is_zero() {
        return;
    }
    match a.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(scaled);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let s = e.get().add(&scaled).unwrap();
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

fn regularize_word_t(w: &Word) -> TPoly {
    if w.is_admissible() {
        let mut out = TPoly::new();
        out.insert((0, 0), WordPoly::from_word(w.clone()));
        return out;
    }
    if let Some(hit) = MEMO_T.lock().unwrap().get(w) {
        return hit.clone();
    }
    let level = w.level();
    let (m, mid, n) = split_word(w);
    let mut out = TPoly::new();
    if mid.is_empty() && (m == 0 || n == 0) {
        // pure powers: Ł_T(b₀^m) = T₁^m/m!, Ł_T(a^n) = T₀^n/n!
        let inv_fact = BigRat::from(1) / factorial((m + n) as u32);
        tpoly_add(
            &mut out,
            (n as u32, m as u32),
            &WordPoly::one(level),
            &inv_fact,
        );
    } else if m > 0 {
        // T₁ Ł_T(b₀^{m-1}ξ…) = m Ł_T(w) + Σ_i Ł_T(inserted_i)
        let mut xi = mid.clone();
        xi.extend(std::iter::repeat(Letter::A).take(n));
        let q = xi.len();
        let mut shorter: Vec<Letter> = std::iter::repeat(Letter::B(0)).take(m - 1).collect();
        shorter.extend_from_slice(&xi);
        let inv_m = BigRat::from((1i64, m as i64));
        for ((j, k), p) in regularize_word_t(&Word::new(level, shorter).unwrap()) {
            tpoly_add(&mut out, (j, k + 1), &p, &inv_m);
        }
        let minus_inv_m = BigRat::from((-1i64, m as i64));
        for i in 1..=q {
            let mut letters: Vec<Letter> = std::iter::repeat(Letter::B(0)).take(m - 1).collect();
            letters.extend_from_slice(&xi[..i]);
            letters.push(Letter::B(0));
            letters.extend_from_slice(&xi[i..]);
            for ((j, k), p) in regularize_word_t(&Word::new(level, letters).unwrap()) {
                tpoly_add(&mut out, (j, k), &p, &minus_inv_m);
            }
        }
    } else {
        // T₀ Ł_T(ξ…a^{n-1}) = n Ł_T(w) + Σ_i Ł_T(inserted_i)
        let kk = mid.len();
        let mut shorter: Vec<Letter> = mid.clone();
        shorter.extend(std::iter::repeat(Letter::A).take(n - 1));
        let inv_n = BigRat::from((1i64, n as i64));
        for ((j, k), p) in regularize_word_t(&Word::new(level, shorter).unwrap()) {
            tpoly_add(&mut out, (j + 1, k), &p, &inv_n);
        }
        let minus_inv_n = BigRat::from((-1i64, n as i64));
        for i in 1..=kk {
            let mut letters: Vec<Letter> = mid[..i - 1].to_vec();
            letters.push(Letter::A);
            letters.extend_from_slice(&mid[i - 1..]);
            letters.extend(std::iter::repeat(Letter::A).take(n - 1));
            for ((j, k), p) in regularize_word_t(&Word::new(level, letters).unwrap()) {
                tpoly_add(&mut out, (j, k), &p, &minus_inv_n);
            }
        }
    }
    MEMO_T.lock().unwrap().insert(w.clone(), out.clone());
    out
}

/// Stuffle power `z_{1,0}^{∗j} ∗ v`.
fn stuffle_t_power(j: u32, v: &WordPoly) -> Result<WordPoly, WordError> {
    let level = v.level();
    let t = WordPoly::from_word(ZWord::new(level, vec![(1, 0)])?.to_word());
    let mut acc = v.clone();
    for _ in 0..j {
        acc = stuffle(&t, &acc)?;
    }
    Ok(acc)
}

/// Decomposition of `w ∈ 𝔄₁` as `Σ_j z_{1,0}^{∗j} ∗ u_j` with all `u_j`
/// admissible.  Index 0 carries the stuffle-regularized constant part.
pub fn stuffle_reg_decompose(p: &WordPoly) -> Result<Vec<(u32, WordPoly)>, WordError> {
    let level = p.level();
    for (w, _) in p.terms() {
        if !w.in_a1() {
            return Err(WordError::NotInA1);
        }
    }
    let mut rest = p.clone();
    let mut parts: HashMap<u32, WordPoly> = HashMap::new();
    loop {
        // most divergent word first: maximal count of leading z_{1,0}
        let mut best: Option<(u32, Word, CycRat)> = None;
        for (w, c) in rest.terms() {
            let z = w.to_zword()?;
            let m = z.pairs().iter().take_while(|p| **p == (1, 0)).count() as u32;
            if m > 0 && best.as_ref().map(|(bm, _, _)| m > *bm).unwrap_or(true) {
                best = Some((m, w.clone(), c.clone()));
            }
        }
        let Some((m, w, c)) = best else { break };
        let z = w.to_zword()?;
        let v = ZWord::new(level, z.pairs()[m as usize..].to_vec())?;
        let coeff = c.scale(&BigRat::from(BigRat::from(1) / factorial(m)));
        let vp = WordPoly::from_term(v.to_word(), coeff.clone());
        let expanded = stuffle_t_power(m, &vp)?;
        rest = rest.sub(&expanded)?;
        parts
            .entry(m)
            .and_modify(|u| *u = u.add(&vp).unwrap())
            .or_insert(vp);
    }
    parts
        .entry(0)
        .and_modify(|u| *u = u.add(&rest).unwrap())
        .or_insert(rest);
    let mut out: Vec<(u32, WordPoly)> = parts.into_iter().filter(|(_, u)| !u.is_zero()).collect();
    out.sort_by_key(|(j, _)| *j);
    Ok(out)
}

/// The constant part (`j = 0` coefficient) of the stuffle decomposition.
pub fn stuffle_reg_constant(p: &WordPoly) -> Result<WordPoly, WordError> {
    Ok(stuffle_reg_decompose(p)?
        .into_iter()
        .find(|(j, _)| *j == 0)
        .map(|(_, u)| u)
        .unwrap_or_else(|| WordPoly::zero(p.level())))
}

/// One term of a bar expansion: a sign, a list of closed `∫₀¹` factor
/// words, and the remaining open word (a functional of the upper limit).
#[derive(Clone, Debug, PartialEq)]
pub struct BarTerm<L> {
    pub sign: i64,
    pub closed: Vec<Vec<L>>,
    pub open: Vec<L>,
}

/// Expand `∫₀ˣ` of a bar word into bar-free terms using
/// `∫_t^1 = ∫₀¹ − ∫₀^t` at the first barred position, recursively.
///
/// Items are `(letter, barred)`; the first letter is never barred.
pub fn expand_bars<L: Clone>(items: &[(L, bool)]) -> Vec<BarTerm<L>> {
    assert!(items.first().map(|(_, b)| !b).unwrap_or(true));
    let Some(j) = items.iter().position(|(_, b)| *b) else {
        return vec![BarTerm {
            sign: 1,
            closed: vec![],
            open: items.iter().map(|(l, _)| l.clone()).collect(),
        }];
    };
    let prefix: Vec<L> = items[..j].iter().map(|(l, _)| l.clone()).collect();
    let mut out = Vec::new();
    // ∫₀¹ of the suffix starting at j (bar at j consumed), times the prefix.
    let mut suffix = items[j..].to_vec();
    suffix[0].1 = false;
    for sub in expand_bars(&suffix) {
        let mut closed = sub.closed;
        closed.push(sub.open);
        out.push(BarTerm {
            sign: sub.sign,
            closed,
            open: prefix.clone(),
        });
    }
    // minus the in-place de-barred word.
    let mut debarred = items.to_vec();
    debarred[j].1 = false;
    for sub in expand_bars(&debarred) {
        out.push(BarTerm {
            sign: -sub.sign,
            closed: sub.closed,
            open: sub.open,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::parse_word;

    fn wp(s: &str, level: u32) -> WordPoly {
        WordPoly::from_word(parse_word(s, level).unwrap())
    }

    #[test]
    fn divergent_generators_vanish() {
        for w in ["b0", "a", "b0 b0", "a a a"] {
            let r = shuffle_regularize(&wp(w, 1));
            assert!(r.as_poly().is_zero(), "Ł({w}) = 0");
        }
    }

    #[test]
    fn admissible_fixed() {
        let p = wp("a a b0 b0", 1);
        assert_eq!(shuffle_regularize(&p).as_poly(), &p);
    }

    #[test]
    fn paper_reg_example() {
        // Ł(b0 a a b0) = -Ł(a b0 a b0) - 2 Ł(a a b0 b0)
        let r = shuffle_regularize(&wp("b0 a a b0", 1));
        let expect = wp("a b0 a b0", 1)
            .neg()
            .add(&wp("a a b0 b0", 1).scale_rat(&BigRat::from(-2)))
            .unwrap();
        assert_eq!(r.as_poly(), &expect);
    }

    #[test]
    fn trailing_a_case() {
        // a ⧢ a²b₀ = 3 a³b₀ + a²b₀a, so Ł(a²b₀a) = -3 Ł(a³b₀)
        let r = shuffle_regularize(&wp("a a b0 a", 1));
        let expect = wp("a a a b0", 1).scale_rat(&BigRat::from(-3));
        assert_eq!(r.as_poly(), &expect);
    }

    #[test]
    fn regularize_is_idempotent() {
        let p = wp("b0 a b0 a", 2)
            .add(&wp("z(2,1)", 2).scale_rat(&BigRat::from((3, 7))))
            .unwrap();
        let once = shuffle_regularize(&p);
        let twice = shuffle_regularize(once.as_poly());
        assert_eq!(once.as_poly(), twice.as_poly());
    }

    #[test]
    fn stuffle_decomposition_examples() {
        // z_{1,0} itself: {1: unit}
        let d = stuffle_reg_decompose(&wp("z(1,0)", 1)).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].0, 1);
        assert_eq!(d[0].1, WordPoly::one(1));
        // already admissible
        let d = stuffle_reg_decompose(&wp("z(2,0)", 1)).unwrap();
        assert_eq!(d, vec![(0, wp("z(2,0)", 1))]);
        // z_{1,0}z_{1,0} = (1/2) T^{∗2} - (1/2) z_{2,0}
        let d = stuffle_reg_decompose(&wp("z(1,0)z(1,0)", 1)).unwrap();
        let half = BigRat::from((1, 2));
        assert_eq!(
            d,
            vec![
                (0, wp("z(2,0)", 1).scale_rat(&BigRat::from((-1, 2)))),
                (2, WordPoly::one(1).scale_rat(&half)),
            ]
        );
    }

    #[test]
    fn stuffle_decomposition_reassembles() {
        for (s, level) in [
            ("z(1,0)z(2,1)", 2),
            ("z(1,0)z(1,0)z(1,1)", 2),
            ("z(1,0)z(1,0)", 1),
            ("z(2,0)z(1,0)", 1),
            ("z(1,0)z(1,2)z(1,0)", 4),
        ] {
            let p = wp(s, level);
            let d = stuffle_reg_decompose(&p).unwrap();
            let mut back = WordPoly::zero(level);
            for (j, u) in &d {
                back = back.add(&stuffle_t_power(*j, u).unwrap()).unwrap();
                if *j == 0 {
                    for (w, _) in u.terms() {
                        assert!(w.is_admissible());
                    }
                }
            }
            assert_eq!(back, p, "reassembly of {s}");
        }
    }

    #[test]
    fn bars_expand() {
        // ω₁ ω̄₂ → (∫₀¹ω₂)·ω₁ − ω₁ω₂
        let items = vec![(1u8, false), (2u8, true)];
        let terms = expand_bars(&items);
        assert_eq!(terms.len(), 2);
        assert!(terms.contains(&BarTerm {
            sign: 1,
            closed: vec![vec![2]],
            open: vec![1],
        }));
        assert!(terms.contains(&BarTerm {
            sign: -1,
            closed: vec![],
            open: vec![1, 2],
        }));
        // unbarred word is itself
        let items = vec![(1u8, false), (2u8, false)];
        let terms = expand_bars(&items);
        assert_eq!(
            terms,
            vec![BarTerm {
                sign: 1,
                closed: vec![],
                open: vec![1, 2],
            }]
        );
    }
}
