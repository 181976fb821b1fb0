//! The Hoffman–Racinet algebras over the alphabet `{a, b_0, …, b_{N-1}}`.
//!
//! Forms: `a = dt/t`, `b_i = dt/(μ^{-i} - t)` with `μ = exp(2πi/N)`.
//! Words are stored as raw letter sequences; the z-letter view
//! `z_{k,i} = a^{k-1} b_i` is a decoder on top ([`ZWord`]).  The subalgebra
//! `𝔄₁` consists of words not ending in `a` (concatenations of z-letters),
//! and the admissible subalgebra `𝔄₀` additionally excludes words starting
//! with `b_0`.
//!
//! Two products live here: the shuffle product of iterated integrals and
//! the stuffle product of nested sums, together with the finite harmonic
//! numbers that make the stuffle a homomorphism:
//! `H_M(w ∗ v) = H_M(w)·H_M(v)`.

use crate::ball::{root_of_unity_ball, ComplexBall};
use crate::scalars::{BigRat, CycRat, ScalarError};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),
    #[error("word ends in `a`, not in the z-letter subalgebra")]
    NotInA1,
    #[error("color index {0} out of range for level {1}")]
    BadColor(u32, u32),
    #[error("operation requires level 1, got {0}")]
    NotLevelOne(u32),
    #[error("word parse error: {0}")]
    Parse(String),
}

/// A letter of the alphabet: `a` or a colored `b_i`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Letter {
    A,
    B(u32),
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::A => write!(f, "a"),
            Letter::B(i) => write!(f, "b{i}"),
        }
    }
}

/// A word over the alphabet, tagged with its level.
///
/// Ordering is by length first, then lexicographic on letters, which fixes
/// the byte-for-byte output order of every polynomial.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Word {
    level: u32,
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(level: u32, letters: Vec<Letter>) -> Result<Self, WordError> {
        for l in &letters {
            if let Letter::B(i) = l {
                if *i >= level {
                    return Err(WordError::BadColor(*i, level));
                }
            }
        }
        Ok(Word { level, letters })
    }

    pub fn empty(level: u32) -> Self {
        Word {
            level,
            letters: vec![],
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Weight = number of letters.
    pub fn weight(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Not starting with `b_0` and not ending with `a`.
    pub fn is_admissible(&self) -> bool {
        if self.letters.is_empty() {
            return true;
        }
        self.letters.first() != Some(&Letter::B(0)) && self.letters.last() != Some(&Letter::A)
    }

    /// Member of `𝔄₁`: empty or ending in some `b_i`.
    pub fn in_a1(&self) -> bool {
        !matches!(self.letters.last(), Some(Letter::A))
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word {
            level: self.level,
            letters,
        }
    }

    pub fn prepend(&self, l: Letter) -> Word {
        let mut letters = Vec::with_capacity(self.letters.len() + 1);
        letters.push(l);
        letters.extend_from_slice(&self.letters);
        Word {
            level: self.level,
            letters,
        }
    }

    /// Decode into z-letters; fails on words ending in `a`.
    pub fn to_zword(&self) -> Result<ZWord, WordError> {
        let mut pairs = Vec::new();
        let mut run = 0u32;
        for l in &self.letters {
            match l {
                Letter::A => run += 1,
                Letter::B(i) => {
                    pairs.push((run + 1, *i));
                    run = 0;
                }
            }
        }
        if run > 0 {
            return Err(WordError::NotInA1);
        }
        Ok(ZWord {
            level: self.level,
            pairs,
        })
    }

    /// Reverse the letter sequence.
    pub fn reversed(&self) -> Word {
        let mut letters = self.letters.clone();
        letters.reverse();
        Word {
            level: self.level,
            letters,
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// z-letter view of a word in `𝔄₁`: pairs `(s_j, i_j)` with
/// `z_{s,i} = a^{s-1} b_i` and absolute color indices.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ZWord {
    level: u32,
    pairs: Vec<(u32, u32)>,
}

impl ZWord {
    pub fn new(level: u32, pairs: Vec<(u32, u32)>) -> Result<Self, WordError> {
        for (s, i) in &pairs {
            if *i >= level {
                return Err(WordError::BadColor(*i, level));
            }
            assert!(*s >= 1, "z-letter exponent must be positive");
        }
        Ok(ZWord { level, pairs })
    }

    pub fn empty(level: u32) -> Self {
        ZWord {
            level,
            pairs: vec![],
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.pairs.iter().map(|(s, _)| s).sum()
    }

    /// Admissible iff the first z-letter is not `z_{1,0}`.
    pub fn is_admissible(&self) -> bool {
        self.pairs.first() != Some(&(1, 0))
    }

    pub fn to_word(&self) -> Word {
        let mut letters = Vec::new();
        for (s, i) in &self.pairs {
            for _ in 1..*s {
                letters.push(Letter::A);
            }
            letters.push(Letter::B(*i));
        }
        Word {
            level: self.level,
            letters,
        }
    }

    /// Shift every color index by `j` modulo the level.
    pub fn tau(&self, j: i64) -> ZWord {
        let n = self.level as i64;
        ZWord {
            level: self.level,
            pairs: self
                .pairs
                .iter()
                .map(|(s, i)| (*s, ((*i as i64 + j).rem_euclid(n)) as u32))
                .collect(),
        }
    }

    /// Relative colors `ε_t = μ^{i_t - i_{t-1}}` as exponents (i_0 = 0).
    pub fn relative_colors(&self) -> Vec<u32> {
        let n = self.level as i64;
        let mut prev = 0i64;
        self.pairs
            .iter()
            .map(|(_, i)| {
                let rel = ((*i as i64 - prev).rem_euclid(n)) as u32;
                prev = *i as i64;
                rel
            })
            .collect()
    }

    pub fn prepend(&self, s: u32, i: u32) -> ZWord {
        let mut pairs = Vec::with_capacity(self.pairs.len() + 1);
        pairs.push((s, i));
        pairs.extend_from_slice(&self.pairs);
        ZWord {
            level: self.level,
            pairs,
        }
    }
}

impl fmt::Display for ZWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pairs.is_empty() {
            return write!(f, "1");
        }
        for (s, i) in &self.pairs {
            write!(f, "z({s},{i})")?;
        }
        Ok(())
    }
}

/// Finite linear combination of words with `Q(μ_N)` coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WordPoly {
    level: u32,
    terms: BTreeMap<Word, CycRat>,
}

impl WordPoly {
    pub fn zero(level: u32) -> Self {
        WordPoly {
            level,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(level: u32) -> Self {
        Self::from_word(Word::empty(level))
    }

    pub fn from_word(w: Word) -> Self {
        let level = w.level();
        let mut terms = BTreeMap::new();
        terms.insert(w, CycRat::one(level));
        WordPoly { level, terms }
    }

    pub fn from_term(w: Word, c: CycRat) -> Self {
        let level = w.level();
        let mut p = WordPoly::zero(level);
        p.add_term(w, c);
        p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &CycRat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: Word, c: CycRat) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(w.level(), self.level);
        let entry = self.terms.entry(w);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c).expect("level checked");
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &WordPoly) -> Result<WordPoly, WordError> {
        if self.level != other.level {
            return Err(WordError::LevelMismatch(self.level, other.level));
        }
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &WordPoly) -> Result<WordPoly, WordError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> WordPoly {
        WordPoly {
            level: self.level,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &CycRat) -> WordPoly {
        if c.is_zero() {
            return WordPoly::zero(self.level);
        }
        WordPoly {
            level: self.level,
            terms: self
                .terms
                .iter()
                .map(|(w, k)| (w.clone(), k.mul(c).expect("level checked")))
                .collect(),
        }
    }

    pub fn scale_rat(&self, q: &BigRat) -> WordPoly {
        self.scale(&CycRat::from_rat(self.level, q.clone()))
    }

    /// All words weight-homogeneous of the same weight? Returns it if so.
    pub fn homogeneous_weight(&self) -> Option<usize> {
        let mut it = self.terms.keys();
        let w0 = it.next()?.weight();
        if it.all(|w| w.weight() == w0) {
            Some(w0)
        } else {
            None
        }
    }

    /// Concatenate a word on the left of every term.
    pub fn concat_left(&self, prefix: &Word) -> WordPoly {
        WordPoly {
            level: self.level,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (prefix.concat(w), c.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for WordPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{} * ({w})", crate::scalars::cyc_pretty(c))?;
        }
        Ok(())
    }
}

/// Shuffle product of two plain words, as a multiset of result words.
fn shuffle_words(u: &[Letter], v: &[Letter], out: &mut BTreeMap<Vec<Letter>, u64>) {
    // Iterative over interleavings via recursion on slices; word lengths in
    // this crate are small (weight <= 10).
    fn rec(u: &[Letter], v: &[Letter], acc: &mut Vec<Letter>, out: &mut BTreeMap<Vec<Letter>, u64>) {
        if u.is_empty() && v.is_empty() {
            *out.entry(acc.clone()).or_insert(0) += 1;
            return;
        }
        if !u.is_empty() {
            acc.push(u[0]);
            rec(&u[1..], v, acc, out);
            acc.pop();
        }
        if !v.is_empty() {
            acc.push(v[0]);
            rec(u, &v[1..], acc, out);
            acc.pop();
        }
    }
    let mut acc = Vec::with_capacity(u.len() + v.len());
    rec(u, v, &mut acc, out);
}

/// Shuffle product, extended bilinearly.
pub fn shuffle(u: &WordPoly, v: &WordPoly) -> Result<WordPoly, WordError> {
    if u.level() != v.level() {
        return Err(WordError::LevelMismatch(u.level(), v.level()));
    }
    let level = u.level();
    let mut out = WordPoly::zero(level);
    for (wu, cu) in u.terms() {
        for (wv, cv) in v.terms() {
            let c = cu.mul(cv).expect("level checked");
            let mut words = BTreeMap::new();
            shuffle_words(wu.letters(), wv.letters(), &mut words);
            for (letters, mult) in words {
                let w = Word {
                    level,
                    letters,
                };
                out.add_term(w, c.scale(&BigRat::from(mult)));
            }
        }
    }
    Ok(out)
}

fn stuffle_z(u: &ZWord, v: &ZWord, out: &mut BTreeMap<ZWord, u64>, mult: u64) {
    if u.is_empty() {
        *out.entry(v.clone()).or_insert(0) += mult;
        return;
    }
    if v.is_empty() {
        *out.entry(u.clone()).or_insert(0) += mult;
        return;
    }
    let (s, j) = u.pairs[0];
    let (t, k) = v.pairs[0];
    let u_tail = ZWord {
        level: u.level,
        pairs: u.pairs[1..].to_vec(),
    };
    let v_tail = ZWord {
        level: v.level,
        pairs: v.pairs[1..].to_vec(),
    };
    // z_{s,j}·τ_j( τ_{-j}(u') ∗ z_{t,k}v )
    let mut sub = BTreeMap::new();
    stuffle_z(&u_tail.tau(-(j as i64)), v, &mut sub, 1);
    for (w, m) in sub {
        *out.entry(w.tau(j as i64).prepend(s, j)).or_insert(0) += mult * m;
    }
    // z_{t,k}·τ_k( z_{s,j}u ∗ τ_{-k}(v') )
    let mut sub = BTreeMap::new();
    stuffle_z(u, &v_tail.tau(-(k as i64)), &mut sub, 1);
    for (w, m) in sub {
        *out.entry(w.tau(k as i64).prepend(t, k)).or_insert(0) += mult * m;
    }
    // z_{s+t,j+k}·τ_{j+k}( τ_{-j}(u') ∗ τ_{-k}(v') )
    let mut sub = BTreeMap::new();
    stuffle_z(
        &u_tail.tau(-(j as i64)),
        &v_tail.tau(-(k as i64)),
        &mut sub,
        1,
    );
    let jk = (j + k) % u.level;
    for (w, m) in sub {
        *out.entry(w.tau((j + k) as i64).prepend(s + t, jk)).or_insert(0) += mult * m;
    }
}

/// Stuffle product on `𝔄₁`, extended bilinearly.
pub fn stuffle(u: &WordPoly, v: &WordPoly) -> Result<WordPoly, WordError> {
    if u.level() != v.level() {
        return Err(WordError::LevelMismatch(u.level(), v.level()));
    }
    let level = u.level();
    let mut out = WordPoly::zero(level);
    for (wu, cu) in u.terms() {
        let zu = wu.to_zword()?;
        for (wv, cv) in v.terms() {
            let zv = wv.to_zword()?;
            let c = cu.mul(cv).expect("level checked");
            let mut words = BTreeMap::new();
            stuffle_z(&zu, &zv, &mut words, 1);
            for (z, mult) in words {
                out.add_term(z.to_word(), c.scale(&BigRat::from(mult)));
            }
        }
    }
    Ok(out)
}

/// Color shift `τ_j` extended linearly; requires all terms in `𝔄₁`.
pub fn tau_shift(j: i64, w: &WordPoly) -> Result<WordPoly, WordError> {
    let mut out = WordPoly::zero(w.level());
    for (word, c) in w.terms() {
        let z = word.to_zword()?;
        out.add_term(z.tau(j).to_word(), c.clone());
    }
    Ok(out)
}

/// Exact finite harmonic number `H_M(w)` for a single z-word:
/// `Σ_{M ≥ n_1 > … > n_k ≥ 1} Π ε_t^{n_t} / n_t^{s_t}` with relative colors
/// `ε_t = μ^{i_t - i_{t-1}}`.
///
/// Dynamic programming over suffixes, `O(k·M)` field operations.
pub fn harmonic_zword(z: &ZWord, m: u32) -> CycRat {
    let n = z.level();
    if z.is_empty() {
        return CycRat::one(n);
    }
    let rels = z.relative_colors();
    // f[j] = value of the suffix sum with upper bound j (strict nesting).
    let mut f: Vec<CycRat> = vec![CycRat::one(n); (m + 1) as usize];
    for t in (0..z.pairs().len()).rev() {
        let (s, _) = z.pairs()[t];
        let eps = CycRat::root_of_unity(n, rels[t] as i64);
        let mut g = vec![CycRat::zero(n); (m + 1) as usize];
        let mut acc = CycRat::zero(n);
        let mut eps_pow = CycRat::one(n);
        for j in 1..=m as usize {
            eps_pow = eps_pow.mul(&eps).unwrap();
            // term ε^j / j^s * f[j-1]
            let p = BigRat::from(rug::Integer::from(j as u64)).pow_checked(s);
            let term = eps_pow.scale(&BigRat::from(BigRat::from(1) / p)).mul(&f[j - 1]).unwrap();
            acc = acc.add(&term).unwrap();
            g[j] = acc.clone();
        }
        f = g;
    }
    f[m as usize].clone()
}

trait PowChecked {
    fn pow_checked(self, e: u32) -> BigRat;
}
impl PowChecked for BigRat {
    fn pow_checked(self, e: u32) -> BigRat {
        use rug::ops::Pow;
        BigRat::from(self.pow(e))
    }
}

/// `H_M` extended linearly to a polynomial in `𝔄₁`.
pub fn harmonic(w: &WordPoly, m: u32) -> Result<CycRat, WordError> {
    let mut acc = CycRat::zero(w.level());
    for (word, c) in w.terms() {
        let z = word.to_zword()?;
        let h = harmonic_zword(&z, m);
        acc = acc.add(&h.mul(c).expect("level")).expect("level");
    }
    Ok(acc)
}

/// Non-strict harmonic sum `H_n^⋆(w) = Σ_{n ≥ n_1 ≥ … ≥ n_k ≥ 1} …` for a
/// z-word at any level.
pub fn harmonic_star_zword(z: &ZWord, m: u32) -> CycRat {
    let n = z.level();
    if z.is_empty() {
        return CycRat::one(n);
    }
    let rels = z.relative_colors();
    let mut f: Vec<CycRat> = vec![CycRat::one(n); (m + 1) as usize];
    for t in (0..z.pairs().len()).rev() {
        let (s, _) = z.pairs()[t];
        let eps = CycRat::root_of_unity(n, rels[t] as i64);
        let mut g = vec![CycRat::zero(n); (m + 1) as usize];
        let mut acc = CycRat::zero(n);
        let mut eps_pow = CycRat::one(n);
        for j in 1..=m as usize {
            eps_pow = eps_pow.mul(&eps).unwrap();
            let p = BigRat::from(rug::Integer::from(j as u64)).pow_checked(s);
            let term = eps_pow.scale(&BigRat::from(BigRat::from(1) / p)).mul(&f[j]).unwrap();
            acc = acc.add(&term).unwrap();
            g[j] = acc.clone();
        }
        f = g;
    }
    f[m as usize].clone()
}

/// `H_n^⋆` at level 1, returned as a plain rational.
pub fn harmonic_star(z: &ZWord, n: u32) -> Result<BigRat, WordError> {
    if z.level() != 1 {
        return Err(WordError::NotLevelOne(z.level()));
    }
    harmonic_star_zword(z, n).to_rat().map_err(|_| WordError::NotLevelOne(1))
}

/// Ball evaluation of `H_M(w)` for large `M` (used by series oracles).
pub fn harmonic_zword_ball(z: &ZWord, m: u32, prec: u32) -> ComplexBall {
    let n = z.level();
    if z.is_empty() {
        return ComplexBall::from_f64(prec, 1.0);
    }
    let rels = z.relative_colors();
    let mut f: Vec<ComplexBall> = vec![ComplexBall::from_f64(prec, 1.0); (m + 1) as usize];
    for t in (0..z.pairs().len()).rev() {
        let (s, _) = z.pairs()[t];
        let eps = root_of_unity_ball(prec, n, rels[t] as i64);
        let mut g = vec![ComplexBall::exact_zero(prec); (m + 1) as usize];
        let mut acc = ComplexBall::exact_zero(prec);
        let mut eps_pow = ComplexBall::from_f64(prec, 1.0);
        for j in 1..=m as usize {
            eps_pow = eps_pow.mul(&eps);
            let mut den = ComplexBall::from_f64(prec, j as f64);
            den = den.pow_u32(s);
            let term = eps_pow.div(&den).mul(&f[j - 1]);
            acc = acc.add(&term);
            g[j] = acc.clone();
        }
        f = g;
    }
    f[m as usize].clone()
}

/// Merge-expansions relating strict and non-strict nested sums.
///
/// `H^⋆(w) = Σ_{merges} H(merged)` and by Möbius inversion
/// `H(w) = Σ_{merges} (-1)^{#merges} H^⋆(merged)`.  Merging adjacent
/// z-letters `(s,i),(t,j) → (s+t, j)` multiplies the relative colors.
pub fn merge_expansions(z: &ZWord, signed: bool) -> Vec<(BigRat, ZWord)> {
    let k = z.len();
    if k == 0 {
        return vec![(BigRat::from(1), z.clone())];
    }
    let mut out = Vec::new();
    // Iterate over subsets of the k-1 junctions.
    for mask in 0u64..(1u64 << (k - 1)) {
        let merges = mask.count_ones();
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        let mut cur = z.pairs()[0];
        for t in 1..k {
            if mask >> (t - 1) & 1 == 1 {
                // merge letter t into current: exponents add, absolute color
                // of the merged letter is the later one.
                cur = (cur.0 + z.pairs()[t].0, z.pairs()[t].1);
            } else {
                pairs.push(cur);
                cur = z.pairs()[t];
            }
        }
        pairs.push(cur);
        let sign = if signed && merges % 2 == 1 { -1 } else { 1 };
        out.push((
            BigRat::from(sign),
            ZWord {
                level: z.level(),
                pairs,
            },
        ));
    }
    out
}

/// `H^⋆_n(w)` as a sum of strict `H_n` terms.
pub fn star_to_strict(z: &ZWord) -> Vec<(BigRat, ZWord)> {
    merge_expansions(z, false)
}

/// Strict `H_n(w)` as a signed sum of `H^⋆_n` terms.
pub fn strict_to_star(z: &ZWord) -> Vec<(BigRat, ZWord)> {
    merge_expansions(z, true)
}

/// Rewrite `H_{n-1}(w)` as `Σ_j (-1)^j n^{-(s_1+…+s_j)} H_n(suffix_j)`
/// (level 1 only: at higher level the dropped index would carry a color
/// factor depending on `n`).
pub fn lower_to_upper(z: &ZWord) -> Result<Vec<(BigRat, u32, ZWord)>, WordError> {
    if z.level() != 1 {
        return Err(WordError::NotLevelOne(z.level()));
    }
    let mut out = Vec::new();
    let mut shift = 0u32;
    for j in 0..=z.len() {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let suffix = ZWord {
            level: 1,
            pairs: z.pairs()[j..].to_vec(),
        };
        out.push((BigRat::from(sign), shift, suffix));
        if j < z.len() {
            shift += z.pairs()[j].0;
        }
    }
    Ok(out)
}

/// Rewrite `H_n(w)` as `Σ_j n^{-(s_1+…+s_j)} H_{n-1}(suffix_j)`
/// (level 1: the index `n` either appears in the leading slots or not).
pub fn upper_to_lower(z: &ZWord) -> Result<Vec<(u32, ZWord)>, WordError> {
    if z.level() != 1 {
        return Err(WordError::NotLevelOne(z.level()));
    }
    let mut out = Vec::new();
    let mut shift = 0u32;
    for j in 0..=z.len() {
        let suffix = ZWord {
            level: 1,
            pairs: z.pairs()[j..].to_vec(),
        };
        out.push((shift, suffix));
        if j < z.len() {
            shift += z.pairs()[j].0;
        }
    }
    Ok(out)
}

/// Rewrite `H_{n-1}(w)` fully into non-strict form:
/// `Σ_i c_i · n^{-m_i} · H^⋆_n(w_i)`.
pub fn lower_strict_to_star_forms(z: &ZWord) -> Result<Vec<(BigRat, u32, ZWord)>, WordError> {
    let mut out = Vec::new();
    for (c1, shift, suffix) in lower_to_upper(z)? {
        for (c2, star) in strict_to_star(&suffix) {
            out.push((BigRat::from(&c1 * &c2), shift, star));
        }
    }
    Ok(out)
}

/// Parse word text syntax: either letters `a b0 b1 …` separated by spaces
/// (juxtaposition) or z-syntax `z(3,1)z(1,0)`; `1` is the empty word.
pub fn parse_word(s: &str, level: u32) -> Result<Word, WordError> {
    let s = s.trim();
    if s == "1" || s.is_empty() {
        return Ok(Word::empty(level));
    }
    if s.contains('z') {
        let mut pairs = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            rest = rest.trim_start();
            if rest.is_empty() {
                break;
            }
            if !rest.starts_with('z') {
                return Err(WordError::Parse(format!("expected z(…) at `{rest}`")));
            }
            let open = rest
                .find('(')
                .ok_or_else(|| WordError::Parse("missing (".into()))?;
            let close = rest
                .find(')')
                .ok_or_else(|| WordError::Parse("missing )".into()))?;
            let inner = &rest[open + 1..close];
            let mut it = inner.split(',');
            let s_part = it
                .next()
                .ok_or_else(|| WordError::Parse("missing exponent".into()))?;
            let i_part = it
                .next()
                .ok_or_else(|| WordError::Parse("missing color".into()))?;
            let sv: u32 = s_part
                .trim()
                .parse()
                .map_err(|_| WordError::Parse(format!("bad exponent {s_part}")))?;
            let iv: u32 = i_part
                .trim()
                .parse()
                .map_err(|_| WordError::Parse(format!("bad color {i_part}")))?;
            if sv == 0 {
                return Err(WordError::Parse("exponent must be >= 1".into()));
            }
            pairs.push((sv, iv));
            rest = &rest[close + 1..];
        }
        return Ok(ZWord::new(level, pairs)?.to_word());
    }
    let mut letters = Vec::new();
    for tok in s.split_whitespace() {
        if tok == "a" {
            letters.push(Letter::A);
        } else if let Some(idx) = tok.strip_prefix('b') {
            let i: u32 = idx
                .parse()
                .map_err(|_| WordError::Parse(format!("bad letter {tok}")))?;
            letters.push(Letter::B(i));
        } else {
            return Err(WordError::Parse(format!("bad letter {tok}")));
        }
    }
    Word::new(level, letters)
}

/// Build the level-1 word `y_{s_1}…y_{s_k}` from exponents.
pub fn y_word(exps: &[u32]) -> ZWord {
    ZWord {
        level: 1,
        pairs: exps.iter().map(|s| (*s, 0)).collect(),
    }
}

impl From<ScalarError> for WordError {
    fn from(e: ScalarError) -> Self {
        WordError::Parse(e.to_string())
    }
}

/// All z-words of a given weight at a level (ordered deterministically).
pub fn zwords_of_weight(level: u32, weight: u32) -> Vec<ZWord> {
    fn rec(level: u32, remaining: u32, acc: &mut Vec<(u32, u32)>, out: &mut Vec<ZWord>) {
        if remaining == 0 {
            out.push(ZWord {
                level,
                pairs: acc.clone(),
            });
            return;
        }
        for s in 1..=remaining {
            for i in 0..level {
                acc.push((s, i));
                rec(level, remaining - s, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    if weight == 0 {
        return vec![ZWord::empty(level)];
    }
    rec(level, weight, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wp(s: &str, level: u32) -> WordPoly {
        WordPoly::from_word(parse_word(s, level).unwrap())
    }

    #[test]
    fn shuffle_basics() {
        // b0 ⧢ b0 = 2 b0b0
        let b0 = wp("b0", 1);
        let r = shuffle(&b0, &b0).unwrap();
        let expect = wp("b0 b0", 1).scale_rat(&BigRat::from(2));
        assert_eq!(r, expect);
        // ab0 ⧢ b0 = 2 ab0b0 + b0ab0
        let ab0 = wp("a b0", 1);
        let r = shuffle(&ab0, &b0).unwrap();
        let mut expect = wp("a b0 b0", 1).scale_rat(&BigRat::from(2));
        expect = expect.add(&wp("b0 a b0", 1)).unwrap();
        assert_eq!(r, expect);
        // total multiplicity is C(3,1) = 3
        let total: u32 = 2 + 1;
        assert_eq!(total, 3);
        // a·(ab0 ⧢ b0) = 2 a²b0² + ab0ab0 (paper's first worked integral)
        let glued = r.concat_left(&parse_word("a", 1).unwrap());
        let mut expect = wp("a a b0 b0", 1).scale_rat(&BigRat::from(2));
        expect = expect.add(&wp("a b0 a b0", 1)).unwrap();
        assert_eq!(glued, expect);
    }

    #[test]
    fn stuffle_basics() {
        // z_{2,0} ∗ z_{2,0} = 2 z_{2,0}z_{2,0} + z_{4,0}
        let z20 = wp("z(2,0)", 1);
        let r = stuffle(&z20, &z20).unwrap();
        let mut expect = wp("z(2,0)z(2,0)", 1).scale_rat(&BigRat::from(2));
        expect = expect.add(&wp("z(4,0)", 1)).unwrap();
        assert_eq!(r, expect);
        // unit
        let one = WordPoly::one(2);
        let z11 = wp("z(1,1)", 2);
        assert_eq!(stuffle(&z11, &one).unwrap(), z11);
        // N=2: z_{1,1} ∗ z_{1,1} = 2 z_{1,1}z_{1,0} + z_{2,0}
        let r = stuffle(&z11, &z11).unwrap();
        let mut expect = wp("z(1,1)z(1,0)", 2).scale_rat(&BigRat::from(2));
        expect = expect.add(&wp("z(2,0)", 2)).unwrap();
        assert_eq!(r, expect);
    }

    #[test]
    fn tau_shifts() {
        let z = wp("z(2,0)", 2);
        assert_eq!(tau_shift(1, &z).unwrap(), wp("z(2,1)", 2));
        let z = wp("z(3,1)z(1,2)", 4);
        assert_eq!(tau_shift(2, &z).unwrap(), wp("z(3,3)z(1,0)", 4));
        // τ_N = id
        for w in ["z(2,1)z(1,3)", "z(1,2)"] {
            let p = wp(w, 4);
            assert_eq!(tau_shift(4, &p).unwrap(), p);
        }
    }

    #[test]
    fn harmonic_values() {
        // H_2(z_{1,0}) = 3/2
        let h = harmonic(&wp("z(1,0)", 1), 2).unwrap();
        assert_eq!(h.to_rat().unwrap(), BigRat::from((3, 2)));
        // H_3(z_{2,0}z_{1,0}) = 1/4 + (1/9)(3/2) = 5/12
        let h = harmonic(&wp("z(2,0)z(1,0)", 1), 3).unwrap();
        assert_eq!(h.to_rat().unwrap(), BigRat::from((5, 12)));
        // N=2: H_2(z_{1,1}) = -1 + 1/2 = -1/2
        let h = harmonic(&wp("z(1,1)", 2), 2).unwrap();
        assert_eq!(h.to_rat().unwrap(), BigRat::from((-1, 2)));
        // H_0 of a non-empty word is 0, H_M(1) = 1
        assert!(harmonic(&wp("z(2,0)", 1), 0).unwrap().is_zero());
        assert_eq!(
            harmonic(&WordPoly::one(1), 7).unwrap(),
            CycRat::one(1)
        );
    }

    #[test]
    fn harmonic_star_values() {
        // H_2^⋆(y1 y1) = Σ_{2≥a≥b≥1} 1/(ab) = 1 + 1/2 + 1/4 = 9/4... computed
        // by the brute-force oracle below.
        let z = y_word(&[1, 1]);
        let mut oracle = BigRat::new();
        for a in 1..=2u64 {
            for b in 1..=a {
                oracle += BigRat::from((1u64, a * b));
            }
        }
        assert_eq!(harmonic_star(&z, 2).unwrap(), oracle);
        // single index: star = strict
        let z = y_word(&[3]);
        for n in 0..6 {
            assert_eq!(
                harmonic_star(&z, n).unwrap(),
                harmonic_zword(&z, n).to_rat().unwrap()
            );
        }
        // H_0^⋆ of non-empty word = 0
        assert!(harmonic_star(&y_word(&[2, 1]), 0).unwrap() == 0);
    }

    #[test]
    fn stuffle_is_harmonic_homomorphism() {
        let u = wp("z(2,1)", 2);
        let v = wp("z(1,1)z(1,0)", 2);
        let uv = stuffle(&u, &v).unwrap();
        for m in [0u32, 1, 2, 5, 11] {
            let lhs = harmonic(&uv, m).unwrap();
            let rhs = harmonic(&u, m)
                .unwrap()
                .mul(&harmonic(&v, m).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs, "M={m}");
        }
    }

    #[test]
    fn zword_roundtrip() {
        let w = parse_word("a a b0 b1 a b2", 4);
        assert!(w.is_ok());
        let w = parse_word("a a b0 b1 b2", 4).unwrap();
        let z = w.to_zword().unwrap();
        assert_eq!(z.pairs(), &[(3, 0), (1, 1), (1, 2)]);
        assert_eq!(z.to_word(), w);
        // z-syntax parses to the same thing
        let w2 = parse_word("z(3,0)z(1,1)z(1,2)", 4).unwrap();
        assert_eq!(w, w2);
        // words ending in a are not in A1
        let w = parse_word("b0 a", 1).unwrap();
        assert!(w.to_zword().is_err());
    }

    #[test]
    fn merge_conversions_agree_with_oracles() {
        let z = ZWord::new(2, vec![(1, 0), (2, 1), (1, 1)]).unwrap();
        for n in [0u32, 1, 2, 3, 7] {
            // star = sum of strict over merges
            let star = harmonic_star_zword(&z, n);
            let mut acc = CycRat::zero(2);
            for (c, m) in star_to_strict(&z) {
                acc = acc.add(&harmonic_zword(&m, n).scale(&c)).unwrap();
            }
            assert_eq!(star, acc, "star M={n}");
            // strict = signed sum of star over merges
            let strict = harmonic_zword(&z, n);
            let mut acc = CycRat::zero(2);
            for (c, m) in strict_to_star(&z) {
                acc = acc.add(&harmonic_star_zword(&m, n).scale(&c)).unwrap();
            }
            assert_eq!(strict, acc, "strict M={n}");
        }
    }

    #[test]
    fn lower_to_upper_identity() {
        let z = y_word(&[2, 1]);
        for n in 1..=8u32 {
            let direct = harmonic_zword(&z, n - 1).to_rat().unwrap();
            let mut acc = BigRat::new();
            for (c, shift, suffix) in lower_to_upper(&z).unwrap() {
                let h = harmonic_zword(&suffix, n).to_rat().unwrap();
                let p = BigRat::from(rug::Integer::from(n)).pow_checked(shift);
                acc += c * h / p;
            }
            assert_eq!(direct, acc, "n={n}");
        }
    }
}
