//! Symbolic colored multiple zeta values.
//!
//! A [`CmzvTerm`] is `L_{s₁,…,s_k}(μ^{j₁},…,μ^{j_k})` with relative color
//! exponents `j_t`; the dictionary to words is
//! `Ł(z_{s₁,i₁}…z_{s_k,i_k}) = L_{s₁,…}(μ^{i₁}, μ^{i₂-i₁}, …)`, i.e.
//! absolute word colors are partial sums of the relative term colors.
//!
//! A [`CmzvExpr`] is a linear combination of monomials in terms and named
//! constants ([`Atom`]) over `Q(μ_N)`, with an optional global `1/π`
//! prefactor used by the squared-central-binomial family.

use crate::ball::ComplexBall;
use crate::numeric::{self, NumericError};
use crate::reg::shuffle_regularize;
use crate::scalars::{cyc_pretty, BigRat, CycRat};
use crate::words::{parse_word, Letter, Word, WordError, WordPoly, ZWord};
use once_cell::sync::Lazy;
use rug::ops::Pow;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExprError {
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),
    #[error("inadmissible word (leading z_{{1,0}}): regularize first")]
    Inadmissible,
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

/// `L_{s₁,…,s_k}(μ^{j₁},…,μ^{j_k})`, colors relative.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CmzvTerm {
    pub level: u32,
    pub exps: Vec<u32>,
    pub colors: Vec<u32>,
}

impl CmzvTerm {
    pub fn new(level: u32, exps: Vec<u32>, colors: Vec<u32>) -> Self {
        assert_eq!(exps.len(), colors.len());
        assert!(
            !(exps.first() == Some(&1) && colors.first() == Some(&0)),
            "divergent term (s1, a1) = (1, 1)"
        );
        CmzvTerm {
            level,
            exps,
            colors,
        }
    }

    pub fn weight(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn length(&self) -> usize {
        self.exps.len()
    }

    /// Absolute-color word: `i_t = j₁ + … + j_t (mod N)`.
    pub fn to_zword(&self) -> ZWord {
        let mut acc = 0u32;
        let pairs = self
            .exps
            .iter()
            .zip(&self.colors)
            .map(|(s, j)| {
                acc = (acc + j) % self.level;
                (*s, acc)
            })
            .collect();
        ZWord::new(self.level, pairs).expect("colors reduced mod N")
    }

    pub fn from_zword(z: &ZWord) -> Result<Self, ExprError> {
        if !z.is_admissible() {
            return Err(ExprError::Inadmissible);
        }
        let exps = z.pairs().iter().map(|(s, _)| *s).collect();
        let colors = z.relative_colors();
        Ok(CmzvTerm {
            level: z.level(),
            exps,
            colors,
        })
    }

    /// Alternating-MZV style name when colors are ±1: `zeta(bar 5,1)`.
    fn zeta_name(&self) -> Option<String> {
        if self.level > 2 {
            return None;
        }
        let parts: Vec<String> = self
            .exps
            .iter()
            .zip(&self.colors)
            .map(|(s, j)| {
                if self.level == 2 && *j == 1 {
                    format!("bar {s}")
                } else {
                    format!("{s}")
                }
            })
            .collect();
        Some(format!("zeta({})", parts.join(",")))
    }
}

impl fmt::Display for CmzvTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = self.zeta_name() {
            return write!(f, "{name}");
        }
        let args: Vec<String> = self
            .colors
            .iter()
            .map(|j| match (self.level, j) {
                (4, 1) => "i".into(),
                (4, 2) => "-1".into(),
                (4, 3) => "-i".into(),
                (_, 0) => "1".into(),
                (n, j) if 2 * j == n => "-1".into(),
                (n, j) => format!("mu({j}/{n})"),
            })
            .collect();
        let exps: Vec<String> = self.exps.iter().map(|s| s.to_string()).collect();
        write!(f, "L[{{{}}},{{{}}}]", exps.join(","), args.join(","))
    }
}

/// Exterior endpoint for regularized `Li_w` constants.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ExtPoint {
    Two,
    PlusInfinity,
    MinusInfinity,
    OnePlusI,
    OneMinusI,
}

impl fmt::Display for ExtPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtPoint::Two => write!(f, "2"),
            ExtPoint::PlusInfinity => write!(f, "+inf"),
            ExtPoint::MinusInfinity => write!(f, "-inf"),
            ExtPoint::OnePlusI => write!(f, "1+i"),
            ExtPoint::OneMinusI => write!(f, "1-i"),
        }
    }
}

/// Named constants with weight metadata and certified evaluators.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Atom {
    /// π (level-4 bases; at levels 1 and 2 even powers appear via ζ(2)).
    Pi,
    Log2,
    /// Catalan constant `C = β(2)`.
    Catalan,
    Zeta(u32),
    /// `Li_k(1/2)`.
    LiHalf(u32),
    /// Dirichlet beta `β(k)`.
    Beta(u32),
    /// `Im Li_k((1+i)/2)`.
    ImLiPhi(u32),
    /// A pinned CMZV constant used as a basis atom, e.g. `ζ(bar 5, 1)`.
    LConst(CmzvTerm),
    /// Regularized `Li_w` at an exterior point; the word is over
    /// `{x₀, x₁}` (false = x₀).  Branch: continuation from the upper half
    /// plane along the documented path.
    LiExt(Vec<bool>, ExtPoint),
}

impl Atom {
    pub fn weight(&self) -> u32 {
        match self {
            Atom::Pi | Atom::Log2 => 1,
            Atom::Catalan => 2,
            Atom::Zeta(k) | Atom::LiHalf(k) | Atom::Beta(k) | Atom::ImLiPhi(k) => *k,
            Atom::LConst(t) => t.weight(),
            Atom::LiExt(w, _) => w.len() as u32,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Pi => write!(f, "pi"),
            Atom::Log2 => write!(f, "log2"),
            Atom::Catalan => write!(f, "C"),
            Atom::Zeta(k) => write!(f, "zeta({k})"),
            Atom::LiHalf(k) => write!(f, "Li{k}(1/2)"),
            Atom::Beta(k) => write!(f, "beta({k})"),
            Atom::ImLiPhi(k) => write!(f, "ImLi{k}((1+i)/2)"),
            Atom::LConst(t) => write!(f, "{t}"),
            Atom::LiExt(w, p) => {
                let word: String = w.iter().map(|b| if *b { "x1" } else { "x0" }).collect();
                write!(f, "LiReg[{word}]({p})")
            }
        }
    }
}

/// One multiplicative factor of a monomial.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Factor {
    Z(CmzvTerm),
    A(Atom),
}

impl Factor {
    pub fn weight(&self) -> u32 {
        match self {
            Factor::Z(t) => t.weight(),
            Factor::A(a) => a.weight(),
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Z(t) => write!(f, "{t}"),
            Factor::A(a) => write!(f, "{a}"),
        }
    }
}

/// Product of factors with positive powers; the empty monomial is 1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(pub Vec<(Factor, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(vec![])
    }

    pub fn atom(a: Atom) -> Self {
        Monomial(vec![(Factor::A(a), 1)])
    }

    pub fn term(t: CmzvTerm) -> Self {
        Monomial(vec![(Factor::Z(t), 1)])
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().map(|(f, p)| f.weight() * p).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut map: BTreeMap<Factor, u32> = BTreeMap::new();
        for (f, p) in self.0.iter().chain(other.0.iter()) {
            *map.entry(f.clone()).or_insert(0) += p;
        }
        Monomial(map.into_iter().collect())
    }

    fn normalized(self) -> Monomial {
        let mut map: BTreeMap<Factor, u32> = BTreeMap::new();
        for (f, p) in self.0 {
            if p > 0 {
                *map.entry(f).or_insert(0) += p;
            }
        }
        Monomial(map.into_iter().collect())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, (fac, p)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if *p == 1 {
                write!(f, "{fac}")?;
            } else {
                write!(f, "{fac}^{p}")?;
            }
        }
        Ok(())
    }
}

/// Linear combination of monomials over `Q(μ_N)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CmzvExpr {
    level: u32,
    /// When set, the printed/numeric value is `(1/π)·Σ terms`.
    pub inv_pi: bool,
    terms: BTreeMap<Monomial, CycRat>,
}

impl CmzvExpr {
    pub fn zero(level: u32) -> Self {
        CmzvExpr {
            level,
            inv_pi: false,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(level: u32, c: CycRat) -> Self {
        let mut e = Self::zero(level);
        e.add_term(Monomial::one(), c);
        e
    }

    pub fn from_monomial(level: u32, m: Monomial, c: CycRat) -> Self {
        let mut e = Self::zero(level);
        e.add_term(m, c);
        e
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &CycRat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: CycRat) {
        if c.is_zero() {
            return;
        }
        let m = m.normalized();
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c).expect("level");
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &CmzvExpr) -> Result<CmzvExpr, ExprError> {
        if self.level != other.level {
            return Err(ExprError::LevelMismatch(self.level, other.level));
        }
        assert_eq!(self.inv_pi, other.inv_pi, "mixed 1/π flags");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &CmzvExpr) -> Result<CmzvExpr, ExprError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CmzvExpr {
        CmzvExpr {
            level: self.level,
            inv_pi: self.inv_pi,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &CycRat) -> CmzvExpr {
        if c.is_zero() {
            return CmzvExpr::zero(self.level);
        }
        CmzvExpr {
            level: self.level,
            inv_pi: self.inv_pi,
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k.mul(c).expect("level")))
                .collect(),
        }
    }

    pub fn scale_rat(&self, q: &BigRat) -> CmzvExpr {
        self.scale(&CycRat::from_rat(self.level, q.clone()))
    }

    pub fn mul(&self, other: &CmzvExpr) -> Result<CmzvExpr, ExprError> {
        if self.level != other.level {
            return Err(ExprError::LevelMismatch(self.level, other.level));
        }
        assert!(
            !(self.inv_pi && other.inv_pi),
            "product of two 1/π-flagged expressions"
        );
        let mut out = CmzvExpr::zero(self.level);
        out.inv_pi = self.inv_pi || other.inv_pi;
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.mul(c2).expect("level"));
            }
        }
        Ok(out)
    }

    /// Weight when homogeneous.
    pub fn weight(&self) -> Option<u32> {
        let mut it = self.terms.keys();
        let w = it.next()?.weight();
        it.all(|m| m.weight() == w).then_some(w)
    }

    /// Re-tag at a multiple level (promotes coefficients and term levels).
    pub fn promote(&self, m: u32) -> Result<CmzvExpr, ExprError> {
        if m == self.level {
            return Ok(self.clone());
        }
        if m % self.level != 0 {
            return Err(ExprError::Unsupported(format!(
                "cannot promote level {} to {m}",
                self.level
            )));
        }
        let step = m / self.level;
        let mut out = CmzvExpr::zero(m);
        out.inv_pi = self.inv_pi;
        for (mono, c) in &self.terms {
            let factors = mono
                .0
                .iter()
                .map(|(f, p)| {
                    let nf = match f {
                        Factor::Z(t) => Factor::Z(CmzvTerm {
                            level: m,
                            exps: t.exps.clone(),
                            colors: t.colors.iter().map(|j| j * step).collect(),
                        }),
                        Factor::A(a) => Factor::A(a.clone()),
                    };
                    (nf, *p)
                })
                .collect();
            out.add_term(
                Monomial(factors),
                c.promote(m)
                    .map_err(|e| ExprError::Unsupported(e.to_string()))?,
            );
        }
        Ok(out)
    }

    /// Does any monomial contain an exterior-point atom?
    pub fn has_exterior_atom(&self) -> bool {
        self.terms.keys().any(|m| {
            m.0.iter()
                .any(|(f, _)| matches!(f, Factor::A(Atom::LiExt(_, _))))
        })
    }
}

impl fmt::Display for CmzvExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        if self.inv_pi {
            write!(f, "(1/pi) * [")?;
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{} * {m}", cyc_pretty(c))?;
        }
        if self.inv_pi {
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// Dictionary: admissible z-word → CMZV term (single monomial expression).
pub fn word_to_cmzv(z: &ZWord) -> Result<CmzvExpr, ExprError> {
    if z.is_empty() {
        return Ok(CmzvExpr::constant(z.level(), CycRat::one(z.level())));
    }
    let t = CmzvTerm::from_zword(z)?;
    Ok(CmzvExpr::from_monomial(
        z.level(),
        Monomial::term(t),
        CycRat::one(z.level()),
    ))
}

/// Inverse dictionary.
pub fn cmzv_to_word(t: &CmzvTerm) -> ZWord {
    t.to_zword()
}

/// Word polynomial → sum of CMZV terms (shuffle-regularizes first).
pub fn wordpoly_to_cmzv(p: &WordPoly) -> Result<CmzvExpr, ExprError> {
    let adm = shuffle_regularize(p);
    let mut out = CmzvExpr::zero(p.level());
    for (w, c) in adm.as_poly().terms() {
        let z = w.to_zword()?;
        out = out.add(&word_to_cmzv(&z)?.scale(c))?;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Exact word expansions of atoms (level-dependent).

fn substitute_x_word(bits: &[bool], x0: &WordPoly, x1: &WordPoly) -> WordPoly {
    let level = x0.level();
    let mut acc = WordPoly::one(level);
    for b in bits.iter().rev() {
        let sub = if *b { x1 } else { x0 };
        let mut next = WordPoly::zero(level);
        for (w_letter, c1) in sub.terms() {
            for (w_acc, c2) in acc.terms() {
                next.add_term(w_letter.concat(w_acc), c1.mul(c2).unwrap());
            }
        }
        acc = next;
    }
    acc
}

fn letter_poly(level: u32, letters: &[(Letter, i64)]) -> WordPoly {
    let mut p = WordPoly::zero(level);
    for (l, c) in letters {
        p.add_term(
            Word::new(level, vec![*l]).unwrap(),
            CycRat::from_int(level, *c),
        );
    }
    p
}

/// `Li_w(1/2)` as an exact word polynomial: pull back along
/// `g(t) = t/(1+t)` which maps `[0,1] → [0,1/2]`; `x₀ ↦ a + b_{N/2}`,
/// `x₁ ↦ -b_{N/2}` (level divisible by 2).
pub fn li_half_words(bits: &[bool], level: u32) -> WordPoly {
    assert!(level % 2 == 0);
    let bm = Letter::B(level / 2);
    let x0 = letter_poly(level, &[(Letter::A, 1), (bm, 1)]);
    let x1 = letter_poly(level, &[(bm, -1)]);
    substitute_x_word(bits, &x0, &x1)
}

/// `Li_w((1±i)/2)` as exact level-4 words: pull back along
/// `g(t) = (1±i)t/(1+t)`; `x₀ ↦ a + b₂`, `x₁ ↦ b_{1 or 3} - b₂`.
pub fn li_phi_words(bits: &[bool], plus: bool) -> WordPoly {
    let x0 = letter_poly(4, &[(Letter::A, 1), (Letter::B(2), 1)]);
    let bk = if plus { Letter::B(1) } else { Letter::B(3) };
    let x1 = letter_poly(4, &[(bk, 1), (Letter::B(2), -1)]);
    substitute_x_word(bits, &x0, &x1)
}

/// `Li_w(1±i)` as exact level-4 words: pull back along `g(t) = 2t/(t∓i)`
/// (path through the upper/lower half plane); `x₀ ↦ a + b_{3 or 1}`,
/// `x₁ ↦ b_{1 or 3} - b_{3 or 1}`.
pub fn li_one_pm_i_words(bits: &[bool], plus: bool) -> WordPoly {
    let (bnear, bfar) = if plus {
        (Letter::B(3), Letter::B(1))
    } else {
        (Letter::B(1), Letter::B(3))
    };
    let x0 = letter_poly(4, &[(Letter::A, 1), (bnear, 1)]);
    let x1 = letter_poly(4, &[(bfar, 1), (bnear, -1)]);
    substitute_x_word(bits, &x0, &x1)
}

/// `Li_w(-1)` as words: substitute `x₀ ↦ a`, `x₁ ↦ b_{N/2}`.
pub fn li_minus_one_words(bits: &[bool], level: u32) -> WordPoly {
    assert!(level % 2 == 0);
    let x0 = letter_poly(level, &[(Letter::A, 1)]);
    let x1 = letter_poly(level, &[(Letter::B(level / 2), 1)]);
    substitute_x_word(bits, &x0, &x1)
}

/// `Li_w(±i)` as level-4 words: substitute `x₀ ↦ a`, `x₁ ↦ b_{1 or 3}`
/// (pull back along `g(t) = ±i·t`).
pub fn li_pm_i_words(bits: &[bool], plus: bool) -> WordPoly {
    let x0 = letter_poly(4, &[(Letter::A, 1)]);
    let x1 = letter_poly(4, &[(if plus { Letter::B(1) } else { Letter::B(3) }, 1)]);
    substitute_x_word(bits, &x0, &x1)
}

/// Exact word expansion of an atom at a given ambient level, if one exists.
pub fn atom_word_expansion(atom: &Atom, level: u32) -> Option<WordPoly> {
    let zw = |pairs: Vec<(u32, u32)>| ZWord::new(level, pairs).ok().map(|z| z.to_word());
    match atom {
        Atom::Zeta(k) => Some(WordPoly::from_word(zw(vec![(*k, 0)])?)),
        Atom::Log2 if level % 2 == 0 => {
            Some(WordPoly::from_word(zw(vec![(1, level / 2)])?).scale_rat(&BigRat::from(-1)))
        }
        Atom::Pi if level % 4 == 0 => {
            // L₁(i) − L₁(−i) = iπ/2  ⇒  π = -2i (L₁(i) − L₁(-i))
            let q = level / 4;
            let m2i = CycRat::i(level).scale(&BigRat::from(-2));
            let p = WordPoly::from_word(zw(vec![(1, q)])?).scale(&m2i);
            Some(
                p.add(&WordPoly::from_word(zw(vec![(1, 3 * q)])?).scale(&m2i.neg()))
                    .unwrap(),
            )
        }
        Atom::Catalan if level % 4 == 0 => {
            // C = (L₂(i) − L₂(−i)) / (2i)
            let q = level / 4;
            let c = CycRat::i(level).scale(&BigRat::from((-1, 2)));
            let p = WordPoly::from_word(zw(vec![(2, q)])?).scale(&c);
            Some(
                p.add(&WordPoly::from_word(zw(vec![(2, 3 * q)])?).scale(&c.neg()))
                    .unwrap(),
            )
        }
        Atom::Beta(k) if level % 4 == 0 => {
            let q = level / 4;
            let c = CycRat::i(level).scale(&BigRat::from((-1, 2)));
            let p = WordPoly::from_word(zw(vec![(*k, q)])?).scale(&c);
            Some(
                p.add(&WordPoly::from_word(zw(vec![(*k, 3 * q)])?).scale(&c.neg()))
                    .unwrap(),
            )
        }
        Atom::LiHalf(k) if level % 2 == 0 => {
            let mut bits = vec![false; (*k - 1) as usize];
            bits.push(true);
            Some(li_half_words(&bits, level))
        }
        Atom::ImLiPhi(k) if level == 4 => {
            let mut bits = vec![false; (*k - 1) as usize];
            bits.push(true);
            let plus = li_phi_words(&bits, true);
            let minus = li_phi_words(&bits, false);
            let c = CycRat::i(4).scale(&BigRat::from((-1, 2)));
            Some(plus.scale(&c).add(&minus.scale(&c.neg())).unwrap())
        }
        Atom::LConst(t) if level % t.level == 0 => {
            let z = t.to_zword();
            let step = level / t.level;
            let pairs = z.pairs().iter().map(|(s, i)| (*s, i * step)).collect();
            Some(WordPoly::from_word(zw(pairs)?))
        }
        Atom::LiExt(bits, p) => match p {
            ExtPoint::OnePlusI if level == 4 => Some(li_one_pm_i_words(bits, true)),
            ExtPoint::OneMinusI if level == 4 => Some(li_one_pm_i_words(bits, false)),
            _ => None,
        },
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Numeric evaluation.

static ATOM_CACHE: Lazy<Mutex<HashMap<(Atom, u32), ComplexBall>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn x_bits_to_word(bits: &[bool], level: u32) -> Word {
    let letters = bits
        .iter()
        .map(|b| if *b { Letter::B(0) } else { Letter::A })
        .collect();
    Word::new(level, letters).unwrap()
}

/// Regularized constant of `Li_w` at −∞ along the negative real axis:
/// `Σ_r (-1)^r Ł(rev(ι₋(w_{≤r}))) · Li_{w_{>r}}(-1)` with
/// `ι₋: x₀ ↦ -a, x₁ ↦ a + b_{N/2}` (pullback by `x = -1/s`); even level.
pub fn li_reg_minus_inf_words(bits: &[bool], level: u32) -> WordPoly {
    assert!(level % 2 == 0);
    let x0m = letter_poly(level, &[(Letter::A, -1)]);
    let x1m = letter_poly(level, &[(Letter::A, 1), (Letter::B(level / 2), 1)]);
    let mut total = WordPoly::zero(level);
    for r in 0..=bits.len() {
        let mapped = substitute_x_word(&bits[..r], &x0m, &x1m);
        let mut reversed = WordPoly::zero(level);
        for (w, c) in mapped.terms() {
            reversed.add_term(w.reversed(), c.clone());
        }
        let tail = li_minus_one_words(&bits[r..], level);
        // product of two regularized Ł values = Ł of the shuffle
        let prod = crate::words::shuffle(&reversed, &tail).unwrap();
        let signed = if r % 2 == 1 { prod.neg() } else { prod };
        total = total.add(&signed).unwrap();
    }
    total
}

/// Same at +∞, continued from above; real-part convention.
/// Pullback by `x = 1/s`: `ι₊: x₀ ↦ -a, x₁ ↦ a + b₀`.
pub fn li_reg_plus_inf_words(bits: &[bool], level: u32) -> WordPoly {
    let x0m = letter_poly(level, &[(Letter::A, -1)]);
    let x1m = letter_poly(level, &[(Letter::A, 1), (Letter::B(0), 1)]);
    let mut total = WordPoly::zero(level);
    for r in 0..=bits.len() {
        let mapped = substitute_x_word(&bits[..r], &x0m, &x1m);
        let mut reversed = WordPoly::zero(level);
        for (w, c) in mapped.terms() {
            reversed.add_term(w.reversed(), c.clone());
        }
        let tail = WordPoly::from_word(x_bits_to_word(&bits[r..], level));
        let prod = crate::words::shuffle(&reversed, &tail).unwrap();
        let signed = if r % 2 == 1 { prod.neg() } else { prod };
        total = total.add(&signed).unwrap();
    }
    total
}

fn eval_atom(atom: &Atom, prec: u32) -> Result<ComplexBall, ExprError> {
    if let Some(hit) = ATOM_CACHE.lock().unwrap().get(&(atom.clone(), prec)) {
        return Ok(hit.clone());
    }
    let wp = prec + 16;
    let v = match atom {
        Atom::Pi => ComplexBall::pi(wp),
        Atom::Log2 => ComplexBall::log2(wp),
        Atom::Zeta(k) => {
            let z = ZWord::new(1, vec![(*k, 0)]).unwrap();
            numeric::word_integral_01(&z.to_word(), wp)?
        }
        Atom::Catalan => {
            let v = numeric::word_integral_01(&parse_word("a b1", 4).unwrap(), wp)?;
            ComplexBall::from_parts(v.im.clone(), rug::Float::with_val(wp, 0), v.rad.clone())
        }
        Atom::Beta(k) => {
            let z = ZWord::new(4, vec![(*k, 1)]).unwrap();
            let v = numeric::word_integral_01(&z.to_word(), wp)?;
            ComplexBall::from_parts(v.im.clone(), rug::Float::with_val(wp, 0), v.rad.clone())
        }
        Atom::LiHalf(k) => {
            // Σ 2^{-n} n^{-k}, tail ≤ 2^{-M}
            let m = wp + 8;
            let mut acc = ComplexBall::exact_zero(wp);
            let mut pw = BigRat::from(1);
            let half = BigRat::from((1, 2));
            for n in 1..=m as u64 {
                pw = BigRat::from(&pw * &half);
                let t = BigRat::from(&pw / BigRat::from(rug::Integer::from(n).pow(*k)));
                acc = acc.add(&ComplexBall::from_rat(wp, &t));
            }
            acc.inflate(&rug::Float::with_val(32, rug::Float::u_exp(1, -(m as i32))))
        }
        Atom::ImLiPhi(k) => {
            // Σ z^n/n^k at z = (1+i)/2, |z| = 2^{-1/2}
            let m = (2 * wp + 16) as u64;
            let z = CycRat::one(4)
                .add(&CycRat::i(4))
                .unwrap()
                .scale(&BigRat::from((1, 2)));
            let zb = ComplexBall::from_cyc(wp, &z);
            let mut acc = ComplexBall::exact_zero(wp);
            let mut pw = ComplexBall::from_f64(wp, 1.0);
            for n in 1..=m {
                pw = pw.mul(&zb);
                let mut den = ComplexBall::from_f64(wp, n as f64);
                den = den.pow_u32(*k);
                acc = acc.add(&pw.div(&den));
            }
            let acc = acc.inflate(&rug::Float::with_val(
                32,
                rug::Float::u_exp(4, -((m / 2) as i32)),
            ));
            ComplexBall::from_parts(acc.im.clone(), rug::Float::with_val(wp, 0), acc.rad.clone())
        }
        Atom::LConst(t) => {
            let z = t.to_zword();
            numeric::word_integral_01(&z.to_word(), wp)?
        }
        Atom::LiExt(bits, pt) => eval_li_ext(bits, *pt, wp)?,
    };
    let v = v.set_prec(prec);
    ATOM_CACHE
        .lock()
        .unwrap()
        .insert((atom.clone(), prec), v.clone());
    Ok(v)
}

/// Certified value of a single named constant.
pub fn atom_numeric(atom: &Atom, prec: u32) -> Result<ComplexBall, ExprError> {
    eval_atom(atom, prec)
}

fn eval_li_ext(bits: &[bool], pt: ExtPoint, prec: u32) -> Result<ComplexBall, ExprError> {
    match pt {
        ExtPoint::OnePlusI => Ok(numeric::eval_l(&li_one_pm_i_words(bits, true), prec)?),
        ExtPoint::OneMinusI => Ok(numeric::eval_l(&li_one_pm_i_words(bits, false), prec)?),
        ExtPoint::MinusInfinity => Ok(numeric::eval_l(&li_reg_minus_inf_words(bits, 2), prec)?),
        ExtPoint::PlusInfinity => Ok(numeric::eval_l(&li_reg_plus_inf_words(bits, 1), prec)?),
        ExtPoint::Two => {
            // transport along 0 → (11/20)i → i → 2 (upper half plane)
            let word = x_bits_to_word(bits, 1);
            let (sign, poles1) = numeric::word_to_poles(&word);
            let poles: Vec<CycRat> = poles1.iter().map(|c| c.promote(4).unwrap()).collect();
            let wp = prec + 24;
            let anchor = CycRat::i(4).scale(&BigRat::from((11, 20)));
            let start = numeric::suffix_values(&poles, &anchor, wp)?;
            let pole_balls: Vec<ComplexBall> =
                poles.iter().map(|c| ComplexBall::from_cyc(wp, c)).collect();
            let pts = [
                ComplexBall::from_cyc(wp, &anchor),
                ComplexBall::from_cyc(wp, &CycRat::i(4)),
                ComplexBall::from_cyc(wp, &CycRat::one(4).add(&CycRat::i(4)).unwrap()),
                ComplexBall::from_f64(wp, 2.0),
            ];
            let mut t = start;
            for w in pts.windows(2) {
                t = numeric::transport_vector(&pole_balls, &t, &w[0], &w[1], wp)?;
            }
            let v = t[0].set_prec(prec);
            Ok(if sign < 0 { v.neg() } else { v })
        }
    }
}

/// Certified enclosure of a CMZV expression.
pub fn cmzv_numeric(e: &CmzvExpr, precision_bits: u32) -> Result<ComplexBall, ExprError> {
    let wp = precision_bits + 24;
    let mut acc = ComplexBall::exact_zero(wp);
    for (m, c) in e.terms() {
        let mut prod = ComplexBall::from_cyc(wp, c);
        for (f, p) in &m.0 {
            let v = match f {
                Factor::Z(t) => {
                    let z = t.to_zword();
                    numeric::word_integral_01(&z.to_word(), wp)?
                }
                Factor::A(a) => eval_atom(a, wp)?,
            };
            prod = prod.mul(&v.pow_u32(*p));
        }
        acc = acc.add(&prod);
    }
    if e.inv_pi {
        acc = acc.div(&ComplexBall::pi(wp));
    }
    Ok(acc.set_prec(precision_bits))
}

/// Generalized polylogarithm `Li_w(z)` for a word over `{x₀,x₁}` at a
/// point inside the unit disk (or `z = 1` for admissible words).
pub fn li_word(bits: &[bool], z: &CycRat, prec: u32) -> Result<ComplexBall, ExprError> {
    if bits.iter().all(|b| !b) {
        return Err(ExprError::Unsupported(
            "pure x₀ word: use log directly".into(),
        ));
    }
    let level = z.level();
    let one = CycRat::one(level);
    let word = x_bits_to_word(bits, level);
    if z == &one {
        return Ok(numeric::eval_l(&WordPoly::from_word(word), prec)?);
    }
    let zb = ComplexBall::from_cyc(prec + 16, z);
    let za = zb.abs_upper().to_f64();
    if za > 0.999 {
        return Err(ExprError::Unsupported(format!(
            "argument outside supported disk: |z| = {za}"
        )));
    }
    let (sign, poles) = numeric::word_to_poles(&word);
    let v = if za <= 0.6 {
        numeric::suffix_values(&poles, z, prec + 8)?[0].clone()
    } else {
        // series to a shrunken anchor on the same ray, then transport
        let wp = prec + 24;
        let num = (za * 1024.0) as i64;
        let scale = BigRat::from((563, num.max(564))); // ≈ 0.55/|z|
        let anchor = z.scale(&scale);
        let start = numeric::suffix_values(&poles, &anchor, wp)?;
        let pole_balls: Vec<ComplexBall> =
            poles.iter().map(|c| ComplexBall::from_cyc(wp, c)).collect();
        let t = numeric::transport_vector(
            &pole_balls,
            &start,
            &ComplexBall::from_cyc(wp, &anchor),
            &ComplexBall::from_cyc(wp, z),
            wp,
        )?;
        t[0].clone()
    };
    Ok(if sign < 0 { v.neg() } else { v }.set_prec(prec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dictionary_examples() {
        // N=2: a²b₀b₁ = z_{3,0}z_{1,1} → L_{3,1}(1,-1) = ζ(3, bar 1)
        let z = ZWord::new(2, vec![(3, 0), (1, 1)]).unwrap();
        let t = CmzvTerm::from_zword(&z).unwrap();
        assert_eq!(t.exps, vec![3, 1]);
        assert_eq!(t.colors, vec![0, 1]);
        assert_eq!(t.to_string(), "zeta(3,bar 1)");
        assert_eq!(t.to_zword(), z);
        // N=1: a²b₀b₀ → ζ(3,1)
        let z = ZWord::new(1, vec![(3, 0), (1, 0)]).unwrap();
        let t = CmzvTerm::from_zword(&z).unwrap();
        assert_eq!(t.to_string(), "zeta(3,1)");
        // N=4: z_{4,1}z_{1,0} → L_{4,1}(i, -i)
        let z = ZWord::new(4, vec![(4, 1), (1, 0)]).unwrap();
        let t = CmzvTerm::from_zword(&z).unwrap();
        assert_eq!(t.colors, vec![1, 3]);
        assert_eq!(t.to_string(), "L[{4,1},{i,-i}]");
    }

    #[test]
    fn roundtrip_words() {
        for level in [1u32, 2, 4] {
            for z in crate::words::zwords_of_weight(level, 4) {
                if !z.is_admissible() {
                    continue;
                }
                let t = CmzvTerm::from_zword(&z).unwrap();
                assert_eq!(t.to_zword(), z);
            }
        }
    }

    #[test]
    fn zeta2_numeric() {
        let e = word_to_cmzv(&ZWord::new(1, vec![(2, 0)]).unwrap()).unwrap();
        let v = cmzv_numeric(&e, 170).unwrap();
        let pi = ComplexBall::pi(200);
        let target = pi.mul(&pi).mul_rat(&BigRat::from((1, 6)));
        assert!(v.overlaps(&target));
        assert!(v.rad_f64() < 1e-50, "rad = {}", v.rad_f64());
    }

    #[test]
    fn li_half_word_expansion_matches_series() {
        // Li₂(1/2) = π²/12 − log²2/2 via the exact level-2 word expansion
        let p = li_half_words(&[false, true], 2);
        let v = numeric::eval_l(&p, 96).unwrap();
        let pi = ComplexBall::pi(120);
        let l2 = ComplexBall::log2(120);
        let target = pi
            .mul(&pi)
            .mul_rat(&BigRat::from((1, 12)))
            .sub(&l2.mul(&l2).mul_rat(&BigRat::from((1, 2))));
        assert!(v.overlaps(&target));
        let s = eval_atom(&Atom::LiHalf(2), 96).unwrap();
        assert!(v.overlaps(&s));
        // Li₄(1/2) expansion against the direct series
        let p = li_half_words(&[false, false, false, true], 2);
        let v = numeric::eval_l(&p, 96).unwrap();
        let s = eval_atom(&Atom::LiHalf(4), 96).unwrap();
        assert!(v.overlaps(&s));
        assert!(v.rad_f64() < 1e-25);
    }

    #[test]
    fn im_li_phi_expansion_matches_series() {
        let a = Atom::ImLiPhi(3);
        let series = eval_atom(&a, 120).unwrap();
        let words = atom_word_expansion(&a, 4).unwrap();
        let via_words = numeric::eval_l(&words, 120).unwrap();
        assert!(series.overlaps(&via_words));
        assert!(series.rad_f64() < 1e-30);
        assert!(via_words.im.to_f64().abs() < 1e-25);
    }

    #[test]
    fn beta_and_catalan() {
        let c = eval_atom(&Atom::Catalan, 96).unwrap();
        assert!((c.re.to_f64() - 0.9159655941772190150546).abs() < 1e-15);
        let b4 = eval_atom(&Atom::Beta(4), 96).unwrap();
        assert!((b4.re.to_f64() - 0.9889445517411053361084).abs() < 1e-15);
    }

    #[test]
    fn example_3_2_closed_form() {
        // ζ(3,1̄) + ζ(3̄,1̄) = −(2Li₄(1/2) + (7/4)ζ(3)log2 − 3π⁴/160
        //                       + log⁴2/12 − π²log²2/12)
        let prec = 140u32;
        let t1 = CmzvTerm::new(2, vec![3, 1], vec![0, 1]);
        let t2 = CmzvTerm::new(2, vec![3, 1], vec![1, 1]);
        let mut e = CmzvExpr::zero(2);
        e.add_term(Monomial::term(t1), CycRat::one(2));
        e.add_term(Monomial::term(t2), CycRat::one(2));
        let lhs = cmzv_numeric(&e, prec).unwrap();

        let li4 = eval_atom(&Atom::LiHalf(4), prec).unwrap();
        let z3 = eval_atom(&Atom::Zeta(3), prec).unwrap();
        let l2 = ComplexBall::log2(prec);
        let pi = ComplexBall::pi(prec);
        let pi2 = pi.mul(&pi);
        let pi4 = pi2.mul(&pi2);
        let l2sq = l2.mul(&l2);
        let rhs = li4
            .mul_rat(&BigRat::from(2))
            .add(&z3.mul(&l2).mul_rat(&BigRat::from((7, 4))))
            .sub(&pi4.mul_rat(&BigRat::from((3, 160))))
            .add(&l2sq.mul(&l2sq).mul_rat(&BigRat::from((1, 12))))
            .sub(&pi2.mul(&l2sq).mul_rat(&BigRat::from((1, 12))))
            .neg();
        assert!(lhs.overlaps(&rhs));
        assert!(lhs.rad_f64() < 1e-38, "rad {}", lhs.rad_f64());
        assert!((lhs.re.to_f64() - rhs.re.to_f64()).abs() < 1e-14);
    }

    #[test]
    fn li_word_values() {
        // Li_{x₀x₁}(1/2) = Li₂(1/2)
        let half = CycRat::from_frac(1, 1, 2);
        let v = li_word(&[false, true], &half, 96).unwrap();
        let s = eval_atom(&Atom::LiHalf(2), 96).unwrap();
        assert!(v.overlaps(&s));
        // Li_{x₁}(3/10) = −log(7/10)
        let z = CycRat::from_frac(1, 3, 10);
        let v = li_word(&[true], &z, 96).unwrap();
        assert!((v.re.to_f64() + (0.7f64).ln()).abs() < 1e-15);
        // boundary admissible: Li_{x₀²x₁}(1) = ζ(3)
        let one = CycRat::one(1);
        let v = li_word(&[false, false, true], &one, 96).unwrap();
        let z3 = eval_atom(&Atom::Zeta(3), 96).unwrap();
        assert!(v.overlaps(&z3));
    }

    #[test]
    fn reg_li2_at_infinities() {
        // Li₂ at −∞: constant term −π²/6; at +∞ (real part): +π²/3
        let m = eval_li_ext(&[false, true], ExtPoint::MinusInfinity, 96).unwrap();
        let pi2 = ComplexBall::pi(120).pow_u32(2);
        assert!(m.overlaps(&pi2.mul_rat(&BigRat::from((-1, 6)))));
        let p = eval_li_ext(&[false, true], ExtPoint::PlusInfinity, 96).unwrap();
        assert!(p.overlaps(&pi2.mul_rat(&BigRat::from((1, 3)))));
    }

    #[test]
    fn li_at_two_and_one_plus_i() {
        // Li₂(2) = π²/4 + iπ log 2 when continued through the upper
        // half plane (the lower path gives the conjugate)
        let v = eval_li_ext(&[false, true], ExtPoint::Two, 96).unwrap();
        let pi = ComplexBall::pi(120);
        let want_re = pi.mul(&pi).mul_rat(&BigRat::from((1, 4)));
        let want_im = pi.mul(&ComplexBall::log2(120));
        assert!(
            (v.re.to_f64() - want_re.re.to_f64()).abs() < 1e-14,
            "re {}",
            v.re.to_f64()
        );
        assert!((v.im.to_f64() - want_im.re.to_f64()).abs() < 1e-14);
        // Li₁(1+i) = −log(−i) = iπ/2
        let v = eval_li_ext(&[true], ExtPoint::OnePlusI, 96).unwrap();
        assert!(v.re.to_f64().abs() < 1e-20);
        assert!((v.im.to_f64() - std::f64::consts::PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn expr_algebra() {
        let z3 = CmzvExpr::from_monomial(1, Monomial::atom(Atom::Zeta(3)), CycRat::one(1));
        let pi = CmzvExpr::from_monomial(1, Monomial::atom(Atom::Pi), CycRat::one(1));
        let prod = z3.mul(&pi).unwrap().scale_rat(&BigRat::from((2, 3)));
        assert_eq!(prod.weight(), Some(4));
        let sum = prod.add(&prod).unwrap();
        assert_eq!(sum.num_terms(), 1);
        let zero = sum.sub(&sum).unwrap();
        assert!(zero.is_zero());
    }
}
