//! Admissible rational functions and their dlog decompositions.
//!
//! `R(x)` is N-admissible when both `R` and `1-R` factor as
//! `C·x^d·Π_{i<N}(x-μ^i)^{c_i}`.  Factorization is by trial division by
//! `x` and the linear factors `x-μ^i` with exact remainder checks — the
//! only factors that can occur in an admissible function, so no general
//! factorization is needed.  The logarithmic derivatives then live in the
//! span of the letters: `dx/x = a` and `dx/(x-μ^i) = -b_{-i mod N}`.

use crate::scalars::{BigRat, CycRat};
use crate::words::{Letter, Word, WordPoly};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RatFunError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("not {level}-admissible: irreducible factor {factor} in {side}")]
    NotAdmissible {
        level: u32,
        factor: String,
        side: String,
    },
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),
    #[error("function has a pole in (0,1): {0}")]
    PoleInUnitInterval(String),
}

/// Dense polynomial over `Q(μ_N)`, constant coefficient first.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    level: u32,
    coeffs: Vec<CycRat>,
}

impl Poly {
    pub fn new(level: u32, mut coeffs: Vec<CycRat>) -> Self {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        Poly { level, coeffs }
    }

    pub fn zero(level: u32) -> Self {
        Poly {
            level,
            coeffs: vec![],
        }
    }

    pub fn constant(c: CycRat) -> Self {
        Poly::new(c.level(), vec![c])
    }

    pub fn x(level: u32) -> Self {
        Poly::new(level, vec![CycRat::zero(level), CycRat::one(level)])
    }

    /// From integer coefficients, constant first.
    pub fn from_ints(level: u32, cs: &[i64]) -> Self {
        Poly::new(
            level,
            cs.iter().map(|k| CycRat::from_int(level, *k)).collect(),
        )
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coeffs(&self) -> &[CycRat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Option<&CycRat> {
        self.coeffs.last()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut out = vec![CycRat::zero(self.level); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] = out[i].add(c).unwrap();
        }
        for (i, c) in o.coeffs.iter().enumerate() {
            out[i] = out[i].add(c).unwrap();
        }
        Poly::new(self.level, out)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(self.level);
        }
        let mut out = vec![CycRat::zero(self.level); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b).unwrap()).unwrap();
            }
        }
        Poly::new(self.level, out)
    }

    pub fn scale(&self, c: &CycRat) -> Poly {
        Poly::new(
            self.level,
            self.coeffs.iter().map(|k| k.mul(c).unwrap()).collect(),
        )
    }

    pub fn divmod(&self, den: &Poly) -> (Poly, Poly) {
        assert!(!den.is_zero());
        let mut rem = self.clone();
        if rem.degree() < den.degree() || rem.is_zero() {
            return (Poly::zero(self.level), rem);
        }
        let lead = den.leading().unwrap().clone();
        let qd = rem.degree() - den.degree();
        let mut quot = vec![CycRat::zero(self.level); qd + 1];
        for k in (0..=qd).rev() {
            if rem.coeffs.len() <= k + den.degree() {
                continue;
            }
            let c = rem.coeffs[k + den.degree()].div(&lead).unwrap();
            if c.is_zero() {
                continue;
            }
            for (j, d) in den.coeffs.iter().enumerate() {
                let t = d.mul(&c).unwrap();
                rem.coeffs[k + j] = rem.coeffs[k + j].sub(&t).unwrap();
            }
            quot[k] = c;
        }
        (
            Poly::new(self.level, quot),
            Poly::new(self.level, rem.coeffs),
        )
    }

    pub fn gcd(&self, o: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(&b);
            a = b;
            b = r;
        }
        if let Some(l) = a.leading() {
            let inv = l.inv().unwrap();
            a = a.scale(&inv);
        }
        a
    }

    pub fn eval(&self, x: &CycRat) -> CycRat {
        let mut acc = CycRat::zero(self.level);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).unwrap().add(c).unwrap();
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero(self.level);
        }
        Poly::new(
            self.level,
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, c)| c.scale(&BigRat::from((k + 1) as u64)))
                .collect(),
        )
    }

    pub fn promote(&self, m: u32) -> Poly {
        Poly::new(
            m,
            self.coeffs.iter().map(|c| c.promote(m).unwrap()).collect(),
        )
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = crate::scalars::cyc_pretty(c);
            match k {
                0 => write!(f, "{cs}")?,
                1 => write!(f, "{cs}*x")?,
                _ => write!(f, "{cs}*x^{k}")?,
            }
        }
        Ok(())
    }
}

/// Rational function `num/den` in lowest terms with monic denominator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    pub fn new(num: Poly, den: Poly) -> Result<Self, RatFunError> {
        if den.is_zero() {
            return Err(RatFunError::DivisionByZero);
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.degree() > 0 {
            (num.divmod(&g).0, den.divmod(&g).0)
        } else {
            (num, den)
        };
        let lead = den.leading().unwrap().inv().unwrap();
        num = num.scale(&lead);
        den = den.scale(&lead);
        Ok(RatFun { num, den })
    }

    pub fn from_poly(p: Poly) -> Self {
        let level = p.level();
        RatFun {
            num: p,
            den: Poly::constant(CycRat::one(level)),
        }
    }

    pub fn x(level: u32) -> Self {
        Self::from_poly(Poly::x(level))
    }

    pub fn constant(c: CycRat) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn level(&self) -> u32 {
        self.num.level()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &RatFun) -> RatFun {
        RatFun::new(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
        .unwrap()
    }

    pub fn neg(&self) -> RatFun {
        RatFun {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &RatFun) -> RatFun {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFun) -> RatFun {
        RatFun::new(self.num.mul(&o.num), self.den.mul(&o.den)).unwrap()
    }

    pub fn div(&self, o: &RatFun) -> Result<RatFun, RatFunError> {
        if o.is_zero() {
            return Err(RatFunError::DivisionByZero);
        }
        Ok(RatFun::new(self.num.mul(&o.den), self.den.mul(&o.num)).unwrap())
    }

    pub fn one_minus(&self) -> RatFun {
        RatFun::new(self.den.sub(&self.num), self.den.clone()).unwrap()
    }

    /// Substitute another rational function for `x`:
    /// `p(n/d) = (Σ p_k n^k d^{deg-k}) / d^{deg}` on both layers.
    pub fn compose(&self, inner: &RatFun) -> RatFun {
        let level = self.level();
        let deg = self.num.degree().max(self.den.degree());
        let eval_poly = |p: &Poly| -> Poly {
            let mut acc = Poly::zero(level);
            let mut npow = Poly::constant(CycRat::one(level));
            let mut terms: Vec<Poly> = Vec::with_capacity(deg + 1);
            for k in 0..=deg {
                let c = p
                    .coeffs()
                    .get(k)
                    .cloned()
                    .unwrap_or_else(|| CycRat::zero(level));
                terms.push(Poly::constant(c).mul(&npow));
                npow = npow.mul(&inner.num);
            }
            let mut dpow = Poly::constant(CycRat::one(level));
            for term in terms.iter().rev() {
                acc = acc.add(&term.mul(&dpow));
                dpow = dpow.mul(&inner.den);
            }
            acc
        };
        RatFun::new(eval_poly(&self.num), eval_poly(&self.den)).unwrap()
    }

    /// Evaluate at an exact point; `None` at a pole.
    pub fn eval(&self, x: &CycRat) -> Option<CycRat> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(x).div(&d).unwrap())
    }

    pub fn promote(&self, m: u32) -> RatFun {
        RatFun {
            num: self.num.promote(m),
            den: self.den.promote(m),
        }
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == 0 && self.den.coeffs()[0] == CycRat::one(self.level()) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// `C·x^d·Π(x-μ^i)^{c_i}` — the admissibility certificate for one side.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FactoredRational {
    pub level: u32,
    pub constant: CycRat,
    pub x_exp: i64,
    pub root_exps: Vec<i64>,
}

impl FactoredRational {
    pub fn to_ratfun(&self) -> RatFun {
        let level = self.level;
        let mut num = Poly::constant(self.constant.clone());
        let mut den = Poly::constant(CycRat::one(level));
        let mut apply = |p: Poly, e: i64, num: &mut Poly, den: &mut Poly| {
            for _ in 0..e.abs() {
                if e > 0 {
                    *num = num.mul(&p);
                } else {
                    *den = den.mul(&p);
                }
            }
        };
        apply(Poly::x(level), self.x_exp, &mut num, &mut den);
        for (i, e) in self.root_exps.iter().enumerate() {
            let root = Poly::new(
                level,
                vec![
                    CycRat::root_of_unity(level, i as i64).neg(),
                    CycRat::one(level),
                ],
            );
            apply(root, *e, &mut num, &mut den);
        }
        RatFun::new(num, den).unwrap()
    }

    /// Total degree of numerator minus denominator.
    pub fn degree_at_infinity(&self) -> i64 {
        self.x_exp + self.root_exps.iter().sum::<i64>()
    }

    /// Value at 0 classified as 0 / finite / ∞.
    pub fn value_at_zero(&self) -> ZeroValue {
        if self.x_exp > 0 {
            return ZeroValue::Zero;
        }
        // C·Π(-μ^i)^{c_i}
        let mut v = self.constant.clone();
        for (i, e) in self.root_exps.iter().enumerate() {
            let r = CycRat::root_of_unity(self.level, i as i64).neg();
            v = v.mul(&r.pow_i64(*e).unwrap()).unwrap();
        }
        if self.x_exp == 0 {
            ZeroValue::Finite(v)
        } else {
            ZeroValue::Infinite(v)
        }
    }
}

/// `R(0)` classification; the infinite case carries the coefficient of the
/// leading negative power (its sign fixes the approach direction).
#[derive(Clone, Debug, PartialEq)]
pub enum ZeroValue {
    Zero,
    Finite(CycRat),
    Infinite(CycRat),
}

impl fmt::Display for FactoredRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::scalars::cyc_pretty(&self.constant))?;
        if self.x_exp != 0 {
            write!(f, " * x^{}", self.x_exp)?;
        }
        for (i, e) in self.root_exps.iter().enumerate() {
            if *e != 0 {
                write!(f, " * (x - mu^{i})^{e}")?;
            }
        }
        Ok(())
    }
}

/// Certified pair `(R, 1-R)`, both factored over `{x, x-μ^i}`.
#[derive(Clone, Debug)]
pub struct AdmissiblePair {
    pub r: FactoredRational,
    pub one_minus_r: FactoredRational,
}

/// Factor a polynomial by trial division over `{x, x-μ^i}`.
fn factor_poly(p: &Poly, level: u32) -> Result<(CycRat, i64, Vec<i64>), Poly> {
    let mut rest = p.clone();
    let mut x_exp = 0i64;
    let mut root_exps = vec![0i64; level as usize];
    let x = Poly::x(level);
    loop {
        if rest.degree() == 0 {
            break;
        }
        if rest.coeffs()[0].is_zero() {
            rest = rest.divmod(&x).0;
            x_exp += 1;
            continue;
        }
        let mut divided = false;
        for i in 0..level {
            let mu = CycRat::root_of_unity(level, i as i64);
            if rest.eval(&mu).is_zero() {
                let lin = Poly::new(level, vec![mu.neg(), CycRat::one(level)]);
                rest = rest.divmod(&lin).0;
                root_exps[i as usize] += 1;
                divided = true;
                break;
            }
        }
        if !divided {
            return Err(rest);
        }
    }
    Ok((rest.coeffs()[0].clone(), x_exp, root_exps))
}

fn factor_ratfun(r: &RatFun, level: u32) -> Result<FactoredRational, Poly> {
    let (cn, xn, rn) = factor_poly(r.num(), level)?;
    let (cd, xd, rd) = factor_poly(r.den(), level)?;
    Ok(FactoredRational {
        level,
        constant: cn.div(&cd).unwrap(),
        x_exp: xn - xd,
        root_exps: rn.iter().zip(&rd).map(|(a, b)| a - b).collect(),
    })
}

/// Certify `p/q` as N-admissible, or name the offending factor.
pub fn certify_admissible(p: &Poly, q: &Poly, level: u32) -> Result<AdmissiblePair, RatFunError> {
    if q.is_zero() {
        return Err(RatFunError::DivisionByZero);
    }
    let r = RatFun::new(p.clone(), q.clone()).unwrap();
    let fr = factor_ratfun(&r, level).map_err(|f| RatFunError::NotAdmissible {
        level,
        factor: f.to_string(),
        side: "R".to_string(),
    })?;
    let omr = r.one_minus();
    let fomr = factor_ratfun(&omr, level).map_err(|f| RatFunError::NotAdmissible {
        level,
        factor: f.to_string(),
        side: "1-R".to_string(),
    })?;
    debug_assert_eq!(fr.to_ratfun(), r);
    debug_assert_eq!(fomr.to_ratfun(), omr);
    Ok(AdmissiblePair {
        r: fr,
        one_minus_r: fomr,
    })
}

/// Letter combination of a dlog form, as a single-letter word polynomial.
fn dlog_of_factored(f: &FactoredRational) -> WordPoly {
    let level = f.level;
    let mut out = WordPoly::zero(level);
    if f.x_exp != 0 {
        out.add_term(
            Word::new(level, vec![Letter::A]).unwrap(),
            CycRat::from_int(level, f.x_exp),
        );
    }
    for (i, e) in f.root_exps.iter().enumerate() {
        if *e == 0 {
            continue;
        }
        // dx/(x-μ^i) = -b_{-i mod N}
        let idx = ((level as i64 - i as i64) % level as i64) as u32;
        out.add_term(
            Word::new(level, vec![Letter::B(idx % level)]).unwrap(),
            CycRat::from_int(level, -e),
        );
    }
    out
}

/// The two letter forms of the dlog decomposition:
/// `R'/R dx` and `R'/(1-R) dx = -(1-R)'/(1-R) dx`.
pub fn dlog_forms(pair: &AdmissiblePair) -> (WordPoly, WordPoly) {
    let f_r = dlog_of_factored(&pair.r);
    let f_omr = dlog_of_factored(&pair.one_minus_r).neg();
    (f_r, f_omr)
}

// ---------------------------------------------------------------------------
// S₃ × S₄ orbits of 4-admissible functions.

/// The six argument maps `{R, 1-R, R/(R-1), 1/R, (R-1)/R, 1/(1-R)}`.
pub fn s3_images(r: &RatFun) -> Vec<RatFun> {
    let one = RatFun::constant(CycRat::one(r.level()));
    let one_minus = r.neg().add(&one);
    let mut out = vec![r.clone(), one_minus.clone()];
    if !one_minus.is_zero() {
        out.push(r.div(&one_minus).unwrap().neg()); // R/(R-1)
        out.push(one.div(&one_minus).unwrap()); // 1/(1-R)
    }
    if !r.is_zero() {
        out.push(one.div(r).unwrap()); // 1/R
        out.push(one_minus.div(r).unwrap().neg()); // (R-1)/R
    }
    out
}

/// The 24 Möbius transformations permuting `{0, ∞, ±1, ±i}` (the rotation
/// group of the octahedron), generated by closure from `ix`, `1/x` and
/// `(1-x)/(1+x)`.
pub fn s4_mobius(level: u32) -> Vec<RatFun> {
    assert!(level % 4 == 0);
    let i = CycRat::i(level);
    let one = CycRat::one(level);
    let gens = [
        RatFun::new(
            Poly::new(level, vec![CycRat::zero(level), i]),
            Poly::constant(one.clone()),
        )
        .unwrap(),
        RatFun::new(Poly::constant(one.clone()), Poly::x(level)).unwrap(),
        RatFun::new(
            Poly::new(level, vec![one.clone(), one.neg()]),
            Poly::new(level, vec![one.clone(), one.clone()]),
        )
        .unwrap(),
    ];
    let mut group: BTreeMap<String, RatFun> = BTreeMap::new();
    let id = RatFun::x(level);
    group.insert(canonical_key(&id), id);
    loop {
        let mut added = false;
        let current: Vec<RatFun> = group.values().cloned().collect();
        for g in &current {
            for h in &gens {
                let gh = g.compose(h);
                if group.insert(canonical_key(&gh), gh).is_none() {
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    let out: Vec<RatFun> = group.into_values().collect();
    assert_eq!(out.len(), 24);
    out
}

/// Does a Möbius map permute `{0, ∞, 1, -1, i, -i}`?
pub fn permutes_octahedron(h: &RatFun) -> bool {
    let level = h.level();
    let pts: Vec<Option<CycRat>> = vec![
        Some(CycRat::zero(level)),
        None, // ∞
        Some(CycRat::one(level)),
        Some(CycRat::one(level).neg()),
        Some(CycRat::i(level)),
        Some(CycRat::i(level).neg()),
    ];
    let mut seen = Vec::new();
    for p in &pts {
        let img = match p {
            Some(x) => h.eval(x),
            None => {
                if h.num().degree() > h.den().degree() {
                    None
                } else {
                    Some(
                        h.num()
                            .coeffs()
                            .get(h.den().degree())
                            .cloned()
                            .unwrap_or_else(|| CycRat::zero(level))
                            .div(h.den().leading().unwrap())
                            .unwrap(),
                    )
                }
            }
        };
        if !pts.contains(&img) || seen.contains(&img) {
            return false;
        }
        seen.push(img);
    }
    true
}

/// All distinct `g·R(h^{-1}x)` for `(g,h) ∈ S₃×S₄`, deduplicated by exact
/// rational-function identity (not by evaluation at a sample point).
pub fn s3s4_orbit(r: &RatFun) -> Vec<RatFun> {
    let level = r.level();
    assert!(level % 4 == 0, "the octahedral orbit lives at level 4");
    let mut set: BTreeMap<String, RatFun> = BTreeMap::new();
    for h in s4_mobius(level) {
        let composed = r.compose(&h);
        for g in s3_images(&composed) {
            set.entry(canonical_key(&g)).or_insert(g);
        }
    }
    set.into_values().collect()
}

fn canonical_key(r: &RatFun) -> String {
    format!("{}|{}", r.num(), r.den())
}

// ---------------------------------------------------------------------------
// Endpoint catalog.

/// A point of `C^N = {R(0)}`: finite exact value or ∞.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CatalogPoint {
    Finite(CycRat),
    Infinity,
}

impl fmt::Display for CatalogPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogPoint::Finite(c) => write!(f, "{}", crate::scalars::cyc_pretty(c)),
            CatalogPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// The pinned endpoint sets `C^1 ⊂ C^2 ⊂ C^4` (membership beyond these is
/// rejected rather than guessed).
pub fn endpoint_catalog(level: u32) -> Vec<CatalogPoint> {
    let mut out = vec![
        CatalogPoint::Finite(CycRat::zero(level)),
        CatalogPoint::Finite(CycRat::one(level)),
        CatalogPoint::Infinity,
    ];
    if level % 2 == 0 {
        out.push(CatalogPoint::Finite(CycRat::from_frac(level, 1, 2)));
        out.push(CatalogPoint::Finite(CycRat::from_int(level, 2)));
        // S₃-closure of the pinned set: 1/2 ↦ (1/2)/(1/2 - 1) = -1,
        // realized by R = (x-1)/(x+1)
        out.push(CatalogPoint::Finite(CycRat::from_int(level, -1)));
    }
    if level % 4 == 0 {
        let i = CycRat::i(level);
        let one = CycRat::one(level);
        for v in [
            i.clone(),
            i.neg(),
            one.add(&i).unwrap(),
            one.sub(&i).unwrap(),
            one.add(&i).unwrap().scale(&BigRat::from((1, 2))),
            one.sub(&i).unwrap().scale(&BigRat::from((1, 2))),
        ] {
            out.push(CatalogPoint::Finite(v));
        }
    }
    out
}

/// The six S₃ argument maps on catalog points (∞ handled projectively).
pub fn s3_point_images(p: &CatalogPoint, level: u32) -> Vec<CatalogPoint> {
    let one = CycRat::one(level);
    match p {
        CatalogPoint::Infinity => vec![
            CatalogPoint::Infinity,
            CatalogPoint::Finite(CycRat::zero(level)),
            CatalogPoint::Finite(one),
        ],
        CatalogPoint::Finite(c) => {
            let mut out = vec![
                CatalogPoint::Finite(c.clone()),
                CatalogPoint::Finite(one.sub(c).unwrap()),
            ];
            if c.is_zero() {
                out.push(CatalogPoint::Infinity);
            } else {
                out.push(CatalogPoint::Finite(one.div(c).unwrap()));
                out.push(CatalogPoint::Finite(c.sub(&one).unwrap().div(c).unwrap()));
            }
            let cm1 = c.sub(&one).unwrap();
            if cm1.is_zero() {
                out.push(CatalogPoint::Infinity);
            } else {
                out.push(CatalogPoint::Finite(c.div(&cm1).unwrap()));
                out.push(CatalogPoint::Finite(one.div(&cm1).unwrap().neg()));
            }
            out
        }
    }
}

/// `ω(c) = dx/(x-c)`: a pole tag with the invariant that the pole is not
/// inside the open unit interval.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OmegaForm {
    pub pole: CycRat,
}

impl OmegaForm {
    pub fn new(pole: CycRat) -> Result<Self, RatFunError> {
        if let Ok(q) = pole.to_rat() {
            if q > 0 && q < 1 {
                return Err(RatFunError::PoleInUnitInterval(q.to_string()));
            }
        }
        Ok(OmegaForm { pole })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratfun(level: u32, num: &[i64], den: &[i64]) -> (Poly, Poly) {
        (Poly::from_ints(level, num), Poly::from_ints(level, den))
    }

    #[test]
    fn certify_paper_examples() {
        // 4x/(1+x)² at N=2: 1-R = (1-x)²/(1+x)²
        let (p, q) = ratfun(2, &[0, 4], &[1, 2, 1]);
        let pair = certify_admissible(&p, &q, 2).unwrap();
        assert_eq!(pair.r.x_exp, 1);
        assert_eq!(pair.r.root_exps, vec![0, -2]);
        assert_eq!(pair.one_minus_r.root_exps, vec![2, -2]);
        // 2x/(1+x)² at N=4: 1-R = (1+x²)/(1+x)²
        let (p, q) = ratfun(4, &[0, 2], &[1, 2, 1]);
        let pair = certify_admissible(&p, &q, 4).unwrap();
        assert_eq!(pair.one_minus_r.root_exps, vec![0, 1, -2, 1]);
        // x at any level: 1-R = -(x-1)
        let (p, q) = ratfun(1, &[0, 1], &[1]);
        let pair = certify_admissible(&p, &q, 1).unwrap();
        assert_eq!(pair.one_minus_r.constant, CycRat::from_int(1, -1));
        assert_eq!(pair.one_minus_r.root_exps, vec![1]);
    }

    #[test]
    fn rejection_names_factor() {
        // x³ at level 2: 1-x³ contains the factor x²+x+1
        let (p, q) = ratfun(2, &[0, 0, 0, 1], &[1]);
        let err = certify_admissible(&p, &q, 2).unwrap_err();
        match err {
            RatFunError::NotAdmissible { factor, side, .. } => {
                assert_eq!(side, "1-R");
                assert!(factor.contains("x^2"), "factor: {factor}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dlog_paper_examples() {
        use crate::words::parse_word;
        let wp = |s: &str, lv| WordPoly::from_word(parse_word(s, lv).unwrap());
        // R = 4x/(1+x)² at N=2: R'/R ↔ a + 2b₁, R'/(1-R) ↔ 2b₀ - 2b₁
        let (p, q) = ratfun(2, &[0, 4], &[1, 2, 1]);
        let pair = certify_admissible(&p, &q, 2).unwrap();
        let (fr, fomr) = dlog_forms(&pair);
        let expect_fr = wp("a", 2)
            .add(&wp("b1", 2).scale_rat(&BigRat::from(2)))
            .unwrap();
        assert_eq!(fr, expect_fr);
        let expect_fomr = wp("b0", 2)
            .scale_rat(&BigRat::from(2))
            .add(&wp("b1", 2).scale_rat(&BigRat::from(-2)))
            .unwrap();
        assert_eq!(fomr, expect_fomr);
        // R = -1/x: R'/R ↔ -a, R'/(1-R) ↔ a + b₁
        let (p, q) = ratfun(2, &[-1], &[0, 1]);
        let pair = certify_admissible(&p, &q, 2).unwrap();
        let (fr, fomr) = dlog_forms(&pair);
        assert_eq!(fr, wp("a", 2).neg());
        assert_eq!(fomr, wp("a", 2).add(&wp("b1", 2)).unwrap());
        // R = x: R'/R ↔ a, R'/(1-R) ↔ b₀
        let (p, q) = ratfun(1, &[0, 1], &[1]);
        let pair = certify_admissible(&p, &q, 1).unwrap();
        let (fr, fomr) = dlog_forms(&pair);
        assert_eq!(fr, wp("a", 1));
        assert_eq!(fomr, wp("b0", 1));
    }

    #[test]
    fn dlog_recombines_to_derivative() {
        let (p, q) = ratfun(4, &[0, 2], &[1, 2, 1]);
        let pair = certify_admissible(&p, &q, 4).unwrap();
        let r = RatFun::new(p, q).unwrap();
        let rp = RatFun::new(
            r.num()
                .derivative()
                .mul(r.den())
                .sub(&r.num().mul(&r.den().derivative())),
            r.den().mul(r.den()),
        )
        .unwrap();
        let dlog = rp.div(&r).unwrap();
        let (fr, _) = dlog_forms(&pair);
        let mut acc = RatFun::constant(CycRat::zero(4));
        for (w, c) in fr.terms() {
            let f = match w.letters()[0] {
                Letter::A => {
                    RatFun::new(Poly::constant(CycRat::one(4)), Poly::x(4)).unwrap()
                }
                Letter::B(i) => RatFun::new(
                    Poly::constant(CycRat::one(4)),
                    Poly::new(
                        4,
                        vec![
                            CycRat::root_of_unity(4, -(i as i64)),
                            CycRat::one(4).neg(),
                        ],
                    ),
                )
                .unwrap(),
            };
            acc = acc.add(&f.mul(&RatFun::constant(c.clone())));
        }
        assert_eq!(acc, dlog);
    }

    #[test]
    fn s4_table_is_the_octahedral_group() {
        let maps = s4_mobius(4);
        assert_eq!(maps.len(), 24);
        let mut keys = std::collections::BTreeSet::new();
        for h in &maps {
            assert!(permutes_octahedron(h), "does not permute: {h}");
            keys.insert(canonical_key(h));
        }
        assert_eq!(keys.len(), 24, "duplicates in the table");
    }

    #[test]
    fn orbit_sizes_match_reference_table() {
        let x = RatFun::x(4);
        assert_eq!(s3s4_orbit(&x).len(), 72);
        let x2 = x.mul(&x);
        assert_eq!(s3s4_orbit(&x2).len(), 36);
        let x4 = x2.mul(&x2);
        assert_eq!(s3s4_orbit(&x4).len(), 18);
        // (x²+1)/(2x)
        let r = RatFun::new(Poly::from_ints(4, &[1, 0, 1]), Poly::from_ints(4, &[0, 2])).unwrap();
        assert_eq!(s3s4_orbit(&r).len(), 36);
        // 4x²/(1+x²)²
        let r = RatFun::new(
            Poly::from_ints(4, &[0, 0, 4]),
            Poly::from_ints(4, &[1, 0, 2, 0, 1]),
        )
        .unwrap();
        assert_eq!(s3s4_orbit(&r).len(), 6);
    }

    #[test]
    fn orbits_all_admissible_and_endpoints_in_catalog() {
        let x2 = RatFun::x(4).mul(&RatFun::x(4));
        let catalog = endpoint_catalog(4);
        for g in s3s4_orbit(&x2) {
            let pair = certify_admissible(g.num(), g.den(), 4).unwrap();
            let v = match pair.r.value_at_zero() {
                ZeroValue::Zero => CatalogPoint::Finite(CycRat::zero(4)),
                ZeroValue::Finite(c) => CatalogPoint::Finite(c),
                ZeroValue::Infinite(_) => CatalogPoint::Infinity,
            };
            assert!(catalog.contains(&v), "endpoint {v} outside catalog");
        }
    }

    #[test]
    fn catalog_closed_under_s3() {
        for level in [1u32, 2, 4] {
            let cat = endpoint_catalog(level);
            for p in &cat {
                for img in s3_point_images(p, level) {
                    assert!(cat.contains(&img), "level {level}: {p} -> {img} escapes");
                }
            }
        }
    }

    #[test]
    fn omega_form_guard() {
        assert!(OmegaForm::new(CycRat::from_frac(1, 1, 2)).is_err());
        assert!(OmegaForm::new(CycRat::from_int(1, 2)).is_ok());
        assert!(OmegaForm::new(CycRat::i(4)).is_ok());
    }
}
