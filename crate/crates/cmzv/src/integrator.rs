//! The main algorithm: evaluate `∫₀¹ f(x)·Π_i Li_{w_i}(R_i(x)) dx` as an
//! exact CMZV expression.
//!
//! Each factor `Li_w(R(x))` is rewritten by the iterated-integral
//! representation `Li_w(R(x)) = Σ_k c_k ∫₀ˣ g₁…g_k` where `g_i` is the
//! dlog form of `R` or `1-R` according to the i-th letter of `w`, and
//! `c_k` is the (regularized) value of the length-(n-k) suffix at
//! `R(0)`.  Products of factors multiply by shuffling the form words;
//! the kernel letter is concatenated in front; the result is
//! shuffle-regularized and converted through the word ↔ CMZV dictionary.

use crate::expr::{wordpoly_to_cmzv, Atom, CmzvExpr, ExtPoint, Monomial};
use crate::ratfun::{
    certify_admissible, dlog_forms, endpoint_catalog, AdmissiblePair, CatalogPoint, Poly, RatFun,
    RatFunError, ZeroValue,
};
use crate::reg::shuffle_regularize;
use crate::scalars::{factorial, BigRat, CycRat};
use crate::words::{shuffle, Letter, Word, WordError, WordPoly};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IntegrateError {
    #[error(transparent)]
    RatFun(#[from] RatFunError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Expr(#[from] crate::expr::ExprError),
    #[error("endpoint {0} is outside the supported catalog at level {1}")]
    UnsupportedEndpoint(String, u32),
    #[error("kernel must be 1/(x-d) with d = 0 or an N-th root of unity, got {0}")]
    BadKernel(String),
    #[error("unsupported construct: {0}")]
    Unsupported(String),
}

/// One factor of the integrand: a generalized polylogarithm word applied
/// to an admissible rational function.
#[derive(Clone, Debug)]
pub struct LiFactor {
    /// Word over `{x₀,x₁}`, false = x₀.
    pub bits: Vec<bool>,
    pub r: RatFun,
}

/// The iterated-integral representation of one factor:
/// `Li_w(R(x)) = Σ_j consts[j] · ∫₀ˣ words[j]`.
#[derive(Clone, Debug)]
pub struct LiRep {
    pub terms: Vec<(CmzvExpr, WordPoly)>,
    /// Set when an endpoint constant came from an exterior point.
    pub exterior: bool,
}

/// A full integral specification.
#[derive(Clone, Debug)]
pub struct IntegralSpec {
    pub level: u32,
    /// Kernel pole: `f(x) = 1/(x-d)`.
    pub kernel_pole: CycRat,
    pub factors: Vec<LiFactor>,
    /// Global rational prefactor.
    pub prefactor: CycRat,
}

/// Result of the symbolic pipeline.
#[derive(Clone, Debug)]
pub struct IntegralValue {
    pub symbolic: CmzvExpr,
    /// Number of words after expansion, before regularization.
    pub expanded_words: usize,
    /// True when regularization changed the word support (a divergent
    /// word appeared).
    pub regularized: bool,
    /// True when some factor's image leaves [0,1], so the result is for
    /// the analytic continuation defined by the representation.
    pub monodromy: bool,
    /// True when an exterior endpoint constant was used.
    pub exterior: bool,
}

fn concat_expand(factors: &[WordPoly], level: u32) -> WordPoly {
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

/// Certify a rational function and build its dlog letter forms.
pub fn certify(r: &RatFun, level: u32) -> Result<(AdmissiblePair, WordPoly, WordPoly), IntegrateError> {
    let pair = certify_admissible(r.num(), r.den(), level)?;
    let (f_r, f_omr) = dlog_forms(&pair);
    Ok((pair, f_r, f_omr))
}

/// Regularized constant `Li_w(c)` for a catalog endpoint.
pub fn endpoint_constant(
    bits: &[bool],
    point: &EndpointValue,
    level: u32,
) -> Result<(CmzvExpr, bool), IntegrateError> {
    if bits.is_empty() {
        return Ok((CmzvExpr::constant(level, CycRat::one(level)), false));
    }
    let expr_of = |p: &WordPoly| -> Result<CmzvExpr, IntegrateError> {
        Ok(wordpoly_to_cmzv(p)?)
    };
    match point {
        EndpointValue::Zero => Ok((CmzvExpr::zero(level), false)),
        EndpointValue::One => {
            let letters: Vec<Letter> = bits
                .iter()
                .map(|b| if *b { Letter::B(0) } else { Letter::A })
                .collect();
            let w = WordPoly::from_word(Word::new(level, letters)?);
            Ok((expr_of(&w)?, false))
        }
        EndpointValue::Half => Ok((expr_of(&crate::expr::li_half_words(bits, level))?, false)),
        EndpointValue::MinusOne => {
            Ok((expr_of(&crate::expr::li_minus_one_words(bits, level))?, false))
        }
        EndpointValue::PlusMinusI(plus) => {
            Ok((expr_of(&crate::expr::li_pm_i_words(bits, *plus))?, false))
        }
        EndpointValue::HalfPlusMinusI(plus) => {
            Ok((expr_of(&crate::expr::li_phi_words(bits, *plus))?, false))
        }
        EndpointValue::Exterior(pt) => match pt {
            // exact word constructions exist at ∓∞ and 1±i; keep the
            // exterior flag so reports can surface the branch convention
            ExtPoint::MinusInfinity if level % 2 == 0 => Ok((
                expr_of(&crate::expr::li_reg_minus_inf_words(bits, level))?,
                true,
            )),
            ExtPoint::PlusInfinity => Ok((
                expr_of(&crate::expr::li_reg_plus_inf_words(bits, level))?,
                true,
            )),
            ExtPoint::OnePlusI if level == 4 => Ok((
                expr_of(&crate::expr::li_one_pm_i_words(bits, true))?,
                true,
            )),
            ExtPoint::OneMinusI if level == 4 => Ok((
                expr_of(&crate::expr::li_one_pm_i_words(bits, false))?,
                true,
            )),
            _ => {
                let atom = Atom::LiExt(bits.to_vec(), *pt);
                Ok((
                    CmzvExpr::from_monomial(level, Monomial::atom(atom), CycRat::one(level)),
                    true,
                ))
            }
        },
    }
}

/// Classified endpoint `R(0)`.
#[derive(Clone, Debug, PartialEq)]
pub enum EndpointValue {
    Zero,
    One,
    Half,
    MinusOne,
    /// `±i` (the flag is the sign of the imaginary part).
    PlusMinusI(bool),
    /// `(1±i)/2`.
    HalfPlusMinusI(bool),
    Exterior(ExtPoint),
}

/// Classify `R(0)` against the endpoint catalog.
pub fn classify_endpoint(pair: &AdmissiblePair) -> Result<EndpointValue, IntegrateError> {
    let level = pair.r.level;
    let v = pair.r.value_at_zero();
    let catalog = endpoint_catalog(level);
    match v {
        ZeroValue::Zero => Ok(EndpointValue::Zero),
        ZeroValue::Infinite(lead) => {
            // direction from the sign of the leading coefficient
            if let Ok(q) = lead.to_rat() {
                if q > 0 {
                    Ok(EndpointValue::Exterior(ExtPoint::PlusInfinity))
                } else {
                    Ok(EndpointValue::Exterior(ExtPoint::MinusInfinity))
                }
            } else {
                Err(IntegrateError::UnsupportedEndpoint(
                    "infinity along a complex direction".into(),
                    level,
                ))
            }
        }
        ZeroValue::Finite(c) => {
            if !catalog.contains(&CatalogPoint::Finite(c.clone())) {
                return Err(IntegrateError::UnsupportedEndpoint(
                    crate::scalars::cyc_pretty(&c),
                    level,
                ));
            }
            let one = CycRat::one(level);
            if c == one {
                Ok(EndpointValue::One)
            } else if c == CycRat::from_frac(level, 1, 2) {
                Ok(EndpointValue::Half)
            } else if c == one.neg() {
                Ok(EndpointValue::MinusOne)
            } else if c == CycRat::from_int(level, 2) {
                Ok(EndpointValue::Exterior(ExtPoint::Two))
            } else if level % 4 == 0 && c == CycRat::i(level) {
                Ok(EndpointValue::PlusMinusI(true))
            } else if level % 4 == 0 && c == CycRat::i(level).neg() {
                Ok(EndpointValue::PlusMinusI(false))
            } else if level % 4 == 0
                && c == one.add(&CycRat::i(level)).unwrap().scale(&BigRat::from((1, 2)))
            {
                Ok(EndpointValue::HalfPlusMinusI(true))
            } else if level % 4 == 0
                && c == one.sub(&CycRat::i(level)).unwrap().scale(&BigRat::from((1, 2)))
            {
                Ok(EndpointValue::HalfPlusMinusI(false))
            } else if level % 4 == 0 && c == one.add(&CycRat::i(level)).unwrap() {
                Ok(EndpointValue::Exterior(ExtPoint::OnePlusI))
            } else if level % 4 == 0 && c == one.sub(&CycRat::i(level)).unwrap() {
                Ok(EndpointValue::Exterior(ExtPoint::OneMinusI))
            } else {
                Err(IntegrateError::UnsupportedEndpoint(
                    crate::scalars::cyc_pretty(&c),
                    level,
                ))
            }
        }
    }
}

/// Build the iterated-integral representation of one `Li_w(R(x))` factor.
pub fn li_rep(factor: &LiFactor, level: u32) -> Result<LiRep, IntegrateError> {
    let (pair, f_r, f_omr) = certify(&factor.r, level)?;
    let endpoint = classify_endpoint(&pair)?;
    let n = factor.bits.len();
    let forms: Vec<&WordPoly> = factor
        .bits
        .iter()
        .map(|b| if *b { &f_omr } else { &f_r })
        .collect();
    let mut terms = Vec::with_capacity(n + 1);
    let mut exterior = false;
    for j in 0..=n {
        // constant: Li of the suffix starting at j; word: first j forms
        let (c, ext) = endpoint_constant(&factor.bits[j..], &endpoint, level)?;
        exterior |= ext;
        if c.is_zero() {
            continue;
        }
        let word = concat_expand(
            &forms[..j].iter().map(|f| (*f).clone()).collect::<Vec<_>>(),
            level,
        );
        terms.push((c, word));
    }
    Ok(LiRep { terms, exterior })
}

/// A plain logarithm factor `log(arg)^p`, represented like a one-letter
/// polylogarithm chain with a possible `log` constant at 0.
pub fn log_rep(arg: &RatFun, pow: u32, level: u32) -> Result<LiRep, IntegrateError> {
    let pair = certify_admissible(arg.num(), arg.den(), level)?;
    // arg must be nonzero and finite at 0: d-exponent 0 ⟹ value C·Π(-μ^i)^c
    let dlog = {
        let (f_arg, _) = dlog_forms(&AdmissiblePair {
            r: pair.r.clone(),
            one_minus_r: pair.r.clone(),
        });
        f_arg
    };
    let c0 = match pair.r.value_at_zero() {
        ZeroValue::Finite(c) => c,
        other => {
            return Err(IntegrateError::Unsupported(format!(
                "log of a function with {other:?} at 0"
            )))
        }
    };
    let log_c0: CmzvExpr = {
        let one = CycRat::one(level);
        if c0 == one {
            CmzvExpr::zero(level)
        } else if c0 == CycRat::from_int(level, 2) {
            CmzvExpr::from_monomial(level, Monomial::atom(Atom::Log2), CycRat::one(level))
        } else if c0 == CycRat::from_frac(level, 1, 2) {
            CmzvExpr::from_monomial(level, Monomial::atom(Atom::Log2), CycRat::one(level)).neg()
        } else {
            return Err(IntegrateError::Unsupported(format!(
                "log constant log({})",
                crate::scalars::cyc_pretty(&c0)
            )));
        }
    };
    // log^p(arg) = Σ_j C(p,j)·log(c₀)^{p-j}·j!·∫₀ˣ dlog^{⊗j}
    let mut terms = Vec::new();
    for j in 0..=pow {
        let coeff = BigRat::from(crate::scalars::binomial(pow, j)) * factorial(j);
        let mut c = CmzvExpr::constant(level, CycRat::from_rat(level, coeff));
        for _ in 0..(pow - j) {
            c = c.mul(&log_c0)?;
        }
        if c.is_zero() {
            continue;
        }
        let chain: Vec<WordPoly> = std::iter::repeat(dlog.clone()).take(j as usize).collect();
        terms.push((c, concat_expand(&chain, level)));
    }
    Ok(LiRep {
        terms,
        exterior: false,
    })
}

/// Shuffle two representations together (product of the functions).
pub fn rep_product(a: &LiRep, b: &LiRep, level: u32) -> Result<LiRep, IntegrateError> {
    let mut terms = Vec::new();
    for (c1, w1) in &a.terms {
        for (c2, w2) in &b.terms {
            terms.push((c1.mul(c2)?, shuffle(w1, w2)?));
        }
    }
    Ok(LiRep {
        terms,
        exterior: a.exterior || b.exterior,
    })
}

/// Monodromy guard: does `R([0,1]) ⊆ [0,1]`?  Sampled at 64 interior
/// points plus a pole check of the denominator.
pub fn image_in_unit_interval(r: &RatFun) -> bool {
    let level = r.level();
    for k in 1..=64u32 {
        let x = CycRat::from_frac(level, k as i64, 65);
        match r.eval(&x) {
            None => return false,
            Some(v) => {
                let Ok(q) = v.to_rat() else { return false };
                if q < 0 || q > 1 {
                    return false;
                }
            }
        }
    }
    true
}

/// Run the full pipeline.
pub fn integrate(spec: &IntegralSpec) -> Result<IntegralValue, IntegrateError> {
    let level = spec.level;
    // kernel letter
    let kernel = if spec.kernel_pole.is_zero() {
        WordPoly::from_word(Word::new(level, vec![Letter::A])?)
    } else {
        let mut found = None;
        for i in 0..level {
            if CycRat::root_of_unity(level, i as i64) == spec.kernel_pole {
                found = Some(((level - i) % level) as u32);
                break;
            }
        }
        let Some(idx) = found else {
            return Err(IntegrateError::BadKernel(crate::scalars::cyc_pretty(
                &spec.kernel_pole,
            )));
        };
        // 1/(x-μ^i) = -b_{-i mod N}
        WordPoly::from_term(
            Word::new(level, vec![Letter::B(idx)])?,
            CycRat::from_int(level, -1),
        )
    };
    let mut rep = LiRep {
        terms: vec![(
            CmzvExpr::constant(level, spec.prefactor.clone()),
            WordPoly::one(level),
        )],
        exterior: false,
    };
    let mut monodromy = false;
    for f in &spec.factors {
        let fr = li_rep(f, level)?;
        monodromy |= !image_in_unit_interval(&f.r);
        rep = rep_product(&rep, &fr, level)?;
    }
    assemble(rep, kernel, level, monodromy)
}

/// Shared tail of the pipeline: concatenate the kernel, regularize,
/// convert to CMZV terms.
pub fn assemble(
    rep: LiRep,
    kernel: WordPoly,
    level: u32,
    monodromy: bool,
) -> Result<IntegralValue, IntegrateError> {
    let mut total = CmzvExpr::zero(level);
    let mut expanded_words = 0usize;
    let mut regularized = false;
    for (c, words) in &rep.terms {
        let full = concat_expand(&[kernel.clone(), words.clone()], level);
        expanded_words += full.num_terms();
        if full.terms().any(|(w, _)| !w.is_admissible()) {
            regularized = true;
        }
        let adm = shuffle_regularize(&full);
        let as_cmzv = wordpoly_to_cmzv(adm.as_poly())?;
        total = total.add(&c.mul(&as_cmzv)?)?;
    }
    Ok(IntegralValue {
        symbolic: total,
        expanded_words,
        regularized,
        monodromy,
        exterior: rep.exterior,
    })
}

/// Convenience: `Li_{s₁,…,s_k}` exponent list → letter bits.
pub fn exps_to_bits(exps: &[u32]) -> Vec<bool> {
    let mut bits = Vec::new();
    for s in exps {
        for _ in 1..*s {
            bits.push(false);
        }
        bits.push(true);
    }
    bits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::cmzv_numeric;
    use crate::reducer::{build_table, reduce};

    fn li_factor(level: u32, exps: &[u32], num: &[i64], den: &[i64]) -> LiFactor {
        LiFactor {
            bits: exps_to_bits(exps),
            r: RatFun::new(Poly::from_ints(level, num), Poly::from_ints(level, den)).unwrap(),
        }
    }

    #[test]
    fn li_rep_paper_examples() {
        // Li₂(-1/x) = -π²/6 - ∫₀ˣ a(a+b₁) at level 2
        let f = li_factor(2, &[2], &[-1], &[0, 1]);
        let rep = li_rep(&f, 2).unwrap();
        // two terms: the constant (empty word) and the full word
        assert_eq!(rep.terms.len(), 2);
        let (c0, w0) = &rep.terms[0];
        assert!(w0.terms().next().unwrap().0.is_empty());
        let v = cmzv_numeric(c0, 96).unwrap();
        assert!((v.re.to_f64() + std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-20);
        let (_, w2) = &rep.terms[1];
        // -a(a+b₁) = -aa - ab₁
        let mut expect = WordPoly::zero(2);
        expect.add_term(
            crate::words::parse_word("a a", 2).unwrap(),
            CycRat::from_int(2, -1),
        );
        expect.add_term(
            crate::words::parse_word("a b1", 2).unwrap(),
            CycRat::from_int(2, -1),
        );
        assert_eq!(w2, &expect);
        assert!(rep.exterior);
        // Li₂(4x/(1+x)²): no constants, word (a+2b₁)(2b₀-2b₁)
        let f = li_factor(2, &[2], &[0, 4], &[1, 2, 1]);
        let rep = li_rep(&f, 2).unwrap();
        assert_eq!(rep.terms.len(), 1);
        assert_eq!(rep.terms[0].1.num_terms(), 4);
        // Li_{x₁}(x) = ∫₀ˣ b₀
        let f = LiFactor {
            bits: vec![true],
            r: RatFun::x(1),
        };
        let rep = li_rep(&f, 1).unwrap();
        assert_eq!(rep.terms.len(), 1);
        assert_eq!(
            rep.terms[0].1,
            WordPoly::from_word(crate::words::parse_word("b0", 1).unwrap())
        );
    }

    #[test]
    fn example_3_1_pipeline() {
        // ∫₀¹ Li₂(x)·log(1-x)/x dx = -2ζ(3,1) - ζ(2,2) = -π⁴/72
        let spec = IntegralSpec {
            level: 1,
            kernel_pole: CycRat::zero(1),
            factors: vec![li_factor(1, &[2], &[0, 1], &[1])],
            prefactor: CycRat::one(1),
        };
        // multiply in the log(1-x) factor via log_rep with arg = 1-x
        let log = log_rep(
            &RatFun::new(Poly::from_ints(1, &[1, -1]), Poly::from_ints(1, &[1])).unwrap(),
            1,
            1,
        )
        .unwrap();
        let li2 = li_rep(&spec.factors[0], 1).unwrap();
        let rep = rep_product(&li2, &log, 1).unwrap();
        let kernel = WordPoly::from_word(Word::new(1, vec![Letter::A]).unwrap());
        let out = assemble(rep, kernel, 1, false).unwrap();
        assert!(!out.regularized);
        // symbolically: -2ζ(3,1) - ζ(2,2)
        assert_eq!(out.symbolic.num_terms(), 2);
        let table = build_table(1, 4).unwrap();
        let (reduced, done) = reduce(&out.symbolic, &table);
        assert!(done);
        // -π⁴/72 = -(1/2)ζ(2)²
        let mut expect = CmzvExpr::zero(1);
        expect.add_term(
            Monomial(vec![(crate::expr::Factor::A(Atom::Zeta(2)), 2)]),
            CycRat::from_frac(1, -1, 2),
        );
        assert_eq!(reduced, expect);
        // numeric enclosure agrees with π⁴/72
        let v = cmzv_numeric(&reduced, 120).unwrap();
        let pi4 = crate::ball::ComplexBall::pi(140).pow_u32(4);
        assert!(v.overlaps(&pi4.mul_rat(&BigRat::from((-1, 72)))));
    }

    #[test]
    fn example_3_3_regularized() {
        // ∫₀¹ Li₃(x)/(1-x) dx (regularized) = Ł(b₀a²b₀) = -π⁴/72
        let spec = IntegralSpec {
            level: 1,
            kernel_pole: CycRat::one(1),
            factors: vec![li_factor(1, &[3], &[0, 1], &[1])],
            prefactor: CycRat::from_int(1, -1), // 1/(1-x) = -1/(x-1)
        };
        let out = integrate(&spec).unwrap();
        assert!(out.regularized, "divergent word must be regularized");
        let table = build_table(1, 4).unwrap();
        let (reduced, done) = reduce(&out.symbolic, &table);
        assert!(done);
        let mut expect = CmzvExpr::zero(1);
        expect.add_term(
            Monomial(vec![(crate::expr::Factor::A(Atom::Zeta(2)), 2)]),
            CycRat::from_frac(1, -1, 2),
        );
        assert_eq!(reduced, expect);
    }

    #[test]
    fn derivative_of_rep_matches() {
        // d/dx of the representation equals Li_{v}(R)·g₁ for the suffix;
        // spot check numerically at interior points for Li₂(4x/(1+x)²).
        let f = li_factor(2, &[2], &[0, 4], &[1, 2, 1]);
        let rep = li_rep(&f, 2).unwrap();
        // evaluate rep at x and compare with classical Li₂(R(x))
        for k in [13u32, 25, 37] {
            let x = BigRat::from((k, 64));
            let mut acc = 0f64;
            for (c, words) in &rep.terms {
                let cv = cmzv_numeric(c, 64).unwrap().re.to_f64();
                for (w, coeff) in words.terms() {
                    let (sign, poles) = crate::numeric::word_to_poles(w);
                    let xc = CycRat::from_rat(2, x.clone());
                    let v = crate::numeric::suffix_values(&poles, &xc, 64).unwrap()[0].clone();
                    let cf = crate::ball::cyc_to_ball(coeff, 64).re.to_f64();
                    acc += cv * cf * v.re.to_f64() * sign as f64;
                }
            }
            let xf = k as f64 / 64.0;
            let rx = 4.0 * xf / (1.0 + xf).powi(2);
            let li2 = crate::quad::li_classical(96, 2, &rug::Float::with_val(96, rx));
            assert!(
                (acc - li2.to_f64()).abs() < 1e-12,
                "x={xf}: {acc} vs {}",
                li2.to_f64()
            );
        }
    }

    #[test]
    fn monodromy_guard() {
        let ok = RatFun::new(Poly::from_ints(2, &[0, 4]), Poly::from_ints(2, &[1, 2, 1])).unwrap();
        assert!(image_in_unit_interval(&ok));
        let bad = RatFun::new(Poly::from_ints(2, &[-1]), Poly::from_ints(2, &[0, 1])).unwrap();
        assert!(!image_in_unit_interval(&bad));
    }
}
