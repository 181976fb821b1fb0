//! Exact arithmetic over arbitrary-size rationals and the cyclotomic fields
//! `Q(μ_N)`, `μ_N = exp(2πi/N)`.
//!
//! Elements of `Q(μ_N)` are stored in the power basis `μ^0, …, μ^{φ(N)-1}`
//! of `Q[x]/Φ_N(x)`, so that the representation is a field (no zero
//! divisors) and division is always available.  For `N = 1, 2` this
//! degenerates to `Q`, for `N = 4` to the Gaussian rationals.
//!
//! Every value carries its level `N`; mixing levels is an error rather than
//! a silent coercion, except through the explicit [`CycRat::promote`].

use once_cell::sync::Lazy;
use rug::ops::Pow;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;
use thiserror::Error;

/// Exact rational number with arbitrary-size numerator and denominator.
///
/// Backed by GMP; always stored in lowest terms with positive denominator.
pub type BigRat = rug::Rational;

/// Errors from cyclotomic arithmetic.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScalarError {
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),
    #[error("division by zero in Q(mu_{0})")]
    DivisionByZero(u32),
    #[error("value at level {0} is not rational")]
    NotRational(u32),
    #[error("{0} does not divide {1}, cannot change level")]
    BadLevelChange(u32, u32),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Euler's totient.
pub fn euler_phi(n: u32) -> u32 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Number of distinct prime factors.
pub fn nu_primes(n: u32) -> u32 {
    let mut n = n;
    let mut count = 0;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            count += 1;
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        count += 1;
    }
    count
}

/// Möbius function.
pub fn moebius(n: u32) -> i32 {
    let mut n = n;
    let mut factors = 0;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            factors += 1;
        }
        p += 1;
    }
    if n > 1 {
        factors += 1;
    }
    if factors % 2 == 0 {
        1
    } else {
        -1
    }
}

fn divisors(n: u32) -> Vec<u32> {
    let mut d: Vec<u32> = (1..=n).filter(|k| n % k == 0).collect();
    d.sort_unstable();
    d
}

/// Coefficients of the N-th cyclotomic polynomial, constant term first.
///
/// Computed by exact division of `x^N - 1` by the product of `Φ_d` over the
/// proper divisors `d` of `N`.
fn cyclotomic_poly(n: u32) -> Vec<BigRat> {
    if n == 1 {
        return vec![BigRat::from(-1), BigRat::from(1)];
    }
    // x^n - 1
    let mut num = vec![BigRat::new(); n as usize + 1];
    num[0] = BigRat::from(-1);
    num[n as usize] = BigRat::from(1);
    for d in divisors(n) {
        if d == n {
            continue;
        }
        let phi_d = cyclotomic_poly(d);
        num = poly_div_exact(&num, &phi_d);
    }
    num
}

fn poly_div_exact(num: &[BigRat], den: &[BigRat]) -> Vec<BigRat> {
    let mut rem: Vec<BigRat> = num.to_vec();
    let dd = den.len() - 1;
    let lead = den[dd].clone();
    assert!(rem.len() > dd);
    let qd = rem.len() - 1 - dd;
    let mut quot = vec![BigRat::new(); qd + 1];
    for k in (0..=qd).rev() {
        let c = BigRat::from(&rem[k + dd] / &lead);
        if c != 0 {
            for j in 0..=dd {
                let t = BigRat::from(&den[j] * &c);
                rem[k + j] -= t;
            }
        }
        quot[k] = c;
    }
    debug_assert!(rem.iter().all(|c| *c == 0));
    quot
}

/// Cached data for one level: Φ_N and the expansions of μ^k, k < 2φ(N),
/// over the power basis (used to fold products back into the basis).
struct CycContext {
    phi: usize,
    /// power_reduction[k] = coefficients of μ^{phi + k} in the power basis.
    power_reduction: Vec<Vec<BigRat>>,
}

static CONTEXTS: Lazy<Mutex<HashMap<u32, &'static CycContext>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn context(n: u32) -> &'static CycContext {
    let mut map = CONTEXTS.lock().unwrap();
    if let Some(c) = map.get(&n) {
        return c;
    }
    let poly = cyclotomic_poly(n);
    let phi = poly.len() - 1;
    // mu^phi = -(c_0 + c_1 mu + ... + c_{phi-1} mu^{phi-1})  (Φ_N is monic)
    let mut rows: Vec<Vec<BigRat>> = Vec::new();
    let base: Vec<BigRat> = poly[..phi].iter().map(|c| BigRat::from(-c)).collect();
    rows.push(base);
    for _ in 1..phi.max(1) {
        // multiply previous row by mu and reduce using rows already known
        let prev = rows.last().unwrap().clone();
        let mut next = vec![BigRat::new(); phi];
        for (i, c) in prev.iter().enumerate() {
            if i + 1 < phi {
                next[i + 1] += c;
            } else {
                for (j, r) in rows[0].iter().enumerate() {
                    next[j] += BigRat::from(r * c);
                }
            }
        }
        rows.push(next);
    }
    let ctx = Box::leak(Box::new(CycContext {
        phi,
        power_reduction: rows,
    }));
    map.insert(n, ctx);
    ctx
}

/// Exact element of the cyclotomic field `Q(μ_N)` in the power basis of
/// `Φ_N`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycRat {
    level: u32,
    coeffs: Vec<BigRat>,
}

impl CycRat {
    /// The zero element at level `n`.
    pub fn zero(n: u32) -> Self {
        CycRat {
            level: n,
            coeffs: vec![BigRat::new(); euler_phi(n) as usize],
        }
    }

    /// The unit element at level `n`.
    pub fn one(n: u32) -> Self {
        Self::from_rat(n, BigRat::from(1))
    }

    /// Embed a rational number at level `n`.
    pub fn from_rat(n: u32, q: BigRat) -> Self {
        let mut c = Self::zero(n);
        c.coeffs[0] = q;
        c
    }

    /// Embed an integer at level `n`.
    pub fn from_int(n: u32, k: i64) -> Self {
        Self::from_rat(n, BigRat::from(k))
    }

    /// `p/q` at level `n`.
    pub fn from_frac(n: u32, p: i64, q: i64) -> Self {
        Self::from_rat(n, BigRat::from((p, q)))
    }

    /// `μ_N^k`, reduced into the power basis.
    pub fn root_of_unity(n: u32, k: i64) -> Self {
        let ctx = context(n);
        let k = k.rem_euclid(n as i64) as usize;
        let mut c = Self::zero(n);
        if k < ctx.phi {
            c.coeffs[k] = BigRat::from(1);
        } else {
            c.coeffs = ctx.power_reduction[k - ctx.phi].clone();
        }
        c
    }

    /// The imaginary unit; level must be divisible by 4.
    pub fn i(n: u32) -> Self {
        assert!(n % 4 == 0, "i requires 4 | N");
        Self::root_of_unity(n, (n / 4) as i64)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coeffs(&self) -> &[BigRat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0)
    }

    /// True if the value lies in `Q` (only the μ^0 coordinate is nonzero).
    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(|c| *c == 0)
    }

    /// Extract the rational value, if [`Self::is_rational`].
    pub fn to_rat(&self) -> Result<BigRat, ScalarError> {
        if self.is_rational() {
            Ok(self.coeffs[0].clone())
        } else {
            Err(ScalarError::NotRational(self.level))
        }
    }

    fn check(&self, other: &Self) -> Result<(), ScalarError> {
        if self.level != other.level {
            Err(ScalarError::LevelMismatch(self.level, other.level))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, ScalarError> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| BigRat::from(a + b))
            .collect();
        Ok(CycRat {
            level: self.level,
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ScalarError> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| BigRat::from(a - b))
            .collect();
        Ok(CycRat {
            level: self.level,
            coeffs,
        })
    }

    pub fn neg(&self) -> Self {
        CycRat {
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| BigRat::from(-c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, ScalarError> {
        self.check(other)?;
        let ctx = context(self.level);
        let phi = ctx.phi;
        let mut conv = vec![BigRat::new(); 2 * phi - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if *b == 0 {
                    continue;
                }
                conv[i + j] += BigRat::from(a * b);
            }
        }
        let mut out = vec![BigRat::new(); phi];
        for (k, c) in conv.into_iter().enumerate() {
            if c == 0 {
                continue;
            }
            if k < phi {
                out[k] += c;
            } else {
                for (j, r) in ctx.power_reduction[k - phi].iter().enumerate() {
                    out[j] += BigRat::from(r * &c);
                }
            }
        }
        Ok(CycRat {
            level: self.level,
            coeffs: out,
        })
    }

    pub fn scale(&self, q: &BigRat) -> Self {
        CycRat {
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| BigRat::from(c * q)).collect(),
        }
    }

    /// Multiplicative inverse, by the extended Euclidean algorithm in `Q[x]`
    /// against `Φ_N`.
    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero(self.level));
        }
        if self.is_rational() {
            return Ok(Self::from_rat(
                self.level,
                BigRat::from(self.coeffs[0].clone().recip()),
            ));
        }
        let phi_poly = cyclotomic_poly(self.level);
        // Extended Euclid: r0 = Φ_N, r1 = self; track s only against r1.
        let mut r0 = phi_poly;
        let mut r1 = trim(self.coeffs.clone());
        let mut s0: Vec<BigRat> = vec![];
        let mut s1: Vec<BigRat> = vec![BigRat::from(1)];
        while poly_deg(&r1) > 0 {
            let (q, r) = poly_divmod(&r0, &r1);
            let s = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            if r1.is_empty() {
                // self divides Φ_N: impossible for a field element
                unreachable!("cyclotomic polynomial is irreducible");
            }
        }
        // r1 is a nonzero constant: inverse = s1 / r1
        let c = r1[0].clone();
        let mut out = vec![BigRat::new(); euler_phi(self.level) as usize];
        for (i, v) in s1.into_iter().enumerate() {
            out[i] = v / c.clone();
        }
        Ok(CycRat {
            level: self.level,
            coeffs: out,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self, ScalarError> {
        self.check(other)?;
        if other.is_zero() {
            return Err(ScalarError::DivisionByZero(self.level));
        }
        self.mul(&other.inv()?)
    }

    pub fn pow_i64(&self, mut e: i64) -> Result<Self, ScalarError> {
        let mut base = if e < 0 {
            e = -e;
            self.inv()?
        } else {
            self.clone()
        };
        let mut acc = Self::one(self.level);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Complex conjugate (`μ ↦ μ^{-1}`).
    pub fn conj(&self) -> Self {
        let n = self.level;
        let mut out = Self::zero(n);
        for (k, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let m = Self::root_of_unity(n, -(k as i64)).scale(c);
            out = out.add(&m).unwrap();
        }
        out
    }

    /// Re-express at a level `m` that is a multiple of the current level
    /// (`μ_N = μ_M^{M/N}`).
    pub fn promote(&self, m: u32) -> Result<Self, ScalarError> {
        if m == self.level {
            return Ok(self.clone());
        }
        if m % self.level != 0 {
            return Err(ScalarError::BadLevelChange(self.level, m));
        }
        let step = (m / self.level) as i64;
        let mut out = Self::zero(m);
        for (k, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let p = Self::root_of_unity(m, step * k as i64).scale(c);
            out = out.add(&p).unwrap();
        }
        Ok(out)
    }

    /// Attempt to re-express at a divisor level `m` of the current level.
    pub fn demote(&self, m: u32) -> Result<Self, ScalarError> {
        if m == self.level {
            return Ok(self.clone());
        }
        if self.level % m != 0 {
            return Err(ScalarError::BadLevelChange(self.level, m));
        }
        // Solve: value = sum over basis of level m.  Brute force via promote
        // of candidate basis vectors is overkill; instead check that the
        // promoted basis of level m spans this value by linear algebra on
        // the power-basis coordinates.
        let phi_m = euler_phi(m) as usize;
        let mut basis = Vec::with_capacity(phi_m);
        for k in 0..phi_m {
            basis.push(Self::root_of_unity(m, k as i64).promote(self.level)?);
        }
        let phi_n = self.coeffs.len();
        // Gaussian elimination on the phi_n x phi_m system.
        let mut mat: Vec<Vec<BigRat>> = (0..phi_n)
            .map(|r| {
                let mut row: Vec<BigRat> = basis.iter().map(|b| b.coeffs[r].clone()).collect();
                row.push(self.coeffs[r].clone());
                row
            })
            .collect();
        let mut sol = vec![BigRat::new(); phi_m];
        let mut row = 0;
        let mut pivots = vec![];
        for col in 0..phi_m {
            if let Some(p) = (row..phi_n).find(|&r| mat[r][col] != 0) {
                mat.swap(row, p);
                let lead = mat[row][col].clone();
                for c in col..=phi_m {
                    let v = BigRat::from(&mat[row][c] / &lead);
                    mat[row][c] = v;
                }
                for r in 0..phi_n {
                    if r != row && mat[r][col] != 0 {
                        let f = mat[r][col].clone();
                        for c in col..=phi_m {
                            let t = BigRat::from(&mat[row][c] * &f);
                            mat[r][c] -= t;
                        }
                    }
                }
                pivots.push((row, col));
                row += 1;
            }
        }
        for &(r, c) in &pivots {
            sol[c] = mat[r][phi_m].clone();
        }
        // Verify consistency.
        let mut check = Self::zero(self.level);
        for (k, s) in sol.iter().enumerate() {
            check = check.add(&basis[k].scale(s)).unwrap();
        }
        if &check != self {
            return Err(ScalarError::BadLevelChange(self.level, m));
        }
        Ok(CycRat {
            level: m,
            coeffs: sol,
        })
    }

    /// An upper bound on the complex absolute value, as a rational number
    /// (sum of absolute values of the coordinates).
    pub fn abs_upper_rat(&self) -> BigRat {
        let mut s = BigRat::new();
        for c in &self.coeffs {
            s += BigRat::from(c.clone().abs());
        }
        s
    }

    /// Height proxy used by pivoting heuristics: max bit size of numerators
    /// and denominators.
    pub fn height_bits(&self) -> u32 {
        self.coeffs
            .iter()
            .map(|c| {
                c.numer()
                    .significant_bits()
                    .max(c.denom().significant_bits())
            })
            .max()
            .unwrap_or(0)
    }
}

fn trim(mut v: Vec<BigRat>) -> Vec<BigRat> {
    while v.last().map(|c| *c == 0).unwrap_or(false) {
        v.pop();
    }
    v
}

fn poly_deg(v: &[BigRat]) -> usize {
    v.len().saturating_sub(1)
}

fn poly_mul(a: &[BigRat], b: &[BigRat]) -> Vec<BigRat> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRat::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += BigRat::from(x * y);
        }
    }
    trim(out)
}

fn poly_sub(a: &[BigRat], b: &[BigRat]) -> Vec<BigRat> {
    let mut out = vec![BigRat::new(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

fn poly_divmod(num: &[BigRat], den: &[BigRat]) -> (Vec<BigRat>, Vec<BigRat>) {
    let den = trim(den.to_vec());
    let mut rem = trim(num.to_vec());
    let dd = den.len() - 1;
    let lead = den[dd].clone();
    if rem.len() <= dd {
        return (vec![], rem);
    }
    let qd = rem.len() - 1 - dd;
    let mut quot = vec![BigRat::new(); qd + 1];
    for k in (0..=qd).rev() {
        let c = BigRat::from(&rem[k + dd] / &lead);
        if c != 0 {
            for j in 0..=dd {
                let t = BigRat::from(&den[j] * &c);
                rem[k + j] -= t;
            }
        }
        quot[k] = c;
    }
    (trim(quot), trim(rem))
}

impl fmt::Debug for CycRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Text form `(a0/b0, a1/b1, …)@N`; exact round-trip.
impl fmt::Display for CycRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")@{}", self.level)
    }
}

impl FromStr for CycRat {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ScalarError::Parse(format!("bad CycRat literal: {s}"));
        let (body, lvl) = s.rsplit_once('@').ok_or_else(bad)?;
        let level: u32 = lvl.trim().parse().map_err(|_| bad())?;
        let body = body.trim();
        if !body.starts_with('(') || !body.ends_with(')') {
            return Err(bad());
        }
        let inner = &body[1..body.len() - 1];
        let mut coeffs = Vec::new();
        for part in inner.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            coeffs.push(BigRat::from_str(part).map_err(|_| bad())?);
        }
        if coeffs.len() != euler_phi(level) as usize {
            return Err(ScalarError::Parse(format!(
                "expected {} coordinates at level {level}",
                euler_phi(level)
            )));
        }
        Ok(CycRat { level, coeffs })
    }
}

/// Short human form used in reports: rationals print bare, Gaussian
/// rationals as `p+qi`, anything else in power-basis form.
pub fn cyc_pretty(c: &CycRat) -> String {
    if c.is_rational() {
        return c.coeffs[0].to_string();
    }
    if c.level() == 4 {
        let re = &c.coeffs()[0];
        let im = &c.coeffs()[1];
        if *re == 0 {
            return format!("{im}*i");
        }
        return format!("({re}{}{}*i)", if *im < 0 { "" } else { "+" }, im);
    }
    c.to_string()
}

/// Dispatch table for the four field operations (used by the CLI and tests).
pub fn cyc_arith(x: &CycRat, y: &CycRat, op: char) -> Result<CycRat, ScalarError> {
    match op {
        '+' => x.add(y),
        '-' => x.sub(y),
        '*' => x.mul(y),
        '/' => x.div(y),
        _ => Err(ScalarError::Parse(format!("unknown operation {op}"))),
    }
}

/// `n!` as a rational.
pub fn factorial(n: u32) -> BigRat {
    let mut f = rug::Integer::from(1);
    for k in 2..=n {
        f *= k;
    }
    BigRat::from(f)
}

/// Binomial coefficient as an exact integer.
pub fn binomial(n: u32, k: u32) -> rug::Integer {
    rug::Integer::from(n).binomial(k)
}

/// `2^e` as an exact rational, e possibly negative.
pub fn pow2(e: i64) -> BigRat {
    if e >= 0 {
        BigRat::from(rug::Integer::from(1) << e as u32)
    } else {
        BigRat::from((rug::Integer::from(1), rug::Integer::from(1) << (-e) as u32))
    }
}

/// `q^e` for rational q, e possibly negative.
pub fn rat_pow(q: &BigRat, e: i32) -> BigRat {
    if e >= 0 {
        BigRat::from(q.pow(e as u32))
    } else {
        BigRat::from(q.clone().recip().pow((-e) as u32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_and_cyclotomic() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(2), 1);
        assert_eq!(euler_phi(4), 2);
        assert_eq!(euler_phi(8), 4);
        assert_eq!(euler_phi(12), 4);
        // Φ_4 = x^2 + 1
        let p = cyclotomic_poly(4);
        assert_eq!(p, vec![BigRat::from(1), BigRat::from(0), BigRat::from(1)]);
        // Φ_12 = x^4 - x^2 + 1
        let p = cyclotomic_poly(12);
        assert_eq!(
            p,
            vec![
                BigRat::from(1),
                BigRat::from(0),
                BigRat::from(-1),
                BigRat::from(0),
                BigRat::from(1)
            ]
        );
    }

    #[test]
    fn gaussian_arithmetic() {
        // (i)*(i) = -1 at N=4
        let i = CycRat::i(4);
        assert_eq!(i.mul(&i).unwrap(), CycRat::from_int(4, -1));
        // 1/2 + 1/3 = 5/6 at N=2
        let a = CycRat::from_frac(2, 1, 2);
        let b = CycRat::from_frac(2, 1, 3);
        assert_eq!(a.add(&b).unwrap(), CycRat::from_frac(2, 5, 6));
        // 1/(1+i) = (1-i)/2
        let one_plus_i = CycRat::one(4).add(&CycRat::i(4)).unwrap();
        let inv = one_plus_i.inv().unwrap();
        let expected = CycRat::one(4)
            .sub(&CycRat::i(4))
            .unwrap()
            .scale(&BigRat::from((1, 2)));
        assert_eq!(inv, expected);
        // independent oracle: (1+i)*(1-i)/2 = 1
        assert_eq!(one_plus_i.mul(&inv).unwrap(), CycRat::one(4));
    }

    #[test]
    fn roots_reduce_mod_phi() {
        for n in [1u32, 2, 3, 4, 5, 6, 8, 12] {
            let mu = CycRat::root_of_unity(n, 1);
            assert_eq!(mu.pow_i64(n as i64).unwrap(), CycRat::one(n), "mu^N at N={n}");
        }
    }

    #[test]
    fn inverse_at_level_8() {
        let mu = CycRat::root_of_unity(8, 1);
        let x = mu
            .scale(&BigRat::from((3, 7)))
            .add(&CycRat::from_frac(8, 1, 2))
            .unwrap()
            .add(&CycRat::root_of_unity(8, 3).scale(&BigRat::from(5)))
            .unwrap();
        let y = x.inv().unwrap();
        assert_eq!(x.mul(&y).unwrap(), CycRat::one(8));
    }

    #[test]
    fn promote_demote_roundtrip() {
        let x = CycRat::root_of_unity(2, 1).scale(&BigRat::from((2, 3)));
        let p = x.promote(4).unwrap();
        assert_eq!(p.demote(2).unwrap(), x);
        let i = CycRat::i(4);
        assert!(i.demote(2).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let x = CycRat::root_of_unity(8, 1)
            .scale(&BigRat::from((-3, 5)))
            .add(&CycRat::from_frac(8, 22, 7))
            .unwrap();
        let s = x.to_string();
        let y: CycRat = s.parse().unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn conj_is_involution() {
        let x = CycRat::root_of_unity(8, 1)
            .add(&CycRat::root_of_unity(8, 2).scale(&BigRat::from(3)))
            .unwrap();
        assert_eq!(x.conj().conj(), x);
        // x * conj(x) is real (fixed by conjugation)
        let n = x.mul(&x.conj()).unwrap();
        assert_eq!(n.conj(), n);
    }
}
