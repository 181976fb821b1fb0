//! Rigorous complex ball arithmetic on top of MPFR floats.
//!
//! A [`ComplexBall`] is a midpoint `(re, im)` at some working precision plus
//! a low-precision radius that bounds the distance from the midpoint to the
//! true value.  Midpoints are computed with round-to-nearest; every
//! operation then inflates the radius with an upward-rounded bound that
//! covers both the input radii and the rounding of the midpoint itself.
//! Radii only ever grow, so an enclosure stays an enclosure.

use crate::scalars::{BigRat, CycRat};
use rug::float::{Constant, Round};
use rug::ops::{AddAssignRound, DivAssignRound, MulAssignRound, SubAssignRound};
use rug::Float;
use std::fmt;

const RAD_PREC: u32 = 32;

/// Ball in the complex plane: `|true - (re + i·im)| <= rad`.
#[derive(Clone)]
pub struct ComplexBall {
    pub re: Float,
    pub im: Float,
    /// Non-negative radius, rounded up.
    pub rad: Float,
}

fn rad_zero() -> Float {
    Float::with_val(RAD_PREC, 0)
}

/// Upper bound for the rounding error of a round-to-nearest result.
fn ulp(x: &Float) -> Float {
    if x.is_zero() {
        return Float::with_val(RAD_PREC, Float::u_exp(1, -((x.prec() as i32) + 60)));
    }
    let e = x.get_exp().unwrap_or(0);
    Float::with_val(RAD_PREC, Float::u_exp(1, e - x.prec() as i32))
}

fn up_add(a: &Float, b: &Float) -> Float {
    let mut r = Float::with_val(RAD_PREC, a);
    r.add_assign_round(b, Round::Up);
    r
}

fn up_mul(a: &Float, b: &Float) -> Float {
    let mut r = Float::with_val(RAD_PREC, a);
    r.mul_assign_round(b, Round::Up);
    r
}

impl ComplexBall {
    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn exact_zero(prec: u32) -> Self {
        ComplexBall {
            re: Float::with_val(prec, 0),
            im: Float::with_val(prec, 0),
            rad: rad_zero(),
        }
    }

    pub fn from_f64(prec: u32, x: f64) -> Self {
        ComplexBall {
            re: Float::with_val(prec, x),
            im: Float::with_val(prec, 0),
            rad: rad_zero(),
        }
    }

    /// Exact rational midpoint; radius only the rounding ulp.
    pub fn from_rat(prec: u32, q: &BigRat) -> Self {
        let re = Float::with_val(prec, q);
        let rad = ulp(&re);
        ComplexBall {
            re,
            im: Float::with_val(prec, 0),
            rad,
        }
    }

    pub fn from_parts(re: Float, im: Float, rad: Float) -> Self {
        ComplexBall { re, im, rad }
    }

    /// π as a ball.
    pub fn pi(prec: u32) -> Self {
        let v = Float::with_val(prec, Constant::Pi);
        let rad = ulp(&v);
        ComplexBall {
            re: v,
            im: Float::with_val(prec, 0),
            rad,
        }
    }

    /// log 2 as a ball.
    pub fn log2(prec: u32) -> Self {
        let v = Float::with_val(prec, Constant::Log2);
        let rad = ulp(&v);
        ComplexBall {
            re: v,
            im: Float::with_val(prec, 0),
            rad,
        }
    }

    /// Exact complex embedding of a cyclotomic rational under
    /// `μ ↦ exp(2πi/N)`.
    pub fn from_cyc(prec: u32, x: &CycRat) -> Self {
        let n = x.level();
        let wp = prec + 16;
        let mut acc = ComplexBall::exact_zero(wp);
        for (k, c) in x.coeffs().iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let root = root_of_unity_ball(wp, n, k as i64);
            acc = acc.add(&root.mul_rat(c));
        }
        acc.set_prec(prec)
    }

    pub fn set_prec(&self, prec: u32) -> Self {
        let re = Float::with_val(prec, &self.re);
        let im = Float::with_val(prec, &self.im);
        let extra = up_add(&ulp(&re), &ulp(&im));
        ComplexBall {
            re,
            im,
            rad: up_add(&self.rad, &extra),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Upper bound for |midpoint|.
    pub fn mid_abs_upper(&self) -> Float {
        let mut h = Float::with_val(RAD_PREC, &self.re);
        h = h.abs();
        let mut i = Float::with_val(RAD_PREC, &self.im);
        i = i.abs();
        // |re| + |im| >= hypot; cheap and safe
        up_add(&up_add(&h, &i), &ulp(&self.re))
    }

    /// Upper bound for |value| over the whole ball.
    pub fn abs_upper(&self) -> Float {
        up_add(&self.mid_abs_upper(), &self.rad)
    }

    /// Lower bound for |value| over the ball (may be 0).
    pub fn abs_lower(&self) -> Float {
        let mut h = self.re.clone();
        let hy = h.hypot_ref(&self.im);
        h = Float::with_val(RAD_PREC, hy);
        let mut r = h;
        r.sub_assign_round(&self.rad, Round::Down);
        r.sub_assign_round(&ulp(&self.re), Round::Down);
        if r < 0 {
            r = Float::with_val(RAD_PREC, 0);
        }
        r
    }

    pub fn neg(&self) -> Self {
        ComplexBall {
            re: Float::with_val(self.prec(), -&self.re),
            im: Float::with_val(self.prec(), -&self.im),
            rad: self.rad.clone(),
        }
    }

    pub fn conj(&self) -> Self {
        ComplexBall {
            re: self.re.clone(),
            im: Float::with_val(self.prec(), -&self.im),
            rad: self.rad.clone(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.prec().max(o.prec());
        let re = Float::with_val(p, &self.re + &o.re);
        let im = Float::with_val(p, &self.im + &o.im);
        let slop = up_add(&ulp(&re), &ulp(&im));
        ComplexBall {
            re,
            im,
            rad: up_add(&up_add(&self.rad, &o.rad), &slop),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.prec().max(o.prec());
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        let re = Float::with_val(p, re);
        let im = Float::with_val(p, im);
        let a = self.mid_abs_upper();
        let b = o.mid_abs_upper();
        let mut rad = up_mul(&a, &o.rad);
        rad = up_add(&rad, &up_mul(&b, &self.rad));
        rad = up_add(&rad, &up_mul(&self.rad, &o.rad));
        rad = up_add(&rad, &up_mul(&ulp(&re), &Float::with_val(RAD_PREC, 8)));
        ComplexBall { re, im, rad }
    }

    pub fn mul_rat(&self, q: &BigRat) -> Self {
        let p = self.prec();
        let f = Float::with_val(p, q);
        let re = Float::with_val(p, &self.re * &f);
        let im = Float::with_val(p, &self.im * &f);
        let mut fac = Float::with_val(RAD_PREC, &f);
        fac = fac.abs();
        let mut rad = up_mul(&self.rad, &up_add(&fac, &ulp(&f)));
        rad = up_add(&rad, &up_add(&ulp(&re), &ulp(&im)));
        ComplexBall { re, im, rad }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        self.mul_rat(&BigRat::from(k))
    }

    pub fn recip(&self) -> Self {
        let p = self.prec();
        let den = Float::with_val(p, &self.re * &self.re) + Float::with_val(p, &self.im * &self.im);
        let den = Float::with_val(p, den);
        let re = Float::with_val(p, &self.re / &den);
        let im = Float::with_val(p, -Float::with_val(p, &self.im / &den));
        // |1/z - 1/ẑ| <= r / (|ẑ| (|ẑ| - r))
        let lo = {
            let mut h = Float::with_val(RAD_PREC, &self.re);
            let hy = Float::with_val(RAD_PREC, h.hypot_ref(&self.im));
            h = hy;
            h.sub_assign_round(&ulp(&self.re), Round::Down);
            h
        };
        let mut denom = Float::with_val(RAD_PREC, &lo);
        denom.sub_assign_round(&self.rad, Round::Down);
        let rad = if denom <= 0 {
            Float::with_val(RAD_PREC, rug::float::Special::Infinity)
        } else {
            let mut r = Float::with_val(RAD_PREC, &self.rad);
            r.div_assign_round(&lo, Round::Up);
            r.div_assign_round(&denom, Round::Up);
            up_add(&r, &up_mul(&ulp(&re), &Float::with_val(RAD_PREC, 8)))
        };
        ComplexBall { re, im, rad }
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }

    pub fn pow_u32(&self, e: u32) -> Self {
        let mut acc = ComplexBall::from_f64(self.prec(), 1.0);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Inflate the radius by an explicit non-negative bound.
    pub fn inflate(&self, extra: &Float) -> Self {
        ComplexBall {
            re: self.re.clone(),
            im: self.im.clone(),
            rad: up_add(&self.rad, extra),
        }
    }

    /// Does this ball intersect `other`?
    pub fn overlaps(&self, other: &Self) -> bool {
        let d = self.sub(other);
        let mut dist = Float::with_val(RAD_PREC, &d.re);
        let hy = Float::with_val(RAD_PREC, dist.hypot_ref(&d.im));
        dist = hy;
        dist.sub_assign_round(&ulp(&d.re), Round::Down);
        dist <= d.rad
    }

    pub fn contains_zero(&self) -> bool {
        self.abs_lower() == 0
    }

    /// Radius as a power of two exponent (radius <= 2^k), or None for an
    /// exact ball.
    pub fn rad_exp(&self) -> Option<i32> {
        if self.rad.is_zero() {
            None
        } else {
            Some(self.rad.get_exp().unwrap_or(i32::MIN))
        }
    }

    pub fn rad_f64(&self) -> f64 {
        self.rad.to_f64()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// Midpoint printed to `digits` decimal digits.
    pub fn mid_string(&self, digits: usize) -> String {
        if self.is_real() {
            format!("{:.*e}", digits, self.re.to_f64())
        } else {
            format!(
                "{:.*e} + {:.*e}i",
                digits,
                self.re.to_f64(),
                digits,
                self.im.to_f64()
            )
        }
    }
}

impl fmt::Debug for ComplexBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{} + {}i ± 2^{}]",
            self.re,
            self.im,
            self.rad_exp().map_or(-9999, |e| e)
        )
    }
}

/// Ball for `exp(2πik/N)`.
pub fn root_of_unity_ball(prec: u32, n: u32, k: i64) -> ComplexBall {
    let k = k.rem_euclid(n as i64) as u32;
    // Exact special cases keep radii at zero for the common levels.
    let quarter = (n % 4 == 0).then(|| n / 4);
    if k == 0 {
        return ComplexBall::from_f64(prec, 1.0);
    }
    if 2 * k == n {
        return ComplexBall::from_f64(prec, -1.0);
    }
    if let Some(q) = quarter {
        if k == q {
            return ComplexBall {
                re: Float::with_val(prec, 0),
                im: Float::with_val(prec, 1),
                rad: rad_zero(),
            };
        }
        if k == 3 * q {
            return ComplexBall {
                re: Float::with_val(prec, 0),
                im: Float::with_val(prec, -1),
                rad: rad_zero(),
            };
        }
    }
    let theta = Float::with_val(prec, Constant::Pi) * 2u32 * k / n;
    let theta = Float::with_val(prec, theta);
    let (s, c) = theta.clone().sin_cos(Float::new(prec));
    let rad = up_mul(&ulp(&c), &Float::with_val(RAD_PREC, 16));
    ComplexBall {
        re: c,
        im: s,
        rad,
    }
}

/// Ball enclosure of a cyclotomic rational at `precision_bits` of working
/// precision; radius bounded by `2^{2-precision_bits}·(1+|x|)`.
pub fn cyc_to_ball(x: &CycRat, precision_bits: u32) -> ComplexBall {
    ComplexBall::from_cyc(precision_bits, x)
}

/// AGM-based complete elliptic integral of the first kind in the parameter
/// convention `K(m) = (π/2)·₂F₁(1/2,1/2;1;m)`, as plain floats (used by the
/// quadrature oracle, not by certified evaluation).
pub fn ellip_k_param(prec: u32, m: &Float) -> Float {
    let one = Float::with_val(prec, 1);
    let k1 = Float::with_val(prec, &one - m);
    let b = k1.sqrt();
    let a = one;
    let agm = Float::with_val(prec, a.agm_ref(&b));
    let pi = Float::with_val(prec, Constant::Pi);
    pi / (Float::with_val(prec, 2) * agm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::CycRat;

    #[test]
    fn embeds_gaussian_units() {
        let i = CycRat::i(4);
        let b = cyc_to_ball(&i, 64);
        assert!(b.re.to_f64().abs() < 1e-18);
        assert!((b.im.to_f64() - 1.0).abs() < 1e-18);
        let third = CycRat::from_frac(2, 1, 3);
        let b = cyc_to_ball(&third, 64);
        assert!((b.re.to_f64() - 1.0 / 3.0).abs() < 1e-18);
        assert!(b.rad_f64() < 2.0_f64.powi(-60));
        let half = CycRat::one(4)
            .add(&CycRat::i(4))
            .unwrap()
            .scale(&BigRat::from((1, 2)));
        let b = cyc_to_ball(&half, 64);
        assert!((b.re.to_f64() - 0.5).abs() < 1e-18);
        assert!((b.im.to_f64() - 0.5).abs() < 1e-18);
    }

    #[test]
    fn embedding_is_multiplicative_up_to_radius() {
        let x = CycRat::root_of_unity(8, 1)
            .scale(&BigRat::from((3, 7)))
            .add(&CycRat::from_frac(8, 1, 2))
            .unwrap();
        let y = CycRat::root_of_unity(8, 3)
            .scale(&BigRat::from((-2, 5)))
            .add(&CycRat::one(8))
            .unwrap();
        let xy = x.mul(&y).unwrap();
        let bx = cyc_to_ball(&x, 96);
        let by = cyc_to_ball(&y, 96);
        let bxy = cyc_to_ball(&xy, 96);
        assert!(bxy.overlaps(&bx.mul(&by)));
    }

    #[test]
    fn division_enclosure() {
        let a = ComplexBall::from_f64(64, 3.0);
        let b = ComplexBall::from_f64(64, 7.0);
        let q = a.div(&b);
        assert!((q.re.to_f64() - 3.0 / 7.0).abs() < 1e-15);
        assert!(q.rad_f64() < 1e-15);
    }

    #[test]
    fn increasing_precision_shrinks_radius() {
        let x = CycRat::root_of_unity(8, 1).scale(&BigRat::from((1, 3)));
        let lo = cyc_to_ball(&x, 64);
        let hi = cyc_to_ball(&x, 128);
        assert!(hi.rad_f64() <= lo.rad_f64());
        assert!(hi.rad_f64() < 2.0_f64.powi(-120));
    }

    #[test]
    fn agm_elliptic_value() {
        // K(0) = π/2
        let k0 = ellip_k_param(96, &Float::with_val(96, 0));
        let pi2 = Float::with_val(96, Constant::Pi) / 2u32;
        let d = Float::with_val(96, &k0 - &pi2).abs().to_f64();
        assert!(d < 1e-25);
        // K(1/2) = Γ(1/4)^2 / (4 sqrt(π)) ≈ 1.8540746773013719...
        let k = ellip_k_param(96, &Float::with_val(96, 0.5));
        assert!((k.to_f64() - 1.854074677301372).abs() < 1e-14);
    }
}
