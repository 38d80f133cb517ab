//! Certified rational enclosures of real numbers.
//!
//! Every transcendental quantity (`e^x`, `ln x`, `√x`, `n^r`, `b^{-n^r}`) is
//! returned as an interval `[lo, hi]` of rationals that provably contains the
//! true value. Bounds are dyadic and rounded outward, so their size stays
//! proportional to the requested precision.
//!
//! - `exp`: argument reduction `x / 2^s <= 1/2`, Taylor sums with the tail
//!   bounded by twice the next term, then `s` squarings.
//! - `ln`: `x = 2^e m` with `m ∈ [3/4, 3/2)`, `ln m = 2 atanh((m-1)/(m+1))`
//!   and `ln 2 = 2 atanh(1/3)`; atanh tails are bounded by `9/8` times the
//!   next term.
//! - `sqrt`: integer square roots of the scaled numerator.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{
    approx_log2, format_sci_directed, int, ratio, round_down, round_up, scale_pow2, serde_str,
    Rational,
};

/// A closed interval `[lo, hi]` known to contain a real number.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealEnclosure {
    #[serde(with = "serde_str")]
    pub lo: Rational,
    #[serde(with = "serde_str")]
    pub hi: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

impl fmt::Debug for RealEnclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_sci_directed(&self.lo, 8, false), format_sci_directed(&self.hi, 8, true))?;
        if let Some(t) = &self.target {
            write!(f, " ({t})")?;
        }
        Ok(())
    }
}

impl RealEnclosure {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "empty enclosure");
        RealEnclosure { lo, hi, target: None }
    }

    pub fn exact(v: Rational) -> Self {
        RealEnclosure::new(v.clone(), v)
    }

    pub fn zero() -> Self {
        Self::exact(Rational::zero())
    }

    pub fn one() -> Self {
        Self::exact(Rational::one())
    }

    pub fn labeled(mut self, target: impl Into<String>) -> Self {
        self.target = Some(target.into());
        self
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// Width relative to the larger endpoint magnitude (zero for exact values).
    pub fn relative_width(&self) -> Rational {
        let mag = std::cmp::max(self.lo.abs(), self.hi.abs());
        if mag.is_zero() {
            Rational::zero()
        } else {
            self.width() / mag
        }
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_enclosure(&self, other: &RealEnclosure) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn is_nonnegative(&self) -> bool {
        !self.lo.is_negative()
    }

    pub fn add(&self, other: &RealEnclosure) -> Self {
        RealEnclosure::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn sub(&self, other: &RealEnclosure) -> Self {
        RealEnclosure::new(&self.lo - &other.hi, &self.hi - &other.lo)
    }

    pub fn neg(&self) -> Self {
        RealEnclosure::new(-&self.hi, -&self.lo)
    }

    pub fn mul(&self, other: &RealEnclosure) -> Self {
        if self.is_nonnegative() && other.is_nonnegative() {
            return RealEnclosure::new(&self.lo * &other.lo, &self.hi * &other.hi);
        }
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = products.iter().min().expect("four products").clone();
        let hi = products.iter().max().expect("four products").clone();
        RealEnclosure::new(lo, hi)
    }

    pub fn mul_rational(&self, c: &Rational) -> Self {
        if c.is_negative() {
            RealEnclosure::new(&self.hi * c, &self.lo * c)
        } else {
            RealEnclosure::new(&self.lo * c, &self.hi * c)
        }
    }

    /// `1/x` for an interval of one strict sign.
    pub fn recip(&self) -> Self {
        assert!(
            self.lo.is_positive() || self.hi.is_negative(),
            "reciprocal of an interval containing 0"
        );
        RealEnclosure::new(self.hi.recip(), self.lo.recip())
    }

    pub fn max(&self, other: &RealEnclosure) -> Self {
        RealEnclosure::new(
            std::cmp::max(&self.lo, &other.lo).clone(),
            std::cmp::max(&self.hi, &other.hi).clone(),
        )
    }

    /// Outward rounding to dyadic endpoints with about `bits` significant bits.
    pub fn rounded(&self, bits: u32) -> Self {
        RealEnclosure {
            lo: round_down(&self.lo, bits),
            hi: round_up(&self.hi, bits),
            target: self.target.clone(),
        }
    }

    /// Certainly `<= other` (every point of `self` is `<=` every point of `other`).
    pub fn certainly_le(&self, other: &RealEnclosure) -> bool {
        self.hi <= other.lo
    }

    /// Certainly `> other`.
    pub fn certainly_gt(&self, other: &RealEnclosure) -> bool {
        self.lo > other.hi
    }
}

fn guard(bits: u32) -> u32 {
    bits.max(8) + 16
}

/// Bounds of `exp(x)` for `x >= 0`.
fn exp_bounds_nonneg(x: &Rational, bits: u32) -> (Rational, Rational) {
    if x.is_zero() {
        return (Rational::one(), Rational::one());
    }
    let s = (approx_log2(x) + 2).max(0);
    let g = guard(bits) + s as u32;
    let y = scale_pow2(x, -s);
    let y_lo = round_down(&y, g);
    let y_hi = round_up(&y, g);
    let tol = scale_pow2(&Rational::one(), -(g as i64) - 2);

    let (mut sum_lo, mut sum_hi) = (Rational::one(), Rational::one());
    let (mut t_lo, mut t_hi) = (Rational::one(), Rational::one());
    let mut j = 1i64;
    loop {
        t_lo = round_down(&(&t_lo * &y_lo / int(j)), g);
        t_hi = round_up(&(&t_hi * &y_hi / int(j)), g);
        sum_lo += &t_lo;
        sum_hi += &t_hi;
        j += 1;
        if t_hi < tol {
            break;
        }
    }
    // tail Σ_{i >= j} y^i / i! <= 2 y^j / j! since y <= 1/2
    let next = &t_hi * &y_hi / int(j);
    sum_hi += next * int(2);
    let (mut lo, mut hi) = (round_down(&sum_lo, g), round_up(&sum_hi, g));
    for _ in 0..s {
        lo = round_down(&(&lo * &lo), g);
        hi = round_up(&(&hi * &hi), g);
    }
    (lo, hi)
}

/// `e^x`.
pub fn enclose_exp(x: &Rational, bits: u32) -> RealEnclosure {
    let out = if x.is_negative() {
        let (lo, hi) = exp_bounds_nonneg(&-x, bits);
        RealEnclosure::new(hi.recip(), lo.recip())
    } else {
        let (lo, hi) = exp_bounds_nonneg(x, bits);
        RealEnclosure::new(lo, hi)
    };
    if out.is_exact() {
        out
    } else {
        out.rounded(bits + 8)
    }
}

/// `e^x` for every `x` in the interval.
pub fn enclose_exp_interval(x: &RealEnclosure, bits: u32) -> RealEnclosure {
    if x.is_exact() {
        return enclose_exp(&x.lo, bits);
    }
    RealEnclosure::new(enclose_exp(&x.lo, bits).lo, enclose_exp(&x.hi, bits).hi)
}

/// Bounds of `atanh(z)` for `0 <= z <= 1/3`.
fn atanh_bounds(z: &Rational, bits: u32) -> (Rational, Rational) {
    if z.is_zero() {
        return (Rational::zero(), Rational::zero());
    }
    let g = guard(bits);
    let z_lo = round_down(z, g);
    let z_hi = round_up(z, g);
    let z2_lo = round_down(&(&z_lo * &z_lo), g);
    let z2_hi = round_up(&(&z_hi * &z_hi), g);
    let tol = scale_pow2(&z_lo, -(g as i64) - 2);
    let (mut p_lo, mut p_hi) = (z_lo.clone(), z_hi.clone());
    let (mut sum_lo, mut sum_hi) = (z_lo, z_hi);
    let mut j = 1i64;
    loop {
        p_lo = round_down(&(&p_lo * &z2_lo), g);
        p_hi = round_up(&(&p_hi * &z2_hi), g);
        let t_lo = round_down(&(&p_lo / int(2 * j + 1)), g);
        let t_hi = round_up(&(&p_hi / int(2 * j + 1)), g);
        sum_lo += t_lo;
        sum_hi += &t_hi;
        j += 1;
        if t_hi < tol {
            break;
        }
    }
    // tail <= next / (1 - z²) <= 9/8 · next
    let next = &p_hi * &z2_hi / int(2 * j + 1);
    sum_hi += next * ratio(9, 8);
    (round_down(&sum_lo, g), round_up(&sum_hi, g))
}

fn ln2(bits: u32) -> RealEnclosure {
    let (lo, hi) = atanh_bounds(&ratio(1, 3), bits);
    RealEnclosure::new(lo * int(2), hi * int(2))
}

/// `ln x` for `x > 0`.
pub fn enclose_ln(x: &Rational, bits: u32) -> Result<RealEnclosure> {
    if !x.is_positive() {
        return Err(Error::InvalidParameter(format!("ln of non-positive {x}")));
    }
    if x.is_one() {
        return Ok(RealEnclosure::zero());
    }
    let mut e = approx_log2(x);
    let mut m = scale_pow2(x, -e);
    while m >= ratio(3, 2) {
        e += 1;
        m = scale_pow2(&m, -1);
    }
    while m < ratio(3, 4) {
        e -= 1;
        m = scale_pow2(&m, 1);
    }
    let z = (&m - Rational::one()) / (&m + Rational::one());
    let g = guard(bits);
    let (a_lo, a_hi) = atanh_bounds(&z.abs(), g);
    let ln_m = if z.is_negative() {
        RealEnclosure::new(-a_hi * int(2), -a_lo * int(2))
    } else {
        RealEnclosure::new(a_lo * int(2), a_hi * int(2))
    };
    let extra = 64 - (e.unsigned_abs().leading_zeros());
    let out = ln2(g + extra).mul_rational(&int(e)).add(&ln_m);
    Ok(out.rounded(bits + 8))
}

pub fn enclose_ln_interval(x: &RealEnclosure, bits: u32) -> Result<RealEnclosure> {
    if x.is_exact() {
        return enclose_ln(&x.lo, bits);
    }
    Ok(RealEnclosure::new(
        enclose_ln(&x.lo, bits)?.lo,
        enclose_ln(&x.hi, bits)?.hi,
    ))
}

fn sqrt_bound(q: &Rational, bits: u32, up: bool) -> Rational {
    if q.is_zero() {
        return Rational::zero();
    }
    // √(a/b) = √(ab) / b, scaled by 4^t for enough significant bits
    let ab = q.numer() * q.denom();
    let want = 2 * (bits as i64 + 8);
    let t = ((want - ab.bits() as i64) / 2 + 1).max(0) as u64;
    let scaled = &ab << (2 * t);
    let mut r = scaled.sqrt();
    if up && &r * &r != scaled {
        r += 1;
    }
    let v = Rational::new(r, q.denom() << t);
    if up {
        round_up(&v, bits + 8)
    } else {
        round_down(&v, bits + 8)
    }
}

/// `√x` for a non-negative interval.
pub fn enclose_sqrt(x: &RealEnclosure, bits: u32) -> Result<RealEnclosure> {
    if x.lo.is_negative() {
        return Err(Error::InvalidParameter("square root of a negative interval".into()));
    }
    let exact = |q: &Rational| -> Option<Rational> {
        let a = q.numer().sqrt();
        let b = q.denom().sqrt();
        (&a * &a == *q.numer() && &b * &b == *q.denom()).then(|| Rational::new(a, b))
    };
    if x.is_exact() {
        if let Some(r) = exact(&x.lo) {
            return Ok(RealEnclosure::exact(r));
        }
    }
    Ok(RealEnclosure::new(
        exact(&x.lo).unwrap_or_else(|| sqrt_bound(&x.lo, bits, false)),
        exact(&x.hi).unwrap_or_else(|| sqrt_bound(&x.hi, bits, true)),
    ))
}

fn rational_pow(base: &Rational, exp: i64) -> Rational {
    let mag = base.pow(exp.unsigned_abs() as i32);
    if exp < 0 {
        mag.recip()
    } else {
        mag
    }
}

/// `n^r`, exact whenever `n` is a perfect power matching the denominator of `r`.
pub fn power_of_n(n: u64, r: &Rational, bits: u32) -> Result<RealEnclosure> {
    if n == 0 {
        return match r.numer().sign() {
            num_bigint::Sign::Plus => Ok(RealEnclosure::zero()),
            num_bigint::Sign::NoSign => Ok(RealEnclosure::one()),
            num_bigint::Sign::Minus => Err(Error::InvalidParameter("0 to a negative power".into())),
        };
    }
    let p = r.numer().to_i64();
    let q = r.denom().to_u32();
    if let (Some(p), Some(q)) = (p, q) {
        let root = BigUint::from(n).nth_root(q);
        if root.pow(q) == BigUint::from(n) && p.unsigned_abs() <= 1 << 20 {
            return Ok(RealEnclosure::exact(rational_pow(
                &Rational::from_integer(BigInt::from(root)),
                p,
            )));
        }
    }
    let ln_n = enclose_ln(&Rational::from_integer(BigInt::from(n)), bits + 16)?;
    Ok(enclose_exp_interval(&ln_n.mul_rational(r), bits))
}

/// `x^a` for `x >= 0` and an interval exponent `a >= 0`.
pub fn enclose_power(x: &RealEnclosure, a: &RealEnclosure, bits: u32) -> Result<RealEnclosure> {
    if x.lo.is_negative() || a.lo.is_negative() {
        return Err(Error::InvalidParameter("power needs x >= 0 and a >= 0".into()));
    }
    if x.hi.is_zero() {
        if a.lo.is_zero() {
            return Err(Error::InvalidParameter("0^0 within the enclosure".into()));
        }
        return Ok(RealEnclosure::zero());
    }
    if x.lo.is_zero() {
        // monotone in x; the upper end bounds every value
        let ln_hi = enclose_ln(&x.hi, bits + 16)?;
        let hi = enclose_exp_interval(&ln_hi.mul(a), bits).hi;
        return Ok(RealEnclosure::new(Rational::zero(), hi));
    }
    if a.is_exact() && a.lo.is_integer() && a.lo <= int(1 << 20) {
        let e = a.lo.to_integer().to_i64().expect("small exponent");
        return Ok(RealEnclosure::new(
            rational_pow(&x.lo, e),
            rational_pow(&x.hi, e),
        ));
    }
    let ln_x = enclose_ln_interval(x, bits + 16)?;
    Ok(enclose_exp_interval(&ln_x.mul(a), bits))
}

/// `base^{-y}` for `base > 0` and every `y` in the interval.
pub fn enclose_inverse_power(base: &Rational, y: &RealEnclosure, bits: u32) -> Result<RealEnclosure> {
    if !base.is_positive() {
        return Err(Error::InvalidParameter(format!("base {base} must be positive")));
    }
    if base.is_one() {
        return Ok(RealEnclosure::one());
    }
    if y.is_exact() && y.lo.is_integer() && y.lo.abs() <= int(1 << 16) {
        let e = y.lo.to_integer().to_i64().expect("small exponent");
        return Ok(RealEnclosure::exact(rational_pow(base, -e)));
    }
    let magnitude = approx_log2(&std::cmp::max(y.lo.abs(), y.hi.abs())).max(0) as u32;
    let ln_b = enclose_ln(base, bits + 16 + magnitude)?;
    Ok(enclose_exp_interval(&ln_b.mul(y).neg(), bits))
}

/// `base^{-n^r}` for `base > 0`.
pub fn enclose_pow(base: &Rational, n: u64, r: &Rational, bits: u32) -> Result<RealEnclosure> {
    let y = power_of_n(n, r, bits + 16)?;
    enclose_inverse_power(base, &y, bits)
}
