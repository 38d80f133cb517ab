//! Exact multivariate polynomials over Q.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{LatticeBall, LatticeFunction};
use crate::limits;
use crate::rational::{common_denominator, format_rational, int, Rational};

/// Multi-index of exponents, one entry per variable.
pub type Exponents = Vec<u32>;

#[derive(Clone, PartialEq, Eq)]
pub struct MultivariatePolynomial {
    dim: usize,
    terms: BTreeMap<Exponents, Rational>,
}

impl MultivariatePolynomial {
    pub fn zero(dim: usize) -> Self {
        MultivariatePolynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    /// The coordinate function `x_{axis+1}`.
    pub fn variable(dim: usize, axis: usize) -> Self {
        let mut alpha = vec![0; dim];
        alpha[axis] = 1;
        let mut p = Self::zero(dim);
        p.add_term(alpha, Rational::one());
        p
    }

    pub fn monomial(alpha: Exponents, coeff: Rational) -> Self {
        let mut p = Self::zero(alpha.len());
        p.add_term(alpha, coeff);
        p
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponents, Rational)>,
    {
        let mut p = Self::zero(dim);
        for (alpha, c) in terms {
            if alpha.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: alpha.len(),
                });
            }
            p.add_term(alpha, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, alpha: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(alpha);
        use std::collections::btree_map::Entry;
        match entry {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, alpha: &[u32]) -> Rational {
        self.terms.get(alpha).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|a| a.iter().map(|&e| e as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        MultivariatePolynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(a, v)| (a.clone(), v * c))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.dim);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Places a univariate polynomial on variable `axis` of `Z^dim`.
    pub fn on_axis(&self, dim: usize, axis: usize) -> Self {
        assert_eq!(self.dim, 1, "on_axis expects a univariate polynomial");
        let mut p = Self::zero(dim);
        for (a, c) in &self.terms {
            let mut alpha = vec![0; dim];
            alpha[axis] = a[0];
            p.add_term(alpha, c.clone());
        }
        p
    }

    pub fn evaluate(&self, x: &[Rational]) -> Rational {
        assert_eq!(x.len(), self.dim);
        let mut total = Rational::zero();
        for (alpha, c) in &self.terms {
            let mut term = c.clone();
            for (xi, &e) in x.iter().zip(alpha) {
                if e > 0 {
                    term *= num_traits::pow(xi.clone(), e as usize);
                }
            }
            total += term;
        }
        total
    }

    pub fn evaluate_int(&self, x: &[i64]) -> Rational {
        let xs: Vec<Rational> = x.iter().map(|&v| int(v)).collect();
        self.evaluate(&xs)
    }

    pub fn partial_derivative(&self, axis: usize) -> Self {
        let mut p = Self::zero(self.dim);
        for (alpha, c) in &self.terms {
            let e = alpha[axis];
            if e == 0 {
                continue;
            }
            let mut beta = alpha.clone();
            beta[axis] -= 1;
            p.add_term(beta, c * int(e as i64));
        }
        p
    }

    /// Formal `Σ_l ∂²P/∂x_l²`.
    pub fn continuous_laplacian(&self) -> Self {
        (0..self.dim).fold(Self::zero(self.dim), |acc, axis| {
            &acc + &self.partial_derivative(axis).partial_derivative(axis)
        })
    }

    /// The polynomial `x ↦ P(x + offset)`.
    pub fn translate(&self, offset: &[Rational]) -> Self {
        assert_eq!(offset.len(), self.dim);
        let max_deg = self.degree() as u32;
        // powers[l][e] = (x_l + offset_l)^e
        let powers: Vec<Vec<Self>> = (0..self.dim)
            .map(|l| {
                let base = &Self::variable(self.dim, l) + &Self::constant(self.dim, offset[l].clone());
                let mut row = vec![Self::one(self.dim)];
                for e in 1..=max_deg as usize {
                    let next = &row[e - 1] * &base;
                    row.push(next);
                }
                row
            })
            .collect();
        let mut out = Self::zero(self.dim);
        for (alpha, c) in &self.terms {
            let mut term = Self::constant(self.dim, c.clone());
            for (l, &e) in alpha.iter().enumerate() {
                if e > 0 {
                    term = &term * &powers[l][e as usize];
                }
            }
            out = &out + &term;
        }
        out
    }

    /// Shift by `amount` along one axis.
    pub fn shift_axis(&self, axis: usize, amount: Rational) -> Self {
        let mut offset = vec![Rational::zero(); self.dim];
        offset[axis] = amount;
        self.translate(&offset)
    }

    /// Forward difference `P(x + e_axis) - P(x)`.
    pub fn forward_difference(&self, axis: usize) -> Self {
        &self.shift_axis(axis, Rational::one()) - self
    }

    /// Formal probabilistic lattice Laplacian `(1/2d) Σ_s P(x+s) - P(x)`.
    pub fn discrete_laplacian(&self) -> Self {
        let mut acc = Self::zero(self.dim);
        for axis in 0..self.dim {
            acc = &acc + &self.shift_axis(axis, Rational::one());
            acc = &acc + &self.shift_axis(axis, -Rational::one());
        }
        let avg = acc.scale(&Rational::new(BigInt::one(), BigInt::from(2 * self.dim)));
        &avg - self
    }

    /// Lattice harmonicity on all of `Z^d`, decided formally.
    pub fn is_lattice_harmonic(&self) -> bool {
        self.discrete_laplacian().is_zero()
    }

    /// Exact values at every point of `B_radius`.
    pub fn evaluate_on_ball(&self, radius: usize) -> Result<LatticeFunction> {
        limits::check_dimension(self.dim)?;
        let ball = LatticeBall::new(self.dim, radius)?;
        if self.is_zero() {
            return Ok(LatticeFunction::zero(ball));
        }
        let den = common_denominator(self.terms.values());
        let ints: Vec<(Vec<usize>, BigInt)> = self
            .terms
            .iter()
            .map(|(a, c)| {
                (
                    a.iter().map(|&e| e as usize).collect(),
                    c.numer() * (&den / c.denom()),
                )
            })
            .collect();
        let max_deg = self.degree();
        let r = radius as i64;

        // sum of |c_alpha| R^|alpha| bounds every intermediate partial sum
        let bound: BigInt = ints
            .iter()
            .map(|(a, c)| c.abs() * BigInt::from(radius.max(1)).pow(a.iter().sum::<usize>() as u32))
            .sum();
        let values: Vec<Rational> = if bound.bits() < 120 {
            let coeffs: Vec<(Vec<usize>, i128)> = ints
                .iter()
                .map(|(a, c)| (a.clone(), c.to_i128().expect("bounded coefficient")))
                .collect();
            // pow_table[e][x + R] = x^e
            let pow_table: Vec<Vec<i128>> = (0..=max_deg)
                .map(|e| (-r..=r).map(|x| (x as i128).pow(e as u32)).collect())
                .collect();
            (0..ball.len())
                .into_par_iter()
                .map(|i| {
                    let x = ball.point(i);
                    let mut acc: i128 = 0;
                    for (alpha, c) in &coeffs {
                        let mut term = *c;
                        for (xi, &e) in x.iter().zip(alpha) {
                            if e > 0 {
                                term *= pow_table[e][(xi + r) as usize];
                            }
                        }
                        acc += term;
                    }
                    Rational::new(BigInt::from(acc), den.clone())
                })
                .collect()
        } else {
            let pow_table: Vec<Vec<BigInt>> = (0..=max_deg)
                .map(|e| (-r..=r).map(|x| BigInt::from(x).pow(e as u32)).collect())
                .collect();
            (0..ball.len())
                .into_par_iter()
                .map(|i| {
                    let x = ball.point(i);
                    let mut acc = BigInt::zero();
                    for (alpha, c) in &ints {
                        let mut term = c.clone();
                        for (xi, &e) in x.iter().zip(alpha) {
                            if e > 0 {
                                term *= &pow_table[e][(xi + r) as usize];
                            }
                        }
                        acc += term;
                    }
                    Rational::new(acc, den.clone())
                })
                .collect()
        };
        LatticeFunction::new(ball, values)
    }
}

fn check_same_dim(a: &MultivariatePolynomial, b: &MultivariatePolynomial) {
    assert_eq!(a.dim, b.dim, "polynomials in different dimensions");
}

impl Add for &MultivariatePolynomial {
    type Output = MultivariatePolynomial;

    fn add(self, rhs: Self) -> MultivariatePolynomial {
        check_same_dim(self, rhs);
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultivariatePolynomial {
    type Output = MultivariatePolynomial;

    fn sub(self, rhs: Self) -> MultivariatePolynomial {
        check_same_dim(self, rhs);
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &MultivariatePolynomial {
    type Output = MultivariatePolynomial;

    fn mul(self, rhs: Self) -> MultivariatePolynomial {
        check_same_dim(self, rhs);
        let mut out = MultivariatePolynomial::zero(self.dim);
        for (a, c) in &self.terms {
            for (b, e) in &rhs.terms {
                let alpha = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(alpha, c * e);
            }
        }
        out
    }
}

impl Neg for &MultivariatePolynomial {
    type Output = MultivariatePolynomial;

    fn neg(self) -> MultivariatePolynomial {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for MultivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest degree first
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (i, (alpha, c)) in terms.into_iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { '-' } else { '+' })?;
            }
            let vars: Vec<String> = alpha
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(l, &e)| {
                    if e == 1 {
                        format!("x{}", l + 1)
                    } else {
                        format!("x{}^{}", l + 1, e)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", format_rational(&mag), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[d={}]({})", self.dim, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn x(dim: usize, axis: usize) -> MultivariatePolynomial {
        MultivariatePolynomial::variable(dim, axis)
    }

    #[test]
    fn continuous_laplacian_examples() {
        let (px, py) = (x(2, 0), x(2, 1));
        let p = &(&px * &px) - &(&py * &py);
        assert!(p.continuous_laplacian().is_zero());
        let sq = &x(1, 0) * &x(1, 0);
        assert_eq!(sq.continuous_laplacian(), MultivariatePolynomial::constant(1, int(2)));
        let cubic = &px.pow(3) - &(&px * &py.pow(2)).scale(&int(3));
        assert!(cubic.continuous_laplacian().is_zero());
    }

    #[test]
    fn translation_and_differences() {
        let p = &x(1, 0).pow(2) + &MultivariatePolynomial::constant(1, int(3));
        let shifted = p.shift_axis(0, ratio(1, 2));
        for v in -3..=3 {
            assert_eq!(shifted.evaluate_int(&[v]), p.evaluate(&[int(v) + ratio(1, 2)]));
        }
        // (x+1)^2 - x^2 = 2x + 1
        let diff = p.forward_difference(0);
        assert_eq!(diff, &x(1, 0).scale(&int(2)) + &MultivariatePolynomial::one(1));
        // discrete Laplacian of x^2 in one dimension is 1
        assert_eq!(x(1, 0).pow(2).discrete_laplacian(), MultivariatePolynomial::one(1));
    }

    #[test]
    fn evaluate_on_ball_examples() {
        let zero = MultivariatePolynomial::zero(2).evaluate_on_ball(3).unwrap();
        assert!(zero.is_zero());
        let xy = (&x(2, 0) * &x(2, 1)).evaluate_on_ball(1).unwrap();
        assert_eq!(xy.values().len(), 5);
        assert!(xy.is_zero());
        let f2 = (&x(1, 0).pow(2) - &MultivariatePolynomial::constant(1, ratio(1, 4)))
            .scale(&ratio(1, 2));
        let vals = f2.evaluate_on_ball(2).unwrap();
        let expected = [ratio(15, 8), ratio(3, 8), ratio(-1, 8), ratio(3, 8), ratio(15, 8)];
        assert_eq!(vals.values(), &expected);
    }

    #[test]
    fn big_coefficient_path_matches_pointwise() {
        let big = Rational::new(BigInt::from(10).pow(40) + 1, BigInt::from(7));
        let p = &(&x(2, 0).pow(5) * &x(2, 1)).scale(&big) + &x(2, 1);
        let f = p.evaluate_on_ball(4).unwrap();
        for (pt, v) in f.iter() {
            assert_eq!(*v, p.evaluate_int(pt));
        }
    }

    #[test]
    fn display_is_readable() {
        let p = &(&x(2, 0).pow(2) - &x(2, 1).pow(2)).scale(&ratio(1, 2))
            + &MultivariatePolynomial::constant(2, int(-3));
        assert_eq!(p.to_string(), "1/2*x1^2 - 1/2*x2^2 - 3");
    }
}
