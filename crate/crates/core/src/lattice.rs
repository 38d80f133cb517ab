//! Exact functions on l1 balls of `Z^d`.
//!
//! The Laplacian is the probabilistic one,
//! `(Δu)(x) = (1/2d) Σ_{s∈S} u(x+s) - u(x)` with `S = {±e_1, …, ±e_d}`, which
//! is exactly the operator in the heat equation `p(n+1,x) - p(n,x) = Δp(n,x)`
//! of the simple random walk. Applying it to a function on `B_R` yields a
//! function on `B_{R-1}`.
//!
//! Values are stored densely in the lexicographic order of the ball points.
//! Internally the stencils run on integer numerators over a common
//! denominator, so repeated Laplacians never normalise intermediate fractions.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::limits;
use crate::rational::{common_denominator, Rational};

struct BallGeometry {
    dim: usize,
    radius: usize,
    coords: Vec<i64>,
    // prefix[m][r][t] = number of points of B_r(Z^{m+1}) whose first coordinate is < t - r
    prefix: Vec<Vec<Vec<usize>>>,
}

/// The closed l1 ball `B_R = {x ∈ Z^d : |x_1| + … + |x_d| <= R}`.
#[derive(Clone)]
pub struct LatticeBall {
    inner: Arc<BallGeometry>,
}

impl fmt::Debug for LatticeBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B_{}(Z^{})", self.radius(), self.dim())
    }
}

impl PartialEq for LatticeBall {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.radius() == other.radius()
    }
}

impl Eq for LatticeBall {}

impl LatticeBall {
    pub fn new(dim: usize, radius: usize) -> Result<Self> {
        limits::check_dimension(dim)?;
        limits::check_cells(dim, radius)?;

        // cells[m][r] = |B_r(Z^m)|
        let mut cells = vec![vec![1usize; radius + 1]];
        for m in 1..=dim {
            let prev = &cells[m - 1];
            let row: Vec<usize> = (0..=radius)
                .map(|r| prev[r] + 2 * (0..r).map(|q| prev[q]).sum::<usize>())
                .collect();
            cells.push(row);
        }
        let prefix = (0..dim)
            .map(|m| {
                (0..=radius)
                    .map(|r| {
                        let mut acc = Vec::with_capacity(2 * r + 2);
                        let mut total = 0usize;
                        acc.push(0);
                        for v in -(r as i64)..=(r as i64) {
                            total += cells[m][r - v.unsigned_abs() as usize];
                            acc.push(total);
                        }
                        acc
                    })
                    .collect()
            })
            .collect();

        let len = cells[dim][radius];
        let mut coords = Vec::with_capacity(len * dim);
        let mut point = vec![0i64; dim];
        enumerate(&mut coords, &mut point, 0, radius as i64);
        debug_assert_eq!(coords.len(), len * dim);

        Ok(LatticeBall {
            inner: Arc::new(BallGeometry {
                dim,
                radius,
                coords,
                prefix,
            }),
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn radius(&self) -> usize {
        self.inner.radius
    }

    pub fn len(&self) -> usize {
        self.inner.coords.len() / self.inner.dim
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, index: usize) -> &[i64] {
        let d = self.inner.dim;
        &self.inner.coords[index * d..(index + 1) * d]
    }

    pub fn points(&self) -> impl Iterator<Item = &[i64]> + '_ {
        self.inner.coords.chunks_exact(self.inner.dim)
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        x.len() == self.dim() && l1_norm(x) <= self.radius() as u64
    }

    /// Position of `x` in the enumeration, `None` outside the ball.
    pub fn index_of(&self, x: &[i64]) -> Option<usize> {
        let g = &*self.inner;
        if x.len() != g.dim {
            return None;
        }
        let mut remaining = g.radius as i64;
        let mut index = 0usize;
        for (i, &v) in x.iter().enumerate() {
            if v.abs() > remaining {
                return None;
            }
            let m = g.dim - 1 - i;
            index += g.prefix[m][remaining as usize][(v + remaining) as usize];
            remaining -= v.abs();
        }
        Some(index)
    }

    /// Index of the origin.
    pub fn origin(&self) -> usize {
        self.index_of(&vec![0; self.dim()]).expect("origin lies in every ball")
    }

    pub fn with_radius(&self, radius: usize) -> Result<Self> {
        LatticeBall::new(self.dim(), radius)
    }
}

fn enumerate(out: &mut Vec<i64>, point: &mut [i64], axis: usize, remaining: i64) {
    if axis == point.len() {
        out.extend_from_slice(point);
        return;
    }
    for v in -remaining..=remaining {
        point[axis] = v;
        enumerate(out, point, axis + 1, remaining - v.abs());
    }
    point[axis] = 0;
}

pub fn l1_norm(x: &[i64]) -> u64 {
    x.iter().map(|v| v.unsigned_abs()).sum()
}

/// One of the `2d` generators `±e_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub axis: usize,
    pub positive: bool,
}

impl Generator {
    pub fn new(axis: usize, positive: bool) -> Self {
        Generator { axis, positive }
    }

    /// Interprets `v` as a generator; anything but a signed unit vector is rejected.
    pub fn from_vector(v: &[i64]) -> Result<Self> {
        let nonzero: Vec<(usize, i64)> = v
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, c)| c != 0)
            .collect();
        match nonzero.as_slice() {
            [(axis, 1)] => Ok(Generator::new(*axis, true)),
            [(axis, -1)] => Ok(Generator::new(*axis, false)),
            _ => Err(Error::InvalidGenerator(v.to_vec())),
        }
    }

    /// `+e_1, -e_1, +e_2, -e_2, …`
    pub fn all(dim: usize) -> Vec<Generator> {
        (0..dim)
            .flat_map(|axis| [Generator::new(axis, true), Generator::new(axis, false)])
            .collect()
    }

    pub fn step(&self) -> i64 {
        if self.positive {
            1
        } else {
            -1
        }
    }

    pub fn to_vector(&self, dim: usize) -> Vec<i64> {
        let mut v = vec![0; dim];
        v[self.axis] = self.step();
        v
    }
}

/// An exact rational-valued table on every point of a [`LatticeBall`].
#[derive(Clone, PartialEq)]
pub struct LatticeFunction {
    ball: LatticeBall,
    values: Vec<Rational>,
}

impl fmt::Debug for LatticeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LatticeFunction")
            .field("ball", &self.ball)
            .field("points", &self.values.len())
            .finish()
    }
}

/// Integer numerators over one shared denominator.
#[derive(Clone, Debug)]
pub(crate) struct ScaledTable {
    pub denominator: BigInt,
    pub numerators: Vec<BigInt>,
}

impl ScaledTable {
    fn into_values(self) -> Vec<Rational> {
        let den = self.denominator;
        self.numerators
            .into_par_iter()
            .map(|n| Rational::new(n, den.clone()))
            .collect()
    }
}

impl LatticeFunction {
    pub fn new(ball: LatticeBall, values: Vec<Rational>) -> Result<Self> {
        if values.len() != ball.len() {
            return Err(Error::InvalidParameter(format!(
                "{} values supplied for a ball of {} points",
                values.len(),
                ball.len()
            )));
        }
        Ok(LatticeFunction { ball, values })
    }

    pub fn from_fn<F>(ball: LatticeBall, f: F) -> Self
    where
        F: Fn(&[i64]) -> Rational + Sync,
    {
        let values = (0..ball.len())
            .into_par_iter()
            .map(|i| f(ball.point(i)))
            .collect();
        LatticeFunction { ball, values }
    }

    pub fn constant(ball: LatticeBall, c: Rational) -> Self {
        let values = vec![c; ball.len()];
        LatticeFunction { ball, values }
    }

    pub fn zero(ball: LatticeBall) -> Self {
        Self::constant(ball, Rational::zero())
    }

    pub fn ball(&self) -> &LatticeBall {
        &self.ball
    }

    pub fn dim(&self) -> usize {
        self.ball.dim()
    }

    pub fn radius(&self) -> usize {
        self.ball.radius()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, x: &[i64]) -> Option<&Rational> {
        self.ball.index_of(x).map(|i| &self.values[i])
    }

    pub fn value_at_origin(&self) -> &Rational {
        &self.values[self.ball.origin()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[i64], &Rational)> + '_ {
        self.ball.points().zip(self.values.iter())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    /// First point where the function is nonzero, in enumeration order.
    pub fn first_nonzero(&self) -> Option<(Vec<i64>, Rational)> {
        self.iter()
            .find(|(_, v)| !v.is_zero())
            .map(|(x, v)| (x.to_vec(), v.clone()))
    }

    pub fn restrict(&self, radius: usize) -> Result<Self> {
        if radius > self.radius() {
            return Err(Error::DomainTooSmall {
                radius: self.radius(),
                needed: radius,
            });
        }
        if radius == self.radius() {
            return Ok(self.clone());
        }
        let ball = self.ball.with_radius(radius)?;
        let values = ball
            .points()
            .map(|x| self.values[self.ball.index_of(x).expect("sub-ball point")].clone())
            .collect();
        Ok(LatticeFunction { ball, values })
    }

    pub fn square(&self) -> Self {
        let values = self.values.par_iter().map(|v| v * v).collect();
        LatticeFunction {
            ball: self.ball.clone(),
            values,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let values = self.values.par_iter().map(|v| v * c).collect();
        LatticeFunction {
            ball: self.ball.clone(),
            values,
        }
    }

    fn same_ball(&self, other: &Self) -> Result<()> {
        if self.ball != other.ball {
            return Err(Error::InvalidParameter(format!(
                "functions live on different balls: {:?} vs {:?}",
                self.ball, other.ball
            )));
        }
        Ok(())
    }

    /// `a·self + b·other` on a shared ball.
    pub fn linear_combination(&self, a: &Rational, other: &Self, b: &Rational) -> Result<Self> {
        self.same_ball(other)?;
        let values = self
            .values
            .par_iter()
            .zip(other.values.par_iter())
            .map(|(u, v)| a * u + b * v)
            .collect();
        Ok(LatticeFunction {
            ball: self.ball.clone(),
            values,
        })
    }

    pub(crate) fn scaled(&self) -> ScaledTable {
        let denominator = common_denominator(self.values.iter());
        let numerators = self
            .values
            .par_iter()
            .map(|v| v.numer() * (&denominator / v.denom()))
            .collect();
        ScaledTable {
            denominator,
            numerators,
        }
    }

    fn from_scaled(ball: LatticeBall, table: ScaledTable) -> Self {
        LatticeFunction {
            ball,
            values: table.into_values(),
        }
    }

    /// `Δu` on `B_{R-1}`.
    pub fn laplacian(&self) -> Result<Self> {
        self.laplacian_power(1)
    }

    /// The `k`-fold Laplacian, defined on `B_{R-k}`.
    pub fn laplacian_power(&self, k: usize) -> Result<Self> {
        if k > self.radius() {
            return Err(Error::DomainTooSmall {
                radius: self.radius(),
                needed: k,
            });
        }
        if k == 0 {
            return Ok(self.clone());
        }
        let mut ball = self.ball.clone();
        let mut table = self.scaled();
        let mut scale = BigInt::from(1);
        for _ in 0..k {
            let (next_ball, next) = scaled_laplacian_step(&ball, &table.numerators)?;
            ball = next_ball;
            table.numerators = next;
            scale *= 2 * self.dim();
        }
        table.denominator *= scale;
        Ok(Self::from_scaled(ball, table))
    }

    /// `(Δ^k u)(0)` for every `k <= R`, from one sweep of shrinking stencils.
    pub fn laplacian_powers_at_origin(&self) -> Result<Vec<Rational>> {
        let mut ball = self.ball.clone();
        let mut table = self.scaled();
        let mut den = table.denominator.clone();
        let mut out = Vec::with_capacity(self.radius() + 1);
        out.push(Rational::new(
            table.numerators[ball.origin()].clone(),
            den.clone(),
        ));
        for _ in 0..self.radius() {
            let (next_ball, next) = scaled_laplacian_step(&ball, &table.numerators)?;
            ball = next_ball;
            table.numerators = next;
            den *= 2 * self.dim();
            out.push(Rational::new(
                table.numerators[ball.origin()].clone(),
                den.clone(),
            ));
        }
        Ok(out)
    }

    /// `u_s(x) = u(x+s) - u(x)` on `B_{R-1}`.
    pub fn directional_difference(&self, s: Generator) -> Result<Self> {
        if s.axis >= self.dim() {
            return Err(Error::InvalidGenerator(s.to_vector(s.axis + 1)));
        }
        if self.radius() == 0 {
            return Err(Error::DomainTooSmall {
                radius: 0,
                needed: 1,
            });
        }
        let ball = self.ball.with_radius(self.radius() - 1)?;
        let values = (0..ball.len())
            .into_par_iter()
            .map(|i| {
                let x = ball.point(i);
                let mut y = x.to_vec();
                y[s.axis] += s.step();
                let here = &self.values[self.ball.index_of(x).expect("inner point")];
                let there = &self.values[self.ball.index_of(&y).expect("neighbor point")];
                there - here
            })
            .collect();
        Ok(LatticeFunction { ball, values })
    }

    /// Same as [`directional_difference`](Self::directional_difference) for a raw vector.
    pub fn difference_along(&self, s: &[i64]) -> Result<Self> {
        if s.len() != self.dim() {
            return Err(Error::InvalidGenerator(s.to_vec()));
        }
        self.directional_difference(Generator::from_vector(s)?)
    }

    /// Exact test `Δu ≡ 0` on `B_{R-1}`.
    pub fn is_harmonic(&self) -> Result<bool> {
        if self.radius() == 0 {
            return Err(Error::DomainTooSmall {
                radius: 0,
                needed: 1,
            });
        }
        let table = self.scaled();
        let (_, lap) = scaled_laplacian_step(&self.ball, &table.numerators)?;
        Ok(lap.par_iter().all(Zero::is_zero))
    }

    /// `(Δ^k u²)(0)` through the sum-of-squares identity
    /// `Δ^k u² = |S|^{-k} Σ_{s_1…s_k ∈ S} (u_{s_1…s_k})²`, valid for harmonic `u`.
    ///
    /// Differences commute, so the sum runs over multisets of generators
    /// weighted by their number of orderings.
    pub fn sos_laplacian_power(&self, k: usize) -> Result<Rational> {
        if k > self.radius() {
            return Err(Error::DomainTooSmall {
                radius: self.radius(),
                needed: k,
            });
        }
        if self.radius() > 0 && !self.is_harmonic()? {
            return Err(Error::NotHarmonic(
                "sum-of-squares formula needs Δu ≡ 0 on the interior".into(),
            ));
        }
        let generators = Generator::all(self.dim());
        let start = self.restrict(k)?;
        let mut total = Rational::zero();
        let mut multiplicities = vec![0usize; generators.len()];
        sos_recurse(
            &start,
            &generators,
            0,
            k,
            &mut multiplicities,
            &mut total,
        )?;
        let norm = BigInt::from(generators.len()).pow(k as u32);
        Ok(total / Rational::from_integer(norm))
    }
}

fn sos_recurse(
    f: &LatticeFunction,
    generators: &[Generator],
    first: usize,
    remaining: usize,
    multiplicities: &mut [usize],
    total: &mut Rational,
) -> Result<()> {
    if remaining == 0 {
        let value = f.value_at_origin();
        if !value.is_zero() {
            let depth: usize = multiplicities.iter().sum();
            let orderings = multinomial(depth, multiplicities);
            *total += value * value * Rational::from_integer(orderings);
        }
        return Ok(());
    }
    if f.is_zero() {
        return Ok(());
    }
    for (g, s) in generators.iter().enumerate().skip(first) {
        let next = f.directional_difference(*s)?;
        multiplicities[g] += 1;
        sos_recurse(&next, generators, g, remaining - 1, multiplicities, total)?;
        multiplicities[g] -= 1;
    }
    Ok(())
}

fn multinomial(n: usize, parts: &[usize]) -> BigInt {
    let fact = |m: usize| (1..=m).fold(BigInt::from(1), |acc, j| acc * j);
    parts
        .iter()
        .fold(fact(n), |acc, &p| acc / fact(p))
}

/// One integer stencil step: `out(x) = Σ_s in(x+s) - 2d·in(x)` on `B_{R-1}`.
pub(crate) fn scaled_laplacian_step(
    ball: &LatticeBall,
    values: &[BigInt],
) -> Result<(LatticeBall, Vec<BigInt>)> {
    if ball.radius() == 0 {
        return Err(Error::DomainTooSmall {
            radius: 0,
            needed: 1,
        });
    }
    let d = ball.dim();
    let target = ball.with_radius(ball.radius() - 1)?;
    let center_weight = BigInt::from(2 * d);
    let out = (0..target.len())
        .into_par_iter()
        .map(|i| {
            let x = target.point(i);
            let mut y = x.to_vec();
            let mut acc = BigInt::zero();
            for axis in 0..d {
                y[axis] += 1;
                acc += &values[ball.index_of(&y).expect("neighbor inside ball")];
                y[axis] -= 2;
                acc += &values[ball.index_of(&y).expect("neighbor inside ball")];
                y[axis] += 1;
            }
            let center = &values[ball.index_of(x).expect("point inside ball")];
            if !center.is_zero() {
                acc -= center * &center_weight;
            }
            acc
        })
        .collect();
    Ok((target, out))
}

/// Sign-aware helper used by positivity checks.
pub fn all_nonnegative(f: &LatticeFunction) -> bool {
    f.values().iter().all(|v| !v.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn func(dim: usize, radius: usize, f: impl Fn(&[i64]) -> Rational + Sync) -> LatticeFunction {
        LatticeFunction::from_fn(LatticeBall::new(dim, radius).unwrap(), f)
    }

    #[test]
    fn ball_enumeration_and_ranking_agree() {
        for (d, r) in [(1, 4), (2, 5), (3, 4), (4, 2)] {
            let ball = LatticeBall::new(d, r).unwrap();
            assert_eq!(ball.len() as u128, limits::ball_cells(d, r));
            for (i, x) in ball.points().enumerate() {
                assert_eq!(ball.index_of(x), Some(i));
                assert!(l1_norm(x) <= r as u64);
            }
            let mut outside = vec![0i64; d];
            outside[0] = r as i64 + 1;
            assert_eq!(ball.index_of(&outside), None);
        }
        let ball = LatticeBall::new(2, 1).unwrap();
        let pts: Vec<Vec<i64>> = ball.points().map(|p| p.to_vec()).collect();
        assert_eq!(pts, vec![vec![-1, 0], vec![0, -1], vec![0, 0], vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn laplacian_of_constant_is_zero() {
        let u = func(3, 3, |_| ratio(7, 3));
        let lap = u.laplacian().unwrap();
        assert_eq!(lap.radius(), 2);
        assert!(lap.is_zero());
    }

    #[test]
    fn laplacian_of_square_in_one_dimension() {
        let u = func(1, 2, |x| int(x[0] * x[0]));
        let lap = u.laplacian().unwrap();
        assert_eq!(lap.radius(), 1);
        assert!(lap.values().iter().all(|v| *v == int(1)));
        assert!(u.laplacian_power(2).unwrap().is_zero());
        assert_eq!(u.laplacian_power(0).unwrap(), u);
    }

    #[test]
    fn xy_is_harmonic_by_four_neighbor_check() {
        let u = func(2, 3, |x| int(x[0] * x[1]));
        let lap = u.laplacian().unwrap();
        // direct four-neighbour oracle
        for (x, v) in lap.iter() {
            let (a, b) = (x[0], x[1]);
            let nb = (a + 1) * b + (a - 1) * b + a * (b + 1) + a * (b - 1);
            assert_eq!(*v, ratio(nb, 4) - int(a * b));
        }
        assert!(lap.is_zero());
        let sq = u.square().laplacian().unwrap();
        assert!(all_nonnegative(&sq));
    }

    #[test]
    fn domain_errors() {
        let u = func(2, 0, |_| int(1));
        assert_eq!(
            u.laplacian().unwrap_err(),
            Error::DomainTooSmall { radius: 0, needed: 1 }
        );
        assert!(u.is_harmonic().is_err());
        let v = func(2, 2, |_| int(1));
        assert!(matches!(v.laplacian_power(3), Err(Error::DomainTooSmall { .. })));
        assert_eq!(
            v.difference_along(&[1, 1]).unwrap_err(),
            Error::InvalidGenerator(vec![1, 1])
        );
        assert!(v.difference_along(&[2, 0]).is_err());
    }

    #[test]
    fn directional_differences() {
        let c = func(2, 2, |_| int(4));
        assert!(c.difference_along(&[0, 1]).unwrap().is_zero());
        let lin = func(1, 3, |x| int(x[0]));
        let d = lin.difference_along(&[1]).unwrap();
        assert!(d.values().iter().all(|v| *v == int(1)));
        let xy = func(2, 3, |x| int(x[0] * x[1]));
        let d = xy.difference_along(&[0, 1]).unwrap();
        for (x, v) in d.iter() {
            assert_eq!(*v, int(x[0]));
        }
    }

    #[test]
    fn harmonicity_examples() {
        assert!(func(2, 3, |_| int(5)).is_harmonic().unwrap());
        assert!(!func(1, 3, |x| int(x[0] * x[0])).is_harmonic().unwrap());
        assert!(func(2, 4, |x| int(x[0] * x[0] - x[1] * x[1])).is_harmonic().unwrap());
    }

    #[test]
    fn sum_of_squares_examples() {
        let u = func(2, 3, |x| int(x[0] * x[1] + 2));
        assert_eq!(u.sos_laplacian_power(0).unwrap(), int(4));
        let lin = func(1, 2, |x| int(x[0]));
        assert_eq!(lin.sos_laplacian_power(1).unwrap(), int(1));
        let xy = func(2, 3, |x| int(x[0] * x[1]));
        assert_eq!(xy.sos_laplacian_power(2).unwrap(), ratio(1, 2));
        assert_eq!(
            xy.square().laplacian_power(2).unwrap().value_at_origin(),
            &ratio(1, 2)
        );
        let bad = func(1, 3, |x| int(x[0] * x[0]));
        assert!(matches!(bad.sos_laplacian_power(1), Err(Error::NotHarmonic(_))));
    }

    #[test]
    fn powers_at_origin_match_iterates() {
        let u = func(2, 5, |x| int(x[0] * x[0] * x[0] - 3 * x[0] * x[1] * x[1] + x[1]));
        let sq = u.square();
        let sweep = sq.laplacian_powers_at_origin().unwrap();
        for (k, value) in sweep.iter().enumerate() {
            assert_eq!(value, sq.laplacian_power(k).unwrap().value_at_origin());
        }
    }

    #[test]
    fn linear_combination_requires_same_ball() {
        let a = func(2, 2, |x| int(x[0]));
        let b = func(2, 3, |x| int(x[1]));
        assert!(a.linear_combination(&int(1), &b, &int(1)).is_err());
    }
}
