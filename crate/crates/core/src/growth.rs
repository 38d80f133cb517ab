//! The growth function `Q_u(n) = E u(X_n)^2` of a lattice function.
//!
//! `Q_u(n) = Σ_x u(x)^2 W(n, x) / (2d)^n` is computed exactly from walk
//! counts. For harmonic `u` its Newton coefficients are
//! `a_k = Q^{(k)}(0) = Δ^k(u²)(0)`, and `Q_u(n) = Σ_k a_k binom(n, k)`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Generator, LatticeFunction};
use crate::polynomial::MultivariatePolynomial;
use crate::rational::{binomial, factorial, from_biguint, serde_str, to_f64, Rational};
use crate::walk::{OrbitSpace, WalkCounter};

// Σ over each orbit of the squared integer numerators of u.
fn orbit_square_sums(u: &LatticeFunction, space: &OrbitSpace) -> Result<(Vec<BigUint>, BigInt)> {
    let v = u.restrict(space.radius())?;
    let table = v.scaled();
    let mut sums = vec![BigUint::zero(); space.len()];
    let orbit: Vec<usize> = v
        .ball()
        .points()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|x| space.index_of(x).expect("ball point lies in orbit space"))
        .collect();
    for (i, num) in orbit.into_iter().zip(&table.numerators) {
        if !num.is_zero() {
            sums[i] += num.magnitude() * num.magnitude();
        }
    }
    Ok((sums, table.denominator))
}

/// `Q_u(0..=n_max)` for several functions on the same lattice, sharing one
/// walk-count sweep.
pub fn growth_values_batch(functions: &[LatticeFunction], n_max: usize) -> Result<Vec<Vec<Rational>>> {
    let Some(first) = functions.first() else {
        return Ok(Vec::new());
    };
    let dim = first.dim();
    for u in functions {
        if u.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: u.dim(),
            });
        }
        if n_max > u.radius() {
            return Err(Error::OutOfRange {
                index: n_max as u64,
                max: u.radius() as u64,
            });
        }
    }
    let counter = WalkCounter::new(dim, n_max)?;
    let space = counter.space().clone();
    let sums: Vec<(Vec<BigUint>, BigInt)> = functions
        .iter()
        .map(|u| orbit_square_sums(u, &space))
        .collect::<Result<_>>()?;
    let mut out = vec![Vec::with_capacity(n_max + 1); functions.len()];
    let mut walk_total = BigInt::one();
    for table in counter {
        for ((f, den), values) in sums.iter().zip(out.iter_mut()) {
            let weighted: BigUint = (0..space.len())
                .into_par_iter()
                .filter(|&i| !f[i].is_zero())
                .map(|i| table.orbit_count(i) * &f[i])
                .sum();
            values.push(Rational::new(BigInt::from(weighted), den * den * &walk_total));
        }
        walk_total *= 2 * dim;
    }
    Ok(out)
}

/// `Q_u(0), …, Q_u(n_max)`.
pub fn growth_values(u: &LatticeFunction, n_max: usize) -> Result<Vec<Rational>> {
    Ok(growth_values_batch(std::slice::from_ref(u), n_max)?.remove(0))
}

/// `Q_u(n)`; needs `n <= R` so that the walk stays inside the domain.
pub fn growth_q(u: &LatticeFunction, n: usize) -> Result<Rational> {
    Ok(growth_values(u, n)?.pop().expect("non-empty"))
}

/// Values `Q(0..=N)`, the forward-difference triangle and Newton coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthReport {
    #[serde(with = "serde_str::vec")]
    pub values: Vec<Rational>,
    /// `triangle[k][n] = Q^{(k)}(n)` for `k + n <= N`.
    #[serde(with = "serde_str::matrix")]
    pub triangle: Vec<Vec<Rational>>,
    #[serde(with = "serde_str::vec")]
    pub newton: Vec<Rational>,
    /// `Δ^k(u²)(0)`, when computed from the function itself.
    #[serde(with = "serde_str::opt_vec", default, skip_serializing_if = "Option::is_none")]
    pub laplacian_coefficients: Option<Vec<Rational>>,
}

impl GrowthReport {
    pub fn from_values(values: Vec<Rational>) -> Self {
        let mut triangle = Vec::with_capacity(values.len());
        let mut row = values.clone();
        while !row.is_empty() {
            let next: Vec<Rational> = row.windows(2).map(|w| &w[1] - &w[0]).collect();
            triangle.push(row);
            row = next;
        }
        let newton = triangle.iter().map(|r| r[0].clone()).collect();
        GrowthReport {
            values,
            triangle,
            newton,
            laplacian_coefficients: None,
        }
    }

    /// Largest `n` with a known value.
    pub fn n_max(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn value(&self, n: usize) -> Result<&Rational> {
        self.values.get(n).ok_or(Error::OutOfRange {
            index: n as u64,
            max: self.n_max() as u64,
        })
    }

    pub fn difference(&self, k: usize, n: usize) -> Option<&Rational> {
        self.triangle.get(k).and_then(|row| row.get(n))
    }

    /// `Σ_k a_k binom(n, k)`.
    pub fn newton_sum(&self, n: u64) -> Rational {
        self.newton
            .iter()
            .enumerate()
            .filter(|(k, a)| *k as u64 <= n && !a.is_zero())
            .map(|(k, a)| a * from_biguint(binomial(n, k as u64)))
            .sum()
    }

    /// `c · Q`; the report of `√c · u`.
    pub fn scaled(&self, c: &Rational) -> Self {
        let mul = |v: &Vec<Rational>| v.iter().map(|x| x * c).collect::<Vec<_>>();
        GrowthReport {
            values: mul(&self.values),
            triangle: self.triangle.iter().map(mul).collect(),
            newton: mul(&self.newton),
            laplacian_coefficients: self.laplacian_coefficients.as_ref().map(mul),
        }
    }
}

fn attach_dual(mut report: GrowthReport, u: &LatticeFunction) -> Result<GrowthReport> {
    let coefficients = u
        .restrict(report.n_max())?
        .square()
        .laplacian_powers_at_origin()?;
    if let Some(k) = (0..coefficients.len()).find(|&k| coefficients[k] != report.newton[k]) {
        return Err(Error::Inconsistent(format!(
            "Q^({k})(0) = {} but Δ^{k}(u²)(0) = {}",
            report.newton[k], coefficients[k]
        )));
    }
    report.laplacian_coefficients = Some(coefficients);
    Ok(report)
}

/// Report for `n = 0..=R`; the Newton coefficients are computed twice
/// (differences of `Q` and iterated Laplacians of `u²`) and must agree.
pub fn growth_report(u: &LatticeFunction) -> Result<GrowthReport> {
    growth_report_to(u, u.radius())
}

pub fn growth_report_to(u: &LatticeFunction, n_max: usize) -> Result<GrowthReport> {
    let values = growth_values(u, n_max)?;
    attach_dual(GrowthReport::from_values(values), u)
}

/// Reports for several functions over a shared walk sweep.
pub fn growth_reports_batch(functions: &[LatticeFunction], n_max: usize) -> Result<Vec<GrowthReport>> {
    growth_values_batch(functions, n_max)?
        .into_iter()
        .zip(functions)
        .map(|(values, u)| attach_dual(GrowthReport::from_values(values), u))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonicityVerdict {
    pub holds: bool,
    /// First negative `Q^{(k)}(n)`, scanning `k` upward and then `n`.
    pub first_violation: Option<(usize, usize, Rational)>,
}

pub fn check_absolute_monotonicity(report: &GrowthReport) -> MonotonicityVerdict {
    let zero = Rational::zero();
    let first_violation = report.triangle.iter().enumerate().find_map(|(k, row)| {
        row.iter()
            .position(|v| *v < zero)
            .map(|n| (k, n, row[n].clone()))
    });
    MonotonicityVerdict {
        holds: first_violation.is_none(),
        first_violation,
    }
}

/// `Q_{c,u}(t) = Σ_k c_k t^k` with `c_k = a_k / k!`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuousGrowthPolynomial {
    #[serde(with = "serde_str::vec")]
    pub coefficients: Vec<Rational>,
}

impl ContinuousGrowthPolynomial {
    /// From Newton coefficients `a_k`, trimming trailing zeros.
    pub fn from_newton(a: &[Rational]) -> Self {
        let mut coefficients: Vec<Rational> = a
            .iter()
            .enumerate()
            .map(|(k, ak)| ak / from_biguint(factorial(k as u64)))
            .collect();
        while coefficients.last().is_some_and(|c| c.is_zero()) {
            coefficients.pop();
        }
        ContinuousGrowthPolynomial { coefficients }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn evaluate(&self, t: &Rational) -> Rational {
        self.coefficients
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * t + c)
    }
}

/// `Q_{c,u}` for a lattice-harmonic polynomial `u` of degree `M`. The
/// coefficients `a_k` are extracted on `B_radius` (default `M`); those with
/// `M < k <= radius` are checked to vanish.
pub fn continuous_growth(
    u: &MultivariatePolynomial,
    radius: Option<usize>,
) -> Result<ContinuousGrowthPolynomial> {
    if !u.is_lattice_harmonic() {
        return Err(Error::NotHarmonic(format!(
            "lattice Laplacian is {}, not 0",
            u.discrete_laplacian()
        )));
    }
    let m = u.degree();
    let radius = radius.unwrap_or(m);
    if radius < m {
        return Err(Error::DomainTooSmall { radius, needed: m });
    }
    let a = u
        .evaluate_on_ball(radius)?
        .square()
        .laplacian_powers_at_origin()?;
    if let Some(k) = (m + 1..a.len()).find(|&k| !a[k].is_zero()) {
        return Err(Error::Inconsistent(format!(
            "Δ^{k}(u²)(0) = {} should vanish above degree {m}",
            a[k]
        )));
    }
    Ok(ContinuousGrowthPolynomial::from_newton(&a[..=m.min(a.len() - 1)]))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

/// Number of independent generator streams; fixed so results do not depend on
/// the thread count.
pub const MONTE_CARLO_STREAMS: u64 = 64;

/// Sample mean and standard error of `u(X_n)^2` over simulated walks. Stream
/// `i` is ChaCha8 seeded with `seed_from_u64(seed)` and switched to stream `i`.
pub fn monte_carlo_q(u: &LatticeFunction, n: usize, samples: u64, seed: u64) -> Result<MonteCarloEstimate> {
    if n > u.radius() {
        return Err(Error::OutOfRange {
            index: n as u64,
            max: u.radius() as u64,
        });
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("at least one sample is needed".into()));
    }
    let v = u.restrict(n)?;
    let squares: Vec<f64> = v.values().iter().map(|x| to_f64(&(x * x))).collect();
    let gens = Generator::all(u.dim());
    // (count, mean, sum of squared deviations) per stream
    let parts: Vec<(u64, f64, f64)> = (0..MONTE_CARLO_STREAMS)
        .into_par_iter()
        .map(|stream| {
            let count = samples / MONTE_CARLO_STREAMS + u64::from(stream < samples % MONTE_CARLO_STREAMS);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            let mut x = vec![0i64; u.dim()];
            let (mut mean, mut m2) = (0.0f64, 0.0f64);
            for i in 0..count {
                x.iter_mut().for_each(|c| *c = 0);
                for _ in 0..n {
                    let g = gens[rng.random_range(0..gens.len())];
                    x[g.axis] += g.step();
                }
                let y = squares[v.ball().index_of(&x).expect("walk stays in B_n")];
                let delta = y - mean;
                mean += delta / (i + 1) as f64;
                m2 += delta * (y - mean);
            }
            (count, mean, m2)
        })
        .collect();
    let (mut total, mut mean, mut m2) = (0u64, 0.0f64, 0.0f64);
    for (count, m, s) in parts {
        if count == 0 {
            continue;
        }
        let merged = total + count;
        let delta = m - mean;
        mean += delta * count as f64 / merged as f64;
        m2 += s + delta * delta * (total as f64) * (count as f64) / merged as f64;
        total = merged;
    }
    let stderr = if total > 1 {
        (m2.max(0.0) / (total - 1) as f64 / total as f64).sqrt()
    } else {
        0.0
    };
    Ok(MonteCarloEstimate {
        mean,
        stderr,
        samples: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeBall;
    use crate::rational::{int, ratio};

    fn poly_fn(p: &MultivariatePolynomial, r: usize) -> LatticeFunction {
        p.evaluate_on_ball(r).unwrap()
    }

    #[test]
    fn growth_examples() {
        let one = LatticeFunction::constant(LatticeBall::new(2, 6).unwrap(), int(1));
        assert!(growth_values(&one, 6).unwrap().iter().all(|q| *q == int(1)));
        let xy = &MultivariatePolynomial::variable(2, 0) * &MultivariatePolynomial::variable(2, 1);
        assert_eq!(growth_q(&poly_fn(&xy, 2), 2).unwrap(), ratio(1, 2));
        let x = MultivariatePolynomial::variable(1, 0);
        assert_eq!(growth_q(&poly_fn(&x, 5), 5).unwrap(), int(5));
        assert!(matches!(growth_q(&poly_fn(&x, 5), 6), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn report_examples() {
        let c = LatticeFunction::constant(LatticeBall::new(2, 5).unwrap(), int(3));
        let r = growth_report(&c).unwrap();
        assert_eq!(r.newton[0], int(9));
        assert!(r.newton[1..].iter().all(|a| a.is_zero()));

        let x = MultivariatePolynomial::variable(1, 0);
        let r = growth_report(&poly_fn(&x, 8)).unwrap();
        assert_eq!(r.newton[..3], [int(0), int(1), int(0)]);
        for n in 0..=8u64 {
            assert_eq!(r.values[n as usize], int(n as i64));
            assert_eq!(r.newton_sum(n), int(n as i64));
        }

        let xy = &MultivariatePolynomial::variable(2, 0) * &MultivariatePolynomial::variable(2, 1);
        let r = growth_report(&poly_fn(&xy, 8)).unwrap();
        for (k, a) in r.newton.iter().enumerate() {
            assert_eq!(*a, if k == 2 { ratio(1, 2) } else { int(0) });
        }
        assert_eq!(r.laplacian_coefficients.as_ref().unwrap(), &r.newton);
    }

    #[test]
    fn dual_coefficients_agree_without_harmonicity() {
        // Q^{(k)}(0) = Δ^k(u²)(0) holds for any u, harmonic or not
        let x2 = MultivariatePolynomial::variable(1, 0).pow(2);
        assert!(growth_report(&poly_fn(&x2, 6)).is_ok());
    }

    #[test]
    fn monotonicity_examples() {
        let binom: Vec<Rational> = (0..=10).map(|n| from_biguint(binomial(n, 3))).collect();
        assert!(check_absolute_monotonicity(&GrowthReport::from_values(binom)).holds);
        let bad = GrowthReport::from_values(vec![int(1), int(0), int(1)]);
        let v = check_absolute_monotonicity(&bad);
        assert_eq!(v.first_violation, Some((1, 0, int(-1))));
    }

    #[test]
    fn continuous_examples() {
        let c = MultivariatePolynomial::constant(2, int(3));
        assert_eq!(continuous_growth(&c, None).unwrap().coefficients, vec![int(9)]);
        let x = MultivariatePolynomial::variable(1, 0);
        assert_eq!(continuous_growth(&x, Some(4)).unwrap().coefficients, vec![int(0), int(1)]);
        let xy = &MultivariatePolynomial::variable(2, 0) * &MultivariatePolynomial::variable(2, 1);
        let q = continuous_growth(&xy, None).unwrap();
        assert_eq!(q.coefficients, vec![int(0), int(0), ratio(1, 4)]);
        assert_eq!(q.evaluate(&int(2)), int(1));
        assert!(matches!(continuous_growth(&x.pow(2), None), Err(Error::NotHarmonic(_))));
    }

    #[test]
    fn monte_carlo_constant_and_determinism() {
        let one = LatticeFunction::constant(LatticeBall::new(2, 5).unwrap(), int(1));
        let e = monte_carlo_q(&one, 5, 1000, 7).unwrap();
        assert_eq!((e.mean, e.stderr, e.samples), (1.0, 0.0, 1000));
        let x = poly_fn(&MultivariatePolynomial::variable(2, 0), 6);
        let a = monte_carlo_q(&x, 6, 5000, 3).unwrap();
        assert_eq!(a, monte_carlo_q(&x, 6, 5000, 3).unwrap());
        assert!((a.mean - 3.0).abs() < 5.0 * a.stderr);
    }
}
