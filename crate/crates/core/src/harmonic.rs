//! Harmonic polynomials on `Z^d`.
//!
//! Continuous harmonic polynomials are carried to the lattice by the
//! correspondence `P = Σ a_α x^α/α!  ↦  P^Z = Σ a_α F_α`, where
//! `F_α(x) = Π_l F_{α_l}(x_l)` and `F_k(x) = binom(x + (k-1)/2, k)`. The
//! basis satisfies `ΔF_k = F_{k-2}/2` for the one-dimensional probabilistic
//! Laplacian, which is what makes `P^Z` lattice harmonic.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::limits;
use crate::polynomial::{Exponents, MultivariatePolynomial};
use crate::rational::{binomial, factorial, from_biguint, int, Rational};

/// The univariate basis polynomial `F_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteBasisElement {
    pub index: usize,
    pub polynomial: MultivariatePolynomial,
}

/// `F_0 = 1`, `F_k(x) = (1/k!) Π_{j<k} (x + (k-1)/2 - j)`.
pub fn fk_polynomial(k: usize) -> DiscreteBasisElement {
    let x = MultivariatePolynomial::variable(1, 0);
    let mut p = MultivariatePolynomial::one(1);
    let half_shift = Rational::new(BigInt::from(k as i64 - 1), BigInt::from(2));
    for j in 0..k {
        let root = &half_shift - int(j as i64);
        let factor = &x + &MultivariatePolynomial::constant(1, root);
        p = &p * &factor;
    }
    let polynomial = p.scale(&Rational::new(
        BigInt::one(),
        BigInt::from(factorial(k as u64)),
    ));
    DiscreteBasisElement {
        index: k,
        polynomial,
    }
}

fn basis_table(max: usize) -> Vec<MultivariatePolynomial> {
    (0..=max).map(|k| fk_polynomial(k).polynomial).collect()
}

/// `F_α` on `Z^d`.
pub fn f_alpha(alpha: &[u32]) -> MultivariatePolynomial {
    let dim = alpha.len();
    let max = alpha.iter().copied().max().unwrap_or(0) as usize;
    let table = basis_table(max);
    f_alpha_from(&table, alpha, dim)
}

fn f_alpha_from(table: &[MultivariatePolynomial], alpha: &[u32], dim: usize) -> MultivariatePolynomial {
    alpha
        .iter()
        .enumerate()
        .fold(MultivariatePolynomial::one(dim), |acc, (l, &e)| {
            if e == 0 {
                acc
            } else {
                &acc * &table[e as usize].on_axis(dim, l)
            }
        })
}

fn multi_factorial(alpha: &[u32]) -> Rational {
    alpha
        .iter()
        .fold(Rational::one(), |acc, &e| acc * from_biguint(factorial(e as u64)))
}

/// Maps a continuous harmonic polynomial to its lattice-harmonic counterpart.
pub fn correspondence(p: &MultivariatePolynomial) -> Result<MultivariatePolynomial> {
    limits::check_dimension(p.dim())?;
    let lap = p.continuous_laplacian();
    if !lap.is_zero() {
        return Err(Error::NotHarmonic(format!(
            "continuous Laplacian is {lap}, not 0"
        )));
    }
    let table = basis_table(p.degree());
    let mut out = MultivariatePolynomial::zero(p.dim());
    for (alpha, c) in p.terms() {
        // a_α = (coefficient of x^α) · α!
        let a = c * multi_factorial(alpha);
        out = &out + &f_alpha_from(&table, alpha, p.dim()).scale(&a);
    }
    Ok(out)
}

/// `Σ_{j ≤ k/2} (-1)^j F_{k-2j}(x) F_{2j}(y)`, harmonic on `Z^2`.
pub fn sk_polynomial(k: usize) -> MultivariatePolynomial {
    let table = basis_table(k);
    let mut out = MultivariatePolynomial::zero(2);
    for j in 0..=k / 2 {
        let term = &table[k - 2 * j].on_axis(2, 0) * &table[2 * j].on_axis(2, 1);
        out = if j % 2 == 0 { &out + &term } else { &out - &term };
    }
    out
}

/// `Σ_{j ≤ (k-1)/2} (-1)^j F_{k-2j-1}(x) F_{2j+1}(y)`, harmonic on `Z^2`.
pub fn tk_polynomial(k: usize) -> Result<MultivariatePolynomial> {
    if k == 0 {
        return Err(Error::InvalidParameter("T_k is defined for k >= 1".into()));
    }
    let table = basis_table(k);
    let mut out = MultivariatePolynomial::zero(2);
    for j in 0..=(k - 1) / 2 {
        let term = &table[k - 2 * j - 1].on_axis(2, 0) * &table[2 * j + 1].on_axis(2, 1);
        out = if j % 2 == 0 { &out + &term } else { &out - &term };
    }
    Ok(out)
}

/// `(Re (x+iy)^k, Im (x+iy)^k)` as polynomials on `R^2`.
pub fn complex_power_parts(k: usize) -> (MultivariatePolynomial, MultivariatePolynomial) {
    let mut re = MultivariatePolynomial::zero(2);
    let mut im = MultivariatePolynomial::zero(2);
    for j in 0..=k {
        let c = from_biguint(binomial(k as u64, j as u64));
        let alpha: Exponents = vec![(k - j) as u32, j as u32];
        // i^j cycles through 1, i, -1, -i
        match j % 4 {
            0 => re = &re + &MultivariatePolynomial::monomial(alpha, c),
            1 => im = &im + &MultivariatePolynomial::monomial(alpha, c),
            2 => re = &re - &MultivariatePolynomial::monomial(alpha, c),
            _ => im = &im - &MultivariatePolynomial::monomial(alpha, c),
        }
    }
    (re, im)
}

/// `u_k(x) = x_1 x_2 ⋯ x_k` on `Z^d`, for `1 <= k <= d`.
pub fn monomial_uk(dim: usize, k: usize) -> Result<MultivariatePolynomial> {
    limits::check_dimension(dim)?;
    if k == 0 || k > dim {
        return Err(Error::InvalidParameter(format!(
            "u_k needs 1 <= k <= d, got k={k}, d={dim}"
        )));
    }
    let alpha: Exponents = (0..dim).map(|l| u32::from(l < k)).collect();
    Ok(MultivariatePolynomial::monomial(alpha, Rational::one()))
}

/// Exponents of total degree at most `max_degree`, graded then lexicographic.
pub fn monomials_up_to(dim: usize, max_degree: usize) -> Vec<Exponents> {
    fn rec(dim: usize, left: usize, prefix: &mut Vec<u32>, out: &mut Vec<Exponents>) {
        if prefix.len() == dim {
            out.push(prefix.clone());
            return;
        }
        for e in 0..=left {
            prefix.push(e as u32);
            rec(dim, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, max_degree, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| {
        let da: u32 = a.iter().sum();
        let db: u32 = b.iter().sum();
        da.cmp(&db).then_with(|| a.cmp(b))
    });
    out
}

/// A basis of the continuous harmonic polynomials of degree `<= max_degree`,
/// from exact Gaussian elimination of the Laplacian on the monomial basis.
pub fn harmonic_kernel_basis(dim: usize, max_degree: usize) -> Result<Vec<MultivariatePolynomial>> {
    limits::check_dimension(dim)?;
    let columns = monomials_up_to(dim, max_degree);
    let rows = if max_degree >= 2 {
        monomials_up_to(dim, max_degree - 2)
    } else {
        Vec::new()
    };
    let row_index: std::collections::HashMap<&Exponents, usize> =
        rows.iter().enumerate().map(|(i, r)| (r, i)).collect();

    // matrix[r][c]: coefficient of row monomial r in Δ(column monomial c)
    let mut matrix = vec![vec![Rational::zero(); columns.len()]; rows.len()];
    for (c, alpha) in columns.iter().enumerate() {
        for l in 0..dim {
            let e = alpha[l];
            if e >= 2 {
                let mut beta = alpha.clone();
                beta[l] -= 2;
                let r = row_index[&beta];
                matrix[r][c] += int((e * (e - 1)) as i64);
            }
        }
    }

    // reduced row echelon form
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0;
    for col in 0..columns.len() {
        let Some(p) = (rank..rows.len()).find(|&r| !matrix[r][col].is_zero()) else {
            continue;
        };
        matrix.swap(rank, p);
        let inv = Rational::one() / matrix[rank][col].clone();
        for v in matrix[rank].iter_mut() {
            *v *= &inv;
        }
        for r in 0..rows.len() {
            if r != rank && !matrix[r][col].is_zero() {
                let factor = matrix[r][col].clone();
                let pivot_row = matrix[rank].clone();
                for (v, pv) in matrix[r].iter_mut().zip(pivot_row.iter()) {
                    *v -= &factor * pv;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }

    let free: Vec<usize> = (0..columns.len()).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut terms = vec![(columns[f].clone(), Rational::one())];
            for (r, &pc) in pivots.iter().enumerate() {
                let v = &matrix[r][f];
                if !v.is_zero() {
                    terms.push((columns[pc].clone(), -v.clone()));
                }
            }
            MultivariatePolynomial::from_terms(dim, terms).expect("dimensions agree")
        })
        .collect();
    Ok(basis)
}

/// A random harmonic pair: the continuous pre-image and its lattice image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomHarmonic {
    pub continuous: MultivariatePolynomial,
    pub discrete: MultivariatePolynomial,
}

/// Coefficients are drawn uniformly from `{-9, …, 9}`, one per kernel basis
/// vector, by ChaCha8 seeded through `SeedableRng::seed_from_u64(seed)`.
pub fn random_harmonic_pair(dim: usize, max_degree: usize, seed: u64) -> Result<RandomHarmonic> {
    let basis = harmonic_kernel_basis(dim, max_degree)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut continuous = MultivariatePolynomial::zero(dim);
    for b in &basis {
        let c: i64 = rng.random_range(-9..=9);
        if c != 0 {
            continuous = &continuous + &b.scale(&int(c));
        }
    }
    let discrete = correspondence(&continuous)?;
    Ok(RandomHarmonic {
        continuous,
        discrete,
    })
}

pub fn random_harmonic(dim: usize, max_degree: usize, seed: u64) -> Result<MultivariatePolynomial> {
    Ok(random_harmonic_pair(dim, max_degree, seed)?.discrete)
}
