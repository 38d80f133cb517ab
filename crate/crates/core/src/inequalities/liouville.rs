//! Degree bounds and the vanishing-ball principle for harmonic polynomials.
//!
//! For harmonic `u`, `Δ^k(u²) = |S|^{-k} Σ (u_{s_1…s_k})²`, so the Newton
//! coefficients `a_k` vanish exactly when all `k`-fold differences do. A
//! harmonic polynomial of degree `<= M` vanishing on `B_M` therefore has
//! `a_k = 0` for every `k`, hence `Q_u ≡ 0` and `u ≡ 0`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Generator, LatticeFunction};
use crate::polynomial::MultivariatePolynomial;
use crate::rational::format_rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeBound {
    /// Minimal `k` with every `k`-fold iterated difference identically zero.
    pub bound: usize,
    pub degree: usize,
    /// Radius of the ball on which differences and `a_k` were evaluated.
    pub radius: usize,
}

fn require_harmonic(u: &MultivariatePolynomial) -> Result<()> {
    if u.is_lattice_harmonic() {
        Ok(())
    } else {
        Err(Error::NotHarmonic(format!(
            "lattice Laplacian is {}, not 0",
            u.discrete_laplacian()
        )))
    }
}

// Minimal k with all k-fold differences zero on B_radius. Negative directions
// are shifts of positive ones, and differences commute, so multisets of
// positive generators suffice.
fn vanishing_order(f: &LatticeFunction) -> Result<Option<usize>> {
    let dim = f.dim();
    let mut level: Vec<(usize, LatticeFunction)> = vec![(0, f.clone())];
    for k in 0..=f.radius() {
        if level.iter().all(|(_, g)| g.is_zero()) {
            return Ok(Some(k));
        }
        if k == f.radius() {
            break;
        }
        let mut next = Vec::new();
        for (last, g) in &level {
            if g.is_zero() {
                continue;
            }
            for axis in *last..dim {
                next.push((axis, g.directional_difference(Generator::new(axis, true))?));
            }
        }
        level = next;
    }
    Ok(None)
}

/// `deg(u) + 1` for a nonzero harmonic polynomial (0 for the zero polynomial),
/// found from iterated differences on `B_{2 deg + 2}` and cross-checked
/// against `a_k = Δ^k(u²)(0) = 0` for `k > deg`.
pub fn degree_bound(u: &MultivariatePolynomial) -> Result<DegreeBound> {
    require_harmonic(u)?;
    let degree = u.degree();
    let radius = 2 * degree + 2;
    let f = u.evaluate_on_ball(radius)?;
    let bound = vanishing_order(&f)?
        .ok_or_else(|| Error::Inconsistent("iterated differences never vanish".into()))?;
    let expected = if u.is_zero() { 0 } else { degree + 1 };
    if bound != expected {
        return Err(Error::Inconsistent(format!(
            "difference order {bound} but degree {degree}"
        )));
    }
    let a = f.square().laplacian_powers_at_origin()?;
    if let Some(k) = (bound.max(1)..a.len()).find(|&k| k > degree && !a[k].is_zero()) {
        return Err(Error::Inconsistent(format!(
            "a_{k} = {} although differences of order {bound} vanish",
            a[k]
        )));
    }
    Ok(DegreeBound {
        bound,
        degree,
        radius,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingCertificate {
    pub radius: usize,
    /// `a_0 … a_M` computed from the values on `B_M`, all zero.
    pub low_coefficients_checked: usize,
    /// Order from which all iterated differences vanish; `a_k = 0` beyond it.
    pub difference_order: usize,
    pub confirmed_zero: bool,
}

/// Confirms `u ≡ 0` for a harmonic polynomial of degree `<= M` that vanishes
/// on `B_M` (`M` defaults to the degree). A nonzero value on `B_M` is reported
/// with its point.
pub fn vanishing_ball_test(u: &MultivariatePolynomial, m: Option<usize>) -> Result<VanishingCertificate> {
    require_harmonic(u)?;
    let m = m.unwrap_or(u.degree());
    if u.degree() > m {
        return Err(Error::HypothesisNotMet(format!(
            "degree {} exceeds M = {m}",
            u.degree()
        )));
    }
    let on_ball = u.evaluate_on_ball(m)?;
    if let Some((point, value)) = on_ball.first_nonzero() {
        return Err(Error::HypothesisViolation {
            point,
            reason: format!("u = {} is not 0 on B_{m}", format_rational(&value)),
        });
    }
    let low = on_ball.square().laplacian_powers_at_origin()?;
    if let Some(k) = low.iter().position(|a| !a.is_zero()) {
        return Err(Error::Inconsistent(format!("a_{k} = {} on a vanishing ball", low[k])));
    }
    let order = vanishing_order(&u.evaluate_on_ball(2 * m + 2)?)?
        .ok_or_else(|| Error::Inconsistent("iterated differences never vanish".into()))?;
    if order > m + 1 {
        return Err(Error::Inconsistent(format!(
            "differences of order {order} needed for degree <= {m}"
        )));
    }
    // every a_k vanishes, so Q_u ≡ 0 and u ≡ 0
    if !u.is_zero() {
        return Err(Error::Inconsistent("Q_u ≡ 0 but u is not the zero polynomial".into()));
    }
    Ok(VanishingCertificate {
        radius: m,
        low_coefficients_checked: low.len(),
        difference_order: order,
        confirmed_zero: true,
    })
}
