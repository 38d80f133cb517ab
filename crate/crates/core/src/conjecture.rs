//! Scans of the sharp-error conjecture: for `S_k` on `Z^2` and `n` near
//! `k²/ln k`, is `Q(2n) > C √(Q(n) Q(4n)) + 2^{-n^{0.5+ε}} Q(4n)`?
//!
//! The conjecture asserts such `n` exist once `k` is large; a scan over a
//! finite window that finds none says nothing against it.

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enclosure::{enclose_pow, enclose_sqrt, RealEnclosure};
use crate::error::{Error, Result};
use crate::growth::{growth_report_to, GrowthReport};
use crate::harmonic::{monomial_uk, sk_polynomial, tk_polynomial};
use crate::inequalities::{sharp_error_values_check, CheckOptions, Status};
use crate::polynomial::MultivariatePolynomial;
use crate::rational::{int, ratio, serde_str, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    S(usize),
    T(usize),
    Uk { dim: usize, k: usize },
    Custom(MultivariatePolynomial),
}

impl Family {
    pub fn polynomial(&self) -> Result<MultivariatePolynomial> {
        match self {
            Family::S(k) => Ok(sk_polynomial(*k)),
            Family::T(k) => tk_polynomial(*k),
            Family::Uk { dim, k } => monomial_uk(*dim, *k),
            Family::Custom(p) => {
                if p.is_lattice_harmonic() {
                    Ok(p.clone())
                } else {
                    Err(Error::NotHarmonic(format!(
                        "lattice Laplacian is {}, not 0",
                        p.discrete_laplacian()
                    )))
                }
            }
        }
    }
}

/// Exact `Q(0..=n_max)` for a family member, with the dual coefficient check.
pub fn q_table(family: &Family, n_max: usize) -> Result<GrowthReport> {
    let u = family.polynomial()?.evaluate_on_ball(n_max)?;
    growth_report_to(&u, n_max)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: u64,
    #[serde(with = "serde_str")]
    pub q_n: Rational,
    #[serde(with = "serde_str")]
    pub q_2n: Rational,
    #[serde(with = "serde_str")]
    pub q_4n: Rational,
    /// `Q(2n)² / (Q(n) Q(4n))`; absent when a denominator value is zero.
    #[serde(with = "serde_str::opt", default)]
    pub ratio: Option<Rational>,
    /// `(Q(2n) - C √(Q(n) Q(4n))) / Q(4n)`; absent when `Q(4n) = 0`.
    pub residual: Option<RealEnclosure>,
    /// `2^{-n^{0.5+ε}}`.
    pub bound: RealEnclosure,
    /// `fails` marks a certified violation of the sharp-error inequality.
    pub status: Status,
    /// A zero among `Q(n), Q(4n)`.
    pub zero_flag: bool,
}

impl ScanRow {
    pub fn violation(&self) -> bool {
        self.status == Status::Fails
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub rows: usize,
    pub violations: Vec<u64>,
    pub undecided: Vec<u64>,
    /// Row with the largest residual upper bound, if any.
    pub max_residual_n: Option<u64>,
    pub max_residual: Option<RealEnclosure>,
    pub bound_at_max: Option<RealEnclosure>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanResult {
    pub k: usize,
    #[serde(with = "serde_str")]
    pub c: Rational,
    #[serde(with = "serde_str")]
    pub eps: Rational,
    pub rows: Vec<ScanRow>,
    pub summary: ScanSummary,
}

fn scan_row(report: &GrowthReport, n: u64, c: &Rational, eps: &Rational, opts: CheckOptions) -> Result<ScanRow> {
    let get = |m: u64| report.value(m as usize).cloned();
    let (q_n, q_2n, q_4n) = (get(n)?, get(2 * n)?, get(4 * n)?);
    let verdict = sharp_error_values_check(&q_n, &q_2n, &q_4n, n, c, eps, opts)?;
    let bits = verdict.precision_bits;
    let bound = enclose_pow(&int(2), n, &(ratio(1, 2) + eps), bits)?;
    let zero_flag = q_n.is_zero() || q_4n.is_zero();
    let ratio = (!zero_flag).then(|| &q_2n * &q_2n / (&q_n * &q_4n));
    let residual = if q_4n.is_zero() {
        None
    } else {
        let root = enclose_sqrt(&RealEnclosure::exact(&q_n * &q_4n), bits)?;
        let top = RealEnclosure::exact(q_2n.clone()).sub(&root.mul_rational(c));
        Some(top.mul_rational(&q_4n.recip()))
    };
    Ok(ScanRow {
        n,
        q_n,
        q_2n,
        q_4n,
        ratio,
        residual,
        bound,
        status: verdict.status,
        zero_flag,
    })
}

/// `[c - k, c + k]` around `c = round(k² / ln k)`, clipped below at 1
/// (`k < 2` uses the center for `k = 2`).
pub fn default_window(k: usize) -> (u64, u64) {
    let kf = k.max(2) as f64;
    let center = (kf * kf / kf.ln()).round() as u64;
    (center.saturating_sub(k as u64).max(1), center + k as u64)
}

/// Rows for `n_from ..= n_to` (empty when `n_from > n_to`) for any family.
pub fn conjecture_scan_family(
    family: &Family,
    c: &Rational,
    eps: &Rational,
    n_from: u64,
    n_to: u64,
    opts: CheckOptions,
) -> Result<(Vec<ScanRow>, ScanSummary)> {
    if !c.is_positive() || !eps.is_positive() {
        return Err(Error::InvalidParameter("C and eps must be positive".into()));
    }
    if n_from > n_to || n_to == 0 {
        return Ok((Vec::new(), summarize(&[], n_from, n_to)));
    }
    let n_from = n_from.max(1);
    let report = q_table(family, 4 * n_to as usize)?;
    let rows: Vec<ScanRow> = (n_from..=n_to)
        .into_par_iter()
        .map(|n| scan_row(&report, n, c, eps, opts))
        .collect::<Result<_>>()?;
    let summary = summarize(&rows, n_from, n_to);
    Ok((rows, summary))
}

/// The scan for `S_k` on `Z^2`.
pub fn conjecture_scan(k: usize, c: &Rational, eps: &Rational, n_from: u64, n_to: u64, opts: CheckOptions) -> Result<ScanResult> {
    let (rows, summary) = conjecture_scan_family(&Family::S(k), c, eps, n_from, n_to, opts)?;
    Ok(ScanResult {
        k,
        c: c.clone(),
        eps: eps.clone(),
        rows,
        summary,
    })
}

fn summarize(rows: &[ScanRow], n_from: u64, n_to: u64) -> ScanSummary {
    if rows.is_empty() {
        return ScanSummary {
            rows: 0,
            violations: Vec::new(),
            undecided: Vec::new(),
            max_residual_n: None,
            max_residual: None,
            bound_at_max: None,
            message: "no data".into(),
        };
    }
    let violations: Vec<u64> = rows.iter().filter(|r| r.violation()).map(|r| r.n).collect();
    let undecided: Vec<u64> = rows
        .iter()
        .filter(|r| r.status == Status::Undecided)
        .map(|r| r.n)
        .collect();
    let best = rows
        .iter()
        .filter(|r| r.residual.is_some())
        .max_by(|a, b| {
            let (x, y) = (a.residual.as_ref().unwrap(), b.residual.as_ref().unwrap());
            x.hi.cmp(&y.hi).then(b.n.cmp(&a.n))
        });
    let message = if violations.is_empty() {
        format!(
            "no violation for n in [{n_from}, {n_to}]; a finite window without violations is not evidence against the conjecture"
        )
    } else {
        format!(
            "{} violation(s) for n in [{n_from}, {n_to}], first at n = {}; the data cover only this window",
            violations.len(),
            violations[0]
        )
    };
    ScanSummary {
        rows: rows.len(),
        violations,
        undecided,
        max_residual_n: best.map(|r| r.n),
        max_residual: best.and_then(|r| r.residual.clone()),
        bound_at_max: best.map(|r| r.bound.clone()),
        message,
    }
}
