//! Binomial forms of the inequalities, and the search for violations of a
//! sharper error term.
//!
//! For `u_k = x_1 ⋯ x_k` on `Z^d` (`d >= k`), `Q_{u_k}(n) = (k!/d^k) binom(n, k)`.
//! All inequalities here are homogeneous of degree one in `Q`, so a violation
//! for the plain binomials is a violation for the harmonic function `u_k`.

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{decide, params, report_value, CheckOptions, Hypotheses, MainTerm, Sides, Status, Verdict};
use crate::enclosure::{enclose_exp_interval, enclose_ln, enclose_pow, power_of_n, RealEnclosure};
use crate::error::{Error, Result};
use crate::growth::GrowthReport;
use crate::rational::{binomial, ceil_to_u64, floor_to_u64, format_rational, from_biguint, int, ratio, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinomialVerdicts {
    pub plain: Verdict,
    /// `binom(⌊Pn⌋, k) <= max{√(e^{n^{-2ε}} binom(n,k) binom(⌈P²n⌉,k)), P^{-n^{0.5-ε}} binom(⌈P²n⌉,k)}`.
    pub max_form: Verdict,
}

fn binom_q(n: u64, k: u64) -> Rational {
    from_biguint(binomial(n, k))
}

/// `binom(⌊Pn⌋, k) <= √(e^{n^{-2ε}} binom(n, k) binom(⌈P²n⌉, k)) + P^{-n^{0.5-ε}} binom(⌈P²n⌉, k)`,
/// together with the stronger max form. Both are claimed for all `k, n`; the
/// argument uses `n >= 4P²`, which is recorded as the hypothesis.
pub fn binomial_inequality_check(
    n: u64,
    k: u64,
    p: &Rational,
    eps: &Rational,
    opts: CheckOptions,
) -> Result<BinomialVerdicts> {
    if *p <= Rational::one() {
        return Err(Error::InvalidParameter(format!("P = {p} must exceed 1")));
    }
    if n == 0 && eps.is_positive() {
        return Err(Error::InvalidParameter("n^{-2ε} is undefined at n = 0".into()));
    }
    let nn = int(n as i64);
    let mid = floor_to_u64(&(p * &nn)).expect("index fits");
    let outer = ceil_to_u64(&(p * p * &nn)).expect("index fits");
    let (b_n, b_mid, b_out) = (binom_q(n, k), binom_q(mid, k), binom_q(outer, k));
    let mut hyp = Hypotheses::new();
    hyp.require(nn >= p * p * int(4), "n >= 4P^2")
        .require(!eps.is_negative() && *eps <= ratio(1, 2), "0 <= eps <= 1/2");
    let err_exp = ratio(1, 2) - eps;
    let run = |max_form: bool| {
        let parameters = params([
            ("n", n.to_string()),
            ("k", k.to_string()),
            ("P", format_rational(p)),
            ("eps", format_rational(eps)),
            ("form", if max_form { "max" } else { "sum" }.to_string()),
        ]);
        let name = if max_form { "binomial-max" } else { "binomial" };
        decide(name, opts.policy, &hyp, parameters, |bits| {
            let y = power_of_n(n, &(-eps * int(2)), bits + 16)?;
            let c = enclose_exp_interval(&y, bits);
            Ok(Sides {
                lhs: b_mid.clone(),
                main: MainTerm::Sqrt(c.mul_rational(&(&b_n * &b_out))),
                error: enclose_pow(p, n, &err_exp, bits)?.mul_rational(&b_out),
                max_form,
            })
        })
    };
    Ok(BinomialVerdicts {
        plain: run(false)?,
        max_form: run(true)?,
    })
}

/// Decides `Q(2n) <= C √(Q(n) Q(4n)) + 2^{-n^{0.5+ε}} Q(4n)` for the given
/// values. Status `fails` is a certified violation, i.e. evidence that the
/// error exponent `0.5 + ε` is too strong.
pub fn sharp_error_values_check(
    q_n: &Rational,
    q_2n: &Rational,
    q_4n: &Rational,
    n: u64,
    c: &Rational,
    eps: &Rational,
    opts: CheckOptions,
) -> Result<Verdict> {
    if !c.is_positive() {
        return Err(Error::InvalidParameter(format!("C = {c} must be positive")));
    }
    if !eps.is_positive() {
        return Err(Error::InvalidParameter(format!("eps = {eps} must be positive")));
    }
    let mut hyp = Hypotheses::new();
    hyp.note("sharp error term; status fails is a certified violation");
    let parameters = params([
        ("n", n.to_string()),
        ("C", format_rational(c)),
        ("eps", format_rational(eps)),
    ]);
    let err_exp = ratio(1, 2) + eps;
    decide("sharp-error", opts.policy, &hyp, parameters, |bits| {
        Ok(Sides {
            lhs: q_2n.clone(),
            main: MainTerm::Sqrt(RealEnclosure::exact(c * c * q_n * q_4n)),
            error: enclose_pow(&int(2), n, &err_exp, bits)?.mul_rational(q_4n),
            max_form: false,
        })
    })
}

pub fn sharp_error_check(
    report: &GrowthReport,
    n: u64,
    c: &Rational,
    eps: &Rational,
    opts: CheckOptions,
) -> Result<Verdict> {
    let q_n = report_value(&report.values, n)?;
    let q_2n = report_value(&report.values, 2 * n)?;
    let q_4n = report_value(&report.values, 4 * n)?;
    sharp_error_values_check(&q_n, &q_2n, &q_4n, n, c, eps, opts)
}

/// Which `n` to try for each `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchWindow {
    /// `⌊k²/ln k⌋ - radius ..= ⌈k²/ln k⌉ + radius`.
    Near { radius: u64 },
    Range { from: u64, to: u64 },
}

impl Default for SearchWindow {
    fn default() -> Self {
        SearchWindow::Near { radius: 1 }
    }
}

/// Candidate `n` for one `k`, ascending.
pub(crate) fn window_candidates(k: u64, window: SearchWindow, n0: u64) -> Result<Vec<u64>> {
    let (from, to) = match window {
        SearchWindow::Near { radius } => {
            if k < 2 {
                return Ok(Vec::new());
            }
            let ln_k = enclose_ln(&int(k as i64), 64)?;
            let k2 = int((k * k) as i64);
            let lo = floor_to_u64(&(&k2 / &ln_k.hi)).expect("fits");
            let hi = ceil_to_u64(&(&k2 / &ln_k.lo)).expect("fits");
            (lo.saturating_sub(radius), hi + radius)
        }
        SearchWindow::Range { from, to } => (from, to),
    };
    Ok((from.max(n0 + 1).max(1)..=to).collect())
}

/// Independent re-verification of a violation at `(k, n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub k: u64,
    pub n: u64,
    pub binom_n: String,
    pub binom_2n: String,
    pub binom_4n: String,
    /// `binom(2n,k) / binom(4n,k) > 2^{-n^{0.5+ε}}`.
    pub ratio_exceeds_error: bool,
    /// `binom(2n,k)² > C² binom(n,k) binom(4n,k)`.
    pub convexity_exceeds_c: bool,
    /// `binom(2n,k) > C √(binom(n,k) binom(4n,k)) + 2^{-n^{0.5+ε}} binom(4n,k)`.
    pub violation_certified: bool,
    pub precision_bits: u32,
}

// falling factorial over k!, a separate route from `rational::binomial`
fn binomial_by_product(m: u64, k: u64) -> BigUint {
    if k > m {
        return BigUint::zero();
    }
    let num = (0..k).fold(BigUint::one(), |acc, j| acc * BigUint::from(m - j));
    let den = (1..=k).fold(BigUint::one(), |acc, j| acc * BigUint::from(j));
    num / den
}

pub fn certify_witness(k: u64, n: u64, c: &Rational, eps: &Rational, max_bits: u32) -> Result<WitnessCertificate> {
    let b1 = binomial_by_product(n, k);
    let b2 = binomial_by_product(2 * n, k);
    let b4 = binomial_by_product(4 * n, k);
    let (q1, q2, q4) = (from_biguint(b1.clone()), from_biguint(b2.clone()), from_biguint(b4.clone()));
    let convexity_exceeds_c = &q2 * &q2 > c * c * &q1 * &q4;
    let err_exp = ratio(1, 2) + eps;
    let mut bits = 64;
    loop {
        let e = enclose_pow(&int(2), n, &err_exp, bits)?;
        let ratio_exceeds_error = q2 > &e.hi * &q4;
        // D = b2 - e b4 certainly exceeds C √(b1 b4) when D_lo > 0 and D_lo² > C² b1 b4
        let d_lo = &q2 - &e.hi * &q4;
        let violation_certified = d_lo.is_positive() && &d_lo * &d_lo > c * c * &q1 * &q4;
        if (ratio_exceeds_error && violation_certified) || bits >= max_bits {
            return Ok(WitnessCertificate {
                k,
                n,
                binom_n: b1.to_string(),
                binom_2n: b2.to_string(),
                binom_4n: b4.to_string(),
                ratio_exceeds_error,
                convexity_exceeds_c,
                violation_certified,
                precision_bits: bits,
            });
        }
        bits = (bits * 2).min(max_bits);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "lowercase")]
pub enum SearchOutcome {
    Found {
        k: u64,
        n: u64,
        /// Smallest lattice dimension carrying `u_k`.
        dimension: u64,
        verdict: Verdict,
        certificate: WitnessCertificate,
    },
    Exhausted {
        k_min: u64,
        k_max: u64,
        pairs_checked: u64,
        undecided: u64,
    },
}

/// Looks for `(k, n)` with `binom(2n,k) > C √(binom(n,k) binom(4n,k)) + 2^{-n^{0.5+ε}} binom(4n,k)`
/// and `n > n0`. The first violation in `(k, n)` order is returned regardless
/// of scheduling.
pub fn counterexample_search(
    c: &Rational,
    eps: &Rational,
    k_min: u64,
    k_max: u64,
    n0: u64,
    window: SearchWindow,
    opts: CheckOptions,
) -> Result<SearchOutcome> {
    if k_min > k_max {
        return Err(Error::InvalidParameter(format!("empty k range {k_min}..={k_max}")));
    }
    struct PerK {
        found: Option<(u64, Verdict)>,
        checked: u64,
        undecided: u64,
    }
    let per_k: Vec<PerK> = (k_min..=k_max)
        .into_par_iter()
        .map(|k| -> Result<PerK> {
            let mut out = PerK {
                found: None,
                checked: 0,
                undecided: 0,
            };
            for n in window_candidates(k, window, n0)? {
                let v = sharp_error_values_check(
                    &binom_q(n, k),
                    &binom_q(2 * n, k),
                    &binom_q(4 * n, k),
                    n,
                    c,
                    eps,
                    opts,
                )?;
                out.checked += 1;
                match v.status {
                    Status::Fails => {
                        out.found = Some((n, v));
                        break;
                    }
                    Status::Undecided => out.undecided += 1,
                    Status::Holds => {}
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let (mut checked, mut undecided) = (0, 0);
    for (k, r) in (k_min..).zip(per_k) {
        checked += r.checked;
        undecided += r.undecided;
        if let Some((n, mut verdict)) = r.found {
            verdict.parameters.insert("k".into(), k.to_string());
            let certificate = certify_witness(k, n, c, eps, opts.policy.max_bits)?;
            return Ok(SearchOutcome::Found {
                k,
                n,
                dimension: k,
                verdict,
                certificate,
            });
        }
    }
    Ok(SearchOutcome::Exhausted {
        k_min,
        k_max,
        pairs_checked: checked,
        undecided,
    })
}
