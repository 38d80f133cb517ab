//! Three-circles checkers on growth reports.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{decide, fmt_q, params, report_value, CheckOptions, Hypotheses, MainTerm, Sides, Verdict};
use crate::enclosure::{
    enclose_exp_interval, enclose_inverse_power, enclose_ln, enclose_pow, enclose_power, power_of_n,
    RealEnclosure,
};
use crate::error::{Error, Result};
use crate::growth::{ContinuousGrowthPolynomial, GrowthReport};
use crate::rational::{ceil_to_u64, floor_to_u64, format_rational, int, ratio, Rational};

fn index(value: &Rational, up: bool) -> Result<u64> {
    let v = if up { ceil_to_u64(value) } else { floor_to_u64(value) };
    v.ok_or_else(|| Error::InvalidParameter(format!("index {value} out of range")))
}

fn eps_in_range(eps: &Rational) -> bool {
    !eps.is_negative() && *eps <= ratio(1, 2)
}

/// `e^{c · n^{-2ε}}`.
fn exp_decay(n: u64, eps: &Rational, c: &RealEnclosure, bits: u32) -> Result<RealEnclosure> {
    if n == 0 && eps.is_positive() {
        return Err(Error::InvalidParameter("n^{-2ε} is undefined at n = 0".into()));
    }
    let y = power_of_n(n, &(-eps * int(2)), bits + 16)?;
    Ok(enclose_exp_interval(&c.mul(&y), bits))
}

fn exact(q: &Rational) -> RealEnclosure {
    RealEnclosure::exact(q.clone())
}

// Q(⌊Pn⌋) <= √(e^{n^{-2ε}} Q(n) Q(⌈P²n⌉)) + P^{-n^{0.5-ε}} Q(⌈P²n⌉)
fn propagation(
    check: &str,
    report: &GrowthReport,
    n: u64,
    p: &Rational,
    eps: &Rational,
    hyp: &Hypotheses,
    opts: CheckOptions,
) -> Result<Verdict> {
    if *p <= Rational::one() {
        return Err(Error::InvalidParameter(format!("P = {p} must exceed 1")));
    }
    let mid = index(&(p * int(n as i64)), false)?;
    let outer = index(&(p * p * int(n as i64)), true)?;
    let q_n = report_value(&report.values, n)?;
    let q_mid = report_value(&report.values, mid)?;
    let q_out = report_value(&report.values, outer)?;
    hyp.gate(opts.explore)?;
    let err_exp = ratio(1, 2) - eps;
    let parameters = params([
        ("n", n.to_string()),
        ("P", format_rational(p)),
        ("eps", format_rational(eps)),
        ("lhs_index", mid.to_string()),
        ("outer_index", outer.to_string()),
        ("Q_n", fmt_q(&q_n)),
        ("Q_outer", fmt_q(&q_out)),
    ]);
    decide(check, opts.policy, hyp, parameters, |bits| {
        let c = exp_decay(n, eps, &RealEnclosure::one(), bits)?;
        let radicand = c.mul_rational(&(&q_n * &q_out));
        let error = enclose_pow(p, n, &err_exp, bits)?.mul_rational(&q_out);
        Ok(Sides {
            lhs: q_mid.clone(),
            main: MainTerm::Sqrt(radicand),
            error,
            max_form: false,
        })
    })
}

/// `Q(2n) <= √(e^{n^{-2ε}} Q(n) Q(4n)) + 2^{-n^{0.5-ε}} Q(4n)`, proved for
/// `16 < n` and `0 <= ε <= 1/2` when `u` is harmonic on `B_{4R}`, `n <= R`.
pub fn three_circles_check(report: &GrowthReport, n: u64, eps: &Rational, opts: CheckOptions) -> Result<Verdict> {
    let mut hyp = Hypotheses::new();
    hyp.require(n > 16, "n > 16")
        .require(eps_in_range(eps), "0 <= eps <= 1/2");
    propagation("three-circles", report, n, &int(2), eps, &hyp, opts)
}

/// `Q(⌊Pn⌋) <= √(e^{n^{-2ε}} Q(n) Q(⌈P²n⌉)) + P^{-n^{0.5-ε}} Q(⌈P²n⌉)`,
/// proved for `P > 1`, `n >= 4P²` and `0 <= ε <= 1/2`.
pub fn general_p_check(
    report: &GrowthReport,
    n: u64,
    p: &Rational,
    eps: &Rational,
    opts: CheckOptions,
) -> Result<Verdict> {
    let mut hyp = Hypotheses::new();
    hyp.require(int(n as i64) >= p * p * int(4), "n >= 4P^2")
        .require(eps_in_range(eps), "0 <= eps <= 1/2");
    propagation("general-p", report, n, p, eps, &hyp, opts)
}

/// `n^a > m²` decided exactly for rational `a`.
fn power_exceeds_square(n: u64, a: &Rational, m: u64) -> bool {
    let p = a.numer().to_i64().expect("small exponent numerator");
    let q = a.denom().to_u32().expect("small exponent denominator");
    let n = BigInt::from(n);
    let m2q = BigInt::from(m).pow(2 * q);
    if p >= 0 {
        n.pow(p as u32) > m2q
    } else {
        BigInt::one() > n.pow((-p) as u32) * m2q
    }
}

/// `Q(2n) <= √(e^{n^{-2ε}} Q(n) Q(4n))` for a harmonic polynomial of degree
/// `M`, proved when `n^{1-2ε} > M²`, `n > 16` and `0 <= ε < 1/2`. Besides the
/// parameters, the report is checked to have `a_k = 0` for `k > M`.
pub fn no_error_check(
    report: &GrowthReport,
    degree: u64,
    n: u64,
    eps: &Rational,
    opts: CheckOptions,
) -> Result<Verdict> {
    let q_n = report_value(&report.values, n)?;
    let q_mid = report_value(&report.values, 2 * n)?;
    let q_out = report_value(&report.values, 4 * n)?;
    let a = Rational::one() - eps * int(2);
    let mut hyp = Hypotheses::new();
    hyp.require(n > 16, "n > 16")
        .require(!eps.is_negative() && *eps < ratio(1, 2), "0 <= eps < 1/2")
        .require(
            power_exceeds_square(n, &a, degree),
            format!("n^(1-2eps) > M^2 with M = {degree}"),
        )
        .require(
            report
                .newton
                .iter()
                .skip(degree as usize + 1)
                .all(|ak| ak.is_zero()),
            format!("a_k = 0 for k > {degree}"),
        );
    hyp.gate(opts.explore)?;
    let parameters = params([
        ("n", n.to_string()),
        ("M", degree.to_string()),
        ("eps", format_rational(eps)),
    ]);
    decide("no-error", opts.policy, &hyp, parameters, |bits| {
        let c = exp_decay(n, eps, &RealEnclosure::one(), bits)?;
        Ok(Sides {
            lhs: q_mid.clone(),
            main: MainTerm::Sqrt(c.mul_rational(&(&q_n * &q_out))),
            error: RealEnclosure::zero(),
            max_form: false,
        })
    })
}

/// `Q(2n) <= √(Q(n) Q(m)) + 2^{-2nδ} Q(m)` with `m = ⌈4(1+δ)n⌉`, proved for
/// `0 < δ < 1/4`.
pub fn ratio_125_check(report: &GrowthReport, n: u64, delta: &Rational, opts: CheckOptions) -> Result<Verdict> {
    if !delta.is_positive() {
        return Err(Error::InvalidParameter(format!("delta = {delta} must be positive")));
    }
    let outer = index(&((Rational::one() + delta) * int(4 * n as i64)), true)?;
    let q_n = report_value(&report.values, n)?;
    let q_mid = report_value(&report.values, 2 * n)?;
    let q_out = report_value(&report.values, outer)?;
    let mut hyp = Hypotheses::new();
    hyp.require(*delta < ratio(1, 4), "0 < delta < 1/4");
    hyp.gate(opts.explore)?;
    let y = delta * int(2 * n as i64);
    let parameters = params([
        ("n", n.to_string()),
        ("delta", format_rational(delta)),
        ("outer_index", outer.to_string()),
    ]);
    decide("ratio-125", opts.policy, &hyp, parameters, |bits| {
        let error = enclose_inverse_power(&int(2), &exact(&y), bits)?.mul_rational(&q_out);
        Ok(Sides {
            lhs: q_mid.clone(),
            main: MainTerm::Sqrt(exact(&(&q_n * &q_out))),
            error,
            max_form: false,
        })
    })
}

/// The exponent of the aspect-ratio inequality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Alpha {
    /// Solve `P^α = p^{1-α}`: `α = ln p / (ln p + ln P)`.
    Derived,
    Given(Rational),
}

fn derived_alpha(p: &Rational, big_p: &Rational, bits: u32) -> Result<RealEnclosure> {
    if p == big_p {
        return Ok(RealEnclosure::exact(ratio(1, 2)));
    }
    let lp = enclose_ln(p, bits + 16)?;
    let l_big = enclose_ln(big_p, bits + 16)?;
    let den = lp.add(&l_big);
    Ok(RealEnclosure::new(&lp.lo / &den.hi, &lp.hi / &den.lo))
}

/// `Q(⌊Pn⌋) <= e^{c n^{-2ε}} Q(n)^α Q(⌈pPn⌉)^{1-α} + p^{-n^{0.5-ε}} Q(⌈pPn⌉)`
/// with `c = 2(αP + (1-α)/p - 1)`, for `1 < P < pP`.
///
/// The threshold `n_0(p, P)` of the general statement is not explicit, and
/// the guarantee is proved only for `α = 1/2`; a verdict counts as within the
/// hypotheses exactly when `p = P` (so `α = 1/2`), `n >= 4P²` and `c >= 1/2`,
/// where the statement follows from [`general_p_check`]'s inequality.
#[allow(clippy::too_many_arguments)]
pub fn aspect_ratio_check(
    report: &GrowthReport,
    n: u64,
    p: &Rational,
    big_p: &Rational,
    eps: &Rational,
    alpha: &Alpha,
    opts: CheckOptions,
) -> Result<Verdict> {
    let one = Rational::one();
    if !(one < *big_p && *p > one) {
        return Err(Error::InvalidParameter(format!(
            "parameter order 1 < P < pP violated by p = {p}, P = {big_p}"
        )));
    }
    if let Alpha::Given(a) = alpha {
        if a.is_negative() || *a > one {
            return Err(Error::InvalidParameter(format!("alpha = {a} outside [0, 1]")));
        }
    }
    let nn = int(n as i64);
    let mid = index(&(big_p * &nn), false)?;
    let outer = index(&(p * big_p * &nn), true)?;
    let q_n = report_value(&report.values, n)?;
    let q_mid = report_value(&report.values, mid)?;
    let q_out = report_value(&report.values, outer)?;

    let alpha_is_half = match alpha {
        Alpha::Derived => p == big_p,
        Alpha::Given(a) => *a == ratio(1, 2),
    };
    let mut hyp = Hypotheses::new();
    hyp.require(eps_in_range(eps), "0 <= eps <= 1/2");
    if alpha_is_half && p == big_p {
        let c = (big_p - &one) * (big_p - &one) / big_p;
        hyp.require(nn >= big_p * big_p * int(4), "n >= 4P^2")
            .require(c >= ratio(1, 2), "c >= 1/2 (implied by the general-P bound)");
    } else {
        hyp.unverifiable("n_0(p, P) is not explicit and the bound is proved only for alpha = 1/2 with p = P");
    }
    hyp.gate(opts.explore)?;

    let err_exp = ratio(1, 2) - eps;
    let mut parameters = params([
        ("n", n.to_string()),
        ("p", format_rational(p)),
        ("P", format_rational(big_p)),
        ("eps", format_rational(eps)),
        ("lhs_index", mid.to_string()),
        ("outer_index", outer.to_string()),
    ]);
    parameters.insert(
        "alpha".into(),
        match alpha {
            Alpha::Derived if !alpha_is_half => "derived".into(),
            Alpha::Derived => "1/2".into(),
            Alpha::Given(a) => format_rational(a),
        },
    );
    decide("aspect", opts.policy, &hyp, parameters, |bits| {
        let a = match alpha {
            Alpha::Derived => derived_alpha(p, big_p, bits)?,
            Alpha::Given(a) => exact(a),
        };
        // c is increasing in α since P - 1/p > 0
        let c_at = |x: &Rational| (x * big_p + (&one - x) / p - &one) * int(2);
        let c = RealEnclosure::new(c_at(&a.lo), c_at(&a.hi));
        let error = enclose_pow(p, n, &err_exp, bits)?.mul_rational(&q_out);
        let main = if alpha_is_half {
            let c2 = exp_decay(n, eps, &c.mul_rational(&int(2)), bits)?;
            MainTerm::Sqrt(c2.mul_rational(&(&q_n * &q_out)))
        } else {
            let e = exp_decay(n, eps, &c, bits)?;
            let one_minus = RealEnclosure::one().sub(&a);
            let inner = enclose_power(&exact(&q_n), &a, bits)?;
            let outer_pow = enclose_power(&exact(&q_out), &one_minus, bits)?;
            MainTerm::Direct(e.mul(&inner).mul(&outer_pow))
        };
        Ok(Sides {
            lhs: q_mid.clone(),
            main,
            error,
            max_form: false,
        })
    })
}

/// `Q_c(2t)² <= Q_c(t) Q_c(4t)`, decided exactly.
pub fn continuous_three_circles_check(qc: &ContinuousGrowthPolynomial, t: &Rational) -> Result<Verdict> {
    if !t.is_positive() {
        return Err(Error::InvalidParameter(format!("t = {t} must be positive")));
    }
    let q_t = qc.evaluate(t);
    let q_2t = qc.evaluate(&(t * int(2)));
    let q_4t = qc.evaluate(&(t * int(4)));
    let mut hyp = Hypotheses::new();
    hyp.note("exact comparison; Q_c has non-negative coefficients for harmonic u");
    let parameters = params([("t", format_rational(t))]);
    decide("continuous", super::PrecisionPolicy::default(), &hyp, parameters, |_| {
        Ok(Sides {
            lhs: q_2t.clone(),
            main: MainTerm::Sqrt(exact(&(&q_t * &q_4t))),
            error: RealEnclosure::zero(),
            max_form: false,
        })
    })
}

/// `√(ab) + √(cd) <= √(a+c) · √(b+d)`, decided by squaring twice.
pub fn additive_lemma_property(a: &Rational, b: &Rational, c: &Rational, d: &Rational) -> Result<bool> {
    if [a, b, c, d].iter().any(|x| x.is_negative()) {
        return Err(Error::InvalidParameter("inputs must be non-negative".into()));
    }
    // ab + cd + 2√(abcd) <= (a+c)(b+d)  ⟺  2√(abcd) <= ad + bc
    let r = (a + c) * (b + d) - a * b - c * d;
    Ok(!r.is_negative() && a * b * c * d * int(4) <= &r * &r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequalities::Status;
    use crate::rational::{binomial, from_biguint};

    fn binomial_report(scale: Rational, k: u64, n_max: u64) -> GrowthReport {
        GrowthReport::from_values((0..=n_max).map(|n| &scale * from_biguint(binomial(n, k))).collect())
    }

    fn constant_report(n_max: u64) -> GrowthReport {
        GrowthReport::from_values(vec![int(1); n_max as usize + 1])
    }

    #[test]
    fn three_circles_examples() {
        let v = three_circles_check(&constant_report(68), 17, &int(0), CheckOptions::default()).unwrap();
        assert_eq!(v.status, Status::Holds);
        assert!(v.within_hypotheses);
        let xy = binomial_report(ratio(1, 2), 2, 80);
        assert!(three_circles_check(&xy, 20, &ratio(1, 4), CheckOptions::default()).unwrap().holds());
        assert!(matches!(
            three_circles_check(&xy, 10, &int(0), CheckOptions::default()),
            Err(Error::HypothesisNotMet(_))
        ));
        let v = three_circles_check(&xy, 10, &int(0), CheckOptions::explore()).unwrap();
        assert!(!v.within_hypotheses && v.holds());
        assert!(matches!(
            three_circles_check(&xy, 21, &int(0), CheckOptions::default()),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn general_p_examples() {
        let xy = binomial_report(ratio(1, 2), 2, 80);
        let a = three_circles_check(&xy, 20, &int(0), CheckOptions::default()).unwrap();
        let b = general_p_check(&xy, 20, &int(2), &int(0), CheckOptions::default()).unwrap();
        assert_eq!((a.status, &a.main, &a.error_term), (b.status, &b.main, &b.error_term));
        let v = general_p_check(&constant_report(324), 36, &int(3), &int(0), CheckOptions::default()).unwrap();
        assert!(v.holds());
        let u3 = binomial_report(ratio(6, 27), 3, 90);
        assert!(general_p_check(&u3, 40, &ratio(3, 2), &ratio(1, 4), CheckOptions::default()).unwrap().holds());
        assert!(general_p_check(&u3, 40, &int(1), &int(0), CheckOptions::default()).is_err());
    }

    #[test]
    fn no_error_examples() {
        let x = GrowthReport::from_values((0..=80).map(int).collect());
        assert!(no_error_check(&x, 1, 20, &int(0), CheckOptions::default()).unwrap().holds());
        let m5 = binomial_report(int(1), 5, 80);
        assert!(matches!(
            no_error_check(&m5, 5, 20, &ratio(1, 4), CheckOptions::default()),
            Err(Error::HypothesisNotMet(_))
        ));
        let u2 = binomial_report(ratio(1, 2), 2, 100);
        assert!(no_error_check(&u2, 2, 25, &int(0), CheckOptions::default()).unwrap().holds());
        // a degree-2 report claimed as degree 1
        assert!(no_error_check(&u2, 1, 25, &int(0), CheckOptions::default()).is_err());
        assert!(power_exceeds_square(20, &ratio(1, 2), 2));
        assert!(!power_exceeds_square(16, &ratio(1, 2), 2));
    }

    #[test]
    fn ratio_125_examples() {
        assert!(ratio_125_check(&constant_report(40), 7, &ratio(1, 8), CheckOptions::default()).unwrap().holds());
        let xy = binomial_report(ratio(1, 2), 2, 140);
        assert!(ratio_125_check(&xy, 30, &ratio(1, 8), CheckOptions::default()).unwrap().holds());
        assert!(ratio_125_check(&xy, 3, &ratio(1, 2), CheckOptions::default()).is_err());
        assert!(ratio_125_check(&xy, 3, &int(0), CheckOptions::explore()).is_err());
    }

    #[test]
    fn aspect_examples() {
        let xy = binomial_report(ratio(1, 2), 2, 300);
        let a = three_circles_check(&xy, 20, &ratio(1, 4), CheckOptions::default()).unwrap();
        let b = aspect_ratio_check(&xy, 20, &int(2), &int(2), &ratio(1, 4), &Alpha::Derived, CheckOptions::default())
            .unwrap();
        assert_eq!(a.status, b.status);
        assert_eq!(a.main, b.main);
        let v = aspect_ratio_check(
            &constant_report(160),
            40,
            &int(2),
            &int(2),
            &ratio(1, 4),
            &Alpha::Given(ratio(1, 2)),
            CheckOptions::default(),
        )
        .unwrap();
        assert!(v.holds());
        let v = aspect_ratio_check(&xy, 60, &int(3), &ratio(3, 2), &ratio(1, 4), &Alpha::Derived, CheckOptions::explore())
            .unwrap();
        assert!(v.holds() && !v.within_hypotheses);
        assert!(aspect_ratio_check(&xy, 6, &int(1), &int(2), &int(0), &Alpha::Derived, CheckOptions::explore()).is_err());
        assert!(aspect_ratio_check(&xy, 6, &int(3), &int(2), &int(0), &Alpha::Derived, CheckOptions::default()).is_err());
    }

    #[test]
    fn continuous_examples() {
        let c = ContinuousGrowthPolynomial { coefficients: vec![int(4)] };
        let v = continuous_three_circles_check(&c, &int(3)).unwrap();
        assert!(v.holds() && v.margin == "0");
        let t = ContinuousGrowthPolynomial { coefficients: vec![int(0), int(1)] };
        assert!(continuous_three_circles_check(&t, &int(5)).unwrap().holds());
        let mixed = ContinuousGrowthPolynomial { coefficients: vec![int(0), int(1), ratio(1, 4)] };
        for t in [1, 3, 10] {
            assert!(continuous_three_circles_check(&mixed, &int(t)).unwrap().holds());
        }
        assert!(continuous_three_circles_check(&mixed, &int(0)).is_err());
    }

    #[test]
    fn additive_lemma_examples() {
        assert!(additive_lemma_property(&int(0), &int(0), &int(3), &int(5)).unwrap());
        assert!(additive_lemma_property(&int(1), &int(4), &int(4), &int(1)).unwrap());
        assert!(additive_lemma_property(&int(-1), &int(4), &int(4), &int(1)).is_err());
    }
}
