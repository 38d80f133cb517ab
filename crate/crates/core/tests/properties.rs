use harmonic_core::enclosure::{enclose_exp, enclose_ln, enclose_pow, enclose_sqrt, RealEnclosure};
use harmonic_core::growth::{growth_report_to, growth_values, GrowthReport};
use harmonic_core::harmonic::{correspondence, fk_polynomial, harmonic_kernel_basis, random_harmonic, random_harmonic_pair};
use harmonic_core::inequalities::{additive_lemma_property, general_p_check, three_circles_check, CheckOptions};
use harmonic_core::io::{lattice_function_from_json, lattice_function_to_json, polynomial_from_json, polynomial_to_json};
use harmonic_core::rational::{format_rational, int, parse_rational, ratio, to_f64};
use harmonic_core::walk::walk_counts;
use harmonic_core::{LatticeBall, LatticeFunction, MultivariatePolynomial, Rational};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-60i64..=60, 1i64..=12).prop_map(|(n, d)| ratio(n, d))
}

fn positive() -> impl Strategy<Value = Rational> {
    (1i64..=60, 1i64..=12).prop_map(|(n, d)| ratio(n, d))
}

fn function(dim: usize, radius: usize) -> impl Strategy<Value = LatticeFunction> {
    let ball = LatticeBall::new(dim, radius).unwrap();
    proptest::collection::vec(rational(), ball.len())
        .prop_map(move |v| LatticeFunction::new(ball.clone(), v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn laplacian_is_linear(f in function(2, 4), g in function(2, 4), a in rational(), b in rational()) {
        let lhs = f.linear_combination(&a, &g, &b).unwrap().laplacian().unwrap();
        let rhs = f.laplacian().unwrap().linear_combination(&a, &g.laplacian().unwrap(), &b).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn growth_scales_quadratically(f in function(2, 5), c in rational()) {
        let q = growth_values(&f, 5).unwrap();
        let qc = growth_values(&f.scale(&c), 5).unwrap();
        for (a, b) in q.iter().zip(&qc) {
            prop_assert_eq!(a * &c * &c, b.clone());
        }
    }

    #[test]
    fn newton_coefficients_are_laplacian_powers(f in function(1, 6)) {
        // holds for any function, harmonic or not
        let r = growth_report_to(&f, 6).unwrap();
        prop_assert_eq!(Some(r.newton.clone()), r.laplacian_coefficients.clone());
        for n in 0..=6u64 {
            prop_assert_eq!(r.newton_sum(n), r.values[n as usize].clone());
        }
    }

    #[test]
    fn heat_kernel_mass(d in 1usize..=3, n in 0usize..=12) {
        let t = walk_counts(d, n).unwrap();
        prop_assert_eq!(t.total(), num_bigint::BigUint::from(2 * d as u64).pow(n as u32));
    }

    #[test]
    fn additive_lemma(a in positive(), b in positive(), c in positive(), d in positive()) {
        prop_assert!(additive_lemma_property(&a, &b, &c, &d).unwrap());
    }

    #[test]
    fn correspondence_is_linear(s1 in 0u64..500, s2 in 0u64..500, a in rational(), b in rational(), d in 2usize..=3) {
        let p = random_harmonic_pair(d, 3, s1).unwrap().continuous;
        let q = random_harmonic_pair(d, 3, s2).unwrap().continuous;
        let combo = &p.scale(&a) + &q.scale(&b);
        let lhs = correspondence(&combo).unwrap();
        let rhs = &correspondence(&p).unwrap().scale(&a) + &correspondence(&q).unwrap().scale(&b);
        prop_assert!(lhs.is_lattice_harmonic());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn basis_identities(k in 0usize..=20) {
        let f = fk_polynomial(k).polynomial;
        let below = |j: usize| if k >= j { fk_polynomial(k - j).polynomial } else { MultivariatePolynomial::zero(1) };
        prop_assert_eq!(f.discrete_laplacian(), below(2).scale(&ratio(1, 2)));
        prop_assert_eq!(f.forward_difference(0), below(1).translate(&[ratio(1, 2)]));
    }

    #[test]
    fn exp_enclosure_is_sound(num in -400i64..=400, den in 1i64..=16, bits in prop::sample::select(vec![32u32, 64, 128])) {
        let x = ratio(num, den);
        let e = enclose_exp(&x, bits);
        let truth = to_f64(&x).exp();
        let (lo, hi) = (to_f64(&e.lo), to_f64(&e.hi));
        prop_assert!(lo <= hi);
        prop_assert!(lo <= truth * (1.0 + 1e-12) && truth * (1.0 - 1e-12) <= hi);
        // bounds at another precision must overlap
        let other = enclose_exp(&x, 2 * bits);
        prop_assert!(other.lo <= e.hi && e.lo <= other.hi);
    }

    #[test]
    fn exp_is_monotone(a in rational(), b in rational()) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(enclose_exp(&lo, 64).lo <= enclose_exp(&hi, 64).hi);
    }

    #[test]
    fn ln_and_sqrt_are_sound(x in positive()) {
        let l = enclose_ln(&x, 64).unwrap();
        let t = to_f64(&x).ln();
        prop_assert!(to_f64(&l.lo) - 1e-12 <= t && t <= to_f64(&l.hi) + 1e-12);
        let s = enclose_sqrt(&RealEnclosure::exact(x.clone()), 64).unwrap();
        prop_assert!(&s.lo * &s.lo <= x && x <= &s.hi * &s.hi);
    }

    #[test]
    fn power_enclosure_brackets(n in 2u64..=400, r in prop::sample::select(vec![ratio(1, 2), ratio(3, 5), ratio(2, 5), int(1)])) {
        let e = enclose_pow(&int(2), n, &r, 64).unwrap();
        let t = 2f64.powf(-(n as f64).powf(to_f64(&r)));
        prop_assert!(to_f64(&e.lo) <= t * (1.0 + 1e-9) && t * (1.0 - 1e-9) <= to_f64(&e.hi));
    }

    #[test]
    fn rational_text_round_trip(x in rational()) {
        prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
    }

    #[test]
    fn lattice_json_round_trip(f in function(3, 2), sparse in any::<bool>()) {
        prop_assert_eq!(lattice_function_from_json(&lattice_function_to_json(&f, sparse), sparse).unwrap(), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn verdicts_are_scale_invariant(seed in 0u64..1000, c in positive(), n in 17u64..=20) {
        let u = random_harmonic(2, 4, seed).unwrap();
        let report = growth_report_to(&u.evaluate_on_ball(80).unwrap(), 80).unwrap();
        let scaled: GrowthReport = report.scaled(&c);
        let v = three_circles_check(&report, n, &ratio(1, 4), CheckOptions::default()).unwrap();
        let w = three_circles_check(&scaled, n, &ratio(1, 4), CheckOptions::default()).unwrap();
        prop_assert_eq!(v.status, w.status);
        let v = general_p_check(&report, n, &ratio(3, 2), &ratio(1, 4), CheckOptions::default()).unwrap();
        let w = general_p_check(&scaled, n, &ratio(3, 2), &ratio(1, 4), CheckOptions::default()).unwrap();
        prop_assert_eq!(v.status, w.status);
    }

    #[test]
    fn polynomial_json_round_trip(seed in 0u64..1000, d in 1usize..=3) {
        let p = random_harmonic(d, 3, seed).unwrap();
        prop_assert_eq!(polynomial_from_json(&polynomial_to_json(&p)).unwrap(), p);
    }

    #[test]
    fn kernel_basis_is_harmonic(d in 2usize..=3, m in 0usize..=4) {
        for p in harmonic_kernel_basis(d, m).unwrap() {
            prop_assert!(p.continuous_laplacian().is_zero());
            prop_assert!(correspondence(&p).unwrap().is_lattice_harmonic());
        }
    }
}
