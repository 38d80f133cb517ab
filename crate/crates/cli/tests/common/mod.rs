#![allow(dead_code)]

use std::sync::OnceLock;

use harmonic_core::growth::{growth_reports_batch, GrowthReport};
use harmonic_core::harmonic::{monomial_uk, random_harmonic_pair, sk_polynomial, tk_polynomial};
use harmonic_core::{LatticeFunction, MultivariatePolynomial};
use num_traits::Zero;

/// Radius of the corpus balls and length of the corpus reports.
pub const CORPUS_RADIUS: usize = 60;

pub struct Member {
    pub name: String,
    pub poly: MultivariatePolynomial,
    /// The continuous polynomial behind a correspondence output.
    pub continuous: Option<MultivariatePolynomial>,
    pub function: LatticeFunction,
    pub report: GrowthReport,
}

impl Member {
    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    /// Exact `Q(0..=n_max)` from the Newton series. For a harmonic polynomial
    /// of degree `M`, `a_k = Δ^k(u²)(0) = 0` for `k > M`, so the series is a
    /// polynomial in `n` and valid for every `n`.
    pub fn extended_report(&self, n_max: usize) -> GrowthReport {
        let a = &self.report.newton;
        assert!(a.iter().skip(self.degree() + 1).all(Zero::is_zero), "{}: a_k beyond the degree", self.name);
        GrowthReport::from_values((0..=n_max as u64).map(|n| self.report.newton_sum(n)).collect())
    }
}

// (name, polynomial, continuous source)
fn members() -> Vec<(String, MultivariatePolynomial, Option<MultivariatePolynomial>)> {
    let mut out = Vec::new();
    for (d, k) in [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3)] {
        out.push((format!("u_{k} on Z^{d}"), monomial_uk(d, k).unwrap(), None));
    }
    for k in 0..=8 {
        out.push((format!("S_{k}"), sk_polynomial(k), None));
    }
    for k in 1..=8 {
        out.push((format!("T_{k}"), tk_polynomial(k).unwrap(), None));
    }
    for i in 0..10u64 {
        let d = 2 + (i % 2) as usize;
        let deg = 2 + (i % 5) as usize;
        let seed = 1000 + i;
        let pair = random_harmonic_pair(d, deg, seed).unwrap();
        out.push((
            format!("random d={d} deg<={deg} seed={seed}"),
            pair.discrete,
            Some(pair.continuous),
        ));
    }
    out
}

fn build() -> Vec<Member> {
    let specs = members();
    let mut built: Vec<Option<Member>> = (0..specs.len()).map(|_| None).collect();
    for dim in [2, 3] {
        let idx: Vec<usize> = (0..specs.len()).filter(|&i| specs[i].1.dim() == dim).collect();
        let functions: Vec<LatticeFunction> = idx
            .iter()
            .map(|&i| specs[i].1.evaluate_on_ball(CORPUS_RADIUS).unwrap())
            .collect();
        let reports = growth_reports_batch(&functions, CORPUS_RADIUS).unwrap();
        for ((i, function), report) in idx.into_iter().zip(functions).zip(reports) {
            let (name, poly, continuous) = specs[i].clone();
            built[i] = Some(Member {
                name,
                poly,
                continuous,
                function,
                report,
            });
        }
    }
    built.into_iter().map(Option::unwrap).collect()
}

/// 32 harmonic polynomials on `B_60`: `u_k`, `S_0..S_8`, `T_1..T_8` and ten
/// seeded random correspondence outputs in `d ∈ {2, 3}` of degree up to 6.
pub fn corpus() -> &'static [Member] {
    static CORPUS: OnceLock<Vec<Member>> = OnceLock::new();
    CORPUS.get_or_init(build)
}
