//! Verdict engines for the three-circles inequalities and their relatives.
//!
//! Every checker compares an exact left-hand side against a right-hand side
//! `main + error`, where the main term is either a square root `√M` or a
//! direct product, and both terms may involve transcendental constants held
//! as [`RealEnclosure`]s. Square roots are never taken numerically for the
//! decision: `L <= √M + E` is decided from `D = L - E` by comparing `D²`
//! against bounds of `M`. Precision doubles until the two sides separate or the
//! cap is reached, in which case the status is [`Status::Undecided`].
//!
//! Checkers consume growth values only. Whether the function behind a report
//! satisfies a theorem's domain hypothesis (harmonic on a large enough ball)
//! is the caller's responsibility; the verdict records the hypotheses that can
//! be checked from the parameters.

mod binomial;
mod liouville;
mod three_circles;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::enclosure::{enclose_sqrt, RealEnclosure};
use crate::error::{Error, Result};
use crate::rational::{format_rational, format_sci_directed, serde_str, Rational};

pub use binomial::{
    binomial_inequality_check, certify_witness, counterexample_search, sharp_error_check,
    sharp_error_values_check, BinomialVerdicts, SearchOutcome, SearchWindow, WitnessCertificate,
};
pub use liouville::{degree_bound, vanishing_ball_test, DegreeBound, VanishingCertificate};
pub use three_circles::{
    additive_lemma_property, aspect_ratio_check, continuous_three_circles_check, general_p_check,
    no_error_check, ratio_125_check, three_circles_check, Alpha,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Holds,
    Fails,
    Undecided,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Holds => "holds",
            Status::Fails => "fails",
            Status::Undecided => "undecided",
        })
    }
}

/// Precision schedule in bits: start, doubling up to the cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    pub start_bits: u32,
    pub max_bits: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            start_bits: 64,
            max_bits: 256,
        }
    }
}

impl PrecisionPolicy {
    pub fn fixed(bits: u32) -> Self {
        PrecisionPolicy {
            start_bits: bits,
            max_bits: bits,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckOptions {
    pub policy: PrecisionPolicy,
    /// Evaluate even when a theorem hypothesis fails; the verdict is then
    /// marked as outside the hypotheses instead of returning an error.
    pub explore: bool,
}

impl CheckOptions {
    pub fn explore() -> Self {
        CheckOptions {
            explore: true,
            ..Default::default()
        }
    }
}

/// Outcome of one inequality check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub status: Status,
    #[serde(with = "serde_str")]
    pub lhs: Rational,
    pub main: RealEnclosure,
    pub error_term: RealEnclosure,
    /// Certified lower bound of `rhs - lhs`, in decimal.
    pub margin: String,
    pub margin_enclosure: RealEnclosure,
    pub within_hypotheses: bool,
    pub hypotheses: String,
    pub precision_bits: u32,
    pub parameters: BTreeMap<String, String>,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn fails(&self) -> bool {
        self.status == Status::Fails
    }
}

#[derive(Clone, Debug)]
pub(crate) enum MainTerm {
    /// `√M` with `M` enclosed.
    Sqrt(RealEnclosure),
    Direct(RealEnclosure),
}

#[derive(Clone, Debug)]
pub(crate) struct Sides {
    pub lhs: Rational,
    pub main: MainTerm,
    pub error: RealEnclosure,
    /// Compare against `max(main, error)` instead of `main + error`.
    pub max_form: bool,
}

// Some(true): certainly d <= main; Some(false): certainly d > main.
fn le_main(d: &RealEnclosure, main: &MainTerm) -> Option<bool> {
    match main {
        MainTerm::Sqrt(m) => {
            if !d.hi.is_positive() || &d.hi * &d.hi <= m.lo {
                Some(true)
            } else if d.lo.is_positive() && &d.lo * &d.lo > m.hi {
                Some(false)
            } else {
                None
            }
        }
        MainTerm::Direct(m) => {
            if d.hi <= m.lo {
                Some(true)
            } else if d.lo > m.hi {
                Some(false)
            } else {
                None
            }
        }
    }
}

pub(crate) fn classify(s: &Sides) -> Status {
    let lhs = RealEnclosure::exact(s.lhs.clone());
    let decided = if s.max_form {
        let below_main = le_main(&lhs, &s.main);
        let below_error = if lhs.certainly_le(&s.error) {
            Some(true)
        } else if lhs.certainly_gt(&s.error) {
            Some(false)
        } else {
            None
        };
        match (below_main, below_error) {
            (Some(true), _) | (_, Some(true)) => Some(true),
            (Some(false), Some(false)) => Some(false),
            _ => None,
        }
    } else {
        le_main(&lhs.sub(&s.error), &s.main)
    };
    match decided {
        Some(true) => Status::Holds,
        Some(false) => Status::Fails,
        None => Status::Undecided,
    }
}

/// Hypothesis bookkeeping for one check.
#[derive(Clone, Debug, Default)]
pub(crate) struct Hypotheses {
    notes: Vec<String>,
    all_met: bool,
}

impl Hypotheses {
    pub fn new() -> Self {
        Hypotheses {
            notes: Vec::new(),
            all_met: true,
        }
    }

    pub fn require(&mut self, met: bool, description: impl Into<String>) -> &mut Self {
        let d = description.into();
        self.notes
            .push(format!("{d}: {}", if met { "met" } else { "NOT met" }));
        self.all_met &= met;
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    pub fn unverifiable(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self.all_met = false;
        self
    }

    pub fn met(&self) -> bool {
        self.all_met
    }

    pub fn summary(&self) -> String {
        self.notes.join("; ")
    }

    /// Errors unless the hypotheses hold or exploration was requested.
    pub fn gate(&self, explore: bool) -> Result<()> {
        if self.all_met || explore {
            Ok(())
        } else {
            Err(Error::HypothesisNotMet(self.summary()))
        }
    }
}

pub(crate) fn report_value(values: &[Rational], n: u64) -> Result<Rational> {
    values.get(n as usize).cloned().ok_or(Error::OutOfRange {
        index: n,
        max: values.len().saturating_sub(1) as u64,
    })
}

/// Runs `build` at increasing precision until the verdict is decided.
pub(crate) fn decide<F>(
    check: &str,
    policy: PrecisionPolicy,
    hypotheses: &Hypotheses,
    parameters: BTreeMap<String, String>,
    build: F,
) -> Result<Verdict>
where
    F: Fn(u32) -> Result<Sides>,
{
    if policy.start_bits == 0 || policy.start_bits > policy.max_bits {
        return Err(Error::InvalidParameter(format!(
            "precision schedule {}..{} bits",
            policy.start_bits, policy.max_bits
        )));
    }
    let mut bits = policy.start_bits;
    loop {
        let sides = build(bits)?;
        let status = classify(&sides);
        if status != Status::Undecided || bits >= policy.max_bits {
            return assemble(check, status, sides, bits, hypotheses, parameters);
        }
        bits = (bits * 2).min(policy.max_bits);
    }
}

fn assemble(
    check: &str,
    status: Status,
    sides: Sides,
    bits: u32,
    hypotheses: &Hypotheses,
    parameters: BTreeMap<String, String>,
) -> Result<Verdict> {
    let main = match &sides.main {
        MainTerm::Sqrt(m) => enclose_sqrt(m, bits)?,
        MainTerm::Direct(m) => m.clone(),
    };
    let rhs = if sides.max_form {
        main.max(&sides.error)
    } else {
        main.add(&sides.error)
    };
    let margin_enclosure = rhs.sub(&RealEnclosure::exact(sides.lhs.clone()));
    let margin = if margin_enclosure.lo.is_zero() {
        "0".to_string()
    } else {
        format_sci_directed(&margin_enclosure.lo, 6, false)
    };
    Ok(Verdict {
        check: check.to_string(),
        status,
        lhs: sides.lhs,
        main,
        error_term: sides.error,
        margin,
        margin_enclosure,
        within_hypotheses: hypotheses.met(),
        hypotheses: hypotheses.summary(),
        precision_bits: bits,
        parameters,
    })
}

pub(crate) fn params<const N: usize>(items: [(&str, String); N]) -> BTreeMap<String, String> {
    items
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

pub(crate) fn fmt_q(q: &Rational) -> String {
    format_rational(q)
}
