//! `harm`: exact discrete harmonic analysis from the command line.
//!
//! Exit codes: 0 holds / confirmed, 1 fails / violation found, 2 undecided,
//! 3 usage or input error.

mod args;
mod input;

use std::fs;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};
use harmonic_core::conjecture::{conjecture_scan, default_window};
use harmonic_core::growth::{
    check_absolute_monotonicity, continuous_growth, growth_values, monte_carlo_q, GrowthReport,
};
use harmonic_core::harmonic::random_harmonic_pair;
use harmonic_core::inequalities::{
    aspect_ratio_check, binomial_inequality_check, continuous_three_circles_check,
    counterexample_search, degree_bound, general_p_check, no_error_check, ratio_125_check,
    sharp_error_check, three_circles_check, vanishing_ball_test, Alpha, CheckOptions,
    PrecisionPolicy, SearchOutcome, Status, Verdict,
};
use harmonic_core::io::{growth_report_csv, growth_report_to_json, polynomial_to_json, scan_csv, verdict_to_json};
use harmonic_core::rational::{ceil_to_u64, int, Rational};
use harmonic_core::{Error, SCHEMA_VERSION};
use serde_json::json;

use args::{CheckCommand, Cli, Command, ConjectureCommand, Format, LiouvilleCommand, SearchCommand};
use input::{ensure_harmonic, load_function, load_polynomial, load_report};

const EXIT_USAGE: u8 = 3;

fn status_code(status: Status) -> u8 {
    match status {
        Status::Holds => 0,
        Status::Fails => 1,
        Status::Undecided => 2,
    }
}

fn main() -> ExitCode {
    let version: &'static str = Box::leak(
        format!("{} (schema version {SCHEMA_VERSION})", env!("CARGO_PKG_VERSION")).into_boxed_str(),
    );
    let matches = match Cli::command().version(version).try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot configure {threads} threads: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let opts = CheckOptions {
        policy: PrecisionPolicy {
            start_bits: cli.precision,
            max_bits: cli.max_precision.max(cli.precision),
        },
        explore: false,
    };
    match run(cli.command, opts) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn emit_verdict(v: &Verdict) -> u8 {
    println!("{}", verdict_to_json(v));
    eprintln!(
        "{}: {} (hypotheses {}: {})",
        v.check,
        v.status,
        if v.within_hypotheses { "met" } else { "NOT met" },
        v.hypotheses
    );
    status_code(v.status)
}

fn run(command: Command, opts: CheckOptions) -> Result<u8, Error> {
    match command {
        Command::Growth(a) => {
            let u = match (&a.input.function, &a.input.poly) {
                (Some(_), _) => load_function(&a.input)?,
                (None, Some(_)) => {
                    let n = a.n_max.ok_or_else(|| {
                        Error::InvalidParameter("--n-max is required with --poly".into())
                    })?;
                    load_polynomial(&a.input)?.evaluate_on_ball(n)?
                }
                _ => return Err(Error::InvalidParameter("one of --function or --poly is required".into())),
            };
            let n_max = a.n_max.unwrap_or(u.radius());
            let report = if a.newton {
                harmonic_core::growth::growth_report_to(&u, n_max)?
            } else {
                GrowthReport::from_values(growth_values(&u, n_max)?)
            };
            match a.format {
                Format::Json => println!("{}", growth_report_to_json(&report)),
                Format::Csv => print!("{}", growth_report_csv(&report, a.diffs)),
            }
            Ok(0)
        }
        Command::Check(c) => run_check(c, opts),
        Command::Search(SearchCommand::Counterexample(a)) => {
            let window = a.window.parse()?;
            let outcome = counterexample_search(&a.c, &a.eps, a.k_min, a.k_max, a.n0, window, opts)?;
            println!("{}", serde_json::to_string(&outcome).expect("serializable"));
            Ok(match &outcome {
                SearchOutcome::Found { k, n, .. } => {
                    eprintln!("violation found at k = {k}, n = {n}");
                    1
                }
                SearchOutcome::Exhausted { undecided, .. } => {
                    eprintln!("no certified violation in the searched range");
                    if *undecided > 0 { 2 } else { 0 }
                }
            })
        }
        Command::Conjecture(ConjectureCommand::Scan(a)) => {
            let (from, to) = match (a.n_from, a.n_to) {
                (Some(f), Some(t)) => (f, t),
                (f, t) => {
                    let (df, dt) = default_window(a.k);
                    (f.unwrap_or(df), t.unwrap_or(dt))
                }
            };
            let result = conjecture_scan(a.k, &a.c, &a.eps, from, to, opts)?;
            let csv = scan_csv(&result.rows);
            if let Some(path) = &a.out {
                fs::write(path, &csv).map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
            }
            match a.format {
                Format::Json => println!("{}", serde_json::to_string(&result).expect("serializable")),
                Format::Csv => print!("{csv}"),
            }
            eprintln!("{}", result.summary.message);
            Ok(if !result.summary.violations.is_empty() {
                1
            } else if !result.summary.undecided.is_empty() {
                2
            } else {
                0
            })
        }
        Command::RandomHarmonic(a) => {
            let pair = random_harmonic_pair(a.d, a.degree, a.seed)?;
            let doc = json!({
                "seed": a.seed,
                "continuous": serde_json::from_str::<serde_json::Value>(&polynomial_to_json(&pair.continuous)).expect("valid"),
                "discrete": serde_json::from_str::<serde_json::Value>(&polynomial_to_json(&pair.discrete)).expect("valid"),
            });
            println!("{doc}");
            Ok(0)
        }
        Command::MonteCarlo(a) => {
            let u = match (&a.input.function, &a.input.poly) {
                (Some(_), _) => load_function(&a.input)?,
                (None, Some(_)) => load_polynomial(&a.input)?.evaluate_on_ball(a.n as usize)?,
                _ => return Err(Error::InvalidParameter("one of --function or --poly is required".into())),
            };
            let est = monte_carlo_q(&u, a.n as usize, a.samples, a.seed)?;
            println!(
                "{}",
                json!({"n": a.n, "seed": a.seed, "mean": est.mean, "stderr": est.stderr, "samples": est.samples})
            );
            Ok(0)
        }
        Command::Liouville(LiouvilleCommand::DegreeBound(a)) => {
            let p = load_polynomial(&a.input)?;
            let b = degree_bound(&p)?;
            println!("{}", serde_json::to_string(&b).expect("serializable"));
            Ok(0)
        }
        Command::Liouville(LiouvilleCommand::Vanishing(a)) => {
            let p = load_polynomial(&a.input)?;
            match vanishing_ball_test(&p, a.m) {
                Ok(cert) => {
                    println!("{}", serde_json::to_string(&cert).expect("serializable"));
                    eprintln!("u vanishes identically");
                    Ok(0)
                }
                Err(Error::HypothesisViolation { point, reason }) => {
                    println!("{}", json!({"confirmed_zero": false, "witness": point, "reason": reason}));
                    eprintln!("not zero on the ball: {reason}");
                    Ok(1)
                }
                Err(e) => Err(e),
            }
        }
    }
}

fn times(factor: &Rational, n: u64) -> Result<usize, Error> {
    ceil_to_u64(&(factor * int(n as i64)))
        .map(|v| v as usize)
        .ok_or_else(|| Error::InvalidParameter("index out of range".into()))
}

fn run_check(command: CheckCommand, base: CheckOptions) -> Result<u8, Error> {
    let with = |explore: bool| CheckOptions { explore, ..base };
    let verdict = match command {
        CheckCommand::ThreeCircles(a) => {
            let report = load_report(&a.input, 4 * a.n as usize, a.explore)?;
            three_circles_check(&report, a.n, &a.eps, with(a.explore))?
        }
        CheckCommand::GeneralP(a) => {
            let report = load_report(&a.input, times(&(&a.p * &a.p), a.n)?, a.explore)?;
            general_p_check(&report, a.n, &a.p, &a.eps, with(a.explore))?
        }
        CheckCommand::NoError(a) => {
            let degree = match a.degree {
                Some(m) => m,
                None if a.input.poly.is_some() => load_polynomial(&a.input)?.degree() as u64,
                None => return Err(Error::InvalidParameter("--degree is required without --poly".into())),
            };
            let report = load_report(&a.input, 4 * a.n as usize, a.explore)?;
            no_error_check(&report, degree, a.n, &a.eps, with(a.explore))?
        }
        CheckCommand::Ratio125(a) => {
            let factor = (Rational::from_integer(1.into()) + &a.delta) * int(4);
            let report = load_report(&a.input, times(&factor, a.n)?, a.explore)?;
            ratio_125_check(&report, a.n, &a.delta, with(a.explore))?
        }
        CheckCommand::Aspect(a) => {
            let alpha = match (&a.alpha, a.derive_alpha) {
                (Some(q), false) => Alpha::Given(q.clone()),
                (None, true) => Alpha::Derived,
                _ => {
                    return Err(Error::InvalidParameter(
                        "give exactly one of --alpha or --derive-alpha".into(),
                    ))
                }
            };
            let report = load_report(&a.input, times(&(&a.p * &a.big_p), a.n)?, a.explore)?;
            aspect_ratio_check(&report, a.n, &a.p, &a.big_p, &a.eps, &alpha, with(a.explore))?
        }
        CheckCommand::SharpError(a) => {
            let report = load_report(&a.input, 4 * a.n as usize, true)?;
            sharp_error_check(&report, a.n, &a.c, &a.eps, base)?
        }
        CheckCommand::Continuous(a) => {
            let p = load_polynomial(&a.input)?;
            ensure_harmonic(&p, false)?;
            let qc = continuous_growth(&p, a.radius)?;
            continuous_three_circles_check(&qc, &a.t)?
        }
        CheckCommand::Binomial(a) => {
            let v = binomial_inequality_check(a.n, a.k, &a.p, &a.eps, base)?;
            let chosen = if a.max_form { &v.max_form } else { &v.plain };
            println!("{}", serde_json::to_string(&v).expect("serializable"));
            eprintln!(
                "{}: {} (hypotheses {}: {})",
                chosen.check,
                chosen.status,
                if chosen.within_hypotheses { "met" } else { "NOT met" },
                chosen.hypotheses
            );
            return Ok(status_code(chosen.status));
        }
        CheckCommand::Monotonicity(a) => {
            let u = load_function(&a.input)?;
            let report = GrowthReport::from_values(growth_values(&u, u.radius())?);
            let m = check_absolute_monotonicity(&report);
            let first = m.first_violation.as_ref().map(|(k, n, v)| {
                json!({"k": k, "n": n, "value": harmonic_core::rational::format_rational(v)})
            });
            println!("{}", json!({"holds": m.holds, "first_violation": first}));
            return Ok(if m.holds { 0 } else { 1 });
        }
    };
    Ok(emit_verdict(&verdict))
}
