//! JSON and CSV formats.
//!
//! Lattice function: `{"d": 2, "R": 1, "entries": [[0, 0, "1/2"], [1, 0, "3"], …]}`.
//! Every ball point must be listed unless the reader is asked for sparse
//! input, in which case missing points are zero.
//!
//! Polynomial: `{"d": 2, "terms": [{"alpha": [1, 1], "coeff": "1"}]}`.
//!
//! Rationals are always strings (`"num/den"` or an integer); readers also
//! accept finite decimals and plain JSON integers.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::conjecture::ScanRow;
use crate::error::{Error, Result};
use crate::growth::GrowthReport;
use crate::inequalities::Verdict;
use crate::lattice::{LatticeBall, LatticeFunction};
use crate::polynomial::MultivariatePolynomial;
use crate::rational::{format_rational, format_sci_directed, parse_rational, Rational};
use crate::SCHEMA_VERSION;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn rational_value(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        other => Err(parse_err(format!("expected a rational, found {other}"))),
    }
}

fn usize_field(obj: &serde_json::Map<String, Value>, key: &str) -> Result<usize> {
    obj.get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| parse_err(format!("missing or non-integer field \"{key}\"")))
}

fn object(text: &str) -> Result<serde_json::Map<String, Value>> {
    match serde_json::from_str::<Value>(text).map_err(|e| parse_err(e.to_string()))? {
        Value::Object(m) => Ok(m),
        _ => Err(parse_err("expected a JSON object")),
    }
}

pub fn lattice_function_from_json(text: &str, sparse: bool) -> Result<LatticeFunction> {
    let obj = object(text)?;
    let dim = usize_field(&obj, "d")?;
    let radius = usize_field(&obj, "R")?;
    let ball = LatticeBall::new(dim, radius)?;
    let entries = obj
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err("missing array field \"entries\""))?;
    let mut values: Vec<Option<Rational>> = vec![None; ball.len()];
    for entry in entries {
        let items = entry
            .as_array()
            .filter(|a| a.len() == dim + 1)
            .ok_or_else(|| parse_err(format!("entry {entry} must have {dim} coordinates and a value")))?;
        let point = items[..dim]
            .iter()
            .map(|c| c.as_i64().ok_or_else(|| parse_err(format!("non-integer coordinate in {entry}"))))
            .collect::<Result<Vec<i64>>>()?;
        let index = ball
            .index_of(&point)
            .ok_or_else(|| parse_err(format!("point {point:?} lies outside B_{radius}")))?;
        if values[index].is_some() {
            return Err(parse_err(format!("point {point:?} listed twice")));
        }
        values[index] = Some(rational_value(&items[dim])?);
    }
    if !sparse {
        if let Some(i) = values.iter().position(Option::is_none) {
            return Err(parse_err(format!(
                "point {:?} has no entry (missing points are zero only for sparse input)",
                ball.point(i)
            )));
        }
    }
    let values = values.into_iter().map(Option::unwrap_or_default).collect();
    LatticeFunction::new(ball, values)
}

/// Dense output lists every point; sparse output drops zeros.
pub fn lattice_function_to_json(f: &LatticeFunction, sparse: bool) -> String {
    let entries: Vec<Value> = f
        .iter()
        .filter(|(_, v)| !sparse || !num_traits::Zero::is_zero(*v))
        .map(|(x, v)| {
            let mut row: Vec<Value> = x.iter().map(|&c| Value::from(c)).collect();
            row.push(Value::from(format_rational(v)));
            Value::Array(row)
        })
        .collect();
    serde_json::json!({"d": f.dim(), "R": f.radius(), "entries": entries}).to_string()
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    alpha: Vec<u32>,
    coeff: Value,
}

#[derive(Serialize, Deserialize)]
struct PolynomialDoc {
    d: usize,
    terms: Vec<TermDoc>,
}

pub fn polynomial_from_json(text: &str) -> Result<MultivariatePolynomial> {
    let doc: PolynomialDoc = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    let terms = doc
        .terms
        .iter()
        .map(|t| Ok((t.alpha.clone(), rational_value(&t.coeff)?)))
        .collect::<Result<Vec<_>>>()?;
    MultivariatePolynomial::from_terms(doc.d, terms)
}

pub fn polynomial_to_json(p: &MultivariatePolynomial) -> String {
    let doc = PolynomialDoc {
        d: p.dim(),
        terms: p
            .terms()
            .map(|(alpha, c)| TermDoc {
                alpha: alpha.clone(),
                coeff: Value::from(format_rational(c)),
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("serializable")
}

#[derive(Serialize, Deserialize)]
struct ReportDoc {
    schema_version: u32,
    #[serde(flatten)]
    report: GrowthReport,
}

pub fn growth_report_to_json(report: &GrowthReport) -> String {
    let doc = ReportDoc {
        schema_version: SCHEMA_VERSION,
        report: report.clone(),
    };
    serde_json::to_string(&doc).expect("serializable")
}

pub fn growth_report_from_json(text: &str) -> Result<GrowthReport> {
    let doc: ReportDoc = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(parse_err(format!("unsupported schema version {}", doc.schema_version)));
    }
    Ok(doc.report)
}

fn csv_string(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w).expect("in-memory CSV");
    String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("UTF-8")
}

/// Columns `n, Q, d1 … dK` with `dk = Q^{(k)}(n)`; blank where `k + n > N`.
pub fn growth_report_csv(report: &GrowthReport, diffs: usize) -> String {
    csv_string(|w| {
        let mut header = vec!["n".to_string(), "Q".to_string()];
        header.extend((1..=diffs).map(|k| format!("d{k}")));
        w.write_record(&header)?;
        for (n, q) in report.values.iter().enumerate() {
            let mut row = vec![n.to_string(), format_rational(q)];
            row.extend(
                (1..=diffs).map(|k| report.difference(k, n).map(format_rational).unwrap_or_default()),
            );
            w.write_record(&row)?;
        }
        Ok(())
    })
}

pub fn verdict_to_json(v: &Verdict) -> String {
    serde_json::to_string(v).expect("serializable")
}

pub fn verdict_from_json(text: &str) -> Result<Verdict> {
    serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))
}

pub const SCAN_CSV_COLUMNS: [&str; 11] = [
    "n", "Q_n", "Q_2n", "Q_4n", "ratio_num", "ratio_den", "residual_lo", "residual_hi", "bound_lo",
    "bound_hi", "violation",
];

/// Significant digits of the directed decimal bounds in scan CSVs.
pub const SCAN_CSV_DIGITS: u32 = 17;

/// Exact `Q` values and ratio; enclosure endpoints as outward-rounded
/// decimals; `violation` is `true`, `false` or `undecided`.
pub fn scan_csv(rows: &[ScanRow]) -> String {
    let lo = |x: &Rational| format_sci_directed(x, SCAN_CSV_DIGITS, false);
    let hi = |x: &Rational| format_sci_directed(x, SCAN_CSV_DIGITS, true);
    csv_string(|w| {
        w.write_record(SCAN_CSV_COLUMNS)?;
        for r in rows {
            let (num, den) = match &r.ratio {
                Some(q) => (q.numer().to_string(), q.denom().to_string()),
                None => Default::default(),
            };
            let (res_lo, res_hi) = match &r.residual {
                Some(e) => (lo(&e.lo), hi(&e.hi)),
                None => Default::default(),
            };
            let violation = match r.status {
                crate::inequalities::Status::Fails => "true",
                crate::inequalities::Status::Holds => "false",
                crate::inequalities::Status::Undecided => "undecided",
            };
            w.write_record([
                r.n.to_string(),
                format_rational(&r.q_n),
                format_rational(&r.q_2n),
                format_rational(&r.q_4n),
                num,
                den,
                res_lo,
                res_hi,
                lo(&r.bound.lo),
                hi(&r.bound.hi),
                violation.to_string(),
            ])?;
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn lattice_function_round_trip() {
        let ball = LatticeBall::new(2, 2).unwrap();
        let f = LatticeFunction::from_fn(ball, |x| ratio(x[0] * 3 - x[1], 2));
        for sparse in [false, true] {
            let text = lattice_function_to_json(&f, sparse);
            assert_eq!(lattice_function_from_json(&text, sparse).unwrap(), f);
        }
    }

    #[test]
    fn omission_needs_sparse() {
        let text = r#"{"d": 1, "R": 1, "entries": [[0, "1/2"], [1, 2]]}"#;
        assert!(matches!(lattice_function_from_json(text, false), Err(Error::Parse(_))));
        let f = lattice_function_from_json(text, true).unwrap();
        assert_eq!(f.values(), &[int(0), ratio(1, 2), int(2)][..]);
        let dup = r#"{"d": 1, "R": 0, "entries": [[0, "1"], [0, "1"]]}"#;
        assert!(lattice_function_from_json(dup, true).is_err());
        let outside = r#"{"d": 1, "R": 0, "entries": [[3, "1"]]}"#;
        assert!(lattice_function_from_json(outside, true).is_err());
        assert!(lattice_function_from_json(r#"{"d": 1, "R": 0, "entries": [[0, "x"]]}"#, false).is_err());
    }

    #[test]
    fn polynomial_round_trip() {
        let p = polynomial_from_json(r#"{"d": 2, "terms": [{"alpha": [1, 1], "coeff": "3/4"}, {"alpha": [0, 0], "coeff": -2}]}"#).unwrap();
        assert_eq!(p.coefficient(&[1, 1]), ratio(3, 4));
        assert_eq!(p.coefficient(&[0, 0]), int(-2));
        assert_eq!(polynomial_from_json(&polynomial_to_json(&p)).unwrap(), p);
        assert!(polynomial_from_json(r#"{"d": 2, "terms": [{"alpha": [1], "coeff": "1"}]}"#).is_err());
    }

    #[test]
    fn report_formats() {
        let r = GrowthReport::from_values(vec![int(0), ratio(1, 2), int(1)]);
        assert_eq!(growth_report_from_json(&growth_report_to_json(&r)).unwrap(), r);
        assert_eq!(growth_report_csv(&r, 2), "n,Q,d1,d2\n0,0,1/2,0\n1,1/2,1/2,\n2,1,,\n");
    }
}
