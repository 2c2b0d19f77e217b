//! Row types for CSV and JSON output, and serde helpers for big integers.
//!
//! Exact values render as `num/den` (or the surd form), decimals with a
//! caller-chosen number of places.

use std::io::Write;

use num_bigint::BigInt;
use serde::{Serialize, Serializer};

use crate::circle::ApproxRecord;
use crate::contfrac::FractionClass;
use crate::numeric::RealScalar;
use crate::sphere2::LatticeSolution;
use crate::stereo::SpherePoint;
use crate::{Error, Result};

pub(crate) fn ser_bigint<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub(crate) fn ser_bigints<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.to_string()))
}

/// Exact text of a rational or surd value, empty for interval values.
pub fn exact_text(x: &RealScalar) -> String {
    if x.is_exact() {
        x.to_string()
    } else {
        String::new()
    }
}

fn origin_columns(origin: Option<FractionClass>) -> (String, &'static str) {
    match origin {
        Some(FractionClass::Convergent(nu)) => (nu.to_string(), "convergent"),
        Some(FractionClass::Mediant(nu)) => (nu.to_string(), "mediant"),
        Some(FractionClass::Other { .. }) => (String::new(), "other"),
        None => (String::new(), "exact"),
    }
}

fn q_times_dist(rec: &ApproxRecord) -> RealScalar {
    &RealScalar::from(rec.q()) * &rec.dist()
}

/// Circle record: `nu, kind, b, q, A1, A2, Q, dist, Q_times_dist`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CircleRow {
    pub nu: String,
    pub kind: String,
    pub b: String,
    pub q: String,
    #[serde(rename = "A1")]
    pub a1: String,
    #[serde(rename = "A2")]
    pub a2: String,
    #[serde(rename = "Q")]
    pub big_q: String,
    pub dist: String,
    #[serde(rename = "Q_times_dist")]
    pub q_times_dist: String,
}

impl CircleRow {
    pub fn new(rec: &ApproxRecord, digits: usize) -> Result<Self> {
        if rec.point.dim() != 1 {
            return Err(Error::precondition("circle rows need a point on S^1"));
        }
        let (nu, kind) = origin_columns(rec.origin);
        let (b, q) = match &rec.param {
            Some(p) if !p.is_at_infinity() => (p.b()[0].to_string(), p.q().to_string()),
            _ => (String::new(), String::new()),
        };
        Ok(CircleRow {
            nu,
            kind: kind.to_string(),
            b,
            q,
            a1: rec.point.coords()[0].to_string(),
            a2: rec.point.coords()[1].to_string(),
            big_q: rec.q().to_string(),
            dist: rec.dist().to_decimal(digits),
            q_times_dist: q_times_dist(rec).to_decimal(digits),
        })
    }
}

/// Sphere record: `q, b1, b2, A, delta, delta_decimal, Q, A1, A2, A3, dist,
/// Q_times_dist, normalized`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SphereRow {
    pub q: String,
    pub b1: String,
    pub b2: String,
    #[serde(rename = "A")]
    pub a: String,
    pub delta: String,
    pub delta_decimal: String,
    #[serde(rename = "Q")]
    pub big_q: String,
    #[serde(rename = "A1")]
    pub a1: String,
    #[serde(rename = "A2")]
    pub a2: String,
    #[serde(rename = "A3")]
    pub a3: String,
    pub dist: String,
    #[serde(rename = "Q_times_dist")]
    pub q_times_dist: String,
    /// The record's own normalization (`√(QT)·dist` in Dirichlet mode).
    pub normalized: String,
}

impl SphereRow {
    pub fn new(rec: &ApproxRecord, sol: Option<&LatticeSolution>, digits: usize) -> Result<Self> {
        if rec.point.dim() != 2 {
            return Err(Error::precondition("sphere rows need a point on S^2"));
        }
        let s = sol.map(|s| SolutionRow::new(s, digits));
        let c = rec.point.coords();
        Ok(SphereRow {
            q: s.as_ref().map(|s| s.q.clone()).unwrap_or_default(),
            b1: s.as_ref().map(|s| s.b1.clone()).unwrap_or_default(),
            b2: s.as_ref().map(|s| s.b2.clone()).unwrap_or_default(),
            a: s.as_ref().map(|s| s.a.clone()).unwrap_or_default(),
            delta: s.as_ref().map(|s| s.delta.clone()).unwrap_or_default(),
            delta_decimal: s.as_ref().map(|s| s.delta_decimal.clone()).unwrap_or_default(),
            big_q: rec.q().to_string(),
            a1: c[0].to_string(),
            a2: c[1].to_string(),
            a3: c[2].to_string(),
            dist: rec.dist().to_decimal(digits),
            q_times_dist: q_times_dist(rec).to_decimal(digits),
            normalized: rec.normalized.to_decimal(digits),
        })
    }
}

/// Lattice solution: `q, b1, b2, A, delta, delta_decimal`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolutionRow {
    pub q: String,
    pub b1: String,
    pub b2: String,
    #[serde(rename = "A")]
    pub a: String,
    pub delta: String,
    pub delta_decimal: String,
}

impl SolutionRow {
    pub fn new(s: &LatticeSolution, digits: usize) -> Self {
        SolutionRow {
            q: s.q.to_string(),
            b1: s.b[0].to_string(),
            b2: s.b[1].to_string(),
            a: s.a.to_string(),
            delta: exact_text(&s.delta),
            delta_decimal: s.delta.to_decimal(digits),
        }
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::precondition(format!("csv: {e}"))
}

/// Serializes rows with a header line.
pub fn write_csv<W: Write, R: Serialize>(out: W, rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::precondition(format!("csv: {e}")))
}

/// Points as CSV with columns `A1, A2, [A3,] Q`.
pub fn write_points_csv<W: Write>(out: W, points: &[SpherePoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let n = points.first().map_or(1, |p| p.dim());
    let mut header: Vec<String> = (1..=n + 1).map(|i| format!("A{i}")).collect();
    header.push("Q".into());
    w.write_record(&header).map_err(csv_error)?;
    for p in points {
        let mut rec: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
        rec.push(p.denom().to_string());
        w.write_record(&rec).map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::precondition(format!("csv: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{approx_circle, sharpness_target, CircleOptions};
    use crate::numeric::BigRational;
    use crate::sphere2::dirichlet_search;
    use crate::Precision;

    #[test]
    fn circle_rows_have_stable_header() {
        let recs = approx_circle(&sharpness_target(), &BigRational::new(1.into(), 10.into()), 3, &CircleOptions::default()).unwrap();
        let rows: Vec<CircleRow> = recs.iter().map(|r| CircleRow::new(r, 6).unwrap()).collect();
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "nu,kind,b,q,A1,A2,Q,dist,Q_times_dist");
        assert_eq!(lines.count(), 3);
    }

    #[test]
    fn solution_row_renders_exact_delta() {
        let beta = [RealScalar::ratio(3, 10), RealScalar::ratio(7, 10)];
        let s = dirichlet_search(&beta, 25, Precision::default()).unwrap();
        let row = SolutionRow::new(&s, 4);
        assert_eq!((row.q.as_str(), row.b1.as_str(), row.b2.as_str(), row.a.as_str()), ("5", "1", "3", "2"));
        assert_eq!(row.delta, "1/2");
        assert_eq!(row.delta_decimal, "0.5000");
        let json = serde_json::to_string(&row).unwrap();
        assert!(json.contains("\"A\":\"2\""));
    }

    #[test]
    fn point_csv() {
        let pts = crate::oracle::enumerate_sphere(1).unwrap();
        let mut buf = Vec::new();
        write_points_csv(&mut buf, &pts).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("A1,A2,A3,Q\n-1,0,0,1\n"));
    }
}
