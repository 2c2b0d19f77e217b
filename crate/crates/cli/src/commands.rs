//! Subcommand handlers.

use serde::Serialize;

use sphere_approx::contfrac::{classify_fraction, convergents, expand, LazyExpansion};
use sphere_approx::export::{write_points_csv, CircleRow, SolutionRow, SphereRow};
use sphere_approx::numeric::{parse_real, RealFormat};
use sphere_approx::oracle::{cached_enumeration, enumerate_circle, enumerate_sphere};
use sphere_approx::sphere2::{
    approx_sphere_dirichlet, approx_sphere_stream, dirichlet_search, solutions_stream, StreamOptions,
};
use sphere_approx::stereo::{forward, forward_real, inverse};
use sphere_approx::{
    approx_circle, sharpness_experiment, ApproxRecord, BigRational, CFExpansion, CircleOptions,
    FractionClass, NumericError, Precision, RealScalar, SpherePoint, StereoParam, Tail,
};

use crate::args::{
    CfCmd, CircleCmd, CircleTarget, Cli, Command, EnumerateArgs, Format, GlobalOpts, ParamCmd,
    RealFormatArg, RealInput, SearchArgs, SphereCmd, SphereTarget,
};
use crate::output::{emit, lines, render};
use crate::{verify, CliError};

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let g = &cli.global;
    if let Some(n) = g.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| CliError::Failed(e.to_string()))?;
    }
    let body = match &cli.command {
        Command::Param(cmd) => param(g, cmd)?,
        Command::Cf(cmd) => cf(g, cmd)?,
        Command::Circle(cmd) => circle(g, cmd)?,
        Command::Search(args) => search(g, args)?,
        Command::Sphere(cmd) => sphere(g, cmd)?,
        Command::Enumerate(args) => enumerate(g, args)?,
        Command::Verify(args) => {
            let (body, failures) = verify::run(g, args)?;
            emit(g, &body)?;
            if failures > 0 {
                return Err(CliError::Failed(format!("{failures} verification suite(s) failed")));
            }
            return Ok(());
        }
    };
    emit(g, &body)
}

fn prec(g: &GlobalOpts) -> Precision {
    Precision::with_max_bits(g.precision)
}

fn parse_with(text: &str, format: RealFormat) -> Result<RealScalar, CliError> {
    parse_real(text, format).map_err(|e| match e {
        NumericError::Parse(s) => CliError::Input(format!("cannot read {s:?} as a real number")),
        other => other.into(),
    })
}

fn real(g: &GlobalOpts, text: &str) -> Result<RealScalar, CliError> {
    let format = match g.real_format {
        RealFormatArg::Auto => RealFormat::Auto,
        RealFormatArg::Rational => RealFormat::Rational,
        RealFormatArg::Decimal => RealFormat::Decimal,
        RealFormatArg::Surd => RealFormat::Surd,
    };
    parse_with(text, format)
}

fn real_input(g: &GlobalOpts, x: &RealInput) -> Result<RealScalar, CliError> {
    match (&x.value, &x.rational, &x.decimal, &x.surd) {
        (Some(v), ..) => real(g, v),
        (_, Some(v), ..) => parse_with(v, RealFormat::Rational),
        (_, _, Some(v), _) => parse_with(v, RealFormat::Decimal),
        (.., Some(v)) => parse_with(v, RealFormat::Surd),
        _ => Err(CliError::Input("a value is required".into())),
    }
}

fn rational(text: &str) -> Result<BigRational, CliError> {
    match parse_with(text, RealFormat::Rational)? {
        RealScalar::Rational(r) => Ok(r),
        _ => Err(CliError::Input(format!("{text:?} is not a fraction"))),
    }
}

fn points_body(fmt: Format, points: &[SpherePoint]) -> Result<String, CliError> {
    match fmt {
        Format::Csv => {
            let mut buf = Vec::new();
            write_points_csv(&mut buf, points)?;
            Ok(String::from_utf8(buf).expect("csv output is utf-8"))
        }
        _ => render(fmt, points, || lines(points.iter().map(|p| p.to_string()))),
    }
}

#[derive(Serialize)]
struct ParamRow {
    b: String,
    q: String,
}

fn param(g: &GlobalOpts, cmd: &ParamCmd) -> Result<String, CliError> {
    match cmd {
        ParamCmd::Forward { n, b, q } => {
            if b.len() != *n as usize {
                return Err(CliError::Input(format!("--n {n} needs {n} value(s) for --b")));
            }
            let p = StereoParam::new(b.clone(), q.clone())?;
            points_body(g.format, &[forward(&p)])
        }
        ParamCmd::Inverse { coords, denom } => {
            let x = SpherePoint::new(coords.clone(), denom.clone())?;
            let p = inverse(&x)?;
            let b: Vec<String> = p.b().iter().map(|v| v.to_string()).collect();
            let row = ParamRow {
                b: b.join(" "),
                q: p.q().to_string(),
            };
            render(g.format, &[row], || format!("{p}\n"))
        }
    }
}

#[derive(Serialize)]
struct CfRow {
    expansion: String,
    tail: &'static str,
    period_start: Option<usize>,
    period_len: Option<usize>,
    terms: String,
}

impl CfRow {
    fn new(cf: &CFExpansion) -> Self {
        let (tail, start, len) = match cf.tail() {
            Tail::Finite => ("finite", None, None),
            Tail::Periodic { start, len } => ("periodic", Some(start), Some(len)),
            Tail::Truncated => ("truncated", None, None),
        };
        let terms: Vec<String> = cf.terms().iter().map(|a| a.to_string()).collect();
        CfRow {
            expansion: cf.to_string(),
            tail,
            period_start: start,
            period_len: len,
            terms: terms.join(" "),
        }
    }
}

#[derive(Serialize)]
struct ConvergentRow {
    nu: usize,
    p: String,
    q: String,
}

#[derive(Serialize)]
struct ClassRow {
    frac: String,
    class: &'static str,
    nu: Option<usize>,
    fatou_gap: Option<bool>,
}

fn cf(g: &GlobalOpts, cmd: &CfCmd) -> Result<String, CliError> {
    let prec = prec(g);
    match cmd {
        CfCmd::Expand { x, count } => {
            let x = real_input(g, x)?;
            let cf = expand(&x, *count, prec)?;
            let row = CfRow::new(&cf);
            render(g.format, &[row], || format!("{cf}\n"))
        }
        CfCmd::Convergents { x, upto } => {
            let lazy = LazyExpansion::new(real_input(g, x)?, prec)?;
            let rows: Vec<ConvergentRow> = convergents(&lazy, *upto)?
                .into_iter()
                .map(|c| ConvergentRow {
                    nu: c.index,
                    p: c.p.to_string(),
                    q: c.q.to_string(),
                })
                .collect();
            render(g.format, &rows, || lines(rows.iter().map(|r| format!("{} {}/{}", r.nu, r.p, r.q))))
        }
        CfCmd::Classify { x, frac } => {
            let beta = real_input(g, x)?;
            let lazy = LazyExpansion::new(beta.clone(), prec)?;
            let f = rational(frac)?;
            let class = classify_fraction(&lazy, &beta, &f, prec)?;
            let row = match class {
                FractionClass::Convergent(nu) => ClassRow { frac: f.to_string(), class: "convergent", nu: Some(nu), fatou_gap: None },
                FractionClass::Mediant(nu) => ClassRow { frac: f.to_string(), class: "mediant", nu: Some(nu), fatou_gap: None },
                FractionClass::Other { fatou_gap } => ClassRow { frac: f.to_string(), class: "other", nu: None, fatou_gap: Some(fatou_gap) },
            };
            render(g.format, &[&row], || match (row.nu, row.fatou_gap) {
                (Some(nu), _) => format!("{} {nu}\n", row.class),
                (_, Some(gap)) => format!("other fatou_gap={gap}\n"),
                _ => format!("{}\n", row.class),
            })
        }
    }
}

fn circle_target(g: &GlobalOpts, t: &CircleTarget) -> Result<Vec<RealScalar>, CliError> {
    match (&t.beta, &t.alpha) {
        (Some(b), _) => Ok(forward_real(&[real(g, b)?])?),
        (_, Some(a)) if a.len() == 2 => a.iter().map(|s| real(g, s)).collect(),
        _ => Err(CliError::Input("give --beta, or --alpha with two coordinates".into())),
    }
}

fn circle_text(rows: &[CircleRow]) -> String {
    lines(rows.iter().map(|r| {
        let origin = if r.nu.is_empty() { r.kind.clone() } else { format!("{} {}", r.kind, r.nu) };
        format!("{} {} {}  Q*dist={}  {origin}", r.a1, r.a2, r.big_q, r.q_times_dist)
    }))
}

fn circle(g: &GlobalOpts, cmd: &CircleCmd) -> Result<String, CliError> {
    let prec = prec(g);
    match cmd {
        CircleCmd::Approx { target, eps, count, max_candidates } => {
            let alpha = circle_target(g, target)?;
            let opts = CircleOptions { prec, max_candidates: *max_candidates };
            let recs = approx_circle(&alpha, &rational(eps)?, *count, &opts)?;
            let rows = recs.iter().map(|r| CircleRow::new(r, g.digits)).collect::<Result<Vec<_>, _>>()?;
            render(g.format, &rows, || circle_text(&rows))
        }
        CircleCmd::Sharpness { q_min, q_max } => {
            let report = sharpness_experiment(*q_min, *q_max, prec)?;
            let mut best = CircleRow::new(&report.global_min, g.digits)?;
            best.kind = "oracle_min".into();
            let mut rows = vec![best];
            for r in &report.subsequence {
                rows.push(CircleRow::new(r, g.digits)?);
            }
            render(g.format, &rows, || {
                let mut s = format!(
                    "oracle minimum over {} <= Q <= {}: Q*dist={} at {}\n",
                    q_min, q_max, rows[0].q_times_dist, report.global_min.point
                );
                if let Some(m) = &report.subsequence_min {
                    s.push_str(&format!(
                        "convergent/mediant minimum: Q*dist={} at {}\n",
                        (&RealScalar::from(m.q()) * &m.dist()).to_decimal(g.digits),
                        m.point
                    ));
                }
                s.push_str(&circle_text(&rows[1..]));
                s
            })
        }
    }
}

fn solution_text(rows: &[SolutionRow]) -> String {
    lines(rows.iter().map(|r| {
        let exact = if r.delta.is_empty() { String::new() } else { format!("{} ", r.delta) };
        format!("q={} b=({},{}) A={} delta={exact}({})", r.q, r.b1, r.b2, r.a, r.delta_decimal)
    }))
}

fn search(g: &GlobalOpts, args: &SearchArgs) -> Result<String, CliError> {
    let prec = prec(g);
    let beta = [real(g, &args.beta1)?, real(g, &args.beta2)?];
    let sols = match (args.t, &args.gamma) {
        (Some(t), None) => vec![dirichlet_search(&beta, t, prec)?],
        (None, Some(gamma)) => {
            let opts = StreamOptions { prec, ..StreamOptions::default() };
            solutions_stream(&beta, &rational(gamma)?, args.count.unwrap_or(10), &opts)?
        }
        _ => return Err(CliError::Input("give either --T or --gamma".into())),
    };
    let rows: Vec<SolutionRow> = sols.iter().map(|s| SolutionRow::new(s, g.digits)).collect();
    render(g.format, &rows, || solution_text(&rows))
}

fn sphere_target(g: &GlobalOpts, t: &SphereTarget) -> Result<Vec<RealScalar>, CliError> {
    match (&t.beta1, &t.beta2, &t.alpha) {
        (Some(b1), Some(b2), _) => Ok(forward_real(&[real(g, b1)?, real(g, b2)?])?),
        (_, _, Some(a)) if a.len() == 3 => a.iter().map(|s| real(g, s)).collect(),
        _ => Err(CliError::Input("give --beta1 and --beta2, or --alpha with three coordinates".into())),
    }
}

fn sphere_text(rows: &[SphereRow], label: &str) -> String {
    lines(rows.iter().map(|r| {
        let lattice = if r.q.is_empty() { String::new() } else { format!("  q={} b=({},{}) A={}", r.q, r.b1, r.b2, r.a) };
        format!("{} {} {} {}  {label}={}{lattice}", r.a1, r.a2, r.a3, r.big_q, r.normalized)
    }))
}

fn sphere(g: &GlobalOpts, cmd: &SphereCmd) -> Result<String, CliError> {
    let prec = prec(g);
    match cmd {
        SphereCmd::Dirichlet { target, t } => {
            let alpha = sphere_target(g, target)?;
            let out = approx_sphere_dirichlet(&alpha, *t, prec)?;
            let row = SphereRow::new(&out.record, out.solution.as_ref(), g.digits)?;
            let rows = [row];
            render(g.format, &rows, || sphere_text(&rows, "sqrt(QT)*dist"))
        }
        SphereCmd::Stream { target, eps, count } => {
            let alpha = sphere_target(g, target)?;
            let opts = StreamOptions { prec, ..StreamOptions::default() };
            let recs: Vec<ApproxRecord> = approx_sphere_stream(&alpha, &rational(eps)?, *count, &opts)?;
            let rows = recs.iter().map(|r| SphereRow::new(r, None, g.digits)).collect::<Result<Vec<_>, _>>()?;
            render(g.format, &rows, || sphere_text(&rows, "Q*dist"))
        }
    }
}

fn enumerate(g: &GlobalOpts, args: &EnumerateArgs) -> Result<String, CliError> {
    let points = match (&args.cache, args.n) {
        (Some(dir), n) => cached_enumeration(dir, n as usize, args.q_max)?,
        (None, 1) => enumerate_circle(args.q_max)?,
        (None, _) => enumerate_sphere(args.q_max)?,
    };
    points_body(g.format, &points)
}
