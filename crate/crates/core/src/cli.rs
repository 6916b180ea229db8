//! The `twindual` command line.
//!
//! Exit codes: 0 all requested checks pass, 1 a check failed, 2 usage error,
//! 3 refusal (inadmissible `q` without `--force`).

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cache::{CacheKey, MatrixCache, CACHE_ENV};
use crate::density;
use crate::diagrams::{self, enumerate, AlgebraElement, Family, PartialDiagram};
use crate::duality::{brauer_duality_check, schur_weyl_check, DualityOptions, DualityReport};
use crate::error::{Error, Result};
use crate::hecke_twin::RepContext;
use crate::linalg::Matrix;
use crate::report::Report;
use crate::scalars::{
    format_rational, is_q_admissible, parse_complex, parse_rational, rational_sqrt, Complex64, Field, QContext, Rational,
    Scalar, DEFAULT_TOL,
};
use crate::tensor_action::TensorContext;

pub const SCHEMA: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "twindual", version, about = "Twin-group reflection representations and partial Brauer Schur-Weyl duality checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Matrix cache directory (`TWINDUAL_CACHE` takes precedence).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Relative tolerance for approximate comparisons.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Pretty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Approx,
}

/// How `q` is given. Exact arithmetic needs a rational `q` with a rational square root.
#[derive(Args, Debug, Clone)]
pub struct QArgs {
    #[arg(long)]
    pub n: usize,
    /// `P/Q` (or an integer), or `re,im` for a complex value.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// Declared rational square root of `q`.
    #[arg(long, allow_hyphen_values = true)]
    pub sqrt_q: Option<String>,
    /// Complex `q` as `re,im`; implies approximate arithmetic.
    #[arg(long, allow_hyphen_values = true)]
    pub approx: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Relations of the Burau/Hecke and twin reflection representations.
    Rep {
        #[command(flatten)]
        q: QArgs,
        #[arg(long, value_enum, value_delimiter = ',')]
        check: Vec<RepCheck>,
    },
    /// Rotation orders, Rodrigues form and the Lie-algebra span.
    Density {
        #[command(flatten)]
        q: QArgs,
        #[arg(long, default_value_t = 1000)]
        kmax: usize,
        #[arg(long, value_enum, value_delimiter = ',')]
        check: Vec<DensityCheck>,
    },
    /// Partial Brauer diagrams: enumeration, products, presentation.
    Diagrams {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        verify_presentation: bool,
        #[arg(long)]
        scaling_iso: bool,
        /// List the diagrams of a family.
        #[arg(long, value_enum)]
        enumerate: Option<FamilyArg>,
        /// Two diagrams in text form, e.g. `--multiply "1-2,1'-2'" "1,1',2-2'"`.
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true)]
        multiply: Option<Vec<String>>,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        delta: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        delta_prime: String,
    },
    /// Matrices of the diagram action on `E^{⊗r}`.
    Action {
        #[command(flatten)]
        q: QArgs,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        delta_prime: String,
        #[arg(long, value_enum)]
        emit: Emit,
        /// Generator index for `s`, `e`, `p`, `group`.
        #[arg(long, default_value_t = 1)]
        index: usize,
        /// Diagram text for `--emit diagram`.
        #[arg(long, allow_hyphen_values = true)]
        diagram: Option<String>,
    },
    /// Commutant and diagram-image dimensions on `E^{⊗r}` or `F^{⊗r}`.
    Duality {
        #[command(flatten)]
        q: QArgs,
        /// One tensor power, or several as `1,2,3` for a sweep.
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<usize>,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        delta_prime: String,
        #[arg(long, value_enum, default_value_t = Space::E)]
        on: Space,
        #[arg(long)]
        center: bool,
        #[arg(long)]
        force: bool,
        /// Allow exact arithmetic beyond `n^r = 256`.
        #[arg(long)]
        big: bool,
        #[arg(long, default_value_t = 12)]
        max_word_length: usize,
    },
    /// The density hypotheses on `q`.
    Admissible {
        #[command(flatten)]
        q: QArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RepCheck {
    Hecke,
    Twin,
    BraidDev,
    Projection,
    Appendix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DensityCheck {
    Rodrigues,
    Powers,
    Order,
    Independence,
    Alt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    All,
    Brauer,
    Rook,
    Permutation,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::All => Family::All,
            FamilyArg::Brauer => Family::Brauer,
            FamilyArg::Rook => Family::Rook,
            FamilyArg::Permutation => Family::Permutation,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    S,
    E,
    P,
    Diagram,
    Group,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Space {
    #[value(name = "E")]
    E,
    #[value(name = "F")]
    F,
}

/// A representation context in whichever arithmetic the flags select.
enum Ctx {
    Exact(RepContext<Rational>),
    Approx(RepContext<Complex64>),
}

macro_rules! with_ctx {
    ($ctx:expr, $rc:ident => $body:expr) => {
        match $ctx {
            Ctx::Exact($rc) => $body,
            Ctx::Approx($rc) => $body,
        }
    };
}

struct Resolved {
    /// `q` as the user gave it; admissibility is decided on this value.
    spec: Scalar,
    ctx: Ctx,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn resolve(q: &QArgs, tol: f64, force_approx: bool) -> Result<Resolved> {
    if let Some(a) = &q.approx {
        if q.mode == Some(Mode::Exact) {
            return Err(usage("--approx cannot be combined with --mode exact"));
        }
        let qc = parse_complex(a)?;
        let rc = RepContext::new(q.n, QContext::approx(qc, tol)?)?;
        return Ok(Resolved { spec: Scalar::Approx(qc), ctx: Ctx::Approx(rc) });
    }
    let text = q.q.as_deref().ok_or_else(|| usage("give --q (or --approx re,im)"))?;
    let exact_q = if text.contains(',') { None } else { parse_rational(text).ok() };
    let Some(qr) = exact_q else {
        if q.mode == Some(Mode::Exact) {
            return Err(usage(format!("exact mode needs a rational q, got `{text}`")));
        }
        let qc = match text.parse::<f64>() {
            Ok(x) => Complex64::new(x, 0.0),
            Err(_) => parse_complex(text)?,
        };
        let rc = RepContext::new(q.n, QContext::approx(qc, tol)?)?;
        return Ok(Resolved { spec: Scalar::Approx(qc), ctx: Ctx::Approx(rc) });
    };
    let sqrt = match &q.sqrt_q {
        Some(s) => Some(parse_rational(s)?),
        None => rational_sqrt(&qr),
    };
    let want_exact = match q.mode {
        Some(Mode::Exact) => true,
        Some(Mode::Approx) => false,
        None => sqrt.is_some() && !force_approx,
    };
    let spec = Scalar::Exact(qr.clone());
    if want_exact {
        let s = sqrt.ok_or_else(|| usage(format!("exact mode needs --sqrt-q: {} is not a rational square", format_rational(&qr))))?;
        let ctx = QContext::new(qr, s, tol)?;
        return Ok(Resolved { spec, ctx: Ctx::Exact(RepContext::new(q.n, ctx)?) });
    }
    let qc = Complex64::new(crate::scalars::rational_to_f64(&qr), 0.0);
    let ctx = match sqrt {
        Some(s) => QContext::new(qc, Complex64::new(crate::scalars::rational_to_f64(&s), 0.0), tol)?,
        None => QContext::approx(qc, tol)?,
    };
    Ok(Resolved { spec, ctx: Ctx::Approx(RepContext::new(q.n, ctx)?) })
}

fn parse_field<F: Field>(text: &str) -> Result<F> {
    if let Ok(r) = parse_rational(text) {
        return Ok(F::from_rational(&r));
    }
    let c = parse_complex(text)?;
    F::from_scalar(&Scalar::Approx(c)).ok_or_else(|| usage(format!("`{text}` is not rational (exact mode)")))
}

/// What a subcommand produced.
struct Outcome {
    command: &'static str,
    pass: bool,
    body: Value,
    pretty: String,
    csv: Option<String>,
}

fn report_pretty(rep: &Report) -> String {
    let mut s = String::new();
    for c in &rep.checks {
        let tag = if c.pass { "PASS" } else { "FAIL" };
        match &c.detail {
            Some(d) => s.push_str(&format!("{tag}  {}  ({d})\n", c.relation)),
            None => s.push_str(&format!("{tag}  {}\n", c.relation)),
        }
    }
    s
}

fn report_csv(rep: &Report) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["relation", "pass", "detail"]).map_err(csv_err)?;
    for c in &rep.checks {
        w.write_record([c.relation.as_str(), if c.pass { "true" } else { "false" }, c.detail.as_deref().unwrap_or("")])
            .map_err(csv_err)?;
    }
    finish_csv(w)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn report_outcome(command: &'static str, rep: Report, extra: Value) -> Result<Outcome> {
    let pretty = report_pretty(&rep);
    let csv = Some(report_csv(&rep)?);
    let mut body = serde_json::to_value(&rep)?;
    merge(&mut body, extra);
    Ok(Outcome { command, pass: rep.all_pass(), body, pretty, csv })
}

fn merge(into: &mut Value, extra: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, extra) {
        a.extend(b);
    }
}

fn run_rep<F: Field>(rc: &RepContext<F>, checks: &[RepCheck]) -> Result<Outcome> {
    let all = [RepCheck::Hecke, RepCheck::Twin, RepCheck::BraidDev, RepCheck::Projection, RepCheck::Appendix];
    let checks = if checks.is_empty() { &all[..] } else { checks };
    let mut rep = Report::new();
    for c in checks {
        match c {
            RepCheck::Hecke => rep.extend(rc.check_hecke()?),
            RepCheck::Twin => rep.extend(rc.check_twin_relations()),
            RepCheck::BraidDev => rep.extend(rc.check_braid_deviation()?),
            RepCheck::Projection => rep.extend(rc.check_projection()?),
            RepCheck::Appendix => rep.extend(rc.check_appendix()?),
        }
    }
    report_outcome("rep", rep, json!({ "n": rc.n(), "q": rc.q().to_scalar() }))
}

fn run_density<F: Field>(rc: &RepContext<F>, kmax: usize, checks: &[DensityCheck]) -> Result<Outcome> {
    let all = [DensityCheck::Rodrigues, DensityCheck::Powers, DensityCheck::Order, DensityCheck::Independence, DensityCheck::Alt];
    let checks = if checks.is_empty() { &all[..] } else { checks };
    let n = rc.n();
    let mut rep = Report::new();
    let mut extra = serde_json::Map::new();
    extra.insert("n".into(), json!(n));
    extra.insert("q".into(), serde_json::to_value(rc.q().to_scalar())?);
    for c in checks {
        match c {
            DensityCheck::Rodrigues => {
                rep.extend(density::check_n(rc)?);
                rep.extend(density::rodrigues_check(rc)?);
            }
            DensityCheck::Powers => {
                for i in 1..n.saturating_sub(1) {
                    for k in 1..=20 {
                        rep.extend(density::power_formula_check(i, k, rc)?);
                    }
                }
            }
            DensityCheck::Order => {
                let orders = (1..n.saturating_sub(1))
                    .map(|i| density::finite_order_detect(i, rc, kmax))
                    .collect::<Result<Vec<_>>>()?;
                for o in &orders {
                    rep.flag_with(format!("power check agrees with Chebyshev criterion (block {})", o.block), o.agree, format!("{:?}", o.verdict));
                }
                extra.insert("orders".into(), serde_json::to_value(&orders)?);
            }
            DensityCheck::Independence => {
                rep.extend(density::check_l_forms(rc)?);
                let ind = density::independence_test(rc)?;
                rep.flag_with(
                    "L span has full dimension exactly when [n-2]_q! != 0",
                    ind.independent == ind.hypothesis_holds,
                    format!("{} of {}", ind.span_dimension, ind.expected),
                );
                extra.insert("independence".into(), serde_json::to_value(&ind)?);
            }
            DensityCheck::Alt => {
                let alt = density::alt_density_check(rc, kmax)?;
                rep.extend(alt.checks.clone());
                extra.insert("alt".into(), json!({ "hypothesis_holds": alt.hypothesis_holds, "orders": alt.orders }));
            }
        }
    }
    report_outcome("density", rep, Value::Object(extra))
}

fn run_diagrams(
    r: usize,
    verify: bool,
    scaling: bool,
    family: Option<FamilyArg>,
    multiply: Option<&[String]>,
    delta: &str,
    delta_prime: &str,
) -> Result<Outcome> {
    let d: Rational = parse_field(delta)?;
    let dp: Rational = parse_field(delta_prime)?;
    let mut rep = Report::new();
    let mut extra = serde_json::Map::new();
    extra.insert("r".into(), json!(r));
    extra.insert("delta".into(), json!(format_rational(&d)));
    extra.insert("delta_prime".into(), json!(format_rational(&dp)));
    let mut pretty = String::new();
    if let Some(f) = family {
        let list = enumerate(r, f.into());
        let count = diagrams::brute_force_count(r, f.into());
        rep.flag_with("enumeration matches brute-force partition count", list.len() == count, format!("{} vs {count}", list.len()));
        for x in &list {
            pretty.push_str(&format!("{x}\n"));
        }
        extra.insert("count".into(), json!(list.len()));
        extra.insert("diagrams".into(), serde_json::to_value(&list)?);
    }
    if let Some([a, b]) = multiply {
        let (a, b) = (PartialDiagram::parse(r, a)?, PartialDiagram::parse(r, b)?);
        let t = diagrams::compose(&a, &b)?;
        let prod = AlgebraElement::basis(a).multiply(&AlgebraElement::basis(b), &d, &dp)?;
        let coeff = prod.coefficient(&t.result);
        pretty.push_str(&format!("{} * {}\n", format_rational(&coeff), t.result));
        extra.insert("product".into(), json!({ "result": t.result, "loops": t.loops, "non_loops": t.non_loops, "coefficient": format_rational(&coeff) }));
    }
    if verify {
        rep.extend(diagrams::verify_presentation(r, &d, &dp)?);
    }
    if scaling {
        rep.extend(diagrams::scaling_iso_check(r, &d, &dp)?);
    }
    let mut out = report_outcome("diagrams", rep, Value::Object(extra))?;
    out.pretty = pretty + &out.pretty;
    Ok(out)
}

fn run_action<F: Field>(
    rc: &RepContext<F>,
    spec: &Scalar,
    r: usize,
    dp_text: &str,
    emit: Emit,
    index: usize,
    diagram: Option<&str>,
    cache: &MatrixCache,
    tol: f64,
) -> Result<Outcome> {
    let dp: F = parse_field(dp_text)?;
    let tc = TensorContext::new(rc.clone(), r)?;
    let (kind, label) = match emit {
        Emit::S => (format!("op_s{index}"), format!("s{index}")),
        Emit::E => (format!("op_e{index}"), format!("e{index}")),
        Emit::P => (format!("op_p{index};dp={dp_text}"), format!("p{index}")),
        Emit::Group => (format!("group{index}"), format!("S{index} diagonal")),
        Emit::Diagram => {
            let text = diagram.ok_or_else(|| usage("--emit diagram needs --diagram"))?;
            let d = PartialDiagram::parse(r, text)?;
            (format!("diagram[{d}];dp={dp_text}"), d.to_string())
        }
    };
    let key = CacheKey { n: rc.n(), q: spec.to_string(), r, basis: "split".into(), kind, exact: F::EXACT, tol };
    let m: Matrix<F> = cache.get_or_compute(&key, || match emit {
        Emit::S => tc.op_s(index),
        Emit::E => tc.op_e(index),
        Emit::P => tc.op_p(index, &dp),
        Emit::Group => tc.diagonal_group_action(index),
        Emit::Diagram => tc.diagram_to_matrix(&PartialDiagram::parse(r, diagram.unwrap_or_default())?, &dp),
    })?;
    let mut rep = Report::new();
    let commutes = tc.group_generators()?.iter().all(|g| m.commutator(g).is_ok_and(|c| c.is_zero_within(tol)));
    if emit != Emit::Group {
        rep.flag("commutes with the diagonal twin action", commutes);
    }
    let extra = json!({
        "n": rc.n(), "r": r, "q": spec, "emit": label,
        "basis_gram": tc.gram().iter().map(Field::to_scalar).collect::<Vec<_>>(),
        "cache_path": cache.path(&key), "matrix": m,
    });
    let mut out = report_outcome("action", rep, extra)?;
    out.pretty = format!("{label}: {}x{} matrix cached at {}\n{}", m.rows(), m.cols(), cache.path(&key).display(), out.pretty);
    Ok(out)
}

#[derive(Serialize)]
struct SweepRow {
    space: &'static str,
    mode: &'static str,
    n: usize,
    q: String,
    r: usize,
    delta_prime: String,
    dim_commutant: usize,
    dim_diagram_image: usize,
    dim_pb_abstract: usize,
    faithful: bool,
    faithful_predicted: bool,
    double_centralizer_ok: bool,
    center_dim: Option<usize>,
    lambda_count: usize,
    pass: bool,
}

impl From<&DualityReport> for SweepRow {
    fn from(d: &DualityReport) -> Self {
        SweepRow {
            space: d.space,
            mode: d.mode,
            n: d.n,
            q: d.q.to_string(),
            r: d.r,
            delta_prime: d.delta_prime.to_string(),
            dim_commutant: d.dim_commutant,
            dim_diagram_image: d.dim_diagram_image,
            dim_pb_abstract: d.dim_pb_abstract,
            faithful: d.faithful,
            faithful_predicted: d.faithful_predicted,
            double_centralizer_ok: d.double_centralizer_ok,
            center_dim: d.center_dim,
            lambda_count: d.lambda_count,
            pass: d.pass(),
        }
    }
}

fn duality_one<F: Field>(rc: &RepContext<F>, spec: &Scalar, r: usize, on: Space, opts: &DualityOptions<F>) -> Result<DualityReport> {
    match on {
        Space::E => schur_weyl_check(rc, r, spec, opts),
        Space::F => brauer_duality_check(rc, r, spec, opts),
    }
}

/// Runs every `r` on a bounded pool of scoped threads, keeping input order.
fn duality_sweep<F: Field>(rc: &RepContext<F>, spec: &Scalar, rs: &[usize], on: Space, opts: &DualityOptions<F>) -> Vec<Result<DualityReport>> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(rs.len()).max(1);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let results: Vec<std::sync::Mutex<Option<Result<DualityReport>>>> = rs.iter().map(|_| std::sync::Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= rs.len() {
                    break;
                }
                let res = duality_one(rc, spec, rs[i], on, opts);
                *results[i].lock().expect("worker poisoned") = Some(res);
            });
        }
    });
    results.into_iter().map(|m| m.into_inner().expect("worker poisoned").expect("every slot filled")).collect()
}

fn duality_pretty(d: &DualityReport) -> String {
    let mut s = format!(
        "{} r={} n={} q={} ({}): commutant {}, diagram image {} of {}, faithful {} (predicted {})\n",
        d.space, d.r, d.n, d.q, d.mode, d.dim_commutant, d.dim_diagram_image, d.dim_pb_abstract, d.faithful, d.faithful_predicted
    );
    s.push_str(&report_pretty(&d.checks));
    s
}

fn run_duality<F: Field>(rc: &RepContext<F>, spec: &Scalar, rs: &[usize], dp_text: &str, on: Space, center: bool, force: bool, max_word_length: usize, format: OutputFormat) -> Result<Outcome> {
    let delta_prime: F = parse_field(dp_text)?;
    let opts = DualityOptions { delta_prime, center, force, max_word_length, ..DualityOptions::default() };
    let reports: Vec<DualityReport> = duality_sweep(rc, spec, rs, on, &opts).into_iter().collect::<Result<_>>()?;
    let pass = reports.iter().all(DualityReport::pass);
    let pretty = reports.iter().map(duality_pretty).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    for d in &reports {
        w.serialize(SweepRow::from(d)).map_err(csv_err)?;
    }
    let csv = Some(finish_csv(w)?);
    let body = if reports.len() == 1 && format != OutputFormat::Csv {
        serde_json::to_value(&reports[0])?
    } else {
        json!({ "reports": reports })
    };
    Ok(Outcome { command: "duality", pass, body, pretty, csv })
}

fn write_output(global: &GlobalArgs, out: &Outcome) -> Result<()> {
    let text = match global.output {
        OutputFormat::Json => {
            let mut v = json!({ "schema": SCHEMA, "command": out.command, "pass": out.pass });
            merge(&mut v, out.body.clone());
            serde_json::to_string_pretty(&v)? + "\n"
        }
        OutputFormat::Pretty => out.pretty.clone(),
        OutputFormat::Csv => out.csv.clone().ok_or_else(|| usage(format!("{} has no CSV form", out.command)))?,
    };
    match &global.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    if !(g.tol > 0.0 && g.tol.is_finite()) {
        return Err(usage("--tol must be positive"));
    }
    match &cli.command {
        Command::Rep { q, check } => {
            let res = resolve(q, g.tol, false)?;
            with_ctx!(&res.ctx, rc => run_rep(rc, check))
        }
        Command::Density { q, kmax, check } => {
            let res = resolve(q, g.tol, false)?;
            with_ctx!(&res.ctx, rc => run_density(rc, *kmax, check))
        }
        Command::Diagrams { r, verify_presentation, scaling_iso, enumerate, multiply, delta, delta_prime } => {
            if *r == 0 {
                return Err(usage("--r must be at least 1"));
            }
            run_diagrams(*r, *verify_presentation, *scaling_iso, *enumerate, multiply.as_deref(), delta, delta_prime)
        }
        Command::Action { q, r, delta_prime, emit, index, diagram } => {
            let res = resolve(q, g.tol, false)?;
            let fallback = g.cache_dir.clone().unwrap_or_else(|| PathBuf::from(".twindual-cache"));
            let cache = MatrixCache::from_env_or(fallback);
            with_ctx!(&res.ctx, rc => run_action(rc, &res.spec, *r, delta_prime, *emit, *index, diagram.as_deref(), &cache, g.tol))
        }
        Command::Duality { q, r, delta_prime, on, center, force, big, max_word_length } => {
            let dim = if *on == Space::E { q.n } else { q.n.saturating_sub(1) };
            let largest = r.iter().map(|&k| dim.saturating_pow(k as u32)).max().unwrap_or(0);
            let too_big = largest > 256 && !*big && q.mode != Some(Mode::Exact);
            if too_big {
                log::info!("n^r = {largest} > 256: using approximate arithmetic (pass --big for exact)");
            }
            let res = resolve(q, g.tol, too_big)?;
            with_ctx!(&res.ctx, rc => run_duality(rc, &res.spec, r, delta_prime, *on, *center, *force, *max_word_length, g.output))
        }
        Command::Admissible { q } => {
            let res = resolve(q, g.tol, false)?;
            let adm = is_q_admissible(&res.spec, q.n as u32, g.tol);
            let pass = adm.admissible();
            let pretty = match adm.failure() {
                None => format!("admissible: q = {} for n = {}\n", res.spec, q.n),
                Some(why) => format!("not admissible: {why}\n"),
            };
            let body = serde_json::to_value(&adm)?;
            Ok(Outcome { command: "admissible", pass, body, pretty, csv: None })
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Inadmissible(_) => EXIT_REFUSED,
        Error::Parse(_) => EXIT_USAGE,
        Error::Domain(_) | Error::Index(_) | Error::Dimension(_) => EXIT_USAGE,
        Error::Io(_) | Error::Json(_) => EXIT_FAIL,
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    if std::env::var_os(CACHE_ENV).is_some() && cli.global.cache_dir.is_some() {
        log::info!("{CACHE_ENV} overrides --cache-dir");
    }
    match dispatch(&cli).and_then(|out| write_output(&cli.global, &out).map(|_| out.pass)) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            eprintln!("twindual: {e}");
            exit_code(&e)
        }
    }
}
