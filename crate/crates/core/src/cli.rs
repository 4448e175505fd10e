//! The `mtsurf` command line: generate meshes, canonicalize, verify,
//! classify cubics, and apply transformations.
//!
//! Exit codes: 0 ok, 1 a verification gate failed, 2 domain or numeric
//! error, 3 usage or parse error. Every report is JSON with a
//! `schema_version` field.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::SplitComplex;
use crate::canonical::{
    canonicalize, curvature_pde_residual, verify_canonical_coefficients, ApplyGauge, CanonicalGauge,
    CanonicalizeOptions, CurvatureSign, Sign, ZMap, COEFFICIENT_NAMES,
};
use crate::classify::{classify_cubic, CubicParametrization};
use crate::domain::{parse_grid_dims, Grid, Rect};
use crate::equivalence::{
    check_denominator, lorentz_defect, moebius_transform, motion_witness, witness_discrepancy, MoebiusForm,
    MoebiusParams,
};
use crate::geometry::{FormField, FormMethod};
use crate::holofn::{HoloExpr, SyntaxError};
use crate::weierstrass::{evaluate_surface, GeneratingData, Part, Point3, SurfaceOptions, SurfacePatch};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "mtsurf",
    version,
    about = "Minimal timelike surfaces from split-complex data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a surface patch and write a mesh.
    Generate(GenerateArgs),
    /// Transform isothermal parameters to canonical ones.
    Canonicalize(CanonicalizeArgs),
    /// Check minimality and the canonical shape of the forms.
    Verify(VerifyArgs),
    /// Classify a cubic polynomial parametrization given as JSON.
    Classify(ClassifyArgs),
    /// Apply a fractional or inversion map to a canonical function.
    Transform(TransformArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Weierstrass f; omit to use the canonical representation in g alone.
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub g: String,
    #[arg(long, value_enum, default_value = "real")]
    pub part: PartArg,
    /// Base point z₀ of the integration, e.g. `0.5-0.1J`.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub base_point: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PartArg {
    Real,
    #[value(alias = "imaginary")]
    Imag,
}

impl From<PartArg> for Part {
    fn from(p: PartArg) -> Self {
        match p {
            PartArg::Real => Part::Real,
            PartArg::Imag => Part::Imaginary,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Auto,
    Analytic,
    Central,
    Richardson,
}

impl From<MethodArg> for FormMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => FormMethod::Auto,
            MethodArg::Analytic => FormMethod::Analytic,
            MethodArg::Central => FormMethod::Central,
            MethodArg::Richardson => FormMethod::Richardson,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Obj,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// `u_min:u_max:v_min:v_max`
    #[arg(long, allow_hyphen_values = true)]
    pub domain: String,
    /// `NxM`
    #[arg(long, default_value = "41x41")]
    pub grid: String,
    #[arg(long)]
    pub out: PathBuf,
    /// Defaults to the extension of `--out`.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: MethodArg,
    /// Integrate numerically even when a closed-form primitive exists.
    #[arg(long)]
    pub quadrature: bool,
}

#[derive(Debug, Args)]
pub struct CanonicalizeArgs {
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub g: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub w0: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub z0: String,
    /// Canonical domain `u_min:u_max:v_min:v_max`.
    #[arg(long, default_value = "-0.5:0.5:-0.5:0.5", allow_hyphen_values = true)]
    pub domain: String,
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    pub sign: String,
    /// Lattice on which the residual of `(z′)²·f·g′ = 1` is reported.
    #[arg(long, default_value = "21x21")]
    pub grid: String,
    /// Keep the reachable part of the domain instead of failing.
    #[arg(long)]
    pub lenient: bool,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long, value_enum, default_value = "real")]
    pub part: PartArg,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub base_point: String,
    /// Points from a CSV file with columns u,v,x1,x2,x3 (rows of constant v).
    #[arg(long, conflicts_with_all = ["f", "g"])]
    pub csv: Option<PathBuf>,
    #[arg(long, default_value = "-0.4:0.4:-0.4:0.4", allow_hyphen_values = true)]
    pub domain: String,
    #[arg(long, default_value = "17x17")]
    pub grid: String,
    /// Also check the canonical shape of the forms and the curvature equation.
    #[arg(long)]
    pub canonical: bool,
    /// Reparametrize by `u = εū + A, v = εv̄ + B` before verifying.
    #[arg(long, allow_hyphen_values = true)]
    pub gauge: Option<String>,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: MethodArg,
    #[arg(long, default_value_t = 1e-6)]
    pub h_tol: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub coeff_tol: f64,
    #[arg(long, default_value_t = 1e-5)]
    pub pde_tol: f64,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Coefficient JSON `{"x1": {"(i,j)": c, ...}, ...}`.
    pub path: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Fractional,
    Inversion,
    InversionLiteral,
}

impl From<FormArg> for MoebiusForm {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Fractional => MoebiusForm::Fractional,
            FormArg::Inversion => MoebiusForm::Inversion,
            FormArg::InversionLiteral => MoebiusForm::InversionLiteral,
        }
    }
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long)]
    pub g: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    pub sign: String,
    #[arg(long, value_enum, default_value = "fractional")]
    pub form: FormArg,
    #[arg(long, default_value = "-0.4:0.4:-0.4:0.4", allow_hyphen_values = true)]
    pub domain: String,
    #[arg(long, default_value = "5x5")]
    pub grid: String,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Syntax { text: String, error: SyntaxError },
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Syntax { .. } => 3,
            CliError::Domain(_) => 2,
        }
    }

    pub fn render(&self) -> String {
        match self {
            CliError::Usage(m) => format!("error: {m}"),
            CliError::Domain(m) => format!("error: {m}"),
            CliError::Syntax { text, error } => {
                format!(
                    "error: {error}\n  {text}\n  {}^",
                    " ".repeat(text[..error.offset.min(text.len())].chars().count())
                )
            }
        }
    }
}

fn domain_err(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

fn usage_err(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn expr(text: &str) -> Result<HoloExpr, CliError> {
    HoloExpr::parse(text).map_err(|error| CliError::Syntax {
        text: text.to_string(),
        error,
    })
}

fn number(text: &str) -> Result<SplitComplex, CliError> {
    text.parse().map_err(usage_err)
}

fn sign(text: &str) -> Result<Sign, CliError> {
    match text.trim() {
        "+" | "plus" | "1" | "+1" => Ok(Sign::Plus),
        "-" | "minus" | "-1" => Ok(Sign::Minus),
        other => Err(CliError::Usage(format!("sign must be + or -, got {other:?}"))),
    }
}

fn lattice(domain: &str, grid: &str) -> Result<Grid, CliError> {
    let rect: Rect = domain.parse().map_err(usage_err)?;
    let (nu, nv) = parse_grid_dims(grid).map_err(usage_err)?;
    Grid::new(rect, nu, nv).map_err(usage_err)
}

fn data(f: Option<&str>, g: &str, part: PartArg, base: &str) -> Result<GeneratingData, CliError> {
    let g = expr(g)?;
    let d = match f {
        Some(f) => GeneratingData::general(expr(f)?, g),
        None => GeneratingData::canonical(g),
    };
    Ok(d.with_part(part.into()).with_base_point(number(base)?))
}

fn report(command: &str, body: Value) -> Value {
    let mut out = json!({ "schema_version": SCHEMA_VERSION, "command": command });
    if let (Value::Object(o), Value::Object(b)) = (&mut out, body) {
        o.extend(b);
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct Gate {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Gate {
    fn below(name: &str, value: Option<f64>, threshold: f64) -> Self {
        let value = value.unwrap_or(f64::INFINITY);
        Self {
            name: name.to_string(),
            value,
            threshold,
            pass: value < threshold,
        }
    }
}

/// A finished command: its JSON report and whether all gates passed.
pub struct Outcome {
    pub report: Value,
    pub passed: bool,
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn write_obj(patch: &SurfacePatch, path: &Path) -> std::io::Result<()> {
    let grid = patch.grid();
    let mut index = vec![0usize; grid.len()];
    let mut text = String::new();
    let mut next = 1;
    for (i, k) in grid.nodes() {
        if let Some(p) = patch.point(i, k) {
            writeln!(text, "v {:.16e} {:.16e} {:.16e}", p[0], p[1], p[2]).expect("string write");
            index[grid.index(i, k)] = next;
            next += 1;
        }
    }
    for k in 0..grid.v.n.saturating_sub(1) {
        for i in 0..grid.u.n.saturating_sub(1) {
            let c = [
                grid.index(i, k),
                grid.index(i + 1, k),
                grid.index(i + 1, k + 1),
                grid.index(i, k + 1),
            ]
            .map(|n| index[n]);
            if c.contains(&0) {
                continue;
            }
            writeln!(text, "f {} {} {}", c[0], c[1], c[2]).expect("string write");
            writeln!(text, "f {} {} {}", c[0], c[2], c[3]).expect("string write");
        }
    }
    fs::write(path, text)
}

/// Vertices of an OBJ file, in order.
pub fn read_obj_vertices(path: &Path) -> std::io::Result<Vec<Point3>> {
    let text = fs::read_to_string(path)?;
    let bad = |l: &str| std::io::Error::new(std::io::ErrorKind::InvalidData, format!("bad vertex line {l:?}"));
    text.lines()
        .filter(|l| l.starts_with("v "))
        .map(|l| {
            let v: Vec<f64> = l[2..]
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| bad(l))?;
            match v.as_slice() {
                &[a, b, c] => Ok([a, b, c]),
                _ => Err(bad(l)),
            }
        })
        .collect()
}

const CSV_HEADER: [&str; 13] = ["u", "v", "x1", "x2", "x3", "E", "F", "G", "L", "M", "N", "K", "H"];

pub fn write_csv(patch: &SurfacePatch, forms: &FormField, path: &Path) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(domain_err)?;
    w.write_record(CSV_HEADER).map_err(domain_err)?;
    let grid = patch.grid();
    for (i, k) in grid.nodes() {
        let Some(p) = patch.point(i, k) else { continue };
        let z = grid.node(i, k);
        let mut row = vec![z.re, z.im, p[0], p[1], p[2]];
        match forms.at(i, k) {
            Some(ff) => {
                let (kk, h) = ff.curvatures();
                row.extend([ff.e, ff.f, ff.g, ff.l, ff.m, ff.n, kk, h]);
            }
            None => row.extend([f64::NAN; 8]),
        }
        w.write_record(row.iter().map(|x| format!("{x:.16e}")))
            .map_err(domain_err)?;
    }
    w.flush().map_err(domain_err)
}

/// Patch from a CSV with at least the columns u, v, x1, x2, x3. The lattice
/// is the product of the distinct u and v values; missing nodes are empty.
pub fn read_csv_patch(path: &Path) -> Result<SurfacePatch, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(domain_err)?;
    let headers = r.headers().map_err(domain_err)?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CliError::Usage(format!("CSV lacks column {name:?}")))
    };
    let cols = [col("u")?, col("v")?, col("x1")?, col("x2")?, col("x3")?];
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(domain_err)?;
        let vals: Vec<f64> = cols
            .iter()
            .map(|&c| rec.get(c).unwrap_or("").trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Usage(format!("CSV value: {e}")))?;
        rows.push(vals);
    }
    let distinct = |c: usize| {
        let mut xs: Vec<f64> = rows.iter().map(|r| r[c]).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
        xs
    };
    let (us, vs) = (distinct(0), distinct(1));
    if us.len() < 3 || vs.len() < 3 {
        return Err(CliError::Usage("CSV lattice must be at least 3x3".into()));
    }
    let rect = Rect::new(us[0], us[us.len() - 1], vs[0], vs[vs.len() - 1]).map_err(usage_err)?;
    let grid = Grid::new(rect, us.len(), vs.len()).map_err(usage_err)?;
    let mut points = vec![None; grid.len()];
    for r in &rows {
        let i = grid.u.locate(r[0]).map(f64::round);
        let k = grid.v.locate(r[1]).map(f64::round);
        if let (Some(i), Some(k)) = (i, k) {
            points[grid.index(i as usize, k as usize)] = Some([r[2], r[3], r[4]]);
        }
    }
    Ok(SurfacePatch::from_points(grid, points))
}

fn surface_summary(patch: &SurfacePatch, forms: &FormField) -> Value {
    let h = forms.mean_curvature_field();
    let k = forms.curvature_field();
    json!({
        "nodes": patch.grid().len(),
        "invalid_count": patch.invalid_count(),
        "form_nodes": forms.count(),
        "form_method": forms.method,
        "integration": patch.method(),
        "max_abs_h": h.max_abs().map(finite_or_null),
        "k_range": k.range().map(|(a, b)| [a, b]),
    })
}

pub fn cmd_generate(a: &GenerateArgs) -> Result<Outcome, CliError> {
    let d = data(a.data.f.as_deref(), &a.data.g, a.data.part, &a.data.base_point)?;
    let grid = lattice(&a.domain, &a.grid)?;
    let opts = SurfaceOptions {
        prefer_antiderivative: !a.quadrature,
        ..SurfaceOptions::default()
    };
    let patch = evaluate_surface(&d, grid, &opts).map_err(domain_err)?;
    let forms = FormField::compute(&patch, a.method.into());
    let format = match a.format {
        Some(f) => f,
        None => match a.out.extension().and_then(|e| e.to_str()) {
            Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            _ => Format::Obj,
        },
    };
    let summary = surface_summary(&patch, &forms);
    match format {
        Format::Obj => write_obj(&patch, &a.out).map_err(domain_err)?,
        Format::Csv => write_csv(&patch, &forms, &a.out)?,
        Format::Json => {
            let points: Vec<Value> = patch
                .grid()
                .nodes()
                .map(|(i, k)| {
                    let z = patch.grid().node(i, k);
                    json!({ "u": z.re, "v": z.im, "x": patch.point(i, k), "regular": patch.is_regular(i, k) })
                })
                .collect();
            let body = report("generate", json!({ "summary": summary, "points": points }));
            fs::write(&a.out, serde_json::to_string_pretty(&body).expect("json")).map_err(domain_err)?;
        }
    }
    Ok(Outcome {
        report: report(
            "generate",
            json!({ "out": a.out, "format": format!("{format:?}").to_lowercase(), "summary": summary }),
        ),
        passed: true,
    })
}

pub fn cmd_canonicalize(a: &CanonicalizeArgs) -> Result<Outcome, CliError> {
    let g = expr(&a.g)?;
    let f = match &a.f {
        Some(f) => expr(f)?,
        None => HoloExpr::constant(SplitComplex::ONE).div(&g.derivative()).simplify(),
    };
    let rect: Rect = a.domain.parse().map_err(usage_err)?;
    let grid = lattice(&a.domain, &a.grid)?;
    let opts = if a.lenient {
        CanonicalizeOptions::lenient()
    } else {
        CanonicalizeOptions::default()
    };
    let r = canonicalize(&f, &g, number(&a.w0)?, number(&a.z0)?, rect, sign(&a.sign)?, &opts).map_err(domain_err)?;
    let knots = r.knot_residual(&grid);
    let lattice_res = r.residual(&grid);
    let (map, identity) = match &r.z_of_w {
        ZMap::Affine { z0, w0, slope } => {
            let offset = *z0 - *slope * *w0;
            let id = (*slope - SplitComplex::ONE).magnitude() < 1e-12 && offset.magnitude() < 1e-12;
            (
                json!({ "kind": "affine", "slope": slope.to_string(), "offset": offset.to_string() }),
                id,
            )
        }
        ZMap::Dense { p, q } => (
            json!({ "kind": "dense", "p_range": p.t_range(), "q_range": q.t_range(), "knots": p.len() + q.len() }),
            false,
        ),
    };
    let gate = Gate::below("eq_residual", Some(knots.max), a.tol);
    let passed = gate.pass;
    Ok(Outcome {
        report: report(
            "canonicalize",
            json!({
                "f": f.to_string(),
                "g": g.to_string(),
                "sign": r.sign,
                "w0": r.w0.to_string(),
                "z0": r.z0.to_string(),
                "map": map,
                "identity": identity,
                "g_tilde": r.g_tilde_symbolic.as_ref().map(|e| e.to_string()),
                "residual_at_knots": knots,
                "residual_on_grid": lattice_res,
                "gates": [gate],
                "passed": passed,
            }),
        ),
        passed,
    })
}

fn parse_gauge(text: &str) -> Result<CanonicalGauge, CliError> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("gauge must be ε,A,B; got {text:?}")))?;
    match parts.as_slice() {
        &[e, a, b] if e == 1.0 || e == -1.0 => Ok(CanonicalGauge::new(e as i8, a, b)),
        _ => Err(CliError::Usage(format!(
            "gauge must be ε,A,B with ε = ±1; got {text:?}"
        ))),
    }
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let gauge = a
        .gauge
        .as_deref()
        .map(parse_gauge)
        .transpose()?
        .unwrap_or(CanonicalGauge::IDENTITY);
    let (patch, d) = match (&a.csv, &a.g) {
        (Some(path), _) => (read_csv_patch(path)?, None),
        (None, Some(g)) => {
            let d = data(a.f.as_deref(), g, a.part, &a.base_point)?;
            let grid = lattice(&a.domain, &a.grid)?;
            (
                evaluate_surface(&d, grid, &SurfaceOptions::default()).map_err(domain_err)?,
                Some(d),
            )
        }
        (None, None) => return Err(CliError::Usage("verify needs --g or --csv".into())),
    };
    let patch = if gauge == CanonicalGauge::IDENTITY {
        patch
    } else {
        patch.apply_gauge(&gauge)
    };
    let method: FormMethod = a.method.into();
    let forms = FormField::compute(&patch, method);
    let mut gates = vec![Gate::below(
        "max_abs_h",
        forms.mean_curvature_field().max_abs(),
        a.h_tol,
    )];
    let mut details = json!({});

    if a.canonical {
        // keep away from the lightlike locus |g| = 1 when g is known
        let keep = |u: f64, v: f64| -> bool {
            let Some(d) = &d else { return true };
            let (u, v) = gauge.map(u, v);
            d.g()
                .eval(SplitComplex::new(u, v))
                .map(|g| (1.0 - g.norm_sqr()).abs() > 0.3)
                .unwrap_or(false)
        };
        let coeffs = verify_canonical_coefficients(&patch, method).restrict(keep);
        let s = coeffs.summary();
        gates.push(Gate::below(
            "canonical_coefficients",
            (s.count > 0).then_some(s.max_overall),
            a.coeff_tol,
        ));
        details["coefficients"] = json!({
            "names": COEFFICIENT_NAMES,
            "max": s.max,
            "mean": s.mean,
            "nodes": s.count,
            "negative": s.negative,
            "positive": s.positive,
        });
        if let Some(d) = &d {
            let part_sign = match d.part() {
                Part::Real => CurvatureSign::Negative,
                Part::Imaginary => CurvatureSign::Positive,
            };
            let k = |u: f64, v: f64| {
                let (u, v) = gauge.map(u, v);
                d.gauss_curvature(SplitComplex::new(u, v))
                    .ok()
                    .filter(|k| k.is_finite())
            };
            let res = curvature_pde_residual(&k, part_sign, *patch.grid(), 1e-3).masked(|u, v, _| keep(u, v));
            gates.push(Gate::below("curvature_equation", res.max_abs(), a.pde_tol));
        }
    }
    let passed = gates.iter().all(|g| g.pass);
    details["summary"] = surface_summary(&patch, &forms);
    details["gauge"] = json!(gauge);
    details["gates"] = json!(gates);
    details["passed"] = json!(passed);
    Ok(Outcome {
        report: report("verify", details),
        passed,
    })
}

pub fn cmd_classify(a: &ClassifyArgs) -> Result<Outcome, CliError> {
    let text = fs::read_to_string(&a.path).map_err(|e| CliError::Usage(format!("{}: {e}", a.path.display())))?;
    let cubic = CubicParametrization::from_json(&text).map_err(usage_err)?;
    let v = classify_cubic(&cubic);
    Ok(Outcome {
        report: report("classify", serde_json::to_value(v.report()).expect("json")),
        passed: true,
    })
}

pub fn cmd_transform(a: &TransformArgs) -> Result<Outcome, CliError> {
    let g = expr(&a.g)?;
    let grid = lattice(&a.domain, &a.grid)?;
    let m = MoebiusParams {
        phi: a.phi,
        alpha: number(&a.alpha)?,
        sign: sign(&a.sign)?,
        form: a.form.into(),
    };
    let g_new = moebius_transform(&g, &m).map_err(domain_err)?;
    check_denominator(&g, &m, &grid).map_err(domain_err)?;

    let (before, after) = (
        GeneratingData::canonical(g.clone()),
        GeneratingData::canonical(g_new.clone()),
    );
    let k_err = grid
        .nodes()
        .filter_map(|(i, k)| {
            let z = grid.node(i, k);
            let (k0, k1) = (before.gauss_curvature(z).ok()?, after.gauss_curvature(z).ok()?);
            Some((k0 - k1).abs() / k0.abs().max(1.0))
        })
        .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
    let mut gates = vec![Gate::below("curvature_invariance", k_err, a.tol)];
    let mut body = json!({ "g": g.to_string(), "g_tilde": g_new.to_string(), "params": m });
    if m.form == MoebiusForm::Fractional {
        let w = motion_witness(&m).map_err(domain_err)?;
        let rows = |x: &nalgebra::Matrix3<f64>| -> [[f64; 3]; 3] {
            std::array::from_fn(|i| std::array::from_fn(|k| x[(i, k)]))
        };
        let (err, nodes) = witness_discrepancy(&g, &m, &grid).map_err(domain_err)?;
        gates.push(Gate::below("witness", (nodes > 0).then_some(err), a.tol));
        body["witness"] = json!({
            "A": rows(&w.a),
            "B": rows(&w.b),
            "S": rows(&w.s),
            "lorentz_defect": [lorentz_defect(&w.a), lorentz_defect(&w.b)],
            "det": [w.a.determinant(), w.b.determinant()],
            "nodes": nodes,
        });
    }
    let passed = gates.iter().all(|g| g.pass);
    body["gates"] = json!(gates);
    body["passed"] = json!(passed);
    Ok(Outcome {
        report: report("transform", body),
        passed,
    })
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Canonicalize(a) => cmd_canonicalize(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Transform(a) => cmd_transform(a),
    }
}

/// Parses `args` (including the program name), runs the command, writes
/// the report to `out` and diagnostics to `err`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = write!(if code == 0 { &mut *out as &mut dyn Write } else { err }, "{e}");
            return code;
        }
    };
    match execute(&cli) {
        Ok(o) => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&o.report).expect("json"));
            if o.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "{}", e.render());
            e.exit_code()
        }
    }
}
