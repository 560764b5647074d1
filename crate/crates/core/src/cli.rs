//! The `knotcol` command line.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::catalog;
use crate::certificates::{extract_certificate, rank_checks, Relation, Variant};
use crate::coloring::{
    colorings, fox_coloring_count, fox_from_dehn, knot_determinant, min_colors_diagram, DEFAULT_BUDGET,
};
use crate::diagram::Diagram;
use crate::enumerate::{candidates, table_report, TableReport};
use crate::exactalg::{check_modulus, is_odd_prime};
use crate::palette::{connected_r_witness, palette_graph, PaletteGraph};
use crate::DehnColoring;

pub const BUDGET_VAR: &str = "KNOTCOL_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "knotcol", version, about = "Dehn p-colorings, palette graphs and minimum-color bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Dot,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Input {
    /// PD code, `X[a,b,c,d] ...` or a JSON array of quadruples
    #[arg(long)]
    pub pd: Option<String>,
    /// File containing a PD code
    #[arg(long)]
    pub pd_file: Option<PathBuf>,
    /// Catalog knot name, e.g. 3_1
    #[arg(long)]
    pub knot: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimension and size of the space of Dehn p-colorings
    ColorCount {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Minimum number of colors of a nontrivial coloring of the diagram
    Mincol {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Palette graph of a color set and the R-subgraph decision
    Palette {
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        set: Vec<i64>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Affine classes of color sets admitting a connected R-subgraph
    Candidates {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        size: usize,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Candidate lists at the lower bound, compared with the reference tables
    Theorem62 {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Rank checks and determinant certificate for a nontrivial coloring
    Certify {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        input: Input,
        /// Region colors; defaults to a minimum-color witness
        #[arg(long, value_delimiter = ',')]
        coloring: Option<Vec<i64>>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Dehn to Fox correspondence
    Fox {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Knot determinant
    Det {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Check(String),
}

type Res<T> = Result<T, Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

struct Report {
    text: String,
    /// Reason the run should exit with status 1.
    failed: Option<String>,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { text, failed: None }
    }
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    match dispatch(&cli.command) {
        Ok(Report { text, failed: None }) => Outcome { code: 0, stdout: text, stderr: String::new() },
        Ok(Report { text, failed: Some(why) }) => Outcome { code: 1, stdout: text, stderr: format!("error: {why}\n") },
        Err(Failure::Usage(msg)) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n") },
        Err(Failure::Check(msg)) => Outcome { code: 1, stdout: String::new(), stderr: format!("error: {msg}\n") },
    }
}

fn budget() -> Res<u64> {
    match std::env::var(BUDGET_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| usage(format!("{BUDGET_VAR} must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn load(input: &Input) -> Res<(String, Diagram)> {
    if let Some(name) = &input.knot {
        let d = catalog::load(name).map_err(usage)?;
        return Ok((name.clone(), d));
    }
    let (label, text) = match (&input.pd, &input.pd_file) {
        (Some(pd), _) => ("pd".to_string(), pd.clone()),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            (path.display().to_string(), text)
        }
        (None, None) => return Err(usage("one of --pd, --pd-file, --knot is required")),
    };
    let d = Diagram::from_pd_text(&text).map_err(usage)?;
    Ok((label, d))
}

fn modulus(p: u64) -> Res<u64> {
    check_modulus(p).map_err(usage)?;
    Ok(p)
}

fn no_dot(format: Format) -> Res<()> {
    if format == Format::Dot {
        return Err(usage("--format dot is only available for `palette`"));
    }
    Ok(())
}

fn emit_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

fn fmt_set<'a>(xs: impl IntoIterator<Item = &'a u64>) -> String {
    format!("{{{}}}", xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

fn fmt_values(xs: &[u64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn table(rows: &[(&str, String)]) -> String {
    let w = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<w$}  {v}\n")).collect()
}

fn dispatch(cmd: &Command) -> Res<Report> {
    match cmd {
        Command::ColorCount { p, input, format } => color_count(*p, input, *format),
        Command::Mincol { p, input, format } => mincol(*p, input, *format),
        Command::Palette { p, set, format } => palette(*p, set, *format),
        Command::Candidates { p, size, format } => candidate_classes(*p, *size, *format),
        Command::Theorem62 { p, format } => theorem62(*p, *format),
        Command::Certify { p, input, coloring, format } => certify(*p, input, coloring.as_deref(), *format),
        Command::Fox { p, input, format } => fox(*p, input, *format),
        Command::Det { input, format } => det(input, *format),
    }
}

fn color_count(p: u64, input: &Input, format: Format) -> Res<Report> {
    no_dot(format)?;
    let p = modulus(p)?;
    let (name, d) = load(input)?;
    let space = colorings(&d, p, 0).map_err(usage)?;
    let trivial = BigUint::from(p).pow(2);
    let nontrivial = &space.count - &trivial;
    let text = match format {
        Format::Json => emit_json(&json!({
            "diagram": name,
            "p": p,
            "crossings": d.crossing_count(),
            "regions": d.region_count(),
            "dimension": space.dimension,
            "count": space.count.to_string(),
            "nontrivial": nontrivial.to_string(),
            "colorable": space.is_colorable(),
        })),
        _ => table(&[
            ("diagram", name),
            ("p", p.to_string()),
            ("crossings", d.crossing_count().to_string()),
            ("regions", d.region_count().to_string()),
            ("dimension", space.dimension.to_string()),
            ("count", space.count.to_string()),
            ("nontrivial", nontrivial.to_string()),
            ("colorable", space.is_colorable().to_string()),
        ]),
    };
    Ok(Report::ok(text))
}

fn mincol(p: u64, input: &Input, format: Format) -> Res<Report> {
    no_dot(format)?;
    let p = modulus(p)?;
    let (name, d) = load(input)?;
    let m = min_colors_diagram(&d, p, budget()?).map_err(usage)?;
    let bound_holds = m.min.is_none_or(|k| k >= m.lower_bound);
    let witness = m.witness.as_ref().map(|w| w.values.clone());
    let colors = m.witness.as_ref().map(|w| w.colors_used());
    let text = match format {
        Format::Json => emit_json(&json!({
            "diagram": name,
            "p": p,
            "min": m.min,
            "witness": witness,
            "colors": colors,
            "lower_bound": m.lower_bound,
            "bound_holds": bound_holds,
            "exhaustive": m.exhaustive,
            "examined": m.examined,
        })),
        _ => table(&[
            ("diagram", name),
            ("p", p.to_string()),
            ("minimum", m.min.map_or("none (no nontrivial coloring)".to_string(), |k| k.to_string())),
            ("witness", witness.as_deref().map_or("-".to_string(), fmt_values)),
            ("colors", colors.as_ref().map_or("-".to_string(), fmt_set)),
            ("lower bound", m.lower_bound.to_string()),
            ("bound holds", bound_holds.to_string()),
            ("search", if m.exhaustive { "exhaustive" } else { "affine quotient" }.to_string()),
            ("examined", m.examined.to_string()),
        ]),
    };
    let failed = (!bound_holds).then(|| format!("minimum {:?} is below the lower bound {}", m.min, m.lower_bound));
    Ok(Report { text, failed })
}

fn palette(p: u64, set: &[i64], format: Format) -> Res<Report> {
    let p = modulus(p)?;
    if set.iter().any(|&a| a < 0 || a as u64 >= p) {
        return Err(usage(format!("set elements must lie in 0..{p}")));
    }
    let s: BTreeSet<u64> = set.iter().map(|&a| a as u64).collect();
    let g = palette_graph(&s, p).map_err(usage)?;
    let witness = connected_r_witness(&g).map_err(usage)?;
    let text = match format {
        Format::Dot => g.to_dot("palette"),
        Format::Json => {
            let mut v = serde_json::to_value(g.to_json()).expect("palette json");
            v["witness"] = json!(witness);
            emit_json(&v)
        }
        Format::Table => palette_table(&g, &s, witness.as_ref()),
    };
    Ok(Report::ok(text))
}

fn palette_table(g: &PaletteGraph, s: &BTreeSet<u64>, witness: Option<&BTreeSet<u64>>) -> String {
    let mut out = table(&[("p", g.modulus.to_string()), ("set", fmt_set(s)), ("vertices", fmt_set(&g.vertices))]);
    let _ = writeln!(out, "edges ({})", g.edges.len());
    for ((u, v), label) in &g.edges {
        let _ = writeln!(out, "  {u} -- {v}  label {label}");
    }
    match witness {
        Some(w) => {
            let _ = writeln!(out, "connected R-subgraph with ≥ 3 vertices on {}", fmt_set(w));
        }
        None => out.push_str("no connected R-subgraph with ≥ 3 vertices\n"),
    }
    out
}

fn candidate_classes(p: u64, size: usize, format: Format) -> Res<Report> {
    no_dot(format)?;
    let p = modulus(p)?;
    let found = candidates(p, size).map_err(usage)?;
    let classes: Vec<Vec<u64>> = found.into_iter().map(|c| c.elements).collect();
    let text = match format {
        Format::Json => emit_json(&json!({ "p": p, "k": size, "classes": classes })),
        _ => {
            let mut out = table(&[("p", p.to_string()), ("size", size.to_string()), ("classes", classes.len().to_string())]);
            for c in &classes {
                let _ = writeln!(out, "  {}", fmt_set(c));
            }
            out
        }
    };
    Ok(Report::ok(text))
}

fn report_json(r: &TableReport) -> Value {
    json!({ "p": r.p, "k": r.k, "classes": r.classes, "expected_match": r.expected_match })
}

fn report_table(r: &TableReport) -> String {
    let mut out = format!("p = {}, k = {}\n", r.p, r.k);
    for b in &r.below {
        let _ = writeln!(out, "  size {}: {} classes, {} candidates", b.k, b.classes, b.candidates);
    }
    let _ = writeln!(out, "  size {}: {} candidates", r.k, r.classes.len());
    for c in &r.classes {
        let _ = writeln!(out, "    {}", fmt_set(c));
    }
    let verdict = match r.expected_match {
        Some(true) => "matches reference",
        Some(false) => "DIFFERS from reference",
        None => "no reference",
    };
    let _ = writeln!(out, "  {verdict}");
    out
}

fn theorem62(p: Option<u64>, format: Format) -> Res<Report> {
    no_dot(format)?;
    let primes: Vec<u64> = match p {
        Some(p) => vec![modulus(p)?],
        None => (3..32).filter(|&q| is_odd_prime(q)).collect(),
    };
    let reports = primes.iter().map(|&q| table_report(q).map_err(usage)).collect::<Res<Vec<_>>>()?;
    let text = match (format, p) {
        (Format::Json, Some(_)) => emit_json(&report_json(&reports[0])),
        (Format::Json, None) => emit_json(&Value::Array(reports.iter().map(report_json).collect())),
        _ => reports.iter().map(report_table).collect(),
    };
    let bad: Vec<String> = reports.iter().filter(|r| !r.passed).map(|r| r.p.to_string()).collect();
    let failed = (!bad.is_empty()).then(|| format!("reference mismatch for p = {}", bad.join(", ")));
    Ok(Report { text, failed })
}

fn certify(p: u64, input: &Input, coloring: Option<&[i64]>, format: Format) -> Res<Report> {
    no_dot(format)?;
    let p = modulus(p)?;
    let (name, d) = load(input)?;
    let c = match coloring {
        Some(values) => {
            if values.len() != d.region_count() {
                return Err(usage(format!("--coloring needs {} values, got {}", d.region_count(), values.len())));
            }
            let c = DehnColoring::new(p, values.to_vec());
            c.validate(&d).map_err(usage)?;
            c
        }
        None => min_colors_diagram(&d, p, budget()?)
            .map_err(usage)?
            .witness
            .ok_or_else(|| usage(format!("{name} has no nontrivial {p}-coloring")))?,
    };
    let ranks = rank_checks(&d, &c, p).map_err(usage)?;
    let cert = extract_certificate(&d, &c, p).map_err(|e| Failure::Check(e.to_string()))?;
    let violations = cert.violations();
    let variant = match cert.variant {
        Variant::A => "A (row e_1)".to_string(),
        Variant::B { i, j } => format!("B (row e_{} - e_{})", i + 1, j + 1),
    };
    let sub = cert.submatrix();
    let text = match format {
        Format::Json => emit_json(&json!({
            "diagram": name,
            "p": p,
            "coloring": c.values,
            "rank_checks": ranks.claims,
            "certificate": {
                "variant": cert.variant,
                "ell": cert.ell,
                "merged": cert.merged.to_i64_rows(),
                "rows": cert.row_indices,
                "cols": cert.col_indices,
                "det": cert.det_value.to_string(),
                "upper_bound": cert.upper_bound().to_string(),
                "star_rows": cert.star_rows,
                "violations": violations,
            },
        })),
        _ => {
            let mut out = table(&[("diagram", name), ("p", p.to_string()), ("coloring", fmt_values(&c.values))]);
            out.push_str("rank checks\n");
            for claim in &ranks.claims {
                let rel = match claim.relation {
                    Relation::Equals => "=",
                    Relation::AtMost => "<=",
                };
                let mark = if claim.passed { "ok" } else { "FAIL" };
                let _ = writeln!(out, "  {:<4} {}: {} {rel} {}", mark, claim.claim, claim.observed, claim.bound);
            }
            out.push_str("certificate\n");
            out.push_str(&table(&[
                ("  variant", variant),
                ("  merged columns", cert.ell.to_string()),
                ("  rows", format!("{:?}", cert.row_indices)),
                ("  cols", format!("{:?}", cert.col_indices)),
                ("  det", cert.det_value.to_string()),
                ("  bound", format!("{} <= |det| <= {}", p, cert.upper_bound())),
                ("  (★) rows", cert.star_rows.iter().all(|&b| b).to_string()),
            ]));
            out.push_str("  submatrix\n");
            for row in sub.to_i64_rows() {
                let _ = writeln!(out, "    {}", row.iter().map(|x| format!("{x:>3}")).collect::<String>());
            }
            for v in &violations {
                let _ = writeln!(out, "  violation: {v}");
            }
            out
        }
    };
    let failed = if !ranks.all_passed() {
        Some("rank check failed".to_string())
    } else if !violations.is_empty() {
        Some(format!("unsound certificate: {}", violations.join("; ")))
    } else {
        None
    };
    Ok(Report { text, failed })
}

fn fox(p: u64, input: &Input, format: Format) -> Res<Report> {
    no_dot(format)?;
    let p = modulus(p)?;
    let (name, d) = load(input)?;
    let space = colorings(&d, p, budget()?).map_err(usage)?;
    let fox_count = fox_coloring_count(&d, p).map_err(usage)?;
    let counts_agree = space.count == &fox_count * p;
    // fibre sizes of the Dehn -> Fox map, when every coloring was enumerated
    let fibres = match &space.colorings {
        Some(all) => {
            let mut sizes: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
            for c in all {
                let f = fox_from_dehn(&d, c).map_err(usage)?;
                if !f.is_valid(&d) {
                    return Err(Failure::Check(format!("image of {:?} is not a Fox coloring", c.values)));
                }
                *sizes.entry(f.values).or_default() += 1;
            }
            Some(sizes)
        }
        None => None,
    };
    let images = fibres.as_ref().map(|f| f.len());
    let uniform = fibres.as_ref().map(|f| f.values().all(|&n| n == p) && BigUint::from(f.len()) == fox_count);
    let passed = counts_agree && uniform.unwrap_or(true);
    let text = match format {
        Format::Json => emit_json(&json!({
            "diagram": name,
            "p": p,
            "dehn_count": space.count.to_string(),
            "fox_count": fox_count.to_string(),
            "counts_agree": counts_agree,
            "images": images,
            "p_to_one": uniform,
        })),
        _ => table(&[
            ("diagram", name),
            ("p", p.to_string()),
            ("Dehn colorings", space.count.to_string()),
            ("Fox colorings", fox_count.to_string()),
            ("Dehn = p * Fox", counts_agree.to_string()),
            ("images", images.map_or("not enumerated".to_string(), |n| n.to_string())),
            ("p-to-one", uniform.map_or("not enumerated".to_string(), |b| b.to_string())),
        ]),
    };
    let failed = (!passed).then(|| "Dehn to Fox map is not p-to-one".to_string());
    Ok(Report { text, failed })
}

fn det(input: &Input, format: Format) -> Res<Report> {
    no_dot(format)?;
    let (name, d) = load(input)?;
    let det = knot_determinant(&d);
    let text = match format {
        Format::Json => emit_json(&json!({
            "diagram": name,
            "crossings": d.crossing_count(),
            "determinant": det.to_string(),
        })),
        _ => table(&[("diagram", name), ("crossings", d.crossing_count().to_string()), ("determinant", det.to_string())]),
    };
    Ok(Report::ok(text))
}
