//! Command-line front end.
//!
//! `-h` is the threshold exponent (`ε = 2^-h`), so the short help flag is
//! disabled everywhere; use `--help`.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::asymptotics::{self, SubshiftModel};
use crate::cache::{self, CachePolicy};
use crate::densities::{DensityTable, ReconstructionConfig};
use crate::error::{Error, Result};
use crate::golden::{self, Golden};
use crate::rational::{self, to_f64, Rational};
use crate::recognizability;
use crate::recplot::{self, BoundaryPolicy};
use crate::report::{self, ConvergenceRow, DetRow, Quantity};
use crate::rqa::RQAReport;
use crate::substitution::{Substitution, SubstitutionKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "subrqa",
    version,
    about = "Recurrence quantification of binary constant-length substitution subshifts",
    disable_help_flag = true
)]
pub struct Cli {
    #[arg(long, action = ArgAction::Help, global = true, help = "Print help")]
    help: Option<bool>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a substitution and print its recognizability constants.
    #[command(disable_help_flag = true)]
    Classify(SpecArgs),
    /// Print alpha, beta, c, K, R and R0 of a primitive aperiodic substitution.
    #[command(disable_help_flag = true)]
    Constants(SpecArgs),
    /// Finite-n and/or exact asymptotic RQA report.
    #[command(disable_help_flag = true)]
    Analyze(AnalyzeArgs),
    /// Base densities and derived dens(K_l) up to a length.
    #[command(disable_help_flag = true)]
    Densities(DensitiesArgs),
    /// CSV of empirical against asymptotic values over a list of plot sizes.
    #[command(disable_help_flag = true)]
    Convergence(ConvergenceArgs),
    /// Render a recurrence plot as ASCII or PGM.
    #[command(disable_help_flag = true)]
    Render(RenderArgs),
    /// Asymptotic DET_l over a range of thresholds h.
    #[command(disable_help_flag = true)]
    DetScan(DetScanArgs),
    /// Run the golden-value verification corpus.
    #[command(disable_help_flag = true)]
    VerifyPaper(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    /// Substitution, e.g. "0->01,1->10".
    pub spec: String,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args, Clone)]
pub struct EstimatorArgs {
    /// Prefix lengths of the density estimator, "N1,N2".
    #[arg(long, value_parser = parse_pair, value_name = "N1,N2")]
    pub scales: Option<(usize, usize)>,
    /// Plot sizes of the pair-count and emptiness cross-checks, "PAIR,SCAN".
    #[arg(long, value_parser = parse_pair, value_name = "PAIR,SCAN")]
    pub checks: Option<(usize, usize)>,
    /// Do not read or write the density-table cache.
    #[arg(long)]
    pub no_cache: bool,
}

fn parse_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected two comma-separated integers")?;
    let p = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    let (a, b) = (p(a)?, p(b)?);
    if a < 2 || b < 2 {
        return Err("sizes must be at least 2".into());
    }
    Ok((a, b))
}

impl EstimatorArgs {
    fn config(&self) -> ReconstructionConfig {
        let mut cfg = ReconstructionConfig::default();
        if let Some(s) = self.scales {
            cfg.scales = s;
        }
        if let Some((pair, scan)) = self.checks {
            cfg.pair_n = pair;
            cfg.scan_n = scan;
        }
        cfg
    }

    fn policy(&self) -> CachePolicy {
        if self.no_cache {
            CachePolicy::Disabled
        } else {
            CachePolicy::Use
        }
    }

    fn table(&self, s: &Substitution) -> Result<DensityTable> {
        cache::load_or_reconstruct(s, &self.config(), self.policy())
    }

    fn model(&self, s: &Substitution) -> Result<SubshiftModel> {
        if s.classify().kind == SubstitutionKind::PrimitiveAperiodic {
            Ok(SubshiftModel::Primitive(Box::new(self.table(s)?)))
        } else {
            SubshiftModel::build(s, &self.config())
        }
    }
}

#[derive(Debug, Args, Clone)]
pub struct Threshold {
    /// Threshold exponent: recurrence means distance <= 2^-h.
    #[arg(short = 'h', long = "h", default_value_t = 1, conflicts_with = "eps")]
    pub h: usize,
    /// Threshold in (0, 1); quantized to h = ceil(-log2 eps).
    #[arg(long)]
    pub eps: Option<f64>,
}

impl Threshold {
    fn resolve(&self, notes: &mut Vec<String>) -> Result<usize> {
        match self.eps {
            Some(eps) => {
                let h = recplot::quantize_eps(eps)?;
                notes.push(format!("eps = {eps} quantized to h = {h} (threshold 2^-{h})"));
                Ok(h)
            }
            None if self.h == 0 => Err(Error::InvalidArgument("h must be >= 1".into())),
            None => Ok(self.h),
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub spec: String,
    /// Plot size of the empirical report.
    #[arg(long)]
    pub n: Option<usize>,
    /// Emit the exact n = infinity report.
    #[arg(long)]
    pub asymptotic: bool,
    /// Embedding dimension.
    #[arg(short = 'm', default_value_t = 1)]
    pub m: usize,
    /// Minimal line length.
    #[arg(short = 'l', default_value_t = 1)]
    pub l: usize,
    #[command(flatten)]
    pub threshold: Threshold,
    /// Drop lines that touch the far edge of the plot.
    #[arg(long)]
    pub exclude_n_boundary: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Logarithm base for ENT in text output.
    #[arg(long, default_value_t = std::f64::consts::E)]
    pub log_base: f64,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
}

#[derive(Debug, Args)]
pub struct DensitiesArgs {
    pub spec: String,
    #[arg(long, default_value_t = 64)]
    pub l_max: usize,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    pub spec: String,
    #[arg(long, value_enum, default_value = "rr")]
    pub quantity: Quantity,
    /// Plot sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "256,512,1024,2048,4096")]
    pub sizes: Vec<usize>,
    #[arg(short = 'm', default_value_t = 1)]
    pub m: usize,
    #[arg(short = 'l', default_value_t = 1)]
    pub l: usize,
    #[command(flatten)]
    pub threshold: Threshold,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Image {
    Ascii,
    Pgm,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    pub spec: String,
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    #[command(flatten)]
    pub threshold: Threshold,
    #[arg(long, value_enum, default_value = "ascii")]
    pub image: Image,
    /// Output file; standard output when omitted.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DetScanArgs {
    pub spec: String,
    #[arg(short = 'm', default_value_t = 1)]
    pub m: usize,
    #[arg(short = 'l', default_value_t = 3)]
    pub l: usize,
    #[arg(long, default_value_t = 1)]
    pub h_min: usize,
    #[arg(long, default_value_t = 24)]
    pub h_max: usize,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Only run check groups whose name contains this string.
    #[arg(long)]
    pub filter: Option<String>,
    /// Use the published base densities instead of reconstructing them.
    #[arg(long)]
    pub reference: bool,
    /// Replace a base density before verifying, "L0=NUM/DEN".
    #[arg(long, hide = true)]
    pub tamper: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
}

/// Run with the given arguments (including the program name) and return the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return EXIT_OK;
                }
                _ => EXIT_USAGE,
            };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::InvalidArgument(_)
        | Error::NotPrimitiveAperiodic(_)
        | Error::WrongClass(_) => EXIT_USAGE,
        _ => EXIT_COMPUTE,
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Classify(a) => classify(&a, out),
        Command::Constants(a) => constants(&a, out),
        Command::Analyze(a) => analyze(&a, out),
        Command::Densities(a) => densities(&a, out),
        Command::Convergence(a) => convergence(&a, out),
        Command::Render(a) => render(&a, out),
        Command::DetScan(a) => det_scan(&a, out),
        Command::VerifyPaper(a) => verify(&a, out),
    }
}

fn print_json(out: &mut dyn Write, v: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}

fn classify(a: &SpecArgs, out: &mut dyn Write) -> Result<i32> {
    let s = Substitution::parse(&a.spec)?;
    let cls = s.classify();
    let constants = if cls.kind == SubstitutionKind::PrimitiveAperiodic {
        Some(recognizability::recognizability_constants(&s.normalize().0)?)
    } else {
        None
    };
    match a.format {
        Format::Json => print_json(
            out,
            &json!({ "substitution": s, "classification": cls, "constants": constants }),
        )?,
        _ => {
            writeln!(out, "{s}: {:?}", cls.kind)?;
            writeln!(out, "  normalization: {:?}", cls.normalization)?;
            if let Some(a) = cls.absorbing_letter {
                writeln!(out, "  absorbing letter: {}", a.index())?;
            }
            if let Some(c) = constants {
                writeln!(
                    out,
                    "  alpha = {}, beta = {}, c = {}, K = {}, R = {}, R0 = {}",
                    c.alpha, c.beta, c.c, c.k, c.r, c.r0
                )?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn constants(a: &SpecArgs, out: &mut dyn Write) -> Result<i32> {
    let s = Substitution::parse(&a.spec)?;
    let cls = s.classify();
    if cls.kind != SubstitutionKind::PrimitiveAperiodic {
        return Err(Error::NotPrimitiveAperiodic(format!("{s} is {:?}", cls.kind)));
    }
    let c = recognizability::recognizability_constants(&s.normalize().0)?;
    match a.format {
        Format::Json => print_json(out, &c)?,
        _ => writeln!(
            out,
            "q = {}, alpha = {}, beta = {}, c = {}, K = {}, R = {}, R0 = {}",
            c.q, c.alpha, c.beta, c.c, c.k, c.r, c.r0
        )?,
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct Gap {
    rr: f64,
    det: Option<f64>,
    line_dens: f64,
    corsum: Option<f64>,
}

fn gap(e: &RQAReport, a: &RQAReport) -> Gap {
    let diff = |x: &Rational, y: &Rational| (to_f64(x) - to_f64(y)).abs();
    let both = |x: &Option<Rational>, y: &Option<Rational>| match (x, y) {
        (Some(x), Some(y)) => Some(diff(x, y)),
        _ => None,
    };
    Gap {
        rr: diff(&e.rr, &a.rr),
        det: both(&e.det, &a.det),
        line_dens: diff(&e.line_dens, &a.line_dens),
        corsum: both(&e.corsum, &a.corsum),
    }
}

fn csv_row(r: &RQAReport) -> Vec<String> {
    let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
    vec![
        format!("{:?}", r.provenance).to_lowercase(),
        r.n.map_or("inf".into(), |n| n.to_string()),
        r.m.to_string(),
        r.h.to_string(),
        r.l_min.to_string(),
        r.rr.to_string(),
        r.det.as_ref().map_or(String::new(), |d| d.to_string()),
        opt(Quantity::Lavg.of(r)),
        opt(r.ent),
        r.line_dens.to_string(),
        r.corsum.as_ref().map_or(String::new(), |c| c.to_string()),
    ]
}

fn analyze(a: &AnalyzeArgs, out: &mut dyn Write) -> Result<i32> {
    let s = Substitution::parse(&a.spec)?;
    if a.m == 0 || a.l == 0 {
        return Err(Error::InvalidArgument("m and l must be >= 1".into()));
    }
    if a.n.is_none() && !a.asymptotic {
        return Err(Error::InvalidArgument("give --n, --asymptotic, or both".into()));
    }
    if !(a.log_base > 0.0 && a.log_base != 1.0) {
        return Err(Error::InvalidArgument("log base must be positive and not 1".into()));
    }
    let mut notes = Vec::new();
    let h = a.threshold.resolve(&mut notes)?;
    let policy = if a.exclude_n_boundary {
        BoundaryPolicy::ExcludeNBoundary
    } else {
        BoundaryPolicy::IncludeAll
    };
    let empirical = match a.n {
        Some(n) => {
            let mut r = report::empirical_report(&s, n, a.m, a.l, h, policy)?;
            r.notes.extend(notes.iter().cloned());
            Some(r)
        }
        None => None,
    };
    let asymptotic = if a.asymptotic {
        let mut r = a.estimator.model(&s)?.quantifiers(a.m, a.l, h)?.to_report();
        r.notes.extend(notes.iter().cloned());
        Some(r)
    } else {
        None
    };
    let gap = match (&empirical, &asymptotic) {
        (Some(e), Some(x)) => Some(gap(e, x)),
        _ => None,
    };
    match a.format {
        Format::Json => print_json(
            out,
            &json!({ "substitution": s, "empirical": empirical, "asymptotic": asymptotic, "gap": gap }),
        )?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            let header = [
                "provenance", "n", "m", "h", "l", "rr", "det", "lavg", "ent", "line_dens", "corsum",
            ];
            w.write_record(header).map_err(csv_err)?;
            for r in empirical.iter().chain(asymptotic.iter()) {
                w.write_record(csv_row(r)).map_err(csv_err)?;
            }
            w.flush()?;
        }
        Format::Text => {
            for r in empirical.iter().chain(asymptotic.iter()) {
                write!(out, "{}", report::format_report(r, a.log_base))?;
            }
            if let Some(g) = gap {
                writeln!(out, "gap: |dRR| = {:.3e}, |dP| = {:.3e}", g.rr, g.line_dens)?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(io::Error::other(e.to_string()))
}

fn densities(a: &DensitiesArgs, out: &mut dyn Write) -> Result<i32> {
    let s = Substitution::parse(&a.spec)?;
    let table = a.estimator.table(&s)?;
    let derived: Vec<(usize, Rational)> = table
        .support_up_to(a.l_max)
        .into_iter()
        .map(|l| (l, table.dens_k(l)))
        .collect();
    match a.format {
        Format::Json => {
            let derived: std::collections::BTreeMap<usize, Rational> = derived.into_iter().collect();
            #[derive(Serialize)]
            struct Dump<'a> {
                table: &'a DensityTable,
                #[serde(with = "rational::serde_rational_map")]
                derived: std::collections::BTreeMap<usize, Rational>,
            }
            print_json(out, &Dump { table: &table, derived: derived.clone() })?
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["l", "dens", "approx"]).map_err(csv_err)?;
            for (l, d) in &derived {
                w.write_record([l.to_string(), d.to_string(), to_f64(d).to_string()])
                    .map_err(csv_err)?;
            }
            w.flush()?;
        }
        Format::Text => {
            let c = &table.constants;
            writeln!(out, "{}: R = {}, R0 = {}, alpha + beta = {}", table.subst, c.r, c.r0, c.alpha_beta())?;
            writeln!(out, "base densities:")?;
            for (l0, d) in table.support_bases() {
                writeln!(out, "  dens(K_{l0}) = {d}")?;
            }
            writeln!(out, "nonzero dens(K_l), l <= {}:", a.l_max)?;
            for (l, d) in &derived {
                writeln!(out, "  dens(K_{l}) = {d} ({:.6e})", to_f64(d))?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn convergence(a: &ConvergenceArgs, out: &mut dyn Write) -> Result<i32> {
    let s = Substitution::parse(&a.spec)?;
    let h = a.threshold.resolve(&mut Vec::new())?;
    let limit = a.estimator.model(&s)?.quantifiers(a.m, a.l, h)?.to_report();
    let target = a.quantity.of(&limit);
    let mut sizes = a.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let rows = sizes
        .iter()
        .map(|&n| {
            let r = report::empirical_report(&s, n, a.m, a.l, h, BoundaryPolicy::IncludeAll)?;
            Ok(ConvergenceRow::new(n, a.quantity.of(&r), target))
        })
        .collect::<Result<Vec<_>>>()?;
    report::write_csv(&rows, out)?;
    Ok(EXIT_OK)
}

fn render(a: &RenderArgs, out: &mut dyn Write) -> Result<i32> {
    let s = Substitution::parse(&a.spec)?;
    let h = a.threshold.resolve(&mut Vec::new())?;
    let x = s.fixed_point_prefix(a.n + h)?;
    let bytes = match a.image {
        Image::Ascii => recplot::render_ascii(&x, a.n, h)?.into_bytes(),
        Image::Pgm => recplot::render_pgm(&x, a.n, h)?,
    };
    match &a.output {
        Some(p) => fs::write(p, bytes)?,
        None => out.write_all(&bytes)?,
    }
    Ok(EXIT_OK)
}

fn det_scan(a: &DetScanArgs, out: &mut dyn Write) -> Result<i32> {
    let s = Substitution::parse(&a.spec)?;
    if a.h_min == 0 || a.h_max < a.h_min {
        return Err(Error::InvalidArgument("need 1 <= h-min <= h-max".into()));
    }
    let model = a.estimator.model(&s)?;
    let rows: Vec<DetRow> = asymptotics::determinism_limit_scan(&model, a.m, a.l, a.h_min..=a.h_max)?
        .into_iter()
        .map(|(h, det)| DetRow { h, det })
        .collect();
    match a.format {
        Format::Json => print_json(out, &rows)?,
        Format::Csv => report::write_det_csv(&rows, out)?,
        Format::Text => {
            for r in &rows {
                writeln!(out, "h = {:>3}  DET_{} = {} ({:.9})", r.h, a.l, r.det, to_f64(&r.det))?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn parse_tamper(t: &str) -> Result<(usize, Rational)> {
    let bad = || Error::InvalidArgument(format!("tamper value `{t}` is not L0=NUM/DEN"));
    let (l0, v) = t.split_once('=').ok_or_else(bad)?;
    let l0 = l0.trim().parse().map_err(|_| bad())?;
    let v: Rational = v.trim().parse().map_err(|_| bad())?;
    Ok((l0, v))
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let tamper = a.tamper.as_deref().map(parse_tamper).transpose()?;
    let tables = |g: Golden| -> Result<DensityTable> {
        let t = if a.reference {
            golden::reference_table(g)?
        } else {
            a.estimator.table(&g.substitution())?
        };
        Ok(match &tamper {
            Some((l0, v)) => t.tampered(*l0, v.clone()),
            None => t,
        })
    };
    let checks = golden::verify_all(a.filter.as_deref(), tables);
    let failed = checks.iter().filter(|c| c.failed()).count();
    match a.format {
        Format::Json => print_json(out, &json!({ "checks": checks, "failed": failed }))?,
        _ => {
            for c in &checks {
                writeln!(out, "{c}")?;
            }
            writeln!(out, "{} checks, {failed} failed", checks.len())?;
        }
    }
    Ok(if failed > 0 { EXIT_VERIFY } else { EXIT_OK })
}
