//! Command-line front end.
//!
//! Configuration files are flat text with `[measure]`, `[grid]`, `[phi]` and
//! `[run]` sections, `key = value` lines and whitespace-separated arrays:
//!
//! ```text
//! [measure]
//! kind = atoms          # atoms | gamma | table
//! locations = -1 1
//! weights = 0.5 0.5
//!
//! [grid]
//! weights = 2
//!
//! [phi]
//! values = 1
//!
//! [run]
//! truncation = 6
//! moments = 6
//! tolerance = 1e-8
//! ```
//!
//! `kind = gamma` takes `nodes = M`; `kind = table` takes recurrence
//! coefficients `a = …`, `b = …` (from `b_1`) and `norm0`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration or
//! validation error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fock::{level_inner_product, BlockLayout, BlockTensor, FockSpace, MultiIndex};
use crate::jacobi::{self, OperatorKind};
use crate::levy_moments::{field_moments, ChaosOracle, CumulantModel};
use crate::measures::{gauss_laguerre_gamma, GridSpace, JumpMeasure, TestFunction};
use crate::meixner::{detect, fit_pattern};
use crate::orthopoly::{stieltjes, stieltjes_exhausting, RecurrenceTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

const DEFAULT_TOLERANCE: f64 = 1e-8;
const DEFAULT_CLASSIFY_DEPTH: usize = 9;

#[derive(Debug, Parser)]
#[command(
    name = "levy-jacobi",
    version,
    about = "Jacobi fields of Lévy processes on a truncated Fock space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Configuration file.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Tolerance, overriding `[run] tolerance`.
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Append a single-line JSON block to the report.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Creation,
    Neutral,
    Annihilation,
    Full,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the recurrence table `n, a_n, b_n, ‖P_n‖²`.
    Recurrence(Common),
    /// Compare vacuum moments of the field with cumulant moments.
    VerifyMoments {
        #[command(flatten)]
        common: Common,
        /// Multiply `b_1` by `1 + X` before assembly.
        #[arg(long, value_name = "X", allow_hyphen_values = true)]
        fault_b1: Option<f64>,
    },
    /// Detect and classify the Meixner pattern of the recurrence.
    Classify(Common),
    /// Write the sparse operator matrix.
    ExportOperator {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "full")]
        kind: KindArg,
    },
    /// Compare the block inner product with the Gram–Schmidt oracle.
    OracleCheck(Common),
}

/// Jump measure part of a configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    Atoms(JumpMeasure),
    Gamma { nodes: usize },
    Table(RecurrenceTable),
}

/// Parsed configuration file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub measure: MeasureSpec,
    pub grid: Option<GridSpace>,
    pub phi: Option<Vec<f64>>,
    pub depth: Option<usize>,
    pub truncation: Option<usize>,
    pub moments: Option<usize>,
    pub oracle_level: Option<usize>,
    pub tolerance: f64,
    pub fault_b1: Option<f64>,
}

type Sections = BTreeMap<String, BTreeMap<String, (usize, String)>>;

fn parse_sections(text: &str) -> Result<Sections> {
    let mut sections: Sections = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim();
            if !matches!(name, "measure" | "grid" | "phi" | "run") {
                return Err(Error::Config(format!("line {line_no}: unknown section [{name}]")));
            }
            if sections.contains_key(name) {
                return Err(Error::Config(format!("line {line_no}: duplicate section [{name}]")));
            }
            sections.insert(name.to_string(), BTreeMap::new());
            current = Some(name.to_string());
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {line_no}: expected `key = value`")))?;
        let section = current
            .as_ref()
            .ok_or_else(|| Error::Config(format!("line {line_no}: key outside of any section")))?;
        let entries = sections.get_mut(section).expect("section exists");
        let key = key.trim().to_string();
        if entries
            .insert(key.clone(), (line_no, value.trim().to_string()))
            .is_some()
        {
            return Err(Error::Config(format!(
                "line {line_no}: duplicate key `{key}` in [{section}]"
            )));
        }
    }
    Ok(sections)
}

struct Section<'a> {
    name: &'a str,
    entries: BTreeMap<String, (usize, String)>,
}

impl<'a> Section<'a> {
    fn take(sections: &mut Sections, name: &'a str) -> Option<Self> {
        sections.remove(name).map(|entries| Self { name, entries })
    }

    fn raw(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.remove(key)
    }

    fn numbers(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some((line, v)) = self.raw(key) else {
            return Ok(None);
        };
        v.split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::Config(format!("line {line}: `{t}` in [{}] {key} is not a number", self.name)))
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    fn number(&mut self, key: &str) -> Result<Option<f64>> {
        let name = self.name;
        match self.numbers(key)? {
            None => Ok(None),
            Some(v) if v.len() == 1 => Ok(Some(v[0])),
            Some(_) => Err(Error::Config(format!("[{name}] {key} must be a single number"))),
        }
    }

    fn count(&mut self, key: &str) -> Result<Option<usize>> {
        let Some((line, v)) = self.raw(key) else {
            return Ok(None);
        };
        v.parse::<usize>().map(Some).map_err(|_| {
            Error::Config(format!(
                "line {line}: [{}] {key} must be a nonnegative integer",
                self.name
            ))
        })
    }

    fn require<T>(&self, key: &str, v: Option<T>) -> Result<T> {
        v.ok_or_else(|| Error::Config(format!("[{}] is missing `{key}`", self.name)))
    }

    fn finish(self) -> Result<()> {
        match self.entries.into_iter().next() {
            None => Ok(()),
            Some((k, (line, _))) => Err(Error::Config(format!(
                "line {line}: unknown key `{k}` in [{}]",
                self.name
            ))),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections = parse_sections(text)?;

        let mut m =
            Section::take(&mut sections, "measure").ok_or_else(|| Error::Config("missing [measure] section".into()))?;
        let kind = m.raw("kind").map(|(_, v)| v).unwrap_or_else(|| "atoms".into());
        let measure = match kind.as_str() {
            "atoms" => {
                let locations = m.numbers("locations")?;
                let locations = m.require("locations", locations)?;
                let weights = m.numbers("weights")?;
                let weights = m.require("weights", weights)?;
                if locations.len() != weights.len() {
                    return Err(Error::Config(format!(
                        "[measure] has {} locations but {} weights",
                        locations.len(),
                        weights.len()
                    )));
                }
                MeasureSpec::Atoms(JumpMeasure::new(locations.into_iter().zip(weights))?)
            }
            "gamma" => {
                let nodes = m.count("nodes")?;
                MeasureSpec::Gamma {
                    nodes: m.require("nodes", nodes)?,
                }
            }
            "table" => {
                let a = m.numbers("a")?;
                let a = m.require("a", a)?;
                let b = m.numbers("b")?.unwrap_or_default();
                let norm0 = m.number("norm0")?.unwrap_or(1.0);
                MeasureSpec::Table(RecurrenceTable::from_coefficients(a, b, norm0)?)
            }
            other => return Err(Error::Config(format!("[measure] unknown kind `{other}`"))),
        };
        m.finish()?;

        let grid = match Section::take(&mut sections, "grid") {
            None => None,
            Some(mut g) => {
                let w = g.numbers("weights")?;
                let w = g.require("weights", w)?;
                g.finish()?;
                Some(GridSpace::new(w)?)
            }
        };
        let phi = match Section::take(&mut sections, "phi") {
            None => None,
            Some(mut p) => {
                let v = p.numbers("values")?;
                let v = p.require("values", v)?;
                p.finish()?;
                Some(v)
            }
        };

        let mut cfg = RunConfig {
            measure,
            grid,
            phi,
            depth: None,
            truncation: None,
            moments: None,
            oracle_level: None,
            tolerance: DEFAULT_TOLERANCE,
            fault_b1: None,
        };
        if let Some(mut r) = Section::take(&mut sections, "run") {
            cfg.depth = r.count("depth")?;
            cfg.truncation = r.count("truncation")?;
            cfg.moments = r.count("moments")?;
            cfg.oracle_level = r.count("oracle_level")?;
            cfg.fault_b1 = r.number("fault_b1")?;
            if let Some(t) = r.number("tolerance")? {
                cfg.tolerance = t;
            }
            r.finish()?;
        }
        cfg.check_tolerance()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn check_tolerance(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Config(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }

    /// The jump measure, when the configuration provides one.
    pub fn jump_measure(&self) -> Result<Option<JumpMeasure>> {
        match &self.measure {
            MeasureSpec::Atoms(m) => Ok(Some(m.clone())),
            MeasureSpec::Gamma { nodes } => gauss_laguerre_gamma(*nodes).map(Some),
            MeasureSpec::Table(_) => Ok(None),
        }
    }

    fn require_measure(&self, command: &str) -> Result<JumpMeasure> {
        self.jump_measure()?
            .ok_or_else(|| Error::Config(format!("{command} needs a jump measure (kind = atoms or gamma)")))
    }

    fn require_grid(&self) -> Result<&GridSpace> {
        self.grid
            .as_ref()
            .ok_or_else(|| Error::Config("missing [grid] section".into()))
    }

    fn require_phi(&self, grid: &GridSpace) -> Result<TestFunction> {
        let v = self
            .phi
            .as_ref()
            .ok_or_else(|| Error::Config("missing [phi] section".into()))?;
        TestFunction::new(grid, v.clone())
    }

    /// Table of exactly the configured depth; atom counts bound the depth.
    fn strict_table(&self, depth: usize) -> Result<RecurrenceTable> {
        match &self.measure {
            MeasureSpec::Table(t) => {
                if t.depth() < depth {
                    return Err(Error::TableTooShallow {
                        needed: depth,
                        depth: t.depth(),
                    });
                }
                Ok(t.clone())
            }
            _ => stieltjes(&self.jump_measure()?.expect("measure kinds carry a measure"), depth),
        }
    }
}

struct Report {
    text: String,
    json: Value,
    failure: Option<String>,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn resolve_tolerance(cfg: &RunConfig, common: &Common) -> Result<f64> {
    let tol = common.tol.unwrap_or(cfg.tolerance);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    Ok(tol)
}

fn cmd_recurrence(cfg: &RunConfig) -> Result<Report> {
    let depth = match (&cfg.measure, cfg.depth.or(cfg.truncation)) {
        (_, Some(d)) => d,
        (MeasureSpec::Table(t), None) => t.depth(),
        _ => return Err(Error::Config("[run] needs `depth` for the recurrence".into())),
    };
    if depth == 0 {
        return Err(Error::Config("recurrence depth must be positive".into()));
    }
    let t = cfg.strict_table(depth)?;
    let mut text = String::new();
    writeln!(text, "command recurrence").unwrap();
    writeln!(text, "depth {depth}").unwrap();
    writeln!(text, "{:>4} {:>24} {:>24} {:>24}", "n", "a_n", "b_n", "norm_sq_n").unwrap();
    let mut rows = Vec::new();
    for n in 0..depth {
        let b = if n == 0 { "-".to_string() } else { num(t.b(n)) };
        writeln!(text, "{:>4} {:>24} {:>24} {:>24}", n, num(t.a(n)), b, num(t.norm_sq(n))).unwrap();
        rows.push(json!({
            "n": n,
            "a": t.a(n),
            "b": if n == 0 { Value::Null } else { json!(t.b(n)) },
            "norm_sq": t.norm_sq(n),
        }));
    }
    Ok(Report {
        text,
        json: json!({ "command": "recurrence", "depth": depth, "rows": rows }),
        failure: None,
    })
}

fn cmd_verify_moments(cfg: &RunConfig, tol: f64, fault_b1: Option<f64>) -> Result<Report> {
    let measure = cfg.require_measure("verify-moments")?;
    let grid = cfg.require_grid()?.clone();
    let phi = cfg.require_phi(&grid)?;
    let k_max = cfg
        .moments
        .ok_or_else(|| Error::Config("[run] needs `moments`".into()))?;
    let truncation = cfg.truncation.unwrap_or(k_max);
    if truncation < k_max {
        return Err(Error::Config(format!(
            "truncation {truncation} is below the highest requested moment {k_max}"
        )));
    }
    let fault = fault_b1.or(cfg.fault_b1);
    let mut table = stieltjes_exhausting(&measure, truncation.max(1))?;
    if let Some(rel) = fault {
        table = table.with_perturbed_b(1, rel)?;
    }
    let space = FockSpace::new(grid.clone(), table, truncation)?;
    let op = jacobi::full(&phi, &space)?;
    let got = jacobi::vacuum_moments(&op, k_max)?;
    let mut expect = vec![1.0];
    expect.extend(field_moments(&CumulantModel::new(measure, grid), &phi, k_max as u32)?);

    let mut text = String::new();
    writeln!(text, "command verify-moments").unwrap();
    writeln!(text, "truncation {truncation}").unwrap();
    writeln!(text, "tolerance {}", num(tol)).unwrap();
    writeln!(text, "fault_b1 {}", fault.map(num).unwrap_or_else(|| "none".into())).unwrap();
    writeln!(
        text,
        "{:>3} {:>24} {:>24} {:>24} {:>6}",
        "k", "operator", "oracle", "rel_error", "status"
    )
    .unwrap();
    let mut failed = Vec::new();
    let mut rows = Vec::new();
    for k in 0..=k_max {
        let rel = (got[k] - expect[k]).abs() / expect[k].abs().max(1.0);
        let ok = rel <= tol;
        if !ok {
            failed.push(k);
        }
        let status = if ok { "pass" } else { "FAIL" };
        writeln!(
            text,
            "{:>3} {:>24} {:>24} {:>24} {:>6}",
            k,
            num(got[k]),
            num(expect[k]),
            num(rel),
            status
        )
        .unwrap();
        rows.push(json!({ "k": k, "operator": got[k], "oracle": expect[k], "rel_error": rel, "pass": ok }));
    }
    writeln!(text, "result {}", if failed.is_empty() { "pass" } else { "fail" }).unwrap();
    let failure = (!failed.is_empty()).then(|| {
        let ks: Vec<String> = failed.iter().map(ToString::to_string).collect();
        format!("moment mismatch beyond tolerance at k = {}", ks.join(", "))
    });
    let json = json!({
        "command": "verify-moments",
        "truncation": truncation,
        "tolerance": tol,
        "fault_b1": fault,
        "rows": rows,
        "pass": failed.is_empty(),
    });
    Ok(Report { text, json, failure })
}

fn cmd_classify(cfg: &RunConfig, tol: f64) -> Result<Report> {
    let depth = match (&cfg.measure, cfg.depth) {
        (_, Some(d)) => d,
        (MeasureSpec::Table(t), None) => t.depth(),
        _ => DEFAULT_CLASSIFY_DEPTH,
    };
    if depth < 3 {
        return Err(Error::InsufficientDepth { depth });
    }
    let table = cfg.strict_table(depth)?;
    let fit = fit_pattern(&table)?;
    let detected = detect(&table, tol)?;
    let mut text = String::new();
    writeln!(text, "command classify").unwrap();
    writeln!(text, "depth {}", fit.fitted_depth).unwrap();
    writeln!(text, "lambda {}", num(fit.lambda)).unwrap();
    writeln!(text, "kappa {}", num(fit.kappa)).unwrap();
    writeln!(text, "ratio {}", num(fit.lambda * fit.lambda / (4.0 * fit.kappa))).unwrap();
    let class = match &detected {
        Some(p) => p.class.to_string(),
        None => "not in Meixner class".to_string(),
    };
    writeln!(text, "class {class}").unwrap();
    writeln!(text, "a_residual {}", num(fit.a_residual)).unwrap();
    writeln!(text, "b_residual {}", num(fit.b_residual)).unwrap();
    writeln!(text, "scale {}", num(fit.scale)).unwrap();
    let json = json!({
        "command": "classify",
        "depth": fit.fitted_depth,
        "lambda": fit.lambda,
        "kappa": fit.kappa,
        "ratio": fit.lambda * fit.lambda / (4.0 * fit.kappa),
        "class": detected.as_ref().map(|p| p.class.to_string()),
        "a_residual": fit.a_residual,
        "b_residual": fit.b_residual,
        "scale": fit.scale,
    });
    Ok(Report {
        text,
        json,
        failure: None,
    })
}

fn cmd_export(cfg: &RunConfig, kind: KindArg) -> Result<Report> {
    let measure = cfg.require_measure("export-operator")?;
    let grid = cfg.require_grid()?.clone();
    let phi = cfg.require_phi(&grid)?;
    let truncation = cfg
        .truncation
        .ok_or_else(|| Error::Config("[run] needs `truncation`".into()))?;
    let table = stieltjes_exhausting(&measure, truncation.max(1))?;
    let space = FockSpace::new(grid, table, truncation)?;
    let op = match kind {
        KindArg::Creation => jacobi::creation(&phi, &space)?,
        KindArg::Neutral => jacobi::neutral(&phi, &space)?,
        KindArg::Annihilation => jacobi::annihilation(&phi, &space)?,
        KindArg::Full => jacobi::full(&phi, &space)?,
    };
    let kind: OperatorKind = op.kind();
    let json = json!({
        "command": "export-operator",
        "kind": kind.to_string(),
        "truncation": truncation,
        "dimension": space.dim(),
        "nonzeros": op.nnz(),
    });
    Ok(Report {
        text: op.export(&measure),
        json,
        failure: None,
    })
}

fn cmd_oracle_check(cfg: &RunConfig, tol: f64) -> Result<Report> {
    let measure = cfg.require_measure("oracle-check")?;
    let grid = cfg.require_grid()?.clone();
    let level = cfg.oracle_level.unwrap_or(2);
    let table = stieltjes_exhausting(&measure, level.max(1))?;
    let model = CumulantModel::new(measure, grid.clone());
    let mut text = String::new();
    writeln!(text, "command oracle-check").unwrap();
    writeln!(text, "tolerance {}", num(tol)).unwrap();
    writeln!(text, "{:>3} {:>6} {:>24}", "n", "pairs", "max_rel_error").unwrap();
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for n in 0..=level {
        let mut oracle = ChaosOracle::new(&model, n)?;
        let count = BlockLayout::new(MultiIndex::singletons(n), grid.len()).len();
        let basis: Vec<BlockTensor> = (0..count)
            .map(|i| BlockTensor::symmetric_basis(n, grid.len(), i))
            .collect();
        let diag = basis
            .iter()
            .map(|f| oracle.inner_product(f, f))
            .collect::<Result<Vec<_>>>()?;
        let mut worst = 0.0f64;
        for i in 0..count {
            for j in 0..count {
                let o = oracle.inner_product(&basis[i], &basis[j])?;
                let b = level_inner_product(&basis[i], &basis[j], &grid, &table)?;
                let scale = (diag[i] * diag[j]).sqrt().max(f64::MIN_POSITIVE);
                worst = worst.max((o - b).abs() / scale);
            }
        }
        if worst > tol {
            failed.push(n);
        }
        writeln!(text, "{:>3} {:>6} {:>24}", n, count * count, num(worst)).unwrap();
        rows.push(json!({ "n": n, "pairs": count * count, "max_rel_error": worst, "pass": worst <= tol }));
    }
    writeln!(text, "result {}", if failed.is_empty() { "pass" } else { "fail" }).unwrap();
    let failure = (!failed.is_empty()).then(|| {
        let ns: Vec<String> = failed.iter().map(ToString::to_string).collect();
        format!("oracle mismatch beyond tolerance at level n = {}", ns.join(", "))
    });
    let json = json!({ "command": "oracle-check", "tolerance": tol, "levels": rows, "pass": failed.is_empty() });
    Ok(Report { text, json, failure })
}

fn run(cli: Cli) -> std::result::Result<(Report, Common), (Error, Option<Common>)> {
    let (common, result) = match cli.command {
        Command::Recurrence(common) => {
            let r = RunConfig::from_path(&common.config).and_then(|c| cmd_recurrence(&c));
            (common, r)
        }
        Command::VerifyMoments { common, fault_b1 } => {
            let r = RunConfig::from_path(&common.config)
                .and_then(|c| resolve_tolerance(&c, &common).and_then(|t| cmd_verify_moments(&c, t, fault_b1)));
            (common, r)
        }
        Command::Classify(common) => {
            let r = RunConfig::from_path(&common.config)
                .and_then(|c| resolve_tolerance(&c, &common).and_then(|t| cmd_classify(&c, t)));
            (common, r)
        }
        Command::ExportOperator { common, kind } => {
            let r = RunConfig::from_path(&common.config).and_then(|c| cmd_export(&c, kind));
            (common, r)
        }
        Command::OracleCheck(common) => {
            let r = RunConfig::from_path(&common.config)
                .and_then(|c| resolve_tolerance(&c, &common).and_then(|t| cmd_oracle_check(&c, t)));
            (common, r)
        }
    };
    match result {
        Ok(report) => Ok((report, common)),
        Err(e) => Err((e, Some(common))),
    }
}

fn emit(report: &Report, common: &Common) -> std::io::Result<()> {
    let mut out = report.text.clone();
    if common.json {
        out.push_str("json ");
        out.push_str(&report.json.to_string());
        out.push('\n');
    }
    match &common.out {
        Some(path) => std::fs::write(path, out),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(out.as_bytes())
        }
    }
}

/// Runs the CLI on `args` (including the program name); returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok((report, common)) => {
            if let Err(e) = emit(&report, &common) {
                eprintln!("error: cannot write report: {e}");
                return EXIT_CONFIG;
            }
            match &report.failure {
                Some(msg) => {
                    eprintln!("verification failed: {msg}");
                    EXIT_VERIFICATION
                }
                None => EXIT_OK,
            }
        }
        Err((e, _)) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}
