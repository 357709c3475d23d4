//! Argument parsing and dispatch for the `tautrec` binary.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use tautrec_core::exact_arith::format_rational;
use tautrec_core::oracle::OracleTable;
use tautrec_core::pixton::pixton_class;
use tautrec_core::trr;
use tautrec_core::witten::{IntersectionTable, Recursion};
use tautrec_core::{Engine, Error};

use crate::format;
use crate::store::{self, StoreError};
use crate::verify::{self, Check};

pub const CACHE_ENV: &str = "TAUTREC_CACHE";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "tautrec",
    version,
    about = "Tautological relations and ψ-intersection numbers on moduli of curves"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate stable graphs of genus g with n legs.
    Graphs(GraphsArgs),
    /// Pixton's class D^d_{g,n}(a_2, ..., a_n) as a formal sum.
    Dr(DrArgs),
    /// Topological recursion relation for a ψ-monomial of degree g.
    Trr(TrrArgs),
    /// ψ-intersection number by the recursion.
    Intersect(IntersectArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct GraphsArgs {
    #[arg(long)]
    pub genus: u32,
    #[arg(long)]
    pub markings: usize,
    /// Only graphs with at most this many edges.
    #[arg(long)]
    pub max_edges: Option<usize>,
    /// Print the number of graphs only.
    #[arg(long)]
    pub count_only: bool,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct DrArgs {
    #[arg(long)]
    pub genus: u32,
    #[arg(long)]
    pub markings: usize,
    #[arg(long)]
    pub degree: u32,
    /// Weights a_2, ..., a_n; a_1 is minus their sum.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Vec<i64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Show {
    Bouquet,
    RationalTails,
    Full,
}

#[derive(Debug, Args)]
pub struct TrrArgs {
    #[arg(long)]
    pub genus: u32,
    /// Exponents k_1, ..., k_n with sum g.
    #[arg(long, value_delimiter = ',', required = true)]
    pub psi: Vec<u32>,
    #[arg(long, value_enum, default_value_t = Show::Full)]
    pub show: Show,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct IntersectArgs {
    #[arg(long)]
    pub genus: u32,
    /// Exponents k_1, ..., k_n with sum 3g - 3 + n.
    #[arg(long, value_delimiter = ',', required = true)]
    pub psi: Vec<u32>,
    /// Table file; defaults to $TAUTREC_CACHE when set.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Compare with the classical recursion; exit 1 on mismatch.
    #[arg(long)]
    pub oracle_check: bool,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Recursion against the classical oracle.
    Dvv,
    /// One-loop and bouquet identities.
    Bouquet,
    /// Kernel routes and finite identities.
    Kernel,
    /// Symmetry, string and dilaton on a table.
    Table,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Largest 3g - 3 + n for the dvv and table suites.
    #[arg(long, default_value_t = 4)]
    pub max_dim: i64,
    #[arg(long, default_value_t = 2)]
    pub max_genus: u32,
    /// Table file to read and update; never written unless given.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

enum Failure {
    Invalid(String),
    Failed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_)
            | Error::Unstable { .. }
            | Error::DimensionMismatch { .. } => Failure::Invalid(e.to_string()),
            _ => Failure::Failed(e.to_string()),
        }
    }
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Io { .. } => Failure::Failed(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Failed(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

/// Parses `args` (program name first) and runs the command. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return if code == 0 { EXIT_OK } else { EXIT_INVALID };
        }
    };
    let env_cache = std::env::var_os(CACHE_ENV).map(PathBuf::from);
    let res = match cli.command {
        Command::Graphs(a) => graphs(&a, out),
        Command::Dr(a) => dr(&a, out),
        Command::Trr(a) => trr_cmd(&a, out),
        Command::Intersect(a) => intersect(&a, env_cache, out),
        Command::Verify(a) => verify_cmd(&a, out, err),
    };
    match res {
        Ok(code) => code,
        Err(Failure::Invalid(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_INVALID
        }
        Err(Failure::Failed(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_FAILED
        }
    }
}

fn print_json(out: &mut dyn Write, v: &Value) -> Result<(), Failure> {
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(v).expect("json renders")
    )?;
    Ok(())
}

fn graphs(a: &GraphsArgs, out: &mut dyn Write) -> Outcome {
    let mut engine = Engine::new();
    let list = engine
        .graphs
        .enumerate(a.genus, a.markings, a.max_edges.unwrap_or(usize::MAX))?;
    if a.count_only {
        match a.format {
            Format::Json => print_json(
                out,
                &json!({"schema": format::GRAPHS_SCHEMA, "g": a.genus, "n": a.markings, "count": list.len()}),
            )?,
            _ => writeln!(out, "{}", list.len())?,
        }
        return Ok(EXIT_OK);
    }
    let with_aut: Vec<_> = list
        .into_iter()
        .map(|gr| {
            let k = engine.graphs.automorphism_order(&gr);
            (gr, k)
        })
        .collect();
    match a.format {
        Format::Json => print_json(out, &format::graphs(a.genus, a.markings, &with_aut))?,
        Format::Csv => {
            writeln!(out, "graph,edges,automorphisms")?;
            for (gr, k) in &with_aut {
                writeln!(out, "{},{},{}", gr.to_text(), gr.num_edges(), k)?;
            }
        }
        Format::Table => {
            for (gr, k) in &with_aut {
                writeln!(out, "{}\t|Aut| = {}", gr.to_text(), k)?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn dr(a: &DrArgs, out: &mut dyn Write) -> Outcome {
    if a.markings == 0 || a.a.len() + 1 != a.markings {
        return Err(Failure::Invalid(format!(
            "--a needs {} weights for {} markings, got {}",
            a.markings.saturating_sub(1),
            a.markings,
            a.a.len()
        )));
    }
    let mut engine = Engine::new();
    let sum = pixton_class(
        &mut engine.kernel,
        &mut engine.graphs,
        a.genus,
        a.markings,
        &a.a,
        a.degree,
    )?;
    match a.format {
        Format::Json => print_json(out, &format::formal_sum(&sum))?,
        Format::Csv => write!(out, "{}", format::formal_sum_csv(&sum))?,
        Format::Table => write!(out, "{}", format::formal_sum_table(&sum))?,
    }
    Ok(EXIT_OK)
}

fn trr_cmd(a: &TrrArgs, out: &mut dyn Write) -> Outcome {
    let mut engine = Engine::new();
    let rel = trr::trr_for_monomial(&mut engine, a.genus, &a.psi)?;
    let bouquet = trr::bouquet_coefficient(&mut engine, &rel)?;
    let tails = if a.genus >= 1 {
        Some(trr::rational_tail_coefficients(&mut engine, &rel)?)
    } else {
        None
    };
    let mut extra = serde_json::Map::new();
    if matches!(a.show, Show::Bouquet | Show::Full) {
        extra.insert("bouquet".into(), format::rational(&bouquet));
    }
    if matches!(a.show, Show::RationalTails | Show::Full) {
        extra.insert(
            "rational_tails".into(),
            tails.as_ref().map(format::tails).unwrap_or(Value::Null),
        );
    }
    if a.show == Show::Full {
        extra.insert("boundary".into(), format::relation_boundary(&rel));
    }
    match a.format {
        Format::Json => print_json(out, &format::relation(&rel, Value::Object(extra)))?,
        Format::Csv => {
            writeln!(out, "key,value")?;
            if let Some(v) = extra.get("bouquet") {
                writeln!(out, "bouquet,{}", v.as_str().unwrap_or_default())?;
            }
            if matches!(a.show, Show::RationalTails | Show::Full) {
                if let Some(t) = &tails {
                    if let Some(x) = &t.a0 {
                        writeln!(out, "a0,{}", format_rational(x))?;
                    }
                    for ((i, j), v) in &t.aij {
                        writeln!(out, "a{}{},{}", i + 1, j + 1, format_rational(v))?;
                    }
                    writeln!(out, "tail_sum,{}", format_rational(&t.sum()))?;
                }
            }
            if a.show == Show::Full {
                write!(out, "{}", format::formal_sum_csv(&rel.boundary))?;
            }
        }
        Format::Table => {
            writeln!(out, "leading\t{:?}", rel.leading)?;
            if matches!(a.show, Show::Bouquet | Show::Full) {
                writeln!(out, "bouquet\t{}", format_rational(&bouquet))?;
            }
            if matches!(a.show, Show::RationalTails | Show::Full) {
                if let Some(t) = &tails {
                    match &t.a0 {
                        Some(x) => writeln!(out, "a0\t{}", format_rational(x))?,
                        None => writeln!(out, "a0\tabsent")?,
                    }
                    for ((i, j), v) in &t.aij {
                        writeln!(out, "a{},{}\t{}", i + 1, j + 1, format_rational(v))?;
                    }
                    writeln!(out, "tail sum\t{}", format_rational(&t.sum()))?;
                }
            }
            if a.show == Show::Full {
                writeln!(out, "boundary")?;
                write!(out, "{}", format::formal_sum_table(&rel.boundary))?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn intersect(a: &IntersectArgs, env_cache: Option<PathBuf>, out: &mut dyn Write) -> Outcome {
    let cache = a.cache.clone().or(env_cache);
    let mut table = match &cache {
        Some(p) => store::load_table(p)?,
        None => IntersectionTable::new(),
    };
    let mut engine = Engine::new();
    let value = Recursion::new(&mut engine, &mut table).intersection_number(a.genus, &a.psi)?;
    if let Some(p) = &cache {
        if table.is_dirty() {
            store::save_table(&table, p)?;
        }
    }
    match a.format {
        Format::Json => print_json(out, &format::intersection(a.genus, &a.psi, &value))?,
        Format::Csv => {
            let k: Vec<String> = a.psi.iter().map(|x| x.to_string()).collect();
            writeln!(
                out,
                "g,k,value\n{},{},{}",
                a.genus,
                k.join(" "),
                format_rational(&value)
            )?;
        }
        Format::Table => writeln!(out, "{}", format_rational(&value))?,
    }
    if a.oracle_check {
        let want = OracleTable::new().value(a.genus, &a.psi)?;
        if want != value {
            return Err(Failure::Failed(format!(
                "oracle gives {}",
                format_rational(&want)
            )));
        }
    }
    Ok(EXIT_OK)
}

fn verify_cmd(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let mut engine = Engine::new();
    let mut table = match &a.cache {
        Some(p) => store::load_table(p)?,
        None => IntersectionTable::new(),
    };
    writeln!(err, "running {:?} suite", a.suite)?;
    let checks: Vec<Check> = match a.suite {
        Suite::Dvv => verify::dvv(&mut engine, &mut table, a.max_genus, a.max_dim)?,
        Suite::Bouquet => verify::bouquet(&mut engine, a.max_genus, 3)?,
        Suite::Kernel => verify::kernel(&mut engine, a.max_genus.min(3))?,
        Suite::Table => {
            verify::dvv(&mut engine, &mut table, a.max_genus, a.max_dim)?;
            verify::table_consistency(&mut engine, &table)?
        }
    };
    if let Some(p) = &a.cache {
        if table.is_dirty() {
            store::save_table(&table, p)?;
        }
    }
    let passed = verify::all_passed(&checks);
    match a.format {
        Format::Json => {
            let list: Vec<Value> = checks
                .iter()
                .map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail}))
                .collect();
            print_json(
                out,
                &json!({"schema": format::VERIFY_SCHEMA, "suite": format!("{:?}", a.suite).to_lowercase(), "passed": passed, "checks": list}),
            )?;
        }
        Format::Csv => {
            writeln!(out, "name,passed,detail")?;
            for c in &checks {
                writeln!(out, "\"{}\",{},\"{}\"", c.name, c.passed, c.detail)?;
            }
        }
        Format::Table => {
            for c in &checks {
                let tag = if c.passed { "ok  " } else { "FAIL" };
                if c.detail.is_empty() {
                    writeln!(out, "{tag} {}", c.name)?;
                } else {
                    writeln!(out, "{tag} {}  ({})", c.name, c.detail)?;
                }
            }
            let bad = checks.iter().filter(|c| !c.passed).count();
            writeln!(out, "{} checks, {} failed", checks.len(), bad)?;
        }
    }
    Ok(if passed { EXIT_OK } else { EXIT_FAILED })
}
