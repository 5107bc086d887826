//! The `gext` command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::cocycle::TwoCocycle;
use crate::doc::{bimodule_from_doc, element_from_doc, laurent_from_doc, parse_document, parse_modes, to_canonical, Document};
use crate::error::{Error, Result};
use crate::extension::CircleExtension;
use crate::fixtures::{self, FIXTURE_DIR_VAR, NAMES};
use crate::random::rng;
use crate::report::{Check, Report};
use crate::suite;
use crate::algebra::TwistedAlgebra;

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_MODES: &str = "-1..1";
pub const DEFAULT_POWER: i64 = 1;

/// Cochains of order `m` are enumerated when `m^arrows` is at most this.
const SEARCH_LIMIT: u64 = 100_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Human,
    Machine,
}

#[derive(Debug, Parser)]
#[command(name = "gext", version, about = "Twisted groupoid algebras and their circle extensions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Clone, Debug, Default, Args)]
pub struct Options {
    /// Seed for random samples.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of random samples per check.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Mode window, `a..b`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub modes: Option<String>,
    /// Order of the cyclic subgroup of the circle.
    #[arg(long, global = true)]
    pub k: Option<u32>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Use a bundled (or fixture-directory) document instead of a path.
    #[arg(long, global = true)]
    pub fixture: Option<String>,
    /// Directory holding `<name>.json` fixtures.
    #[arg(long, global = true, env = FIXTURE_DIR_VAR)]
    pub fixture_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Input {
    /// Document to read.
    pub path: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the groupoid and cocycle axioms.
    Validate(Input),
    /// Rewrite the cocycle in normalized form.
    Normalize(Input),
    /// Write the cocycle as a coboundary.
    Trivialize(Input),
    /// Norms and regular representations in a twisted algebra.
    Algebra {
        #[command(flatten)]
        input: Input,
        /// Power of the cocycle.
        #[arg(long, allow_hyphen_values = true)]
        power: Option<i64>,
    },
    /// Mode decomposition of the extension algebra.
    Decompose(Input),
    /// Compare with the finite cyclic extension.
    CyclicOracle(Input),
    /// Inner products on the principal bimodule.
    Morita(Input),
    /// Every check, on one document or on all fixtures.
    VerifyAll(Input),
}

/// Run parameters after combining flags, document parameters and defaults.
#[derive(Clone, Debug)]
pub struct Settings {
    pub seed: u64,
    pub samples: usize,
    pub modes: std::ops::RangeInclusive<i64>,
    pub k: Option<u32>,
    pub power: i64,
}

impl Settings {
    pub fn resolve(options: &Options, doc: &Document, power: Option<i64>) -> Result<Self> {
        let modes = options
            .modes
            .as_deref()
            .or(doc.params.modes.as_deref())
            .unwrap_or(DEFAULT_MODES);
        Ok(Settings {
            seed: options.seed.or(doc.params.seed).unwrap_or(DEFAULT_SEED),
            samples: options.samples.or(doc.params.samples).unwrap_or(DEFAULT_SAMPLES),
            modes: parse_modes(modes)?,
            k: options.k.or(doc.params.k),
            power: power.or(doc.params.power).unwrap_or(DEFAULT_POWER),
        })
    }

    fn stamp(&self, report: &mut Report) {
        report.seed = Some(self.seed);
        report.samples = Some(self.samples);
    }
}

fn require_valid(doc: &Document) -> Result<()> {
    if doc.groupoid_report.is_empty() {
        return Ok(());
    }
    let v = &doc.groupoid_report.violations[0];
    Err(Error::InvalidGroupoid(format!(
        "{} violation(s), first: {} at {:?}",
        doc.groupoid_report.len(),
        v.check,
        v.witnesses
    )))
}

fn cocycle(doc: &Document) -> Result<Arc<TwoCocycle>> {
    require_valid(doc)?;
    let w = match &doc.cocycle {
        Some(w) => w.clone(),
        None => Arc::new(TwoCocycle::trivial(doc.groupoid.clone())),
    };
    if !w.identity_checked() {
        return Err(Error::Precondition("the cocycle identity fails; run validate for witnesses".into()));
    }
    suite::normalized_cocycle(&doc.groupoid, Some(&w))
}

fn need_k(settings: &Settings) -> Result<u32> {
    settings
        .k
        .ok_or_else(|| Error::InvalidArgument("this command needs --k or params.k".into()))
}

pub fn cmd_validate(doc: &Document, subject: &str) -> Report {
    let mut report = Report::new("validate", subject);
    report.extend(suite::validate_checks(&doc.groupoid, &doc.groupoid_report, doc.cocycle.as_deref()));
    if doc.unchecked_cocycle.is_some() {
        report.push(Check::new("cocycle_identity", false).with("reason", "groupoid axioms fail"));
    }
    report
}

pub fn cmd_normalize(doc: &Document, subject: &str) -> Result<Report> {
    require_valid(doc)?;
    let w = doc
        .cocycle
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("the document has no cocycle".into()))?;
    let (checks, wn) = suite::normalize_checks(w)?;
    let mut report = Report::new("normalize", subject);
    report.extend(checks);
    let rewritten = Document::new(doc.groupoid.clone(), Some(Arc::new(wn)), doc.params.clone());
    report.output = Some(serde_json::from_str(&to_canonical(&rewritten)).expect("canonical text is JSON"));
    Ok(report)
}

pub fn cmd_trivialize(doc: &Document, subject: &str) -> Result<Report> {
    require_valid(doc)?;
    let w = doc
        .cocycle
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("the document has no cocycle".into()))?;
    let (checks, payload) = suite::trivialize_checks(w)?;
    let mut report = Report::new("trivialize", subject);
    report.extend(checks);
    report.output = payload;
    Ok(report)
}

pub fn cmd_algebra(doc: &Document, subject: &str, settings: &Settings) -> Result<Report> {
    let w = cocycle(doc)?;
    let element = match &doc.params.element {
        Some(e) => Some(element_from_doc(&TwistedAlgebra::new(w.clone(), settings.power)?, e)?),
        None => None,
    };
    let mut r = rng(settings.seed);
    let (checks, payload) = suite::algebra_checks(&w, settings.power, element.as_ref(), &mut r, settings.samples)?;
    let mut report = Report::new("algebra", subject);
    settings.stamp(&mut report);
    report.extend(checks);
    report.output = payload;
    Ok(report)
}

pub fn cmd_decompose(doc: &Document, subject: &str, settings: &Settings) -> Result<Report> {
    let w = cocycle(doc)?;
    let element = match &doc.params.laurent {
        Some(f) => Some(laurent_from_doc(&CircleExtension::new(w.clone())?, f)?),
        None => None,
    };
    let mut r = rng(settings.seed);
    let checks = suite::decompose_checks(&w, settings.modes.clone(), element.as_ref(), &mut r, settings.samples)?;
    let mut report = Report::new("decompose", subject);
    settings.stamp(&mut report);
    report.extend(checks);
    Ok(report)
}

pub fn cmd_cyclic_oracle(doc: &Document, subject: &str, settings: &Settings) -> Result<Report> {
    let w = cocycle(doc)?;
    let mut r = rng(settings.seed);
    let checks = suite::cyclic_checks(&w, need_k(settings)?, &mut r, settings.samples)?;
    let mut report = Report::new("cyclic-oracle", subject);
    settings.stamp(&mut report);
    report.extend(checks);
    Ok(report)
}

pub fn cmd_morita(doc: &Document, subject: &str, settings: &Settings) -> Result<Report> {
    let w = cocycle(doc)?;
    let bimodule = match &doc.params.bimodule {
        Some(b) => Some(bimodule_from_doc(&doc.groupoid, b)?),
        None => None,
    };
    let mut r = rng(settings.seed);
    let checks = suite::morita_checks(&w, bimodule.as_deref(), settings.modes.clone(), &mut r, settings.samples)?;
    let mut report = Report::new("morita", subject);
    settings.stamp(&mut report);
    report.extend(checks);
    Ok(report)
}

fn prefixed(prefix: &str, checks: Vec<Check>) -> impl Iterator<Item = Check> + '_ {
    checks.into_iter().map(move |mut c| {
        c.name = format!("{prefix}/{}", c.name);
        c
    })
}

/// All checks that apply to one document.
fn document_checks(doc: &Document, settings: &Settings) -> Result<Vec<Check>> {
    let mut out = suite::validate_checks(&doc.groupoid, &doc.groupoid_report, doc.cocycle.as_deref());
    let w = cocycle(doc)?;
    let g = &doc.groupoid;
    if g.is_principal() {
        out.extend(suite::trivialize_checks(&w)?.0);
    } else {
        let witness = match w.trivialize_principal() {
            Err(Error::IsotropyObstruction { arrow }) => Some(arrow),
            _ => None,
        };
        out.push(Check::new("isotropy_obstruction", witness.is_some()).with("arrow", witness));
    }
    if let (Some(k), true) = (settings.k, w.is_exact()) {
        let order = 2 * k;
        if (order as u64).checked_pow(g.num_arrows() as u32).is_some_and(|n| n <= SEARCH_LIMIT) {
            let solved = w.solve_coboundary()?;
            let found = suite::exhaustive_coboundary_search(&w, order);
            out.push(
                Check::new("coboundary_search_agreement", solved.is_some() == !found.is_empty())
                    .with("order", order)
                    .with("is_coboundary", solved.is_some())
                    .with("solutions", found.len()),
            );
        }
    }
    let mut r = rng(settings.seed);
    out.extend(suite::algebra_checks(&w, settings.power, None, &mut r, settings.samples)?.0);
    out.extend(suite::decompose_checks(&w, settings.modes.clone(), None, &mut r, settings.samples)?);
    if let Some(k) = settings.k {
        out.extend(suite::cyclic_checks(&w, k, &mut r, settings.samples)?);
    }
    if g.is_principal() {
        out.extend(suite::morita_checks(&w, None, settings.modes.clone(), &mut r, settings.samples)?);
    }
    Ok(out)
}

/// Runs every check on the given documents, then on seeded random instances.
pub fn cmd_verify_all(docs: &[(String, Document)], subject: &str, options: &Options) -> Result<Report> {
    let seed = options.seed.unwrap_or(DEFAULT_SEED);
    let samples = options.samples.unwrap_or(DEFAULT_SAMPLES);
    let mut report = Report::new("verify-all", subject);
    report.seed = Some(seed);
    report.samples = Some(samples);
    for (name, doc) in docs {
        let settings = Settings::resolve(options, doc, None)?;
        let settings = Settings { seed, samples, ..settings };
        report.extend(prefixed(name, document_checks(doc, &settings)?));
    }
    let mut r = rng(seed);
    report.extend(prefixed("random", suite::random_checks(&mut r, samples)?));
    Ok(report)
}

fn read_document(path: &Path) -> Result<Document> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    parse_document(&text)
}

/// The input document and its display name.
fn input(options: &Options, input: &Input) -> Result<Option<(String, Document)>> {
    match (&input.path, &options.fixture) {
        (Some(_), Some(_)) => Err(Error::InvalidArgument("give a path or --fixture, not both".into())),
        (Some(p), None) => Ok(Some((p.display().to_string(), read_document(p)?))),
        (None, Some(name)) => Ok(Some((name.clone(), fixtures::load_from(options.fixture_dir.as_deref(), name)?))),
        (None, None) => Ok(None),
    }
}

fn required(options: &Options, i: &Input) -> Result<(String, Document)> {
    input(options, i)?.ok_or_else(|| Error::InvalidArgument("no input: give a path or --fixture".into()))
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Result<Report> {
    let o = &cli.options;
    match &cli.command {
        Command::Validate(i) => {
            let (s, d) = required(o, i)?;
            Ok(cmd_validate(&d, &s))
        }
        Command::Normalize(i) => {
            let (s, d) = required(o, i)?;
            cmd_normalize(&d, &s)
        }
        Command::Trivialize(i) => {
            let (s, d) = required(o, i)?;
            cmd_trivialize(&d, &s)
        }
        Command::Algebra { input, power } => {
            let (s, d) = required(o, input)?;
            cmd_algebra(&d, &s, &Settings::resolve(o, &d, *power)?)
        }
        Command::Decompose(i) => {
            let (s, d) = required(o, i)?;
            cmd_decompose(&d, &s, &Settings::resolve(o, &d, None)?)
        }
        Command::CyclicOracle(i) => {
            let (s, d) = required(o, i)?;
            cmd_cyclic_oracle(&d, &s, &Settings::resolve(o, &d, None)?)
        }
        Command::Morita(i) => {
            let (s, d) = required(o, i)?;
            cmd_morita(&d, &s, &Settings::resolve(o, &d, None)?)
        }
        Command::VerifyAll(i) => match input(o, i)? {
            Some((s, d)) => cmd_verify_all(&[(s.clone(), d)], &s, o),
            None => {
                let docs = NAMES
                    .iter()
                    .map(|n| Ok((n.to_string(), fixtures::load_from(o.fixture_dir.as_deref(), n)?)))
                    .collect::<Result<Vec<_>>>()?;
                cmd_verify_all(&docs, "fixtures", o)
            }
        },
    }
}

/// Runs the command and writes its report. Returns the exit code: 0 when
/// every check passes, 1 when one fails, 2 on an input error.
pub fn run(cli: &Cli, out: &mut impl Write, err: &mut impl Write) -> i32 {
    match execute(cli) {
        Ok(report) => {
            let text = match cli.options.format {
                Format::Human => report.to_human(),
                Format::Machine => report.to_machine(),
            };
            let _ = out.write_all(text.as_bytes());
            if report.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "gext: {e}");
            2
        }
    }
}

/// Value of a report as JSON, for callers that inspect it programmatically.
pub fn report_value(report: &Report) -> Value {
    serde_json::to_value(report).expect("reports serialize")
}
