//! Command-line experiment runner.
//!
//! Settings come from, in increasing precedence: a JSON config file
//! (`--config`), the environment (`EXCHKIT_SEED`), and command-line flags.
//! `EXCHKIT_THREADS` sizes the worker pool; reports do not depend on it.
//!
//! Exit codes: 0 every check passed, 1 a check failed, 2 invalid
//! configuration or unwritable output, 3 an exact computation exceeded the
//! enumeration limit.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinatorics::{
    check_equality_condition, decompose_product_power, law_with_replacement, law_without_replacement,
    law_without_replacement_from_empirical, tv_gap_bounds, CombinatoricsError, Urn,
};
use crate::convergence::{convergence_report, ConvergenceError, ConvergenceOptions, FamilyDocument, Verdict};
use crate::measures::Atom;
use crate::multiclass::{statistical_shadow, verify_sufficiency, MulticlassError, SystemSpecDocument, TestFunction};
use crate::rational::{self, Rational};
use crate::report::{emit_report, Format, Report};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("enumeration guard: {0}")]
    EnumerationGuard(String),
    #[error("cannot write report: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigInvalid(_) | CliError::Io(_) => 2,
            CliError::EnumerationGuard(_) => 3,
        }
    }
}

fn config_err(msg: impl ToString) -> CliError {
    CliError::ConfigInvalid(msg.to_string())
}

impl From<CombinatoricsError> for CliError {
    fn from(e: CombinatoricsError) -> Self {
        match e {
            CombinatoricsError::TooLargeToEnumerate { .. } => CliError::EnumerationGuard(e.to_string()),
            other => config_err(other),
        }
    }
}

impl From<MulticlassError> for CliError {
    fn from(e: MulticlassError) -> Self {
        match e {
            MulticlassError::TooLargeToEnumerate { .. } => CliError::EnumerationGuard(e.to_string()),
            MulticlassError::Combinatorics(c) => c.into(),
            other => config_err(other),
        }
    }
}

impl From<ConvergenceError> for CliError {
    fn from(e: ConvergenceError) -> Self {
        match e {
            ConvergenceError::Multiclass(m) => m.into(),
            other => config_err(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    ExactLaw,
    TvBound,
    VerifyDecomposition,
    ResampleTest,
    Sufficiency,
    Convergence,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::ExactLaw => "exact-law",
            CommandName::TvBound => "tv-bound",
            CommandName::VerifyDecomposition => "verify-decomposition",
            CommandName::ResampleTest => "resample-test",
            CommandName::Sufficiency => "sufficiency",
            CommandName::Convergence => "convergence",
        }
    }

    fn is_stochastic(self) -> bool {
        self == CommandName::ResampleTest
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

/// A number written either as a JSON number or as an exact string such as
/// `"1e-3"` or `"1/1000"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Decimal {
    Number(f64),
    Text(String),
}

impl Decimal {
    fn to_rational(&self) -> Option<Rational> {
        match self {
            Decimal::Number(x) => rational::parse_decimal(&x.to_string()),
            Decimal::Text(s) => rational::parse_decimal(s),
        }
    }
}

/// Everything a run needs. Loaded from a config file and overlaid with
/// flags; unset fields take command defaults in [`ExperimentConfig::resolve`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub urn: Option<String>,
    #[serde(default, rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub with_replacement: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<Decimal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<FormatArg>,
}

impl ExperimentConfig {
    /// Parses a config file; relative `spec` and `family` paths are taken
    /// relative to the file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let mut cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.spec, &mut cfg.family].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overlay(self, other: ExperimentConfig) -> ExperimentConfig {
        ExperimentConfig {
            command: other.command.or(self.command),
            urn: other.urn.or(self.urn),
            n: other.n.or(self.n),
            k: other.k.or(self.k),
            with_replacement: other.with_replacement.or(self.with_replacement),
            spec: other.spec.or(self.spec),
            family: other.family.or(self.family),
            degree: other.degree.or(self.degree),
            tol: other.tol.or(self.tol),
            z: other.z.or(self.z),
            seed: other.seed.or(self.seed),
            reps: other.reps.or(self.reps),
            out: other.out.or(self.out),
            format: other.format.or(self.format),
        }
    }

    /// Fills command defaults and validates everything that can be checked
    /// without running.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        let command = self.command.ok_or_else(|| config_err("no command given"))?;
        let need = |field: &str| config_err(format!("{} needs --{field}", command.as_str()));
        match command {
            CommandName::ExactLaw | CommandName::VerifyDecomposition => {
                self.urn.as_ref().ok_or_else(|| need("urn"))?;
                self.k.ok_or_else(|| need("k"))?;
            }
            CommandName::TvBound => {
                if self.n.is_none() && self.urn.is_none() {
                    return Err(need("N"));
                }
                self.k.ok_or_else(|| need("k"))?;
            }
            CommandName::ResampleTest => {
                self.spec.as_ref().ok_or_else(|| need("spec"))?;
                self.k.get_or_insert(2);
                self.z.get_or_insert(4.0);
                self.reps.get_or_insert(10_000);
                self.seed.ok_or_else(|| need("seed"))?;
            }
            CommandName::Sufficiency => {
                self.spec.as_ref().ok_or_else(|| need("spec"))?;
            }
            CommandName::Convergence => {
                self.family.as_ref().ok_or_else(|| need("family"))?;
                self.k.get_or_insert(2);
                self.degree.get_or_insert(3);
                self.tol.get_or_insert(Decimal::Text("1e-3".into()));
            }
        }
        if self.reps == Some(0) {
            return Err(config_err("reps must be at least 1"));
        }
        if let Some(z) = self.z {
            if !(z.is_finite() && z > 0.0) {
                return Err(config_err("z must be a positive number"));
            }
        }
        if let Some(tol) = &self.tol {
            match tol.to_rational() {
                Some(t) if t > rational::zero() => {}
                _ => return Err(config_err("tol must be a positive number")),
            }
        }
        if !command.is_stochastic() {
            self.seed = None;
            self.reps = None;
        }
        Ok(self)
    }

    /// The resolved settings that determine the results; output location and
    /// format are left out.
    pub fn echo(&self) -> serde_json::Value {
        let mut shown = self.clone();
        shown.out = None;
        shown.format = None;
        serde_json::to_value(shown).expect("configs serialize")
    }

    fn command(&self) -> CommandName {
        self.command.expect("resolved configs name a command")
    }
}

#[derive(Debug, Parser)]
#[command(name = "exchkit", version, about = "Exact and Monte Carlo checks for exchangeable systems")]
struct Cli {
    /// JSON file with any of the settings below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    reps: Option<u64>,
    /// Report file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact law of k ordered draws from an urn.
    ExactLaw {
        /// Urn points, e.g. `a,a,b`.
        #[arg(long)]
        urn: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        with_replacement: bool,
    },
    /// Bounds on the gap between draws with and without replacement.
    TvBound {
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// Also compute the actual distance for this urn.
        #[arg(long)]
        urn: Option<String>,
    },
    /// Splits the i.i.d. law by collision count and rebuilds it.
    VerifyDecomposition {
        #[arg(long)]
        urn: Option<String>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Monte Carlo comparison of a system with its conditional resample.
    ResampleTest {
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Indicator length of the test battery.
        #[arg(long)]
        k: Option<usize>,
        /// Allowed standard errors.
        #[arg(long)]
        z: Option<f64>,
    },
    /// Exact check that the measure vector carries the whole law.
    Sufficiency {
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Finite-dimensional versus measure-vector convergence of a family.
    Convergence {
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        degree: Option<u32>,
        #[arg(long)]
        tol: Option<String>,
    },
}

impl Cli {
    fn into_config(self) -> (Option<PathBuf>, ExperimentConfig) {
        let mut cfg = ExperimentConfig {
            seed: self.seed,
            reps: self.reps,
            out: self.out,
            format: self.format,
            ..Default::default()
        };
        match self.command {
            None => {}
            Some(Command::ExactLaw { urn, k, with_replacement }) => {
                cfg.command = Some(CommandName::ExactLaw);
                cfg.urn = urn;
                cfg.k = k;
                cfg.with_replacement = with_replacement.then_some(true);
            }
            Some(Command::TvBound { n, k, urn }) => {
                cfg.command = Some(CommandName::TvBound);
                cfg.n = n;
                cfg.k = k;
                cfg.urn = urn;
            }
            Some(Command::VerifyDecomposition { urn, k }) => {
                cfg.command = Some(CommandName::VerifyDecomposition);
                cfg.urn = urn;
                cfg.k = k;
            }
            Some(Command::ResampleTest { spec, k, z }) => {
                cfg.command = Some(CommandName::ResampleTest);
                cfg.spec = spec;
                cfg.k = k;
                cfg.z = z;
            }
            Some(Command::Sufficiency { spec }) => {
                cfg.command = Some(CommandName::Sufficiency);
                cfg.spec = spec;
            }
            Some(Command::Convergence { family, k, degree, tol }) => {
                cfg.command = Some(CommandName::Convergence);
                cfg.family = family;
                cfg.k = k;
                cfg.degree = degree;
                cfg.tol = tol.map(Decimal::Text);
            }
        }
        (self.config, cfg)
    }
}

fn env_config() -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::default();
    if let Ok(s) = std::env::var("EXCHKIT_SEED") {
        cfg.seed = Some(s.trim().parse().map_err(|_| config_err(format!("EXCHKIT_SEED={s:?} is not a u64")))?);
    }
    Ok(cfg)
}

fn env_threads() -> Result<Option<usize>, CliError> {
    match std::env::var("EXCHKIT_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(config_err(format!("EXCHKIT_THREADS={s:?} is not a positive integer"))),
        },
    }
}

fn tuple_key(t: &[Atom]) -> String {
    let parts: Vec<&str> = t.iter().map(Atom::as_str).collect();
    format!("({})", parts.join(","))
}

fn parse_urn(text: &str) -> Result<Urn, CliError> {
    Ok(Urn::parse(text)?)
}

fn exact_law(cfg: &ExperimentConfig, report: &mut Report) -> Result<(), CliError> {
    let urn = parse_urn(cfg.urn.as_deref().unwrap_or_default())?;
    let k = cfg.k.unwrap_or_default();
    let with = cfg.with_replacement.unwrap_or(false);
    let law = if with { law_with_replacement(&urn, k)? } else { law_without_replacement(&urn, k)? };
    report.put("N", urn.len());
    report.put("k", k);
    report.put("support_size", law.support_len());
    for (t, w) in law.iter() {
        report.put(format!("law.{}", tuple_key(t)), w);
    }
    let total: Rational = law.iter().map(|(_, w)| w).sum();
    report.check("normalized", total == rational::one(), "total mass is 1");
    if !with {
        let rebuilt = law_without_replacement_from_empirical(&urn.empirical(), urn.len(), k)?;
        report.check(
            "determined_by_empirical_measure",
            rebuilt == law,
            "the law rebuilt from the empirical measure alone matches the enumeration",
        );
    }
    Ok(())
}

fn tv_bound(cfg: &ExperimentConfig, report: &mut Report) -> Result<(), CliError> {
    let urn = cfg.urn.as_deref().map(parse_urn).transpose()?;
    let n = match (cfg.n, &urn) {
        (Some(n), Some(u)) if n != u.len() => {
            return Err(config_err(format!("--N {n} disagrees with an urn of {} points", u.len())))
        }
        (Some(n), _) => n,
        (None, Some(u)) => u.len(),
        (None, None) => unreachable!("resolve requires N or an urn"),
    };
    let k = cfg.k.unwrap_or_default();
    let bounds = tv_gap_bounds(n, k)?;
    report.put("exact_gap_bound", &bounds.exact_gap_bound);
    report.put("coarse_bound", &bounds.coarse_bound);
    report.check(
        "exact_bound_le_coarse",
        bounds.exact_gap_bound <= bounds.coarse_bound,
        "2(N^k - (N)_k)/N^k <= k(k-1)/N",
    );
    if let Some(urn) = urn {
        let eq = check_equality_condition(&urn, k)?;
        report.put("tv_distance", &eq.actual_tv);
        report.put("is_equality", eq.is_equality);
        report.put("points_distinct", eq.points_distinct);
        report.check("tv_le_exact_bound", eq.actual_tv <= eq.bounds.exact_gap_bound, "");
        if k >= 2 {
            report.check("equality_iff_distinct", eq.is_equality == eq.points_distinct, "");
        }
    }
    Ok(())
}

fn verify_decomposition(cfg: &ExperimentConfig, report: &mut Report) -> Result<(), CliError> {
    let urn = parse_urn(cfg.urn.as_deref().unwrap_or_default())?;
    let k = cfg.k.unwrap_or_default();
    let dec = decompose_product_power(&urn, k)?;
    for t in &dec.terms {
        report.put(format!("term.{:02}.coefficient", t.image_size), &t.coefficient);
        report.put(format!("term.{:02}.patterns", t.image_size), t.patterns.len());
        report.put(format!("term.{:02}.support_size", t.image_size), t.measure.support_len());
    }
    report.put("coefficient_sum", dec.coefficient_sum());
    let target = law_with_replacement(&urn, k)?;
    let rebuilt = dec.reconstruct().map_err(CombinatoricsError::from)?;
    report.check("reconstruction_exact", rebuilt == target, "sum of weighted terms equals the i.i.d. law");
    report.check("coefficients_sum_to_one", dec.coefficient_sum() == rational::one(), "");
    report.check(
        "distinct_term_is_without_replacement_law",
        dec.distinct_term().measure == law_without_replacement(&urn, k)?,
        "",
    );
    Ok(())
}

fn load_spec(path: &Path) -> Result<crate::multiclass::SystemSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    Ok(SystemSpecDocument::from_json(&text)?.into_spec()?)
}

fn resample_test(cfg: &ExperimentConfig, report: &mut Report) -> Result<(), CliError> {
    let spec = load_spec(cfg.spec.as_deref().expect("resolved"))?.as_black_box()?;
    let battery = TestFunction::shadow_battery(&spec, cfg.k.expect("resolved"));
    let shadow = statistical_shadow(
        &spec,
        &battery,
        cfg.reps.expect("resolved"),
        cfg.seed.expect("resolved"),
        cfg.z.expect("resolved"),
    )?;
    report.put("battery_size", battery.len());
    for (i, row) in shadow.rows.iter().enumerate() {
        report.put(format!("shadow.{i:03}.label"), row.label.as_str());
        report.put(format!("shadow.{i:03}.original"), row.original);
        report.put(format!("shadow.{i:03}.resampled"), row.resampled);
        report.put(format!("shadow.{i:03}.difference"), row.difference);
        report.check(format!("shadow.{i:03}"), row.pass, row.label.as_str());
    }
    Ok(())
}

fn sufficiency(cfg: &ExperimentConfig, report: &mut Report) -> Result<(), CliError> {
    let spec = load_spec(cfg.spec.as_deref().expect("resolved"))?;
    match verify_sufficiency(&spec) {
        Err(MulticlassError::NotMultiExchangeable) => {
            report.check("multi_exchangeable", false, "the law changes under a within-class swap");
        }
        Err(e) => return Err(e.into()),
        Ok(s) => {
            report.check("multi_exchangeable", true, "");
            report.put("outcomes", s.outcomes);
            report.put("measure_vectors", s.measure_vectors);
            report.put("unconditionally_factorizes", s.unconditionally_factorizes);
            report.check("kernel_reproduces_law", s.kernel_reproduces_law, "");
            report.check("composed_law_matches", s.composed_law_matches, "");
            report.check("conditionally_factorizes", s.conditionally_factorizes, "");
        }
    }
    Ok(())
}

fn convergence(cfg: &ExperimentConfig, report: &mut Report) -> Result<(), CliError> {
    let path = cfg.family.as_deref().expect("resolved");
    let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    let options = ConvergenceOptions {
        k: cfg.k.expect("resolved"),
        degree: cfg.degree.expect("resolved"),
        tolerance: cfg.tol.as_ref().and_then(Decimal::to_rational).expect("resolved"),
    };
    let result = FamilyDocument::from_json(&text)
        .and_then(FamilyDocument::into_family)
        .and_then(|fam| convergence_report(&fam, &options));
    let rep = match result {
        Err(ConvergenceError::InconsistentFamily(msg)) => {
            report.check("consistent_family", false, msg);
            return Ok(());
        }
        other => other?,
    };
    report.check("consistent_family", true, "");
    for (i, row) in rep.rows.iter().enumerate() {
        report.put(format!("grid.{i:02}.r"), &row.r);
        report.put(format!("grid.{i:02}.fdd_gap"), &row.fdd_gap);
        report.put(format!("grid.{i:02}.vector_gap"), &row.vector_gap);
        report.put(format!("grid.{i:02}.fdd_bound"), &row.fdd_bound);
        report.put(format!("grid.{i:02}.extended_fdd_gap"), &row.extended_fdd_gap);
    }
    for (i, rate) in rep.fdd_rates.iter().enumerate() {
        if let Some(x) = rate {
            report.put(format!("rate.{i:02}.fdd"), rational::format_f64(*x));
        }
    }
    for (i, rate) in rep.vector_rates.iter().enumerate() {
        if let Some(x) = rate {
            report.put(format!("rate.{i:02}.vector"), rational::format_f64(*x));
        }
    }
    for (section, rows) in [("fdd", &rep.fdd_moments), ("vector", &rep.vector_moments)] {
        for (j, m) in rows.iter().enumerate() {
            report.put(format!("{section}.{j:03}.label"), m.label.as_str());
            report.put(format!("{section}.{j:03}.limit"), &m.limit);
            for (i, gap) in m.gaps.iter().enumerate() {
                report.put(format!("{section}.{j:03}.gap.{i:02}"), gap);
            }
        }
    }
    report.put("transfer_constant", &rep.transfer_constant);
    report.put("derived_tolerance", &rep.derived_tolerance);
    report.put("fdd_monotone", rep.fdd_monotone);
    report.put("vector_monotone", rep.vector_monotone);
    report.put("vector_to_system", rep.vector_to_system.to_string());
    report.put("system_to_vector", rep.system_to_vector.to_string());
    report.check("reconstruction_exact", rep.reconstruction_exact, "fdd moments equal their transfer polynomials");
    report.check(
        "representation_exact",
        rep.representation_exact,
        "vector monomials equal their representing fdd moments",
    );
    report.check("vector_to_system", rep.vector_to_system == Verdict::SupportsEquivalence, "");
    report.check("system_to_vector", rep.system_to_vector == Verdict::SupportsEquivalence, "");
    Ok(())
}

/// Runs a resolved configuration.
pub fn run(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let command = cfg.command();
    let mut report = Report::new(command.as_str(), cfg.echo());
    report.seed = cfg.seed;
    report.reps = cfg.reps;
    match command {
        CommandName::ExactLaw => exact_law(cfg, &mut report)?,
        CommandName::TvBound => tv_bound(cfg, &mut report)?,
        CommandName::VerifyDecomposition => verify_decomposition(cfg, &mut report)?,
        CommandName::ResampleTest => resample_test(cfg, &mut report)?,
        CommandName::Sufficiency => sufficiency(cfg, &mut report)?,
        CommandName::Convergence => convergence(cfg, &mut report)?,
    }
    Ok(report)
}

fn execute(cli: Cli) -> Result<Report, CliError> {
    let (config_path, flags) = cli.into_config();
    let base = match config_path {
        Some(p) => ExperimentConfig::load(&p)?,
        None => ExperimentConfig::default(),
    };
    let cfg = base.overlay(env_config()?).overlay(flags).resolve()?;
    let report = match env_threads()? {
        None => run(&cfg)?,
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(config_err)?.install(|| run(&cfg))?,
    };
    let format = cfg.format.map(Format::from).unwrap_or_default();
    emit_report(&report, format, cfg.out.as_deref()).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(report)
}

/// Entry point of the `exchkit` binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(report) if report.pass() => 0,
        Ok(report) => {
            for c in report.checks.iter().filter(|c| !c.pass) {
                eprintln!("check failed: {} {}", c.name, c.detail);
            }
            1
        }
        Err(e) => {
            eprintln!("exchkit: {e}");
            e.exit_code()
        }
    }
}
