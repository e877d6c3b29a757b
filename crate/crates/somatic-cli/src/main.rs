//! `somatic`: lexicon queries, single somatic transforms and reproduction
//! of the reference simulations from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/validation error,
//! 3 numerical failure. Diagnostics go to stderr; data goes to files and
//! stdout.

mod output;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use somatic::dict_io::{load_lexicon_path, LexiconFileReport};
use somatic::epa::{nearest_label, EpaVector, Lexicon, Metric};
use somatic::experiments::{
    calibration_records, run_conformity, run_dissonance, run_fairness, run_gamma_sweep,
    run_px_sweep, run_uy_sweep, DissonanceConfig, ExperimentRecord, GammaSweepConfig,
    PxSweepConfig, UySweepConfig,
};
use somatic::sequential::{calibrate_conformity, CollapseStrategy, ConformityConfig};
use somatic::transform::{
    posterior_x, posterior_y, CategoricalBelief, GaussianBelief, SomaticPotential,
};
use somatic::Error as LibError;

use output::{print_summary, write_experiment_files, OutputFormat};

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    fn data(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<LibError> for CliError {
    fn from(e: LibError) -> Self {
        let code = match e {
            LibError::DegenerateMass | LibError::NonFiniteOutput { .. } => 3,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

#[derive(Parser)]
#[command(
    name = "somatic",
    version,
    about = "Couples a discrete denotative belief with a continuous EPA sentiment belief",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sentiment lexicon queries and validation
    Dict {
        #[command(subcommand)]
        command: DictCommand,
    },
    /// One somatic transform from explicit beliefs and anchors
    Transform(TransformArgs),
    /// Reproduce a reference simulation, writing record files
    Experiment(ExperimentArgs),
}

#[derive(Subcommand)]
enum DictCommand {
    /// Rank the k nearest labels to an EPA point
    Nearest {
        /// Lexicon file (label,e,p,a[,sd_e,sd_p,sd_a])
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        e: f64,
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        /// How many labels to print
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Load a lexicon and print its validation report
    Validate {
        #[arg(long)]
        lexicon: PathBuf,
    },
}

#[derive(Args)]
struct TransformArgs {
    /// Denotative prior as label:prob pairs, e.g. good:0.2,bad:0.8
    #[arg(long = "prior-x", value_parser = parse_pairs)]
    prior_x: LabelledValues,
    /// Connotative prior mean
    #[arg(long = "mu-y", allow_negative_numbers = true)]
    mu_y: f64,
    /// Connotative prior standard deviation
    #[arg(long = "sigma-y", allow_negative_numbers = true)]
    sigma_y: f64,
    /// Coupling temperature
    #[arg(long, allow_negative_numbers = true)]
    gamma: f64,
    /// Connotative anchors as label:value pairs, e.g. good:1.32,bad:-0.67
    #[arg(long, value_parser = parse_pairs)]
    anchors: LabelledValues,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExperimentName {
    /// Sweep of the connotative prior mean (nurse/doctor)
    Uy,
    /// Sweep of the coupling temperature (nurse/doctor)
    Gamma,
    /// Sweep of the denotative prior (nurse/doctor)
    Px,
    /// Dissonance re-interpretation over connotative dispersions
    Dissonance,
    /// Asch-style conformity chain
    Conformity,
    /// Fairness sadness-rating reconstruction
    Fairness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CollapseArg {
    Exact,
    Moment,
}

impl From<CollapseArg> for CollapseStrategy {
    fn from(c: CollapseArg) -> Self {
        match c {
            CollapseArg::Exact => CollapseStrategy::exact(),
            CollapseArg::Moment => CollapseStrategy::MomentMatch,
        }
    }
}

#[derive(Args)]
struct ExperimentArgs {
    /// Which simulation to run
    name: ExperimentName,
    /// Override a parameter, repeatable: --set key=value
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Records file (grid files are written next to it); defaults to
    /// <name>.<ext> in the working directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Take anchors from a lexicon: nurse/doctor Potency for uy, gamma and
    /// px; iphone/blackberry Evaluation for dissonance
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Mixture collapse strategy (conformity only)
    #[arg(long, value_enum)]
    collapse: Option<CollapseArg>,
    /// Re-run the conformity anchor grid search and write its report
    #[arg(long)]
    calibrate: bool,
    /// Reserved; every run is deterministic, so the seed is unused
    #[arg(long)]
    seed: Option<u64>,
}

type LabelledValues = Vec<(String, f64)>;

fn parse_pairs(raw: &str) -> Result<LabelledValues, String> {
    raw.split(',')
        .map(|item| {
            let (label, value) = item
                .rsplit_once(':')
                .ok_or_else(|| format!("expected label:value, got {item:?}"))?;
            if label.is_empty() {
                return Err(format!("empty label in {item:?}"));
            }
            let value: f64 =
                value.parse().map_err(|_| format!("{value:?} is not a number in {item:?}"))?;
            Ok((label.to_owned(), value))
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Dict { command } => match command {
            DictCommand::Nearest { lexicon, e, p, a, k } => cmd_dict_nearest(&lexicon, e, p, a, k),
            DictCommand::Validate { lexicon } => cmd_dict_validate(&lexicon),
        },
        Command::Transform(args) => cmd_transform(args),
        Command::Experiment(args) => cmd_experiment(args),
    }
}

fn load_reported(path: &Path) -> Result<(Lexicon, LexiconFileReport), CliError> {
    let (lexicon, report) =
        load_lexicon_path(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    for note in &report.notes {
        eprintln!("note: {}: {note}", path.display());
    }
    for (line, reason) in &report.rejects {
        eprintln!("warning: {}:{line}: rejected: {reason}", path.display());
    }
    Ok((lexicon, report))
}

fn cmd_dict_nearest(path: &Path, e: f64, p: f64, a: f64, k: usize) -> Result<(), CliError> {
    let (lexicon, _) = load_reported(path)?;
    let query = EpaVector::new(e, p, a)?;
    let ranked = nearest_label(&lexicon, &query, k, Metric::SquaredEuclidean)?;
    println!("{:<24} {:>14} {:>14}", "label", "sq_euclidean", "euclidean");
    for (label, sq) in ranked {
        println!("{label:<24} {sq:>14.6} {:>14.6}", sq.sqrt());
    }
    Ok(())
}

fn cmd_dict_validate(path: &Path) -> Result<(), CliError> {
    let (_, report) =
        load_lexicon_path(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    println!("lexicon:  {}", path.display());
    println!("accepted: {}", report.accepted);
    println!("rejected: {}", report.rejects.len());
    for note in &report.notes {
        println!("note:     {note}");
    }
    for (line, reason) in &report.rejects {
        println!("line {line}: {reason}");
    }
    if !report.rejects.is_empty() {
        return Err(CliError::data(format!(
            "{} of {} data lines rejected",
            report.rejects.len(),
            report.data_lines()
        )));
    }
    Ok(())
}

fn cmd_transform(args: TransformArgs) -> Result<(), CliError> {
    let total: f64 = args.prior_x.iter().map(|(_, p)| p).sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(CliError::data(format!("prior-x probabilities sum to {total}")));
    }
    if (total - 1.0).abs() > 1e-6 {
        eprintln!("warning: prior-x probabilities sum to {total}; renormalizing");
    }
    let prior_x = CategoricalBelief::new(
        args.prior_x.iter().map(|(label, p)| (label.clone(), p / total)),
    )?;
    let prior_y = GaussianBelief::new(args.mu_y, args.sigma_y)?;
    let pot = SomaticPotential::new(args.anchors.iter().map(|(l, v)| (l.clone(), *v)), args.gamma)?;
    let post_x = posterior_x(&prior_x, &prior_y, &pot)?;
    let post_y = posterior_y(&prior_x, &prior_y, &pot)?;

    println!("{:<16} {:>12} {:>12}", "label", "prior", "posterior");
    for ((label, prior), (_, post)) in prior_x.iter().zip(post_x.iter()) {
        println!("{label:<16} {prior:>12.6} {post:>12.6}");
    }
    println!();
    println!("entropy_prior_x:     {:.6}", prior_x.entropy());
    println!("entropy_posterior_x: {:.6}", post_x.entropy());
    println!();
    println!("posterior_y components:");
    println!("{:<16} {:>12} {:>12} {:>12}", "label", "weight", "mean", "sd");
    for ((label, _), c) in prior_x.iter().zip(post_y.components()) {
        println!("{label:<16} {:>12.6} {:>12.6} {:>12.6}", c.weight, c.mean, c.sd);
    }
    Ok(())
}

/// Per-experiment `--set` keys and how they land in the configs.
struct Overrides {
    pairs: Vec<(String, f64)>,
}

impl Overrides {
    fn parse(raw: &[String], allowed: &[&str]) -> Result<Self, CliError> {
        let mut pairs = Vec::new();
        for item in raw {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("--set expects key=value, got {item:?}")))?;
            if !allowed.contains(&key) {
                return Err(CliError::usage(format!(
                    "unknown parameter {key:?}; valid keys: {}",
                    allowed.join(", ")
                )));
            }
            let value: f64 = value.parse().map_err(|_| {
                CliError::usage(format!("--set {key}: {value:?} is not a number"))
            })?;
            pairs.push((key.to_owned(), value));
        }
        Ok(Self { pairs })
    }

    fn apply(&self, key: &str, slot: &mut f64) {
        for (k, v) in &self.pairs {
            if k == key {
                *slot = *v;
            }
        }
    }

    fn get(&self, key: &str) -> Option<f64> {
        self.pairs.iter().rev().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

/// Reads an anchor from a lexicon entry, by label and dimension.
fn lexicon_anchor(
    lexicon: &Lexicon,
    label: &str,
    dimension: fn(&EpaVector) -> f64,
    path: &Path,
) -> Result<f64, CliError> {
    lexicon
        .get(label)
        .map(|entry| dimension(entry.mean()))
        .ok_or_else(|| {
            CliError::data(format!("{}: no entry '{label}' to anchor from", path.display()))
        })
}

fn cmd_experiment(args: ExperimentArgs) -> Result<(), CliError> {
    if args.seed.is_some() {
        eprintln!("note: --seed is reserved; every run is deterministic");
    }
    if args.calibrate && args.name != ExperimentName::Conformity {
        return Err(CliError::usage("--calibrate only applies to the conformity experiment"));
    }
    if args.collapse.is_some() && args.name != ExperimentName::Conformity {
        eprintln!("note: --collapse only affects the conformity experiment; ignored");
    }
    let lexicon = match &args.lexicon {
        Some(path) => {
            if matches!(args.name, ExperimentName::Conformity | ExperimentName::Fairness) {
                eprintln!("note: --lexicon is unused by this experiment; ignored");
                None
            } else {
                Some((load_reported(path)?.0, path.clone()))
            }
        }
        None => None,
    };

    let records = build_records(&args, lexicon.as_ref())?;

    let default_name = if args.calibrate {
        format!("conformity_calibration.{}", args.format.extension())
    } else {
        format!("{}.{}", args.name.to_possible_value().unwrap().get_name(), args.format.extension())
    };
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from(default_name));
    let written = write_experiment_files(&records, &out, args.format)?;

    print_summary(&records, std::io::stdout().lock())
        .map_err(|e| CliError::data(format!("writing summary: {e}")))?;
    for path in &written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn build_records(
    args: &ExperimentArgs,
    lexicon: Option<&(Lexicon, PathBuf)>,
) -> Result<Vec<ExperimentRecord>, CliError> {
    let nurse_doctor = |config_nurse: &mut f64, config_doctor: &mut f64| -> Result<(), CliError> {
        if let Some((lex, path)) = lexicon {
            *config_nurse = lexicon_anchor(lex, "nurse", |m| m.p(), path)?;
            *config_doctor = lexicon_anchor(lex, "doctor", |m| m.p(), path)?;
        }
        Ok(())
    };
    let records = match args.name {
        ExperimentName::Uy => {
            let over = Overrides::parse(
                &args.set,
                &["p", "sigma_y", "gamma", "m_nurse", "m_doctor"],
            )?;
            let mut config = UySweepConfig::default();
            nurse_doctor(&mut config.anchor_nurse, &mut config.anchor_doctor)?;
            over.apply("p", &mut config.prior_nurse);
            over.apply("sigma_y", &mut config.sigma_y);
            over.apply("gamma", &mut config.gamma);
            over.apply("m_nurse", &mut config.anchor_nurse);
            over.apply("m_doctor", &mut config.anchor_doctor);
            run_uy_sweep(&config)?
        }
        ExperimentName::Gamma => {
            let over = Overrides::parse(
                &args.set,
                &["mu_y", "p", "sigma_y", "m_nurse", "m_doctor"],
            )?;
            let mut config = GammaSweepConfig::default();
            nurse_doctor(&mut config.anchor_nurse, &mut config.anchor_doctor)?;
            over.apply("mu_y", &mut config.mu_y);
            over.apply("p", &mut config.prior_nurse);
            over.apply("sigma_y", &mut config.sigma_y);
            over.apply("m_nurse", &mut config.anchor_nurse);
            over.apply("m_doctor", &mut config.anchor_doctor);
            run_gamma_sweep(&config)?
        }
        ExperimentName::Px => {
            let over = Overrides::parse(
                &args.set,
                &["mu_y", "sigma_y", "gamma", "m_nurse", "m_doctor"],
            )?;
            let mut config = PxSweepConfig::default();
            nurse_doctor(&mut config.anchor_nurse, &mut config.anchor_doctor)?;
            over.apply("mu_y", &mut config.mu_y);
            over.apply("sigma_y", &mut config.sigma_y);
            over.apply("gamma", &mut config.gamma);
            over.apply("m_nurse", &mut config.anchor_nurse);
            over.apply("m_doctor", &mut config.anchor_doctor);
            run_px_sweep(&config)?
        }
        ExperimentName::Dissonance => {
            let over = Overrides::parse(
                &args.set,
                &["mu_y", "gamma", "prior_bad", "m_good", "m_bad"],
            )?;
            let mut config = DissonanceConfig::default();
            if let Some((lex, path)) = lexicon {
                config.anchor_good = lexicon_anchor(lex, "iphone", |m| m.e(), path)?;
                config.anchor_bad = lexicon_anchor(lex, "blackberry", |m| m.e(), path)?;
            }
            over.apply("mu_y", &mut config.mu_y);
            over.apply("gamma", &mut config.gamma);
            over.apply("prior_bad", &mut config.prior_bad);
            over.apply("m_good", &mut config.anchor_good);
            over.apply("m_bad", &mut config.anchor_bad);
            run_dissonance(&config)?
        }
        ExperimentName::Conformity => {
            let over = Overrides::parse(
                &args.set,
                &[
                    "steps",
                    "mu_y",
                    "sigma_y",
                    "gamma",
                    "anchor_gap",
                    "prior_wrong",
                    "obs_likelihood",
                ],
            )?;
            if args.calibrate {
                let report = calibrate_conformity()?;
                let best = report.best();
                eprintln!(
                    "calibration: anchor_gap={} collapse={} step5={:.4} step10={:.6} sse={:.3e}",
                    best.anchor_gap,
                    best.collapse.name(),
                    best.step5,
                    best.step10,
                    best.sse
                );
                return Ok(calibration_records(&report)?);
            }
            let mut config = ConformityConfig::default();
            over.apply("mu_y", &mut config.mu_y);
            over.apply("sigma_y", &mut config.sigma_y);
            over.apply("gamma", &mut config.gamma);
            over.apply("anchor_gap", &mut config.anchor_gap);
            over.apply("prior_wrong", &mut config.prior_wrong);
            over.apply("obs_likelihood", &mut config.peer_opposite_given_wrong);
            if let Some(collapse) = args.collapse {
                config.collapse = collapse.into();
            }
            let steps = match over.get("steps") {
                None => 10usize,
                Some(s) if s >= 0.0 && s.fract() == 0.0 && s <= 10_000.0 => s as usize,
                Some(s) => {
                    return Err(CliError::usage(format!(
                        "--set steps: {s} is not a whole number of steps"
                    )))
                }
            };
            run_conformity(steps, &config)?
        }
        ExperimentName::Fairness => {
            Overrides::parse(&args.set, &[])?;
            run_fairness()?
        }
    };
    Ok(records)
}
