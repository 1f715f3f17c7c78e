//! Command-line front end.
//!
//! Commands: `ace`, `counterfactual`, `exact`, `simulate`, `datasets`,
//! `feasible`. Global flags `--json` and `--precision` control rendering.
//! Exit codes: 0 success, 1 usage or parse problems, 2 infeasible data
//! (certificate printed), 3 scope refusal (nonlinear objective).

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bounds::{
    ace_bounds_lp, bound_query, liability_bounds_lp, sanity_statistics, subpop_ace_bounds,
    symbolic_ace_bounds, symbolic_liability_bounds, symbolic_treatment_response_bounds,
    verify_observed, BoundMethod, BoundsError, BoundsResult, CounterfactualQuery,
    LiabilityParty, SubpopTarget, SymbolicBounds,
};
use crate::constraints::{check_feasibility, Feasibility};
use crate::datasets;
use crate::format::{
    iv_dataset_file, parse_assignments, parse_dataset, parse_priors, parse_q_file,
    Dataset, FormatError, ModelFile,
};
use crate::observed::IvDistribution;
use crate::rational::{format_ratio, parse_rational, Rational};
use crate::report::{exact_value, BoundsReport, ValueReport};
use crate::rfm::{CausalModel, Intervention, ModelError, ValueMap};
use crate::synth;
use num_traits::{One, Signed, Zero};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("lp and symbolic bounds disagree: {0}")]
    Diagnostic(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Bounds(BoundsError::InfeasibleObserved { .. }) => 2,
            CliError::Bounds(BoundsError::NonlinearObjective { .. }) => 3,
            _ => 1,
        }
    }
}

struct CommandOutput {
    human: String,
    json: serde_json::Value,
    exit: i32,
}

impl CommandOutput {
    fn new(human: String, json: serde_json::Value) -> Self {
        CommandOutput {
            human,
            json,
            exit: 0,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "cfbounds",
    version,
    about = "Exact bounds on counterfactual probabilities from observed conditionals"
)]
struct Cli {
    /// Emit a machine-readable JSON report instead of plain text
    #[arg(long, global = true)]
    json: bool,
    /// Decimal places for rendered probabilities
    #[arg(long, global = true, default_value_t = 2)]
    precision: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Lp,
    Symbolic,
    Both,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Built-in dataset name (see `datasets list`)
    #[arg(long)]
    dataset: Option<String>,
    /// Dataset JSON file
    #[arg(long)]
    file: Option<PathBuf>,
}

impl Source {
    fn load(&self) -> Result<(Dataset, String), CliError> {
        if let Some(name) = &self.dataset {
            let json = datasets::builtin_json(name)
                .ok_or_else(|| CliError::Usage(format!("unknown built-in dataset `{name}`")))?;
            return Ok((parse_dataset(json)?, name.clone()));
        }
        let path = self.file.as_ref().expect("clap group guarantees one");
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        Ok((parse_dataset(&text)?, path.display().to_string()))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Bounds on the average causal effect of treatment on outcome
    Ace {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        /// Condition on evidence (only `z=1,d=1,y=1` has closed forms)
        #[arg(long)]
        given: Option<String>,
        /// Restrict to one effect: `d` (treatment) or `z` (assignment)
        #[arg(long)]
        treatment: Option<String>,
        /// Also print the descriptive conditionals of the data
        #[arg(long)]
        stats: bool,
    },
    /// Bounds on a general counterfactual probability
    Counterfactual {
        #[command(flatten)]
        source: Source,
        /// Forced antecedent, e.g. `z=0`
        #[arg(long = "do")]
        action: String,
        /// Real-world observations, e.g. `z=1,d=1,y=1`
        #[arg(long)]
        given: Option<String>,
        /// Queried consequent, e.g. `y=1`
        #[arg(long)]
        query: String,
        #[arg(long, value_enum, default_value_t = Method::Lp)]
        method: Method,
    },
    /// Exact counterfactual probability of a fully specified model
    Exact {
        /// Built-in model name (`party`, `iv-binary`) or a model JSON file
        #[arg(long)]
        model: String,
        /// Response-prior JSON file
        #[arg(long)]
        prior: PathBuf,
        #[arg(long = "do")]
        action: String,
        #[arg(long)]
        given: Option<String>,
        #[arg(long)]
        query: String,
    },
    /// Generate a synthetic trial with known ground truth
    Simulate {
        /// Ground-truth seed (ignored when --q is given)
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ground-truth response distribution file
        #[arg(long)]
        q: Option<PathBuf>,
        /// Number of sampled units
        #[arg(short = 'n', long = "samples", default_value_t = 10_000)]
        n: u64,
        /// Assignment probability
        #[arg(long = "p-z1", default_value = "0.5")]
        p_z1: String,
        /// Emit the exact pushforward instead of sampling
        #[arg(long)]
        pushforward: bool,
    },
    /// Built-in datasets
    Datasets {
        #[command(subcommand)]
        action: DatasetsCmd,
    },
    /// Check whether observed data admit any response distribution
    Feasible {
        #[command(flatten)]
        source: Source,
    },
}

#[derive(Subcommand)]
enum DatasetsCmd {
    /// Names of the built-in datasets
    List,
    /// Print one dataset as consumable JSON
    Show { name: String },
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    let json_mode = cli.json;
    match execute(cli) {
        Ok(output) => {
            if json_mode {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&output.json).expect("serializable")
                );
            } else {
                println!("{}", output.human);
            }
            output.exit
        }
        Err(err) => {
            eprintln!("error: {err}");
            if let CliError::Bounds(BoundsError::InfeasibleObserved { certificate, .. }) = &err {
                let rendered: Vec<String> = certificate.iter().map(format_ratio).collect();
                eprintln!("infeasibility certificate: [{}]", rendered.join(", "));
            }
            err.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<CommandOutput, CliError> {
    let places = cli.precision;
    match cli.command {
        Command::Ace {
            source,
            method,
            given,
            treatment,
            stats,
        } => run_ace(source, method, given, treatment, stats, places),
        Command::Counterfactual {
            source,
            action,
            given,
            query,
            method,
        } => run_counterfactual(source, action, given, query, method, places),
        Command::Exact {
            model,
            prior,
            action,
            given,
            query,
        } => run_exact(model, prior, action, given, query, places),
        Command::Simulate {
            seed,
            q,
            n,
            p_z1,
            pushforward,
        } => run_simulate(seed, q, n, p_z1, pushforward, places),
        Command::Datasets { action } => run_datasets(action),
        Command::Feasible { source } => run_feasible(source, places),
    }
}

fn value_map(pairs: Vec<(String, String)>) -> ValueMap {
    pairs.into_iter().collect()
}

fn assignment_text(values: &ValueMap) -> String {
    values
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn query_quantity(consequent: &ValueMap, intervention: &Intervention, given: &ValueMap) -> String {
    let starred: Vec<String> = consequent.iter().map(|(k, v)| format!("{k}={v}*")).collect();
    let forced: Vec<String> = intervention
        .0
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    if given.is_empty() {
        format!("P({} | do({}))", starred.join(","), forced.join(","))
    } else {
        format!(
            "P({} | do({}); {})",
            starred.join(","),
            forced.join(","),
            assignment_text(given)
        )
    }
}

fn require_iv(dataset: &Dataset, command: &str) -> Result<IvDistribution, CliError> {
    dataset.iv.clone().ok_or_else(|| {
        CliError::Usage(format!(
            "`{command}` needs an instrumental-variables dataset (model \"iv-binary\")"
        ))
    })
}

fn agreement_note(
    lp: &BoundsResult,
    symbolic: &SymbolicBounds,
    quantity: &str,
) -> Result<String, CliError> {
    if lp.lower == symbolic.lower && lp.upper == symbolic.upper {
        Ok("lp and symbolic bounds agree exactly".to_string())
    } else {
        Err(CliError::Diagnostic(format!(
            "{quantity}: lp [{}, {}] vs symbolic [{}, {}]",
            format_ratio(&lp.lower),
            format_ratio(&lp.upper),
            format_ratio(&symbolic.lower),
            format_ratio(&symbolic.upper),
        )))
    }
}

fn subpop_lp(p: &IvDistribution, party: LiabilityParty) -> Result<BoundsResult, CliError> {
    let liability = liability_bounds_lp(p, party)?;
    Ok(BoundsResult {
        lower: Rational::one() - &liability.upper,
        upper: Rational::one() - &liability.lower,
        parameters: liability.parameters,
        lower_witness: liability.upper_witness,
        upper_witness: liability.lower_witness,
        method: BoundMethod::Lp,
    })
}

fn run_ace(
    source: Source,
    method: Method,
    given: Option<String>,
    treatment: Option<String>,
    stats: bool,
    places: u32,
) -> Result<CommandOutput, CliError> {
    let (dataset, label) = source.load()?;
    let p = require_iv(&dataset, "ace")?;
    let mut reports: Vec<BoundsReport> = Vec::new();
    let mut stat_lines = Vec::new();
    let mut stat_json = serde_json::Value::Null;

    if stats {
        let s = sanity_statistics(&p)?;
        for (name, value) in [
            ("P(y=1|d=1)", &s.y1_given_d1),
            ("P(y=1|d=0)", &s.y1_given_d0),
            ("P(y=1|z=1)", &s.y1_given_z1),
            ("P(y=1|z=0)", &s.y1_given_z0),
        ] {
            let v = exact_value(value, places);
            stat_lines.push(format!("{name} = {} (exact {})", v.decimal, v.exact));
        }
        stat_json = json!({
            "y1_given_d1": exact_value(&s.y1_given_d1, places),
            "y1_given_d0": exact_value(&s.y1_given_d0, places),
            "y1_given_z1": exact_value(&s.y1_given_z1, places),
            "y1_given_z0": exact_value(&s.y1_given_z0, places),
        });
    }

    match given {
        None => {
            let quantity = "ACE(d -> y)";
            match method {
                Method::Lp => {
                    reports.push(BoundsReport::from_bounds(
                        quantity,
                        &ace_bounds_lp(&p)?,
                        places,
                    ));
                }
                Method::Symbolic => {
                    reports.push(BoundsReport::from_symbolic(
                        quantity,
                        &symbolic_ace_bounds(&p),
                        places,
                    ));
                }
                Method::Both => {
                    let lp = ace_bounds_lp(&p)?;
                    let symbolic = symbolic_ace_bounds(&p);
                    let note = agreement_note(&lp, &symbolic, quantity)?;
                    reports.push(BoundsReport::from_bounds(quantity, &lp, places).with_note(note));
                    reports.push(BoundsReport::from_symbolic(quantity, &symbolic, places));
                }
            }
        }
        Some(text) => {
            let evidence = value_map(parse_assignments(&text)?);
            let expected: ValueMap = [("z", "1"), ("d", "1"), ("y", "1")]
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect();
            if evidence != expected {
                return Err(CliError::Usage(
                    "subpopulation bounds support the evidence z=1,d=1,y=1 only".to_string(),
                ));
            }
            let targets: Vec<(&str, SubpopTarget, LiabilityParty)> = match treatment.as_deref() {
                Some("d") => vec![(
                    "ACE(d -> y | z=1,d=1,y=1)",
                    SubpopTarget::TreatmentOnOutcome,
                    LiabilityParty::Producer,
                )],
                Some("z") => vec![(
                    "ACE(z -> y | z=1,d=1,y=1)",
                    SubpopTarget::AssignmentOnOutcome,
                    LiabilityParty::Marketer,
                )],
                None => vec![
                    (
                        "ACE(d -> y | z=1,d=1,y=1)",
                        SubpopTarget::TreatmentOnOutcome,
                        LiabilityParty::Producer,
                    ),
                    (
                        "ACE(z -> y | z=1,d=1,y=1)",
                        SubpopTarget::AssignmentOnOutcome,
                        LiabilityParty::Marketer,
                    ),
                ],
                Some(other) => {
                    return Err(CliError::Usage(format!(
                        "unknown --treatment `{other}` (use d or z)"
                    )))
                }
            };
            for (quantity, target, party) in targets {
                match method {
                    Method::Lp => {
                        reports.push(BoundsReport::from_bounds(
                            quantity,
                            &subpop_lp(&p, party)?,
                            places,
                        ));
                    }
                    Method::Symbolic => {
                        reports.push(BoundsReport::from_bounds(
                            quantity,
                            &subpop_ace_bounds(&p, target)?,
                            places,
                        ));
                    }
                    Method::Both => {
                        let lp = subpop_lp(&p, party)?;
                        let symbolic_result = subpop_ace_bounds(&p, target)?;
                        let note = if lp.lower == symbolic_result.lower
                            && lp.upper == symbolic_result.upper
                        {
                            "lp and symbolic bounds agree exactly".to_string()
                        } else {
                            return Err(CliError::Diagnostic(format!(
                                "{quantity}: lp vs symbolic mismatch"
                            )));
                        };
                        reports
                            .push(BoundsReport::from_bounds(quantity, &lp, places).with_note(note));
                        reports.push(BoundsReport::from_bounds(quantity, &symbolic_result, places));
                    }
                }
            }
        }
    }

    let mut human = String::new();
    let _ = writeln!(human, "dataset: {label}");
    for line in &stat_lines {
        let _ = writeln!(human, "{line}");
    }
    for report in &reports {
        let _ = writeln!(human, "{}", report.human());
    }
    let human = human.trim_end().to_string();
    let mut body = json!({
        "command": "ace",
        "dataset": label,
        "precision": places,
        "reports": reports,
    });
    if stats {
        body["statistics"] = stat_json;
    }
    Ok(CommandOutput::new(human, body))
}

#[derive(Clone, Copy)]
enum IvShape {
    Marketer,
    Producer,
    Withheld,
    Applied,
}

fn detect_iv_shape(
    given: &ValueMap,
    intervention: &Intervention,
    consequent: &ValueMap,
) -> Option<IvShape> {
    let is = |map: &ValueMap, pairs: &[(&str, &str)]| {
        map.len() == pairs.len()
            && pairs
                .iter()
                .all(|(k, v)| map.get(*k).map(String::as_str) == Some(*v))
    };
    if !is(consequent, &[("y", "1")]) {
        return None;
    }
    let evidence = is(given, &[("z", "1"), ("d", "1"), ("y", "1")]);
    if evidence && is(&intervention.0, &[("z", "0")]) {
        Some(IvShape::Marketer)
    } else if evidence && is(&intervention.0, &[("d", "0")]) {
        Some(IvShape::Producer)
    } else if given.is_empty() && is(&intervention.0, &[("d", "0")]) {
        Some(IvShape::Withheld)
    } else if given.is_empty() && is(&intervention.0, &[("d", "1")]) {
        Some(IvShape::Applied)
    } else {
        None
    }
}

fn symbolic_for_shape(p: &IvDistribution, shape: IvShape) -> Result<SymbolicBounds, CliError> {
    Ok(match shape {
        IvShape::Marketer => symbolic_liability_bounds(p, LiabilityParty::Marketer)?,
        IvShape::Producer => symbolic_liability_bounds(p, LiabilityParty::Producer)?,
        IvShape::Withheld => symbolic_treatment_response_bounds(p).withheld,
        IvShape::Applied => symbolic_treatment_response_bounds(p).applied,
    })
}

fn run_counterfactual(
    source: Source,
    action: String,
    given: Option<String>,
    query: String,
    method: Method,
    places: u32,
) -> Result<CommandOutput, CliError> {
    let (dataset, label) = source.load()?;
    let intervention = Intervention(value_map(parse_assignments(&action)?));
    if intervention.is_empty() {
        return Err(CliError::Usage("--do needs at least one assignment".into()));
    }
    let observations = value_map(parse_assignments(given.as_deref().unwrap_or(""))?);
    let consequent = value_map(parse_assignments(&query)?);
    if consequent.is_empty() {
        return Err(CliError::Usage("--query needs at least one assignment".into()));
    }
    let quantity = query_quantity(&consequent, &intervention, &observations);
    let cf_query = CounterfactualQuery::bound(
        observations.clone(),
        intervention.clone(),
        consequent.clone(),
    );
    let consistent = cf_query.intervention_agrees_with_observations();

    let mut reports = Vec::new();
    let shape = dataset
        .iv
        .as_ref()
        .and_then(|_| detect_iv_shape(&observations, &intervention, &consequent));
    match method {
        Method::Lp => {
            let result = bound_query(&dataset.model, &dataset.observed, &cf_query)?;
            let mut report = BoundsReport::from_bounds(&quantity, &result, places);
            if consistent {
                report = report.with_note(
                    "intervention agrees with the observation; value pinned by consistency"
                        .to_string(),
                );
            }
            reports.push(report);
        }
        Method::Symbolic | Method::Both => {
            let p = require_iv(&dataset, "counterfactual --method symbolic")?;
            let Some(shape) = shape else {
                return Err(CliError::Usage(
                    "no closed form for this query; use --method lp".to_string(),
                ));
            };
            if !dataset.observed.subjective().is_empty() {
                return Err(CliError::Usage(
                    "closed forms ignore subjective constraints; use --method lp".to_string(),
                ));
            }
            let symbolic = symbolic_for_shape(&p, shape)?;
            if method == Method::Both {
                let lp_result = bound_query(&dataset.model, &dataset.observed, &cf_query)?;
                let note = agreement_note(&lp_result, &symbolic, &quantity)?;
                reports.push(BoundsReport::from_bounds(&quantity, &lp_result, places).with_note(note));
            }
            reports.push(BoundsReport::from_symbolic(&quantity, &symbolic, places));
        }
    }

    let mut human = String::new();
    let _ = writeln!(human, "dataset: {label}");
    for report in &reports {
        let _ = writeln!(human, "{}", report.human());
    }
    let human = human.trim_end().to_string();
    let body = json!({
        "command": "counterfactual",
        "dataset": label,
        "precision": places,
        "reports": reports,
    });
    Ok(CommandOutput::new(human, body))
}

fn load_model(spec: &str) -> Result<CausalModel, CliError> {
    if let Some(model) = datasets::builtin_model(spec) {
        return Ok(model);
    }
    let path = PathBuf::from(spec);
    let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io {
        path,
        source,
    })?;
    let file: ModelFile = serde_json::from_str(&text).map_err(FormatError::from)?;
    let variables = file
        .variables
        .iter()
        .map(|v| crate::rfm::Variable {
            name: v.name.clone(),
            domain: v.domain.clone(),
            parents: v.parents.clone(),
        })
        .collect();
    Ok(CausalModel::new(variables, file.clusters)?)
}

fn run_exact(
    model: String,
    prior: PathBuf,
    action: String,
    given: Option<String>,
    query: String,
    places: u32,
) -> Result<CommandOutput, CliError> {
    let model = load_model(&model)?;
    let prior_text = std::fs::read_to_string(&prior).map_err(|source| CliError::Io {
        path: prior.clone(),
        source,
    })?;
    let priors = parse_priors(&prior_text, &model)?;
    let intervention = Intervention(value_map(parse_assignments(&action)?));
    let observations = value_map(parse_assignments(given.as_deref().unwrap_or(""))?);
    let consequent = value_map(parse_assignments(&query)?);
    if consequent.is_empty() {
        return Err(CliError::Usage("--query needs at least one assignment".into()));
    }
    let value = crate::rfm::query_exact(&model, &priors, &observations, &intervention, &consequent)?;
    let quantity = query_quantity(&consequent, &intervention, &observations);
    let report = ValueReport::new(&quantity, &value, places);
    let human = report.human();
    let body = json!({
        "command": "exact",
        "precision": places,
        "report": report,
    });
    Ok(CommandOutput::new(human, body))
}

fn run_simulate(
    seed: u64,
    q_file: Option<PathBuf>,
    n: u64,
    p_z1: String,
    pushforward: bool,
    places: u32,
) -> Result<CommandOutput, CliError> {
    let q = match &q_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            parse_q_file(&text)?
        }
        None => synth::random_q(seed, synth::DEFAULT_GRID),
    };
    let p_z1 = parse_rational(&p_z1).map_err(FormatError::from)?;
    if p_z1.is_negative() || p_z1 > Rational::one() {
        return Err(CliError::Usage("--p-z1 must lie in [0, 1]".into()));
    }

    let exact = synth::pushforward_distribution(&q, p_z1.clone());
    let bounds = ace_bounds_lp(&exact)?;
    let true_ace = crate::bounds::true_ace(&q);
    let contained = bounds.lower <= true_ace && true_ace <= bounds.upper;

    let (emitted, deviation) = if pushforward {
        (exact.clone(), None)
    } else {
        let trial = synth::simulate_trial(&q, &p_z1, n, seed);
        let max_deviation = trial
            .empirical
            .entries()
            .iter()
            .zip(exact.entries())
            .map(|(a, b)| (a - b).abs())
            .max()
            .expect("eight entries");
        (trial.empirical, Some(max_deviation))
    };
    let dataset_file = iv_dataset_file(&emitted);
    let dataset_json = serde_json::to_value(&dataset_file).expect("serializable");

    let ace_value = exact_value(&true_ace, places);
    let lower = exact_value(&bounds.lower, places);
    let upper = exact_value(&bounds.upper, places);
    let mut human = String::new();
    let _ = writeln!(human, "seed: {seed}");
    let _ = writeln!(
        human,
        "mode: {}",
        if pushforward {
            "pushforward".to_string()
        } else {
            format!("sampled (n = {n})")
        }
    );
    let _ = writeln!(
        human,
        "true ACE: {} (exact {})",
        ace_value.decimal, ace_value.exact
    );
    let _ = writeln!(
        human,
        "pushforward bounds on ACE: [{}, {}] (exact [{}, {}])",
        lower.decimal, upper.decimal, lower.exact, upper.exact
    );
    let _ = writeln!(
        human,
        "true ACE inside bounds: {}",
        if contained { "yes" } else { "no" }
    );
    if let Some(dev) = &deviation {
        let dev_value = exact_value(dev, places.max(4));
        let _ = writeln!(
            human,
            "max |empirical - pushforward|: {} (exact {})",
            dev_value.decimal, dev_value.exact
        );
    }
    let _ = writeln!(human, "dataset:");
    let _ = write!(
        human,
        "{}",
        serde_json::to_string_pretty(&dataset_json).expect("serializable")
    );

    let body = json!({
        "command": "simulate",
        "seed": seed,
        "samples": if pushforward { serde_json::Value::Null } else { json!(n) },
        "pushforward": pushforward,
        "true_ace": ace_value,
        "bounds": { "lower": lower, "upper": upper },
        "true_ace_inside_bounds": contained,
        "max_deviation": deviation.as_ref().map(|d| exact_value(d, places.max(4))),
        "dataset": dataset_json,
    });
    Ok(CommandOutput::new(human, body))
}

fn run_datasets(action: DatasetsCmd) -> Result<CommandOutput, CliError> {
    match action {
        DatasetsCmd::List => {
            let names = datasets::list();
            Ok(CommandOutput::new(
                names.join("\n"),
                json!({ "command": "datasets", "names": names }),
            ))
        }
        DatasetsCmd::Show { name } => {
            let text = datasets::builtin_json(&name)
                .ok_or_else(|| CliError::Usage(format!("unknown built-in dataset `{name}`")))?;
            let parsed: serde_json::Value =
                serde_json::from_str(text).expect("built-ins are valid JSON");
            Ok(CommandOutput::new(
                text.to_string(),
                json!({ "command": "datasets", "name": name, "dataset": parsed }),
            ))
        }
    }
}

fn run_feasible(source: Source, places: u32) -> Result<CommandOutput, CliError> {
    let (dataset, label) = source.load()?;
    let _ = places;
    if let Some(p) = &dataset.iv {
        match check_feasibility(p) {
            Feasibility::Feasible { witness } => {
                if !dataset.observed.subjective().is_empty() {
                    verify_observed(&dataset.model, &dataset.observed)?;
                }
                let names = crate::bounds::iv_parameter_names();
                let mut human = format!("dataset: {label}\nfeasible: yes\nwitness:");
                let mut map = serde_json::Map::new();
                for (name, value) in names.iter().zip(&witness) {
                    if !value.is_zero() {
                        let _ = write!(human, "\n  {name} = {}", format_ratio(value));
                    }
                    map.insert(name.clone(), json!(format_ratio(value)));
                }
                Ok(CommandOutput::new(
                    human,
                    json!({
                        "command": "feasible",
                        "dataset": label,
                        "feasible": true,
                        "witness": serde_json::Value::Object(map),
                    }),
                ))
            }
            Feasibility::Infeasible { certificate } => {
                let rendered: Vec<String> = certificate.iter().map(format_ratio).collect();
                let human = format!(
                    "dataset: {label}\nfeasible: no\ncertificate: [{}]",
                    rendered.join(", ")
                );
                let mut output = CommandOutput::new(
                    human,
                    json!({
                        "command": "feasible",
                        "dataset": label,
                        "feasible": false,
                        "certificate": rendered,
                    }),
                );
                output.exit = 2;
                Ok(output)
            }
        }
    } else {
        match verify_observed(&dataset.model, &dataset.observed) {
            Ok(()) => Ok(CommandOutput::new(
                format!("dataset: {label}\nfeasible: yes"),
                json!({ "command": "feasible", "dataset": label, "feasible": true }),
            )),
            Err(BoundsError::InfeasibleObserved { cluster, certificate }) => {
                let rendered: Vec<String> = certificate.iter().map(format_ratio).collect();
                let human = format!(
                    "dataset: {label}\nfeasible: no\ncluster: {cluster:?}\ncertificate: [{}]",
                    rendered.join(", ")
                );
                let mut output = CommandOutput::new(
                    human,
                    json!({
                        "command": "feasible",
                        "dataset": label,
                        "feasible": false,
                        "cluster": cluster,
                        "certificate": rendered,
                    }),
                );
                output.exit = 2;
                Ok(output)
            }
            Err(other) => Err(other.into()),
        }
    }
}
