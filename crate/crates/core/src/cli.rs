//! Command-line front end. Exit codes: 0 every check passed, 1 a check
//! failed, 2 the input could not be read or parsed, 3 the scenario is invalid.

use std::ffi::OsString;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use rayon::prelude::*;
use serde_json::json;

use crate::error::Error;
use crate::field::GaussRat;
use crate::moduli::{
    cartan_check, higgs_from_y, identity_check, liouville_lambda, pullback_omega, raw_pushforward, symplectic_omega,
    IdentityReport,
};
use crate::report::{Check, Report};
use crate::residue::{residues, OneForm};
use crate::scenario::{parse_scenario, Scenario};
use crate::solver::build_section_space;
use crate::solver::random::{corrupt_tangent, random_instance, trial_rng};

#[derive(Parser, Debug)]
#[command(name = "isotropy", version, about = "Exact checks of the moment-map isotropy theorem on P^1")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Add wall-clock timings to every check (makes reports run-dependent).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct ScenarioArg {
    /// Scenario JSON file.
    scenario: String,
}

#[derive(Args, Debug)]
struct SuiteArgs {
    /// Scenario JSON file.
    scenario: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of trials [default: 50 for random-suite, 20 for corrupt-suite]
    #[arg(long)]
    trials: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate a scenario.
    Validate(ScenarioArg),
    /// Residues of the scenario form (default: alpha) and their sum.
    ResidueSum(ScenarioArg),
    /// Liouville form on the first Higgs tangent.
    Lambda(ScenarioArg),
    /// Symplectic form on the two Higgs tangents.
    Omega(ScenarioArg),
    /// Pullback of the symplectic form to the section stack.
    PullbackOmega(ScenarioArg),
    /// Per-point identity and residue bookkeeping.
    CheckIdentity(ScenarioArg),
    /// Omega recomputed from Lambda with jets.
    CheckCartan(ScenarioArg),
    /// Pullback vanishes, with the identity steps that force it.
    CheckTheorem(ScenarioArg),
    /// Seeded random instances; every pullback must vanish.
    RandomSuite(SuiteArgs),
    /// Seeded corrupted instances; every one must be detected.
    CorruptSuite(SuiteArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::ResidueSum(_) => "residue-sum",
            Command::Lambda(_) => "lambda",
            Command::Omega(_) => "omega",
            Command::PullbackOmega(_) => "pullback-omega",
            Command::CheckIdentity(_) => "check-identity",
            Command::CheckCartan(_) => "check-cartan",
            Command::CheckTheorem(_) => "check-theorem",
            Command::RandomSuite(_) => "random-suite",
            Command::CorruptSuite(_) => "corrupt-suite",
        }
    }

    fn path(&self) -> &str {
        match self {
            Command::Validate(a)
            | Command::ResidueSum(a)
            | Command::Lambda(a)
            | Command::Omega(a)
            | Command::PullbackOmega(a)
            | Command::CheckIdentity(a)
            | Command::CheckCartan(a)
            | Command::CheckTheorem(a) => &a.scenario,
            Command::RandomSuite(s) | Command::CorruptSuite(s) => &s.scenario,
        }
    }
}

/// What a run produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

/// Runs the CLI on `argv` (including the program name).
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_PASS };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text }
            } else {
                Outcome { code, stdout: text, stderr: String::new() }
            };
        }
    };
    let name = cli.command.name();
    let scenario = std::fs::read_to_string(cli.command.path())
        .map_err(|e| Error::Io(format!("{}: {e}", cli.command.path())))
        .and_then(|text| parse_scenario(&text));
    let scenario = match scenario {
        Ok(s) => s,
        Err(e) => return input_error(name, cli.format, e),
    };
    let report = execute(&cli, &scenario);
    let code = if report.passed() { EXIT_PASS } else { EXIT_CHECK_FAILED };
    let stdout = match cli.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    Outcome { code, stdout, stderr: String::new() }
}

fn input_error(command: &str, format: Format, e: Error) -> Outcome {
    let (code, stage) = match e {
        Error::Validation { .. } => (EXIT_VALIDATION, "validation"),
        _ => (EXIT_PARSE, "parse"),
    };
    let mut report = Report::new(command, None);
    report.push(Check::new(stage, false, e.to_string()));
    match format {
        Format::Json => Outcome { code, stdout: report.to_json(), stderr: String::new() },
        Format::Text => Outcome { code, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn timed(timing: bool, f: impl FnOnce() -> Check) -> Check {
    let start = Instant::now();
    let mut c = f();
    if timing {
        c.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    c
}

fn failed(name: &str, e: Error) -> Check {
    Check::new(name, false, format!("error: {e}"))
}

fn execute(cli: &Cli, s: &Scenario) -> Report {
    let mut report = Report::new(cli.command.name(), s.name.clone());
    let t = cli.timing;
    match &cli.command {
        Command::Validate(_) => validate(&mut report, s, t),
        Command::ResidueSum(_) => {
            report.push(timed(t, || residue_sum_check(s.form.as_ref().unwrap_or(s.curve.alpha()))))
        }
        Command::Lambda(_) => report.push(timed(t, || {
            s.higgs_instance()
                .and_then(|(p, t1, _)| liouville_lambda(&p, &t1))
                .map_or_else(|e| failed("lambda", e), |v| Check::new("lambda", true, v.to_string()))
        })),
        Command::Omega(_) => report.push(timed(t, || {
            s.higgs_instance()
                .and_then(|(p, t1, t2)| symplectic_omega(&p, &t1, &t2))
                .map_or_else(|e| failed("omega", e), |v| Check::new("omega", true, v.to_string()))
        })),
        Command::PullbackOmega(_) => report.push(timed(t, || {
            s.y_instance()
                .and_then(|(p, t1, t2)| pullback_omega(&p, &t1, &t2))
                .map_or_else(|e| failed("pullback-omega", e), |v| Check::new("pullback-omega", v.is_zero(), v.to_string()))
        })),
        Command::CheckIdentity(_) => match s.y_instance().and_then(|(p, t1, t2)| identity_check(&p, &t1, &t2)) {
            Ok(r) => identity_checks(&mut report, &r),
            Err(e) => report.push(failed("identity", e)),
        },
        Command::CheckCartan(_) => report.push(timed(t, || {
            match s.higgs_instance().and_then(|(p, t1, t2)| cartan_check(&p, &t1, &t2)) {
                Ok(c) => Check::new("cartan", c.holds, c.alternating_sum.clone())
                    .with_details(serde_json::to_value(&c).expect("serializable")),
                Err(e) => failed("cartan", e),
            }
        })),
        Command::CheckTheorem(_) => {
            let start = Instant::now();
            match s.y_instance().and_then(|(p, t1, t2)| {
                let v = pullback_omega(&p, &t1, &t2)?;
                Ok((v, identity_check(&p, &t1, &t2)?))
            }) {
                Ok((v, r)) => {
                    let mut c = Check::new("pullback-omega", v.is_zero(), v.to_string());
                    if t {
                        c.elapsed_ms = Some(start.elapsed().as_millis() as u64);
                    }
                    report.push(c);
                    identity_checks(&mut report, &r);
                }
                Err(e) => report.push(failed("pullback-omega", e)),
            }
        }
        Command::RandomSuite(a) => random_suite(&mut report, s, a.seed, a.trials.unwrap_or(50), t),
        Command::CorruptSuite(a) => corrupt_suite(&mut report, s, a.seed, a.trials.unwrap_or(20), t),
    }
    report
}

fn validate(report: &mut Report, s: &Scenario, t: bool) {
    report.push(Check::new("curve", true, format!("{} marked points", s.curve.len())));
    report.push(Check::new("representation", true, s.rep.name()));
    let Some(bundle) = &s.bundle else {
        report.push(Check::new("bundle", true, "random"));
        return;
    };
    report.push(Check::new("bundle", true, "explicit cocycles"));
    report.push(timed(t, || match build_section_space(bundle, s.bounds) {
        Ok(space) => Check::new("section-space", true, format!("dimension {}", space.dim())),
        Err(e) => failed("section-space", e),
    }));
    if s.point.is_some() {
        report.push(Check::new("section", true, "explicit"));
    }
    if !s.tangents.is_empty() {
        report.push(Check::new("tangents", true, format!("{} explicit", s.tangents.len())));
    }
    if let Some(h) = &s.higgs {
        report.push(Check::new("higgs", true, format!("{} explicit tangents", h.tangents.len())));
    }
}

fn residue_sum_check(form: &OneForm) -> Check {
    match residues(form) {
        Ok(rs) => {
            let sum: GaussRat = rs.iter().map(|(_, r)| r.clone()).sum();
            let listed: serde_json::Map<String, serde_json::Value> =
                rs.iter().map(|(p, r)| (p.to_string(), json!(r.to_string()))).collect();
            Check::new("residue-sum", sum.is_zero(), sum.to_string())
                .with_details(json!({ "form": form.coeff.display_in("z"), "residues": listed }))
        }
        Err(e) => failed("residue-sum", e),
    }
}

fn identity_checks(report: &mut Report, r: &IdentityReport) {
    let details = serde_json::to_value(r).expect("serializable");
    let all_points = r.points.iter().all(|p| p.holds);
    let residuals: Vec<&str> = r.points.iter().map(|p| p.residual.as_str()).collect();
    report.push(Check::new("identity-residuals", all_points, residuals.join(", ")).with_details(details));
    let regular = r.points.iter().all(|p| p.regular_on_disk && p.regular_residue == "0");
    let regular_values: Vec<&str> = r.points.iter().map(|p| p.regular_residue.as_str()).collect();
    report.push(Check::new("regular-part-residues", regular, regular_values.join(", ")));
    report.push(Check::new("alpha-residue-sum", r.alpha_residue_sum == "0", r.alpha_residue_sum.clone()));
    report.push(Check::new("global-residue-sum", r.global_residue_sum == "0", r.global_residue_sum.clone()));
    report.push(Check::new("identity-total", r.lhs_residue_total == r.pullback_omega, r.lhs_residue_total.clone()));
    // keep the full breakdown only where it helps
    if all_points {
        report.checks.iter_mut().for_each(|c| {
            if c.name == "identity-residuals" {
                c.details = None;
            }
        });
    }
}

fn random_suite(report: &mut Report, s: &Scenario, seed: u64, trials: u64, t: bool) {
    let recipe = s.recipe();
    let checks: Vec<Check> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let name = format!("trial-{trial}");
            timed(t, || {
                let run = || -> Result<Check, Error> {
                    let inst = random_instance(&s.curve, &s.rep, &recipe, &s.generator, s.bounds, seed, trial)?;
                    let v = pullback_omega(&inst.point, &inst.t1, &inst.t2)?;
                    let id = identity_check(&inst.point, &inst.t1, &inst.t2)?;
                    let ok = v.is_zero() && id.holds;
                    let mut details = json!({
                        "attempts": inst.attempts,
                        "section_dim": inst.section_dim,
                        "identity_holds": id.holds,
                    });
                    if !ok {
                        details["identity"] = serde_json::to_value(&id).expect("serializable");
                    }
                    Ok(Check::new(&name, ok, v.to_string()).with_details(details))
                };
                run().unwrap_or_else(|e| failed(&name, e))
            })
        })
        .collect();
    let zeros = checks.iter().filter(|c| c.passed()).count();
    for c in checks {
        report.push(c);
    }
    report.push(Check::new("all-trials", zeros as u64 == trials, format!("{zeros}/{trials}")));
}

fn corrupt_suite(report: &mut Report, s: &Scenario, seed: u64, trials: u64, t: bool) {
    let recipe = s.recipe();
    let checks: Vec<Check> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let name = format!("trial-{trial}");
            timed(t, || {
                let run = || -> Result<Check, Error> {
                    let inst = random_instance(&s.curve, &s.rep, &recipe, &s.generator, s.bounds, seed, trial)?;
                    let mut rng = trial_rng(seed ^ 0x5eed_c0de, trial);
                    let (bad, at) = corrupt_tangent(&inst.t1, &mut rng);
                    let p = &inst.point;
                    let rejected = bad.validate(p).err().map(|e| e.to_string());
                    let hp = higgs_from_y(p)?;
                    let raw = symplectic_omega(&hp, &raw_pushforward(p, &bad)?, &raw_pushforward(p, &inst.t2)?)?;
                    let id = identity_check(p, &bad, &inst.t2)?;
                    let detected = rejected.is_some() || !raw.is_zero() || !id.holds;
                    let summary = if detected { "detected" } else { "missed" };
                    Ok(Check::new(&name, detected, summary).with_details(json!({
                        "corrupted_point": at,
                        "validator": rejected.unwrap_or_else(|| "accepted".into()),
                        "raw_omega": raw.to_string(),
                        "identity_holds": id.holds,
                    })))
                };
                run().unwrap_or_else(|e| failed(&name, e))
            })
        })
        .collect();
    let detected = checks.iter().filter(|c| c.passed()).count();
    for c in checks {
        report.push(c);
    }
    report.push(Check::new("all-detected", detected as u64 == trials, format!("{detected}/{trials}")));
}
