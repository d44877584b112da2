//! The `competition` command line. Every subcommand reads one TOML config
//! (see [`crate::config`]), writes `<out>/<subcommand>.txt` (plus CSV files
//! when `experiment.csv = true`) atomically, and prints the same summary to
//! standard output.
//!
//! Exit status: 0 when every computation completed and, where the subcommand
//! certifies something, the certificate holds; 1 otherwise; 2 for unusable
//! configuration.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::analysis::{
    classify, functionals, hitting_stats, lamperti_exponent, linear_diagnostics, lln_check,
    reuter_series, s_drift, un_squared_one_step, urn_moment_recursion, urn_simulate, RateSequences,
    TildeSeries,
};
use crate::config::{FunctionKind, RunConfig, SeriesSource};
use crate::lyapunov::{certify, leading_order, LogLyapunov, LyapunovFunction, PowerLyapunov};
use crate::rates::{Model, TypeIIModel};
use crate::sim::{par_map_seeds, run as run_chain, with_workers, Clock, Recording, StopRule};
use crate::stream::seeds_from_master;

#[derive(Debug, Parser)]
#[command(
    name = "competition",
    version,
    about = "Simulate and check two-dimensional competition processes"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed (overrides experiment.seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses all cores. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Config override `section.key=value`, repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Simulate trajectories and report their endpoints.
    Simulate,
    /// Classify late boundary behaviour of long runs.
    Classify,
    /// Estimate first axis-hitting times.
    Hitting,
    /// Slope of S_n along the pre-boundary segment (type II).
    Lln,
    /// Auxiliary urn paths and exact moments.
    Urn,
    /// Reuter's series A and Ã.
    Series,
    /// Certify a drift inequality on a strip.
    Lyapunov,
    /// Constants of the linear type II model.
    Diagnostics,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Classify => "classify",
            Command::Hitting => "hitting",
            Command::Lln => "lln",
            Command::Urn => "urn",
            Command::Series => "series",
            Command::Lyapunov => "lyapunov",
            Command::Diagnostics => "diagnostics",
        }
    }
}

/// What a subcommand produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub summary: String,
    /// Extra files as (name, contents).
    pub files: Vec<(String, String)>,
    pub ok: bool,
}

/// Parses arguments, runs, and maps the result to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cfg = match load_config(&cli.common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    match run(cli.command, &cfg, &cli.common.out, cli.common.workers) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

pub fn load_config(common: &Common) -> Result<RunConfig> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| anyhow!("--config is required"))?;
    let mut overrides = common.overrides.clone();
    if let Some(seed) = common.seed {
        overrides.push(format!("experiment.seed={seed}"));
    }
    Ok(RunConfig::load(path, &overrides)?)
}

/// Runs `command` and writes its files under `out`.
pub fn run(command: Command, cfg: &RunConfig, out: &Path, workers: usize) -> Result<Outcome> {
    let outcome = with_workers(workers, || execute(command, cfg))??;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let header = cfg.header(command.name());
    write_atomic(
        &out.join(format!("{}.txt", command.name())),
        &header,
        &outcome.summary,
    )?;
    for (name, body) in &outcome.files {
        write_atomic(&out.join(name), &header, body)?;
    }
    Ok(outcome)
}

fn write_atomic(path: &Path, header: &str, body: &str) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(header.as_bytes())?;
    tmp.write_all(body.as_bytes())?;
    tmp.persist(path)
        .map_err(|e| anyhow!("writing {}: {}", path.display(), e.error))?;
    Ok(())
}

/// Computes a subcommand without touching the file system.
pub fn execute(command: Command, cfg: &RunConfig) -> Result<Outcome> {
    let model = cfg.model()?;
    match command {
        Command::Simulate => simulate_cmd(cfg, &model),
        Command::Classify => classify_cmd(cfg, &model),
        Command::Hitting => hitting_cmd(cfg, &model),
        Command::Lln => lln_cmd(cfg, &model),
        Command::Urn => urn_cmd(cfg, &model),
        Command::Series => series_cmd(cfg, &model),
        Command::Lyapunov => lyapunov_cmd(cfg, &model),
        Command::Diagnostics => diagnostics_cmd(cfg, &model),
    }
}

fn stop_rule(cfg: &RunConfig) -> StopRule {
    let e = &cfg.experiment;
    let mut rule = StopRule::jumps(e.jumps);
    rule.max_time = e.max_time;
    rule.stop_on_boundary = e.stop_on_boundary;
    rule
}

fn seeds(cfg: &RunConfig) -> Vec<u64> {
    seeds_from_master(cfg.experiment.seed, cfg.experiment.runs)
}

fn type_ii(model: &Model, command: &str) -> Result<TypeIIModel> {
    match model {
        Model::TypeII(m) => Ok(*m),
        other => bail!("{command} needs a type II model, got {}", other.name()),
    }
}

fn simulate_cmd(cfg: &RunConfig, model: &Model) -> Result<Outcome> {
    let e = &cfg.experiment;
    let rule = stop_rule(cfg);
    let seeds = seeds(cfg);
    let recording = if e.csv { e.recording() } else { Recording::Off };
    let runs = par_map_seeds(&seeds, |seed| {
        run_chain(model, e.initial_state(), &rule, seed, recording, e.clock())
    });
    let mut summary = String::new();
    let mut files = Vec::new();
    let mut ok = true;
    for (i, r) in runs.iter().enumerate() {
        match r {
            Ok(t) => {
                writeln!(summary, "run={i} {}", t.summary())?;
                if e.csv {
                    let mut buf = Vec::new();
                    t.write_csv(&mut buf)?;
                    files.push((format!("simulate_{i}.csv"), String::from_utf8(buf)?));
                }
            }
            Err(err) => {
                ok = false;
                writeln!(summary, "run={i} seed={} error={err}", seeds[i])?;
            }
        }
    }
    Ok(Outcome { summary, files, ok })
}

fn classify_cmd(cfg: &RunConfig, model: &Model) -> Result<Outcome> {
    let e = &cfg.experiment;
    let rule = stop_rule(cfg);
    let seeds = seeds(cfg);
    // the default thinned recording keeps every move near the axes
    let recording = match e.recording() {
        Recording::Off => Recording::default(),
        r => r,
    };
    let results = par_map_seeds(&seeds, |seed| -> Result<_> {
        let t = run_chain(model, e.initial_state(), &rule, seed, recording, e.clock())?;
        Ok(classify(model, &t, e.burn_in)?)
    });
    let mut summary = String::new();
    let mut ok = true;
    let mut hist = std::collections::BTreeMap::new();
    let mut matched = 0usize;
    for (i, r) in results.iter().enumerate() {
        match r {
            Ok(c) => {
                writeln!(summary, "run={i} seed={} {c}", seeds[i])?;
                *hist.entry(c.kappa_observed).or_insert(0usize) += 1;
                if c.confined && c.kappa_observed == c.kappa_expected {
                    matched += 1;
                }
            }
            Err(err) => {
                ok = false;
                writeln!(summary, "run={i} seed={} error={err:#}", seeds[i])?;
            }
        }
    }
    let n = seeds.len().max(1) as f64;
    let hist: Vec<String> = hist.iter().map(|(k, v)| format!("{k}:{v}")).collect();
    writeln!(summary, "kappa_observed_counts = {}", hist.join(","))?;
    writeln!(summary, "kappa_matched_fraction = {}", matched as f64 / n)?;
    writeln!(
        summary,
        "meets_threshold = {} (threshold {})",
        matched as f64 / n >= e.confine_threshold,
        e.confine_threshold
    )?;
    Ok(Outcome {
        summary,
        files: Vec::new(),
        ok,
    })
}

fn hitting_cmd(cfg: &RunConfig, model: &Model) -> Result<Outcome> {
    let e = &cfg.experiment;
    let stats = hitting_stats(model, &e.hitting_starts(), &seeds(cfg), e.cap)?;
    let mut summary = String::new();
    let mut ok = true;
    for h in &stats {
        writeln!(summary, "{h}")?;
        ok &= h.failed == 0;
    }
    Ok(Outcome {
        summary,
        files: Vec::new(),
        ok,
    })
}

fn lln_cmd(cfg: &RunConfig, model: &Model) -> Result<Outcome> {
    let e = &cfg.experiment;
    let diag = linear_diagnostics(&type_ii(model, "lln")?);
    let rule = StopRule::jumps(e.jumps).on_boundary();
    let seeds = seeds(cfg);
    let results = par_map_seeds(&seeds, |seed| -> Result<_> {
        let t = run_chain(
            model,
            e.initial_state(),
            &rule,
            seed,
            Recording::Full,
            Clock::JumpChain,
        )?;
        let report = lln_check(&t, &diag)?;
        let exponent = match e.lamperti_n {
            Some(n) => Some(lamperti_exponent(&t, &diag, n)?),
            None => None,
        };
        let csv = if e.csv {
            let mut s = String::from("n,S_n,U_n,T_n\n");
            for (n, st) in t.states() {
                let f = functionals(&diag, st);
                writeln!(s, "{n},{},{},{}", f.s, f.u, f.t)?;
            }
            Some(s)
        } else {
            None
        };
        Ok((report, exponent, csv))
    });
    let mut summary = String::new();
    let mut files = Vec::new();
    let mut ok = true;
    let (mut qualifying, mut close) = (0usize, 0usize);
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok((rep, exponent, csv)) => {
                write!(summary, "run={i} seed={} {rep}", seeds[i])?;
                if let Some(x) = exponent {
                    write!(summary, " log_S_over_log_n={x}")?;
                }
                writeln!(summary)?;
                if rep.conclusive {
                    qualifying += 1;
                    close += usize::from(rep.relative_gap.is_some_and(|g| g <= 0.1));
                }
                if let Some(csv) = csv {
                    files.push((format!("lln_{i}.csv"), csv));
                }
            }
            Err(err) => {
                ok = false;
                writeln!(summary, "run={i} seed={} error={err:#}", seeds[i])?;
            }
        }
    }
    writeln!(summary, "{diag}")?;
    writeln!(summary, "qualifying_runs = {qualifying}")?;
    writeln!(summary, "within_10_percent = {close}")?;
    Ok(Outcome { summary, files, ok })
}

fn urn_cmd(cfg: &RunConfig, model: &Model) -> Result<Outcome> {
    let e = &cfg.experiment;
    let u = match model {
        Model::AuxUrn(u) => *u,
        other => bail!("urn needs an urn model, got {}", other.name()),
    };
    let seeds = seeds(cfg);
    let paths = par_map_seeds(&seeds, |seed| {
        urn_simulate(&u, e.initial_state(), e.urn_steps, seed)
    });
    let mut summary = String::new();
    let mut files = Vec::new();
    let mut ok = true;
    for (i, p) in paths.iter().enumerate() {
        match p {
            Ok(d) => {
                writeln!(summary, "run={i} seed={} {d}", seeds[i])?;
                ok &= d.max_martingale_defect < 1e-12;
                if e.csv {
                    let mut buf = Vec::new();
                    d.write_csv(&mut buf)?;
                    files.push((format!("urn_{i}.csv"), String::from_utf8(buf)?));
                }
            }
            Err(err) => {
                ok = false;
                writeln!(summary, "run={i} seed={} error={err}", seeds[i])?;
            }
        }
    }
    let m = urn_moment_recursion(&u, e.initial_state(), e.n_max)?;
    let n = e.n_max;
    writeln!(summary, "rho = {}", m.rho)?;
    writeln!(summary, "E[U_n] at n={n} = {}", m.mean_u[n as usize])?;
    writeln!(summary, "E[U_n^2] at n={n} = {}", m.mean_u2[n as usize])?;
    writeln!(
        summary,
        "sup n^(-2rho) E[U_n^2] up to n={n} = {}",
        m.running_max[n as usize]
    )?;
    if n >= 10 {
        writeln!(
            summary,
            "running max change from n={} to n={n} = {}",
            n / 10,
            m.plateau_change(n / 10, n)
        )?;
    }
    Ok(Outcome { summary, files, ok })
}

fn series_cmd(cfg: &RunConfig, model: &Model) -> Result<Outcome> {
    let k = cfg.experiment.series_k;
    let seq = match cfg.experiment.series_source {
        SeriesSource::Model => RateSequences::from_model(model, k)?,
        SeriesSource::Symmetric => {
            let m = type_ii(model, "symmetric series")?;
            if m.alpha1 != m.alpha2 || m.beta1 != m.beta2 || m.lambda1 != m.lambda2 {
                bail!("series_source = \"symmetric\" needs symmetric parameters");
            }
            RateSequences::symmetric_linear(m.alpha1, m.beta1, m.lambda1, k)
        }
    };
    let rep = reuter_series(&seq, k)?;
    let mut summary = format!("{rep}\n");
    if let TildeSeries::Undefined { .. } = rep.a_tilde {
        writeln!(
            summary,
            "note = boundary death rates vanish; the tilde criterion does not apply"
        )?;
    }
    Ok(Outcome {
        summary,
        files: Vec::new(),
        ok: true,
    })
}

fn lyapunov_cmd(cfg: &RunConfig, model: &Model) -> Result<Outcome> {
    let e = &cfg.experiment;
    let f = match e.function {
        FunctionKind::Power => {
            let p = PowerLyapunov::new(e.nu, e.mu);
            if let Model::TypeI(m) = model {
                p.check_window(m.g1.index.min(m.g2.index))?;
            }
            LyapunovFunction::Power(p)
        }
        FunctionKind::Log => {
            let m = type_ii(model, "the logarithmic test function")?;
            LyapunovFunction::Log(LogLyapunov::new(m.lambda1, m.lambda2))
        }
    };
    let report = certify(model, f.as_test_function(), &e.levels, e.x_hi)?;
    let mut summary = format!("{report}\n");
    let mut ok = report.certified();
    for &level in &e.levels {
        match leading_order(model, &f, level) {
            Ok(t) => {
                writeln!(
                    summary,
                    "leading_order y={level}: {} x^{} L^{} negative={}",
                    t.coefficient,
                    t.power,
                    t.log_power,
                    t.is_negative()
                )?;
                ok &= t.is_negative();
            }
            Err(err) => writeln!(summary, "leading_order y={level}: unavailable ({err})")?,
        }
    }
    Ok(Outcome {
        summary,
        files: Vec::new(),
        ok,
    })
}

fn diagnostics_cmd(cfg: &RunConfig, model: &Model) -> Result<Outcome> {
    let diag = linear_diagnostics(&type_ii(model, "diagnostics")?);
    let s = cfg.experiment.initial_state();
    let f = functionals(&diag, s);
    let mut summary = format!("{diag}\n");
    writeln!(summary, "state = {s}")?;
    writeln!(summary, "R = {}", f.r)?;
    writeln!(summary, "S = {}", f.s)?;
    writeln!(summary, "T = {}", f.t)?;
    writeln!(summary, "U = {}", f.u)?;
    if s.is_interior() {
        let d = s_drift(&diag, s)?;
        writeln!(summary, "S_drift_enumerated = {}", d.enumerated)?;
        writeln!(summary, "S_drift_formula = {}", d.formula)?;
        let u = un_squared_one_step(&diag, s)?;
        writeln!(summary, "U2_lhs = {}", u.lhs)?;
        writeln!(summary, "U2_rhs_main = {}", u.rhs_main)?;
        writeln!(summary, "U2_rhs_remainder = {}", u.rhs_remainder)?;
        writeln!(summary, "U2_remainder_positive = {}", u.remainder_positive)?;
    }
    Ok(Outcome {
        summary,
        files: Vec::new(),
        ok: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_parse_after_subcommand() {
        let cli = Cli::try_parse_from([
            "competition",
            "diagnostics",
            "--config",
            "x.toml",
            "--seed",
            "5",
            "--set",
            "experiment.runs=3",
        ])
        .unwrap();
        assert_eq!(cli.command, Command::Diagnostics);
        assert_eq!(cli.common.seed, Some(5));
        assert_eq!(cli.common.overrides, vec!["experiment.runs=3"]);
    }

    #[test]
    fn diagnostics_summary() {
        let cfg = RunConfig::from_toml(
            "[model]\ntype = \"II\"\nlambda1 = 1\nlambda2 = 1\nalpha1 = 3\nalpha2 = 2\nbeta1 = 1\nbeta2 = 1\n",
        )
        .unwrap();
        let out = execute(Command::Diagnostics, &cfg).unwrap();
        assert!(out.ok);
        assert!(out.summary.contains("r = 0.618"));
        assert!(out.summary.contains("rho_tilde = 5"));
    }
}
