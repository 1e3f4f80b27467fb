use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use serde_json::json;
use thiserror::Error;

use infer_align::exact::{exact_chi2_policy, exact_kl_policy};
use infer_align::experiments::{
    lambda_concentration_trial, prescribed_sample_size, summarize, sweep_beta, sweep_n, Algorithm,
    ExperimentRecord,
};
use infer_align::instances::{
    build_cinf_lower_instance, build_cone_lower_instance, build_skyline_instance, CinfVariant,
    ConeVariant, DiscreteDistribution, LowerBoundFixture, ProblemInstance, TabularSpec,
};
use infer_align::io::{
    checksum, load_instance, parse_config, parse_config_str, render_instance, render_records,
    Command, ConfigError, Format, RecordsError, RunConfig,
};
use infer_align::verify;

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Run(#[from] infer_align::Error),
    #[error(transparent)]
    Records(#[from] RecordsError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0} acceptance check(s) failed")]
    Verify(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "infer-align", version, about = "Inference-time alignment on tabular instances")]
struct Cli {
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads. Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Instance file; overrides the one named in the config.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Comma-separated N values.
    #[arg(long, value_delimiter = ',')]
    n: Vec<u64>,
    /// Comma-separated beta values.
    #[arg(long, value_delimiter = ',')]
    beta: Vec<f64>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    prompt: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Print the exact chi-squared and KL regularized policies.
    Solve(RunArgs),
    /// Best-of-N records.
    Bon(RunArgs),
    /// Pessimistic sampler records.
    Itp(RunArgs),
    /// Records over the N grid.
    SweepN {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_delimiter = ',')]
        algorithms: Vec<Algorithm>,
    },
    /// Records over the beta grid at one N.
    SweepBeta {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_delimiter = ',')]
        algorithms: Vec<Algorithm>,
    },
    /// How often the estimated normalizer lands in the good window.
    Concentration {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Run the acceptance checks (all, or the listed ids).
    Verify { criteria: Vec<u8> },
    /// Write the lower-bound constructions as instance files.
    Fixtures {
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
}

pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    match &cli.command {
        Cmd::Solve(run) => solve(&resolve(&cli, Command::Solve, run)?),
        Cmd::Bon(run) => {
            let mut cfg = resolve(&cli, Command::Bon, run)?;
            cfg.algorithms = vec![Algorithm::Bon];
            records(&cfg, false)
        }
        Cmd::Itp(run) => {
            let mut cfg = resolve(&cli, Command::Itp, run)?;
            cfg.algorithms = vec![Algorithm::Itp];
            records(&cfg, false)
        }
        Cmd::SweepN { run, algorithms } => {
            let mut cfg = resolve(&cli, Command::SweepN, run)?;
            if !algorithms.is_empty() {
                cfg.algorithms = algorithms.clone();
            }
            records(&cfg, false)
        }
        Cmd::SweepBeta { run, algorithms } => {
            let mut cfg = resolve(&cli, Command::SweepBeta, run)?;
            if !algorithms.is_empty() {
                cfg.algorithms = algorithms.clone();
            }
            records(&cfg, true)
        }
        Cmd::Concentration { run, delta, trials } => {
            let mut cfg = resolve(&cli, Command::Concentration, run)?;
            if let Some(d) = delta {
                cfg.delta = *d;
            }
            if let Some(t) = trials {
                cfg.trials = *t;
            }
            cfg.validate("command line")?;
            concentration(&cfg, run.n.first().copied())
        }
        Cmd::Verify { criteria } => verify_cmd(criteria),
        Cmd::Fixtures { dir } => fixtures(dir),
    }
}

/// Config file (if any) overlaid with command-line values.
fn resolve(cli: &Cli, command: Command, run: &RunArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let cfg = parse_config(path)?;
            if cfg.command != command {
                return Err(CliError::Usage(format!(
                    "{} is a `{}` config, not `{}`",
                    path.display(),
                    cfg.command.name(),
                    command.name()
                )));
            }
            cfg
        }
        None => {
            let instance = run
                .instance
                .as_ref()
                .ok_or_else(|| CliError::Usage("either --config or --instance is required".into()))?;
            let text = json!({ "instance": instance, "command": command }).to_string();
            parse_config_str(&text, Path::new("."), "command line")?
        }
    };
    if let Some(p) = &run.instance {
        cfg.instance = p.clone();
    }
    if !run.n.is_empty() {
        cfg.n_grid = run.n.clone();
    }
    if !run.beta.is_empty() {
        cfg.beta_grid = run.beta.clone();
    }
    if let Some(r) = run.replicates {
        cfg.replicates = r;
    }
    if run.prompt.is_some() {
        cfg.prompt = run.prompt.clone();
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    cfg.validate("command line")?;
    Ok(cfg)
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => std::io::stdout().write_all(bytes).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn selected_prompts(instance: &ProblemInstance, prompt: Option<&str>) -> Result<Vec<usize>, CliError> {
    match prompt {
        Some(id) => Ok(vec![instance.prompt_index(id)?]),
        None => Ok((0..instance.prompts().len()).collect()),
    }
}

fn solve(cfg: &RunConfig) -> Result<(), CliError> {
    let instance = load_instance(&cfg.instance)?;
    let mut text = String::new();
    for i in selected_prompts(&instance, cfg.prompt.as_deref())? {
        for &beta in &cfg.beta_grid {
            let chi2 = exact_chi2_policy(&instance, i, beta)?;
            let kl = exact_kl_policy(&instance, i, beta)?;
            let line = json!({
                "prompt": instance.prompt(i).id(),
                "beta": beta,
                "lambda": chi2.lambda,
                "chi2_policy": chi2.policy.weights(),
                "chi2_objective": chi2.objective_value,
                "kl_policy": kl.weights(),
            });
            text.push_str(&line.to_string());
            text.push('\n');
        }
    }
    emit(cfg.out.as_deref(), text.as_bytes())
}

fn log_cells(records: &[ExperimentRecord]) {
    for c in summarize(records) {
        let beta = c.beta.map_or_else(|| "-".to_string(), |b| b.to_string());
        info!(
            "{} N={} beta={} regret={:.5}+-{:.5} queries={:.1} fallback={:.3}",
            c.algorithm, c.n, beta, c.regret.mean, c.regret.std_error, c.queries_used, c.fallback_rate
        );
    }
}

fn records(cfg: &RunConfig, over_beta: bool) -> Result<(), CliError> {
    let instance = load_instance(&cfg.instance)?;
    let sweep = cfg.sweep();
    let records = if over_beta {
        sweep_beta(&instance, &sweep)?
    } else {
        sweep_n(&instance, &sweep)?
    };
    log_cells(&records);
    let bytes = render_records(&records, cfg.format)?;
    emit(cfg.out.as_deref(), &bytes)?;
    eprintln!("sha256 {}", checksum(&bytes));
    Ok(())
}

fn concentration(cfg: &RunConfig, n: Option<u64>) -> Result<(), CliError> {
    let instance = load_instance(&cfg.instance)?;
    let mut text = String::new();
    for i in selected_prompts(&instance, cfg.prompt.as_deref())? {
        for &beta in &cfg.beta_grid {
            let n = n.unwrap_or_else(|| prescribed_sample_size(instance.reward_cap(), beta, cfg.delta));
            let fraction =
                lambda_concentration_trial(&instance, i, beta, n as usize, cfg.trials, cfg.seed)?;
            let line = json!({
                "prompt": instance.prompt(i).id(),
                "beta": beta,
                "delta": cfg.delta,
                "N": n,
                "trials": cfg.trials,
                "fraction": fraction,
            });
            text.push_str(&line.to_string());
            text.push('\n');
        }
    }
    emit(cfg.out.as_deref(), text.as_bytes())
}

fn verify_cmd(criteria: &[u8]) -> Result<(), CliError> {
    if let Some(bad) = criteria.iter().find(|&&id| !(1..=10).contains(&id)) {
        return Err(CliError::Usage(format!("no acceptance check {bad}; ids run 1 to 10")));
    }
    let mut failed = 0;
    for (id, check) in verify::CRITERIA {
        if criteria.is_empty() || criteria.contains(&id) {
            let report = check();
            println!("{report}");
            failed += usize::from(!report.passed);
        }
    }
    if failed > 0 {
        return Err(CliError::Verify(failed));
    }
    Ok(())
}

fn fixtures(dir: &Path) -> Result<(), CliError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let write = |name: &str, text: String| -> Result<(), CliError> {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(io(&path))
    };
    let mut manifest = serde_json::Map::new();

    let two_arm = infer_align::instances::build_tabular_instance(&TabularSpec::single(
        vec![0.5, 0.5],
        vec![1.0, 0.0],
        vec![1.0, 0.0],
        1.0,
    ))?;
    write("two_arm.json", render_instance(&two_arm))?;
    manifest.insert("two_arm.json".into(), json!({ "kind": "two-arm" }));

    let mut lower = |name: &str, f: LowerBoundFixture, params: serde_json::Value| -> Result<(), CliError> {
        write(name, render_instance(&f.instance))?;
        manifest.insert(
            name.into(),
            json!({
                "params": params,
                "reward_shift": f.reward_map.shift,
                "reward_scale": f.reward_map.scale,
            }),
        );
        Ok(())
    };
    lower(
        "cinf_small_n.json",
        build_cinf_lower_instance(64.0, 16, 0.05, CinfVariant::SmallN)?,
        json!({ "C": 64.0, "N": 16, "eps": 0.05 }),
    )?;
    lower(
        "cinf_large_n.json",
        build_cinf_lower_instance(64.0, 4096, 0.05, CinfVariant::LargeN)?,
        json!({ "C": 64.0, "N": 4096, "eps": 0.05 }),
    )?;
    lower(
        "cone_part1.json",
        build_cone_lower_instance(20.0, 1e-9, ConeVariant::PART1, 0.05, 4096)?,
        json!({ "C": 20.0, "tail": 1e-9, "eps": 0.05, "N": 4096, "p": 1.0 / 3.0 }),
    )?;
    lower(
        "cone_part2.json",
        build_cone_lower_instance(20.0, 1e-9, ConeVariant::Part2, 0.05, 4096)?,
        json!({ "C": 20.0, "tail": 1e-9, "eps": 0.05, "N": 4096 }),
    )?;
    let dist = |w: Vec<f64>| DiscreteDistribution::new(w);
    let skyline = build_skyline_instance(
        &dist(vec![0.5, 0.3, 0.2])?,
        &dist(vec![0.2, 0.3, 0.5])?,
        &dist(vec![0.6, 0.3, 0.1])?,
        0.1,
    )?;
    lower(
        "skyline.json",
        skyline.fixture,
        json!({ "eps": 0.1, "pi_hat": [0.6, 0.3, 0.1], "chi_gap": skyline.chi_gap }),
    )?;

    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    write("manifest.json", text)?;
    info!("wrote {} fixtures to {}", manifest.len(), dir.display());
    Ok(())
}
