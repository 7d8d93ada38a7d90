mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::Parser;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use args::{Cli, Command, Format};
use report::{input, CliError, CliResult, Report, VERSION};

/// Per-run settings shared by every subcommand.
pub struct Ctx {
    pub horizon: Option<usize>,
    pub seed: Option<u64>,
}

impl Ctx {
    pub fn horizon_or(&self, default: usize) -> usize {
        self.horizon.unwrap_or(default)
    }

    pub fn seed(&self) -> CliResult<u64> {
        self.seed.ok_or_else(|| CliError::Input("this subcommand samples; --seed is required".into()))
    }
}

/// A JSON experiment description, equivalent to a command line.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentConfig {
    /// Subcommand path such as `"y-lab sum-check"`.
    subcommand: String,
    #[serde(default)]
    params: Map<String, Value>,
    seed: Option<u64>,
    horizon: Option<usize>,
    output_path: Option<String>,
}

fn config_argv(cfg: &ExperimentConfig, outer: &Cli) -> CliResult<Vec<String>> {
    let mut argv = vec!["besico".to_string()];
    let words: Vec<&str> = cfg.subcommand.split_whitespace().collect();
    if words.is_empty() || words[0] == "run" {
        return input("config subcommand must name an experiment other than run");
    }
    argv.extend(words.iter().map(|w| w.to_string()));
    for (k, v) in &cfg.params {
        let flag = format!("--{}", k.replace('_', "-"));
        match v {
            Value::Bool(true) => argv.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => argv.extend([flag, s.clone()]),
            Value::Number(n) => argv.extend([flag, n.to_string()]),
            other => return input(format!("param {k} must be a string, number or bool, got {other}")),
        }
    }
    let globals = [
        ("--horizon", cfg.horizon.map(|h| h.to_string())),
        ("--seed", cfg.seed.map(|s| s.to_string())),
        ("--output", cfg.output_path.clone().or_else(|| outer.output.clone())),
        ("--threads", outer.threads.map(|t| t.to_string())),
    ];
    for (flag, v) in globals {
        if let Some(v) = v {
            argv.extend([flag.to_string(), v]);
        }
    }
    if outer.format == Format::Csv {
        argv.extend(["--format".to_string(), "csv".to_string()]);
    }
    Ok(argv)
}

/// `["y-lab", "sum-check"]` and the leaf arguments of a command.
fn command_path(cmd: &Command) -> (String, Value) {
    let mut v = report::to_value(cmd);
    let mut path = Vec::new();
    loop {
        match v {
            Value::Object(m) if m.len() == 1 => {
                let (k, inner) = m.into_iter().next().expect("one entry");
                path.push(k);
                v = inner;
                if !matches!(&v, Value::Object(x) if x.len() == 1 && x.values().all(Value::is_object)) {
                    break;
                }
            }
            other => {
                v = other;
                break;
            }
        }
    }
    (path.join(" "), v)
}

fn execute(cli: Cli) -> CliResult<()> {
    if let Command::Run(r) = &cli.command {
        let text = std::fs::read_to_string(&r.config).map_err(|e| CliError::Input(format!("{}: {e}", r.config)))?;
        let cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Input(format!("config schema: {e}")))?;
        let argv = config_argv(&cfg, &cli)?;
        let inner = Cli::try_parse_from(&argv).map_err(|e| CliError::Input(e.to_string()))?;
        return execute(inner);
    }
    if cli.horizon == Some(0) {
        return input("--horizon must be >= 1");
    }
    if let Some(t) = cli.threads {
        if t == 0 {
            return input("--threads must be >= 1");
        }
        // a second call (from `run`) finds the pool already built; keep it
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let ctx = Ctx { horizon: cli.horizon, seed: cli.seed };
    let outcome = commands::dispatch(&cli.command, &ctx)?;
    let (command, params) = command_path(&cli.command);
    let report = Report {
        command,
        version: VERSION,
        inputs: json!({ "horizon": cli.horizon, "seed": cli.seed, "params": params }),
        results: outcome.results,
        table: outcome.table,
    };
    let text = match cli.format {
        Format::Json => report.render_json(),
        Format::Csv => report.render_csv(),
    };
    report::write_output(&text, cli.output.as_deref())?;
    match outcome.failed {
        Some(msg) => Err(CliError::Invariant(format!("check failed: {msg}"))),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("besico: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
