use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Value};

use privloss::harness::{self, AuditConfig, Mode};
use privloss::mechanisms::catalog;
use privloss::AuditError;

/// Black-box differential-privacy auditing.
///
/// Every command reads an optional JSON config; flags override the file's
/// keys and use the same names.
#[derive(Parser)]
#[command(name = "privloss", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One maximum-privacy-loss audit; writes the JSON report.
    Audit(RunArgs),
    /// Empirical CDF of the lower bound over repeated audits.
    Cdf(RunArgs),
    /// Mean squared error of the data-specific estimate across sample sizes.
    Mse(RunArgs),
    /// Repeated audits over the neighbourhood of a fixed input.
    DataCentric(RunArgs),
    /// Empirical (and, where known, analytic) loss over the grid.
    LossProfile(RunArgs),
    /// Inspect the mechanism zoo.
    Mechanisms {
        #[command(subcommand)]
        action: MechanismsAction,
    },
}

#[derive(Subcommand)]
enum MechanismsAction {
    /// List mechanisms with their parameter schemas (JSON).
    List,
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    mechanism: Option<String>,
    #[arg(long)]
    epsilon0: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long = "max_positive")]
    max_positive: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "N")]
    big_n: Option<usize>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long = "pair_index")]
    pair_index: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    timing: Option<bool>,
    /// Any other config key, as `key=value` (value parsed as JSON when it
    /// parses, as a string otherwise). Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl RunArgs {
    fn overrides(&self) -> Result<Map<String, Value>, AuditError> {
        let mut m = Map::new();
        let mut put = |k: &str, v: Option<Value>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        put("mechanism", self.mechanism.clone().map(Value::from));
        put("epsilon0", self.epsilon0.map(Value::from));
        put("lambda", self.lambda.map(Value::from));
        put("k", self.k.map(Value::from));
        put("d", self.d.map(Value::from));
        put("threshold", self.threshold.map(Value::from));
        put("max_positive", self.max_positive.map(Value::from));
        put("sigma", self.sigma.map(Value::from));
        put("n", self.n.map(Value::from));
        put("N", self.big_n.map(Value::from));
        put("tau", self.tau.map(Value::from));
        put("alpha", self.alpha.map(Value::from));
        put("seed", self.seed.map(Value::from));
        put("repetitions", self.repetitions.map(Value::from));
        put("preset", self.preset.clone().map(Value::from));
        put("pair_index", self.pair_index.map(Value::from));
        put("gamma", self.gamma.map(Value::from));
        put(
            "output",
            self.output
                .as_ref()
                .map(|p| Value::from(p.to_string_lossy().into_owned())),
        );
        put("workers", self.workers.map(Value::from));
        put("timing", self.timing.map(Value::from));
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| AuditError::Config {
                field: "set".into(),
                message: format!("expected KEY=VALUE, got `{kv}`"),
            })?;
            let value = serde_json::from_str(v).unwrap_or_else(|_| Value::from(v));
            m.insert(k.to_string(), value);
        }
        Ok(m)
    }

    fn load(&self, mode: Mode) -> Result<AuditConfig, AuditError> {
        harness::load_config_for(mode, self.config.as_deref(), self.overrides()?)
    }
}

fn execute(mode: Mode, args: &RunArgs) -> Result<(), AuditError> {
    let config = args.load(mode)?;
    let start = Instant::now();
    let (text, summary) = match mode {
        Mode::Audit => {
            let r = harness::run_audit(&config)?;
            let s = format!(
                "LB = {:.6} (pair {}, t = {}, loss* = {:.6}){}",
                r.lb,
                r.pairs[r.selected].name,
                r.t_hat_max,
                r.loss_star,
                if r.unstable_location {
                    " [unstable-location]"
                } else {
                    ""
                }
            );
            (harness::report_json(&config, &r), s)
        }
        Mode::Cdf | Mode::DataCentric => {
            let t = if mode == Mode::Cdf {
                harness::run_cdf(&config)?
            } else {
                harness::run_data_centric(&config)?
            };
            let mut s = format!("R = {}, median LB = {:.6}", t.repetitions(), t.median());
            if let Some(e) = t.epsilon0 {
                s += &format!(", P(LB <= {e}) = {:.4}", t.cdf_at(e));
            }
            (t.to_csv(), s)
        }
        Mode::Mse => {
            let t = harness::run_mse(&config)?;
            let s = t
                .rows
                .iter()
                .map(|r| format!("n = {}: RMSE {:.5}", r.n, r.rmse))
                .collect::<Vec<_>>()
                .join("; ");
            (t.to_csv(), s)
        }
        Mode::LossProfile => {
            let t = harness::emit_loss_profile(&config)?;
            let s = format!("max loss {:.6} at t = {}", t.profile.epsilon_hat, t.profile.t_hat);
            (t.to_csv(), s)
        }
    };
    match &config.output {
        Some(path) => harness::write_output(path, &text)?,
        None => print!("{text}"),
    }
    eprintln!("{summary} [{} ms]", start.elapsed().as_millis());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Audit(a) => execute(Mode::Audit, a),
        Command::Cdf(a) => execute(Mode::Cdf, a),
        Command::Mse(a) => execute(Mode::Mse, a),
        Command::DataCentric(a) => execute(Mode::DataCentric, a),
        Command::LossProfile(a) => execute(Mode::LossProfile, a),
        Command::Mechanisms {
            action: MechanismsAction::List,
        } => {
            println!(
                "{}",
                serde_json::to_string_pretty(&catalog()).expect("catalog serializes")
            );
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 3 })
        }
    }
}
