use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tvmdp::experiment::{
    execute, generate_scenario, generate_schedule, run, sweep, write_bound, write_instance, write_sweep,
    ExperimentConfig, OutputFormat,
};

#[derive(Parser)]
#[command(name = "tvmdp", about = "Skip-update control experiments on time-varying MDPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the generated instance and update schedule.
    Gen(Common),
    /// Run one experiment and write its full output bundle.
    Run(Common),
    /// Re-run the experiment for several update periods.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        periods: Vec<usize>,
    },
    /// Write the per-step regret bound for one run.
    Bound(Common),
    /// Run the acceptance criteria.
    Verify {
        #[arg(long, default_value = "verify-out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON). Defaults to the built-in drifting instance.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the config's `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<OutputFormat>,
}

impl Common {
    fn resolve(&self) -> tvmdp::Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default_drifting(),
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(out) = &self.out {
            config.output_dir = out.clone();
        }
        if let Some(format) = self.format {
            config.output_format = format;
        }
        config.validate()?;
        Ok(config)
    }

    fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}

fn write_error(dir: &Path, err: &tvmdp::Error) {
    let doc = serde_json::json!({ "message": err.to_string() });
    if std::fs::create_dir_all(dir).is_ok() {
        let _ = std::fs::write(dir.join("error.json"), format!("{doc:#}\n"));
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (outcome, dir) = match &cli.command {
        Command::Gen(c) => (gen(c), c.out_dir()),
        Command::Run(c) => (run_cmd(c), c.out_dir()),
        Command::Sweep { common, periods } => (sweep_cmd(common, periods), common.out_dir()),
        Command::Bound(c) => (bound(c), c.out_dir()),
        Command::Verify { out } => return verify(out),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            write_error(&dir, &e);
            ExitCode::FAILURE
        }
    }
}

fn gen(c: &Common) -> tvmdp::Result<()> {
    let cfg = c.resolve()?;
    let mdp = generate_scenario(&cfg.scenario, cfg.horizon)?;
    let schedule = generate_schedule(&cfg.schedule, cfg.horizon)?;
    write_instance(&cfg.output_dir, &mdp, &schedule)?;
    println!("wrote {}", cfg.output_dir.display());
    Ok(())
}

fn run_cmd(c: &Common) -> tvmdp::Result<()> {
    let cfg = c.resolve()?;
    let rep = match run(&cfg, &cfg.output_dir) {
        Ok(rep) => rep,
        Err(e) => {
            // The bundle already holds error.json and the partial artifacts.
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    };
    if let Some(s) = rep.summary {
        println!("DR = {:.6}, bound = {:?}, η = {:.4}", s.dr_exact, s.bound_total, s.eta);
    }
    println!("wrote {}", cfg.output_dir.display());
    Ok(())
}

fn sweep_cmd(c: &Common, periods: &[usize]) -> tvmdp::Result<()> {
    let cfg = c.resolve()?;
    let rows = sweep(&cfg, periods)?;
    write_sweep(&cfg.output_dir, &cfg, &rows)?;
    for r in &rows {
        match &r.error {
            None => println!("p = {:>3}: DR = {:?}, bound = {:?}", r.period, r.dr_exact, r.bound_total),
            Some(e) => println!("p = {:>3}: {e}", r.period),
        }
    }
    Ok(())
}

fn bound(c: &Common) -> tvmdp::Result<()> {
    let cfg = c.resolve()?;
    let rep = execute(&cfg)?;
    let Some(b) = rep.bound else {
        return Err(tvmdp::Error::AssumptionViolated(format!(
            "overlap coefficient is 0 (m = {}); no bound to report",
            cfg.mixing.m
        )));
    };
    write_bound(&cfg.output_dir, &b, cfg.output_format)?;
    println!("bound total = {:.6} (update {:.6}, skip {:.6})", b.total, b.update_total(), b.skip_total());
    Ok(())
}

fn verify(out: &Path) -> ExitCode {
    let results = tvmdp_verify::run_all(out);
    for r in &results {
        println!("{}", r.line());
    }
    if results.iter().all(|r| r.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
