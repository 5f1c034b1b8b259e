use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hbs_cli::{parse_config, run, CliError, Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "hbs", about = "HBS compression, sparse embedding and block-encoding experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compress a kernel matrix and report extended-system sparsity.
    Compress(Common),
    /// Solve through the extended sparse system for each t.
    Solve(Common),
    /// Recursive block encoding of the HBS factors.
    Encode(Common),
    /// Helmholtz scaling sweep on the sphere.
    Exp3d(Common),
}

#[derive(Args)]
struct Common {
    /// key = value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: config `out`, else the current directory)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Compress with full off-diagonal rows instead of proxy surfaces
    #[arg(long)]
    no_proxy: bool,
    /// Comma-separated scaling factors in (0, 1]
    #[arg(long, value_delimiter = ',')]
    t: Option<Vec<f64>>,
    /// Tikhonov regularization for the solve
    #[arg(long)]
    alpha: Option<f64>,
}

fn load(exp: Experiment, c: &Common) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let base = path.parent().map(PathBuf::from).unwrap_or_default();
            parse_config(&text, exp, &base).map_err(CliError::Config)?
        }
        None => ExperimentConfig::defaults(exp),
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if c.no_proxy {
        cfg.proxy = false;
    }
    if let Some(t) = &c.t {
        cfg.t_list = t.clone();
    }
    if c.alpha.is_some() {
        cfg.alpha = c.alpha;
    }
    if c.out.is_some() {
        cfg.out = c.out.clone();
    }
    cfg.validate().map_err(CliError::Config)?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (exp, common) = match &cli.cmd {
        Cmd::Compress(c) => (Experiment::Compress, c),
        Cmd::Solve(c) => (Experiment::Solve, c),
        Cmd::Encode(c) => (Experiment::Encode, c),
        Cmd::Exp3d(c) => (Experiment::Exp3d, c),
    };
    let result = load(exp, common).and_then(|cfg| {
        let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
        run(&cfg, &out)
    });
    match result {
        Ok(summary) => {
            for (path, rows) in &summary.tables {
                println!("{} ({} rows)", path.display(), rows.len());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hbs: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
