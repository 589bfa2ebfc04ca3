use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use biphoton::MaterialSet;
use biphoton_cli::output::OutputDir;
use biphoton_cli::{catalog, run, CliError, Scenario, ScenarioConfig};

#[derive(Parser)]
#[command(name = "biphoton", version, about = "Chirped-QPM biphoton generation and fiber compression")]
struct Cli {
    /// Materials file; the bundled set when absent.
    #[arg(long, global = true, env = "BIPHOTON_MATERIALS")]
    materials: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectrum and G2 before/after the fiber for one scenario.
    Run(Job),
    /// Parameter sweep described by the config's [scan] table.
    Scan(Job),
    /// List the bundled figure configurations.
    Figures {
        /// Also write each configuration to this directory.
        #[arg(long)]
        write: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Job {
    /// Config file, or the id of a bundled figure (e.g. fig4).
    config: String,
    /// Output directory, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid size, overriding the config.
    #[arg(long)]
    grid_points: Option<usize>,
}

fn load_config(name: &str) -> Result<ScenarioConfig, CliError> {
    let path = Path::new(name);
    if !path.exists() {
        if let Some(f) = catalog::find(name) {
            return Ok(f.config());
        }
    }
    ScenarioConfig::from_path(path)
}

fn scenario(job: &Job, materials: &Option<PathBuf>) -> Result<Scenario, CliError> {
    let mut cfg = load_config(&job.config)?;
    if let Some(n) = job.grid_points {
        cfg.grid.n_points = n;
    }
    if let Some(out) = &job.out {
        cfg.outputs.directory = out.clone();
    }
    cfg.validate()?;
    let set = match materials {
        Some(p) => MaterialSet::from_path(p).map_err(|e| CliError::from(e).in_file(p))?,
        None => MaterialSet::bundled(),
    };
    Scenario::new(cfg, set)
}

/// Prints to stdout, ignoring a closed pipe.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Run(job) => {
            let s = scenario(job, &cli.materials)?;
            let mut out = OutputDir::create(&s.config.outputs.directory)?;
            let r = run::run_scenario(&s, &mut out)?;
            say!(
                "spectral FWHM {:.3} nm; correlation time {:.1} fs -> {:.1} fs with {:.3} m of fiber (Fourier limit {:.1} fs)",
                r.spectral_fwhm_nm, r.fwhm_before_fs, r.fwhm_after_fs, r.fiber_length_signal_m, r.fourier_limit_fs
            );
            say!("wrote {} files to {}", out.files().len(), out.root().display());
        }
        Command::Scan(job) => {
            let s = scenario(job, &cli.materials)?;
            let mut out = OutputDir::create(&s.config.outputs.directory)?;
            let r = run::run_scan(&s, &mut out)?;
            say!(
                "{} scan, {} points: minimum {:.4} {} at {} = {:.4} {}",
                r.scan_kind, r.points, r.min_metric, r.metric_unit, r.parameter_name, r.argmin_value, r.parameter_unit
            );
            say!("wrote {} files to {}", out.files().len(), out.root().display());
        }
        Command::Figures { write } => {
            say!("{}", catalog::list().trim_end());
            if let Some(dir) = write {
                std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
                for f in &catalog::FIGURES {
                    let path = dir.join(format!("{}.toml", f.id));
                    std::fs::write(&path, f.source).map_err(|e| CliError::io(&path, e))?;
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Parse(_) | CliError::Config { .. } | CliError::InFile { .. } => 2,
                _ => 1,
            })
        }
    }
}
