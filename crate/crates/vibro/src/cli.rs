use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vibro_core::config::SolverMethod;

use crate::commands::{self, Options, SolverOverrides};
use crate::error::{Result, RunError};
use crate::model::default_threads;

#[derive(Parser, Debug)]
#[command(name = "vibro", version, about = "Frequency-domain vibroacoustic sweeps of layered 2D models")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// model configuration (TOML)
    #[arg(long, global = true, default_value = "configs/fuselage_slice.cfg")]
    pub config: PathBuf,
    /// output directory
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum)]
    pub solver: Option<Method>,
    /// subdomain groups, e.g. "skin,insulation;lining;cabin"
    #[arg(long, global = true)]
    pub groups: Option<String>,
    #[arg(long, global = true)]
    pub overlap: Option<usize>,
    #[arg(long, global = true)]
    pub atol: Option<f64>,
    #[arg(long = "max-it", global = true)]
    pub max_it: Option<usize>,
    /// worker threads; defaults to the available parallelism
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum Method {
    Direct,
    Bjacobi,
    Gasm,
}

impl From<Method> for SolverMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Direct => SolverMethod::Direct,
            Method::Bjacobi => SolverMethod::Bjacobi,
            Method::Gasm => SolverMethod::Gasm,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Mesh schedule, wavelengths, meshes and mortar quadrature dumps.
    Mesh,
    /// Write A(f) and f(f) in Matrix Market format.
    Assemble {
        /// frequencies in Hz, comma separated
        #[arg(long, value_delimiter = ',')]
        freq: Vec<f64>,
    },
    /// Solve the full frequency grid.
    Sweep,
    /// Reduced-order models.
    Mor {
        #[command(subcommand)]
        action: MorAction,
    },
    /// Compare iterative against direct solves (and reduced models, if built).
    Verify,
    /// Comparison table of all runs in the output directory.
    Report,
}

#[derive(Subcommand, Debug)]
pub enum MorAction {
    Build,
    Sweep,
    Verify,
}

pub fn parse_groups(s: &str) -> Result<Vec<Vec<String>>> {
    let groups: Vec<Vec<String>> = s
        .split(';')
        .map(|g| g.split(',').map(|d| d.trim().to_string()).filter(|d| !d.is_empty()).collect())
        .collect();
    if groups.iter().any(|g: &Vec<String>| g.is_empty()) {
        return Err(RunError::Config(format!("empty group in '{s}'")));
    }
    Ok(groups)
}

impl Global {
    pub fn options(&self) -> Result<Options> {
        Ok(Options {
            config: self.config.clone(),
            out: self.out.clone(),
            solver: SolverOverrides {
                method: self.solver.map(Into::into),
                groups: self.groups.as_deref().map(parse_groups).transpose()?,
                overlap: self.overlap,
                atol: self.atol,
                max_it: self.max_it,
            },
            threads: self.threads.unwrap_or_else(default_threads).max(1),
            seed: self.seed,
        })
    }
}

/// Runs one parsed command and returns a one-line summary.
pub fn run(cli: &Cli) -> Result<String> {
    let opts = cli.global.options()?;
    Ok(match &cli.command {
        Command::Mesh => {
            let m = commands::mesh(&opts)?;
            format!("wrote {} files", m.outputs.len())
        }
        Command::Assemble { freq } => {
            let m = commands::assemble(&opts, freq)?;
            format!("wrote {} files", m.outputs.len())
        }
        Command::Sweep => {
            let (m, r) = commands::run_sweep(&opts)?;
            format!("{} frequencies in {:.1} s", r.records.len(), m.wall_time_s)
        }
        Command::Verify => {
            let v = commands::verify(&opts)?;
            format!("max relative SPL error {:.3e}", v.max_error)
        }
        Command::Mor { action: MorAction::Build } => {
            let (_, roms) = commands::mor_build(&opts)?;
            let dims: Vec<String> = roms.iter().map(|r| format!("{}/{}", r.dim(), r.n)).collect();
            format!("{} windows, r/n = {}", roms.len(), dims.join(" "))
        }
        Command::Mor { action: MorAction::Sweep } => {
            let (m, r) = commands::mor_sweep(&opts)?;
            format!("{} frequencies in {:.2} s", r.records.len(), m.wall_time_s)
        }
        Command::Mor { action: MorAction::Verify } => {
            let rows = commands::mor_verify(&opts)?;
            let e = rows.iter().map(|r| r.error).fold(0.0, f64::max);
            format!("{} checks, max relative error {e:.3e}", rows.len())
        }
        Command::Report => {
            let rows = commands::report(&opts.out)?;
            format!("{} runs in report.csv", rows.len())
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_split_on_semicolons() {
        let g = parse_groups("skin, insulation;lining;cabin").unwrap();
        assert_eq!(g, vec![vec!["skin".to_string(), "insulation".into()], vec!["lining".into()], vec!["cabin".into()]]);
        assert!(parse_groups("a;;b").is_err());
    }

    #[test]
    fn flags_after_the_subcommand() {
        let cli = Cli::try_parse_from(["vibro", "verify", "--solver", "gasm", "--overlap", "1"]).unwrap();
        assert!(matches!(cli.command, Command::Verify));
        assert_eq!(cli.global.overlap, Some(1));
    }
}
