//! `gla` — scenario runner and data-emission front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical/convergence
//! error, 4 regression failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gla::config::{Config, LatticeKind, ScenarioName};
use gla::{regress, scenario};
use gla_core::bath::{band_structure, BlochSpec};
use gla_core::error::Error;
use gla_core::export::csv_from_columns;

#[derive(Parser)]
#[command(name = "gla", version, about = "Lattice-bath emitter calculations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario described by a JSON config file
    Run {
        /// Path to the config (schema 1)
        config: PathBuf,
        /// Output directory (default: derived from the config file name)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named scenario with default parameters
    Scenario {
        /// Scenario name (e.g. waveguide_braided, graphene3, lieb_pair)
        name: String,
        /// Parameter overrides, e.g. --set g=0.1 --set cells=501
        #[arg(long = "set")]
        set: Vec<String>,
        /// Output directory (default: ./out/<name>)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full regression battery and print one line per row
    Regress,
    /// Export the band structure of a lattice as CSV
    Bands {
        /// Lattice: chain, graphene, square, or lieb
        lattice: String,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
        /// Grid resolution per reciprocal direction
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::InvalidGeometry(_)
        | Error::InvalidArgument(_)
        | Error::IndexError(_)
        | Error::UnsupportedConfiguration(_)
        | Error::NotAGap(_)
        | Error::DegenerateEmitter(_)
        | Error::InvalidState(_) => 2,
        Error::ResourceLimit(_)
        | Error::RegularizationRequired(_)
        | Error::PoleProximity(_)
        | Error::Convergence(_)
        | Error::StaleRoot(_)
        | Error::NotDecoherenceFree(_)
        | Error::Lapack(_)
        | Error::Internal(_) => 3,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Run { config, out } => {
            let text = std::fs::read_to_string(&config).map_err(|e| {
                Error::InvalidArgument(format!("cannot read {}: {e}", config.display()))
            })?;
            let cfg = Config::from_json(&text)?;
            let out_dir = out.unwrap_or_else(|| {
                let stem = config.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
                PathBuf::from("out").join(stem)
            });
            execute(&cfg, &out_dir)
        }
        Command::Scenario { name, set, out } => {
            let scenario_name = ScenarioName::parse(&name)?;
            let mut cfg = Config::for_scenario(scenario_name);
            for kv in &set {
                cfg.apply_set(kv)?;
            }
            let out_dir = out.unwrap_or_else(|| PathBuf::from("out").join(&name));
            execute(&cfg, &out_dir)
        }
        Command::Regress => {
            let rows = regress::run_all();
            regress::print_table(&rows);
            Ok(if rows.iter().all(|r| r.pass) { 0 } else { 4 })
        }
        Command::Bands { lattice, out, resolution } => {
            let kind = LatticeKind::parse(&lattice)?;
            let spec = match kind {
                LatticeKind::Chain => BlochSpec::chain(1.0, 0.0),
                LatticeKind::Graphene => BlochSpec::graphene(1.0, 0.0),
                LatticeKind::Square => BlochSpec::square(1.0, 0.0),
                LatticeKind::Lieb => BlochSpec::lieb_nnn(1.0),
            };
            let bands = band_structure(&spec, resolution)?;
            let nk = bands.k_grid.len();
            let nb = bands.energies.ncols();
            let mut headers = vec!["kx".to_string(), "ky".to_string()];
            for b in 0..nb {
                headers.push(format!("band{b}"));
            }
            let mut cols: Vec<Vec<f64>> = vec![
                bands.k_grid.iter().map(|k| k[0]).collect(),
                bands.k_grid.iter().map(|k| k[1]).collect(),
            ];
            for b in 0..nb {
                cols.push((0..nk).map(|ik| bands.energies[[ik, b]]).collect());
            }
            let hdr: Vec<&str> = headers.iter().map(|s| s.as_str()).collect();
            let body = csv_from_columns(&hdr, &cols)?;
            if let Some(dir) = out.parent() {
                if !dir.as_os_str().is_empty() {
                    std::fs::create_dir_all(dir).map_err(|e| {
                        Error::InvalidArgument(format!("cannot create {}: {e}", dir.display()))
                    })?;
                }
            }
            std::fs::write(&out, body)
                .map_err(|e| Error::Internal(format!("write {}: {e}", out.display())))?;
            println!("wrote {} ({nk} k-points, {nb} bands)", out.display());
            Ok(0)
        }
    }
}

fn execute(cfg: &Config, out_dir: &std::path::Path) -> Result<u8, Error> {
    if let Some(sweep) = cfg.sweep.clone() {
        let reports = scenario::run_sweep(cfg, &sweep, Some(out_dir))?;
        println!(
            "swept {} over {} values → {}",
            sweep.parameter,
            sweep.values.len(),
            out_dir.display()
        );
        let failed = reports.iter().filter(|r| !r.all_expected_pass()).count();
        if failed > 0 {
            println!("{failed} sweep points deviate from embedded expectations");
        }
        Ok(0)
    } else {
        let report = scenario::run_scenario(cfg, Some(out_dir))?;
        println!("{}", report.description);
        println!("sites: {}, emitters: {}", report.n_sites, report.n_atoms);
        println!("decoherence-free: {}", report.is_dfh);
        for c in &report.checks {
            match (c.expected, c.pass) {
                (Some(e), Some(p)) => println!(
                    "  [{}] {} = {:.6e} (expected {:.6e})",
                    if p { "ok" } else { "DEVIATES" },
                    c.name,
                    c.value,
                    e
                ),
                _ => println!("  [computed] {} = {:.6e}", c.name, c.value),
            }
        }
        println!("report: {}", out_dir.join("report.json").display());
        Ok(0)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
