//! Command-line front end for the `magic` binary.
//!
//! Exit codes: 0 success, 2 validation error, 3 capacity error,
//! 4 numerical convergence error.

pub mod commands;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::error::Result;
use crate::mps::{ContractionBudget, DmrgConfig};
use commands::*;
pub use output::{Cell, Format, Table};

#[derive(Parser, Debug)]
#[command(name = "magic", version, about = "Mixed-state magic witnesses, estimators and scans")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Witness report of one state for a list of Rényi indices.
    Witness(WitnessArgs),
    /// Noisy local random circuits: W̃₃ against depth and the critical-depth fit.
    RandomCircuitScan(ScanArgs),
    /// Clifford circuits doped with T gates under global depolarizing noise.
    DopedClifford(DopedArgs),
    /// Bell-sampling estimate of A_α with a Hoeffding sample plan.
    Bell(BellArgs),
    /// T-count certification of a T register after a Clifford channel.
    CertifyT(CertifyArgs),
    /// Subsystem witness scan over TFIM ground states.
    TfimScan(TfimArgs),
}

/// Comma list or inclusive range `a..b`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntList(pub Vec<usize>);

impl FromStr for IntList {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let int = |v: &str| v.trim().parse::<usize>().map_err(|_| format!("not an integer: {v:?}"));
        if let Some((a, b)) = s.split_once("..") {
            let (a, b) = (int(a)?, int(b)?);
            if a > b {
                return Err(format!("empty range {s:?}"));
            }
            return Ok(IntList((a..=b).collect()));
        }
        s.split(',').map(int).collect::<std::result::Result<_, _>>().map(IntList)
    }
}

#[derive(Args, Debug)]
pub struct WitnessArgs {
    /// Product state such as `T,T,zero`, or `file:<circuit>`.
    #[arg(long)]
    pub state: String,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 1.0, 2.0, 3.0])]
    pub alpha: Vec<f64>,
    /// Global depolarizing applied to the state first.
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Largest circuit depth.
    #[arg(long, default_value_t = 120)]
    pub depth: usize,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.005, 0.0075, 0.01, 0.015, 0.02])]
    pub p: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    pub instances: usize,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct DopedArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// T counts, e.g. `0..5` or `0,2,4`.
    #[arg(long, default_value = "0..5")]
    pub nt: IntList,
    #[arg(long, default_value_t = 0.2)]
    pub p: f64,
    #[arg(long, default_value_t = 10)]
    pub instances: usize,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct BellArgs {
    #[arg(long)]
    pub state: String,
    #[arg(long, default_value_t = 3)]
    pub alpha: usize,
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[arg(long)]
    pub n: usize,
    /// Number of T states in the register.
    #[arg(long)]
    pub nt: usize,
    /// `identity`, `pauli:<p>`, `depol:<p>` or `file:<circuit>`.
    #[arg(long, default_value = "identity")]
    pub channel: String,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct TfimArgs {
    #[arg(long, value_delimiter = ',', default_values_t = vec![24])]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.25, 0.5, 1.0, 2.0, 4.0])]
    pub h: Vec<f64>,
    #[arg(long, default_value_t = 8)]
    pub chi: usize,
    /// Largest subsystem length.
    #[arg(long, default_value_t = 10)]
    pub ell: usize,
    #[arg(long, default_value_t = 2)]
    pub alpha: u32,
    /// Boundary-tensor entry cap for the replica contraction.
    #[arg(long, default_value_t = ContractionBudget::default().max_entries)]
    pub budget: usize,
    /// Directory for ground-state checkpoints, reused when present.
    #[arg(long)]
    pub checkpoint_dir: Option<PathBuf>,
    /// DMRG sweep limit per ground state.
    #[arg(long, default_value_t = DmrgConfig::new(2).max_sweeps)]
    pub max_sweeps: usize,
}

fn prepared(state: &str, p: Option<f64>) -> Result<crate::DensityMatrix> {
    let rho = StateSpec::from_str(state)?.prepare()?;
    match p {
        Some(p) => crate::circuits::apply_global_depolarizing(&rho, p),
        None => Ok(rho),
    }
}

/// Run one parsed command and produce its table.
pub fn execute(command: &Command) -> Result<Table> {
    match command {
        Command::Witness(a) => cmd_witness(&prepared(&a.state, a.p)?, &a.alpha),
        Command::RandomCircuitScan(a) => Ok(scan_table(&random_circuit_scan(&ScanConfig {
            n: a.n,
            max_depth: a.depth,
            ps: a.p.clone(),
            instances: a.instances,
            seed: a.seed,
        })?)),
        Command::DopedClifford(a) => {
            let (rows, warnings) = doped_clifford_rows(&DopedConfig {
                n: a.n,
                n_ts: a.nt.0.clone(),
                p: a.p,
                instances: a.instances,
                seed: a.seed,
            })?;
            Ok(doped_table(&rows, warnings))
        }
        Command::Bell(a) => {
            let rho = prepared(&a.state, a.p)?;
            Ok(bell_table(&bell_estimate(&rho, a.alpha, a.epsilon, a.delta, a.seed)?))
        }
        Command::CertifyT(a) => {
            let channel = ChannelSpec::from_str(&a.channel)?;
            Ok(certify_table(&certify_t(a.n, a.nt, &channel, a.c, a.seed)?))
        }
        Command::TfimScan(a) => {
            let runs = tfim_scan(&TfimConfig {
                ns: a.n.clone(),
                hs: a.h.clone(),
                chi: a.chi,
                ell_max: a.ell,
                alpha: a.alpha,
                budget: ContractionBudget { max_entries: a.budget },
                checkpoint_dir: a.checkpoint_dir.clone(),
                max_sweeps: a.max_sweeps,
            })?;
            Ok(tfim_table(&runs, a.chi))
        }
    }
}

fn write_output(cli: &Cli, table: &Table) -> Result<()> {
    let text = table.render(cli.format);
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Parse arguments, run, print warnings and errors; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = execute(&cli.command).and_then(|t| {
        for w in &t.warnings {
            eprintln!("warning: {w}");
        }
        write_output(&cli, &t).map(|()| t.status)
    });
    match result {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
