use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "spinroof",
    version,
    about = "Variances, quantum Fisher information and uncertainty relations of spin states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample random states and tabulate three fluctuation coordinates each.
    SampleDiagram(DiagramArgs),
    /// Check every implemented relation on random states.
    Verify(VerifyArgs),
    /// Tabulate c(s) = min Var(Lx) + Var(Ly) up to a maximal spin.
    Cs(CsArgs),
    /// Worst-case QFI of an N-qubit state against the quantum and classical limits.
    Metrology(MetrologyArgs),
    /// Two-element decomposition of a mixed qubit.
    Decompose(DecomposeArgs),
}

/// Which fluctuation goes into each coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Var(Lx), Var(Ly), Var(Lz)
    Vvv,
    /// Var(Lx), Var(Ly), F_Q[Lz]/4
    Vvq,
    /// F_Q[Lx]/4, F_Q[Ly]/4, F_Q[Lz]/4
    Qqq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Args)]
pub struct DiagramArgs {
    /// Twice the spin.
    #[arg(long = "spin", value_name = "2S")]
    pub two_s: u32,
    #[arg(long, value_enum)]
    pub mode: Mode,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads; does not affect the output.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Spins to check, as twice the spin.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3", value_name = "2S,..")]
    pub spins: Vec<u32>,
    /// Check this density matrix (JSON) instead of random states.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CsArgs {
    /// Largest spin, as twice the spin.
    #[arg(long, value_name = "2S")]
    pub smax: u32,
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    pub restarts: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Axes {
    /// The xy plane.
    Plane,
    /// All directions.
    Sphere,
}

#[derive(Debug, Args)]
pub struct MetrologyArgs {
    /// Number of qubits.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=12))]
    pub n: u64,
    #[arg(long, value_enum)]
    pub axes: Axes,
    /// A built-in state name, or @path to a density-matrix JSON file.
    #[arg(long)]
    pub state: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// Chord along n: minimizes the average variance.
    Min,
    /// Chord perpendicular to n: maximizes the average variance.
    Max,
    /// Spectral decomposition.
    Eigen,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Bloch vector of the state.
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true, value_name = "X,Y,Z")]
    pub r: [f64; 3],
    /// Axis of the observable; normalized before use.
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true, value_name = "X,Y,Z")]
    pub n: [f64; 3],
    #[arg(long, value_enum)]
    pub kind: Kind,
}

fn parse_triple(text: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got {text:?}"));
    }
    let mut out = [0.0f64; 3];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = p.parse().map_err(|_| format!("{p:?} is not a number"))?;
        if !slot.is_finite() {
            return Err(format!("{p:?} is not finite"));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triples() {
        assert_eq!(parse_triple("0.5, -1,2").unwrap(), [0.5, -1.0, 2.0]);
        assert!(parse_triple("1,2").is_err());
        assert!(parse_triple("1,x,2").is_err());
        assert!(parse_triple("1,inf,2").is_err());
    }

    #[test]
    fn hyphen_values() {
        let cli = Cli::try_parse_from([
            "spinroof", "decompose", "--r", "-0.5,0,0", "--n", "0,0,-1", "--kind", "min",
        ])
        .unwrap();
        match cli.command {
            Command::Decompose(a) => assert_eq!(a.r, [-0.5, 0.0, 0.0]),
            _ => panic!("wrong subcommand"),
        }
    }

    #[test]
    fn spins_list() {
        let cli = Cli::try_parse_from(["spinroof", "verify", "--spins", "1,4"]).unwrap();
        match cli.command {
            Command::Verify(a) => assert_eq!(a.spins, vec![1, 4]),
            _ => panic!("wrong subcommand"),
        }
    }
}
