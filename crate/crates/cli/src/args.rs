use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Format, Overrides};

#[derive(Debug, Parser)]
#[command(
    name = "gdl",
    version,
    about = "Graded damage: analytic paths, oracles and a 1D finite-element solver"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stress/displacement response of the tensile rod, sampled in d_m.
    RodCurve(RodCurveArgs),
    /// Field profiles along the full rod at the given d_m stations.
    RodProfile(RodProfileArgs),
    /// Equilibrium path of the peeled rigid block, four phases.
    BlockCurve(BlockCurveArgs),
    /// Interface profiles at the given process-zone sizes.
    BlockProfile(BlockProfileArgs),
    /// Finite-element load path of the rod.
    FemRun(FemRunArgs),
    /// Closed forms against oracles and invariant suites, as a JSON report.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON file with any of the flag values; flags take precedence.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Number of samples (per phase for the block curve).
    #[arg(long, value_name = "N")]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct RodArgs {
    /// Constitutive case: i, ii or iii.
    #[arg(long)]
    pub variant: Option<String>,
    /// l_c / l_coh.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// l_c / L.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long = "E", value_name = "E")]
    pub e: Option<f64>,
    /// Half-length of the rod.
    #[arg(long = "L", value_name = "L")]
    pub length: Option<f64>,
    #[arg(long = "sigma-c", value_name = "SIGMA_C")]
    pub sigma_c: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct InterfaceArgs {
    /// Interface stiffness in tension.
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long = "Gc", value_name = "GC")]
    pub g_c: Option<f64>,
    #[arg(long = "G0", value_name = "G0")]
    pub g_0: Option<f64>,
    #[arg(long = "lc", value_name = "LC")]
    pub l_c: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct BlockArgs {
    /// Width of the block.
    #[arg(long = "L", value_name = "L")]
    pub length: Option<f64>,
    #[command(flatten)]
    pub interface: InterfaceArgs,
}

#[derive(Debug, Clone, Args)]
pub struct StationArgs {
    /// Comma-separated driving values: d_m for the rod, l_m for the block.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    pub stations: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct FemArgs {
    #[arg(long, value_name = "N")]
    pub elements: Option<usize>,
    #[arg(long, value_name = "N")]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct RodCurveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub rod: RodArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RodProfileArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub rod: RodArgs,
    #[command(flatten)]
    pub stations: StationArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BlockCurveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub block: BlockArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BlockProfileArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub block: BlockArgs,
    #[command(flatten)]
    pub stations: StationArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FemRunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub rod: RodArgs,
    #[command(flatten)]
    pub fem: FemArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub rod: RodArgs,
    #[command(flatten)]
    pub interface: InterfaceArgs,
    #[command(flatten)]
    pub fem: FemArgs,
    /// Propagation-phase rotation used by the junction checks.
    #[arg(long, value_name = "FORM", value_parser = ["corrected", "printed"])]
    pub phase4: Option<String>,
}

impl CommonArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            out: self.out.clone(),
            format: self.format,
            samples: self.samples,
            ..Default::default()
        }
    }
}

impl RodArgs {
    pub fn apply(&self, o: Overrides) -> Overrides {
        Overrides {
            variant: self.variant.clone(),
            lambda: self.lambda,
            beta: self.beta,
            e: self.e,
            length: self.length,
            sigma_c: self.sigma_c,
            ..o
        }
    }
}

impl InterfaceArgs {
    pub fn apply(&self, o: Overrides) -> Overrides {
        Overrides {
            k: self.k,
            g_c: self.g_c,
            g_0: self.g_0,
            l_c: self.l_c,
            ..o
        }
    }
}

impl BlockArgs {
    pub fn apply(&self, o: Overrides) -> Overrides {
        Overrides {
            length: self.length,
            ..self.interface.apply(o)
        }
    }
}

impl FemArgs {
    pub fn apply(&self, o: Overrides) -> Overrides {
        Overrides {
            elements: self.elements,
            steps: self.steps,
            ..o
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_line_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_flags() {
        let cli = Cli::try_parse_from([
            "gdl",
            "rod-curve",
            "--variant",
            "ii",
            "--lambda",
            "0.3",
            "--E",
            "2",
            "--sigma-c",
            "3",
            "--samples",
            "5",
        ])
        .unwrap();
        let Command::RodCurve(a) = cli.command else {
            panic!()
        };
        assert_eq!(a.rod.variant.as_deref(), Some("ii"));
        assert_eq!(
            (a.rod.lambda, a.rod.e, a.rod.sigma_c),
            (Some(0.3), Some(2.0), Some(3.0))
        );
        assert_eq!(a.common.samples, Some(5));

        let cli = Cli::try_parse_from([
            "gdl",
            "block-profile",
            "--lc",
            "8",
            "--Gc",
            "0.3",
            "--stations",
            "0,1.5,7",
        ])
        .unwrap();
        let Command::BlockProfile(a) = cli.command else {
            panic!()
        };
        assert_eq!(a.block.interface.l_c, Some(8.0));
        assert_eq!(a.stations.stations, Some(vec![0.0, 1.5, 7.0]));
    }
}
