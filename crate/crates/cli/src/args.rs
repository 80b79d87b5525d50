use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "qtlink",
    version,
    about = "Closed-form and Monte-Carlo evaluation of microwave-optical transduction links"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Conversion efficiency from cooperativity and extraction ratios.
    Efficiency(EfficiencyArgs),
    /// EPR distribution probability and capacities of one link.
    Pe(PeArgs),
    /// Parameter sweep written as a CSV or JSON dataset.
    Sweep(SweepArgs),
    /// Monte-Carlo versus closed-form check over the preset grid.
    Validate(ValidateArgs),
    /// Teleportation over a (possibly non-maximal) EPR pair.
    TeleportDemo(TeleportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct EfficiencyArgs {
    /// Flat `key = value` file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Cooperativity C.
    #[arg(long = "C", visible_alias = "cooperativity")]
    pub c: Option<f64>,
    #[arg(long)]
    pub zeta_o: Option<f64>,
    #[arg(long)]
    pub zeta_m: Option<f64>,
    /// Known efficiency, bypassing the cooperativity formula.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Single-photon coupling rate g0 (Hz); with the rates below, replaces --C and the zetas.
    #[arg(long)]
    pub g0: Option<f64>,
    #[arg(long)]
    pub pump_photons: Option<f64>,
    #[arg(long)]
    pub kappa_o: Option<f64>,
    #[arg(long)]
    pub kappa_m: Option<f64>,
    #[arg(long)]
    pub kappa_oe: Option<f64>,
    #[arg(long)]
    pub kappa_me: Option<f64>,
    /// Also emit the efficiency map over C in [0, 2] and zeta_o*zeta_m in [0, 1].
    #[arg(long)]
    pub grid: bool,
    /// Where to write the grid (stdout if absent).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct PeArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// edqt, egt-dqt or egt-swap.
    #[arg(long)]
    pub archetype: Option<String>,
    /// Source up-conversion (or generation) efficiency.
    #[arg(long, visible_alias = "eta-up-s")]
    pub eta_up: Option<f64>,
    /// Destination down-conversion efficiency (DQT archetypes).
    #[arg(long)]
    pub eta_down: Option<f64>,
    /// Destination generation efficiency (swapping archetype).
    #[arg(long)]
    pub eta_up_d: Option<f64>,
    /// Midpoint transducer efficiency for midpoint layouts.
    #[arg(long)]
    pub eta_mid: Option<f64>,
    /// Fiber length in km.
    #[arg(long)]
    pub length: Option<f64>,
    /// Fiber loss in dB/km.
    #[arg(long)]
    pub attenuation: Option<f64>,
    /// source, midpoint or both-endpoints.
    #[arg(long)]
    pub location: Option<String>,
    /// Append a Monte-Carlo estimate with this many trials.
    #[arg(long, visible_alias = "mc")]
    pub mc_trials: Option<u64>,
    /// Monte-Carlo seed; falls back to the config file, then QTLINK_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// pnrd or spd.
    #[arg(long)]
    pub detector: Option<String>,
    #[arg(long)]
    pub detector_efficiency: Option<f64>,
    /// Sample the fiber loss of each photon separately.
    #[arg(long)]
    pub independent_loss: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// fig5, fig8a, fig8b, fig8c, fig9 or custom.
    #[arg(long)]
    pub target: Option<String>,
    /// Axis as NAME=MIN:MAX:STEPS; NAME is C_source, C_destination, zeta_product or fiber_length_km.
    #[arg(long = "axis")]
    pub axes: Vec<String>,
    #[arg(long)]
    pub c_source: Option<f64>,
    #[arg(long)]
    pub c_destination: Option<f64>,
    #[arg(long)]
    pub zeta_product: Option<f64>,
    #[arg(long)]
    pub length: Option<f64>,
    #[arg(long)]
    pub attenuation: Option<f64>,
    /// Cap on the EGT + DQT source cooperativity.
    #[arg(long)]
    pub egt_cap: Option<f64>,
    /// Drop the default cap of the fig9 preset.
    #[arg(long, conflicts_with = "egt_cap")]
    pub no_egt_cap: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Trials per grid point (at least 10000).
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct TeleportArgs {
    /// Resource sqrt(eta)|01> + sqrt(1-eta)|10>, as left by a beam-splitter EGT.
    #[arg(long, conflicts_with = "bell")]
    pub eta: Option<f64>,
    /// Bell resource: phi-plus, phi-minus, psi-plus or psi-minus.
    #[arg(long)]
    pub bell: Option<String>,
    /// Polar angle of the input qubit on the Bloch sphere.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    pub theta: f64,
    /// Azimuth of the input qubit.
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
    /// Random inputs for the sampled average.
    #[arg(long, default_value_t = 1000)]
    pub inputs: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub json: bool,
}
