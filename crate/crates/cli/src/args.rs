use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "spherewave", version, about = "Directional wavelet tight frames on spheres")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Parameters shared by most subcommands.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Ambient dimension d (the sphere is 𝕊^{d-1}).
    #[arg(long = "d")]
    pub d: Option<usize>,
    /// Directionality order.
    #[arg(long = "K")]
    pub k: Option<usize>,
    /// Finest frame scale.
    #[arg(long = "Jmax")]
    pub j_max: Option<usize>,
    /// Bandwidth (or degree, depending on the subcommand).
    #[arg(long = "N")]
    pub n: Option<f64>,
    #[arg(long, value_enum, default_value_t = FilterKind::Bump)]
    pub filter: FilterKind,
    /// Smoothness order of the spline filter.
    #[arg(long, default_value_t = 3)]
    pub q: usize,
    /// zonal | optimal | custom:PATH (default: zonal for K = 0, optimal otherwise).
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output file (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    Bump,
    Spline,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Parseval,
    QuadExactness,
    Addition,
    Telescope,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write the frame description (scales, nodes, weights).
    BuildFrame {
        #[command(flatten)]
        common: Common,
    },
    /// Coefficient file → frame coefficients.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
    },
    /// Frame coefficients → coefficient file.
    Synthesize {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
        /// Output degree (default: the largest contributing wavelet degree).
        #[arg(long)]
        degree: Option<usize>,
        /// Allow an output degree below the wavelet degrees (orthogonal projection).
        #[arg(long)]
        project: bool,
    },
    /// Numerical checks; exit status 1 if any gap exceeds the tolerance.
    Verify {
        #[arg(value_enum)]
        check: Check,
        #[command(flatten)]
        common: Common,
        /// Number of random signals (parseval) or point pairs (addition).
        #[arg(long)]
        count: Option<usize>,
    },
    /// Localization table of Ψ around its centre.
    Localize {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 32)]
        annuli: usize,
        /// Decay exponent (default K + d).
        #[arg(long)]
        q_eff: Option<f64>,
    },
    /// Auto-correlation ⟨T(h)Ψ, Ψ⟩ by quadrature and in closed form.
    Autocorr {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        angles: usize,
    },
    /// Steering error for a seeded random rotation.
    Steer {
        #[command(flatten)]
        common: Common,
        /// Orientation count (d = 3) or direction rule degree (d ≥ 4).
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// ψ(t, φ) on [0, π/2] × [0, 2π) as CSV.
    PsiGrid {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 201)]
        nt: usize,
        #[arg(long, default_value_t = 256)]
        nphi: usize,
        /// Also write a PGM image.
        #[arg(long)]
        pgm: Option<PathBuf>,
        /// Keep the raw values instead of rescaling to [-1, 1].
        #[arg(long)]
        raw: bool,
    },
    /// Seeded random unit-norm signal of degree N.
    RandomSignal {
        #[command(flatten)]
        common: Common,
    },
}
