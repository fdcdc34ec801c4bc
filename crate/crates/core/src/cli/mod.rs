//! The `splatprior` command line.
//!
//! Exit status is 0 on success, 1 on error (with a JSON error object on
//! standard error) and 2 when registration finished without converging;
//! its outputs are still written in that case.

mod commands;
pub mod config;
pub mod error;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::FileConfig;
pub use error::{CliError, ErrorKind};

#[derive(Debug, Parser)]
#[command(name = "splatprior", version, about = "LiDAR priors for Gaussian splatting")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "SPLATPRIOR_THREADS")]
    pub threads: Option<usize>,
    /// Omit run-dependent fields (timings) so outputs are byte-identical
    /// across runs and thread counts.
    #[arg(long, global = true, env = "SPLATPRIOR_DETERMINISTIC")]
    pub deterministic: bool,
    /// Replace an existing manifest whose content differs.
    #[arg(long, global = true, env = "SPLATPRIOR_FORCE")]
    pub force: bool,
    /// TOML run configuration.
    #[arg(long, global = true, env = "SPLATPRIOR_CONFIG")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Register a LiDAR scan into a COLMAP model's frame.
    Register(RegisterArgs),
    /// Build the splatting prior from a registered scan.
    Fuse(FuseArgs),
    /// L1 and PSNR between same-named images in two directories.
    EvalImages(EvalImagesArgs),
    /// Color L1 between a predicted cloud (or splats) and ground truth.
    EvalCloud(EvalCloudArgs),
    /// Render splats from posed COLMAP images.
    Render(RenderArgs),
    /// Splat PLY to colored points, or colored points to seed splats.
    Convert(ConvertArgs),
}

#[derive(Debug, Args)]
pub struct RegisterArgs {
    #[arg(long, env = "SPLATPRIOR_LIDAR")]
    pub lidar: Option<PathBuf>,
    #[arg(long, env = "SPLATPRIOR_COLMAP")]
    pub colmap: Option<PathBuf>,
    #[arg(long, env = "SPLATPRIOR_CORRESPONDENCES")]
    pub correspondences: Option<PathBuf>,
    #[arg(long, env = "SPLATPRIOR_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, env = "SPLATPRIOR_RADIUS_MODE")]
    pub radius_mode: Option<RadiusModeArg>,
    #[arg(long, env = "SPLATPRIOR_PERCENTILE")]
    pub percentile: Option<f64>,
    #[arg(long, env = "SPLATPRIOR_OUTLIER_FACTOR")]
    pub outlier_factor: Option<f64>,
    #[arg(long, env = "SPLATPRIOR_SFM_ERROR_PERCENTILE")]
    pub sfm_error_percentile: Option<f64>,
    #[arg(long, env = "SPLATPRIOR_SFM_DISTANCE_FACTOR")]
    pub sfm_distance_factor: Option<f64>,
    /// Keep the robust-radius scale instead of refitting it from the
    /// correspondences.
    #[arg(long, env = "SPLATPRIOR_RIGID_COARSE")]
    pub rigid_coarse: bool,
    #[arg(long, env = "SPLATPRIOR_TRIM_FRACTION")]
    pub trim_fraction: Option<f64>,
    #[arg(long, env = "SPLATPRIOR_MAX_ITERATIONS")]
    pub max_iterations: Option<usize>,
    #[arg(long, env = "SPLATPRIOR_RELATIVE_TOLERANCE")]
    pub relative_tolerance: Option<f64>,
    #[arg(long, env = "SPLATPRIOR_MAX_CORRESPONDENCE_DISTANCE")]
    pub max_correspondence_distance: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RadiusModeArg {
    Percentile,
    Max,
}

#[derive(Debug, Args)]
pub struct FuseArgs {
    #[arg(long, env = "SPLATPRIOR_LIDAR")]
    pub lidar: Option<PathBuf>,
    /// `transform.json` written by `register`.
    #[arg(long, env = "SPLATPRIOR_TRANSFORM")]
    pub transform: Option<PathBuf>,
    /// Camera and image files to copy next to the exported points.
    #[arg(long, env = "SPLATPRIOR_COLMAP")]
    pub colmap: Option<PathBuf>,
    #[arg(long, env = "SPLATPRIOR_OUT")]
    pub out: Option<PathBuf>,
    /// Voxel edge in meters.
    #[arg(long, env = "SPLATPRIOR_METRIC_EDGE")]
    pub metric_edge: Option<f64>,
    /// SfM units per meter (default: the transform's scale).
    #[arg(long, env = "SPLATPRIOR_FRAME_SCALE")]
    pub frame_scale: Option<f64>,
    #[arg(long, env = "SPLATPRIOR_MAX_POINTS")]
    pub max_points: Option<usize>,
    #[arg(long, env = "SPLATPRIOR_OPACITY")]
    pub opacity: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvalImagesArgs {
    #[arg(long, env = "SPLATPRIOR_PRED")]
    pub pred: Option<PathBuf>,
    #[arg(long, env = "SPLATPRIOR_GT")]
    pub gt: Option<PathBuf>,
    #[arg(long, env = "SPLATPRIOR_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Nn,
    Hungarian,
}

#[derive(Debug, Args)]
pub struct EvalCloudArgs {
    /// Point PLY or splat PLY.
    #[arg(long, env = "SPLATPRIOR_PRED")]
    pub pred: Option<PathBuf>,
    #[arg(long, env = "SPLATPRIOR_GT")]
    pub gt: Option<PathBuf>,
    #[arg(long, env = "SPLATPRIOR_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, env = "SPLATPRIOR_MODE")]
    pub mode: Option<ModeArg>,
    #[arg(long, env = "SPLATPRIOR_MAX_MATCH_DISTANCE")]
    pub max_match_distance: Option<f64>,
    #[arg(long, env = "SPLATPRIOR_HUNGARIAN_CAP")]
    pub hungarian_cap: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Png,
    Rawf,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long, env = "SPLATPRIOR_SPLATS")]
    pub splats: Option<PathBuf>,
    #[arg(long, env = "SPLATPRIOR_COLMAP")]
    pub colmap: Option<PathBuf>,
    #[arg(long, env = "SPLATPRIOR_OUT")]
    pub out: Option<PathBuf>,
    /// Comma-separated image ids (default: every image).
    #[arg(long, value_delimiter = ',', env = "SPLATPRIOR_IMAGE_IDS")]
    pub image_ids: Option<Vec<u32>>,
    #[arg(long, value_enum, env = "SPLATPRIOR_FORMAT")]
    pub format: Option<FormatArg>,
    /// Background as `r,g,b` in [0, 1].
    #[arg(long, value_delimiter = ',', num_args = 3, env = "SPLATPRIOR_BACKGROUND")]
    pub background: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Scale clamp reference when seeding splats, in input units.
    #[arg(long, default_value_t = 0.2)]
    pub edge: f64,
    #[arg(long, default_value_t = 0.1)]
    pub opacity: f64,
    /// Write ASCII instead of binary PLY for point output.
    #[arg(long)]
    pub ascii: bool,
}

/// Outcome of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Done,
    NotConverged,
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::new(ErrorKind::InvalidConfig, "--threads must be at least 1"));
        }
        // Fails only if a pool already exists, e.g. when called twice in
        // one process; the existing pool is then used.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let ctx = commands::Context {
        file,
        deterministic: cli.deterministic,
        force: cli.force,
    };
    match &cli.command {
        Command::Register(a) => commands::register(&ctx, a),
        Command::Fuse(a) => commands::fuse(&ctx, a),
        Command::EvalImages(a) => commands::eval_images(&ctx, a),
        Command::EvalCloud(a) => commands::eval_cloud(&ctx, a),
        Command::Render(a) => commands::render(&ctx, a),
        Command::Convert(a) => commands::convert(&ctx, a),
    }
}

/// Parses the process arguments, runs, and returns the exit status.
pub fn run() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let _ = e.print();
            eprintln!(
                "{}",
                CliError::new(ErrorKind::InvalidConfig, "invalid command line").to_json()
            );
            return 1;
        }
    };
    match execute(&cli) {
        Ok(Outcome::Done) => 0,
        Ok(Outcome::NotConverged) => 2,
        Err(e) => {
            eprintln!("{}", e.to_json());
            1
        }
    }
}
