//! `vacugrasp`: analyze suction grasps on meshes, plan grasps from depth
//! images, render synthetic views, and generate labeled datasets.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

mod camera_file;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "vacugrasp", version, about)]
struct Cli {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed for bit-reproducible runs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker thread cap (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate seal formation, wrench resistance and robustness for grasps
    /// on a mesh.
    Analyze(AnalyzeArgs),
    /// Plan a grasp from a depth image with the cross-entropy method.
    Plan(PlanArgs),
    /// Render a depth image of a mesh in a stable pose.
    Render(RenderArgs),
    /// Dataset generation, verification and statistics.
    #[command(subcommand)]
    Dataset(DatasetCmd),
    /// Threshold-sweep series (precision/recall/attempt/success) from labels.
    Plotdata(PlotdataArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Mesh file (.obj or binary .stl).
    #[arg(long)]
    mesh: PathBuf,
    /// Uniform scale applied on load (e.g. 0.001 for millimeter files).
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Grasp target point "x,y,z" in meters.
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    /// Approach direction "x,y,z" (toward the surface).
    #[arg(long, allow_hyphen_values = true)]
    approach: Option<String>,
    /// Sample this many surface candidates instead of a single grasp.
    #[arg(long)]
    sample: Option<usize>,
    /// Also rank candidates by a quality metric
    /// (planarity|centroid|pc|pc3d|ss|wr|rwr).
    #[arg(long)]
    metric: Option<String>,
    /// Write the report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Dump per-trial robustness records of the first grasp as CSV.
    #[arg(long)]
    trials_csv: Option<PathBuf>,
}

#[derive(Args)]
struct PlanArgs {
    /// Depth image (raw f32, with a `.json` sidecar header).
    #[arg(long)]
    depth: PathBuf,
    /// Camera file: intrinsics plus camera-to-world pose (JSON).
    #[arg(long)]
    camera: PathBuf,
    /// Quality metric (planarity|centroid|pc|pc3d|ss|wr|rwr).
    #[arg(long, default_value = "pc")]
    metric: String,
    /// Mesh file for the model-based metrics (pc3d|ss|wr|rwr), posed as rendered.
    #[arg(long)]
    mesh: Option<PathBuf>,
    #[arg(long)]
    scale: Option<f64>,
    /// CEM iterations (overrides config).
    #[arg(long)]
    cem_iters: Option<usize>,
    /// Write the chosen grasp as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Stable pose index (by descending probability).
    #[arg(long, default_value_t = 0)]
    pose: usize,
    /// Apply the sensor noise model.
    #[arg(long, default_value_t = false)]
    noisy: bool,
    /// Output prefix: writes `<out>.depth`, `<out>.depth.json`,
    /// `<out>.camera.json` and `<out>.png`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum DatasetCmd {
    /// Generate a labeled thumbnail dataset from a directory of meshes.
    Generate {
        #[arg(long)]
        objects: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-checksum shards and audit a fraction of the labels.
    Verify {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        objects: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value_t = 0.01)]
        audit: f64,
    },
    /// Print tuple counts and the positive fraction.
    Stats {
        #[arg(long)]
        dir: PathBuf,
    },
    /// Write the built-in desk-scale object set as OBJ files.
    DemoObjects {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct PlotdataArgs {
    /// Dataset directory (reads lambda/label from the shards).
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// CSV file with `lambda,label` rows instead of a dataset.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if cli.workers > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global()
        {
            eprintln!("error: {}", e);
            return ExitCode::from(1);
        }
    }

    let mut config = match &cli.config {
        Some(path) => match vacugrasp_core::RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("config error: {}", e);
                return ExitCode::from(2);
            }
        },
        None => vacugrasp_core::RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }

    let result = match cli.command {
        Command::Analyze(args) => commands::analyze(&config, args),
        Command::Plan(args) => commands::plan(&config, args),
        Command::Render(args) => commands::render(&config, args),
        Command::Dataset(cmd) => commands::dataset(&config, cmd),
        Command::Plotdata(args) => commands::plotdata(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(1)
        }
    }
}
