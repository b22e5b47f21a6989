use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use eigencontours::dataset::Grouping;
use eigencontours::evaluation::GroundTruth;
use eigencontours::pipeline::{self, RunConfig, Split};

/// Eigencontour descriptors: extract, fit, encode/decode, cluster, evaluate.
#[derive(Parser)]
#[command(name = "eigencontours", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic star-polygon corpus (COCO-style JSON).
    Synth(Flags),
    /// Convert annotations to star-convex contours (contour CSV).
    Extract(Flags),
    /// Fit eigencontour bases (one per group).
    Fit(Flags),
    /// Encode and decode contours with a basis.
    Codec(Flags),
    /// K-means in descriptor space.
    Cluster(Flags),
    /// F-vs-M curves, AUC-F and the clustering protocol.
    Eval(Flags),
}

#[derive(Args, Default)]
struct Flags {
    /// TOML file with any of the options below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// COCO-style annotation file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Contour CSV produced by `extract`.
    #[arg(long)]
    contours: Option<PathBuf>,
    /// Basis JSON produced by `fit`.
    #[arg(long)]
    basis: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Rays per contour [default: 360].
    #[arg(long)]
    n: Option<usize>,
    /// Direction of the first ray in radians [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    angle0: Option<f64>,
    /// Inner-center search resolution in pixels [default: 0.25].
    #[arg(long)]
    grid_step: Option<f64>,
    /// Keep only these categories (comma-separated).
    #[arg(long, value_delimiter = ',')]
    include: Option<Vec<String>>,
    /// Drop these categories (comma-separated).
    #[arg(long, value_delimiter = ',')]
    exclude: Option<Vec<String>>,
    /// universal | per-category [default: universal].
    #[arg(long)]
    group: Option<String>,
    /// Clip annotation polygons to their image rectangle.
    #[arg(long)]
    clip: bool,
    /// Descriptor dimension [default: 16].
    #[arg(long)]
    m: Option<String>,
    /// eigencontour | centroidal_subsample | chebyshev | all.
    #[arg(long)]
    descriptor: Option<String>,
    /// Clusters [default: 100].
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Matching tolerance: diag:<fraction> or px:<pixels> [default: diag:0.01].
    #[arg(long)]
    tol: Option<String>,
    /// star | raw [default: star].
    #[arg(long)]
    gt: Option<String>,
    /// train | heldout [default: train].
    #[arg(long)]
    split: Option<String>,
    #[arg(long)]
    holdout_fraction: Option<f64>,
    /// Also run the nearest-centroid protocol with this many clusters.
    #[arg(long)]
    cluster_k: Option<usize>,
    /// Synthetic shapes to generate [default: 500].
    #[arg(long)]
    count: Option<usize>,
    /// Active harmonics per shape, lo:hi [default: 1:6].
    #[arg(long)]
    harmonics: Option<String>,
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long)]
    smoothness: Option<f64>,
    #[arg(long)]
    noise: Option<f64>,
    /// Phase window half-width in radians (pi = independent phases).
    #[arg(long)]
    phase_jitter: Option<f64>,
    /// Base radius range, lo:hi [default: 40:80].
    #[arg(long)]
    radius: Option<String>,
    #[arg(long)]
    vertices: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    categories: Option<Vec<String>>,
    #[arg(long)]
    image_size: Option<u32>,
}

fn flags_to_config(f: Flags, eval: bool) -> Result<RunConfig, String> {
    let mut cfg = match &f.config {
        Some(path) => RunConfig::from_toml_file(path).map_err(|e| e.to_string())?,
        None => RunConfig::default(),
    };
    // `--m` is a single dimension everywhere except `eval`, where it may be a sweep.
    let (m, m_sweep) = match f.m {
        Some(s) if eval && (s.contains(':') || s.contains(',')) => (None, Some(s)),
        Some(s) => (
            Some(
                s.parse::<usize>()
                    .map_err(|_| format!("invalid --m '{s}'"))?,
            ),
            None,
        ),
        None => (None, None),
    };
    let group = f
        .group
        .map(|s| s.parse::<Grouping>())
        .transpose()
        .map_err(|e| e.to_string())?;
    let split = f
        .split
        .map(|s| s.parse::<Split>())
        .transpose()
        .map_err(|e| e.to_string())?;
    let gt = match f.gt.as_deref() {
        None => None,
        Some("star") => Some(GroundTruth::StarContour),
        Some("raw") => Some(GroundTruth::RawPolygon),
        Some(other) => return Err(format!("unknown ground truth '{other}' (use star or raw)")),
    };
    let flags = RunConfig {
        input: f.input,
        contours: f.contours,
        basis: f.basis,
        out: f.out,
        n: f.n,
        angle0: f.angle0,
        grid_step: f.grid_step,
        include: f.include,
        exclude: f.exclude,
        group,
        clip: f.clip.then_some(true),
        m,
        m_sweep,
        descriptor: f.descriptor,
        k: f.k,
        seed: f.seed,
        max_iter: f.max_iter,
        tol: f.tol,
        gt,
        split,
        holdout_fraction: f.holdout_fraction,
        cluster_k: f.cluster_k,
        count: f.count,
        harmonics: f.harmonics,
        amplitude: f.amplitude,
        smoothness: f.smoothness,
        noise: f.noise,
        phase_jitter: f.phase_jitter,
        radius: f.radius,
        vertices: f.vertices,
        categories: f.categories,
        image_size: f.image_size,
    };
    cfg = cfg.overlay(flags);
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Some(threads) = std::env::var("EIGENCONTOURS_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let (name, flags, run): (
        &str,
        Flags,
        fn(&RunConfig) -> eigencontours::Result<pipeline::Outcome>,
    ) = match cli.command {
        Command::Synth(f) => ("synth", f, pipeline::cmd_synth),
        Command::Extract(f) => ("extract", f, pipeline::cmd_extract),
        Command::Fit(f) => ("fit", f, pipeline::cmd_fit),
        Command::Codec(f) => ("codec", f, pipeline::cmd_codec),
        Command::Cluster(f) => ("cluster", f, pipeline::cmd_cluster),
        Command::Eval(f) => ("eval", f, pipeline::cmd_eval),
    };

    let usage = || {
        let mut cmd = Cli::command();
        cmd.find_subcommand_mut(name)
            .map(|c| c.render_usage().to_string())
            .unwrap_or_default()
    };
    let cfg = match flags_to_config(flags, name == "eval") {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}\n\n{}", usage());
            return ExitCode::from(1);
        }
    };

    match run(&cfg) {
        Ok(outcome) => {
            for (id, reason) in &outcome.skipped {
                eprintln!("skipped instance {id}: {reason}");
            }
            for path in &outcome.written {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, eigencontours::Error::Config(_)) {
                eprintln!("\n{}", usage());
            }
            ExitCode::from(if e.is_input_error() { 1 } else { 2 })
        }
    }
}
