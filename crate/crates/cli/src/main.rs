use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use glm_cli::config::{DatasetSpec, FidelitySpecJson, GraphSpec, Method, RunConfigFile, SolverSpec};
use glm_cli::harness;
use glm_cli::io::{cache, csv, image};
use glm_cli::report;
use glm_cli::{CliError, Result};
use glm_core::datasets::patch_features;
use glm_core::graph::GraphConfig;
use glm_core::model::{FidelityPoint, FidelitySet};
use glm_core::solver::{run as solve, EpsSchedule, SolverConfig};

/// Multiclass semi-supervised segmentation on similarity graphs.
#[derive(Parser)]
#[command(name = "glm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GeneratorName {
    /// 1500 points, 3 classes, 100 dimensions.
    ThreeMoons,
    /// 1600 points, 4 classes, 3 dimensions.
    SwissRoll,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineName {
    Kmeans,
    Spectral,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic benchmark data set as CSV.
    Generate {
        name: GeneratorName,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "dataset.csv")]
        out: PathBuf,
    },
    /// Build a similarity graph from a CSV data set and cache it.
    Graph {
        #[arg(long)]
        input: PathBuf,
        /// Label column name or index (features only otherwise).
        #[arg(long)]
        label_column: Option<String>,
        #[arg(long, default_value_t = 10)]
        neighbors: usize,
        /// Neighbor rank used for the local scale.
        #[arg(long, default_value_t = 10)]
        scale_m: usize,
        #[arg(long, default_value = "graph.glgr")]
        out: PathBuf,
    },
    /// Run an experiment described by a JSON config file.
    Run(RunArgs),
    /// Run a reference method (k-means or spectral clustering) on a CSV.
    Baseline {
        name: BaselineName,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        label_column: Option<String>,
        /// Number of classes.
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 10)]
        neighbors: usize,
        #[arg(long, default_value_t = 10)]
        scale_m: usize,
        /// Eigenvector count for spectral clustering (defaults to k).
        #[arg(long)]
        eigenvectors: Option<usize>,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        #[arg(long, default_value_t = 30)]
        runs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "report.json")]
        out: PathBuf,
        /// Write the report with runtime fields zeroed.
        #[arg(long)]
        no_timing: bool,
    },
    /// Segment an image from scribble annotations into per-class masks.
    SegmentImage {
        #[arg(long)]
        image: PathBuf,
        /// CSV of x,y,class rows covering every class.
        #[arg(long)]
        scribbles: PathBuf,
        #[arg(long)]
        classes: usize,
        /// Odd patch size for pixel features.
        #[arg(long, default_value_t = 5)]
        patch: usize,
        #[arg(long, default_value_t = 30)]
        neighbors: usize,
        #[arg(long, default_value_t = 30)]
        scale_m: usize,
        #[arg(long, default_value_t = 30.0)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long, default_value_t = 800)]
        nmax: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "masks")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    /// Override solver.mu.
    #[arg(long)]
    mu: Option<f64>,
    /// Override the schedule with a fixed eps.
    #[arg(long)]
    eps: Option<f64>,
    /// Override solver.dt.
    #[arg(long)]
    dt: Option<f64>,
    /// Override solver.n_max.
    #[arg(long)]
    nmax: Option<usize>,
    /// Override solver.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the run count.
    #[arg(long)]
    runs: Option<usize>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reuse a cached graph instead of rebuilding it.
    #[arg(long)]
    graph_cache: Option<PathBuf>,
    /// Write the report with runtime fields zeroed (byte-reproducible).
    #[arg(long)]
    no_timing: bool,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("GLM_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: GLM_THREADS must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Generate { name, seed, out } => {
            let data = match name {
                GeneratorName::ThreeMoons => glm_core::datasets::three_moons(seed),
                GeneratorName::SwissRoll => glm_core::datasets::swiss_roll(seed),
            };
            csv::write_dataset_csv(&out, &data)?;
            println!(
                "wrote {} ({} points, {} features, {} classes)",
                out.display(),
                data.len(),
                data.dim(),
                data.num_classes()
            );
            Ok(())
        }
        Command::Graph {
            input,
            label_column,
            neighbors,
            scale_m,
            out,
        } => {
            let data = csv::load_csv_dataset(&input, label_column.as_deref())?;
            let graph =
                harness::build_graph_parallel(&data, &GraphConfig::new(neighbors, scale_m))?;
            cache::write_graph_cache(&out, &graph)?;
            println!(
                "wrote {} ({} vertices, {} edges)",
                out.display(),
                graph.len(),
                graph.edge_count()
            );
            Ok(())
        }
        Command::Run(args) => cmd_run(args),
        Command::Baseline {
            name,
            input,
            label_column,
            k,
            neighbors,
            scale_m,
            eigenvectors,
            restarts,
            runs,
            seed,
            out,
            no_timing,
        } => {
            let method = match name {
                BaselineName::Kmeans => Method::Kmeans,
                BaselineName::Spectral => Method::Spectral,
            };
            let config = RunConfigFile {
                dataset: DatasetSpec::File {
                    path: input,
                    label_column,
                },
                graph: GraphSpec {
                    neighbors,
                    scale_neighbor: scale_m,
                },
                method,
                solver: SolverSpec {
                    k,
                    mu: 1.0,
                    dt: 0.01,
                    eps: Some(1.0),
                    eps0: None,
                    eps_f: None,
                    delta_eps: None,
                    n_max: 1,
                    seed,
                },
                fidelity: FidelitySpecJson::PerClass { per_class: 1, seed },
                runs,
                output_dir: PathBuf::new(),
                eigenvectors,
                restarts: Some(restarts),
                exclude_fidelity_from_score: false,
            };
            let output = harness::run_experiment(&config)?;
            let params = serde_json::json!({
                "graph": config.graph,
                "k": k,
                "eigenvectors": config.eigenvectors,
                "restarts": restarts,
                "seed": seed,
            });
            let report = report::ReportJson::new(
                config.dataset_tag(),
                config.method.name().to_string(),
                params,
                &output.eval,
                no_timing,
            );
            report.write(&out)?;
            println!(
                "{}: mean accuracy {:.4} (stddev {:.4}) over {} runs -> {}",
                config.method.name(),
                output.eval.mean_accuracy,
                output.eval.stddev,
                runs,
                out.display()
            );
            Ok(())
        }
        Command::SegmentImage {
            image: image_path,
            scribbles,
            classes,
            patch,
            neighbors,
            scale_m,
            mu,
            eps,
            dt,
            nmax,
            seed,
            out,
        } => cmd_segment_image(
            &image_path,
            &scribbles,
            classes,
            patch,
            neighbors,
            scale_m,
            mu,
            eps,
            dt,
            nmax,
            seed,
            &out,
        ),
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let mut config = RunConfigFile::load(&args.config)?;
    if let Some(mu) = args.mu {
        config.solver.mu = mu;
    }
    if let Some(eps) = args.eps {
        config.solver.eps = Some(eps);
        config.solver.eps0 = None;
        config.solver.eps_f = None;
        config.solver.delta_eps = None;
    }
    if let Some(dt) = args.dt {
        config.solver.dt = dt;
    }
    if let Some(n_max) = args.nmax {
        config.solver.n_max = n_max;
    }
    if let Some(seed) = args.seed {
        config.solver.seed = seed;
    }
    if let Some(runs) = args.runs {
        config.runs = runs;
    }
    if let Some(out) = args.out {
        config.output_dir = out;
    }
    config.validate()?;

    let data = harness::load_dataset(&config.dataset)?;
    let cached = match &args.graph_cache {
        Some(path) => Some(cache::load_graph_cache(path)?),
        None => None,
    };
    let output = harness::run_experiment_on(&config, data, cached)?;
    let report_path =
        harness::write_artifacts(&config, &output, &config.output_dir.clone(), args.no_timing)?;
    println!(
        "{}: mean accuracy {:.4} (stddev {:.4}) over {} runs -> {}",
        config.method.name(),
        output.eval.mean_accuracy,
        output.eval.stddev,
        output.eval.runs,
        report_path.display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_segment_image(
    image_path: &Path,
    scribbles_path: &Path,
    classes: usize,
    patch: usize,
    neighbors: usize,
    scale_m: usize,
    mu: f64,
    eps: f64,
    dt: f64,
    n_max: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<()> {
    let img = image::load_image(image_path)?;
    let scribbles = csv::load_scribbles(scribbles_path)?;

    let mut entries = Vec::with_capacity(scribbles.len());
    let mut seen_class = vec![false; classes];
    let mut seen_pixel = vec![false; img.width * img.height];
    for (x, y, class) in scribbles {
        if x >= img.width || y >= img.height {
            return Err(CliError::Config(format!(
                "scribble ({x}, {y}) outside {}x{} image",
                img.width, img.height
            )));
        }
        if class >= classes {
            return Err(CliError::Config(format!(
                "scribble class {class} outside [0, {classes})"
            )));
        }
        let vertex = y * img.width + x;
        if seen_pixel[vertex] {
            return Err(CliError::Config(format!(
                "pixel ({x}, {y}) scribbled twice"
            )));
        }
        seen_pixel[vertex] = true;
        seen_class[class] = true;
        entries.push(FidelityPoint {
            vertex,
            class,
            weight: mu,
        });
    }
    if let Some(missing) = seen_class.iter().position(|&s| !s) {
        return Err(CliError::Config(format!(
            "scribbles cover no pixel of class {missing}"
        )));
    }
    entries.sort_unstable_by_key(|e| e.vertex);

    let features = patch_features(&img, patch)?;
    eprintln!(
        "features: {} pixels x {} dims; building graph (N = {neighbors})",
        features.len(),
        features.dim()
    );
    let graph = harness::build_graph_parallel(&features, &GraphConfig::new(neighbors, scale_m))?;
    let solver_config = SolverConfig {
        num_classes: classes,
        mu,
        dt,
        schedule: EpsSchedule::Fixed(eps),
        n_max,
        seed,
        early_stop_tol: None,
    };
    let fidelity = FidelitySet { entries };
    let outcome = solve(&graph, &fidelity, &solver_config)?;

    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let paths =
        report::write_class_masks(&outcome.labels, img.width, img.height, classes, out_dir)?;
    std::fs::write(
        out_dir.join("trace.csv"),
        report::trace_csv(&outcome.trace),
    )
    .map_err(|e| CliError::Io(e.to_string()))?;
    println!("wrote {} masks under {}", paths.len(), out_dir.display());
    Ok(())
}
