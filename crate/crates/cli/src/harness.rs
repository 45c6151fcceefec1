//! Experiment orchestration: dataset loading, shared graph construction,
//! seeded multi-run execution, scoring and artifact emission.
//!
//! The graph is built once per config and reused; each run varies only the
//! fidelity sample and the initial state (seeds shifted by the run index),
//! so independent runs can execute in parallel and still aggregate
//! deterministically in run-index order.

use std::path::Path;
use std::time::Instant;

use glm_core::baselines::{align_labels, apply_alignment, kmeans, spectral_embedding};
use glm_core::datasets::{sample_fidelity, swiss_roll, three_moons, Dataset};
use glm_core::graph::{build_graph_from_knn, knn_row, GraphConfig, SimilarityGraph};
use glm_core::metrics::{accuracy, aggregate, confusion, EvalReport};
use glm_core::model::FidelitySet;
use glm_core::solver::{run as solve, RunTrace, SolverConfig};
use rayon::prelude::*;

use crate::config::{DatasetSpec, Method, RunConfigFile};
use crate::report::ReportJson;
use crate::{CliError, Result};

/// Loads or generates the data set named by a config.
pub fn load_dataset(spec: &DatasetSpec) -> Result<Dataset> {
    match spec {
        DatasetSpec::Generator { generator, seed } => match generator.as_str() {
            "three-moons" => Ok(three_moons(*seed)),
            "swiss-roll" => Ok(swiss_roll(*seed)),
            other => Err(CliError::Config(format!("unknown generator '{other}'"))),
        },
        DatasetSpec::File { path, label_column } => {
            crate::io::csv::load_csv_dataset(path, label_column.as_deref())
        }
        DatasetSpec::Idx {
            idx,
            per_class,
            seed,
        } => {
            let pairs: Vec<_> = idx
                .iter()
                .map(|p| (p.images.clone(), p.labels.clone()))
                .collect();
            let data = crate::io::idx::load_idx_dataset(&pairs)?;
            match per_class {
                Some(c) => data
                    .stratified_subsample(*c, *seed)
                    .map_err(CliError::from),
                None => Ok(data),
            }
        }
    }
}

/// kNN rows computed in parallel (identical to the sequential search; rows
/// are independent), then the usual graph assembly.
pub fn build_graph_parallel(data: &Dataset, config: &GraphConfig) -> Result<SimilarityGraph> {
    config.validate(data.len())?;
    let knn: Vec<_> = (0..data.len())
        .into_par_iter()
        .map(|i| knn_row(data, i, config.n_neighbors))
        .collect();
    build_graph_from_knn(&knn, config).map_err(CliError::from)
}

struct RunScore {
    accuracy: f64,
    runtime_s: f64,
    confusion: Vec<u64>,
    /// Kept only for run 0.
    detail: Option<(Vec<usize>, RunTrace)>,
}

/// Everything an experiment produces before files are written.
pub struct ExperimentOutput {
    pub eval: EvalReport,
    pub labels_run0: Vec<usize>,
    pub trace_run0: Option<RunTrace>,
    pub dataset: Dataset,
}

/// Runs a full experiment config: one shared graph, `runs` seeded runs.
pub fn run_experiment(config: &RunConfigFile) -> Result<ExperimentOutput> {
    config.validate()?;
    let data = load_dataset(&config.dataset)?;
    run_experiment_on(config, data, None)
}

/// As [`run_experiment`], with a preloaded dataset and optional cached
/// graph (checked against the dataset size).
pub fn run_experiment_on(
    config: &RunConfigFile,
    data: Dataset,
    cached_graph: Option<SimilarityGraph>,
) -> Result<ExperimentOutput> {
    let truth = data
        .labels()
        .ok_or_else(|| CliError::Config("this experiment needs ground-truth labels".into()))?
        .to_vec();
    let k = config.solver.k;
    if data.num_classes() != k {
        return Err(CliError::Config(format!(
            "dataset has {} classes but solver.k = {k}",
            data.num_classes()
        )));
    }

    let needs_graph = !matches!(config.method, Method::Kmeans);
    let graph = if needs_graph {
        let graph = match cached_graph {
            Some(g) => g,
            None => build_graph_parallel(
                &data,
                &GraphConfig::new(config.graph.neighbors, config.graph.scale_neighbor),
            )?,
        };
        if graph.len() != data.len() {
            return Err(CliError::Config(format!(
                "graph has {} vertices but dataset has {}",
                graph.len(),
                data.len()
            )));
        }
        if graph.floored_degree_count() > 0 {
            eprintln!(
                "warning: {} vertices had their degree floored (isolated?)",
                graph.floored_degree_count()
            );
        }
        Some(graph)
    } else {
        None
    };

    // spectral embedding is part of the shared, run-independent setup
    let embedding = if matches!(config.method, Method::Spectral) {
        let m = config.eigenvectors.unwrap_or(k);
        Some((spectral_embedding(graph.as_ref().unwrap(), m)?, m))
    } else {
        None
    };

    let restarts = config.restarts.unwrap_or(10);
    let scores: Vec<RunScore> = (0..config.runs)
        .into_par_iter()
        .map(|run_idx| -> Result<RunScore> {
            let start = Instant::now();
            match config.method {
                Method::MulticlassGl => {
                    let graph = graph.as_ref().unwrap();
                    let mut spec = config.fidelity.to_spec();
                    spec.seed = spec.seed.wrapping_add(run_idx as u64);
                    let fidelity = sample_fidelity(&truth, k, &spec, config.solver.mu)?;
                    warn_missing_classes(&fidelity, k, run_idx);
                    let solver_config = SolverConfig {
                        num_classes: k,
                        mu: config.solver.mu,
                        dt: config.solver.dt,
                        schedule: config.solver.schedule()?,
                        n_max: config.solver.n_max,
                        seed: config.solver.seed.wrapping_add(run_idx as u64),
                        early_stop_tol: None,
                    };
                    let outcome = solve(graph, &fidelity, &solver_config)?;
                    let runtime_s = start.elapsed().as_secs_f64();
                    let acc = score_accuracy(
                        &outcome.labels,
                        &truth,
                        &fidelity,
                        config.exclude_fidelity_from_score,
                    )?;
                    let conf = confusion(&outcome.labels, &truth, k)?;
                    let mut trace = outcome.trace;
                    trace.wall_seconds = runtime_s;
                    Ok(RunScore {
                        accuracy: acc,
                        runtime_s,
                        confusion: conf,
                        detail: (run_idx == 0).then_some((outcome.labels, trace)),
                    })
                }
                Method::Kmeans => {
                    let result = kmeans(
                        data.points(),
                        data.len(),
                        data.dim(),
                        k,
                        restarts,
                        config.solver.seed.wrapping_add(run_idx as u64),
                    )?;
                    let perm = align_labels(&result.assignments, &truth, k)?;
                    let aligned = apply_alignment(&result.assignments, &perm);
                    let runtime_s = start.elapsed().as_secs_f64();
                    Ok(RunScore {
                        accuracy: accuracy(&aligned, &truth)?,
                        runtime_s,
                        confusion: confusion(&aligned, &truth, k)?,
                        detail: (run_idx == 0).then_some((aligned, RunTrace::default())),
                    })
                }
                Method::Spectral => {
                    let (embedding, m) = embedding.as_ref().unwrap();
                    let result = kmeans(
                        embedding,
                        data.len(),
                        *m,
                        k,
                        restarts,
                        config.solver.seed.wrapping_add(run_idx as u64),
                    )?;
                    let perm = align_labels(&result.assignments, &truth, k)?;
                    let aligned = apply_alignment(&result.assignments, &perm);
                    let runtime_s = start.elapsed().as_secs_f64();
                    Ok(RunScore {
                        accuracy: accuracy(&aligned, &truth)?,
                        runtime_s,
                        confusion: confusion(&aligned, &truth, k)?,
                        detail: (run_idx == 0).then_some((aligned, RunTrace::default())),
                    })
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let accuracies: Vec<f64> = scores.iter().map(|s| s.accuracy).collect();
    let runtimes: Vec<f64> = scores.iter().map(|s| s.runtime_s).collect();
    let confusions: Vec<Vec<u64>> = scores.iter().map(|s| s.confusion.clone()).collect();
    let eval = aggregate(&accuracies, &runtimes, &confusions, k)?;

    let (labels_run0, trace_run0) = scores
        .into_iter()
        .next()
        .and_then(|s| s.detail)
        .map(|(labels, trace)| {
            let has_trace = !trace.steps.is_empty();
            (labels, has_trace.then_some(trace))
        })
        .unwrap_or_default();

    Ok(ExperimentOutput {
        eval,
        labels_run0,
        trace_run0,
        dataset: data,
    })
}

fn warn_missing_classes(fidelity: &FidelitySet, k: usize, run_idx: usize) {
    let missing = fidelity.missing_classes(k);
    if !missing.is_empty() {
        eprintln!("warning: run {run_idx}: fidelity set has no anchors for classes {missing:?}");
    }
    if fidelity.is_empty() {
        eprintln!("warning: run {run_idx}: empty fidelity set; expect a trivial steady state");
    }
}

fn score_accuracy(
    pred: &[usize],
    truth: &[usize],
    fidelity: &FidelitySet,
    exclude_fidelity: bool,
) -> Result<f64> {
    if !exclude_fidelity {
        return accuracy(pred, truth).map_err(CliError::from);
    }
    let mut is_anchor = vec![false; truth.len()];
    for e in &fidelity.entries {
        is_anchor[e.vertex] = true;
    }
    let mut hits = 0usize;
    let mut total = 0usize;
    for i in 0..truth.len() {
        if !is_anchor[i] {
            total += 1;
            hits += usize::from(pred[i] == truth[i]);
        }
    }
    if total == 0 {
        return Err(CliError::Config(
            "no unlabeled points left to score".into(),
        ));
    }
    Ok(hits as f64 / total as f64)
}

/// Writes report.json plus the run-0 artifacts (trace CSV, energy SVG,
/// scatter SVG) into the output directory. Returns the report path.
pub fn write_artifacts(
    config: &RunConfigFile,
    output: &ExperimentOutput,
    dir: &Path,
    no_timing: bool,
) -> Result<std::path::PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let params = serde_json::json!({
        "graph": config.graph,
        "solver": config.solver,
        "fidelity": config.fidelity,
        "eigenvectors": config.eigenvectors,
        "restarts": config.restarts,
        "exclude_fidelity_from_score": config.exclude_fidelity_from_score,
    });
    let report = ReportJson::new(
        config.dataset_tag(),
        config.method.name().to_string(),
        params,
        &output.eval,
        no_timing,
    );
    let report_path = dir.join("report.json");
    report.write(&report_path)?;

    if let Some(trace) = &output.trace_run0 {
        std::fs::write(dir.join("trace.csv"), crate::report::trace_csv(trace))
            .map_err(|e| CliError::Io(e.to_string()))?;
        std::fs::write(dir.join("energy.svg"), crate::report::energy_svg(trace))
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    if output.dataset.dim() >= 2 && !output.labels_run0.is_empty() {
        let points: Vec<(f64, f64)> = (0..output.dataset.len())
            .map(|i| {
                let p = output.dataset.point(i);
                (p[0], p[1])
            })
            .collect();
        let svg = crate::report::scatter_svg(
            &points,
            &output.labels_run0,
            output.dataset.num_classes(),
        );
        std::fs::write(dir.join("scatter.svg"), svg).map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(report_path)
}
