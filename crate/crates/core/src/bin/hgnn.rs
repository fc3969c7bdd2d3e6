use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde_json::json;

use hgnn_core::construction::{graph_neighborhood_hyperedges, knn_hyperedges};
use hgnn_core::data::{
    self, check_compatible, load_checkpoint, load_dataset, load_hypergraph,
    load_hypergraph_with_n, save_checkpoint, save_hypergraph, CheckpointMeta, DatasetBundle,
};
use hgnn_core::error::{HgnnError, Result};
use hgnn_core::hypergraph::{concat_modalities, Hypergraph};
use hgnn_core::nn::{evaluate_with_operator, train_with_operator, TrainConfig};
use hgnn_core::spectral::{eigendecompose, regularizer_omega, MAX_DENSE_N};

#[derive(Parser)]
#[command(name = "hgnn", version, about = "Hypergraph neural network toolkit")]
struct Cli {
    /// Worker threads for sparse kernels (results do not depend on it).
    #[arg(long, global = true, env = "HGNN_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a hypergraph from features (k nearest neighbours) or a graph.
    BuildHypergraph(BuildArgs),
    /// Column-concatenate hyperedge files over the same vertex set.
    Concat(ConcatArgs),
    /// Train a two-layer model on a dataset directory.
    Train(TrainArgs),
    /// Accuracy of a checkpoint on one split.
    Eval(EvalArgs),
    /// Degree statistics, Laplacian spectrum extremes and regularizer values.
    Inspect(InspectArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Knn,
    Graph,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long, value_enum)]
    method: Method,
    /// Neighbours per hyperedge (knn).
    #[arg(long, required_if_eq("method", "knn"), value_parser = clap::value_parser!(u64).range(1..))]
    k: Option<u64>,
    /// features.tsv (knn).
    #[arg(long, required_if_eq("method", "knn"))]
    features: Option<PathBuf>,
    /// edges.tsv (graph).
    #[arg(long, required_if_eq("method", "graph"))]
    edges: Option<PathBuf>,
    /// Vertex count for graph input; defaults to one past the largest id.
    #[arg(long)]
    n_vertices: Option<usize>,
    #[arg(long, default_value = "hyperedges.tsv")]
    out: PathBuf,
}

#[derive(Args)]
struct ConcatArgs {
    #[arg(required = true, num_args = 2..)]
    inputs: Vec<PathBuf>,
    #[arg(long, default_value = "hyperedges.tsv")]
    out: PathBuf,
}

#[derive(Args)]
struct StructureArgs {
    /// Use this hyperedge file instead of the dataset's structure.
    #[arg(long, conflicts_with = "knn")]
    hypergraph: Option<PathBuf>,
    /// Build k-nearest-neighbour hyperedges from the features.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    knn: Option<u64>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[command(flatten)]
    structure: StructureArgs,
    #[arg(long, default_value = "checkpoint.json")]
    checkpoint: PathBuf,
    #[arg(long, default_value = "history.jsonl")]
    history: PathBuf,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 0.001)]
    lr: f64,
    #[arg(long, default_value_t = 0.5)]
    dropout: f64,
    #[arg(long, default_value_t = 16)]
    hidden: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Early-stopping patience in epochs; 0 disables it.
    #[arg(long, default_value_t = 0)]
    patience: usize,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    dataset: PathBuf,
    #[command(flatten)]
    structure: StructureArgs,
    #[arg(long, default_value = "test", value_parser = ["train", "validation", "test"])]
    split: String,
}

#[derive(Args)]
struct InspectArgs {
    #[arg(long)]
    hypergraph: PathBuf,
    /// Signal file, one value per line, for the regularizer.
    #[arg(long)]
    signal: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(2),
            };
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }

    let result = match cli.command {
        Command::BuildHypergraph(a) => build(a),
        Command::Concat(a) => concat(a),
        Command::Train(a) => train(a),
        Command::Eval(a) => eval(a),
        Command::Inspect(a) => inspect(a),
    };
    match result {
        Ok(value) => {
            println!("{value}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                HgnnError::InvalidConfig(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn summary(g: &Hypergraph, out: &Path) -> serde_json::Value {
    let mean = if g.n_edges() == 0 {
        0.0
    } else {
        g.nnz() as f64 / g.n_edges() as f64
    };
    eprintln!(
        "n = {}, e = {}, mean edge degree = {mean:.3}",
        g.n_vertices(),
        g.n_edges()
    );
    json!({
        "out": out.display().to_string(),
        "n_vertices": g.n_vertices(),
        "n_edges": g.n_edges(),
        "mean_edge_degree": mean,
    })
}

fn build(a: BuildArgs) -> Result<serde_json::Value> {
    let g = match a.method {
        Method::Knn => {
            let path = a.features.expect("required by clap");
            let bytes = fs::read(&path).map_err(|e| HgnnError::Io {
                path: path.clone(),
                source: e,
            })?;
            let x = data::parse_features(&bytes, &path.display().to_string())?;
            knn_hyperedges(&x, a.k.expect("required by clap") as usize)?
        }
        Method::Graph => {
            let path = a.edges.expect("required by clap");
            let bytes = fs::read(&path).map_err(|e| HgnnError::Io {
                path: path.clone(),
                source: e,
            })?;
            let n = match a.n_vertices {
                Some(n) => n,
                None => {
                    let probe = data::parse_edges(&bytes, &path.display().to_string(), usize::MAX)?;
                    probe.min_vertices()
                }
            };
            let edges = data::parse_edges(&bytes, &path.display().to_string(), n)?;
            graph_neighborhood_hyperedges(&edges, n)?
        }
    };
    save_hypergraph(&g, &a.out)?;
    Ok(summary(&g, &a.out))
}

fn concat(a: ConcatArgs) -> Result<serde_json::Value> {
    let graphs = a
        .inputs
        .iter()
        .map(load_hypergraph)
        .collect::<Result<Vec<_>>>()?;
    let fused = concat_modalities(&graphs)?;
    save_hypergraph(&fused, &a.out)?;
    Ok(summary(&fused, &a.out))
}

fn structure(ds: &DatasetBundle, s: &StructureArgs) -> Result<Hypergraph> {
    if let Some(path) = &s.hypergraph {
        return load_hypergraph_with_n(path, ds.n_vertices());
    }
    if let Some(k) = s.knn {
        return knn_hyperedges(&ds.features, k as usize);
    }
    ds.structure()
}

fn train(a: TrainArgs) -> Result<serde_json::Value> {
    let ds = load_dataset(&a.dataset)?;
    let g = structure(&ds, &a.structure)?;
    let cfg = TrainConfig {
        learning_rate: a.lr,
        dropout_p: a.dropout,
        hidden_dim: a.hidden,
        epochs: a.epochs,
        seed: a.seed,
        early_stop_patience: a.patience,
        ..TrainConfig::default()
    };
    info!(
        "training on {} vertices, {} hyperedges, {} features, {} classes",
        g.n_vertices(),
        g.n_edges(),
        ds.features.dim(),
        ds.class_names.len()
    );
    let op = g.normalized_theta();
    let (model, history) = train_with_operator(&op, &ds.features, &ds.labels, &ds.split, &cfg)?;

    let meta = CheckpointMeta {
        config: cfg.clone(),
        seed: cfg.seed,
        classes: ds.class_names.clone(),
    };
    save_checkpoint(&model, &meta, &a.checkpoint)?;
    fs::write(&a.history, history.to_jsonl()?).map_err(|e| HgnnError::Io {
        path: a.history.clone(),
        source: e,
    })?;

    let score = |idx: &[usize]| -> Result<Option<f64>> {
        if idx.is_empty() {
            Ok(None)
        } else {
            evaluate_with_operator(&model, &op, &ds.features, &ds.labels, idx).map(Some)
        }
    };
    Ok(json!({
        "config": cfg,
        "epochs_run": history.epochs.len(),
        "best_epoch": history.best_epoch,
        "checkpoint": a.checkpoint.display().to_string(),
        "history": a.history.display().to_string(),
        "validation_accuracy": score(&ds.split.validation)?,
        "test_accuracy": score(&ds.split.test)?,
    }))
}

fn eval(a: EvalArgs) -> Result<serde_json::Value> {
    let (model, meta) = load_checkpoint(&a.checkpoint)?;
    let ds = load_dataset(&a.dataset)?;
    check_compatible(&model, ds.features.dim(), ds.class_names.len())?;
    if !meta.classes.is_empty() && meta.classes != ds.class_names {
        return Err(HgnnError::ShapeMismatch(
            "checkpoint class table differs from the dataset's".into(),
        ));
    }
    let g = structure(&ds, &a.structure)?;
    let idx = ds.split.by_name(&a.split).expect("validated by clap");
    let acc = evaluate_with_operator(&model, &g.normalized_theta(), &ds.features, &ds.labels, idx)?;
    Ok(json!({ "split": a.split, "accuracy": acc, "n": idx.len() }))
}

fn histogram<T: Ord>(values: impl IntoIterator<Item = T>) -> BTreeMap<T, usize> {
    let mut h = BTreeMap::new();
    for v in values {
        *h.entry(v).or_insert(0) += 1;
    }
    h
}

fn inspect(a: InspectArgs) -> Result<serde_json::Value> {
    let g = load_hypergraph(&a.hypergraph)?;
    let deg = g.degrees();
    let vertex_hist: Vec<_> = histogram(deg.vertex_degrees.iter().map(|d| d.to_bits()))
        .into_iter()
        .map(|(bits, count)| json!({ "degree": f64::from_bits(bits), "count": count }))
        .collect();
    let edge_hist: Vec<_> = histogram(deg.edge_degrees.iter().copied())
        .into_iter()
        .map(|(d, count)| json!({ "degree": d, "count": count }))
        .collect();

    let mut out = json!({
        "n_vertices": g.n_vertices(),
        "n_edges": g.n_edges(),
        "nnz": g.nnz(),
        "isolated_vertices": deg.vertex_degrees.iter().filter(|&&d| d == 0.0).count(),
        "vertex_degree_histogram": vertex_hist,
        "edge_degree_histogram": edge_hist,
    });

    let op = g.normalized_theta();
    match eigendecompose(op.laplacian().to_dense().view()) {
        Ok(dec) => {
            let n = dec.n();
            out["laplacian_spectrum"] = if n == 0 {
                json!(null)
            } else {
                json!({ "min": dec.eigenvalues[0], "max": dec.eigenvalues[n - 1] })
            };
        }
        Err(HgnnError::TooLarge { n, limit }) => {
            eprintln!("note: skipping spectrum, n = {n} exceeds the dense limit {limit}");
            out["laplacian_spectrum"] =
                json!({ "skipped": format!("n = {n} exceeds dense limit {MAX_DENSE_N}") });
        }
        Err(e) => return Err(e),
    }

    if let Some(path) = &a.signal {
        let bytes = fs::read(path).map_err(|e| HgnnError::Io {
            path: path.clone(),
            source: e,
        })?;
        let text = String::from_utf8_lossy(&bytes);
        let mut f = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let v: f64 = line.trim().parse().map_err(|_| HgnnError::Parse {
                path: path.display().to_string(),
                line: i + 1,
                message: format!("bad value {line:?}"),
            })?;
            f.push(v);
        }
        out["omega"] = json!(regularizer_omega(&g, &f)?);
    }
    Ok(out)
}
