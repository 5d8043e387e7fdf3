//! Subcommand implementations and the file formats they share.

use std::fs;
use std::path::{Path, PathBuf};

use qgcn_core::dgi;
use qgcn_core::eval::{evaluate, EvalReport};
use qgcn_core::graph::{
    load_edge_graph, load_node_file, mutual_knn_graph_with_info, synth_population_data,
    FeatureGraph, KnnInfo,
};
use qgcn_core::model::{Model, Pipeline};
use qgcn_core::qmp::count_resources;
use qgcn_core::EmbeddingTable;

use crate::checkpoint::Checkpoint;
use crate::config::{DatasetConfig, RunConfig};
use crate::report::{read_json, write_json, BuildReport, CompareReport, PipelineResult};
use crate::{CliError, CliResult};

const NODES_FILE: &str = "nodes.csv";
const EDGES_FILE: &str = "edges.csv";
const BUILD_REPORT_FILE: &str = "build_report.json";
const CHECKPOINT_FILE: &str = "checkpoint.json";
const LOSS_HISTORY_FILE: &str = "loss_history.csv";
const EMBEDDINGS_FILE: &str = "embeddings.csv";
const EVAL_REPORT_FILE: &str = "eval_report.json";
const COMPARE_REPORT_FILE: &str = "compare_report.json";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Assembles the input graph from the dataset section: synthetic features go
/// through mutual k-NN construction, file datasets use their edge file when
/// present and k-NN construction otherwise.
fn assemble_graph(config: &RunConfig) -> CliResult<(FeatureGraph, Option<KnnInfo>, BuildReport)> {
    let (graph, knn, loops, dups) = match &config.dataset {
        DatasetConfig::Synthetic {
            num_nodes,
            feature_dim,
            num_populations,
            flip_prob,
            data_seed,
        } => {
            let data = synth_population_data(
                *num_nodes,
                *feature_dim,
                *num_populations,
                *flip_prob,
                *data_seed,
            )?;
            let (mut graph, info) = mutual_knn_graph_with_info(&data.features, config.graph.k)?;
            graph.set_labels(Some(data.labels))?;
            (graph, Some(info), None, None)
        }
        DatasetConfig::Files {
            node_file,
            edge_file,
            has_labels,
        } => match edge_file {
            Some(edge_file) => {
                let (graph, report) = load_edge_graph(node_file, edge_file, *has_labels)?;
                (
                    graph,
                    None,
                    Some(report.self_loops_dropped),
                    Some(report.duplicate_edges_dropped),
                )
            }
            None => {
                let table = load_node_file(node_file, *has_labels)?;
                let (mut graph, info) =
                    mutual_knn_graph_with_info(&table.features, config.graph.k)?;
                graph.set_labels(table.labels)?;
                (graph, Some(info), None, None)
            }
        },
    };

    let degrees = graph.degrees();
    let max_degree = degrees.iter().copied().max().unwrap_or(0);
    let mut degree_histogram = vec![0usize; max_degree + 1];
    for d in degrees {
        degree_histogram[d] += 1;
    }
    let report = BuildReport {
        num_nodes: graph.num_nodes(),
        num_edges: graph.num_edges(),
        feature_dim: graph.feature_dim(),
        has_labels: graph.labels().is_some(),
        degree_histogram,
        knn,
        self_loops_dropped: loops,
        duplicate_edges_dropped: dups,
    };
    Ok((graph, knn, report))
}

fn write_nodes_csv(graph: &FeatureGraph, path: &Path) -> CliResult<()> {
    let mut out = String::new();
    if graph.labels().is_some() {
        out.push_str("# node_id,label,features...\n");
    } else {
        out.push_str("# node_id,features...\n");
    }
    for (i, row) in graph.features().iter().enumerate() {
        out.push_str(&i.to_string());
        if let Some(labels) = graph.labels() {
            out.push(',');
            out.push_str(&labels[i].to_string());
        }
        for v in row {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(io_err(path))
}

fn write_edges_csv(graph: &FeatureGraph, path: &Path) -> CliResult<()> {
    let mut out = String::from("# u,v\n");
    for &(u, v) in graph.edges() {
        out.push_str(&format!("{u},{v}\n"));
    }
    fs::write(path, out).map_err(io_err(path))
}

/// Reads the graph artifact produced by `build-graph` from the output dir.
fn load_artifact(out_dir: &Path) -> CliResult<(FeatureGraph, BuildReport)> {
    let report_path = out_dir.join(BUILD_REPORT_FILE);
    if !report_path.exists() {
        return Err(CliError::Config(format!(
            "graph artifact not found in {}; run `qgcn build-graph` first",
            out_dir.display()
        )));
    }
    let report: BuildReport = read_json(&report_path)?;
    let (graph, _) = load_edge_graph(
        &out_dir.join(NODES_FILE),
        &out_dir.join(EDGES_FILE),
        report.has_labels,
    )?;
    Ok((graph, report))
}

fn write_embeddings_csv(table: &EmbeddingTable, path: &Path) -> CliResult<()> {
    let mut out = String::from("# node_id,embedding...\n");
    for (i, row) in table.vectors().iter().enumerate() {
        out.push_str(&i.to_string());
        for v in row {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(io_err(path))
}

fn read_embeddings_csv(path: &Path) -> CliResult<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut rows = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(',');
        let _node_id = fields.next();
        let row: Vec<f64> = fields
            .map(|f| {
                f.trim().parse().map_err(|e| CliError::Config(format!(
                    "{}:{}: bad embedding value: {e}",
                    path.display(),
                    line_no + 1
                )))
            })
            .collect::<CliResult<_>>()?;
        if row.is_empty() {
            return Err(CliError::Config(format!(
                "{}:{}: embedding row has no values",
                path.display(),
                line_no + 1
            )));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Config(format!(
            "{} contains no embeddings",
            path.display()
        )));
    }
    Ok(rows)
}

fn ensure_out_dir(config: &RunConfig) -> CliResult<PathBuf> {
    let dir = config.output_dir.clone();
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    Ok(dir)
}

pub fn cmd_build_graph(config: &RunConfig) -> CliResult<()> {
    let out = ensure_out_dir(config)?;
    let (graph, _, report) = assemble_graph(config)?;
    write_nodes_csv(&graph, &out.join(NODES_FILE))?;
    write_edges_csv(&graph, &out.join(EDGES_FILE))?;
    write_json(&report, &out.join(BUILD_REPORT_FILE))?;
    println!(
        "built graph: {} nodes, {} edges, d = {} -> {}",
        report.num_nodes,
        report.num_edges,
        report.feature_dim,
        out.display()
    );
    Ok(())
}

pub fn cmd_train(config: &RunConfig) -> CliResult<()> {
    let out = ensure_out_dir(config)?;
    let (graph, _) = load_artifact(&out)?;
    let spec = config.model.spec_for_dim(graph.feature_dim());
    let model = Model::init(&spec, config.train.seed)?;
    let train_config = config.train.to_train_config();
    let outcome = dgi::train(&graph, model, &train_config)?;

    let mut history = String::from("# epoch,loss\n");
    for (epoch, loss) in outcome.history.iter().enumerate() {
        history.push_str(&format!("{epoch},{loss}\n"));
    }
    let history_path = out.join(LOSS_HISTORY_FILE);
    fs::write(&history_path, history).map_err(io_err(&history_path))?;

    let ckpt = Checkpoint::new(
        outcome.model,
        outcome.history.len(),
        outcome.final_loss,
        outcome.final_corruption_seed,
    );
    ckpt.save(&out.join(CHECKPOINT_FILE))?;
    println!(
        "trained {} epochs: loss {} -> {}",
        outcome.history.len(),
        outcome.history.first().copied().unwrap_or(f64::NAN),
        outcome.final_loss
    );
    Ok(())
}

pub fn cmd_embed(config: &RunConfig) -> CliResult<()> {
    let out = ensure_out_dir(config)?;
    let (graph, _) = load_artifact(&out)?;
    let ckpt = Checkpoint::load(&out.join(CHECKPOINT_FILE))?;
    let table = ckpt.model.embed(&graph)?;
    write_embeddings_csv(&table, &out.join(EMBEDDINGS_FILE))?;
    println!(
        "embedded {} nodes at dimension {}",
        table.num_nodes(),
        table.dim()
    );
    Ok(())
}

pub fn cmd_eval(config: &RunConfig) -> CliResult<()> {
    let out = ensure_out_dir(config)?;
    let vectors = read_embeddings_csv(&out.join(EMBEDDINGS_FILE))?;
    let (graph, _) = load_artifact(&out)?;
    if graph.num_nodes() != vectors.len() {
        return Err(CliError::Config(format!(
            "embeddings cover {} nodes but the graph has {}",
            vectors.len(),
            graph.num_nodes()
        )));
    }
    let report = evaluate(
        &vectors,
        config.eval.k,
        config.eval.seed,
        graph.labels(),
        config.eval.elbow_max,
    )?;
    write_json(&report, &out.join(EVAL_REPORT_FILE))?;
    print_eval("eval", &report);
    Ok(())
}

fn print_eval(tag: &str, report: &EvalReport) {
    println!(
        "{tag}: k = {}, silhouette = {:.4}, pseudo-label accuracy = {:.4}{}{}",
        report.k_used,
        report.silhouette,
        report.pseudo_label_accuracy,
        report
            .nmi
            .map_or(String::new(), |v| format!(", nmi = {v:.4}")),
        report
            .ground_truth_accuracy
            .map_or(String::new(), |v| format!(", label accuracy = {v:.4}")),
    );
}

fn run_pipeline(
    graph: &FeatureGraph,
    config: &RunConfig,
    pipeline: Pipeline,
) -> CliResult<(PipelineResult, EmbeddingTable)> {
    let mut model_config = config.model.clone();
    model_config.pipeline = pipeline;
    let spec = model_config.spec_for_dim(graph.feature_dim());
    let model = Model::init(&spec, config.train.seed)?;
    let outcome = dgi::train(graph, model, &config.train.to_train_config())?;
    let table = outcome.model.embed(graph)?;
    let eval = evaluate(
        table.vectors(),
        config.eval.k,
        config.eval.seed,
        graph.labels(),
        config.eval.elbow_max,
    )?;
    Ok((
        PipelineResult {
            initial_loss: outcome.history.first().copied().unwrap_or(f64::NAN),
            final_loss: outcome.final_loss,
            eval,
        },
        table,
    ))
}

pub fn cmd_compare(config: &RunConfig) -> CliResult<()> {
    let out = ensure_out_dir(config)?;
    let (graph, _, _) = assemble_graph(config)?;

    let (quantum, quantum_table) = run_pipeline(&graph, config, Pipeline::Quantum)?;
    let (hybrid, hybrid_table) = run_pipeline(&graph, config, Pipeline::Hybrid)?;
    write_embeddings_csv(&quantum_table, &out.join("embeddings_quantum.csv"))?;
    write_embeddings_csv(&hybrid_table, &out.join("embeddings_hybrid.csv"))?;

    let spec = config.model.spec_for_dim(graph.feature_dim());
    let resources = count_resources(&graph, spec.num_qubits, spec.depth, spec.mixer);
    let report = CompareReport {
        epochs: config.train.epochs,
        seed: config.train.seed,
        quantum,
        hybrid,
        resources,
    };
    write_json(&report, &out.join(COMPARE_REPORT_FILE))?;
    print_eval("quantum", &report.quantum.eval);
    print_eval("hybrid", &report.hybrid.eval);
    println!(
        "resources: {} angle-encoded vectors, {} message-passing gates, max width {}",
        report.resources.angle_encoded_vectors,
        report.resources.message_passing_gates(),
        report.resources.max_register_width
    );
    Ok(())
}
