//! The staged end-to-end run behind the `report` subcommand, and the
//! individual stages the other subcommands reuse.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use socmap_core::clustering::{
    cluster_cells, density_matrix, dominant_category_plane, elite_distribution, ClusterCount, ClusterModel,
    DensityMatrix, EliteDistribution,
};
use socmap_core::features::{
    edge_features, encode_label, node_attrs, node_features, FeatureMatrix, GateConfig, LabelCode, Transform,
};
use socmap_core::graph::{pagerank, DirectedGraph, PageRankConfig, Scope};
use socmap_core::layout::{inter_clique_fraction, linlog_layout, spatial_partition, InterClique, Layout, Partition};
use socmap_core::som::{train, CellIndex, Grid, SomMap};
use socmap_core::stats::LillieforsConfig;
use socmap_core::synth::{generate, SynthConfig};

use crate::config::{ClusterSpec, LayoutSpec, PageRankGraph, PipelineConfig, SomOverrides};
use crate::io;
use crate::render::{render_hexmap, render_layout, Fill};
use crate::report::*;
use crate::seed::stage_seed;

/// Marker present in the output directory while a run is incomplete.
pub const PARTIAL_MARKER: &str = ".partial";

/// Files every successful run leaves in the output directory.
pub const ARTIFACTS: [&str; 13] = [
    "nodes.csv",
    "edges.csv",
    "node_features.csv",
    "edge_features.csv",
    "som_nodes.json",
    "som_edges.json",
    "umatrix.csv",
    "cell_clusters.csv",
    "entity_clusters.csv",
    "density_matrix.csv",
    "elites.json",
    "layout.csv",
    "report.json",
];

fn stage<T>(name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    f().with_context(|| format!("stage `{name}` failed"))
}

pub fn label_name(label: &str) -> &'static str {
    match encode_label(label) {
        LabelCode::Major => "major",
        LabelCode::Indie => "indie",
        LabelCode::Other => "other",
    }
}

pub struct Dataset {
    pub whole: DirectedGraph,
    pub artist: DirectedGraph,
    pub dropped_rows: usize,
}

/// Reads the input files or generates the synthetic graph.
pub fn load_dataset(cfg: &PipelineConfig, synth_seed: u64) -> Result<Dataset> {
    let (whole, dropped_rows) = match (&cfg.synth, &cfg.nodes, &cfg.edges) {
        (Some(s), _, _) => (generate(&SynthConfig { seed: synth_seed, ..s.clone() })?, 0),
        (None, Some(n), Some(e)) => {
            let (g, report) = io::read_graph(n, e)?;
            (g, report.dropped())
        }
        _ => bail!("no input: give nodes and edges files or a synth section"),
    };
    let artist = whole.induced_artist_subgraph();
    if artist.is_empty() {
        bail!("the network has no artist profiles");
    }
    Ok(Dataset { whole, artist, dropped_rows })
}

pub fn dataset_summary(d: &Dataset) -> DatasetSummary {
    let mut labels: BTreeMap<String, usize> = ["major", "indie", "other"].iter().map(|l| (l.to_string(), 0)).collect();
    for n in d.artist.nodes() {
        *labels.entry(label_name(&n.label).to_string()).or_default() += 1;
    }
    DatasetSummary {
        profiles: d.whole.node_count(),
        artists: d.artist.node_count(),
        links: d.whole.edge_count(),
        artist_links: d.artist.edge_count(),
        reciprocal_rate: d.whole.reciprocal_fraction(),
        artist_reciprocal_rate: d.artist.reciprocal_fraction(),
        labels,
        dropped_edge_rows: d.dropped_rows,
    }
}

/// Gated, z-scored artist feature table.
pub fn node_table(d: &Dataset, cfg: &PipelineConfig, gate_seed: u64) -> Result<FeatureMatrix> {
    let pr_graph = match cfg.pagerank_graph {
        PageRankGraph::Artist => &d.artist,
        PageRankGraph::Whole => &d.whole,
    };
    let pr = pagerank(pr_graph, &PageRankConfig::default())?.by_id(pr_graph);
    let gate = GateConfig {
        alpha: cfg.alpha,
        lilliefors: LillieforsConfig { replicates: cfg.null_replicates, seed: gate_seed },
    };
    Ok(node_features(&d.whole, &d.artist, &pr, &gate)?.zscore_all()?)
}

/// Z-scored link gradient table over the artist graph.
pub fn edge_table(d: &Dataset, cfg: &PipelineConfig) -> Result<FeatureMatrix> {
    let attrs = node_attrs(&d.whole, &d.artist, cfg.edge_in_degree)?;
    Ok(edge_features(&d.artist, &attrs)?.zscore_all()?)
}

pub fn train_map(features: &FeatureMatrix, overrides: &SomOverrides, seed: u64) -> Result<SomMap> {
    let cfg = overrides.resolve(features.n_rows(), seed);
    Ok(train(features, &cfg)?)
}

/// Writes a trained map, its U-matrix grid and SVG pictures of the
/// U-matrix and every component plane (original units).
pub fn write_map(out: &Path, name: &str, umatrix_csv: &str, map: &SomMap) -> Result<()> {
    io::write_som(&out.join(format!("{name}.json")), map)?;
    let u = map.u_matrix();
    io::write_grid(&out.join(umatrix_csv), &u)?;
    let figures = out.join("figures");
    fs::create_dir_all(&figures)?;
    fs::write(figures.join(format!("{name}_umatrix.svg")), render_hexmap(&Fill::Numeric(&u), &format!("{name} U-matrix"))?)?;
    for (i, col) in map.columns().iter().enumerate() {
        let plane = map.component_plane_original(i)?;
        let svg = render_hexmap(&Fill::Numeric(&plane), &format!("{name}: {col}"))?;
        fs::write(figures.join(format!("{name}_plane_{col}.svg")), svg)?;
    }
    Ok(())
}

pub fn cluster_map(map: &SomMap, cells: &[CellIndex], spec: &ClusterSpec, seed: u64) -> Result<ClusterModel> {
    let count = match spec.count() {
        ClusterCount::Auto { min, max } => {
            let max = max.min(map.dims().cells());
            ClusterCount::Auto { min: min.min(max), max }
        }
        fixed => fixed,
    };
    Ok(cluster_cells(map, cells, count, spec.cell_features, seed)?)
}

pub fn cluster_summaries(features: &FeatureMatrix, model: &ClusterModel) -> Vec<ClusterSummary> {
    let cell_counts = {
        let mut c = vec![0; model.k];
        for &a in &model.cell_assignments {
            c[a] += 1;
        }
        c
    };
    (0..model.k)
        .map(|k| {
            let members: Vec<usize> = (0..features.n_rows()).filter(|&i| model.entity_assignments[i] == k).collect();
            let feature_means = features
                .columns()
                .iter()
                .enumerate()
                .map(|(j, col)| {
                    let sum: f64 = members.iter().map(|&i| features.to_original(j, features.get(i, j))).sum();
                    let mean = if members.is_empty() { 0.0 } else { sum / members.len() as f64 };
                    FeatureMean { column: col.clone(), mean }
                })
                .collect();
            ClusterSummary { cluster: k + 1, cells: cell_counts[k], members: members.len(), feature_means }
        })
        .collect()
}

pub fn density(artist: &DirectedGraph, model: &ClusterModel) -> Result<DensityMatrix> {
    let clusters: Vec<Option<usize>> = model.entity_assignments.iter().map(|&k| Some(k)).collect();
    Ok(density_matrix(artist, &clusters, model.k)?)
}

pub fn elites(d: &Dataset, percentile: f64) -> Result<EliteSummary> {
    let labels: Vec<&str> = d.artist.nodes().iter().map(|n| label_name(&n.label)).collect();
    let hits: Vec<f64> = d.artist.nodes().iter().map(|n| n.hits as f64).collect();
    let indeg = d
        .artist
        .nodes()
        .iter()
        .map(|n| Ok(d.whole.in_degree(&n.id, Scope::Whole)? as f64))
        .collect::<Result<Vec<f64>>>()?;
    let audience: EliteDistribution = elite_distribution(&hits, &labels, percentile)?;
    let influence = elite_distribution(&indeg, &labels, percentile)?;
    Ok(EliteSummary { percentile, audience, influence })
}

pub fn layout_and_partition(artist: &DirectedGraph, spec: &LayoutSpec, layout_seed: u64, partition_seed: u64) -> Result<(Layout, Partition)> {
    let layout = linlog_layout(artist, &spec.resolve(layout_seed))?;
    let partition = spatial_partition(&layout, spec.partition_count(), partition_seed)?;
    Ok((layout, partition))
}

pub fn clique_rows(ic: &InterClique) -> Vec<CliqueRow> {
    ic.emitted
        .iter()
        .zip(&ic.inter)
        .zip(&ic.fractions)
        .enumerate()
        .map(|(k, ((&emitted, &inter), &fraction))| CliqueRow { cluster: k + 1, emitted, inter, fraction })
        .collect()
}

fn write_csv_rows<T: serde::Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

struct Seeds {
    global: u64,
    used: BTreeMap<String, u64>,
}

impl Seeds {
    fn get(&mut self, stage: &str) -> u64 {
        let s = stage_seed(self.global, stage);
        self.used.insert(stage.to_string(), s);
        s
    }
}

/// Runs every stage in order, writing each stage's artifacts into
/// `cfg.output` before the next starts. The output directory carries a
/// `.partial` marker until the report is written.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<Report> {
    cfg.validate()?;
    let Some(global) = cfg.seed else { bail!("a global seed is required") };
    let out: PathBuf = cfg.output.clone();
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let marker = out.join(PARTIAL_MARKER);
    fs::write(&marker, b"incomplete run\n")?;
    let mut seeds = Seeds { global, used: BTreeMap::new() };
    let verbose = std::env::var_os("SOCMAP_QUIET").is_none();
    let started = Instant::now();
    let log = |name: &str| {
        if verbose {
            eprintln!("[{:>7.2}s] {name}", started.elapsed().as_secs_f64());
        }
    };

    log("load");
    let synth_seed = seeds.get("generate");
    let data = stage("load", || {
        let d = load_dataset(cfg, synth_seed)?;
        io::write_graph(&out, &d.whole)?;
        if let Some(s) = &cfg.synth {
            io::write_json(&out.join("synth.json"), &SynthConfig { seed: synth_seed, ..s.clone() })?;
        }
        Ok(d)
    })?;

    log("node features");
    let gate_seed = seeds.get("node_features");
    let nodes = stage("node_features", || {
        let m = node_table(&data, cfg, gate_seed)?;
        io::write_features(&out.join("node_features.csv"), &m)?;
        Ok(m)
    })?;

    log("node map");
    let som_seed = seeds.get("node_som");
    let (node_map, node_cells, node_qe) = stage("node_som", || {
        let map = train_map(&nodes, &cfg.node_som, som_seed)?;
        let cells = map.assign(&nodes)?;
        let qe = map.quantization_error(&nodes)?;
        write_map(&out, "som_nodes", "umatrix.csv", &map)?;
        Ok((map, cells, qe))
    })?;

    log("cluster");
    let cluster_seed = seeds.get("cluster");
    let model = stage("cluster", || {
        let model = cluster_map(&node_map, &node_cells, &cfg.clusters, cluster_seed)?;
        io::write_cell_clusters(&out.join("cell_clusters.csv"), node_map.dims(), &model)?;
        io::write_entity_clusters(&out.join("entity_clusters.csv"), nodes.ids(), &node_cells, &model)?;
        let grid = Grid {
            dims: node_map.dims(),
            cells: model.cell_assignments.iter().map(|k| Some(format!("cluster {}", k + 1))).collect(),
        };
        let figures = out.join("figures");
        fs::write(figures.join("som_nodes_clusters.svg"), render_hexmap(&Fill::Categorical(&grid), "node clusters")?)?;
        let genres: Vec<String> = data
            .artist
            .nodes()
            .iter()
            .map(|n| if n.genre.trim().is_empty() { "unknown".to_string() } else { n.genre.trim().to_lowercase() })
            .collect();
        let genre_plane = dominant_category_plane(&node_cells, &genres, node_map.dims())?;
        io::write_category_grid(&out.join("genre_plane.csv"), &genre_plane)?;
        fs::write(figures.join("som_nodes_genre.svg"), render_hexmap(&Fill::Categorical(&genre_plane), "dominant genre")?)?;
        Ok(model)
    })?;

    log("density");
    let dens = stage("density", || {
        let d = density(&data.artist, &model)?;
        io::write_density(&out.join("density_matrix.csv"), &d)?;
        Ok(d)
    })?;

    log("elites");
    let elite = stage("elites", || {
        let e = elites(&data, cfg.elite_percentile)?;
        io::write_json(&out.join("elites.json"), &e)?;
        Ok(e)
    })?;

    log("edge features");
    let edges = stage("edge_features", || {
        let m = edge_table(&data, cfg)?;
        io::write_features(&out.join("edge_features.csv"), &m)?;
        Ok(m)
    })?;

    log("edge map");
    let edge_seed = seeds.get("edge_som");
    let (edge_map, edge_qe) = stage("edge_som", || {
        let map = train_map(&edges, &cfg.edge_som, edge_seed)?;
        let qe = map.quantization_error(&edges)?;
        write_map(&out, "som_edges", "umatrix_edges.csv", &map)?;
        Ok((map, qe))
    })?;

    log("layout");
    let layout_seed = seeds.get("layout");
    let partition_seed = seeds.get("partition");
    let (layout, partition) = stage("layout", || {
        let (layout, partition) = layout_and_partition(&data.artist, &cfg.layout, layout_seed, partition_seed)?;
        io::write_layout(&out.join("layout.csv"), nodes.ids(), &layout, &partition)?;
        let sizes: Vec<f64> = (0..nodes.n_rows()).map(|i| nodes.get(i, 0)).collect();
        let links: Vec<(usize, usize)> = data.artist.edges().collect();
        let svg = render_layout(&layout.coords, &links, &sizes, &partition.labels, "artist network")?;
        fs::write(out.join("figures").join("layout.svg"), svg)?;
        Ok((layout, partition))
    })?;

    log("inter-clique fractions");
    let cliques = stage("inter_clique", || {
        let clusters: Vec<Option<usize>> = model.entity_assignments.iter().map(|&k| Some(k)).collect();
        let ic = inter_clique_fraction(&data.artist, &partition.labels, &clusters, model.k)?;
        write_csv_rows(&out.join("inter_clique.csv"), &clique_rows(&ic))?;
        Ok(ic)
    })?;

    log("report");
    let report = stage("report", || {
        let dataset = dataset_summary(&data);
        write_csv_rows(
            &out.join("dataset.csv"),
            &[
                ("profiles", dataset.profiles as f64),
                ("artists", dataset.artists as f64),
                ("links", dataset.links as f64),
                ("artist_links", dataset.artist_links as f64),
                ("reciprocal_rate", dataset.reciprocal_rate),
            ],
        )?;
        let k = model.k;
        let report = Report {
            dataset,
            node_som: NodeSomSummary {
                rows: node_map.dims().rows,
                cols: node_map.dims().cols,
                quantization_error: node_qe,
                log_transformed: nodes
                    .columns()
                    .iter()
                    .zip(nodes.all_transforms())
                    .filter(|(_, t)| t.contains(&Transform::Log1p))
                    .map(|(c, _)| c.clone())
                    .collect(),
                cluster_count: k,
                selection: model.selection.as_ref().map(|s| ClusterSelection {
                    scores: s.scores.iter().map(|&(k, bic)| BicScore { k, bic }).collect(),
                    skipped: s.skipped.iter().map(|(k, r)| SkippedK { k: *k, reason: r.clone() }).collect(),
                }),
                clusters: cluster_summaries(&nodes, &model),
            },
            edge_som: EdgeSomSummary {
                rows: edge_map.dims().rows,
                cols: edge_map.dims().cols,
                edges: edges.n_rows(),
                quantization_error: edge_qe,
            },
            density: DensitySummary {
                k,
                counts: (0..k).map(|i| (0..k).map(|j| dens.count(i, j)).collect()).collect(),
                normalized: (0..k).map(|i| (0..k).map(|j| dens.probability(i, j)).collect()).collect(),
                empty_rows: dens.empty_rows.iter().map(|r| r + 1).collect(),
            },
            elites: elite,
            inter_clique: InterCliqueSummary {
                partitions: partition.q,
                silhouette: partition.silhouette,
                initial_energy: layout.initial_energy,
                final_energy: layout.energy,
                clusters: clique_rows(&cliques),
                global_fraction: cliques.global_fraction(),
            },
            provenance: Provenance {
                seed: global,
                stage_seeds: seeds.used.clone(),
                config: PipelineConfig { output: PathBuf::new(), ..cfg.clone() },
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
        };
        io::write_json(&out.join("report.json"), &report)?;
        Ok(report)
    })?;

    fs::remove_file(&marker).with_context(|| format!("removing {}", marker.display()))?;
    log("done");
    Ok(report)
}
