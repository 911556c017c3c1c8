use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::seq::index::sample;
use socmap::config::{ClusterSpec, LayoutSpec, PageRankGraph, PipelineConfig, SomOverrides};
use socmap::pipeline::{self, Dataset};
use socmap::render::{render_hexmap, Fill};
use socmap::seed::stage_seed;
use socmap::{io, run_pipeline};
use socmap_core::clustering::CellFeatures;
use socmap_core::features::InDegreeSource;
use socmap_core::graph::{bfs_crawl, CrawlConfig};
use socmap_core::layout::inter_clique_fraction;
use socmap_core::som::Grid;
use socmap_core::stats::{correlation_matrix, lilliefors_test, mantel_test, LillieforsConfig};
use socmap_core::synth::{generate, indegree_tail_exponent_with, SynthConfig, DEFAULT_XMIN};
use socmap_core::{clustering, rng};

#[derive(Parser)]
#[command(name = "socmap", version, about = "Popularity maps of directed social networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic network (nodes.csv, edges.csv, synth.json).
    Generate(GenerateArgs),
    /// Breadth-first crawl of a network along out-links.
    Crawl(CrawlArgs),
    /// Node and edge feature tables for the artist network.
    Features(FeaturesArgs),
    /// Train a map on a feature table.
    TrainSom(TrainArgs),
    /// Winner cell of every row of a feature table on a saved map.
    Assign(AssignArgs),
    /// Cluster the cells of a trained map.
    Cluster(ClusterArgs),
    /// Link density between clusters.
    Density(DensityArgs),
    /// LinLog layout and spatial partition of the artist network.
    Layout(LayoutArgs),
    /// Full pipeline: every artifact plus report.json.
    Report(ReportArgs),
    /// Statistical tests on saved tables.
    #[command(subcommand)]
    Stats(StatsCommand),
    /// Render a grid CSV as a hex map SVG.
    Render(RenderArgs),
}

#[derive(Args)]
struct GraphInput {
    #[arg(long)]
    nodes: PathBuf,
    #[arg(long)]
    edges: PathBuf,
}

impl GraphInput {
    fn dataset(&self) -> Result<Dataset> {
        let cfg = PipelineConfig { nodes: Some(self.nodes.clone()), edges: Some(self.edges.clone()), ..Default::default() };
        pipeline::load_dataset(&cfg, 0)
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// JSON or TOML file with generator settings.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n_nodes: Option<usize>,
    #[arg(long)]
    reciprocity: Option<f64>,
    #[arg(long)]
    seed: u64,
    /// Override any generator field, e.g. `--set label_mix=[0.2,0.5,0.3]`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    #[arg(long, default_value = ".")]
    output: PathBuf,
}

#[derive(Args)]
struct CrawlArgs {
    #[command(flatten)]
    input: GraphInput,
    /// Comma-separated start ids.
    #[arg(long, value_delimiter = ',', required_unless_present = "random_seeds")]
    seeds: Vec<String>,
    /// Pick this many start nodes at random instead.
    #[arg(long)]
    random_seeds: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long, default_value_t = 40)]
    max_out_degree: usize,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct FeaturesArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long, default_value_t = 10_000)]
    null_replicates: usize,
    #[arg(long, value_enum, default_value = "artist")]
    pagerank_graph: PageRankArg,
    #[arg(long, value_enum, default_value = "artist")]
    edge_in_degree: PageRankArg,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum PageRankArg {
    Artist,
    Whole,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    features: PathBuf,
    /// Map file to write; the U-matrix goes next to it.
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    seed: u64,
    /// Stage name the seed is derived for (`node_som` or `edge_som`).
    #[arg(long, default_value = "node_som")]
    stage: String,
}

#[derive(Args)]
struct AssignArgs {
    #[arg(long)]
    som: PathBuf,
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    som: PathBuf,
    #[arg(long)]
    features: PathBuf,
    /// Fixed cluster count; chosen by BIC over k-min..=k-max otherwise.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 2)]
    k_min: usize,
    #[arg(long, default_value_t = 10)]
    k_max: usize,
    /// Cluster pairwise-distance rows instead of prototypes.
    #[arg(long)]
    distance_rows: bool,
    #[arg(long)]
    seed: u64,
    /// Network files; when given, elites.json is written too.
    #[arg(long, requires = "edges")]
    nodes: Option<PathBuf>,
    #[arg(long, requires = "nodes")]
    edges: Option<PathBuf>,
    #[arg(long, default_value_t = 0.01)]
    elite_percentile: f64,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct DensityArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long)]
    clusters: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct LayoutArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    partitions: Option<usize>,
    /// Entity cluster file; when given, inter_clique.csv is written too.
    #[arg(long)]
    clusters: Option<PathBuf>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON or TOML pipeline configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    nodes: Option<PathBuf>,
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Use the synthetic generator (default settings unless configured).
    #[arg(long)]
    synth: bool,
    #[arg(long)]
    n_nodes: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    elite_percentile: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    partitions: Option<usize>,
    /// Override any configuration field by dotted path.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum StatsCommand {
    /// Lilliefors normality test of one CSV column.
    Normality {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        column: String,
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
        #[arg(long, default_value_t = 10_000)]
        replicates: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Correlation matrix of the numeric columns of a feature table.
    Correlation {
        #[arg(long)]
        features: PathBuf,
        /// Undo stored transforms first.
        #[arg(long)]
        original: bool,
        #[arg(long)]
        output: PathBuf,
    },
    /// Mantel permutation test between two square matrix CSVs.
    Mantel {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 999)]
        permutations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Power-law exponent of the in-degree tail.
    Tail {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, default_value_t = DEFAULT_XMIN)]
        xmin: usize,
    },
    /// Profile, artist and link counts.
    Summary {
        #[command(flatten)]
        input: GraphInput,
    },
}

#[derive(Args)]
struct RenderArgs {
    /// CSV with `row,col,value` columns.
    #[arg(long)]
    grid: PathBuf,
    /// Treat values as categories even when they parse as numbers.
    #[arg(long)]
    categorical: bool,
    #[arg(long, default_value = "")]
    title: String,
    #[arg(long)]
    output: PathBuf,
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn in_degree_source(a: PageRankArg) -> InDegreeSource {
    match a {
        PageRankArg::Artist => InDegreeSource::Artist,
        PageRankArg::Whole => InDegreeSource::Whole,
    }
}

fn cmd_generate(a: GenerateArgs) -> Result<()> {
    let mut cfg = PipelineConfig { synth: Some(SynthConfig::default()), ..Default::default() };
    if let Some(p) = &a.config {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        let s: SynthConfig = if p.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text)?
        } else {
            serde_json::from_str(&text)?
        };
        cfg.synth = Some(s);
    }
    for s in &a.sets {
        cfg.set(&format!("synth.{s}"))?;
    }
    let mut synth = cfg.synth.take().expect("set above");
    if let Some(n) = a.n_nodes {
        synth.n_nodes = n;
    }
    if let Some(r) = a.reciprocity {
        synth.reciprocity = r;
    }
    synth.seed = a.seed;
    let g = generate(&synth)?;
    io::write_graph(&a.output, &g)?;
    io::write_json(&a.output.join("synth.json"), &synth)?;
    eprintln!("{} profiles, {} links written to {}", g.node_count(), g.edge_count(), a.output.display());
    Ok(())
}

fn cmd_crawl(a: CrawlArgs) -> Result<()> {
    let d = a.input.dataset()?;
    let seeds = match a.random_seeds {
        Some(k) => {
            if k > d.whole.node_count() {
                bail!("cannot pick {k} start nodes from {}", d.whole.node_count());
            }
            let mut r = rng::seeded(a.seed);
            sample(&mut r, d.whole.node_count(), k).into_iter().map(|i| d.whole.node(i).id.clone()).collect()
        }
        None => a.seeds,
    };
    let g = bfs_crawl(&d.whole, &CrawlConfig { seeds, depth: a.depth, max_out_degree: a.max_out_degree })?;
    io::write_graph(&a.output, &g)?;
    eprintln!("crawled {} profiles, {} links", g.node_count(), g.edge_count());
    Ok(())
}

fn cmd_features(a: FeaturesArgs) -> Result<()> {
    let cfg = PipelineConfig {
        alpha: a.alpha,
        null_replicates: a.null_replicates,
        pagerank_graph: match a.pagerank_graph {
            PageRankArg::Artist => PageRankGraph::Artist,
            PageRankArg::Whole => PageRankGraph::Whole,
        },
        edge_in_degree: in_degree_source(a.edge_in_degree),
        ..Default::default()
    };
    let d = a.input.dataset()?;
    let nodes = pipeline::node_table(&d, &cfg, stage_seed(a.seed, "node_features"))?;
    io::write_features(&a.output.join("node_features.csv"), &nodes)?;
    let edges = pipeline::edge_table(&d, &cfg)?;
    io::write_features(&a.output.join("edge_features.csv"), &edges)?;
    Ok(())
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let features = io::read_features(&a.features)?;
    let overrides = SomOverrides { rows: a.rows, cols: a.cols, epochs: a.epochs, ..Default::default() };
    let map = pipeline::train_map(&features, &overrides, stage_seed(a.seed, &a.stage))?;
    let dir = a.output.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = a.output.file_stem().and_then(|s| s.to_str()).ok_or_else(|| anyhow!("bad output name"))?;
    pipeline::write_map(dir, name, &format!("{name}_umatrix.csv"), &map)?;
    eprintln!("quantization error {}", map.quantization_error(&features)?);
    Ok(())
}

fn cmd_assign(a: AssignArgs) -> Result<()> {
    let map = io::read_som(&a.som)?;
    let features = io::read_features(&a.features)?;
    if features.columns() != map.columns() {
        bail!("feature columns {:?} do not match the map's {:?}", features.columns(), map.columns());
    }
    let cells = map.assign(&features)?;
    let mut w = csv::Writer::from_path(&a.output)?;
    w.write_record(["id", "row", "col"])?;
    for (id, c) in features.ids().iter().zip(&cells) {
        w.serialize((id, c.row, c.col))?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_cluster(a: ClusterArgs) -> Result<()> {
    let map = io::read_som(&a.som)?;
    let features = io::read_features(&a.features)?;
    let cells = map.assign(&features)?;
    let spec = ClusterSpec {
        k: a.k,
        k_min: a.k_min,
        k_max: a.k_max,
        cell_features: if a.distance_rows { CellFeatures::DistanceRows } else { CellFeatures::Prototypes },
    };
    let model = pipeline::cluster_map(&map, &cells, &spec, stage_seed(a.seed, "cluster"))?;
    io::write_cell_clusters(&a.output.join("cell_clusters.csv"), map.dims(), &model)?;
    io::write_entity_clusters(&a.output.join("entity_clusters.csv"), features.ids(), &cells, &model)?;
    if let (Some(n), Some(e)) = (a.nodes, a.edges) {
        let d = GraphInput { nodes: n, edges: e }.dataset()?;
        io::write_json(&a.output.join("elites.json"), &pipeline::elites(&d, a.elite_percentile)?)?;
    }
    eprintln!("{} clusters, sizes {:?}", model.k, model.sizes());
    Ok(())
}

fn clusters_by_node(d: &Dataset, path: &Path) -> Result<(Vec<Option<usize>>, usize)> {
    let rows: BTreeMap<String, usize> = io::read_entity_clusters(path)?.into_iter().collect();
    let k = rows.values().copied().max().map_or(0, |m| m + 1);
    Ok((d.artist.nodes().iter().map(|n| rows.get(&n.id).copied()).collect(), k))
}

fn cmd_density(a: DensityArgs) -> Result<()> {
    let d = a.input.dataset()?;
    let (clusters, k) = clusters_by_node(&d, &a.clusters)?;
    let m = clustering::density_matrix(&d.artist, &clusters, k)?;
    io::write_density(&a.output, &m)
}

fn cmd_layout(a: LayoutArgs) -> Result<()> {
    let d = a.input.dataset()?;
    let mut spec = LayoutSpec { partitions: a.partitions, ..Default::default() };
    if let Some(i) = a.iterations {
        spec.iterations = i;
    }
    let (layout, partition) =
        pipeline::layout_and_partition(&d.artist, &spec, stage_seed(a.seed, "layout"), stage_seed(a.seed, "partition"))?;
    let ids: Vec<String> = d.artist.nodes().iter().map(|n| n.id.clone()).collect();
    io::write_layout(&a.output.join("layout.csv"), &ids, &layout, &partition)?;
    if let Some(path) = &a.clusters {
        let (clusters, k) = clusters_by_node(&d, path)?;
        let ic = inter_clique_fraction(&d.artist, &partition.labels, &clusters, k)?;
        let mut w = csv::Writer::from_path(a.output.join("inter_clique.csv"))?;
        for row in pipeline::clique_rows(&ic) {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    eprintln!("energy {} -> {}, {} partitions", layout.initial_energy, layout.energy, partition.q);
    Ok(())
}

fn cmd_report(a: ReportArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if a.nodes.is_some() || a.edges.is_some() {
        cfg.nodes = a.nodes.or(cfg.nodes);
        cfg.edges = a.edges.or(cfg.edges);
        cfg.synth = None;
    }
    if a.synth && cfg.synth.is_none() {
        cfg.synth = Some(SynthConfig::default());
    }
    if let Some(n) = a.n_nodes {
        cfg.synth.get_or_insert_with(SynthConfig::default).n_nodes = n;
    }
    if let Some(v) = a.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = a.elite_percentile {
        cfg.elite_percentile = v;
    }
    if let Some(k) = a.k {
        cfg.clusters.k = Some(k);
    }
    if let Some(q) = a.partitions {
        cfg.layout.partitions = Some(q);
    }
    for s in &a.sets {
        cfg.set(s)?;
    }
    if let Some(o) = a.output {
        cfg.output = o;
    }
    cfg.seed = Some(a.seed);
    let report = run_pipeline(&cfg)?;
    eprintln!(
        "{} artists, {} clusters, report in {}",
        report.dataset.artists,
        report.node_som.cluster_count,
        cfg.output.join("report.json").display()
    );
    Ok(())
}

fn read_column(path: &Path, column: &str) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let ix = r.headers()?.iter().position(|h| h == column).ok_or_else(|| anyhow!("no column `{column}` in {}", path.display()))?;
    r.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec?;
            let f = rec.get(ix).unwrap_or_default();
            f.parse::<f64>().with_context(|| format!("row {}: bad number `{f}`", i + 1))
        })
        .collect()
}

fn cmd_stats(c: StatsCommand) -> Result<()> {
    match c {
        StatsCommand::Normality { input, column, alpha, replicates, seed } => {
            let xs = read_column(&input, &column)?;
            print_json(&lilliefors_test(&xs, alpha, &LillieforsConfig { replicates, seed })?)
        }
        StatsCommand::Correlation { features, original, output } => {
            let m = io::read_features(&features)?;
            let cols: Vec<(String, Vec<f64>)> = (0..m.n_cols())
                .map(|j| {
                    let v = m.column(j);
                    let v = if original { v.into_iter().map(|x| m.to_original(j, x)).collect() } else { v };
                    (m.columns()[j].clone(), v)
                })
                .collect();
            let c = correlation_matrix(&cols)?;
            io::write_square_matrix(&output, &c.names, &c.values)
        }
        StatsCommand::Mantel { a, b, permutations, seed } => {
            let (na, ma) = io::read_square_matrix(&a)?;
            let (nb, mb) = io::read_square_matrix(&b)?;
            if na != nb {
                bail!("matrices label their variables differently: {na:?} vs {nb:?}");
            }
            print_json(&mantel_test(&ma, &mb, permutations, seed)?)
        }
        StatsCommand::Tail { input, xmin } => print_json(&indegree_tail_exponent_with(&input.dataset()?.whole, xmin)?),
        StatsCommand::Summary { input } => print_json(&pipeline::dataset_summary(&input.dataset()?)),
    }
}

fn cmd_render(a: RenderArgs) -> Result<()> {
    let cells = io::read_grid_cells(&a.grid)?;
    let numeric: Option<Vec<f64>> = if a.categorical {
        None
    } else {
        cells.cells.iter().map(|s| if s.is_empty() { Some(f64::NAN) } else { s.parse().ok() }).collect()
    };
    let svg = match numeric {
        Some(values) => render_hexmap(&Fill::Numeric(&Grid { dims: cells.dims, cells: values }), &a.title)?,
        None => {
            let g = Grid {
                dims: cells.dims,
                cells: cells.cells.into_iter().map(|s| (!s.is_empty()).then_some(s)).collect(),
            };
            render_hexmap(&Fill::Categorical(&g), &a.title)?
        }
    };
    fs::write(&a.output, svg).with_context(|| format!("writing {}", a.output.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Crawl(a) => cmd_crawl(a),
        Command::Features(a) => cmd_features(a),
        Command::TrainSom(a) => cmd_train(a),
        Command::Assign(a) => cmd_assign(a),
        Command::Cluster(a) => cmd_cluster(a),
        Command::Density(a) => cmd_density(a),
        Command::Layout(a) => cmd_layout(a),
        Command::Report(a) => cmd_report(a),
        Command::Stats(c) => cmd_stats(c),
        Command::Render(a) => cmd_render(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
