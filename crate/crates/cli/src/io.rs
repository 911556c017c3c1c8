//! CSV and JSON artifact formats.
//!
//! Cluster and partition labels are written 1-based; the core library
//! numbers them from 0.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use socmap_core::clustering::{ClusterModel, DensityMatrix};
use socmap_core::features::{FeatureMatrix, Transform};
use socmap_core::graph::{BuildReport, DirectedGraph, NodeRecord};
use socmap_core::layout::{Layout, Partition};
use socmap_core::som::{CellIndex, Dims, Grid, SomConfig, SomMap};
use socmap_core::stats::SquareMatrix;

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(create(path)?))
}

fn csv_reader(path: &Path) -> Result<csv::Reader<File>> {
    csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeRow {
    id: String,
    is_artist: String,
    hits: u64,
    comments: u64,
    label: String,
    genre: String,
}

fn parse_flag(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" => Some(true),
        "0" | "false" | "no" | "" => Some(false),
        _ => None,
    }
}

pub fn read_nodes(path: &Path) -> Result<Vec<NodeRecord>> {
    let mut out = Vec::new();
    for (i, row) in csv_reader(path)?.deserialize::<NodeRow>().enumerate() {
        let row = row.with_context(|| format!("{} row {}", path.display(), i + 1))?;
        let is_artist = parse_flag(&row.is_artist)
            .ok_or_else(|| anyhow!("{} row {}: bad is_artist `{}`", path.display(), i + 1, row.is_artist))?;
        out.push(NodeRecord {
            id: row.id,
            is_artist,
            hits: row.hits,
            comments: row.comments,
            label: row.label,
            genre: row.genre,
        });
    }
    Ok(out)
}

pub fn read_edges(path: &Path) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, row) in csv_reader(path)?.deserialize::<(String, String)>().enumerate() {
        out.push(row.with_context(|| format!("{} row {}", path.display(), i + 1))?);
    }
    Ok(out)
}

pub fn read_graph(nodes: &Path, edges: &Path) -> Result<(DirectedGraph, BuildReport)> {
    let n = read_nodes(nodes)?;
    let e = read_edges(edges)?;
    DirectedGraph::from_edge_list(n, &e).with_context(|| format!("building graph from {}", edges.display()))
}

pub fn write_nodes(path: &Path, g: &DirectedGraph) -> Result<()> {
    let mut w = csv_writer(path)?;
    for n in g.nodes() {
        w.serialize(NodeRow {
            id: n.id.clone(),
            is_artist: if n.is_artist { "1" } else { "0" }.into(),
            hits: n.hits,
            comments: n.comments,
            label: n.label.clone(),
            genre: n.genre.clone(),
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_edges(path: &Path, g: &DirectedGraph) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["emitter", "receiver"])?;
    for (a, b) in g.edges() {
        w.write_record([&g.node(a).id, &g.node(b).id])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_graph(dir: &Path, g: &DirectedGraph) -> Result<()> {
    write_nodes(&dir.join("nodes.csv"), g)?;
    write_edges(&dir.join("edges.csv"), g)
}

#[derive(Debug, Serialize, Deserialize)]
struct ColumnMeta {
    name: String,
    transforms: Vec<Transform>,
}

#[derive(Debug, Serialize, Deserialize)]
struct FeatureSidecar {
    rows: usize,
    columns: Vec<ColumnMeta>,
}

/// JSON file describing the columns of a feature CSV.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

pub fn write_features(path: &Path, m: &FeatureMatrix) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["id".to_string()];
    header.extend(m.columns().iter().cloned());
    w.write_record(&header)?;
    let mut buf = ryu::Buffer::new();
    for (i, id) in m.ids().iter().enumerate() {
        let mut rec = vec![id.clone()];
        rec.extend(m.row(i).iter().map(|v| buf.format(*v).to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    let sidecar = FeatureSidecar {
        rows: m.n_rows(),
        columns: m
            .columns()
            .iter()
            .zip(m.all_transforms())
            .map(|(name, t)| ColumnMeta { name: name.clone(), transforms: t.clone() })
            .collect(),
    };
    write_json(&sidecar_path(path), &sidecar)
}

pub fn read_features(path: &Path) -> Result<FeatureMatrix> {
    let sidecar: FeatureSidecar = read_json(&sidecar_path(path))?;
    let mut r = csv_reader(path)?;
    let header = r.headers()?.clone();
    let names: Vec<&str> = header.iter().skip(1).collect();
    let expected: Vec<&str> = sidecar.columns.iter().map(|c| c.name.as_str()).collect();
    if names != expected {
        bail!("{}: columns {names:?} disagree with sidecar {expected:?}", path.display());
    }
    let mut ids = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        ids.push(rec.get(0).unwrap_or_default().to_string());
        for field in rec.iter().skip(1) {
            values.push(
                field.parse::<f64>().with_context(|| format!("{} row {}: bad number `{field}`", path.display(), i + 1))?,
            );
        }
    }
    let columns = sidecar.columns.iter().map(|c| c.name.clone()).collect();
    let transforms = sidecar.columns.into_iter().map(|c| c.transforms).collect();
    Ok(FeatureMatrix::with_transforms(ids, columns, values, transforms)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct SomFile {
    rows: usize,
    cols: usize,
    /// Vector dimension.
    n: usize,
    column_names: Vec<String>,
    prototypes: Vec<f64>,
    config: SomConfig,
    transforms: Vec<Vec<Transform>>,
}

pub fn write_som(path: &Path, map: &SomMap) -> Result<()> {
    let d = map.dims();
    write_json(
        path,
        &SomFile {
            rows: d.rows,
            cols: d.cols,
            n: map.dim(),
            column_names: map.columns().to_vec(),
            prototypes: map.prototypes().to_vec(),
            config: *map.config(),
            transforms: map.transforms().to_vec(),
        },
    )
}

pub fn read_som(path: &Path) -> Result<SomMap> {
    let f: SomFile = read_json(path)?;
    if (f.rows, f.cols) != (f.config.rows, f.config.cols) || f.n != f.column_names.len() {
        bail!("{}: inconsistent map header", path.display());
    }
    Ok(SomMap::from_parts(f.config, f.column_names, f.transforms, f.prototypes)?)
}

pub fn write_grid(path: &Path, grid: &Grid<f64>) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["row", "col", "value"])?;
    for (c, v) in grid.iter() {
        w.serialize((c.row, c.col, v))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_category_grid(path: &Path, grid: &Grid<Option<String>>) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["row", "col", "value"])?;
    for (c, v) in grid.iter() {
        w.serialize((c.row, c.col, v.as_deref().unwrap_or("")))?;
    }
    w.flush()?;
    Ok(())
}

/// A grid CSV (`row,col,value`) as raw strings; empty strings mark empty
/// cells.
pub fn read_grid_cells(path: &Path) -> Result<Grid<String>> {
    let mut cells: Vec<(usize, usize, String)> = Vec::new();
    for (i, row) in csv_reader(path)?.deserialize::<(usize, usize, String)>().enumerate() {
        cells.push(row.with_context(|| format!("{} row {}", path.display(), i + 1))?);
    }
    if cells.is_empty() {
        bail!("{}: grid is empty", path.display());
    }
    let rows = cells.iter().map(|c| c.0).max().unwrap_or(0) + 1;
    let cols = cells.iter().map(|c| c.1).max().unwrap_or(0) + 1;
    let dims = Dims::new(rows, cols);
    let mut out = vec![None; dims.cells()];
    for (r, c, v) in cells {
        let slot = &mut out[CellIndex::new(r, c).linear(cols)];
        if slot.is_some() {
            bail!("{}: cell ({r}, {c}) listed twice", path.display());
        }
        *slot = Some(v);
    }
    let cells = out
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| anyhow!("{}: cell {i} missing", path.display())))
        .collect::<Result<_>>()?;
    Ok(Grid { dims, cells })
}

pub fn write_cell_clusters(path: &Path, dims: Dims, model: &ClusterModel) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["row", "col", "cluster"])?;
    for (c, &k) in dims.iter().zip(&model.cell_assignments) {
        w.serialize((c.row, c.col, k + 1))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_entity_clusters(path: &Path, ids: &[String], cells: &[CellIndex], model: &ClusterModel) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["id", "cluster", "row", "col"])?;
    for ((id, c), &k) in ids.iter().zip(cells).zip(&model.entity_assignments) {
        w.serialize((id, k + 1, c.row, c.col))?;
    }
    w.flush()?;
    Ok(())
}

/// `(id, 0-based cluster)` pairs from an entity cluster CSV.
pub fn read_entity_clusters(path: &Path) -> Result<Vec<(String, usize)>> {
    let mut out = Vec::new();
    for (i, row) in csv_reader(path)?.deserialize::<(String, usize, usize, usize)>().enumerate() {
        let (id, k, _, _) = row.with_context(|| format!("{} row {}", path.display(), i + 1))?;
        if k == 0 {
            bail!("{} row {}: clusters are numbered from 1", path.display(), i + 1);
        }
        out.push((id, k - 1));
    }
    Ok(out)
}

pub fn write_density(path: &Path, d: &DensityMatrix) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["from", "to", "count", "probability"])?;
    for i in 0..d.k {
        for j in 0..d.k {
            w.serialize((i + 1, j + 1, d.count(i, j), d.probability(i, j)))?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_layout(path: &Path, ids: &[String], layout: &Layout, partition: &Partition) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["id", "x", "y", "partition"])?;
    for ((id, p), &q) in ids.iter().zip(&layout.coords).zip(&partition.labels) {
        w.serialize((id, p[0], p[1], q + 1))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_square_matrix(path: &Path, names: &[String], m: &SquareMatrix) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec![String::new()];
    header.extend(names.iter().cloned());
    w.write_record(&header)?;
    let mut buf = ryu::Buffer::new();
    for (name, row) in names.iter().zip(m.rows()) {
        let mut rec = vec![name.clone()];
        rec.extend(row.iter().map(|v| buf.format(*v).to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_square_matrix(path: &Path) -> Result<(Vec<String>, SquareMatrix)> {
    let mut r = csv_reader(path)?;
    let names: Vec<String> = r.headers()?.iter().skip(1).map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .skip(1)
            .map(|f| f.parse::<f64>().with_context(|| format!("{} row {}: bad number `{f}`", path.display(), i + 1)))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((names, SquareMatrix::from_rows(&rows)?))
}
