//! Terrain scenes: gridded feature maps with clusters and search-sized
//! subclusters.
//!
//! A terrain document is a row-major grid of (feature, elevation) cells with
//! a geographic origin at the south-west corner of cell (0, 0); rows grow
//! northward, columns eastward. Loading a document:
//!
//! 1. derives the edge classes. Water is `Lake` or `StreamRiver`;
//!    `Low_Vegetation`, `Woodland`, and `Rock_Barren` cells 8-adjacent to
//!    water become `Shoreline`; remaining `Woodland` cells 8-adjacent to a
//!    non-woodland cell become `Woodland_Boundary`. Road, trail, building,
//!    and marsh cells keep their class. One pass over the original classes,
//!    no cascading.
//! 2. groups cells into clusters: either the document's explicit
//!    `cluster_labels`, or 8-connected components of equal feature class
//!    named `{Feature_Label}-{n}` with a per-feature counter in scan order.
//! 3. splits each cluster into `ceil(cells / max_subcluster_cells)`
//!    subclusters by seeded k-means. A single-subcluster cluster reuses the
//!    cluster id; larger ones get `{cluster_id}-sub-{j}` with `j` ordered by
//!    centroid. Every cell belongs to exactly one subcluster.
//!
//! Invariants kept by construction: `Lake` and `Building` cells are
//! impassable; subcluster ids are unique and embed their parent cluster id;
//! identical (document, options) inputs produce an identical [`Scene`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{LatLon, Projection};
use crate::grid::{chebyshev, coords, index, neighbors_8};
use crate::kmeans;

pub const DEFAULT_MAX_SUBCLUSTER_CELLS: usize = 64;
pub const NEARBY_RADIUS_CELLS: usize = 10;
const SCHEMA_VERSION: u32 = 1;

// ── Feature classification ──────────────────────────────────────────────

/// Terrain classes a cell can carry. `Shoreline` and `WoodlandBoundary` are
/// edge classes, usually derived from adjacency rather than mapped directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FeatureType {
    #[serde(rename = "Road")]
    Road,
    #[serde(rename = "Trail")]
    Trail,
    #[serde(rename = "Stream_River")]
    StreamRiver,
    #[serde(rename = "Lake")]
    Lake,
    #[serde(rename = "Shoreline")]
    Shoreline,
    #[serde(rename = "Woodland")]
    WoodlandInterior,
    #[serde(rename = "Woodland_Boundary")]
    WoodlandBoundary,
    #[serde(rename = "Low_Vegetation")]
    OpenLowVegetation,
    #[serde(rename = "Building")]
    Building,
    #[serde(rename = "Marsh_Wetland")]
    MarshWetland,
    #[serde(rename = "Rock_Barren")]
    RockBarren,
}

impl FeatureType {
    pub const ALL: [FeatureType; 11] = [
        FeatureType::Road,
        FeatureType::Trail,
        FeatureType::StreamRiver,
        FeatureType::Lake,
        FeatureType::Shoreline,
        FeatureType::WoodlandInterior,
        FeatureType::WoodlandBoundary,
        FeatureType::OpenLowVegetation,
        FeatureType::Building,
        FeatureType::MarshWetland,
        FeatureType::RockBarren,
    ];

    pub const COUNT: usize = Self::ALL.len();

    /// Position in [`Self::ALL`]; used to key per-feature tables.
    pub fn ordinal(self) -> usize {
        Self::ALL.iter().position(|&f| f == self).unwrap()
    }

    /// Label used in cluster ids and document serialization.
    pub fn label(self) -> &'static str {
        match self {
            FeatureType::Road => "Road",
            FeatureType::Trail => "Trail",
            FeatureType::StreamRiver => "Stream_River",
            FeatureType::Lake => "Lake",
            FeatureType::Shoreline => "Shoreline",
            FeatureType::WoodlandInterior => "Woodland",
            FeatureType::WoodlandBoundary => "Woodland_Boundary",
            FeatureType::OpenLowVegetation => "Low_Vegetation",
            FeatureType::Building => "Building",
            FeatureType::MarshWetland => "Marsh_Wetland",
            FeatureType::RockBarren => "Rock_Barren",
        }
    }

    pub fn is_water(self) -> bool {
        matches!(self, FeatureType::Lake | FeatureType::StreamRiver)
    }

    /// Linear features get tighter affinity kernels than areal ones.
    pub fn is_linear(self) -> bool {
        matches!(
            self,
            FeatureType::Road
                | FeatureType::Trail
                | FeatureType::StreamRiver
                | FeatureType::Shoreline
                | FeatureType::WoodlandBoundary
        )
    }

    fn impassable(self) -> bool {
        matches!(self, FeatureType::Lake | FeatureType::Building)
    }

    /// Classes that convert to `Shoreline` when they touch water.
    fn shoreline_eligible(self) -> bool {
        matches!(
            self,
            FeatureType::OpenLowVegetation
                | FeatureType::WoodlandInterior
                | FeatureType::RockBarren
        )
    }

    fn is_woodland(self) -> bool {
        matches!(self, FeatureType::WoodlandInterior | FeatureType::WoodlandBoundary)
    }
}

// ── Scene types ─────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
    pub terrain: FeatureType,
    pub elevation_m: f64,
    pub passable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    pub id: String,
    pub feature_type: FeatureType,
    /// Sorted cell indices into `Scene::cells`.
    pub cell_indices: Vec<usize>,
    /// Mean (row, col) of the member cells.
    pub centroid: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubCluster {
    pub id: String,
    pub cluster_id: String,
    pub feature_type: FeatureType,
    pub cell_indices: Vec<usize>,
    pub centroid: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneOptions {
    /// Clusters larger than this split into ceil(n / max) subclusters.
    pub max_subcluster_cells: usize,
    /// Seed for the k-means subdivision.
    pub seed: u64,
}

impl Default for SceneOptions {
    fn default() -> Self {
        SceneOptions { max_subcluster_cells: DEFAULT_MAX_SUBCLUSTER_CELLS, seed: 0 }
    }
}

/// A loaded terrain scene. Immutable after load; safe to share across
/// threads for concurrent reads.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub origin: LatLon,
    pub cell_size_m: f64,
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<Cell>,
    pub clusters: Vec<Cluster>,
    pub subclusters: Vec<SubCluster>,
    /// Subcluster index owning each cell.
    subcluster_of: Vec<usize>,
    id_to_subcluster: BTreeMap<String, usize>,
    projection: Projection,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocationQueryResult {
    pub cell: (usize, usize),
    /// Id of the subcluster containing the point.
    pub on: String,
    /// Subclusters sharing an 8-connected border with the containing one.
    pub adjacent: Vec<String>,
    /// Other subclusters with a cell within the nearby radius of the
    /// containing cell, Chebyshev distance, excluding `on` and `adjacent`.
    pub nearby: Vec<String>,
}

// ── Documents ───────────────────────────────────────────────────────────

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellRecord {
    pub terrain: FeatureType,
    pub elevation_m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TerrainDocument {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub origin: LatLon,
    pub cell_size_m: f64,
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<CellRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_labels: Option<Vec<String>>,
}

fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

// ── Loading ─────────────────────────────────────────────────────────────

/// Parse and build a scene with default options.
pub fn load_scene(document: &str) -> Result<Scene> {
    load_scene_with(document, &SceneOptions::default())
}

pub fn load_scene_with(document: &str, options: &SceneOptions) -> Result<Scene> {
    let doc: TerrainDocument = serde_json::from_str(document)?;
    Scene::from_document(&doc, options)
}

impl Scene {
    pub fn from_document(doc: &TerrainDocument, options: &SceneOptions) -> Result<Scene> {
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::schema(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                doc.schema_version
            )));
        }
        if doc.rows == 0 || doc.cols == 0 {
            return Err(Error::schema("rows and cols must be positive"));
        }
        if !(doc.cell_size_m.is_finite() && doc.cell_size_m > 0.0) {
            return Err(Error::schema("cell_size_m must be a positive finite number"));
        }
        let expected = doc.rows * doc.cols;
        if doc.cells.len() != expected {
            return Err(Error::GridSizeMismatch { expected, actual: doc.cells.len() });
        }
        if options.max_subcluster_cells == 0 {
            return Err(Error::invalid("max_subcluster_cells must be positive"));
        }
        for (i, rec) in doc.cells.iter().enumerate() {
            if !rec.elevation_m.is_finite() {
                return Err(Error::schema(format!("cells[{i}].elevation_m is not finite")));
            }
        }

        let terrain = derive_edge_classes(doc);
        let cells: Vec<Cell> = terrain
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let (row, col) = coords(doc.cols, i);
                Cell {
                    row,
                    col,
                    terrain: t,
                    elevation_m: doc.cells[i].elevation_m,
                    passable: !t.impassable(),
                }
            })
            .collect();

        let clusters = match &doc.cluster_labels {
            Some(labels) => clusters_from_labels(doc, &cells, labels)?,
            None => clusters_from_components(doc, &cells),
        };

        let mut scene = Scene {
            origin: doc.origin,
            cell_size_m: doc.cell_size_m,
            rows: doc.rows,
            cols: doc.cols,
            cells,
            clusters,
            subclusters: Vec::new(),
            subcluster_of: vec![usize::MAX; expected],
            id_to_subcluster: BTreeMap::new(),
            projection: Projection::new(doc.origin),
        };

        let mut subclusters = Vec::new();
        for ci in 0..scene.clusters.len() {
            let cluster = &scene.clusters[ci];
            let k = cluster.cell_indices.len().div_ceil(options.max_subcluster_cells);
            let seed = options.seed.wrapping_add(ci as u64);
            subclusters.extend(subcluster_partition(&scene, cluster, k, seed)?);
        }
        for (si, sub) in subclusters.iter().enumerate() {
            if scene.id_to_subcluster.insert(sub.id.clone(), si).is_some() {
                return Err(Error::schema(format!("duplicate subcluster id `{}`", sub.id)));
            }
            for &cell in &sub.cell_indices {
                scene.subcluster_of[cell] = si;
            }
        }
        debug_assert!(scene.subcluster_of.iter().all(|&s| s != usize::MAX));
        scene.subclusters = subclusters;
        Ok(scene)
    }

    // ── Coordinate helpers ──────────────────────────────────────────

    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        index(self.cols, row, col)
    }

    pub fn cell(&self, row: usize, col: usize) -> &Cell {
        &self.cells[self.index(row, col)]
    }

    /// Grid cell containing a geographic point.
    pub fn cell_of(&self, point: LatLon) -> Result<(usize, usize)> {
        let (east, north) = self.projection.to_local(point);
        let col = (east / self.cell_size_m).floor();
        let row = (north / self.cell_size_m).floor();
        if row < 0.0 || col < 0.0 || row >= self.rows as f64 || col >= self.cols as f64 {
            return Err(Error::OutOfBounds { lat: point.lat, lon: point.lon });
        }
        Ok((row as usize, col as usize))
    }

    /// Geographic position of a fractional (row, col) cell center.
    pub fn latlon_of(&self, row: f64, col: f64) -> LatLon {
        self.projection.to_latlon((col + 0.5) * self.cell_size_m, (row + 0.5) * self.cell_size_m)
    }

    /// Geographic position of a grid corner (row and col may equal
    /// rows/cols to address the far edge).
    pub fn corner_latlon(&self, row: f64, col: f64) -> LatLon {
        self.projection.to_latlon(col * self.cell_size_m, row * self.cell_size_m)
    }

    pub(crate) fn projection(&self) -> &Projection {
        &self.projection
    }

    // ── Subcluster lookup ───────────────────────────────────────────

    pub fn subcluster(&self, id: &str) -> Result<&SubCluster> {
        self.subcluster_index(id).map(|i| &self.subclusters[i])
    }

    pub fn subcluster_index(&self, id: &str) -> Result<usize> {
        self.id_to_subcluster
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownSubcluster(id.to_string()))
    }

    pub fn subcluster_of_cell(&self, cell_index: usize) -> usize {
        self.subcluster_of[cell_index]
    }

    // ── Location queries ────────────────────────────────────────────

    pub fn locate(&self, point: LatLon) -> Result<LocationQueryResult> {
        self.locate_with_radius(point, NEARBY_RADIUS_CELLS)
    }

    pub fn locate_with_radius(
        &self,
        point: LatLon,
        radius_cells: usize,
    ) -> Result<LocationQueryResult> {
        let (row, col) = self.cell_of(point)?;
        let cell_idx = self.index(row, col);
        let on = self.subcluster_of[cell_idx];

        let mut adjacent = vec![false; self.subclusters.len()];
        for &ci in &self.subclusters[on].cell_indices {
            for n in neighbors_8(self.rows, self.cols, ci) {
                let s = self.subcluster_of[n];
                if s != on {
                    adjacent[s] = true;
                }
            }
        }

        let mut nearby = vec![false; self.subclusters.len()];
        let r0 = row.saturating_sub(radius_cells);
        let r1 = (row + radius_cells).min(self.rows - 1);
        let c0 = col.saturating_sub(radius_cells);
        let c1 = (col + radius_cells).min(self.cols - 1);
        for r in r0..=r1 {
            for c in c0..=c1 {
                debug_assert!(chebyshev((row, col), (r, c)) <= radius_cells);
                let s = self.subcluster_of[self.index(r, c)];
                if s != on && !adjacent[s] {
                    nearby[s] = true;
                }
            }
        }

        let ids = |mask: &[bool]| {
            mask.iter()
                .enumerate()
                .filter(|(_, &m)| m)
                .map(|(i, _)| self.subclusters[i].id.clone())
                .collect::<Vec<_>>()
        };
        Ok(LocationQueryResult {
            cell: (row, col),
            on: self.subclusters[on].id.clone(),
            adjacent: ids(&adjacent),
            nearby: ids(&nearby),
        })
    }

    // ── Distance transform ──────────────────────────────────────────

    /// Euclidean distance in metres from every cell center to the nearest
    /// cell of `feature`. Cells of the feature itself get 0; if the scene
    /// has no such cell every entry is `f64::INFINITY`.
    pub fn distance_to_feature(&self, feature: FeatureType) -> Vec<f64> {
        let mut squared = vec![f64::INFINITY; self.cells.len()];
        for (i, cell) in self.cells.iter().enumerate() {
            if cell.terrain == feature {
                squared[i] = 0.0;
            }
        }
        squared_distance_transform(&mut squared, self.rows, self.cols);
        squared.iter().map(|&d2| d2.sqrt() * self.cell_size_m).collect()
    }
}

// ── Edge-class derivation ───────────────────────────────────────────────

fn derive_edge_classes(doc: &TerrainDocument) -> Vec<FeatureType> {
    let original: Vec<FeatureType> = doc.cells.iter().map(|c| c.terrain).collect();
    original
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let touches = |pred: &dyn Fn(FeatureType) -> bool| {
                neighbors_8(doc.rows, doc.cols, i).any(|n| pred(original[n]))
            };
            if t.shoreline_eligible() && touches(&|n| n.is_water()) {
                FeatureType::Shoreline
            } else if t == FeatureType::WoodlandInterior && touches(&|n| !n.is_woodland()) {
                FeatureType::WoodlandBoundary
            } else {
                t
            }
        })
        .collect()
}

// ── Cluster extraction ──────────────────────────────────────────────────

fn majority_feature(cells: &[Cell], members: &[usize]) -> FeatureType {
    let mut counts = [0usize; FeatureType::COUNT];
    for &i in members {
        counts[cells[i].terrain.ordinal()] += 1;
    }
    let best = counts.iter().enumerate().max_by_key(|&(i, &c)| (c, usize::MAX - i)).unwrap().0;
    FeatureType::ALL[best]
}

fn centroid_of(cols: usize, members: &[usize]) -> (f64, f64) {
    let n = members.len() as f64;
    let (mut sr, mut sc) = (0.0, 0.0);
    for &i in members {
        let (r, c) = coords(cols, i);
        sr += r as f64;
        sc += c as f64;
    }
    (sr / n, sc / n)
}

fn clusters_from_labels(
    doc: &TerrainDocument,
    cells: &[Cell],
    labels: &[String],
) -> Result<Vec<Cluster>> {
    if labels.len() != cells.len() {
        return Err(Error::schema(format!(
            "cluster_labels has {} entries but the grid has {} cells",
            labels.len(),
            cells.len()
        )));
    }
    let mut order: Vec<&String> = Vec::new();
    let mut members: BTreeMap<&String, Vec<usize>> = BTreeMap::new();
    for (i, label) in labels.iter().enumerate() {
        let entry = members.entry(label).or_default();
        if entry.is_empty() {
            order.push(label);
        }
        entry.push(i);
    }
    Ok(order
        .into_iter()
        .map(|label| {
            let m = members.remove(label).unwrap();
            Cluster {
                id: label.clone(),
                feature_type: majority_feature(cells, &m),
                centroid: centroid_of(doc.cols, &m),
                cell_indices: m,
            }
        })
        .collect())
}

fn clusters_from_components(doc: &TerrainDocument, cells: &[Cell]) -> Vec<Cluster> {
    let n = cells.len();
    let mut component = vec![usize::MAX; n];
    let mut clusters = Vec::new();
    let mut per_feature = [0usize; FeatureType::COUNT];
    let mut queue = std::collections::VecDeque::new();

    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let feature = cells[start].terrain;
        let id = clusters.len();
        component[start] = id;
        queue.push_back(start);
        let mut members = vec![start];
        while let Some(cur) = queue.pop_front() {
            for nb in neighbors_8(doc.rows, doc.cols, cur) {
                if component[nb] == usize::MAX && cells[nb].terrain == feature {
                    component[nb] = id;
                    queue.push_back(nb);
                    members.push(nb);
                }
            }
        }
        members.sort_unstable();
        let serial = per_feature[feature.ordinal()];
        per_feature[feature.ordinal()] += 1;
        clusters.push(Cluster {
            id: format!("{}-{}", feature.label(), serial),
            feature_type: feature,
            centroid: centroid_of(doc.cols, &members),
            cell_indices: members,
        });
    }
    clusters
}

// ── Subcluster partitioning ─────────────────────────────────────────────

/// Split one cluster into `k` subclusters with seeded k-means over cell
/// (row, col) coordinates. `k = 1` reuses the cluster id; otherwise
/// subclusters are numbered by centroid order as `{cluster_id}-sub-{j}`.
pub fn subcluster_partition(
    scene: &Scene,
    cluster: &Cluster,
    k: usize,
    seed: u64,
) -> Result<Vec<SubCluster>> {
    let n = cluster.cell_indices.len();
    if k == 0 {
        return Err(Error::invalid("subcluster count k must be at least 1"));
    }
    if k > n {
        return Err(Error::invalid(format!(
            "subcluster count k = {k} exceeds the cluster's {n} cells"
        )));
    }
    if k == 1 {
        return Ok(vec![SubCluster {
            id: cluster.id.clone(),
            cluster_id: cluster.id.clone(),
            feature_type: cluster.feature_type,
            cell_indices: cluster.cell_indices.clone(),
            centroid: cluster.centroid,
        }]);
    }

    let points: Vec<(f64, f64)> = cluster
        .cell_indices
        .iter()
        .map(|&i| {
            let (r, c) = coords(scene.cols, i);
            (r as f64, c as f64)
        })
        .collect();
    let result = kmeans::lloyd(&points, k, seed);

    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (pt, &owner) in result.assignment.iter().enumerate() {
        groups[owner].push(cluster.cell_indices[pt]);
    }
    let mut parts: Vec<(Vec<usize>, (f64, f64))> = groups
        .into_iter()
        .filter(|g| !g.is_empty())
        .map(|g| {
            let centroid = centroid_of(scene.cols, &g);
            (g, centroid)
        })
        .collect();
    parts.sort_by(|a, b| {
        (a.1 .0, a.1 .1, a.0[0]).partial_cmp(&(b.1 .0, b.1 .1, b.0[0])).unwrap()
    });

    Ok(parts
        .into_iter()
        .enumerate()
        .map(|(j, (cell_indices, centroid))| SubCluster {
            id: format!("{}-sub-{}", cluster.id, j),
            cluster_id: cluster.id.clone(),
            feature_type: cluster.feature_type,
            cell_indices,
            centroid,
        })
        .collect())
}

// ── Exact Euclidean distance transform ──────────────────────────────────

/// In-place two-pass squared distance transform (row pass then column
/// pass), each pass the 1D lower envelope of parabolas. Input holds 0 at
/// sources and +inf elsewhere; output is squared distance in cell units.
fn squared_distance_transform(field: &mut [f64], rows: usize, cols: usize) {
    let mut line = vec![0.0; rows.max(cols)];
    // Columns first: nearest source within each column.
    for c in 0..cols {
        for r in 0..rows {
            line[r] = field[index(cols, r, c)];
        }
        let out = dt_1d(&line[..rows]);
        for r in 0..rows {
            field[index(cols, r, c)] = out[r];
        }
    }
    // Then rows, over the column results.
    for r in 0..rows {
        for c in 0..cols {
            line[c] = field[index(cols, r, c)];
        }
        let out = dt_1d(&line[..cols]);
        for c in 0..cols {
            field[index(cols, r, c)] = out[c];
        }
    }
}

/// 1D squared distance transform: `d[i] = min_j f[j] + (i - j)^2`.
fn dt_1d(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    let mut v = vec![0usize; n]; // parabola apexes
    let mut z = vec![0.0f64; n + 1]; // envelope boundaries
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;

    let intersect = |q: usize, p: usize| -> f64 {
        // Crossing point of parabolas rooted at q and p (q > p).
        ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2 * q - 2 * p) as f64
    };

    for q in 1..n {
        if f[q].is_infinite() {
            continue;
        }
        if f[v[k]].is_infinite() {
            v[k] = q;
            continue;
        }
        let mut s = intersect(q, v[k]);
        while k > 0 && s <= z[k] {
            k -= 1;
            s = intersect(q, v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }

    let mut k = 0usize;
    for (q, dq) in d.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        *dq = if f[p].is_infinite() {
            f64::INFINITY
        } else {
            let diff = q as f64 - p as f64;
            f[p] + diff * diff
        };
    }
    d
}
