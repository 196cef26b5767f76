//! Vignette suites: load frozen scenarios, run the whole stack over an
//! elapsed-time sweep, and aggregate the verdict mix per group.
//!
//! A vignette freezes one decision point: terrain, person profile, last
//! known point, available drones, a clue, and the recorded planner output
//! responding to it. The harness replays each vignette at several elapsed
//! times, with and without folding the clue into the belief, and reports
//! per-cell verdicts plus accept/alert/reject shares per vignette group.
//!
//! Cells are independent, so they run in parallel; results are collected
//! in a fixed order and all maps are ordered, which makes reports
//! byte-identical across runs with the same seed. A cell that fails is
//! recorded as failed and the sweep continues.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::affinity::{affinity, AffinityProfile, PersonClass};
use crate::cost::{estimate_cost, gate_verdicts, CostEstimate, CostParams, DroneStatus};
use crate::decision::{decide, Decision, ThresholdConfig, Verdict};
use crate::error::{parse_json, read_to_string, Error, Result};
use crate::geo::LatLon;
use crate::planner::{relevance_gate, scripted_planner, CapRecord, Triage};
use crate::poa::{
    build_poa, ClueEvidence, ClueKind, CorridorParams, PoaMap, DEFAULT_DETECTION_PROB,
};
use crate::reachability::{reachability, MovementModel, MovementOverrides, DEFAULT_GAMMA};
use crate::terrain::{Scene, SceneOptions, TerrainDocument};

const SCHEMA_VERSION: u32 = 1;

// ── Vignettes ───────────────────────────────────────────────────────────

/// Scenario variants. Which perturbation each one carries is up to the
/// suite author; the harness only derives the reporting group.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum Variant {
    V0,
    V1,
    V2,
    V3,
    V4,
    V5,
    V6,
}

impl Variant {
    pub const ALL: [Variant; 7] = [
        Variant::V0,
        Variant::V1,
        Variant::V2,
        Variant::V3,
        Variant::V4,
        Variant::V5,
        Variant::V6,
    ];

    /// Reporting group. V5 and V6 carry displaced or hard-to-reach clues;
    /// V2 is the irrelevant-clue control and never reaches the envelope.
    pub fn group(self) -> Group {
        match self {
            Variant::V0 | Variant::V1 | Variant::V3 | Variant::V4 => Group::One,
            Variant::V5 | Variant::V6 => Group::Two,
            Variant::V2 => Group::Control,
        }
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum Group {
    #[serde(rename = "Group-1")]
    One,
    #[serde(rename = "Group-2")]
    Two,
    Control,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Group::One => "Group-1",
            Group::Two => "Group-2",
            Group::Control => "Control",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weather {
    pub light: String,
    pub weather: String,
    pub temp_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionBounds {
    pub name: String,
    pub corner_sw: LatLon,
    pub corner_ne: LatLon,
}

fn default_speed_factor() -> f64 {
    1.0
}

/// On-disk scenario schema. `terrain` is a path relative to the scenario
/// file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDocument {
    #[serde(default = "default_scenario_version")]
    schema_version: u32,
    id: String,
    terrain: String,
    region: RegionBounds,
    person_class: PersonClass,
    #[serde(default = "default_speed_factor")]
    profile_speed_factor: f64,
    lkp: LatLon,
    weather: Weather,
    drones: Vec<DroneStatus>,
    clue: ClueEvidence,
    cap: CapRecord,
    variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    movement_overrides: Option<MovementOverrides>,
}

fn default_scenario_version() -> u32 {
    SCHEMA_VERSION
}

/// A loaded scenario, with its terrain document attached.
#[derive(Debug, Clone)]
pub struct Vignette {
    pub id: String,
    pub variant: Variant,
    pub region: RegionBounds,
    pub person_class: PersonClass,
    pub profile_speed_factor: f64,
    pub lkp: LatLon,
    pub weather: Weather,
    pub drones: Vec<DroneStatus>,
    pub clue: ClueEvidence,
    pub cap: CapRecord,
    pub movement_overrides: Option<MovementOverrides>,
    pub terrain_path: PathBuf,
    pub terrain: Arc<TerrainDocument>,
}

impl Vignette {
    pub fn group(&self) -> Group {
        self.variant.group()
    }

    /// The walking model for this scenario: defaults, then the scenario's
    /// overrides, then its profile speed factor.
    pub fn movement_model(&self) -> Result<MovementModel> {
        let mut model = MovementModel::default();
        if let Some(overrides) = &self.movement_overrides {
            model = model.with_overrides(overrides);
        }
        model.profile_speed_factor *= self.profile_speed_factor;
        model.validate()?;
        Ok(model)
    }

    pub fn build_scene(&self, seed: u64) -> Result<Scene> {
        Scene::from_document(&self.terrain, &SceneOptions { seed, ..SceneOptions::default() })
    }

    fn from_parts(
        doc: ScenarioDocument,
        terrain_path: PathBuf,
        terrain: Arc<TerrainDocument>,
    ) -> Result<Vignette> {
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::schema(format!(
                "unsupported scenario schema_version {}",
                doc.schema_version
            )));
        }
        if doc.id.is_empty() {
            return Err(Error::schema("scenario id must not be empty"));
        }
        if doc.drones.is_empty() {
            return Err(Error::schema(format!("scenario {} lists no drones", doc.id)));
        }
        for drone in &doc.drones {
            if !(drone.battery_minutes.is_finite() && drone.battery_minutes >= 0.0) {
                return Err(Error::schema(format!(
                    "drone {} has an invalid battery level",
                    drone.id
                )));
            }
        }
        if !(doc.profile_speed_factor.is_finite() && doc.profile_speed_factor > 0.0) {
            return Err(Error::schema("profile_speed_factor must be positive"));
        }
        doc.clue.validate()?;
        doc.cap.validate()?;
        if doc.cap.relevance != doc.clue.relevance {
            return Err(Error::schema(format!(
                "scenario {}: planner record relevance {:?} disagrees with the clue's {:?}",
                doc.id, doc.cap.relevance, doc.clue.relevance
            )));
        }
        if doc.cap.location != doc.clue.location {
            return Err(Error::schema(format!(
                "scenario {}: planner record location differs from the clue location",
                doc.id
            )));
        }
        let is_control = doc.variant == Variant::V2;
        if is_control == doc.clue.relevance.triggers_update() {
            return Err(Error::schema(format!(
                "scenario {}: control variants need a below-Medium clue and other \
                 variants need Medium or higher",
                doc.id
            )));
        }
        Ok(Vignette {
            id: doc.id,
            variant: doc.variant,
            region: doc.region,
            person_class: doc.person_class,
            profile_speed_factor: doc.profile_speed_factor,
            lkp: doc.lkp,
            weather: doc.weather,
            drones: doc.drones,
            clue: doc.clue,
            cap: doc.cap,
            movement_overrides: doc.movement_overrides,
            terrain_path,
            terrain,
        })
    }
}

/// Load one scenario file and its terrain.
pub fn load_vignette(path: &Path) -> Result<Vignette> {
    load_vignette_cached(path, &mut BTreeMap::new())
}

fn load_vignette_cached(
    path: &Path,
    cache: &mut BTreeMap<PathBuf, Arc<TerrainDocument>>,
) -> Result<Vignette> {
    let text = read_to_string(path)?;
    let doc: ScenarioDocument = parse_json(path, &text)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let terrain_path = base.join(&doc.terrain);
    let terrain = match cache.get(&terrain_path) {
        Some(arc) => Arc::clone(arc),
        None => {
            let text = read_to_string(&terrain_path)?;
            let parsed: TerrainDocument = parse_json(&terrain_path, &text)?;
            let arc = Arc::new(parsed);
            cache.insert(terrain_path.clone(), Arc::clone(&arc));
            arc
        }
    };
    Vignette::from_parts(doc, terrain_path, terrain)
}

/// Load every `.json` scenario in a directory, sorted by file name.
/// Vignettes referencing the same terrain file share one parsed copy.
pub fn load_suite(dir: &Path) -> Result<Vec<Vignette>> {
    let entries = std::fs::read_dir(dir)
        .map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::invalid(format!(
            "no scenario files (*.json) in {}",
            dir.display()
        )));
    }
    let mut cache = BTreeMap::new();
    paths.iter().map(|p| load_vignette_cached(p, &mut cache)).collect()
}

// ── Run configuration ───────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateMode {
    NoUpdate,
    WithUpdate,
}

impl fmt::Display for UpdateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            UpdateMode::NoUpdate => "no_update",
            UpdateMode::WithUpdate => "with_update",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    NoUpdate,
    WithUpdate,
    Both,
}

impl RunMode {
    pub fn update_modes(self) -> &'static [UpdateMode] {
        match self {
            RunMode::NoUpdate => &[UpdateMode::NoUpdate],
            RunMode::WithUpdate => &[UpdateMode::WithUpdate],
            RunMode::Both => &[UpdateMode::NoUpdate, UpdateMode::WithUpdate],
        }
    }
}

impl FromStr for RunMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "no_update" => Ok(RunMode::NoUpdate),
            "with_update" => Ok(RunMode::WithUpdate),
            "both" => Ok(RunMode::Both),
            other => Err(Error::invalid(format!(
                "unknown mode {other}; expected no_update, with_update, or both"
            ))),
        }
    }
}

/// Knobs shared by every cell of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteParams {
    pub thresholds: ThresholdConfig,
    pub cost: CostParams,
    pub gamma: f64,
    pub detection_prob: f64,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            thresholds: ThresholdConfig::default(),
            cost: CostParams::default(),
            gamma: DEFAULT_GAMMA,
            detection_prob: DEFAULT_DETECTION_PROB,
        }
    }
}

// ── Reports ─────────────────────────────────────────────────────────────

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionCost {
    pub action: String,
    pub drone_id: String,
    pub estimate: CostEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CellOutcome {
    Evaluated {
        /// Whether a clue update was folded into the belief for this cell.
        updated: bool,
        poa_checksum: String,
        /// Subclusters on or adjacent to the clue location.
        clue_vicinity: Vec<String>,
        /// Final verdicts, after the feasibility gate, in plan order.
        verdicts: Vec<Verdict>,
        costs: Vec<MissionCost>,
        summary: Decision,
    },
    Skipped {
        reason: String,
    },
    Failed {
        error: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub vignette_id: String,
    pub variant: Variant,
    pub group: Group,
    pub et_minutes: f64,
    pub update_mode: UpdateMode,
    pub outcome: CellOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub accept_pct: f64,
    pub alert_pct: f64,
    pub reject_pct: f64,
    /// Number of action verdicts the percentages are over.
    pub candidates: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupAggregate {
    pub group: Group,
    pub update_mode: UpdateMode,
    #[serde(flatten)]
    pub distribution: Distribution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub seed: u64,
    pub mode: RunMode,
    pub et_minutes: Vec<f64>,
    pub params: SuiteParams,
    pub vignettes: Vec<String>,
    pub cells: Vec<CellReport>,
    pub aggregates: Vec<GroupAggregate>,
}

// ── Execution ───────────────────────────────────────────────────────────

/// Everything one cell produces; the surface is kept so callers can
/// export heatmaps without recomputing.
#[derive(Debug, Clone)]
pub struct CellResult {
    pub outcome: CellOutcome,
    pub poa: Option<PoaMap>,
}

fn apply_clue_update(
    base: &PoaMap,
    scene: &Scene,
    vignette: &Vignette,
    model: &MovementModel,
    aff: &crate::affinity::AffinityField,
    et_minutes: f64,
    params: &SuiteParams,
) -> Result<PoaMap> {
    let clue = &vignette.clue;
    match &clue.kind {
        ClueKind::Presence => {
            let reanchor = reachability(scene, model, clue.location, et_minutes, params.gamma)?;
            base.apply_presence_clue(scene, clue, &reanchor, aff)
        }
        ClueKind::Directional { .. } => {
            base.apply_directional_clue(scene, clue, &CorridorParams::for_scene(scene))
        }
        ClueKind::NegativeSearch { subcluster_id } => {
            base.apply_negative_search(scene, subcluster_id, params.detection_prob)
        }
    }
}

fn mission_costs(
    scene: &Scene,
    vignette: &Vignette,
    actions: &[String],
    triage: Triage,
    params: &SuiteParams,
) -> Result<Vec<MissionCost>> {
    let proj = scene.projection();
    actions
        .iter()
        .map(|action| {
            let sub = scene.subcluster(action)?;
            let target = scene.latlon_of(sub.centroid.0, sub.centroid.1);
            let per_drone: Vec<CostEstimate> = vignette
                .drones
                .iter()
                .map(|d| {
                    estimate_cost(
                        proj.distance_m(d.position, target),
                        sub.cell_indices.len(),
                        d.battery_minutes,
                        &params.cost,
                    )
                })
                .collect::<Result<_>>()?;
            let chosen = match triage {
                // The finding drone acts first; it is listed first.
                Triage::CurrentDrone => 0,
                // Pool dispatch (or a human picking from the pool): the
                // drone with the most margin to spare.
                Triage::DronePool | Triage::HumanVet => per_drone
                    .iter()
                    .enumerate()
                    .max_by(|(ia, a), (ib, b)| {
                        a.margin_minutes
                            .partial_cmp(&b.margin_minutes)
                            .expect("finite margins")
                            .then(ib.cmp(ia))
                    })
                    .map(|(i, _)| i)
                    .expect("at least one drone"),
            };
            Ok(MissionCost {
                action: action.clone(),
                drone_id: vignette.drones[chosen].id.clone(),
                estimate: per_drone[chosen].clone(),
            })
        })
        .collect()
}

fn evaluate_cell(
    vignette: &Vignette,
    scene: &Scene,
    et_minutes: f64,
    update: UpdateMode,
    params: &SuiteParams,
) -> Result<CellResult> {
    let model = vignette.movement_model()?;
    let profile = AffinityProfile::preset_for(vignette.person_class, scene.cell_size_m);
    let reach = reachability(scene, &model, vignette.lkp, et_minutes, params.gamma)?;
    let aff = affinity(scene, &profile)?;
    let base = build_poa(scene, &reach, &aff)?;

    let (report, proposal) = scripted_planner(&vignette.cap, scene)?;
    if !relevance_gate(&report) {
        return Ok(CellResult {
            outcome: CellOutcome::Skipped {
                reason: format!(
                    "clue relevance {:?} is below Medium; the envelope was not consulted",
                    report.relevance
                ),
            },
            poa: None,
        });
    }

    let (poa, updated) = match update {
        UpdateMode::NoUpdate => (base, false),
        UpdateMode::WithUpdate => {
            (apply_clue_update(&base, scene, vignette, &model, &aff, et_minutes, params)?, true)
        }
    };

    let mut verdicts: Vec<Verdict> = proposal
        .actions
        .iter()
        .map(|action| decide(&poa.q, action, &params.thresholds))
        .collect::<Result<_>>()?;
    let costs = mission_costs(scene, vignette, &proposal.actions, proposal.triage, params)?;
    let estimates: Vec<CostEstimate> = costs.iter().map(|c| c.estimate.clone()).collect();
    verdicts = gate_verdicts(&verdicts, &estimates)?;
    let summary = verdicts.iter().map(|v| v.decision).min().unwrap_or(Decision::Reject);

    let near = scene.locate(vignette.clue.location)?;
    let mut clue_vicinity = vec![near.on];
    clue_vicinity.extend(near.adjacent);

    Ok(CellResult {
        outcome: CellOutcome::Evaluated {
            updated,
            poa_checksum: poa.checksum(),
            clue_vicinity,
            verdicts,
            costs,
            summary,
        },
        poa: Some(poa),
    })
}

/// Run one (vignette, elapsed-time, mode) cell against a prebuilt scene.
pub fn execute_cell(
    vignette: &Vignette,
    scene: &Scene,
    et_minutes: f64,
    update: UpdateMode,
    params: &SuiteParams,
) -> CellResult {
    match evaluate_cell(vignette, scene, et_minutes, update, params) {
        Ok(result) => result,
        Err(err) => {
            CellResult { outcome: CellOutcome::Failed { error: err.to_string() }, poa: None }
        }
    }
}

fn validate_ets(ets: &[f64]) -> Result<()> {
    if ets.is_empty() {
        return Err(Error::invalid("at least one elapsed-time value is required"));
    }
    for &et in ets {
        if !(et.is_finite() && et > 0.0) {
            return Err(Error::invalid(format!("elapsed time {et} must be positive")));
        }
    }
    Ok(())
}

/// Build each distinct terrain once, with the run seed.
fn build_scenes(
    vignettes: &[Vignette],
    seed: u64,
) -> BTreeMap<PathBuf, std::result::Result<Arc<Scene>, String>> {
    let mut scenes = BTreeMap::new();
    for v in vignettes {
        scenes.entry(v.terrain_path.clone()).or_insert_with(|| {
            v.build_scene(seed).map(Arc::new).map_err(|e| e.to_string())
        });
    }
    scenes
}

/// Sweep every vignette across the elapsed times in the requested mode.
pub fn run_suite_with(
    vignettes: &[Vignette],
    ets: &[f64],
    mode: RunMode,
    seed: u64,
    params: &SuiteParams,
) -> Result<RunReport> {
    if vignettes.is_empty() {
        return Err(Error::invalid("the suite has no vignettes"));
    }
    validate_ets(ets)?;
    params.thresholds.validate()?;
    params.cost.validate()?;

    let scenes = build_scenes(vignettes, seed);
    let mut specs = Vec::new();
    for v in vignettes {
        for &et in ets {
            for &update in mode.update_modes() {
                specs.push((v, et, update));
            }
        }
    }

    let cells: Vec<CellReport> = specs
        .par_iter()
        .map(|&(v, et, update)| {
            let outcome = match &scenes[&v.terrain_path] {
                Ok(scene) => execute_cell(v, scene, et, update, params).outcome,
                Err(e) => CellOutcome::Failed { error: e.clone() },
            };
            CellReport {
                vignette_id: v.id.clone(),
                variant: v.variant,
                group: v.group(),
                et_minutes: et,
                update_mode: update,
                outcome,
            }
        })
        .collect();

    let mut report = RunReport {
        schema_version: SCHEMA_VERSION,
        seed,
        mode,
        et_minutes: ets.to_vec(),
        params: *params,
        vignettes: vignettes.iter().map(|v| v.id.clone()).collect(),
        cells,
        aggregates: Vec::new(),
    };
    for group in [Group::One, Group::Two] {
        for &update in mode.update_modes() {
            if let Ok(distribution) = aggregate_distribution(&report, group, update) {
                report.aggregates.push(GroupAggregate { group, update_mode: update, distribution });
            }
        }
    }
    Ok(report)
}

/// `run_suite_with` under default thresholds, costs, and kernels.
pub fn run_suite(
    vignettes: &[Vignette],
    ets: &[f64],
    mode: RunMode,
    seed: u64,
) -> Result<RunReport> {
    run_suite_with(vignettes, ets, mode, seed, &SuiteParams::default())
}

/// Accept/alert/reject shares over every action verdict of a group's
/// evaluated cells under one update mode.
pub fn aggregate_distribution(
    report: &RunReport,
    group: Group,
    update: UpdateMode,
) -> Result<Distribution> {
    let mut counts = [0usize; 3];
    for cell in &report.cells {
        if cell.group != group || cell.update_mode != update {
            continue;
        }
        if let CellOutcome::Evaluated { verdicts, .. } = &cell.outcome {
            for v in verdicts {
                counts[match v.decision {
                    Decision::Accept => 0,
                    Decision::Alert => 1,
                    Decision::Reject => 2,
                }] += 1;
            }
        }
    }
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::invalid(format!(
            "no evaluated candidates for {group} under {update}"
        )));
    }
    let pct = |n: usize| 100.0 * n as f64 / total as f64;
    Ok(Distribution {
        accept_pct: pct(counts[0]),
        alert_pct: pct(counts[1]),
        reject_pct: pct(counts[2]),
        candidates: total,
    })
}

/// Canonical report text: pretty JSON with a trailing newline.
pub fn report_to_string(report: &RunReport) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    Ok(text)
}

pub fn write_report(report: &RunReport, path: &Path) -> Result<()> {
    std::fs::write(path, report_to_string(report)?)
        .map_err(|source| Error::Io { path: path.to_path_buf(), source })
}
