//! Probability-of-area mapping and decision guardrails for drone-assisted
//! wilderness search.
//!
//! The crate models a lost-person search as a gridded terrain scene. From a
//! last-known point (LKP) and an elapsed time it builds a probability-of-area
//! (POA) surface, folds in clue evidence as it arrives, and checks proposed
//! search tasks against that belief with an entropy-adaptive accept / alert /
//! reject rule plus a battery-budget feasibility gate.
//!
//! Pipeline, end to end:
//!
//! 1. [`terrain`] — load a terrain document into a [`Scene`]: feature
//!    classification with derived edge classes, cluster extraction, and
//!    k-means subdivision into search-sized subclusters.
//! 2. [`reachability`] — travel-time field from the LKP (Dijkstra over the
//!    8-connected grid with slope- and terrain-dependent speeds) mapped to a
//!    reachability weight per cell.
//! 3. [`affinity`] — behavioral attraction weights from distance-decay
//!    kernels around terrain features, with per-person-class presets.
//! 4. [`poa`] — the normalized POA surface `p ∝ R·A`, per-subcluster
//!    candidate scores, and belief updates for presence, directional, and
//!    negative-search evidence.
//! 5. [`decision`] — ratio-to-top, percentile rank, and normalized entropy
//!    per candidate; thresholds interpolate between strict and loose ends as
//!    entropy rises; verdicts are ACCEPT, ALERT, or REJECT.
//! 6. [`cost`] — mission cost estimate (travel + coverage) against a
//!    safety-factored battery budget; failing the check downgrades an ACCEPT
//!    to an ALERT, never the reverse.
//! 7. [`planner`] — replay of recorded clue-analysis records into clue
//!    reports and plan proposals, with the relevance gate.
//! 8. [`harness`] — vignette suites swept over elapsed-time values in
//!    no-update and with-update modes, aggregate decision distributions, and
//!    heatmap export (PGM + GeoJSON).
//!
//! Each stage has a runnable example:
//!
//! ```text
//! cargo run --example build_scene          terrain loading and location queries
//! cargo run --example reachability_sweep   travel time and frontier growth per ET
//! cargo run --example affinity_profiles    person-class presets side by side
//! cargo run --example poa_pipeline         POA build plus a presence-clue update
//! cargo run --example guardrail_decisions  plan verdicts, rationale, cost gate
//! cargo run --example run_vignette_suite   the shipped mini-suite end to end
//! cargo run --example generate_fixtures    regenerates the shipped fixtures
//! ```
//!
//! The `sarguard` binary wraps the same pipeline as subcommands
//! (`terrain build`, `poa compute`, `poa update`, `guard evaluate`,
//! `harness run`, `export heatmap`).

pub mod affinity;
pub mod cost;
pub mod decision;
pub mod error;
pub mod export;
mod geo;
mod grid;
pub mod harness;
mod kmeans;
pub mod planner;
pub mod poa;
pub mod reachability;
pub mod terrain;

pub use affinity::{affinity, default_profile, AffinityField, AffinityProfile, PersonClass};
pub use cost::{estimate_cost, gate_verdicts, CostEstimate, CostParams, CostVerdict, DroneStatus};
pub use decision::{
    decide, evaluate_plan, normalized_entropy, percentile_rank, ratio_to_top, resolve_thresholds,
    CandidateScores, Decision, PlanEvaluation, ResolvedThresholds, ThresholdConfig, ThresholdPair,
    Verdict,
};
pub use error::{Error, Result};
pub use export::{export_heatmap, render_pgm, subclusters_geojson};
pub use geo::LatLon;
pub use harness::{
    aggregate_distribution, execute_cell, load_suite, load_vignette, report_to_string, run_suite,
    run_suite_with, write_report, CellOutcome, CellReport, CellResult, Distribution, Group,
    GroupAggregate, MissionCost, RegionBounds, RunMode, RunReport, SuiteParams, UpdateMode,
    Variant, Vignette, Weather,
};
pub use planner::{
    relevance_gate, scripted_planner, CapRecord, Caption, ClueReport, PlanProposal, PlannerPort,
    ScriptedPlanner, Triage,
};
pub use poa::{
    build_poa, candidate_scores, ClueEvidence, ClueKind, CorridorParams, PoaMap, ProvenanceEntry,
    Relevance,
};
pub use reachability::{
    reachability, travel_time_field, MovementModel, MovementOverrides, ReachabilityField,
    SlopeResponse,
};
pub use terrain::{
    load_scene, load_scene_with, subcluster_partition, Cell, CellRecord, Cluster, FeatureType,
    LocationQueryResult, Scene, SceneOptions, SubCluster, TerrainDocument,
};
