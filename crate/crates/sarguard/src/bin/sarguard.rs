//! Command-line front end for the search-guardrail pipeline.
//!
//! Exit codes: 0 on success, 1 when inputs fail to load or validate
//! (including usage errors), 2 when a computation or output step fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use sarguard::harness::{self, CellOutcome, CellReport, RunMode, SuiteParams, UpdateMode};
use sarguard::poa::ClueKind;
use sarguard::reachability::DEFAULT_GAMMA;
use sarguard::{
    affinity, build_poa, export_heatmap, load_scene_with, reachability, AffinityProfile,
    ClueEvidence, CorridorParams, Error, PoaMap, Scene, SceneOptions, Vignette,
};

#[derive(Parser)]
#[command(
    name = "sarguard",
    version,
    about = "Probability-of-area surfaces and plan guardrails for wilderness search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Terrain documents.
    #[command(subcommand)]
    Terrain(TerrainCmd),
    /// Probability-of-area surfaces.
    #[command(subcommand)]
    Poa(PoaCmd),
    /// Plan guardrails.
    #[command(subcommand)]
    Guard(GuardCmd),
    /// Vignette suites.
    #[command(subcommand)]
    Harness(HarnessCmd),
    /// Renderings of computed surfaces.
    #[command(subcommand)]
    Export(ExportCmd),
}

#[derive(Subcommand)]
enum TerrainCmd {
    /// Validate a terrain document and print the derived scene structure.
    Build {
        /// Terrain document (JSON).
        doc: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the summary here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario document (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Elapsed time since the last known point, minutes.
    #[arg(long)]
    et: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum PoaCmd {
    /// Build the surface for a scenario at one elapsed time.
    Compute {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output surface file.
        #[arg(long, default_value = "poa.json")]
        out: PathBuf,
    },
    /// Fold a clue into an existing surface.
    Update {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Surface produced by `poa compute`.
        #[arg(long)]
        poa: PathBuf,
        /// Clue evidence file; defaults to the scenario's clue.
        #[arg(long)]
        clue: Option<PathBuf>,
        #[arg(long, default_value = "poa_updated.json")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum GuardCmd {
    /// Judge a recorded plan against the scenario's belief.
    Evaluate {
        /// Scenario document carrying the clue and the recorded plan.
        #[arg(long)]
        plan: PathBuf,
        /// Judge against the pre-clue surface.
        #[arg(long)]
        no_update: bool,
        #[arg(long, default_value_t = 60.0)]
        et: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the verdict document here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum HarnessCmd {
    /// Sweep a suite of scenarios across elapsed times.
    Run {
        /// Directory of scenario documents.
        #[arg(long)]
        suite: PathBuf,
        /// Elapsed times to sweep, comma separated.
        #[arg(long, default_value = "10,20,40,60,90")]
        ets: String,
        /// no_update, with_update, or both.
        #[arg(long, default_value = "both")]
        mode: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for the report and heatmaps.
        #[arg(long, default_value = "harness_out")]
        out: PathBuf,
        /// Skip heatmap rendering.
        #[arg(long)]
        no_heatmaps: bool,
    },
}

#[derive(Subcommand)]
enum ExportCmd {
    /// Render a computed surface as a graymap and a GeoJSON overlay.
    Heatmap {
        /// Surface file from `poa compute` or `poa update`.
        #[arg(long)]
        poa: PathBuf,
        /// Terrain document the surface was computed on.
        #[arg(long)]
        terrain: PathBuf,
        /// Output stem; writes <stem>.pgm and <stem>.geojson.
        #[arg(long, default_value = "heatmap")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

// ── Exit-code plumbing ──────────────────────────────────────────────────

enum Stage {
    Input,
    Execution,
}

struct Failure {
    stage: Stage,
    error: Error,
}

type CliResult<T> = Result<T, Failure>;

trait StageExt<T> {
    fn input(self) -> CliResult<T>;
    fn execution(self) -> CliResult<T>;
}

impl<T> StageExt<T> for sarguard::Result<T> {
    fn input(self) -> CliResult<T> {
        self.map_err(|error| Failure { stage: Stage::Input, error })
    }

    fn execution(self) -> CliResult<T> {
        self.map_err(|error| Failure { stage: Stage::Execution, error })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let ok = matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = err.print();
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.error);
            match failure.stage {
                Stage::Input => ExitCode::from(1),
                Stage::Execution => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Terrain(TerrainCmd::Build { doc, seed, out }) => terrain_build(&doc, seed, out),
        Command::Poa(PoaCmd::Compute { scenario, out }) => poa_compute(&scenario, &out),
        Command::Poa(PoaCmd::Update { scenario, poa, clue, out }) => {
            poa_update(&scenario, &poa, clue.as_deref(), &out)
        }
        Command::Guard(GuardCmd::Evaluate { plan, no_update, et, seed, out }) => {
            guard_evaluate(&plan, no_update, et, seed, out)
        }
        Command::Harness(HarnessCmd::Run { suite, ets, mode, seed, out, no_heatmaps }) => {
            harness_run(&suite, &ets, &mode, seed, &out, no_heatmaps)
        }
        Command::Export(ExportCmd::Heatmap { poa, terrain, out, seed }) => {
            export_cmd(&poa, &terrain, &out, seed)
        }
    }
}

// ── Shared helpers ──────────────────────────────────────────────────────

fn read_file(path: &Path) -> sarguard::Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn parse_file<T: serde::de::DeserializeOwned>(path: &Path) -> sarguard::Result<T> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|source| Error::Parse { path: path.to_path_buf(), source })
}

fn write_text(path: &Path, text: &str) -> sarguard::Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn validate_et(et: f64) -> sarguard::Result<()> {
    if !(et.is_finite() && et > 0.0) {
        return Err(Error::invalid(format!("elapsed time {et} must be positive")));
    }
    Ok(())
}

fn pretty(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    text
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => write_text(path, text).execution(),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Rebuild the surface a scenario implies at one elapsed time.
fn scenario_poa(vignette: &Vignette, scene: &Scene, et: f64) -> sarguard::Result<PoaMap> {
    let model = vignette.movement_model()?;
    let profile = AffinityProfile::preset_for(vignette.person_class, scene.cell_size_m);
    let reach = reachability(scene, &model, vignette.lkp, et, DEFAULT_GAMMA)?;
    let aff = affinity(scene, &profile)?;
    build_poa(scene, &reach, &aff)
}

fn top_candidates(poa: &PoaMap, n: usize) -> Vec<(String, f64)> {
    let mut entries: Vec<(String, f64)> =
        poa.q.iter().map(|(k, &v)| (k.clone(), v)).collect();
    entries.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite scores").then(a.0.cmp(&b.0)));
    entries.truncate(n);
    entries
}

// ── Commands ────────────────────────────────────────────────────────────

fn terrain_build(doc: &Path, seed: Option<u64>, out: Option<PathBuf>) -> CliResult<()> {
    let text = read_file(doc).input()?;
    let options = SceneOptions { seed: seed.unwrap_or(0), ..SceneOptions::default() };
    let scene = load_scene_with(&text, &options).input()?;
    let summary = json!({
        "rows": scene.rows,
        "cols": scene.cols,
        "cell_size_m": scene.cell_size_m,
        "cells": scene.cells.len(),
        "clusters": scene.clusters.iter().map(|c| json!({
            "id": c.id,
            "feature_type": c.feature_type.label(),
            "cells": c.cell_indices.len(),
        })).collect::<Vec<_>>(),
        "subclusters": scene.subclusters.iter().map(|s| json!({
            "id": s.id,
            "cluster_id": s.cluster_id,
            "cells": s.cell_indices.len(),
            "centroid": { "row": s.centroid.0, "col": s.centroid.1 },
        })).collect::<Vec<_>>(),
    });
    emit(out.as_deref(), &pretty(&summary))
}

fn poa_compute(args: &ScenarioArgs, out: &Path) -> CliResult<()> {
    let vignette = harness::load_vignette(&args.scenario).input()?;
    validate_et(args.et).input()?;
    let scene = vignette.build_scene(args.seed).execution()?;
    let poa = scenario_poa(&vignette, &scene, args.et).execution()?;
    let mut text = serde_json::to_string_pretty(&poa).map_err(Error::from).execution()?;
    text.push('\n');
    write_text(out, &text).execution()?;
    println!("wrote {} (checksum {})", out.display(), poa.checksum());
    for (id, q) in top_candidates(&poa, 5) {
        println!("  {id}: {q:.4}");
    }
    Ok(())
}

fn poa_update(
    args: &ScenarioArgs,
    poa_path: &Path,
    clue_path: Option<&Path>,
    out: &Path,
) -> CliResult<()> {
    let vignette = harness::load_vignette(&args.scenario).input()?;
    validate_et(args.et).input()?;
    let base: PoaMap = parse_file(poa_path).input()?;
    let clue: ClueEvidence = match clue_path {
        Some(path) => parse_file(path).input()?,
        None => vignette.clue.clone(),
    };
    clue.validate().input()?;

    let scene = vignette.build_scene(args.seed).execution()?;
    if base.p.len() != scene.cells.len() {
        return Err(Error::invalid(format!(
            "surface has {} cells but the scene has {}",
            base.p.len(),
            scene.cells.len()
        )))
        .input();
    }
    let updated = match &clue.kind {
        ClueKind::Presence => {
            let model = vignette.movement_model().execution()?;
            let profile = AffinityProfile::preset_for(vignette.person_class, scene.cell_size_m);
            let reanchor =
                reachability(&scene, &model, clue.location, args.et, DEFAULT_GAMMA).execution()?;
            let aff = affinity(&scene, &profile).execution()?;
            base.apply_presence_clue(&scene, &clue, &reanchor, &aff).execution()?
        }
        ClueKind::Directional { .. } => base
            .apply_directional_clue(&scene, &clue, &CorridorParams::for_scene(&scene))
            .execution()?,
        ClueKind::NegativeSearch { subcluster_id } => base
            .apply_negative_search(&scene, subcluster_id, sarguard::poa::DEFAULT_DETECTION_PROB)
            .execution()?,
    };
    let mut text = serde_json::to_string_pretty(&updated).map_err(Error::from).execution()?;
    text.push('\n');
    write_text(out, &text).execution()?;
    println!("wrote {} (checksum {})", out.display(), updated.checksum());
    Ok(())
}

fn guard_evaluate(
    plan: &Path,
    no_update: bool,
    et: f64,
    seed: u64,
    out: Option<PathBuf>,
) -> CliResult<()> {
    let vignette = harness::load_vignette(plan).input()?;
    validate_et(et).input()?;
    let scene = vignette.build_scene(seed).execution()?;
    let update = if no_update { UpdateMode::NoUpdate } else { UpdateMode::WithUpdate };
    let result = harness::execute_cell(&vignette, &scene, et, update, &SuiteParams::default());
    if let CellOutcome::Failed { error } = &result.outcome {
        return Err(Error::invalid(error.clone())).execution();
    }
    let report = CellReport {
        vignette_id: vignette.id.clone(),
        variant: vignette.variant,
        group: vignette.group(),
        et_minutes: et,
        update_mode: update,
        outcome: result.outcome,
    };
    let value = serde_json::to_value(&report).map_err(Error::from).execution()?;
    emit(out.as_deref(), &pretty(&json!({ "schema_version": 1, "evaluation": value })))
}

fn harness_run(
    suite: &Path,
    ets_text: &str,
    mode_text: &str,
    seed: u64,
    out: &Path,
    no_heatmaps: bool,
) -> CliResult<()> {
    let vignettes = harness::load_suite(suite).input()?;
    let mode: RunMode = mode_text.parse().input()?;
    let mut ets = Vec::new();
    for part in ets_text.split(',') {
        let et: f64 = part
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad elapsed-time value `{part}`")))
            .input()?;
        validate_et(et).input()?;
        ets.push(et);
    }

    let report = harness::run_suite(&vignettes, &ets, mode, seed).execution()?;
    std::fs::create_dir_all(out)
        .map_err(|source| Error::Io { path: out.to_path_buf(), source })
        .execution()?;
    let report_path = out.join("report.json");
    harness::write_report(&report, &report_path).execution()?;
    println!("wrote {}", report_path.display());

    if !no_heatmaps {
        let params = SuiteParams::default();
        let mut scenes: std::collections::BTreeMap<PathBuf, Scene> = Default::default();
        let mut rendered = 0usize;
        for v in &vignettes {
            if !scenes.contains_key(&v.terrain_path) {
                scenes.insert(v.terrain_path.clone(), v.build_scene(seed).execution()?);
            }
            let scene = &scenes[&v.terrain_path];
            for &et in &ets {
                for &update in mode.update_modes() {
                    let result = harness::execute_cell(v, scene, et, update, &params);
                    let Some(poa) = result.poa else { continue };
                    let stem = out.join(format!("{}_et{}_{}", v.id, et, update));
                    export_heatmap(&poa, scene, &stem).execution()?;
                    rendered += 1;
                }
            }
        }
        println!("rendered {rendered} heatmaps into {}", out.display());
    }

    for aggregate in &report.aggregates {
        let d = aggregate.distribution;
        println!(
            "{} {}: accept {:.1}% alert {:.1}% reject {:.1}% over {} candidates",
            aggregate.group,
            aggregate.update_mode,
            d.accept_pct,
            d.alert_pct,
            d.reject_pct,
            d.candidates
        );
    }
    Ok(())
}

fn export_cmd(poa: &Path, terrain: &Path, out: &Path, seed: u64) -> CliResult<()> {
    let map: PoaMap = parse_file(poa).input()?;
    let text = read_file(terrain).input()?;
    let scene =
        load_scene_with(&text, &SceneOptions { seed, ..SceneOptions::default() }).input()?;
    let (pgm, geojson) = export_heatmap(&map, &scene, out).execution()?;
    println!("wrote {}", pgm.display());
    println!("wrote {}", geojson.display());
    Ok(())
}
