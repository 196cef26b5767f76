//! Regenerates everything under `fixtures/`: terrain documents, the two
//! scenario suites, standalone plan documents, the region metadata stub,
//! and the golden report for the mini suite.
//!
//! The generator is deterministic, so running it twice leaves the tree
//! byte-identical. It also refuses to write fixtures that have drifted
//! from the properties the test suite relies on (the river must actually
//! cut the map in two, clue updates must help vicinity candidates, and
//! so on); if an assertion here fires, the fixture layout needs attention
//! before anything else does.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use sarguard::reachability::DEFAULT_GAMMA;
use sarguard::{
    aggregate_distribution, execute_cell, load_suite, load_vignette, reachability,
    report_to_string, run_suite, CellOutcome, CellRecord, ClueKind, Decision, FeatureType, Group,
    LatLon, RunMode, RunReport, Scene, SceneOptions, SuiteParams, TerrainDocument, UpdateMode,
    Vignette,
};

const SUITE_ETS: [f64; 5] = [10.0, 20.0, 40.0, 60.0, 90.0];

fn fixtures_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn write_json(path: &Path, value: &Value) {
    let mut text = serde_json::to_string_pretty(value).expect("serializable fixture");
    text.push('\n');
    std::fs::write(path, text).unwrap_or_else(|e| panic!("writing {}: {e}", path.display()));
    println!("wrote {}", path.display());
}

fn write_terrain(path: &Path, doc: &TerrainDocument) {
    write_json(path, &serde_json::to_value(doc).expect("serializable terrain"));
}

// ── Terrain builders ────────────────────────────────────────────────────

fn grid_doc(
    rows: usize,
    cols: usize,
    origin: LatLon,
    feature: impl Fn(usize, usize) -> FeatureType,
    elevation: impl Fn(usize, usize) -> f64,
    label: Option<&dyn Fn(usize, usize) -> String>,
) -> TerrainDocument {
    let mut cells = Vec::with_capacity(rows * cols);
    let mut labels = label.map(|_| Vec::with_capacity(rows * cols));
    for r in 0..rows {
        for c in 0..cols {
            cells.push(CellRecord { terrain: feature(r, c), elevation_m: elevation(r, c) });
            if let (Some(ls), Some(f)) = (labels.as_mut(), label) {
                ls.push(f(r, c));
            }
        }
    }
    TerrainDocument {
        schema_version: 1,
        origin,
        cell_size_m: 30.0,
        rows,
        cols,
        cells,
        cluster_labels: labels,
    }
}

/// A north-south river (two cells wide, shoreline on both banks) splitting
/// a 40x48 valley. A trail runs down the west side with a spur towards the
/// west bank; a woodland block and an eastern marsh give the walker
/// something to prefer and avoid.
fn riverbend_feature(r: usize, c: usize) -> FeatureType {
    if (5..=12).contains(&r) && (18..=25).contains(&c) {
        FeatureType::WoodlandInterior
    } else if (4..=13).contains(&r) && (17..=26).contains(&c) {
        FeatureType::WoodlandBoundary
    } else if (25..=32).contains(&r) && (38..=45).contains(&c) {
        FeatureType::MarshWetland
    } else if c == 29 || c == 32 {
        FeatureType::Shoreline
    } else if c == 30 || c == 31 {
        FeatureType::StreamRiver
    } else if c == 10 || (r == 20 && (11..=28).contains(&c)) {
        FeatureType::Trail
    } else {
        FeatureType::OpenLowVegetation
    }
}

fn riverbend_doc() -> TerrainDocument {
    let origin = LatLon { lat: 41.446453, lon: -90.531366 };
    // Valley cross-section: banks at 100 m, rising gently towards both map
    // edges.
    grid_doc(
        40,
        48,
        origin,
        riverbend_feature,
        |_, c| 100.0 + 0.8 * (c as f64 - 30.5).abs(),
        None,
    )
}

/// Two full-width lakes with a walkable isthmus between them; a trail
/// crosses the isthmus with open ground and a shoreline on each bank.
fn twolakes_feature(r: usize, _c: usize) -> FeatureType {
    if r <= 15 || r >= 24 {
        FeatureType::Lake
    } else if r == 16 || r == 23 {
        FeatureType::Shoreline
    } else if r == 19 {
        FeatureType::Trail
    } else {
        FeatureType::OpenLowVegetation
    }
}

fn twolakes_doc() -> TerrainDocument {
    let origin = LatLon { lat: 34.552362, lon: -92.266513 };
    grid_doc(40, 48, origin, twolakes_feature, |r, _| 98.0 + 0.1 * r as f64, None)
}

/// A single trail across open water: the only walkable band, so the trail
/// subcluster holds all the probability mass.
fn causeway_doc() -> TerrainDocument {
    let origin = LatLon { lat: 46.768333, lon: -120.376389 };
    grid_doc(
        12,
        16,
        origin,
        |r, _| if r == 9 { FeatureType::Trail } else { FeatureType::Lake },
        |_, _| 100.0,
        None,
    )
}

/// Hand-labelled clusters: two named trail segments, a small lake, and a
/// large vegetation region that the builder splits further.
fn stage3_doc() -> TerrainDocument {
    let origin = LatLon { lat: 38.956922, lon: -108.333285 };
    let feature = |r: usize, c: usize| {
        if r == 3 {
            FeatureType::Trail
        } else if (7..=10).contains(&r) && (5..=10).contains(&c) {
            FeatureType::Lake
        } else {
            FeatureType::OpenLowVegetation
        }
    };
    let label = |r: usize, c: usize| {
        if r == 3 {
            if c < 8 {
                "Trail-10".to_string()
            } else {
                "Trail-11".to_string()
            }
        } else if (7..=10).contains(&r) && (5..=10).contains(&c) {
            "Lake-5".to_string()
        } else {
            "Low_Vegetation-42".to_string()
        }
    };
    grid_doc(12, 16, origin, feature, |_, c| 100.0 + 0.2 * c as f64, Some(&label))
}

/// 100x100 performance fixture: trail cross, a lake with a shoreline ring,
/// a woodland block, and a rock outcrop on a gentle dome.
fn bigfield_feature(r: usize, c: usize) -> FeatureType {
    if (60..=71).contains(&r) && (20..=31).contains(&c) {
        FeatureType::WoodlandInterior
    } else if (59..=72).contains(&r) && (19..=32).contains(&c) {
        FeatureType::WoodlandBoundary
    } else if (10..=18).contains(&r) && (10..=20).contains(&c) {
        FeatureType::Lake
    } else if (9..=19).contains(&r) && (9..=21).contains(&c) {
        FeatureType::Shoreline
    } else if (20..=25).contains(&r) && (70..=75).contains(&c) {
        FeatureType::RockBarren
    } else if r == 50 || c == 50 {
        FeatureType::Trail
    } else {
        FeatureType::OpenLowVegetation
    }
}

fn bigfield_doc() -> TerrainDocument {
    let origin = LatLon { lat: 34.217358, lon: -118.112756 };
    let elevation = |r: usize, c: usize| {
        let dr = r as f64 - 50.0;
        let dc = c as f64 - 50.0;
        100.0 + 25.0 * (-(dr * dr + dc * dc) / 1800.0).exp()
    };
    grid_doc(100, 100, origin, bigfield_feature, elevation, None)
}

// ── Scenario builders ───────────────────────────────────────────────────

struct Region {
    name: &'static str,
    sw: LatLon,
    ne: LatLon,
}

fn latlon_json(p: LatLon) -> Value {
    json!({ "lat": p.lat, "lon": p.lon })
}

struct ScenarioParams<'a> {
    id: &'a str,
    variant: &'a str,
    terrain_rel: &'a str,
    region: &'a Region,
    person_class: &'a str,
    speed_factor: Option<f64>,
    lkp: (f64, f64),
    weather: Value,
    drones: Vec<(&'a str, f64, (f64, f64))>,
    clue_cell: (f64, f64),
    clue_kind: Value,
    relevance: &'a str,
    confidence: f64,
    description: &'a str,
    caption: (&'a str, &'a str, &'a str),
    rationale: &'a str,
    actions: Vec<&'a str>,
    triage: &'a str,
    movement_overrides: Option<Value>,
}

fn scenario_json(scene: &Scene, params: &ScenarioParams) -> Value {
    let at = |(r, c): (f64, f64)| latlon_json(scene.latlon_of(r, c));
    let clue_location = at(params.clue_cell);
    let mut doc = json!({
        "schema_version": 1,
        "id": params.id,
        "terrain": params.terrain_rel,
        "region": {
            "name": params.region.name,
            "corner_sw": latlon_json(params.region.sw),
            "corner_ne": latlon_json(params.region.ne),
        },
        "person_class": params.person_class,
        "lkp": at(params.lkp),
        "weather": params.weather,
        "drones": params.drones.iter().map(|&(id, battery, cell)| json!({
            "id": id,
            "battery_minutes": battery,
            "position": at(cell),
        })).collect::<Vec<_>>(),
        "clue": {
            "location": clue_location,
            "relevance": params.relevance,
            "kind": params.clue_kind,
            "confidence": params.confidence,
            "description": params.description,
        },
        "cap": {
            "schema_version": 1,
            "caption": {
                "what": params.caption.0,
                "where": params.caption.1,
                "condition": params.caption.2,
            },
            "relevance": params.relevance,
            "rationale": params.rationale,
            "location": clue_location,
            "actions": params.actions,
            "triage": params.triage,
        },
        "variant": params.variant,
    });
    let map = doc.as_object_mut().expect("scenario object");
    if let Some(factor) = params.speed_factor {
        map.insert("profile_speed_factor".into(), json!(factor));
    }
    if let Some(overrides) = &params.movement_overrides {
        map.insert("movement_overrides".into(), overrides.clone());
    }
    doc
}

fn riverbend_vignettes(scene: &Scene, region: &Region) -> Vec<(String, Value)> {
    let weather = json!({ "light": "day", "weather": "overcast", "temp_c": 16.0 });
    // The river is too deep to ford anywhere on this stretch.
    let no_ford = json!({ "terrain_speed_multiplier": { "Stream_River": 0.0 } });
    let drones = vec![("uav-1", 30.0, (22.0, 6.0)), ("uav-2", 22.0, (18.0, 14.0))];
    let presence = json!({ "type": "presence" });

    let base = |id: &'static str,
                variant: &'static str,
                clue_cell: (f64, f64),
                relevance: &'static str| ScenarioParams {
        id,
        variant,
        terrain_rel: "../terrain/riverbend.json",
        region,
        person_class: "hiker",
        speed_factor: None,
        lkp: (20.0, 10.0),
        weather: weather.clone(),
        drones: drones.clone(),
        clue_cell,
        clue_kind: presence.clone(),
        relevance,
        confidence: 0.9,
        description: "scuffed water bottle in the grass",
        caption: ("water bottle", "beside the trail", "recently dropped"),
        rationale: "matches the kit a day hiker would carry",
        actions: vec!["Trail-0"],
        triage: "CurrentDrone",
        movement_overrides: Some(no_ford.clone()),
    };

    let mut specs = Vec::new();
    specs.push(base("riverbend_v0", "V0", (20.0, 10.0), "High"));

    let mut v1 = base("riverbend_v1", "V1", (28.0, 10.0), "High");
    v1.triage = "DronePool";
    specs.push(v1);

    let mut v2 = base("riverbend_v2", "V2", (22.0, 12.0), "Low");
    v2.description = "faded snack wrapper, weathered";
    v2.caption = ("snack wrapper", "in open grass", "sun-bleached, weeks old");
    v2.rationale = "too old to relate to this search";
    specs.push(v2);

    let mut v3 = base("riverbend_v3", "V3", (28.0, 10.0), "High");
    v3.drones = vec![("uav-1", 1.2, (22.0, 6.0))];
    specs.push(v3);

    let mut v4 = base("riverbend_v4", "V4", (8.0, 21.0), "High");
    v4.clue_kind = json!({ "type": "negative_search", "subcluster_id": "Woodland-0" });
    v4.confidence = 1.0;
    v4.description = "woodland block swept, no sign found";
    v4.caption = ("completed sweep", "over the woodland block", "no detections");
    v4.rationale = "clear the searched block and move on";
    specs.push(v4);

    let mut v5 = base("riverbend_v5", "V5", (20.0, 32.0), "High");
    v5.description = "jacket snagged on the east bank";
    v5.caption = ("rain jacket", "on the far bank", "wet, caught in brush");
    v5.rationale = "the subject may have crossed upstream of the mapped reach";
    v5.actions = vec!["Shoreline-1", "Marsh_Wetland-0"];
    v5.triage = "DronePool";
    specs.push(v5);

    let mut v6 = base("riverbend_v6", "V6", (20.0, 20.0), "High");
    v6.clue_kind = json!({ "type": "directional", "bearing_deg": 90.0 });
    v6.confidence = 0.8;
    v6.description = "boot prints heading east along the spur";
    v6.caption = ("boot prints", "on the spur trail", "fresh, heading east");
    v6.rationale = "tracks point towards the west bank";
    v6.actions = vec!["Shoreline-0"];
    v6.triage = "DronePool";
    specs.push(v6);

    specs.iter().map(|s| (format!("{}.json", s.id), scenario_json(scene, s))).collect()
}

fn twolakes_vignettes(scene: &Scene, region: &Region) -> Vec<(String, Value)> {
    let weather = json!({ "light": "day", "weather": "clear", "temp_c": 24.0 });
    let drones = vec![("uav-1", 30.0, (19.0, 2.0)), ("uav-2", 22.0, (21.0, 44.0))];
    let presence = json!({ "type": "presence" });

    let base = |id: &'static str,
                variant: &'static str,
                clue_cell: (f64, f64),
                relevance: &'static str| ScenarioParams {
        id,
        variant,
        terrain_rel: "../terrain/twolakes.json",
        region,
        person_class: "child",
        speed_factor: Some(0.6),
        lkp: (19.0, 4.0),
        weather: weather.clone(),
        drones: drones.clone(),
        clue_cell,
        clue_kind: presence.clone(),
        relevance,
        confidence: 0.9,
        description: "small canvas shoe at the path edge",
        caption: ("canvas shoe", "on the isthmus trail", "dry, recently lost"),
        rationale: "child-sized, consistent with the subject",
        actions: vec!["Trail-0"],
        triage: "CurrentDrone",
        movement_overrides: None,
    };

    let mut specs = Vec::new();
    specs.push(base("twolakes_v0", "V0", (19.0, 4.0), "High"));

    let mut v1 = base("twolakes_v1", "V1", (19.0, 14.0), "High");
    v1.actions = vec!["Trail-0", "Shoreline-0"];
    v1.triage = "DronePool";
    specs.push(v1);

    let mut v2 = base("twolakes_v2", "V2", (21.0, 10.0), "Low");
    v2.description = "bottle cap, heavily corroded";
    v2.caption = ("bottle cap", "in isthmus grass", "rusted through");
    v2.rationale = "debris predating the search";
    specs.push(v2);

    let mut v3 = base("twolakes_v3", "V3", (19.0, 14.0), "High");
    v3.drones = vec![("uav-1", 1.2, (19.0, 2.0))];
    v3.actions = vec!["Shoreline-0"];
    specs.push(v3);

    let mut v4 = base("twolakes_v4", "V4", (16.0, 23.0), "High");
    v4.clue_kind = json!({ "type": "negative_search", "subcluster_id": "Shoreline-0" });
    v4.confidence = 1.0;
    v4.description = "north shoreline swept, no sign found";
    v4.caption = ("completed sweep", "along the north shoreline", "no detections");
    v4.rationale = "clear the swept bank and redirect";
    v4.actions = vec!["Trail-0", "Shoreline-1"];
    v4.triage = "HumanVet";
    specs.push(v4);

    let mut v5 = base("twolakes_v5", "V5", (16.0, 38.0), "High");
    v5.description = "sun hat floating near the east end";
    v5.caption = ("sun hat", "at the waterline, far east", "afloat near the bank");
    v5.rationale = "much farther along the shore than expected";
    v5.actions = vec!["Shoreline-0"];
    v5.triage = "DronePool";
    specs.push(v5);

    let mut v6 = base("twolakes_v6", "V6", (19.0, 30.0), "High");
    v6.clue_kind = json!({ "type": "directional", "bearing_deg": 0.0 });
    v6.confidence = 0.8;
    v6.description = "witness saw the child walking towards the north lake";
    v6.caption = ("witness sighting", "on the trail, mid-isthmus", "moving north");
    v6.rationale = "track the reported heading to the north shore";
    v6.actions = vec!["Shoreline-0"];
    v6.triage = "DronePool";
    specs.push(v6);

    specs.iter().map(|s| (format!("{}.json", s.id), scenario_json(scene, s))).collect()
}

// ── Validation ──────────────────────────────────────────────────────────

fn severity(d: Decision) -> u8 {
    match d {
        Decision::Accept => 0,
        Decision::Alert => 1,
        Decision::Reject => 2,
    }
}

/// The riverbend must be split in two: every cell east of the river
/// unreachable, every west-side mirror cell comfortably reachable.
fn check_river_barrier(vignette: &Vignette) {
    let scene = vignette.build_scene(0).expect("riverbend scene");
    let model = vignette.movement_model().expect("movement model");
    let reach =
        reachability(&scene, &model, vignette.lkp, 60.0, DEFAULT_GAMMA).expect("reachability");
    for r in 0..scene.rows {
        for c in 32..scene.cols {
            let east = reach.r_value[scene.index(r, c)];
            assert_eq!(east, 0.0, "cell ({r},{c}) east of the river is reachable");
            let mirror = 61 - c;
            let west = reach.r_value[scene.index(r, mirror)];
            assert!(
                west > 0.05,
                "mirror cell ({r},{mirror}) should be reachable, R = {west}"
            );
        }
    }
    println!("checked: river partitions the map; west mirrors all have R > 0.05");
}

/// Clue updates must never make things worse for candidates at the clue:
/// severity under with_update <= severity under no_update for every plan
/// action inside the clue's vicinity, at every elapsed time.
fn check_vicinity_dominance(vignettes: &[Vignette]) {
    let params = SuiteParams::default();
    let mut compared = 0usize;
    for vignette in vignettes {
        if matches!(vignette.clue.kind, ClueKind::NegativeSearch { .. }) {
            continue; // reduces mass where it struck out, by design
        }
        let scene = vignette.build_scene(0).expect("scene");
        for &et in &SUITE_ETS {
            let plain = execute_cell(vignette, &scene, et, UpdateMode::NoUpdate, &params);
            let updated = execute_cell(vignette, &scene, et, UpdateMode::WithUpdate, &params);
            match (&plain.outcome, &updated.outcome) {
                (
                    CellOutcome::Evaluated { verdicts: before, clue_vicinity, .. },
                    CellOutcome::Evaluated { verdicts: after, .. },
                ) => {
                    for (b, a) in before.iter().zip(after) {
                        if clue_vicinity.contains(&b.candidate) {
                            assert!(
                                severity(a.decision) <= severity(b.decision),
                                "{} at ET {et}: {} degraded {:?} -> {:?} after the update",
                                vignette.id,
                                b.candidate,
                                b.decision,
                                a.decision,
                            );
                            compared += 1;
                        }
                    }
                }
                (CellOutcome::Skipped { .. }, CellOutcome::Skipped { .. }) => {}
                (b, a) => panic!("{} at ET {et}: unexpected outcomes {b:?} / {a:?}", vignette.id),
            }
        }
    }
    println!("checked: update never hurt a vicinity candidate ({compared} comparisons)");
}

/// The mini suite must show the headline pattern: updates raise the accept
/// share near the clue, and the displaced-clue group is rejected more often
/// than the near-clue group when no update is applied.
fn check_mini_suite_pattern(vignettes: &[Vignette]) -> RunReport {
    let report = run_suite(vignettes, &SUITE_ETS, RunMode::Both, 0).expect("mini suite run");

    let accept_share = |update: UpdateMode| -> f64 {
        let mut accepts = 0usize;
        let mut total = 0usize;
        for cell in &report.cells {
            if cell.update_mode != update {
                continue;
            }
            if let CellOutcome::Evaluated { verdicts, clue_vicinity, .. } = &cell.outcome {
                for v in verdicts {
                    if clue_vicinity.contains(&v.candidate) {
                        total += 1;
                        accepts += usize::from(v.decision == Decision::Accept);
                    }
                }
            }
        }
        assert!(total > 0, "no vicinity candidates in the mini suite");
        accepts as f64 / total as f64
    };
    let before = accept_share(UpdateMode::NoUpdate);
    let after = accept_share(UpdateMode::WithUpdate);
    assert!(
        after >= before,
        "vicinity accept share fell after updates: {before:.3} -> {after:.3}"
    );

    let g1 = aggregate_distribution(&report, Group::One, UpdateMode::NoUpdate).expect("group 1");
    let g2 = aggregate_distribution(&report, Group::Two, UpdateMode::NoUpdate).expect("group 2");
    assert!(
        g2.reject_pct > g1.reject_pct,
        "expected the displaced-clue group to be rejected more: {} vs {}",
        g2.reject_pct,
        g1.reject_pct,
    );
    println!(
        "checked: vicinity accept share {:.0}% -> {:.0}%; no-update reject share {:.0}% vs {:.0}%",
        100.0 * before,
        100.0 * after,
        g1.reject_pct,
        g2.reject_pct,
    );
    report
}

fn check_suite_runs_clean(vignettes: &[Vignette]) {
    let report = run_suite(vignettes, &SUITE_ETS, RunMode::Both, 0).expect("full suite run");
    for cell in &report.cells {
        match &cell.outcome {
            CellOutcome::Failed { error } => {
                panic!("{} at ET {}: {error}", cell.vignette_id, cell.et_minutes)
            }
            CellOutcome::Skipped { .. } => assert_eq!(
                cell.group,
                Group::Control,
                "{} skipped but is not a control vignette",
                cell.vignette_id
            ),
            CellOutcome::Evaluated { .. } => assert_ne!(
                cell.group,
                Group::Control,
                "control vignette {} reached the envelope",
                cell.vignette_id
            ),
        }
    }
    println!("checked: full suite runs with no failed cells; controls all skipped");
}

// ── Main ────────────────────────────────────────────────────────────────

fn main() {
    let root = fixtures_root();
    for sub in ["terrain", "mini_suite", "vignette_suite", "plans", "golden"] {
        std::fs::create_dir_all(root.join(sub)).expect("fixture directories");
    }

    // Region boxes: named search areas with their published corner
    // coordinates; the synthetic grids are anchored at each box's
    // south-west corner.
    let regions = [
        Region {
            name: "Rock River, Illinois",
            sw: LatLon { lat: 41.446453, lon: -90.531366 },
            ne: LatLon { lat: 41.470261, lon: -90.403751 },
        },
        Region {
            name: "Kittitas, Washington",
            sw: LatLon { lat: 46.768333, lon: -120.376389 },
            ne: LatLon { lat: 46.822778, lon: -120.234444 },
        },
        Region {
            name: "Mesa County, Colorado",
            sw: LatLon { lat: 38.956922, lon: -108.333285 },
            ne: LatLon { lat: 38.962223, lon: -108.314291 },
        },
        Region {
            name: "Pulaski, Arkansas",
            sw: LatLon { lat: 34.552362, lon: -92.266513 },
            ne: LatLon { lat: 34.590254, lon: -92.189868 },
        },
        Region {
            name: "Los Angeles, California",
            sw: LatLon { lat: 34.217358, lon: -118.112756 },
            ne: LatLon { lat: 34.265727, lon: -118.048056 },
        },
    ];
    write_json(
        &root.join("regions.json"),
        &json!({
            "schema_version": 1,
            "regions": regions.iter().map(|r| json!({
                "name": r.name,
                "corner_sw": latlon_json(r.sw),
                "corner_ne": latlon_json(r.ne),
            })).collect::<Vec<_>>(),
        }),
    );

    // Terrain documents.
    let riverbend = riverbend_doc();
    let twolakes = twolakes_doc();
    let causeway = causeway_doc();
    let stage3 = stage3_doc();
    let bigfield = bigfield_doc();
    write_terrain(&root.join("terrain/riverbend.json"), &riverbend);
    write_terrain(&root.join("terrain/twolakes.json"), &twolakes);
    write_terrain(&root.join("terrain/causeway.json"), &causeway);
    write_terrain(&root.join("terrain/stage3.json"), &stage3);
    write_terrain(&root.join("terrain/bigfield.json"), &bigfield);

    let options = SceneOptions::default();
    let riverbend_scene = Scene::from_document(&riverbend, &options).expect("riverbend scene");
    let twolakes_scene = Scene::from_document(&twolakes, &options).expect("twolakes scene");
    let causeway_scene = Scene::from_document(&causeway, &options).expect("causeway scene");
    let stage3_scene = Scene::from_document(&stage3, &options).expect("stage3 scene");
    let bigfield_scene = Scene::from_document(&bigfield, &options).expect("bigfield scene");

    // The subcluster ids the scenarios reference must come out of the
    // builder exactly as written, independent of the clustering seed.
    for (scene, ids) in [
        (
            &riverbend_scene,
            vec![
                "Trail-0",
                "Shoreline-0",
                "Shoreline-1",
                "Woodland-0",
                "Woodland_Boundary-0",
                "Marsh_Wetland-0",
            ],
        ),
        (&twolakes_scene, vec!["Trail-0", "Shoreline-0", "Shoreline-1"]),
        (&causeway_scene, vec!["Trail-0"]),
        (&stage3_scene, vec!["Trail-10", "Trail-11", "Lake-5"]),
        (&bigfield_scene, vec!["Rock_Barren-0", "Shoreline-0", "Woodland_Boundary-0"]),
    ] {
        for id in ids {
            scene.subcluster(id).unwrap_or_else(|e| panic!("expected subcluster {id}: {e}"));
        }
    }
    // Shoreline numbering on the riverbend: 0 = west bank, 1 = east bank.
    let east = riverbend_scene.subcluster("Shoreline-1").expect("east bank");
    assert!(
        east.cell_indices.iter().all(|&i| i % riverbend_scene.cols == 32),
        "Shoreline-1 is not the east bank"
    );

    // Scenario suites.
    let riv_region = &regions[0];
    let lakes_region = &regions[3];
    let mini_ids = ["riverbend_v1.json", "riverbend_v5.json"];
    for (name, value) in riverbend_vignettes(&riverbend_scene, riv_region) {
        write_json(&root.join("vignette_suite").join(&name), &value);
        if mini_ids.contains(&name.as_str()) {
            write_json(&root.join("mini_suite").join(&name), &value);
        }
    }
    for (name, value) in twolakes_vignettes(&twolakes_scene, lakes_region) {
        write_json(&root.join("vignette_suite").join(&name), &value);
    }

    // Standalone plan documents.
    let stage3_params = ScenarioParams {
        id: "stage3_replay",
        variant: "V1",
        terrain_rel: "../terrain/stage3.json",
        region: &regions[2],
        person_class: "hiker",
        speed_factor: None,
        lkp: (3.0, 2.0),
        weather: json!({ "light": "day", "weather": "clear", "temp_c": 19.0 }),
        drones: vec![("uav-1", 25.0, (5.0, 3.0)), ("uav-2", 18.0, (1.0, 12.0))],
        clue_cell: (3.0, 12.0),
        clue_kind: json!({ "type": "presence" }),
        relevance: "High",
        confidence: 0.9,
        description: "blue windbreaker draped over a stump",
        caption: ("windbreaker", "near the east trail segment", "dry, recently placed"),
        rationale: "matches the subject's outer layer",
        actions: vec!["Trail-10", "Trail-11", "Lake-5"],
        triage: "HumanVet",
        movement_overrides: None,
    };
    write_json(&root.join("plans/stage3_scenario.json"), &scenario_json(&stage3_scene, &stage3_params));

    let causeway_params = ScenarioParams {
        id: "causeway_lowbat",
        variant: "V3",
        terrain_rel: "../terrain/causeway.json",
        region: &regions[1],
        person_class: "hiker",
        speed_factor: None,
        lkp: (9.0, 2.0),
        weather: json!({ "light": "dusk", "weather": "wind", "temp_c": 11.0 }),
        drones: vec![("uav-1", 0.4, (11.0, 0.0))],
        clue_cell: (9.0, 12.0),
        clue_kind: json!({ "type": "presence" }),
        relevance: "High",
        confidence: 0.9,
        description: "trekking pole leaning on the causeway rail",
        caption: ("trekking pole", "on the causeway", "upright, recently set down"),
        rationale: "the subject passed this way on foot",
        actions: vec!["Trail-0"],
        triage: "CurrentDrone",
        movement_overrides: None,
    };
    write_json(
        &root.join("plans/causeway_lowbat.json"),
        &scenario_json(&causeway_scene, &causeway_params),
    );

    let bigfield_params = ScenarioParams {
        id: "bigfield_sweep",
        variant: "V1",
        terrain_rel: "../terrain/bigfield.json",
        region: &regions[4],
        person_class: "elderly",
        speed_factor: Some(0.7),
        lkp: (50.0, 50.0),
        weather: json!({ "light": "day", "weather": "hot", "temp_c": 31.0 }),
        drones: vec![("uav-1", 40.0, (52.0, 48.0)), ("uav-2", 35.0, (30.0, 60.0))],
        clue_cell: (50.0, 60.0),
        clue_kind: json!({ "type": "presence" }),
        relevance: "High",
        confidence: 0.9,
        description: "walking stick dropped on the trail",
        caption: ("walking stick", "east of the junction", "lying across the path"),
        rationale: "the subject uses one and would not leave it willingly",
        actions: vec!["Rock_Barren-0", "Shoreline-0"],
        triage: "DronePool",
        movement_overrides: None,
    };
    write_json(
        &root.join("plans/bigfield_scenario.json"),
        &scenario_json(&bigfield_scene, &bigfield_params),
    );

    // Validate everything by loading it back through the public API.
    let mini = load_suite(&root.join("mini_suite")).expect("mini suite loads");
    assert_eq!(mini.len(), 2);
    let suite = load_suite(&root.join("vignette_suite")).expect("full suite loads");
    assert_eq!(suite.len(), 14);
    for plan in ["stage3_scenario", "causeway_lowbat", "bigfield_scenario"] {
        load_vignette(&root.join(format!("plans/{plan}.json")))
            .unwrap_or_else(|e| panic!("{plan} loads: {e}"));
    }

    check_river_barrier(&mini[1]);
    check_suite_runs_clean(&suite);
    check_vicinity_dominance(&suite);
    let report = check_mini_suite_pattern(&mini);

    // The causeway plan is the canonical feasibility-gate demo: a clear
    // top candidate held back only by the battery.
    let causeway_vignette =
        load_vignette(&root.join("plans/causeway_lowbat.json")).expect("causeway loads");
    let causeway_scene = causeway_vignette.build_scene(0).expect("causeway scene");
    let cell = execute_cell(
        &causeway_vignette,
        &causeway_scene,
        60.0,
        UpdateMode::WithUpdate,
        &SuiteParams::default(),
    );
    let CellOutcome::Evaluated { verdicts, .. } = &cell.outcome else {
        panic!("causeway cell did not evaluate: {:?}", cell.outcome);
    };
    assert_eq!(verdicts[0].decision, Decision::Alert, "{:?}", verdicts[0]);
    assert!(verdicts[0].resource_downgraded);
    println!("checked: causeway plan is demoted by the feasibility gate");

    // Golden report for the mini suite, written last so it reflects the
    // fixtures above.
    let golden = root.join("golden/mini_suite_report.json");
    std::fs::write(&golden, report_to_string(&report).expect("report text"))
        .expect("golden report");
    println!("wrote {}", golden.display());
}
