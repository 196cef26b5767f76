//! The full probability-of-area pipeline on one map: reachability times
//! affinity gives the base surface, then three kinds of field evidence
//! reshape it in sequence. Every update is recorded in the map's
//! provenance and reflected in its checksum.

use std::collections::BTreeMap;
use std::path::Path;

use sarguard::reachability::DEFAULT_GAMMA;
use sarguard::{
    affinity, build_poa, default_profile, export_heatmap, load_scene, reachability, ClueEvidence,
    ClueKind, CorridorParams, FeatureType, MovementModel, MovementOverrides, PersonClass, PoaMap,
    Relevance, Scene,
};

fn top(poa: &PoaMap, n: usize) -> Vec<(String, f64)> {
    let mut entries: Vec<_> = poa.q.iter().map(|(id, &s)| (id.clone(), s)).collect();
    entries.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    entries.truncate(n);
    entries
}

fn show(stage: &str, poa: &PoaMap, watch: &str) {
    let mass: f64 = poa.p.iter().sum();
    println!("{stage}");
    println!("  mass {:.12}  checksum {}...", mass, &poa.checksum()[..16]);
    for (id, score) in top(poa, 4) {
        println!("  {:24} q = {:.4}", id, score);
    }
    println!("  {:24} q = {:.6}\n", watch, poa.q.get(watch).copied().unwrap_or(0.0));
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/terrain/riverbend.json");
    let scene: Scene = load_scene(&std::fs::read_to_string(&path)?)?;

    let overrides = MovementOverrides {
        terrain_speed_multiplier: BTreeMap::from([(FeatureType::StreamRiver, 0.0)]),
        ..MovementOverrides::default()
    };
    let model = MovementModel::default().with_overrides(&overrides);
    let profile = default_profile(PersonClass::Hiker);
    let lkp = scene.latlon_of(20.0, 10.0);
    let et = 60.0;

    let reach = reachability(&scene, &model, lkp, et, DEFAULT_GAMMA)?;
    let aff = affinity(&scene, &profile)?;
    let base = build_poa(&scene, &reach, &aff)?;
    // The east bank is cut off, so its shoreline carries nothing yet.
    show("base surface (hiker, ET 60)", &base, "Shoreline-1");

    // A hiker's jacket turns up across the river. Blending in a presence
    // clue re-anchors reachability at the find site, putting real mass on
    // the far bank for the first time.
    let jacket = ClueEvidence {
        location: scene.latlon_of(20.0, 32.0),
        relevance: Relevance::High,
        kind: ClueKind::Presence,
        confidence: 0.9,
        description: "rain jacket snagged in brush on the east bank".into(),
    };
    let reanchor = reachability(&scene, &model, jacket.location, et, DEFAULT_GAMMA)?;
    let after_presence = base.apply_presence_clue(&scene, &jacket, &reanchor, &aff)?;
    show("after the presence clue", &after_presence, "Shoreline-1");

    // Boot prints heading east tighten the surface into a corridor.
    let prints = ClueEvidence {
        location: scene.latlon_of(20.0, 20.0),
        relevance: Relevance::Medium,
        kind: ClueKind::Directional { bearing_deg: 90.0 },
        confidence: 0.8,
        description: "boot prints along the spur, heading east".into(),
    };
    let after_tracks =
        after_presence.apply_directional_clue(&scene, &prints, &CorridorParams::for_scene(&scene))?;
    show("after the directional clue", &after_tracks, "Shoreline-1");

    // A drone sweep of the woodland block comes back empty; discount it.
    let final_map = after_tracks.apply_negative_search(&scene, "Woodland-0", 0.8)?;
    show("after the empty woodland sweep", &final_map, "Woodland-0");

    println!("provenance:");
    for entry in &final_map.provenance {
        println!("  {}", serde_json::to_string(entry)?);
    }

    let out = std::env::temp_dir().join("sarguard_poa_demo");
    std::fs::create_dir_all(&out)?;
    let (pgm, geojson) = export_heatmap(&final_map, &scene, &out.join("riverbend_et60"))?;
    println!("\nheatmap written to {} and {}", pgm.display(), geojson.display());
    Ok(())
}
