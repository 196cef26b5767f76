//! The decision layer from both ends: first the raw math on hand-built
//! score tables, then the full envelope run against two shipped scenarios,
//! including the battery feasibility gate.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sarguard::{
    decide, execute_cell, load_vignette, normalized_entropy, resolve_thresholds, CellOutcome,
    SuiteParams, ThresholdConfig, UpdateMode,
};

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

fn scores(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(id, q)| (id.to_string(), q)).collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = ThresholdConfig::default();

    // A confident surface holds candidates to the strict thresholds; a
    // flat one relaxes them towards the loose end.
    for (label, table) in [
        ("peaked", scores(&[("ridge", 0.70), ("saddle", 0.20), ("scree", 0.10)])),
        ("flat", scores(&[("ridge", 0.36), ("saddle", 0.33), ("scree", 0.31)])),
    ] {
        let h = normalized_entropy(&table)?;
        let resolved = resolve_thresholds(&config, h)?;
        println!(
            "{label} surface: entropy {:.3} -> accept needs rank >= {:.3} and ratio >= {:.3}",
            h, resolved.rank_accept, resolved.ratio_accept,
        );
        for id in ["ridge", "saddle", "scree"] {
            let verdict = decide(&table, id, &config)?;
            println!("  {:7} {:6}  ({})", id, verdict.decision.to_string(), verdict.rationale);
        }
        println!();
    }

    // The same verdicts produced end to end: terrain, last known point,
    // clue gating and update, proposed actions, and per-drone cost checks.
    let params = SuiteParams::default();
    let vignette = load_vignette(&fixture("plans/stage3_scenario.json"))?;
    let scene = vignette.build_scene(0)?;
    let cell = execute_cell(&vignette, &scene, 60.0, UpdateMode::WithUpdate, &params);
    let CellOutcome::Evaluated { verdicts, summary, costs, .. } = &cell.outcome else {
        panic!("scenario did not evaluate: {:?}", cell.outcome);
    };
    println!("{} at ET 60 (summary {}):", vignette.id, summary);
    for v in verdicts {
        println!(
            "  {:12} {:6}  rank {:.3}  ratio {:.3}",
            v.candidate,
            v.decision.to_string(),
            v.rank_percentile,
            v.ratio_to_top,
        );
    }
    for c in costs {
        println!(
            "  {:12} via {}: {:.1} min projected, {:.1} min usable -> {:?}",
            c.action, c.drone_id, c.estimate.total_minutes, c.estimate.usable_minutes,
            c.estimate.verdict,
        );
    }

    // With the battery nearly drained the same quality of candidate is
    // still flagged: the gate demotes the ACCEPT rather than hiding it.
    let vignette = load_vignette(&fixture("plans/causeway_lowbat.json"))?;
    let scene = vignette.build_scene(0)?;
    let cell = execute_cell(&vignette, &scene, 60.0, UpdateMode::WithUpdate, &params);
    let CellOutcome::Evaluated { verdicts, .. } = &cell.outcome else {
        panic!("scenario did not evaluate: {:?}", cell.outcome);
    };
    let v = &verdicts[0];
    println!(
        "\n{}: {} (downgraded: {})\n  {}",
        vignette.id, v.decision, v.resource_downgraded, v.rationale,
    );
    Ok(())
}
