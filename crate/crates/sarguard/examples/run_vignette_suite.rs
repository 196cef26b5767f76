//! Run the shipped vignette suite through the harness: every scenario at
//! five elapsed times, with and without its clue update, then compare the
//! verdict mix across reporting groups.

use std::path::Path;

use sarguard::{
    aggregate_distribution, export_heatmap, load_suite, run_suite, CellOutcome, Group, RunMode,
    UpdateMode, write_report,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let suite_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/vignette_suite");
    let vignettes = load_suite(&suite_dir)?;
    println!("loaded {} vignettes from {}", vignettes.len(), suite_dir.display());

    let ets = [10.0, 20.0, 40.0, 60.0, 90.0];
    let report = run_suite(&vignettes, &ets, RunMode::Both, 0)?;

    let mut evaluated = 0;
    let mut skipped = 0;
    for cell in &report.cells {
        match cell.outcome {
            CellOutcome::Evaluated { .. } => evaluated += 1,
            CellOutcome::Skipped { .. } => skipped += 1,
            CellOutcome::Failed { .. } => panic!("cell failed: {:?}", cell.outcome),
        }
    }
    println!("{evaluated} cells evaluated, {skipped} skipped (irrelevant-clue controls)\n");

    println!(
        "{:10} {:12} {:>8} {:>8} {:>8} {:>12}",
        "group", "update", "accept", "alert", "reject", "candidates"
    );
    for group in [Group::One, Group::Two] {
        for update in [UpdateMode::NoUpdate, UpdateMode::WithUpdate] {
            let d = aggregate_distribution(&report, group, update)?;
            println!(
                "{:10} {:12} {:>7.1}% {:>7.1}% {:>7.1}% {:>12}",
                group.to_string(),
                update.to_string(),
                d.accept_pct,
                d.alert_pct,
                d.reject_pct,
                d.candidates,
            );
        }
    }

    // Persist the full report and a pair of heatmaps for the scenario whose
    // clue sits across the river: the update is what lights up the far bank.
    let out = std::env::temp_dir().join("sarguard_suite_demo");
    std::fs::create_dir_all(&out)?;
    write_report(&report, &out.join("report.json"))?;
    let v5 = vignettes.iter().find(|v| v.id == "riverbend_v5").expect("riverbend_v5");
    let scene = v5.build_scene(0)?;
    let params = sarguard::SuiteParams::default();
    for (mode, stem) in
        [(UpdateMode::NoUpdate, "v5_no_update"), (UpdateMode::WithUpdate, "v5_with_update")]
    {
        let cell = sarguard::execute_cell(v5, &scene, 60.0, mode, &params);
        let poa = cell.poa.expect("evaluated cell keeps its surface");
        export_heatmap(&poa, &scene, &out.join(stem))?;
    }
    println!("\nreport and heatmaps written under {}", out.display());
    Ok(())
}
