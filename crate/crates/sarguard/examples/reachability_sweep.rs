//! Sweep the reachability surface over a growing time-since-last-seen and
//! watch the plausible area expand -- except across the river, which this
//! scenario marks unfordable.

use std::collections::BTreeMap;
use std::path::Path;

use sarguard::{load_scene, reachability, FeatureType, MovementModel, MovementOverrides};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/terrain/riverbend.json");
    let scene = load_scene(&std::fs::read_to_string(&path)?)?;

    // Default walking model, except the river is too deep to wade.
    let overrides = MovementOverrides {
        terrain_speed_multiplier: BTreeMap::from([(FeatureType::StreamRiver, 0.0)]),
        ..MovementOverrides::default()
    };
    let model = MovementModel::default().with_overrides(&overrides);

    let lkp = scene.latlon_of(20.0, 10.0);
    println!("last known point at cell (20, 10); R >= 0.05 counts as plausible\n");
    println!("{:>10}  {:>15}  {:>13}  {:>15}", "ET (min)", "plausible cells", "share", "east of river");

    for et in [10.0, 20.0, 40.0, 60.0, 90.0] {
        let field = reachability(&scene, &model, lkp, et, sarguard::reachability::DEFAULT_GAMMA)?;
        let plausible = field.area_at_least(0.05);
        // Columns 32+ lie across the water; none of them should ever light up.
        let east = (0..scene.rows)
            .flat_map(|r| (32..scene.cols).map(move |c| (r, c)))
            .filter(|&(r, c)| field.r_value[scene.index(r, c)] > 0.0)
            .count();
        println!(
            "{:>10}  {:>15}  {:>12.1}%  {:>15}",
            et,
            plausible,
            100.0 * plausible as f64 / scene.cells.len() as f64,
            east,
        );
    }

    // The same sweep with a fordable river reaches the far bank.
    let fordable = MovementModel::default();
    let field = reachability(&scene, &fordable, lkp, 60.0, 0.5)?;
    let east = (0..scene.rows)
        .flat_map(|r| (32..scene.cols).map(move |c| (r, c)))
        .filter(|&(r, c)| field.r_value[scene.index(r, c)] > 0.0)
        .count();
    println!("\nwith the default (slow but fordable) river, {east} east-bank cells are reachable at ET 60");
    Ok(())
}
