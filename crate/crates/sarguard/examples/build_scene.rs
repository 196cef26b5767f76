//! Load a terrain document and inspect what the scene builder makes of it:
//! derived edge classes, connected-component clusters, k-means subclusters,
//! and point queries against the subcluster map.

use std::path::Path;

use sarguard::{load_scene, FeatureType};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/terrain/riverbend.json");
    let scene = load_scene(&std::fs::read_to_string(&path)?)?;

    println!(
        "{} x {} grid at {} m per cell ({} cells)",
        scene.rows,
        scene.cols,
        scene.cell_size_m,
        scene.cells.len()
    );
    let passable = scene.cells.iter().filter(|c| c.passable).count();
    println!("{passable} passable cells\n");

    println!("clusters:");
    for cluster in &scene.clusters {
        println!(
            "  {:24} {:20} {:4} cells  centroid ({:.1}, {:.1})",
            cluster.id,
            format!("{:?}", cluster.feature_type),
            cluster.cell_indices.len(),
            cluster.centroid.0,
            cluster.centroid.1,
        );
    }
    println!(
        "\n{} clusters split into {} subclusters (max 64 cells each)",
        scene.clusters.len(),
        scene.subclusters.len()
    );

    // Cells bordering the river were promoted to Shoreline even though the
    // document maps them as something else.
    let shoreline = scene.cells.iter().filter(|c| c.terrain == FeatureType::Shoreline).count();
    println!("{shoreline} shoreline cells after edge derivation\n");

    // Where does a point land? The query reports the containing subcluster,
    // its 8-connected neighbors, and anything else within ten cells.
    let junction = scene.latlon_of(20.0, 10.0);
    let hit = scene.locate(junction)?;
    println!("point ({:.6}, {:.6}):", junction.lat, junction.lon);
    println!("  cell     ({}, {})", hit.cell.0, hit.cell.1);
    println!("  on       {}", hit.on);
    println!("  adjacent {}", hit.adjacent.join(", "));
    println!("  nearby   {}", hit.nearby.join(", "));
    Ok(())
}
