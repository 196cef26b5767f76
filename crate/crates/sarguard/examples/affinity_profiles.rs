//! Compare how the four behavior presets weight the same terrain. Each
//! profile multiplies per-feature attraction kernels over the grid; values
//! above 1 mark terrain the subject is drawn to.

use std::path::Path;

use sarguard::{affinity, default_profile, load_scene, PersonClass};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/terrain/riverbend.json");
    let scene = load_scene(&std::fs::read_to_string(&path)?)?;

    // Probe cells picked off the riverbend map.
    let probes = [
        ("on the trail", 20usize, 10usize),
        ("woodland interior", 8, 21),
        ("west shoreline", 20, 29),
        ("marsh", 28, 41),
        ("open ground", 36, 4),
    ];

    print!("{:18}", "");
    for class in PersonClass::ALL {
        print!("{:>12}", class.name());
    }
    println!();

    let mut fields = Vec::new();
    for class in PersonClass::ALL {
        fields.push(affinity(&scene, &default_profile(class))?);
    }
    for (label, r, c) in probes {
        print!("{label:18}");
        for field in &fields {
            print!("{:>12.3}", field.a_value[scene.index(r, c)]);
        }
        println!();
    }

    println!();
    for (class, field) in PersonClass::ALL.iter().zip(&fields) {
        let (idx, peak) = field
            .a_value
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        let cell = &scene.cells[idx];
        println!(
            "{:>10} peaks at ({:2}, {:2}) on {:?} with A = {:.3}",
            class.name(),
            cell.row,
            cell.col,
            cell.terrain,
            peak,
        );
    }
    Ok(())
}
