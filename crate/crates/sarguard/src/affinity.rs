//! Behavioral affinity surfaces: how strongly a lost person of a given
//! class is drawn towards (or away from) each terrain feature.
//!
//! Each feature contributes a multiplicative factor
//! `1 + a_f * exp(-d_f(c)^2 / (2 * sigma_f^2))` where `d_f(c)` is the
//! Euclidean distance from cell `c` to the nearest cell of the feature.
//! Strengths are bounded below at -0.9 so factors stay positive; absent
//! features contribute 1. Kernel widths default to 3 cells for linear
//! features (roads, trails, water lines, edges) and 6 cells for areal ones.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::terrain::{FeatureType, Scene};

pub const MIN_STRENGTH: f64 = -0.9;
/// Cell size assumed by [`default_profile`] when no scene is at hand.
pub const NOMINAL_CELL_SIZE_M: f64 = 30.0;
const LINEAR_SIGMA_CELLS: f64 = 3.0;
const AREAL_SIGMA_CELLS: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureKernel {
    /// Attraction (positive) or avoidance (negative) strength; > -1,
    /// clamped at -0.9 by validation. Zero disables the feature.
    pub strength: f64,
    /// Gaussian length scale in metres.
    pub length_scale_m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffinityProfile {
    /// One kernel per feature class, indexed by `FeatureType::ordinal`.
    pub kernels: [FeatureKernel; FeatureType::COUNT],
}

/// Lost-person behavior classes with preset affinity profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PersonClass {
    Hiker,
    Child,
    Elderly,
    Despondent,
}

impl PersonClass {
    pub const ALL: [PersonClass; 4] =
        [PersonClass::Hiker, PersonClass::Child, PersonClass::Elderly, PersonClass::Despondent];

    pub fn name(self) -> &'static str {
        match self {
            PersonClass::Hiker => "hiker",
            PersonClass::Child => "child",
            PersonClass::Elderly => "elderly",
            PersonClass::Despondent => "despondent",
        }
    }
}

impl fmt::Display for PersonClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PersonClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PersonClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::UnknownPersonClass {
                given: s.to_string(),
                valid: "hiker, child, elderly, despondent",
            })
    }
}

/// Preset attraction strengths per person class, in `FeatureType::ALL`
/// order: Road, Trail, Stream_River, Lake, Shoreline, Woodland,
/// Woodland_Boundary, Low_Vegetation, Building, Marsh_Wetland, Rock_Barren.
fn preset_strengths(class: PersonClass) -> [f64; FeatureType::COUNT] {
    match class {
        // Travel-route bound; strong pull to trails and path edges.
        PersonClass::Hiker => [0.8, 1.5, 0.2, 0.0, 0.3, 0.1, 0.4, 0.2, 0.1, -0.4, 0.1],
        // Drawn to water edges and open ground, wary of deep woods.
        PersonClass::Child => [0.3, 0.5, 0.9, 0.4, 1.2, -0.2, 0.4, 0.8, 0.5, -0.2, -0.3],
        // Keeps to easy ground: roads, trails, structures.
        PersonClass::Elderly => [1.0, 0.9, 0.0, 0.0, 0.2, -0.3, 0.3, 0.3, 0.8, -0.5, -0.4],
        // Seeks concealment and edges away from travel routes.
        PersonClass::Despondent => [-0.3, 0.1, 0.4, 0.3, 0.7, 0.6, 0.8, 0.0, -0.2, 0.1, 0.4],
    }
}

impl AffinityProfile {
    /// Neutral profile: every strength zero, default length scales for the
    /// given cell size.
    pub fn neutral(cell_size_m: f64) -> Self {
        let kernels = std::array::from_fn(|i| FeatureKernel {
            strength: 0.0,
            length_scale_m: default_sigma_m(FeatureType::ALL[i], cell_size_m),
        });
        AffinityProfile { kernels }
    }

    /// Preset for a person class with length scales sized to `cell_size_m`.
    pub fn preset_for(class: PersonClass, cell_size_m: f64) -> Self {
        let strengths = preset_strengths(class);
        let kernels = std::array::from_fn(|i| FeatureKernel {
            strength: strengths[i],
            length_scale_m: default_sigma_m(FeatureType::ALL[i], cell_size_m),
        });
        AffinityProfile { kernels }
    }

    pub fn kernel(&self, feature: FeatureType) -> FeatureKernel {
        self.kernels[feature.ordinal()]
    }

    pub fn set_kernel(&mut self, feature: FeatureType, kernel: FeatureKernel) {
        self.kernels[feature.ordinal()] = kernel;
    }

    /// Apply per-feature overrides from a scenario document.
    pub fn with_overrides(mut self, overrides: &BTreeMap<FeatureType, FeatureKernel>) -> Self {
        for (&feature, &kernel) in overrides {
            self.set_kernel(feature, kernel);
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (i, k) in self.kernels.iter().enumerate() {
            let label = FeatureType::ALL[i].label();
            if !k.strength.is_finite() || k.strength < MIN_STRENGTH {
                return Err(Error::invalid(format!(
                    "affinity strength for {label} must be finite and >= {MIN_STRENGTH}"
                )));
            }
            if !(k.length_scale_m.is_finite() && k.length_scale_m > 0.0) {
                return Err(Error::invalid(format!(
                    "affinity length scale for {label} must be positive"
                )));
            }
        }
        Ok(())
    }
}

fn default_sigma_m(feature: FeatureType, cell_size_m: f64) -> f64 {
    let cells = if feature.is_linear() { LINEAR_SIGMA_CELLS } else { AREAL_SIGMA_CELLS };
    cells * cell_size_m
}

/// Preset profile for a person class at the nominal 30 m cell size. Use
/// [`AffinityProfile::preset_for`] with the scene's real cell size when one
/// is available.
pub fn default_profile(class: PersonClass) -> AffinityProfile {
    AffinityProfile::preset_for(class, NOMINAL_CELL_SIZE_M)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffinityField {
    /// Multiplicative attraction weight per cell; always positive.
    pub a_value: Vec<f64>,
}

/// Evaluate a profile over a scene.
pub fn affinity(scene: &Scene, profile: &AffinityProfile) -> Result<AffinityField> {
    profile.validate()?;
    let mut a_value = vec![1.0; scene.cells.len()];
    for feature in FeatureType::ALL {
        let kernel = profile.kernel(feature);
        if kernel.strength == 0.0 {
            continue;
        }
        let distances = scene.distance_to_feature(feature);
        if distances.iter().all(|d| d.is_infinite()) {
            continue; // feature absent: factor is 1 everywhere
        }
        let denom = 2.0 * kernel.length_scale_m * kernel.length_scale_m;
        for (a, &d) in a_value.iter_mut().zip(&distances) {
            *a *= 1.0 + kernel.strength * (-d * d / denom).exp();
        }
    }
    Ok(AffinityField { a_value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terrain::testutil::doc_from_grid;
    use crate::terrain::{Scene, SceneOptions, TerrainDocument};

    fn scene_from(doc: &TerrainDocument) -> Scene {
        Scene::from_document(doc, &SceneOptions::default()).unwrap()
    }

    #[test]
    fn neutral_profile_gives_unit_field() {
        let doc = doc_from_grid(5, 5, 30.0, |r, c| {
            if r == 2 && c == 2 {
                FeatureType::Building
            } else {
                FeatureType::RockBarren
            }
        });
        let scene = scene_from(&doc);
        let field = affinity(&scene, &AffinityProfile::neutral(30.0)).unwrap();
        assert!(field.a_value.iter().all(|&a| a == 1.0));
    }

    #[test]
    fn on_feature_cell_with_unit_strength_doubles() {
        let doc = doc_from_grid(3, 3, 30.0, |r, c| {
            if r == 1 && c == 1 {
                FeatureType::Road
            } else {
                FeatureType::RockBarren
            }
        });
        let scene = scene_from(&doc);
        let mut profile = AffinityProfile::neutral(30.0);
        profile.set_kernel(
            FeatureType::Road,
            FeatureKernel { strength: 1.0, length_scale_m: 90.0 },
        );
        let field = affinity(&scene, &profile).unwrap();
        assert!((field.a_value[scene.index(1, 1)] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn factors_multiply_across_features() {
        // Road at col 0, building at col 3; the building cell sits exactly
        // one road length-scale away: A = (1 + e^-0.5) * 1.5.
        let doc = doc_from_grid(1, 7, 30.0, |_, c| match c {
            0 => FeatureType::Road,
            3 => FeatureType::Building,
            _ => FeatureType::RockBarren,
        });
        let scene = scene_from(&doc);
        let mut profile = AffinityProfile::neutral(30.0);
        profile.set_kernel(
            FeatureType::Road,
            FeatureKernel { strength: 1.0, length_scale_m: 90.0 },
        );
        profile.set_kernel(
            FeatureType::Building,
            FeatureKernel { strength: 0.5, length_scale_m: 180.0 },
        );
        let field = affinity(&scene, &profile).unwrap();
        let expected = (1.0 + (-0.5f64).exp()) * 1.5;
        assert!((field.a_value[scene.index(0, 3)] - expected).abs() < 1e-12);
    }

    #[test]
    fn far_from_everything_is_neutral() {
        let doc = doc_from_grid(1, 60, 30.0, |_, c| {
            if c == 0 {
                FeatureType::Trail
            } else {
                FeatureType::RockBarren
            }
        });
        let scene = scene_from(&doc);
        let mut profile = AffinityProfile::neutral(30.0);
        profile
            .set_kernel(FeatureType::Trail, FeatureKernel { strength: 2.0, length_scale_m: 90.0 });
        let field = affinity(&scene, &profile).unwrap();
        // 59 cells = 1770 m away, nearly 20 length scales out.
        assert!((field.a_value[scene.index(0, 59)] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn attraction_decays_and_avoidance_recovers_with_distance() {
        let doc = doc_from_grid(1, 30, 30.0, |_, c| {
            if c == 0 {
                FeatureType::Lake
            } else {
                FeatureType::MarshWetland
            }
        });
        let scene = scene_from(&doc);
        for strength in [0.9, -0.6] {
            let mut profile = AffinityProfile::neutral(30.0);
            profile.set_kernel(
                FeatureType::Lake,
                FeatureKernel { strength, length_scale_m: 180.0 },
            );
            let field = affinity(&scene, &profile).unwrap();
            for c in 1..scene.cols {
                let prev = field.a_value[scene.index(0, c - 1)];
                let here = field.a_value[scene.index(0, c)];
                if strength > 0.0 {
                    assert!(here < prev, "col {c}");
                } else {
                    assert!(here > prev, "col {c}");
                }
                assert!(here > 0.0);
            }
        }
    }

    #[test]
    fn presets_are_deterministic_and_valid() {
        for class in PersonClass::ALL {
            let a = default_profile(class);
            let b = default_profile(class);
            assert_eq!(a, b);
            a.validate().unwrap();
            for k in &a.kernels {
                assert!(k.strength > -1.0);
            }
        }
    }

    #[test]
    fn hiker_prefers_trails_over_deep_woods() {
        let p = default_profile(PersonClass::Hiker);
        assert!(
            p.kernel(FeatureType::Trail).strength
                >= p.kernel(FeatureType::WoodlandInterior).strength
        );
    }

    #[test]
    fn child_preset_peaks_on_shoreline_and_open_ground() {
        let p = default_profile(PersonClass::Child);
        let shoreline = p.kernel(FeatureType::Shoreline).strength;
        let open = p.kernel(FeatureType::OpenLowVegetation).strength;
        assert!(shoreline >= 1.0);
        assert!(open >= 0.5);
        let max = p.kernels.iter().map(|k| k.strength).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(max, shoreline);
    }

    #[test]
    fn preset_length_scales_follow_the_cell_size() {
        let p = AffinityProfile::preset_for(PersonClass::Hiker, 10.0);
        assert_eq!(p.kernel(FeatureType::Trail).length_scale_m, 30.0); // linear: 3 cells
        assert_eq!(p.kernel(FeatureType::Lake).length_scale_m, 60.0); // areal: 6 cells
    }

    #[test]
    fn unknown_person_class_lists_the_valid_ones() {
        let err = "wizard".parse::<PersonClass>().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("wizard"));
        for name in ["hiker", "child", "elderly", "despondent"] {
            assert!(msg.contains(name), "{msg}");
        }
    }

    #[test]
    fn invalid_kernels_are_rejected() {
        let mut p = AffinityProfile::neutral(30.0);
        p.set_kernel(FeatureType::Road, FeatureKernel { strength: -0.95, length_scale_m: 90.0 });
        assert!(p.validate().is_err());
        let mut p = AffinityProfile::neutral(30.0);
        p.set_kernel(FeatureType::Road, FeatureKernel { strength: 0.5, length_scale_m: 0.0 });
        assert!(p.validate().is_err());
    }

    /// Adjacent-cell steps stay within the analytic Lipschitz bound of the
    /// kernel product.
    #[test]
    fn field_is_smooth_between_neighboring_cells() {
        let doc = doc_from_grid(14, 14, 30.0, |r, c| {
            if r == 3 {
                FeatureType::Trail
            } else if c == 9 && r > 5 {
                FeatureType::StreamRiver
            } else {
                FeatureType::OpenLowVegetation
            }
        });
        let scene = scene_from(&doc);
        let profile = AffinityProfile::preset_for(PersonClass::Hiker, 30.0);
        let field = affinity(&scene, &profile).unwrap();

        // L = sum_f |a_f| e^{-1/2} / sigma_f * prod_{g != f} (1 + max(a_g, 0))
        let mut lipschitz = 0.0;
        for f in 0..FeatureType::COUNT {
            let k = profile.kernels[f];
            if k.strength == 0.0 {
                continue;
            }
            let mut others = 1.0;
            for (g, kg) in profile.kernels.iter().enumerate() {
                if g != f {
                    others *= 1.0 + kg.strength.max(0.0);
                }
            }
            lipschitz += k.strength.abs() * (-0.5f64).exp() / k.length_scale_m * others;
        }

        for cell in &scene.cells {
            if cell.col + 1 < scene.cols {
                let a = field.a_value[scene.index(cell.row, cell.col)];
                let b = field.a_value[scene.index(cell.row, cell.col + 1)];
                assert!(
                    (a - b).abs() <= lipschitz * scene.cell_size_m * (1.0 + 1e-9),
                    "jump at ({}, {})",
                    cell.row,
                    cell.col
                );
            }
        }
    }
}
