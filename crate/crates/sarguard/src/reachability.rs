//! Travel-time and reachability fields from a last-known point.
//!
//! Travel time is a shortest-path problem on the 8-connected cell graph.
//! Crossing into a cell costs `edge_length / speed`, where speed is the
//! walker's base speed scaled by a slope response and by the destination
//! cell's terrain multiplier. The slope response is the exponential hiking
//! curve `exp(-steepness * |slope + offset|)`, fastest on a slight downhill.
//! Cells whose terrain multiplier is zero (or that are impassable) never
//! become edge destinations; anything cut off from the LKP keeps a `None`
//! travel time and serializes as `null`.
//!
//! Reachability maps travel time T to `R = exp(-(T / (gamma * ET))^2)`:
//! 1 at the LKP, decaying with T on a horizon set by the elapsed time, 0
//! where unreachable. R is monotone in ET, so search frontiers only grow as
//! more time passes.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::LatLon;
use crate::grid::{coords, NEIGHBORS_8};
use crate::terrain::{FeatureType, Scene};

pub const DEFAULT_BASE_SPEED_KMH: f64 = 6.0;
pub const DEFAULT_GAMMA: f64 = 0.5;

/// `exp(-steepness * |slope + offset|)` speed scaling; slope is rise/run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeResponse {
    pub steepness: f64,
    pub offset: f64,
}

impl Default for SlopeResponse {
    fn default() -> Self {
        SlopeResponse { steepness: 3.5, offset: 0.05 }
    }
}

impl SlopeResponse {
    pub fn factor(&self, slope: f64) -> f64 {
        (-self.steepness * (slope + self.offset).abs()).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MovementModel {
    pub base_speed_kmh: f64,
    /// Per-person scaling of the base speed (1 = nominal).
    pub profile_speed_factor: f64,
    /// Speed multiplier per feature class, indexed by `FeatureType::ordinal`.
    /// Zero means the class cannot be entered.
    pub terrain_speed_multiplier: [f64; FeatureType::COUNT],
    pub slope: SlopeResponse,
}

impl Default for MovementModel {
    fn default() -> Self {
        let mut m = [0.0; FeatureType::COUNT];
        m[FeatureType::Road.ordinal()] = 1.0;
        m[FeatureType::Trail.ordinal()] = 1.0;
        m[FeatureType::StreamRiver.ordinal()] = 0.15; // fordable shallows
        m[FeatureType::Lake.ordinal()] = 0.0;
        m[FeatureType::Shoreline.ordinal()] = 0.6;
        m[FeatureType::WoodlandInterior.ordinal()] = 0.5;
        m[FeatureType::WoodlandBoundary.ordinal()] = 0.7;
        m[FeatureType::OpenLowVegetation.ordinal()] = 0.8;
        m[FeatureType::Building.ordinal()] = 0.0;
        m[FeatureType::MarshWetland.ordinal()] = 0.3;
        m[FeatureType::RockBarren.ordinal()] = 0.5;
        MovementModel {
            base_speed_kmh: DEFAULT_BASE_SPEED_KMH,
            profile_speed_factor: 1.0,
            terrain_speed_multiplier: m,
            slope: SlopeResponse::default(),
        }
    }
}

/// Scenario-document overrides applied on top of [`MovementModel::default`].
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MovementOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_speed_kmh: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_speed_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "std::collections::BTreeMap::is_empty")]
    pub terrain_speed_multiplier: std::collections::BTreeMap<FeatureType, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<SlopeResponse>,
}

impl MovementModel {
    pub fn with_overrides(mut self, overrides: &MovementOverrides) -> Self {
        if let Some(v) = overrides.base_speed_kmh {
            self.base_speed_kmh = v;
        }
        if let Some(v) = overrides.profile_speed_factor {
            self.profile_speed_factor = v;
        }
        for (&feature, &mult) in &overrides.terrain_speed_multiplier {
            self.terrain_speed_multiplier[feature.ordinal()] = mult;
        }
        if let Some(s) = overrides.slope {
            self.slope = s;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.base_speed_kmh.is_finite() && self.base_speed_kmh > 0.0) {
            return Err(Error::invalid("base_speed_kmh must be positive"));
        }
        if !(self.profile_speed_factor.is_finite() && self.profile_speed_factor > 0.0) {
            return Err(Error::invalid("profile_speed_factor must be positive"));
        }
        for (i, &m) in self.terrain_speed_multiplier.iter().enumerate() {
            if !(m.is_finite() && m >= 0.0) {
                return Err(Error::invalid(format!(
                    "terrain multiplier for {} must be finite and non-negative",
                    FeatureType::ALL[i].label()
                )));
            }
        }
        if !(self.slope.steepness.is_finite() && self.slope.steepness >= 0.0) {
            return Err(Error::invalid("slope steepness must be finite and non-negative"));
        }
        if !self.slope.offset.is_finite() {
            return Err(Error::invalid("slope offset must be finite"));
        }
        Ok(())
    }

    /// Multiplier actually applied when stepping into `cell`.
    fn entry_multiplier(&self, scene: &Scene, cell: usize) -> f64 {
        let c = &scene.cells[cell];
        if !c.passable {
            0.0
        } else {
            self.terrain_speed_multiplier[c.terrain.ordinal()]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReachabilityField {
    pub lkp: LatLon,
    pub lkp_cell: (usize, usize),
    pub elapsed_time_minutes: f64,
    pub gamma: f64,
    /// Minutes from the LKP per cell; `None` (serialized `null`) where
    /// unreachable.
    pub travel_time_minutes: Vec<Option<f64>>,
    /// `exp(-(T / (gamma * ET))^2)`, 0 where unreachable.
    pub r_value: Vec<f64>,
}

impl ReachabilityField {
    /// Number of cells with reachability at or above `threshold`.
    pub fn area_at_least(&self, threshold: f64) -> usize {
        self.r_value.iter().filter(|&&r| r >= threshold).count()
    }
}

#[derive(PartialEq)]
struct HeapEntry {
    minutes: f64,
    cell: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on (minutes, cell); costs are finite so unwrap is safe.
        other
            .minutes
            .partial_cmp(&self.minutes)
            .unwrap()
            .then_with(|| other.cell.cmp(&self.cell))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Minutes of travel from the LKP to every cell (Dijkstra).
pub fn travel_time_field(
    scene: &Scene,
    model: &MovementModel,
    lkp: LatLon,
) -> Result<Vec<Option<f64>>> {
    model.validate()?;
    let (lr, lc) = scene.cell_of(lkp)?;
    let start = scene.index(lr, lc);
    if model.entry_multiplier(scene, start) <= 0.0 {
        return Err(Error::invalid(format!(
            "LKP cell ({lr}, {lc}) is impassable under the movement model"
        )));
    }

    let meters_per_minute = model.base_speed_kmh * model.profile_speed_factor * 1000.0 / 60.0;
    let mut time: Vec<Option<f64>> = vec![None; scene.cells.len()];
    let mut heap = BinaryHeap::new();
    time[start] = Some(0.0);
    heap.push(HeapEntry { minutes: 0.0, cell: start });

    while let Some(HeapEntry { minutes, cell }) = heap.pop() {
        if time[cell] != Some(minutes) {
            continue; // stale entry
        }
        let (r, c) = coords(scene.cols, cell);
        let elev = scene.cells[cell].elevation_m;
        for (dr, dc) in NEIGHBORS_8 {
            let nr = r as i64 + dr;
            let nc = c as i64 + dc;
            if nr < 0 || nc < 0 || nr as usize >= scene.rows || nc as usize >= scene.cols {
                continue;
            }
            let next = scene.index(nr as usize, nc as usize);
            let mult = model.entry_multiplier(scene, next);
            if mult <= 0.0 {
                continue;
            }
            let edge_m = if dr != 0 && dc != 0 {
                std::f64::consts::SQRT_2 * scene.cell_size_m
            } else {
                scene.cell_size_m
            };
            let slope = (scene.cells[next].elevation_m - elev) / edge_m;
            let speed = meters_per_minute * model.slope.factor(slope) * mult;
            if speed <= 0.0 {
                continue;
            }
            let candidate = minutes + edge_m / speed;
            if time[next].map_or(true, |t| candidate < t) {
                time[next] = Some(candidate);
                heap.push(HeapEntry { minutes: candidate, cell: next });
            }
        }
    }
    Ok(time)
}

/// Travel-time field mapped to reachability weights for a given elapsed
/// time (minutes) and horizon fraction `gamma`.
pub fn reachability(
    scene: &Scene,
    model: &MovementModel,
    lkp: LatLon,
    elapsed_time_minutes: f64,
    gamma: f64,
) -> Result<ReachabilityField> {
    if !(elapsed_time_minutes.is_finite() && elapsed_time_minutes > 0.0) {
        return Err(Error::invalid("elapsed_time_minutes must be positive"));
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::invalid("gamma must be positive"));
    }
    let travel = travel_time_field(scene, model, lkp)?;
    let horizon = gamma * elapsed_time_minutes;
    let r_value: Vec<f64> = travel
        .iter()
        .map(|t| match t {
            Some(minutes) => (-(minutes / horizon).powi(2)).exp(),
            None => 0.0,
        })
        .collect();
    Ok(ReachabilityField {
        lkp,
        lkp_cell: scene.cell_of(lkp)?,
        elapsed_time_minutes,
        gamma,
        travel_time_minutes: travel,
        r_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terrain::testutil::doc_from_grid;
    use crate::terrain::{Scene, SceneOptions, TerrainDocument};

    fn scene_from(doc: &TerrainDocument) -> Scene {
        Scene::from_document(doc, &SceneOptions::default()).unwrap()
    }

    /// Slope-neutral model: effective speed = base * multiplier.
    fn flat_model(base_kmh: f64) -> MovementModel {
        MovementModel {
            base_speed_kmh: base_kmh,
            slope: SlopeResponse { steepness: 0.0, offset: 0.0 },
            terrain_speed_multiplier: [1.0; FeatureType::COUNT],
            ..MovementModel::default()
        }
    }

    #[test]
    fn default_multipliers_match_the_movement_table() {
        let m = MovementModel::default();
        let get = |f: FeatureType| m.terrain_speed_multiplier[f.ordinal()];
        assert_eq!(get(FeatureType::Road), 1.0);
        assert_eq!(get(FeatureType::Trail), 1.0);
        assert_eq!(get(FeatureType::OpenLowVegetation), 0.8);
        assert_eq!(get(FeatureType::WoodlandBoundary), 0.7);
        assert_eq!(get(FeatureType::WoodlandInterior), 0.5);
        assert_eq!(get(FeatureType::RockBarren), 0.5);
        assert_eq!(get(FeatureType::MarshWetland), 0.3);
        assert_eq!(get(FeatureType::Shoreline), 0.6);
        assert_eq!(get(FeatureType::StreamRiver), 0.15);
        assert_eq!(get(FeatureType::Lake), 0.0);
        assert_eq!(get(FeatureType::Building), 0.0);
    }

    #[test]
    fn lkp_cell_time_is_zero_and_unique() {
        let doc = doc_from_grid(6, 6, 30.0, |_, _| FeatureType::OpenLowVegetation);
        let scene = scene_from(&doc);
        let lkp = scene.latlon_of(2.0, 3.0);
        let t = travel_time_field(&scene, &MovementModel::default(), lkp).unwrap();
        let zeros: Vec<usize> = t
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == Some(0.0))
            .map(|(i, _)| i)
            .collect();
        assert_eq!(zeros, vec![scene.index(2, 3)]);
    }

    #[test]
    fn one_km_due_east_at_five_kmh_takes_twelve_minutes() {
        let doc = doc_from_grid(3, 45, 25.0, |_, _| FeatureType::Trail);
        let scene = scene_from(&doc);
        let lkp = scene.latlon_of(1.0, 2.0);
        let t = travel_time_field(&scene, &flat_model(5.0), lkp).unwrap();
        // 40 cells x 25 m = 1 km due east.
        let minutes = t[scene.index(1, 42)].unwrap();
        assert!((minutes - 12.0).abs() < 1e-9, "{minutes}");
    }

    #[test]
    fn tobler_makes_uphill_slower_than_downhill() {
        let mut doc = doc_from_grid(1, 3, 30.0, |_, _| FeatureType::Trail);
        for (i, cell) in doc.cells.iter_mut().enumerate() {
            cell.elevation_m = 100.0 + 10.0 * i as f64; // rises eastward
        }
        let scene = scene_from(&doc);
        let model = MovementModel::default();
        let up = travel_time_field(&scene, &model, scene.latlon_of(0.0, 0.0)).unwrap();
        let down = travel_time_field(&scene, &model, scene.latlon_of(0.0, 2.0)).unwrap();
        let t_up = up[scene.index(0, 2)].unwrap();
        let t_down = down[scene.index(0, 0)].unwrap();
        assert!(t_up > t_down, "uphill {t_up} <= downhill {t_down}");
    }

    #[test]
    fn cells_behind_an_impassable_river_are_unreachable() {
        let doc = doc_from_grid(1, 5, 30.0, |_, c| {
            if c == 2 {
                FeatureType::StreamRiver
            } else {
                FeatureType::Trail
            }
        });
        let scene = scene_from(&doc);
        let mut model = flat_model(5.0);
        model.terrain_speed_multiplier[FeatureType::StreamRiver.ordinal()] = 0.0;
        let t = travel_time_field(&scene, &model, scene.latlon_of(0.0, 0.0)).unwrap();
        assert!(t[scene.index(0, 1)].is_some());
        assert!(t[scene.index(0, 2)].is_none());
        assert!(t[scene.index(0, 3)].is_none());
        assert!(t[scene.index(0, 4)].is_none());
    }

    #[test]
    fn reachability_hits_its_anchor_values() {
        let doc = doc_from_grid(1, 30, 25.0, |_, _| FeatureType::Trail);
        let scene = scene_from(&doc);
        // 5 km/h = 0.3 min per 25 m cell. With ET = 20 and gamma = 0.5 the
        // horizon is 10 min, reached 33.33 cells east; exp(-1) there.
        let field =
            reachability(&scene, &flat_model(5.0), scene.latlon_of(0.0, 0.0), 20.0, 0.5).unwrap();
        assert_eq!(field.r_value[scene.index(0, 0)], 1.0);
        let t10 = field.travel_time_minutes[scene.index(0, 20)].unwrap();
        assert!((t10 - 6.0).abs() < 1e-9);
        let expected = (-(6.0f64 / 10.0).powi(2)).exp();
        assert!((field.r_value[scene.index(0, 20)] - expected).abs() < 1e-12);
    }

    #[test]
    fn unreachable_cells_have_zero_r() {
        let doc = doc_from_grid(1, 4, 30.0, |_, c| {
            if c == 1 {
                FeatureType::Lake
            } else {
                FeatureType::Trail
            }
        });
        let scene = scene_from(&doc);
        let field = reachability(
            &scene,
            &MovementModel::default(),
            scene.latlon_of(0.0, 0.0),
            60.0,
            0.5,
        )
        .unwrap();
        assert_eq!(field.r_value[scene.index(0, 2)], 0.0);
        assert_eq!(field.r_value[scene.index(0, 3)], 0.0);
    }

    #[test]
    fn r_grows_with_elapsed_time() {
        let doc = doc_from_grid(8, 8, 30.0, |_, _| FeatureType::OpenLowVegetation);
        let scene = scene_from(&doc);
        let lkp = scene.latlon_of(0.0, 0.0);
        let model = MovementModel::default();
        let mut previous: Option<ReachabilityField> = None;
        for et in [10.0, 20.0, 40.0, 60.0, 90.0] {
            let field = reachability(&scene, &model, lkp, et, DEFAULT_GAMMA).unwrap();
            if let Some(prev) = &previous {
                for (a, b) in prev.r_value.iter().zip(&field.r_value) {
                    assert!(b >= a);
                }
                assert!(field.area_at_least(0.05) >= prev.area_at_least(0.05));
            }
            previous = Some(field);
        }
    }

    #[test]
    fn impassable_lkp_is_rejected() {
        let doc = doc_from_grid(2, 2, 30.0, |r, c| {
            if (r, c) == (0, 0) {
                FeatureType::Lake
            } else {
                FeatureType::Trail
            }
        });
        let scene = scene_from(&doc);
        let err =
            travel_time_field(&scene, &MovementModel::default(), scene.latlon_of(0.0, 0.0))
                .unwrap_err();
        assert!(err.to_string().contains("impassable"), "{err}");
    }

    #[test]
    fn out_of_bounds_lkp_is_rejected() {
        let doc = doc_from_grid(2, 2, 30.0, |_, _| FeatureType::Trail);
        let scene = scene_from(&doc);
        let outside = scene.latlon_of(5.0, 5.0);
        assert!(travel_time_field(&scene, &MovementModel::default(), outside).is_err());
    }

    #[test]
    fn bad_sweep_parameters_are_rejected() {
        let doc = doc_from_grid(2, 2, 30.0, |_, _| FeatureType::Trail);
        let scene = scene_from(&doc);
        let lkp = scene.latlon_of(0.0, 0.0);
        let model = MovementModel::default();
        assert!(reachability(&scene, &model, lkp, 0.0, 0.5).is_err());
        assert!(reachability(&scene, &model, lkp, 60.0, 0.0).is_err());
        assert!(reachability(&scene, &model, lkp, f64::NAN, 0.5).is_err());
    }

    /// Independent straight-line re-implementation of the edge costs plus
    /// Bellman-Ford relaxation until fixpoint.
    pub(crate) fn bellman_ford_oracle(
        scene: &Scene,
        model: &MovementModel,
        start: (usize, usize),
    ) -> Vec<Option<f64>> {
        let n = scene.cells.len();
        let mpm = model.base_speed_kmh * model.profile_speed_factor * 1000.0 / 60.0;
        let mut dist: Vec<Option<f64>> = vec![None; n];
        dist[scene.index(start.0, start.1)] = Some(0.0);
        loop {
            let mut changed = false;
            for u in 0..n {
                let Some(du) = dist[u] else { continue };
                let (r, c) = (scene.cells[u].row, scene.cells[u].col);
                for (dr, dc) in NEIGHBORS_8 {
                    let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                    if nr < 0 || nc < 0 || nr as usize >= scene.rows || nc as usize >= scene.cols
                    {
                        continue;
                    }
                    let v = scene.index(nr as usize, nc as usize);
                    let cell = &scene.cells[v];
                    let mult = if cell.passable {
                        model.terrain_speed_multiplier[cell.terrain.ordinal()]
                    } else {
                        0.0
                    };
                    if mult <= 0.0 {
                        continue;
                    }
                    let edge = if dr != 0 && dc != 0 {
                        std::f64::consts::SQRT_2 * scene.cell_size_m
                    } else {
                        scene.cell_size_m
                    };
                    let slope = (cell.elevation_m - scene.cells[u].elevation_m) / edge;
                    let speed = mpm * model.slope.factor(slope) * mult;
                    let cand = du + edge / speed;
                    if dist[v].map_or(true, |t| cand < t) {
                        dist[v] = Some(cand);
                        changed = true;
                    }
                }
            }
            if !changed {
                return dist;
            }
        }
    }

    #[test]
    fn dijkstra_matches_bellman_ford_exactly_on_a_rough_grid() {
        let mut doc = doc_from_grid(10, 12, 20.0, |r, c| match (r * 7 + c * 5) % 6 {
            0 => FeatureType::WoodlandInterior,
            1 => FeatureType::RockBarren,
            2 => FeatureType::Trail,
            3 if r % 3 == 0 => FeatureType::Lake,
            _ => FeatureType::OpenLowVegetation,
        });
        for (i, cell) in doc.cells.iter_mut().enumerate() {
            cell.elevation_m = 100.0 + ((i * 37) % 23) as f64 - ((i * 11) % 7) as f64;
        }
        let scene = scene_from(&doc);
        let model = MovementModel::default();
        let lkp = scene.latlon_of(1.0, 1.0);
        let fast = travel_time_field(&scene, &model, lkp).unwrap();
        let slow = bellman_ford_oracle(&scene, &model, (1, 1));
        assert_eq!(fast, slow);
    }
}
