//! Probability-of-area surfaces and clue-evidence updates.
//!
//! A POA map is the cell-wise product of reachability and affinity,
//! normalized to sum to 1, with per-subcluster candidate scores `q` (the
//! share of probability mass inside each subcluster). Three updates fold in
//! evidence as the search runs:
//!
//! * presence clue: blend towards a fresh POA re-anchored at the clue,
//!   `p' ∝ (1 - λ) p + λ p_clue`, λ = relevance weight x confidence;
//! * directional clue: multiply by a corridor along the reported bearing,
//!   `1 + λ exp(-θ²/2σ_θ²) exp(-d²/2σ_c²)`, no re-anchoring;
//! * negative search: scale a swept subcluster by (1 - detection
//!   probability), the Bayesian search-failure update.
//!
//! Clue-driven updates only fire at relevance Medium or above; below that
//! the map is returned unchanged with a logged no-op. Every update
//! renormalizes, recomputes `q`, and appends a provenance entry, so a map's
//! history is auditable and replayable.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::affinity::AffinityField;
use crate::error::{Error, Result};
use crate::geo::{bearing_difference_deg, LatLon};
use crate::reachability::ReachabilityField;
use crate::terrain::Scene;

pub const DEFAULT_DETECTION_PROB: f64 = 0.8;
pub const DEFAULT_SIGMA_THETA_DEG: f64 = 30.0;
pub const DEFAULT_SIGMA_CORRIDOR_CELLS: f64 = 20.0;
const SCHEMA_VERSION: u32 = 1;

// ── Evidence ────────────────────────────────────────────────────────────

/// Ordinal relevance of a clue to the search subject.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum Relevance {
    None,
    Low,
    Medium,
    High,
    #[serde(rename = "Very High")]
    VeryHigh,
}

impl Relevance {
    /// Blend weight for belief updates; relevance below Medium never
    /// triggers one.
    pub fn update_weight(self) -> f64 {
        match self {
            Relevance::None | Relevance::Low => 0.0,
            Relevance::Medium => 0.5,
            Relevance::High => 0.75,
            Relevance::VeryHigh => 1.0,
        }
    }

    pub fn triggers_update(self) -> bool {
        self >= Relevance::Medium
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClueKind {
    /// The subject was here at some point (dropped item, sighting).
    Presence,
    /// The subject moved through heading along `bearing_deg` (tracks).
    Directional { bearing_deg: f64 },
    /// A sweep of `subcluster_id` finished without a detection.
    NegativeSearch { subcluster_id: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClueEvidence {
    pub location: LatLon,
    pub relevance: Relevance,
    pub kind: ClueKind,
    /// Observer confidence in [0, 1].
    pub confidence: f64,
    #[serde(default)]
    pub description: String,
}

impl ClueEvidence {
    pub fn validate(&self) -> Result<()> {
        if !(self.confidence.is_finite() && (0.0..=1.0).contains(&self.confidence)) {
            return Err(Error::invalid("clue confidence must be in [0, 1]"));
        }
        if let ClueKind::Directional { bearing_deg } = self.kind {
            if !bearing_deg.is_finite() {
                return Err(Error::invalid("clue bearing must be finite"));
            }
        }
        Ok(())
    }

    /// Blend weight λ for this clue.
    pub fn lambda(&self) -> f64 {
        self.relevance.update_weight() * self.confidence
    }
}

/// Corridor shape for directional updates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorridorParams {
    pub sigma_theta_deg: f64,
    pub sigma_corridor_m: f64,
}

impl CorridorParams {
    /// Defaults scaled to the scene: 30 degrees angular width, 20 cells of
    /// along-track reach.
    pub fn for_scene(scene: &Scene) -> Self {
        CorridorParams {
            sigma_theta_deg: DEFAULT_SIGMA_THETA_DEG,
            sigma_corridor_m: DEFAULT_SIGMA_CORRIDOR_CELLS * scene.cell_size_m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_theta_deg.is_finite() && self.sigma_theta_deg > 0.0) {
            return Err(Error::invalid("sigma_theta_deg must be positive"));
        }
        if !(self.sigma_corridor_m.is_finite() && self.sigma_corridor_m > 0.0) {
            return Err(Error::invalid("sigma_corridor_m must be positive"));
        }
        Ok(())
    }
}

// ── Provenance ──────────────────────────────────────────────────────────

/// One applied (or skipped) update, in application order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ProvenanceEntry {
    Presence {
        location: LatLon,
        relevance: Relevance,
        confidence: f64,
        lambda: f64,
        reanchor_et_minutes: f64,
        reanchor_gamma: f64,
    },
    Directional {
        location: LatLon,
        bearing_deg: f64,
        relevance: Relevance,
        confidence: f64,
        lambda: f64,
        sigma_theta_deg: f64,
        sigma_corridor_m: f64,
    },
    NegativeSearch {
        subcluster_id: String,
        detection_prob: f64,
    },
    NoOp {
        reason: String,
    },
}

// ── The map ─────────────────────────────────────────────────────────────

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoaMap {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub rows: usize,
    pub cols: usize,
    /// Row-major cell probabilities, summing to 1.
    pub p: Vec<f64>,
    /// Candidate score per subcluster id: its share of the mass.
    pub q: BTreeMap<String, f64>,
    /// Updates applied since the map was built.
    pub provenance: Vec<ProvenanceEntry>,
}

fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

/// Build the initial POA surface `p ∝ R * A` for a scene.
pub fn build_poa(
    scene: &Scene,
    reach: &ReachabilityField,
    aff: &AffinityField,
) -> Result<PoaMap> {
    let n = scene.cells.len();
    if reach.r_value.len() != n || aff.a_value.len() != n {
        return Err(Error::invalid("field sizes do not match the scene"));
    }
    let raw: Vec<f64> = reach.r_value.iter().zip(&aff.a_value).map(|(r, a)| r * a).collect();
    let mut map = PoaMap {
        schema_version: SCHEMA_VERSION,
        rows: scene.rows,
        cols: scene.cols,
        p: raw,
        q: BTreeMap::new(),
        provenance: Vec::new(),
    };
    map.renormalize(scene)?;
    Ok(map)
}

/// Re-derive candidate scores from a map's cell masses.
pub fn candidate_scores(poa: &PoaMap, scene: &Scene) -> Result<BTreeMap<String, f64>> {
    if poa.p.len() != scene.cells.len() {
        return Err(Error::invalid("POA size does not match the scene"));
    }
    let mut sums = vec![0.0f64; scene.subclusters.len()];
    for (i, &pi) in poa.p.iter().enumerate() {
        sums[scene.subcluster_of_cell(i)] += pi;
    }
    let total: f64 = sums.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegeneratePoa);
    }
    Ok(scene
        .subclusters
        .iter()
        .zip(&sums)
        .map(|(sub, &s)| (sub.id.clone(), s / total))
        .collect())
}

impl PoaMap {
    /// Normalize `p` to unit mass and refresh `q`. Errors if all mass is
    /// zero.
    fn renormalize(&mut self, scene: &Scene) -> Result<()> {
        let total: f64 = self.p.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::DegeneratePoa);
        }
        for v in &mut self.p {
            *v /= total;
        }
        self.q = candidate_scores(self, scene)?;
        Ok(())
    }

    /// Blend towards a fresh POA anchored at the clue. `reanchor` must be a
    /// reachability field whose LKP is the clue location; `aff` is the same
    /// affinity surface the base map was built with.
    pub fn apply_presence_clue(
        &self,
        scene: &Scene,
        clue: &ClueEvidence,
        reanchor: &ReachabilityField,
        aff: &AffinityField,
    ) -> Result<PoaMap> {
        clue.validate()?;
        scene.cell_of(clue.location)?;
        if !clue.relevance.triggers_update() {
            return Ok(self.skipped(clue));
        }
        let lambda = clue.lambda();
        let mut next = self.clone();
        if lambda > 0.0 {
            let fresh = build_poa(scene, reanchor, aff)?;
            for (v, &pc) in next.p.iter_mut().zip(&fresh.p) {
                *v = (1.0 - lambda) * *v + lambda * pc;
            }
            next.renormalize(scene)?;
        }
        next.provenance.push(ProvenanceEntry::Presence {
            location: clue.location,
            relevance: clue.relevance,
            confidence: clue.confidence,
            lambda,
            reanchor_et_minutes: reanchor.elapsed_time_minutes,
            reanchor_gamma: reanchor.gamma,
        });
        Ok(next)
    }

    /// Multiply in a corridor along the clue's bearing. The belief is
    /// reshaped in place; the anchor stays at the original LKP.
    pub fn apply_directional_clue(
        &self,
        scene: &Scene,
        clue: &ClueEvidence,
        params: &CorridorParams,
    ) -> Result<PoaMap> {
        clue.validate()?;
        params.validate()?;
        scene.cell_of(clue.location)?;
        let ClueKind::Directional { bearing_deg } = clue.kind else {
            return Err(Error::invalid("directional update requires a directional clue"));
        };
        if !clue.relevance.triggers_update() {
            return Ok(self.skipped(clue));
        }
        let lambda = clue.lambda();
        let mut next = self.clone();
        if lambda > 0.0 {
            let proj = scene.projection();
            let two_sig_theta = 2.0 * params.sigma_theta_deg * params.sigma_theta_deg;
            let two_sig_corr = 2.0 * params.sigma_corridor_m * params.sigma_corridor_m;
            for (i, v) in next.p.iter_mut().enumerate() {
                let cell = &scene.cells[i];
                let center = scene.latlon_of(cell.row as f64, cell.col as f64);
                let d = proj.distance_m(clue.location, center);
                // The clue's own cell counts as on-ray.
                let theta = if d == 0.0 {
                    0.0
                } else {
                    bearing_difference_deg(proj.bearing_deg(clue.location, center), bearing_deg)
                };
                let corridor =
                    (-theta * theta / two_sig_theta).exp() * (-d * d / two_sig_corr).exp();
                *v *= 1.0 + lambda * corridor;
            }
            next.renormalize(scene)?;
        }
        next.provenance.push(ProvenanceEntry::Directional {
            location: clue.location,
            bearing_deg,
            relevance: clue.relevance,
            confidence: clue.confidence,
            lambda,
            sigma_theta_deg: params.sigma_theta_deg,
            sigma_corridor_m: params.sigma_corridor_m,
        });
        Ok(next)
    }

    /// Bayesian search-failure update: a sweep of `subcluster_id` with the
    /// given detection probability found nothing.
    pub fn apply_negative_search(
        &self,
        scene: &Scene,
        subcluster_id: &str,
        detection_prob: f64,
    ) -> Result<PoaMap> {
        if !(detection_prob.is_finite() && (0.0..=1.0).contains(&detection_prob)) {
            return Err(Error::invalid("detection_prob must be in [0, 1]"));
        }
        let sub = scene.subcluster(subcluster_id)?;
        let mut next = self.clone();
        if detection_prob > 0.0 {
            for &cell in &sub.cell_indices {
                next.p[cell] *= 1.0 - detection_prob;
            }
            next.renormalize(scene)?;
        }
        next.provenance.push(ProvenanceEntry::NegativeSearch {
            subcluster_id: subcluster_id.to_string(),
            detection_prob,
        });
        Ok(next)
    }

    fn skipped(&self, clue: &ClueEvidence) -> PoaMap {
        let mut next = self.clone();
        next.provenance.push(ProvenanceEntry::NoOp {
            reason: format!(
                "clue relevance {:?} is below the Medium update threshold",
                clue.relevance
            ),
        });
        next
    }

    /// Stable digest of the surface (cell masses and candidate scores).
    pub fn checksum(&self) -> String {
        let mut hasher = Sha256::new();
        for v in &self.p {
            hasher.update(v.to_le_bytes());
        }
        for (id, score) in &self.q {
            hasher.update(id.as_bytes());
            hasher.update(score.to_le_bytes());
        }
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.p.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affinity::{affinity, AffinityProfile};
    use crate::reachability::{reachability, MovementModel, SlopeResponse};
    use crate::terrain::testutil::doc_from_grid;
    use crate::terrain::{FeatureType, Scene, SceneOptions};

    fn uniform_reach(scene: &Scene) -> ReachabilityField {
        ReachabilityField {
            lkp: scene.latlon_of(0.0, 0.0),
            lkp_cell: (0, 0),
            elapsed_time_minutes: 60.0,
            gamma: 0.5,
            travel_time_minutes: vec![Some(0.0); scene.cells.len()],
            r_value: vec![1.0; scene.cells.len()],
        }
    }

    fn unit_affinity(scene: &Scene) -> AffinityField {
        AffinityField { a_value: vec![1.0; scene.cells.len()] }
    }

    fn flat_scene(rows: usize, cols: usize) -> Scene {
        let doc = doc_from_grid(rows, cols, 30.0, |_, _| FeatureType::Trail);
        Scene::from_document(&doc, &SceneOptions::default()).unwrap()
    }

    fn flat_model() -> MovementModel {
        MovementModel {
            base_speed_kmh: 5.0,
            slope: SlopeResponse { steepness: 0.0, offset: 0.0 },
            terrain_speed_multiplier: [1.0; FeatureType::COUNT],
            ..MovementModel::default()
        }
    }

    #[test]
    fn uniform_fields_give_uniform_poa() {
        let scene = flat_scene(4, 5);
        let map = build_poa(&scene, &uniform_reach(&scene), &unit_affinity(&scene)).unwrap();
        let n = scene.cells.len() as f64;
        for &p in &map.p {
            assert!((p - 1.0 / n).abs() < 1e-15);
        }
        assert!((map.total_mass() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn three_cell_toy_balances_r_against_a() {
        let scene = flat_scene(1, 3);
        let reach = ReachabilityField {
            r_value: vec![1.0, 0.5, 0.25],
            ..uniform_reach(&scene)
        };
        let aff = AffinityField { a_value: vec![1.0, 2.0, 4.0] };
        let map = build_poa(&scene, &reach, &aff).unwrap();
        for &p in &map.p {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn all_zero_mass_is_degenerate() {
        let scene = flat_scene(2, 2);
        let reach = ReachabilityField {
            r_value: vec![0.0; 4],
            travel_time_minutes: vec![None; 4],
            ..uniform_reach(&scene)
        };
        let err = build_poa(&scene, &reach, &unit_affinity(&scene)).unwrap_err();
        assert!(matches!(err, Error::DegeneratePoa));
    }

    #[test]
    fn candidate_scores_split_mass_by_subcluster() {
        // Two equal-size clusters; all mass in the first.
        let doc = doc_from_grid(2, 4, 30.0, |_, c| {
            if c < 2 {
                FeatureType::Trail
            } else {
                FeatureType::RockBarren
            }
        });
        let scene = Scene::from_document(&doc, &SceneOptions::default()).unwrap();
        let reach = ReachabilityField {
            r_value: scene
                .cells
                .iter()
                .map(|c| if c.terrain == FeatureType::Trail { 1.0 } else { 0.0 })
                .collect(),
            ..uniform_reach(&scene)
        };
        let map = build_poa(&scene, &reach, &unit_affinity(&scene)).unwrap();
        assert!((map.q["Trail-0"] - 1.0).abs() < 1e-12);
        assert!((map.q["Rock_Barren-0"]).abs() < 1e-12);
        let recomputed = candidate_scores(&map, &scene).unwrap();
        assert_eq!(recomputed, map.q);
        let q_total: f64 = map.q.values().sum();
        assert!((q_total - 1.0).abs() < 1e-9);
    }

    fn pipeline(scene: &Scene, lkp_cell: (f64, f64), et: f64) -> (PoaMap, AffinityField) {
        let aff = affinity(scene, &AffinityProfile::neutral(scene.cell_size_m)).unwrap();
        let reach =
            reachability(scene, &flat_model(), scene.latlon_of(lkp_cell.0, lkp_cell.1), et, 0.5)
                .unwrap();
        (build_poa(scene, &reach, &aff).unwrap(), aff)
    }

    fn presence_clue(scene: &Scene, cell: (f64, f64), relevance: Relevance, conf: f64) -> ClueEvidence {
        ClueEvidence {
            location: scene.latlon_of(cell.0, cell.1),
            relevance,
            kind: ClueKind::Presence,
            confidence: conf,
            description: "left glove on the path".into(),
        }
    }

    #[test]
    fn medium_relevance_full_confidence_is_an_even_blend() {
        let scene = flat_scene(1, 12);
        let (base, aff) = pipeline(&scene, (0.0, 1.0), 20.0);
        let clue = presence_clue(&scene, (0.0, 9.0), Relevance::Medium, 1.0);
        let reanchor =
            reachability(&scene, &flat_model(), clue.location, 20.0, 0.5).unwrap();
        let fresh = build_poa(&scene, &reanchor, &aff).unwrap();
        let updated = base.apply_presence_clue(&scene, &clue, &reanchor, &aff).unwrap();
        for i in 0..scene.cells.len() {
            let expected = 0.5 * base.p[i] + 0.5 * fresh.p[i];
            assert!((updated.p[i] - expected).abs() < 1e-12, "cell {i}");
        }
        assert!((updated.total_mass() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn very_high_relevance_full_confidence_replaces_the_map() {
        let scene = flat_scene(1, 12);
        let (base, aff) = pipeline(&scene, (0.0, 1.0), 20.0);
        let clue = presence_clue(&scene, (0.0, 10.0), Relevance::VeryHigh, 1.0);
        let reanchor =
            reachability(&scene, &flat_model(), clue.location, 20.0, 0.5).unwrap();
        let fresh = build_poa(&scene, &reanchor, &aff).unwrap();
        let updated = base.apply_presence_clue(&scene, &clue, &reanchor, &aff).unwrap();
        for i in 0..scene.cells.len() {
            assert!((updated.p[i] - fresh.p[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_confidence_leaves_the_surface_alone() {
        let scene = flat_scene(1, 12);
        let (base, aff) = pipeline(&scene, (0.0, 1.0), 20.0);
        let clue = presence_clue(&scene, (0.0, 9.0), Relevance::High, 0.0);
        let reanchor =
            reachability(&scene, &flat_model(), clue.location, 20.0, 0.5).unwrap();
        let updated = base.apply_presence_clue(&scene, &clue, &reanchor, &aff).unwrap();
        assert_eq!(updated.p, base.p);
        assert_eq!(updated.q, base.q);
    }

    #[test]
    fn low_relevance_is_a_logged_no_op() {
        let scene = flat_scene(1, 12);
        let (base, aff) = pipeline(&scene, (0.0, 1.0), 20.0);
        let clue = presence_clue(&scene, (0.0, 9.0), Relevance::Low, 0.9);
        let reanchor =
            reachability(&scene, &flat_model(), clue.location, 20.0, 0.5).unwrap();
        let updated = base.apply_presence_clue(&scene, &clue, &reanchor, &aff).unwrap();
        assert_eq!(updated.p, base.p);
        assert!(matches!(updated.provenance.last(), Some(ProvenanceEntry::NoOp { .. })));
    }

    #[test]
    fn presence_pulls_mass_towards_the_clue() {
        let scene = flat_scene(3, 40);
        let (base, aff) = pipeline(&scene, (1.0, 2.0), 30.0);
        let clue_cell = (1usize, 30usize);
        let clue =
            presence_clue(&scene, (clue_cell.0 as f64, clue_cell.1 as f64), Relevance::High, 0.9);
        let reanchor =
            reachability(&scene, &flat_model(), clue.location, 30.0, 0.5).unwrap();
        let updated = base.apply_presence_clue(&scene, &clue, &reanchor, &aff).unwrap();

        let near_mass = |map: &PoaMap| -> f64 {
            map.p
                .iter()
                .enumerate()
                .filter(|(i, _)| {
                    let cell = &scene.cells[*i];
                    let dr = cell.row as f64 - clue_cell.0 as f64;
                    let dc = cell.col as f64 - clue_cell.1 as f64;
                    (dr * dr + dc * dc).sqrt() <= 5.0
                })
                .map(|(_, &p)| p)
                .sum()
        };
        assert!(near_mass(&updated) > near_mass(&base));
    }

    #[test]
    fn clue_outside_the_scene_is_rejected() {
        let scene = flat_scene(2, 2);
        let (base, aff) = pipeline(&scene, (0.0, 0.0), 20.0);
        let mut clue = presence_clue(&scene, (0.0, 1.0), Relevance::High, 0.9);
        clue.location = scene.latlon_of(10.0, 10.0);
        let reanchor =
            reachability(&scene, &flat_model(), scene.latlon_of(0.0, 1.0), 20.0, 0.5).unwrap();
        assert!(base.apply_presence_clue(&scene, &clue, &reanchor, &aff).is_err());
    }

    fn directional_clue(scene: &Scene, cell: (f64, f64), bearing: f64) -> ClueEvidence {
        ClueEvidence {
            location: scene.latlon_of(cell.0, cell.1),
            relevance: Relevance::High,
            kind: ClueKind::Directional { bearing_deg: bearing },
            confidence: 1.0,
            description: "boot prints in soft ground".into(),
        }
    }

    #[test]
    fn directional_boosts_along_the_bearing() {
        let scene = flat_scene(21, 21);
        let (base, _aff) = pipeline(&scene, (10.0, 10.0), 60.0);
        // Tracks at the center heading due north.
        let clue = directional_clue(&scene, (10.0, 10.0), 0.0);
        let updated = base
            .apply_directional_clue(&scene, &clue, &CorridorParams::for_scene(&scene))
            .unwrap();
        // Symmetric base surface: the on-ray cell must now beat its
        // mirror across the clue.
        let north = scene.index(15, 10);
        let south = scene.index(5, 10);
        assert!((base.p[north] - base.p[south]).abs() < 1e-15);
        assert!(updated.p[north] > updated.p[south]);
        // The opposite direction is suppressed at least 1 + λ e^{-18}-fold
        // less than on-ray: ratio of multipliers at equal distance.
        let ratio_north = updated.p[north] / base.p[north];
        let ratio_south = updated.p[south] / base.p[south];
        assert!(ratio_north > ratio_south);
    }

    #[test]
    fn directional_multiplier_peaks_at_one_plus_lambda() {
        let scene = flat_scene(1, 31);
        let (base, _aff) = pipeline(&scene, (0.0, 15.0), 60.0);
        let clue = directional_clue(&scene, (0.0, 15.0), 90.0); // due east
        let params = CorridorParams::for_scene(&scene);
        let updated = base.apply_directional_clue(&scene, &clue, &params).unwrap();
        // Pre-normalization multiplier at the clue cell itself is 1 + λ.
        let i = scene.index(0, 15);
        let j = scene.index(0, 16); // one cell east, on-ray
        let m_clue = updated.p[i] / base.p[i];
        let m_east = updated.p[j] / base.p[j];
        let lambda = clue.lambda();
        let d = scene.cell_size_m;
        let expected_east = 1.0 + lambda * (-d * d / (2.0 * params.sigma_corridor_m.powi(2))).exp();
        // Both are scaled by the same normalizer, so compare their ratio.
        assert!(((m_clue / m_east) - (1.0 + lambda) / expected_east).abs() < 1e-9);
    }

    #[test]
    fn directional_requires_a_directional_kind() {
        let scene = flat_scene(2, 2);
        let (base, _aff) = pipeline(&scene, (0.0, 0.0), 20.0);
        let clue = presence_clue(&scene, (0.0, 1.0), Relevance::High, 0.9);
        let err = base
            .apply_directional_clue(&scene, &clue, &CorridorParams::for_scene(&scene))
            .unwrap_err();
        assert!(err.to_string().contains("directional"), "{err}");
    }

    #[test]
    fn negative_search_discounts_the_swept_subcluster() {
        let doc = doc_from_grid(2, 4, 30.0, |_, c| {
            if c < 2 {
                FeatureType::Trail
            } else {
                FeatureType::RockBarren
            }
        });
        let scene = Scene::from_document(&doc, &SceneOptions::default()).unwrap();
        let map = build_poa(&scene, &uniform_reach(&scene), &unit_affinity(&scene)).unwrap();

        let unchanged = map.apply_negative_search(&scene, "Trail-0", 0.0).unwrap();
        assert_eq!(unchanged.p, map.p);

        let wiped = map.apply_negative_search(&scene, "Trail-0", 1.0).unwrap();
        assert!((wiped.q["Trail-0"]).abs() < 1e-15);
        assert!((wiped.q["Rock_Barren-0"] - 1.0).abs() < 1e-12);
        assert!((wiped.total_mass() - 1.0).abs() < 1e-9);

        // Two half-strength sweeps equal one three-quarter sweep.
        let twice = map
            .apply_negative_search(&scene, "Trail-0", 0.5)
            .unwrap()
            .apply_negative_search(&scene, "Trail-0", 0.5)
            .unwrap();
        let once = map.apply_negative_search(&scene, "Trail-0", 0.75).unwrap();
        for i in 0..map.p.len() {
            assert!((twice.p[i] - once.p[i]).abs() < 1e-9, "cell {i}");
        }
    }

    #[test]
    fn negative_search_validates_inputs() {
        let scene = flat_scene(2, 2);
        let map = build_poa(&scene, &uniform_reach(&scene), &unit_affinity(&scene)).unwrap();
        let err = map.apply_negative_search(&scene, "Nowhere-9", 0.5).unwrap_err();
        assert!(err.to_string().contains("Nowhere-9"), "{err}");
        assert!(map.apply_negative_search(&scene, "Trail-0", 1.5).is_err());
    }

    #[test]
    fn every_update_conserves_unit_mass() {
        let scene = flat_scene(4, 30);
        let (base, aff) = pipeline(&scene, (2.0, 3.0), 40.0);
        let clue = presence_clue(&scene, (1.0, 20.0), Relevance::High, 0.8);
        let reanchor =
            reachability(&scene, &flat_model(), clue.location, 40.0, 0.5).unwrap();
        let a = base.apply_presence_clue(&scene, &clue, &reanchor, &aff).unwrap();
        let b = a
            .apply_directional_clue(
                &scene,
                &directional_clue(&scene, (1.0, 20.0), 45.0),
                &CorridorParams::for_scene(&scene),
            )
            .unwrap();
        let some_id = scene.subclusters[0].id.clone();
        let c = b.apply_negative_search(&scene, &some_id, DEFAULT_DETECTION_PROB).unwrap();
        for map in [&a, &b, &c] {
            assert!((map.total_mass() - 1.0).abs() < 1e-9);
            let q_total: f64 = map.q.values().sum();
            assert!((q_total - 1.0).abs() < 1e-9);
        }
        assert_eq!(c.provenance.len(), 3);
    }

    #[test]
    fn replaying_the_provenance_reproduces_the_map_bit_for_bit() {
        let scene = flat_scene(4, 30);
        let (base, aff) = pipeline(&scene, (2.0, 3.0), 40.0);
        let clue = presence_clue(&scene, (1.0, 20.0), Relevance::High, 0.8);
        let reanchor =
            reachability(&scene, &flat_model(), clue.location, 40.0, 0.5).unwrap();
        let run = |()| -> PoaMap {
            base.apply_presence_clue(&scene, &clue, &reanchor, &aff)
                .unwrap()
                .apply_negative_search(&scene, &scene.subclusters[0].id, 0.8)
                .unwrap()
        };
        let first = run(());
        let second = run(());
        assert_eq!(first.p, second.p);
        assert_eq!(first.q, second.q);
        assert_eq!(first.provenance, second.provenance);
        assert_eq!(first.checksum(), second.checksum());
    }

    #[test]
    fn serialization_round_trips() {
        let scene = flat_scene(2, 3);
        let map = build_poa(&scene, &uniform_reach(&scene), &unit_affinity(&scene)).unwrap();
        let text = serde_json::to_string(&map).unwrap();
        let back: PoaMap = serde_json::from_str(&text).unwrap();
        assert_eq!(back, map);
    }
}
