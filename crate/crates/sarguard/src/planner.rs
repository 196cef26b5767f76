//! Typed boundary to the external clue-analysis planner.
//!
//! The pipeline that captions clue imagery, ranks relevance, and drafts
//! search plans runs elsewhere (and is not deterministic). This module
//! pins down the record format it must emit and provides a scripted
//! replayer that plays back recorded outputs verbatim, validated against
//! the schema and the scene, so the guardrail stack can be tested on
//! frozen inputs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::LatLon;
use crate::poa::Relevance;
use crate::terrain::Scene;

const SCHEMA_VERSION: u32 = 1;

/// Structured description of what the clue imagery showed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caption {
    pub what: String,
    pub r#where: String,
    pub condition: String,
}

/// Stage output: what was found, how much it matters, and where.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClueReport {
    pub caption: Caption,
    pub relevance: Relevance,
    pub rationale: String,
    pub location: LatLon,
}

/// Who should act on the proposed plan first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Triage {
    /// Retask the drone that found the clue.
    CurrentDrone,
    /// Offer the tasks to the whole pool.
    DronePool,
    /// Park the plan for a human decision.
    HumanVet,
}

/// Ordered search actions, each naming a subcluster to sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanProposal {
    pub actions: Vec<String>,
    pub triage: Triage,
}

impl PlanProposal {
    pub fn validate(&self) -> Result<()> {
        for (i, action) in self.actions.iter().enumerate() {
            if self.actions[..i].contains(action) {
                return Err(Error::schema(format!(
                    "duplicate action id {action} in plan proposal"
                )));
            }
        }
        Ok(())
    }
}

/// One recorded planner output, as stored in vignette fixtures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapRecord {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub caption: Caption,
    pub relevance: Relevance,
    pub rationale: String,
    pub location: LatLon,
    pub actions: Vec<String>,
    pub triage: Triage,
}

fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

impl CapRecord {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::schema(format!(
                "unsupported planner record schema_version {}",
                self.schema_version
            )));
        }
        PlanProposal { actions: self.actions.clone(), triage: self.triage }.validate()
    }
}

/// Replay a recorded planner output. The record is validated against the
/// scene up front: unknown action ids or an off-scene clue location fail
/// here, not later during evaluation.
pub fn scripted_planner(record: &CapRecord, scene: &Scene) -> Result<(ClueReport, PlanProposal)> {
    record.validate()?;
    scene.cell_of(record.location)?;
    for action in &record.actions {
        scene.subcluster(action)?;
    }
    let report = ClueReport {
        caption: record.caption.clone(),
        relevance: record.relevance,
        rationale: record.rationale.clone(),
        location: record.location,
    };
    let proposal = PlanProposal { actions: record.actions.clone(), triage: record.triage };
    Ok((report, proposal))
}

/// True when a clue is relevant enough to steer the search.
pub fn relevance_gate(report: &ClueReport) -> bool {
    report.relevance.triggers_update()
}

/// Pluggable planner boundary. The scripted implementation replays
/// recordings; a live adapter could call out to an inference service with
/// the same contract.
pub trait PlannerPort {
    fn plan(&self, scene: &Scene) -> Result<(ClueReport, PlanProposal)>;
}

/// Deterministic planner backed by one recorded output.
#[derive(Debug, Clone)]
pub struct ScriptedPlanner {
    pub record: CapRecord,
}

impl PlannerPort for ScriptedPlanner {
    fn plan(&self, scene: &Scene) -> Result<(ClueReport, PlanProposal)> {
        scripted_planner(&self.record, scene)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terrain::testutil::doc_from_grid;
    use crate::terrain::{FeatureType, Scene, SceneOptions};

    // A scene with two labeled trails and a labeled pond, so records can
    // reference stable, human-assigned ids.
    fn labeled_scene() -> Scene {
        let mut doc = doc_from_grid(9, 12, 30.0, |r, c| {
            if r == 1 {
                FeatureType::Trail
            } else if r == 7 {
                FeatureType::Trail
            } else if (4..=5).contains(&r) && (4..=7).contains(&c) {
                FeatureType::Lake
            } else {
                FeatureType::OpenLowVegetation
            }
        });
        let mut labels = Vec::new();
        for r in 0..9usize {
            for c in 0..12usize {
                let name = if r == 1 {
                    "Trail-10"
                } else if r == 7 {
                    "Trail-11"
                } else if (4..=5).contains(&r) && (4..=7).contains(&c) {
                    "Lake-5"
                } else {
                    "Low_Vegetation-0"
                };
                labels.push(name.to_string());
            }
        }
        doc.cluster_labels = Some(labels);
        Scene::from_document(&doc, &SceneOptions::default()).unwrap()
    }

    fn sample_record(scene: &Scene) -> CapRecord {
        CapRecord {
            schema_version: 1,
            caption: Caption {
                what: "weathered blue backpack".into(),
                r#where: "snagged on brush beside the northern trail".into(),
                condition: "intact, zipped".into(),
            },
            relevance: Relevance::High,
            rationale: "matches the description given at intake".into(),
            location: scene.latlon_of(1.0, 6.0),
            actions: vec!["Trail-10".into(), "Trail-11".into(), "Lake-5".into()],
            triage: Triage::DronePool,
        }
    }

    #[test]
    fn recorded_outputs_replay_verbatim() {
        let scene = labeled_scene();
        let record = sample_record(&scene);
        let (report, proposal) = scripted_planner(&record, &scene).unwrap();
        assert_eq!(report.relevance, Relevance::High);
        assert_eq!(report.caption.what, "weathered blue backpack");
        assert_eq!(proposal.actions, vec!["Trail-10", "Trail-11", "Lake-5"]);
        assert_eq!(proposal.triage, Triage::DronePool);
    }

    #[test]
    fn irrelevant_clues_still_replay_but_fail_the_gate() {
        let scene = labeled_scene();
        let mut record = sample_record(&scene);
        record.relevance = Relevance::None;
        let (report, _proposal) = scripted_planner(&record, &scene).unwrap();
        assert_eq!(report.relevance, Relevance::None);
        assert!(!relevance_gate(&report));
    }

    #[test]
    fn the_gate_opens_at_medium() {
        let scene = labeled_scene();
        let mut record = sample_record(&scene);
        let expectations = [
            (Relevance::None, false),
            (Relevance::Low, false),
            (Relevance::Medium, true),
            (Relevance::High, true),
            (Relevance::VeryHigh, true),
        ];
        for (relevance, open) in expectations {
            record.relevance = relevance;
            let (report, _) = scripted_planner(&record, &scene).unwrap();
            assert_eq!(relevance_gate(&report), open, "{relevance:?}");
        }
    }

    #[test]
    fn unknown_action_ids_fail_at_load() {
        let scene = labeled_scene();
        let mut record = sample_record(&scene);
        record.actions.push("Ridge-99".into());
        let err = scripted_planner(&record, &scene).unwrap_err();
        assert!(err.to_string().contains("Ridge-99"), "{err}");
    }

    #[test]
    fn duplicate_actions_fail_at_load() {
        let scene = labeled_scene();
        let mut record = sample_record(&scene);
        record.actions.push("Trail-10".into());
        let err = scripted_planner(&record, &scene).unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
    }

    #[test]
    fn off_scene_clue_locations_fail_at_load() {
        let scene = labeled_scene();
        let mut record = sample_record(&scene);
        record.location = scene.latlon_of(40.0, 40.0);
        assert!(scripted_planner(&record, &scene).is_err());
    }

    #[test]
    fn malformed_records_are_schema_errors() {
        let text = r#"{ "caption": { "what": "boot" }, "relevance": "High" }"#;
        assert!(serde_json::from_str::<CapRecord>(text).is_err());

        let unknown_relevance = r#"{
            "caption": { "what": "a", "where": "b", "condition": "c" },
            "relevance": "Definitely",
            "rationale": "",
            "location": { "lat": 0.0, "lon": 0.0 },
            "actions": [],
            "triage": "DronePool"
        }"#;
        assert!(serde_json::from_str::<CapRecord>(unknown_relevance).is_err());
    }

    #[test]
    fn relevance_labels_match_the_ranking_vocabulary() {
        let labels: Vec<String> = [
            Relevance::VeryHigh,
            Relevance::High,
            Relevance::Medium,
            Relevance::Low,
            Relevance::None,
        ]
        .iter()
        .map(|r| serde_json::to_value(r).unwrap().as_str().unwrap().to_string())
        .collect();
        assert_eq!(labels, ["Very High", "High", "Medium", "Low", "None"]);
    }

    #[test]
    fn canonical_records_round_trip_byte_for_byte() {
        let scene = labeled_scene();
        let record = sample_record(&scene);
        let canonical = serde_json::to_string_pretty(&record).unwrap();
        let reparsed: CapRecord = serde_json::from_str(&canonical).unwrap();
        assert_eq!(reparsed, record);
        assert_eq!(serde_json::to_string_pretty(&reparsed).unwrap(), canonical);
    }

    #[test]
    fn the_port_trait_replays_like_the_free_function() {
        let scene = labeled_scene();
        let record = sample_record(&scene);
        let planner = ScriptedPlanner { record: record.clone() };
        let via_trait = planner.plan(&scene).unwrap();
        let via_fn = scripted_planner(&record, &scene).unwrap();
        assert_eq!(via_trait, via_fn);
    }
}
