//! Mission-time feasibility: can a drone fly the proposed action and cover
//! it on the battery it has left?
//!
//! The estimate is deliberately coarse. Travel time is straight-line
//! distance at cruise speed; coverage time is a fixed cost per cell swept.
//! An action passes when the projected total fits inside a safety fraction
//! of the remaining battery. A failed check never rejects a plan on its
//! own; it demotes an ACCEPT to ALERT so the operator sees the resource
//! problem, and it never upgrades anything.

use serde::{Deserialize, Serialize};

use crate::decision::{Decision, Verdict};
use crate::error::{Error, Result};
use crate::geo::LatLon;

pub const DEFAULT_CRUISE_SPEED_MPS: f64 = 12.0;
pub const DEFAULT_SECONDS_PER_CELL: f64 = 6.0;
pub const DEFAULT_BATTERY_SAFETY_FACTOR: f64 = 0.8;

/// A drone available to the mission, as reported by its ground station.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroneStatus {
    pub id: String,
    pub battery_minutes: f64,
    pub position: LatLon,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostParams {
    pub cruise_speed_mps: f64,
    pub seconds_per_cell: f64,
    /// Fraction of remaining battery a mission may consume.
    pub battery_safety_factor: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        CostParams {
            cruise_speed_mps: DEFAULT_CRUISE_SPEED_MPS,
            seconds_per_cell: DEFAULT_SECONDS_PER_CELL,
            battery_safety_factor: DEFAULT_BATTERY_SAFETY_FACTOR,
        }
    }
}

impl CostParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.cruise_speed_mps.is_finite() && self.cruise_speed_mps > 0.0) {
            return Err(Error::invalid("cruise_speed_mps must be positive"));
        }
        if !(self.seconds_per_cell.is_finite() && self.seconds_per_cell >= 0.0) {
            return Err(Error::invalid("seconds_per_cell must be non-negative"));
        }
        if !(self.battery_safety_factor.is_finite()
            && self.battery_safety_factor > 0.0
            && self.battery_safety_factor <= 1.0)
        {
            return Err(Error::invalid("battery_safety_factor must be in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CostVerdict {
    Pass,
    Flag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostEstimate {
    pub distance_m: f64,
    pub cell_count: usize,
    pub travel_minutes: f64,
    pub coverage_minutes: f64,
    pub total_minutes: f64,
    /// Battery the mission is allowed to burn, after the safety factor.
    pub usable_minutes: f64,
    pub margin_minutes: f64,
    pub verdict: CostVerdict,
}

/// Project the mission time for sweeping `cell_count` cells at
/// `distance_m` from the drone, against `battery_minutes` of charge.
pub fn estimate_cost(
    distance_m: f64,
    cell_count: usize,
    battery_minutes: f64,
    params: &CostParams,
) -> Result<CostEstimate> {
    params.validate()?;
    if !(distance_m.is_finite() && distance_m >= 0.0) {
        return Err(Error::invalid("distance_m must be non-negative"));
    }
    if !(battery_minutes.is_finite() && battery_minutes >= 0.0) {
        return Err(Error::invalid("battery_minutes must be non-negative"));
    }
    let travel_minutes = distance_m / params.cruise_speed_mps / 60.0;
    let coverage_minutes = cell_count as f64 * params.seconds_per_cell / 60.0;
    let total_minutes = travel_minutes + coverage_minutes;
    let usable_minutes = params.battery_safety_factor * battery_minutes;
    let margin_minutes = usable_minutes - total_minutes;
    let verdict = if total_minutes <= usable_minutes {
        CostVerdict::Pass
    } else {
        CostVerdict::Flag
    };
    Ok(CostEstimate {
        distance_m,
        cell_count,
        travel_minutes,
        coverage_minutes,
        total_minutes,
        usable_minutes,
        margin_minutes,
        verdict,
    })
}

/// Fold feasibility into plan verdicts. An ACCEPT whose mission cost was
/// flagged becomes an ALERT tagged as a resource demotion; ALERT and
/// REJECT pass through untouched, so the gate can only make verdicts more
/// cautious.
pub fn gate_verdicts(verdicts: &[Verdict], costs: &[CostEstimate]) -> Result<Vec<Verdict>> {
    if verdicts.len() != costs.len() {
        return Err(Error::invalid(format!(
            "{} verdicts but {} cost estimates",
            verdicts.len(),
            costs.len()
        )));
    }
    Ok(verdicts
        .iter()
        .zip(costs)
        .map(|(v, cost)| {
            if v.decision == Decision::Accept && cost.verdict == CostVerdict::Flag {
                let mut demoted = v.clone();
                demoted.decision = Decision::Alert;
                demoted.resource_downgraded = true;
                demoted.rationale = format!(
                    "{}; demoted to ALERT: projected {:.1} min exceeds the {:.1} min \
                     battery margin",
                    v.rationale, cost.total_minutes, cost.usable_minutes
                );
                demoted
            } else {
                v.clone()
            }
        })
        .collect())
}
