//! Plan guardrails: score a proposed search action against the current
//! belief and return ACCEPT, ALERT, or REJECT.
//!
//! Two statistics drive the verdict. The ratio-to-top `ρ` compares the
//! candidate's score to the best available one, and the percentile rank `r`
//! places it within the whole candidate field (descending, ties averaged).
//! Thresholds on both adapt to how peaked the belief is: normalized entropy
//! `H` interpolates each threshold linearly from its strict value (H = 0,
//! confident belief, demand near-top picks) to its loose value (H = 1, flat
//! belief, tolerate exploration).
//!
//! ACCEPT requires both statistics to clear their accept thresholds; ALERT
//! needs either to clear its alert threshold; anything else is REJECT.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Candidate scores keyed by subcluster id. `decide` accepts raw
/// (unnormalized) scores.
pub type CandidateScores = BTreeMap<String, f64>;

const SUM_TOLERANCE: f64 = 1e-6;

// ── Statistics ──────────────────────────────────────────────────────────

fn validate_scores(scores: &CandidateScores) -> Result<()> {
    if scores.is_empty() {
        return Err(Error::DegenerateScores);
    }
    for (id, &v) in scores {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::invalid(format!(
                "score for {id} must be finite and non-negative"
            )));
        }
    }
    Ok(())
}

/// Candidate's score divided by the best score in the field.
pub fn ratio_to_top(scores: &CandidateScores, candidate: &str) -> Result<f64> {
    validate_scores(scores)?;
    let own = *scores
        .get(candidate)
        .ok_or_else(|| Error::UnknownSubcluster(candidate.to_string()))?;
    let top = scores.values().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top <= 0.0 {
        return Err(Error::DegenerateScores);
    }
    Ok(own / top)
}

/// Percentile rank of the candidate, 1.0 for the best score and 0.0 for
/// the worst. Scores are ranked descending; tied scores share the mean of
/// the ranks they span. A single candidate ranks 1.0.
pub fn percentile_rank(scores: &CandidateScores, candidate: &str) -> Result<f64> {
    validate_scores(scores)?;
    let own = *scores
        .get(candidate)
        .ok_or_else(|| Error::UnknownSubcluster(candidate.to_string()))?;
    let n = scores.len();
    if n == 1 {
        return Ok(1.0);
    }
    let better = scores.values().filter(|&&v| v > own).count();
    let tied = scores.values().filter(|&&v| v == own).count();
    let avg_rank = better as f64 + (tied as f64 + 1.0) / 2.0;
    Ok(1.0 - (avg_rank - 1.0) / (n as f64 - 1.0))
}

/// Shannon entropy of a normalized score distribution, scaled by `ln n`
/// into [0, 1]. Zero entries contribute nothing; a single candidate has
/// entropy 0. The scores must already sum to 1.
pub fn normalized_entropy(scores: &CandidateScores) -> Result<f64> {
    validate_scores(scores)?;
    let total: f64 = scores.values().sum();
    if (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::invalid(format!(
            "entropy needs a normalized distribution; scores sum to {total}"
        )));
    }
    let n = scores.len();
    if n == 1 {
        return Ok(0.0);
    }
    // Sum in value order so relabelled but otherwise identical score sets
    // produce bit-identical entropy.
    let mut values: Vec<f64> = scores.values().copied().filter(|&v| v > 0.0).collect();
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    let h: f64 = values.iter().map(|&v| -v * v.ln()).sum();
    Ok((h / (n as f64).ln()).clamp(0.0, 1.0))
}

// ── Thresholds ──────────────────────────────────────────────────────────

/// A threshold with its confident-belief and flat-belief endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPair {
    pub strict: f64,
    pub loose: f64,
}

impl ThresholdPair {
    pub const fn new(strict: f64, loose: f64) -> Self {
        ThresholdPair { strict, loose }
    }

    fn at(&self, entropy: f64) -> f64 {
        self.strict + entropy * (self.loose - self.strict)
    }

    fn validate(&self, name: &str) -> Result<()> {
        for (end, v) in [("strict", self.strict), ("loose", self.loose)] {
            if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
                return Err(Error::invalid(format!("{name}.{end} must be in [0, 1]")));
            }
        }
        if self.strict < self.loose {
            return Err(Error::invalid(format!(
                "{name}: strict endpoint must not be below the loose one"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThresholdConfig {
    pub rank_accept: ThresholdPair,
    pub ratio_accept: ThresholdPair,
    pub rank_alert: ThresholdPair,
    pub ratio_alert: ThresholdPair,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig {
            rank_accept: ThresholdPair::new(0.90, 0.70),
            ratio_accept: ThresholdPair::new(0.50, 0.25),
            rank_alert: ThresholdPair::new(0.60, 0.35),
            ratio_alert: ThresholdPair::new(0.30, 0.10),
        }
    }
}

impl ThresholdConfig {
    pub fn validate(&self) -> Result<()> {
        self.rank_accept.validate("rank_accept")?;
        self.ratio_accept.validate("ratio_accept")?;
        self.rank_alert.validate("rank_alert")?;
        self.ratio_alert.validate("ratio_alert")?;
        // Alert gates must never sit above accept gates, at any entropy.
        // The interpolation is linear, so sampling the endpoints and the
        // midpoint is enough.
        for h in [0.0, 0.5, 1.0] {
            if self.rank_alert.at(h) > self.rank_accept.at(h) {
                return Err(Error::invalid(format!(
                    "rank_alert exceeds rank_accept at entropy {h}"
                )));
            }
            if self.ratio_alert.at(h) > self.ratio_accept.at(h) {
                return Err(Error::invalid(format!(
                    "ratio_alert exceeds ratio_accept at entropy {h}"
                )));
            }
        }
        Ok(())
    }
}

/// Thresholds after entropy interpolation, as used for one verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolvedThresholds {
    pub rank_accept: f64,
    pub ratio_accept: f64,
    pub rank_alert: f64,
    pub ratio_alert: f64,
}

/// Interpolate every threshold for a belief of the given entropy.
pub fn resolve_thresholds(config: &ThresholdConfig, entropy: f64) -> Result<ResolvedThresholds> {
    config.validate()?;
    if !(entropy.is_finite() && (0.0..=1.0).contains(&entropy)) {
        return Err(Error::invalid("entropy must be in [0, 1]"));
    }
    Ok(ResolvedThresholds {
        rank_accept: config.rank_accept.at(entropy),
        ratio_accept: config.ratio_accept.at(entropy),
        rank_alert: config.rank_alert.at(entropy),
        ratio_alert: config.ratio_alert.at(entropy),
    })
}

// ── Verdicts ────────────────────────────────────────────────────────────

/// Ordered by desirability: ACCEPT is best, REJECT is worst.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Decision {
    Accept,
    Alert,
    Reject,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Decision::Accept => "ACCEPT",
            Decision::Alert => "ALERT",
            Decision::Reject => "REJECT",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub candidate: String,
    pub decision: Decision,
    pub rank_percentile: f64,
    pub ratio_to_top: f64,
    pub entropy: f64,
    pub thresholds: ResolvedThresholds,
    pub rationale: String,
    /// Set when a feasibility gate demoted an ACCEPT to ALERT.
    #[serde(default)]
    pub resource_downgraded: bool,
}

fn classify(r: f64, rho: f64, t: &ResolvedThresholds) -> (Decision, String) {
    if r >= t.rank_accept && rho >= t.ratio_accept {
        let why = format!(
            "rank {r:.3} and ratio {rho:.3} clear the accept gates ({:.3}, {:.3})",
            t.rank_accept, t.ratio_accept
        );
        return (Decision::Accept, why);
    }
    if r >= t.rank_alert || rho >= t.ratio_alert {
        let why = format!(
            "short of accept gates ({:.3}, {:.3}) but rank {r:.3} or ratio {rho:.3} \
             clears an alert gate ({:.3}, {:.3})",
            t.rank_accept, t.ratio_accept, t.rank_alert, t.ratio_alert
        );
        return (Decision::Alert, why);
    }
    let why = format!(
        "rank {r:.3} and ratio {rho:.3} fall below the alert gates ({:.3}, {:.3})",
        t.rank_alert, t.ratio_alert
    );
    (Decision::Reject, why)
}

/// Judge one candidate against the whole score field. Raw scores are
/// normalized internally, so any non-negative weights work.
pub fn decide(
    scores: &CandidateScores,
    candidate: &str,
    config: &ThresholdConfig,
) -> Result<Verdict> {
    validate_scores(scores)?;
    config.validate()?;
    let total: f64 = scores.values().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateScores);
    }
    let normalized: CandidateScores =
        scores.iter().map(|(k, &v)| (k.clone(), v / total)).collect();

    let r = percentile_rank(&normalized, candidate)?;
    let rho = ratio_to_top(&normalized, candidate)?;
    let entropy = normalized_entropy(&normalized)?;
    let thresholds = resolve_thresholds(config, entropy)?;
    let (decision, rationale) = classify(r, rho, &thresholds);

    Ok(Verdict {
        candidate: candidate.to_string(),
        decision,
        rank_percentile: r,
        ratio_to_top: rho,
        entropy,
        thresholds,
        rationale,
        resource_downgraded: false,
    })
}

/// Re-derive the decision from a verdict's recorded statistics and
/// thresholds. Useful for auditing stored verdicts.
pub fn rederive(verdict: &Verdict) -> Decision {
    let base = classify(verdict.rank_percentile, verdict.ratio_to_top, &verdict.thresholds).0;
    if verdict.resource_downgraded && base == Decision::Accept {
        Decision::Alert
    } else {
        base
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanEvaluation {
    /// One verdict per proposed action, in plan order.
    pub verdicts: Vec<Verdict>,
    /// The most favorable decision across the plan; REJECT for an empty
    /// plan.
    pub summary: Decision,
}

/// Evaluate every action of a proposed plan. Unknown action ids fail the
/// whole evaluation.
pub fn evaluate_plan(
    scores: &CandidateScores,
    actions: &[String],
    config: &ThresholdConfig,
) -> Result<PlanEvaluation> {
    let mut verdicts = Vec::with_capacity(actions.len());
    for action in actions {
        verdicts.push(decide(scores, action, config)?);
    }
    let summary = verdicts.iter().map(|v| v.decision).min().unwrap_or(Decision::Reject);
    Ok(PlanEvaluation { verdicts, summary })
}
