//! Normalized scoring against frozen per-environment reference returns.
//!
//! A score of 0 corresponds to the mean return of the random policy and 100
//! to the mean return of the scripted expert, both measured once over a
//! fixed seed set and frozen into `assets/score_refs.json` (compiled into
//! the binary). The README documents how the anchors were produced.

use serde::{Deserialize, Serialize};

use crate::error::{LudorError, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScoreReference {
    pub env: String,
    pub random_mean_return: f64,
    pub expert_mean_return: f64,
    /// How the anchors were measured (episodes per policy, base seed).
    pub n_episodes: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScoreReferenceFile {
    pub format_version: u32,
    pub references: Vec<ScoreReference>,
}

const EMBEDDED: &str = include_str!("../../assets/score_refs.json");

/// The reference table shipped with the crate.
pub fn reference_table() -> &'static ScoreReferenceFile {
    use std::sync::OnceLock;
    static TABLE: OnceLock<ScoreReferenceFile> = OnceLock::new();
    TABLE.get_or_init(|| serde_json::from_str(EMBEDDED).expect("embedded score reference file is valid"))
}

pub fn reference_for(env_name: &str) -> Result<&'static ScoreReference> {
    reference_table()
        .references
        .iter()
        .find(|r| r.env == env_name)
        .ok_or_else(|| LudorError::Config(format!("no score reference for environment '{env_name}'")))
}

/// Affine map sending the random reference to 0 and the expert reference to
/// 100.
pub fn normalized_score(raw_return: f64, reference: &ScoreReference) -> Result<f64> {
    let span = reference.expert_mean_return - reference.random_mean_return;
    if !(span.is_finite() && span > 0.0) {
        return Err(LudorError::Config(format!(
            "degenerate score reference for '{}': expert {} must exceed random {}",
            reference.env, reference.expert_mean_return, reference.random_mean_return
        )));
    }
    Ok(100.0 * (raw_return - reference.random_mean_return) / span)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> ScoreReference {
        ScoreReference {
            env: "test".into(),
            random_mean_return: -80.0,
            expert_mean_return: -10.0,
            n_episodes: 100,
            seed: 0,
        }
    }

    #[test]
    fn anchors_map_to_zero_and_hundred() {
        let r = reference();
        assert_eq!(normalized_score(-80.0, &r).unwrap(), 0.0);
        assert_eq!(normalized_score(-10.0, &r).unwrap(), 100.0);
    }

    #[test]
    fn midpoint_maps_to_fifty() {
        let r = reference();
        assert!((normalized_score(-45.0, &r).unwrap() - 50.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_reference_is_rejected() {
        let mut r = reference();
        r.expert_mean_return = r.random_mean_return;
        assert!(matches!(normalized_score(0.0, &r), Err(LudorError::Config(_))));
    }

    #[test]
    fn embedded_table_has_both_environments() {
        assert!(reference_for("pointmass-2d").is_ok());
        assert!(reference_for("pendulum-swingup").is_ok());
        for r in &reference_table().references {
            assert!(r.expert_mean_return > r.random_mean_return);
        }
    }
}
