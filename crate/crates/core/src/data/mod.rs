//! Offline datasets: generation, corruption, filtering, serialization, and
//! provenance replay.
//!
//! Every dataset carries a provenance record — the full chain of seeded
//! operations that produced it. Replaying the record reproduces the dataset
//! byte for byte, which is both the reproducibility story and the mechanism
//! by which reward-free (state, action) sets can be traced back to their
//! source transitions when a baseline needs successors.

pub mod io;
pub mod ops;

use serde::{Deserialize, Serialize};

use crate::env::{EnvKind, Tier};
use crate::error::{LudorError, Result};

/// One environment transition.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action: Vec<f64>,
    pub reward: f64,
    pub next_state: Vec<f64>,
    pub done: bool,
}

/// Reward-carrying dataset used to train the critic and actor.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    pub env: String,
    pub tier: Tier,
    pub transitions: Vec<Transition>,
    pub provenance: Provenance,
}

/// Reward-free (state, action) pairs used to train the teacher.
#[derive(Clone, Debug, PartialEq)]
pub struct UnlabeledDataset {
    pub env: String,
    pub tier: Tier,
    pub pairs: Vec<(Vec<f64>, Vec<f64>)>,
    pub provenance: Provenance,
}

impl LabeledDataset {
    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn state_dim(&self) -> usize {
        self.transitions.first().map_or(0, |t| t.state.len())
    }

    pub fn action_dim(&self) -> usize {
        self.transitions.first().map_or(0, |t| t.action.len())
    }
}

impl UnlabeledDataset {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn state_dim(&self) -> usize {
        self.pairs.first().map_or(0, |p| p.0.len())
    }

    pub fn action_dim(&self) -> usize {
        self.pairs.first().map_or(0, |p| p.1.len())
    }
}

/// How a carve selects its target interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CarveMode {
    /// Smallest contiguous histogram-bin run holding at least `mass` of the
    /// empirical mass.
    Densest { bins: usize, mass: f64 },
    /// Fixed interval.
    Explicit { lo: f64, hi: f64 },
}

/// Deletion of a fraction of the transitions whose `state[dim]` lies in the
/// selected interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarveSpec {
    pub dim: usize,
    pub removal_ratio: f64,
    #[serde(flatten)]
    pub mode: CarveMode,
}

impl CarveSpec {
    pub fn densest(dim: usize, removal_ratio: f64, bins: usize, mass: f64) -> CarveSpec {
        CarveSpec { dim, removal_ratio, mode: CarveMode::Densest { bins, mass } }
    }

    pub fn validate(&self, state_dim: usize) -> Result<()> {
        if self.dim >= state_dim {
            return Err(LudorError::Config(format!(
                "carve dimension {} out of range for {state_dim}-dim states",
                self.dim
            )));
        }
        if !(0.0..=1.0).contains(&self.removal_ratio) {
            return Err(LudorError::Config(format!(
                "removal ratio must lie in [0,1], got {}",
                self.removal_ratio
            )));
        }
        match self.mode {
            CarveMode::Densest { bins, mass } => {
                if bins == 0 {
                    return Err(LudorError::Config("histogram bin count must be positive".into()));
                }
                if !(mass > 0.0 && mass < 1.0) {
                    return Err(LudorError::Config(format!("segment mass must lie in (0,1), got {mass}")));
                }
            }
            CarveMode::Explicit { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                    return Err(LudorError::Config(format!("invalid explicit carve interval [{lo}, {hi}]")));
                }
            }
        }
        Ok(())
    }
}

/// One step in a dataset's history.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ProvenanceOp {
    Generate { env: EnvKind, tier: Tier, n: usize, seed: u64 },
    Carve { spec: CarveSpec, seed: u64 },
    Subsample { fraction: f64, seed: u64 },
    CoverageFilter { dim: usize, keep_fraction: f64 },
    Strip,
    /// Merge of a reward-free set into a labeled set. `reward` describes the
    /// labeling rule: zero rewards, or a seeded reward-model fit.
    Merge { unlabeled: Provenance, reward: MergeReward, shuffle_seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MergeReward {
    Zero,
    Model { train_steps: u64, hidden: Vec<usize>, lr: f64, seed: u64 },
}

/// Ordered operation chain; replayable from the recorded seeds.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance(pub Vec<ProvenanceOp>);

impl Provenance {
    pub fn root(env: EnvKind, tier: Tier, n: usize, seed: u64) -> Provenance {
        Provenance(vec![ProvenanceOp::Generate { env, tier, n, seed }])
    }

    pub fn with(&self, op: ProvenanceOp) -> Provenance {
        let mut ops = self.0.clone();
        ops.push(op);
        Provenance(ops)
    }
}

/// Outcome of replaying a provenance record.
#[derive(Clone, Debug)]
pub enum ReplayedDataset {
    Labeled(LabeledDataset),
    Unlabeled(UnlabeledDataset),
}

/// Re-execute a provenance record from its recorded seeds.
pub fn replay(provenance: &Provenance) -> Result<ReplayedDataset> {
    let mut ops = provenance.0.iter();
    let mut labeled = match ops.next() {
        Some(ProvenanceOp::Generate { env, tier, n, seed }) => ops::generate_dataset(*env, *tier, *n, *seed)?,
        other => {
            return Err(LudorError::Data(format!(
                "provenance must start with a generate op, found {other:?}"
            )))
        }
    };
    let mut unlabeled: Option<UnlabeledDataset> = None;
    for op in ops {
        match (op, unlabeled.take()) {
            (ProvenanceOp::Carve { spec, seed }, None) => {
                labeled = ops::carve_ood(&labeled, spec, *seed)?.0;
            }
            (ProvenanceOp::Subsample { fraction, seed }, None) => {
                labeled = ops::subsample(&labeled, *fraction, *seed)?;
            }
            (ProvenanceOp::Strip, None) => {
                unlabeled = Some(ops::strip_labels(&labeled));
            }
            (ProvenanceOp::Merge { unlabeled: uprov, reward, shuffle_seed }, None) => {
                let u = match replay(uprov)? {
                    ReplayedDataset::Unlabeled(u) => u,
                    ReplayedDataset::Labeled(_) => {
                        return Err(LudorError::Data("merge provenance must replay to an unlabeled set".into()))
                    }
                };
                labeled = ops::replay_merge(&labeled, &u, reward, *shuffle_seed)?;
            }
            (ProvenanceOp::Subsample { fraction, seed }, Some(u)) => {
                unlabeled = Some(ops::subsample_unlabeled(&u, *fraction, *seed)?);
            }
            (ProvenanceOp::CoverageFilter { dim, keep_fraction }, Some(u)) => {
                unlabeled = Some(ops::coverage_filter(&u, *dim, *keep_fraction)?);
            }
            (op, state) => {
                return Err(LudorError::Data(format!(
                    "provenance op {op:?} is invalid for a {} dataset",
                    if state.is_some() { "reward-free" } else { "labeled" }
                )));
            }
        }
    }
    Ok(match unlabeled {
        Some(u) => ReplayedDataset::Unlabeled(u),
        None => ReplayedDataset::Labeled(labeled),
    })
}

/// Recover the labeled transitions behind a reward-free dataset by replaying
/// its provenance with the strip removed: the filtering and subsampling ops
/// select the same indices on the labeled chain, so the result aligns
/// pairwise with the input.
pub fn unstrip(u: &UnlabeledDataset) -> Result<LabeledDataset> {
    if !u.provenance.0.iter().any(|op| matches!(op, ProvenanceOp::Strip)) {
        return Err(LudorError::Data("dataset provenance has no strip op to undo".into()));
    }
    let mut labeled = match u.provenance.0.first() {
        Some(ProvenanceOp::Generate { env, tier, n, seed }) => ops::generate_dataset(*env, *tier, *n, *seed)?,
        other => return Err(LudorError::Data(format!("provenance must start with a generate op, found {other:?}"))),
    };
    for op in &u.provenance.0[1..] {
        labeled = match op {
            ProvenanceOp::Strip => labeled,
            ProvenanceOp::Carve { spec, seed } => ops::carve_ood(&labeled, spec, *seed)?.0,
            ProvenanceOp::Subsample { fraction, seed } => ops::subsample(&labeled, *fraction, *seed)?,
            ProvenanceOp::CoverageFilter { dim, keep_fraction } => {
                ops::coverage_filter_labeled(&labeled, *dim, *keep_fraction)?
            }
            other => {
                return Err(LudorError::Data(format!("cannot trace op {other:?} back to labeled transitions")))
            }
        };
    }
    if labeled.len() != u.len() {
        return Err(LudorError::Data(format!(
            "provenance trace-back produced {} transitions for {} pairs",
            labeled.len(),
            u.len()
        )));
    }
    for (t, (s, a)) in labeled.transitions.iter().zip(&u.pairs) {
        if &t.state != s || &t.action != a {
            return Err(LudorError::Data("provenance trace-back does not align with the dataset".into()));
        }
    }
    Ok(labeled)
}
