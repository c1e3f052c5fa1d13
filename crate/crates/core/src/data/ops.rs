//! Dataset operations: generation from scripted rollouts, density-targeted
//! carving, coverage filtering, subsampling, label stripping, merging, and
//! per-dimension histograms.

use crate::data::{
    CarveMode, CarveSpec, LabeledDataset, MergeReward, Provenance, ProvenanceOp, Transition, UnlabeledDataset,
};
use crate::env::{EnvKind, Tier};
use crate::error::{LudorError, Result};
use crate::nn::{AdamState, Arch, Mlp, Rng};

/// Exactly `n` transitions from seeded rollouts of the tier's scripted
/// policy. `done` marks episode boundaries: true termination or the step
/// cap. A trailing episode may be cut short by the transition budget.
pub fn generate_dataset(env: EnvKind, tier: Tier, n: usize, seed: u64) -> Result<LabeledDataset> {
    if n == 0 {
        return Err(LudorError::Config("dataset size must be positive".into()));
    }
    let mut rng = Rng::seeded(seed).derive("generate");
    let cap = env.spec().max_episode_steps;
    let mut transitions = Vec::with_capacity(n);
    'outer: loop {
        let mut state = env.reset(&mut rng);
        for ep_step in 0..cap {
            let action = env.scripted_policy(tier, &state, &mut rng);
            let out = env.step(&state, &action, &mut rng)?;
            let done = out.done || ep_step + 1 == cap;
            transitions.push(Transition {
                state: state.clone(),
                action,
                reward: out.reward,
                next_state: out.next_state.clone(),
                done,
            });
            if transitions.len() == n {
                break 'outer;
            }
            if done {
                break;
            }
            state = out.next_state;
        }
    }
    Ok(LabeledDataset {
        env: env.name().into(),
        tier,
        transitions,
        provenance: Provenance::root(env, tier, n, seed),
    })
}

/// A selected value interval along one state dimension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    /// Set when the dimension is constant-valued and the interval collapsed
    /// to a point.
    pub degenerate: bool,
}

/// Smallest contiguous run of histogram bins whose total count reaches
/// `mass` of the data, ties broken by the leftmost start; bins partition
/// `[min, max]` evenly with the maximum falling into the last bin.
pub fn densest_segment(dataset: &LabeledDataset, dim: usize, bin_count: usize, mass: f64) -> Result<Segment> {
    if dataset.is_empty() {
        return Err(LudorError::Data("densest segment of an empty dataset".into()));
    }
    if dim >= dataset.state_dim() {
        return Err(LudorError::Config(format!(
            "dimension {dim} out of range for {}-dim states",
            dataset.state_dim()
        )));
    }
    let values: Vec<f64> = dataset.transitions.iter().map(|t| t.state[dim]).collect();
    densest_segment_values(&values, bin_count, mass)
}

/// Core of [`densest_segment`], usable on any value slice.
pub fn densest_segment_values(values: &[f64], bin_count: usize, mass: f64) -> Result<Segment> {
    if values.is_empty() {
        return Err(LudorError::Data("densest segment of an empty value set".into()));
    }
    if bin_count == 0 {
        return Err(LudorError::Config("histogram bin count must be positive".into()));
    }
    if !(mass > 0.0 && mass < 1.0) {
        return Err(LudorError::Config(format!("segment mass must lie in (0,1), got {mass}")));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return Ok(Segment { lo, hi, degenerate: true });
    }
    let counts = bin_counts(values, lo, hi, bin_count);
    let mut prefix = vec![0usize; bin_count + 1];
    for (i, &c) in counts.iter().enumerate() {
        prefix[i + 1] = prefix[i] + c;
    }
    let required = (mass * values.len() as f64).ceil() as usize;
    let width = (hi - lo) / bin_count as f64;
    for run_len in 1..=bin_count {
        for start in 0..=(bin_count - run_len) {
            if prefix[start + run_len] - prefix[start] >= required {
                return Ok(Segment {
                    lo: lo + start as f64 * width,
                    hi: lo + (start + run_len) as f64 * width,
                    degenerate: false,
                });
            }
        }
    }
    // Unreachable: the full run holds everything and mass < 1.
    Ok(Segment { lo, hi, degenerate: false })
}

fn bin_counts(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<usize> {
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    counts
}

/// What a carve did, for logging and oracle checks.
#[derive(Clone, Debug)]
pub struct CarveReport {
    pub interval: (f64, f64),
    pub in_range: usize,
    pub removed: usize,
    /// Constant-valued dimension collapsed the interval to a point.
    pub degenerate_interval: bool,
    /// Nothing fell inside the interval; dataset returned unchanged.
    pub empty_selection: bool,
}

/// Delete a uniformly-chosen `removal_ratio` fraction (rounded to nearest)
/// of the transitions whose `state[dim]` falls inside the selected interval
/// (inclusive on both ends). Survivors keep their order and values.
pub fn carve_ood(dataset: &LabeledDataset, spec: &CarveSpec, seed: u64) -> Result<(LabeledDataset, CarveReport)> {
    spec.validate(dataset.state_dim().max(spec.dim + 1))?;
    if dataset.is_empty() {
        return Err(LudorError::Data("carve of an empty dataset".into()));
    }
    if spec.dim >= dataset.state_dim() {
        return Err(LudorError::Config(format!(
            "carve dimension {} out of range for {}-dim states",
            spec.dim,
            dataset.state_dim()
        )));
    }
    let (interval, degenerate) = match spec.mode {
        CarveMode::Densest { bins, mass } => {
            let seg = densest_segment(dataset, spec.dim, bins, mass)?;
            ((seg.lo, seg.hi), seg.degenerate)
        }
        CarveMode::Explicit { lo, hi } => ((lo, hi), false),
    };
    let in_range: Vec<usize> = dataset
        .transitions
        .iter()
        .enumerate()
        .filter(|(_, t)| t.state[spec.dim] >= interval.0 && t.state[spec.dim] <= interval.1)
        .map(|(i, _)| i)
        .collect();
    let provenance = dataset.provenance.with(ProvenanceOp::Carve { spec: spec.clone(), seed });
    if in_range.is_empty() {
        return Ok((
            LabeledDataset { provenance, ..dataset.clone() },
            CarveReport {
                interval,
                in_range: 0,
                removed: 0,
                degenerate_interval: degenerate,
                empty_selection: true,
            },
        ));
    }
    let k = (spec.removal_ratio * in_range.len() as f64).round() as usize;
    let mut rng = Rng::seeded(seed).derive("carve");
    let picked = rng.indices_without_replacement(in_range.len(), k.min(in_range.len()));
    let mut remove = vec![false; dataset.len()];
    for p in picked {
        remove[in_range[p]] = true;
    }
    let transitions: Vec<Transition> = dataset
        .transitions
        .iter()
        .zip(&remove)
        .filter(|(_, &r)| !r)
        .map(|(t, _)| t.clone())
        .collect();
    let removed = dataset.len() - transitions.len();
    Ok((
        LabeledDataset { env: dataset.env.clone(), tier: dataset.tier, transitions, provenance },
        CarveReport {
            interval,
            in_range: in_range.len(),
            removed,
            degenerate_interval: degenerate,
            empty_selection: false,
        },
    ))
}

/// Retain the pairs whose `state[dim]` lies within the central quantile band
/// of width `keep_fraction`.
pub fn coverage_filter(dataset: &UnlabeledDataset, dim: usize, keep_fraction: f64) -> Result<UnlabeledDataset> {
    let band = quantile_band(
        dataset.pairs.iter().map(|(s, _)| s[dim]).collect(),
        dim,
        dataset.state_dim(),
        keep_fraction,
    )?;
    let pairs: Vec<_> = dataset
        .pairs
        .iter()
        .filter(|(s, _)| s[dim] >= band.0 && s[dim] <= band.1)
        .cloned()
        .collect();
    if pairs.is_empty() {
        return Err(LudorError::Data("coverage filter retained nothing".into()));
    }
    Ok(UnlabeledDataset {
        env: dataset.env.clone(),
        tier: dataset.tier,
        pairs,
        provenance: dataset.provenance.with(ProvenanceOp::CoverageFilter { dim, keep_fraction }),
    })
}

/// Labeled counterpart of [`coverage_filter`], used only when tracing a
/// reward-free dataset back to its source transitions: selects by the same
/// rule so indices align.
pub(crate) fn coverage_filter_labeled(
    dataset: &LabeledDataset,
    dim: usize,
    keep_fraction: f64,
) -> Result<LabeledDataset> {
    let band = quantile_band(
        dataset.transitions.iter().map(|t| t.state[dim]).collect(),
        dim,
        dataset.state_dim(),
        keep_fraction,
    )?;
    let transitions: Vec<_> = dataset
        .transitions
        .iter()
        .filter(|t| t.state[dim] >= band.0 && t.state[dim] <= band.1)
        .cloned()
        .collect();
    Ok(LabeledDataset {
        env: dataset.env.clone(),
        tier: dataset.tier,
        transitions,
        provenance: dataset.provenance.with(ProvenanceOp::CoverageFilter { dim, keep_fraction }),
    })
}

fn quantile_band(values: Vec<f64>, dim: usize, state_dim: usize, keep_fraction: f64) -> Result<(f64, f64)> {
    if !(keep_fraction > 0.0 && keep_fraction <= 1.0) {
        return Err(LudorError::Config(format!("keep fraction must lie in (0,1], got {keep_fraction}")));
    }
    if values.is_empty() {
        return Err(LudorError::Data("coverage filter of an empty dataset".into()));
    }
    if dim >= state_dim {
        return Err(LudorError::Config(format!("dimension {dim} out of range for {state_dim}-dim states")));
    }
    let mut sorted = values;
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q_lo = (1.0 - keep_fraction) / 2.0;
    Ok((quantile(&sorted, q_lo), quantile(&sorted, 1.0 - q_lo)))
}

/// Linear-interpolation quantile of a sorted slice.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let idx = pos.floor() as usize;
    if idx + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    let frac = pos - idx as f64;
    sorted[idx] + frac * (sorted[idx + 1] - sorted[idx])
}

/// ⌈fraction·N⌉ transitions drawn uniformly without replacement, input
/// order preserved.
pub fn subsample(dataset: &LabeledDataset, fraction: f64, seed: u64) -> Result<LabeledDataset> {
    let idx = subsample_indices(dataset.len(), fraction, seed)?;
    Ok(LabeledDataset {
        env: dataset.env.clone(),
        tier: dataset.tier,
        transitions: idx.iter().map(|&i| dataset.transitions[i].clone()).collect(),
        provenance: dataset.provenance.with(ProvenanceOp::Subsample { fraction, seed }),
    })
}

/// [`subsample`] for reward-free datasets.
pub fn subsample_unlabeled(dataset: &UnlabeledDataset, fraction: f64, seed: u64) -> Result<UnlabeledDataset> {
    let idx = subsample_indices(dataset.len(), fraction, seed)?;
    Ok(UnlabeledDataset {
        env: dataset.env.clone(),
        tier: dataset.tier,
        pairs: idx.iter().map(|&i| dataset.pairs[i].clone()).collect(),
        provenance: dataset.provenance.with(ProvenanceOp::Subsample { fraction, seed }),
    })
}

fn subsample_indices(n: usize, fraction: f64, seed: u64) -> Result<Vec<usize>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(LudorError::Config(format!("subsample fraction must lie in (0,1], got {fraction}")));
    }
    if n == 0 {
        return Err(LudorError::Data("subsample of an empty dataset".into()));
    }
    let k = ((fraction * n as f64).ceil() as usize).clamp(1, n);
    let mut rng = Rng::seeded(seed).derive("subsample");
    Ok(rng.indices_without_replacement(n, k))
}

/// Keep only the (state, action) pairs.
pub fn strip_labels(dataset: &LabeledDataset) -> UnlabeledDataset {
    UnlabeledDataset {
        env: dataset.env.clone(),
        tier: dataset.tier,
        pairs: dataset.transitions.iter().map(|t| (t.state.clone(), t.action.clone())).collect(),
        provenance: dataset.provenance.with(ProvenanceOp::Strip),
    }
}

/// Merge a reward-free dataset into a labeled one under a labeling rule,
/// then shuffle. Successors come from the provenance trace-back when
/// possible, otherwise from one deterministic dynamics step per pair.
pub fn replay_merge(
    labeled: &LabeledDataset,
    unlabeled: &UnlabeledDataset,
    reward: &MergeReward,
    shuffle_seed: u64,
) -> Result<LabeledDataset> {
    if labeled.is_empty() {
        return Err(LudorError::Data("merge into an empty labeled dataset".into()));
    }
    if !unlabeled.is_empty()
        && (labeled.state_dim() != unlabeled.state_dim() || labeled.action_dim() != unlabeled.action_dim())
    {
        return Err(LudorError::Data(format!(
            "merge dimension mismatch: labeled {}s/{}a vs unlabeled {}s/{}a",
            labeled.state_dim(),
            labeled.action_dim(),
            unlabeled.state_dim(),
            unlabeled.action_dim()
        )));
    }
    let rewards: Vec<f64> = match reward {
        MergeReward::Zero => vec![0.0; unlabeled.len()],
        MergeReward::Model { train_steps, hidden, lr, seed } => {
            let model = fit_reward_model(labeled, *train_steps, hidden, *lr, *seed)?;
            unlabeled
                .pairs
                .iter()
                .map(|(s, a)| {
                    let mut input = s.clone();
                    input.extend_from_slice(a);
                    model.act(&input)[0]
                })
                .collect()
        }
    };
    let injected = recover_transitions(unlabeled, &rewards, shuffle_seed)?;
    let mut transitions = labeled.transitions.clone();
    transitions.extend(injected);
    let mut rng = Rng::seeded(shuffle_seed).derive("merge-shuffle");
    rng.shuffle(&mut transitions);
    Ok(LabeledDataset {
        env: labeled.env.clone(),
        tier: labeled.tier,
        transitions,
        provenance: labeled.provenance.with(ProvenanceOp::Merge {
            unlabeled: unlabeled.provenance.clone(),
            reward: reward.clone(),
            shuffle_seed,
        }),
    })
}

/// Turn reward-free pairs into transitions with the given rewards.
fn recover_transitions(unlabeled: &UnlabeledDataset, rewards: &[f64], shuffle_seed: u64) -> Result<Vec<Transition>> {
    match crate::data::unstrip(unlabeled) {
        Ok(source) => Ok(source
            .transitions
            .into_iter()
            .zip(rewards)
            .map(|(t, &r)| Transition { reward: r, ..t })
            .collect()),
        Err(_) => {
            // Foreign provenance: reconstruct each successor with one
            // deterministic dynamics step.
            let env: EnvKind = unlabeled.env.parse()?;
            let mut rng = Rng::seeded(shuffle_seed).derive("merge-successors");
            unlabeled
                .pairs
                .iter()
                .zip(rewards)
                .map(|((s, a), &r)| {
                    let out = env.step(s, a, &mut rng)?;
                    Ok(Transition {
                        state: s.clone(),
                        action: a.clone(),
                        reward: r,
                        next_state: out.next_state,
                        done: out.done,
                    })
                })
                .collect()
        }
    }
}

/// Squared-error regression of rewards on (state, action).
pub fn fit_reward_model(
    labeled: &LabeledDataset,
    train_steps: u64,
    hidden: &[usize],
    lr: f64,
    seed: u64,
) -> Result<Mlp> {
    let in_dim = labeled.state_dim() + labeled.action_dim();
    let root = Rng::seeded(seed);
    let mut init_rng = root.derive("reward-model/init");
    let mut model = Mlp::init(Arch::mlp(in_dim, hidden, 1, None), &mut init_rng)?;
    let mut opt = AdamState::new(model.param_count(), lr);
    let mut batch_rng = root.derive("reward-model/batches");
    let batch = labeled.len().min(256);
    let mut flat = model.flatten();
    for step in 0..train_steps {
        let idx = batch_rng.indices_with_replacement(labeled.len(), batch);
        let mut xs = ndarray::Array2::zeros((batch, in_dim));
        let mut ys = Vec::with_capacity(batch);
        for (row, &i) in idx.iter().enumerate() {
            let t = &labeled.transitions[i];
            for (c, &v) in t.state.iter().chain(&t.action).enumerate() {
                xs[[row, c]] = v;
            }
            ys.push(t.reward);
        }
        let (pred, cache) = model.forward_cached(xs.view());
        let mut d = ndarray::Array2::zeros((batch, 1));
        let mut loss = 0.0;
        for r in 0..batch {
            let err = pred[[r, 0]] - ys[r];
            loss += err * err;
            d[[r, 0]] = 2.0 * err / batch as f64;
        }
        if !loss.is_finite() {
            return Err(LudorError::Training { step, msg: "reward model loss diverged".into() });
        }
        let grads = model.backward(&cache, d.view());
        opt.step(&mut flat, &grads.flatten())?;
        model.assign_flat(&flat)?;
    }
    Ok(model)
}

/// Per-dimension histogram summary backing the `data stats` report.
#[derive(Clone, Debug)]
pub struct DimHistogram {
    pub dim: usize,
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<usize>,
}

pub fn state_histograms(dataset: &LabeledDataset, bins: usize) -> Result<Vec<DimHistogram>> {
    if dataset.is_empty() {
        return Err(LudorError::Data("histograms of an empty dataset".into()));
    }
    if bins == 0 {
        return Err(LudorError::Config("histogram bin count must be positive".into()));
    }
    (0..dataset.state_dim())
        .map(|dim| {
            let values: Vec<f64> = dataset.transitions.iter().map(|t| t.state[dim]).collect();
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let counts = if lo == hi { vec![values.len()] } else { bin_counts(&values, lo, hi, bins) };
            Ok(DimHistogram { dim, lo, hi, counts })
        })
        .collect()
}
