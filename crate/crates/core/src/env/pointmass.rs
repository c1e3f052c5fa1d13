//! Point-mass navigation in the plane.
//!
//! State `[px, py, vx, vy]`, action `[ax, ay]` ∈ [−1, 1]², dt = 0.1.
//! Velocity integrates the clipped action plus a small Gaussian drift, then
//! position integrates velocity; both are clipped to the unit box. Reward is
//! the negative Euclidean distance of the post-step position to the goal at
//! the origin; an episode terminates when the mass enters the goal radius.

use crate::nn::Rng;

pub const STATE_DIM: usize = 4;
pub const ACTION_DIM: usize = 2;
pub const ACTION_BOUND: f64 = 1.0;
pub const MAX_EPISODE_STEPS: usize = 100;

pub const DT: f64 = 0.1;
pub const DRIFT_STD: f64 = 0.01;
pub const GOAL_RADIUS: f64 = 0.05;
/// Resets start at least this far from the goal.
pub const MIN_RESET_DISTANCE: f64 = 0.2;
pub const POSITION_BOUND: f64 = 1.0;
pub const VELOCITY_BOUND: f64 = 1.0;

/// PD gains of the scripted expert and the noise of the medium tier.
pub const EXPERT_KP: f64 = 4.0;
pub const EXPERT_KD: f64 = 2.0;
pub const MEDIUM_NOISE_STD: f64 = 0.9;

pub fn reset(rng: &mut Rng) -> Vec<f64> {
    // Rejection-sample a start position outside the minimum goal distance;
    // velocity starts at rest.
    loop {
        let px = rng.uniform(-0.9, 0.9);
        let py = rng.uniform(-0.9, 0.9);
        if (px * px + py * py).sqrt() >= MIN_RESET_DISTANCE {
            return vec![px, py, 0.0, 0.0];
        }
    }
}

pub fn step(state: &[f64], action: &[f64], rng: &mut Rng) -> (Vec<f64>, f64, bool) {
    let clip = |v: f64, b: f64| v.clamp(-b, b);
    let ax = clip(action[0], ACTION_BOUND);
    let ay = clip(action[1], ACTION_BOUND);
    let vx = clip(state[2] + DT * ax + DRIFT_STD * rng.standard_normal(), VELOCITY_BOUND);
    let vy = clip(state[3] + DT * ay + DRIFT_STD * rng.standard_normal(), VELOCITY_BOUND);
    let px = clip(state[0] + DT * vx, POSITION_BOUND);
    let py = clip(state[1] + DT * vy, POSITION_BOUND);
    let dist = (px * px + py * py).sqrt();
    let reward = -dist;
    let done = dist < GOAL_RADIUS;
    (vec![px, py, vx, vy], reward, done)
}

/// PD controller toward the goal: a = Kp·(goal − p) − Kd·v, clipped.
pub fn expert_action(state: &[f64]) -> Vec<f64> {
    let ax = (EXPERT_KP * (0.0 - state[0]) - EXPERT_KD * state[2]).clamp(-ACTION_BOUND, ACTION_BOUND);
    let ay = (EXPERT_KP * (0.0 - state[1]) - EXPERT_KD * state[3]).clamp(-ACTION_BOUND, ACTION_BOUND);
    vec![ax, ay]
}
