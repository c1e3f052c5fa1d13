//! Minimal dense neural-network engine: multilayer perceptrons with explicit
//! forward/backward passes, Adam optimization, parameter-space EMA blending,
//! seeded deterministic randomness, finite-difference gradient checking, and
//! a binary checkpoint format.

pub mod adam;
pub mod check;
pub mod checkpoint;
pub mod mlp;
pub mod rng;

pub use adam::AdamState;
pub use checkpoint::{load_checkpoint, save_checkpoint, CheckpointMeta};
pub use mlp::{ema_blend, Activation, Arch, ForwardCache, Mlp, MlpGrads};
pub use rng::Rng;
