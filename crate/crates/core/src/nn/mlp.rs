//! Dense multilayer perceptrons with explicit forward/backward passes.
//!
//! Parameters live in per-layer `[out × in]` weight matrices plus bias
//! vectors and convert losslessly to/from one flat `Vec<f64>` (layer order:
//! weights row-major, then bias). The flat form is what the optimizer, the
//! EMA blend, checkpoints and the finite-difference checks operate on.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{LudorError, Result};
use crate::nn::rng::Rng;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Tanh,
    Identity,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
            Activation::Identity => z,
        }
    }

    /// Derivative expressed through the activation value `h = f(z)`; valid
    /// for all three supported activations and avoids caching
    /// pre-activations. Relu uses the h=0 subgradient 0.
    fn grad_from_output(self, h: f64) -> f64 {
        match self {
            Activation::Relu => {
                if h > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - h * h,
            Activation::Identity => 1.0,
        }
    }
}

/// Architecture descriptor: layer widths (input first), one activation per
/// weight layer, and an optional final tanh squash scaled to an action bound.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Arch {
    pub dims: Vec<usize>,
    pub acts: Vec<Activation>,
    pub squash: Option<f64>,
}

impl Arch {
    /// Relu hidden layers, identity output; the default family used by every
    /// network in the crate.
    pub fn mlp(input: usize, hidden: &[usize], output: usize, squash: Option<f64>) -> Arch {
        let mut dims = Vec::with_capacity(hidden.len() + 2);
        dims.push(input);
        dims.extend_from_slice(hidden);
        dims.push(output);
        let mut acts = vec![Activation::Relu; hidden.len()];
        acts.push(Activation::Identity);
        Arch { dims, acts, squash }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.len() < 2 {
            return Err(LudorError::Config("architecture needs at least one layer".into()));
        }
        if self.acts.len() != self.dims.len() - 1 {
            return Err(LudorError::Config(format!(
                "architecture has {} layers but {} activations",
                self.dims.len() - 1,
                self.acts.len()
            )));
        }
        if self.dims.iter().any(|&d| d == 0) {
            return Err(LudorError::Config("zero-width layer".into()));
        }
        if let Some(b) = self.squash {
            if !(b.is_finite() && b > 0.0) {
                return Err(LudorError::Config(format!("squash bound must be finite and positive, got {b}")));
            }
        }
        Ok(())
    }

    pub fn n_layers(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.dims.last().unwrap()
    }

    /// Length of the flat parameter vector.
    pub fn param_count(&self) -> usize {
        (0..self.n_layers()).map(|i| self.dims[i] * self.dims[i + 1] + self.dims[i + 1]).sum()
    }
}

/// A dense network; weights are `[out × in]`.
#[derive(Clone, Debug)]
pub struct Mlp {
    arch: Arch,
    ws: Vec<Array2<f64>>,
    bs: Vec<Array1<f64>>,
}

/// Activations recorded by a cached forward pass, sufficient for backward.
pub struct ForwardCache {
    input: Array2<f64>,
    /// Post-activation output of every layer (last entry is pre-squash).
    acts: Vec<Array2<f64>>,
    /// tanh of the final layer output when a squash is configured.
    squash_tanh: Option<Array2<f64>>,
}

/// Parameter gradients in layer structure plus the gradient w.r.t. the input.
pub struct MlpGrads {
    pub ws: Vec<Array2<f64>>,
    pub bs: Vec<Array1<f64>>,
    pub dx: Array2<f64>,
}

impl MlpGrads {
    pub fn flatten(&self) -> Vec<f64> {
        let n: usize = self.ws.iter().map(|w| w.len()).sum::<usize>() + self.bs.iter().map(|b| b.len()).sum::<usize>();
        let mut out = Vec::with_capacity(n);
        for (w, b) in self.ws.iter().zip(&self.bs) {
            out.extend(w.iter().copied());
            out.extend(b.iter().copied());
        }
        out
    }
}

impl Mlp {
    /// Seeded init: every layer uniform in ±1/√fan_in (weights and biases).
    pub fn init(arch: Arch, rng: &mut Rng) -> Result<Mlp> {
        arch.validate()?;
        let mut ws = Vec::with_capacity(arch.n_layers());
        let mut bs = Vec::with_capacity(arch.n_layers());
        for i in 0..arch.n_layers() {
            let (fan_in, fan_out) = (arch.dims[i], arch.dims[i + 1]);
            let bound = 1.0 / (fan_in as f64).sqrt();
            let w = Array2::from_shape_fn((fan_out, fan_in), |_| rng.uniform(-bound, bound));
            let b = Array1::from_shape_fn(fan_out, |_| rng.uniform(-bound, bound));
            ws.push(w);
            bs.push(b);
        }
        Ok(Mlp { arch, ws, bs })
    }

    pub fn from_flat(arch: Arch, flat: &[f64]) -> Result<Mlp> {
        arch.validate()?;
        if flat.len() != arch.param_count() {
            return Err(LudorError::Config(format!(
                "flat vector length {} does not match architecture parameter count {}",
                flat.len(),
                arch.param_count()
            )));
        }
        let mut mlp = Mlp {
            ws: (0..arch.n_layers())
                .map(|i| Array2::zeros((arch.dims[i + 1], arch.dims[i])))
                .collect(),
            bs: (0..arch.n_layers()).map(|i| Array1::zeros(arch.dims[i + 1])).collect(),
            arch,
        };
        mlp.assign_flat(flat)?;
        Ok(mlp)
    }

    pub fn arch(&self) -> &Arch {
        &self.arch
    }

    pub fn param_count(&self) -> usize {
        self.arch.param_count()
    }

    /// Flat parameter vector: per layer, weights row-major then bias.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for (w, b) in self.ws.iter().zip(&self.bs) {
            out.extend(w.as_slice().expect("row-major weights").iter().copied());
            out.extend(b.iter().copied());
        }
        out
    }

    /// Overwrite all parameters from a flat vector (inverse of `flatten`).
    pub fn assign_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.param_count() {
            return Err(LudorError::Config(format!(
                "flat vector length {} does not match parameter count {}",
                flat.len(),
                self.param_count()
            )));
        }
        let mut off = 0;
        for (w, b) in self.ws.iter_mut().zip(self.bs.iter_mut()) {
            let wn = w.len();
            w.as_slice_mut().expect("row-major weights").copy_from_slice(&flat[off..off + wn]);
            off += wn;
            let bn = b.len();
            b.as_slice_mut().unwrap().copy_from_slice(&flat[off..off + bn]);
            off += bn;
        }
        Ok(())
    }

    fn layer_forward(&self, i: usize, x: &Array2<f64>) -> Array2<f64> {
        let mut z = x.dot(&self.ws[i].t());
        z += &self.bs[i];
        let act = self.arch.acts[i];
        if act != Activation::Identity {
            z.mapv_inplace(|v| act.apply(v));
        }
        z
    }

    /// Batched forward pass without a cache.
    pub fn forward(&self, x: ArrayView2<f64>) -> Array2<f64> {
        assert_eq!(x.ncols(), self.arch.input_dim(), "input dim mismatch");
        let mut h = x.to_owned();
        for i in 0..self.arch.n_layers() {
            h = self.layer_forward(i, &h);
        }
        if let Some(bound) = self.arch.squash {
            h.mapv_inplace(|v| bound * v.tanh());
        }
        h
    }

    /// Batched forward pass recording the activations needed by `backward`.
    pub fn forward_cached(&self, x: ArrayView2<f64>) -> (Array2<f64>, ForwardCache) {
        assert_eq!(x.ncols(), self.arch.input_dim(), "input dim mismatch");
        let input = x.to_owned();
        let mut acts = Vec::with_capacity(self.arch.n_layers());
        let mut h = input.clone();
        for i in 0..self.arch.n_layers() {
            h = self.layer_forward(i, &h);
            acts.push(h.clone());
        }
        match self.arch.squash {
            Some(bound) => {
                let t = acts.last().unwrap().mapv(f64::tanh);
                let y = t.mapv(|v| bound * v);
                (y, ForwardCache { input, acts, squash_tanh: Some(t) })
            }
            None => (h, ForwardCache { input, acts, squash_tanh: None }),
        }
    }

    /// Single-sample convenience used by rollouts.
    pub fn act(&self, state: &[f64]) -> Vec<f64> {
        let x = ArrayView2::from_shape((1, state.len()), state).expect("contiguous state");
        self.forward(x).into_raw_vec_and_offset().0
    }

    /// Backward pass: gradients of a scalar loss w.r.t. all parameters and
    /// the input, given `d_out` = ∂loss/∂output (batch-shaped).
    pub fn backward(&self, cache: &ForwardCache, d_out: ArrayView2<f64>) -> MlpGrads {
        self.backward_impl(cache, d_out, true)
    }

    /// Input gradient only (skips the weight-gradient matmuls); used where a
    /// network is differentiated through but not updated, e.g. the critic
    /// inside the actor objective.
    pub fn backward_input(&self, cache: &ForwardCache, d_out: ArrayView2<f64>) -> Array2<f64> {
        self.backward_impl(cache, d_out, false).dx
    }

    fn backward_impl(&self, cache: &ForwardCache, d_out: ArrayView2<f64>, want_params: bool) -> MlpGrads {
        let n_layers = self.arch.n_layers();
        let last = cache.acts.last().expect("cache from forward_cached");
        assert_eq!(d_out.dim(), last.dim(), "output grad shape mismatch");
        assert_eq!(cache.input.nrows(), last.nrows(), "stale cache");

        // Through the squash: y = bound·tanh(h), dh = dy · bound·(1 − tanh²).
        let mut dh: Array2<f64> = match (&self.arch.squash, &cache.squash_tanh) {
            (Some(bound), Some(t)) => {
                let mut d = d_out.to_owned();
                d.zip_mut_with(t, |dv, &tv| *dv *= bound * (1.0 - tv * tv));
                d
            }
            (None, None) => d_out.to_owned(),
            _ => unreachable!("cache/squash mismatch"),
        };

        let mut ws = Vec::new();
        let mut bs = Vec::new();
        if want_params {
            ws.reserve(n_layers);
            bs.reserve(n_layers);
        }
        for i in (0..n_layers).rev() {
            // dz = dh ⊙ f'(h)
            let act = self.arch.acts[i];
            if act != Activation::Identity {
                dh.zip_mut_with(&cache.acts[i], |dv, &hv| *dv *= act.grad_from_output(hv));
            }
            let below: &Array2<f64> = if i == 0 { &cache.input } else { &cache.acts[i - 1] };
            if want_params {
                ws.push(dh.t().dot(below)); // [out × in]
                bs.push(dh.sum_axis(Axis(0)));
            }
            dh = dh.dot(&self.ws[i]); // gradient w.r.t. the layer input
        }
        if want_params {
            ws.reverse();
            bs.reverse();
        }
        MlpGrads { ws, bs, dx: dh }
    }
}

/// In-place EMA blend: every coordinate of `keep_net` becomes
/// `keep·keep_net + (1−keep)·other`.
///
/// Two uses: the per-step teacher→student parameter transfer (`keep` = the
/// EMA coefficient, `other` = teacher), and target-network soft updates
/// (`keep` = 1 − tau, `other` = the online network).
pub fn ema_blend(keep_net: &mut Mlp, other: &Mlp, keep: f64) -> Result<()> {
    if keep_net.arch != other.arch {
        return Err(LudorError::Config("ema blend requires identical architectures".into()));
    }
    if !(0.0..=1.0).contains(&keep) {
        return Err(LudorError::Config(format!("ema coefficient must lie in [0,1], got {keep}")));
    }
    for (w, wo) in keep_net.ws.iter_mut().zip(&other.ws) {
        w.zip_mut_with(wo, |a, &b| *a = keep * *a + (1.0 - keep) * b);
    }
    for (b, bo) in keep_net.bs.iter_mut().zip(&other.bs) {
        b.zip_mut_with(bo, |a, &v| *a = keep * *a + (1.0 - keep) * v);
    }
    Ok(())
}
