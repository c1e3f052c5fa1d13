//! Adam optimizer over flat parameter vectors.

use serde::{Deserialize, Serialize};

use crate::error::{LudorError, Result};

/// Standard Adam with bias correction. `t` counts completed steps.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(param_count: usize, lr: f64) -> AdamState {
        AdamState {
            m: vec![0.0; param_count],
            v: vec![0.0; param_count],
            t: 0,
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    pub fn steps_taken(&self) -> u64 {
        self.t
    }

    /// One in-place update. Rejects non-finite gradients, reporting the
    /// would-be step index.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(LudorError::Config(format!(
                "adam length mismatch: state {}, params {}, grads {}",
                self.m.len(),
                params.len(),
                grads.len()
            )));
        }
        if let Some(i) = grads.iter().position(|g| !g.is_finite()) {
            return Err(LudorError::Training {
                step: self.t + 1,
                msg: format!("non-finite gradient at coordinate {i}: {}", grads[i]),
            });
        }
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_params_unchanged() {
        let mut st = AdamState::new(3, 1e-3);
        let mut p = vec![0.5, -0.25, 2.0];
        let before = p.clone();
        st.step(&mut p, &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(p, before);
        assert_eq!(st.steps_taken(), 1);
    }

    #[test]
    fn first_step_is_bias_corrected_full_learning_rate() {
        // Scalar p = 0, g = 1: m̂ = 1, v̂ = 1 ⇒ p ← −lr·1/(1+eps).
        let lr = 3e-4;
        let mut st = AdamState::new(1, lr);
        let mut p = vec![0.0];
        st.step(&mut p, &[1.0]).unwrap();
        let expected = -lr * 1.0 / (1.0_f64.sqrt() + 1e-8);
        assert_eq!(p[0], expected);
        assert!((p[0] + lr).abs() < 1e-10);
    }

    #[test]
    fn coordinates_update_independently() {
        let lr = 1e-2;
        let mut joint = AdamState::new(2, lr);
        let mut pj = vec![0.3, -0.8];
        for k in 0..10 {
            let g = [0.1 * (k as f64 + 1.0), -0.05 * (k as f64 + 1.0)];
            joint.step(&mut pj, &g).unwrap();
        }

        let mut sep0 = AdamState::new(1, lr);
        let mut sep1 = AdamState::new(1, lr);
        let mut p0 = vec![0.3];
        let mut p1 = vec![-0.8];
        for k in 0..10 {
            sep0.step(&mut p0, &[0.1 * (k as f64 + 1.0)]).unwrap();
            sep1.step(&mut p1, &[-0.05 * (k as f64 + 1.0)]).unwrap();
        }
        assert_eq!(pj, vec![p0[0], p1[0]]);
    }

    #[test]
    fn non_finite_gradient_reports_step_index() {
        let mut st = AdamState::new(2, 1e-3);
        let mut p = vec![0.0, 0.0];
        st.step(&mut p, &[1.0, 1.0]).unwrap();
        let err = st.step(&mut p, &[1.0, f64::NAN]).unwrap_err();
        match err {
            LudorError::Training { step, .. } => assert_eq!(step, 2),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn repeated_unit_gradient_walks_parameter_down() {
        let mut st = AdamState::new(1, 1e-2);
        let mut p = vec![1.0];
        for _ in 0..200 {
            st.step(&mut p, &[1.0]).unwrap();
        }
        // With constant gradient Adam moves ~lr per step.
        assert!(p[0] < 1.0 - 150.0 * 1e-2);
    }
}
