//! Bias-corrected Adam.

use crate::error::{NeuralError, Result};
use crate::tensor::Tensor;

#[derive(Debug, Clone)]
pub struct AdamState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    step: u64,
    m: Vec<Tensor>,
    v: Vec<Tensor>,
}

impl AdamState {
    pub fn new(params: &[&Tensor], lr: f64) -> Self {
        AdamState {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m: params.iter().map(|p| Tensor::zeros(p.shape())).collect(),
            v: params.iter().map(|p| Tensor::zeros(p.shape())).collect(),
        }
    }

    pub fn with_betas(mut self, beta1: f64, beta2: f64) -> Self {
        self.beta1 = beta1;
        self.beta2 = beta2;
        self
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// Applies one update. `params` and `grads` must align with the layout
    /// the state was created from.
    pub fn step(&mut self, mut params: Vec<&mut Tensor>, grads: &[Tensor]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(NeuralError::ShapeMismatch {
                op: "adam_step",
                expected: format!("{} parameter tensors", self.m.len()),
                got: format!("{} params / {} grads", params.len(), grads.len()),
            });
        }
        self.step += 1;
        let t = self.step as f64;
        let bc1 = 1.0 - self.beta1.powf(t);
        let bc2 = 1.0 - self.beta2.powf(t);
        for ((param, grad), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            if param.shape() != grad.shape() {
                return Err(NeuralError::ShapeMismatch {
                    op: "adam_step",
                    expected: format!("{:?}", param.shape()),
                    got: format!("{:?}", grad.shape()),
                });
            }
            let pd = param.data_mut();
            let md = m.data_mut();
            let vd = v.data_mut();
            for i in 0..pd.len() {
                let g = grad.data()[i];
                md[i] = self.beta1 * md[i] + (1.0 - self.beta1) * g;
                vd[i] = self.beta2 * vd[i] + (1.0 - self.beta2) * g * g;
                let m_hat = md[i] / bc1;
                let v_hat = vd[i] / bc2;
                pd[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_grads_leave_params_unchanged() {
        let mut p = Tensor::from_vec(&[2], vec![1.5, -2.5]).unwrap();
        let mut adam = AdamState::new(&[&p], 0.01);
        let g = Tensor::zeros(&[2]);
        adam.step(vec![&mut p], &[g]).unwrap();
        assert_eq!(p.data(), &[1.5, -2.5]);
    }

    #[test]
    fn first_step_moves_by_lr_sign() {
        // Closed-form first step: m_hat = g, v_hat = g^2, so the update is
        // -lr * g / (|g| + eps) = -lr * sign(g) up to eps.
        let lr = 0.01;
        let mut p = Tensor::from_vec(&[2], vec![0.0, 0.0]).unwrap();
        let mut adam = AdamState::new(&[&p], lr);
        let g = Tensor::from_vec(&[2], vec![3.0, -0.25]).unwrap();
        adam.step(vec![&mut p], &[g]).unwrap();
        assert!((p.data()[0] - (-lr)).abs() < 1e-9);
        assert!((p.data()[1] - lr).abs() < 1e-7);
    }

    #[test]
    fn deterministic_across_runs() {
        let run = || {
            let mut p = Tensor::from_vec(&[3], vec![0.1, 0.2, 0.3]).unwrap();
            let mut adam = AdamState::new(&[&p], 0.05);
            for k in 0..10 {
                let g = Tensor::from_vec(&[3], vec![k as f64, -1.0, 0.5]).unwrap();
                adam.step(vec![&mut p], &[g]).unwrap();
            }
            p.data().to_vec()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn mismatched_shapes_rejected() {
        let mut p = Tensor::zeros(&[2]);
        let mut adam = AdamState::new(&[&p], 0.01);
        let g = Tensor::zeros(&[3]);
        assert!(adam.step(vec![&mut p], &[g]).is_err());
    }
}
