//! LSTM and bidirectional LSTM built from tape primitives, so gradients
//! through time come from the same backward pass as everything else.

use crate::error::Result;
use crate::rng::Prng;
use crate::tape::{NodeId, Tape};
use crate::tensor::Tensor;

/// Single LSTM layer. Gate blocks are packed in i|f|g|o order along the
/// second axis of `w_x` [input,4H], `w_h` [H,4H] and `b` [1,4H].
#[derive(Debug, Clone)]
pub struct LstmParams {
    pub input_size: usize,
    pub hidden_size: usize,
    pub w_x: Tensor,
    pub w_h: Tensor,
    pub b: Tensor,
}

impl LstmParams {
    pub fn new(input_size: usize, hidden_size: usize, rng: &mut Prng) -> Self {
        let h4 = 4 * hidden_size;
        let mut b = Tensor::zeros(&[1, h4]);
        // Forget-gate bias starts at 1.0 so early training does not flush state.
        for v in &mut b.data_mut()[hidden_size..2 * hidden_size] {
            *v = 1.0;
        }
        LstmParams {
            input_size,
            hidden_size,
            w_x: Tensor::uniform_init(&[input_size, h4], input_size, rng),
            w_h: Tensor::uniform_init(&[hidden_size, h4], hidden_size, rng),
            b,
        }
    }

    pub fn bind(&self, tape: &mut Tape) -> Result<BoundLstm> {
        Ok(BoundLstm {
            w_x: tape.leaf(self.w_x.clone())?,
            w_h: tape.leaf(self.w_h.clone())?,
            b: tape.leaf(self.b.clone())?,
            input_size: self.input_size,
            hidden_size: self.hidden_size,
        })
    }

    pub fn tensors(&self) -> Vec<&Tensor> {
        vec![&self.w_x, &self.w_h, &self.b]
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        vec![&mut self.w_x, &mut self.w_h, &mut self.b]
    }

    pub fn names(&self, prefix: &str) -> Vec<String> {
        vec![
            format!("{prefix}w_x"),
            format!("{prefix}w_h"),
            format!("{prefix}b"),
        ]
    }
}

pub struct BoundLstm {
    pub w_x: NodeId,
    pub w_h: NodeId,
    pub b: NodeId,
    pub input_size: usize,
    pub hidden_size: usize,
}

/// Per-step hidden states plus final (h, c) of one LSTM pass.
pub struct LstmTrace {
    pub outputs: Vec<NodeId>,
    pub h_t: NodeId,
    pub c_t: NodeId,
}

impl BoundLstm {
    pub fn param_ids(&self) -> Vec<NodeId> {
        vec![self.w_x, self.w_h, self.b]
    }

    /// One recurrence step on a [B,input] batch.
    pub fn step(
        &self,
        tape: &mut Tape,
        x: NodeId,
        h: NodeId,
        c: NodeId,
    ) -> Result<(NodeId, NodeId)> {
        let hs = self.hidden_size;
        let hc = tape.lstm_step(x, h, c, self.w_x, self.w_h, self.b, hs)?;
        let h_next = tape.slice_cols(hc, 0, hs)?;
        let c_next = tape.slice_cols(hc, hs, 2 * hs)?;
        Ok((h_next, c_next))
    }

    /// Runs the recurrence over `steps` (one [B,input] node per frame).
    /// Initial state defaults to zeros.
    pub fn forward(
        &self,
        tape: &mut Tape,
        steps: &[NodeId],
        init: Option<(NodeId, NodeId)>,
    ) -> Result<LstmTrace> {
        assert!(!steps.is_empty(), "LSTM needs at least one step");
        let batch = tape.value(steps[0]).rows();
        let (mut h, mut c) = match init {
            Some(hc) => hc,
            None => {
                let zeros = Tensor::zeros(&[batch, self.hidden_size]);
                (tape.leaf(zeros.clone())?, tape.leaf(zeros)?)
            }
        };
        let mut outputs = Vec::with_capacity(steps.len());
        for &x in steps {
            let (h_next, c_next) = self.step(tape, x, h, c)?;
            outputs.push(h_next);
            h = h_next;
            c = c_next;
        }
        Ok(LstmTrace {
            outputs,
            h_t: h,
            c_t: c,
        })
    }
}

/// Stack of LSTM layers; layer l consumes the per-step outputs of layer l-1.
pub fn lstm_stack_forward(
    tape: &mut Tape,
    layers: &[&BoundLstm],
    steps: &[NodeId],
    init: Option<&[(NodeId, NodeId)]>,
) -> Result<Vec<LstmTrace>> {
    let mut traces = Vec::with_capacity(layers.len());
    let mut inputs: Vec<NodeId> = steps.to_vec();
    for (idx, layer) in layers.iter().enumerate() {
        let layer_init = init.map(|states| states[idx]);
        let trace = layer.forward(tape, &inputs, layer_init)?;
        inputs = trace.outputs.clone();
        traces.push(trace);
    }
    Ok(traces)
}

/// Bidirectional pass: forward and time-reversed recurrences concatenated
/// per step into [B,2H] outputs.
pub fn bilstm_forward(
    tape: &mut Tape,
    forward: &BoundLstm,
    backward: &BoundLstm,
    steps: &[NodeId],
) -> Result<Vec<NodeId>> {
    let fwd = forward.forward(tape, steps, None)?;
    let reversed: Vec<NodeId> = steps.iter().rev().copied().collect();
    let bwd = backward.forward(tape, &reversed, None)?;
    let n = steps.len();
    let mut outputs = Vec::with_capacity(n);
    for t in 0..n {
        // bwd.outputs[k] is the state after consuming frames n-1..=n-1-k, so
        // the state aligned with original frame t sits at index n-1-t.
        let joined = tape.concat_cols(fwd.outputs[t], bwd.outputs[n - 1 - t])?;
        outputs.push(joined);
    }
    Ok(outputs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(vals: &[f64]) -> Tensor {
        Tensor::from_vec(&[1, vals.len()], vals.to_vec()).unwrap()
    }

    #[test]
    fn zero_params_zero_bias_give_zero_outputs() {
        let mut rng = Prng::new(1);
        let mut p = LstmParams::new(2, 3, &mut rng);
        for t in p.tensors_mut() {
            for v in t.data_mut() {
                *v = 0.0;
            }
        }
        let mut tape = Tape::new();
        let bound = p.bind(&mut tape).unwrap();
        let steps: Vec<NodeId> = (0..4)
            .map(|i| tape.leaf(row(&[i as f64, -(i as f64)])).unwrap())
            .collect();
        let trace = bound.forward(&mut tape, &steps, None).unwrap();
        for out in trace.outputs {
            assert!(tape.value(out).data().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn single_timestep_matches_cell_oracle() {
        let mut rng = Prng::new(7);
        let p = LstmParams::new(2, 2, &mut rng);
        let x = [0.4, -0.9];
        let mut tape = Tape::new();
        let bound = p.bind(&mut tape).unwrap();
        let xid = tape.leaf(row(&x)).unwrap();
        let trace = bound.forward(&mut tape, &[xid], None).unwrap();
        let got = tape.value(trace.outputs[0]).data().to_vec();

        // Hand-rolled single-cell oracle with zero initial state.
        let hs = 2;
        let sigmoid = |v: f64| 1.0 / (1.0 + (-v).exp());
        let mut z = vec![0.0; 4 * hs];
        for (j, zv) in z.iter_mut().enumerate() {
            let mut acc = p.b.data()[j];
            for (i, &xv) in x.iter().enumerate() {
                acc += xv * p.w_x.data()[i * 4 * hs + j];
            }
            *zv = acc;
        }
        for j in 0..hs {
            let i_g = sigmoid(z[j]);
            let f_g = sigmoid(z[hs + j]);
            let g_g = z[2 * hs + j].tanh();
            let o_g = sigmoid(z[3 * hs + j]);
            let c = f_g * 0.0 + i_g * g_g;
            let h = o_g * c.tanh();
            assert!((got[j] - h).abs() < 1e-12, "{} vs {h}", got[j]);
        }
    }

    #[test]
    fn bilstm_palindrome_swaps_halves() {
        let mut rng = Prng::new(5);
        let p = LstmParams::new(1, 3, &mut rng);
        let seq = [0.2, -0.5, 0.9, -0.5, 0.2];
        let mut tape = Tape::new();
        // Shared parameters for both directions.
        let f = p.bind(&mut tape).unwrap();
        let b = p.bind(&mut tape).unwrap();
        let steps: Vec<NodeId> = seq.iter().map(|&v| tape.leaf(row(&[v])).unwrap()).collect();
        let outs = bilstm_forward(&mut tape, &f, &b, &steps).unwrap();
        let n = seq.len();
        for t in 0..n {
            let a = tape.value(outs[t]).data();
            let brow = tape.value(outs[n - 1 - t]).data();
            // First half of outs[t] equals second half of outs[n-1-t] and vice versa.
            for j in 0..3 {
                assert!((a[j] - brow[3 + j]).abs() < 1e-12);
                assert!((a[3 + j] - brow[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bilstm_length_one_halves_equal() {
        let mut rng = Prng::new(9);
        let p = LstmParams::new(2, 4, &mut rng);
        let mut tape = Tape::new();
        let f = p.bind(&mut tape).unwrap();
        let b = p.bind(&mut tape).unwrap();
        let x = tape.leaf(row(&[1.0, -1.0])).unwrap();
        let outs = bilstm_forward(&mut tape, &f, &b, &[x]).unwrap();
        let v = tape.value(outs[0]).data();
        for j in 0..4 {
            assert!((v[j] - v[4 + j]).abs() < 1e-15);
        }
    }

    #[test]
    fn forget_bias_initialized_to_one() {
        let mut rng = Prng::new(2);
        let p = LstmParams::new(3, 5, &mut rng);
        assert!(p.b.data()[5..10].iter().all(|&v| v == 1.0));
        assert!(p.b.data()[..5].iter().all(|&v| v == 0.0));
        assert!(p.b.data()[10..].iter().all(|&v| v == 0.0));
    }
}
