//! Tape-based reverse-mode automatic differentiation.
//!
//! A [`Tape`] records every primitive operation in creation order, which is
//! already a topological order because an op can only consume node ids that
//! exist when it is pushed. [`Tape::backward`] walks the record once in
//! reverse and accumulates exact gradients for every reachable node.
//!
//! Every op output is checked for NaN/Inf on creation; the backward pass
//! re-checks each produced gradient and names the offending op on failure.

use crate::error::{NeuralError, Result};
use crate::tensor::{matmul_acc, matmul_nn, matmul_nt, matmul_tn, Tensor};

/// Handle to a node on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeId(usize);

#[derive(Debug, Clone)]
enum Op {
    Leaf,
    MatMul,
    Add,
    /// Broadcast add of a [1,n] row vector to every row of a [m,n] matrix.
    AddRow,
    Sub,
    Mul,
    Scale(f64),
    AddScalar,
    Tanh,
    Sigmoid,
    LeakyRelu(f64),
    Square,
    Sqrt,
    Sum,
    SumRows,
    SliceCols {
        start: usize,
        end: usize,
    },
    ConcatCols,
    /// Mean binary cross-entropy evaluated on logits against fixed targets.
    BceLogitsMean {
        targets: Tensor,
    },
    /// Fused LSTM cell step producing [h_new | c_new] as a [B,2H] value.
    /// Inputs: x (a), h_prev (b), then c_prev, w_x, w_h, bias in `extra`.
    /// `gates` holds post-activation i|f|g|o and `tc` holds tanh(c_new),
    /// both saved for the hand-derived backward.
    LstmStep {
        hidden: usize,
        gates: Tensor,
        tc: Tensor,
        extra: [usize; 4],
    },
}

impl Op {
    fn name(&self) -> &'static str {
        match self {
            Op::Leaf => "leaf",
            Op::MatMul => "matmul",
            Op::Add => "add",
            Op::AddRow => "add_row",
            Op::Sub => "sub",
            Op::Mul => "mul",
            Op::Scale(_) => "scale",
            Op::AddScalar => "add_scalar",
            Op::Tanh => "tanh",
            Op::Sigmoid => "sigmoid",
            Op::LeakyRelu(_) => "leaky_relu",
            Op::Square => "square",
            Op::Sqrt => "sqrt",
            Op::Sum => "sum",
            Op::SumRows => "sum_rows",
            Op::SliceCols { .. } => "slice_cols",
            Op::ConcatCols => "concat_cols",
            Op::BceLogitsMean { .. } => "bce_logits_mean",
            Op::LstmStep { .. } => "lstm_step",
        }
    }
}

struct Node {
    op: Op,
    a: usize,
    b: usize,
    value: Tensor,
}

/// Gradients per node, produced by [`Tape::backward`].
pub struct Gradients {
    grads: Vec<Option<Tensor>>,
}

impl Gradients {
    pub fn get(&self, id: NodeId) -> Option<&Tensor> {
        self.grads[id.0].as_ref()
    }

    /// Gradient for `id`, or zeros of the given shape if the node was not
    /// reached by the loss.
    pub fn get_or_zeros(&self, id: NodeId, shape: &[usize]) -> Tensor {
        match &self.grads[id.0] {
            Some(g) => g.clone(),
            None => Tensor::zeros(shape),
        }
    }
}

fn sigmoid_scalar(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

impl Tape {
    pub fn new() -> Self {
        Tape { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, id: NodeId) -> &Tensor {
        &self.nodes[id.0].value
    }

    /// Value of a scalar node.
    pub fn scalar_value(&self, id: NodeId) -> f64 {
        self.nodes[id.0].value.data()[0]
    }

    fn push(&mut self, op: Op, a: usize, b: usize, value: Tensor) -> Result<NodeId> {
        if !value.is_finite_all() {
            return Err(NeuralError::NonFinite {
                op: op.name().to_string(),
            });
        }
        self.nodes.push(Node { op, a, b, value });
        Ok(NodeId(self.nodes.len() - 1))
    }

    /// Registers an input or parameter tensor.
    pub fn leaf(&mut self, value: Tensor) -> Result<NodeId> {
        self.push(Op::Leaf, 0, 0, value)
    }

    pub fn matmul(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let (va, vb) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
        if va.cols() != vb.rows() {
            return Err(NeuralError::ShapeMismatch {
                op: "matmul",
                expected: format!("inner dims equal, lhs {:?}", va.shape()),
                got: format!("rhs {:?}", vb.shape()),
            });
        }
        let value = matmul_nn(va, vb);
        self.push(Op::MatMul, a.0, b.0, value)
    }

    fn binary_same_shape(&mut self, op: Op, a: NodeId, b: NodeId) -> Result<NodeId> {
        let (va, vb) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
        if va.shape() != vb.shape() {
            return Err(NeuralError::ShapeMismatch {
                op: match op {
                    Op::Add => "add",
                    Op::Sub => "sub",
                    Op::Mul => "mul",
                    _ => "binary",
                },
                expected: format!("{:?}", va.shape()),
                got: format!("{:?}", vb.shape()),
            });
        }
        let data: Vec<f64> = match op {
            Op::Add => va.data().iter().zip(vb.data()).map(|(x, y)| x + y).collect(),
            Op::Sub => va.data().iter().zip(vb.data()).map(|(x, y)| x - y).collect(),
            Op::Mul => va.data().iter().zip(vb.data()).map(|(x, y)| x * y).collect(),
            _ => unreachable!(),
        };
        let value = Tensor::from_vec(va.shape(), data)?;
        self.push(op, a.0, b.0, value)
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.binary_same_shape(Op::Add, a, b)
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.binary_same_shape(Op::Sub, a, b)
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.binary_same_shape(Op::Mul, a, b)
    }

    /// `a[m,n] + row[1,n]`, broadcasting the row over every row of `a`.
    pub fn add_row(&mut self, a: NodeId, row: NodeId) -> Result<NodeId> {
        let (va, vr) = (&self.nodes[a.0].value, &self.nodes[row.0].value);
        let n = va.cols();
        if vr.len() != n || vr.rows() != 1 {
            return Err(NeuralError::ShapeMismatch {
                op: "add_row",
                expected: format!("[1,{n}]"),
                got: format!("{:?}", vr.shape()),
            });
        }
        let mut data = va.data().to_vec();
        for chunk in data.chunks_mut(n) {
            for (d, r) in chunk.iter_mut().zip(vr.data()) {
                *d += r;
            }
        }
        let value = Tensor::from_vec(va.shape(), data)?;
        self.push(Op::AddRow, a.0, row.0, value)
    }

    pub fn scale(&mut self, a: NodeId, c: f64) -> Result<NodeId> {
        let value = self.nodes[a.0].value.map(|v| v * c);
        self.push(Op::Scale(c), a.0, 0, value)
    }

    pub fn add_scalar(&mut self, a: NodeId, c: f64) -> Result<NodeId> {
        let value = self.nodes[a.0].value.map(|v| v + c);
        self.push(Op::AddScalar, a.0, 0, value)
    }

    pub fn tanh(&mut self, a: NodeId) -> Result<NodeId> {
        let value = self.nodes[a.0].value.map(f64::tanh);
        self.push(Op::Tanh, a.0, 0, value)
    }

    pub fn sigmoid(&mut self, a: NodeId) -> Result<NodeId> {
        let value = self.nodes[a.0].value.map(sigmoid_scalar);
        self.push(Op::Sigmoid, a.0, 0, value)
    }

    pub fn leaky_relu(&mut self, a: NodeId, slope: f64) -> Result<NodeId> {
        let value = self.nodes[a.0]
            .value
            .map(|v| if v > 0.0 { v } else { slope * v });
        self.push(Op::LeakyRelu(slope), a.0, 0, value)
    }

    pub fn square(&mut self, a: NodeId) -> Result<NodeId> {
        let value = self.nodes[a.0].value.map(|v| v * v);
        self.push(Op::Square, a.0, 0, value)
    }

    pub fn sqrt(&mut self, a: NodeId) -> Result<NodeId> {
        let value = self.nodes[a.0].value.map(f64::sqrt);
        self.push(Op::Sqrt, a.0, 0, value)
    }

    pub fn sum(&mut self, a: NodeId) -> Result<NodeId> {
        let s: f64 = self.nodes[a.0].value.data().iter().sum();
        self.push(Op::Sum, a.0, 0, Tensor::scalar(s))
    }

    /// Row sums: [m,n] -> [m,1].
    pub fn sum_rows(&mut self, a: NodeId) -> Result<NodeId> {
        let va = &self.nodes[a.0].value;
        let (m, n) = (va.rows(), va.cols());
        let data: Vec<f64> = (0..m).map(|i| va.row(i).iter().sum()).collect();
        let _ = n;
        let value = Tensor::from_vec(&[m, 1], data)?;
        self.push(Op::SumRows, a.0, 0, value)
    }

    /// Mean over all elements: sum scaled by 1/len.
    pub fn mean(&mut self, a: NodeId) -> Result<NodeId> {
        let len = self.nodes[a.0].value.len();
        let s = self.sum(a)?;
        self.scale(s, 1.0 / len as f64)
    }

    /// Column slice [m, end-start] of a [m,n] node.
    pub fn slice_cols(&mut self, a: NodeId, start: usize, end: usize) -> Result<NodeId> {
        let va = &self.nodes[a.0].value;
        let (m, n) = (va.rows(), va.cols());
        if start >= end || end > n {
            return Err(NeuralError::ShapeMismatch {
                op: "slice_cols",
                expected: format!("0 <= start < end <= {n}"),
                got: format!("{start}..{end}"),
            });
        }
        let w = end - start;
        let mut data = Vec::with_capacity(m * w);
        for i in 0..m {
            data.extend_from_slice(&va.row(i)[start..end]);
        }
        let value = Tensor::from_vec(&[m, w], data)?;
        self.push(Op::SliceCols { start, end }, a.0, 0, value)
    }

    /// Horizontal concatenation of [m,p] and [m,q] into [m,p+q].
    pub fn concat_cols(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let (va, vb) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
        if va.rows() != vb.rows() {
            return Err(NeuralError::ShapeMismatch {
                op: "concat_cols",
                expected: format!("{} rows", va.rows()),
                got: format!("{} rows", vb.rows()),
            });
        }
        let (m, p, q) = (va.rows(), va.cols(), vb.cols());
        let mut data = Vec::with_capacity(m * (p + q));
        for i in 0..m {
            data.extend_from_slice(va.row(i));
            data.extend_from_slice(vb.row(i));
        }
        let value = Tensor::from_vec(&[m, p + q], data)?;
        self.push(Op::ConcatCols, a.0, b.0, value)
    }

    /// Mean squared error between a prediction node and a fixed target.
    pub fn mse_mean(&mut self, pred: NodeId, target: NodeId) -> Result<NodeId> {
        let d = self.sub(pred, target)?;
        let sq = self.square(d)?;
        self.mean(sq)
    }

    /// Numerically stable mean BCE on logits with constant 0/1 targets.
    pub fn bce_logits_mean(&mut self, logits: NodeId, targets: Tensor) -> Result<NodeId> {
        let vl = &self.nodes[logits.0].value;
        if vl.shape() != targets.shape() {
            return Err(NeuralError::ShapeMismatch {
                op: "bce_logits_mean",
                expected: format!("{:?}", vl.shape()),
                got: format!("{:?}", targets.shape()),
            });
        }
        let mut acc = 0.0;
        for (&z, &t) in vl.data().iter().zip(targets.data()) {
            acc += z.max(0.0) - z * t + (-z.abs()).exp().ln_1p();
        }
        let value = Tensor::scalar(acc / vl.len() as f64);
        self.push(Op::BceLogitsMean { targets }, logits.0, 0, value)
    }

    /// Fused LSTM cell step. Computes all four gates in one pass and returns
    /// the concatenated [h_new | c_new] as a [B,2H] node. Gate blocks in
    /// `w_x` [I,4H], `w_h` [H,4H] and `bias` [1,4H] are ordered i|f|g|o.
    #[allow(clippy::too_many_arguments)]
    pub fn lstm_step(
        &mut self,
        x: NodeId,
        h_prev: NodeId,
        c_prev: NodeId,
        w_x: NodeId,
        w_h: NodeId,
        bias: NodeId,
        hidden: usize,
    ) -> Result<NodeId> {
        let batch = self.nodes[x.0].value.rows();
        let h4 = 4 * hidden;
        {
            let vx = &self.nodes[x.0].value;
            let vw = &self.nodes[w_x.0].value;
            if vw.rows() != vx.cols() || vw.cols() != h4 {
                return Err(NeuralError::ShapeMismatch {
                    op: "lstm_step",
                    expected: format!("w_x [{},{}]", vx.cols(), h4),
                    got: format!("{:?}", vw.shape()),
                });
            }
        }
        // z = bias (broadcast) + x @ w_x + h_prev @ w_h
        let mut z = {
            let vb = self.nodes[bias.0].value.data();
            let mut data = Vec::with_capacity(batch * h4);
            for _ in 0..batch {
                data.extend_from_slice(vb);
            }
            data
        };
        matmul_acc(&self.nodes[x.0].value, &self.nodes[w_x.0].value, &mut z);
        matmul_acc(&self.nodes[h_prev.0].value, &self.nodes[w_h.0].value, &mut z);

        // In-place gate activations: i|f|o sigmoid, g tanh.
        for row in z.chunks_mut(h4) {
            for v in &mut row[0..hidden] {
                *v = sigmoid_scalar(*v);
            }
            for v in &mut row[hidden..2 * hidden] {
                *v = sigmoid_scalar(*v);
            }
            for v in &mut row[2 * hidden..3 * hidden] {
                *v = v.tanh();
            }
            for v in &mut row[3 * hidden..4 * hidden] {
                *v = sigmoid_scalar(*v);
            }
        }
        let gates = Tensor::from_vec(&[batch, h4], z)?;

        let vc = self.nodes[c_prev.0].value.data();
        let mut out = vec![0.0; batch * 2 * hidden];
        let mut tc_data = vec![0.0; batch * hidden];
        for r in 0..batch {
            let grow = gates.row(r);
            let crow = &vc[r * hidden..(r + 1) * hidden];
            for j in 0..hidden {
                let (i_g, f_g, g_g, o_g) = (
                    grow[j],
                    grow[hidden + j],
                    grow[2 * hidden + j],
                    grow[3 * hidden + j],
                );
                let c_new = f_g * crow[j] + i_g * g_g;
                let tc = c_new.tanh();
                out[r * 2 * hidden + j] = o_g * tc;
                out[r * 2 * hidden + hidden + j] = c_new;
                tc_data[r * hidden + j] = tc;
            }
        }
        let value = Tensor::from_vec(&[batch, 2 * hidden], out)?;
        let tc = Tensor::from_vec(&[batch, hidden], tc_data)?;
        self.push(
            Op::LstmStep {
                hidden,
                gates,
                tc,
                extra: [c_prev.0, w_x.0, w_h.0, bias.0],
            },
            x.0,
            h_prev.0,
            value,
        )
    }

    /// Reverse pass from a scalar loss. Each node is visited exactly once.
    pub fn backward(&self, loss: NodeId) -> Result<Gradients> {
        let loss_node = &self.nodes[loss.0];
        if loss_node.value.len() != 1 {
            return Err(NeuralError::NonScalarLoss(loss_node.value.shape().to_vec()));
        }
        let mut grads: Vec<Option<Tensor>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[loss.0] = Some(Tensor::scalar(1.0));

        for idx in (0..=loss.0).rev() {
            let node = &self.nodes[idx];
            if matches!(node.op, Op::Leaf) {
                // Leaf gradients stay available to the caller; interior
                // gradients are consumed as the walk passes them.
                continue;
            }
            let Some(g) = grads[idx].take() else {
                continue;
            };
            let mut contributions: Vec<(usize, Tensor)> = Vec::new();
            match &node.op {
                Op::Leaf => {}
                Op::MatMul => {
                    let va = &self.nodes[node.a].value;
                    let vb = &self.nodes[node.b].value;
                    contributions.push((node.a, matmul_nt(&g, vb)));
                    contributions.push((node.b, matmul_tn(va, &g)));
                }
                Op::Add => {
                    contributions.push((node.a, g.clone()));
                    contributions.push((node.b, g.clone()));
                }
                Op::AddRow => {
                    let n = g.cols();
                    let mut col_sum = vec![0.0; n];
                    for chunk in g.data().chunks(n) {
                        for (s, v) in col_sum.iter_mut().zip(chunk) {
                            *s += v;
                        }
                    }
                    let row_shape = self.nodes[node.b].value.shape().to_vec();
                    contributions.push((node.a, g.clone()));
                    contributions.push((node.b, Tensor::from_vec(&row_shape, col_sum)?));
                }
                Op::Sub => {
                    contributions.push((node.a, g.clone()));
                    contributions.push((node.b, g.map(|v| -v)));
                }
                Op::Mul => {
                    let va = &self.nodes[node.a].value;
                    let vb = &self.nodes[node.b].value;
                    let ga: Vec<f64> = g.data().iter().zip(vb.data()).map(|(x, y)| x * y).collect();
                    let gb: Vec<f64> = g.data().iter().zip(va.data()).map(|(x, y)| x * y).collect();
                    contributions.push((node.a, Tensor::from_vec(va.shape(), ga)?));
                    contributions.push((node.b, Tensor::from_vec(vb.shape(), gb)?));
                }
                Op::Scale(c) => contributions.push((node.a, g.map(|v| v * c))),
                Op::AddScalar => contributions.push((node.a, g.clone())),
                Op::Tanh => {
                    let y = &node.value;
                    let data: Vec<f64> = g
                        .data()
                        .iter()
                        .zip(y.data())
                        .map(|(gv, yv)| gv * (1.0 - yv * yv))
                        .collect();
                    contributions.push((node.a, Tensor::from_vec(y.shape(), data)?));
                }
                Op::Sigmoid => {
                    let y = &node.value;
                    let data: Vec<f64> = g
                        .data()
                        .iter()
                        .zip(y.data())
                        .map(|(gv, yv)| gv * yv * (1.0 - yv))
                        .collect();
                    contributions.push((node.a, Tensor::from_vec(y.shape(), data)?));
                }
                Op::LeakyRelu(slope) => {
                    let x = &self.nodes[node.a].value;
                    let data: Vec<f64> = g
                        .data()
                        .iter()
                        .zip(x.data())
                        .map(|(gv, xv)| if *xv > 0.0 { *gv } else { gv * slope })
                        .collect();
                    contributions.push((node.a, Tensor::from_vec(x.shape(), data)?));
                }
                Op::Square => {
                    let x = &self.nodes[node.a].value;
                    let data: Vec<f64> = g
                        .data()
                        .iter()
                        .zip(x.data())
                        .map(|(gv, xv)| 2.0 * gv * xv)
                        .collect();
                    contributions.push((node.a, Tensor::from_vec(x.shape(), data)?));
                }
                Op::Sqrt => {
                    let y = &node.value;
                    let data: Vec<f64> = g
                        .data()
                        .iter()
                        .zip(y.data())
                        .map(|(gv, yv)| gv / (2.0 * yv))
                        .collect();
                    contributions.push((node.a, Tensor::from_vec(y.shape(), data)?));
                }
                Op::Sum => {
                    let x = &self.nodes[node.a].value;
                    let gv = g.data()[0];
                    contributions.push((node.a, Tensor::filled(x.shape(), gv)));
                }
                Op::SumRows => {
                    let x = &self.nodes[node.a].value;
                    let (m, n) = (x.rows(), x.cols());
                    let mut data = vec![0.0; m * n];
                    for i in 0..m {
                        let gv = g.data()[i];
                        for d in &mut data[i * n..(i + 1) * n] {
                            *d = gv;
                        }
                    }
                    contributions.push((node.a, Tensor::from_vec(x.shape(), data)?));
                }
                Op::SliceCols { start, end } => {
                    let x = &self.nodes[node.a].value;
                    let (m, n) = (x.rows(), x.cols());
                    let w = end - start;
                    let mut data = vec![0.0; m * n];
                    for i in 0..m {
                        data[i * n + start..i * n + end].copy_from_slice(&g.data()[i * w..(i + 1) * w]);
                    }
                    contributions.push((node.a, Tensor::from_vec(x.shape(), data)?));
                }
                Op::ConcatCols => {
                    let va = &self.nodes[node.a].value;
                    let vb = &self.nodes[node.b].value;
                    let (m, p, q) = (va.rows(), va.cols(), vb.cols());
                    let mut ga = Vec::with_capacity(m * p);
                    let mut gb = Vec::with_capacity(m * q);
                    for i in 0..m {
                        let row = &g.data()[i * (p + q)..(i + 1) * (p + q)];
                        ga.extend_from_slice(&row[..p]);
                        gb.extend_from_slice(&row[p..]);
                    }
                    contributions.push((node.a, Tensor::from_vec(va.shape(), ga)?));
                    contributions.push((node.b, Tensor::from_vec(vb.shape(), gb)?));
                }
                Op::BceLogitsMean { targets } => {
                    let z = &self.nodes[node.a].value;
                    let scale = g.data()[0] / z.len() as f64;
                    let data: Vec<f64> = z
                        .data()
                        .iter()
                        .zip(targets.data())
                        .map(|(&zv, &tv)| scale * (sigmoid_scalar(zv) - tv))
                        .collect();
                    contributions.push((node.a, Tensor::from_vec(z.shape(), data)?));
                }
                Op::LstmStep {
                    hidden,
                    gates,
                    tc,
                    extra,
                } => {
                    let hs = *hidden;
                    let [c_prev_id, w_x_id, w_h_id, bias_id] = *extra;
                    let x_val = &self.nodes[node.a].value;
                    let h_val = &self.nodes[node.b].value;
                    let c_val = &self.nodes[c_prev_id].value;
                    let batch = x_val.rows();
                    // Incoming gradient covers [dh | dc_out].
                    let mut dz = vec![0.0; batch * 4 * hs];
                    let mut dc_prev = vec![0.0; batch * hs];
                    for r in 0..batch {
                        let grow = &g.data()[r * 2 * hs..(r + 1) * 2 * hs];
                        let gates_row = gates.row(r);
                        let tc_row = tc.row(r);
                        let c_row = c_val.row(r);
                        let dz_row = &mut dz[r * 4 * hs..(r + 1) * 4 * hs];
                        for j in 0..hs {
                            let dh = grow[j];
                            let dc_out = grow[hs + j];
                            let (i_g, f_g, g_g, o_g) = (
                                gates_row[j],
                                gates_row[hs + j],
                                gates_row[2 * hs + j],
                                gates_row[3 * hs + j],
                            );
                            let t = tc_row[j];
                            let d_o = dh * t;
                            let dc_total = dc_out + dh * o_g * (1.0 - t * t);
                            let d_f = dc_total * c_row[j];
                            let d_i = dc_total * g_g;
                            let d_g = dc_total * i_g;
                            dc_prev[r * hs + j] = dc_total * f_g;
                            dz_row[j] = d_i * i_g * (1.0 - i_g);
                            dz_row[hs + j] = d_f * f_g * (1.0 - f_g);
                            dz_row[2 * hs + j] = d_g * (1.0 - g_g * g_g);
                            dz_row[3 * hs + j] = d_o * o_g * (1.0 - o_g);
                        }
                    }
                    let dz = Tensor::from_vec(&[batch, 4 * hs], dz)?;
                    let w_x_val = &self.nodes[w_x_id].value;
                    let w_h_val = &self.nodes[w_h_id].value;
                    let mut db = vec![0.0; 4 * hs];
                    for row in dz.data().chunks(4 * hs) {
                        for (s, v) in db.iter_mut().zip(row) {
                            *s += v;
                        }
                    }
                    contributions.push((node.a, matmul_nt(&dz, w_x_val)));
                    contributions.push((node.b, matmul_nt(&dz, w_h_val)));
                    contributions.push((c_prev_id, Tensor::from_vec(&[batch, hs], dc_prev)?));
                    contributions.push((w_x_id, matmul_tn(x_val, &dz)));
                    contributions.push((w_h_id, matmul_tn(h_val, &dz)));
                    contributions.push((
                        bias_id,
                        Tensor::from_vec(self.nodes[bias_id].value.shape(), db)?,
                    ));
                }
            }

            for (target, contrib) in contributions {
                if !contrib.is_finite_all() {
                    return Err(NeuralError::NonFiniteGradient {
                        op: node.op.name().to_string(),
                    });
                }
                match &mut grads[target] {
                    Some(existing) => existing.add_assign(&contrib),
                    slot @ None => *slot = Some(contrib),
                }
            }
        }

        Ok(Gradients { grads })
    }
}
