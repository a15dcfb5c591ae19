//! Fully-connected and residual feed-forward layers.

use crate::error::Result;
use crate::rng::Prng;
use crate::tape::{NodeId, Tape};
use crate::tensor::Tensor;

/// Leaky-rectifier slope used inside discriminators.
pub const LEAKY_SLOPE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Linear,
    Tanh,
    Sigmoid,
    LeakyRelu,
}

impl Activation {
    pub fn apply(self, tape: &mut Tape, x: NodeId) -> Result<NodeId> {
        match self {
            Activation::Linear => Ok(x),
            Activation::Tanh => tape.tanh(x),
            Activation::Sigmoid => tape.sigmoid(x),
            Activation::LeakyRelu => tape.leaky_relu(x, LEAKY_SLOPE),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Activation::Linear => "linear",
            Activation::Tanh => "tanh",
            Activation::Sigmoid => "sigmoid",
            Activation::LeakyRelu => "leaky_relu",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "linear" => Some(Activation::Linear),
            "tanh" => Some(Activation::Tanh),
            "sigmoid" => Some(Activation::Sigmoid),
            "leaky_relu" => Some(Activation::LeakyRelu),
            _ => None,
        }
    }
}

/// `x @ w + b` with `w` [in,out] and `b` [1,out].
pub fn linear(tape: &mut Tape, x: NodeId, w: NodeId, b: NodeId) -> Result<NodeId> {
    let y = tape.matmul(x, w)?;
    tape.add_row(y, b)
}

/// Plain multi-layer perceptron: affine + activation per layer.
#[derive(Debug, Clone)]
pub struct MlpParams {
    pub widths: Vec<usize>,
    pub weights: Vec<Tensor>,
    pub biases: Vec<Tensor>,
    pub hidden_activation: Activation,
    pub output_activation: Activation,
}

impl MlpParams {
    pub fn new(
        widths: &[usize],
        hidden_activation: Activation,
        output_activation: Activation,
        rng: &mut Prng,
    ) -> Self {
        assert!(widths.len() >= 2, "MLP needs at least input and output widths");
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for pair in widths.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            weights.push(Tensor::uniform_init(&[fan_in, fan_out], fan_in, rng));
            biases.push(Tensor::zeros(&[1, fan_out]));
        }
        MlpParams {
            widths: widths.to_vec(),
            weights,
            biases,
            hidden_activation,
            output_activation,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.widths.last().unwrap()
    }

    pub fn bind(&self, tape: &mut Tape) -> Result<BoundMlp> {
        let mut layers = Vec::with_capacity(self.weights.len());
        for (w, b) in self.weights.iter().zip(&self.biases) {
            let wid = tape.leaf(w.clone())?;
            let bid = tape.leaf(b.clone())?;
            layers.push((wid, bid));
        }
        Ok(BoundMlp {
            layers,
            hidden_activation: self.hidden_activation,
            output_activation: self.output_activation,
        })
    }

    pub fn tensors(&self) -> Vec<&Tensor> {
        self.weights.iter().chain(self.biases.iter()).collect()
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        self.weights
            .iter_mut()
            .chain(self.biases.iter_mut())
            .collect()
    }

    /// Stable parameter names, aligned with [`MlpParams::tensors`].
    pub fn names(&self, prefix: &str) -> Vec<String> {
        let w = (0..self.weights.len()).map(|i| format!("{prefix}w{i}"));
        let b = (0..self.biases.len()).map(|i| format!("{prefix}b{i}"));
        w.chain(b).collect()
    }
}

pub struct BoundMlp {
    layers: Vec<(NodeId, NodeId)>,
    hidden_activation: Activation,
    output_activation: Activation,
}

impl BoundMlp {
    pub fn forward(&self, tape: &mut Tape, x: NodeId) -> Result<NodeId> {
        let mut h = x;
        let last = self.layers.len() - 1;
        for (i, (w, b)) in self.layers.iter().enumerate() {
            h = linear(tape, h, *w, *b)?;
            let act = if i == last {
                self.output_activation
            } else {
                self.hidden_activation
            };
            h = act.apply(tape, h)?;
        }
        Ok(h)
    }

    /// Node ids aligned with [`MlpParams::tensors`].
    pub fn param_ids(&self) -> Vec<NodeId> {
        let w = self.layers.iter().map(|(w, _)| *w);
        let b = self.layers.iter().map(|(_, b)| *b);
        w.chain(b).collect()
    }
}

/// Residual feed-forward net: input projection, identity-skip blocks of two
/// affine layers each, output projection. A block with zero weights is an
/// exact identity map.
#[derive(Debug, Clone)]
pub struct ResNetParams {
    pub input_dim: usize,
    pub width: usize,
    pub output_dim: usize,
    pub input_w: Tensor,
    pub input_b: Tensor,
    pub blocks: Vec<ResBlock>,
    pub output_w: Tensor,
    pub output_b: Tensor,
    pub hidden_activation: Activation,
    pub output_activation: Activation,
}

#[derive(Debug, Clone)]
pub struct ResBlock {
    pub w1: Tensor,
    pub b1: Tensor,
    pub w2: Tensor,
    pub b2: Tensor,
}

impl ResNetParams {
    pub fn new(
        input_dim: usize,
        width: usize,
        n_blocks: usize,
        output_dim: usize,
        hidden_activation: Activation,
        output_activation: Activation,
        rng: &mut Prng,
    ) -> Self {
        let blocks = (0..n_blocks)
            .map(|_| ResBlock {
                w1: Tensor::uniform_init(&[width, width], width, rng),
                b1: Tensor::zeros(&[1, width]),
                w2: Tensor::uniform_init(&[width, width], width, rng),
                b2: Tensor::zeros(&[1, width]),
            })
            .collect();
        ResNetParams {
            input_dim,
            width,
            output_dim,
            input_w: Tensor::uniform_init(&[input_dim, width], input_dim, rng),
            input_b: Tensor::zeros(&[1, width]),
            blocks,
            output_w: Tensor::uniform_init(&[width, output_dim], width, rng),
            output_b: Tensor::zeros(&[1, output_dim]),
            hidden_activation,
            output_activation,
        }
    }

    pub fn bind(&self, tape: &mut Tape) -> Result<BoundResNet> {
        let input = (tape.leaf(self.input_w.clone())?, tape.leaf(self.input_b.clone())?);
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for blk in &self.blocks {
            blocks.push((
                (tape.leaf(blk.w1.clone())?, tape.leaf(blk.b1.clone())?),
                (tape.leaf(blk.w2.clone())?, tape.leaf(blk.b2.clone())?),
            ));
        }
        let output = (
            tape.leaf(self.output_w.clone())?,
            tape.leaf(self.output_b.clone())?,
        );
        Ok(BoundResNet {
            input,
            blocks,
            output,
            hidden_activation: self.hidden_activation,
            output_activation: self.output_activation,
        })
    }

    pub fn tensors(&self) -> Vec<&Tensor> {
        let mut v = vec![&self.input_w, &self.input_b];
        for blk in &self.blocks {
            v.extend([&blk.w1, &blk.b1, &blk.w2, &blk.b2]);
        }
        v.extend([&self.output_w, &self.output_b]);
        v
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        let mut v: Vec<&mut Tensor> = vec![&mut self.input_w, &mut self.input_b];
        for blk in &mut self.blocks {
            v.push(&mut blk.w1);
            v.push(&mut blk.b1);
            v.push(&mut blk.w2);
            v.push(&mut blk.b2);
        }
        v.push(&mut self.output_w);
        v.push(&mut self.output_b);
        v
    }

    pub fn names(&self, prefix: &str) -> Vec<String> {
        let mut v = vec![format!("{prefix}in.w"), format!("{prefix}in.b")];
        for i in 0..self.blocks.len() {
            v.push(format!("{prefix}blk{i}.w1"));
            v.push(format!("{prefix}blk{i}.b1"));
            v.push(format!("{prefix}blk{i}.w2"));
            v.push(format!("{prefix}blk{i}.b2"));
        }
        v.push(format!("{prefix}out.w"));
        v.push(format!("{prefix}out.b"));
        v
    }
}

pub struct BoundResNet {
    input: (NodeId, NodeId),
    blocks: Vec<((NodeId, NodeId), (NodeId, NodeId))>,
    output: (NodeId, NodeId),
    hidden_activation: Activation,
    output_activation: Activation,
}

impl BoundResNet {
    pub fn forward(&self, tape: &mut Tape, x: NodeId) -> Result<NodeId> {
        let mut h = linear(tape, x, self.input.0, self.input.1)?;
        h = self.hidden_activation.apply(tape, h)?;
        for ((w1, b1), (w2, b2)) in &self.blocks {
            let t = linear(tape, h, *w1, *b1)?;
            let t = self.hidden_activation.apply(tape, t)?;
            let t = linear(tape, t, *w2, *b2)?;
            // Skip join without activation so a zero residual branch is identity.
            h = tape.add(h, t)?;
        }
        let out = linear(tape, h, self.output.0, self.output.1)?;
        self.output_activation.apply(tape, out)
    }

    pub fn param_ids(&self) -> Vec<NodeId> {
        let mut v = vec![self.input.0, self.input.1];
        for ((w1, b1), (w2, b2)) in &self.blocks {
            v.extend([*w1, *b1, *w2, *b2]);
        }
        v.extend([self.output.0, self.output.1]);
        v
    }
}

/// Either feed-forward architecture behind one interface.
#[derive(Debug, Clone)]
pub enum FeedForward {
    Mlp(MlpParams),
    ResNet(ResNetParams),
}

impl FeedForward {
    pub fn input_dim(&self) -> usize {
        match self {
            FeedForward::Mlp(m) => m.input_dim(),
            FeedForward::ResNet(r) => r.input_dim,
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            FeedForward::Mlp(m) => m.output_dim(),
            FeedForward::ResNet(r) => r.output_dim,
        }
    }

    pub fn bind(&self, tape: &mut Tape) -> Result<BoundFeedForward> {
        Ok(match self {
            FeedForward::Mlp(m) => BoundFeedForward::Mlp(m.bind(tape)?),
            FeedForward::ResNet(r) => BoundFeedForward::ResNet(r.bind(tape)?),
        })
    }

    pub fn tensors(&self) -> Vec<&Tensor> {
        match self {
            FeedForward::Mlp(m) => m.tensors(),
            FeedForward::ResNet(r) => r.tensors(),
        }
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        match self {
            FeedForward::Mlp(m) => m.tensors_mut(),
            FeedForward::ResNet(r) => r.tensors_mut(),
        }
    }

    pub fn names(&self, prefix: &str) -> Vec<String> {
        match self {
            FeedForward::Mlp(m) => m.names(prefix),
            FeedForward::ResNet(r) => r.names(prefix),
        }
    }
}

pub enum BoundFeedForward {
    Mlp(BoundMlp),
    ResNet(BoundResNet),
}

impl BoundFeedForward {
    pub fn forward(&self, tape: &mut Tape, x: NodeId) -> Result<NodeId> {
        match self {
            BoundFeedForward::Mlp(m) => m.forward(tape, x),
            BoundFeedForward::ResNet(r) => r.forward(tape, x),
        }
    }

    pub fn param_ids(&self) -> Vec<NodeId> {
        match self {
            BoundFeedForward::Mlp(m) => m.param_ids(),
            BoundFeedForward::ResNet(r) => r.param_ids(),
        }
    }
}

/// Forward pass for a feed-forward net outside any training context.
pub fn feed_forward_eval(net: &FeedForward, x: &Tensor) -> Result<Tensor> {
    let mut tape = Tape::new();
    let xid = tape.leaf(x.clone())?;
    let bound = net.bind(&mut tape)?;
    let out = bound.forward(&mut tape, xid)?;
    Ok(tape.value(out).clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_weights_zero_bias_zero_output() {
        let mut rng = Prng::new(1);
        let mut mlp = MlpParams::new(&[3, 4, 2], Activation::Tanh, Activation::Linear, &mut rng);
        for t in mlp.tensors_mut() {
            for v in t.data_mut() {
                *v = 0.0;
            }
        }
        let x = Tensor::from_vec(&[2, 3], vec![1.0, -2.0, 0.5, 3.0, 4.0, -1.0]).unwrap();
        let y = feed_forward_eval(&FeedForward::Mlp(mlp), &x).unwrap();
        assert!(y.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn identity_one_layer_linear() {
        let mut rng = Prng::new(1);
        let mut mlp = MlpParams::new(&[3, 3], Activation::Tanh, Activation::Linear, &mut rng);
        let w = &mut mlp.weights[0];
        for i in 0..3 {
            for j in 0..3 {
                w.data_mut()[i * 3 + j] = if i == j { 1.0 } else { 0.0 };
            }
        }
        let x = Tensor::from_vec(&[1, 3], vec![0.3, -0.7, 2.0]).unwrap();
        let y = feed_forward_eval(&FeedForward::Mlp(mlp), &x).unwrap();
        assert_eq!(y.data(), x.data());
    }

    #[test]
    fn two_layer_matches_hand_rolled_oracle() {
        let mut rng = Prng::new(42);
        let mlp = MlpParams::new(&[4, 5, 3], Activation::Tanh, Activation::Linear, &mut rng);
        let x = Tensor::uniform_init(&[2, 4], 4, &mut rng);
        let y = feed_forward_eval(&FeedForward::Mlp(mlp.clone()), &x).unwrap();

        // Independent dense-algebra oracle: explicit loops, no tape.
        let mut expect = vec![0.0; 2 * 3];
        for r in 0..2 {
            let mut h = vec![0.0; 5];
            for j in 0..5 {
                let mut acc = mlp.biases[0].data()[j];
                for i in 0..4 {
                    acc += x.data()[r * 4 + i] * mlp.weights[0].data()[i * 5 + j];
                }
                h[j] = acc.tanh();
            }
            for j in 0..3 {
                let mut acc = mlp.biases[1].data()[j];
                for (i, hv) in h.iter().enumerate() {
                    acc += hv * mlp.weights[1].data()[i * 3 + j];
                }
                expect[r * 3 + j] = acc;
            }
        }
        for (a, b) in y.data().iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn resnet_zero_residual_branch_is_identity() {
        let mut rng = Prng::new(3);
        let mut net = ResNetParams::new(4, 4, 2, 4, Activation::Tanh, Activation::Linear, &mut rng);
        // Identity input/output projections, zero block weights.
        for (w, dim) in [(&mut net.input_w, 4usize), (&mut net.output_w, 4usize)] {
            for v in w.data_mut().iter_mut() {
                *v = 0.0;
            }
            for i in 0..dim {
                w.data_mut()[i * dim + i] = 1.0;
            }
        }
        for blk in &mut net.blocks {
            for t in [&mut blk.w1, &mut blk.b1, &mut blk.w2, &mut blk.b2] {
                for v in t.data_mut() {
                    *v = 0.0;
                }
            }
        }
        net.hidden_activation = Activation::Linear;
        let x = Tensor::from_vec(&[2, 4], vec![0.1, -0.2, 0.3, 1.0, -1.0, 0.5, 0.0, 2.0]).unwrap();
        let y = feed_forward_eval(&FeedForward::ResNet(net), &x).unwrap();
        for (a, b) in y.data().iter().zip(x.data()) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
