//! Gradient verification: every differentiable layer against central finite
//! differences on randomized inputs.

use neural_core::{
    bilstm_forward, grad_check, Activation, FeedForward, LstmParams, MlpParams, NodeId, Prng,
    ResNetParams, Tape, Tensor,
};

fn mlp_loss(
    net: &MlpParams,
    params: &[Tensor],
    x: &Tensor,
    target: &Tensor,
) -> neural_core::Result<(f64, Vec<Tensor>)> {
    // Rebuild the net with the candidate parameter values.
    let mut candidate = net.clone();
    for (dst, src) in candidate.tensors_mut().into_iter().zip(params) {
        *dst = src.clone();
    }
    let mut tape = Tape::new();
    let bound = candidate.bind(&mut tape)?;
    let xid = tape.leaf(x.clone())?;
    let tid = tape.leaf(target.clone())?;
    let out = bound.forward(&mut tape, xid)?;
    let loss = tape.mse_mean(out, tid)?;
    let grads = tape.backward(loss)?;
    let gvec = bound
        .param_ids()
        .iter()
        .zip(params)
        .map(|(id, p)| grads.get_or_zeros(*id, p.shape()))
        .collect();
    Ok((tape.scalar_value(loss), gvec))
}

#[test]
fn mlp_gradients_match_finite_differences() {
    for seed in 0..5u64 {
        let mut rng = Prng::new(seed);
        let net = MlpParams::new(&[4, 6, 3], Activation::Tanh, Activation::Linear, &mut rng);
        let x = Tensor::uniform_init(&[3, 4], 1, &mut rng);
        let target = Tensor::uniform_init(&[3, 3], 1, &mut rng);
        let params: Vec<Tensor> = net.tensors().into_iter().cloned().collect();
        let err = grad_check(
            |ps| mlp_loss(&net, ps, &x, &target),
            &params,
            1e-5,
            12,
            &mut rng,
        )
        .unwrap();
        assert!(err < 1e-4, "seed {seed}: max rel err {err}");
    }
}

#[test]
fn resnet_gradients_match_finite_differences() {
    for seed in 0..3u64 {
        let mut rng = Prng::new(100 + seed);
        let net = ResNetParams::new(
            3,
            5,
            2,
            2,
            Activation::LeakyRelu,
            Activation::Linear,
            &mut rng,
        );
        let x = Tensor::uniform_init(&[4, 3], 1, &mut rng);
        let target = Tensor::uniform_init(&[4, 2], 1, &mut rng);
        let ff = FeedForward::ResNet(net.clone());
        let params: Vec<Tensor> = ff.tensors().into_iter().cloned().collect();
        let err = grad_check(
            |ps| {
                let mut cand = net.clone();
                for (dst, src) in cand.tensors_mut().into_iter().zip(ps) {
                    *dst = src.clone();
                }
                let mut tape = Tape::new();
                let bound = cand.bind(&mut tape)?;
                let xid = tape.leaf(x.clone())?;
                let tid = tape.leaf(target.clone())?;
                let out = bound.forward(&mut tape, xid)?;
                let loss = tape.mse_mean(out, tid)?;
                let grads = tape.backward(loss)?;
                let gvec = bound
                    .param_ids()
                    .iter()
                    .zip(ps)
                    .map(|(id, p)| grads.get_or_zeros(*id, p.shape()))
                    .collect();
                Ok((tape.scalar_value(loss), gvec))
            },
            &params,
            1e-5,
            10,
            &mut rng,
        )
        .unwrap();
        assert!(err < 1e-4, "seed {seed}: max rel err {err}");
    }
}

fn lstm_sum_loss(
    proto: &LstmParams,
    params: &[Tensor],
    seq: &[Tensor],
) -> neural_core::Result<(f64, Vec<Tensor>)> {
    let mut cand = proto.clone();
    for (dst, src) in cand.tensors_mut().into_iter().zip(params) {
        *dst = src.clone();
    }
    let mut tape = Tape::new();
    let bound = cand.bind(&mut tape)?;
    let steps: Vec<NodeId> = seq
        .iter()
        .map(|s| tape.leaf(s.clone()))
        .collect::<neural_core::Result<_>>()?;
    let trace = bound.forward(&mut tape, &steps, None)?;
    // loss = sum over all per-step outputs
    let mut acc = tape.sum(trace.outputs[0])?;
    for out in &trace.outputs[1..] {
        let s = tape.sum(*out)?;
        acc = tape.add(acc, s)?;
    }
    let grads = tape.backward(acc)?;
    let gvec = bound
        .param_ids()
        .iter()
        .zip(params)
        .map(|(id, p)| grads.get_or_zeros(*id, p.shape()))
        .collect();
    Ok((tape.scalar_value(acc), gvec))
}

#[test]
fn lstm_through_time_gradients_match_finite_differences() {
    for seed in 0..5u64 {
        let mut rng = Prng::new(200 + seed);
        let proto = LstmParams::new(2, 4, &mut rng);
        let seq: Vec<Tensor> = (0..6)
            .map(|_| Tensor::uniform_init(&[2, 2], 1, &mut rng))
            .collect();
        let params: Vec<Tensor> = proto.tensors().into_iter().cloned().collect();
        let err = grad_check(
            |ps| lstm_sum_loss(&proto, ps, &seq),
            &params,
            1e-5,
            14,
            &mut rng,
        )
        .unwrap();
        assert!(err < 1e-4, "seed {seed}: max rel err {err}");
    }
}

#[test]
fn bilstm_gradients_match_finite_differences() {
    for seed in 0..3u64 {
        let mut rng = Prng::new(300 + seed);
        let fwd = LstmParams::new(2, 3, &mut rng);
        let bwd = LstmParams::new(2, 3, &mut rng);
        let seq: Vec<Tensor> = (0..5)
            .map(|_| Tensor::uniform_init(&[1, 2], 1, &mut rng))
            .collect();
        let mut params: Vec<Tensor> = fwd.tensors().into_iter().cloned().collect();
        params.extend(bwd.tensors().into_iter().cloned());
        let err = grad_check(
            |ps| {
                let mut f = fwd.clone();
                let mut b = bwd.clone();
                for (dst, src) in f
                    .tensors_mut()
                    .into_iter()
                    .chain(b.tensors_mut())
                    .zip(ps)
                {
                    *dst = src.clone();
                }
                let mut tape = Tape::new();
                let bf = f.bind(&mut tape)?;
                let bb = b.bind(&mut tape)?;
                let steps: Vec<NodeId> = seq
                    .iter()
                    .map(|s| tape.leaf(s.clone()))
                    .collect::<neural_core::Result<_>>()?;
                let outs = bilstm_forward(&mut tape, &bf, &bb, &steps)?;
                let mut acc = tape.sum(outs[0])?;
                for out in &outs[1..] {
                    let s = tape.sum(*out)?;
                    acc = tape.add(acc, s)?;
                }
                let grads = tape.backward(acc)?;
                let ids: Vec<NodeId> = bf.param_ids().into_iter().chain(bb.param_ids()).collect();
                let gvec = ids
                    .iter()
                    .zip(ps)
                    .map(|(id, p)| grads.get_or_zeros(*id, p.shape()))
                    .collect();
                Ok((tape.scalar_value(acc), gvec))
            },
            &params,
            1e-5,
            10,
            &mut rng,
        )
        .unwrap();
        assert!(err < 1e-4, "seed {seed}: max rel err {err}");
    }
}

#[test]
fn bce_logits_gradients_match_finite_differences() {
    let mut rng = Prng::new(400);
    let proto = MlpParams::new(&[3, 4, 1], Activation::LeakyRelu, Activation::Linear, &mut rng);
    let x = Tensor::uniform_init(&[5, 3], 1, &mut rng);
    let targets =
        Tensor::from_vec(&[5, 1], (0..5).map(|i| f64::from(i % 2 == 0)).collect()).unwrap();
    let params: Vec<Tensor> = proto.tensors().into_iter().cloned().collect();
    let err = grad_check(
        |ps| {
            let mut cand = proto.clone();
            for (dst, src) in cand.tensors_mut().into_iter().zip(ps) {
                *dst = src.clone();
            }
            let mut tape = Tape::new();
            let bound = cand.bind(&mut tape)?;
            let xid = tape.leaf(x.clone())?;
            let logits = bound.forward(&mut tape, xid)?;
            let loss = tape.bce_logits_mean(logits, targets.clone())?;
            let grads = tape.backward(loss)?;
            let gvec = bound
                .param_ids()
                .iter()
                .zip(ps)
                .map(|(id, p)| grads.get_or_zeros(*id, p.shape()))
                .collect();
            Ok((tape.scalar_value(loss), gvec))
        },
        &params,
        1e-5,
        12,
        &mut rng,
    )
    .unwrap();
    assert!(err < 1e-4, "max rel err {err}");
}
