//! Cross-model pipeline contracts: checkpoint compatibility enforcement and
//! the latent-path generation flow.

use generators::{generate_trajectories, train_latent_gan, GanError, LatentGanConfig};
use neural_core::Prng;
use recurrent_autoencoder::{
    encode_dataset, train_autoencoder, train_length_estimator, AeTrainConfig, LenTrainConfig,
};
use trajectory_core::{
    fit_normalization, normalize, synth_scenario, Dataset, ScenarioLabel, SynthParams,
};

fn tiny_pipeline(
    seed: u64,
) -> (
    recurrent_autoencoder::AeModel,
    recurrent_autoencoder::LenModel,
    generators::LatentGanModel,
) {
    let params = SynthParams {
        length_range: (8, 14),
        ..Default::default()
    };
    let mut rng = Prng::new(seed);
    let raw = Dataset::new(
        (0..30)
            .map(|i| {
                let mut t = synth_scenario(ScenarioLabel::CutIn, &params, &mut rng);
                t.id = format!("p{i}");
                t
            })
            .collect::<Vec<_>>(),
    )
    .unwrap();
    let stats = fit_normalization(&raw).unwrap();
    let ds = normalize(&raw, &stats);
    let (ae, _) = train_autoencoder(
        &ds,
        &AeTrainConfig {
            hidden_size: 10,
            latent_size: 6,
            epochs: 3,
            seed,
            ..Default::default()
        },
    )
    .unwrap();
    let latents = encode_dataset(&ae, &ds).unwrap();
    let (len_model, _) = train_length_estimator(
        &latents,
        &LenTrainConfig {
            hidden: vec![8],
            epochs: 10,
            seed,
            ..Default::default()
        },
    )
    .unwrap();
    let (gan, _) = train_latent_gan(
        &latents,
        &LatentGanConfig {
            iters: 3,
            hidden: vec![8],
            batch_size: 8,
            n_critic: 1,
            snapshot_every: 0,
            seed,
            ..Default::default()
        },
    )
    .unwrap();
    (ae, len_model, gan)
}

#[test]
fn generation_pipeline_produces_in_range_lengths() {
    let (ae, len_model, gan) = tiny_pipeline(1);
    let mut rng = Prng::new(9);
    let out = generate_trajectories(&gan, &ae, &len_model, 5, &mut rng).unwrap();
    assert_eq!(out.len(), 5);
    for t in out.iter() {
        assert!((8..=14).contains(&t.len()), "length {} out of range", t.len());
    }
}

#[test]
fn mismatched_autoencoder_rejected() {
    let (_, len_model, gan) = tiny_pipeline(1);
    // A different training run produces a different latent space.
    let (other_ae, _, _) = tiny_pipeline(2);
    let mut rng = Prng::new(9);
    let err = generate_trajectories(&gan, &other_ae, &len_model, 3, &mut rng).unwrap_err();
    assert!(matches!(err, GanError::LatentSpaceMismatch(_)), "{err}");
}
