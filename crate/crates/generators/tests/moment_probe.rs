//! Slow opt-in probe: WGAN-GP moment matching on a known latent cloud.
//! Run with: cargo test -p generators --test moment_probe -- --ignored --nocapture

use generators::{sample_latent, train_latent_gan, LatentGanConfig};
use neural_core::Prng;
use recurrent_autoencoder::LatentDataset;

#[test]
#[ignore]
fn wgan_gp_matches_first_two_moments_of_a_gaussian_cloud() {
    // Anisotropic Gaussian with shifted mean in 6 dimensions.
    let dim = 6;
    let n = 1500;
    let mut rng = Prng::new(3);
    let means: Vec<f64> = (0..dim).map(|j| j as f64 * 0.4 - 1.0).collect();
    let stds: Vec<f64> = (0..dim).map(|j| 0.4 + 0.25 * j as f64).collect();
    let x: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..dim)
                .map(|j| means[j] + stds[j] * rng.normal())
                .collect()
        })
        .collect();
    let ld = LatentDataset {
        x,
        y: vec![30; n],
        ids: (0..n).map(|i| format!("g{i}")).collect(),
        length_range: (30, 70),
        ae_fingerprint: 0,
    };
    let cfg = LatentGanConfig {
        iters: 2500,
        batch_size: 64,
        hidden: vec![64, 64],
        snapshot_every: 0,
        seed: 11,
        ..Default::default()
    };
    let (model, report) = train_latent_gan(&ld, &cfg).unwrap();
    assert!(report.all_finite());
    // Mean absolute gradient-penalty over the last 10% of iterations should
    // be small once the critic settles near unit gradient norm.
    let tail = &report.rows[report.rows.len() * 9 / 10..];
    let mean_gp: f64 =
        tail.iter().filter_map(|r| r.gp).sum::<f64>() / tail.iter().filter(|r| r.gp.is_some()).count() as f64;
    println!("tail mean gradient penalty: {mean_gp:.4}");
    assert!(mean_gp < 1.0, "penalty has not settled: {mean_gp}");

    let samples = sample_latent(&model, 2000, &mut Prng::new(21)).unwrap();
    for j in 0..dim {
        let m: f64 = samples.iter().map(|z| z[j]).sum::<f64>() / samples.len() as f64;
        let v: f64 =
            samples.iter().map(|z| (z[j] - m) * (z[j] - m)).sum::<f64>() / samples.len() as f64;
        let se = stds[j] / (samples.len() as f64).sqrt();
        println!(
            "dim {j}: mean {m:.3} vs {:.3}, std {:.3} vs {:.3}",
            means[j],
            v.sqrt(),
            stds[j]
        );
        assert!(
            (m - means[j]).abs() < 3.0 * se + 0.25 * stds[j],
            "dim {j} mean off: {m} vs {}",
            means[j]
        );
        assert!(
            (v.sqrt() - stds[j]).abs() < 0.5 * stds[j],
            "dim {j} std off: {} vs {}",
            v.sqrt(),
            stds[j]
        );
    }
}
