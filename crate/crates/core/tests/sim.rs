use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rcrit_core::bounds::tradeoff_lower;
use rcrit_core::math::divergence;
use rcrit_core::oracle::{exact_error_probabilities, BinaryCode, DecisionRegion};
use rcrit_core::sim::{exponent_sweep, simulate_dual, simulate_with_code, Codebook, TrialConfig};
use rcrit_core::ChannelPair;

fn within(estimate: f64, exact: f64, trials: usize, k: f64) -> bool {
    let se = (exact * (1.0 - exact) / trials as f64).sqrt();
    (estimate - exact).abs() <= k * se + 1e-12
}

#[test]
fn agrees_with_exact_oracle_on_small_codes() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let trials = 4000;
    let (mut direct_ok, mut cond_ok) = (0, 0);
    let total = 100;
    for c in 0..total {
        let n = rng.gen_range(6..=14);
        let m = rng.gen_range(1..=6usize);
        let mut p0 = (rng.gen_range(0.05..0.5f64) * 100.0).round() / 100.0;
        let mut p1 = (rng.gen_range(0.05..0.5f64) * 100.0).round() / 100.0;
        if p0 == p1 {
            p1 = (p1 + 0.03).min(0.5);
            if p0 == p1 {
                p0 -= 0.1;
            }
        }
        let channel = ChannelPair::new(p0, p1).unwrap();
        let tau = p0.min(p1) + rng.gen::<f64>() * (p0 - p1).abs();
        let code = BinaryCode::random(n, m, c).unwrap();
        let cfg = TrialConfig {
            n,
            r: (m as f64).log2() / n as f64,
            channel,
            tau,
            trials,
            seed: c,
        };
        let exact = exact_error_probabilities(&code, &DecisionRegion::threshold(&channel, n, tau), &channel).unwrap();
        let rep = simulate_with_code(&cfg, &Codebook::from_binary_code(&code)).unwrap();
        if within(rep.alpha_direct.value, exact.alpha_avg, trials, 3.0)
            && within(rep.beta_direct.value, exact.beta_avg, trials, 3.0)
        {
            direct_ok += 1;
        }
        let close = |est: f64, se: f64, exact: f64| (est - exact).abs() <= 3.0 * se + 1e-12;
        if close(rep.alpha.value, rep.alpha.std_error, exact.alpha_avg)
            && close(rep.beta.value, rep.beta.std_error, exact.beta_avg)
        {
            cond_ok += 1;
        }
    }
    assert!(direct_ok >= 95, "direct estimator agreed on {direct_ok}/{total}");
    assert!(cond_ok >= 95, "conditioned estimator agreed on {cond_ok}/{total}");
}

#[test]
fn standard_errors_shrink_with_trials() {
    let channel = ChannelPair::new(0.3, 0.1).unwrap();
    let cfg = |trials| TrialConfig {
        n: 30,
        r: 0.2,
        channel,
        tau: 0.2,
        trials,
        seed: 5,
    };
    let small = simulate_dual(&cfg(2000)).unwrap();
    let large = simulate_dual(&cfg(8000)).unwrap();
    for (a, b) in [
        (small.alpha_direct.std_error, large.alpha_direct.std_error),
        (small.beta_direct.std_error, large.beta_direct.std_error),
        (small.alpha.std_error, large.alpha.std_error),
    ] {
        let ratio = a / b;
        assert!((ratio - 2.0).abs() < 0.4, "{a} / {b} = {ratio}");
    }
}

#[test]
fn known_input_reaches_divergence_exponent() {
    let channel = ChannelPair::new(0.25, 0.1).unwrap();
    let rep = simulate_dual(&TrialConfig {
        n: 1000,
        r: 0.0,
        channel,
        tau: 0.25,
        trials: 20_000,
        seed: 3,
    })
    .unwrap();
    let d = divergence(0.25, 0.1).unwrap();
    let beta = rep.beta_exponent_hat.unwrap();
    assert!((beta - d).abs() <= 0.05, "{beta} vs {d}");
    assert!(rep.alpha_exponent_hat.unwrap() < 0.01);
    assert!(rep.alpha_direct.value > 0.3 && rep.alpha_direct.value < 0.7);
}

#[test]
fn sweep_tracks_prediction() {
    let channel = ChannelPair::new(0.25, 0.1).unwrap();
    let r = 0.005;
    let taus = [0.15, 0.2, 0.25];
    let rows = exponent_sweep(&channel, r, &taus, &[2000], 60, 11).unwrap();
    assert_eq!(rows.len(), 3);
    for row in &rows {
        let predicted = tradeoff_lower(&channel, r, row.tau).unwrap();
        assert_eq!(row.predicted_alpha_exponent, predicted.alpha_exponent);
        assert_eq!(row.predicted_beta_exponent, predicted.beta_exponent);
        let beta = row.beta_exponent_hat.unwrap();
        assert!(beta >= predicted.beta_exponent - 0.1, "tau = {}: {beta}", row.tau);
    }
    let at_p0 = rows.iter().find(|r| r.tau == 0.25).unwrap();
    assert!(at_p0.alpha_exponent_hat.unwrap() < 0.01);
}

#[test]
fn size_guard() {
    let channel = ChannelPair::new(0.25, 0.1).unwrap();
    let cfg = TrialConfig {
        n: 1000,
        r: 0.05,
        channel,
        tau: 0.2,
        trials: 1,
        seed: 0,
    };
    assert!(simulate_dual(&cfg).is_err());
}
