use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lggm_core::optimize::canonical_angle;
use lggm_core::oracle;
use lggm_core::qstate::random_unitary_2x2;
use lggm_core::{
    average_ggm, build, ensemble, ggm, haar_random, lggm, schmidt_spectrum, CutPolicy, MeasurementConfig,
    OptimizerSettings, StateSpec, C64,
};

fn angles(m: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0..=PI, 0.0..(2.0 * PI)), m)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn ggm_is_invariant_under_local_unitaries(n in 2usize..=5, seed in any::<u64>()) {
        let state = haar_random(n, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
        let us: Vec<[C64; 4]> = (0..n).map(|_| random_unitary_2x2(&mut rng)).collect();
        let rotated = state.apply_local_unitaries(&us).unwrap();
        let a = ggm(&state, &CutPolicy::AllCuts).unwrap().value;
        let b = ggm(&rotated, &CutPolicy::AllCuts).unwrap().value;
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn ggm_lies_in_its_range(n in 2usize..=6, seed in any::<u64>()) {
        let state = haar_random(n, seed).unwrap();
        let g = ggm(&state, &CutPolicy::AllCuts).unwrap().value;
        let cap = 1.0 - 0.5f64.powi((n / 2) as i32);
        prop_assert!(g >= 0.0 && g <= cap + 1e-12);
    }

    #[test]
    fn schmidt_spectrum_is_shared_by_both_sides(n in 3usize..=6, seed in any::<u64>(), mask in 1u32..31) {
        let state = haar_random(n, seed).unwrap();
        let a: Vec<usize> = (1..=n).filter(|q| mask >> (q - 1) & 1 == 1).collect();
        prop_assume!(!a.is_empty() && a.len() < n);
        let b: Vec<usize> = (1..=n).filter(|q| !a.contains(q)).collect();
        let sa = schmidt_spectrum(&state, &a).unwrap();
        let sb = schmidt_spectrum(&state, &b).unwrap();
        let k = sa.len().min(sb.len());
        for i in 0..k {
            prop_assert!((sa[i] - sb[i]).abs() < 1e-10);
        }
        prop_assert!(sa[k..].iter().chain(&sb[k..]).all(|x| x.abs() < 1e-10));
    }

    #[test]
    fn ensemble_probabilities_sum_to_one(seed in any::<u64>(), a in angles(2), first in 1usize..=5, offset in 1usize..5) {
        let state = haar_random(5, seed).unwrap();
        let second = (first - 1 + offset) % 5 + 1;
        let config = MeasurementConfig { positions: vec![first, second], angles: a };
        let ens = ensemble(&state, &config).unwrap();
        prop_assert_eq!(ens.entries.len(), 4);
        prop_assert!((ens.total_probability() - 1.0).abs() < 1e-12);
        for e in &ens.entries {
            if let Some(s) = &e.state {
                let norm: f64 = s.amplitudes().iter().map(|z| z.norm_sqr()).sum();
                prop_assert!((norm - 1.0).abs() < 1e-12);
                prop_assert_eq!(s.n_qubits(), 3);
            }
        }
    }

    #[test]
    fn canonical_angles_describe_the_same_measurement(theta in -10.0f64..10.0, phi in -10.0f64..10.0, seed in any::<u64>()) {
        let state = haar_random(3, seed).unwrap();
        let (t, p) = canonical_angle(theta, phi);
        prop_assert!((0.0..=PI).contains(&t) && (0.0..2.0 * PI).contains(&p));
        // The raw pair is outside the validated domain, so compare through
        // the bras directly: both bases must give the same outcome weights.
        let raw = lggm_core::qstate::measurement_bras(theta, phi);
        let canon = lggm_core::qstate::measurement_bras(t, p);
        let mut raw_p = [0.0; 2];
        let mut canon_p = [0.0; 2];
        for (l, (r, c)) in raw.iter().zip(&canon).enumerate() {
            for j in 0..4 {
                let (x0, x1) = (state.amplitudes()[j], state.amplitudes()[j | 4]);
                raw_p[l] += (r[0] * x0 + r[1] * x1).norm_sqr();
                canon_p[l] += (c[0] * x0 + c[1] * x1).norm_sqr();
            }
        }
        raw_p.sort_by(|a, b| a.partial_cmp(b).unwrap());
        canon_p.sort_by(|a, b| a.partial_cmp(b).unwrap());
        prop_assert!((raw_p[0] - canon_p[0]).abs() < 1e-10);
    }

    #[test]
    fn measurement_order_does_not_matter(seed in any::<u64>(), a in angles(2)) {
        let state = haar_random(4, seed).unwrap();
        let forward = MeasurementConfig { positions: vec![1, 3], angles: a.clone() };
        let backward = MeasurementConfig { positions: vec![3, 1], angles: vec![a[1], a[0]] };
        let x = average_ggm(&ensemble(&state, &forward).unwrap(), &CutPolicy::AllCuts).unwrap();
        let y = average_ggm(&ensemble(&state, &backward).unwrap(), &CutPolicy::AllCuts).unwrap();
        prop_assert!((x - y).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn optimized_value_dominates_any_fixed_basis(seed in any::<u64>(), a in angles(1), r in 1usize..=4) {
        let state = haar_random(4, seed).unwrap();
        let settings = OptimizerSettings::default();
        let best = lggm(&state, &[r], &settings, &CutPolicy::AllCuts).unwrap().value;
        for config in [
            MeasurementConfig::computational(&[r]),
            MeasurementConfig { positions: vec![r], angles: a.clone() },
        ] {
            let fixed = average_ggm(&ensemble(&state, &config).unwrap(), &CutPolicy::AllCuts).unwrap();
            prop_assert!(best >= fixed - 1e-9, "optimized {} below fixed {}", best, fixed);
        }
        prop_assert!(best <= 0.5 + 1e-12);
    }

    #[test]
    fn gw_lggm_sits_between_ggm_and_upper_bound(n in 3usize..=5, seed in any::<u64>(), r in 1usize..=5) {
        prop_assume!(r <= n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = lggm_core::qstate::gaussian_amplitudes(n, &mut rng);
        let total: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
        let weights: Vec<f64> = coeffs.iter().map(|z| z.norm_sqr() / total).collect();
        let state = build(&StateSpec::Gw(coeffs)).unwrap();
        let g = ggm(&state, &CutPolicy::AllCuts).unwrap().value;
        let el = lggm(&state, &[r], &OptimizerSettings::default(), &CutPolicy::AllCuts).unwrap().value;
        let upper = oracle::gw_lggm_upper_bound(&weights).unwrap().value;
        prop_assert!(el >= g - 1e-9 && el <= upper + 1e-9, "G {} <= {} <= {}", g, el, upper);
    }
}

/// `|<0|psi>|^2` of a Haar state on `d` dimensions is Beta(1, d - 1).
#[test]
fn haar_first_amplitude_has_beta_moments() {
    let n = 3;
    let d = 8.0;
    let samples = 20_000;
    let xs: Vec<f64> = (0..samples).map(|s| haar_random(n, s).unwrap().amplitudes()[0].norm_sqr()).collect();
    let mean = xs.iter().sum::<f64>() / samples as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
    let expected_var = (d - 1.0) / (d * d * (d + 1.0));
    // Five standard errors.
    assert!((mean - 1.0 / d).abs() < 5.0 * (expected_var / samples as f64).sqrt());
    assert_abs_diff_eq!(var, expected_var, epsilon = 0.1 * expected_var);
}

#[test]
fn haar_sampling_is_reproducible() {
    assert_eq!(haar_random(4, 17).unwrap(), haar_random(4, 17).unwrap());
    assert_ne!(haar_random(4, 17).unwrap(), haar_random(4, 18).unwrap());
}

/// The mean GGM of Haar states is independent of the generator: a sampler
/// driven by a different RNG family gives the same value within noise.
#[test]
fn haar_mean_ggm_agrees_across_generators() {
    use rand::rngs::StdRng;
    let samples = 3000;
    let mut std_rng = StdRng::seed_from_u64(99);
    let mut sum_a = 0.0;
    let mut sum_b = 0.0;
    let mut sq = 0.0;
    for s in 0..samples {
        let a = ggm(&haar_random(3, s).unwrap(), &CutPolicy::AllCuts).unwrap().value;
        let b = ggm(&lggm_core::qstate::haar_random_with_rng(3, &mut std_rng).unwrap(), &CutPolicy::AllCuts)
            .unwrap()
            .value;
        sum_a += a;
        sum_b += b;
        sq += a * a;
    }
    let n = samples as f64;
    let sd = (sq / n - (sum_a / n).powi(2)).sqrt();
    assert!((sum_a / n - sum_b / n).abs() < 5.0 * sd * (2.0 / n).sqrt());
}
