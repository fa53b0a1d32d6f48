use dccm::forecast::{
    build_property_distributions, css_objective, fit_seasonal_arma, forecast, MaskedSeries, SeasonalOrder,
};
use dccm::netcore::LabelSet;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// `x_t = sum ar_i x_{t-i} + w_t - sum ma_j w_{t-j}` after a burn-in.
fn simulate(ar: &[f64], ma: &[f64], mean: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let burn = 500;
    let mut x = vec![0.0; n + burn];
    let mut w = vec![0.0; n + burn];
    for t in 0..n + burn {
        w[t] = StandardNormal.sample(&mut rng);
        let mut v = w[t];
        for (i, a) in ar.iter().enumerate() {
            if t > i {
                v += a * x[t - 1 - i];
            }
        }
        for (j, b) in ma.iter().enumerate() {
            if t > j {
                v -= b * w[t - 1 - j];
            }
        }
        x[t] = v;
    }
    x[burn..].iter().map(|v| v + mean).collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn recovered(ar: &[f64], ma: &[f64], order: SeasonalOrder) -> (Vec<f64>, Vec<f64>) {
    let fits: Vec<_> = (0..3)
        .map(|seed| {
            let s = MaskedSeries::observed(simulate(ar, ma, 5.0, 1000, 100 + seed));
            fit_seasonal_arma(&s, order).unwrap()
        })
        .collect();
    let phi = (0..ar.len()).map(|i| median(fits.iter().map(|m| m.phi[i]).collect())).collect();
    let theta = (0..ma.len()).map(|j| median(fits.iter().map(|m| m.theta[j]).collect())).collect();
    (phi, theta)
}

#[test]
fn ar1_round_trip() {
    let (phi, _) = recovered(&[0.7], &[], SeasonalOrder::new(1, 0, 0, 0, 1));
    assert!((phi[0] - 0.7).abs() < 0.1, "{phi:?}");
}

#[test]
fn ar2_round_trip() {
    let (phi, _) = recovered(&[0.5, -0.3], &[], SeasonalOrder::new(2, 0, 0, 0, 1));
    assert!((phi[0] - 0.5).abs() < 0.1 && (phi[1] + 0.3).abs() < 0.1, "{phi:?}");
}

#[test]
fn arma11_round_trip() {
    let (phi, theta) = recovered(&[0.6], &[-0.4], SeasonalOrder::new(1, 1, 0, 0, 1));
    assert!((phi[0] - 0.6).abs() < 0.1 && (theta[0] + 0.4).abs() < 0.1, "{phi:?} {theta:?}");
}

#[test]
fn seasonal_ar_round_trip() {
    // x_t = 0.6 x_{t-12} + w_t
    let mut ar = vec![0.0; 12];
    ar[11] = 0.6;
    let s = MaskedSeries::observed(simulate(&ar, &[], 0.0, 1000, 9));
    let m = fit_seasonal_arma(&s, SeasonalOrder::new(0, 0, 1, 0, 12)).unwrap();
    assert!((m.seasonal_phi[0] - 0.6).abs() < 0.1, "{:?}", m.seasonal_phi);
}

#[test]
fn masked_fit_residual_mean_near_zero() {
    let values = simulate(&[0.5], &[], 2.0, 400, 3);
    let mask: Vec<bool> = (0..400).map(|t| t % 24 == 0).collect();
    let s = MaskedSeries::with_mask(&values, &mask);
    let m = fit_seasonal_arma(&s, SeasonalOrder::new(1, 0, 0, 0, 1)).unwrap();
    let r = m.residuals(&s);
    let mean = r.residuals.iter().sum::<f64>() / r.scored as f64;
    assert!(mean.abs() < 0.05, "{mean}");
}

/// The 50% interval is mean +- 2 target sd; it should hold the truth half the time.
#[test]
fn half_coverage_intervals() {
    let history = simulate(&[0.7], &[], 0.0, 1000, 77);
    let s = MaskedSeries::observed(history.clone());
    let m = fit_seasonal_arma(&s, SeasonalOrder::new(1, 0, 0, 0, 1)).unwrap();
    let horizon = 3;
    let f = forecast(&m, &s, horizon).unwrap();
    let labels = LabelSet::new(["A"]).unwrap();
    let dists = build_property_distributions(&labels, &[f], 0.5, &[], 1e-8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut hits = vec![0usize; horizon];
    let futures = 1000;
    for _ in 0..futures {
        let mut x = *history.last().unwrap();
        for (h, d) in dists.iter().enumerate() {
            let w: f64 = StandardNormal.sample(&mut rng);
            x = 0.7 * x + w;
            let half = 2.0 * d.variance()[0].sqrt();
            if (x - d.mean()[0]).abs() <= half {
                hits[h] += 1;
            }
        }
    }
    for (h, &k) in hits.iter().enumerate() {
        let rate = k as f64 / futures as f64;
        assert!((rate - 0.5).abs() <= 0.05, "horizon {}: {rate}", h + 1);
    }
}

/// Explicit ARMA(1,1) objective: masked points take their one-step
/// prediction, contribute no residual and no squared term.
fn explicit_objective(phi: f64, theta: f64, mean: f64, values: &[f64], mask: &[bool]) -> (f64, usize) {
    let mut prev_x = if mask[0] { 0.0 } else { values[0] - mean };
    let mut prev_e = 0.0;
    let (mut ss, mut count) = (0.0, 0);
    for t in 1..values.len() {
        let pred = phi * prev_x - theta * prev_e;
        if mask[t] {
            prev_x = pred;
            prev_e = 0.0;
        } else {
            let x = values[t] - mean;
            let e = x - pred;
            ss += e * e;
            count += 1;
            prev_x = x;
            prev_e = e;
        }
    }
    (ss, count)
}

proptest! {
    #[test]
    fn masked_objective_matches_explicit(
        values in prop::collection::vec(-5.0f64..5.0, 5..60),
        mask_bits in prop::collection::vec(any::<bool>(), 60),
        phi in -0.9f64..0.9,
        theta in -0.9f64..0.9,
        mean in -1.0f64..1.0,
    ) {
        let mask: Vec<bool> = mask_bits[..values.len()].to_vec();
        let s = MaskedSeries::with_mask(&values, &mask);
        let (ss, count) = css_objective(SeasonalOrder::new(1, 1, 0, 0, 1), &[mean, phi, theta], &s);
        let (ess, ecount) = explicit_objective(phi, theta, mean, &values, &mask);
        prop_assert_eq!(count, ecount);
        prop_assert!((ss - ess).abs() <= 1e-9 * (1.0 + ess));
    }

    #[test]
    fn coverage_monotone_in_fraction(a in 0.05f64..0.95, b in 0.05f64..0.95, var in 1e-4f64..10.0) {
        prop_assume!((a - b).abs() > 1e-6);
        let labels = LabelSet::new(["A"]).unwrap();
        let r = [dccm::forecast::ForecastResult { horizon: 1, means: vec![0.0], variances: vec![var] }];
        let va = build_property_distributions(&labels, &r, a, &[], 1e-12).unwrap()[0].variance()[0];
        let vb = build_property_distributions(&labels, &r, b, &[], 1e-12).unwrap()[0].variance()[0];
        prop_assert_eq!(a < b, va < vb);
    }
}
