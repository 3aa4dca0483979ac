mod common;

use common::{gaussian, rng};
use soqo::environments::{
    correlate, generate_trace, provenance_json, sample_increments, segment_bounds, AdversaryRule, IncrementFamily,
    IncrementSpec, RayAxis, TraceMode, TraceSpec,
};
use soqo::montecarlo::{MonteCarlo, MonteCarloEstimate, Statistic};
use soqo::{Matrix, PolicySpec, SpectralMatrix};

fn families() -> Vec<IncrementFamily> {
    let mut all = IncrementFamily::LIGHT_TAILED.to_vec();
    all.push(IncrementFamily::LognormalSym { sigma_ln: 0.5 });
    // α > 4 keeps the fourth moment finite, so the standard error is meaningful.
    all.push(IncrementFamily::LomaxSym { alpha: 6.0 });
    all
}

#[test]
fn squared_increment_norm_matches_the_trace_of_the_covariance() {
    let (d, runs) = (3usize, 100_000u64);
    for family in families() {
        let spec = TraceSpec::new(
            d,
            2,
            TraceMode::Martingale {
                increments: IncrementSpec::new(family.clone(), 1.5),
                correlation: None,
            },
            17,
        );
        let generator = spec.generator().unwrap();
        let sq: Vec<f64> = (0..runs)
            .map(|r| {
                let t = generator.generate(r).unwrap();
                t.increment(2).iter().map(|x| x * x).sum()
            })
            .collect();
        let est = MonteCarloEstimate::from_samples(&sq).unwrap();
        let z = (est.mean - 4.5) / est.std_error;
        assert!(z.abs() <= 3.0, "{family:?}: mean {} (z = {z})", est.mean);
    }
}

#[test]
fn increments_are_centered_given_the_past() {
    // Increment at t=2 split by the sign of the increment at t=1.
    for family in families() {
        let spec = TraceSpec::new(
            1,
            2,
            TraceMode::Martingale {
                increments: IncrementSpec::new(family.clone(), 1.0),
                correlation: None,
            },
            23,
        );
        let generator = spec.generator().unwrap();
        let (mut up, mut down) = (Vec::new(), Vec::new());
        for r in 0..40_000 {
            let t = generator.generate(r).unwrap();
            let next = t.increment(2)[0];
            if t.increment(1)[0] > 0.0 {
                up.push(next);
            } else {
                down.push(next);
            }
        }
        for group in [up, down] {
            let est = MonteCarloEstimate::from_samples(&group).unwrap();
            assert!(est.mean.abs() <= 3.0 * est.std_error, "{family:?}: {}", est.mean);
        }
    }
}

/// Hill estimate of the tail index from the `k` largest absolute values.
fn hill(mut xs: Vec<f64>, k: usize) -> f64 {
    xs.iter_mut().for_each(|x| *x = x.abs());
    xs.sort_by(|a, b| b.total_cmp(a));
    let threshold = xs[k].ln();
    let mean_excess = xs[..k].iter().map(|x| x.ln() - threshold).sum::<f64>() / k as f64;
    1.0 / mean_excess
}

#[test]
fn pareto_tail_index_is_recovered() {
    let spec = IncrementSpec::new(IncrementFamily::LomaxSym { alpha: 2.5 }, 1.0);
    let draws: Vec<f64> = sample_increments(&spec, 400_000, 1, &mut rng(5))
        .unwrap()
        .into_iter()
        .flatten()
        .collect();
    let alpha = hill(draws, 2_000);
    assert!((alpha - 2.5).abs() < 0.2, "Hill estimate {alpha}");

    // The light-tailed normal has no power tail: its Hill index grows with depth.
    let normal: Vec<f64> = sample_increments(&IncrementSpec::new(IncrementFamily::Normal, 1.0), 400_000, 1, &mut rng(6))
        .unwrap()
        .into_iter()
        .flatten()
        .collect();
    assert!(hill(normal, 2_000) > 5.0);
}

#[test]
fn correlated_increments_follow_the_block_covariance() {
    let block = Matrix::from_rows(&[vec![2.0, 0.6], vec![0.6, 1.0]]).unwrap();
    let unit = IncrementSpec::new(IncrementFamily::Normal, 1.0);
    let mut r = rng(9);
    let n = 100_000;
    let (mut s00, mut s01, mut s11) = (0.0, 0.0, 0.0);
    for _ in 0..n {
        let z = sample_increments(&unit, 1, 2, &mut r).unwrap();
        let u = &correlate(&z, &block).unwrap()[0];
        s00 += u[0] * u[0];
        s01 += u[0] * u[1];
        s11 += u[1] * u[1];
    }
    let n = n as f64;
    assert!((s00 / n - 2.0).abs() < 0.05);
    assert!((s01 / n - 0.6).abs() < 0.03);
    assert!((s11 / n - 1.0).abs() < 0.03);
    assert!(correlate(&[vec![1.0, 2.0]], &Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap()).is_err());
}

#[test]
fn martingale_correlation_spans_rounds() {
    // d = 1, T = 2: increments with correlation 0.5 across the two rounds.
    let cov = Matrix::from_rows(&[vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap();
    let spec = TraceSpec::new(
        1,
        2,
        TraceMode::Martingale {
            increments: IncrementSpec::new(IncrementFamily::Normal, 1.0),
            correlation: Some(cov),
        },
        31,
    );
    let generator = spec.generator().unwrap();
    let n = 60_000;
    let cross: f64 = (0..n)
        .map(|r| {
            let t = generator.generate(r).unwrap();
            t.increment(1)[0] * t.increment(2)[0]
        })
        .sum::<f64>()
        / n as f64;
    assert!((cross - 0.5).abs() < 0.03, "{cross}");
}

#[test]
fn generation_is_deterministic_and_replications_differ() {
    let spec = TraceSpec::new(
        4,
        25,
        TraceMode::ShiftSchedule {
            segments: IncrementFamily::LIGHT_TAILED
                .iter()
                .map(|f| IncrementSpec::new(f.clone(), 1.0))
                .collect(),
            correlation: None,
        },
        77,
    );
    let a = generate_trace(&spec, 5).unwrap();
    let b = generate_trace(&spec, 5).unwrap();
    assert_eq!(a.minimizers(), b.minimizers());
    assert_ne!(a.minimizers(), generate_trace(&spec, 6).unwrap().minimizers());
    let json = provenance_json(&a).unwrap();
    assert!(json.contains("\"replication\": 5") && json.contains("\"seed\": 77"));
}

#[test]
fn monte_carlo_ignores_worker_count() {
    let a = SpectralMatrix::diagonal(&[0.2, 1.0]).unwrap();
    let mc = MonteCarlo::new(
        &a,
        &[PolicySpec::Robd, PolicySpec::LaiGamma(1.0)],
        &gaussian(2, 30, 1.0, 3),
        Statistic::RegretVsLai,
    )
    .unwrap();
    let one = mc.samples(64, Some(1)).unwrap();
    assert_eq!(one, mc.samples(64, Some(3)).unwrap());
    assert_eq!(one, mc.samples(64, None).unwrap());
}

#[test]
fn adversarial_rounds_are_shared_by_replications() {
    let a = SpectralMatrix::diagonal(&[0.1, 1.0]).unwrap();
    let spec = TraceSpec::new(
        2,
        50,
        TraceMode::Mixed {
            base: IncrementSpec::new(IncrementFamily::Normal, 1.0),
            adversarial_pct: 30.0,
            adversary: AdversaryRule::alternating_ray(&a, 4.0, RayAxis::Max),
        },
        8,
    );
    let generator = spec.generator().unwrap();
    let rounds = generator.adversarial_rounds().to_vec();
    assert_eq!(rounds.len(), 15);
    let (r0, r1) = (generator.generate(0).unwrap(), generator.generate(1).unwrap());
    for (k, &t) in rounds.iter().enumerate() {
        let expect = if k % 2 == 0 { 4.0 } else { -4.0 };
        assert_eq!(r0.v(t), &[0.0, expect]);
        assert_eq!(r1.v(t), &[0.0, expect]);
    }
    assert_ne!(r0.minimizers(), r1.minimizers());

    let other = TraceSpec::new(2, 50, spec.mode.clone(), 9);
    assert_ne!(other.adversarial_rounds(), rounds);
}

#[test]
fn shift_segments_cover_the_horizon() {
    for horizon in [1, 4, 5, 7, 100] {
        let seg = segment_bounds(horizon);
        assert_eq!(seg.len(), 5);
        assert_eq!(seg[0].0, 0);
        assert_eq!(seg[4].1, horizon);
        assert!(seg.windows(2).all(|w| w[0].1 == w[1].0));
    }
}

#[test]
fn invalid_specs_are_rejected() {
    let bad = [
        IncrementSpec::new(IncrementFamily::Normal, -1.0),
        IncrementSpec::new(IncrementFamily::LomaxSym { alpha: 2.0 }, 1.0),
        IncrementSpec::new(IncrementFamily::LognormalSym { sigma_ln: 0.0 }, 1.0),
    ];
    for spec in bad {
        assert!(spec.validate().is_err());
        assert!(generate_trace(
            &TraceSpec::new(1, 3, TraceMode::Martingale { increments: spec, correlation: None }, 0),
            0
        )
        .is_err());
    }
    let short = TraceSpec::new(
        1,
        3,
        TraceMode::PureAdversarial {
            adversary: AdversaryRule::FixedPoints { points: vec![vec![1.0]] },
        },
        0,
    );
    assert!(generate_trace(&short, 0).is_err());
}
