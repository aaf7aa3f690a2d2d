use num_complex::Complex64;
use proptest::prelude::*;

use trigmin::config::RunConfig;
use trigmin::coeffs::{CoefficientModel, CramerBase};
use trigmin::extremal::{linear_min, NearMinimaProcess, ProcessPoint};
use trigmin::perturb::perturb_weights;
use trigmin::poly::kernel;
use trigmin::stats::{intensity_estimate, ks_exponential, Interval};

fn complex() -> impl Strategy<Value = Complex64> {
    (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn process(values: Vec<f64>) -> NearMinimaProcess {
    NearMinimaProcess {
        points: values
            .into_iter()
            .enumerate()
            .map(|(k, value)| ProcessPoint { alpha: k as i64, x_alpha: 0.0, position: 0.0, value })
            .collect(),
        degenerate: 0,
    }
}

proptest! {
    #[test]
    fn linear_min_attains_the_line_minimum(a in complex(), b in complex(), s in -5.0..5.0f64) {
        prop_assume!(b.norm() > 1e-3);
        let lm = linear_min(a, b).unwrap();
        let at = (a + b * lm.t).norm();
        prop_assert!((at - lm.z.abs()).abs() <= 1e-12 * (1.0 + a.norm()));
        prop_assert!(at <= (a + b * s).norm() + 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn linear_min_positive_scaling(a in complex(), b in complex(), c in 1e-3..1e3f64) {
        prop_assume!(b.norm() > 1e-3);
        let base = linear_min(a, b).unwrap();
        let scaled = linear_min(a * c, b * c).unwrap();
        prop_assert!((scaled.t - base.t).abs() <= 1e-9 * (1.0 + base.t.abs()));
        prop_assert!((scaled.z - c * base.z).abs() <= 1e-9 * c * (1.0 + base.z.abs()));
    }

    #[test]
    fn linear_min_unimodular_rotation(a in complex(), b in complex(), theta in -3.2..3.2f64) {
        prop_assume!(b.norm() > 1e-3);
        let u = Complex64::cis(theta);
        let base = linear_min(a, b).unwrap();
        let turned = linear_min(a * u, b * u).unwrap();
        prop_assert!((turned.t - base.t).abs() <= 1e-9 * (1.0 + base.t.abs()));
        prop_assert!((turned.z.abs() - base.z.abs()).abs() <= 1e-9 * (1.0 + base.z.abs()));
    }

    #[test]
    fn kernel_symmetries(n in 1usize..600, x in -3.14..3.14f64) {
        let p = kernel(n, x);
        let m = kernel(n, -x);
        prop_assert!((p.r - m.r).abs() <= 1e-12);
        prop_assert!((p.r1_scaled() + m.r1_scaled()).abs() <= 1e-12);
        prop_assert!((p.neg_r2_scaled() - m.neg_r2_scaled()).abs() <= 1e-12);
        prop_assert!(p.r.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn config_round_trip(
        n in 1usize..5000,
        trials in 1u64..1_000_000,
        seed in any::<u64>(),
        eps_net in 0.001..0.999f64,
        eps_event in 0.01..1.99f64,
        c0 in 0.1..100.0f64,
        k in 0.1..10.0f64,
        delta in 0.001..0.999f64,
        kind in 0usize..3,
        pow2 in any::<bool>(),
        ks_max in proptest::option::of(0.0..1.0f64),
    ) {
        let model = match kind {
            0 => CoefficientModel::ComplexGaussian,
            1 => CoefficientModel::RealGaussian,
            _ => CoefficientModel::CramerPerturbed { delta, base: CramerBase::Laplace },
        };
        let mut c = RunConfig {
            model, n, trials, seed, eps_net, eps_event, c0, window_k: k, round_to_pow2: pow2,
            ..RunConfig::default()
        };
        if let Some(v) = ks_max {
            c.set("max.ks", &v.to_string()).unwrap();
        }
        prop_assert_eq!(RunConfig::parse(&c.serialize()).unwrap(), c);
    }

    #[test]
    fn counts_are_monotone_and_additive(
        values in proptest::collection::vec(proptest::collection::vec(-6.0..6.0f64, 0..12), 1..30),
        a in -5.0..0.0f64,
        mid in 0.0..1.0f64,
        b in 0.01..5.0f64,
    ) {
        let ps: Vec<_> = values.into_iter().map(process).collect();
        let inner = intensity_estimate(&ps, a / 2.0, b / 2.0).unwrap();
        let outer = intensity_estimate(&ps, a, b).unwrap();
        prop_assert!(inner <= outer);
        let cut = a + (b - a) * mid;
        let count = |i: Interval| ps.iter().map(|p| i.count(p)).sum::<usize>();
        prop_assert_eq!(
            count(Interval::closed_open(a, cut)) + count(Interval::closed(cut, b)),
            count(Interval::closed(a, b))
        );
    }

    #[test]
    fn ks_statistic_in_unit_interval(samples in proptest::collection::vec(0.0..20.0f64, 1..200), lambda in 0.1..10.0f64) {
        let d = ks_exponential(&samples, lambda).unwrap().statistic;
        prop_assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn perturbation_weights_are_unit(n in 2usize..1_000_000) {
        let (a, b) = perturb_weights(n);
        prop_assert!((a * a + b * b - 1.0).abs() <= 4.0 * f64::EPSILON);
    }
}
