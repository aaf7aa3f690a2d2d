//! Real-coefficient polynomials `T(x) = R(x) + i I(x)`: correlation identities,
//! the minima near the non-stationary points `0` and `π`, and the pipeline
//! with those zones removed from the point process.

use std::f64::consts::PI;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremal::golden_section_min;
use crate::pipeline::{run_trials, TrialBatch, TrialSetup};
use crate::poly::{kernel, wrap_angle, TrigPolynomial};

/// Default zone exponent: zones are `|x| ≤ n^{-1+ε}` and `|x - π| ≤ n^{-1+ε}`.
pub const DEFAULT_EPS_ZONE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealCaseConfig {
    pub n: usize,
    pub eps_zone: f64,
}

impl RealCaseConfig {
    pub fn new(n: usize, eps_zone: f64) -> Result<Self> {
        if !(eps_zone > 0.0 && eps_zone < 1.0) {
            return Err(Error::Parameter(format!("eps_zone must be in (0,1), got {eps_zone}")));
        }
        if n < 1 {
            return Err(Error::Parameter("degree must be >= 1".into()));
        }
        Ok(Self { n, eps_zone })
    }

    pub fn zone_radius(&self) -> f64 {
        zone_radius(self.n, self.eps_zone)
    }
}

/// `n^{-1+ε}`.
pub fn zone_radius(n: usize, eps_zone: f64) -> f64 {
    (n as f64).powf(eps_zone - 1.0)
}

/// Whether `x` lies outside both zones (boundary counts as outside).
pub fn outside_zones(x: f64, n: usize, eps_zone: f64) -> bool {
    let w = zone_radius(n, eps_zone);
    wrap_angle(x).abs() >= w && wrap_angle(x - PI).abs() >= w
}

/// `E[R(x)R(y)]`, `E[I(x)I(y)]` and `E[R(x)I(y)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealCorrelations {
    pub err: f64,
    pub eii: f64,
    pub eri: f64,
}

pub fn real_correlations(n: usize, x: f64, y: f64) -> RealCorrelations {
    let minus = kernel(n, x - y).r;
    let plus = kernel(n, x + y).r;
    RealCorrelations { err: (minus + plus) / 2.0, eii: (minus - plus) / 2.0, eri: 0.0 }
}

/// Minima of `|T|` over the two zones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZoneMin {
    /// `min |T|` over `|x| ≤ n^{-1+ε}`.
    pub zero: f64,
    pub zero_at: f64,
    /// `min |T|` over `|x - π| ≤ n^{-1+ε}`.
    pub pi: f64,
    pub pi_at: f64,
}

impl ZoneMin {
    pub fn min(&self) -> f64 {
        self.zero.min(self.pi)
    }
}

/// Grid size `max(1024, 64 n^ε)` per zone.
pub fn zone_grid_points(n: usize, eps_zone: f64) -> usize {
    ((64.0 * (n as f64).powf(eps_zone)).ceil() as usize).max(1024)
}

/// Scan both zones on a uniform grid and polish the best grid point.
pub fn exclusion_zone_min(t: &TrigPolynomial, eps_zone: f64) -> ZoneMin {
    let n = t.degree();
    let w = zone_radius(n, eps_zone);
    let k = zone_grid_points(n, eps_zone);
    let (zero_at, zero) = scan_zone(t, 0.0, w, k);
    let (pi_at, pi) = scan_zone(t, PI, w, k);
    ZoneMin { zero, zero_at, pi, pi_at }
}

fn scan_zone(t: &TrigPolynomial, centre: f64, w: f64, points: usize) -> (f64, f64) {
    let h = 2.0 * w / points as f64;
    let modulus = |x: f64| t.evaluate_value(x).norm();
    let (mut best_x, mut best) = (centre, f64::INFINITY);
    for i in 0..=points {
        let x = centre - w + h * i as f64;
        let v = modulus(x);
        if v < best {
            best = v;
            best_x = x;
        }
    }
    let lo = (best_x - h).max(centre - w);
    let hi = (best_x + h).min(centre + w);
    let (x, v) = golden_section_min(modulus, lo, hi, 1e-13);
    if v < best {
        (x, v)
    } else {
        (best_x, best)
    }
}

/// Run trials with both zones removed from the process. `m_n` is still taken
/// over the whole circle.
pub fn realcase_pipeline(
    cfg: &RealCaseConfig,
    setup: TrialSetup,
    seed: u64,
    trials: Range<u64>,
) -> Result<TrialBatch> {
    if cfg.n < 64 {
        return Err(Error::Parameter(format!("real-case runs need n >= 64, got {}", cfg.n)));
    }
    if setup.n != cfg.n {
        return Err(Error::Parameter("real-case config and trial setup disagree on n".into()));
    }
    run_trials(&setup.with_zone(cfg.eps_zone)?, seed, trials)
}

/// Fraction of trials whose zone minimum is at most `log n / n`.
pub fn zone_hit_fraction(batch: &TrialBatch) -> Option<f64> {
    let level = (batch.n as f64).ln() / batch.n as f64;
    let mins: Vec<f64> = batch.outcomes.iter().map(|o| o.zone.map(|z| z.min())).collect::<Option<_>>()?;
    if mins.is_empty() {
        return None;
    }
    Some(mins.iter().filter(|&&m| m <= level).count() as f64 / mins.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{derive_trial_stream, sample_coefficients, CoefficientModel, RngSpec};
    use crate::neteval::build_net;
    use num_complex::Complex64;
    use rand::Rng;

    fn real_poly(n: usize, seed: u64, trial: u64) -> TrigPolynomial {
        let mut rng = derive_trial_stream(RngSpec::new(seed, trial));
        TrigPolynomial::new(n, sample_coefficients(&CoefficientModel::RealGaussian, n, &mut rng).unwrap()).unwrap()
    }

    #[test]
    fn correlations_at_origin() {
        let c = real_correlations(256, 0.0, 0.0);
        assert!((c.err - 1.0).abs() < 1e-14);
        assert!(c.eii.abs() < 1e-14);
        assert_eq!(c.eri, 0.0);
    }

    #[test]
    fn correlations_in_stationary_range() {
        // |r(2x)| ≤ 1/(2n|x|) needs n|x| ≳ 12 for a 0.02 tolerance, hence ε = 1/2.
        let n = 256;
        let w = zone_radius(n, 0.5);
        for k in 0..=50 {
            let x = w + (PI - 2.0 * w) * k as f64 / 50.0;
            let c = real_correlations(n, x, x);
            assert!((c.err - 0.5).abs() <= 0.02 && (c.eii - 0.5).abs() <= 0.02, "x={x} {c:?}");
        }
    }

    #[test]
    fn correlations_match_monte_carlo() {
        let n = 64;
        let m = 100_000;
        let mut pick = derive_trial_stream(RngSpec::new(99, 0));
        let pairs: Vec<(f64, f64)> = (0..4).map(|_| (pick.random_range(-PI..PI), pick.random_range(-PI..PI))).collect();
        let mut sums = vec![[0.0f64; 3]; pairs.len()];
        for trial in 0..m {
            let t = real_poly(n, 17, trial);
            for (s, &(x, y)) in sums.iter_mut().zip(&pairs) {
                let (tx, ty) = (t.evaluate(x, 0), t.evaluate(y, 0));
                s[0] += tx.re * ty.re;
                s[1] += tx.im * ty.im;
                s[2] += tx.re * ty.im;
            }
        }
        let tol = 4.0 / (m as f64).sqrt();
        for (s, &(x, y)) in sums.iter().zip(&pairs) {
            let c = real_correlations(n, x, y);
            let mf = m as f64;
            assert!((s[0] / mf - c.err).abs() <= tol);
            assert!((s[1] / mf - c.eii).abs() <= tol);
            assert!((s[2] / mf - c.eri).abs() <= tol);
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let t = real_poly(128, 4, 0);
        for k in 0..20 {
            let x = 0.3 * k as f64 - 3.0;
            assert!((t.evaluate(-x, 0) - t.evaluate(x, 0).conj()).norm() < 1e-12);
        }
        // The sine part vanishes at 0.
        assert!(t.evaluate(0.0, 0).im.abs() < 1e-14);
    }

    #[test]
    fn zone_min_is_bounded_by_origin_value() {
        for trial in 0..10 {
            let t = real_poly(256, 6, trial);
            let z = exclusion_zone_min(&t, 0.1);
            // The grid point at pi is only pi up to rounding.
            let (a, b) = (t.evaluate(0.0, 0).norm(), t.evaluate(PI, 0).norm());
            assert!(z.zero <= a * (1.0 + 1e-12));
            assert!(z.pi <= b * (1.0 + 1e-12));
        }
    }

    #[test]
    fn dirichlet_shape_matches_dense_scan() {
        // All-ones coefficients: T = sqrt(2n+1) r_n(x), decreasing away from 0.
        let n = 64;
        let t = TrigPolynomial::new(n, vec![Complex64::new(1.0, 0.0); 2 * n + 1]).unwrap();
        let eps = 0.1;
        let w = zone_radius(n, eps);
        let z = exclusion_zone_min(&t, eps);
        let dense = (0..=200_000)
            .map(|i| t.evaluate(-w + 2.0 * w * i as f64 / 200_000.0, 0).norm())
            .fold(f64::INFINITY, f64::min);
        assert!((z.zero - dense).abs() < 1e-9);
        assert!((z.zero_at.abs() - w).abs() < 1e-9, "minimum at the zone boundary");
    }

    #[test]
    fn zone_membership() {
        let n = 256;
        let eps = 0.3;
        let w = zone_radius(n, eps);
        assert!(!outside_zones(0.0, n, eps));
        assert!(!outside_zones(w * 0.999, n, eps));
        assert!(outside_zones(w * 1.001, n, eps));
        assert!(!outside_zones(PI - w * 0.5, n, eps));
        assert!(!outside_zones(-PI + w * 0.5, n, eps));
        let net = build_net(n, 0.01, true).unwrap();
        let removed = (0..net.len()).filter(|&i| !outside_zones(net.x(i), n, eps)).count();
        let expected = (0..net.len())
            .filter(|&i| {
                let x = net.x(i);
                x.abs() < w || (x - PI).abs() < w || (x + PI).abs() < w
            })
            .count();
        assert_eq!(removed, expected);
    }

    #[test]
    fn complex_input_reduces_to_complex_pipeline() {
        let n = 64;
        let base = TrialSetup::with_defaults(CoefficientModel::ComplexGaussian, n).unwrap();
        let cfg = RealCaseConfig::new(n, 0.2).unwrap();
        let real = realcase_pipeline(&cfg, base, 3, 0..20).unwrap();
        let plain = run_trials(&base, 3, 0..20).unwrap();
        for (r, p) in real.outcomes.iter().zip(&plain.outcomes) {
            assert_eq!(r.min, p.min);
            let kept: Vec<_> = p.process.points.iter().filter(|q| outside_zones(q.x_alpha, n, 0.2)).collect();
            assert_eq!(r.process.points.iter().collect::<Vec<_>>(), kept);
        }
    }

    #[test]
    fn pipeline_preconditions() {
        let base = TrialSetup::with_defaults(CoefficientModel::RealGaussian, 32).unwrap();
        assert!(realcase_pipeline(&RealCaseConfig::new(32, 0.1).unwrap(), base, 0, 0..1).is_err());
        assert!(RealCaseConfig::new(64, 1.0).is_err());
    }
}
