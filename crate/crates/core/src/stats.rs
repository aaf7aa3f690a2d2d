//! Statistical checks on Monte Carlo output: survival curves against the
//! exponential law, Kolmogorov–Smirnov statistics, intensity estimates,
//! Poisson diagnostics and candidate separation.
//!
//! Reductions run in trial order and accumulate counts as integers, so results
//! do not depend on how trials were scheduled.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::extremal::NearMinimaProcess;

/// Limiting intensity `sqrt(π/3)` of the near-minima process.
pub fn limit_intensity() -> f64 {
    (PI / 3.0).sqrt()
}

/// Exponential rate `λ = 2 sqrt(π/3)` of the scaled minimum `n m_n`.
pub fn limit_rate() -> f64 {
    2.0 * limit_intensity()
}

/// Asymptotic 95% critical value `1.358/sqrt(M)` of the one-sample KS statistic.
pub fn ks_critical_95(samples: usize) -> f64 {
    1.358 / (samples as f64).sqrt()
}

/// Asymptotic 95% critical value of the two-sample KS statistic.
pub fn ks_two_sample_critical_95(m: usize, k: usize) -> f64 {
    1.358 * ((m + k) as f64 / (m as f64 * k as f64)).sqrt()
}

/// A real interval with explicit endpoint inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: true, hi_closed: true }
    }

    /// `[lo, hi)`.
    pub fn closed_open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: true, hi_closed: false }
    }

    /// `(lo, hi]`.
    pub fn open_closed(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: false, hi_closed: true }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_disjoint(&self, other: &Interval) -> bool {
        let touch_ok = |a: &Interval, b: &Interval| {
            // a lies left of b
            a.hi < b.lo || (a.hi == b.lo && !(a.hi_closed && b.lo_closed))
        };
        touch_ok(self, other) || touch_ok(other, self)
    }

    pub fn count(&self, process: &NearMinimaProcess) -> usize {
        process.values().filter(|&x| self.contains(x)).count()
    }
}

/// Empirical `P(n m_n ≥ τ)` against `exp(-λτ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub taus: Vec<f64>,
    pub empirical: Vec<f64>,
    pub reference: Vec<f64>,
    pub trials: usize,
}

impl SurvivalCurve {
    pub fn max_gap(&self) -> f64 {
        self.empirical
            .iter()
            .zip(&self.reference)
            .map(|(e, r)| (e - r).abs())
            .fold(0.0, f64::max)
    }
}

/// `τ ∈ {0.05k : k = 0..=100}`.
pub fn default_tau_grid() -> Vec<f64> {
    (0..=100).map(|k| 0.05 * k as f64).collect()
}

pub fn empirical_survival(samples: &[f64], taus: &[f64]) -> Result<SurvivalCurve> {
    empirical_survival_with_rate(samples, taus, limit_rate())
}

pub fn empirical_survival_with_rate(
    samples: &[f64],
    taus: &[f64],
    lambda: f64,
) -> Result<SurvivalCurve> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("survival curve needs samples".into()));
    }
    if taus.windows(2).any(|w| w[0] >= w[1]) || taus.iter().any(|&t| !(t >= 0.0)) {
        return Err(Error::Parameter("tau grid must be increasing and non-negative".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    let empirical = taus
        .iter()
        .map(|&t| {
            let below = sorted.partition_point(|&s| s < t);
            (m - below) as f64 / m as f64
        })
        .collect();
    let reference = taus.iter().map(|&t| (-lambda * t).exp()).collect();
    Ok(SurvivalCurve { taus: taus.to_vec(), empirical, reference, trials: m })
}

/// One-sample Kolmogorov–Smirnov result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub samples: usize,
    pub critical_95: f64,
}

impl KsResult {
    pub fn passes_95(&self) -> bool {
        self.statistic <= self.critical_95
    }
}

/// `sup_t |F̂(t) - F(t)|` evaluated on both sides of every jump.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<KsResult> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("KS statistic needs samples".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / m - f).max(f - i as f64 / m)
        })
        .fold(0.0, f64::max);
    Ok(KsResult { statistic, samples: sorted.len(), critical_95: ks_critical_95(sorted.len()) })
}

/// KS statistic of `samples` against `Exp(lambda)`.
pub fn ks_exponential(samples: &[f64], lambda: f64) -> Result<KsResult> {
    if !(lambda > 0.0) {
        return Err(Error::Parameter(format!("rate must be positive, got {lambda}")));
    }
    if let Some(bad) = samples.iter().find(|&&s| !(s >= 0.0)) {
        return Err(Error::Parameter(format!("exponential samples must be >= 0, got {bad}")));
    }
    ks_one_sample(samples, |x| 1.0 - (-lambda * x).exp())
}

/// KS statistic of `samples` against `N(mean, variance)`.
pub fn ks_normal(samples: &[f64], mean: f64, variance: f64) -> Result<KsResult> {
    let normal = Normal::new(mean, variance.sqrt())
        .map_err(|e| Error::Parameter(format!("normal law: {e}")))?;
    ks_one_sample(samples, |x| normal.cdf(x))
}

/// Two-sample KS statistic `sup_t |F̂_a(t) - F̂_b(t)|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData("two-sample KS needs two non-empty samples".into()));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (ma, mb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / ma - j as f64 / mb).abs());
    }
    Ok(d)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let mu = mean(xs);
    xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Average number of process points in `[a, b]` per trial.
pub fn intensity_estimate<'a, I>(processes: I, a: f64, b: f64) -> Result<f64>
where
    I: IntoIterator<Item = &'a NearMinimaProcess>,
{
    if !(a < b) {
        return Err(Error::Parameter(format!("need a < b, got [{a}, {b}]")));
    }
    let window = Interval::closed(a, b);
    let (total, trials) = processes
        .into_iter()
        .fold((0u64, 0u64), |(t, m), p| (t + window.count(p) as u64, m + 1));
    if trials == 0 {
        return Ok(0.0);
    }
    Ok(total as f64 / trials as f64)
}

/// Poisson diagnostics of the counts on one interval, and of the joint counts on two.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonDiagnostics {
    pub interval: Interval,
    pub other: Interval,
    pub trials: usize,
    pub mean_count: f64,
    pub var_count: f64,
    /// `var/mean`; 1 for a Poisson count.
    pub dispersion: f64,
    /// Fraction of trials with no point in `interval`.
    pub void_prob: f64,
    /// Sample covariance of the counts on `interval` and `other`.
    pub covariance: f64,
    /// Standard error of `covariance`.
    pub covariance_se: f64,
}

pub fn poisson_diagnostics<'a, I>(
    processes: I,
    interval: Interval,
    other: Interval,
) -> Result<PoissonDiagnostics>
where
    I: IntoIterator<Item = &'a NearMinimaProcess>,
{
    if !interval.is_disjoint(&other) {
        return Err(Error::Parameter("Poisson diagnostic intervals must be disjoint".into()));
    }
    let counts: Vec<(i64, i64)> = processes
        .into_iter()
        .map(|p| (interval.count(p) as i64, other.count(p) as i64))
        .collect();
    let m = counts.len();
    if m < 2 {
        return Err(Error::InsufficientData(format!("Poisson diagnostics need >= 2 trials, got {m}")));
    }
    let mf = m as f64;
    let (s1, s2, s11, s12, voids) = counts.iter().fold(
        (0i64, 0i64, 0i64, 0i64, 0usize),
        |(s1, s2, s11, s12, v), &(c1, c2)| {
            (s1 + c1, s2 + c2, s11 + c1 * c1, s12 + c1 * c2, v + usize::from(c1 == 0))
        },
    );
    let mean1 = s1 as f64 / mf;
    let mean2 = s2 as f64 / mf;
    let var1 = (s11 as f64 - mf * mean1 * mean1) / (mf - 1.0);
    let cov = (s12 as f64 - mf * mean1 * mean2) / (mf - 1.0);
    let prod_var = counts
        .iter()
        .map(|&(c1, c2)| ((c1 as f64 - mean1) * (c2 as f64 - mean2) - cov).powi(2))
        .sum::<f64>()
        / (mf - 1.0);
    Ok(PoissonDiagnostics {
        interval,
        other,
        trials: m,
        mean_count: mean1,
        var_count: var1.max(0.0),
        dispersion: if mean1 > 0.0 { var1 / mean1 } else { f64::NAN },
        void_prob: voids as f64 / mf,
        covariance: cov,
        covariance_se: (prod_var / mf).sqrt(),
    })
}

/// Circular distance on `ℝ/2πℤ`.
pub fn circular_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Whether two distinct points of the process sit within `dist` of each other on the circle.
pub fn has_close_pair(process: &NearMinimaProcess, dist: f64) -> bool {
    let mut xs: Vec<f64> = process.points.iter().map(|p| p.x_alpha.rem_euclid(2.0 * PI)).collect();
    if xs.len() < 2 {
        return false;
    }
    xs.sort_by(f64::total_cmp);
    let wrap = xs[0] + 2.0 * PI - xs[xs.len() - 1];
    wrap <= dist || xs.windows(2).any(|w| w[1] - w[0] <= dist)
}

/// Fraction of trials with two distinct candidates within `n^{-eps}`.
pub fn separation_statistic<'a, I>(processes: I, n: usize, eps: f64) -> f64
where
    I: IntoIterator<Item = &'a NearMinimaProcess>,
{
    let dist = (n as f64).powf(-eps);
    let (hits, trials) = processes
        .into_iter()
        .fold((0u64, 0u64), |(h, t), p| (h + u64::from(has_close_pair(p, dist)), t + 1));
    if trials == 0 {
        0.0
    } else {
        hits as f64 / trials as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{derive_trial_stream, RngSpec};
    use crate::extremal::ProcessPoint;
    use rand::Rng;
    use rand_distr::{Distribution, Exp, Poisson};

    fn process_from(values: &[f64]) -> NearMinimaProcess {
        NearMinimaProcess {
            points: values
                .iter()
                .enumerate()
                .map(|(k, &v)| ProcessPoint {
                    alpha: k as i64 * 1000,
                    x_alpha: k as f64,
                    position: k as f64,
                    value: v,
                })
                .collect(),
            degenerate: 0,
        }
    }

    fn exp_samples(m: usize, lambda: f64, seed: u64) -> Vec<f64> {
        let mut rng = derive_trial_stream(RngSpec::new(seed, 0));
        let exp = Exp::new(lambda).unwrap();
        (0..m).map(|_| exp.sample(&mut rng)).collect()
    }

    #[test]
    fn survival_step_function() {
        let c = empirical_survival(&[5.0; 4], &[1.0, 10.0]).unwrap();
        assert_eq!(c.empirical, vec![1.0, 0.0]);
        let c = empirical_survival(&[0.3, 2.0], &[0.0]).unwrap();
        assert_eq!((c.empirical[0], c.reference[0]), (1.0, 1.0));
        assert!(empirical_survival(&[], &[0.0]).is_err());
        assert!(empirical_survival(&[1.0], &[1.0, 0.5]).is_err());
    }

    #[test]
    fn survival_of_exact_draws_is_close() {
        let s = exp_samples(10_000, limit_rate(), 3);
        let c = empirical_survival(&s, &default_tau_grid()).unwrap();
        assert!(c.max_gap() <= 0.0136);
        assert!(c.empirical.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn ks_degenerate_cases() {
        let lambda = limit_rate();
        assert_eq!(ks_exponential(&[0.0; 10], lambda).unwrap().statistic, 1.0);
        let median = 2f64.ln() / lambda;
        assert!((ks_exponential(&[median], lambda).unwrap().statistic - 0.5).abs() < 1e-15);
        assert!(ks_exponential(&[], lambda).is_err());
        assert!(ks_exponential(&[-0.1], lambda).is_err());
        assert!(ks_exponential(&[0.1], 0.0).is_err());
    }

    #[test]
    fn ks_null_level() {
        // Under the null, P(D ≤ 1.358/√M) → 0.95.
        let m = 20_000;
        let reps = 100;
        let lambda = limit_rate();
        let passes = (0..reps)
            .filter(|&r| ks_exponential(&exp_samples(m, lambda, 100 + r), lambda).unwrap().statistic <= 0.0136)
            .count();
        assert!(passes >= 93, "{passes}/100");
    }

    #[test]
    fn survival_and_ks_agree_on_jumps() {
        let lambda = limit_rate();
        let mut s = exp_samples(2_000, lambda, 8);
        s.sort_by(f64::total_cmp);
        let ks = ks_exponential(&s, lambda).unwrap();
        // Survival at a jump is 1 - F̂(s-); just past it, 1 - F̂(s).
        let left = empirical_survival_with_rate(&s, &s, lambda).unwrap();
        let right_taus: Vec<f64> = s.iter().map(|x| x.next_up()).collect();
        let right = empirical_survival_with_rate(&s, &right_taus, lambda).unwrap();
        let gap = s
            .iter()
            .enumerate()
            .map(|(k, &x)| {
                let f = (-lambda * x).exp();
                (left.empirical[k] - f).abs().max((right.empirical[k] - f).abs())
            })
            .fold(0.0, f64::max);
        assert!((gap - ks.statistic).abs() < 1e-12);
    }

    #[test]
    fn two_sample_ks() {
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(ks_two_sample(&[0.0], &[1.0]).unwrap(), 1.0);
        assert!((ks_two_sample(&[0.0, 2.0], &[1.0, 3.0]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ks_against_normal() {
        let r = ks_normal(&[0.0; 5], 0.0, 0.5).unwrap();
        assert!((r.statistic - 0.5).abs() < 1e-12);
    }

    #[test]
    fn intensity_cases() {
        let empty = vec![NearMinimaProcess::default(); 5];
        assert_eq!(intensity_estimate(&empty, -1.0, 1.0).unwrap(), 0.0);
        assert!(intensity_estimate(&empty, 1.0, 1.0).is_err());
        let ps = vec![process_from(&[-1.5, 0.2, 3.0]), process_from(&[0.5])];
        let inner = intensity_estimate(&ps, -1.0, 1.0).unwrap();
        let outer = intensity_estimate(&ps, -2.0, 2.0).unwrap();
        assert_eq!(inner, 1.0);
        assert_eq!(outer, 1.5);
        let split = intensity_estimate(&ps, -2.0, 0.1).unwrap() + intensity_estimate(&ps, 0.1, 2.0).unwrap();
        assert_eq!(split, outer);
    }

    #[test]
    fn poisson_simulator_has_unit_dispersion() {
        let mut rng = derive_trial_stream(RngSpec::new(21, 0));
        let rate = limit_intensity();
        let count_law = Poisson::new(rate * 4.0).unwrap();
        let ps: Vec<NearMinimaProcess> = (0..20_000)
            .map(|_| {
                let k: f64 = count_law.sample(&mut rng);
                let vals: Vec<f64> = (0..k as usize).map(|_| rng.random_range(-2.0..2.0)).collect();
                process_from(&vals)
            })
            .collect();
        let d = poisson_diagnostics(&ps, Interval::closed(-1.0, 1.0), Interval::open_closed(1.0, 2.0)).unwrap();
        assert!((0.95..=1.05).contains(&d.dispersion), "{}", d.dispersion);
        let expect_void = (-2.0 * rate).exp();
        assert!((d.void_prob - expect_void).abs() < 0.005);
        let pair = poisson_diagnostics(&ps, Interval::closed_open(-2.0, 0.0), Interval::open_closed(0.0, 2.0)).unwrap();
        assert!(pair.covariance.abs() <= 3.0 * pair.covariance_se);
    }

    #[test]
    fn poisson_diagnostics_errors() {
        let ps = vec![process_from(&[0.1])];
        assert!(poisson_diagnostics(&ps, Interval::closed(-1.0, 1.0), Interval::closed(1.0, 2.0)).is_err());
        assert!(matches!(
            poisson_diagnostics(&ps, Interval::closed(-1.0, 0.0), Interval::open_closed(0.0, 1.0)),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn statistics_are_permutation_invariant() {
        let mut ps: Vec<NearMinimaProcess> =
            (0..50).map(|k| process_from(&[k as f64 / 25.0 - 1.0, (k % 7) as f64 / 3.0])).collect();
        let a = poisson_diagnostics(&ps, Interval::closed(-1.0, 1.0), Interval::open_closed(1.0, 3.0)).unwrap();
        let ia = intensity_estimate(&ps, -1.0, 1.0).unwrap();
        ps.reverse();
        ps.swap(3, 17);
        let b = poisson_diagnostics(&ps, Interval::closed(-1.0, 1.0), Interval::open_closed(1.0, 3.0)).unwrap();
        assert_eq!(ia, intensity_estimate(&ps, -1.0, 1.0).unwrap());
        assert_eq!((a.mean_count, a.var_count, a.void_prob, a.covariance), (b.mean_count, b.var_count, b.void_prob, b.covariance));
    }

    #[test]
    fn separation_cases() {
        let n = 256;
        let d = (n as f64).powf(-0.5);
        let single = vec![process_from(&[0.3]), NearMinimaProcess::default()];
        assert_eq!(separation_statistic(&single, n, 0.5), 0.0);
        let mut close = process_from(&[0.1, 0.2]);
        close.points[1].x_alpha = close.points[0].x_alpha + d / 2.0;
        let ps = vec![close, process_from(&[0.1, 0.2])];
        assert_eq!(separation_statistic(&ps, n, 0.5), 0.5);
        // Wrap-around neighbours count too.
        let mut wrap = process_from(&[0.1, 0.2]);
        wrap.points[0].x_alpha = -PI + 0.001;
        wrap.points[1].x_alpha = PI - 0.001;
        assert!(has_close_pair(&wrap, d));
    }
}
