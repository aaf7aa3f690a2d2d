//! Resampling experiment: `P̂ = sqrt(1 - 1/n²) P + Q/n` has the law of `P`, and
//! each near-minimum of `P` moves by an approximately `N(0, 1/2)` shift.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::coeffs::{derive_trial_stream, sample_coefficients, RngSpec};
use crate::error::{Error, Result};
use crate::extremal::NearMinimaProcess;
use crate::pipeline::{par_trials, TrialSetup, Workspace};
use crate::poly::TrigPolynomial;
use crate::stats::{ks_normal, ks_two_sample, mean, variance};

/// Default window `K` for `|X| ≤ K`.
pub const DEFAULT_WINDOW_K: f64 = 3.0;

/// `sqrt(1 - 1/n²) P + Q/n`, coefficientwise.
pub fn perturb_polynomial(p: &TrigPolynomial, q: &TrigPolynomial) -> Result<TrigPolynomial> {
    let n = p.degree();
    if q.degree() != n {
        return Err(Error::Parameter(format!("degree mismatch: {n} vs {}", q.degree())));
    }
    if n < 2 {
        return Err(Error::Parameter("perturbation needs n >= 2 (n = 1 discards P)".into()));
    }
    let (a, b) = perturb_weights(n);
    let coeffs = p.coeffs().iter().zip(q.coeffs()).map(|(&x, &y)| x * a + y * b).collect();
    TrigPolynomial::new(n, coeffs)
}

/// `(sqrt(1 - 1/n²), 1/n)`.
pub fn perturb_weights(n: usize) -> (f64, f64) {
    let inv = 1.0 / n as f64;
    ((1.0 - inv * inv).sqrt(), inv)
}

/// Which polynomial plays `P̂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PerturbControl {
    /// `sqrt(1 - 1/n²) P + Q/n`.
    Coupled,
    /// `P̂ := P`.
    Identity,
    /// `Q := 0`.
    ZeroQ,
}

/// The two processes of one trial, with the first-order shift predictor at each point of `P`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbTrial {
    pub trial: u64,
    pub n: usize,
    pub proc_p: NearMinimaProcess,
    pub proc_phat: NearMinimaProcess,
    /// `G_α = Im(Q(x_α) conj P'(x_α)) / |P'(x_α)|`, aligned with `proc_p.points`.
    pub predictors: Vec<f64>,
}

impl PerturbTrial {
    /// Build from explicit polynomials using the workspace's net.
    pub fn build(
        setup: &TrialSetup,
        ws: &mut Workspace,
        trial: u64,
        p: &TrigPolynomial,
        q: &TrigPolynomial,
        phat: &TrigPolynomial,
    ) -> Result<Self> {
        ws.evaluate(p)?;
        let proc_p = ws.extract(setup);
        let predictors = proc_p
            .points
            .iter()
            .map(|pt| {
                let b = ws.p1vals[setup.net.slot(pt.alpha)];
                (q.evaluate(pt.x_alpha, 0) * b.conj()).im / b.norm()
            })
            .collect();
        ws.evaluate(phat)?;
        let proc_phat = ws.extract(setup);
        Ok(Self { trial, n: setup.n, proc_p, proc_phat, predictors })
    }
}

/// Sample `P` then `Q` from the trial's stream and build the trial.
pub fn run_perturb_trial(
    setup: &TrialSetup,
    ws: &mut Workspace,
    seed: u64,
    trial: u64,
    control: PerturbControl,
) -> Result<PerturbTrial> {
    let n = setup.n;
    let mut rng = derive_trial_stream(RngSpec::new(seed, trial));
    let p = TrigPolynomial::new(n, sample_coefficients(&setup.model, n, &mut rng)?)?;
    let q = match control {
        PerturbControl::ZeroQ => TrigPolynomial::new(n, vec![Default::default(); 2 * n + 1])?,
        _ => TrigPolynomial::new(n, sample_coefficients(&setup.model, n, &mut rng)?)?,
    };
    let phat = match control {
        PerturbControl::Identity => p.clone(),
        _ => perturb_polynomial(&p, &q)?,
    };
    PerturbTrial::build(setup, ws, trial, &p, &q, &phat)
}

pub fn run_perturb_trials(
    setup: &TrialSetup,
    seed: u64,
    trials: Range<u64>,
    control: PerturbControl,
) -> Result<Vec<PerturbTrial>> {
    if setup.n < 2 {
        return Err(Error::Parameter("perturbation needs n >= 2".into()));
    }
    par_trials(trials, || Workspace::new(setup), |ws, t| run_perturb_trial(setup, ws, seed, t, control))
}

/// Radius `1/(4n)` within which a point of `P̂` is taken to be the displaced
/// copy of a point of `P`. The minimizer moves by `O(1/n²)`, while distinct
/// local minima sit `O(1/n)` apart.
pub fn match_radius(n: usize) -> f64 {
    0.25 / n as f64
}

/// For each point of `a`, the index of the nearest point of `b` by position,
/// if one lies within `radius`. Several points of `a` may share a partner:
/// adjacent intervals can both flag the same local minimum.
pub fn match_points(a: &NearMinimaProcess, b: &NearMinimaProcess, radius: f64) -> Vec<Option<usize>> {
    a.points
        .iter()
        .map(|p| {
            b.points
                .iter()
                .enumerate()
                .map(|(j, q)| (crate::stats::circular_distance(p.position, q.position), j))
                .filter(|&(d, _)| d <= radius)
                .min_by(|u, v| u.0.total_cmp(&v.0).then(u.1.cmp(&v.1)))
                .map(|(_, j)| j)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedShift {
    pub alpha: i64,
    pub alpha_hat: i64,
    pub x: f64,
    pub x_hat: f64,
    /// `X̂ - X`.
    pub shift: f64,
    pub predictor: f64,
    /// `shift - predictor`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftMatches {
    pub shifts: Vec<MatchedShift>,
    /// Points with `|X| ≤ K`.
    pub small: usize,
    /// Points with `|X| ≤ K` and no partner with `|X̂| ≤ 2K`.
    pub unmatched_small: usize,
}

/// Shifts of the points with `|X| ≤ K`.
pub fn match_and_shift(trial: &PerturbTrial, k: f64) -> ShiftMatches {
    let partner = match_points(&trial.proc_p, &trial.proc_phat, match_radius(trial.n));
    let mut out = ShiftMatches { shifts: Vec::new(), small: 0, unmatched_small: 0 };
    for (i, p) in trial.proc_p.points.iter().enumerate() {
        if p.value.abs() > k {
            continue;
        }
        out.small += 1;
        match partner[i].map(|j| &trial.proc_phat.points[j]) {
            Some(q) if q.value.abs() <= 2.0 * k => {
                let shift = q.value - p.value;
                let predictor = trial.predictors[i];
                out.shifts.push(MatchedShift {
                    alpha: p.alpha,
                    alpha_hat: q.alpha,
                    x: p.value,
                    x_hat: q.value,
                    shift,
                    predictor,
                    residual: shift - predictor,
                });
            }
            _ => out.unmatched_small += 1,
        }
    }
    out
}

/// Law invariance and shift statistics over many trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub trials: usize,
    pub window_k: f64,
    pub matched: usize,
    /// Two-sample KS between pooled `{X : |X| ≤ K}` and `{X̂ : |X̂| ≤ K}`.
    pub law_ks: f64,
    pub shift_mean: f64,
    pub shift_var: f64,
    /// KS of the shifts against `N(0, 1/2)`.
    pub shift_ks_gauss: f64,
    /// Fraction of trials with an unmatched point `|X| ≤ K`.
    pub unmatched_frac: f64,
    /// Fraction of points `|X| ≤ K` left unmatched.
    pub unmatched_point_frac: f64,
    /// `sqrt(n) max |shift - G|`.
    pub residual_max_scaled: f64,
}

pub fn invariance_report(trials: &[PerturbTrial], k: f64) -> Result<InvarianceReport> {
    if trials.len() < 100 {
        return Err(Error::InsufficientData(format!("need >= 100 trials, got {}", trials.len())));
    }
    let n = trials[0].n;
    let mut shifts = Vec::new();
    let mut residual_max: f64 = 0.0;
    let (mut small, mut unmatched, mut bad_trials) = (0usize, 0usize, 0usize);
    let mut xs = Vec::new();
    let mut xhats = Vec::new();
    for t in trials {
        let m = match_and_shift(t, k);
        small += m.small;
        unmatched += m.unmatched_small;
        bad_trials += usize::from(m.unmatched_small > 0);
        for s in &m.shifts {
            shifts.push(s.shift);
            residual_max = residual_max.max(s.residual.abs());
        }
        xs.extend(t.proc_p.values().filter(|v| v.abs() <= k));
        xhats.extend(t.proc_phat.values().filter(|v| v.abs() <= k));
    }
    if shifts.is_empty() {
        return Err(Error::InsufficientData("no matched points".into()));
    }
    Ok(InvarianceReport {
        trials: trials.len(),
        window_k: k,
        matched: shifts.len(),
        law_ks: ks_two_sample(&xs, &xhats)?,
        shift_mean: mean(&shifts),
        shift_var: if shifts.len() > 1 { variance(&shifts) } else { 0.0 },
        shift_ks_gauss: ks_normal(&shifts, 0.0, 0.5)?.statistic,
        unmatched_frac: bad_trials as f64 / trials.len() as f64,
        unmatched_point_frac: unmatched as f64 / small.max(1) as f64,
        residual_max_scaled: residual_max * (n as f64).sqrt(),
    })
}
