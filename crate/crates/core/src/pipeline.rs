//! Seeded Monte Carlo trials: sample, evaluate on the net, minimize, extract.
//!
//! Trials run as a parallel map whose results are collected in trial order, so
//! the output never depends on the number of worker threads.

use std::ops::Range;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffs::{derive_trial_stream, sample_coefficients, CoefficientModel, RngSpec};
use crate::error::{Error, Result};
use crate::extremal::{
    capture_check, extract_process_where, CaptureOutcome, EventThresholds, GlobalMinOptions,
    GlobalMinResult, GlobalMinimizer, NearMinimaProcess,
};
use crate::neteval::{build_net, Net, NetEvaluator};
use crate::poly::TrigPolynomial;
use crate::realcase::{exclusion_zone_min, outside_zones, ZoneMin};

/// Everything a trial needs apart from its index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSetup {
    pub model: CoefficientModel,
    pub n: usize,
    pub net: Net,
    pub thresholds: EventThresholds,
    pub k_seed: usize,
    /// Exclude `|x_α| < n^{-1+ε}` and `|x_α - π| < n^{-1+ε}` from the process
    /// and record the zone minima.
    pub eps_zone: Option<f64>,
}

impl TrialSetup {
    pub fn new(
        model: CoefficientModel,
        n: usize,
        eps_net: f64,
        round_to_pow2: bool,
        thresholds: EventThresholds,
        k_seed: usize,
    ) -> Result<Self> {
        model.validate()?;
        thresholds.validate()?;
        if k_seed == 0 {
            return Err(Error::Parameter("k_seed must be positive".into()));
        }
        let net = build_net(n, eps_net, round_to_pow2)?;
        Ok(Self { model, n, net, thresholds, k_seed, eps_zone: None })
    }

    /// Default thresholds, power-of-two net.
    pub fn with_defaults(model: CoefficientModel, n: usize) -> Result<Self> {
        Self::new(
            model,
            n,
            crate::neteval::DEFAULT_EPS_NET,
            true,
            EventThresholds::default_for(n)?,
            crate::extremal::DEFAULT_K_SEED,
        )
    }

    pub fn with_zone(mut self, eps_zone: f64) -> Result<Self> {
        if !(eps_zone > 0.0 && eps_zone < 1.0) {
            return Err(Error::Parameter(format!("eps_zone must be in (0,1), got {eps_zone}")));
        }
        self.eps_zone = Some(eps_zone);
        Ok(self)
    }

    pub fn sample(&self, seed: u64, trial: u64) -> Result<TrigPolynomial> {
        let mut rng = derive_trial_stream(RngSpec::new(seed, trial));
        TrigPolynomial::new(self.n, sample_coefficients(&self.model, self.n, &mut rng)?)
    }
}

/// Per-worker buffers and plans.
#[derive(Debug, Clone)]
pub struct Workspace {
    evaluator: NetEvaluator,
    minimizer: GlobalMinimizer,
    pub pvals: Vec<Complex64>,
    pub p1vals: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Workspace {
    pub fn new(setup: &TrialSetup) -> Self {
        let evaluator = NetEvaluator::new(setup.net);
        let scratch = evaluator.scratch();
        Self {
            evaluator,
            minimizer: GlobalMinimizer::new(setup.net, GlobalMinOptions { k_seed: setup.k_seed }),
            pvals: Vec::new(),
            p1vals: Vec::new(),
            scratch,
        }
    }

    /// Fill `pvals` and `p1vals` with `P` and `P'` on the net.
    pub fn evaluate(&mut self, p: &TrigPolynomial) -> Result<()> {
        self.evaluator.evaluate_into(p, 0, &mut self.pvals, &mut self.scratch)?;
        self.evaluator.evaluate_into(p, 1, &mut self.p1vals, &mut self.scratch)
    }

    pub fn global_min(&self, p: &TrigPolynomial) -> Result<GlobalMinResult> {
        self.minimizer.minimize(p, &self.pvals, &self.p1vals)
    }

    /// Extract the process from the current net values.
    pub fn extract(&self, setup: &TrialSetup) -> NearMinimaProcess {
        let (n, th) = (setup.n, &setup.thresholds);
        match setup.eps_zone {
            Some(e) => extract_process_where(&self.pvals, &self.p1vals, &setup.net, th, n, |x| {
                outside_zones(x, n, e)
            }),
            None => extract_process_where(&self.pvals, &self.p1vals, &setup.net, th, n, |_| true),
        }
    }
}

/// Result of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: u64,
    pub min: GlobalMinResult,
    pub process: NearMinimaProcess,
    pub capture: CaptureOutcome,
    pub zone: Option<ZoneMin>,
}

impl TrialOutcome {
    /// `n m_n`.
    pub fn scaled_min(&self, n: usize) -> f64 {
        n as f64 * self.min.m
    }
}

pub fn run_trial(setup: &TrialSetup, ws: &mut Workspace, seed: u64, trial: u64) -> Result<TrialOutcome> {
    let p = setup.sample(seed, trial)?;
    ws.evaluate(&p)?;
    let min = ws.global_min(&p)?;
    let process = ws.extract(setup);
    let capture = capture_check(&process, &min, &ws.pvals, &ws.p1vals, &setup.net, &setup.thresholds);
    let zone = setup.eps_zone.map(|e| exclusion_zone_min(&p, e));
    Ok(TrialOutcome { trial, min, process, capture, zone })
}

/// All trials of one run, in trial order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialBatch {
    pub seed: u64,
    pub n: usize,
    pub outcomes: Vec<TrialOutcome>,
}

impl TrialBatch {
    pub fn scaled_minima(&self) -> Vec<f64> {
        self.outcomes.iter().map(|o| o.scaled_min(self.n)).collect()
    }

    pub fn processes(&self) -> impl Iterator<Item = &NearMinimaProcess> + '_ {
        self.outcomes.iter().map(|o| &o.process)
    }

    pub fn capture_rate(&self) -> f64 {
        let hits = self.outcomes.iter().filter(|o| o.capture.is_captured()).count();
        hits as f64 / self.outcomes.len().max(1) as f64
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }
}

/// Ordered parallel map over trial indices with per-worker state.
pub fn par_trials<S, T, I, F>(trials: Range<u64>, init: I, f: F) -> Result<Vec<T>>
where
    S: Send,
    T: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, u64) -> Result<T> + Sync + Send,
{
    trials.into_par_iter().map_init(init, |s, t| f(s, t)).collect()
}

/// Run `par_trials` on a dedicated pool of `threads` workers (`None` = global pool).
pub fn with_threads<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

pub fn run_trials(setup: &TrialSetup, seed: u64, trials: Range<u64>) -> Result<TrialBatch> {
    let outcomes = par_trials(trials, || Workspace::new(setup), |ws, t| run_trial(setup, ws, seed, t))?;
    Ok(TrialBatch { seed, n: setup.n, outcomes })
}
