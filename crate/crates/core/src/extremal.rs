//! Linear-interpolation local minima, candidate events and the near-minima
//! point process, plus a certified global minimum of `|P|`.
//!
//! On each net interval `I_α = [x_α - π/N, x_α + π/N]` the polynomial is
//! replaced by its tangent line `F_α(x) = P(x_α) + (x - x_α) P'(x_α)`. The
//! closest approach of that line to the origin gives an offset `t` and a
//! signed distance `z`; `Z_α = n z` is the candidate value the interval
//! contributes when the candidate events hold.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neteval::{Net, NetEvaluator};
use crate::poly::{wrap_angle, TrigPolynomial};

/// Default exponent in `bmin = n^{1 - eps_event/2}`.
pub const DEFAULT_EPS_EVENT: f64 = 0.9;
/// Default constant in `bmax = C0 n sqrt(log n)`.
pub const DEFAULT_C0: f64 = 10.0;
/// Default number of refinement seeds for the global minimum.
pub const DEFAULT_K_SEED: usize = 16;

const MAX_REFINE_STEPS: usize = 100;
const NEWTON_TOL: f64 = 1e-12;

/// Closest approach of the line `{A + sB : s ∈ ℝ}` to the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearMin {
    /// Minimizing parameter `-Re(A conj B)/|B|²`.
    pub t: f64,
    /// Signed minimal modulus `Im(A conj B)/|B|`.
    pub z: f64,
}

pub fn linear_min(a: Complex64, b: Complex64) -> Result<LinearMin> {
    let b2 = b.norm_sqr();
    if b2 == 0.0 {
        return Err(Error::DegenerateSlope);
    }
    let ab = a * b.conj();
    Ok(LinearMin { t: -ab.re / b2, z: ab.im / b2.sqrt() })
}

/// Thresholds of the candidate events `A'_α` and `A''_α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventThresholds {
    /// `|Z_α| ≤ zmax`.
    pub zmax: f64,
    /// `|P(x_α)| ≤ amax`.
    pub amax: f64,
    /// `bmin ≤ |P'(x_α)|`.
    pub bmin: f64,
    /// `|P'(x_α)| ≤ bmax`.
    pub bmax: f64,
    pub c0: f64,
    pub eps_event: f64,
}

impl EventThresholds {
    /// `zmax = log n`, `amax = n^{-1/2}`, `bmin = n^{1-ε/2}`, `bmax = C0 n sqrt(log n)`.
    pub fn for_degree(n: usize, eps_event: f64, c0: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter("event thresholds need n >= 2".into()));
        }
        let nf = n as f64;
        let th = Self {
            zmax: nf.ln(),
            amax: nf.powf(-0.5),
            bmin: nf.powf(1.0 - eps_event / 2.0),
            bmax: c0 * nf * nf.ln().sqrt(),
            c0,
            eps_event,
        };
        th.validate()?;
        Ok(th)
    }

    pub fn default_for(n: usize) -> Result<Self> {
        Self::for_degree(n, DEFAULT_EPS_EVENT, DEFAULT_C0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.zmax > 0.0 && self.amax > 0.0) {
            return Err(Error::Parameter("zmax and amax must be positive".into()));
        }
        if !(self.bmin > 0.0 && self.bmin < self.bmax) {
            return Err(Error::Parameter(format!(
                "need 0 < bmin < bmax, got bmin={} bmax={}",
                self.bmin, self.bmax
            )));
        }
        Ok(())
    }
}

/// Per-interval linear-interpolation output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateRecord {
    pub alpha: i64,
    pub x_alpha: f64,
    /// `P(x_α)`.
    pub a: Complex64,
    /// `P'(x_α)`.
    pub b: Complex64,
    /// Offset of the predicted minimizer from `x_α`.
    pub t: f64,
    /// `n Im(A conj B)/|B|`.
    pub z: f64,
    /// `|t| ≤ π/N` and `|Z| ≤ zmax`.
    pub aprime: bool,
    /// `|A| ≤ amax` and `bmin ≤ |B| ≤ bmax`.
    pub adprime: bool,
}

impl CandidateRecord {
    pub fn evaluate(
        alpha: i64,
        x_alpha: f64,
        a: Complex64,
        b: Complex64,
        half_width: f64,
        th: &EventThresholds,
        n: usize,
    ) -> Result<Self> {
        let lm = linear_min(a, b)?;
        let z = n as f64 * lm.z;
        let bn = b.norm();
        Ok(Self {
            alpha,
            x_alpha,
            a,
            b,
            t: lm.t,
            z,
            aprime: lm.t.abs() <= half_width && z.abs() <= th.zmax,
            adprime: a.norm() <= th.amax && th.bmin <= bn && bn <= th.bmax,
        })
    }

    pub fn accepted(&self) -> bool {
        self.aprime && self.adprime
    }

    /// Human-readable list of failed conditions.
    pub fn failed_conditions(&self, th: &EventThresholds, half_width: f64) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.t.abs() > half_width {
            out.push("minimizer outside interval");
        }
        if self.z.abs() > th.zmax {
            out.push("|Z| > zmax");
        }
        if self.a.norm() > th.amax {
            out.push("|P| > amax");
        }
        if self.b.norm() < th.bmin {
            out.push("|P'| < bmin");
        }
        if self.b.norm() > th.bmax {
            out.push("|P'| > bmax");
        }
        out
    }
}

/// One point of the near-minima process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessPoint {
    pub alpha: i64,
    pub x_alpha: f64,
    /// `x_α + t`.
    pub position: f64,
    /// `X_α = Z_α`.
    pub value: f64,
}

/// The finite point set `{X_α : A_α holds}` of one polynomial.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NearMinimaProcess {
    pub points: Vec<ProcessPoint>,
    /// Intervals skipped because `P'(x_α) = 0`.
    pub degenerate: usize,
}

impl NearMinimaProcess {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.value)
    }

    /// Number of points with `lo ≤ X ≤ hi`.
    pub fn count_in(&self, lo: f64, hi: f64) -> usize {
        self.points.iter().filter(|p| lo <= p.value && p.value <= hi).count()
    }

    /// The point with the smallest `|X|`.
    pub fn min_abs_point(&self) -> Option<&ProcessPoint> {
        self.points
            .iter()
            .min_by(|a, b| a.value.abs().total_cmp(&b.value.abs()).then(a.alpha.cmp(&b.alpha)))
    }

    pub fn point_at(&self, alpha: i64) -> Option<&ProcessPoint> {
        self.points.iter().find(|p| p.alpha == alpha)
    }
}

/// Extract the near-minima process from net values of `P` and `P'`.
pub fn extract_process(
    pvals: &[Complex64],
    p1vals: &[Complex64],
    net: &Net,
    th: &EventThresholds,
    n: usize,
) -> NearMinimaProcess {
    extract_process_where(pvals, p1vals, net, th, n, |_| true)
}

/// As [`extract_process`], considering only slots whose `x_α` passes `keep`.
pub fn extract_process_where<F>(
    pvals: &[Complex64],
    p1vals: &[Complex64],
    net: &Net,
    th: &EventThresholds,
    n: usize,
    keep: F,
) -> NearMinimaProcess
where
    F: Fn(f64) -> bool,
{
    assert_eq!(pvals.len(), net.len(), "P values must cover the net");
    assert_eq!(p1vals.len(), net.len(), "P' values must cover the net");
    let hw = net.half_width();
    let mut out = NearMinimaProcess::default();
    for (i, (&a, &b)) in pvals.iter().zip(p1vals).enumerate() {
        // Cheap rejection before the division; A'' is necessary for acceptance.
        if a.norm_sqr() > th.amax * th.amax {
            continue;
        }
        let x = net.x(i);
        if !keep(x) {
            continue;
        }
        match CandidateRecord::evaluate(net.alpha(i), x, a, b, hw, th, n) {
            Ok(rec) if rec.accepted() => out.points.push(ProcessPoint {
                alpha: rec.alpha,
                x_alpha: x,
                position: x + rec.t,
                value: rec.z,
            }),
            Ok(_) => {}
            Err(_) => out.degenerate += 1,
        }
    }
    out
}

/// Global minimum of `|P|` over the circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalMinResult {
    /// `min_x |P(x)|` (an attained value, so an upper bound on the true minimum).
    pub m: f64,
    /// Location in `(-π, π]`.
    pub argmin: f64,
    /// The true minimum lies in `[m - certified_bound, m]`.
    pub certified_bound: f64,
    /// Upper bound on `sup |P''|` used for the certificate.
    pub second_derivative_bound: f64,
}

/// Upper bound on `sup_x |P''(x)|`.
///
/// `|P''|` is sampled on `16n` equispaced points. Between samples the gap is at
/// most `π/(16n)` and `|P'''| ≤ n sup|P''|` (Bernstein), so
/// `sup|P''| ≤ M₁₆ / (1 - π/16)`.
pub fn second_derivative_sup_bound(p: &TrigPolynomial) -> f64 {
    let grid = Net::with_points(p.degree(), 16 * p.degree()).expect("16n > 2n");
    let vals = NetEvaluator::new(grid).evaluate(p, 2).expect("grid is collision free");
    sup_bound_from_grid(&vals)
}

fn sup_bound_from_grid(vals: &[Complex64]) -> f64 {
    let m16 = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    m16 / (1.0 - std::f64::consts::PI / 16.0)
}

/// Options for [`GlobalMinimizer`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalMinOptions {
    /// Number of best-predicted intervals refined.
    pub k_seed: usize,
}

impl Default for GlobalMinOptions {
    fn default() -> Self {
        Self { k_seed: DEFAULT_K_SEED }
    }
}

/// Grid-seeded, Newton-refined global minimization of `|P|` with a certificate.
#[derive(Debug, Clone)]
pub struct GlobalMinimizer {
    net: Net,
    grid: NetEvaluator,
    opts: GlobalMinOptions,
}

impl GlobalMinimizer {
    pub fn new(net: Net, opts: GlobalMinOptions) -> Self {
        let n = net.degree();
        let grid = NetEvaluator::new(Net::with_points(n, 16 * n).expect("16n > 2n"));
        Self { net, grid, opts }
    }

    pub fn net(&self) -> &Net {
        &self.net
    }

    pub fn minimize(
        &self,
        p: &TrigPolynomial,
        pvals: &[Complex64],
        p1vals: &[Complex64],
    ) -> Result<GlobalMinResult> {
        let net = &self.net;
        if pvals.len() != net.len() || p1vals.len() != net.len() {
            return Err(Error::Parameter("net values do not match the net size".into()));
        }
        if p.degree() != net.degree() {
            return Err(Error::Parameter("polynomial degree does not match the net".into()));
        }
        let hw = net.half_width();

        // Predicted minimum of |F_α| on I_α: the constrained line minimum sits at clamp(t).
        let mut preds: Vec<(f64, usize, f64)> = Vec::with_capacity(net.len());
        let mut best_net = (f64::INFINITY, 0usize);
        for (i, (&a, &b)) in pvals.iter().zip(p1vals).enumerate() {
            let an = a.norm();
            if an < best_net.0 {
                best_net = (an, i);
            }
            let t = match linear_min(a, b) {
                Ok(lm) => lm.t.clamp(-hw, hw),
                Err(_) => 0.0,
            };
            preds.push(((a + b * t).norm(), i, t));
        }
        let cmp = |u: &(f64, usize, f64), v: &(f64, usize, f64)| {
            u.0.total_cmp(&v.0).then(u.1.cmp(&v.1))
        };
        let k = self.opts.k_seed.clamp(1, preds.len());
        if k < preds.len() {
            preds.select_nth_unstable_by(k - 1, cmp);
        }
        let seeds = &mut preds[..k];
        seeds.sort_by(cmp);
        let best_pred = seeds[0].0;

        let mut grid_vals = Vec::new();
        let mut scratch = self.grid.scratch();
        self.grid.evaluate_into(p, 2, &mut grid_vals, &mut scratch)?;
        let sup2 = sup_bound_from_grid(&grid_vals);
        let interp_err = sup2 * hw * hw / 2.0;

        let mut best = (best_net.0, net.x(best_net.1));
        let starts = seeds
            .iter()
            .map(|&(_, i, t)| net.x(i) + t)
            .chain(std::iter::once(net.x(best_net.1)));
        for start in starts {
            let (x, v) = refine(p, start, net.spacing())?;
            if v < best.0 {
                best = (v, x);
            }
        }
        let m = best.0;
        let lower = (best_pred - interp_err).max(0.0);
        let certified_bound = interp_err.max(m - lower) + NEWTON_TOL;
        Ok(GlobalMinResult {
            m,
            argmin: wrap_angle(best.1),
            certified_bound,
            second_derivative_bound: sup2,
        })
    }
}

/// One-shot global minimization.
pub fn global_min(
    p: &TrigPolynomial,
    pvals: &[Complex64],
    p1vals: &[Complex64],
    net: &Net,
) -> Result<GlobalMinResult> {
    GlobalMinimizer::new(*net, GlobalMinOptions::default()).minimize(p, pvals, p1vals)
}

/// Safeguarded Newton on `g'(x)` for `g = |P|²`, bracketed from `start`.
/// Returns the best point visited and `|P|` there.
fn refine(p: &TrigPolynomial, start: f64, width: f64) -> Result<(f64, f64)> {
    let mut best = (start, f64::INFINITY);
    let mut eval = |x: f64| -> (f64, f64) {
        let [v, d1, d2] = p.evaluate_all(x);
        let modulus = v.norm();
        if modulus < best.1 {
            best = (x, modulus);
        }
        let slope = 2.0 * (v * d1.conj()).re;
        let curv = 2.0 * (d1.norm_sqr() + (v * d2.conj()).re);
        (slope, curv)
    };

    let mut lo = start - width;
    let mut hi = start + width;
    let mut h_lo = eval(lo).0;
    let mut h_hi = eval(hi).0;
    let mut steps = 0;
    while h_lo > 0.0 {
        steps += 1;
        if steps > MAX_REFINE_STEPS {
            return Err(Error::Numeric(format!("no descent bracket near x={start}")));
        }
        hi = lo;
        h_hi = h_lo;
        lo -= width;
        h_lo = eval(lo).0;
    }
    while h_hi < 0.0 {
        steps += 1;
        if steps > MAX_REFINE_STEPS {
            return Err(Error::Numeric(format!("no descent bracket near x={start}")));
        }
        lo = hi;
        h_lo = h_hi;
        hi += width;
        h_hi = eval(hi).0;
    }
    if h_lo == 0.0 || h_hi == 0.0 {
        return Ok(best);
    }

    let mut x = start.clamp(lo, hi);
    let mut last_step = hi - lo;
    for _ in 0..MAX_REFINE_STEPS {
        let (h, hp) = eval(x);
        if h == 0.0 {
            return Ok(best);
        }
        if h < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - h / hp;
        let next = if hp > 0.0 && newton > lo && newton < hi && (newton - x).abs() < last_step / 2.0
        {
            newton
        } else {
            0.5 * (lo + hi)
        };
        last_step = (next - x).abs();
        x = next;
        if last_step <= 4.0 * f64::EPSILON * x.abs().max(1.0) || hi - lo <= 4.0 * f64::EPSILON {
            eval(x);
            return Ok(best);
        }
    }
    Err(Error::Numeric(format!(
        "refinement did not converge from x={start}: bracket [{lo}, {hi}]"
    )))
}

/// Why a trial's process minimum did or did not reproduce the global minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CaptureOutcome {
    /// `||X_min|/n - m| ≤ certified_bound`.
    Captured,
    /// Empty process and `n m > zmax`: nothing to capture.
    EmptyAboveZmax,
    /// Miss, with the failed candidate conditions at the nearest net slots.
    Missed { gap: f64, reasons: Vec<String> },
}

impl CaptureOutcome {
    pub fn is_captured(&self) -> bool {
        matches!(self, CaptureOutcome::Captured)
    }
}

/// Compare the process minimum with the certified global minimum.
pub fn capture_check(
    process: &NearMinimaProcess,
    gm: &GlobalMinResult,
    pvals: &[Complex64],
    p1vals: &[Complex64],
    net: &Net,
    th: &EventThresholds,
) -> CaptureOutcome {
    let n = net.degree();
    let gap = process
        .min_abs_point()
        .map(|pt| (pt.value.abs() / n as f64 - gm.m).abs());
    if let Some(g) = gap {
        if g <= gm.certified_bound {
            return CaptureOutcome::Captured;
        }
    } else if n as f64 * gm.m > th.zmax {
        return CaptureOutcome::EmptyAboveZmax;
    }
    let centre = (gm.argmin / net.spacing()).round() as i64;
    let mut reasons = Vec::new();
    for alpha in centre - 1..=centre + 1 {
        let i = net.slot(alpha);
        let rec = CandidateRecord::evaluate(
            net.alpha(i),
            net.x(i),
            pvals[i],
            p1vals[i],
            net.half_width(),
            th,
            n,
        );
        let why = match rec {
            Ok(r) if r.accepted() => "accepted".to_string(),
            Ok(r) => r.failed_conditions(th, net.half_width()).join(", "),
            Err(_) => "degenerate slope".to_string(),
        };
        reasons.push(format!("alpha={alpha}: {why}"));
    }
    CaptureOutcome::Missed { gap: gap.unwrap_or(f64::INFINITY), reasons }
}

/// Reference value of `min_{s∈ℝ} |A + sB|` by golden-section search; test helper.
#[doc(hidden)]
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc.partial_cmp(&fd) == Some(Ordering::Less) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}
