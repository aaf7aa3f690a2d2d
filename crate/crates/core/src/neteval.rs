//! Batch evaluation of `P`, `P'` (and `P''`) at every net point with one inverse FFT.
//!
//! Coefficient `(ij)^order ζ_j / sqrt(2n+1)` goes to frequency slot `(j + N) mod N`;
//! an unnormalized inverse DFT then yields `P^{(order)}(2πm/N)` at slot `m`.
//! Results are returned in net order, index `α + N/2` for `α ∈ [-N/2, N/2)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::TrigPolynomial;

/// Default net exponent.
pub const DEFAULT_EPS_NET: f64 = 0.01;

/// `N` equispaced points `x_α = 2πα/N`, `α = -N/2..N/2-1`, each the centre of an
/// interval of half-width `π/N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Net {
    n: usize,
    eps: f64,
    points: usize,
}

impl Net {
    /// A net with an explicit point count; `N` must be even and exceed `2n`.
    pub fn with_points(n: usize, points: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::Parameter("degree n must be at least 1".into()));
        }
        if points % 2 != 0 || points <= 2 * n {
            return Err(Error::Parameter(format!(
                "net size N={points} must be even and exceed 2n={}",
                2 * n
            )));
        }
        let eps = 2.0 - (points as f64).ln() / (n as f64).ln().max(f64::MIN_POSITIVE);
        Ok(Self { n, eps, points })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// The exponent `ε` with `N ≈ n^{2-ε}` (for explicit nets, the implied one).
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Number of net points `N`.
    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points == 0
    }

    pub fn half_width(&self) -> f64 {
        PI / self.points as f64
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.points as f64
    }

    /// Net index `α` of storage slot `i`.
    pub fn alpha(&self, i: usize) -> i64 {
        i as i64 - (self.points / 2) as i64
    }

    /// Storage slot of net index `α` (taken modulo `N`).
    pub fn slot(&self, alpha: i64) -> usize {
        let n = self.points as i64;
        (alpha + n / 2).rem_euclid(n) as usize
    }

    /// `x_α` for storage slot `i`.
    pub fn x(&self, i: usize) -> f64 {
        self.spacing() * self.alpha(i) as f64
    }

    /// The net points in storage order.
    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|i| self.x(i))
    }
}

impl fmt::Display for Net {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Net(n={}, N={}, eps={:.4})", self.n, self.points, self.eps)
    }
}

/// Build the net for degree `n`: `N = 2⌊n^{2-ε}/2⌋`, or the next power of two
/// at or above `n^{2-ε}` when `round_to_pow2` is set.
pub fn build_net(n: usize, eps: f64, round_to_pow2: bool) -> Result<Net> {
    if n < 1 {
        return Err(Error::Parameter("degree n must be at least 1".into()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Parameter(format!("net exponent must lie in (0,1), got {eps}")));
    }
    let target = (n as f64).powf(2.0 - eps);
    if target <= (2 * n) as f64 {
        return Err(Error::Parameter(format!(
            "net too coarse: n^(2-eps) = {target:.3} <= 2n = {}",
            2 * n
        )));
    }
    let points = if round_to_pow2 {
        (target.ceil() as usize).next_power_of_two()
    } else {
        2 * (target / 2.0).floor() as usize
    };
    let mut net = Net::with_points(n, points)?;
    net.eps = eps;
    Ok(net)
}

/// Reusable inverse-FFT plan for one net size.
#[derive(Clone)]
pub struct NetEvaluator {
    net: Net,
    fft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for NetEvaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NetEvaluator").field("net", &self.net).finish()
    }
}

impl NetEvaluator {
    pub fn new(net: Net) -> Self {
        let fft = FftPlanner::new().plan_fft_inverse(net.len());
        Self { net, fft }
    }

    pub fn net(&self) -> &Net {
        &self.net
    }

    /// Scratch buffer sized for this plan.
    pub fn scratch(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); self.fft.get_inplace_scratch_len()]
    }

    /// Write `P^{(order)}(x_α)` for every `α` into `out` (net order).
    pub fn evaluate_into(
        &self,
        p: &TrigPolynomial,
        order: u8,
        out: &mut Vec<Complex64>,
        scratch: &mut Vec<Complex64>,
    ) -> Result<()> {
        if order > 2 {
            return Err(Error::Parameter(format!("derivative order {order} not supported")));
        }
        let big_n = self.net.len();
        let n = p.degree();
        if big_n <= 2 * n {
            return Err(Error::Parameter(format!(
                "frequency slots collide: N={big_n} <= 2n={}",
                2 * n
            )));
        }
        out.clear();
        out.resize(big_n, Complex64::new(0.0, 0.0));
        let s = p.normalization();
        for (k, &z) in p.coeffs().iter().enumerate() {
            let j = k as i64 - n as i64;
            let jf = j as f64;
            let v = match order {
                0 => z,
                1 => Complex64::new(-jf * z.im, jf * z.re),
                _ => -z * (jf * jf),
            };
            out[j.rem_euclid(big_n as i64) as usize] = v * s;
        }
        if scratch.len() < self.fft.get_inplace_scratch_len() {
            *scratch = self.scratch();
        }
        self.fft.process_with_scratch(out, scratch);
        out.rotate_left(big_n / 2);
        Ok(())
    }

    pub fn evaluate(&self, p: &TrigPolynomial, order: u8) -> Result<Vec<Complex64>> {
        let mut out = Vec::new();
        let mut scratch = self.scratch();
        self.evaluate_into(p, order, &mut out, &mut scratch)?;
        Ok(out)
    }
}

/// One-shot net evaluation; plans a fresh transform.
pub fn evaluate_on_net(p: &TrigPolynomial, net: &Net, order: u8) -> Result<Vec<Complex64>> {
    if net.len() <= 2 * p.degree() {
        return Err(Error::Parameter(format!(
            "frequency slots collide: N={} <= 2n={}",
            net.len(),
            2 * p.degree()
        )));
    }
    NetEvaluator::new(*net).evaluate(p, order)
}

/// Direct O(nN) evaluation at every net point; reference path and benchmark baseline.
pub fn evaluate_on_net_direct(p: &TrigPolynomial, net: &Net, order: u8) -> Vec<Complex64> {
    net.points().map(|x| p.evaluate(x, order)).collect()
}

/// Complex multiply-adds of direct evaluation, `2nN`.
pub fn direct_op_count(n: usize, points: usize) -> f64 {
    2.0 * n as f64 * points as f64
}

/// Butterfly count of a radix-2 transform, `N log₂ N`.
pub fn transform_op_count(points: usize) -> f64 {
    points as f64 * (points as f64).log2()
}

/// Wall-clock comparison of direct and transform evaluation of `P` and `P'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub points: usize,
    pub direct_secs: f64,
    pub transform_secs: f64,
    pub speedup: f64,
    /// `2nN / (N log₂ N)`.
    pub op_ratio: f64,
}

/// Time both paths on a net of `points` points. The transform is repeated
/// until at least 50 ms have elapsed and averaged.
pub fn bench_net_evaluation(p: &TrigPolynomial, points: usize) -> Result<BenchRow> {
    let net = Net::with_points(p.degree(), points)?;
    let start = Instant::now();
    for order in 0..2 {
        std::hint::black_box(evaluate_on_net_direct(p, &net, order));
    }
    let direct_secs = start.elapsed().as_secs_f64();

    let eval = NetEvaluator::new(net);
    let mut out = Vec::new();
    let mut scratch = eval.scratch();
    let mut reps = 0u32;
    let start = Instant::now();
    while reps == 0 || start.elapsed().as_secs_f64() < 0.05 {
        for order in 0..2 {
            eval.evaluate_into(p, order, &mut out, &mut scratch)?;
            std::hint::black_box(&out);
        }
        reps += 1;
    }
    let transform_secs = start.elapsed().as_secs_f64() / reps as f64;
    Ok(BenchRow {
        n: p.degree(),
        points,
        direct_secs,
        transform_secs,
        speedup: direct_secs / transform_secs,
        op_ratio: direct_op_count(p.degree(), points) / transform_op_count(points),
    })
}
