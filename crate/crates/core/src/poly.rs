//! Random trigonometric polynomials `P(x) = (2n+1)^{-1/2} Σ_{|j|≤n} ζ_j e^{ijx}`
//! and the covariance kernel `r_n(x) = E[P(0)·conj P(x)]`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Re-anchor the unit-modulus recursion `e^{ijx} = e^{i(j-1)x}·e^{ix}` this often.
const REANCHOR: usize = 32;

/// For `n|x|` below this the kernel is evaluated from its Taylor series.
pub const KERNEL_SERIES_NX: f64 = 2.0;

const SERIES_TERMS: usize = 16;

/// A trigonometric polynomial of degree `n`; `coeffs[j + n]` holds `ζ_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    n: usize,
    coeffs: Vec<Complex64>,
}

impl TrigPolynomial {
    pub fn new(n: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if n < 1 {
            return Err(Error::Parameter("degree n must be at least 1".into()));
        }
        if coeffs.len() != 2 * n + 1 {
            return Err(Error::Parameter(format!(
                "expected {} coefficients for degree {n}, got {}",
                2 * n + 1,
                coeffs.len()
            )));
        }
        Ok(Self { n, coeffs })
    }

    /// Convenience constructor from real coefficients.
    pub fn from_real(n: usize, coeffs: &[f64]) -> Result<Self> {
        Self::new(n, coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `ζ_j` for `j ∈ [-n, n]`.
    pub fn coeff(&self, j: i64) -> Complex64 {
        self.coeffs[(j + self.n as i64) as usize]
    }

    /// `(2n+1)^{-1/2}`.
    pub fn normalization(&self) -> f64 {
        1.0 / ((2 * self.n + 1) as f64).sqrt()
    }

    pub fn has_real_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }

    /// `P^{(order)}(x)` for `order ∈ {0, 1, 2}` by direct summation.
    pub fn evaluate(&self, x: f64, order: u8) -> Complex64 {
        assert!(order <= 2, "derivative order must be 0, 1 or 2");
        self.evaluate_all(x)[order as usize]
    }

    /// `P(x)` alone, by Horner's rule in `e^{ix}` and `e^{-ix}`. About a
    /// sixth of the work of [`evaluate_all`](Self::evaluate_all).
    pub fn evaluate_value(&self, x: f64) -> Complex64 {
        let n = self.n;
        let w = Complex64::cis(x);
        let wc = w.conj();
        let mut up = self.coeffs[2 * n];
        let mut down = self.coeffs[0];
        for k in (1..n).rev() {
            up = up * w + self.coeffs[n + k];
            down = down * wc + self.coeffs[n - k];
        }
        (self.coeffs[n] + up * w + down * wc) * self.normalization()
    }

    /// `[P(x), P'(x), P''(x)]` in one O(n) pass.
    ///
    /// Two one-sided recursions in `e^{±ix}` with compensated accumulation.
    pub fn evaluate_all(&self, x: f64) -> [Complex64; 3] {
        let n = self.n as i64;
        let mut acc = [Kahan::default(), Kahan::default(), Kahan::default()];
        let c0 = self.coeff(0);
        acc[0].add(c0);
        for sign in [1.0, -1.0] {
            let step = Complex64::cis(sign * x);
            let mut w = Complex64::new(1.0, 0.0);
            for k in 1..=n {
                w = if (k as usize) % REANCHOR == 0 {
                    Complex64::cis(sign * k as f64 * x)
                } else {
                    w * step
                };
                let j = sign * k as f64;
                let term = self.coeff(sign as i64 * k) * w;
                // (ij)^1 = ij, (ij)^2 = -j².
                acc[0].add(term);
                acc[1].add(Complex64::new(-j * term.im, j * term.re));
                acc[2].add(-term * (j * j));
            }
        }
        let s = self.normalization();
        [acc[0].sum * s, acc[1].sum * s, acc[2].sum * s]
    }

    /// `sup_x |P^{(order)}(x)|` is at most `(2n+1)^{-1/2} Σ |j|^order |ζ_j|`.
    pub fn coefficient_bound(&self, order: u8) -> f64 {
        let n = self.n as i64;
        (-n..=n)
            .map(|j| (j.unsigned_abs() as f64).powi(order as i32) * self.coeff(j).norm())
            .sum::<f64>()
            * self.normalization()
    }
}

#[derive(Default, Clone, Copy)]
struct Kahan {
    sum: Complex64,
    comp: Complex64,
}

impl Kahan {
    fn add(&mut self, v: Complex64) {
        let y = v - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
}

/// `σ_n = sqrt(n(n+1)/3)`, the standard deviation of `P'(0)` for the complex model.
pub fn sigma_n(n: usize) -> f64 {
    let n = n as f64;
    (n * (n + 1.0) / 3.0).sqrt()
}

/// `r_n`, `r_n'`, `r_n''` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub r: f64,
    pub r1: f64,
    pub r2: f64,
    pub sigma_n: f64,
}

impl KernelValue {
    /// `r_n'/σ_n`.
    pub fn r1_scaled(&self) -> f64 {
        self.r1 / self.sigma_n
    }

    /// `-r_n''/σ_n²`.
    pub fn neg_r2_scaled(&self) -> f64 {
        -self.r2 / (self.sigma_n * self.sigma_n)
    }
}

/// Reduce an angle to `(-π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    if (-PI..=PI).contains(&x) {
        return x;
    }
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// The covariance kernel and its first two derivatives.
///
/// Closed (Dirichlet) forms away from the origin; the exact Taylor series in
/// `x` for `n|x| < KERNEL_SERIES_NX`, where the closed form for `r''` loses
/// digits to cancellation.
pub fn kernel(n: usize, x: f64) -> KernelValue {
    assert!(n >= 1, "degree n must be at least 1");
    // Evaluate at |x| so that rounding keeps r even and r' odd.
    let x = wrap_angle(x);
    let ax = x.abs();
    let (r, r1, r2) = if n as f64 * ax < KERNEL_SERIES_NX {
        kernel_series(n, ax)
    } else {
        kernel_closed(n, ax)
    };
    let r1 = if x < 0.0 { -r1 } else { r1 };
    KernelValue { r, r1, r2, sigma_n: sigma_n(n) }
}

/// Closed forms obtained by differentiating the Dirichlet kernel. Singular at `x = 0`.
pub fn kernel_closed(n: usize, x: f64) -> (f64, f64, f64) {
    let nf = n as f64;
    let nu = nf + 0.5;
    let s = (x / 2.0).sin();
    let c = (x / 2.0).cos();
    let sin_nu = (nu * x).sin();
    let r = sin_nu / ((2.0 * nf + 1.0) * s);
    let r1 = ((nu * x).cos() - c * sin_nu / ((2.0 * nf + 1.0) * s)) / (2.0 * s);
    let num = nf * nf * ((nf + 1.5) * x).sin() + (nf + 1.0).powi(2) * ((nf - 0.5) * x).sin()
        - (2.0 * nf * (nf + 1.0) - 1.0) * sin_nu;
    let r2 = num / (s * s * s * (8.0 * nf + 4.0));
    (r, r1, r2)
}

/// Taylor series of `r`, `r'`, `r''` about 0 with the exact moments
/// `ν_{2k} = (2n+1)^{-1} Σ (j/n)^{2k}`, in the variable `u = n x`.
pub fn kernel_series(n: usize, x: f64) -> (f64, f64, f64) {
    let nf = n as f64;
    let u = nf * x;
    let nu = scaled_moments(n);
    // r = Σ (-1)^k ν_{2k} u^{2k}/(2k)!
    // r' = -n Σ (-1)^k ν_{2k+2} u^{2k+1}/(2k+1)!
    // r'' = -n² Σ (-1)^k ν_{2k+2} u^{2k}/(2k)!
    let mut r = 0.0;
    let mut r1 = 0.0;
    let mut r2 = 0.0;
    let mut even = 1.0; // u^{2k}/(2k)!
    for k in 0..SERIES_TERMS {
        let odd = even * u / (2 * k + 1) as f64; // u^{2k+1}/(2k+1)!
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        r += sign * nu[k] * even;
        r1 -= sign * nu[k + 1] * odd;
        r2 -= sign * nu[k + 1] * even;
        even = odd * u / (2 * k + 2) as f64;
    }
    (r, nf * r1, nf * nf * r2)
}

fn scaled_moments(n: usize) -> [f64; SERIES_TERMS + 1] {
    let mut m = [0.0; SERIES_TERMS + 1];
    let nf = n as f64;
    for j in 1..=n {
        let q = (j as f64 / nf).powi(2);
        let mut p = 1.0;
        for slot in m.iter_mut().skip(1) {
            p *= q;
            *slot += p;
        }
    }
    let norm = 2.0 / (2.0 * nf + 1.0);
    for slot in m.iter_mut() {
        *slot *= norm;
    }
    m[0] = 1.0;
    m
}

/// Large-`n` expansion of `(r, r'/σ, -r''/σ²)` in `u = n x`, truncated after
/// the `u⁴`, `u³` and `u²` terms respectively. Accurate to `O(u⁶ + u⁵ + u⁴)`
/// plus `O(1/n)` corrections.
pub fn kernel_leading_series(n: usize, x: f64) -> (f64, f64, f64) {
    let u = n as f64 * x;
    let s3 = 3f64.sqrt();
    (
        1.0 - u * u / 6.0 + u.powi(4) / 120.0,
        -u / s3 + u.powi(3) / (10.0 * s3),
        1.0 - 3.0 * u * u / 10.0,
    )
}

/// Direct sums `(2n+1)^{-1} Σ e^{-ijx}` and their term-wise derivatives.
/// Reference values for the closed forms.
pub fn kernel_direct_sum(n: usize, x: f64) -> (f64, f64, f64) {
    let mut r = 0.0;
    let mut r1 = 0.0;
    let mut r2 = 0.0;
    let n = n as i64;
    for j in -n..=n {
        let jf = j as f64;
        let (s, c) = (jf * x).sin_cos();
        r += c;
        r1 -= jf * s;
        r2 -= jf * jf * c;
    }
    let d = (2 * n + 1) as f64;
    (r / d, r1 / d, r2 / d)
}
