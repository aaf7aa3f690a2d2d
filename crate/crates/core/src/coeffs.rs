//! Coefficient models and reproducible per-trial random streams.
//!
//! Every trial draws from its own ChaCha8 stream: the key comes from the
//! master seed, the 64-bit stream id is the trial index. A trial's draws
//! therefore depend only on `(master_seed, trial_index)`, never on which
//! worker ran it or in what order.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Base distribution of the non-Gaussian part of a Cramér-perturbed coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CramerBase {
    /// Uniform on a symmetric interval.
    UniformSymmetric,
    /// Laplace (double exponential).
    Laplace,
}

impl CramerBase {
    pub fn as_str(&self) -> &'static str {
        match self {
            CramerBase::UniformSymmetric => "uniform",
            CramerBase::Laplace => "laplace",
        }
    }

    /// Draw a unit-variance, mean-zero sample.
    fn sample_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            // Uniform(-√3, √3) has variance 1.
            CramerBase::UniformSymmetric => (2.0 * rng.random::<f64>() - 1.0) * 3f64.sqrt(),
            // Laplace with scale 1/√2 has variance 1.
            CramerBase::Laplace => {
                let u: f64 = rng.random::<f64>() - 0.5;
                let mag = -(1.0 - 2.0 * u.abs()).max(f64::MIN_POSITIVE).ln();
                u.signum() * mag / 2f64.sqrt()
            }
        }
    }
}

impl FromStr for CramerBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" | "UniformSymmetric" => Ok(CramerBase::UniformSymmetric),
            "laplace" | "Laplace" => Ok(CramerBase::Laplace),
            other => Err(Error::InvalidModel(format!("unknown Cramér base `{other}`"))),
        }
    }
}

/// Law of the coefficients `ζ_j`, `j = -n..=n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoefficientModel {
    /// Standard complex Gaussian: real and imaginary parts independent, each of variance 1/2.
    ComplexGaussian,
    /// Standard real Gaussian.
    RealGaussian,
    /// `ξ_j + delta·X_j` with `E[ξ] = 0`, `E[ξ²] = 1 - delta²` and `X_j` standard real Gaussian.
    CramerPerturbed { delta: f64, base: CramerBase },
}

impl CoefficientModel {
    pub fn kind(&self) -> &'static str {
        match self {
            CoefficientModel::ComplexGaussian => "complex",
            CoefficientModel::RealGaussian => "real",
            CoefficientModel::CramerPerturbed { .. } => "cramer",
        }
    }

    /// Default Gaussian-component scale `n^{-1/2}`.
    pub fn default_delta(n: usize) -> f64 {
        1.0 / (n as f64).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if let CoefficientModel::CramerPerturbed { delta, .. } = self {
            if !(*delta > 0.0 && *delta < 1.0) {
                return Err(Error::InvalidModel(format!(
                    "Cramér delta must lie in (0,1), got {delta}"
                )));
            }
        }
        Ok(())
    }

    /// Whether the model produces purely real coefficients.
    pub fn is_real(&self) -> bool {
        !matches!(self, CoefficientModel::ComplexGaussian)
    }
}

impl fmt::Display for CoefficientModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientModel::CramerPerturbed { delta, base } => {
                write!(f, "cramer(delta={delta}, base={})", base.as_str())
            }
            other => f.write_str(other.kind()),
        }
    }
}

/// Identifies the random stream of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSpec {
    pub master_seed: u64,
    pub trial_index: u64,
}

impl RngSpec {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        Self { master_seed, trial_index }
    }
}

/// Random stream handle for a single trial.
pub type TrialStream = ChaCha8Rng;

/// Derive the stream of a trial. Pure in `(master_seed, trial_index)`.
pub fn derive_trial_stream(spec: RngSpec) -> TrialStream {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.master_seed);
    rng.set_stream(spec.trial_index);
    rng
}

/// Draw the `2n+1` coefficients `ζ_{-n}, …, ζ_n` (index `j + n`).
pub fn sample_coefficients<R: Rng + ?Sized>(
    model: &CoefficientModel,
    n: usize,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if n < 1 {
        return Err(Error::Parameter("degree n must be at least 1".into()));
    }
    model.validate()?;
    let len = 2 * n + 1;
    let coeffs = match *model {
        CoefficientModel::ComplexGaussian => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            (0..len)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(rng);
                    let im: f64 = StandardNormal.sample(rng);
                    Complex64::new(s * re, s * im)
                })
                .collect()
        }
        CoefficientModel::RealGaussian => (0..len)
            .map(|_| Complex64::new(StandardNormal.sample(rng), 0.0))
            .collect(),
        CoefficientModel::CramerPerturbed { delta, base } => {
            let xi_scale = (1.0 - delta * delta).sqrt();
            (0..len)
                .map(|_| {
                    let xi = xi_scale * base.sample_unit(rng);
                    let g: f64 = StandardNormal.sample(rng);
                    Complex64::new(xi + delta * g, 0.0)
                })
                .collect()
        }
    };
    Ok(coeffs)
}

/// Variance of the `ξ` part of a Cramér-perturbed coefficient.
pub fn cramer_xi_variance(delta: f64) -> f64 {
    1.0 - delta * delta
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_is_deterministic() {
        let draw = |trial| {
            let mut rng = derive_trial_stream(RngSpec::new(7, trial));
            (0..100).map(|_| rng.random::<u64>()).collect::<Vec<_>>()
        };
        assert_eq!(draw(0), draw(0));
        assert_ne!(draw(0)[0], draw(1)[0]);
        let late5 = draw(5);
        let three = draw(3);
        assert_eq!(draw(5), late5);
        assert_eq!(draw(3), three);
    }

    #[test]
    fn real_models_have_zero_imaginary_part() {
        let mut rng = derive_trial_stream(RngSpec::new(1, 0));
        for model in [
            CoefficientModel::RealGaussian,
            CoefficientModel::CramerPerturbed { delta: 0.5, base: CramerBase::UniformSymmetric },
            CoefficientModel::CramerPerturbed { delta: 0.5, base: CramerBase::Laplace },
        ] {
            let c = sample_coefficients(&model, 16, &mut rng).unwrap();
            assert_eq!(c.len(), 33);
            assert!(c.iter().all(|z| z.im == 0.0));
        }
    }

    #[test]
    fn cramer_delta_out_of_range_is_rejected() {
        let mut rng = derive_trial_stream(RngSpec::new(1, 0));
        for delta in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            let model = CoefficientModel::CramerPerturbed { delta, base: CramerBase::Laplace };
            assert!(matches!(
                sample_coefficients(&model, 4, &mut rng),
                Err(Error::InvalidModel(_))
            ));
        }
        assert_eq!(cramer_xi_variance(0.5), 0.75);
    }

    #[test]
    fn degree_zero_is_rejected() {
        let mut rng = derive_trial_stream(RngSpec::new(1, 0));
        assert!(sample_coefficients(&CoefficientModel::ComplexGaussian, 0, &mut rng).is_err());
    }

    #[test]
    fn complex_gaussian_unit_variance() {
        // E|ζ_0|² = 1; |ζ|² ~ Exp(1) so the estimator has sd 1/√M.
        let m = 100_000u64;
        let mut sum = 0.0;
        for t in 0..m {
            let mut rng = derive_trial_stream(RngSpec::new(11, t));
            let c = sample_coefficients(&CoefficientModel::ComplexGaussian, 128, &mut rng).unwrap();
            sum += c[128].norm_sqr();
        }
        let mean = sum / m as f64;
        assert!((0.99..=1.01).contains(&mean), "mean |ζ_0|² = {mean}");
    }

    #[test]
    fn every_model_has_unit_variance() {
        let m = 20_000usize;
        let models = [
            CoefficientModel::ComplexGaussian,
            CoefficientModel::RealGaussian,
            CoefficientModel::CramerPerturbed { delta: 0.3, base: CramerBase::UniformSymmetric },
            CoefficientModel::CramerPerturbed { delta: 0.3, base: CramerBase::Laplace },
        ];
        for model in models {
            let mut rng = derive_trial_stream(RngSpec::new(3, 0));
            let mut sum = 0.0;
            let mut sq = Vec::with_capacity(m);
            for _ in 0..m {
                let c = sample_coefficients(&model, 1, &mut rng).unwrap();
                sum += c[1].re + c[1].im;
                sq.push(c[1].norm_sqr());
            }
            let mf = m as f64;
            let var = sq.iter().sum::<f64>() / mf;
            // 4/√M, widened by the spread of |ζ|² for the heavier-tailed Laplace base.
            let spread = (sq.iter().map(|s| (s - var).powi(2)).sum::<f64>() / mf).sqrt();
            assert!((var - 1.0).abs() < 4.0 * spread.max(1.0) / mf.sqrt(), "{model}: var {var}");
            assert!((sum / mf).abs() < 4.0 / mf.sqrt(), "{model}: mean {}", sum / mf);
        }
    }
}
