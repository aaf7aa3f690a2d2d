//! Coefficients ξ_j + δX_j with a non-Gaussian ξ.
//!
//! cargo run --release --example cramer -- [n] [trials] [uniform|laplace]

use trigmin::coeffs::{CoefficientModel, CramerBase};
use trigmin::pipeline::TrialSetup;
use trigmin::realcase::{realcase_pipeline, RealCaseConfig, DEFAULT_EPS_ZONE};
use trigmin::stats::{ks_exponential, limit_rate, mean};

fn main() -> trigmin::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(256);
    let trials: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(2000);
    let base: CramerBase = args.next().as_deref().unwrap_or("uniform").parse()?;

    let model = CoefficientModel::CramerPerturbed { delta: CoefficientModel::default_delta(n), base };
    let setup = TrialSetup::with_defaults(model, n)?;
    let batch = realcase_pipeline(&RealCaseConfig::new(n, DEFAULT_EPS_ZONE)?, setup, 0, 0..trials)?;
    let minima = batch.scaled_minima();
    println!("{model}, n = {n}, trials = {trials}");
    println!("mean n·m_n = {:.4}", mean(&minima));
    println!("KS vs Exp(λ)   = {:.4}", ks_exponential(&minima, limit_rate())?.statistic);
    println!("KS vs Exp(λ/2) = {:.4}", ks_exponential(&minima, limit_rate() / 2.0)?.statistic);
    Ok(())
}
