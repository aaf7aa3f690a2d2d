//! Scaled minimum n·m_n of complex Gaussian polynomials against Exp(2√(π/3)).
//!
//! cargo run --release --example minimum_law -- [n] [trials]

use trigmin::coeffs::CoefficientModel;
use trigmin::pipeline::{run_trials, TrialSetup};
use trigmin::stats::{empirical_survival, ks_exponential, limit_rate};

fn main() -> trigmin::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(256);
    let trials: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(2000);

    let setup = TrialSetup::with_defaults(CoefficientModel::ComplexGaussian, n)?;
    let batch = run_trials(&setup, 0, 0..trials)?;
    let minima = batch.scaled_minima();
    let ks = ks_exponential(&minima, limit_rate())?;
    println!("n = {n}, trials = {trials}, net N = {}", setup.net.len());
    println!("KS vs Exp({:.4}) = {:.4} (95% critical {:.4})", limit_rate(), ks.statistic, ks.critical_95);
    println!("capture rate = {:.4}", batch.capture_rate());

    let taus: Vec<f64> = (0..=8).map(|k| 0.25 * k as f64).collect();
    let curve = empirical_survival(&minima, &taus)?;
    println!("\n tau   P(n m >= tau)   exp(-λ tau)");
    for ((t, e), r) in curve.taus.iter().zip(&curve.empirical).zip(&curve.reference) {
        println!("{t:5.2}   {e:.4}          {r:.4}");
    }
    Ok(())
}
