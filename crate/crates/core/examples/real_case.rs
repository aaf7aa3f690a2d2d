//! Real Gaussian coefficients: correlation identities, the zones around 0 and
//! π, and the law of the minimum.
//!
//! cargo run --release --example real_case -- [n] [trials]

use trigmin::coeffs::CoefficientModel;
use trigmin::pipeline::TrialSetup;
use trigmin::realcase::{real_correlations, realcase_pipeline, zone_hit_fraction, zone_radius, RealCaseConfig, DEFAULT_EPS_ZONE};
use trigmin::stats::{intensity_estimate, ks_exponential, limit_rate};

fn main() -> trigmin::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(256);
    let trials: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(2000);

    println!("E[R(x)²], E[I(x)²] at n = {n}:");
    for x in [0.0, 1.0 / n as f64, 10.0 / n as f64, 1.0, 3.0] {
        let c = real_correlations(n, x, x);
        println!("  x = {x:.5}: {:.4}, {:.4}", c.err, c.eii);
    }

    let cfg = RealCaseConfig::new(n, DEFAULT_EPS_ZONE)?;
    let setup = TrialSetup::with_defaults(CoefficientModel::RealGaussian, n)?;
    let batch = realcase_pipeline(&cfg, setup, 0, 0..trials)?;
    let minima = batch.scaled_minima();
    println!("\nzone radius {:.5}", zone_radius(n, cfg.eps_zone));
    println!("trials with zone minimum <= log n / n: {:.4}", zone_hit_fraction(&batch).unwrap_or(0.0));
    println!("intensity on [-2,2]: {:.4}", intensity_estimate(batch.processes(), -2.0, 2.0)?);
    // T(-x) = conj T(x): every near-minimum has a mirror image with the same modulus.
    let lambda = limit_rate();
    println!("KS vs Exp(λ)   = {:.4}", ks_exponential(&minima, lambda)?.statistic);
    println!("KS vs Exp(λ/2) = {:.4}", ks_exponential(&minima, lambda / 2.0)?.statistic);
    Ok(())
}
