//! How often two near-minima of one polynomial sit close together.
//!
//! cargo run --release --example separation -- [n] [trials]

use trigmin::coeffs::CoefficientModel;
use trigmin::pipeline::{run_trials, TrialSetup};
use trigmin::stats::{has_close_pair, separation_statistic};

fn main() -> trigmin::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(256);
    let trials: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(2000);

    let batch = run_trials(&TrialSetup::with_defaults(CoefficientModel::ComplexGaussian, n)?, 0, 0..trials)?;
    let mean_points = batch.processes().map(|p| p.len()).sum::<usize>() as f64 / trials as f64;
    println!("n = {n}: {mean_points:.2} candidates per trial");
    println!("fraction with a pair within n^-1/2: {:.4}", separation_statistic(batch.processes(), n, 0.5));
    for c in [16.0, 4.0, 1.0, 0.25] {
        let d = c / n as f64;
        let f = batch.processes().filter(|p| has_close_pair(p, d)).count() as f64 / trials as f64;
        println!("  within {c:5.2}/n: {f:.4}");
    }
    Ok(())
}
