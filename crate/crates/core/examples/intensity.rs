//! Mean number of near-minima per window against √(π/3)(b−a).
//!
//! cargo run --release --example intensity -- [n] [trials]

use trigmin::coeffs::CoefficientModel;
use trigmin::pipeline::{run_trials, TrialSetup};
use trigmin::stats::{intensity_estimate, limit_intensity};

fn main() -> trigmin::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(256);
    let trials: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(2000);

    let setup = TrialSetup::with_defaults(CoefficientModel::ComplexGaussian, n)?;
    println!("thresholds: {:?}", setup.thresholds);
    let batch = run_trials(&setup, 0, 0..trials)?;
    println!("  window      estimate   limit");
    for (a, b) in [(-0.5, 0.5), (-1.0, 1.0), (-2.0, 2.0), (0.0, 3.0), (-5.0, 5.0)] {
        let est = intensity_estimate(batch.processes(), a, b)?;
        println!("[{a:4.1},{b:4.1}]   {est:.4}     {:.4}", limit_intensity() * (b - a));
    }
    Ok(())
}
