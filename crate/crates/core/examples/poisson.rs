//! Poisson checks on the near-minima counts: dispersion, voids, and
//! independence of disjoint windows.
//!
//! cargo run --release --example poisson -- [n] [trials]

use trigmin::coeffs::CoefficientModel;
use trigmin::pipeline::{run_trials, TrialSetup};
use trigmin::stats::{limit_intensity, poisson_diagnostics, Interval};

fn main() -> trigmin::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(256);
    let trials: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(2000);

    let batch = run_trials(&TrialSetup::with_defaults(CoefficientModel::ComplexGaussian, n)?, 0, 0..trials)?;
    for half in [0.5, 1.0, 2.0] {
        let d = poisson_diagnostics(
            batch.processes(),
            Interval::closed(-half, half),
            Interval::open_closed(half, 2.0 * half + 1.0),
        )?;
        println!(
            "[-{half},{half}]: mean {:.3}, dispersion {:.3}, void {:.4} (Poisson {:.4})",
            d.mean_count,
            d.dispersion,
            d.void_prob,
            (-limit_intensity() * 2.0 * half).exp()
        );
    }
    let pair = poisson_diagnostics(batch.processes(), Interval::closed_open(-2.0, 0.0), Interval::open_closed(0.0, 2.0))?;
    println!("cov([-2,0), (0,2]) = {:.4} ± {:.4}", pair.covariance, pair.covariance_se);
    Ok(())
}
