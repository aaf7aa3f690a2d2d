//! Resample P̂ = √(1−1/n²)P + Q/n and follow each near-minimum.
//!
//! cargo run --release --example perturbation -- [n] [trials]

use trigmin::coeffs::CoefficientModel;
use trigmin::perturb::{invariance_report, match_and_shift, run_perturb_trials, PerturbControl};
use trigmin::pipeline::TrialSetup;

fn main() -> trigmin::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(256);
    let trials: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1000);

    let setup = TrialSetup::with_defaults(CoefficientModel::ComplexGaussian, n)?;
    let runs = run_perturb_trials(&setup, 0, 0..trials, PerturbControl::Coupled)?;

    println!("first trial, |X| <= 3:");
    println!("   X          X̂         shift      predicted");
    for s in match_and_shift(&runs[0], 3.0).shifts {
        println!("{:+.5}   {:+.5}   {:+.5}   {:+.5}", s.x, s.x_hat, s.shift, s.predictor);
    }

    let r = invariance_report(&runs, 3.0)?;
    println!("\n{} matched points over {} trials", r.matched, r.trials);
    println!("shift mean {:+.4}, variance {:.4} (target 0.5)", r.shift_mean, r.shift_var);
    println!("KS shifts vs N(0,1/2)   {:.4}", r.shift_ks_gauss);
    println!("KS {{X}} vs {{X̂}}          {:.4}", r.law_ks);
    println!("trials with a lost point {:.4}", r.unmatched_frac);
    println!("√n max|shift − G|        {:.3}", r.residual_max_scaled);
    Ok(())
}
