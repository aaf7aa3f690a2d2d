//! Compare the kernel evaluator with direct sums and print the worst gaps.
//!
//! cargo run --release --example kernel_check -- [n]

use trigmin::poly::{kernel, kernel_direct_sum, kernel_leading_series, sigma_n, KERNEL_SERIES_NX};

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(512);
    let sig = sigma_n(n);
    let mut worst = [0.0f64; 3];
    for k in 0..2000 {
        let x = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / 2000.0;
        let v = kernel(n, x);
        let (r, r1, r2) = kernel_direct_sum(n, x);
        worst[0] = worst[0].max((v.r - r).abs());
        worst[1] = worst[1].max((v.r1 - r1).abs() / sig);
        worst[2] = worst[2].max((v.r2 - r2).abs() / (sig * sig));
    }
    println!("n = {n}, sigma_n = {sig:.6}");
    println!("max |r - sum|          = {:.3e}", worst[0]);
    println!("max |r' - sum'| / σ    = {:.3e}", worst[1]);
    println!("max |r'' - sum''| / σ² = {:.3e}", worst[2]);

    // Across the switch between the series and the closed form.
    let seam = KERNEL_SERIES_NX / n as f64;
    let below = kernel(n, seam * (1.0 - 1e-12));
    let above = kernel(n, seam * (1.0 + 1e-12));
    println!("seam nx = {KERNEL_SERIES_NX}: jump in r = {:.2e}, in -r''/σ² = {:.2e}",
        (below.r - above.r).abs(), (below.neg_r2_scaled() - above.neg_r2_scaled()).abs());

    println!("\n  nx      r        r'/σ      -r''/σ²   (leading terms)");
    for u in [0.05, 0.1, 0.25, 0.5] {
        let x = u / n as f64;
        let v = kernel(n, x);
        let (lr, lr1, lr2) = kernel_leading_series(n, x);
        println!("{u:5.2}  {:.6}  {:+.6}  {:.6}   ({lr:.6} {lr1:+.6} {lr2:.6})", v.r, v.r1_scaled(), v.neg_r2_scaled());
    }
}
