//! Evaluate a random polynomial on the full net with one inverse FFT and
//! check a few points against direct summation.
//!
//! cargo run --release --example net_eval -- [n]

use trigmin::coeffs::{derive_trial_stream, sample_coefficients, CoefficientModel, RngSpec};
use trigmin::neteval::{build_net, NetEvaluator};
use trigmin::poly::TrigPolynomial;

fn main() -> trigmin::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(256);
    let mut rng = derive_trial_stream(RngSpec::new(1, 0));
    let p = TrigPolynomial::new(n, sample_coefficients(&CoefficientModel::ComplexGaussian, n, &mut rng)?)?;

    let net = build_net(n, 0.01, true)?;
    let floored = build_net(n, 0.01, false)?;
    println!("n = {n}: power-of-two net N = {}, floor rounding N = {}", net.len(), floored.len());

    let eval = NetEvaluator::new(net);
    let start = std::time::Instant::now();
    let values = eval.evaluate(&p, 0)?;
    let slopes = eval.evaluate(&p, 1)?;
    println!("P and P' at {} points in {:.2?}", net.len(), start.elapsed());

    let mut worst: f64 = 0.0;
    for i in (0..net.len()).step_by(net.len() / 64) {
        let x = net.x(i);
        worst = worst.max((values[i] - p.evaluate(x, 0)).norm());
        worst = worst.max((slopes[i] - p.evaluate(x, 1)).norm() / n as f64);
    }
    println!("max gap to direct evaluation at 64 points: {worst:.2e}");

    let (i, v) = values.iter().enumerate().min_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).unwrap();
    println!("smallest |P| on the net: {:.3e} at alpha = {} (x = {:.6})", v.norm(), net.alpha(i), net.x(i));
    Ok(())
}
