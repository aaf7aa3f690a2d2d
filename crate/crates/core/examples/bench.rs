//! Direct O(nN) evaluation against the transform on growing nets.
//!
//! cargo run --release --example bench -- [n]

use trigmin::coeffs::{derive_trial_stream, sample_coefficients, CoefficientModel, RngSpec};
use trigmin::neteval::bench_net_evaluation;
use trigmin::poly::TrigPolynomial;

fn main() -> trigmin::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(512);
    let mut rng = derive_trial_stream(RngSpec::new(0, 0));
    let p = TrigPolynomial::new(n, sample_coefficients(&CoefficientModel::ComplexGaussian, n, &mut rng)?)?;
    println!("     N     direct(s)  transform(s)  speedup  op ratio");
    let mut big_n = (4 * n + 1).next_power_of_two();
    while big_n <= 1 << 17 {
        let row = bench_net_evaluation(&p, big_n)?;
        println!("{:7}  {:9.4}  {:12.6}  {:7.1}  {:8.1}", row.points, row.direct_secs, row.transform_secs, row.speedup, row.op_ratio);
        big_n *= 2;
    }
    Ok(())
}
