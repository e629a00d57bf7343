//! CDF, density and quantiles of `‖ξ − a‖²` by characteristic-function
//! inversion, checked against a seeded sample.
//!
//! cargo run --release --example quadform_law

use ballprob::quadform::{InversionConfig, QuadFormLaw};
use ballprob::spectrum::Spectrum;

fn main() -> ballprob::Result<()> {
    let s = Spectrum::new(vec![2.0, 1.0, 0.5, 0.25])?;
    let law = QuadFormLaw::from_gaussian(&s, &[1.0, 0.0, -0.5, 0.0]);
    let cfg = InversionConfig::default();
    println!("mean {:.6}  sd {:.6}", law.mean(), law.std_dev());

    let mut sample = law.sample(200_000, 7);
    sample.sort_by(f64::total_cmp);
    let ecdf = |x: f64| sample.partition_point(|&v| v <= x) as f64 / sample.len() as f64;

    println!("{:>8} {:>12} {:>12} {:>12}", "x", "cdf", "ecdf", "density");
    for x in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
        let f = law.cdf(x, &cfg)?;
        let p = law.density(x, &cfg)?;
        println!("{x:>8.2} {f:>12.6} {:>12.6} {p:>12.6}", ecdf(x));
    }
    for p in [0.05, 0.5, 0.95] {
        let q = law.quantile(p, &cfg)?;
        println!("q({p}) = {q:.6}  back {:.6}", law.cdf(q, &cfg)?);
    }

    // dropping the small eigenvalues costs at most the tail bound
    let (head, tail) = law.truncate(2)?;
    let eps = 2.0;
    println!(
        "truncated to 2: cdf(4) {:.6}, tail prob(ε=2) ≤ {:.4}",
        head.cdf(4.0, &cfg)?,
        tail.prob(eps)
    );
    Ok(())
}
