//! The explicit constructions: degenerate band, three-dimensional lower
//! bound, the one-dimensional chain and the Hölder product integral.
//!
//! cargo run --release --example constructions

use ballprob::analysis::{self, ExperimentRecord};
use ballprob::quadform::InversionConfig;
use ballprob::spectrum::Spectrum;

fn show(r: &ExperimentRecord) {
    println!(
        "{:<16} observed {:.6e}  lower {:?}  upper {:?}  {:?}",
        r.name, r.observed, r.lower, r.upper, r.verdict
    );
}

fn main() -> ballprob::Result<()> {
    let cfg = InversionConfig::default();
    for eps in [0.1, 0.5, std::f64::consts::LN_2] {
        show(&analysis::degenerate_band(eps)?);
    }
    for eps in [0.5, 0.1, 0.01] {
        show(&analysis::r3_lower_bound(1.0, 1.0, 0.2, eps, &cfg)?);
    }
    show(&analysis::one_dim_bounds(1.0, 1.5, &cfg)?);
    let (d, x) = analysis::one_dim_exact(1.0, 1.5);
    println!("one-dim closed form {d:.8} at x*²={x:.6}");

    for a in [0.75, 1.0, 2.0] {
        println!("H({a}) = {:.8}", analysis::h_integral(a)?);
    }
    let h = analysis::holder_product_integral(&Spectrum::new(vec![1.0, 0.9, 0.8, 0.7, 0.3])?)?;
    println!(
        "hölder: integral {:.6}  τ={:.4}  q={:.3?}  bound {:.6}",
        h.integral, h.tau, h.q, h.holder_bound
    );
    Ok(())
}
