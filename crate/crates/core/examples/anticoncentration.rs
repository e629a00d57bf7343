//! Largest band probability `sup_x P(x ≤ ‖ξ − a‖² ≤ x + ε)` and the sup of
//! the density, both scaled by `κ`.
//!
//! cargo run --release --example anticoncentration

use ballprob::metrics::{sup_band, sup_density};
use ballprob::quadform::{InversionConfig, QuadFormLaw};
use ballprob::spectrum::{kappa_unified, Spectrum};

fn main() -> ballprob::Result<()> {
    let cfg = InversionConfig::default();
    for p in [3usize, 10, 50] {
        let s = Spectrum::identity(p);
        let k = kappa_unified(&s);
        let law = QuadFormLaw::from_gaussian(&s, &[]);
        let (d, at) = sup_density(&law, &cfg)?;
        println!("identity p={p:<3} κ={k:.4}  sup f={d:.5} at {at:.3}  f/κ={:.4}", d / k);
        for eps in [0.1, 1.0] {
            let (b, x) = sup_band(&law, eps, &cfg)?;
            println!("    ε={eps:<4} sup band {b:.5} at {x:.3}  /(κε)={:.4}", b / (k * eps));
        }
    }
    Ok(())
}
