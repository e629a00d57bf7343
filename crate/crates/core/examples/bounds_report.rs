//! Every closed-form bound the crate evaluates, with its ingredients.
//!
//! cargo run --example bounds_report

use ballprob::bounds::{self, BoundReport};
use ballprob::quadform::QuadFormLaw;
use ballprob::spectrum::Spectrum;

fn show(r: &BoundReport) {
    print!("{:<28} {:>12.6e}", r.formula_id, r.value);
    for (k, v) in &r.ingredients {
        print!("  {k}={v:.4}");
    }
    println!();
}

fn main() -> ballprob::Result<()> {
    let sx = Spectrum::new(vec![1.0, 0.6, 0.3, 0.1])?;
    let sy = Spectrum::new(vec![1.1, 0.5, 0.3, 0.15])?;
    let a2 = 0.04;

    show(&bounds::comparison_bound(&sx, &sy, a2)?);
    show(&bounds::comparison_bound_lambda12(&sx, &sy, a2)?);
    // the Frobenius form asks for a flat enough top of the spectrum
    let fx = Spectrum::new(vec![1.0, 0.9, 0.8, 0.7, 0.6])?;
    let fy = Spectrum::new(vec![1.0, 0.95, 0.8, 0.7, 0.5])?;
    show(&bounds::comparison_bound_frobenius(&fx, &fy, a2)?);
    show(&bounds::anticoncentration_bound(&sx, 0.1)?);
    show(&bounds::density_uniform_bound(&sx)?);

    let law = QuadFormLaw::from_gaussian(&sx, &[0.2, 0.0, 0.0, 0.0]);
    show(&bounds::density_nonuniform_bound(&law, 1.5, None)?);
    Ok(())
}
