//! Exact Kolmogorov distance between two ball laws next to the comparison
//! bound, first for nearby spectra then for a pure shift.
//!
//! cargo run --release --example compare_laws

use ballprob::metrics;
use ballprob::quadform::InversionConfig;
use ballprob::spectrum::Spectrum;

fn main() -> ballprob::Result<()> {
    let cfg = InversionConfig::default();
    let sx = Spectrum::new((1..=30).map(|k| 1.0 / k as f64).collect())?;

    for scale in [1.01, 1.05, 1.2, 2.0] {
        let sy = sx.scaled(scale)?;
        let r = metrics::compare(&sx, &sy, &[], false, &cfg)?;
        println!(
            "scale {scale:<5} distance {:.6} at x={:.4}  bound {:.4}  ratio {:.4}",
            r.distance, r.argmax_x, r.bound.value, r.ratio
        );
    }
    for a in [0.05, 0.2, 0.5] {
        let r = metrics::compare(&sx, &sx, &[a], false, &cfg)?;
        println!("shift {a:<5} distance {:.6}  ratio {:.4}", r.distance, r.ratio);
    }
    Ok(())
}
