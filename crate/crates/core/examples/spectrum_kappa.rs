//! Tail norms, regime and `κ(Σ)` for a few covariance spectra.
//!
//! cargo run --example spectrum_kappa

use ballprob::spectrum::{kappa_unified, Spectrum};

fn main() -> ballprob::Result<()> {
    let cases: [(&str, Vec<f64>); 4] = [
        ("identity p=5", vec![1.0; 5]),
        ("polynomial k^-2", (1..=200).map(|k| 1.0 / (k as f64).powi(2)).collect()),
        ("geometric 2^-k", (0..40).map(|k| 0.5f64.powi(k)).collect()),
        ("one dominant", vec![10.0, 0.01, 0.01]),
    ];
    for (name, v) in cases {
        let s = Spectrum::new(v)?;
        let t = s.tail_norms();
        println!(
            "{name:<18} Λ₁={:.4} Λ₂={:.4} regime={:<9} κ={:.4}",
            t.lambda1(),
            t.lambda2(),
            s.regime().as_str(),
            kappa_unified(&s),
        );
    }
    // a single positive eigenvalue has no finite κ
    println!("rank one          {:?}", Spectrum::new(vec![1.0])?.kappa().err());
    Ok(())
}
