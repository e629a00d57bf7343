//! Calibration run behind the constants in `ballprob::calibration`.
//!
//! Prints the largest observed ratio for every `≲` relation the crate checks,
//! over the reference corpus and the Bayes scenario suite.
//!
//! cargo run --release --example calibrate

use std::time::Instant;

use ballprob::analysis::{self, corpus};
use ballprob::bayesdemo;
use ballprob::calibration::CORPUS_SEED;
use ballprob::metrics;
use ballprob::quadform::{InversionConfig, QuadFormLaw};
use ballprob::spectrum::{Regime, Spectrum};

const N: usize = 1000;

fn main() -> ballprob::Result<()> {
    let cfg = InversionConfig::default();
    let t = Instant::now();
    let inst = corpus(CORPUS_SEED, N);

    let rows = analysis::sweep_instances(&inst, &cfg)?;
    let main = rows.iter().map(|r| r.result.ratio).fold(0.0, f64::max);
    println!("comparison  max distance/bound        {main:.6}");

    for eps in [0.01, 0.1, 0.5] {
        let mut worst = 0.0_f64;
        for i in &inst {
            let law = QuadFormLaw::from_gaussian(&i.sx, &i.shift);
            let (b, _) = metrics::sup_band(&law, eps, &cfg)?;
            worst = worst.max(b / (i.sx.kappa()? * eps));
        }
        println!("band        max sup_band/(κε), ε={eps:<4} {worst:.6}");
    }

    let mut dens = 0.0_f64;
    for i in &inst {
        let law = QuadFormLaw::from_gaussian(&i.sx, &i.shift);
        let (d, _) = metrics::sup_density(&law, &cfg)?;
        dens = dens.max(d / i.sx.kappa()?);
    }
    println!("density     max sup p/κ               {dens:.6}");

    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for p in 3..=50 {
        let law = QuadFormLaw::from_gaussian(&Spectrum::identity(p), &[]);
        let v = metrics::sup_density(&law, &cfg)?.0 * (p as f64).sqrt();
        lo = lo.min(v);
        hi = hi.max(v);
    }
    println!("identity    sup p·√p over p=3..50     [{lo:.6}, {hi:.6}]");

    let mut lemma = 0.0_f64;
    let mut count = 0;
    for i in &inst {
        for s in [&i.sx, &i.sy] {
            if s.regime() == Regime::HighDim {
                let r = analysis::holder_product_integral(s)?;
                lemma = lemma.max(r.integral * r.frobenius);
                count += 1;
            }
        }
    }
    for p in 3..=50 {
        let r = analysis::holder_product_integral(&Spectrum::identity(p))?;
        lemma = lemma.max(r.integral * r.frobenius);
    }
    println!("lemma       max integral·Λ₁ ({count} spectra) {lemma:.6}");

    let mut bayes = 0.0_f64;
    for sc in bayesdemo::scenario_suite() {
        let (a, b) = sc.run(&cfg)?;
        for rec in [a, b] {
            bayes = bayes.max(metrics::ratio(rec.observed, rec.extras["rhs"]));
        }
    }
    let (ill, _) = bayesdemo::ill_conditioned_scenario().run(&cfg)?;
    println!("bayes       max observed/rhs          {bayes:.6}");
    println!(
        "ill-cond    observed {:.3e} rhs {:.3e} pinsker {:.3e}",
        ill.observed, ill.extras["rhs"], ill.extras["pinsker"]
    );
    println!("{:.1}s", t.elapsed().as_secs_f64());
    Ok(())
}
