//! Ratio sweep over the seeded corpus: prints the worst ratio per regime
//! pair and the overall maximum.
//!
//! cargo run --release --example ratio_sweep -- [n_instances] [seed]

use std::collections::BTreeMap;
use std::time::Instant;

use ballprob::analysis;
use ballprob::calibration::CORPUS_SEED;
use ballprob::quadform::InversionConfig;

fn main() -> ballprob::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(1000, |s| s.parse().expect("instance count"));
    let seed: u64 = args.next().map_or(CORPUS_SEED, |s| s.parse().expect("seed"));

    let t = Instant::now();
    let rows = analysis::ratio_sweep(seed, n, &InversionConfig::default())?;
    let mut worst: BTreeMap<(String, String), (f64, usize)> = BTreeMap::new();
    for r in &rows {
        let key = (r.regime_x.to_string(), r.regime_y.to_string());
        let e = worst.entry(key).or_insert((0.0, r.instance_id));
        if r.result.ratio > e.0 {
            *e = (r.result.ratio, r.instance_id);
        }
    }
    for ((rx, ry), (ratio, id)) in &worst {
        println!("{rx:>8} vs {ry:<8} max ratio {ratio:.4} (instance {id})");
    }
    let max = rows.iter().map(|r| r.result.ratio).fold(0.0, f64::max);
    println!("{n} instances, max ratio {max:.6}, {:.1}s", t.elapsed().as_secs_f64());
    Ok(())
}
