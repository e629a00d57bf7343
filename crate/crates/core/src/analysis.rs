//! Executable versions of the tightness constructions, the integral lemmas
//! behind the density bound, and the seeded corpus used for ratio sweeps.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::metrics::{self, ComparisonResult};
use crate::quad;
use crate::quadform::{InversionConfig, QuadFormLaw};
use crate::spectrum::{Regime, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// One run of a construction: the observed quantity, the bound(s) it must
/// respect, and the verdict. With `constant = C` the checks are
/// `observed ≥ C·lower − tol` and `observed ≤ C·upper + tol`, where `tol`
/// absorbs inversion error in the observed value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub name: String,
    pub inputs: BTreeMap<String, f64>,
    pub observed: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub constant: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub extras: BTreeMap<String, f64>,
}

impl ExperimentRecord {
    pub fn new(name: &str, inputs: &[(&str, f64)], observed: f64) -> Self {
        ExperimentRecord {
            name: name.to_string(),
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            observed,
            lower: None,
            upper: None,
            constant: 1.0,
            tolerance: 0.0,
            verdict: Verdict::Pass,
            extras: BTreeMap::new(),
        }
    }

    pub fn with_lower(mut self, v: f64) -> Self {
        self.lower = Some(v);
        self.judge()
    }

    pub fn with_upper(mut self, v: f64) -> Self {
        self.upper = Some(v);
        self.judge()
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.constant = c;
        self.judge()
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self.judge()
    }

    pub fn extra(mut self, key: &str, v: f64) -> Self {
        self.extras.insert(key.to_string(), v);
        self
    }

    fn judge(mut self) -> Self {
        let (c, tol) = (self.constant, self.tolerance);
        let lo_ok = self.lower.is_none_or(|l| self.observed >= c * l - tol);
        let hi_ok = self.upper.is_none_or(|u| self.observed <= c * u + tol);
        self.verdict = Verdict::from_bool(lo_ok && hi_ok && self.observed.is_finite());
        self
    }
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2))
}

/// `H(a) = ∫₀^∞ (1 + t²)^{-(a+1/2)} dt`, integrated as `∫₀^∞ sech^{2a}(s) ds`
/// after `t = sinh s`.
pub fn h_integral(a: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain(format!("H(a) needs a > 0, got {a}")));
    }
    // sech^{2a} s ≤ 4^a e^{-2as}; cut where that tail drops below 1e-16.
    let end = (2.0 * a * LN_2 - (2.0 * a).ln() + 16.0 * 10f64.ln()).max(1.0) / (2.0 * a);
    let log_cosh = |s: f64| s + (-2.0 * s).exp().ln_1p() - LN_2;
    let f = |s: f64| (-2.0 * a * log_cosh(s)).exp();
    let est = quad::integrate(f, 0.0, end, 32, 1e-14 * (1.0 + 1.0 / a), 2_000_000)?;
    Ok(est.value)
}

/// The integral `∫₀^∞ Π_j (1 + λ_j² t²)^{-1/4} dt` together with the Hölder
/// exponents that bound it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderResult {
    pub integral: f64,
    pub tau: f64,
    pub q: Vec<f64>,
    /// `Π_j (H(q_j/4 − 1/2)/λ_j)^{1/q_j}`, the Hölder upper bound.
    pub holder_bound: f64,
    /// `Λ₁`.
    pub frobenius: f64,
}

pub fn holder_product_integral(s: &Spectrum) -> Result<HolderResult> {
    let lam: Vec<f64> = s.values().iter().copied().filter(|&v| v > 0.0).collect();
    let big_sq: f64 = lam.iter().map(|v| v * v).sum();
    if lam.is_empty() || 3.0 * lam[0] * lam[0] > big_sq {
        return Err(Error::condition(format!(
            "product integral needs 3λ₁² ≤ Λ₁², got λ₁ = {}, Λ₁² = {big_sq}",
            lam.first().copied().unwrap_or(0.0)
        )));
    }
    let lhs = |tau: f64| lam.iter().map(|l| l * l / (4.0 * tau + 2.0 * l * l)).sum::<f64>();
    let (mut lo, mut hi) = (0.0, big_sq / 4.0);
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        if lhs(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = 0.5 * (lo + hi);
    let q: Vec<f64> = lam.iter().map(|l| 4.0 * tau / (l * l) + 2.0).collect();
    let mut log_bound = 0.0;
    for (l, qj) in lam.iter().zip(&q) {
        log_bound += (h_integral(qj / 4.0 - 0.5)? / l).ln() / qj;
    }

    let p = lam.len() as f64;
    let big = big_sq.sqrt();
    // Below t0 the integrand is 1 to within 1e-20; past T the power-law
    // envelope Π (λ_j t)^{-1/2} leaves less than 1e-13/Λ₁.
    let t0 = 1e-10 / lam[0];
    let log_env: f64 = -0.5 * lam.iter().map(|l| l.ln()).sum::<f64>() - (p / 2.0 - 1.0).ln();
    let log_t = (log_env - (1e-13 / big).ln()) / (p / 2.0 - 1.0);
    let g = |u: f64| {
        let t = u.exp();
        let s: f64 = lam.iter().map(|l| (l * l * t * t).ln_1p()).sum();
        (u - 0.25 * s).exp()
    };
    let est = quad::integrate(g, t0.ln(), log_t.max(t0.ln() + 1.0), 64, 1e-13 / big, 2_000_000)?;
    Ok(HolderResult {
        integral: t0 + est.value,
        tau,
        q,
        holder_bound: log_bound.exp(),
        frobenius: big,
    })
}

fn central(w: Vec<f64>) -> Result<QuadFormLaw> {
    Ok(QuadFormLaw::from_gaussian(&Spectrum::new(w)?, &[]))
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::domain(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

/// Σ_ξ = diag(λ₁, λ₂, λ₃) against Σ_η = diag(λ₁, λ₂, λ₃(1+ε)), compared at
/// the single radius √R, R = 2λ₃.
pub fn r3_lower_bound(
    lam1: f64,
    lam2: f64,
    lam3: f64,
    eps: f64,
    cfg: &InversionConfig,
) -> Result<ExperimentRecord> {
    for (n, v) in [("λ₁", lam1), ("λ₂", lam2), ("λ₃", lam3)] {
        check_positive(n, v)?;
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(format!("ε must lie in (0, 1), got {eps}")));
    }
    let law_x = central(vec![lam1, lam2, lam3])?;
    let law_y = central(vec![lam1, lam2, lam3 * (1.0 + eps)])?;
    let r = 2.0 * lam3;
    let observed = (law_x.cdf(r, cfg)? - law_y.cdf(r, cfg)?).abs();
    let delta = eps * lam3;
    let lower = delta / (16.0 * (lam1 * lam2).sqrt()) * (-lam3 / lam1 - lam3 / lam2).exp();
    Ok(ExperimentRecord::new(
        "r3_lower_bound",
        &[("lam1", lam1), ("lam2", lam2), ("lam3", lam3), ("eps", eps)],
        observed,
    )
    .extra("radius", r.sqrt())
    .extra("nuclear_diff", delta)
    .with_lower(lower))
}

/// Exact 1-D distance `sup_x |P(ξ² ≤ x) − P(η² ≤ x)|` for `ξ ~ N(0, λ_X)`,
/// `η ~ N(0, λ_Y)`, and its maximiser in the squared-radius variable.
pub fn one_dim_exact(lam_x: f64, lam_y: f64) -> (f64, f64) {
    let (ls, lb) = if lam_x < lam_y { (lam_x, lam_y) } else { (lam_y, lam_x) };
    let x2 = ls * lb * (lb / ls).ln() / (lb - ls);
    let x = x2.sqrt();
    let d = 2.0 * (std_normal_cdf(x / ls.sqrt()) - std_normal_cdf(x / lb.sqrt()));
    (d, x2)
}

/// Sandwiches the numerically maximised 1-D distance between the two
/// explicit envelopes
/// `2Δ√λ_ξ e^{-1/2}/(√(2π)·s)` and `Δ√(λ_η/e)/s`,
/// `s = √(λ_ξλ_η)(√λ_ξ + √λ_η)`, `Δ = |λ_X − λ_Y|`, `λ_ξ < λ_η`.
pub fn one_dim_bounds(lam_x: f64, lam_y: f64, cfg: &InversionConfig) -> Result<ExperimentRecord> {
    check_positive("λ_X", lam_x)?;
    check_positive("λ_Y", lam_y)?;
    if lam_x == lam_y {
        return Err(Error::domain("one-dimensional sandwich needs λ_X ≠ λ_Y"));
    }
    let law_x = central(vec![lam_x])?;
    let law_y = central(vec![lam_y])?;
    let (observed, argmax) = metrics::kolmogorov_distance(&law_x, &law_y, cfg)?;
    let (exact, exact_arg) = one_dim_exact(lam_x, lam_y);

    let (ls, lb) = (lam_x.min(lam_y), lam_x.max(lam_y));
    let delta = lb - ls;
    let s = (ls * lb).sqrt() * (ls.sqrt() + lb.sqrt());
    let upper = delta * (lb / std::f64::consts::E).sqrt() / s;
    let lower = 2.0 * delta * ls.sqrt() * (-0.5f64).exp() / ((2.0 * PI).sqrt() * s);
    Ok(ExperimentRecord::new("one_dim_bounds", &[("lam_x", lam_x), ("lam_y", lam_y)], observed)
        .extra("argmax_x", argmax)
        .extra("exact", exact)
        .extra("exact_argmax_x", exact_arg)
        .with_lower(lower)
        .with_upper(upper))
}

/// `λ = (1, 0)`: the band `(0, ε)` of `Z²` carries `2Φ(√ε) − 1 ≥ √ε/(2√π)`.
pub fn degenerate_band(eps: f64) -> Result<ExperimentRecord> {
    if !(eps > 0.0 && eps <= LN_2) {
        return Err(Error::domain(format!("ε must lie in (0, log 2], got {eps}")));
    }
    let observed = 2.0 * std_normal_cdf(eps.sqrt()) - 1.0;
    let lower = eps.sqrt() / (2.0 * PI.sqrt());
    Ok(ExperimentRecord::new("degenerate_band", &[("eps", eps)], observed)
        .extra("argmax_x", 0.0)
        .with_lower(lower))
}

/// One corpus member: `‖ξ − a‖²` with `ξ ~ N(0, diag(sx))` against `‖η‖²`
/// with `η ~ N(0, diag(sy))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub id: usize,
    pub sx: Spectrum,
    pub sy: Spectrum,
    pub shift: Vec<f64>,
}

const REGIMES: [Regime; 3] = [Regime::HighDim, Regime::Spike, Regime::TwoDim];

fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    uniform(rng, lo.ln(), hi.ln()).exp()
}

/// Draws a spectrum of dimension 2–8 in the requested κ regime, at a random
/// overall scale in `[0.1, 10]`.
pub fn random_spectrum<R: Rng>(rng: &mut R, regime: Regime) -> Spectrum {
    loop {
        let mut v: Vec<f64> = match regime {
            Regime::HighDim => {
                let p = rng.random_range(3..=8);
                (0..p).map(|_| uniform(rng, 0.1, 1.0)).collect()
            }
            Regime::Spike => {
                let p = rng.random_range(5..=8);
                let mut tail: Vec<f64> = (0..p - 1).map(|_| uniform(rng, 0.2, 1.0)).collect();
                let top = tail.iter().fold(0.0_f64, |m, &x| m.max(x));
                tail.push(top * uniform(rng, 2.0, 5.0));
                tail
            }
            Regime::TwoDim => {
                let p = rng.random_range(2..=8);
                let mut v = vec![uniform(rng, 1.0, 3.0), uniform(rng, 1.0, 3.0)];
                v.extend((2..p).map(|_| uniform(rng, 0.0, 0.2)));
                v
            }
        };
        let scale = log_uniform(rng, 0.1, 10.0);
        v.iter_mut().for_each(|x| *x *= scale);
        let s = Spectrum::new(v).expect("generated eigenvalues are positive");
        if s.regime() == regime {
            return s;
        }
    }
}

/// The seeded comparison corpus. Instance `i` draws `sx` from regime
/// `i mod 3` on its own ChaCha stream, so any prefix of the corpus is
/// reproducible on its own.
pub fn corpus(seed: u64, n: usize) -> Vec<Instance> {
    (0..n).map(|i| corpus_instance(seed, i)).collect()
}

pub fn corpus_instance(seed: u64, id: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id as u64);
    let sx = random_spectrum(&mut rng, REGIMES[id % 3]);
    let sy = if rng.random_bool(0.25) {
        let other = REGIMES[rng.random_range(0..3)];
        random_spectrum(&mut rng, other)
    } else {
        let s = log_uniform(&mut rng, 1e-3, 0.5);
        let v = sx
            .values()
            .iter()
            .map(|&x| {
                let z: f64 = rng.sample(StandardNormal);
                x * (s * z).exp()
            })
            .collect();
        Spectrum::new(v).expect("perturbed eigenvalues are positive")
    };
    let shift = if rng.random_bool(0.25) {
        Vec::new()
    } else {
        let u: f64 = rng.random();
        let norm_sq = 2.0 * sx.trace() * u * u;
        let dir: Vec<f64> = (0..sx.len()).map(|_| rng.sample(StandardNormal)).collect();
        let len = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
        dir.iter().map(|d| d / len * norm_sq.sqrt()).collect()
    };
    Instance { id, sx, sy, shift }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub instance_id: usize,
    pub regime_x: Regime,
    pub regime_y: Regime,
    pub result: ComparisonResult,
}

/// Compares every instance of a corpus in parallel; order follows the corpus.
pub fn sweep_instances(instances: &[Instance], cfg: &InversionConfig) -> Result<Vec<SweepRecord>> {
    instances
        .par_iter()
        .map(|inst| {
            let result = metrics::compare(&inst.sx, &inst.sy, &inst.shift, false, cfg)?;
            Ok(SweepRecord {
                instance_id: inst.id,
                regime_x: inst.sx.regime(),
                regime_y: inst.sy.regime(),
                result,
            })
        })
        .collect()
}

pub fn ratio_sweep(corpus_seed: u64, n_instances: usize, cfg: &InversionConfig) -> Result<Vec<SweepRecord>> {
    if n_instances == 0 {
        return Err(Error::domain("ratio sweep needs at least one instance"));
    }
    sweep_instances(&corpus(corpus_seed, n_instances), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::ln_gamma;

    fn beta_oracle(a: f64) -> f64 {
        // ½·B(½, a)
        0.5 * (ln_gamma(0.5) + ln_gamma(a) - ln_gamma(a + 0.5)).exp()
    }

    #[test]
    fn h_closed_forms() {
        assert_close!(h_integral(1.0).unwrap(), 1.0, 1e-12);
        assert_close!(h_integral(2.0).unwrap(), 2.0 / 3.0, 1e-12);
        assert_close!(h_integral(3.0).unwrap(), 8.0 / 15.0, 1e-12);
        for a in [0.05, 0.3, 1.7, 4.0, 25.0] {
            assert_close!(h_integral(a).unwrap(), beta_oracle(a), 1e-10 * beta_oracle(a));
        }
    }

    #[test]
    fn h_recurrence_and_small_a() {
        for a in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
            let r = h_integral(a + 1.0).unwrap() - a / (a + 0.5) * h_integral(a).unwrap();
            assert!(r.abs() <= 1e-8, "a = {a}: residual {r:e}");
        }
        for i in 1..=100 {
            let a = i as f64 / 100.0;
            assert!(a * h_integral(a).unwrap() <= 1.5);
        }
        assert!(h_integral(0.0).is_err());
    }

    #[test]
    fn holder_equal_weights() {
        let r = holder_product_integral(&Spectrum::identity(3)).unwrap();
        assert_close!(r.tau, 0.25, 1e-12);
        r.q.iter().for_each(|&q| assert_close!(q, 3.0, 1e-11));
        // p = 4: ∫ (1+t²)^{-1} = π/2.
        let r4 = holder_product_integral(&Spectrum::identity(4)).unwrap();
        assert_close!(r4.integral, PI / 2.0, 1e-10);
        assert_close!(r4.tau, 0.5, 1e-12);
        let mut prev = f64::INFINITY;
        for p in 3..=50 {
            let r = holder_product_integral(&Spectrum::identity(p)).unwrap();
            let scaled = r.integral * (p as f64).sqrt();
            assert!(scaled < 5.0, "p = {p}: {scaled}");
            assert!(r.integral <= r.holder_bound * (1.0 + 1e-10));
            assert!(r.integral < prev);
            prev = r.integral;
        }
    }

    #[test]
    fn holder_hypothesis() {
        let e = holder_product_integral(&Spectrum::new(vec![4.0, 1.0]).unwrap()).unwrap_err();
        assert_eq!(e.kind(), "ConditionError");
        let r = holder_product_integral(&Spectrum::new(vec![1.0, 0.9, 0.8, 0.7, 0.3]).unwrap()).unwrap();
        assert!(r.q.iter().all(|&q| q >= 3.0 - 1e-12));
        assert_close!(r.q.iter().map(|q| 1.0 / q).sum::<f64>(), 1.0, 1e-11);
        assert!(r.integral <= r.holder_bound);
    }

    #[test]
    fn r3_examples() {
        let cfg = InversionConfig::default();
        let rec = r3_lower_bound(1.0, 1.0, 1.0, 0.1, &cfg).unwrap();
        assert_close!(rec.lower.unwrap(), 0.1 / 16.0 * (-2.0f64).exp(), 1e-15);
        assert!(rec.verdict.passed(), "{rec:?}");
        assert!(r3_lower_bound(2.0, 1.0, 0.5, 0.2, &cfg).unwrap().verdict.passed());
        let tiny = r3_lower_bound(1.0, 1.0, 1.0, 1e-4, &cfg).unwrap();
        assert!(tiny.observed < 1e-3 && tiny.verdict.passed());
        assert!(r3_lower_bound(1.0, 1.0, 1.0, 1.0, &cfg).is_err());
    }

    #[test]
    fn one_dim_examples() {
        let cfg = InversionConfig::default();
        let rec = one_dim_bounds(1.0, 4.0, &cfg).unwrap();
        assert!(rec.verdict.passed(), "{rec:?}");
        assert_close!(rec.observed, rec.extras["exact"], 3e-6);
        assert_close!(rec.extras["exact_argmax_x"], 4.0 * 4f64.ln() / 3.0, 1e-12);
        let near = one_dim_bounds(1.0, 1.01, &cfg).unwrap();
        assert!(near.verdict.passed());
        let r = near.observed * 1.01 / 0.01;
        assert!(r > 0.1 && r < 0.5, "{r}");
        assert!(one_dim_bounds(2.0, 2.0, &cfg).is_err());
    }

    #[test]
    fn degenerate_examples() {
        let r = degenerate_band(0.25).unwrap();
        assert_close!(r.observed, 0.382924922548026, 1e-12);
        assert_close!(r.lower.unwrap(), 0.141047395886939, 1e-12);
        assert!(r.verdict.passed());
        let r = degenerate_band(LN_2).unwrap();
        assert_close!(r.observed, 0.594904033528887, 1e-12);
        assert_close!(r.lower.unwrap(), 0.234859319674913, 1e-12);
        let e = 1e-10;
        assert_close!(degenerate_band(e).unwrap().observed / e.sqrt(), (2.0 / PI).sqrt(), 1e-8);
        assert!(degenerate_band(0.7).is_err());
        // agrees with the inverted law
        let law = central(vec![1.0]).unwrap();
        let band = metrics::band_probability(&law, 0.0, 0.25, &InversionConfig::default()).unwrap();
        assert_close!(band, 0.382924922548026, 1e-7);
    }

    #[test]
    fn corpus_is_deterministic_and_regime_tagged() {
        let a = corpus(7, 30);
        let b = corpus(7, 30);
        assert_eq!(a, b);
        assert_eq!(corpus_instance(7, 17), a[17]);
        for inst in &a {
            assert_eq!(inst.sx.regime(), REGIMES[inst.id % 3]);
            assert!((2..=8).contains(&inst.sx.len()));
            let n2: f64 = inst.shift.iter().map(|x| x * x).sum();
            assert!(n2 <= 2.0 * inst.sx.trace() * (1.0 + 1e-12));
        }
        assert_ne!(corpus(8, 3), a[..3].to_vec());
    }
}
