//! The law of `‖ξ − a‖²` for a centred Gaussian `ξ` with finite spectrum.
//!
//! In the eigenbasis of the covariance this is a weighted non-central χ²,
//!
//! ```text
//! X = c₀ + Σ_j λ_j (Z_j − δ_j)²,   δ_j = a_j / √λ_j,   c₀ = Σ_{λ_j = 0} a_j²
//! ```
//!
//! with characteristic function
//! `f(t) = e^{itc₀} Π_j (1 − 2itλ_j)^{-1/2} exp(itλ_jδ_j² / (1 − 2itλ_j))`.
//! Distribution and density values come from Fourier inversion of `f`,
//! see [`InversionConfig`] for the available contours.

mod inversion;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::Spectrum;

pub use inversion::{Contour, Evaluation, GridPolicy, InversionConfig};

/// Weighted non-central χ² law. Only positive weights are stored; the
/// zero-variance coordinates live in `offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadFormLaw {
    weights: Vec<f64>,
    noncentrality: Vec<f64>,
    offset: f64,
}

impl QuadFormLaw {
    /// Law of `‖ξ − a‖²` where `ξ` has eigenvalues `s` and `shift` is `a`
    /// written in the same eigenbasis. A shorter shift is zero-padded; entries
    /// past the end of the spectrum act as zero-variance coordinates.
    pub fn from_gaussian(s: &Spectrum, shift: &[f64]) -> Self {
        let mut weights = Vec::new();
        let mut noncentrality = Vec::new();
        let mut offset = 0.0;
        let n = s.len().max(shift.len());
        for j in 0..n {
            let lam = s.values().get(j).copied().unwrap_or(0.0);
            let a = shift.get(j).copied().unwrap_or(0.0);
            if lam > 0.0 {
                weights.push(lam);
                noncentrality.push(a / lam.sqrt());
            } else {
                offset += a * a;
            }
        }
        QuadFormLaw { weights, noncentrality, offset }
    }

    /// Direct construction from the weighted χ² parameters.
    pub fn new(weights: Vec<f64>, noncentrality: Vec<f64>, offset: f64) -> Result<Self> {
        if weights.len() != noncentrality.len() {
            return Err(Error::domain(format!(
                "{} weights but {} noncentralities",
                weights.len(),
                noncentrality.len()
            )));
        }
        if !(offset.is_finite() && offset >= 0.0) {
            return Err(Error::domain(format!("offset must be finite and ≥ 0, got {offset}")));
        }
        if noncentrality.iter().any(|d| !d.is_finite()) {
            return Err(Error::domain("noncentrality must be finite"));
        }
        let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(weights.len());
        for (w, d) in weights.into_iter().zip(noncentrality) {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::domain(format!("weights must be finite and ≥ 0, got {w}")));
            }
            if w > 0.0 {
                pairs.push((w, d));
            } else if d != 0.0 {
                return Err(Error::domain("a zero weight cannot carry a noncentrality"));
            }
        }
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        Ok(QuadFormLaw {
            weights: pairs.iter().map(|p| p.0).collect(),
            noncentrality: pairs.iter().map(|p| p.1).collect(),
            offset,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn noncentrality(&self) -> &[f64] {
        &self.noncentrality
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Number of positive weights.
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// `‖a‖² = c₀ + Σ λ_j δ_j²`.
    pub fn shift_norm_sq(&self) -> f64 {
        self.offset + self.noncentral_part()
    }

    fn noncentral_part(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.noncentrality)
            .map(|(l, d)| l * d * d)
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.offset
            + self
                .weights
                .iter()
                .zip(&self.noncentrality)
                .map(|(l, d)| l * (1.0 + d * d))
                .sum::<f64>()
    }

    pub fn variance(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.noncentrality)
            .map(|(l, d)| 2.0 * l * l * (1.0 + 2.0 * d * d))
            .sum()
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// `Σ_j −½ log(1 − 2iλ_j z) + iλ_jδ_j²z / (1 − 2iλ_j z)`, the log of the
    /// characteristic function of `X − c₀`, continued to complex `z`.
    ///
    /// Uses principal logarithms, which is exact whenever every
    /// `1 − 2iλ_j z` stays in the closed lower half-plane along the path
    /// from the origin (true for real `z` and for `Im z ≤ 0`).
    pub(crate) fn log_cf_centred(&self, z: Complex64) -> Complex64 {
        let i = Complex64::i();
        let mut acc = Complex64::new(0.0, 0.0);
        for (&lam, &d) in self.weights.iter().zip(&self.noncentrality) {
            let w = Complex64::new(1.0, 0.0) - 2.0 * i * lam * z;
            acc -= 0.5 * w.ln();
            if d != 0.0 {
                acc += i * lam * d * d * z / w;
            }
        }
        acc
    }

    /// `E e^{itX}`.
    pub fn cf(&self, t: f64) -> Complex64 {
        let z = Complex64::new(t, 0.0);
        (self.log_cf_centred(z) + Complex64::new(0.0, t * self.offset)).exp()
    }

    /// `Π_j (1 + 4λ_j²t²)^{-1/4}`, which dominates `|cf(t)|`.
    pub fn cf_modulus_bound(&self, t: f64) -> f64 {
        cf_modulus_bound(&self.weights, t)
    }

    /// `P(X ≤ x)`.
    pub fn cdf(&self, x: f64, cfg: &InversionConfig) -> Result<f64> {
        Ok(self.cdf_many(&[x], cfg)?[0].cdf.unwrap_or(f64::NAN))
    }

    /// Density of `X` at `x`. Needs at least two positive weights.
    pub fn density(&self, x: f64, cfg: &InversionConfig) -> Result<f64> {
        Ok(self.density_many(&[x], cfg)?[0].density.unwrap_or(f64::NAN))
    }

    /// `cdf` at many points, sharing one contour discretisation.
    pub fn cdf_many(&self, xs: &[f64], cfg: &InversionConfig) -> Result<Vec<Evaluation>> {
        inversion::evaluate(self, xs, cfg, true, false)
    }

    pub fn density_many(&self, xs: &[f64], cfg: &InversionConfig) -> Result<Vec<Evaluation>> {
        self.require_density()?;
        inversion::evaluate(self, xs, cfg, false, true)
    }

    /// Both `cdf` and `density` at each point.
    pub fn evaluate_many(&self, xs: &[f64], cfg: &InversionConfig) -> Result<Vec<Evaluation>> {
        self.require_density()?;
        inversion::evaluate(self, xs, cfg, true, true)
    }

    fn require_density(&self) -> Result<()> {
        if self.dim() < 2 {
            return Err(Error::domain(format!(
                "density needs at least two positive weights, law has {}",
                self.dim()
            )));
        }
        Ok(())
    }

    /// Smallest `x` with `cdf(x) ≥ p`, by bisection on a bracket grown
    /// from `[c₀, mean + 10·sd]`.
    pub fn quantile(&self, p: f64, cfg: &InversionConfig) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!("quantile level must lie in (0, 1), got {p}")));
        }
        if self.dim() == 0 {
            return Ok(self.offset);
        }
        let mut lo = self.offset;
        let mut hi = self.mean() + 10.0 * self.std_dev();
        let mut grow = 0;
        while self.cdf(hi, cfg)? < p {
            lo = hi;
            hi = self.offset + 2.0 * (hi - self.offset);
            grow += 1;
            if grow > 60 {
                return Err(Error::numerical(
                    format!("could not bracket the {p} quantile"),
                    f64::NAN,
                ));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 1e-13 * hi.abs().max(1e-300) {
                break;
            }
            if self.cdf(mid, cfg)? < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// `n` independent draws `c₀ + Σ λ_j(Z_j − δ_j)²`, reproducible from `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let mut x = self.offset;
                for (&lam, &d) in self.weights.iter().zip(&self.noncentrality) {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    x += lam * (z - d) * (z - d);
                }
                x
            })
            .collect()
    }

    /// Keeps the `m` largest weights. The returned [`TailBound`] controls
    /// the discarded part `X − X_m ≥ 0`.
    pub fn truncate(&self, m: usize) -> Result<(QuadFormLaw, TailBound)> {
        if m == 0 {
            return Err(Error::domain("truncation must keep at least one coordinate"));
        }
        let m = m.min(self.dim());
        let kept = QuadFormLaw {
            weights: self.weights[..m].to_vec(),
            noncentrality: self.noncentrality[..m].to_vec(),
            offset: self.offset,
        };
        let tail = TailBound {
            weights: self.weights[m..].to_vec(),
            shift_sq: self.weights[m..]
                .iter()
                .zip(&self.noncentrality[m..])
                .map(|(l, d)| l * d * d)
                .sum(),
        };
        Ok((kept, tail))
    }

    /// Same law with every weight and the offset multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<QuadFormLaw> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::domain(format!("scale must be positive, got {c}")));
        }
        Ok(QuadFormLaw {
            weights: self.weights.iter().map(|w| w * c).collect(),
            noncentrality: self.noncentrality.clone(),
            offset: self.offset * c,
        })
    }
}

pub fn cf_modulus_bound(weights: &[f64], t: f64) -> f64 {
    weights
        .iter()
        .map(|l| (1.0 + 4.0 * l * l * t * t).powf(-0.25))
        .product()
}

/// Upper bound on `P(‖ξ_tail − a_tail‖ > ε)` for the coordinates discarded by
/// [`QuadFormLaw::truncate`].
#[derive(Debug, Clone, PartialEq)]
pub struct TailBound {
    weights: Vec<f64>,
    shift_sq: f64,
}

impl TailBound {
    /// `Σ_{j>m} λ_j`.
    pub fn trace(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ_{j>m} a_j²`.
    pub fn shift_sq(&self) -> f64 {
        self.shift_sq
    }

    /// Bound on `P(X − X_m > ε²)`.
    ///
    /// Without a tail shift this is a Chernoff bound on `‖ξ_tail‖² > ε²`.
    /// With a shift, `‖ξ − a‖² ≤ 2‖ξ‖² + 2‖a‖²` reduces it to
    /// `‖ξ_tail‖² > ε²/2 − ‖a_tail‖²`.
    pub fn prob(&self, eps: f64) -> f64 {
        if self.weights.is_empty() {
            return 0.0;
        }
        let t = if self.shift_sq > 0.0 {
            0.5 * eps * eps - self.shift_sq
        } else {
            eps * eps
        };
        if t <= 0.0 {
            return 1.0;
        }
        self.chernoff(t).min(1.0)
    }

    /// `min_μ e^{−μt} Π(1 − 2μλ_j)^{-1/2}`, together with the closed form at
    /// `μ = 1/(4L)`, which is at most `√2·e^{−t/(4L)}`.
    fn chernoff(&self, t: f64) -> f64 {
        let l = self.trace();
        let lmax = self.weights.iter().fold(0.0_f64, |m, v| m.max(*v));
        let log_bound = |mu: f64| -> f64 {
            -mu * t
                - 0.5
                    * self
                        .weights
                        .iter()
                        .map(|w| (1.0 - 2.0 * mu * w).ln())
                        .sum::<f64>()
        };
        let closed = log_bound(0.25 / l);
        // log_bound is convex in μ on (0, 1/(2λ_max)); golden-section search.
        let (mut a, mut b) = (0.0, 0.5 / lmax * (1.0 - 1e-12));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let (mut fc, mut fd) = (log_bound(c), log_bound(d));
        for _ in 0..100 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = log_bound(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = log_bound(d);
            }
        }
        closed.min(fc.min(fd)).exp()
    }
}
