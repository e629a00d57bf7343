//! Linear Gaussian Bayes: the effect of swapping the prior on a credible
//! ball, and the frequentist coverage of a nonparametric credible set.
//!
//! Observations are `Y = f* + σε ∈ ℝⁿ` with design `Ψ ∈ ℝ^{p×n}` and the
//! Gaussian prior `θ ~ N(0, G^{-2})`, so that
//! `θ | Y ~ N(θ̆_G, D_G^{-2})` with `D_G² = σ^{-2}ΨΨᵀ + G²`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::ExperimentRecord;
use crate::bounds;
use crate::error::{Error, Result};
use crate::linalg;
use crate::quadform::{InversionConfig, QuadFormLaw};
use crate::spectrum::{self, Spectrum};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearGaussianModel {
    /// `Ψ`, `p × n`.
    pub design: DMatrix<f64>,
    pub noise_var: f64,
    pub response: DVector<f64>,
    pub truth: DVector<f64>,
}

impl LinearGaussianModel {
    /// Without a response, one is drawn as `truth + σε` from `seed`.
    pub fn new(
        design: DMatrix<f64>,
        noise_var: f64,
        response: Option<DVector<f64>>,
        truth: DVector<f64>,
        seed: u64,
    ) -> Result<Self> {
        let n = design.ncols();
        if !(noise_var > 0.0 && noise_var.is_finite()) {
            return Err(Error::domain(format!("noise variance must be positive, got {noise_var}")));
        }
        if truth.len() != n {
            return Err(Error::domain(format!("truth has length {}, design has {n} columns", truth.len())));
        }
        let response = match response {
            Some(y) if y.len() != n => {
                return Err(Error::domain(format!("response has length {}, expected {n}", y.len())))
            }
            Some(y) => y,
            None => &truth + gaussian_vector(n, &mut ChaCha8Rng::seed_from_u64(seed)) * noise_var.sqrt(),
        };
        Ok(LinearGaussianModel { design, noise_var, response, truth })
    }

    pub fn p(&self) -> usize {
        self.design.nrows()
    }

    pub fn n(&self) -> usize {
        self.design.ncols()
    }

    /// `ΨΨᵀ + σ²G²`.
    fn normal_matrix(&self, g_sq: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let p = self.p();
        if g_sq.shape() != (p, p) {
            return Err(Error::domain(format!("G² must be {p}x{p}, got {}x{}", g_sq.nrows(), g_sq.ncols())));
        }
        linalg::check_symmetric(g_sq, spectrum::PSD_TOL)?;
        Ok(&self.design * self.design.transpose() + g_sq * self.noise_var)
    }

    /// `Π_G = Ψᵀ(ΨΨᵀ + σ²G²)^{-1}Ψ`, `n × n`.
    pub fn hat_matrix(&self, g_sq: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let chol = cholesky(self.normal_matrix(g_sq)?)?;
        Ok(self.design.transpose() * chol.solve(&self.design))
    }
}

fn gaussian_vector<R: rand::Rng>(n: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

fn cholesky(m: DMatrix<f64>) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    let m = (&m + m.transpose()) * 0.5;
    nalgebra::Cholesky::new(m).ok_or_else(|| Error::domain("ΨΨᵀ + σ²G² is singular"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    /// `θ̆_G`.
    pub mean: DVector<f64>,
    /// `D_G²`.
    pub precision: DMatrix<f64>,
}

impl Posterior {
    /// `W D_G^{-2} Wᵀ`.
    pub fn projected_cov(&self, w: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if w.ncols() != self.mean.len() {
            return Err(Error::domain(format!(
                "W has {} columns, parameter dimension is {}",
                w.ncols(),
                self.mean.len()
            )));
        }
        let chol = cholesky(self.precision.clone())?;
        let c = w * chol.solve(&w.transpose());
        Ok((&c + c.transpose()) * 0.5)
    }
}

pub fn posterior(model: &LinearGaussianModel, g_sq: &DMatrix<f64>) -> Result<Posterior> {
    let a = model.normal_matrix(g_sq)?;
    let rhs = &model.design * &model.response;
    let mean = cholesky(a.clone())?.solve(&rhs);
    let resid = (&a * &mean - &rhs).norm();
    if resid > 1e-8 * rhs.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::numerical("posterior mean solve is inaccurate", resid));
    }
    let precision = &model.design * model.design.transpose() / model.noise_var + g_sq;
    Ok(Posterior { mean, precision })
}

/// `r` with `P(‖ξ_G‖ ≥ r) = α` for `ξ_G ~ N(0, Σ_G)`.
pub fn credible_radius(sigma_g: &Spectrum, alpha: f64, cfg: &InversionConfig) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("α must lie in (0, 1), got {alpha}")));
    }
    let law = QuadFormLaw::from_gaussian(sigma_g, &[]);
    Ok(law.quantile(1.0 - alpha, cfg)?.sqrt())
}

/// `P(‖ξ + a‖ ≥ r)` for `ξ ~ N(0, S)`.
fn exceedance(s: &DMatrix<f64>, a: &DVector<f64>, r: f64, cfg: &InversionConfig) -> Result<f64> {
    let (spec, shift) = spectrum::spectrum_of_matrix(s, a.as_slice())?;
    let law = QuadFormLaw::from_gaussian(&spec, &shift);
    Ok(1.0 - law.cdf(r * r, cfg)?)
}

fn psd_ordered(lo: &DMatrix<f64>, hi: &DMatrix<f64>) -> bool {
    let scale = linalg::operator_norm_sym(hi).max(linalg::operator_norm_sym(lo)).max(1e-300);
    linalg::min_eigenvalue(&(hi - lo)) >= -1e-9 * scale
}

/// The prior `G₁²` replaced by `G²`: how far the `G`-credible ball
/// `{θ : ‖W(θ − θ̆_G)‖ ≤ r_G}` is from level `1 − α` under the `G₁` posterior,
/// against `(tr Σ_{G₁} − tr Σ_G + ‖a‖²)/‖Σ_G‖_Fr`, `a = W(θ̆_{G₁} − θ̆_G)`.
///
/// Needs `G² ≥ G₁²`. Otherwise the trace difference is replaced by the
/// nuclear distance of the spectra and the record carries `psd_order = 0`.
pub fn prior_impact(
    model: &LinearGaussianModel,
    g_sq: &DMatrix<f64>,
    g1_sq: &DMatrix<f64>,
    w: &DMatrix<f64>,
    alpha: f64,
    cfg: &InversionConfig,
) -> Result<ExperimentRecord> {
    let post = posterior(model, g_sq)?;
    let post1 = posterior(model, g1_sq)?;
    let sig = post.projected_cov(w)?;
    let sig1 = post1.projected_cov(w)?;
    let (spec_g, _) = spectrum::spectrum_of_matrix(&sig, &[])?;
    let (spec_g1, _) = spectrum::spectrum_of_matrix(&sig1, &[])?;
    let r = credible_radius(&spec_g, alpha, cfg)?;
    let a = w * (&post1.mean - &post.mean);
    let prob = exceedance(&sig1, &a, r, cfg)?;
    let observed = (prob - alpha).abs();

    let ordered = psd_ordered(g1_sq, g_sq);
    let trace_diff = sig1.trace() - sig.trace();
    let nuclear = spectrum::nuclear_diff(&spec_g, &spec_g1);
    let spread = if ordered { trace_diff } else { nuclear };
    let fro = linalg::frobenius(&sig);
    let rhs = bounds_ratio(spread + a.norm_squared(), fro);
    let pinsker = bounds::pinsker_baseline(&sig, &sig1, a.as_slice())
        .map(|b| b.value)
        .unwrap_or(f64::INFINITY);
    let c = crate::calibration::C_EMP;
    Ok(ExperimentRecord::new("prior_impact", &[("alpha", alpha), ("n", model.n() as f64), ("p", model.p() as f64)], observed)
        .extra("radius", r)
        .extra("exceedance", prob)
        .extra("trace_diff", trace_diff)
        .extra("nuclear_diff", nuclear)
        .extra("shift_norm_sq", a.norm_squared())
        .extra("frobenius", fro)
        .extra("rhs", rhs)
        .extra("pinsker", pinsker)
        .extra("psd_order", if ordered { 1.0 } else { 0.0 })
        .with_upper(rhs)
        .with_constant(c)
        .with_tolerance(3.0 * cfg.abs_tol))
}

fn bounds_ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den > 0.0 {
        num / den
    } else {
        f64::INFINITY
    }
}

/// Frequentist miss probability `P(f* ∉ E_G(r_G))` of the credible set
/// `E_G(r) = {f : ‖A(f − Π_G Y)‖ ≤ r}` minus `α`, against
/// `(tr Σ_G − tr Σ + ‖a‖²)/‖Σ‖_Fr` with `a = A(I − Π_G)f*`,
/// `Σ = σ²AΠ_G²Aᵀ` and `Σ_G = σ²AΠ_GAᵀ`.
pub fn np_bayes_coverage(
    model: &LinearGaussianModel,
    g_sq: &DMatrix<f64>,
    a_mat: &DMatrix<f64>,
    alpha: f64,
    cfg: &InversionConfig,
) -> Result<ExperimentRecord> {
    let n = model.n();
    if a_mat.ncols() != n {
        return Err(Error::domain(format!("A has {} columns, expected {n}", a_mat.ncols())));
    }
    let pi = model.hat_matrix(g_sq)?;
    let s2 = model.noise_var;
    let sym = |m: DMatrix<f64>| (&m + m.transpose()) * 0.5;
    let sig_g = sym(a_mat * &pi * a_mat.transpose() * s2);
    let sig = sym(a_mat * &pi * &pi * a_mat.transpose() * s2);
    let shift = a_mat * (DMatrix::identity(n, n) - &pi) * &model.truth;
    let (spec_g, _) = spectrum::spectrum_of_matrix(&sig_g, &[])?;
    let r = credible_radius(&spec_g, alpha, cfg)?;
    let miss = exceedance(&sig, &shift, r, cfg)?;
    let observed = (miss - alpha).abs();

    let trace_diff = sig_g.trace() - sig.trace();
    let (spec, _) = spectrum::spectrum_of_matrix(&sig, &[])?;
    let nuclear = spectrum::nuclear_diff(&spec, &spec_g);
    let fro = linalg::frobenius(&sig);
    let rhs = bounds_ratio(trace_diff.max(0.0) + shift.norm_squared(), fro);
    Ok(ExperimentRecord::new("np_bayes_coverage", &[("alpha", alpha), ("n", n as f64), ("p", model.p() as f64)], observed)
        .extra("radius", r)
        .extra("miss_probability", miss)
        .extra("trace_diff", trace_diff)
        .extra("nuclear_diff", nuclear)
        .extra("shift_norm_sq", shift.norm_squared())
        .extra("frobenius", fro)
        .extra("rhs", rhs)
        .extra("psd_order", if psd_ordered(&sig, &sig_g) { 1.0 } else { 0.0 })
        .with_upper(rhs)
        .with_constant(crate::calibration::C_EMP)
        .with_tolerance(3.0 * cfg.abs_tol))
}

/// Monte Carlo estimate of `P(‖W(ϑ − θ̆_G)‖ ≥ r)` with `ϑ` drawn from the
/// `G₁` posterior.
pub fn prior_impact_monte_carlo(
    model: &LinearGaussianModel,
    g_sq: &DMatrix<f64>,
    g1_sq: &DMatrix<f64>,
    w: &DMatrix<f64>,
    r: f64,
    reps: usize,
    seed: u64,
) -> Result<f64> {
    let post = posterior(model, g_sq)?;
    let post1 = posterior(model, g1_sq)?;
    let cov = cholesky(post1.precision.clone())?.inverse();
    let l = cholesky(cov)?.l();
    let base = w * (&post1.mean - &post.mean);
    let wl = w * l;
    let hits = count_parallel(reps, seed, |rng| {
        let z = gaussian_vector(wl.ncols(), rng);
        (&base + &wl * z).norm() >= r
    });
    Ok(hits as f64 / reps as f64)
}

/// Monte Carlo estimate of `P(‖A(f* − Π_G Y)‖ > r)` over fresh noise.
pub fn coverage_monte_carlo(
    model: &LinearGaussianModel,
    g_sq: &DMatrix<f64>,
    a_mat: &DMatrix<f64>,
    r: f64,
    reps: usize,
    seed: u64,
) -> Result<f64> {
    let pi = model.hat_matrix(g_sq)?;
    let sd = model.noise_var.sqrt();
    let n = model.n();
    let hits = count_parallel(reps, seed, |rng| {
        let y = &model.truth + gaussian_vector(n, rng) * sd;
        (a_mat * (&model.truth - &pi * y)).norm() > r
    });
    Ok(hits as f64 / reps as f64)
}

/// Counts successes over `reps` trials split into fixed chunks, each with its
/// own ChaCha stream, so the total does not depend on the thread count.
fn count_parallel<F>(reps: usize, seed: u64, trial: F) -> usize
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    const CHUNK: usize = 4096;
    (0..reps.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(reps - c * CHUNK);
            (0..len).filter(|_| trial(&mut rng)).count()
        })
        .sum()
}

/// Prior precision given either as a scalar multiple of the identity or as
/// the diagonal of `G²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriorSpec {
    Scalar(f64),
    Diagonal(Vec<f64>),
}

impl PriorSpec {
    pub fn matrix(&self, p: usize) -> Result<DMatrix<f64>> {
        let diag = match self {
            PriorSpec::Scalar(g) => vec![*g; p],
            PriorSpec::Diagonal(d) if d.len() == p => d.clone(),
            PriorSpec::Diagonal(d) => {
                return Err(Error::domain(format!("prior diagonal has length {}, expected {p}", d.len())))
            }
        };
        if diag.iter().any(|g| !(*g >= 0.0 && g.is_finite())) {
            return Err(Error::domain("prior precision must be finite and ≥ 0"));
        }
        Ok(DMatrix::from_diagonal(&DVector::from_vec(diag)))
    }
}

fn default_decay() -> f64 {
    1.0
}

/// A synthetic Bayes scenario: design `Ψ = U diag(√n·j^{-β}) Vᵀ` with random
/// orthogonal `U` and orthonormal `V` drawn from `design_seed`, truth
/// `f* = Ψᵀθ*` with `θ*_j = j^{-1}`, and priors `G²`, `G₁²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub n: usize,
    pub p: usize,
    pub sigma2: f64,
    pub design_seed: u64,
    #[serde(rename = "G_spec")]
    pub g_spec: PriorSpec,
    #[serde(rename = "G1_spec")]
    pub g1_spec: PriorSpec,
    pub alpha: f64,
    #[serde(default = "default_decay")]
    pub decay: f64,
}

/// `n × k` matrix with orthonormal columns.
fn random_orthonormal<R: rand::Rng>(n: usize, k: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, k, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    // fix column signs so the draw does not depend on the QR convention
    let mut q = q.columns(0, k).into_owned();
    for j in 0..k {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.n < self.p {
            return Err(Error::domain(format!("need 1 ≤ p ≤ n, got p = {}, n = {}", self.p, self.n)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::domain(format!("α must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.decay >= 0.0 && self.decay.is_finite()) {
            return Err(Error::domain("design decay must be ≥ 0"));
        }
        Ok(())
    }

    pub fn model(&self) -> Result<LinearGaussianModel> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.design_seed);
        let u = random_orthonormal(self.p, self.p, &mut rng);
        let v = random_orthonormal(self.n, self.p, &mut rng);
        let sv = DVector::from_fn(self.p, |j, _| (self.n as f64).sqrt() * ((j + 1) as f64).powf(-self.decay));
        let design = u * DMatrix::from_diagonal(&sv) * v.transpose();
        let theta = DVector::from_fn(self.p, |j, _| 1.0 / (j + 1) as f64);
        let truth = design.transpose() * theta;
        LinearGaussianModel::new(design, self.sigma2, None, truth, self.design_seed.wrapping_add(1))
    }

    pub fn g_sq(&self) -> Result<DMatrix<f64>> {
        self.g_spec.matrix(self.p)
    }

    pub fn g1_sq(&self) -> Result<DMatrix<f64>> {
        self.g1_spec.matrix(self.p)
    }

    /// Both demos with `W = I_p` and `A = I_n`.
    pub fn run(&self, cfg: &InversionConfig) -> Result<(ExperimentRecord, ExperimentRecord)> {
        let model = self.model()?;
        let (g, g1) = (self.g_sq()?, self.g1_sq()?);
        let impact = prior_impact(&model, &g, &g1, &DMatrix::identity(self.p, self.p), self.alpha, cfg)?;
        let coverage = np_bayes_coverage(&model, &g, &DMatrix::identity(self.n, self.n), self.alpha, cfg)?;
        Ok((impact, coverage))
    }
}

/// The seeded scenario suite used for calibration and regression.
pub fn scenario_suite() -> Vec<Scenario> {
    let mut out = Vec::new();
    let mut seed = crate::calibration::CORPUS_SEED;
    for &(n, p) in &[(20, 5), (40, 8), (60, 3)] {
        for &(g, g1) in &[(1.0, 0.5), (2.0, 1.0), (0.2, 0.1), (5.0, 0.0)] {
            for &alpha in &[0.05, 0.1] {
                seed += 1;
                out.push(Scenario {
                    n,
                    p,
                    sigma2: 1.0,
                    design_seed: seed,
                    g_spec: PriorSpec::Scalar(g),
                    g1_spec: PriorSpec::Scalar(g1),
                    alpha,
                    decay: 1.0,
                });
            }
        }
    }
    out
}

/// Strong prior on a barely identified direction: `Σ_G` is nearly singular
/// there while `Σ_{G₁}` is not, so the whitened Pinsker bound explodes.
pub fn ill_conditioned_scenario() -> Scenario {
    Scenario {
        n: 20,
        p: 5,
        sigma2: 1.0,
        design_seed: crate::calibration::CORPUS_SEED,
        g_spec: PriorSpec::Diagonal(vec![1.0, 1.0, 1.0, 1.0, 1e6]),
        g1_spec: PriorSpec::Diagonal(vec![1.0, 1.0, 1.0, 1.0, 1.0]),
        alpha: 0.05,
        decay: 3.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> InversionConfig {
        InversionConfig::default()
    }

    fn random_model(p: usize, n: usize, seed: u64) -> LinearGaussianModel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let design = DMatrix::from_fn(p, n, |_, _| StandardNormal.sample(&mut rng));
        let truth = gaussian_vector(n, &mut rng);
        LinearGaussianModel::new(design, 0.5, None, truth, seed + 1).unwrap()
    }

    #[test]
    fn posterior_matches_normal_equations() {
        let m = random_model(5, 20, 3);
        let g = DMatrix::from_diagonal(&DVector::from_vec(vec![0.3, 1.0, 2.0, 0.0, 0.5]));
        let post = posterior(&m, &g).unwrap();
        let a = &m.design * m.design.transpose() + &g * m.noise_var;
        let oracle = a.lu().solve(&(&m.design * &m.response)).unwrap();
        assert!((&post.mean - oracle).norm() <= 1e-8);
        // the posterior mean is the precision-weighted solve
        let alt = post.precision.clone().lu().solve(&(&m.design * &m.response / m.noise_var)).unwrap();
        assert!((&post.mean - alt).norm() <= 1e-8);
    }

    #[test]
    fn posterior_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let design = random_orthonormal(20, 4, &mut rng).transpose();
        let y = gaussian_vector(20, &mut rng);
        let m = LinearGaussianModel::new(design.clone(), 1.0, Some(y.clone()), y.clone(), 0).unwrap();
        let post = posterior(&m, &DMatrix::zeros(4, 4)).unwrap();
        // orthonormal rows: least squares is Ψ Y
        assert!((&post.mean - &design * &y).norm() < 1e-12);
        let strong = posterior(&m, &(DMatrix::identity(4, 4) * 1e12)).unwrap();
        assert!(strong.mean.norm() < 1e-10);
        let bad = LinearGaussianModel::new(DMatrix::zeros(2, 3), 1.0, None, DVector::zeros(3), 0).unwrap();
        assert_eq!(posterior(&bad, &DMatrix::zeros(2, 2)).unwrap_err().kind(), "DomainError");
    }

    #[test]
    fn credible_radius_calibration() {
        let r = credible_radius(&Spectrum::identity(3), 0.05, &cfg()).unwrap();
        assert_close!(r * r, 7.814727903251178, 1e-6);
        let s = Spectrum::new(vec![2.0, 1.0, 0.4, 0.1]).unwrap();
        let law = QuadFormLaw::from_gaussian(&s, &[]);
        for alpha in [0.01, 0.05, 0.1, 0.5] {
            let r = credible_radius(&s, alpha, &cfg()).unwrap();
            assert_close!(1.0 - law.cdf(r * r, &cfg()).unwrap(), alpha, 1e-6);
            let r4 = credible_radius(&s.scaled(4.0).unwrap(), alpha, &cfg()).unwrap();
            assert_close!(r4, 2.0 * r, 1e-6 * r);
        }
        assert!(credible_radius(&s, 1.0, &cfg()).is_err());
    }

    #[test]
    fn same_prior_has_no_impact() {
        let sc = &scenario_suite()[0];
        let m = sc.model().unwrap();
        let g = sc.g_sq().unwrap();
        let rec = prior_impact(&m, &g, &g, &DMatrix::identity(sc.p, sc.p), 0.05, &cfg()).unwrap();
        assert!(rec.observed < 1e-6, "{rec:?}");
        assert_eq!(rec.extras["rhs"], 0.0);
        assert!(rec.verdict.passed());
    }

    #[test]
    fn prior_order_gives_trace_identity() {
        for sc in scenario_suite().iter().take(8) {
            let (impact, coverage) = sc.run(&cfg()).unwrap();
            assert_eq!(impact.extras["psd_order"], 1.0);
            assert_close!(impact.extras["trace_diff"], impact.extras["nuclear_diff"], 1e-8);
            assert_eq!(coverage.extras["psd_order"], 1.0);
            assert_close!(coverage.extras["trace_diff"], coverage.extras["nuclear_diff"], 1e-8);
        }
    }

    #[test]
    fn flat_prior_projects() {
        let sc = Scenario { g_spec: PriorSpec::Scalar(0.0), ..scenario_suite()[0].clone() };
        let m = sc.model().unwrap();
        let pi = m.hat_matrix(&DMatrix::zeros(sc.p, sc.p)).unwrap();
        assert!((&pi * &pi - &pi).norm() < 1e-10);
        let rec = np_bayes_coverage(&m, &DMatrix::zeros(sc.p, sc.p), &DMatrix::identity(sc.n, sc.n), 0.05, &cfg()).unwrap();
        assert!(rec.extras["trace_diff"].abs() < 1e-10);
        // the truth lies in the row space of Ψ, so the bias vanishes too
        assert!(rec.extras["shift_norm_sq"] < 1e-18);
        assert!(rec.observed < 1e-6);
    }

    #[test]
    fn reversed_prior_order_is_flagged() {
        let sc = &scenario_suite()[0];
        let m = sc.model().unwrap();
        let rec = prior_impact(&m, &sc.g1_sq().unwrap(), &sc.g_sq().unwrap(), &DMatrix::identity(sc.p, sc.p), 0.05, &cfg()).unwrap();
        assert_eq!(rec.extras["psd_order"], 0.0);
    }

    #[test]
    fn monte_carlo_agrees() {
        let sc = &scenario_suite()[2];
        let m = sc.model().unwrap();
        let (g, g1) = (sc.g_sq().unwrap(), sc.g1_sq().unwrap());
        let w = DMatrix::identity(sc.p, sc.p);
        let rec = prior_impact(&m, &g, &g1, &w, sc.alpha, &cfg()).unwrap();
        let reps = 100_000;
        let mc = prior_impact_monte_carlo(&m, &g, &g1, &w, rec.extras["radius"], reps, 5).unwrap();
        let p = rec.extras["exceedance"];
        let se = (p * (1.0 - p) / reps as f64).sqrt();
        assert!((mc - p).abs() <= 3.0 * se, "mc {mc}, exact {p}");

        let a = DMatrix::identity(sc.n, sc.n);
        let rec = np_bayes_coverage(&m, &g, &a, sc.alpha, &cfg()).unwrap();
        let mc = coverage_monte_carlo(&m, &g, &a, rec.extras["radius"], reps, 6).unwrap();
        let p = rec.extras["miss_probability"];
        let se = (p * (1.0 - p) / reps as f64).sqrt();
        assert!((mc - p).abs() <= 3.0 * se, "mc {mc}, exact {p}");
    }

    #[test]
    fn scenario_json_round_trip() {
        let js = r#"{"n": 20, "p": 5, "sigma2": 1.0, "design_seed": 4, "G_spec": 2.0, "G1_spec": [1,1,1,1,0.5], "alpha": 0.05}"#;
        let sc: Scenario = serde_json::from_str(js).unwrap();
        assert_eq!(sc.g1_spec, PriorSpec::Diagonal(vec![1.0, 1.0, 1.0, 1.0, 0.5]));
        assert_eq!(sc.decay, 1.0);
        assert_eq!(sc.model().unwrap(), sc.model().unwrap());
        assert!(Scenario { n: 3, ..sc }.model().is_err());
    }
}
