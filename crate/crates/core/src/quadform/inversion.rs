//! Fourier inversion of the characteristic function.
//!
//! Two routes are available.
//!
//! [`Contour::Rotated`] (the default) moves the inversion integral off the
//! real axis. Writing `Y = X − c₀`, `x' = x − c₀` and `h(z) = e^{−izx'}E e^{izY}`,
//! the real line is deformed into the symmetric V-shaped path whose right
//! branch is `z(r) = −ic + r e^{−iθ}`, `r ≥ 0`, with `0 < c < 1/(2λ₁)` and
//! `0 < θ ≤ π/4`. The path passes below the pole of `h(z)/z` at the origin and
//! above the branch points `−i/(2λ_j)`, so with `I = ∫ h(z)/z dz` and
//! `J = ∫ h(z) dz` over the right branch
//!
//! ```text
//! F(x) = 1 − Im(I)/π,        p(x) = Re(J)/π.
//! ```
//!
//! Along the branch `|e^{−izx'}| = e^{−cx'−r x' sin θ}`, so the integrands decay
//! exponentially for every `x' > 0` and every number of weights. The integrals
//! are computed by the trapezoid rule in `u = ln r`, which converges
//! geometrically for integrands analytic in a strip; the step is halved until
//! the rule at `η` and at `2η` agree to `abs_tol`.
//!
//! [`Contour::RealAxis`] evaluates
//! `F(x) = 1/2 − (1/π)∫₀^T Im(e^{−itx'}f₀(t))/t dt` with adaptive Gauss–Kronrod
//! panels, cutting at the frequency `T` where the modulus bound
//! `Π(1 + 4λ_j²t²)^{-1/4}` certifies the remainder. It is only practical for
//! three or more comparable weights and serves as a cross-check.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::QuadFormLaw;
use crate::error::{Error, Result};
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Contour {
    Rotated,
    RealAxis,
}

/// Step policy for the quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPolicy {
    /// Initial trapezoid step in `ln r` for `θ = π/4`; scaled down with `θ`.
    pub initial_step: f64,
    /// How many times the step may be halved.
    pub max_refinements: u32,
    /// Hard cap on nodes (rotated) or integrand evaluations (real axis).
    pub max_nodes: usize,
}

impl Default for GridPolicy {
    fn default() -> Self {
        GridPolicy {
            initial_step: 0.4,
            max_refinements: 8,
            max_nodes: 4_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InversionConfig {
    /// Target absolute error of each returned probability or density value.
    pub abs_tol: f64,
    /// Largest frequency the real-axis route may integrate to.
    pub max_freq: f64,
    pub grid: GridPolicy,
    pub contour: Contour,
}

impl Default for InversionConfig {
    fn default() -> Self {
        InversionConfig {
            abs_tol: 1e-6,
            max_freq: 1e7,
            grid: GridPolicy::default(),
            contour: Contour::Rotated,
        }
    }
}

impl InversionConfig {
    pub fn with_tol(abs_tol: f64) -> Self {
        InversionConfig {
            abs_tol,
            ..Default::default()
        }
    }

    /// Default tolerance for a given law: `1e-5` when it has exactly two
    /// positive weights, `1e-6` otherwise.
    pub fn for_law(law: &QuadFormLaw) -> Self {
        Self::with_tol(if law.dim() == 2 { 1e-5 } else { 1e-6 })
    }

    pub fn real_axis(mut self) -> Self {
        self.contour = Contour::RealAxis;
        self
    }
}

/// One inversion result, serialised as a JSON evaluation record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub x: f64,
    pub cdf: Option<f64>,
    pub density: Option<f64>,
    pub err_est: f64,
}

pub(super) fn evaluate(
    law: &QuadFormLaw,
    xs: &[f64],
    cfg: &InversionConfig,
    want_cdf: bool,
    want_density: bool,
) -> Result<Vec<Evaluation>> {
    if !(cfg.abs_tol > 0.0 && cfg.abs_tol.is_finite()) {
        return Err(Error::domain(format!("abs_tol must be positive, got {}", cfg.abs_tol)));
    }
    if let Some(x) = xs.iter().find(|x| x.is_nan()) {
        return Err(Error::domain(format!("cannot evaluate at {x}")));
    }
    let mut out: Vec<Evaluation> = xs
        .iter()
        .map(|&x| Evaluation {
            x,
            cdf: want_cdf.then_some(if law.dim() == 0 && x >= law.offset { 1.0 } else { 0.0 }),
            density: want_density.then_some(0.0),
            err_est: 0.0,
        })
        .collect();
    if law.dim() == 0 {
        return Ok(out);
    }
    let inner: Vec<(usize, f64)> = xs
        .iter()
        .enumerate()
        .filter_map(|(i, &x)| {
            let xp = x - law.offset;
            (xp > 0.0).then_some((i, xp))
        })
        .collect();
    // +∞ is handled here so the quadratures only see finite points
    let (infinite, finite): (Vec<_>, Vec<_>) = inner.into_iter().partition(|(_, xp)| xp.is_infinite());
    for (i, _) in infinite {
        out[i].cdf = want_cdf.then_some(1.0);
    }
    if finite.is_empty() {
        return Ok(out);
    }
    let points: Vec<f64> = finite.iter().map(|p| p.1).collect();
    let values = match cfg.contour {
        Contour::Rotated => rotated(law, &points, cfg, want_cdf, want_density)?,
        Contour::RealAxis => points
            .iter()
            .map(|&xp| real_axis(law, xp, cfg, want_cdf, want_density))
            .collect::<Result<Vec<_>>>()?,
    };
    for ((i, _), v) in finite.iter().zip(values) {
        out[*i].cdf = v.cdf.map(|p| p.clamp(0.0, 1.0));
        out[*i].density = v.density.map(|d| d.max(0.0));
        out[*i].err_est = v.err;
    }
    Ok(out)
}

struct Raw {
    cdf: Option<f64>,
    density: Option<f64>,
    err: f64,
}

/// Geometry of the right branch `−ic + r e^{−iθ}` and the bounds used to
/// truncate it.
struct Ray {
    c: f64,
    theta: f64,
    sin: f64,
    cos: f64,
    /// `ln sup |E e^{izY}|` over the branch.
    log_sup: f64,
    /// Per-weight `(2λ_j, 1 − 2λ_j c)`, used by the far-field envelope.
    scales: Vec<(f64, f64)>,
    /// `Σ_j δ_j²/2 · (m(θ)/a_j − 1)`, the largest the noncentral factor gets.
    log_nc_peak: f64,
}

/// Log moment generating function of `Y` at `c < 1/(2λ₁)`.
fn log_mgf(law: &QuadFormLaw, c: f64) -> f64 {
    law.weights
        .iter()
        .zip(&law.noncentrality)
        .map(|(l, d)| {
            let a0 = 1.0 - 2.0 * l * c;
            -0.5 * a0.ln() + 0.5 * d * d * (1.0 / a0 - 1.0)
        })
        .sum()
}

impl Ray {
    fn choose(law: &QuadFormLaw) -> Ray {
        let lam1 = law.weights[0];
        let mut c = (0.5 / law.std_dev()).min(0.25 / lam1);
        while log_mgf(law, c) > 3.0 && c > 1e-12 / lam1 {
            c *= 0.5;
        }
        let a0s: Vec<f64> = law.weights.iter().map(|l| 1.0 - 2.0 * l * c).collect();
        // ln of the worst-case growth of |f₀| along the branch relative to
        // its value at the vertex
        let log_amp = |theta: f64| -> f64 {
            let ct = theta.cos();
            let base = -0.5 * law.dim() as f64 * ct.ln();
            let nc: f64 = law
                .noncentrality
                .iter()
                .zip(&a0s)
                .map(|(d, a0)| 0.5 * d * d * (1.0 - ct) / (2.0 * ct) / a0)
                .sum();
            base + nc
        };
        let mut theta = FRAC_PI_4;
        while log_amp(theta) > 9.0 && theta > 1e-3 {
            theta *= 0.8;
        }
        let ct = theta.cos();
        let m = (1.0 + ct) / (2.0 * ct);
        let log_nc_peak = law
            .noncentrality
            .iter()
            .zip(&a0s)
            .map(|(d, a0)| 0.5 * d * d * (m / a0 - 1.0))
            .sum();
        Ray {
            c,
            theta,
            sin: theta.sin(),
            cos: ct,
            log_sup: log_mgf(law, c) + log_amp(theta),
            scales: law.weights.iter().zip(&a0s).map(|(l, a)| (2.0 * l, *a)).collect(),
            log_nc_peak,
        }
    }

    /// `ln sup_{r' ≥ r} |E e^{iz(r')Y}|` from `|1 − 2iλz| ≥ cos θ·max(a_j, 2λ_j r)`.
    fn log_envelope(&self, r: f64) -> f64 {
        self.log_nc_peak
            - 0.5
                * self
                    .scales
                    .iter()
                    .map(|(two_l, a0)| (self.cos * a0.max(two_l * r)).ln())
                    .sum::<f64>()
    }

    /// Smallest `R` (on a geometric ladder) beyond which the branch
    /// contributes less than `target` to either integral at `x'`.
    fn upper_cut(&self, xp: f64, target: f64) -> f64 {
        let sx = self.sin * xp;
        let mut r = 1.0 / sx;
        for _ in 0..400 {
            let log_env = self.log_envelope(r) - self.c * xp - r * sx;
            // cdf: ∫ |h| r/|z| du ≤ env·E₁(R s x')/cos θ; density: ∫ |h| dr ≤ env·e^{−Rsx'}/(s x')
            let cdf_tail = log_env - (r * sx).ln() - self.cos.ln();
            let den_tail = log_env - sx.ln();
            if cdf_tail.max(den_tail) < target.ln() {
                return r;
            }
            r *= 1.5;
        }
        r
    }

    /// `r` below which the branch contributes less than `target`.
    fn lower_cut(&self, target: f64) -> f64 {
        // |h| ≤ e^{log_sup}, and |z| ≥ c on the branch
        target * self.c.min(1.0) * (-self.log_sup).exp()
    }
}

fn rotated(
    law: &QuadFormLaw,
    xps: &[f64],
    cfg: &InversionConfig,
    want_cdf: bool,
    want_density: bool,
) -> Result<Vec<Raw>> {
    let tol = cfg.abs_tol;
    let ray = Ray::choose(law);
    let cut_target = 1e-3 * tol;
    let u_lo = ray.lower_cut(cut_target).ln();
    let u_cuts: Vec<f64> = xps.iter().map(|&xp| ray.upper_cut(xp, cut_target).ln()).collect();
    let u_hi = u_cuts.iter().fold(f64::NEG_INFINITY, |m, u| m.max(*u));
    if !(u_lo.is_finite() && u_hi.is_finite()) {
        return Err(Error::numerical("contour truncation window is not finite", f64::NAN));
    }
    let strip = ray.theta.min(FRAC_PI_2 - ray.theta);
    let mut eta = cfg.grid.initial_step * strip / FRAC_PI_4;
    let rot = Complex64::from_polar(1.0, -ray.theta);
    let vertex = Complex64::new(0.0, -ray.c);

    let mut worst = f64::INFINITY;
    for _level in 0..=cfg.grid.max_refinements {
        let n = ((u_hi - u_lo) / eta).ceil() as usize + 1;
        if n > cfg.grid.max_nodes {
            return Err(Error::numerical(
                format!("rotated contour needs {n} nodes, more than the cap {}", cfg.grid.max_nodes),
                worst,
            ));
        }
        let mut zs = Vec::with_capacity(n);
        let mut wc = Vec::with_capacity(n);
        let mut wd = Vec::with_capacity(n);
        for k in 0..n {
            let r = (u_lo + k as f64 * eta).exp();
            let dz = rot * r;
            let z = vertex + dz;
            let f0 = law.log_cf_centred(z).exp();
            zs.push(z);
            wc.push(f0 * dz / z);
            wd.push(f0 * dz);
        }
        let mut out = Vec::with_capacity(xps.len());
        worst = 0.0;
        for (&xp, &u_cut) in xps.iter().zip(&u_cuts) {
            let k_max = (((u_cut - u_lo) / eta).ceil() as usize + 1).min(n);
            let (mut sc, mut sc2, mut sd, mut sd2) = (0.0, 0.0, 0.0, 0.0);
            for k in 0..k_max {
                let z = zs[k];
                let mag = (xp * z.im).exp();
                let (sn, cs) = (xp * z.re).sin_cos();
                let e = Complex64::new(mag * cs, -mag * sn);
                if want_cdf {
                    let v = (wc[k] * e).im;
                    sc += v;
                    if k % 2 == 0 {
                        sc2 += v;
                    }
                }
                if want_density {
                    let v = (wd[k] * e).re;
                    sd += v;
                    if k % 2 == 0 {
                        sd2 += v;
                    }
                }
            }
            let mut err: f64 = 0.0;
            let cdf = want_cdf.then(|| {
                err = err.max((eta * (sc - 2.0 * sc2)).abs() / PI);
                1.0 - eta * sc / PI
            });
            let density = want_density.then(|| {
                err = err.max((eta * (sd - 2.0 * sd2)).abs() / PI);
                eta * sd / PI
            });
            worst = worst.max(err);
            out.push(Raw { cdf, density, err });
        }
        if worst <= tol {
            return Ok(out);
        }
        eta *= 0.5;
    }
    Err(Error::numerical(
        "rotated-contour trapezoid rule did not converge",
        worst,
    ))
}

/// Tail of `∫_T^∞ Π(1+4λ_j²t²)^{-1/4} t^{−q} dt`, using only the factors with
/// `2λ_jT ≥ 1` (each of which is at most `(2λ_j t)^{-1/2}` there).
fn real_axis_tail(weights: &[f64], t_cut: f64, q: f64) -> f64 {
    let mut log_c = 0.0;
    let mut k = 0usize;
    for &l in weights {
        if 2.0 * l * t_cut >= 1.0 {
            log_c -= 0.5 * (2.0 * l).ln();
            k += 1;
        }
    }
    let expo = 0.5 * k as f64 + q - 1.0;
    if expo <= 0.0 {
        return f64::INFINITY;
    }
    (log_c - (0.5 * k as f64) * t_cut.ln() - q * t_cut.ln() + t_cut.ln()).exp() / expo
}

fn real_axis(
    law: &QuadFormLaw,
    xp: f64,
    cfg: &InversionConfig,
    want_cdf: bool,
    want_density: bool,
) -> Result<Raw> {
    let tol = cfg.abs_tol;
    let h0 = 1e-4 / (1.0 + law.weights.iter().sum::<f64>());
    let mu0 = law.mean() - law.offset;
    let h = |t: f64| (law.log_cf_centred(Complex64::new(t, 0.0)) - Complex64::new(0.0, t * xp)).exp();
    let pick_cut = |q: f64| -> Result<(f64, f64)> {
        let mut t = 1.0;
        loop {
            let tail = real_axis_tail(&law.weights, t, q) / PI;
            if tail <= 0.5 * tol {
                return Ok((t, tail));
            }
            if t > cfg.max_freq {
                return Err(Error::numerical(
                    format!("c.f. tail bound needs frequencies beyond max_freq = {:e}", cfg.max_freq),
                    tail,
                ));
            }
            t *= 2.0;
        }
    };
    let panels = |t_cut: f64| ((t_cut * xp.max(1.0 / t_cut) / PI).ceil() as usize).clamp(16, 200_000);
    let mut err = 0.0_f64;
    let cdf = if want_cdf {
        let (t_cut, tail) = pick_cut(1.0)?;
        let est = quad::integrate(
            |t| h(t).im / t,
            h0,
            t_cut,
            panels(t_cut),
            0.5 * tol * PI,
            cfg.grid.max_nodes,
        )?;
        err = err.max(est.err / PI + tail);
        Some(0.5 - (h0 * (mu0 - xp) + est.value) / PI)
    } else {
        None
    };
    let density = if want_density {
        let (t_cut, tail) = pick_cut(0.0)?;
        let est = quad::integrate(
            |t| h(t).re,
            0.0,
            t_cut,
            panels(t_cut),
            0.5 * tol * PI,
            cfg.grid.max_nodes,
        )?;
        err = err.max(est.err / PI + tail);
        Some(est.value / PI)
    } else {
        None
    };
    Ok(Raw { cdf, density, err })
}
