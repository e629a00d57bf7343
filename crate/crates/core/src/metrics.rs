//! Kolmogorov distances between ball-probability CDFs, ε-band probabilities
//! and their ratios to the bounds.
//!
//! Suprema over `x` are searched on a 512-point grid spanning
//! `[min c₀, max(mean + 8·sd)]`, then refined by zooming in on the best local
//! maxima. Each zoom round evaluates a fresh 33-point grid between the
//! neighbours of the incumbent in one batched inversion.

use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundReport};
use crate::error::{Error, Result};
use crate::quadform::{InversionConfig, QuadFormLaw};
use crate::spectrum::Spectrum;

pub const GRID_POINTS: usize = 512;
const ZOOM_POINTS: usize = 33;
const ZOOM_ROUNDS: usize = 3;
const MAX_ZOOM_ROUNDS: usize = 8;
const CANDIDATES: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub distance: f64,
    pub argmax_x: f64,
    pub bound: BoundReport,
    /// `distance / bound.value`; zero when the bound is infinite or zero.
    pub ratio: f64,
}

/// Maximises `f` over `[lo, hi]` where `f` maps a batch of points to values.
/// Returns `(max, argmax)`.
fn maximize<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let grid = linspace(lo, hi, GRID_POINTS);
    let vals = f(&grid)?;
    let mut peaks: Vec<usize> = (0..grid.len())
        .filter(|&i| {
            let left = i == 0 || vals[i] >= vals[i - 1];
            let right = i + 1 == grid.len() || vals[i] >= vals[i + 1];
            left && right
        })
        .collect();
    peaks.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    peaks.truncate(CANDIDATES);
    let mut best = (vals[peaks[0]], grid[peaks[0]]);
    for &i in &peaks {
        let mut a = grid[i.saturating_sub(1)];
        let mut b = grid[(i + 1).min(grid.len() - 1)];
        let mut inc = (vals[i], grid[i]);
        for round in 0..MAX_ZOOM_ROUNDS {
            let pts = linspace(a, b, ZOOM_POINTS);
            let v = f(&pts)?;
            let (k, &m) = v
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.total_cmp(y.1))
                .expect("zoom grid is non-empty");
            let gain = m - inc.0;
            if m > inc.0 {
                inc = (m, pts[k]);
            }
            a = pts[k.saturating_sub(1)];
            b = pts[(k + 1).min(pts.len() - 1)];
            if round + 1 >= ZOOM_ROUNDS && gain < tol {
                break;
            }
        }
        if inc.0 > best.0 {
            best = inc;
        }
    }
    Ok(best)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn upper_end(law: &QuadFormLaw) -> f64 {
    law.mean() + 8.0 * law.std_dev()
}

fn cdfs(law: &QuadFormLaw, xs: &[f64], cfg: &InversionConfig) -> Result<Vec<f64>> {
    Ok(law
        .cdf_many(xs, cfg)?
        .into_iter()
        .map(|e| e.cdf.unwrap_or(f64::NAN))
        .collect())
}

/// `sup_x |P(X ≤ x) − P(Y ≤ x)|` and the maximising `x`, in the
/// squared-radius variable.
pub fn kolmogorov_distance(
    law_x: &QuadFormLaw,
    law_y: &QuadFormLaw,
    cfg: &InversionConfig,
) -> Result<(f64, f64)> {
    let lo = law_x.offset().min(law_y.offset());
    let hi = upper_end(law_x).max(upper_end(law_y)).max(lo + 1e-12);
    let gap = |xs: &[f64]| -> Result<Vec<f64>> {
        let (fx, fy) = (cdfs(law_x, xs, cfg)?, cdfs(law_y, xs, cfg)?);
        Ok(fx.iter().zip(&fy).map(|(a, b)| (a - b).abs()).collect())
    };
    maximize(gap, lo, hi, cfg.abs_tol)
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::domain(format!("band width must be finite and ≥ 0, got {eps}")));
    }
    Ok(())
}

/// `P(x < X < x + ε)`.
pub fn band_probability(law: &QuadFormLaw, x: f64, eps: f64, cfg: &InversionConfig) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::domain(format!("band width must be positive, got {eps}")));
    }
    let f = cdfs(law, &[x, x + eps], cfg)?;
    Ok((f[1] - f[0]).max(0.0))
}

/// `sup_{x ≥ 0} P(x < X < x + ε)` and the maximising left end. An empty
/// band (`ε = 0`) has probability zero.
pub fn sup_band(law: &QuadFormLaw, eps: f64, cfg: &InversionConfig) -> Result<(f64, f64)> {
    check_eps(eps)?;
    if eps == 0.0 {
        return Ok((0.0, law.offset()));
    }
    let lo = (law.offset() - eps).max(0.0);
    let hi = upper_end(law).max(lo + eps);
    let band = |xs: &[f64]| -> Result<Vec<f64>> {
        let mut pts = xs.to_vec();
        pts.extend(xs.iter().map(|x| x + eps));
        let f = cdfs(law, &pts, cfg)?;
        let n = xs.len();
        Ok((0..n).map(|i| (f[n + i] - f[i]).max(0.0)).collect())
    };
    maximize(band, lo, hi, cfg.abs_tol)
}

/// `sup_x p(x)` and its location. The grid starts just inside the support so
/// that a peak at `c₀⁺` is seen.
pub fn sup_density(law: &QuadFormLaw, cfg: &InversionConfig) -> Result<(f64, f64)> {
    let scale = law.std_dev().max(f64::MIN_POSITIVE);
    let lo = law.offset() + 1e-9 * scale;
    let hi = upper_end(law);
    let dens = |xs: &[f64]| -> Result<Vec<f64>> {
        Ok(law
            .density_many(xs, cfg)?
            .into_iter()
            .map(|e| e.density.unwrap_or(f64::NAN))
            .collect())
    };
    maximize(dens, lo, hi, cfg.abs_tol)
}

/// Distance between `‖ξ − a‖²` and `‖η‖²` (or `‖η − a‖²` with `same_shift`),
/// bundled with the comparison bound. `shift` is written in the common
/// eigenbasis of both spectra.
pub fn compare(
    sx: &Spectrum,
    sy: &Spectrum,
    shift: &[f64],
    same_shift: bool,
    cfg: &InversionConfig,
) -> Result<ComparisonResult> {
    let law_x = QuadFormLaw::from_gaussian(sx, shift);
    let law_y = QuadFormLaw::from_gaussian(sy, if same_shift { shift } else { &[] });
    let (distance, argmax_x) = kolmogorov_distance(&law_x, &law_y, cfg)?;
    let shift_norm_sq = if same_shift { 0.0 } else { shift.iter().map(|a| a * a).sum::<f64>() + 0.0 };
    let bound = bounds::comparison_bound_with(sx, sy, shift_norm_sq, same_shift)?;
    Ok(ComparisonResult {
        distance,
        argmax_x,
        ratio: ratio(distance, bound.value),
        bound,
    })
}

/// `observed / bound`, zero for infinite or zero bounds.
pub fn ratio(observed: f64, bound: f64) -> f64 {
    if bound.is_finite() && bound > 0.0 {
        observed / bound
    } else {
        0.0
    }
}
