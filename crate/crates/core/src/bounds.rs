//! Right-hand sides of the comparison, anti-concentration and density bounds.
//!
//! Every bound here holds up to an unspecified absolute constant, so the
//! reported `value` is the bare expression ("raw RHS"). The metrics module
//! compares observed quantities against `C · value` for a calibrated `C`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::quadform::QuadFormLaw;
use crate::spectrum::{self, Spectrum};

/// An evaluated bound together with the pieces it was assembled from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub formula_id: String,
    pub value: f64,
    pub ingredients: BTreeMap<String, f64>,
    pub condition_ok: bool,
}

impl BoundReport {
    fn new(formula_id: &str, value: f64, ingredients: &[(&str, f64)]) -> Self {
        BoundReport {
            formula_id: formula_id.to_string(),
            value,
            ingredients: ingredients.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            condition_ok: true,
        }
    }

    pub fn ingredient(&self, name: &str) -> Option<f64> {
        self.ingredients.get(name).copied()
    }
}

/// `prefactor · distance`, treating `∞ · 0` as `0`: identical laws are at
/// distance zero whatever the prefactor.
fn product(prefactor: f64, distance: f64) -> f64 {
    if distance == 0.0 {
        0.0
    } else {
        prefactor * distance
    }
}

fn check_shift(shift_norm_sq: f64) -> Result<()> {
    if !(shift_norm_sq >= 0.0) {
        return Err(Error::domain(format!("‖a‖² must be ≥ 0, got {shift_norm_sq}")));
    }
    Ok(())
}

/// `(κ(Σ_ξ) + κ(Σ_η)) · (‖λ_ξ − λ_η‖₁ + ‖a‖²)`.
pub fn comparison_bound(sx: &Spectrum, sy: &Spectrum, shift_norm_sq: f64) -> Result<BoundReport> {
    comparison_bound_with(sx, sy, shift_norm_sq, false)
}

/// As [`comparison_bound`]; `same_shift` marks the variant where both balls
/// share the centre `a`. The expression is the same, only the id differs.
pub fn comparison_bound_with(
    sx: &Spectrum,
    sy: &Spectrum,
    shift_norm_sq: f64,
    same_shift: bool,
) -> Result<BoundReport> {
    check_shift(shift_norm_sq)?;
    let (kx, ky) = (sx.kappa()?, sy.kappa()?);
    let l1 = spectrum::nuclear_diff(sx, sy);
    let id = if same_shift { "comparison_same_shift" } else { "comparison" };
    Ok(BoundReport::new(
        id,
        product(kx + ky, l1 + shift_norm_sq),
        &[
            ("kappa_x", kx),
            ("kappa_y", ky),
            ("nuclear_diff", l1),
            ("shift_norm_sq", shift_norm_sq),
        ],
    ))
}

/// `((Λ₁ξΛ₂ξ)^{-1/2} + (Λ₁ηΛ₂η)^{-1/2}) · (‖λ_ξ − λ_η‖₁ + ‖a‖²)`.
pub fn comparison_bound_lambda12(
    sx: &Spectrum,
    sy: &Spectrum,
    shift_norm_sq: f64,
) -> Result<BoundReport> {
    check_shift(shift_norm_sq)?;
    let (ux, uy) = (spectrum::kappa_unified(sx), spectrum::kappa_unified(sy));
    let l1 = spectrum::nuclear_diff(sx, sy);
    Ok(BoundReport::new(
        "comparison_lambda12",
        product(ux + uy, l1 + shift_norm_sq),
        &[
            ("inv_sqrt_lambda12_x", ux),
            ("inv_sqrt_lambda12_y", uy),
            ("nuclear_diff", l1),
            ("shift_norm_sq", shift_norm_sq),
        ],
    ))
}

/// `(1/‖Σ_ξ‖_Fr + 1/‖Σ_η‖_Fr) · (‖λ_ξ − λ_η‖₁ + ‖a‖²)`, valid when both
/// spectra satisfy `3λ₁² ≤ Λ₁²`.
pub fn comparison_bound_frobenius(
    sx: &Spectrum,
    sy: &Spectrum,
    shift_norm_sq: f64,
) -> Result<BoundReport> {
    check_shift(shift_norm_sq)?;
    for (name, s) in [("x", sx), ("y", sy)] {
        let l1 = s.lambda(1);
        let fro_sq = s.tail_norms().lambda1_sq;
        if 3.0 * l1 * l1 > fro_sq {
            return Err(Error::condition(format!(
                "spectrum {name} violates 3λ₁² ≤ Λ₁² ({} > {fro_sq})",
                3.0 * l1 * l1
            )));
        }
    }
    let (fx, fy) = (sx.tail_norms().lambda1(), sy.tail_norms().lambda1());
    let l1 = spectrum::nuclear_diff(sx, sy);
    Ok(BoundReport::new(
        "comparison_frobenius",
        product(1.0 / fx + 1.0 / fy, l1 + shift_norm_sq),
        &[
            ("frobenius_x", fx),
            ("frobenius_y", fy),
            ("nuclear_diff", l1),
            ("shift_norm_sq", shift_norm_sq),
        ],
    ))
}

/// `(κ_ξ + κ_η)(tr Σ_ξ · ‖Σ_ξ^{-1/2}Σ_ηΣ_ξ^{-1/2} − I‖ + ‖a‖²)`, for a strictly
/// positive definite `Σ_ξ`.
pub fn comparison_bound_operator(
    sx_full: &DMatrix<f64>,
    sy_full: &DMatrix<f64>,
    shift_norm_sq: f64,
) -> Result<BoundReport> {
    check_shift(shift_norm_sq)?;
    if sx_full.shape() != sy_full.shape() {
        return Err(Error::domain("covariances have different shapes"));
    }
    let (sx, _) = spectrum::spectrum_of_matrix(sx_full, &[])?;
    let (sy, _) = spectrum::spectrum_of_matrix(sy_full, &[])?;
    let r = linalg::inv_sqrt_pd(sx_full, 1e-14)?;
    let p = sx_full.nrows();
    let rel = &r * sy_full * &r - DMatrix::identity(p, p);
    let opnorm = linalg::operator_norm_sym(&rel);
    let tr = sx_full.trace();
    let (kx, ky) = (sx.kappa()?, sy.kappa()?);
    Ok(BoundReport::new(
        "comparison_operator",
        product(kx + ky, tr * opnorm + shift_norm_sq),
        &[
            ("kappa_x", kx),
            ("kappa_y", ky),
            ("trace_x", tr),
            ("relative_opnorm", opnorm),
            ("shift_norm_sq", shift_norm_sq),
        ],
    ))
}

/// `κ(Σ)·ε`, controlling `sup_x P(x < ‖ξ − a‖² < x + ε)`.
pub fn anticoncentration_bound(s: &Spectrum, eps: f64) -> Result<BoundReport> {
    if !(eps > 0.0) {
        return Err(Error::domain(format!("band width must be positive, got {eps}")));
    }
    let k = s.kappa()?;
    Ok(BoundReport::new("anticoncentration", k * eps, &[("kappa", k), ("eps", eps)]))
}

/// `κ(Σ)`, controlling `sup_x p(x)` for every shift.
pub fn density_uniform_bound(s: &Spectrum) -> Result<BoundReport> {
    let k = s.kappa()?;
    Ok(BoundReport::new("density_uniform", k, &[("kappa", k)]))
}

/// Pointwise density bound
/// `exp(−(√x − ‖a‖)²/(2λ)) · (2λ₁λ₂)^{-1/2} · Π_{j≥3}(1 − λ_j/λ)^{-1/2}`
/// for any free parameter `λ > λ₁`; the default is `λ = tr Σ`.
pub fn density_nonuniform_bound(
    law: &QuadFormLaw,
    x: f64,
    lambda_free: Option<f64>,
) -> Result<BoundReport> {
    let w = law.weights();
    let l1 = w.first().copied().unwrap_or(0.0);
    let l2 = w.get(1).copied().unwrap_or(0.0);
    let trace: f64 = w.iter().sum();
    let lam = lambda_free.unwrap_or(trace);
    if !(lam > l1) {
        return Err(Error::domain(format!(
            "free parameter λ = {lam} must exceed λ₁ = {l1}"
        )));
    }
    let a = law.shift_norm_sq().sqrt();
    let gap = x.max(0.0).sqrt() - a;
    let expo = (-gap * gap / (2.0 * lam)).exp();
    let prod: f64 = w.iter().skip(2).map(|l| (1.0 - l / lam).powf(-0.5)).product();
    let base = if l2 > 0.0 {
        (2.0 * l1 * l2).powf(-0.5)
    } else {
        f64::INFINITY
    };
    Ok(BoundReport::new(
        "density_nonuniform",
        base * expo * prod,
        &[
            ("x", x),
            ("lambda_free", lam),
            ("shift_norm", a),
            ("exp_factor", expo),
            ("prefactor", base),
            ("product_factor", prod),
        ],
    ))
}

/// `½(‖Σ^{-1/2}Σ♭Σ^{-1/2} − I‖_Fr + ‖Σ^{-1/2}a‖)` with `Σ = sx_full`,
/// `Σ♭ = sy_full`. Needs the inverse of `Σ`, unlike every other bound here.
pub fn pinsker_baseline(
    sx_full: &DMatrix<f64>,
    sy_full: &DMatrix<f64>,
    a: &[f64],
) -> Result<BoundReport> {
    let p = sx_full.nrows();
    if sy_full.shape() != sx_full.shape() || a.len() != p {
        return Err(Error::domain("dimension mismatch in the Pinsker baseline"));
    }
    linalg::check_symmetric(sy_full, spectrum::PSD_TOL)?;
    let r = linalg::inv_sqrt_pd(sx_full, 1e-300)?;
    let fro = linalg::frobenius(&(&r * sy_full * &r - DMatrix::identity(p, p)));
    let shift = (&r * DVector::from_column_slice(a)).norm();
    Ok(BoundReport::new(
        "pinsker",
        0.5 * (fro + shift),
        &[("relative_frobenius", fro), ("whitened_shift", shift)],
    ))
}
