//! Covariance spectra and the dimension-free quantities derived from them.
//!
//! A [`Spectrum`] is the nonincreasing eigenvalue sequence of a covariance
//! operator. From it we derive the tail norms `Λ₁² = Σ_{j≥1} λ_j²`,
//! `Λ₂² = Σ_{j≥2} λ_j²` and the piecewise quantity `κ(Σ)`:
//!
//! | regime    | condition                          | `κ(Σ)`            |
//! |-----------|------------------------------------|-------------------|
//! | `HighDim` | `3λ₁² ≤ Λ₁²`                       | `Λ₁⁻¹`            |
//! | `Spike`   | `3λ₁² > Λ₁²` and `3λ₂² ≤ Λ₂²`      | `(λ₁Λ₂)^{-1/2}`   |
//! | `TwoDim`  | `3λ₁² > Λ₁²` and `3λ₂² > Λ₂²`      | `(λ₁λ₂)^{-1/2}`   |
//!
//! `κ(Σ)·√(Λ₁Λ₂)` always lies in `[0.9, 1.8]`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Relative tolerance for the symmetry check and the PSD clamp in
/// [`spectrum_of_matrix`].
pub const PSD_TOL: f64 = 1e-10;

/// Nonincreasing sequence of nonnegative eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Spectrum {
    values: Vec<f64>,
}

/// `Λ₁²` and `Λ₂²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailNorms {
    pub lambda1_sq: f64,
    pub lambda2_sq: f64,
}

impl TailNorms {
    /// `Λ₁`, which is also the Frobenius norm of the operator.
    pub fn lambda1(&self) -> f64 {
        self.lambda1_sq.sqrt()
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2_sq.sqrt()
    }
}

/// Which branch of the piecewise definition of `κ` applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    HighDim,
    Spike,
    TwoDim,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::HighDim => "HighDim",
            Regime::Spike => "Spike",
            Regime::TwoDim => "TwoDim",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Validates and sorts a list of eigenvalues.
pub fn make_spectrum(values: &[f64]) -> Result<Spectrum> {
    Spectrum::new(values.to_vec())
}

impl Spectrum {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!("eigenvalue {v} is not finite")));
        }
        if let Some(v) = values.iter().find(|v| **v < 0.0) {
            return Err(Error::domain(format!(
                "covariance eigenvalues must be nonnegative, got {v}"
            )));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Spectrum { values })
    }

    /// `p` copies of `1.0`.
    pub fn identity(p: usize) -> Self {
        Spectrum {
            values: vec![1.0; p],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `λ_k` with 1-based indexing; zero beyond the stored length.
    pub fn lambda(&self, k: usize) -> f64 {
        assert!(k >= 1, "eigenvalues are indexed from 1");
        self.values.get(k - 1).copied().unwrap_or(0.0)
    }

    /// Nuclear norm `‖Σ‖₁ = Σ λ_j`.
    pub fn trace(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Operator norm `λ₁`.
    pub fn operator_norm(&self) -> f64 {
        self.lambda(1)
    }

    pub fn positive_count(&self) -> usize {
        self.values.iter().filter(|v| **v > 0.0).count()
    }

    pub fn scaled(&self, c: f64) -> Result<Spectrum> {
        Spectrum::new(self.values.iter().map(|v| v * c).collect())
    }

    pub fn tail_norms(&self) -> TailNorms {
        tail_norms(self)
    }

    pub fn regime(&self) -> Regime {
        regime(self)
    }

    pub fn kappa(&self) -> Result<f64> {
        kappa(self)
    }
}

impl TryFrom<Vec<f64>> for Spectrum {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Spectrum::new(values)
    }
}

impl<'de> Deserialize<'de> for Spectrum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<f64>::deserialize(d)?;
        Spectrum::new(values).map_err(serde::de::Error::custom)
    }
}

pub fn tail_norms(s: &Spectrum) -> TailNorms {
    let lambda2_sq: f64 = s.values.iter().skip(1).map(|v| v * v).sum();
    let l1 = s.lambda(1);
    TailNorms {
        lambda1_sq: lambda2_sq + l1 * l1,
        lambda2_sq,
    }
}

pub fn regime(s: &Spectrum) -> Regime {
    let tn = tail_norms(s);
    let l1 = s.lambda(1);
    let l2 = s.lambda(2);
    if 3.0 * l1 * l1 <= tn.lambda1_sq {
        Regime::HighDim
    } else if 3.0 * l2 * l2 <= tn.lambda2_sq {
        Regime::Spike
    } else {
        Regime::TwoDim
    }
}

/// `κ(Σ)`; `+∞` when the selected denominator vanishes.
pub fn kappa(s: &Spectrum) -> Result<f64> {
    let tn = tail_norms(s);
    if tn.lambda1_sq <= 0.0 {
        return Err(Error::domain("κ is undefined for the zero operator"));
    }
    let l1 = s.lambda(1);
    let denom = match regime(s) {
        Regime::HighDim => tn.lambda1(),
        Regime::Spike => (l1 * tn.lambda2()).sqrt(),
        Regime::TwoDim => (l1 * s.lambda(2)).sqrt(),
    };
    Ok(if denom > 0.0 { 1.0 / denom } else { f64::INFINITY })
}

/// `(Λ₁Λ₂)^{-1/2}`, the unified form equivalent to `κ`.
pub fn kappa_unified(s: &Spectrum) -> f64 {
    let tn = tail_norms(s);
    let d = (tn.lambda1() * tn.lambda2()).sqrt();
    if d > 0.0 {
        1.0 / d
    } else {
        f64::INFINITY
    }
}

/// `Σ_j |λ_{jξ} − λ_{jη}|` over sorted spectra, zero-padding the shorter one.
pub fn nuclear_diff(sx: &Spectrum, sy: &Spectrum) -> f64 {
    let n = sx.len().max(sy.len());
    (1..=n).map(|k| (sx.lambda(k) - sy.lambda(k)).abs()).sum()
}

/// Eigen-decomposes a symmetric PSD matrix and rotates `shift` into its
/// eigenbasis, ordered like the returned spectrum.
///
/// Eigenvalues in `[-PSD_TOL·‖S‖, PSD_TOL·‖S‖]` are set to zero; anything more
/// negative is rejected.
pub fn spectrum_of_matrix(s: &DMatrix<f64>, shift: &[f64]) -> Result<(Spectrum, Vec<f64>)> {
    let p = s.nrows();
    if s.ncols() != p {
        return Err(Error::domain(format!(
            "covariance must be square, got {}x{}",
            p,
            s.ncols()
        )));
    }
    if shift.len() > p {
        return Err(Error::domain(format!(
            "shift has length {} but the matrix is {p}x{p}",
            shift.len()
        )));
    }
    linalg::check_symmetric(s, PSD_TOL)?;
    let eig = linalg::sym_eigen_desc(s);
    let norm = eig.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut values = Vec::with_capacity(p);
    for &v in &eig.values {
        if v < -PSD_TOL * norm.max(f64::MIN_POSITIVE) {
            return Err(Error::domain(format!(
                "matrix is not positive semidefinite: eigenvalue {v:e}"
            )));
        }
        // round-off eigenvalues of a rank-deficient matrix are zeros
        values.push(if v <= PSD_TOL * norm { 0.0 } else { v });
    }
    let mut a = nalgebra::DVector::zeros(p);
    for (i, v) in shift.iter().enumerate() {
        a[i] = *v;
    }
    let rotated = eig.vectors.transpose() * a;
    // eigenvalues are already nonincreasing, so construction keeps the pairing
    let spectrum = Spectrum { values };
    Ok((spectrum, rotated.iter().copied().collect()))
}
