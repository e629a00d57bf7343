//! Frozen constants for the `≲` relations, produced by the calibration run in
//! `examples/calibrate.rs` over the 1000-instance corpus drawn from
//! [`CORPUS_SEED`] and the Bayes scenario suite.
//!
//! Largest ratios seen in that run:
//!
//! | relation                                   | max     |
//! |--------------------------------------------|---------|
//! | distance / comparison bound                | 0.1754  |
//! | sup band / (κ·ε), ε ∈ {0.01, 0.1, 0.5}     | 0.4999  |
//! | sup density / κ                            | 0.5000  |
//! | Bayes deviation / RHS                      | 0.1704  |
//! | product integral · Λ₁, case-1 spectra      | 4.5415  |
//!
//! The density ratio 1/2 is attained by two equal leading weights, where the
//! density at `0⁺` is exactly `κ/2`.

/// Seed of the reference corpus and the CLI default.
pub const CORPUS_SEED: u64 = 20240601;

/// Size of the reference corpus.
pub const CORPUS_SIZE: usize = 1000;

/// Empirical constant for every `≲` relation checked against a bound:
/// twice the largest ratio seen.
pub const C_EMP: f64 = 1.0;

/// Bound on `Λ₁ · ∫₀^∞ Π_j (1 + λ_j²t²)^{-1/4} dt` over case-1 spectra. The
/// maximum is `√3·H(1/4) ≈ 4.5415`, reached by three equal weights.
pub const C_LEMMA: f64 = 6.0;

/// Frozen range of `√p · sup_x p(x)` for `‖ξ‖²`, `ξ ~ N(0, I_p)`,
/// `p = 3, …, 50`. The run gave `[0.2869, 0.4191]`, decreasing towards
/// `1/(2√π) ≈ 0.2821`.
pub const IDENTITY_DENSITY_RANGE: (f64, f64) = (0.25, 0.45);
