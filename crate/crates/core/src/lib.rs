//! Gaussian ball probabilities in Hilbert space.
//!
//! The crate computes the exact law of `‖ξ − a‖²` for a centred Gaussian `ξ`
//! with a finite covariance spectrum, evaluates dimension-free comparison and
//! anti-concentration bounds for such laws, and checks them against exact
//! distances obtained by characteristic-function inversion.
//!
//! ```
//! use ballprob::{quadform::{InversionConfig, QuadFormLaw}, spectrum::Spectrum};
//!
//! let law = QuadFormLaw::from_gaussian(&Spectrum::new(vec![1.0, 1.0]).unwrap(), &[]);
//! let p = law.cdf(2.0, &InversionConfig::default()).unwrap();
//! assert!((p - (1.0 - (-1.0f64).exp())).abs() < 1e-6);
//! ```

#[cfg(test)]
macro_rules! assert_close {
    ($a:expr, $b:expr, $tol:expr) => {{
        let (a, b, tol): (f64, f64, f64) = ($a, $b, $tol);
        assert!(
            (a - b).abs() <= tol,
            "assert_close failed: {} = {a:e}, {} = {b:e}, |diff| = {:e} > {tol:e}",
            stringify!($a),
            stringify!($b),
            (a - b).abs()
        );
    }};
}

pub mod analysis;
pub mod bayesdemo;
pub mod bounds;
pub mod calibration;
pub mod cli;
pub mod error;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod quad;
pub mod quadform;
pub mod spectrum;

pub use error::{Error, Result};
