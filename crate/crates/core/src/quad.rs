//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd Kronrod nodes (indices 1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel: `(estimate, |K15 − G7|)`.
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

struct Panel {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
    pub evals: usize,
}

/// Globally adaptive bisection on `[a, b]`, optionally pre-split into
/// `initial` equal panels. Stops when the summed error estimate drops below
/// `abs_tol` or errors out once `max_evals` function evaluations are spent.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    initial: usize,
    abs_tol: f64,
    max_evals: usize,
) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate { value: 0.0, err: 0.0, evals: 0 });
    }
    let n0 = initial.max(1);
    let mut heap = BinaryHeap::with_capacity(2 * n0);
    let mut evals = 0usize;
    let width = (b - a) / n0 as f64;
    let (mut total, mut err_sum) = (0.0, 0.0);
    for i in 0..n0 {
        let lo = a + width * i as f64;
        let hi = if i + 1 == n0 { b } else { lo + width };
        let (val, err) = gk15(&mut f, lo, hi);
        evals += 15;
        total += val;
        err_sum += err;
        heap.push(Panel { a: lo, b: hi, val, err });
    }
    loop {
        let err = err_sum.max(0.0);
        if err <= abs_tol {
            return Ok(Estimate { value: total, err, evals });
        }
        if evals >= max_evals {
            return Err(Error::numerical(
                format!("adaptive quadrature exhausted {max_evals} evaluations"),
                err,
            ));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in floating point.
            return Err(Error::numerical("quadrature interval underflow", err));
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        evals += 30;
        total += v1 + v2 - worst.val;
        err_sum += e1 + e2 - worst.err;
        heap.push(Panel { a: worst.a, b: mid, val: v1, err: e1 });
        heap.push(Panel { a: mid, b: worst.b, val: v2, err: e2 });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let (v, _) = gk15(&mut |x: f64| x.powi(6) - 3.0 * x * x + 1.0, -1.0, 2.0);
        let exact = (2f64.powi(7) + 1.0) / 7.0 - (8.0 + 1.0) + 3.0;
        assert_close!(v, exact, 1e-12);
    }

    #[test]
    fn oscillatory_integrand_converges() {
        let est = integrate(|x: f64| (50.0 * x).sin(), 0.0, 1.0, 4, 1e-12, 100_000).unwrap();
        assert_close!(est.value, (1.0 - 50f64.cos()) / 50.0, 1e-11);
    }

    #[test]
    fn singular_endpoint_budget_error() {
        let r = integrate(|x: f64| 1.0 / x, 0.0, 1.0, 1, 1e-10, 2_000);
        assert!(matches!(r, Err(Error::Numerical { .. })));
    }
}
