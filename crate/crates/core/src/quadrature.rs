//! Globally adaptive Gauss-Kronrod quadrature.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Interval budget of [`integrate`].
pub const MAX_INTERVALS: usize = 4000;

// 15-point Kronrod abscissae on [-1, 1]; odd entries are the 7-point Gauss nodes.
const XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Value and error estimate of an integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XK[j];
        let s = f(c - x) + f(c + x);
        k += WK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    Piece { a, b, value: k * h, error: ((k - g) * h).abs() }
}

/// `∫_a^b f` to `max(abs_tol, rel_tol |I|)`.
///
/// Fails with [`Error::Numeric`] when the integrand is not finite or the
/// interval budget runs out.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("integration limits must be finite"));
    }
    if a == b {
        return Ok(Quadrature { value: 0.0, error: 0.0, intervals: 0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let first = kronrod(&f, lo, hi);
    let mut heap = BinaryHeap::new();
    let (mut value, mut error) = (first.value, first.error);
    heap.push(first);
    loop {
        if !value.is_finite() {
            return Err(Error::Numeric("non-finite integrand".into()));
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            break;
        }
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::Numeric(format!("quadrature did not converge: error {error:.3e}")));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // The interval cannot be split further.
            heap.push(worst);
            return Err(Error::Numeric(format!("quadrature did not converge: error {error:.3e}")));
        }
        let (l, r) = (kronrod(&f, worst.a, mid), kronrod(&f, mid, worst.b));
        value += l.value + r.value - worst.value;
        error += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
    }
    // Re-sum to shed the drift of the running totals.
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let error: f64 = heap.iter().map(|p| p.error).sum();
    Ok(Quadrature { value: sign * value, error, intervals: heap.len() })
}

/// `∫_lo^hi f` for an integrand with inverse-square-root singularities at
/// both ends, through `λ = lo + (hi − lo) sin²(u/2)`.
///
/// `g(u, a, b)` receives the substitution angle together with the exact
/// distances `a = λ − lo` and `b = hi − λ`.
pub fn integrate_endpoint_singular<G: Fn(f64, f64, f64) -> f64>(
    g: G,
    lo: f64,
    hi: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Quadrature> {
    let w = hi - lo;
    integrate(
        |u| {
            let (s, c) = (0.5 * u).sin_cos();
            let (a, b) = (w * s * s, w * c * c);
            // dλ = w sin(u/2) cos(u/2) du
            g(u, a, b) * w * s * c
        },
        0.0,
        std::f64::consts::PI,
        abs_tol,
        rel_tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let q = integrate(|x| x.powi(6) - 3.0 * x, -1.0, 2.0, 1e-14, 0.0).unwrap();
        assert!((q.value - (129.0 / 7.0 - 4.5)).abs() < 1e-12);
        assert_eq!(q.intervals, 1);
    }

    #[test]
    fn reversed_limits() {
        let q = integrate(f64::exp, 1.0, 0.0, 1e-14, 1e-14).unwrap();
        assert!((q.value + (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 dλ/√(λ(1−λ)) = π
        let q = integrate_endpoint_singular(|_, a, b| 1.0 / (a * b).sqrt(), 0.0, 1.0, 1e-14, 1e-14).unwrap();
        assert!((q.value - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn non_finite_integrand() {
        assert!(integrate(|x| 1.0 / x, -1.0, 1.0, 1e-12, 0.0).is_err());
    }
}
