//! Per-mode linear algebra on ℂ³: Leray projection, the Coriolis symbol, its
//! helical eigenbasis and exponential.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::WaveVector;

/// A complex 3-vector, the Fourier coefficient of one mode.
pub type CVec3 = [Complex64; 3];

pub const ZERO3: CVec3 = [Complex64::new(0.0, 0.0); 3];

/// Relative divergence tolerance used by the preconditions.
pub const DIV_TOL: f64 = 1e-10;

/// Helical sign `σ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// `Σ a_i b_i` without conjugation.
pub fn dot_real(a: &[f64; 3], v: &CVec3) -> Complex64 {
    v[0] * a[0] + v[1] * a[1] + v[2] * a[2]
}

/// Hermitian product `Σ a_i conj(b_i)`.
pub fn hdot(a: &CVec3, b: &CVec3) -> Complex64 {
    a[0] * b[0].conj() + a[1] * b[1].conj() + a[2] * b[2].conj()
}

pub fn norm_sq(v: &CVec3) -> f64 {
    v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()
}

pub fn scale(v: &CVec3, s: Complex64) -> CVec3 {
    [v[0] * s, v[1] * s, v[2] * s]
}

pub fn add(a: &CVec3, b: &CVec3) -> CVec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: &CVec3, b: &CVec3) -> CVec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn conj(v: &CVec3) -> CVec3 {
    [v[0].conj(), v[1].conj(), v[2].conj()]
}

/// `a × v` for real `a`.
pub fn cross_real(a: &[f64; 3], v: &CVec3) -> CVec3 {
    [
        v[2] * a[1] - v[1] * a[2],
        v[0] * a[2] - v[2] * a[0],
        v[1] * a[0] - v[0] * a[1],
    ]
}

fn nonzero(n: &WaveVector) -> Result<()> {
    if n.is_zero() {
        Err(Error::ZeroWaveVector)
    } else {
        Ok(())
    }
}

/// `|ň·v| / (|ň||v|)`, zero for a zero vector.
pub fn divergence_residual(n: &WaveVector, v: &CVec3) -> f64 {
    let denom = n.norm * norm_sq(v).sqrt();
    if denom == 0.0 {
        0.0
    } else {
        dot_real(&n.adjusted, v).norm() / denom
    }
}

fn check_div_free(n: &WaveVector, v: &CVec3) -> Result<()> {
    let residual = divergence_residual(n, v);
    if residual > DIV_TOL {
        Err(Error::Divergence { residual, tolerance: DIV_TOL })
    } else {
        Ok(())
    }
}

/// `v − ň(ň·v)/|ň|²`.
pub fn leray_project(n: &WaveVector, v: &CVec3) -> Result<CVec3> {
    nonzero(n)?;
    Ok(leray_unchecked(&n.adjusted, n.norm_sq(), v))
}

pub(crate) fn leray_unchecked(a: &[f64; 3], a_sq: f64, v: &CVec3) -> CVec3 {
    let c = dot_real(a, v) / a_sq;
    [v[0] - c * a[0], v[1] - c * a[1], v[2] - c * a[2]]
}

/// The Coriolis symbol `(ň₃/|ň|²)(ň × v)` on a divergence-free `v`.
pub fn coriolis_apply(n: &WaveVector, v: &CVec3) -> Result<CVec3> {
    nonzero(n)?;
    check_div_free(n, v)?;
    let c = n.adjusted[2] / n.norm_sq();
    Ok(scale(&cross_real(&n.adjusted, v), Complex64::new(c, 0.0)))
}

/// Dispersion relation `ω = σ ň₃/|ň|`.
pub fn dispersion(n: &WaveVector, sigma: Sign) -> Result<f64> {
    Ok(sigma.value() * n.polar_cos()?)
}

/// The helical vector `r^σ`.
///
/// `r̃ = ň×ẑ/|ň×ẑ|` (or `x̂` on the polar axis), `r̃̃ = n̂×r̃`, and
/// `r^∓ = (r̃ ± i r̃̃)/√2`, so that `n̂ × r^σ = σ i r^σ`.
pub fn helical_vector(n: &WaveVector, sigma: Sign) -> Result<CVec3> {
    nonzero(n)?;
    let a = n.adjusted;
    let unit = [a[0] / n.norm, a[1] / n.norm, a[2] / n.norm];
    let h = (a[0] * a[0] + a[1] * a[1]).sqrt();
    let t1 = if h == 0.0 { [1.0, 0.0, 0.0] } else { [a[1] / h, -a[0] / h, 0.0] };
    let t2 = [
        unit[1] * t1[2] - unit[2] * t1[1],
        unit[2] * t1[0] - unit[0] * t1[2],
        unit[0] * t1[1] - unit[1] * t1[0],
    ];
    let s = -sigma.value() / std::f64::consts::SQRT_2;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    Ok([0, 1, 2].map(|i| Complex64::new(r * t1[i], s * t2[i])))
}

/// Eigen-projection `(v·conj(r^σ)) r^σ`.
pub fn helical_project(n: &WaveVector, sigma: Sign, v: &CVec3) -> Result<CVec3> {
    let r = helical_vector(n, sigma)?;
    Ok(scale(&r, hdot(v, &r)))
}

/// `e^{τℒ} v`: rotation of `v` about `ň/|ň|` by the angle `τ ň₃/|ň|`.
pub fn wave_exponential(n: &WaveVector, tau: f64, v: &CVec3) -> Result<CVec3> {
    nonzero(n)?;
    check_div_free(n, v)?;
    let axis = n.adjusted.map(|x| x / n.norm);
    let (s, c) = (tau * axis[2]).sin_cos();
    Ok(rotate(&axis, c, s, v))
}

/// Rodrigues rotation with precomputed `cos` and `sin`.
pub(crate) fn rotate(axis: &[f64; 3], cos: f64, sin: f64, v: &CVec3) -> CVec3 {
    let kxv = cross_real(axis, v);
    let along = dot_real(axis, v) * (1.0 - cos);
    [0, 1, 2].map(|i| v[i] * cos + kxv[i] * sin + along * axis[i])
}
