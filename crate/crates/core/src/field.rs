//! Truncated spectral velocity fields.

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::helical::{self, CVec3, ZERO3};
use crate::lattice::{ModeTable, TorusGeometry, WaveVector};
use crate::par;

/// Default absolute tolerance of the reality check.
pub const REALITY_TOL: f64 = 1e-12;

/// Fourier coefficients on every mode of a truncation ball.
///
/// Coefficients are stored densely in the lexicographic mode order of the
/// table; modes that were never set hold zero.
#[derive(Debug, Clone)]
pub struct SpectralField {
    table: Arc<ModeTable>,
    coeffs: Vec<CVec3>,
}

impl PartialEq for SpectralField {
    fn eq(&self, other: &Self) -> bool {
        self.table.same_truncation(&other.table) && self.coeffs == other.coeffs
    }
}

impl SpectralField {
    pub fn zeros(table: Arc<ModeTable>) -> Self {
        let coeffs = vec![ZERO3; table.len()];
        SpectralField { table, coeffs }
    }

    /// Field from explicit coefficients, which must lie inside the ball.
    pub fn from_modes<I>(table: Arc<ModeTable>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ([i64; 3], CVec3)>,
    {
        let mut f = SpectralField::zeros(table);
        for (n, v) in entries {
            f.set(n, v)?;
        }
        Ok(f)
    }

    pub(crate) fn from_raw(table: Arc<ModeTable>, coeffs: Vec<CVec3>) -> Self {
        debug_assert_eq!(table.len(), coeffs.len());
        SpectralField { table, coeffs }
    }

    pub fn table(&self) -> &Arc<ModeTable> {
        &self.table
    }

    pub fn geometry(&self) -> &TorusGeometry {
        self.table.geometry()
    }

    pub fn radius(&self) -> f64 {
        self.table.radius()
    }

    pub fn coeffs(&self) -> &[CVec3] {
        &self.coeffs
    }

    pub fn get(&self, n: [i64; 3]) -> Option<CVec3> {
        self.table.index_of(n).map(|i| self.coeffs[i])
    }

    pub fn set(&mut self, n: [i64; 3], v: CVec3) -> Result<()> {
        let i = self
            .table
            .index_of(n)
            .ok_or_else(|| Error::invalid(format!("mode {n:?} lies outside the truncation ball")))?;
        self.coeffs[i] = v;
        Ok(())
    }

    /// Modes paired with their coefficients in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (&WaveVector, &CVec3)> {
        self.table.modes().iter().zip(self.coeffs.iter())
    }

    pub fn scaled(&self, c: f64) -> SpectralField {
        let s = Complex64::new(c, 0.0);
        SpectralField::from_raw(self.table.clone(), self.coeffs.iter().map(|v| helical::scale(v, s)).collect())
    }

    pub fn difference(&self, other: &SpectralField) -> Result<SpectralField> {
        self.check_same(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| helical::sub(a, b)).collect();
        Ok(SpectralField::from_raw(self.table.clone(), coeffs))
    }

    pub(crate) fn check_same(&self, other: &SpectralField) -> Result<()> {
        if self.table.same_truncation(&other.table) {
            Ok(())
        } else {
            Err(Error::TruncationMismatch)
        }
    }

    /// `Σ |ň|^{2s} |u_n|²` scaled by the torus volume, i.e. `‖u‖_s²`.
    pub fn hs_norm_sq(&self, s: f64) -> f64 {
        let sum: f64 = self
            .iter()
            .map(|(w, v)| weight(w.norm, s) * helical::norm_sq(v))
            .sum();
        self.geometry().volume() * sum
    }

    /// Homogeneous Sobolev norm `‖u‖_s`.
    pub fn hs_norm(&self, s: f64) -> f64 {
        self.hs_norm_sq(s).sqrt()
    }

    /// `max_n |conj(u_n) − u_{−n}|`.
    pub fn reality_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (w, v) in self.iter() {
            let partner = self.get(w.n.map(|x| -x)).expect("balls are symmetric");
            worst = worst.max(helical::norm_sq(&helical::sub(&helical::conj(v), &partner)).sqrt());
        }
        worst
    }

    /// `max_n |ň·u_n| / (|ň||u_n|)`.
    pub fn divergence_residual(&self) -> f64 {
        self.iter()
            .map(|(w, v)| helical::divergence_residual(w, v))
            .fold(0.0, f64::max)
    }

    /// Checks reality and incompressibility against the default tolerances.
    pub fn validate(&self) -> Result<()> {
        let r = self.reality_residual();
        if r > REALITY_TOL {
            return Err(Error::invalid(format!("field is not real: residual {r:.3e}")));
        }
        let d = self.divergence_residual();
        if d > helical::DIV_TOL {
            return Err(Error::Divergence { residual: d, tolerance: helical::DIV_TOL });
        }
        Ok(())
    }

    /// Applies `e^{τℒ}` mode by mode.
    pub fn wave_rotate(&self, tau: f64) -> SpectralField {
        let modes = self.table.modes();
        let coeffs = par::map_range(modes.len(), |i| {
            let w = &modes[i];
            let axis = w.adjusted.map(|x| x / w.norm);
            let (s, c) = (tau * axis[2]).sin_cos();
            helical::rotate(&axis, c, s, &self.coeffs[i])
        });
        SpectralField::from_raw(self.table.clone(), coeffs)
    }

    /// One text line per mode: `n1 n2 n3 reU1 imU1 reU2 imU2 reU3 imU3`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (w, v) in self.iter() {
            let _ = write!(out, "{} {} {}", w.n[0], w.n[1], w.n[2]);
            for c in v {
                let _ = write!(out, " {:e} {:e}", c.re, c.im);
            }
            out.push('\n');
        }
        out
    }

    /// Parses the format of [`SpectralField::to_text`].
    pub fn from_text(table: Arc<ModeTable>, text: &str) -> Result<Self> {
        let mut f = SpectralField::zeros(table);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::invalid(format!("malformed snapshot line {}", lineno + 1));
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 9 {
                return Err(bad());
            }
            let mut n = [0i64; 3];
            for d in 0..3 {
                n[d] = parts[d].parse().map_err(|_| bad())?;
            }
            let mut x = [0f64; 6];
            for j in 0..6 {
                x[j] = parts[3 + j].parse().map_err(|_| bad())?;
            }
            f.set(n, [0, 1, 2].map(|d| Complex64::new(x[2 * d], x[2 * d + 1])))?;
        }
        Ok(f)
    }
}

fn weight(norm: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else {
        norm.powf(2.0 * s)
    }
}

/// `u = e^{−Ωtℒ} U`.
pub fn to_transformed(u: &SpectralField, omega: f64, t: f64) -> SpectralField {
    u.wave_rotate(-omega * t)
}

/// `U = e^{Ωtℒ} u`.
pub fn from_transformed(u: &SpectralField, omega: f64, t: f64) -> SpectralField {
    u.wave_rotate(omega * t)
}

/// Random real, divergence-free field with `|u_n| ∝ amplitude |ň|^{−s−2}`.
///
/// Each conjugate pair is drawn once, visiting modes in lexicographic order
/// and keeping the member whose first nonzero coordinate is positive.
pub fn random_field(radius: f64, geom: TorusGeometry, s: f64, amplitude: f64, seed: u64) -> Result<SpectralField> {
    if radius < 2.0 {
        return Err(Error::invalid(format!("random fields need radius ≥ 2, got {radius}")));
    }
    let table = Arc::new(ModeTable::new(radius, geom)?);
    random_field_on(table, s, amplitude, seed)
}

/// As [`random_field`] on an existing table.
pub fn random_field_on(table: Arc<ModeTable>, s: f64, amplitude: f64, seed: u64) -> Result<SpectralField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(table.clone());
    for (i, w) in table.modes().iter().enumerate() {
        if !is_positive_representative(w.n) {
            continue;
        }
        let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
        let raw: CVec3 = [0, 1, 2].map(|_| Complex64::new(draw(), draw()));
        let scale = amplitude * w.norm.powf(-s - 2.0);
        let v = helical::scale(&helical::leray_unchecked(&w.adjusted, w.norm_sq(), &raw), Complex64::new(scale, 0.0));
        f.coeffs[i] = v;
        let j = table.index_of(w.n.map(|x| -x)).expect("balls are symmetric");
        f.coeffs[j] = helical::conj(&v);
    }
    Ok(f)
}

fn is_positive_representative(n: [i64; 3]) -> bool {
    n.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_table(r: f64) -> Arc<ModeTable> {
        Arc::new(ModeTable::new(r, TorusGeometry::unit()).unwrap())
    }

    #[test]
    fn two_mode_parseval() {
        let t = unit_table(2.0);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let f = SpectralField::from_modes(t, [([0, 0, 1], [one, zero, zero]), ([0, 0, -1], [one, zero, zero])]).unwrap();
        let vol = (2.0 * std::f64::consts::PI).powi(3);
        assert!((f.hs_norm(0.0) - (2.0 * vol).sqrt()).abs() < 1e-12);
        assert_eq!(SpectralField::zeros(unit_table(2.0)).hs_norm(1.0), 0.0);
    }

    #[test]
    fn shell_homogeneity() {
        let t = unit_table(6.0);
        let v = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.5), Complex64::new(0.0, 0.0)];
        let f = SpectralField::from_modes(t, [([3, 0, 4], v), ([-3, 0, -4], helical::conj(&v))]).unwrap();
        assert!((f.hs_norm(1.0) / f.hs_norm(0.0) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn outside_ball_is_rejected() {
        let mut f = SpectralField::zeros(unit_table(2.0));
        assert!(f.set([2, 0, 0], ZERO3).is_err());
    }

    #[test]
    fn random_field_is_deterministic_and_valid() {
        let a = random_field(4.0, TorusGeometry::unit(), 1.0, 1.0, 9).unwrap();
        let b = random_field(4.0, TorusGeometry::unit(), 1.0, 1.0, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.validate().is_ok());
        assert!(a.divergence_residual() < 1e-14);
        assert!(a.hs_norm(1.0).is_finite() && a.hs_norm(1.0) > 0.0);
        assert!(random_field(1.5, TorusGeometry::unit(), 1.0, 1.0, 9).is_err());
    }

    #[test]
    fn snapshot_round_trip() {
        let a = random_field(3.0, TorusGeometry::unit(), 1.0, 1.0, 4).unwrap();
        let b = SpectralField::from_text(a.table().clone(), &a.to_text()).unwrap();
        assert_eq!(a, b);
        assert!(SpectralField::from_text(a.table().clone(), "1 0 0 1 2").is_err());
    }
}
