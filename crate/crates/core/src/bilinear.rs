//! The advection bilinear form restricted to near-resonant triads.
//!
//! For fields on a truncation ball the coefficient at `p` is
//!
//! ```text
//! B̃(U,V)_p = P_p Σ_{k+m=p} i (U_k·m̌) V_m 1_N(−p,k,m)
//! ```
//!
//! with `P_p` the Leray projection. Sums are direct, so there is no aliasing.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::helical::{self, CVec3, ZERO3};
use crate::lattice::ModeTable;
use crate::par;
use crate::resonance::{min_abs_triplet, BandwidthMode, BandwidthSpec, RESONANCE_TOL};

/// Per-mode data needed by the indicator.
struct IndicatorData {
    cosines: Vec<f64>,
    deltas: Vec<f64>,
    all_pass: bool,
}

impl IndicatorData {
    fn new(table: &ModeTable, spec: &BandwidthSpec) -> Self {
        let modes = table.modes();
        IndicatorData {
            cosines: modes.iter().map(|w| w.adjusted[2] / w.norm).collect(),
            // δ is a nonincreasing function of the largest norm, so the
            // triad value is the smallest of the three per-mode values.
            deltas: modes.iter().map(|w| spec.delta_for_max(w.norm)).collect(),
            all_pass: spec.mode == BandwidthMode::AllPass,
        }
    }

    #[inline]
    fn keep(&self, p: usize, k: usize, m: usize) -> bool {
        if self.all_pass {
            return true;
        }
        let delta = self.deltas[p].min(self.deltas[k]).min(self.deltas[m]);
        min_abs_triplet(self.cosines[p], self.cosines[k], self.cosines[m]) <= delta + RESONANCE_TOL
    }
}

fn validate_spec(spec: &BandwidthSpec) -> Result<()> {
    spec.validate()
}

/// Index pairs `(k, m)` feeding each output mode, for one table and spec.
#[derive(Debug, Clone)]
pub struct TriadPlan {
    table: Arc<ModeTable>,
    spec: BandwidthSpec,
    offsets: Vec<usize>,
    pairs: Vec<(u32, u32)>,
}

impl TriadPlan {
    pub fn new(table: Arc<ModeTable>, spec: BandwidthSpec) -> Result<Self> {
        validate_spec(&spec)?;
        let ind = IndicatorData::new(&table, &spec);
        let per_p = par::map_range(table.len(), |p| {
            let mut out = Vec::new();
            for_each_pair(&table, &ind, p, |k, m| out.push((k as u32, m as u32)));
            out
        });
        let mut offsets = Vec::with_capacity(per_p.len() + 1);
        offsets.push(0);
        let mut pairs = Vec::with_capacity(per_p.iter().map(Vec::len).sum());
        for v in per_p {
            pairs.extend_from_slice(&v);
            offsets.push(pairs.len());
        }
        Ok(TriadPlan { table, spec, offsets, pairs })
    }

    pub fn table(&self) -> &Arc<ModeTable> {
        &self.table
    }

    pub fn spec(&self) -> &BandwidthSpec {
        &self.spec
    }

    /// Number of ordered `(k, m)` pairs retained over all outputs.
    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// `B̃(U,V)` on raw coefficient slices.
    pub(crate) fn apply_raw(&self, u: &[CVec3], v: &[CVec3]) -> Vec<CVec3> {
        let modes = self.table.modes();
        par::map_range(modes.len(), |p| {
            let mut acc = ZERO3;
            for &(k, m) in &self.pairs[self.offsets[p]..self.offsets[p + 1]] {
                accumulate(&mut acc, &u[k as usize], &modes[m as usize].adjusted, &v[m as usize]);
            }
            finish(&modes[p], acc)
        })
    }

    pub fn apply(&self, u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
        self.check(u)?;
        self.check(v)?;
        Ok(SpectralField::from_raw(self.table.clone(), self.apply_raw(u.coeffs(), v.coeffs())))
    }

    /// `e^{−τℒ} B̃(e^{τℒ}u, e^{τℒ}v)`.
    pub fn apply_transformed(&self, tau: f64, u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
        let (ur, vr) = (u.wave_rotate(tau), v.wave_rotate(tau));
        Ok(self.apply(&ur, &vr)?.wave_rotate(-tau))
    }

    fn check(&self, f: &SpectralField) -> Result<()> {
        if f.table().same_truncation(&self.table) {
            Ok(())
        } else {
            Err(Error::TruncationMismatch)
        }
    }
}

#[inline]
fn for_each_pair<F: FnMut(usize, usize)>(table: &ModeTable, ind: &IndicatorData, p: usize, mut f: F) {
    let modes = table.modes();
    let pn = modes[p].n;
    for (k, kw) in modes.iter().enumerate() {
        let mn = [pn[0] - kw.n[0], pn[1] - kw.n[1], pn[2] - kw.n[2]];
        if let Some(m) = table.index_of(mn) {
            if ind.keep(p, k, m) {
                f(k, m);
            }
        }
    }
}

#[inline]
fn accumulate(acc: &mut CVec3, uk: &CVec3, m_adj: &[f64; 3], vm: &CVec3) {
    let c = helical::dot_real(m_adj, uk);
    let c = Complex64::new(-c.im, c.re);
    acc[0] += c * vm[0];
    acc[1] += c * vm[1];
    acc[2] += c * vm[2];
}

#[inline]
fn finish(w: &crate::lattice::WaveVector, acc: CVec3) -> CVec3 {
    helical::leray_unchecked(&w.adjusted, w.norm_sq(), &acc)
}

/// `B̃(U,V)` computed directly without storing a plan.
pub fn bilinear(u: &SpectralField, v: &SpectralField, spec: &BandwidthSpec) -> Result<SpectralField> {
    u.check_same(v)?;
    validate_spec(spec)?;
    let table = u.table().clone();
    let ind = IndicatorData::new(&table, spec);
    let (uc, vc) = (u.coeffs(), v.coeffs());
    let modes = table.modes();
    let out = par::map_range(modes.len(), |p| {
        let mut acc = ZERO3;
        for_each_pair(&table, &ind, p, |k, m| accumulate(&mut acc, &uc[k], &modes[m].adjusted, &vc[m]));
        finish(&modes[p], acc)
    });
    Ok(SpectralField::from_raw(table, out))
}

/// `e^{−τℒ} B̃(e^{τℒ}u, e^{τℒ}v)`.
pub fn bilinear_transformed(tau: f64, u: &SpectralField, v: &SpectralField, spec: &BandwidthSpec) -> Result<SpectralField> {
    let (ur, vr) = (u.wave_rotate(tau), v.wave_rotate(tau));
    Ok(bilinear(&ur, &vr, spec)?.wave_rotate(-tau))
}

/// `⟨D^s B̃(u,v), D^s w⟩` as a complex number.
pub fn trilinear_complex(
    u: &SpectralField,
    v: &SpectralField,
    w: &SpectralField,
    s: f64,
    spec: &BandwidthSpec,
) -> Result<Complex64> {
    u.check_same(v)?;
    u.check_same(w)?;
    validate_spec(spec)?;
    let d = w.divergence_residual();
    if d > helical::DIV_TOL {
        return Err(Error::Divergence { residual: d, tolerance: helical::DIV_TOL });
    }
    let table = u.table().clone();
    let ind = IndicatorData::new(&table, spec);
    let (uc, vc, wc) = (u.coeffs(), v.coeffs(), w.coeffs());
    let modes = table.modes();
    let per_p = par::map_range(modes.len(), |p| {
        let wp = helical::conj(&wc[p]);
        let mut acc = Complex64::new(0.0, 0.0);
        for_each_pair(&table, &ind, p, |k, m| {
            let c = helical::dot_real(&modes[m].adjusted, &uc[k]);
            let vw = vc[m][0] * wp[0] + vc[m][1] * wp[1] + vc[m][2] * wp[2];
            acc += Complex64::new(-c.im, c.re) * vw;
        });
        let weight = if s == 0.0 { 1.0 } else { modes[p].norm.powf(2.0 * s) };
        acc * weight
    });
    let sum: Complex64 = per_p.into_iter().sum();
    Ok(sum * table.geometry().volume())
}

/// Real part of [`trilinear_complex`]; the imaginary part vanishes for real fields.
pub fn trilinear(u: &SpectralField, v: &SpectralField, w: &SpectralField, s: f64, spec: &BandwidthSpec) -> Result<f64> {
    Ok(trilinear_complex(u, v, w, s, spec)?.re)
}

/// `|⟨D^s B̃(u,v), D^s w⟩|` over the right side of the 2D-like estimate with
/// unit constant:
///
/// ```text
/// 2^s (‖u‖₀‖v‖_{s+1} + ‖u‖_s‖v‖₁) ‖w‖_{s+1} + 2^s (‖u‖₁‖v‖_{s+1} + ‖u‖_{s+1}‖v‖₁) ‖w‖_s
/// ```
///
/// Accepts the theorem rule and, for contrast, the all-pass rule. A vanishing
/// denominator with some nonzero field gives 0.
pub fn estimate_ratio_2d(u: &SpectralField, v: &SpectralField, w: &SpectralField, s: f64, spec: &BandwidthSpec) -> Result<f64> {
    if !matches!(spec.mode, BandwidthMode::Theorem | BandwidthMode::AllPass) {
        return Err(Error::invalid("the 2D-like ratio needs the theorem bandwidth rule"));
    }
    let num = trilinear_complex(u, v, w, s, spec)?.norm();
    let n = |f: &SpectralField, t: f64| f.hs_norm(t);
    let two_s = 2f64.powf(s);
    let den = two_s * (n(u, 0.0) * n(v, s + 1.0) + n(u, s) * n(v, 1.0)) * n(w, s + 1.0)
        + two_s * (n(u, 1.0) * n(v, s + 1.0) + n(u, s + 1.0) * n(v, 1.0)) * n(w, s);
    if [u, v, w].iter().all(|f| f.hs_norm_sq(0.0) == 0.0) {
        return Err(Error::invalid("all-zero fields give a zero denominator"));
    }
    // Every term of the denominator carries a norm of `u` and of `v`, so a
    // zero denominator comes with a zero pairing.
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok(num / den)
}
