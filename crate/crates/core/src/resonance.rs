//! Triplet values, bandwidth rules, near-resonance membership and triad counts.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::helical::Sign;
use crate::lattice::{TorusGeometry, WaveVector};
use crate::par;

/// Slack added to every bandwidth comparison.
///
/// Exact resonances evaluate to a few ulps rather than to zero in floating
/// point; integer triads that are not resonant stay far above this level.
pub const RESONANCE_TOL: f64 = 1e-14;

/// `(σ1, σ2, σ3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignTriple(pub [Sign; 3]);

impl SignTriple {
    /// All eight sign triples.
    pub fn all() -> [SignTriple; 8] {
        let mut out = [SignTriple([Sign::Plus; 3]); 8];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = SignTriple([0, 1, 2].map(|b| if i >> b & 1 == 0 { Sign::Plus } else { Sign::Minus }));
        }
        out
    }

    pub fn negate(self) -> SignTriple {
        SignTriple(self.0.map(Sign::flip))
    }
}

/// How the bandwidth `δ(n,k,m)` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandwidthMode {
    /// `δ log(1/δ) = ĉ / N_max`.
    Theorem,
    Constant,
    /// Exact resonances only.
    Zero,
    /// Every triad passes.
    AllPass,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthSpec {
    pub mode: BandwidthMode,
    pub c_hat: f64,
    pub cap: f64,
    pub const_delta: f64,
}

pub const DEFAULT_CAP: f64 = 0.49;

impl BandwidthSpec {
    pub fn theorem(c_hat: f64) -> Self {
        BandwidthSpec { mode: BandwidthMode::Theorem, c_hat, cap: DEFAULT_CAP, const_delta: 0.0 }
    }

    pub fn constant(delta: f64) -> Self {
        BandwidthSpec { mode: BandwidthMode::Constant, c_hat: 1.0, cap: DEFAULT_CAP, const_delta: delta }
    }

    pub fn zero() -> Self {
        BandwidthSpec { mode: BandwidthMode::Zero, c_hat: 1.0, cap: DEFAULT_CAP, const_delta: 0.0 }
    }

    pub fn all_pass() -> Self {
        BandwidthSpec { mode: BandwidthMode::AllPass, c_hat: 1.0, cap: DEFAULT_CAP, const_delta: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cap > 0.0 && self.cap < 0.5) {
            return Err(Error::invalid(format!("cap must lie in (0, 1/2), got {}", self.cap)));
        }
        match self.mode {
            BandwidthMode::Theorem if !(self.c_hat > 0.0 && self.c_hat.is_finite()) => {
                Err(Error::invalid(format!("c_hat must be positive, got {}", self.c_hat)))
            }
            BandwidthMode::Constant if !(self.const_delta >= 0.0 && self.const_delta < 0.5) => {
                Err(Error::invalid(format!("constant delta must lie in [0, 1/2), got {}", self.const_delta)))
            }
            _ => Ok(()),
        }
    }

    /// `δ` for a triad whose largest adjusted norm is `n_max`.
    ///
    /// All-pass returns `+∞`.
    pub fn delta_for_max(&self, n_max: f64) -> f64 {
        match self.mode {
            BandwidthMode::Theorem => theorem_delta(self.c_hat / n_max, self.cap),
            BandwidthMode::Constant => self.const_delta.min(self.cap),
            BandwidthMode::Zero => 0.0,
            BandwidthMode::AllPass => f64::INFINITY,
        }
    }
}

/// Root of `δ log(1/δ) = target` on `(0, 1/e)`, or `cap` past the branch top.
pub fn theorem_delta(target: f64, cap: f64) -> f64 {
    let top = (-1.0f64).exp();
    if !(target > 0.0) {
        return 0.0;
    }
    if target >= top {
        return cap;
    }
    let f = |d: f64| d * (1.0 / d).ln();
    let (mut lo, mut hi) = (0.0f64, top);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    lo.min(cap)
}

fn check_nonzero(ws: [&WaveVector; 3]) -> Result<()> {
    if ws.iter().any(|w| w.is_zero()) {
        Err(Error::ZeroWaveVector)
    } else {
        Ok(())
    }
}

/// `σ1 ň₃/|ň| + σ2 ǩ₃/|ǩ| + σ3 m̌₃/|m̌|`.
pub fn triplet_value(n: &WaveVector, k: &WaveVector, m: &WaveVector, s: SignTriple) -> Result<f64> {
    check_nonzero([n, k, m])?;
    let [a, b, c] = [n, k, m].map(|w| w.adjusted[2] / w.norm);
    Ok(s.0[0].value() * a + s.0[1].value() * b + s.0[2].value() * c)
}

/// `min_σ |σ1 a + σ2 b + σ3 c|` from the three polar cosines.
///
/// With `x ≥ y ≥ z` the sorted absolute values, the minimum over all sign
/// patterns is `|x − y − z|`. Evaluating it on the sorted values makes the
/// result bitwise invariant under permutations and negation of the triad.
pub fn min_abs_triplet(a: f64, b: f64, c: f64) -> f64 {
    let (mut x, mut y, mut z) = (a.abs(), b.abs(), c.abs());
    if x < y {
        std::mem::swap(&mut x, &mut y);
    }
    if y < z {
        std::mem::swap(&mut y, &mut z);
    }
    if x < y {
        std::mem::swap(&mut x, &mut y);
    }
    ((x - y) - z).abs()
}

/// Minimum of `|triplet_value|` over all sign triples.
pub fn min_triplet(n: &WaveVector, k: &WaveVector, m: &WaveVector) -> Result<f64> {
    check_nonzero([n, k, m])?;
    let [a, b, c] = [n, k, m].map(|w| w.adjusted[2] / w.norm);
    Ok(min_abs_triplet(a, b, c))
}

/// `δ(n,k,m)`; depends only on the largest of the three norms.
pub fn bandwidth(n: &WaveVector, k: &WaveVector, m: &WaveVector, spec: &BandwidthSpec) -> Result<f64> {
    check_nonzero([n, k, m])?;
    Ok(spec.delta_for_max(n.norm.max(k.norm).max(m.norm)))
}

/// Membership of a convolution triad in the near-resonance set.
pub fn is_near_resonant(n: &WaveVector, k: &WaveVector, m: &WaveVector, spec: &BandwidthSpec) -> Result<bool> {
    if (0..3).any(|i| n.n[i] + k.n[i] + m.n[i] != 0) {
        return Err(Error::Convolution(n.n, k.n, m.n));
    }
    check_nonzero([n, k, m])?;
    if spec.mode == BandwidthMode::AllPass {
        return Ok(true);
    }
    Ok(min_triplet(n, k, m)? <= bandwidth(n, k, m, spec)? + RESONANCE_TOL)
}

/// Search region for [`enumerate_triads_for`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TriadOrdering {
    /// No ordering; `k` ranges over `|ǩ| ≤ radius`.
    Unordered { radius: f64 },
    /// `|ň| ≥ |ǩ| ≥ |ň+ǩ|`, ties included.
    N0,
}

fn triad_slab<F: FnMut([i64; 3])>(
    n: &WaveVector,
    geom: &TorusGeometry,
    spec: &BandwidthSpec,
    ordering: TriadOrdering,
    k3: i64,
    mut visit: F,
) {
    let (b1, b2, radius) = search_box(n, geom, ordering);
    for k1 in -b1..=b1 {
        for k2 in -b2..=b2 {
            let k = [k1, k2, k3];
            let m = [-n.n[0] - k1, -n.n[1] - k2, -n.n[2] - k3];
            if k == [0, 0, 0] || m == [0, 0, 0] {
                continue;
            }
            match ordering {
                TriadOrdering::N0 => {
                    if geom.cmp_norm(n.n, k) == Ordering::Less || geom.cmp_norm(k, m) == Ordering::Less {
                        continue;
                    }
                }
                TriadOrdering::Unordered { .. } => {
                    if geom.cmp_norm_radius(k, radius) == Ordering::Greater {
                        continue;
                    }
                }
            }
            let (kw, mw) = (geom.adjust(k), geom.adjust(m));
            if is_near_resonant(n, &kw, &mw, spec).unwrap_or(false) {
                visit(k);
            }
        }
    }
}

fn search_box(n: &WaveVector, geom: &TorusGeometry, ordering: TriadOrdering) -> (i64, i64, f64) {
    match ordering {
        TriadOrdering::N0 => {
            let b = (n.norm * geom.l1().max(geom.l2()).max(1.0)).ceil() as i64;
            (b, b, n.norm)
        }
        TriadOrdering::Unordered { radius } => {
            ((radius * geom.l1()).ceil() as i64, (radius * geom.l2()).ceil() as i64, radius)
        }
    }
}

fn k3_range(n: &WaveVector, geom: &TorusGeometry, ordering: TriadOrdering) -> Result<i64> {
    if n.is_zero() {
        return Err(Error::ZeroWaveVector);
    }
    match ordering {
        TriadOrdering::N0 => Ok((n.norm * geom.l1().max(geom.l2()).max(1.0)).ceil() as i64),
        TriadOrdering::Unordered { radius } if radius.is_finite() && radius > 0.0 => Ok(radius.ceil() as i64),
        TriadOrdering::Unordered { radius } => Err(Error::invalid(format!("search radius must be positive, got {radius}"))),
    }
}

/// Every `k` with `(n, k, −n−k)` near-resonant inside the search region,
/// sorted lexicographically.
pub fn enumerate_triads_for(
    n: &WaveVector,
    geom: &TorusGeometry,
    spec: &BandwidthSpec,
    ordering: TriadOrdering,
) -> Result<Vec<[i64; 3]>> {
    spec.validate()?;
    let b3 = k3_range(n, geom, ordering)?;
    let slabs = par::map_range((2 * b3 + 1) as usize, |i| {
        let mut out = Vec::new();
        triad_slab(n, geom, spec, ordering, i as i64 - b3, |k| out.push(k));
        out
    });
    let mut all: Vec<[i64; 3]> = slabs.into_iter().flatten().collect();
    all.sort_unstable();
    Ok(all)
}

/// Number of triads [`enumerate_triads_for`] would return.
pub fn count_triads(n: &WaveVector, geom: &TorusGeometry, spec: &BandwidthSpec, ordering: TriadOrdering) -> Result<u64> {
    spec.validate()?;
    let b3 = k3_range(n, geom, ordering)?;
    Ok(par::sum_i64_range(-b3, b3, |k3| {
        let mut c = 0u64;
        triad_slab(n, geom, spec, ordering, k3, |_| c += 1);
        c
    }))
}

/// One line of a counting report.
#[derive(Debug, Clone, PartialEq)]
pub struct CountRow {
    pub n: [i64; 3],
    pub norm: f64,
    pub count: u64,
    pub bound: f64,
    pub ratio: f64,
}

/// Ordered-triad counts against `C|ň|`.
///
/// `C` is taken from `c_bound`, or else fitted as `count/|ň|` on the first row.
pub fn count_report(
    ns: &[[i64; 3]],
    geom: &TorusGeometry,
    spec: &BandwidthSpec,
    c_bound: Option<f64>,
) -> Result<Vec<CountRow>> {
    let mut rows = Vec::with_capacity(ns.len());
    let mut c = c_bound;
    for &n in ns {
        let w = geom.adjust(n);
        let count = count_triads(&w, geom, spec, TriadOrdering::N0)?;
        let c_fit = *c.get_or_insert(count as f64 / w.norm);
        let bound = c_fit * w.norm;
        let ratio = if bound > 0.0 { count as f64 / bound } else { f64::NAN };
        rows.push(CountRow { n, norm: w.norm, count, bound, ratio });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g() -> TorusGeometry {
        TorusGeometry::unit()
    }

    #[test]
    fn vertical_collinear_triplet() {
        let (n, k, m) = (g().adjust([0, 0, 1]), g().adjust([0, 0, 1]), g().adjust([0, 0, -2]));
        let v = triplet_value(&n, &k, &m, SignTriple([Sign::Plus; 3])).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(min_triplet(&n, &k, &m).unwrap(), 1.0);
        assert!(!is_near_resonant(&n, &k, &m, &BandwidthSpec::constant(0.49)).unwrap());
        assert!(is_near_resonant(&n, &k, &m, &BandwidthSpec::all_pass()).unwrap());
    }

    #[test]
    fn horizontal_triads_resonate() {
        let (n, k, m) = (g().adjust([1, 2, 0]), g().adjust([3, -1, 0]), g().adjust([-4, -1, 0]));
        for s in SignTriple::all() {
            assert_eq!(triplet_value(&n, &k, &m, s).unwrap(), 0.0);
        }
        assert!(is_near_resonant(&n, &k, &m, &BandwidthSpec::zero()).unwrap());
    }

    #[test]
    fn convolution_and_zero_checks() {
        let (n, k) = (g().adjust([1, 0, 0]), g().adjust([0, 1, 0]));
        assert!(matches!(
            is_near_resonant(&n, &k, &g().adjust([1, 1, 0]), &BandwidthSpec::zero()),
            Err(Error::Convolution(..))
        ));
        let z = g().adjust([0, 0, 0]);
        assert_eq!(min_triplet(&n, &k, &z), Err(Error::ZeroWaveVector));
    }

    #[test]
    fn bandwidth_modes() {
        assert_eq!(BandwidthSpec::zero().delta_for_max(5.0), 0.0);
        assert_eq!(BandwidthSpec::theorem(1.0).delta_for_max(2.0), 0.49);
        assert_eq!(BandwidthSpec::constant(0.1).delta_for_max(100.0), 0.1);
        assert!(BandwidthSpec::theorem(-1.0).validate().is_err());
        assert!(BandwidthSpec::constant(0.6).validate().is_err());
    }

    #[test]
    fn missing_radius_is_rejected() {
        let n = g().adjust([1, 0, 0]);
        let bad = TriadOrdering::Unordered { radius: f64::NAN };
        assert!(enumerate_triads_for(&n, &g(), &BandwidthSpec::zero(), bad).is_err());
    }

    #[test]
    fn empty_report() {
        assert!(count_report(&[], &g(), &BandwidthSpec::theorem(1.0), None).unwrap().is_empty());
    }
}
