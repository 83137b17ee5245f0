//! Continuous sublevel sets of the triplet value and the elliptic machinery
//! used to bound their volume.
//!
//! For fixed `n` and signs `(σ1, σ2)`,
//!
//! ```text
//! F(k) = σ1 ň₃/|ň| + σ2 ǩ₃/|ǩ| + m̌₃/|m̌|,   m = −n − k,
//! V    = { k : |F(k)| ≤ δ,  ½|ň| ≤ |ǩ| ≤ |ň| }.
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::helical::Sign;
use crate::lattice::TorusGeometry;
use crate::par;
use crate::quadrature::{integrate, integrate_endpoint_singular};

/// Smallest gap allowed among `1, c_n², c_k², c_m²`.
pub const DEGENERACY_GAP: f64 = 1e-9;

/// Samples drawn from one random stream in [`volume_mc`].
pub const MC_BATCH: u64 = 1 << 16;

/// Minimum sample count accepted by [`volume_mc`].
pub const MIN_SAMPLES: u64 = 10_000;

/// A fixed `n`, sign pair and bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SublevelProblem {
    n: [f64; 3],
    norm: f64,
    /// `|ň|²` as a sum of squares, so lattice points on the sphere compare exactly.
    norm_sq: f64,
    sigma1: Sign,
    sigma2: Sign,
    delta: f64,
    geom: TorusGeometry,
}

impl SublevelProblem {
    /// Problem for an integer mode `n`.
    pub fn new(n: [i64; 3], sigma1: Sign, sigma2: Sign, delta: f64, geom: TorusGeometry) -> Result<Self> {
        let w = geom.adjust(n);
        Self::from_adjusted(w.adjusted, sigma1, sigma2, delta, geom)
    }

    /// Problem for an arbitrary adjusted frequency `ň ∈ ℝ³`.
    pub fn from_adjusted(n: [f64; 3], sigma1: Sign, sigma2: Sign, delta: f64, geom: TorusGeometry) -> Result<Self> {
        let norm_sq = n[0] * n[0] + n[1] * n[1] + n[2] * n[2];
        let norm = norm_sq.sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::ZeroWaveVector);
        }
        if !(0.0..0.5).contains(&delta) {
            return Err(Error::invalid(format!("delta must lie in [0, 1/2), got {delta}")));
        }
        Ok(SublevelProblem { n, norm, norm_sq, sigma1, sigma2, delta, geom })
    }

    /// Same problem with any bandwidth, including values outside `[0, 1/2)`.
    pub fn with_delta_override(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn n_adjusted(&self) -> [f64; 3] {
        self.n
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn signs(&self) -> (Sign, Sign) {
        (self.sigma1, self.sigma2)
    }

    pub fn geometry(&self) -> &TorusGeometry {
        &self.geom
    }

    /// `ň₃/|ň|`.
    pub fn polar_cos(&self) -> f64 {
        self.n[2] / self.norm
    }

    /// `F` at an adjusted `ǩ`; `None` at `ǩ ∈ {0, −ň}`.
    pub fn f_adjusted(&self, k: [f64; 3]) -> Option<f64> {
        let m = [-self.n[0] - k[0], -self.n[1] - k[1], -self.n[2] - k[2]];
        let (kn, mn) = (norm3(k), norm3(m));
        if kn == 0.0 || mn == 0.0 {
            return None;
        }
        Some(self.sigma1.value() * self.n[2] / self.norm + self.sigma2.value() * k[2] / kn + m[2] / mn)
    }

    /// Whether an adjusted `ǩ` lies in the annulus `½|ň| ≤ |ǩ| ≤ |ň|`.
    pub fn in_annulus(&self, k: [f64; 3]) -> bool {
        let r2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        4.0 * r2 >= self.norm_sq && r2 <= self.norm_sq
    }

    /// Adjusted coordinates of a point of `k`-space.
    pub fn adjust_point(&self, k: [f64; 3]) -> [f64; 3] {
        [k[0] / self.geom.l1(), k[1] / self.geom.l2(), k[2]]
    }
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// `F(k)` for a real point `k` of `k`-space.
pub fn f_value(prob: &SublevelProblem, k: [f64; 3]) -> Result<f64> {
    prob.f_adjusted(prob.adjust_point(k))
        .ok_or_else(|| Error::invalid(format!("F is undefined at k = {k:?}")))
}

/// A Monte-Carlo volume with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
    pub hits: u64,
}

/// Monte-Carlo estimate of `vol(V)` in `k`-space.
///
/// Points are drawn uniformly from the cube `[−|ň|, |ň|]³` of adjusted
/// coordinates. Batch `b` of [`MC_BATCH`] samples uses stream `b` of a
/// ChaCha8 generator seeded with `seed`, so the estimate does not depend on the
/// thread count.
pub fn volume_mc(prob: &SublevelProblem, samples: u64, seed: u64) -> Result<VolumeEstimate> {
    if samples < MIN_SAMPLES {
        return Err(Error::invalid(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    if !prob.delta.is_finite() {
        return Err(Error::invalid("delta must be finite"));
    }
    if prob.delta == 0.0 {
        // A level set has no volume.
        return Ok(VolumeEstimate { estimate: 0.0, std_error: 0.0, samples, hits: 0 });
    }
    let hits = mc_hits(prob, samples, seed);
    let r = prob.norm;
    let box_volume = 8.0 * r * r * r * prob.geom.l1() * prob.geom.l2();
    let p = hits as f64 / samples as f64;
    Ok(VolumeEstimate {
        estimate: box_volume * p,
        std_error: box_volume * (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
        hits,
    })
}

fn mc_hits(prob: &SublevelProblem, samples: u64, seed: u64) -> u64 {
    let batches = samples.div_ceil(MC_BATCH);
    let r = prob.norm;
    par::sum_i64_range(0, batches as i64 - 1, |b| {
        let b = b as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b);
        let count = MC_BATCH.min(samples - b * MC_BATCH);
        let mut hits = 0;
        for _ in 0..count {
            let k = [0, 1, 2].map(|_| r * (2.0 * rng.random::<f64>() - 1.0));
            if prob.in_annulus(k) && prob.f_adjusted(k).is_some_and(|f| f.abs() <= prob.delta) {
                hits += 1;
            }
        }
        hits
    })
}

/// Exact `k`-space volume of the annulus `½|ň| ≤ |ǩ| ≤ |ň|`.
pub fn annulus_volume(prob: &SublevelProblem) -> f64 {
    let r = prob.norm;
    4.0 / 3.0 * std::f64::consts::PI * (1.0 - 0.125) * r * r * r * prob.geom.l1() * prob.geom.l2()
}

/// `max(0, ln x)`.
pub fn log_plus(x: f64) -> f64 {
    x.ln().max(0.0)
}

/// `L1 L2 |ň|³ (δ + δ log⁺(1/(δ + 2|ň₃|/|ň|)))`, with unit constant.
pub fn theorem_volume_bound(prob: &SublevelProblem) -> Result<f64> {
    let d = prob.delta;
    if !(0.0..0.5).contains(&d) {
        return Err(Error::invalid(format!("delta must lie in [0, 1/2), got {d}")));
    }
    if d == 0.0 {
        return Ok(0.0);
    }
    let r = prob.norm;
    let tilt = 2.0 * prob.n[2].abs() / r;
    let scale = prob.geom.l1() * prob.geom.l2() * r * r * r;
    Ok(scale * (d + d * log_plus(1.0 / (d + tilt))))
}

/// Polar angles `(θ_n, θ_k, θ_m)` in `[0, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleTriple {
    pub theta_n: f64,
    pub theta_k: f64,
    pub theta_m: f64,
}

impl AngleTriple {
    pub fn new(theta_n: f64, theta_k: f64, theta_m: f64) -> Result<Self> {
        let ok = |t: f64| (0.0..=std::f64::consts::PI).contains(&t);
        if !(ok(theta_n) && ok(theta_k) && ok(theta_m)) {
            return Err(Error::invalid("polar angles must lie in [0, π]"));
        }
        Ok(AngleTriple { theta_n, theta_k, theta_m })
    }

    pub fn from_cosines(c_n: f64, c_k: f64, c_m: f64) -> Result<Self> {
        let ok = |c: f64| (-1.0..=1.0).contains(&c);
        if !(ok(c_n) && ok(c_k) && ok(c_m)) {
            return Err(Error::invalid("cosines must lie in [−1, 1]"));
        }
        Ok(AngleTriple { theta_n: c_n.acos(), theta_k: c_k.acos(), theta_m: c_m.acos() })
    }

    /// `(c_n, c_k, c_m)`.
    pub fn cosines(&self) -> [f64; 3] {
        [self.theta_n.cos(), self.theta_k.cos(), self.theta_m.cos()]
    }

    /// `(1, c_n², c_k², c_m²)`.
    pub fn varsigma(&self) -> [f64; 4] {
        let [cn, ck, cm] = self.cosines();
        [1.0, cn * cn, ck * ck, cm * cm]
    }

    /// `(𝒞⁺⁺, 𝒞⁺⁻, 𝒞⁻⁺, 𝒞⁻⁻)` with `𝒞^{σk,σn} = cos(θ_m + σk θ_k + σn θ_n)`.
    pub fn coset_cosines(&self) -> [f64; 4] {
        let (n, k, m) = (self.theta_n, self.theta_k, self.theta_m);
        [(m + k + n).cos(), (m + k - n).cos(), (m - k + n).cos(), (m - k - n).cos()]
    }

    /// Rejects configurations where two of `1, c_n², c_k², c_m²` nearly coincide.
    pub fn check_admissible(&self) -> Result<()> {
        let v = self.varsigma();
        for i in 0..4 {
            for j in i + 1..4 {
                if (v[i] - v[j]).abs() < DEGENERACY_GAP {
                    return Err(Error::Degenerate(format!(
                        "squared cosines {i} and {j} differ by {:.3e}",
                        (v[i] - v[j]).abs()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The quartic
///
/// ```text
/// q = [2 λ sinθ_k sinθ_n c_m²]² − [(λ² + 1 + 2λ c_n c_k) c_m² − (λ c_k + c_n)²]²
/// ```
pub fn q_quartic(lambda_k: f64, theta_k: f64, c_m: f64, theta_n: f64) -> f64 {
    let (sk, ck) = theta_k.sin_cos();
    let (sn, cn) = theta_n.sin_cos();
    let cm2 = c_m * c_m;
    let a = 2.0 * lambda_k * sk * sn * cm2;
    let l = lambda_k * ck + cn;
    let b = (lambda_k * lambda_k + 1.0 + 2.0 * lambda_k * cn * ck) * cm2 - l * l;
    a * a - b * b
}

/// `q` as minus the product of its two quadratic factors in `λ`.
pub fn q_factored(lambda_k: f64, theta_k: f64, c_m: f64, theta_n: f64) -> f64 {
    let (ck, cn) = (theta_k.cos(), theta_n.cos());
    let cm2 = c_m * c_m;
    let lead = cm2 - ck * ck;
    let tail = cm2 - cn * cn;
    let quad = |cos_sum: f64| lead * lambda_k * lambda_k + 2.0 * (cos_sum * cm2 - cn * ck) * lambda_k + tail;
    -quad((theta_k + theta_n).cos()) * quad((theta_k - theta_n).cos())
}

/// The four `λ_k`-zeros of `q`, ordered `(Λ⁺⁺, Λ⁺⁻, Λ⁻⁺, Λ⁻⁻)`:
///
/// ```text
/// Λ^{σk,σn} = (c_n c_k − 𝒞^{σk,σn} c_m) / (c_m² − c_k²)
/// ```
pub fn lambda_roots(angles: &AngleTriple) -> Result<[f64; 4]> {
    angles.check_admissible()?;
    let [cn, ck, cm] = angles.cosines();
    let den = cm * cm - ck * ck;
    Ok(angles.coset_cosines().map(|c| (cn * ck - c * cm) / den))
}

/// The same roots through `Λ^{σk,σn} = −sin(θ_m + σn θ_n) / sin(θ_m − σk θ_k)`.
pub fn lambda_roots_sine(angles: &AngleTriple) -> Result<[f64; 4]> {
    angles.check_admissible()?;
    let (n, k, m) = (angles.theta_n, angles.theta_k, angles.theta_m);
    let root = |sk: f64, sn: f64| -(m + sn * n).sin() / (m - sk * k).sin();
    Ok([root(1.0, 1.0), root(1.0, -1.0), root(-1.0, 1.0), root(-1.0, -1.0)])
}

/// Interlaced, enclosed and separated difference products of `(a, b, c, d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiProducts {
    /// `(a − c)(b − d)`
    pub il: f64,
    /// `(a − d)(b − c)`
    pub ec: f64,
    /// `(a − b)(c − d)`
    pub sp: f64,
}

impl PiProducts {
    /// `𝗄² = Π_SP / Π_IL`.
    pub fn k_sq(&self) -> f64 {
        self.sp / self.il
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.il, self.ec, self.sp]
    }
}

pub fn pi_products(v: [f64; 4]) -> PiProducts {
    let [a, b, c, d] = v;
    PiProducts { il: (a - c) * (b - d), ec: (a - d) * (b - c), sp: (a - b) * (c - d) }
}

/// The Klein four-group as index maps on four positions.
pub const K4: [[usize; 4]; 4] = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]];

/// Applies an index map: `out[i] = v[perm[i]]`.
pub fn permute(v: [f64; 4], perm: [usize; 4]) -> [f64; 4] {
    perm.map(|i| v[i])
}

/// The index map that sorts `v` in descending order.
pub fn sorting_permutation(v: [f64; 4]) -> [usize; 4] {
    let mut idx = [0, 1, 2, 3];
    idx.sort_by(|&i, &j| v[j].total_cmp(&v[i]));
    idx
}

/// Coset representative fixing the first entry, read off the signs of
/// `(Π_EC, Π_SP, Π_IL)`; `None` for the two impossible sign patterns or a zero
/// product.
pub fn coset_representative(v: [f64; 4]) -> Option<[usize; 4]> {
    let p = pi_products(v);
    if p.ec == 0.0 || p.sp == 0.0 || p.il == 0.0 {
        return None;
    }
    match (p.ec > 0.0, p.sp > 0.0, p.il > 0.0) {
        (true, true, true) => Some([0, 1, 2, 3]),
        (false, false, false) => Some([0, 3, 2, 1]),
        (true, false, false) => Some([0, 3, 1, 2]),
        (false, true, true) => Some([0, 2, 1, 3]),
        (false, true, false) => Some([0, 2, 3, 1]),
        (true, false, true) => Some([0, 1, 3, 2]),
        _ => None,
    }
}

/// Whether `perm` lies in the coset `K4 ∘ rep`.
pub fn in_coset(perm: [usize; 4], rep: [usize; 4]) -> bool {
    K4.iter().any(|k| (0..4).all(|i| perm[i] == rep[k[i]]))
}

/// Residuals of the two correspondences between `𝒞` and `ς`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correspondence {
    /// Largest `|Π(π𝒞) − 4Π(πς)|` over all 24 index maps and the three products.
    pub first: f64,
    /// Largest `|Π(𝒞_s) − 4Π(ς_s)|` after sorting both vectors.
    pub second: f64,
    /// Whether the sorting maps of `𝒞` and `ς` share a coset.
    pub same_coset: bool,
}

/// All 24 index maps on four positions, in lexicographic order.
pub fn all_permutations() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|i| p.contains(&i)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

pub fn correspondence_check(angles: &AngleTriple) -> Correspondence {
    let c = angles.coset_cosines();
    let s = angles.varsigma();
    let residual = |x: [f64; 4], y: [f64; 4]| {
        let (p, q) = (pi_products(x).as_array(), pi_products(y).as_array());
        (0..3).map(|i| (p[i] - 4.0 * q[i]).abs()).fold(0.0, f64::max)
    };
    let first = all_permutations()
        .into_iter()
        .map(|p| residual(permute(c, p), permute(s, p)))
        .fold(0.0, f64::max);
    let (pc, ps) = (sorting_permutation(c), sorting_permutation(s));
    let second = residual(permute(c, pc), permute(s, ps));
    let same_coset = K4.iter().any(|k| (0..4).all(|i| pc[i] == ps[k[i]]));
    Correspondence { first, second, same_coset }
}

/// Incomplete elliptic integral of the first kind,
/// `F(Ψ, k) = ∫_0^Ψ dx / √(1 − k² sin² x)`.
///
/// # Errors
///
/// `Ψ` outside `[0, π/2]` or `k` outside `[0, 1)`.
pub fn elliptic_f(psi: f64, k: f64) -> Result<f64> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&psi) {
        return Err(Error::invalid(format!("amplitude must lie in [0, π/2], got {psi}")));
    }
    if !(0.0..1.0).contains(&k) {
        return Err(Error::invalid(format!("modulus must lie in [0, 1), got {k}")));
    }
    if psi == 0.0 {
        return Ok(0.0);
    }
    if k == 0.0 {
        return Ok(psi);
    }
    let k2 = k * k;
    let q = integrate(
        |x| {
            let s = x.sin();
            1.0 / (1.0 - k2 * s * s).sqrt()
        },
        0.0,
        psi,
        1e-15,
        1e-13,
    )?;
    Ok(q.value)
}

/// Both sides of
///
/// ```text
/// ∫_(b,y] dλ / √(−(λ−a)(λ−b)(λ−c)(λ−d)) = 𝗀 F(arcsin y₀, 𝗄)
/// ```
///
/// for `a > y > b > c > d`, with `𝗀 = 2/√Π_IL`, `𝗄² = Π_SP/Π_IL` and
/// `y₀² = (a−c)(y−b) / ((a−b)(y−c))`. The left side is integrated directly
/// after an arcsine substitution at `b`.
pub fn elliptic_substitution_check(a: f64, y: f64, b: f64, c: f64, d: f64) -> Result<(f64, f64)> {
    if !(a > y && y > b && b > c && c > d) {
        return Err(Error::invalid("need a > y > b > c > d"));
    }
    let lhs = integrate_endpoint_singular(
        |_, from_b, _| {
            let l = b + from_b;
            1.0 / (from_b * (a - l) * (l - c) * (l - d)).sqrt()
        },
        b,
        y,
        1e-15,
        1e-12,
    )?
    .value;
    let p = pi_products([a, b, c, d]);
    let g = 2.0 / p.il.sqrt();
    let y0 = ((a - c) * (y - b) / ((a - b) * (y - c))).sqrt();
    let rhs = g * elliptic_f(y0.asin(), p.k_sq().sqrt())?;
    Ok((lhs, rhs))
}

/// `𝖰(θ_k, c_m)` for fixed `θ_n`, with `c_m = cos θ_m`:
///
/// ```text
/// 𝖰 = |c_m| / |c_m² − c_k²| ∫ dλ / √(−Π(λ − Λ_i))
/// ```
///
/// over `((Λ₄,Λ₃) ∪ (Λ₂,Λ₁)) ∩ [½, 1]`, with the roots sorted descending.
pub fn q_integral(angles: &AngleTriple) -> Result<f64> {
    let mut roots = lambda_roots(angles)?;
    roots.sort_by(|x, y| y.total_cmp(x));
    let [_, ck, cm] = angles.cosines();
    let mut total = 0.0;
    for (upper, lower) in [(roots[0], roots[1]), (roots[2], roots[3])] {
        let lo = lower.max(0.5);
        let hi = upper.min(1.0);
        if lo >= hi {
            continue;
        }
        let q = integrate_endpoint_singular(
            |_, from_lo, from_hi| {
                let l = lo + from_lo;
                let mut prod = 1.0;
                for &r in &roots {
                    let dist = if r == lo {
                        from_lo
                    } else if r == hi {
                        from_hi
                    } else {
                        (l - r).abs()
                    };
                    prod *= dist;
                }
                1.0 / prod.sqrt()
            },
            lo,
            hi,
            1e-14,
            1e-11,
        )?;
        total += q.value;
    }
    Ok(cm.abs() / (cm * cm - ck * ck).abs() * total)
}

/// One point of a [`q_integral_bound_check`] sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QBoundRow {
    pub angles: AngleTriple,
    pub q: f64,
    pub pi_il: f64,
    pub pi_ec: f64,
    /// `𝖰 √Π_IL / (1 + log √(Π_IL/Π_EC))`.
    pub general_ratio: f64,
    /// `𝖰 √Π_IL` when `|c_n| < min(|c_k|, |c_m|)`.
    pub sharp_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QBoundReport {
    pub rows: Vec<QBoundRow>,
    pub skipped: usize,
    /// Smallest constant for the general bound on this grid.
    pub k_general: f64,
    /// Smallest constant for the conditional bound on this grid.
    pub k_sharp: f64,
}

/// Evaluates `𝖰` over a grid and fits the constants of both bounds.
///
/// Degenerate points are skipped and counted.
pub fn q_integral_bound_check(grid: &[AngleTriple]) -> Result<QBoundReport> {
    let results = par::map_slice(grid, |a| -> Result<Option<QBoundRow>> {
        if a.check_admissible().is_err() {
            return Ok(None);
        }
        let q = q_integral(a)?;
        let mut s = a.varsigma();
        s.sort_by(|x, y| y.total_cmp(x));
        let p = pi_products(s);
        let general_ratio = q * p.il.sqrt() / (1.0 + (p.il / p.ec).sqrt().ln());
        let [cn, ck, cm] = a.cosines();
        let sharp_ratio = (cn.abs() < ck.abs().min(cm.abs())).then(|| q * p.il.sqrt());
        Ok(Some(QBoundRow { angles: *a, q, pi_il: p.il, pi_ec: p.ec, general_ratio, sharp_ratio }))
    });
    let mut rows = Vec::new();
    let mut skipped = 0;
    for r in results {
        match r? {
            Some(row) => rows.push(row),
            None => skipped += 1,
        }
    }
    let k_general = rows.iter().map(|r| r.general_ratio).fold(0.0, f64::max);
    let k_sharp = rows.iter().filter_map(|r| r.sharp_ratio).fold(0.0, f64::max);
    Ok(QBoundReport { rows, skipped, k_general, k_sharp })
}

/// Cartesian grid of cosines `c_n, c_k, c_m` drawn from `values`.
pub fn cosine_grid(values: &[f64]) -> Result<Vec<AngleTriple>> {
    let mut out = Vec::with_capacity(values.len().pow(3));
    for &cn in values {
        for &ck in values {
            for &cm in values {
                out.push(AngleTriple::from_cosines(cn, ck, cm)?);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_products_by_hand() {
        let p = pi_products([4.0, 3.0, 2.0, 1.0]);
        assert_eq!((p.il, p.ec, p.sp), (4.0, 3.0, 1.0));
    }

    #[test]
    fn elliptic_f_trivial_values() {
        assert_eq!(elliptic_f(0.7, 0.0).unwrap(), 0.7);
        assert_eq!(elliptic_f(0.0, 0.5).unwrap(), 0.0);
        assert!(elliptic_f(0.5, 1.0).is_err());
        assert!(elliptic_f(2.0, 0.5).is_err());
    }

    #[test]
    fn degenerate_angles_are_rejected() {
        let a = AngleTriple::from_cosines(0.3, 0.5, -0.5).unwrap();
        assert!(matches!(lambda_roots(&a), Err(Error::Degenerate(_))));
    }

    #[test]
    fn coset_table_rows() {
        assert_eq!(coset_representative([4.0, 3.0, 2.0, 1.0]), Some([0, 1, 2, 3]));
        assert_eq!(coset_representative([4.0, 1.0, 2.0, 3.0]), Some([0, 3, 2, 1]));
        assert_eq!(coset_representative([4.0, 2.0, 1.0, 3.0]), Some([0, 3, 1, 2]));
        assert_eq!(all_permutations().len(), 24);
    }

    #[test]
    fn horizontal_n_and_k() {
        let p = SublevelProblem::new([3, 4, 0], Sign::Plus, Sign::Minus, 0.1, TorusGeometry::unit()).unwrap();
        assert_eq!(f_value(&p, [1.0, -2.0, 0.0]).unwrap(), 0.0);
        assert!(f_value(&p, [-3.0, -4.0, 0.0]).is_err());
    }
}
