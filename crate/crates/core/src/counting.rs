//! Exact lattice-point counts: sublevel sets, explicit lower-bound families,
//! planar slices and regions bounded by disjoint ellipses.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{Ratio, TorusGeometry};
use crate::par;
use crate::quadrature::integrate;
use crate::resonance::{is_near_resonant, BandwidthSpec, RESONANCE_TOL};
use crate::sublevel::{SublevelProblem, MC_BATCH, MIN_SAMPLES};

/// Largest `|ň|` accepted by [`count_sublevel_integers`].
pub const MAX_COUNT_NORM: f64 = 256.0;

/// Points with `||F| − δ|` below this margin are counted both ways.
pub const TIE_MARGIN: f64 = 1e-12;

/// A lattice count reported as `[strict, relaxed]`.
///
/// `strict` uses `|F| ≤ δ − margin`, `relaxed` uses `|F| ≤ δ + margin`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CountInterval {
    pub strict: u64,
    pub relaxed: u64,
}

impl std::ops::Add for CountInterval {
    type Output = CountInterval;

    fn add(self, o: CountInterval) -> CountInterval {
        CountInterval { strict: self.strict + o.strict, relaxed: self.relaxed + o.relaxed }
    }
}

fn classify(f: f64, delta: f64, acc: &mut CountInterval) {
    let a = f.abs();
    if a <= delta + TIE_MARGIN {
        acc.relaxed += 1;
        if a <= delta - TIE_MARGIN {
            acc.strict += 1;
        }
    }
}

/// `#{k ∈ ℤ³ : k ∈ V}` by scanning the integer box around the annulus.
pub fn count_sublevel_integers(prob: &SublevelProblem) -> Result<CountInterval> {
    let r = prob.norm();
    if r > MAX_COUNT_NORM {
        return Err(Error::ResourceLimit(format!("|ň| = {r} exceeds {MAX_COUNT_NORM}")));
    }
    let delta = prob.delta();
    if delta < 0.0 {
        return Ok(CountInterval::default());
    }
    let g = prob.geometry();
    let b1 = (r * g.l1()).ceil() as i64;
    let b2 = (r * g.l2()).ceil() as i64;
    let b3 = r.ceil() as i64;
    let slabs = par::map_range((2 * b3 + 1) as usize, |i| {
        let k3 = i as i64 - b3;
        let mut acc = CountInterval::default();
        for k1 in -b1..=b1 {
            for k2 in -b2..=b2 {
                let k = prob.adjust_point([k1 as f64, k2 as f64, k3 as f64]);
                if !prob.in_annulus(k) {
                    continue;
                }
                if let Some(f) = prob.f_adjusted(k) {
                    classify(f, delta, &mut acc);
                }
            }
        }
        acc
    });
    Ok(slabs.into_iter().fold(CountInterval::default(), |a, b| a + b))
}

/// Result of one explicit lower-bound construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundCount {
    /// Points found by enumerating the set.
    pub exact_count: u64,
    /// Closed-form count for the slow-fast family, `None` for fast-fast.
    pub formula_count: Option<u64>,
    /// Growth expression the count is compared with.
    pub scaling: f64,
    /// Points failing a localisation, sign or near-resonance check.
    pub violations: u64,
    /// Largest `|triplet value|` over the enumerated points.
    pub max_abs_triplet: f64,
}

fn exact_delta(delta: f64) -> Result<(i128, i128)> {
    let r = Ratio::from_f64_shortest(delta).ok_or_else(|| Error::invalid(format!("delta = {delta}")))?;
    Ok((r.num, r.den))
}

fn sq(v: [i64; 3]) -> i128 {
    v.iter().map(|&x| (x as i128) * (x as i128)).sum()
}

/// Checks the localisation `|n| ≥ |k| ≥ |n+k| ≥ |n|/3` on squared norms.
fn localised(nn: i128, kk: i128, mm: i128) -> bool {
    nn >= kk && kk >= mm && 9 * mm >= nn
}

/// Whether the triad is NR for the constant rule, evaluated on the mode triple.
fn nr_member(n: [i64; 3], k: [i64; 3], m: [i64; 3], spec: &BandwidthSpec) -> bool {
    let g = TorusGeometry::unit();
    is_near_resonant(&g.adjust(n), &g.adjust(k), &g.adjust(m), spec).unwrap_or(false)
}

/// The slow-fast family with `n = (−2N, 0, 0)`:
///
/// ```text
/// k₁ ∈ [N, N + (N/3) min{δN/|k₃|, 1}],  |k₂| ≤ N,  1 ≤ |k₃| ≤ N.
/// ```
///
/// The bound on `k₁` uses `|k₃|`, so both signs of `k₃` contribute equally.
/// The closed form is `Σ_{1≤|k₃|≤N} (2N+1)(1 + ⌊(N/3) min{δN/|k₃|, 1}⌋)`.
/// Both are evaluated with `δ` as an exact decimal rational.
pub fn lower_bound_slow_fast(n_half: i64, delta: f64) -> Result<LowerBoundCount> {
    let big_n = n_half;
    if big_n < 4 {
        return Err(Error::invalid(format!("N must be at least 4, got {big_n}")));
    }
    if !(0.0..0.5).contains(&delta) {
        return Err(Error::invalid(format!("delta must lie in [0, 1/2), got {delta}")));
    }
    let (p, q) = exact_delta(delta)?;
    let nn = big_n as i128;
    let spec = BandwidthSpec::constant(delta);
    let n = [-2 * big_n, 0, 0];
    let n_sq = sq(n);

    let mut formula = 0u64;
    for a in 1..=nn {
        let steps = if p * nn >= a * q { nn / 3 } else { p * nn * nn / (3 * a * q) };
        formula += 2 * (2 * nn as u64 + 1) * (1 + steps as u64);
    }

    // (count, violations, max |value|) per k₃
    let per_k3 = par::map_range((2 * big_n) as usize, |i| {
        let k3 = if (i as i64) < big_n { i as i64 - big_n } else { i as i64 - big_n + 1 };
        let a = k3.unsigned_abs() as i128;
        let (mut count, mut bad, mut worst) = (0u64, 0u64, 0f64);
        for k2 in -big_n..=big_n {
            let mut k1 = big_n;
            loop {
                let step = (k1 - big_n) as i128;
                if 3 * step > nn || 3 * step * a * q > p * nn * nn {
                    break;
                }
                let k = [k1, k2, k3];
                let m = [2 * big_n - k1, -k2, -k3];
                let (kk, mm) = (sq(k), sq(m));
                let value = k3 as f64 / (kk as f64).sqrt() + m[2] as f64 / (mm as f64).sqrt();
                worst = worst.max(value.abs());
                let ok = localised(n_sq, kk, mm) && value.abs() <= delta + RESONANCE_TOL && nr_member(n, k, m, &spec);
                if !ok {
                    bad += 1;
                }
                count += 1;
                k1 += 1;
            }
        }
        (count, bad, worst)
    });
    let (exact_count, violations, max_abs_triplet) = fold_counts(per_k3);
    let norm = 2.0 * big_n as f64;
    let scaling = norm * norm + norm.powi(3) * delta * if delta > 0.0 { (1.0 / delta).ln() } else { 0.0 };
    Ok(LowerBoundCount { exact_count, formula_count: Some(formula), scaling, violations, max_abs_triplet })
}

fn fold_counts(v: Vec<(u64, u64, f64)>) -> (u64, u64, f64) {
    v.into_iter().fold((0, 0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1, a.2.max(b.2)))
}

/// `x ≤ c √m` for `x, c ≥ 0`, exactly when the squares fit in `i128`.
fn le_coef_sqrt(x: i128, c: i128, m: i128) -> bool {
    match (x.checked_mul(x), c.checked_mul(c).and_then(|c2| c2.checked_mul(m))) {
        (Some(l), Some(r)) => l <= r,
        _ => (x as f64) <= (c as f64) * (m as f64).sqrt(),
    }
}

/// `|k| (1 + δ|n|) ≥ |n|` with `δ = p/q`, `K = |k|²`, `M = |n|²`.
fn outside_inner_radius(kk: i128, mm: i128, p: i128, q: i128) -> bool {
    let exact = || -> Option<bool> {
        // q√K + p√(KM) ≥ q√M  ⇔  2pqK√M ≥ q²(M − K) − p²KM
        let rest = q.checked_mul(q)?.checked_mul(mm - kk)?.checked_sub(p.checked_mul(p)?.checked_mul(kk)?.checked_mul(mm)?)?;
        if rest <= 0 {
            return Some(true);
        }
        let lhs = p.checked_mul(q)?.checked_mul(2)?.checked_mul(kk)?;
        let l2 = lhs.checked_mul(lhs)?.checked_mul(mm)?;
        Some(l2 >= rest.checked_mul(rest)?)
    };
    exact().unwrap_or_else(|| {
        let (k, n, d) = ((kk as f64).sqrt(), (mm as f64).sqrt(), p as f64 / q as f64);
        k * (1.0 + d * n) >= n
    })
}

/// The fast-fast family with `n = (−2N, 0, −1)`:
///
/// ```text
/// |n|/(1 + δ|n|) ≤ |k| ≤ |n|,
/// k₁ ∈ [N, N + (N/3) min{δ|n| / (2(k₃−1)), 1}],
/// k₃ ∈ [2, (N/3) min{√(δ|n|), 1}].
/// ```
///
/// Every point is checked for localisation, for the split of the triplet
/// value into a nonpositive and a nonnegative part, and for NR membership.
pub fn lower_bound_fast_fast(n_half: i64, delta: f64) -> Result<LowerBoundCount> {
    let big_n = n_half;
    if big_n < 8 {
        return Err(Error::invalid(format!("N must be at least 8, got {big_n}")));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::invalid(format!("delta must lie in (0, 1/2), got {delta}")));
    }
    let (p, q) = exact_delta(delta)?;
    let nn = big_n as i128;
    if p * 4 * nn * nn < q {
        return Err(Error::invalid(format!("delta = {delta} is below 1/(2N)²")));
    }
    let n = [-2 * big_n, 0, -1];
    let m_sq = sq(n);
    let spec = BandwidthSpec::constant(delta);
    let norm = (m_sq as f64).sqrt();
    let k2_max = norm.floor() as i64;

    let mut k3_values = Vec::new();
    let mut k3 = 2i64;
    loop {
        let t = 3 * k3 as i128;
        // 3k₃ ≤ N  and  (3k₃)² ≤ N² δ |n|
        if t > nn || !le_coef_sqrt(t * t * q, nn * nn * p, m_sq) {
            break;
        }
        k3_values.push(k3);
        k3 += 1;
    }

    let per_k3 = par::map_slice(&k3_values, |&k3| {
        let (mut count, mut bad, mut worst) = (0u64, 0u64, 0f64);
        let mut k1 = big_n;
        loop {
            let step = (k1 - big_n) as i128;
            let ok_k1 = 3 * step <= nn && le_coef_sqrt(6 * step * (k3 as i128 - 1) * q, nn * p, m_sq);
            if !ok_k1 {
                break;
            }
            for k2 in -k2_max..=k2_max {
                let k = [k1, k2, k3];
                let kk = sq(k);
                if kk > m_sq || !outside_inner_radius(kk, m_sq, p, q) {
                    continue;
                }
                let m = [2 * big_n - k1, -k2, 1 - k3];
                let mm = sq(m);
                let (nf, kf, mf) = ((m_sq as f64).sqrt(), (kk as f64).sqrt(), (mm as f64).sqrt());
                let c = (k3 - 1) as f64;
                let flat = 1.0 / nf - 1.0 / kf;
                let sharp = c / mf - c / kf;
                let value = flat + sharp;
                worst = worst.max(value.abs());
                let ok = localised(m_sq, kk, mm)
                    && flat <= 0.0
                    && sharp >= 0.0
                    && value.abs() <= delta + RESONANCE_TOL
                    && nr_member(n, k, m, &spec);
                if !ok {
                    bad += 1;
                }
                count += 1;
            }
            k1 += 1;
        }
        (count, bad, worst)
    });
    let (exact_count, violations, max_abs_triplet) = fold_counts(per_k3);
    let dn = delta * norm;
    let scaling = norm * norm * dn.powf(1.5).min(1.0)
        + norm.powi(3) * delta * (1.0 / delta).ln().min(dn * norm.ln());
    Ok(LowerBoundCount { exact_count, formula_count: None, scaling, violations, max_abs_triplet })
}

/// An axis-aligned ellipse. `interior` marks curves with the region inside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub center: [f64; 2],
    pub semi_axes: [f64; 2],
    pub interior: bool,
}

impl Ellipse {
    pub fn circle(center: [f64; 2], radius: f64, interior: bool) -> Self {
        Ellipse { center, semi_axes: [radius, radius], interior }
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.semi_axes[0] * self.semi_axes[1]
    }

    /// Perimeter `∫_0^{2π} √(a² sin² t + b² cos² t) dt`.
    pub fn perimeter(&self) -> f64 {
        let [a, b] = self.semi_axes;
        if a == b {
            return 2.0 * std::f64::consts::PI * a;
        }
        let q = integrate(
            |t: f64| {
                let (s, c) = t.sin_cos();
                (a * a * s * s + b * b * c * c).sqrt()
            },
            0.0,
            std::f64::consts::FRAC_PI_2,
            1e-15,
            1e-14,
        )
        .expect("smooth periodic integrand");
        4.0 * q.value
    }

    fn max_axis(&self) -> f64 {
        self.semi_axes[0].max(self.semi_axes[1])
    }

    fn min_axis(&self) -> f64 {
        self.semi_axes[0].min(self.semi_axes[1])
    }

    /// Position of a lattice point: `Less` inside, `Equal` on, `Greater` outside.
    ///
    /// Exact in rational arithmetic when the center and axes are short decimals.
    pub fn locate(&self, p: [i64; 2]) -> Ordering {
        self.locate_exact(p).unwrap_or_else(|| {
            let x = (p[0] as f64 - self.center[0]) / self.semi_axes[0];
            let y = (p[1] as f64 - self.center[1]) / self.semi_axes[1];
            (x * x + y * y).partial_cmp(&1.0).unwrap_or(Ordering::Greater)
        })
    }

    fn locate_exact(&self, p: [i64; 2]) -> Option<Ordering> {
        let cx = Ratio::from_f64_shortest(self.center[0])?;
        let cy = Ratio::from_f64_shortest(self.center[1])?;
        let a = Ratio::from_f64_shortest(self.semi_axes[0])?;
        let b = Ratio::from_f64_shortest(self.semi_axes[1])?;
        // ((x−cx)/a)² + ((y−cy)/b)² vs 1, scaled by (cx.den·cy.den·a.num·b.num)²
        let dx = (p[0] as i128).checked_mul(cx.den)?.checked_sub(cx.num)?;
        let dy = (p[1] as i128).checked_mul(cy.den)?.checked_sub(cy.num)?;
        let u = dx.checked_mul(a.den)?.checked_mul(cy.den)?.checked_mul(b.num)?;
        let v = dy.checked_mul(b.den)?.checked_mul(cx.den)?.checked_mul(a.num)?;
        let w = cx.den.checked_mul(a.num)?.checked_mul(cy.den)?.checked_mul(b.num)?;
        let lhs = u.checked_mul(u)?.checked_add(v.checked_mul(v)?)?;
        Some(lhs.cmp(&w.checked_mul(w)?))
    }

    /// Whether the closed ellipse lies in the open unit box around `p`.
    fn inside_box(&self, p: [i64; 2]) -> bool {
        (0..2).all(|i| {
            let c = self.center[i] - p[i] as f64;
            c - self.semi_axes[i] > -0.5 && c + self.semi_axes[i] < 0.5
        })
    }
}

/// Disjoint nested ellipses bounding a region `S`.
///
/// A point off the curves lies in `S` when the innermost curve around it is
/// tagged `interior`. Tags must alternate with nesting depth, starting with
/// `interior` for outermost curves.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveFamily {
    curves: Vec<Ellipse>,
    depth: Vec<usize>,
}

/// Relation certified from centers and axes alone.
#[derive(Debug, PartialEq)]
enum Relation {
    Apart,
    FirstInsideSecond,
    SecondInsideFirst,
    Unknown,
}

fn relation(a: &Ellipse, b: &Ellipse) -> Relation {
    let d = ((a.center[0] - b.center[0]).powi(2) + (a.center[1] - b.center[1]).powi(2)).sqrt();
    if d > a.max_axis() + b.max_axis() {
        Relation::Apart
    } else if d + a.max_axis() < b.min_axis() {
        Relation::FirstInsideSecond
    } else if d + b.max_axis() < a.min_axis() {
        Relation::SecondInsideFirst
    } else {
        Relation::Unknown
    }
}

impl CurveFamily {
    /// # Errors
    ///
    /// Nonpositive axes, pairs whose disjointness cannot be certified by
    /// comparing circumscribed and inscribed circles, or tags that do not
    /// alternate with depth.
    pub fn new(curves: Vec<Ellipse>) -> Result<Self> {
        if curves.is_empty() {
            return Err(Error::invalid("a curve family needs at least one curve"));
        }
        for c in &curves {
            if !(c.semi_axes.iter().all(|&a| a > 0.0 && a.is_finite()) && c.center.iter().all(|x| x.is_finite())) {
                return Err(Error::invalid("ellipse axes must be positive and finite"));
            }
        }
        let mut depth = vec![0; curves.len()];
        let mut parent: Vec<Option<usize>> = vec![None; curves.len()];
        for i in 0..curves.len() {
            for j in 0..curves.len() {
                if i == j {
                    continue;
                }
                match relation(&curves[i], &curves[j]) {
                    Relation::Apart | Relation::SecondInsideFirst => {}
                    Relation::FirstInsideSecond => {
                        depth[i] += 1;
                        if parent[i].is_none_or(|p| curves[j].area() < curves[p].area()) {
                            parent[i] = Some(j);
                        }
                    }
                    Relation::Unknown => {
                        return Err(Error::invalid(format!("curves {i} and {j} are not certifiably disjoint")));
                    }
                }
            }
        }
        for i in 0..curves.len() {
            let expected = parent[i].is_none_or(|p| !curves[p].interior);
            if curves[i].interior != expected {
                return Err(Error::invalid(format!("curve {i} has a tag inconsistent with its nesting")));
            }
        }
        Ok(CurveFamily { curves, depth })
    }

    pub fn curves(&self) -> &[Ellipse] {
        &self.curves
    }

    /// `Area(S)`.
    pub fn area(&self) -> f64 {
        self.curves.iter().map(|c| if c.interior { c.area() } else { -c.area() }).sum()
    }

    /// `Len(∂S)`.
    pub fn length(&self) -> f64 {
        self.curves.iter().map(Ellipse::perimeter).sum()
    }

    /// Whether a lattice point lies in the closure of `S`.
    pub fn contains_closure(&self, p: [i64; 2]) -> bool {
        let mut innermost: Option<usize> = None;
        for (i, c) in self.curves.iter().enumerate() {
            match c.locate(p) {
                Ordering::Equal => return true,
                Ordering::Less => {
                    if innermost.is_none_or(|j| self.depth[i] > self.depth[j]) {
                        innermost = Some(i);
                    }
                }
                Ordering::Greater => {}
            }
        }
        innermost.is_some_and(|i| self.curves[i].interior)
    }

    fn lattice_box(&self) -> [i64; 4] {
        let mut b = [i64::MAX, i64::MIN, i64::MAX, i64::MIN];
        for c in &self.curves {
            b[0] = b[0].min((c.center[0] - c.semi_axes[0]).floor() as i64);
            b[1] = b[1].max((c.center[0] + c.semi_axes[0]).ceil() as i64);
            b[2] = b[2].min((c.center[1] - c.semi_axes[1]).floor() as i64);
            b[3] = b[3].max((c.center[1] + c.semi_axes[1]).ceil() as i64);
        }
        b
    }
}

/// Both sides of `#(ℤ² ∩ cl S) ≤ Area(S) + Len(∂S) + |E|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JordanReport {
    pub lattice_count: u64,
    pub area: f64,
    pub length: f64,
    pub exceptional: u64,
    pub holds: bool,
}

/// Counts `ℤ² ∩ cl S` and the exceptional set `E`: lattice points of `cl S`
/// enclosed by a curve that lies inside the unit box around the point and has
/// area plus length below 1.
pub fn jordan_count_check(fam: &CurveFamily) -> JordanReport {
    let [x0, x1, y0, y1] = fam.lattice_box();
    let small: Vec<&Ellipse> = fam.curves.iter().filter(|c| c.area() + c.perimeter() < 1.0).collect();
    let (mut count, mut exceptional) = (0u64, 0u64);
    for x in x0..=x1 {
        for y in y0..=y1 {
            let p = [x, y];
            if !fam.contains_closure(p) {
                continue;
            }
            count += 1;
            if small.iter().any(|c| c.inside_box(p) && c.locate(p) != Ordering::Greater) {
                exceptional += 1;
            }
        }
    }
    let (area, length) = (fam.area(), fam.length());
    JordanReport {
        lattice_count: count,
        area,
        length,
        exceptional,
        holds: count as f64 <= area + length + exceptional as f64,
    }
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// A random family of nested, certifiably disjoint ellipses with centers and
/// axes on a 0.001 grid.
///
/// With `adversarial`, tiny circles centred on lattice points are added,
/// both as separate components and as holes or islands inside larger curves.
pub fn random_family<R: Rng>(rng: &mut R, adversarial: bool) -> CurveFamily {
    let mut curves: Vec<Ellipse> = Vec::new();
    let roots = rng.random_range(1..=3);
    let mut tries = 0;
    while curves.len() < roots && tries < 200 {
        tries += 1;
        let c = [round3(rng.random_range(-15.0..15.0)), round3(rng.random_range(-15.0..15.0))];
        let ax = [round3(rng.random_range(0.3..8.0)), round3(rng.random_range(0.3..8.0))];
        try_add(&mut curves, Ellipse { center: c, semi_axes: ax, interior: true });
    }
    // holes and islands: curves nested inside an existing one
    let nested = rng.random_range(0..=5);
    for _ in 0..nested {
        for _ in 0..50 {
            let host = curves[rng.random_range(0..curves.len())];
            let r_in = host.min_axis();
            let size = r_in * rng.random_range(0.05..0.45);
            let off = (r_in - size) * rng.random_range(0.0..0.9);
            let ang = rng.random_range(0.0..std::f64::consts::TAU);
            let c = [round3(host.center[0] + off * ang.cos()), round3(host.center[1] + off * ang.sin())];
            let ax = [round3(size * rng.random_range(0.5..1.0)).max(0.001), round3(size * rng.random_range(0.5..1.0)).max(0.001)];
            if try_add(&mut curves, Ellipse { center: c, semi_axes: ax, interior: true }) {
                break;
            }
        }
    }
    if adversarial {
        let tiny = rng.random_range(1..=4);
        for _ in 0..tiny {
            for _ in 0..50 {
                let p = [rng.random_range(-20..=20) as f64, rng.random_range(-20..=20) as f64];
                let r = round3(rng.random_range(0.01..0.15)).max(0.001);
                if try_add(&mut curves, Ellipse::circle(p, r, true)) {
                    break;
                }
            }
        }
    }
    CurveFamily::new(curves).expect("generator only adds certified curves")
}

/// Adds `e` if it is certifiably disjoint from every curve and contains none,
/// fixing its tag from the nesting.
fn try_add(curves: &mut Vec<Ellipse>, mut e: Ellipse) -> bool {
    let mut parent: Option<usize> = None;
    for (i, c) in curves.iter().enumerate() {
        match relation(&e, c) {
            Relation::Apart => {}
            Relation::FirstInsideSecond => {
                if parent.is_none_or(|p| c.area() < curves[p].area()) {
                    parent = Some(i);
                }
            }
            _ => return false,
        }
    }
    e.interior = parent.is_none_or(|p| !curves[p].interior);
    curves.push(e);
    true
}

/// Integer points and area of one horizontal slice `S(k₃)` of `V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarSlice {
    pub k3: f64,
    pub count: CountInterval,
    pub area: f64,
    pub area_std_error: f64,
    /// `√(|ň|² − k₃²)`.
    pub r_out: f64,
    /// `(L1 + L2) r_out`.
    pub boundary_scale: f64,
}

/// Counts `ℤ² ∩ S(k₃)` by scanning and estimates `Area(S(k₃))` by Monte Carlo.
///
/// # Errors
///
/// `k₃ (k₃ + ň₃)(2k₃ + ň₃) = 0`, or `|k₃| ≥ |ň|`.
pub fn planar_slice_check(prob: &SublevelProblem, k3: f64, samples: u64, seed: u64) -> Result<PlanarSlice> {
    let n3 = prob.n_adjusted()[2];
    if k3 * (k3 + n3) * (2.0 * k3 + n3) == 0.0 {
        return Err(Error::invalid(format!("slice k3 = {k3} meets a singular plane")));
    }
    let r = prob.norm();
    if !(k3.abs() < r) {
        return Err(Error::invalid(format!("slice k3 = {k3} misses the annulus")));
    }
    if samples < MIN_SAMPLES {
        return Err(Error::invalid(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    let g = prob.geometry();
    let delta = prob.delta();
    let r_out = (r * r - k3 * k3).sqrt();
    let (h1, h2) = (g.l1() * r_out, g.l2() * r_out);
    let (b1, b2) = (h1.ceil() as i64, h2.ceil() as i64);
    let rows = par::map_range((2 * b1 + 1) as usize, |i| {
        let k1 = i as i64 - b1;
        let mut acc = CountInterval::default();
        for k2 in -b2..=b2 {
            let k = prob.adjust_point([k1 as f64, k2 as f64, k3]);
            if prob.in_annulus(k) {
                if let Some(f) = prob.f_adjusted(k) {
                    classify(f, delta, &mut acc);
                }
            }
        }
        acc
    });
    let count = rows.into_iter().fold(CountInterval::default(), |a, b| a + b);

    let batches = samples.div_ceil(MC_BATCH);
    let hits = par::sum_i64_range(0, batches as i64 - 1, |b| {
        let b = b as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b);
        let mut hits = 0;
        for _ in 0..MC_BATCH.min(samples - b * MC_BATCH) {
            let x = h1 * (2.0 * rng.random::<f64>() - 1.0);
            let y = h2 * (2.0 * rng.random::<f64>() - 1.0);
            let k = prob.adjust_point([x, y, k3]);
            if prob.in_annulus(k) && prob.f_adjusted(k).is_some_and(|f| f.abs() <= delta) {
                hits += 1;
            }
        }
        hits
    });
    let box_area = 4.0 * h1 * h2;
    let frac = hits as f64 / samples as f64;
    Ok(PlanarSlice {
        k3,
        count,
        area: box_area * frac,
        area_std_error: box_area * (frac * (1.0 - frac) / samples as f64).sqrt(),
        r_out,
        boundary_scale: (g.l1() + g.l2()) * r_out,
    })
}

/// Smallest `C` with `|count − Area| ≤ C((L1 + L2) r_out + 1)` on every slice,
/// taking the relaxed count above the area and the strict count below it.
///
/// This is the planar bound with `C′ = C`, fitted two-sided so that the
/// constant measures the boundary discrepancy rather than Monte Carlo noise.
pub fn fit_planar_constant(slices: &[PlanarSlice]) -> f64 {
    slices
        .iter()
        .map(|s| {
            let above = s.count.relaxed as f64 - s.area;
            let below = s.area - s.count.strict as f64;
            above.max(below).max(0.0) / (s.boundary_scale + 1.0)
        })
        .fold(0.0, f64::max)
}

/// Whether `count ≤ Area + 3σ + C((L1 + L2) r_out + 1)` holds on a slice.
pub fn planar_bound_holds(s: &PlanarSlice, c: f64) -> bool {
    s.count.relaxed as f64 <= s.area + 3.0 * s.area_std_error + c * (s.boundary_scale + 1.0)
}
