//! Torus geometry, domain-adjusted wavevectors and lattice enumeration.
//!
//! The torus has periods `(2π L1, 2π L2, 2π)`, so the Fourier frequency of the
//! integer mode `n` is `ň = (n1/L1, n2/L2, n3)`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Default ceiling on the number of modes a ball enumeration may produce.
pub const DEFAULT_MODE_CAP: usize = 2_000_000;

/// A positive rational `num / den` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: i128,
    pub den: i128,
}

impl Ratio {
    fn new(num: i128, den: i128) -> Ratio {
        let g = gcd(num.abs(), den.abs()).max(1);
        let (num, den) = (num / g, den / g);
        if den < 0 {
            Ratio { num: -num, den: -den }
        } else {
            Ratio { num, den }
        }
    }

    /// Parses a decimal literal such as `1`, `1.10`, `2.5e-3` exactly.
    pub fn parse_decimal(s: &str) -> Option<Ratio> {
        let s = s.trim();
        let (mantissa, exp) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
            None => (s, 0),
        };
        let (neg, mantissa) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = match mantissa.split_once('.') {
            Some((a, b)) => (a, b),
            None => (mantissa, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{int_part}{frac_part}");
        let digits = digits.trim_start_matches('0');
        let mut num: i128 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
        let scale = exp - frac_part.len() as i32;
        let mut den: i128 = 1;
        if scale >= 0 {
            num = num.checked_mul(10i128.checked_pow(scale as u32)?)?;
        } else {
            den = 10i128.checked_pow((-scale) as u32)?;
        }
        if neg {
            num = -num;
        }
        Some(Ratio::new(num, den))
    }

    /// Exact rational form of the shortest decimal that round-trips to `x`.
    pub fn from_f64_shortest(x: f64) -> Option<Ratio> {
        if !x.is_finite() {
            return None;
        }
        Ratio::parse_decimal(&format!("{x:e}"))
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Aspect ratios of the torus.
///
/// When the ratios come from decimal strings their exact rational values are
/// kept as well, and norm comparisons use integer arithmetic.
#[derive(Debug, Clone, Copy)]
pub struct TorusGeometry {
    l1: f64,
    l2: f64,
    exact: Option<(Ratio, Ratio)>,
}

impl PartialEq for TorusGeometry {
    fn eq(&self, other: &Self) -> bool {
        self.l1.to_bits() == other.l1.to_bits() && self.l2.to_bits() == other.l2.to_bits()
    }
}

impl TorusGeometry {
    /// Geometry from floating-point aspect ratios; comparisons use doubles.
    pub fn new(l1: f64, l2: f64) -> Result<Self> {
        check_ratio(l1, "l1")?;
        check_ratio(l2, "l2")?;
        Ok(TorusGeometry { l1, l2, exact: None })
    }

    /// Geometry from decimal strings, keeping their exact values.
    pub fn parse(l1: &str, l2: &str) -> Result<Self> {
        let r1 = Ratio::parse_decimal(l1).ok_or_else(|| Error::invalid(format!("l1 = {l1:?}")))?;
        let r2 = Ratio::parse_decimal(l2).ok_or_else(|| Error::invalid(format!("l2 = {l2:?}")))?;
        let (l1, l2) = (r1.to_f64(), r2.to_f64());
        check_ratio(l1, "l1")?;
        check_ratio(l2, "l2")?;
        if r1.num <= 0 || r2.num <= 0 {
            return Err(Error::invalid("aspect ratios must be positive"));
        }
        Ok(TorusGeometry { l1, l2, exact: Some((r1, r2)) })
    }

    /// The cubic torus `L1 = L2 = 1`.
    pub fn unit() -> Self {
        let one = Ratio { num: 1, den: 1 };
        TorusGeometry { l1: 1.0, l2: 1.0, exact: Some((one, one)) }
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    pub fn l2(&self) -> f64 {
        self.l2
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Volume `(2π)³ L1 L2` of the torus.
    pub fn volume(&self) -> f64 {
        let two_pi = 2.0 * std::f64::consts::PI;
        two_pi * two_pi * two_pi * self.l1 * self.l2
    }

    /// Adjusted frequency `ň` and its norm.
    pub fn adjust(&self, n: [i64; 3]) -> WaveVector {
        let adjusted = [n[0] as f64 / self.l1, n[1] as f64 / self.l2, n[2] as f64];
        let norm = (adjusted[0] * adjusted[0] + adjusted[1] * adjusted[1] + adjusted[2] * adjusted[2]).sqrt();
        WaveVector { n, adjusted, norm }
    }

    /// `|ň|²` scaled by `(p1 p2)²` to an integer, where `Li = pi/qi`.
    fn scaled_norm_sq(&self, n: [i64; 3]) -> Option<(i128, i128)> {
        let (r1, r2) = self.exact?;
        let (p1, q1, p2, q2) = (r1.num, r1.den, r2.num, r2.den);
        let sq = |x: i128| x.checked_mul(x);
        let a = sq((n[0] as i128).checked_mul(q1)?.checked_mul(p2)?)?;
        let b = sq((n[1] as i128).checked_mul(q2)?.checked_mul(p1)?)?;
        let scale = sq(p1.checked_mul(p2)?)?;
        let c = sq(n[2] as i128)?.checked_mul(scale)?;
        Some((a.checked_add(b)?.checked_add(c)?, scale))
    }

    /// Compares `|ň|` and `|ǩ|`, exactly when the geometry is exact.
    pub fn cmp_norm(&self, n: [i64; 3], k: [i64; 3]) -> Ordering {
        if let (Some((a, _)), Some((b, _))) = (self.scaled_norm_sq(n), self.scaled_norm_sq(k)) {
            return a.cmp(&b);
        }
        let (a, b) = (self.adjust(n).norm_sq(), self.adjust(k).norm_sq());
        a.partial_cmp(&b).unwrap_or(Ordering::Equal)
    }

    /// Compares `|ň|` with a radius given as a double.
    pub fn cmp_norm_radius(&self, n: [i64; 3], radius: f64) -> Ordering {
        if let (Some((key, scale)), Some(r)) = (self.scaled_norm_sq(n), Ratio::from_f64_shortest(radius)) {
            // key/scale  vs  (r.num/r.den)²
            let lhs = key.checked_mul(r.den).and_then(|x| x.checked_mul(r.den));
            let rhs = r.num.checked_mul(r.num).and_then(|x| x.checked_mul(scale));
            if let (Some(lhs), Some(rhs)) = (lhs, rhs) {
                return lhs.cmp(&rhs);
            }
        }
        let a = self.adjust(n).norm_sq();
        a.partial_cmp(&(radius * radius)).unwrap_or(Ordering::Equal)
    }
}

fn check_ratio(l: f64, name: &str) -> Result<()> {
    if l.is_finite() && l > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {l}")))
    }
}

/// An integer wavevector with cached adjusted coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveVector {
    pub n: [i64; 3],
    pub adjusted: [f64; 3],
    pub norm: f64,
}

impl WaveVector {
    pub fn is_zero(&self) -> bool {
        self.n == [0, 0, 0]
    }

    pub fn norm_sq(&self) -> f64 {
        let a = self.adjusted;
        a[0] * a[0] + a[1] * a[1] + a[2] * a[2]
    }

    /// `ň₃/|ň|`, the cosine of the polar angle of `ň`.
    pub fn polar_cos(&self) -> Result<f64> {
        if self.is_zero() {
            return Err(Error::ZeroWaveVector);
        }
        Ok(self.adjusted[2] / self.norm)
    }
}

impl fmt::Display for WaveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n[0], self.n[1], self.n[2])
    }
}

/// Shorthand for [`TorusGeometry::adjust`].
pub fn adjust(n: [i64; 3], geom: &TorusGeometry) -> WaveVector {
    geom.adjust(n)
}

/// Half-widths of the integer box containing the ball `|ň| < radius`.
pub fn ball_box(radius: f64, geom: &TorusGeometry) -> [i64; 3] {
    [
        (radius * geom.l1()).ceil() as i64,
        (radius * geom.l2()).ceil() as i64,
        radius.ceil() as i64,
    ]
}

/// All nonzero `n` with `|ň| < radius`, in lexicographic order.
pub fn modes_in_ball(radius: f64, geom: &TorusGeometry) -> Result<Vec<WaveVector>> {
    modes_in_ball_capped(radius, geom, DEFAULT_MODE_CAP)
}

/// As [`modes_in_ball`] with an explicit cap on the mode count.
pub fn modes_in_ball_capped(radius: f64, geom: &TorusGeometry, cap: usize) -> Result<Vec<WaveVector>> {
    if !(radius.is_finite() && radius >= 1.0) {
        return Err(Error::invalid(format!("radius must be at least 1, got {radius}")));
    }
    let estimate = 4.0 / 3.0 * std::f64::consts::PI * radius.powi(3) * geom.l1() * geom.l2();
    if estimate > 2.0 * cap as f64 {
        return Err(Error::ResourceLimit(format!(
            "radius {radius} gives about {estimate:.0} modes, cap is {cap}"
        )));
    }
    let b = ball_box(radius, geom);
    let mut out = Vec::new();
    for n1 in -b[0]..=b[0] {
        for n2 in -b[1]..=b[1] {
            for n3 in -b[2]..=b[2] {
                let n = [n1, n2, n3];
                if n == [0, 0, 0] || geom.cmp_norm_radius(n, radius) != Ordering::Less {
                    continue;
                }
                out.push(geom.adjust(n));
                if out.len() > cap {
                    return Err(Error::ResourceLimit(format!("more than {cap} modes in radius {radius}")));
                }
            }
        }
    }
    Ok(out)
}

/// Dyadic shell index `i` with `2^{i-1} ≤ |ǩ| < 2^i`; zero when `|ǩ| < 1`.
pub fn annulus_index(k: &WaveVector) -> Result<u32> {
    if k.is_zero() {
        return Err(Error::ZeroWaveVector);
    }
    if k.norm < 1.0 {
        return Ok(0);
    }
    let mut i = k.norm.log2().floor() as i32 + 1;
    while i > 1 && 2f64.powi(i - 1) > k.norm {
        i -= 1;
    }
    while k.norm >= 2f64.powi(i) {
        i += 1;
    }
    Ok(i as u32)
}

/// The modes of a truncation ball with O(1) lookup by integer coordinates.
#[derive(Debug, Clone)]
pub struct ModeTable {
    geom: TorusGeometry,
    radius: f64,
    modes: Vec<WaveVector>,
    half: [i64; 3],
    slots: Vec<u32>,
}

const EMPTY_SLOT: u32 = u32::MAX;

impl ModeTable {
    pub fn new(radius: f64, geom: TorusGeometry) -> Result<Self> {
        let modes = modes_in_ball(radius, &geom)?;
        let half = ball_box(radius, &geom);
        let dims = half.map(|h| (2 * h + 1) as usize);
        let mut slots = vec![EMPTY_SLOT; dims[0] * dims[1] * dims[2]];
        for (i, w) in modes.iter().enumerate() {
            let at = slot_of(half, w.n).expect("ball mode lies in its box");
            slots[at] = i as u32;
        }
        Ok(ModeTable { geom, radius, modes, half, slots })
    }

    pub fn geometry(&self) -> &TorusGeometry {
        &self.geom
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn modes(&self) -> &[WaveVector] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Position of `n` in the mode list, if it lies in the ball.
    pub fn index_of(&self, n: [i64; 3]) -> Option<usize> {
        let at = slot_of(self.half, n)?;
        match self.slots[at] {
            EMPTY_SLOT => None,
            i => Some(i as usize),
        }
    }

    /// Same geometry and radius.
    pub fn same_truncation(&self, other: &ModeTable) -> bool {
        self.geom == other.geom && self.radius.to_bits() == other.radius.to_bits()
    }
}

fn slot_of(half: [i64; 3], n: [i64; 3]) -> Option<usize> {
    let mut at = 0usize;
    for d in 0..3 {
        if n[d].abs() > half[d] {
            return None;
        }
        at = at * (2 * half[d] + 1) as usize + (n[d] + half[d]) as usize;
    }
    Some(at)
}
