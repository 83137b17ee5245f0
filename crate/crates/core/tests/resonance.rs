use std::cmp::Ordering;

use nearres::lattice::{annulus_index, modes_in_ball, Ratio};
use nearres::resonance::*;
use nearres::{BandwidthSpec, Sign, TorusGeometry};
use proptest::prelude::*;

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Exact rational `p/q` with `q > 0`.
#[derive(Clone, Copy, PartialEq, Debug)]
struct Q(i128, i128);

impl Q {
    fn new(p: i128, q: i128) -> Q {
        let g = gcd(p, q).max(1);
        let s = if q < 0 { -1 } else { 1 };
        Q(s * p / g, s * q / g)
    }
    fn add(self, o: Q) -> Q {
        Q::new(self.0 * o.1 + o.0 * self.1, self.1 * o.1)
    }
    fn mul(self, o: Q) -> Q {
        Q::new(self.0 * o.0, self.1 * o.1)
    }
}

/// Whether `a/√A + b/√B + c/√C = 0` exactly, for integers and `A, B, C > 0`.
fn exact_zero(a: i128, aa: i128, b: i128, bb: i128, c: i128, cc: i128) -> bool {
    // a/√A + b/√B = −c/√C; squaring gives 2ab/√(AB) = c²/C − a²/A − b²/B =: R
    let r = Q::new(c * c, cc).add(Q::new(-a * a, aa)).add(Q::new(-b * b, bb));
    let ab = a * b;
    if ab == 0 {
        if r.0 != 0 {
            return false;
        }
    } else {
        if ab.signum() != r.0.signum() {
            return false;
        }
        // (2ab)²/(AB) = R²
        if Q::new(4 * ab * ab, aa * bb) != r.mul(r) {
            return false;
        }
    }
    // now (a/√A + b/√B)² = c²/C; the signs must be opposite
    let lhs = a as f64 / (aa as f64).sqrt() + b as f64 / (bb as f64).sqrt();
    if c == 0 {
        return true;
    }
    lhs != 0.0 && lhs.signum() != (c as f64).signum()
}

fn sq(v: [i64; 3]) -> i128 {
    v.iter().map(|&x| (x as i128) * (x as i128)).sum()
}

/// Ordered triads with an exactly vanishing triplet value for some sign choice.
fn exact_resonant_count(n: [i64; 3]) -> u64 {
    let nn = sq(n);
    let b = (nn as f64).sqrt().ceil() as i64;
    let mut count = 0;
    for k1 in -b..=b {
        for k2 in -b..=b {
            for k3 in -b..=b {
                let k = [k1, k2, k3];
                let m = [-n[0] - k1, -n[1] - k2, -n[2] - k3];
                let (kk, mm) = (sq(k), sq(m));
                if kk == 0 || mm == 0 || kk > nn || mm > kk {
                    continue;
                }
                let hit = [1i128, -1].iter().any(|&s2| {
                    [1i128, -1].iter().any(|&s3| exact_zero(n[2] as i128, nn, s2 * k3 as i128, kk, s3 * m[2] as i128, mm))
                });
                if hit {
                    count += 1;
                }
            }
        }
    }
    count
}

#[test]
fn exact_resonances_match_diophantine_oracle() {
    let g = TorusGeometry::unit();
    for n in [[3, 0, 4], [1, 2, 2], [0, 0, 5], [2, 3, 6], [4, 4, 7], [5, 0, 0], [6, 2, 3]] {
        let got = count_triads(&g.adjust(n), &g, &BandwidthSpec::zero(), TriadOrdering::N0).unwrap();
        assert_eq!(got, exact_resonant_count(n), "n = {n:?}");
    }
}

#[test]
fn all_pass_counts_every_admissible_k() {
    let g = TorusGeometry::new(1.3, 0.7).unwrap();
    let n = g.adjust([2, -1, 3]);
    let r = 4.5;
    let got = count_triads(&n, &g, &BandwidthSpec::all_pass(), TriadOrdering::Unordered { radius: r }).unwrap();
    let mut brute = 0;
    for k1 in -10i64..=10 {
        for k2 in -10i64..=10 {
            for k3 in -10i64..=10 {
                let k = [k1, k2, k3];
                let m = [-2 - k1, 1 - k2, -3 - k3];
                let w = g.adjust(k);
                if k != [0; 3] && m != [0; 3] && w.norm <= r {
                    brute += 1;
                }
            }
        }
    }
    assert_eq!(got, brute);
}

#[test]
fn enumeration_agrees_with_count() {
    let g = TorusGeometry::unit();
    let n = g.adjust([5, 1, 3]);
    for spec in [BandwidthSpec::zero(), BandwidthSpec::constant(0.05), BandwidthSpec::theorem(1.0)] {
        let list = enumerate_triads_for(&n, &g, &spec, TriadOrdering::N0).unwrap();
        assert_eq!(list.len() as u64, count_triads(&n, &g, &spec, TriadOrdering::N0).unwrap());
        assert!(list.windows(2).all(|w| w[0] < w[1]));
        for k in list {
            let (kw, mw) = (g.adjust(k), g.adjust([-5 - k[0], -1 - k[1], -3 - k[2]]));
            assert!(is_near_resonant(&n, &kw, &mw, &spec).unwrap());
        }
    }
}

#[test]
fn doubled_wavevector_triplet_value() {
    // n = −2k, so m = k
    let g = TorusGeometry::unit();
    let n = g.adjust([0, 312, 25]);
    let k = g.adjust([0, -156, -12]);
    let v = triplet_value(&n, &k, &k, SignTriple([Sign::Plus; 3])).unwrap();
    let want = 25.0 / 313.0 - 2.0 * 12.0 / (156f64 * 156.0 + 144.0).sqrt();
    assert!((v - want).abs() < 1e-15);
}

#[test]
fn theorem_delta_solves_its_equation() {
    for target in [1e-6, 1e-4, 1e-2, 0.1, 0.3] {
        let d = theorem_delta(target, DEFAULT_CAP);
        assert!((d * (1.0 / d).ln() - target).abs() < 1e-10 * target);
    }
    assert_eq!(theorem_delta(0.5, DEFAULT_CAP), DEFAULT_CAP);
    assert_eq!(theorem_delta(0.0, DEFAULT_CAP), 0.0);
    let s = BandwidthSpec::theorem(1.0);
    assert!(s.delta_for_max(64.0) < s.delta_for_max(16.0));
}

#[test]
fn zero_vectors_are_rejected() {
    let g = TorusGeometry::unit();
    let z = g.adjust([0, 0, 0]);
    let a = g.adjust([1, 0, 0]);
    assert!(triplet_value(&z, &a, &a, SignTriple([Sign::Plus; 3])).is_err());
    assert!(count_triads(&z, &g, &BandwidthSpec::zero(), TriadOrdering::N0).is_err());
}

proptest! {
    #[test]
    fn min_triplet_is_symmetric(
        n in prop::array::uniform3(-7i64..=7),
        k in prop::array::uniform3(-7i64..=7),
    ) {
        let m = [-n[0] - k[0], -n[1] - k[1], -n[2] - k[2]];
        prop_assume!(n != [0; 3] && k != [0; 3] && m != [0; 3]);
        let g = TorusGeometry::new(1.1, 0.9).unwrap();
        let (a, b, c) = (g.adjust(n), g.adjust(k), g.adjust(m));
        let v = min_triplet(&a, &b, &c).unwrap();
        for (x, y, z) in [(&b, &a, &c), (&c, &b, &a), (&a, &c, &b)] {
            prop_assert!((min_triplet(x, y, z).unwrap() - v).abs() < 1e-15);
        }
        // the direct minimum over all eight sign triples
        let direct = SignTriple::all()
            .iter()
            .map(|&s| triplet_value(&a, &b, &c, s).unwrap().abs())
            .fold(f64::INFINITY, f64::min);
        prop_assert!((direct - v).abs() < 1e-15);
        for s in SignTriple::all() {
            let t = triplet_value(&a, &b, &c, s).unwrap();
            prop_assert_eq!(triplet_value(&a, &b, &c, s.negate()).unwrap(), -t);
        }
    }

    #[test]
    fn bandwidth_rules_are_nested(
        n in prop::array::uniform3(-6i64..=6),
        k in prop::array::uniform3(-6i64..=6),
    ) {
        let m = [-n[0] - k[0], -n[1] - k[1], -n[2] - k[2]];
        prop_assume!(n != [0; 3] && k != [0; 3] && m != [0; 3]);
        let g = TorusGeometry::unit();
        let (a, b, c) = (g.adjust(n), g.adjust(k), g.adjust(m));
        let zero = is_near_resonant(&a, &b, &c, &BandwidthSpec::zero()).unwrap();
        let small = is_near_resonant(&a, &b, &c, &BandwidthSpec::constant(0.01)).unwrap();
        let big = is_near_resonant(&a, &b, &c, &BandwidthSpec::constant(0.2)).unwrap();
        prop_assert!(!zero || small);
        prop_assert!(!small || big);
        prop_assert!(is_near_resonant(&a, &b, &c, &BandwidthSpec::all_pass()).unwrap());
    }

    #[test]
    fn norm_comparison_is_exact(
        n in prop::array::uniform3(-30i64..=30),
        k in prop::array::uniform3(-30i64..=30),
    ) {
        let g = TorusGeometry::parse("1.5", "0.75").unwrap();
        // 9|ň|² = 4n₁² + 16n₂² + 9n₃²
        let scaled = |v: [i64; 3]| 4 * v[0] as i128 * v[0] as i128 + 16 * v[1] as i128 * v[1] as i128 + 9 * v[2] as i128 * v[2] as i128;
        prop_assert_eq!(g.cmp_norm(n, k), scaled(n).cmp(&scaled(k)));
    }
}

#[test]
fn ball_enumeration() {
    let g = TorusGeometry::unit();
    let modes = modes_in_ball(3.0, &g).unwrap();
    let mut brute = 0;
    for a in -3i64..=3 {
        for b in -3i64..=3 {
            for c in -3i64..=3 {
                if a * a + b * b + c * c < 9 && (a, b, c) != (0, 0, 0) {
                    brute += 1;
                }
            }
        }
    }
    assert_eq!(modes.len(), brute);
    // six axis vectors and twelve face diagonals of norm √2
    assert_eq!(modes_in_ball(1.5, &g).unwrap().len(), 18);
    assert_eq!(modes_in_ball(1.4, &g).unwrap().len(), 6);
    assert!(modes.windows(2).all(|w| w[0].n < w[1].n));
    assert_eq!(g.cmp_norm([3, 4, 0], [0, 0, 5]), Ordering::Equal);
}

#[test]
fn dyadic_annuli() {
    let g = TorusGeometry::unit();
    assert_eq!(annulus_index(&g.adjust([1, 0, 0])).unwrap(), 1);
    assert_eq!(annulus_index(&g.adjust([0, 2, 0])).unwrap(), 2);
    assert_eq!(annulus_index(&g.adjust([0, 0, 3])).unwrap(), 2);
    assert_eq!(annulus_index(&g.adjust([4, 0, 0])).unwrap(), 3);
    assert!(annulus_index(&g.adjust([0, 0, 0])).is_err());
}

proptest! {
    #[test]
    fn annulus_index_brackets_norm(n in prop::array::uniform3(-200i64..=200)) {
        prop_assume!(n != [0; 3]);
        let w = TorusGeometry::new(0.7, 1.9).unwrap().adjust(n);
        let i = annulus_index(&w).unwrap() as i32;
        prop_assert!(i == 0 && w.norm < 1.0 || 2f64.powi(i - 1) <= w.norm && w.norm < 2f64.powi(i));
    }
}

#[test]
fn decimal_ratios() {
    let r = Ratio::parse_decimal("1.25").unwrap();
    assert_eq!((r.num, r.den), (5, 4));
    let r = Ratio::parse_decimal("2e-3").unwrap();
    assert_eq!((r.num, r.den), (1, 500));
    assert!(Ratio::parse_decimal("abc").is_none());
    assert!(TorusGeometry::parse("0", "1").is_err());
}
