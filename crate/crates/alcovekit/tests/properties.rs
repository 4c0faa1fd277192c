use std::collections::HashSet;

use alcovekit::apartment::{point_from_type, ApartmentPoint};
use alcovekit::galois_types::{census, frobenius_invariant, GaloisType, CENSUS_CAP};
use alcovekit::iwahori_weyl::{AffineWeylElement, IwahoriWeyl};
use alcovekit::loop_sim::{Ring, TruncSeries, EXACT};
use alcovekit::rootdata::q;
use alcovekit::{GammaData, RootDatum, WeylElement};
use num_bigint::BigInt;
use proptest::prelude::*;

const LABELS: [&str; 8] = ["GL2", "GL3", "SL2", "SL3", "PGL2", "PGL3", "GL2xSL3", "GL4"];

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[test]
fn root_system_axioms() {
    for label in LABELS {
        let rd: RootDatum = label.parse().unwrap();
        let roots: HashSet<Vec<i64>> = rd.roots.iter().cloned().collect();
        for (a, av) in rd.roots.iter().zip(&rd.coroots) {
            assert_eq!(dot(a, av), 2, "{label}");
            let neg: Vec<i64> = a.iter().map(|x| -x).collect();
            assert!(roots.contains(&neg), "{label}");
            for b in &rd.roots {
                let k = dot(b, av);
                let refl: Vec<i64> = b.iter().zip(a).map(|(x, y)| x - k * y).collect();
                assert!(roots.contains(&refl), "{label}: reflection leaves the root set");
            }
        }
    }
}

#[test]
fn weyl_orders() {
    for (n, fact) in [(2usize, 2usize), (3, 6), (4, 24)] {
        let rd: RootDatum = format!("GL{n}").parse().unwrap();
        let w = rd.weyl_group(1000).unwrap();
        assert_eq!(w.len(), fact);
        assert_eq!(w.iter().collect::<HashSet<_>>().len(), fact);
    }
}

#[test]
fn pi1_relabel_invariant() {
    for (a, b) in [("GL2xSL3", "SL3xGL2"), ("PGL3xSL2", "SL2xPGL3"), ("GL3xPGL2xSL2", "SL2xGL3xPGL2")] {
        let x: RootDatum = a.parse().unwrap();
        let y: RootDatum = b.parse().unwrap();
        assert_eq!(x.pi1(), y.pi1(), "{a} vs {b}");
    }
}

#[test]
fn split_tate_order() {
    for (label, p, e, r) in [("GL2", 5u64, 4u64, 1u32), ("SL2", 7, 24, 2), ("PGL3", 7, 6, 1), ("GL3", 3, 8, 2)] {
        let rd: RootDatum = label.parse().unwrap();
        let g = GammaData::split(&rd, p, e, r).unwrap();
        let order = rd.tate_h0(&g).order().unwrap();
        assert_eq!(order, BigInt::from(e).pow(rd.rank as u32), "{label}");
        let cen = census(&rd, &g, CENSUS_CAP).unwrap();
        assert!(BigInt::from(cen.total) <= order);
    }
}

#[test]
fn census_constant_on_orbits() {
    for (label, p, e, r) in [("GL2", 7u64, 6u64, 1u32), ("SL2", 5, 24, 2), ("GL3", 5, 4, 1)] {
        let rd: RootDatum = label.parse().unwrap();
        let g = GammaData::split(&rd, p, e, r).unwrap();
        let weyl = rd.weyl_group(100).unwrap();
        for class in census(&rd, &g, CENSUS_CAP).unwrap().classes {
            for w in &weyl {
                let img = w.apply(&class.representative);
                let t = GaloisType::from_fixed(&rd, &g, &img).unwrap();
                let inv = frobenius_invariant(&rd, &g, &t).unwrap().is_some();
                assert_eq!(inv, class.invariant, "{label} {img:?}");
            }
        }
    }
}

fn gl3_point(l: [i64; 3], r: u32) -> (RootDatum, GammaData, ApartmentPoint) {
    let rd: RootDatum = "GL3".parse().unwrap();
    let g = GammaData::split(&rd, 5, 24, r).unwrap();
    let lam = vec![l.to_vec(); r as usize];
    let w = vec![WeylElement::identity(&rd); r as usize];
    let x = point_from_type(&rd, &g, &lam, &w).unwrap();
    (rd, g, x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fixed_points_are_gamma_fixed(a in -30i64..30, b in -30i64..30, c in -30i64..30) {
        let (_, g, x) = gl3_point([a, b, c], 2);
        prop_assert!(x.is_gamma_fixed(&g));
        prop_assert!(x.denominators_ok());
        prop_assert_eq!(ApartmentPoint::from_json(&x.to_json()).unwrap(), x);
    }

    #[test]
    fn frobenius_scales_slot(a in -30i64..30, b in -30i64..30) {
        let (_, _, x) = gl3_point([a, b, 0], 2);
        let fx = x.frobenius();
        let five = q(5, 1);
        let expected: Vec<_> = x.eta[1].iter().map(|t| t * &five).collect();
        prop_assert_eq!(&fx.eta[0], &expected);
    }

    #[test]
    fn reduced_word_roundtrip(word in proptest::collection::vec(1usize..=3, 0..8), k in 0usize..3) {
        let rd: RootDatum = "GL3".parse().unwrap();
        let iw = IwahoriWeyl::new(&rd).unwrap();
        let t = iw.base.omega_generators[0].clone();
        let omega = (0..k).fold(AffineWeylElement::identity(&rd), |acc, _| acc.compose(&t));
        let x = iw.from_word(&word, &omega);
        let rw = iw.reduced_word(&x);
        prop_assert_eq!(rw.word.len(), iw.length(&x));
        prop_assert!(rw.word.len() <= word.len());
        prop_assert_eq!(iw.from_word(&rw.word, &rw.omega), x);
    }

    #[test]
    fn length_subadditive(w1 in proptest::collection::vec(1usize..=3, 0..6), w2 in proptest::collection::vec(1usize..=3, 0..6)) {
        let rd: RootDatum = "GL3".parse().unwrap();
        let iw = IwahoriWeyl::new(&rd).unwrap();
        let id = AffineWeylElement::identity(&rd);
        let x = iw.from_word(&w1, &id);
        let y = iw.from_word(&w2, &id);
        prop_assert!(iw.length(&x.compose(&y)) <= iw.length(&x) + iw.length(&y));
        prop_assert_eq!(iw.length(&x.inverse()), iw.length(&x));
    }

    #[test]
    fn phi_is_ring_homomorphism(
        a in proptest::collection::vec(0u64..49, 1..6),
        b in proptest::collection::vec(0u64..49, 1..6),
        sa in -2i64..3, na in 4i64..9, nb in 4i64..9,
    ) {
        let ring = Ring::new(7, 2).unwrap();
        let x = TruncSeries::from_coeffs(ring, sa, a, sa + na);
        let y = TruncSeries::from_coeffs(ring, 0, b, nb);
        prop_assert_eq!(x.mul(&y).phi(), x.phi().mul(&y.phi()));
        prop_assert_eq!(x.add(&y).phi(), x.phi().add(&y.phi()));
    }

    #[test]
    fn precision_is_sound(
        a in proptest::collection::vec(0u64..27, 1..10),
        b in proptest::collection::vec(0u64..27, 1..10),
        sa in -2i64..3, sb in -2i64..3, na in 1i64..8, nb in 1i64..8,
    ) {
        // truncated products agree with exact products below the claimed precision
        let ring = Ring::new(3, 3).unwrap();
        let xa = TruncSeries::from_coeffs(ring, sa, a, EXACT);
        let xb = TruncSeries::from_coeffs(ring, sb, b, EXACT);
        let ta = xa.truncate(sa + na);
        let tb = xb.truncate(sb + nb);
        let prod = ta.mul(&tb);
        prop_assert_eq!(xa.mul(&xb).truncate(prod.prec()), prod.clone());
        if let Ok(inv) = ta.inverse(20) {
            if let Ok(exact_inv) = xa.inverse(40) {
                let n = inv.prec().min(exact_inv.prec());
                prop_assert_eq!(inv.truncate(n), exact_inv.truncate(n));
            }
        }
    }
}
