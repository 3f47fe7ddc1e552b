use proptest::prelude::*;

use conifold_core::fixtures;
use conifold_core::floer::{
    chord_labels, closed_form_hits, count_discriminant_hits, pascaleff_linear, pascaleff_product, triangle_for, ChordCombination, ChordLabel,
    FloerError, HitCount,
};
use conifold_core::lincomb::LinearCombination;
use conifold_core::mirror::{substitute, Exponent, LaurentExpression, SubstitutionMap, Var};
use conifold_core::paths::{
    path_with_winding, syz_transform_label, winding_number, winding_number_bounded, Gaussian, PLPath, PathKind, PuncturedPlane,
};
use conifold_core::rational::{q, Rational};
use conifold_core::sheaf::{compose_closed_form, compose_linear, compose_oracle, BasisMorphism, HalfInteger, Morphism, Sector};

fn sector(s: u8, t: u8) -> Sector {
    Sector::between(s, t)
}

fn basis(sec: Sector) -> impl Strategy<Value = BasisMorphism> {
    (-8i64..=8, 0i64..4, 0i64..4).prop_map(move |(k, i1, i2)| {
        let halves = if sec.half_integer_labels() { 2 * k + 1 } else { 2 * k };
        BasisMorphism::new(sec, HalfInteger::from_halves(halves), i1, i2).unwrap()
    })
}

fn composable_pair() -> impl Strategy<Value = (BasisMorphism, BasisMorphism)> {
    (0u8..2, 0u8..2, 0u8..2).prop_flat_map(|(i, j, k)| (basis(sector(j, k)), basis(sector(i, j))))
}

fn composable_triple() -> impl Strategy<Value = (BasisMorphism, BasisMorphism, BasisMorphism)> {
    (0u8..2, 0u8..2, 0u8..2, 0u8..2).prop_flat_map(|(i, j, k, l)| (basis(sector(k, l)), basis(sector(j, k)), basis(sector(i, j))))
}

fn chord(sec: Sector, slope: u32) -> impl Strategy<Value = ChordLabel> {
    let all = chord_labels(sec, slope);
    (0..all.len()).prop_map(move |i| all[i])
}

fn chord_pair(max_slope: u32) -> impl Strategy<Value = (ChordLabel, ChordLabel)> {
    (0u8..2, 0u8..2, 0u8..2, 1..=max_slope, 1..=max_slope)
        .prop_flat_map(|(i, j, k, m, n)| (chord(sector(j, k), n), chord(sector(i, j), m)))
}

fn chord_triple(max_slope: u32) -> impl Strategy<Value = (ChordLabel, ChordLabel, ChordLabel)> {
    (0u8..2, 0u8..2, 0u8..2, 0u8..2, 1..=max_slope, 1..=max_slope, 1..=max_slope).prop_flat_map(|(i, j, k, l, m, n, p)| {
        (chord(sector(k, l), p), chord(sector(j, k), n), chord(sector(i, j), m))
    })
}

fn hits(g: &ChordLabel, f: &ChordLabel) -> Result<HitCount, FloerError> {
    match triangle_for(g, f) {
        Ok(t) => count_discriminant_hits(&t),
        Err(FloerError::Degenerate { .. }) => Ok(HitCount::default()),
        Err(e) => Err(e),
    }
}

fn laurent(polynomial_u: bool) -> impl Strategy<Value = LaurentExpression> {
    let term = (prop::array::uniform10(-2i32..=2), -3i64..=3, 1i64..=3);
    prop::collection::vec(term, 0..4).prop_map(move |ts| {
        LaurentExpression::from_terms(ts.into_iter().map(|(mut e, n, d): (Exponent, i64, i64)| {
            if polynomial_u {
                e[0] = e[0].abs();
            }
            (e, q(n, d))
        }))
    })
}

fn perturb(path: &PLPath, offsets: &[(i64, i64)]) -> PLPath {
    let n = path.vertices().len();
    let v: Vec<Gaussian> = path
        .vertices()
        .iter()
        .enumerate()
        .map(|(k, z)| {
            if k == 0 || k == n - 1 {
                return z.clone();
            }
            let (dx, dy) = offsets[k % offsets.len()];
            z + &Gaussian::new(q(dx, 100), q(dy, 100))
        })
        .collect();
    PLPath::new(PathKind::Section, v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn closed_form_agrees_with_oracle((g, f) in composable_pair()) {
        prop_assert_eq!(compose_closed_form(&g, &f).unwrap(), compose_oracle(&g, &f).unwrap());
    }

    #[test]
    fn composition_is_associative((h, g, f) in composable_triple()) {
        let one = |b: &BasisMorphism| Morphism::basis(*b);
        let left = compose_linear(&compose_closed_form(&h, &g).unwrap(), &one(&f), compose_closed_form).unwrap();
        let right = compose_linear(&one(&h), &compose_closed_form(&g, &f).unwrap(), compose_closed_form).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn triangle_count_matches_closed_form((g, f) in chord_pair(12)) {
        prop_assert_eq!(hits(&g, &f).unwrap(), closed_form_hits(&g, &f));
    }

    #[test]
    fn triangle_product_is_associative((h, g, f) in chord_triple(4)) {
        let one = |c: &ChordLabel| ChordCombination::basis(*c);
        let left = pascaleff_linear(&pascaleff_product(&h, &g).unwrap(), &one(&f)).unwrap();
        let right = pascaleff_linear(&one(&h), &pascaleff_product(&g, &f).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn triangle_product_has_single_label((g, f) in chord_pair(6)) {
        let p = pascaleff_product(&g, &f).unwrap();
        let mut a: Vec<HalfInteger> = p.labels().map(|l| l.a).collect();
        a.dedup();
        prop_assert_eq!(a.len(), 1);
        prop_assert!(p.labels().all(|l| l.slope == g.slope + f.slope));
    }

    #[test]
    fn winding_survives_subdivision(w in -4i64..=4, n in 1i64..10) {
        let pp = PuncturedPlane::standard();
        let t = q(n, 10);
        let p = path_with_winding(w).subdivided(&t);
        prop_assert_eq!(winding_number(&p, &pp).unwrap(), w);
        prop_assert_eq!(syz_transform_label(&p, &pp).unwrap(), syz_transform_label(&path_with_winding(w), &pp).unwrap());
    }

    #[test]
    fn winding_survives_perturbation(w in -3i64..=3, offsets in prop::collection::vec((-9i64..=9, -9i64..=9), 1..6)) {
        let pp = PuncturedPlane::standard();
        let p = perturb(&path_with_winding(w), &offsets);
        prop_assert_eq!(winding_number(&p, &pp).unwrap(), w);
    }

    #[test]
    fn bounded_winding_survives_subdivision(n in 1i64..10) {
        let pp = PuncturedPlane::standard();
        for (name, w) in [("sigma0", 0), ("sigma1", 1)] {
            let (p, _) = fixtures::path(name).unwrap();
            prop_assert_eq!(winding_number_bounded(&p.subdivided(&q(n, 10)), &pp).unwrap(), w);
        }
    }

    #[test]
    fn substitution_is_a_ring_map(a in laurent(true), b in laurent(true)) {
        for s in [SubstitutionMap::wall_one(), SubstitutionMap::expand_w1(), SubstitutionMap::chart_v()] {
            let sa = substitute(&a, &s).unwrap();
            let sb = substitute(&b, &s).unwrap();
            prop_assert_eq!(substitute(&a.times(&b), &s).unwrap(), sa.times(&sb));
            prop_assert_eq!(substitute(&a.plus(&b), &s).unwrap(), sa.plus(&sb));
        }
    }

    #[test]
    fn laurent_inverse_of_monomial(e in prop::array::uniform10(-3i32..=3), n in 1i64..5) {
        let m = LaurentExpression::monomial(e, q(n, 1));
        prop_assert_eq!(m.times(&m.inverse().unwrap()), LaurentExpression::one());
        prop_assert!(LaurentExpression::var(Var::U).plus(&LaurentExpression::one()).inverse().is_none());
    }

    #[test]
    fn lincomb_laws(xs in prop::collection::vec((0u8..6, -4i64..=4), 0..8), ys in prop::collection::vec((0u8..6, -4i64..=4), 0..8), c in -3i64..=3) {
        let mk = |v: &[(u8, i64)]| LinearCombination::<u8, Rational>::from_terms(v.iter().map(|&(l, n)| (l, Rational::from_integer(n))));
        let (x, y) = (mk(&xs), mk(&ys));
        let c = Rational::from_integer(c);
        prop_assert_eq!(x.plus(&y), y.plus(&x));
        prop_assert!(x.minus(&x).is_zero());
        prop_assert_eq!(x.plus(&y).scaled(&c), x.scaled(&c).plus(&y.scaled(&c)));
        prop_assert_eq!(x.normalize(), x.normalize().normalize());
        prop_assert!(x.iter().all(|(_, k)| *k != Rational::from_integer(0)));
    }
}
