use num::Zero;
use proptest::prelude::*;
use proptest::sample::subsequence;

use spin7lab::defolab::{PeriodicGrid4, TrigForm};
use spin7lab::exterior::{KForm, MultiIndex, Rational, Scalar, Vec8};
use spin7lab::planes::{classify, Matrix4, Plane};
use spin7lab::spin7forms::{canonical_tau, psi};

fn q(c: i64) -> Rational {
    <Rational as Scalar>::from_i64(c)
}

fn form(degree: usize) -> impl Strategy<Value = KForm<Rational>> {
    prop::collection::vec((subsequence((1..=8u8).collect::<Vec<_>>(), degree), -3i64..=3), 0..6).prop_map(
        move |terms| KForm::from_terms(degree, terms.iter().map(|(i, c)| (i.as_slice(), q(*c)))).unwrap(),
    )
}

fn vector() -> impl Strategy<Value = Vec8<Rational>> {
    prop::array::uniform8(-3i64..=3).prop_map(|a| Vec8(a.map(q)))
}

fn sign(k: usize) -> Rational {
    if k % 2 == 0 {
        q(1)
    } else {
        q(-1)
    }
}

fn unit_rows() -> impl Strategy<Value = Vec<Vec8>> {
    prop::collection::vec(prop::array::uniform8(-1.0f64..1.0), 4).prop_filter_map("degenerate rows", |rows| {
        Plane::new(rows.into_iter().map(Vec8).collect()).ok().map(|p| p.rows().to_vec())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wedge_is_graded_commutative((p, k, a, b) in (0usize..=4, 0usize..=4)
        .prop_flat_map(|(p, k)| (Just(p), Just(k), form(p), form(k))))
    {
        let ab = a.wedge(&b).unwrap();
        prop_assert_eq!(ab, b.wedge(&a).unwrap().scale(&sign(p * k)));
    }

    #[test]
    fn wedge_is_associative(a in form(2), b in form(1), c in form(3)) {
        let left = a.wedge(&b).unwrap().wedge(&c).unwrap();
        let right = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn wedge_with_star_is_inner_product_times_volume((a, b) in (0usize..=8).prop_flat_map(|k| (form(k), form(k)))) {
        let lhs = a.wedge(&b.hodge_star()).unwrap();
        prop_assert_eq!(lhs, KForm::volume().scale(&a.inner(&b).unwrap()));
    }

    #[test]
    fn evaluation_is_alternating(a in form(3), x in vector(), y in vector(), z in vector()) {
        let v = a.eval(&[x.clone(), y.clone(), z.clone()]).unwrap();
        prop_assert_eq!(a.eval(&[y.clone(), x.clone(), z.clone()]).unwrap(), -v.clone());
        prop_assert_eq!(a.eval(&[x.clone(), z, y]).unwrap(), -v);
        prop_assert!(a.eval(&[x.clone(), x.scale(&q(2)), x.clone()]).unwrap().is_zero());
    }

    #[test]
    fn interior_is_an_antiderivation(a in form(2), b in form(3), x in vector()) {
        let lhs = a.wedge(&b).unwrap().interior(&x).unwrap();
        let first = a.interior(&x).unwrap().wedge(&b).unwrap();
        let second = a.wedge(&b.interior(&x).unwrap()).unwrap().scale(&sign(2));
        prop_assert_eq!(lhs, &first + &second);
        let twice = a.interior(&x).unwrap().interior(&x).unwrap();
        prop_assert!(twice.is_empty());
    }

    #[test]
    fn tau_is_orthogonal_to_its_inputs(u in vector(), v in vector(), w in vector()) {
        let psi = psi::<Rational>();
        let t = canonical_tau(&psi, &u, &v, &w);
        prop_assert!(t.dot(&u).is_zero());
        prop_assert!(t.dot(&v).is_zero());
        prop_assert!(t.dot(&w).is_zero());
    }

    #[test]
    fn classification_tracks_orientation(rows in unit_rows(), angle in 0.0f64..std::f64::consts::TAU) {
        let base = classify(&Plane::new(rows.clone()).unwrap()).unwrap();
        let mut swapped = rows.clone();
        swapped.swap(0, 1);
        let flipped = classify(&Plane::new(swapped).unwrap()).unwrap();
        prop_assert!((flipped.value + base.value).abs() < 1e-9);
        let (c, s) = (angle.cos(), angle.sin());
        let mut rotated = rows.clone();
        rotated[0] = rows[0].scale(&c).axpy(s, &rows[1]);
        rotated[1] = rows[1].scale(&c).axpy(-s, &rows[0]);
        let turned = classify(&Plane::new(rotated).unwrap()).unwrap();
        prop_assert!((turned.value - base.value).abs() < 1e-9);
        prop_assert_eq!(turned.label, base.label);
    }

    #[test]
    fn matrix_inverse_round_trips(entries in prop::array::uniform4(prop::array::uniform4(-2.0f64..2.0))) {
        let m = Matrix4(entries);
        prop_assume!(m.det().abs() > 0.1);
        let inv = m.inverse().unwrap();
        prop_assert!(m.mul(&inv).max_abs_diff(&Matrix4::identity()) < 1e-9);
        prop_assert!(inv.mul(&m).max_abs_diff(&Matrix4::identity()) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn discrete_exterior_derivative_squares_to_zero(degree in 0usize..=2, seed in any::<u64>()) {
        let grid = PeriodicGrid4::new(8).unwrap();
        let f = TrigForm::random(degree, 2, 2, 1.0, seed).sample(grid).unwrap();
        let dd = f.exterior_derivative().unwrap().exterior_derivative().unwrap();
        prop_assert!(dd.sup_norm() < 1e-10);
    }
}

#[test]
fn double_star_sign_on_every_blade() {
    for k in 0..=8 {
        for idx in MultiIndex::all_of_degree(k) {
            let blade = KForm::<Rational>::blade(idx, q(1));
            assert_eq!(blade.hodge_star().hodge_star(), blade.scale(&sign(k * (8 - k))), "{idx}");
        }
    }
}
