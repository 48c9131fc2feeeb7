use num_traits::Signed;
use proptest::prelude::*;

use tropdeg::examples::{quintic_polytope, quintic_split};
use tropdeg::exactlin::{rat, Int, IntMatrix, IntVector, RatPoint};
use tropdeg::polytope::{
    hull, hull_i64, is_elementary_simplex, is_reflexive, lattice_points, minkowski_sum, normalized_volume, polar_dual,
};

fn sorted(mut v: Vec<RatPoint>) -> Vec<RatPoint> {
    v.sort();
    v
}

const QUINTIC_DUAL: [[i64; 4]; 5] = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [-1, -1, -1, -1]];

#[test]
fn quintic_is_reflexive_with_the_expected_dual() {
    let p = quintic_polytope();
    assert!(is_reflexive(&p).unwrap());
    let dual = polar_dual(&p).unwrap();
    let want = sorted(QUINTIC_DUAL.iter().map(|u| RatPoint::from_i64(u)).collect());
    assert_eq!(sorted(dual.vertices().to_vec()), want);

    // oracle: every dual vertex u gives a supporting inequality <u, x> >= -1
    // that is tight on four of the five vertices, so the facets sit at
    // lattice distance one from the origin
    for u in QUINTIC_DUAL {
        let u = IntVector::from_i64(&u);
        let values: Vec<_> = p.vertices().iter().map(|v| u.dot_rat(v)).collect();
        assert!(values.iter().all(|x| *x >= rat(-1, 1)));
        assert_eq!(values.iter().filter(|x| **x == rat(-1, 1)).count(), 4);
    }
}

#[test]
fn quintic_lattice_points_by_enumeration() {
    let p = quintic_polytope();
    assert_eq!(lattice_points(&p).len(), 126);
    // oracle: brute force over the bounding box [-1, 4]^4 with the dual inequalities
    let mut n = 0;
    for a in -1i64..=4 {
        for b in -1i64..=4 {
            for c in -1i64..=4 {
                for d in -1i64..=4 {
                    let x = [a, b, c, d];
                    let ok = QUINTIC_DUAL.iter().all(|u| u.iter().zip(&x).map(|(s, t)| s * t).sum::<i64>() >= -1);
                    n += ok as usize;
                }
            }
        }
    }
    assert_eq!(n, 126);
    // oracle: a 5-fold dilated unimodular 4-simplex has C(9, 4) lattice points
    assert_eq!(n, 9 * 8 * 7 * 6 / 24);
}

#[test]
fn quintic_volume_by_determinant() {
    let p = quintic_polytope();
    assert_eq!(normalized_volume(&p), rat(625, 1));
    // oracle: |det| of the edge vectors at the vertex -1
    let v0 = RatPoint::from_i64(&[-1, -1, -1, -1]);
    let edges: Vec<IntVector> =
        p.vertices().iter().filter(|v| **v != v0).map(|v| v.sub(&v0).to_int().unwrap()).collect();
    assert_eq!(IntMatrix::from_rows(&edges).det().abs(), Int::from(625));
}

#[test]
fn quintic_splits_into_simplices() {
    for i in 1..=4 {
        let (a, b) = quintic_split(i);
        let sum = minkowski_sum(&a, &b).unwrap();
        assert!(sum.same_set(&quintic_polytope()), "i = {i}");
    }
}

fn simplex_with_origin() -> impl Strategy<Value = Vec<Vec<i64>>> {
    // positive multiples of e1, e2 and -(e1+e2) wrapped around the origin, plus a stray point
    (1i64..4, 1i64..4, 1i64..4, -3i64..=3, -3i64..=3)
        .prop_map(|(a, b, c, x, y)| vec![vec![a, 0], vec![0, b], vec![-c, -c], vec![x, y]])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn polar_duality_is_an_involution(pts in simplex_with_origin()) {
        let pts: Vec<IntVector> = pts.iter().map(|p| IntVector::from_i64(p)).collect();
        let p = hull(&pts).unwrap();
        let dd = polar_dual(&polar_dual(&p).unwrap()).unwrap();
        prop_assert!(dd.same_set(&p));
    }

    #[test]
    fn planar_elementary_iff_unit_area(pts in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 2), 3)) {
        let vs: Vec<IntVector> = pts.iter().map(|p| IntVector::from_i64(p)).collect();
        let edges: Vec<IntVector> = vs[1..].iter().map(|v| v.sub(&vs[0])).collect();
        let det = IntMatrix::from_rows(&edges).det().abs();
        prop_assume!(det != Int::from(0));
        let s = hull(&vs).unwrap();
        // oracle: lattice points counted over the bounding box against the exact hull
        let box_points = (-3i64..=3).flat_map(|x| (-3i64..=3).map(move |y| RatPoint::from_i64(&[x, y])));
        let count = box_points.filter(|p| s.contains(p)).count();
        prop_assert_eq!(is_elementary_simplex(&s), count == 3);
        prop_assert_eq!(is_elementary_simplex(&s), det == Int::from(1));
        prop_assert_eq!(normalized_volume(&s), tropdeg::exactlin::rat_int(&det));
    }

    #[test]
    fn unit_volume_tetrahedra_are_elementary(pts in proptest::collection::vec(proptest::collection::vec(-2i64..=2, 3), 4)) {
        let vs: Vec<IntVector> = pts.iter().map(|p| IntVector::from_i64(p)).collect();
        let edges: Vec<IntVector> = vs[1..].iter().map(|v| v.sub(&vs[0])).collect();
        let det = IntMatrix::from_rows(&edges).det().abs();
        prop_assume!(det != Int::from(0));
        let s = hull(&vs).unwrap();
        prop_assert_eq!(normalized_volume(&s), tropdeg::exactlin::rat_int(&det));
        if det == Int::from(1) {
            prop_assert!(is_elementary_simplex(&s));
        }
        if is_elementary_simplex(&s) {
            prop_assert_eq!(lattice_points(&s).len(), 4);
        }
    }
}

#[test]
fn reeve_tetrahedron_is_empty_but_not_unimodular() {
    // in dimension three lattice-emptiness does not force volume one
    let r = hull_i64(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[1, 1, 3]]).unwrap();
    assert_eq!(lattice_points(&r).len(), 4);
    assert!(is_elementary_simplex(&r));
    assert_eq!(normalized_volume(&r), rat(3, 1));
}

#[test]
fn lower_dimensional_elementary_simplices() {
    assert!(is_elementary_simplex(&hull_i64(&[&[0, 0], &[1, 2]]).unwrap()));
    assert!(!is_elementary_simplex(&hull_i64(&[&[0, 0], &[2, 2]]).unwrap()));
    assert!(!is_elementary_simplex(&hull_i64(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[1, 1, 0]]).unwrap()));
}
