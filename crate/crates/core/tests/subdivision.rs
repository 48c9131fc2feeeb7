mod common;

use common::oracles::*;

use tropdeg::exactlin::{Rat, RatPoint};
use tropdeg::polytope::{is_elementary_simplex, normalized_volume};
use tropdeg::subdivision::{is_convex, is_strictly_convex};


#[test]
fn diagonal_compatibility_kp1_2() {
    for k in 1..=3 {
        check_diagonal(common::kp1_2(k));
    }
}

#[test]
fn diagonal_compatibility_quintic() {
    for i in 1..=4 {
        check_diagonal(common::quintic(i));
    }
}

#[test]
fn diagonal_compatibility_hypercube() {
    for k in 1..=3 {
        check_diagonal(common::hypercube(k));
    }
}

#[test]
fn mpcp_certificates() {
    // the kp1-2 height is pulled back from the first factor and is only convex on the product
    let k3 = common::kp1_2(2);
    assert!(is_convex(&k3.mpcp, k3.mpcp.subdivision()).unwrap());
    for p in [common::quintic(2), common::hypercube(2)] {
        let s = p.mpcp.subdivision();
        assert!(is_strictly_convex(&p.mpcp, s).unwrap(), "{:?}", p.spec);
        assert!(s.volumes_add_up());
        assert!(s.is_fine());
        // crepant: every maximal cell is a cone from the origin over an elementary boundary simplex
        let origin = RatPoint::zeros(p.polytope.ambient_dim());
        for c in s.maximal_cells() {
            assert!(c.vertices().contains(&origin));
            let base: Vec<RatPoint> = c.vertices().iter().filter(|v| **v != origin).cloned().collect();
            assert!(is_elementary_simplex(&tropdeg::polytope::hull_rat(&base).unwrap()));
        }
        let total = s.maximal_cells().iter().map(normalized_volume).fold(Rat::from_integer(0.into()), |a, b| a + b);
        assert_eq!(total, normalized_volume(&p.polytope));
        assert!(is_convex(&p.tyurin, p.tyurin.subdivision()).unwrap());
    }
}

#[test]
fn quintic_slice_is_a_wall_of_the_boundary() {
    for i in 1..=4 {
        let p = common::quintic(i);
        assert!(p.slice_is_wall(), "i = {i}");
        let s = p.slice.as_ref().unwrap();
        assert_eq!(s.level, Rat::from_integer((i as i64 - 1).into()));
    }
}
