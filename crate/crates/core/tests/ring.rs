mod common;

use common::oracles::*;

use num_traits::One;
use proptest::prelude::*;

use tropdeg::embed::embed_d;
use tropdeg::exactlin::{rat, Int, IntVector, Rat};
use tropdeg::zeroring::{embedded_ideal, hilbert_count, proj_ring, GluingData};


#[test]
fn two_segments_count_2d_plus_1() {
    let t = two_segments();
    for d in 0..=5 {
        assert_eq!(hilbert_count(&t, d), Int::from(2 * d + 1));
    }
    check_against_oracles(&t, 5, true);
}

#[test]
fn small_complexes() {
    check_against_oracles(&squares(), 5, true);
    check_against_oracles(&fan(), 5, true);
    // two disjoint segments: two components in degree 0
    let t = flat(&[&[0], &[1], &[3], &[4]], vec![vec![0, 1], vec![2, 3]], "apart");
    assert_eq!(hilbert_count(&t, 0), Int::from(2));
    assert_eq!(hilbert_count(&t, 3), Int::from(union_count(&t, 3)));
}

#[test]
fn example_spaces() {
    check_against_oracles(&common::kp1_2(1).space, 5, true);
    check_against_oracles(&common::kp1_2(2).space, 5, false);
    for k in 1..=3 {
        check_against_oracles(&common::hypercube(k).space, 5, true);
    }
    let p = common::kp1_2(2);
    let e = embed_d(&p.space, &p.fibration).unwrap();
    check_against_oracles(&e.t_d, 5, true);
}

#[test]
fn quintic_spaces() {
    for i in 1..=4 {
        check_against_oracles(&common::quintic(i).space, 5, false);
    }
}

#[test]
fn presentation_generators_are_the_degree_one_points() {
    let t = squares();
    let pres = proj_ring(&t, &GluingData::vanilla(3), 3).unwrap();
    assert_eq!(Int::from(pres.generators.len()), hilbert_count(&t, 1));
    assert!(pres.relations.iter().all(|r| r.degree() <= 3));
}

fn nonzero_rat() -> impl Strategy<Value = Rat> {
    (1i64..=7, 1i64..=5, any::<bool>()).prop_map(|(n, d, neg)| rat(if neg { -n } else { n }, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn gluing_twists_are_undone_by_rescaling(t0 in nonzero_rat(), t1 in nonzero_rat(), t2 in nonzero_rat()) {
        let t = squares();
        let vanilla = proj_ring(&t, &GluingData::vanilla(3), 2).unwrap();
        let torus = vec![t0, t1, t2];
        let mut g = GluingData::vanilla(3);
        g.set(0, 1, torus).unwrap();
        let twisted = proj_ring(&t, &g, 2).unwrap();
        // points first seen in the second square carry the twist of their homogenized exponent
        let scales: Vec<Rat> = twisted
            .generators
            .iter()
            .map(|gen| if gen.cell == 1 { g.factor(0, 1, &gen.point.concat(&IntVector::from_i64(&[1]))) } else { Rat::one() })
            .collect();
        prop_assert_eq!(twisted.substitute(&scales).unwrap(), vanilla);
    }

    #[test]
    fn embedded_ideal_is_projective(a0 in 1i64..=9, a1 in 1i64..=9, l in nonzero_rat()) {
        let p = common::kp1_2(2);
        let e = embed_d(&p.space, &p.fibration).unwrap();
        let g = GluingData::vanilla(p.space.ambient_dim() + 1);
        let a = vec![rat(a0, 1), rat(a1, 1)];
        let la: Vec<Rat> = a.iter().map(|x| x * &l).collect();
        let i1 = embedded_ideal(&p.space, &p.fibration, &e, &a, &g).unwrap();
        let i2 = embedded_ideal(&p.space, &p.fibration, &e, &la, &g).unwrap();
        prop_assert_eq!(&i1, &i2);
        prop_assert!(i1.relations.iter().all(|r| r.value == rat(a1, a0)));
    }
}
