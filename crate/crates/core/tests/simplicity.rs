mod common;

use std::time::Instant;

use num_traits::One;

use tropdeg::examples::build_kp1_2;
use tropdeg::exactlin::{Int, RatPoint};
use tropdeg::tropical::{count_focus_focus, discriminant, is_simple, MonodromyReport, TropicalSpace};

/// Oracle for a segment monodromy polytope conv{0, w}: elementary iff w is primitive.
fn segments_are_primitive(rep: &MonodromyReport) -> bool {
    rep.entries.iter().all(|e| {
        let vs = e.polytope.vertices();
        vs.len() == 2 && {
            let w = vs[0].sub(&vs[1]).to_int().expect("lattice segment");
            w.content().is_one()
        }
    })
}

#[test]
fn k3_has_24_focus_focus_points() {
    let start = Instant::now();
    let p = build_kp1_2(2).unwrap();
    let n = count_focus_focus(&p.space).unwrap();
    let elapsed = start.elapsed();
    assert_eq!(n, Int::from(24));
    assert!(elapsed.as_secs_f64() < 10.0, "{elapsed:?}");
    // oracle: a simple integral affine 2-sphere has as many focus-focus points
    // as the Euler characteristic of the K3 surface
    let t = &p.space;
    assert_eq!(t.euler_characteristic(), 2);
    let d = discriminant(t).unwrap();
    assert_eq!(d.len(), 24);
    // all of them are midpoints of interior edges
    for c in &d.cells {
        let e = t.face_points(c.entry.loop_data.omega);
        assert_eq!(c.cell.vertices(), &[RatPoint::barycenter(&e)]);
    }
}

#[test]
fn kp1_2_is_simple() {
    for k in 2..=3 {
        let start = Instant::now();
        let p = common::kp1_2(k);
        let (simple, rep) = is_simple(&p.space).unwrap();
        assert!(simple, "k = {k}");
        assert!(!rep.needs_review());
        assert!(rep.entries.iter().all(|e| e.elementary));
        assert!(segments_are_primitive(&rep));
        assert!(!rep.entries.is_empty());
        if k == 3 {
            assert!(start.elapsed().as_secs_f64() < 60.0);
        }
    }
}

fn doubled(t: &TropicalSpace) -> bool {
    // doubling every transvection displacement makes the polytopes non-elementary
    let (_, rep) = is_simple(t).unwrap();
    rep.entries.iter().all(|e| {
        let w = e.polytope.vertices()[1].sub(&e.polytope.vertices()[0]).scale(&tropdeg::exactlin::rat(2, 1));
        let s = tropdeg::polytope::hull_rat(&[RatPoint::zeros(w.dim()), w]).unwrap();
        !tropdeg::polytope::is_elementary_simplex(&s)
    })
}

#[test]
fn doubled_displacements_are_not_elementary() {
    assert!(doubled(&common::kp1_2(2).space));
}

#[test]
fn reports_list_every_cell() {
    let p = common::kp1_2(2);
    let (_, rep) = is_simple(&p.space).unwrap();
    let j = rep.to_json(&p.space);
    assert_eq!(j["entries"].as_array().unwrap().len(), 24);
    assert!(j["entries"].as_array().unwrap().iter().all(|e| e["elementary"] == true && e["multiplicity"] == "1"));
}
