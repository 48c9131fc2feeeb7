//! Independent oracles shared by the integration tests and the acceptance run.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use tropdeg::embed::{embed_d, simplex_fibration, Embedding};
use tropdeg::examples::{ExampleSpec, Pipeline};
use tropdeg::exactlin::{saturated_basis, Int, IntMatrix, IntVector, Rat, RatPoint};
use tropdeg::par;
use tropdeg::polytope::{hull_i64, lattice_points, LatticePolytope};
use tropdeg::subdivision::{sum_refinement, Subdivision};
use tropdeg::tropical::{discriminant, transvection, SpaceKind, TropicalSpace};
use tropdeg::zeroring::hilbert_count;

/// Every algebraic property of one loop; returns a description of the first failure.
pub fn check_loop(t: &TropicalSpace, omega: usize, rho: usize) -> Result<(), String> {
    let l = t.loop_data(omega, rho).map_err(|e| e.to_string())?;
    let m = t.monodromy_of_loop(&l).map_err(|e| e.to_string())?;
    let d = t.dim();
    let id = IntMatrix::identity(d);
    if !m.det().is_one() {
        return Err(format!("det {:?}", m.det()));
    }
    let n = m.sub(&id);
    if n.rank() <= 1 && !n.mul(&n).is_zero() {
        return Err("(M - I)^2 != 0".into());
    }
    if n.rank() == 1 && transvection(&m).is_none() {
        return Err("rank one but no transvection form".into());
    }
    // the wall tangent, read in the chart at v+, is fixed
    let pts = t.face_points(rho);
    let dirs: Vec<RatPoint> = pts[1..].iter().map(|p| p.sub(&pts[0])).collect();
    let chart = t.chart(l.v_plus, l.sigma_plus).ok_or("missing chart")?;
    for w in saturated_basis(&dirs, t.ambient_dim()) {
        let cw = chart.mul_vec(&w);
        if m.mul_vec(&cw) != cw {
            return Err(format!("wall tangent {w:?} moved"));
        }
    }
    // the reversed loop gives the inverse
    let r = t.monodromy_reversed(omega, rho).map_err(|e| e.to_string())?;
    if !r.mul(&m).is_identity() || !m.mul(&r).is_identity() {
        return Err("reversed loop is not the inverse".into());
    }
    // changing the base vertex conjugates by the transition across sigma+
    let psi = t.transition(l.v_plus, l.v_minus, l.sigma_plus).map_err(|e| e.to_string())?;
    let at_minus = t.monodromy_at_minus(omega, rho).map_err(|e| e.to_string())?;
    if at_minus.mul(&psi) != psi.mul(&m) {
        return Err("monodromy at v- is not the conjugate".into());
    }
    Ok(())
}

pub fn check_space(spec: &ExampleSpec) -> (usize, Vec<String>) {
    let t = &super::pipeline(spec).space;
    if t.dim() < 2 {
        return (0, vec![]);
    }
    let disc = discriminant(t).unwrap();
    let pairs: Vec<(usize, usize)> = disc.cells.iter().map(|c| (c.entry.loop_data.omega, c.entry.loop_data.rho)).collect();
    let failures = par::filter_map(&pairs, |&(o, r)| check_loop(t, o, r).err().map(|e| format!("{spec:?} ({o}, {r}): {e}")));
    (pairs.len(), failures)
}

/// Integer points of the bounding box of `p`.
pub fn box_points(p: &LatticePolytope) -> Vec<IntVector> {
    let n = p.ambient_dim();
    let lo: Vec<i64> = (0..n).map(|j| p.vertices().iter().map(|v| v.coords()[j].floor().to_integer()).min().unwrap().to_i64().unwrap()).collect();
    let hi: Vec<i64> = (0..n).map(|j| p.vertices().iter().map(|v| v.coords()[j].ceil().to_integer()).max().unwrap().to_i64().unwrap()).collect();
    let mut out = Vec::new();
    let mut cur = lo.clone();
    loop {
        out.push(IntVector::from_i64(&cur));
        let mut j = 0;
        loop {
            if j == n {
                return out;
            }
            if cur[j] < hi[j] {
                cur[j] += 1;
                break;
            }
            cur[j] = lo[j];
            j += 1;
        }
    }
}

pub fn dilated_cells(t: &TropicalSpace, d: u32) -> Vec<LatticePolytope> {
    let dr = Rat::from_integer(Int::from(d));
    t.maximal_face_ids().iter().map(|&f| t.face_polytope(f).dilate(&dr)).collect()
}

/// Oracle: distinct lattice points of the union of the dilated cells, found
/// by scanning each cell's bounding box.
pub fn union_count(t: &TropicalSpace, d: u32) -> usize {
    let mut seen: BTreeSet<IntVector> = BTreeSet::new();
    for c in dilated_cells(t, d) {
        for x in box_points(&c) {
            if c.contains_int(&x) {
                seen.insert(x);
            }
        }
    }
    seen.len()
}

/// Oracle: inclusion–exclusion over all nonempty sets of cells.
pub fn inclusion_exclusion(t: &TropicalSpace, d: u32) -> i64 {
    let cells = dilated_cells(t, d);
    let m = cells.len();
    assert!(m <= 10, "inclusion-exclusion is exponential in the number of cells");
    let mut total = 0i64;
    for mask in 1u32..(1 << m) {
        let mut inter: Option<LatticePolytope> = None;
        for (i, c) in cells.iter().enumerate() {
            if mask >> i & 1 == 1 {
                inter = Some(match inter {
                    None => c.clone(),
                    Some(p) => p.intersection(c).unwrap(),
                });
            }
        }
        let p = inter.unwrap();
        let n = if p.is_empty() { 0 } else { lattice_points(&p).len() as i64 };
        total += if mask.count_ones() % 2 == 1 { n } else { -n };
    }
    total
}

pub fn flat(pts: &[&[i64]], cells: Vec<Vec<usize>>, label: &str) -> TropicalSpace {
    let n = pts[0].len();
    let pts: Vec<RatPoint> = pts.iter().map(|p| RatPoint::from_i64(p)).collect();
    TropicalSpace::new(pts, cells, |_, _| Ok(IntMatrix::identity(n)), SpaceKind::Synthetic, label).unwrap()
}

pub fn two_segments() -> TropicalSpace {
    flat(&[&[0], &[1], &[2]], vec![vec![0, 1], vec![1, 2]], "two segments")
}

pub fn squares() -> TropicalSpace {
    let a = hull_i64(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]).unwrap();
    let b = hull_i64(&[&[1, 0], &[2, 0], &[1, 1], &[2, 1]]).unwrap();
    let sub = Subdivision::from_polytopes(hull_i64(&[&[0, 0], &[2, 0], &[0, 1], &[2, 1]]).unwrap(), vec![a, b]).unwrap();
    TropicalSpace::from_subdivision(&sub, "squares").unwrap()
}

pub fn fan() -> TropicalSpace {
    let outer = hull_i64(&[&[1, 0], &[0, 1], &[-1, -1]]).unwrap();
    let cells = vec![
        hull_i64(&[&[0, 0], &[1, 0], &[0, 1]]).unwrap(),
        hull_i64(&[&[0, 0], &[0, 1], &[-1, -1]]).unwrap(),
        hull_i64(&[&[0, 0], &[-1, -1], &[1, 0]]).unwrap(),
    ];
    TropicalSpace::from_subdivision(&Subdivision::from_polytopes(outer, cells).unwrap(), "fan").unwrap()
}

pub fn check_against_oracles(t: &TropicalSpace, max_d: u32, with_ie: bool) {
    assert_eq!(hilbert_count(t, 0), Int::one(), "{}: connected", t.label());
    for d in 1..=max_d {
        let h = hilbert_count(t, d);
        assert_eq!(h, Int::from(union_count(t, d)), "{} d = {d}", t.label());
        if with_ie {
            assert_eq!(h, Int::from(inclusion_exclusion(t, d)), "{} d = {d}", t.label());
        }
    }
}

pub fn sorted_cells(cells: impl Iterator<Item = Vec<RatPoint>>) -> Vec<Vec<RatPoint>> {
    let mut v: Vec<Vec<RatPoint>> = cells
        .map(|mut c| {
            c.sort();
            c.dedup();
            c
        })
        .collect();
    v.sort();
    v
}

/// Oracle for the diagonal: every graph cell of the one-parameter family
/// lies over a cell of the common refinement with height mpcp + tyurin,
/// evaluated pointwise; and the diagonal of the two-parameter family has
/// exactly the same cells.
pub fn check_diagonal(p: &Pipeline) {
    assert!(p.diagonal_compatible(), "{:?}", p.spec);
    let n = p.polytope.ambient_dim();
    let one = p.one_parameter.total_complex();
    for c in one {
        for v in c.vertices() {
            let x = RatPoint::new(v.coords()[..n].to_vec());
            let h = p.mpcp.eval(&x).unwrap() + p.tyurin.eval(&x).unwrap();
            assert_eq!(v.coords()[n], h, "{:?}", p.spec);
        }
    }
    let (refinement, _) = sum_refinement(&p.mpcp, &p.tyurin).unwrap();
    let projected = sorted_cells(one.iter().map(|c| c.vertices().iter().map(|v| RatPoint::new(v.coords()[..n].to_vec())).collect()));
    let common = sorted_cells((0..refinement.len()).map(|i| refinement.maximal_cells()[i].vertices().to_vec()));
    assert_eq!(projected, common, "{:?}", p.spec);
    let diag = sorted_cells(p.two_parameter.diagonal_restriction().iter().map(|c| c.vertices().to_vec()));
    let one_cells = sorted_cells(one.iter().map(|c| c.vertices().to_vec()));
    assert_eq!(diag, one_cells, "{:?}", p.spec);
}

pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n)).filter(|m| m.count_ones() as usize == k).map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect()
}

/// Onto iff the maximal minors are coprime.
pub fn onto_by_minors(m: &IntMatrix) -> bool {
    let mut g = Int::zero();
    for cs in subsets(m.cols(), m.rows()) {
        let mut sub = IntMatrix::zeros(m.rows(), m.rows());
        for (j, &c) in cs.iter().enumerate() {
            for i in 0..m.rows() {
                sub.set(i, j, m.get(i, c).clone());
            }
        }
        g = g.gcd(&sub.det());
    }
    g.is_one()
}

/// Independent recomputation of every tangent check, and of the fibre values.
pub fn verify(p: &Pipeline, e: &Embedding) {
    let t = &p.space;
    let n = t.ambient_dim();
    assert!(!e.checks.is_empty());
    for c in &e.checks {
        let ys = &p.fibration.functionals[&c.ambient_cell];
        let mut rows = Vec::new();
        let mut integral = true;
        for y in &ys[1..] {
            integral &= y.linear.iter().all(Rat::is_integer);
            rows.push(IntVector::new(y.linear.iter().map(|x| x.to_integer()).collect()));
        }
        let oracle = integral && onto_by_minors(&IntMatrix::from_rows(&rows).mul(t.tangent_basis(c.ambient_cell)));
        assert_eq!(c.surjective, oracle, "{:?} cell {}", p.spec, c.ambient_cell);
        // the T_D cell sits over (1, ..., 1)
        let bary = e.t_d.face_barycenter(c.cell);
        for y in ys {
            assert_eq!(y.eval(&bary), Rat::one());
        }
        assert_eq!(bary.dim(), n);
    }
}

pub fn check_example(p: &Pipeline) {
    let e = embed_d(&p.space, &p.fibration).unwrap();
    verify(p, &e);
    assert!(e.surjective, "{:?}", p.spec);
    assert!(e.checks.iter().all(|c| c.surjective && c.saturated));
    assert!(!e.rescaled);
    assert!(e.iota.face_compatible(&e.t_d, &p.space));
    let sf = simplex_fibration(&p.space, &p.fibration).unwrap();
    assert!(sf.matches_embedding(&p.space, &e).unwrap(), "{:?}", p.spec);
}
