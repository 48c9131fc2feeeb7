//! Convex polytopes with exact vertex and facet descriptions.
//!
//! Vertices are stored as [`RatPoint`]s so that rational slices (fibres of
//! fibrations, barycentric pieces) stay first-class; lattice polytopes are the
//! ones whose vertices happen to be integral.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{
    coordinates_in, dd_generators, orthogonal_complement, parse_rat, rat, rat_int, rat_rank_points,
    saturated_basis, Int, IntMatrix, IntVector, Rat, RatPoint,
};
use crate::par;

/// Inequality `<normal, x> >= -offset`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Facet {
    pub normal: IntVector,
    pub offset: Rat,
}

impl Facet {
    pub fn new(normal: IntVector, offset: Rat) -> Self {
        Facet { normal, offset }
    }

    /// `<normal, x> + offset`; nonnegative on the polytope, zero on the facet.
    pub fn eval(&self, x: &RatPoint) -> Rat {
        self.normal.dot_rat(x) + &self.offset
    }
}

/// Equation `<normal, x> = value` of the affine span.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Equation {
    pub normal: IntVector,
    pub value: Rat,
}

/// A bounded convex polytope, possibly lower dimensional, possibly empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticePolytope {
    ambient_dim: usize,
    vertices: Vec<RatPoint>,
    facets: Vec<Facet>,
    equations: Vec<Equation>,
    dim: isize,
}

impl LatticePolytope {
    pub fn empty(ambient_dim: usize) -> Self {
        LatticePolytope { ambient_dim, vertices: vec![], facets: vec![], equations: vec![], dim: -1 }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Intrinsic dimension; `-1` for the empty polytope.
    pub fn dim(&self) -> isize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.dim < 0
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim == self.ambient_dim as isize
    }

    /// Vertices in lexicographic order.
    pub fn vertices(&self) -> &[RatPoint] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    pub fn is_lattice(&self) -> bool {
        self.vertices.iter().all(RatPoint::is_integral)
    }

    /// Integral vertices; `None` if some vertex is not a lattice point.
    pub fn lattice_vertices(&self) -> Option<Vec<IntVector>> {
        self.vertices.iter().map(RatPoint::to_int).collect()
    }

    pub fn is_simplex(&self) -> bool {
        self.dim >= 0 && self.vertices.len() as isize == self.dim + 1
    }

    pub fn contains(&self, x: &RatPoint) -> bool {
        !self.is_empty()
            && self.equations.iter().all(|e| e.normal.dot_rat(x) == e.value)
            && self.facets.iter().all(|f| !f.eval(x).is_negative())
    }

    pub fn contains_int(&self, x: &IntVector) -> bool {
        self.contains(&x.to_rat())
    }

    /// Strictly inside with respect to every facet (relative interior).
    pub fn relative_interior_contains(&self, x: &RatPoint) -> bool {
        self.contains(x) && self.facets.iter().all(|f| f.eval(x).is_positive())
    }

    /// Indices of the facets on which `x` is tight.
    pub fn tight_facets(&self, x: &RatPoint) -> Vec<usize> {
        (0..self.facets.len()).filter(|&i| self.facets[i].eval(x).is_zero()).collect()
    }

    /// `max <c, x>` over the polytope.
    pub fn max_functional(&self, c: &IntVector) -> Option<Rat> {
        self.vertices.iter().map(|v| c.dot_rat(v)).max()
    }

    pub fn min_functional(&self, c: &IntVector) -> Option<Rat> {
        self.vertices.iter().map(|v| c.dot_rat(v)).min()
    }

    pub fn barycenter(&self) -> RatPoint {
        RatPoint::barycenter(&self.vertices)
    }

    pub fn translate(&self, t: &RatPoint) -> LatticePolytope {
        hull_rat(&self.vertices.iter().map(|v| v.add(t)).collect::<Vec<_>>()).expect("nonempty")
    }

    pub fn dilate(&self, k: &Rat) -> LatticePolytope {
        hull_rat(&self.vertices.iter().map(|v| v.scale(k)).collect::<Vec<_>>()).expect("nonempty")
    }

    /// Image under `x -> A x` (A need not be square).
    pub fn linear_image(&self, a: &IntMatrix) -> LatticePolytope {
        if self.is_empty() {
            return LatticePolytope::empty(a.rows());
        }
        let pts: Vec<RatPoint> = self.vertices.iter().map(|v| apply_rat(a, v)).collect();
        hull_rat(&pts).expect("nonempty")
    }

    /// Intersection with additional inequalities / equations.
    pub fn intersect(&self, ineqs: &[Facet], eqs: &[Equation]) -> Result<LatticePolytope> {
        let mut all_f = self.facets.clone();
        all_f.extend(ineqs.iter().cloned());
        let mut all_e = self.equations.clone();
        all_e.extend(eqs.iter().cloned());
        if self.is_empty() {
            return Ok(self.clone());
        }
        from_inequalities(self.ambient_dim, &all_f, &all_e)
    }

    pub fn intersection(&self, other: &LatticePolytope) -> Result<LatticePolytope> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch("intersection".into()));
        }
        if self.is_empty() || other.is_empty() {
            return Ok(LatticePolytope::empty(self.ambient_dim));
        }
        self.intersect(&other.facets, &other.equations)
    }

    /// Face spanned by the vertices of `self` with the given indices.
    pub fn face_polytope(&self, face: &Face) -> LatticePolytope {
        if face.vertices.is_empty() {
            return LatticePolytope::empty(self.ambient_dim);
        }
        let pts: Vec<RatPoint> = face.vertices.iter().map(|&i| self.vertices[i].clone()).collect();
        hull_rat(&pts).expect("nonempty")
    }

    /// Point-set equality (vertex lists are canonical, ambient dims must agree).
    pub fn same_set(&self, other: &LatticePolytope) -> bool {
        self.ambient_dim == other.ambient_dim && self.vertices == other.vertices
    }

    /// Lattice points in the relative interior.
    pub fn interior_lattice_points(&self) -> Vec<IntVector> {
        lattice_points(self).into_iter().filter(|p| self.relative_interior_contains(&p.to_rat())).collect()
    }

    /// Lattice points on the relative boundary.
    pub fn boundary_lattice_points(&self) -> Vec<IntVector> {
        lattice_points(self).into_iter().filter(|p| !self.relative_interior_contains(&p.to_rat())).collect()
    }

    /// Primitive basis of the lattice parallel to the affine span.
    pub fn tangent_lattice_basis(&self) -> Vec<IntVector> {
        if self.dim <= 0 {
            return vec![];
        }
        let p0 = &self.vertices[0];
        let dirs: Vec<RatPoint> = self.vertices[1..].iter().map(|v| v.sub(p0)).collect();
        saturated_basis(&dirs, self.ambient_dim)
    }
}

pub(crate) fn apply_rat(a: &IntMatrix, v: &RatPoint) -> RatPoint {
    RatPoint::new((0..a.rows()).map(|i| a.row(i).dot_rat(v)).collect())
}

/// Convex hull of lattice points.
pub fn hull(points: &[IntVector]) -> Result<LatticePolytope> {
    hull_rat(&points.iter().map(RatPoint::from_int).collect::<Vec<_>>())
}

pub fn hull_i64(points: &[&[i64]]) -> Result<LatticePolytope> {
    hull(&points.iter().map(|p| IntVector::from_i64(p)).collect::<Vec<_>>())
}

/// Convex hull of rational points.
pub fn hull_rat(points: &[RatPoint]) -> Result<LatticePolytope> {
    if points.is_empty() {
        return Err(Error::Empty("hull of no points".into()));
    }
    let n = points[0].dim();
    if points.iter().any(|p| p.dim() != n) {
        return Err(Error::DimensionMismatch("hull points of differing dimension".into()));
    }
    let mut pts: Vec<RatPoint> = points.to_vec();
    pts.sort();
    pts.dedup();
    let p0 = pts[0].clone();
    let dirs: Vec<RatPoint> = pts[1..].iter().map(|p| p.sub(&p0)).collect();
    let dim = rat_rank_points(&dirs);
    let comp = orthogonal_complement(&dirs, n);
    let equations: Vec<Equation> =
        comp.into_iter().map(|e| Equation { value: e.dot_rat(&p0), normal: e }).collect();
    if dim == 0 {
        return Ok(LatticePolytope { ambient_dim: n, vertices: vec![p0], facets: vec![], equations, dim: 0 });
    }
    let gens: Vec<IntVector> = pts
        .iter()
        .map(|p| {
            let (num, den) = p.clear_denominators();
            num.concat(&IntVector::new(vec![den]))
        })
        .collect();
    let (fvecs, _lin) = dd_generators(&gens, n + 1);
    let mut facets: Vec<Facet> = fvecs
        .into_iter()
        .filter_map(|f| {
            let c = f.coords();
            let a = IntVector::new(c[..n].to_vec());
            let g = a.content();
            if g.is_zero() {
                return None;
            }
            let offset = BigRational::new(c[n].clone(), g.clone());
            Some(Facet { normal: a.primitive().ok()?, offset })
        })
        .collect();
    facets.sort();
    facets.dedup();
    let eq_rows: Vec<RatPoint> = equations.iter().map(|e| e.normal.to_rat()).collect();
    let vertices: Vec<RatPoint> = pts
        .into_iter()
        .filter(|p| {
            let mut rows = eq_rows.clone();
            rows.extend(facets.iter().filter(|f| f.eval(p).is_zero()).map(|f| f.normal.to_rat()));
            rat_rank_points(&rows) == n
        })
        .collect();
    Ok(LatticePolytope { ambient_dim: n, vertices, facets, equations, dim: dim as isize })
}

/// Polytope `{x : <n_i, x> >= -c_i, <e_j, x> = v_j}`; errors if unbounded.
pub fn from_inequalities(ambient_dim: usize, ineqs: &[Facet], eqs: &[Equation]) -> Result<LatticePolytope> {
    let n = ambient_dim;
    let hom = |normal: &IntVector, off: &Rat| -> IntVector {
        // <a,x> + c t >= 0, scaled to integers
        let den = off.denom().clone();
        normal.scale(&den).concat(&IntVector::new(vec![off.numer().clone()]))
    };
    let mut rows: Vec<IntVector> = Vec::new();
    for f in ineqs {
        if f.normal.dim() != n {
            return Err(Error::DimensionMismatch("inequality".into()));
        }
        rows.push(hom(&f.normal, &f.offset));
    }
    for e in eqs {
        if e.normal.dim() != n {
            return Err(Error::DimensionMismatch("equation".into()));
        }
        let neg = -e.value.clone();
        rows.push(hom(&e.normal, &neg));
        rows.push(hom(&e.normal.neg(), &e.value));
    }
    rows.push(IntVector::unit(n + 1, n));
    let (rays, lin) = dd_generators(&rows, n + 1);
    if !lin.is_empty() {
        return Err(Error::Unbounded);
    }
    let mut verts = Vec::new();
    for r in &rays {
        let t = &r.coords()[n];
        if t.is_zero() {
            return Err(Error::Unbounded);
        }
        let tr = rat_int(t);
        verts.push(RatPoint::new(r.coords()[..n].iter().map(|x| rat_int(x) / &tr).collect()));
    }
    if verts.is_empty() {
        return Ok(LatticePolytope::empty(n));
    }
    hull_rat(&verts)
}

/// `{m : <m, x> >= -1 for all x in P}`.
pub fn polar_dual(p: &LatticePolytope) -> Result<LatticePolytope> {
    if !p.is_full_dimensional() || p.facets.iter().any(|f| !f.offset.is_positive()) {
        return Err(Error::PolarUndefined);
    }
    let pts: Vec<RatPoint> = p.facets.iter().map(|f| f.normal.to_rat().scale(&(Rat::one() / &f.offset))).collect();
    hull_rat(&pts)
}

/// A lattice polytope with the origin in its interior and every facet at lattice distance one.
pub fn is_reflexive(p: &LatticePolytope) -> Result<bool> {
    if !p.is_full_dimensional() || p.facets.iter().any(|f| !f.offset.is_positive()) {
        return Err(Error::PolarUndefined);
    }
    Ok(p.is_lattice() && p.facets.iter().all(|f| f.offset.is_one()))
}

/// All lattice points, in lexicographic order.
pub fn lattice_points(p: &LatticePolytope) -> Vec<IntVector> {
    if p.is_empty() {
        return vec![];
    }
    let n = p.ambient_dim;
    if n == 0 {
        return vec![IntVector::zeros(0)];
    }
    let lo: Vec<Int> = (0..n).map(|i| p.vertices.iter().map(|v| v.coords()[i].ceil().to_integer()).min().unwrap()).collect();
    let hi: Vec<Int> = (0..n).map(|i| p.vertices.iter().map(|v| v.coords()[i].floor().to_integer()).max().unwrap()).collect();
    // integer-scaled constraints for a fast filter
    let ineqs: Vec<(IntVector, Int)> = p
        .facets
        .iter()
        .map(|f| (f.normal.scale(f.offset.denom()), f.offset.numer().clone()))
        .collect();
    let eqs: Vec<(IntVector, Int, Int)> = p
        .equations
        .iter()
        .map(|e| (e.normal.clone(), e.value.numer().clone(), e.value.denom().clone()))
        .collect();
    let mut slabs = Vec::new();
    let mut x = lo[0].clone();
    while x <= hi[0] {
        slabs.push(x.clone());
        x += 1;
    }
    let found = par::flat_map(&slabs, |x0| {
        let mut out = Vec::new();
        let mut cur = lo.clone();
        cur[0] = x0.clone();
        if hi.iter().zip(&lo).any(|(h, l)| h < l) {
            return out;
        }
        loop {
            let v = IntVector::new(cur.clone());
            let ok = eqs.iter().all(|(a, num, den)| &(a.dot(&v) * den) == num)
                && ineqs.iter().all(|(a, c)| !(a.dot(&v) + c).is_negative());
            if ok {
                out.push(v);
            }
            // odometer over coordinates 1..n
            let mut i = n - 1;
            loop {
                if i == 0 {
                    return out;
                }
                if cur[i] < hi[i] {
                    cur[i] += 1;
                    break;
                }
                cur[i] = lo[i].clone();
                i -= 1;
            }
        }
    });
    found
}

pub fn minkowski_sum(p: &LatticePolytope, q: &LatticePolytope) -> Result<LatticePolytope> {
    if p.ambient_dim != q.ambient_dim {
        return Err(Error::DimensionMismatch(format!(
            "minkowski sum of polytopes in dimensions {} and {}",
            p.ambient_dim, q.ambient_dim
        )));
    }
    if p.is_empty() || q.is_empty() {
        return Ok(LatticePolytope::empty(p.ambient_dim));
    }
    let pts: Vec<RatPoint> = p.vertices.iter().flat_map(|a| q.vertices.iter().map(move |b| a.add(b))).collect();
    hull_rat(&pts)
}

pub fn product(p: &LatticePolytope, q: &LatticePolytope) -> LatticePolytope {
    if p.is_empty() || q.is_empty() {
        return LatticePolytope::empty(p.ambient_dim + q.ambient_dim);
    }
    let pts: Vec<RatPoint> = p.vertices.iter().flat_map(|a| q.vertices.iter().map(move |b| a.concat(b))).collect();
    hull_rat(&pts).expect("nonempty")
}

/// A lattice simplex whose only lattice points are its vertices.
pub fn is_elementary_simplex(p: &LatticePolytope) -> bool {
    p.is_simplex() && p.is_lattice() && lattice_points(p).len() == p.vertices.len()
}

/// `dim! * volume` measured in the lattice parallel to the affine span.
///
/// This is an integer for lattice polytopes; for rational slices it is the
/// corresponding rational number.
pub fn normalized_volume(p: &LatticePolytope) -> Rat {
    if p.dim <= 0 {
        return if p.dim == 0 { Rat::one() } else { Rat::zero() };
    }
    let basis = p.tangent_lattice_basis();
    let p0 = p.vertices[0].clone();
    let local: Vec<RatPoint> = p
        .vertices
        .iter()
        .map(|v| RatPoint::new(coordinates_in(&basis, &v.sub(&p0)).expect("vertex lies in its own span")))
        .collect();
    let simplices = triangulate_points(&local);
    simplices
        .iter()
        .map(|s| rat_det_abs(&s.iter().map(|&i| local[i].clone()).collect::<Vec<_>>()))
        .fold(Rat::zero(), |a, b| a + b)
}

fn rat_det_abs(simplex: &[RatPoint]) -> Rat {
    let d = simplex.len() - 1;
    let rows: Vec<Vec<Rat>> = simplex[1..].iter().map(|v| v.sub(&simplex[0]).coords().to_vec()).collect();
    rat_det(rows, d).abs()
}

pub(crate) fn rat_det(mut a: Vec<Vec<Rat>>, d: usize) -> Rat {
    let mut det = Rat::one();
    for c in 0..d {
        let Some(p) = (c..d).find(|&r| !a[r][c].is_zero()) else { return Rat::zero() };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        let piv = a[c][c].clone();
        det *= &piv;
        for r in c + 1..d {
            if !a[r][c].is_zero() {
                let f = &a[r][c] / &piv;
                for j in c..d {
                    let v = &a[c][j] * &f;
                    a[r][j] -= v;
                }
            }
        }
    }
    det
}

/// Pulling triangulation of a full-dimensional point configuration (indices
/// into `pts`, which should be the vertices of its hull).
pub(crate) fn triangulate_points(pts: &[RatPoint]) -> Vec<Vec<usize>> {
    let idx: Vec<usize> = (0..pts.len()).collect();
    triangulate_rec(pts, &idx)
}

fn triangulate_rec(pts: &[RatPoint], idx: &[usize]) -> Vec<Vec<usize>> {
    let sub: Vec<RatPoint> = idx.iter().map(|&i| pts[i].clone()).collect();
    let poly = hull_rat(&sub).expect("nonempty");
    let d = poly.dim;
    if d <= 0 || idx.len() as isize == d + 1 {
        return vec![idx.to_vec()];
    }
    // keep only vertices
    let vidx: Vec<usize> = idx.iter().copied().filter(|&i| poly.vertices.binary_search(&pts[i]).is_ok()).collect();
    if vidx.len() as isize == d + 1 {
        return vec![vidx];
    }
    let apex = vidx[0];
    let mut out = Vec::new();
    for f in &poly.facets {
        if f.eval(&pts[apex]).is_zero() {
            continue;
        }
        let on: Vec<usize> = vidx.iter().copied().filter(|&i| f.eval(&pts[i]).is_zero()).collect();
        for mut s in triangulate_rec(pts, &on) {
            s.insert(0, apex);
            out.push(s);
        }
    }
    out
}

/// One face, as indices into the polytope's vertex list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Face {
    pub dim: isize,
    pub vertices: Vec<usize>,
}

/// All faces graded by dimension with the covering relation.
#[derive(Clone, Debug, Serialize)]
pub struct FaceLattice {
    /// `faces[k]` holds the faces of dimension `k - 1` (index 0 is the empty face).
    pub faces: Vec<Vec<Face>>,
    /// Pairs `((dim_a, i), (dim_b, j))` with face a covered by face b, dims as in `faces`.
    pub covers: Vec<((usize, usize), (usize, usize))>,
}

impl FaceLattice {
    /// Number of faces of dimension `k`, for `k = 0..=dim`.
    pub fn f_vector(&self) -> Vec<usize> {
        self.faces[1..].iter().map(Vec::len).collect()
    }

    pub fn faces_of_dim(&self, k: isize) -> &[Face] {
        &self.faces[(k + 1) as usize]
    }

    /// `sum_k (-1)^k f_k` over nonempty faces, including the polytope itself.
    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector().iter().enumerate().map(|(k, &f)| if k % 2 == 0 { f as i64 } else { -(f as i64) }).sum()
    }
}

pub fn faces(p: &LatticePolytope) -> FaceLattice {
    if p.is_empty() {
        return FaceLattice { faces: vec![vec![Face { dim: -1, vertices: vec![] }]], covers: vec![] };
    }
    let all: BTreeSet<usize> = (0..p.vertices.len()).collect();
    let facet_sets: Vec<BTreeSet<usize>> = p
        .facets
        .iter()
        .map(|f| (0..p.vertices.len()).filter(|&i| f.eval(&p.vertices[i]).is_zero()).collect())
        .collect();
    let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    seen.insert(all.clone());
    let mut frontier: Vec<BTreeSet<usize>> = vec![all];
    while let Some(s) = frontier.pop() {
        for fs in &facet_sets {
            let t: BTreeSet<usize> = s.intersection(fs).copied().collect();
            if t != s && seen.insert(t.clone()) {
                frontier.push(t);
            }
        }
    }
    let d = p.dim as usize;
    let mut graded: Vec<Vec<Face>> = vec![Vec::new(); d + 2];
    for s in seen {
        let verts: Vec<usize> = s.into_iter().collect();
        let fd = if verts.is_empty() {
            -1
        } else {
            let v0 = &p.vertices[verts[0]];
            rat_rank_points(&verts[1..].iter().map(|&i| p.vertices[i].sub(v0)).collect::<Vec<_>>()) as isize
        };
        graded[(fd + 1) as usize].push(Face { dim: fd, vertices: verts });
    }
    for g in graded.iter_mut() {
        g.sort();
    }
    let mut covers = Vec::new();
    for k in 0..graded.len() - 1 {
        for (i, a) in graded[k].iter().enumerate() {
            for (j, b) in graded[k + 1].iter().enumerate() {
                if a.vertices.iter().all(|v| b.vertices.binary_search(v).is_ok()) {
                    covers.push(((k, i), (k + 1, j)));
                }
            }
        }
    }
    FaceLattice { faces: graded, covers }
}

/// All nonempty faces as polytopes, keyed by dimension.
pub fn face_polytopes(p: &LatticePolytope) -> BTreeMap<isize, Vec<LatticePolytope>> {
    let fl = faces(p);
    let mut out = BTreeMap::new();
    for g in &fl.faces[1..] {
        for f in g {
            out.entry(f.dim).or_insert_with(Vec::new).push(p.face_polytope(f));
        }
    }
    out
}

/// `k * conv(0, e_1, ..., e_n)`.
pub fn standard_simplex(n: usize, k: i64) -> LatticePolytope {
    let mut pts = vec![IntVector::zeros(n)];
    for i in 0..n {
        pts.push(IntVector::unit(n, i).scale(&Int::from(k)));
    }
    hull(&pts).expect("nonempty")
}

/// `[-1, 1]^k`.
pub fn hypercube(k: usize) -> LatticePolytope {
    let pts: Vec<IntVector> = (0..1usize << k)
        .map(|mask| IntVector::new((0..k).map(|i| Int::from(if mask >> i & 1 == 1 { 1 } else { -1 })).collect()))
        .collect();
    hull(&pts).expect("nonempty")
}

/// `(k+1) * simplex - (1, ..., 1)`: the reflexive simplex of projective k-space.
pub fn anticanonical_simplex(k: usize) -> LatticePolytope {
    standard_simplex(k, k as i64 + 1).translate(&RatPoint::new(vec![rat(-1, 1); k]))
}

/// `{0}` in the given ambient dimension.
pub fn point(ambient_dim: usize) -> LatticePolytope {
    hull(&[IntVector::zeros(ambient_dim)]).expect("nonempty")
}

/// A reflexive polytope written as a Minkowski sum of lattice polytopes.
#[derive(Clone, Debug)]
pub struct NefPartition {
    pub parent: LatticePolytope,
    pub parts: Vec<LatticePolytope>,
}

impl NefPartition {
    pub fn new(parent: LatticePolytope, parts: Vec<LatticePolytope>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidNefPartition("no parts".into()));
        }
        if parts.iter().any(|q| q.ambient_dim() != parent.ambient_dim()) {
            return Err(Error::InvalidNefPartition("parts live in a different ambient space".into()));
        }
        if !parts.iter().all(LatticePolytope::is_lattice) {
            return Err(Error::InvalidNefPartition("every part must be a lattice polytope".into()));
        }
        if !is_reflexive(&parent).unwrap_or(false) {
            return Err(Error::InvalidNefPartition("parent is not reflexive".into()));
        }
        if !minkowski_sum_all(&parts)?.same_set(&parent) {
            return Err(Error::InvalidNefPartition("Minkowski sum of parts differs from the parent".into()));
        }
        Ok(NefPartition { parent, parts })
    }
}

pub fn minkowski_sum_all(parts: &[LatticePolytope]) -> Result<LatticePolytope> {
    let mut acc = parts.first().cloned().ok_or_else(|| Error::Empty("no summands".into()))?;
    for q in &parts[1..] {
        acc = minkowski_sum(&acc, q)?;
    }
    Ok(acc)
}

/// Wire format `{"ambient_dim": n, "vertices": [[...], ...]}`; rational
/// coordinates are written as `"p/q"` strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub ambient_dim: usize,
    pub vertices: Vec<Vec<serde_json::Value>>,
}

impl LatticePolytope {
    pub fn to_json(&self) -> PolytopeJson {
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                v.coords()
                    .iter()
                    .map(|c| {
                        if c.is_integer() {
                            match i64::try_from(c.to_integer()) {
                                Ok(x) => serde_json::Value::from(x),
                                Err(_) => serde_json::Value::from(c.to_integer().to_string()),
                            }
                        } else {
                            serde_json::Value::from(crate::exactlin::rat_to_string(c))
                        }
                    })
                    .collect()
            })
            .collect();
        PolytopeJson { ambient_dim: self.ambient_dim, vertices }
    }

    pub fn from_json(j: &PolytopeJson) -> Result<LatticePolytope> {
        let pts = j
            .vertices
            .iter()
            .map(|v| {
                if v.len() != j.ambient_dim {
                    return Err(Error::DimensionMismatch(format!(
                        "vertex of length {} in ambient dimension {}",
                        v.len(),
                        j.ambient_dim
                    )));
                }
                v.iter().map(json_rat).collect::<Result<Vec<_>>>().map(RatPoint::new)
            })
            .collect::<Result<Vec<_>>>()?;
        if pts.is_empty() {
            return Err(Error::Parse("polytope without vertices".into()));
        }
        hull_rat(&pts)
    }
}

pub(crate) fn json_rat(v: &serde_json::Value) -> Result<Rat> {
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(|x| rat(x, 1))
            .ok_or_else(|| Error::Parse(format!("not an integer: {n}"))),
        serde_json::Value::String(s) => parse_rat(s),
        other => Err(Error::Parse(format!("not a number: {other}"))),
    }
}
