//! Embedding the tropical divisor into the tropical total space.
//!
//! Fibration data assigns to a maximal cell `σ` of `T_X` the functionals
//! `y_0, ..., y_k` (summing to `k+1`) together with the smoothing functional
//! `p`, all linear on the cone over `σ × {1}`. The tropical divisor `T_D` is
//! the union of the fibres over `(1, ..., 1)`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactlin::{
    coordinates_in, integer_kernel, is_integrally_surjective, rat_int, rat_rank, rat_to_string, saturated_basis, Int,
    IntMatrix, IntVector, Rat, RatPoint, RationalCone,
};
use crate::par;
use crate::polytope::{from_inequalities, Equation, Facet, LatticePolytope};
use crate::subdivision::AffineFunction;
use crate::tropical::{restricted_space, SpaceKind, TropicalSpace};

/// Component functionals `y_0..y_k` and smoothing functional `p` on a cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibrationData {
    pub cone: RationalCone,
    pub ys: Vec<IntVector>,
    pub p: IntVector,
    /// Common denominator: the actual functionals are `ys / scale`.
    pub scale: Int,
}

impl FibrationData {
    pub fn new(cone: RationalCone, ys: Vec<IntVector>, p: IntVector) -> Result<Self> {
        Self::with_scale(cone, ys, p, Int::one())
    }

    pub fn with_scale(cone: RationalCone, ys: Vec<IntVector>, p: IntVector, scale: Int) -> Result<Self> {
        let n = cone.ambient_dim;
        if ys.is_empty() {
            return Err(Error::InconsistentFibration("no component functionals".into()));
        }
        if ys.iter().chain(std::iter::once(&p)).any(|y| y.dim() != n) {
            return Err(Error::DimensionMismatch("functional of the wrong dimension".into()));
        }
        if !scale.is_positive() {
            return Err(Error::InconsistentFibration("scale must be positive".into()));
        }
        for y in ys.iter().chain(std::iter::once(&p)) {
            if cone.generators.iter().any(|g| y.dot(g).is_negative())
                || cone.lineality.iter().any(|l| !y.dot(l).is_zero())
            {
                return Err(Error::InconsistentFibration("functional is negative on the cone".into()));
            }
        }
        if rat_rank(&ys) != ys.len() {
            return Err(Error::InconsistentFibration("component functionals are linearly dependent".into()));
        }
        if ys.iter().any(|y| rat_rank(&[y.clone(), p.clone()]) < 2) {
            return Err(Error::InconsistentFibration("smoothing functional is proportional to a component".into()));
        }
        Ok(FibrationData { cone, ys, p, scale })
    }

    /// Data on the cone over `cell × {1}` from cellwise affine functionals.
    pub fn over_cell(cell: &LatticePolytope, ys: &[AffineFunction]) -> Result<Self> {
        let n = cell.ambient_dim();
        let gens: Vec<IntVector> = cell
            .vertices()
            .iter()
            .map(|v| {
                let (num, den) = v.concat(&RatPoint::new(vec![Rat::one()])).clear_denominators();
                let _ = den;
                num
            })
            .collect();
        let cone = RationalCone::from_generators(n + 1, &gens);
        let coeffs: Vec<Rat> = ys.iter().flat_map(|a| a.linear.iter().chain(std::iter::once(&a.constant)).cloned()).collect();
        let (_, den) = RatPoint::new(coeffs).clear_denominators();
        let scale = den;
        let sr = rat_int(&scale);
        let homog: Vec<IntVector> = ys
            .iter()
            .map(|a| {
                IntVector::new(
                    a.linear
                        .iter()
                        .chain(std::iter::once(&a.constant))
                        .map(|c| (c * &sr).to_integer())
                        .collect(),
                )
            })
            .collect();
        FibrationData::with_scale(cone, homog, IntVector::unit(n + 1, n), scale)
    }

    pub fn k(&self) -> usize {
        self.ys.len() - 1
    }

    pub fn rescales(&self) -> bool {
        !self.scale.is_one()
    }

    /// `(y_0(x), ..., y_k(x), p(x))`.
    pub fn evaluate(&self, x: &RatPoint) -> Vec<Rat> {
        let s = rat_int(&self.scale);
        self.ys.iter().map(|y| y.dot_rat(x) / &s).chain(std::iter::once(self.p.dot_rat(x))).collect()
    }

    /// The map `(p_1, ..., p_k, q) -> (Σ p_i, q)`.
    pub fn plus_map(values: &[Rat]) -> (Rat, Rat) {
        let (q, ps) = values.split_last().expect("nonempty");
        (ps.iter().fold(Rat::zero(), |a, b| a + b), q.clone())
    }

    /// Fibre of `(y, p)` over `target`; empty if the target is not attained.
    pub fn local_fibre(&self, target: &RatPoint) -> Result<LatticePolytope> {
        let n = self.cone.ambient_dim;
        if target.dim() != self.ys.len() + 1 {
            return Err(Error::DimensionMismatch(format!(
                "target has {} entries, expected {}",
                target.dim(),
                self.ys.len() + 1
            )));
        }
        let s = rat_int(&self.scale);
        let mut eqs: Vec<Equation> = self
            .ys
            .iter()
            .zip(target.coords())
            .map(|(y, t)| Equation { normal: y.clone(), value: t * &s })
            .collect();
        eqs.push(Equation { normal: self.p.clone(), value: target.coords()[self.ys.len()].clone() });
        eqs.extend(self.cone.equations.iter().map(|e| Equation { normal: e.clone(), value: Rat::zero() }));
        let ineqs: Vec<Facet> = self.cone.facet_normals.iter().map(|f| Facet::new(f.clone(), Rat::zero())).collect();
        from_inequalities(n, &ineqs, &eqs)
    }
}

/// Fibration data on some maximal cells of a tropical space.
#[derive(Clone, Debug)]
pub struct Fibration {
    pub k: usize,
    /// Per maximal-cell position: the affine functionals `y_0..y_k` on the cell.
    pub functionals: BTreeMap<usize, Vec<AffineFunction>>,
    pub data: BTreeMap<usize, FibrationData>,
}

impl Fibration {
    /// Build from cellwise affine functionals; checks `Σ y = k+1`, `y ≥ 0` and
    /// agreement on shared faces.
    pub fn from_affine(t: &TropicalSpace, functionals: BTreeMap<usize, Vec<AffineFunction>>) -> Result<Fibration> {
        let k = functionals.values().next().map(|v| v.len()).ok_or_else(|| Error::Empty("no fibration data".into()))? - 1;
        let kp1 = Rat::from_integer(Int::from(k as u64 + 1));
        let cells: Vec<(&usize, &Vec<AffineFunction>)> = functionals.iter().collect();
        let built: Vec<Result<(usize, FibrationData)>> = par::map(&cells, |(pos, ys)| {
            if ys.len() != k + 1 {
                return Err(Error::InconsistentFibration("varying number of functionals".into()));
            }
            let poly = t.face_polytope(t.maximal_face_ids()[**pos]);
            for v in poly.vertices() {
                let sum = ys.iter().map(|y| y.eval(v)).fold(Rat::zero(), |a, b| a + b);
                if sum != kp1 {
                    return Err(Error::InconsistentFibration(format!("functionals sum to {} on a cell", rat_to_string(&sum))));
                }
            }
            Ok((**pos, FibrationData::over_cell(&poly, ys)?))
        });
        let data: BTreeMap<usize, FibrationData> = built.into_iter().collect::<Result<_>>()?;
        // agreement on faces shared by two cells with data
        for f in 0..t.faces().len() {
            let cs: Vec<usize> = t.cells_containing(f).iter().copied().filter(|p| functionals.contains_key(p)).collect();
            if cs.len() < 2 {
                continue;
            }
            let pts = t.face_points(f);
            let first = &functionals[&cs[0]];
            for other in &cs[1..] {
                let ys = &functionals[other];
                if !first.iter().zip(ys).all(|(a, b)| a.agrees_on(b, &pts)) {
                    return Err(Error::InconsistentFibration(format!("functionals disagree on face {:?}", t.faces()[f].vertices)));
                }
            }
        }
        Ok(Fibration { k, functionals, data })
    }

    pub fn rescales(&self) -> bool {
        self.data.values().any(FibrationData::rescales)
    }

    fn center(&self) -> RatPoint {
        RatPoint::new(vec![Rat::one(); self.k + 2])
    }
}

/// A cellwise affine map between tropical spaces, `x -> A x + b` on each cell.
#[derive(Clone, Debug, Serialize)]
pub struct CellMap {
    pub source: usize,
    pub target: usize,
    #[serde(serialize_with = "ser_matrix")]
    pub matrix: IntMatrix,
    #[serde(serialize_with = "ser_point")]
    pub translation: RatPoint,
}

fn ser_matrix<S: serde::Serializer>(m: &IntMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    m.row_vectors().serialize(s)
}

fn ser_point<S: serde::Serializer>(p: &RatPoint, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    p.to_strings().serialize(s)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ComplexMap {
    pub cells: Vec<CellMap>,
    pub surjective: bool,
    pub missing_cells: Vec<usize>,
    /// Source cells outside the domain of definition.
    pub unmatched_source: Vec<usize>,
}

impl ComplexMap {
    fn apply(c: &CellMap, x: &RatPoint) -> RatPoint {
        crate::polytope::apply_rat(&c.matrix, x).add(&c.translation)
    }

    /// Every face of a mapped source cell lands in the target face.
    pub fn face_compatible(&self, source: &TropicalSpace, target: &TropicalSpace) -> bool {
        self.cells.iter().all(|c| {
            let tpoly = target.face_polytope(c.target);
            let sverts = &source.faces()[c.source].vertices;
            source
                .faces()
                .iter()
                .filter(|f| f.vertices.iter().all(|v| sverts.contains(v)))
                .all(|f| f.vertices.iter().all(|&v| tpoly.contains(&Self::apply(c, &source.points()[v]))))
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }
}

/// Per-cell tangent check of the embedding.
#[derive(Clone, Debug, Serialize)]
pub struct TangentCheck {
    /// Face id in `T_D`.
    pub cell: usize,
    /// Maximal cell of `T_X` (position).
    pub ambient_cell: usize,
    /// `dy: Λ_σ -> Z^k` is onto.
    pub surjective: bool,
    /// `Λ_τ = ker(dy)` exactly.
    pub saturated: bool,
}

#[derive(Clone, Debug)]
pub struct Embedding {
    pub t_d: TropicalSpace,
    pub iota: ComplexMap,
    pub surjective: bool,
    pub checks: Vec<TangentCheck>,
    pub rescaled: bool,
}

/// Central-fibre cell of every data cell, with the cell position.
fn central_cells(t: &TropicalSpace, f: &Fibration) -> Result<Vec<(usize, LatticePolytope)>> {
    let target = f.center();
    let n = t.ambient_dim();
    let want = t.dim() as isize - f.k as isize;
    let items: Vec<(&usize, &FibrationData)> = f.data.iter().collect();
    let out: Vec<Result<Option<(usize, LatticePolytope)>>> = par::map(&items, |(pos, d)| {
        let fib = d.local_fibre(&target)?;
        if fib.is_empty() || fib.dim() != want {
            return Ok(None);
        }
        let pts: Vec<RatPoint> = fib.vertices().iter().map(|v| v.select(&(0..n).collect::<Vec<_>>())).collect();
        Ok(Some((**pos, crate::polytope::hull_rat(&pts)?)))
    });
    Ok(out.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect())
}

fn linear_part_matrix(ys: &[AffineFunction], n: usize) -> (IntMatrix, Int) {
    let coeffs: Vec<Rat> = ys.iter().flat_map(|a| a.linear.iter().cloned()).collect();
    let (num, den) = RatPoint::new(coeffs).clear_denominators();
    let rows: Vec<IntVector> = num.coords().chunks(n).map(|c| IntVector::new(c.to_vec())).collect();
    (IntMatrix::from_rows(&rows), den)
}

/// `T_D` as the union of central fibres, with the inclusion into `T_X`.
pub fn embed_d(t: &TropicalSpace, f: &Fibration) -> Result<Embedding> {
    let n = t.ambient_dim();
    let found = central_cells(t, f)?;
    if found.is_empty() {
        return Err(Error::InconsistentFibration("the central fibre is empty".into()));
    }
    let mut by_cell: BTreeMap<Vec<RatPoint>, (LatticePolytope, Vec<usize>)> = BTreeMap::new();
    for (pos, poly) in found {
        by_cell.entry(poly.vertices().to_vec()).or_insert_with(|| (poly, Vec::new())).1.push(pos);
    }
    let polys: Vec<LatticePolytope> = by_cell.values().map(|(p, _)| p.clone()).collect();
    let t_d = restricted_space(&polys, "central fibre")?;
    let mut cells = Vec::new();
    let mut checks = Vec::new();
    for (poly, positions) in by_cell.values() {
        let fid = t_d.face_id_of_points(poly.vertices()).expect("cell of T_D");
        let pos0 = positions[0];
        let target = t.carrier_in(pos0, poly.vertices()).unwrap_or(t.maximal_face_ids()[pos0]);
        cells.push(CellMap { source: fid, target, matrix: IntMatrix::identity(n), translation: RatPoint::zeros(n) });
        for &pos in positions {
            let ys = &f.functionals[&pos];
            let (dy, den) = linear_part_matrix(&ys[1..], n);
            let b = t.tangent_basis(pos);
            let m = dy.mul(b);
            let surjective = den.is_one() && is_integrally_surjective(&m);
            let kernel: Vec<IntVector> = integer_kernel(&m).iter().map(|k| b.mul_vec(k)).collect();
            let dirs: Vec<RatPoint> = poly.vertices()[1..].iter().map(|v| v.sub(&poly.vertices()[0])).collect();
            let lam = saturated_basis(&dirs, n);
            let saturated = kernel.len() == lam.len()
                && lam.iter().all(|v| coordinates_in(&kernel, &v.to_rat()).is_some_and(|c| c.iter().all(|x| x.is_integer())))
                && kernel.iter().all(|v| coordinates_in(&lam, &v.to_rat()).is_some_and(|c| c.iter().all(|x| x.is_integer())));
            checks.push(TangentCheck { cell: fid, ambient_cell: pos, surjective, saturated });
        }
    }
    cells.sort_by_key(|c| c.source);
    let surjective = checks.iter().all(|c| c.surjective && c.saturated);
    let iota = ComplexMap { cells, surjective, missing_cells: vec![], unmatched_source: vec![] };
    Ok(Embedding { t_d, iota, surjective, checks, rescaled: f.rescales() })
}

/// The cellwise affine map `T_X -> (k+1)Δ^k` given by the component functionals.
#[derive(Clone, Debug)]
pub struct SimplexFibration {
    pub k: usize,
    pub maps: BTreeMap<usize, Vec<AffineFunction>>,
    /// The fibration does not preserve the integral affine structure.
    pub rescaled: bool,
}

impl SimplexFibration {
    /// Image of a point of the cell `pos`.
    pub fn image(&self, pos: usize, x: &RatPoint) -> Option<RatPoint> {
        self.maps.get(&pos).map(|ys| RatPoint::new(ys.iter().map(|y| y.eval(x)).collect()))
    }

    /// Fibre over a point of the simplex, cut directly out of each cell.
    pub fn fibre_over(&self, t: &TropicalSpace, target: &RatPoint) -> Result<Vec<(usize, LatticePolytope)>> {
        let mut out = Vec::new();
        for (&pos, ys) in &self.maps {
            let poly = t.face_polytope(t.maximal_face_ids()[pos]);
            let eqs: Vec<Equation> = ys[1..]
                .iter()
                .zip(&target.coords()[1..])
                .map(|(y, v)| {
                    let mut coeffs = y.linear.clone();
                    coeffs.push(v - &y.constant);
                    let (num, _) = RatPoint::new(coeffs).clear_denominators();
                    let normal = IntVector::new(num.coords()[..poly.ambient_dim()].to_vec());
                    Equation { normal, value: rat_int(&num.coords()[poly.ambient_dim()]) }
                })
                .collect();
            let fib = poly.intersect(&[], &eqs)?;
            if !fib.is_empty() && fib.dim() == t.dim() as isize - self.k as isize {
                out.push((pos, fib));
            }
        }
        Ok(out)
    }

    /// Fibre over the barycenter `(1, ..., 1)`.
    pub fn central_fibre(&self, t: &TropicalSpace) -> Result<Vec<(usize, LatticePolytope)>> {
        self.fibre_over(t, &RatPoint::new(vec![Rat::one(); self.k + 1]))
    }
}

impl SimplexFibration {
    /// The barycenter fibre, cut cell by cell, equals the cells of `T_D`.
    pub fn matches_embedding(&self, t: &TropicalSpace, e: &Embedding) -> Result<bool> {
        let mut fibre: Vec<Vec<RatPoint>> = self.central_fibre(t)?.into_iter().map(|(_, p)| p.vertices().to_vec()).collect();
        fibre.sort();
        fibre.dedup();
        let mut cells: Vec<Vec<RatPoint>> = e.t_d.maximal_face_ids().iter().map(|&f| e.t_d.face_points(f)).collect();
        cells.sort();
        Ok(fibre == cells)
    }
}

pub fn simplex_fibration(t: &TropicalSpace, f: &Fibration) -> Result<SimplexFibration> {
    for (&pos, ys) in &f.functionals {
        let poly = t.face_polytope(t.maximal_face_ids()[pos]);
        for v in poly.vertices() {
            if ys.iter().any(|y| y.eval(v).is_negative()) {
                return Err(Error::InconsistentFibration("cell leaves the simplex".into()));
            }
        }
    }
    Ok(SimplexFibration { k: f.k, maps: f.functionals.clone(), rescaled: f.rescales() })
}

/// Output of [`lg_truncate`].
#[derive(Clone, Debug)]
pub struct Truncation {
    pub space: TropicalSpace,
    /// Boundary faces at level `u = 1`.
    pub new_boundary: Vec<usize>,
    /// No codimension-one face at level 1 is shared by two cells.
    pub no_slab_at_level_one: bool,
}

/// Clip a tropical space to `u ≤ 1` for a cellwise affine `u ≥ 0`.
pub fn lg_truncate(t: &TropicalSpace, u: &(dyn Fn(&RatPoint) -> Rat + Sync)) -> Result<Truncation> {
    let n = t.ambient_dim();
    let one = Rat::one();
    let mut polys: Vec<(usize, LatticePolytope)> = Vec::new();
    for pos in 0..t.maximal_face_ids().len() {
        let poly = t.face_polytope(t.maximal_face_ids()[pos]);
        let vals: Vec<Rat> = poly.vertices().iter().map(u).collect();
        let aff = crate::subdivision::affine_interpolate(poly.vertices(), &vals)
            .ok_or_else(|| Error::NotPiecewiseLinear("u is not affine on a cell".into()))?;
        if aff.eval(&poly.barycenter()) != u(&poly.barycenter()) {
            return Err(Error::NotPiecewiseLinear("u is not affine on a cell".into()));
        }
        if vals.iter().any(Signed::is_negative) {
            return Err(Error::OutOfRange("u takes negative values".into()));
        }
        let clipped = if vals.iter().all(|v| v <= &one) {
            poly
        } else {
            let diff = AffineFunction::new(aff.linear.iter().map(|a| -a.clone()).collect(), &one - &aff.constant);
            let mut coeffs = diff.linear.clone();
            coeffs.push(diff.constant.clone());
            let (num, _) = RatPoint::new(coeffs).clear_denominators();
            let normal = IntVector::new(num.coords()[..n].to_vec());
            poly.intersect(&[Facet::new(normal, rat_int(&num.coords()[n]))], &[])?
        };
        if clipped.dim() == t.dim() as isize {
            polys.push((pos, clipped));
        }
    }
    let mut pts: BTreeSet<RatPoint> = BTreeSet::new();
    for (_, p) in &polys {
        pts.extend(p.vertices().iter().cloned());
    }
    let points: Vec<RatPoint> = pts.into_iter().collect();
    let index = |p: &RatPoint| points.binary_search(p).expect("point in table");
    let cells: Vec<Vec<usize>> = polys.iter().map(|(_, p)| p.vertices().iter().map(index).collect()).collect();
    let mut sorted: Vec<(Vec<usize>, usize)> = cells.iter().cloned().zip(polys.iter().map(|(p, _)| *p)).collect();
    sorted.sort();
    let origin: Vec<usize> = sorted.iter().map(|(_, p)| *p).collect();
    let kind = t.kind();
    let old_index: BTreeMap<&RatPoint, usize> = t.points().iter().enumerate().map(|(i, p)| (p, i)).collect();
    let chart = |v: usize, pos: usize| -> Result<IntMatrix> {
        let p = &points[v];
        if let Some(&ov) = old_index.get(p) {
            if let Some(c) = t.chart(ov, origin[pos]) {
                return Ok(c.clone());
            }
        }
        match kind {
            SpaceKind::DualIntersection => Ok(IntMatrix::identity(n)),
            SpaceKind::Hypersurface => {
                let (d, _) = p.clear_denominators();
                crate::tropical::projection_chart(&d.primitive()?)
            }
            SpaceKind::Synthetic => Err(Error::InvalidTropicalSpace("cannot extend hand-built charts to new vertices".into())),
        }
    };
    let space = TropicalSpace::new(points.clone(), sorted.into_iter().map(|(c, _)| c).collect(), chart, kind, t.label())?;
    let at_one: Vec<usize> = (0..space.faces().len())
        .filter(|&f| space.faces()[f].dim == space.dim() as isize - 1)
        .filter(|&f| space.face_points(f).iter().all(|p| u(p) == one))
        .collect();
    let no_slab = at_one.iter().all(|&f| space.cells_containing(f).len() == 1);
    let new_boundary = at_one.into_iter().filter(|&f| space.is_boundary_face(f)).collect();
    let space = match t.product_k() {
        Some(k) => space.with_product_structure(k),
        None => space,
    };
    Ok(Truncation { space, new_boundary, no_slab_at_level_one: no_slab })
}

/// `b a^{-1}` is an integral matrix of determinant ±1.
fn chart_transition_is_unimodular(a: &IntMatrix, b: &IntMatrix) -> bool {
    let Some(ai) = a.rat_inverse() else { return false };
    let m: Vec<Vec<Rat>> = (0..b.rows())
        .map(|i| (0..ai[0].len()).map(|j| (0..b.cols()).fold(Rat::zero(), |s, k| s + rat_int(b.get(i, k)) * &ai[k][j])).collect())
        .collect();
    if !m.iter().flatten().all(Rat::is_integer) {
        return false;
    }
    let rows: Vec<IntVector> = m.iter().map(|r| IntVector::new(r.iter().map(|x| x.to_integer()).collect())).collect();
    IntMatrix::from_rows(&rows).det().abs().is_one()
}

/// Cells of `T_Z` matched with equal cells of `T_XΔ`, certified chart by
/// chart. Cells whose charts do not match unimodularly are reported in
/// `unmatched_source`.
pub fn open_embed_lg(tz: &TropicalSpace, tx: &TropicalSpace) -> Result<ComplexMap> {
    let n = tz.ambient_dim();
    if tx.ambient_dim() != n || tx.dim() != tz.dim() {
        return Err(Error::DimensionMismatch("spaces of different dimension".into()));
    }
    let mut cells = Vec::new();
    let mut matched_targets = BTreeSet::new();
    let mut unmatched = Vec::new();
    for (pos, &fid) in tz.maximal_face_ids().iter().enumerate() {
        let pts = tz.face_points(fid);
        let Some(tf) = tx.face_id_of_points(&pts) else {
            unmatched.push(fid);
            continue;
        };
        let Some(tpos) = tx.maximal_face_ids().iter().position(|&g| g == tf) else {
            unmatched.push(fid);
            continue;
        };
        // per-vertex certificate: the chart transition lies in GL(Z)
        let certified = tz.faces()[fid].vertices.iter().all(|&v| {
            let Some(tv) = tx.vertex_index(&tz.points()[v]) else { return false };
            let (Some(ca), Some(cb)) = (tz.chart(v, pos), tx.chart(tv, tpos)) else { return false };
            let a = ca.mul(tz.tangent_basis(pos));
            let b = cb.mul(tx.tangent_basis(tpos));
            chart_transition_is_unimodular(&a, &b)
        });
        if !certified {
            unmatched.push(fid);
            continue;
        }
        matched_targets.insert(tf);
        cells.push(CellMap { source: fid, target: tf, matrix: IntMatrix::identity(n), translation: RatPoint::zeros(n) });
    }
    // the correspondence must reach the boundary side of T_Z
    let touches_boundary = cells.iter().any(|c| {
        let vs = &tz.faces()[c.source].vertices;
        tz.boundary_faces().iter().any(|&b| tz.faces()[b].vertices.iter().all(|v| vs.contains(v)))
    });
    if cells.is_empty() || (tz.has_boundary() && !touches_boundary) {
        return Err(Error::InconsistentGluing("no locally isomorphic correspondence near the boundary".into()));
    }
    let missing: Vec<usize> = tx.maximal_face_ids().iter().copied().filter(|f| !matched_targets.contains(f)).collect();
    Ok(ComplexMap { surjective: missing.is_empty(), cells, missing_cells: missing, unmatched_source: unmatched })
}

/// `Ξ_gen -> Ξ_0`: each general-fibre cell maps onto the central-fibre cells it contains.
pub fn specialization_map(gen: &TropicalSpace, zero: &TropicalSpace) -> Result<ComplexMap> {
    let n = gen.ambient_dim();
    if zero.ambient_dim() != n || zero.dim() != gen.dim() {
        return Err(Error::DimensionMismatch("spaces of different dimension".into()));
    }
    let gen_polys: Vec<LatticePolytope> = gen.maximal_face_ids().iter().map(|&f| gen.face_polytope(f)).collect();
    let mut cells = Vec::new();
    let mut vol_by_source: BTreeMap<usize, Rat> = BTreeMap::new();
    for &zf in zero.maximal_face_ids() {
        let zpts = zero.face_points(zf);
        let bary = RatPoint::barycenter(&zpts);
        let Some(gpos) = (0..gen_polys.len()).find(|&i| gen_polys[i].contains(&bary) && zpts.iter().all(|p| gen_polys[i].contains(p)))
        else {
            return Err(Error::InconsistentGluing("a central-fibre cell lies in no general-fibre cell".into()));
        };
        let source = gen.maximal_face_ids()[gpos];
        *vol_by_source.entry(source).or_insert_with(Rat::zero) += crate::polytope::normalized_volume(&zero.face_polytope(zf));
        cells.push(CellMap { source, target: zf, matrix: IntMatrix::identity(n), translation: RatPoint::zeros(n) });
    }
    let covered = gen
        .maximal_face_ids()
        .iter()
        .zip(&gen_polys)
        .all(|(f, p)| vol_by_source.get(f).is_some_and(|v| v == &crate::polytope::normalized_volume(p)));
    if !covered {
        return Err(Error::InconsistentGluing("general-fibre cells are not unions of central-fibre cells".into()));
    }
    Ok(ComplexMap { cells, surjective: true, missing_cells: vec![], unmatched_source: vec![] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::rat;
    use crate::polytope::{hull_i64, product};
    use crate::subdivision::Subdivision;

    fn orthant3() -> RationalCone {
        RationalCone::from_generators(3, &[IntVector::unit(3, 0), IntVector::unit(3, 1), IntVector::unit(3, 2)])
    }

    #[test]
    fn fibre_point() {
        let f = FibrationData::new(orthant3(), vec![IntVector::unit(3, 0), IntVector::unit(3, 1)], IntVector::unit(3, 2))
            .unwrap();
        let fib = f.local_fibre(&RatPoint::from_i64(&[1, 1, 1])).unwrap();
        assert_eq!(fib.dim(), 0);
        assert_eq!(fib.vertices(), &[RatPoint::from_i64(&[1, 1, 1])]);
    }

    #[test]
    fn fibre_segment_and_empty() {
        let f = FibrationData::new(orthant3(), vec![IntVector::unit(3, 0)], IntVector::from_i64(&[0, 1, 1])).unwrap();
        let fib = f.local_fibre(&RatPoint::from_i64(&[1, 1])).unwrap();
        assert_eq!(fib.dim(), 1);
        assert_eq!(fib.vertices(), &[RatPoint::from_i64(&[1, 0, 1]), RatPoint::from_i64(&[1, 1, 0])]);
        let empty = f.local_fibre(&RatPoint::from_i64(&[-1, 1])).unwrap();
        assert!(empty.is_empty());
        assert_eq!(FibrationData::plus_map(&[rat(1, 1), rat(2, 1), rat(5, 1)]), (rat(3, 1), rat(5, 1)));
    }

    #[test]
    fn fibration_data_validation() {
        let bad = FibrationData::new(orthant3(), vec![IntVector::from_i64(&[1, -1, 0])], IntVector::unit(3, 2));
        assert!(bad.is_err());
        let parallel = FibrationData::new(orthant3(), vec![IntVector::unit(3, 0)], IntVector::from_i64(&[2, 0, 0]));
        assert!(parallel.is_err());
    }

    /// `[-1,1] × [0,2]` split at height 1, fibred by the second coordinate.
    fn product_case() -> (TropicalSpace, Fibration) {
        let seg = hull_i64(&[&[-1], &[1]]).unwrap();
        let lo = hull_i64(&[&[0], &[1]]).unwrap();
        let hi = hull_i64(&[&[1], &[2]]).unwrap();
        let whole = hull_i64(&[&[0], &[2]]).unwrap();
        let sub = Subdivision::from_polytopes(product(&seg, &whole), vec![product(&seg, &lo), product(&seg, &hi)]).unwrap();
        let t = TropicalSpace::from_subdivision(&sub, "product").unwrap();
        let y1 = AffineFunction::new(vec![rat(0, 1), rat(1, 1)], rat(0, 1));
        let y0 = AffineFunction::new(vec![rat(0, 1), rat(-1, 1)], rat(2, 1));
        let fs = (0..2).map(|p| (p, vec![y0.clone(), y1.clone()])).collect();
        (t.clone(), Fibration::from_affine(&t, fs).unwrap())
    }

    #[test]
    fn trivial_product_embedding() {
        let (t, f) = product_case();
        let e = embed_d(&t, &f).unwrap();
        assert_eq!(e.t_d.maximal_cells().len(), 1);
        assert_eq!(e.t_d.dim(), 1);
        let cell = e.t_d.face_polytope(e.t_d.maximal_face_ids()[0]);
        assert_eq!(cell.vertices(), &[RatPoint::from_i64(&[-1, 1]), RatPoint::from_i64(&[1, 1])]);
        assert!(e.surjective);
        assert!(e.iota.face_compatible(&e.t_d, &t));
        let sf = simplex_fibration(&t, &f).unwrap();
        assert!(!sf.rescaled);
        let central = sf.central_fibre(&t).unwrap();
        assert!(central.iter().all(|(_, p)| p.same_set(&cell)));
    }

    #[test]
    fn rescaled_flag() {
        let (t, _) = product_case();
        // y = 1 ∓ (x_2 - 1)/2 sums to 2 but is not integral
        let y0 = AffineFunction::new(vec![rat(0, 1), rat(-1, 2)], rat(3, 2));
        let y1 = AffineFunction::new(vec![rat(0, 1), rat(1, 2)], rat(1, 2));
        let fs = (0..2).map(|p| (p, vec![y0.clone(), y1.clone()])).collect();
        let f = Fibration::from_affine(&t, fs).unwrap();
        assert!(f.rescales());
        let e = embed_d(&t, &f).unwrap();
        assert!(e.rescaled && !e.surjective);
    }

    #[test]
    fn inconsistent_data_rejected() {
        let (t, _) = product_case();
        let y1 = AffineFunction::new(vec![rat(0, 1), rat(1, 1)], rat(0, 1));
        let y0 = AffineFunction::new(vec![rat(0, 1), rat(-1, 1)], rat(2, 1));
        let bent1 = AffineFunction::new(vec![rat(1, 1), rat(1, 1)], rat(0, 1));
        let bent0 = AffineFunction::new(vec![rat(-1, 1), rat(-1, 1)], rat(2, 1));
        let fs = vec![(0, vec![y0, y1]), (1, vec![bent0, bent1])].into_iter().collect();
        assert!(matches!(Fibration::from_affine(&t, fs), Err(Error::InconsistentFibration(_))));
    }

    #[test]
    fn truncation_of_interval() {
        let seg = hull_i64(&[&[0], &[3]]).unwrap();
        let t = TropicalSpace::from_subdivision(&Subdivision::trivial(&seg), "ray").unwrap();
        let tr = lg_truncate(&t, &|p: &RatPoint| p.coords()[0].clone()).unwrap();
        assert_eq!(tr.space.points(), &[RatPoint::from_i64(&[0]), RatPoint::from_i64(&[1])]);
        assert_eq!(tr.new_boundary.len(), 1);
        let again = lg_truncate(&tr.space, &|p: &RatPoint| p.coords()[0].clone()).unwrap();
        assert_eq!(again.space.points(), tr.space.points());
        assert!(tr.no_slab_at_level_one);
    }

    #[test]
    fn open_embedding_reports_missing_cells() {
        let (t, _) = product_case();
        let m = open_embed_lg(&t, &t).unwrap();
        assert!(m.surjective && m.missing_cells.is_empty());
        // add a far cell
        let seg = hull_i64(&[&[-1], &[1]]).unwrap();
        let extra = hull_i64(&[&[2], &[3]]).unwrap();
        let a = hull_i64(&[&[0], &[1]]).unwrap();
        let b = hull_i64(&[&[1], &[2]]).unwrap();
        let cells = vec![product(&seg, &a), product(&seg, &b), product(&seg, &extra)];
        let mut pts: BTreeSet<RatPoint> = BTreeSet::new();
        for c in &cells {
            pts.extend(c.vertices().iter().cloned());
        }
        let points: Vec<RatPoint> = pts.into_iter().collect();
        let idx: Vec<Vec<usize>> = cells.iter().map(|c| c.vertices().iter().map(|v| points.binary_search(v).unwrap()).collect()).collect();
        let big = TropicalSpace::new(points, idx, |_, _| Ok(IntMatrix::identity(2)), SpaceKind::DualIntersection, "big").unwrap();
        let m = open_embed_lg(&t, &big).unwrap();
        assert_eq!(m.missing_cells.len(), 1);
        let far = big.face_polytope(m.missing_cells[0]);
        assert!(far.same_set(&product(&seg, &extra)));
    }

    #[test]
    fn specialization_identity() {
        let (t, _) = product_case();
        let m = specialization_map(&t, &t).unwrap();
        assert_eq!(m.cells.len(), 2);
        assert!(m.cells.iter().all(|c| c.source == c.target));
    }
}
