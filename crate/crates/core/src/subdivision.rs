//! Piecewise-linear functions and the polyhedral subdivisions they induce.
//!
//! A [`Subdivision`] stores its maximal cells as vertex-index lists into a
//! shared point table, which makes face identification between neighbouring
//! cells a matter of comparing index sets. A [`PlFunction`] carries its own
//! subdivision plus one affine piece per maximal cell.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactlin::{rat, rat_int, rat_rref, rat_to_string, Int, IntVector, Rat, RatPoint};
use crate::par;
use crate::polytope::{
    hull_rat, is_elementary_simplex, is_reflexive, lattice_points, minkowski_sum,
    minkowski_sum_all, normalized_volume, product, Equation, Facet, LatticePolytope, NefPartition,
};

/// `x -> <linear, x> + constant`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineFunction {
    pub linear: Vec<Rat>,
    pub constant: Rat,
}

impl AffineFunction {
    pub fn zero(n: usize) -> Self {
        AffineFunction { linear: vec![Rat::zero(); n], constant: Rat::zero() }
    }

    pub fn new(linear: Vec<Rat>, constant: Rat) -> Self {
        AffineFunction { linear, constant }
    }

    pub fn eval(&self, x: &RatPoint) -> Rat {
        self.linear.iter().zip(x.coords()).map(|(a, b)| a * b).fold(self.constant.clone(), |s, v| s + v)
    }

    pub fn add(&self, o: &AffineFunction) -> AffineFunction {
        AffineFunction {
            linear: self.linear.iter().zip(&o.linear).map(|(a, b)| a + b).collect(),
            constant: &self.constant + &o.constant,
        }
    }

    pub fn scale(&self, c: &Rat) -> AffineFunction {
        AffineFunction { linear: self.linear.iter().map(|a| a * c).collect(), constant: &self.constant * c }
    }

    pub fn neg(&self) -> AffineFunction {
        self.scale(&rat(-1, 1))
    }

    /// Extend by `before` leading and `after` trailing ignored coordinates.
    pub fn pad(&self, before: usize, after: usize) -> AffineFunction {
        let mut linear = vec![Rat::zero(); before];
        linear.extend(self.linear.iter().cloned());
        linear.extend(std::iter::repeat(Rat::zero()).take(after));
        AffineFunction { linear, constant: self.constant.clone() }
    }

    /// Agreement as functions on the given points.
    pub fn agrees_on(&self, o: &AffineFunction, pts: &[RatPoint]) -> bool {
        pts.iter().all(|p| self.eval(p) == o.eval(p))
    }
}

/// Affine function taking the given values at the given points, if one exists.
///
/// Underdetermined directions (lower-dimensional point sets) are set to zero.
pub fn affine_interpolate(points: &[RatPoint], values: &[Rat]) -> Option<AffineFunction> {
    let n = points.first()?.dim();
    let rows: Vec<Vec<Rat>> = points
        .iter()
        .zip(values)
        .map(|(p, v)| {
            let mut r = p.coords().to_vec();
            r.push(Rat::one());
            r.push(v.clone());
            r
        })
        .collect();
    let (red, piv) = rat_rref(&rows, n + 2);
    if piv.contains(&(n + 1)) {
        return None;
    }
    let mut sol = vec![Rat::zero(); n + 1];
    for (row, &p) in red.iter().zip(&piv) {
        sol[p] = row[n + 1].clone();
    }
    let constant = sol.pop().unwrap();
    Some(AffineFunction { linear: sol, constant })
}

/// A polyhedral subdivision of a polytope into maximal cells.
#[derive(Clone, Debug)]
pub struct Subdivision {
    support: LatticePolytope,
    points: Vec<RatPoint>,
    cells: Vec<Vec<usize>>,
    polytopes: Vec<LatticePolytope>,
}

/// Two maximal cells meeting in a common codimension-one face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    pub cells: (usize, usize),
    pub vertices: Vec<usize>,
}

/// A face of some maximal cell, as vertex indices into the point table.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ComplexFace {
    pub dim: isize,
    pub vertices: Vec<usize>,
}

impl Subdivision {
    /// Build from maximal cells given as polytopes; the point table is the
    /// sorted union of their vertices.
    pub fn from_polytopes(support: LatticePolytope, polys: Vec<LatticePolytope>) -> Result<Self> {
        let mut pts: BTreeSet<RatPoint> = BTreeSet::new();
        for p in &polys {
            pts.extend(p.vertices().iter().cloned());
        }
        let points: Vec<RatPoint> = pts.into_iter().collect();
        Self::with_points(support, points, polys)
    }

    /// Build with a caller-supplied point table that must contain every cell vertex.
    pub fn with_points(support: LatticePolytope, points: Vec<RatPoint>, polys: Vec<LatticePolytope>) -> Result<Self> {
        let index: HashMap<&RatPoint, usize> = points.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut pairs: Vec<(Vec<usize>, LatticePolytope)> = polys
            .into_iter()
            .map(|p| {
                let mut idx: Vec<usize> = p
                    .vertices()
                    .iter()
                    .map(|v| {
                        index.get(v).copied().ok_or_else(|| {
                            Error::InvalidSubdivision(format!("cell vertex {v:?} missing from point table"))
                        })
                    })
                    .collect::<Result<_>>()?;
                idx.sort();
                Ok((idx, p))
            })
            .collect::<Result<_>>()?;
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        pairs.dedup_by(|a, b| a.0 == b.0);
        let d = support.dim();
        if pairs.iter().any(|(_, p)| p.dim() != d) {
            return Err(Error::InvalidSubdivision("maximal cell of wrong dimension".into()));
        }
        let (cells, polytopes) = pairs.into_iter().unzip();
        Ok(Subdivision { support, points, cells, polytopes })
    }

    /// The subdivision with the single cell `P`.
    pub fn trivial(p: &LatticePolytope) -> Self {
        Self::from_polytopes(p.clone(), vec![p.clone()]).expect("trivial subdivision")
    }

    pub fn support(&self) -> &LatticePolytope {
        &self.support
    }

    pub fn points(&self) -> &[RatPoint] {
        &self.points
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn maximal_cells(&self) -> &[LatticePolytope] {
        &self.polytopes
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell_points(&self, i: usize) -> Vec<RatPoint> {
        self.cells[i].iter().map(|&j| self.points[j].clone()).collect()
    }

    /// Index of some maximal cell containing `x`.
    pub fn find_cell(&self, x: &RatPoint) -> Option<usize> {
        (0..self.len()).find(|&i| self.polytopes[i].contains(x))
    }

    /// Facets of each maximal cell as vertex-index sets.
    fn cell_facet_sets(&self, i: usize) -> Vec<Vec<usize>> {
        let p = &self.polytopes[i];
        p.facets()
            .iter()
            .map(|f| self.cells[i].iter().copied().filter(|&j| f.eval(&self.points[j]).is_zero()).collect())
            .collect()
    }

    /// All interior walls, in a deterministic order.
    pub fn walls(&self) -> Vec<Wall> {
        let mut by_face: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for i in 0..self.len() {
            for fs in self.cell_facet_sets(i) {
                by_face.entry(fs).or_default().push(i);
            }
        }
        by_face
            .into_iter()
            .filter(|(_, cs)| cs.len() == 2)
            .map(|(v, cs)| Wall { cells: (cs[0], cs[1]), vertices: v })
            .collect()
    }

    /// Codimension-one faces lying in the boundary of the support.
    pub fn boundary_faces(&self) -> Vec<LatticePolytope> {
        let mut out: BTreeMap<Vec<usize>, LatticePolytope> = BTreeMap::new();
        for i in 0..self.len() {
            for fs in self.cell_facet_sets(i) {
                let pts: Vec<RatPoint> = fs.iter().map(|&j| self.points[j].clone()).collect();
                let bary = RatPoint::barycenter(&pts);
                if !self.support.relative_interior_contains(&bary) {
                    out.entry(fs).or_insert_with(|| hull_rat(&pts).expect("nonempty"));
                }
            }
        }
        out.into_values().collect()
    }

    /// Every face of every maximal cell, deduplicated.
    pub fn face_poset(&self) -> Vec<ComplexFace> {
        let mut all: BTreeSet<ComplexFace> = BTreeSet::new();
        for i in 0..self.len() {
            let p = &self.polytopes[i];
            let fl = crate::polytope::faces(p);
            for g in &fl.faces[1..] {
                for f in g {
                    let mut vs: Vec<usize> = f.vertices.iter().map(|&k| self.cells[i][k]).collect();
                    vs.sort();
                    all.insert(ComplexFace { dim: f.dim, vertices: vs });
                }
            }
        }
        all.into_iter().collect()
    }

    /// Every maximal cell is a simplex.
    pub fn is_triangulation(&self) -> bool {
        self.polytopes.iter().all(LatticePolytope::is_simplex)
    }

    /// Every maximal cell is an elementary simplex.
    pub fn is_elementary_triangulation(&self) -> bool {
        self.polytopes.iter().all(is_elementary_simplex)
    }

    /// Every lattice point of the support is a vertex.
    pub fn is_fine(&self) -> bool {
        let verts: BTreeSet<&RatPoint> = self.cells.iter().flatten().map(|&j| &self.points[j]).collect();
        lattice_points(&self.support).iter().all(|p| verts.contains(&p.to_rat()))
    }

    /// Normalized volumes of the cells add up to that of the support.
    pub fn volumes_add_up(&self) -> bool {
        let total = self.polytopes.iter().map(normalized_volume).fold(Rat::zero(), |a, b| a + b);
        total == normalized_volume(&self.support)
    }

    /// Canonical description: sorted list of sorted vertex lists (as points).
    pub fn canonical_cells(&self) -> Vec<Vec<RatPoint>> {
        let mut out: Vec<Vec<RatPoint>> = self.polytopes.iter().map(|p| p.vertices().to_vec()).collect();
        out.sort();
        out
    }
}

/// How a PL function was built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlKind {
    FromHeights,
    MaxCombination,
    MinCombination,
    Sum,
    Pullback,
}

/// A continuous function, affine on each maximal cell of its subdivision.
#[derive(Clone, Debug)]
pub struct PlFunction {
    subdivision: Subdivision,
    pieces: Vec<AffineFunction>,
    kind: PlKind,
    /// Built as a minimum of affine functions; `negate` gives the convex version.
    concave: bool,
}

impl PlFunction {
    pub fn new(subdivision: Subdivision, pieces: Vec<AffineFunction>, kind: PlKind) -> Result<Self> {
        if pieces.len() != subdivision.len() {
            return Err(Error::InvalidSubdivision("one affine piece per maximal cell required".into()));
        }
        let f = PlFunction { subdivision, pieces, kind, concave: kind == PlKind::MinCombination };
        f.check_continuity()?;
        Ok(f)
    }

    /// The zero function on the trivial subdivision.
    pub fn zero(p: &LatticePolytope) -> Self {
        PlFunction {
            subdivision: Subdivision::trivial(p),
            pieces: vec![AffineFunction::zero(p.ambient_dim())],
            kind: PlKind::FromHeights,
            concave: false,
        }
    }

    pub fn subdivision(&self) -> &Subdivision {
        &self.subdivision
    }

    pub fn pieces(&self) -> &[AffineFunction] {
        &self.pieces
    }

    pub fn kind(&self) -> PlKind {
        self.kind
    }

    pub fn is_concave_tagged(&self) -> bool {
        self.concave
    }

    pub fn domain(&self) -> &LatticePolytope {
        self.subdivision.support()
    }

    pub fn eval(&self, x: &RatPoint) -> Option<Rat> {
        self.subdivision.find_cell(x).map(|i| self.pieces[i].eval(x))
    }

    /// Values at the points of the subdivision's table.
    pub fn point_values(&self) -> Vec<Rat> {
        self.subdivision.points.iter().map(|p| self.eval(p).expect("point in support")).collect()
    }

    fn check_continuity(&self) -> Result<()> {
        for w in self.subdivision.walls() {
            let pts: Vec<RatPoint> = w.vertices.iter().map(|&j| self.subdivision.points[j].clone()).collect();
            if !self.pieces[w.cells.0].agrees_on(&self.pieces[w.cells.1], &pts) {
                return Err(Error::NotPiecewiseLinear("affine pieces disagree on a shared wall".into()));
            }
        }
        Ok(())
    }

    /// The affine piece of `self` valid on all of `cell`.
    pub fn piece_on(&self, cell: &LatticePolytope) -> Result<&AffineFunction> {
        let bary = cell.barycenter();
        for (i, p) in self.subdivision.polytopes.iter().enumerate() {
            if p.contains(&bary) && cell.vertices().iter().all(|v| p.contains(v)) {
                return Ok(&self.pieces[i]);
            }
        }
        Err(Error::NotPiecewiseLinear(format!("no domain of linearity contains the cell with barycenter {bary:?}")))
    }

    pub fn negate(&self) -> PlFunction {
        PlFunction {
            subdivision: self.subdivision.clone(),
            pieces: self.pieces.iter().map(AffineFunction::neg).collect(),
            kind: self.kind,
            concave: !self.concave,
        }
    }

    /// Pull back along the projection `P x Q -> P` (`first = true`) or `P x Q -> Q`.
    pub fn pullback_to_product(&self, other: &LatticePolytope, first: bool) -> PlFunction {
        let m = other.ambient_dim();
        let (support, polys, pieces): (LatticePolytope, Vec<LatticePolytope>, Vec<AffineFunction>) = if first {
            (
                product(self.domain(), other),
                self.subdivision.polytopes.iter().map(|c| product(c, other)).collect(),
                self.pieces.iter().map(|a| a.pad(0, m)).collect(),
            )
        } else {
            (
                product(other, self.domain()),
                self.subdivision.polytopes.iter().map(|c| product(other, c)).collect(),
                self.pieces.iter().map(|a| a.pad(m, 0)).collect(),
            )
        };
        let sub = Subdivision::from_polytopes(support, polys.clone()).expect("product cells");
        // reorder pieces to match the sorted cells of `sub`
        let ordered = reorder_pieces(&sub, &polys, &pieces);
        PlFunction { subdivision: sub, pieces: ordered, kind: PlKind::Pullback, concave: self.concave }
    }

    /// Plain JSON description used in reports.
    pub fn to_report(&self) -> serde_json::Value {
        let cells: Vec<serde_json::Value> = (0..self.subdivision.len())
            .map(|i| {
                serde_json::json!({
                    "vertices": self.subdivision.cells[i],
                    "linear": self.pieces[i].linear.iter().map(rat_to_string).collect::<Vec<_>>(),
                    "constant": rat_to_string(&self.pieces[i].constant),
                })
            })
            .collect();
        serde_json::json!({
            "kind": self.kind,
            "points": self.subdivision.points.iter().map(RatPoint::to_strings).collect::<Vec<_>>(),
            "cells": cells,
        })
    }
}

fn reorder_pieces(sub: &Subdivision, polys: &[LatticePolytope], pieces: &[AffineFunction]) -> Vec<AffineFunction> {
    let lookup: HashMap<&[RatPoint], &AffineFunction> =
        polys.iter().zip(pieces).map(|(p, a)| (p.vertices(), a)).collect();
    sub.polytopes.iter().map(|p| (*lookup.get(p.vertices()).expect("cell present")).clone()).collect()
}

/// Lower-envelope subdivision of the lifted points `(p, h(p))`.
pub fn regular_subdivision(points: &[RatPoint], heights: &[Rat]) -> Result<(Subdivision, PlFunction)> {
    if points.len() != heights.len() {
        return Err(Error::DimensionMismatch(format!("{} points but {} heights", points.len(), heights.len())));
    }
    if points.is_empty() {
        return Err(Error::Empty("no points to subdivide".into()));
    }
    let mut seen: HashMap<&RatPoint, &Rat> = HashMap::new();
    let mut pts = Vec::new();
    let mut hs = Vec::new();
    for (p, h) in points.iter().zip(heights) {
        match seen.get(p) {
            Some(&h0) if h0 != h => return Err(Error::ConflictingHeights(format!("{p:?}"))),
            Some(_) => {}
            None => {
                seen.insert(p, h);
                pts.push(p.clone());
                hs.push(h.clone());
            }
        }
    }
    let n = pts[0].dim();
    let support = hull_rat(&pts)?;
    let lifted: Vec<RatPoint> = pts.iter().zip(&hs).map(|(p, h)| p.concat(&RatPoint::new(vec![h.clone()]))).collect();
    let lhull = hull_rat(&lifted)?;
    let mut table: Vec<RatPoint> = pts.clone();
    table.sort();
    if lhull.dim() == support.dim() {
        // heights affine on the support: a single cell
        let f = affine_interpolate(&pts, &hs)
            .ok_or_else(|| Error::InvalidSubdivision("affine lift without an interpolant".into()))?;
        let sub = Subdivision::with_points(support.clone(), table, vec![support])?;
        let pl = PlFunction { subdivision: sub.clone(), pieces: vec![f], kind: PlKind::FromHeights, concave: false };
        return Ok((sub, pl));
    }
    let mut polys = Vec::new();
    let mut pieces = Vec::new();
    for f in lhull.facets() {
        let c = &f.normal.coords()[n];
        if !c.is_positive() {
            continue;
        }
        let on: Vec<RatPoint> = pts.iter().zip(&lifted).filter(|(_, l)| f.eval(l).is_zero()).map(|(p, _)| p.clone()).collect();
        let cell = hull_rat(&on)?;
        // <a,x> + c t + b = 0  =>  t = -(<a,x> + b) / c
        let cr = rat_int(c);
        let linear = (0..n).map(|i| -rat_int(&f.normal.coords()[i]) / &cr).collect();
        let constant = -f.offset.clone() / &cr;
        polys.push(cell);
        pieces.push(AffineFunction { linear, constant });
    }
    let sub = Subdivision::with_points(support, table, polys.clone())?;
    let ordered = reorder_pieces(&sub, &polys, &pieces);
    let pl = PlFunction { subdivision: sub.clone(), pieces: ordered, kind: PlKind::FromHeights, concave: false };
    Ok((sub, pl))
}

pub fn regular_subdivision_int(points: &[IntVector], heights: &[Rat]) -> Result<(Subdivision, PlFunction)> {
    regular_subdivision(&points.iter().map(IntVector::to_rat).collect::<Vec<_>>(), heights)
}

/// Affine pieces of `f` on the maximal cells of `s` (errors if `f` bends inside some cell).
fn pieces_on(f: &PlFunction, s: &Subdivision) -> Result<Vec<AffineFunction>> {
    if s.cells == f.subdivision.cells && s.points == f.subdivision.points {
        return Ok(f.pieces.clone());
    }
    par::map(&s.polytopes, |c| f.piece_on(c).cloned()).into_iter().collect()
}

/// Bend across each wall: value of the cell's own piece minus the neighbour's
/// extension, at a vertex of the cell off the wall. Nonnegative iff convex there.
fn bends(f: &PlFunction, s: &Subdivision) -> Result<Vec<Rat>> {
    let pieces = pieces_on(f, s)?;
    Ok(s.walls()
        .iter()
        .map(|w| {
            let (a, b) = w.cells;
            let q = s.cells[a].iter().copied().find(|j| !w.vertices.contains(j)).expect("cell vertex off wall");
            let x = &s.points[q];
            pieces[a].eval(x) - pieces[b].eval(x)
        })
        .collect())
}

/// Convex across every interior wall of `s`.
pub fn is_convex(f: &PlFunction, s: &Subdivision) -> Result<bool> {
    Ok(bends(f, s)?.iter().all(|b| !b.is_negative()))
}

/// Convex with a nonzero bend across every interior wall of `s`.
pub fn is_strictly_convex(f: &PlFunction, s: &Subdivision) -> Result<bool> {
    Ok(bends(f, s)?.iter().all(Signed::is_positive))
}

/// The common refinement of several subdivisions of one polytope, with the
/// parent cell in each input for every refined cell.
pub fn common_refinement(subs: &[&Subdivision]) -> Result<(Subdivision, Vec<Vec<usize>>)> {
    let first = subs.first().ok_or_else(|| Error::Empty("no subdivisions".into()))?;
    let support = first.support.clone();
    for s in subs {
        if !s.support.same_set(&support) {
            return Err(Error::DimensionMismatch("subdivisions of different polytopes".into()));
        }
    }
    let d = support.dim();
    let mut current: Vec<(LatticePolytope, Vec<usize>)> =
        first.polytopes.iter().enumerate().map(|(i, p)| (p.clone(), vec![i])).collect();
    for s in &subs[1..] {
        let pairs: Vec<(usize, usize)> =
            (0..current.len()).flat_map(|a| (0..s.len()).map(move |b| (a, b))).collect();
        let cur = &current;
        let next: Vec<Result<Option<(LatticePolytope, Vec<usize>)>>> = par::map(&pairs, |&(a, b)| {
            let (pa, pa_idx) = &cur[a];
            let pb = &s.polytopes[b];
            let cell = intersect_cells(pa, pb)?;
            Ok(cell.filter(|c| c.dim() == d).map(|c| {
                let mut idx = pa_idx.clone();
                idx.push(b);
                (c, idx)
            }))
        });
        current = next.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
    }
    let polys: Vec<LatticePolytope> = current.iter().map(|(p, _)| p.clone()).collect();
    let sub = Subdivision::from_polytopes(support, polys)?;
    let lookup: HashMap<&[RatPoint], &Vec<usize>> = current.iter().map(|(p, i)| (p.vertices(), i)).collect();
    let parents = sub.polytopes.iter().map(|p| (*lookup[p.vertices()]).clone()).collect();
    Ok((sub, parents))
}

fn intersect_cells(a: &LatticePolytope, b: &LatticePolytope) -> Result<Option<LatticePolytope>> {
    if a.vertices().iter().all(|v| b.contains(v)) {
        return Ok(Some(a.clone()));
    }
    if b.vertices().iter().all(|v| a.contains(v)) {
        return Ok(Some(b.clone()));
    }
    // quick separation test on the facets of either cell
    let separated = |p: &LatticePolytope, q: &LatticePolytope| {
        p.facets().iter().any(|f| q.vertices().iter().all(|v| !f.eval(v).is_positive()))
    };
    if separated(a, b) || separated(b, a) {
        // they can still meet in a lower-dimensional face, which we drop anyway
        return Ok(None);
    }
    let c = a.intersection(b)?;
    Ok((!c.is_empty()).then_some(c))
}

/// The common refinement with the summed function.
pub fn sum_refinement(f: &PlFunction, g: &PlFunction) -> Result<(Subdivision, PlFunction)> {
    if !f.domain().same_set(g.domain()) {
        return Err(Error::DimensionMismatch("PL functions on different domains".into()));
    }
    let (sub, parents) = common_refinement(&[&f.subdivision, &g.subdivision])?;
    let pieces: Vec<AffineFunction> =
        parents.iter().map(|ix| f.pieces[ix[0]].add(&g.pieces[ix[1]])).collect();
    let mut pl = PlFunction { subdivision: sub, pieces, kind: PlKind::Sum, concave: f.concave && g.concave };
    pl = coarsen(pl);
    Ok((pl.subdivision.clone(), pl))
}

/// Merge neighbouring cells on which the function has the same affine piece
/// (the subdivision induced by a sum is its set of domains of linearity).
fn coarsen(f: PlFunction) -> PlFunction {
    let s = &f.subdivision;
    let walls = s.walls();
    let mut parent: Vec<usize> = (0..s.len()).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut j = i;
        while p[j] != r {
            let nx = p[j];
            p[j] = r;
            j = nx;
        }
        r
    }
    let mut merged = false;
    for w in &walls {
        let (a, b) = w.cells;
        if f.pieces[a] == f.pieces[b] {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
                merged = true;
            }
        }
    }
    if !merged {
        return f;
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..s.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut polys = Vec::new();
    let mut pieces = Vec::new();
    for (_, g) in groups {
        let pts: Vec<RatPoint> = g.iter().flat_map(|&i| s.cell_points(i)).collect();
        polys.push(hull_rat(&pts).expect("nonempty"));
        pieces.push(f.pieces[g[0]].clone());
    }
    let sub = Subdivision::from_polytopes(s.support.clone(), polys.clone()).expect("coarsening");
    let ordered = reorder_pieces(&sub, &polys, &pieces);
    PlFunction { subdivision: sub, pieces: ordered, kind: f.kind, concave: f.concave }
}

/// `max(a_1, ..., a_m)` on `P`, with its domains of linearity.
pub fn max_of_affine(p: &LatticePolytope, fs: &[AffineFunction]) -> Result<PlFunction> {
    envelope(p, fs, false)
}

/// `min(a_1, ..., a_m)` on `P`, tagged concave.
pub fn min_of_affine(p: &LatticePolytope, fs: &[AffineFunction]) -> Result<PlFunction> {
    envelope(p, fs, true)
}

fn envelope(p: &LatticePolytope, fs: &[AffineFunction], is_min: bool) -> Result<PlFunction> {
    let n = p.ambient_dim();
    let mut polys = Vec::new();
    let mut pieces = Vec::new();
    let mut seen: BTreeSet<Vec<RatPoint>> = BTreeSet::new();
    for (i, fi) in fs.iter().enumerate() {
        // region where f_i dominates: f_i - f_j >= 0 (max) or <= 0 (min)
        let mut ineqs = Vec::new();
        for (j, fj) in fs.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut diff = fi.add(&fj.neg());
            if is_min {
                diff = diff.neg();
            }
            let (normal, offset) = integral_halfspace(&diff);
            if normal.is_zero() {
                if offset.is_negative() {
                    ineqs.push(Facet::new(IntVector::zeros(n), offset));
                }
                continue;
            }
            ineqs.push(Facet::new(normal, offset));
        }
        let cell = p.intersect(&ineqs, &[])?;
        if cell.dim() == p.dim() && seen.insert(cell.vertices().to_vec()) {
            polys.push(cell);
            pieces.push(fi.clone());
        }
    }
    let sub = Subdivision::from_polytopes(p.clone(), polys.clone())?;
    let ordered = reorder_pieces(&sub, &polys, &pieces);
    let kind = if is_min { PlKind::MinCombination } else { PlKind::MaxCombination };
    Ok(coarsen(PlFunction { subdivision: sub, pieces: ordered, kind, concave: is_min }))
}

/// `a(x) >= 0` written as `<n, x> >= -c` with `n` primitive integral.
fn integral_halfspace(a: &AffineFunction) -> (IntVector, Rat) {
    let mut coeffs = a.linear.clone();
    coeffs.push(a.constant.clone());
    let (num, _) = RatPoint::new(coeffs).clear_denominators();
    let n = num.dim() - 1;
    let normal = IntVector::new(num.coords()[..n].to_vec());
    let g = normal.content();
    if g.is_zero() {
        return (normal, rat_int(&num.coords()[n]));
    }
    (normal.primitive().unwrap(), Rat::new(num.coords()[n].clone(), g))
}

/// `max(0, <e_coord, x> - level)` on `P`.
pub fn tent(p: &LatticePolytope, coord: usize, level: &Rat) -> Result<PlFunction> {
    let n = p.ambient_dim();
    let mut lin = vec![Rat::zero(); n];
    lin[coord] = Rat::one();
    max_of_affine(p, &[AffineFunction::zero(n), AffineFunction::new(lin, -level.clone())])
}

/// Split along `x_coord = level` with the concave tent `min(0, level - x_coord)`.
pub fn hyperplane_split(p: &LatticePolytope, coord_index: usize, level: &Rat) -> Result<(Subdivision, PlFunction)> {
    let n = p.ambient_dim();
    if coord_index >= n {
        return Err(Error::OutOfRange(format!("coordinate {coord_index} in dimension {n}")));
    }
    let e = IntVector::unit(n, coord_index);
    let lo = p.min_functional(&e).ok_or_else(|| Error::Empty("empty polytope".into()))?;
    let hi = p.max_functional(&e).unwrap();
    if !(&lo < level && level < &hi) {
        return Err(Error::OutOfRange(format!(
            "level {} not strictly between {} and {}",
            rat_to_string(level),
            rat_to_string(&lo),
            rat_to_string(&hi)
        )));
    }
    let mut lin = vec![Rat::zero(); n];
    lin[coord_index] = rat(-1, 1);
    let f = min_of_affine(p, &[AffineFunction::zero(n), AffineFunction::new(lin, level.clone())])?;
    Ok((f.subdivision.clone(), f))
}

/// Some maximal cell has relative interior meeting `{x_coord = level}`.
pub fn crosses_hyperplane(s: &Subdivision, coord: usize, level: &Rat) -> Vec<usize> {
    (0..s.len())
        .filter(|&i| {
            let pts = s.cell_points(i);
            let lo = pts.iter().map(|p| p.coords()[coord].clone()).min().unwrap();
            let hi = pts.iter().map(|p| p.coords()[coord].clone()).max().unwrap();
            &lo < level && level < &hi
        })
        .collect()
}

/// Adds `lambda * |x_coord - level|` for the smallest integer `lambda >= 0`
/// making every maximal cell lie on one side of the hyperplane, then certifies
/// convexity. `max_multiplier` bounds the sweep.
pub fn avoid_hyperplane(f: &PlFunction, coord: usize, level: &Rat, max_multiplier: u32) -> Result<PlFunction> {
    if crosses_hyperplane(&f.subdivision, coord, level).is_empty() {
        return Ok(f.clone());
    }
    let p = f.domain();
    let n = p.ambient_dim();
    for lambda in 1..=max_multiplier {
        let l = rat(lambda as i64, 1);
        let mut up = vec![Rat::zero(); n];
        up[coord] = l.clone();
        let mut down = vec![Rat::zero(); n];
        down[coord] = -l.clone();
        let vee = max_of_affine(
            p,
            &[AffineFunction::new(up, -(&l * level)), AffineFunction::new(down, &l * level)],
        )?;
        let (sub, g) = sum_refinement(f, &vee)?;
        if crosses_hyperplane(&sub, coord, level).is_empty() && is_convex(&g, &sub)? {
            return Ok(g);
        }
    }
    Err(Error::CertificationFailed(format!("hyperplane still crossed with multiplier up to {max_multiplier}")))
}

/// Heights for the fine boundary triangulation: `|p|^2 + extra(p) + eps * idx^s`.
pub struct TriangulationHeights<'a> {
    pub extra: Option<&'a (dyn Fn(&IntVector) -> Rat + Sync)>,
}

/// Desk-scale MPCP stand-in: a fine regular triangulation of the boundary by
/// all its lattice points, coned at the origin, with a strictly convex
/// certificate `phi_P + delta * psi`.
pub fn fine_crepant_subdivision(p: &LatticePolytope) -> Result<(Subdivision, PlFunction)> {
    fine_crepant_subdivision_with(p, &TriangulationHeights { extra: None })
}

pub fn fine_crepant_subdivision_with(p: &LatticePolytope, opts: &TriangulationHeights) -> Result<(Subdivision, PlFunction)> {
    if !is_reflexive(p)? {
        return Err(Error::NotReflexive);
    }
    let n = p.ambient_dim();
    let bpts: Vec<IntVector> = p.boundary_lattice_points();
    let maxc = bpts.iter().flat_map(|v| v.coords().iter().map(|c| c.clone().abs())).max().unwrap_or_else(Int::zero);
    let base_eps = Rat::one() / rat_int(&(Int::one() + maxc * Int::from(bpts.len())));
    let mut diagnostics = Vec::new();
    for power in [2u32, 3, 4] {
        let mut eps = base_eps.clone();
        for _attempt in 0..6 {
            let omega: Vec<Rat> = bpts
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let sq: Int = v.coords().iter().map(|c| c * c).sum();
                    let mut h = rat_int(&sq) + &eps * rat_int(&Int::from(i as u64).pow(power));
                    if let Some(extra) = opts.extra {
                        h += extra(v);
                    }
                    h
                })
                .collect();
            match try_boundary_triangulation(p, &bpts, &omega) {
                Ok(simplices) => {
                    return cone_with_certificate(p, &bpts, &omega, simplices, n);
                }
                Err(e) => diagnostics.push(format!("jitter idx^{power}, eps {}: {e}", rat_to_string(&eps))),
            }
            eps /= rat(2, 1);
        }
    }
    Err(Error::CertificationFailed(format!(
        "no elementary boundary triangulation reached: {}",
        diagnostics.join("; ")
    )))
}

fn try_boundary_triangulation(p: &LatticePolytope, bpts: &[IntVector], omega: &[Rat]) -> Result<Vec<LatticePolytope>> {
    let facets: Vec<&Facet> = p.facets().iter().collect();
    let per_facet: Vec<Result<Vec<LatticePolytope>>> = par::map(&facets, |f| {
        let (pts, hs): (Vec<RatPoint>, Vec<Rat>) = bpts
            .iter()
            .zip(omega)
            .filter(|(v, _)| f.eval(&v.to_rat()).is_zero())
            .map(|(v, h)| (v.to_rat(), h.clone()))
            .unzip();
        let (sub, _) = regular_subdivision(&pts, &hs)?;
        for c in sub.maximal_cells() {
            if !is_elementary_simplex(c) {
                return Err(Error::NotFine(format!("non-elementary boundary cell {:?}", c.vertices())));
            }
        }
        Ok(sub.maximal_cells().to_vec())
    });
    let mut out = Vec::new();
    for r in per_facet {
        out.extend(r?);
    }
    Ok(out)
}

fn cone_with_certificate(
    p: &LatticePolytope,
    bpts: &[IntVector],
    omega: &[Rat],
    simplices: Vec<LatticePolytope>,
    n: usize,
) -> Result<(Subdivision, PlFunction)> {
    let origin = RatPoint::zeros(n);
    let wmap: HashMap<RatPoint, Rat> = bpts.iter().zip(omega).map(|(v, w)| (v.to_rat(), w.clone())).collect();
    let mut polys = Vec::new();
    let mut phi = Vec::new();
    let mut psi = Vec::new();
    for s in &simplices {
        let mut pts = s.vertices().to_vec();
        let vals: Vec<Rat> = pts.iter().map(|v| wmap[v].clone()).collect();
        let mut vals0 = vals.clone();
        pts.push(origin.clone());
        vals0.push(Rat::zero());
        let psi_piece = affine_interpolate(&pts, &vals0).expect("cone over a simplex");
        // phi_P is 1 on the facet containing the simplex, 0 at the origin
        let ones: Vec<Rat> = vals.iter().map(|_| Rat::one()).chain(std::iter::once(Rat::zero())).collect();
        let phi_piece = affine_interpolate(&pts, &ones).expect("cone over a simplex");
        polys.push(hull_rat(&pts)?);
        phi.push(phi_piece);
        psi.push(psi_piece);
    }
    let mut table: Vec<RatPoint> = bpts.iter().map(IntVector::to_rat).collect();
    table.push(origin);
    table.sort();
    let sub = Subdivision::with_points(p.clone(), table, polys.clone())?;
    let phi = reorder_pieces(&sub, &polys, &phi);
    let psi = reorder_pieces(&sub, &polys, &psi);
    // bends are linear in the pieces, so bend(phi + delta psi) = bend(phi) + delta bend(psi)
    let walls = sub.walls();
    let wall_bend = |pieces: &[AffineFunction], w: &Wall| {
        let (a, b) = w.cells;
        let q = sub.cells[a].iter().copied().find(|j| !w.vertices.contains(j)).expect("cell vertex off wall");
        let x = &sub.points[q];
        pieces[a].eval(x) - pieces[b].eval(x)
    };
    let bphi: Vec<Rat> = walls.iter().map(|w| wall_bend(&phi, w)).collect();
    let bpsi: Vec<Rat> = walls.iter().map(|w| wall_bend(&psi, w)).collect();
    let mut delta = Rat::one();
    for _ in 0..64 {
        if bphi.iter().zip(&bpsi).all(|(a, b)| (a + &delta * b).is_positive()) {
            let pieces: Vec<AffineFunction> = phi.iter().zip(&psi).map(|(a, b)| a.add(&b.scale(&delta))).collect();
            let f = PlFunction { subdivision: sub.clone(), pieces, kind: PlKind::FromHeights, concave: false };
            if is_strictly_convex(&f, &sub)? {
                return Ok((sub, f));
            }
        }
        delta /= rat(2, 1);
    }
    Err(Error::CertificationFailed("no strictly convex certificate found for the coned triangulation".into()))
}

/// The r-parameter Mumford degeneration: graphs of `(h_1, ..., h_r)` over the
/// common refinement of their subdivisions.
#[derive(Clone, Debug)]
pub struct GraphDegeneration {
    base: LatticePolytope,
    heights: Vec<PlFunction>,
    refinement: Subdivision,
    /// Graph cells in `R^{n+r}`, aligned with `refinement.maximal_cells()`.
    total_complex: Vec<LatticePolytope>,
    /// Affine piece of each `h_j` on each refined cell.
    cell_pieces: Vec<Vec<AffineFunction>>,
}

impl GraphDegeneration {
    pub fn base(&self) -> &LatticePolytope {
        &self.base
    }

    pub fn heights(&self) -> &[PlFunction] {
        &self.heights
    }

    pub fn parameter_count(&self) -> usize {
        self.heights.len()
    }

    pub fn refinement(&self) -> &Subdivision {
        &self.refinement
    }

    pub fn total_complex(&self) -> &[LatticePolytope] {
        &self.total_complex
    }

    pub fn cell_pieces(&self) -> &[Vec<AffineFunction>] {
        &self.cell_pieces
    }

    /// Image of the total complex under `(x, t_1..t_r) -> (x, t_1 + ... + t_r)`.
    pub fn diagonal_restriction(&self) -> Vec<LatticePolytope> {
        let n = self.base.ambient_dim();
        let r = self.parameter_count();
        let mut out: Vec<LatticePolytope> = self
            .total_complex
            .iter()
            .map(|c| {
                let pts: Vec<RatPoint> = c
                    .vertices()
                    .iter()
                    .map(|v| {
                        let s = v.coords()[n..n + r].iter().fold(Rat::zero(), |a, b| a + b);
                        RatPoint::new(v.coords()[..n].iter().cloned().chain(std::iter::once(s)).collect())
                    })
                    .collect();
                hull_rat(&pts).expect("nonempty")
            })
            .collect();
        out.sort_by(|a, b| a.vertices().cmp(b.vertices()));
        out
    }

    /// Graph cells sorted canonically.
    pub fn canonical_cells(&self) -> Vec<Vec<RatPoint>> {
        let mut v: Vec<Vec<RatPoint>> = self.total_complex.iter().map(|c| c.vertices().to_vec()).collect();
        v.sort();
        v
    }

    /// The one-parameter degeneration obtained by keeping only parameter `j`.
    pub fn restrict_to_axis(&self, j: usize) -> Result<GraphDegeneration> {
        let h = self.heights.get(j).ok_or_else(|| Error::OutOfRange(format!("parameter {j}")))?;
        graph_degeneration(&self.base, std::slice::from_ref(h))
    }
}

pub fn graph_degeneration(p: &LatticePolytope, hs: &[PlFunction]) -> Result<GraphDegeneration> {
    if hs.is_empty() {
        return Err(Error::Empty("graph degeneration needs at least one height function".into()));
    }
    for h in hs {
        if !h.domain().same_set(p) {
            return Err(Error::DimensionMismatch("height function on a different polytope".into()));
        }
        if !is_convex(h, &h.subdivision)? {
            return Err(Error::NotConvex("graph degeneration requires convex height functions".into()));
        }
    }
    let subs: Vec<&Subdivision> = hs.iter().map(|h| &h.subdivision).collect();
    let (refinement, parents) = common_refinement(&subs)?;
    let cell_pieces: Vec<Vec<AffineFunction>> = parents
        .iter()
        .map(|ix| ix.iter().enumerate().map(|(j, &c)| hs[j].pieces[c].clone()).collect())
        .collect();
    let total_complex: Vec<LatticePolytope> = refinement
        .maximal_cells()
        .iter()
        .zip(&cell_pieces)
        .map(|(c, ps)| {
            let pts: Vec<RatPoint> = c
                .vertices()
                .iter()
                .map(|v| v.concat(&RatPoint::new(ps.iter().map(|a| a.eval(v)).collect())))
                .collect();
            hull_rat(&pts).expect("nonempty")
        })
        .collect();
    Ok(GraphDegeneration { base: p.clone(), heights: hs.to_vec(), refinement, total_complex, cell_pieces })
}

/// Sum of several PL functions on the common refinement.
pub fn sum_all(fs: &[PlFunction]) -> Result<PlFunction> {
    let mut acc = fs.first().cloned().ok_or_else(|| Error::Empty("no functions".into()))?;
    for g in &fs[1..] {
        acc = sum_refinement(&acc, g)?.1;
    }
    Ok(acc)
}

/// Output of [`blowup_refinement`].
#[derive(Clone, Debug)]
pub struct BlowupRefinement {
    pub total: LatticePolytope,
    pub parts: Vec<LatticePolytope>,
    pub partition: NefPartition,
}

/// Split `Delta_0 = Delta_a + Delta_b` into `Delta_a x [0,1]`, `Delta_b x [-1,0]`
/// and `Delta_i x {0}` for the remaining parts.
pub fn blowup_refinement(n: &NefPartition, delta_a: &LatticePolytope, delta_b: &LatticePolytope) -> Result<BlowupRefinement> {
    let d0 = &n.parts[0];
    if !minkowski_sum(delta_a, delta_b)?.same_set(d0) {
        return Err(Error::InvalidNefPartition("Delta_a + Delta_b differs from Delta_0".into()));
    }
    let up = crate::polytope::hull_i64(&[&[0], &[1]])?;
    let down = crate::polytope::hull_i64(&[&[-1], &[0]])?;
    let zero = crate::polytope::point(1);
    let mut parts = vec![product(delta_a, &up), product(delta_b, &down)];
    for q in &n.parts[1..] {
        parts.push(product(q, &zero));
    }
    let total = minkowski_sum_all(&parts)?;
    let seg = crate::polytope::hull_i64(&[&[-1], &[1]])?;
    if !total.same_set(&product(&n.parent, &seg)) {
        return Err(Error::InvalidNefPartition("refined parts do not sum to P x [-1,1]".into()));
    }
    let partition = NefPartition::new(total.clone(), parts.clone())?;
    Ok(BlowupRefinement { total, parts, partition })
}

/// The slab `lo <= x_coord <= hi`.
pub fn slab(p: &LatticePolytope, coord: usize, lo: Option<&Rat>, hi: Option<&Rat>) -> Result<LatticePolytope> {
    let n = p.ambient_dim();
    let mut ineqs = Vec::new();
    if let Some(lo) = lo {
        ineqs.push(Facet::new(IntVector::unit(n, coord), -lo.clone()));
    }
    if let Some(hi) = hi {
        ineqs.push(Facet::new(IntVector::unit(n, coord).neg(), hi.clone()));
    }
    p.intersect(&ineqs, &[])
}

/// The slice `{x_coord = level}` of a polytope.
pub fn slice(p: &LatticePolytope, coord: usize, level: &Rat) -> Result<LatticePolytope> {
    let n = p.ambient_dim();
    p.intersect(&[], &[Equation { normal: IntVector::unit(n, coord), value: level.clone() }])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{anticanonical_simplex, hull_i64, hypercube, standard_simplex};

    fn pts(v: &[&[i64]]) -> Vec<RatPoint> {
        v.iter().map(|p| RatPoint::from_i64(p)).collect()
    }

    fn r(n: i64) -> Rat {
        rat(n, 1)
    }

    #[test]
    fn tent_on_three_points() {
        let (s, f) = regular_subdivision(&pts(&[&[-1], &[0], &[1]]), &[r(1), r(0), r(1)]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.canonical_cells(), vec![pts(&[&[-1], &[0]]), pts(&[&[0], &[1]])]);
        assert!(is_strictly_convex(&f, &s).unwrap());
        assert!(s.volumes_add_up());
    }

    #[test]
    fn flat_heights_give_one_cell() {
        let sq = pts(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let (s, f) = regular_subdivision(&sq, &[r(0), r(0), r(0), r(0)]).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.walls().is_empty());
        // vacuously strictly convex: there is no wall to bend across
        assert!(is_strictly_convex(&f, &s).unwrap());
    }

    #[test]
    fn conflicting_heights_rejected() {
        let e = regular_subdivision(&pts(&[&[0], &[0], &[1]]), &[r(0), r(1), r(0)]).unwrap_err();
        assert!(matches!(e, Error::ConflictingHeights(_)));
    }

    #[test]
    fn constant_on_two_cells_is_not_strict() {
        let (s, _) = regular_subdivision(&pts(&[&[-1], &[0], &[1]]), &[r(1), r(0), r(1)]).unwrap();
        let c = PlFunction::new(s.clone(), vec![AffineFunction::zero(1), AffineFunction::zero(1)], PlKind::FromHeights).unwrap();
        assert!(!is_strictly_convex(&c, &s).unwrap());
        assert!(is_convex(&c, &s).unwrap());
    }

    #[test]
    fn pl_function_must_be_linear_on_cells() {
        let (s2, tent) = regular_subdivision(&pts(&[&[-1], &[0], &[1]]), &[r(1), r(0), r(1)]).unwrap();
        let trivial = Subdivision::trivial(s2.support());
        assert!(matches!(is_strictly_convex(&tent, &trivial), Err(Error::NotPiecewiseLinear(_))));
    }

    #[test]
    fn three_delta_two_triangulations() {
        let p = standard_simplex(2, 3);
        let lp: Vec<RatPoint> = lattice_points(&p).iter().map(IntVector::to_rat).collect();
        assert_eq!(lp.len(), 10);
        // squared Euclidean distance from the barycenter ties on unit squares
        let bary = RatPoint::from_i64(&[1, 1]);
        let sq: Vec<Rat> = lp
            .iter()
            .map(|q| q.sub(&bary).coords().iter().map(|c| c * c).fold(Rat::zero(), |a, b| a + b))
            .collect();
        let (s, _) = regular_subdivision(&lp, &sq).unwrap();
        assert!(s.volumes_add_up());
        assert_eq!(s.len(), 6);
        assert!(!s.is_triangulation());
        // the hexagonal form x^2 + xy + y^2 breaks those ties
        let hex: Vec<Rat> = lp
            .iter()
            .map(|q| {
                let (x, y) = (&q.coords()[0], &q.coords()[1]);
                x * x + x * y + y * y
            })
            .collect();
        let (s, f) = regular_subdivision(&lp, &hex).unwrap();
        assert_eq!(s.len(), 9);
        assert!(s.is_elementary_triangulation());
        assert!(is_strictly_convex(&f, &s).unwrap());
    }

    #[test]
    fn sum_refinement_examples() {
        let seg = hull_i64(&[&[-1], &[1]]).unwrap();
        let (_, t) = regular_subdivision(&pts(&[&[-1], &[0], &[1]]), &[r(1), r(0), r(1)]).unwrap();
        let (s, _) = sum_refinement(&t, &PlFunction::zero(&seg)).unwrap();
        assert_eq!(s.canonical_cells(), t.subdivision().canonical_cells());

        let sq = hypercube(2);
        let tx = tent(&sq, 0, &r(0)).unwrap();
        let ty = tent(&sq, 1, &r(0)).unwrap();
        let (s, f) = sum_refinement(&tx, &ty).unwrap();
        assert_eq!(s.len(), 4);
        assert!(is_strictly_convex(&f, &s).unwrap());
        assert!(s.volumes_add_up());
    }

    #[test]
    fn crepant_p2() {
        let p = anticanonical_simplex(2);
        let (s, f) = fine_crepant_subdivision(&p).unwrap();
        assert_eq!(s.len(), 9);
        assert_eq!(p.boundary_lattice_points().len(), 9);
        assert!(s.is_elementary_triangulation());
        assert!(s.is_fine());
        assert!(is_strictly_convex(&f, &s).unwrap());
        assert!(s.volumes_add_up());
    }

    #[test]
    fn crepant_segment() {
        let p = hull_i64(&[&[-1], &[1]]).unwrap();
        let (s, _) = fine_crepant_subdivision(&p).unwrap();
        assert_eq!(s.canonical_cells(), vec![pts(&[&[-1], &[0]]), pts(&[&[0], &[1]])]);
        let unit = hull_i64(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]).unwrap();
        assert!(fine_crepant_subdivision(&unit).is_err());
    }

    #[test]
    fn split_examples() {
        let seg = hull_i64(&[&[-1], &[1]]).unwrap();
        let (s, f) = hyperplane_split(&seg, 0, &r(0)).unwrap();
        assert_eq!(s.canonical_cells(), vec![pts(&[&[-1], &[0]]), pts(&[&[0], &[1]])]);
        assert!(f.is_concave_tagged());
        assert!(is_strictly_convex(&f.negate(), &s).unwrap());
        assert!(!is_convex(&f, &s).unwrap());
        assert!(matches!(hyperplane_split(&seg, 0, &r(1)), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn avoid_hyperplane_on_square() {
        // a triangulation of [-1,1]^2 with a diagonal crossing x_2 = 0
        let sq = hypercube(2);
        let lp: Vec<RatPoint> = sq.vertices().to_vec();
        let (s, f) = regular_subdivision(&lp, &[r(0), r(1), r(1), r(0)]).unwrap();
        assert_eq!(s.len(), 2);
        assert!(!crosses_hyperplane(&s, 1, &r(0)).is_empty());
        let g = avoid_hyperplane(&f, 1, &r(0), 8).unwrap();
        assert!(crosses_hyperplane(g.subdivision(), 1, &r(0)).is_empty());
        assert!(is_convex(&g, g.subdivision()).unwrap());
        // idempotent once avoiding
        let g2 = avoid_hyperplane(&g, 1, &r(0), 8).unwrap();
        assert_eq!(g2.subdivision().canonical_cells(), g.subdivision().canonical_cells());
    }

    #[test]
    fn graph_degenerations() {
        let seg = hull_i64(&[&[-1], &[1]]).unwrap();
        let (_, t) = regular_subdivision(&pts(&[&[-1], &[0], &[1]]), &[r(1), r(0), r(1)]).unwrap();
        let g = graph_degeneration(&seg, &[t.clone()]).unwrap();
        assert_eq!(g.total_complex().len(), 2);
        assert_eq!(g.total_complex()[0].ambient_dim(), 2);
        let g0 = graph_degeneration(&seg, &[PlFunction::zero(&seg)]).unwrap();
        assert_eq!(g0.total_complex().len(), 1);
        assert!(graph_degeneration(&seg, &[hyperplane_split(&seg, 0, &r(0)).unwrap().1]).is_err());
    }

    #[test]
    fn affine_interpolation() {
        let a = affine_interpolate(&pts(&[&[0, 0], &[1, 0], &[0, 1]]), &[r(1), r(3), r(0)]).unwrap();
        assert_eq!(a.linear, vec![r(2), r(-1)]);
        assert_eq!(a.constant, r(1));
        assert!(affine_interpolate(&pts(&[&[0], &[1], &[2]]), &[r(0), r(1), r(0)]).is_none());
    }
}
