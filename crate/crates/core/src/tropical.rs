//! Tropical spaces: polyhedral complexes with a fan structure at every vertex,
//! together with their monodromy and discriminant.
//!
//! A fan structure at a vertex `v` is recorded per maximal cell `σ ∋ v` as an
//! integer matrix `C_{v,σ}` sending tangent vectors of `σ` into a reference
//! lattice `Z^dim`. For the boundary of a polytope with the origin in its
//! interior every `C_{v,σ}` is the projection along `v`; for a full-dimensional
//! complex it is the identity. Monodromy around an edge `ω` inside a wall `ρ`
//! is the composite of the chart transitions across the two maximal cells
//! `σ±` meeting along `ρ`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactlin::{
    rat_int, rat_rank_points, saturated_basis, smith_normal_form, solve_integer, IntMatrix, IntVector, Rat, RatPoint,
};
use crate::par;
use crate::polytope::{faces, hull_rat, is_elementary_simplex, LatticePolytope};
use crate::subdivision::{is_convex, ComplexFace, GraphDegeneration, Subdivision};

/// What a tropical space was built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    /// A full-dimensional complex with identity charts (level-one slice of a cone complex).
    DualIntersection,
    /// The boundary of a polytope with projection charts.
    Hypersurface,
    /// Built by hand from explicit charts.
    Synthetic,
}

/// Face types of the `(k+1)Δ^k × 2Δ^1` construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceType {
    InteriorCap,
    BoundaryCap,
    HorizontalSide,
    VerticalSide,
}

type RatMat = Vec<Vec<Rat>>;

fn to_rat_mat(m: &IntMatrix) -> RatMat {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| rat_int(m.get(i, j))).collect()).collect()
}

fn rat_mul(a: &RatMat, b: &RatMat, inner: usize, cols: usize) -> RatMat {
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).fold(Rat::zero(), |s, k| s + &row[k] * &b[k][j])).collect())
        .collect()
}

fn rat_inv(a: &RatMat) -> Option<RatMat> {
    let n = a.len();
    let mut m: RatMat = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(p, c);
        let inv = Rat::one() / m[c][c].clone();
        for x in m[c].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for j in 0..2 * n {
                    let v = &m[c][j] * &f;
                    m[r][j] -= v;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn to_int_mat(a: &RatMat, cols: usize) -> Option<IntMatrix> {
    let mut m = IntMatrix::zeros(a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if !x.is_integer() {
                return None;
            }
            m.set(i, j, x.to_integer());
        }
    }
    Some(m)
}

/// Projection chart along `v`: an `(n-1) x n` integer matrix with kernel `Q v`,
/// surjective onto `Z^{n-1}`.
pub fn projection_chart(v: &IntVector) -> Result<IntMatrix> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let n = v.dim();
    let snf = smith_normal_form(&IntMatrix::from_cols(&[v.clone()], n));
    let mut c = IntMatrix::zeros(n - 1, n);
    for i in 1..n {
        for j in 0..n {
            c.set(i - 1, j, snf.u.get(i, j).clone());
        }
    }
    Ok(c)
}

/// A polyhedral complex with fan structures.
#[derive(Clone, Debug)]
pub struct TropicalSpace {
    ambient_dim: usize,
    dim: usize,
    points: Vec<RatPoint>,
    faces: Vec<ComplexFace>,
    face_index: HashMap<Vec<usize>, usize>,
    /// Face ids of the maximal cells.
    maximal: Vec<usize>,
    /// All face ids of each maximal cell.
    cell_faces: Vec<Vec<usize>>,
    /// Maximal cells (positions in `maximal`) containing each face.
    containing: Vec<Vec<usize>>,
    boundary: Vec<bool>,
    tangent: Vec<IntMatrix>,
    charts: BTreeMap<(usize, usize), IntMatrix>,
    kind: SpaceKind,
    label: String,
    product_k: Option<usize>,
}

fn enumerate_faces(points: &[RatPoint], cell: &[usize]) -> Vec<(isize, Vec<usize>)> {
    let pts: Vec<RatPoint> = cell.iter().map(|&i| points[i].clone()).collect();
    let dirs: Vec<RatPoint> = pts[1..].iter().map(|p| p.sub(&pts[0])).collect();
    let d = rat_rank_points(&dirs);
    if d + 1 == pts.len() {
        // simplex: every nonempty subset
        let m = pts.len();
        return (1u64..(1u64 << m))
            .map(|mask| {
                let vs: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).map(|i| cell[i]).collect();
                (vs.len() as isize - 1, vs)
            })
            .collect();
    }
    let poly = hull_rat(&pts).expect("nonempty cell");
    let lookup: HashMap<&RatPoint, usize> = cell.iter().map(|&i| (&points[i], i)).collect();
    let fl = faces(&poly);
    fl.faces[1..]
        .iter()
        .flatten()
        .map(|f| {
            let mut vs: Vec<usize> = f.vertices.iter().map(|&k| lookup[&poly.vertices()[k]]).collect();
            vs.sort();
            (f.dim, vs)
        })
        .collect()
}

impl TropicalSpace {
    /// Build from a point table, maximal cells (vertex indices) and a chart
    /// function `(vertex, maximal cell position) -> C_{v,σ}` of size `dim x ambient`.
    pub fn new(
        points: Vec<RatPoint>,
        maximal_cells: Vec<Vec<usize>>,
        chart: impl Fn(usize, usize) -> Result<IntMatrix> + Sync,
        kind: SpaceKind,
        label: &str,
    ) -> Result<TropicalSpace> {
        let ambient_dim = points.first().map(RatPoint::dim).ok_or_else(|| Error::Empty("no points".into()))?;
        if maximal_cells.is_empty() {
            return Err(Error::Empty("no maximal cells".into()));
        }
        let mut cells: Vec<Vec<usize>> = maximal_cells
            .into_iter()
            .map(|mut c| {
                c.sort();
                c.dedup();
                c
            })
            .collect();
        cells.sort();
        cells.dedup();
        let per_cell: Vec<Vec<(isize, Vec<usize>)>> = par::map(&cells, |c| enumerate_faces(&points, c));
        let dim = per_cell[0].iter().map(|f| f.0).max().unwrap_or(0);
        let mut all: BTreeSet<ComplexFace> = BTreeSet::new();
        for (c, fs) in cells.iter().zip(&per_cell) {
            let top = fs.iter().map(|f| f.0).max().unwrap_or(0);
            if top != dim {
                return Err(Error::InvalidTropicalSpace(format!("maximal cell {c:?} has dimension {top}, expected {dim}")));
            }
            all.extend(fs.iter().map(|(d, v)| ComplexFace { dim: *d, vertices: v.clone() }));
        }
        let faces: Vec<ComplexFace> = all.into_iter().collect();
        let face_index: HashMap<Vec<usize>, usize> =
            faces.iter().enumerate().map(|(i, f)| (f.vertices.clone(), i)).collect();
        let maximal: Vec<usize> = cells.iter().map(|c| face_index[c]).collect();
        let mut containing = vec![Vec::new(); faces.len()];
        let mut cell_faces = Vec::with_capacity(cells.len());
        for (pos, fs) in per_cell.iter().enumerate() {
            let mut ids: Vec<usize> = fs.iter().map(|(_, v)| face_index[v]).collect();
            ids.sort();
            for &f in &ids {
                containing[f].push(pos);
            }
            cell_faces.push(ids);
        }
        let dim = dim as usize;
        // boundary: codimension-one faces in exactly one maximal cell, and their faces
        let mut boundary = vec![false; faces.len()];
        if dim > 0 {
            for (i, f) in faces.iter().enumerate() {
                if f.dim == dim as isize - 1 && containing[i].len() == 1 {
                    let vs = &f.vertices;
                    let pos = containing[i][0];
                    for &g in &cell_faces[pos] {
                        if faces[g].vertices.iter().all(|x| vs.contains(x)) {
                            boundary[g] = true;
                        }
                    }
                }
                if f.dim == dim as isize - 1 && containing[i].len() > 2 {
                    return Err(Error::InvalidTropicalSpace(format!(
                        "codimension-one face {:?} lies in {} maximal cells",
                        f.vertices,
                        containing[i].len()
                    )));
                }
            }
        }
        let tangent: Vec<IntMatrix> = cells
            .iter()
            .map(|c| {
                let dirs: Vec<RatPoint> = c[1..].iter().map(|&j| points[j].sub(&points[c[0]])).collect();
                IntMatrix::from_cols(&saturated_basis(&dirs, ambient_dim), ambient_dim)
            })
            .collect();
        let keys: Vec<(usize, usize)> =
            cells.iter().enumerate().flat_map(|(pos, c)| c.iter().map(move |&v| (v, pos))).collect();
        let chart_vals: Vec<Result<IntMatrix>> = par::map(&keys, |&(v, pos)| chart(v, pos));
        let mut charts = BTreeMap::new();
        for (k, m) in keys.into_iter().zip(chart_vals) {
            let m = m?;
            if m.rows() != dim || m.cols() != ambient_dim {
                return Err(Error::InvalidTropicalSpace(format!("chart at vertex {} has wrong shape", k.0)));
            }
            if m.mul(&tangent[k.1]).rank() != dim {
                return Err(Error::InvalidTropicalSpace(format!(
                    "chart at vertex {} degenerates on maximal cell {}",
                    k.0, k.1
                )));
            }
            charts.insert(k, m);
        }
        let t = TropicalSpace {
            ambient_dim,
            dim,
            points,
            faces,
            face_index,
            maximal,
            cell_faces,
            containing,
            boundary,
            tangent,
            charts,
            kind,
            label: label.to_string(),
            product_k: None,
        };
        t.check_fan_gluing()?;
        Ok(t)
    }

    /// Charts at a vertex must agree on the common wall of two cells.
    fn check_fan_gluing(&self) -> Result<()> {
        if self.dim == 0 {
            return Ok(());
        }
        for (i, f) in self.faces.iter().enumerate() {
            if f.dim != self.dim as isize - 1 || self.containing[i].len() != 2 {
                continue;
            }
            let (a, b) = (self.containing[i][0], self.containing[i][1]);
            let basis = self.face_tangent(i);
            for &v in &f.vertices {
                let ca = self.charts[&(v, a)].mul(&basis);
                let cb = self.charts[&(v, b)].mul(&basis);
                if ca != cb {
                    return Err(Error::InvalidTropicalSpace(format!(
                        "fan charts at vertex {v} disagree on the wall {:?}",
                        f.vertices
                    )));
                }
            }
        }
        Ok(())
    }

    /// Full-dimensional complex with identity charts.
    pub fn from_subdivision(s: &Subdivision, label: &str) -> Result<TropicalSpace> {
        let n = s.support().ambient_dim();
        TropicalSpace::new(
            s.points().to_vec(),
            s.cells().to_vec(),
            |_, _| Ok(IntMatrix::identity(n)),
            SpaceKind::DualIntersection,
            label,
        )
    }

    /// Apply a unimodular change of the ambient lattice to all data.
    pub fn transform(&self, a: &IntMatrix) -> Result<TropicalSpace> {
        let inv = a
            .unimodular_inverse()
            .ok_or_else(|| Error::DimensionMismatch("transformation is not unimodular".into()))?;
        let points: Vec<RatPoint> = self.points.iter().map(|p| crate::polytope::apply_rat(a, p)).collect();
        let cells: Vec<Vec<usize>> = self.maximal.iter().map(|&f| self.faces[f].vertices.clone()).collect();
        // cells keep their order because vertex index lists are unchanged
        let mut t = TropicalSpace::new(
            points,
            cells,
            |v, pos| Ok(self.charts[&(v, pos)].mul(&inv)),
            self.kind,
            &self.label,
        )?;
        t.product_k = self.product_k;
        Ok(t)
    }

    pub fn with_product_structure(mut self, k: usize) -> Self {
        self.product_k = Some(k);
        self
    }

    pub fn product_k(&self) -> Option<usize> {
        self.product_k
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn points(&self) -> &[RatPoint] {
        &self.points
    }

    pub fn faces(&self) -> &[ComplexFace] {
        &self.faces
    }

    pub fn face_id(&self, vertices: &[usize]) -> Option<usize> {
        let mut v = vertices.to_vec();
        v.sort();
        self.face_index.get(&v).copied()
    }

    /// Face id of the face with exactly these vertex points.
    pub fn face_id_of_points(&self, pts: &[RatPoint]) -> Option<usize> {
        let ids: Option<Vec<usize>> = pts.iter().map(|p| self.vertex_index(p)).collect();
        self.face_id(&ids?)
    }

    pub fn vertex_index(&self, p: &RatPoint) -> Option<usize> {
        self.points.iter().position(|q| q == p)
    }

    pub fn maximal_cells(&self) -> Vec<&ComplexFace> {
        self.maximal.iter().map(|&f| &self.faces[f]).collect()
    }

    pub fn maximal_face_ids(&self) -> &[usize] {
        &self.maximal
    }

    /// Vertex indices that actually occur in some cell.
    pub fn vertices(&self) -> Vec<usize> {
        let s: BTreeSet<usize> = self.maximal.iter().flat_map(|&f| self.faces[f].vertices.iter().copied()).collect();
        s.into_iter().collect()
    }

    pub fn faces_of_dim(&self, d: isize) -> Vec<usize> {
        (0..self.faces.len()).filter(|&i| self.faces[i].dim == d).collect()
    }

    pub fn is_boundary_face(&self, f: usize) -> bool {
        self.boundary[f]
    }

    pub fn boundary_faces(&self) -> Vec<usize> {
        (0..self.faces.len()).filter(|&i| self.boundary[i]).collect()
    }

    pub fn has_boundary(&self) -> bool {
        self.boundary.iter().any(|&b| b)
    }

    pub fn face_points(&self, f: usize) -> Vec<RatPoint> {
        self.faces[f].vertices.iter().map(|&i| self.points[i].clone()).collect()
    }

    pub fn face_polytope(&self, f: usize) -> LatticePolytope {
        hull_rat(&self.face_points(f)).expect("nonempty face")
    }

    pub fn face_barycenter(&self, f: usize) -> RatPoint {
        RatPoint::barycenter(&self.face_points(f))
    }

    /// Maximal cells (as positions) containing a face.
    pub fn cells_containing(&self, f: usize) -> &[usize] {
        &self.containing[f]
    }

    /// Face ids of all faces of the maximal cell at `pos`.
    pub fn faces_of_cell(&self, pos: usize) -> &[usize] {
        &self.cell_faces[pos]
    }

    pub fn chart(&self, v: usize, pos: usize) -> Option<&IntMatrix> {
        self.charts.get(&(v, pos))
    }

    pub fn tangent_basis(&self, pos: usize) -> &IntMatrix {
        &self.tangent[pos]
    }

    fn face_tangent(&self, f: usize) -> IntMatrix {
        let pts = self.face_points(f);
        let dirs: Vec<RatPoint> = pts[1..].iter().map(|p| p.sub(&pts[0])).collect();
        IntMatrix::from_cols(&saturated_basis(&dirs, self.ambient_dim), self.ambient_dim)
    }

    /// Euler characteristic of the complex.
    pub fn euler_characteristic(&self) -> i64 {
        self.faces.iter().map(|f| if f.dim % 2 == 0 { 1 } else { -1 }).sum()
    }

    /// f-vector `(f_0, ..., f_dim)`.
    pub fn f_vector(&self) -> Vec<usize> {
        (0..=self.dim as isize).map(|d| self.faces.iter().filter(|f| f.dim == d).count()).collect()
    }

    /// Fan at a vertex: one cone per maximal cell containing it, in the
    /// vertex's reference chart, given by generators.
    pub fn fan_at(&self, v: usize) -> Vec<Vec<IntVector>> {
        let Some(vf) = self.face_id(&[v]) else { return vec![] };
        self.containing[vf]
            .iter()
            .map(|&pos| {
                let c = &self.charts[&(v, pos)];
                self.faces[self.maximal[pos]]
                    .vertices
                    .iter()
                    .filter(|&&w| w != v)
                    .map(|&w| {
                        let (d, _) = self.points[w].sub(&self.points[v]).clear_denominators();
                        c.mul_vec(&d)
                    })
                    .collect()
            })
            .collect()
    }

    /// The fan at an interior vertex covers a neighbourhood (no boundary through it).
    pub fn fan_is_complete(&self, v: usize) -> bool {
        self.face_id(&[v]).is_some_and(|f| !self.boundary[f])
    }

    /// Chart transition `ψ_σ` from the chart at `from` to the chart at `to`,
    /// restricted to the maximal cell `pos` containing both.
    pub fn transition(&self, from: usize, to: usize, pos: usize) -> Result<IntMatrix> {
        let cf = self.charts.get(&(from, pos)).ok_or_else(|| Error::InvalidTropicalSpace("vertex not in cell".into()))?;
        let ct = self.charts.get(&(to, pos)).ok_or_else(|| Error::InvalidTropicalSpace("vertex not in cell".into()))?;
        let b = &self.tangent[pos];
        let a_from = to_rat_mat(&cf.mul(b));
        let a_to = to_rat_mat(&ct.mul(b));
        let inv = rat_inv(&a_from).ok_or_else(|| Error::InvalidTropicalSpace("singular chart".into()))?;
        let d = self.dim;
        to_int_mat(&rat_mul(&a_to, &inv, d, d), d)
            .ok_or_else(|| Error::InconsistentGluing(format!("transition {from} -> {to} on cell {pos} is not integral")))
    }

    /// Vertex pair `(v₊, v₋)` of an edge, `v₊` the lexicographically smaller point.
    fn edge_ends(&self, omega: usize) -> Result<(usize, usize)> {
        let f = &self.faces[omega];
        if f.dim != 1 || f.vertices.len() != 2 {
            return Err(Error::InvalidTropicalSpace(format!("face {:?} is not an edge", f.vertices)));
        }
        let (a, b) = (f.vertices[0], f.vertices[1]);
        Ok(if self.points[a] <= self.points[b] { (a, b) } else { (b, a) })
    }

    /// The loop `v₊ → σ₊ → v₋ → σ₋ → v₊` around the edge `ω` inside the wall `ρ`.
    pub fn loop_data(&self, omega: usize, rho: usize) -> Result<LoopData> {
        if self.dim < 2 {
            return Err(Error::InvalidTropicalSpace("monodromy needs a complex of dimension at least 2".into()));
        }
        let (vp, vm) = self.edge_ends(omega)?;
        let r = &self.faces[rho];
        if r.dim != self.dim as isize - 1 {
            return Err(Error::InvalidTropicalSpace(format!("face {:?} is not a wall", r.vertices)));
        }
        if !self.faces[omega].vertices.iter().all(|v| r.vertices.contains(v)) {
            return Err(Error::InvalidTropicalSpace("edge is not contained in the wall".into()));
        }
        if self.boundary[omega] || self.boundary[rho] {
            return Err(Error::NotBoundaryFace("edge or wall lies in the boundary".into()));
        }
        let cs = &self.containing[rho];
        if cs.len() != 2 {
            return Err(Error::InvalidTropicalSpace("wall is not shared by two maximal cells".into()));
        }
        Ok(LoopData { omega, rho, v_plus: vp, v_minus: vm, sigma_plus: cs[0], sigma_minus: cs[1] })
    }

    /// Monodromy around `(ω, ρ)` in the chart at `v₊`.
    pub fn monodromy(&self, omega: usize, rho: usize) -> Result<IntMatrix> {
        let l = self.loop_data(omega, rho)?;
        self.monodromy_of_loop(&l)
    }

    pub fn monodromy_of_loop(&self, l: &LoopData) -> Result<IntMatrix> {
        // ψ_σ: chart at v₊ -> chart at v₋ across σ
        let psi_p = self.transition(l.v_plus, l.v_minus, l.sigma_plus)?;
        let psi_m = self.transition(l.v_plus, l.v_minus, l.sigma_minus)?;
        let back = psi_m
            .unimodular_inverse()
            .ok_or_else(|| Error::InconsistentGluing("transition is not unimodular".into()))?;
        Ok(back.mul(&psi_p))
    }

    /// The same loop traversed in the opposite direction.
    pub fn monodromy_reversed(&self, omega: usize, rho: usize) -> Result<IntMatrix> {
        let mut l = self.loop_data(omega, rho)?;
        std::mem::swap(&mut l.sigma_plus, &mut l.sigma_minus);
        self.monodromy_of_loop(&l)
    }

    /// Monodromy expressed in the chart at `v₋`.
    pub fn monodromy_at_minus(&self, omega: usize, rho: usize) -> Result<IntMatrix> {
        let l = self.loop_data(omega, rho)?;
        let psi_p = self.transition(l.v_plus, l.v_minus, l.sigma_plus)?;
        let psi_m = self.transition(l.v_plus, l.v_minus, l.sigma_minus)?;
        Ok(psi_p.mul(&psi_m.unimodular_inverse().expect("unimodular")))
    }

    /// All `(edge, wall)` pairs away from the boundary, in a fixed order.
    pub fn interior_pairs(&self) -> Vec<(usize, usize)> {
        if self.dim < 2 {
            return vec![];
        }
        let walls = self.faces_of_dim(self.dim as isize - 1);
        let mut out = Vec::new();
        for &rho in &walls {
            if self.boundary[rho] || self.containing[rho].len() != 2 {
                continue;
            }
            let pos = self.containing[rho][0];
            let rv = &self.faces[rho].vertices;
            for &g in &self.cell_faces[pos] {
                let f = &self.faces[g];
                if f.dim == 1 && !self.boundary[g] && f.vertices.iter().all(|v| rv.contains(v)) {
                    out.push((g, rho));
                }
            }
        }
        out.sort();
        out
    }

    /// Transition across every maximal cell containing an interior edge is the same.
    pub fn charts_compatible(&self) -> Result<bool> {
        for omega in self.faces_of_dim(1) {
            if self.boundary[omega] {
                continue;
            }
            let (vp, vm) = self.edge_ends(omega)?;
            let mut first: Option<IntMatrix> = None;
            for &pos in &self.containing[omega] {
                let t = self.transition(vp, vm, pos)?;
                match &first {
                    None => first = Some(t),
                    Some(f) if *f != t => return Ok(false),
                    Some(_) => {}
                }
            }
        }
        Ok(true)
    }

    /// Faces `τ` with `ω ⊆ τ ⊆ ρ`.
    pub fn faces_between(&self, omega: usize, rho: usize) -> Vec<usize> {
        let ov = &self.faces[omega].vertices;
        let rv = &self.faces[rho].vertices;
        let Some(&pos) = self.containing[rho].first() else { return vec![] };
        self.cell_faces[pos]
            .iter()
            .copied()
            .filter(|&g| {
                let gv = &self.faces[g].vertices;
                ov.iter().all(|v| gv.contains(v)) && gv.iter().all(|v| rv.contains(v))
            })
            .collect()
    }

    /// Plain JSON description.
    pub fn to_report(&self) -> serde_json::Value {
        serde_json::json!({
            "label": self.label,
            "kind": self.kind,
            "ambient_dim": self.ambient_dim,
            "dim": self.dim,
            "points": self.points.iter().map(RatPoint::to_strings).collect::<Vec<_>>(),
            "maximal_cells": self.maximal.iter().map(|&f| &self.faces[f].vertices).collect::<Vec<_>>(),
            "f_vector": self.f_vector(),
            "boundary_faces": self.boundary_faces().len(),
        })
    }
}

impl TropicalSpace {
    /// The subcomplex formed by some maximal cells, keeping their charts.
    pub fn subcomplex(&self, positions: &[usize], label: &str) -> Result<TropicalSpace> {
        let cells: Vec<Vec<usize>> = positions.iter().map(|&p| self.faces[self.maximal[p]].vertices.clone()).collect();
        let lookup: HashMap<Vec<usize>, usize> = positions.iter().map(|&p| (self.faces[self.maximal[p]].vertices.clone(), p)).collect();
        let mut sorted = cells.clone();
        sorted.sort();
        sorted.dedup();
        let origin: Vec<usize> = sorted.iter().map(|c| lookup[c]).collect();
        let mut t = TropicalSpace::new(
            self.points.clone(),
            sorted,
            |v, pos| Ok(self.charts[&(v, origin[pos])].clone()),
            self.kind,
            label,
        )?;
        t.product_k = self.product_k;
        Ok(t)
    }

    /// Smallest face of the maximal cell `pos` containing all the points.
    pub fn carrier_in(&self, pos: usize, pts: &[RatPoint]) -> Option<usize> {
        let fid = self.maximal[pos];
        let poly = self.face_polytope(fid);
        if !pts.iter().all(|p| poly.contains(p)) {
            return None;
        }
        let tight: Vec<usize> = (0..poly.facets().len())
            .filter(|&i| pts.iter().all(|p| poly.facets()[i].eval(p).is_zero()))
            .collect();
        let verts: Vec<usize> = self.faces[fid]
            .vertices
            .iter()
            .copied()
            .filter(|&v| tight.iter().all(|&i| poly.facets()[i].eval(&self.points[v]).is_zero()))
            .collect();
        self.face_id(&verts)
    }

    /// Position of some maximal cell containing all the points.
    pub fn cell_containing(&self, pts: &[RatPoint]) -> Option<usize> {
        (0..self.maximal.len()).find(|&pos| {
            let poly = self.face_polytope(self.maximal[pos]);
            pts.iter().all(|p| poly.contains(p))
        })
    }
}

/// A complex of cells sitting inside a common affine subspace `A`, with
/// charts restricted from the ambient lattice. If the cells bound their
/// convex hull `Q` inside `A`, the fan at a vertex is the projection from the
/// barycenter of `Q`; if they are full-dimensional in `A` the charts are the
/// lattice coordinates of `A`.
pub fn restricted_space(cells: &[LatticePolytope], label: &str) -> Result<TropicalSpace> {
    let mut pts: BTreeSet<RatPoint> = BTreeSet::new();
    for c in cells {
        pts.extend(c.vertices().iter().cloned());
    }
    let points: Vec<RatPoint> = pts.into_iter().collect();
    let n = points.first().map(RatPoint::dim).ok_or_else(|| Error::Empty("no cells".into()))?;
    let lookup: HashMap<&RatPoint, usize> = points.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let maximal: Vec<Vec<usize>> = cells.iter().map(|c| c.vertices().iter().map(|v| lookup[v]).collect()).collect();
    let dirs: Vec<RatPoint> = points[1..].iter().map(|p| p.sub(&points[0])).collect();
    let basis = saturated_basis(&dirs, n);
    let m = basis.len();
    let l = crate::exactlin::integral_left_inverse(&IntMatrix::from_cols(&basis, n))
        .ok_or_else(|| Error::InvalidTropicalSpace("affine span is not saturated".into()))?;
    let d = cells.iter().map(LatticePolytope::dim).max().unwrap_or(0).max(0) as usize;
    if d == m {
        return TropicalSpace::new(points, maximal, |_, _| Ok(l.clone()), SpaceKind::Synthetic, label);
    }
    if d + 1 != m {
        return Err(Error::InvalidTropicalSpace(format!("cells of dimension {d} in a span of dimension {m}")));
    }
    let q = hull_rat(&points)?;
    for c in cells {
        if !q.facets().iter().any(|f| c.vertices().iter().all(|v| f.eval(v).is_zero())) {
            return Err(Error::NotBoundaryFace("cell does not lie on the boundary of the hull".into()));
        }
    }
    let center = q.barycenter();
    let charts: Vec<IntMatrix> = points
        .iter()
        .map(|v| {
            let local = crate::polytope::apply_rat(&l, &v.sub(&center));
            let (dir, _) = local.clear_denominators();
            Ok(projection_chart(&dir.primitive()?)?.mul(&l))
        })
        .collect::<Result<_>>()?;
    TropicalSpace::new(points, maximal, |v, _| Ok(charts[v].clone()), SpaceKind::Synthetic, label)
}

/// The loop used to compute monodromy around an `(edge, wall)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LoopData {
    pub omega: usize,
    pub rho: usize,
    pub v_plus: usize,
    pub v_minus: usize,
    pub sigma_plus: usize,
    pub sigma_minus: usize,
}

/// `M - I = g · u mᵀ` with `u`, `m` primitive and `g > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transvection {
    pub multiplicity: crate::exactlin::Int,
    pub direction: IntVector,
    pub conormal: IntVector,
}

/// Rank-one decomposition of `M - I`; `None` for the identity or higher rank.
pub fn transvection(m: &IntMatrix) -> Option<Transvection> {
    let d = m.sub(&IntMatrix::identity(m.rows()));
    if d.is_zero() || d.rank() != 1 {
        return None;
    }
    let row = d.row_vectors().into_iter().find(|r| !r.is_zero())?;
    let mut conormal = row.primitive().ok()?;
    if conormal.coords().iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) {
        conormal = conormal.neg();
    }
    // D = c mᵀ, with c read off a coordinate where m is nonzero
    let j = conormal.coords().iter().position(|c| !c.is_zero())?;
    let col = d.col(j);
    let mj = conormal.coords()[j].clone();
    let c = IntVector::new(col.coords().iter().map(|x| x / &mj).collect());
    let g = c.content();
    let mut u = c.primitive().ok()?;
    // keep g positive
    let sign_ok = c.coords().iter().zip(u.coords()).all(|(a, b)| a == &(b * &g));
    if !sign_ok {
        u = u.neg();
    }
    Some(Transvection { multiplicity: g, direction: u, conormal })
}

/// A primitive vector `t` with `<m, t> = 1`.
pub fn test_vector(m: &IntVector) -> Option<IntVector> {
    let a = IntMatrix::from_rows(std::slice::from_ref(m));
    solve_integer(&a, &IntVector::new(vec![crate::exactlin::Int::one()]))
}

/// A monodromy computation for one `(edge, wall)` pair.
#[derive(Clone, Debug)]
pub struct MonodromyEntry {
    pub loop_data: LoopData,
    pub matrix: IntMatrix,
    pub transvection: Option<Transvection>,
    pub polytope: LatticePolytope,
    pub elementary: bool,
    /// `M - I` has rank above one; the elementary verdict is then not the whole story.
    pub needs_review: bool,
}

/// A discriminant cell: the joint of the barycenters of the faces between ω and ρ.
#[derive(Clone, Debug)]
pub struct DiscriminantCell {
    pub cell: LatticePolytope,
    pub entry: MonodromyEntry,
}

#[derive(Clone, Debug, Default)]
pub struct Discriminant {
    pub cells: Vec<DiscriminantCell>,
}

impl Discriminant {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    /// Barycenters of the cells (the points themselves in dimension 2).
    pub fn points(&self) -> Vec<RatPoint> {
        self.cells.iter().map(|c| c.cell.barycenter()).collect()
    }
}

fn entry_for(t: &TropicalSpace, l: LoopData) -> Result<Option<MonodromyEntry>> {
    let m = t.monodromy_of_loop(&l)?;
    if m.is_identity() {
        return Ok(None);
    }
    let tv = transvection(&m);
    let d = m.sub(&IntMatrix::identity(m.rows()));
    let dim = m.rows();
    let mut pts = vec![RatPoint::zeros(dim)];
    let needs_review = tv.is_none();
    match &tv {
        Some(tv) => {
            let test = test_vector(&tv.conormal).expect("primitive conormal has a test vector");
            pts.push(d.mul_vec(&test).to_rat());
        }
        None => {
            pts.extend(d.col_vectors().iter().filter(|c| !c.is_zero()).map(IntVector::to_rat));
        }
    }
    let polytope = hull_rat(&pts)?;
    let elementary = polytope.is_simplex() && polytope.dim() >= 1 && is_elementary_simplex(&polytope);
    Ok(Some(MonodromyEntry { loop_data: l, matrix: m, transvection: tv, polytope, elementary, needs_review }))
}

/// All `(edge, wall)` pairs with nontrivial monodromy.
pub fn discriminant(t: &TropicalSpace) -> Result<Discriminant> {
    let pairs = t.interior_pairs();
    let found: Vec<Result<Option<DiscriminantCell>>> = par::map(&pairs, |&(omega, rho)| {
        let l = t.loop_data(omega, rho)?;
        Ok(entry_for(t, l)?.map(|entry| {
            let bs: Vec<RatPoint> = t.faces_between(omega, rho).into_iter().map(|g| t.face_barycenter(g)).collect();
            DiscriminantCell { cell: hull_rat(&bs).expect("nonempty"), entry }
        }))
    });
    let mut cells = Vec::new();
    for f in found {
        if let Some(c) = f? {
            cells.push(c);
        }
    }
    Ok(Discriminant { cells })
}

/// Monodromy polytope of the `(edge, wall)` pair; errors if the monodromy is trivial.
pub fn monodromy_polytope(t: &TropicalSpace, omega: usize, rho: usize) -> Result<LatticePolytope> {
    let l = t.loop_data(omega, rho)?;
    entry_for(t, l)?
        .map(|e| e.polytope)
        .ok_or_else(|| Error::NotSingular(format!("edge {:?} in wall {:?}", t.faces[omega].vertices, t.faces[rho].vertices)))
}

/// Verdicts for every discriminant cell.
#[derive(Clone, Debug, Default)]
pub struct MonodromyReport {
    pub entries: Vec<MonodromyEntry>,
    pub cells: Vec<LatticePolytope>,
}

impl MonodromyReport {
    pub fn needs_review(&self) -> bool {
        self.entries.iter().any(|e| e.needs_review)
    }

    pub fn to_json(&self, t: &TropicalSpace) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .entries
            .iter()
            .zip(&self.cells)
            .map(|(e, c)| {
                let l = &e.loop_data;
                serde_json::json!({
                    "cell": c.vertices().iter().map(RatPoint::to_strings).collect::<Vec<_>>(),
                    "loop": {
                        "edge": t.faces[l.omega].vertices,
                        "wall": t.faces[l.rho].vertices,
                        "v_plus": l.v_plus,
                        "v_minus": l.v_minus,
                        "sigma_plus": t.faces[t.maximal[l.sigma_plus]].vertices,
                        "sigma_minus": t.faces[t.maximal[l.sigma_minus]].vertices,
                    },
                    "matrix": e.matrix.row_vectors(),
                    "polytope": e.polytope.vertices().iter().map(RatPoint::to_strings).collect::<Vec<_>>(),
                    "multiplicity": e.transvection.as_ref().map(|tv| tv.multiplicity.to_string()),
                    "elementary": e.elementary,
                    "needs_review": e.needs_review,
                })
            })
            .collect();
        serde_json::json!({ "entries": entries, "needs_review": self.needs_review() })
    }
}

/// Every monodromy polytope is an elementary simplex.
pub fn is_simple(t: &TropicalSpace) -> Result<(bool, MonodromyReport)> {
    let d = discriminant(t)?;
    let simple = d.cells.iter().all(|c| c.entry.elementary && !c.entry.needs_review);
    let (cells, entries) = d.cells.into_iter().map(|c| (c.cell, c.entry)).unzip();
    Ok((simple, MonodromyReport { entries, cells }))
}

/// Number of discriminant points counted with multiplicity (dimension 2 only).
pub fn count_focus_focus(t: &TropicalSpace) -> Result<crate::exactlin::Int> {
    if t.dim() != 2 {
        return Err(Error::DimensionMismatch(format!("focus-focus count needs dimension 2, got {}", t.dim())));
    }
    let d = discriminant(t)?;
    let mut total = crate::exactlin::Int::zero();
    for c in &d.cells {
        match &c.entry.transvection {
            Some(tv) => total += &tv.multiplicity,
            None => {
                return Err(Error::CertificationFailed("monodromy of rank above one in dimension 2".into()));
            }
        }
    }
    Ok(total)
}

/// Tropical space of a full-dimensional graph degeneration: the refined base
/// polytope with identity charts.
pub fn dual_intersection_complex(g: &GraphDegeneration) -> Result<TropicalSpace> {
    for h in g.heights() {
        if !is_convex(h, h.subdivision())? {
            return Err(Error::NotConvex("height function is not convex".into()));
        }
    }
    TropicalSpace::from_subdivision(g.refinement(), "fibre over 1 of the cone complex")
}

/// The boundary of `Δ` decomposed into the given cells, with projection charts.
/// Cells must lie in facets of `Δ` and use every boundary lattice point.
pub fn hypersurface_trop(delta: &LatticePolytope, cells: &[LatticePolytope], label: &str) -> Result<TropicalSpace> {
    let n = delta.ambient_dim();
    if !delta.is_full_dimensional() || !delta.relative_interior_contains(&RatPoint::zeros(n)) {
        return Err(Error::PolarUndefined);
    }
    for c in cells {
        if !delta.facets().iter().any(|f| c.vertices().iter().all(|v| f.eval(v).is_zero())) {
            return Err(Error::NotBoundaryFace(format!("cell with vertices {:?}", c.vertices())));
        }
        if c.dim() != n as isize - 1 {
            return Err(Error::InvalidSubdivision("boundary cell of wrong dimension".into()));
        }
    }
    let mut pts: BTreeSet<RatPoint> = BTreeSet::new();
    for c in cells {
        pts.extend(c.vertices().iter().cloned());
    }
    for p in delta.boundary_lattice_points() {
        if !pts.contains(&p.to_rat()) {
            return Err(Error::NotFine(format!("boundary lattice point {:?} is not a vertex", p.coords())));
        }
    }
    let points: Vec<RatPoint> = pts.into_iter().collect();
    let lookup: HashMap<&RatPoint, usize> = points.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let maximal: Vec<Vec<usize>> = cells.iter().map(|c| c.vertices().iter().map(|v| lookup[v]).collect()).collect();
    let ints: Vec<IntVector> = points
        .iter()
        .map(|p| p.to_int().ok_or_else(|| Error::InvalidSubdivision("non-lattice vertex".into())))
        .collect::<Result<_>>()?;
    let charts: Vec<IntMatrix> = ints.iter().map(projection_chart).collect::<Result<_>>()?;
    TropicalSpace::new(points, maximal, |v, _| Ok(charts[v].clone()), SpaceKind::Hypersurface, label)
}

/// Face type in the `(k+1)Δ^k × [-1,1]` construction (final coordinate is the interval).
pub fn classify_face(t: &TropicalSpace, face: usize) -> Result<FaceType> {
    let k = t
        .product_k()
        .ok_or_else(|| Error::InvalidTropicalSpace("space does not come from the product construction".into()))?;
    let n = t.ambient_dim();
    if n != k + 1 {
        return Err(Error::InvalidTropicalSpace("product dimension mismatch".into()));
    }
    let pts = t.face_points(face);
    classify_points(k, &pts)
}

/// Classification of a face given by its vertices in `((k+1)Δ^k - 1) × [-1,1]`.
pub fn classify_points(k: usize, pts: &[RatPoint]) -> Result<FaceType> {
    let base = crate::polytope::anticanonical_simplex(k);
    let last: BTreeSet<&Rat> = pts.iter().map(|p| &p.coords()[k]).collect();
    let proj: Vec<RatPoint> = pts.iter().map(|p| p.select(&(0..k).collect::<Vec<_>>())).collect();
    let bary = RatPoint::barycenter(&proj);
    let in_base_boundary = proj_in_boundary(&base, &proj);
    let one = Rat::one();
    if last.len() == 1 {
        let h = *last.iter().next().unwrap();
        if h.abs() == one {
            return Ok(if base.relative_interior_contains(&bary) { FaceType::InteriorCap } else { FaceType::BoundaryCap });
        }
        if h.is_zero() && in_base_boundary {
            return Ok(FaceType::HorizontalSide);
        }
    } else if in_base_boundary {
        return Ok(FaceType::VerticalSide);
    }
    Err(Error::NotBoundaryFace("face does not lie on the boundary of the product".into()))
}

/// All points lie in a common facet of `base`.
fn proj_in_boundary(base: &LatticePolytope, pts: &[RatPoint]) -> bool {
    base.facets().iter().any(|f| pts.iter().all(|p| f.eval(p).is_zero()))
}
