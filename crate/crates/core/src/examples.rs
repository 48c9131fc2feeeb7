//! End-to-end pipelines for the worked examples: the `(k+1, 2)` hypersurface
//! in `P^k × P^1`, the quintic split along `u_1 = i - 1`, and the subdivided
//! hypercube.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::embed::Fibration;
use crate::error::{Error, Result};
use crate::exactlin::{rat, Int, IntMatrix, IntVector, Rat, RatPoint};
use crate::polytope::{
    anticanonical_simplex, hull_i64, hull_rat, hypercube, product, standard_simplex, LatticePolytope, NefPartition,
};
use crate::subdivision::{
    blowup_refinement, crosses_hyperplane, fine_crepant_subdivision, fine_crepant_subdivision_with, graph_degeneration,
    slab, slice, sum_all, tent, AffineFunction, BlowupRefinement, GraphDegeneration, PlFunction, TriangulationHeights,
};
use crate::tropical::{dual_intersection_complex, hypersurface_trop, projection_chart, SpaceKind, TropicalSpace};

/// Largest `k` accepted by [`build_kp1_2`].
pub const KP1_2_MAX_K: usize = 4;
/// Largest `k` accepted by [`build_hypercube`].
pub const HYPERCUBE_MAX_K: usize = 3;

/// Weight of the slice tent added to the triangulation heights of the quintic.
const SLICE_TENT_WEIGHT: i64 = 7;

/// A named example with its parameters, as stored in `examples/` specs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
}

impl ExampleSpec {
    pub fn kp1_2(k: usize) -> Self {
        ExampleSpec { name: "kp1-2".into(), k: Some(k), i: None }
    }

    pub fn quintic(i: usize) -> Self {
        ExampleSpec { name: "quintic".into(), k: None, i: Some(i) }
    }

    pub fn hypercube(k: usize) -> Self {
        ExampleSpec { name: "hypercube".into(), k: Some(k), i: None }
    }

    /// Ambient dimension of the polytope the example would build, known
    /// before any computation.
    pub fn ambient_dim(&self) -> Option<usize> {
        match self.name.as_str() {
            "kp1-2" => self.k.map(|k| k + 1),
            "quintic" => Some(4),
            "hypercube" => self.k,
            _ => None,
        }
    }

    pub fn build(&self) -> Result<Pipeline> {
        let need = |v: Option<usize>, what: &str| v.ok_or_else(|| Error::Parse(format!("example {} needs --{what}", self.name)));
        match self.name.as_str() {
            "kp1-2" => build_kp1_2(need(self.k, "k")?),
            "quintic" => build_quintic(need(self.i, "i")?),
            "hypercube" => build_hypercube(need(self.k, "k")?),
            other => Err(Error::Parse(format!("unknown example '{other}' (expected kp1-2, quintic or hypercube)"))),
        }
    }
}

/// The hyperplane `x_coord = level` along which a Tyurin degeneration splits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceData {
    pub coord: usize,
    pub level: Rat,
}

/// All objects produced by an example pipeline.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub spec: ExampleSpec,
    /// The polytope whose boundary carries the tropical space.
    pub polytope: LatticePolytope,
    /// MPCP stand-in on the polytope.
    pub mpcp: PlFunction,
    /// Tyurin tents, one per parameter of the Tyurin direction.
    pub tyurin_parts: Vec<PlFunction>,
    /// Their sum.
    pub tyurin: PlFunction,
    /// Graph degeneration with heights `(mpcp, tyurin)`.
    pub two_parameter: GraphDegeneration,
    /// Graph degeneration of `mpcp + tyurin`.
    pub one_parameter: GraphDegeneration,
    /// The tropical total space `T_X`.
    pub space: TropicalSpace,
    pub fibration: Fibration,
    pub slice: Option<SliceData>,
    pub blowup: Option<BlowupRefinement>,
}

impl Pipeline {
    pub fn k(&self) -> usize {
        self.fibration.k
    }

    /// General-fibre tropicalization: the Tyurin subdivision alone.
    pub fn xi_gen(&self) -> Result<TropicalSpace> {
        dual_intersection_complex(&self.two_parameter.restrict_to_axis(1)?)
    }

    /// Central-fibre tropicalization: the refinement by both parameters.
    pub fn xi_zero(&self) -> Result<TropicalSpace> {
        dual_intersection_complex(&self.two_parameter)
    }

    /// Diagonal of the two-parameter family equals the summed one-parameter family.
    pub fn diagonal_compatible(&self) -> bool {
        let diag = self.two_parameter.diagonal_restriction();
        let mut one: Vec<LatticePolytope> = self.one_parameter.total_complex().to_vec();
        one.sort_by(|a, b| a.vertices().cmp(b.vertices()));
        diag.len() == one.len() && diag.iter().zip(&one).all(|(a, b)| a.same_set(b))
    }

    /// No boundary cell of `T_X` crosses the slice hyperplane.
    pub fn slice_is_wall(&self) -> bool {
        let Some(s) = &self.slice else { return true };
        self.space.maximal_face_ids().iter().all(|&f| {
            let pts = self.space.face_points(f);
            let below = pts.iter().any(|p| p.coords()[s.coord] < s.level);
            let above = pts.iter().any(|p| p.coords()[s.coord] > s.level);
            !(below && above)
        })
    }
}

/// `(k+1)Δ^k × 2Δ^1`, translated so the origin is interior.
pub fn kp1_2_polytope(k: usize) -> LatticePolytope {
    product(&anticanonical_simplex(k), &hull_i64(&[&[-1], &[1]]).expect("segment"))
}

pub fn build_kp1_2(k: usize) -> Result<Pipeline> {
    if k == 0 {
        return Err(Error::OutOfRange("k must be at least 1".into()));
    }
    if k > KP1_2_MAX_K {
        return Err(Error::DimensionLimit { dim: k + 1, limit: KP1_2_MAX_K + 1 });
    }
    let pk = anticanonical_simplex(k);
    let seg = hull_i64(&[&[-1], &[1]])?;
    let delta = product(&pk, &seg);
    let (_, hk) = fine_crepant_subdivision(&pk)?;
    let h1 = tent(&seg, 0, &Rat::zero())?;
    let mpcp = hk.pullback_to_product(&seg, true);
    let tyurin = h1.pullback_to_product(&pk, false);
    let two = graph_degeneration(&delta, &[mpcp.clone(), tyurin.clone()])?;
    let one = graph_degeneration(&delta, &[sum_all(&[mpcp.clone(), tyurin.clone()])?])?;
    let space = hypersurface_trop(&delta, &two.refinement().boundary_faces(), &format!("kp1-2 k={k}"))?
        .with_product_structure(k);
    // y_0 = 1 - x_last, y_1 = 1 + x_last: the projection to the P^1 factor
    let n = k + 1;
    let mut lin = vec![Rat::zero(); n];
    lin[k] = Rat::one();
    let y1 = AffineFunction::new(lin, Rat::one());
    let y0 = y1.neg().add(&AffineFunction::new(vec![Rat::zero(); n], rat(2, 1)));
    let functionals = (0..space.maximal_face_ids().len()).map(|p| (p, vec![y0.clone(), y1.clone()])).collect();
    let fibration = Fibration::from_affine(&space, functionals)?;
    Ok(Pipeline {
        spec: ExampleSpec::kp1_2(k),
        polytope: delta,
        mpcp,
        tyurin_parts: vec![tyurin.clone()],
        tyurin,
        two_parameter: two,
        one_parameter: one,
        space,
        fibration,
        slice: Some(SliceData { coord: k, level: Rat::zero() }),
        blowup: None,
    })
}

/// The hull of the columns `(-1,-1,-1,-1)` and `5 e_j - (1,1,1,1)`.
pub fn quintic_polytope() -> LatticePolytope {
    hull_i64(&[&[-1, -1, -1, -1], &[4, -1, -1, -1], &[-1, 4, -1, -1], &[-1, -1, 4, -1], &[-1, -1, -1, 4]])
        .expect("quintic simplex")
}

/// Degree-`i` and degree-`(5-i)` parts of the quintic, summing to it.
pub fn quintic_split(i: usize) -> (LatticePolytope, LatticePolytope) {
    let a = standard_simplex(4, i as i64);
    let b = standard_simplex(4, 5 - i as i64).translate(&RatPoint::from_i64(&[-1, -1, -1, -1]));
    (a, b)
}

pub fn build_quintic(i: usize) -> Result<Pipeline> {
    if !(1..=4).contains(&i) {
        return Err(Error::OutOfRange(format!("degree split i = {i} must lie in 1..=4")));
    }
    let delta = quintic_polytope();
    let c = Int::from(i as u64 - 1);
    let level = Rat::from_integer(c.clone());
    // heights bend along the slice so the boundary triangulation contains H ∩ ∂Δ
    let weight = Int::from(SLICE_TENT_WEIGHT);
    let extra = move |x: &IntVector| -> Rat {
        let u = &x.coords()[0] - &c;
        if u.is_positive() {
            Rat::from_integer(u * &weight)
        } else {
            Rat::zero()
        }
    };
    let (_, mpcp) = fine_crepant_subdivision_with(&delta, &TriangulationHeights { extra: Some(&extra) })?;
    let tyurin = tent(&delta, 0, &level)?;
    let two = graph_degeneration(&delta, &[mpcp.clone(), tyurin.clone()])?;
    let one = graph_degeneration(&delta, &[sum_all(&[mpcp.clone(), tyurin.clone()])?])?;
    let space = hypersurface_trop(&delta, &two.refinement().boundary_faces(), &format!("quintic i={i}"))?;
    // y = 1 ∓ (u_1 - c) on the cells around the slice where both stay nonnegative
    let mut lin = vec![Rat::zero(); 4];
    lin[0] = Rat::one();
    let y1 = AffineFunction::new(lin, Rat::one() - &level);
    let y0 = y1.neg().add(&AffineFunction::new(vec![Rat::zero(); 4], rat(2, 1)));
    let mut functionals = BTreeMap::new();
    for (pos, &f) in space.maximal_face_ids().iter().enumerate() {
        let pts = space.face_points(f);
        let meets = pts.iter().any(|p| p.coords()[0] <= level) && pts.iter().any(|p| p.coords()[0] >= level);
        let nonneg = pts.iter().all(|p| !y0.eval(p).is_negative() && !y1.eval(p).is_negative());
        if meets && nonneg {
            functionals.insert(pos, vec![y0.clone(), y1.clone()]);
        }
    }
    let fibration = Fibration::from_affine(&space, functionals)?;
    let (da, db) = quintic_split(i);
    let partition = NefPartition::new(delta.clone(), vec![delta.clone()])?;
    let blowup = blowup_refinement(&partition, &da, &db)?;
    Ok(Pipeline {
        spec: ExampleSpec::quintic(i),
        polytope: delta,
        mpcp,
        tyurin_parts: vec![tyurin.clone()],
        tyurin,
        two_parameter: two,
        one_parameter: one,
        space,
        fibration,
        slice: Some(SliceData { coord: 0, level }),
        blowup: Some(blowup),
    })
}

pub fn build_hypercube(k: usize) -> Result<Pipeline> {
    if k == 0 || k > HYPERCUBE_MAX_K {
        return Err(Error::OutOfRange(format!("hypercube dimension k = {k} must lie in 1..={HYPERCUBE_MAX_K}")));
    }
    let cube = hypercube(k);
    let parts: Vec<PlFunction> = (0..k).map(|j| tent(&cube, j, &Rat::zero())).collect::<Result<_>>()?;
    let tyurin = sum_all(&parts)?;
    let (_, mpcp) = fine_crepant_subdivision(&cube)?;
    let two = graph_degeneration(&cube, &[mpcp.clone(), tyurin.clone()])?;
    let one = graph_degeneration(&cube, &[sum_all(&[mpcp.clone(), tyurin.clone()])?])?;
    let space = TropicalSpace::from_subdivision(tyurin.subdivision(), &format!("hypercube k={k}"))?;
    // y_j = (k + x_j)/k, y_0 = (k - Σ x)/k: a rescaled map onto (k+1)Δ^k
    let kr = Rat::from_integer(Int::from(k as u64));
    let mut ys = vec![AffineFunction::new(vec![-Rat::one() / &kr; k], Rat::one())];
    for j in 0..k {
        let mut lin = vec![Rat::zero(); k];
        lin[j] = Rat::one() / &kr;
        ys.push(AffineFunction::new(lin, Rat::one()));
    }
    let functionals = (0..space.maximal_face_ids().len()).map(|p| (p, ys.clone())).collect();
    let fibration = Fibration::from_affine(&space, functionals)?;
    Ok(Pipeline {
        spec: ExampleSpec::hypercube(k),
        polytope: cube,
        mpcp,
        tyurin_parts: parts,
        tyurin,
        two_parameter: two,
        one_parameter: one,
        space,
        fibration,
        slice: None,
        blowup: None,
    })
}

/// The Tyurin component on the side `x_coord <= level` of the slice: the
/// cells of `T_X` there, with boundary the tropical divisor.
pub fn lg_component(p: &Pipeline) -> Result<TropicalSpace> {
    let s = p.slice.as_ref().ok_or_else(|| Error::InvalidTropicalSpace("example has no slice hyperplane".into()))?;
    let t = &p.space;
    let positions: Vec<usize> = (0..t.maximal_face_ids().len())
        .filter(|&pos| t.face_points(t.maximal_face_ids()[pos]).iter().all(|x| x.coords()[s.coord] <= s.level))
        .collect();
    t.subcomplex(&positions, &format!("{} component", t.label()))
}

/// The potential `u = level - x_coord`, vanishing on the divisor.
pub fn lg_potential(p: &Pipeline) -> Result<impl Fn(&RatPoint) -> Rat + Sync> {
    let s = p.slice.clone().ok_or_else(|| Error::InvalidTropicalSpace("example has no slice hyperplane".into()))?;
    Ok(move |x: &RatPoint| &s.level - &x.coords()[s.coord])
}

/// The boundary of `Δ ∩ {x_coord <= level}`: the component together with the
/// slice facet, triangulated by coning the divisor cells from the unique
/// interior lattice point of the slice if there is one, and otherwise from its
/// lexicographically smallest vertex. Charts at every vertex project away
/// from a common interior point of the truncated polytope (the origin when it
/// is interior).
pub fn compactified_component(p: &Pipeline) -> Result<TropicalSpace> {
    let s = p.slice.as_ref().ok_or_else(|| Error::InvalidTropicalSpace("example has no slice hyperplane".into()))?;
    let tz = lg_component(p)?;
    let n = tz.ambient_dim();
    let q = slab(&p.polytope, s.coord, None, Some(&s.level))?;
    let qh = slice(&p.polytope, s.coord, &s.level)?;
    let interior = qh.interior_lattice_points();
    let apex = match interior.as_slice() {
        [one] => one.to_rat(),
        _ => qh.vertices()[0].clone(),
    };
    let divisor: Vec<LatticePolytope> = tz.boundary_faces().into_iter()
        .filter(|&f| tz.faces()[f].dim == tz.dim() as isize - 1)
        .map(|f| tz.face_polytope(f))
        .collect();
    let mut polys: Vec<LatticePolytope> = tz.maximal_face_ids().iter().map(|&f| tz.face_polytope(f)).collect();
    for d in &divisor {
        let mut pts = d.vertices().to_vec();
        pts.push(apex.clone());
        let c = hull_rat(&pts)?;
        if c.dim() == tz.dim() as isize {
            polys.push(c);
        }
    }
    let mut table: BTreeSet<RatPoint> = BTreeSet::new();
    for c in &polys {
        table.extend(c.vertices().iter().cloned());
    }
    let points: Vec<RatPoint> = table.into_iter().collect();
    let cells: Vec<Vec<usize>> =
        polys.iter().map(|c| c.vertices().iter().map(|v| points.binary_search(v).expect("vertex")).collect()).collect();
    let origin = RatPoint::zeros(n);
    let centre = if q.relative_interior_contains(&origin) { origin } else { q.barycenter() };
    let pts = points.clone();
    let chart = move |v: usize, _pos: usize| -> Result<IntMatrix> {
        let (w, _) = pts[v].sub(&centre).clear_denominators();
        projection_chart(&w.primitive()?)
    };
    TropicalSpace::new(points, cells, chart, SpaceKind::Hypersurface, &format!("{} compactified", tz.label()))
}

/// Whether some maximal cell of the MPCP crosses the slice hyperplane of the pipeline.
pub fn mpcp_crosses_slice(p: &Pipeline) -> bool {
    p.slice.as_ref().is_some_and(|s| !crosses_hyperplane(p.mpcp.subdivision(), s.coord, &s.level).is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{is_reflexive, minkowski_sum, normalized_volume};

    #[test]
    fn specs_dispatch() {
        assert!(matches!(ExampleSpec { name: "nope".into(), k: None, i: None }.build(), Err(Error::Parse(_))));
        assert!(matches!(ExampleSpec { name: "quintic".into(), k: None, i: None }.build(), Err(Error::Parse(_))));
        assert!(matches!(build_kp1_2(5), Err(Error::DimensionLimit { .. })));
        assert!(matches!(build_quintic(0), Err(Error::OutOfRange(_))));
        assert!(matches!(build_hypercube(4), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn quintic_split_sums_to_the_quintic() {
        for i in 1..=4 {
            let (a, b) = quintic_split(i);
            assert!(minkowski_sum(&a, &b).unwrap().same_set(&quintic_polytope()));
        }
        assert!(is_reflexive(&quintic_polytope()).unwrap());
        assert_eq!(normalized_volume(&quintic_polytope()), rat(625, 1));
    }

    #[test]
    fn kp1_2_small() {
        let p = build_kp1_2(1).unwrap();
        assert_eq!(p.space.dim(), 1);
        assert!(p.diagonal_compatible());
        assert!(p.slice_is_wall());
        // the P^1 factor has two pieces, each fibred over one half of [0,2]
        assert_eq!(p.xi_gen().unwrap().maximal_cells().len(), 2);
    }

    #[test]
    fn hypercube_cells() {
        for k in 1..=2 {
            let p = build_hypercube(k).unwrap();
            assert_eq!(p.space.maximal_cells().len(), 1 << k);
            assert_eq!(p.fibration.rescales(), k > 1);
            assert!(p.diagonal_compatible());
        }
    }
}
