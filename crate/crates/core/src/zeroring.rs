//! The order-zero mirror algebra: graded rings of cell complexes glued along
//! faces, gluing data, twisted embedded ideals `z^m = a` and the parameter
//! family of embeddings.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::embed::{simplex_fibration, Embedding, Fibration};
use crate::error::{Error, Result};
use crate::exactlin::{rat_to_string, solve_integer, Int, IntMatrix, IntVector, Rat, RatPoint};
use crate::par;
use crate::polytope::{lattice_points, LatticePolytope};
use crate::tropical::{Discriminant, TropicalSpace};

/// Gluing data in the cone picture. For each ordered pair of incident maximal
/// cells a torus element `t ∈ (Q^*)^{n+1}`; the monomial `z^m` of the
/// homogenized lattice is rescaled by `∏ t_j^{m_j}` when passing from the
/// first chart to the second. Absent pairs carry the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GluingData {
    dim: usize,
    scalars: BTreeMap<(usize, usize), Vec<Rat>>,
}

impl GluingData {
    /// All scalars 1, for monomials of `Z^dim`.
    pub fn vanilla(dim: usize) -> Self {
        GluingData { dim, scalars: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_vanilla(&self) -> bool {
        self.scalars.values().all(|t| t.iter().all(One::is_one))
    }

    /// Sets the scalars from cell `a` to cell `b` (and the inverse from `b` to `a`).
    pub fn set(&mut self, a: usize, b: usize, torus: Vec<Rat>) -> Result<()> {
        if torus.len() != self.dim {
            return Err(Error::DimensionMismatch(format!("torus element of length {}, expected {}", torus.len(), self.dim)));
        }
        if a == b {
            return Err(Error::InconsistentGluing("gluing a cell to itself".into()));
        }
        if torus.iter().any(Zero::is_zero) {
            return Err(Error::InconsistentGluing("gluing scalars must be nonzero".into()));
        }
        let inv = torus.iter().map(|t| Rat::one() / t).collect();
        self.scalars.insert((a, b), torus);
        self.scalars.insert((b, a), inv);
        Ok(())
    }

    /// The scalar attached to the single generator `j` from `a` to `b`.
    pub fn with_generator_scalar(dim: usize, a: usize, b: usize, j: usize, s: Rat) -> Result<Self> {
        let mut g = GluingData::vanilla(dim);
        let mut t = vec![Rat::one(); dim];
        *t.get_mut(j).ok_or_else(|| Error::OutOfRange(format!("generator {j}")))? = s;
        g.set(a, b, t)?;
        Ok(g)
    }

    /// `∏ t_j^{m_j}` for the pair `(a, b)`.
    pub fn factor(&self, a: usize, b: usize, m: &IntVector) -> Rat {
        if a == b {
            return Rat::one();
        }
        let Some(t) = self.scalars.get(&(a, b)) else { return Rat::one() };
        t.iter().zip(m.coords()).fold(Rat::one(), |acc, (t, e)| {
            let e: i64 = e.try_into().expect("exponent fits in i64");
            let p = if e >= 0 { pow(t, e as u64) } else { Rat::one() / pow(t, (-e) as u64) };
            acc * p
        })
    }

    /// Cocycle condition on triple overlaps: for every face and every three
    /// cells containing it, `g_ab g_bc = g_ac` on the monomials of the face.
    pub fn check_cocycle(&self, t: &TropicalSpace) -> Result<()> {
        self.check_dim(t)?;
        for f in 0..t.faces().len() {
            let cs = t.cells_containing(f);
            if cs.len() < 3 {
                continue;
            }
            let monos: Vec<IntVector> = t.face_points(f).iter().map(homogenize).collect();
            for &a in cs {
                for &b in cs {
                    for &c in cs {
                        if a == b || b == c || a == c {
                            continue;
                        }
                        for m in &monos {
                            if self.factor(a, b, m) * self.factor(b, c, m) != self.factor(a, c, m) {
                                return Err(Error::InconsistentGluing(format!(
                                    "cocycle fails on cells {a}, {b}, {c} at face {:?}",
                                    t.faces()[f].vertices
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_dim(&self, t: &TropicalSpace) -> Result<()> {
        if self.dim != t.ambient_dim() + 1 {
            return Err(Error::DimensionMismatch(format!(
                "gluing data for Z^{}, complex needs Z^{}",
                self.dim,
                t.ambient_dim() + 1
            )));
        }
        Ok(())
    }
}

fn pow(t: &Rat, e: u64) -> Rat {
    (0..e).fold(Rat::one(), |acc, _| acc * t)
}

fn homogenize(p: &RatPoint) -> IntVector {
    let v = p.to_int().expect("lattice point");
    v.concat(&IntVector::from_i64(&[1]))
}

/// A degree-one generator: a lattice point of the complex, labelled by the
/// first maximal cell containing it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub cell: usize,
    #[serde(serialize_with = "ser_int_vector")]
    pub point: IntVector,
}

fn ser_int_vector<S: serde::Serializer>(v: &IntVector, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>().serialize(s)
}

/// `x^lhs = scalar · x^rhs`, or `x^lhs = 0` when `rhs` is `None`.
/// Exponents are sparse maps from generator index to power.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Relation {
    pub lhs: BTreeMap<usize, u32>,
    pub rhs: Option<BTreeMap<usize, u32>>,
    pub scalar: Rat,
}

impl Relation {
    pub fn degree(&self) -> u32 {
        self.lhs.values().sum()
    }
}

/// Graded presentation of `Proj k[Σ]` up to a degree bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingPresentation {
    pub generators: Vec<Generator>,
    pub relations: Vec<Relation>,
    pub degree_bound: u32,
}

impl RingPresentation {
    /// Substitute `x_i ↦ s_i x_i`; a relation `x^a = c x^b` becomes
    /// `x^a = c s^b / s^a x^b`.
    pub fn substitute(&self, scales: &[Rat]) -> Result<RingPresentation> {
        if scales.len() != self.generators.len() || scales.iter().any(Zero::is_zero) {
            return Err(Error::DimensionMismatch("one nonzero scale per generator expected".into()));
        }
        let mono = |e: &BTreeMap<usize, u32>| e.iter().fold(Rat::one(), |acc, (&i, &k)| acc * pow(&scales[i], k as u64));
        let mut relations: Vec<Relation> = self
            .relations
            .iter()
            .map(|r| match &r.rhs {
                None => r.clone(),
                Some(rhs) => Relation { lhs: r.lhs.clone(), rhs: Some(rhs.clone()), scalar: &r.scalar * mono(rhs) / mono(&r.lhs) },
            })
            .collect();
        relations.sort();
        Ok(RingPresentation { generators: self.generators.clone(), relations, degree_bound: self.degree_bound })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let n = self.generators.len();
        let dense = |e: &BTreeMap<usize, u32>| {
            let mut v = vec![0u32; n];
            for (&i, &k) in e {
                v[i] = k;
            }
            v
        };
        let relations: Vec<serde_json::Value> = self
            .relations
            .iter()
            .map(|r| {
                serde_json::json!({
                    "lhs": dense(&r.lhs),
                    "rhs": r.rhs.as_ref().map(dense),
                    "scalar": rat_to_string(&r.scalar),
                })
            })
            .collect();
        serde_json::json!({
            "generators": self.generators,
            "relations": relations,
            "degree_bound": self.degree_bound,
        })
    }
}

/// Lattice points of every maximal cell, sorted.
fn cell_lattice_points(t: &TropicalSpace) -> Vec<Vec<IntVector>> {
    let ids: Vec<usize> = t.maximal_face_ids().to_vec();
    par::map(&ids, |&f| lattice_points(&t.face_polytope(f)))
}

/// All multisets of size `e` drawn from `items`, as sorted index vectors.
fn multisets(items: &[usize], e: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], e: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == e {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            go(items, e, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, e, 0, &mut Vec::new(), &mut out);
    out
}

fn exponents(ms: &[usize]) -> BTreeMap<usize, u32> {
    let mut e = BTreeMap::new();
    for &i in ms {
        *e.entry(i).or_insert(0) += 1;
    }
    e
}

/// `Proj k[Σ]` up to degree `d`: generators are the lattice points of the
/// cells; relations are the binomial identifications inside each cell
/// (twisted by the gluing data) and the vanishing of products of generators
/// that share no cell.
pub fn proj_ring(t: &TropicalSpace, g: &GluingData, d: u32) -> Result<RingPresentation> {
    g.check_dim(t)?;
    g.check_cocycle(t)?;
    let cell_pts = cell_lattice_points(t);
    let mut all: BTreeSet<IntVector> = BTreeSet::new();
    for ps in &cell_pts {
        all.extend(ps.iter().cloned());
    }
    let points: Vec<IntVector> = all.into_iter().collect();
    let index = |p: &IntVector| points.binary_search(p).expect("lattice point of the complex");
    let cell_gens: Vec<Vec<usize>> = cell_pts.iter().map(|ps| ps.iter().map(index).collect()).collect();
    let mut home = vec![usize::MAX; points.len()];
    let mut cofacial: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); points.len()];
    for (pos, gens) in cell_gens.iter().enumerate() {
        for &i in gens {
            home[i] = home[i].min(pos);
            cofacial[i].extend(gens.iter().copied());
        }
    }
    let generators: Vec<Generator> =
        points.iter().zip(&home).map(|(p, &cell)| Generator { cell, point: p.clone() }).collect();
    // z_pos^p = factor(home(p), pos, p) · x_p
    let to_chart = |i: usize, pos: usize| g.factor(home[i], pos, &points[i].concat(&IntVector::from_i64(&[1])));
    let mut binomials: BTreeMap<(BTreeMap<usize, u32>, BTreeMap<usize, u32>), Rat> = BTreeMap::new();
    for (pos, gens) in cell_gens.iter().enumerate() {
        for e in 2..=d as usize {
            let mut by_sum: BTreeMap<IntVector, Vec<Vec<usize>>> = BTreeMap::new();
            for ms in multisets(gens, e) {
                let s = ms.iter().fold(IntVector::zeros(points[0].dim()), |acc, &i| acc.add(&points[i]));
                by_sum.entry(s).or_default().push(ms);
            }
            for group in by_sum.values() {
                let first = &group[0];
                let fa = first.iter().fold(Rat::one(), |acc, &i| acc * to_chart(i, pos));
                for other in &group[1..] {
                    let fb = other.iter().fold(Rat::one(), |acc, &i| acc * to_chart(i, pos));
                    let key = (exponents(first), exponents(other));
                    let c = fb / &fa;
                    if let Some(old) = binomials.get(&key) {
                        if old != &c {
                            return Err(Error::InconsistentGluing("charts disagree on a binomial relation".into()));
                        }
                    } else {
                        binomials.insert(key, c);
                    }
                }
            }
        }
    }
    let mut relations: Vec<Relation> =
        binomials.into_iter().map(|((l, r), c)| Relation { lhs: l, rhs: Some(r), scalar: c }).collect();
    // minimal supports with no common cell
    let cell_sets: Vec<BTreeSet<usize>> = cell_gens.iter().map(|g| g.iter().copied().collect()).collect();
    let in_common_cell = |s: &[usize]| cell_sets.iter().any(|c| s.iter().all(|i| c.contains(i)));
    let mut frontier: Vec<Vec<usize>> = (0..points.len()).map(|i| vec![i]).collect();
    for _size in 2..=d as usize {
        let mut next = Vec::new();
        for s in &frontier {
            let last = *s.last().unwrap();
            for j in (last + 1)..points.len() {
                if !s.iter().all(|&i| cofacial[i].contains(&j)) {
                    if s.len() == 1 {
                        relations.push(Relation { lhs: exponents(&[s[0], j]), rhs: None, scalar: Rat::zero() });
                    }
                    continue;
                }
                let mut cand = s.clone();
                cand.push(j);
                if in_common_cell(&cand) {
                    next.push(cand);
                } else {
                    relations.push(Relation { lhs: exponents(&cand), rhs: None, scalar: Rat::zero() });
                }
            }
        }
        frontier = next;
    }
    relations.sort();
    Ok(RingPresentation { generators, relations, degree_bound: d })
}

/// Number of connected components of the complex.
pub fn components(t: &TropicalSpace) -> usize {
    let n = t.points().len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for f in t.maximal_cells() {
        for w in f.vertices.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let used: BTreeSet<usize> = t.maximal_cells().iter().flat_map(|f| f.vertices.iter().copied()).collect();
    used.iter().map(|&v| find(&mut parent, v)).collect::<BTreeSet<_>>().len()
}

/// Dimension of the degree-`d` piece: lattice points of the `d`-th dilates of
/// the cells, glued — each point counted once in the relative interior of the
/// unique face carrying it.
pub fn hilbert_count(t: &TropicalSpace, d: u32) -> Int {
    if d == 0 {
        return Int::from(components(t));
    }
    let dr = Rat::from_integer(Int::from(d));
    let faces: Vec<usize> = (0..t.faces().len()).filter(|&f| t.faces()[f].dim >= 0).collect();
    let counts = par::map(&faces, |&f| {
        let dil = t.face_polytope(f).dilate(&dr);
        Int::from(dil.interior_lattice_points().len())
    });
    counts.into_iter().sum()
}

/// `[hilbert_count(t, 0), ..., hilbert_count(t, d)]`.
pub fn hilbert_series(t: &TropicalSpace, d: u32) -> Vec<Int> {
    (0..=d).map(|e| hilbert_count(t, e)).collect()
}

/// `z^{exponent} = value` in the chart of a maximal cell of `T_X`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ChartRelation {
    pub chart: usize,
    /// Which tangent direction `e_component - e_0` of the simplex was lifted.
    pub component: usize,
    pub exponent: IntVector,
    pub value: Rat,
}

/// Defining relations of the embedded divisor, normalized by `a_0 = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddedIdeal {
    pub parameters: Vec<Rat>,
    pub relations: Vec<ChartRelation>,
}

impl EmbeddedIdeal {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "parameters": self.parameters.iter().map(rat_to_string).collect::<Vec<_>>(),
            "relations": self.relations.iter().map(|r| serde_json::json!({
                "chart": r.chart,
                "component": r.component,
                "exponent": r.exponent.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "value": rat_to_string(&r.value),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Lift of `e_i` through `dy` on the tangent lattice of the cell.
fn lift(tx: &TropicalSpace, f: &Fibration, pos: usize, i: usize) -> Result<IntVector> {
    let n = tx.ambient_dim();
    let ys = &f.functionals[&pos];
    let coeffs: Vec<Rat> = ys[1..].iter().flat_map(|a| a.linear.iter().cloned()).collect();
    let (num, den) = RatPoint::new(coeffs).clear_denominators();
    if !den.is_one() {
        return Err(Error::CertificationFailed("fibration rescales the lattice; tangent vectors do not lift".into()));
    }
    let rows: Vec<IntVector> = num.coords().chunks(n).map(|c| IntVector::new(c.to_vec())).collect();
    let b = tx.tangent_basis(pos);
    let m = IntMatrix::from_rows(&rows).mul(b);
    let target = IntVector::unit(f.k, i - 1);
    let x = solve_integer(&m, &target)
        .ok_or_else(|| Error::CertificationFailed(format!("tangent direction {i} does not lift on cell {pos}")))?;
    Ok(b.mul_vec(&x))
}

/// Relations `z^{m_σ,i} = a_i / a_0` in the first chart, transported to the
/// other charts through the gluing data and checked on every shared face.
pub fn embedded_ideal(
    tx: &TropicalSpace,
    f: &Fibration,
    emb: &Embedding,
    a: &[Rat],
    g: &GluingData,
) -> Result<EmbeddedIdeal> {
    if a.len() != f.k + 1 {
        return Err(Error::DimensionMismatch(format!("expected {} parameters, got {}", f.k + 1, a.len())));
    }
    if a.iter().any(Zero::is_zero) {
        return Err(Error::OutOfRange("parameters must be nonzero".into()));
    }
    g.check_dim(tx)?;
    let parameters: Vec<Rat> = a.iter().map(|x| x / &a[0]).collect();
    let charts: BTreeSet<usize> = emb.checks.iter().map(|c| c.ambient_cell).collect();
    let mut lifts: BTreeMap<usize, Vec<IntVector>> = BTreeMap::new();
    for &pos in &charts {
        lifts.insert(pos, (1..=f.k).map(|i| lift(tx, f, pos, i)).collect::<Result<_>>()?);
    }
    let cd = tx.dim() as isize - 1;
    let mut neighbours: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for w in tx.faces_of_dim(cd) {
        let cs: Vec<usize> = tx.cells_containing(w).iter().copied().filter(|p| charts.contains(p)).collect();
        for &x in &cs {
            for &y in &cs {
                if x != y {
                    neighbours.entry(x).or_default().push(y);
                }
            }
        }
    }
    let pad = |m: &IntVector| m.concat(&IntVector::from_i64(&[0]));
    let mut values: BTreeMap<usize, Vec<Rat>> = BTreeMap::new();
    for &root in &charts {
        if values.contains_key(&root) {
            continue;
        }
        values.insert(root, parameters[1..].to_vec());
        let mut queue = VecDeque::from([root]);
        while let Some(s) = queue.pop_front() {
            for &t in neighbours.get(&s).map(Vec::as_slice).unwrap_or(&[]) {
                let vs = &values[&s];
                let moved: Vec<Rat> = vs.iter().zip(&lifts[&s]).map(|(v, m)| v * g.factor(s, t, &pad(m))).collect();
                match values.get(&t) {
                    Some(old) if old != &moved => {
                        return Err(Error::InconsistentGluing(format!("relations disagree between charts {s} and {t}")));
                    }
                    Some(_) => {}
                    None => {
                        values.insert(t, moved);
                        queue.push_back(t);
                    }
                }
            }
        }
    }
    let mut relations = Vec::new();
    for (pos, vs) in &values {
        for (i, (v, m)) in vs.iter().zip(&lifts[pos]).enumerate() {
            relations.push(ChartRelation { chart: *pos, component: i + 1, exponent: m.clone(), value: v.clone() });
        }
    }
    relations.sort();
    Ok(EmbeddedIdeal { parameters, relations })
}

/// Verdict for one parameter vector.
#[derive(Clone, Debug, Serialize)]
pub struct GenericityEntry {
    pub parameters: Vec<String>,
    /// Point of `(k+1)Δ^k` over which the embedded locus sits.
    pub target: Vec<String>,
    /// Discriminant cells met by the translated fibre.
    pub meets: Vec<usize>,
    pub generic: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GenericityReport {
    pub entries: Vec<GenericityEntry>,
    pub generic: Vec<usize>,
}

/// Tropical transversality: the fibre over `(k+1) a / Σ a` must avoid every
/// discriminant cell. Parameters must be positive.
pub fn genericity_scan(
    tx: &TropicalSpace,
    f: &Fibration,
    disc: &Discriminant,
    samples: &[Vec<Rat>],
) -> Result<GenericityReport> {
    let sf = simplex_fibration(tx, f)?;
    let kp1 = Rat::from_integer(Int::from(f.k as u64 + 1));
    let mut entries = Vec::new();
    for a in samples {
        if a.len() != f.k + 1 || a.iter().any(|x| !x.is_positive()) {
            return Err(Error::OutOfRange("parameters must be k+1 positive rationals".into()));
        }
        let total = a.iter().fold(Rat::zero(), |s, x| s + x);
        let target = RatPoint::new(a.iter().map(|x| x * &kp1 / &total).collect());
        let fibre: Vec<LatticePolytope> = sf.fibre_over(tx, &target)?.into_iter().map(|(_, p)| p).collect();
        let mut meets = Vec::new();
        for (i, c) in disc.cells.iter().enumerate() {
            for p in &fibre {
                if !p.intersection(&c.cell)?.is_empty() {
                    meets.push(i);
                    break;
                }
            }
        }
        entries.push(GenericityEntry {
            parameters: a.iter().map(rat_to_string).collect(),
            target: target.to_strings(),
            generic: meets.is_empty(),
            meets,
        });
    }
    let generic = entries.iter().enumerate().filter(|(_, e)| e.generic).map(|(i, _)| i).collect();
    Ok(GenericityReport { entries, generic })
}
