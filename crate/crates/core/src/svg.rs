//! SVG pictures of two-dimensional complexes.
//!
//! A complex in the plane is drawn as it is. A surface in 3-space is cut
//! open along a spanning tree of the cell adjacency graph and laid flat:
//! each cell is rotated about the edge it shares with its parent into the
//! plane, so every cell keeps its shape. Discriminant points are marked
//! with red circles (class `discriminant`), placed in the first cell that
//! contains them.
//!
//! Coordinates are written with three decimals, so the output only depends
//! on the exact input.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::exactlin::RatPoint;
use crate::tropical::{discriminant, TropicalSpace};

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 20.0;

type V3 = [f64; 3];
type V2 = [f64; 2];

fn to_f64(p: &RatPoint) -> Vec<f64> {
    p.coords().iter().map(|c| c.to_f64().unwrap_or(0.0)).collect()
}

fn sub3(a: &V3, b: &V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot3(a: &V3, b: &V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Isometry from the plane of one cell onto the drawing: the 3-space edge
/// `a b` goes to the drawn segment `aa bb`, and the cell lies on the side
/// of the unit normal `n`.
#[derive(Clone, Copy, Debug)]
struct Frame {
    a: V3,
    b: V3,
    aa: V2,
    bb: V2,
    n: V2,
}

impl Frame {
    fn place(&self, x: &V3) -> V2 {
        let e = sub3(&self.b, &self.a);
        let r = sub3(x, &self.a);
        let l2 = dot3(&e, &e);
        let s = dot3(&r, &e) / l2;
        let perp = [r[0] - s * e[0], r[1] - s * e[1], r[2] - s * e[2]];
        let h = dot3(&perp, &perp).sqrt();
        [
            self.aa[0] + s * (self.bb[0] - self.aa[0]) + h * self.n[0],
            self.aa[1] + s * (self.bb[1] - self.aa[1]) + h * self.n[1],
        ]
    }
}

fn unit_normal(a: &V2, b: &V2, away_from: &V2) -> V2 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let l = (d[0] * d[0] + d[1] * d[1]).sqrt();
    let mut n = [-d[1] / l, d[0] / l];
    let side = (away_from[0] - a[0]) * n[0] + (away_from[1] - a[1]) * n[1];
    if side > 0.0 {
        n = [-n[0], -n[1]];
    }
    n
}

fn centroid(pts: &[V2]) -> V2 {
    let k = pts.len() as f64;
    [pts.iter().map(|p| p[0]).sum::<f64>() / k, pts.iter().map(|p| p[1]).sum::<f64>() / k]
}

/// The drawing: one polygon per maximal cell and the marked points.
#[derive(Clone, Debug, Default)]
pub struct Net {
    pub polygons: Vec<Vec<V2>>,
    pub marks: Vec<V2>,
}

fn cyclic(mut pts: Vec<V2>) -> Vec<V2> {
    let c = centroid(&pts);
    pts.sort_by(|p, q| {
        let a = (p[1] - c[1]).atan2(p[0] - c[0]);
        let b = (q[1] - c[1]).atan2(q[0] - c[0]);
        a.total_cmp(&b)
    });
    pts
}

fn edges_of(t: &TropicalSpace, pos: usize) -> Vec<usize> {
    t.faces_of_cell(pos).iter().copied().filter(|&f| t.faces()[f].dim == 1).collect()
}

fn unfold(t: &TropicalSpace) -> Vec<Option<Frame>> {
    let cells = t.maximal_cells();
    let pt3 = |i: usize| -> V3 {
        let v = to_f64(&t.points()[i]);
        [v[0], v[1], v[2]]
    };
    let mut frames: Vec<Option<Frame>> = vec![None; cells.len()];
    for root in 0..cells.len() {
        if frames[root].is_some() {
            continue;
        }
        // components after the first are laid out to the right of the previous ones
        let shift = frames.iter().flatten().map(|f| f.aa[0].max(f.bb[0])).fold(0.0, f64::max);
        let e = edges_of(t, root)[0];
        let (a, b) = (pt3(t.faces()[e].vertices[0]), pt3(t.faces()[e].vertices[1]));
        let l = dot3(&sub3(&b, &a), &sub3(&b, &a)).sqrt();
        let off = if shift > 0.0 { shift + 2.0 * l } else { 0.0 };
        frames[root] = Some(Frame { a, b, aa: [off, 0.0], bb: [off + l, 0.0], n: [0.0, 1.0] });
        let mut queue = VecDeque::from([root]);
        while let Some(c) = queue.pop_front() {
            let fc = frames[c].expect("placed");
            let drawn: Vec<V2> = cells[c].vertices.iter().map(|&v| fc.place(&pt3(v))).collect();
            let mid = centroid(&drawn);
            for e in edges_of(t, c) {
                for &nb in t.cells_containing(e) {
                    if frames[nb].is_some() {
                        continue;
                    }
                    let vs = &t.faces()[e].vertices;
                    let (a, b) = (pt3(vs[0]), pt3(vs[1]));
                    let (aa, bb) = (fc.place(&a), fc.place(&b));
                    let n = unit_normal(&aa, &bb, &mid);
                    frames[nb] = Some(Frame { a, b, aa, bb, n });
                    queue.push_back(nb);
                }
            }
        }
    }
    frames
}

/// Lay out a 2-dimensional complex in the plane and mark its discriminant.
pub fn net(t: &TropicalSpace) -> Result<Net> {
    if t.dim() != 2 || !(t.ambient_dim() == 2 || t.ambient_dim() == 3) {
        return Err(Error::DimensionMismatch(format!(
            "rendering needs a 2-dimensional complex in the plane or 3-space, got dimension {} in {}",
            t.dim(),
            t.ambient_dim()
        )));
    }
    let cells = t.maximal_cells();
    let marks_exact: BTreeSet<RatPoint> = discriminant(t)?.points().into_iter().collect();
    if t.ambient_dim() == 2 {
        let polygons = cells
            .iter()
            .map(|c| {
                cyclic(
                    c.vertices
                        .iter()
                        .map(|&v| {
                            let p = to_f64(&t.points()[v]);
                            [p[0], p[1]]
                        })
                        .collect(),
                )
            })
            .collect();
        let marks = marks_exact.iter().map(|p| {
            let q = to_f64(p);
            [q[0], q[1]]
        });
        return Ok(Net { polygons, marks: marks.collect() });
    }
    let frames = unfold(t);
    let polygons = cells
        .iter()
        .zip(&frames)
        .map(|(c, f)| {
            let f = f.expect("every cell is placed");
            cyclic(
                c.vertices
                    .iter()
                    .map(|&v| {
                        let p = to_f64(&t.points()[v]);
                        f.place(&[p[0], p[1], p[2]])
                    })
                    .collect(),
            )
        })
        .collect();
    let mut marks = Vec::new();
    for m in &marks_exact {
        let Some(pos) = t.cell_containing(std::slice::from_ref(m)) else { continue };
        let f = frames[pos].expect("placed");
        let q = to_f64(m);
        marks.push(f.place(&[q[0], q[1], q[2]]));
    }
    Ok(Net { polygons, marks })
}

/// Render the net as a standalone SVG document.
pub fn render_svg(t: &TropicalSpace) -> Result<String> {
    let net = net(t)?;
    let all = net.polygons.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in all {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let scale = (WIDTH - 2.0 * MARGIN) / span;
    let width = (x1 - x0) * scale + 2.0 * MARGIN;
    let height = (y1 - y0) * scale + 2.0 * MARGIN;
    // y grows downwards in SVG
    let map = |p: &V2| ((p[0] - x0) * scale + MARGIN, (y1 - p[1]) * scale + MARGIN);

    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).expect("write to string");
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.3}" height="{height:.3}" viewBox="0 0 {width:.3} {height:.3}">"#
    )
    .expect("write to string");
    writeln!(out, r#"  <title>{}</title>"#, escape(t.label())).expect("write to string");
    writeln!(out, r##"  <g class="cells" fill="#eef3fb" stroke="#234" stroke-width="1">"##).expect("write to string");
    for poly in &net.polygons {
        let pts: Vec<String> = poly
            .iter()
            .map(|p| {
                let (x, y) = map(p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        writeln!(out, r#"    <polygon points="{}"/>"#, pts.join(" ")).expect("write to string");
    }
    writeln!(out, "  </g>").expect("write to string");
    for m in &net.marks {
        let (x, y) = map(m);
        writeln!(out, r#"  <circle class="discriminant" cx="{x:.3}" cy="{y:.3}" r="3" fill="red"/>"#).expect("write to string");
    }
    writeln!(out, "</svg>").expect("write to string");
    Ok(out)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::hull_i64;
    use crate::subdivision::Subdivision;
    use crate::tropical::restricted_space;

    #[test]
    fn planar_square_has_no_marks() {
        let sq = hull_i64(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]).unwrap();
        let t = TropicalSpace::from_subdivision(&Subdivision::trivial(&sq), "square").unwrap();
        let svg = render_svg(&t).unwrap();
        assert_eq!(svg.matches("<polygon").count(), 1);
        assert!(!svg.contains("discriminant\""));
    }

    #[test]
    fn unfolded_tetrahedron_keeps_edge_lengths() {
        let pts: [&[i64]; 4] = [&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]];
        let faces: Vec<_> = (0..4)
            .map(|skip| hull_i64(&pts.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, p)| *p).collect::<Vec<_>>()).unwrap())
            .collect();
        let t = restricted_space(&faces, "tetrahedron").unwrap();
        let n = net(&t).unwrap();
        assert_eq!(n.polygons.len(), 4);
        let mut perimeters: Vec<f64> = n
            .polygons
            .iter()
            .map(|p| (0..3).map(|i| ((p[i][0] - p[(i + 1) % 3][0]).powi(2) + (p[i][1] - p[(i + 1) % 3][1]).powi(2)).sqrt()).sum())
            .collect();
        perimeters.sort_by(f64::total_cmp);
        let right = 2.0 + 2f64.sqrt();
        let equi = 3.0 * 2f64.sqrt();
        for (p, want) in perimeters.iter().zip([right, right, right, equi]) {
            assert!((p - want).abs() < 1e-9, "{p} vs {want}");
        }
        assert_eq!(render_svg(&t).unwrap(), render_svg(&t).unwrap());
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let seg = hull_i64(&[&[0], &[1]]).unwrap();
        let t = TropicalSpace::from_subdivision(&Subdivision::trivial(&seg), "segment").unwrap();
        assert!(render_svg(&t).is_err());
    }
}
