//! Deterministic JSON reports for the pipelines and a small JSON format for
//! hand-made cell complexes.
//!
//! Reports are `serde_json::Value` trees whose objects have sorted keys;
//! every list is emitted in a documented canonical order (cells by sorted
//! vertex indices, points lexicographically), so two runs produce identical
//! bytes.

use serde::Deserialize;
use serde_json::{json, Value};

use crate::embed::{embed_d, lg_truncate, open_embed_lg, simplex_fibration, specialization_map};
use crate::error::{Error, Result};
use crate::examples::{compactified_component, lg_component, lg_potential, Pipeline};
use crate::exactlin::{parse_rat, rat_to_string, IntMatrix, RatPoint};
use crate::polytope::{hull_rat, is_reflexive, lattice_points, normalized_volume, LatticePolytope};
use crate::tropical::{count_focus_focus, is_simple, restricted_space, SpaceKind, TropicalSpace};
use crate::zeroring::{hilbert_series, proj_ring, GluingData};

fn polytope_json(p: &LatticePolytope) -> Value {
    json!({
        "vertices": p.vertices().iter().map(RatPoint::to_strings).collect::<Vec<_>>(),
        "dim": p.dim(),
    })
}

/// Summary of an example pipeline.
pub fn example_report(p: &Pipeline) -> Result<Value> {
    let poly = &p.polytope;
    let xi_gen = p.xi_gen()?;
    let xi_zero = p.xi_zero()?;
    Ok(json!({
        "example": p.spec,
        "polytope": {
            "vertices": poly.vertices().iter().map(RatPoint::to_strings).collect::<Vec<_>>(),
            "reflexive": is_reflexive(poly)?,
            "lattice_points": lattice_points(poly).len(),
            "normalized_volume": rat_to_string(&normalized_volume(poly)),
        },
        "mpcp_cells": p.mpcp.subdivision().len(),
        "tyurin_cells": p.tyurin.subdivision().len(),
        "two_parameter_cells": p.two_parameter.refinement().len(),
        "diagonal_compatible": p.diagonal_compatible(),
        "slice": p.slice.as_ref().map(|s| json!({"coord": s.coord, "level": rat_to_string(&s.level)})),
        "slice_is_wall": p.slice_is_wall(),
        "xi_gen_cells": xi_gen.maximal_cells().len(),
        "xi_zero_cells": xi_zero.maximal_cells().len(),
        "blowup": p.blowup.as_ref().map(|b| json!({
            "total": polytope_json(&b.total),
            "parts": b.parts.iter().map(polytope_json).collect::<Vec<_>>(),
        })),
        "space": p.space.to_report(),
    }))
}

/// Simplicity verdict with every monodromy polytope for an example.
pub fn simplicity_report(p: &Pipeline) -> Result<Value> {
    space_simplicity_report(&p.space, json!(p.spec))
}

/// Simplicity verdict for any space; `source` names where it came from.
pub fn space_simplicity_report(t: &TropicalSpace, source: Value) -> Result<Value> {
    let (simple, rep) = is_simple(t)?;
    let ff = if t.dim() == 2 { Some(count_focus_focus(t)?.to_string()) } else { None };
    let total = ff.as_ref().map(|s| s.parse::<u64>().expect("small count"));
    Ok(json!({
        "example": source,
        "simple": simple,
        "discriminant_cells": rep.entries.len(),
        "violations": rep.entries.iter().filter(|e| !e.elementary || e.needs_review).count(),
        "focus_focus_total": total,
        "needs_review": rep.needs_review(),
        "monodromy": rep.to_json(t),
    }))
}

/// Tangent surjectivity of `T_D -> T_X`, with the barycenter-fibre comparison.
pub fn embedding_report(p: &Pipeline) -> Result<Value> {
    let e = embed_d(&p.space, &p.fibration)?;
    let sf = simplex_fibration(&p.space, &p.fibration)?;
    let matches = sf.matches_embedding(&p.space, &e)?;
    Ok(json!({
        "example": p.spec,
        "integrally_surjective": e.surjective,
        "rescaled": e.rescaled,
        "central_fibre_matches": matches,
        "face_compatible": e.iota.face_compatible(&e.t_d, &p.space),
        "t_d": e.t_d.to_report(),
        "checks": e.checks,
        "iota": e.iota.to_json(),
    }))
}

/// LG truncation of the component below the slice and its open embedding
/// into the compactified component.
pub fn lg_report(p: &Pipeline) -> Result<Value> {
    let tz = lg_component(p)?;
    let u = lg_potential(p)?;
    let tr = lg_truncate(&tz, &u)?;
    let open = match compactified_component(p).and_then(|tx| open_embed_lg(&tz, &tx)) {
        Ok(m) => m.to_json(),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let spec = specialization_map(&p.xi_gen()?, &p.xi_zero()?)?;
    Ok(json!({
        "example": p.spec,
        "component": tz.to_report(),
        "truncated": tr.space.to_report(),
        "new_boundary_faces": tr.new_boundary.len(),
        "no_slab_at_level_one": tr.no_slab_at_level_one,
        "open_embedding": open,
        "specialization": { "cells": spec.cells.len(), "surjective": spec.surjective },
    }))
}

/// Hilbert counts up to `d` and the presentation with vanilla gluing.
pub fn ring_report(t: &TropicalSpace, d: u32) -> Result<Value> {
    let g = GluingData::vanilla(t.ambient_dim() + 1);
    let pres = proj_ring(t, &g, d)?;
    Ok(json!({
        "label": t.label(),
        "degree_bound": d,
        "hilbert_counts": hilbert_series(t, d).iter().map(|c| c.to_string().parse::<u64>().expect("count fits")).collect::<Vec<_>>(),
        "presentation": pres.to_json(),
    }))
}

/// Canonical text form: pretty JSON with a trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// A hand-made complex: points (integers or rational strings) and maximal
/// cells as point indices. Full-dimensional complexes get identity charts;
/// lower-dimensional ones are restricted from the ambient lattice.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexJson {
    pub points: Vec<Vec<Value>>,
    pub cells: Vec<Vec<usize>>,
    #[serde(default)]
    pub label: Option<String>,
}

fn coord(v: &Value, i: usize, j: usize) -> Result<crate::exactlin::Rat> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(|x| crate::exactlin::rat(x, 1))
            .ok_or_else(|| Error::Parse(format!("points[{i}][{j}]: expected an integer or a rational string"))),
        Value::String(s) => parse_rat(s).map_err(|e| Error::Parse(format!("points[{i}][{j}]: {e}"))),
        _ => Err(Error::Parse(format!("points[{i}][{j}]: expected an integer or a rational string"))),
    }
}

/// Parse and validate a complex file.
pub fn parse_complex(text: &str) -> Result<TropicalSpace> {
    let c: ComplexJson = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let label = c.label.clone().unwrap_or_else(|| "complex".into());
    let points: Vec<RatPoint> = c
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| p.iter().enumerate().map(|(j, v)| coord(v, i, j)).collect::<Result<Vec<_>>>().map(RatPoint::new))
        .collect::<Result<_>>()?;
    let n = points.first().map(RatPoint::dim).ok_or_else(|| Error::Parse("points: empty list".into()))?;
    if let Some(i) = points.iter().position(|p| p.dim() != n) {
        return Err(Error::Parse(format!("points[{i}]: expected {n} coordinates")));
    }
    if c.cells.is_empty() {
        return Err(Error::Parse("cells: empty list".into()));
    }
    let mut polys = Vec::new();
    for (i, cell) in c.cells.iter().enumerate() {
        if let Some(&bad) = cell.iter().find(|&&v| v >= points.len()) {
            return Err(Error::Parse(format!("cells[{i}]: point index {bad} out of range")));
        }
        let pts: Vec<RatPoint> = cell.iter().map(|&v| points[v].clone()).collect();
        let poly = hull_rat(&pts)?;
        if poly.vertices().len() != {
            let mut u = pts.clone();
            u.sort();
            u.dedup();
            u.len()
        } {
            return Err(Error::Parse(format!("cells[{i}]: listed points are not all vertices of the cell")));
        }
        polys.push(poly);
    }
    if polys.iter().all(|p| p.dim() == n as isize) {
        let cells: Vec<Vec<usize>> = polys
            .iter()
            .map(|p| p.vertices().iter().map(|v| points.iter().position(|q| q == v).expect("listed point")).collect())
            .collect();
        TropicalSpace::new(points, cells, |_, _| Ok(IntMatrix::identity(n)), SpaceKind::Synthetic, &label)
    } else {
        restricted_space(&polys, &label)
    }
}
