//! Heatmap and overlay export.
//!
//! Two artifacts per surface: a binary graymap (P5) of the cell masses,
//! scaled so the hottest cell is full white, and a GeoJSON feature
//! collection with one polygon per subcluster carrying its candidate
//! score. Polygons are traced from cell edges, so disconnected
//! subclusters become MultiPolygons and enclosed gaps become holes; outer
//! rings wind counterclockwise, holes clockwise.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::poa::PoaMap;
use crate::terrain::Scene;

/// Render the cell masses as a binary graymap, row 0 first.
pub fn render_pgm(poa: &PoaMap) -> Result<Vec<u8>> {
    if poa.p.len() != poa.rows * poa.cols {
        return Err(Error::invalid("POA cell count does not match its dimensions"));
    }
    let max = poa.p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(max.is_finite() && max > 0.0) {
        return Err(Error::DegeneratePoa);
    }
    let mut out = Vec::with_capacity(32 + poa.p.len());
    write!(out, "P5\n{} {}\n255\n", poa.cols, poa.rows).expect("write to vec");
    out.extend(poa.p.iter().map(|&p| (p / max * 255.0).round() as u8));
    Ok(out)
}

/// Directed boundary rings of a cell set, as grid corner points
/// `(row, col)`. Cells sit on the left of every edge, so rings around the
/// set run counterclockwise (positive area in col/row coordinates) and
/// rings around enclosed gaps run clockwise.
pub(crate) fn boundary_rings(scene: &Scene, cell_indices: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let in_set: std::collections::BTreeSet<usize> = cell_indices.iter().cloned().collect();
    let has = |r: isize, c: isize| -> bool {
        r >= 0
            && c >= 0
            && (r as usize) < scene.rows
            && (c as usize) < scene.cols
            && in_set.contains(&scene.index(r as usize, c as usize))
    };

    // start corner -> list of end corners, kept sorted for determinism.
    let mut edges: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
    let mut push = |a: (usize, usize), b: (usize, usize)| edges.entry(a).or_default().push(b);
    for &idx in &in_set {
        let cell = &scene.cells[idx];
        let (r, c) = (cell.row, cell.col);
        let (ri, ci) = (r as isize, c as isize);
        if !has(ri - 1, ci) {
            push((r, c), (r, c + 1));
        }
        if !has(ri + 1, ci) {
            push((r + 1, c + 1), (r + 1, c));
        }
        if !has(ri, ci - 1) {
            push((r + 1, c), (r, c));
        }
        if !has(ri, ci + 1) {
            push((r, c + 1), (r + 1, c + 1));
        }
    }
    for ends in edges.values_mut() {
        ends.sort();
    }

    let dir = |a: (usize, usize), b: (usize, usize)| -> (i8, i8) {
        ((b.0 as i64 - a.0 as i64).signum() as i8, (b.1 as i64 - a.1 as i64).signum() as i8)
    };
    let step = |v: (usize, usize), d: (i8, i8)| -> (usize, usize) {
        ((v.0 as i64 + d.0 as i64) as usize, (v.1 as i64 + d.1 as i64) as usize)
    };

    let mut rings = Vec::new();
    loop {
        let Some((&start, _)) = edges.iter().find(|(_, ends)| !ends.is_empty()) else {
            break;
        };
        let mut ring = vec![start];
        let first = edges.get_mut(&start).unwrap().remove(0);
        let mut incoming = dir(start, first);
        let mut at = first;
        while at != start {
            ring.push(at);
            // Prefer the sharpest left turn so rings stay simple where
            // boundaries touch at a corner.
            let left = (incoming.1, -incoming.0);
            let right = (-incoming.1, incoming.0);
            let ends = edges.get_mut(&at).expect("boundary edges form cycles");
            let pick = [left, incoming, right]
                .into_iter()
                .map(|d| step(at, d))
                .find_map(|target| ends.iter().position(|&e| e == target))
                .expect("boundary edges form cycles");
            let next = ends.remove(pick);
            incoming = dir(at, next);
            at = next;
        }
        rings.push(ring);
    }
    rings
}

fn ring_area_cells(ring: &[(usize, usize)]) -> f64 {
    // Shoelace over (x = col, y = row), closing the ring implicitly.
    let mut twice = 0i64;
    for i in 0..ring.len() {
        let (r1, c1) = ring[i];
        let (r2, c2) = ring[(i + 1) % ring.len()];
        twice += c1 as i64 * r2 as i64 - c2 as i64 * r1 as i64;
    }
    twice as f64 / 2.0
}

fn ring_contains(ring: &[(usize, usize)], point: (f64, f64)) -> bool {
    // Ray cast in (x = col, y = row) coordinates.
    let (py, px) = point;
    let mut inside = false;
    for i in 0..ring.len() {
        let (r1, c1) = ring[i];
        let (r2, c2) = ring[(i + 1) % ring.len()];
        let (y1, x1) = (r1 as f64, c1 as f64);
        let (y2, x2) = (r2 as f64, c2 as f64);
        if (y1 > py) != (y2 > py) {
            let x_cross = x1 + (py - y1) / (y2 - y1) * (x2 - x1);
            if px < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}

fn ring_coordinates(scene: &Scene, ring: &[(usize, usize)]) -> Value {
    let mut coords: Vec<Value> = ring
        .iter()
        .map(|&(r, c)| {
            let p = scene.corner_latlon(r as f64, c as f64);
            json!([p.lon, p.lat])
        })
        .collect();
    coords.push(coords[0].clone());
    Value::Array(coords)
}

/// Polygon or MultiPolygon geometry for a set of cells.
fn cells_geometry(scene: &Scene, cell_indices: &[usize]) -> Value {
    let rings = boundary_rings(scene, cell_indices);
    let mut outers: Vec<(f64, &Vec<(usize, usize)>, Vec<&Vec<(usize, usize)>>)> = Vec::new();
    let mut holes: Vec<&Vec<(usize, usize)>> = Vec::new();
    for ring in &rings {
        let area = ring_area_cells(ring);
        if area > 0.0 {
            outers.push((area, ring, Vec::new()));
        } else {
            holes.push(ring);
        }
    }
    for hole in holes {
        // A point just inside the gap: half a step to the right of the
        // first edge (cells sit on the left).
        let a = hole[0];
        let b = hole[1];
        let d = ((b.0 as f64 - a.0 as f64), (b.1 as f64 - a.1 as f64));
        let right = (-d.1, d.0);
        let probe = (
            (a.0 as f64 + b.0 as f64) / 2.0 + 0.5 * right.0,
            (a.1 as f64 + b.1 as f64) / 2.0 + 0.5 * right.1,
        );
        let owner = outers
            .iter_mut()
            .filter(|(_, outer, _)| ring_contains(outer, probe))
            .min_by(|a, b| a.0.partial_cmp(&b.0).expect("finite areas"));
        if let Some((_, _, hole_list)) = owner {
            hole_list.push(hole);
        }
    }

    let polygons: Vec<Value> = outers
        .iter()
        .map(|(_, outer, hole_list)| {
            let mut rings = vec![ring_coordinates(scene, outer)];
            rings.extend(hole_list.iter().map(|h| ring_coordinates(scene, h)));
            Value::Array(rings)
        })
        .collect();
    if polygons.len() == 1 {
        json!({ "type": "Polygon", "coordinates": polygons[0] })
    } else {
        json!({ "type": "MultiPolygon", "coordinates": polygons })
    }
}

/// One feature per subcluster, in scene order, carrying its candidate
/// score from the map.
pub fn subclusters_geojson(scene: &Scene, poa: &PoaMap) -> Result<Value> {
    if poa.p.len() != scene.cells.len() {
        return Err(Error::invalid("POA size does not match the scene"));
    }
    let features: Vec<Value> = scene
        .subclusters
        .iter()
        .map(|sub| {
            json!({
                "type": "Feature",
                "properties": {
                    "id": sub.id,
                    "cluster_id": sub.cluster_id,
                    "feature_type": sub.feature_type.label(),
                    "cells": sub.cell_indices.len(),
                    "q": poa.q.get(&sub.id).copied().unwrap_or(0.0),
                },
                "geometry": cells_geometry(scene, &sub.cell_indices),
            })
        })
        .collect();
    Ok(json!({ "type": "FeatureCollection", "features": features }))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// Write `<stem>.pgm` and `<stem>.geojson` for a surface; returns the two
/// paths written.
pub fn export_heatmap(poa: &PoaMap, scene: &Scene, stem: &Path) -> Result<(PathBuf, PathBuf)> {
    let pgm_path = stem.with_extension("pgm");
    let geo_path = stem.with_extension("geojson");
    write_bytes(&pgm_path, &render_pgm(poa)?)?;
    let collection = subclusters_geojson(scene, poa)?;
    let mut text = serde_json::to_string_pretty(&collection)?;
    text.push('\n');
    write_bytes(&geo_path, text.as_bytes())?;
    Ok((pgm_path, geo_path))
}
