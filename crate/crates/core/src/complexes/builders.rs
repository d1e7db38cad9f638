//! Built-in complexes: interval, circle, icosphere, circle × sphere, and the
//! mapping torus of the sphere glued by the antipodal map.

use std::collections::BTreeMap;

use super::chart::{antipode, ChartKind, VertexGeom};
use super::{CellLists, SimplicialComplex};
use crate::error::ComplexError;

const MAX_LEVEL: u32 = 4;
/// Prism layers along the glued direction of the mapping torus. Three layers
/// keep every tetrahedron inside two adjacent levels, which is the minimum
/// for a valid simplicial quotient.
const TORUS_LAYERS: usize = 3;

/// `m` segments on `[-1, 1]`.
pub fn interval(m: usize) -> Result<SimplicialComplex, ComplexError> {
    if m < 3 {
        return Err(ComplexError::InvalidParams(format!("interval needs m ≥ 3, got {m}")));
    }
    let geoms: Vec<VertexGeom> = (0..=m)
        .map(|i| VertexGeom::Interval(-1.0 + 2.0 * i as f64 / m as f64))
        .collect();
    let cells = CellLists {
        edges: (0..m).map(|i| [i, i + 1]).collect(),
        ..Default::default()
    };
    SimplicialComplex::from_cells(geoms, &cells, 0, ChartKind::Interval, format!("builtin:interval:m={m}"))
}

/// `m`-gon model of the unit circle.
pub fn circle(m: usize) -> Result<SimplicialComplex, ComplexError> {
    if m < 3 {
        return Err(ComplexError::InvalidParams(format!("circle needs m ≥ 3, got {m}")));
    }
    let geoms: Vec<VertexGeom> = (0..m)
        .map(|i| VertexGeom::Angle(2.0 * std::f64::consts::PI * i as f64 / m as f64))
        .collect();
    let cells = CellLists {
        edges: (0..m).map(|i| [i, (i + 1) % m]).collect(),
        ..Default::default()
    };
    SimplicialComplex::from_cells(geoms, &cells, 0, ChartKind::Circle, format!("builtin:circle:m={m}"))
}

/// Vertices and faces of the centrally symmetric icosahedron, unit-normalized.
fn icosahedron_cells() -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let r = (1.0 + phi * phi).sqrt();
    let mut pts = Vec::with_capacity(12);
    for &s1 in &[1.0, -1.0] {
        for &s2 in &[1.0, -1.0] {
            pts.push([0.0, s1 / r, s2 * phi / r]);
            pts.push([s1 / r, s2 * phi / r, 0.0]);
            pts.push([s1 * phi / r, 0.0, s2 / r]);
        }
    }
    // Edges join vertex pairs at the minimal nonzero distance; faces are the
    // triangles all of whose sides are edges.
    let dist2 = |a: [f64; 3], b: [f64; 3]| -> f64 {
        (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)
    };
    let mut min_d = f64::INFINITY;
    for i in 0..12 {
        for j in (i + 1)..12 {
            min_d = min_d.min(dist2(pts[i], pts[j]));
        }
    }
    let adjacent = |i: usize, j: usize| dist2(pts[i], pts[j]) < min_d * 1.5;
    let mut faces = Vec::new();
    for i in 0..12 {
        for j in (i + 1)..12 {
            if !adjacent(i, j) {
                continue;
            }
            for k in (j + 1)..12 {
                if adjacent(i, k) && adjacent(j, k) {
                    faces.push([i, j, k]);
                }
            }
        }
    }
    debug_assert_eq!(faces.len(), 20);
    (pts, faces)
}

/// Icosahedral triangulation of the unit sphere, subdivided `level` times.
pub fn icosphere(level: u32) -> Result<SimplicialComplex, ComplexError> {
    if level > MAX_LEVEL {
        return Err(ComplexError::InvalidParams(format!(
            "icosphere level {level} exceeds {MAX_LEVEL}"
        )));
    }
    let (pts, faces) = icosahedron_cells();
    let geoms = pts.into_iter().map(VertexGeom::Sphere).collect();
    let cells = CellLists { triangles: faces, ..Default::default() };
    let mut c = SimplicialComplex::from_cells(
        geoms,
        &cells,
        0,
        ChartKind::Sphere,
        format!("builtin:icosphere:level={level}"),
    )?;
    for _ in 0..level {
        c = c.subdivide();
    }
    // Subdividing bumps a subdiv counter; the level is the real identity.
    Ok(SimplicialComplex {
        chart_id: format!("builtin:icosphere:level={level}"),
        ..c
    })
}

/// Index of the antipodal vertex for each vertex of an icosphere. The
/// icosahedron is centrally symmetric and midpoint subdivision preserves the
/// symmetry exactly, so the lookup is exact.
pub fn antipodal_vertex_map(sphere: &SimplicialComplex) -> Vec<usize> {
    let n = sphere.vertex_count();
    let pos = |v: usize| -> [f64; 3] {
        match sphere.vertex_geom(v) {
            VertexGeom::Sphere(p) => *p,
            _ => panic!("not a sphere complex"),
        }
    };
    let mut map = vec![usize::MAX; n];
    let index: BTreeMap<[i64; 3], usize> = (0..n)
        .map(|v| {
            let p = pos(v);
            ([quantize(p[0]), quantize(p[1]), quantize(p[2])], v)
        })
        .collect();
    for v in 0..n {
        let q = antipode(pos(v));
        let key = [quantize(q[0]), quantize(q[1]), quantize(q[2])];
        map[v] = *index.get(&key).expect("icosphere must be antipodally symmetric");
    }
    map
}

fn quantize(x: f64) -> i64 {
    (x * 1e12).round() as i64
}

/// Stacks `layers` prism layers over a sphere triangulation and glues the top
/// to the bottom through `glue`, splitting each prism into three tetrahedra
/// by the global vertex order so adjacent prisms share diagonals.
fn prism_tower(
    sphere: &SimplicialComplex,
    layers: usize,
    glue: &[usize],
    geom: impl Fn(usize, usize) -> VertexGeom,
    chart: ChartKind,
    chart_id: String,
) -> Result<SimplicialComplex, ComplexError> {
    let v = sphere.vertex_count();
    let mut geoms = Vec::with_capacity(layers * v);
    for layer in 0..layers {
        for i in 0..v {
            geoms.push(geom(layer, i));
        }
    }
    let mut cells = CellLists::default();
    for layer in 0..layers {
        let bottom = |i: usize| layer * v + i;
        let top = |i: usize| {
            if layer + 1 < layers {
                (layer + 1) * v + i
            } else {
                glue[i]
            }
        };
        for f in sphere.triangles() {
            let b = [bottom(f[0]), bottom(f[1]), bottom(f[2])];
            let t = [top(f[0]), top(f[1]), top(f[2])];
            cells.tets.push([b[0], b[1], b[2], t[2]]);
            cells.tets.push([b[0], b[1], t[1], t[2]]);
            cells.tets.push([b[0], t[0], t[1], t[2]]);
        }
    }
    SimplicialComplex::from_cells(geoms, &cells, 0, chart, chart_id)
}

/// `S¹ × S²`: `m` circle segments times an icosphere.
pub fn product_circle_sphere(m: usize, level: u32) -> Result<SimplicialComplex, ComplexError> {
    if m < 3 {
        return Err(ComplexError::InvalidParams(format!(
            "product_circle_sphere needs m ≥ 3, got {m}"
        )));
    }
    let sphere = icosphere(level)?;
    let glue: Vec<usize> = (0..sphere.vertex_count()).collect();
    let pos = |i: usize| match sphere.vertex_geom(i) {
        VertexGeom::Sphere(p) => *p,
        _ => unreachable!(),
    };
    prism_tower(
        &sphere,
        m,
        &glue,
        |layer, i| VertexGeom::CircleSphere {
            angle: 2.0 * std::f64::consts::PI * layer as f64 / m as f64,
            sphere: pos(i),
        },
        ChartKind::CircleSphere,
        format!("builtin:product_circle_sphere:m={m}:level={level}"),
    )
}

/// Mapping torus of the sphere under the antipodal map: the quotient of
/// `[0,1] × S²` by `(1, p) ~ (0, −p)`.
pub fn mapping_torus_antipodal(level: u32) -> Result<SimplicialComplex, ComplexError> {
    let sphere = icosphere(level)?;
    let glue = antipodal_vertex_map(&sphere);
    let pos = |i: usize| match sphere.vertex_geom(i) {
        VertexGeom::Sphere(p) => *p,
        _ => unreachable!(),
    };
    prism_tower(
        &sphere,
        TORUS_LAYERS,
        &glue,
        |layer, i| VertexGeom::TorusSphere {
            t: layer as f64 / TORUS_LAYERS as f64,
            sphere: pos(i),
        },
        ChartKind::TorusSphere,
        format!("builtin:mapping_torus_antipodal:level={level}"),
    )
}

/// Resolves a chart identifier like `builtin:circle:m=12:subdiv=1`.
pub fn from_chart_id(id: &str) -> Result<SimplicialComplex, ComplexError> {
    let parts: Vec<&str> = id.split(':').collect();
    if parts.len() < 2 || parts[0] != "builtin" {
        return Err(ComplexError::Format(format!("unrecognized chart id `{id}`")));
    }
    let name = parts[1];
    let mut params: BTreeMap<&str, &str> = BTreeMap::new();
    for p in &parts[2..] {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| ComplexError::Format(format!("bad chart parameter `{p}`")))?;
        params.insert(k, v);
    }
    let get_usize = |key: &str| -> Result<usize, ComplexError> {
        params
            .get(key)
            .ok_or_else(|| ComplexError::Format(format!("chart id `{id}` misses `{key}`")))?
            .parse()
            .map_err(|_| ComplexError::Format(format!("bad `{key}` in `{id}`")))
    };
    let subdiv: u32 = match params.get("subdiv") {
        Some(s) => s
            .parse()
            .map_err(|_| ComplexError::Format(format!("bad subdiv in `{id}`")))?,
        None => 0,
    };
    let mut c = match name {
        "interval" => interval(get_usize("m")?)?,
        "circle" => circle(get_usize("m")?)?,
        "icosphere" => icosphere(get_usize("level")? as u32)?,
        "product_circle_sphere" => {
            product_circle_sphere(get_usize("m")?, get_usize("level")? as u32)?
        }
        "mapping_torus_antipodal" => mapping_torus_antipodal(get_usize("level")? as u32)?,
        other => {
            return Err(ComplexError::Format(format!("unknown builtin complex `{other}`")))
        }
    };
    for _ in 0..subdiv {
        c = c.subdivide();
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::chart::ModelPoint;
    use crate::complexes::Point;

    #[test]
    fn invalid_params_rejected() {
        assert!(circle(2).is_err());
        assert!(interval(1).is_err());
        assert!(icosphere(5).is_err());
        assert!(product_circle_sphere(2, 0).is_err());
    }

    #[test]
    fn antipodal_map_is_an_involution_without_fixed_points() {
        for level in 0..=1 {
            let s = icosphere(level).unwrap();
            let m = antipodal_vertex_map(&s);
            for v in 0..s.vertex_count() {
                assert_ne!(m[v], v);
                assert_eq!(m[m[v]], v);
            }
        }
    }

    #[test]
    fn mapping_torus_counts() {
        let m = mapping_torus_antipodal(0).unwrap();
        assert_eq!(m.vertex_count(), 36);
        assert_eq!(m.tets().len(), 180);
        assert_eq!(m.euler_characteristic(), 0);
    }

    #[test]
    fn product_chi_zero() {
        let p = product_circle_sphere(3, 0).unwrap();
        assert_eq!(p.euler_characteristic(), 0);
    }

    #[test]
    fn torus_chart_glues_seam_exactly() {
        let m = mapping_torus_antipodal(0).unwrap();
        // Find a tetrahedron containing both a level-2 and a level-0 vertex
        // (a seam cell) and evaluate a point of its top face two ways.
        let v = 12; // vertices per sphere copy at level 0
        let seam_tet = m
            .tets()
            .iter()
            .position(|t| t.iter().any(|&x| x < v) && t.iter().any(|&x| x >= 2 * v))
            .expect("seam tetrahedron exists");
        let tet = m.tets()[seam_tet];
        // Barycentric weight only on the level-0 vertices of the tet: the
        // model point must canonicalize to t = 0 with the bottom positions.
        let low: Vec<usize> = (0..4).filter(|&k| tet[k] < v).collect();
        let mut bary = vec![0.0; 4];
        for &k in &low {
            bary[k] = 1.0 / low.len() as f64;
        }
        let p = m.model_point(&Point { simplex: crate::complexes::SimplexRef::Tet(seam_tet), bary });
        match p {
            ModelPoint::TorusSphere { t, .. } => {
                assert!(t.abs() < 1e-12 || (t - 1.0).abs() < 1e-12, "t = {t}");
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn chart_id_round_trip() {
        for id in [
            "builtin:circle:m=12",
            "builtin:interval:m=8",
            "builtin:icosphere:level=1",
            "builtin:icosphere:level=0:subdiv=1",
            "builtin:mapping_torus_antipodal:level=0",
            "builtin:product_circle_sphere:m=4:level=0",
        ] {
            let c = from_chart_id(id).unwrap();
            assert!(c.vertex_count() > 0, "{id}");
        }
        assert!(from_chart_id("builtin:klein_bottle").is_err());
    }
}
