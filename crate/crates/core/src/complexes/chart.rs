//! Geometric charts: per-vertex model coordinates plus seam-aware
//! interpolation from barycentric points to model space.
//!
//! Complexes with a glued direction (circle, product, mapping torus) store
//! canonical coordinates per vertex; a simplex crossing the seam lifts the
//! wrapped vertices before interpolating. For the antipodal mapping torus the
//! lift of a `t = 0` vertex is `(1, −p)`, realizing the gluing
//! `(1, p) ~ (0, antipode(p))` exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Canonical coordinates of one vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum VertexGeom {
    /// Point of a real interval.
    Interval(f64),
    /// Angle on the unit circle, in [0, 2π).
    Angle(f64),
    /// Unit vector in 3-space.
    Sphere([f64; 3]),
    /// Circle angle paired with a sphere point.
    CircleSphere { angle: f64, sphere: [f64; 3] },
    /// Mapping-torus parameter t ∈ [0, 1) paired with a sphere point.
    TorusSphere { t: f64, sphere: [f64; 3] },
}

/// A point of the model space where fields are evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelPoint {
    Interval(f64),
    Circle(Complex64),
    Sphere([f64; 3]),
    CircleSphere { z: Complex64, p: [f64; 3] },
    TorusSphere { t: f64, p: [f64; 3] },
}

impl ModelPoint {
    pub fn kind(&self) -> &'static str {
        match self {
            ModelPoint::Interval(_) => "interval",
            ModelPoint::Circle(_) => "circle",
            ModelPoint::Sphere(_) => "sphere",
            ModelPoint::CircleSphere { .. } => "circle×sphere",
            ModelPoint::TorusSphere { .. } => "mapping torus",
        }
    }
}

/// Which model space the complex charts into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChartKind {
    Interval,
    Circle,
    Sphere,
    CircleSphere,
    TorusSphere,
}

pub fn antipode(p: [f64; 3]) -> [f64; 3] {
    [-p[0], -p[1], -p[2]]
}

pub fn normalize3(p: [f64; 3]) -> [f64; 3] {
    let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    assert!(n > 1e-9, "degenerate sphere interpolation");
    [p[0] / n, p[1] / n, p[2] / n]
}

fn lift_angles(angles: &mut [f64]) {
    let max = angles.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for a in angles.iter_mut() {
        if max - *a > std::f64::consts::PI {
            *a += 2.0 * std::f64::consts::PI;
        }
    }
}

/// Lift torus coordinates within one simplex: vertices at `t = 0` in a
/// simplex that also spans large `t` are moved to `(1, antipode)`.
fn lift_torus(coords: &mut [(f64, [f64; 3])]) {
    let max = coords.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max);
    for c in coords.iter_mut() {
        if max - c.0 > 0.5 {
            c.0 += 1.0;
            c.1 = antipode(c.1);
        }
    }
}

fn lift_circle_sphere(coords: &mut [(f64, [f64; 3])]) {
    let max = coords.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max);
    for c in coords.iter_mut() {
        if max - c.0 > std::f64::consts::PI {
            c.0 += 2.0 * std::f64::consts::PI;
        }
    }
}

/// Barycentric interpolation of vertex geometries into a model point.
///
/// `geoms` are the coordinates of one simplex's vertices, `bary` the
/// nonnegative weights (summing to 1).
pub fn interpolate(kind: ChartKind, geoms: &[&VertexGeom], bary: &[f64]) -> ModelPoint {
    assert_eq!(geoms.len(), bary.len());
    match kind {
        ChartKind::Interval => {
            let x = geoms
                .iter()
                .zip(bary)
                .map(|(g, &b)| match g {
                    VertexGeom::Interval(x) => x * b,
                    _ => panic!("chart kind mismatch"),
                })
                .sum();
            ModelPoint::Interval(x)
        }
        ChartKind::Circle => {
            let mut angles: Vec<f64> = geoms
                .iter()
                .map(|g| match g {
                    VertexGeom::Angle(a) => *a,
                    _ => panic!("chart kind mismatch"),
                })
                .collect();
            lift_angles(&mut angles);
            let theta: f64 = angles.iter().zip(bary).map(|(a, &b)| a * b).sum();
            ModelPoint::Circle(Complex64::from_polar(1.0, theta))
        }
        ChartKind::Sphere => {
            let mut acc = [0.0; 3];
            for (g, &b) in geoms.iter().zip(bary) {
                match g {
                    VertexGeom::Sphere(p) => {
                        for (a, x) in acc.iter_mut().zip(p) {
                            *a += x * b;
                        }
                    }
                    _ => panic!("chart kind mismatch"),
                }
            }
            ModelPoint::Sphere(normalize3(acc))
        }
        ChartKind::CircleSphere => {
            let mut coords: Vec<(f64, [f64; 3])> = geoms
                .iter()
                .map(|g| match g {
                    VertexGeom::CircleSphere { angle, sphere } => (*angle, *sphere),
                    _ => panic!("chart kind mismatch"),
                })
                .collect();
            lift_circle_sphere(&mut coords);
            let theta: f64 = coords.iter().zip(bary).map(|(c, &b)| c.0 * b).sum();
            let mut acc = [0.0; 3];
            for (c, &b) in coords.iter().zip(bary) {
                for (a, x) in acc.iter_mut().zip(&c.1) {
                    *a += x * b;
                }
            }
            ModelPoint::CircleSphere {
                z: Complex64::from_polar(1.0, theta),
                p: normalize3(acc),
            }
        }
        ChartKind::TorusSphere => {
            let mut coords: Vec<(f64, [f64; 3])> = geoms
                .iter()
                .map(|g| match g {
                    VertexGeom::TorusSphere { t, sphere } => (*t, *sphere),
                    _ => panic!("chart kind mismatch"),
                })
                .collect();
            lift_torus(&mut coords);
            let mut t: f64 = coords.iter().zip(bary).map(|(c, &b)| c.0 * b).sum();
            let mut acc = [0.0; 3];
            for (c, &b) in coords.iter().zip(bary) {
                for (a, x) in acc.iter_mut().zip(&c.1) {
                    *a += x * b;
                }
            }
            let mut p = normalize3(acc);
            // Canonicalize the seam: (1, p) and (0, antipode(p)) are the same
            // quotient point.
            if t >= 1.0 {
                t -= 1.0;
                p = antipode(p);
            }
            ModelPoint::TorusSphere { t, p }
        }
    }
}

/// Midpoint of an edge in the chart, as a canonical vertex geometry.
pub fn edge_midpoint(kind: ChartKind, a: &VertexGeom, b: &VertexGeom) -> VertexGeom {
    match (kind, a, b) {
        (ChartKind::Interval, VertexGeom::Interval(x), VertexGeom::Interval(y)) => {
            VertexGeom::Interval(0.5 * (x + y))
        }
        (ChartKind::Circle, VertexGeom::Angle(x), VertexGeom::Angle(y)) => {
            let mut angles = [*x, *y];
            lift_angles(&mut angles);
            let mid = 0.5 * (angles[0] + angles[1]);
            VertexGeom::Angle(mid.rem_euclid(2.0 * std::f64::consts::PI))
        }
        (ChartKind::Sphere, VertexGeom::Sphere(p), VertexGeom::Sphere(q)) => {
            VertexGeom::Sphere(normalize3([p[0] + q[0], p[1] + q[1], p[2] + q[2]]))
        }
        (
            ChartKind::CircleSphere,
            VertexGeom::CircleSphere { angle: a1, sphere: p },
            VertexGeom::CircleSphere { angle: a2, sphere: q },
        ) => {
            let mut coords = [(*a1, *p), (*a2, *q)];
            lift_circle_sphere(&mut coords);
            let mid = 0.5 * (coords[0].0 + coords[1].0);
            let (p, q) = (coords[0].1, coords[1].1);
            VertexGeom::CircleSphere {
                angle: mid.rem_euclid(2.0 * std::f64::consts::PI),
                sphere: normalize3([p[0] + q[0], p[1] + q[1], p[2] + q[2]]),
            }
        }
        (
            ChartKind::TorusSphere,
            VertexGeom::TorusSphere { t: t1, sphere: p },
            VertexGeom::TorusSphere { t: t2, sphere: q },
        ) => {
            let mut coords = [(*t1, *p), (*t2, *q)];
            lift_torus(&mut coords);
            let mut t = 0.5 * (coords[0].0 + coords[1].0);
            let (p, q) = (coords[0].1, coords[1].1);
            let mut s = normalize3([p[0] + q[0], p[1] + q[1], p[2] + q[2]]);
            if t >= 1.0 {
                t -= 1.0;
                s = antipode(s);
            }
            VertexGeom::TorusSphere { t, sphere: s }
        }
        _ => panic!("chart kind mismatch in edge midpoint"),
    }
}

/// Homogeneous coordinates of a sphere point under the standard
/// identification of the 2-sphere with the complex projective line: a point
/// `(x, y, z)` maps to the line spanned by `(1+z, x+iy)` (or the equivalent
/// representative `(x−iy, 1−z)` near the south pole). The antipodal map
/// corresponds to passing to the orthogonal complement line.
pub fn sphere_to_homogeneous(p: [f64; 3]) -> (Complex64, Complex64) {
    let [x, y, z] = p;
    let (z1, z2) = if z >= 0.0 {
        (Complex64::new(1.0 + z, 0.0), Complex64::new(x, y))
    } else {
        (Complex64::new(x, -y), Complex64::new(1.0 - z, 0.0))
    };
    let norm = (z1.norm_sqr() + z2.norm_sqr()).sqrt();
    (z1 / norm, z2 / norm)
}

/// Inverse of [`sphere_to_homogeneous`]: the sphere point of the line
/// spanned by `(z1, z2)`.
pub fn homogeneous_to_sphere(z1: Complex64, z2: Complex64) -> [f64; 3] {
    let n = z1.norm_sqr() + z2.norm_sqr();
    assert!(n > 1e-18, "degenerate homogeneous coordinates");
    let w = z1.conj() * z2;
    [2.0 * w.re / n, 2.0 * w.im / n, (z1.norm_sqr() - z2.norm_sqr()) / n]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homogeneous_round_trip() {
        let pts = [
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
            [1.0, 0.0, 0.0],
            [0.6, 0.48, 0.64],
            [-0.6, 0.48, -0.64],
        ];
        for p in pts {
            let p = normalize3(p);
            let (z1, z2) = sphere_to_homogeneous(p);
            let q = homogeneous_to_sphere(z1, z2);
            for (a, b) in p.iter().zip(&q) {
                assert!((a - b).abs() < 1e-12, "{p:?} vs {q:?}");
            }
        }
    }

    #[test]
    fn antipode_is_orthogonal_complement() {
        // ⟨hom(p), hom(−p)⟩ = 0 under the Hermitian inner product.
        let pts = [[0.6, 0.48, 0.64], [0.1, -0.99, 0.05], [0.0, 1.0, 0.0]];
        for p in pts {
            let p = normalize3(p);
            let (a1, a2) = sphere_to_homogeneous(p);
            let (b1, b2) = sphere_to_homogeneous(antipode(p));
            let ip = a1.conj() * b1 + a2.conj() * b2;
            assert!(ip.norm() < 1e-12, "not orthogonal at {p:?}");
        }
    }

    #[test]
    fn angle_lift_crosses_the_wrap() {
        let g1 = VertexGeom::Angle(0.0);
        let g2 = VertexGeom::Angle(2.0 * std::f64::consts::PI * 11.0 / 12.0);
        let p = interpolate(ChartKind::Circle, &[&g1, &g2], &[0.5, 0.5]);
        // Midpoint must sit near angle 23π/12, not near π/2 · 11/12.
        match p {
            ModelPoint::Circle(z) => {
                let expect = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 23.0 / 24.0);
                assert!((z - expect).norm() < 1e-12);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn torus_seam_lift_glues_antipodally() {
        let bottom = VertexGeom::TorusSphere { t: 0.0, sphere: [0.0, 0.0, 1.0] };
        let upper = VertexGeom::TorusSphere { t: 2.0 / 3.0, sphere: [0.0, 0.0, -1.0] };
        // A point 3/4 of the way up the seam edge: t = (2/3)·(1/4) + 1·(3/4).
        let p = interpolate(ChartKind::TorusSphere, &[&upper, &bottom], &[0.25, 0.75]);
        match p {
            ModelPoint::TorusSphere { t, p } => {
                assert!((t - (2.0 / 3.0 * 0.25 + 0.75)).abs() < 1e-12);
                // Bottom vertex is lifted to (1, antipode([0,0,1])) = (1, [0,0,-1]),
                // matching the upper vertex's sphere position.
                assert!((p[2] + 1.0).abs() < 1e-12);
            }
            _ => unreachable!(),
        }
        // Weight all on the lifted bottom vertex: canonicalizes back to t = 0.
        let q = interpolate(ChartKind::TorusSphere, &[&upper, &bottom], &[0.0, 1.0]);
        match q {
            ModelPoint::TorusSphere { t, p } => {
                assert!(t.abs() < 1e-12);
                assert!((p[2] - 1.0).abs() < 1e-12);
            }
            _ => unreachable!(),
        }
    }
}
