//! The obstruction pipeline: gauge choices over the 0-skeleton, link phases
//! over edges, integer winding numbers over 2-cells, and the vanishing
//! decision in twisted cohomology.
//!
//! Per 2-cell and eigenvalue label, the signed sum of link-phase arguments
//! around the boundary loop is a near-multiple of 2π; its rounding is the
//! obstruction cochain value and the rounding residual measures
//! discretization quality. Residuals below a quarter cycle make the integer
//! unambiguous and force the cocycle identity to hold exactly on
//! tetrahedra.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cohomology::{CoefficientSystem, CohomologyGroup, TwistedCochain, TwistedComplex};
use crate::complexes::{builders, ChartKind, Point, SimplicialComplex, SpanningTree, VertexGeom};
use crate::error::ObstructionError;
use crate::fields::{
    check_admissible, char_poly_mismatch, evaluate, AdmissibilityReport, MatrixField,
};
use crate::matrix::{fix_phase, operator_norm, phase, spectral_decompose, CMat, CVec};
use crate::monodromy::{build_local_system, pi1_rep, refine_edge, LocalSystem, Pi1Representation};
use crate::tol::Tolerances;

/// Global orientation constant: fixed once so that the obstruction of
/// (diag(0,1), tautological-line projection) on the outward-oriented
/// icosphere pairs to (+1, −1); all other signs follow. With the outward
/// fundamental cycle and the canonical eigenvalue order the raw winding
/// pairing comes out negated, hence the −1.
const ORIENT_SIGN: i64 = -1;

/// Unit eigenvectors per vertex, in canonical eigenvalue order, with the
/// deterministic leading-coordinate phase convention.
#[derive(Debug, Clone)]
pub struct Gauge {
    /// Eigenvalues at the basepoint, canonically ordered.
    pub base_eigenvalues: Vec<Complex64>,
    /// `a_vecs[v][i]`: eigenvector of the first field at vertex `v`.
    pub a_vecs: Vec<Vec<CVec>>,
    /// Same for the second field.
    pub b_vecs: Vec<Vec<CVec>>,
}

impl Gauge {
    /// Applies independent random unit phases to every gauge vector; the
    /// obstruction class must not move.
    pub fn regauged(&self, rng: &mut impl rand::Rng) -> Gauge {
        let mut spin = |vecs: &Vec<Vec<CVec>>| -> Vec<Vec<CVec>> {
            vecs.iter()
                .map(|per_vertex| {
                    per_vertex
                        .iter()
                        .map(|v| {
                            let theta =
                                rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
                            let z = Complex64::from_polar(1.0, theta);
                            v.map(|x| x * z)
                        })
                        .collect()
                })
                .collect()
        };
        let a_vecs = spin(&self.a_vecs);
        let b_vecs = spin(&self.b_vecs);
        Gauge { base_eigenvalues: self.base_eigenvalues.clone(), a_vecs, b_vecs }
    }
}

fn vertex_eigenvectors(
    f: &MatrixField,
    c: &SimplicialComplex,
    tol: &Tolerances,
) -> Result<Vec<Vec<CVec>>, ObstructionError> {
    (0..c.vertex_count())
        .into_par_iter()
        .map(|v| {
            let m = evaluate(f, c, &Point::vertex(v)).map_err(ObstructionError::Field)?;
            let sd = spectral_decompose(&m, tol).map_err(ObstructionError::Matrix)?;
            Ok(sd.eigenvectors.iter().map(fix_phase).collect())
        })
        .collect()
}

/// Chooses the gauge: eigenvectors of both fields at every vertex, phases
/// fixed by the deterministic convention, indices in canonical order.
pub fn choose_gauge(
    a: &MatrixField,
    b: &MatrixField,
    c: &SimplicialComplex,
    tol: &Tolerances,
) -> Result<Gauge, ObstructionError> {
    let ma = evaluate(a, c, &Point::vertex(c.basepoint())).map_err(ObstructionError::Field)?;
    let base = spectral_decompose(&ma, tol).map_err(ObstructionError::Matrix)?;
    Ok(Gauge {
        base_eigenvalues: base.eigenvalues,
        a_vecs: vertex_eigenvectors(a, c, tol)?,
        b_vecs: vertex_eigenvectors(b, c, tol)?,
    })
}

/// Unit link phases per edge, indexed by the canonical eigenvalue index at
/// the edge's tail. The reverse direction carries conjugates by definition.
#[derive(Debug, Clone)]
pub struct LinkData {
    /// Transport overlap phases of the first field's eigenlines.
    pub alpha: Vec<Vec<Complex64>>,
    /// Same for the second field.
    pub beta: Vec<Vec<Complex64>>,
    /// Hom-line links `η_i = β_i · conj(α_i)`.
    pub eta: Vec<Vec<Complex64>>,
}

/// Transports each gauge eigenline of `f` along one edge by stepwise
/// projection and returns the overlap phase against the head gauge vector.
fn edge_link_phases(
    f: &MatrixField,
    vecs: &[Vec<CVec>],
    c: &SimplicialComplex,
    ls: &LocalSystem,
    edge: usize,
    tol: &Tolerances,
) -> Result<Vec<Complex64>, ObstructionError> {
    let refinement = refine_edge(f, c, edge, tol).map_err(ObstructionError::Monodromy)?;
    if refinement.composite != *ls.forward(edge) {
        return Err(ObstructionError::SystemMismatch(edge));
    }
    let [tail, head] = c.edges()[edge];
    let n = f.n;
    let mut links = Vec::with_capacity(n);
    for i in 0..n {
        let mut w = vecs[tail][i].clone();
        let mut idx = i;
        for (j, step_perm) in refinement.perms.iter().enumerate() {
            idx = step_perm.apply(idx);
            let p = &refinement.spectra[j + 1].projections[idx];
            let projected = p * &w;
            let norm = projected.norm();
            if norm < tol.overlap_min {
                return Err(ObstructionError::DegenerateOverlap { edge, overlap: norm });
            }
            w = projected.unscale(norm);
        }
        let overlap = (vecs[head][idx].adjoint() * &w)[(0, 0)];
        if overlap.norm() < tol.overlap_min {
            return Err(ObstructionError::DegenerateOverlap { edge, overlap: overlap.norm() });
        }
        links.push(phase(overlap));
    }
    Ok(links)
}

/// Computes all link phases for a gauged pair.
pub fn link_phases(
    a: &MatrixField,
    b: &MatrixField,
    gauge: &Gauge,
    c: &SimplicialComplex,
    ls: &LocalSystem,
    tol: &Tolerances,
) -> Result<LinkData, ObstructionError> {
    let per_edge: Result<Vec<(Vec<Complex64>, Vec<Complex64>)>, ObstructionError> = (0..c
        .edges()
        .len())
        .into_par_iter()
        .map(|e| {
            let alpha = edge_link_phases(a, &gauge.a_vecs, c, ls, e, tol)?;
            let beta = edge_link_phases(b, &gauge.b_vecs, c, ls, e, tol)?;
            Ok((alpha, beta))
        })
        .collect();
    let per_edge = per_edge?;
    let mut alpha = Vec::with_capacity(per_edge.len());
    let mut beta = Vec::with_capacity(per_edge.len());
    let mut eta = Vec::with_capacity(per_edge.len());
    for (al, be) in per_edge {
        let et = al.iter().zip(&be).map(|(x, y)| y * x.conj()).collect();
        alpha.push(al);
        beta.push(be);
        eta.push(et);
    }
    Ok(LinkData { alpha, beta, eta })
}

/// Integer 2-cochain of winding numbers plus the worst rounding residual.
#[derive(Debug, Clone)]
pub struct ObstructionCochain {
    pub cochain: TwistedCochain,
    pub residual_max: f64,
}

/// Rounds the per-cell signed sums of link-phase arguments into an integer
/// cochain, walking each boundary loop with index transport.
pub fn winding_cochain(
    c: &SimplicialComplex,
    ls: &LocalSystem,
    links: &[Vec<Complex64>],
    tol: &Tolerances,
) -> Result<ObstructionCochain, ObstructionError> {
    let n = ls.n;
    let bd = c.boundary_data();
    let mut values = vec![0i64; c.triangles().len() * n];
    let mut residual_max: f64 = 0.0;
    for (s, lp) in bd.loops.iter().enumerate() {
        for i in 0..n {
            let mut idx = i;
            let mut total = 0.0;
            for step in &lp.steps {
                if step.forward {
                    total += links[step.edge][idx].arg();
                    idx = ls.forward(step.edge).apply(idx);
                } else {
                    let back = ls.forward(step.edge).inverse().apply(idx);
                    total -= links[step.edge][back].arg();
                    idx = back;
                }
            }
            if idx != i {
                return Err(ObstructionError::LoopComposite(s));
            }
            let w = total / (2.0 * std::f64::consts::PI);
            let rounded = w.round();
            let residual = (w - rounded).abs();
            residual_max = residual_max.max(residual);
            if residual >= tol.residual_max {
                return Err(ObstructionError::ResidualTooLarge {
                    cell: s,
                    residual,
                    max: tol.residual_max,
                    retries: 0,
                });
            }
            values[s * n + i] = rounded as i64;
        }
    }
    Ok(ObstructionCochain {
        cochain: TwistedCochain { degree: 2, n, values },
        residual_max,
    })
}

/// Coherent orientation of a closed surface complex: ±1 per triangle with
/// zero total boundary. For sphere charts the global sign is normalized to
/// the outward orientation; otherwise the lowest-index triangle is positive.
pub fn fundamental_cycle(c: &SimplicialComplex) -> Option<Vec<i64>> {
    if !c.tets().is_empty() || c.triangles().is_empty() {
        return None;
    }
    let nf = c.triangles().len();
    // edge -> incident (triangle, incidence sign)
    let mut incident: Vec<Vec<(usize, i64)>> = vec![Vec::new(); c.edges().len()];
    for (s, f) in c.triangles().iter().enumerate() {
        for (edge, inc) in [
            ([f[1], f[2]], 1i64),
            ([f[0], f[2]], -1i64),
            ([f[0], f[1]], 1i64),
        ] {
            incident[c.edge_index(edge).unwrap()].push((s, inc));
        }
    }
    if incident.iter().any(|v| v.len() != 2) {
        return None;
    }
    let mut eps = vec![0i64; nf];
    eps[0] = 1;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        let f = c.triangles()[s];
        for (edge, inc) in [
            ([f[1], f[2]], 1i64),
            ([f[0], f[2]], -1i64),
            ([f[0], f[1]], 1i64),
        ] {
            let e = c.edge_index(edge).unwrap();
            for &(t, tinc) in &incident[e] {
                if t == s {
                    continue;
                }
                let required = -eps[s] * inc * tinc;
                if eps[t] == 0 {
                    eps[t] = required;
                    queue.push_back(t);
                } else if eps[t] != required {
                    return None;
                }
            }
        }
    }
    if eps.iter().any(|&x| x == 0) {
        return None;
    }
    // The cycle must be an exact integer 2-cycle.
    let bd = c.boundary_data();
    for r in 0..c.edges().len() {
        let total: i64 = (0..nf).map(|s| bd.d2.get(r, s) * eps[s]).sum();
        if total != 0 {
            return None;
        }
    }
    // Outward normalization on sphere charts: positive signed volume.
    if c.chart_kind() == ChartKind::Sphere {
        let pos = |v: usize| match c.vertex_geom(v) {
            VertexGeom::Sphere(p) => *p,
            _ => unreachable!(),
        };
        let mut vol = 0.0;
        for (s, f) in c.triangles().iter().enumerate() {
            let (a, b, d) = (pos(f[0]), pos(f[1]), pos(f[2]));
            let det = a[0] * (b[1] * d[2] - b[2] * d[1]) - a[1] * (b[0] * d[2] - b[2] * d[0])
                + a[2] * (b[0] * d[1] - b[1] * d[0]);
            vol += eps[s] as f64 * det;
        }
        if vol < 0.0 {
            for e in eps.iter_mut() {
                *e = -*e;
            }
        }
    }
    Some(eps)
}

/// Pairs a degree-2 cochain with the fundamental cycle, transporting every
/// block to the basepoint along tree paths. Requires a globally split system
/// so the transport is path independent.
pub fn pair_with_fundamental_cycle(
    c: &SimplicialComplex,
    ls: &LocalSystem,
    tree: &SpanningTree,
    cochain: &TwistedCochain,
) -> Option<Vec<i64>> {
    let eps = fundamental_cycle(c)?;
    let n = cochain.n;
    let mut out = vec![0i64; n];
    for (s, f) in c.triangles().iter().enumerate() {
        let path = LocalSystem::tree_path_to_root(tree, f[0]);
        let perm = ls.transport_along_path(c, &path);
        let block = cochain.block(s);
        for i in 0..n {
            out[perm.apply(i)] += eps[s] * block[i];
        }
    }
    for x in out.iter_mut() {
        *x *= ORIENT_SIGN;
    }
    Some(out)
}

/// Everything the pipeline produces for one pair of fields.
pub struct PairAnalysis {
    /// The complex actually used (subdivided when residuals demanded it).
    pub complex: SimplicialComplex,
    pub subdivisions: u32,
    pub admissible_a: AdmissibilityReport,
    pub admissible_b: AdmissibilityReport,
    pub char_poly_mismatch: f64,
    pub ls: LocalSystem,
    pub tree: SpanningTree,
    pub rep: Pi1Representation,
    pub gauge: Gauge,
    pub links: LinkData,
    pub obstruction: ObstructionCochain,
    pub h2: CohomologyGroup,
    /// Primitive `g` with `δg = θ`, present exactly when the class vanishes.
    pub primitive: Option<TwistedCochain>,
    /// Fundamental-cycle pairing of θ, for split systems on closed surfaces.
    pub rebased_class: Option<Vec<i64>>,
}

impl PairAnalysis {
    pub fn vanishing(&self) -> bool {
        self.primitive.is_some()
    }
}

/// Admissibility, transport, gauge, and winding data for one pair —
/// everything before the integer linear algebra.
struct PairGeometry {
    admissible_a: AdmissibilityReport,
    admissible_b: AdmissibilityReport,
    char_poly_mismatch: f64,
    ls: LocalSystem,
    tree: SpanningTree,
    rep: Pi1Representation,
    gauge: Gauge,
    links: LinkData,
    obstruction: ObstructionCochain,
}

fn pair_geometry(
    a: &MatrixField,
    b: &MatrixField,
    c: &SimplicialComplex,
    tol: &Tolerances,
) -> Result<PairGeometry, ObstructionError> {
    let admissible_a = check_admissible(a, c, tol.samples_per_simplex, tol)
        .map_err(ObstructionError::Field)?;
    let admissible_b = check_admissible(b, c, tol.samples_per_simplex, tol)
        .map_err(ObstructionError::Field)?;
    if !admissible_a.pass {
        return Err(ObstructionError::Inadmissible(format!(
            "field `{}`: {}",
            a.label,
            admissible_a.worst.clone().unwrap_or_default()
        )));
    }
    if !admissible_b.pass {
        return Err(ObstructionError::Inadmissible(format!(
            "field `{}`: {}",
            b.label,
            admissible_b.worst.clone().unwrap_or_default()
        )));
    }
    let mismatch = char_poly_mismatch(a, b, c, tol.samples_per_simplex)
        .map_err(ObstructionError::Field)?;
    if mismatch > tol.char_poly {
        return Err(ObstructionError::CharPolyMismatch(mismatch));
    }

    // Local system from the first field, cross-validated against the second.
    let ls = build_local_system(a, c, tol).map_err(ObstructionError::Monodromy)?;
    let ls_b = build_local_system(b, c, tol).map_err(ObstructionError::Monodromy)?;
    if ls != ls_b {
        let bad = (0..c.edges().len())
            .find(|&e| ls.forward(e) != ls_b.forward(e))
            .unwrap_or(0);
        return Err(ObstructionError::SystemMismatch(bad));
    }

    let tree = c.spanning_tree();
    let rep = pi1_rep(&ls, c, &tree);
    let gauge = choose_gauge(a, b, c, tol)?;
    let links = link_phases(a, b, &gauge, c, &ls, tol)?;
    let obstruction = winding_cochain(c, &ls, &links.eta, tol)?;
    Ok(PairGeometry {
        admissible_a,
        admissible_b,
        char_poly_mismatch: mismatch,
        ls,
        tree,
        rep,
        gauge,
        links,
        obstruction,
    })
}

fn decide(
    geom: PairGeometry,
    tc: &TwistedComplex,
    c: &SimplicialComplex,
) -> Result<PairAnalysis, ObstructionError> {
    if !tc.is_cocycle(&geom.obstruction.cochain) {
        // Never silently passed: a failed cocycle check is a bug or an
        // invalid system.
        return Err(ObstructionError::Cohomology(
            crate::error::CohomologyError::NotACocycle(0),
        ));
    }
    let h2 = tc.cohomology_group(2);
    let primitive = tc
        .is_coboundary(&geom.obstruction.cochain)
        .map_err(ObstructionError::Cohomology)?;
    let rebased_class = if geom.rep.is_globally_split() {
        pair_with_fundamental_cycle(c, &geom.ls, &geom.tree, &geom.obstruction.cochain)
    } else {
        None
    };
    Ok(PairAnalysis {
        complex: c.clone(),
        subdivisions: 0,
        admissible_a: geom.admissible_a,
        admissible_b: geom.admissible_b,
        char_poly_mismatch: geom.char_poly_mismatch,
        ls: geom.ls,
        tree: geom.tree,
        rep: geom.rep,
        gauge: geom.gauge,
        links: geom.links,
        obstruction: geom.obstruction,
        h2,
        primitive,
        rebased_class,
    })
}

/// Runs the pipeline on a fixed complex, without subdivision retries.
pub fn analyze_pair_on(
    a: &MatrixField,
    b: &MatrixField,
    c: &SimplicialComplex,
    tol: &Tolerances,
) -> Result<PairAnalysis, ObstructionError> {
    let geom = pair_geometry(a, b, c, tol)?;
    let coeff = CoefficientSystem::from_local_system(&geom.ls, c);
    let tc = TwistedComplex::new(c, coeff).map_err(ObstructionError::Cohomology)?;
    decide(geom, &tc, c)
}

/// Like [`analyze_pair_on`], reusing a caller-held twisted complex so its
/// cached Smith normal forms amortize over many pairs. The pair's local
/// system must induce the same coefficient system.
pub fn analyze_pair_with(
    a: &MatrixField,
    b: &MatrixField,
    c: &SimplicialComplex,
    tc: &TwistedComplex,
    tol: &Tolerances,
) -> Result<PairAnalysis, ObstructionError> {
    let geom = pair_geometry(a, b, c, tol)?;
    if CoefficientSystem::from_local_system(&geom.ls, c) != tc.coeff {
        return Err(ObstructionError::SystemMismatch(0));
    }
    decide(geom, tc, c)
}

/// Full pipeline with automatic subdivision retries on excessive winding
/// residuals or inconsistent transport.
pub fn analyze_pair(
    a: &MatrixField,
    b: &MatrixField,
    c: &SimplicialComplex,
    tol: &Tolerances,
) -> Result<PairAnalysis, ObstructionError> {
    let mut current = c.clone();
    let mut last_err = None;
    for attempt in 0..=tol.max_subdiv_retries {
        match analyze_pair_on(a, b, &current, tol) {
            Ok(mut analysis) => {
                analysis.subdivisions = attempt;
                return Ok(analysis);
            }
            Err(
                e @ (ObstructionError::ResidualTooLarge { .. }
                | ObstructionError::Monodromy(
                    crate::error::MonodromyError::InconsistentSystem { .. },
                )),
            ) => {
                last_err = Some(match e {
                    ObstructionError::ResidualTooLarge { cell, residual, max, .. } => {
                        ObstructionError::ResidualTooLarge { cell, residual, max, retries: attempt }
                    }
                    other => other,
                });
                if attempt < tol.max_subdiv_retries {
                    current = current.subdivide();
                }
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("loop ran at least once"))
}

/// Lattice Chern numbers of the eigenline bundles of a globally split field
/// over a closed oriented surface.
pub fn chern_numbers(
    f: &MatrixField,
    c: &SimplicialComplex,
    tol: &Tolerances,
) -> Result<Vec<i64>, ObstructionError> {
    let adm = check_admissible(f, c, tol.samples_per_simplex, tol)
        .map_err(ObstructionError::Field)?;
    if !adm.pass {
        return Err(ObstructionError::Inadmissible(format!(
            "field `{}`: {}",
            f.label,
            adm.worst.clone().unwrap_or_default()
        )));
    }
    let ls = build_local_system(f, c, tol).map_err(ObstructionError::Monodromy)?;
    let tree = c.spanning_tree();
    let rep = pi1_rep(&ls, c, &tree);
    if !rep.is_globally_split() {
        return Err(ObstructionError::NotSplit);
    }
    let vecs = vertex_eigenvectors(f, c, tol)?;
    let links: Result<Vec<Vec<Complex64>>, ObstructionError> = (0..c.edges().len())
        .into_par_iter()
        .map(|e| edge_link_phases(f, &vecs, c, &ls, e, tol))
        .collect();
    let winding = winding_cochain(c, &ls, &links?, tol)?;
    pair_with_fundamental_cycle(c, &ls, &tree, &winding.cochain)
        .ok_or(ObstructionError::NoFundamentalCycle)
}

/// Certificate for a synthesized intertwiner.
#[derive(Debug, Clone, serde::Serialize)]
pub struct IntertwinerCertificate {
    /// Worst `‖U(v) A(v) U(v)* − B(v)‖` over vertices.
    pub max_vertex_defect: f64,
    /// Worst `|1 − η'|` over non-tree edges after absorbing tree phases.
    pub max_edge_defect: f64,
    pub vertices: usize,
    /// Largest absolute entry of the primitive used for the correction.
    pub primitive_linf: i64,
}

/// Builds per-vertex unitaries from the gauge and certifies them. Needs a
/// vanishing class (a primitive).
pub fn synthesize_intertwiner(
    a: &MatrixField,
    b: &MatrixField,
    analysis: &PairAnalysis,
    tol: &Tolerances,
) -> Result<(Vec<CMat>, IntertwinerCertificate), ObstructionError> {
    let Some(primitive) = &analysis.primitive else {
        return Err(ObstructionError::NoPrimitive);
    };
    let c = &analysis.complex;
    let gauge = &analysis.gauge;
    let n = gauge.base_eigenvalues.len();

    let mut unitaries = Vec::with_capacity(c.vertex_count());
    let mut max_vertex_defect: f64 = 0.0;
    for v in 0..c.vertex_count() {
        let mut u = CMat::zeros(n, n);
        for i in 0..n {
            u += &gauge.b_vecs[v][i] * gauge.a_vecs[v][i].adjoint();
        }
        let ma = evaluate(a, c, &Point::vertex(v)).map_err(ObstructionError::Field)?;
        let mb = evaluate(b, c, &Point::vertex(v)).map_err(ObstructionError::Field)?;
        let defect = operator_norm(&(&u * ma * u.adjoint() - mb));
        max_vertex_defect = max_vertex_defect.max(defect);
        unitaries.push(u);
    }
    if max_vertex_defect > tol.intertwiner {
        return Err(ObstructionError::Inadmissible(format!(
            "synthesized intertwiner defect {max_vertex_defect:.3e} exceeds {:.1e}",
            tol.intertwiner
        )));
    }

    // Absorb tree-edge phases into per-vertex corrections, then report the
    // worst remaining defect on non-tree edges.
    let tree = &analysis.tree;
    let ls = &analysis.ls;
    let mut z: Vec<Vec<Complex64>> =
        vec![vec![Complex64::new(1.0, 0.0); n]; c.vertex_count()];
    for &v in &tree.order {
        let Some(u) = tree.parent[v] else { continue };
        let e = tree.parent_edge[v].unwrap();
        let forward = c.edges()[e][0] == u;
        for i in 0..n {
            if forward {
                // u is the canonical tail: index i at u maps to ρ(i) at v.
                let j = ls.forward(e).apply(i);
                z[v][j] = analysis.links.eta[e][i] * z[u][i];
            } else {
                // u is the canonical head: index i at u comes from ρ⁻¹(i).
                let j = ls.forward(e).inverse().apply(i);
                z[v][j] = analysis.links.eta[e][j].conj() * z[u][i];
            }
        }
    }
    let mut max_edge_defect: f64 = 0.0;
    for e in 0..c.edges().len() {
        if tree.tree_edges.contains(&e) {
            continue;
        }
        let [tail, head] = c.edges()[e];
        for i in 0..n {
            let j = ls.forward(e).apply(i);
            let corrected = analysis.links.eta[e][i] * z[tail][i] * z[head][j].conj();
            max_edge_defect =
                max_edge_defect.max((corrected - Complex64::new(1.0, 0.0)).norm());
        }
    }

    let primitive_linf = primitive.values.iter().map(|x| x.abs()).max().unwrap_or(0);
    Ok((
        unitaries,
        IntertwinerCertificate {
            max_vertex_defect,
            max_edge_defect,
            vertices: c.vertex_count(),
            primitive_linf,
        },
    ))
}

/// Outcome of the transposition/additivity relation checks for one triple.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RelationReport {
    pub theta_aa_zero: bool,
    /// `[θ(B,A)] = −[θ(A,B)]` at class level.
    pub antisymmetry: bool,
    /// `[θ(A,B)] + [θ(B,C)] = [θ(A,C)]` at class level.
    pub additivity: bool,
    /// Pairing vectors when the system splits over a closed surface.
    pub pairing_ab: Option<Vec<i64>>,
    pub pairing_bc: Option<Vec<i64>>,
    pub pairing_ac: Option<Vec<i64>>,
}

impl RelationReport {
    pub fn all_hold(&self) -> bool {
        self.theta_aa_zero && self.antisymmetry && self.additivity
    }
}

/// Verifies the transposition and additivity relations for a triple of
/// fields with a common characteristic polynomial, all on one complex.
pub fn verify_relations(
    a: &MatrixField,
    b: &MatrixField,
    cf: &MatrixField,
    c: &SimplicialComplex,
    tol: &Tolerances,
) -> Result<RelationReport, ObstructionError> {
    let geom_ab = pair_geometry(a, b, c, tol)?;
    let coeff = CoefficientSystem::from_local_system(&geom_ab.ls, c);
    let tc = TwistedComplex::new(c, coeff).map_err(ObstructionError::Cohomology)?;
    let ab = decide(geom_ab, &tc, c)?;
    let ba = analyze_pair_with(b, a, c, &tc, tol)?;
    let bc = analyze_pair_with(b, cf, c, &tc, tol)?;
    let ac = analyze_pair_with(a, cf, c, &tc, tol)?;
    let aa = analyze_pair_with(a, a, c, &tc, tol)?;

    let antisymmetry = tc
        .is_coboundary(&ab.obstruction.cochain.add(&ba.obstruction.cochain))
        .map_err(ObstructionError::Cohomology)?
        .is_some();
    let sum = ab.obstruction.cochain.add(&bc.obstruction.cochain);
    let additivity = tc
        .classes_equal(&sum, &ac.obstruction.cochain)
        .map_err(ObstructionError::Cohomology)?;
    Ok(RelationReport {
        theta_aa_zero: aa.obstruction.cochain.is_zero(),
        antisymmetry,
        additivity,
        pairing_ab: ab.rebased_class.clone(),
        pairing_bc: bc.rebased_class.clone(),
        pairing_ac: ac.rebased_class.clone(),
    })
}

/// Restriction of a pair of mapping-torus fields to the fiber sphere
/// `{t = 0}`: pulls both back along the inclusion and analyzes them over an
/// icosphere of the given level.
pub fn restrict_to_fiber(
    a: &MatrixField,
    b: &MatrixField,
    level: u32,
    tol: &Tolerances,
) -> Result<PairAnalysis, ObstructionError> {
    let sphere = builders::icosphere(level).map_err(ObstructionError::Complex)?;
    let ra = crate::fields::pullback(
        a,
        crate::fields::torus_fiber_inclusion(0.0),
        format!("{}|t=0", a.label),
    );
    let rb = crate::fields::pullback(
        b,
        crate::fields::torus_fiber_inclusion(0.0),
        format!("{}|t=0", b.label),
    );
    analyze_pair(&ra, &rb, &sphere, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::builders;
    use crate::fields::{field_from_str, pullback, sphere_power_map};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn same_field_gives_zero_cochain() {
        let f = field_from_str("builtin:root_swap_circle").unwrap();
        let c = builders::circle(12).unwrap();
        let analysis = analyze_pair(&f, &f, &c, &tol()).unwrap();
        assert!(analysis.obstruction.cochain.is_zero());
        assert!(analysis.obstruction.residual_max < 1e-12);
        assert!(analysis.vanishing());
    }

    #[test]
    fn circle_pair_is_equivalent_with_certificate() {
        let f = field_from_str("builtin:root_swap_circle").unwrap();
        let g = field_from_str("builtin:conjugated:seed=5:of=root_swap_circle").unwrap();
        let c = builders::circle(12).unwrap();
        let analysis = analyze_pair(&f, &g, &c, &tol()).unwrap();
        assert!(!analysis.rep.is_globally_split());
        assert!(analysis.h2.is_trivial());
        assert!(analysis.vanishing());
        let (us, cert) = synthesize_intertwiner(&f, &g, &analysis, &tol()).unwrap();
        assert_eq!(us.len(), 12);
        assert!(cert.max_vertex_defect <= 1e-6, "defect {}", cert.max_vertex_defect);
    }

    #[test]
    fn chern_ladder_on_icosphere() {
        let c = builders::icosphere(1).unwrap();
        let d = field_from_str("builtin:diag_const:vals=0,1").unwrap();
        for k in -2i64..=2 {
            let p = field_from_str(&format!("builtin:cp1_projection:k={k}")).unwrap();
            let analysis = analyze_pair(&d, &p, &c, &tol()).unwrap();
            assert_eq!(
                analysis.rebased_class,
                Some(vec![k, -k]),
                "class of (D, P_{k})"
            );
            assert_eq!(analysis.vanishing(), k == 0, "vanishing iff k = 0");
            let chern = chern_numbers(&p, &c, &tol()).unwrap();
            let chern_d = chern_numbers(&d, &c, &tol()).unwrap();
            assert_eq!(chern_d, vec![0, 0]);
            assert_eq!(chern, vec![k, -k], "chern numbers of P_{k}");
        }
    }

    #[test]
    fn chern_numbers_sum_to_zero_for_split_fields() {
        let c = builders::icosphere(1).unwrap();
        for k in [-2i64, 1, 3] {
            let p = field_from_str(&format!("builtin:cp1_projection:k={k}")).unwrap();
            let chern = chern_numbers(&p, &c, &tol()).unwrap();
            assert_eq!(chern.iter().sum::<i64>(), 0);
        }
    }

    #[test]
    fn chern_rejects_nonsplit() {
        let f = field_from_str("builtin:root_swap_circle").unwrap();
        let c = builders::circle(12).unwrap();
        assert!(matches!(
            chern_numbers(&f, &c, &tol()),
            Err(ObstructionError::NotSplit | ObstructionError::NoFundamentalCycle)
        ));
    }

    #[test]
    fn conjugated_diag_pair_vanishes_and_synthesizes() {
        let d = field_from_str("builtin:diag_const:vals=0,1").unwrap();
        let g = field_from_str("builtin:conjugated:seed=9:of=diag_const:vals=0,1").unwrap();
        let c = builders::icosphere(0).unwrap();
        let analysis = analyze_pair(&d, &g, &c, &tol()).unwrap();
        assert!(analysis.vanishing());
        assert_eq!(analysis.rebased_class, Some(vec![0, 0]));
        let (_, cert) = synthesize_intertwiner(&d, &g, &analysis, &tol()).unwrap();
        assert!(cert.max_vertex_defect <= 1e-6);
    }

    #[test]
    fn mapping_torus_pair_does_not_vanish() {
        let a = field_from_str("builtin:twisted_a").unwrap();
        let b = field_from_str("builtin:twisted_b").unwrap();
        let m = builders::mapping_torus_antipodal(0).unwrap();
        let analysis = analyze_pair(&a, &b, &m, &tol()).unwrap();
        assert!(!analysis.rep.is_globally_split());
        assert!(!analysis.vanishing(), "twisted pair must not be equivalent");
        assert!(matches!(
            synthesize_intertwiner(&a, &b, &analysis, &tol()),
            Err(ObstructionError::NoPrimitive)
        ));
    }

    #[test]
    fn fiber_restriction_gives_unit_pattern() {
        let a = field_from_str("builtin:twisted_a").unwrap();
        let b = field_from_str("builtin:twisted_b").unwrap();
        let analysis = restrict_to_fiber(&a, &b, 0, &tol()).unwrap();
        assert!(!analysis.vanishing());
        assert_eq!(analysis.rebased_class, Some(vec![1, -1]));
    }

    #[test]
    fn gauge_invariance_of_the_class() {
        let c = builders::icosphere(0).unwrap();
        let d = field_from_str("builtin:diag_const:vals=0,1").unwrap();
        let p = field_from_str("builtin:cp1_projection:k=1").unwrap();
        let analysis = analyze_pair(&d, &p, &c, &tol()).unwrap();
        let coeff = CoefficientSystem::from_local_system(&analysis.ls, &analysis.complex);
        let tc = TwistedComplex::new(&analysis.complex, coeff).unwrap();
        let mut rng = StdRng::seed_from_u64(21);
        for _ in 0..25 {
            let regauged = analysis.gauge.regauged(&mut rng);
            let links =
                link_phases(&d, &p, &regauged, &analysis.complex, &analysis.ls, &tol()).unwrap();
            let w = winding_cochain(&analysis.complex, &analysis.ls, &links.eta, &tol()).unwrap();
            // The cochain may move, but only by an exact coboundary.
            assert!(tc
                .classes_equal(&w.cochain, &analysis.obstruction.cochain)
                .unwrap());
            let pairing = pair_with_fundamental_cycle(
                &analysis.complex,
                &analysis.ls,
                &analysis.tree,
                &w.cochain,
            );
            assert_eq!(pairing, Some(vec![1, -1]));
        }
    }

    #[test]
    fn refinement_invariance() {
        let d = field_from_str("builtin:diag_const:vals=0,1").unwrap();
        let p = field_from_str("builtin:cp1_projection:k=1").unwrap();
        let c = builders::icosphere(0).unwrap();
        let coarse = analyze_pair(&d, &p, &c, &tol()).unwrap();
        let fine = analyze_pair(&d, &p, &c.subdivide(), &tol()).unwrap();
        assert_eq!(coarse.vanishing(), fine.vanishing());
        assert_eq!(coarse.rebased_class, fine.rebased_class);

        let f = field_from_str("builtin:root_swap_circle").unwrap();
        let g = field_from_str("builtin:conjugated:seed=2:of=root_swap_circle").unwrap();
        let circle = builders::circle(12).unwrap();
        let coarse = analyze_pair(&f, &g, &circle, &tol()).unwrap();
        let fine = analyze_pair(&f, &g, &circle.subdivide(), &tol()).unwrap();
        assert_eq!(coarse.vanishing(), fine.vanishing());
    }

    #[test]
    fn relations_on_sphere_triple() {
        let c = builders::icosphere(0).unwrap();
        let d = field_from_str("builtin:diag_const:vals=0,1").unwrap();
        let p1 = field_from_str("builtin:cp1_projection:k=1").unwrap();
        let p2 = field_from_str("builtin:cp1_projection:k=2").unwrap();
        let rep = verify_relations(&d, &p1, &p2, &c, &tol()).unwrap();
        assert!(rep.all_hold(), "{rep:?}");
        assert_eq!(rep.pairing_ab, Some(vec![1, -1]));
        assert_eq!(rep.pairing_ac, Some(vec![2, -2]));
        // θ(B,A) pairing is the negative of θ(A,B).
        let ba = analyze_pair_on(&p1, &d, &c, &tol()).unwrap();
        assert_eq!(ba.rebased_class, Some(vec![-1, 1]));
    }

    #[test]
    fn naturality_under_degree_k_pullback() {
        let c = builders::icosphere(1).unwrap();
        let d = field_from_str("builtin:diag_const:vals=0,1").unwrap();
        let p1 = field_from_str("builtin:cp1_projection:k=1").unwrap();
        for k in 1i64..=3 {
            let pd = pullback(&d, sphere_power_map(k), "d-pulled");
            let pp = pullback(&p1, sphere_power_map(k), format!("p1-pulled-{k}"));
            let analysis = analyze_pair(&pd, &pp, &c, &tol()).unwrap();
            assert_eq!(analysis.rebased_class, Some(vec![k, -k]), "degree {k}");
        }
    }

    #[test]
    fn classes_distinguish_the_ladder() {
        let c = builders::icosphere(1).unwrap();
        let d = field_from_str("builtin:diag_const:vals=0,1").unwrap();
        let analyses: Vec<PairAnalysis> = (-2i64..=2)
            .map(|k| {
                let p = field_from_str(&format!("builtin:cp1_projection:k={k}")).unwrap();
                analyze_pair_on(&d, &p, &c, &tol()).unwrap()
            })
            .collect();
        let coeff = CoefficientSystem::from_local_system(&analyses[0].ls, &c);
        let tc = TwistedComplex::new(&c, coeff).unwrap();
        for i in 0..analyses.len() {
            for j in (i + 1)..analyses.len() {
                let equal = tc
                    .classes_equal(
                        &analyses[i].obstruction.cochain,
                        &analyses[j].obstruction.cochain,
                    )
                    .unwrap();
                assert!(!equal, "classes {i} and {j} must differ");
            }
        }
    }

    #[test]
    fn chern_identity_relates_theta_to_bundle_cherns() {
        let c = builders::icosphere(1).unwrap();
        let d = field_from_str("builtin:diag_const:vals=0,1").unwrap();
        for k in [-2i64, -1, 1, 2] {
            let p = field_from_str(&format!("builtin:cp1_projection:k={k}")).unwrap();
            let analysis = analyze_pair_on(&d, &p, &c, &tol()).unwrap();
            let ca = chern_numbers(&d, &c, &tol()).unwrap();
            let cb = chern_numbers(&p, &c, &tol()).unwrap();
            let expected: Vec<i64> = cb.iter().zip(&ca).map(|(x, y)| x - y).collect();
            assert_eq!(analysis.rebased_class, Some(expected));
        }
    }

    #[test]
    fn jump_field_is_rejected_as_inadmissible() {
        let j = field_from_str("builtin:jump_interval").unwrap();
        let d = field_from_str("builtin:diag_const:vals=0,1").unwrap();
        let c = builders::interval(16).unwrap();
        assert!(matches!(
            analyze_pair(&j, &d, &c, &tol()),
            Err(ObstructionError::Inadmissible(_))
        ));
    }

    #[test]
    fn char_poly_mismatch_is_rejected() {
        let d1 = field_from_str("builtin:diag_const:vals=0,1").unwrap();
        let d2 = field_from_str("builtin:diag_const:vals=0,2").unwrap();
        let c = builders::circle(6).unwrap();
        assert!(matches!(
            analyze_pair(&d1, &d2, &c, &tol()),
            Err(ObstructionError::CharPolyMismatch(_))
        ));
    }
}
