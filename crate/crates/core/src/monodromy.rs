//! Eigenvalue transport along edges and the permutation local system.
//!
//! Tracking matches spectral projections, not eigenvalues: projections are
//! what the matching lemma controls, and they stay separated even when
//! eigenvalues nearly collide in the canonical sort order. Each edge is
//! subdivided by doubling until every consecutive frame matching lands
//! strictly inside the uniqueness threshold.

use rayon::prelude::*;

use crate::complexes::{Point, SimplicialComplex, SpanningTree};
use crate::error::MonodromyError;
use crate::fields::{evaluate, MatrixField};
use crate::frames::match_projections;
use crate::matrix::{spectral_decompose, SpectralData};
use crate::tol::Tolerances;

/// Permutation of `{0..n}`; `apply(i)` is the image of `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n).collect())
    }
    pub fn from_images(images: Vec<usize>) -> Perm {
        Perm(images)
    }
    pub fn n(&self) -> usize {
        self.0.len()
    }
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }
    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }
    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Perm(inv)
    }
    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }
    pub fn images(&self) -> &[usize] {
        &self.0
    }
    /// Cycle notation for reports, e.g. `(0 1)`.
    pub fn cycle_string(&self) -> String {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 0..n {
            if seen[start] || self.0[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut next = self.0[start];
            while next != start {
                seen[next] = true;
                cycle.push(next);
                next = self.0[next];
            }
            out.push('(');
            out.push_str(
                &cycle.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "),
            );
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("id");
        }
        out
    }
}

/// Spectral frames along one edge, refined until consecutive matchings are
/// unique with margin.
#[derive(Debug)]
pub struct EdgeRefinement {
    /// Spectral data at parameters `j / steps`, `j = 0..=steps`.
    pub spectra: Vec<SpectralData>,
    /// `perms[j]` matches canonical indices at sample `j` to sample `j+1`.
    pub perms: Vec<Perm>,
    /// Composite permutation from the edge tail to its head.
    pub composite: Perm,
    pub max_step_distance: f64,
}

/// Transport summary for one edge.
#[derive(Debug, Clone)]
pub struct EdgeTransport {
    pub edge: usize,
    /// Canonical index at the tail maps to this index at the head.
    pub permutation: Perm,
    pub steps: usize,
    pub max_step_distance: f64,
}

/// Refines an edge until every consecutive spectral-frame matching has
/// `maxdist < tol.match_threshold`, doubling at most `max_edge_doublings`
/// times.
pub fn refine_edge(
    f: &MatrixField,
    c: &SimplicialComplex,
    edge: usize,
    tol: &Tolerances,
) -> Result<EdgeRefinement, MonodromyError> {
    let decompose_at = |s: f64| -> Result<SpectralData, MonodromyError> {
        let m = evaluate(f, c, &Point::on_edge(edge, s))?;
        Ok(spectral_decompose(&m, tol)?)
    };

    let mut spectra = vec![decompose_at(0.0)?, decompose_at(1.0)?];
    let mut doublings = 0u32;
    loop {
        let mut perms = Vec::with_capacity(spectra.len() - 1);
        let mut worst: f64 = 0.0;
        let mut ok = true;
        for w in spectra.windows(2) {
            match match_projections(&w[0].projections, &w[1].projections) {
                Ok(m) if m.maxdist < tol.match_threshold => {
                    worst = worst.max(m.maxdist);
                    perms.push(Perm::from_images(m.bijection));
                }
                Ok(m) => {
                    worst = worst.max(m.maxdist);
                    ok = false;
                    break;
                }
                Err(_) => {
                    worst = f64::INFINITY;
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let composite = perms
                .iter()
                .fold(Perm::identity(f.n), |acc, p| p.compose(&acc));
            return Ok(EdgeRefinement {
                spectra,
                perms,
                composite,
                max_step_distance: worst,
            });
        }
        if doublings >= tol.max_edge_doublings {
            return Err(MonodromyError::RefinementExceeded {
                doublings,
                maxdist: worst,
            });
        }
        // Insert midpoints between all consecutive samples.
        let steps = spectra.len() - 1;
        let mut refined = Vec::with_capacity(2 * steps + 1);
        for (j, sd) in spectra.iter().enumerate() {
            refined.push(sd.clone());
            if j < steps {
                let s = (2 * j + 1) as f64 / (2 * steps) as f64;
                refined.push(decompose_at(s)?);
            }
        }
        spectra = refined;
        doublings += 1;
    }
}

/// Follows the spectral frame along an edge and returns the induced
/// permutation of canonical eigenvalue indices.
pub fn transport_edge(
    f: &MatrixField,
    c: &SimplicialComplex,
    edge: usize,
    tol: &Tolerances,
) -> Result<EdgeTransport, MonodromyError> {
    let r = refine_edge(f, c, edge, tol)?;
    Ok(EdgeTransport {
        edge,
        permutation: r.composite,
        steps: r.spectra.len() - 1,
        max_step_distance: r.max_step_distance,
    })
}

/// One permutation per edge in its canonical (ascending-vertex) direction;
/// the reverse direction carries the inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalSystem {
    pub n: usize,
    perms: Vec<Perm>,
}

impl LocalSystem {
    pub fn edge_count(&self) -> usize {
        self.perms.len()
    }

    /// Transport along edge `e`, forward = canonical direction.
    pub fn transport(&self, edge: usize, forward: bool) -> Perm {
        if forward {
            self.perms[edge].clone()
        } else {
            self.perms[edge].inverse()
        }
    }

    pub fn forward(&self, edge: usize) -> &Perm {
        &self.perms[edge]
    }

    /// Composite permutation along a vertex path (successive vertices joined
    /// by edges of the complex).
    pub fn transport_along_path(
        &self,
        c: &SimplicialComplex,
        path: &[usize],
    ) -> Perm {
        let mut acc = Perm::identity(self.n);
        for w in path.windows(2) {
            let (u, v) = (w[0], w[1]);
            let key = if u < v { [u, v] } else { [v, u] };
            let e = c.edge_index(key).expect("path must follow edges");
            acc = self.transport(e, u < v).compose(&acc);
        }
        acc
    }

    /// Path of vertices from `v` up the spanning tree to the root.
    pub fn tree_path_to_root(tree: &SpanningTree, v: usize) -> Vec<usize> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = tree.parent[cur] {
            path.push(p);
            cur = p;
        }
        path
    }

    /// Validates 2-cell consistency: the composite around every triangle
    /// boundary is the identity.
    pub fn validate(&self, c: &SimplicialComplex) -> Result<(), MonodromyError> {
        for (fi, f) in c.triangles().iter().enumerate() {
            let (a, b, cc) = (f[0], f[1], f[2]);
            let composite = self
                .transport(c.edge_index([a, cc]).unwrap(), false)
                .compose(&self.transport(c.edge_index([b, cc]).unwrap(), true))
                .compose(&self.transport(c.edge_index([a, b]).unwrap(), true));
            if !composite.is_identity() {
                return Err(MonodromyError::InconsistentSystem { cell: fi });
            }
        }
        Ok(())
    }
}

/// Builds the local system of a field by transporting every edge, then
/// validates 2-cell consistency.
pub fn build_local_system(
    f: &MatrixField,
    c: &SimplicialComplex,
    tol: &Tolerances,
) -> Result<LocalSystem, MonodromyError> {
    let perms: Result<Vec<Perm>, MonodromyError> = (0..c.edges().len())
        .into_par_iter()
        .map(|e| transport_edge(f, c, e, tol).map(|t| t.permutation))
        .collect();
    let ls = LocalSystem { n: f.n, perms: perms? };
    ls.validate(c)?;
    Ok(ls)
}

/// The monodromy representation: one permutation per non-tree edge, read in
/// basepoint coordinates by conjugating with tree-path transports.
#[derive(Debug, Clone)]
pub struct Pi1Representation {
    /// `(edge index, permutation of basepoint labels)` per generator.
    pub generators: Vec<(usize, Perm)>,
    pub n: usize,
}

impl Pi1Representation {
    pub fn is_globally_split(&self) -> bool {
        self.generators.iter().all(|(_, p)| p.is_identity())
    }
}

/// Conjugates each non-tree edge's permutation by tree transports: for edge
/// `(u, v)` the generator is (path v→root) ∘ edge ∘ (path root→u).
pub fn pi1_rep(
    ls: &LocalSystem,
    c: &SimplicialComplex,
    tree: &SpanningTree,
) -> Pi1Representation {
    let generators = tree
        .non_tree_edges
        .iter()
        .map(|&e| {
            let [u, v] = c.edges()[e];
            let root_to_u: Vec<usize> = {
                let mut p = LocalSystem::tree_path_to_root(tree, u);
                p.reverse();
                p
            };
            let v_to_root = LocalSystem::tree_path_to_root(tree, v);
            let perm = ls
                .transport_along_path(c, &v_to_root)
                .compose(ls.forward(e))
                .compose(&ls.transport_along_path(c, &root_to_u));
            (e, perm)
        })
        .collect();
    Pi1Representation { generators, n: ls.n }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::builders;
    use crate::fields::field_from_str;

    #[test]
    fn constant_field_transports_trivially() {
        let tol = Tolerances::default();
        let f = field_from_str("builtin:diag_const:vals=0,1").unwrap();
        let c = builders::circle(6).unwrap();
        let t = transport_edge(&f, &c, 0, &tol).unwrap();
        assert!(t.permutation.is_identity());
        assert_eq!(t.steps, 1);
    }

    #[test]
    fn root_swap_first_edge_is_identity_but_loop_swaps() {
        let tol = Tolerances::default();
        let f = field_from_str("builtin:root_swap_circle").unwrap();
        let c = builders::circle(12).unwrap();
        // Edge from vertex 0 to vertex 1 stays in the region where the
        // canonical sort does not flip.
        let e01 = c.edge_index([0, 1]).unwrap();
        let t = transport_edge(&f, &c, e01, &tol).unwrap();
        assert!(t.permutation.is_identity(), "got {}", t.permutation.cycle_string());

        // Full loop composite: walk 0 → 1 → ... → 11 → 0.
        let ls = build_local_system(&f, &c, &tol).unwrap();
        let mut path: Vec<usize> = (0..12).collect();
        path.push(0);
        let composite = ls.transport_along_path(&c, &path);
        assert_eq!(composite.cycle_string(), "(0 1)");
    }

    #[test]
    fn reverse_edge_is_exact_inverse() {
        let tol = Tolerances::default();
        let f = field_from_str("builtin:root_swap_circle").unwrap();
        let c = builders::circle(12).unwrap();
        let ls = build_local_system(&f, &c, &tol).unwrap();
        for e in 0..c.edges().len() {
            let fwd = ls.transport(e, true);
            let bwd = ls.transport(e, false);
            assert!(fwd.compose(&bwd).is_identity());
            assert!(bwd.compose(&fwd).is_identity());
        }
    }

    #[test]
    fn local_system_depends_only_on_char_poly() {
        let tol = Tolerances::default();
        let c = builders::mapping_torus_antipodal(0).unwrap();
        let a = field_from_str("builtin:twisted_a").unwrap();
        let b = field_from_str("builtin:twisted_b").unwrap();
        let la = build_local_system(&a, &c, &tol).unwrap();
        let lb = build_local_system(&b, &c, &tol).unwrap();
        assert_eq!(la, lb);
    }

    #[test]
    fn sphere_rep_is_trivial() {
        let tol = Tolerances::default();
        let c = builders::icosphere(0).unwrap();
        let f = field_from_str("builtin:cp1_projection:k=1").unwrap();
        let ls = build_local_system(&f, &c, &tol).unwrap();
        let tree = c.spanning_tree();
        let rep = pi1_rep(&ls, &c, &tree);
        assert_eq!(rep.generators.len(), 19);
        assert!(rep.is_globally_split());
    }

    #[test]
    fn circle_rep_is_a_transposition() {
        let tol = Tolerances::default();
        let c = builders::circle(12).unwrap();
        let f = field_from_str("builtin:root_swap_circle").unwrap();
        let ls = build_local_system(&f, &c, &tol).unwrap();
        let tree = c.spanning_tree();
        let rep = pi1_rep(&ls, &c, &tree);
        assert_eq!(rep.generators.len(), 1);
        assert_eq!(rep.generators[0].1.cycle_string(), "(0 1)");
        assert!(!rep.is_globally_split());
    }

    #[test]
    fn mapping_torus_generator_is_a_transposition() {
        let tol = Tolerances::default();
        let c = builders::mapping_torus_antipodal(0).unwrap();
        let f = field_from_str("builtin:twisted_a").unwrap();
        let ls = build_local_system(&f, &c, &tol).unwrap();
        let tree = c.spanning_tree();
        let rep = pi1_rep(&ls, &c, &tree);
        // Many non-tree edges, but the image of the representation must be
        // generated by the single fiber-direction transposition.
        let mut nontrivial = 0;
        for (_, p) in &rep.generators {
            if !p.is_identity() {
                assert_eq!(p.cycle_string(), "(0 1)");
                nontrivial += 1;
            }
        }
        assert!(nontrivial > 0, "the Z generator must act by a transposition");
    }

    #[test]
    fn refinement_coarsens_consistently() {
        // Building the system on a subdivision and composing the two
        // half-edge permutations reproduces the parent system.
        let tol = Tolerances::default();
        let c = builders::circle(12).unwrap();
        let f = field_from_str("builtin:root_swap_circle").unwrap();
        let ls = build_local_system(&f, &c, &tol).unwrap();
        let s = c.subdivide();
        let ls2 = build_local_system(&f, &s, &tol).unwrap();
        for (ei, e) in c.edges().iter().enumerate() {
            let mid = c.vertex_count() + ei;
            let first = {
                let key = if e[0] < mid { [e[0], mid] } else { [mid, e[0]] };
                ls2.transport(s.edge_index(key).unwrap(), e[0] < mid)
            };
            let second = {
                let key = if mid < e[1] { [mid, e[1]] } else { [e[1], mid] };
                ls2.transport(s.edge_index(key).unwrap(), mid < e[1])
            };
            assert_eq!(second.compose(&first), *ls.forward(ei));
        }
    }

    #[test]
    fn perm_cycle_strings() {
        assert_eq!(Perm::identity(3).cycle_string(), "id");
        assert_eq!(Perm::from_images(vec![1, 0]).cycle_string(), "(0 1)");
        assert_eq!(Perm::from_images(vec![1, 2, 0]).cycle_string(), "(0 1 2)");
    }
}
