//! Matrix-valued fields over charts: the built-in registry, pullbacks, and
//! admissibility checks.
//!
//! Fields are formula-backed evaluators, never interpolated tables, so
//! normality and multiplicity-freeness hold pointwise wherever they hold at
//! all. Admissibility is certified at sample resolution; anything slipping
//! between samples surfaces later as a transport-refinement failure.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complexes::chart::{homogeneous_to_sphere, sphere_to_homogeneous, ModelPoint};
use crate::complexes::{Point, SimplexRef, SimplicialComplex};
use crate::error::FieldError;
use crate::matrix::{
    hermitian_eigen, identity, joint_eigenbasis, normality_defect, CMat, ScaleComplex,
};
use crate::tol::Tolerances;

type Evaluator = Arc<dyn Fn(&ModelPoint) -> Result<CMat, FieldError> + Send + Sync>;

/// A matrix-valued field: a pure evaluator on model coordinates.
#[derive(Clone)]
pub struct MatrixField {
    pub n: usize,
    pub label: String,
    eval: Evaluator,
}

impl std::fmt::Debug for MatrixField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MatrixField({}, n={})", self.label, self.n)
    }
}

impl MatrixField {
    pub fn new(
        n: usize,
        label: impl Into<String>,
        eval: impl Fn(&ModelPoint) -> Result<CMat, FieldError> + Send + Sync + 'static,
    ) -> Self {
        MatrixField { n, label: label.into(), eval: Arc::new(eval) }
    }

    /// Evaluates at raw model coordinates.
    pub fn at(&self, m: &ModelPoint) -> Result<CMat, FieldError> {
        (self.eval)(m)
    }
}

/// Evaluates a field at a barycentric point of a complex.
pub fn evaluate(
    f: &MatrixField,
    c: &SimplicialComplex,
    p: &Point,
) -> Result<CMat, FieldError> {
    f.at(&c.model_point(p))
}

/// Precomposition: `(pullback(f, g))(y) = f(g(y))`.
pub fn pullback(
    f: &MatrixField,
    precompose: impl Fn(&ModelPoint) -> Result<ModelPoint, FieldError> + Send + Sync + 'static,
    label: impl Into<String>,
) -> MatrixField {
    let inner = f.eval.clone();
    MatrixField {
        n: f.n,
        label: label.into(),
        eval: Arc::new(move |m| inner(&precompose(m)?)),
    }
}

/// Builtin field spec: a name with parameters, parsed from strings like
/// `builtin:cp1_projection:k=2` or
/// `builtin:conjugated:seed=7:of=diag_const:vals=0,1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldSpec {
    pub name: String,
    pub params: BTreeMap<String, String>,
    /// Base spec for wrappers like `conjugated`.
    pub base: Option<Box<FieldSpec>>,
}

impl FieldSpec {
    pub fn parse(s: &str) -> Result<FieldSpec, FieldError> {
        let bad = |reason: &str| FieldError::BadSpec { spec: s.into(), reason: reason.into() };
        let rest = s.strip_prefix("builtin:").ok_or_else(|| bad("must start with `builtin:`"))?;
        Self::parse_inner(rest).map_err(|reason| bad(&reason))
    }

    fn parse_inner(rest: &str) -> Result<FieldSpec, String> {
        let mut parts = rest.split(':');
        let name = parts.next().filter(|n| !n.is_empty()).ok_or("missing name")?.to_string();
        let mut params = BTreeMap::new();
        let mut base = None;
        let remainder: Vec<&str> = parts.collect();
        let mut idx = 0;
        while idx < remainder.len() {
            let (k, v) = remainder[idx]
                .split_once('=')
                .ok_or_else(|| format!("bad parameter `{}`", remainder[idx]))?;
            if k == "of" {
                // Everything from here on is the base field's spec.
                let tail = std::iter::once(v)
                    .chain(remainder[idx + 1..].iter().copied())
                    .collect::<Vec<_>>()
                    .join(":");
                base = Some(Box::new(Self::parse_inner(&tail)?));
                break;
            }
            params.insert(k.to_string(), v.to_string());
            idx += 1;
        }
        Ok(FieldSpec { name, params, base })
    }

    pub fn to_spec_string(&self) -> String {
        let mut s = format!("builtin:{}", self.name);
        for (k, v) in &self.params {
            s.push_str(&format!(":{k}={v}"));
        }
        if let Some(b) = &self.base {
            s.push_str(":of=");
            s.push_str(b.to_spec_string().strip_prefix("builtin:").unwrap());
        }
        s
    }

    fn get_i64(&self, key: &str) -> Result<i64, FieldError> {
        self.params
            .get(key)
            .ok_or_else(|| FieldError::BadSpec {
                spec: self.to_spec_string(),
                reason: format!("missing parameter `{key}`"),
            })?
            .parse()
            .map_err(|_| FieldError::BadSpec {
                spec: self.to_spec_string(),
                reason: format!("parameter `{key}` is not an integer"),
            })
    }
}

fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    if let Ok(re) = s.parse::<f64>() {
        return Some(Complex64::new(re, 0.0));
    }
    if let Some(im) = s.strip_suffix('i').and_then(|t| t.parse::<f64>().ok()) {
        return Some(Complex64::new(0.0, im));
    }
    // a+bi / a-bi with the sign separating the parts.
    let inner = s.strip_suffix('i')?;
    for (pos, ch) in inner.char_indices().skip(1) {
        if (ch == '+' || ch == '-') && !matches!(&inner[pos - 1..pos], "e" | "E") {
            let re = inner[..pos].parse::<f64>().ok()?;
            let im = inner[pos..].parse::<f64>().ok()?;
            return Some(Complex64::new(re, im));
        }
    }
    None
}

fn chart_mismatch(field: &str, got: &ModelPoint) -> FieldError {
    FieldError::ChartDomain { field: field.into(), got: got.kind().into() }
}

/// Projection of the trivial plane bundle onto the line spanned by
/// `(z1^k, z2^k)` (conjugated coordinates for negative `k`).
fn cp1_matrix(p: [f64; 3], k: i64) -> CMat {
    let (z1, z2) = sphere_to_homogeneous(p);
    let (w1, w2) = if k >= 0 {
        (z1.powu(k as u32), z2.powu(k as u32))
    } else {
        (z1.conj().powu((-k) as u32), z2.conj().powu((-k) as u32))
    };
    let n = w1.norm_sqr() + w2.norm_sqr();
    DMatrix::from_row_slice(
        2,
        2,
        &[
            w1 * w1.conj() / n,
            w1 * w2.conj() / n,
            w2 * w1.conj() / n,
            w2 * w2.conj() / n,
        ],
    )
}

fn root_swap_matrix(z: Complex64) -> CMat {
    DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            z,
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ],
    )
}

/// Smooth scalar coordinates for seeding conjugating unitaries. On glued
/// charts every function in the list respects the gluing identification, so
/// conjugated fields stay well defined on the quotient.
fn smooth_basis(m: &ModelPoint) -> Vec<f64> {
    match m {
        ModelPoint::Interval(x) => vec![1.0, *x],
        ModelPoint::Circle(z) => vec![1.0, z.re, z.im],
        ModelPoint::Sphere(p) => vec![1.0, p[0], p[1], p[2]],
        ModelPoint::CircleSphere { z, p } => {
            vec![1.0, z.re, z.im, p[0], p[1], p[2]]
        }
        ModelPoint::TorusSphere { t, p } => {
            let two_pi_t = 2.0 * std::f64::consts::PI * t;
            let pi_t = std::f64::consts::PI * t;
            let mut v = vec![1.0, two_pi_t.cos(), two_pi_t.sin()];
            // Quadratic sphere monomials are antipode-invariant.
            v.extend([
                p[0] * p[0],
                p[1] * p[1],
                p[2] * p[2],
                p[0] * p[1],
                p[0] * p[2],
                p[1] * p[2],
            ]);
            // Odd monomials paired with a half-period phase change sign with
            // the antipode exactly as required by (1, p) ~ (0, −p).
            v.extend([
                p[0] * pi_t.cos(),
                p[1] * pi_t.cos(),
                p[2] * pi_t.cos(),
                p[0] * pi_t.sin(),
                p[1] * pi_t.sin(),
                p[2] * pi_t.sin(),
            ]);
            v
        }
    }
}

/// Conjugating unitary `exp(i Σ f_k(x) H_k)` with seeded constant Hermitian
/// generators `H_k` and the smooth scalar basis `f_k`.
fn conjugating_unitary(m: &ModelPoint, n: usize, seed: u64) -> CMat {
    let basis = smooth_basis(m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amp = 0.6 / basis.len() as f64;
    let mut h = CMat::zeros(n, n);
    for &f in &basis {
        let g = CMat::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let herm = (&g + g.adjoint()).scale(0.5);
        h += herm.scale(amp * f);
    }
    let (vals, vecs) = hermitian_eigen(&h);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(
        vals.iter().map(|&x| Complex64::from_polar(1.0, x)).collect::<Vec<_>>(),
    ));
    &vecs * d * vecs.adjoint()
}

/// Resolves a spec against the registry.
pub fn builtin_field(spec: &FieldSpec) -> Result<MatrixField, FieldError> {
    let label = spec.to_spec_string();
    match spec.name.as_str() {
        // Piecewise field on the interval; the eigenvalue 0 has a
        // multiplicity jump at the origin, so this field is intentionally
        // not multiplicity-free.
        "jump_interval" => Ok(MatrixField::new(2, label.clone(), move |m| match m {
            ModelPoint::Interval(x) => {
                let x = *x;
                let e = if x <= 0.0 {
                    [x, 0.0, 0.0, 0.0]
                } else {
                    [x, x, x, x]
                };
                Ok(DMatrix::from_row_slice(
                    2,
                    2,
                    &e.map(|v| Complex64::new(v, 0.0)),
                ))
            }
            other => Err(chart_mismatch("jump_interval", other)),
        })),
        "root_swap_circle" => Ok(MatrixField::new(2, label.clone(), move |m| match m {
            ModelPoint::Circle(z) => Ok(root_swap_matrix(*z)),
            other => Err(chart_mismatch("root_swap_circle", other)),
        })),
        "diag_const" => {
            let vals_str = spec.params.get("vals").cloned().unwrap_or_else(|| "0,1".into());
            let vals: Option<Vec<Complex64>> =
                vals_str.split(',').map(parse_complex).collect();
            let vals = vals.ok_or_else(|| FieldError::BadSpec {
                spec: label.clone(),
                reason: format!("cannot parse eigenvalue list `{vals_str}`"),
            })?;
            if vals.is_empty() {
                return Err(FieldError::BadSpec {
                    spec: label.clone(),
                    reason: "empty eigenvalue list".into(),
                });
            }
            let n = vals.len();
            Ok(MatrixField::new(n, label.clone(), move |_| {
                let mut m = CMat::zeros(n, n);
                for (i, &v) in vals.iter().enumerate() {
                    m[(i, i)] = v;
                }
                Ok(m)
            }))
        }
        "cp1_projection" => {
            let k = spec.get_i64("k")?;
            Ok(MatrixField::new(2, label.clone(), move |m| match m {
                ModelPoint::Sphere(p) => Ok(cp1_matrix(*p, k)),
                other => Err(chart_mismatch("cp1_projection", other)),
            }))
        }
        // Pullback of the circle root-swap field along the mapping-torus
        // projection (t, p) ↦ e^{2πit}.
        "twisted_a" => Ok(MatrixField::new(2, label.clone(), move |m| match m {
            ModelPoint::TorusSphere { t, .. } => {
                Ok(root_swap_matrix(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t)))
            }
            other => Err(chart_mismatch("twisted_a", other)),
        })),
        // e^{iπt}(2 P_taut − I): eigenvalue +e^{iπt} on the tautological
        // line, −e^{iπt} on its orthocomplement. Crossing the seam flips
        // both the square root and the bundles, so the field descends to
        // the quotient.
        "twisted_b" => Ok(MatrixField::new(2, label.clone(), move |m| match m {
            ModelPoint::TorusSphere { t, p } => {
                let proj = cp1_matrix(*p, 1);
                let refl = proj.scale(2.0) - identity(2);
                Ok(refl.scale_complex(Complex64::from_polar(1.0, std::f64::consts::PI * t)))
            }
            other => Err(chart_mismatch("twisted_b", other)),
        })),
        "conjugated" => {
            let seed = spec.get_i64("seed")? as u64;
            let base_spec = spec.base.as_deref().ok_or_else(|| FieldError::BadSpec {
                spec: label.clone(),
                reason: "conjugated needs a base field after `of=`".into(),
            })?;
            let base = builtin_field(base_spec)?;
            let n = base.n;
            Ok(MatrixField::new(n, label.clone(), move |m| {
                let u = conjugating_unitary(m, n, seed);
                let a = base.at(m)?;
                Ok(&u * a * u.adjoint())
            }))
        }
        other => Err(FieldError::UnknownBuiltin(other.into())),
    }
}

/// Shorthand: parse a spec string and resolve it.
pub fn field_from_str(s: &str) -> Result<MatrixField, FieldError> {
    builtin_field(&FieldSpec::parse(s)?)
}

/// Degree-k self-map of the sphere, `[z1, z2] ↦ [z1^k, z2^k]` in homogeneous
/// coordinates.
pub fn sphere_power_map(k: i64) -> impl Fn(&ModelPoint) -> Result<ModelPoint, FieldError> {
    move |m: &ModelPoint| match m {
        ModelPoint::Sphere(p) => {
            let (z1, z2) = sphere_to_homogeneous(*p);
            let (w1, w2) = if k >= 0 {
                (z1.powu(k as u32), z2.powu(k as u32))
            } else {
                (z1.conj().powu((-k) as u32), z2.conj().powu((-k) as u32))
            };
            Ok(ModelPoint::Sphere(homogeneous_to_sphere(w1, w2)))
        }
        other => Err(FieldError::ChartDomain {
            field: "sphere_power_map".into(),
            got: other.kind().into(),
        }),
    }
}

/// Inclusion of the fiber sphere `{t = t0}` into the mapping torus.
pub fn torus_fiber_inclusion(
    t0: f64,
) -> impl Fn(&ModelPoint) -> Result<ModelPoint, FieldError> {
    move |m: &ModelPoint| match m {
        ModelPoint::Sphere(p) => Ok(ModelPoint::TorusSphere { t: t0, p: *p }),
        other => Err(FieldError::ChartDomain {
            field: "torus_fiber_inclusion".into(),
            got: other.kind().into(),
        }),
    }
}

/// Projection of the mapping torus onto its circle direction.
pub fn torus_projection() -> impl Fn(&ModelPoint) -> Result<ModelPoint, FieldError> {
    move |m: &ModelPoint| match m {
        ModelPoint::TorusSphere { t, .. } => Ok(ModelPoint::Circle(Complex64::from_polar(
            1.0,
            2.0 * std::f64::consts::PI * t,
        ))),
        other => Err(FieldError::ChartDomain {
            field: "torus_projection".into(),
            got: other.kind().into(),
        }),
    }
}

/// All admissibility sample points of a complex: vertices, edge subdivision
/// points, and a barycentric lattice inside each 2-cell.
pub fn sample_points(c: &SimplicialComplex, per_simplex: usize) -> Vec<Point> {
    let mut pts = Vec::new();
    for v in 0..c.vertex_count() {
        pts.push(Point::vertex(v));
    }
    let s = per_simplex.max(1);
    for (i, _) in c.edges().iter().enumerate() {
        for j in 1..s {
            pts.push(Point::on_edge(i, j as f64 / s as f64));
        }
    }
    for (i, _) in c.triangles().iter().enumerate() {
        for a in 1..s {
            for b in 1..(s - a) {
                let cc = s - a - b;
                pts.push(Point {
                    simplex: SimplexRef::Triangle(i),
                    bary: vec![a as f64 / s as f64, b as f64 / s as f64, cc as f64 / s as f64],
                });
            }
        }
    }
    pts
}

/// Outcome of sampling a field for normality and eigenvalue separation.
#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub field: String,
    pub samples: usize,
    pub max_normality_defect: f64,
    pub min_gap: f64,
    pub pass: bool,
    /// Human-readable description of the worst sample, present on failure.
    pub worst: Option<String>,
}

/// Samples the field over the complex and reports the worst normality defect
/// and the smallest eigenvalue gap.
pub fn check_admissible(
    f: &MatrixField,
    c: &SimplicialComplex,
    per_simplex: usize,
    tol: &Tolerances,
) -> Result<AdmissibilityReport, FieldError> {
    let pts = sample_points(c, per_simplex);
    let mut max_defect: f64 = 0.0;
    let mut min_gap = f64::INFINITY;
    let mut worst = None;
    for p in &pts {
        let m = evaluate(f, c, p)?;
        let defect = normality_defect(&m);
        if defect > max_defect {
            max_defect = defect;
            if defect > tol.normality {
                worst = Some(format!("normality defect {defect:.3e} at {:?}", p.simplex));
            }
        }
        let gap = min_pairwise_gap(&m);
        if gap < min_gap {
            min_gap = gap;
            if gap < tol.gap {
                worst = Some(format!("eigenvalue gap {gap:.3e} at {:?}", p.simplex));
            }
        }
    }
    let pass = max_defect <= tol.normality && min_gap >= tol.gap;
    Ok(AdmissibilityReport {
        field: f.label.clone(),
        samples: pts.len(),
        max_normality_defect: max_defect,
        min_gap,
        pass,
        worst: if pass { None } else { worst },
    })
}

/// Smallest pairwise eigenvalue distance, through the joint eigenbasis so
/// that the value is meaningful even when the Hermitian part is degenerate.
fn min_pairwise_gap(m: &CMat) -> f64 {
    let eigs = eigenvalue_multiset(m);
    let mut gap = f64::INFINITY;
    for i in 0..eigs.len() {
        for j in (i + 1)..eigs.len() {
            gap = gap.min((eigs[i] - eigs[j]).norm());
        }
    }
    gap
}

/// Eigenvalue multiset of a normal matrix, canonically sorted.
fn eigenvalue_multiset(m: &CMat) -> Vec<Complex64> {
    joint_eigenbasis(m).into_iter().map(|(l, _)| l).collect()
}

/// True when the two fields have matching eigenvalue multisets (within `tol`,
/// under optimal matching) at every sample point.
pub fn same_char_poly(
    a: &MatrixField,
    b: &MatrixField,
    c: &SimplicialComplex,
    per_simplex: usize,
    tol: f64,
) -> Result<bool, FieldError> {
    Ok(char_poly_mismatch(a, b, c, per_simplex)? <= tol)
}

/// Worst eigenvalue-multiset mismatch over all samples.
pub fn char_poly_mismatch(
    a: &MatrixField,
    b: &MatrixField,
    c: &SimplicialComplex,
    per_simplex: usize,
) -> Result<f64, FieldError> {
    use itertools::Itertools;
    if a.n != b.n {
        return Ok(f64::INFINITY);
    }
    let mut worst: f64 = 0.0;
    for p in sample_points(c, per_simplex) {
        let ea = eigenvalue_multiset(&evaluate(a, c, &p)?);
        let eb = eigenvalue_multiset(&evaluate(b, c, &p)?);
        let n = ea.len();
        let best = (0..n)
            .permutations(n)
            .map(|perm| {
                perm.iter()
                    .enumerate()
                    .map(|(i, &j)| (ea[i] - eb[j]).norm())
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(best);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::builders;
    use crate::matrix::operator_norm;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn spec_parsing_round_trips() {
        let s = FieldSpec::parse("builtin:cp1_projection:k=2").unwrap();
        assert_eq!(s.name, "cp1_projection");
        assert_eq!(s.to_spec_string(), "builtin:cp1_projection:k=2");

        let nested = FieldSpec::parse("builtin:conjugated:seed=7:of=diag_const:vals=0,1").unwrap();
        assert_eq!(nested.name, "conjugated");
        assert_eq!(nested.base.as_ref().unwrap().name, "diag_const");
        assert_eq!(
            nested.to_spec_string(),
            "builtin:conjugated:seed=7:of=diag_const:vals=0,1"
        );

        assert!(FieldSpec::parse("cp1_projection:k=2").is_err());
        assert!(matches!(
            field_from_str("builtin:unknown_thing"),
            Err(FieldError::UnknownBuiltin(_))
        ));
    }

    #[test]
    fn parse_complex_values() {
        assert_eq!(parse_complex("1.5"), Some(c64(1.5, 0.0)));
        assert_eq!(parse_complex("2i"), Some(c64(0.0, 2.0)));
        assert_eq!(parse_complex("1+2i"), Some(c64(1.0, 2.0)));
        assert_eq!(parse_complex("-1.5-0.5i"), Some(c64(-1.5, -0.5)));
        assert_eq!(parse_complex("blah"), None);
    }

    #[test]
    fn cp1_projection_at_north_pole_is_diag() {
        // Homogeneous coordinates [1, 0] at the north pole: projection onto
        // the first axis.
        let f = field_from_str("builtin:cp1_projection:k=1").unwrap();
        let m = f.at(&ModelPoint::Sphere([0.0, 0.0, 1.0])).unwrap();
        let expected =
            DMatrix::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]);
        assert!(operator_norm(&(m - expected)) < 1e-12);
    }

    #[test]
    fn root_swap_at_one() {
        let f = field_from_str("builtin:root_swap_circle").unwrap();
        let m = f.at(&ModelPoint::Circle(c64(1.0, 0.0))).unwrap();
        assert!((m[(0, 1)] - c64(1.0, 0.0)).norm() < 1e-15);
        assert!((m[(1, 0)] - c64(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn jump_interval_at_minus_one() {
        let f = field_from_str("builtin:jump_interval").unwrap();
        let m = f.at(&ModelPoint::Interval(-1.0)).unwrap();
        assert!((m[(0, 0)] - c64(-1.0, 0.0)).norm() < 1e-15);
        assert!(m[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn chart_domain_mismatch_is_reported() {
        let f = field_from_str("builtin:root_swap_circle").unwrap();
        assert!(matches!(
            f.at(&ModelPoint::Sphere([0.0, 0.0, 1.0])),
            Err(FieldError::ChartDomain { .. })
        ));
    }

    #[test]
    fn twisted_b_respects_the_gluing() {
        let f = field_from_str("builtin:twisted_b").unwrap();
        for p in [[0.0, 0.0, 1.0], [0.6, 0.64, 0.48], [-0.28, 0.96, 0.0]] {
            let p = crate::complexes::chart::normalize3(p);
            let top = f.at(&ModelPoint::TorusSphere { t: 1.0, p }).unwrap();
            let bottom = f
                .at(&ModelPoint::TorusSphere { t: 0.0, p: crate::complexes::chart::antipode(p) })
                .unwrap();
            assert!(operator_norm(&(top - bottom)) < 1e-12, "gluing broken at {p:?}");
        }
    }

    #[test]
    fn conjugated_preserves_spectrum() {
        let f = field_from_str("builtin:conjugated:seed=11:of=diag_const:vals=0,1").unwrap();
        let c = builders::circle(8).unwrap();
        for p in sample_points(&c, 4) {
            let m = evaluate(&f, &c, &p).unwrap();
            let mut eigs = eigenvalue_multiset(&m);
            eigs.sort_by(crate::matrix::canonical_cmp);
            assert!((eigs[0] - c64(0.0, 0.0)).norm() < 1e-9);
            assert!((eigs[1] - c64(1.0, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn conjugated_respects_torus_gluing() {
        let f = field_from_str("builtin:conjugated:seed=3:of=twisted_b").unwrap();
        let p = crate::complexes::chart::normalize3([0.1, -0.7, 0.7]);
        let top = f.at(&ModelPoint::TorusSphere { t: 1.0, p }).unwrap();
        let bottom = f
            .at(&ModelPoint::TorusSphere { t: 0.0, p: crate::complexes::chart::antipode(p) })
            .unwrap();
        assert!(operator_norm(&(top - bottom)) < 1e-12);
    }

    #[test]
    fn registry_fields_pass_admissibility_on_their_complexes() {
        let tol = Tolerances::default();
        let cases: Vec<(MatrixField, SimplicialComplex)> = vec![
            (field_from_str("builtin:root_swap_circle").unwrap(), builders::circle(24).unwrap()),
            (field_from_str("builtin:diag_const:vals=0,1").unwrap(), builders::circle(6).unwrap()),
            (field_from_str("builtin:cp1_projection:k=1").unwrap(), builders::icosphere(1).unwrap()),
            (field_from_str("builtin:cp1_projection:k=-2").unwrap(), builders::icosphere(1).unwrap()),
            (
                field_from_str("builtin:twisted_a").unwrap(),
                builders::mapping_torus_antipodal(0).unwrap(),
            ),
            (
                field_from_str("builtin:twisted_b").unwrap(),
                builders::mapping_torus_antipodal(0).unwrap(),
            ),
            (
                field_from_str("builtin:conjugated:seed=5:of=root_swap_circle").unwrap(),
                builders::circle(12).unwrap(),
            ),
        ];
        for (f, c) in &cases {
            let rep = check_admissible(f, c, 8, &tol).unwrap();
            assert!(rep.pass, "{} failed on {}: {:?}", f.label, c.chart_id(), rep.worst);
        }
    }

    #[test]
    fn root_swap_min_gap_is_two() {
        let tol = Tolerances::default();
        let f = field_from_str("builtin:root_swap_circle").unwrap();
        let c = builders::circle(24).unwrap();
        let rep = check_admissible(&f, &c, 8, &tol).unwrap();
        assert!((rep.min_gap - 2.0).abs() < 1e-9, "min gap {}", rep.min_gap);
    }

    #[test]
    fn diag_const_gap_is_exactly_one() {
        let tol = Tolerances::default();
        let f = field_from_str("builtin:diag_const:vals=0,1").unwrap();
        let c = builders::circle(6).unwrap();
        let rep = check_admissible(&f, &c, 4, &tol).unwrap();
        assert!(rep.pass);
        assert!((rep.min_gap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jump_interval_fails_admissibility_near_origin() {
        let tol = Tolerances::default();
        let f = field_from_str("builtin:jump_interval").unwrap();
        let c = builders::interval(16).unwrap();
        let rep = check_admissible(&f, &c, 8, &tol).unwrap();
        assert!(!rep.pass);
        assert!(rep.min_gap < tol.gap);
    }

    #[test]
    fn pullback_along_identity_is_pointwise_equal() {
        let f = field_from_str("builtin:cp1_projection:k=1").unwrap();
        let g = pullback(&f, |m| Ok(m.clone()), "id-pullback");
        let c = builders::icosphere(0).unwrap();
        for p in sample_points(&c, 3) {
            let a = evaluate(&f, &c, &p).unwrap();
            let b = evaluate(&g, &c, &p).unwrap();
            assert!(operator_norm(&(a - b)) < 1e-15);
        }
    }

    #[test]
    fn power_map_pullback_gives_higher_projections() {
        // cp1_projection(1) ∘ (degree-k power map) = cp1_projection(k).
        let base = field_from_str("builtin:cp1_projection:k=1").unwrap();
        let c = builders::icosphere(1).unwrap();
        for k in [2i64, 3, -2] {
            let pulled = pullback(&base, sphere_power_map(k), format!("pullback-{k}"));
            let direct = field_from_str(&format!("builtin:cp1_projection:k={k}")).unwrap();
            for p in sample_points(&c, 2).into_iter().take(100) {
                let a = evaluate(&pulled, &c, &p).unwrap();
                let b = evaluate(&direct, &c, &p).unwrap();
                assert!(operator_norm(&(a - b)) < 1e-10, "k={k} mismatch");
            }
        }
    }

    #[test]
    fn pullback_is_functorial() {
        let base = field_from_str("builtin:cp1_projection:k=1").unwrap();
        let two_then_three = pullback(
            &pullback(&base, sphere_power_map(2), "p2"),
            sphere_power_map(3),
            "p2p3",
        );
        let six = pullback(&base, sphere_power_map(6), "p6");
        let c = builders::icosphere(0).unwrap();
        for p in sample_points(&c, 3) {
            let a = evaluate(&two_then_three, &c, &p).unwrap();
            let b = evaluate(&six, &c, &p).unwrap();
            assert!(operator_norm(&(a - b)) < 1e-9);
        }
    }

    #[test]
    fn twisted_pair_has_same_char_poly() {
        let a = field_from_str("builtin:twisted_a").unwrap();
        let b = field_from_str("builtin:twisted_b").unwrap();
        let c = builders::mapping_torus_antipodal(0).unwrap();
        assert!(same_char_poly(&a, &b, &c, 3, 1e-9).unwrap());
    }

    #[test]
    fn diag_and_projection_share_char_poly_on_sphere() {
        let d = field_from_str("builtin:diag_const:vals=0,1").unwrap();
        let p = field_from_str("builtin:cp1_projection:k=1").unwrap();
        let c = builders::icosphere(0).unwrap();
        assert!(same_char_poly(&d, &p, &c, 4, 1e-9).unwrap());
        let q = field_from_str("builtin:diag_const:vals=0,2").unwrap();
        assert!(!same_char_poly(&d, &q, &c, 4, 1e-9).unwrap());
    }
}
