//! Complex matrix arithmetic and spectral decomposition of normal matrices.
//!
//! A normal matrix is diagonalized through its commuting Hermitian pair
//! `H = (A + A*)/2` and `K = (A − A*)/2i`: decompose `H`, then refine inside
//! near-degenerate clusters of `H` using `K` restricted to the cluster
//! subspace. This keeps the eigenbasis orthonormal without a general
//! non-Hermitian solver.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::MatrixError;
use crate::tol::Tolerances;

/// Dense complex matrix used throughout.
pub type CMat = DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVec = DVector<Complex64>;

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Largest singular value. Relative accuracy well below 1e-10 at the matrix
/// sizes in play (n ≤ 8).
pub fn operator_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// `‖AA* − A*A‖ ≤ tol · max(1, ‖A‖²)`.
pub fn is_normal(a: &CMat, tol: f64) -> bool {
    normality_defect(a) <= tol
}

/// Relative self-commutator norm `‖AA* − A*A‖ / max(1, ‖A‖²)`.
pub fn normality_defect(a: &CMat) -> f64 {
    let ad = a.adjoint();
    let comm = a * &ad - &ad * a;
    let scale = operator_norm(a);
    operator_norm(&comm) / f64::max(1.0, scale * scale)
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending, columns of
/// the returned matrix are the matching orthonormal eigenvectors.
pub fn hermitian_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    let n = h.nrows();
    let se = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let vals = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Eigenvalues with rank-one spectral projections of a normal matrix.
#[derive(Debug, Clone)]
pub struct SpectralData {
    /// Sorted lexicographically by (real part, imaginary part).
    pub eigenvalues: Vec<Complex64>,
    /// `projections[i]` projects onto the eigenline of `eigenvalues[i]`.
    pub projections: Vec<CMat>,
    /// Unit eigenvectors, same order; `projections[i] = v_i v_i*`.
    pub eigenvectors: Vec<CVec>,
    pub source: CMat,
}

/// Canonical eigenvalue order: lexicographic on (Re, Im).
pub fn canonical_cmp(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Joint eigenbasis of a (nearly) normal matrix via the commuting Hermitian
/// pair, without normality or gap checks. Returns eigenvalue/eigenvector
/// pairs sorted canonically.
pub fn joint_eigenbasis(a: &CMat) -> Vec<(Complex64, CVec)> {
    let n = a.nrows();
    let scale = f64::max(1.0, operator_norm(a));
    let ad = a.adjoint();
    let h = (a + &ad).scale(0.5);
    let minus_i = Complex64::new(0.0, -0.5);
    let k = (a - &ad) * minus_i;

    let (hvals, mut vecs) = hermitian_eigen(&h);

    // Refine within clusters of nearly equal H-eigenvalues using K.
    let cluster_tol = 1e-7 * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && hvals[end] - hvals[end - 1] <= cluster_tol {
            end += 1;
        }
        if end - start > 1 {
            let basis = vecs.columns(start, end - start).into_owned();
            let sub = basis.adjoint() * &k * &basis;
            let sub = (&sub + sub.adjoint()).scale(0.5);
            let (_, w) = hermitian_eigen(&sub);
            let rotated = basis * w;
            for j in 0..(end - start) {
                vecs.set_column(start + j, &rotated.column(j));
            }
        }
        start = end;
    }

    let mut pairs: Vec<(Complex64, CVec)> = (0..n)
        .map(|j| {
            let v = vecs.column(j).into_owned();
            let lambda = (v.adjoint() * a * &v)[(0, 0)];
            (lambda, v)
        })
        .collect();
    pairs.sort_by(|x, y| canonical_cmp(&x.0, &y.0));
    pairs
}

/// Spectral decomposition of a normal, multiplicity-free matrix.
///
/// Fails with `NotNormal` when the self-commutator is too large and with
/// `MultiplicityCollision` when two eigenvalues sit closer than `tol.gap`.
pub fn spectral_decompose(a: &CMat, tol: &Tolerances) -> Result<SpectralData, MatrixError> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    let defect = normality_defect(a);
    if defect > tol.normality {
        return Err(MatrixError::NotNormal { defect, tol: tol.normality });
    }

    let pairs = joint_eigenbasis(a);

    let eigenvalues: Vec<Complex64> = pairs.iter().map(|p| p.0).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = (eigenvalues[i] - eigenvalues[j]).norm();
            if gap < tol.gap {
                return Err(MatrixError::MultiplicityCollision { gap, tol: tol.gap });
            }
        }
    }

    let eigenvectors: Vec<CVec> = pairs.into_iter().map(|p| p.1).collect();
    let projections: Vec<CMat> =
        eigenvectors.iter().map(|v| v * v.adjoint()).collect();
    let data = SpectralData {
        eigenvalues,
        projections,
        eigenvectors,
        source: a.clone(),
    };
    data.validate(tol)?;
    Ok(data)
}

impl SpectralData {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Checks every type invariant: projections are rank-one orthogonal
    /// projections, pairwise orthogonal, resolve the identity, and
    /// reconstruct the source.
    pub fn validate(&self, tol: &Tolerances) -> Result<(), MatrixError> {
        let n = self.n();
        let scale = f64::max(1.0, operator_norm(&self.source));
        let mut sum = CMat::zeros(n, n);
        let mut rec = CMat::zeros(n, n);
        for (i, t) in self.projections.iter().enumerate() {
            let idem = operator_norm(&(t * t - t));
            let herm = operator_norm(&(t.adjoint() - t));
            if idem > tol.projection || herm > tol.projection {
                return Err(MatrixError::InvalidSpectralData(format!(
                    "projection {i} defect: idempotent {idem:.3e}, self-adjoint {herm:.3e}"
                )));
            }
            for (j, s) in self.projections.iter().enumerate() {
                if i != j {
                    let cross = operator_norm(&(t * s));
                    if cross > tol.projection {
                        return Err(MatrixError::InvalidSpectralData(format!(
                            "projections {i},{j} not orthogonal: {cross:.3e}"
                        )));
                    }
                }
            }
            sum += t;
            rec += t.scale_complex(self.eigenvalues[i]);
        }
        let id_defect = operator_norm(&(sum - identity(n)));
        if id_defect > tol.projection {
            return Err(MatrixError::InvalidSpectralData(format!(
                "projections do not resolve the identity: {id_defect:.3e}"
            )));
        }
        let rec_defect = operator_norm(&(rec - &self.source));
        if rec_defect > tol.projection * scale {
            return Err(MatrixError::InvalidSpectralData(format!(
                "reconstruction defect {rec_defect:.3e}"
            )));
        }
        Ok(())
    }

    /// Minimal pairwise eigenvalue distance.
    pub fn min_gap(&self) -> f64 {
        let mut gap = f64::INFINITY;
        for i in 0..self.n() {
            for j in (i + 1)..self.n() {
                gap = gap.min((self.eigenvalues[i] - self.eigenvalues[j]).norm());
            }
        }
        gap
    }
}

/// Complex scalar multiple (nalgebra's `scale` is real-only).
pub trait ScaleComplex {
    fn scale_complex(&self, z: Complex64) -> CMat;
}

impl ScaleComplex for CMat {
    fn scale_complex(&self, z: Complex64) -> CMat {
        self.map(|x| x * z)
    }
}

/// Unit vector spanning the range of a rank-one projection: the column of
/// largest norm, normalized.
pub fn range_unit_vector(p: &CMat) -> CVec {
    let mut best = 0;
    let mut best_norm = 0.0;
    for j in 0..p.ncols() {
        let norm = p.column(j).norm();
        if norm > best_norm {
            best_norm = norm;
            best = j;
        }
    }
    let col = p.column(best).into_owned();
    col.unscale(col.norm())
}

/// Deterministic phase convention: rotate so the first coordinate of modulus
/// above 1e-9 becomes positive real.
pub fn fix_phase(v: &CVec) -> CVec {
    for j in 0..v.len() {
        if v[j].norm() > 1e-9 {
            let phase = v[j] / v[j].norm();
            return v.map(|x| x * phase.conj());
        }
    }
    v.clone()
}

/// Phase (unit complex number) of `z`; 1 when `z` is too small to carry one.
pub fn phase(z: Complex64) -> Complex64 {
    let n = z.norm();
    if n < 1e-300 {
        Complex64::new(1.0, 0.0)
    } else {
        z / n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mat2(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> CMat {
        CMat::from_row_slice(2, 2, &[a, b, cc, d])
    }

    #[test]
    fn diagonal_matrices_are_normal() {
        let a = mat2(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert!(is_normal(&a, 1e-9));
    }

    #[test]
    fn circle_matrix_is_normal_on_unit_circle() {
        // [[0, z],[1, 0]] with |z| = 1 commutes with its adjoint.
        for k in 0..8 {
            let th = 2.0 * std::f64::consts::PI * k as f64 / 8.0;
            let z = Complex64::from_polar(1.0, th);
            let a = mat2(c(0.0, 0.0), z, c(1.0, 0.0), c(0.0, 0.0));
            assert!(is_normal(&a, 1e-9), "failed at angle {th}");
        }
    }

    #[test]
    fn nilpotent_jordan_block_is_not_normal() {
        let a = mat2(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert!(!is_normal(&a, 1e-9));
    }

    #[test]
    fn operator_norm_reference_values() {
        assert!((operator_norm(&identity(3)) - 1.0).abs() < 1e-12);
        let d = mat2(c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 4.0));
        assert!((operator_norm(&d) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_rank_one_projection_difference_has_norm_one() {
        // ‖P − Q‖ = 1 for orthogonal rank-one projections.
        let e0 = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let e1 = CVec::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let p = &e0 * e0.adjoint();
        let q = &e1 * e1.adjoint();
        assert!((operator_norm(&(p - q)) - 1.0).abs() < 1e-12);

        // Also for a rotated pair.
        let v = CVec::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let w = CVec::from_vec(vec![c(0.8, 0.0), c(0.0, -0.6)]);
        let p = &v * v.adjoint();
        let q = &w * w.adjoint();
        assert!((operator_norm(&(p - q)) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn decompose_diagonal() {
        let tol = Tolerances::default();
        let a = mat2(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let sd = spectral_decompose(&a, &tol).unwrap();
        assert_eq!(sd.eigenvalues.len(), 2);
        // Canonical order puts 0 first.
        assert!((sd.eigenvalues[0] - c(0.0, 0.0)).norm() < 1e-12);
        assert!((sd.eigenvalues[1] - c(1.0, 0.0)).norm() < 1e-12);
        let p0 = mat2(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        let p1 = mat2(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert!(operator_norm(&(&sd.projections[0] - p0)) < 1e-10);
        assert!(operator_norm(&(&sd.projections[1] - p1)) < 1e-10);
    }

    #[test]
    fn decompose_symmetric_swap() {
        // [[0,1],[1,0]]: eigenvalues ∓1 with projections (1/2)[[1,∓1],[∓1,1]].
        let tol = Tolerances::default();
        let a = mat2(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let sd = spectral_decompose(&a, &tol).unwrap();
        assert!((sd.eigenvalues[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((sd.eigenvalues[1] - c(1.0, 0.0)).norm() < 1e-12);
        let pm = mat2(c(0.5, 0.0), c(-0.5, 0.0), c(-0.5, 0.0), c(0.5, 0.0));
        let pp = mat2(c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0));
        assert!(operator_norm(&(&sd.projections[0] - pm)) < 1e-10);
        assert!(operator_norm(&(&sd.projections[1] - pp)) < 1e-10);
    }

    #[test]
    fn decompose_needs_cluster_refinement() {
        // Eigenvalues ±i share the real part, so H = (A+A*)/2 is fully
        // degenerate and K must separate them.
        let tol = Tolerances::default();
        let a = mat2(c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0));
        // Conjugate by a fixed unitary to hide the diagonal structure.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u = mat2(c(s, 0.0), c(s, 0.0), c(0.0, s), c(0.0, -s));
        let m = &u * &a * u.adjoint();
        let sd = spectral_decompose(&m, &tol).unwrap();
        assert!((sd.eigenvalues[0] - c(0.0, -1.0)).norm() < 1e-10);
        assert!((sd.eigenvalues[1] - c(0.0, 1.0)).norm() < 1e-10);
    }

    #[test]
    fn decompose_rejects_collision() {
        let tol = Tolerances::default();
        let a = mat2(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 1e-9));
        match spectral_decompose(&a, &tol) {
            Err(MatrixError::MultiplicityCollision { .. }) => {}
            other => panic!("expected collision, got {other:?}"),
        }
    }

    #[test]
    fn decompose_rejects_non_normal() {
        let tol = Tolerances::default();
        let a = mat2(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        match spectral_decompose(&a, &tol) {
            Err(MatrixError::NotNormal { .. }) => {}
            other => panic!("expected NotNormal, got {other:?}"),
        }
    }

    #[test]
    fn fix_phase_makes_leading_coordinate_positive_real() {
        let v = CVec::from_vec(vec![c(0.0, 0.6), c(0.8, 0.0)]);
        let w = fix_phase(&v);
        assert!(w[0].im.abs() < 1e-12);
        assert!(w[0].re > 0.0);
        assert!((w.norm() - 1.0).abs() < 1e-12);
    }
}
