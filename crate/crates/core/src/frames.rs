//! Projection frames and the metric geometry of intertwiners.
//!
//! A frame is a pair of unordered sets of n mutually orthogonal rank-one
//! projections with a pairing between them; an intertwiner point adds a
//! unitary conjugating each projection to its partner. The distance between
//! frames minimizes, over all bijections, the worst operator-norm distance
//! among matched pairs; below 1/2 the minimizing bijection is unique.

use itertools::Itertools;
use num_complex::Complex64;

use crate::error::MatrixError;
use crate::matrix::{identity, operator_norm, phase, range_unit_vector, CMat};
use crate::tol::Tolerances;

/// Brute-force bijection enumeration is capped at this dimension.
pub const BRUTE_FORCE_CAP: usize = 8;

/// Two sets of rank-one projections with a pairing `pset[i] ↔ qset[sigma[i]]`.
#[derive(Debug, Clone)]
pub struct ProjectionFrame {
    pub pset: Vec<CMat>,
    pub qset: Vec<CMat>,
    pub sigma: Vec<usize>,
}

impl ProjectionFrame {
    pub fn n(&self) -> usize {
        self.pset.len()
    }

    /// Verifies both lists consist of pairwise-orthogonal rank-one
    /// projections summing to the identity, and that `sigma` is a bijection.
    pub fn validate(&self, tol: &Tolerances) -> Result<(), MatrixError> {
        let n = self.n();
        if self.qset.len() != n || self.sigma.len() != n {
            return Err(MatrixError::InvalidFrame("length mismatch".into()));
        }
        let mut seen = vec![false; n];
        for &s in &self.sigma {
            if s >= n || seen[s] {
                return Err(MatrixError::InvalidFrame("sigma is not a bijection".into()));
            }
            seen[s] = true;
        }
        for (label, set) in [("pset", &self.pset), ("qset", &self.qset)] {
            let dim = set[0].nrows();
            let mut sum = CMat::zeros(dim, dim);
            for (i, p) in set.iter().enumerate() {
                let idem = operator_norm(&(p * p - p));
                let herm = operator_norm(&(p.adjoint() - p));
                let trace: Complex64 = p.diagonal().iter().sum();
                if idem > tol.projection
                    || herm > tol.projection
                    || (trace - Complex64::new(1.0, 0.0)).norm() > 1e-6
                {
                    return Err(MatrixError::InvalidFrame(format!(
                        "{label}[{i}] is not a rank-one projection"
                    )));
                }
                for (j, q) in set.iter().enumerate() {
                    if i != j && operator_norm(&(p * q)) > tol.projection {
                        return Err(MatrixError::InvalidFrame(format!(
                            "{label}[{i}], {label}[{j}] not orthogonal"
                        )));
                    }
                }
                sum += p;
            }
            if operator_norm(&(sum - identity(dim))) > tol.projection {
                return Err(MatrixError::InvalidFrame(format!(
                    "{label} does not resolve the identity"
                )));
            }
        }
        Ok(())
    }
}

fn distance_table(p: &[CMat], q: &[CMat]) -> Vec<Vec<f64>> {
    p.iter()
        .map(|pi| q.iter().map(|qj| operator_norm(&(pi - qj))).collect())
        .collect()
}

/// Metric on frames: minimum over bijections τ of
/// `max_i max(‖P_i − τ(P_i)‖, ‖σ(P_i) − σ̃τ(P_i)‖)`, exact brute force.
pub fn bn_distance(f1: &ProjectionFrame, f2: &ProjectionFrame) -> Result<f64, MatrixError> {
    let n = f1.n();
    if n != f2.n() {
        return Err(MatrixError::InvalidFrame("dimension mismatch".into()));
    }
    if n > BRUTE_FORCE_CAP {
        return Err(MatrixError::DimensionTooLarge { n, cap: BRUTE_FORCE_CAP });
    }
    let dp = distance_table(&f1.pset, &f2.pset);
    // dq[i][k] = ‖σ1(P_i) − σ2(P̃_k)‖
    let dq: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|k| {
                    operator_norm(&(&f1.qset[f1.sigma[i]] - &f2.qset[f2.sigma[k]]))
                })
                .collect()
        })
        .collect();
    let mut best = f64::INFINITY;
    for tau in (0..n).permutations(n) {
        let mut worst: f64 = 0.0;
        for (i, &k) in tau.iter().enumerate() {
            worst = worst.max(dp[i][k]).max(dq[i][k]);
        }
        best = best.min(worst);
    }
    Ok(best)
}

/// Result of matching two lists of projections.
#[derive(Debug, Clone)]
pub struct Matching {
    /// `bijection[i]` pairs `p[i]` with `q[bijection[i]]`.
    pub bijection: Vec<usize>,
    /// Worst matched operator-norm distance.
    pub maxdist: f64,
    /// True when `maxdist < 1/2`, the uniqueness threshold.
    pub unique: bool,
}

/// Minimizes the worst pairwise distance over all bijections. Errors with
/// `NoUniqueMatch` when even the best matching reaches 1/2, because the
/// minimizer is then no longer guaranteed unique.
pub fn match_projections(p: &[CMat], q: &[CMat]) -> Result<Matching, MatrixError> {
    let n = p.len();
    assert_eq!(n, q.len(), "projection lists must have equal length");
    if n > BRUTE_FORCE_CAP {
        return Err(MatrixError::DimensionTooLarge { n, cap: BRUTE_FORCE_CAP });
    }
    let table = distance_table(p, q);
    let mut best: Option<(Vec<usize>, f64)> = None;
    for tau in (0..n).permutations(n) {
        let worst = tau
            .iter()
            .enumerate()
            .map(|(i, &k)| table[i][k])
            .fold(0.0, f64::max);
        if best.as_ref().is_none_or(|(_, b)| worst < *b) {
            best = Some((tau, worst));
        }
    }
    let (bijection, maxdist) = best.expect("n ≥ 0 always yields a candidate");
    if maxdist >= 0.5 {
        return Err(MatrixError::NoUniqueMatch { maxdist });
    }
    Ok(Matching { bijection, maxdist, unique: true })
}

/// A frame together with a unitary realizing the pairing.
#[derive(Debug, Clone)]
pub struct IntertwinerPoint {
    pub frame: ProjectionFrame,
    pub u: CMat,
}

impl IntertwinerPoint {
    /// `U` unitary and `U pset[i] U* = qset[sigma[i]]` for all i.
    pub fn validate(&self, tol: &Tolerances) -> Result<(), MatrixError> {
        self.frame.validate(tol)?;
        let n = self.u.nrows();
        let uu = operator_norm(&(&self.u * self.u.adjoint() - identity(n)));
        if uu > tol.projection {
            return Err(MatrixError::InvalidFrame(format!("U not unitary: {uu:.3e}")));
        }
        for (i, p) in self.frame.pset.iter().enumerate() {
            let conj = &self.u * p * self.u.adjoint();
            let defect = operator_norm(&(conj - &self.frame.qset[self.frame.sigma[i]]));
            if defect > tol.projection {
                return Err(MatrixError::InvalidFrame(format!(
                    "U does not intertwine pair {i}: {defect:.3e}"
                )));
            }
        }
        Ok(())
    }
}

/// Fiber coordinates of `other` relative to `base` over a shared frame:
/// the unique unit scalars `z_i` with
/// `other.u = Σ_i z_i · qset[sigma[i]] · base.u · pset[i]`.
pub fn torus_coordinates(
    base: &IntertwinerPoint,
    other: &IntertwinerPoint,
    tol: &Tolerances,
) -> Result<Vec<Complex64>, MatrixError> {
    let n = base.frame.n();
    if other.frame.n() != n || base.frame.sigma != other.frame.sigma {
        return Err(MatrixError::FrameMismatch { defect: f64::INFINITY });
    }
    let mut defect: f64 = 0.0;
    for i in 0..n {
        defect = defect
            .max(operator_norm(&(&base.frame.pset[i] - &other.frame.pset[i])))
            .max(operator_norm(&(&base.frame.qset[i] - &other.frame.qset[i])));
    }
    if defect > tol.projection {
        return Err(MatrixError::FrameMismatch { defect });
    }

    let mut coords = Vec::with_capacity(n);
    for i in 0..n {
        let v = range_unit_vector(&base.frame.pset[i]);
        let bv = &base.u * &v;
        let ov = &other.u * &v;
        let z = (bv.adjoint() * &ov)[(0, 0)];
        if (z.norm() - 1.0).abs() > 100.0 * tol.projection {
            return Err(MatrixError::InvalidFrame(format!(
                "torus coordinate {i} has modulus {:.6}, expected 1",
                z.norm()
            )));
        }
        coords.push(phase(z));
    }

    // Reconstruction: other.u must equal Σ z_i σ(P_i) base.u P_i.
    let dim = base.u.nrows();
    let mut rec = CMat::zeros(dim, dim);
    for i in 0..n {
        let term = &base.frame.qset[base.frame.sigma[i]] * &base.u * &base.frame.pset[i];
        rec += term.map(|x| x * coords[i]);
    }
    let rec_defect = operator_norm(&(rec - &other.u));
    if rec_defect > 100.0 * tol.projection {
        return Err(MatrixError::InvalidFrame(format!(
            "torus reconstruction defect {rec_defect:.3e}"
        )));
    }
    Ok(coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::CVec;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Random unitary via Gram-Schmidt on a random complex matrix.
    pub(crate) fn random_unitary(n: usize, rng: &mut StdRng) -> CMat {
        loop {
            let g = CMat::from_fn(n, n, |_, _| {
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            if let Some(qr) = gram_schmidt(&g) {
                return qr;
            }
        }
    }

    fn gram_schmidt(m: &CMat) -> Option<CMat> {
        let n = m.nrows();
        let mut cols: Vec<CVec> = Vec::new();
        for j in 0..n {
            let mut v = m.column(j).into_owned();
            for u in &cols {
                let proj = (u.adjoint() * &v)[(0, 0)];
                v -= u.map(|x| x * proj);
            }
            let norm = v.norm();
            if norm < 1e-6 {
                return None;
            }
            cols.push(v.unscale(norm));
        }
        let mut out = CMat::zeros(n, n);
        for (j, col) in cols.iter().enumerate() {
            out.set_column(j, col);
        }
        Some(out)
    }

    pub(crate) fn random_frame(n: usize, rng: &mut StdRng) -> ProjectionFrame {
        let up = random_unitary(n, rng);
        let uq = random_unitary(n, rng);
        let pset: Vec<CMat> = (0..n)
            .map(|j| {
                let v = up.column(j).into_owned();
                &v * v.adjoint()
            })
            .collect();
        let qset: Vec<CMat> = (0..n)
            .map(|j| {
                let v = uq.column(j).into_owned();
                &v * v.adjoint()
            })
            .collect();
        let mut sigma: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            sigma.swap(i, j);
        }
        ProjectionFrame { pset, qset, sigma }
    }

    #[test]
    fn distance_of_frame_to_itself_is_zero() {
        let mut rng = StdRng::seed_from_u64(1);
        let f = random_frame(3, &mut rng);
        f.validate(&Tolerances::default()).unwrap();
        assert!(bn_distance(&f, &f).unwrap() < 1e-12);
    }

    #[test]
    fn distance_invariant_under_relabeling() {
        let mut rng = StdRng::seed_from_u64(2);
        let f = random_frame(3, &mut rng);
        // Relabel pset by a permutation, composing sigma accordingly.
        let perm = [2usize, 0, 1];
        let pset: Vec<CMat> = perm.iter().map(|&i| f.pset[i].clone()).collect();
        let sigma: Vec<usize> = perm.iter().map(|&i| f.sigma[i]).collect();
        let g = ProjectionFrame { pset, qset: f.qset.clone(), sigma };
        assert!(bn_distance(&f, &g).unwrap() < 1e-12);
    }

    #[test]
    fn metric_axioms_on_random_triples() {
        let mut rng = StdRng::seed_from_u64(3);
        let tol = 1e-12;
        for _ in 0..100 {
            let n = rng.random_range(2..=3);
            let f = random_frame(n, &mut rng);
            let g = random_frame(n, &mut rng);
            let h = random_frame(n, &mut rng);
            let fg = bn_distance(&f, &g).unwrap();
            let gf = bn_distance(&g, &f).unwrap();
            assert!((fg - gf).abs() <= tol, "symmetry violated: {fg} vs {gf}");
            let gh = bn_distance(&g, &h).unwrap();
            let fh = bn_distance(&f, &h).unwrap();
            assert!(fh <= fg + gh + tol, "triangle violated: {fh} > {fg} + {gh}");
        }
    }

    #[test]
    fn dimension_cap_enforced() {
        let mut rng = StdRng::seed_from_u64(4);
        let f = random_frame(2, &mut rng);
        let mut big = f.clone();
        // Fake a too-large frame by padding sigma only; validate is skipped.
        big.sigma = (0..9).collect();
        big.pset = (0..9).map(|_| CMat::zeros(2, 2)).collect();
        big.qset = big.pset.clone();
        assert!(matches!(
            bn_distance(&big, &big),
            Err(MatrixError::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn matching_identical_lists_is_identity() {
        let mut rng = StdRng::seed_from_u64(5);
        let f = random_frame(4, &mut rng);
        let m = match_projections(&f.pset, &f.pset).unwrap();
        assert_eq!(m.bijection, vec![0, 1, 2, 3]);
        assert!(m.maxdist < 1e-12);
        assert!(m.unique);
    }

    #[test]
    fn matching_agrees_with_brute_force_and_is_unique_below_half() {
        let mut rng = StdRng::seed_from_u64(6);
        for _ in 0..50 {
            let n = rng.random_range(2..=4);
            let u = random_unitary(n, &mut rng);
            let p: Vec<CMat> = (0..n)
                .map(|j| {
                    let v = u.column(j).into_owned();
                    &v * v.adjoint()
                })
                .collect();
            // Perturb each projection slightly by conjugating with a unitary
            // close to the identity, then shuffle.
            let eps = 0.08;
            let h = CMat::from_fn(n, n, |i, j| {
                if i == j {
                    c(0.0, 0.0)
                } else {
                    c(rng.random_range(-eps..eps), rng.random_range(-eps..eps))
                }
            });
            let h = (&h - h.adjoint()).scale(0.5);
            let w = (identity(n) + &h) * (identity(n) - &h).try_inverse().unwrap();
            let mut order: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = rng.random_range(0..=i);
                order.swap(i, j);
            }
            let q: Vec<CMat> = order.iter().map(|&j| &w * &p[j] * w.adjoint()).collect();
            let m = match_projections(&p, &q).unwrap();
            assert!(m.maxdist < 0.5);
            // The matching must invert the shuffle.
            for (i, &k) in m.bijection.iter().enumerate() {
                assert_eq!(order[k], i);
            }
            // Exhaustive check: exactly one bijection achieves the minimum.
            let table = distance_table(&p, &q);
            let mut minima = 0;
            for tau in (0..n).permutations(n) {
                let worst = tau
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| table[i][k])
                    .fold(0.0, f64::max);
                if worst <= m.maxdist + 1e-12 {
                    minima += 1;
                }
            }
            assert_eq!(minima, 1, "minimizer not unique below 1/2");
        }
    }

    #[test]
    fn torus_coordinates_of_base_is_ones_and_global_phase_is_constant() {
        let tol = Tolerances::default();
        let mut rng = StdRng::seed_from_u64(7);
        let n = 3;
        let u = random_unitary(n, &mut rng);
        let w = random_unitary(n, &mut rng);
        let pset: Vec<CMat> = (0..n)
            .map(|j| {
                let v = u.column(j).into_owned();
                &v * v.adjoint()
            })
            .collect();
        let qset: Vec<CMat> = (0..n)
            .map(|j| {
                let v = w.column(j).into_owned();
                &v * v.adjoint()
            })
            .collect();
        let frame = ProjectionFrame { pset, qset, sigma: (0..n).collect() };
        // Build an intertwiner mapping each p-line to the matching q-line.
        let mut uu = CMat::zeros(n, n);
        for j in 0..n {
            let vj = u.column(j).into_owned();
            let wj = w.column(j).into_owned();
            uu += &wj * vj.adjoint();
        }
        let base = IntertwinerPoint { frame: frame.clone(), u: uu.clone() };
        base.validate(&tol).unwrap();

        let same = torus_coordinates(&base, &base, &tol).unwrap();
        for z in &same {
            assert!((z - c(1.0, 0.0)).norm() < 1e-10);
        }

        let zeta = Complex64::from_polar(1.0, 0.77);
        let other = IntertwinerPoint { frame: frame.clone(), u: uu.map(|x| x * zeta) };
        let coords = torus_coordinates(&base, &other, &tol).unwrap();
        for z in &coords {
            assert!((z - zeta).norm() < 1e-10);
        }
    }

    #[test]
    fn torus_coordinates_round_trip() {
        let tol = Tolerances::default();
        let mut rng = StdRng::seed_from_u64(8);
        for _ in 0..100 {
            let n = rng.random_range(2..=4);
            let u = random_unitary(n, &mut rng);
            let w = random_unitary(n, &mut rng);
            let pset: Vec<CMat> = (0..n)
                .map(|j| {
                    let v = u.column(j).into_owned();
                    &v * v.adjoint()
                })
                .collect();
            let qset: Vec<CMat> = (0..n)
                .map(|j| {
                    let v = w.column(j).into_owned();
                    &v * v.adjoint()
                })
                .collect();
            let frame = ProjectionFrame { pset, qset, sigma: (0..n).collect() };
            let mut uu = CMat::zeros(n, n);
            for j in 0..n {
                let vj = u.column(j).into_owned();
                let wj = w.column(j).into_owned();
                uu += &wj * vj.adjoint();
            }
            let base = IntertwinerPoint { frame: frame.clone(), u: uu.clone() };

            let phases: Vec<Complex64> = (0..n)
                .map(|_| Complex64::from_polar(1.0, rng.random_range(-3.1..3.1)))
                .collect();
            // Apply the phases through the fiber parametrization.
            let mut applied = CMat::zeros(n, n);
            for i in 0..n {
                let term = &frame.qset[frame.sigma[i]] * &uu * &frame.pset[i];
                applied += term.map(|x| x * phases[i]);
            }
            let other = IntertwinerPoint { frame: frame.clone(), u: applied };
            let recovered = torus_coordinates(&base, &other, &tol).unwrap();
            for (z, expected) in recovered.iter().zip(&phases) {
                assert!((z - expected).norm() < 1e-10, "round trip failed");
            }
        }
    }
}
