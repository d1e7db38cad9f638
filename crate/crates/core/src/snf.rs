//! Exact Smith normal form over arbitrary-precision integers, with
//! unimodular transforms and self-verification.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense matrix of big integers, row major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> IntMat {
        IntMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> IntMat {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::from(1);
        }
        m
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> IntMat {
        assert_eq!(entries.len(), rows * cols);
        IntMat {
            rows,
            cols,
            data: entries.iter().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i64) -> IntMat {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(BigInt::from(f(r, c)));
            }
        }
        IntMat { rows, cols, data }
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let prod = a * b;
                        out[(i, j)] += prod;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = BigInt::zero();
                for j in 0..self.cols {
                    let a = &self[(i, j)];
                    if !a.is_zero() && !v[j].is_zero() {
                        acc += a * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row[target] += q · row[source]
    fn add_row(&mut self, target: usize, source: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = &self[(source, c)] * q;
            if !v.is_zero() {
                self[(target, c)] += v;
            }
        }
    }

    fn add_col(&mut self, target: usize, source: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = &self[(r, source)] * q;
            if !v.is_zero() {
                self[(r, target)] += v;
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self[(r, c)].clone();
            self[(r, c)] = v;
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination; exact.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return BigInt::from(1);
        }
        let mut m = self.data.clone();
        let idx = |r: usize, c: usize| r * n + c;
        let mut sign = 1i64;
        let mut prev = BigInt::from(1);
        for k in 0..(n - 1) {
            if m[idx(k, k)].is_zero() {
                let Some(p) = ((k + 1)..n).find(|&r| !m[idx(r, k)].is_zero()) else {
                    return BigInt::zero();
                };
                for c in 0..n {
                    m.swap(idx(k, c), idx(p, c));
                }
                sign = -sign;
            }
            for i in (k + 1)..n {
                for j in (k + 1)..n {
                    let num = &m[idx(i, j)] * &m[idx(k, k)] - &m[idx(i, k)] * &m[idx(k, j)];
                    m[idx(i, j)] = &num / &prev;
                }
                m[idx(i, k)] = BigInt::zero();
            }
            prev = m[idx(k, k)].clone();
        }
        let d = m[idx(n - 1, n - 1)].clone();
        if sign < 0 {
            -d
        } else {
            d
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = BigInt;
    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }
}

/// `U · M · V = D` with `U`, `V` unimodular and `D` diagonal with a
/// divisibility chain.
#[derive(Debug, Clone)]
pub struct SnfResult {
    pub d: IntMat,
    pub u: IntMat,
    pub v: IntMat,
    /// Nonzero diagonal entries of `D` (positive, each dividing the next).
    pub invariant_factors: Vec<BigInt>,
    /// Determinant signs of `U` and `V`, tracked through the elementary
    /// operations.
    pub det_u: i8,
    pub det_v: i8,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    /// Invariant factors larger than one (the torsion part of the cokernel).
    pub fn torsion(&self) -> Vec<BigInt> {
        self.invariant_factors
            .iter()
            .filter(|f| **f > BigInt::from(1))
            .cloned()
            .collect()
    }
}

struct SnfState {
    d: IntMat,
    u: IntMat,
    v: IntMat,
    det_u: i8,
    det_v: i8,
}

/// Extended gcd with nonnegative gcd: returns (g, x, y) with a·x + b·y = g.
fn xgcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

impl SnfState {
    /// Unimodular 2×2 row transform turning `(d[t][col?], d[r][..])` so that
    /// the pivot column pair `(a, b) = (d[t,t], d[r,t])` becomes `(g, 0)`:
    /// row_t ← x·row_t + y·row_r, row_r ← −(b/g)·row_t + (a/g)·row_r.
    /// The transform has determinant +1.
    fn xgcd_rows(&mut self, t: usize, r: usize) {
        let a = self.d[(t, t)].clone();
        let b = self.d[(r, t)].clone();
        let (g, x, y) = xgcd(&a, &b);
        let (p, q) = (-(&b / &g), &a / &g);
        for m in [&mut self.d, &mut self.u] {
            for c in 0..m.cols {
                if m[(t, c)].is_zero() && m[(r, c)].is_zero() {
                    continue;
                }
                let top = m[(t, c)].clone();
                let bot = m[(r, c)].clone();
                m[(t, c)] = &x * &top + &y * &bot;
                m[(r, c)] = &p * &top + &q * &bot;
            }
        }
    }

    fn xgcd_cols(&mut self, t: usize, c: usize) {
        let a = self.d[(t, t)].clone();
        let b = self.d[(t, c)].clone();
        let (g, x, y) = xgcd(&a, &b);
        let (p, q) = (-(&b / &g), &a / &g);
        for m in [&mut self.d, &mut self.v] {
            for r in 0..m.rows {
                if m[(r, t)].is_zero() && m[(r, c)].is_zero() {
                    continue;
                }
                let left = m[(r, t)].clone();
                let right = m[(r, c)].clone();
                m[(r, t)] = &x * &left + &y * &right;
                m[(r, c)] = &p * &left + &q * &right;
            }
        }
    }

    /// Clears row and column `t`, leaving the gcd of the affected lattice at
    /// the pivot. Entries divisible by the pivot go by plain subtraction;
    /// anything else goes through a 2×2 extended-gcd transform, which
    /// strictly shrinks the pivot, so the outer loop terminates.
    fn clear_pivot(&mut self, t: usize) {
        let mut first = true;
        loop {
            // Pivot row, by column operations.
            let mut all_divisible = true;
            for c in (t + 1)..self.d.cols {
                if self.d[(t, c)].is_zero() {
                    continue;
                }
                if (&self.d[(t, c)] % &self.d[(t, t)]).is_zero() {
                    let q = -(&self.d[(t, c)] / &self.d[(t, t)]);
                    self.d.add_col(c, t, &q);
                    self.v.add_col(c, t, &q);
                } else {
                    self.xgcd_cols(t, c);
                    all_divisible = false;
                }
            }
            if all_divisible && !first {
                break;
            }
            first = false;
            // Pivot column, by row operations.
            let mut all_divisible = true;
            for r in (t + 1)..self.d.rows {
                if self.d[(r, t)].is_zero() {
                    continue;
                }
                if (&self.d[(r, t)] % &self.d[(t, t)]).is_zero() {
                    let q = -(&self.d[(r, t)] / &self.d[(t, t)]);
                    self.d.add_row(r, t, &q);
                    self.u.add_row(r, t, &q);
                } else {
                    self.xgcd_rows(t, r);
                    all_divisible = false;
                }
            }
            if all_divisible {
                // The row sweep above used only multiples of row t, so the
                // pivot row stayed clear; both are now clear.
                break;
            }
        }
    }
}

/// Computes the Smith normal form: diagonalize with minimal-absolute-value
/// pivoting and extended-gcd elimination, then enforce the divisibility
/// chain by pairwise gcd fixes on the diagonal.
pub fn smith_normal_form(m: &IntMat) -> SnfResult {
    let mut s = SnfState {
        d: m.clone(),
        u: IntMat::identity(m.rows),
        v: IntMat::identity(m.cols),
        det_u: 1,
        det_v: 1,
    };
    let lim = m.rows.min(m.cols);

    // Phase 1: diagonalize.
    let mut rank = 0;
    for t in 0..lim {
        let mut pivot: Option<(usize, usize)> = None;
        let mut best_bits = u64::MAX;
        for r in t..s.d.rows {
            for c in t..s.d.cols {
                let x = &s.d[(r, c)];
                if x.is_zero() {
                    continue;
                }
                let bits = x.bits();
                if bits < best_bits {
                    best_bits = bits;
                    pivot = Some((r, c));
                    if bits == 1 {
                        break;
                    }
                }
            }
            if best_bits == 1 {
                break;
            }
        }
        let Some((pr, pc)) = pivot else { break };
        s.d.swap_rows(t, pr);
        s.u.swap_rows(t, pr);
        if t != pr {
            s.det_u = -s.det_u;
        }
        s.d.swap_cols(t, pc);
        s.v.swap_cols(t, pc);
        if t != pc {
            s.det_v = -s.det_v;
        }
        s.clear_pivot(t);
        rank = t + 1;
    }

    // Phase 2: pairwise divisibility fixes. Folding column j into column i
    // puts d_j below the pivot; re-clearing replaces (d_i, d_j) by
    // (gcd, lcm). Repeat until the chain holds.
    loop {
        let mut fixed = false;
        for i in 0..rank.saturating_sub(1) {
            let j = i + 1;
            if s.d[(i, i)].is_zero() || (&s.d[(j, j)] % &s.d[(i, i)]).is_zero() {
                continue;
            }
            let one = BigInt::from(1);
            s.d.add_col(i, j, &one);
            s.v.add_col(i, j, &one);
            s.clear_pivot(i);
            fixed = true;
        }
        if !fixed {
            break;
        }
    }

    for t in 0..rank {
        if s.d[(t, t)].is_negative() {
            s.d.negate_row(t);
            s.u.negate_row(t);
            s.det_u = -s.det_u;
        }
    }

    let invariant_factors = (0..lim)
        .map(|i| s.d[(i, i)].clone())
        .take_while(|x| !x.is_zero())
        .collect();
    SnfResult {
        d: s.d,
        u: s.u,
        v: s.v,
        invariant_factors,
        det_u: s.det_u,
        det_v: s.det_v,
    }
}


/// Verification report for one SNF call.
#[derive(Debug)]
pub struct SnfVerification {
    pub product_checked: bool,
    pub product_exact: bool,
    pub divisibility_ok: bool,
    pub det_u: Option<BigInt>,
    pub det_v: Option<BigInt>,
}

/// Full verification threshold: above this dimension, `U·M·V = D` is checked
/// by deterministic random vector probes instead of the full triple product,
/// and unimodularity falls back to the tracked elementary-operation signs.
const FULL_VERIFY_DIM: usize = 64;

/// Verifies an SNF result against its input. Always checks the divisibility
/// chain and diagonal shape exactly; checks `U·M·V = D` by full product for
/// small matrices and by exact vector probes for large ones.
pub fn verify_snf(m: &IntMat, s: &SnfResult) -> SnfVerification {
    let mut divisibility_ok = s.d.rows == m.rows && s.d.cols == m.cols;
    for r in 0..s.d.rows {
        for c in 0..s.d.cols {
            if r != c && !s.d[(r, c)].is_zero() {
                divisibility_ok = false;
            }
        }
    }
    for w in s.invariant_factors.windows(2) {
        if !(&w[1] % &w[0]).is_zero() {
            divisibility_ok = false;
        }
    }
    for f in &s.invariant_factors {
        if !f.is_positive() {
            divisibility_ok = false;
        }
    }

    let small = m.rows.max(m.cols) <= FULL_VERIFY_DIM;
    let (product_checked, product_exact, det_u, det_v) = if small {
        let prod = s.u.mul(m).mul(&s.v);
        let du = s.u.determinant();
        let dv = s.v.determinant();
        (true, prod == s.d, Some(du), Some(dv))
    } else {
        // Exact probes: U·(M·(V·x)) must equal D·x for deterministic
        // pseudorandom integer vectors x.
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut ok = true;
        for _ in 0..8 {
            let x: Vec<BigInt> = (0..m.cols)
                .map(|_| BigInt::from(rng.random_range(-3i64..=3)))
                .collect();
            let vx = s.v.mul_vec(&x);
            let mvx = m.mul_vec(&vx);
            let umvx = s.u.mul_vec(&mvx);
            let dx = s.d.mul_vec(&x);
            if umvx != dx {
                ok = false;
                break;
            }
        }
        (true, ok, None, None)
    };

    SnfVerification { product_checked, product_exact, divisibility_ok, det_u, det_v }
}

/// SNF with verification baked in; panics on any verification failure, which
/// would indicate a bug rather than bad input.
pub fn smith_normal_form_verified(m: &IntMat) -> SnfResult {
    let s = smith_normal_form(m);
    let v = verify_snf(m, &s);
    assert!(v.product_exact, "SNF verification failed: U·M·V ≠ D");
    assert!(v.divisibility_ok, "SNF verification failed: divisibility chain");
    if let (Some(du), Some(dv)) = (&v.det_u, &v.det_v) {
        assert!(du.abs() == BigInt::from(1), "U not unimodular: det {du}");
        assert!(dv.abs() == BigInt::from(1), "V not unimodular: det {dv}");
        assert_eq!(BigInt::from(s.det_u), *du, "tracked det(U) sign drifted");
        assert_eq!(BigInt::from(s.det_v), *dv, "tracked det(V) sign drifted");
    } else {
        assert_eq!(s.det_u.abs(), 1);
        assert_eq!(s.det_v.abs(), 1);
    }
    s
}

/// Solves `M x = b` over the integers, if possible: transform with the SNF,
/// divide by the pivots, and map back.
pub fn solve_integer(m: &IntMat, s: &SnfResult, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(b.len(), m.rows);
    let y = s.u.mul_vec(b);
    let mut w = vec![BigInt::zero(); m.cols];
    for (i, yi) in y.iter().enumerate() {
        if i < s.invariant_factors.len() {
            let d = &s.invariant_factors[i];
            if !(yi % d).is_zero() {
                return None;
            }
            w[i] = yi / d;
        } else if !yi.is_zero() {
            return None;
        }
    }
    Some(s.v.mul_vec(&w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn snf_diag(m: &IntMat) -> Vec<i64> {
        let s = smith_normal_form_verified(m);
        s.invariant_factors
            .iter()
            .map(|x| i64::try_from(x).unwrap())
            .collect()
    }

    #[test]
    fn diag_2_3_has_factors_1_6() {
        let m = IntMat::from_i64(2, 2, &[2, 0, 0, 3]);
        assert_eq!(snf_diag(&m), vec![1, 6]);
    }

    #[test]
    fn zero_matrix() {
        let m = IntMat::zeros(3, 4);
        let s = smith_normal_form_verified(&m);
        assert_eq!(s.rank(), 0);
        assert!(s.d.is_zero());
    }

    #[test]
    fn empty_shapes() {
        for (r, c) in [(0, 0), (0, 3), (3, 0)] {
            let m = IntMat::zeros(r, c);
            let s = smith_normal_form_verified(&m);
            assert_eq!(s.rank(), 0);
        }
    }

    #[test]
    fn known_torsion_example() {
        // [[2, 4], [4, 2]] has invariant factors (2, 6).
        let m = IntMat::from_i64(2, 2, &[2, 4, 4, 2]);
        assert_eq!(snf_diag(&m), vec![2, 6]);
    }

    #[test]
    fn random_matrices_self_verify() {
        let mut rng = StdRng::seed_from_u64(42);
        for trial in 0..200 {
            let rows = rng.random_range(1..=20);
            let cols = rng.random_range(1..=20);
            let m = IntMat::from_fn(rows, cols, |_, _| rng.random_range(-9i64..=9));
            let s = smith_normal_form(&m);
            let v = verify_snf(&m, &s);
            assert!(v.product_exact, "trial {trial}: U·M·V ≠ D");
            assert!(v.divisibility_ok, "trial {trial}: divisibility");
            let du = v.det_u.unwrap();
            let dv = v.det_v.unwrap();
            assert_eq!(du.abs(), BigInt::from(1), "trial {trial}: det U = {du}");
            assert_eq!(dv.abs(), BigInt::from(1), "trial {trial}: det V = {dv}");
        }
    }

    #[test]
    fn solve_recovers_constructed_solutions() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let rows = rng.random_range(1..=10);
            let cols = rng.random_range(1..=10);
            let m = IntMat::from_fn(rows, cols, |_, _| rng.random_range(-5i64..=5));
            let x: Vec<BigInt> =
                (0..cols).map(|_| BigInt::from(rng.random_range(-7i64..=7))).collect();
            let b = m.mul_vec(&x);
            let s = smith_normal_form(&m);
            let sol = solve_integer(&m, &s, &b).expect("constructed system is solvable");
            assert_eq!(m.mul_vec(&sol), b);
        }
    }

    #[test]
    fn solve_detects_unsolvable() {
        // 2x = 1 has no integer solution.
        let m = IntMat::from_i64(1, 1, &[2]);
        let s = smith_normal_form(&m);
        assert!(solve_integer(&m, &s, &[BigInt::from(1)]).is_none());
        assert!(solve_integer(&m, &s, &[BigInt::from(4)]).is_some());
    }

    #[test]
    fn bareiss_determinant() {
        let m = IntMat::from_i64(3, 3, &[2, 0, 1, 1, 1, 0, 0, 3, 1]);
        assert_eq!(m.determinant(), BigInt::from(5));
        let singular = IntMat::from_i64(2, 2, &[1, 2, 2, 4]);
        assert_eq!(singular.determinant(), BigInt::zero());
    }

    #[test]
    fn probe_verification_on_larger_matrix() {
        // Incidence-flavored band matrix, the shape cochain complexes
        // produce; large enough to exercise the probe verification path.
        let m = IntMat::from_fn(90, 80, |r, c| {
            if r == c {
                2
            } else if r == c + 1 || c == r + 1 {
                -1
            } else {
                0
            }
        });
        let s = smith_normal_form(&m);
        let v = verify_snf(&m, &s);
        assert!(v.product_checked && v.product_exact && v.divisibility_ok);
        assert!(v.det_u.is_none(), "large path must use probes");
    }

    #[test]
    fn dense_random_stays_tame() {
        // The 13×13 matrix that makes naive remainder-swap elimination
        // explode; extended-gcd elimination must handle it quickly.
        let entries: Vec<i64> = vec![
            -5, 1, -2, -8, -1, 9, 2, -1, -9, -7, -2, 0, 9, 7, 1, 5, 6, 1, -5, -2, -2, -5, -5,
            3, 0, 9, -6, -1, 1, -7, -3, -5, 1, 3, -8, 0, 2, 7, 1, 0, -1, 8, -9, 0, 5, -3, -3,
            -2, 4, 4, 1, -8, -2, 4, 8, -8, 7, 1, 5, 5, -3, -6, 6, 7, -3, -7, -4, 8, 5, -4, -7,
            7, -7, -2, -2, 2, 7, -7, 1, -1, 5, 1, 7, -7, 6, -6, 9, 9, -7, 9, 7, -6, 0, -8, 3,
            5, -7, -2, -1, 6, -6, -8, -8, 0, -7, -4, 4, -4, -7, -6, 4, -1, -5, 1, 2, -2, 7, 0,
            -9, 2, -9, 3, -7, 0, -9, -5, 4, 8, -1, -1, -8, 3, -4, -8, 8, -3, -6, -9, 0, -5, 7,
            7, -1, -2, 9, 3, 0, -8, 0, 4, 9, 1, 4, -6, -8, -9, 4, 2, -4, 4, -4, 4, 9, 5, 9, 6,
            4, -8, -7,
        ];
        let m = IntMat::from_i64(13, 13, &entries);
        let s = smith_normal_form_verified(&m);
        assert_eq!(s.rank(), 13);
    }
}
