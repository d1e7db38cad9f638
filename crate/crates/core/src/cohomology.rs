//! Cellular cochain complexes with `Z^n` coefficients twisted by a local
//! system, and their cohomology via exact Smith normal form.
//!
//! A k-cochain stores one integer vector per k-cell, anchored at the cell's
//! base (minimal) vertex. The coboundary on a (k+1)-cell sums its faces'
//! values with incidence signs, each value transported to the cell's base
//! vertex along the direct edge between the two base vertices, with the
//! overall sign `−(−1)^k`. Validated 2-cell consistency of the system makes
//! transport path-independent inside every cell, which is exactly what makes
//! `δ∘δ = 0` hold in exact integer arithmetic.

use std::cell::OnceCell;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::complexes::SimplicialComplex;
use crate::error::CohomologyError;
use crate::monodromy::{LocalSystem, Perm};
use crate::snf::{smith_normal_form_verified, solve_integer, IntMat, SnfResult};

/// Automorphism of `Z^n` by a signed permutation: `e_i ↦ sign[i] · e_{perm[i]}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPerm {
    perm: Vec<usize>,
    sign: Vec<i8>,
}

impl SignedPerm {
    pub fn identity(n: usize) -> SignedPerm {
        SignedPerm { perm: (0..n).collect(), sign: vec![1; n] }
    }

    pub fn from_perm(p: &Perm) -> SignedPerm {
        SignedPerm { perm: p.images().to_vec(), sign: vec![1; p.n()] }
    }

    /// The sign automorphism of `Z` (n = 1).
    pub fn negation() -> SignedPerm {
        SignedPerm { perm: vec![0], sign: vec![-1] }
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn apply_index(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn sign_of(&self, i: usize) -> i8 {
        self.sign[i]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SignedPerm) -> SignedPerm {
        let n = self.n();
        let mut perm = vec![0; n];
        let mut sign = vec![1i8; n];
        for i in 0..n {
            perm[i] = self.perm[other.perm[i]];
            sign[i] = other.sign[i] * self.sign[other.perm[i]];
        }
        SignedPerm { perm, sign }
    }

    pub fn inverse(&self) -> SignedPerm {
        let n = self.n();
        let mut perm = vec![0; n];
        let mut sign = vec![1i8; n];
        for i in 0..n {
            perm[self.perm[i]] = i;
            sign[self.perm[i]] = self.sign[i];
        }
        SignedPerm { perm, sign }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &j)| i == j)
            && self.sign.iter().all(|&s| s == 1)
    }

    /// Applies to an integer vector.
    pub fn apply_vec(&self, v: &[i64]) -> Vec<i64> {
        let mut out = vec![0; v.len()];
        for (i, &x) in v.iter().enumerate() {
            out[self.perm[i]] = self.sign[i] as i64 * x;
        }
        out
    }
}

/// One `Z^n` automorphism per edge (canonical direction); the discrete
/// coefficient data of a twisted system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientSystem {
    pub n: usize,
    edge_auts: Vec<SignedPerm>,
}

impl CoefficientSystem {
    pub fn trivial(n: usize, c: &SimplicialComplex) -> CoefficientSystem {
        CoefficientSystem {
            n,
            edge_auts: vec![SignedPerm::identity(n); c.edges().len()],
        }
    }

    pub fn from_local_system(ls: &LocalSystem, c: &SimplicialComplex) -> CoefficientSystem {
        CoefficientSystem {
            n: ls.n,
            edge_auts: (0..c.edges().len())
                .map(|e| SignedPerm::from_perm(ls.forward(e)))
                .collect(),
        }
    }

    /// The sign system on a circle: `Z` coefficients where the loop's
    /// monodromy is −1, realized on the single non-tree edge.
    pub fn sign_system_on_circle(c: &SimplicialComplex) -> CoefficientSystem {
        let tree = c.spanning_tree();
        let mut edge_auts = vec![SignedPerm::identity(1); c.edges().len()];
        for &e in &tree.non_tree_edges {
            edge_auts[e] = SignedPerm::negation();
        }
        CoefficientSystem { n: 1, edge_auts }
    }

    pub fn transport(&self, edge: usize, forward: bool) -> SignedPerm {
        if forward {
            self.edge_auts[edge].clone()
        } else {
            self.edge_auts[edge].inverse()
        }
    }

    /// Transport from vertex `a` to vertex `b` along their direct edge.
    fn step(&self, c: &SimplicialComplex, a: usize, b: usize) -> SignedPerm {
        if a == b {
            return SignedPerm::identity(self.n);
        }
        let key = if a < b { [a, b] } else { [b, a] };
        let e = c
            .edge_index(key)
            .expect("base vertices of incident cells span an edge");
        self.transport(e, a < b)
    }

    /// 2-cell consistency: identity composite around every triangle.
    pub fn validate(&self, c: &SimplicialComplex) -> Result<(), CohomologyError> {
        for (fi, f) in c.triangles().iter().enumerate() {
            let (a, b, cc) = (f[0], f[1], f[2]);
            let composite = self
                .step(c, cc, a)
                .compose(&self.step(c, b, cc))
                .compose(&self.step(c, a, b));
            if !composite.is_identity() {
                return Err(CohomologyError::InvalidSystem(format!(
                    "triangle {fi} has non-identity boundary composite"
                )));
            }
        }
        Ok(())
    }
}

/// Integer vector per k-cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedCochain {
    pub degree: usize,
    pub n: usize,
    /// Flattened blocks: `values[cell * n + i]`.
    pub values: Vec<i64>,
}

impl TwistedCochain {
    pub fn zero(degree: usize, n: usize, cells: usize) -> TwistedCochain {
        TwistedCochain { degree, n, values: vec![0; cells * n] }
    }

    pub fn block(&self, cell: usize) -> &[i64] {
        &self.values[cell * self.n..(cell + 1) * self.n]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &TwistedCochain) -> TwistedCochain {
        assert_eq!(self.degree, other.degree);
        assert_eq!(self.values.len(), other.values.len());
        TwistedCochain {
            degree: self.degree,
            n: self.n,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &TwistedCochain) -> TwistedCochain {
        assert_eq!(self.degree, other.degree);
        assert_eq!(self.values.len(), other.values.len());
        TwistedCochain {
            degree: self.degree,
            n: self.n,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    fn to_bigint(&self) -> Vec<BigInt> {
        self.values.iter().map(|&x| BigInt::from(x)).collect()
    }
}

/// Free rank plus invariant factors of a twisted cohomology group.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct CohomologyGroup {
    pub free_rank: usize,
    /// Torsion invariant factors (> 1), each dividing the next.
    pub torsion: Vec<u64>,
}

impl CohomologyGroup {
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl std::fmt::Display for CohomologyGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank == 1 {
            parts.push("Z".to_string());
        } else if self.free_rank > 1 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}

/// The cochain complex of one (complex, coefficient system) pair, with the
/// three coboundary matrices and cached Smith normal forms.
pub struct TwistedComplex<'a> {
    pub complex: &'a SimplicialComplex,
    pub coeff: CoefficientSystem,
    /// `delta[k]` maps k-cochains to (k+1)-cochains; `delta[2]` maps into
    /// 3-cochains (zero rows when the complex has no tetrahedra).
    pub delta: [IntMat; 3],
    snf: [OnceCell<SnfResult>; 3],
}

fn dold_sign(k: usize) -> i64 {
    // −(−1)^k
    if k % 2 == 0 {
        -1
    } else {
        1
    }
}

impl<'a> TwistedComplex<'a> {
    pub fn new(
        complex: &'a SimplicialComplex,
        coeff: CoefficientSystem,
    ) -> Result<TwistedComplex<'a>, CohomologyError> {
        coeff.validate(complex)?;
        let delta = coboundary_matrices(complex, &coeff);
        let tc = TwistedComplex {
            complex,
            coeff,
            delta,
            snf: [OnceCell::new(), OnceCell::new(), OnceCell::new()],
        };
        // δ∘δ = 0 exactly, in both degrees.
        if !tc.delta[1].mul(&tc.delta[0]).is_zero() {
            return Err(CohomologyError::InvalidSystem("δ1·δ0 ≠ 0".into()));
        }
        if !tc.delta[2].mul(&tc.delta[1]).is_zero() {
            return Err(CohomologyError::InvalidSystem("δ2·δ1 ≠ 0".into()));
        }
        Ok(tc)
    }

    pub fn n(&self) -> usize {
        self.coeff.n
    }

    fn snf_of(&self, k: usize) -> &SnfResult {
        self.snf[k].get_or_init(|| smith_normal_form_verified(&self.delta[k]))
    }

    fn cochain_dim(&self, k: usize) -> usize {
        let cells = match k {
            0 => self.complex.vertex_count(),
            1 => self.complex.edges().len(),
            2 => self.complex.triangles().len(),
            3 => self.complex.tets().len(),
            _ => 0,
        };
        cells * self.n()
    }

    /// `H^k = ker δ_k / im δ_{k−1}` for k in {0, 1, 2}.
    pub fn cohomology_group(&self, k: usize) -> CohomologyGroup {
        assert!(k <= 2, "only degrees 0..=2 are computed");
        let rank_k = self.snf_of(k).rank();
        let kernel = self.cochain_dim(k) - rank_k;
        if k == 0 {
            return CohomologyGroup { free_rank: kernel, torsion: Vec::new() };
        }
        let below = self.snf_of(k - 1);
        let free_rank = kernel - below.rank();
        let torsion = below
            .torsion()
            .iter()
            .map(|t| u64::try_from(t).expect("torsion factor fits in u64"))
            .collect();
        CohomologyGroup { free_rank, torsion }
    }

    /// Applies `δ_k` to a k-cochain.
    pub fn apply_delta(&self, f: &TwistedCochain) -> TwistedCochain {
        assert_eq!(f.degree + 1, f.degree + 1);
        let k = f.degree;
        let out = self.delta[k].mul_vec(&f.to_bigint());
        TwistedCochain {
            degree: k + 1,
            n: f.n,
            values: out
                .iter()
                .map(|x| i64::try_from(x).expect("coboundary entry fits in i64"))
                .collect(),
        }
    }

    /// Cocycle test in degree 2: `δ2 · θ = 0`.
    pub fn is_cocycle(&self, theta: &TwistedCochain) -> bool {
        assert_eq!(theta.degree, 2);
        self.delta[2]
            .mul_vec(&theta.to_bigint())
            .iter()
            .all(|x| x.is_zero())
    }

    /// Solves `δ1 · g = θ` over the integers: `Some(g)` exactly when the
    /// class of `θ` vanishes. Errors when `θ` is not a cocycle.
    pub fn is_coboundary(
        &self,
        theta: &TwistedCochain,
    ) -> Result<Option<TwistedCochain>, CohomologyError> {
        assert_eq!(theta.degree, 2);
        if theta.values.len() != self.cochain_dim(2) {
            return Err(CohomologyError::ShapeMismatch(format!(
                "degree-2 cochain has {} entries, complex wants {}",
                theta.values.len(),
                self.cochain_dim(2)
            )));
        }
        if let Some(bad) = self
            .delta[2]
            .mul_vec(&theta.to_bigint())
            .iter()
            .position(|x| !x.is_zero())
        {
            return Err(CohomologyError::NotACocycle(bad / self.n()));
        }
        let snf = self.snf_of(1);
        match solve_integer(&self.delta[1], snf, &theta.to_bigint()) {
            None => Ok(None),
            Some(g) => {
                let values: Result<Vec<i64>, _> = g
                    .iter()
                    .map(|x| {
                        i64::try_from(x).map_err(|_| {
                            CohomologyError::Overflow(format!("primitive entry {x}"))
                        })
                    })
                    .collect();
                let primitive = TwistedCochain { degree: 1, n: self.n(), values: values? };
                debug_assert_eq!(self.apply_delta(&primitive), *theta);
                Ok(Some(primitive))
            }
        }
    }

    /// Whether two degree-2 cocycles are cohomologous.
    pub fn classes_equal(
        &self,
        t1: &TwistedCochain,
        t2: &TwistedCochain,
    ) -> Result<bool, CohomologyError> {
        Ok(self.is_coboundary(&t1.sub(t2))?.is_some())
    }
}

/// Assembles the three twisted coboundary matrices.
pub fn coboundary_matrices(
    c: &SimplicialComplex,
    coeff: &CoefficientSystem,
) -> [IntMat; 3] {
    let n = coeff.n;
    let nv = c.vertex_count();
    let ne = c.edges().len();
    let nf = c.triangles().len();
    let nt = c.tets().len();

    let mut d0 = IntMat::zeros(ne * n, nv * n);
    for (s, e) in c.edges().iter().enumerate() {
        let base = e[0];
        // ∂(uv) = v − u; values transported to the base vertex u.
        for (vtx, inc) in [(e[1], 1i64), (e[0], -1i64)] {
            let t = coeff.step(c, vtx, base);
            for i in 0..n {
                d0[(s * n + t.apply_index(i), vtx * n + i)] +=
                    BigInt::from(dold_sign(0) * inc * t.sign_of(i) as i64);
            }
        }
    }

    let mut d1 = IntMat::zeros(nf * n, ne * n);
    for (s, f) in c.triangles().iter().enumerate() {
        let base = f[0];
        let faces = [
            ([f[1], f[2]], 1i64),
            ([f[0], f[2]], -1i64),
            ([f[0], f[1]], 1i64),
        ];
        for (edge, inc) in faces {
            let ei = c.edge_index(edge).unwrap();
            let t = coeff.step(c, edge[0], base);
            for i in 0..n {
                d1[(s * n + t.apply_index(i), ei * n + i)] +=
                    BigInt::from(dold_sign(1) * inc * t.sign_of(i) as i64);
            }
        }
    }

    let mut d2 = IntMat::zeros(nt * n, nf * n);
    for (s, tet) in c.tets().iter().enumerate() {
        let base = tet[0];
        for k in 0..4 {
            let mut face = [0usize; 3];
            let mut idx = 0;
            for (m, &v) in tet.iter().enumerate() {
                if m != k {
                    face[idx] = v;
                    idx += 1;
                }
            }
            let inc = if k % 2 == 0 { 1i64 } else { -1 };
            let fi = c.triangle_index(face).unwrap();
            let t = coeff.step(c, face[0], base);
            for i in 0..n {
                d2[(s * n + t.apply_index(i), fi * n + i)] +=
                    BigInt::from(dold_sign(2) * inc * t.sign_of(i) as i64);
            }
        }
    }

    [d0, d1, d2]
}
