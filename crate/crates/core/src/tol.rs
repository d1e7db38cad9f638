//! Central tolerance and threshold configuration.
//!
//! Every numeric decision threshold used by the pipeline lives here, with one
//! default per knob. Construction errors (eigensolver residuals, projection
//! defects) sit around 1e-14; decision thresholds are kept at least two orders
//! of magnitude above them.

/// Thresholds shared by the whole pipeline.
#[derive(Debug, Clone)]
pub struct Tolerances {
    /// Relative normality test: `‖AA* − A*A‖ ≤ normality · max(1, ‖A‖²)`.
    pub normality: f64,
    /// Absolute defect allowed on projection invariants (idempotent,
    /// self-adjoint, orthogonal, resolution of identity, reconstruction).
    pub projection: f64,
    /// Minimal absolute pairwise eigenvalue gap; below this the field is
    /// treated as not multiplicity-free at the queried point.
    pub gap: f64,
    /// Maximal operator-norm distance accepted between consecutive spectral
    /// frames during edge transport. Must stay strictly under 1/2, the
    /// uniqueness bound for projection matching; 0.3 leaves margin for
    /// discretization error.
    pub match_threshold: f64,
    /// Minimal per-step overlap modulus during link transport; anything
    /// smaller aborts with a degenerate-overlap error.
    pub overlap_min: f64,
    /// Maximal winding residual, in cycles, tolerated before rounding a
    /// plaquette sum to an integer. 0.25 keeps integer rounding unambiguous
    /// and makes the cocycle identity exact on tetrahedra.
    pub residual_max: f64,
    /// Edge refinement doubles the step count at most this many times.
    pub max_edge_doublings: u32,
    /// Automatic subdivision retries when a winding residual is too large.
    pub max_subdiv_retries: u32,
    /// Vertexwise conjugation defect allowed for a synthesized intertwiner.
    pub intertwiner: f64,
    /// Default sampling density for admissibility checks.
    pub samples_per_simplex: usize,
    /// Eigenvalue multiset agreement threshold for characteristic-polynomial
    /// comparison.
    pub char_poly: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            normality: 1e-9,
            projection: 1e-8,
            gap: 1e-6,
            match_threshold: 0.3,
            overlap_min: 0.1,
            residual_max: 0.25,
            max_edge_doublings: 12,
            max_subdiv_retries: 3,
            intertwiner: 1e-6,
            samples_per_simplex: 8,
            char_poly: 1e-7,
        }
    }
}
