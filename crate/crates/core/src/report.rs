//! Serializable reports for the obstruction pipeline.

use num_complex::Complex64;
use serde::Serialize;

use crate::cohomology::CohomologyGroup;
use crate::error::ObstructionError;
use crate::fields::AdmissibilityReport;
use crate::matrix::canonical_cmp;
use crate::obstruction::{synthesize_intertwiner, IntertwinerCertificate, PairAnalysis};
use crate::fields::MatrixField;
use crate::tol::Tolerances;

#[derive(Debug, Clone, Serialize)]
pub struct MonodromySection {
    pub split: bool,
    /// Distinct nontrivial generator permutations, as index images.
    pub generators: Vec<Vec<usize>>,
    pub generator_count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CohomologySection {
    pub k: usize,
    pub free_rank: usize,
    pub torsion: Vec<u64>,
    pub group: String,
}

impl CohomologySection {
    pub fn from_group(k: usize, g: &CohomologyGroup) -> CohomologySection {
        CohomologySection {
            k,
            free_rank: g.free_rank,
            torsion: g.torsion.clone(),
            group: g.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ObstructionSection {
    /// Integer vector per 2-cell.
    pub cocycle: Vec<Vec<i64>>,
    pub vanishing: bool,
    /// Fundamental-cycle pairing in basepoint coordinates, when defined.
    pub rebased_class: Option<Vec<i64>>,
    pub residual_max: f64,
    /// Primitive 1-cochain per edge when the class vanishes.
    pub primitive: Option<Vec<Vec<i64>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexSection {
    pub chart: String,
    /// Cell counts by dimension 0..3.
    pub cells: [usize; 4],
    pub subdivisions_applied: u32,
    pub basepoint: usize,
}

/// The full report emitted by the CLI and the examples.
#[derive(Debug, Clone, Serialize)]
pub struct ObstructionReport {
    pub admissible: AdmissiblePair,
    pub same_char_poly: bool,
    pub monodromy: MonodromySection,
    #[serde(rename = "H2")]
    pub h2: CohomologySection,
    pub obstruction: ObstructionSection,
    pub intertwiner_certificate: Option<IntertwinerCertificate>,
    pub complex: ComplexSection,
    /// Basepoint eigenvalue order Λ as (re, im) pairs.
    pub basepoint_eigenvalues: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissiblePair {
    pub field_a: AdmissibilityReport,
    pub field_b: AdmissibilityReport,
}

impl ObstructionReport {
    /// Assembles the report, synthesizing an intertwiner when the class
    /// vanishes.
    pub fn from_analysis(
        a: &MatrixField,
        b: &MatrixField,
        analysis: &PairAnalysis,
        tol: &Tolerances,
    ) -> Result<ObstructionReport, ObstructionError> {
        let mut generators: Vec<Vec<usize>> = analysis
            .rep
            .generators
            .iter()
            .filter(|(_, p)| !p.is_identity())
            .map(|(_, p)| p.images().to_vec())
            .collect();
        generators.sort();
        generators.dedup();

        let cocycle: Vec<Vec<i64>> = (0..analysis.complex.triangles().len())
            .map(|s| analysis.obstruction.cochain.block(s).to_vec())
            .collect();
        let primitive = analysis.primitive.as_ref().map(|p| {
            (0..analysis.complex.edges().len())
                .map(|e| p.block(e).to_vec())
                .collect()
        });
        let intertwiner_certificate = if analysis.vanishing() {
            let (_, cert) = synthesize_intertwiner(a, b, analysis, tol)?;
            Some(cert)
        } else {
            None
        };

        Ok(ObstructionReport {
            admissible: AdmissiblePair {
                field_a: analysis.admissible_a.clone(),
                field_b: analysis.admissible_b.clone(),
            },
            same_char_poly: analysis.char_poly_mismatch <= tol.char_poly,
            monodromy: MonodromySection {
                split: analysis.rep.is_globally_split(),
                generators,
                generator_count: analysis.rep.generators.len(),
            },
            h2: CohomologySection::from_group(2, &analysis.h2),
            obstruction: ObstructionSection {
                cocycle,
                vanishing: analysis.vanishing(),
                rebased_class: analysis.rebased_class.clone(),
                residual_max: analysis.obstruction.residual_max,
                primitive,
            },
            intertwiner_certificate,
            complex: ComplexSection {
                chart: analysis.complex.chart_id().to_string(),
                cells: [
                    analysis.complex.vertex_count(),
                    analysis.complex.edges().len(),
                    analysis.complex.triangles().len(),
                    analysis.complex.tets().len(),
                ],
                subdivisions_applied: analysis.subdivisions,
                basepoint: analysis.complex.basepoint(),
            },
            basepoint_eigenvalues: analysis
                .gauge
                .base_eigenvalues
                .iter()
                .map(|z| [z.re, z.im])
                .collect(),
        })
    }
}

/// A class representative expressed against a caller-chosen eigenvalue
/// order at the basepoint.
#[derive(Debug, Clone, Serialize)]
pub struct RebasedClass {
    /// The eigenvalue order the components refer to, as (re, im) pairs.
    pub order: Vec<[f64; 2]>,
    /// Fundamental-cycle pairing in that order, when defined.
    pub pairing: Option<Vec<i64>>,
    /// The obstruction cochain re-indexed per 2-cell is not needed for
    /// comparisons (classes live over one system); the pairing plus the
    /// vanishing verdict identify the class for split targets.
    pub vanishing: bool,
}

/// Re-expresses the pairing vector of an analysis against a permuted
/// eigenvalue order. The given order must be a permutation of the canonical
/// basepoint eigenvalues.
pub fn rebase(
    analysis: &PairAnalysis,
    lambda_order: &[Complex64],
) -> Result<RebasedClass, ObstructionError> {
    let base = &analysis.gauge.base_eigenvalues;
    let n = base.len();
    if lambda_order.len() != n {
        return Err(ObstructionError::Inadmissible(format!(
            "rebase order has {} entries, expected {n}",
            lambda_order.len()
        )));
    }
    // Position of each requested eigenvalue in the canonical order.
    let mut perm = Vec::with_capacity(n);
    for want in lambda_order {
        let found = base
            .iter()
            .enumerate()
            .filter(|(i, z)| (**z - want).norm() < 1e-6 && !perm.contains(i))
            .map(|(i, _)| i)
            .next()
            .ok_or_else(|| {
                ObstructionError::Inadmissible(format!(
                    "rebase order entry {want} is not a basepoint eigenvalue"
                ))
            })?;
        perm.push(found);
    }
    let pairing = analysis
        .rebased_class
        .as_ref()
        .map(|p| perm.iter().map(|&i| p[i]).collect());
    Ok(RebasedClass {
        order: lambda_order.iter().map(|z| [z.re, z.im]).collect(),
        pairing,
        vanishing: analysis.vanishing(),
    })
}

/// The canonical eigenvalue order used everywhere: lexicographic on
/// (re, im).
pub fn canonical_order(mut eigenvalues: Vec<Complex64>) -> Vec<Complex64> {
    eigenvalues.sort_by(canonical_cmp);
    eigenvalues
}
