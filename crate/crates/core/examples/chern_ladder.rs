//! The ladder of equivalence classes over the sphere.
//!
//! All fields with characteristic polynomial λ² − λ over the sphere are
//! projections onto line subbundles of the trivial plane bundle. Against the
//! constant diag(0, 1) reference, the projection onto the k-th power line
//! bundle realizes the obstruction class (k, −k), so the classes are indexed
//! by the integers — countably many inequivalent fields with identical
//! pointwise spectra. The class equals the difference of eigenbundle Chern
//! numbers, computed independently by lattice link-phase winding.
//!
//! Run with: cargo run --example chern_ladder

use matrix_obstruction::cohomology::{CoefficientSystem, TwistedComplex};
use matrix_obstruction::complexes::builders;
use matrix_obstruction::fields::field_from_str;
use matrix_obstruction::obstruction::{analyze_pair_with, chern_numbers};
use matrix_obstruction::tol::Tolerances;

fn main() {
    let tol = Tolerances::default();
    let sphere = builders::icosphere(1).unwrap();
    let d = field_from_str("builtin:diag_const:vals=0,1").unwrap();
    let tc = TwistedComplex::new(&sphere, CoefficientSystem::trivial(2, &sphere)).unwrap();

    println!("complex: {} (χ = {})", sphere.chart_id(), sphere.euler_characteristic());
    println!("reference field: {}\n", d.label);
    println!("   k   class θ(D,P_k)   chern(P_k)   vanishing");
    let mut cochains = Vec::new();
    for k in -2i64..=2 {
        let p = field_from_str(&format!("builtin:cp1_projection:k={k}")).unwrap();
        let analysis = analyze_pair_with(&d, &p, &sphere, &tc, &tol).unwrap();
        let chern = chern_numbers(&p, &sphere, &tol).unwrap();
        println!(
            "  {k:>2}   {:>14}   {:>10}   {}",
            format!("{:?}", analysis.rebased_class.clone().unwrap()),
            format!("{chern:?}"),
            analysis.vanishing()
        );
        cochains.push(analysis.obstruction.cochain);
    }

    // No two rungs of the ladder are cohomologous.
    for i in 0..cochains.len() {
        for j in (i + 1)..cochains.len() {
            assert!(!tc.classes_equal(&cochains[i], &cochains[j]).unwrap());
        }
    }
    println!("\nall five classes are pairwise distinct");
}
