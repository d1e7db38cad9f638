//! Twisted cohomology of the circle with sign coefficients.
//!
//! With Z coefficients twisted so that the loop acts by −1, a parallel
//! 0-cochain must equal its own negative after one trip around: the twisted
//! coboundary of a generator value a is 2a, H⁰ vanishes, and the cokernel
//! keeps the factor of two as H¹ = Z/2.
//!
//! Run with: cargo run --example twisted_circle_cohomology

use matrix_obstruction::cohomology::{CoefficientSystem, TwistedComplex};
use matrix_obstruction::complexes::builders;
use matrix_obstruction::snf::smith_normal_form_verified;

fn main() {
    let circle = builders::circle(12).unwrap();
    let coeff = CoefficientSystem::sign_system_on_circle(&circle);
    let tc = TwistedComplex::new(&circle, coeff).unwrap();

    println!("complex:  {}", circle.chart_id());
    println!("coeffs:   Z twisted by the sign of the loop\n");
    for k in 0..=1 {
        println!("H^{k} = {}", tc.cohomology_group(k));
    }

    let snf = smith_normal_form_verified(&tc.delta[0]);
    println!(
        "\ninvariant factors of the twisted δ0: {:?}",
        snf.invariant_factors.iter().map(|x| x.to_string()).collect::<Vec<_>>()
    );
    println!("(the trailing 2 is the doubling of a generator value)");

    assert!(tc.cohomology_group(0).is_trivial());
    assert_eq!(tc.cohomology_group(1).torsion, vec![2]);
}
