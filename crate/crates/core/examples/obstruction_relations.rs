//! Algebra of obstruction classes: antisymmetry and additivity.
//!
//! After basing everything at the basepoint eigenvalue order, classes of
//! pairs with a common characteristic polynomial satisfy
//! θ(B,A) = −θ(A,B) and θ(A,B) + θ(B,C) = θ(A,C); in particular equivalence
//! classes of fields correspond to distinct obstruction values against one
//! reference field.
//!
//! Run with: cargo run --example obstruction_relations

use matrix_obstruction::complexes::builders;
use matrix_obstruction::fields::field_from_str;
use matrix_obstruction::obstruction::verify_relations;
use matrix_obstruction::tol::Tolerances;

fn main() {
    let tol = Tolerances::default();

    let sphere = builders::icosphere(0).unwrap();
    let d = field_from_str("builtin:diag_const:vals=0,1").unwrap();
    let p1 = field_from_str("builtin:cp1_projection:k=1").unwrap();
    let p2 = field_from_str("builtin:cp1_projection:k=2").unwrap();
    let rep = verify_relations(&d, &p1, &p2, &sphere, &tol).unwrap();
    println!("triple (diag(0,1), P_1, P_2) on {}:", sphere.chart_id());
    println!("  θ(A,A) = 0:        {}", rep.theta_aa_zero);
    println!("  antisymmetry:      {}", rep.antisymmetry);
    println!("  additivity:        {}", rep.additivity);
    println!("  pairings: θ(A,B) = {:?}, θ(B,C) = {:?}, θ(A,C) = {:?}",
        rep.pairing_ab.clone().unwrap(),
        rep.pairing_bc.clone().unwrap(),
        rep.pairing_ac.clone().unwrap());
    assert!(rep.all_hold());

    // Conjugated triples on the circle: the same relations hold in the
    // twisted group (which is trivial there, making every class vanish).
    let circle = builders::circle(12).unwrap();
    let a = field_from_str("builtin:root_swap_circle").unwrap();
    let b = field_from_str("builtin:conjugated:seed=1:of=root_swap_circle").unwrap();
    let c = field_from_str("builtin:conjugated:seed=2:of=root_swap_circle").unwrap();
    let rep = verify_relations(&a, &b, &c, &circle, &tol).unwrap();
    println!("\nconjugated triple on {}:", circle.chart_id());
    println!("  θ(A,A) = 0:        {}", rep.theta_aa_zero);
    println!("  antisymmetry:      {}", rep.antisymmetry);
    println!("  additivity:        {}", rep.additivity);
    assert!(rep.all_hold());
}
