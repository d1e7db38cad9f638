//! Equivalence over the circle: the root-swap field against a smoothly
//! conjugated copy.
//!
//! The common characteristic polynomial λ² − z has root monodromy around the
//! circle, so neither field splits; but a circle has no 2-cells, the twisted
//! H² vanishes, and any two such fields are unitarily equivalent. The example
//! computes the obstruction report and synthesizes a certified intertwiner.
//!
//! Run with: cargo run --example circle_equivalence

use matrix_obstruction::complexes::builders;
use matrix_obstruction::fields::field_from_str;
use matrix_obstruction::obstruction::{analyze_pair, synthesize_intertwiner};
use matrix_obstruction::tol::Tolerances;

fn main() {
    let tol = Tolerances::default();
    let circle = builders::circle(12).unwrap();
    let a = field_from_str("builtin:root_swap_circle").unwrap();
    let b = field_from_str("builtin:conjugated:seed=7:of=root_swap_circle").unwrap();

    let analysis = analyze_pair(&a, &b, &circle, &tol).unwrap();
    println!("complex:          {}", analysis.complex.chart_id());
    println!("fields:           {} vs {}", a.label, b.label);
    println!(
        "monodromy:        split = {}, generators = {:?}",
        analysis.rep.is_globally_split(),
        analysis
            .rep
            .generators
            .iter()
            .filter(|(_, p)| !p.is_identity())
            .map(|(_, p)| p.cycle_string())
            .collect::<Vec<_>>()
    );
    println!("H²(S¹; Z²_ρ):     {}", analysis.h2);
    println!("obstruction:      vanishing = {}", analysis.vanishing());

    let (unitaries, cert) = synthesize_intertwiner(&a, &b, &analysis, &tol).unwrap();
    println!(
        "intertwiner:      {} vertex unitaries, max defect {:.3e}",
        unitaries.len(),
        cert.max_vertex_defect
    );
    assert!(cert.max_vertex_defect <= 1e-6);
    println!("\nthe two fields are unitarily equivalent over the circle");
}
