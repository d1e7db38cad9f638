use matrix_obstruction::cohomology::{CoefficientSystem, TwistedComplex};
use matrix_obstruction::complexes::builders;
use matrix_obstruction::fields::field_from_str;
use matrix_obstruction::monodromy::build_local_system;
use matrix_obstruction::tol::Tolerances;

fn main() {
    let tol = Tolerances::default();
    let c = builders::icosphere(2).unwrap();
    let f = field_from_str("builtin:diag_const:vals=0,1").unwrap();
    let t0 = std::time::Instant::now();
    let ls = build_local_system(&f, &c, &tol).unwrap();
    println!("local system: {:?}", t0.elapsed());
    let t0 = std::time::Instant::now();
    let tc = TwistedComplex::new(&c, CoefficientSystem::from_local_system(&ls, &c)).unwrap();
    println!("twisted complex (incl. δδ checks): {:?}", t0.elapsed());
    let t0 = std::time::Instant::now();
    let h2 = tc.cohomology_group(2);
    println!("H2 = {h2} via SNF: {:?}", t0.elapsed());
}
