//! Naturality of the obstruction under pullbacks.
//!
//! Pulling a pair of fields back along the degree-k self-map of the sphere
//! multiplies the obstruction class by k. The pulled-back projection is,
//! pointwise, exactly the k-th power projection field, so the two routes to
//! the class (k, −k) must agree.
//!
//! Run with: cargo run --example naturality_pullback

use matrix_obstruction::complexes::builders;
use matrix_obstruction::fields::{field_from_str, pullback, sphere_power_map};
use matrix_obstruction::obstruction::analyze_pair;
use matrix_obstruction::tol::Tolerances;

fn main() {
    let tol = Tolerances::default();
    let sphere = builders::icosphere(1).unwrap();
    let d = field_from_str("builtin:diag_const:vals=0,1").unwrap();
    let p1 = field_from_str("builtin:cp1_projection:k=1").unwrap();

    let base = analyze_pair(&d, &p1, &sphere, &tol).unwrap();
    println!("base class θ(D, P_1) = {:?}", base.rebased_class.clone().unwrap());

    for k in 1i64..=3 {
        let pulled_d = pullback(&d, sphere_power_map(k), "f_k*(D)");
        let pulled_p = pullback(&p1, sphere_power_map(k), format!("f_{k}*(P_1)"));
        let analysis = analyze_pair(&pulled_d, &pulled_p, &sphere, &tol).unwrap();
        let class = analysis.rebased_class.clone().unwrap();
        println!("degree {k}: θ(f*D, f*P_1) = {class:?}");
        assert_eq!(class, vec![k, -k]);
    }
    println!("\npullback along a degree-k map multiplies the class by k");
}
