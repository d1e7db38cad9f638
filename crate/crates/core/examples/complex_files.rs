//! The complex file format: emit a builtin complex as JSON and load it back.
//!
//! The chart string in the file identifies the builtin (plus subdivision
//! count); the loader rebuilds the geometry from it and validates that the
//! stored simplices match exactly.
//!
//! Run with: cargo run --example complex_files

use matrix_obstruction::complexes::{builders, SimplicialComplex};

fn main() {
    let torus = builders::mapping_torus_antipodal(0).unwrap().subdivide();
    let json = torus.to_json();

    let dir = std::env::temp_dir().join("matrix-obstruction-example");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("mapping_torus_subdiv1.json");
    std::fs::write(&path, serde_json::to_string_pretty(&json).unwrap()).unwrap();
    println!("wrote {}", path.display());

    let text = std::fs::read_to_string(&path).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let loaded = SimplicialComplex::from_json(&value).unwrap();
    println!(
        "reloaded `{}`: {} vertices, {} edges, {} triangles, {} tetrahedra, χ = {}",
        loaded.chart_id(),
        loaded.vertex_count(),
        loaded.edges().len(),
        loaded.triangles().len(),
        loaded.tets().len(),
        loaded.euler_characteristic()
    );
    assert_eq!(loaded.tets(), torus.tets());

    // Tampering with the simplices must be rejected.
    let mut bad = json.clone();
    bad["simplices"]["1"][0] = serde_json::json!([0, 1]);
    assert!(SimplicialComplex::from_json(&bad).is_err());
    println!("tampered file rejected, as it should be");
}
