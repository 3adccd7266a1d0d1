use std::path::PathBuf;

use ngd::analytics::{mfpt_solve, mfpt_spectral, stationary_distribution};
use ngd::compat::check_compatibility;
use ngd::io::{parse_matrix_market, parse_matrix_market_str, write_matrix_market};
use ngd::{beta_heuristic, fractional_graph, regularize, Graph};

fn karate() -> Graph {
    parse_matrix_market(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/karate.mtx")).unwrap()
}

#[test]
fn karate_shape() {
    let g = karate();
    assert_eq!(g.n(), 34);
    assert_eq!(g.edge_count(), 78);
    let deg = g.degree();
    assert_eq!(deg[0], 16.0);
    assert_eq!(deg[33], 17.0);
    assert_eq!(parse_matrix_market_str(&write_matrix_market(&g)).unwrap(), g);
}

#[test]
fn karate_beta_heuristic() {
    let g = karate();
    let f = fractional_graph(&g, 0.2).unwrap();
    let beta = beta_heuristic(&g, &f).unwrap();
    assert!((beta - 16.85).abs() <= 0.05 * 16.85, "beta {beta}");
    let r = regularize(&g, &f, beta).unwrap();
    let report = check_compatibility(&g, &r.graph, None, 0.0).unwrap();
    assert_eq!(report.worst_ratio_deviation, 0.0);
    let plain = check_compatibility(&g, &f.graph, None, 1e-6).unwrap();
    assert!(!plain.compatible);
}

#[test]
fn karate_passage_times() {
    let g = karate();
    let spectral = mfpt_spectral(&g).unwrap();
    let solved = mfpt_solve(&g).unwrap();
    assert!((&spectral.mfpt - &solved.mfpt).amax() <= 1e-8);
    // Kac: mean return time to j is 1 / pi_j
    let pi = stationary_distribution(&g);
    let p = ngd::dynamics::transition_matrix(&g);
    for j in 0..g.n() {
        let ret: f64 = 1.0 + (0..g.n()).filter(|&k| k != j).map(|k| p[(j, k)] * solved.mfpt[(k, j)]).sum::<f64>();
        assert!((ret - 1.0 / pi[j]).abs() <= 1e-8 / pi[j]);
    }
}
