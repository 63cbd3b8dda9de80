mod common;

use std::sync::Arc;

use fpe_similarity::pde::{evolve, expected_refinement_order, transformed_operator, FieldOnGrid, ZGrid};
use fpe_similarity::sde::{histogram, histogram_distance, propagate, PathEnsemble, StepOptions};
use fpe_similarity::solutions::{build_solution, figure_preset, SimilaritySolution, SolutionClass};

fn fig(name: &str) -> SimilaritySolution {
    let p = figure_preset(name).unwrap();
    build_solution(p.alpha, p.class).unwrap()
}

/// fig1 with the drift built from a1 + 1 instead of a1.
fn corrupted_fig1() -> SimilaritySolution {
    let SolutionClass::ClassI { z1, z2, a1, a2 } = figure_preset("fig1").unwrap().class else { unreachable!() };
    let a1 = a1 + 1.0;
    fig("fig1").with_drift(Arc::new(move |z| (2.0 - a1 - a2 - 2.0) * z + (a1 + 1.0) * z2 + (a2 + 1.0) * z1))
}

fn pde_distance(sol: &SimilaritySolution, reference: &SimilaritySolution, cells: usize) -> f64 {
    let grid = ZGrid::for_solution(reference, cells).unwrap();
    let op = transformed_operator(sol, &grid).unwrap();
    let y = FieldOnGrid::cell_averaged_profile(reference, &grid, 10.0).unwrap();
    evolve(&op, &FieldOnGrid::uniform(&grid, 0.0), 10.0, 0.05).unwrap().l1_distance(&y, &grid)
}

fn mc_distance(sol: &SimilaritySolution, reference: &SimilaritySolution, t0: f64, t1: f64, n: usize) -> f64 {
    let ens = PathEnsemble::sample(reference, n, t0, 77).unwrap();
    let ens = propagate(&ens, sol, t1, 1e-3, StepOptions::default()).unwrap();
    histogram_distance(&ens, reference, 40).unwrap()
}

#[test]
fn corrupted_drift_is_caught_by_every_channel() {
    let good = fig("fig1");
    let bad = corrupted_fig1();
    let z = 2.5;
    let (r, s) = bad.first_integral_residual(z);
    assert!(r.abs() > 1e-3 * s);
    assert!(pde_distance(&good, &good, 200) < 1e-3);
    assert!(pde_distance(&bad, &good, 200) > 0.05);
    assert!(mc_distance(&good, &good, 0.3, 0.5, 50_000) < 0.05);
    assert!(mc_distance(&bad, &good, 0.3, 0.5, 50_000) > 0.1);
}

#[test]
fn every_preset_is_reached_by_both_channels() {
    for name in ["fig1", "fig2", "fig3", "fig4", "fig5"] {
        let p = figure_preset(name).unwrap();
        let sol = fig(name);
        let d = pde_distance(&sol, &sol, 400);
        assert!(d < 1e-3, "{name}: pde {d}");
        let d = mc_distance(&sol, &sol, p.times[0], p.times[2], 40_000);
        assert!(d < 0.05, "{name}: mc {d}");
    }
}

#[test]
fn mirrored_models_verify_like_the_originals() {
    for name in ["fig4", "fig5"] {
        let p = figure_preset(name).unwrap();
        let sol = build_solution(p.alpha, p.class.reflect()).unwrap();
        let (lo, hi) = sol.z_domain();
        assert!(hi <= 0.0 && lo < hi, "{name}");
        assert_eq!(expected_refinement_order(&sol), expected_refinement_order(&fig(name)));
        assert!(pde_distance(&sol, &sol, 400) < 1e-3, "{name}");
        assert!(mc_distance(&sol, &sol, p.times[0], p.times[1], 40_000) < 0.05, "{name}");
    }
}

#[test]
fn histogram_rows_cover_the_domain() {
    let sol = fig("fig5");
    let ens = PathEnsemble::sample(&sol, 20_000, 0.5, 1).unwrap();
    let (rows, out_emp, out_an) = histogram(&ens, &sol, 30).unwrap();
    assert_eq!(rows.len(), 30);
    assert!(rows.windows(2).all(|w| w[1].bin_center > w[0].bin_center));
    let width = rows[1].bin_center - rows[0].bin_center;
    let an: f64 = rows.iter().map(|r| r.analytic_density).sum::<f64>() * width;
    let em: f64 = rows.iter().map(|r| r.empirical_density).sum::<f64>() * width;
    assert!((an + out_an - 1.0).abs() < 1e-9);
    assert!((em + out_emp - 1.0).abs() < 1e-12);
}

#[test]
fn negative_alpha_contracts_the_ensemble() {
    let sol = fig("fig2");
    let ens = PathEnsemble::sample(&sol, 10_000, 1.0, 4).unwrap();
    let out = propagate(&ens, &sol, 1.4, 1e-3, StepOptions::default()).unwrap();
    let mean = |e: &PathEnsemble| e.positions().iter().sum::<f64>() / e.len() as f64;
    // the mean follows t^α: E[x] = t^α ∫ z y dz
    let ratio = mean(&out) / mean(&ens);
    assert!((ratio - 1.4f64.powf(-2.0)).abs() < 0.02, "{ratio}");
}
