//! The diagonal ensemble against a brute-force time average.

use spinrelax::basis::enumerate_basis;
use spinrelax::ensemble::{finite_time_average, steady_report};
use spinrelax::evolve::{diagonalize, initial_state, time_grid};
use spinrelax::hamiltonian::{build_hamiltonian, ModelParams};
use spinrelax::observables::observe;

#[test]
fn long_window_average_approaches_the_diagonal_ensemble() {
    let (n, j) = (8, 0.3);
    let params = ModelParams::new(n, j, -1.0, -0.13);
    let basis = enumerate_basis(n, 3).unwrap();
    let h = build_hamiltonian(&params, &basis).unwrap();
    let psi0 = initial_state(&basis, &[0, 1, 2]).unwrap();
    let spec = diagonalize(&h).unwrap().with_initial_state(&psi0).unwrap();
    let steady = steady_report(&spec, &basis, &params).unwrap();

    let t_max = 1e4 / j;
    let series = observe(&spec, &psi0, &time_grid(t_max, 100_000), &basis, &params).unwrap();
    let avg = finite_time_average(&series, (0.0, t_max)).unwrap();

    let mut worst: f64 = 0.0;
    for site in 0..n {
        for a in 0..3 {
            let d = avg.populations.row(site)[a] - steady.site_row(site)[a];
            worst = worst.max(d.abs());
        }
    }
    assert!(worst < 1e-3, "max deviation {worst}");
    assert!((avg.total_onsite_energy - steady.total_onsite_energy).abs() < 1e-3 * n as f64);
}
