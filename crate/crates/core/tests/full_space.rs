//! Comparison against the unrestricted 3^N Hilbert space built from explicit
//! Kronecker products and diagonalized with nalgebra.

mod common;

use common::{digits, full_hamiltonian, full_index, sector_indices, FullPropagator};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use spinrelax::basis::enumerate_basis;
use spinrelax::evolve::{diagonalize, initial_state, time_grid};
use spinrelax::hamiltonian::{build_hamiltonian, ModelParams};
use spinrelax::observables::observe;

#[test]
fn sector_matrix_is_the_projected_full_hamiltonian() {
    for n in 3..=6 {
        let mut p = ModelParams::new(n, 0.37, -1.0, -0.13);
        if n >= 4 {
            p = p.with_long_range(2, 0.05);
        }
        if n == 6 {
            p = p.with_long_range(3, 0.011);
        }
        let full = full_hamiltonian(&p);
        for m in 0..=3 {
            let b = enumerate_basis(n, m).unwrap();
            let h = build_hamiltonian(&p, &b).unwrap().to_dense();
            let idx: Vec<usize> = b.iter().map(full_index).collect();
            for (r, &fr) in idx.iter().enumerate() {
                for (c, &fc) in idx.iter().enumerate() {
                    let d = (h[(r, c)] - full[(fr, fc)]).abs();
                    assert!(d < 1e-12, "n={n} m={m} ({r},{c}) off by {d}");
                }
            }
        }
    }
}

#[test]
fn full_hamiltonian_conserves_magnetization() {
    let n = 5;
    let full = full_hamiltonian(&ModelParams::new(n, 0.3, -1.0, -0.13).with_long_range(2, 0.1));
    let mag: Vec<i64> = (0..full.nrows())
        .map(|i| digits(i, n).iter().map(|&e| e as i64).sum())
        .collect();
    for r in 0..full.nrows() {
        for c in 0..full.ncols() {
            if mag[r] != mag[c] {
                assert_eq!(full[(r, c)], 0.0);
            }
        }
    }
}

#[test]
fn spectrum_matches_full_space_block() {
    let n = 5;
    let p = ModelParams::new(n, 0.3, -1.0, -0.13);
    let full = full_hamiltonian(&p);
    for m in 1..=4 {
        let idx = sector_indices(n, m);
        let block = DMatrix::from_fn(idx.len(), idx.len(), |r, c| full[(idx[r], idx[c])]);
        let mut oracle: Vec<f64> = SymmetricEigen::new(block).eigenvalues.iter().copied().collect();
        oracle.sort_by(f64::total_cmp);
        let b = enumerate_basis(n, m).unwrap();
        let spec = diagonalize(&build_hamiltonian(&p, &b).unwrap()).unwrap();
        assert_eq!(spec.eigenvalues().len(), oracle.len());
        for (a, e) in spec.eigenvalues().iter().zip(&oracle) {
            assert!((a - e).abs() < 1e-9, "m={m}: {a} vs {e}");
        }
    }
}

#[test]
fn populations_match_full_space_evolution() {
    let (n, j) = (5, 0.3);
    let p = ModelParams::new(n, j, -1.0, -0.13);
    let prop = FullPropagator::new(full_hamiltonian(&p));
    let mut psi_full = DVector::<f64>::zeros(3usize.pow(n as u32));
    psi_full[full_index(&[1, 1, 1, 0, 0])] = 1.0;

    let b = enumerate_basis(n, 3).unwrap();
    let psi0 = initial_state(&b, &[0, 1, 2]).unwrap();
    let spec = diagonalize(&build_hamiltonian(&p, &b).unwrap()).unwrap();
    let times = time_grid(20.0 / j, 200);
    let series = observe(&spec, &psi0, &times, &b, &p).unwrap();

    let mut worst: f64 = 0.0;
    let mut worst_coherence: f64 = 0.0;
    for (k, &t) in times.iter().enumerate() {
        let psi = prop.evolve(&psi_full, t);
        for site in 0..n {
            // reduced density matrix of `site` by explicit partial trace
            let mut rho = [[Complex64::new(0.0, 0.0); 3]; 3];
            for (i, amp) in psi.iter().enumerate() {
                let mut d = digits(i, n);
                let a = d[site] as usize;
                for a2 in 0..3u8 {
                    d[site] = a2;
                    let j2 = full_index(&d);
                    rho[a][a2 as usize] += amp * psi[j2].conj();
                }
            }
            for a in 0..3 {
                let sector = series.populations[k].row(site)[a];
                worst = worst.max((rho[a][a].re - sector).abs());
                for a2 in 0..3 {
                    if a2 != a {
                        worst_coherence = worst_coherence.max(rho[a][a2].norm());
                    }
                }
            }
        }
    }
    assert!(worst < 1e-10, "population mismatch {worst}");
    assert!(worst_coherence < 1e-12, "onsite coherence {worst_coherence}");
}
