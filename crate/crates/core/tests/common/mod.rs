//! Unrestricted 3^N reference built from explicit Kronecker products and
//! diagonalized with nalgebra.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use spinrelax::hamiltonian::ModelParams;

pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

/// Single-site operator `op` acting on `site` of an `n`-site chain; site 0 is
/// the most significant base-3 digit.
pub fn embed(op: &DMatrix<f64>, site: usize, n: usize) -> DMatrix<f64> {
    let id = DMatrix::<f64>::identity(3, 3);
    let mut out = DMatrix::<f64>::identity(1, 1);
    for k in 0..n {
        out = kron(&out, if k == site { op } else { &id });
    }
    out
}

pub struct Ops {
    pub sz: DMatrix<f64>,
    pub sp: DMatrix<f64>,
}

pub fn spin_one() -> Ops {
    // level order (-1, 0, +1)
    let s2 = 2f64.sqrt();
    let sz = DMatrix::from_row_slice(3, 3, &[-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    let sp = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, s2, 0.0, 0.0, 0.0, s2, 0.0]);
    Ops { sz, sp }
}

pub fn full_hamiltonian(p: &ModelParams) -> DMatrix<f64> {
    let n = p.n_sites;
    let ops = spin_one();
    let sm = ops.sp.transpose();
    let dim = 3usize.pow(n as u32);
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for site in 0..n {
        let z = embed(&ops.sz, site, n);
        h += &z * &z * p.quadratic_zeeman + &z * p.linear_zeeman;
    }
    let mut hops = vec![(1usize, p.hopping)];
    hops.extend(p.long_range.iter().map(|l| (l.distance, l.coupling)));
    for (d, coupling) in hops {
        let starts = if 2 * d == n { d } else { n };
        for site in 0..starts {
            let other = (site + d) % n;
            let term = embed(&ops.sp, site, n) * embed(&sm, other, n);
            h += (&term + term.transpose()) * coupling;
        }
    }
    h
}

pub fn digits(index: usize, n: usize) -> Vec<u8> {
    let mut out = vec![0u8; n];
    let mut x = index;
    for k in (0..n).rev() {
        out[k] = (x % 3) as u8;
        x /= 3;
    }
    out
}

pub fn full_index(config: &[u8]) -> usize {
    config.iter().fold(0, |acc, &e| acc * 3 + e as usize)
}

/// Indices of the full space with `m` magnons, found by scanning all digits.
pub fn sector_indices(n: usize, m: usize) -> Vec<usize> {
    (0..3usize.pow(n as u32))
        .filter(|&i| digits(i, n).iter().map(|&e| e as usize).sum::<usize>() == m)
        .collect()
}

/// Full-space `exp(-iHt) psi0` by eigendecomposition.
pub struct FullPropagator {
    values: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl FullPropagator {
    pub fn new(h: DMatrix<f64>) -> Self {
        let e = SymmetricEigen::new(h);
        Self {
            values: e.eigenvalues,
            vectors: e.eigenvectors,
        }
    }

    pub fn evolve(&self, psi0: &DVector<f64>, t: f64) -> Vec<Complex64> {
        let c = self.vectors.transpose() * psi0;
        let dim = psi0.len();
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for k in 0..dim {
            let phase = Complex64::from_polar(c[k], -self.values[k] * t);
            for i in 0..dim {
                out[i] += phase * self.vectors[(i, k)];
            }
        }
        out
    }
}


/// Onsite populations of a full-space state, by summing over the other sites.
pub fn full_populations(psi: &[Complex64], n: usize) -> Vec<[f64; 3]> {
    let mut rows = vec![[0.0; 3]; n];
    for (i, amp) in psi.iter().enumerate() {
        for (row, &a) in rows.iter_mut().zip(&digits(i, n)) {
            row[a as usize] += amp.norm_sqr();
        }
    }
    rows
}
