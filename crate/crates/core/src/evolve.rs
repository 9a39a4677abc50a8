//! Eigendecomposition of a sector Hamiltonian and exact unitary propagation.
//!
//! States evolve as `psi(t) = V exp(-i E t) V^T psi(0)` with `hbar = 1`, so
//! time is measured in inverse energy units. No time stepping is involved;
//! the only error is floating-point roundoff.

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, Side};
use num_complex::Complex64;

use crate::basis::{MagnonBasis, SpinConfig};
use crate::error::{Error, Result};
use crate::hamiltonian::SectorMatrix;

/// Largest sector that is densified and diagonalized.
pub const DENSE_THRESHOLD: usize = 8192;

/// Norm tolerance for initial states.
pub const NORM_TOLERANCE: f64 = 1e-8;

/// Number of time points propagated per matrix product.
const TIME_CHUNK: usize = 64;

pub type StateVector = Vec<Complex64>;

/// Unit vector on the product state obtained by raising each listed site once
/// (0-based, repeats allowed up to twice).
pub fn initial_state(basis: &MagnonBasis, excited_sites: &[usize]) -> Result<StateVector> {
    if excited_sites.len() != basis.magnons() {
        return Err(Error::MagnonCountMismatch {
            expected: basis.magnons(),
            got: excited_sites.len(),
        });
    }
    let config = SpinConfig::from_raised_sites(basis.n_sites(), excited_sites)?;
    let index = basis.rank(&config)?;
    let mut psi = vec![Complex64::new(0.0, 0.0); basis.dim()];
    psi[index] = Complex64::new(1.0, 0.0);
    Ok(psi)
}

pub fn norm(psi: &[Complex64]) -> f64 {
    psi.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

/// Eigenpairs of a sector Hamiltonian, ascending, plus the overlaps
/// `c_k = <E_k|psi0>` once an initial state is bound.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Mat<f64>,
    overlaps: Option<Vec<Complex64>>,
}

pub fn diagonalize(h: &SectorMatrix) -> Result<SpectralDecomposition> {
    diagonalize_with_threshold(h, DENSE_THRESHOLD)
}

pub fn diagonalize_with_threshold(h: &SectorMatrix, threshold: usize) -> Result<SpectralDecomposition> {
    if h.dim() > threshold {
        return Err(Error::DenseThresholdExceeded {
            dim: h.dim(),
            threshold,
        });
    }
    let evd = h
        .to_dense()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenFailure)?;
    let s = evd.S().column_vector();
    let eigenvalues = (0..h.dim()).map(|k| s[k]).collect();
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors: evd.U().to_owned(),
        overlaps: None,
    })
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Columns are the eigenvectors in the basis ordering.
    pub fn eigenvectors(&self) -> &Mat<f64> {
        &self.eigenvectors
    }

    pub fn overlaps(&self) -> Option<&[Complex64]> {
        self.overlaps.as_deref()
    }

    /// Energy-shell weights `P_k = |<E_k|psi0>|^2`.
    pub fn weights(&self) -> Result<Vec<f64>> {
        let c = self.overlaps.as_ref().ok_or(Error::OverlapsUnbound)?;
        Ok(c.iter().map(Complex64::norm_sqr).collect())
    }

    pub fn bind_initial_state(&mut self, psi0: &[Complex64]) -> Result<()> {
        self.overlaps = Some(self.project(psi0)?);
        Ok(())
    }

    pub fn with_initial_state(mut self, psi0: &[Complex64]) -> Result<Self> {
        self.bind_initial_state(psi0)?;
        Ok(self)
    }

    /// `V^T psi0` after checking length and normalization.
    fn project(&self, psi0: &[Complex64]) -> Result<Vec<Complex64>> {
        if psi0.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: psi0.len(),
            });
        }
        let nrm = norm(psi0);
        if (nrm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm: nrm });
        }
        let v = &self.eigenvectors;
        Ok((0..self.dim())
            .map(|k| {
                let col = v.col(k);
                psi0.iter()
                    .enumerate()
                    .map(|(i, &x)| x * col[i])
                    .sum::<Complex64>()
            })
            .collect())
    }

    /// `max |V^T V - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let v = &self.eigenvectors;
        let gram = v.transpose() * v;
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// `max |V diag(E) V^T - H|`.
    pub fn reconstruction_error(&self, h: &SectorMatrix) -> f64 {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for k in 0..self.dim() {
            let e = self.eigenvalues[k];
            scaled.col_mut(k).iter_mut().for_each(|x| *x *= e);
        }
        let rebuilt = &scaled * v.transpose();
        let dense = h.to_dense();
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                worst = worst.max((rebuilt[(i, j)] - dense[(i, j)]).abs());
            }
        }
        worst
    }
}

/// `steps` evenly spaced times from 0 to `t_max` inclusive.
pub fn time_grid(t_max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..steps)
            .map(|i| t_max * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidTimes);
    }
    Ok(())
}

/// Evolve `psi0` to every time in `times` and hand each state to `visit`
/// without keeping the whole trajectory in memory.
pub fn propagate_each<F>(
    spec: &SpectralDecomposition,
    psi0: &[Complex64],
    times: &[f64],
    mut visit: F,
) -> Result<()>
where
    F: FnMut(usize, f64, &[Complex64]),
{
    check_times(times)?;
    let c = spec.project(psi0)?;
    let dim = spec.dim();
    let par = faer::get_global_parallelism();
    let mut state = vec![Complex64::new(0.0, 0.0); dim];
    for (chunk_index, chunk) in times.chunks(TIME_CHUNK).enumerate() {
        let cols = chunk.len();
        let mut phased_re = Mat::<f64>::zeros(dim, cols);
        let mut phased_im = Mat::<f64>::zeros(dim, cols);
        for (j, &t) in chunk.iter().enumerate() {
            for k in 0..dim {
                let (sin, cos) = (spec.eigenvalues[k] * t).sin_cos();
                // c_k exp(-i E_k t)
                phased_re[(k, j)] = c[k].re * cos + c[k].im * sin;
                phased_im[(k, j)] = c[k].im * cos - c[k].re * sin;
            }
        }
        let mut amp_re = Mat::<f64>::zeros(dim, cols);
        let mut amp_im = Mat::<f64>::zeros(dim, cols);
        matmul(&mut amp_re, Accum::Replace, &spec.eigenvectors, &phased_re, 1.0, par);
        matmul(&mut amp_im, Accum::Replace, &spec.eigenvectors, &phased_im, 1.0, par);
        for (j, &t) in chunk.iter().enumerate() {
            if t == 0.0 {
                // exact, free of the V V^T roundoff
                state.copy_from_slice(psi0);
            } else {
                let (re, im) = (amp_re.col(j), amp_im.col(j));
                for i in 0..dim {
                    state[i] = Complex64::new(re[i], im[i]);
                }
            }
            visit(chunk_index * TIME_CHUNK + j, t, &state);
        }
    }
    Ok(())
}

/// Time-gridded states.
#[derive(Clone, Debug)]
pub struct StateTrajectory {
    pub times: Vec<f64>,
    pub amplitudes: Vec<StateVector>,
}

pub fn propagate(
    spec: &SpectralDecomposition,
    psi0: &[Complex64],
    times: &[f64],
) -> Result<StateTrajectory> {
    let mut amplitudes = Vec::with_capacity(times.len());
    propagate_each(spec, psi0, times, |_, _, psi| amplitudes.push(psi.to_vec()))?;
    Ok(StateTrajectory {
        times: times.to_vec(),
        amplitudes,
    })
}
