//! Infinite-time averages and finite-window averages.
//!
//! For an observable `O` the long-time average of `<O(t)>` keeps only the
//! terms of `sum_{k,q} c_k^* c_q <E_k|O|E_q> exp(i (E_k - E_q) t)` with
//! `E_k = E_q`. When the spectrum is degenerate (the ring has reflection and
//! translation symmetries, so it is) the cross terms inside each degenerate
//! group survive, and the average is
//!
//! ```text
//! o_inf = sum_g <psi0| P_g O P_g |psi0>
//! ```
//!
//! with `P_g` the projector onto group `g`. For an observable diagonal in the
//! configuration basis this is `sum_i O_ii w_i` with
//! `w_i = sum_g |(P_g psi0)_i|^2`, so the weights are computed once and reused
//! for every onsite projector.

use std::ops::Range;

use num_complex::Complex64;
use serde::Serialize;

use crate::basis::{Level, MagnonBasis};
use crate::error::{Error, Result};
use crate::evolve::SpectralDecomposition;
use crate::hamiltonian::ModelParams;
use crate::observables::{onsite_energies, total_correlation, ObservableSeries, Populations};

/// Relative gap (to the spectral radius) below which eigenvalues are merged.
pub const DEFAULT_DEGENERACY_TOLERANCE: f64 = 1e-9;

/// Consecutive runs of ascending eigenvalues whose neighbouring gaps are
/// below `tolerance`.
pub fn degeneracy_groups(eigenvalues: &[f64], tolerance: f64) -> Vec<Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    for k in 1..=eigenvalues.len() {
        if k == eigenvalues.len() || eigenvalues[k] - eigenvalues[k - 1] >= tolerance {
            groups.push(start..k);
            start = k;
        }
    }
    groups
}

/// Configuration-space weights of the dephased state.
#[derive(Clone, Debug)]
pub struct DiagonalEnsemble {
    weights: Vec<f64>,
    groups: Vec<Range<usize>>,
}

impl DiagonalEnsemble {
    pub fn new(spec: &SpectralDecomposition) -> Result<Self> {
        let radius = spec
            .eigenvalues()
            .iter()
            .fold(0.0f64, |acc, e| acc.max(e.abs()));
        Self::with_tolerance(spec, DEFAULT_DEGENERACY_TOLERANCE * radius.max(f64::MIN_POSITIVE))
    }

    /// `tolerance` is an absolute energy gap.
    pub fn with_tolerance(spec: &SpectralDecomposition, tolerance: f64) -> Result<Self> {
        let c = spec.overlaps().ok_or(Error::OverlapsUnbound)?;
        let v = spec.eigenvectors();
        let dim = spec.dim();
        let groups = degeneracy_groups(spec.eigenvalues(), tolerance);
        let mut weights = vec![0.0; dim];
        let mut projected = vec![Complex64::new(0.0, 0.0); dim];
        for g in &groups {
            projected.fill(Complex64::new(0.0, 0.0));
            for k in g.clone() {
                let col = v.col(k);
                for (i, p) in projected.iter_mut().enumerate() {
                    *p += c[k] * col[i];
                }
            }
            for (w, p) in weights.iter_mut().zip(&projected) {
                *w += p.norm_sqr();
            }
        }
        Ok(Self { weights, groups })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn groups(&self) -> &[Range<usize>] {
        &self.groups
    }

    /// Long-time average of a configuration-diagonal observable.
    pub fn average(&self, observable: &[f64]) -> Result<f64> {
        if observable.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                got: observable.len(),
            });
        }
        Ok(observable.iter().zip(&self.weights).map(|(o, w)| o * w).sum())
    }

    pub fn populations(&self, basis: &MagnonBasis) -> Populations {
        let mut rows = vec![[0.0; 3]; basis.n_sites()];
        for (&w, config) in self.weights.iter().zip(basis.iter()) {
            for (row, &e) in rows.iter_mut().zip(config) {
                row[e as usize] += w;
            }
        }
        Populations::from_rows(rows)
    }
}

/// Long-time average of a diagonal observable for the bound initial state.
pub fn diagonal_ensemble_average(spec: &SpectralDecomposition, observable: &[f64]) -> Result<f64> {
    DiagonalEnsemble::new(spec)?.average(observable)
}

/// `p_inf[n][a]`, the long-time averages of every onsite projector.
pub fn steady_populations(spec: &SpectralDecomposition, basis: &MagnonBasis) -> Result<Populations> {
    Ok(DiagonalEnsemble::new(spec)?.populations(basis))
}

#[derive(Clone, Debug, Serialize)]
pub struct SteadyReport {
    pub steady_populations: Populations,
    /// `-sum p_inf ln p_inf` over all sites and levels.
    pub total_correlation: f64,
    pub total_onsite_energy: f64,
    /// Half-open eigenvalue index ranges `[start, end)`.
    pub degeneracy_groups: Vec<(usize, usize)>,
}

impl SteadyReport {
    pub fn degeneracy_group_count(&self) -> usize {
        self.degeneracy_groups.len()
    }

    pub fn site_row(&self, site: usize) -> [f64; 3] {
        self.steady_populations.row(site)
    }
}

pub fn steady_report(
    spec: &SpectralDecomposition,
    basis: &MagnonBasis,
    params: &ModelParams,
) -> Result<SteadyReport> {
    let ensemble = DiagonalEnsemble::new(spec)?;
    let p = ensemble.populations(basis);
    Ok(SteadyReport {
        total_correlation: total_correlation(&p)?,
        total_onsite_energy: onsite_energies(&p, params).total,
        degeneracy_groups: ensemble.groups.iter().map(|g| (g.start, g.end)).collect(),
        steady_populations: p,
    })
}

/// Arithmetic means of a series over grid points with `lo <= t <= hi`.
#[derive(Clone, Debug, Serialize)]
pub struct WindowAverage {
    pub window: (f64, f64),
    pub points: usize,
    pub populations: Populations,
    pub onsite_energy: Vec<f64>,
    pub onsite_entropy: Vec<f64>,
    pub total_correlation: f64,
    pub total_onsite_energy: f64,
}

pub fn finite_time_average(series: &ObservableSeries, window: (f64, f64)) -> Result<WindowAverage> {
    let (lo, hi) = window;
    let picked: Vec<usize> = (0..series.len())
        .filter(|&k| series.times[k] >= lo && series.times[k] <= hi)
        .collect();
    if picked.is_empty() {
        return Err(Error::EmptyWindow { lo, hi });
    }
    let n = series.n_sites();
    let count = picked.len() as f64;
    let mean = |f: &dyn Fn(usize) -> f64| picked.iter().map(|&k| f(k)).sum::<f64>() / count;

    let rows = (0..n)
        .map(|site| {
            let mut row = [0.0; 3];
            for level in Level::ALL {
                row[level.index()] = mean(&|k| series.populations[k].get(site, level));
            }
            row
        })
        .collect();
    Ok(WindowAverage {
        window,
        points: picked.len(),
        populations: Populations::from_rows(rows),
        onsite_energy: (0..n).map(|s| mean(&|k| series.onsite_energy[k][s])).collect(),
        onsite_entropy: (0..n).map(|s| mean(&|k| series.onsite_entropy[k][s])).collect(),
        total_correlation: mean(&|k| series.total_correlation[k]),
        total_onsite_energy: mean(&|k| series.total_onsite_energy[k]),
    })
}

/// `[tau, 3 tau]` clipped to the grid when a recurrence time is known and lies
/// inside the grid, otherwise the last half of the grid.
pub fn default_window(times: &[f64], tau_rec: Option<f64>) -> (f64, f64) {
    let (first, last) = match (times.first(), times.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return (0.0, 0.0),
    };
    match tau_rec {
        Some(tau) if tau > first && tau < last => (tau, (3.0 * tau).min(last)),
        _ => (first + 0.5 * (last - first), last),
    }
}
