//! One-body observables along a trajectory.
//!
//! Every state in a magnon sector has one-site reduced density matrices that
//! are diagonal in the `S^z` basis: an off-diagonal element `<a|rho_n|a'>`
//! pairs configurations whose magnon numbers differ. The reduced state of
//! site `n` is therefore fully described by its populations `P_{n,a}`, and
//! its von Neumann entropy is the Shannon entropy of that row.
//!
//! The total correlation `C_T = sum_n S(rho_n) - S(rho)` is evaluated for
//! pure global states, where `S(rho) = 0`.

use num_complex::Complex64;
use serde::Serialize;

use crate::basis::{Level, MagnonBasis};
use crate::error::{Error, Result};
use crate::evolve::{norm, propagate_each, SpectralDecomposition, StateTrajectory, NORM_TOLERANCE};
use crate::hamiltonian::ModelParams;

/// Probabilities in `[-ROUNDOFF, 0)` are treated as zero.
pub const ROUNDOFF: f64 = 1e-12;

/// Onsite populations, one `[P_-1, P_0, P_+1]` row per site.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Populations {
    rows: Vec<[f64; 3]>,
}

impl Populations {
    pub fn from_rows(rows: Vec<[f64; 3]>) -> Self {
        Self { rows }
    }

    /// `n` identical rows.
    pub fn uniform(n_sites: usize, row: [f64; 3]) -> Self {
        Self {
            rows: vec![row; n_sites],
        }
    }

    pub fn n_sites(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[[f64; 3]] {
        &self.rows
    }

    pub fn row(&self, site: usize) -> [f64; 3] {
        self.rows[site]
    }

    pub fn get(&self, site: usize, level: Level) -> f64 {
        self.rows[site][level.index()]
    }

    /// `sum_n (P_{n,+1} - P_{n,-1})`.
    pub fn magnetization(&self) -> f64 {
        self.rows.iter().map(|r| r[2] - r[0]).sum()
    }

    pub fn entropies(&self) -> Result<Vec<f64>> {
        self.rows.iter().map(onsite_entropy).collect()
    }
}

/// Onsite populations of a sector state.
pub fn populations(state: &[Complex64], basis: &MagnonBasis) -> Populations {
    let mut rows = vec![[0.0; 3]; basis.n_sites()];
    for (amp, config) in state.iter().zip(basis.iter()) {
        let w = amp.norm_sqr();
        if w == 0.0 {
            continue;
        }
        for (row, &e) in rows.iter_mut().zip(config) {
            row[e as usize] += w;
        }
    }
    Populations { rows }
}

/// `-sum_a P_a ln P_a` in nats, with `0 ln 0 = 0`.
pub fn onsite_entropy(row: &[f64; 3]) -> Result<f64> {
    let mut s = 0.0;
    for (index, &p) in row.iter().enumerate() {
        if p < -ROUNDOFF {
            return Err(Error::NegativeProbability { index, value: p });
        }
        if p > 0.0 {
            s -= p * p.ln();
        }
    }
    Ok(s)
}

/// `sum_n S_n` for a pure global state.
pub fn total_correlation(populations: &Populations) -> Result<f64> {
    Ok(populations.entropies()?.iter().sum())
}

/// Onsite energy expectations `<H_n> = sum_a eps_a P_{n,a}` and their sum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OnsiteEnergies {
    pub per_site: Vec<f64>,
    pub total: f64,
}

pub fn onsite_energies(populations: &Populations, params: &ModelParams) -> OnsiteEnergies {
    let eps = params.level_energies();
    let per_site: Vec<f64> = populations
        .rows()
        .iter()
        .map(|r| r.iter().zip(&eps).map(|(p, e)| p * e).sum())
        .collect();
    let total = per_site.iter().sum();
    OnsiteEnergies { per_site, total }
}

/// Observables on a time grid.
#[derive(Clone, Debug, Serialize)]
pub struct ObservableSeries {
    pub times: Vec<f64>,
    pub populations: Vec<Populations>,
    pub onsite_energy: Vec<Vec<f64>>,
    pub onsite_entropy: Vec<Vec<f64>>,
    pub total_correlation: Vec<f64>,
    pub total_onsite_energy: Vec<f64>,
    /// Entropy of the global state, zero because only pure states evolve.
    pub full_state_entropy: f64,
}

impl ObservableSeries {
    fn with_capacity(len: usize) -> Self {
        Self {
            times: Vec::with_capacity(len),
            populations: Vec::with_capacity(len),
            onsite_energy: Vec::with_capacity(len),
            onsite_entropy: Vec::with_capacity(len),
            total_correlation: Vec::with_capacity(len),
            total_onsite_energy: Vec::with_capacity(len),
            full_state_entropy: 0.0,
        }
    }

    fn push(
        &mut self,
        t: f64,
        state: &[Complex64],
        basis: &MagnonBasis,
        params: &ModelParams,
    ) -> Result<()> {
        let nrm = norm(state);
        if (nrm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm: nrm });
        }
        let p = populations(state, basis);
        let entropies = p.entropies()?;
        let energies = onsite_energies(&p, params);
        self.times.push(t);
        self.total_correlation
            .push(entropies.iter().sum::<f64>() - self.full_state_entropy);
        self.onsite_entropy.push(entropies);
        self.total_onsite_energy.push(energies.total);
        self.onsite_energy.push(energies.per_site);
        self.populations.push(p);
        Ok(())
    }

    pub fn from_trajectory(
        trajectory: &StateTrajectory,
        basis: &MagnonBasis,
        params: &ModelParams,
    ) -> Result<Self> {
        let mut series = Self::with_capacity(trajectory.times.len());
        for (&t, state) in trajectory.times.iter().zip(&trajectory.amplitudes) {
            series.push(t, state, basis, params)?;
        }
        Ok(series)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn n_sites(&self) -> usize {
        self.populations.first().map_or(0, Populations::n_sites)
    }

    /// `P_{site,level}(t)` over the grid.
    pub fn population_trace(&self, site: usize, level: Level) -> Vec<f64> {
        self.populations.iter().map(|p| p.get(site, level)).collect()
    }

    /// `S_site(t)` over the grid.
    pub fn entropy_trace(&self, site: usize) -> Vec<f64> {
        self.onsite_entropy.iter().map(|s| s[site]).collect()
    }
}

/// Propagate `psi0` and record observables at each time without storing the
/// states.
pub fn observe(
    spec: &SpectralDecomposition,
    psi0: &[Complex64],
    times: &[f64],
    basis: &MagnonBasis,
    params: &ModelParams,
) -> Result<ObservableSeries> {
    let mut series = ObservableSeries::with_capacity(times.len());
    let mut failure = None;
    propagate_each(spec, psi0, times, |_, t, state| {
        if failure.is_none() {
            if let Err(e) = series.push(t, state, basis, params) {
                failure = Some(e);
            }
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(series),
    }
}
