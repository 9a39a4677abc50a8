//! Ring Hamiltonian restricted to a magnon sector.
//!
//! The model is
//!
//! ```text
//! H = sum_n [ Omega (S^z_n)^2 + omega S^z_n ]
//!   + sum_n J (S^+_n S^-_{n+1} + S^-_n S^+_{n+1})
//!   + sum_d sum_n J_d (S^+_n S^-_{n+d} + h.c.)
//! ```
//!
//! on a periodic ring of spin-1 sites. In the product basis every allowed
//! hop `S^+_p S^-_q` has matrix element `sqrt(2) * sqrt(2) = 2`, so each
//! off-diagonal entry of the sector matrix is exactly `2 J` (or `2 J_d`).

use std::io::{self, Write};

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{Level, MagnonBasis, MIN_SITES};
use crate::error::{Error, Result};

/// Extra hopping between sites `distance` apart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LongRangeCoupling {
    pub distance: usize,
    pub coupling: f64,
}

/// Couplings of the periodic ring.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n_sites: usize,
    /// Nearest-neighbour exchange `J`.
    pub hopping: f64,
    /// Quadratic Zeeman energy `Omega`.
    pub quadratic_zeeman: f64,
    /// Linear Zeeman energy `omega`.
    pub linear_zeeman: f64,
    #[serde(default)]
    pub long_range: Vec<LongRangeCoupling>,
}

impl ModelParams {
    pub fn new(n_sites: usize, hopping: f64, quadratic_zeeman: f64, linear_zeeman: f64) -> Self {
        Self {
            n_sites,
            hopping,
            quadratic_zeeman,
            linear_zeeman,
            long_range: Vec::new(),
        }
    }

    pub fn with_long_range(mut self, distance: usize, coupling: f64) -> Self {
        self.long_range.push(LongRangeCoupling { distance, coupling });
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < MIN_SITES {
            return Err(Error::TooFewSites(self.n_sites));
        }
        for (name, value) in [
            ("hopping", self.hopping),
            ("quadratic_zeeman", self.quadratic_zeeman),
            ("linear_zeeman", self.linear_zeeman),
        ] {
            if !value.is_finite() {
                return Err(Error::NonFinite { name, value });
            }
        }
        for lr in &self.long_range {
            if lr.distance < 2 || lr.distance > self.n_sites / 2 {
                return Err(Error::InvalidLongRange {
                    distance: lr.distance,
                    n: self.n_sites,
                });
            }
            if !lr.coupling.is_finite() {
                return Err(Error::NonFinite {
                    name: "long_range.coupling",
                    value: lr.coupling,
                });
            }
        }
        Ok(())
    }

    /// Onsite energies indexed by [`Level::index`]: `(eps_-1, eps_0, eps_+1)`.
    pub fn level_energies(&self) -> [f64; 3] {
        Level::ALL.map(|l| onsite_energy(l, self))
    }

    /// Unordered bonds `(p, q, coupling)`, each physical pair listed once.
    pub fn bonds(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n_sites;
        let mut bonds: Vec<(usize, usize, f64)> =
            (0..n).map(|p| (p, (p + 1) % n, self.hopping)).collect();
        for lr in &self.long_range {
            // at d = N/2 the pair (p, p + d) comes back as (p + d, p)
            let starts = if 2 * lr.distance == n { lr.distance } else { n };
            bonds.extend((0..starts).map(|p| (p, (p + lr.distance) % n, lr.coupling)));
        }
        bonds
    }
}

/// `eps_a = Omega a^2 + omega a`.
pub fn onsite_energy(level: Level, params: &ModelParams) -> f64 {
    let a = level.spin() as f64;
    params.quadratic_zeeman * a * a + params.linear_zeeman * a
}

/// Real symmetric sector Hamiltonian in triplet storage.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorMatrix {
    dim: usize,
    diagonal: Vec<f64>,
    /// `(row, col, value)`, both mirrors present, sorted by `(row, col)`.
    offdiag: Vec<(usize, usize, f64)>,
}

/// Assemble the Hamiltonian of `params` on the sector spanned by `basis`.
pub fn build_hamiltonian(params: &ModelParams, basis: &MagnonBasis) -> Result<SectorMatrix> {
    params.validate()?;
    if params.n_sites != basis.n_sites() {
        return Err(Error::ParamsBasisMismatch {
            params: params.n_sites,
            basis: basis.n_sites(),
        });
    }
    let energies = params.level_energies();
    let bonds = params.bonds();
    let dim = basis.dim();

    let mut diagonal = Vec::with_capacity(dim);
    let mut offdiag = Vec::new();
    let mut scratch = vec![0u8; basis.n_sites()];
    for (col, config) in basis.iter().enumerate() {
        diagonal.push(config.iter().map(|&e| energies[e as usize]).sum());
        for &(p, q, coupling) in &bonds {
            for (to, from) in [(p, q), (q, p)] {
                if config[to] < 2 && config[from] > 0 {
                    scratch.copy_from_slice(config);
                    scratch[to] += 1;
                    scratch[from] -= 1;
                    let row = basis
                        .index_of(&scratch)
                        .expect("hopping preserves the magnon number");
                    offdiag.push((row, col, 2.0 * coupling));
                }
            }
        }
    }
    offdiag.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    Ok(SectorMatrix {
        dim,
        diagonal,
        offdiag,
    })
}

impl SectorMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn offdiag(&self) -> &[(usize, usize, f64)] {
        &self.offdiag
    }

    pub fn trace(&self) -> f64 {
        self.diagonal.iter().sum()
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let mut m = Mat::<f64>::zeros(self.dim, self.dim);
        for (i, &d) in self.diagonal.iter().enumerate() {
            m[(i, i)] = d;
        }
        for &(r, c, v) in &self.offdiag {
            m[(r, c)] += v;
        }
        m
    }

    /// `H x` for a complex vector.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y: Vec<Complex64> = self
            .diagonal
            .iter()
            .zip(x)
            .map(|(&d, &xi)| xi * d)
            .collect();
        for &(r, c, v) in &self.offdiag {
            y[r] += x[c] * v;
        }
        y
    }

    /// `<x|H|x>`, real because `H` is symmetric.
    pub fn expectation(&self, x: &[Complex64]) -> f64 {
        self.apply(x)
            .iter()
            .zip(x)
            .map(|(hx, xi)| (xi.conj() * hx).re)
            .sum()
    }

    /// Largest absolute Gershgorin bound, used as a spectral scale.
    pub fn gershgorin_radius(&self) -> f64 {
        let mut row_sums: Vec<f64> = self.diagonal.iter().map(|d| d.abs()).collect();
        for &(r, _, v) in &self.offdiag {
            row_sums[r] += v.abs();
        }
        row_sums.into_iter().fold(0.0, f64::max)
    }

    /// Coordinate dump: a `dim nnz` header, then one `row col value` line per
    /// stored entry (diagonal first), 0-based.
    pub fn write_coo<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{} {}", self.dim, self.dim + self.offdiag.len())?;
        for (i, d) in self.diagonal.iter().enumerate() {
            writeln!(w, "{i} {i} {d:e}")?;
        }
        for (r, c, v) in &self.offdiag {
            writeln!(w, "{r} {c} {v:e}")?;
        }
        Ok(())
    }
}

/// Diagonal of the projector `|a><a|_site` in the sector basis.
pub fn number_operator_diagonal(basis: &MagnonBasis, site: usize, level: Level) -> Result<Vec<f64>> {
    if site >= basis.n_sites() {
        return Err(Error::SiteOutOfRange {
            site,
            n: basis.n_sites(),
        });
    }
    let e = level.excitation();
    Ok(basis
        .iter()
        .map(|c| if c[site] == e { 1.0 } else { 0.0 })
        .collect())
}
