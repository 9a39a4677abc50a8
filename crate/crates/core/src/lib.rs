//! Exact dynamics of local excitations on a spin-1 ring.
//!
//! The Hamiltonian
//!
//! ```text
//! H = sum_n [ Omega (S^z_n)^2 + omega S^z_n ] + J sum_n (S^+_n S^-_{n+1} + h.c.)
//! ```
//!
//! (optionally with longer-range hops) conserves total `S^z`, so a state with
//! `m` sites raised above the fully polarized `-1` background stays in the
//! `m`-magnon sector. This crate enumerates that sector, diagonalizes the
//! Hamiltonian there, propagates initial product states, and measures onsite
//! populations, onsite entropies and the total correlation. It also provides
//! the infinite-time diagonal ensemble, the constrained maximum of the total
//! correlation and a light-cone fit of the entropy fronts.
//!
//! ```
//! use spinrelax::{basis, evolve, hamiltonian::ModelParams, observables};
//!
//! let params = ModelParams::new(10, 0.3, -1.0, -0.13);
//! let sector = basis::enumerate_basis(10, 3)?;
//! assert_eq!(sector.dim(), 210);
//!
//! let h = spinrelax::hamiltonian::build_hamiltonian(&params, &sector)?;
//! let psi0 = evolve::initial_state(&sector, &[0, 1, 2])?;
//! let spec = evolve::diagonalize(&h)?.with_initial_state(&psi0)?;
//! let series = observables::observe(&spec, &psi0, &evolve::time_grid(20.0, 50), &sector, &params)?;
//! assert_eq!(series.total_correlation[0], 0.0);
//! # Ok::<(), spinrelax::Error>(())
//! ```

pub mod basis;
pub mod ensemble;
pub mod error;
pub mod evolve;
pub mod gobbs;
pub mod hamiltonian;
pub mod observables;
pub mod wavefront;

pub use basis::{enumerate_basis, Level, MagnonBasis, SpinConfig};
pub use ensemble::{steady_report, DiagonalEnsemble, SteadyReport};
pub use error::{Error, Result};
pub use evolve::{diagonalize, initial_state, SpectralDecomposition};
pub use gobbs::GobbsSolution;
pub use hamiltonian::{build_hamiltonian, ModelParams, SectorMatrix};
pub use observables::{observe, ObservableSeries, Populations};
pub use wavefront::{analyze_front, FrontFit};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/basis.md")]
    mod basis {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/steady-state.md")]
    mod steady_state {}
    #[doc = include_str!("../../../book/src/gobbs.md")]
    mod gobbs {}
    #[doc = include_str!("../../../book/src/wavefront.md")]
    mod wavefront {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
