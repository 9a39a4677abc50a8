//! Maximum total correlation under conservation constraints.
//!
//! Over independent onsite distributions `p_{n,a}` we maximize
//! `sum_n S(p_n) = -sum_{n,a} p_{n,a} ln p_{n,a}` subject to
//!
//! * normalization of each site, `sum_a p_{n,a} = 1`;
//! * total magnetization, `sum_n (p_{n,+1} - p_{n,-1}) = S_z`;
//! * total onsite energy, `sum_{n,a} eps_{n,a} p_{n,a} = E_0`.
//!
//! Interior stationary points have the generalized one-body Boltzmann form
//!
//! ```text
//! p_{n,a} = exp(-beta_E eps_{n,a} - beta_S a) / Z_n
//! ```
//!
//! with two multipliers shared by all sites. The per-site normalization
//! multipliers are absorbed into `Z_n`.
//!
//! When every site carries the same energies the three constraints fix a
//! single row directly ([`solve_homogeneous`]); that row may sit on the
//! simplex boundary, in which case no finite multipliers exist and only the
//! populations and the maximum are reported. Inhomogeneous tables go through a
//! damped Newton solve for `(beta_E, beta_S)` ([`solve_general`]).

use serde::Serialize;

use crate::basis::Level;
use crate::error::{Error, Result};
use crate::observables::Populations;

/// Populations at or below this value mark a boundary optimum.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;
/// Newton stops once both constraint residuals are below this.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 200;
const MAX_HALVINGS: usize = 60;

/// Per-site onsite energies indexed by [`Level::index`].
pub type EnergyTable = [[f64; 3]];

const SPINS: [f64; 3] = [-1.0, 0.0, 1.0];
const LABELS: [&str; 3] = ["p_-1", "p_0", "p_+1"];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Residuals {
    pub magnetization: f64,
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GobbsSolution {
    #[serde(rename = "p_tilde")]
    pub populations: Populations,
    /// `None` when the optimum lies on the simplex boundary.
    #[serde(rename = "beta_E")]
    pub beta_e: Option<f64>,
    #[serde(rename = "beta_S")]
    pub beta_s: Option<f64>,
    #[serde(rename = "C_max")]
    pub c_max: f64,
    #[serde(rename = "C_max_per_site")]
    pub c_max_per_site: f64,
    #[serde(rename = "boundary_flag")]
    pub boundary: bool,
    pub residuals: Residuals,
}

impl GobbsSolution {
    fn assemble(
        populations: Populations,
        table: &EnergyTable,
        s_z: f64,
        e0: f64,
        multipliers: Option<(f64, f64)>,
        boundary: bool,
    ) -> Result<Self> {
        let c_max = entropy_sum(&populations)?;
        let n = populations.n_sites() as f64;
        let residuals = residuals(&populations, table, s_z, e0);
        Ok(Self {
            beta_e: multipliers.map(|m| m.0),
            beta_s: multipliers.map(|m| m.1),
            c_max,
            c_max_per_site: c_max / n,
            boundary,
            residuals,
            populations,
        })
    }
}

fn entropy_sum(p: &Populations) -> Result<f64> {
    Ok(p.entropies()?.iter().sum())
}

/// `C~_T = -sum_{n,a} p~ ln p~`.
pub fn correlation_max(solution: &GobbsSolution) -> f64 {
    solution.c_max
}

fn residuals(p: &Populations, table: &EnergyTable, s_z: f64, e0: f64) -> Residuals {
    let energy: f64 = p
        .rows()
        .iter()
        .zip(table)
        .map(|(row, eps)| row.iter().zip(eps).map(|(x, e)| x * e).sum::<f64>())
        .sum();
    Residuals {
        magnetization: p.magnetization() - s_z,
        energy: energy - e0,
    }
}

/// Homogeneous optimum: every site has energies `level_energies` (indexed by
/// [`Level::index`]) and the same populations.
pub fn solve_homogeneous(
    level_energies: [f64; 3],
    n_sites: usize,
    s_z: f64,
    e0: f64,
) -> Result<GobbsSolution> {
    let n = n_sites as f64;
    let [em, e_zero, ep] = level_energies;
    // rows: magnetization, energy, normalization; unknowns (p_-1, p_0, p_+1)
    let a = [[-1.0, 0.0, 1.0], [em, e_zero, ep], [1.0, 1.0, 1.0]];
    let b = [s_z / n, e0 / n, 1.0];
    let det = det3(&a);
    let scale = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    if det.abs() <= 1e-14 * scale.powi(3) {
        return Err(Error::SingularJacobian);
    }
    let mut p = [0.0; 3];
    for (col, slot) in p.iter_mut().enumerate() {
        let mut m = a;
        for row in 0..3 {
            m[row][col] = b[row];
        }
        *slot = det3(&m) / det;
    }
    for (k, &x) in p.iter().enumerate() {
        if x < -BOUNDARY_TOLERANCE || x > 1.0 + BOUNDARY_TOLERANCE {
            return Err(Error::Infeasible {
                component: LABELS[k].to_string(),
                value: x,
            });
        }
    }
    let p = p.map(|x| x.clamp(0.0, 1.0));
    let boundary = p.iter().any(|&x| x <= BOUNDARY_TOLERANCE);
    let multipliers = (!boundary).then(|| {
        let [pm, p0, pp] = p;
        let beta_e = -(pp * pm / (p0 * p0)).ln() / (ep + em - 2.0 * e_zero);
        let beta_s = -(pp / p0).ln() - beta_e * (ep - e_zero);
        (beta_e, beta_s)
    });
    let table = vec![level_energies; n_sites];
    GobbsSolution::assemble(
        Populations::uniform(n_sites, p),
        &table,
        s_z,
        e0,
        multipliers,
        boundary,
    )
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Boltzmann-form row `exp(-beta_E eps_a - beta_S a) / Z`.
pub fn boltzmann_row(eps: &[f64; 3], beta_e: f64, beta_s: f64) -> [f64; 3] {
    let exponents: [f64; 3] = std::array::from_fn(|k| -beta_e * eps[k] - beta_s * SPINS[k]);
    let top = exponents.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
    let w = exponents.map(|x| (x - top).exp());
    let z: f64 = w.iter().sum();
    w.map(|x| x / z)
}

/// Sums over sites of the means and covariances of `(a, eps)` under the
/// Boltzmann rows.
struct Moments {
    mean_a: f64,
    mean_e: f64,
    var_a: f64,
    var_e: f64,
    cov: f64,
}

fn moments(table: &EnergyTable, beta_e: f64, beta_s: f64) -> Moments {
    let mut m = Moments {
        mean_a: 0.0,
        mean_e: 0.0,
        var_a: 0.0,
        var_e: 0.0,
        cov: 0.0,
    };
    for eps in table {
        let p = boltzmann_row(eps, beta_e, beta_s);
        let ma: f64 = (0..3).map(|k| p[k] * SPINS[k]).sum();
        let me: f64 = (0..3).map(|k| p[k] * eps[k]).sum();
        m.mean_a += ma;
        m.mean_e += me;
        m.var_a += (0..3).map(|k| p[k] * (SPINS[k] - ma).powi(2)).sum::<f64>();
        m.var_e += (0..3).map(|k| p[k] * (eps[k] - me).powi(2)).sum::<f64>();
        m.cov += (0..3)
            .map(|k| p[k] * (SPINS[k] - ma) * (eps[k] - me))
            .sum::<f64>();
    }
    m
}

/// Signed distance of `(s_z, e0)` inside the attainable region (positive
/// inside), measured along the facet normals of the Minkowski sum of the
/// per-site level triangles.
fn feasibility_margin(table: &EnergyTable, s_z: f64, e0: f64) -> f64 {
    let mut margin = f64::INFINITY;
    for eps in table {
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            let (dx, dy) = (SPINS[j] - SPINS[i], eps[j] - eps[i]);
            let len = dx.hypot(dy);
            if len == 0.0 {
                continue;
            }
            for (ux, uy) in [(dy / len, -dx / len), (-dy / len, dx / len)] {
                let support: f64 = table
                    .iter()
                    .map(|e| (0..3).map(|k| ux * SPINS[k] + uy * e[k]).fold(f64::MIN, f64::max))
                    .sum();
                margin = margin.min(support - (ux * s_z + uy * e0));
            }
        }
    }
    margin
}

/// Solve for the shared multipliers of an arbitrary energy table.
pub fn solve_general(table: &EnergyTable, s_z: f64, e0: f64) -> Result<GobbsSolution> {
    if let Some(v) = table.iter().flatten().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            name: "energy table",
            value: *v,
        });
    }
    let margin = feasibility_margin(table, s_z, e0);
    if margin < -1e-9 {
        return Err(Error::Infeasible {
            component: "distance outside the attainable (S_z, E0) region".into(),
            value: -margin,
        });
    }
    if margin <= 1e-9 {
        return Err(Error::Infeasible {
            component: "targets on the attainable boundary; margin".into(),
            value: margin,
        });
    }

    let residual = |beta: (f64, f64)| {
        let m = moments(table, beta.0, beta.1);
        (m.mean_a - s_z, m.mean_e - e0)
    };
    let size = |r: (f64, f64)| r.0.abs().max(r.1.abs());

    let mut beta = (0.0, 0.0);
    let mut r = residual(beta);
    let mut iterations = 0;
    while size(r) >= RESIDUAL_TOLERANCE {
        if iterations == MAX_ITERATIONS {
            return Err(Error::NoConvergence {
                iterations,
                residual: size(r),
            });
        }
        iterations += 1;
        let m = moments(table, beta.0, beta.1);
        // d(mean_a, mean_e)/d(beta_E, beta_S)
        let (j11, j12, j21, j22) = (-m.cov, -m.var_a, -m.var_e, -m.cov);
        let det = j11 * j22 - j12 * j21;
        if det.abs() <= 1e-14 * (m.var_a * m.var_e).max(f64::MIN_POSITIVE) {
            return Err(Error::SingularJacobian);
        }
        let step = (
            (-r.0 * j22 + r.1 * j12) / det,
            (-r.1 * j11 + r.0 * j21) / det,
        );
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let trial = (beta.0 + scale * step.0, beta.1 + scale * step.1);
            let rt = residual(trial);
            if size(rt) < size(r) {
                beta = trial;
                r = rt;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence {
                iterations,
                residual: size(r),
            });
        }
    }

    let rows = table
        .iter()
        .map(|eps| boltzmann_row(eps, beta.0, beta.1))
        .collect();
    let populations = Populations::from_rows(rows);
    let boundary = populations
        .rows()
        .iter()
        .flatten()
        .any(|&x| x <= BOUNDARY_TOLERANCE);
    GobbsSolution::assemble(populations, table, s_z, e0, Some(beta), boundary)
}

/// Maximum with the magnetization constraint dropped (`beta_S = 0`): the
/// ordinary one-body Boltzmann state at the energy `e0`.
pub fn solve_energy_only(table: &EnergyTable, e0: f64) -> Result<GobbsSolution> {
    let (lo, hi) = table.iter().fold((0.0, 0.0), |(lo, hi), eps| {
        (
            lo + eps.iter().copied().fold(f64::INFINITY, f64::min),
            hi + eps.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        )
    });
    if e0 <= lo || e0 >= hi {
        return Err(Error::Infeasible {
            component: "E0 outside the open energy range".into(),
            value: e0,
        });
    }
    // mean energy is decreasing in beta_E; bracket then bisect-Newton
    let mean = |b: f64| moments(table, b, 0.0).mean_e;
    let (mut a, mut b) = (-1.0, 1.0);
    while mean(a) < e0 {
        a *= 2.0;
    }
    while mean(b) > e0 {
        b *= 2.0;
    }
    let mut beta = 0.5 * (a + b);
    for iteration in 0..=MAX_ITERATIONS {
        let m = moments(table, beta, 0.0);
        let r = m.mean_e - e0;
        if r.abs() < RESIDUAL_TOLERANCE {
            break;
        }
        if iteration == MAX_ITERATIONS {
            return Err(Error::NoConvergence {
                iterations: iteration,
                residual: r.abs(),
            });
        }
        if r > 0.0 {
            a = beta;
        } else {
            b = beta;
        }
        let newton = beta - r / (-m.var_e);
        beta = if newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
    }
    let rows = table.iter().map(|eps| boltzmann_row(eps, beta, 0.0)).collect();
    let populations = Populations::from_rows(rows);
    let s_z = populations.magnetization();
    GobbsSolution::assemble(populations, table, s_z, e0, Some((beta, 0.0)), false)
}

/// `ln(p_a / p_0)` predicted by the Boltzmann form for site energies `eps`.
pub fn log_ratio(eps: &[f64; 3], level: Level, beta_e: f64, beta_s: f64) -> f64 {
    let k = level.index();
    -beta_e * (eps[k] - eps[1]) - beta_s * SPINS[k]
}
