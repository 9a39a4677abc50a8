//! Entropy-front arrival times and the group velocity of the light cone.
//!
//! A site's arrival time `t*_n` is the time of fastest growth of its onsite
//! entropy `S_n(t)`. Ring distances are measured to the nearest initially
//! excited site. A least-squares line of distance against arrival time gives
//! the front speed `v_g`, and `N / v_g` is the time a front needs to travel
//! once around the ring.
//!
//! Derivatives are centered differences of a 5-point moving average of
//! `S_n(t)`. The default analysis window closes at the first local maximum of
//! the antipodal site's smoothed entropy that reaches half of its global
//! maximum, i.e. at the first passage of the fronts through the far side of
//! the ring.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::ObservableSeries;

pub const MIN_WINDOW_POINTS: usize = 5;
const SMOOTHING_WIDTH: usize = 5;
/// Derivatives within this relative distance of the maximum count as ties.
const TIE_TOLERANCE: f64 = 1e-12;

/// `min(|a - b|, n - |a - b|)`.
pub fn ring_distance(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b) % n;
    d.min(n - d)
}

/// Distance of every site to the nearest source site.
pub fn source_distances(n_sites: usize, sources: &[usize]) -> Result<Vec<usize>> {
    if sources.is_empty() {
        return Err(Error::DegenerateFit("no source sites"));
    }
    if let Some(&site) = sources.iter().find(|&&s| s >= n_sites) {
        return Err(Error::SiteOutOfRange { site, n: n_sites });
    }
    Ok((0..n_sites)
        .map(|i| {
            sources
                .iter()
                .map(|&s| ring_distance(i, s, n_sites))
                .min()
                .unwrap_or(0)
        })
        .collect())
}

/// The site minimizing the largest distance to the sources (lowest index on
/// ties). For a contiguous block this is its middle site.
pub fn source_center(n_sites: usize, sources: &[usize]) -> usize {
    (0..n_sites)
        .min_by_key(|&i| {
            sources
                .iter()
                .map(|&s| ring_distance(i, s, n_sites))
                .max()
                .unwrap_or(0)
        })
        .unwrap_or(0)
}

pub fn antipode(n_sites: usize, sources: &[usize]) -> usize {
    (source_center(n_sites, sources) + n_sites / 2) % n_sites
}

/// Centered moving average over 5 points, padding with the edge values.
pub fn smooth(values: &[f64]) -> Vec<f64> {
    let half = SMOOTHING_WIDTH / 2;
    let len = values.len();
    if len == 0 {
        return Vec::new();
    }
    (0..len)
        .map(|i| {
            let sum: f64 = (0..SMOOTHING_WIDTH)
                .map(|k| values[(i + k).saturating_sub(half).min(len - 1)])
                .sum();
            sum / SMOOTHING_WIDTH as f64
        })
        .collect()
}

/// Centered differences in the interior, one-sided at the ends.
pub fn centered_derivative(values: &[f64], times: &[f64]) -> Vec<f64> {
    let len = values.len();
    if len < 2 {
        return vec![0.0; len];
    }
    (0..len)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(len - 1));
            (values[b] - values[a]) / (times[b] - times[a])
        })
        .collect()
}

fn window_indices(times: &[f64], window: (f64, f64)) -> Result<std::ops::Range<usize>> {
    let (lo, hi) = window;
    if !(lo <= hi) {
        return Err(Error::EmptyWindow { lo, hi });
    }
    let start = times.partition_point(|&t| t < lo);
    let end = times.partition_point(|&t| t <= hi);
    let points = end.saturating_sub(start);
    if points < MIN_WINDOW_POINTS {
        return Err(Error::WindowTooShort {
            points,
            min: MIN_WINDOW_POINTS,
        });
    }
    Ok(start..end)
}

/// Per-site `t*_n`: the grid time of the largest smoothed entropy derivative
/// inside `window` (earliest on ties).
pub fn arrival_times(series: &ObservableSeries, window: (f64, f64)) -> Result<Vec<f64>> {
    let range = window_indices(&series.times, window)?;
    Ok((0..series.n_sites())
        .map(|site| {
            let ds = centered_derivative(&smooth(&series.entropy_trace(site)), &series.times);
            let top = ds[range.clone()].iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let best = range
                .clone()
                .find(|&i| ds[i] >= top - TIE_TOLERANCE * top.abs())
                .unwrap_or(range.start);
            series.times[best]
        })
        .collect())
}

/// `[t_0, t_h]` where `t_h` is the first local maximum of the antipodal
/// smoothed entropy reaching half of its global maximum.
pub fn default_window(series: &ObservableSeries, sources: &[usize]) -> Result<(f64, f64)> {
    let n = series.n_sites();
    if series.len() < MIN_WINDOW_POINTS {
        return Err(Error::WindowTooShort {
            points: series.len(),
            min: MIN_WINDOW_POINTS,
        });
    }
    let s = smooth(&series.entropy_trace(antipode(n, sources)));
    let peak = s.iter().copied().fold(0.0, f64::max);
    if peak <= 0.0 {
        return Err(Error::DegenerateFit("antipodal entropy never grows"));
    }
    let end = (1..s.len() - 1)
        .find(|&i| s[i] >= s[i - 1] && s[i] >= s[i + 1] && s[i] >= 0.5 * peak)
        .unwrap_or(s.len() - 1);
    Ok((series.times[0], series.times[end]))
}

/// Which sites enter the velocity fit.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitSites {
    /// Distances `2 ..= ceil(2 d_max / 3)`.
    #[default]
    Auto,
    /// Distances in `min ..= max`.
    Distances { min: usize, max: usize },
    /// Explicit 0-based sites.
    Sites(Vec<usize>),
}

impl FitSites {
    pub fn select(&self, distances: &[usize]) -> Result<Vec<usize>> {
        let by_distance = |lo: usize, hi: usize| {
            (0..distances.len())
                .filter(|&i| (lo..=hi).contains(&distances[i]))
                .collect::<Vec<_>>()
        };
        match self {
            FitSites::Auto => {
                let d_max = distances.iter().copied().max().unwrap_or(0);
                Ok(by_distance(2, (2 * d_max).div_ceil(3)))
            }
            FitSites::Distances { min, max } => Ok(by_distance(*min, *max)),
            FitSites::Sites(sites) => {
                if let Some(&site) = sites.iter().find(|&&s| s >= distances.len()) {
                    return Err(Error::SiteOutOfRange {
                        site,
                        n: distances.len(),
                    });
                }
                Ok(sites.clone())
            }
        }
    }
}

/// Slope and RMS residual of the least-squares line `d = c + v t`.
pub fn fit_group_velocity(arrivals: &[f64], distances: &[f64]) -> Result<(f64, f64)> {
    if arrivals.len() != distances.len() {
        return Err(Error::DimensionMismatch {
            expected: distances.len(),
            got: arrivals.len(),
        });
    }
    if arrivals.len() < 3 {
        return Err(Error::DegenerateFit("fewer than three fit sites"));
    }
    let k = arrivals.len() as f64;
    let tm = arrivals.iter().sum::<f64>() / k;
    let dm = distances.iter().sum::<f64>() / k;
    let stt: f64 = arrivals.iter().map(|t| (t - tm).powi(2)).sum();
    if stt <= 0.0 {
        return Err(Error::DegenerateFit("all arrival times are equal"));
    }
    let std: f64 = arrivals
        .iter()
        .zip(distances)
        .map(|(t, d)| (t - tm) * (d - dm))
        .sum();
    let v = std / stt;
    let c = dm - v * tm;
    let rss: f64 = arrivals
        .iter()
        .zip(distances)
        .map(|(t, d)| (d - c - v * t).powi(2))
        .sum();
    Ok((v, (rss / k).sqrt()))
}

/// `N / v_g`.
pub fn recurrence_time(v_g: f64, n_sites: usize) -> Result<f64> {
    if !(v_g > 0.0) || !v_g.is_finite() {
        return Err(Error::InvalidVelocity(v_g));
    }
    Ok(n_sites as f64 / v_g)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FrontOptions {
    /// Time window; the default rule applies when `None`.
    pub window: Option<(f64, f64)>,
    pub fit_sites: FitSites,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrontFit {
    #[serde(rename = "t_star")]
    pub arrival_times: Vec<f64>,
    pub distances: Vec<usize>,
    pub fit_sites: Vec<usize>,
    pub v_g: f64,
    pub tau_rec: f64,
    #[serde(rename = "residual")]
    pub fit_residual: f64,
    pub window: (f64, f64),
}

/// Arrival times, velocity fit and recurrence time for a run started by
/// raising `sources`.
pub fn analyze_front(
    series: &ObservableSeries,
    sources: &[usize],
    options: &FrontOptions,
) -> Result<FrontFit> {
    let n = series.n_sites();
    let distances = source_distances(n, sources)?;
    let window = match options.window {
        Some(w) => w,
        None => default_window(series, sources)?,
    };
    let arrival_times = arrival_times(series, window)?;
    let fit_sites = options.fit_sites.select(&distances)?;
    let t: Vec<f64> = fit_sites.iter().map(|&i| arrival_times[i]).collect();
    let d: Vec<f64> = fit_sites.iter().map(|&i| distances[i] as f64).collect();
    let (v_g, fit_residual) = fit_group_velocity(&t, &d)?;
    let tau_rec = recurrence_time(v_g, n)?;
    Ok(FrontFit {
        arrival_times,
        distances,
        fit_sites,
        v_g,
        tau_rec,
        fit_residual,
        window,
    })
}
