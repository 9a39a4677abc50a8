use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use spinrelax::basis::{dimension, enumerate_basis_with_cap, Level, SpinConfig};
use spinrelax::ensemble::{default_window, finite_time_average, steady_report, SteadyReport, WindowAverage};
use spinrelax::evolve::{diagonalize, initial_state};
use spinrelax::gobbs::{solve_homogeneous, GobbsSolution};
use spinrelax::hamiltonian::build_hamiltonian;
use spinrelax::observables::{observe, ObservableSeries};
use spinrelax::wavefront::{analyze_front, FrontFit, FrontOptions};

mod config;
mod svg;

use config::RunConfig;

/// Environment variable overriding `output.directory`.
pub const OUT_ENV: &str = "SPINRELAX_OUT";
const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read config: {0}")]
    Parse(String),
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    #[error("sector dimension {dim} exceeds the capacity limit {cap} (sector.max_dim)")]
    Capacity { dim: u128, cap: usize },
    #[error(transparent)]
    Model(#[from] spinrelax::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Parser)]
#[command(name = "spinrelax", version, about = "Magnon-sector dynamics of spin-1 rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve, analyse and write tables, summaries and figures.
    Run {
        config: PathBuf,
        /// Print the resolved config and sector dimension, then stop.
        #[arg(long)]
        dry_run: bool,
        /// Output directory (overrides the config and SPINRELAX_OUT).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the dimension of the m-magnon sector of an N-site ring.
    Dims { n: usize, m: usize },
    /// Solve for the maximal-correlation state only and print it as JSON.
    Gobbs { config: PathBuf },
    /// Print the version.
    Version,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, dry_run, out } => run(&config, dry_run, out),
        Command::Dims { n, m } => dimension(n, m)
            .map(|d| println!("{d}"))
            .map_err(CliError::from),
        Command::Gobbs { config } => load(&config).and_then(|c| {
            let report = GobbsReport::new(&c)?;
            println!("{}", to_json(&report));
            Ok(())
        }),
        Command::Version => {
            println!("spinrelax {VERSION}");
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    RunConfig::parse(&text)?.resolve()
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes") + "\n"
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Io { path, source })
}

fn level_tag(level: Level) -> &'static str {
    match level {
        Level::Down => "-1",
        Level::Zero => "0",
        Level::Up => "+1",
    }
}

/// Fixed 12-significant-digit rendering used in every CSV.
fn num(x: f64) -> String {
    // adding +0.0 turns -0.0 into 0.0
    format!("{:.11e}", x + 0.0)
}

fn write_csv(dir: &Path, name: &str, header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Result<(), CliError> {
    let path = dir.join(name);
    let io = |e: csv::Error| CliError::Io {
        path: path.clone(),
        source: e.into(),
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(&path)
        .map_err(io)?;
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })
}

#[derive(Serialize)]
struct GobbsReport<'a> {
    version: &'static str,
    config: &'a RunConfig,
    #[serde(rename = "S_z")]
    s_z: f64,
    #[serde(rename = "E0")]
    e0: f64,
    levels: [i8; 3],
    #[serde(flatten)]
    solution: GobbsSolution,
}

impl<'a> GobbsReport<'a> {
    fn new(config: &'a RunConfig) -> Result<Self, CliError> {
        let params = config.params();
        let n = config.model.n;
        let start = SpinConfig::from_raised_sites(n, &config.raised_sites())?;
        let eps = params.level_energies();
        let e0 = (0..n).map(|s| eps[start.level(s).index()]).sum();
        let s_z = start.magnetization() as f64;
        let solution = solve_homogeneous(eps, n, s_z, e0)?;
        Ok(Self {
            version: VERSION,
            config,
            s_z,
            e0,
            levels: Level::ALL.map(Level::spin),
            solution,
        })
    }
}

#[derive(Serialize)]
struct SteadyJson<'a> {
    version: &'static str,
    config: &'a RunConfig,
    levels: [i8; 3],
    p_inf: &'a [[f64; 3]],
    #[serde(rename = "C_T_inf")]
    c_t: f64,
    #[serde(rename = "C_T_inf_per_site")]
    c_t_per_site: f64,
    total_onsite_energy: f64,
    degeneracy_groups: usize,
    window_average: Option<WindowJson>,
}

#[derive(Serialize)]
struct WindowJson {
    window_t: (f64, f64),
    #[serde(rename = "window_Jt")]
    window_jt: (f64, f64),
    points: usize,
    p_site_1: [f64; 3],
    #[serde(rename = "C_T_per_site")]
    c_t_per_site: f64,
    total_onsite_energy: f64,
}

#[derive(Serialize)]
struct WavefrontJson<'a> {
    version: &'static str,
    config: &'a RunConfig,
    t_star: &'a [f64],
    #[serde(rename = "Jt_star")]
    jt_star: Vec<f64>,
    distances: &'a [usize],
    fit_sites: Vec<usize>,
    v_g: f64,
    #[serde(rename = "v_g_over_J")]
    v_g_over_j: f64,
    tau_rec: f64,
    #[serde(rename = "J_tau_rec")]
    j_tau_rec: f64,
    residual: f64,
    window_t: (f64, f64),
    #[serde(rename = "window_Jt")]
    window_jt: (f64, f64),
}

fn run(path: &Path, dry_run: bool, out: Option<PathBuf>) -> Result<(), CliError> {
    let config = load(path)?;
    // the override only moves the files; the embedded config stays as written
    let dir = out
        .or_else(|| env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| config.output.directory.clone());
    let (n, m) = (config.model.n, config.sector.m);
    let dim = dimension(n, m)?;
    if dim > config.sector.max_dim as u128 {
        return Err(CliError::Capacity {
            dim,
            cap: config.sector.max_dim,
        });
    }
    if dry_run {
        print!("{}", config.to_toml());
        println!("\n# output directory: {}", dir.display());
        println!("# sector dimension: {dim}");
        return Ok(());
    }

    fs::create_dir_all(&dir).map_err(|source| CliError::Io {
        path: dir.clone(),
        source,
    })?;
    let a = config.analyses.clone();
    let j = config.model.j.abs();

    let gobbs = if a.gobbs { Some(GobbsReport::new(&config)?) } else { None };

    let needs_series = a.evolve || a.wavefront;
    let mut series = None;
    let mut steady = None;
    if needs_series || a.steady {
        let params = config.params();
        let basis = enumerate_basis_with_cap(n, m, config.sector.max_dim)?;
        let h = build_hamiltonian(&params, &basis)?;
        let psi0 = initial_state(&basis, &config.raised_sites())?;
        let spec = diagonalize(&h)?.with_initial_state(&psi0)?;
        if a.steady {
            steady = Some(steady_report(&spec, &basis, &params)?);
        }
        if needs_series {
            series = Some(observe(&spec, &psi0, &config.times(), &basis, &params)?);
        }
    }

    let front = match (&series, a.wavefront) {
        (Some(s), true) => {
            let options = FrontOptions {
                window: config.front_window(),
                fit_sites: config.fit_sites(),
            };
            Some(analyze_front(s, &config.raised_sites(), &options)?)
        }
        _ => None,
    };

    let window = series
        .as_ref()
        .map(|s| finite_time_average(s, default_window(&s.times, front.as_ref().map(|f| f.tau_rec))))
        .transpose()?;

    if config.output.csv {
        if let (Some(s), true) = (&series, a.evolve) {
            write_tables(&dir, s, j)?;
        }
    }
    if config.output.json {
        if let Some(g) = &gobbs {
            write(&dir, "gobbs.json", &to_json(g))?;
        }
        if let Some(st) = &steady {
            write(&dir, "steady.json", &to_json(&steady_json(&config, st, window.as_ref(), j)))?;
        }
        if let Some(f) = &front {
            write(&dir, "wavefront.json", &to_json(&wavefront_json(&config, f, j)))?;
        }
    }
    if config.output.svg {
        if let (Some(s), true) = (&series, a.evolve) {
            write_figures(&dir, s, j, steady.as_ref(), gobbs.as_ref().map(|g| &g.solution))?;
        }
    }
    Ok(())
}

fn steady_json<'a>(config: &'a RunConfig, st: &'a SteadyReport, window: Option<&WindowAverage>, j: f64) -> SteadyJson<'a> {
    let n = config.model.n as f64;
    SteadyJson {
        version: VERSION,
        config,
        levels: Level::ALL.map(Level::spin),
        p_inf: st.steady_populations.rows(),
        c_t: st.total_correlation,
        c_t_per_site: st.total_correlation / n,
        total_onsite_energy: st.total_onsite_energy,
        degeneracy_groups: st.degeneracy_group_count(),
        window_average: window.map(|w| WindowJson {
            window_t: w.window,
            window_jt: (j * w.window.0, j * w.window.1),
            points: w.points,
            p_site_1: w.populations.row(0),
            c_t_per_site: w.total_correlation / n,
            total_onsite_energy: w.total_onsite_energy,
        }),
    }
}

fn wavefront_json<'a>(config: &'a RunConfig, f: &'a FrontFit, j: f64) -> WavefrontJson<'a> {
    WavefrontJson {
        version: VERSION,
        config,
        t_star: &f.arrival_times,
        jt_star: f.arrival_times.iter().map(|t| j * t).collect(),
        distances: &f.distances,
        fit_sites: f.fit_sites.iter().map(|s| s + 1).collect(),
        v_g: f.v_g,
        v_g_over_j: f.v_g / j,
        tau_rec: f.tau_rec,
        j_tau_rec: j * f.tau_rec,
        residual: f.fit_residual,
        window_t: f.window,
        window_jt: (j * f.window.0, j * f.window.1),
    }
}

fn write_tables(dir: &Path, s: &ObservableSeries, j: f64) -> Result<(), CliError> {
    let n = s.n_sites();
    let time_cols = || vec!["t".to_string(), "Jt".to_string()];
    let lead = |k: usize| vec![num(s.times[k]), num(j * s.times[k])];

    let mut header = time_cols();
    for site in 1..=n {
        for level in Level::ALL {
            header.push(format!("P_{site}_{}", level_tag(level)));
        }
    }
    write_csv(dir, "populations.csv", &header, (0..s.len()).map(|k| {
        let mut row = lead(k);
        row.extend(s.populations[k].rows().iter().flatten().map(|&x| num(x)));
        row
    }))?;

    let mut header = time_cols();
    header.extend((1..=n).map(|site| format!("S_{site}")));
    write_csv(dir, "entropy.csv", &header, (0..s.len()).map(|k| {
        let mut row = lead(k);
        row.extend(s.onsite_entropy[k].iter().map(|&x| num(x)));
        row
    }))?;

    let mut header = time_cols();
    header.extend(["C_T".to_string(), "C_T_per_site".to_string()]);
    write_csv(dir, "correlation.csv", &header, (0..s.len()).map(|k| {
        let c = s.total_correlation[k];
        let mut row = lead(k);
        row.extend([num(c), num(c / n as f64)]);
        row
    }))?;

    let mut header = time_cols();
    header.push("E_onsite".to_string());
    header.extend((1..=n).map(|site| format!("E_{site}")));
    write_csv(dir, "energies.csv", &header, (0..s.len()).map(|k| {
        let mut row = lead(k);
        row.push(num(s.total_onsite_energy[k]));
        row.extend(s.onsite_energy[k].iter().map(|&x| num(x)));
        row
    }))
}

fn write_figures(
    dir: &Path,
    s: &ObservableSeries,
    j: f64,
    steady: Option<&SteadyReport>,
    gobbs: Option<&GobbsSolution>,
) -> Result<(), CliError> {
    let n = s.n_sites();
    let jt: Vec<f64> = s.times.iter().map(|t| j * t).collect();

    let down: Vec<Vec<f64>> = (0..n).map(|site| s.population_trace(site, Level::Down)).collect();
    let svg = svg::heatmap("P(n, -1)", "Jt", "site", &jt, &down, (0.0, 1.0));
    write(dir, "populations.svg", &svg)?;

    let entropy: Vec<Vec<f64>> = (0..n).map(|site| s.entropy_trace(site)).collect();
    let svg = svg::heatmap("S_n", "Jt", "site", &jt, &entropy, (0.0, 3f64.ln()));
    write(dir, "entropy.svg", &svg)?;

    let per_site: Vec<f64> = s.total_correlation.iter().map(|c| c / n as f64).collect();
    let mut levels = Vec::new();
    if let Some(g) = gobbs {
        levels.push(svg::Level {
            label: "max C/N",
            y: g.c_max_per_site,
            color: "#d62728",
        });
    }
    if let Some(st) = steady {
        levels.push(svg::Level {
            label: "C_inf/N",
            y: st.total_correlation / n as f64,
            color: "#7f7f7f",
        });
    }
    let svg = svg::line_plot(
        "total correlation per site",
        "Jt",
        "C_T / N",
        &[svg::Line {
            label: "C_T/N",
            x: &jt,
            y: &per_site,
            color: "#1f77b4",
        }],
        &levels,
    );
    write(dir, "correlation.svg", &svg)?;

    let colors = ["#1f77b4", "#2ca02c", "#d62728"];
    let traces: Vec<Vec<f64>> = Level::ALL.iter().map(|&l| s.population_trace(0, l)).collect();
    let labels = ["P(1,-1)", "P(1,0)", "P(1,+1)"];
    let ref_labels = ["p_inf(-1)", "p_inf(0)", "p_inf(+1)"];
    let lines: Vec<svg::Line> = (0..3)
        .map(|k| svg::Line {
            label: labels[k],
            x: &jt,
            y: &traces[k],
            color: colors[k],
        })
        .collect();
    let levels: Vec<svg::Level> = steady
        .map(|st| {
            (0..3)
                .map(|k| svg::Level {
                    label: ref_labels[k],
                    y: st.site_row(0)[k],
                    color: colors[k],
                })
                .collect()
        })
        .unwrap_or_default();
    let svg = svg::line_plot("site 1 populations", "Jt", "P", &lines, &levels);
    write(dir, "site1.svg", &svg)
}
