//! Config-driven sweeps that write CSV tables, optimizer records and a
//! manifest.
//!
//! Every run writes `manifest.json` next to its output: the crate version,
//! the command, the seed and the full resolved config. Feeding the manifest
//! back as the config reproduces the output byte for byte, whatever the
//! thread count.

mod config;

pub use config::{
    AntennaSpec, Axis, EeConfig, Hardware, Keyword, LinkSpec, MethodTag, ProfileSource, Range,
    RateSweepConfig, RunConfig,
};

use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{channel_with_profile, VarianceProfile};
use crate::energy::{energy_efficiency, PowerModel};
use crate::error::{Error, Result};
use crate::geometry::build_lattice;
use crate::link::{
    check_mc_inputs, closed_form_rate, estimate_moments, mc_rate_from_moments, LinkConfig,
};
use crate::optimizer::{
    build_problem, grid_scan_auto, optimize, optimize_source_given_receive, EEProblem,
    OptimizerReport,
};
use crate::RateUnit;

/// CLI subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    RateSweep,
    EeSweep,
    EeSurface,
    Optimize,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::RateSweep => "rate-sweep",
            Command::EeSweep => "ee-sweep",
            Command::EeSurface => "ee-surface",
            Command::Optimize => "optimize",
        }
    }

    /// File the command writes into the output directory.
    pub fn output_file(self) -> &'static str {
        match self {
            Command::RateSweep => "rate_sweep.csv",
            Command::EeSweep => "ee_sweep.csv",
            Command::EeSurface => "ee_surface.csv",
            Command::Optimize => "optimize.json",
        }
    }
}

/// `snr_db, L_s, L_r, N_s, N_r, K, method, sum_rate`
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub snr_db: f64,
    #[serde(rename = "L_s")]
    pub l_s: f64,
    #[serde(rename = "L_r")]
    pub l_r: f64,
    #[serde(rename = "N_s")]
    pub n_s: usize,
    #[serde(rename = "N_r")]
    pub n_r: usize,
    #[serde(rename = "K")]
    pub users: usize,
    pub method: &'static str,
    pub sum_rate: f64,
}

/// `p_u, N_s, ee, kind`; `kind` is `curve` or `optimum`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EeRow {
    pub p_u: f64,
    #[serde(rename = "N_s")]
    pub n_s: u64,
    pub ee: f64,
    pub kind: &'static str,
}

/// `N_s, N_r, ee, kind`; `kind` is `grid`, `grid_argmax` or `optimum`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceRow {
    #[serde(rename = "N_s")]
    pub n_s: u64,
    #[serde(rename = "N_r")]
    pub n_r: u64,
    pub ee: f64,
    pub kind: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeEntry {
    pub p_u: f64,
    #[serde(flatten)]
    pub report: OptimizerReport,
    /// `[N_s, N_r]` from the exhaustive integer scan, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<[u64; 2]>,
}

/// Output of `optimize`: the input echo and one record per `p_u`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeRun {
    pub config: RunConfig,
    /// Unit of `ee`, `bits` or `nats` per joule per hertz.
    pub unit: RateUnit,
    pub results: Vec<OptimizeEntry>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'static str,
    command: &'static str,
    seed: u64,
    config: &'a RunConfig,
}

fn missing(section: &str) -> Error {
    Error::InvalidParameter(format!("config has no `{section}` section"))
}

/// Closed-form-rate energy efficiency at integer counts, in the config's unit.
fn ee_at(profile: &VarianceProfile, link: &LinkConfig, model: &PowerModel, n_s: u64, n_r: u64) -> Result<f64> {
    let (n_s, n_r) = (n_s as usize, n_r as usize);
    let rate = closed_form_rate(profile, link, n_s, n_r)?;
    Ok(energy_efficiency(&rate, model, n_s, n_r))
}

/// Sum rate against SNR for every configured link, closed form and
/// Monte-Carlo.
///
/// The Monte-Carlo moments do not depend on the transmit power, so each link
/// is sampled once (`trials` draws, seed `seed + link index`) and reused for
/// all SNR points.
pub fn run_rate_sweep(cfg: &RunConfig) -> Result<Vec<RateRow>> {
    let rs = cfg.rate_sweep.as_ref().ok_or_else(|| missing("rate_sweep"))?;
    let distances = cfg.user_distances();
    let mut rows = Vec::new();
    for (idx, spec) in rs.links.iter().enumerate() {
        let bs = spec.n_s.geometry(spec.l_s, 0.0)?;
        let user = spec.n_r.geometry(spec.l_r, 0.0)?;
        let lat_s = build_lattice(spec.l_s, spec.l_s)?;
        let lat_r = build_lattice(spec.l_r, spec.l_r)?;
        let profile = cfg.profile(&lat_s, &lat_r)?;
        let (n_s, n_r) = (bs.antenna_count(), user.antenna_count());
        info!("link L_s={} L_r={}: N_s={n_s} N_r={n_r}", spec.l_s, spec.l_r);

        let mc = if rs.methods.contains(&MethodTag::Mc) {
            let channel = channel_with_profile(&bs, &user, &distances, profile.clone())?;
            let probe = LinkConfig::new(1.0, cfg.sigma2_w, cfg.users, cfg.trials)?;
            check_mc_inputs(&channel, &probe)?;
            let moments = estimate_moments(&channel, cfg.trials, cfg.seed.wrapping_add(idx as u64));
            Some((channel, moments))
        } else {
            None
        };

        for &snr_db in &rs.snr_db {
            let link = LinkConfig::from_snr_db(snr_db, cfg.sigma2_w, cfg.users, cfg.trials)?
                .with_unit(cfg.unit());
            for method in &rs.methods {
                let result = match (method, &mc) {
                    (MethodTag::Th, _) => closed_form_rate(&profile, &link, n_s, n_r)?,
                    (MethodTag::Mc, Some((channel, m))) => mc_rate_from_moments(m, channel, &link)?,
                    (MethodTag::Mc, None) => unreachable!("moments are estimated when mc is requested"),
                };
                rows.push(RateRow {
                    snr_db,
                    l_s: spec.l_s,
                    l_r: spec.l_r,
                    n_s,
                    n_r,
                    users: cfg.users,
                    method: result.method.tag(),
                    sum_rate: result.sum_rate,
                });
            }
        }
    }
    Ok(rows)
}

/// Shared setup of the energy-efficiency commands for one transmit power.
struct EeCase {
    profile: VarianceProfile,
    link: LinkConfig,
    model: PowerModel,
    problem: EEProblem,
}

impl EeCase {
    fn new(cfg: &RunConfig, profile: &VarianceProfile, p_u: f64) -> Result<Self> {
        let link = LinkConfig::new(p_u, cfg.sigma2_w, cfg.users, cfg.trials)?.with_unit(cfg.unit());
        let model = cfg.power_model(p_u)?;
        let problem = build_problem(profile, &link, &model, profile.n_s() as u64, profile.n_r() as u64)?;
        Ok(Self {
            profile: profile.clone(),
            link,
            model,
            problem,
        })
    }

    fn ee(&self, n_s: u64, n_r: u64) -> Result<f64> {
        ee_at(&self.profile, &self.link, &self.model, n_s, n_r)
    }
}

fn ee_profile(cfg: &RunConfig, ee: &EeConfig) -> Result<VarianceProfile> {
    let lat_s = build_lattice(ee.l_s, ee.l_s)?;
    let lat_r = build_lattice(ee.l_r, ee.l_r)?;
    cfg.profile(&lat_s, &lat_r)
}

/// Energy efficiency against `N_s` at a fixed or optimal `N_r`, one curve per
/// `p_u`, each followed by the optimizer's `N_s` for that `N_r`.
pub fn run_ee_sweep(cfg: &RunConfig) -> Result<Vec<EeRow>> {
    let ee = cfg.ee.as_ref().ok_or_else(|| missing("ee"))?;
    let Axis::Sweep(range) = &ee.n_s else {
        return Err(Error::InvalidParameter("ee-sweep needs `ee.n_s` to be a sweep".into()));
    };
    let profile = ee_profile(cfg, ee)?;
    let mut rows = Vec::new();
    for &p_u in &ee.p_u {
        let case = EeCase::new(cfg, &profile, p_u)?;
        let n_r = match ee.n_r {
            Axis::Optimal => optimize(&case.problem)?.n_r_opt,
            Axis::Fixed(n) => n,
            Axis::Sweep(_) => {
                return Err(Error::InvalidParameter(
                    "ee-sweep needs `ee.n_r` to be fixed or optimal".into(),
                ))
            }
        };
        let values = range.values(case.problem.n_s());
        let curve = values
            .par_iter()
            .map(|&n_s| case.ee(n_s, n_r))
            .collect::<Result<Vec<_>>>()?;
        rows.extend(values.iter().zip(curve).map(|(&n_s, ee)| EeRow {
            p_u,
            n_s,
            ee,
            kind: "curve",
        }));
        match optimize_source_given_receive(&case.problem, n_r) {
            Ok((n_s, _)) => rows.push(EeRow {
                p_u,
                n_s,
                ee: case.ee(n_s, n_r)?,
                kind: "optimum",
            }),
            Err(e) => warn!("no optimum marker at p_u = {p_u}: {e}"),
        }
    }
    Ok(rows)
}

/// Energy efficiency over an integer `(N_s, N_r)` grid for a single `p_u`,
/// followed by the grid argmax and the optimizer's answer.
pub fn run_ee_surface(cfg: &RunConfig) -> Result<Vec<SurfaceRow>> {
    let ee = cfg.ee.as_ref().ok_or_else(|| missing("ee"))?;
    let (Axis::Sweep(rs), Axis::Sweep(rr)) = (&ee.n_s, &ee.n_r) else {
        return Err(Error::InvalidParameter("ee-surface needs both axes to be sweeps".into()));
    };
    let [p_u] = ee.p_u[..] else {
        return Err(Error::InvalidParameter("ee-surface takes exactly one p_u".into()));
    };
    let profile = ee_profile(cfg, ee)?;
    let case = EeCase::new(cfg, &profile, p_u)?;
    let ns_values = rs.values(case.problem.n_s());
    let nr_values = rr.values(case.problem.n_r());
    let grid = ns_values
        .par_iter()
        .map(|&n_s| {
            nr_values
                .iter()
                .map(|&n_r| {
                    Ok(SurfaceRow {
                        n_s,
                        n_r,
                        ee: case.ee(n_s, n_r)?,
                        kind: "grid",
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<SurfaceRow> = grid.into_iter().flatten().collect();
    if let Some(best) = rows
        .iter()
        .fold(None::<&SurfaceRow>, |acc, r| match acc {
            Some(b) if !(r.ee > b.ee) => Some(b),
            _ => Some(r),
        })
        .cloned()
    {
        rows.push(SurfaceRow {
            kind: "grid_argmax",
            ..best
        });
    }
    match optimize(&case.problem) {
        Ok(opt) => rows.push(SurfaceRow {
            n_s: opt.n_s_opt,
            n_r: opt.n_r_opt,
            ee: case.ee(opt.n_s_opt, opt.n_r_opt)?,
            kind: "optimum",
        }),
        Err(e) => warn!("no optimum row: {e}"),
    }
    Ok(rows)
}

/// Optimal antenna counts for every `p_u` of the `ee` section.
pub fn run_optimize(cfg: &RunConfig) -> Result<OptimizeRun> {
    let ee = cfg.ee.as_ref().ok_or_else(|| missing("ee"))?;
    let profile = ee_profile(cfg, ee)?;
    let unit = cfg.unit();
    let scale = match unit {
        RateUnit::Bits => 1.0 / std::f64::consts::LN_2,
        RateUnit::Nats => 1.0,
    };
    let results = ee
        .p_u
        .iter()
        .map(|&p_u| {
            let case = EeCase::new(cfg, &profile, p_u)?;
            let opt = optimize(&case.problem)?;
            let mut report = OptimizerReport::new(&case.problem, &opt);
            report.ee *= scale;
            let oracle = if ee.oracle {
                let g = grid_scan_auto(&case.problem)?;
                Some([g.n_s_opt, g.n_r_opt])
            } else {
                None
            };
            Ok(OptimizeEntry { p_u, report, oracle })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OptimizeRun {
        config: cfg.clone(),
        unit,
        results,
    })
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Files written by [`execute`] and the text meant for standard output.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub stdout: Option<String>,
}

/// Runs `command` on a dedicated pool of `threads` workers (0 for the rayon
/// default) and writes its output and manifest under `out`.
pub fn execute(command: Command, cfg: &RunConfig, out: &Path, threads: usize) -> Result<RunOutput> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let (bytes, stdout) = pool.install(|| -> Result<(Vec<u8>, Option<String>)> {
        Ok(match command {
            Command::RateSweep => (csv_bytes(&run_rate_sweep(cfg)?)?, None),
            Command::EeSweep => (csv_bytes(&run_ee_sweep(cfg)?)?, None),
            Command::EeSurface => (csv_bytes(&run_ee_surface(cfg)?)?, None),
            Command::Optimize => {
                let mut text = serde_json::to_string_pretty(&run_optimize(cfg)?)?;
                text.push('\n');
                (text.clone().into_bytes(), Some(text))
            }
        })
    })?;
    fs::create_dir_all(out)?;
    let data = out.join(command.output_file());
    fs::write(&data, bytes)?;
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        command: command.name(),
        seed: cfg.seed,
        config: cfg,
    };
    let manifest_path = out.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(&manifest_path, text)?;
    Ok(RunOutput {
        files: vec![data, manifest_path],
        stdout,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_rate_config() -> RunConfig {
        let mut cfg = RunConfig::new("t");
        cfg.trials = 64;
        cfg.rate_sweep = Some(RateSweepConfig {
            snr_db: vec![10.0],
            links: vec![LinkSpec {
                l_s: 1.0,
                l_r: 1.0,
                n_s: AntennaSpec::default(),
                n_r: AntennaSpec::default(),
            }],
            methods: vec![MethodTag::Th, MethodTag::Mc],
        });
        cfg
    }

    #[test]
    fn minimal_rate_sweep_has_one_row_per_method() {
        let rows = run_rate_sweep(&small_rate_config()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!((rows[0].method, rows[1].method), ("th", "mc"));
        assert_eq!((rows[0].n_s, rows[0].n_r), (9, 9));
    }

    #[test]
    fn csv_header() {
        let rows = run_rate_sweep(&small_rate_config()).unwrap();
        let text = String::from_utf8(csv_bytes(&rows).unwrap()).unwrap();
        assert_eq!(text.lines().next().unwrap(), "snr_db,L_s,L_r,N_s,N_r,K,method,sum_rate");
    }

    #[test]
    fn missing_section_is_reported() {
        let cfg = RunConfig::new("t");
        assert!(matches!(run_ee_sweep(&cfg), Err(Error::InvalidParameter(_))));
        assert!(matches!(run_rate_sweep(&cfg), Err(Error::InvalidParameter(_))));
    }
}
