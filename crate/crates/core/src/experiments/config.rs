use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{
    default_user_distances, isotropic_variances, uniform_variances, VarianceProfile,
};
use crate::energy::PowerModel;
use crate::error::{Error, Result};
use crate::geometry::{build_lattice, SurfaceGeometry, WavenumberLattice};

/// A run configuration. Every field except `scenario` has a default, and the
/// hardware constants default to the reference values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: String,
    #[serde(default = "defaults::users")]
    pub users: usize,
    #[serde(default = "defaults::sigma2_w")]
    pub sigma2_w: f64,
    #[serde(default)]
    pub hardware: Hardware,
    #[serde(default)]
    pub profile: ProfileSource,
    #[serde(default = "defaults::trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    /// User surface distances in wavelengths; `10 (k+1)` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub user_distances: Option<Vec<f64>>,
    /// Report rates and energy efficiency in nats instead of bits.
    #[serde(default)]
    pub nats: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_sweep: Option<RateSweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ee: Option<EeConfig>,
    /// Directory that relative paths in the config resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

mod defaults {
    pub fn users() -> usize {
        3
    }
    pub fn sigma2_w() -> f64 {
        1.0
    }
    pub fn trials() -> u64 {
        1000
    }
    pub fn step() -> u64 {
        1
    }
    pub fn p_u() -> Vec<f64> {
        vec![0.001, 0.01, 1.0]
    }
}

/// Per-antenna and static hardware constants (all in W except `l_d`, `q`, `zeta`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hardware {
    pub p_d: f64,
    pub l_d: f64,
    pub p_v: f64,
    pub q: f64,
    pub p_f: f64,
    pub zeta: f64,
}

impl Default for Hardware {
    fn default() -> Self {
        let m = PowerModel::reference(0.0, 1).expect("reference constants are valid");
        Self {
            p_d: m.p_d,
            l_d: m.l_d,
            p_v: m.p_v,
            q: m.q,
            p_f: m.p_f,
            zeta: m.zeta,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileSource {
    #[default]
    Isotropic,
    Uniform,
    /// A profile CSV; the path is relative to the config file.
    Csv(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateSweepConfig {
    pub snr_db: Vec<f64>,
    pub links: Vec<LinkSpec>,
    #[serde(default = "all_methods")]
    pub methods: Vec<MethodTag>,
}

fn all_methods() -> Vec<MethodTag> {
    vec![MethodTag::Th, MethodTag::Mc]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodTag {
    Th,
    Mc,
}

/// One BS/user surface pair of a rate sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec {
    pub l_s: f64,
    pub l_r: f64,
    #[serde(default)]
    pub n_s: AntennaSpec,
    #[serde(default)]
    pub n_r: AntennaSpec,
}

/// Antenna layout: `"nyquist"` for the smallest alias-free grid, a count laid
/// out on the squarest grid, or an explicit `[n_h, n_v]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AntennaSpec {
    Count(usize),
    Grid(usize, usize),
    Keyword(Keyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Keyword {
    Nyquist,
}

impl Default for AntennaSpec {
    fn default() -> Self {
        AntennaSpec::Keyword(Keyword::Nyquist)
    }
}

impl AntennaSpec {
    pub fn geometry(&self, len: f64, z_offset: f64) -> Result<SurfaceGeometry> {
        match *self {
            AntennaSpec::Keyword(Keyword::Nyquist) => SurfaceGeometry::alias_free(len, len, z_offset),
            AntennaSpec::Count(n) => SurfaceGeometry::with_count(len, len, n, z_offset),
            AntennaSpec::Grid(h, v) => SurfaceGeometry::new(len, len, h, v, z_offset),
        }
    }
}

/// Energy-efficiency section shared by `ee-sweep`, `ee-surface` and `optimize`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EeConfig {
    pub l_s: f64,
    pub l_r: f64,
    #[serde(default = "defaults::p_u")]
    pub p_u: Vec<f64>,
    #[serde(default = "default_axis")]
    pub n_s: Axis,
    #[serde(default = "default_axis")]
    pub n_r: Axis,
    /// Also run the exhaustive integer scan in `optimize`.
    #[serde(default)]
    pub oracle: bool,
}

fn default_axis() -> Axis {
    Axis::Optimal
}

/// How an antenna-count axis is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// The optimizer's value for each `p_u`.
    Optimal,
    Fixed(u64),
    Sweep(Range),
}

/// Inclusive integer range; `start` defaults to the DoF bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<u64>,
    pub stop: u64,
    #[serde(default = "defaults::step")]
    pub step: u64,
}

impl Range {
    pub fn values(&self, bound: u64) -> Vec<u64> {
        let start = self.start.unwrap_or(bound);
        (start..=self.stop).step_by(self.step.max(1) as usize).collect()
    }
}

impl RunConfig {
    /// A config with all defaults and no sweep sections.
    pub fn new(scenario: impl Into<String>) -> Self {
        Self {
            scenario: scenario.into(),
            users: defaults::users(),
            sigma2_w: defaults::sigma2_w(),
            hardware: Hardware::default(),
            profile: ProfileSource::default(),
            trials: defaults::trials(),
            seed: 0,
            user_distances: None,
            nats: false,
            out: None,
            rate_sweep: None,
            ee: None,
            base_dir: PathBuf::new(),
        }
    }

    /// Parses a config, or the `config` member of a run manifest.
    pub fn from_json_str(text: &str, path: &Path) -> Result<Self> {
        let err = |message: String| Error::Config {
            path: path.to_path_buf(),
            message,
        };
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| err(e.to_string()))?;
        let is_manifest = value.get("command").is_some() && value.get("config").is_some();
        let mut cfg: RunConfig = if is_manifest {
            serde_json::from_value(value["config"].clone()).map_err(|e| err(format!("config: {e}")))?
        } else {
            // reparse from text so errors carry line and column
            serde_json::from_str(text).map_err(|e| err(e.to_string()))?
        };
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.validate().map_err(|e| match e {
            Error::Config { .. } => e,
            other => err(other.to_string()),
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::from_json_str(&text, path)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.users == 0 {
            return bad("users must be at least 1".into());
        }
        if !(self.sigma2_w > 0.0 && self.sigma2_w.is_finite()) {
            return bad(format!("sigma2_w must be positive, got {}", self.sigma2_w));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if let Some(d) = &self.user_distances {
            if d.len() != self.users {
                return bad(format!("{} user distances for {} users", d.len(), self.users));
            }
        }
        self.power_model(0.0)?;
        if let Some(rs) = &self.rate_sweep {
            if rs.snr_db.is_empty() || rs.links.is_empty() || rs.methods.is_empty() {
                return bad("rate_sweep needs at least one SNR, link and method".into());
            }
            for l in &rs.links {
                l.n_s.geometry(l.l_s, 0.0)?;
                l.n_r.geometry(l.l_r, 0.0)?;
            }
        }
        if let Some(ee) = &self.ee {
            if ee.p_u.is_empty() || ee.p_u.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
                return bad("ee.p_u must be a nonempty list of positive powers".into());
            }
            build_lattice(ee.l_s, ee.l_s)?;
            build_lattice(ee.l_r, ee.l_r)?;
            for (name, axis) in [("n_s", &ee.n_s), ("n_r", &ee.n_r)] {
                match axis {
                    Axis::Fixed(0) => return bad(format!("ee.{name}: fixed count must be positive")),
                    Axis::Sweep(r) => {
                        if r.step == 0 || r.start == Some(0) || r.start.is_some_and(|s| s > r.stop) {
                            return bad(format!("ee.{name}: sweep must be nonempty and increasing"));
                        }
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    pub fn unit(&self) -> crate::RateUnit {
        if self.nats {
            crate::RateUnit::Nats
        } else {
            crate::RateUnit::Bits
        }
    }

    pub fn user_distances(&self) -> Vec<f64> {
        self.user_distances
            .clone()
            .unwrap_or_else(|| default_user_distances(self.users))
    }

    pub fn power_model(&self, p_u: f64) -> Result<PowerModel> {
        let h = &self.hardware;
        let m = PowerModel {
            p_d: h.p_d,
            l_d: h.l_d,
            p_v: h.p_v,
            q: h.q,
            p_f: h.p_f,
            zeta: h.zeta,
            p_u,
            users: self.users,
        };
        m.validate()?;
        Ok(m)
    }

    /// The variance profile for the given lattices.
    pub fn profile(&self, lat_s: &WavenumberLattice, lat_r: &WavenumberLattice) -> Result<VarianceProfile> {
        match &self.profile {
            ProfileSource::Isotropic => isotropic_variances(lat_s, lat_r, self.users),
            ProfileSource::Uniform => uniform_variances(lat_s.len(), lat_r.len(), self.users),
            ProfileSource::Csv(rel) => {
                let path = self.base_dir.join(rel);
                let file = fs::File::open(&path).map_err(|e| Error::Config {
                    path: path.clone(),
                    message: e.to_string(),
                })?;
                let p = VarianceProfile::read_csv(file)?;
                if p.n_s() != lat_s.len() || p.n_r() != lat_r.len() || p.users() != self.users {
                    return Err(Error::DimensionMismatch(format!(
                        "profile {} is {}x{} for {} users, geometry needs {}x{} for {}",
                        path.display(),
                        p.n_s(),
                        p.n_r(),
                        p.users(),
                        lat_s.len(),
                        lat_r.len(),
                        self.users
                    )));
                }
                Ok(p)
            }
        }
    }
}
