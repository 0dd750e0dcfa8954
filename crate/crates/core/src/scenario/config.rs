use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use crate::geodesics::NoiseLaw;
use crate::{Error, PhysicalParams, Result};

/// Named scenario selecting which runner `run` dispatches to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    FreePacket,
    PlaneWave,
    Sho,
    DoubleSlit,
    BornEmergence,
    MeasurementRepeat,
    FractalScan,
    VerifyAll,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 8] = [
        ScenarioKind::FreePacket,
        ScenarioKind::PlaneWave,
        ScenarioKind::Sho,
        ScenarioKind::DoubleSlit,
        ScenarioKind::BornEmergence,
        ScenarioKind::MeasurementRepeat,
        ScenarioKind::FractalScan,
        ScenarioKind::VerifyAll,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::FreePacket => "free-packet",
            ScenarioKind::PlaneWave => "plane-wave",
            ScenarioKind::Sho => "sho",
            ScenarioKind::DoubleSlit => "double-slit",
            ScenarioKind::BornEmergence => "born-emergence",
            ScenarioKind::MeasurementRepeat => "measurement-repeat",
            ScenarioKind::FractalScan => "fractal-scan",
            ScenarioKind::VerifyAll => "verify-all",
        }
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario '{s}'")))
    }
}

/// Full run configuration, parsed from a flat key=value file plus overrides.
/// Every field has a scenario-appropriate default except `scenario` and
/// `seed`, which must be given.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub params: PhysicalParams,
    pub grid_n: [usize; 2],
    pub lower: [f64; 2],
    pub upper: [f64; 2],
    pub dt: f64,
    pub t_total: f64,
    /// Solver steps between recorded snapshots.
    pub cadence: usize,
    pub walkers: usize,
    pub noise: NoiseLaw,
    /// Drift refresh cadence for walker runs, in solver steps.
    pub refresh_every: usize,
    /// L1 level above which a walker run is flagged under-sampled.
    pub l1_threshold: f64,
    /// Optional density smoothing bandwidth, in length units.
    pub smoothing: Option<f64>,
    pub omega: f64,
    pub x0: f64,
    pub sigma: f64,
    pub k0: f64,
    /// Base time resolution for fractal path generation.
    pub delta: f64,
    /// Number of paths in a fractal scan.
    pub paths: usize,
    // double-slit geometry
    pub slit_separation: f64,
    pub slit_width: f64,
    pub wall_width: f64,
    pub barrier_height: f64,
    pub screen_y: f64,
}

/// Parses flat `key = value` lines into a map; `#` starts a comment.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value '{value}' for key '{key}'")))
}

impl ScenarioConfig {
    /// Scenario defaults: desk-scale grids and step sizes, 1e5 walkers.
    pub fn defaults(scenario: ScenarioKind, seed: u64) -> Self {
        let mut cfg = Self {
            scenario,
            seed,
            out_dir: PathBuf::from("out"),
            params: PhysicalParams::desk(),
            grid_n: [512, 1],
            lower: [-10.0, 0.0],
            upper: [10.0, 1.0],
            dt: 1e-3,
            t_total: 10.0,
            cadence: 100,
            walkers: 100_000,
            noise: NoiseLaw::Gaussian,
            refresh_every: 10,
            l1_threshold: 0.08,
            smoothing: None,
            omega: 1.0,
            x0: 0.0,
            sigma: 1.0,
            k0: 1.0,
            delta: 1e-5,
            paths: 100,
            slit_separation: 1.5,
            slit_width: 0.4,
            wall_width: 0.4,
            barrier_height: 600.0,
            screen_y: 4.5,
        };
        match scenario {
            ScenarioKind::FreePacket => {
                cfg.lower = [-20.0, 0.0];
                cfg.upper = [20.0, 1.0];
                cfg.t_total = 2.0;
                cfg.cadence = 10;
            }
            ScenarioKind::PlaneWave => {
                cfg.lower = [-8.0 * std::f64::consts::PI, 0.0];
                cfg.upper = [8.0 * std::f64::consts::PI, 1.0];
                cfg.t_total = 1.0;
                cfg.cadence = 10;
            }
            ScenarioKind::DoubleSlit => {
                cfg.grid_n = [320, 320];
                cfg.lower = [-8.0, -6.0];
                cfg.upper = [8.0, 6.0];
                cfg.dt = 2.5e-4;
                // snapshot once the pattern has propagated one screen
                // distance past the barrier; the fringe comb of a moving
                // packet is set by that distance, not by the row it is
                // read from
                cfg.t_total = 0.82;
                cfg.cadence = 400;
                cfg.k0 = 10.0;
                cfg.x0 = -3.0;
                cfg.sigma = 1.5;
            }
            ScenarioKind::FractalScan => {
                cfg.t_total = 1.0;
            }
            ScenarioKind::VerifyAll | ScenarioKind::Sho => {
                cfg.t_total = 2.0;
                cfg.cadence = 20;
            }
            ScenarioKind::BornEmergence | ScenarioKind::MeasurementRepeat => {
                cfg.t_total = 10.0;
            }
        }
        cfg
    }

    /// Parses `key = value` lines; `#` starts a comment. `scenario` and
    /// `seed` are mandatory, every other key falls back to the scenario
    /// default. Unknown keys are configuration errors.
    pub fn parse_str(text: &str) -> Result<Self> {
        Self::from_map(&parse_kv(text)?)
    }

    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let scenario: ScenarioKind = map
            .get("scenario")
            .ok_or_else(|| Error::Config("missing mandatory key 'scenario'".into()))?
            .parse()?;
        let seed: u64 = parse_num(
            "seed",
            map.get("seed")
                .ok_or_else(|| Error::Config("missing mandatory key 'seed'".into()))?,
        )?;
        let mut cfg = Self::defaults(scenario, seed);
        for (key, value) in map {
            cfg.apply(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one key=value override.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "scenario" => self.scenario = value.parse()?,
            "seed" => self.seed = parse_num(key, value)?,
            "out" => self.out_dir = PathBuf::from(value),
            "m" => self.params.m = parse_num(key, value)?,
            "d" => self.params.d = parse_num(key, value)?,
            "c" => self.params.c = parse_num(key, value)?,
            "nx" => self.grid_n[0] = parse_num(key, value)?,
            "ny" => self.grid_n[1] = parse_num(key, value)?,
            "lower_x" => self.lower[0] = parse_num(key, value)?,
            "lower_y" => self.lower[1] = parse_num(key, value)?,
            "upper_x" => self.upper[0] = parse_num(key, value)?,
            "upper_y" => self.upper[1] = parse_num(key, value)?,
            "dt" => self.dt = parse_num(key, value)?,
            "t_total" => self.t_total = parse_num(key, value)?,
            "cadence" => self.cadence = parse_num(key, value)?,
            "walkers" => self.walkers = parse_num(key, value)?,
            "noise" => self.noise = value.parse()?,
            "refresh_every" => self.refresh_every = parse_num(key, value)?,
            "l1_threshold" => self.l1_threshold = parse_num(key, value)?,
            "smoothing" => self.smoothing = Some(parse_num(key, value)?),
            "omega" => self.omega = parse_num(key, value)?,
            "x0" => self.x0 = parse_num(key, value)?,
            "sigma" => self.sigma = parse_num(key, value)?,
            "k0" => self.k0 = parse_num(key, value)?,
            "delta" => self.delta = parse_num(key, value)?,
            "paths" => self.paths = parse_num(key, value)?,
            "slit_separation" => self.slit_separation = parse_num(key, value)?,
            "slit_width" => self.slit_width = parse_num(key, value)?,
            "wall_width" => self.wall_width = parse_num(key, value)?,
            "barrier_height" => self.barrier_height = parse_num(key, value)?,
            "screen_y" => self.screen_y = parse_num(key, value)?,
            _ => return Err(Error::Config(format!("unknown configuration key '{key}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !(self.t_total > 0.0) {
            return Err(Error::Config("dt and t_total must be positive".into()));
        }
        if self.cadence == 0 {
            return Err(Error::Config("cadence must be at least 1".into()));
        }
        if self.grid_n[0] < 8 {
            return Err(Error::Config("nx must be at least 8".into()));
        }
        if !(self.params.m > 0.0) || !(self.params.d > 0.0) {
            return Err(Error::Config("m and d must be positive".into()));
        }
        if self.scenario == ScenarioKind::DoubleSlit {
            let half = self.slit_separation / 2.0 + self.slit_width;
            if half >= self.upper[0] || -half <= self.lower[0] {
                return Err(Error::Config("slit geometry outside the grid".into()));
            }
            if self.screen_y >= self.upper[1] {
                return Err(Error::Config("screen_y outside the grid".into()));
            }
            if self.grid_n[1] < 8 {
                return Err(Error::Config("double-slit needs a 2-D grid".into()));
            }
        }
        Ok(())
    }

    /// Effective configuration as a flat map, echoed into the manifest.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut map = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            map.insert(k.to_string(), v);
        };
        put("scenario", self.scenario.name().into());
        put("seed", self.seed.to_string());
        put("out", self.out_dir.display().to_string());
        put("m", self.params.m.to_string());
        put("d", self.params.d.to_string());
        put("c", self.params.c.to_string());
        put("nx", self.grid_n[0].to_string());
        put("ny", self.grid_n[1].to_string());
        put("lower_x", self.lower[0].to_string());
        put("lower_y", self.lower[1].to_string());
        put("upper_x", self.upper[0].to_string());
        put("upper_y", self.upper[1].to_string());
        put("dt", self.dt.to_string());
        put("t_total", self.t_total.to_string());
        put("cadence", self.cadence.to_string());
        put("walkers", self.walkers.to_string());
        put("noise", self.noise.name().into());
        put("refresh_every", self.refresh_every.to_string());
        put("l1_threshold", self.l1_threshold.to_string());
        if let Some(s) = self.smoothing {
            put("smoothing", s.to_string());
        }
        put("omega", self.omega.to_string());
        put("x0", self.x0.to_string());
        put("sigma", self.sigma.to_string());
        put("k0", self.k0.to_string());
        put("delta", self.delta.to_string());
        put("paths", self.paths.to_string());
        put("slit_separation", self.slit_separation.to_string());
        put("slit_width", self.slit_width.to_string());
        put("wall_width", self.wall_width.to_string());
        put("barrier_height", self.barrier_height.to_string());
        put("screen_y", self.screen_y.to_string());
        map
    }

    pub fn steps(&self) -> usize {
        (self.t_total / self.dt).round() as usize
    }
}
