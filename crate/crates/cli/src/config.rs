use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use fgs_core::hamiltonian::check_boundary_sign;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Hopping,
    Tfi,
    RandomNn,
    RandomLongRange,
    #[value(name = "sectorized-2d")]
    Sectorized2d,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Boundary {
    Pbc,
    Obc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, ValueEnum)]
pub enum PartitionKind {
    #[default]
    Boundary,
    Bulk,
}

/// Flags shared by every subcommand. Anything left unset may come from
/// `--config`; flags win over the file.
#[derive(Args, Clone, Debug, Default)]
pub struct CommonArgs {
    /// Key-value file (`key = value` per line, `#` comments) with the same fields as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    /// Number of sites; for `sectorized-2d` the cylinder circumference Lx.
    #[arg(long)]
    pub n: Option<usize>,
    /// Cylinder length for `sectorized-2d` (defaults to Lx).
    #[arg(long)]
    pub ly: Option<usize>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Pre-quench angle for TFI quenches.
    #[arg(long)]
    pub theta0: Option<f64>,
    /// Fermionic boundary sign: -1 antiperiodic, +1 periodic, 0 open.
    #[arg(long)]
    pub gf: Option<i32>,
    /// Spin boundary sign; picks the fermionic sector holding the spin ground state.
    #[arg(long)]
    pub gi: Option<i32>,
    #[arg(long, value_enum)]
    pub bc: Option<Boundary>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Thermal energy target (instead of --beta).
    #[arg(long)]
    pub energy: Option<f64>,
    #[arg(long)]
    pub t_start: Option<f64>,
    #[arg(long)]
    pub t_stop: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Explicit comma-separated times; overrides the start/stop/dt grid.
    #[arg(long)]
    pub times: Option<String>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Decay length of the random translation-invariant initial state in hopping quenches.
    #[arg(long)]
    pub xi: Option<f64>,
    /// Subsystem length for contours and quench entropies.
    #[arg(long)]
    pub block: Option<usize>,
    /// First site of the subsystem.
    #[arg(long)]
    pub start: Option<usize>,
    #[arg(long, value_enum)]
    pub partitions: Option<PartitionKind>,
    /// TFI sweep over sizes, `from:to:step`.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Add the GGE value to TFI quench output.
    #[arg(long)]
    pub gge: bool,
    /// Fit the decay exponent of |occupation - GGE| on `from:to`.
    #[arg(long)]
    pub fit: Option<String>,
    /// Where to write the correlation matrix of ground/thermal states (JSON).
    #[arg(long)]
    pub state: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

const KEYS: &[&str] = &[
    "model", "n", "ly", "theta", "theta0", "gf", "gi", "bc", "beta", "energy", "t_start", "t_stop", "dt", "times", "m",
    "seed", "xi", "block", "start", "partitions", "sweep", "gge", "fit", "state", "output", "format",
];

fn parse_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Config(format!("{}:{}: expected `key = value`", path.display(), no + 1)));
        };
        let key = k.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("{}:{}: unknown key `{}`", path.display(), no + 1, k.trim())));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

fn fill<T: FromStr>(slot: &mut Option<T>, map: &BTreeMap<String, String>, key: &str) -> Result<(), CliError> {
    if slot.is_none()
        && let Some(v) = map.get(key)
    {
        *slot = Some(v.parse().map_err(|_| CliError::Config(format!("bad value `{v}` for `{key}`")))?);
    }
    Ok(())
}

fn fill_enum<T: ValueEnum>(slot: &mut Option<T>, map: &BTreeMap<String, String>, key: &str) -> Result<(), CliError> {
    if slot.is_none()
        && let Some(v) = map.get(key)
    {
        *slot = Some(T::from_str(v, true).map_err(|_| CliError::Config(format!("bad value `{v}` for `{key}`")))?);
    }
    Ok(())
}

fn parse_range(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    text.split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Config(format!("bad {what} `{text}`")))
}

/// Fully resolved experiment description.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub model: Option<Model>,
    pub n: Option<usize>,
    pub ly: Option<usize>,
    pub theta: f64,
    pub theta0: Option<f64>,
    pub g_f: i32,
    pub bc: Option<Boundary>,
    pub beta: Option<f64>,
    pub energy: Option<f64>,
    pub times: Vec<f64>,
    pub m: Option<usize>,
    pub seed: Option<u64>,
    pub xi: f64,
    pub block: Option<usize>,
    pub start: Option<usize>,
    pub partitions: PartitionKind,
    pub sweep: Option<(usize, usize, usize)>,
    pub gge: bool,
    pub fit: Option<(f64, f64)>,
    pub state: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl ExperimentConfig {
    pub fn resolve(mut a: CommonArgs) -> Result<Self, CliError> {
        if let Some(path) = a.config.clone() {
            let map = parse_file(&path)?;
            fill_enum(&mut a.model, &map, "model")?;
            fill(&mut a.n, &map, "n")?;
            fill(&mut a.ly, &map, "ly")?;
            fill(&mut a.theta, &map, "theta")?;
            fill(&mut a.theta0, &map, "theta0")?;
            fill(&mut a.gf, &map, "gf")?;
            fill(&mut a.gi, &map, "gi")?;
            fill_enum(&mut a.bc, &map, "bc")?;
            fill(&mut a.beta, &map, "beta")?;
            fill(&mut a.energy, &map, "energy")?;
            fill(&mut a.t_start, &map, "t_start")?;
            fill(&mut a.t_stop, &map, "t_stop")?;
            fill(&mut a.dt, &map, "dt")?;
            fill(&mut a.times, &map, "times")?;
            fill(&mut a.m, &map, "m")?;
            fill(&mut a.seed, &map, "seed")?;
            fill(&mut a.xi, &map, "xi")?;
            fill(&mut a.block, &map, "block")?;
            fill(&mut a.start, &map, "start")?;
            fill_enum(&mut a.partitions, &map, "partitions")?;
            fill(&mut a.sweep, &map, "sweep")?;
            fill(&mut a.fit, &map, "fit")?;
            fill(&mut a.state, &map, "state")?;
            fill(&mut a.output, &map, "output")?;
            fill_enum(&mut a.format, &map, "format")?;
            if !a.gge
                && let Some(v) = map.get("gge")
            {
                a.gge = v.parse().map_err(|_| CliError::Config(format!("bad value `{v}` for `gge`")))?;
            }
        }

        if let Some(g) = a.gf {
            check_boundary_sign(g, "g_F")?;
        }
        let g_f = match a.gi {
            Some(gi) => {
                check_boundary_sign(gi, "g_I")?;
                let sector = fgs_core::analytic::tfi_ground_sector(a.n.unwrap_or(2), gi)?;
                if let Some(g) = a.gf
                    && g != sector.g_f
                {
                    return Err(CliError::Config(format!("g_I = {gi} implies g_F = {}, but --gf {g} was given", sector.g_f)));
                }
                sector.g_f
            }
            None => a.gf.unwrap_or(-1),
        };
        let theta = a.theta.unwrap_or(std::f64::consts::FRAC_PI_4);
        for (name, v) in [("theta", Some(theta)), ("theta0", a.theta0)] {
            if let Some(v) = v
                && !(v > 0.0 && v < std::f64::consts::FRAC_PI_2)
            {
                return Err(CliError::Config(format!("{name} must lie in (0, pi/2), got {v}")));
            }
        }
        if matches!(a.model, Some(Model::RandomNn | Model::RandomLongRange)) && a.seed.is_none() {
            return Err(CliError::Config("random models need an explicit --seed".into()));
        }
        if let Some(n) = a.n
            && n == 0
        {
            return Err(CliError::Config("N must be positive".into()));
        }
        if a.beta.is_some() && a.energy.is_some() {
            return Err(CliError::Config("give either --beta or --energy, not both".into()));
        }

        let times = match &a.times {
            Some(list) => list
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| CliError::Config(format!("bad time list `{list}`")))?,
            None => {
                let t0 = a.t_start.unwrap_or(0.0);
                let t1 = a.t_stop.unwrap_or(t0);
                let dt = a.dt.unwrap_or(0.1);
                if !(dt > 0.0) || t1 < t0 {
                    return Err(CliError::Config("time grid needs dt > 0 and t_stop >= t_start".into()));
                }
                let steps = ((t1 - t0) / dt + 1e-9).floor() as usize;
                (0..=steps).map(|i| t0 + i as f64 * dt).collect()
            }
        };

        let sweep = match &a.sweep {
            None => None,
            Some(s) => {
                let v = parse_range(s, "sweep")?;
                let ok = v.len() == 3 && v.iter().all(|x| x.fract() == 0.0 && *x >= 1.0) && v[0] <= v[1];
                if !ok {
                    return Err(CliError::Config(format!("sweep must be `from:to:step` with positive integers, got `{s}`")));
                }
                Some((v[0] as usize, v[1] as usize, v[2] as usize))
            }
        };
        let fit = match &a.fit {
            None => None,
            Some(s) => {
                let v = parse_range(s, "fit window")?;
                if v.len() != 2 || !(v[0] > 0.0 && v[0] < v[1]) {
                    return Err(CliError::Config(format!("fit window must be `from:to` with 0 < from < to, got `{s}`")));
                }
                Some((v[0], v[1]))
            }
        };

        Ok(Self {
            model: a.model,
            n: a.n,
            ly: a.ly,
            theta,
            theta0: a.theta0,
            g_f,
            bc: a.bc,
            beta: a.beta,
            energy: a.energy,
            times,
            m: a.m,
            seed: a.seed,
            xi: a.xi.unwrap_or(2.0),
            block: a.block,
            start: a.start,
            partitions: a.partitions.unwrap_or_default(),
            sweep,
            gge: a.gge,
            fit,
            state: a.state,
            output: a.output,
            format: a.format.unwrap_or_default(),
        })
    }

    pub fn model(&self) -> Result<Model, CliError> {
        self.model.ok_or_else(|| CliError::Config("--model is required".into()))
    }

    pub fn n(&self) -> Result<usize, CliError> {
        self.n.ok_or_else(|| CliError::Config("--n is required".into()))
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.seed.ok_or_else(|| CliError::Config("random models need an explicit --seed".into()))
    }

    pub fn m(&self) -> Result<usize, CliError> {
        match self.m {
            Some(0) | None => Err(CliError::Config("--m must be a positive integer".into())),
            Some(m) => Ok(m),
        }
    }
}
