//! Flat `key = value` experiment configuration.

use std::path::{Path, PathBuf};

use hbs_core::kernels::{KernelFamily, KernelSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Compress,
    Solve,
    Encode,
    Exp3d,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Compress => "compress",
            Experiment::Solve => "solve",
            Experiment::Encode => "encode",
            Experiment::Exp3d => "exp3d",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Geometry {
    /// Composite Gauss–Legendre panels on the starfish.
    Starfish { nodes_per_panel: usize },
    /// Points equispaced in arclength on the starfish.
    StarfishEquispaced,
    Sphere { radius: f64 },
    /// x_i = (i + ½ + jitter·u_i)/N on [0, 1], weights 1/N.
    Line { jitter: f64 },
    /// Points read from a file, weights 1/N.
    File(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rhs {
    /// Field of a point source outside the geometry.
    Source,
    /// Seeded uniform random entries in [−1, 1] + i[−1, 1].
    Random,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub name: String,
    pub family: KernelFamily,
    pub kappa: f64,
    /// Exponents for the power-law kernel; one row per (N, p).
    pub p_list: Vec<f64>,
    pub geometry: Geometry,
    pub arms: f64,
    pub amplitude: f64,
    pub n_list: Vec<usize>,
    pub leaf_size: usize,
    pub tol: f64,
    pub f: f64,
    pub t_list: Vec<f64>,
    /// Tikhonov parameter; when set, solves use the regularized system.
    pub alpha: Option<f64>,
    pub proxy: bool,
    pub proxy_points: Option<usize>,
    /// Also compress without proxy and write a second table.
    pub compare_proxy: bool,
    pub eps: f64,
    pub rhs: Rhs,
    pub seed: u64,
    pub timing: bool,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let base = Self {
            experiment,
            name: experiment.name().to_string(),
            family: KernelFamily::Log2d,
            kappa: 0.0,
            p_list: vec![1.0],
            geometry: Geometry::StarfishEquispaced,
            arms: 5.0,
            amplitude: 0.3,
            n_list: vec![1024],
            leaf_size: 32,
            tol: 1e-6,
            f: 2.0,
            t_list: vec![1.0],
            alpha: None,
            proxy: true,
            proxy_points: None,
            compare_proxy: false,
            eps: 0.0,
            rhs: Rhs::Source,
            seed: 42,
            timing: true,
            out: None,
        };
        match experiment {
            Experiment::Compress => base,
            Experiment::Solve => Self {
                family: KernelFamily::Hankel2d,
                kappa: 40.0,
                geometry: Geometry::Starfish { nodes_per_panel: 16 },
                n_list: vec![2048],
                tol: 1e-10,
                t_list: vec![1.0, 0.5, 0.25],
                ..base
            },
            Experiment::Encode => Self {
                family: KernelFamily::PowerLaw,
                p_list: vec![1.0, 6.0],
                geometry: Geometry::Line { jitter: 0.0 },
                n_list: vec![128, 256, 512, 1024],
                leaf_size: 16,
                ..base
            },
            Experiment::Exp3d => Self {
                family: KernelFamily::Helmholtz3d,
                kappa: 1.0,
                geometry: Geometry::Sphere { radius: 1.0 },
                n_list: vec![1024, 2048, 4096, 8192],
                leaf_size: 64,
                tol: 1e-3,
                ..base
            },
        }
    }

    /// Kernel specs to run, one per exponent for the power-law family.
    pub fn kernels(&self) -> Vec<KernelSpec> {
        match self.family {
            KernelFamily::PowerLaw => self.p_list.iter().map(|&p| KernelSpec::powerlaw(p)).collect(),
            fam => vec![KernelSpec { family: fam, kappa: self.kappa, p: 1.0 }],
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.n_list.is_empty() {
            return Err("N list is empty".into());
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) || self.n_list[0] == 0 {
            return Err("N list must be positive and strictly ascending".into());
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err("tol must be positive".into());
        }
        if !(self.f >= 1.0) || !self.f.is_finite() {
            return Err("f must be at least 1".into());
        }
        if self.leaf_size == 0 {
            return Err("leaf_size must be positive".into());
        }
        if self.t_list.is_empty() || self.t_list.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
            return Err("every t must lie in (0, 1]".into());
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0) || !a.is_finite() {
                return Err("alpha must be positive".into());
            }
        }
        if !(self.eps >= 0.0) || !self.eps.is_finite() {
            return Err("eps must be non-negative".into());
        }
        if self.p_list.is_empty() || self.p_list.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
            return Err("every p must be positive".into());
        }
        for spec in self.kernels() {
            spec.validate().map_err(|e| e.to_string())?;
        }
        match &self.geometry {
            Geometry::File(path) if !path.is_file() => {
                return Err(format!("points file {} does not exist", path.display()));
            }
            Geometry::Sphere { radius } if !(*radius > 0.0) => return Err("radius must be positive".into()),
            Geometry::Line { jitter } if !(0.0..1.0).contains(jitter) => {
                return Err("jitter must lie in [0, 1)".into());
            }
            Geometry::Starfish { nodes_per_panel } if *nodes_per_panel == 0 => {
                return Err("nodes_per_panel must be positive".into());
            }
            Geometry::Starfish { nodes_per_panel } if self.n_list.iter().any(|n| n % nodes_per_panel != 0) => {
                return Err(format!("every N must be a multiple of nodes_per_panel = {nodes_per_panel}"));
            }
            _ => {}
        }
        let dim = match self.geometry {
            Geometry::Sphere { .. } => Some(3),
            Geometry::Line { .. } => Some(1),
            Geometry::File(_) => None,
            _ => Some(2),
        };
        if self.experiment == Experiment::Exp3d && dim != Some(3) {
            return Err("exp3d needs sphere geometry".into());
        }
        if self.experiment == Experiment::Exp3d && self.n_list.last().is_some_and(|&n| n > 16384) {
            return Err("exp3d supports N ≤ 16384".into());
        }
        Ok(())
    }
}

fn parse_list<T: std::str::FromStr>(v: &str) -> Option<Vec<T>> {
    v.split([',', ' '])
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().ok())
        .collect()
}

fn parse_switch(v: &str) -> Option<bool> {
    match v {
        "on" | "true" | "yes" | "1" => Some(true),
        "off" | "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

/// Parses config text on top of the subcommand defaults. Relative file
/// paths resolve against `base`.
pub fn parse_config(text: &str, experiment: Experiment, base: &Path) -> Result<ExperimentConfig, String> {
    let mut c = ExperimentConfig::defaults(experiment);
    let mut geometry: Option<String> = None;
    let mut points: Option<PathBuf> = None;
    let mut npp = 16usize;
    let mut radius = 1.0f64;
    let mut jitter = 0.0f64;
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value", no + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = || format!("line {}: bad value {value:?} for {key}", no + 1);
        macro_rules! num {
            () => {
                value.parse().map_err(|_| bad())?
            };
        }
        match key {
            "experiment" | "name" => c.name = value.to_string(),
            "kernel" => c.family = KernelFamily::parse(value).ok_or_else(bad)?,
            "kappa" => c.kappa = num!(),
            "p" => c.p_list = parse_list(value).ok_or_else(bad)?,
            "geometry" => geometry = Some(value.to_string()),
            "points" => points = Some(base.join(value)),
            "nodes_per_panel" => npp = num!(),
            "radius" => radius = num!(),
            "jitter" => jitter = num!(),
            "arms" => c.arms = num!(),
            "amplitude" => c.amplitude = num!(),
            "N" | "n" => c.n_list = parse_list(value).ok_or_else(bad)?,
            "leaf_size" => c.leaf_size = num!(),
            "tol" => c.tol = num!(),
            "f" => c.f = num!(),
            "t" => c.t_list = parse_list(value).ok_or_else(bad)?,
            "alpha" => c.alpha = Some(num!()),
            "proxy" => c.proxy = parse_switch(value).ok_or_else(bad)?,
            "proxy_points" => c.proxy_points = Some(num!()),
            "compare_proxy" => c.compare_proxy = parse_switch(value).ok_or_else(bad)?,
            "eps" => c.eps = num!(),
            "rhs" => {
                c.rhs = match value {
                    "source" => Rhs::Source,
                    "random" => Rhs::Random,
                    _ => return Err(bad()),
                }
            }
            "seed" => c.seed = num!(),
            "timing" => c.timing = parse_switch(value).ok_or_else(bad)?,
            "out" => c.out = Some(base.join(value)),
            _ => return Err(format!("line {}: unknown key {key:?}", no + 1)),
        }
    }
    let current = c.geometry.clone();
    c.geometry = match geometry.as_deref() {
        None => match current {
            Geometry::Starfish { .. } => Geometry::Starfish { nodes_per_panel: npp },
            Geometry::Sphere { .. } => Geometry::Sphere { radius },
            Geometry::Line { .. } => Geometry::Line { jitter },
            g => g,
        },
        Some("starfish") => Geometry::Starfish { nodes_per_panel: npp },
        Some("starfish_equispaced") => Geometry::StarfishEquispaced,
        Some("sphere") => Geometry::Sphere { radius },
        Some("line") => Geometry::Line { jitter },
        Some("file") => Geometry::File(points.clone().ok_or("geometry = file needs points = <path>")?),
        Some(other) => return Err(format!("unknown geometry {other:?}")),
    };
    if points.is_some() && !matches!(c.geometry, Geometry::File(_)) {
        return Err("points given but geometry is not file".into());
    }
    c.validate()?;
    Ok(c)
}
