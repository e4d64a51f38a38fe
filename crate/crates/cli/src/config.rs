//! Run files: strict TOML with a `[model]` table plus optional
//! `[detector]` and `[pairing]` tables.
//!
//! ```toml
//! sizes = [200, 500]
//! lambda_f = 0.7                 # per-model default when omitted
//! target_e_grid = [-0.9, -0.5, 0.0, 0.5]   # or lambda_i / lambda_i_grid
//! branch = 1
//! epsilon_scale = 1.0
//!
//! [model]
//! kind = "lmg"                   # bh | lmg | dicke
//!
//! [detector]
//! kind = "density_peak"          # doublet_splitting | density_peak | min_gap
//!
//! [pairing]
//! rule = "semiclassical"         # semiclassical | splitting | none
//! ```

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use ntqpt::scaling::{PairingPolicy, SweepGrid, SweepSpec};
use ntqpt::spectral::{Detector, DetectorParams};
use ntqpt::{ModelKind, ModelSpec};

use crate::presets;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Spectrum,
    Quench,
    Sweep,
    Exponents,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Quench => "quench",
            Command::Sweep => "sweep",
            Command::Exponents => "exponents",
            Command::Validate => "validate",
        }
    }

    /// Label of the result this command reproduces, written to manifests.
    pub fn anchor(self) -> &'static str {
        match self {
            Command::Spectrum => "fig3",
            Command::Quench | Command::Sweep => "fig2",
            Command::Exponents => "table1",
            Command::Validate => "oracle",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelBlock {
    kind: ModelKind,
    j_hop: Option<f64>,
    omega: Option<f64>,
    omega0: Option<f64>,
    n_max: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DetectorBlock {
    kind: Option<Detector>,
    threshold_fraction: Option<f64>,
    window: Option<usize>,
    bandwidth_spacings: Option<f64>,
    grid_per_bandwidth: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    command: Option<Command>,
    sizes: Option<Vec<usize>>,
    lambda_f: Option<f64>,
    lambda_i: Option<f64>,
    lambda_i_grid: Option<Vec<f64>>,
    target_e_grid: Option<Vec<f64>>,
    lambda_i_range: Option<[f64; 2]>,
    branch: Option<i8>,
    epsilon_scale: Option<f64>,
    output: Option<PathBuf>,
    workers: Option<usize>,
    cache: Option<PathBuf>,
    model: ModelBlock,
    detector: Option<DetectorBlock>,
    pairing: Option<PairingPolicy>,
}

/// Fully validated run description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub model: ModelKind,
    pub template: ModelSpec,
    pub sizes: Vec<usize>,
    pub lambda_f: f64,
    pub grid: Option<SweepGrid>,
    pub lambda_i_range: Option<(f64, f64)>,
    pub branch: i8,
    pub epsilon_scale: f64,
    pub detector: Detector,
    pub detector_params: DetectorParams,
    pub pairing: PairingPolicy,
    #[serde(skip)]
    pub output: PathBuf,
    #[serde(skip)]
    pub workers: Option<usize>,
    #[serde(skip)]
    pub cache: Option<PathBuf>,
}

impl RunConfig {
    pub fn sweep_spec(&self) -> SweepSpec {
        SweepSpec {
            template: self.template,
            sizes: self.sizes.clone(),
            lambda_f: self.lambda_f,
            grid: self.grid.clone().unwrap_or(SweepGrid::TargetE(Vec::new())),
            epsilon_scale: self.epsilon_scale,
            detector: self.detector,
            detector_params: self.detector_params,
            branch: self.branch,
            pairing: self.pairing,
            lambda_i_range: self.lambda_i_range,
        }
    }
}

const DEFAULT_VALIDATE_SIZES: [usize; 6] = [1, 2, 3, 4, 5, 6];

/// Parses and validates a run file for `command`.
pub fn parse_config(text: &str, command: Command) -> Result<RunConfig> {
    let file: FileConfig = toml::from_str(text).context("invalid run configuration")?;
    if let Some(c) = file.command {
        if c != command {
            bail!("configuration is for `{}` but `{}` was requested", c.name(), command.name());
        }
    }
    let kind = file.model.kind;
    if kind != ModelKind::Bh && file.model.j_hop.is_some() {
        bail!("`j_hop` only applies to the bh model");
    }
    if kind != ModelKind::Dicke && (file.model.omega.is_some() || file.model.omega0.is_some() || file.model.n_max.is_some()) {
        bail!("`omega`, `omega0` and `n_max` only apply to the dicke model");
    }
    let lambda_f = file.lambda_f.unwrap_or_else(|| kind.default_lambda_f());
    let template = ModelSpec {
        model: kind,
        n: 1,
        lambda: lambda_f,
        j_hop: file.model.j_hop.unwrap_or(1.0),
        omega: file.model.omega.unwrap_or(1.0),
        omega0: file.model.omega0.unwrap_or(1.0),
        n_max: file.model.n_max,
    };

    let given = [file.lambda_i.is_some(), file.lambda_i_grid.is_some(), file.target_e_grid.is_some()]
        .iter()
        .filter(|x| **x)
        .count();
    let grid = match command {
        Command::Quench | Command::Sweep => {
            if given != 1 {
                bail!("exactly one of `lambda_i`, `lambda_i_grid`, `target_e_grid` is required for `{}`", command.name());
            }
            Some(match (file.lambda_i, file.lambda_i_grid, file.target_e_grid) {
                (Some(l), _, _) => SweepGrid::LambdaI(vec![l]),
                (_, Some(g), _) => SweepGrid::LambdaI(g),
                (_, _, Some(g)) => SweepGrid::TargetE(g),
                _ => unreachable!(),
            })
        }
        _ => {
            if given != 0 {
                bail!("`{}` takes no `lambda_i`, `lambda_i_grid` or `target_e_grid`", command.name());
            }
            None
        }
    };
    if let Some(g) = &grid {
        if g.values().is_empty() {
            bail!("the quench grid is empty");
        }
        if g.values().iter().any(|x| !x.is_finite()) {
            bail!("the quench grid contains a non-finite value");
        }
    }

    let sizes = match (file.sizes, command) {
        (Some(s), _) => s,
        (None, Command::Validate) => DEFAULT_VALIDATE_SIZES.to_vec(),
        (None, _) => bail!("`sizes` is required for `{}`", command.name()),
    };
    if command == Command::Exponents && sizes.len() < 3 {
        bail!("exponent fits need at least 3 sizes, got {}", sizes.len());
    }

    let det = file.detector.unwrap_or_default();
    let defaults = DetectorParams::default();
    let detector_params = DetectorParams {
        threshold_fraction: det.threshold_fraction.unwrap_or(defaults.threshold_fraction),
        window: det.window.unwrap_or(defaults.window),
        bandwidth_spacings: det.bandwidth_spacings.unwrap_or(defaults.bandwidth_spacings),
        grid_per_bandwidth: det.grid_per_bandwidth.unwrap_or(defaults.grid_per_bandwidth),
    };
    if !(detector_params.threshold_fraction > 0.0) || detector_params.window < 2 || !(detector_params.bandwidth_spacings > 0.0) || detector_params.grid_per_bandwidth == 0 {
        bail!("detector parameters must be positive (window ≥ 2)");
    }
    if let Some(0) = file.workers {
        bail!("`workers` must be at least 1");
    }

    let config = RunConfig {
        command,
        model: kind,
        template,
        sizes,
        lambda_f,
        grid,
        lambda_i_range: file.lambda_i_range.map(|[a, b]| (a, b)),
        branch: file.branch.unwrap_or(1),
        epsilon_scale: file.epsilon_scale.unwrap_or(1.0),
        detector: det.kind.unwrap_or(Detector::DoubletSplitting),
        detector_params,
        pairing: file.pairing.unwrap_or_default(),
        output: file.output.unwrap_or_else(|| PathBuf::from("out")),
        workers: file.workers,
        cache: file.cache,
    };
    if command != Command::Validate {
        config.sweep_spec().validate()?;
    }
    Ok(config)
}

/// Where a configuration came from, for the manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigSource {
    pub kind: &'static str,
    pub name: String,
    pub text: String,
}

pub fn load(command: Command, config: Option<&std::path::Path>, preset: Option<&str>) -> Result<(RunConfig, ConfigSource)> {
    let source = match (config, preset) {
        (Some(_), Some(_)) => bail!("--config and --preset are mutually exclusive"),
        (Some(path), None) => ConfigSource {
            kind: "file",
            name: path.display().to_string(),
            text: std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        },
        (None, Some(name)) => ConfigSource {
            kind: "preset",
            name: name.to_string(),
            text: presets::preset(name)
                .with_context(|| format!("unknown preset `{name}`; available: {}", presets::names().join(", ")))?
                .to_string(),
        },
        (None, None) if command == Command::Validate => ConfigSource {
            kind: "builtin",
            name: "validate".into(),
            text: presets::VALIDATE_DEFAULT.to_string(),
        },
        (None, None) => bail!("one of --config or --preset is required"),
    };
    let config = parse_config(&source.text, command).with_context(|| format!("in {} `{}`", source.kind, source.name))?;
    Ok((config, source))
}
