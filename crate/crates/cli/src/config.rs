use std::collections::BTreeMap;
use std::path::PathBuf;

use kms_dynamics::groupoid::CocycleSpec;
use kms_dynamics::orbit::{Assumptions, Region};
use kms_dynamics::sphere::{parse_expr, parse_map, BaseMetric, Params, Weight};
use kms_dynamics::{MetricSpec, RationalMap, SpherePoint, SCHEMA_VERSION};
use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::args::{Cli, Command, Format};
use crate::error::{CliError, CliResult};

/// Everything that determines the bytes of an output, and the output path.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub schema_version: u32,
    pub map: String,
    pub params: BTreeMap<String, [f64; 2]>,
    pub metric: Option<String>,
    pub depth: Option<usize>,
    pub horizon: usize,
    pub tol: f64,
    pub assume_ce: bool,
    pub assume_preperiodic_critical: Option<bool>,
    pub julia_is_sphere: bool,
    pub seed: u64,
    pub format: Format,
    pub command: Command,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

fn default_format(cmd: &Command) -> Format {
    match cmd {
        Command::Classify { .. } | Command::Census { .. } => Format::Json,
        Command::PhaseDiagram { .. } | Command::Pressure { .. } | Command::Measure { .. } => Format::Csv,
        Command::Julia { .. } => Format::Png,
    }
}

/// A constant complex expression such as `0.75+0.5i`.
pub fn parse_complex(src: &str, params: &Params) -> CliResult<Complex64> {
    let e = parse_expr(src, params).map_err(|e| CliError::config(format!("`{src}`: {e}")))?;
    if e.contains_var() {
        return Err(CliError::config(format!("`{src}` must not contain z")));
    }
    let v = e.eval(Complex64::new(0.0, 0.0));
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(CliError::config(format!("`{src}` is not a finite number")));
    }
    Ok(v)
}

pub fn parse_point(src: &str, params: &Params) -> CliResult<SpherePoint> {
    if src.trim().eq_ignore_ascii_case("inf") {
        return Ok(SpherePoint::Infinity);
    }
    parse_complex(src, params).map(SpherePoint::Finite)
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> CliResult<Self> {
        let g = cli.global;
        if !(g.tol > 0.0 && g.tol.is_finite()) {
            return Err(CliError::config("--tol must be positive"));
        }
        if g.horizon == 0 {
            return Err(CliError::config("--horizon must be positive"));
        }
        if g.depth == Some(0) {
            return Err(CliError::config("--depth must be positive"));
        }
        let mut params = BTreeMap::new();
        for binding in &g.params {
            let (name, value) = binding
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("--param expects NAME=VALUE, got `{binding}`")))?;
            let name = name.trim();
            if name.is_empty()
                || name == "z"
                || name == "i"
                || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(CliError::config(format!("invalid parameter name `{name}`")));
            }
            let v = parse_complex(value, &Params::new())?;
            params.insert(name.to_string(), [v.re, v.im]);
        }
        let format = g.format.unwrap_or_else(|| default_format(&cli.command));
        let cfg = RunConfig {
            schema_version: SCHEMA_VERSION,
            map: g.map,
            params,
            metric: g.metric,
            depth: g.depth,
            horizon: g.horizon,
            tol: g.tol,
            assume_ce: g.assume_ce,
            assume_preperiodic_critical: g.assume_preperiodic_critical,
            julia_is_sphere: g.julia_is_sphere,
            seed: g.seed,
            format,
            command: cli.command,
            out: g.out,
        };
        cfg.metric_spec()?;
        Ok(cfg)
    }

    pub fn param_bindings(&self) -> Params {
        self.params
            .iter()
            .map(|(k, v)| (k.clone(), Complex64::new(v[0], v[1])))
            .collect()
    }

    pub fn rational_map(&self) -> CliResult<RationalMap> {
        parse_map(&self.map, &self.param_bindings()).map_err(CliError::from)
    }

    /// The metric named by `--metric`, or `None` for the map's default.
    pub fn metric_spec(&self) -> CliResult<Option<MetricSpec>> {
        let Some(m) = self.metric.as_deref() else {
            return Ok(None);
        };
        match m {
            "flat" => Ok(Some(MetricSpec::Flat)),
            "chordal" => Ok(Some(MetricSpec::Chordal)),
            _ => {
                let src = m
                    .strip_prefix("weighted:")
                    .ok_or_else(|| CliError::config(format!("unknown metric `{m}`")))?;
                let e = parse_expr(src, &self.param_bindings())?;
                let weight = Weight::new(src, move |p: &SpherePoint| match p.finite() {
                    Some(z) => e.eval(z).norm(),
                    None => f64::NAN,
                });
                Ok(Some(MetricSpec::weighted(BaseMetric::Chordal, weight)))
            }
        }
    }

    pub fn metric_for(&self, map: &RationalMap) -> CliResult<MetricSpec> {
        Ok(self.metric_spec()?.unwrap_or_else(|| MetricSpec::default_for(map)))
    }

    pub fn assumptions(&self) -> Assumptions {
        Assumptions {
            collet_eckmann: self.assume_ce,
            critical_preperiodic: self.assume_preperiodic_critical,
        }
    }

    pub fn region(&self) -> Region {
        if self.julia_is_sphere {
            Region::JuliaIsSphere
        } else {
            Region::Julia
        }
    }

    pub fn cocycle(&self, action: &str, map: &RationalMap) -> CliResult<CocycleSpec> {
        match action {
            "gauge" => Ok(CocycleSpec::Gauge),
            "conformal" => Ok(CocycleSpec::Conformal {
                metric: self.metric_for(map)?,
            }),
            _ => {
                let src = action
                    .strip_prefix("potential:")
                    .ok_or_else(|| CliError::config(format!("unknown action `{action}`")))?;
                let e = parse_expr(src, &self.param_bindings())?;
                let f = Weight::new(src, move |p: &SpherePoint| match p.finite() {
                    Some(z) => e.eval(z).re,
                    None => f64::NAN,
                });
                Ok(CocycleSpec::Generalized { f })
            }
        }
    }

    /// Canonical JSON of the configuration.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("configuration serializes")
    }

    /// SHA-256 of [`canonical_json`](Self::canonical_json), in hex.
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical_json().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
