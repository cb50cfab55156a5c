//! Configuration resolution: command-line flags override the config file,
//! which overrides the defaults. The resolved configuration is echoed into
//! every output artifact for provenance.

use crate::CommonArgs;
use orbital_core::spherical::QuadratureConfig;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Keys accepted in the JSON config file; all optional.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct FileConfig {
    pub family: Option<String>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub t: Option<Vec<f64>>,
    pub lambda_max: Option<f64>,
    pub lambda_points: Option<usize>,
    pub k_order: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub bins: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
}

/// Fully resolved configuration; serialized into every output.
#[derive(Debug, Clone, Serialize)]
pub struct EffectiveConfig {
    pub family: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub generators: Vec<f64>,
    pub lambda_max: f64,
    pub lambda_points: usize,
    pub k_order: usize,
    pub samples: usize,
    pub seed: u64,
    pub bins: usize,
    #[serde(skip)]
    pub histogram: bool,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub format: OutputFormat,
    #[serde(skip)]
    pub lambda_max_explicit: Option<f64>,
}

impl EffectiveConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self, String> {
        let file: FileConfig = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("config file {}: {e}", path.display()))?;
                serde_json::from_str(&text).map_err(|e| format!("config file parse: {e}"))?
            }
            None => FileConfig::default(),
        };
        let generators = match (&args.t, &file.t) {
            (Some(raw), _) => parse_generators(raw)?,
            (None, Some(v)) => v.clone(),
            (None, None) => Vec::new(),
        };
        let format = match args
            .format
            .clone()
            .or(file.format)
            .unwrap_or_else(|| "json".into())
            .as_str()
        {
            "json" => OutputFormat::Json,
            "csv" => OutputFormat::Csv,
            other => return Err(format!("unknown format {other}; expected json or csv")),
        };
        let lambda_max_explicit = args.lambda_max.or(file.lambda_max);
        let cfg = Self {
            family: args
                .family
                .clone()
                .or(file.family)
                .unwrap_or_else(|| "real-hyperbolic".into()),
            n: args.n.or(file.n).unwrap_or(2),
            m: args.m.or(file.m),
            generators,
            lambda_max: lambda_max_explicit.unwrap_or(400.0),
            lambda_points: args.lambda_points.or(file.lambda_points).unwrap_or(201),
            k_order: args.k_order.or(file.k_order).unwrap_or(16384),
            samples: args.samples.or(file.samples).unwrap_or(10_000),
            seed: args.seed.or(file.seed).unwrap_or(0),
            bins: args.bins.or(file.bins).unwrap_or(100),
            histogram: args.histogram,
            out: args.out.clone().or(file.out),
            format,
            lambda_max_explicit,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), String> {
        if self.lambda_max <= 0.0 {
            return Err("lambda-max must be positive".into());
        }
        if self.lambda_points < 2 {
            return Err("lambda-points must be at least 2".into());
        }
        if self.k_order < 16 {
            return Err("k-order must be at least 16".into());
        }
        if self.samples == 0 {
            return Err("sample count must be positive".into());
        }
        if self.generators.iter().any(|&t| !t.is_finite() || t <= 0.0) {
            return Err("radial generators must be positive finite numbers".into());
        }
        Ok(())
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        QuadratureConfig {
            k_order_max: self.k_order,
            lambda_max: self.lambda_max,
            ..QuadratureConfig::default()
        }
    }
}

fn parse_generators(raw: &str) -> Result<Vec<f64>, String> {
    raw.split(',')
        .map(|piece| {
            piece
                .trim()
                .parse::<f64>()
                .map_err(|e| format!("radial generator {piece:?}: {e}"))
        })
        .collect()
}
