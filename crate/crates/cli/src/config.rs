use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use siou::sheet::SheetMode;
use siou::{Corner, GridSpec, InitialLaw, KernelParams, MeasureSpec, RngSeed};

/// Run configuration read from JSON; command-line flags override fields.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dimension: Option<usize>,
    pub measure: Option<MeasureSpec>,
    pub kernel: Option<KernelConfig>,
    pub corners: Vec<Vec<f64>>,
    pub initial: Option<InitialLaw>,
    pub replicates: Option<usize>,
    pub seed: Option<RngSeed>,
    pub grid: Option<GridSpec>,
    pub sheet: Option<SheetConfig>,
    pub output: OutputPaths,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub lambda: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheetConfig {
    pub alpha: Vec<f64>,
    pub sigma: f64,
    pub mode: SheetMode<f64>,
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

pub fn load(path: Option<&Path>) -> Result<RunConfig, String> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
}

/// Parses `"1,2;2,1"` into corner coordinate lists.
pub fn parse_corner_list(s: &str) -> Result<Vec<Vec<f64>>, String> {
    s.split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(parse_coords)
        .collect()
}

pub fn parse_coords(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad coordinate {x:?}: {e}"))
        })
        .collect()
}

impl RunConfig {
    /// Dimension from the explicit field, else from the first corner.
    pub fn resolve_dimension(&mut self) -> Result<usize, String> {
        let n = match (self.dimension, self.corners.first()) {
            (Some(n), _) => n,
            (None, Some(c)) => c.len(),
            (None, None) => return Err("dimension is not set and there are no corners".into()),
        };
        if n == 0 {
            return Err("dimension must be at least 1".into());
        }
        for c in &self.corners {
            if c.len() != n {
                return Err(format!("corner {c:?} does not have {n} coordinates"));
            }
        }
        if let Some(MeasureSpec::Axis { alpha }) = &self.measure {
            if alpha.len() != n {
                return Err(format!("axis measure has {} weights for dimension {n}", alpha.len()));
            }
        }
        self.dimension = Some(n);
        self.measure.get_or_insert(MeasureSpec::Lebesgue);
        Ok(n)
    }

    pub fn corner_list(&self) -> Result<Vec<Corner>, String> {
        if self.corners.is_empty() {
            return Err("no corners given".into());
        }
        self.corners
            .iter()
            .map(|c| Corner::from_f64(c).map_err(|e| e.to_string()))
            .collect()
    }

    pub fn kernel_params(&self) -> Result<KernelParams, String> {
        let k = self.kernel.ok_or("kernel parameters (lambda, sigma) are not set")?;
        let measure = self.measure.clone().unwrap_or(MeasureSpec::Lebesgue);
        KernelParams::new(k.lambda, k.sigma, measure).map_err(|e| e.to_string())
    }

    pub fn initial_law(&self) -> Result<InitialLaw, String> {
        let law = self.initial.clone().ok_or("initial law is not set")?;
        law.validate().map_err(|e| e.to_string())?;
        Ok(law)
    }

    pub fn replicate_count(&self) -> Result<usize, String> {
        match self.replicates {
            Some(0) => Err("replicates must be at least 1".into()),
            Some(n) => Ok(n),
            None => Err("replicates is not set".into()),
        }
    }

    pub fn rng_seed(&self) -> Result<RngSeed, String> {
        self.seed.ok_or_else(|| "seed is required (config field or --seed)".into())
    }
}
