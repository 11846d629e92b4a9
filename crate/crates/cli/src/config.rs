//! JSON experiment configuration.
//!
//! Every block has defaults that reproduce the acceptance settings, so `{}`
//! is a valid configuration for any campaign. Unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use plap_core::blowup::Direction;
use plap_core::{eigen_rate_alpha, ProblemParams};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Campaign {
    Roots,
    Shoot,
    Blowup,
    Martin,
    Grid,
    Bochner,
    All,
}

impl Campaign {
    pub const ALL_PARTS: [Campaign; 6] = [
        Campaign::Roots,
        Campaign::Shoot,
        Campaign::Blowup,
        Campaign::Martin,
        Campaign::Grid,
        Campaign::Bochner,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Campaign::Roots => "roots",
            Campaign::Shoot => "shoot",
            Campaign::Blowup => "blowup",
            Campaign::Martin => "martin",
            Campaign::Grid => "grid",
            Campaign::Bochner => "bochner",
            Campaign::All => "all",
        }
    }

    /// The concrete campaigns this one expands to, in report order.
    pub fn parts(self) -> Vec<Campaign> {
        match self {
            Campaign::All => Self::ALL_PARTS.to_vec(),
            c => vec![c],
        }
    }
}

impl fmt::Display for Campaign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Campaign {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let all = [Self::ALL_PARTS.as_slice(), &[Campaign::All]].concat();
        all.into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown campaign {s:?}"))
    }
}

/// One `(n, p, a, μ, λ)` instance; only read by the `roots` campaign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsBlock {
    pub n: usize,
    pub p: f64,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub mu: f64,
    #[serde(default)]
    pub lambda: f64,
}

impl ParamsBlock {
    pub fn to_params(&self) -> Result<ProblemParams, ConfigError> {
        let params = ProblemParams::new(self.n, self.p)
            .map_err(|e| invalid("params", e.to_string()))?
            .with_a(self.a)
            .with_mu(self.mu)
            .with_lambda(self.lambda);
        params.validate().map_err(|e| invalid("params", e.to_string()))?;
        Ok(params)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RootsBlock {
    /// Random `(n, p, a, μ)` instances for the indicial sweep.
    pub samples: usize,
    /// Random root instances for the power-solution residual check.
    pub hardy_samples: usize,
    pub max_n: usize,
}

impl Default for RootsBlock {
    fn default() -> Self {
        Self {
            samples: 10_000,
            hardy_samples: 1_000,
            max_n: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShootBlock {
    pub r0: f64,
    pub r_max: f64,
    /// Second fit window for the nonlinear rate check.
    pub inner_window: [f64; 2],
    pub riccati_t: f64,
}

impl Default for ShootBlock {
    fn default() -> Self {
        Self {
            r0: 1.0,
            r_max: 40.0,
            inner_window: [10.0, 20.0],
            riccati_t: 50.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MartinBlock {
    pub n: usize,
    pub p: f64,
    pub lambda: f64,
    pub t: f64,
    /// Evaluation point; `None` means `x = ξ = e₁`.
    pub x: Option<Vec<f64>>,
}

impl Default for MartinBlock {
    fn default() -> Self {
        Self {
            n: 3,
            p: 2.0,
            lambda: 1.0,
            t: 1e3,
            x: None,
        }
    }
}

impl MartinBlock {
    pub fn point(&self) -> Vec<f64> {
        self.x.clone().unwrap_or_else(|| {
            let mut e = vec![0.0; self.n];
            e[0] = 1.0;
            e
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BlowupBlock {
    pub gamma: f64,
    pub alpha: f64,
    pub scales: Vec<f64>,
    pub shifts: Vec<f64>,
    pub origin_window: f64,
    pub infinity_window: f64,
}

impl Default for BlowupBlock {
    fn default() -> Self {
        Self {
            gamma: 0.5,
            alpha: 1.0,
            scales: vec![1e-1, 1e-2, 1e-3, 1e-4],
            shifts: vec![10.0, 20.0, 40.0, 80.0, 160.0],
            origin_window: plap_core::blowup::ORIGIN_WINDOW,
            infinity_window: plap_core::blowup::TRANSLATION_WINDOW,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridBlock {
    pub p: f64,
    pub lambda: f64,
    pub xi: [f64; 2],
    /// Reciprocal mesh widths, coarsest first.
    pub levels: Vec<usize>,
    pub tol: f64,
}

impl Default for GridBlock {
    fn default() -> Self {
        Self {
            p: 3.0,
            lambda: 2.0,
            xi: [0.6, 0.8],
            levels: vec![32, 64, 128],
            // rounding in the flux differences holds the residual near 1e-10 at h = 1/128
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BochnerBlock {
    pub levels: Vec<usize>,
}

impl Default for BochnerBlock {
    fn default() -> Self {
        Self {
            levels: vec![16, 32, 64, 128],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Must agree with the subcommand when present.
    #[serde(default)]
    pub campaign: Option<Campaign>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub params: Option<ParamsBlock>,
    #[serde(default)]
    pub roots: RootsBlock,
    #[serde(default)]
    pub shoot: ShootBlock,
    #[serde(default)]
    pub martin: MartinBlock,
    #[serde(default)]
    pub blowup: BlowupBlock,
    #[serde(default)]
    pub grid: GridBlock,
    #[serde(default)]
    pub bochner: BochnerBlock,
}

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    /// Checks every block the campaign will read.
    pub fn validate(&self, campaign: Campaign) -> Result<(), ConfigError> {
        if let Some(c) = self.campaign {
            if c != campaign {
                return Err(invalid(
                    "campaign",
                    format!("config names campaign {c} but {campaign} was requested"),
                ));
            }
        }
        for part in campaign.parts() {
            match part {
                Campaign::Roots => self.validate_roots()?,
                Campaign::Shoot => self.validate_shoot()?,
                Campaign::Martin => self.validate_martin()?,
                Campaign::Blowup => self.validate_blowup()?,
                Campaign::Grid => self.validate_grid()?,
                Campaign::Bochner => self.validate_bochner()?,
                Campaign::All => unreachable!("parts() expands All"),
            }
        }
        Ok(())
    }

    fn validate_roots(&self) -> Result<(), ConfigError> {
        if let Some(p) = &self.params {
            p.to_params()?;
        }
        let r = &self.roots;
        if r.samples == 0 || r.hardy_samples == 0 {
            return Err(invalid("roots", "sample counts must be positive"));
        }
        if r.max_n < 2 {
            return Err(invalid("roots.max_n", format!("need max_n >= 2, got {}", r.max_n)));
        }
        Ok(())
    }

    fn validate_shoot(&self) -> Result<(), ConfigError> {
        let s = &self.shoot;
        if !(s.r0 > 0.0) || !(s.r_max > s.r0) {
            return Err(invalid("shoot", format!("need 0 < r0 < r_max, got r0 = {}, r_max = {}", s.r0, s.r_max)));
        }
        let [lo, hi] = s.inner_window;
        if !(lo >= s.r0 && hi > lo && hi <= s.r_max) {
            return Err(invalid("shoot.inner_window", format!("[{lo}, {hi}] must lie inside [r0, r_max]")));
        }
        if !(s.riccati_t > 0.0) {
            return Err(invalid("shoot.riccati_t", "must be positive"));
        }
        Ok(())
    }

    fn validate_martin(&self) -> Result<(), ConfigError> {
        let m = &self.martin;
        if m.n < 2 {
            return Err(invalid("martin.n", format!("need n >= 2, got {}", m.n)));
        }
        eigen_rate_alpha(m.lambda, m.p).map_err(|e| invalid("martin", e.to_string()))?;
        let x = m.point();
        if x.len() != m.n {
            return Err(invalid("martin.x", format!("point has dimension {}, n = {}", x.len(), m.n)));
        }
        let norm = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(m.t > 10.0 * (1.0 + norm)) {
            return Err(invalid("martin.t", format!("t = {} must exceed 10(1 + |x|)", m.t)));
        }
        Ok(())
    }

    fn validate_blowup(&self) -> Result<(), ConfigError> {
        let b = &self.blowup;
        if !(b.alpha > 0.0) {
            return Err(invalid("blowup.alpha", "must be positive"));
        }
        if b.scales.is_empty() || b.scales.iter().any(|&s| !(s > 0.0 && s <= 1.0)) {
            return Err(invalid("blowup.scales", "need a nonempty list in (0, 1]"));
        }
        if b.shifts.is_empty() || b.shifts.iter().any(|&t| !(t > b.infinity_window + 1.0)) {
            return Err(invalid("blowup.shifts", "every shift must exceed the window plus one"));
        }
        if !(b.origin_window >= 1.0) || !(b.infinity_window >= 0.0) {
            return Err(invalid("blowup", "windows must satisfy origin >= 1, infinity >= 0"));
        }
        Ok(())
    }

    fn validate_grid(&self) -> Result<(), ConfigError> {
        let g = &self.grid;
        eigen_rate_alpha(g.lambda, g.p).map_err(|e| invalid("grid", e.to_string()))?;
        Direction::new(g.xi.to_vec()).map_err(|e| invalid("grid.xi", e.to_string()))?;
        check_levels("grid.levels", &g.levels, 2)?;
        if !(g.tol > 0.0) {
            return Err(invalid("grid.tol", "must be positive"));
        }
        Ok(())
    }

    fn validate_bochner(&self) -> Result<(), ConfigError> {
        check_levels("bochner.levels", &self.bochner.levels, 6)
    }
}

fn check_levels(field: &'static str, levels: &[usize], min: usize) -> Result<(), ConfigError> {
    if levels.len() < 2 {
        return Err(invalid(field, "need at least two refinement levels"));
    }
    if levels.iter().any(|&l| l < min) || levels.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(invalid(field, format!("levels must start at >= {min} and double each step")));
    }
    Ok(())
}
