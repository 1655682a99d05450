use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strategy::{StrategyKind, StrategyParams};

/// A scalar distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Dist {
    Constant { value: f64 },
    Uniform { low: f64, high: f64 },
}

impl Dist {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Dist::Constant { value } => value,
            Dist::Uniform { low, high } if low == high => low,
            Dist::Uniform { low, high } => rng.random_range(low..=high),
        }
    }

    pub fn min(&self) -> f64 {
        match *self {
            Dist::Constant { value } => value,
            Dist::Uniform { low, .. } => low,
        }
    }

    fn validate(&self, field: &str, lower_bound: f64, strict: bool) -> Result<()> {
        let (lo, hi, lo_name) = match *self {
            Dist::Constant { value } => (value, value, "value"),
            Dist::Uniform { low, high } => (low, high, "low"),
        };
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::validation(field, "bounds must be finite"));
        }
        if lo > hi {
            return Err(Error::validation(
                format!("{field}.low"),
                "must not exceed high",
            ));
        }
        let ok = if strict {
            lo > lower_bound
        } else {
            lo >= lower_bound
        };
        if !ok {
            let op = if strict { ">" } else { ">=" };
            return Err(Error::validation(
                format!("{field}.{lo_name}"),
                format!("must be {op} {lower_bound}, got {lo}"),
            ));
        }
        Ok(())
    }
}

/// How buyers' preference weights are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum WeightsDist {
    /// Uniform over the probability simplex.
    Simplex,
    Fixed {
        cost: f64,
        availability: f64,
        acceptance_rate: f64,
    },
}

/// Everything one simulated market run needs. Defaults reproduce the
/// reference scenario: O = 10, pr_index = 0.4, 150 episodes of 2000 s with
/// 25 buyers each, α = 0.5.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub strategy: StrategyKind,
    pub n_vendors: usize,
    pub episodes: usize,
    /// Simulation seconds per episode.
    pub episode_length: f64,
    pub buyers_per_episode: usize,
    /// `O`.
    pub loss_window: u32,
    /// `W`; defaults to `loss_window`.
    pub acceptance_window: Option<u32>,
    pub pr_index: f64,
    /// `α`.
    pub demand_coefficient: f64,
    pub seed: u64,

    /// Per resource, whole units.
    pub capacity: Dist,
    /// Per resource unit.
    pub base_price: Dist,
    pub markup: Dist,
    /// Requested quantity per resource, whole units.
    pub bundle: Dist,
    /// Service time, sim seconds.
    pub duration: Dist,
    /// Time a request may wait for capacity, sim seconds.
    pub max_wait: Dist,
    pub weights: WeightsDist,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            strategy: StrategyKind::Mpra,
            n_vendors: 12,
            episodes: 150,
            episode_length: 2000.0,
            buyers_per_episode: 25,
            loss_window: 10,
            acceptance_window: None,
            pr_index: 0.4,
            demand_coefficient: 0.5,
            seed: 1,
            capacity: Dist::Uniform {
                low: 500.0,
                high: 1000.0,
            },
            base_price: Dist::Uniform {
                low: 1.0,
                high: 5.0,
            },
            markup: Dist::Uniform {
                low: 1.0,
                high: 1.5,
            },
            bundle: Dist::Uniform {
                low: 10.0,
                high: 100.0,
            },
            duration: Dist::Uniform {
                low: 50.0,
                high: 200.0,
            },
            max_wait: Dist::Uniform {
                low: 50.0,
                high: 300.0,
            },
            weights: WeightsDist::Simplex,
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::ConfigRead {
            path: path.to_path_buf(),
            source,
        })?;
        let config = Self::from_toml_str(&text).map_err(|message| Error::ConfigParse {
            path: path.to_path_buf(),
            message,
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn acceptance_window(&self) -> u32 {
        self.acceptance_window.unwrap_or(self.loss_window)
    }

    pub fn strategy_params(&self) -> StrategyParams {
        StrategyParams {
            pr_index: self.pr_index,
            loss_window: self.loss_window,
            acceptance_window: self.acceptance_window(),
            demand_coefficient: self.demand_coefficient,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (field, count) in [
            ("n_vendors", self.n_vendors),
            ("episodes", self.episodes),
            ("loss_window", self.loss_window as usize),
            ("acceptance_window", self.acceptance_window() as usize),
        ] {
            if count == 0 {
                return Err(Error::validation(field, "must be at least 1"));
            }
        }
        if !(self.episode_length.is_finite() && self.episode_length > 0.0) {
            return Err(Error::validation("episode_length", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.pr_index) {
            return Err(Error::validation("pr_index", "must lie in [0, 1]"));
        }
        if !(self.demand_coefficient.is_finite() && self.demand_coefficient >= 0.0) {
            return Err(Error::validation("demand_coefficient", "must be >= 0"));
        }
        self.capacity.validate("capacity", 1.0, false)?;
        self.base_price.validate("base_price", 0.0, true)?;
        self.markup.validate("markup", 0.0, true)?;
        self.bundle.validate("bundle", 1.0, false)?;
        self.duration.validate("duration", 0.0, true)?;
        self.max_wait.validate("max_wait", 0.0, false)?;
        if let WeightsDist::Fixed {
            cost,
            availability,
            acceptance_rate,
        } = self.weights
        {
            crate::market::PreferenceWeights::new(cost, availability, acceptance_rate)
                .map_err(|e| Error::validation("weights", e.to_string()))?;
        }
        Ok(())
    }
}
