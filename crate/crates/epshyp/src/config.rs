//! JSON configuration.
//!
//! ```json
//! {
//!   "epsilon": 0.3, "alpha": 2.0, "d": "auto", "b": 1.0,
//!   "outer": 2, "inner": 2,
//!   "blocks": 72,
//!   "targets": null, "target_count": 20, "seed": 0,
//!   "search": { "delta_min": 8, "tail_bits": 40, "fresh_every": 8 },
//!   "out": "out"
//! }
//! ```
//!
//! `d` is an integer or the string `"auto"`; norms are a number `p ≥ 1` or
//! `"sup"`; explicit targets are outer vectors in the report encoding
//! (`{"block": {"coord": value}}`). Every other field has a default.

use std::path::PathBuf;

use epshyp_core::construction::{fresh_element, SearchConfig};
use epshyp_core::criterion::{BuildConfig, ProductConfig};
use epshyp_core::verify::{DynamicsConfig, ProductSuiteConfig, WeightSuiteConfig};
use epshyp_core::{Index, InnerVec, NormSpec, OuterVec, Params};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DChoice {
    Fixed(u32),
    Auto(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProductSection {
    pub blocks: usize,
    pub v_count: usize,
    pub w_count: usize,
    pub lambda: f64,
    pub build: ProductConfig,
    pub suite: ProductSuiteConfig,
}

impl Default for ProductSection {
    fn default() -> Self {
        ProductSection {
            blocks: 48,
            v_count: 4,
            w_count: 10,
            lambda: 2.0,
            build: ProductConfig::default(),
            suite: ProductSuiteConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RolewiczSection {
    pub lambda: f64,
    pub targets: usize,
    pub horizon: usize,
    pub refine_steps: usize,
}

impl Default for RolewiczSection {
    fn default() -> Self {
        RolewiczSection { lambda: 2.0, targets: 10, horizon: 900, refine_steps: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub epsilon: f64,
    pub alpha: f64,
    pub d: DChoice,
    pub b: f64,
    pub outer: NormSpec,
    pub inner: NormSpec,
    /// Number of blocks `K` built for the `verify` and `orbit` commands.
    pub blocks: usize,
    pub targets: Option<Vec<OuterVec>>,
    pub target_count: usize,
    pub seed: u64,
    /// The criterion radius is `2α^{-d}b · (1 + radius_slack)`.
    pub radius_slack: f64,
    /// Blocks `2..=construction_blocks` go through the construction suite.
    pub construction_blocks: usize,
    pub search: SearchConfig,
    pub build: BuildConfig,
    pub weights: WeightSuiteConfig,
    pub dynamics: DynamicsConfig,
    pub rolewicz: RolewiczSection,
    pub product: ProductSection,
    pub out: PathBuf,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            epsilon: 0.3,
            alpha: 2.0,
            d: DChoice::Fixed(3),
            b: 1.0,
            outer: NormSpec::P(2.0),
            inner: NormSpec::P(2.0),
            blocks: 72,
            targets: None,
            target_count: 20,
            seed: 0,
            radius_slack: 0.05,
            construction_blocks: 8,
            search: SearchConfig::default(),
            build: BuildConfig::default(),
            weights: WeightSuiteConfig::default(),
            dynamics: DynamicsConfig::default(),
            rolewicz: RolewiczSection::default(),
            product: ProductSection::default(),
            out: PathBuf::from("out"),
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed config: {e}")))?;
        cfg.params()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.search.seed = seed;
        self.weights.seed = seed;
        self.dynamics.seed = seed;
        self
    }

    /// Validated parameters with `d` resolved.
    pub fn params(&self) -> Result<Params, CliError> {
        let d = match self.d {
            DChoice::Fixed(d) => d,
            DChoice::Auto(_) => Params::auto_d(self.epsilon, self.alpha, self.b)
                .ok_or_else(|| CliError::Config(String::from("no d satisfies 2α^-d b < ε")))?,
        };
        let p = Params { b: self.b, ..Params::new(self.epsilon, self.alpha, d) };
        p.validate_base().map_err(|e| CliError::Config(e.to_string()))?;
        if self.blocks < 2 || self.target_count == 0 && self.targets.is_none() {
            return Err(CliError::Config(String::from("need blocks ≥ 2 and at least one target")));
        }
        if self.targets.as_ref().is_some_and(|t| t.is_empty() || t.iter().any(OuterVec::is_zero)) {
            return Err(CliError::Config(String::from("targets must be nonzero")));
        }
        Ok(p)
    }

    pub fn radius(&self, params: &Params) -> f64 {
        params.perturbation_ratio() * (1.0 + self.radius_slack)
    }

    /// Explicit targets, or `target_count` nonzero dyadic vectors drawn from
    /// the seeded enumeration.
    pub fn targets(&self) -> Vec<OuterVec> {
        if let Some(t) = &self.targets {
            return t.clone();
        }
        let mut out = Vec::with_capacity(self.target_count);
        let mut t = 0u64;
        while out.len() < self.target_count {
            let x = fresh_element(t, 6, self.seed ^ 0x7461_7267);
            t += 1;
            if !x.is_zero() && !out.contains(&x) {
                out.push(x);
            }
        }
        out
    }

    /// `W`-targets for the product run: scalar sequences with one or two entries.
    pub fn w_targets(&self) -> Vec<OuterVec> {
        (0..self.product.w_count)
            .map(|i| {
                let head = (i as Index % 4, InnerVec::unit(0).scaled(1.0 + i as f64 / 4.0));
                if i % 3 == 2 {
                    OuterVec::from_blocks([head, (i as Index % 4 + 1, InnerVec::unit(0).scaled(-0.5))])
                } else {
                    OuterVec::from_blocks([head])
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auto_sentinel() {
        let c = Config::from_json(r#"{"epsilon": 0.2, "d": "auto"}"#).unwrap();
        assert_eq!(c.params().unwrap().d, 4);
        let c = Config::from_json(r#"{"d": 5}"#).unwrap();
        assert_eq!(c.d, DChoice::Fixed(5));
        assert!(Config::from_json(r#"{"d": "sometimes"}"#).is_err());
        assert!(Config::from_json(r#"{"epsilon": 1.5}"#).is_err());
        assert!(Config::from_json(r#"{"bogus": 1}"#).is_err());
        assert!(Config::from_json("{").is_err());
    }

    #[test]
    fn default_round_trips() {
        let c = Config::default();
        let back = Config::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert_eq!(c.targets().len(), 20);
        assert_eq!(c.targets(), back.targets());
    }
}
