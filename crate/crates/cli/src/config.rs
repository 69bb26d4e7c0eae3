//! Typed run configuration on top of the `[section]` / `key = value` text
//! format. Every validation failure names the offending key and line.

use std::path::{Path, PathBuf};

use mestbench_core::baselines::GibbsSettings;
use mestbench_core::dgp::{SimForm, SimLink};
use mestbench_core::harness::{EstimatorSettings, MethodTag, StudyGrid};
use mestbench_core::ingest::DatasetRecipe;
use mestbench_core::proposed::LahemlSettings;
use mestbench_core::textkv::{self, KvEntry};

use crate::CliError;

pub struct ConfigFile {
    entries: Vec<KvEntry>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Data(format!("cannot read config {}: {e}", path.display()))
        })?;
        let entries = textkv::parse(&text)
            .map_err(|e| CliError::Config(format!("config error: {e}")))?;
        Ok(Self { entries })
    }

    fn entry(&self, section: &str, key: &str) -> Option<&KvEntry> {
        textkv::get(&self.entries, Some(section), key)
    }

    fn err(&self, section: &str, key: &str, msg: &str) -> CliError {
        match self.entry(section, key) {
            Some(e) => CliError::Config(format!(
                "config error at key `{key}` (line {}): {msg}",
                e.line
            )),
            None => CliError::Config(format!("config error at key `[{section}] {key}`: {msg}")),
        }
    }

    fn require(&self, section: &str, key: &str) -> Result<&str, CliError> {
        self.entry(section, key)
            .map(|e| e.value.as_str())
            .ok_or_else(|| self.err(section, key, "missing required key"))
    }

    fn optional(&self, section: &str, key: &str) -> Option<&str> {
        self.entry(section, key).map(|e| e.value.as_str())
    }

    pub fn has_key(&self, section: &str, key: &str) -> bool {
        self.entry(section, key).is_some()
    }

    fn parse_num<T: std::str::FromStr>(
        &self,
        section: &str,
        key: &str,
        value: &str,
    ) -> Result<T, CliError> {
        value
            .trim()
            .parse::<T>()
            .map_err(|_| self.err(section, key, &format!("cannot parse `{value}`")))
    }

    fn optional_num<T: std::str::FromStr>(
        &self,
        section: &str,
        key: &str,
        default: T,
    ) -> Result<T, CliError> {
        match self.optional(section, key) {
            None => Ok(default),
            Some(v) => self.parse_num(section, key, v),
        }
    }

    /// Parse the `[grid]` section into a study grid.
    pub fn study_grid(&self, seed_override: Option<u64>) -> Result<StudyGrid, CliError> {
        let section = "grid";
        let links = textkv::split_list(self.require(section, "links")?)
            .iter()
            .map(|s| {
                SimLink::parse(s).ok_or_else(|| {
                    self.err(section, "links", &format!("unknown link `{s}`"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let forms = textkv::split_list(self.require(section, "forms")?)
            .iter()
            .map(|s| {
                SimForm::parse(s).ok_or_else(|| {
                    self.err(section, "forms", &format!("unknown form `{s}`"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let sizes = textkv::split_list(self.require(section, "sizes")?)
            .iter()
            .map(|s| self.parse_num::<usize>(section, "sizes", s))
            .collect::<Result<Vec<_>, _>>()?;
        let balances = textkv::split_list(self.require(section, "balances")?)
            .iter()
            .map(|s| self.parse_num::<f64>(section, "balances", s))
            .collect::<Result<Vec<_>, _>>()?;
        for &b in &balances {
            if !(b > 0.0 && b <= 0.5) {
                return Err(self.err(
                    section,
                    "balances",
                    &format!("balance must lie in (0, 0.5], got {b}"),
                ));
            }
        }
        let methods = self.methods(section, "methods")?;
        let replications = self.optional_num(section, "replications", 1usize)?;
        let master_seed = match seed_override {
            Some(s) => s,
            None => self.optional_num(section, "master_seed", 0u64)?,
        };
        let grid = StudyGrid { links, forms, sizes, balances, replications, methods, master_seed };
        grid.validate()
            .map_err(|e| CliError::Config(format!("config error in [grid]: {e}")))?;
        Ok(grid)
    }

    /// Parse a method list; `all` expands to every method.
    pub fn methods(&self, section: &str, key: &str) -> Result<Vec<MethodTag>, CliError> {
        let raw = self.require(section, key)?;
        if raw.trim() == "all" {
            return Ok(MethodTag::ALL.to_vec());
        }
        let methods = textkv::split_list(raw)
            .iter()
            .map(|s| {
                MethodTag::parse(s)
                    .ok_or_else(|| self.err(section, key, &format!("unknown method `{s}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if methods.is_empty() {
            return Err(self.err(section, key, "at least one method required"));
        }
        Ok(methods)
    }

    /// Estimator settings from the optional `[laheml]`, `[gibbs]`, and
    /// `[penalized]` sections.
    pub fn estimator_settings(&self) -> Result<EstimatorSettings, CliError> {
        let defaults = EstimatorSettings::default();
        let laheml = LahemlSettings {
            iterations: self.optional_num("laheml", "iterations", defaults.laheml.iterations)?,
            burn_in: self.optional_num("laheml", "burn_in", defaults.laheml.burn_in)?,
            target_accept: self
                .optional_num("laheml", "target_accept", defaults.laheml.target_accept)?,
            adapt_window: self
                .optional_num("laheml", "adapt_window", defaults.laheml.adapt_window)?,
            penalty_tau: self.optional_num("laheml", "penalty_tau", defaults.laheml.penalty_tau)?,
            alpha_bounds: (
                self.optional_num("laheml", "alpha_min", defaults.laheml.alpha_bounds.0)?,
                self.optional_num("laheml", "alpha_max", defaults.laheml.alpha_bounds.1)?,
            ),
            seed: 0,
        };
        let gibbs = GibbsSettings {
            iterations: self.optional_num("gibbs", "iterations", defaults.gibbs.iterations)?,
            burn_in: self.optional_num("gibbs", "burn_in", defaults.gibbs.burn_in)?,
            prior_sd: self.optional_num("gibbs", "prior_sd", defaults.gibbs.prior_sd)?,
            seed: 0,
        };
        let ridge = self.optional_num("penalized", "ridge", defaults.ridge)?;
        if laheml.burn_in >= laheml.iterations {
            return Err(self.err("laheml", "burn_in", "burn_in must be below iterations"));
        }
        if gibbs.burn_in >= gibbs.iterations {
            return Err(self.err("gibbs", "burn_in", "burn_in must be below iterations"));
        }
        Ok(EstimatorSettings { laheml, gibbs, ridge })
    }

    /// Resolve the dataset named in `section` (builtin name or recipe path).
    pub fn dataset_recipe(
        &self,
        section: &str,
        data_dir: &Path,
    ) -> Result<DatasetRecipe, CliError> {
        if let Some(name) = self.optional(section, "dataset") {
            return DatasetRecipe::builtin(name, data_dir).ok_or_else(|| {
                self.err(
                    section,
                    "dataset",
                    &format!(
                        "unknown dataset `{name}` (builtins: {})",
                        DatasetRecipe::builtin_names().join(", ")
                    ),
                )
            });
        }
        if let Some(path) = self.optional(section, "recipe") {
            return DatasetRecipe::from_file(&PathBuf::from(path), data_dir)
                .map_err(|e| CliError::Data(format!("recipe {path}: {e}")));
        }
        Err(self.err(section, "dataset", "need either `dataset` or `recipe`"))
    }

    /// Datasets for the benchmark command: builtin names and recipe paths.
    pub fn benchmark_recipes(&self, data_dir: &Path) -> Result<Vec<DatasetRecipe>, CliError> {
        let mut recipes = Vec::new();
        if let Some(names) = self.optional("benchmark", "datasets") {
            for name in textkv::split_list(names) {
                recipes.push(DatasetRecipe::builtin(&name, data_dir).ok_or_else(|| {
                    self.err("benchmark", "datasets", &format!("unknown dataset `{name}`"))
                })?);
            }
        }
        if let Some(paths) = self.optional("benchmark", "recipes") {
            for path in textkv::split_list(paths) {
                recipes.push(
                    DatasetRecipe::from_file(&PathBuf::from(&path), data_dir)
                        .map_err(|e| CliError::Data(format!("recipe {path}: {e}")))?,
                );
            }
        }
        Ok(recipes)
    }

    pub fn fit_method(&self, section: &str) -> Result<MethodTag, CliError> {
        let raw = self.require(section, "method")?;
        MethodTag::parse(raw)
            .ok_or_else(|| self.err(section, "method", &format!("unknown method `{raw}`")))
    }

    pub fn seed(&self, section: &str, flag: Option<u64>) -> Result<u64, CliError> {
        match flag {
            Some(s) => Ok(s),
            None => self.optional_num(section, "seed", 0u64),
        }
    }

    pub fn flag(&self, section: &str, key: &str, default: bool) -> Result<bool, CliError> {
        match self.optional(section, key) {
            None => Ok(default),
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(v) => Err(self.err(section, key, &format!("expected true/false, got `{v}`"))),
        }
    }

    pub fn optional_usize(
        &self,
        section: &str,
        key: &str,
        default: usize,
    ) -> Result<usize, CliError> {
        self.optional_num(section, key, default)
    }
}
