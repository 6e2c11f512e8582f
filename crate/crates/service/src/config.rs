use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use trains_core::discourse::{Reasoner, RuleSet};
use trains_core::generator::{Generator, Templates};
use trains_core::grammar::Grammar;
use trains_core::session::Resources;
use trains_core::solver::{RouteMap, Scenario};
use trains_core::speechpp::fixture::fixture_corrector;
use trains_core::speechpp::{load_channel, load_lm, PostCorrector};

use crate::ServiceError;

/// Environment variable naming the config file. Only the path comes from
/// the environment; every setting lives in the file or on the command line.
pub const CONFIG_ENV: &str = "TRAINS_CONFIG";

/// Service settings. Keys mirror the `serve` flags.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", default)]
pub struct Config {
    pub bind: String,
    /// Language model file for the speech channel.
    pub lm: Option<PathBuf>,
    /// Channel model file for the speech channel.
    pub channel_model: Option<PathBuf>,
    pub beam_width: usize,
    pub map: Option<PathBuf>,
    pub grammar: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    /// Extra `*.toml` scenarios, added to the built-in ones.
    pub scenario_dir: Option<PathBuf>,
    /// Display commands buffered per event-stream subscriber.
    pub event_buffer: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            bind: "127.0.0.1:8095".into(),
            lm: None,
            channel_model: None,
            beam_width: 16,
            map: None,
            grammar: None,
            rules: None,
            templates: None,
            scenario_dir: None,
            event_buffer: 256,
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, ServiceError> {
        toml::from_str(text).map_err(|e| ServiceError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Config, ServiceError> {
        Config::parse(&read(path)?)
    }

    /// The file named by [`CONFIG_ENV`], or defaults when it is unset.
    pub fn from_env() -> Result<Config, ServiceError> {
        match std::env::var_os(CONFIG_ENV) {
            Some(p) => Config::load(Path::new(&p)),
            None => Ok(Config::default()),
        }
    }
}

fn read(path: &Path) -> Result<String, ServiceError> {
    fs::read_to_string(path).map_err(|source| ServiceError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a model pair, or the bundled corrector when neither file is set.
pub fn load_corrector(
    lm: Option<&Path>,
    channel: Option<&Path>,
    beam_width: usize,
) -> Result<PostCorrector, ServiceError> {
    match (lm, channel) {
        (Some(lm), Some(channel)) => Ok(PostCorrector {
            lm: load_lm(lm)?,
            channel: load_channel(channel)?,
            beam_width,
        }),
        (None, None) => {
            log::info!("no model files configured; training the bundled post-corrector");
            Ok(PostCorrector {
                beam_width,
                ..fixture_corrector()
            })
        }
        _ => Err(ServiceError::Config(
            "lm and channel-model must be given together".into(),
        )),
    }
}

/// Everything a running service shares between sessions.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub resources: Resources,
    pub scenarios: BTreeMap<String, Scenario>,
}

impl Loaded {
    pub fn from_config(config: &Config) -> Result<Loaded, ServiceError> {
        let map = match &config.map {
            Some(p) => RouteMap::parse(&read(p)?)?,
            None => RouteMap::fixture(),
        };
        let grammar = match &config.grammar {
            Some(p) => Grammar::load(p.clone()).map_err(|e| ServiceError::Config(e.to_string()))?,
            None => Grammar::fixture(),
        };
        let rules = match &config.rules {
            Some(p) => RuleSet::load(p)?,
            None => RuleSet::fixture(),
        };
        let templates = match &config.templates {
            Some(p) => Templates::load(p)?,
            None => Templates::fixture(),
        };
        let corrector = load_corrector(config.lm.as_deref(), config.channel_model.as_deref(), config.beam_width)?;
        let resources = Resources {
            map: Arc::new(map),
            grammar: Arc::new(grammar),
            reasoner: Arc::new(Reasoner::new(rules)),
            generator: Arc::new(Generator::new(templates)),
            corrector: Some(Arc::new(corrector)),
        };
        let scenarios = load_scenarios(config.scenario_dir.as_deref(), &resources.map)?;
        Ok(Loaded { resources, scenarios })
    }
}

/// Built-in scenarios plus the `*.toml` files of `dir`, each checked
/// against `map`. Scenarios that do not fit the map are skipped with a
/// warning, since the built-ins assume the bundled map.
pub fn load_scenarios(dir: Option<&Path>, map: &RouteMap) -> Result<BTreeMap<String, Scenario>, ServiceError> {
    let mut out = BTreeMap::new();
    for name in Scenario::builtin_names() {
        let s = Scenario::builtin(name).expect("listed");
        match s.validate(map) {
            Ok(()) => {
                out.insert(s.name.clone(), s);
            }
            Err(e) => log::warn!("built-in scenario {name} does not fit map {}: {e}", map.name),
        }
    }
    if let Some(dir) = dir {
        let entries = fs::read_dir(dir).map_err(|source| ServiceError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let mut paths: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "toml"))
            .collect();
        paths.sort();
        for p in paths {
            let s = Scenario::parse(&read(&p)?)?;
            s.validate(map)?;
            out.insert(s.name.clone(), s);
        }
    }
    Ok(out)
}

/// A built-in scenario name or a scenario file.
pub fn resolve_scenario(name_or_path: &str) -> Result<Scenario, ServiceError> {
    if let Some(s) = Scenario::builtin(name_or_path) {
        return Ok(s);
    }
    let path = Path::new(name_or_path);
    if path.exists() {
        return Ok(Scenario::parse(&read(path)?)?);
    }
    Err(ServiceError::UnknownScenario(name_or_path.to_string()))
}
