use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{InstrumentSource, UniverseConfig};
use crate::error::{Error, Result};
use crate::evaluation::DownPosition;
use crate::features::FeatureParams;
use crate::meta::{SelectionMode, DEFAULT_MIN_META_RECORDS};
use crate::models::{ClassifierSpec, Grid, ModelKind};
use crate::splits::{DEFAULT_TEST_FRAC, DEFAULT_VAL_FRAC};

pub const DEFAULT_STORE_NAME: &str = "records.store";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineSettings {
    pub test_frac: f64,
    pub val_frac: f64,
    pub selection_mode: SelectionMode,
    /// Short on a 0 prediction instead of staying flat.
    pub short_on_down: bool,
    pub enabled_kinds: Vec<ModelKind>,
    /// Walk-forward window count. 1 is a single training cycle.
    pub windows: usize,
    /// Test segment length in samples. Defaults to `round(test_frac * n)`.
    pub window_len: Option<usize>,
    pub min_meta_records: usize,
    /// Record store file. Defaults to `<out>/records.store`.
    pub store: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl Default for PipelineSettings {
    fn default() -> Self {
        PipelineSettings {
            test_frac: DEFAULT_TEST_FRAC,
            val_frac: DEFAULT_VAL_FRAC,
            selection_mode: SelectionMode::ProfitableList,
            short_on_down: true,
            enabled_kinds: ModelKind::ALL.to_vec(),
            windows: 1,
            window_len: None,
            min_meta_records: DEFAULT_MIN_META_RECORDS,
            store: None,
            out: None,
        }
    }
}

/// Everything a run needs. Loaded from TOML:
///
/// ```toml
/// seed = 7
///
/// [[instruments]]
/// symbol = "AAPL"
/// csv = "data/AAPL.csv"
///
/// [[instruments]]
/// symbol = "SYN"
/// [instruments.synthetic]
/// kind = "persistent_sign"
/// length = 2000
/// persistence = 0.65
/// seed = 1
///
/// [pipeline]
/// enabled_kinds = ["LogisticRegression", "DecisionTree"]
/// windows = 4
///
/// [[grid]]
/// kind = "LogisticRegression"
/// C = 0.5
/// ```
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    #[serde(default)]
    pub instruments: Vec<InstrumentSource>,
    #[serde(default)]
    pub pipeline: PipelineSettings,
    #[serde(default)]
    pub features: FeatureParams,
    /// Grid entries. All entries of one kind replace that kind's default grid.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grid: Vec<ClassifierSpec>,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a config file. Relative paths inside it resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn universe(&self) -> UniverseConfig {
        UniverseConfig {
            instruments: self.instruments.clone(),
            base_dir: self.base_dir.clone(),
        }
    }

    pub fn master_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Config("no master seed: set `seed` in the config or pass --seed".into()))
    }

    pub fn down_position(&self) -> DownPosition {
        DownPosition::from_short_flag(self.pipeline.short_on_down)
    }

    /// Enabled kinds, deduplicated, in zoo order.
    pub fn kinds(&self) -> Vec<ModelKind> {
        let set: BTreeSet<ModelKind> = self.pipeline.enabled_kinds.iter().copied().collect();
        set.into_iter().collect()
    }

    pub fn grids(&self) -> Vec<Grid> {
        self.kinds()
            .into_iter()
            .map(|kind| {
                let specs: Vec<ClassifierSpec> = self.grid.iter().filter(|s| s.kind() == kind).cloned().collect();
                if specs.is_empty() {
                    Grid::default_for(kind)
                } else {
                    Grid { kind, specs }
                }
            })
            .collect()
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        match &self.base_dir {
            Some(base) if path.is_relative() => base.join(path),
            _ => path.to_path_buf(),
        }
    }

    pub fn out_dir(&self) -> Result<PathBuf> {
        self.pipeline
            .out
            .as_deref()
            .map(|p| self.resolve(p))
            .ok_or_else(|| Error::Config("no output directory: set pipeline.out or pass --out".into()))
    }

    pub fn store_path(&self) -> Result<PathBuf> {
        match &self.pipeline.store {
            Some(p) => Ok(self.resolve(p)),
            None => Ok(self.out_dir()?.join(DEFAULT_STORE_NAME)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.master_seed()?;
        self.universe().validate()?;
        self.features.validate()?;
        let p = &self.pipeline;
        for (name, v) in [("test_frac", p.test_frac), ("val_frac", p.val_frac)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!("{name} must be in (0, 1), got {v}")));
            }
        }
        if p.enabled_kinds.is_empty() {
            return Err(Error::Config("no model kinds enabled".into()));
        }
        if p.windows == 0 {
            return Err(Error::Config("windows must be at least 1".into()));
        }
        if p.window_len == Some(0) {
            return Err(Error::Config("window_len must be positive".into()));
        }
        for g in self.grids() {
            g.validate()?;
        }
        for s in &self.grid {
            if !self.kinds().contains(&s.kind()) {
                log::warn!("grid entry {} is for a kind that is not enabled", s.canonical_id());
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
seed = 7

[[instruments]]
symbol = "AAPL"
csv = "data/AAPL.csv"

[[instruments]]
symbol = "SYN"
[instruments.synthetic]
kind = "persistent_sign"
length = 2000
persistence = 0.65
seed = 1

[pipeline]
enabled_kinds = ["LogisticRegression", "DecisionTree", "LogisticRegression"]
windows = 4
selection_mode = "best_single"
short_on_down = false

[features]
rsi_period = 10

[[grid]]
kind = "LogisticRegression"
C = 0.5

[[grid]]
kind = "LogisticRegression"
C = 2.0
"#;

    #[test]
    fn parses_full_config() {
        let mut cfg = RunConfig::from_toml_str(SAMPLE).unwrap();
        cfg.base_dir = Some(PathBuf::from("/cfg"));
        cfg.validate().unwrap();
        assert_eq!(cfg.master_seed().unwrap(), 7);
        assert_eq!(cfg.kinds(), [ModelKind::LogisticRegression, ModelKind::DecisionTree]);
        assert_eq!(cfg.pipeline.selection_mode, SelectionMode::BestSingle);
        assert_eq!(cfg.down_position(), DownPosition::Flat);
        assert_eq!(cfg.features.rsi_period, 10);
        let grids = cfg.grids();
        assert_eq!(grids[0].specs.len(), 2);
        assert_eq!(grids[1], Grid::default_for(ModelKind::DecisionTree));
        assert_eq!(cfg.resolve(Path::new("data/x.csv")), PathBuf::from("/cfg/data/x.csv"));
    }

    #[test]
    fn defaults_and_missing_seed() {
        let cfg = RunConfig::from_toml_str("[[instruments]]\nsymbol = \"A\"\ncsv = \"a.csv\"\n").unwrap();
        assert_eq!(cfg.pipeline, PipelineSettings::default());
        assert_eq!(cfg.kinds().len(), 9);
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        assert!(cfg.out_dir().is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::from_toml_str("seed = 1\nsede = 2\n").is_err());
        assert!(RunConfig::from_toml_str("seed = 1\n[pipeline]\nwindow = 2\n").is_err());
    }

    #[test]
    fn toml_round_trip() {
        let cfg = RunConfig::from_toml_str(SAMPLE).unwrap();
        let back = RunConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
