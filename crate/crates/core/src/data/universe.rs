use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{generate_synthetic_series, read_ohlcv_file, InstrumentId, PriceSeries, SyntheticSpec};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One `[[instruments]]` entry: a symbol plus exactly one of `csv` or `synthetic`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstrumentSource {
    pub symbol: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticSpec>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DataSource {
    Csv(PathBuf),
    Synthetic(SyntheticSpec),
}

impl InstrumentSource {
    pub fn csv(symbol: &str, path: impl Into<PathBuf>) -> Self {
        InstrumentSource {
            symbol: symbol.to_string(),
            csv: Some(path.into()),
            synthetic: None,
        }
    }

    pub fn synthetic(symbol: &str, spec: SyntheticSpec) -> Self {
        InstrumentSource {
            symbol: symbol.to_string(),
            csv: None,
            synthetic: Some(spec),
        }
    }

    pub fn source(&self) -> Result<DataSource> {
        match (&self.csv, &self.synthetic) {
            (Some(p), None) => Ok(DataSource::Csv(p.clone())),
            (None, Some(s)) => Ok(DataSource::Synthetic(s.clone())),
            _ => Err(Error::Config(format!(
                "instrument {} needs exactly one of `csv` or `synthetic`",
                self.symbol
            ))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct UniverseConfig {
    pub instruments: Vec<InstrumentSource>,
    /// Relative CSV paths resolve against this directory.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl UniverseConfig {
    pub fn validate(&self) -> Result<Vec<InstrumentId>> {
        if self.instruments.is_empty() {
            return Err(Error::Config("universe lists no instruments".into()));
        }
        let mut seen = BTreeSet::new();
        let mut ids = Vec::with_capacity(self.instruments.len());
        for src in &self.instruments {
            let id = InstrumentId::new(src.symbol.clone())?;
            if !seen.insert(id.clone()) {
                return Err(Error::Config(format!("instrument {id} listed twice")));
            }
            src.source()?;
            ids.push(id);
        }
        Ok(ids)
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        match &self.base_dir {
            Some(base) if path.is_relative() => base.join(path),
            _ => path.to_path_buf(),
        }
    }
}

/// Loads every instrument (in parallel), returning series in config order.
/// Any series shorter than `min_length` is an error.
pub fn load_universe<T: Scalar>(config: &UniverseConfig, min_length: usize) -> Result<Vec<PriceSeries<T>>> {
    load_each(config, min_length)?.into_iter().collect()
}

/// Like [`load_universe`] but keeps each instrument's outcome separate, so a
/// caller can skip the ones that fail.
pub fn load_each<T: Scalar>(config: &UniverseConfig, min_length: usize) -> Result<Vec<Result<PriceSeries<T>>>> {
    let ids = config.validate()?;
    Ok(config
        .instruments
        .par_iter()
        .zip(ids.into_par_iter())
        .map(|(src, id)| {
            let loaded = match src.source()? {
                DataSource::Csv(path) => read_ohlcv_file(&config.resolve(&path), id.clone()),
                DataSource::Synthetic(spec) => generate_synthetic_series(&spec, id.clone()),
            };
            let series = loaded.map_err(|e| Error::for_instrument(id.as_str(), e))?;
            if series.len() < min_length {
                return Err(Error::for_instrument(
                    id.as_str(),
                    Error::InsufficientLength {
                        required: min_length,
                        actual: series.len(),
                    },
                ));
            }
            Ok(series)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::write_ohlcv_file;

    #[test]
    fn empty_universe_is_a_config_error() {
        let cfg = UniverseConfig::default();
        assert!(matches!(load_universe::<f64>(&cfg, 1), Err(Error::Config(_))));
    }

    #[test]
    fn source_must_be_exactly_one() {
        let src = InstrumentSource {
            symbol: "A".into(),
            csv: None,
            synthetic: None,
        };
        assert!(src.source().is_err());
    }

    #[test]
    fn mixed_sources_load_in_config_order() {
        let dir = tempfile::tempdir().unwrap();
        let spec = SyntheticSpec::random_walk(200, 5);
        let on_disk: PriceSeries<f64> =
            generate_synthetic_series(&spec, InstrumentId::new("DISK").unwrap()).unwrap();
        write_ohlcv_file(&dir.path().join("disk.csv"), &on_disk).unwrap();

        let cfg = UniverseConfig {
            instruments: vec![
                InstrumentSource::synthetic("S1", SyntheticSpec::persistent(150, 0.6, 1)),
                InstrumentSource::csv("DISK", "disk.csv"),
                InstrumentSource::synthetic("S2", SyntheticSpec::random_walk(180, 2)),
            ],
            base_dir: Some(dir.path().to_path_buf()),
        };
        let loaded: Vec<PriceSeries<f64>> = load_universe(&cfg, 100).unwrap();
        let symbols: Vec<&str> = loaded.iter().map(|s| s.instrument().as_str()).collect();
        assert_eq!(symbols, ["S1", "DISK", "S2"]);
        assert_eq!(loaded[1], on_disk);

        let err = load_universe::<f64>(&cfg, 190).unwrap_err();
        assert!(err.to_string().contains("S1"), "{err}");
    }

    #[test]
    fn missing_file_names_instrument() {
        let cfg = UniverseConfig {
            instruments: vec![InstrumentSource::csv("GONE", "/nonexistent/gone.csv")],
            base_dir: None,
        };
        let err = load_universe::<f64>(&cfg, 1).unwrap_err();
        assert!(err.to_string().contains("GONE"));
    }

    #[test]
    fn duplicate_symbols_rejected() {
        let cfg = UniverseConfig {
            instruments: vec![
                InstrumentSource::synthetic("A", SyntheticSpec::random_walk(200, 1)),
                InstrumentSource::synthetic("A", SyntheticSpec::random_walk(200, 2)),
            ],
            base_dir: None,
        };
        assert!(cfg.validate().is_err());
    }
}
