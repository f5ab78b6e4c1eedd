use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::data::InstrumentId;
use crate::error::{Error, Result};
use crate::evaluation::EvaluationRecord;
use crate::scalar::Scalar;

use super::MetaModel;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    BestSingle,
    #[default]
    ProfitableList,
}

impl std::str::FromStr for SelectionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "best_single" | "best" => Ok(SelectionMode::BestSingle),
            "profitable_list" | "list" => Ok(SelectionMode::ProfitableList),
            _ => Err(Error::Config(format!("unknown selection mode {s:?}"))),
        }
    }
}

impl SelectionMode {
    pub fn name(self) -> &'static str {
        match self {
            SelectionMode::BestSingle => "best_single",
            SelectionMode::ProfitableList => "profitable_list",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelectionEntry<T> {
    pub instrument: InstrumentId,
    pub model: String,
    pub meta_score: T,
    pub vote: u8,
    /// Validation backtest return, kept for tie-breaking and reporting.
    pub backtest_return_pct: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairSelection<T> {
    pub mode: SelectionMode,
    pub entries: Vec<SelectionEntry<T>>,
}

impl<T: Scalar> PairSelection<T> {
    /// Entries the meta model voted profitable. A best-single entry with a
    /// 0 vote is reported but not traded.
    pub fn traded(&self) -> impl Iterator<Item = &SelectionEntry<T>> {
        self.entries.iter().filter(|e| e.vote == 1)
    }

    pub fn is_no_trade(&self) -> bool {
        self.traded().next().is_none()
    }
}

/// Higher score first, then higher backtest, then instrument and model ids.
fn rank<T: Scalar>(a: &SelectionEntry<T>, b: &SelectionEntry<T>) -> Ordering {
    b.meta_score
        .partial_cmp(&a.meta_score)
        .unwrap_or(Ordering::Equal)
        .then_with(|| {
            b.backtest_return_pct
                .partial_cmp(&a.backtest_return_pct)
                .unwrap_or(Ordering::Equal)
        })
        .then_with(|| a.instrument.cmp(&b.instrument))
        .then_with(|| a.model.cmp(&b.model))
}

pub fn select_pairs<T: Scalar>(
    meta: &MetaModel<T>,
    current: &[EvaluationRecord<T>],
    mode: SelectionMode,
) -> Result<PairSelection<T>> {
    if current.is_empty() {
        return Err(Error::InsufficientLength {
            required: 1,
            actual: 0,
        });
    }
    let mut scored = current
        .iter()
        .map(|r| {
            let f = r.metrics.meta_features();
            Ok(SelectionEntry {
                instrument: r.instrument.clone(),
                model: r.model.clone(),
                meta_score: meta.score(&f)?,
                vote: meta.predict(&f)?,
                backtest_return_pct: r.metrics.backtest_return_pct,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    scored.sort_by(rank);
    let entries = match mode {
        SelectionMode::BestSingle => {
            scored.truncate(1);
            scored
        }
        SelectionMode::ProfitableList => scored.into_iter().filter(|e| e.vote == 1).collect(),
    };
    Ok(PairSelection { mode, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_parsing() {
        assert_eq!("best-single".parse::<SelectionMode>().unwrap(), SelectionMode::BestSingle);
        assert_eq!("Profitable_List".parse::<SelectionMode>().unwrap(), SelectionMode::ProfitableList);
        assert!("top".parse::<SelectionMode>().is_err());
    }

    #[test]
    fn rank_tie_breaks() {
        let e = |sym: &str, model: &str, s: f64, bt: f64| SelectionEntry {
            instrument: InstrumentId::new(sym).unwrap(),
            model: model.into(),
            meta_score: s,
            vote: 1,
            backtest_return_pct: bt,
        };
        let mut v = [
            e("B", "m", 0.7, 1.0),
            e("A", "m", 0.7, 1.0),
            e("C", "m", 0.7, 3.0),
            e("A", "a", 0.7, 1.0),
            e("Z", "m", 0.9, -5.0),
        ];
        v.sort_by(rank);
        let order: Vec<String> = v.iter().map(|x| format!("{}/{}", x.instrument, x.model)).collect();
        assert_eq!(order, ["Z/m", "C/m", "A/a", "A/m", "B/m"]);
    }
}
