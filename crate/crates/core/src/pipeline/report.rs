use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::cycle::RunReport;
use crate::error::{Error, Result};
use crate::evaluation::{records_csv, EvaluationRecord};
use crate::meta::RecordStore;
use crate::scalar::Scalar;

pub const SELECTION_HEADER: &str = "rank,dataset,model,meta_score,vote,validation_backtest_pct,test_start,test_end,test_accuracy,test_backtest_return_pct,test_nnp_pct";

fn write(path: PathBuf, contents: &str) -> Result<PathBuf> {
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn opt<T: Scalar>(v: Option<T>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| x.to_string())
}

pub fn selection_csv<T: Scalar>(report: &RunReport<T>) -> String {
    let mut out = format!("{SELECTION_HEADER}\n");
    let Some(sel) = &report.selection else {
        return out;
    };
    for (rank, e) in sel.entries.iter().enumerate() {
        let pair = report
            .pair(e.instrument.as_str(), &e.model)
            .expect("selection entries come from the report's pairs");
        let t = &pair.test;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            rank + 1,
            e.instrument,
            e.model,
            e.meta_score,
            e.vote,
            e.backtest_return_pct,
            t.window.0,
            t.window.1,
            t.accuracy,
            t.backtest_return_pct,
            t.nnp_pct
        )
        .expect("write to String");
    }
    out
}

pub fn summary_text<T: Scalar>(report: &RunReport<T>) -> String {
    let s = &report.summary;
    let mut out = String::new();
    let mut kv = |k: &str, v: String| writeln!(out, "{k}: {v}").expect("write to String");
    kv("run_id", report.run_id.clone());
    kv("window", format!("{}/{}", s.window_index + 1, s.window_count));
    kv("instruments", s.instruments.to_string());
    kv("kinds", s.kinds.to_string());
    kv("pairs_ok", s.pairs_ok.to_string());
    kv("pairs_failed", s.pairs_failed.to_string());
    kv("store_records", s.store_records.to_string());
    kv("meta_history", s.meta_history.map_or("n/a".into(), |n| n.to_string()));
    if let Some(sel) = &report.selection {
        kv("selection_mode", sel.mode.name().to_string());
    }
    kv("traded_pairs", s.traded.to_string());
    kv("layer2_accuracy", opt(s.layer2_accuracy));
    kv("mean_system_accuracy", opt(s.mean_system_accuracy));
    kv("mean_selected_strategy_pct", opt(s.mean_selected_strategy_pct));
    kv("mean_selected_nnp_pct", opt(s.mean_selected_nnp_pct));
    if let Some(note) = &report.note {
        kv("note", note.clone());
    }
    for f in &report.failures {
        kv("failed_pair", format!("{} {}: {}", f.instrument, f.kind.name(), f.reason));
    }
    for sk in &report.skipped {
        kv("skipped_instrument", format!("{}: {}", sk.instrument, sk.reason));
    }
    out
}

/// Writes `records.csv`, `selection.csv`, one equity curve per traded pair
/// and `summary.txt` into `outdir`. Returns the written paths.
pub fn emit_reports<T: Scalar>(report: &RunReport<T>, outdir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(outdir).map_err(|e| Error::io(outdir, e))?;
    let mut written = vec![
        write(outdir.join("records.csv"), &records_csv(&report.records()))?,
        write(outdir.join("selection.csv"), &selection_csv(report))?,
    ];
    for s in &report.selected {
        let pair = report
            .pair(s.entry.instrument.as_str(), &s.entry.model)
            .expect("selected pair exists");
        let name = format!("equity_{}_{}.csv", s.entry.instrument.file_stem(), pair.model.kind().name());
        written.push(write(outdir.join(name), &s.test.equity.to_csv())?);
    }
    written.push(write(outdir.join("summary.txt"), &summary_text(report))?);
    Ok(written)
}

/// Each window goes to `outdir/window_NN`, plus a combined `summary.txt`.
pub fn emit_walk_forward<T: Scalar>(reports: &[RunReport<T>], outdir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut summary = String::from("window,run_id,pairs_ok,pairs_failed,meta_history,traded,layer2_accuracy,mean_system_accuracy,mean_selected_strategy_pct,mean_selected_nnp_pct\n");
    for r in reports {
        let s = &r.summary;
        written.extend(emit_reports(r, &outdir.join(format!("window_{:02}", s.window_index + 1)))?);
        writeln!(
            summary,
            "{},{},{},{},{},{},{},{},{},{}",
            s.window_index + 1,
            r.run_id,
            s.pairs_ok,
            s.pairs_failed,
            s.meta_history.map_or("n/a".into(), |n| n.to_string()),
            s.traded,
            opt(s.layer2_accuracy),
            opt(s.mean_system_accuracy),
            opt(s.mean_selected_strategy_pct),
            opt(s.mean_selected_nnp_pct)
        )
        .expect("write to String");
    }
    fs::create_dir_all(outdir).map_err(|e| Error::io(outdir, e))?;
    written.push(write(outdir.join("summary.txt"), &summary)?);
    Ok(written)
}

/// Re-emits `records.csv` for one stored run (the latest by default) and
/// returns the run ids found in the store, in order of first appearance.
pub fn report_from_store<T: Scalar>(
    store: &RecordStore,
    run_id: Option<&str>,
    outdir: &Path,
) -> Result<(Vec<String>, PathBuf)> {
    let all: Vec<EvaluationRecord<T>> = store.load()?;
    let mut runs: Vec<String> = Vec::new();
    for r in &all {
        if !runs.contains(&r.run_id) {
            runs.push(r.run_id.clone());
        }
    }
    let wanted = match run_id {
        Some(id) if runs.iter().any(|r| r == id) => id.to_string(),
        Some(id) => return Err(Error::Config(format!("run {id} is not in {}", store.path().display()))),
        None => runs
            .last()
            .cloned()
            .ok_or_else(|| Error::Config(format!("{} holds no records", store.path().display())))?,
    };
    let chosen: Vec<EvaluationRecord<T>> = all.into_iter().filter(|r| r.run_id == wanted).collect();
    fs::create_dir_all(outdir).map_err(|e| Error::io(outdir, e))?;
    let path = write(outdir.join("records.csv"), &records_csv(&chosen))?;
    Ok((runs, path))
}
