//! Orchestration: train the zoo on every instrument, score the pairs, update
//! the record store, let the meta layer pick pairs and replay them on the
//! held-out test segment.

mod config;
mod cycle;
mod report;

pub use config::{PipelineSettings, RunConfig, DEFAULT_STORE_NAME};
pub use cycle::{
    predict_next, prepare_universe, run_training_cycle, run_window, walk_forward, window_split, NextDayCall,
    PairFailure, PairOutcome, PreparedInstrument, RunReport, RunSummary, SelectedPair, SkippedInstrument,
    TestOutcome,
};
pub use report::{emit_reports, emit_walk_forward, report_from_store, selection_csv, summary_text, SELECTION_HEADER};
