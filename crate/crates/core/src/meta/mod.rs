//! The second layer: a persisted history of evaluation records, a voting
//! classifier over their metric vectors, and pair selection.

mod model;
mod selection;
mod store;

pub use model::{
    mean_system_accuracy, train_meta, train_meta_with, MetaDataset, MetaModel, DEFAULT_MIN_META_RECORDS,
    DEFAULT_VOTERS,
};
pub use selection::{select_pairs, PairSelection, SelectionEntry, SelectionMode};
pub use store::{store_header, RecordStore};
