//! Binned property keys, performance logs and the key-value store.

pub mod binning;
pub mod index;
pub mod log;
pub mod table;

pub use binning::{bin_profile, bin_value, Dimension, PropertyVector};
pub use index::{summarize, Bag, ModelSummary, Store};
pub use log::{ingest_log, parse_log, write_log, LogEntry, PerfRecord};
pub use table::{aggregate_store_table, aggregate_table, CellStats, PropertyTable};
