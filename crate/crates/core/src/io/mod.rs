//! Configuration files, result tables and graph snapshots.

pub mod config;
pub mod graph;
pub mod results;

pub use config::{load_config, ConfigKind, LoadedConfig, ModelConfig};
pub use graph::{export_dot, export_edge_list, parse_dot, parse_edge_list};
pub use results::{write_results, Format, ResultTable};
