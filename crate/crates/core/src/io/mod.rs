//! Configuration files, mesh export and run outputs.

mod config;
mod mesh;
mod report;

pub use config::{default_out_dir, load_problem, OUT_DIR_ENV};
pub use mesh::{export_mesh, import_mesh, Mesh};
pub use report::{
    read_report_jsonl, write_cascade_csv, write_cascade_rows, write_moves_csv, write_report_jsonl, write_run, write_strides_csv,
    ReportLine, RunFiles, RunSummary, CASCADE_HEADER, MOVES_HEADER, STRIDES_HEADER,
};
