//! Run outputs: CSV ledgers with a versioned header comment, and the run
//! report as JSON lines.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::driver::{RunReport, StrideRecord, Verdict};
use crate::error::{Error, Result};
use crate::measure::LscReport;
use crate::projection::LevelRecord;
use crate::simplicial::SimplicialSet;
use crate::skeleton::{MoveRecord, QuasiReport, Skeleton};

use super::mesh::{export_mesh, Mesh};

pub const CASCADE_HEADER: &str = "# polyskel cascade ledger v1";
pub const MOVES_HEADER: &str = "# polyskel move log v1";
pub const STRIDES_HEADER: &str = "# polyskel stride summary v1";

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        other => Error::Config(format!("csv: {other:?}")),
    }
}

fn with_header<W: Write>(mut out: W, header: &str) -> Result<csv::Writer<W>> {
    writeln!(out, "{header}")?;
    Ok(csv::Writer::from_writer(out))
}

#[derive(Serialize)]
struct CascadeRow {
    stride: usize,
    level: usize,
    measure_before: f64,
    measure_after: f64,
    ratio: f64,
}

/// Cascade ledger of every stride: `stride,level,measure_before,measure_after,ratio`.
pub fn write_cascade_csv<W: Write>(out: W, strides: &[StrideRecord]) -> Result<()> {
    write_cascade_rows(out, strides.iter().map(|s| (s.index, s.cascade.as_slice())))
}

pub fn write_cascade_rows<'a, W: Write>(out: W, rows: impl IntoIterator<Item = (usize, &'a [LevelRecord])>) -> Result<()> {
    let mut w = with_header(out, CASCADE_HEADER)?;
    for (stride, levels) in rows {
        for l in levels {
            w.serialize(CascadeRow {
                stride,
                level: l.level,
                measure_before: l.measure_before,
                measure_after: l.measure_after,
                ratio: l.ratio,
            })
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct MoveRow {
    iter: usize,
    #[serde(rename = "move")]
    kind: String,
    face: usize,
    delta: f64,
    accepted: bool,
}

/// Move log: `iter,move,face,delta,accepted`.
pub fn write_moves_csv<W: Write>(out: W, moves: &[MoveRecord]) -> Result<()> {
    let mut w = with_header(out, MOVES_HEADER)?;
    for m in moves {
        w.serialize(MoveRow { iter: m.iter, kind: m.kind.to_string(), face: m.face, delta: m.delta, accepted: m.accepted })
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct StrideRow {
    index: usize,
    stride: f64,
    cells: usize,
    value: f64,
    delta_value: Option<f64>,
    max_window_distance: Option<f64>,
    certificate: String,
    accepted_moves: usize,
    patches: usize,
}

/// One row per stride: `index,stride,cells,value,delta_value,max_window_distance,certificate,accepted_moves,patches`.
pub fn write_strides_csv<W: Write>(out: W, strides: &[StrideRecord]) -> Result<()> {
    let mut w = with_header(out, STRIDES_HEADER)?;
    for s in strides {
        w.serialize(StrideRow {
            index: s.index,
            stride: s.stride,
            cells: s.cells,
            value: s.value,
            delta_value: s.delta_value,
            max_window_distance: s.window_distances.iter().copied().reduce(f64::max),
            certificate: format!("{:?}", s.certificate).to_lowercase(),
            accepted_moves: s.accepted_moves,
            patches: s.patches,
        })
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Closing line of a JSON-lines report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub verdict: Verdict,
    pub converged_at: Option<usize>,
    pub final_value: f64,
    pub oracle_holds: bool,
    pub cores_from_previous_stride: bool,
    pub lsc: Option<LscReport>,
    pub quasi: Option<QuasiReport>,
    pub final_skeleton: Skeleton,
    pub final_set: SimplicialSet,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReportLine {
    Stride(StrideRecord),
    Summary(RunSummary),
}

/// One line per stride, then the summary.
pub fn write_report_jsonl<W: Write>(mut out: W, report: &RunReport) -> Result<()> {
    let to_io = |e: serde_json::Error| Error::Io(e.into());
    for s in &report.strides {
        serde_json::to_writer(&mut out, &ReportLine::Stride(s.clone())).map_err(to_io)?;
        out.write_all(b"\n")?;
    }
    let summary = RunSummary {
        seed: report.seed,
        verdict: report.verdict,
        converged_at: report.converged_at,
        final_value: report.final_value,
        oracle_holds: report.oracle_holds,
        cores_from_previous_stride: report.cores_from_previous_stride,
        lsc: report.lsc.clone(),
        quasi: report.quasi.clone(),
        final_skeleton: report.final_skeleton.clone(),
        final_set: report.final_set.clone(),
    };
    serde_json::to_writer(&mut out, &ReportLine::Summary(summary)).map_err(to_io)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn read_report_jsonl<R: BufRead>(input: R) -> Result<Vec<ReportLine>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?);
    }
    Ok(out)
}

/// Paths written by [`write_run`].
#[derive(Clone, Debug)]
pub struct RunFiles {
    pub report: PathBuf,
    pub strides: PathBuf,
    pub cascade: PathBuf,
    pub moves: PathBuf,
    pub mesh: PathBuf,
}

/// Writes every artifact of a run into `dir`, creating it if needed.
pub fn write_run(report: &RunReport, dir: &Path) -> Result<RunFiles> {
    std::fs::create_dir_all(dir)?;
    let files = RunFiles {
        report: dir.join("report.jsonl"),
        strides: dir.join("strides.csv"),
        cascade: dir.join("cascade.csv"),
        moves: dir.join("moves.csv"),
        mesh: dir.join("final.off"),
    };
    let create = |p: &Path| -> Result<std::io::BufWriter<std::fs::File>> { Ok(std::io::BufWriter::new(std::fs::File::create(p)?)) };
    write_report_jsonl(create(&files.report)?, report)?;
    write_strides_csv(create(&files.strides)?, &report.strides)?;
    write_cascade_csv(create(&files.cascade)?, &report.strides)?;
    write_moves_csv(create(&files.moves)?, &report.moves)?;
    export_mesh(&Mesh::from_set(&report.final_set), &files.mesh)?;
    Ok(files)
}
