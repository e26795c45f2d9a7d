//! Command line front end. Exit codes: 0 success, 1 domain error, 2 usage error.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::driver::{build_grid, discretize, run, Discretized, ProblemSpec};
use crate::error::Error;
use crate::io::{
    default_out_dir, export_mesh, load_problem, read_report_jsonl, write_cascade_rows, write_moves_csv, write_run,
    write_strides_csv, Mesh, ReportLine,
};
use crate::projection::{erode, erode_carried, ff_cascade, CascadeConfig, CENTER_CANDIDATES};
use crate::simplicial::SimplicialSet;
use crate::skeleton::{admissible, optimize, repair, OptimizeConfig, Skeleton};

#[derive(Debug, Parser)]
#[command(name = "polyskel", version, about = "Measure minimization over polyhedral skeletons")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Problem file (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the seed of the problem file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory; defaults to $POLYSKEL_OUT_DIR or ./out.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Log filter, e.g. warn, info, polyskel=debug.
    #[arg(long, global = true, default_value = "warn")]
    pub log_level: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Grid construction and merging.
    #[command(subcommand)]
    Grid(GridCommand),
    /// Pushes the input set into the d-skeleton of the grid.
    Project(StrideArg),
    /// Projects the input set and keeps only fully covered d-faces.
    Erode(StrideArg),
    /// Optimizes a skeleton on a single grid.
    Optimize(StrideArg),
    /// Runs the minimizing sequence over the stride schedule.
    Minimize {
        /// Fail with exit code 1 unless the run converges.
        #[arg(long)]
        require_convergence: bool,
    },
    /// Checks grid, projection and optimizer invariants on the problem.
    Verify(StrideArg),
    /// Writes the final set of a JSON-lines report as OFF and its stride table as CSV.
    Export {
        /// Report written by `minimize`.
        report: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum GridCommand {
    /// Builds the background grid and exports its edges.
    Build(StrideArg),
    /// Merges rotated patches along the input set into the grid.
    Merge(StrideArg),
}

#[derive(Debug, Args)]
pub struct StrideArg {
    /// Grid stride; defaults to the schedule's initial stride.
    #[arg(long)]
    pub stride: Option<f64>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Domain(Error::Io(e))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let _ = env_logger::Builder::new().parse_filters(&cli.global.log_level).format_timestamp(None).try_init();
    let mut stdout = std::io::stdout().lock();
    match execute(&cli, &mut stdout) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            2
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn spec(g: &Global) -> CliResult<ProblemSpec> {
    let path = g.config.as_ref().ok_or_else(|| CliError::Usage("--config is required for this command".into()))?;
    Ok(load_problem(path, g.seed)?)
}

fn out_dir(g: &Global) -> CliResult<PathBuf> {
    let dir = g.out.clone().unwrap_or_else(default_out_dir);
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Grid at `stride` with the problem's constraints mapped onto it.
fn stage(spec: &ProblemSpec, stride: Option<f64>) -> CliResult<(Discretized, SimplicialSet, f64)> {
    let stride = stride.unwrap_or(spec.schedule.initial_stride);
    let input = spec.input_set()?;
    let (complex, patches, merge) = build_grid(spec, stride, (!input.is_empty()).then_some(&input))?;
    Ok((discretize(spec, complex, patches, merge)?, input, stride))
}

fn require_input(input: &SimplicialSet) -> CliResult<()> {
    if input.is_empty() {
        return Err(Error::Config("the problem has no input set to project".into()).into());
    }
    Ok(())
}

fn cascade_cfg(spec: &ProblemSpec) -> CascadeConfig {
    CascadeConfig { seed: spec.seed.value, candidates: CENTER_CANDIDATES }
}

/// Optimizes on one grid, starting from the eroded input when there is one.
fn optimize_once(spec: &ProblemSpec, disc: &Discretized, input: &SimplicialSet) -> CliResult<crate::skeleton::OptimizationOutcome> {
    let d = spec.domain.d;
    let cx = &disc.complex;
    let h = spec.density()?;
    let init = if input.is_empty() {
        Skeleton::new(d, vec![])
    } else {
        let casc = ff_cascade(cx, input, d, &cascade_cfg(spec))?;
        let er = erode_carried(cx, &casc.carried, d)?;
        let mut ids = er.skeleton.face_ids.clone();
        ids.extend(&er.lower);
        Skeleton::new(d, ids)
    };
    let init = repair(cx, &init.with_frozen(disc.frozen.clone()), &disc.oracle, &h, &disc.forbidden)?;
    let cfg = OptimizeConfig {
        exhaustive_cap: spec.schedule.exhaustive_cap,
        restarts: spec.schedule.restarts,
        seed: spec.seed.value,
        swap_cells: spec.schedule.swap_cells,
        forbidden: disc.forbidden.clone(),
        ..Default::default()
    };
    Ok(optimize(cx, &init, &disc.oracle, &h, &cfg)?)
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Grid(GridCommand::Build(a)) => {
            let spec = spec(g)?;
            let (disc, _, stride) = stage(&spec, a.stride)?;
            let cx = &disc.complex;
            let report = cx.validate();
            let path = out_dir(g)?.join("grid.off");
            export_mesh(&Mesh::from_complex(cx, 1), &path)?;
            writeln!(out, "stride {stride}: {} cells, face counts {:?}", cx.cells().len(), cx.counts())?;
            writeln!(out, "min rotondity {:.6}, max outer radius {:.6}", cx.stats.min_rotondity, cx.stats.max_outer_radius)?;
            writeln!(out, "valid {}, edges written to {}", report.passed(), path.display())?;
            if !report.passed() {
                return Err(Error::InvalidPolyhedron(format!("{} overlapping face pairs", report.face_violations.len())).into());
            }
        }
        Command::Grid(GridCommand::Merge(a)) => {
            let mut spec = spec(g)?;
            spec.input.oriented_patches = true;
            let (disc, input, stride) = stage(&spec, a.stride)?;
            require_input(&input)?;
            let path = out_dir(g)?.join("merged.off");
            export_mesh(&Mesh::from_complex(&disc.complex, 1), &path)?;
            writeln!(out, "stride {stride}: {} patches, {} cells", disc.patches, disc.complex.cells().len())?;
            match &disc.merge {
                Some(m) => writeln!(out, "{}", serde_json::to_string(m).map_err(|e| Error::Io(e.into()))?)?,
                None => writeln!(out, "no flat part long enough for a patch")?,
            }
            if disc.merge.as_ref().is_some_and(|m| !m.validity) {
                return Err(Error::Config("merged grid failed validation".into()).into());
            }
        }
        Command::Project(a) => {
            let spec = spec(g)?;
            let (disc, input, stride) = stage(&spec, a.stride)?;
            require_input(&input)?;
            let casc = ff_cascade(&disc.complex, &input, spec.domain.d, &cascade_cfg(&spec))?;
            let dir = out_dir(g)?;
            write_cascade_rows(create(&dir.join("cascade.csv"))?, [(0usize, casc.ledger.as_slice())])?;
            export_mesh(&Mesh::from_set(&casc.set), &dir.join("projected.off"))?;
            writeln!(out, "stride {stride}: measure {:.6} -> {:.6}", input.measure(), casc.set.measure())?;
            for l in &casc.ledger {
                writeln!(out, "level {}: {} faces, ratio {:.4}", l.level, l.faces, l.ratio)?;
            }
        }
        Command::Erode(a) => {
            let spec = spec(g)?;
            let (disc, input, stride) = stage(&spec, a.stride)?;
            require_input(&input)?;
            let cx = &disc.complex;
            let casc = ff_cascade(cx, &input, spec.domain.d, &cascade_cfg(&spec))?;
            let er = erode_carried(cx, &casc.carried, spec.domain.d)?;
            export_mesh(&Mesh::from_skeleton(cx, &er.skeleton), &out_dir(g)?.join("eroded.off"))?;
            writeln!(
                out,
                "stride {stride}: {} faces kept, {} collapsed, measure {:.6} -> {:.6}",
                er.skeleton.face_ids.len(),
                er.collapsed.len(),
                er.measure_before,
                er.measure_after
            )?;
        }
        Command::Optimize(a) => {
            let spec = spec(g)?;
            let (disc, input, stride) = stage(&spec, a.stride)?;
            let res = optimize_once(&spec, &disc, &input)?;
            let dir = out_dir(g)?;
            write_moves_csv(create(&dir.join("moves.csv"))?, &res.moves)?;
            export_mesh(&Mesh::from_skeleton(&disc.complex, &res.skeleton), &dir.join("skeleton.off"))?;
            writeln!(
                out,
                "stride {stride}: value {:.6}, certificate {:?}, {} free faces, {} accepted moves",
                res.value,
                res.certificate,
                res.free_faces,
                res.moves.iter().filter(|m| m.accepted).count()
            )?;
        }
        Command::Minimize { require_convergence } => {
            let spec = spec(g)?;
            let report = run(&spec)?;
            let files = write_run(&report, &out_dir(g)?)?;
            for s in &report.strides {
                writeln!(out, "stride {} ({}): J = {:.6}, {} cells, {:?}", s.index, s.stride, s.value, s.cells, s.certificate)?;
            }
            writeln!(out, "verdict {:?}, oracle holds {}, report {}", report.verdict, report.oracle_holds, files.report.display())?;
            if *require_convergence {
                report.into_result()?;
            }
        }
        Command::Verify(a) => {
            let spec = spec(g)?;
            let checks = verify(&spec, a.stride)?;
            let failed = checks.iter().filter(|c| !c.1).count();
            for (name, ok, detail) in &checks {
                writeln!(out, "{} {name}: {detail}", if *ok { "PASS" } else { "FAIL" })?;
            }
            if failed > 0 {
                return Err(Error::Config(format!("{failed} of {} checks failed", checks.len())).into());
            }
        }
        Command::Export { report } => {
            let lines = read_report_jsonl(BufReader::new(File::open(report)?))?;
            let mut strides = Vec::new();
            let mut summary = None;
            for l in lines {
                match l {
                    ReportLine::Stride(s) => strides.push(s),
                    ReportLine::Summary(s) => summary = Some(s),
                }
            }
            let summary = summary.ok_or_else(|| Error::Parse { line: strides.len() + 1, message: "report has no summary line".into() })?;
            let dir = out_dir(g)?;
            export_mesh(&Mesh::from_set(&summary.final_set), &dir.join("final.off"))?;
            write_strides_csv(create(&dir.join("strides.csv"))?, &strides)?;
            writeln!(out, "{} strides, final value {:.6}, written to {}", strides.len(), summary.final_value, dir.display())?;
        }
    }
    Ok(())
}

/// Named checks with a pass flag and a detail string.
fn verify(spec: &ProblemSpec, stride: Option<f64>) -> CliResult<Vec<(String, bool, String)>> {
    let d = spec.domain.d;
    let (disc, input, _) = stage(spec, stride)?;
    let cx = &disc.complex;
    let mut checks = Vec::new();
    let v = cx.validate();
    checks.push(("grid validity".to_string(), v.passed(), format!("{} overlapping pairs", v.face_violations.len())));
    let floor = if disc.patches == 0 { 1.0 / (spec.domain.n as f64).sqrt() - 1e-9 } else { 0.0 };
    checks.push((
        "rotondity".into(),
        cx.stats.min_rotondity > 0.0 && cx.stats.min_rotondity >= floor,
        format!("min {:.6}", cx.stats.min_rotondity),
    ));
    let mesh = Mesh::from_complex(cx, d);
    let back = Mesh::from_off(&mesh.to_off())?;
    checks.push(("mesh round trip".into(), back.face_set() == mesh.face_set(), format!("{} faces", mesh.faces.len())));
    if !input.is_empty() {
        let cfg = cascade_cfg(spec);
        let once = ff_cascade(cx, &input, d, &cfg)?;
        let twice = ff_cascade(cx, &once.set, d, &cfg)?;
        let (m1, m2) = (once.set.measure(), twice.set.measure());
        checks.push(("cascade idempotence".into(), (m1 - m2).abs() <= 1e-9 * m1.max(1.0), format!("{m1:.9} then {m2:.9}")));
        let er = erode_carried(cx, &once.carried, d)?;
        let again = erode(cx, &er.skeleton.to_set(cx), d)?;
        checks.push((
            "erosion fixed point".into(),
            again.skeleton == er.skeleton && er.measure_after <= er.measure_before + 1e-9,
            format!("{} faces", er.skeleton.face_ids.len()),
        ));
    }
    let res = optimize_once(spec, &disc, &input)?;
    let ok = admissible(cx, &res.skeleton, &disc.oracle)?;
    checks.push(("optimizer admissibility".into(), ok, format!("value {:.6}, {:?}", res.value, res.certificate)));
    Ok(checks)
}
