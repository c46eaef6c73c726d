//! The `sortref` command line.
//!
//! Exit codes: 0 success or feasible, 1 infeasible, 2 unknown (time limit),
//! 64 usage, 65 bad input data, 66 unreadable input, 70 evaluation limits,
//! 74 output errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sortref_core::eval::EvalError;
use sortref_core::ilp::{add_symmetry_breaking, build_model_with, write_lp, DEFAULT_EXPONENT_CAP, DEFAULT_SIZE_CAP};
use sortref_core::refine::{
    build_coloring_gadget, decide_3colorable_via_refinement, search_highest_theta, search_lowest_k, Direction, Outcome,
    Probe, GADGET_NS,
};
use sortref_core::view::build_view_reporting;
use sortref_core::{
    build_count_table, builtin_rule, gadget_rule_r0, parse_rule, sigma_fast, solve_native, Builtin, CountTable, Rule,
    SolveOptions, SolveOutcome, StructureView, Threshold,
};

use crate::cache::{load_view, save_view};
use crate::deptable::{dependency_table, resolve_property};
use crate::graph::parse_graph;
use crate::ntriples::{parse_ntriples, write_ntriples};
use crate::render::{render_pgm, render_svg, Scale};
use crate::report::{best_probe, json_lines, mode_label, refinement_dump, summary};
use crate::timer::{WallDeadline, WallTimer};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;
pub const EXIT_SOFTWARE: i32 = 70;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Parser)]
#[command(name = "sortref", version, about = "Structuredness profiling and sort refinement for RDF data")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// N-Triples input file (`-` for stdin).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Signature cache to read instead of `--input`.
    #[arg(long, global = true)]
    pub view: Option<PathBuf>,
    /// Keep only subjects typed with this IRI.
    #[arg(long, global = true, value_name = "IRI")]
    pub sort: Option<String>,
    /// Rule file; may be repeated for `profile`.
    #[arg(long = "rule-file", global = true)]
    pub rule_file: Vec<PathBuf>,
    /// cov, sim, dep:P1,P2, symdep:P1,P2 or depdisj:P1,P2; may be repeated.
    #[arg(long, global = true)]
    pub builtin: Vec<String>,
    /// Number of sorts.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Threshold, as `a/b` or a decimal with at most 6 places.
    #[arg(long, global = true)]
    pub theta: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Mode::HighestTheta)]
    pub mode: Mode,
    #[arg(long, global = true, value_enum, default_value_t = DirectionArg::Up)]
    pub direction: DirectionArg,
    /// Seconds per solver call.
    #[arg(long = "time-limit", global = true)]
    pub time_limit: Option<f64>,
    /// Output file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Skip hash symmetry breaking.
    #[arg(long = "no-symmetry", global = true)]
    pub no_symmetry: bool,
    #[arg(long = "exponent-cap", global = true, default_value_t = DEFAULT_EXPONENT_CAP)]
    pub exponent_cap: u32,
    /// Include wall times in reports.
    #[arg(long, global = true)]
    pub timings: bool,
    /// Threshold increment of the highest-theta sweep.
    #[arg(long, global = true, default_value = "1/100")]
    pub step: String,
    /// text or json for `refine`; pgm or svg for `render`.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, value_enum, default_value_t = ScaleArg::Linear)]
    pub scale: ScaleArg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print subject, property and signature counts and rule values.
    Profile,
    /// Dependency values between properties and the symmetric ranking.
    DepTable {
        /// Property IRIs or unique local names.
        properties: Vec<String>,
        /// Use every property of the view.
        #[arg(long = "all-pairs")]
        all_pairs: bool,
    },
    /// Search for a sort refinement.
    Refine,
    /// Write the 0-1 program for `--k` and `--theta` in LP format.
    ExportLp,
    /// Draw the signature-grouped matrix.
    Render {
        /// One image per sort of a refinement with `--k` and `--theta`.
        #[arg(long = "per-sort")]
        per_sort: bool,
    },
    /// Build the 3-colouring gadget dataset of a graph file.
    Gadget {
        graph: PathBuf,
        /// Where to write the gadget rule.
        #[arg(long = "rule-out")]
        rule_out: Option<PathBuf>,
        /// Also decide 3-colourability through refinement.
        #[arg(long)]
        decide: bool,
    },
    /// Save or inspect a signature cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum CacheAction {
    /// Build the view from `--input` and write it to `--out`.
    Save,
    /// Load a cache and print its counts.
    Load { file: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    HighestTheta,
    LowestK,
    /// One solve with `--k` and `--theta`.
    Decide,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Pgm,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScaleArg {
    Linear,
    Log,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub msg: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, msg: msg.into() }
    }
    fn data(msg: impl ToString) -> Self {
        CliError { code: EXIT_DATA, msg: msg.to_string() }
    }
    fn no_input(path: &Path, e: io::Error) -> Self {
        CliError { code: EXIT_NO_INPUT, msg: format!("{}: {e}", path.display()) }
    }
    fn io(e: io::Error) -> Self {
        CliError { code: EXIT_IO, msg: e.to_string() }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError { code: EXIT_SOFTWARE, msg: e.to_string() }
    }
}

type Res<T> = Result<T, CliError>;

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{text}");
                EXIT_OK
            } else {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            };
        }
    };
    let mut io = Io { out, err };
    match dispatch(&cli, &mut io) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.err, "error: {}", e.msg);
            e.code
        }
    }
}

fn dispatch(cli: &Cli, io: &mut Io) -> Res<i32> {
    let g = &cli.global;
    match &cli.command {
        Command::Profile => cmd_profile(g, io),
        Command::DepTable { properties, all_pairs } => cmd_dep_table(g, properties, *all_pairs, io),
        Command::Refine => cmd_refine(g, io),
        Command::ExportLp => cmd_export_lp(g, io),
        Command::Render { per_sort } => cmd_render(g, *per_sort, io),
        Command::Gadget { graph, rule_out, decide } => cmd_gadget(g, graph, rule_out.as_deref(), *decide, io),
        Command::Cache { action } => cmd_cache(g, action, io),
    }
}

fn open(path: &Path) -> Res<Box<dyn io::BufRead>> {
    if path.as_os_str() == "-" {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let f = File::open(path).map_err(|e| CliError::no_input(path, e))?;
    Ok(Box::new(BufReader::new(f)))
}

fn read_to_string(path: &Path) -> Res<String> {
    let mut s = String::new();
    open(path)?.read_to_string(&mut s).map_err(|e| CliError::no_input(path, e))?;
    Ok(s)
}

fn strip_brackets(iri: &str) -> &str {
    iri.strip_prefix('<').and_then(|s| s.strip_suffix('>')).unwrap_or(iri)
}

fn load(g: &Global, io: &mut Io) -> Res<StructureView> {
    if let Some(path) = &g.view {
        if g.input.is_some() || g.sort.is_some() {
            return Err(CliError::usage("--view cannot be combined with --input or --sort"));
        }
        return load_view(open(path)?).map_err(|e| CliError::data(format!("{}: {e}", path.display())));
    }
    let path = g.input.as_ref().ok_or_else(|| CliError::usage("missing --input (or --view)"))?;
    let mut d = parse_ntriples(open(path)?).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    if let Some(sort) = &g.sort {
        d = d.filter_by_sort(strip_brackets(sort));
    }
    let (view, skipped) = build_view_reporting(&d).map_err(CliError::data)?;
    for s in skipped {
        let _ = writeln!(io.err, "warning: skipped subject {s}: it has only type triples");
    }
    Ok(view)
}

fn parse_theta(s: &str) -> Res<Threshold> {
    Threshold::from_str(s).map_err(|e| CliError::usage(format!("bad threshold `{s}`: {e}")))
}

fn theta(g: &Global) -> Res<Threshold> {
    parse_theta(g.theta.as_deref().ok_or_else(|| CliError::usage("missing --theta"))?)
}

fn k(g: &Global) -> Res<usize> {
    match g.k {
        None => Err(CliError::usage("missing --k")),
        Some(0) => Err(CliError::usage("--k must be at least 1")),
        Some(k) => Ok(k),
    }
}

fn timer(g: &Global) -> Res<WallTimer> {
    let limit = match g.time_limit {
        None => None,
        Some(s) if s.is_finite() && s >= 0.0 => Some(Duration::from_secs_f64(s)),
        Some(s) => return Err(CliError::usage(format!("bad --time-limit {s}"))),
    };
    Ok(WallTimer { limit })
}

fn solve_options(g: &Global) -> SolveOptions {
    SolveOptions { symmetry: !g.no_symmetry, exponent_cap: g.exponent_cap }
}

fn parse_builtin(view: &StructureView, spec: &str) -> Res<Rule> {
    let (kind, args) = spec.split_once(':').unwrap_or((spec, ""));
    let pair = || -> Res<(String, String)> {
        let (a, b) = args
            .split_once(',')
            .ok_or_else(|| CliError::usage(format!("`{spec}` needs two properties: {kind}:P1,P2")))?;
        let r = |p: &str| resolve_property(view, p).map_err(|e| CliError::usage(e.to_string()));
        Ok((r(a)?, r(b)?))
    };
    let b = match kind {
        "cov" if args.is_empty() => Builtin::Cov,
        "sim" if args.is_empty() => Builtin::Sim,
        "dep" => pair().map(|(a, b)| Builtin::Dep(a, b))?,
        "symdep" => pair().map(|(a, b)| Builtin::SymDep(a, b))?,
        "depdisj" => pair().map(|(a, b)| Builtin::DepDisj(a, b))?,
        _ => return Err(CliError::usage(format!("unknown builtin `{spec}`"))),
    };
    builtin_rule(&b).map_err(|e| CliError::usage(e.to_string()))
}

/// All requested rules with their report labels, in command-line order
/// (builtins first).
fn rules(g: &Global, view: &StructureView) -> Res<Vec<(String, Rule)>> {
    let mut out = Vec::new();
    for spec in &g.builtin {
        out.push((spec.clone(), parse_builtin(view, spec)?));
    }
    for path in &g.rule_file {
        let text = read_to_string(path)?;
        let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "rule".into());
        let rule = parse_rule(&text).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        out.push((label.clone(), rule.with_name(label)));
    }
    Ok(out)
}

/// The single rule of a solver command; coverage when none is given.
fn single_rule(g: &Global, view: &StructureView) -> Res<(String, Rule)> {
    let mut all = rules(g, view)?;
    match all.len() {
        0 => Ok(("cov".into(), builtin_rule(&Builtin::Cov).expect("cov"))),
        1 => Ok(all.pop().unwrap()),
        _ => Err(CliError::usage("this command takes a single rule")),
    }
}

/// Writes to `--out` when given, otherwise to stdout.
fn emit(g: &Global, io: &mut Io, text: &str) -> Res<()> {
    match &g.out {
        Some(path) => write_file(path, text.as_bytes()),
        None => io.out.write_all(text.as_bytes()).map_err(CliError::io),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Res<()> {
    std::fs::write(path, bytes).map_err(|e| CliError { code: EXIT_IO, msg: format!("{}: {e}", path.display()) })
}

fn cmd_profile(g: &Global, io: &mut Io) -> Res<i32> {
    let view = load(g, io)?;
    let mut rules = rules(g, &view)?;
    if rules.is_empty() {
        for b in [Builtin::Cov, Builtin::Sim] {
            rules.push((b.label().into(), builtin_rule(&b).expect("builtin")));
        }
    }
    let mut text = format!(
        "subjects={}\nproperties={}\nsignatures={}\n",
        view.total_subjects(),
        view.property_count(),
        view.signature_count()
    );
    for (label, rule) in &rules {
        text.push_str(&format!("{label}={}\n", sigma_fast(&view, rule)?));
    }
    emit(g, io, &text)?;
    Ok(EXIT_OK)
}

fn cmd_dep_table(g: &Global, names: &[String], all_pairs: bool, io: &mut Io) -> Res<i32> {
    let view = load(g, io)?;
    let props = match (all_pairs, names.is_empty()) {
        (true, true) => view.properties().to_vec(),
        (true, false) => return Err(CliError::usage("--all-pairs takes no property list")),
        (false, true) => return Err(CliError::usage("list the properties or pass --all-pairs")),
        (false, false) => names
            .iter()
            .map(|n| resolve_property(&view, n).map_err(|e| CliError::usage(e.to_string())))
            .collect::<Res<Vec<_>>>()?,
    };
    let table = dependency_table(&view, props).map_err(|e| CliError::usage(e.to_string()))?;
    emit(g, io, &table.to_text())?;
    Ok(EXIT_OK)
}

fn report_format(g: &Global) -> Res<Format> {
    match g.format.unwrap_or(Format::Text) {
        f @ (Format::Text | Format::Json) => Ok(f),
        f => Err(CliError::usage(format!("--format {f:?} does not apply to this command").to_lowercase())),
    }
}

fn count_table(view: &StructureView, rule: &Rule) -> Res<CountTable> {
    Ok(build_count_table(view, rule)?)
}

fn probe_exit(probes: &[Probe]) -> i32 {
    if best_probe(probes).is_some() {
        EXIT_OK
    } else if probes.last().is_some_and(|p| p.outcome == Outcome::Unknown) {
        EXIT_UNKNOWN
    } else {
        EXIT_INFEASIBLE
    }
}

fn cmd_refine(g: &Global, io: &mut Io) -> Res<i32> {
    let format = report_format(g)?;
    let view = load(g, io)?;
    let (_, rule) = single_rule(g, &view)?;
    let timer = timer(g)?;
    let opts = solve_options(g);
    let (mode, probes) = match g.mode {
        Mode::HighestTheta => {
            let k = k(g)?;
            let step = parse_theta(&g.step)?;
            let table = count_table(&view, &rule)?;
            let r = search_highest_theta(&view, &table, k, step.value(), opts, &timer)
                .map_err(|e| CliError::usage(e.to_string()))?;
            (mode_label(r.mode), r.probes)
        }
        Mode::LowestK => {
            let theta = theta(g)?;
            let table = count_table(&view, &rule)?;
            let direction = match g.direction {
                DirectionArg::Up => Direction::Up,
                DirectionArg::Down => Direction::Down,
            };
            let r = search_lowest_k(&view, &table, &theta, direction, opts, &timer);
            (mode_label(r.mode), r.probes)
        }
        Mode::Decide => {
            let (k, theta) = (k(g)?, theta(g)?);
            let table = count_table(&view, &rule)?;
            let d = WallDeadline::new(timer.limit);
            let started = std::time::Instant::now();
            let (outcome, refinement) = match solve_native(&view, &table, k, &theta, opts, &d) {
                SolveOutcome::Feasible { refinement, .. } => (Outcome::Feasible, Some(refinement)),
                SolveOutcome::Infeasible => (Outcome::Infeasible, None),
                SolveOutcome::Unknown => (Outcome::Unknown, None),
            };
            let p = Probe { k, theta, outcome, elapsed: Some(started.elapsed()), refinement };
            ("decide", vec![p])
        }
    };
    let text = match format {
        Format::Json => json_lines(&view, mode, &probes, g.timings),
        _ => summary(&view, mode, &probes, g.timings),
    };
    io.out.write_all(text.as_bytes()).map_err(CliError::io)?;
    if let (Some(path), Some(best)) = (&g.out, best_probe(&probes)) {
        let dump = refinement_dump(&view, best.refinement.as_ref().expect("feasible"));
        write_file(path, dump.as_bytes())?;
    }
    Ok(probe_exit(&probes))
}

fn cmd_export_lp(g: &Global, io: &mut Io) -> Res<i32> {
    let view = load(g, io)?;
    let (label, rule) = single_rule(g, &view)?;
    let (k, theta) = (k(g)?, theta(g)?);
    let table = count_table(&view, &rule)?;
    let mut model = build_model_with(&view, &table, k, &theta, DEFAULT_SIZE_CAP, &label)
        .map_err(|e| CliError { code: EXIT_SOFTWARE, msg: e.to_string() })?;
    if !g.no_symmetry {
        model = add_symmetry_breaking(model, g.exponent_cap);
    }
    let mut lp = String::new();
    write_lp(&model, &mut lp).expect("writing to a string");
    let counts = format!(
        "variables={} binary={} constraints={}\n",
        model.var_count(),
        model.var_count(),
        model.constraints().len()
    );
    match &g.out {
        Some(path) => {
            write_file(path, lp.as_bytes())?;
            io.out.write_all(counts.as_bytes()).map_err(CliError::io)?;
        }
        None => {
            io.out.write_all(lp.as_bytes()).map_err(CliError::io)?;
            let _ = io.err.write_all(counts.as_bytes());
        }
    }
    Ok(EXIT_OK)
}

fn image(view: &StructureView, sets: &[usize], format: Format, scale: Scale) -> String {
    match format {
        Format::Svg => render_svg(view, sets, scale),
        _ => render_pgm(view, sets, scale),
    }
}

/// `dir/name.ext` becomes `dir/name-sort<i>.ext`.
pub fn per_sort_path(base: &Path, i: usize, ext: &str) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "matrix".into());
    base.with_file_name(format!("{stem}-sort{i}.{ext}"))
}

fn cmd_render(g: &Global, per_sort: bool, io: &mut Io) -> Res<i32> {
    let format = match g.format.unwrap_or(Format::Pgm) {
        f @ (Format::Pgm | Format::Svg) => f,
        _ => return Err(CliError::usage("render writes pgm or svg")),
    };
    let ext = if format == Format::Svg { "svg" } else { "pgm" };
    let scale = match g.scale {
        ScaleArg::Linear => Scale::Linear,
        ScaleArg::Log => Scale::Log,
    };
    let view = load(g, io)?;
    if !per_sort {
        let all: Vec<usize> = (0..view.signature_count()).collect();
        emit(g, io, &image(&view, &all, format, scale))?;
        return Ok(EXIT_OK);
    }
    let base = g.out.as_ref().ok_or_else(|| CliError::usage("--per-sort needs --out"))?;
    let (_, rule) = single_rule(g, &view)?;
    let (k, theta) = (k(g)?, theta(g)?);
    let table = count_table(&view, &rule)?;
    let d = WallDeadline::new(timer(g)?.limit);
    match solve_native(&view, &table, k, &theta, solve_options(g), &d) {
        SolveOutcome::Feasible { refinement, .. } => {
            for (i, sort) in refinement.sorts.iter().enumerate() {
                let path = per_sort_path(base, i + 1, ext);
                write_file(&path, image(&view, &sort.signatures, format, scale).as_bytes())?;
                writeln!(io.out, "{}", path.display()).map_err(CliError::io)?;
            }
            Ok(EXIT_OK)
        }
        SolveOutcome::Infeasible => {
            let _ = writeln!(io.err, "no refinement with k={k} theta={theta}");
            Ok(EXIT_INFEASIBLE)
        }
        SolveOutcome::Unknown => {
            let _ = writeln!(io.err, "time limit reached");
            Ok(EXIT_UNKNOWN)
        }
    }
}

fn cmd_gadget(g: &Global, graph: &Path, rule_out: Option<&Path>, decide: bool, io: &mut Io) -> Res<i32> {
    let graph_data = parse_graph(open(graph)?).map_err(|e| CliError::data(format!("{}: {e}", graph.display())))?;
    let d = build_coloring_gadget(&graph_data);
    let mut nt = Vec::new();
    write_ntriples(&d, &mut nt).map_err(CliError::io)?;
    emit(g, io, std::str::from_utf8(&nt).expect("utf-8"))?;
    let rule_path = rule_out.map(Path::to_path_buf).or_else(|| g.out.as_ref().map(|p| p.with_extension("rule")));
    if let Some(path) = rule_path {
        let text = format!("# 3-colouring gadget rule\n{}\n", gadget_rule_r0(GADGET_NS));
        write_file(&path, text.as_bytes())?;
    }
    let _ = writeln!(io.err, "subjects={} nodes={}", d.subject_count(), graph_data.node_count());
    if !decide {
        return Ok(EXIT_OK);
    }
    let deadline = WallDeadline::new(timer(g)?.limit);
    let answer = decide_3colorable_via_refinement(&graph_data, solve_options(g), &deadline)?;
    let (label, code) = match answer {
        Some(true) => ("feasible", EXIT_OK),
        Some(false) => ("infeasible", EXIT_INFEASIBLE),
        None => ("unknown", EXIT_UNKNOWN),
    };
    let _ = writeln!(io.err, "decide={label}");
    Ok(code)
}

fn cmd_cache(g: &Global, action: &CacheAction, io: &mut Io) -> Res<i32> {
    let view = match action {
        CacheAction::Save => load(g, io)?,
        CacheAction::Load { file } => {
            load_view(open(file)?).map_err(|e| CliError::data(format!("{}: {e}", file.display())))?
        }
    };
    let mut buf = Vec::new();
    save_view(&view, &mut buf).map_err(CliError::io)?;
    match (action, &g.out) {
        (_, Some(path)) => write_file(path, &buf)?,
        (CacheAction::Save, None) => io.out.write_all(&buf).map_err(CliError::io)?,
        (CacheAction::Load { .. }, None) => {}
    }
    if let CacheAction::Load { .. } = action {
        writeln!(
            io.out,
            "subjects={}\nproperties={}\nsignatures={}",
            view.total_subjects(),
            view.property_count(),
            view.signature_count()
        )
        .map_err(CliError::io)?;
    }
    Ok(EXIT_OK)
}
