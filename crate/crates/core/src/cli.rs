//! Command-line front end of the `sandglass` binary.
//!
//! Every flag can also be given in a `key = value` configuration file passed
//! with `--config`; flags take precedence over the file. Exit codes: 0 on
//! success, 1 when the computation fails, 2 on usage errors.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::geometry::{DesignSpec, Mesh, Realization};
use crate::io::{animate, write_obj};
use crate::origami::{angle_defect, crease_pattern, develop, origami_q3, CreaseStyle};
use crate::realize::{realize, Multiplicity};
use crate::shake::{shake, sweep_shake};
use crate::singularity::solve_shaky_q2;
use crate::snap::{extremal_q2, snap_design, snap_pair, SaddleOptions, SnapResult};
use crate::sweep::{fmt_f64, plot, shake_chart, shake_csv, snap_chart, snap_csv, sweep_snap, SnapColumn};

#[derive(Debug, Parser)]
#[command(name = "sandglass", version, about = "Sandglass quasi-mechanisms: realizations, snapping and shaking")]
pub struct Cli {
    /// Configuration file with `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// All symmetric realizations of a design.
    Realize(Params),
    /// Third length of the origami design and its development.
    Origami(Params),
    /// Shaky origami design of the given Q1, its flex and shakeability.
    Shaky(Params),
    /// Snapping pair, saddle and snappability of an extremal design.
    Snap(Params),
    /// Snap sweep over Q1; CSV table and optional SVG chart.
    SweepSnap(Params),
    /// Shake sweep over Q1; CSV table and optional SVG chart.
    SweepShake(Params),
    /// OBJ mesh of one state of a design.
    ExportObj(Params),
    /// SVG crease pattern of one state of a design.
    ExportCrease(Params),
    /// OBJ frame sequence of the snap from the open to the closed state.
    Animate(Params),
}

/// Parameters shared by all subcommands; each one reads the ones it needs.
#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct Params {
    /// Order of the skeleton (sweeps default to 3, 4, 5 and 6).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub q1: Option<f64>,
    /// A number or `auto` (extremal or shaky design).
    #[arg(long)]
    pub q2: Option<String>,
    /// A number or `origami`.
    #[arg(long)]
    pub q3: Option<String>,
    #[arg(long)]
    pub q1_min: Option<f64>,
    #[arg(long)]
    pub q1_max: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output directory for multi-file results.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// SVG chart of a sweep.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Charted snap quantity: sigma, height, waist or volume.
    #[arg(long)]
    pub column: Option<String>,
    /// Q1 window of snap charts, `lo,hi`.
    #[arg(long)]
    pub window: Option<String>,
    /// open, closed, saddle or shaky.
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long)]
    pub frames: Option<usize>,
    /// Draw the cap polygons in crease patterns.
    #[arg(long)]
    pub caps: Option<bool>,
    /// Number of path nodes of the saddle search.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub newton_tolerance: Option<f64>,
}

/// Why a run failed.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Run(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Run(e.into())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parse `key = value` lines; `#` starts a comment, keys may use `-` or `_`.
pub fn parse_config(text: &str) -> CliResult<Params> {
    fn num<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<Option<T>> {
        v.parse().map(Some).map_err(|_| usage(format!("config: bad value {v:?} for {key}")))
    }
    let mut p = Params::default();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| usage(format!("config line {}: expected key = value", k + 1)))?;
        let key = key.trim().replace('-', "_");
        let v = value.trim();
        match key.as_str() {
            "n" => p.n = num(&key, v)?,
            "q1" => p.q1 = num(&key, v)?,
            "q2" => p.q2 = Some(v.to_string()),
            "q3" => p.q3 = Some(v.to_string()),
            "q1_min" => p.q1_min = num(&key, v)?,
            "q1_max" => p.q1_max = num(&key, v)?,
            "step" => p.step = num(&key, v)?,
            "out" => p.out = Some(v.into()),
            "out_dir" => p.out_dir = Some(v.into()),
            "plot" => p.plot = Some(v.into()),
            "column" => p.column = Some(v.to_string()),
            "window" => p.window = Some(v.to_string()),
            "state" => p.state = Some(v.to_string()),
            "frames" => p.frames = num(&key, v)?,
            "caps" => p.caps = num(&key, v)?,
            "nodes" => p.nodes = num(&key, v)?,
            "max_iterations" => p.max_iterations = num(&key, v)?,
            "newton_tolerance" => p.newton_tolerance = num(&key, v)?,
            _ => return Err(usage(format!("config line {}: unknown key {key:?}", k + 1))),
        }
    }
    Ok(p)
}

impl Params {
    /// Fill every unset field from `base`.
    pub fn or(self, base: Params) -> Params {
        Params {
            n: self.n.or(base.n),
            q1: self.q1.or(base.q1),
            q2: self.q2.or(base.q2),
            q3: self.q3.or(base.q3),
            q1_min: self.q1_min.or(base.q1_min),
            q1_max: self.q1_max.or(base.q1_max),
            step: self.step.or(base.step),
            out: self.out.or(base.out),
            out_dir: self.out_dir.or(base.out_dir),
            plot: self.plot.or(base.plot),
            column: self.column.or(base.column),
            window: self.window.or(base.window),
            state: self.state.or(base.state),
            frames: self.frames.or(base.frames),
            caps: self.caps.or(base.caps),
            nodes: self.nodes.or(base.nodes),
            max_iterations: self.max_iterations.or(base.max_iterations),
            newton_tolerance: self.newton_tolerance.or(base.newton_tolerance),
        }
    }

    fn n(&self) -> CliResult<usize> {
        self.n.ok_or_else(|| usage("missing --n"))
    }

    fn q1(&self) -> CliResult<f64> {
        self.q1.ok_or_else(|| usage("missing --q1"))
    }

    /// `Some(Q2)` for an explicit value, `None` for `auto`.
    fn q2(&self) -> CliResult<Option<f64>> {
        match self.q2.as_deref().map(str::trim) {
            None | Some("auto") => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| usage(format!("bad --q2 {v:?}"))),
        }
    }

    /// `Some(Q3)` for an explicit value, `None` for the origami policy.
    fn q3(&self) -> CliResult<Option<f64>> {
        match self.q3.as_deref().map(str::trim) {
            None | Some("origami") => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| usage(format!("bad --q3 {v:?}"))),
        }
    }

    fn saddle_options(&self) -> SaddleOptions {
        let d = SaddleOptions::default();
        SaddleOptions {
            nodes: self.nodes.unwrap_or(d.nodes),
            max_iterations: self.max_iterations.unwrap_or(d.max_iterations),
            newton_tolerance: self.newton_tolerance.unwrap_or(d.newton_tolerance),
            ..d
        }
    }

    fn ns(&self) -> Vec<usize> {
        self.n.map_or_else(|| (3..=6).collect(), |n| vec![n])
    }

    fn window(&self) -> CliResult<Option<(f64, f64)>> {
        let Some(w) = &self.window else { return Ok(None) };
        let bad = || usage(format!("bad --window {w:?}, expected lo,hi"));
        let (a, b) = w.split_once(',').ok_or_else(bad)?;
        let (a, b) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        Ok(Some((a, b)))
    }

    fn column(&self) -> CliResult<SnapColumn> {
        match self.column.as_deref().unwrap_or("sigma") {
            "sigma" => Ok(SnapColumn::Sigma),
            "height" => Ok(SnapColumn::RelHeight),
            "waist" => Ok(SnapColumn::RelWaist),
            "volume" => Ok(SnapColumn::RelVolume),
            c => Err(usage(format!("unknown --column {c:?}"))),
        }
    }

    /// The design named by `n`, `q1`, `q2` and `q3`, with `auto` resolved to
    /// the extremal design.
    fn design(&self) -> CliResult<DesignSpec> {
        let (n, q1) = (self.n()?, self.q1()?);
        let q2 = match self.q2()? {
            Some(q2) => q2,
            None => extremal_q2(n, q1)?,
        };
        Ok(match self.q3()? {
            Some(q3) => DesignSpec::sandglass(n, q1, q2, q3)?,
            None => DesignSpec::origami(n, q1, q2)?,
        })
    }

    fn snap(&self) -> CliResult<SnapResult> {
        let opts = self.saddle_options();
        if self.q2()?.is_none() && self.q3()?.is_none() {
            Ok(snap_pair(self.n()?, self.q1()?, &opts)?)
        } else {
            Ok(snap_design(&self.design()?, &opts)?)
        }
    }
}

struct Out<'a> {
    stdout: &'a mut dyn Write,
}

impl Out<'_> {
    fn kv(&mut self, key: &str, value: f64) -> std::io::Result<()> {
        writeln!(self.stdout, "{key} = {}", fmt_f64(value))
    }

    fn text(&mut self, key: &str, value: &str) -> std::io::Result<()> {
        writeln!(self.stdout, "{key} = {value}")
    }

    /// Write `content` to `path`, or to standard output without one.
    fn emit(&mut self, path: Option<&Path>, content: &str) -> std::io::Result<()> {
        match path {
            Some(p) => std::fs::write(p, content),
            None => self.stdout.write_all(content.as_bytes()),
        }
    }

    fn coords(&mut self, prefix: &str, real: &Realization) -> std::io::Result<()> {
        self.kv(&format!("{prefix}H"), real.coords.cap_z)?;
        self.kv(&format!("{prefix}h"), real.coords.waist_z)?;
        self.kv(&format!("{prefix}r"), real.coords.waist_r)
    }
}

fn spec_params(spec: &DesignSpec) -> String {
    let q = spec.q();
    format!("n={} Q1={} Q2={} Q3={} Q4={}", spec.n(), fmt_f64(q[0]), fmt_f64(q[1]), fmt_f64(q[2]), fmt_f64(q[3]))
}

fn mkdir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn run_realize(p: &Params, out: &mut Out) -> CliResult<()> {
    let spec = p.design()?;
    let set = realize(&spec)?;
    out.text("design", &spec_params(&spec))?;
    out.kv("discriminant", set.discriminant)?;
    out.text("count", &set.len().to_string())?;
    for (k, s) in set.solutions.iter().enumerate() {
        out.coords(&format!("{k}."), &s.realization)?;
        let mult = match s.multiplicity {
            Multiplicity::Simple => "simple",
            Multiplicity::Double => "double",
        };
        out.text(&format!("{k}.multiplicity"), mult)?;
        out.kv(&format!("{k}.residual"), s.residual)?;
        out.text(&format!("{k}.degenerate"), &s.degenerate.to_string())?;
    }
    Ok(())
}

fn run_origami(p: &Params, out: &mut Out) -> CliResult<()> {
    let (n, q1) = (p.n()?, p.q1()?);
    let q2 = p.q2()?.ok_or_else(|| usage("origami needs a numeric --q2"))?;
    let q3 = origami_q3(q1, q2)?;
    out.kv("Q3", q3)?;
    let spec = DesignSpec::origami(n, q1, q2)?;
    let dev = develop(&spec)?;
    out.kv("a", dev.a)?;
    out.kv("b", dev.b)?;
    out.kv("f", dev.f)?;
    let (dd, dc) = angle_defect(&spec)?;
    out.kv("defect_D", dd)?;
    out.kv("defect_C", dc)?;
    Ok(())
}

fn run_shaky(p: &Params, out: &mut Out) -> CliResult<()> {
    let res = shake(p.n()?, p.q1()?)?;
    out.text("design", &spec_params(res.spec()))?;
    out.coords("", &res.realization)?;
    out.kv("u", res.flex.u)?;
    out.kv("v", res.flex.v)?;
    out.kv("z", res.flex.z)?;
    for (k, d) in res.d.iter().enumerate() {
        out.kv(&format!("d{}", k + 1), *d)?;
    }
    out.kv("kappa", res.kappa)?;
    out.text("normalization", res.normalization)?;
    Ok(())
}

fn write_snap_objs(res: &SnapResult, dir: &Path) -> CliResult<()> {
    mkdir(dir)?;
    let params = spec_params(&res.spec);
    let sk = res.spec.skeleton();
    let open = res.open.mesh();
    let mut saddle = Mesh::sandglass(sk, &res.saddle.coords);
    if saddle.faces != open.faces {
        saddle.flip();
    }
    std::fs::write(dir.join("open.obj"), write_obj(&open, &format!("open {params}")))?;
    std::fs::write(dir.join("saddle.obj"), write_obj(&saddle, &format!("saddle {params}")))?;
    std::fs::write(dir.join("closed.obj"), write_obj(&res.closed.mesh(), &format!("closed {params}")))?;
    Ok(())
}

fn run_snap(p: &Params, out: &mut Out) -> CliResult<()> {
    let res = p.snap()?;
    out.text("design", &spec_params(&res.spec))?;
    out.coords("open.", &res.open)?;
    out.coords("closed.", &res.closed)?;
    out.kv("saddle.H", res.saddle.coords.cap_z)?;
    out.kv("saddle.h", res.saddle.coords.waist_z)?;
    out.kv("saddle.r", res.saddle.coords.waist_r)?;
    out.kv("sigma", res.sigma())?;
    out.kv("gradient_norm", res.saddle.gradient_norm)?;
    out.text("saddle_index", &res.saddle.saddle_index().to_string())?;
    out.kv("V_open", res.volume_open)?;
    out.kv("V_closed", res.volume_closed)?;
    out.kv("rel_dvol", res.relative_volume_change())?;
    out.kv("rel_dheight", res.relative_height_change())?;
    out.kv("rel_dwaist", res.relative_waist_change())?;
    for b in &res.branches {
        let status = b.failure.map_or("ok", |f| f.as_str());
        out.text(&format!("branch {}", fmt_f64(b.q2)), status)?;
    }
    if let Some(dir) = &p.out_dir {
        write_snap_objs(&res, dir)?;
    }
    Ok(())
}

fn range_params(n: &[usize], lo: f64, hi: f64, step: f64) -> String {
    let ns: Vec<String> = n.iter().map(|n| n.to_string()).collect();
    format!("n={} q1_min={} q1_max={} step={}", ns.join(","), fmt_f64(lo), fmt_f64(hi), fmt_f64(step))
}

fn run_sweep_snap(p: &Params, out: &mut Out) -> CliResult<()> {
    let (lo, hi, step) = (p.q1_min.unwrap_or(0.25), p.q1_max.unwrap_or(5.0), p.step.unwrap_or(0.01));
    let column = p.column()?;
    let window = p.window()?;
    let opts = p.saddle_options();
    let ns = p.ns();
    let mut rows = Vec::new();
    for &n in &ns {
        rows.extend(sweep_snap(n, lo, hi, step, &opts)?);
    }
    let params = range_params(&ns, lo, hi, step);
    out.emit(p.out.as_deref(), &snap_csv(&rows, &params)?)?;
    if let Some(path) = &p.plot {
        std::fs::write(path, plot(&snap_chart(&rows, column, window))?)?;
    }
    Ok(())
}

fn run_sweep_shake(p: &Params, out: &mut Out) -> CliResult<()> {
    let (lo, hi, step) = (p.q1_min.unwrap_or(0.25), p.q1_max.unwrap_or(0.31), p.step.unwrap_or(0.001));
    let ns = p.ns();
    let mut rows = Vec::new();
    for &n in &ns {
        rows.extend(sweep_shake(n, lo, hi, step)?);
    }
    let params = range_params(&ns, lo, hi, step);
    out.emit(p.out.as_deref(), &shake_csv(&rows, &params)?)?;
    if let Some(path) = &p.plot {
        std::fs::write(path, plot(&shake_chart(&rows))?)?;
    }
    Ok(())
}

/// The realization named by `--state`, with a neighbouring configuration
/// used to orient fold labels of flat edges.
fn state(p: &Params) -> CliResult<(Realization, Option<Realization>, &'static str)> {
    let st = p.state.as_deref().unwrap_or("open");
    if st == "shaky" {
        let design = solve_shaky_q2(p.n()?, p.q1()?)?;
        return Ok((design.realization, None, "shaky"));
    }
    let res = p.snap()?;
    let path = res.path();
    let near = |x| Realization::new(res.spec, x);
    Ok(match st {
        "open" => (res.open, Some(near(path[1])), "open"),
        "closed" => (res.closed, Some(near(path[path.len() - 2])), "closed"),
        "saddle" => (Realization::new(res.spec, res.saddle.coords), None, "saddle"),
        s => return Err(usage(format!("unknown --state {s:?}"))),
    })
}

fn run_export_obj(p: &Params, out: &mut Out) -> CliResult<()> {
    let (real, _, name) = state(p)?;
    let mesh = real.mesh();
    let text = write_obj(&mesh, &format!("{name} {}", spec_params(&real.spec)));
    out.emit(p.out.as_deref(), &text)?;
    Ok(())
}

fn run_export_crease(p: &Params, out: &mut Out) -> CliResult<()> {
    let (real, approach, _) = state(p)?;
    let style = CreaseStyle { caps: p.caps, ..CreaseStyle::default() };
    let svg = crease_pattern(&real, approach.as_ref(), &style)?;
    out.emit(p.out.as_deref(), &svg)?;
    Ok(())
}

fn run_animate(p: &Params, out: &mut Out) -> CliResult<()> {
    let dir = p.out_dir.as_ref().ok_or_else(|| usage("animate needs --out-dir"))?;
    let frames = p.frames.unwrap_or(25);
    let res = p.snap()?;
    let meshes = animate(&res, frames)?;
    mkdir(dir)?;
    let params = spec_params(&res.spec);
    let width = (meshes.len() - 1).to_string().len().max(4);
    for (k, m) in meshes.iter().enumerate() {
        let name = format!("frame_{k:0width$}.obj");
        std::fs::write(dir.join(&name), write_obj(m, &format!("frame {k}/{} {params}", meshes.len())))?;
    }
    out.text("frames", &meshes.len().to_string())?;
    Ok(())
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let base = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => Params::default(),
    };
    let mut out = Out { stdout };
    let merge = |p: &Params| p.clone().or(base.clone());
    match &cli.command {
        Command::Realize(p) => run_realize(&merge(p), &mut out),
        Command::Origami(p) => run_origami(&merge(p), &mut out),
        Command::Shaky(p) => run_shaky(&merge(p), &mut out),
        Command::Snap(p) => run_snap(&merge(p), &mut out),
        Command::SweepSnap(p) => run_sweep_snap(&merge(p), &mut out),
        Command::SweepShake(p) => run_sweep_shake(&merge(p), &mut out),
        Command::ExportObj(p) => run_export_obj(&merge(p), &mut out),
        Command::ExportCrease(p) => run_export_crease(&merge(p), &mut out),
        Command::Animate(p) => run_animate(&merge(p), &mut out),
    }
}

/// Run the command line `args` (including the program name) and return the
/// exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli, stdout) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            let mut text = String::new();
            let _ = writeln!(text, "error: {msg}");
            let _ = writeln!(text, "usage: sandglass [--config FILE] <COMMAND> [--n N] [--q1 Q1] [--q2 Q2|auto] ...");
            let _ = writeln!(text, "run `sandglass --help` for the list of commands");
            let _ = stderr.write_all(text.as_bytes());
            2
        }
        Err(CliError::Run(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}
