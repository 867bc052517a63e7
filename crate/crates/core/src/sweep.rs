//! Parameter sweeps over `Q1`, their CSV tables and SVG charts.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, FailureCode, Result};
use crate::geometry::Coords;
use crate::shake::ShakeRow;
use crate::snap::{snap_pair, SaddleOptions, SnapResult};

/// Environment variable capping the number of sweep threads.
pub const THREADS_ENV: &str = "SANDGLASS_THREADS";

/// Grid `q1_min + k * step` for `k = 1, 2, ...` up to `q1_max` (inclusive up
/// to rounding); the lower end is excluded.
pub fn grid(q1_min: f64, q1_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidSpec(format!("step must be positive, got {step}")));
    }
    if !(q1_max >= q1_min) {
        return Err(Error::InvalidSpec(format!("empty range ]{q1_min}, {q1_max}]")));
    }
    let count = ((q1_max - q1_min) / step + 1e-9).floor() as usize;
    Ok((1..=count).map(|k| q1_min + k as f64 * step).collect())
}

/// Run `f` on a pool sized by [`THREADS_ENV`] (default: all cores).
pub fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let threads = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).unwrap_or(0);
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// One grid point of the snap sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    pub open: Coords,
    pub closed: Coords,
    pub sigma: f64,
    pub saddle_lengths: [f64; 3],
    pub volume_open: f64,
    pub volume_closed: f64,
    pub rel_dvol: f64,
    pub rel_dheight: f64,
    pub rel_dwaist: f64,
    pub open_intersection_free: bool,
    pub closed_coplanar: bool,
    pub saddle_shaky: bool,
    pub failure: Option<FailureCode>,
}

impl SweepRow {
    pub fn is_valid(&self) -> bool {
        self.failure.is_none()
    }

    pub fn from_result(res: &SnapResult) -> Self {
        let spec = res.spec;
        SweepRow {
            n: spec.n(),
            q1: spec.q1(),
            q2: spec.q2(),
            q3: spec.q3(),
            open: res.open.coords,
            closed: res.closed.coords,
            sigma: res.sigma(),
            saddle_lengths: res.saddle.lengths,
            volume_open: res.volume_open,
            volume_closed: res.volume_closed,
            rel_dvol: res.relative_volume_change(),
            rel_dheight: res.relative_height_change(),
            rel_dwaist: res.relative_waist_change(),
            open_intersection_free: res.flags.open_intersection_free,
            closed_coplanar: res.flags.closed_coplanar,
            saddle_shaky: res.flags.saddle_shaky,
            failure: None,
        }
    }

    pub fn failed(n: usize, q1: f64, code: FailureCode) -> Self {
        let nan = f64::NAN;
        let nan3 = Coords::new(nan, nan, nan);
        SweepRow {
            n,
            q1,
            q2: nan,
            q3: nan,
            open: nan3,
            closed: nan3,
            sigma: nan,
            saddle_lengths: [nan; 3],
            volume_open: nan,
            volume_closed: nan,
            rel_dvol: nan,
            rel_dheight: nan,
            rel_dwaist: nan,
            open_intersection_free: false,
            closed_coplanar: false,
            saddle_shaky: false,
            failure: Some(code),
        }
    }
}

pub fn snap_row(n: usize, q1: f64, opts: &SaddleOptions) -> SweepRow {
    match snap_pair(n, q1, opts) {
        Ok(res) => SweepRow::from_result(&res),
        Err(e) => {
            let code = e.failure_code().unwrap_or(FailureCode::NoExtremalQ2);
            let mut row = SweepRow::failed(n, q1, code);
            if let Ok(q2) = crate::snap::extremal_q2(n, q1) {
                row.q2 = q2;
                row.q3 = crate::origami::origami_q3(q1, q2).unwrap_or(f64::NAN);
            }
            row
        }
    }
}

/// Snap sweep for one `n` over the grid `]q1_min, q1_max]`; rows come back in
/// grid order whatever the scheduling.
pub fn sweep_snap(n: usize, q1_min: f64, q1_max: f64, step: f64, opts: &SaddleOptions) -> Result<Vec<SweepRow>> {
    let q1s = grid(q1_min, q1_max, step)?;
    crate::geometry::Skeleton::new(n)?;
    Ok(with_pool(|| q1s.par_iter().map(|&q1| snap_row(n, q1, opts)).collect()))
}

/// Index of the row maximizing `key` among the rows for which it is
/// defined, per `n` in ascending order. Ties go to the smaller `Q1`.
pub fn argmax_by<T>(
    rows: &[T],
    n_of: impl Fn(&T) -> usize,
    q1_of: impl Fn(&T) -> f64,
    key: impl Fn(&T) -> Option<f64>,
) -> Result<Vec<(usize, usize)>> {
    let mut ns: Vec<usize> = rows.iter().map(&n_of).collect();
    ns.sort_unstable();
    ns.dedup();
    let mut out = Vec::new();
    for n in ns {
        let mut best: Option<(usize, f64)> = None;
        for (i, row) in rows.iter().enumerate().filter(|(_, r)| n_of(r) == n) {
            let Some(v) = key(row).filter(|v| v.is_finite()) else { continue };
            let better = match best {
                None => true,
                Some((bi, bv)) => v > bv || (v == bv && q1_of(row) < q1_of(&rows[bi])),
            };
            if better {
                best = Some((i, v));
            }
        }
        if let Some((i, _)) = best {
            out.push((n, i));
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyTable);
    }
    Ok(out)
}

/// Maximal-snappability row per `n`, as `(n, row index)`.
pub fn argmax_designs(rows: &[SweepRow]) -> Result<Vec<(usize, usize)>> {
    argmax_by(rows, |r| r.n, |r| r.q1, |r| r.is_valid().then_some(r.sigma))
}

/// Maximal-shakeability row per `n`, as `(n, row index)`.
pub fn argmax_shake(rows: &[ShakeRow]) -> Result<Vec<(usize, usize)>> {
    argmax_by(rows, |r| r.n, |r| r.q1, |r| r.result.as_ref().ok().map(|s| s.kappa))
}

/// Number formatting for tables: 17 significant digits, `nan` for NaN.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn header_comment(kind: &str, params: &str) -> String {
    format!("# sandglass {} {kind} {params}\n", env!("CARGO_PKG_VERSION"))
}

pub const SNAP_COLUMNS: [&str; 23] = [
    "n",
    "Q1",
    "Q2",
    "Q3",
    "open_H",
    "open_h",
    "open_r",
    "closed_H",
    "closed_h",
    "closed_r",
    "sigma",
    "saddle_S1",
    "saddle_S2",
    "saddle_S3",
    "V_open",
    "V_closed",
    "rel_dvol",
    "rel_dheight",
    "rel_dwaist",
    "open_intersection_free",
    "closed_coplanar",
    "saddle_shaky",
    "failure",
];

pub const SHAKE_COLUMNS: [&str; 16] =
    ["n", "Q1", "Q2", "Q3", "H", "h", "r", "u", "v", "z", "d1", "d2", "d3", "kappa", "normalization", "failure"];

fn write_table(comment: &str, columns: &[&str], records: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns)?;
    for r in records {
        w.write_record(&r)?;
    }
    let body = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(comment.to_string() + &String::from_utf8(body).expect("CSV output is UTF-8"))
}

/// CSV table of a snap sweep, preceded by a comment line naming the tool
/// and `params`.
pub fn snap_csv(rows: &[SweepRow], params: &str) -> Result<String> {
    let f = fmt_f64;
    let records = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                f(r.q1),
                f(r.q2),
                f(r.q3),
                f(r.open.cap_z),
                f(r.open.waist_z),
                f(r.open.waist_r),
                f(r.closed.cap_z),
                f(r.closed.waist_z),
                f(r.closed.waist_r),
                f(r.sigma),
                f(r.saddle_lengths[0]),
                f(r.saddle_lengths[1]),
                f(r.saddle_lengths[2]),
                f(r.volume_open),
                f(r.volume_closed),
                f(r.rel_dvol),
                f(r.rel_dheight),
                f(r.rel_dwaist),
                r.open_intersection_free.to_string(),
                r.closed_coplanar.to_string(),
                r.saddle_shaky.to_string(),
                r.failure.map_or(String::new(), |c| c.as_str().to_string()),
            ]
        })
        .collect();
    write_table(&header_comment("snap sweep", params), &SNAP_COLUMNS, records)
}

/// CSV table of a shake sweep.
pub fn shake_csv(rows: &[ShakeRow], params: &str) -> Result<String> {
    let f = fmt_f64;
    let records = rows
        .iter()
        .map(|row| match &row.result {
            Ok(s) => {
                let spec = s.spec();
                let x = s.realization.coords;
                vec![
                    row.n.to_string(),
                    f(row.q1),
                    f(spec.q2()),
                    f(spec.q3()),
                    f(x.cap_z),
                    f(x.waist_z),
                    f(x.waist_r),
                    f(s.flex.u),
                    f(s.flex.v),
                    f(s.flex.z),
                    f(s.d[0]),
                    f(s.d[1]),
                    f(s.d[2]),
                    f(s.kappa),
                    s.normalization.to_string(),
                    String::new(),
                ]
            }
            Err(code) => {
                let mut v = vec![row.n.to_string(), f(row.q1)];
                v.extend(std::iter::repeat("nan".to_string()).take(12));
                v.push(String::new());
                v.push(code.as_str().to_string());
                v
            }
        })
        .collect();
    write_table(&header_comment("shake sweep", params), &SHAKE_COLUMNS, records)
}

/// Parse a table written by [`snap_csv`] or [`shake_csv`] into its header and
/// string records (comment lines skipped).
pub fn read_table(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let header = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        rows.push(rec?.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}

/// Series colors for `n = 3, 4, 5, 6`.
pub const SERIES_COLORS: [&str; 4] = ["yellow", "green", "cyan", "magenta"];

pub fn series_color(n: usize) -> &'static str {
    SERIES_COLORS[(n.saturating_sub(3)) % SERIES_COLORS.len()]
}

/// Tick spacing of the form `{1, 2, 5} * 10^k` giving at most six intervals.
pub fn nice_step(span: f64) -> f64 {
    if !(span > 0.0) || !span.is_finite() {
        return 1.0;
    }
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    for m in [1.0, 2.0, 5.0, 10.0] {
        if m * mag >= raw * (1.0 - 1e-12) {
            return m * mag;
        }
    }
    10.0 * mag
}

/// Tick positions covering `[lo, hi]`.
pub fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo);
    let first = (lo / step - 1e-9).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

/// A series of a line chart.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Restrict the horizontal axis.
    pub x_window: Option<(f64, f64)>,
    pub series: Vec<Series>,
}

fn fmt_tick(v: f64, step: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if step < 1e-3 || v.abs() >= 1e4 {
        let s = format!("{v:.0e}");
        return s;
    }
    let digits = (-step.log10().floor()).max(0.0) as usize;
    format!("{v:.digits$}")
}

/// SVG line chart; a series with one point is drawn as a marker.
pub fn plot(chart: &Chart) -> Result<String> {
    let in_window = |x: f64| chart.x_window.map_or(true, |(a, b)| x >= a && x <= b);
    let pts: Vec<(f64, f64)> = chart
        .series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|&(x, y)| x.is_finite() && y.is_finite() && in_window(x))
        .collect();
    if pts.is_empty() {
        return Err(Error::EmptyTable);
    }
    let (mut x0, mut x1) = chart.x_window.unwrap_or((f64::MAX, f64::MIN));
    if chart.x_window.is_none() {
        for &(x, _) in &pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
        }
    }
    let mut y0 = pts.iter().map(|p| p.1).fold(0.0_f64, f64::min);
    let mut y1 = pts.iter().map(|p| p.1).fold(0.0_f64, f64::max);
    if x1 - x0 <= 0.0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 <= 0.0 {
        y1 = y0 + 1.0;
    }
    let ystep = nice_step(y1 - y0);
    y1 = (y1 / ystep - 1e-9).ceil() * ystep;
    y0 = (y0 / ystep + 1e-9).floor() * ystep;

    let (w, h) = (640.0, 400.0);
    let (left, right, top, bottom) = (80.0, 110.0, 40.0, 50.0);
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (w - left - right);
    let py = |y: f64| h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(svg, "<!-- sandglass {} chart: {} -->", env!("CARGO_PKG_VERSION"), chart.title);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r##"<rect width="100%" height="100%" fill="#202020"/>"##);
    let _ = writeln!(svg, r#"<text x="{}" y="24" fill="white" text-anchor="middle">{}</text>"#, w / 2.0, chart.title);
    let _ = writeln!(
        svg,
        r#"<g stroke="white" fill="none"><line x1="{l}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{l}" y1="{t}" x2="{l}" y2="{b}"/></g>"#,
        l = left,
        r = w - right,
        t = top,
        b = h - bottom
    );
    for v in ticks(y0, y1) {
        let y = py(v);
        let _ = writeln!(
            svg,
            r#"<g class="ytick"><line x1="{}" y1="{y:.2}" x2="{left}" y2="{y:.2}" stroke="white"/><text x="{}" y="{:.2}" fill="white" text-anchor="end">{}</text></g>"#,
            left - 5.0,
            left - 8.0,
            y + 4.0,
            fmt_tick(v, ystep)
        );
    }
    let xstep = nice_step(x1 - x0);
    for v in ticks(x0, x1) {
        let x = px(v);
        let _ = writeln!(
            svg,
            r#"<g class="xtick"><line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="white"/><text x="{x:.2}" y="{}" fill="white" text-anchor="middle">{}</text></g>"#,
            h - bottom,
            h - bottom + 5.0,
            h - bottom + 20.0,
            fmt_tick(v, xstep)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" fill="white" text-anchor="middle">{}</text>"#,
        (left + w - right) / 2.0,
        h - 10.0,
        chart.x_label
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" fill="white" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        h / 2.0,
        h / 2.0,
        chart.y_label
    );
    for (k, s) in chart.series.iter().enumerate() {
        let p: Vec<(f64, f64)> = s
            .points
            .iter()
            .copied()
            .filter(|&(x, y)| x.is_finite() && y.is_finite() && in_window(x))
            .collect();
        match p.len() {
            0 => {}
            1 => {
                let _ = writeln!(
                    svg,
                    r#"<circle class="series" cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#,
                    px(p[0].0),
                    py(p[0].1),
                    s.color
                );
            }
            _ => {
                let coords: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
                let _ = writeln!(
                    svg,
                    r#"<polyline class="series" fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
                    s.color,
                    coords.join(" ")
                );
            }
        }
        let ly = top + 16.0 * k as f64 + 10.0;
        let _ = writeln!(
            svg,
            r#"<g class="legend"><line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="2"/><text x="{}" y="{}" fill="white">{}</text></g>"#,
            w - right + 10.0,
            w - right + 30.0,
            s.color,
            w - right + 35.0,
            ly + 4.0,
            s.label
        );
    }
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}

/// Quantities of a snap sweep that can be charted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnapColumn {
    Sigma,
    RelHeight,
    RelWaist,
    RelVolume,
}

impl SnapColumn {
    pub fn label(self) -> &'static str {
        match self {
            SnapColumn::Sigma => "snappability",
            SnapColumn::RelHeight => "relative height change",
            SnapColumn::RelWaist => "relative waist change",
            SnapColumn::RelVolume => "relative volume change",
        }
    }

    pub fn value(self, row: &SweepRow) -> f64 {
        match self {
            SnapColumn::Sigma => row.sigma,
            SnapColumn::RelHeight => row.rel_dheight,
            SnapColumn::RelWaist => row.rel_dwaist,
            SnapColumn::RelVolume => row.rel_dvol,
        }
    }
}

fn group_by_n<T>(rows: &[T], n_of: impl Fn(&T) -> usize, point: impl Fn(&T) -> Option<(f64, f64)>) -> Vec<Series> {
    let mut ns: Vec<usize> = rows.iter().map(&n_of).collect();
    ns.sort_unstable();
    ns.dedup();
    ns.into_iter()
        .map(|n| Series {
            label: format!("n = {n}"),
            color: series_color(n),
            points: rows.iter().filter(|r| n_of(r) == n).filter_map(&point).collect(),
        })
        .collect()
}

pub fn snap_chart(rows: &[SweepRow], column: SnapColumn, x_window: Option<(f64, f64)>) -> Chart {
    Chart {
        title: format!("{} over Q1", column.label()),
        x_label: "Q1".into(),
        y_label: column.label().into(),
        x_window,
        series: group_by_n(rows, |r| r.n, |r| r.is_valid().then(|| (r.q1, column.value(r)))),
    }
}

pub fn shake_chart(rows: &[ShakeRow]) -> Chart {
    Chart {
        title: "shakeability over Q1".into(),
        x_label: "Q1".into(),
        y_label: "shakeability".into(),
        x_window: None,
        series: group_by_n(rows, |r| r.n, |r| r.result.as_ref().ok().map(|s| (r.q1, s.kappa))),
    }
}
