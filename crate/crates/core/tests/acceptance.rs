//! Acceptance run: one PASS/FAIL line per criterion, then a summary.
//!
//! Run with `cargo test --release --test acceptance -- --nocapture` to see
//! the report.

mod common;

use std::collections::HashMap;
use std::time::{Duration, Instant};

use common::{random_spec, scan_realizations};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sandglass::geometry::{self_intersections, Coords, DesignSpec, Realization, Skeleton};
use sandglass::origami::{angle_defect, crease_pattern, origami_q3, CreaseStyle};
use sandglass::realize::{r_quartic_discriminant, realize};
use sandglass::shake::{snappability_along, sweep_shake, ShakeRow};
use sandglass::singularity::{full_kernel, reduced_rank, ShakinessCondition};
use sandglass::snap::{closed_state_check, snap_pair, SaddleOptions, SnapResult};
use sandglass::sweep::{argmax_designs, argmax_shake, grid, with_pool, SweepRow};
use sandglass::{tol, Error};

const NS: [usize; 4] = [3, 4, 5, 6];

struct Report {
    failed: Vec<usize>,
}

impl Report {
    fn line(&mut self, id: usize, ok: bool, elapsed: Duration, limit: Duration, detail: String) {
        let ok = ok && elapsed <= limit;
        println!(
            "{} criterion {id}: {detail} [{:.2} s, limit {:.0} s]",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs_f64()
        );
        if !ok {
            self.failed.push(id);
        }
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

struct SnapSweep {
    results: Vec<(usize, f64, Option<SnapResult>)>,
    rows: Vec<SweepRow>,
    elapsed: Duration,
}

fn run_snap_sweep() -> SnapSweep {
    let start = Instant::now();
    let opts = SaddleOptions::default();
    let points: Vec<(usize, f64)> =
        NS.iter().flat_map(|&n| grid(0.25, 5.0, 0.01).unwrap().into_iter().map(move |q1| (n, q1))).collect();
    let results: Vec<(usize, f64, Option<SnapResult>)> =
        with_pool(|| points.par_iter().map(|&(n, q1)| (n, q1, snap_pair(n, q1, &opts).ok())).collect());
    let rows = results
        .iter()
        .map(|(n, q1, r)| match r {
            Some(res) => SweepRow::from_result(res),
            None => sandglass::sweep::snap_row(*n, *q1, &opts),
        })
        .collect();
    SnapSweep { results, rows, elapsed: start.elapsed() }
}

fn run_shake_sweep() -> (Vec<ShakeRow>, Duration) {
    let start = Instant::now();
    let mut rows = Vec::new();
    for n in NS {
        rows.extend(sweep_shake(n, 0.25, 0.31, 0.001).unwrap());
    }
    (rows, start.elapsed())
}

fn criterion_1(report: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_on, mut least_off) = (0.0_f64, f64::MAX);
    let mut errors = 0;
    for _ in 0..100 {
        let n = rng.gen_range(3..=6);
        let (q1, q2) = (rng.gen_range(0.3..5.0), rng.gen_range(0.1..5.0));
        let q3 = origami_q3(q1, q2).unwrap();
        let defect = |q3: f64| {
            DesignSpec::sandglass(n, q1, q2, q3)
                .and_then(|s| angle_defect(&s))
                .map(|(d, c)| d.abs().max(c.abs()))
        };
        match (defect(q3), defect(q3 + 1e-3), defect(q3 - 1e-3)) {
            (Ok(on), Ok(up), Ok(down)) => {
                worst_on = worst_on.max(on);
                least_off = least_off.min(up.min(down));
            }
            _ => errors += 1,
        }
    }
    let ok = errors == 0 && worst_on < 1e-10 && least_off > 1e-5;
    let detail =
        format!("origami angle defect max {worst_on:.2e} (< 1e-10), perturbed min {least_off:.2e} (> 1e-5), {errors} errors");
    report.line(1, ok, start.elapsed(), secs(1), detail);
}

fn criterion_2(report: &mut Report, snap: &SnapSweep, shake: &[ShakeRow]) {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    let mut count = 0;
    for (_, _, res) in &snap.results {
        let Some(res) = res else { continue };
        let set = realize(&res.spec).expect("swept design has realizations");
        for real in set.realizations().chain([res.open, res.closed]) {
            worst = worst.max(real.max_residual());
            count += 1;
        }
    }
    for row in shake {
        if let Ok(s) = &row.result {
            worst = worst.max(s.realization.max_residual());
            count += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut mismatches = 0;
    for _ in 0..50 {
        let spec = random_spec(&mut rng);
        let oracle = scan_realizations(&spec);
        let solved: Vec<Coords> = match realize(&spec) {
            Ok(set) => set.realizations().map(|r| r.coords).collect(),
            Err(Error::EmptySet) => Vec::new(),
            Err(_) => {
                mismatches += 1;
                continue;
            }
        };
        let same = solved.len() == oracle.len() && solved.iter().all(|x| oracle.iter().any(|y| y.distance(x) < 1e-7));
        mismatches += usize::from(!same);
    }
    let ok = worst < 1e-9 && mismatches == 0;
    let detail = format!(
        "{count} swept realizations, max residual {worst:.2e} (< 1e-9); scan oracle mismatches {mismatches}/50"
    );
    report.line(2, ok, start.elapsed(), secs(10), detail);
}

fn criterion_3(report: &mut Report, shake: &[ShakeRow], shake_time: Duration) {
    let start = Instant::now();
    let (mut solved, mut disagree) = (0, 0);
    let (mut worst_res, mut worst_disc) = (0.0_f64, 0.0_f64);
    for row in shake {
        let Ok(s) = &row.result else { continue };
        solved += 1;
        let spec = s.spec();
        let res = ShakinessCondition::new(spec.q1(), spec.q2()).unwrap().normalized_residual(spec.skeleton().cos);
        let disc = r_quartic_discriminant(spec.skeleton(), spec.q123());
        worst_res = worst_res.max(res.abs());
        worst_disc = worst_disc.max(disc.abs());
        let agree = res.abs() < 1e-8
            && disc.abs() < 1e-8
            && reduced_rank(&s.realization) == 2
            && full_kernel(&s.realization).0 == 1;
        disagree += usize::from(!agree);
    }
    let ok = solved > 0 && disagree == 0;
    let detail = format!(
        "{solved} shaky designs, {disagree} disagreements; max residual {worst_res:.1e}, max discriminant {worst_disc:.1e}"
    );
    report.line(3, ok, start.elapsed() + shake_time, secs(30), detail);
}

fn max_by_n(rows: &[SweepRow], n: usize, value: impl Fn(&SweepRow) -> f64) -> f64 {
    rows.iter().filter(|r| r.n == n && r.is_valid()).map(value).fold(f64::NAN, f64::max)
}

fn criterion_4(report: &mut Report, snap: &SnapSweep) {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for n in NS {
        let valid = snap.rows.iter().filter(|r| r.n == n && r.is_valid()).count();
        let max_sigma = max_by_n(&snap.rows, n, |r| r.sigma);
        ok &= valid > 0 && (1e-5..=1e-3).contains(&max_sigma);
        parts.push(format!("n={n}: {valid} valid, max sigma {max_sigma:.2e}"));
    }
    let (mut worst_grad, mut bad_index) = (0.0_f64, 0);
    for (_, _, res) in &snap.results {
        let Some(res) = res else { continue };
        worst_grad = worst_grad.max(res.saddle.gradient_norm);
        bad_index += usize::from(res.saddle.negative_eigenvalues() != 1);
    }
    ok &= worst_grad < 1e-10 && bad_index == 0;
    let detail = format!(
        "{}; max |grad E| {worst_grad:.1e} (< 1e-10), {bad_index} saddles without exactly one negative eigenvalue",
        parts.join(", ")
    );
    report.line(4, ok, snap.elapsed + start.elapsed(), secs(600), detail);
}

fn criterion_5(report: &mut Report, shake: &[ShakeRow], shake_time: Duration) {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    let mut worst_fd = 0.0_f64;
    let mut nonpositive = 0;
    for n in NS {
        let series: Vec<(f64, f64)> = shake
            .iter()
            .filter(|r| r.n == n)
            .filter_map(|r| r.result.as_ref().ok().map(|s| (r.q1, s.kappa)))
            .collect();
        for row in shake.iter().filter(|r| r.n == n) {
            let Ok(s) = &row.result else { continue };
            nonpositive += usize::from(!(s.kappa > 0.0));
            let t = 1e-4;
            let sigma = |t| snappability_along(s.spec(), s.d, t);
            let fd = (sigma(t) - 2.0 * sigma(0.0) + sigma(-t)) / (t * t);
            worst_fd = worst_fd.max((fd - s.kappa).abs() / s.kappa);
        }
        let kappas: Vec<f64> = series.iter().map(|p| p.1).collect();
        let (arg, max) = kappas.iter().enumerate().fold((0, f64::MIN), |b, (i, &k)| if k > b.1 { (i, k) } else { b });
        let local_maxima = (1..kappas.len().saturating_sub(1))
            .filter(|&i| kappas[i] > kappas[i - 1] && kappas[i] > kappas[i + 1])
            .count();
        let interior = kappas.len() >= 3 && arg > 0 && arg + 1 < kappas.len() && local_maxima == 1;
        let in_window = (0.01..=0.1).contains(&max);
        ok &= interior && in_window;
        let q1_at = series.get(arg).map_or(f64::NAN, |p| p.0);
        parts.push(format!(
            "n={n}: {} solved, max kappa {max:.3} at Q1={q1_at:.3}{}",
            kappas.len(),
            if interior { "" } else { " (not a single interior maximum)" }
        ));
    }
    ok &= nonpositive == 0 && worst_fd < 1e-6;
    let detail = format!(
        "{}; {nonpositive} rows with kappa <= 0; finite-difference rel. error {worst_fd:.1e}; window [0.01, 0.1]",
        parts.join(", ")
    );
    report.line(5, ok, start.elapsed() + shake_time, secs(60), detail);
}

fn criterion_6(report: &mut Report, snap: &SnapSweep) {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    let nonpositive = snap.rows.iter().filter(|r| r.is_valid() && !(r.rel_dvol > 0.0)).count();
    for n in NS {
        let h = max_by_n(&snap.rows, n, |r| r.rel_dheight);
        let w = max_by_n(&snap.rows, n, |r| r.rel_dwaist);
        let v = max_by_n(&snap.rows, n, |r| r.rel_dvol);
        ok &= (0.03..=0.3).contains(&h) && (0.03..=0.3).contains(&w) && (0.05..=0.5).contains(&v);
        parts.push(format!("n={n}: height {h:.3}, waist {w:.3}, volume {v:.3}"));
    }
    ok &= nonpositive == 0;
    let detail = format!(
        "peaks {} (height/waist in [0.03, 0.3], volume in [0.05, 0.5]); {nonpositive} valid rows with volume change <= 0",
        parts.join("; ")
    );
    report.line(6, ok, snap.elapsed + start.elapsed(), secs(600), detail);
}

fn criterion_7(report: &mut Report, snap: &SnapSweep) {
    let start = Instant::now();
    let (mut worst_tetra, mut worst_fold, mut intersecting, mut count) = (0.0_f64, 0.0_f64, 0, 0);
    for (_, _, res) in &snap.results {
        let Some(res) = res else { continue };
        let rep = closed_state_check(&res.closed);
        worst_tetra = worst_tetra.max(rep.tetra_volume.abs());
        worst_fold = worst_fold.max(rep.fold_factor.abs());
        intersecting += usize::from(!self_intersections(&res.open.mesh(), tol::INTERSECTION_EPS).is_empty());
        count += 1;
    }
    let ok = count > 0 && worst_tetra < 1e-9 && worst_fold < 1e-9 && intersecting == 0;
    let detail = format!(
        "{count} extremal designs: max tetrahedron volume {worst_tetra:.1e}, max |2Hrs + h| {worst_fold:.1e}, {intersecting} open states intersecting"
    );
    report.line(7, ok, snap.elapsed + start.elapsed(), secs(600), detail);
}

fn criterion_8(report: &mut Report) {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for k in 0..20 {
        let q1 = 0.3 + 2.7 * (k as f64 + 0.5) / 20.0;
        let q2 = q1 * q1 / (4.0 * q1 - 1.0);
        let q3 = origami_q3(q1, q2).unwrap();
        worst = worst.max((q3 - q2).abs());
    }
    report.line(8, worst < 1e-12, start.elapsed(), secs(1), format!("max |Q3 - Q2| on the L2 = L3 family {worst:.1e} (< 1e-12)"));
}

/// Labels per crease (class and fold) in drawing order.
fn crease_labels(svg: &str) -> Vec<(String, String)> {
    svg.lines()
        .filter_map(|l| l.split("class=\"crease ").nth(1))
        .map(|rest| {
            let label = rest.split('"').next().unwrap();
            let (class, fold) = label.split_once(' ').unwrap_or((label, ""));
            (class.to_string(), fold.to_string())
        })
        .collect()
}

/// 18 creases, every one mountain or valley, one fold per class, and
/// every label swapped in the mirror image.
fn crease_check(real: &Realization, approach: Option<&Realization>) -> Result<String, String> {
    let style = CreaseStyle::default();
    let a = crease_labels(&crease_pattern(real, approach, &style).map_err(|e| e.to_string())?);
    let mirrored = approach.map(|r| r.mirror());
    let b = crease_labels(&crease_pattern(&real.mirror(), mirrored.as_ref(), &style).map_err(|e| e.to_string())?);
    if a.len() != 18 || b.len() != 18 {
        return Err(format!("{} / {} creases", a.len(), b.len()));
    }
    let mut per_class: HashMap<&str, &str> = HashMap::new();
    for (class, fold) in &a {
        if fold != "mountain" && fold != "valley" {
            return Err(format!("{class} crease is {fold:?}"));
        }
        if *per_class.entry(class).or_insert(fold) != fold.as_str() {
            return Err(format!("class {class} mixes folds"));
        }
    }
    for ((ca, fa), (cb, fb)) in a.iter().zip(&b) {
        if ca != cb || fa == fb {
            return Err("mirror image does not swap every fold".into());
        }
    }
    let mut classes: Vec<String> = per_class.iter().map(|(c, f)| format!("{c} {f}")).collect();
    classes.sort();
    Ok(classes.join(", "))
}

fn criterion_9(report: &mut Report, snap: &SnapSweep, shake: &[ShakeRow]) {
    let start = Instant::now();
    let snap_row = argmax_designs(&snap.rows).unwrap().into_iter().find(|(n, _)| *n == 3).unwrap().1;
    let res = snap.results[snap_row].2.as_ref().unwrap();
    let near_open = Realization::new(res.spec, res.path()[1]);
    let sigma_check = crease_check(&res.open, Some(&near_open));
    let shake_row = argmax_shake(shake).unwrap().into_iter().find(|(n, _)| *n == 3).unwrap().1;
    let shaky = shake[shake_row].result.as_ref().unwrap();
    let kappa_check = crease_check(&shaky.realization, None);
    let ok = sigma_check.is_ok() && kappa_check.is_ok();
    let show = |r: &Result<String, String>| match r {
        Ok(s) => s.clone(),
        Err(e) => format!("error: {e}"),
    };
    let detail = format!(
        "n=3 max-sigma design Q1={:.2}: [{}]; max-kappa design Q1={:.3}: [{}]",
        res.spec.q1(),
        show(&sigma_check),
        shaky.spec().q1(),
        show(&kappa_check)
    );
    report.line(9, ok, start.elapsed(), secs(1), detail);
}

#[test]
fn acceptance() {
    let _ = Skeleton::new(3).unwrap();
    let mut report = Report { failed: Vec::new() };
    let snap = run_snap_sweep();
    let (shake, shake_time) = run_shake_sweep();
    criterion_1(&mut report);
    criterion_2(&mut report, &snap, &shake);
    criterion_3(&mut report, &shake, shake_time);
    criterion_4(&mut report, &snap);
    criterion_5(&mut report, &shake, shake_time);
    criterion_6(&mut report, &snap);
    criterion_7(&mut report, &snap);
    criterion_8(&mut report);
    criterion_9(&mut report, &snap, &shake);
    println!("acceptance: {} of 9 criteria pass", 9 - report.failed.len());
    assert!(report.failed.is_empty(), "failing criteria: {:?}", report.failed);
}
