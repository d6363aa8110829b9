//! Per-lemma check suites producing [`LemmaRow`]s.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jumps::jumps;
use crate::lemmas::{
    chord_arc_ratio, lemma_a_check, lemma_a_chords, lemma_jj_limits, lemma_xy_chords, lemma_xy_recovery,
    polar_bounds, rel_err, sd_inputs, smoothness_probe_report, ProbeMode, SmoothnessProbeConfig,
};
use crate::param::NaturalCurve;
use crate::report::LemmaRow;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LemmaKind {
    P,
    D,
    A,
    Jj,
    Xy,
    Ns,
    Sd,
}

impl LemmaKind {
    pub const ALL: [LemmaKind; 7] = [
        LemmaKind::P,
        LemmaKind::D,
        LemmaKind::A,
        LemmaKind::Jj,
        LemmaKind::Xy,
        LemmaKind::Ns,
        LemmaKind::Sd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaKind::P => "p",
            LemmaKind::D => "d",
            LemmaKind::A => "a",
            LemmaKind::Jj => "jj",
            LemmaKind::Xy => "xy",
            LemmaKind::Ns => "ns",
            LemmaKind::Sd => "sd",
        }
    }
}

impl fmt::Display for LemmaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LemmaKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LemmaKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown lemma {s:?}")))
    }
}

/// Chords per strictly convex fixture in the slope suite.
pub const A_CHORDS: usize = 16;
/// Chords per corner fixture in the recovery suite.
pub const XY_CHORDS: usize = 8;
/// Smooth sample points per fixture in the `ns` suite.
pub const NS_SMOOTH_POINTS: usize = 64;

fn row(
    lemma: &'static str,
    fixture: &str,
    parameters: String,
    measured: f64,
    predicted: f64,
    pass: bool,
) -> LemmaRow {
    LemmaRow {
        lemma,
        fixture: fixture.to_string(),
        parameters,
        measured,
        predicted,
        abs_err: (measured - predicted).abs(),
        rel_err: rel_err(measured, predicted),
        pass,
    }
}

/// A bound check: `violation <= tol` where zero means the bound holds.
fn bound_row(lemma: &'static str, fixture: &str, name: &str, violation: f64, tol: f64) -> LemmaRow {
    row(
        lemma,
        fixture,
        format!("bound={name};tol={tol:e}"),
        violation.max(0.0),
        0.0,
        violation <= tol,
    )
}

pub fn run_lemma(kind: LemmaKind, fixture: &str, nc: &NaturalCurve) -> Result<Vec<LemmaRow>> {
    match kind {
        LemmaKind::P => Ok(check_p(fixture, nc)),
        LemmaKind::D => Ok(check_d(fixture, nc)),
        LemmaKind::A => check_a(fixture, nc),
        LemmaKind::Jj => check_jj(fixture, nc),
        LemmaKind::Xy => check_xy(fixture, nc),
        LemmaKind::Ns => check_ns(fixture, nc),
        LemmaKind::Sd => check_sd(fixture, nc),
    }
}

/// Antipodality on 128 angles, chord bounds on a 64×64 grid, speed bounds
/// on 256 angles.
pub fn check_p(fixture: &str, nc: &NaturalCurve) -> Vec<LemmaRow> {
    let grid = polar_bounds(nc, 64, 64);
    let anti = polar_bounds(nc, 128, 2);
    let speed = polar_bounds(nc, 256, 2);
    vec![
        bound_row("p", fixture, "antipodal", anti.antipodal, 1e-10),
        bound_row("p", fixture, "chord_lower", grid.chord_lower, 1e-9),
        bound_row("p", fixture, "chord_upper", grid.chord_upper, 1e-9),
        bound_row("p", fixture, "speed_lower", speed.speed_lower, 1e-6),
        bound_row("p", fixture, "speed_upper", speed.speed_upper, 1e-6),
    ]
}

/// Chord/arc ratio at 32 parameters for ε = 1e-4 and 1e-6.
pub fn check_d(fixture: &str, nc: &NaturalCurve) -> Vec<LemmaRow> {
    let total = nc.total_length();
    let mut rows = Vec::with_capacity(64);
    for k in 0..32 {
        let s = (k as f64 + 0.5) * total / 32.0;
        for (eps, tol) in [(1e-4, 1e-2), (1e-6, 1e-3)] {
            let ratio = chord_arc_ratio(nc, s, eps);
            rows.push(row(
                "d",
                fixture,
                format!("s={s:e};eps={eps:e}"),
                ratio,
                1.0,
                (ratio - 1.0).abs() <= tol,
            ));
        }
    }
    rows
}

/// One-sided slopes of the chord length on 16 chords; two rows per chord.
/// Each row also requires the slope agreement to match differentiability.
pub fn check_a(fixture: &str, nc: &NaturalCurve) -> Result<Vec<LemmaRow>> {
    if !nc.norm().is_strictly_convex() {
        return Err(Error::InvalidConfig(format!(
            "{fixture}: the slope check needs a strictly convex sphere"
        )));
    }
    let chords = lemma_a_chords(nc, A_CHORDS)?;
    let reports = chords
        .par_iter()
        .map(|&(a, b)| lemma_a_check(nc, a, b))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(2 * reports.len());
    for r in &reports {
        let consistent = r.differentiability_consistent() && r.y > 0.0;
        for (side, measured, predicted) in [
            ("right", r.extrapolated.right_slope, r.predicted_right),
            ("left", r.extrapolated.left_slope, r.predicted_left),
        ] {
            let mut x = row(
                "a",
                fixture,
                format!("a={:e};b={:e};s={:e};side={side};gap={:e}", r.a, r.b, r.s, r.gap),
                measured,
                predicted,
                false,
            );
            x.pass = x.rel_err <= 1e-2 && consistent;
            rows.push(x);
        }
    }
    Ok(rows)
}

/// Metric limits at each corner against the jumps computed from the
/// derivatives, after rebasing so the corner has parameter 0.
pub fn check_jj(fixture: &str, nc: &NaturalCurve) -> Result<Vec<LemmaRow>> {
    if nc.kinks().is_empty() {
        return Err(Error::NotACorner { gap: 0.0 });
    }
    let mut rows = Vec::new();
    for &k in nc.kinks() {
        let rebased = nc.rebased_at(k)?;
        let limits = lemma_jj_limits(&rebased)?;
        let j = jumps(&rebased, 0.0)?;
        for (name, measured, predicted) in [
            ("ratio", limits.ratio, j.ratio_limit()),
            ("slope", limits.slope, j.slope_limit()),
        ] {
            rows.push(row(
                "jj",
                fixture,
                format!("corner={k:e};limit={name}"),
                measured,
                predicted,
                (measured - predicted).abs() <= 1e-3,
            ));
        }
    }
    Ok(rows)
}

/// Derivatives recovered from distances on 8 chords along the corner
/// direction. Without corners the base curve is used as is, which fails
/// with a singular system.
pub fn check_xy(fixture: &str, nc: &NaturalCurve) -> Result<Vec<LemmaRow>> {
    let rebased = match nc.kinks().first() {
        Some(&k) => nc.rebased_at(k)?,
        None => nc.clone(),
    };
    let chords = lemma_xy_chords(&rebased, XY_CHORDS)?;
    let mut rows = Vec::with_capacity(chords.len());
    for (s, sbar) in chords {
        let rep = lemma_xy_recovery(&rebased, s, sbar)?;
        let err = rep.max_abs_err();
        rows.push(row(
            "xy",
            fixture,
            format!("s={s:e};sbar={sbar:e}"),
            err,
            0.0,
            rep.passes(1e-3),
        ));
    }
    Ok(rows)
}

/// Sample parameters for the smooth side of the probe suites: uniform,
/// pushed at least `clearance` away from every corner.
pub fn smooth_samples(nc: &NaturalCurve, count: usize, clearance: f64) -> Vec<f64> {
    let total = nc.total_length();
    (0..count)
        .filter_map(|k| {
            let base = (k as f64 + 0.37) * total / count as f64;
            [0.0, 2.0, -2.0, 4.0, -4.0]
                .iter()
                .map(|m| (base + m * clearance).rem_euclid(total))
                .find(|&s| nc.distance_to_kink(s) >= clearance)
        })
        .collect()
}

/// Corners found by the scan used for classification.
pub fn scan_corners(nc: &NaturalCurve) -> Result<Vec<f64>> {
    nc.nonsmooth_scan(1024, 1e-3)
}

/// `ns` probe on every scan-flagged corner and on 64 smooth points; the
/// probe must agree with the scan.
pub fn check_ns(fixture: &str, nc: &NaturalCurve) -> Result<Vec<LemmaRow>> {
    let cfg = SmoothnessProbeConfig::default();
    let corners = scan_corners(nc)?;
    let mut points: Vec<(f64, bool)> = corners.iter().map(|&s| (s, true)).collect();
    points.extend(
        smooth_samples(nc, NS_SMOOTH_POINTS, 0.02)
            .into_iter()
            .map(|s| (s, corners.iter().any(|&c| circular_gap(nc, s, c) < 1e-6))),
    );
    points
        .par_iter()
        .map(|&(s, expected)| {
            let rep = smoothness_probe_report(nc, nc.natural_point(s), ProbeMode::Ns, &cfg)?;
            let margin = rep.margins.iter().copied().fold(f64::INFINITY, f64::min);
            Ok(row(
                "ns",
                fixture,
                format!("s={s:e};min_margin={margin:e}"),
                f64::from(u8::from(rep.non_smooth)),
                f64::from(u8::from(expected)),
                rep.non_smooth == expected,
            ))
        })
        .collect()
}

fn circular_gap(nc: &NaturalCurve, a: f64, b: f64) -> f64 {
    let total = nc.total_length();
    let d = (a - b).rem_euclid(total);
    d.min(total - d)
}

/// Chord endpoint `b` and partner `a` for probing direction `c` with the
/// `sd` criterion.
fn sd_setup(nc: &NaturalCurve, c_param: f64) -> Result<(crate::vector::Vector2, crate::vector::Vector2)> {
    let c = nc.natural_point(c_param);
    let half = nc.half_length();
    for frac in [0.3, 0.7, 0.2, 0.8, 0.4, 0.6] {
        let b = c_param + frac * half;
        if nc.distance_to_kink(b) < 1e-2 {
            continue;
        }
        if let Ok((a, bp)) = sd_inputs(nc, c, b) {
            if nc.norm().dist(a, bp) > 0.05 {
                return Ok((a, bp));
            }
        }
    }
    Err(Error::InvalidConfig(format!(
        "no chord along r({c_param}) with a smooth leading end"
    )))
}

/// `sd` probe on every corner (expected non-smooth) and on 8 smooth
/// points (expected smooth).
pub fn check_sd(fixture: &str, nc: &NaturalCurve) -> Result<Vec<LemmaRow>> {
    let cfg = SmoothnessProbeConfig::default();
    let corners = scan_corners(nc)?;
    let mut points: Vec<(f64, bool)> = corners.iter().map(|&s| (s, true)).collect();
    points.extend(smooth_samples(nc, 8, 0.05).into_iter().map(|s| (s, false)));
    points
        .par_iter()
        .map(|&(s, expected)| {
            let (a, b) = sd_setup(nc, s)?;
            let rep = smoothness_probe_report(nc, nc.natural_point(s), ProbeMode::Sd { a, b }, &cfg)?;
            let margin = rep.margins.iter().copied().fold(f64::INFINITY, f64::min);
            Ok(row(
                "sd",
                fixture,
                format!("s={s:e};min_margin={margin:e}"),
                f64::from(u8::from(rep.non_smooth)),
                f64::from(u8::from(expected)),
                rep.non_smooth == expected,
            ))
        })
        .collect()
}
