//! Numerical checks of the asymptotic distance formulas on the sphere and
//! the metric recovery of jumps and derivatives.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::jumps::{chord_mate, JumpData};
use crate::numeric::{bisect_predicate, richardson_halving};
use crate::param::NaturalCurve;
use crate::vector::Vector2;

/// Gap above which a parameter is treated as a corner by the limit checks.
pub const CORNER_GAP: f64 = 1e-3;

/// Gap below which `r` counts as differentiable.
pub const DIFFERENTIABLE_GAP: f64 = 1e-6;

/// Step schedule of the limit estimates.
pub const LIMIT_SCHEDULE: [f64; 3] = [1e-3, 5e-4, 2.5e-4];

/// Step sizes reported by [`lemma_a_check`].
pub const SLOPE_STEPS: [f64; 3] = [1e-3, 1e-4, 1e-5];

/// Relative error with the floor used throughout the reports.
pub fn rel_err(measured: f64, predicted: f64) -> f64 {
    (measured - predicted).abs() / predicted.abs().max(1e-3)
}

/// `r(s)` in coordinates of the basis `(u, v)`.
fn coords_in(u: Vector2, v: Vector2, w: Vector2) -> (f64, f64) {
    let det = u.det(v);
    (w.det(v) / det, u.det(w) / det)
}

/// Left and right difference quotients of `ν(ε) = ‖r(b+ε) − r(a)‖`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeMeasurement {
    pub left_slope: f64,
    pub right_slope: f64,
    pub base_distance: f64,
    pub eps_used: f64,
}

#[derive(Clone, Debug)]
pub struct LemmaAReport {
    pub a: f64,
    pub b: f64,
    /// Parameter of the chord direction `(r(b) − r(a)) / ‖r(b) − r(a)‖`.
    pub s: f64,
    /// `r′(b) = x·r(s) + y·r′±(s)`.
    pub x: f64,
    pub y: f64,
    pub jumps: JumpData,
    /// `‖r′₊(s) − r′₋(s)‖`.
    pub gap: f64,
    pub predicted_left: f64,
    pub predicted_right: f64,
    /// One entry per step of [`SLOPE_STEPS`].
    pub measurements: Vec<SlopeMeasurement>,
    /// Richardson value from the steps 1e-4 and 5e-5.
    pub extrapolated: SlopeMeasurement,
}

impl LemmaAReport {
    pub fn rel_err_left(&self) -> f64 {
        rel_err(self.extrapolated.left_slope, self.predicted_left)
    }

    pub fn rel_err_right(&self) -> f64 {
        rel_err(self.extrapolated.right_slope, self.predicted_right)
    }

    pub fn max_rel_err(&self) -> f64 {
        self.rel_err_left().max(self.rel_err_right())
    }

    /// The measured slopes agree exactly when the sphere is differentiable
    /// at `s`: slopes within 1e-3 iff gap below 1e-4.
    pub fn differentiability_consistent(&self) -> bool {
        let agree = (self.extrapolated.left_slope - self.extrapolated.right_slope).abs() <= 1e-3;
        agree == (self.gap < 1e-4)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.y > 0.0 && self.max_rel_err() <= tol && self.differentiability_consistent()
    }
}

/// Compares the one-sided slopes of `ε ↦ ‖r(b+ε) − r(a)‖` at zero with
/// `x − sign(ε)·jr·y / (1 + sign(ε)·jt)`, the jumps taken at the chord
/// direction.
pub fn lemma_a_check(nc: &NaturalCurve, a: f64, b: f64) -> Result<LemmaAReport> {
    let norm = nc.norm();
    let db = nc.natural_derivatives(b);
    if norm.gauge(db.plus - db.minus) >= DIFFERENTIABLE_GAP {
        return Err(Error::NotDifferentiableAtB(b));
    }
    let ra = nc.natural_point(a);
    let rb = nc.natural_point(b);
    let base = norm.gauge(rb - ra);
    if !(base > 1e-12) {
        return Err(Error::CoincidentPoints);
    }
    let c = (rb - ra) / base;
    let s = nc.param_of(c);
    let dc = nc.derivatives_at_point(c);
    let jumps = JumpData::from_derivatives(c, &dc, s)?;
    let (x, y) = coords_in(c, dc.avg, db.avg);
    let predicted_right = x - jumps.jr * y / (1.0 + jumps.jt);
    let predicted_left = x + jumps.jr * y / (1.0 - jumps.jt);

    let nu = |e: f64| norm.gauge(nc.natural_point(b + e) - ra);
    let measure = |e: f64| SlopeMeasurement {
        left_slope: (nu(-e) - base) / -e,
        right_slope: (nu(e) - base) / e,
        base_distance: base,
        eps_used: e,
    };
    let measurements: Vec<SlopeMeasurement> = SLOPE_STEPS.iter().map(|&e| measure(e)).collect();
    let coarse = measure(1e-4);
    let fine = measure(5e-5);
    let extrapolated = SlopeMeasurement {
        left_slope: richardson_halving(coarse.left_slope, fine.left_slope),
        right_slope: richardson_halving(coarse.right_slope, fine.right_slope),
        base_distance: base,
        eps_used: 5e-5,
    };
    Ok(LemmaAReport {
        a,
        b,
        s,
        x,
        y,
        jumps,
        gap: norm.gauge(dc.plus - dc.minus),
        predicted_left,
        predicted_right,
        measurements,
        extrapolated,
    })
}

/// `frac(offset + k·alpha)`: a deterministic equidistributed sequence.
pub(crate) fn weyl(k: usize, alpha: f64, offset: f64) -> f64 {
    (offset + k as f64 * alpha).fract()
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;
const SQRT2_FRAC: f64 = 0.414_213_562_373_095_1;

/// For a smooth `b`, the parameter `a` with `r(b) − r(a)` a positive
/// multiple of `dir`, if the line through `r(b)` along `dir` is a chord
/// with `r(b)` at its leading end.
pub fn chord_partner(nc: &NaturalCurve, b: f64, dir: Vector2) -> Result<Option<f64>> {
    let rb = nc.natural_point(b);
    let m = chord_mate(nc, rb, -dir)?;
    if m.degenerate || m.lambda <= 0.0 {
        return Ok(None);
    }
    Ok(Some(nc.param_of(m.point)))
}

/// Chords `(a, b)` for the slope check: first one chord per corner with the
/// corner as chord direction, then generic chords whose endpoint `b` and
/// direction stay 1e-2 away from every corner.
pub fn lemma_a_chords(nc: &NaturalCurve, count: usize) -> Result<Vec<(f64, f64)>> {
    let total = nc.total_length();
    let mut chords = Vec::with_capacity(count);
    for &ks in nc.kinks().iter().take(count.min(4)) {
        let corner = nc.natural_point(ks);
        for frac in [0.3, 0.2, 0.4, 0.7, 0.8] {
            let b = ks + frac * nc.half_length();
            if nc.distance_to_kink(b) < 1e-2 {
                continue;
            }
            if let Some(a) = chord_partner(nc, b, corner)? {
                let base = nc.norm().dist(nc.natural_point(b), nc.natural_point(a));
                if base > 0.05 {
                    chords.push((a, b.rem_euclid(total)));
                    break;
                }
            }
        }
    }
    let mut k = 0;
    while chords.len() < count && k < 100 * count {
        k += 1;
        let b = total * weyl(k, GOLDEN, 0.13);
        let a = total * weyl(k, SQRT2_FRAC, 0.71);
        if nc.distance_to_kink(b) < 1e-2 {
            continue;
        }
        let ra = nc.natural_point(a);
        let rb = nc.natural_point(b);
        let base = nc.norm().gauge(rb - ra);
        if base < 0.1 {
            continue;
        }
        let s = nc.param_of((rb - ra) / base);
        if nc.distance_to_kink(s) < 1e-2 {
            continue;
        }
        chords.push((a, b));
    }
    Ok(chords)
}

/// Metric limits at a corner `r(0)` that determine its jumps.
#[derive(Clone, Debug)]
pub struct JjLimits {
    /// `lim ‖r(ε) − r(0)‖ / ‖x̄ + r(0)‖`, `x̄` the chord mate of `r(ε)` along `e1`.
    pub ratio: f64,
    /// `lim (‖r(ε) − x̄‖ − 2) / 2ε`.
    pub slope: f64,
    /// `‖r′₊(0) − r′₋(0)‖`.
    pub gap: f64,
    /// `(ε, ratio(ε), slope(ε))` for each step of [`LIMIT_SCHEDULE`].
    pub samples: Vec<(f64, f64, f64)>,
}

impl JjLimits {
    /// The jumps these limits determine.
    pub fn jumps(&self) -> JumpData {
        JumpData::from_limits(self.ratio, self.slope)
    }
}

/// Estimates both corner limits by order-one Richardson extrapolation
/// over [`LIMIT_SCHEDULE`]. `r(0) = e1` must be a corner.
pub fn lemma_jj_limits(nc: &NaturalCurve) -> Result<JjLimits> {
    let gap = crate::jumps::derivative_gap(nc, 0.0);
    if gap < CORNER_GAP {
        return Err(Error::NotACorner { gap });
    }
    lemma_jj_limits_unchecked(nc)
}

/// [`lemma_jj_limits`] without the corner check.
pub fn lemma_jj_limits_unchecked(nc: &NaturalCurve) -> Result<JjLimits> {
    let norm = nc.norm();
    let e1 = nc.space().e1();
    let r0 = nc.natural_point(0.0);
    let mut samples = Vec::with_capacity(LIMIT_SCHEDULE.len());
    for &e in &LIMIT_SCHEDULE {
        let x = nc.natural_point(e);
        let m = chord_mate(nc, x, e1)?;
        if m.degenerate {
            return Err(Error::InvalidConfig(format!(
                "chord along e1 through r({e}) is degenerate"
            )));
        }
        let ratio = norm.gauge(x - r0) / norm.gauge(m.point + r0);
        let slope = (norm.gauge(x - m.point) - 2.0) / (2.0 * e);
        samples.push((e, ratio, slope));
    }
    let n = samples.len();
    let (ratio, slope) = (
        richardson_halving(samples[n - 2].1, samples[n - 1].1),
        richardson_halving(samples[n - 2].2, samples[n - 1].2),
    );
    Ok(JjLimits {
        ratio,
        slope,
        gap: crate::jumps::derivative_gap(nc, 0.0),
        samples,
    })
}

/// `r′(s) = x·e1 + y·e2` and `r′(s̄) = x̄·e1 + ȳ·e2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecoveredDerivatives {
    pub x: f64,
    pub y: f64,
    pub xbar: f64,
    pub ybar: f64,
}

impl RecoveredDerivatives {
    pub fn max_abs_diff(&self, other: &RecoveredDerivatives) -> f64 {
        [
            self.x - other.x,
            self.y - other.y,
            self.xbar - other.xbar,
            self.ybar - other.ybar,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
    }
}

#[derive(Clone, Debug)]
pub struct XyReport {
    pub s: f64,
    pub sbar: f64,
    /// From the four metric limits.
    pub recovered: RecoveredDerivatives,
    /// From the derivatives themselves, in the basis `(e1, r′±(0))`.
    pub direct: RecoveredDerivatives,
    /// Jumps at 0 as determined by the metric.
    pub jumps: JumpData,
    /// Richardson values of the limits of items (2)–(5).
    pub limits: [f64; 4],
}

impl XyReport {
    pub fn max_abs_err(&self) -> f64 {
        self.recovered.max_abs_diff(&self.direct)
    }

    pub fn signs_ok(&self) -> bool {
        self.recovered.y > 0.0 && self.recovered.ybar < 0.0
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.signs_ok() && self.max_abs_err() <= tol
    }
}

/// Recovers `r′(s)` and `r′(s̄)` from distances alone.
///
/// The chord `r(s) − r(s̄)` must be a positive multiple of `e1 = r(0)`, a
/// corner. The jumps at 0 come from [`lemma_jj_limits_unchecked`]; the two
/// one-sided slopes then give `(x, y)`, the ratio of matched offsets gives
/// `ȳ` and the chord-length slope gives `x̄`.
pub fn lemma_xy_recovery(nc: &NaturalCurve, s: f64, sbar: f64) -> Result<XyReport> {
    let norm = nc.norm();
    let e1 = nc.space().e1();
    let rs = nc.natural_point(s);
    let rsb = nc.natural_point(sbar);
    let d0 = norm.gauge(rs - rsb);
    if !(d0 > 1e-12) {
        return Err(Error::CoincidentPoints);
    }
    let misalignment = norm.gauge((rs - rsb) / d0 - e1);
    if misalignment > 1e-8 {
        return Err(Error::BadChordAlignment(misalignment));
    }
    if norm.gauge(rs - e1) < 1e-9 || norm.gauge(rs + e1) < 1e-9 {
        return Err(Error::BadChordAlignment(0.0));
    }
    let jj = lemma_jj_limits_unchecked(nc)?;
    let jumps = jj.jumps();
    let a_coef = jumps.jr / (1.0 + jumps.jt);
    let b_coef = jumps.jr / (1.0 - jumps.jt);
    let det = a_coef + b_coef;
    if jumps.jr > -1e-4 || det.abs() < 1e-12 {
        return Err(Error::SingularSystem { det });
    }

    let items = |e: f64| -> Result<[f64; 4]> {
        let xe = nc.natural_point(s + e);
        let mate = chord_mate(nc, xe, e1)?;
        let m2 = norm.gauge(mate.point - rsb) / norm.gauge(xe - rs);
        let m3 = (norm.gauge(xe - mate.point) - d0) / e;
        let m4 = (norm.gauge(xe - rsb) - d0) / e;
        let m5 = (norm.gauge(nc.natural_point(s - e) - rsb) - d0) / -e;
        Ok([m2, m3, m4, m5])
    };
    let n = LIMIT_SCHEDULE.len();
    let coarse = items(LIMIT_SCHEDULE[n - 2])?;
    let fine = items(LIMIT_SCHEDULE[n - 1])?;
    let mut limits = [0.0; 4];
    for i in 0..4 {
        limits[i] = richardson_halving(coarse[i], fine[i]);
    }
    let [m2, m3, m4, m5] = limits;
    let y = (m5 - m4) / det;
    let x = m4 + a_coef * y;
    let ybar = -y / m2;
    let xbar = (x - m3) * ybar / y;

    let avg0 = nc.natural_derivatives(0.0).avg;
    let ds = nc.natural_derivatives(s).avg;
    let dsb = nc.natural_derivatives(sbar).avg;
    let (dx, dy) = coords_in(e1, avg0, ds);
    let (dxb, dyb) = coords_in(e1, avg0, dsb);
    Ok(XyReport {
        s,
        sbar,
        recovered: RecoveredDerivatives { x, y, xbar, ybar },
        direct: RecoveredDerivatives {
            x: dx,
            y: dy,
            xbar: dxb,
            ybar: dyb,
        },
        jumps,
        limits,
    })
}

/// Pairs `(s, s̄)` with `r(s) − r(s̄)` a positive multiple of `e1`, both
/// parameters in the upper half and away from the corners and from the
/// point where the `e1`-chord degenerates.
pub fn lemma_xy_chords(nc: &NaturalCurve, count: usize) -> Result<Vec<(f64, f64)>> {
    let l = nc.half_length();
    let e1 = nc.space().e1();
    let mut out = Vec::with_capacity(count);
    let mut k = 0;
    while out.len() < count && k < 50 * count.max(1) {
        let frac = 0.08 + 0.84 * weyl(k, GOLDEN, 0.05);
        k += 1;
        let s = frac * l;
        let m = chord_mate(nc, nc.natural_point(s), e1)?;
        if m.degenerate || m.lambda.abs() < 0.05 {
            continue;
        }
        let other = nc.param_of(m.point);
        let (s, sbar) = if m.lambda < 0.0 { (s, other) } else { (other, s) };
        if nc.distance_to_kink(s) < 0.02 || nc.distance_to_kink(sbar) < 0.02 {
            continue;
        }
        out.push((s, sbar));
    }
    Ok(out)
}

/// Parameters of the smoothness probes.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothnessProbeConfig {
    pub delta: f64,
    pub eps0: f64,
    /// Strictly decreasing, all below `eps0`.
    pub eps_schedule: Vec<f64>,
}

impl Default for SmoothnessProbeConfig {
    fn default() -> Self {
        SmoothnessProbeConfig {
            delta: 0.1,
            eps0: 1e-2,
            eps_schedule: vec![1e-3, 5e-4, 2.5e-4, 1e-4],
        }
    }
}

impl SmoothnessProbeConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return bad("delta must be positive");
        }
        if !(self.eps0 > 0.0 && self.eps0.is_finite()) {
            return bad("eps0 must be positive");
        }
        if self.eps_schedule.is_empty() {
            return bad("eps schedule is empty");
        }
        if self.eps_schedule.iter().any(|&e| !(e > 0.0 && e < self.eps0)) {
            return bad("every eps must lie in (0, eps0)");
        }
        if self.eps_schedule.windows(2).any(|w| w[1] >= w[0]) {
            return bad("eps schedule must be strictly decreasing");
        }
        Ok(())
    }
}

/// Which criterion [`smoothness_probe`] applies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProbeMode {
    /// Points near `p` and `−p`.
    Ns,
    /// Points at distance ε from a smooth `b` where `b − a` is a positive
    /// multiple of the probed point.
    Sd { a: Vector2, b: Vector2 },
}

#[derive(Clone, Debug)]
pub struct ProbeReport {
    /// True when every step of the schedule produced witnesses.
    pub non_smooth: bool,
    /// Per step: how far the witnesses clear the bound (positive = witness).
    pub margins: Vec<f64>,
}

/// Smallest `h > 0` with `‖r(s0 + dir·h) − r(s0)‖ = target`.
fn offset_at_distance(nc: &NaturalCurve, s0: f64, dir: f64, target: f64) -> f64 {
    let norm = nc.norm();
    let p0 = nc.natural_point(s0);
    let d = |h: f64| norm.gauge(nc.natural_point(s0 + dir * h) - p0);
    let mut hi = 2.0 * target;
    while d(hi) < target && hi < 1.0 {
        hi *= 2.0;
    }
    let (lo, hi) = bisect_predicate(0.0, hi, 200, |h| d(h) < target);
    0.5 * (lo + hi)
}

/// Metric test for non-smoothness of a sphere point.
///
/// `Ns`: for each ε take `x = r(σ + ε₊)` and `y = −r(σ − ε₋)` with
/// `‖x − p‖ = ‖y + p‖ = 0.999ε` on the two sides of `p = r(σ)`; the point is
/// reported non-smooth when `‖x − y‖ < 2 − δε` for every ε.
///
/// `Sd`: with `β` the parameter of `b`, `x = r(β + ε₊)` and `y = r(β − ε₋)`
/// at distance ε from `b`; non-smooth when
/// `‖x − a‖ + ‖y − a‖ > 2‖b − a‖ + δε` for every ε.
pub fn smoothness_probe(
    nc: &NaturalCurve,
    point: Vector2,
    mode: ProbeMode,
    cfg: &SmoothnessProbeConfig,
) -> Result<bool> {
    smoothness_probe_report(nc, point, mode, cfg).map(|r| r.non_smooth)
}

/// [`smoothness_probe`] with the per-step margins.
pub fn smoothness_probe_report(
    nc: &NaturalCurve,
    point: Vector2,
    mode: ProbeMode,
    cfg: &SmoothnessProbeConfig,
) -> Result<ProbeReport> {
    cfg.validate()?;
    let norm = nc.norm();
    if (norm.gauge(point) - 1.0).abs() > 1e-8 {
        return Err(Error::NotOnSphere(format!("{point}")));
    }
    let mut margins = Vec::with_capacity(cfg.eps_schedule.len());
    match mode {
        ProbeMode::Ns => {
            let sp = nc.param_of(point);
            let p = nc.natural_point(sp);
            for &e in &cfg.eps_schedule {
                let target = 0.999 * e;
                let hp = offset_at_distance(nc, sp, 1.0, target);
                let hm = offset_at_distance(nc, sp, -1.0, target);
                let x = nc.natural_point(sp + hp);
                let y = -nc.natural_point(sp - hm);
                debug_assert!(norm.gauge(x - p) < e && norm.gauge(y + p) < e);
                margins.push(2.0 - cfg.delta * e - norm.gauge(x - y));
            }
        }
        ProbeMode::Sd { a, b } => {
            for (name, v) in [("a", a), ("b", b)] {
                if (norm.gauge(v) - 1.0).abs() > 1e-8 {
                    return Err(Error::NotOnSphere(format!("{name} = {v}")));
                }
            }
            let base = norm.gauge(b - a);
            if !(base > 1e-12) {
                return Err(Error::CoincidentPoints);
            }
            let misalignment = norm.gauge((b - a) / base - point);
            if misalignment > 1e-8 {
                return Err(Error::InvalidConfig(format!(
                    "b - a is not a positive multiple of the probed point (off by {misalignment:e})"
                )));
            }
            let beta = nc.param_of(b);
            if crate::jumps::derivative_gap(nc, beta) >= DIFFERENTIABLE_GAP {
                return Err(Error::NotDifferentiableAtB(beta));
            }
            for &e in &cfg.eps_schedule {
                let hp = offset_at_distance(nc, beta, 1.0, e);
                let hm = offset_at_distance(nc, beta, -1.0, e);
                let x = nc.natural_point(beta + hp);
                let y = nc.natural_point(beta - hm);
                margins.push(norm.gauge(x - a) + norm.gauge(y - a) - 2.0 * base - cfg.delta * e);
            }
        }
    }
    Ok(ProbeReport {
        non_smooth: margins.iter().all(|&m| m > 0.0),
        margins,
    })
}

/// Inputs `(a, b)` for the `Sd` probe of the point `c`: `b = r(b_param)`
/// and `a` its chord partner along `c`.
pub fn sd_inputs(nc: &NaturalCurve, c: Vector2, b_param: f64) -> Result<(Vector2, Vector2)> {
    match chord_partner(nc, b_param, c)? {
        Some(a) => Ok((nc.natural_point(a), nc.natural_point(b_param))),
        None => Err(Error::InvalidConfig(format!(
            "r({b_param}) is not the leading end of a chord along {c}"
        ))),
    }
}

/// Worst violations of the bounds of the polar parameterization.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PolarBoundsReport {
    /// `max(p(t+π) + p(t))`.
    pub antipodal: f64,
    /// `max(c/C·|sin ε| − ‖p(t+ε) − p(t)‖)`.
    pub chord_lower: f64,
    /// `max(‖p(t+ε) − p(t)‖ − 2C²/c²·|ε|)`.
    pub chord_upper: f64,
    /// `max(c/C − ‖p′±(t)‖)`.
    pub speed_lower: f64,
    /// `max(‖p′±(t)‖ − 2C²/c²)`.
    pub speed_upper: f64,
}

impl PolarBoundsReport {
    pub fn max_violation(&self) -> f64 {
        self.chord_lower
            .max(self.chord_upper)
            .max(self.speed_lower)
            .max(self.speed_upper)
    }
}

/// Checks the polar bounds on an `n_t × n_eps` grid of `t ∈ [0, 2π)` and
/// `ε ∈ [−1, 1]`, and the speed bounds and antipodality at every `t`.
/// Violations are reported as positive numbers; zero means none.
pub fn polar_bounds(nc: &NaturalCurve, n_t: usize, n_eps: usize) -> PolarBoundsReport {
    let polar = nc.polar();
    let space = nc.space();
    let norm = nc.norm();
    let (c, big_c) = (space.c(), space.big_c());
    let lower_k = c / big_c;
    let upper_k = 2.0 * big_c * big_c / (c * c);
    let mut rep = PolarBoundsReport::default();
    for i in 0..n_t {
        let t = 2.0 * PI * i as f64 / n_t as f64;
        let p = polar.point(t);
        rep.antipodal = rep.antipodal.max(norm.gauge(polar.point(t + PI) + p));
        let d = polar.derivatives(t);
        for v in [d.minus, d.plus] {
            let sp = norm.gauge(v);
            rep.speed_lower = rep.speed_lower.max(lower_k - sp);
            rep.speed_upper = rep.speed_upper.max(sp - upper_k);
        }
        for j in 0..n_eps {
            let e = -1.0 + 2.0 * j as f64 / (n_eps - 1).max(1) as f64;
            let dist = norm.gauge(polar.point(t + e) - p);
            rep.chord_lower = rep.chord_lower.max(lower_k * e.sin().abs() - dist);
            rep.chord_upper = rep.chord_upper.max(dist - upper_k * e.abs());
        }
    }
    rep
}

/// `‖r(s+ε) − r(s)‖ / |ε|`.
pub fn chord_arc_ratio(nc: &NaturalCurve, s: f64, eps: f64) -> f64 {
    nc.norm().gauge(nc.natural_point(s + eps) - nc.natural_point(s)) / eps.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::{Norm2D, NormSpec};
    use crate::param::BasedSpace;
    use std::f64::consts::SQRT_2;

    fn curve(spec: NormSpec) -> NaturalCurve {
        NaturalCurve::new(BasedSpace::standard(Norm2D::new(spec).unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn euclidean_antipodal_chord_has_flat_slopes() {
        let e = curve(NormSpec::PNorm { p: 2.0 });
        let rep = lemma_a_check(&e, e.arc_length(1.5 * PI), e.arc_length(0.5 * PI)).unwrap();
        assert!(rep.predicted_left.abs() < 1e-12 && rep.predicted_right.abs() < 1e-12);
        let m = rep.measurements[1];
        assert!(m.left_slope.abs() < 1e-3 && m.right_slope.abs() < 1e-3);
        assert!(rep.passes(1e-2));
    }

    #[test]
    fn lens_corner_chord_slopes_split() {
        let lens = curve(NormSpec::Lens { beta: 0.0 });
        let b = 0.3 * lens.half_length();
        let a = chord_partner(&lens, b, Vector2::new(1.0, 0.0)).unwrap().unwrap();
        let rep = lemma_a_check(&lens, a, b).unwrap();
        assert!(rep.s.abs() < 1e-9 || (rep.s - lens.total_length()).abs() < 1e-9);
        let split = rep.predicted_right - rep.predicted_left;
        assert!((split - 2.0 * (SQRT_2 - 1.0) * rep.y).abs() < 1e-9);
        assert!(rep.passes(1e-2), "{rep:?}");
    }

    #[test]
    fn coincident_and_corner_endpoints_are_rejected() {
        let lens = curve(NormSpec::Lens { beta: 0.0 });
        assert!(matches!(
            lemma_a_check(&lens, 0.5, 0.5),
            Err(Error::CoincidentPoints)
        ));
        assert!(matches!(
            lemma_a_check(&lens, 0.5, 0.0),
            Err(Error::NotDifferentiableAtB(_))
        ));
    }

    #[test]
    fn jj_limits_on_lens0() {
        let lens = curve(NormSpec::Lens { beta: 0.0 });
        let jj = lemma_jj_limits(&lens).unwrap();
        assert!((jj.ratio - 1.0).abs() < 1e-3);
        assert!((jj.slope - (1.0 - SQRT_2)).abs() < 1e-3);
        let e = curve(NormSpec::PNorm { p: 2.0 });
        assert!(matches!(lemma_jj_limits(&e), Err(Error::NotACorner { .. })));
        assert!(lemma_jj_limits_unchecked(&e).unwrap().slope.abs() < 1e-4);
    }

    #[test]
    fn probe_config_validation() {
        let mut cfg = SmoothnessProbeConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.eps_schedule = vec![1e-4, 1e-3];
        assert!(cfg.validate().is_err());
        cfg.eps_schedule = vec![0.5];
        assert!(cfg.validate().is_err());
        cfg = SmoothnessProbeConfig {
            delta: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn ns_probe_on_corners_and_smooth_points() {
        let cfg = SmoothnessProbeConfig::default();
        let lens = curve(NormSpec::Lens { beta: 0.0 });
        assert!(smoothness_probe(&lens, Vector2::new(1.0, 0.0), ProbeMode::Ns, &cfg).unwrap());
        let top = lens.natural_point(0.5 * lens.half_length());
        assert!(!smoothness_probe(&lens, top, ProbeMode::Ns, &cfg).unwrap());
        let e = curve(NormSpec::PNorm { p: 2.0 });
        assert!(!smoothness_probe(&e, Vector2::new(1.0, 0.0), ProbeMode::Ns, &cfg).unwrap());
        let hex = curve(NormSpec::regular_polygon(3));
        assert!(smoothness_probe(&hex, Vector2::new(1.0, 0.0), ProbeMode::Ns, &cfg).unwrap());
    }

    #[test]
    fn sd_probe_on_lens0() {
        let cfg = SmoothnessProbeConfig::default();
        let lens = curve(NormSpec::Lens { beta: 0.0 });
        let c = Vector2::new(1.0, 0.0);
        let (a, b) = sd_inputs(&lens, c, 0.3 * lens.half_length()).unwrap();
        assert!(smoothness_probe(&lens, c, ProbeMode::Sd { a, b }, &cfg).unwrap());
        let top = lens.natural_point(0.5 * lens.half_length());
        let (a, b) = sd_inputs(&lens, top, 0.2 * lens.half_length()).unwrap();
        assert!(!smoothness_probe(&lens, top, ProbeMode::Sd { a, b }, &cfg).unwrap());
    }

    #[test]
    fn polar_bounds_hold_on_lens() {
        let lens = curve(NormSpec::Lens { beta: 0.2 });
        let rep = polar_bounds(&lens, 64, 64);
        assert!(rep.max_violation() <= 1e-9, "{rep:?}");
        assert!(rep.antipodal < 1e-10);
    }

    #[test]
    fn jj_limits_match_jumps_on_lens02() {
        let lens = curve(NormSpec::Lens { beta: 0.2 }).rebased_at(0.0).unwrap();
        let j = crate::jumps::jumps(&lens, 0.0).unwrap();
        let jj = lemma_jj_limits(&lens).unwrap();
        assert!((jj.ratio - j.ratio_limit()).abs() < 1e-3, "{jj:?} {j:?}");
        assert!((jj.slope - j.slope_limit()).abs() < 1e-3, "{jj:?} {j:?}");
    }

    #[test]
    fn xy_recovery_round_trips_on_lens() {
        for beta in [0.0, 0.2, -0.1] {
            let lens = curve(NormSpec::Lens { beta }).rebased_at(0.0).unwrap();
            let chords = lemma_xy_chords(&lens, 8).unwrap();
            assert_eq!(chords.len(), 8);
            for (s, sbar) in chords {
                let rep = lemma_xy_recovery(&lens, s, sbar).unwrap();
                assert!(rep.passes(1e-3), "beta={beta} {rep:?}");
            }
        }
        let e = curve(NormSpec::PNorm { p: 2.0 });
        let th: f64 = 1.0;
        let (s, sbar) = (e.arc_length(th), e.arc_length(PI - th));
        assert!(matches!(
            lemma_xy_recovery(&e, s, sbar),
            Err(Error::SingularSystem { .. })
        ));
    }
}
