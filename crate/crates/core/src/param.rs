//! Polar and natural parameterizations of the unit sphere of a based plane.
//!
//! For a basis `e1, e2` the polar curve is `p(t) = e(t) / ‖e(t)‖` with
//! `e(t) = cos t·e1 + sin t·e2`. The arc length `s(t) = ∫₀ᵗ ‖p′₊‖` is
//! tabulated once; the natural curve is `r = p ∘ t` where `t` inverts `s`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::norm::Norm2D;
use crate::numeric::{adaptive_simpson, golden_min, newton_bracketed};
use crate::vector::{LinearMap2x2, Vector2};

/// Grid size used to locate the extremes of `t ↦ ‖e(t)‖`.
const EXTREMA_GRID: usize = 4096;

/// Uniform t-nodes of the arc-length table over one period.
pub const TABLE_NODES: usize = 8192;

/// Absolute quadrature tolerance per table segment.
const SEGMENT_TOL: f64 = 1e-14;

/// One-sided derivatives at a point of a curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativePair {
    pub minus: Vector2,
    pub plus: Vector2,
    /// `(minus + plus) / 2`.
    pub avg: Vector2,
}

impl DerivativePair {
    pub fn new(minus: Vector2, plus: Vector2) -> Self {
        DerivativePair {
            minus,
            plus,
            avg: 0.5 * (minus + plus),
        }
    }
}

/// A norm together with a basis of the plane.
#[derive(Clone, Debug)]
pub struct BasedSpace {
    norm: Norm2D,
    e1: Vector2,
    e2: Vector2,
    /// `e1`, `e2` as columns.
    frame: LinearMap2x2,
    frame_inv: LinearMap2x2,
    c: f64,
    big_c: f64,
}

impl BasedSpace {
    /// `e1` must lie on the sphere (within 1e-9) and be independent of `e2`.
    ///
    /// Either orientation is accepted. The curve always runs from `e1`
    /// towards `e2`, so for `det(e1, e2) < 0` it is traversed clockwise.
    pub fn new(norm: Norm2D, e1: Vector2, e2: Vector2) -> Result<Self> {
        if !e1.is_finite() || !e2.is_finite() {
            return Err(Error::InvalidConfig("basis vector is not finite".into()));
        }
        if (norm.gauge(e1) - 1.0).abs() > 1e-9 {
            return Err(Error::NotOnSphere(format!("e1 = {e1}")));
        }
        let frame = LinearMap2x2::from_columns(e1, e2);
        if frame.det().abs() <= 1e-12 * e1.euclid() * e2.euclid() {
            return Err(Error::DependentBasis);
        }
        let frame_inv = frame.inverse().ok_or(Error::DependentBasis)?;
        let mut space = BasedSpace {
            norm,
            e1,
            e2,
            frame,
            frame_inv,
            c: 0.0,
            big_c: 0.0,
        };
        let (c, big_c) = space.gauge_extremes();
        space.c = c;
        space.big_c = big_c;
        Ok(space)
    }

    /// The standard basis with `e1` scaled onto the sphere.
    pub fn standard(norm: Norm2D) -> Result<Self> {
        let e1 = norm.scale_to_sphere(Vector2::new(1.0, 0.0))?;
        BasedSpace::new(norm, e1, Vector2::new(0.0, 1.0))
    }

    /// The basis used by the fixtures and the command line for a norm:
    /// the standard one, except for polygons (`e1, e2` = first two
    /// vertices), the double lens (two adjacent corners) and transforms
    /// (image of the base basis, kept counterclockwise).
    pub fn default_for(norm: Norm2D) -> Result<Self> {
        let (e1, e2) = default_basis(&norm)?;
        BasedSpace::new(norm, e1, e2)
    }

    /// Same norm, new basis.
    pub fn rebase(&self, e1: Vector2, e2: Vector2) -> Result<Self> {
        BasedSpace::new(self.norm.clone(), e1, e2)
    }

    pub fn norm(&self) -> &Norm2D {
        &self.norm
    }

    pub fn e1(&self) -> Vector2 {
        self.e1
    }

    pub fn e2(&self) -> Vector2 {
        self.e2
    }

    /// `min_t ‖e(t)‖`.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// `max_t ‖e(t)‖`.
    pub fn big_c(&self) -> f64 {
        self.big_c
    }

    /// `det(e1, e2)`.
    pub fn det(&self) -> f64 {
        self.frame.det()
    }

    /// True when `det(e1, e2) > 0`.
    pub fn is_counterclockwise(&self) -> bool {
        self.det() > 0.0
    }

    /// `cos t·e1 + sin t·e2`.
    #[inline]
    pub fn e(&self, t: f64) -> Vector2 {
        let (s, c) = t.sin_cos();
        c * self.e1 + s * self.e2
    }

    /// Coordinates of `v` in the basis.
    pub fn coords(&self, v: Vector2) -> (f64, f64) {
        let w = self.frame_inv.apply(v);
        (w.x, w.y)
    }

    /// Polar angle of `v` in the basis, in `[0, 2π)`.
    pub fn angle_of(&self, v: Vector2) -> f64 {
        let (a, b) = self.coords(v);
        let t = b.atan2(a);
        if t < 0.0 {
            let w = t + TAU;
            if w >= TAU {
                0.0
            } else {
                w
            }
        } else {
            t
        }
    }

    /// Boundary directions at the sphere point `q` in the direction of
    /// motion of the curve: `(arriving, leaving)`.
    pub fn motion_directions(&self, q: Vector2) -> (Vector2, Vector2) {
        let (inc, out) = self.norm.tangent_cone(q);
        if self.is_counterclockwise() {
            (inc, out)
        } else {
            (-out, -inc)
        }
    }

    fn gauge_extremes(&self) -> (f64, f64) {
        // ‖e(t)‖ has period π.
        let h = PI / EXTREMA_GRID as f64;
        let f = |t: f64| self.norm.gauge(self.e(t));
        let values: Vec<f64> = (0..EXTREMA_GRID).map(|k| f(k as f64 * h)).collect();
        let (kmin, vmin) = arg_extreme(&values, |a, b| a < b);
        let (kmax, vmax) = arg_extreme(&values, |a, b| a > b);
        let t_min = kmin as f64 * h;
        let t_max = kmax as f64 * h;
        let (_, gmin) = golden_min(f, t_min - h, t_min + h, 1e-10);
        let (_, gmax) = golden_min(|t| -f(t), t_max - h, t_max + h, 1e-10);
        (vmin.min(gmin), vmax.max(-gmax))
    }
}

fn arg_extreme(values: &[f64], better: impl Fn(f64, f64) -> bool) -> (usize, f64) {
    let mut best = (0, values[0]);
    for (k, &v) in values.iter().enumerate().skip(1) {
        if better(v, best.1) {
            best = (k, v);
        }
    }
    best
}

fn default_basis(norm: &Norm2D) -> Result<(Vector2, Vector2)> {
    use crate::norm::NormSpec;
    fn base_basis(spec: &NormSpec) -> (Vector2, Vector2) {
        match spec {
            NormSpec::Polygon { vertices } => (vertices[0], vertices[1]),
            NormSpec::DoubleLens => {
                let a = std::f64::consts::SQRT_2 - 1.0;
                (Vector2::new(a, a), Vector2::new(-a, a))
            }
            NormSpec::Transform { base, matrix } => {
                let (u, v) = base_basis(base);
                let (u, v) = (matrix.apply(u), matrix.apply(v));
                if u.det(v) < 0.0 {
                    (u, -v)
                } else {
                    (u, v)
                }
            }
            _ => (Vector2::new(1.0, 0.0), Vector2::new(0.0, 1.0)),
        }
    }
    let (e1, e2) = base_basis(norm.spec());
    Ok((norm.scale_to_sphere(e1)?, e2))
}

/// The polar parameterization `p`.
#[derive(Clone, Debug)]
pub struct PolarCurve {
    space: BasedSpace,
}

impl PolarCurve {
    pub fn new(space: BasedSpace) -> Self {
        PolarCurve { space }
    }

    pub fn space(&self) -> &BasedSpace {
        &self.space
    }

    /// `p(t)`.
    #[inline]
    pub fn point(&self, t: f64) -> Vector2 {
        let e = self.space.e(t);
        e / self.space.norm.gauge(e)
    }

    /// One-sided derivatives `p′₋(t)`, `p′₊(t)`.
    ///
    /// Computed from the boundary tangents: if `τ` is the direction of
    /// motion then `p′ = ‖e‖⁻² det(e1, e2) / det(p, τ) · τ`.
    pub fn derivatives(&self, t: f64) -> DerivativePair {
        let (p, rho) = self.point_and_rho(t);
        let (arr, lea) = self.space.motion_directions(p);
        DerivativePair::new(self.velocity(p, rho, arr), self.velocity(p, rho, lea))
    }

    /// `‖p′₊(t)‖`.
    pub fn speed_plus(&self, t: f64) -> f64 {
        let (p, rho) = self.point_and_rho(t);
        let (_, lea) = self.space.motion_directions(p);
        self.space.norm.gauge(self.velocity(p, rho, lea))
    }

    /// `‖p′₋(t)‖`.
    pub fn speed_minus(&self, t: f64) -> f64 {
        let (p, rho) = self.point_and_rho(t);
        let (arr, _) = self.space.motion_directions(p);
        self.space.norm.gauge(self.velocity(p, rho, arr))
    }

    /// One-sided derivatives by Richardson extrapolation of difference
    /// quotients at `h` and `h/2`. Used to cross-check
    /// [`PolarCurve::derivatives`].
    pub fn derivatives_numeric(&self, t: f64, h: f64) -> DerivativePair {
        let p0 = self.point(t);
        let d = |k: f64| (self.point(t + k) - p0) / k;
        let plus = richardson_halving_vec(d(h), d(h / 2.0));
        let minus = richardson_halving_vec(d(-h), d(-h / 2.0));
        DerivativePair::new(minus, plus)
    }

    #[inline]
    fn point_and_rho(&self, t: f64) -> (Vector2, f64) {
        let e = self.space.e(t);
        let rho = 1.0 / self.space.norm.gauge(e);
        (e * rho, rho)
    }

    #[inline]
    fn velocity(&self, p: Vector2, rho: f64, dir: Vector2) -> Vector2 {
        let k = rho * rho * self.space.det() / p.det(dir);
        dir * k
    }
}

fn richardson_halving_vec(at_h: Vector2, at_half_h: Vector2) -> Vector2 {
    2.0 * at_half_h - at_h
}

/// The natural (arc-length) parameterization `r`.
#[derive(Clone, Debug)]
pub struct NaturalCurve {
    polar: PolarCurve,
    nodes_t: Vec<f64>,
    nodes_s: Vec<f64>,
    kinks_t: Vec<f64>,
    kinks_s: Vec<f64>,
    half_length: f64,
    total_length: f64,
}

impl NaturalCurve {
    /// Tabulates `s` on `[0, 2π]`: 8192 uniform nodes plus the kink
    /// parameters, adaptive Simpson on every segment.
    pub fn new(space: BasedSpace) -> Result<Self> {
        let polar = PolarCurve::new(space);
        let kinks_t = kink_parameters(&polar);
        let nodes_t = merge_nodes(&kinks_t);
        let mut nodes_s = Vec::with_capacity(nodes_t.len());
        nodes_s.push(0.0);
        let speed = |t: f64| polar.speed_plus(t);
        for w in nodes_t.windows(2) {
            let (a, b) = (w[0], w[1]);
            let piece = adaptive_simpson(
                &speed,
                a,
                b,
                polar.speed_plus(a),
                polar.speed_minus(b),
                SEGMENT_TOL,
            )?;
            let last = *nodes_s.last().unwrap_or(&0.0);
            nodes_s.push(last + piece);
        }
        let pi_index = nodes_t.iter().position(|&t| t == PI).expect("π is always a node");
        let half_length = nodes_s[pi_index];
        let total_length = *nodes_s.last().unwrap_or(&0.0);
        let mut curve = NaturalCurve {
            polar,
            nodes_t,
            nodes_s,
            kinks_t,
            kinks_s: Vec::new(),
            half_length,
            total_length,
        };
        curve.kinks_s = curve.kinks_t.iter().map(|&t| curve.arc_length(t)).collect();
        Ok(curve)
    }

    /// Natural curve of [`BasedSpace::default_for`].
    pub fn for_norm(norm: Norm2D) -> Result<Self> {
        NaturalCurve::new(BasedSpace::default_for(norm)?)
    }

    /// The same sphere with `e1 = r(s0)` and `e2 = r′±(s0)`.
    pub fn rebased_at(&self, s0: f64) -> Result<Self> {
        let e1 = self.natural_point(s0);
        let e2 = self.natural_derivatives(s0).avg;
        NaturalCurve::new(self.space().rebase(e1, e2)?)
    }

    pub fn space(&self) -> &BasedSpace {
        &self.polar.space
    }

    pub fn norm(&self) -> &Norm2D {
        &self.polar.space.norm
    }

    pub fn polar(&self) -> &PolarCurve {
        &self.polar
    }

    /// `L = s(π)`.
    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    /// `s(2π) = 2L`.
    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    /// Polar parameters of the corners in `[0, 2π)`.
    pub fn kink_parameters(&self) -> &[f64] {
        &self.kinks_t
    }

    /// Natural parameters of the corners in `[0, 2L)`.
    pub fn kinks(&self) -> &[f64] {
        &self.kinks_s
    }

    /// Distance from `s` to the nearest corner, measured along the
    /// periodic parameter. Infinite when there are none.
    pub fn distance_to_kink(&self, s: f64) -> f64 {
        let period = self.total_length;
        self.kinks_s
            .iter()
            .map(|&k| {
                let d = (s - k).rem_euclid(period);
                d.min(period - d)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// `s(t)`; any finite `t` is reduced by periodicity.
    pub fn arc_length(&self, t: f64) -> f64 {
        let m = (t / TAU).floor();
        let mut tr = t - m * TAU;
        if tr >= TAU {
            tr = 0.0;
        }
        let k = self.segment_of_t(tr);
        m * self.total_length + self.nodes_s[k] + self.partial(k, tr)
    }

    /// `t(s)`, the inverse of [`NaturalCurve::arc_length`].
    pub fn invert_arclength(&self, s: f64) -> f64 {
        let m = (s / self.total_length).floor();
        let mut sr = s - m * self.total_length;
        if sr >= self.total_length {
            sr = 0.0;
        }
        let k = self.nodes_s.partition_point(|&v| v <= sr).saturating_sub(1);
        let k = k.min(self.nodes_t.len() - 2);
        let (t0, t1) = (self.nodes_t[k], self.nodes_t[k + 1]);
        let (s0, s1) = (self.nodes_s[k], self.nodes_s[k + 1]);
        let t = if sr == s0 {
            t0
        } else {
            let guess = t0 + (t1 - t0) * (sr - s0) / (s1 - s0);
            let target = sr - s0;
            newton_bracketed(
                |t| (self.partial(k, t) - target, self.polar.speed_plus(t)),
                t0,
                t1,
                guess,
                1e-15 * self.total_length.max(1.0),
                100,
            )
        };
        m * TAU + t
    }

    /// `r(s)`.
    pub fn natural_point(&self, s: f64) -> Vector2 {
        self.polar.point(self.invert_arclength(s))
    }

    /// `r′₋(s)`, `r′₊(s)` and their average. Both one-sided derivatives
    /// have norm 1.
    pub fn natural_derivatives(&self, s: f64) -> DerivativePair {
        let p = self.natural_point(s);
        self.derivatives_at_point(p)
    }

    /// One-sided derivatives of `r` at the sphere point `p`.
    pub fn derivatives_at_point(&self, p: Vector2) -> DerivativePair {
        let (arr, lea) = self.space().motion_directions(p);
        let g = |v: Vector2| v / self.norm().gauge(v);
        DerivativePair::new(g(arr), g(lea))
    }

    /// Natural parameter in `[0, 2L)` of a sphere point.
    pub fn param_of(&self, x: Vector2) -> f64 {
        let s = self.arc_length(self.space().angle_of(x));
        if s >= self.total_length {
            0.0
        } else {
            s
        }
    }

    /// Parameters in `[0, 2L)` where `‖r′₊ − r′₋‖ > gap_threshold`.
    ///
    /// The scan runs over the polar parameter, where `r′±` is `p′±` scaled
    /// to norm 1. A coarse pass at `2π / resolution` compares one-sided
    /// derivatives at the grid points and across each cell; flagged cells
    /// are shrunk by thirds to width 1e-9 and mapped to `s`.
    pub fn nonsmooth_scan(&self, resolution: usize, gap_threshold: f64) -> Result<Vec<f64>> {
        if resolution < 64 {
            return Err(Error::InvalidConfig(format!(
                "scan resolution must be >= 64, got {resolution}"
            )));
        }
        let norm = self.norm();
        let unit = |v: Vector2| v / norm.gauge(v);
        let ts = scan_for_kinks(
            TAU,
            resolution,
            gap_threshold,
            |t| {
                let d = self.polar.derivatives(t);
                (unit(d.minus), unit(d.plus))
            },
            |v| norm.gauge(v),
        );
        let mut ss: Vec<f64> = ts
            .into_iter()
            .map(|t| {
                let s = self.arc_length(t);
                if s >= self.total_length {
                    0.0
                } else {
                    s
                }
            })
            .collect();
        ss.sort_by(f64::total_cmp);
        Ok(ss)
    }

    fn segment_of_t(&self, t: f64) -> usize {
        let k = self.nodes_t.partition_point(|&v| v <= t).saturating_sub(1);
        k.min(self.nodes_t.len() - 2)
    }

    /// `s(t) - s(t_k)` for `t` in segment `k`.
    fn partial(&self, k: usize, t: f64) -> f64 {
        let a = self.nodes_t[k];
        if t <= a {
            return 0.0;
        }
        let speed = |u: f64| self.polar.speed_plus(u);
        let fa = self.polar.speed_plus(a);
        let fb = self.polar.speed_minus(t);
        adaptive_simpson(&speed, a, t, fa, fb, SEGMENT_TOL)
            .unwrap_or_else(|_| composite_simpson(&speed, a, t, fa, fb, 256))
    }
}

fn composite_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fb: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut sum = fa + fb;
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// Polar parameters of the corners: from the closed-form corner list when
/// the norm has one, otherwise from a scan of the polar derivatives.
fn kink_parameters(polar: &PolarCurve) -> Vec<f64> {
    let space = polar.space();
    let norm = space.norm();
    let mut ts: Vec<f64> = if norm.is_smooth() {
        Vec::new()
    } else {
        let corners = norm.corners();
        if corners.is_empty() {
            scan_for_kinks(
                TAU,
                4096,
                1e-6,
                |t| {
                    let d = polar.derivatives(t);
                    let n = |v: Vector2| v / v.euclid();
                    (n(d.minus), n(d.plus))
                },
                |v| v.euclid(),
            )
        } else {
            corners.iter().map(|&c| space.angle_of(c)).collect()
        }
    };
    for t in ts.iter_mut() {
        if t.abs() <= 1e-12 || (*t - TAU).abs() <= 1e-12 {
            *t = 0.0;
        } else if (*t - PI).abs() <= 1e-12 {
            *t = PI;
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    ts
}

/// Uniform nodes on `[0, 2π]` with the kinks inserted. Kinks within 1e-12
/// of `0`, `π` or `2π` snap onto those nodes; other uniform nodes that close
/// to a kink are dropped.
fn merge_nodes(kinks: &[f64]) -> Vec<f64> {
    let h = TAU / TABLE_NODES as f64;
    let mut nodes: Vec<f64> = (0..=TABLE_NODES)
        .map(|k| {
            if k == TABLE_NODES / 2 {
                PI
            } else if k == TABLE_NODES {
                TAU
            } else {
                k as f64 * h
            }
        })
        .collect();
    let anchors = [0.0, PI, TAU];
    for &kt in kinks {
        if anchors.iter().any(|&a| (kt - a).abs() <= 1e-12) {
            continue;
        }
        nodes.retain(|&n| anchors.contains(&n) || (n - kt).abs() > 1e-12);
        nodes.push(kt);
    }
    nodes.sort_by(f64::total_cmp);
    nodes
}

/// Locates jumps of a one-sided derivative field over `[0, period)`.
///
/// `derivs(s)` returns `(minus, plus)`; `measure` is the norm in which the
/// gap is compared to `threshold`.
pub(crate) fn scan_for_kinks<D, M>(
    period: f64,
    resolution: usize,
    threshold: f64,
    derivs: D,
    measure: M,
) -> Vec<f64>
where
    D: Fn(f64) -> (Vector2, Vector2),
    M: Fn(Vector2) -> f64,
{
    let h = period / resolution as f64;
    let grid: Vec<(f64, Vector2, Vector2)> = (0..=resolution)
        .map(|k| {
            let s = if k == resolution { period } else { k as f64 * h };
            let (m, p) = derivs(s);
            (s, m, p)
        })
        .collect();
    let mut found = Vec::new();
    for &(s, m, p) in &grid[..resolution] {
        if measure(p - m) > threshold {
            found.push(s);
        }
    }
    let scanner = Scanner {
        derivs: &derivs,
        measure: &measure,
        threshold,
    };
    for w in grid.windows(2) {
        let (a, _, pa) = w[0];
        let (b, mb, _) = w[1];
        scanner.refine(a, b, pa, mb, &mut found);
    }
    dedup_circular(found, period, 1e-7)
}

struct Scanner<'a, D, M> {
    derivs: &'a D,
    measure: &'a M,
    threshold: f64,
}

impl<D, M> Scanner<'_, D, M>
where
    D: Fn(f64) -> (Vector2, Vector2),
    M: Fn(Vector2) -> f64,
{
    fn refine(&self, a: f64, b: f64, plus_a: Vector2, minus_b: Vector2, out: &mut Vec<f64>) {
        if (self.measure)(minus_b - plus_a) <= self.threshold {
            return;
        }
        if b - a <= 1e-9 {
            out.push(0.5 * (a + b));
            return;
        }
        let m1 = a + (b - a) / 3.0;
        let m2 = a + 2.0 * (b - a) / 3.0;
        let (mm1, pm1) = (self.derivs)(m1);
        let (mm2, pm2) = (self.derivs)(m2);
        for (s, m, p) in [(m1, mm1, pm1), (m2, mm2, pm2)] {
            if (self.measure)(p - m) > self.threshold {
                out.push(s);
            }
        }
        self.refine(a, m1, plus_a, mm1, out);
        self.refine(m1, m2, pm1, mm2, out);
        self.refine(m2, b, pm2, minus_b, out);
    }
}

fn dedup_circular(mut xs: Vec<f64>, period: f64, tol: f64) -> Vec<f64> {
    for x in xs.iter_mut() {
        *x = x.rem_euclid(period);
        if *x >= period {
            *x = 0.0;
        }
    }
    xs.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(xs.len());
    for x in xs {
        match out.last() {
            Some(&l) if x - l <= tol => {}
            _ => out.push(x),
        }
    }
    if out.len() > 1 {
        let first = out[0];
        let last = out[out.len() - 1];
        if first + period - last <= tol {
            out.pop();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormSpec;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn curve(spec: NormSpec) -> NaturalCurve {
        NaturalCurve::new(BasedSpace::standard(Norm2D::new(spec).unwrap()).unwrap()).unwrap()
    }

    fn close(a: Vector2, b: Vector2, tol: f64) -> bool {
        (a - b).euclid() <= tol
    }

    #[test]
    fn polar_points() {
        let e = PolarCurve::new(BasedSpace::standard(Norm2D::euclidean()).unwrap());
        assert!(close(e.point(FRAC_PI_2), Vector2::new(0.0, 1.0), 1e-15));
        let l1 = PolarCurve::new(BasedSpace::standard(Norm2D::new(NormSpec::l1_square()).unwrap()).unwrap());
        assert!(close(l1.point(FRAC_PI_4), Vector2::new(0.5, 0.5), 1e-15));
        let lens = PolarCurve::new(
            BasedSpace::standard(Norm2D::new(NormSpec::Lens { beta: 0.0 }).unwrap()).unwrap(),
        );
        assert!(close(lens.point(FRAC_PI_2), Vector2::new(0.0, 0.5), 1e-13));
    }

    #[test]
    fn extremes_of_basis_gauge() {
        let s = BasedSpace::standard(Norm2D::new(NormSpec::l1_square()).unwrap()).unwrap();
        assert!((s.c() - 1.0).abs() < 1e-12);
        assert!((s.big_c() - SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn polar_derivatives_at_lens_corner() {
        let lens = PolarCurve::new(
            BasedSpace::standard(Norm2D::new(NormSpec::Lens { beta: 0.0 }).unwrap()).unwrap(),
        );
        let d = lens.derivatives(0.0);
        assert!(d.plus.x < 0.0 && (d.plus.x + d.plus.y).abs() < 1e-14);
        assert!(d.minus.x > 0.0 && (d.minus.x - d.minus.y).abs() < 1e-14);
    }

    #[test]
    fn analytic_and_numeric_polar_derivatives_agree() {
        let p4 =
            PolarCurve::new(BasedSpace::standard(Norm2D::new(NormSpec::PNorm { p: 4.0 }).unwrap()).unwrap());
        for k in 0..16 {
            let t = 0.37 * k as f64;
            let a = p4.derivatives(t);
            let n = p4.derivatives_numeric(t, 1e-4);
            assert!(close(a.plus, n.plus, 1e-6), "t={t} {} {}", a.plus, n.plus);
            assert!(close(a.minus, n.minus, 1e-6), "t={t}");
        }
    }

    #[test]
    fn l1_square_vertex_has_a_derivative_gap() {
        let l1 = PolarCurve::new(BasedSpace::standard(Norm2D::new(NormSpec::l1_square()).unwrap()).unwrap());
        let d = l1.derivatives(FRAC_PI_2);
        assert!((d.plus - d.minus).euclid() > 0.1);
    }

    #[test]
    fn half_lengths() {
        assert!((curve(NormSpec::PNorm { p: 2.0 }).half_length() - PI).abs() < 1e-12);
        let l1 = curve(NormSpec::l1_square());
        assert!((l1.half_length() - 4.0).abs() < 1e-12);
        assert!((l1.invert_arclength(2.0) - FRAC_PI_2).abs() < 1e-12);
        assert!(close(l1.natural_point(1.0), Vector2::new(0.5, 0.5), 1e-12));
    }

    #[test]
    fn euclidean_natural_curve_is_the_circle() {
        let e = curve(NormSpec::PNorm { p: 2.0 });
        assert!((e.invert_arclength(FRAC_PI_2) - FRAC_PI_2).abs() < 1e-12);
        assert!(close(e.natural_point(PI), Vector2::new(-1.0, 0.0), 1e-12));
        let d = e.natural_derivatives(0.0);
        assert!(close(d.plus, Vector2::new(0.0, 1.0), 1e-12));
        assert!(close(d.minus, Vector2::new(0.0, 1.0), 1e-12));
    }

    #[test]
    fn lens_corner_natural_derivatives() {
        let lens = curve(NormSpec::Lens { beta: 0.0 });
        let a = SQRT_2 - 1.0;
        let d = lens.natural_derivatives(0.0);
        assert!(close(d.plus, Vector2::new(-a, a), 1e-12));
        assert!(close(d.minus, Vector2::new(a, a), 1e-12));
        assert!(close(
            lens.natural_point(lens.half_length()),
            Vector2::new(-1.0, 0.0),
            1e-12
        ));
        assert_eq!(lens.kinks().len(), 2);
    }

    #[test]
    fn inversion_round_trip_and_periodicity() {
        let lens = curve(NormSpec::Lens { beta: 0.2 });
        let total = lens.total_length();
        for k in 0..50 {
            let s = -total + 3.0 * total * k as f64 / 49.0;
            let t = lens.invert_arclength(s);
            assert!((lens.arc_length(t) - s).abs() < 1e-11, "s={s}");
        }
        assert_eq!(lens.invert_arclength(0.0), 0.0);
    }

    #[test]
    fn scan_finds_l1_vertices() {
        let l1 = curve(NormSpec::l1_square());
        let ks = l1.nonsmooth_scan(1024, 1e-3).unwrap();
        assert_eq!(ks.len(), 4);
        for (k, s) in ks.iter().enumerate() {
            assert!((s - 2.0 * k as f64).abs() < 1e-7, "{ks:?}");
        }
        assert!(curve(NormSpec::PNorm { p: 2.0 })
            .nonsmooth_scan(1024, 1e-3)
            .unwrap()
            .is_empty());
        assert!(l1.nonsmooth_scan(32, 1e-3).is_err());
    }

    #[test]
    fn clockwise_basis_runs_the_other_way() {
        let norm = Norm2D::new(NormSpec::Lens { beta: 0.1 }).unwrap();
        let ccw = NaturalCurve::new(BasedSpace::standard(norm.clone()).unwrap()).unwrap();
        let cw = NaturalCurve::new(
            BasedSpace::new(norm, Vector2::new(1.0, 0.0), Vector2::new(0.0, -1.0)).unwrap(),
        )
        .unwrap();
        assert!((ccw.half_length() - cw.half_length()).abs() < 1e-12);
        let s = 0.3;
        let a = ccw.natural_point(-s);
        let b = cw.natural_point(s);
        assert!(close(a, b, 1e-12));
        let d = cw.natural_derivatives(s);
        assert!(close(d.plus, -ccw.natural_derivatives(-s).minus, 1e-12));
    }
}
