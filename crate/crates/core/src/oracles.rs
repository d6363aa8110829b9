//! Brute-force references. These avoid the quadrature, table and analytic
//! derivative code paths: points come from `e(t)` and a gauge evaluated at
//! tolerance 1e-13, lengths from chord sums.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::norm::Norm2D;
use crate::param::{BasedSpace, NaturalCurve};
use crate::vector::Vector2;

/// Gauge tolerance used by every oracle.
pub const ORACLE_GAUGE_TOL: f64 = 1e-13;
/// Default subdivision for lengths.
pub const ARCLENGTH_N: usize = 1_000_000;
/// Default subdivision for intrinsic distances.
pub const INTRINSIC_N: usize = 100_000;
/// Step of [`richardson_derivative_oracle`].
pub const ORACLE_STEP: f64 = 1e-5;

/// Partial sums are formed over fixed chunks and added left to right, so
/// the result does not depend on the thread count.
const CHUNK: usize = 4096;

/// An ordered chain of sphere points.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    pub points: Vec<Vector2>,
    pub closed: bool,
}

impl Polyline {
    /// Checks that consecutive points differ and all lie on the sphere.
    pub fn new(norm: &Norm2D, points: Vec<Vector2>, closed: bool) -> Result<Self> {
        for (k, p) in points.iter().enumerate() {
            if (norm.gauge(*p) - 1.0).abs() > 1e-9 {
                return Err(Error::NotOnSphere(format!("polyline point {k}: {p}")));
            }
        }
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::CoincidentPoints);
        }
        Ok(Polyline { points, closed })
    }

    /// Sum of the chord lengths.
    pub fn length(&self, norm: &Norm2D) -> f64 {
        let open: f64 = self.points.windows(2).map(|w| norm.gauge(w[1] - w[0])).sum();
        match (self.closed, self.points.first(), self.points.last()) {
            (true, Some(&a), Some(&b)) if self.points.len() > 1 => open + norm.gauge(a - b),
            _ => open,
        }
    }
}

struct OraclePolar {
    norm: Norm2D,
    e1: Vector2,
    e2: Vector2,
}

impl OraclePolar {
    fn new(norm: &Norm2D, e1: Vector2, e2: Vector2) -> Self {
        OraclePolar {
            norm: norm.clone().with_gauge_tolerance(ORACLE_GAUGE_TOL),
            e1,
            e2,
        }
    }

    fn point(&self, t: f64) -> Vector2 {
        let (s, c) = t.sin_cos();
        let e = c * self.e1 + s * self.e2;
        e / self.norm.gauge(e)
    }

    /// Chord sum over `n` uniform steps of `[t0, t1]`.
    fn uniform_sum(&self, t0: f64, t1: f64, n: usize) -> f64 {
        let h = (t1 - t0) / n as f64;
        let at = |k: usize| if k == n { t1 } else { t0 + k as f64 * h };
        let partial: Vec<f64> = (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut acc = 0.0;
                let mut prev = self.point(at(c * CHUNK));
                for k in c * CHUNK + 1..=((c + 1) * CHUNK).min(n) {
                    let next = self.point(at(k));
                    acc += self.norm.gauge(next - prev);
                    prev = next;
                }
                acc
            })
            .collect();
        partial.iter().sum()
    }

    /// Chord sum over `[a, b]`, bisected while the two halves turn by more
    /// than [`TURN_TOL`] radians. A chord shorter than [`MIN_CHORD`] is
    /// kept as is: it bounds what refining it could add, and below it
    /// rounding makes the turning angle meaningless.
    fn refined_sum(&self, a: f64, b: f64, pa: Vector2, pb: Vector2, depth: u32) -> f64 {
        let chord = self.norm.gauge(pb - pa);
        if depth == 0 || chord < MIN_CHORD {
            return chord;
        }
        let m = 0.5 * (a + b);
        let pm = self.point(m);
        if !(turn(pm - pa, pb - pm) > TURN_TOL) {
            return chord;
        }
        self.refined_sum(a, m, pa, pm, depth - 1) + self.refined_sum(m, b, pm, pb, depth - 1)
    }
}

/// Euclidean turning angle from `u` to `v`, or `π` if they reverse.
fn turn(u: Vector2, v: Vector2) -> f64 {
    if u.dot(v) < 0.0 {
        return std::f64::consts::PI;
    }
    (u.det(v).abs() / (u.euclid() * v.euclid())).asin()
}

/// Turning angle above which [`intrinsic_distance_oracle`] splits a step.
pub const TURN_TOL: f64 = 1e-3;
/// Chords below this length are never split.
pub const MIN_CHORD: f64 = 1e-12;

/// Length of the sphere between `p(t0)` and `p(t1)` as the chord sum over
/// `n` uniform steps in `t`.
pub fn polyline_arclength_oracle(
    norm: &Norm2D,
    basis: &BasedSpace,
    t0: f64,
    t1: f64,
    n: usize,
) -> Result<f64> {
    if n < 1000 {
        return Err(Error::InvalidConfig(format!("N must be >= 1000, got {n}")));
    }
    let polar = OraclePolar::new(norm, basis.e1(), basis.e2());
    let len = polar.uniform_sum(t0.min(t1), t0.max(t1), n);
    Ok(if t1 >= t0 { len } else { -len })
}

/// `|A(n) − A(2n)| / |A(2n) − A(4n)|`; close to 4 for smooth spheres.
pub fn arclength_convergence_ratio(
    norm: &Norm2D,
    basis: &BasedSpace,
    t0: f64,
    t1: f64,
    n: usize,
) -> Result<f64> {
    let a = polyline_arclength_oracle(norm, basis, t0, t1, n)?;
    let b = polyline_arclength_oracle(norm, basis, t0, t1, 2 * n)?;
    let c = polyline_arclength_oracle(norm, basis, t0, t1, 4 * n)?;
    Ok((a - b).abs() / (b - c).abs())
}

/// Polar angle of `x` in the basis of `nc`, if `x` lies on the closed
/// upper half-sphere.
fn upper_angle(polar: &OraclePolar, x: Vector2) -> Result<f64> {
    let det = polar.e1.det(polar.e2);
    let a = x.det(polar.e2) / det;
    let b = polar.e1.det(x) / det;
    if (polar.norm.gauge(x) - 1.0).abs() > 1e-8 {
        return Err(Error::NotOnSphere(format!("{x}")));
    }
    let scale = a.hypot(b);
    if b < -1e-9 * scale {
        return Err(Error::NotOnHalfSphere);
    }
    Ok(b.max(0.0).atan2(a))
}

/// Chord sum between `x` and `y` along the upper half-sphere: `n` uniform
/// steps in the polar angle, steps next to a sharp turn refined by bisection.
pub fn intrinsic_distance_oracle(nc: &NaturalCurve, x: Vector2, y: Vector2, n: usize) -> Result<f64> {
    if n < 1000 {
        return Err(Error::InvalidConfig(format!("N must be >= 1000, got {n}")));
    }
    let space = nc.space();
    let polar = OraclePolar::new(nc.norm(), space.e1(), space.e2());
    let tx = upper_angle(&polar, x)?;
    let ty = upper_angle(&polar, y)?;
    let (t0, t1) = if tx <= ty { (tx, ty) } else { (ty, tx) };
    if t0 == t1 {
        return Ok(0.0);
    }
    let h = (t1 - t0) / n as f64;
    let at = |k: usize| if k == n { t1 } else { t0 + k as f64 * h };
    let points: Vec<Vector2> = (0..=n).into_par_iter().map(|k| polar.point(at(k))).collect();
    // A step is refined when the chain turns sharply at either end; away
    // from corners consecutive chords turn by O(h).
    let sharp =
        |k: usize| k > 0 && k < n && turn(points[k] - points[k - 1], points[k + 1] - points[k]) > TURN_TOL;
    let partial: Vec<f64> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            (c * CHUNK..((c + 1) * CHUNK).min(n))
                .map(|k| {
                    if sharp(k) || sharp(k + 1) {
                        polar.refined_sum(at(k), at(k + 1), points[k], points[k + 1], 60)
                    } else {
                        polar.norm.gauge(points[k + 1] - points[k])
                    }
                })
                .sum::<f64>()
        })
        .collect();
    Ok(partial.iter().sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// One-sided difference quotients at `h = 1e-5` and `h/2` combined as
/// `2·D(h/2) − D(h)`.
pub fn richardson_derivative_oracle<F>(curve: F, s: f64, side: Side) -> Vector2
where
    F: Fn(f64) -> Vector2,
{
    let sign = match side {
        Side::Left => -1.0,
        Side::Right => 1.0,
    };
    let base = curve(s);
    let quotient = |h: f64| (curve(s + sign * h) - base) / (sign * h);
    2.0 * quotient(ORACLE_STEP / 2.0) - quotient(ORACLE_STEP)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormSpec;
    use std::f64::consts::{PI, SQRT_2};

    #[test]
    fn euclidean_and_square_lengths() {
        let e = Norm2D::euclidean();
        let b = BasedSpace::standard(e.clone()).unwrap();
        let len = polyline_arclength_oracle(&e, &b, 0.0, PI, ARCLENGTH_N).unwrap();
        assert!((len - PI).abs() < 1e-9);
        let l1 = Norm2D::new(NormSpec::l1_square()).unwrap();
        let b = BasedSpace::standard(l1.clone()).unwrap();
        let len = polyline_arclength_oracle(&l1, &b, 0.0, PI, ARCLENGTH_N).unwrap();
        assert!((len - 4.0).abs() < 1e-9);
        assert!(polyline_arclength_oracle(&l1, &b, 0.0, PI, 999).is_err());
    }

    #[test]
    fn intrinsic_distances() {
        let e = NaturalCurve::for_norm(Norm2D::euclidean()).unwrap();
        let d = intrinsic_distance_oracle(&e, Vector2::new(1.0, 0.0), Vector2::new(0.0, 1.0), INTRINSIC_N)
            .unwrap();
        assert!((d - PI / 2.0).abs() < 1e-8);
        let x = Vector2::unit(0.3);
        assert_eq!(intrinsic_distance_oracle(&e, x, x, INTRINSIC_N).unwrap(), 0.0);
        assert_eq!(
            intrinsic_distance_oracle(&e, x, Vector2::unit(-0.3), INTRINSIC_N),
            Err(Error::NotOnHalfSphere)
        );
        let l1 = NaturalCurve::for_norm(Norm2D::new(NormSpec::l1_square()).unwrap()).unwrap();
        // Straddles the vertex (0, 1).
        let d = intrinsic_distance_oracle(&l1, l1.natural_point(1.3), l1.natural_point(2.9), INTRINSIC_N)
            .unwrap();
        assert!((d - 1.6).abs() < 1e-9, "{d}");
    }

    #[test]
    fn lens_corner_one_sided_derivatives() {
        let lens = NaturalCurve::for_norm(Norm2D::new(NormSpec::Lens { beta: 0.0 }).unwrap()).unwrap();
        let r = |s: f64| lens.natural_point(s);
        let right = richardson_derivative_oracle(r, 0.0, Side::Right);
        let left = richardson_derivative_oracle(r, 0.0, Side::Left);
        assert!(
            (right - (SQRT_2 - 1.0) * Vector2::new(-1.0, 1.0)).euclid() < 1e-7,
            "{right}"
        );
        assert!(
            (left - (SQRT_2 - 1.0) * Vector2::new(1.0, 1.0)).euclid() < 1e-7,
            "{left}"
        );
        let e = NaturalCurve::for_norm(Norm2D::euclidean()).unwrap();
        let d = richardson_derivative_oracle(|s| e.natural_point(s), 0.0, Side::Right);
        assert!((d - Vector2::new(0.0, 1.0)).euclid() < 1e-9);
    }

    #[test]
    fn polyline_length_closes() {
        let e = Norm2D::euclidean();
        let pts: Vec<Vector2> = (0..4).map(|k| Vector2::unit(k as f64 * PI / 2.0)).collect();
        let p = Polyline::new(&e, pts, true).unwrap();
        assert!((p.length(&e) - 4.0 * SQRT_2).abs() < 1e-12);
    }
}
