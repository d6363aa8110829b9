//! Radial and tangential jumps of `r′` and chord mates.

use crate::error::{Error, Result};
use crate::numeric::{bisect_predicate, illinois};
use crate::param::{DerivativePair, NaturalCurve};
use crate::vector::Vector2;

/// Coordinates of `(r′₊ − r′₋)/2` in the basis `(r(s), r′±(s))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpData {
    /// Radial jump, never positive.
    pub jr: f64,
    /// Tangential jump, `|jt| < 1`.
    pub jt: f64,
}

impl JumpData {
    pub const ZERO: JumpData = JumpData { jr: 0.0, jt: 0.0 };

    /// Solves `(plus − minus)/2 = jr·r + jt·avg`.
    pub fn from_derivatives(r: Vector2, d: &DerivativePair, s: f64) -> Result<Self> {
        let det = r.det(d.avg);
        if !(det.abs() > 1e-10) {
            return Err(Error::DegenerateBasis { s, det });
        }
        let half = 0.5 * (d.plus - d.minus);
        Ok(JumpData {
            jr: half.det(d.avg) / det,
            jt: r.det(half) / det,
        })
    }

    /// `(1 − jt) / (1 + jt)`.
    pub fn ratio_limit(&self) -> f64 {
        (1.0 - self.jt) / (1.0 + self.jt)
    }

    /// `jr / (1 − jt)`.
    pub fn slope_limit(&self) -> f64 {
        self.jr / (1.0 - self.jt)
    }

    /// Inverse of ([`JumpData::ratio_limit`], [`JumpData::slope_limit`]).
    pub fn from_limits(ratio: f64, slope: f64) -> Self {
        let jt = (1.0 - ratio) / (1.0 + ratio);
        JumpData {
            jr: slope * (1.0 - jt),
            jt,
        }
    }
}

/// Jumps at the parameter `s`.
pub fn jumps(nc: &NaturalCurve, s: f64) -> Result<JumpData> {
    let r = nc.natural_point(s);
    JumpData::from_derivatives(r, &nc.derivatives_at_point(r), s)
}

/// Jumps at a sphere point.
pub fn jumps_at_point(nc: &NaturalCurve, p: Vector2) -> Result<JumpData> {
    JumpData::from_derivatives(p, &nc.derivatives_at_point(p), nc.param_of(p))
}

/// `‖r′₊(s) − r′₋(s)‖`.
pub fn derivative_gap(nc: &NaturalCurve, s: f64) -> f64 {
    let d = nc.natural_derivatives(s);
    nc.norm().gauge(d.plus - d.minus)
}

/// Second intersection of a line with the sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChordMate {
    pub point: Vector2,
    /// `point = x + lambda·direction`.
    pub lambda: f64,
    /// The line only touches the sphere at `x`; then `point == x`.
    pub degenerate: bool,
}

/// The point `x̄ ≠ x` of the sphere on the line `x + ℝ·direction`.
///
/// The side of `x` on which the line enters the ball is read off the
/// tangent cone at `x`; the crossing is then bracketed by bisection and
/// located by regula falsi.
pub fn chord_mate(nc: &NaturalCurve, x: Vector2, direction: Vector2) -> Result<ChordMate> {
    let norm = nc.norm();
    if !x.is_finite() || (norm.gauge(x) - 1.0).abs() > 1e-8 {
        return Err(Error::NotOnSphere(format!("{x}")));
    }
    if direction.is_zero() || !direction.is_finite() {
        return Err(Error::ZeroVector);
    }
    let unit = |v: Vector2| v / v.euclid();
    let (inc, out) = norm.tangent_cone(x);
    let (inc, out) = (unit(inc), unit(out));
    let d = unit(direction);
    let a = inc.det(d);
    let b = out.det(d);
    const SIDE_TOL: f64 = 1e-13;
    let sign = if a > SIDE_TOL && b > SIDE_TOL {
        1.0
    } else if a < -SIDE_TOL && b < -SIDE_TOL {
        -1.0
    } else {
        return Ok(ChordMate {
            point: x,
            lambda: 0.0,
            degenerate: true,
        });
    };
    // Step along the chord in units of the norm.
    let step = sign * direction / norm.gauge(direction);
    let g = |l: f64| norm.gauge(x + l * step) - 1.0;
    let (lo, hi) = bisect_predicate(0.0, 4.0, 12, |l| g(l) <= 0.0);
    let l = if lo == 0.0 {
        // Short chord: keep bisecting, the crossing may be at 0.
        let (lo, hi) = bisect_predicate(lo, hi, 80, |l| g(l) <= 0.0);
        if lo == 0.0 && hi <= 1e-12 {
            return Ok(ChordMate {
                point: x,
                lambda: 0.0,
                degenerate: true,
            });
        }
        0.5 * (lo + hi)
    } else {
        illinois(g, lo, hi, 1e-15, 100)
    };
    let point = x + l * step;
    Ok(ChordMate {
        point,
        lambda: sign * l / norm.gauge(direction),
        degenerate: false,
    })
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
    fn euclidean_jumps_vanish() {
        let e = curve(NormSpec::PNorm { p: 2.0 });
        for k in 0..32 {
            let j = jumps(&e, 0.2 * k as f64).unwrap();
            assert!(j.jr.abs() < 1e-12 && j.jt.abs() < 1e-12);
        }
    }

    #[test]
    fn lens_corner_jumps() {
        let lens = curve(NormSpec::Lens { beta: 0.0 });
        let j = jumps(&lens, 0.0).unwrap();
        assert!((j.jr - (1.0 - SQRT_2)).abs() < 1e-12);
        assert!(j.jt.abs() < 1e-12);
        let j = jumps(&lens, lens.half_length()).unwrap();
        assert!((j.jr - (1.0 - SQRT_2)).abs() < 1e-12);
    }

    #[test]
    fn lens_02_corner_jumps_match_tangent_oracle() {
        // Tangent slopes at (1,0): 1 - β arriving, -(1 + β) leaving.
        let beta: f64 = 0.2;
        let norm = Norm2D::new(NormSpec::Lens { beta }).unwrap();
        let minus = Vector2::new(1.0, 1.0 - beta);
        let plus = Vector2::new(-1.0, 1.0 + beta);
        let d = DerivativePair::new(minus / norm.gauge(minus), plus / norm.gauge(plus));
        let oracle = JumpData::from_derivatives(Vector2::new(1.0, 0.0), &d, 0.0).unwrap();
        let j = jumps(&curve(NormSpec::Lens { beta }), 0.0).unwrap();
        assert!(j.jr < -0.1 && j.jt.abs() > 1e-3);
        assert!((j.jr - oracle.jr).abs() < 1e-10 && (j.jt - oracle.jt).abs() < 1e-10);
    }

    #[test]
    fn limits_round_trip() {
        let j = JumpData { jr: -0.3, jt: 0.2 };
        let k = JumpData::from_limits(j.ratio_limit(), j.slope_limit());
        assert!((j.jr - k.jr).abs() < 1e-15 && (j.jt - k.jt).abs() < 1e-15);
    }

    #[test]
    fn euclidean_chord_mate_is_mirror() {
        let e = curve(NormSpec::PNorm { p: 2.0 });
        let th: f64 = 0.7;
        let m = chord_mate(&e, Vector2::unit(th), Vector2::new(1.0, 0.0)).unwrap();
        assert!(!m.degenerate);
        assert!((m.point - Vector2::new(-th.cos(), th.sin())).euclid() < 1e-12);
        let m = chord_mate(&e, Vector2::new(0.0, 1.0), Vector2::new(1.0, 0.0)).unwrap();
        assert!(m.degenerate && m.point == Vector2::new(0.0, 1.0));
    }

    #[test]
    fn lens_chord_mate_reflects_even_arc() {
        let lens = curve(NormSpec::Lens { beta: 0.0 });
        let x0: f64 = 0.6;
        let x = Vector2::new(x0, 0.5 * (1.0 - x0 * x0));
        let m = chord_mate(&lens, x, Vector2::new(-3.0, 0.0)).unwrap();
        assert!((m.point - Vector2::new(-x0, x.y)).euclid() < 1e-12);
        assert!(m.lambda > 0.0);
        assert!(matches!(
            chord_mate(&lens, Vector2::new(0.5, 0.5), Vector2::new(1.0, 0.0)),
            Err(Error::NotOnSphere(_))
        ));
    }
}
