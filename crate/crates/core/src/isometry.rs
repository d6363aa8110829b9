//! Isometries between unit spheres and their linear extensions.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jumps::chord_mate;
use crate::lemmas::{lemma_jj_limits, lemma_xy_chords, lemma_xy_recovery};
use crate::norm::Norm2D;
use crate::numeric::bisect_root;
use crate::param::{BasedSpace, NaturalCurve};
use crate::vector::{LinearMap2x2, Vector2};

/// How a [`SphereMap`] is evaluated.
#[derive(Clone, Debug)]
pub enum Representation {
    ExactLinear(LinearMap2x2),
    Sampled(SampledTable),
}

/// Values of a sphere map at uniformly spaced natural parameters of the
/// source. Between rows the target parameter is interpolated linearly and
/// mapped back onto the target sphere, so interpolants stay on the sphere.
#[derive(Clone, Debug)]
pub struct SampledTable {
    target_curve: Arc<NaturalCurve>,
    /// `(source parameter, target point)`; parameters `k·2L/n`.
    rows: Vec<(f64, Vector2)>,
    /// Unwrapped target parameters, one per row plus the closing row.
    sigma: Vec<f64>,
    step: f64,
}

impl SampledTable {
    pub fn rows(&self) -> &[(f64, Vector2)] {
        &self.rows
    }

    pub fn target_curve(&self) -> &Arc<NaturalCurve> {
        &self.target_curve
    }

    fn eval(&self, s: f64, period: f64) -> Vector2 {
        let s = s.rem_euclid(period);
        let n = self.rows.len();
        let pos = s / self.step;
        let k = (pos.floor() as usize).min(n - 1);
        let frac = pos - k as f64;
        if frac.abs() <= 1e-12 {
            return self.rows[k].1;
        }
        if (1.0 - frac).abs() <= 1e-12 {
            return self.rows[(k + 1) % n].1;
        }
        let sigma = self.sigma[k] + frac * (self.sigma[k + 1] - self.sigma[k]);
        self.target_curve.natural_point(sigma)
    }
}

/// A map from the unit sphere of `source` to the unit sphere of `target`.
#[derive(Clone, Debug)]
pub struct SphereMap {
    source: Arc<NaturalCurve>,
    target: Norm2D,
    representation: Representation,
}

/// Pairs sampled when validating a table.
const VALIDATION_PAIRS: usize = 256;

impl SphereMap {
    /// The restriction of `matrix` to the sphere of the source curve.
    pub fn exact(source: Arc<NaturalCurve>, target: Norm2D, matrix: LinearMap2x2) -> Self {
        SphereMap {
            source,
            target,
            representation: Representation::ExactLinear(matrix),
        }
    }

    /// A tabulated map, validated for the isometry property on 256 pairs
    /// of rows (1e-8) and for antipodality (1e-9).
    pub fn from_rows(
        source: Arc<NaturalCurve>,
        target_curve: Arc<NaturalCurve>,
        rows: Vec<(f64, Vector2)>,
    ) -> Result<Self> {
        let map = SphereMap::from_rows_unchecked(source, target_curve, rows)?;
        let (iso, anti) = map.table_defects();
        if iso > 1e-8 {
            return Err(Error::NotIsometric {
                stage: "sampled isometry property",
                deviation: iso,
            });
        }
        if anti > 1e-9 {
            return Err(Error::NotIsometric {
                stage: "antipodality",
                deviation: anti,
            });
        }
        Ok(map)
    }

    /// Like [`SphereMap::from_rows`] but skips the isometry checks. Rows
    /// must be at parameters `k·2L/n` of the source curve.
    pub fn from_rows_unchecked(
        source: Arc<NaturalCurve>,
        target_curve: Arc<NaturalCurve>,
        rows: Vec<(f64, Vector2)>,
    ) -> Result<Self> {
        let n = rows.len();
        if n < 8 {
            return Err(Error::InvalidConfig(format!(
                "table needs at least 8 rows, got {n}"
            )));
        }
        let step = source.total_length() / n as f64;
        for (k, (s, p)) in rows.iter().enumerate() {
            if (s - k as f64 * step).abs() > 1e-9 * source.total_length() || !p.is_finite() {
                return Err(Error::InvalidConfig(format!("table row {k} is not at k·2L/n")));
            }
        }
        let period = target_curve.total_length();
        let mut sigma = Vec::with_capacity(n + 1);
        for (k, &(_, p)) in rows.iter().chain(std::iter::once(&rows[0])).enumerate() {
            let raw = target_curve.param_of(p);
            let v = match k {
                0 => raw,
                _ => {
                    let prev: f64 = sigma[k - 1];
                    raw + period * ((prev - raw) / period).round()
                }
            };
            sigma.push(v);
        }
        // The closing row must differ from the first by a whole turn.
        let turn = sigma[n] - sigma[0];
        if (turn.abs() - period).abs() > 1e-6 * period {
            return Err(Error::InvalidConfig(
                "table rows do not wind once around the target sphere".into(),
            ));
        }
        Ok(SphereMap {
            target: target_curve.norm().clone(),
            source,
            representation: Representation::Sampled(SampledTable {
                target_curve,
                rows,
                sigma,
                step,
            }),
        })
    }

    /// Tabulates `f` at `n` uniformly spaced natural parameters.
    pub fn sample<F>(
        source: Arc<NaturalCurve>,
        target_curve: Arc<NaturalCurve>,
        n: usize,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(Vector2) -> Vector2 + Sync,
    {
        let step = source.total_length() / n as f64;
        let rows: Vec<(f64, Vector2)> = (0..n)
            .into_par_iter()
            .map(|k| {
                let s = k as f64 * step;
                (s, f(source.natural_point(s)))
            })
            .collect();
        SphereMap::from_rows(source, target_curve, rows)
    }

    pub fn source_curve(&self) -> &Arc<NaturalCurve> {
        &self.source
    }

    pub fn source(&self) -> &Norm2D {
        self.source.norm()
    }

    pub fn target(&self) -> &Norm2D {
        &self.target
    }

    pub fn representation(&self) -> &Representation {
        &self.representation
    }

    /// `f(x)` for a point `x` of the source sphere.
    pub fn apply(&self, x: Vector2) -> Vector2 {
        match &self.representation {
            Representation::ExactLinear(m) => m.apply(x),
            Representation::Sampled(t) => t.eval(self.source.param_of(x), self.source.total_length()),
        }
    }

    /// `f(r(s))`.
    pub fn apply_param(&self, s: f64) -> Vector2 {
        match &self.representation {
            Representation::ExactLinear(m) => m.apply(self.source.natural_point(s)),
            Representation::Sampled(t) => t.eval(s, self.source.total_length()),
        }
    }

    /// Largest isometry defect over 256 deterministic pairs of rows and
    /// largest antipodality defect over all rows. Zero for exact maps.
    fn table_defects(&self) -> (f64, f64) {
        let Representation::Sampled(t) = &self.representation else {
            return (0.0, 0.0);
        };
        let src = self.source.norm();
        let n = t.rows.len();
        let points: Vec<Vector2> = t
            .rows
            .iter()
            .map(|&(s, _)| self.source.natural_point(s))
            .collect();
        let mut iso: f64 = 0.0;
        for k in 0..VALIDATION_PAIRS {
            let i = (k * 7919 + 13) % n;
            let j = (k * 104_729 + 5 * k * k + 1) % n;
            let dx = src.dist(points[i], points[j]);
            let dy = self.target.dist(t.rows[i].1, t.rows[j].1);
            iso = iso.max((dx - dy).abs());
        }
        let mut anti: f64 = 0.0;
        if n % 2 == 0 {
            for i in 0..n / 2 {
                anti = anti.max(self.target.gauge(t.rows[i].1 + t.rows[i + n / 2].1));
            }
        }
        (iso, anti)
    }
}

/// The pushforward norm `Y = A·X` and the map `A` restricted to `S_X`.
pub fn sphere_map_from_linear(a: LinearMap2x2, x: &NaturalCurve) -> Result<(SphereMap, Norm2D)> {
    let y = x.norm().pushforward(a)?;
    Ok((SphereMap::exact(Arc::new(x.clone()), y.clone(), a), y))
}

/// `A` tabulated at `rows` parameters of the default curve of `X`, with
/// the target parameterized by the default curve of `A·X`.
pub fn sampled_from_linear(a: LinearMap2x2, x: Arc<NaturalCurve>, rows: usize) -> Result<SphereMap> {
    let y = x.norm().pushforward(a)?;
    let target = Arc::new(NaturalCurve::for_norm(y)?);
    SphereMap::sample(x, target, rows, |p| a.apply(p))
}

/// `θ(x)`: the sphere point `y` with `x − y = ‖x − y‖·c`.
pub fn theta_map(nc: &NaturalCurve, x: Vector2, c: Vector2) -> Result<Vector2> {
    let m = chord_mate(nc, x, -c)?;
    if m.degenerate || nc.norm().dist(m.point, x) < 1e-7 {
        return Err(Error::OnPerpSet);
    }
    if m.lambda < 0.0 {
        return Err(Error::OutsideComponent);
    }
    Ok(m.point)
}

#[derive(Clone, Debug)]
pub struct SpecialnessReport {
    /// Largest pairwise distance between the sampled values of `g`.
    pub deviation: f64,
    /// The common value of `g` when `deviation <= 1e-6`.
    pub value: Option<Vector2>,
    pub samples_used: usize,
}

/// Samples `g(x) = (f(x) − f(θ(x))) / ‖f(x) − f(θ(x))‖` over the points of
/// the source sphere where `θ` along `c` is defined with chord at least
/// 1e-3. `g` is constant exactly when `f` maps the `c`-chords to parallel
/// chords.
pub fn specialness_check(f: &SphereMap, c: Vector2, samples: usize) -> Result<SpecialnessReport> {
    if samples < 16 {
        return Err(Error::InvalidConfig(format!(
            "need at least 16 samples, got {samples}"
        )));
    }
    let nc = f.source_curve();
    if (nc.norm().gauge(c) - 1.0).abs() > 1e-8 {
        return Err(Error::NotOnSphere(format!("{c}")));
    }
    let total = nc.total_length();
    let values: Vec<Vector2> = (0..samples)
        .into_par_iter()
        .filter_map(|k| {
            let x = nc.natural_point((k as f64 + 0.5) * total / samples as f64);
            let y = theta_map(nc, x, c).ok()?;
            if nc.norm().dist(x, y) < 1e-3 {
                return None;
            }
            let d = f.apply(x) - f.apply(y);
            Some(d / f.target().gauge(d))
        })
        .collect();
    if values.is_empty() {
        return Err(Error::DegenerateComponent);
    }
    let target = f.target();
    let deviation = values
        .par_iter()
        .map(|&u| values.iter().map(|&v| target.dist(u, v)).fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max);
    Ok(SpecialnessReport {
        deviation,
        value: (deviation <= 1e-6).then(|| values[0]),
        samples_used: values.len(),
    })
}

/// Regular or singular pair of directions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PairKind {
    Regular,
    Singular,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairClass {
    pub value: PairKind,
    /// A sphere point whose chords in both directions are degenerate.
    pub witness: Option<Vector2>,
}

fn touches_only(nc: &NaturalCurve, z: Vector2, dir: Vector2) -> bool {
    match chord_mate(nc, z, dir) {
        Ok(m) => m.degenerate || nc.norm().dist(m.point, z) < 1e-7,
        Err(_) => false,
    }
}

/// Classifies `(u, v)`: singular when `u = ±v` or when some sphere point
/// `z` has degenerate chords along both `u` and `v`. Candidates for `z` are
/// the corners and a 1024-point parameter grid.
pub fn pair_classify(nc: &NaturalCurve, u: Vector2, v: Vector2) -> PairClass {
    let norm = nc.norm();
    if norm.dist(u, v) < 1e-8 || norm.gauge(u + v) < 1e-8 {
        return PairClass {
            value: PairKind::Singular,
            witness: None,
        };
    }
    let total = nc.total_length();
    let candidates = nc
        .kinks()
        .iter()
        .copied()
        .chain((0..1024).map(|k| k as f64 * total / 1024.0));
    for s in candidates {
        let z = nc.natural_point(s);
        if touches_only(nc, z, u) && touches_only(nc, z, v) {
            return PairClass {
                value: PairKind::Singular,
                witness: Some(z),
            };
        }
    }
    PairClass {
        value: PairKind::Regular,
        witness: None,
    }
}

/// Chord triangle: `x − z ∈ ℝu`, `y − z ∈ ℝv`, all three on the sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChordTriangle {
    pub x: Vector2,
    pub y: Vector2,
    pub z: Vector2,
}

fn triangle_at(nc: &NaturalCurve, z: Vector2, u: Vector2, v: Vector2) -> Result<ChordTriangle> {
    let x = chord_mate(nc, z, u)?.point;
    let y = chord_mate(nc, z, v)?.point;
    Ok(ChordTriangle { x, y, z })
}

/// Finds `z` on the sphere whose chord triangle has `x − y` a positive
/// multiple of `w`.
///
/// `ψ(z) = (x − y)/‖x − y‖` is odd, so `det(w, ψ(p(t)))` changes sign on
/// `[0, π]`; bisection finds `z` with `ψ(z) = ±w` and `z ↦ −z` fixes the
/// sign.
pub fn solve_chord_triangle(nc: &NaturalCurve, u: Vector2, v: Vector2, w: Vector2) -> Result<ChordTriangle> {
    let norm = nc.norm();
    if pair_classify(nc, u, v).value == PairKind::Singular {
        return Err(Error::SingularPair);
    }
    solve_chord_triangle_regular(nc, u, v, w, norm)
}

fn solve_chord_triangle_regular(
    nc: &NaturalCurve,
    u: Vector2,
    v: Vector2,
    w: Vector2,
    norm: &Norm2D,
) -> Result<ChordTriangle> {
    let polar = nc.polar();
    let wn = w / w.euclid();
    let defect = |t: f64| -> f64 {
        match triangle_at(nc, polar.point(t), u, v) {
            Ok(tri) => {
                let d = tri.x - tri.y;
                wn.det(d / d.euclid())
            }
            Err(_) => f64::NAN,
        }
    };
    let h0 = defect(0.0);
    let h1 = defect(PI);
    if !(h0.is_finite() && h1.is_finite()) || h0 * h1 > 0.0 {
        return Err(Error::NoBracket(format!(
            "defect {h0:e} at t = 0, {h1:e} at t = π"
        )));
    }
    let t = bisect_root(defect, 0.0, PI, 1e-13, 200);
    let mut tri = triangle_at(nc, polar.point(t), u, v)?;
    if (tri.x - tri.y).dot(wn) < 0.0 {
        tri = ChordTriangle {
            x: -tri.x,
            y: -tri.y,
            z: -tri.z,
        };
    }
    let d = tri.x - tri.y;
    let angle = wn.det(d / d.euclid()).abs();
    if !(angle <= 1e-8) || norm.gauge(d) == 0.0 {
        return Err(Error::NoBracket(format!(
            "bisection ended with angular defect {angle:e}"
        )));
    }
    Ok(tri)
}

#[derive(Clone, Debug)]
pub struct P2Extension {
    pub matrix: LinearMap2x2,
    /// The pair actually used; `u` is replaced by the singularity witness
    /// when the given pair is singular.
    pub u: Vector2,
    pub v: Vector2,
    /// `max |‖L·w‖ − 1|` over the chord-triangle sweep.
    pub sweep_norm_defect: f64,
    /// `max ‖L·w − (f(x) − f(y))/‖x − y‖‖` over the sweep.
    pub sweep_chord_defect: f64,
    /// `max ‖L·r(s) − f(r(s))‖` over the grid.
    pub grid_deviation: f64,
}

/// Points of the chord-triangle sweep.
pub const P2_SWEEP: usize = 256;
/// Points of the final grid identity.
pub const P2_GRID: usize = 512;

/// The linear map with `L·u = f(u)`, `L·v = f(v)`, checked against `f`
/// over a sweep of chord triangles and on a grid of the sphere.
pub fn build_extension_p2(f: &SphereMap, u: Vector2, v: Vector2) -> Result<P2Extension> {
    let nc = f.source_curve();
    let norm = nc.norm();
    for p in [u, v] {
        if (norm.gauge(p) - 1.0).abs() > 1e-8 {
            return Err(Error::NotOnSphere(format!("{p}")));
        }
    }
    let independent = |a: Vector2, b: Vector2| a.det(b).abs() > 1e-8 * a.euclid() * b.euclid();
    if !independent(u, v) {
        return Err(Error::DependentBasis);
    }
    let (mut u, mut v) = (u, v);
    let class = pair_classify(nc, u, v);
    if class.value == PairKind::Singular {
        let z = class.witness.ok_or(Error::SingularPair)?;
        if independent(z, v) {
            u = z;
        } else if independent(u, z) {
            v = z;
        } else {
            return Err(Error::SingularPair);
        }
        if pair_classify(nc, u, v).value == PairKind::Singular {
            return Err(Error::SingularPair);
        }
    }
    let matrix = LinearMap2x2::mapping((u, v), (f.apply(u), f.apply(v))).ok_or(Error::DependentBasis)?;
    let target = f.target();
    let total = nc.total_length();

    let sweep: Vec<(f64, f64)> = (0..P2_SWEEP)
        .into_par_iter()
        .map(|k| -> Result<(f64, f64)> {
            let w = nc.natural_point((k as f64 + 0.25) * total / P2_SWEEP as f64);
            let tri = solve_chord_triangle_regular(nc, u, v, w, norm)?;
            let lw = matrix.apply(w);
            let d = tri.x - tri.y;
            let chord = (f.apply(tri.x) - f.apply(tri.y)) / norm.gauge(d);
            Ok(((target.gauge(lw) - 1.0).abs(), target.dist(lw, chord)))
        })
        .collect::<Result<Vec<_>>>()?;
    let sweep_norm_defect = sweep.iter().map(|p| p.0).fold(0.0, f64::max);
    let sweep_chord_defect = sweep.iter().map(|p| p.1).fold(0.0, f64::max);
    if sweep_norm_defect > 1e-6 {
        return Err(Error::NotIsometric {
            stage: "norm of L on chord directions",
            deviation: sweep_norm_defect,
        });
    }
    if sweep_chord_defect > 1e-6 {
        return Err(Error::NotIsometric {
            stage: "L on chord directions",
            deviation: sweep_chord_defect,
        });
    }
    let grid_deviation = (0..P2_GRID)
        .into_par_iter()
        .map(|k| {
            let s = k as f64 * total / P2_GRID as f64;
            target.dist(matrix.apply(nc.natural_point(s)), f.apply_param(s))
        })
        .reduce(|| 0.0, f64::max);
    if grid_deviation > 1e-6 {
        return Err(Error::NotIsometric {
            stage: "L∘r = f∘r",
            deviation: grid_deviation,
        });
    }
    Ok(P2Extension {
        matrix,
        u,
        v,
        sweep_norm_defect,
        sweep_chord_defect,
        grid_deviation,
    })
}

/// One stage of the two-corner reconstruction.
#[derive(Clone, Debug, PartialEq)]
pub struct Stage {
    pub name: &'static str,
    pub deviation: f64,
    pub tolerance: f64,
}

impl Stage {
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

#[derive(Clone, Debug)]
pub struct TwoCornerReport {
    pub matrix: LinearMap2x2,
    /// `e1, e2` of the source and `ẽ1, ẽ2` of the target.
    pub source_basis: (Vector2, Vector2),
    pub target_basis: (Vector2, Vector2),
    /// True when `ẽ2` was replaced by `−ẽ2`.
    pub flipped: bool,
    pub source_half_length: f64,
    pub target_half_length: f64,
    pub stages: Vec<Stage>,
}

impl TwoCornerReport {
    pub fn stage(&self, name: &str) -> Option<&Stage> {
        self.stages.iter().find(|s| s.name == name)
    }
}

pub const STAGE_HALF_LENGTH: &str = "half-length";
pub const STAGE_JUMPS: &str = "corner jumps";
pub const STAGE_RECOVERY: &str = "derivative recovery";
pub const STAGE_PARAM: &str = "f∘r = r̃";
pub const STAGE_DERIVATIVES: &str = "I∘r′ = r̃′";
pub const STAGE_INTEGRAL: &str = "integral identity";
pub const STAGE_EXTENSION: &str = "I∘r = r̃ on [0, 2L]";

fn check(stages: &mut Vec<Stage>, name: &'static str, deviation: f64, tolerance: f64) -> Result<()> {
    stages.push(Stage {
        name,
        deviation,
        tolerance,
    });
    if deviation <= tolerance {
        Ok(())
    } else {
        Err(Error::VerificationFailure {
            stage: name,
            deviation,
        })
    }
}

/// Rebuilds the linear extension of an isometry whose source sphere has
/// exactly two corners.
///
/// The corner `e1` gets parameter 0 and `e2 = r′±(0)`; on the target
/// `ẽ1 = f(e1)`, `ẽ2 = r̃′±(0)`, negated if `f(r(1e-3))` lies below the
/// `ẽ1` axis. After checking half-lengths, corner jumps, metric derivative
/// recovery and `f∘r = r̃`, `I` is the map `e1 ↦ ẽ1`, `e2 ↦ ẽ2`.
pub fn reconstruct_two_corner(f: &SphereMap) -> Result<TwoCornerReport> {
    let base = f.source_curve();
    let found = base.nonsmooth_scan(1024, 1e-3)?;
    if found.len() != 2 {
        return Err(Error::WrongCornerCount(found.len()));
    }
    // Prefer the closed-form corner parameter when the scan confirms it.
    let corner_s = base
        .kinks()
        .iter()
        .copied()
        .find(|&k| {
            let d = (k - found[0]).rem_euclid(base.total_length());
            d.min(base.total_length() - d) < 1e-6
        })
        .unwrap_or(found[0]);
    let x_curve = base.rebased_at(corner_s)?;
    let e1 = x_curve.space().e1();
    let e2 = x_curve.space().e2();

    let y_norm = f.target().clone();
    let te1 = f.apply(e1);
    if (y_norm.gauge(te1) - 1.0).abs() > 1e-8 {
        return Err(Error::NotOnSphere(format!("f(e1) = {te1}")));
    }
    let (inc, out) = y_norm.tangent_cone(te1);
    let mut te2 = 0.5 * (inc / y_norm.gauge(inc) + out / y_norm.gauge(out));
    let probe = f.apply(x_curve.natural_point(1e-3));
    let flipped = te1.det(probe) * te1.det(te2) < 0.0;
    if flipped {
        te2 = -te2;
    }
    let y_curve = NaturalCurve::new(BasedSpace::new(y_norm.clone(), te1, te2)?)?;

    let mut stages = Vec::new();
    let lx = x_curve.half_length();
    let ly = y_curve.half_length();
    if (lx - ly).abs() > 1e-6 {
        stages.push(Stage {
            name: STAGE_HALF_LENGTH,
            deviation: (lx - ly).abs(),
            tolerance: 1e-6,
        });
        return Err(Error::HalfLengthMismatch {
            source_len: lx,
            target_len: ly,
        });
    }
    stages.push(Stage {
        name: STAGE_HALF_LENGTH,
        deviation: (lx - ly).abs(),
        tolerance: 1e-6,
    });

    let jx = lemma_jj_limits(&x_curve)?;
    let jy = lemma_jj_limits(&y_curve)?;
    let jump_dev = (jx.ratio - jy.ratio).abs().max((jx.slope - jy.slope).abs());
    stages.push(Stage {
        name: STAGE_JUMPS,
        deviation: jump_dev,
        tolerance: 1e-3,
    });
    if jump_dev > 1e-3 {
        return Err(Error::JumpMismatch(jump_dev));
    }

    // The metric determines r′; both spheres must yield the same numbers.
    let chords = lemma_xy_chords(&x_curve, 4)?;
    let mut rec_dev: f64 = 0.0;
    for &(s, sbar) in &chords {
        let rx = lemma_xy_recovery(&x_curve, s, sbar)?;
        let ry = lemma_xy_recovery(&y_curve, s, sbar)?;
        rec_dev = rec_dev.max(rx.recovered.max_abs_diff(&ry.recovered));
    }
    check(&mut stages, STAGE_RECOVERY, rec_dev, 1e-3)?;

    let grid = 512;
    let param_dev = (0..=grid)
        .into_par_iter()
        .map(|k| {
            let s = k as f64 * lx / grid as f64;
            y_norm.dist(f.apply(x_curve.natural_point(s)), y_curve.natural_point(s))
        })
        .reduce(|| 0.0, f64::max);
    check(&mut stages, STAGE_PARAM, param_dev, 1e-6)?;

    let matrix = LinearMap2x2::mapping((e1, e2), (te1, te2)).ok_or(Error::DependentBasis)?;

    // I∘r′ = r̃′ on the open upper half, then r(s) = r(0) + ∫ r′.
    let derivs: Vec<(Vector2, Vector2)> = (0..=grid)
        .into_par_iter()
        .map(|k| {
            let s = k as f64 * lx / grid as f64;
            let dx = x_curve.natural_derivatives(s);
            let dy = y_curve.natural_derivatives(s);
            (matrix.apply(dx.plus), dy.plus)
        })
        .collect();
    let deriv_dev = derivs[1..grid]
        .iter()
        .map(|(a, b)| y_norm.dist(*a, *b))
        .fold(0.0, f64::max);
    check(&mut stages, STAGE_DERIVATIVES, deriv_dev, 1e-6)?;
    // r′ has kinks where it passes through a corner direction of the
    // gauge, so Simpson is only second order there; use a finer grid.
    let panels = 8 * grid;
    let h = lx / panels as f64;
    let fine: Vec<Vector2> = (0..=panels)
        .into_par_iter()
        .map(|k| {
            let d = x_curve.natural_derivatives(k as f64 * h);
            matrix.apply(if k == panels { d.minus } else { d.plus })
        })
        .collect();
    let mut integral_dev: f64 = 0.0;
    let mut acc = matrix.apply(x_curve.natural_point(0.0));
    for k in (0..panels).step_by(2) {
        acc += (h / 3.0) * (fine[k] + 4.0 * fine[k + 1] + fine[k + 2]);
        integral_dev = integral_dev.max(y_norm.dist(acc, y_curve.natural_point((k + 2) as f64 * h)));
    }
    check(&mut stages, STAGE_INTEGRAL, integral_dev, 1e-6)?;

    let ext_dev = (0..2 * grid)
        .into_par_iter()
        .map(|k| {
            let s = k as f64 * lx / grid as f64;
            let ir = matrix.apply(x_curve.natural_point(s));
            y_norm
                .dist(ir, y_curve.natural_point(s))
                .max(y_norm.dist(ir, f.apply(x_curve.natural_point(s))))
        })
        .reduce(|| 0.0, f64::max);
    check(&mut stages, STAGE_EXTENSION, ext_dev, 1e-5)?;

    Ok(TwoCornerReport {
        matrix,
        source_basis: (e1, e2),
        target_basis: (te1, te2),
        flipped,
        source_half_length: lx,
        target_half_length: ly,
        stages,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtensionCheck {
    /// `max ‖M·x − f(x)‖_Y`.
    pub max_deviation: f64,
    /// `max |‖M·x‖_Y − 1|`.
    pub norm_defect: f64,
    /// `max ‖f(−x) + f(x)‖_Y`.
    pub antipodal_defect: f64,
    /// True when the antipodal defect exceeds 1e-9.
    pub antipodality_violated: bool,
}

/// Compares `M` with `f` on `grid` uniformly spaced points of the source
/// sphere and, for tables, on every row.
pub fn verify_extension(f: &SphereMap, m: &LinearMap2x2, grid: usize) -> Result<ExtensionCheck> {
    if grid < 64 {
        return Err(Error::InvalidConfig(format!("grid must be >= 64, got {grid}")));
    }
    let nc = f.source_curve();
    let total = nc.total_length();
    let mut params: Vec<f64> = (0..grid)
        .map(|k| (k as f64 + 0.5) * total / grid as f64)
        .collect();
    if let Representation::Sampled(t) = f.representation() {
        params.extend(t.rows.iter().map(|r| r.0));
    }
    let target = f.target();
    let half = nc.half_length();
    let (dev, norm_def, anti) = params
        .par_iter()
        .map(|&s| {
            let x = nc.natural_point(s);
            let fx = f.apply_param(s);
            let mx = m.apply(x);
            let f_anti = f.apply_param(s + half);
            (
                target.dist(mx, fx),
                (target.gauge(mx) - 1.0).abs(),
                target.gauge(f_anti + fx),
            )
        })
        .reduce(
            || (0.0, 0.0, 0.0),
            |a, b| (a.0.max(b.0), a.1.max(b.1), a.2.max(b.2)),
        );
    Ok(ExtensionCheck {
        max_deviation: dev,
        norm_defect: norm_def,
        antipodal_defect: anti,
        antipodality_violated: anti > 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormSpec;

    fn curve(spec: NormSpec) -> Arc<NaturalCurve> {
        Arc::new(NaturalCurve::for_norm(Norm2D::new(spec).unwrap()).unwrap())
    }

    #[test]
    fn theta_on_euclidean_circle() {
        let e = curve(NormSpec::PNorm { p: 2.0 });
        let c = Vector2::new(1.0, 0.0);
        let th: f64 = 0.4;
        let y = theta_map(&e, Vector2::unit(th), c).unwrap();
        assert!((y - Vector2::new(-th.cos(), th.sin())).euclid() < 1e-12);
        assert_eq!(theta_map(&e, Vector2::new(0.0, 1.0), c), Err(Error::OnPerpSet));
        assert_eq!(theta_map(&e, Vector2::unit(2.5), c), Err(Error::OutsideComponent));
    }

    #[test]
    fn pairs_on_circle_and_double_lens() {
        let e = curve(NormSpec::PNorm { p: 2.0 });
        let u = Vector2::new(1.0, 0.0);
        let v = Vector2::new(0.0, 1.0);
        assert_eq!(pair_classify(&e, u, v).value, PairKind::Regular);
        assert_eq!(pair_classify(&e, u, u).value, PairKind::Singular);
        let dl = curve(NormSpec::DoubleLens);
        let corner = dl.norm().corners()[0];
        let (inc, out) = dl.norm().tangent_cone(corner);
        let to_sphere = |v: Vector2| v / dl.norm().gauge(v);
        let class = pair_classify(&dl, to_sphere(inc), to_sphere(out));
        assert_eq!(class.value, PairKind::Singular);
        let z = class.witness.unwrap();
        assert!(dl.norm().corners().iter().any(|c| (*c - z).euclid() < 1e-9));
    }

    #[test]
    fn euclidean_chord_triangles() {
        let e = curve(NormSpec::PNorm { p: 2.0 });
        let u = Vector2::new(1.0, 0.0);
        let v = Vector2::new(0.0, 1.0);
        let tri = solve_chord_triangle(&e, u, v, v).unwrap();
        assert!((tri.z - v).euclid() < 1e-7);
        assert!((tri.y + v).euclid() < 1e-7);
        let tri = solve_chord_triangle(&e, u, v, u).unwrap();
        assert!((tri.z + u).euclid() < 1e-7 && (tri.x - u).euclid() < 1e-7);
        let al: f64 = 0.9;
        let tri = solve_chord_triangle(&e, u, v, Vector2::unit(al)).unwrap();
        assert!((tri.z - Vector2::new(-al.cos(), al.sin())).euclid() < 1e-7);
    }

    #[test]
    fn p2_recovers_quarter_turn_on_double_lens() {
        let dl = curve(NormSpec::DoubleLens);
        let rot = LinearMap2x2::rotation(std::f64::consts::FRAC_PI_2);
        let (f, _) = sphere_map_from_linear(rot, &dl).unwrap();
        let corners = dl.norm().corners();
        let ext = build_extension_p2(&f, corners[0], corners[1]).unwrap();
        assert!(ext.matrix.max_entry_diff(&rot) < 1e-8);
        let wrong = verify_extension(&f, &LinearMap2x2::IDENTITY, 128).unwrap();
        assert!(wrong.max_deviation > 0.5);
        assert!(!wrong.antipodality_violated);
    }

    #[test]
    fn specialness_of_linear_maps() {
        let lens = curve(NormSpec::Lens { beta: 0.0 });
        let (f, _) = sphere_map_from_linear(LinearMap2x2::scaling(-1.0), &lens).unwrap();
        let rep = specialness_check(&f, Vector2::new(1.0, 0.0), 64).unwrap();
        assert!(rep.deviation < 1e-8);
        assert!((rep.value.unwrap() - Vector2::new(-1.0, 0.0)).euclid() < 1e-8);
    }

    #[test]
    fn two_corner_reconstruction_of_a_shear() {
        let lens = curve(NormSpec::Lens { beta: 0.2 });
        let a = LinearMap2x2::new(2.0, 1.0, 0.0, 1.0);
        let (f, _) = sphere_map_from_linear(a, &lens).unwrap();
        let rep = reconstruct_two_corner(&f).unwrap();
        assert!(rep.matrix.max_entry_diff(&a) < 1e-6, "{rep:?}");
        assert!(rep.stages.iter().all(Stage::passed));
    }

    #[test]
    fn two_corner_reconstruction_of_symmetries() {
        let lens = curve(NormSpec::Lens { beta: 0.0 });
        for m in [
            LinearMap2x2::scaling(-1.0),
            LinearMap2x2::new(1.0, 0.0, 0.0, -1.0),
        ] {
            let (f, _) = sphere_map_from_linear(m, &lens).unwrap();
            let rep = reconstruct_two_corner(&f).unwrap();
            assert!(rep.matrix.max_entry_diff(&m) < 1e-8, "{m} {rep:?}");
        }
    }

    #[test]
    fn sampled_table_round_trip_and_negative_control() {
        let lens = curve(NormSpec::Lens { beta: 0.2 });
        let a = LinearMap2x2::new(2.0, 1.0, 0.0, 1.0);
        let f = sampled_from_linear(a, lens.clone(), 1024).unwrap();
        let chk = verify_extension(&f, &a, 256).unwrap();
        assert!(chk.max_deviation < 1e-9, "{chk:?}");
        let Representation::Sampled(t) = f.representation() else {
            unreachable!()
        };
        let mut rows = t.rows().to_vec();
        let kick = Vector2::new(1.0, 0.0);
        rows[17].1 += 1e-3 * kick / f.target().gauge(kick);
        assert!(SphereMap::from_rows(lens.clone(), t.target_curve().clone(), rows.clone()).is_err());
        let bad = SphereMap::from_rows_unchecked(lens, t.target_curve().clone(), rows).unwrap();
        let chk = verify_extension(&bad, &a, 256).unwrap();
        assert!(chk.max_deviation >= 1e-3 - 1e-12);
    }
}
