//! Norms of the plane given as Minkowski gauges of centrally symmetric
//! convex bodies.
//!
//! Besides the gauge itself every body knows its boundary tangents
//! ([`Norm2D::tangent_cone`]) and, when it has any, its corners
//! ([`Norm2D::corners`]). Both are exact for every supported kind; the
//! parameterization code relies on them for one-sided derivatives.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::numeric::bisect_predicate;
use crate::vector::{LinearMap2x2, Vector2};

/// Half-width of the band around 1 classified as [`Membership::Boundary`].
pub const BOUNDARY_BAND: f64 = 1e-9;

/// Relative distance below which a boundary point is treated as a corner.
pub const CORNER_SNAP: f64 = 1e-12;

/// Declarative description of a unit ball.
#[derive(Clone, Debug, PartialEq)]
pub enum NormSpec {
    /// `(|x|^p + |y|^p)^(1/p)`, `p >= 1`.
    PNorm { p: f64 },
    /// Centrally symmetric convex polygon, vertices in counterclockwise order.
    Polygon { vertices: Vec<Vector2> },
    /// `{(x, y) : |x| <= 1, -f(-x) <= y <= f(x)}` with
    /// `f(x) = (1 - x²)(1 + βx)/2` and `|β| < 1/3`.
    Lens { beta: f64 },
    /// Intersection of `Lens { beta: 0 }` with its quarter-turn rotation.
    DoubleLens,
    /// Image of the base ball under an invertible matrix.
    Transform {
        base: Box<NormSpec>,
        matrix: LinearMap2x2,
    },
}

impl NormSpec {
    /// The ℓ¹ unit ball as a polygon.
    pub fn l1_square() -> NormSpec {
        NormSpec::Polygon {
            vertices: vec![
                Vector2::new(1.0, 0.0),
                Vector2::new(0.0, 1.0),
                Vector2::new(-1.0, 0.0),
                Vector2::new(0.0, -1.0),
            ],
        }
    }

    /// Regular polygon with `2 * half_count` vertices, the first at `(1, 0)`.
    pub fn regular_polygon(half_count: usize) -> NormSpec {
        let n = 2 * half_count;
        let vertices = (0..n)
            .map(|k| Vector2::unit(2.0 * std::f64::consts::PI * k as f64 / n as f64))
            .collect();
        NormSpec::Polygon { vertices }
    }

    pub fn transform(base: NormSpec, matrix: LinearMap2x2) -> NormSpec {
        NormSpec::Transform {
            base: Box::new(base),
            matrix,
        }
    }

    /// Short human-readable name, used in reports.
    pub fn label(&self) -> String {
        match self {
            NormSpec::PNorm { p } => format!("pnorm({p})"),
            NormSpec::Polygon { vertices } => format!("polygon[{}]", vertices.len()),
            NormSpec::Lens { beta } => format!("lens({beta})"),
            NormSpec::DoubleLens => "double_lens".to_string(),
            NormSpec::Transform { base, matrix } => format!(
                "transform({}, {},{},{},{})",
                base.label(),
                matrix.a11,
                matrix.a12,
                matrix.a21,
                matrix.a22
            ),
        }
    }
}

/// Classification of a point against the unit ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Interior,
    Boundary,
    Exterior,
}

#[derive(Clone, Debug)]
struct PolygonBody {
    vertices: Vec<Vector2>,
    /// `functionals[i] · v <= 1` is the half-plane of edge `vertices[i] -> vertices[i+1]`.
    functionals: Vec<Vector2>,
}

impl PolygonBody {
    fn new(vertices: Vec<Vector2>) -> Self {
        let n = vertices.len();
        let functionals = (0..n)
            .map(|i| {
                let p = vertices[i];
                let q = vertices[(i + 1) % n];
                let d = q - p;
                let normal = Vector2::new(d.y, -d.x);
                normal / normal.dot(p)
            })
            .collect();
        PolygonBody {
            vertices,
            functionals,
        }
    }

    fn gauge(&self, v: Vector2) -> f64 {
        self.functionals.iter().map(|a| a.dot(v)).fold(0.0, f64::max)
    }

    fn tangent_cone(&self, q: Vector2) -> (Vector2, Vector2) {
        let n = self.vertices.len();
        let values: Vec<f64> = self.functionals.iter().map(|a| a.dot(q)).collect();
        let (best, &top) = values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("polygon has edges");
        let tol = CORNER_SNAP * top.abs().max(1.0);
        let edge = |i: usize| self.vertices[(i + 1) % n] - self.vertices[i];
        let prev = (best + n - 1) % n;
        let next = (best + 1) % n;
        if values[prev] >= top - tol {
            (edge(prev), edge(best))
        } else if values[next] >= top - tol {
            (edge(best), edge(next))
        } else {
            (edge(best), edge(best))
        }
    }
}

#[derive(Clone, Debug)]
enum Body {
    Euclid,
    PNorm(f64),
    Polygon(PolygonBody),
    Lens(f64),
    DoubleLens,
    Transform {
        base: Box<Body>,
        matrix: LinearMap2x2,
        inverse: LinearMap2x2,
    },
}

#[inline]
fn lens_profile(beta: f64, x: f64) -> f64 {
    0.5 * (1.0 - x * x) * (1.0 + beta * x)
}

#[inline]
fn lens_profile_slope(beta: f64, x: f64) -> f64 {
    -x * (1.0 + beta * x) + 0.5 * beta * (1.0 - x * x)
}

/// Gauge of the lens body. The boundary point on the ray through `v` is
/// `u·v` where `u` is the root of `h(u) = f(u·x) - u·y`, which is concave
/// and decreasing past the root; Newton from the right end of the bracket
/// converges monotonically.
fn lens_gauge(beta: f64, v: Vector2, rel_tol: f64) -> f64 {
    let (x, y) = if v.y < 0.0 { (-v.x, -v.y) } else { (v.x, v.y) };
    if y == 0.0 {
        return x.abs();
    }
    if x == 0.0 {
        return 2.0 * y;
    }
    let hi = (1.0 / x.abs()).min(0.7 / y);
    let h = |u: f64| lens_profile(beta, u * x) - u * y;
    let mut u = hi;
    for _ in 0..100 {
        let val = h(u);
        let slope = x * lens_profile_slope(beta, u * x) - y;
        let step = val / slope;
        let next = u - step;
        if !(next.is_finite() && next > 0.0 && next <= u) {
            break;
        }
        if step.abs() <= rel_tol * next {
            return 1.0 / next;
        }
        u = next;
    }
    // Fallback: plain bisection on ray membership.
    let (lo, hi) = bisect_predicate(0.0, hi, 200, |w| h(w) >= 0.0);
    2.0 / (lo + hi)
}

/// Counterclockwise tangent directions `(incoming, outgoing)` of the lens
/// boundary at the sphere point `q`.
fn lens_tangents(beta: f64, q: Vector2) -> (Vector2, Vector2) {
    if q.y.abs() <= CORNER_SNAP && (q.x.abs() - 1.0).abs() <= 1e-9 {
        let incoming = Vector2::new(1.0, 1.0 - beta);
        let outgoing = Vector2::new(-1.0, 1.0 + beta);
        return if q.x > 0.0 {
            (incoming, outgoing)
        } else {
            (-incoming, -outgoing)
        };
    }
    let t = if q.y > 0.0 {
        Vector2::new(-1.0, -lens_profile_slope(beta, q.x))
    } else {
        Vector2::new(1.0, lens_profile_slope(beta, -q.x))
    };
    (t, t)
}

/// Quarter-turn clockwise, the inverse of [`Vector2::perp`].
#[inline]
fn rot_cw(v: Vector2) -> Vector2 {
    Vector2::new(v.y, -v.x)
}

impl Body {
    fn gauge(&self, v: Vector2, tol: f64) -> f64 {
        match self {
            Body::Euclid => v.x.hypot(v.y),
            Body::PNorm(p) => {
                let (ax, ay) = (v.x.abs(), v.y.abs());
                let m = ax.max(ay);
                if m == 0.0 {
                    0.0
                } else {
                    m * ((ax / m).powf(*p) + (ay / m).powf(*p)).powf(1.0 / p)
                }
            }
            Body::Polygon(poly) => poly.gauge(v),
            Body::Lens(beta) => lens_gauge(*beta, v, tol),
            Body::DoubleLens => lens_gauge(0.0, v, tol).max(lens_gauge(0.0, rot_cw(v), tol)),
            Body::Transform { base, inverse, .. } => base.gauge(inverse.apply(v), tol),
        }
    }

    fn tangent_cone(&self, q: Vector2, tol: f64) -> (Vector2, Vector2) {
        match self {
            Body::Euclid => (q.perp(), q.perp()),
            Body::PNorm(p) => {
                let n = Vector2::new(
                    q.x.signum() * q.x.abs().powf(p - 1.0),
                    q.y.signum() * q.y.abs().powf(p - 1.0),
                );
                (n.perp(), n.perp())
            }
            Body::Polygon(poly) => poly.tangent_cone(q),
            Body::Lens(beta) => {
                let g = lens_gauge(*beta, q, tol);
                lens_tangents(*beta, q / g)
            }
            Body::DoubleLens => {
                let g1 = lens_gauge(0.0, q, tol);
                let g2 = lens_gauge(0.0, rot_cw(q), tol);
                let ta = lens_tangents(0.0, q / g1).1;
                let tb = lens_tangents(0.0, rot_cw(q) / g2).1.perp();
                if (g1 - g2).abs() <= CORNER_SNAP * g1.max(g2) {
                    // The boundary leaves a corner along the more inward-turning arc.
                    if ta.det(tb) > 0.0 {
                        (ta, tb)
                    } else {
                        (tb, ta)
                    }
                } else if g1 > g2 {
                    (ta, ta)
                } else {
                    (tb, tb)
                }
            }
            Body::Transform {
                base,
                matrix,
                inverse,
            } => {
                let (i, o) = base.tangent_cone(inverse.apply(q), tol);
                if matrix.det() > 0.0 {
                    (matrix.apply(i), matrix.apply(o))
                } else {
                    (-matrix.apply(o), -matrix.apply(i))
                }
            }
        }
    }

    fn corners(&self) -> Vec<Vector2> {
        match self {
            Body::Euclid | Body::PNorm(_) => Vec::new(),
            Body::Polygon(poly) => poly.vertices.clone(),
            Body::Lens(_) => vec![Vector2::new(1.0, 0.0), Vector2::new(-1.0, 0.0)],
            Body::DoubleLens => {
                let a = SQRT_2 - 1.0;
                vec![
                    Vector2::new(a, a),
                    Vector2::new(-a, a),
                    Vector2::new(-a, -a),
                    Vector2::new(a, -a),
                ]
            }
            Body::Transform { base, matrix, .. } => {
                base.corners().into_iter().map(|c| matrix.apply(c)).collect()
            }
        }
    }
}

/// A norm on the plane.
///
/// Immutable after construction; every query is a pure function of the
/// arguments.
#[derive(Clone, Debug)]
pub struct Norm2D {
    spec: NormSpec,
    body: Body,
    gauge_tolerance: f64,
    strictly_convex: bool,
    smooth: bool,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidSpec(msg.into())
}

fn validate(spec: &NormSpec) -> Result<()> {
    match spec {
        NormSpec::PNorm { p } => {
            if !(p.is_finite() && *p >= 1.0) {
                return Err(invalid(format!(
                    "pnorm exponent must be finite and >= 1, got {p}"
                )));
            }
        }
        NormSpec::Polygon { vertices } => validate_polygon(vertices)?,
        NormSpec::Lens { beta } => {
            if !(beta.is_finite() && beta.abs() < 1.0 / 3.0) {
                return Err(invalid(format!("lens requires |beta| < 1/3, got {beta}")));
            }
        }
        NormSpec::DoubleLens => {}
        NormSpec::Transform { base, matrix } => {
            if !matrix.is_finite() || matrix.det().abs() <= 1e-12 {
                return Err(Error::SingularTransform { det: matrix.det() });
            }
            validate(base)?;
        }
    }
    Ok(())
}

fn validate_polygon(vertices: &[Vector2]) -> Result<()> {
    let n = vertices.len();
    if n < 4 || !n.is_multiple_of(2) {
        return Err(invalid(format!(
            "polygon needs an even number (>= 4) of vertices, got {n}"
        )));
    }
    if vertices.iter().any(|v| !v.is_finite()) {
        return Err(invalid("polygon vertex is not finite"));
    }
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let c = vertices[(i + 2) % n];
        if a.det(b) <= 0.0 {
            return Err(invalid(format!(
                "polygon: origin is not interior / vertices not counterclockwise at vertex {i}"
            )));
        }
        if (b - a).det(c - b) <= 0.0 {
            return Err(invalid(format!(
                "polygon: not strictly convex at vertex {}",
                (i + 1) % n
            )));
        }
    }
    let scale = vertices.iter().map(|v| v.euclid()).fold(0.0, f64::max);
    for (i, v) in vertices.iter().enumerate() {
        let has_opposite = vertices.iter().any(|w| (*w + *v).euclid() <= 1e-12 * scale);
        if !has_opposite {
            return Err(invalid(format!(
                "polygon: not centrally symmetric (no opposite of vertex {i})"
            )));
        }
    }
    Ok(())
}

fn compile(spec: &NormSpec) -> Body {
    match spec {
        NormSpec::PNorm { p } if *p == 2.0 => Body::Euclid,
        NormSpec::PNorm { p } if *p == 1.0 => match NormSpec::l1_square() {
            NormSpec::Polygon { vertices } => Body::Polygon(PolygonBody::new(vertices)),
            _ => unreachable!(),
        },
        NormSpec::PNorm { p } => Body::PNorm(*p),
        NormSpec::Polygon { vertices } => Body::Polygon(PolygonBody::new(vertices.clone())),
        NormSpec::Lens { beta } => Body::Lens(*beta),
        NormSpec::DoubleLens => Body::DoubleLens,
        NormSpec::Transform { base, matrix } => Body::Transform {
            base: Box::new(compile(base)),
            matrix: *matrix,
            inverse: matrix.inverse().unwrap_or(LinearMap2x2::IDENTITY),
        },
    }
}

fn declared_flags(spec: &NormSpec) -> (bool, bool) {
    match spec {
        NormSpec::PNorm { p } => (*p > 1.0, *p > 1.0),
        NormSpec::Polygon { .. } => (false, false),
        NormSpec::Lens { .. } | NormSpec::DoubleLens => (true, false),
        NormSpec::Transform { base, .. } => declared_flags(base),
    }
}

impl Norm2D {
    /// Default relative tolerance of iterative gauge evaluation.
    pub const DEFAULT_GAUGE_TOLERANCE: f64 = 1e-12;

    /// Builds the norm after checking every invariant of the spec.
    pub fn new(spec: NormSpec) -> Result<Self> {
        validate(&spec)?;
        Ok(Self::new_unchecked(spec))
    }

    /// Builds the norm without validating the spec. Intended for
    /// diagnostics, e.g. feeding a deliberately broken body to
    /// [`Norm2D::validate_axioms`].
    pub fn new_unchecked(spec: NormSpec) -> Self {
        let body = compile(&spec);
        let (strictly_convex, smooth) = declared_flags(&spec);
        Norm2D {
            spec,
            body,
            gauge_tolerance: Self::DEFAULT_GAUGE_TOLERANCE,
            strictly_convex,
            smooth,
        }
    }

    pub fn euclidean() -> Self {
        Self::new_unchecked(NormSpec::PNorm { p: 2.0 })
    }

    pub fn with_gauge_tolerance(mut self, tol: f64) -> Self {
        self.gauge_tolerance = tol;
        self
    }

    pub fn spec(&self) -> &NormSpec {
        &self.spec
    }

    pub fn gauge_tolerance(&self) -> f64 {
        self.gauge_tolerance
    }

    pub fn is_strictly_convex(&self) -> bool {
        self.strictly_convex
    }

    pub fn is_smooth(&self) -> bool {
        self.smooth
    }

    /// The Minkowski functional of the unit ball.
    #[inline]
    pub fn gauge(&self, v: Vector2) -> f64 {
        self.body.gauge(v, self.gauge_tolerance)
    }

    /// `gauge(a - b)`.
    #[inline]
    pub fn dist(&self, a: Vector2, b: Vector2) -> f64 {
        self.gauge(a - b)
    }

    pub fn membership(&self, v: Vector2) -> Membership {
        let g = self.gauge(v);
        if g < 1.0 - BOUNDARY_BAND {
            Membership::Interior
        } else if g <= 1.0 + BOUNDARY_BAND {
            Membership::Boundary
        } else {
            Membership::Exterior
        }
    }

    /// Radial projection onto the unit sphere.
    pub fn scale_to_sphere(&self, v: Vector2) -> Result<Vector2> {
        if v.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(v / self.gauge(v))
    }

    /// Counterclockwise boundary directions `(incoming, outgoing)` at the
    /// boundary point in direction `q` (not normalised). They coincide
    /// unless `q` is a corner.
    pub fn tangent_cone(&self, q: Vector2) -> (Vector2, Vector2) {
        self.body.tangent_cone(q, self.gauge_tolerance)
    }

    /// Non-smooth points of the sphere known in closed form.
    pub fn corners(&self) -> Vec<Vector2> {
        self.body.corners()
    }

    /// The norm whose unit ball is `matrix` applied to this one, so that
    /// `pushforward.gauge(matrix·v) == self.gauge(v)`.
    pub fn pushforward(&self, matrix: LinearMap2x2) -> Result<Norm2D> {
        if !matrix.is_finite() || matrix.det().abs() <= 1e-12 {
            return Err(Error::SingularTransform { det: matrix.det() });
        }
        let mut n = Norm2D::new_unchecked(NormSpec::transform(self.spec.clone(), matrix));
        n.gauge_tolerance = self.gauge_tolerance;
        Ok(n)
    }

    /// Sampled check of the norm axioms and of boundary convexity.
    pub fn validate_axioms(&self, grid_size: usize) -> Result<AxiomReport> {
        if grid_size < 8 {
            return Err(Error::InvalidConfig(format!(
                "axiom grid must have at least 8 directions, got {grid_size}"
            )));
        }
        let dirs: Vec<Vector2> = (0..grid_size)
            .map(|k| {
                let len = 0.5 + (k % 3) as f64;
                Vector2::unit(2.0 * std::f64::consts::PI * k as f64 / grid_size as f64) * len
            })
            .collect();
        let gauges: Vec<f64> = dirs.iter().map(|&v| self.gauge(v)).collect();

        let mut report = AxiomReport::default();
        for (&v, &g) in dirs.iter().zip(&gauges) {
            if !(g > 0.0) {
                report.positivity = f64::INFINITY;
                continue;
            }
            for lambda in [-2.0, -0.5, 3.0] {
                let err = (self.gauge(v * lambda) - lambda.abs() * g).abs() / (lambda.abs() * g);
                report.homogeneity = report.homogeneity.max(err);
            }
            report.symmetry = report.symmetry.max((self.gauge(-v) - g).abs() / g);
        }
        report.positivity = report.positivity.max(self.gauge(Vector2::ZERO));
        for (i, (&u, &gu)) in dirs.iter().zip(&gauges).enumerate() {
            for (&v, &gv) in dirs.iter().zip(&gauges).skip(i) {
                let excess = self.gauge(u + v) - gu - gv;
                report.triangle = report.triangle.max(excess.max(0.0) / (gu + gv));
            }
        }
        let boundary: Vec<Vector2> = dirs.iter().zip(&gauges).map(|(&v, &g)| v / g).collect();
        for k in 0..grid_size {
            let mid = (boundary[k] + boundary[(k + 1) % grid_size]) * 0.5;
            report.convexity = report.convexity.max((self.gauge(mid) - 1.0).max(0.0));
        }
        Ok(report)
    }
}

/// Largest sampled violation of each norm axiom.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AxiomReport {
    /// `gauge(0)` and non-positive gauges of nonzero vectors.
    pub positivity: f64,
    pub homogeneity: f64,
    pub symmetry: f64,
    pub triangle: f64,
    /// How far midpoints of adjacent boundary samples stick out of the ball.
    pub convexity: f64,
}

impl AxiomReport {
    pub fn max_violation(&self) -> f64 {
        [
            self.positivity,
            self.homogeneity,
            self.symmetry,
            self.triangle,
            self.convexity,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_violation() <= tol
    }

    /// `(axiom name, max violation)` pairs in a fixed order.
    pub fn entries(&self) -> [(&'static str, f64); 5] {
        [
            ("positivity", self.positivity),
            ("homogeneity", self.homogeneity),
            ("symmetry", self.symmetry),
            ("triangle", self.triangle),
            ("convexity", self.convexity),
        ]
    }
}
