use std::f64::consts::PI;
use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use normsphere::checks::{self, LemmaKind};
use normsphere::isometry::{
    build_extension_p2, reconstruct_two_corner, sampled_from_linear, sphere_map_from_linear, SphereMap,
};
use normsphere::oracles::polyline_arclength_oracle;
use normsphere::report::{fmt_flag, fmt_real, lemma_table, Table};
use normsphere::specfile::load_spec;
use normsphere::{Error, LinearMap2x2, NaturalCurve, Norm2D};

/// Axiom violations above this fail `validate`.
const AXIOM_TOL: f64 = 1e-8;
/// Oracle agreement required by `oracle`.
const ORACLE_TOL: f64 = 1e-6;
/// Entrywise recovery error allowed for exact and sampled maps.
const EXACT_TOL: f64 = 1e-8;
const SAMPLED_TOL: f64 = 1e-5;
const RECONSTRUCT_TOL: f64 = 1e-6;

#[derive(Debug)]
pub enum Failure {
    /// Unreadable or malformed input.
    Parse(String),
    /// A verification step found a violation.
    Check(String),
    Internal(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Parse(m) | Failure::Check(m) | Failure::Internal(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Parse { .. }
            | Error::Io(_)
            | Error::InvalidSpec(_)
            | Error::SingularTransform { .. }
            | Error::InvalidConfig(_) => Failure::Parse(msg),
            Error::NotIsometric { .. }
            | Error::VerificationFailure { .. }
            | Error::HalfLengthMismatch { .. }
            | Error::JumpMismatch(_)
            | Error::WrongCornerCount(_) => Failure::Check(msg),
            _ => Failure::Internal(msg),
        }
    }
}

pub struct Report {
    pub table: Table,
    pub pass: bool,
}

impl Report {
    fn passing(table: Table) -> Self {
        Report { table, pass: true }
    }

    pub fn emit(&self, out: Option<&Path>) -> Result<(), Failure> {
        let io_err = |e: io::Error| Failure::Internal(e.to_string());
        match out {
            Some(path) => {
                let file =
                    File::create(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
                let mut w = BufWriter::new(file);
                self.table.write_to(&mut w)?;
                w.flush().map_err(io_err)
            }
            None => {
                let stdout = io::stdout();
                let mut w = stdout.lock();
                self.table.write_to(&mut w)?;
                w.flush().map_err(io_err)
            }
        }
    }
}

struct Loaded {
    name: String,
    norm: Norm2D,
}

fn load(path: &Path) -> Result<Loaded, Failure> {
    let spec = load_spec(path)?;
    let norm = Norm2D::new(spec)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Ok(Loaded { name, norm })
}

fn curve(path: &Path) -> Result<(String, NaturalCurve), Failure> {
    let l = load(path)?;
    Ok((l.name, NaturalCurve::for_norm(l.norm)?))
}

fn need(samples: usize, min: usize) -> Result<(), Failure> {
    if samples < min {
        return Err(Failure::Parse(format!(
            "--samples must be at least {min}, got {samples}"
        )));
    }
    Ok(())
}

pub fn validate(paths: &[impl AsRef<Path>], samples: usize) -> Result<Report, Failure> {
    let mut t = Table::new(&[
        "spec",
        "positivity",
        "homogeneity",
        "symmetry",
        "triangle",
        "convexity",
        "strictly_convex",
        "smooth",
        "pass",
    ]);
    let mut pass = true;
    for p in paths {
        let l = load(p.as_ref())?;
        let r = l.norm.validate_axioms(samples)?;
        let ok = r.passes(AXIOM_TOL);
        pass &= ok;
        let mut row = vec![l.name];
        row.extend(r.entries().iter().map(|&(_, v)| fmt_real(v)));
        row.push(fmt_flag(l.norm.is_strictly_convex()));
        row.push(fmt_flag(l.norm.is_smooth()));
        row.push(fmt_flag(ok));
        t.push(row);
    }
    Ok(Report { table: t, pass })
}

pub fn param_table(path: &Path, samples: usize, natural: bool) -> Result<Report, Failure> {
    need(samples, 1)?;
    let (_, nc) = curve(path)?;
    let n = samples as f64;
    let t = if natural {
        let mut t = Table::new(&["s", "r1", "r2", "d-1", "d-2", "d+1", "d+2"]);
        for k in 0..samples {
            let s = k as f64 * nc.total_length() / n;
            let r = nc.natural_point(s);
            let d = nc.natural_derivatives(s);
            t.push(
                [s, r.x, r.y, d.minus.x, d.minus.y, d.plus.x, d.plus.y]
                    .map(fmt_real)
                    .to_vec(),
            );
        }
        t
    } else {
        let mut t = Table::new(&["t", "p1", "p2", "s"]);
        for k in 0..samples {
            let tt = k as f64 * 2.0 * PI / n;
            let p = nc.polar().point(tt);
            t.push([tt, p.x, p.y, nc.arc_length(tt)].map(fmt_real).to_vec());
        }
        t
    };
    Ok(Report::passing(t))
}

pub fn half_length(paths: &[impl AsRef<Path>]) -> Result<Report, Failure> {
    let mut t = Table::new(&["spec", "half_length"]);
    for p in paths {
        let (name, nc) = curve(p.as_ref())?;
        t.push(vec![name, fmt_real(nc.half_length())]);
    }
    Ok(Report::passing(t))
}

pub fn jumps(path: &Path, samples: usize) -> Result<Report, Failure> {
    need(samples, 1)?;
    let (_, nc) = curve(path)?;
    let mut t = Table::new(&["s", "jr", "jt", "gap"]);
    for k in 0..samples {
        let s = k as f64 * nc.total_length() / samples as f64;
        let j = normsphere::jumps(&nc, s)?;
        t.push(
            [s, j.jr, j.jt, normsphere::jumps::derivative_gap(&nc, s)]
                .map(fmt_real)
                .to_vec(),
        );
    }
    Ok(Report::passing(t))
}

pub fn nonsmooth(path: &Path, samples: usize, threshold: f64) -> Result<Report, Failure> {
    if !(threshold > 0.0) {
        return Err(Failure::Parse(format!(
            "--threshold must be positive, got {threshold}"
        )));
    }
    let (_, nc) = curve(path)?;
    let mut t = Table::new(&["s", "r1", "r2", "gap", "jr", "jt"]);
    for s in nc.nonsmooth_scan(samples, threshold)? {
        let r = nc.natural_point(s);
        let j = normsphere::jumps(&nc, s)?;
        t.push(
            [s, r.x, r.y, normsphere::jumps::derivative_gap(&nc, s), j.jr, j.jt]
                .map(fmt_real)
                .to_vec(),
        );
    }
    Ok(Report::passing(t))
}

pub fn check(paths: &[impl AsRef<Path>], lemma: LemmaKind) -> Result<Report, Failure> {
    let mut rows = Vec::new();
    for p in paths {
        let (name, nc) = curve(p.as_ref())?;
        rows.extend(checks::run_lemma(lemma, &name, &nc)?);
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(Report {
        table: lemma_table(&rows),
        pass,
    })
}

fn sphere_map(nc: NaturalCurve, a: LinearMap2x2, samples: usize) -> Result<(SphereMap, f64), Failure> {
    if a.det().abs() <= 1e-12 {
        return Err(Failure::Parse(format!(
            "--matrix is singular (det {:e})",
            a.det()
        )));
    }
    if samples == 0 {
        Ok((sphere_map_from_linear(a, &nc)?.0, EXACT_TOL))
    } else {
        need(samples, 8)?;
        Ok((sampled_from_linear(a, Arc::new(nc), samples)?, SAMPLED_TOL))
    }
}

fn matrix_row(m: &LinearMap2x2, err: f64, extra: &[String], pass: bool) -> Vec<String> {
    let mut row: Vec<String> = m.entries().map(fmt_real).to_vec();
    row.push(fmt_real(err));
    row.extend_from_slice(extra);
    row.push(fmt_flag(pass));
    row
}

pub fn extend(path: &Path, a: LinearMap2x2, samples: usize) -> Result<Report, Failure> {
    let (_, nc) = curve(path)?;
    let corners: Vec<_> = checks::scan_corners(&nc)?
        .into_iter()
        .map(|s| nc.natural_point(s))
        .collect();
    let u = *corners
        .first()
        .ok_or_else(|| Failure::Check("the sphere has no corners".into()))?;
    let v = corners
        .iter()
        .copied()
        .find(|c| u.det(*c).abs() > 1e-6)
        .ok_or_else(|| Failure::Check("the sphere has no two independent corners".into()))?;
    let (f, tol) = sphere_map(nc, a, samples)?;
    let ext = build_extension_p2(&f, u, v)?;
    let err = ext.matrix.max_entry_diff(&a);
    let mut t = Table::new(&[
        "a11",
        "a12",
        "a21",
        "a22",
        "max_entry_error",
        "sweep_norm_defect",
        "sweep_chord_defect",
        "grid_deviation",
        "pass",
    ]);
    let extra = [ext.sweep_norm_defect, ext.sweep_chord_defect, ext.grid_deviation].map(fmt_real);
    let pass = err <= tol;
    t.push(matrix_row(&ext.matrix, err, &extra, pass));
    Ok(Report { table: t, pass })
}

pub fn reconstruct(path: &Path, a: LinearMap2x2, samples: usize) -> Result<Report, Failure> {
    let (_, nc) = curve(path)?;
    let (f, tol) = sphere_map(nc, a, samples)?;
    let tol = tol.max(RECONSTRUCT_TOL);
    let r = reconstruct_two_corner(&f)?;
    let err = r.matrix.max_entry_diff(&a);
    let stages_ok = r.stages.iter().all(|s| s.passed());
    let pass = err <= tol && stages_ok;
    let mut t = Table::new(&[
        "a11",
        "a12",
        "a21",
        "a22",
        "max_entry_error",
        "half_length",
        "flipped",
        "pass",
    ]);
    let extra = [fmt_real(r.source_half_length), fmt_flag(r.flipped)];
    t.push(matrix_row(&r.matrix, err, &extra, pass));
    Ok(Report { table: t, pass })
}

pub fn oracle(paths: &[impl AsRef<Path>], samples: usize) -> Result<Report, Failure> {
    let mut t = Table::new(&["spec", "oracle_length", "half_length", "abs_err", "pass"]);
    let mut pass = true;
    for p in paths {
        let (name, nc) = curve(p.as_ref())?;
        let sp = nc.space();
        let len = polyline_arclength_oracle(sp.norm(), sp, 0.0, PI, samples)?;
        let err = (len - nc.half_length()).abs();
        let ok = err <= ORACLE_TOL;
        pass &= ok;
        t.push(vec![
            name,
            fmt_real(len),
            fmt_real(nc.half_length()),
            fmt_real(err),
            fmt_flag(ok),
        ]);
    }
    Ok(Report { table: t, pass })
}
