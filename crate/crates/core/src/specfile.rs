//! Line-oriented `key=value` norm spec files.
//!
//! ```text
//! # comment
//! kind=transform
//! base=lens0.norm
//! matrix=2,1,0,1
//! ```

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::norm::NormSpec;
use crate::vector::{LinearMap2x2, Vector2};

/// Nesting limit for `base=` references.
const MAX_DEPTH: usize = 16;

fn parse_err(line: usize, key: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        key: key.to_string(),
        message: message.into(),
    }
}

fn parse_real(line: usize, key: &str, text: &str) -> Result<f64> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| parse_err(line, key, format!("not a real number: {:?}", text.trim())))?;
    if !v.is_finite() {
        return Err(parse_err(line, key, "value must be finite"));
    }
    Ok(v)
}

fn parse_reals(line: usize, key: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',').map(|t| parse_real(line, key, t)).collect()
}

/// Parses `a,b,c,d` (row-major).
pub fn parse_matrix(text: &str) -> Result<LinearMap2x2> {
    matrix_at(0, "matrix", text)
}

fn matrix_at(line: usize, key: &str, text: &str) -> Result<LinearMap2x2> {
    match parse_reals(line, key, text)?.as_slice() {
        &[a, b, c, d] => Ok(LinearMap2x2::new(a, b, c, d)),
        other => Err(parse_err(
            line,
            key,
            format!("expected 4 entries, got {}", other.len()),
        )),
    }
}

struct Entries {
    map: HashMap<String, (usize, String)>,
    last_line: usize,
}

impl Entries {
    fn take(&mut self, key: &str) -> Result<(usize, String)> {
        self.map
            .remove(key)
            .ok_or_else(|| parse_err(self.last_line, key, "missing required key"))
    }

    fn finish(self) -> Result<()> {
        match self.map.into_iter().min_by_key(|(_, (line, _))| *line) {
            Some((key, (line, _))) => Err(parse_err(line, &key, "key not valid for this kind")),
            None => Ok(()),
        }
    }
}

fn entries(text: &str) -> Result<Entries> {
    let mut map = HashMap::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(parse_err(line, content, "expected key=value"));
        };
        let key = key.trim();
        if !matches!(key, "kind" | "p" | "vertices" | "beta" | "base" | "matrix") {
            return Err(parse_err(line, key, "unknown key"));
        }
        if map
            .insert(key.to_string(), (line, value.trim().to_string()))
            .is_some()
        {
            return Err(parse_err(line, key, "duplicate key"));
        }
    }
    Ok(Entries { map, last_line })
}

/// Parses spec text. `base` paths resolve against `dir`.
pub fn parse_spec(text: &str, dir: &Path) -> Result<NormSpec> {
    parse_nested(text, dir, 0)
}

fn parse_nested(text: &str, dir: &Path, depth: usize) -> Result<NormSpec> {
    let mut e = entries(text)?;
    let (kind_line, kind) = e.take("kind")?;
    let spec = match kind.as_str() {
        "pnorm" => {
            let (line, p) = e.take("p")?;
            NormSpec::PNorm {
                p: parse_real(line, "p", &p)?,
            }
        }
        "polygon" => {
            let (line, text) = e.take("vertices")?;
            let vertices = text
                .split(';')
                .filter(|t| !t.trim().is_empty())
                .map(|pair| match parse_reals(line, "vertices", pair)?.as_slice() {
                    &[x, y] => Ok(Vector2::new(x, y)),
                    _ => Err(parse_err(
                        line,
                        "vertices",
                        format!("bad vertex {:?}", pair.trim()),
                    )),
                })
                .collect::<Result<Vec<_>>>()?;
            NormSpec::Polygon { vertices }
        }
        "lens" => {
            let (line, beta) = e.take("beta")?;
            NormSpec::Lens {
                beta: parse_real(line, "beta", &beta)?,
            }
        }
        "double_lens" => NormSpec::DoubleLens,
        "transform" => {
            let (mline, m) = e.take("matrix")?;
            let matrix = matrix_at(mline, "matrix", &m)?;
            let (bline, base) = e.take("base")?;
            if depth >= MAX_DEPTH {
                return Err(parse_err(bline, "base", "base references nest too deeply"));
            }
            let path = dir.join(&base);
            let text = std::fs::read_to_string(&path)
                .map_err(|err| parse_err(bline, "base", format!("{}: {err}", path.display())))?;
            let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
            let inner = parse_nested(&text, &base_dir, depth + 1).map_err(|err| match err {
                Error::Parse { line, key, message } => parse_err(
                    bline,
                    "base",
                    format!("{}:{line}: {key}: {message}", path.display()),
                ),
                other => other,
            })?;
            NormSpec::transform(inner, matrix)
        }
        other => return Err(parse_err(kind_line, "kind", format!("unknown kind {other:?}"))),
    };
    e.finish()?;
    Ok(spec)
}

/// Reads and parses a spec file.
pub fn load_spec(path: &Path) -> Result<NormSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_spec(&text, &dir)
}
