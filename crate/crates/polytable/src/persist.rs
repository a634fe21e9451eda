//! Run configuration and bit-stable serialization of every artifact.
//!
//! All floating output uses 17 significant digits, which round-trips doubles
//! exactly; rerunning a config reproduces every file byte for byte. The
//! manifest lists each written file with its SHA-256.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::locus::{Bbox, CurvePolyline};
use crate::poly::Poly;
use crate::roots::RootSet;
use crate::table::{CoefficientTriple, NumeratorSpec, PolyTable, TableSource};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config file {path} not found or unreadable: {source}")]
    NotFound {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("config field `{field}`: {message}")]
    Validation { field: String, message: String },
}

/// A real coefficient or an explicit [re, im] pair.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum Coeff {
    Re(f64),
    Pair([f64; 2]),
}

impl Coeff {
    fn to_complex(self) -> Complex64 {
        match self {
            Coeff::Re(re) => Complex64::new(re, 0.0),
            Coeff::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(rename = "A")]
    a: Option<Vec<Coeff>>,
    #[serde(rename = "B")]
    b: Option<Vec<Coeff>>,
    #[serde(rename = "C")]
    c: Option<Vec<Coeff>>,
    numerator: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(rename = "M")]
    m: Option<i64>,
    #[serde(rename = "N")]
    n: Option<i64>,
    root_tol: Option<f64>,
    max_iters: Option<i64>,
    locus_tol: Option<f64>,
    pairing_tol: Option<f64>,
    bbox: Option<[f64; 4]>,
    grid_step: Option<f64>,
    out_dir: Option<String>,
    seed: Option<u64>,
}

/// Validated run configuration; defaults are documented in the README.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub triple: Option<CoefficientTriple<f64>>,
    pub numerator: Option<NumeratorSpec<f64>>,
    pub m: usize,
    pub n: usize,
    pub root_tol: f64,
    pub max_iters: u32,
    pub locus_tol: f64,
    pub pairing_tol: f64,
    pub bbox: Bbox<f64>,
    pub grid_step: f64,
    pub out_dir: PathBuf,
    pub seed: u64,
}

fn validation(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Validation {
        field: field.into(),
        message: message.into(),
    }
}

fn finite_poly(field: &str, coeffs: &[Coeff]) -> std::result::Result<Poly<f64>, ConfigError> {
    let cs: Vec<Complex64> = coeffs.iter().map(|c| c.to_complex()).collect();
    if cs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(validation(field, "coefficients must be finite"));
    }
    Ok(Poly::new(cs))
}

/// Loads and validates a config file; unknown keys are an error.
pub fn load_config(path: &Path) -> std::result::Result<RunConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::NotFound {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> std::result::Result<RunConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    let triple = match (&raw.a, &raw.b, &raw.c) {
        (None, None, None) => None,
        (Some(a), Some(b), Some(c)) => Some(CoefficientTriple::new(
            finite_poly("A", a)?,
            finite_poly("B", b)?,
            finite_poly("C", c)?,
        )),
        _ => {
            return Err(validation(
                "A/B/C",
                "a coefficient triple needs all three of A, B, C",
            ))
        }
    };
    let numerator = match &raw.numerator {
        None => None,
        Some(nested) => {
            if nested.is_empty() || nested.iter().any(|v| v.is_empty()) {
                return Err(validation("numerator", "empty numerator array"));
            }
            if nested
                .iter()
                .flatten()
                .flatten()
                .any(|v| !v.is_finite())
            {
                return Err(validation("numerator", "entries must be finite"));
            }
            Some(NumeratorSpec::new(nested.clone()))
        }
    };
    match (&triple, &numerator) {
        (None, None) => {
            return Err(validation(
                "A/B/C",
                "config needs a coefficient triple (A, B, C) or a numerator",
            ))
        }
        (Some(_), Some(_)) => {
            return Err(validation(
                "numerator",
                "give either a coefficient triple or a numerator, not both",
            ))
        }
        _ => {}
    }

    let m = raw.m.ok_or_else(|| validation("M", "missing"))?;
    if m < 0 {
        return Err(validation("M", "must be nonnegative"));
    }
    let n = raw.n.ok_or_else(|| validation("N", "missing"))?;
    if n < 0 {
        return Err(validation("N", "must be nonnegative"));
    }
    let max_iters = raw.max_iters.unwrap_or(500);
    if max_iters <= 0 {
        return Err(validation("max_iters", "must be positive"));
    }

    let pos = |field: &str, v: f64| -> std::result::Result<f64, ConfigError> {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(validation(field, "must be a positive finite number"))
        }
    };
    let root_tol = pos("root_tol", raw.root_tol.unwrap_or(1e-12))?;
    let locus_tol = pos("locus_tol", raw.locus_tol.unwrap_or(1e-6))?;
    let pairing_tol = pos("pairing_tol", raw.pairing_tol.unwrap_or(1e-6))?;
    let grid_step = pos("grid_step", raw.grid_step.unwrap_or(0.01))?;

    let bb = raw.bbox.unwrap_or([-3.0, 3.0, -3.0, 3.0]);
    let bbox = Bbox::new(bb[0], bb[1], bb[2], bb[3]);
    if bbox.is_degenerate() {
        return Err(validation("bbox", "needs x_min < x_max and y_min < y_max"));
    }

    Ok(RunConfig {
        triple,
        numerator,
        m: m as usize,
        n: n as usize,
        root_tol,
        max_iters: max_iters as u32,
        locus_tol,
        pairing_tol,
        bbox,
        grid_step,
        out_dir: PathBuf::from(raw.out_dir.unwrap_or_else(|| "out".into())),
        seed: raw.seed.unwrap_or(0),
    })
}

/// 17 significant digits: lossless f64 round-trip, deterministic text.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn poly_json(p: &Poly<f64>) -> String {
    let mut s = String::from("[");
    for (k, c) in p.coeffs().iter().enumerate() {
        if k > 0 {
            s.push(',');
        }
        let _ = write!(s, "[{},{}]", fmt_f64(c.re), fmt_f64(c.im));
    }
    s.push(']');
    s
}

pub fn parse_poly_json(text: &str) -> std::result::Result<Poly<f64>, ConfigError> {
    let pairs: Vec<Coeff> = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(Poly::new(pairs.iter().map(|c| c.to_complex()).collect()))
}

fn numerator_json(num: &NumeratorSpec<f64>) -> String {
    let (i_max, j_max, k_max) = num.bounds();
    let mut s = String::from("[");
    for i in 0..=i_max {
        if i > 0 {
            s.push(',');
        }
        s.push('[');
        for j in 0..=j_max {
            if j > 0 {
                s.push(',');
            }
            s.push('[');
            for k in 0..=k_max {
                if k > 0 {
                    s.push(',');
                }
                s.push_str(&fmt_f64(num.get(i, j, k)));
            }
            s.push(']');
        }
        s.push(']');
    }
    s.push(']');
    s
}

/// Table export: {kind, m, n, spec, entries} with rows indexed by m.
pub fn table_json(table: &PolyTable<f64>) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "{{\"kind\":\"{}\",\"m\":{},\"n\":{},\"spec\":",
        table.kind.as_str(),
        table.m_max,
        table.n_max
    );
    match table.source() {
        TableSource::Triple(t) => {
            let _ = write!(
                s,
                "{{\"A\":{},\"B\":{},\"C\":{}}}",
                poly_json(&t.a),
                poly_json(&t.b),
                poly_json(&t.c)
            );
        }
        TableSource::Numerator(num) => {
            let _ = write!(s, "{{\"numerator\":{}}}", numerator_json(num));
        }
    }
    s.push_str(",\"entries\":[");
    for m in 0..=table.m_max {
        if m > 0 {
            s.push(',');
        }
        s.push('[');
        for n in 0..=table.n_max {
            if n > 0 {
                s.push(',');
            }
            s.push_str(&poly_json(table.entry(m, n).expect("in range")));
        }
        s.push(']');
    }
    s.push_str("]}");
    s
}

/// RootSet CSV: "re,im,residual,converged".
pub fn rootset_csv(rs: &RootSet<f64>) -> String {
    let mut s = String::from("re,im,residual,converged\n");
    for k in 0..rs.len() {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            fmt_f64(rs.roots[k].re),
            fmt_f64(rs.roots[k].im),
            fmt_f64(rs.residuals[k]),
            rs.converged[k]
        );
    }
    s
}

pub fn parse_rootset_csv(text: &str) -> std::result::Result<RootSet<f64>, ConfigError> {
    let mut roots = Vec::new();
    let mut residuals = Vec::new();
    let mut converged = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 || line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(ConfigError::Parse {
                line: idx + 1,
                column: 1,
                message: format!("expected 4 fields, got {}", fields.len()),
            });
        }
        let num = |f: &str| -> std::result::Result<f64, ConfigError> {
            f.parse().map_err(|e| ConfigError::Parse {
                line: idx + 1,
                column: 1,
                message: format!("bad float {f:?}: {e}"),
            })
        };
        roots.push(Complex64::new(num(fields[0])?, num(fields[1])?));
        residuals.push(num(fields[2])?);
        converged.push(fields[3] == "true");
    }
    let source_degree = roots.len();
    Ok(RootSet {
        roots,
        residuals,
        converged,
        source_degree,
    })
}

/// Single-entry coefficient CSV: "k,re,im".
pub fn entry_csv(p: &Poly<f64>) -> String {
    let mut s = String::from("k,re,im\n");
    for (k, c) in p.coeffs().iter().enumerate() {
        let _ = writeln!(s, "{},{},{}", k, fmt_f64(c.re), fmt_f64(c.im));
    }
    s
}

/// Curve polyline CSV: "segment_id,re,im".
pub fn curve_csv(c: &CurvePolyline<f64>) -> String {
    let mut s = String::from("segment_id,re,im\n");
    for (id, seg) in c.segments.iter().enumerate() {
        for p in seg {
            let _ = writeln!(s, "{},{},{}", id, fmt_f64(p.re), fmt_f64(p.im));
        }
    }
    s
}

/// Density comparison CSV: "x,empirical_cdf,model_cdf,diff".
pub fn density_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut s = String::from("x,empirical_cdf,model_cdf,diff\n");
    for &(x, emp, model) in rows {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            fmt_f64(x),
            fmt_f64(emp),
            fmt_f64(model),
            fmt_f64(emp - model)
        );
    }
    s
}

/// One row of the nonreal-zero report.
pub struct NonrealRow {
    pub m: usize,
    pub n: usize,
    pub i_max: usize,
    pub j_max: usize,
    pub k_max: usize,
    pub count: usize,
    pub bound: usize,
}

/// Nonreal report CSV: "m,n,I,J,K,count,bound,pass".
pub fn nonreal_csv(rows: &[NonrealRow]) -> String {
    let mut s = String::from("m,n,I,J,K,count,bound,pass\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.m,
            r.n,
            r.i_max,
            r.j_max,
            r.k_max,
            r.count,
            r.bound,
            r.count <= r.bound
        );
    }
    s
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<ManifestEntry>,
}

/// Collects written files and finishes with a deterministic manifest.json.
pub struct OutputWriter {
    dir: PathBuf,
    entries: Vec<ManifestEntry>,
}

impl OutputWriter {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.display().to_string(),
            source,
        })?;
        Ok(OutputWriter {
            dir: dir.to_path_buf(),
            entries: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut hasher = Sha256::new();
        hasher.update(contents.as_bytes());
        self.entries.push(ManifestEntry {
            path: name.to_string(),
            sha256: format!("{:x}", hasher.finalize()),
            bytes: contents.len() as u64,
        });
        Ok(())
    }

    /// Writes manifest.json (sorted by path) and returns the manifest.
    pub fn finish(mut self) -> Result<Manifest> {
        self.entries.sort_by(|a, b| a.path.cmp(&b.path));
        let manifest = Manifest {
            files: self.entries.clone(),
        };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        let path = self.dir.join("manifest.json");
        fs::write(&path, text).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(manifest)
    }
}
