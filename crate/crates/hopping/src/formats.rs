//! Output formats. Every float is written with 17 significant digits, which
//! round-trips any `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use hopping_core::contour::Polyline;
use hopping_core::numrange::SupportCurve;
use hopping_core::pseudospectra::{CertifyOutcome, GridRegion, CERT_SAFETY_REL, TIE_TOL};
use hopping_core::C64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// `x` with 17 significant digits in scientific notation.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `bytes` to a temporary sibling of `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

pub fn points_csv(points: &[C64]) -> String {
    let mut s = String::with_capacity(48 * points.len() + 8);
    s.push_str("re,im\n");
    for z in points {
        let _ = writeln!(s, "{},{}", fmt17(z.re), fmt17(z.im));
    }
    s
}

pub fn read_points_csv(r: impl BufRead) -> Result<Vec<C64>, FormatError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if i == 0 {
            if line.trim() != "re,im" {
                return Err(FormatError::Parse {
                    line: 1,
                    msg: format!("expected header re,im, found {line:?}"),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: String| FormatError::Parse { line: i + 1, msg };
        let (a, b) = line.split_once(',').ok_or_else(|| bad("expected two fields".into()))?;
        let re: f64 = a.trim().parse().map_err(|e| bad(format!("{e}")))?;
        let im: f64 = b.trim().parse().map_err(|e| bad(format!("{e}")))?;
        out.push(C64::new(re, im));
    }
    Ok(out)
}

/// `theta,h,bx,by` per sampled direction.
pub fn support_csv(curve: &SupportCurve) -> String {
    let mut s = String::from("theta,h,bx,by\n");
    for k in 0..curve.len() {
        let b = curve.boundary[k];
        let _ = writeln!(
            s,
            "{},{},{},{}",
            fmt17(curve.angles[k]),
            fmt17(curve.h[k]),
            fmt17(b.re),
            fmt17(b.im)
        );
    }
    s
}

/// Binary PGM (P5), one byte per pixel.
pub fn pgm(width: usize, height: usize, pixels: &[u8]) -> Vec<u8> {
    assert_eq!(pixels.len(), width * height);
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

pub fn read_pgm(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>), FormatError> {
    let bad = |msg: &str| FormatError::Parse { line: 1, msg: msg.into() };
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("header is not ASCII"))?.to_string());
    }
    if fields[0] != "P5" || fields[3] != "255" {
        return Err(bad("not an 8-bit P5 image"));
    }
    let w: usize = fields[1].parse().map_err(|_| bad("bad width"))?;
    let h: usize = fields[2].parse().map_err(|_| bad("bad height"))?;
    let data = &bytes[pos + 1..];
    if data.len() != w * h {
        return Err(bad("pixel count does not match the header"));
    }
    Ok((w, h, data.to_vec()))
}

/// One line per leaf: `re,im,half_width,half_height,depth,class,s`.
pub fn cells_csv(region: &GridRegion) -> String {
    let mut s = String::from("re,im,half_width,half_height,depth,class,s\n");
    for c in &region.cells {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            fmt17(c.center.re),
            fmt17(c.center.im),
            fmt17(c.half_width),
            fmt17(c.half_height),
            c.depth,
            c.class.tag(),
            if c.s.is_nan() { "nan".to_string() } else { fmt17(c.s) }
        );
    }
    s
}

/// `curve,closed,re,im` for each vertex of each polyline.
pub fn polylines_csv(lines: &[Polyline]) -> String {
    let mut s = String::from("curve,closed,re,im\n");
    for (k, p) in lines.iter().enumerate() {
        for z in &p.points {
            let _ = writeln!(s, "{k},{},{},{}", p.closed, fmt17(z.re), fmt17(z.im));
        }
    }
    s
}

/// Minimal JSON value with insertion-ordered objects and 17-digit floats.
#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i128),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn obj<K: Into<String>>(fields: impl IntoIterator<Item = (K, Json)>) -> Json {
        Json::Obj(fields.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn complex(z: C64) -> Json {
        Json::Arr(vec![Json::Num(z.re), Json::Num(z.im)])
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        self.write(&mut s, 0);
        s.push('\n');
        s
    }

    fn write(&self, s: &mut String, indent: usize) {
        let pad = |s: &mut String, k: usize| s.push_str(&"  ".repeat(k));
        match self {
            Json::Null => s.push_str("null"),
            Json::Bool(b) => s.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => {
                let _ = write!(s, "{i}");
            }
            Json::Num(x) if x.is_finite() => s.push_str(&fmt17(*x)),
            Json::Num(_) => s.push_str("null"),
            Json::Str(t) => s.push_str(&serde_json::to_string(t).expect("strings serialize")),
            Json::Arr(items) => {
                let flat = items.iter().all(|v| !matches!(v, Json::Arr(_) | Json::Obj(_)));
                s.push('[');
                for (k, v) in items.iter().enumerate() {
                    if k > 0 {
                        s.push_str(if flat { ", " } else { "," });
                    }
                    if !flat {
                        s.push('\n');
                        pad(s, indent + 1);
                    }
                    v.write(s, indent + 1);
                }
                if !flat && !items.is_empty() {
                    s.push('\n');
                    pad(s, indent);
                }
                s.push(']');
            }
            Json::Obj(fields) => {
                s.push('{');
                for (k, (key, v)) in fields.iter().enumerate() {
                    if k > 0 {
                        s.push(',');
                    }
                    s.push('\n');
                    pad(s, indent + 1);
                    s.push_str(&serde_json::to_string(key).expect("strings serialize"));
                    s.push_str(": ");
                    v.write(s, indent + 1);
                }
                if !fields.is_empty() {
                    s.push('\n');
                    pad(s, indent);
                }
                s.push('}');
            }
        }
    }
}

pub const CERTIFICATE_VERSION: i128 = 1;

/// Error budgets of the kernels behind a certificate.
pub fn kernel_tolerances() -> Json {
    Json::obj([
        ("smin_dense_rel", Json::Num(1e-10)),
        ("smin_tridiag_rel", Json::Num(1e-8)),
        ("argmin_tie_abs", Json::Num(TIE_TOL)),
        ("radius_padding_rel", Json::Num(CERT_SAFETY_REL)),
    ])
}

/// Certificate (or failure report) as a JSON document.
pub fn certificate_json(outcome: &CertifyOutcome) -> String {
    let doc = match outcome {
        CertifyOutcome::Certified(c) => Json::obj([
            ("version", Json::Int(CERTIFICATE_VERSION)),
            ("valid", Json::Bool(true)),
            ("lambda", Json::complex(c.lambda)),
            ("n", Json::Int(c.n as i128)),
            ("s_value", Json::Num(c.s_value)),
            ("eps_n", Json::Num(c.eps_n)),
            ("eta", Json::Num(c.eta)),
            ("centers", Json::Arr(c.centers.iter().map(|&z| Json::complex(z)).collect())),
            ("radius", Json::Num(c.radius)),
            ("argmin_bitmask", Json::Int(c.argmin_bitmask as i128)),
            ("kernel_tolerances", kernel_tolerances()),
        ]),
        CertifyOutcome::Failed {
            lambda,
            n,
            s_value,
            eps_n,
            deficit,
        } => Json::obj([
            ("version", Json::Int(CERTIFICATE_VERSION)),
            ("valid", Json::Bool(false)),
            ("lambda", Json::complex(*lambda)),
            ("n", Json::Int(*n as i128)),
            ("s_value", Json::Num(*s_value)),
            ("eps_n", Json::Num(*eps_n)),
            ("deficit", Json::Num(*deficit)),
            ("kernel_tolerances", kernel_tolerances()),
        ]),
    };
    doc.render()
}
