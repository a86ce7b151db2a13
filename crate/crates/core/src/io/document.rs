//! Line-oriented net documents.
//!
//! ```text
//! document := header extent meta* "vertices" NL row{(M+1)(N+1)} "end" NL
//! header   := "asymnet-net" SP version NL
//! extent   := "extent" SP M SP N NL
//! meta     := "meta" SP key SP value NL
//! row      := x SP y SP z NL
//! ```
//!
//! Rows list `q(i, j)` with `i` fastest. Blank lines and lines starting with
//! `#` are ignored. Coordinates are written with 17 significant digits, so
//! a save/load cycle is bit-exact.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::net::{AsymptoticNet, GridDomain};
use crate::Vec3;

pub const FORMAT_TAG: &str = "asymnet-net";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct NetDocument {
    pub version: u32,
    pub m: usize,
    pub n: usize,
    pub vertices: Vec<Vec3>,
    /// Ordered `(key, value)` pairs; keys carry no whitespace.
    pub metadata: Vec<(String, String)>,
}

impl NetDocument {
    pub fn from_net(net: &AsymptoticNet) -> Self {
        Self {
            version: FORMAT_VERSION,
            m: net.domain().m(),
            n: net.domain().n(),
            vertices: net.positions().to_vec(),
            metadata: Vec::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.metadata.push((key.to_owned(), value.to_string()));
        self
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_net(&self) -> Result<AsymptoticNet> {
        AsymptoticNet::new(GridDomain::new(self.m, self.n)?, self.vertices.clone())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let err = |line: usize, message: String| Error::Parse { line, message };
        let eof = |what: &str| Error::Parse {
            line: text.lines().count() + 1,
            message: format!("unexpected end of input, expected {what}"),
        };

        let (ln, header) = lines.next().ok_or_else(|| eof("header"))?;
        let mut words = header.split_whitespace();
        if words.next() != Some(FORMAT_TAG) {
            return Err(err(ln, format!("expected `{FORMAT_TAG} <version>`")));
        }
        let version: u32 = words
            .next()
            .and_then(|w| w.parse().ok())
            .ok_or_else(|| err(ln, "missing or invalid version".into()))?;
        if version != FORMAT_VERSION {
            return Err(err(ln, format!("unsupported version {version}")));
        }

        let (ln, extent) = lines.next().ok_or_else(|| eof("extent"))?;
        let fields: Vec<&str> = extent.split_whitespace().collect();
        let (m, n) = match fields.as_slice() {
            ["extent", m, n] => (
                m.parse::<usize>().map_err(|e| err(ln, format!("extent M: {e}")))?,
                n.parse::<usize>().map_err(|e| err(ln, format!("extent N: {e}")))?,
            ),
            _ => return Err(err(ln, "expected `extent <M> <N>`".into())),
        };

        let mut metadata = Vec::new();
        loop {
            let (ln, line) = lines.next().ok_or_else(|| eof("`vertices`"))?;
            if line == "vertices" {
                break;
            }
            match line.split_once(char::is_whitespace) {
                Some(("meta", rest)) => {
                    let rest = rest.trim_start();
                    let (key, value) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                    if key.is_empty() {
                        return Err(err(ln, "meta line without key".into()));
                    }
                    metadata.push((key.to_owned(), value.trim().to_owned()));
                }
                _ => return Err(err(ln, format!("expected `meta` or `vertices`, found `{line}`"))),
            }
        }

        let mut vertices = Vec::new();
        loop {
            let (ln, line) = lines.next().ok_or_else(|| eof("vertex row or `end`"))?;
            if line == "end" {
                break;
            }
            let coords: Vec<&str> = line.split_whitespace().collect();
            if coords.len() != 3 {
                return Err(err(ln, format!("expected 3 coordinates, found {}", coords.len())));
            }
            let mut v = Vec3::zeros();
            for (k, c) in coords.iter().enumerate() {
                v[k] = c.parse().map_err(|e| err(ln, format!("coordinate {}: {e}", k + 1)))?;
                if !v[k].is_finite() {
                    return Err(err(ln, format!("coordinate {} is not finite", k + 1)));
                }
            }
            vertices.push(v);
        }
        if let Some((ln, line)) = lines.next() {
            return Err(err(ln, format!("trailing content after `end`: `{line}`")));
        }
        let expected = (m + 1) * (n + 1);
        if vertices.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: vertices.len() });
        }
        Ok(Self { version, m, n, vertices, metadata })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_string())?;
        Ok(())
    }
}

impl fmt::Display for NetDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        writeln!(out, "{FORMAT_TAG} {}", self.version)?;
        writeln!(out, "extent {} {}", self.m, self.n)?;
        for (k, v) in &self.metadata {
            writeln!(out, "meta {k} {v}")?;
        }
        writeln!(out, "vertices")?;
        for p in &self.vertices {
            writeln!(out, "{:.16e} {:.16e} {:.16e}", p.x, p.y, p.z)?;
        }
        writeln!(out, "end")?;
        f.write_str(&out)
    }
}

pub fn load_net(path: impl AsRef<Path>) -> Result<AsymptoticNet> {
    NetDocument::read(path)?.to_net()
}

pub fn save_net(net: &AsymptoticNet, path: impl AsRef<Path>) -> Result<()> {
    NetDocument::from_net(net).write(path)
}
