//! Plain-text triangle meshes:
//!
//! ```text
//! # comment
//! DOMAIN disk <cx> <cy> <r>            (optional; or: annulus <cx> <cy> <ri> <ro>)
//! VERTICES <n>
//! <x> <y>                              (n lines)
//! TRIANGLES <m>
//! <a> <b> <c>                          (m lines, 0-based, counter-clockwise)
//! ```
//!
//! Boundary loops are derived from the triangles.

use std::fmt::Write as _;
use std::path::Path;

use steklov_core::geometry::{DomainShape, Mesh};

use crate::error::{LabError, LabResult};

fn bad(line: usize, msg: impl std::fmt::Display) -> LabError {
    LabError::Config(format!("mesh line {line}: {msg}"))
}

fn numbers<T: std::str::FromStr>(line: usize, text: &str, n: usize) -> LabResult<Vec<T>> {
    let v: Vec<T> = text
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| bad(line, format!("cannot parse {t:?}"))))
        .collect::<LabResult<_>>()?;
    if v.len() != n {
        return Err(bad(line, format!("expected {n} numbers, found {}", v.len())));
    }
    Ok(v)
}

pub fn parse_mesh(text: &str) -> LabResult<Mesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut domain = None;
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    while let Some((ln, line)) = lines.next() {
        let mut parts = line.splitn(2, char::is_whitespace);
        let key = parts.next().unwrap_or("");
        let rest = parts.next().unwrap_or("").trim();
        match key {
            "DOMAIN" => {
                let mut p = rest.splitn(2, char::is_whitespace);
                let kind = p.next().unwrap_or("");
                let args = p.next().unwrap_or("");
                domain = Some(match kind {
                    "disk" => {
                        let v: Vec<f64> = numbers(ln, args, 3)?;
                        DomainShape::Disk { center: [v[0], v[1]], radius: v[2] }
                    }
                    "annulus" => {
                        let v: Vec<f64> = numbers(ln, args, 4)?;
                        DomainShape::Annulus { center: [v[0], v[1]], inner: v[2], outer: v[3] }
                    }
                    other => return Err(bad(ln, format!("unknown domain {other:?}"))),
                });
            }
            "VERTICES" => {
                let n: usize = numbers(ln, rest, 1)?[0];
                for _ in 0..n {
                    let (l, t) = lines.next().ok_or_else(|| bad(ln, "missing vertex lines"))?;
                    let v: Vec<f64> = numbers(l, t, 2)?;
                    vertices.push([v[0], v[1]]);
                }
            }
            "TRIANGLES" => {
                let n: usize = numbers(ln, rest, 1)?[0];
                for _ in 0..n {
                    let (l, t) = lines.next().ok_or_else(|| bad(ln, "missing triangle lines"))?;
                    let v: Vec<usize> = numbers(l, t, 3)?;
                    triangles.push([v[0], v[1], v[2]]);
                }
            }
            other => return Err(bad(ln, format!("unknown section {other:?}"))),
        }
    }
    Mesh::new(vertices, triangles, domain).map_err(|e| LabError::Config(format!("mesh: {e}")))
}

pub fn read_mesh(path: &Path) -> LabResult<Mesh> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    parse_mesh(&text).map_err(|e| match e {
        LabError::Config(m) => LabError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Serializes with shortest round-trip float formatting.
pub fn format_mesh(mesh: &Mesh) -> String {
    let mut s = String::new();
    match mesh.domain() {
        Some(DomainShape::Disk { center, radius }) => {
            let _ = writeln!(s, "DOMAIN disk {} {} {}", center[0], center[1], radius);
        }
        Some(DomainShape::Annulus { center, inner, outer }) => {
            let _ = writeln!(s, "DOMAIN annulus {} {} {} {}", center[0], center[1], inner, outer);
        }
        None => {}
    }
    let _ = writeln!(s, "VERTICES {}", mesh.num_vertices());
    for v in mesh.vertices() {
        let _ = writeln!(s, "{} {}", v[0], v[1]);
    }
    let _ = writeln!(s, "TRIANGLES {}", mesh.triangles().len());
    for t in mesh.triangles() {
        let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
    }
    s
}
