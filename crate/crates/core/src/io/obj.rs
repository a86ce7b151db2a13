//! Wavefront OBJ export of a piecewise-quadric surface.
//!
//! All patches are sampled on one global lattice of `(M s + 1) x (N s + 1)`
//! nodes. Net vertices and edge nodes are computed from the control net
//! alone, so neighbouring patches share identical coordinates along seams.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::net::{AsymptoticNet, Quad};
use crate::quadric::QuadricField;
use crate::Vec3;

#[derive(Debug, Clone)]
pub struct ObjMesh {
    /// Samples per net edge.
    pub samples: usize,
    pub columns: usize,
    pub rows: usize,
    pub vertices: Vec<Vec3>,
    /// One-based vertex indices, counter-clockwise in `(u, v)`.
    pub faces: Vec<[usize; 4]>,
    /// Control polylines, one-based vertex indices.
    pub lines: Vec<Vec<usize>>,
}

impl ObjMesh {
    pub fn build(net: &AsymptoticNet, field: &QuadricField, samples: usize) -> Result<Self> {
        if samples == 0 {
            return Err(Error::InvalidInput("samples must be at least 1".into()));
        }
        let (m, n) = (net.domain().m(), net.domain().n());
        if field.domain() != net.domain() {
            return Err(Error::DimensionMismatch {
                expected: net.domain().quad_count(),
                found: field.domain().quad_count(),
            });
        }
        let s = samples;
        let (columns, rows) = (m * s + 1, n * s + 1);
        let mut vertices = Vec::with_capacity(columns * rows);
        for gy in 0..rows {
            for gx in 0..columns {
                let (i, ku) = (gx / s, gx % s);
                let (j, kv) = (gy / s, gy % s);
                let p = match (ku, kv) {
                    (0, 0) => net.at(i, j),
                    (_, 0) => lerp(net.at(i, j), net.at(i + 1, j), ku as f64 / s as f64),
                    (0, _) => lerp(net.at(i, j), net.at(i, j + 1), kv as f64 / s as f64),
                    _ => field
                        .patch(Quad::new(i, j))
                        .eval(ku as f64 / s as f64, kv as f64 / s as f64)?,
                };
                vertices.push(p);
            }
        }
        let node = |gx: usize, gy: usize| gy * columns + gx + 1;
        let mut faces = Vec::with_capacity((columns - 1) * (rows - 1));
        for gy in 0..rows - 1 {
            for gx in 0..columns - 1 {
                faces.push([node(gx, gy), node(gx + 1, gy), node(gx + 1, gy + 1), node(gx, gy + 1)]);
            }
        }
        let mut lines = Vec::with_capacity(m + n + 2);
        for j in 0..=n {
            lines.push((0..=m).map(|i| node(i * s, j * s)).collect());
        }
        for i in 0..=m {
            lines.push((0..=n).map(|j| node(i * s, j * s)).collect());
        }
        Ok(Self { samples, columns, rows, vertices, faces, lines })
    }

    /// Lattice node at global sample coordinates.
    pub fn node(&self, gx: usize, gy: usize) -> Vec3 {
        self.vertices[gy * self.columns + gx]
    }

    pub fn to_obj_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# piecewise quadric surface, {} samples per edge", self.samples);
        for v in &self.vertices {
            let _ = writeln!(out, "v {:.16e} {:.16e} {:.16e}", v.x, v.y, v.z);
        }
        let _ = writeln!(out, "g surface");
        for f in &self.faces {
            let _ = writeln!(out, "f {} {} {} {}", f[0], f[1], f[2], f[3]);
        }
        let _ = writeln!(out, "g control");
        for l in &self.lines {
            let idx: Vec<String> = l.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "l {}", idx.join(" "));
        }
        out
    }
}

fn lerp(p: Vec3, q: Vec3, t: f64) -> Vec3 {
    p + (q - p) * t
}

pub fn export_obj(net: &AsymptoticNet, field: &QuadricField, samples: usize, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, ObjMesh::build(net, field, samples)?.to_obj_string())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::camc::field_at_rho;
    use crate::generators::sphere_from_quadric;

    #[test]
    fn lattice_counts_and_seams() {
        let net = sphere_from_quadric(1.5, &[0.0, 0.3, 0.6, 1.0], &[0.0, 0.5, 1.0]).unwrap();
        let field = field_at_rho(&net, 1.0).unwrap();
        let mesh = ObjMesh::build(&net, &field, 4).unwrap();
        assert_eq!((mesh.columns, mesh.rows), (13, 9));
        assert_eq!(mesh.vertices.len(), 13 * 9);
        assert_eq!(mesh.faces.len(), 12 * 8);
        assert_eq!(mesh.lines.len(), 4 + 3);
        assert_eq!(mesh.node(4, 0), net.at(1, 0));
        assert_eq!(mesh.node(12, 8), net.at(3, 2));
        // Interior patch samples agree with the seam formula to rounding.
        let p = field.patch(Quad::new(1, 0)).eval(0.0, 0.5).unwrap();
        assert!((p - mesh.node(4, 2)).norm() < 1e-12);
        let text = mesh.to_obj_string();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 13 * 9);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 96);
    }

    #[test]
    fn zero_samples_rejected() {
        let net = sphere_from_quadric(1.5, &[0.0, 1.0], &[0.0, 1.0]).unwrap();
        let field = field_at_rho(&net, 1.0).unwrap();
        assert!(ObjMesh::build(&net, &field, 0).is_err());
    }
}
