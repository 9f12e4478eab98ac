use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Analytic description of the domain, used to snap new boundary vertices
/// during refinement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainShape {
    Disk { center: [f64; 2], radius: f64 },
    Annulus { center: [f64; 2], inner: f64, outer: f64 },
}

impl DomainShape {
    /// Radial projection of `p` onto the nearest boundary circle.
    pub fn project_to_boundary(&self, p: [f64; 2]) -> [f64; 2] {
        let (c, r) = match *self {
            DomainShape::Disk { center, radius } => (center, radius),
            DomainShape::Annulus { center, inner, outer } => {
                let d = libm::hypot(p[0] - center[0], p[1] - center[1]);
                let r = if libm::fabs(d - inner) < libm::fabs(d - outer) { inner } else { outer };
                (center, r)
            }
        };
        let d = libm::hypot(p[0] - c[0], p[1] - c[1]);
        [c[0] + r * (p[0] - c[0]) / d, c[1] + r * (p[1] - c[1]) / d]
    }

    pub fn area(&self) -> f64 {
        use core::f64::consts::PI;
        match *self {
            DomainShape::Disk { radius, .. } => PI * radius * radius,
            DomainShape::Annulus { inner, outer, .. } => PI * (outer * outer - inner * inner),
        }
    }
}

/// Conforming triangle mesh of a planar domain.
///
/// Boundary loops are ordered so that the domain lies to their left (outer
/// loops counter-clockwise, holes clockwise); each loop starts at its
/// smallest vertex index and loops are sorted by that index. Boundary
/// degrees of freedom are numbered by concatenating the loops.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary_loops: Vec<Vec<usize>>,
    boundary_normals: Vec<[f64; 2]>,
    h_max: f64,
    domain: Option<DomainShape>,
}

pub(crate) fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    libm::hypot(b[0] - a[0], b[1] - a[1])
}

impl Mesh {
    /// Validates counter-clockwise triangles and derives boundary loops,
    /// outward vertex normals and the longest edge.
    pub fn new(vertices: Vec<[f64; 2]>, triangles: Vec<[usize; 3]>, domain: Option<DomainShape>) -> Result<Mesh> {
        if triangles.is_empty() {
            return Err(Error::Topology("mesh has no triangles".into()));
        }
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::Topology(format!("triangle {t} references a missing vertex")));
            }
            let area = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            if !(area > 0.0) {
                return Err(Error::Topology(format!("triangle {t} has non-positive area {area:e}")));
            }
        }

        // directed edge (a, b) per triangle side; count undirected uses
        let mut uses: BTreeMap<(usize, usize), (usize, (usize, usize))> = BTreeMap::new();
        for tri in &triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let e = uses.entry(key).or_insert((0, (a, b)));
                e.0 += 1;
                if e.0 > 2 {
                    return Err(Error::Topology(format!("edge ({}, {}) shared by more than two triangles", key.0, key.1)));
                }
            }
        }
        let mut h_max: f64 = 0.0;
        let mut next: BTreeMap<usize, usize> = BTreeMap::new();
        for (&(a, b), &(count, dir)) in &uses {
            h_max = h_max.max(dist(vertices[a], vertices[b]));
            if count == 1 && next.insert(dir.0, dir.1).is_some() {
                return Err(Error::Topology(format!("boundary vertex {} has two outgoing boundary edges", dir.0)));
            }
        }
        if next.is_empty() {
            return Err(Error::Topology("mesh has no boundary".into()));
        }

        let mut visited = BTreeMap::new();
        let mut boundary_loops = Vec::new();
        for &start in next.keys() {
            if visited.contains_key(&start) {
                continue;
            }
            let mut lp = vec![start];
            visited.insert(start, ());
            let mut v = next[&start];
            while v != start {
                if visited.insert(v, ()).is_some() {
                    return Err(Error::Topology(format!("boundary loop through vertex {v} does not close")));
                }
                lp.push(v);
                v = *next
                    .get(&v)
                    .ok_or_else(|| Error::Topology(format!("boundary chain breaks at vertex {v}")))?;
            }
            if lp.len() < 3 {
                return Err(Error::Topology("degenerate boundary loop".into()));
            }
            boundary_loops.push(lp);
        }

        let mut boundary_normals = Vec::new();
        for lp in &boundary_loops {
            let n = lp.len();
            for i in 0..n {
                let prev = vertices[lp[(i + n - 1) % n]];
                let cur = vertices[lp[i]];
                let nxt = vertices[lp[(i + 1) % n]];
                let e1 = edge_normal(prev, cur);
                let e2 = edge_normal(cur, nxt);
                let s = [e1[0] + e2[0], e1[1] + e2[1]];
                let len = libm::hypot(s[0], s[1]);
                boundary_normals.push([s[0] / len, s[1] / len]);
            }
        }

        Ok(Mesh { vertices, triangles, boundary_loops, boundary_normals, h_max, domain })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_loops(&self) -> &[Vec<usize>] {
        &self.boundary_loops
    }

    /// Unit outward normals, one per boundary DOF (loop-concatenated order).
    pub fn boundary_normals(&self) -> &[[f64; 2]] {
        &self.boundary_normals
    }

    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    pub fn domain(&self) -> Option<DomainShape> {
        self.domain
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Boundary vertices in DOF order.
    pub fn boundary_vertices(&self) -> Vec<usize> {
        self.boundary_loops.iter().flatten().copied().collect()
    }

    pub fn num_boundary(&self) -> usize {
        self.boundary_loops.iter().map(Vec::len).sum()
    }

    /// `(start, len)` of each loop within the boundary DOF numbering.
    pub fn loop_ranges(&self) -> Vec<core::ops::Range<usize>> {
        let mut start = 0;
        self.boundary_loops
            .iter()
            .map(|lp| {
                let r = start..start + lp.len();
                start += lp.len();
                r
            })
            .collect()
    }

    /// Interior vertices, ascending.
    pub fn interior_vertices(&self) -> Vec<usize> {
        let mut is_b = vec![false; self.vertices.len()];
        for &v in self.boundary_loops.iter().flatten() {
            is_b[v] = true;
        }
        (0..self.vertices.len()).filter(|&v| !is_b[v]).collect()
    }

    pub fn triangle_coords(&self, t: usize) -> [[f64; 2]; 3] {
        let tri = self.triangles[t];
        [self.vertices[tri[0]], self.vertices[tri[1]], self.vertices[tri[2]]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_coords(t);
        signed_area(a, b, c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Boundary edges as `(dof_a, dof_b)` pairs in traversal order, loop by
    /// loop, each loop closed.
    pub fn boundary_edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::with_capacity(self.num_boundary());
        for range in self.loop_ranges() {
            let n = range.len();
            for i in 0..n {
                edges.push((range.start + i, range.start + (i + 1) % n));
            }
        }
        edges
    }

    /// Checks the documented mesh invariants; returns a description of the
    /// first violation.
    pub fn check_invariants(&self) -> core::result::Result<(), alloc::string::String> {
        for t in 0..self.triangles.len() {
            if !(self.triangle_area(t) > 0.0) {
                return Err(format!("triangle {t} has non-positive area"));
            }
        }
        // each boundary edge's owner triangle must see the normal pointing away
        let mut owner: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                owner.insert((tri[k], tri[(k + 1) % 3]), t);
            }
        }
        let bverts = self.boundary_vertices();
        for (a, b) in self.boundary_edges() {
            let (va, vb) = (bverts[a], bverts[b]);
            let t = *owner.get(&(va, vb)).ok_or_else(|| format!("boundary edge ({va}, {vb}) has no owner"))?;
            if owner.contains_key(&(vb, va)) {
                return Err(format!("boundary edge ({va}, {vb}) is shared"));
            }
            let [p, q, r] = self.triangle_coords(t);
            let centroid = [(p[0] + q[0] + r[0]) / 3.0, (p[1] + q[1] + r[1]) / 3.0];
            let pa = self.vertices[va];
            let pb = self.vertices[vb];
            let mid = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
            let out = [mid[0] - centroid[0], mid[1] - centroid[1]];
            for dof in [a, b] {
                let n = self.boundary_normals[dof];
                if (libm::hypot(n[0], n[1]) - 1.0).abs() > 1e-12 {
                    return Err(format!("normal at boundary dof {dof} is not unit"));
                }
                if n[0] * out[0] + n[1] * out[1] <= 0.0 {
                    return Err(format!("normal at boundary dof {dof} points inward"));
                }
            }
        }
        Ok(())
    }
}

/// Outward normal of a boundary edge traversed with the domain on its left.
fn edge_normal(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len = libm::hypot(d[0], d[1]);
    [d[1] / len, -d[0] / len]
}
