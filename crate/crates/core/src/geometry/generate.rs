//! Ring meshes of disks and annuli.
//!
//! Vertices sit on concentric circles whose node counts are multiples of
//! [`SECTORS`]; neighbouring rings are stitched by a zipper whose decisions
//! are made in exact integer arithmetic. The resulting mesh is invariant under
//! rotation by `2π / SECTORS`, so angular modes `1 ≤ k < SECTORS / 2` stay
//! exactly degenerate in the discrete spectrum.

use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{DomainShape, Mesh};
use crate::{Error, Result};

/// Rotational symmetry order of generated meshes.
pub const SECTORS: usize = 12;

/// Ring spacing relative to the target edge length (equilateral height).
const RADIAL_FACTOR: f64 = 0.866;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshOptions {
    pub max_vertices: usize,
}

impl Default for MeshOptions {
    fn default() -> Self {
        MeshOptions { max_vertices: 2_000_000 }
    }
}

struct Ring {
    radius: f64,
    count: usize,
    /// nodes at angles 2π(j + offset/2)/count, offset ∈ {0, 1}
    offset: usize,
    first: usize,
}

fn ring_count(radius: f64, target_h: f64) -> usize {
    let m = libm::round(2.0 * PI * radius / (SECTORS as f64 * target_h));
    SECTORS * (m as usize).max(1)
}

fn push_ring(vertices: &mut Vec<[f64; 2]>, center: [f64; 2], radius: f64, count: usize, offset: usize) -> Ring {
    let first = vertices.len();
    for j in 0..count {
        let theta = 2.0 * PI * (2 * j + offset) as f64 / (2 * count) as f64;
        vertices.push([center[0] + radius * libm::cos(theta), center[1] + radius * libm::sin(theta)]);
    }
    Ring { radius, count, offset, first }
}

/// Stitches two rings with a band of triangles. Positions are compared as
/// exact rationals `(2j + offset) / (2 count)`.
fn zip(inner: &Ring, outer: &Ring, triangles: &mut Vec<[usize; 3]>) {
    let (ni, no) = (inner.count as u64, outer.count as u64);
    let (mut a, mut b) = (0u64, 0u64);
    while a < ni || b < no {
        let next_inner = (2 * (a + 1) + inner.offset as u64) * no;
        let next_outer = (2 * (b + 1) + outer.offset as u64) * ni;
        let pa = inner.first + (a % ni) as usize;
        let pb = outer.first + (b % no) as usize;
        if b >= no || (a < ni && next_inner <= next_outer) {
            let pa1 = inner.first + ((a + 1) % ni) as usize;
            triangles.push([pa, pb, pa1]);
            a += 1;
        } else {
            let pb1 = outer.first + ((b + 1) % no) as usize;
            triangles.push([pa, pb, pb1]);
            b += 1;
        }
    }
}

fn orient(vertices: &[[f64; 2]], triangles: &mut [[usize; 3]]) {
    for t in triangles.iter_mut() {
        if super::mesh::signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]) < 0.0 {
            t.swap(1, 2);
        }
    }
}

fn check_budget(area: f64, target_h: f64, opts: &MeshOptions) -> Result<()> {
    // equilateral triangles of side h: about 2·area / (√3/2 · h²) / 2 vertices
    let estimated = (1.2 * area / (0.866 * target_h * target_h)) as usize + SECTORS;
    if estimated > opts.max_vertices {
        return Err(Error::Capacity { estimated, budget: opts.max_vertices });
    }
    Ok(())
}

/// Disk of the given radius centred at the origin.
pub fn generate_disk_mesh(radius: f64, target_h: f64) -> Result<Mesh> {
    generate_disk_mesh_with(radius, target_h, &MeshOptions::default())
}

pub fn generate_disk_mesh_with(radius: f64, target_h: f64, opts: &MeshOptions) -> Result<Mesh> {
    if !(radius > 0.0) || !(target_h > 0.0) || !(target_h < radius) {
        return Err(Error::InvalidInput(alloc::format!(
            "disk needs radius > 0 and 0 < target_h < radius (got {radius}, {target_h})"
        )));
    }
    let center = [0.0, 0.0];
    let domain = DomainShape::Disk { center, radius };
    check_budget(domain.area(), target_h, opts)?;

    let n_rings = libm::ceil(radius / (RADIAL_FACTOR * target_h)) as usize;
    let mut vertices = Vec::new();
    let mut rings = Vec::new();
    // outer boundary first so that vertex 0 sits at angle 0
    for i in 0..n_rings {
        let r = if i == 0 { radius } else { radius * (n_rings - i) as f64 / n_rings as f64 };
        rings.push(push_ring(&mut vertices, center, r, ring_count(r, target_h), i % 2));
    }
    let c = vertices.len();
    vertices.push(center);

    let mut triangles = Vec::new();
    for w in rings.windows(2) {
        zip(&w[1], &w[0], &mut triangles);
    }
    let innermost = rings.last().unwrap();
    for j in 0..innermost.count {
        let a = innermost.first + j;
        let b = innermost.first + (j + 1) % innermost.count;
        triangles.push([c, a, b]);
    }
    orient(&vertices, &mut triangles);
    debug_assert!(innermost.radius > 0.0);
    Mesh::new(vertices, triangles, Some(domain))
}

/// Annulus `r_inner ≤ |x| ≤ r_outer` centred at the origin.
pub fn generate_annulus_mesh(r_inner: f64, r_outer: f64, target_h: f64) -> Result<Mesh> {
    generate_annulus_mesh_with(r_inner, r_outer, target_h, &MeshOptions::default())
}

pub fn generate_annulus_mesh_with(r_inner: f64, r_outer: f64, target_h: f64, opts: &MeshOptions) -> Result<Mesh> {
    if !(r_inner > 0.0) || !(r_inner < r_outer) || !(target_h > 0.0) || !(target_h < r_outer) {
        return Err(Error::InvalidInput(alloc::format!(
            "annulus needs 0 < r_inner < r_outer and target_h > 0 (got {r_inner}, {r_outer}, {target_h})"
        )));
    }
    let center = [0.0, 0.0];
    let domain = DomainShape::Annulus { center, inner: r_inner, outer: r_outer };
    check_budget(domain.area(), target_h, opts)?;

    let n_gaps = (libm::ceil((r_outer - r_inner) / (RADIAL_FACTOR * target_h)) as usize).max(1);
    let mut vertices = Vec::new();
    let mut rings = Vec::new();
    let radius_of = |i: usize| {
        if i == 0 {
            r_outer
        } else if i == n_gaps {
            r_inner
        } else {
            r_outer - (r_outer - r_inner) * i as f64 / n_gaps as f64
        }
    };
    // boundary rings first: outer (index 0), inner (index n_gaps)
    let outer = push_ring(&mut vertices, center, r_outer, ring_count(r_outer, target_h), 0);
    let inner = push_ring(&mut vertices, center, r_inner, ring_count(r_inner, target_h), n_gaps % 2);
    rings.push(outer);
    for i in 1..n_gaps {
        let r = radius_of(i);
        rings.push(push_ring(&mut vertices, center, r, ring_count(r, target_h), i % 2));
    }
    rings.push(inner);

    let mut triangles = Vec::new();
    for w in rings.windows(2) {
        zip(&w[1], &w[0], &mut triangles);
    }
    orient(&vertices, &mut triangles);
    Mesh::new(vertices, triangles, Some(domain))
}
