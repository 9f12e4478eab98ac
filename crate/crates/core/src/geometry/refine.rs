use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::Mesh;
use crate::Result;

/// Uniform red refinement: every triangle is split into four through its
/// edge midpoints. Midpoints of boundary edges are projected onto the
/// analytic boundary when the mesh carries a domain descriptor.
///
/// Old vertices keep their indices; midpoints are appended in order of first
/// appearance, so boundary loops still start at the same vertex.
pub fn refine(mesh: &Mesh) -> Result<Mesh> {
    let mut vertices = mesh.vertices().to_vec();
    let boundary: BTreeMap<(usize, usize), ()> = mesh
        .boundary_loops()
        .iter()
        .flat_map(|lp| {
            let n = lp.len();
            (0..n).map(move |i| {
                let (a, b) = (lp[i], lp[(i + 1) % n]);
                ((a.min(b), a.max(b)), ())
            })
        })
        .collect();
    let domain = mesh.domain();
    let mut midpoint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut mid = |a: usize, b: usize, vertices: &mut Vec<[f64; 2]>| -> usize {
        let key = (a.min(b), a.max(b));
        *midpoint.entry(key).or_insert_with(|| {
            let (pa, pb) = (vertices[a], vertices[b]);
            let mut m = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
            if let (Some(d), true) = (domain, boundary.contains_key(&key)) {
                m = d.project_to_boundary(m);
            }
            vertices.push(m);
            vertices.len() - 1
        })
    };
    let mut triangles = Vec::with_capacity(4 * mesh.triangles().len());
    for &[a, b, c] in mesh.triangles() {
        let ab = mid(a, b, &mut vertices);
        let bc = mid(b, c, &mut vertices);
        let ca = mid(c, a, &mut vertices);
        triangles.push([a, ab, ca]);
        triangles.push([ab, b, bc]);
        triangles.push([ca, bc, c]);
        triangles.push([ab, bc, ca]);
    }
    Mesh::new(vertices, triangles, domain)
}
