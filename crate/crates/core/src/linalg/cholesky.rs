//! Envelope (skyline) Cholesky factorization with reverse Cuthill–McKee
//! ordering.
//!
//! P1 stiffness matrices of ring meshes have a small profile after RCM, so a
//! row-envelope `LLᵀ` is both simple and fast enough for the desk-scale
//! problems here. The factor is immutable once built and can be shared by
//! any number of solves.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::CsrMatrix;
use crate::{Error, Result};

/// `P A Pᵀ = L Lᵀ` with `L` stored row-wise inside its envelope.
#[derive(Clone, Debug)]
pub struct EnvelopeCholesky {
    n: usize,
    /// `perm[new] = old`
    perm: Vec<usize>,
    /// `inv[old] = new`
    inv: Vec<usize>,
    /// first stored column of each row
    first: Vec<usize>,
    /// offset of row `i`'s first stored entry in `data`
    offset: Vec<usize>,
    data: Vec<f64>,
}

impl EnvelopeCholesky {
    /// Factorizes a symmetric positive-definite matrix. Only the pattern of
    /// the lower triangle (after permutation) is read.
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::InvalidInput("cholesky needs a square matrix".into()));
        }
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }

        let mut first: Vec<usize> = (0..n).collect();
        for old in 0..n {
            let i = inv[old];
            for (c, _) in a.row(old) {
                let j = inv[c];
                if j < first[i] {
                    first[i] = j;
                }
            }
        }
        let mut offset = vec![0usize; n + 1];
        for i in 0..n {
            offset[i + 1] = offset[i] + (i - first[i] + 1);
        }
        let mut data = vec![0.0; offset[n]];
        for old in 0..n {
            let i = inv[old];
            for (c, v) in a.row(old) {
                let j = inv[c];
                if j <= i {
                    data[offset[i] + (j - first[i])] = v;
                }
            }
        }

        for i in 0..n {
            let fi = first[i];
            let row_i = offset[i];
            for j in fi..i {
                let fj = first[j];
                let row_j = offset[j];
                let k0 = fi.max(fj);
                let mut s = data[row_i + (j - fi)];
                let li = &data[row_i + (k0 - fi)..row_i + (j - fi)];
                let lj = &data[row_j + (k0 - fj)..row_j + (j - fj)];
                s -= dot(li, lj);
                data[row_i + (j - fi)] = s / data[row_j + (j - fj)];
            }
            let li = &data[row_i..row_i + (i - fi)];
            let d = data[row_i + (i - fi)] - dot(li, li);
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::Factorization { index: perm[i], pivot: d });
            }
            data[row_i + (i - fi)] = libm::sqrt(d);
        }

        Ok(EnvelopeCholesky { n, perm, inv, first, offset, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored factor entries.
    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        // L y = P b; skip leading zeros of sparse right-hand sides
        let start = y.iter().position(|v| *v != 0.0).unwrap_or(self.n);
        for i in start..self.n {
            let fi = self.first[i].max(start);
            let row = self.offset[i];
            let f0 = self.first[i];
            let s = dot(&self.data[row + (fi - f0)..row + (i - f0)], &y[fi..i]);
            y[i] = (y[i] - s) / self.data[row + (i - f0)];
        }
        // Lᵀ x = y
        for i in (0..self.n).rev() {
            let f0 = self.first[i];
            let row = self.offset[i];
            let xi = y[i] / self.data[row + (i - f0)];
            y[i] = xi;
            if xi != 0.0 {
                for (k, l) in self.data[row..row + (i - f0)].iter().enumerate() {
                    y[f0 + k] -= l * xi;
                }
            }
        }
        for (old, out) in b.iter_mut().enumerate() {
            *out = y[self.inv[old]];
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        s += x * y;
    }
    s
}

/// Reverse Cuthill–McKee ordering of the symmetric pattern of `a`; returns
/// `perm[new] = old`. Ties are broken by vertex index so the ordering is
/// deterministic. Each connected component starts from a pseudo-peripheral
/// vertex.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.nrows();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| a.row(i).map(|(j, _)| j).filter(|&j| j != i).collect())
        .collect();
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        let root = pseudo_peripheral(&adj, &degree, seed);
        let mut queue = VecDeque::new();
        visited[root] = true;
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

fn pseudo_peripheral(adj: &[Vec<usize>], degree: &[usize], start: usize) -> usize {
    let mut root = start;
    let (mut ecc, mut last) = bfs_levels(adj, degree, root);
    loop {
        let (e2, l2) = bfs_levels(adj, degree, last);
        if e2 <= ecc {
            return root;
        }
        root = last;
        ecc = e2;
        last = l2;
    }
}

/// Returns the eccentricity of `root` and a minimum-degree vertex in the last
/// BFS level.
fn bfs_levels(adj: &[Vec<usize>], degree: &[usize], root: usize) -> (usize, usize) {
    let mut level = vec![usize::MAX; adj.len()];
    level[root] = 0;
    let mut queue = VecDeque::from([root]);
    let mut depth = 0;
    let mut frontier = vec![root];
    while let Some(v) = queue.pop_front() {
        let lv = level[v];
        for &w in &adj[v] {
            if level[w] == usize::MAX {
                level[w] = lv + 1;
                if lv + 1 > depth {
                    depth = lv + 1;
                    frontier.clear();
                }
                if lv + 1 == depth {
                    frontier.push(w);
                }
                queue.push_back(w);
            }
        }
    }
    let best = frontier.iter().copied().min_by_key(|&w| (degree[w], w)).unwrap_or(root);
    (depth, best)
}
