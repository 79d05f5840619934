//! Uniform-grid finite-difference discretization: Dirichlet Laplacians by
//! node omission, diagonal distance weights, layer energies and ε-shrunken
//! subgrids.

use crate::error::{Error, Result};
use crate::geometry::{self, Domain};
use crate::linalg::SparseOperator;
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::Arc;

/// Uniform mesh of interior lattice points `k·h`, row-major ordered.
#[derive(Clone)]
pub struct Grid {
    domain: Arc<Domain>,
    h: f64,
    nodes: Vec<[i64; 2]>,
    index: HashMap<[i64; 2], usize>,
    /// Euclidean distance to the nearest omitted lattice point. Agrees with
    /// the boundary distance whenever the boundary is lattice-aligned, and is
    /// the distance notion consistent with the node-omission Dirichlet wall.
    lattice_dist: Vec<f64>,
    /// True distance to the domain boundary.
    boundary_dist: Vec<f64>,
}

/// Weight function for diagonal operators w(node)^(−s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightFn {
    /// Distance to the Dirichlet wall (lattice distance transform).
    Distance,
    /// Harmonic mean distance from angular quadrature.
    MeanDistance { n_dirs: usize },
}

impl Grid {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn domain_arc(&self) -> Arc<Domain> {
        self.domain.clone()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// h^N, the cell volume of the discrete L² inner product.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim() as i32)
    }

    pub fn node_position(&self, k: usize) -> [f64; 2] {
        let [i, j] = self.nodes[k];
        [i as f64 * self.h, j as f64 * self.h]
    }

    pub fn positions(&self) -> Vec<[f64; 2]> {
        (0..self.len()).map(|k| self.node_position(k)).collect()
    }

    pub fn node_index(&self, node: [i64; 2]) -> Option<usize> {
        self.index.get(&node).copied()
    }

    pub fn lattice_distance(&self, k: usize) -> f64 {
        self.lattice_dist[k]
    }

    pub fn boundary_distance(&self, k: usize) -> f64 {
        self.boundary_dist[k]
    }

    /// ‖f‖ in the discrete L² norm (Σ f² hᴺ)^½.
    pub fn norm_l2(&self, f: &[f64]) -> f64 {
        (self.cell_volume() * f.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    pub fn inner_l2(&self, f: &[f64], g: &[f64]) -> f64 {
        self.cell_volume() * f.iter().zip(g).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Samples a function of position onto the grid nodes.
    pub fn sample(&self, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        (0..self.len()).map(|k| f(self.node_position(k))).collect()
    }
}

/// Builds the grid of interior lattice points of spacing `h`.
pub fn build_grid(domain: &Domain, h: f64) -> Result<Grid> {
    build_grid_arc(Arc::new(domain.clone()), h)
}

pub fn build_grid_arc(domain: Arc<Domain>, h: f64) -> Result<Grid> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("grid spacing must be positive".into()));
    }
    let nodes = geometry::lattice_interior(&domain, h);
    if nodes.is_empty() {
        return Err(Error::Resolution(format!(
            "no interior lattice points for {} at h = {h}",
            domain.label()
        )));
    }
    finish_grid(domain, h, nodes)
}

fn finish_grid(domain: Arc<Domain>, h: f64, nodes: Vec<[i64; 2]>) -> Result<Grid> {
    let index: HashMap<[i64; 2], usize> =
        nodes.iter().enumerate().map(|(k, &n)| (n, k)).collect();
    let boundary_dist: Vec<f64> = nodes
        .par_iter()
        .map(|&[i, j]| domain.boundary_distance([i as f64 * h, j as f64 * h]))
        .collect();
    let lattice_dist = lattice_distance_transform(&nodes, h, domain.dim());
    Ok(Grid { domain, h, nodes, index, lattice_dist, boundary_dist })
}

/// Exact Euclidean distance (in length units) from each node to the nearest
/// lattice point not in the node set.
fn lattice_distance_transform(nodes: &[[i64; 2]], h: f64, dim: usize) -> Vec<f64> {
    if dim == 1 {
        // sweep along the line
        let min_i = nodes.iter().map(|n| n[0]).min().unwrap();
        let max_i = nodes.iter().map(|n| n[0]).max().unwrap();
        let width = (max_i - min_i + 3) as usize;
        let mut present = vec![false; width];
        for n in nodes {
            present[(n[0] - min_i + 1) as usize] = true;
        }
        let mut left = vec![usize::MAX; width];
        let mut dist = 0usize;
        let mut seen = false;
        for k in 0..width {
            if !present[k] {
                dist = 0;
                seen = true;
            } else if seen {
                dist += 1;
            }
            left[k] = if seen { dist } else { usize::MAX };
        }
        let mut right = vec![usize::MAX; width];
        dist = 0;
        seen = false;
        for k in (0..width).rev() {
            if !present[k] {
                dist = 0;
                seen = true;
            } else if seen {
                dist += 1;
            }
            right[k] = if seen { dist } else { usize::MAX };
        }
        nodes
            .iter()
            .map(|n| {
                let k = (n[0] - min_i + 1) as usize;
                (left[k].min(right[k]) as f64) * h
            })
            .collect()
    } else {
        let min_i = nodes.iter().map(|n| n[0]).min().unwrap() - 2;
        let max_i = nodes.iter().map(|n| n[0]).max().unwrap() + 2;
        let min_j = nodes.iter().map(|n| n[1]).min().unwrap() - 2;
        let max_j = nodes.iter().map(|n| n[1]).max().unwrap() + 2;
        let nx = (max_i - min_i + 1) as usize;
        let ny = (max_j - min_j + 1) as usize;
        let mut f = vec![0.0f64; nx * ny]; // squared distance seed: 0 on omitted
        const FAR: f64 = 1e30;
        for n in nodes {
            let ix = (n[0] - min_i) as usize;
            let iy = (n[1] - min_j) as usize;
            f[iy * nx + ix] = FAR;
        }
        // pass 1: rows
        let mut tmp = vec![0.0f64; nx * ny];
        tmp.par_chunks_mut(nx).zip(f.par_chunks(nx)).for_each(|(drow, frow)| {
            dt_1d(frow, drow);
        });
        // pass 2: columns
        let cols: Vec<Vec<f64>> = (0..nx)
            .into_par_iter()
            .map(|x| {
                let col: Vec<f64> = (0..ny).map(|y| tmp[y * nx + x]).collect();
                let mut out = vec![0.0f64; ny];
                dt_1d(&col, &mut out);
                out
            })
            .collect();
        nodes
            .iter()
            .map(|n| {
                let ix = (n[0] - min_i) as usize;
                let iy = (n[1] - min_j) as usize;
                cols[ix][iy].sqrt() * h
            })
            .collect()
    }
}

/// 1D squared-distance transform (lower envelope of parabolas).
fn dt_1d(f: &[f64], d: &mut [f64]) {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / ((2 * q - 2 * p) as f64);
            if s <= z[k] && k > 0 {
                k -= 1;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = f64::INFINITY;
                break;
            }
        }
    }
    k = 0;
    for q in 0..n {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let dq = q as f64 - v[k] as f64;
        d[q] = dq * dq + f[v[k]];
    }
}

/// 5-point (3-point in 1D) Dirichlet Laplacian; omitted neighbours contribute
/// zero boundary values.
pub fn laplacian(grid: &Grid) -> SparseOperator {
    let n = grid.len();
    let dim = grid.dim();
    let h2 = grid.h * grid.h;
    let offsets: &[[i64; 2]] = if dim == 1 {
        &[[-1, 0], [1, 0]]
    } else {
        &[[-1, 0], [1, 0], [0, -1], [0, 1]]
    };
    let mut trip = Vec::with_capacity(n * (2 * dim + 1));
    for (k, &[i, j]) in grid.nodes.iter().enumerate() {
        trip.push((k, k, 2.0 * dim as f64 / h2));
        for off in offsets {
            if let Some(nb) = grid.node_index([i + off[0], j + off[1]]) {
                trip.push((k, nb, -1.0 / h2));
            }
        }
    }
    SparseOperator::from_triplets(n, &trip).expect("valid stencil triplets")
}

/// Diagonal operator with entries w(node)^(−s).
pub fn weight_operator(grid: &Grid, s: f64, weight: WeightFn) -> Result<SparseOperator> {
    let w: Vec<f64> = match weight {
        WeightFn::Distance => grid.lattice_dist.clone(),
        WeightFn::MeanDistance { n_dirs } => (0..grid.len())
            .into_par_iter()
            .map(|k| {
                geometry::mean_distance(grid.domain(), grid.node_position(k), n_dirs).map(|r| r.m)
            })
            .collect::<Result<Vec<f64>>>()?,
    };
    if let Some(&bad) = w.iter().find(|&&v| !(v > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "node weight distance {bad} is not positive"
        )));
    }
    let diag: Vec<f64> = w.iter().map(|v| v.powf(-s)).collect();
    Ok(SparseOperator::diagonal(&diag))
}

/// Sum of forward-difference |∇f|² contributions over lattice edges whose
/// midpoint lies in the layer {d < eps}, scaled by hᴺ. Edges to omitted
/// neighbours take the boundary value 0.
pub fn gradient_energy_layer(grid: &Grid, f: &[f64], eps: f64) -> Result<f64> {
    if f.len() != grid.len() {
        return Err(Error::InvalidArgument(format!(
            "vector length {} does not match grid size {}",
            f.len(),
            grid.len()
        )));
    }
    let dim = grid.dim();
    let h = grid.h;
    let scale = grid.cell_volume() / (h * h);
    let plus: &[[i64; 2]] = if dim == 1 { &[[1, 0]] } else { &[[1, 0], [0, 1]] };
    let all: &[[i64; 2]] = if dim == 1 {
        &[[-1, 0], [1, 0]]
    } else {
        &[[-1, 0], [1, 0], [0, -1], [0, 1]]
    };
    let contributions: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let [i, j] = grid.nodes[k];
            let p = grid.node_position(k);
            let mut acc = 0.0;
            // interior edges once, from the lower endpoint
            for off in plus {
                if let Some(nb) = grid.node_index([i + off[0], j + off[1]]) {
                    let mid = [
                        p[0] + 0.5 * h * off[0] as f64,
                        p[1] + 0.5 * h * off[1] as f64,
                    ];
                    if midpoint_in_layer(grid.domain(), mid, eps) {
                        let diff = f[nb] - f[k];
                        acc += diff * diff;
                    }
                }
            }
            // boundary edges from the present endpoint, all directions
            for off in all {
                if grid.node_index([i + off[0], j + off[1]]).is_none() {
                    let mid = [
                        p[0] + 0.5 * h * off[0] as f64,
                        p[1] + 0.5 * h * off[1] as f64,
                    ];
                    if midpoint_in_layer(grid.domain(), mid, eps) {
                        acc += f[k] * f[k];
                    }
                }
            }
            acc
        })
        .collect();
    Ok(contributions.into_iter().sum::<f64>() * scale)
}

fn midpoint_in_layer(domain: &Domain, mid: [f64; 2], eps: f64) -> bool {
    if !domain.is_interior(mid) {
        return true; // midpoints at or beyond the wall belong to the layer
    }
    domain.boundary_distance(mid) < eps
}

/// Subgrid of nodes with boundary distance strictly above eps; realizes the
/// maximal admissible shrunken domain on the same lattice.
pub fn restrict(grid: &Grid, eps: f64) -> Result<Grid> {
    if eps < 0.0 {
        return Err(Error::InvalidArgument("eps must be nonnegative".into()));
    }
    let keep: Vec<usize> = (0..grid.len())
        .filter(|&k| grid.boundary_dist[k] > eps)
        .collect();
    if keep.is_empty() {
        return Err(Error::Resolution(format!(
            "restriction to d > {eps} leaves no nodes"
        )));
    }
    let nodes: Vec<[i64; 2]> = keep.iter().map(|&k| grid.nodes[k]).collect();
    let index: HashMap<[i64; 2], usize> =
        nodes.iter().enumerate().map(|(k, &n)| (n, k)).collect();
    let boundary_dist: Vec<f64> = keep.iter().map(|&k| grid.boundary_dist[k]).collect();
    let lattice_dist = lattice_distance_transform(&nodes, grid.h, grid.dim());
    Ok(Grid {
        domain: grid.domain.clone(),
        h: grid.h,
        nodes,
        index,
        lattice_dist,
        boundary_dist,
    })
}

/// Indices (in the parent grid) of the nodes kept by `restrict`.
pub fn restriction_indices(grid: &Grid, eps: f64) -> Vec<usize> {
    (0..grid.len())
        .filter(|&k| grid.boundary_dist[k] > eps)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{l_shape, unit_interval, unit_square};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn interval_grid_nodes() {
        let g = build_grid(&unit_interval(), 0.25).unwrap();
        assert_eq!(g.len(), 3);
        let xs: Vec<f64> = (0..3).map(|k| g.node_position(k)[0]).collect();
        assert_eq!(xs, vec![0.25, 0.5, 0.75]);
    }

    #[test]
    fn square_grid_nodes() {
        let g = build_grid(&unit_square(), 0.5).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.node_position(0), [0.5, 0.5]);
        let g = build_grid(&unit_square(), 1.0 / 3.0).unwrap();
        assert_eq!(g.len(), 4);
    }

    #[test]
    fn empty_grid_is_resolution_error() {
        assert!(matches!(
            build_grid(&unit_interval(), 2.0),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn single_node_laplacian() {
        let g = build_grid(&unit_square(), 0.5).unwrap();
        let a = laplacian(&g);
        assert_eq!(a.dim(), 1);
        assert_relative_eq!(a.get(0, 0).unwrap(), 16.0);
    }

    #[test]
    fn laplacian_is_symmetric_on_irregular_domain() {
        let g = build_grid(&l_shape(), 0.11).unwrap();
        assert!(laplacian(&g).is_symmetric());
    }

    #[test]
    fn lattice_distance_equals_boundary_distance_when_aligned() {
        let g = build_grid(&unit_square(), 1.0 / 8.0).unwrap();
        for k in 0..g.len() {
            assert_relative_eq!(g.lattice_distance(k), g.boundary_distance(k), epsilon = 1e-12);
        }
        let g = build_grid(&unit_interval(), 1.0 / 16.0).unwrap();
        for k in 0..g.len() {
            assert_relative_eq!(g.lattice_distance(k), g.boundary_distance(k), epsilon = 1e-12);
        }
    }

    #[test]
    fn lattice_distance_dominates_boundary_distance() {
        // omitted lattice points lie outside the open domain, so the lattice
        // distance can only overestimate d
        let g = build_grid(&crate::geometry::sector(4.0, 1.0 / 64.0).unwrap(), 1.0 / 24.0).unwrap();
        for k in 0..g.len() {
            assert!(g.lattice_distance(k) >= g.boundary_distance(k) - 1e-12);
        }
    }

    #[test]
    fn weight_examples() {
        let g = build_grid(&unit_interval(), 0.25).unwrap();
        let w = weight_operator(&g, 2.0, WeightFn::Distance).unwrap();
        // node at x = 0.25 has d = 0.25 → entry 16
        assert_relative_eq!(w.get(0, 0).unwrap(), 16.0);
        let w0 = weight_operator(&g, 0.0, WeightFn::Distance).unwrap();
        for k in 0..g.len() {
            assert_relative_eq!(w0.get(k, k).unwrap(), 1.0);
        }
    }

    #[test]
    fn mean_weight_at_square_center() {
        let g = build_grid(&unit_square(), 0.5).unwrap();
        let w = weight_operator(&g, 2.0, WeightFn::MeanDistance { n_dirs: 360 }).unwrap();
        assert_relative_eq!(w.get(0, 0).unwrap(), 2.0 + 4.0 / std::f64::consts::PI, epsilon = 1e-3);
    }

    #[test]
    fn discrete_integration_by_parts() {
        // hᴺ·fᵀAf equals the assembled edge energy, for random f
        let g = build_grid(&l_shape(), 1.0 / 12.0).unwrap();
        let a = laplacian(&g);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let f: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let energy = gradient_energy_layer(&g, &f, f64::INFINITY).unwrap();
            let form = g.cell_volume() * a.quadratic_form(&f);
            assert_relative_eq!(energy, form, epsilon = 1e-10, max_relative = 1e-10);
        }
    }

    #[test]
    fn zero_vector_has_zero_energy() {
        let g = build_grid(&unit_square(), 0.25).unwrap();
        let f = vec![0.0; g.len()];
        assert_eq!(gradient_energy_layer(&g, &f, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn energy_dimension_mismatch() {
        let g = build_grid(&unit_square(), 0.25).unwrap();
        assert!(gradient_energy_layer(&g, &[1.0], 0.1).is_err());
    }

    #[test]
    fn restrict_examples() {
        let g = build_grid(&unit_square(), 1.0 / 3.0).unwrap();
        let r = restrict(&g, 0.0).unwrap();
        assert_eq!(r.len(), g.len());
        assert!(restrict(&g, 0.4).is_err());

        let g = build_grid(&unit_square(), 1.0 / 8.0).unwrap();
        let r = restrict(&g, 0.2).unwrap();
        for k in 0..r.len() {
            let p = r.node_position(k);
            assert!(p[0] >= 0.25 - 1e-12 && p[0] <= 0.75 + 1e-12);
            assert!(p[1] >= 0.25 - 1e-12 && p[1] <= 0.75 + 1e-12);
        }
    }

    #[test]
    fn restriction_nests_and_commutes_with_assembly() {
        let g = build_grid(&l_shape(), 1.0 / 16.0).unwrap();
        let r1 = restrict(&g, 0.05).unwrap();
        let r2 = restrict(&g, 0.10).unwrap();
        assert!(r2.len() <= r1.len());
        for n in &r2.nodes {
            assert!(r1.node_index(*n).is_some());
        }
        // principal submatrix property
        let a = laplacian(&g);
        let keep = restriction_indices(&g, 0.05);
        let sub = a.principal_submatrix(&keep);
        let direct = laplacian(&r1);
        for r in 0..direct.dim() {
            for c in 0..direct.dim() {
                assert_eq!(direct.get(r, c), sub.get(r, c));
            }
        }
    }

    #[test]
    fn interval_fd_eigenvalue_oracle() {
        // eigenvalues of the h=0.25 interval Laplacian: (4/h²)sin²(kπh/2)
        let g = build_grid(&unit_interval(), 0.25).unwrap();
        let a = laplacian(&g);
        // 3×3 matrix: check the characteristic values through the quadratic form
        // on the exact discrete eigenvectors sin(kπx)
        for k in 1..=3 {
            let f: Vec<f64> = (0..3)
                .map(|i| (k as f64 * std::f64::consts::PI * (i + 1) as f64 * 0.25).sin())
                .collect();
            let af = a.matvec(&f);
            let lam = 64.0 * (k as f64 * std::f64::consts::PI * 0.125).sin().powi(2);
            for i in 0..3 {
                assert_relative_eq!(af[i], lam * f[i], epsilon = 1e-10);
            }
        }
    }
}
