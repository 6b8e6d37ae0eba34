//! Global matrix of the interior-penalty form.
//!
//! Entry `(i, j)` is `a(φ_j, φ_i)`. All element and edge integrands are
//! polynomials of degree at most two, so the closed-form element integrals
//! and two-point Gauss rule on edges are exact.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rayon::prelude::*;

use super::params::PhysicalParams;
use super::space::{DgSpace, DOFS_PER_ELEMENT};
use crate::error::{Error, Result};
use crate::linalg::ComplexSparseMatrix;
use crate::mesh::{Edge, Point};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Coefficient used in the absorbing boundary term when a per-element `α`
/// is supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryAlpha {
    /// `ik⟨Aφ, ψ⟩`: the boundary sees the background medium.
    #[default]
    Unit,
    /// `ik⟨αAφ, ψ⟩` with `α` of the element adjacent to the boundary edge.
    Element,
}

/// Two-point Gauss rule on an edge: points and weights (weights sum to the length).
pub(crate) fn edge_gauss(space: &DgSpace, edge: &Edge) -> [(Point, f64); 2] {
    let v = space.mesh().vertices();
    let (pa, pb) = (v[edge.vertices[0]], v[edge.vertices[1]]);
    let s = 0.5 / 3f64.sqrt();
    let w = 0.5 * edge.length;
    [(pa + (pb - pa) * (0.5 - s), w), (pa + (pb - pa) * (0.5 + s), w)]
}

/// Stress of each of the six local basis functions.
pub(crate) fn basis_stresses(params: &PhysicalParams, grads: &[Vector2<f64>; 3]) -> [Matrix2<f64>; 6] {
    std::array::from_fn(|l| {
        let (a, c) = (l / 2, l % 2);
        let mut g = Matrix2::zeros();
        g.set_row(c, &grads[a].transpose());
        params.stress(&g)
    })
}

/// Values of the six local basis functions at `x` on element `k`.
fn basis_values(space: &DgSpace, k: usize, x: &Point) -> [Vector2<f64>; 6] {
    let bary = space.geometry(k).barycentric(x);
    std::array::from_fn(|l| {
        let mut v = Vector2::zeros();
        v[l % 2] = bary[l / 2];
        v
    })
}

type Block6 = [[Complex64; 6]; 6];
type Block12 = [[Complex64; 12]; 12];

fn element_block(space: &DgSpace, params: &PhysicalParams, k: usize, alpha_sq: f64) -> Block6 {
    let geo = space.geometry(k);
    let grads = space.gradients(k);
    let mut strain = [Matrix2::<f64>::zeros(); 6];
    let mut div = [0.0; 6];
    for l in 0..6 {
        let (a, c) = (l / 2, l % 2);
        let mut g = Matrix2::zeros();
        g.set_row(c, &grads[a].transpose());
        strain[l] = (g + g.transpose()) * 0.5;
        div[l] = grads[a][c];
    }
    let mass_scale = params.k * params.k * alpha_sq * geo.area / 12.0;
    let mut block = [[Complex64::default(); 6]; 6];
    for i in 0..6 {
        for j in 0..6 {
            let stiff = geo.area
                * (params.lambda * div[i] * div[j] + 2.0 * params.mu * strain[i].component_mul(&strain[j]).sum());
            let mass = if i % 2 == j % 2 { mass_scale * if i / 2 == j / 2 { 2.0 } else { 1.0 } } else { 0.0 };
            block[i][j] = Complex64::new(stiff - mass, 0.0);
        }
    }
    block
}

fn interior_edge_block(space: &DgSpace, params: &PhysicalParams, edge: &Edge, neighbor: usize) -> Block12 {
    let sides = [edge.owner, neighbor];
    let sign = [1.0, -1.0];
    let n = edge.normal;
    let he = edge.length;
    let traction: [[Vector2<f64>; 6]; 2] = std::array::from_fn(|s| {
        let stresses = basis_stresses(params, space.gradients(sides[s]));
        std::array::from_fn(|l| stresses[l] * n)
    });

    let mut block = [[Complex64::default(); 12]; 12];
    for (x, w) in edge_gauss(space, edge) {
        let values: [[Vector2<f64>; 6]; 2] = [basis_values(space, sides[0], &x), basis_values(space, sides[1], &x)];
        for si in 0..2 {
            for sj in 0..2 {
                let ss = sign[si] * sign[sj];
                for li in 0..6 {
                    let (vi, ti) = (values[si][li], traction[si][li]);
                    for lj in 0..6 {
                        let (vj, tj) = (values[sj][lj], traction[sj][lj]);
                        let consistency = -0.5 * sign[si] * tj.dot(&vi) - 0.5 * sign[sj] * vj.dot(&ti);
                        let penalty = params.gamma0 / he * ss * vj.dot(&vi);
                        block[6 * si + li][6 * sj + lj] += w * Complex64::new(consistency, penalty);
                    }
                }
            }
        }
    }
    for si in 0..2 {
        for sj in 0..2 {
            let ss = sign[si] * sign[sj];
            for li in 0..6 {
                for lj in 0..6 {
                    let t = traction[sj][lj].dot(&traction[si][li]);
                    block[6 * si + li][6 * sj + lj] += I * (params.gamma1 * he * he * ss * t);
                }
            }
        }
    }
    block
}

fn boundary_edge_block(space: &DgSpace, params: &PhysicalParams, edge: &Edge, alpha: f64) -> Block6 {
    let mut block = [[Complex64::default(); 6]; 6];
    let scale = I * (params.k * alpha);
    for (x, w) in edge_gauss(space, edge) {
        let values = basis_values(space, edge.owner, &x);
        for i in 0..6 {
            for j in 0..6 {
                block[i][j] += scale * (w * (params.a * values[j]).dot(&values[i]));
            }
        }
    }
    block
}

/// Assembles `a_h` (no `alpha`) or the per-sample form with `α` sampled per
/// element. The boundary term uses `α = 1`; see [`assemble_system_with`] to
/// use the element values there too.
pub fn assemble_system(space: &DgSpace, params: &PhysicalParams, alpha: Option<&[f64]>) -> Result<ComplexSparseMatrix> {
    assemble_system_with(space, params, alpha, BoundaryAlpha::default())
}

pub fn assemble_system_with(
    space: &DgSpace,
    params: &PhysicalParams,
    alpha: Option<&[f64]>,
    boundary: BoundaryAlpha,
) -> Result<ComplexSparseMatrix> {
    params.check_assembly()?;
    if let Some(alpha) = alpha {
        space.check_per_element(alpha.len(), "alpha per element")?;
        if let Some((k, a)) = alpha.iter().enumerate().find(|(_, a)| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::InvalidParameter(format!("alpha on element {k} must be positive, got {a}")));
        }
    }
    let alpha_at = |k: usize| alpha.map_or(1.0, |a| a[k]);
    let nel = space.num_elements();
    let edges = space.mesh().edges();

    let element_blocks: Vec<Block6> = (0..nel)
        .into_par_iter()
        .map(|k| {
            let a = alpha_at(k);
            element_block(space, params, k, a * a)
        })
        .collect();
    enum EdgeBlock {
        Interior(Block12),
        Boundary(Block6),
    }
    let edge_blocks: Vec<EdgeBlock> = edges
        .par_iter()
        .map(|e| match e.neighbor {
            Some(nb) => EdgeBlock::Interior(interior_edge_block(space, params, e, nb)),
            None => {
                let a = match boundary {
                    BoundaryAlpha::Unit => 1.0,
                    BoundaryAlpha::Element => alpha_at(e.owner),
                };
                EdgeBlock::Boundary(boundary_edge_block(space, params, e, a))
            }
        })
        .collect();

    let base = |k: usize| DOFS_PER_ELEMENT * k;
    let mut triplets = Vec::with_capacity(36 * nel + 144 * edges.len());
    for (k, block) in element_blocks.iter().enumerate() {
        for i in 0..6 {
            for j in 0..6 {
                triplets.push((base(k) + i, base(k) + j, block[i][j]));
            }
        }
    }
    for (e, block) in edges.iter().zip(&edge_blocks) {
        match block {
            EdgeBlock::Interior(b) => {
                let nb = e.neighbor.expect("interior edge has a neighbor");
                let dof = |l: usize| if l < 6 { base(e.owner) + l } else { base(nb) + l - 6 };
                for i in 0..12 {
                    for j in 0..12 {
                        triplets.push((dof(i), dof(j), b[i][j]));
                    }
                }
            }
            EdgeBlock::Boundary(b) => {
                for i in 0..6 {
                    for j in 0..6 {
                        triplets.push((base(e.owner) + i, base(e.owner) + j, b[i][j]));
                    }
                }
            }
        }
    }
    ComplexSparseMatrix::from_triplets(space.num_dofs(), triplets)
}
