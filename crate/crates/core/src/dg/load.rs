use nalgebra::Vector2;
use num_complex::Complex64;
use rayon::prelude::*;

use super::quadrature::{gauss_legendre, triangle_rule};
use super::space::{DgSpace, DgVector, DOFS_PER_ELEMENT};
use crate::error::{Error, Result};
use crate::mesh::Point;

/// Default polynomial degree of the triangle rule used for source terms.
pub const DEFAULT_LOAD_DEGREE: usize = 4;

/// `∫_D f · φ_i` for every basis function.
pub fn assemble_load_function<F>(space: &DgSpace, f: F, quad_degree: usize) -> Result<DgVector>
where
    F: Fn(&Point) -> [Complex64; 2] + Sync,
{
    assemble_load_per_element(space, |_, x| f(x), quad_degree)
}

/// Like [`assemble_load_function`] for an integrand that also depends on the
/// element, such as a source built from a piecewise-constant coefficient.
pub fn assemble_load_per_element<F>(space: &DgSpace, f: F, quad_degree: usize) -> Result<DgVector>
where
    F: Fn(usize, &Point) -> [Complex64; 2] + Sync,
{
    let rule = triangle_rule(quad_degree)?;
    let mesh = space.mesh();
    let mut out = space.zeros();
    out.par_chunks_mut(DOFS_PER_ELEMENT).enumerate().for_each(|(k, local)| {
        let area = space.geometry(k).area;
        let p = mesh.element_vertices(k);
        for (b, w) in rule.points.iter().zip(&rule.weights) {
            let x = p[0] * b[0] + p[1] * b[1] + p[2] * b[2];
            let fx = f(k, &x);
            for a in 0..3 {
                let s = area * w * b[a];
                local[2 * a] += fx[0] * s;
                local[2 * a + 1] += fx[1] * s;
            }
        }
    });
    Ok(out)
}

/// `∫_{∂D} g · φ_i`, with `g` evaluated at a point and the outward unit normal.
pub fn assemble_boundary_load<G>(space: &DgSpace, g: G, gauss_points: usize) -> Result<DgVector>
where
    G: Fn(&Point, &Vector2<f64>) -> [Complex64; 2],
{
    if gauss_points == 0 {
        return Err(Error::InvalidParameter("edge rule needs at least one point".into()));
    }
    let (nodes, weights) = gauss_legendre(gauss_points);
    let mesh = space.mesh();
    let mut out = space.zeros();
    for e in mesh.boundary_edges() {
        let (pa, pb) = (mesh.vertices()[e.vertices[0]], mesh.vertices()[e.vertices[1]]);
        let geo = space.geometry(e.owner);
        for (t, w) in nodes.iter().zip(&weights) {
            let x = pa + (pb - pa) * *t;
            let gx = g(&x, &e.normal);
            let bary = geo.barycentric(&x);
            for a in 0..3 {
                let s = w * e.length * bary[a];
                for c in 0..2 {
                    out[space.dof(e.owner, a, c)] += gx[c] * s;
                }
            }
        }
    }
    Ok(out)
}

/// `(c·v, φ_i)` for a piecewise-constant weight `c`: the weighted mass
/// matrix applied to `v`. Exact for piecewise-linear `v`.
pub fn apply_weighted_mass(space: &DgSpace, weight: &[f64], v: &[Complex64]) -> Result<DgVector> {
    space.check_per_element(weight.len(), "element weights")?;
    space.check_len(v.len(), "field")?;
    let mut out = space.zeros();
    out.par_chunks_mut(DOFS_PER_ELEMENT).enumerate().for_each(|(k, local)| {
        let s = weight[k] * space.geometry(k).area / 12.0;
        let src = &v[DOFS_PER_ELEMENT * k..DOFS_PER_ELEMENT * (k + 1)];
        for c in 0..2 {
            let sum = src[c] + src[2 + c] + src[4 + c];
            for a in 0..3 {
                local[2 * a + c] = (sum + src[2 * a + c]) * s;
            }
        }
    });
    Ok(out)
}

/// Source of the mode recursion, `(2k²η u_prev + k²η² u_prev2, φ_i)`.
pub fn assemble_load_mode(
    space: &DgSpace,
    eta: &[f64],
    u_prev: &[Complex64],
    u_prev2: &[Complex64],
    k: f64,
) -> Result<DgVector> {
    space.check_per_element(eta.len(), "eta per element")?;
    space.check_len(u_prev.len(), "previous mode")?;
    space.check_len(u_prev2.len(), "second previous mode")?;
    let k2 = k * k;
    let mut out = space.zeros();
    out.par_chunks_mut(DOFS_PER_ELEMENT).enumerate().for_each(|(e, local)| {
        let s = space.geometry(e).area / 12.0;
        let c1 = 2.0 * k2 * eta[e] * s;
        let c2 = k2 * eta[e] * eta[e] * s;
        let r = DOFS_PER_ELEMENT * e..DOFS_PER_ELEMENT * (e + 1);
        let (p1, p2) = (&u_prev[r.clone()], &u_prev2[r]);
        for c in 0..2 {
            let sum1 = p1[c] + p1[2 + c] + p1[4 + c];
            let sum2 = p2[c] + p2[2 + c] + p2[4 + c];
            for a in 0..3 {
                let l = 2 * a + c;
                local[l] = (sum1 + p1[l]) * c1 + (sum2 + p2[l]) * c2;
            }
        }
    });
    Ok(out)
}
