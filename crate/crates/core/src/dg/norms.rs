use nalgebra::Matrix2;
use num_complex::Complex64;

use super::assembly::edge_gauss;
use super::params::PhysicalParams;
use super::quadrature::triangle_rule;
use super::space::{DgSpace, DOFS_PER_ELEMENT};
use crate::error::Result;
use crate::mesh::Point;

/// Broken energy quantities of a field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyNorms {
    /// `|v|_{1,h}`: element terms `λ‖div v‖² + 2μ‖ε(v)‖²` only.
    pub seminorm: f64,
    /// `‖v‖_{1,h}`: seminorm plus the two penalty terms on interior edges.
    pub norm: f64,
    /// `|||v|||`: additionally `(h_e/γ0)‖{σ(v)n}‖²` on interior edges.
    pub triple: f64,
}

fn local_l2_sq(space: &DgSpace, v: &[Complex64], k: usize) -> f64 {
    let local = &v[DOFS_PER_ELEMENT * k..DOFS_PER_ELEMENT * (k + 1)];
    let mut acc = 0.0;
    for c in 0..2 {
        let sum = local[c] + local[2 + c] + local[4 + c];
        let sq: f64 = (0..3).map(|a| local[2 * a + c].norm_sqr()).sum();
        acc += sq + sum.norm_sqr();
    }
    acc * space.geometry(k).area / 12.0
}

pub fn l2_norm(space: &DgSpace, v: &[Complex64]) -> Result<f64> {
    space.check_len(v.len(), "field")?;
    Ok((0..space.num_elements()).map(|k| local_l2_sq(space, v, k)).sum::<f64>().sqrt())
}

fn frobenius_sq(m: &Matrix2<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

fn strain_energy_density(params: &PhysicalParams, grad: &Matrix2<Complex64>) -> f64 {
    let strain = (grad + grad.transpose()) * Complex64::new(0.5, 0.0);
    let div = grad[(0, 0)] + grad[(1, 1)];
    params.lambda * div.norm_sqr() + 2.0 * params.mu * frobenius_sq(&strain)
}

fn traction(stress: &Matrix2<Complex64>, n: &nalgebra::Vector2<f64>) -> [Complex64; 2] {
    [stress[(0, 0)] * n.x + stress[(0, 1)] * n.y, stress[(1, 0)] * n.x + stress[(1, 1)] * n.y]
}

/// Squared interior-edge contributions: `(Σ γ0/h‖[v]‖² + γ1 h‖[σn]‖², Σ h/γ0 ‖{σn}‖²)`.
fn edge_terms(space: &DgSpace, params: &PhysicalParams, v: &[Complex64]) -> (f64, f64) {
    let mut penalty = 0.0;
    let mut average = 0.0;
    for e in space.mesh().interior_edges() {
        let nb = e.neighbor.expect("interior edge");
        let (ko, kn) = (e.owner, nb);
        let he = e.length;
        for (x, w) in edge_gauss(space, e) {
            let vo = space.local_value(v, ko, &space.geometry(ko).barycentric(&x));
            let vn = space.local_value(v, kn, &space.geometry(kn).barycentric(&x));
            let jump = (vo[0] - vn[0]).norm_sqr() + (vo[1] - vn[1]).norm_sqr();
            penalty += params.gamma0 / he * w * jump;
        }
        let so = params.stress(&space.local_gradient(v, ko));
        let sn = params.stress(&space.local_gradient(v, kn));
        let (to, tn) = (traction(&so, &e.normal), traction(&sn, &e.normal));
        let jump = (to[0] - tn[0]).norm_sqr() + (to[1] - tn[1]).norm_sqr();
        let mean = (0.5 * (to[0] + tn[0])).norm_sqr() + (0.5 * (to[1] + tn[1])).norm_sqr();
        penalty += params.gamma1 * he * e.length * jump;
        if params.gamma0 > 0.0 {
            average += he / params.gamma0 * e.length * mean;
        }
    }
    (penalty, average)
}

pub fn energy_norms(space: &DgSpace, params: &PhysicalParams, v: &[Complex64]) -> Result<EnergyNorms> {
    space.check_len(v.len(), "field")?;
    let semi_sq: f64 = (0..space.num_elements())
        .map(|k| space.geometry(k).area * strain_energy_density(params, &space.local_gradient(v, k)))
        .sum();
    let (penalty, average) = edge_terms(space, params, v);
    Ok(EnergyNorms {
        seminorm: semi_sq.sqrt(),
        norm: (semi_sq + penalty).sqrt(),
        triple: (semi_sq + penalty + average).sqrt(),
    })
}

/// `‖v‖_{1,h}`.
pub fn energy_norm_1h(space: &DgSpace, params: &PhysicalParams, v: &[Complex64]) -> Result<f64> {
    Ok(energy_norms(space, params, v)?.norm)
}

/// `‖u − v‖_{L²}` for a smooth reference field `u`.
pub fn l2_error<F>(space: &DgSpace, v: &[Complex64], exact: F, quad_degree: usize) -> Result<f64>
where
    F: Fn(&Point) -> [Complex64; 2],
{
    space.check_len(v.len(), "field")?;
    let rule = triangle_rule(quad_degree)?;
    let mut acc = 0.0;
    for k in 0..space.num_elements() {
        let p = space.mesh().element_vertices(k);
        let area = space.geometry(k).area;
        for (b, w) in rule.points.iter().zip(&rule.weights) {
            let x = p[0] * b[0] + p[1] * b[1] + p[2] * b[2];
            let u = exact(&x);
            let vh = space.local_value(v, k, b);
            acc += area * w * ((u[0] - vh[0]).norm_sqr() + (u[1] - vh[1]).norm_sqr());
        }
    }
    Ok(acc.sqrt())
}

/// `‖u − v‖_{1,h}` for a smooth reference field `u` given by its gradient
/// `grad[(i, j)] = ∂_j u_i`. Since `u` and its traction are continuous, the
/// edge terms are those of `v` alone.
pub fn energy_error<G>(
    space: &DgSpace,
    params: &PhysicalParams,
    v: &[Complex64],
    exact_grad: G,
    quad_degree: usize,
) -> Result<f64>
where
    G: Fn(&Point) -> Matrix2<Complex64>,
{
    space.check_len(v.len(), "field")?;
    let rule = triangle_rule(quad_degree)?;
    let mut acc = 0.0;
    for k in 0..space.num_elements() {
        let p = space.mesh().element_vertices(k);
        let area = space.geometry(k).area;
        let gh = space.local_gradient(v, k);
        for (b, w) in rule.points.iter().zip(&rule.weights) {
            let x = p[0] * b[0] + p[1] * b[1] + p[2] * b[2];
            acc += area * w * strain_energy_density(params, &(exact_grad(&x) - gh));
        }
    }
    let (penalty, _) = edge_terms(space, params, v);
    Ok((acc + penalty).sqrt())
}

/// Point value of `v`; on shared element boundaries the containing element
/// with the lowest index is used.
pub fn evaluate_field(space: &DgSpace, v: &[Complex64], point: &Point) -> Result<[Complex64; 2]> {
    space.check_len(v.len(), "field")?;
    let k = space.mesh().locate(point)?;
    Ok(space.local_value(v, k, &space.geometry(k).barycentric(point)))
}
