//! Smooth exact solutions of the deterministic problem with matching body
//! force and boundary data, for convergence studies.
//!
//! Given `u`, the data are `f = −div σ(u) − k²u` and `g = σ(u)ν + ikAu`,
//! with `div σ(u) = μΔu + (λ+μ)∇(div u)` for constant Lamé parameters.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::dg::{
    assemble_boundary_load, assemble_load_function, energy_error, l2_error, DgSpace, DgVector, PhysicalParams,
};
use crate::engines::solve_deterministic;
use crate::error::Result;
use crate::mesh::Point;

/// A real displacement field with known first and second derivatives.
pub trait ExactSolution: Sync {
    fn value(&self, x: &Point) -> Vector2<f64>;
    /// `grad[(i, j)] = ∂_j u_i`.
    fn gradient(&self, x: &Point) -> Matrix2<f64>;
    /// `(Δu_1, Δu_2)` and `∇(div u)`.
    fn second_derivatives(&self, x: &Point) -> (Vector2<f64>, Vector2<f64>);

    fn body_force(&self, params: &PhysicalParams, x: &Point) -> [Complex64; 2] {
        let (lap, grad_div) = self.second_derivatives(x);
        let div_stress = lap * params.mu + grad_div * (params.lambda + params.mu);
        let f = -div_stress - self.value(x) * (params.k * params.k);
        [Complex64::new(f.x, 0.0), Complex64::new(f.y, 0.0)]
    }

    fn boundary_data(&self, params: &PhysicalParams, x: &Point, normal: &Vector2<f64>) -> [Complex64; 2] {
        let t = params.stress(&self.gradient(x)) * normal;
        let a = params.a * self.value(x) * params.k;
        [Complex64::new(t.x, a.x), Complex64::new(t.y, a.y)]
    }
}

/// `A sin(a x + φ) cos(b y + ψ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigComponent {
    pub amplitude: f64,
    pub a: f64,
    pub b: f64,
    pub phase_x: f64,
    pub phase_y: f64,
}

impl TrigComponent {
    fn parts(&self, x: &Point) -> (f64, f64, f64, f64) {
        let (sx, cx) = (self.a * x.x + self.phase_x).sin_cos();
        let (sy, cy) = (self.b * x.y + self.phase_y).sin_cos();
        (sx, cx, sy, cy)
    }

    fn value(&self, x: &Point) -> f64 {
        let (sx, _, _, cy) = self.parts(x);
        self.amplitude * sx * cy
    }

    /// `(∂x, ∂y)`.
    fn gradient(&self, x: &Point) -> Vector2<f64> {
        let (sx, cx, sy, cy) = self.parts(x);
        Vector2::new(self.amplitude * self.a * cx * cy, -self.amplitude * self.b * sx * sy)
    }

    /// `(∂xx, ∂xy, ∂yy)`.
    fn hessian(&self, x: &Point) -> (f64, f64, f64) {
        let (sx, cx, sy, cy) = self.parts(x);
        let amp = self.amplitude;
        (-amp * self.a * self.a * sx * cy, -amp * self.a * self.b * cx * sy, -amp * self.b * self.b * sx * cy)
    }
}

/// Componentwise trigonometric products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigSolution {
    pub components: [TrigComponent; 2],
}

impl Default for TrigSolution {
    fn default() -> Self {
        Self {
            components: [
                TrigComponent { amplitude: 1.0, a: 2.0, b: 1.5, phase_x: 0.3, phase_y: -0.2 },
                TrigComponent { amplitude: 0.8, a: 1.2, b: 2.5, phase_x: -0.4, phase_y: 0.5 },
            ],
        }
    }
}

impl ExactSolution for TrigSolution {
    fn value(&self, x: &Point) -> Vector2<f64> {
        Vector2::new(self.components[0].value(x), self.components[1].value(x))
    }

    fn gradient(&self, x: &Point) -> Matrix2<f64> {
        let (g1, g2) = (self.components[0].gradient(x), self.components[1].gradient(x));
        Matrix2::new(g1.x, g1.y, g2.x, g2.y)
    }

    fn second_derivatives(&self, x: &Point) -> (Vector2<f64>, Vector2<f64>) {
        let (xx1, xy1, yy1) = self.components[0].hessian(x);
        let (xx2, xy2, yy2) = self.components[1].hessian(x);
        // div u = ∂x u1 + ∂y u2.
        (Vector2::new(xx1 + yy1, xx2 + yy2), Vector2::new(xx1 + xy2, xy1 + yy2))
    }
}

/// `u(x) = B x + c`: lies in the discrete space and has constant stress.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSolution {
    pub matrix: Matrix2<f64>,
    pub offset: Vector2<f64>,
}

impl ExactSolution for LinearSolution {
    fn value(&self, x: &Point) -> Vector2<f64> {
        self.matrix * x + self.offset
    }

    fn gradient(&self, _: &Point) -> Matrix2<f64> {
        self.matrix
    }

    fn second_derivatives(&self, _: &Point) -> (Vector2<f64>, Vector2<f64>) {
        (Vector2::zeros(), Vector2::zeros())
    }
}

/// Errors of the discrete solution against the exact one.
#[derive(Debug, Clone)]
pub struct ManufacturedRun {
    pub solution: DgVector,
    pub l2_error: f64,
    pub energy_error: f64,
}

/// Solves with the manufactured data and measures the errors with a rule of
/// degree `quad_degree`.
pub fn solve_manufactured<S: ExactSolution>(
    space: &DgSpace,
    params: &PhysicalParams,
    exact: &S,
    quad_degree: usize,
) -> Result<ManufacturedRun> {
    let mut load = assemble_load_function(space, |x| exact.body_force(params, x), quad_degree)?;
    let boundary =
        assemble_boundary_load(space, |x, n| exact.boundary_data(params, x, n), quad_degree.div_ceil(2) + 1)?;
    load.axpy(Complex64::new(1.0, 0.0), &boundary);
    let solution = solve_deterministic(space, params, &load)?;
    let value = |x: &Point| {
        let v = exact.value(x);
        [Complex64::new(v.x, 0.0), Complex64::new(v.y, 0.0)]
    };
    let grad = |x: &Point| exact.gradient(x).map(|g| Complex64::new(g, 0.0));
    Ok(ManufacturedRun {
        l2_error: l2_error(space, &solution, value, quad_degree)?,
        energy_error: energy_error(space, params, &solution, grad, quad_degree)?,
        solution,
    })
}
