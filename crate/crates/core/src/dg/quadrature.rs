//! Triangle and segment quadrature. Weights are fractions of the cell
//! measure: `∫_T f ≈ |T| Σ w_q f(x_q)` with `Σ w_q = 1`.

use crate::error::{Error, Result};

/// Highest polynomial degree a triangle rule can be requested for.
pub const MAX_TRIANGLE_DEGREE: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleRule {
    /// Barycentric coordinates of each point.
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl TriangleRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

fn symmetric_orbit(a: f64, w: f64, points: &mut Vec<[f64; 3]>, weights: &mut Vec<f64>) {
    let b = 1.0 - 2.0 * a;
    for p in [[a, a, b], [a, b, a], [b, a, a]] {
        points.push(p);
        weights.push(w);
    }
}

/// Rule exact for polynomials of total degree `degree` (1 ..= 20).
///
/// Degrees 1, 2, 4 and 5 use compact symmetric rules; the others use a
/// collapsed tensor-product Gauss–Legendre rule.
pub fn triangle_rule(degree: usize) -> Result<TriangleRule> {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    match degree {
        1 => {
            points.push([1.0 / 3.0; 3]);
            weights.push(1.0);
        }
        2 => symmetric_orbit(1.0 / 6.0, 1.0 / 3.0, &mut points, &mut weights),
        4 => {
            symmetric_orbit(0.445_948_490_915_964_886, 0.223_381_589_678_011_466, &mut points, &mut weights);
            symmetric_orbit(0.091_576_213_509_770_743, 0.109_951_743_655_321_867, &mut points, &mut weights);
        }
        5 => {
            let s15 = 15f64.sqrt();
            points.push([1.0 / 3.0; 3]);
            weights.push(0.225);
            symmetric_orbit((6.0 - s15) / 21.0, (155.0 - s15) / 1200.0, &mut points, &mut weights);
            symmetric_orbit((6.0 + s15) / 21.0, (155.0 + s15) / 1200.0, &mut points, &mut weights);
        }
        3 | 6..=MAX_TRIANGLE_DEGREE => {
            // (u, v) ∈ [0,1]² ↦ (ξ, η) = (u, v(1-u)); Jacobian 1-u, reference area 1/2.
            let n = (degree + 2).div_ceil(2);
            let (nodes, w) = gauss_legendre(n);
            for i in 0..n {
                for j in 0..n {
                    let xi = nodes[i];
                    let eta = nodes[j] * (1.0 - xi);
                    points.push([1.0 - xi - eta, xi, eta]);
                    weights.push(2.0 * w[i] * w[j] * (1.0 - xi));
                }
            }
        }
        other => return Err(Error::UnsupportedQuadrature(other)),
    }
    Ok(TriangleRule { points, weights })
}

/// Gauss–Legendre rule with `n` points on `[0, 1]`, weights summing to 1.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one Gauss point");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for m in 2..=n {
                let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map [-1, 1] → [0, 1]; x is the larger root of the symmetric pair.
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}
