//! Right-hand sides: the radially oscillating source used by the Monte
//! Carlo experiments.

use num_complex::Complex64;

use crate::mesh::Point;

/// Below this value of `κ r` the source is evaluated by its Taylor series.
pub const TAYLOR_THRESHOLD: f64 = 1e-6;

/// `(e^{iz} − 1)/z`, accurate down to `z = 0`.
fn expm1_over(z: f64) -> Complex64 {
    let iz = Complex64::new(0.0, z);
    if z.abs() < TAYLOR_THRESHOLD {
        Complex64::i() * (1.0 + iz / 2.0 + iz * iz / 6.0 + iz * iz * iz / 24.0)
    } else {
        // cos z − 1 = −2 sin²(z/2) avoids cancellation for small z.
        let half = (0.5 * z).sin();
        Complex64::new(-2.0 * half * half, z.sin()) / z
    }
}

/// `1/(κ² r) · [e^{iκr} − 1, e^{−iκr} − 1]` with `r = |x|` and `κ = kα`.
///
/// The singularity at the origin is removable; the limit there is
/// `[i/κ, −i/κ]`.
pub fn oscillatory_source(kappa: f64, x: &Point) -> [Complex64; 2] {
    let z = kappa * x.norm();
    [expm1_over(z) / kappa, -expm1_over(-z) / kappa]
}
