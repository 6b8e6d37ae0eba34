//! Test-side reference implementations built from first principles: dense
//! assembly by brute-force quadrature, dense Gaussian elimination and a
//! quadrature-based mode load. They share no code with the library beyond
//! the mesh vertex and triangle lists.
#![allow(dead_code)]

use std::collections::HashMap;

use elastic_mcdg::mesh::Mesh;
use num_complex::Complex64;

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Gauss–Legendre nodes and weights on [0, 1] by Newton iteration.
pub fn gauss_legendre01(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for m in 2..=n {
                let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
    }
    out
}

/// P1 shape functions of one triangle as `c0 + c1 x + c2 y`.
#[derive(Clone, Copy)]
pub struct Tri {
    pub p: [[f64; 2]; 3],
    pub coef: [[f64; 3]; 3],
    pub area: f64,
}

impl Tri {
    pub fn new(p: [[f64; 2]; 3]) -> Self {
        let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
        let mut coef = [[0.0; 3]; 3];
        for a in 0..3 {
            let (b, d) = ((a + 1) % 3, (a + 2) % 3);
            // λ_a vanishes on the line through p_b and p_d.
            coef[a] =
                [(p[b][0] * p[d][1] - p[d][0] * p[b][1]) / det, (p[b][1] - p[d][1]) / det, (p[d][0] - p[b][0]) / det];
        }
        Self { p, coef, area: 0.5 * det.abs() }
    }

    pub fn lambda(&self, a: usize, x: [f64; 2]) -> f64 {
        let c = self.coef[a];
        c[0] + c[1] * x[0] + c[2] * x[1]
    }

    pub fn grad(&self, a: usize) -> [f64; 2] {
        [self.coef[a][1], self.coef[a][2]]
    }

    /// Collapsed tensor Gauss rule with `n × n` points.
    pub fn quadrature(&self, n: usize) -> Vec<([f64; 2], f64)> {
        let g = gauss_legendre01(n);
        let mut out = Vec::new();
        for &(s, ws) in &g {
            for &(t, wt) in &g {
                let (l1, l2) = (s * (1.0 - t), s * t);
                let x = [
                    self.p[0][0] + l1 * (self.p[1][0] - self.p[0][0]) + l2 * (self.p[2][0] - self.p[0][0]),
                    self.p[0][1] + l1 * (self.p[1][1] - self.p[0][1]) + l2 * (self.p[2][1] - self.p[0][1]),
                ];
                out.push((x, ws * wt * s * 2.0 * self.area));
            }
        }
        out
    }
}

/// Basis function `l = 2a + comp`: value at `x`.
fn phi(t: &Tri, l: usize, x: [f64; 2]) -> [f64; 2] {
    let mut v = [0.0; 2];
    v[l % 2] = t.lambda(l / 2, x);
    v
}

/// Gradient `g[i][j] = ∂_j φ_i` of basis function `l`.
fn phi_grad(t: &Tri, l: usize) -> [[f64; 2]; 2] {
    let mut g = [[0.0; 2]; 2];
    g[l % 2] = t.grad(l / 2);
    g
}

#[derive(Clone, Copy)]
pub struct Material {
    pub k: f64,
    pub mu: f64,
    pub lambda: f64,
    pub a: [[f64; 2]; 2],
    pub gamma0: f64,
    pub gamma1: f64,
}

impl Material {
    pub fn standard(k: f64) -> Self {
        Self { k, mu: 1.0, lambda: 1.0, a: [[1.0, 0.0], [0.0, 1.0]], gamma0: 10.0, gamma1: 0.1 }
    }

    fn stress(&self, g: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
        let div = g[0][0] + g[1][1];
        let mut s = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                s[i][j] = self.mu * (g[i][j] + g[j][i]) + if i == j { self.lambda * div } else { 0.0 };
            }
        }
        s
    }
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn matvec(m: [[f64; 2]; 2], v: [f64; 2]) -> [f64; 2] {
    [dot(m[0], v), dot(m[1], v)]
}

pub struct OracleEdge {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub elems: Vec<usize>,
}

/// Edges found by hashing sorted vertex pairs.
pub fn oracle_edges(mesh: &Mesh) -> Vec<OracleEdge> {
    let v = mesh.vertices();
    let mut map: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (k, t) in mesh.elements().iter().enumerate() {
        for i in 0..3 {
            let (a, b) = (t[i], t[(i + 1) % 3]);
            map.entry((a.min(b), a.max(b))).or_default().push(k);
        }
    }
    let mut keys: Vec<_> = map.keys().copied().collect();
    keys.sort();
    keys.into_iter()
        .map(|key| OracleEdge { a: [v[key.0].x, v[key.0].y], b: [v[key.1].x, v[key.1].y], elems: map[&key].clone() })
        .collect()
}

pub fn oracle_tris(mesh: &Mesh) -> Vec<Tri> {
    let v = mesh.vertices();
    mesh.elements()
        .iter()
        .map(|t| Tri::new([[v[t[0]].x, v[t[0]].y], [v[t[1]].x, v[t[1]].y], [v[t[2]].x, v[t[2]].y]]))
        .collect()
}

/// Unit normal of an edge pointing out of triangle `t`.
fn outward_normal(t: &Tri, e: &OracleEdge) -> [f64; 2] {
    let d = [e.b[0] - e.a[0], e.b[1] - e.a[1]];
    let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
    let mut n = [d[1] / len, -d[0] / len];
    let cx = (t.p[0][0] + t.p[1][0] + t.p[2][0]) / 3.0;
    let cy = (t.p[0][1] + t.p[1][1] + t.p[2][1]) / 3.0;
    if dot(n, [cx - e.a[0], cy - e.a[1]]) > 0.0 {
        n = [-n[0], -n[1]];
    }
    n
}

/// Dense `M[i][j] = a_h(φ_j, φ_i)` with local dof ordering `6k + 2a + comp`.
/// `alpha` scales the mass term per element; `boundary_alpha` also applies
/// it to the boundary term.
pub fn oracle_matrix(mesh: &Mesh, m: &Material, alpha: Option<&[f64]>, boundary_alpha: bool) -> Vec<Vec<C>> {
    let tris = oracle_tris(mesh);
    let nd = 6 * tris.len();
    let mut out = vec![vec![C::default(); nd]; nd];
    let al = |k: usize| alpha.map_or(1.0, |a| a[k]);

    for (k, t) in tris.iter().enumerate() {
        let q = t.quadrature(5);
        for i in 0..6 {
            for j in 0..6 {
                let (gi, gj) = (phi_grad(t, i), phi_grad(t, j));
                let sj = m.stress(gj);
                let mut stiff = 0.0;
                for r in 0..2 {
                    for s in 0..2 {
                        stiff += sj[r][s] * gi[r][s];
                    }
                }
                stiff *= t.area;
                let mut mass = 0.0;
                for &(x, w) in &q {
                    mass += w * dot(phi(t, j, x), phi(t, i, x));
                }
                out[6 * k + i][6 * k + j] += c(stiff - m.k * m.k * al(k) * al(k) * mass, 0.0);
            }
        }
    }

    let gl = gauss_legendre01(4);
    for e in oracle_edges(mesh) {
        let len = ((e.b[0] - e.a[0]).powi(2) + (e.b[1] - e.a[1]).powi(2)).sqrt();
        let pts: Vec<([f64; 2], f64)> = gl
            .iter()
            .map(|&(s, w)| ([e.a[0] + s * (e.b[0] - e.a[0]), e.a[1] + s * (e.b[1] - e.a[1])], w * len))
            .collect();
        if e.elems.len() == 1 {
            let k = e.elems[0];
            let t = &tris[k];
            let scale = m.k * if boundary_alpha { al(k) } else { 1.0 };
            for i in 0..6 {
                for j in 0..6 {
                    let mut v = 0.0;
                    for &(x, w) in &pts {
                        v += w * dot(matvec(m.a, phi(t, j, x)), phi(t, i, x));
                    }
                    out[6 * k + i][6 * k + j] += c(0.0, scale * v);
                }
            }
            continue;
        }
        // Jump and average with the first element as the positive side.
        let sides = [e.elems[0], e.elems[1]];
        let n = outward_normal(&tris[sides[0]], &e);
        for (si, &ki) in sides.iter().enumerate() {
            for (sj, &kj) in sides.iter().enumerate() {
                let (ti, tj) = (&tris[ki], &tris[kj]);
                let (sgi, sgj) = (if si == 0 { 1.0 } else { -1.0 }, if sj == 0 { 1.0 } else { -1.0 });
                for i in 0..6 {
                    for j in 0..6 {
                        let tr_i = matvec(m.stress(phi_grad(ti, i)), n);
                        let tr_j = matvec(m.stress(phi_grad(tj, j)), n);
                        let mut re = 0.0;
                        let mut im = 0.0;
                        for &(x, w) in &pts {
                            let (vi, vj) = (phi(ti, i, x), phi(tj, j, x));
                            re -= w * (0.5 * dot(tr_j, vi) * sgi + 0.5 * dot(tr_i, vj) * sgj);
                            im += w
                                * (m.gamma0 / len * sgi * sgj * dot(vj, vi)
                                    + m.gamma1 * len * sgi * sgj * dot(tr_j, tr_i));
                        }
                        out[6 * ki + i][6 * kj + j] += c(re, im);
                    }
                }
            }
        }
    }
    out
}

/// `(2k²η u_prev + k²η² u_prev2, φ_i)` by quadrature of the P1 fields.
pub fn oracle_mode_load(mesh: &Mesh, eta: &[f64], prev: &[C], prev2: &[C], k: f64) -> Vec<C> {
    let tris = oracle_tris(mesh);
    let mut out = vec![C::default(); 6 * tris.len()];
    for (e, t) in tris.iter().enumerate() {
        for (x, w) in t.quadrature(4) {
            let field = |u: &[C], comp: usize| -> C { (0..3).map(|a| u[6 * e + 2 * a + comp] * t.lambda(a, x)).sum() };
            for l in 0..6 {
                let comp = l % 2;
                let s = 2.0 * k * k * eta[e] * field(prev, comp) + k * k * eta[e] * eta[e] * field(prev2, comp);
                out[6 * e + l] += s * (w * t.lambda(l / 2, x));
            }
        }
    }
    out
}

/// Gaussian elimination with partial pivoting on a dense copy.
pub fn dense_solve(a: &[Vec<C>], b: &[C]) -> Vec<C> {
    let n = b.len();
    let mut m: Vec<Vec<C>> = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm())).unwrap();
        m.swap(col, piv);
        x.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f != C::default() {
                for cc in col..n {
                    let v = m[col][cc];
                    m[r][cc] -= f * v;
                }
                let v = x[col];
                x[r] -= f * v;
            }
        }
    }
    for r in (0..n).rev() {
        let mut s = x[r];
        for cc in r + 1..n {
            s -= m[r][cc] * x[cc];
        }
        x[r] = s / m[r][r];
    }
    x
}

/// Broken L² norm of a P1 field by quadrature.
pub fn oracle_l2_norm(mesh: &Mesh, u: &[C]) -> f64 {
    let tris = oracle_tris(mesh);
    let mut acc = 0.0;
    for (e, t) in tris.iter().enumerate() {
        for (x, w) in t.quadrature(3) {
            for comp in 0..2 {
                let v: C = (0..3).map(|a| u[6 * e + 2 * a + comp] * t.lambda(a, x)).sum();
                acc += w * v.norm_sqr();
            }
        }
    }
    acc.sqrt()
}

pub fn max_abs_diff_dense(a: &[Vec<C>], b: &[C], n: usize) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            d = d.max((a[i][j] - b[i * n + j]).norm());
        }
    }
    d
}

pub fn max_abs(a: &[Vec<C>]) -> f64 {
    a.iter().flatten().fold(0.0, |m, v| m.max(v.norm()))
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Complementary error function: power series below 2.5, continued
/// fraction above.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 2.5 {
        // erf series.
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= -x * x / n;
            let add = term / (2.0 * n + 1.0);
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        1.0 - 2.0 / std::f64::consts::PI.sqrt() * sum
    } else {
        // Lentz continued fraction.
        let mut f = x;
        let tiny = 1e-300;
        let (mut cc, mut d) = (x, 0.0);
        for i in 1..200 {
            let a = i as f64 / 2.0;
            d = x + a * d;
            d = if d.abs() < tiny { tiny } else { d };
            cc = x + a / cc;
            cc = if cc.abs() < tiny { tiny } else { cc };
            d = 1.0 / d;
            let delta = cc * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (-x * x).exp() / (f * std::f64::consts::PI.sqrt())
    }
}
