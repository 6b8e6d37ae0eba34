//! Uniform triangulations of the square `[-0.5, 0.5]²`.
//!
//! Cell `(i, j)` of the `n × n` grid is split along its bottom-left to
//! top-right diagonal into elements `2c` (lower-right) and `2c + 1`
//! (upper-left), with `c = j·n + i`. All elements are counterclockwise.
//!
//! Every edge is owned by the incident element with the smaller index; the
//! stored unit normal points out of the owner and, for interior edges, into
//! the neighbor.

use std::collections::HashMap;
use std::io::Write;

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};

pub type Point = Vector2<f64>;

/// Lower-left corner of the computational domain.
pub const DOMAIN_MIN: f64 = -0.5;
/// Upper-right corner of the computational domain.
pub const DOMAIN_MAX: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub vertices: [usize; 2],
    /// Incident element with the smaller index.
    pub owner: usize,
    /// The other incident element; `None` on the boundary.
    pub neighbor: Option<usize>,
    /// Unit normal pointing out of `owner`.
    pub normal: Vector2<f64>,
    pub length: f64,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.neighbor.is_none()
    }
}

/// Affine image of the reference triangle `{(0,0), (1,0), (0,1)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementGeometry {
    pub area: f64,
    pub centroid: Point,
    pub origin: Point,
    /// Columns are `p1 - p0` and `p2 - p0`.
    pub jacobian: Matrix2<f64>,
    pub inverse_jacobian: Matrix2<f64>,
}

impl ElementGeometry {
    fn from_vertices(p: [Point; 3]) -> Result<Self> {
        let jacobian = Matrix2::from_columns(&[p[1] - p[0], p[2] - p[0]]);
        let det = jacobian.determinant();
        if det <= 0.0 {
            return Err(Error::InvalidMesh(format!("element is degenerate or clockwise (det = {det})")));
        }
        let inverse_jacobian =
            jacobian.try_inverse().ok_or_else(|| Error::InvalidMesh("singular element map".into()))?;
        Ok(Self { area: 0.5 * det, centroid: (p[0] + p[1] + p[2]) / 3.0, origin: p[0], jacobian, inverse_jacobian })
    }

    pub fn map(&self, reference: &Point) -> Point {
        self.origin + self.jacobian * reference
    }

    pub fn barycentric(&self, x: &Point) -> [f64; 3] {
        let r = self.inverse_jacobian * (x - self.origin);
        [1.0 - r.x - r.y, r.x, r.y]
    }

    /// Gradients of the three barycentric coordinates (constant on the element).
    pub fn barycentric_gradients(&self) -> [Vector2<f64>; 3] {
        let g1 = self.inverse_jacobian.row(0).transpose();
        let g2 = self.inverse_jacobian.row(1).transpose();
        [-(g1 + g2), g1, g2]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    n: usize,
    h: f64,
    vertices: Vec<Point>,
    elements: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    element_edges: Vec<[usize; 3]>,
}

impl Mesh {
    /// Builds the uniform mesh with `n` cells per side (`h = 1/n`).
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMesh("need at least one subdivision".into()));
        }
        let h = 1.0 / n as f64;
        let vid = |i: usize, j: usize| j * (n + 1) + i;

        let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                vertices.push(Point::new(DOMAIN_MIN + i as f64 * h, DOMAIN_MIN + j as f64 * h));
            }
        }

        let mut elements = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let (bl, br, tr, tl) = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
                elements.push([bl, br, tr]);
                elements.push([bl, tr, tl]);
            }
        }

        let mut mesh = Self { n, h, vertices, elements, edges: Vec::new(), element_edges: Vec::new() };
        mesh.build_edges()?;
        Ok(mesh)
    }

    /// Local edge `l` of an element is the one opposite its vertex `l`.
    fn build_edges(&mut self) -> Result<()> {
        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut element_edges = Vec::with_capacity(self.elements.len());

        for (k, tri) in self.elements.iter().enumerate() {
            let mut local = [0usize; 3];
            for (l, slot) in local.iter_mut().enumerate() {
                let a = tri[(l + 1) % 3];
                let b = tri[(l + 2) % 3];
                let key = (a.min(b), a.max(b));
                let id = match lookup.get(&key) {
                    Some(&id) => {
                        let edge = &mut edges[id];
                        if edge.neighbor.is_some() {
                            return Err(Error::InvalidMesh(format!("edge {key:?} shared by more than two elements")));
                        }
                        edge.neighbor = Some(k);
                        id
                    }
                    None => {
                        let (pa, pb) = (self.vertices[a], self.vertices[b]);
                        let t = pb - pa;
                        let length = t.norm();
                        let mut normal = Vector2::new(t.y, -t.x) / length;
                        let centroid = (self.vertices[tri[0]] + self.vertices[tri[1]] + self.vertices[tri[2]]) / 3.0;
                        if normal.dot(&(0.5 * (pa + pb) - centroid)) < 0.0 {
                            normal = -normal;
                        }
                        edges.push(Edge { vertices: [a, b], owner: k, neighbor: None, normal, length });
                        lookup.insert(key, edges.len() - 1);
                        edges.len() - 1
                    }
                };
                *slot = id;
            }
            element_edges.push(local);
        }
        self.edges = edges;
        self.element_edges = element_edges;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn elements(&self) -> &[[usize; 3]] {
        &self.elements
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn interior_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| !e.is_boundary())
    }

    pub fn boundary_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| e.is_boundary())
    }

    /// Global edge ids of element `k`, ordered by the opposite local vertex.
    pub fn element_edges(&self, k: usize) -> [usize; 3] {
        self.element_edges[k]
    }

    pub fn element_vertices(&self, k: usize) -> [Point; 3] {
        let t = self.elements[k];
        [self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]]
    }

    pub fn element_geometry(&self, k: usize) -> Result<ElementGeometry> {
        if k >= self.elements.len() {
            return Err(Error::IndexOutOfRange { what: "element", index: k, len: self.elements.len() });
        }
        ElementGeometry::from_vertices(self.element_vertices(k))
    }

    pub fn centroids(&self) -> Vec<Point> {
        (0..self.num_elements())
            .map(|k| {
                let p = self.element_vertices(k);
                (p[0] + p[1] + p[2]) / 3.0
            })
            .collect()
    }

    /// Elements with at least one edge on `∂D`.
    pub fn boundary_elements(&self) -> Vec<bool> {
        let mut flags = vec![false; self.num_elements()];
        for e in self.boundary_edges() {
            flags[e.owner] = true;
        }
        flags
    }

    /// Lowest-index element whose closure contains `x`.
    pub fn locate(&self, x: &Point) -> Result<usize> {
        const TOL: f64 = 1e-12;
        let outside = |c: f64| c < DOMAIN_MIN - TOL || c > DOMAIN_MAX + TOL;
        if outside(x.x) || outside(x.y) || !x.x.is_finite() || !x.y.is_finite() {
            return Err(Error::OutsideDomain { x: x.x, y: x.y });
        }
        let n = self.n as isize;
        let cell = |c: f64| (((c - DOMAIN_MIN) * self.n as f64).floor() as isize).clamp(0, n - 1);
        let (ci, cj) = (cell(x.x), cell(x.y));
        let mut best: Option<usize> = None;
        for dj in -1..=1 {
            for di in -1..=1 {
                let (i, j) = (ci + di, cj + dj);
                if i < 0 || j < 0 || i >= n || j >= n {
                    continue;
                }
                let c = (j * n + i) as usize;
                for k in [2 * c, 2 * c + 1] {
                    let geo = ElementGeometry::from_vertices(self.element_vertices(k))?;
                    if geo.barycentric(x).iter().all(|&l| l >= -TOL) {
                        best = Some(best.map_or(k, |b| b.min(k)));
                    }
                }
            }
        }
        best.ok_or(Error::OutsideDomain { x: x.x, y: x.y })
    }

    /// Plain-text dump: a `vertices` block (`x y` per line) followed by an
    /// `elements` block (three zero-based vertex indices per line).
    pub fn write_dump<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "vertices {}", self.vertices.len())?;
        for v in &self.vertices {
            writeln!(w, "{:.17e} {:.17e}", v.x, v.y)?;
        }
        writeln!(w, "elements {}", self.elements.len())?;
        for t in &self.elements {
            writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
        }
        Ok(())
    }
}
