//! Structured quadrilateral meshes (Q4 / Q9) on rectangular and tapered
//! domains.
//!
//! Nodes are numbered lexicographically (x fastest) on the
//! `(order·nx + 1) × (order·ny + 1)` node grid, so meshes are bit-reproducible.
//! Boundary edges are stored as four ordered node lists traversing the
//! boundary counterclockwise; shared corners appear in exactly two lists.

use crate::error::{Error, Result};
use crate::fem::quadrature::QuadratureRule;
use crate::fem::shape;
use nalgebra::Matrix2;

/// Geometry behind a structured mesh.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainMap {
    /// Axis-aligned rectangle `[0, width] × [0, height]`.
    Rectangle { width: f64, height: f64 },
    /// Convex quadrilateral given by its four corners in counterclockwise
    /// order, meshed through the bilinear map of the unit square.
    Tapered {
        corners: [[f64; 2]; 4],
        /// Taper half-angle in degrees, derived from the corner geometry.
        alpha_deg: f64,
        /// Set when the taper angle is at or below the regularity threshold
        /// of 28.4 degrees.
        marginal_regularity: bool,
    },
}

/// Structured quadrilateral mesh of bilinear (order 1) or biquadratic
/// (order 2) elements.
#[derive(Debug, Clone)]
pub struct StructuredQuadMesh {
    pub order: usize,
    pub nx: usize,
    pub ny: usize,
    pub node_coords: Vec<[f64; 2]>,
    /// Per-element node indices (4 or 9 entries, VTK ordering).
    pub connectivity: Vec<Vec<usize>>,
    /// Ordered node lists for bottom/right/top/left, each traversed
    /// counterclockwise and including both end corners.
    pub boundary_edges: [Vec<usize>; 4],
    /// Corner node indices: bottom-left, bottom-right, top-right, top-left.
    pub corner_nodes: [usize; 4],
    pub domain_map: DomainMap,
}

/// Non-redundant periodic node pairs `(plus, minus)` of a rectangular mesh.
///
/// Plus nodes sit on the right/top boundary, minus nodes on the opposite
/// side. Of the four corners only two pairs are kept; they tie the corners
/// diagonally (`TR↔BL`, `TL↔BR`) so that each tied group carries a vanishing
/// discrete-normal sum. This keeps the generated constraint rows linearly
/// independent while preserving the energetic ordering against the
/// constant-traction coupling.
#[derive(Debug, Clone)]
pub struct PeriodicPairs {
    pub pairs: Vec<(usize, usize)>,
    pub excluded_corner_policy: String,
}

impl StructuredQuadMesh {
    fn nodes_x(&self) -> usize {
        self.order * self.nx + 1
    }

    fn nodes_y(&self) -> usize {
        self.order * self.ny + 1
    }

    pub fn num_nodes(&self) -> usize {
        self.node_coords.len()
    }

    pub fn num_elements(&self) -> usize {
        self.connectivity.len()
    }

    pub fn num_dofs(&self) -> usize {
        2 * self.num_nodes()
    }

    /// Grid index of a node on the lexicographic node grid.
    pub fn node_grid_index(&self, node: usize) -> (usize, usize) {
        let nx = self.nodes_x();
        (node % nx, node / nx)
    }

    fn node_at(&self, i: usize, j: usize) -> usize {
        j * self.nodes_x() + i
    }

    /// Physical coordinates of the element's nodes in connectivity order.
    pub fn element_coords(&self, element: usize) -> Vec<[f64; 2]> {
        self.connectivity[element]
            .iter()
            .map(|&n| self.node_coords[n])
            .collect()
    }

    /// Isoparametric geometry map of an element at reference coordinates.
    pub fn map_point(&self, element: usize, xi: [f64; 2]) -> [f64; 2] {
        let (values, _) = shape::shape_functions(self.order, xi);
        let mut x = [0.0, 0.0];
        for (v, &n) in values.iter().zip(&self.connectivity[element]) {
            x[0] += v * self.node_coords[n][0];
            x[1] += v * self.node_coords[n][1];
        }
        x
    }

    /// Jacobian dx/dxi of the geometry map.
    pub fn jacobian(&self, element: usize, xi: [f64; 2]) -> Matrix2<f64> {
        let (_, grads) = shape::shape_functions(self.order, xi);
        let mut j = Matrix2::zeros();
        for (g, &n) in grads.iter().zip(&self.connectivity[element]) {
            let p = self.node_coords[n];
            j[(0, 0)] += g[0] * p[0];
            j[(0, 1)] += g[1] * p[0];
            j[(1, 0)] += g[0] * p[1];
            j[(1, 1)] += g[1] * p[1];
        }
        j
    }

    /// Area of the meshed domain.
    pub fn domain_area(&self) -> f64 {
        match &self.domain_map {
            DomainMap::Rectangle { width, height } => width * height,
            DomainMap::Tapered { corners, .. } => polygon_area(corners),
        }
    }

    /// Largest element diagonal, used as the characteristic mesh size H.
    pub fn max_element_diameter(&self) -> f64 {
        let mut h: f64 = 0.0;
        for e in 0..self.num_elements() {
            let c = self.element_coords(e);
            let d1 = dist(c[0], c[2]);
            let d2 = dist(c[1], c[3]);
            h = h.max(d1.max(d2));
        }
        h
    }

    /// Whether two meshes describe the same geometric domain.
    pub fn same_domain(&self, other: &StructuredQuadMesh) -> bool {
        match (&self.domain_map, &other.domain_map) {
            (
                DomainMap::Rectangle { width: w1, height: h1 },
                DomainMap::Rectangle { width: w2, height: h2 },
            ) => (w1 - w2).abs() <= 1e-12 * w1.abs() && (h1 - h2).abs() <= 1e-12 * h1.abs(),
            (
                DomainMap::Tapered { corners: c1, .. },
                DomainMap::Tapered { corners: c2, .. },
            ) => c1
                .iter()
                .zip(c2.iter())
                .all(|(a, b)| dist(*a, *b) <= 1e-12 * (1.0 + a[0].abs() + a[1].abs())),
            _ => false,
        }
    }

    /// All boundary node indices, deduplicated, in ascending order.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        let mut nodes: Vec<usize> = self.boundary_edges.iter().flatten().copied().collect();
        nodes.sort_unstable();
        nodes.dedup();
        nodes
    }

    /// Interior (non-boundary) node indices in ascending order.
    pub fn interior_nodes(&self) -> Vec<usize> {
        let boundary = self.boundary_nodes();
        let mut mask = vec![false; self.num_nodes()];
        for &b in &boundary {
            mask[b] = true;
        }
        (0..self.num_nodes()).filter(|&n| !mask[n]).collect()
    }

    /// Node closest to the given point; ties resolved by lowest index.
    pub fn nearest_node(&self, p: [f64; 2]) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (n, &c) in self.node_coords.iter().enumerate() {
            let d = dist(c, p);
            if d < best_d - 1e-15 {
                best_d = d;
                best = n;
            }
        }
        best
    }

    /// Counterclockwise cycle of all boundary nodes.
    ///
    /// For each node `q` in the cycle, the discrete outward normal is
    /// `n_q = ½(x_{q+1} - x_{q-1}) × e₃`; see [`boundary_loop_normals`].
    pub fn boundary_loop(&self) -> Vec<usize> {
        let mut cycle = Vec::new();
        for edge in &self.boundary_edges {
            // Skip the shared corner that starts the next edge.
            cycle.extend_from_slice(&edge[..edge.len() - 1]);
        }
        cycle
    }

    /// Point location: element index and reference coordinates of `x`.
    ///
    /// Points within a 1e-10 relative tolerance of the boundary are clamped
    /// inside. On element interfaces the element with the lowest index wins.
    pub fn locate_point(&self, x: [f64; 2]) -> Result<(usize, [f64; 2])> {
        let (u, v) = match &self.domain_map {
            DomainMap::Rectangle { width, height } => (x[0] / width, x[1] / height),
            DomainMap::Tapered { corners, .. } => invert_bilinear(corners, x)?,
        };
        let scale = 1e-10;
        if !(-scale..=1.0 + scale).contains(&u) || !(-scale..=1.0 + scale).contains(&v) {
            return Err(Error::OutOfDomain(x[0], x[1]));
        }
        let (ei, xi_u) = param_to_element(u.clamp(0.0, 1.0), self.nx);
        let (ej, xi_v) = param_to_element(v.clamp(0.0, 1.0), self.ny);
        let element = ej * self.nx + ei;
        let mut xi = [xi_u, xi_v];

        // Refine for curved (bilinear sub-element) geometry and verify the
        // round trip. For rectangles a single pass is already exact.
        for _ in 0..30 {
            let fx = self.map_point(element, xi);
            let r = [fx[0] - x[0], fx[1] - x[1]];
            let res = (r[0] * r[0] + r[1] * r[1]).sqrt();
            let extent = self.max_element_diameter();
            if res <= 1e-13 * (1.0 + extent) {
                break;
            }
            let j = self.jacobian(element, xi);
            let det = j[(0, 0)] * j[(1, 1)] - j[(0, 1)] * j[(1, 0)];
            let dxi = [
                (j[(1, 1)] * r[0] - j[(0, 1)] * r[1]) / det,
                (-j[(1, 0)] * r[0] + j[(0, 0)] * r[1]) / det,
            ];
            xi = [xi[0] - dxi[0], xi[1] - dxi[1]];
        }
        Ok((element, xi))
    }
}

/// Discrete outward nodal normals along a boundary cycle:
/// `n_q = ½(x_{q+1} - x_{q-1}) × e₃`.
pub fn boundary_loop_normals(mesh: &StructuredQuadMesh, cycle: &[usize]) -> Vec<[f64; 2]> {
    let m = cycle.len();
    (0..m)
        .map(|q| {
            let prev = mesh.node_coords[cycle[(q + m - 1) % m]];
            let next = mesh.node_coords[cycle[(q + 1) % m]];
            let t = [next[0] - prev[0], next[1] - prev[1]];
            // (a, b) × e3 = (b, -a); outward for counterclockwise traversal.
            [0.5 * t[1], -0.5 * t[0]]
        })
        .collect()
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn polygon_area(corners: &[[f64; 2]; 4]) -> f64 {
    let mut a = 0.0;
    for i in 0..4 {
        let p = corners[i];
        let q = corners[(i + 1) % 4];
        a += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * a
}

/// Split a parametric coordinate `t ∈ [0, 1]` into (element index, local
/// coordinate in [-1, 1]). Interface points go to the lower element.
fn param_to_element(t: f64, n: usize) -> (usize, f64) {
    let scaled = t * n as f64;
    let mut e = (scaled.floor() as usize).min(n - 1);
    let mut local = scaled - e as f64;
    // Tie-break toward the lower element index on shared interfaces.
    if local <= 1e-12 && e > 0 {
        e -= 1;
        local = 1.0;
    }
    (e, 2.0 * local - 1.0)
}

/// Invert the global bilinear map of a convex quadrilateral by Newton
/// iteration; returns unit-square parameters (u, v).
fn invert_bilinear(corners: &[[f64; 2]; 4], x: [f64; 2]) -> Result<(f64, f64)> {
    let map = |u: f64, v: f64| -> [f64; 2] {
        let w = [
            (1.0 - u) * (1.0 - v),
            u * (1.0 - v),
            u * v,
            (1.0 - u) * v,
        ];
        let mut p = [0.0, 0.0];
        for k in 0..4 {
            p[0] += w[k] * corners[k][0];
            p[1] += w[k] * corners[k][1];
        }
        p
    };
    let scale: f64 = corners
        .iter()
        .map(|c| c[0].abs().max(c[1].abs()))
        .fold(1.0, f64::max);
    let (mut u, mut v) = (0.5, 0.5);
    for _ in 0..50 {
        let p = map(u, v);
        let r = [p[0] - x[0], p[1] - x[1]];
        if (r[0] * r[0] + r[1] * r[1]).sqrt() <= 1e-14 * scale {
            break;
        }
        // Jacobian of the bilinear map.
        let dxu = [
            -(1.0 - v) * corners[0][0] + (1.0 - v) * corners[1][0] + v * corners[2][0]
                - v * corners[3][0],
            -(1.0 - v) * corners[0][1] + (1.0 - v) * corners[1][1] + v * corners[2][1]
                - v * corners[3][1],
        ];
        let dxv = [
            -(1.0 - u) * corners[0][0] - u * corners[1][0] + u * corners[2][0]
                + (1.0 - u) * corners[3][0],
            -(1.0 - u) * corners[0][1] - u * corners[1][1] + u * corners[2][1]
                + (1.0 - u) * corners[3][1],
        ];
        let det = dxu[0] * dxv[1] - dxv[0] * dxu[1];
        if det.abs() <= 1e-30 {
            return Err(Error::Geometry("degenerate bilinear map".into()));
        }
        u -= (dxv[1] * r[0] - dxv[0] * r[1]) / det;
        v -= (-dxu[1] * r[0] + dxu[0] * r[1]) / det;
    }
    Ok((u, v))
}

/// Build a structured mesh of an axis-aligned rectangle `[0,w] × [0,h]`.
pub fn build_rect_mesh(
    nx: usize,
    ny: usize,
    width: f64,
    height: f64,
    order: usize,
) -> Result<StructuredQuadMesh> {
    if nx == 0 || ny == 0 {
        return Err(Error::Mesh("element counts must be at least 1".into()));
    }
    if !(width > 0.0) || !(height > 0.0) {
        return Err(Error::Mesh(format!(
            "domain dimensions must be positive, got {width} x {height}"
        )));
    }
    if order != 1 && order != 2 {
        return Err(Error::Mesh(format!("unsupported element order {order}")));
    }
    let map = DomainMap::Rectangle { width, height };
    build_structured(nx, ny, order, map, |u, v| [u * width, v * height])
}

/// Build a structured mesh over a convex quadrilateral (counterclockwise
/// corners), bilinearly mapped from the unit square.
pub fn build_tapered_mesh(
    nx: usize,
    ny: usize,
    corners: [[f64; 2]; 4],
    order: usize,
) -> Result<StructuredQuadMesh> {
    if nx == 0 || ny == 0 {
        return Err(Error::Mesh("element counts must be at least 1".into()));
    }
    if order != 1 && order != 2 {
        return Err(Error::Mesh(format!("unsupported element order {order}")));
    }
    // Convexity: every corner must turn left under counterclockwise traversal.
    for i in 0..4 {
        let a = corners[i];
        let b = corners[(i + 1) % 4];
        let c = corners[(i + 2) % 4];
        let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
        if cross <= 0.0 {
            return Err(Error::Geometry(
                "corners must form a convex counterclockwise quadrilateral".into(),
            ));
        }
    }
    let alpha_deg = taper_half_angle_deg(&corners);
    let map = DomainMap::Tapered {
        corners,
        alpha_deg,
        marginal_regularity: alpha_deg <= 28.4 + 1e-9,
    };
    build_structured(nx, ny, order, map, |u, v| {
        let w = [
            (1.0 - u) * (1.0 - v),
            u * (1.0 - v),
            u * v,
            (1.0 - u) * v,
        ];
        let mut p = [0.0, 0.0];
        for k in 0..4 {
            p[0] += w[k] * corners[k][0];
            p[1] += w[k] * corners[k][1];
        }
        p
    })
}

/// Taper half-angle of a cantilever-like quadrilateral: mean inclination of
/// the bottom and top edges against the horizontal axis.
fn taper_half_angle_deg(corners: &[[f64; 2]; 4]) -> f64 {
    let bottom = ((corners[1][1] - corners[0][1]) / (corners[1][0] - corners[0][0])).atan();
    let top = ((corners[3][1] - corners[2][1]) / (corners[3][0] - corners[2][0])).atan();
    0.5 * (bottom.abs() + top.abs()).to_degrees()
}

fn build_structured(
    nx: usize,
    ny: usize,
    order: usize,
    domain_map: DomainMap,
    map: impl Fn(f64, f64) -> [f64; 2],
) -> Result<StructuredQuadMesh> {
    let gx = order * nx + 1;
    let gy = order * ny + 1;
    let mut node_coords = Vec::with_capacity(gx * gy);
    for j in 0..gy {
        for i in 0..gx {
            let u = i as f64 / (gx - 1) as f64;
            let v = j as f64 / (gy - 1) as f64;
            node_coords.push(map(u, v));
        }
    }

    let node = |i: usize, j: usize| j * gx + i;
    let mut connectivity = Vec::with_capacity(nx * ny);
    for ej in 0..ny {
        for ei in 0..nx {
            let (i0, j0) = (order * ei, order * ej);
            let conn = match order {
                1 => vec![
                    node(i0, j0),
                    node(i0 + 1, j0),
                    node(i0 + 1, j0 + 1),
                    node(i0, j0 + 1),
                ],
                2 => vec![
                    node(i0, j0),
                    node(i0 + 2, j0),
                    node(i0 + 2, j0 + 2),
                    node(i0, j0 + 2),
                    node(i0 + 1, j0),
                    node(i0 + 2, j0 + 1),
                    node(i0 + 1, j0 + 2),
                    node(i0, j0 + 1),
                    node(i0 + 1, j0 + 1),
                ],
                _ => unreachable!(),
            };
            connectivity.push(conn);
        }
    }

    let bottom: Vec<usize> = (0..gx).map(|i| node(i, 0)).collect();
    let right: Vec<usize> = (0..gy).map(|j| node(gx - 1, j)).collect();
    let top: Vec<usize> = (0..gx).rev().map(|i| node(i, gy - 1)).collect();
    let left: Vec<usize> = (0..gy).rev().map(|j| node(0, j)).collect();
    let corner_nodes = [
        node(0, 0),
        node(gx - 1, 0),
        node(gx - 1, gy - 1),
        node(0, gy - 1),
    ];

    let mesh = StructuredQuadMesh {
        order,
        nx,
        ny,
        node_coords,
        connectivity,
        boundary_edges: [bottom, right, top, left],
        corner_nodes,
        domain_map,
    };

    // Every element must have a positive Jacobian at its quadrature points.
    let rule = QuadratureRule::for_order(order);
    for e in 0..mesh.num_elements() {
        for &xi in &rule.points {
            let det = mesh.jacobian(e, xi).determinant();
            if det <= 0.0 {
                return Err(Error::Geometry(format!(
                    "non-positive Jacobian {det:.3e} in element {e}"
                )));
            }
        }
    }
    Ok(mesh)
}

/// Periodic node pairing of a rectangular mesh: right↔left and top↔bottom
/// pairs for non-corner boundary nodes, plus the two diagonal corner pairs.
pub fn periodic_pairs(mesh: &StructuredQuadMesh) -> Result<PeriodicPairs> {
    let DomainMap::Rectangle { width, height } = mesh.domain_map else {
        return Err(Error::Mesh(
            "periodic pairing requires a rectangular mesh".into(),
        ));
    };
    let gx = mesh.order * mesh.nx + 1;
    let gy = mesh.order * mesh.ny + 1;
    let tol = 1e-12 * width.max(height);
    let mut pairs = Vec::with_capacity(gx + gy - 2);
    // Right -> left, interior rows only.
    for j in 1..gy - 1 {
        let plus = mesh.node_at(gx - 1, j);
        let minus = mesh.node_at(0, j);
        debug_assert!((mesh.node_coords[plus][1] - mesh.node_coords[minus][1]).abs() <= tol);
        pairs.push((plus, minus));
    }
    // Top -> bottom, interior columns only.
    for i in 1..gx - 1 {
        pairs.push((mesh.node_at(i, gy - 1), mesh.node_at(i, 0)));
    }
    // Diagonal corner ties: each group {TR, BL}, {TL, BR} has a vanishing
    // discrete-normal sum, so the constant-traction constraint stays implied
    // by periodicity.
    let [bl, br, tr, tl] = mesh.corner_nodes;
    pairs.push((tr, bl));
    pairs.push((tl, br));
    Ok(PeriodicPairs {
        pairs,
        excluded_corner_policy:
            "corners tied diagonally (TR-BL, TL-BR); axis-aligned corner pairs dropped as redundant"
                .into(),
    })
}
