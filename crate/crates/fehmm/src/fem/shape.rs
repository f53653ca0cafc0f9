//! Lagrange shape functions on the reference square [-1, 1]².
//!
//! Two element families are supported: the bilinear 4-node quad (order 1)
//! and the biquadratic 9-node quad (order 2). Node ordering follows the
//! VTK convention:
//!
//! ```text
//!   order 1            order 2
//!   3-------2          3---6---2
//!   |       |          |       |
//!   |       |          7   8   5
//!   |       |          |       |
//!   0-------1          0---4---1
//! ```

/// Number of nodes of an element of the given polynomial order.
pub fn nodes_per_element(order: usize) -> usize {
    match order {
        1 => 4,
        2 => 9,
        _ => panic!("unsupported element order {order}"),
    }
}

/// Reference coordinates of the element nodes, in connectivity order.
pub fn reference_nodes(order: usize) -> Vec<[f64; 2]> {
    match order {
        1 => vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]],
        2 => vec![
            [-1.0, -1.0],
            [1.0, -1.0],
            [1.0, 1.0],
            [-1.0, 1.0],
            [0.0, -1.0],
            [1.0, 0.0],
            [0.0, 1.0],
            [-1.0, 0.0],
            [0.0, 0.0],
        ],
        _ => panic!("unsupported element order {order}"),
    }
}

/// 1D quadratic Lagrange basis at nodes {-1, 0, +1} and its derivative.
fn lagrange_quadratic(t: f64) -> ([f64; 3], [f64; 3]) {
    let values = [0.5 * t * (t - 1.0), 1.0 - t * t, 0.5 * t * (t + 1.0)];
    let derivs = [t - 0.5, -2.0 * t, t + 0.5];
    (values, derivs)
}

/// Shape function values and reference-space gradients at `xi`.
///
/// Returns `(values, gradients)` with one entry per node; gradients are
/// `[dN/dxi, dN/deta]`.
pub fn shape_functions(order: usize, xi: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
    let [r, s] = xi;
    match order {
        1 => {
            let values = vec![
                0.25 * (1.0 - r) * (1.0 - s),
                0.25 * (1.0 + r) * (1.0 - s),
                0.25 * (1.0 + r) * (1.0 + s),
                0.25 * (1.0 - r) * (1.0 + s),
            ];
            let gradients = vec![
                [-0.25 * (1.0 - s), -0.25 * (1.0 - r)],
                [0.25 * (1.0 - s), -0.25 * (1.0 + r)],
                [0.25 * (1.0 + s), 0.25 * (1.0 + r)],
                [-0.25 * (1.0 + s), 0.25 * (1.0 - r)],
            ];
            (values, gradients)
        }
        2 => {
            let (lr, dlr) = lagrange_quadratic(r);
            let (ls, dls) = lagrange_quadratic(s);
            // (i, j) indices into the 1D bases per node, following the
            // node ordering in the module docs.
            const IJ: [(usize, usize); 9] = [
                (0, 0),
                (2, 0),
                (2, 2),
                (0, 2),
                (1, 0),
                (2, 1),
                (1, 2),
                (0, 1),
                (1, 1),
            ];
            let mut values = Vec::with_capacity(9);
            let mut gradients = Vec::with_capacity(9);
            for &(i, j) in &IJ {
                values.push(lr[i] * ls[j]);
                gradients.push([dlr[i] * ls[j], lr[i] * dls[j]]);
            }
            (values, gradients)
        }
        _ => panic!("unsupported element order {order}"),
    }
}
