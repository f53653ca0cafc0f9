//! Fill-reducing elimination orders for the structured-grid systems
//! assembled in this crate.
//!
//! All stiffness matrices here come from tensor-product node grids, so a
//! geometric nested dissection is both simple and close to optimal: split
//! the grid recursively along its longer axis and eliminate the separator
//! band last. The band is `reach` lines wide, where `reach` is the node-grid
//! distance coupled by one element (1 for Q4, 2 for Q9).

/// Nested-dissection order of an arbitrary subset of grid points.
/// Returns positions into `points` in elimination order.
pub fn nd_order_points(points: &[(u32, u32)], reach: u32) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    let mut out = Vec::with_capacity(points.len());
    recurse(points, &mut idx, reach, &mut out);
    out
}

fn recurse(points: &[(u32, u32)], set: &mut [usize], reach: u32, out: &mut Vec<usize>) {
    if set.len() <= 48 {
        set.sort_unstable();
        out.extend_from_slice(set);
        return;
    }
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (u32::MAX, 0u32, u32::MAX, 0u32);
    for &i in set.iter() {
        let (x, y) = points[i];
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    let split_x = xmax - xmin >= ymax - ymin;
    let (lo, hi) = if split_x { (xmin, xmax) } else { (ymin, ymax) };
    if hi - lo < 2 * reach + 2 {
        let mut rest: Vec<usize> = set.to_vec();
        rest.sort_unstable();
        out.extend_from_slice(&rest);
        return;
    }
    let mid = lo + (hi - lo) / 2;
    let coord = |i: usize| if split_x { points[i].0 } else { points[i].1 };
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut sep = Vec::new();
    for &i in set.iter() {
        let c = coord(i);
        if c < mid {
            left.push(i);
        } else if c < mid + reach {
            sep.push(i);
        } else {
            right.push(i);
        }
    }
    recurse(points, &mut left, reach, out);
    recurse(points, &mut right, reach, out);
    sep.sort_unstable();
    out.extend_from_slice(&sep);
}

/// Elimination order of the displacement dofs of a node set laid out on a
/// grid: nodes in nested-dissection order, the two dofs of a node adjacent.
pub fn dof_order_for_nodes(node_grid: &[(u32, u32)], reach: u32) -> Vec<usize> {
    let nodes = nd_order_points(node_grid, reach);
    let mut order = Vec::with_capacity(2 * nodes.len());
    for n in nodes {
        order.push(2 * n);
        order.push(2 * n + 1);
    }
    order
}

/// Elimination order of a saddle system: primal dofs in the given order,
/// each constraint row inserted right after the last primal dof it touches.
/// Rows wider than `dense_threshold` go to the very end.
pub fn saddle_order(
    n_primal: usize,
    primal_order: &[usize],
    constraint_rows: &[Vec<(usize, f64)>],
    dense_threshold: usize,
) -> Vec<usize> {
    let mut pos = vec![0usize; n_primal];
    for (p, &dof) in primal_order.iter().enumerate() {
        pos[dof] = p;
    }
    let mut anchored: Vec<Vec<usize>> = vec![Vec::new(); n_primal];
    let mut dense = Vec::new();
    for (r, row) in constraint_rows.iter().enumerate() {
        if row.len() > dense_threshold || row.is_empty() {
            dense.push(n_primal + r);
        } else {
            let anchor = row.iter().map(|&(c, _)| pos[c]).max().unwrap();
            anchored[anchor].push(n_primal + r);
        }
    }
    let mut order = Vec::with_capacity(n_primal + constraint_rows.len());
    for (p, &dof) in primal_order.iter().enumerate() {
        order.push(dof);
        order.extend_from_slice(&anchored[p]);
    }
    order.extend_from_slice(&dense);
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nd_order_is_a_permutation() {
        let mut points = Vec::new();
        for j in 0..20u32 {
            for i in 0..17u32 {
                points.push((i, j));
            }
        }
        let order = nd_order_points(&points, 1);
        let mut seen = vec![false; points.len()];
        for &i in &order {
            assert!(!seen[i]);
            seen[i] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn saddle_order_places_constraints_after_anchor() {
        let primal_order = vec![2, 0, 1];
        let rows = vec![vec![(0, 1.0)], vec![(2, 1.0), (1, -1.0)]];
        let order = saddle_order(3, &primal_order, &rows, 8);
        // Row 0 anchored at dof 0 (position 1); row 1 anchored at dof 1
        // (position 2).
        assert_eq!(order, vec![2, 0, 3, 1, 4]);
    }
}
