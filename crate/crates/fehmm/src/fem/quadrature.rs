//! Gauss-Legendre quadrature on the reference square.

/// Tensor-product Gauss-Legendre rule on [-1, 1]².
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    /// Points (xi, eta) in the reference square.
    pub points: Vec<[f64; 2]>,
    /// Positive weights; they sum to 4 (the reference-element area).
    pub weights: Vec<f64>,
    /// Polynomial degree integrated exactly per direction (2n - 1).
    pub exact_degree: usize,
}

/// 1D Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_1d(n: usize) -> (Vec<f64>, Vec<f64>) {
    match n {
        1 => (vec![0.0], vec![2.0]),
        2 => {
            let a = 1.0 / 3.0f64.sqrt();
            (vec![-a, a], vec![1.0, 1.0])
        }
        3 => {
            let a = (3.0f64 / 5.0).sqrt();
            (vec![-a, 0.0, a], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
        }
        4 => {
            let b = (3.0f64 / 7.0 + 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
            let a = (3.0f64 / 7.0 - 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
            let wa = (18.0 + 30.0f64.sqrt()) / 36.0;
            let wb = (18.0 - 30.0f64.sqrt()) / 36.0;
            (vec![-b, -a, a, b], vec![wb, wa, wa, wb])
        }
        5 => {
            let c = 2.0 * (10.0f64 / 7.0).sqrt();
            let a = (5.0 - c).sqrt() / 3.0;
            let b = (5.0 + c).sqrt() / 3.0;
            let wa = (322.0 + 13.0 * 70.0f64.sqrt()) / 900.0;
            let wb = (322.0 - 13.0 * 70.0f64.sqrt()) / 900.0;
            (
                vec![-b, -a, 0.0, a, b],
                vec![wb, wa, 128.0 / 225.0, wa, wb],
            )
        }
        _ => panic!("unsupported 1D Gauss rule with {n} points"),
    }
}

impl QuadratureRule {
    /// n×n tensor-product rule.
    pub fn gauss(n: usize) -> Self {
        let (x, w) = gauss_1d(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                points.push([x[i], x[j]]);
                weights.push(w[i] * w[j]);
            }
        }
        QuadratureRule {
            points,
            weights,
            exact_degree: 2 * n - 1,
        }
    }

    /// Full-integration rule for elements of the given polynomial order:
    /// 2×2 for Q4, 3×3 for Q9.
    pub fn for_order(order: usize) -> Self {
        QuadratureRule::gauss(order + 1)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
