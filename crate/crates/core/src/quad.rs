//! Quadrature building blocks: Gauss-Legendre rules, Gauss-Chebyshev nodes,
//! and polynomial extrapolation of partial sums.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let n = n.max(1);
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = n.div_ceil(2);
        let nf = n as f64;
        for i in 0..m {
            // Tricomi initial guess, refined by Newton on P_n
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[m - 1] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F>(&self, a: f64, b: f64, mut f: F) -> f64
    where
        F: FnMut(f64) -> f64,
    {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Nodes `cos((2i-1)π/(2n))` of the n-point Gauss-Chebyshev rule of the first
/// kind; every node carries weight `π/n`.
pub fn chebyshev_nodes(n: usize) -> impl Iterator<Item = f64> {
    let nf = n as f64;
    (1..=n).map(move |i| ((2 * i - 1) as f64 * PI / (2.0 * nf)).cos())
}

/// Extrapolates `values[i] ≈ S + c1·h[i] + c2·h[i]² + …` to `h → 0` with
/// Neville's scheme. Returns the last diagonal entry and its predecessor;
/// their difference is a convergence estimate.
pub fn extrapolate_to_zero(h: &[f64], values: &[f64]) -> (f64, f64) {
    assert_eq!(h.len(), values.len());
    let n = values.len();
    if n == 1 {
        return (values[0], values[0]);
    }
    let mut tab: Vec<f64> = values.to_vec();
    for m in 1..n {
        for i in (m..n).rev() {
            tab[i] = (h[i - m] * tab[i] - h[i] * tab[i - 1]) / (h[i - m] - h[i]);
        }
    }
    (tab[n - 1], tab[n - 2])
}
