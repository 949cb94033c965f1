//! Fixed-resolution quadrature: periodic trapezoid, Gauss-Legendre tensor
//! patches and collapsed-coordinate simplex rules.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::projective::C;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: C,
    pub error_estimate: f64,
    pub nodes_used: usize,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_p(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_p(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_p(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// One axis of a tensor rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Axis {
    /// Trapezoid on `[0, 2π)` with `n` equispaced nodes.
    Periodic { n: usize },
    /// Gauss-Legendre of `order` nodes on `[a, b]`.
    Gauss { a: f64, b: f64, order: usize },
}

impl Axis {
    fn rule(&self) -> (Vec<f64>, Vec<f64>) {
        match *self {
            Axis::Periodic { n } => {
                let h = 2.0 * PI / n as f64;
                ((0..n).map(|i| i as f64 * h).collect(), vec![h; n])
            }
            Axis::Gauss { a, b, order } => {
                let (x, w) = gauss_legendre(order);
                let half = 0.5 * (b - a);
                let mid = 0.5 * (a + b);
                (
                    x.iter().map(|t| mid + half * t).collect(),
                    w.iter().map(|wi| wi * half).collect(),
                )
            }
        }
    }

    fn coarsened(&self) -> Axis {
        match *self {
            Axis::Periodic { n } => Axis::Periodic { n: (n / 2).max(1) },
            Axis::Gauss { a, b, order } => Axis::Gauss {
                a,
                b,
                order: (order / 2).max(1),
            },
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            Axis::Periodic { n } => n,
            Axis::Gauss { order, .. } => order,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Pairwise summation; order fixed by the index layout, so results are
/// reproducible regardless of thread count.
pub fn pairwise_sum(values: &[C]) -> C {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Tensor nodes and weights for the given axes.
pub fn tensor_nodes(axes: &[Axis]) -> Vec<(Vec<f64>, f64)> {
    let rules: Vec<_> = axes.iter().map(|a| a.rule()).collect();
    let total: usize = rules.iter().map(|r| r.0.len()).product();
    (0..total)
        .map(|mut idx| {
            let mut point = vec![0.0; axes.len()];
            let mut weight = 1.0;
            for (d, (x, w)) in rules.iter().enumerate().rev() {
                let i = idx % x.len();
                idx /= x.len();
                point[d] = x[i];
                weight *= w[i];
            }
            (point, weight)
        })
        .collect()
}

fn apply_rule<F>(axes: &[Axis], f: &F) -> C
where
    F: Fn(&[f64]) -> C + Sync,
{
    let nodes = tensor_nodes(axes);
    let vals: Vec<C> = nodes.par_iter().map(|(p, w)| f(p) * *w).collect();
    pairwise_sum(&vals)
}

/// Tensor rule over mixed periodic and Gauss axes; the error estimate is the
/// difference to the rule with every axis at half resolution.
pub fn integrate_tensor<F>(axes: &[Axis], f: F) -> QuadResult
where
    F: Fn(&[f64]) -> C + Sync,
{
    let value = apply_rule(axes, &f);
    let coarse: Vec<Axis> = axes.iter().map(|a| a.coarsened()).collect();
    let coarse_value = apply_rule(&coarse, &f);
    QuadResult {
        value,
        error_estimate: (value - coarse_value).norm(),
        nodes_used: axes.iter().map(|a| a.len()).product(),
    }
}

/// `integrate_tensor` for integrands that can fail.
pub fn try_integrate_tensor<F>(axes: &[Axis], f: F) -> Result<QuadResult>
where
    F: Fn(&[f64]) -> Result<C> + Sync,
{
    let run = |axes: &[Axis]| -> Result<C> {
        let nodes = tensor_nodes(axes);
        let vals = nodes
            .par_iter()
            .map(|(p, w)| f(p).map(|v| v * *w))
            .collect::<Result<Vec<C>>>()?;
        Ok(pairwise_sum(&vals))
    };
    let value = run(axes)?;
    let coarse: Vec<Axis> = axes.iter().map(|a| a.coarsened()).collect();
    let coarse_value = run(&coarse)?;
    Ok(QuadResult {
        value,
        error_estimate: (value - coarse_value).norm(),
        nodes_used: axes.iter().map(|a| a.len()).product(),
    })
}

/// Trapezoid rule on `[0, 2π)^d` with `n` nodes per axis.
pub fn integrate_periodic<F>(d: usize, n: usize, f: F) -> QuadResult
where
    F: Fn(&[f64]) -> C + Sync,
{
    assert!((1..=3).contains(&d), "periodic dimension must be 1, 2 or 3");
    integrate_tensor(&vec![Axis::Periodic { n }; d], f)
}

/// Gauss-Legendre tensor rule on a rectangle given as per-axis bounds.
pub fn integrate_patch<F>(rect: &[(f64, f64)], order: usize, f: F) -> QuadResult
where
    F: Fn(&[f64]) -> C + Sync,
{
    let axes: Vec<Axis> = rect
        .iter()
        .map(|&(a, b)| Axis::Gauss { a, b, order })
        .collect();
    integrate_tensor(&axes, f)
}

/// Integral over the standard simplex `{t_j ≥ 0, Σ t_j = 1}` with `n`
/// vertices, measured by `dt_1 ... dt_{n-1}`. The integrand receives all
/// `n` barycentric coordinates.
pub fn integrate_simplex<F>(n: usize, order: usize, f: F) -> QuadResult
where
    F: Fn(&[f64]) -> C + Sync,
{
    assert!(
        n == 2 || n == 3,
        "simplex integrals are implemented for n = 2, 3"
    );
    let run = |order: usize| -> C {
        match n {
            2 => apply_rule(
                &[Axis::Gauss {
                    a: 0.0,
                    b: 1.0,
                    order,
                }],
                &|p: &[f64]| f(&[p[0], 1.0 - p[0]]),
            ),
            _ => {
                let axis = Axis::Gauss {
                    a: 0.0,
                    b: 1.0,
                    order,
                };
                // Duffy: t1 = u, t2 = (1 - u) v.
                apply_rule(&[axis, axis], &|p: &[f64]| {
                    let (u, v) = (p[0], p[1]);
                    let t1 = u;
                    let t2 = (1.0 - u) * v;
                    f(&[t1, t2, 1.0 - t1 - t2]) * (1.0 - u)
                })
            }
        }
    };
    let value = run(order);
    let coarse = run((order / 2).max(1));
    QuadResult {
        value,
        error_estimate: (value - coarse).norm(),
        nodes_used: order.pow(n as u32 - 1),
    }
}
