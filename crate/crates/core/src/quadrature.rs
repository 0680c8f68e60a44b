//! Gauss–Legendre rules on `[-1, 1]` and density-weighted tensor rules over
//! the random domain `[-1, 1]^N`.

use crate::error::{Error, Result};
use crate::legendre::legendre;

/// One-dimensional Gauss–Legendre rule on `[-1, 1]` with Lebesgue weights
/// (the weights sum to 2).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// `n`-point rule, exact for polynomials of degree `2n - 1`.
    ///
    /// Nodes are Newton-refined roots of `P_n` starting from the Chebyshev-like
    /// guess `cos(pi (i + 3/4) / (n + 1/2))`, returned in ascending order.
    pub fn legendre(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "a Gauss rule needs at least one node".into(),
            ));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut deriv = 1.0;
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                deriv = dp;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            if dp.is_finite() {
                deriv = dp;
            }
            let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate `f` over `[lo, hi]` with the rule mapped affinely.
    pub fn integrate(&self, lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// Tensor Gauss rule over `[-1, 1]^dims`, weighted by the uniform probability
/// density `2^-dims` so the weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorRule {
    dims: usize,
    /// Node coordinates, `dims` entries per node.
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl TensorRule {
    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, q: usize) -> &[f64] {
        &self.points[q * self.dims..(q + 1) * self.dims]
    }

    pub fn weight(&self, q: usize) -> f64 {
        self.weights[q]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Iterate over `(point, weight)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.points
            .chunks_exact(self.dims.max(1))
            .zip(self.weights.iter().copied())
    }

    /// Density-weighted expectation of `f`.
    pub fn expectation(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.iter().map(|(y, w)| w * f(y)).sum()
    }
}

/// Density-weighted tensor Gauss–Legendre rule with `n` nodes per dimension
/// over the random domain `[-1, 1]^dims`.
pub fn gauss_rule(n: usize, dims: usize) -> Result<TensorRule> {
    if dims == 0 {
        return Err(Error::InvalidArgument(
            "random domain needs at least one dimension".into(),
        ));
    }
    let line = GaussRule::legendre(n)?;
    let total = n.pow(dims as u32);
    let mut points = Vec::with_capacity(total * dims);
    let mut weights = Vec::with_capacity(total);
    let mut digits = vec![0usize; dims];
    for _ in 0..total {
        let mut w = 1.0;
        for &d in &digits {
            points.push(line.nodes[d]);
            w *= 0.5 * line.weights[d];
        }
        weights.push(w);
        // odometer, first dimension slowest
        for slot in digits.iter_mut().rev() {
            *slot += 1;
            if *slot < n {
                break;
            }
            *slot = 0;
        }
    }
    Ok(TensorRule {
        dims,
        points,
        weights,
    })
}
