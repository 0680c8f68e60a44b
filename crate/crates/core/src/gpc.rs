//! Generalized polynomial chaos basis over independent uniform inputs.
//!
//! Modes are indexed from zero; mode 0 is the constant polynomial, so the
//! coefficient of mode 0 of any expansion is its mean.

use crate::error::{Error, Result};
use crate::legendre::{legendre_with_derivatives, uniform_scale};
use crate::quadrature::{gauss_rule, TensorRule};

/// Total-degree multi-index set `{ alpha in N^dims : |alpha| <= order }`.
///
/// Indices are sorted by total degree, then in descending lexicographic
/// order, so the degree-one modes follow the dimension order:
/// `(0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndexSet {
    dims: usize,
    order: usize,
    indices: Vec<Vec<usize>>,
}

impl MultiIndexSet {
    pub fn new(dims: usize, order: usize) -> Result<Self> {
        if dims == 0 {
            return Err(Error::InvalidArgument(
                "multi-index set needs at least one dimension".into(),
            ));
        }
        let mut indices = Vec::new();
        for degree in 0..=order {
            let mut level = Vec::new();
            let mut current = vec![0usize; dims];
            compositions(degree, 0, &mut current, &mut level);
            level.sort_by(|a, b| b.cmp(a));
            indices.extend(level);
        }
        Ok(Self {
            dims,
            order,
            indices,
        })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of modes `M = binomial(dims + order, dims)`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn index(&self, m: usize) -> &[usize] {
        &self.indices[m]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.indices.iter().map(Vec::as_slice)
    }
}

/// Enumerate all length-`dims` tuples with component sum exactly `remaining`.
fn compositions(
    remaining: usize,
    slot: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if slot + 1 == current.len() {
        current[slot] = remaining;
        out.push(current.clone());
        return;
    }
    for take in 0..=remaining {
        current[slot] = take;
        compositions(remaining - take, slot + 1, current, out);
    }
    current[slot] = 0;
}

/// Univariate orthonormal family used along each random dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnivariateFamily {
    /// Normalized Legendre polynomials, orthonormal for the uniform density on `[-1, 1]`.
    #[default]
    Legendre,
}

/// The `N`-variate orthonormal basis `{Phi_m}` together with the quadrature
/// rule used for every random-space integral.
#[derive(Debug, Clone)]
pub struct GpcBasis {
    index_set: MultiIndexSet,
    family: UnivariateFamily,
    rule: TensorRule,
    /// `Phi_m` at every rule node, `len()` values per node.
    phi_at_nodes: Vec<f64>,
}

impl GpcBasis {
    /// Basis of total degree `order` in `dims` variables with the default
    /// `order + 5` quadrature nodes per dimension.
    pub fn new(dims: usize, order: usize) -> Result<Self> {
        Self::with_nodes(dims, order, order + 5)
    }

    pub fn with_nodes(dims: usize, order: usize, nodes_per_dim: usize) -> Result<Self> {
        let index_set = MultiIndexSet::new(dims, order)?;
        if nodes_per_dim < order + 1 {
            return Err(Error::InvalidArgument(format!(
                "{nodes_per_dim} nodes per dimension cannot resolve order-{order} products"
            )));
        }
        let rule = gauss_rule(nodes_per_dim, dims)?;
        let mut basis = Self {
            index_set,
            family: UnivariateFamily::Legendre,
            rule,
            phi_at_nodes: Vec::new(),
        };
        let m = basis.len();
        let mut table = vec![0.0; basis.rule.len() * m];
        for q in 0..basis.rule.len() {
            let y = basis.rule.point(q).to_vec();
            basis.eval_all(&y, &mut table[q * m..(q + 1) * m]);
        }
        basis.phi_at_nodes = table;
        Ok(basis)
    }

    pub fn index_set(&self) -> &MultiIndexSet {
        &self.index_set
    }

    pub fn family(&self) -> UnivariateFamily {
        self.family
    }

    pub fn dims(&self) -> usize {
        self.index_set.dims()
    }

    pub fn order(&self) -> usize {
        self.index_set.order()
    }

    /// Number of modes `M`.
    pub fn len(&self) -> usize {
        self.index_set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index_set.is_empty()
    }

    pub fn rule(&self) -> &TensorRule {
        &self.rule
    }

    /// Values `Phi_0..Phi_{M-1}` at quadrature node `q`.
    pub fn phi_at_node(&self, q: usize) -> &[f64] {
        let m = self.len();
        &self.phi_at_nodes[q * m..(q + 1) * m]
    }

    /// `Phi_m(y)`.
    pub fn eval(&self, m: usize, y: &[f64]) -> Result<f64> {
        if m >= self.len() {
            return Err(Error::ModeOutOfRange {
                index: m,
                size: self.len(),
            });
        }
        if y.len() != self.dims() {
            return Err(Error::ShapeMismatch(format!(
                "random point has {} components, basis has {} dimensions",
                y.len(),
                self.dims()
            )));
        }
        let order = self.order();
        let mut vals = vec![0.0; order + 1];
        let mut ders = vec![0.0; order + 1];
        let mut value = 1.0;
        for (d, &deg) in self.index_set.index(m).iter().enumerate() {
            legendre_with_derivatives(deg, y[d], &mut vals, &mut ders);
            value *= uniform_scale(deg) * vals[deg];
        }
        Ok(value)
    }

    /// All mode values at `y`, written into `out` (length `M`).
    pub fn eval_all(&self, y: &[f64], out: &mut [f64]) {
        let order = self.order();
        let dims = self.dims();
        let mut table = vec![0.0; dims * (order + 1)];
        let mut ders = vec![0.0; order + 1];
        for d in 0..dims {
            let row = &mut table[d * (order + 1)..(d + 1) * (order + 1)];
            legendre_with_derivatives(order, y[d], row, &mut ders);
            for (n, v) in row.iter_mut().enumerate() {
                *v *= uniform_scale(n);
            }
        }
        for (slot, alpha) in out.iter_mut().zip(self.index_set.iter()) {
            *slot = alpha
                .iter()
                .enumerate()
                .map(|(d, &deg)| table[d * (order + 1) + deg])
                .product();
        }
    }

    /// Galerkin coefficients `E[f Phi_m]` of a function of the random input.
    pub fn project(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        let m = self.len();
        let mut coeffs = vec![0.0; m];
        for (q, (y, w)) in self.rule.iter().enumerate() {
            let fw = w * f(y);
            for (c, phi) in coeffs.iter_mut().zip(self.phi_at_node(q)) {
                *c += fw * phi;
            }
        }
        coeffs
    }

    /// Evaluate the expansion `sum_m coeffs[m] Phi_m(y)`.
    pub fn evaluate_expansion(&self, coeffs: &[f64], y: &[f64]) -> f64 {
        let mut phi = vec![0.0; self.len()];
        self.eval_all(y, &mut phi);
        coeffs.iter().zip(&phi).map(|(c, p)| c * p).sum()
    }
}

/// `binomial(n, k)` in `u64`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}
