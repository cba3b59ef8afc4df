//! Grid-based carriers: ψ reparameterizations, Hilfer order parameters and
//! vector-valued trajectories with weighted-space semantics.
//!
//! Trajectories of the evolution problem live in the weighted space: the
//! quantity (t−t0)^{1−γ} u(t) is the one that stays continuous down to t0,
//! while u itself may blow up like (t−t0)^{γ−1}. Grids therefore start at
//! t0 + h when γ < 1 and interpolation happens in the weighted variable.

use crate::error::{Error, Result};
use crate::linalg::vec_norm;
use std::sync::Arc;

/// A strictly increasing reparameterization ψ with its derivative ψ′.
#[derive(Clone)]
pub struct PsiFunction {
    psi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    dpsi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for PsiFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("PsiFunction")
    }
}

impl PsiFunction {
    pub fn new(
        psi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dpsi: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { psi: Arc::new(psi), dpsi: Arc::new(dpsi) }
    }

    /// ψ(t) = t, the plain Riemann-Liouville/Hilfer case.
    pub fn identity() -> Self {
        Self::new(|t| t, |_| 1.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.psi)(t)
    }

    pub fn deriv(&self, t: f64) -> f64 {
        (self.dpsi)(t)
    }

    /// Monotonicity check on a concrete set of points. ψ′ is required to be
    /// positive strictly after the first point: the defining class only needs
    /// the derivative on the open interval (so ψ(t) = t² on [0, a] is fine).
    pub fn validate_on(&self, points: &[f64]) -> Result<()> {
        for w in points.windows(2) {
            if self.eval(w[1]) <= self.eval(w[0]) {
                return Err(Error::Hypothesis(format!(
                    "psi not strictly increasing between {} and {}",
                    w[0], w[1]
                )));
            }
        }
        for &p in points.iter().skip(1) {
            if !(self.deriv(p) > 0.0) {
                return Err(Error::Hypothesis(format!("psi' not positive at {p}")));
            }
        }
        Ok(())
    }
}

/// Hilfer order α ∈ (0,1], type β ∈ [0,1] and the derived γ = α + β(1−α).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl OrderParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let gamma = gamma_param(alpha, beta)?;
        Ok(Self { alpha, beta, gamma })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// γ = α + β(1−α).
pub fn gamma_param(alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("alpha {alpha} outside (0, 1]")));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::Domain(format!("beta {beta} outside [0, 1]")));
    }
    Ok(alpha + beta * (1.0 - alpha))
}

/// A vector-valued function sampled on a strictly increasing time grid.
///
/// `t0` is the left endpoint of the interval; the first node may coincide
/// with it only in the regular case (γ = 1 trajectories or plain test
/// functions). Singular trajectories keep τ₁ > t0.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    t0: f64,
    nodes: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl GridFunction {
    pub fn new(t0: f64, nodes: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Dimension("grid needs at least 2 nodes".into()));
        }
        if nodes.len() != values.len() {
            return Err(Error::Dimension(format!(
                "{} nodes vs {} value rows",
                nodes.len(),
                values.len()
            )));
        }
        if nodes[0] < t0 {
            return Err(Error::Domain("first node precedes t0".into()));
        }
        for w in nodes.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Domain("grid nodes must be strictly increasing".into()));
            }
        }
        let dim = values[0].len();
        if dim == 0 {
            return Err(Error::Dimension("empty state vectors".into()));
        }
        for v in &values {
            if v.len() != dim {
                return Err(Error::Dimension("inconsistent state dimension".into()));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Domain("grid values must be finite".into()));
            }
        }
        Ok(Self { t0, nodes, values })
    }

    pub fn from_fn(
        t0: f64,
        nodes: Vec<f64>,
        dim: usize,
        f: impl Fn(f64) -> Vec<f64>,
    ) -> Result<Self> {
        let values = nodes.iter().map(|&t| f(t)).collect::<Vec<_>>();
        let _ = dim;
        Self::new(t0, nodes, values)
    }

    pub fn scalar_from_fn(t0: f64, nodes: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(t0, nodes, 1, |t| vec![f(t)])
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.values
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn end(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Uniform nodes over [t0, t0+a]: t0 + k·a/n for k = 1..=n, optionally
    /// with t0 itself prepended (regular problems only).
    pub fn uniform_nodes(t0: f64, a: f64, n: usize, include_t0: bool) -> Vec<f64> {
        let h = a / n as f64;
        let mut nodes = Vec::with_capacity(n + 1);
        if include_t0 {
            nodes.push(t0);
        }
        for k in 1..=n {
            nodes.push(t0 + h * k as f64);
        }
        nodes
    }

    /// Plain piecewise-linear interpolation; constant extension on [t0, τ₁].
    pub fn interp_raw(&self, t: f64) -> Result<Vec<f64>> {
        if t < self.t0 - 1e-12 || t > self.end() + 1e-12 {
            return Err(Error::Domain(format!("time {t} outside grid span")));
        }
        if t <= self.nodes[0] {
            return Ok(self.values[0].clone());
        }
        let i = match self.nodes.binary_search_by(|a| a.partial_cmp(&t).unwrap()) {
            Ok(i) => return Ok(self.values[i].clone()),
            Err(i) => i,
        };
        let (lo, hi) = (i - 1, i.min(self.len() - 1));
        let w = (t - self.nodes[lo]) / (self.nodes[hi] - self.nodes[lo]);
        Ok(self.values[lo]
            .iter()
            .zip(&self.values[hi])
            .map(|(a, b)| a + w * (b - a))
            .collect())
    }

    /// Weighted value at node i: (τᵢ − t0)^{1−γ} · u(τᵢ).
    pub fn weighted_value(&self, i: usize, gamma: f64) -> Vec<f64> {
        let w = (self.nodes[i] - self.t0).powf(1.0 - gamma);
        self.values[i].iter().map(|x| w * x).collect()
    }

    /// Interpolation in the weighted variable: v(t) = (t−t0)^{1−γ} u(t) is
    /// interpolated linearly (constant on [t0, τ₁], where v is continuous),
    /// then mapped back through the (t−t0)^{γ−1} weight. This is the
    /// evaluation used for delayed arguments u(bᵢ(s)).
    pub fn interp_weighted(&self, t: f64, gamma: f64) -> Result<Vec<f64>> {
        if t <= self.t0 {
            if gamma < 1.0 {
                return Err(Error::Domain(format!(
                    "weighted interpolation at t = {t} <= t0 is singular for gamma < 1"
                )));
            }
            // gamma = 1: weight is identically 1
            return Ok(self.values[0].clone());
        }
        if t > self.end() + 1e-12 {
            return Err(Error::Domain(format!("time {t} outside grid span")));
        }
        let back = (t - self.t0).powf(gamma - 1.0);
        if t <= self.nodes[0] {
            let v = self.weighted_value(0, gamma);
            return Ok(v.iter().map(|x| x * back).collect());
        }
        let i = match self.nodes.binary_search_by(|a| a.partial_cmp(&t).unwrap()) {
            Ok(i) => return Ok(self.values[i].clone()),
            Err(i) => i,
        };
        let (lo, hi) = (i - 1, i.min(self.len() - 1));
        let vlo = self.weighted_value(lo, gamma);
        let vhi = self.weighted_value(hi, gamma);
        let w = (t - self.nodes[lo]) / (self.nodes[hi] - self.nodes[lo]);
        Ok(vlo
            .iter()
            .zip(&vhi)
            .map(|(a, b)| (a + w * (b - a)) * back)
            .collect())
    }
}

/// ‖u‖ in C_{1−γ}: max over nodes of (τᵢ − t0)^{1−γ} · |u(τᵢ)|₂.
///
/// The weight is shifted by t0 (the problem lives on [t0, t0+a]); with
/// γ = 1 this is the plain sup norm over the grid.
pub fn weighted_norm(f: &GridFunction, gamma: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Domain(format!("gamma {gamma} outside [0, 1]")));
    }
    Ok((0..f.len())
        .map(|i| {
            let w = (f.nodes()[i] - f.t0()).powf(1.0 - gamma);
            w * vec_norm(&f.values()[i])
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_param_cases() {
        assert_eq!(gamma_param(1.0, 0.3).unwrap(), 1.0);
        assert_eq!(gamma_param(0.5, 0.0).unwrap(), 0.5);
        assert_eq!(gamma_param(0.5, 1.0).unwrap(), 1.0);
        assert!(gamma_param(1.5, 0.0).is_err());
        assert!(gamma_param(0.5, -0.1).is_err());
    }

    #[test]
    fn order_params_range() {
        let op = OrderParams::new(0.6, 0.5).unwrap();
        assert_relative_eq!(op.gamma(), 0.8, max_relative = 1e-15);
        assert!(op.gamma() >= op.alpha() && op.gamma() <= 1.0);
        assert!(OrderParams::new(0.0, 0.5).is_err());
    }

    #[test]
    fn grid_invariants() {
        assert!(GridFunction::new(0.0, vec![0.5, 0.5], vec![vec![1.0], vec![1.0]]).is_err());
        assert!(GridFunction::new(0.0, vec![-0.1, 0.5], vec![vec![1.0], vec![1.0]]).is_err());
        assert!(GridFunction::new(0.0, vec![0.5], vec![vec![1.0]]).is_err());
        let g = GridFunction::new(0.0, vec![0.5, 1.0], vec![vec![1.0], vec![2.0]]).unwrap();
        assert_eq!(g.dim(), 1);
    }

    #[test]
    fn weighted_norm_cases() {
        let nodes = GridFunction::uniform_nodes(0.0, 1.0, 64, false);
        // gamma = 1: plain sup norm
        let f = GridFunction::scalar_from_fn(0.0, nodes.clone(), |t| t * t).unwrap();
        assert_relative_eq!(weighted_norm(&f, 1.0).unwrap(), 1.0, max_relative = 1e-14);
        // zero function
        let z = GridFunction::scalar_from_fn(0.0, nodes.clone(), |_| 0.0).unwrap();
        assert_eq!(weighted_norm(&z, 1.0).unwrap(), 0.0);
        // weight cancels the singularity exactly
        let s = GridFunction::scalar_from_fn(0.0, nodes, |t| t.powf(-0.5)).unwrap();
        assert_relative_eq!(weighted_norm(&s, 0.5).unwrap(), 1.0, max_relative = 1e-13);
    }

    #[test]
    fn weighted_norm_axioms() {
        let nodes = GridFunction::uniform_nodes(0.0, 1.0, 32, false);
        let f = GridFunction::scalar_from_fn(0.0, nodes.clone(), |t| (3.0 * t).sin()).unwrap();
        let g = GridFunction::scalar_from_fn(0.0, nodes.clone(), |t| t.exp()).unwrap();
        let gamma = 0.7;
        // absolute homogeneity
        let cf = GridFunction::scalar_from_fn(0.0, nodes.clone(), |t| -2.5 * (3.0 * t).sin())
            .unwrap();
        assert_relative_eq!(
            weighted_norm(&cf, gamma).unwrap(),
            2.5 * weighted_norm(&f, gamma).unwrap(),
            max_relative = 1e-13
        );
        // triangle inequality
        let sum = GridFunction::scalar_from_fn(0.0, nodes, |t| (3.0 * t).sin() + t.exp()).unwrap();
        assert!(
            weighted_norm(&sum, gamma).unwrap()
                <= weighted_norm(&f, gamma).unwrap() + weighted_norm(&g, gamma).unwrap() + 1e-14
        );
    }

    #[test]
    fn weighted_interp_recovers_singular_trajectory() {
        // u(t) = t^{γ-1} * (1 + t); weighted part v(t) = 1 + t is linear, so
        // weighted interpolation is exact between nodes
        let gamma = 0.6;
        let nodes = GridFunction::uniform_nodes(0.0, 1.0, 16, false);
        let u = GridFunction::scalar_from_fn(0.0, nodes, |t| t.powf(gamma - 1.0) * (1.0 + t))
            .unwrap();
        let t = 0.40625; // strictly between nodes
        let got = u.interp_weighted(t, gamma).unwrap()[0];
        assert_relative_eq!(got, t.powf(gamma - 1.0) * (1.0 + t), max_relative = 1e-12);
        // below the first node the weighted part is extended as a constant
        let t = 0.01;
        let got = u.interp_weighted(t, gamma).unwrap()[0];
        let v1 = (1.0f64 / 16.0).powf(1.0 - gamma) * (1.0f64 / 16.0).powf(gamma - 1.0)
            * (1.0 + 1.0 / 16.0);
        assert_relative_eq!(got, v1 * t.powf(gamma - 1.0), max_relative = 1e-12);
    }
}
