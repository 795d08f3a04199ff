//! Quadrature rules used by the weak-form assembly.
//!
//! One-dimensional trapezoidal, Gauss–Legendre and Gauss–Lobatto rules, their
//! two-dimensional tensor products on rectangles, and a node-aligned composite
//! Gauss–Legendre rule that serves as the "reference" (exact-for-practical-
//! purposes) rule: splitting the panels at the RBF centers keeps polyharmonic
//! integrands analytic inside every panel, so the composite rule converges
//! spectrally where a single global panel only converges algebraically.

use crate::error::{Error, Result};
use crate::Point;

/// Gauss nodes/weights are polished to this tolerance by Newton iteration.
const NEWTON_TOL: f64 = 1e-14;

/// Points per panel of the node-aligned composite reference rule.
pub const REFERENCE_POINTS_PER_PANEL: usize = 16;

/// A fixed set of nodes and weights on an interval or a rectangle.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    nodes: Vec<Point>,
    weights: Vec<f64>,
    /// Highest polynomial degree integrated exactly (per axis for tensor
    /// rules), if the rule has one.
    exactness: Option<u32>,
    dim: usize,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn exactness(&self) -> Option<u32> {
        self.exactness
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Σ w_q f(x_q). Errors if f is non-finite at a node.
    pub fn integrate<F: Fn(Point) -> f64>(&self, f: F) -> Result<f64> {
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(*x);
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    context: "integrand",
                    location: Some(*x),
                });
            }
            acc += w * v;
        }
        Ok(acc)
    }
}

/// Composite trapezoidal rule with J equispaced nodes including the endpoints.
pub fn trapezoid_rule(a: f64, b: f64, j: usize) -> Result<QuadratureRule> {
    check_interval(a, b)?;
    if j < 2 {
        return Err(Error::InvalidArgument(format!(
            "trapezoid rule needs J >= 2, got {j}"
        )));
    }
    let h = (b - a) / (j - 1) as f64;
    let nodes: Vec<Point> = (0..j).map(|i| [a + h * i as f64, 0.0]).collect();
    let mut weights = vec![h; j];
    weights[0] = 0.5 * h;
    weights[j - 1] = 0.5 * h;
    Ok(QuadratureRule {
        nodes,
        weights,
        exactness: Some(1),
        dim: 1,
    })
}

/// Gauss–Legendre rule with J nodes, exact up to degree 2J − 1.
pub fn gauss_legendre_rule(a: f64, b: f64, j: usize) -> Result<QuadratureRule> {
    check_interval(a, b)?;
    if j < 1 {
        return Err(Error::InvalidArgument(
            "Gauss-Legendre rule needs J >= 1".into(),
        ));
    }
    let (x, w) = gauss_legendre_unit(j);
    let (nodes, weights) = map_to_interval(&x, &w, a, b);
    Ok(QuadratureRule {
        nodes,
        weights,
        exactness: Some(2 * j as u32 - 1),
        dim: 1,
    })
}

/// Gauss–Lobatto rule with J nodes including both endpoints, exact up to 2J − 3.
pub fn gauss_lobatto_rule(a: f64, b: f64, j: usize) -> Result<QuadratureRule> {
    check_interval(a, b)?;
    if j < 2 {
        return Err(Error::InvalidArgument(format!(
            "Gauss-Lobatto rule needs J >= 2, got {j}"
        )));
    }
    let (x, w) = gauss_lobatto_unit(j);
    let (nodes, weights) = map_to_interval(&x, &w, a, b);
    Ok(QuadratureRule {
        nodes,
        weights,
        exactness: Some(2 * j as u32 - 3),
        dim: 1,
    })
}

/// Composite Gauss–Legendre rule with panels between consecutive breakpoints.
///
/// Used as the reference rule with panels split at the RBF centers (plus the
/// domain endpoints), where the assembly integrands are piecewise analytic.
pub fn composite_gauss_legendre(
    breakpoints: &[f64],
    points_per_panel: usize,
) -> Result<QuadratureRule> {
    if breakpoints.len() < 2 {
        return Err(Error::InvalidArgument(
            "composite rule needs at least two breakpoints".into(),
        ));
    }
    if breakpoints.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidArgument(
            "breakpoints must be strictly increasing".into(),
        ));
    }
    let (x, w) = gauss_legendre_unit(points_per_panel);
    let mut nodes = Vec::with_capacity(points_per_panel * (breakpoints.len() - 1));
    let mut weights = Vec::with_capacity(nodes.capacity());
    for panel in breakpoints.windows(2) {
        let (n, mut wts) = map_to_interval(&x, &w, panel[0], panel[1]);
        nodes.extend(n);
        weights.append(&mut wts);
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        exactness: Some(2 * points_per_panel as u32 - 1),
        dim: 1,
    })
}

/// Tensor product of two 1D rules; nodes are ordered x-major.
pub fn tensor_product(rx: &QuadratureRule, ry: &QuadratureRule) -> Result<QuadratureRule> {
    if rx.dim != 1 || ry.dim != 1 {
        return Err(Error::InvalidArgument(
            "tensor_product takes two 1D rules".into(),
        ));
    }
    let mut nodes = Vec::with_capacity(rx.len() * ry.len());
    let mut weights = Vec::with_capacity(rx.len() * ry.len());
    for (xi, wx) in rx.nodes.iter().zip(&rx.weights) {
        for (yj, wy) in ry.nodes.iter().zip(&ry.weights) {
            nodes.push([xi[0], yj[0]]);
            weights.push(wx * wy);
        }
    }
    let exactness = match (rx.exactness, ry.exactness) {
        (Some(dx), Some(dy)) => Some(dx.min(dy)),
        _ => None,
    };
    Ok(QuadratureRule {
        nodes,
        weights,
        exactness,
        dim: 2,
    })
}

/// Quadrature selection as named on the command line:
/// `trapezoid:J | gauss:J | lobatto:J | reference`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureSpec {
    Trapezoid(usize),
    Gauss(usize),
    Lobatto(usize),
    Reference,
}

impl std::str::FromStr for QuadratureSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "reference" {
            return Ok(QuadratureSpec::Reference);
        }
        let (name, j) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("bad quadrature spec '{s}'")))?;
        let j: usize = j
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad point count in '{s}'")))?;
        match name {
            "trapezoid" => Ok(QuadratureSpec::Trapezoid(j)),
            "gauss" => Ok(QuadratureSpec::Gauss(j)),
            "lobatto" => Ok(QuadratureSpec::Lobatto(j)),
            _ => Err(Error::InvalidArgument(format!(
                "unknown quadrature '{name}'"
            ))),
        }
    }
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a < b) {
        return Err(Error::InvalidArgument(format!(
            "need a < b, got [{a}, {b}]"
        )));
    }
    Ok(())
}

fn map_to_interval(x: &[f64], w: &[f64], a: f64, b: f64) -> (Vec<Point>, Vec<f64>) {
    let c = 0.5 * (a + b);
    let s = 0.5 * (b - a);
    let nodes = x.iter().map(|&xi| [c + s * xi, 0.0]).collect();
    let weights = w.iter().map(|&wi| s * wi).collect();
    (nodes, weights)
}

/// Legendre P_j(x) and its derivative by the three-term recurrence.
fn legendre_with_deriv(j: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if j == 0 {
        return (1.0, 0.0);
    }
    for n in 1..j {
        let nf = n as f64;
        let p2 = ((2.0 * nf + 1.0) * x * p1 - nf * p0) / (nf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    // P'_j from P_j and P_{j-1}
    let dp = j as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss–Legendre nodes/weights on [−1, 1] by Newton iteration, symmetrized.
fn gauss_legendre_unit(j: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; j];
    let mut w = vec![0.0; j];
    let half = j / 2;
    for i in 0..half {
        // Chebyshev-based initial guess for the i-th root from the left
        let mut xi = -(std::f64::consts::PI * (i as f64 + 0.75) / (j as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_deriv(j, xi);
            let dx = p / dp;
            xi -= dx;
            if dx.abs() < NEWTON_TOL {
                break;
            }
        }
        let (_, dp) = legendre_with_deriv(j, xi);
        let wi = 2.0 / ((1.0 - xi * xi) * dp * dp);
        x[i] = xi;
        x[j - 1 - i] = -xi;
        w[i] = wi;
        w[j - 1 - i] = wi;
    }
    if j % 2 == 1 {
        let (_, dp) = legendre_with_deriv(j, 0.0);
        x[half] = 0.0;
        w[half] = 2.0 / (dp * dp);
    }
    (x, w)
}

/// Gauss–Lobatto nodes/weights on [−1, 1]: endpoints plus the roots of P'_{J−1}.
fn gauss_lobatto_unit(j: usize) -> (Vec<f64>, Vec<f64>) {
    let n = j - 1;
    let mut x = vec![0.0; j];
    let mut w = vec![0.0; j];
    x[0] = -1.0;
    x[j - 1] = 1.0;
    let endpoint_w = 2.0 / (j as f64 * n as f64);
    w[0] = endpoint_w;
    w[j - 1] = endpoint_w;
    let interior = j - 2;
    let half = interior / 2;
    for i in 0..half {
        // interior Chebyshev–Lobatto points as initial guesses
        let mut xi = -(std::f64::consts::PI * (i + 1) as f64 / n as f64).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_deriv(n, xi);
            // P''_n from the Legendre differential equation
            let ddp = (2.0 * xi * dp - (n * (n + 1)) as f64 * p) / (1.0 - xi * xi);
            let dx = dp / ddp;
            xi -= dx;
            if dx.abs() < NEWTON_TOL {
                break;
            }
        }
        let (p, _) = legendre_with_deriv(n, xi);
        let wi = 2.0 / (j as f64 * n as f64 * p * p);
        x[1 + i] = xi;
        x[j - 2 - i] = -xi;
        w[1 + i] = wi;
        w[j - 2 - i] = wi;
    }
    if interior % 2 == 1 {
        let (p, _) = legendre_with_deriv(n, 0.0);
        x[1 + half] = 0.0;
        w[1 + half] = 2.0 / (j as f64 * n as f64 * p * p);
    }
    (x, w)
}
