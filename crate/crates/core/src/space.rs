//! The polynomial-augmented RBF trial space.
//!
//! An interpolant from the space is
//!
//! u_N(x) = Σ_n α_n φ(ε‖x − x_n‖) + Σ_k β_k p_k(x),
//!
//! with the moment constraints Σ_n α_n p_k(x_n) = 0 for every polynomial basis
//! function. Fitting nodal data solves the symmetric saddle-point system
//!
//! ```text
//! [ Φ  Pᵀ ] [α]   [u]
//! [ P  0  ] [β] = [0]
//! ```
//!
//! whose factorization is performed once per space. All weak-form machinery
//! works in the cardinal (nodal) frame: ℓ_n is the element of the space with
//! ℓ_n(x_m) = δ_nm, obtained by solving against the N canonical unit
//! right-hand sides; those solutions are kept and reused for every
//! downstream evaluation.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kernels::{distance, Kernel};
use crate::Point;

/// Points closer than this are treated as duplicates.
const DUPLICATE_TOL: f64 = 1e-12;

/// Condition estimates past this threshold are logged as warnings.
const CONDITION_WARN: f64 = 1e12;

/// An interval or an axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Interval { a: f64, b: f64 },
    Rectangle { x: (f64, f64), y: (f64, f64) },
}

impl Domain {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidDomain(format!("need a < b, got [{a}, {b}]")));
        }
        Ok(Domain::Interval { a, b })
    }

    pub fn rectangle(x: (f64, f64), y: (f64, f64)) -> Result<Self> {
        if !(x.0 < x.1) || !(y.0 < y.1) {
            return Err(Error::InvalidDomain(format!(
                "need lower < upper per axis, got x = {x:?}, y = {y:?}"
            )));
        }
        Ok(Domain::Rectangle { x, y })
    }

    /// The square [a, b]².
    pub fn square(a: f64, b: f64) -> Result<Self> {
        Domain::rectangle((a, b), (a, b))
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Rectangle { .. } => 2,
        }
    }

    /// |Ω|: length in 1D, area in 2D.
    pub fn measure(&self) -> f64 {
        match *self {
            Domain::Interval { a, b } => b - a,
            Domain::Rectangle { x, y } => (x.1 - x.0) * (y.1 - y.0),
        }
    }

    /// Lower and upper bound along an axis.
    pub fn bounds(&self, axis: usize) -> (f64, f64) {
        match *self {
            Domain::Interval { a, b } => (a, b),
            Domain::Rectangle { x, y } => {
                if axis == 0 {
                    x
                } else {
                    y
                }
            }
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        match *self {
            Domain::Interval { a, b } => p[0] >= a && p[0] <= b,
            Domain::Rectangle { x, y } => p[0] >= x.0 && p[0] <= x.1 && p[1] >= y.0 && p[1] <= y.1,
        }
    }

    fn midpoint(&self, axis: usize) -> f64 {
        let (lo, hi) = self.bounds(axis);
        0.5 * (lo + hi)
    }

    fn half_width(&self, axis: usize) -> f64 {
        let (lo, hi) = self.bounds(axis);
        0.5 * (hi - lo)
    }
}

/// The centers of an RBF space, all inside their domain and pairwise distinct.
/// One-dimensional node sets are kept sorted ascending.
#[derive(Debug, Clone)]
pub struct NodeSet {
    points: Vec<Point>,
    domain: Domain,
}

impl NodeSet {
    pub fn new(mut points: Vec<Point>, domain: Domain) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidNodes("node set is empty".into()));
        }
        for p in &points {
            if !p[0].is_finite() || !p[1].is_finite() {
                return Err(Error::InvalidNodes("non-finite node coordinate".into()));
            }
            if !domain.contains(*p) {
                return Err(Error::InvalidNodes(format!(
                    "node {p:?} lies outside the domain"
                )));
            }
        }
        if domain.dim() == 1 {
            points.sort_by(|a, b| a[0].total_cmp(&b[0]));
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if distance(points[i], points[j]) < DUPLICATE_TOL {
                    return Err(Error::InvalidNodes(format!(
                        "duplicate centers at {:?}",
                        points[i]
                    )));
                }
            }
        }
        Ok(NodeSet { points, domain })
    }

    /// Equispaced nodes including the domain endpoints. In 2D `n` must be a
    /// perfect square; the grid is the tensor product of per-axis lines.
    pub fn equidistant(domain: Domain, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidNodes("node set is empty".into()));
        }
        let points = match domain {
            Domain::Interval { a, b } => linspace(a, b, n).map(|x| [x, 0.0]).collect(),
            Domain::Rectangle { x, y } => {
                let m = (n as f64).sqrt().round() as usize;
                if m * m != n {
                    return Err(Error::InvalidNodes(format!(
                        "equidistant 2D node count must be a perfect square, got {n}"
                    )));
                }
                let xs: Vec<f64> = linspace(x.0, x.1, m).collect();
                let ys: Vec<f64> = linspace(y.0, y.1, m).collect();
                let mut pts = Vec::with_capacity(n);
                for &xi in &xs {
                    for &yj in &ys {
                        pts.push([xi, yj]);
                    }
                }
                pts
            }
        };
        NodeSet::new(points, domain)
    }

    /// Uniform i.i.d. nodes from a seeded generator, rejecting duplicates
    /// closer than 1e-12 and sorting in 1D. Reproducible across platforms.
    pub fn random(domain: Domain, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidNodes("node set is empty".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points: Vec<Point> = Vec::with_capacity(n);
        let mut attempts = 0usize;
        while points.len() < n {
            attempts += 1;
            if attempts > 1000 * n {
                return Err(Error::InvalidNodes(
                    "could not draw enough distinct random nodes".into(),
                ));
            }
            let (x0, x1) = domain.bounds(0);
            let p = match domain.dim() {
                1 => [rng.gen_range(x0..=x1), 0.0],
                _ => {
                    let (y0, y1) = domain.bounds(1);
                    [rng.gen_range(x0..=x1), rng.gen_range(y0..=y1)]
                }
            };
            if points.iter().all(|&q| distance(p, q) >= DUPLICATE_TOL) {
                points.push(p);
            }
        }
        NodeSet::new(points, domain)
    }

    /// Loads nodes from a plain-text file, one point per line with
    /// whitespace-separated coordinates. Empty lines and `#` comments are
    /// skipped.
    pub fn from_file(path: impl AsRef<std::path::Path>, domain: Domain) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let coords: Vec<f64> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>().map_err(|_| {
                        Error::InvalidNodes(format!("bad number '{t}' on line {}", lineno + 1))
                    })
                })
                .collect::<Result<_>>()?;
            if coords.len() != domain.dim() {
                return Err(Error::InvalidNodes(format!(
                    "line {} has {} coordinates, domain is {}D",
                    lineno + 1,
                    coords.len(),
                    domain.dim()
                )));
            }
            points.push([coords[0], *coords.get(1).unwrap_or(&0.0)]);
        }
        NodeSet::new(points, domain)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    let h = if n > 1 { (b - a) / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |i| {
        if i + 1 == n && n > 1 {
            b
        } else {
            a + h * i as f64
        }
    })
}

/// Monomial basis of total degree ≤ P−1, centered at the domain midpoint and
/// scaled by the half-widths to control conditioning at larger P.
#[derive(Debug, Clone)]
struct PolyBasis {
    exps: Vec<[u32; 2]>,
    center: Point,
    scale: Point,
}

impl PolyBasis {
    fn new(domain: &Domain, poly_count: usize) -> Self {
        let dim = domain.dim();
        let mut exps = Vec::new();
        for total in 0..poly_count as u32 {
            if dim == 1 {
                exps.push([total, 0]);
            } else {
                for i in (0..=total).rev() {
                    exps.push([i, total - i]);
                }
            }
        }
        let center = [
            domain.midpoint(0),
            if dim == 2 { domain.midpoint(1) } else { 0.0 },
        ];
        let scale = [
            domain.half_width(0),
            if dim == 2 { domain.half_width(1) } else { 1.0 },
        ];
        PolyBasis {
            exps,
            center,
            scale,
        }
    }

    fn len(&self) -> usize {
        self.exps.len()
    }

    fn eval(&self, k: usize, p: Point) -> f64 {
        let [ex, ey] = self.exps[k];
        let sx = (p[0] - self.center[0]) / self.scale[0];
        let sy = (p[1] - self.center[1]) / self.scale[1];
        sx.powi(ex as i32) * sy.powi(ey as i32)
    }

    fn eval_deriv(&self, k: usize, p: Point, axis: usize) -> f64 {
        let [ex, ey] = self.exps[k];
        let e = if axis == 0 { ex } else { ey };
        if e == 0 {
            return 0.0;
        }
        let sx = (p[0] - self.center[0]) / self.scale[0];
        let sy = (p[1] - self.center[1]) / self.scale[1];
        let (fx, fy) = if axis == 0 {
            (
                f64::from(e) * sx.powi(ex as i32 - 1) / self.scale[0],
                sy.powi(ey as i32),
            )
        } else {
            (
                sx.powi(ex as i32),
                f64::from(e) * sy.powi(ey as i32 - 1) / self.scale[1],
            )
        };
        fx * fy
    }
}

/// The assembled and factorized trial space V_{N,P}.
#[derive(Debug, Clone)]
pub struct RbfSpace {
    kernel: Kernel,
    nodes: NodeSet,
    poly_count: usize,
    poly: PolyBasis,
    /// (N+K) × N solutions of the saddle system against the unit nodal data;
    /// column n holds the coefficients of the cardinal function ℓ_n.
    cardinal_coeffs: DMatrix<f64>,
    condition: f64,
}

/// Number of polynomial basis functions for a given P and dimension.
pub fn poly_basis_size(poly_count: usize, dim: usize) -> usize {
    if dim == 1 {
        poly_count
    } else {
        poly_count * (poly_count + 1) / 2
    }
}

/// Assembles and factorizes the saddle-point system for the given kernel,
/// centers and polynomial degree, solving once for the cardinal coefficients.
pub fn build_space(kernel: Kernel, nodes: NodeSet, poly_count: usize) -> Result<RbfSpace> {
    let n = nodes.len();
    let dim = nodes.domain().dim();
    let poly = PolyBasis::new(nodes.domain(), poly_count);
    let k = poly.len();
    debug_assert_eq!(k, poly_basis_size(poly_count, dim));
    if poly_count >= 1 && dim == 1 && n < k {
        return Err(Error::InvalidNodes(format!(
            "{n} nodes cannot be unisolvent for {k} polynomial basis functions"
        )));
    }

    let size = n + k;
    let mut v = DMatrix::<f64>::zeros(size, size);
    for i in 0..n {
        for j in 0..n {
            v[(i, j)] = kernel.value(distance(nodes.points()[i], nodes.points()[j]));
        }
    }
    for kk in 0..k {
        for j in 0..n {
            let val = poly.eval(kk, nodes.points()[j]);
            v[(j, n + kk)] = val;
            v[(n + kk, j)] = val;
        }
    }

    let norm1 = matrix_norm1(&v);
    let lu = v.clone().lu();
    let inv = lu.try_inverse().filter(|m| m.iter().all(|x| x.is_finite()));
    let condition = match &inv {
        Some(m) => norm1 * matrix_norm1(m),
        None => f64::INFINITY,
    };
    if inv.is_none() {
        return Err(Error::Factorization {
            what: "saddle system",
            condition,
        });
    }
    if condition > CONDITION_WARN {
        log::warn!(
            "saddle system condition estimate {condition:.3e} exceeds {CONDITION_WARN:.0e} \
             (N = {n}, P = {poly_count})"
        );
    }

    let mut rhs = DMatrix::<f64>::zeros(size, n);
    for i in 0..n {
        rhs[(i, i)] = 1.0;
    }
    let cardinal_coeffs = lu.solve(&rhs).ok_or(Error::Factorization {
        what: "saddle system",
        condition,
    })?;

    Ok(RbfSpace {
        kernel,
        nodes,
        poly_count,
        poly,
        cardinal_coeffs,
        condition,
    })
}

impl RbfSpace {
    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn domain(&self) -> &Domain {
        self.nodes.domain()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// P: 0 means no polynomial tail, 1 constants, P reproduces degree P−1.
    pub fn poly_count(&self) -> usize {
        self.poly_count
    }

    /// Number of polynomial basis functions K.
    pub fn poly_len(&self) -> usize {
        self.poly.len()
    }

    /// 1-norm condition estimate of the saddle matrix.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Row [φ(ε‖p − x_1‖) … φ(ε‖p − x_N‖), p_1(p) … p_K(p)].
    fn basis_row(&self, p: Point, out: &mut [f64]) {
        let n = self.nodes.len();
        for (j, &xj) in self.nodes.points().iter().enumerate() {
            out[j] = self.kernel.value(distance(p, xj));
        }
        for k in 0..self.poly.len() {
            out[n + k] = self.poly.eval(k, p);
        }
    }

    fn basis_row_deriv(&self, p: Point, axis: usize, out: &mut [f64]) -> Result<()> {
        let n = self.nodes.len();
        for (j, &xj) in self.nodes.points().iter().enumerate() {
            out[j] = self.kernel.gradient(p, xj)?[axis];
        }
        for k in 0..self.poly.len() {
            out[n + k] = self.poly.eval_deriv(k, p, axis);
        }
        Ok(())
    }

    /// Entry (m, n) = ℓ_n at the m-th query point: every cardinal function
    /// evaluated at
    /// every point. For P ≥ 1 each row sums to 1 (constants are reproduced).
    pub fn cardinal_matrix(&self, points: &[Point]) -> DMatrix<f64> {
        let width = self.nodes.len() + self.poly.len();
        let mut row = vec![0.0; width];
        let mut a = DMatrix::<f64>::zeros(points.len(), width);
        for (m, &p) in points.iter().enumerate() {
            self.basis_row(p, &mut row);
            for (j, &v) in row.iter().enumerate() {
                a[(m, j)] = v;
            }
        }
        a * &self.cardinal_coeffs
    }

    /// Entry (m, n) = ∂ℓ_n/∂axis at the m-th query point. For P ≥ 1 rows
    /// sum to 0.
    pub fn cardinal_derivative_matrix(
        &self,
        points: &[Point],
        axis: usize,
    ) -> Result<DMatrix<f64>> {
        if axis >= self.domain().dim() {
            return Err(Error::InvalidArgument(format!(
                "axis {axis} out of range for a {}D domain",
                self.domain().dim()
            )));
        }
        let width = self.nodes.len() + self.poly.len();
        let mut row = vec![0.0; width];
        let mut a = DMatrix::<f64>::zeros(points.len(), width);
        for (m, &p) in points.iter().enumerate() {
            self.basis_row_deriv(p, axis, &mut row)?;
            for (j, &v) in row.iter().enumerate() {
                a[(m, j)] = v;
            }
        }
        Ok(a * &self.cardinal_coeffs)
    }

    /// Fits the interpolant through the given nodal values.
    pub fn fit(&self, nodal_values: &[f64]) -> Result<Interpolant<'_>> {
        let n = self.nodes.len();
        if nodal_values.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: nodal_values.len(),
            });
        }
        let u = DVector::from_column_slice(nodal_values);
        let coeffs = &self.cardinal_coeffs * u;
        let alpha = DVector::from_fn(n, |i, _| coeffs[i]);
        let beta = DVector::from_fn(self.poly.len(), |k, _| coeffs[n + k]);
        Ok(Interpolant {
            space: self,
            alpha,
            beta,
        })
    }
}

/// A fitted element of the space, in coefficient form.
#[derive(Debug, Clone)]
pub struct Interpolant<'a> {
    space: &'a RbfSpace,
    alpha: DVector<f64>,
    beta: DVector<f64>,
}

impl Interpolant<'_> {
    pub fn alpha(&self) -> &DVector<f64> {
        &self.alpha
    }

    pub fn beta(&self) -> &DVector<f64> {
        &self.beta
    }

    /// Largest violation of the moment constraints Σ_n α_n p_k(x_n) = 0.
    pub fn constraint_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for k in 0..self.space.poly.len() {
            let mut s = 0.0;
            for (n, &x) in self.space.nodes.points().iter().enumerate() {
                s += self.alpha[n] * self.space.poly.eval(k, x);
            }
            worst = worst.max(s.abs());
        }
        worst
    }

    pub fn evaluate(&self, points: &[Point]) -> Vec<f64> {
        if points.iter().any(|&p| !self.space.domain().contains(p)) {
            log::debug!("evaluating an interpolant outside its domain");
        }
        points
            .iter()
            .map(|&p| {
                let mut s = 0.0;
                for (n, &xn) in self.space.nodes.points().iter().enumerate() {
                    s += self.alpha[n] * self.space.kernel.value(distance(p, xn));
                }
                for k in 0..self.space.poly.len() {
                    s += self.beta[k] * self.space.poly.eval(k, p);
                }
                s
            })
            .collect()
    }

    /// Exact partial derivative of the interpolant along an axis.
    pub fn evaluate_derivative(&self, points: &[Point], axis: usize) -> Result<Vec<f64>> {
        if axis >= self.space.domain().dim() {
            return Err(Error::InvalidArgument(format!(
                "axis {axis} out of range for a {}D domain",
                self.space.domain().dim()
            )));
        }
        points
            .iter()
            .map(|&p| {
                let mut s = 0.0;
                for (n, &xn) in self.space.nodes.points().iter().enumerate() {
                    s += self.alpha[n] * self.space.kernel.gradient(p, xn)?[axis];
                }
                for k in 0..self.space.poly.len() {
                    s += self.beta[k] * self.space.poly.eval_deriv(k, p, axis);
                }
                Ok(s)
            })
            .collect()
    }
}

fn matrix_norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}
