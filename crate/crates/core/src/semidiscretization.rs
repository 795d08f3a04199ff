//! Weak and strong semidiscretizations in the cardinal basis.
//!
//! With nodal values u as the unknowns and ℓ_n the cardinal functions, the
//! weak collocation form reads
//!
//! M u̇ = B f(u) − (f^num_R r − f^num_L l),
//!
//! where M_mn = ∫ ℓ_m ℓ_n, B_mn = ∫ ℓ'_m ℓ_n, and l, r evaluate the test
//! functions at the boundary. All integrals are approximated by one
//! quadrature rule: with E and E' the cardinal (derivative) values at the
//! quadrature nodes and W the weights, M = EᵀWE and B = E'ᵀWE. The weak
//! analytical form replaces the interpolated flux B f(u) by the quadrature of
//! f ∘ u_N against ℓ'_m. The strong form collocates u̇ = −f(u)_x at the
//! centers through the differentiation matrix and needs no quadrature.
//!
//! Exactly integrated, B + Bᵀ = rrᵀ − llᵀ (integration by parts); the largest
//! violation of this identity is recorded per assembly as the quadrature
//! defect τ_q.

use std::io::Write;
use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::fluxes::NumericalFlux;
use crate::problems::{BoundaryCondition, Problem, ProblemFlux};
use crate::quadrature::QuadratureRule;
use crate::space::RbfSpace;
use crate::time_integration::Rhs;
use crate::Point;

/// Condition estimates past this threshold are logged as warnings.
const CONDITION_WARN: f64 = 1e12;

/// Cardinal values and derivatives at the volume quadrature nodes, kept for
/// the analytical flux form.
#[derive(Debug, Clone)]
struct QuadratureEvaluation {
    values: DMatrix<f64>,
    derivs: DMatrix<f64>,
    weights: DVector<f64>,
}

/// Boundary coupling data.
#[derive(Debug, Clone)]
enum BoundaryOperator {
    /// ℓ_m(a) and ℓ_m(b).
    Interval {
        left: DVector<f64>,
        right: DVector<f64>,
    },
    /// Quadrature tables over the four edges: west, east, south, north.
    Rectangle { edges: Vec<EdgeQuadrature> },
}

#[derive(Debug, Clone)]
struct EdgeQuadrature {
    /// Cardinal values at the edge quadrature nodes.
    values: DMatrix<f64>,
    weights: DVector<f64>,
    /// Axis of the edge normal (0 for west/east, 1 for south/north).
    axis: usize,
    /// Outward normal sign along that axis.
    outward: f64,
    /// Index of the periodically wrapped opposite edge.
    opposite: usize,
}

/// The assembled weak operator: mass and advection matrices, boundary
/// evaluations, load vector and the factorized mass matrix.
#[derive(Debug, Clone)]
pub struct WeakOperator {
    space: Arc<RbfSpace>,
    rule: QuadratureRule,
    mass: DMatrix<f64>,
    mass_chol: Cholesky<f64, Dyn>,
    mass_condition: f64,
    /// B per axis: one matrix in 1D, x then y in 2D.
    advection: Vec<DMatrix<f64>>,
    boundary: BoundaryOperator,
    /// w = M·1, so that wᵀu = ∫ u_N for P ≥ 1.
    load: DVector<f64>,
    /// Σ_q w_q ℓ_n(x_q): quadrature of the interpolant for any P.
    interp_load: DVector<f64>,
    quad_eval: Option<QuadratureEvaluation>,
    tau_q: f64,
}

/// Assembles the weak operator on a 1D space.
pub fn assemble_weak_operator(space: Arc<RbfSpace>, rule: QuadratureRule) -> Result<WeakOperator> {
    if space.domain().dim() != 1 {
        return Err(Error::InvalidArgument(
            "assemble_weak_operator takes a 1D space; use assemble_weak_operator_2d".into(),
        ));
    }
    if rule.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            actual: rule.dim(),
        });
    }
    let e = space.cardinal_matrix(rule.nodes());
    let ed = space.cardinal_derivative_matrix(rule.nodes(), 0)?;
    let weights = DVector::from_column_slice(rule.weights());
    let we = scale_rows(&e, &weights);

    let mass = symmetrize(e.transpose() * &we);
    let advection = ed.transpose() * &we;

    let (a, b) = space.domain().bounds(0);
    let left = row_vector(&space.cardinal_matrix(&[[a, 0.0]]));
    let right = row_vector(&space.cardinal_matrix(&[[b, 0.0]]));

    // SBP defect: B + Bᵀ − (rrᵀ − llᵀ)
    let mut defect = &advection + advection.transpose();
    defect -= &right * right.transpose();
    defect += &left * left.transpose();
    let tau_q = defect.amax();

    let (mass_chol, mass_condition) = factorize_mass(&mass, space.len(), space.poly_count())?;
    let load = &mass * DVector::from_element(space.len(), 1.0);
    let interp_load = we.row_sum().transpose();

    Ok(WeakOperator {
        space,
        rule,
        mass,
        mass_chol,
        mass_condition,
        advection: vec![advection],
        boundary: BoundaryOperator::Interval { left, right },
        load,
        interp_load,
        quad_eval: Some(QuadratureEvaluation {
            values: e,
            derivs: ed,
            weights,
        }),
        tau_q,
    })
}

/// Assembles the weak operator on a 2D rectangle from per-axis 1D rules; the
/// volume rule is their tensor product and each edge reuses the rule of its
/// free axis.
pub fn assemble_weak_operator_2d(
    space: Arc<RbfSpace>,
    rule_x: &QuadratureRule,
    rule_y: &QuadratureRule,
) -> Result<WeakOperator> {
    if space.domain().dim() != 2 {
        return Err(Error::InvalidArgument(
            "assemble_weak_operator_2d takes a 2D space".into(),
        ));
    }
    let rule = crate::quadrature::tensor_product(rule_x, rule_y)?;
    let n = space.len();

    // accumulate EᵀWE and E'ᵀWE over fixed-size quadrature blocks; tensor
    // rules can run to millions of nodes and the full evaluation matrices
    // would not fit in memory
    const BLOCK: usize = 4096;
    let mut mass = DMatrix::<f64>::zeros(n, n);
    let mut bx = DMatrix::<f64>::zeros(n, n);
    let mut by = DMatrix::<f64>::zeros(n, n);
    let mut interp_load_acc = DVector::<f64>::zeros(n);
    let mut start = 0;
    while start < rule.len() {
        let end = (start + BLOCK).min(rule.len());
        let pts = &rule.nodes()[start..end];
        let w = DVector::from_column_slice(&rule.weights()[start..end]);
        let e = space.cardinal_matrix(pts);
        let we = scale_rows(&e, &w);
        mass += e.transpose() * &we;
        bx += space.cardinal_derivative_matrix(pts, 0)?.transpose() * &we;
        by += space.cardinal_derivative_matrix(pts, 1)?.transpose() * &we;
        interp_load_acc += we.row_sum().transpose();
        start = end;
    }
    let mass = symmetrize(mass);

    let (x0, x1) = space.domain().bounds(0);
    let (y0, y1) = space.domain().bounds(1);
    let edge = |pts: Vec<Point>, w: &QuadratureRule, axis: usize, outward: f64, opposite: usize| {
        EdgeQuadrature {
            values: space.cardinal_matrix(&pts),
            weights: DVector::from_column_slice(w.weights()),
            axis,
            outward,
            opposite,
        }
    };
    let west_pts: Vec<Point> = rule_y.nodes().iter().map(|p| [x0, p[0]]).collect();
    let east_pts: Vec<Point> = rule_y.nodes().iter().map(|p| [x1, p[0]]).collect();
    let south_pts: Vec<Point> = rule_x.nodes().iter().map(|p| [p[0], y0]).collect();
    let north_pts: Vec<Point> = rule_x.nodes().iter().map(|p| [p[0], y1]).collect();
    let edges = vec![
        edge(west_pts, rule_y, 0, -1.0, 1),
        edge(east_pts, rule_y, 0, 1.0, 0),
        edge(south_pts, rule_x, 1, -1.0, 3),
        edge(north_pts, rule_x, 1, 1.0, 2),
    ];

    // per-axis SBP defect against the edge quadratures
    let mut tau_q = 0.0_f64;
    for (bmat, (lo, hi)) in [(&bx, (0usize, 1usize)), (&by, (2, 3))] {
        let mut defect = bmat + bmat.transpose();
        defect -= edges[hi].values.transpose() * scale_rows(&edges[hi].values, &edges[hi].weights);
        defect += edges[lo].values.transpose() * scale_rows(&edges[lo].values, &edges[lo].weights);
        tau_q = tau_q.max(defect.amax());
    }

    let (mass_chol, mass_condition) = factorize_mass(&mass, space.len(), space.poly_count())?;
    let load = &mass * DVector::from_element(space.len(), 1.0);

    Ok(WeakOperator {
        space,
        rule,
        mass,
        mass_chol,
        mass_condition,
        advection: vec![bx, by],
        boundary: BoundaryOperator::Rectangle { edges },
        load,
        interp_load: interp_load_acc,
        quad_eval: None,
        tau_q,
    })
}

fn factorize_mass(
    mass: &DMatrix<f64>,
    n: usize,
    poly_count: usize,
) -> Result<(Cholesky<f64, Dyn>, f64)> {
    let condition = match mass.clone().lu().try_inverse() {
        Some(inv) if inv.iter().all(|x| x.is_finite()) => norm1(mass) * norm1(&inv),
        _ => f64::INFINITY,
    };
    let chol = Cholesky::new(mass.clone()).ok_or(Error::Factorization {
        what: "mass matrix",
        condition,
    })?;
    if condition > CONDITION_WARN {
        log::warn!(
            "mass matrix condition estimate {condition:.3e} exceeds {CONDITION_WARN:.0e} \
             (N = {n}, P = {poly_count})"
        );
    }
    Ok((chol, condition))
}

impl WeakOperator {
    pub fn space(&self) -> &Arc<RbfSpace> {
        &self.space
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn mass(&self) -> &DMatrix<f64> {
        &self.mass
    }

    pub fn advection_matrix(&self, axis: usize) -> &DMatrix<f64> {
        &self.advection[axis]
    }

    /// Boundary evaluation vectors (l, r) of a 1D operator.
    pub fn boundary_vectors(&self) -> Option<(&DVector<f64>, &DVector<f64>)> {
        match &self.boundary {
            BoundaryOperator::Interval { left, right } => Some((left, right)),
            BoundaryOperator::Rectangle { .. } => None,
        }
    }

    /// w = M·1.
    pub fn load(&self) -> &DVector<f64> {
        &self.load
    }

    /// Σ_q w_q ℓ_n(x_q), the quadrature functional of the interpolant.
    pub fn interpolant_load(&self) -> &DVector<f64> {
        &self.interp_load
    }

    /// Largest violation of the integration-by-parts identity under the
    /// assembly quadrature.
    pub fn tau_q(&self) -> f64 {
        self.tau_q
    }

    pub fn mass_condition(&self) -> f64 {
        self.mass_condition
    }

    /// Solves M x = rhs with the factorization computed at assembly.
    pub fn solve_mass(&self, rhs: &DVector<f64>) -> DVector<f64> {
        self.mass_chol.solve(rhs)
    }

    /// Energy inner product uᵀMv.
    pub fn mass_inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        (u.transpose() * &self.mass * v)[(0, 0)]
    }

    fn component<'a>(&self, u: &'a DVector<f64>, c: usize) -> nalgebra::DVectorView<'a, f64> {
        u.rows(c * self.space.len(), self.space.len())
    }

    /// Physical flux at every node, component-major, for 1D problems.
    fn nodal_flux(&self, problem: &Problem, u: &DVector<f64>) -> Result<DMatrix<f64>> {
        let n = self.space.len();
        let c = problem.n_components;
        let mut out = DMatrix::<f64>::zeros(n, c);
        match &problem.flux {
            ProblemFlux::Scalar { flux, .. } => {
                for i in 0..n {
                    let v = flux(u[i]);
                    if !v.is_finite() {
                        return Err(Error::NonFinite {
                            context: "nodal flux",
                            location: None,
                        });
                    }
                    out[(i, 0)] = v;
                }
            }
            ProblemFlux::System { flux, .. } => {
                let mut state = vec![0.0; c];
                for i in 0..n {
                    for (comp, s) in state.iter_mut().enumerate() {
                        *s = u[comp * n + i];
                    }
                    let f = flux(&state)?;
                    for (comp, fc) in f.iter().enumerate() {
                        out[(i, comp)] = *fc;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Boundary traces and numerical fluxes of a 1D operator:
    /// (u_L, u_R, f^num_L, f^num_R), each with one entry per component.
    pub fn boundary_fluxes(
        &self,
        flux: &NumericalFlux,
        problem: &Problem,
        t: f64,
        u: &DVector<f64>,
    ) -> Result<BoundaryFluxes> {
        let (left, right) = self.boundary_vectors().ok_or_else(|| {
            Error::InvalidArgument("boundary fluxes of a 1D operator requested in 2D".into())
        })?;
        let c = problem.n_components;
        let mut trace_l = vec![0.0; c];
        let mut trace_r = vec![0.0; c];
        for comp in 0..c {
            trace_l[comp] = left.dot(&self.component(u, comp));
            trace_r[comp] = right.dot(&self.component(u, comp));
        }
        let (fnum_l, fnum_r) = match &problem.boundary {
            BoundaryCondition::Periodic => {
                // both ends couple the right trace to the left trace
                let f = flux.system(&trace_r, &trace_l)?;
                (f.clone(), f)
            }
            BoundaryCondition::Inflow {
                left: g_left,
                right: g_right,
            } => {
                let gl = g_left(t);
                if gl.len() != c {
                    return Err(Error::DimensionMismatch {
                        expected: c,
                        actual: gl.len(),
                    });
                }
                let fl = flux.system(&gl, &trace_l)?;
                let exterior_r = match g_right {
                    Some(g) => g(t),
                    // free outflow: extrapolate the interior trace
                    None => trace_r.clone(),
                };
                let fr = flux.system(&trace_r, &exterior_r)?;
                (fl, fr)
            }
        };
        Ok(BoundaryFluxes {
            trace_l,
            trace_r,
            fnum_l,
            fnum_r,
        })
    }

    /// Weak collocation right-hand side: the flux is interpolated from its
    /// nodal values. Dispatches on the operator dimension; the 2D path
    /// supports periodic linear advection with the upwind edge pairing.
    pub fn collocation_rhs(
        &self,
        flux: &NumericalFlux,
        problem: &Problem,
        t: f64,
        u: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        self.check_state(problem, u)?;
        match &self.boundary {
            BoundaryOperator::Interval { left, right } => {
                let n = self.space.len();
                let c = problem.n_components;
                let fluxes = self.nodal_flux(problem, u)?;
                let bf = self.boundary_fluxes(flux, problem, t, u)?;
                let mut out = DVector::<f64>::zeros(c * n);
                for comp in 0..c {
                    let mut rhs = &self.advection[0] * fluxes.column(comp);
                    rhs.axpy(-bf.fnum_r[comp], right, 1.0);
                    rhs.axpy(bf.fnum_l[comp], left, 1.0);
                    out.rows_mut(comp * n, n).copy_from(&self.solve_mass(&rhs));
                }
                Ok(out)
            }
            BoundaryOperator::Rectangle { edges } => self.advection_rhs_2d(flux, problem, edges, u),
        }
    }

    /// Weak analytical right-hand side for scalar 1D problems: the flux is
    /// composed with the interpolant at the quadrature nodes, not
    /// interpolated.
    pub fn analytical_rhs(
        &self,
        flux: &NumericalFlux,
        problem: &Problem,
        t: f64,
        u: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        self.check_state(problem, u)?;
        if problem.n_components != 1 {
            return Err(Error::InvalidArgument(
                "the analytical flux form applies to scalar problems".into(),
            ));
        }
        let Some(quad) = &self.quad_eval else {
            return Err(Error::InvalidArgument(
                "the analytical flux form needs a 1D operator".into(),
            ));
        };
        let ProblemFlux::Scalar { flux: f, .. } = &problem.flux else {
            return Err(Error::InvalidArgument(
                "the analytical flux form applies to scalar problems".into(),
            ));
        };
        let (left, right) = self.boundary_vectors().expect("1D operator");

        // f(u_N(x_q)) at the quadrature nodes
        let u_at_quad = &quad.values * u;
        let mut weighted = DVector::<f64>::zeros(u_at_quad.len());
        for q in 0..u_at_quad.len() {
            let v = f(u_at_quad[q]);
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    context: "flux of interpolant",
                    location: Some(*self.rule.nodes().get(q).unwrap_or(&[f64::NAN, 0.0])),
                });
            }
            weighted[q] = quad.weights[q] * v;
        }
        let mut rhs = quad.derivs.transpose() * weighted;

        let bf = self.boundary_fluxes(flux, problem, t, u)?;
        rhs.axpy(-bf.fnum_r[0], right, 1.0);
        rhs.axpy(bf.fnum_l[0], left, 1.0);
        Ok(self.solve_mass(&rhs))
    }

    fn advection_rhs_2d(
        &self,
        flux: &NumericalFlux,
        problem: &Problem,
        edges: &[EdgeQuadrature],
        u: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        if !matches!(problem.boundary, BoundaryCondition::Periodic) {
            return Err(Error::UnsupportedDomain(
                "the 2D weak path couples the edges periodically".into(),
            ));
        }
        let Some(lambda) = problem.advection else {
            return Err(Error::InvalidArgument(
                "the 2D weak path needs a linear advection problem".into(),
            ));
        };
        if !matches!(flux, NumericalFlux::Upwind { .. }) {
            return Err(Error::InvalidArgument(
                "the 2D weak path uses the upwind edge pairing".into(),
            ));
        }

        let mut rhs = &self.advection[0] * (lambda[0] * u);
        rhs += &self.advection[1] * (lambda[1] * u);

        // upwind flux through each edge: the upstream trace is the edge's own
        // when λ·n ≥ 0 (outflow), the wrapped opposite edge's otherwise
        let traces: Vec<DVector<f64>> = edges.iter().map(|e| &e.values * u).collect();
        for (i, e) in edges.iter().enumerate() {
            let speed = lambda[e.axis] * e.outward;
            if speed == 0.0 {
                continue;
            }
            let upstream = if speed > 0.0 {
                &traces[i]
            } else {
                &traces[e.opposite]
            };
            let mut weighted = upstream.clone();
            weighted.component_mul_assign(&e.weights);
            rhs.axpy(-speed, &(e.values.transpose() * weighted), 1.0);
        }
        Ok(self.solve_mass(&rhs))
    }

    fn check_state(&self, problem: &Problem, u: &DVector<f64>) -> Result<()> {
        let want = problem.n_components * self.space.len();
        if u.len() != want {
            return Err(Error::DimensionMismatch {
                expected: want,
                actual: u.len(),
            });
        }
        if !u.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidState("non-finite nodal state".into()));
        }
        Ok(())
    }

    /// Row-major text dump of the assembled operators, 17 significant digits.
    pub fn write_text_dump<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        let n = self.space.len();
        write_matrix(out, "mass", &self.mass)?;
        let names = ["advection_x", "advection_y"];
        for (axis, b) in self.advection.iter().enumerate() {
            write_matrix(out, names[axis], b)?;
        }
        if let Some((l, r)) = self.boundary_vectors() {
            write_matrix(
                out,
                "boundary_left",
                &DMatrix::from_column_slice(n, 1, l.as_slice()),
            )?;
            write_matrix(
                out,
                "boundary_right",
                &DMatrix::from_column_slice(n, 1, r.as_slice()),
            )?;
        }
        write_matrix(
            out,
            "load",
            &DMatrix::from_column_slice(n, 1, self.load.as_slice()),
        )?;
        Ok(())
    }
}

/// Traces and numerical fluxes at the two ends of a 1D domain.
#[derive(Debug, Clone)]
pub struct BoundaryFluxes {
    pub trace_l: Vec<f64>,
    pub trace_r: Vec<f64>,
    pub fnum_l: Vec<f64>,
    pub fnum_r: Vec<f64>,
}

fn write_matrix<W: Write>(out: &mut W, name: &str, m: &DMatrix<f64>) -> std::io::Result<()> {
    writeln!(out, "# {name} {} {}", m.nrows(), m.ncols())?;
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("{:.16e}", m[(i, j)]))
            .collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

/// How the strong method treats boundary values after each stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryMode {
    /// No enforcement; pure collocation of the PDE.
    #[default]
    None,
    /// Overwrite the left-most node with the inflow data g_L(t).
    InjectInflow,
    /// Overwrite the left-most node (1D) or the nodes on the lower edges
    /// (2D, when any lie there exactly) with the interpolant trace at the
    /// periodically wrapped location.
    InjectPeriodic,
}

impl std::str::FromStr for BoundaryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(BoundaryMode::None),
            "inject-inflow" => Ok(BoundaryMode::InjectInflow),
            "inject-periodic" => Ok(BoundaryMode::InjectPeriodic),
            _ => Err(Error::Config(format!("unknown boundary mode '{s}'"))),
        }
    }
}

/// The strong (collocation) operator: differentiation matrices at the
/// centers plus the boundary-injection rows.
#[derive(Debug, Clone)]
pub struct StrongOperator {
    space: Arc<RbfSpace>,
    diff: Vec<DMatrix<f64>>,
    boundary_mode: BoundaryMode,
    /// (node index, cardinal row at the wrapped point), for InjectPeriodic.
    injections: Vec<(usize, DVector<f64>)>,
}

/// Builds the differentiation matrices D^axis_mn = ∂ℓ_n/∂axis (x_m).
pub fn build_strong_operator(space: Arc<RbfSpace>, mode: BoundaryMode) -> Result<StrongOperator> {
    let dim = space.domain().dim();
    let mut diff = Vec::with_capacity(dim);
    for axis in 0..dim {
        diff.push(space.cardinal_derivative_matrix(space.nodes().points(), axis)?);
    }

    let mut injections = Vec::new();
    if mode == BoundaryMode::InjectPeriodic {
        let pts = space.nodes().points();
        if dim == 1 {
            let (a, b) = space.domain().bounds(0);
            let wrapped = [pts[0][0] + (b - a), 0.0];
            injections.push((0, row_vector(&space.cardinal_matrix(&[wrapped]))));
        } else {
            let (x0, x1) = space.domain().bounds(0);
            let (y0, y1) = space.domain().bounds(1);
            for (i, &p) in pts.iter().enumerate() {
                let on_west = (p[0] - x0).abs() < 1e-12;
                let on_south = (p[1] - y0).abs() < 1e-12;
                if on_west || on_south {
                    let wrapped = [
                        if on_west { p[0] + (x1 - x0) } else { p[0] },
                        if on_south { p[1] + (y1 - y0) } else { p[1] },
                    ];
                    injections.push((i, row_vector(&space.cardinal_matrix(&[wrapped]))));
                }
            }
        }
    }

    Ok(StrongOperator {
        space,
        diff,
        boundary_mode: mode,
        injections,
    })
}

impl StrongOperator {
    pub fn space(&self) -> &Arc<RbfSpace> {
        &self.space
    }

    pub fn boundary_mode(&self) -> BoundaryMode {
        self.boundary_mode
    }

    pub fn diff_matrix(&self, axis: usize) -> &DMatrix<f64> {
        &self.diff[axis]
    }

    /// u̇ = −D f(u), applied nodewise and per component. In 2D the problem
    /// must be linear advection: u̇ = −(λ₁ D_x + λ₂ D_y) u.
    pub fn rhs(&self, problem: &Problem, u: &DVector<f64>) -> Result<DVector<f64>> {
        let n = self.space.len();
        let want = problem.n_components * n;
        if u.len() != want {
            return Err(Error::DimensionMismatch {
                expected: want,
                actual: u.len(),
            });
        }
        if !u.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidState("non-finite nodal state".into()));
        }
        if self.space.domain().dim() == 2 {
            let Some(lambda) = problem.advection else {
                return Err(Error::InvalidArgument(
                    "the strong 2D path needs a linear advection problem".into(),
                ));
            };
            let mut rhs = &self.diff[0] * (-lambda[0] * u);
            rhs += &self.diff[1] * (-lambda[1] * u);
            return Ok(rhs);
        }
        let c = problem.n_components;
        let mut fluxes = DMatrix::<f64>::zeros(n, c);
        match &problem.flux {
            ProblemFlux::Scalar { flux, .. } => {
                for i in 0..n {
                    fluxes[(i, 0)] = flux(u[i]);
                }
            }
            ProblemFlux::System { flux, .. } => {
                let mut state = vec![0.0; c];
                for i in 0..n {
                    for (comp, s) in state.iter_mut().enumerate() {
                        *s = u[comp * n + i];
                    }
                    let f = flux(&state)?;
                    for (comp, fc) in f.iter().enumerate() {
                        fluxes[(i, comp)] = *fc;
                    }
                }
            }
        }
        let mut out = DVector::<f64>::zeros(c * n);
        for comp in 0..c {
            out.rows_mut(comp * n, n)
                .copy_from(&(&self.diff[0] * (-1.0 * fluxes.column(comp))));
        }
        Ok(out)
    }

    /// Applies the boundary mode in place; called after each stage.
    pub fn apply_boundary(&self, problem: &Problem, t: f64, u: &mut DVector<f64>) {
        let n = self.space.len();
        match self.boundary_mode {
            BoundaryMode::None => {}
            BoundaryMode::InjectInflow => {
                if let BoundaryCondition::Inflow { left, .. } = &problem.boundary {
                    let g = left(t);
                    for (c, &gc) in g.iter().enumerate() {
                        u[c * n] = gc;
                    }
                }
            }
            BoundaryMode::InjectPeriodic => {
                for c in 0..problem.n_components {
                    let comp = u.rows(c * n, n).clone_owned();
                    for (idx, row) in &self.injections {
                        u[c * n + idx] = row.dot(&comp);
                    }
                }
            }
        }
    }
}

/// Adapts a weak operator to the time-integration RHS interface.
pub struct WeakRhs<'a> {
    pub op: &'a WeakOperator,
    pub flux: &'a NumericalFlux,
    pub problem: &'a Problem,
    pub analytical: bool,
}

impl Rhs for WeakRhs<'_> {
    fn eval(&self, t: f64, u: &DVector<f64>) -> Result<DVector<f64>> {
        if self.analytical {
            self.op.analytical_rhs(self.flux, self.problem, t, u)
        } else {
            self.op.collocation_rhs(self.flux, self.problem, t, u)
        }
    }
}

/// Adapts a strong operator to the time-integration RHS interface.
pub struct StrongRhs<'a> {
    pub op: &'a StrongOperator,
    pub problem: &'a Problem,
}

impl Rhs for StrongRhs<'_> {
    fn eval(&self, _t: f64, u: &DVector<f64>) -> Result<DVector<f64>> {
        self.op.rhs(self.problem, u)
    }

    fn apply_boundary(&self, t: f64, u: &mut DVector<f64>) {
        self.op.apply_boundary(self.problem, t, u);
    }
}

fn scale_rows(m: &DMatrix<f64>, w: &DVector<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for (i, mut row) in out.row_iter_mut().enumerate() {
        row *= w[i];
    }
    out
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    let mt = m.transpose();
    0.5 * (m + mt)
}

fn row_vector(m: &DMatrix<f64>) -> DVector<f64> {
    m.row(0).transpose()
}

fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Node-aligned composite Gauss–Legendre reference rule for a 1D space: one
/// panel between consecutive centers (plus the domain endpoints), so the
/// assembly integrands are analytic inside every panel.
pub fn reference_rule(space: &RbfSpace) -> Result<QuadratureRule> {
    if space.domain().dim() != 1 {
        return Err(Error::InvalidArgument(
            "the reference rule is one-dimensional".into(),
        ));
    }
    let (a, b) = space.domain().bounds(0);
    let mut breaks: Vec<f64> = Vec::with_capacity(space.len() + 2);
    breaks.push(a);
    for p in space.nodes().points() {
        breaks.push(p[0]);
    }
    breaks.push(b);
    breaks.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    crate::quadrature::composite_gauss_legendre(
        &breaks,
        crate::quadrature::REFERENCE_POINTS_PER_PANEL,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluxes::NumericalFlux;
    use crate::kernels::Kernel;
    use crate::problems::{linear_advection_problem, AdvectionIc, BcKind};
    use crate::quadrature::{gauss_legendre_rule, trapezoid_rule};
    use crate::space::{build_space, Domain, NodeSet};
    use approx::assert_abs_diff_eq;

    fn space_1d(kernel: Kernel, n: usize, p: usize) -> Arc<RbfSpace> {
        let dom = Domain::interval(-1.0, 1.0).unwrap();
        Arc::new(build_space(kernel, NodeSet::equidistant(dom, n).unwrap(), p).unwrap())
    }

    fn weak_op(kernel: Kernel, n: usize, p: usize) -> WeakOperator {
        let sp = space_1d(kernel, n, p);
        let rule = reference_rule(&sp).unwrap();
        assemble_weak_operator(sp, rule).unwrap()
    }

    #[test]
    fn load_vector_sums_to_domain_measure() {
        let op = weak_op(Kernel::cubic(), 12, 1);
        let total: f64 = op.load().iter().sum();
        assert_abs_diff_eq!(total, 2.0, epsilon = 2.0 * 1e-10);
    }

    #[test]
    fn sbp_identity_under_reference_quadrature() {
        for kernel in [Kernel::cubic(), Kernel::quintic()] {
            for p in [1, 2] {
                let op = weak_op(kernel, 12, p);
                assert!(op.tau_q() < 1e-8, "tau_q = {:.3e}", op.tau_q());
            }
        }
    }

    #[test]
    fn single_symmetric_node_advection_vanishes() {
        // one even cardinal function: ∫ ℓ'ℓ = [ℓ²/2] = 0 on a symmetric domain
        let kernel = Kernel::new(crate::kernels::KernelKind::Gaussian, 2.0).unwrap();
        let dom = Domain::interval(-1.0, 1.0).unwrap();
        let nodes = NodeSet::new(vec![[0.0, 0.0]], dom).unwrap();
        let sp = Arc::new(build_space(kernel, nodes, 0).unwrap());
        let rule = gauss_legendre_rule(-1.0, 1.0, 200).unwrap();
        let op = assemble_weak_operator(sp, rule).unwrap();
        assert!(op.advection_matrix(0)[(0, 0)].abs() <= op.tau_q().max(1e-12));
    }

    #[test]
    fn mass_matrix_is_symmetric_positive_definite() {
        let op = weak_op(Kernel::quintic(), 10, 1);
        let m = op.mass();
        for i in 0..10 {
            for j in 0..10 {
                assert_eq!(m[(i, j)], m[(j, i)]);
            }
        }
        // Cholesky succeeded at assembly; a solve round-trips
        let b = DVector::from_fn(10, |i, _| (i as f64 * 0.37).sin());
        let x = op.solve_mass(&b);
        let back = m * x;
        for i in 0..10 {
            assert_abs_diff_eq!(back[i], b[i], epsilon = 1e-9);
        }
    }

    #[test]
    fn operator_entries_match_dense_trapezoid_oracle() {
        // brute-force composite trapezoid on the cardinal functions, N <= 5
        let sp = space_1d(Kernel::cubic(), 5, 1);
        let op = assemble_weak_operator(sp.clone(), reference_rule(&sp).unwrap()).unwrap();
        let m_pts = 100_000;
        let oracle = trapezoid_rule(-1.0, 1.0, m_pts).unwrap();
        let e = sp.cardinal_matrix(oracle.nodes());
        let ed = sp.cardinal_derivative_matrix(oracle.nodes(), 0).unwrap();
        let w = DVector::from_column_slice(oracle.weights());
        let m_oracle = e.transpose() * scale_rows(&e, &w);
        let b_oracle = ed.transpose() * scale_rows(&e, &w);
        assert!((op.mass() - &m_oracle).amax() < 1e-6);
        assert!((op.advection_matrix(0) - &b_oracle).amax() < 1e-6);
    }

    #[test]
    fn constant_state_is_steady_for_any_consistent_flux() {
        let problem =
            linear_advection_problem([1.0, 0.0], AdvectionIc::Gaussian20, BcKind::Periodic)
                .unwrap();
        let op = weak_op(Kernel::cubic(), 10, 1);
        let flux = NumericalFlux::Upwind { speed: 1.0 };
        let u = DVector::from_element(10, 3.7);
        let du = op.collocation_rhs(&flux, &problem, 0.0, &u).unwrap();
        assert!(du.amax() < 1e-10, "du = {:.3e}", du.amax());
        let du = op.analytical_rhs(&flux, &problem, 0.0, &u).unwrap();
        assert!(du.amax() < 1e-10);
    }

    #[test]
    fn analytical_equals_collocation_for_linear_flux() {
        let problem =
            linear_advection_problem([1.0, 0.0], AdvectionIc::Gaussian20, BcKind::Periodic)
                .unwrap();
        let op = weak_op(Kernel::quintic(), 9, 1);
        let flux = NumericalFlux::Upwind { speed: 1.0 };
        let u = DVector::from_fn(9, |i, _| (1.3 * i as f64).sin());
        let a = op.collocation_rhs(&flux, &problem, 0.0, &u).unwrap();
        let b = op.analytical_rhs(&flux, &problem, 0.0, &u).unwrap();
        assert!((a - b).amax() < 1e-10);
    }

    #[test]
    fn conservation_identity_discrete() {
        // wᵀ(du/dt) + (f^num_R − f^num_L) = 0 for random states
        use rand::{Rng, SeedableRng};
        let problem =
            linear_advection_problem([1.0, 0.0], AdvectionIc::Gaussian20, BcKind::Periodic)
                .unwrap();
        let op = weak_op(Kernel::cubic(), 14, 1);
        let flux = NumericalFlux::Upwind { speed: 1.0 };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let u = DVector::from_fn(14, |_, _| rng.gen_range(-1.0..1.0));
            let du = op.collocation_rhs(&flux, &problem, 0.0, &u).unwrap();
            let bf = op.boundary_fluxes(&flux, &problem, 0.0, &u).unwrap();
            let res = op.load().dot(&du) + (bf.fnum_r[0] - bf.fnum_l[0]);
            assert!(res.abs() < 1e-10, "residual {res:.3e}");
        }
    }

    #[test]
    fn energy_identity_linear_advection() {
        // 2uᵀM(du/dt) = λ(u_R² − u_L²) − 2(f^num_R u_R − f^num_L u_L)
        use rand::{Rng, SeedableRng};
        let problem =
            linear_advection_problem([1.0, 0.0], AdvectionIc::Gaussian20, BcKind::Periodic)
                .unwrap();
        let op = weak_op(Kernel::cubic(), 12, 1);
        let flux = NumericalFlux::Upwind { speed: 1.0 };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let u = DVector::from_fn(12, |_, _| rng.gen_range(-1.0..1.0));
            let du = op.collocation_rhs(&flux, &problem, 0.0, &u).unwrap();
            let bf = op.boundary_fluxes(&flux, &problem, 0.0, &u).unwrap();
            let (ul, ur) = (bf.trace_l[0], bf.trace_r[0]);
            let lhs = 2.0 * op.mass_inner(&u, &du);
            let rhs = (ur * ur - ul * ul) - 2.0 * (bf.fnum_r[0] * ur - bf.fnum_l[0] * ul);
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-8);
            // periodic upwind dissipation: rate equals −λ(u_R − u_L)²
            assert_abs_diff_eq!(lhs, -(ur - ul) * (ur - ul), epsilon = 1e-8);
        }
    }

    #[test]
    fn analytical_rhs_matches_dense_galerkin_oracle_for_burgers() {
        // independent dense-grid Galerkin assembly at 10x the reference
        // resolution, N = 3 nodes
        use std::sync::Arc as StdArc;
        let dom = Domain::interval(-1.0, 1.0).unwrap();
        let nodes = NodeSet::equidistant(dom, 3).unwrap();
        let sp = StdArc::new(build_space(Kernel::cubic(), nodes, 1).unwrap());
        let op = assemble_weak_operator(sp.clone(), reference_rule(&sp).unwrap()).unwrap();

        let burgers: crate::fluxes::ScalarFlux = StdArc::new(|u: f64| 0.5 * u * u);
        let problem = Problem {
            name: "burgers-test".into(),
            domain: dom,
            n_components: 1,
            flux: ProblemFlux::Scalar {
                flux: burgers.clone(),
                wavespeed: StdArc::new(|u: f64| u.abs()),
            },
            initial: StdArc::new(|p| vec![p[0]]),
            boundary: BoundaryCondition::Periodic,
            exact: None,
            advection: None,
        };
        let flux = NumericalFlux::Godunov { flux: burgers };
        let u = DVector::from_column_slice(&[0.4, -0.2, 0.9]);
        let got = op.analytical_rhs(&flux, &problem, 0.0, &u).unwrap();

        // oracle: q_m = ∫ f(u_N) ℓ'_m by dense composite trapezoid, then the
        // same boundary fluxes and a dense-mass solve
        let dense = trapezoid_rule(-1.0, 1.0, 200_001).unwrap();
        let e = sp.cardinal_matrix(dense.nodes());
        let ed = sp.cardinal_derivative_matrix(dense.nodes(), 0).unwrap();
        let w = DVector::from_column_slice(dense.weights());
        let u_at = &e * &u;
        let mut weighted = DVector::<f64>::zeros(u_at.len());
        for q in 0..u_at.len() {
            weighted[q] = w[q] * 0.5 * u_at[q] * u_at[q];
        }
        let mut rhs = ed.transpose() * weighted;
        let bf = op.boundary_fluxes(&flux, &problem, 0.0, &u).unwrap();
        let (l, r) = op.boundary_vectors().unwrap();
        rhs.axpy(-bf.fnum_r[0], r, 1.0);
        rhs.axpy(bf.fnum_l[0], l, 1.0);
        let m_dense = e.transpose() * scale_rows(&e, &w);
        let oracle = m_dense.lu().solve(&rhs).unwrap();
        assert!((got - oracle).amax() < 1e-6);
    }

    #[test]
    fn strong_operator_annihilates_constants_and_linears() {
        let sp = space_1d(Kernel::cubic(), 11, 2);
        let op = build_strong_operator(sp, BoundaryMode::None).unwrap();
        let ones = DVector::from_element(11, 1.0);
        assert!((op.diff_matrix(0) * &ones).amax() < 1e-8);
        let xs = DVector::from_iterator(11, op.space().nodes().points().iter().map(|p| p[0]));
        let d = op.diff_matrix(0) * xs;
        for v in d.iter() {
            assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn strong_rhs_constant_state_and_linear_state() {
        let problem =
            linear_advection_problem([1.0, 0.0], AdvectionIc::Gaussian20, BcKind::Periodic)
                .unwrap();
        let sp = space_1d(Kernel::cubic(), 11, 2);
        let op = build_strong_operator(sp, BoundaryMode::None).unwrap();
        let u = DVector::from_element(11, 2.0);
        assert!(op.rhs(&problem, &u).unwrap().amax() < 1e-8);
        let xs = DVector::from_iterator(11, op.space().nodes().points().iter().map(|p| p[0]));
        let du = op.rhs(&problem, &xs).unwrap();
        for v in du.iter() {
            assert_abs_diff_eq!(*v, -1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn strong_rhs_matches_interpolant_derivative() {
        let problem =
            linear_advection_problem([1.0, 0.0], AdvectionIc::Gaussian20, BcKind::Periodic)
                .unwrap();
        let sp = space_1d(Kernel::quintic(), 9, 1);
        let op = build_strong_operator(sp.clone(), BoundaryMode::None).unwrap();
        let data: Vec<f64> = sp
            .nodes()
            .points()
            .iter()
            .map(|p| (2.0 * p[0]).cos())
            .collect();
        let u = DVector::from_column_slice(&data);
        let du = op.rhs(&problem, &u).unwrap();
        // oracle: centered difference of the interpolant's flux at the centers
        let interp = sp.fit(&data).unwrap();
        let h = 1e-5;
        for (i, &p) in sp.nodes().points().iter().enumerate() {
            let fd = (interp.evaluate(&[[p[0] + h, 0.0]])[0]
                - interp.evaluate(&[[p[0] - h, 0.0]])[0])
                / (2.0 * h);
            assert_abs_diff_eq!(du[i], -fd, epsilon = 1e-4);
        }
    }

    #[test]
    fn inject_periodic_overwrites_leftmost_node() {
        let problem =
            linear_advection_problem([1.0, 0.0], AdvectionIc::Gaussian20, BcKind::Periodic)
                .unwrap();
        let sp = space_1d(Kernel::cubic(), 8, 1);
        let op = build_strong_operator(sp.clone(), BoundaryMode::InjectPeriodic).unwrap();
        let data: Vec<f64> = sp.nodes().points().iter().map(|p| p[0] * p[0]).collect();
        let mut u = DVector::from_column_slice(&data);
        op.apply_boundary(&problem, 0.0, &mut u);
        // wrapped location of the left-most node is the right endpoint
        let interp = sp.fit(&data).unwrap();
        let want = interp.evaluate(&[[1.0, 0.0]])[0];
        assert_abs_diff_eq!(u[0], want, epsilon = 1e-10);
    }

    #[test]
    fn inject_inflow_sets_boundary_data() {
        let problem =
            linear_advection_problem([1.0, 0.0], AdvectionIc::Gaussian20, BcKind::Inflow).unwrap();
        let sp = space_1d(Kernel::cubic(), 8, 1);
        let op = build_strong_operator(sp, BoundaryMode::InjectInflow).unwrap();
        let mut u = DVector::from_element(8, 0.0);
        op.apply_boundary(&problem, 0.5, &mut u);
        let want = (-20.0_f64 * 0.5 * 0.5).exp(); // g_L(0.5) = u0(0.5)
        assert_abs_diff_eq!(u[0], want, epsilon = 1e-12);
    }

    #[test]
    fn two_d_constant_state_is_steady() {
        // the defect of the constant-state identity is a pure quadrature
        // quantity; it tracks the reported τ_q
        let problem =
            linear_advection_problem([1.0, 0.0], AdvectionIc::TwoDSine, BcKind::Periodic).unwrap();
        let dom = Domain::square(-1.0, 1.0).unwrap();
        let sp = Arc::new(
            build_space(Kernel::cubic(), NodeSet::equidistant(dom, 25).unwrap(), 1).unwrap(),
        );
        let rx = gauss_legendre_rule(-1.0, 1.0, 400).unwrap();
        let op = assemble_weak_operator_2d(sp, &rx, &rx).unwrap();
        let flux = NumericalFlux::Upwind { speed: 1.0 };
        let u = DVector::from_element(25, -1.1);
        let du = op.collocation_rhs(&flux, &problem, 0.0, &u).unwrap();
        let tol = (20.0 * op.tau_q()).max(1e-8);
        assert!(
            du.amax() < tol,
            "du = {:.3e}, tau_q = {:.3e}",
            du.amax(),
            op.tau_q()
        );
    }

    #[test]
    fn two_d_reduces_to_one_d_on_y_constant_data() {
        // the Gaussian kernel is tensor separable, so without a polynomial
        // tail the 2D system on a tensor grid is the Kronecker product of
        // the 1D ones: for λ = (1, 0) and data constant in y, the 2D
        // right-hand side equals the 1D one on every grid line
        let problem2 =
            linear_advection_problem([1.0, 0.0], AdvectionIc::TwoDSine, BcKind::Periodic).unwrap();
        let problem1 =
            linear_advection_problem([1.0, 0.0], AdvectionIc::Gaussian20, BcKind::Periodic)
                .unwrap();
        let kernel = Kernel::new(crate::kernels::KernelKind::Gaussian, 3.0).unwrap();
        let m = 7;
        let dom2 = Domain::square(-1.0, 1.0).unwrap();
        let sp2 =
            Arc::new(build_space(kernel, NodeSet::equidistant(dom2, m * m).unwrap(), 0).unwrap());
        let rx = gauss_legendre_rule(-1.0, 1.0, 200).unwrap();
        let op2 = assemble_weak_operator_2d(sp2.clone(), &rx, &rx).unwrap();

        let dom1 = Domain::interval(-1.0, 1.0).unwrap();
        let sp1 = Arc::new(build_space(kernel, NodeSet::equidistant(dom1, m).unwrap(), 0).unwrap());
        let op1 = assemble_weak_operator(sp1.clone(), gauss_legendre_rule(-1.0, 1.0, 200).unwrap())
            .unwrap();

        let profile = |x: f64| (std::f64::consts::PI * x).sin() + 0.3;
        let u2 = DVector::from_iterator(m * m, sp2.nodes().points().iter().map(|p| profile(p[0])));
        let u1 = DVector::from_iterator(m, sp1.nodes().points().iter().map(|p| profile(p[0])));

        let flux = NumericalFlux::Upwind { speed: 1.0 };
        let du2 = op2.collocation_rhs(&flux, &problem2, 0.0, &u2).unwrap();
        let du1 = op1.collocation_rhs(&flux, &problem1, 0.0, &u1).unwrap();

        // 2D equidistant points are x-major: index i*m + j has x = x_i
        for i in 0..m {
            for j in 0..m {
                assert_abs_diff_eq!(du2[i * m + j], du1[i], epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn two_d_approaches_one_d_for_non_separable_kernels() {
        // polyharmonic cardinal functions are not tensor products, so the
        // per-line agreement is an approximation property: the gap shrinks
        // as the grid is refined
        let problem2 =
            linear_advection_problem([1.0, 0.0], AdvectionIc::TwoDSine, BcKind::Periodic).unwrap();
        let problem1 =
            linear_advection_problem([1.0, 0.0], AdvectionIc::Gaussian20, BcKind::Periodic)
                .unwrap();
        let flux = NumericalFlux::Upwind { speed: 1.0 };
        let profile = |x: f64| (std::f64::consts::PI * x).sin();
        let mut gaps = Vec::new();
        for m in [5usize, 10] {
            let dom2 = Domain::square(-1.0, 1.0).unwrap();
            let sp2 = Arc::new(
                build_space(
                    Kernel::cubic(),
                    NodeSet::equidistant(dom2, m * m).unwrap(),
                    1,
                )
                .unwrap(),
            );
            let rx = gauss_legendre_rule(-1.0, 1.0, 200).unwrap();
            let op2 = assemble_weak_operator_2d(sp2.clone(), &rx, &rx).unwrap();
            let sp1 = space_1d(Kernel::cubic(), m, 1);
            let op1 = assemble_weak_operator(sp1.clone(), reference_rule(&sp1).unwrap()).unwrap();
            let u2 =
                DVector::from_iterator(m * m, sp2.nodes().points().iter().map(|p| profile(p[0])));
            let u1 = DVector::from_iterator(m, sp1.nodes().points().iter().map(|p| profile(p[0])));
            let du2 = op2.collocation_rhs(&flux, &problem2, 0.0, &u2).unwrap();
            let du1 = op1.collocation_rhs(&flux, &problem1, 0.0, &u1).unwrap();
            let mut worst = 0.0_f64;
            for i in 0..m {
                for j in 0..m {
                    worst = worst.max((du2[i * m + j] - du1[i]).abs());
                }
            }
            gaps.push(worst);
        }
        assert!(gaps[1] < 0.5 * gaps[0], "gaps {gaps:?}");
        assert!(gaps[1] < 0.2, "gaps {gaps:?}");
    }

    #[test]
    fn two_d_periodic_upwind_dissipates_energy() {
        let problem =
            linear_advection_problem([1.0, 0.0], AdvectionIc::TwoDSine, BcKind::Periodic).unwrap();
        let dom = Domain::square(-1.0, 1.0).unwrap();
        let sp = Arc::new(
            build_space(Kernel::cubic(), NodeSet::random(dom, 30, 5).unwrap(), 1).unwrap(),
        );
        let rx = trapezoid_rule(-1.0, 1.0, 80).unwrap();
        let op = assemble_weak_operator_2d(sp.clone(), &rx, &rx).unwrap();
        let flux = NumericalFlux::Upwind { speed: 1.0 };
        let u = DVector::from_iterator(
            30,
            sp.nodes()
                .points()
                .iter()
                .map(|p| (problem.initial)(*p)[0] + 0.1 * (5.0 * p[0]).sin()),
        );
        let du = op.collocation_rhs(&flux, &problem, 0.0, &u).unwrap();
        let rate = 2.0 * op.mass_inner(&u, &du);
        assert!(rate <= 1e-8, "energy rate {rate:.3e}");
    }

    #[test]
    fn operator_dump_is_readable() {
        let op = weak_op(Kernel::cubic(), 4, 1);
        let mut buf = Vec::new();
        op.write_text_dump(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("# mass 4 4"));
        assert!(text.contains("# advection_x 4 4"));
        assert!(text.contains("# boundary_left 4 1"));
        // 17 significant digits
        assert!(text.contains("e0") || text.contains("e-") || text.contains("e1"));
    }
}
