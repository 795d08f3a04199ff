//! Test problems: flux, initial condition, boundary data and exact solutions.
//!
//! The linear advection problems transport their initial profile with
//! periodic wrapping, so the exact solution is available at any time. The
//! smooth Euler flow (γ = 3) starts from ρ = 1 + sin(πx)/2 at rest with
//! p = ρ^γ; its exact solution follows the characteristics, with the two
//! foot points found by a safeguarded Newton iteration.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fluxes::{ScalarFlux, SystemFlux, WaveSpeedFn};
use crate::space::Domain;
use crate::Point;

/// Boundary data g(t), one value per solution component.
pub type BoundaryFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// Initial condition, one value per solution component.
pub type InitialFn = Arc<dyn Fn(Point) -> Vec<f64> + Send + Sync>;

/// Exact solution (t, x) ↦ state; may fail (e.g. a root solve not converging).
pub type ExactFn = Arc<dyn Fn(f64, Point) -> Result<Vec<f64>> + Send + Sync>;

/// How boundary values enter the problem.
#[derive(Clone)]
pub enum BoundaryCondition {
    Periodic,
    Inflow {
        left: BoundaryFn,
        right: Option<BoundaryFn>,
    },
}

impl std::fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryCondition::Periodic => write!(f, "Periodic"),
            BoundaryCondition::Inflow { right, .. } => {
                write!(f, "Inflow {{ right: {} }}", right.is_some())
            }
        }
    }
}

/// The physical flux of a problem.
#[derive(Clone)]
pub enum ProblemFlux {
    Scalar {
        flux: ScalarFlux,
        /// |f'(u)| for the CFL bound.
        wavespeed: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
    System {
        flux: SystemFlux,
        wavespeed: WaveSpeedFn,
    },
}

/// A conservation law together with everything a run needs.
#[derive(Clone)]
pub struct Problem {
    pub name: String,
    pub domain: Domain,
    pub n_components: usize,
    pub flux: ProblemFlux,
    pub initial: InitialFn,
    pub boundary: BoundaryCondition,
    pub exact: Option<ExactFn>,
    /// Constant advection velocity when the flux is f(u) = λu.
    pub advection: Option<[f64; 2]>,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("n_components", &self.n_components)
            .field("boundary", &self.boundary)
            .field("advection", &self.advection)
            .finish_non_exhaustive()
    }
}

impl Problem {
    /// Initial nodal state, component-major: [comp 0 at all points, comp 1, …].
    pub fn initial_state(&self, points: &[Point]) -> Vec<f64> {
        let n = points.len();
        let mut out = vec![0.0; n * self.n_components];
        for (i, &p) in points.iter().enumerate() {
            let v = (self.initial)(p);
            debug_assert_eq!(v.len(), self.n_components);
            for (c, &vc) in v.iter().enumerate() {
                out[c * n + i] = vc;
            }
        }
        out
    }

    /// Exact nodal state at time t, component-major.
    pub fn exact_state(&self, t: f64, points: &[Point]) -> Result<Option<Vec<f64>>> {
        let Some(exact) = &self.exact else {
            return Ok(None);
        };
        let n = points.len();
        let mut out = vec![0.0; n * self.n_components];
        for (i, &p) in points.iter().enumerate() {
            let v = exact(t, p)?;
            for (c, &vc) in v.iter().enumerate() {
                out[c * n + i] = vc;
            }
        }
        Ok(Some(out))
    }

    /// max |f'(u)| over the initial-condition range, for the CFL time step.
    /// The initial condition is sampled on `samples` points (a tensor grid in
    /// 2D); for systems the characteristic speed is maximized over the
    /// sampled states directly.
    pub fn max_initial_wave_speed(&self, samples: usize) -> Result<f64> {
        let samples = samples.max(2);
        let pts = self.sample_points(samples);
        match &self.flux {
            ProblemFlux::Scalar { wavespeed, .. } => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for p in pts {
                    let u = (self.initial)(p)[0];
                    lo = lo.min(u);
                    hi = hi.max(u);
                }
                let mut best = 0.0_f64;
                for k in 0..samples {
                    let u = lo + (hi - lo) * k as f64 / (samples - 1) as f64;
                    best = best.max(wavespeed(u));
                }
                Ok(best)
            }
            ProblemFlux::System { wavespeed, .. } => {
                let mut best = 0.0_f64;
                for p in pts {
                    best = best.max(wavespeed(&(self.initial)(p))?);
                }
                Ok(best)
            }
        }
    }

    fn sample_points(&self, samples: usize) -> Vec<Point> {
        match *self.domain() {
            Domain::Interval { a, b } => (0..samples)
                .map(|i| [a + (b - a) * i as f64 / (samples - 1) as f64, 0.0])
                .collect(),
            Domain::Rectangle { x, y } => {
                let m = (samples as f64).sqrt().ceil() as usize;
                let mut pts = Vec::with_capacity(m * m);
                for i in 0..m {
                    for j in 0..m {
                        pts.push([
                            x.0 + (x.1 - x.0) * i as f64 / (m - 1) as f64,
                            y.0 + (y.1 - y.0) * j as f64 / (m - 1) as f64,
                        ]);
                    }
                }
                pts
            }
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }
}

/// Initial profiles for the advection problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdvectionIc {
    /// exp(−20x²) on [−1, 1].
    Gaussian20,
    /// cos²(4πx) on [−1, 1].
    CosSq4Pi,
    /// sin(2πx)(sin(2πy)/2 − 1) on [−1, 1]².
    TwoDSine,
}

/// Boundary-condition choice for the built-in problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcKind {
    Periodic,
    Inflow,
}

fn wrap_periodic(x: f64, lo: f64, hi: f64) -> f64 {
    lo + (x - lo).rem_euclid(hi - lo)
}

/// Linear advection u_t + λ·∇u = 0 with a transported, periodically wrapped
/// exact solution. Inflow data is the exact solution traced at the left
/// boundary.
pub fn linear_advection_problem(lambda: [f64; 2], ic: AdvectionIc, bc: BcKind) -> Result<Problem> {
    let (domain, profile): (Domain, Arc<dyn Fn(Point) -> f64 + Send + Sync>) = match ic {
        AdvectionIc::Gaussian20 => (
            Domain::interval(-1.0, 1.0)?,
            Arc::new(|p: Point| (-20.0 * p[0] * p[0]).exp()),
        ),
        AdvectionIc::CosSq4Pi => (
            Domain::interval(-1.0, 1.0)?,
            Arc::new(|p: Point| (4.0 * std::f64::consts::PI * p[0]).cos().powi(2)),
        ),
        AdvectionIc::TwoDSine => (
            Domain::square(-1.0, 1.0)?,
            Arc::new(|p: Point| {
                let two_pi = 2.0 * std::f64::consts::PI;
                (two_pi * p[0]).sin() * (0.5 * (two_pi * p[1]).sin() - 1.0)
            }),
        ),
    };
    if domain.dim() == 1 && lambda[1] != 0.0 {
        return Err(Error::InvalidArgument(
            "a 1D advection problem cannot have a second velocity component".into(),
        ));
    }
    if domain.dim() == 2 && bc == BcKind::Inflow {
        return Err(Error::InvalidArgument(
            "inflow boundaries are only supported in 1D".into(),
        ));
    }

    let dom = domain;
    let prof = profile.clone();
    let exact_fn: ExactFn = Arc::new(move |t, p| {
        let (x0, x1) = dom.bounds(0);
        let mut q = [wrap_periodic(p[0] - lambda[0] * t, x0, x1), 0.0];
        if dom.dim() == 2 {
            let (y0, y1) = dom.bounds(1);
            q[1] = wrap_periodic(p[1] - lambda[1] * t, y0, y1);
        }
        Ok(vec![prof(q)])
    });

    let boundary = match bc {
        BcKind::Periodic => BoundaryCondition::Periodic,
        BcKind::Inflow => {
            let exact = exact_fn.clone();
            let a = domain.bounds(0).0;
            BoundaryCondition::Inflow {
                left: Arc::new(move |t| exact(t, [a, 0.0]).expect("advection exact is total")),
                right: None,
            }
        }
    };

    let speed = lambda[0];
    let prof = profile;
    Ok(Problem {
        name: match ic {
            AdvectionIc::Gaussian20 => "advect-gauss".into(),
            AdvectionIc::CosSq4Pi => "advect-cos2".into(),
            AdvectionIc::TwoDSine => "advect-2d".into(),
        },
        domain,
        n_components: 1,
        flux: ProblemFlux::Scalar {
            flux: Arc::new(move |u| speed * u),
            wavespeed: Arc::new(move |_| lambda[0].abs().max(lambda[1].abs())),
        },
        initial: Arc::new(move |p| vec![prof(p)]),
        boundary,
        exact: Some(exact_fn),
        advection: Some(lambda),
    })
}

/// Conserved variables (ρ, ρu, E) of an ideal gas, with validity checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerState {
    rho: f64,
    momentum: f64,
    total_energy: f64,
    gamma: f64,
}

impl EulerState {
    pub fn new(rho: f64, momentum: f64, total_energy: f64, gamma: f64) -> Result<Self> {
        let s = EulerState {
            rho,
            momentum,
            total_energy,
            gamma,
        };
        if !(rho.is_finite() && momentum.is_finite() && total_energy.is_finite()) {
            return Err(Error::InvalidState("non-finite conserved variables".into()));
        }
        if rho <= 0.0 {
            return Err(Error::InvalidState(format!("non-positive density {rho}")));
        }
        if s.internal_energy() <= 0.0 {
            return Err(Error::InvalidState(format!(
                "non-positive internal energy {}",
                s.internal_energy()
            )));
        }
        Ok(s)
    }

    pub fn from_conserved(u: &[f64], gamma: f64) -> Result<Self> {
        if u.len() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                actual: u.len(),
            });
        }
        EulerState::new(u[0], u[1], u[2], gamma)
    }

    pub fn from_primitive(rho: f64, velocity: f64, pressure: f64, gamma: f64) -> Result<Self> {
        let total_energy = pressure / (gamma - 1.0) + 0.5 * rho * velocity * velocity;
        EulerState::new(rho, rho * velocity, total_energy, gamma)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn velocity(&self) -> f64 {
        self.momentum / self.rho
    }

    /// e = E/ρ − u²/2.
    pub fn internal_energy(&self) -> f64 {
        self.total_energy / self.rho - 0.5 * self.velocity() * self.velocity()
    }

    /// Ideal-gas pressure p = (γ − 1) ρ e.
    pub fn pressure(&self) -> f64 {
        (self.gamma - 1.0) * self.rho * self.internal_energy()
    }

    pub fn conserved(&self) -> [f64; 3] {
        [self.rho, self.momentum, self.total_energy]
    }
}

/// F(U) = (ρu, ρu² + p, u(E + p)).
pub fn euler_flux(state: &EulerState) -> [f64; 3] {
    let u = state.velocity();
    let p = state.pressure();
    [
        state.momentum,
        state.momentum * u + p,
        u * (state.total_energy + p),
    ]
}

/// |u| + sqrt(γ p / ρ): the largest characteristic speed.
pub fn euler_wavespeed(state: &EulerState) -> f64 {
    state.velocity().abs() + (state.gamma * state.pressure() / state.rho).sqrt()
}

const EULER_GAMMA: f64 = 3.0;

fn rho_initial(x: f64) -> f64 {
    1.0 + 0.5 * (std::f64::consts::PI * x).sin()
}

fn rho_initial_deriv(x: f64) -> f64 {
    0.5 * std::f64::consts::PI * (std::f64::consts::PI * x).cos()
}

/// Solves one characteristic foot-point equation
/// x + sign·√3·ρ₀(ξ)·t − ξ = 0 by Newton iteration with a bisection fallback.
fn characteristic_foot(t: f64, x: f64, sign: f64, tol: f64) -> Result<f64> {
    let sqrt3 = 3.0_f64.sqrt();
    let residual = |xi: f64| x + sign * sqrt3 * rho_initial(xi) * t - xi;

    let mut xi = x;
    let mut prev = residual(xi).abs();
    let mut growth = 0u32;
    for _ in 0..100 {
        let f = residual(xi);
        if f.abs() <= tol {
            return Ok(xi);
        }
        let df = sign * sqrt3 * rho_initial_deriv(xi) * t - 1.0;
        xi -= f / df;
        let now = residual(xi).abs();
        if now > prev {
            growth += 1;
            if growth >= 5 {
                break;
            }
        } else {
            growth = 0;
        }
        prev = now;
    }

    // bisection fallback over a bracket that must contain the foot point:
    // |ξ − x| = √3 t ρ₀(ξ) ≤ √3 t max ρ₀
    let half = sqrt3 * t * 1.5 + tol;
    let mut lo = x - half;
    let mut hi = x + half;
    let mut flo = residual(lo);
    if flo == 0.0 {
        return Ok(lo);
    }
    if (flo > 0.0) == (residual(hi) > 0.0) {
        return Err(Error::OracleFailure { residual: prev });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = residual(mid);
        if fm.abs() <= tol {
            return Ok(mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Err(Error::OracleFailure {
        residual: residual(0.5 * (lo + hi)).abs(),
    })
}

/// Exact smooth solution (ρ, u, p) of the γ = 3 Euler flow at (t, x) by the
/// method of characteristics. Valid while the flow stays smooth (the run in
/// question uses t ≤ 0.1).
pub fn euler_exact(t: f64, x: f64, tol: f64) -> Result<(f64, f64, f64)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let x1 = characteristic_foot(t, x, 1.0, tol)?;
    let x2 = characteristic_foot(t, x, -1.0, tol)?;
    let rho = 0.5 * (rho_initial(x1) + rho_initial(x2));
    let u = 3.0_f64.sqrt() * (rho - rho_initial(x1));
    let p = rho.powi(3);
    Ok((rho, u, p))
}

/// The smooth isentropic Euler flow: γ = 3, ρ₀ = 1 + sin(πx)/2, u₀ = 0,
/// p₀ = ρ₀^γ on [−1, 1] with periodic boundaries.
pub fn euler_smooth_problem() -> Problem {
    let gamma = EULER_GAMMA;
    let flux: SystemFlux = Arc::new(move |u: &[f64]| {
        let s = EulerState::from_conserved(u, gamma)?;
        Ok(euler_flux(&s).to_vec())
    });
    let wavespeed: WaveSpeedFn = Arc::new(move |u: &[f64]| {
        let s = EulerState::from_conserved(u, gamma)?;
        Ok(euler_wavespeed(&s))
    });
    let initial: InitialFn = Arc::new(move |p: Point| {
        let rho = rho_initial(p[0]);
        let state = EulerState::from_primitive(rho, 0.0, rho.powi(3), gamma)
            .expect("initial Euler state is admissible");
        state.conserved().to_vec()
    });
    let exact: ExactFn = Arc::new(move |t, p| {
        let (rho, u, pr) = euler_exact(t, p[0], 1e-13)?;
        let state = EulerState::from_primitive(rho, u, pr, gamma)?;
        Ok(state.conserved().to_vec())
    });
    Problem {
        name: "euler-smooth".into(),
        domain: Domain::interval(-1.0, 1.0).expect("unit interval"),
        n_components: 3,
        flux: ProblemFlux::System { flux, wavespeed },
        initial,
        boundary: BoundaryCondition::Periodic,
        exact: Some(exact),
        advection: None,
    }
}

/// Looks a problem up by its CLI name:
/// `advect-gauss | advect-cos2 | euler-smooth | advect-2d`.
pub fn problem_by_name(name: &str, bc: BcKind) -> Result<Problem> {
    match name {
        "advect-gauss" => linear_advection_problem([1.0, 0.0], AdvectionIc::Gaussian20, bc),
        "advect-cos2" => linear_advection_problem([1.0, 0.0], AdvectionIc::CosSq4Pi, bc),
        "advect-2d" => linear_advection_problem([1.0, 0.0], AdvectionIc::TwoDSine, bc),
        "euler-smooth" => {
            if bc == BcKind::Inflow {
                return Err(Error::InvalidArgument(
                    "the smooth Euler problem is periodic".into(),
                ));
            }
            Ok(euler_smooth_problem())
        }
        _ => Err(Error::Config(format!("unknown problem '{name}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gaussian_ic_peak() {
        let p = linear_advection_problem([1.0, 0.0], AdvectionIc::Gaussian20, BcKind::Periodic)
            .unwrap();
        assert_eq!((p.initial)([0.0, 0.0])[0], 1.0);
    }

    #[test]
    fn advection_exact_returns_to_ic_after_full_period() {
        let p = linear_advection_problem([1.0, 0.0], AdvectionIc::Gaussian20, BcKind::Periodic)
            .unwrap();
        let exact = p.exact.as_ref().unwrap();
        for &x in &[-0.8, -0.3, 0.0, 0.55, 1.0] {
            let e = exact(2.0, [x, 0.0]).unwrap()[0];
            assert_abs_diff_eq!(e, (p.initial)([x, 0.0])[0], epsilon = 1e-12);
        }
    }

    #[test]
    fn two_d_sine_value() {
        let p =
            linear_advection_problem([1.0, 0.0], AdvectionIc::TwoDSine, BcKind::Periodic).unwrap();
        assert_abs_diff_eq!((p.initial)([0.25, 0.25])[0], -0.5, epsilon = 1e-15);
    }

    #[test]
    fn inflow_matches_wrapped_profile() {
        // left data g_L(t) = u0(1 - mod(t, 2)) for unit speed on [-1, 1]
        let p =
            linear_advection_problem([1.0, 0.0], AdvectionIc::CosSq4Pi, BcKind::Inflow).unwrap();
        let BoundaryCondition::Inflow { left, .. } = &p.boundary else {
            panic!("expected inflow")
        };
        for &t in &[0.0_f64, 0.3, 1.7, 2.4] {
            let want = (p.initial)([1.0 - t.rem_euclid(2.0), 0.0])[0];
            assert_abs_diff_eq!(left(t)[0], want, epsilon = 1e-12);
        }
    }

    #[test]
    fn invalid_combinations_rejected() {
        assert!(
            linear_advection_problem([1.0, 0.5], AdvectionIc::Gaussian20, BcKind::Periodic)
                .is_err()
        );
        assert!(
            linear_advection_problem([1.0, 0.0], AdvectionIc::TwoDSine, BcKind::Inflow).is_err()
        );
    }

    #[test]
    fn advection_exact_satisfies_the_pde() {
        // |u_t + λ u_x| small under finite differences, h = 1e-4
        let p = linear_advection_problem([1.0, 0.0], AdvectionIc::Gaussian20, BcKind::Periodic)
            .unwrap();
        let exact = p.exact.as_ref().unwrap();
        let h = 1e-4;
        for i in 0..20 {
            let x = -0.9 + 0.09 * f64::from(i);
            let t = 0.37;
            let ut = (exact(t + h, [x, 0.0]).unwrap()[0] - exact(t - h, [x, 0.0]).unwrap()[0])
                / (2.0 * h);
            let ux = (exact(t, [x + h, 0.0]).unwrap()[0] - exact(t, [x - h, 0.0]).unwrap()[0])
                / (2.0 * h);
            assert!((ut + ux).abs() <= 1e-5, "residual {} at x={x}", ut + ux);
        }
    }

    #[test]
    fn euler_flux_stagnation_cases() {
        let s = EulerState::new(1.0, 0.0, 0.5, 3.0).unwrap();
        let f = euler_flux(&s);
        assert_abs_diff_eq!(f[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f[1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f[2], 0.0, epsilon = 1e-15);

        let s = EulerState::new(1.0, 1.0, 1.0, 3.0).unwrap();
        let f = euler_flux(&s);
        assert_abs_diff_eq!(f[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f[1], 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f[2], 2.0, epsilon = 1e-15);
    }

    #[test]
    fn euler_wavespeed_cases() {
        let s = EulerState::new(1.0, 0.0, 0.5, 3.0).unwrap();
        assert_abs_diff_eq!(euler_wavespeed(&s), 3.0_f64.sqrt(), epsilon = 1e-14);
        let s = EulerState::new(1.0, 1.0, 1.0, 3.0).unwrap();
        assert_abs_diff_eq!(euler_wavespeed(&s), 1.0 + 3.0_f64.sqrt(), epsilon = 1e-14);
        // scaling rho and E at rest with fixed p/rho leaves the speed unchanged
        let a = EulerState::from_primitive(1.0, 0.0, 2.0, 3.0).unwrap();
        let b = EulerState::from_primitive(4.0, 0.0, 8.0, 3.0).unwrap();
        assert_abs_diff_eq!(euler_wavespeed(&a), euler_wavespeed(&b), epsilon = 1e-14);
    }

    #[test]
    fn euler_state_invariants_enforced() {
        assert!(EulerState::new(-1.0, 0.0, 1.0, 3.0).is_err());
        assert!(EulerState::new(1.0, 10.0, 1.0, 3.0).is_err()); // e < 0
        assert!(EulerState::from_conserved(&[1.0, 0.0], 3.0).is_err());
    }

    #[test]
    fn euler_ic_values() {
        let p = euler_smooth_problem();
        let v = (p.initial)([0.5, 0.0]);
        assert_abs_diff_eq!(v[0], 1.5, epsilon = 1e-15); // rho = 1 + sin(pi/2)/2
        assert_abs_diff_eq!(v[1], 0.0, epsilon = 1e-15); // at rest
        for &x in &[-0.7, 0.0, 0.3] {
            let v = (p.initial)([x, 0.0]);
            let s = EulerState::from_conserved(&v, 3.0).unwrap();
            assert_abs_diff_eq!(s.pressure(), s.rho().powi(3), epsilon = 1e-13);
        }
    }

    #[test]
    fn euler_exact_at_t0_is_the_ic() {
        for &x in &[-0.9, -0.25, 0.0, 0.6, 1.0] {
            let (rho, u, p) = euler_exact(0.0, x, 1e-13).unwrap();
            assert_abs_diff_eq!(rho, rho_initial(x), epsilon = 1e-13);
            assert_eq!(u, 0.0);
            assert_abs_diff_eq!(p, rho_initial(x).powi(3), epsilon = 1e-13);
        }
    }

    #[test]
    fn euler_exact_characteristic_residuals_vanish() {
        let tol = 1e-13;
        let sqrt3 = 3.0_f64.sqrt();
        for &x in &[-0.8, -0.1, 0.4, 0.95] {
            let t = 0.1;
            let x1 = characteristic_foot(t, x, 1.0, tol).unwrap();
            let x2 = characteristic_foot(t, x, -1.0, tol).unwrap();
            assert!((x + sqrt3 * rho_initial(x1) * t - x1).abs() <= tol);
            assert!((x - sqrt3 * rho_initial(x2) * t - x2).abs() <= tol);
        }
    }

    #[test]
    fn euler_exact_matches_independent_reference() {
        // frozen values from a Fourier pseudospectral solve of the same flow
        // (512 modes, RK4 with dt = 2.5e-5, 2/3-rule dealiasing)
        let cases = [
            (0.0, 1.061331015028, -0.467704633468, 1.195508221505),
            (0.25, 1.297072934051, -0.351072349213, 2.182193164649),
            (-0.5, 0.519872704571, 0.0, 0.140504763224),
        ];
        for &(x, rho_ref, u_ref, p_ref) in &cases {
            let (rho, u, p) = euler_exact(0.1, x, 1e-13).unwrap();
            assert_abs_diff_eq!(rho, rho_ref, epsilon = 1e-4);
            assert_abs_diff_eq!(u, u_ref, epsilon = 1e-4);
            assert_abs_diff_eq!(p, p_ref, epsilon = 1e-4);
        }
    }

    #[test]
    fn euler_exact_pressure_isentropic() {
        for i in 0..40 {
            let x = -1.0 + 0.05 * f64::from(i);
            let (rho, _, p) = euler_exact(0.08, x, 1e-13).unwrap();
            assert_eq!(p, rho.powi(3));
        }
    }

    #[test]
    fn problem_lookup() {
        assert!(problem_by_name("advect-gauss", BcKind::Periodic).is_ok());
        assert!(problem_by_name("advect-cos2", BcKind::Inflow).is_ok());
        assert!(problem_by_name("euler-smooth", BcKind::Periodic).is_ok());
        assert!(problem_by_name("euler-smooth", BcKind::Inflow).is_err());
        assert!(problem_by_name("advect-2d", BcKind::Periodic).is_ok());
        assert!(problem_by_name("sod", BcKind::Periodic).is_err());
    }

    #[test]
    fn wave_speed_bounds() {
        let adv = problem_by_name("advect-gauss", BcKind::Periodic).unwrap();
        assert_abs_diff_eq!(
            adv.max_initial_wave_speed(100).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        let eul = euler_smooth_problem();
        let s = eul.max_initial_wave_speed(200).unwrap();
        // at rest: max(|u| + c) = sqrt(3 * rho_max^3 / rho_max) = sqrt(3) * 1.5
        assert_abs_diff_eq!(s, 3.0_f64.sqrt() * 1.5, epsilon = 1e-3);
        assert!(s.is_finite() && s > 0.0);
    }
}
