//! Run observables: momentum ∫u_N, energy ‖u_N‖², nodal error norms,
//! convergence orders and the semidiscrete identity residuals that serve as
//! conservation and stability evidence.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::fluxes::NumericalFlux;
use crate::problems::Problem;
use crate::semidiscretization::WeakOperator;
use crate::Point;

/// ∫ u_N dV. For P ≥ 1 this is wᵀu with w = M·1; otherwise the quadrature of
/// the interpolant is used directly.
pub fn momentum(op: &WeakOperator, u: &DVector<f64>) -> f64 {
    debug_assert_eq!(u.len(), op.space().len());
    if op.space().poly_count() >= 1 {
        op.load().dot(u)
    } else {
        op.interpolant_load().dot(u)
    }
}

/// ‖u_N‖²_{L²} under the assembly quadrature: uᵀMu.
pub fn energy(op: &WeakOperator, u: &DVector<f64>) -> f64 {
    op.mass_inner(u, u)
}

/// Unnormalized nodal error norms (max |e_n|, sqrt Σ e_n²).
pub fn error_norms(exact: &[f64], numeric: &[f64]) -> Result<(f64, f64)> {
    if exact.len() != numeric.len() {
        return Err(Error::DimensionMismatch {
            expected: exact.len(),
            actual: numeric.len(),
        });
    }
    let mut inf = 0.0_f64;
    let mut sq = 0.0_f64;
    for (e, n) in exact.iter().zip(numeric) {
        let d = (e - n).abs();
        inf = inf.max(d);
        sq += d * d;
    }
    Ok((inf, sq.sqrt()))
}

/// Least-squares slope of log(error) against log(1/N).
pub fn convergence_order(ns: &[usize], errors: &[f64]) -> Result<f64> {
    if ns.len() != errors.len() {
        return Err(Error::DimensionMismatch {
            expected: ns.len(),
            actual: errors.len(),
        });
    }
    if ns.len() < 2 {
        return Err(Error::InvalidArgument("need at least two levels".into()));
    }
    if errors.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::InvalidArgument("errors must be positive".into()));
    }
    let xs: Vec<f64> = ns.iter().map(|&n| -(n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|&e| e.ln()).collect();
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    Ok(sxy / sxx)
}

/// Residuals of the semidiscrete identities for a scalar 1D weak operator.
#[derive(Debug, Clone, Copy)]
pub struct IdentityResiduals {
    /// wᵀ(du/dt) + (f^num_R − f^num_L); zero for P ≥ 1 up to roundoff.
    pub conservation: f64,
    /// 2uᵀM(du/dt) − [λ(u_R² − u_L²) − 2(f^num_R u_R − f^num_L u_L)];
    /// defined for linear advection only.
    pub energy_rate: Option<f64>,
}

pub fn identity_residuals(
    op: &WeakOperator,
    flux: &NumericalFlux,
    problem: &Problem,
    t: f64,
    u: &DVector<f64>,
) -> Result<IdentityResiduals> {
    if problem.n_components != 1 || op.space().domain().dim() != 1 {
        return Err(Error::InvalidArgument(
            "identity residuals are defined for scalar 1D problems".into(),
        ));
    }
    let du = op.collocation_rhs(flux, problem, t, u)?;
    let bf = op.boundary_fluxes(flux, problem, t, u)?;
    let conservation = op.load().dot(&du) + (bf.fnum_r[0] - bf.fnum_l[0]);
    let energy_rate = problem.advection.map(|lambda| {
        let (ul, ur) = (bf.trace_l[0], bf.trace_r[0]);
        2.0 * op.mass_inner(u, &du)
            - (lambda[0] * (ur * ur - ul * ul) - 2.0 * (bf.fnum_r[0] * ur - bf.fnum_l[0] * ul))
    });
    Ok(IdentityResiduals {
        conservation,
        energy_rate,
    })
}

/// A dense evaluation of the solution for plotting.
#[derive(Debug, Clone)]
pub struct DenseTrace {
    pub points: Vec<Point>,
    /// Values per component.
    pub numeric: Vec<Vec<f64>>,
    pub exact: Option<Vec<Vec<f64>>>,
}

/// The nodal state captured at one time.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub time: f64,
    /// Nodal values per component.
    pub nodal: Vec<Vec<f64>>,
    pub dense: Option<DenseTrace>,
}

/// Time series and snapshots collected over a run.
#[derive(Debug, Clone, Default)]
pub struct RunRecord {
    pub times: Vec<f64>,
    /// ∫u_N per component at each recorded time.
    pub momentum_series: Vec<Vec<f64>>,
    /// Σ_components uᵀMu at each recorded time.
    pub energy_series: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    /// (err_inf, err_2) of the first component at the final time.
    pub final_errors: Option<(f64, f64)>,
}

impl RunRecord {
    pub fn record(&mut self, op: &WeakOperator, t: f64, u: &DVector<f64>, n_components: usize) {
        let n = op.space().len();
        let mut momenta = Vec::with_capacity(n_components);
        let mut total_energy = 0.0;
        for c in 0..n_components {
            let comp = u.rows(c * n, n).clone_owned();
            momenta.push(momentum(op, &comp));
            total_energy += energy(op, &comp);
        }
        self.times.push(t);
        self.momentum_series.push(momenta);
        self.energy_series.push(total_energy);
    }
}
