//! Explicit time integration: SSPRK(3,3), explicit Euler, the CFL step rule
//! and the fixed-step trajectory driver.

use nalgebra::DVector;

use crate::error::{Error, Result};

/// Available time-stepping schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    SspRk33,
    ExplicitEuler,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ssprk33" => Ok(Scheme::SspRk33),
            "euler" => Ok(Scheme::ExplicitEuler),
            _ => Err(Error::Config(format!("unknown scheme '{s}'"))),
        }
    }
}

/// Time-stepping parameters of a run.
#[derive(Debug, Clone)]
pub struct TimeStepConfig {
    /// CFL constant C in Δt = C|Ω| / (N max|f'|).
    pub cfl: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    /// Times the driver lands on exactly (shortening steps as needed).
    pub snapshot_times: Vec<f64>,
}

impl Default for TimeStepConfig {
    fn default() -> Self {
        TimeStepConfig {
            cfl: 0.1,
            t_end: 0.0,
            scheme: Scheme::SspRk33,
            snapshot_times: Vec::new(),
        }
    }
}

/// A semidiscrete right-hand side du/dt = L(t, u), with an optional
/// boundary-enforcement hook applied after every stage.
pub trait Rhs {
    fn eval(&self, t: f64, u: &DVector<f64>) -> Result<DVector<f64>>;

    /// Called after each stage with the stage time; default is no-op.
    fn apply_boundary(&self, _t: f64, _u: &mut DVector<f64>) {}
}

impl<F> Rhs for F
where
    F: Fn(f64, &DVector<f64>) -> Result<DVector<f64>>,
{
    fn eval(&self, t: f64, u: &DVector<f64>) -> Result<DVector<f64>> {
        self(t, u)
    }
}

/// Δt = C·|Ω| / (N·max|f'(u)|).
pub fn cfl_timestep(cfl: f64, domain_measure: f64, n: usize, max_wave_speed: f64) -> Result<f64> {
    if !(cfl > 0.0 && domain_measure > 0.0) || n == 0 {
        return Err(Error::InvalidArgument(
            "CFL constant, domain measure and node count must be positive".into(),
        ));
    }
    if max_wave_speed < 0.0 || !max_wave_speed.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "bad wave speed {max_wave_speed}"
        )));
    }
    if max_wave_speed == 0.0 {
        return Err(Error::ZeroWaveSpeed);
    }
    Ok(cfl * domain_measure / (n as f64 * max_wave_speed))
}

fn check_finite(u: &DVector<f64>, t: f64, stage: usize) -> Result<()> {
    if u.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::BlowUp {
            t,
            stage,
            last: None,
        })
    }
}

/// One SSPRK(3,3) step in Shu–Osher form:
///
/// u¹ = u + Δt L(t, u)
/// u² = ¾u + ¼(u¹ + Δt L(t + Δt, u¹))
/// u⁺ = ⅓u + ⅔(u² + Δt L(t + Δt/2, u²))
pub fn ssprk33_step<R: Rhs + ?Sized>(
    rhs: &R,
    t: f64,
    u: &DVector<f64>,
    dt: f64,
) -> Result<DVector<f64>> {
    let mut u1 = u + dt * rhs.eval(t, u)?;
    check_finite(&u1, t, 1)?;
    rhs.apply_boundary(t + dt, &mut u1);

    let mut u2 = 0.75 * u + 0.25 * (&u1 + dt * rhs.eval(t + dt, &u1)?);
    check_finite(&u2, t, 2)?;
    rhs.apply_boundary(t + 0.5 * dt, &mut u2);

    let mut next = (1.0 / 3.0) * u + (2.0 / 3.0) * (&u2 + dt * rhs.eval(t + 0.5 * dt, &u2)?);
    check_finite(&next, t, 3)?;
    rhs.apply_boundary(t + dt, &mut next);
    Ok(next)
}

/// One explicit Euler step u + Δt L(t, u).
pub fn euler_step<R: Rhs + ?Sized>(
    rhs: &R,
    t: f64,
    u: &DVector<f64>,
    dt: f64,
) -> Result<DVector<f64>> {
    let mut next = u + dt * rhs.eval(t, u)?;
    check_finite(&next, t, 1)?;
    rhs.apply_boundary(t + dt, &mut next);
    Ok(next)
}

/// Integrates to t_end with fixed Δt, shortening steps to land exactly on
/// every snapshot time and on t_end. The callback runs after every accepted
/// step; a blow-up aborts with the last finite state attached.
pub fn integrate_to<R, F>(
    rhs: &R,
    u0: &DVector<f64>,
    config: &TimeStepConfig,
    dt: f64,
    mut on_step: F,
) -> Result<DVector<f64>>
where
    R: Rhs + ?Sized,
    F: FnMut(f64, &DVector<f64>),
{
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "time step must be positive, got {dt}"
        )));
    }
    let t_end = config.t_end;
    let eps = 1e-12 * t_end.abs().max(1.0);

    let mut snapshots: Vec<f64> = config
        .snapshot_times
        .iter()
        .copied()
        .filter(|&s| s > eps && s < t_end - eps)
        .collect();
    snapshots.sort_by(f64::total_cmp);
    snapshots.dedup_by(|a, b| (*a - *b).abs() <= eps);

    let mut u = u0.clone();
    let mut t = 0.0;
    let mut next_snapshot = 0usize;
    while t < t_end - eps {
        let mut target = t + dt;
        if target > t_end - eps {
            target = t_end;
        }
        if let Some(&s) = snapshots.get(next_snapshot) {
            if s <= target + eps {
                target = s;
                next_snapshot += 1;
            }
        }
        let h = target - t;
        let stepped = match config.scheme {
            Scheme::SspRk33 => ssprk33_step(rhs, t, &u, h),
            Scheme::ExplicitEuler => euler_step(rhs, t, &u, h),
        };
        u = stepped.map_err(|e| match e {
            Error::BlowUp { t, stage, .. } => Error::BlowUp {
                t,
                stage,
                last: Some(u.as_slice().to_vec()),
            },
            other => other,
        })?;
        t = target;
        on_step(t, &u);
    }
    Ok(u)
}
