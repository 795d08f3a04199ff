//! Numerical flux functions for the weak boundary treatment.
//!
//! A numerical flux f^num(a, b) couples the interior boundary trace with the
//! boundary data (or with the opposite trace, for periodic coupling). The
//! fluxes used here are consistent, f^num(u, u) = f(u), and monotone
//! (nondecreasing in the first argument, nonincreasing in the second).
//! Godunov's flux is an E-flux, which is what makes the weak methods energy
//! stable for nonlinear scalar problems.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Scalar flux handle f(u).
pub type ScalarFlux = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// System flux handle F(U); validates the state and may reject it.
pub type SystemFlux = Arc<dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync>;

/// Largest characteristic speed of a state.
pub type WaveSpeedFn = Arc<dyn Fn(&[f64]) -> Result<f64> + Send + Sync>;

/// Sampling density for the Godunov extremum search.
const GODUNOV_GRID: usize = 1024;

/// Bracket width at which the Godunov bisection stops.
const GODUNOV_TOL: f64 = 1e-12;

/// Upwind flux for linear advection with speed λ: picks the upstream value.
pub fn upwind_flux(speed: f64, a: f64, b: f64) -> f64 {
    if speed >= 0.0 {
        speed * a
    } else {
        speed * b
    }
}

/// (f(a) + f(b)) / 2. Energy conserving but not dissipative.
pub fn central_flux(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    0.5 * (f(a) + f(b))
}

/// Godunov flux: min of f over [a, b] when a ≤ b, max over [b, a] otherwise.
///
/// The extremum is located by evaluating f at the endpoints and at interior
/// critical points, found as sign changes of a centered difference of f on a
/// dense grid and refined by bisection.
pub fn godunov_flux(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    let minimize = a <= b;
    let (lo, hi) = if minimize { (a, b) } else { (b, a) };

    let eval = |u: f64| -> Result<f64> {
        let v = f(u);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                context: "flux",
                location: Some([u, 0.0]),
            });
        }
        Ok(v)
    };

    let mut best = eval(lo)?;
    let combine = |best: f64, v: f64| if minimize { best.min(v) } else { best.max(v) };
    best = combine(best, eval(hi)?);
    if hi - lo < GODUNOV_TOL {
        return Ok(best);
    }

    let h = (hi - lo) / (GODUNOV_GRID - 1) as f64;
    let grid: Vec<f64> = (0..GODUNOV_GRID).map(|i| lo + h * i as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&u| eval(u)).collect::<Result<_>>()?;
    for v in &values {
        best = combine(best, *v);
    }

    // centered difference sign pattern; a sign change brackets a critical point
    let slope = |i: usize| values[i + 1] - values[i - 1];
    let delta = 0.5 * h;
    for i in 1..GODUNOV_GRID - 2 {
        let s0 = slope(i);
        let s1 = slope(i + 1);
        if s0 == 0.0 || s0.signum() != s1.signum() {
            let mut left = grid[i];
            let mut right = grid[i + 1];
            let sign_at = |x: f64| -> Result<f64> { Ok(eval(x + delta)? - eval(x - delta)?) };
            let mut s_left = sign_at(left)?;
            for _ in 0..100 {
                if right - left <= GODUNOV_TOL {
                    break;
                }
                let mid = 0.5 * (left + right);
                let s_mid = sign_at(mid)?;
                if s_mid == 0.0 {
                    // landed exactly on the critical point
                    left = mid;
                    right = mid;
                    break;
                }
                if (s_mid > 0.0) == (s_left > 0.0) {
                    left = mid;
                    s_left = s_mid;
                } else {
                    right = mid;
                }
            }
            best = combine(best, eval(0.5 * (left + right))?);
        }
    }
    Ok(best)
}

/// Rusanov (local Lax–Friedrichs) flux for systems:
/// ½(F(UL) + F(UR)) − ½ max(s(UL), s(UR)) (UR − UL).
pub fn rusanov_flux(
    flux: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    wavespeed: &dyn Fn(&[f64]) -> Result<f64>,
    ul: &[f64],
    ur: &[f64],
) -> Result<Vec<f64>> {
    if ul.len() != ur.len() {
        return Err(Error::DimensionMismatch {
            expected: ul.len(),
            actual: ur.len(),
        });
    }
    let fl = flux(ul)?;
    let fr = flux(ur)?;
    let s = wavespeed(ul)?.max(wavespeed(ur)?);
    if !s.is_finite() || s < 0.0 {
        return Err(Error::InvalidState(format!(
            "non-finite or negative wave speed {s}"
        )));
    }
    Ok(fl
        .iter()
        .zip(&fr)
        .zip(ul.iter().zip(ur))
        .map(|((&l, &r), (&sl, &sr))| 0.5 * (l + r) - 0.5 * s * (sr - sl))
        .collect())
}

/// A selected numerical flux, as named on the command line:
/// `upwind | godunov | central | rusanov`.
#[derive(Clone)]
pub enum NumericalFlux {
    Upwind {
        speed: f64,
    },
    Godunov {
        flux: ScalarFlux,
    },
    Central {
        flux: ScalarFlux,
    },
    Rusanov {
        flux: SystemFlux,
        wavespeed: WaveSpeedFn,
    },
}

impl std::fmt::Debug for NumericalFlux {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NumericalFlux::Upwind { speed } => write!(f, "Upwind({speed})"),
            NumericalFlux::Godunov { .. } => write!(f, "Godunov"),
            NumericalFlux::Central { .. } => write!(f, "Central"),
            NumericalFlux::Rusanov { .. } => write!(f, "Rusanov"),
        }
    }
}

impl NumericalFlux {
    /// Evaluates the flux for a scalar state pair.
    pub fn scalar(&self, a: f64, b: f64) -> Result<f64> {
        match self {
            NumericalFlux::Upwind { speed } => Ok(upwind_flux(*speed, a, b)),
            NumericalFlux::Godunov { flux } => godunov_flux(flux.as_ref(), a, b),
            NumericalFlux::Central { flux } => Ok(central_flux(flux.as_ref(), a, b)),
            NumericalFlux::Rusanov { .. } => Err(Error::InvalidArgument(
                "the Rusanov flux couples system states, not scalars".into(),
            )),
        }
    }

    /// Evaluates the flux for a pair of system states.
    pub fn system(&self, ul: &[f64], ur: &[f64]) -> Result<Vec<f64>> {
        match self {
            NumericalFlux::Rusanov { flux, wavespeed } => {
                rusanov_flux(flux.as_ref(), wavespeed.as_ref(), ul, ur)
            }
            _ if ul.len() == 1 && ur.len() == 1 => Ok(vec![self.scalar(ul[0], ur[0])?]),
            _ => Err(Error::InvalidArgument(
                "scalar numerical flux applied to a system state".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn burgers() -> impl Fn(f64) -> f64 {
        |u: f64| 0.5 * u * u
    }

    #[test]
    fn upwind_picks_upstream_side() {
        assert_eq!(upwind_flux(2.0, 3.0, 7.0), 6.0);
        assert_eq!(upwind_flux(-2.0, 3.0, 7.0), -14.0);
        assert_eq!(upwind_flux(1.0, 5.0, 5.0), 5.0);
        assert_eq!(upwind_flux(0.0, 3.0, 7.0), 0.0);
    }

    #[test]
    fn central_averages() {
        let id = |u: f64| u;
        assert_eq!(central_flux(&id, 1.0, 3.0), 2.0);
        assert_eq!(central_flux(&burgers(), 0.0, 2.0), 1.0);
        assert_abs_diff_eq!(
            central_flux(&burgers(), 0.7, 0.7),
            0.5 * 0.49,
            epsilon = 1e-15
        );
    }

    #[test]
    fn godunov_burgers_sonic_point() {
        // convex flux, a < 0 < b: minimum sits at the sonic point u = 0
        let g = godunov_flux(&burgers(), -1.0, 1.0).unwrap();
        assert_abs_diff_eq!(g, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn godunov_burgers_shock_case() {
        // a > b: maximum of u²/2 over [-1, 1] is attained at the endpoints
        let g = godunov_flux(&burgers(), 1.0, -1.0).unwrap();
        assert_abs_diff_eq!(g, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn godunov_consistency() {
        for &u in &[-2.0, -0.3, 0.0, 0.9, 4.2] {
            let g = godunov_flux(&burgers(), u, u).unwrap();
            assert_abs_diff_eq!(g, 0.5 * u * u, epsilon = 1e-12);
        }
    }

    #[test]
    fn godunov_interior_maximum_of_wiggly_flux() {
        // sin has interior extrema the endpoint scan would miss
        let f = |u: f64| u.sin();
        let g = godunov_flux(&f, 0.0, std::f64::consts::PI).unwrap();
        assert_abs_diff_eq!(g, 0.0, epsilon = 1e-10);
        let g = godunov_flux(&f, std::f64::consts::PI, 0.0).unwrap();
        assert_abs_diff_eq!(g, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn godunov_rejects_non_finite_flux() {
        let f = |u: f64| 1.0 / (u - 1.0);
        assert!(godunov_flux(&f, -1.0, 1.0).is_err());
        let g = |_: f64| f64::NAN;
        assert!(godunov_flux(&g, 0.0, 1.0).is_err());
    }

    #[test]
    fn godunov_is_an_e_flux() {
        // (b - a) (f^num(a, b) - f(u)) <= 0 for all u between a and b
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let f = burgers();
        for _ in 0..200 {
            let a = rng.gen_range(-2.0..2.0);
            let b = rng.gen_range(-2.0..2.0);
            let fnum = godunov_flux(&f, a, b).unwrap();
            for k in 0..50 {
                let u = a + (b - a) * f64::from(k) / 49.0;
                assert!((b - a) * (fnum - f(u)) <= 1e-12, "a={a} b={b} u={u}");
            }
        }
    }

    #[test]
    fn monotone_in_both_arguments() {
        // nondecreasing in the first argument, nonincreasing in the second
        let f = burgers();
        let grid: Vec<f64> = (0..50).map(|i| -2.0 + 4.0 * f64::from(i) / 49.0).collect();
        for flux in [
            NumericalFlux::Upwind { speed: 1.3 },
            NumericalFlux::Godunov { flux: Arc::new(f) },
        ] {
            for &b in &grid {
                let mut prev = f64::NEG_INFINITY;
                for &a in &grid {
                    let v = flux.scalar(a, b).unwrap();
                    assert!(
                        v >= prev - 1e-12,
                        "{flux:?} not monotone in a at ({a}, {b})"
                    );
                    prev = v;
                }
            }
            for &a in &grid {
                let mut prev = f64::INFINITY;
                for &b in &grid {
                    let v = flux.scalar(a, b).unwrap();
                    assert!(
                        v <= prev + 1e-12,
                        "{flux:?} not monotone in b at ({a}, {b})"
                    );
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn scalar_consistency_for_all_fluxes() {
        let fluxes = [
            NumericalFlux::Upwind { speed: 1.0 },
            NumericalFlux::Godunov {
                flux: Arc::new(burgers()),
            },
            NumericalFlux::Central {
                flux: Arc::new(burgers()),
            },
        ];
        for flux in &fluxes {
            for k in 0..100 {
                let u = -3.0 + 6.0 * f64::from(k) / 99.0;
                let want = match flux {
                    NumericalFlux::Upwind { speed } => speed * u,
                    _ => 0.5 * u * u,
                };
                assert_abs_diff_eq!(flux.scalar(u, u).unwrap(), want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn rusanov_consistency_and_upwind_reduction() {
        let lin_flux = |u: &[f64]| -> Result<Vec<f64>> { Ok(vec![2.0 * u[0]]) };
        let speed = |_: &[f64]| -> Result<f64> { Ok(2.0) };
        // consistency
        let v = rusanov_flux(&lin_flux, &speed, &[1.5], &[1.5]).unwrap();
        assert_abs_diff_eq!(v[0], 3.0, epsilon = 1e-14);
        // scalar linear case with s = |lambda| reduces to the upwind flux
        let v = rusanov_flux(&lin_flux, &speed, &[1.0], &[5.0]).unwrap();
        assert_abs_diff_eq!(v[0], 2.0 * 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rusanov_rejects_mismatched_states() {
        let f = |u: &[f64]| -> Result<Vec<f64>> { Ok(u.to_vec()) };
        let s = |_: &[f64]| -> Result<f64> { Ok(1.0) };
        assert!(rusanov_flux(&f, &s, &[1.0, 2.0], &[1.0]).is_err());
    }
}
