//! Radial kernels φ and their radial derivatives.
//!
//! A radial basis function depends on a point only through the distance to its
//! center, `φ(ε‖x − c‖)`. The families implemented here:
//!
//! - Gaussian           φ(r) = exp(−r²)
//! - multiquadric       φ(r) = sqrt(1 + r²)
//! - inverse quadratic  φ(r) = 1 / (1 + r²)
//! - polyharmonic       φ(r) = r^k (k odd), r^k log r (k even)
//!
//! The shape parameter ε scales the radial argument for the infinitely smooth
//! kernels; polyharmonic splines have no shape parameter (ε is stored as 1).

use crate::error::{Error, Result};
use crate::Point;

/// Kernel family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Gaussian,
    Multiquadric,
    InverseQuadratic,
    /// r^k with odd k ≥ 1. k = 3 is the cubic kernel, k = 5 the quintic.
    PhsOdd(u32),
    /// r^k log r with even k ≥ 2 (defined as 0 at r = 0).
    PhsEvenLog(u32),
}

impl KernelKind {
    pub fn is_polyharmonic(self) -> bool {
        matches!(self, KernelKind::PhsOdd(_) | KernelKind::PhsEvenLog(_))
    }
}

/// A radial kernel together with its shape parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    kind: KernelKind,
    shape: f64,
}

impl Kernel {
    /// Builds a kernel, validating the shape parameter and PHS exponent.
    /// The shape is ignored (stored as 1) for polyharmonic kinds.
    pub fn new(kind: KernelKind, shape: f64) -> Result<Self> {
        match kind {
            KernelKind::PhsOdd(k) => {
                if k % 2 == 0 || k == 0 {
                    return Err(Error::InvalidKernel(format!(
                        "polyharmonic exponent must be odd and positive, got {k}"
                    )));
                }
            }
            KernelKind::PhsEvenLog(k) => {
                if k % 2 == 1 || k < 2 {
                    return Err(Error::InvalidKernel(format!(
                        "log-polyharmonic exponent must be even and >= 2, got {k}"
                    )));
                }
            }
            _ => {
                if !(shape > 0.0) || !shape.is_finite() {
                    return Err(Error::InvalidKernel(format!(
                        "shape parameter must be positive and finite, got {shape}"
                    )));
                }
            }
        }
        let shape = if kind.is_polyharmonic() { 1.0 } else { shape };
        Ok(Kernel { kind, shape })
    }

    /// The cubic polyharmonic spline φ(r) = r³.
    pub fn cubic() -> Self {
        Kernel {
            kind: KernelKind::PhsOdd(3),
            shape: 1.0,
        }
    }

    /// The quintic polyharmonic spline φ(r) = r⁵.
    pub fn quintic() -> Self {
        Kernel {
            kind: KernelKind::PhsOdd(5),
            shape: 1.0,
        }
    }

    /// Parses a CLI kernel name: `gaussian | mq | iq | cubic | quintic |
    /// phs:<k> | phslog:<k>`. An explicit shape parameter is rejected for
    /// polyharmonic kinds, which do not use one.
    pub fn parse(name: &str, shape: Option<f64>) -> Result<Self> {
        let kind = match name {
            "gaussian" => KernelKind::Gaussian,
            "mq" => KernelKind::Multiquadric,
            "iq" => KernelKind::InverseQuadratic,
            "cubic" => KernelKind::PhsOdd(3),
            "quintic" => KernelKind::PhsOdd(5),
            _ => {
                if let Some(k) = name.strip_prefix("phs:") {
                    let k = k.parse::<u32>().map_err(|_| {
                        Error::InvalidKernel(format!("bad polyharmonic exponent in '{name}'"))
                    })?;
                    KernelKind::PhsOdd(k)
                } else if let Some(k) = name.strip_prefix("phslog:") {
                    let k = k.parse::<u32>().map_err(|_| {
                        Error::InvalidKernel(format!("bad polyharmonic exponent in '{name}'"))
                    })?;
                    KernelKind::PhsEvenLog(k)
                } else {
                    return Err(Error::InvalidKernel(format!("unknown kernel '{name}'")));
                }
            }
        };
        if kind.is_polyharmonic() {
            if shape.is_some() {
                return Err(Error::InvalidKernel(format!(
                    "kernel '{name}' takes no shape parameter"
                )));
            }
            Kernel::new(kind, 1.0)
        } else {
            Kernel::new(kind, shape.unwrap_or(1.0))
        }
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    /// φ(εr). Errors on negative r.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if r < 0.0 {
            return Err(Error::NegativeRadius(r));
        }
        Ok(self.value(r))
    }

    /// dφ(εr)/dr. Errors on negative r.
    pub fn eval_dr(&self, r: f64) -> Result<f64> {
        if r < 0.0 {
            return Err(Error::NegativeRadius(r));
        }
        Ok(self.deriv(r))
    }

    /// φ(εr) for r ≥ 0 (r comes from a norm on internal paths).
    pub(crate) fn value(&self, r: f64) -> f64 {
        debug_assert!(r >= 0.0);
        let s = self.shape * r;
        match self.kind {
            KernelKind::Gaussian => (-s * s).exp(),
            KernelKind::Multiquadric => (1.0 + s * s).sqrt(),
            KernelKind::InverseQuadratic => 1.0 / (1.0 + s * s),
            KernelKind::PhsOdd(k) => r.powi(k as i32),
            // r^k log r -> 0 as r -> 0 for k >= 2
            KernelKind::PhsEvenLog(k) => {
                if r == 0.0 {
                    0.0
                } else {
                    r.powi(k as i32) * r.ln()
                }
            }
        }
    }

    /// dφ(εr)/dr for r ≥ 0.
    pub(crate) fn deriv(&self, r: f64) -> f64 {
        debug_assert!(r >= 0.0);
        let e = self.shape;
        let s = e * r;
        match self.kind {
            KernelKind::Gaussian => -2.0 * e * s * (-s * s).exp(),
            KernelKind::Multiquadric => e * s / (1.0 + s * s).sqrt(),
            KernelKind::InverseQuadratic => {
                let d = 1.0 + s * s;
                -2.0 * e * s / (d * d)
            }
            KernelKind::PhsOdd(k) => f64::from(k) * r.powi(k as i32 - 1),
            // d/dr [r^k log r] = r^(k-1) (k log r + 1) -> 0 as r -> 0 for k >= 2
            KernelKind::PhsEvenLog(k) => {
                if r == 0.0 {
                    0.0
                } else {
                    r.powi(k as i32 - 1) * (f64::from(k) * r.ln() + 1.0)
                }
            }
        }
    }

    /// Whether dφ/dr has limit 0 at r = 0, making the gradient of
    /// x ↦ φ(ε‖x − c‖) well defined (and zero) at the center.
    fn gradient_vanishes_at_center(&self) -> bool {
        !matches!(self.kind, KernelKind::PhsOdd(1))
    }

    /// Gradient of x ↦ φ(ε‖x − center‖) at x, for d ∈ {1, 2}.
    ///
    /// At x = center the gradient is the zero vector for every kernel whose
    /// radial derivative vanishes there; for φ(r) = r the gradient is
    /// undefined at the center and an error is returned.
    pub fn gradient(&self, x: Point, center: Point) -> Result<Point> {
        let dx = x[0] - center[0];
        let dy = x[1] - center[1];
        let r = (dx * dx + dy * dy).sqrt();
        if r == 0.0 {
            if self.gradient_vanishes_at_center() {
                return Ok([0.0, 0.0]);
            }
            return Err(Error::SingularKernelPoint);
        }
        let g = self.deriv(r) / r;
        Ok([g * dx, g * dy])
    }
}

/// Euclidean distance between two points (coordinate 1 is zero in 1D).
pub(crate) fn distance(a: Point, b: Point) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}
