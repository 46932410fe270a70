//! Conformal metric models: the ambient hyperbolic metrics on disk and upper
//! half-plane, the conical and cusp model densities, pullbacks through
//! developing maps, and grid-sampled log-densities. All metrics have
//! curvature −1 where defined; `log_density_gradient_check` measures the
//! Liouville residual |Δu − e^{2u}| as the numerical certificate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::devmap::{DevMapError, DevelopingMapSpec};

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("evaluation at the singular point z = 0")]
    AtPuncture,
    #[error("point {0} outside the metric's domain")]
    OutsideDomain(Complex64),
    #[error("point {0} within the near-puncture guard radius {1:.3e}")]
    NearPuncture(Complex64, f64),
    #[error("cone parameter theta must be positive and ≠ 1, got {0}")]
    InvalidTheta(f64),
    #[error("grid spec inconsistent: {0}")]
    BadGrid(String),
    #[error("point {0} outside the sampled grid")]
    OutsideGrid(Complex64),
    #[error("path needs at least one point")]
    EmptyPath,
    #[error(transparent)]
    DevMap(#[from] DevMapError),
}

/// A conformal metric `e^{2u} |dz|²`, described by its model.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ConformalMetric {
    /// `4/(1−|z|²)² |dz|²` on the unit disk.
    Disk,
    /// `1/y² |dz|²` on the upper half-plane.
    HalfPlane,
    /// `4θ²|z|^{2θ−2}/(1−|z|^{2θ})² |dz|²` on the punctured disk.
    Conical { theta: f64 },
    /// `|z|^{−2}(ln|z|)^{−2} |dz|²` on the punctured disk.
    Cusp,
    /// Pullback of `base` through the developing map.
    Pullback { map: DevelopingMapSpec, base: Box<ConformalMetric> },
    /// Bilinearly interpolated log-density samples on a rectangular grid.
    Grid(GridSampled),
}

/// Rectangular grid of log-density samples `u`, row-major with `x` fastest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSampled {
    pub x0: f64,
    pub y0: f64,
    pub dx: f64,
    pub dy: f64,
    pub nx: usize,
    pub ny: usize,
    pub u: Vec<f64>,
}

impl GridSampled {
    /// Bilinear interpolation of u; density itself may blow up polynomially
    /// near a singularity while u stays smooth, so u is what's interpolated.
    pub fn interpolate_u(&self, z: Complex64) -> Result<f64, MetricError> {
        let fx = (z.re - self.x0) / self.dx;
        let fy = (z.im - self.y0) / self.dy;
        if !(0.0..=(self.nx - 1) as f64).contains(&fx)
            || !(0.0..=(self.ny - 1) as f64).contains(&fy)
        {
            return Err(MetricError::OutsideGrid(z));
        }
        let ix = (fx.floor() as usize).min(self.nx - 2);
        let iy = (fy.floor() as usize).min(self.ny - 2);
        let tx = fx - ix as f64;
        let ty = fy - iy as f64;
        let at = |i: usize, j: usize| self.u[j * self.nx + i];
        let bottom = (1.0 - tx) * at(ix, iy) + tx * at(ix + 1, iy);
        let top = (1.0 - tx) * at(ix, iy + 1) + tx * at(ix + 1, iy + 1);
        Ok((1.0 - ty) * bottom + ty * top)
    }
}

/// Closed-form conical density; θ = 1 reproduces the smooth disk density.
pub fn conical_density(theta: f64, z: Complex64) -> f64 {
    let r = z.norm();
    let r2t = r.powf(2.0 * theta);
    4.0 * theta * theta * r.powf(2.0 * theta - 2.0) / ((1.0 - r2t) * (1.0 - r2t))
}

/// Closed-form cusp density.
pub fn cusp_density(z: Complex64) -> f64 {
    let r = z.norm();
    let l = r.ln();
    1.0 / (r * r * l * l)
}

impl ConformalMetric {
    pub fn conical(theta: f64) -> Result<Self, MetricError> {
        if theta <= 0.0 || theta == 1.0 {
            return Err(MetricError::InvalidTheta(theta));
        }
        Ok(ConformalMetric::Conical { theta })
    }

    /// Check invariants after deserialization.
    pub fn validate(&self) -> Result<(), MetricError> {
        match self {
            ConformalMetric::Conical { theta } => {
                if *theta <= 0.0 || *theta == 1.0 {
                    return Err(MetricError::InvalidTheta(*theta));
                }
            }
            ConformalMetric::Pullback { base, .. } => base.validate()?,
            ConformalMetric::Grid(g) => {
                if g.nx < 2 || g.ny < 2 || g.dx <= 0.0 || g.dy <= 0.0 {
                    return Err(MetricError::BadGrid("need nx,ny ≥ 2 and dx,dy > 0".into()));
                }
                if g.u.len() != g.nx * g.ny {
                    return Err(MetricError::BadGrid(format!(
                        "expected {} samples, got {}",
                        g.nx * g.ny,
                        g.u.len()
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// The density e^{2u}(z), the coefficient of |dz|².
    pub fn density(&self, z: Complex64) -> Result<f64, MetricError> {
        match self {
            ConformalMetric::Disk => {
                if z.norm() >= 1.0 {
                    return Err(MetricError::OutsideDomain(z));
                }
                let s = 1.0 - z.norm_sqr();
                Ok(4.0 / (s * s))
            }
            ConformalMetric::HalfPlane => {
                if z.im <= 0.0 {
                    return Err(MetricError::OutsideDomain(z));
                }
                Ok(1.0 / (z.im * z.im))
            }
            ConformalMetric::Conical { theta } => {
                check_punctured(z)?;
                Ok(conical_density(*theta, z))
            }
            ConformalMetric::Cusp => {
                check_punctured(z)?;
                Ok(cusp_density(z))
            }
            ConformalMetric::Pullback { map, base } => {
                let fz = map.eval(z)?;
                let dfz = map.deriv(z)?;
                Ok(base.density(fz)? * dfz.norm_sqr())
            }
            ConformalMetric::Grid(g) => Ok((2.0 * g.interpolate_u(z)?).exp()),
        }
    }

    /// Log-density u(z) = ½ log density.
    pub fn log_density(&self, z: Complex64) -> Result<f64, MetricError> {
        match self {
            ConformalMetric::Grid(g) => g.interpolate_u(z),
            _ => Ok(0.5 * self.density(z)?.ln()),
        }
    }

    /// Liouville residual |Δu − e^{2u}| from a 5-point Laplacian at spacing
    /// h. This is the curvature defect |K + 1| scaled by the density.
    pub fn log_density_gradient_check(&self, z: Complex64, h: f64) -> Result<f64, MetricError> {
        if self.is_singular_at_origin() && z.norm() < 10.0 * h {
            return Err(MetricError::NearPuncture(z, 10.0 * h));
        }
        let u0 = self.log_density(z)?;
        let ue = self.log_density(z + Complex64::new(h, 0.0))?;
        let uw = self.log_density(z - Complex64::new(h, 0.0))?;
        let un = self.log_density(z + Complex64::new(0.0, h))?;
        let us = self.log_density(z - Complex64::new(0.0, h))?;
        let lap = (ue + uw + un + us - 4.0 * u0) / (h * h);
        Ok((lap - (2.0 * u0).exp()).abs())
    }

    /// Midpoint-rule length of a polyline; refine by subdividing the path.
    pub fn curve_length(&self, path: &[Complex64]) -> Result<f64, MetricError> {
        if path.is_empty() {
            return Err(MetricError::EmptyPath);
        }
        let mut total = 0.0;
        for seg in path.windows(2) {
            let mid = 0.5 * (seg[0] + seg[1]);
            total += self.density(mid)?.sqrt() * (seg[1] - seg[0]).norm();
        }
        Ok(total)
    }

    fn is_singular_at_origin(&self) -> bool {
        match self {
            ConformalMetric::Conical { .. } | ConformalMetric::Cusp => true,
            ConformalMetric::Pullback { .. } => true,
            _ => false,
        }
    }
}

fn check_punctured(z: Complex64) -> Result<(), MetricError> {
    if z.norm() == 0.0 {
        return Err(MetricError::AtPuncture);
    }
    if z.norm() >= 1.0 {
        return Err(MetricError::OutsideDomain(z));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::devmap::DevelopingMapSpec;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn density_closed_forms() {
        let m = ConformalMetric::conical(0.5).unwrap();
        assert!((m.density(c(0.5, 0.0)).unwrap() - 8.0).abs() < 1e-12);

        let cusp = ConformalMetric::Cusp;
        let want = 1.0 / (0.01 * (0.1f64.ln()).powi(2));
        let got = cusp.density(c(0.1, 0.0)).unwrap();
        assert!((got - want).abs() < 1e-10);
        assert!((got - 18.8612).abs() < 1e-3);

        assert!((ConformalMetric::Disk.density(c(0.0, 0.0)).unwrap() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn density_domain_errors() {
        let m = ConformalMetric::conical(0.5).unwrap();
        assert!(matches!(m.density(c(0.0, 0.0)), Err(MetricError::AtPuncture)));
        assert!(matches!(m.density(c(1.2, 0.0)), Err(MetricError::OutsideDomain(_))));
        assert!(matches!(
            ConformalMetric::HalfPlane.density(c(0.5, -0.1)),
            Err(MetricError::OutsideDomain(_))
        ));
    }

    #[test]
    fn conical_theta_validated() {
        assert!(ConformalMetric::conical(-0.5).is_err());
        assert!(ConformalMetric::conical(1.0).is_err());
        assert!(ConformalMetric::conical(2.5).is_ok());
    }

    #[test]
    fn curvature_residual_examples() {
        let h = 1e-3;
        let disk = ConformalMetric::Disk;
        assert!(disk.log_density_gradient_check(c(0.3, 0.0), h).unwrap() <= 1e-5);

        let conical = ConformalMetric::conical(0.7).unwrap();
        assert!(conical.log_density_gradient_check(c(0.4, 0.0), h).unwrap() <= 1e-4);

        let cusp = ConformalMetric::Cusp;
        assert!(cusp.log_density_gradient_check(c(0.2, 0.0), 1e-4).unwrap() <= 1e-4);
    }

    #[test]
    fn residual_decreases_quadratically() {
        let m = ConformalMetric::conical(0.5).unwrap();
        let z = c(0.35, 0.2);
        let r1 = m.log_density_gradient_check(z, 2e-3).unwrap();
        let r2 = m.log_density_gradient_check(z, 1e-3).unwrap();
        let ratio = r1 / r2;
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn near_puncture_guard() {
        let m = ConformalMetric::Cusp;
        assert!(matches!(
            m.log_density_gradient_check(c(0.005, 0.0), 1e-3),
            Err(MetricError::NearPuncture(..))
        ));
    }

    #[test]
    fn curve_length_examples() {
        let h = ConformalMetric::HalfPlane;
        let y = 100.0;
        let got = h.curve_length(&[c(0.0, y), c(2.0 * PI, y)]).unwrap();
        assert!((got - 2.0 * PI / y).abs() < 1e-12);

        assert_eq!(ConformalMetric::Disk.curve_length(&[c(0.3, 0.0)]).unwrap(), 0.0);

        let n = 10_000;
        let path: Vec<Complex64> = (0..=n).map(|j| c(0.5 * j as f64 / n as f64, 0.0)).collect();
        let got = ConformalMetric::Disk.curve_length(&path).unwrap();
        assert!((got - 2.0 * 0.5f64.atanh()).abs() < 1e-6, "got {got}");
    }

    #[test]
    fn conical_is_power_pullback() {
        let alpha = 0.6;
        let pb = ConformalMetric::Pullback {
            map: DevelopingMapSpec::power(alpha).unwrap(),
            base: Box::new(ConformalMetric::Disk),
        };
        let model = ConformalMetric::conical(alpha).unwrap();
        for j in 0..16 {
            let z = Complex64::from_polar(0.1 + 0.04 * j as f64, 0.4 * j as f64);
            let a = pb.density(z).unwrap();
            let b = model.density(z).unwrap();
            assert!((a - b).abs() <= 1e-10 * b.max(1.0), "at {z}: {a} vs {b}");
        }
    }

    #[test]
    fn cusp_is_log_pullback() {
        let pb = ConformalMetric::Pullback {
            map: DevelopingMapSpec::log_map(),
            base: Box::new(ConformalMetric::HalfPlane),
        };
        for j in 0..16 {
            let z = Complex64::from_polar(0.1 + 0.04 * j as f64, 0.4 * j as f64);
            let a = pb.density(z).unwrap();
            let b = ConformalMetric::Cusp.density(z).unwrap();
            assert!((a - b).abs() <= 1e-10 * b.max(1.0), "at {z}: {a} vs {b}");
        }
    }

    #[test]
    fn pullback_chain_rule() {
        let map = DevelopingMapSpec::power(0.5).unwrap();
        let base = ConformalMetric::conical(0.8).unwrap();
        let pb = ConformalMetric::Pullback { map: map.clone(), base: Box::new(base.clone()) };
        let z = c(0.3, 0.2);
        let lhs = pb.density(z).unwrap();
        let rhs = base.density(map.eval(z).unwrap()).unwrap() * map.deriv(z).unwrap().norm_sqr();
        assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1.0));
    }

    #[test]
    fn grid_interpolates_log_density() {
        let disk = ConformalMetric::Disk;
        let (nx, ny) = (41, 41);
        let (x0, y0, d) = (0.1, 0.1, 0.01);
        let mut u = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let z = c(x0 + d * i as f64, y0 + d * j as f64);
                u.push(disk.log_density(z).unwrap());
            }
        }
        let g = ConformalMetric::Grid(GridSampled { x0, y0, dx: d, dy: d, nx, ny, u });
        g.validate().unwrap();
        let z = c(0.237, 0.152);
        let got = g.density(z).unwrap();
        let want = disk.density(z).unwrap();
        assert!((got - want).abs() < 1e-3 * want);
        assert!(matches!(g.density(c(0.0, 0.0)), Err(MetricError::OutsideGrid(_))));
    }

    #[test]
    fn json_roundtrip() {
        let m = ConformalMetric::conical(0.5).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"kind":"conical","theta":0.5}"#);
        let back: ConformalMetric = serde_json::from_str(&s).unwrap();
        back.validate().unwrap();
        assert!((back.density(c(0.5, 0.0)).unwrap() - 8.0).abs() < 1e-12);

        let bad: ConformalMetric =
            serde_json::from_str(r#"{"kind":"conical","theta":1.0}"#).unwrap();
        assert!(bad.validate().is_err());
    }
}
