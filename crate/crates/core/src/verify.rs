//! Independent numerical oracles: Schwarzian derivatives and their Laurent
//! structure, report cross-checks, Schwarz–Pick contraction, displacement
//! bounds, and the built-in verification suite behind `hypsing verify`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{classify_singularity, ClassifyConfig, ClassifyError, SingularityKind, SingularityReport};
use crate::devmap::{DevMapError, DevelopingMapSpec, MapCore};
use crate::metrics::{ConformalMetric, MetricError};
use crate::mobius::{
    displacement_infimum, hyperbolic_distance, MobiusError, MobiusTransform, Model,
};
use crate::series::{LaurentWindow, SeriesError};
use crate::synth;

const TAU: f64 = 2.0 * std::f64::consts::PI;
/// Relative step for the finite-difference Schwarzian; third derivatives
/// amplify roundoff as ε/β³, so the step stays far above the 1e−4 that a
/// first-derivative stencil could afford.
const FD_REL_STEP: f64 = 0.02;
/// Laurent indices ≤ −3 of the Schwarzian must vanish below this.
const STRUCTURE_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("Schwarzian evaluation at z = 0")]
    AtOrigin,
    #[error("point {0} too close to the domain boundary for the difference stencil")]
    StencilOutOfDomain(Complex64),
    #[error("Laurent coefficient at index {index} has magnitude {magnitude:.3e}: Schwarzian structure violated")]
    StructureViolation { index: i64, magnitude: f64 },
    #[error("verification '{check}' failed: residual {residual:.3e} exceeds {tolerance:.3e}")]
    VerificationFailed { check: String, residual: f64, tolerance: f64 },
    #[error(transparent)]
    DevMap(#[from] DevMapError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Mobius(#[from] MobiusError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

/// Laurent data of the Schwarzian around 0: the window of coefficients from
/// index −2 up, the cone-parameter estimate from the −2 coefficient, the
/// residue estimate d, and a bound on the holomorphic tail at the sampling
/// radius.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchwarzianExpansion {
    pub window: LaurentWindow,
    pub theta_estimate: f64,
    #[serde(with = "crate::cplx")]
    pub d_estimate: Complex64,
    pub holomorphic_tail_norm: f64,
}

/// The Schwarzian derivative {F,z} = F‴/F′ − (3/2)(F″/F′)².
///
/// Closed forms are used for the power and log cores; series cores fall back
/// to fourth-order central differences along the radial direction with
/// Richardson extrapolation. The Möbius post-composition is dropped: the
/// Schwarzian is invariant under it.
pub fn schwarzian(f: &DevelopingMapSpec, z: Complex64) -> Result<Complex64, VerifyError> {
    if z.norm() == 0.0 {
        return Err(VerifyError::AtOrigin);
    }
    match &f.core {
        MapCore::Power { alpha } => Ok(Complex64::new((1.0 - alpha * alpha) / 2.0, 0.0) / (z * z)),
        MapCore::Log { perturbation: None } => Ok(Complex64::new(0.5, 0.0) / (z * z)),
        MapCore::Log { perturbation: Some(p) } => {
            // analytic derivatives: F' = −i/z + P', etc.; the square root in
            // downstream θ estimates cannot afford difference noise here
            let d1 = p.derivative();
            let d2 = d1.derivative();
            let d3 = d2.derivative();
            let i = Complex64::i();
            let f1 = -i / z + d1.eval(z);
            let f2 = i / (z * z) + d2.eval(z);
            let f3 = -2.0 * i / (z * z * z) + d3.eval(z);
            Ok(f3 / f1 - 1.5 * (f2 / f1) * (f2 / f1))
        }
        MapCore::Series { .. } => {
            let bare = DevelopingMapSpec { core: f.core.clone(), post: None, branch_index: 0 };
            let s1 = fd_schwarzian(&bare, z, FD_REL_STEP)?;
            let s2 = fd_schwarzian(&bare, z, FD_REL_STEP / 2.0)?;
            Ok((16.0 * s2 - s1) / 15.0)
        }
    }
}

/// Fourth-order difference Schwarzian along t ↦ F(z(1+t)):
/// {F,z} = (1/z²)·[φ‴/φ′ − (3/2)(φ″/φ′)²] for φ(t) = F(z(1+t)).
fn fd_schwarzian(
    f: &DevelopingMapSpec,
    z: Complex64,
    beta: f64,
) -> Result<Complex64, VerifyError> {
    if z.norm() * (1.0 + 3.0 * beta) >= 1.0 {
        return Err(VerifyError::StencilOutOfDomain(z));
    }
    let lz = z.ln();
    let phi = |k: i32| -> Complex64 {
        let t = 1.0 + beta * k as f64;
        f.eval_with_log(lz + Complex64::new(t.ln(), 0.0))
    };
    let (m3, m2, m1, p1, p2, p3) = (phi(-3), phi(-2), phi(-1), phi(1), phi(2), phi(3));
    let p0 = phi(0);
    let d1 = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * beta);
    let d2 = (-p2 + 16.0 * p1 - 30.0 * p0 + 16.0 * m1 - m2) / (12.0 * beta * beta);
    let d3 = (m3 - 8.0 * m2 + 13.0 * m1 - 13.0 * p1 + 8.0 * p2 - p3) / (8.0 * beta * beta * beta);
    Ok((d3 / d1 - 1.5 * (d2 / d1) * (d2 / d1)) / (z * z))
}

/// Laurent development of {F,z} around 0 from samples of z²{F,z} on the
/// circle |z| = radius. Coefficients below index −2 must vanish.
pub fn schwarzian_expand(
    f: &DevelopingMapSpec,
    radius: f64,
    samples: usize,
) -> Result<SchwarzianExpansion, VerifyError> {
    let m = samples;
    let mut vals = Vec::with_capacity(m);
    for j in 0..m {
        let z = Complex64::from_polar(radius, TAU * j as f64 / m as f64);
        vals.push(z * z * schwarzian(f, z)?);
    }
    let hat = |idx: i64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, v) in vals.iter().enumerate() {
            acc += v * Complex64::from_polar(1.0, -TAU * idx as f64 * j as f64 / m as f64);
        }
        acc / m as f64
    };
    // indices of z²{F,z}; index m corresponds to Laurent index m − 2 of {F,z}
    let top: i64 = 10;
    let scale = (0..=top).map(|n| hat(n).norm()).fold(0.0, f64::max).max(1.0);
    for n in 1..=top {
        let mag = hat(-n).norm();
        if mag > STRUCTURE_TOL * scale {
            return Err(VerifyError::StructureViolation { index: -n - 2, magnitude: mag });
        }
    }
    let floor = 1e-11 * scale;
    let coeffs: Vec<Complex64> = (0..=top)
        .map(|n| {
            let c = hat(n);
            if c.norm() <= floor {
                Complex64::new(0.0, 0.0)
            } else {
                c * radius.powi(-(n as i32))
            }
        })
        .collect();
    let tail: f64 = (2..=top as usize).map(|n| coeffs[n].norm() * radius.powi(n as i32 - 2)).sum();
    let c2 = coeffs[0];
    let theta_estimate = (1.0 - 2.0 * c2.re).max(0.0).sqrt();
    let d_estimate = coeffs[1];
    Ok(SchwarzianExpansion {
        window: LaurentWindow::new(coeffs),
        theta_estimate,
        d_estimate,
        holomorphic_tail_norm: tail,
    })
}

/// Tie a classification report back to the Schwarzian oracle: the cone
/// parameter read from the −2 Laurent coefficient must match the report.
pub fn report_crosscheck(
    report: &SingularityReport,
    f: &DevelopingMapSpec,
) -> Result<BTreeMap<String, f64>, VerifyError> {
    let exp = schwarzian_expand(f, 0.25, 512)?;
    let theta_target = match report.kind {
        SingularityKind::Conical => report.theta.unwrap_or(f64::NAN),
        SingularityKind::Cusp => 0.0,
    };
    let theta_residual = (exp.theta_estimate - theta_target).abs();
    let mut out = BTreeMap::new();
    out.insert("theta_residual".into(), theta_residual);
    for (k, v) in &report.diagnostics {
        out.insert(k.clone(), *v);
    }
    if theta_residual > 1e-6 {
        return Err(VerifyError::VerificationFailed {
            check: "schwarzian theta crosscheck".into(),
            residual: theta_residual,
            tolerance: 1e-6,
        });
    }
    let pb = report.diagnostics.get("pullback_residual").copied().unwrap_or(f64::INFINITY);
    if pb > 1e-6 {
        return Err(VerifyError::VerificationFailed {
            check: "pullback residual".into(),
            residual: pb,
            tolerance: 1e-6,
        });
    }
    Ok(out)
}

/// Minimum contraction margin d(z₁,z₂) − d(f z₁, f z₂) over the pairs.
pub fn schwarz_pick_margin(
    f: &dyn Fn(Complex64) -> Complex64,
    model: Model,
    pairs: &[(Complex64, Complex64)],
) -> Result<f64, VerifyError> {
    let mut margin = f64::INFINITY;
    for &(z1, z2) in pairs {
        let d = hyperbolic_distance(model, z1, z2)?;
        let df = hyperbolic_distance(model, f(z1), f(z2))?;
        margin = margin.min(d - df);
    }
    Ok(margin)
}

/// Configuration for the verification suite: series order, sampling circle,
/// and named tolerance overrides.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub order: usize,
    pub radius: f64,
    pub samples: usize,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            order: 32,
            radius: 0.25,
            samples: 512,
            tolerances: BTreeMap::new(),
        }
    }
}

impl VerifyConfig {
    pub fn tol(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    fn classify_config(&self) -> ClassifyConfig {
        ClassifyConfig { order: self.order, radius: self.radius, samples: self.samples }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyOutcome {
    fn push(&mut self, name: &str, residual: f64, tolerance: f64) {
        let passed = residual.is_finite() && residual <= tolerance;
        self.passed &= passed;
        self.checks.push(CheckResult { name: name.into(), passed, residual, tolerance });
    }
}

/// The built-in oracle matrix: model identities, curvature residuals,
/// Schwarzian structure, classification roundtrips, Schwarz–Pick, and
/// displacement bounds. Deterministic for a given config.
pub fn run_suite(config: &VerifyConfig) -> VerifyOutcome {
    let mut out = VerifyOutcome { passed: true, checks: Vec::new() };
    let theta_grid = [0.1, 0.5, 0.9, 2.0, 3.0];

    // model identities: conical = disk pulled back through z^θ, cusp = half
    // plane pulled back through −i·log z
    {
        let tol = config.tol("model_identity", 1e-10);
        let mut worst: f64 = 0.0;
        let points: Vec<Complex64> = (0..50)
            .map(|j| Complex64::from_polar(0.1 + 0.6 * (j as f64 / 50.0), 0.13 + 2.9 * j as f64))
            .collect();
        for &theta in &theta_grid {
            let pb = ConformalMetric::Pullback {
                map: DevelopingMapSpec::power(theta).unwrap(),
                base: Box::new(ConformalMetric::Disk),
            };
            for &z in &points {
                let a = pb.density(z).unwrap();
                let b = crate::metrics::conical_density(theta, z);
                worst = worst.max((a - b).abs() / b);
            }
        }
        let pb = ConformalMetric::Pullback {
            map: DevelopingMapSpec::log_map(),
            base: Box::new(ConformalMetric::HalfPlane),
        };
        for &z in &points {
            let a = pb.density(z).unwrap();
            let b = crate::metrics::cusp_density(z);
            worst = worst.max((a - b).abs() / b);
        }
        out.push("model_identity", worst, tol);
    }

    // curvature: Liouville residual on annular grids, plus O(h²) refinement
    {
        let tol = config.tol("curvature", 1e-3);
        let h = 1e-3;
        let mut metrics: Vec<(String, ConformalMetric, Complex64)> = vec![
            ("disk".into(), ConformalMetric::Disk, Complex64::new(0.0, 0.0)),
            ("halfplane".into(), ConformalMetric::HalfPlane, Complex64::new(0.0, 2.0)),
            ("cusp".into(), ConformalMetric::Cusp, Complex64::new(0.0, 0.0)),
        ];
        for &theta in &theta_grid {
            metrics.push((
                format!("conical_{theta}"),
                ConformalMetric::Conical { theta },
                Complex64::new(0.0, 0.0),
            ));
        }
        let mut worst: f64 = 0.0;
        let mut worst_ratio_dev: f64 = 0.0;
        for (_, m, center) in &metrics {
            let mut r1: f64 = 0.0;
            let mut r2: f64 = 0.0;
            for a in 0..20 {
                for b in 0..20 {
                    let rr = 0.25 + 0.45 * a as f64 / 19.0;
                    let th = TAU * b as f64 / 20.0;
                    let z = center + Complex64::from_polar(rr, th);
                    r1 = r1.max(m.log_density_gradient_check(z, h).unwrap());
                    r2 = r2.max(m.log_density_gradient_check(z, h / 2.0).unwrap());
                }
            }
            worst = worst.max(r1);
            if r1 > 1e-9 {
                worst_ratio_dev = worst_ratio_dev.max((r1 / r2 - 4.0).abs());
            }
        }
        out.push("curvature_residual", worst, tol);
        out.push("curvature_refinement_ratio", worst_ratio_dev, 0.5);
    }

    // Schwarzian: closed-form c₋₂, Möbius invariance, structure
    {
        let tol = config.tol("schwarzian_c2", 1e-6);
        let mut worst: f64 = 0.0;
        for &theta in &theta_grid {
            let f = DevelopingMapSpec::power(theta).unwrap();
            let exp = schwarzian_expand(&f, config.radius, config.samples).unwrap();
            let c2 = exp.window.get(-2).unwrap();
            worst = worst.max((c2.re - (1.0 - theta * theta) / 2.0).abs() + c2.im.abs());
            worst = worst.max((exp.theta_estimate - theta).abs());
        }
        let exp = schwarzian_expand(&DevelopingMapSpec::log_map(), config.radius, config.samples)
            .unwrap();
        worst = worst.max((exp.window.get(-2).unwrap().re - 0.5).abs());
        worst = worst.max(exp.theta_estimate);
        out.push("schwarzian_c2", worst, tol);

        let f = DevelopingMapSpec::power(0.5).unwrap();
        let post = MobiusTransform::new(
            Model::Disk,
            Complex64::new(1.2, 0.3),
            Complex64::new(0.4, -0.2),
            Complex64::new(0.4, 0.2),
            Complex64::new(1.2, -0.3),
        )
        .unwrap();
        let g = f.compose_post(&post);
        let z = Complex64::new(0.3, 0.2);
        let inv = (schwarzian(&g, z).unwrap() - schwarzian(&f, z).unwrap()).norm();
        out.push("schwarzian_mobius_invariance", inv, config.tol("schwarzian_invariance", 1e-12));
    }

    // classification roundtrips over a small deterministic matrix
    {
        let tol_theta = config.tol("roundtrip_theta", 1e-9);
        let tol_xi = config.tol("roundtrip_xi", 1e-8);
        let ccfg = config.classify_config();
        let mut worst_theta: f64 = 0.0;
        let mut worst_xi: f64 = 0.0;
        let mut worst_cross: f64 = 0.0;
        let pert = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.1, 0.05),
            Complex64::new(-0.04, 0.08),
        ];
        for &theta in &[0.3, 0.5, 1.5, 2.0] {
            let (f, want_xi) = synth::conical_input(theta, &pert, config.order).unwrap();
            let r = classify_singularity(&f, &ccfg).unwrap();
            worst_theta = worst_theta.max((r.theta.unwrap() - theta).abs());
            worst_xi = worst_xi.max(r.xi_series.max_coeff_distance(&want_xi));
            let exp = schwarzian_expand(&f, config.radius, config.samples).unwrap();
            worst_cross = worst_cross.max((exp.theta_estimate - theta).abs());
        }
        let cpert = [
            Complex64::new(0.0, 0.0),
            Complex64::new(0.1, 0.02),
            Complex64::new(0.0, 0.0),
            Complex64::new(-0.05, 0.0),
        ];
        let (f, want_xi) = synth::cusp_input(&cpert, config.order).unwrap();
        let r = classify_singularity(&f, &ccfg).unwrap();
        worst_xi = worst_xi.max(r.xi_series.max_coeff_distance(&want_xi));
        let exp = schwarzian_expand(&f, config.radius, config.samples).unwrap();
        worst_cross = worst_cross.max(exp.theta_estimate);
        out.push("roundtrip_theta", worst_theta, tol_theta);
        out.push("roundtrip_xi", worst_xi, tol_xi);
        out.push("schwarzian_monodromy_crosscheck", worst_cross, config.tol("crosscheck_theta", 1e-6));
    }

    // Schwarz–Pick: strict contraction for non-invertible self-maps,
    // isometry for Möbius maps
    {
        let pairs: Vec<(Complex64, Complex64)> = (0..40)
            .map(|j| {
                let t = j as f64;
                (
                    Complex64::new(0.3 + 0.2 * (0.7 * t).sin(), 1.0 + 0.5 * (1.3 * t).cos()),
                    Complex64::new(-0.4 + 0.3 * (0.9 * t).cos(), 2.0 + 0.8 * (0.4 * t).sin()),
                )
            })
            .collect();
        let shift = |z: Complex64| z + Complex64::i();
        let squeeze = |z: Complex64| 2.0 * z + Complex64::i();
        let m1 = schwarz_pick_margin(&shift, Model::HalfPlane, &pairs).unwrap();
        let m2 = schwarz_pick_margin(&squeeze, Model::HalfPlane, &pairs).unwrap();
        let margin = m1.min(m2);
        // a positive margin passes; report 0 residual when strictly positive
        out.push(
            "schwarz_pick_strict",
            if margin > 0.0 { 0.0 } else { 1.0 - margin },
            0.5,
        );
        let iso = MobiusTransform::translation(3.7);
        let apply = |z: Complex64| iso.apply_raw(z);
        let dev = schwarz_pick_margin(&apply, Model::HalfPlane, &pairs).unwrap().abs();
        out.push("schwarz_pick_isometry", dev, config.tol("schwarz_pick_isometry", 1e-10));
    }

    // displacement: the parabolic witness decreases below 2π/y, hyperbolic
    // displacement is bounded below by ln λ
    {
        let t = MobiusTransform::translation(TAU);
        let mut prev = f64::INFINITY;
        let mut worst: f64 = 0.0;
        for &y in &[1e2, 1e3, 1e4] {
            let d = displacement_infimum(&t, &[Complex64::new(0.0, y)]).unwrap();
            if d >= prev {
                worst = worst.max(1.0);
            }
            worst = worst.max((d / (TAU / y) - 1.0).max(0.0));
            prev = d;
        }
        out.push("displacement_parabolic", worst, config.tol("displacement", 1e-6));

        let probes: Vec<Complex64> = (0..20)
            .map(|j| Complex64::new(-2.0 + 0.2 * j as f64, 0.3 + 0.31 * j as f64))
            .collect();
        let mut worst_h: f64 = 0.0;
        for &lambda in &[2.0, 4.0, 10.0] {
            let l = MobiusTransform::dilation(lambda);
            let d = displacement_infimum(&l, &probes).unwrap();
            worst_h = worst_h.max((lambda.ln() - d).max(0.0));
        }
        out.push("displacement_hyperbolic", worst_h, 1e-9);
    }

    out
}
