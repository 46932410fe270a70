//! The classification pipeline: from a developing map on the punctured disk
//! to a [`SingularityReport`]. Monodromy is extracted and normalized, the
//! single-valued periodic part is developed into a Fourier series on a
//! sampling circle, and the normalizing coordinate ξ is built by the case
//! matching the monodromy type (parabolic ⇒ cusp, elliptic/identity ⇒
//! conical).

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::devmap::{DevMapError, DevelopingMapSpec, MonodromyResult};
use crate::metrics::{conical_density, cusp_density, ConformalMetric};
use crate::mobius::{cayley_matrix, IsometryKind, MobiusError, MobiusTransform, Model};
use crate::series::{SeriesError, TruncatedSeries};

const TAU: f64 = 2.0 * std::f64::consts::PI;
/// Fourier coefficients below this fraction of the largest count as zero
/// when locating k.
const K_DETECT_REL_TOL: f64 = 1e-10;
/// Normalized negative-index mass above this signals pole or essential
/// behavior in the periodic part.
const NEG_COEFF_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("monodromy is hyperbolic: not the developing map of a hyperbolic metric near a puncture")]
    HyperbolicMonodromy,
    #[error("parabolic translation length {0} is negative in both loop orientations")]
    NegativeTranslation(f64),
    #[error("inconsistent input: {0}")]
    InconsistentInput(String),
    #[error("Fourier coefficient a_{0} vanishes; wrong leading index")]
    WrongK(usize),
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    DevMap(#[from] DevMapError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Mobius(#[from] MobiusError),
}

/// Pipeline configuration: truncation order N, sampling-circle radius, and
/// circle sample count M.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyConfig {
    pub order: usize,
    pub radius: f64,
    pub samples: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig { order: 32, radius: 0.25, samples: 512 }
    }
}

impl ClassifyConfig {
    pub fn validate(&self) -> Result<(), ClassifyError> {
        if self.order < 4 {
            return Err(ClassifyError::BadConfig(format!("order {} < 4", self.order)));
        }
        if !(self.radius > 0.0 && self.radius < 1.0) {
            return Err(ClassifyError::BadConfig(format!(
                "radius {} outside (0, 1)",
                self.radius
            )));
        }
        if self.samples < 4 * self.order {
            return Err(ClassifyError::BadConfig(format!(
                "samples {} < 4·order = {}",
                self.samples,
                4 * self.order
            )));
        }
        if !self.samples.is_power_of_two() {
            return Err(ClassifyError::BadConfig(format!(
                "samples {} is not a power of two",
                self.samples
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SingularityKind {
    Conical,
    Cusp,
}

/// Outcome of the classification: the singularity type, cone parameter θ
/// (for conical), leading Fourier index k, the monodromy certificate, the
/// extracted coefficients aₙ, the normalizing coordinate ξ as a series in w,
/// and named residual diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingularityReport {
    pub kind: SingularityKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    pub k: usize,
    pub monodromy: MonodromyResult,
    pub fourier: TruncatedSeries,
    #[serde(rename = "xi")]
    pub xi_series: TruncatedSeries,
    pub diagnostics: BTreeMap<String, f64>,
}

fn circle_basepoints(radius: f64, n: usize) -> Vec<Complex64> {
    (0..n).map(|j| Complex64::from_polar(radius, TAU * j as f64 / (n as f64 + 1.0))).collect()
}

/// Develop the single-valued periodic part of an already-normalized map into
/// its Fourier coefficients a₀..a_N on the circle |w| = radius.
///
/// The periodic part is formed per the monodromy case: parabolic (normalized
/// to z ↦ z + 2π) g(w) = F(w) + i·log w; elliptic with angle 2πα
/// g(w) = F(w)·w^{−α}; identity g(w) = F(w). Negative-index coefficients
/// must vanish; otherwise the input shows pole or essential behavior.
pub fn fourier_extract(
    f: &DevelopingMapSpec,
    monodromy: &MonodromyResult,
    radius: f64,
    samples: usize,
    order: usize,
) -> Result<TruncatedSeries, ClassifyError> {
    fourier_extract_with_mass(f, monodromy, radius, samples, order).map(|(s, _)| s)
}

fn fourier_extract_with_mass(
    f: &DevelopingMapSpec,
    monodromy: &MonodromyResult,
    radius: f64,
    samples: usize,
    order: usize,
) -> Result<(TruncatedSeries, f64), ClassifyError> {
    let kind = monodromy.classification.kind;
    let alpha = monodromy.classification.parameter / TAU;
    let m = samples;
    // A continuous logarithm along the circle keeps the branch of F exact
    // through the full loop; the periodic parts then close up to the fit
    // accuracy of the monodromy.
    let mut g = Vec::with_capacity(m);
    let mut raw_max: f64 = 0.0;
    for j in 0..m {
        let lw = Complex64::new(radius.ln(), TAU * j as f64 / m as f64);
        let fv = f.eval_with_log(lw);
        raw_max = raw_max.max(fv.norm());
        let v = match kind {
            IsometryKind::Parabolic => fv + Complex64::i() * lw,
            IsometryKind::Elliptic => fv * (-alpha * lw).exp(),
            IsometryKind::Identity => fv,
            IsometryKind::Hyperbolic => return Err(ClassifyError::HyperbolicMonodromy),
        };
        g.push(v);
    }
    let hat = |idx: i64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, v) in g.iter().enumerate() {
            acc += v * Complex64::from_polar(1.0, -TAU * idx as f64 * j as f64 / m as f64);
        }
        acc / m as f64
    };
    let pos: Vec<Complex64> = (0..=order as i64).map(hat).collect();
    let neg: Vec<Complex64> = (1..=order as i64).map(|n| hat(-n)).collect();
    let scale = pos
        .iter()
        .chain(&neg)
        .map(|c| c.norm())
        .fold(0.0, f64::max)
        .max(1e-300);
    let neg_mass = neg.iter().map(|c| c.norm()).fold(0.0, f64::max) / scale.max(raw_max);
    if neg_mass > NEG_COEFF_TOL {
        return Err(ClassifyError::InconsistentInput(format!(
            "negative-index Fourier mass {neg_mass:.3e}: periodic part has a pole or essential singularity"
        )));
    }
    // Mode amplitudes at the roundoff floor of the sampled values would be
    // amplified by r^{−n} into garbage coefficients; zero them instead.
    let floor = 1e-13 * scale.max(raw_max);
    let coeffs = pos
        .iter()
        .enumerate()
        .map(|(n, c)| {
            if c.norm() <= floor {
                Complex64::new(0.0, 0.0)
            } else {
                c * radius.powi(-(n as i32))
            }
        })
        .collect();
    Ok((TruncatedSeries::new(0.0, coeffs), neg_mass))
}

/// Normalizing coordinate for the cusp case:
/// ξ(w) = w · exp(i Σ_{n≥1} aₙ wⁿ) · e^{i a₀}.
pub fn build_xi_cusp(fourier: &TruncatedSeries, k: usize) -> Result<TruncatedSeries, ClassifyError> {
    let order = fourier.order();
    let mut arg = TruncatedSeries::zero(order);
    for n in k.max(1)..=order {
        arg.coeffs[n] = Complex64::i() * fourier.coeffs[n];
    }
    let e = arg.exp()?;
    let phase = (Complex64::i() * fourier.coeffs[0]).exp();
    let mut xi = TruncatedSeries::zero(order);
    for n in 1..=order {
        xi.coeffs[n] = phase * e.coeffs[n - 1];
    }
    Ok(xi)
}

/// Normalizing coordinate for the conical cases:
/// ξ(w) = w · (Σ_{n≥k} aₙ w^{n−k})^{1/(α+k)}, requiring a_k ≠ 0.
/// The identity-monodromy case uses α = 0 with its integer k.
pub fn build_xi_conical(
    fourier: &TruncatedSeries,
    alpha: f64,
    k: usize,
) -> Result<TruncatedSeries, ClassifyError> {
    let order = fourier.order();
    let max = fourier.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if k > order || fourier.coeffs[k].norm() <= K_DETECT_REL_TOL * max {
        return Err(ClassifyError::WrongK(k));
    }
    let mut shifted = TruncatedSeries::zero(order);
    for n in k..=order {
        shifted.coeffs[n - k] = fourier.coeffs[n];
    }
    let root = shifted.pow(1.0 / (alpha + k as f64))?;
    let mut xi = TruncatedSeries::zero(order);
    for n in 1..=order {
        xi.coeffs[n] = root.coeffs[n - 1];
    }
    Ok(xi)
}

/// Rotate ξ so its first nonzero coefficient is positive real, fixing the
/// λ-gauge deterministically. Returns the fixed series and the λ applied.
pub fn gauge_fix(xi: &TruncatedSeries) -> (TruncatedSeries, Complex64) {
    match xi.first_significant(K_DETECT_REL_TOL) {
        Some(n) if xi.coeffs[n].norm() > 0.0 => {
            let c = xi.coeffs[n];
            let lambda = c.conj() / c.norm();
            (xi.scale(lambda), lambda)
        }
        _ => (xi.clone(), Complex64::new(1.0, 0.0)),
    }
}

/// The full classification pipeline: monodromy type decides
/// conical vs cusp, the Fourier development of the periodic part yields the
/// leading index k and coefficients, and ξ realizes the model metric.
pub fn classify_singularity(
    f: &DevelopingMapSpec,
    config: &ClassifyConfig,
) -> Result<SingularityReport, ClassifyError> {
    config.validate()?;
    let basepoints = circle_basepoints(config.radius, 8);
    let mut mono = f.extract_monodromy(&basepoints)?;
    let mut diagnostics = BTreeMap::new();

    let (kind, theta, k, fourier, xi) = match mono.classification.kind {
        IsometryKind::Hyperbolic => return Err(ClassifyError::HyperbolicMonodromy),
        IsometryKind::Parabolic => {
            let mut t = mono.classification.parameter;
            if t <= 0.0 {
                // transient orientation ambiguity: retry once with the loop
                // reversed before declaring the excluded t<0 case
                let retry = f.extract_monodromy_step(&basepoints, -1)?;
                if retry.classification.kind != IsometryKind::Parabolic
                    || retry.classification.parameter <= 0.0
                {
                    return Err(ClassifyError::NegativeTranslation(t));
                }
                diagnostics.insert("orientation_reversed".into(), 1.0);
                mono = retry;
                t = mono.classification.parameter;
            }
            // rescale so the translation length is exactly 2π
            let s = (TAU / t).sqrt();
            let rescale = MobiusTransform::from_matrix_unchecked(
                Model::HalfPlane,
                Complex64::new(s, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0 / s, 0.0),
            )?;
            let g = f
                .compose_post(&mono.classification.conjugator)
                .compose_post(&rescale);
            let (fourier, neg_mass) =
                fourier_extract_with_mass(&g, &mono, config.radius, config.samples, config.order)?;
            diagnostics.insert("neg_mass".into(), neg_mass);
            let k = fourier.first_significant(K_DETECT_REL_TOL).unwrap_or(0);
            let xi = build_xi_cusp(&fourier, k)?;
            (SingularityKind::Cusp, None, k, fourier, xi)
        }
        IsometryKind::Elliptic => {
            let alpha = mono.classification.parameter / TAU;
            let g = f.compose_post(&mono.classification.conjugator);
            let (fourier, neg_mass) =
                fourier_extract_with_mass(&g, &mono, config.radius, config.samples, config.order)?;
            diagnostics.insert("neg_mass".into(), neg_mass);
            let k = fourier
                .first_significant(K_DETECT_REL_TOL)
                .ok_or_else(|| ClassifyError::InconsistentInput("periodic part vanishes".into()))?;
            let xi = build_xi_conical(&fourier, alpha, k)?;
            (SingularityKind::Conical, Some(alpha + k as f64), k, fourier, xi)
        }
        IsometryKind::Identity => {
            let mut g = match f.target_model() {
                Model::Disk => f.clone(),
                Model::HalfPlane => f.compose_post(&cayley_matrix()),
            };
            let (mut fourier, mut neg_mass) =
                fourier_extract_with_mass(&g, &mono, config.radius, config.samples, config.order)?;
            let max = fourier.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let a0 = fourier.coeffs[0];
            if a0.norm() > K_DETECT_REL_TOL * max {
                // recenter so the single-valued map fixes 0, then redevelop
                let recenter = MobiusTransform::disk_automorphism(a0)?;
                g = g.compose_post(&recenter);
                let redo = fourier_extract_with_mass(
                    &g,
                    &mono,
                    config.radius,
                    config.samples,
                    config.order,
                )?;
                fourier = redo.0;
                neg_mass = redo.1;
            }
            diagnostics.insert("neg_mass".into(), neg_mass);
            let k = fourier
                .first_significant(K_DETECT_REL_TOL)
                .ok_or_else(|| ClassifyError::InconsistentInput("periodic part vanishes".into()))?;
            if k == 0 {
                return Err(ClassifyError::InconsistentInput(
                    "identity monodromy with non-vanishing recentered constant term".into(),
                ));
            }
            let xi = build_xi_conical(&fourier, 0.0, k)?;
            (SingularityKind::Conical, Some(k as f64), k, fourier, xi)
        }
    };

    let (xi, _) = gauge_fix(&xi);
    diagnostics.insert("fit_residual".into(), mono.fit_residual);
    let pb = pullback_residual(f, kind, theta, &xi, config.radius)?;
    diagnostics.insert("pullback_residual".into(), pb);

    Ok(SingularityReport {
        kind,
        theta,
        k,
        monodromy: mono,
        fourier,
        xi_series: xi,
        diagnostics,
    })
}

/// Relative mismatch on a test circle between the metric pulled back through
/// the original map and the model metric pulled back through ξ.
fn pullback_residual(
    f: &DevelopingMapSpec,
    kind: SingularityKind,
    theta: Option<f64>,
    xi: &TruncatedSeries,
    radius: f64,
) -> Result<f64, ClassifyError> {
    let ambient = match f.target_model() {
        Model::Disk => ConformalMetric::Disk,
        Model::HalfPlane => ConformalMetric::HalfPlane,
    };
    let pb = ConformalMetric::Pullback { map: f.clone(), base: Box::new(ambient) };
    let dxi = xi.derivative();
    let mut worst: f64 = 0.0;
    for w in circle_basepoints(radius, 16) {
        let xw = xi.eval(w);
        let model = match kind {
            SingularityKind::Conical => conical_density(theta.unwrap(), xw),
            SingularityKind::Cusp => cusp_density(xw),
        };
        let through_xi = model * dxi.eval(w).norm_sqr();
        let direct = pb
            .density(w)
            .map_err(|e| ClassifyError::InconsistentInput(e.to_string()))?;
        worst = worst.max((through_xi - direct).abs() / direct.max(1e-300));
    }
    Ok(worst)
}
