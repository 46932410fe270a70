//! Developing maps on the punctured disk as evaluatable, branch-tracked
//! multivalued functions: power maps `w^α`, the logarithmic map `−i log w`
//! (optionally perturbed by a holomorphic series), fractional-lead series
//! maps, and Möbius post-compositions of any of these. Analytic continuation
//! around the puncture and monodromy extraction live here.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mobius::{IsometryClass, MobiusError, MobiusTransform, Model};
use crate::series::TruncatedSeries;

const TAU: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Error)]
pub enum DevMapError {
    #[error("evaluation at the puncture w = 0")]
    AtPuncture,
    #[error("point {0} outside the punctured unit disk")]
    OutsideDomain(Complex64),
    #[error("point {0} outside the validated radius {1:.3} of the series map")]
    OutsideValidatedRadius(Complex64, f64),
    #[error("power-map exponent must be positive, got {0}")]
    InvalidAlpha(f64),
    #[error("series map must have a nonzero coefficient")]
    EmptySeries,
    #[error("continuation needs at least 16 steps, got {0}")]
    TooFewSteps(usize),
    #[error("continuation step too coarse: jump {0:.3e} at step {1}")]
    ContinuationTooCoarse(f64, usize),
    #[error("monodromy extraction needs at least 4 basepoints, got {0}")]
    TooFewBasepoints(usize),
    #[error("degenerate basepoint triple for the cross-ratio fit")]
    DegenerateTriple,
    #[error("monodromy fit validation residual {0:.3e} exceeds 1e-8: map is not projective")]
    NotProjective(f64),
    #[error(transparent)]
    Mobius(#[from] MobiusError),
}

/// The branch-free part of a developing map.
#[derive(Debug, Clone, PartialEq)]
pub enum MapCore {
    /// `w ↦ w^α`, α > 0, targeting the disk.
    Power { alpha: f64 },
    /// `w ↦ −i log w (+ Σ cₙ wⁿ)`, targeting the upper half-plane.
    Log { perturbation: Option<TruncatedSeries> },
    /// `w ↦ w^lead · Σ cₙ wⁿ`, targeting the disk.
    Series { series: TruncatedSeries },
}

/// A developing map: a core, an optional target-side Möbius composition, and
/// the current branch index (incremented per positive loop around 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapDto", into = "MapDto")]
pub struct DevelopingMapSpec {
    pub core: MapCore,
    pub post: Option<MobiusTransform>,
    pub branch_index: i64,
}

/// Monodromy of one positive loop around the puncture: the fitted isometry,
/// its classification, and the validation residual of the fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonodromyResult {
    pub transform: MobiusTransform,
    pub classification: IsometryClass,
    pub fit_residual: f64,
}

impl DevelopingMapSpec {
    pub fn power(alpha: f64) -> Result<Self, DevMapError> {
        if alpha <= 0.0 {
            return Err(DevMapError::InvalidAlpha(alpha));
        }
        Ok(DevelopingMapSpec { core: MapCore::Power { alpha }, post: None, branch_index: 0 })
    }

    pub fn log_map() -> Self {
        DevelopingMapSpec { core: MapCore::Log { perturbation: None }, post: None, branch_index: 0 }
    }

    pub fn log_perturbed(perturbation: TruncatedSeries) -> Self {
        DevelopingMapSpec {
            core: MapCore::Log { perturbation: Some(perturbation) },
            post: None,
            branch_index: 0,
        }
    }

    pub fn series(series: TruncatedSeries) -> Result<Self, DevMapError> {
        if series.coeffs.iter().all(|c| c.norm() == 0.0) {
            return Err(DevMapError::EmptySeries);
        }
        Ok(DevelopingMapSpec { core: MapCore::Series { series }, post: None, branch_index: 0 })
    }

    /// The model the core maps into before any post-composition.
    pub fn natural_model(&self) -> Model {
        match &self.core {
            MapCore::Power { .. } | MapCore::Series { .. } => Model::Disk,
            MapCore::Log { .. } => Model::HalfPlane,
        }
    }

    /// The model of the final target (the post-composition's tag if present).
    pub fn target_model(&self) -> Model {
        self.post.as_ref().map(|p| p.model).unwrap_or_else(|| self.natural_model())
    }

    pub fn with_branch(&self, branch_index: i64) -> Self {
        let mut s = self.clone();
        s.branch_index = branch_index;
        s
    }

    /// Post-compose with `m` on the target side: `m ∘ self`.
    pub fn compose_post(&self, m: &MobiusTransform) -> Self {
        let post = match &self.post {
            Some(p) => m.compose_raw(p),
            None => m.clone(),
        };
        let mut s = self.clone();
        s.post = Some(post);
        s
    }

    /// The same map in the rotated input coordinate `w ↦ e^{iφ} w`.
    pub fn rotated_input(&self, phi: f64) -> Self {
        let rot = |s: &TruncatedSeries, extra_lead: f64| -> TruncatedSeries {
            let coeffs = s
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c * Complex64::from_polar(1.0, (extra_lead + n as f64) * phi))
                .collect();
            TruncatedSeries::new(s.lead, coeffs)
        };
        let core = match &self.core {
            MapCore::Power { alpha } => MapCore::Series {
                series: TruncatedSeries::new(*alpha, vec![Complex64::from_polar(1.0, alpha * phi)]),
            },
            MapCore::Log { perturbation } => {
                let mut p = match perturbation {
                    Some(s) => rot(s, 0.0),
                    None => TruncatedSeries::zero(0),
                };
                p.coeffs[0] += Complex64::new(phi, 0.0);
                MapCore::Log { perturbation: Some(p) }
            }
            MapCore::Series { series } => MapCore::Series { series: rot(series, series.lead) },
        };
        DevelopingMapSpec { core, post: self.post.clone(), branch_index: self.branch_index }
    }

    /// Radius inside which a series map is trusted: half the convergence
    /// radius implied by a root test on the available coefficients.
    pub fn validated_radius(&self) -> f64 {
        let of_series = |s: &TruncatedSeries| -> f64 {
            let mut growth: f64 = 0.0;
            for (n, c) in s.coeffs.iter().enumerate().skip(1) {
                if c.norm() > 0.0 {
                    growth = growth.max(c.norm().powf(1.0 / n as f64));
                }
            }
            if growth == 0.0 {
                1.0
            } else {
                (0.5 / growth).min(1.0)
            }
        };
        match &self.core {
            MapCore::Power { .. } => 1.0,
            MapCore::Log { perturbation: None } => 1.0,
            MapCore::Log { perturbation: Some(s) } => of_series(s),
            MapCore::Series { series } => of_series(series),
        }
    }

    /// Evaluate on the branch encoded in a continuous logarithm of `w`.
    pub fn eval_with_log(&self, logw: Complex64) -> Complex64 {
        let v = match &self.core {
            MapCore::Power { alpha } => (alpha * logw).exp(),
            MapCore::Log { perturbation } => {
                let base = -Complex64::i() * logw;
                match perturbation {
                    Some(p) => base + p.eval_with_log(logw),
                    None => base,
                }
            }
            MapCore::Series { series } => series.eval_with_log(logw),
        };
        match &self.post {
            Some(m) => m.apply_raw(v),
            None => v,
        }
    }

    /// Analytic derivative on the branch encoded in `logw`.
    pub fn deriv_with_log(&self, logw: Complex64) -> Complex64 {
        let core_val = |spec: &MapCore| -> Complex64 {
            match spec {
                MapCore::Power { alpha } => (alpha * logw).exp(),
                MapCore::Log { perturbation } => {
                    let base = -Complex64::i() * logw;
                    match perturbation {
                        Some(p) => base + p.eval_with_log(logw),
                        None => base,
                    }
                }
                MapCore::Series { series } => series.eval_with_log(logw),
            }
        };
        let w = logw.exp();
        let dv = match &self.core {
            MapCore::Power { alpha } => alpha * ((alpha - 1.0) * logw).exp(),
            MapCore::Log { perturbation } => {
                let base = -Complex64::i() / w;
                match perturbation {
                    Some(p) => base + p.derivative().eval_with_log(logw),
                    None => base,
                }
            }
            MapCore::Series { series } => {
                // d/dw [w^lead Σ cₙ wⁿ] = w^{lead−1} Σ (lead+n) cₙ wⁿ
                let coeffs = series
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(n, c)| (series.lead + n as f64) * c)
                    .collect();
                let d = TruncatedSeries::new(series.lead - 1.0, coeffs);
                d.eval_with_log(logw)
            }
        };
        match &self.post {
            Some(m) => m.deriv_raw(core_val(&self.core)) * dv,
            None => dv,
        }
    }

    fn log_at(&self, z: Complex64) -> Result<Complex64, DevMapError> {
        if z.norm() == 0.0 {
            return Err(DevMapError::AtPuncture);
        }
        if z.norm() >= 1.0 {
            return Err(DevMapError::OutsideDomain(z));
        }
        let r = self.validated_radius();
        if z.norm() > r {
            return Err(DevMapError::OutsideValidatedRadius(z, r));
        }
        Ok(z.ln() + Complex64::new(0.0, TAU * self.branch_index as f64))
    }

    /// Value on the current branch.
    pub fn eval(&self, z: Complex64) -> Result<Complex64, DevMapError> {
        Ok(self.eval_with_log(self.log_at(z)?))
    }

    /// Derivative on the current branch.
    pub fn deriv(&self, z: Complex64) -> Result<Complex64, DevMapError> {
        Ok(self.deriv_with_log(self.log_at(z)?))
    }

    /// Continue along the positively-oriented circle through `basepoint` in
    /// `steps` increments, checking the continuity of consecutive values.
    /// Returns the value after one full loop and the map on the next branch.
    pub fn continue_loop(
        &self,
        basepoint: Complex64,
        steps: usize,
    ) -> Result<(Complex64, Self), DevMapError> {
        if steps < 16 {
            return Err(DevMapError::TooFewSteps(steps));
        }
        let base_log = self.log_at(basepoint)?;
        let mut prev = self.eval_with_log(base_log);
        for j in 1..=steps {
            let logw = base_log + Complex64::new(0.0, TAU * j as f64 / steps as f64);
            let v = self.eval_with_log(logw);
            let jump = (v - prev).norm();
            if jump > 0.5 * (1.0 + prev.norm()) {
                return Err(DevMapError::ContinuationTooCoarse(jump, j));
            }
            prev = v;
        }
        Ok((prev, self.with_branch(self.branch_index + 1)))
    }

    /// Fit the monodromy transform of one positive loop: three basepoints
    /// determine the Möbius transform through the cross-ratio construction,
    /// the remaining ones validate it.
    pub fn extract_monodromy(
        &self,
        basepoints: &[Complex64],
    ) -> Result<MonodromyResult, DevMapError> {
        self.extract_monodromy_step(basepoints, 1)
    }

    /// As [`extract_monodromy`](Self::extract_monodromy) with an explicit
    /// branch step (−1 reverses the loop orientation).
    pub fn extract_monodromy_step(
        &self,
        basepoints: &[Complex64],
        step: i64,
    ) -> Result<MonodromyResult, DevMapError> {
        if basepoints.len() < 4 {
            return Err(DevMapError::TooFewBasepoints(basepoints.len()));
        }
        // Branch-incremented evaluation equals circle continuation (the
        // branch-consistency invariant); it is exact, so use it for the fit.
        let after = self.with_branch(self.branch_index + step);
        let mut v0 = Vec::with_capacity(basepoints.len());
        let mut v1 = Vec::with_capacity(basepoints.len());
        for &w in basepoints {
            v0.push(self.eval(w)?);
            v1.push(after.eval(w)?);
        }
        for a in 0..3 {
            for b in (a + 1)..3 {
                if (v0[a] - v0[b]).norm() < 1e-9 || (v1[a] - v1[b]).norm() < 1e-9 {
                    return Err(DevMapError::DegenerateTriple);
                }
            }
        }
        let ps = to_zero_one_infty(v0[0], v0[1], v0[2]);
        let pt = to_zero_one_infty(v1[0], v1[1], v1[2]);
        let raw = pt.inverse().compose_raw(&ps);
        let [a, b, c, d] = raw.mat;
        let mut transform = MobiusTransform::new(self.target_model(), a, b, c, d)
            .map_err(|_| DevMapError::NotProjective(f64::INFINITY))?;
        let fit_residual = |m: &MobiusTransform| -> f64 {
            v0.iter()
                .zip(&v1)
                .map(|(x, y)| (m.apply_raw(*x) - y).norm())
                .fold(0.0, f64::max)
        };
        let mut residual = fit_residual(&transform);
        // the three-point construction loses a few digits to conditioning;
        // polish with Gauss–Newton over all basepoints so the downstream
        // Fourier extraction is not contaminated at the r^{-n}-amplified modes
        for _ in 0..2 {
            let Some(polished) = polish_fit(&transform, &v0, &v1) else { break };
            let r = fit_residual(&polished);
            if r < residual {
                transform = polished;
                residual = r;
            } else {
                break;
            }
        }
        if residual > 1e-8 {
            return Err(DevMapError::NotProjective(residual));
        }
        let classification = transform.classify();
        Ok(MonodromyResult { transform, classification, fit_residual: residual })
    }
}

/// One Gauss–Newton step for the monodromy fit: N = (I + X)·M with
/// trace-free X = [[x₁, x₂], [x₃, −x₁]], linearized as
/// N(s) ≈ M(s) + 2x₁v + x₂ − x₃v² at v = M(s), solved by least squares
/// over all basepoints.
fn polish_fit(
    m: &MobiusTransform,
    v0: &[Complex64],
    v1: &[Complex64],
) -> Option<MobiusTransform> {
    let zero = Complex64::new(0.0, 0.0);
    let mut ata = [[zero; 3]; 3];
    let mut atb = [zero; 3];
    for (s, t) in v0.iter().zip(v1) {
        let v = m.apply_raw(*s);
        let row = [2.0 * v, Complex64::new(1.0, 0.0), -v * v];
        let r = t - v;
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i].conj() * row[j];
            }
            atb[i] += row[i].conj() * r;
        }
    }
    let x = solve3(&mut ata, &mut atb)?;
    let [a, b, c, d] = m.mat;
    let (x1, x2, x3) = (x[0], x[1], x[2]);
    let na = (1.0 + x1) * a + x2 * c;
    let nb = (1.0 + x1) * b + x2 * d;
    let nc = x3 * a + (1.0 - x1) * c;
    let nd = x3 * b + (1.0 - x1) * d;
    MobiusTransform::new(m.model, na, nb, nc, nd).ok()
}

/// 3×3 complex linear solve with partial pivoting.
fn solve3(a: &mut [[Complex64; 3]; 3], b: &mut [Complex64; 3]) -> Option<[Complex64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| {
            a[i][col].norm().partial_cmp(&a[j][col].norm()).unwrap()
        })?;
        if a[pivot][col].norm() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [Complex64::new(0.0, 0.0); 3];
    for col in (0..3).rev() {
        let mut s = b[col];
        for k in (col + 1)..3 {
            s -= a[col][k] * x[k];
        }
        x[col] = s / a[col][col];
    }
    Some(x)
}

/// The Möbius transform sending `(z1, z2, z3)` to `(0, 1, ∞)`.
fn to_zero_one_infty(z1: Complex64, z2: Complex64, z3: Complex64) -> MobiusTransform {
    MobiusTransform::from_matrix_unchecked(
        Model::Disk,
        z2 - z3,
        -z1 * (z2 - z3),
        z2 - z1,
        -z3 * (z2 - z1),
    )
    .expect("distinct triple")
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum MapDto {
    Power {
        alpha: f64,
        post: Option<MobiusTransform>,
    },
    Log {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        perturbation: Option<TruncatedSeries>,
        #[serde(default)]
        post: Option<MobiusTransform>,
    },
    Series {
        lead: f64,
        coeffs: Vec<[f64; 2]>,
        #[serde(default)]
        post: Option<MobiusTransform>,
    },
}

impl TryFrom<MapDto> for DevelopingMapSpec {
    type Error = String;

    fn try_from(dto: MapDto) -> Result<Self, String> {
        let check_post = |post: &Option<MobiusTransform>, model: Model| -> Result<(), String> {
            if let Some(p) = post {
                if p.model != model {
                    return Err(format!(
                        "post transform model {:?} does not match the map target {:?}",
                        p.model, model
                    ));
                }
                let [a, b, c, d] = p.mat;
                MobiusTransform::new(p.model, a, b, c, d).map_err(|e| e.to_string())?;
            }
            Ok(())
        };
        match dto {
            MapDto::Power { alpha, post } => {
                check_post(&post, Model::Disk)?;
                let mut m = DevelopingMapSpec::power(alpha).map_err(|e| e.to_string())?;
                m.post = post;
                Ok(m)
            }
            MapDto::Log { perturbation, post } => {
                check_post(&post, Model::HalfPlane)?;
                let mut m = match perturbation {
                    Some(p) => DevelopingMapSpec::log_perturbed(p),
                    None => DevelopingMapSpec::log_map(),
                };
                m.post = post;
                Ok(m)
            }
            MapDto::Series { lead, coeffs, post } => {
                check_post(&post, Model::Disk)?;
                let coeffs: Vec<Complex64> =
                    coeffs.iter().map(|p| Complex64::new(p[0], p[1])).collect();
                if coeffs.is_empty() {
                    return Err("series map needs coefficients".into());
                }
                let mut m = DevelopingMapSpec::series(TruncatedSeries::new(lead, coeffs))
                    .map_err(|e| e.to_string())?;
                m.post = post;
                Ok(m)
            }
        }
    }
}

impl From<DevelopingMapSpec> for MapDto {
    fn from(m: DevelopingMapSpec) -> MapDto {
        match m.core {
            MapCore::Power { alpha } => MapDto::Power { alpha, post: m.post },
            MapCore::Log { perturbation } => MapDto::Log { perturbation, post: m.post },
            MapCore::Series { series } => MapDto::Series {
                lead: series.lead,
                coeffs: series.coeffs.iter().map(|c| [c.re, c.im]).collect(),
                post: m.post,
            },
        }
    }
}
