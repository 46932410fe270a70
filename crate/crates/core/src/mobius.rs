//! Orientation-preserving isometries of the hyperbolic plane in both the
//! Poincaré disk model (PSU(1,1)) and the upper half-plane model (PSL(2,ℝ)),
//! their classification into elliptic/parabolic/hyperbolic, conjugation to
//! normal forms, and the Cayley transform between the models.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Determinants smaller than this are rejected as degenerate.
pub const DET_TOL: f64 = 1e-12;
/// Group-shape check tolerance (PSU(1,1) / PSL(2,ℝ) entry structure).
pub const SHAPE_TOL: f64 = 1e-10;
/// |trace² − 4| below this classifies as parabolic (or identity).
pub const PARABOLIC_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum MobiusError {
    #[error("matrix determinant too small: |det| = {0:.3e}")]
    DegenerateMatrix(f64),
    #[error("matrix does not have the isometry-group shape for the {0:?} model")]
    ShapeViolation(Model),
    #[error("model mismatch: {0:?} vs {1:?}")]
    ModelMismatch(Model, Model),
    #[error("point is at the pole of the transformation")]
    AtPole,
    #[error("point {0} lies outside the {1:?} model domain")]
    OutsideDomain(Complex64, Model),
    #[error("probe list is empty")]
    EmptyProbes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Disk,
    #[serde(rename = "halfplane")]
    HalfPlane,
}

impl Model {
    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            Model::Disk => z.norm() < 1.0,
            Model::HalfPlane => z.im > 0.0,
        }
    }
}

/// A Möbius transformation `z ↦ (az+b)/(cz+d)` with `ad − bc = 1`, tagged by
/// the hyperbolic model it acts on. Transforms are identified with their
/// negatives; a deterministic sign representative is chosen at construction.
///
/// Conjugators produced by [`MobiusTransform::classify`] may carry a Cayley
/// factor and then do not satisfy the group shape of either model; their tag
/// is the model of the normal form they map to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobiusTransform {
    pub model: Model,
    #[serde(with = "mat_serde")]
    pub mat: [Complex64; 4],
}

mod mat_serde {
    use super::*;

    pub fn serialize<S: serde::Serializer>(m: &[Complex64; 4], s: S) -> Result<S::Ok, S::Error> {
        let rows: [[f64; 2]; 4] = [
            [m[0].re, m[0].im],
            [m[1].re, m[1].im],
            [m[2].re, m[2].im],
            [m[3].re, m[3].im],
        ];
        serde::Serialize::serialize(&rows, s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<[Complex64; 4], D::Error> {
        let rows = <[[f64; 2]; 4]>::deserialize(d)?;
        Ok([
            Complex64::new(rows[0][0], rows[0][1]),
            Complex64::new(rows[1][0], rows[1][1]),
            Complex64::new(rows[2][0], rows[2][1]),
            Complex64::new(rows[3][0], rows[3][1]),
        ])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IsometryKind {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// Classification outcome: the kind, the normal-form parameter (rotation
/// angle θ ∈ (0, 2π) for elliptic, translation t for parabolic, dilation
/// λ > 1 for hyperbolic, 0 for identity) and a conjugator `K` with
/// `K ∘ L ∘ K⁻¹ = normal_form`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsometryClass {
    pub kind: IsometryKind,
    pub parameter: f64,
    pub conjugator: MobiusTransform,
}

impl IsometryClass {
    /// The Lemma-style normal form this class conjugates to: a disk rotation,
    /// a half-plane translation, a half-plane dilation, or the identity.
    pub fn normal_form(&self) -> MobiusTransform {
        match self.kind {
            IsometryKind::Identity => MobiusTransform::identity(self.conjugator.model),
            IsometryKind::Elliptic => MobiusTransform::rotation(self.parameter),
            IsometryKind::Parabolic => MobiusTransform::translation(self.parameter),
            IsometryKind::Hyperbolic => MobiusTransform::dilation(self.parameter),
        }
    }
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}
fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}
fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

impl MobiusTransform {
    /// Group element constructor: renormalizes the determinant to 1, checks
    /// and then enforces the isometry-group shape of the model, and picks the
    /// deterministic projective sign representative.
    pub fn new(
        model: Model,
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    ) -> Result<Self, MobiusError> {
        let mut t = Self::from_matrix_unchecked(model, a, b, c, d)?;
        let [a, b, c, d] = t.mat;
        match model {
            Model::Disk => {
                if (d - a.conj()).norm() > SHAPE_TOL || (c - b.conj()).norm() > SHAPE_TOL {
                    return Err(MobiusError::ShapeViolation(model));
                }
                let am = (a + d.conj()) * 0.5;
                let bm = (b + c.conj()) * 0.5;
                t.mat = [am, bm, bm.conj(), am.conj()];
            }
            Model::HalfPlane => {
                if a.im.abs() > SHAPE_TOL
                    || b.im.abs() > SHAPE_TOL
                    || c.im.abs() > SHAPE_TOL
                    || d.im.abs() > SHAPE_TOL
                {
                    return Err(MobiusError::ShapeViolation(model));
                }
                t.mat = [
                    Complex64::new(a.re, 0.0),
                    Complex64::new(b.re, 0.0),
                    Complex64::new(c.re, 0.0),
                    Complex64::new(d.re, 0.0),
                ];
            }
        }
        t.renormalize()?;
        Ok(t)
    }

    /// Determinant normalization and sign convention only — no group-shape
    /// check. Used for conjugators, which may mix models.
    pub fn from_matrix_unchecked(
        model: Model,
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    ) -> Result<Self, MobiusError> {
        let mut t = MobiusTransform { model, mat: [a, b, c, d] };
        t.renormalize()?;
        Ok(t)
    }

    fn renormalize(&mut self) -> Result<(), MobiusError> {
        let [a, b, c, d] = self.mat;
        let det = a * d - b * c;
        if det.norm() < DET_TOL {
            return Err(MobiusError::DegenerateMatrix(det.norm()));
        }
        let s = det.sqrt().inv();
        self.mat = [a * s, b * s, c * s, d * s];
        self.fix_sign();
        Ok(())
    }

    /// Deterministic projective representative: the first entry component
    /// exceeding 1e-12 in magnitude is made positive.
    fn fix_sign(&mut self) {
        let parts = [
            self.mat[0].re,
            self.mat[0].im,
            self.mat[1].re,
            self.mat[1].im,
            self.mat[2].re,
            self.mat[2].im,
            self.mat[3].re,
            self.mat[3].im,
        ];
        for p in parts {
            if p.abs() > 1e-12 {
                if p < 0.0 {
                    for m in &mut self.mat {
                        *m = -*m;
                    }
                }
                return;
            }
        }
    }

    pub fn identity(model: Model) -> Self {
        MobiusTransform { model, mat: [one(), zero(), zero(), one()] }
    }

    /// Disk rotation `z ↦ e^{iθ} z`.
    pub fn rotation(theta: f64) -> Self {
        let h = Complex64::from_polar(1.0, theta / 2.0);
        let mut t = MobiusTransform { model: Model::Disk, mat: [h, zero(), zero(), h.conj()] };
        t.fix_sign();
        t
    }

    /// Half-plane translation `z ↦ z + t`.
    pub fn translation(t: f64) -> Self {
        MobiusTransform {
            model: Model::HalfPlane,
            mat: [one(), Complex64::new(t, 0.0), zero(), one()],
        }
    }

    /// Half-plane dilation `z ↦ λ z`, λ > 0.
    pub fn dilation(lambda: f64) -> Self {
        assert!(lambda > 0.0);
        let s = lambda.sqrt();
        MobiusTransform {
            model: Model::HalfPlane,
            mat: [Complex64::new(s, 0.0), zero(), zero(), Complex64::new(1.0 / s, 0.0)],
        }
    }

    /// The disk automorphism `z ↦ (z − p)/(1 − p̄ z)` sending `p` to 0.
    pub fn disk_automorphism(p: Complex64) -> Result<Self, MobiusError> {
        let n2 = 1.0 - p.norm_sqr();
        if n2 <= 0.0 {
            return Err(MobiusError::OutsideDomain(p, Model::Disk));
        }
        let s = 1.0 / n2.sqrt();
        Ok(MobiusTransform {
            model: Model::Disk,
            mat: [one() * s, -p * s, -p.conj() * s, one() * s],
        })
    }

    pub fn det(&self) -> Complex64 {
        self.mat[0] * self.mat[3] - self.mat[1] * self.mat[2]
    }

    pub fn trace(&self) -> Complex64 {
        self.mat[0] + self.mat[3]
    }

    /// Apply without domain or pole checks.
    pub fn apply_raw(&self, z: Complex64) -> Complex64 {
        let [a, b, c, d] = self.mat;
        (a * z + b) / (c * z + d)
    }

    /// Apply with model-domain and pole checks.
    pub fn apply(&self, z: Complex64) -> Result<Complex64, MobiusError> {
        if !self.model.contains(z) {
            return Err(MobiusError::OutsideDomain(z, self.model));
        }
        let [_, _, c, d] = self.mat;
        if (c * z + d).norm() < 1e-12 {
            return Err(MobiusError::AtPole);
        }
        Ok(self.apply_raw(z))
    }

    /// Derivative `1/(cz+d)²` (valid for det 1).
    pub fn deriv_raw(&self, z: Complex64) -> Complex64 {
        let [_, _, c, d] = self.mat;
        let den = c * z + d;
        (den * den).inv()
    }

    pub fn compose(&self, other: &Self) -> Result<Self, MobiusError> {
        if self.model != other.model {
            return Err(MobiusError::ModelMismatch(self.model, other.model));
        }
        Ok(self.compose_raw(other))
    }

    /// Matrix product `self · other` (i.e. `self ∘ other` as maps), without
    /// the model-tag check; the result carries `self`'s tag.
    pub fn compose_raw(&self, other: &Self) -> Self {
        let [a1, b1, c1, d1] = self.mat;
        let [a2, b2, c2, d2] = other.mat;
        let mut t = MobiusTransform {
            model: self.model,
            mat: [
                a1 * a2 + b1 * c2,
                a1 * b2 + b1 * d2,
                c1 * a2 + d1 * c2,
                c1 * b2 + d1 * d2,
            ],
        };
        t.fix_sign();
        t
    }

    pub fn inverse(&self) -> Self {
        let [a, b, c, d] = self.mat;
        let mut t = MobiusTransform { model: self.model, mat: [d, -b, -c, a] };
        t.fix_sign();
        t
    }

    /// Projective equality: entrywise agreement up to a global sign.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let dist = |sign: f64| {
            self.mat
                .iter()
                .zip(&other.mat)
                .map(|(x, y)| (x - y * sign).norm())
                .fold(0.0, f64::max)
        };
        dist(1.0) <= tol || dist(-1.0) <= tol
    }

    /// Classify into identity / elliptic / parabolic / hyperbolic, with the
    /// normal-form parameter and a conjugator realizing the normal form.
    ///
    /// The conjugator maps this transform's model domain to the model of the
    /// normal form (disk for elliptic, half-plane for parabolic and
    /// hyperbolic), so it may include a Cayley factor.
    pub fn classify(&self) -> IsometryClass {
        let [a, b, c, d] = self.mat;
        if b.norm() <= PARABOLIC_TOL && c.norm() <= PARABOLIC_TOL && (a - d).norm() <= PARABOLIC_TOL
        {
            return IsometryClass {
                kind: IsometryKind::Identity,
                parameter: 0.0,
                conjugator: MobiusTransform::identity(self.model),
            };
        }
        let tr = self.trace().re;
        let t2 = tr * tr;
        if (t2 - 4.0).abs() < PARABOLIC_TOL {
            self.classify_parabolic()
        } else if t2 < 4.0 {
            self.classify_elliptic()
        } else {
            self.classify_hyperbolic()
        }
    }

    fn to_disk(&self) -> MobiusTransform {
        match self.model {
            Model::Disk => self.clone(),
            Model::HalfPlane => {
                let c = cayley_matrix();
                let mut t = c.compose_raw(self).compose_raw(&c.inverse());
                t.model = Model::Disk;
                t
            }
        }
    }

    fn to_halfplane(&self) -> MobiusTransform {
        match self.model {
            Model::Disk => {
                let c = cayley_matrix();
                let mut t = c.inverse().compose_raw(self).compose_raw(&c);
                t.model = Model::HalfPlane;
                t
            }
            Model::HalfPlane => self.clone(),
        }
    }

    fn classify_elliptic(&self) -> IsometryClass {
        let ld = self.to_disk();
        let [a, b, c, d] = ld.mat;
        // Fixed points of cz² + (d−a)z − b = 0 come in an inverse pair
        // z, 1/z̄; take the interior one.
        let (r1, r2) = solve_quadratic(c, d - a, -b);
        let p = if r1.norm() <= r2.norm() { r1 } else { r2 };
        let den = c * p + d;
        // Rotation angle = arg L'(p), folded into (0, 2π).
        let mut theta = (-2.0) * den.arg();
        theta = theta.rem_euclid(2.0 * std::f64::consts::PI);
        if theta == 0.0 {
            theta = 2.0 * std::f64::consts::PI;
        }
        let k0 = MobiusTransform::disk_automorphism(p)
            .unwrap_or_else(|_| MobiusTransform::identity(Model::Disk));
        let conjugator = match self.model {
            Model::Disk => k0,
            Model::HalfPlane => {
                let mut k = k0.compose_raw(&cayley_matrix());
                k.model = Model::Disk;
                k
            }
        };
        IsometryClass { kind: IsometryKind::Elliptic, parameter: theta, conjugator }
    }

    fn classify_parabolic(&self) -> IsometryClass {
        let lh = self.to_halfplane();
        let [a, b, c, d] = lh.mat;
        let k = if c.norm() < 1e-9 {
            // fixed point already at ∞
            MobiusTransform::identity(Model::HalfPlane)
        } else {
            // double fixed point on the boundary, sent to ∞ by z ↦ −1/(z−x)
            let x = ((a - d) / (2.0 * c)).re;
            MobiusTransform {
                model: Model::HalfPlane,
                mat: [zero(), -one(), one(), Complex64::new(-x, 0.0)],
            }
        };
        let n = k.compose_raw(&lh).compose_raw(&k.inverse());
        let t = (n.apply_raw(i()) - i()).re;
        let _ = b;
        let conjugator = match self.model {
            Model::Disk => {
                let mut kk = k.compose_raw(&cayley_matrix().inverse());
                kk.model = Model::HalfPlane;
                kk
            }
            Model::HalfPlane => k,
        };
        IsometryClass { kind: IsometryKind::Parabolic, parameter: t, conjugator }
    }

    fn classify_hyperbolic(&self) -> IsometryClass {
        let lh = self.to_halfplane();
        let [a, b, c, d] = lh.mat;
        // boundary fixed points
        let (p, q): (Option<f64>, Option<f64>) = if c.norm() < 1e-9 {
            (Some((b / (d - a)).re), None) // second fixed point is ∞
        } else {
            let (r1, r2) = solve_quadratic(c, d - a, -b);
            (Some(r1.re), Some(r2.re))
        };
        let build = |to_zero: Option<f64>, to_inf: Option<f64>| -> MobiusTransform {
            match (to_zero, to_inf) {
                (Some(x), None) => MobiusTransform {
                    model: Model::HalfPlane,
                    mat: [one(), Complex64::new(-x, 0.0), zero(), one()],
                },
                (None, Some(x)) => MobiusTransform {
                    model: Model::HalfPlane,
                    mat: [zero(), -one(), one(), Complex64::new(-x, 0.0)],
                },
                (Some(x), Some(y)) => {
                    // z ↦ (z−x)/(z−y), determinant made positive
                    let m = if x - y > 0.0 {
                        [one(), Complex64::new(-x, 0.0), one(), Complex64::new(-y, 0.0)]
                    } else {
                        [-one(), Complex64::new(x, 0.0), one(), Complex64::new(-y, 0.0)]
                    };
                    let mut t = MobiusTransform { model: Model::HalfPlane, mat: m };
                    t.renormalize().expect("distinct fixed points");
                    t
                }
                (None, None) => unreachable!(),
            }
        };
        let lambda_of = |k: &MobiusTransform| -> f64 {
            let n = k.compose_raw(&lh).compose_raw(&k.inverse());
            (n.apply_raw(i()) / i()).re
        };
        let mut k = build(p, q);
        let mut lambda = lambda_of(&k);
        if lambda < 1.0 {
            k = build(q, p);
            lambda = lambda_of(&k);
        }
        let conjugator = match self.model {
            Model::Disk => {
                let mut kk = k.compose_raw(&cayley_matrix().inverse());
                kk.model = Model::HalfPlane;
                kk
            }
            Model::HalfPlane => k,
        };
        IsometryClass { kind: IsometryKind::Hyperbolic, parameter: lambda, conjugator }
    }
}

/// Roots of `A z² + B z + C = 0` (A assumed non-negligible relative to B, C
/// handled by the caller; here A tiny degrades to one root at −C/B).
fn solve_quadratic(a: Complex64, b: Complex64, c: Complex64) -> (Complex64, Complex64) {
    let scale = a.norm().max(b.norm()).max(c.norm());
    if a.norm() < 1e-14 * scale {
        let r = -c / b;
        return (r, r);
    }
    let disc = b * b - 4.0 * a * c;
    let sq = disc.sqrt();
    // pick the sign that avoids cancellation
    let q = if (b.conj() * sq).re >= 0.0 { -(b + sq) * 0.5 } else { -(b - sq) * 0.5 };
    if q.norm() < 1e-300 {
        (zero(), zero())
    } else {
        (q / a, c / q)
    }
}

/// The Cayley map `H → D`, `z ↦ (z − i)/(z + i)`, as a det-1 matrix.
pub fn cayley_matrix() -> MobiusTransform {
    // [[1, −i], [1, i]] / sqrt(2i)
    let s = (2.0 * i()).sqrt().inv();
    MobiusTransform {
        model: Model::Disk,
        mat: [s, -i() * s, s, i() * s],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CayleyDirection {
    HalfPlaneToDisk,
    DiskToHalfPlane,
}

/// Pointwise Cayley transform between the models.
pub fn cayley(z: Complex64, direction: CayleyDirection) -> Result<Complex64, MobiusError> {
    match direction {
        CayleyDirection::HalfPlaneToDisk => {
            if (z + i()).norm() < 1e-12 {
                return Err(MobiusError::AtPole);
            }
            Ok((z - i()) / (z + i()))
        }
        CayleyDirection::DiskToHalfPlane => {
            if (one() - z).norm() < 1e-12 {
                return Err(MobiusError::AtPole);
            }
            Ok(i() * (one() + z) / (one() - z))
        }
    }
}

/// Carry a transform to the other model by Cayley conjugation, converting
/// between the PSL(2,ℝ) and PSU(1,1) shapes.
pub fn cayley_conjugate(l: &MobiusTransform) -> Result<MobiusTransform, MobiusError> {
    let t = match l.model {
        Model::HalfPlane => l.to_disk(),
        Model::Disk => l.to_halfplane(),
    };
    let [a, b, c, d] = t.mat;
    MobiusTransform::new(t.model, a, b, c, d)
}

/// Hyperbolic distance in the curvature −1 normalization:
/// disk `d = 2 artanh|(z₁−z₂)/(1−z̄₁z₂)|`,
/// half-plane `sinh(d/2) = |z₁−z₂| / (2 √(y₁y₂))`.
pub fn hyperbolic_distance(model: Model, z1: Complex64, z2: Complex64) -> Result<f64, MobiusError> {
    if !model.contains(z1) {
        return Err(MobiusError::OutsideDomain(z1, model));
    }
    if !model.contains(z2) {
        return Err(MobiusError::OutsideDomain(z2, model));
    }
    match model {
        Model::Disk => {
            let r = ((z1 - z2) / (one() - z1.conj() * z2)).norm();
            Ok(2.0 * r.atanh())
        }
        Model::HalfPlane => {
            let s = (z1 - z2).norm() / (2.0 * (z1.im * z2.im).sqrt());
            Ok(2.0 * s.asinh())
        }
    }
}

/// Minimum over the probes of `d(z, Lz)` — an upper bound on the true
/// displacement infimum of the isometry.
pub fn displacement_infimum(
    l: &MobiusTransform,
    probes: &[Complex64],
) -> Result<f64, MobiusError> {
    if probes.is_empty() {
        return Err(MobiusError::EmptyProbes);
    }
    let mut best = f64::INFINITY;
    for &z in probes {
        let lz = l.apply(z)?;
        best = best.min(hyperbolic_distance(l.model, z, lz)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn apply_identity_and_rotation() {
        let id = MobiusTransform::identity(Model::Disk);
        let z = c(0.3, 0.1);
        assert!((id.apply(z).unwrap() - z).norm() < 1e-15);

        let rot = MobiusTransform::rotation(PI / 2.0);
        let got = rot.apply(c(0.5, 0.0)).unwrap();
        assert!((got - c(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn apply_halfplane_translation() {
        let t = MobiusTransform::translation(2.0 * PI);
        let got = t.apply(c(0.0, 1.0)).unwrap();
        assert!((got - c(2.0 * PI, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn apply_rejects_pole_and_outside() {
        let t = MobiusTransform::translation(1.0);
        assert!(matches!(
            t.apply(c(0.0, -1.0)),
            Err(MobiusError::OutsideDomain(_, _))
        ));
    }

    #[test]
    fn compose_inverse_is_identity() {
        let l = MobiusTransform::new(Model::HalfPlane, c(2.0, 0.0), c(1.0, 0.0), c(3.0, 0.0), c(2.0, 0.0))
            .unwrap();
        let p = l.compose(&l.inverse()).unwrap();
        assert!(p.approx_eq(&MobiusTransform::identity(Model::HalfPlane), 1e-12));
    }

    #[test]
    fn translations_add_and_rotations_add() {
        let s = MobiusTransform::translation(1.5);
        let t = MobiusTransform::translation(2.5);
        assert!(s.compose(&t).unwrap().approx_eq(&MobiusTransform::translation(4.0), 1e-12));

        let r1 = MobiusTransform::rotation(1.0);
        let r2 = MobiusTransform::rotation(2.0);
        assert!(r1.compose(&r2).unwrap().approx_eq(&MobiusTransform::rotation(3.0), 1e-12));
    }

    #[test]
    fn compose_rejects_model_mismatch() {
        let s = MobiusTransform::translation(1.0);
        let r = MobiusTransform::rotation(1.0);
        assert!(matches!(s.compose(&r), Err(MobiusError::ModelMismatch(_, _))));
    }

    #[test]
    fn new_rejects_shape_violation() {
        assert!(matches!(
            MobiusTransform::new(Model::HalfPlane, c(1.0, 0.5), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)),
            Err(MobiusError::ShapeViolation(Model::HalfPlane))
        ));
    }

    #[test]
    fn classify_disk_rotation() {
        let l = MobiusTransform::rotation(1.0);
        let cls = l.classify();
        assert_eq!(cls.kind, IsometryKind::Elliptic);
        assert!((cls.parameter - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classify_halfplane_translation() {
        let l = MobiusTransform::translation(2.0 * PI);
        let cls = l.classify();
        assert_eq!(cls.kind, IsometryKind::Parabolic);
        assert!((cls.parameter - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn classify_halfplane_dilation() {
        let l = MobiusTransform::dilation(4.0);
        let cls = l.classify();
        assert_eq!(cls.kind, IsometryKind::Hyperbolic);
        assert!((cls.parameter - 4.0).abs() < 1e-10);
    }

    #[test]
    fn classify_identity() {
        let l = MobiusTransform::identity(Model::Disk);
        assert_eq!(l.classify().kind, IsometryKind::Identity);
    }

    #[test]
    fn classify_conjugated_dilation() {
        // conjugation invariance of kind and parameter (λ canonicalized > 1)
        let l = MobiusTransform::dilation(4.0);
        let m = MobiusTransform::new(Model::HalfPlane, c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(3.0, 0.0))
            .unwrap();
        let conj = m.compose(&l).unwrap().compose(&m.inverse()).unwrap();
        let cls = conj.classify();
        assert_eq!(cls.kind, IsometryKind::Hyperbolic);
        assert!((cls.parameter - 4.0).abs() < 1e-9);
    }

    #[test]
    fn conjugator_certificate() {
        // K L K⁻¹ must reproduce the normal form at sample points
        let samples = [c(0.1, 0.3), c(-0.2, 0.05), c(0.4, -0.1), c(0.0, 0.6)];
        let cases: Vec<MobiusTransform> = vec![
            MobiusTransform::rotation(2.2),
            MobiusTransform::new(Model::Disk, c(1.3, 0.4), c(0.5, -0.3), c(0.5, 0.3), c(1.3, -0.4)).unwrap(),
            MobiusTransform::translation(3.0),
            MobiusTransform::dilation(2.5),
            MobiusTransform::new(Model::HalfPlane, c(2.0, 0.0), c(1.0, 0.0), c(3.0, 0.0), c(2.0, 0.0)).unwrap(),
        ];
        for l in cases {
            let cls = l.classify();
            let nf = cls.normal_form();
            let k = &cls.conjugator;
            let ki = k.inverse();
            for &s in &samples {
                // map a disk sample into the source domain of K⁻¹ first
                let z = match nf.model {
                    Model::Disk => s,
                    Model::HalfPlane => cayley(s, CayleyDirection::DiskToHalfPlane).unwrap(),
                };
                let lhs = k.apply_raw(l.apply_raw(ki.apply_raw(z)));
                let rhs = nf.apply_raw(z);
                assert!(
                    (lhs - rhs).norm() < 1e-9,
                    "normal form certificate failed: {lhs} vs {rhs} for {l:?}"
                );
            }
        }
    }

    #[test]
    fn cayley_roundtrip_and_center() {
        let d = cayley(c(0.0, 1.0), CayleyDirection::HalfPlaneToDisk).unwrap();
        assert!(d.norm() < 1e-15);
        let z = c(0.3, -0.2);
        let h = cayley(z, CayleyDirection::DiskToHalfPlane).unwrap();
        let back = cayley(h, CayleyDirection::HalfPlaneToDisk).unwrap();
        assert!((back - z).norm() < 1e-12);
    }

    #[test]
    fn cayley_conjugate_translation_is_parabolic_fixing_one() {
        let t = MobiusTransform::translation(1.7);
        let d = cayley_conjugate(&t).unwrap();
        assert_eq!(d.model, Model::Disk);
        let cls = d.classify();
        assert_eq!(cls.kind, IsometryKind::Parabolic);
        // fixed point: the Cayley image of ∞ is 1
        let [a, b, cc, dd] = d.mat;
        let (r1, r2) = solve_quadratic(cc, dd - a, -b);
        let fp = if (r1 - one()).norm() < (r2 - one()).norm() { r1 } else { r2 };
        assert!((fp - one()).norm() < 1e-6, "fixed point {fp}");
    }

    #[test]
    fn distance_closed_forms() {
        // half-plane: translation probed high up
        let y = 1.0e4;
        let d = hyperbolic_distance(Model::HalfPlane, c(0.0, y), c(2.0 * PI, y)).unwrap();
        assert!((d - 2.0 * (PI / y).asinh()).abs() < 1e-18);
        assert!(d < 2.0 * PI / y);

        // disk radial distance
        let d = hyperbolic_distance(Model::Disk, c(0.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!((d - 2.0 * 0.5_f64.atanh()).abs() < 1e-14);
    }

    #[test]
    fn displacement_bounds() {
        let id = MobiusTransform::identity(Model::HalfPlane);
        let probes = [c(0.0, 1.0), c(1.0, 2.0)];
        assert!(displacement_infimum(&id, &probes).unwrap() < 1e-15);

        let t = MobiusTransform::translation(2.0 * PI);
        let y = 1.0e4;
        let d = displacement_infimum(&t, &[c(0.0, y)]).unwrap();
        assert!((d - 6.283e-4).abs() < 1e-6);

        let l = MobiusTransform::dilation(4.0);
        for k in 0..5 {
            let z = c(0.0, 10f64.powi(k - 2));
            let d = displacement_infimum(&l, &[z]).unwrap();
            assert!(d >= 4f64.ln() - 1e-12);
        }
        assert!(displacement_infimum(&t, &[]).is_err());
    }

    #[test]
    fn isometries_preserve_distance() {
        let l = MobiusTransform::new(Model::Disk, c(1.2, 0.3), c(0.4, -0.2), c(0.4, 0.2), c(1.2, -0.3)).unwrap();
        let pairs = [
            (c(0.1, 0.2), c(-0.3, 0.4)),
            (c(0.0, 0.0), c(0.5, -0.5)),
            (c(0.7, 0.1), c(-0.2, -0.6)),
        ];
        for (z1, z2) in pairs {
            let d0 = hyperbolic_distance(Model::Disk, z1, z2).unwrap();
            let d1 = hyperbolic_distance(Model::Disk, l.apply(z1).unwrap(), l.apply(z2).unwrap()).unwrap();
            assert!((d0 - d1).abs() < 1e-10);
        }
    }

    #[test]
    fn serialization_roundtrip() {
        let l = MobiusTransform::new(Model::Disk, c(1.2, 0.3), c(0.4, -0.2), c(0.4, 0.2), c(1.2, -0.3)).unwrap();
        let s = serde_json::to_string(&l).unwrap();
        assert!(s.contains("\"model\":\"disk\""));
        assert!(s.contains("\"mat\""));
        let back: MobiusTransform = serde_json::from_str(&s).unwrap();
        assert!(l.approx_eq(&back, 1e-15));
    }
}
