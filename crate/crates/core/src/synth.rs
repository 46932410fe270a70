//! Synthesis of developing maps with known classification: conical inputs
//! w^θ(a₀ + a₁w + …), cusp inputs −i·log w + P(w), and random isometries for
//! post-composition. Each constructor also returns the gauge-fixed ξ the
//! classifier must recover.

use num_complex::Complex64;
use rand::Rng;

use crate::classify::{build_xi_conical, build_xi_cusp, gauge_fix, ClassifyError};
use crate::devmap::DevelopingMapSpec;
use crate::mobius::{MobiusTransform, Model};
use crate::series::TruncatedSeries;

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// A conical input of cone parameter θ = k + α: the series map
/// w^θ·Σⱼ pⱼ wʲ, together with the gauge-fixed ξ it must classify to.
/// `pert[0]` must be nonzero and `k + pert.len() − 1 ≤ order`.
pub fn conical_input(
    theta: f64,
    pert: &[Complex64],
    order: usize,
) -> Result<(DevelopingMapSpec, TruncatedSeries), ClassifyError> {
    assert!(theta > 0.0, "cone parameter must be positive");
    assert!(!pert.is_empty() && pert[0].norm() > 0.0, "leading coefficient must be nonzero");
    // integer θ means identity monodromy and α = 0
    let k = theta.floor() as usize;
    let alpha = theta - k as f64;
    assert!(k + pert.len() - 1 <= order, "perturbation degree exceeds the order");
    let map = DevelopingMapSpec::series(TruncatedSeries::new(theta, pert.to_vec()))
        .expect("nonzero series");
    let mut fourier = TruncatedSeries::zero(order);
    for (j, p) in pert.iter().enumerate() {
        fourier.coeffs[k + j] = *p;
    }
    let (xi, _) = gauge_fix(&build_xi_conical(&fourier, alpha, k)?);
    Ok((map, xi))
}

/// A cusp input −i·log w + Σₙ pₙ wⁿ together with its gauge-fixed ξ.
pub fn cusp_input(
    pert: &[Complex64],
    order: usize,
) -> Result<(DevelopingMapSpec, TruncatedSeries), ClassifyError> {
    assert!(pert.len() - 1 <= order, "perturbation degree exceeds the order");
    let map = if pert.iter().all(|c| c.norm() == 0.0) {
        DevelopingMapSpec::log_map()
    } else {
        DevelopingMapSpec::log_perturbed(TruncatedSeries::new(0.0, pert.to_vec()))
    };
    let mut fourier = TruncatedSeries::zero(order);
    for (n, p) in pert.iter().enumerate() {
        fourier.coeffs[n] = *p;
    }
    let k = fourier.first_significant(1e-10).unwrap_or(0);
    let (xi, _) = gauge_fix(&build_xi_cusp(&fourier, k)?);
    Ok((map, xi))
}

/// Random element of PSU(1,1).
pub fn random_disk_isometry<R: Rng>(rng: &mut R) -> MobiusTransform {
    let t: f64 = rng.gen_range(0.0..1.0);
    let psi: f64 = rng.gen_range(0.0..TAU);
    let chi: f64 = rng.gen_range(0.0..TAU);
    let a = Complex64::from_polar(t.cosh(), psi);
    let b = Complex64::from_polar(t.sinh(), chi);
    MobiusTransform::new(Model::Disk, a, b, b.conj(), a.conj()).expect("unit determinant")
}

/// Random element of PSL(2,ℝ) from a rotation–dilation–translation product.
pub fn random_halfplane_isometry<R: Rng>(rng: &mut R) -> MobiusTransform {
    let half: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    let rot = MobiusTransform::from_matrix_unchecked(
        Model::HalfPlane,
        Complex64::new(half.cos(), 0.0),
        Complex64::new(-half.sin(), 0.0),
        Complex64::new(half.sin(), 0.0),
        Complex64::new(half.cos(), 0.0),
    )
    .expect("unit determinant");
    let lambda: f64 = rng.gen_range(0.5..2.0);
    let x: f64 = rng.gen_range(-2.0..2.0);
    let m = MobiusTransform::translation(x)
        .compose_raw(&MobiusTransform::dilation(lambda))
        .compose_raw(&rot);
    let [a, b, c, d] = m.mat;
    MobiusTransform::new(Model::HalfPlane, a, b, c, d).expect("real entries")
}

/// Random perturbation coefficients with unit leading term and decaying
/// magnitudes, safe for the validated-radius bound of series maps.
pub fn random_perturbation<R: Rng>(rng: &mut R, degree: usize, scale: f64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(1.0, 0.0)];
    for n in 1..=degree {
        let mag = rng.gen_range(0.0..scale) / n as f64;
        let arg = rng.gen_range(0.0..TAU);
        out.push(Complex64::from_polar(mag, arg));
    }
    out
}
