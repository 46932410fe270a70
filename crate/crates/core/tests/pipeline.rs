//! Cross-module invariants: branch consistency, pullback well-definedness,
//! conjugation invariance of the classification, and distance preservation.

use hypsing::classify::{classify_singularity, ClassifyConfig, SingularityKind};
use hypsing::devmap::DevelopingMapSpec;
use hypsing::metrics::ConformalMetric;
use hypsing::mobius::{
    cayley, hyperbolic_distance, CayleyDirection, IsometryKind, MobiusTransform, Model,
};
use hypsing::series::TruncatedSeries;
use hypsing::synth;
use hypsing::verify::schwarz_pick_margin;
use hypsing::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TAU: f64 = 2.0 * std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sample_maps() -> Vec<DevelopingMapSpec> {
    vec![
        DevelopingMapSpec::power(0.5).unwrap(),
        DevelopingMapSpec::power(0.05).unwrap(),
        DevelopingMapSpec::log_map(),
        DevelopingMapSpec::series(TruncatedSeries::new(
            0.3,
            vec![c(1.0, 0.0), c(0.1, 0.05), c(0.0, -0.04)],
        ))
        .unwrap(),
    ]
}

#[test]
fn two_loops_equal_double_branch_and_double_monodromy() {
    let bps: Vec<Complex64> =
        (0..6).map(|j| Complex64::from_polar(0.25, TAU * j as f64 / 7.0)).collect();
    for f in sample_maps() {
        let m = f.extract_monodromy(&bps).unwrap();
        let twice = m.transform.compose_raw(&m.transform);
        let f2 = f.with_branch(2);
        for &w in &bps {
            let direct = f2.eval(w).unwrap();
            let via = twice.apply_raw(f.eval(w).unwrap());
            assert!((direct - via).norm() <= 1e-9, "at {w}: {direct} vs {via}");
        }
        let (end1, next) = f.continue_loop(w0(), 256).unwrap();
        let (end2, next2) = next.continue_loop(w0(), 256).unwrap();
        assert_eq!(next2.branch_index, 2);
        assert!((end1 - next.eval(w0()).unwrap()).norm() < 1e-10);
        assert!((end2 - f2.eval(w0()).unwrap()).norm() < 1e-10);
    }
}

fn w0() -> Complex64 {
    c(0.25, 0.0)
}

#[test]
fn pullback_density_is_branch_independent() {
    for f in sample_maps() {
        let base = match f.target_model() {
            Model::Disk => ConformalMetric::Disk,
            Model::HalfPlane => ConformalMetric::HalfPlane,
        };
        for branch in [0i64, 1, 2, -1] {
            let pb = ConformalMetric::Pullback {
                map: f.with_branch(branch),
                base: Box::new(base.clone()),
            };
            let reference = ConformalMetric::Pullback {
                map: f.clone(),
                base: Box::new(base.clone()),
            };
            for j in 0..8 {
                let z = Complex64::from_polar(0.2 + 0.02 * j as f64, 0.8 * j as f64);
                let a = pb.density(z).unwrap();
                let b = reference.density(z).unwrap();
                assert!((a - b).abs() <= 1e-10 * b.max(1.0), "branch {branch} at {z}");
            }
        }
    }
}

#[test]
fn derivative_nonvanishing_on_validated_annulus() {
    for f in sample_maps() {
        for j in 0..32 {
            let z = Complex64::from_polar(0.1 + 0.012 * j as f64, 0.7 * j as f64);
            assert!(f.deriv(z).unwrap().norm() >= 1e-12);
        }
    }
}

#[test]
fn classification_kind_is_conjugation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..30 {
        let l = synth::random_disk_isometry(&mut rng);
        let g = synth::random_disk_isometry(&mut rng);
        let conj = g.compose_raw(&l).compose_raw(&g.inverse());
        let a = l.classify();
        let b = conj.classify();
        assert_eq!(a.kind, b.kind);
        match a.kind {
            IsometryKind::Elliptic | IsometryKind::Hyperbolic => {
                assert!(
                    (a.parameter - b.parameter).abs() < 1e-8,
                    "{:?}: {} vs {}",
                    a.kind,
                    a.parameter,
                    b.parameter
                );
            }
            // parabolic translation length is not conjugation invariant,
            // only its sign is
            IsometryKind::Parabolic => {
                assert_eq!(a.parameter > 0.0, b.parameter > 0.0);
            }
            IsometryKind::Identity => {}
        }
    }
}

#[test]
fn conjugator_certificate_holds() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let l = synth::random_halfplane_isometry(&mut rng);
        let cls = l.classify();
        let k = &cls.conjugator;
        let n = k.compose_raw(&l).compose_raw(&k.inverse());
        assert!(
            n.approx_eq(&cls.normal_form(), 1e-7),
            "{:?} param {}",
            cls.kind,
            cls.parameter
        );
    }
}

#[test]
fn isometries_preserve_distance() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let l = synth::random_halfplane_isometry(&mut rng);
        let z1 = c(0.3, 1.2);
        let z2 = c(-0.7, 0.4);
        let d = hyperbolic_distance(Model::HalfPlane, z1, z2).unwrap();
        let dl =
            hyperbolic_distance(Model::HalfPlane, l.apply(z1).unwrap(), l.apply(z2).unwrap())
                .unwrap();
        assert!((d - dl).abs() < 1e-10);
    }
}

#[test]
fn disk_square_contracts_via_cayley() {
    // w ↦ w² on the disk, conjugated to a half-plane self-map
    let f = |z: Complex64| {
        let w = cayley(z, CayleyDirection::HalfPlaneToDisk).unwrap();
        cayley(w * w, CayleyDirection::DiskToHalfPlane).unwrap()
    };
    let pairs: Vec<(Complex64, Complex64)> = (0..30)
        .map(|j| {
            let t = j as f64;
            (
                c(0.5 * (1.1 * t).sin(), 0.8 + 0.4 * (0.6 * t).cos()),
                c(0.5 * (0.3 * t).cos(), 1.5 + 0.6 * (0.9 * t).sin()),
            )
        })
        .collect();
    let margin = schwarz_pick_margin(&f, Model::HalfPlane, &pairs).unwrap();
    assert!(margin > 0.0, "margin {margin}");
}

#[test]
fn classification_is_stable_under_input_rotation() {
    let cfg = ClassifyConfig::default();
    let pert = [c(1.0, 0.0), c(0.15, -0.05)];
    let (f, _) = synth::conical_input(0.7, &pert, cfg.order).unwrap();
    let base = classify_singularity(&f, &cfg).unwrap();
    for phi in [0.4, 1.7] {
        let r = classify_singularity(&f.rotated_input(phi), &cfg).unwrap();
        assert_eq!(r.kind, SingularityKind::Conical);
        assert!((r.theta.unwrap() - base.theta.unwrap()).abs() < 1e-9);
        // ξ transforms by ξ_φ(w) = λ ξ(e^{iφ} w); compare after unwinding
        let unwound = TruncatedSeries::new(
            0.0,
            r.xi_series
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, cc)| cc * Complex64::from_polar(1.0, -(n as f64) * phi))
                .collect(),
        );
        let lead = base
            .xi_series
            .first_significant(1e-10)
            .expect("nonzero xi");
        let lambda = unwound.coeffs[lead] / base.xi_series.coeffs[lead];
        assert!((lambda.norm() - 1.0).abs() < 1e-8, "lambda {lambda}");
        let rescaled = unwound.scale(lambda.inv());
        assert!(rescaled.max_coeff_distance(&base.xi_series) < 1e-8);
    }
}

#[test]
fn non_projective_continuation_is_rejected() {
    // −i·log w + w^{1/2}: one loop adds 2π and negates the root term, which
    // is not a Möbius function of the original values
    let f = DevelopingMapSpec::log_perturbed(TruncatedSeries::new(0.5, vec![c(0.4, 0.0)]));
    let bps: Vec<Complex64> =
        (0..6).map(|j| Complex64::from_polar(0.25, TAU * j as f64 / 7.0)).collect();
    let err = f.extract_monodromy(&bps).unwrap_err();
    assert!(matches!(err, hypsing::devmap::DevMapError::NotProjective(_)), "{err}");
}
