use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wsms_core::dictionary::{build_angular_dictionary, make_angle_grid, make_distance_grid, DistanceSampling, Pad2dDictionary};
use wsms_core::estimators::{omp, pad2d_omp, somp_angle_stage, EstimatorConfig, Support};
use wsms_core::geometry::{exact_distance, fresnel_distance, steering, ArrayConfig, ChannelModel};
use wsms_core::measurement::{random_combiner, Observation};
use wsms_core::numkern::{devec, kron, orth_complement_projector, vec, CMatrix, CVector, C64};

fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CMatrix::from_fn(rows, cols, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn gaussian_vector(len: usize, seed: u64) -> CVector {
    gaussian_matrix(len, 1, seed).column(0)
}

fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.sub(b).unwrap().as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn non_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-14)
}

fn small_array() -> ArrayConfig {
    ArrayConfig::with_gap(4, 8, 100e9, 0.5, 8.0).unwrap()
}

fn small_pad() -> Pad2dDictionary {
    let cfg = small_array();
    let angles = make_angle_grid(16, None).unwrap();
    let dists = make_distance_grid(6, 3.0, 40.0, DistanceSampling::Reciprocal).unwrap();
    Pad2dDictionary::build(&cfg, &angles, &dists).unwrap()
}

fn observation(y_mat: CMatrix) -> Observation {
    Observation { y_stacked: vec(&y_mat), y_mat, sigma2: 0.0, seed: 0 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn steering_vectors_have_unit_norm(sin in -0.99f64..0.99, r in 2.0f64..400.0) {
        let cfg = ArrayConfig::reference();
        for model in [ChannelModel::Exact, ChannelModel::CrossField] {
            let a = steering(&cfg, model, sin.asin(), r).unwrap();
            prop_assert_eq!(a.len(), 192);
            prop_assert!((a.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kron_vec_devec_identities(rows in 1usize..7, cols in 1usize..6, seed in any::<u64>()) {
        let m = gaussian_matrix(rows, cols, seed);
        prop_assert_eq!(devec(&vec(&m), rows).unwrap(), m.clone());
        let a = gaussian_vector(rows, seed ^ 1);
        let b = gaussian_vector(cols, seed ^ 2);
        let k = kron(&b, &a);
        for j in 0..cols {
            for i in 0..rows {
                prop_assert_eq!(k.as_slice()[j * rows + i], b.as_slice()[j] * a.as_slice()[i]);
            }
        }
        // vec(a b^T) = b kron a
        let outer = CMatrix::from_fn(rows, cols, |i, j| a.as_slice()[i] * b.as_slice()[j]);
        prop_assert_eq!(vec(&outer), k);
    }

    #[test]
    fn projector_is_hermitian_idempotent_and_annihilating(rows in 3usize..10, seed in any::<u64>()) {
        let cols = 1 + (seed as usize) % (rows - 1);
        let phi = gaussian_matrix(rows, cols, seed);
        let p = orth_complement_projector(&phi).unwrap();
        prop_assert!(max_abs_diff(&p, &p.adjoint()) < 1e-12);
        prop_assert!(max_abs_diff(&p.matmul(&p).unwrap(), &p) < 1e-12);
        prop_assert!(p.matmul(&phi).unwrap().as_slice().iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn omp_residuals_never_grow(seed in any::<u64>(), k in 1usize..8) {
        let psi = gaussian_matrix(16, 40, seed);
        let y = gaussian_vector(16, seed.wrapping_add(1));
        let out = omp(&y, &psi, &EstimatorConfig::new(k)).unwrap();
        prop_assert_eq!(out.residual_norms.len(), out.support.len() + 1);
        prop_assert!(non_increasing(&out.residual_norms));
    }

    #[test]
    fn somp_residuals_never_grow(seed in any::<u64>(), k in 1usize..6) {
        let cfg = small_array();
        let dict = build_angular_dictionary(&cfg, &make_angle_grid(16, None).unwrap()).unwrap();
        let w = random_combiner(8, 6, seed).unwrap().w;
        let y = gaussian_matrix(6, 4, seed ^ 9);
        let out = somp_angle_stage(&y, &w, &dict, &EstimatorConfig::new(k)).unwrap();
        prop_assert!(non_increasing(&out.residual_norms));
    }

    #[test]
    fn pad2d_residuals_never_grow(seed in any::<u64>(), k in 1usize..6) {
        let pad = small_pad();
        let w = random_combiner(8, 6, seed).unwrap().w;
        let obs = observation(gaussian_matrix(6, 4, seed ^ 5));
        let res = pad2d_omp(&obs, &w, &pad, &EstimatorConfig::new(k)).unwrap();
        prop_assert!(non_increasing(&res.residual_norms));
    }

    #[test]
    fn supports_are_invariant_to_observation_scaling(seed in any::<u64>(), re in 0.1f64..50.0, im in -50.0f64..50.0) {
        let c = C64::new(re, im);
        let psi = gaussian_matrix(12, 30, seed);
        let y = gaussian_vector(12, seed ^ 3);
        let cfg = EstimatorConfig::new(4);
        prop_assert_eq!(omp(&y, &psi, &cfg).unwrap().support, omp(&y.scale(c), &psi, &cfg).unwrap().support);

        let pad = small_pad();
        let w = random_combiner(8, 6, seed).unwrap().w;
        let y_mat = gaussian_matrix(6, 4, seed ^ 4);
        let a = pad2d_omp(&observation(y_mat.clone()), &w, &pad, &cfg).unwrap();
        let b = pad2d_omp(&observation(y_mat.scale(c)), &w, &pad, &cfg).unwrap();
        prop_assert_eq!(a.support, b.support);

        let dict = pad.angular();
        let s1 = somp_angle_stage(&y_mat, &w, dict, &cfg).unwrap();
        let s2 = somp_angle_stage(&y_mat.scale(c), &w, dict, &cfg).unwrap();
        prop_assert_eq!(s1.lambda, s2.lambda);
    }

    #[test]
    fn fresnel_error_is_third_order(r in 5.0f64..300.0, frac in 0.001f64..0.1, sin in -0.95f64..0.95) {
        let p = frac * r;
        let theta = sin.asin();
        let err = (fresnel_distance(r, theta, p).unwrap() - exact_distance(r, theta, p).unwrap()).abs();
        // leading remainder is p^3 sin(1 - sin^2) / (2 r^2)
        prop_assert!(err <= p.powi(3) / r.powi(2), "err {err} for r {r} p {p}");
    }
}

#[test]
fn fresnel_matches_exact_at_the_reference_point() {
    let theta = 0.5f64.asin();
    let exact = exact_distance(10.0, theta, 0.48).unwrap();
    let approx = fresnel_distance(10.0, theta, 0.48).unwrap();
    assert!((approx - exact).abs() / exact < 1e-4);
    let halving: Vec<f64> = [10.0, 20.0, 40.0]
        .iter()
        .map(|&r| (fresnel_distance(r, theta, 0.48).unwrap() - exact_distance(r, theta, 0.48).unwrap()).abs())
        .collect();
    // doubling r cuts the error by about four at fixed p
    assert!(halving[1] / halving[0] < 0.3 && halving[2] / halving[1] < 0.3);
}

#[test]
fn pad2d_support_reports_pairs() {
    let pad = small_pad();
    let w = random_combiner(8, 6, 2).unwrap().w;
    let res = pad2d_omp(&observation(gaussian_matrix(6, 4, 8)), &w, &pad, &EstimatorConfig::new(3)).unwrap();
    assert!(matches!(res.support, Support::Pairs(ref p) if p.len() == 3));
}
