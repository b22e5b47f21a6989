mod common;

use eigencontours::prelude::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn matrix(columns: &[Vec<f64>]) -> ContourMatrix {
    ContourMatrix::from_columns(columns).unwrap()
}

#[test]
fn singular_values_match_jacobi_on_gram_matrix() {
    let mut rng = common::rng(10);
    // 6×4: AᵀA is 4×4 with eigenvalues σ_k².
    let cols = common::random_columns(&mut rng, 6, 4);
    let a = matrix(&cols);
    let gram: Vec<Vec<f64>> = (0..4)
        .map(|i| {
            (0..4)
                .map(|j| cols[i].iter().zip(&cols[j]).map(|(x, y)| x * y).sum())
                .collect()
        })
        .collect();
    let (eig, _) = common::jacobi_eigen(gram);
    let spectrum = Spectrum::of(&a);
    for (s, e) in spectrum.singular_values().iter().zip(&eig) {
        assert!((s * s - e).abs() <= 1e-9 * eig[0], "{s}² vs {e}");
    }

    let basis = spectrum.basis(2).unwrap();
    let err = (a.data() - basis.reconstruct_unclamped(&a).unwrap()).norm_squared();
    assert!((err - (eig[2] + eig[3])).abs() <= 1e-8 * eig[0]);
}

#[test]
fn left_vectors_match_jacobi_up_to_declared_sign() {
    let mut rng = common::rng(11);
    let cols = common::random_columns(&mut rng, 7, 12);
    let (_, vectors) = common::jacobi_eigen(common::gram_rows(&cols));
    let basis = fit_eigenbasis(&matrix(&cols), 5).unwrap();
    for (k, v) in vectors.iter().take(5).enumerate() {
        let pivot = (0..v.len())
            .max_by(|&i, &j| v[i].abs().total_cmp(&v[j].abs()))
            .unwrap();
        let sign = v[pivot].signum();
        let u = basis.eigencontour(k);
        for (a, b) in u.iter().zip(v) {
            assert!((a - sign * b).abs() < 1e-8, "vector {k}");
        }
        assert!(u[pivot] > 0.0);
    }
}

#[test]
fn rank_three_error_on_eight_by_five() {
    let mut rng = common::rng(12);
    let cols = common::random_columns(&mut rng, 8, 5);
    let a = matrix(&cols);
    let gram: Vec<Vec<f64>> = (0..5)
        .map(|i| {
            (0..5)
                .map(|j| cols[i].iter().zip(&cols[j]).map(|(x, y)| x * y).sum())
                .collect()
        })
        .collect();
    let (eig, _) = common::jacobi_eigen(gram);
    let basis = fit_eigenbasis(&a, 3).unwrap();
    let err = (a.data() - basis.reconstruct_unclamped(&a).unwrap()).norm();
    assert!((err - (eig[3] + eig[4]).sqrt()).abs() < 1e-8);
}

#[test]
fn encode_matches_gaussian_least_squares() {
    let mut rng = common::rng(13);
    let cols = common::random_columns(&mut rng, 40, 30);
    let basis = fit_eigenbasis(&matrix(&cols), 9).unwrap();
    let design: Vec<Vec<f64>> = (0..40)
        .map(|i| basis.u().row(i).iter().copied().collect())
        .collect();
    for r in common::random_columns(&mut rng, 40, 5) {
        let expected = common::normal_equations(&design, &r);
        let got = basis.encode(&r).unwrap();
        for (a, b) in got.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn decode_clamps_exactly_the_negative_entries() {
    let mut rng = common::rng(14);
    let cols = common::random_columns(&mut rng, 20, 10);
    let basis = fit_eigenbasis(&matrix(&cols), 4).unwrap();
    // Large weight on a sign-alternating vector forces negative entries.
    let c = [1.0, -30.0, 25.0, 12.0];
    let raw: Vec<f64> = (0..20)
        .map(|i| (0..4).map(|k| basis.u()[(i, k)] * c[k]).sum())
        .collect();
    assert!(raw.iter().any(|&v| v < 0.0));
    let decoded = basis.decode(&c).unwrap();
    for (d, r) in decoded.iter().zip(&raw) {
        if *r < 0.0 {
            assert_eq!(*d, 0.0);
        } else {
            assert!((d - r).abs() < 1e-12);
        }
    }
}

#[test]
fn synthetic_energy_concentrates_in_thirteen_values() {
    let shapes = generate_synthetic(&SynthParams::default()).unwrap();
    let opts = ExtractOptions::default();
    let cols: Vec<Vec<f64>> = shapes
        .iter()
        .map(|s| {
            extract_star_contour(&s.record.shape, &opts)
                .unwrap()
                .into_radii()
        })
        .collect();
    let spectrum = Spectrum::of(&matrix(&cols));
    let energy: Vec<f64> = spectrum.singular_values().iter().map(|s| s * s).collect();
    let total: f64 = energy.iter().sum();
    let head: f64 = energy[..13].iter().sum();
    assert!(head / total > 0.99, "{}", head / total);
    // Uniform phases give the same band limit.
    let shapes = generate_synthetic(&SynthParams {
        phase_jitter: std::f64::consts::PI,
        ..Default::default()
    })
    .unwrap();
    let cols: Vec<Vec<f64>> = shapes.iter().map(|s| s.radii.clone()).collect();
    let spectrum = Spectrum::of(&matrix(&cols));
    let sv = spectrum.singular_values();
    assert!(sv[12] > 1e-6 * sv[0]);
    assert!(sv[13] < 1e-9 * sv[0], "{}", sv[13] / sv[0]);
}

#[test]
fn refit_is_bitwise_identical() {
    let mut rng = common::rng(15);
    let cols = common::random_columns(&mut rng, 30, 25);
    let a = fit_eigenbasis(&matrix(&cols), 10).unwrap();
    let b = fit_eigenbasis(&matrix(&cols), 10).unwrap();
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    let back = EigenBasis::from_json(&a.to_json().unwrap()).unwrap();
    assert_eq!(back.u(), a.u());
    assert_eq!(back.singular_values(), a.singular_values());
}

fn corpus() -> impl Strategy<Value = (Vec<Vec<f64>>, usize)> {
    (3usize..24, 3usize..24).prop_flat_map(|(n, l)| {
        (
            prop::collection::vec(prop::collection::vec(0.0f64..50.0, n), l),
            1..=n.min(l),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_is_optimal((cols, m) in corpus(), seed in any::<u64>()) {
        let basis = fit_eigenbasis(&matrix(&cols), m).unwrap();
        let r = &cols[0];
        let c = basis.encode(r).unwrap();
        let u = basis.u();
        let err = |c: &[f64]| (u * DVector::from_column_slice(c) - DVector::from_column_slice(r)).norm();
        let best = err(&c);
        let mut rng = common::rng(seed);
        for _ in 0..8 {
            let shifted: Vec<f64> = c.iter().map(|v| v + rand::Rng::random_range(&mut rng, -1.0..1.0)).collect();
            prop_assert!(best <= err(&shifted) + 1e-9);
        }
    }

    #[test]
    fn error_is_nonincreasing_in_m((cols, _) in corpus()) {
        let a = matrix(&cols);
        let spectrum = Spectrum::of(&a);
        let mut last = f64::INFINITY;
        let scale = a.data().norm_squared();
        for m in 1..=spectrum.max_rank() {
            let b = spectrum.basis(m).unwrap();
            let err = (a.data() - b.reconstruct_unclamped(&a).unwrap()).norm_squared();
            prop_assert!(err <= last + 1e-10 * scale);
            last = err;
        }
    }

    #[test]
    fn basis_is_orthonormal((cols, m) in corpus()) {
        let basis = fit_eigenbasis(&matrix(&cols), m).unwrap();
        let gram: DMatrix<f64> = basis.u().tr_mul(basis.u());
        prop_assert!((gram - DMatrix::identity(m, m)).amax() < 1e-9);
    }

    #[test]
    fn decode_is_nonnegative((cols, m) in corpus(), scale in -5.0f64..5.0) {
        let basis = fit_eigenbasis(&matrix(&cols), m).unwrap();
        let c: Vec<f64> = (0..m).map(|k| scale * (k as f64 + 1.0) * if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
        prop_assert!(basis.decode(&c).unwrap().iter().all(|&v| v >= 0.0));
    }
}
