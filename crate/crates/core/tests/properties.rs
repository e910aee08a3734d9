//! Property tests for the algebraic invariants that should hold on any
//! input, not just the handpicked unit-test instances.

use proptest::prelude::*;

use jlsketch::bounds::{hw_tail_bound, required_dim, sparse_jl_params, DimTarget, HWInput};
use jlsketch::formats;
use jlsketch::linalg::{Matrix, Vector};
use jlsketch::seed::Seed;
use jlsketch::sketch::{build_sketch, SketchKind, SketchSpec};
use jlsketch::verify::{binomial_ci, ExperimentReport, ReportMeta, TailPoint};

fn finite_entries(len: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-100.0f64..100.0, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frobenius_squared_is_gram_trace(
        rows in 1usize..6,
        cols in 1usize..6,
        seed in any::<u64>(),
    ) {
        let mut stream = jlsketch::seed::SplitMix64::new(Seed(seed));
        let data: Vec<f64> = (0..rows * cols).map(|_| 4.0 * stream.next_f64() - 2.0).collect();
        let a = Matrix::new(rows, cols, data);
        let lhs = a.frobenius_norm().powi(2);
        let rhs = a.transpose().matmul(&a).trace();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn spectral_norm_never_exceeds_frobenius(n in 1usize..6, seed in any::<u64>()) {
        let mut stream = jlsketch::seed::SplitMix64::new(Seed(seed));
        let mut a = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = 4.0 * stream.next_f64() - 2.0;
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        let spec = a.spectral_norm_symmetric(1e-10).unwrap();
        prop_assert!(spec <= a.frobenius_norm() + 1e-9);
    }

    #[test]
    fn cholesky_factor_roundtrip(n in 1usize..6, seed in any::<u64>()) {
        let mut stream = jlsketch::seed::SplitMix64::new(Seed(seed));
        let mut l = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                l[(i, j)] = if i == j {
                    0.5 + stream.next_f64()
                } else {
                    2.0 * stream.next_f64() - 1.0
                };
            }
        }
        let p = l.matmul(&l.transpose());
        let back = p.cholesky().unwrap();
        let rel = back.lower().sub(&l).frobenius_norm() / l.frobenius_norm();
        prop_assert!(rel < 1e-8);
    }

    #[test]
    fn apply_is_linear_for_every_construction(
        seed in any::<u64>(),
        xs in finite_entries(7),
        ys in finite_entries(7),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        for kind in [
            SketchKind::Gaussian,
            SketchKind::BinaryCoin,
            SketchKind::Spherical,
            SketchKind::SparseJl { s: 2 },
        ] {
            let sk = build_sketch(&SketchSpec { kind, m: 9, n: 7, seed: Seed(seed) }).unwrap();
            let x = Vector::new(xs.clone());
            let y = Vector::new(ys.clone());
            let mixed = Vector::new(
                xs.iter().zip(&ys).map(|(xi, yi)| a * xi + b * yi).collect(),
            );
            let lhs = sk.apply(&mixed).unwrap();
            let rx = sk.apply(&x).unwrap();
            let ry = sk.apply(&y).unwrap();
            let scale = lhs.norm().max(rx.norm()).max(ry.norm()).max(1.0);
            for i in 0..lhs.dim() {
                prop_assert!((lhs[i] - (a * rx[i] + b * ry[i])).abs() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn distortion_is_scale_invariant(seed in any::<u64>(), xs in finite_entries(5), c in 1e-3f64..1e3) {
        prop_assume!(xs.iter().any(|&v| v.abs() > 1e-6));
        let sk = build_sketch(&SketchSpec {
            kind: SketchKind::BinaryCoin,
            m: 8,
            n: 5,
            seed: Seed(seed),
        })
        .unwrap();
        let x = Vector::new(xs);
        let d1 = sk.distortion(&x).unwrap();
        let d2 = sk.distortion(&x.scaled(c)).unwrap();
        prop_assert!((d1 - d2).abs() <= 1e-9 * d1.max(1.0));
    }

    #[test]
    fn hw_bound_is_probability_and_monotone(
        k in 0.05f64..4.0,
        m in 1usize..64,
        frob_extra in 0.0f64..10.0,
        spec in 0.01f64..10.0,
        t_step in 0.01f64..2.0,
    ) {
        let frob = spec + frob_extra;
        let mut prev = f64::INFINITY;
        for i in 0..30 {
            let t = i as f64 * t_step;
            let p = hw_tail_bound(&HWInput { t, k, m, frob, spec }).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
            prop_assert!(p <= prev + 1e-12);
            prev = p;
        }
    }

    #[test]
    fn required_dim_is_monotone(
        eps1 in 0.05f64..0.9,
        shrink in 0.1f64..1.0,
        delta in 0.001f64..0.49,
    ) {
        let eps2 = eps1 * shrink;
        for target in [
            DimTarget::UnitNorm,
            DimTarget::Gaussian,
            DimTarget::FactorCompact { d: 3 },
            DimTarget::FactorFinite { card: 10 },
        ] {
            let loose = required_dim(target, eps1, delta).unwrap();
            let tight = required_dim(target, eps2, delta).unwrap();
            prop_assert!(tight >= loose);
        }
        let (m, s) = sparse_jl_params(eps1, delta, 1.0, 1.0).unwrap();
        prop_assert!(s <= m && s >= 1);
    }

    #[test]
    fn clopper_pearson_brackets_and_orders(failures_frac in 0.0f64..=1.0, trials in 1u64..3000) {
        let failures = (failures_frac * trials as f64).round() as u64;
        let failures = failures.min(trials);
        let (low, high) = binomial_ci(failures, trials, 0.99).unwrap();
        let rate = failures as f64 / trials as f64;
        prop_assert!((0.0..=1.0).contains(&low));
        prop_assert!((0.0..=1.0).contains(&high));
        prop_assert!(low <= rate && rate <= high);
    }

    #[test]
    fn report_csv_roundtrip(
        seed in any::<u64>(),
        trials in 100u64..10_000,
        failures_frac in 0.0f64..=1.0,
        curve_len in 0usize..6,
        eps_present in any::<bool>(),
    ) {
        let failures = ((failures_frac * trials as f64) as u64).min(trials);
        let (ci_low, ci_high) = binomial_ci(failures, trials, 0.99).unwrap();
        let curve: Vec<TailPoint> = (0..curve_len)
            .map(|i| TailPoint {
                t: 0.17 * (i + 1) as f64,
                failures: failures.saturating_sub(i as u64),
                tail: failures.saturating_sub(i as u64) as f64 / trials as f64,
                ci_low: ci_low * 0.9,
                ci_high,
                bound: 1.0 / (i + 2) as f64,
            })
            .collect();
        let report = ExperimentReport {
            meta: ReportMeta {
                run_id: format!("prop-{seed:016x}"),
                subcommand: "jl-verify".into(),
                construction: "spherical".into(),
                m: Some(seed % 1000 + 1),
                n: Some(64),
                s: None,
                m_width: None,
                d: None,
                t_count: None,
                eps: eps_present.then_some(0.5),
                delta: None,
                trials,
                seed,
            },
            failures: curve.first().map(|p| p.failures).unwrap_or(failures),
            rate: curve
                .first()
                .map(|p| p.tail)
                .unwrap_or(failures as f64 / trials as f64),
            ci_low: curve.first().map(|p| p.ci_low).unwrap_or(ci_low),
            ci_high: curve.first().map(|p| p.ci_high).unwrap_or(ci_high),
            bound: curve.first().map(|p| p.bound),
            curve,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.csv");
        formats::write_report_csv(&path, &report).unwrap();
        let rows = formats::read_report_csv(&path).unwrap();
        let back = formats::report_from_rows(&rows).unwrap();
        prop_assert_eq!(back, report);
    }

    #[test]
    fn matrix_payload_roundtrip(rows in 1usize..8, cols in 1usize..8, seed in any::<u64>()) {
        let mut stream = jlsketch::seed::SplitMix64::new(Seed(seed));
        let dense = Matrix::new(
            rows,
            cols,
            (0..rows * cols).map(|_| 1e3 * (stream.next_f64() - 0.5)).collect(),
        );
        let mut buf = Vec::new();
        formats::write_matrix_payload(&mut buf, &formats::MatrixPayload::Dense(dense.clone()))
            .unwrap();
        let back = formats::read_matrix_payload(&mut buf.as_slice()).unwrap();
        prop_assert_eq!(back, formats::MatrixPayload::Dense(dense));
    }
}
