use proptest::prelude::*;

use heatstein::haar::{normalize_a, sample_haar, trace_powers};
use heatstein::heatkernel::{heat_walk, sample_algebra, matrix_exp, HeatStepConfig};
use heatstein::partitions::{gen_partitions, Partition};
use heatstein::symchars::character;
use heatstein::symfun::{power_sum_eval, schur_expansion, zonal_ratio};
use heatstein::{Criterion, EstimateReport, NormalizedA, SeedStream, SquareMatrix};

fn partition_strategy(max_weight: usize) -> impl Strategy<Value = Partition> {
    prop::collection::vec(1usize..=max_weight, 0..=max_weight)
        .prop_filter("hook products must fit in u64", |v| v.iter().sum::<usize>() <= 20)
        .prop_map(|v| Partition::from_unsorted(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugation_is_an_involution(p in partition_strategy(7)) {
        prop_assert_eq!(p.conjugate().conjugate(), p.clone());
        prop_assert_eq!(p.conjugate().weight(), p.weight());
        prop_assert_eq!(p.conjugate().hook_product(), p.hook_product());
    }

    #[test]
    fn trivial_and_sign_characters(k in 1usize..=8, idx in 0usize..22) {
        let parts = gen_partitions(k);
        let rho = &parts[idx % parts.len()];
        prop_assert_eq!(character(&Partition::row(k), rho).unwrap(), 1);
        prop_assert_eq!(character(&Partition::column(k), rho).unwrap(), rho.sign());
    }

    #[test]
    fn haar_draws_are_orthogonal(seed in any::<u64>(), n in 1usize..=12) {
        let mut rng = SeedStream::new(seed).rng(0);
        let o = sample_haar(n, &mut rng).unwrap();
        prop_assert!(o.orthogonality_defect() <= 1e-12);
    }

    #[test]
    fn exponential_of_algebra_is_orthogonal(seed in any::<u64>(), n in 2usize..=10, s in 0.0f64..30.0) {
        let mut rng = SeedStream::new(seed).rng(1);
        let x = sample_algebra(n, &mut rng).unwrap().scaled(s);
        let e = matrix_exp(&x).unwrap();
        prop_assert!(e.orthogonality_defect() <= 1e-11);
        prop_assert!((e.determinant() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn heat_walk_stays_on_group(seed in any::<u64>(), n in 2usize..=8, steps in 1usize..40) {
        let mut rng = SeedStream::new(seed).rng(2);
        let o = sample_haar(n, &mut rng).unwrap();
        let cfg = HeatStepConfig::new(0.05, 2).unwrap();
        let (end, _) = heat_walk(&o, &cfg, steps, &mut rng).unwrap();
        prop_assert!(end.orthogonality_defect() <= 1e-11);
        prop_assert!((end.determinant() - o.determinant()).abs() <= 1e-9);
    }

    #[test]
    fn degree_two_zonal_ratios(values in prop::collection::vec(0.01f64..3.0, 2..=10)) {
        let n = values.len() as f64;
        let total: f64 = values.iter().sum();
        let a2: Vec<f64> = values.iter().map(|v| v * n / total).collect();
        let s4: f64 = a2.iter().map(|v| v * v).sum();
        let z2 = zonal_ratio(&Partition::row(2), &a2).unwrap();
        let z11 = zonal_ratio(&Partition::column(2), &a2).unwrap();
        let t2 = (n * n + 2.0 * s4) / (n * n + 2.0 * n);
        let t11 = (n * n - s4) / (n * n - n);
        prop_assert!((z2 - t2).abs() <= 1e-12 * t2.abs().max(1.0));
        prop_assert!((z11 - t11).abs() <= 1e-12 * t11.abs().max(1.0));
    }

    #[test]
    fn p2_two_ways(seed in any::<u64>(), n in 2usize..=8) {
        let a = NormalizedA::random(n, seed);
        let mut rng = SeedStream::new(seed).rng(3);
        let o = sample_haar(n, &mut rng).unwrap();
        let ao = a.times(&o);
        let traces = trace_powers(&ao, 2);
        let s2 = schur_expansion(&Partition::row(2)).unwrap().to_float().eval(&traces);
        let s11 = schur_expansion(&Partition::column(2)).unwrap().to_float().eval(&traces);
        prop_assert!((a.p2(&o) - (s2 - s11)).abs() <= 1e-10);
        prop_assert!((power_sum_eval(&Partition::row(2), &ao) - a.p2(&o)).abs() <= 1e-10);
    }

    #[test]
    fn normalization_fixes_frobenius_norm(entries in prop::collection::vec(-5.0f64..5.0, 9)) {
        prop_assume!(entries.iter().any(|x| x.abs() > 1e-3));
        let raw = SquareMatrix::from_row_major(3, entries).unwrap();
        let a = normalize_a(&raw).unwrap();
        let s: f64 = a.squared_singular_values().iter().sum();
        prop_assert!((s - 3.0).abs() <= 1e-10);
    }

    #[test]
    fn pass_flag_is_recomputable(est in -10.0f64..10.0, se in 0.0f64..2.0, target in -10.0f64..10.0) {
        let r = EstimateReport::new("x", est, se, 100, Criterion::WithinSe { target }, Some(1));
        prop_assert_eq!(r.pass, r.recompute_pass());
        prop_assert_eq!(r.pass, (est - target).abs() <= 4.0 * se);
        let back: EstimateReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        prop_assert_eq!(back, r);
    }
}
