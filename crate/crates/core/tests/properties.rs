use approx::assert_relative_eq;
use gradest::bound::{make_family, EstimateContext, Family};
use gradest::manifolds::LogHeatData;
use gradest::verify::compare_bounds;
use proptest::prelude::*;

fn family_with_params() -> impl Strategy<Value = (Family, Vec<f64>)> {
    prop_oneof![
        (0.05f64..1.0).prop_map(|b| (Family::Lyd, vec![b])),
        Just((Family::Hamilton, vec![])),
        Just((Family::LixuHyperbolic, vec![])),
        Just((Family::LixuLinear, vec![])),
        (0.05f64..0.95).prop_map(|th| (Family::QianTheta, vec![th])),
        (0.05f64..0.95).prop_map(|b| (Family::ImprovedLyd, vec![b])),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn alpha_form_is_the_reciprocal_scaling(
        (family, params) in family_with_params(),
        n in 2u32..8,
        k in 0.1f64..3.0,
        u in 0.0f64..1.0,
    ) {
        let ctx = EstimateContext::new(n, k, 5.0).unwrap();
        // improved-lyd may start beyond the horizon
        let bound = make_family(ctx, family, &params);
        prop_assume!(bound.is_ok());
        let bound = bound.unwrap();
        let lo = bound.t_min().max(1e-3) * 1.001;
        prop_assume!(lo < 5.0);
        let t = lo + u * (5.0 - lo);
        let s = bound.evaluate(t).unwrap();
        prop_assert!(s.beta > 0.0 && s.beta <= 1.0 + 1e-12);
        prop_assert!(s.psi.is_finite() && s.psi > 0.0);
        assert_relative_eq!(s.alpha * s.beta, 1.0, max_relative = 1e-14);
        assert_relative_eq!(s.phi, s.psi * s.alpha, max_relative = 1e-14);
    }

    #[test]
    fn comparison_does_not_depend_on_column_order(
        beta in 0.1f64..0.95,
        theta in 0.1f64..0.9,
        rot in 0usize..4,
    ) {
        let ctx = EstimateContext::new(3, 1.0, 4.0).unwrap();
        let bounds = vec![
            make_family(ctx, Family::Lyd, &[beta]).unwrap(),
            make_family(ctx, Family::Hamilton, &[]).unwrap(),
            make_family(ctx, Family::LixuLinear, &[]).unwrap(),
            make_family(ctx, Family::QianTheta, &[theta]).unwrap(),
        ];
        let mut shuffled = bounds.clone();
        shuffled.rotate_left(rot);
        let ts: Vec<f64> = (1..=30).map(|i| 4.0 * i as f64 / 30.0).collect();
        let a = compare_bounds(&bounds, &ts).unwrap();
        let b = compare_bounds(&shuffled, &ts).unwrap();
        for row in 0..ts.len() {
            let mut psi: Vec<f64> = a.psi[row].iter().flatten().copied().collect();
            psi.sort_by(f64::total_cmp);
            // skip near-ties, where either choice is legitimate
            if psi.len() > 1 && psi[1] - psi[0] <= 1e-12 * psi[0] {
                continue;
            }
            let da = a.dominant[row].map(|i| a.ids[i].clone());
            let db = b.dominant[row].map(|i| b.ids[i].clone());
            prop_assert_eq!(da, db);
        }
    }

    #[test]
    fn gaussian_attains_equality_in_the_euclidean_estimate(
        n in 1u32..6,
        r in 0.0f64..8.0,
        t in 0.05f64..5.0,
    ) {
        let data = LogHeatData::euclidean_gaussian(n).unwrap();
        let s = data.sample(r, t).unwrap();
        prop_assert!(s.grad_sq >= 0.0);
        // |grad f|^2 - f_t = n/(2t) exactly
        let scale = s.grad_sq + s.f_t.abs() + n as f64 / t;
        prop_assert!((s.grad_sq - s.f_t - n as f64 / (2.0 * t)).abs() <= 1e-12 * scale);
        prop_assert!(s.heat_residual().abs() <= 1e-12 * scale);
    }

    #[test]
    fn hyperbolic_kernel_solves_the_log_heat_equation(r in 0.0f64..12.0, t in 0.05f64..5.0) {
        let data = LogHeatData::hyperbolic3_kernel();
        let s = data.sample(r, t).unwrap();
        let scale = s.grad_sq + s.f_t.abs() + s.laplacian.abs() + 1.0;
        prop_assert!(s.grad_sq >= 0.0);
        prop_assert!(s.heat_residual().abs() <= 1e-11 * scale, "residual {}", s.heat_residual());
    }

    #[test]
    fn li_xu_hyperbolic_holds_pointwise_on_h3(r in 0.0f64..12.0, t in 0.05f64..5.0) {
        let ctx = EstimateContext::new(3, 2.0, 5.0).unwrap();
        let bound = make_family(ctx, Family::LixuHyperbolic, &[]).unwrap();
        let s = LogHeatData::hyperbolic3_kernel().sample(r, t).unwrap();
        let b = bound.evaluate(t).unwrap();
        let g = b.beta * s.grad_sq - s.f_t - b.psi;
        prop_assert!(g <= 1e-9 * (s.grad_sq + s.f_t.abs() + b.psi), "G = {g}");
    }
}
