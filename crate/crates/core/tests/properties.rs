use finipost::bounds::{finite_bound, median_cdf, MedianLawInputs};
use finipost::estimators::{
    cdf_estimators, cdf_functional, gini_estimators, gini_functional, mean_estimators, mean_functional,
    variance_estimators, variance_functional, EstimatorInputs,
};
use finipost::measure::{cdf_of, empirical, mixture, SpaceTag};
use finipost::priors::{DirichletProcessModel, FiniteDirichletModel};
use finipost::transport::{bounded_lipschitz, tv_finite, w1_real, w1_scalar_samples};
use finipost::{mix_seed, AnalyticFamily, AtomicMeasure, ExchangeableModel, Ground, MetaW1, Point, RngState, Sample};
use proptest::prelude::*;

fn scalar_measure() -> impl Strategy<Value = AtomicMeasure<f64>> {
    prop::collection::vec((-5.0f64..5.0, 0.01f64..1.0), 1..7).prop_map(|atoms| {
        let pts = atoms.into_iter().map(|(x, w)| (Point::Scalar(x), w)).collect();
        AtomicMeasure::normalized(SpaceTag::RealLine, pts).unwrap()
    })
}

fn finite_measure(k: usize) -> impl Strategy<Value = AtomicMeasure<f64>> {
    prop::collection::vec(0.0f64..1.0, k).prop_filter_map("zero mass", |w| {
        let total: f64 = w.iter().sum();
        (total > 1e-3).then(|| AtomicMeasure::finite(&w.iter().map(|x| x / total).collect::<Vec<_>>()).unwrap())
    })
}

fn urn() -> ExchangeableModel {
    ExchangeableModel::FiniteDirichlet(
        FiniteDirichletModel::on_points(vec![0.7, 1.3, 2.0, 0.4], vec![-2.0, 0.0, 1.5, 4.0]).unwrap(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn w1_is_a_metric(p in scalar_measure(), q in scalar_measure(), r in scalar_measure()) {
        let pq = w1_real(&p, &q).unwrap();
        prop_assert!(w1_real(&p, &p).unwrap().abs() <= 1e-15);
        prop_assert!(pq >= 0.0);
        prop_assert!((pq - w1_real(&q, &p).unwrap()).abs() <= 1e-12);
        prop_assert!(pq <= w1_real(&p, &r).unwrap() + w1_real(&r, &q).unwrap() + 1e-12);
    }

    #[test]
    fn tv_is_a_metric(p in finite_measure(4), q in finite_measure(4), r in finite_measure(4)) {
        let pq = tv_finite(&p, &q).unwrap();
        prop_assert!(tv_finite(&p, &p).unwrap() == 0.0);
        prop_assert!((0.0..=1.0 + 1e-15).contains(&pq));
        prop_assert!((pq - tv_finite(&q, &p).unwrap()).abs() <= 1e-15);
        prop_assert!(pq <= tv_finite(&p, &r).unwrap() + tv_finite(&r, &q).unwrap() + 1e-12);
    }

    #[test]
    fn bounded_lipschitz_is_a_metric_below_w1(p in scalar_measure(), q in scalar_measure(), r in scalar_measure()) {
        let b = |a: &AtomicMeasure<f64>, c: &AtomicMeasure<f64>| bounded_lipschitz(a, c).unwrap().0;
        let pq = b(&p, &q);
        prop_assert!(b(&p, &p).abs() <= 1e-12);
        prop_assert!((0.0..=2.0).contains(&pq));
        prop_assert!((pq - b(&q, &p)).abs() <= 1e-12);
        prop_assert!(pq <= b(&p, &r) + b(&r, &q) + 1e-12);
        prop_assert!(pq <= w1_real(&p, &q).unwrap() + 1e-12);
    }

    #[test]
    fn bounded_lipschitz_is_convex(p in scalar_measure(), p1 in scalar_measure(), p2 in scalar_measure(), eps in 0.0f64..=1.0) {
        let b = |c: &AtomicMeasure<f64>| bounded_lipschitz(&p, c).unwrap().0;
        let mix = mixture(&p1, &p2, eps).unwrap();
        prop_assert!(b(&mix) <= eps * b(&p1) + (1.0 - eps) * b(&p2) + 1e-12);
    }

    #[test]
    fn sample_w1_matches_measure_w1(pairs in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..40)) {
        let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let direct = w1_scalar_samples(&xs, &ys).unwrap();
        let via = w1_real(
            &empirical(&Sample::from_scalars(&xs)).unwrap(),
            &empirical(&Sample::from_scalars(&ys)).unwrap(),
        ).unwrap();
        prop_assert!((direct - via).abs() <= 1e-12);
    }

    #[test]
    fn cdf_is_monotone_in_unit_interval(p in scalar_measure(), mut xs in prop::collection::vec(-6.0f64..6.0, 2..20)) {
        let cdf = cdf_of(&p).unwrap();
        xs.sort_by(f64::total_cmp);
        let vals: Vec<f64> = xs.iter().map(|&x| cdf.eval(x)).collect();
        prop_assert!(vals.iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(cdf.eval(5.0), 1.0);
        prop_assert_eq!(cdf.eval(-5.0 - 1e-9), 0.0);
    }

    #[test]
    fn median_law_is_a_cdf_in_f(big_n in 1usize..60, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let at = |f| median_cdf(MedianLawInputs { big_n, f_at_x: f }).unwrap();
        prop_assert!((0.0..=1.0).contains(&at(lo)));
        prop_assert!(at(lo) <= at(hi) + 1e-15);
        prop_assert!((at(lo) + at(1.0 - lo) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn draws_are_normalized(seed in any::<u64>(), n in 0usize..8) {
        let mut rng = RngState::from_seed_u64(seed);
        let dp = ExchangeableModel::DirichletProcess(
            DirichletProcessModel::new(1.5, AnalyticFamily::standard_normal()).unwrap(),
        );
        for model in [urn(), dp] {
            let h = model.sample_sequence(n, &mut rng).unwrap();
            prop_assert_eq!(h.len(), n);
            let p = model.posterior_draw(&h, &mut rng).unwrap();
            prop_assert!((p.weight_sum() - 1.0).abs() <= 1e-12);
            prop_assert!(p.weights().iter().all(|w| *w >= 0.0));
            let cont = model.continue_sequence(&h, n + 5, &mut rng).unwrap();
            prop_assert_eq!(&cont.values()[..n], h.values());
        }
    }

    /// With the whole sequence observed, every finitary estimator is the
    /// plug-in statistic.
    #[test]
    fn boundary_identity(seed in any::<u64>(), n in 2usize..30, y in -3.0f64..5.0) {
        let model = urn();
        let h = model.sample_sequence(n, &mut RngState::from_seed_u64(seed)).unwrap();
        let e = empirical(&h).unwrap();
        let inp = EstimatorInputs::new(model, h, n).unwrap();
        prop_assert!((mean_estimators(&inp).unwrap().finitary - mean_functional(&e).unwrap()).abs() <= 1e-12);
        prop_assert!((variance_estimators(&inp).unwrap().finitary - variance_functional(&e).unwrap()).abs() <= 1e-12);
        prop_assert!((cdf_estimators(&inp, y).unwrap().finitary - cdf_functional(&e, y).unwrap()).abs() <= 1e-12);
        prop_assert!((gini_estimators(&inp).unwrap().finitary - gini_functional(&e).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn finite_bound_shrinks_with_horizon(k in 2usize..10, n in 0usize..50, extra in 1usize..500) {
        let near: f64 = finite_bound(k, n, n + extra).unwrap();
        let far: f64 = finite_bound(k, n, n + 2 * extra).unwrap();
        prop_assert!(far <= near);
        prop_assert!(near >= 0.0);
    }

    #[test]
    fn seed_mixing_is_a_function(master in any::<u64>(), r in any::<u32>(), s in any::<u32>()) {
        prop_assert_eq!(mix_seed(master, r, s), mix_seed(master, r, s));
        prop_assert_ne!(mix_seed(master, r, s), mix_seed(master, r, s.wrapping_add(1)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn meta_w1_is_symmetric(seed in any::<u64>(), m in 2usize..40) {
        let mut rng = RngState::from_seed_u64(seed);
        let model = ExchangeableModel::FiniteDirichlet(FiniteDirichletModel::new(vec![1.0, 2.0, 1.0]).unwrap());
        let ps: Vec<_> = (0..m).map(|_| model.posterior_draw(&Sample::empty(), &mut rng).unwrap()).collect();
        let qs: Vec<_> = (0..m)
            .map(|_| finipost::measure::empirical_in(&model.sample_sequence(5, &mut rng).unwrap(), model.space()).unwrap())
            .collect();
        let a = MetaW1::solve(&ps, &qs, Ground::Tv).unwrap().value;
        let b = MetaW1::solve(&qs, &ps, Ground::Tv).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-12);
        prop_assert!(MetaW1::solve(&ps, &ps, Ground::Tv).unwrap().value.abs() <= 1e-15);
    }
}
