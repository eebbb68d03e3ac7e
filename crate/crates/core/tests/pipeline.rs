use pl_bai::best_item::run_best_item;
use pl_bai::experiments::{load_env, run_sweep, Algorithm, EnvSource, ExperimentSpec, SweepAxis};
use pl_bai::uniform::{min_feasible_budget, uniform_allocation};
use pl_bai::wrapper::pac_wrapper;
use pl_bai::{BestItemConfig, BudgetConfig, PlInstance, Trace, WrapperConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn wrapper_survival_sums_to_k_times_plays() {
    let model = load_env("g1").unwrap();
    let report = pac_wrapper(&model, &WrapperConfig::new(5, 2, 0.0, 0.1), ChaCha8Rng::seed_from_u64(3)).unwrap();
    assert_eq!(report.returned_item, Some(0));
    assert_eq!(report.per_item_plays.iter().sum::<u64>(), 5 * report.total_plays);
    assert!(matches!(report.trace, Trace::Wrapper(_)));
}

#[test]
fn best_item_on_arbitrary_instance() {
    let model = PlInstance::new(vec![0.3, 0.2, 1.0, 0.25, 0.1, 0.2, 0.3]).unwrap();
    let cfg = BestItemConfig::new(4, 1, 0.1, 0.1);
    let hits = (0..20)
        .filter(|&s| {
            let r = run_best_item(&model, &cfg, ChaCha8Rng::seed_from_u64(s), None).unwrap();
            r.returned_item == Some(2)
        })
        .count();
    assert!(hits >= 18, "{hits}/20");
}

#[test]
fn uniform_allocation_at_minimum_budget() {
    let model = load_env("g4b").unwrap();
    let q = min_feasible_budget(model.n(), 5).unwrap();
    let report = uniform_allocation(&model, &BudgetConfig::new(q, 5, 1), ChaCha8Rng::seed_from_u64(0)).unwrap();
    assert!(report.total_plays <= q);
    assert!(report.returned_item.is_some());
}

#[test]
fn sweep_rows_follow_grid_order() {
    let mut spec = ExperimentSpec::new(EnvSource::Inline(vec![1.0, 0.6, 0.5, 0.4, 0.3]), Algorithm::UniformAllocation);
    spec.k = 3;
    spec.axis = SweepAxis::Q(vec![400, 40, 20]);
    spec.reps = 8;
    let result = run_sweep(&spec).unwrap();
    let axis: Vec<f64> = result.rows.iter().map(|r| r.axis_value).collect();
    assert_eq!(axis, vec![400.0, 40.0, 20.0]);
    for row in &result.rows {
        assert!((0.0..=1.0).contains(&row.success_rate));
        assert!(row.mean_plays <= row.axis_value);
    }
}
