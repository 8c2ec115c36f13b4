use proptest::prelude::*;

use panda::dataset::{builtin_configurations, ComponentId, Dataset};
use panda::par;
use panda::power_model::{predict_component_power, predict_total_power, train_panda};
use panda::quality::{predict_area, predict_cycles, train_area, train_perf};
use panda::regressor::TrainOptions;
use panda::resource::{eval_resource, ResourceParams};
use panda::synth::{generate, SynthSpec};

fn small_dataset(seed: u64) -> Dataset {
    generate(&SynthSpec::default_for(seed))
        .unwrap()
        .subset(&["C2", "C5", "C9", "C11", "C14"])
}

fn quick() -> TrainOptions {
    TrainOptions::default().with_n_trees(10).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn label_rescaling_rescales_predictions(seed in 0u64..50, scale in 0.01f64..100.0) {
        let ds = small_dataset(seed);
        let mut scaled = ds.clone();
        for s in &mut scaled.samples {
            s.total_power *= scale;
            for v in s.component_power.as_mut().unwrap().values_mut() {
                *v *= scale;
            }
        }
        let a = train_panda(&ds, quick(), &ResourceParams::default()).unwrap();
        let b = train_panda(&scaled, quick(), &ResourceParams::default()).unwrap();
        for s in &ds.samples {
            let pa = predict_total_power(&a, &s.config, &s.events).unwrap().0;
            let pb = predict_total_power(&b, &s.config, &s.events).unwrap().0;
            prop_assert!((pb - scale * pa).abs() <= 1e-9 * scale * pa, "{pb} vs {}", scale * pa);
        }
    }

    #[test]
    fn synthetic_component_sum_is_total(seed in 0u64..10_000, cfg in 0usize..17, wl in 0usize..8) {
        let spec = SynthSpec::default_for(seed);
        let config = &builtin_configurations()[cfg];
        let s = spec.sample(config, &spec.workloads[wl].name).unwrap();
        let sum: f64 = s.component_power.as_ref().unwrap().values().sum();
        prop_assert_eq!(sum, s.total_power);
        s.validate().unwrap();
    }

    #[test]
    fn predictions_stay_in_range_under_event_perturbation(seed in 0u64..20, factor in 0.0f64..5.0, pick in 0usize..40) {
        let ds = small_dataset(seed);
        let model = train_panda(&ds, quick(), &ResourceParams::default()).unwrap();
        let cal = train_perf(&ds, &quick()).unwrap();
        let mut s = ds.samples[pick].clone();
        for (name, v) in s.events.counts.iter_mut() {
            if name != "numCycles" {
                *v = (*v as f64 * factor) as u64;
            }
        }
        let (total, parts) = predict_total_power(&model, &s.config, &s.events).unwrap();
        prop_assert!(total >= 0.0);
        prop_assert!(parts.values().all(|p| *p >= 0.0));
        prop_assert!(predict_cycles(&cal, &s.config, &s.events).unwrap() >= 1.0);
    }
}

#[test]
fn component_power_is_linear_in_resource_function() {
    let ds = small_dataset(3);
    let mut model = train_panda(&ds, quick(), &ResourceParams::default()).unwrap();
    let s = &ds.samples[0];
    let before = predict_component_power(&model, ComponentId::OtherLogic, &s.config, &s.events).unwrap();
    let f0 = eval_resource(ComponentId::OtherLogic, &s.config, &model.resource_params).unwrap();
    model.resource_params.otherlogic_bias += f0;
    let after = predict_component_power(&model, ComponentId::OtherLogic, &s.config, &s.events).unwrap();
    assert!((after - 2.0 * before).abs() <= 1e-12 * before);
}

#[test]
fn area_ignores_workload() {
    let ds = small_dataset(4);
    let m = train_area(&ds, &quick(), false, &ResourceParams::default()).unwrap();
    for id in ds.config_ids() {
        let areas: Vec<f64> = ds
            .samples_for(&id)
            .map(|s| predict_area(&m, &s.config).unwrap().0)
            .collect();
        assert!(areas.windows(2).all(|w| w[0] == w[1]));
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let spec = SynthSpec::default_for(9);
    let one = par::with_threads(1, || generate(&spec).unwrap());
    let many = par::with_threads(4, || generate(&spec).unwrap());
    assert_eq!(one, many);
    let ds = one.subset(&["C1", "C6", "C13"]);
    let a = par::with_threads(1, || train_panda(&ds, quick(), &ResourceParams::default()).unwrap());
    let b = par::with_threads(4, || train_panda(&ds, quick(), &ResourceParams::default()).unwrap());
    assert_eq!(a, b);
}
